//! Cumulative degree distributions and their power-law / exponential fits.
//!
//! The CCDF has one point per distinct degree `k >= 1`, `p(k)` being the share
//! of non-isolated nodes with degree at least `k`. Both model families
//!
//! * power law: `p(k) = a k^(-gamma)`
//! * exponential: `p(k) = a exp(-k / kappa)`
//!
//! are fitted by unweighted least squares in linear space. The start point
//! comes from a straight-line fit in log space (`ln p` against `ln k` or `k`)
//! and is refined with a damped Gauss-Newton (Levenberg-Marquardt) iteration.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const MAX_ITERATIONS: usize = 200;
pub const RELATIVE_TOLERANCE: f64 = 1e-10;
const MIN_POINTS: usize = 3;
const MAX_DAMPING: f64 = 1e20;

#[derive(Debug, Error, PartialEq)]
pub enum FitError {
    #[error("no node has degree >= 1")]
    AllIsolated,
    #[error("insufficient points: {found} distinct degrees, at least {MIN_POINTS} required")]
    InsufficientPoints { found: usize },
    #[error("invalid ccdf point (k = {k}, p = {p})")]
    InvalidPoint { k: f64, p: f64 },
    #[error("{} fit did not converge in {iterations} iterations (last sse {})", last.model, last.sse)]
    NotConverged { last: FitResult, iterations: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    PowerLaw,
    Exponential,
}

impl ModelKind {
    pub const ALL: [ModelKind; 2] = [ModelKind::PowerLaw, ModelKind::Exponential];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::PowerLaw => "power_law",
            ModelKind::Exponential => "exponential",
        }
    }

    /// Model value at `k` for prefactor `a` and exponent/scale `s`.
    pub fn eval(self, a: f64, s: f64, k: f64) -> f64 {
        match self {
            ModelKind::PowerLaw => a * k.powf(-s),
            ModelKind::Exponential => a * (-k / s).exp(),
        }
    }

    /// Partial derivatives of [`eval`](Self::eval) by `a` and `s`.
    fn gradient(self, a: f64, s: f64, k: f64) -> [f64; 2] {
        match self {
            ModelKind::PowerLaw => {
                let base = k.powf(-s);
                [base, -a * base * k.ln()]
            }
            ModelKind::Exponential => {
                let base = (-k / s).exp();
                [base, a * base * k / (s * s)]
            }
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "power_law" | "power-law" | "powerlaw" => Ok(ModelKind::PowerLaw),
            "exponential" | "exp" => Ok(ModelKind::Exponential),
            other => Err(format!("unknown model `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CcdfPoint {
    pub k: u32,
    pub p: f64,
}

/// Complementary cumulative degree distribution over degrees `>= 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ccdf {
    points: Vec<CcdfPoint>,
    /// Number of nodes with degree `>= 1`, when built from counts.
    base: Option<usize>,
}

impl Ccdf {
    /// From a degree histogram (`histogram[k]` nodes of degree `k`). Isolated
    /// nodes are left out of the denominator.
    pub fn from_histogram(histogram: &[usize]) -> Result<Self, FitError> {
        let base: usize = histogram.iter().skip(1).sum();
        if base == 0 {
            return Err(FitError::AllIsolated);
        }
        let mut tail = base;
        let mut points = Vec::new();
        for (k, &count) in histogram.iter().enumerate().skip(1) {
            if count > 0 {
                points.push(CcdfPoint {
                    k: k as u32,
                    p: tail as f64 / base as f64,
                });
            }
            tail -= count;
        }
        Ok(Ccdf {
            points,
            base: Some(base),
        })
    }

    /// From explicit points, e.g. model-generated curves. Points are sorted by
    /// degree; degrees must be distinct and `>= 1`, probabilities in `(0, 1]`
    /// and non-increasing in `k`.
    pub fn from_points(mut points: Vec<CcdfPoint>) -> Result<Self, FitError> {
        points.sort_by_key(|p| p.k);
        for (i, pt) in points.iter().enumerate() {
            let bad = pt.k == 0
                || !(pt.p > 0.0 && pt.p <= 1.0)
                || points.get(i + 1).is_some_and(|n| n.k == pt.k || n.p > pt.p);
            if bad {
                return Err(FitError::InvalidPoint {
                    k: pt.k as f64,
                    p: pt.p,
                });
            }
        }
        if points.is_empty() {
            return Err(FitError::AllIsolated);
        }
        Ok(Ccdf { points, base: None })
    }

    pub fn from_degrees(degrees: &[usize]) -> Result<Self, FitError> {
        let max = degrees.iter().copied().max().unwrap_or(0);
        let mut histogram = vec![0; max + 1];
        for &k in degrees {
            histogram[k] += 1;
        }
        Self::from_histogram(&histogram)
    }

    pub fn points(&self) -> &[CcdfPoint] {
        &self.points
    }

    pub fn base(&self) -> Option<usize> {
        self.base
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Node counts per degree recovered from the tail probabilities; only
    /// available when the node base is known.
    pub fn histogram(&self) -> Option<Vec<usize>> {
        let base = self.base? as f64;
        let max = self.points.last().map_or(0, |p| p.k as usize);
        let mut out = vec![0; max + 1];
        for (i, point) in self.points.iter().enumerate() {
            let here = (point.p * base).round() as usize;
            let next = self
                .points
                .get(i + 1)
                .map_or(0, |n| (n.p * base).round() as usize);
            out[point.k as usize] = here - next;
        }
        Some(out)
    }

    /// Two-column `k,p` CSV with header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,p\n");
        for point in &self.points {
            out.push_str(&format!("{},{}\n", point.k, point.p));
        }
        out
    }

    pub fn xy(&self) -> Vec<(f64, f64)> {
        self.points.iter().map(|p| (p.k as f64, p.p)).collect()
    }
}

/// Outcome of one model fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub model: ModelKind,
    /// Prefactor `a`.
    #[serde(rename = "a")]
    pub prefactor: f64,
    /// `gamma` for the power law, `kappa` for the exponential.
    #[serde(rename = "gamma_or_kappa")]
    pub scale: f64,
    /// Sum of squared residuals in linear space.
    pub sse: f64,
    pub r_squared: f64,
}

impl FitResult {
    pub fn predict(&self, k: f64) -> f64 {
        self.model.eval(self.prefactor, self.scale, k)
    }
}

pub fn fit_model(ccdf: &Ccdf, model: ModelKind) -> Result<FitResult, FitError> {
    fit_points(&ccdf.xy(), model)
}

/// Fit `model` to `(k, p)` pairs given in any order. Requires at least three
/// points with `k > 0` and `p > 0`.
pub fn fit_points(points: &[(f64, f64)], model: ModelKind) -> Result<FitResult, FitError> {
    if points.len() < MIN_POINTS {
        return Err(FitError::InsufficientPoints {
            found: points.len(),
        });
    }
    for &(k, p) in points {
        if !(k > 0.0 && p > 0.0 && k.is_finite() && p.is_finite()) {
            return Err(FitError::InvalidPoint { k, p });
        }
    }
    let mut data = points.to_vec();
    data.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));

    let (mut a, mut s) = initial_guess(&data, model);
    let mut sse = sum_squares(&data, model, a, s);
    let mut damping = 1e-3;
    let mut iterations = 0;

    while iterations < MAX_ITERATIONS {
        if sse == 0.0 {
            break;
        }
        iterations += 1;
        let (jtj, jtr) = normal_equations(&data, model, a, s);
        let accepted = loop {
            if let Some((da, ds)) = solve_damped(&jtj, &jtr, damping) {
                let (na, ns) = (a + da, s + ds);
                if ns > 0.0 && na.is_finite() && ns.is_finite() {
                    let nsse = sum_squares(&data, model, na, ns);
                    if nsse < sse {
                        damping = (damping / 10.0).max(1e-12);
                        break Some((na, ns, nsse));
                    }
                }
            }
            damping *= 10.0;
            if damping > MAX_DAMPING {
                break None;
            }
        };
        // no downhill step at any damping: we sit at the minimum
        let Some((na, ns, nsse)) = accepted else {
            return Ok(finish(&data, model, a, s, sse));
        };
        let relative = (sse - nsse) / sse;
        a = na;
        s = ns;
        sse = nsse;
        if relative < RELATIVE_TOLERANCE {
            return Ok(finish(&data, model, a, s, sse));
        }
    }
    if sse == 0.0 {
        return Ok(finish(&data, model, a, s, sse));
    }
    Err(FitError::NotConverged {
        last: finish(&data, model, a, s, sse),
        iterations,
    })
}

fn finish(data: &[(f64, f64)], model: ModelKind, a: f64, s: f64, sse: f64) -> FitResult {
    let mean = data.iter().map(|&(_, p)| p).sum::<f64>() / data.len() as f64;
    let total: f64 = data.iter().map(|&(_, p)| (p - mean).powi(2)).sum();
    let r_squared = if total > 0.0 {
        1.0 - sse / total
    } else if sse == 0.0 {
        1.0
    } else {
        0.0
    };
    FitResult {
        model,
        prefactor: a,
        scale: s,
        sse,
        r_squared,
    }
}

/// Straight-line fit of `ln p` in log space; falls back to a unit exponent
/// (or the mean degree as scale) when the slope is not decreasing.
fn initial_guess(data: &[(f64, f64)], model: ModelKind) -> (f64, f64) {
    let xs: Vec<f64> = data
        .iter()
        .map(|&(k, _)| match model {
            ModelKind::PowerLaw => k.ln(),
            ModelKind::Exponential => k,
        })
        .collect();
    let ys: Vec<f64> = data.iter().map(|&(_, p)| p.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    if slope < 0.0 {
        let a = (my - slope * mx).exp();
        let s = match model {
            ModelKind::PowerLaw => -slope,
            ModelKind::Exponential => -1.0 / slope,
        };
        (a, s)
    } else {
        let mean_k = data.iter().map(|&(k, _)| k).sum::<f64>() / n;
        let s = match model {
            ModelKind::PowerLaw => 1.0,
            ModelKind::Exponential => mean_k,
        };
        (my.exp(), s)
    }
}

fn sum_squares(data: &[(f64, f64)], model: ModelKind, a: f64, s: f64) -> f64 {
    data.iter()
        .map(|&(k, p)| (p - model.eval(a, s, k)).powi(2))
        .sum()
}

fn normal_equations(
    data: &[(f64, f64)],
    model: ModelKind,
    a: f64,
    s: f64,
) -> ([[f64; 2]; 2], [f64; 2]) {
    let mut jtj = [[0.0; 2]; 2];
    let mut jtr = [0.0; 2];
    for &(k, p) in data {
        let grad = model.gradient(a, s, k);
        let r = p - model.eval(a, s, k);
        for i in 0..2 {
            jtr[i] += grad[i] * r;
            for j in 0..2 {
                jtj[i][j] += grad[i] * grad[j];
            }
        }
    }
    (jtj, jtr)
}

/// Solve `(J^T J + damping * diag(J^T J)) delta = J^T r`.
fn solve_damped(jtj: &[[f64; 2]; 2], jtr: &[f64; 2], damping: f64) -> Option<(f64, f64)> {
    let d0 = jtj[0][0].max(f64::MIN_POSITIVE);
    let d1 = jtj[1][1].max(f64::MIN_POSITIVE);
    let m00 = jtj[0][0] + damping * d0;
    let m11 = jtj[1][1] + damping * d1;
    let m01 = jtj[0][1];
    let det = m00 * m11 - m01 * m01;
    if !(det.is_finite() && det.abs() > 0.0) {
        return None;
    }
    let da = (m11 * jtr[0] - m01 * jtr[1]) / det;
    let ds = (m00 * jtr[1] - m01 * jtr[0]) / det;
    (da.is_finite() && ds.is_finite()).then_some((da, ds))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preference {
    PowerLaw,
    Exponential,
    Tie,
}

/// Observed tail probability and each model's residual (`observed -
/// predicted`) at one of the highest degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailResidual {
    pub k: u32,
    pub observed: f64,
    pub power_law: f64,
    pub exponential: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitComparison {
    pub power_law: FitResult,
    pub exponential: FitResult,
    pub preferred: Preference,
    /// Residuals at the three highest degrees, highest first.
    pub tail: Vec<TailResidual>,
}

impl FitComparison {
    /// Sum of absolute tail residuals for one model.
    pub fn tail_misfit(&self, model: ModelKind) -> f64 {
        self.tail
            .iter()
            .map(|t| match model {
                ModelKind::PowerLaw => t.power_law.abs(),
                ModelKind::Exponential => t.exponential.abs(),
            })
            .sum()
    }
}

pub const TAIL_POINTS: usize = 3;

/// Fit both families; the lower SSE is preferred, equal SSE is a tie.
pub fn compare_fits(ccdf: &Ccdf) -> Result<FitComparison, FitError> {
    let power_law = fit_model(ccdf, ModelKind::PowerLaw)?;
    let exponential = fit_model(ccdf, ModelKind::Exponential)?;
    let preferred = match power_law.sse.total_cmp(&exponential.sse) {
        std::cmp::Ordering::Less => Preference::PowerLaw,
        std::cmp::Ordering::Greater => Preference::Exponential,
        std::cmp::Ordering::Equal => Preference::Tie,
    };
    let tail = ccdf
        .points()
        .iter()
        .rev()
        .take(TAIL_POINTS)
        .map(|pt| {
            let k = pt.k as f64;
            TailResidual {
                k: pt.k,
                observed: pt.p,
                power_law: pt.p - power_law.predict(k),
                exponential: pt.p - exponential.predict(k),
            }
        })
        .collect();
    Ok(FitComparison {
        power_law,
        exponential,
        preferred,
        tail,
    })
}
