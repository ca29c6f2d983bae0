//! Temporal event log of grid elements.
//!
//! Every node (plant, substation, transformer) and every edge (line) carries a
//! commission year and an optional decommission year. An element is active in
//! year `y` when `commissioned <= y < decommissioned`, so it disappears in the
//! year it is decommissioned. Parallel circuits between the same pair of
//! substations are merged into a single edge when the log is parsed.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::io::Read;
use std::ops::RangeInclusive;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Calendar year. Snapshots have yearly resolution.
pub type Year = i32;

pub const NODE_COLUMNS: [&str; 6] = [
    "id",
    "name",
    "kind",
    "commissioned",
    "decommissioned",
    "domestic",
];

pub const EDGE_COLUMNS: [&str; 7] = [
    "id",
    "node_a",
    "node_b",
    "voltage_kv",
    "commissioned",
    "decommissioned",
    "domestic",
];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LogError {
    #[error("{file}: header must be `{expected}`, found `{found}`")]
    BadHeader {
        file: &'static str,
        expected: String,
        found: String,
    },
    #[error("{file} row {row}: {message}")]
    MalformedRow {
        file: &'static str,
        row: u64,
        message: String,
    },
    #[error("nodes row {row}: duplicate node id `{id}`")]
    DuplicateNode { id: String, row: u64 },
    #[error("edges row {row}: duplicate edge id `{id}`")]
    DuplicateEdge { id: String, row: u64 },
    #[error("edges row {row}: unknown endpoint `{id}`")]
    UnknownEndpoint { id: String, row: u64 },
    #[error("{file} row {row}: `{id}` decommissioned in {decommissioned} before commission in {commissioned}")]
    DecommissionBeforeCommission {
        file: &'static str,
        id: String,
        row: u64,
        commissioned: Year,
        decommissioned: Year,
    },
    #[error("edges row {row}: `{id}` is a self-loop on `{node}`")]
    SelfLoop { id: String, node: String, row: u64 },
    #[error("edges row {row}: `{id}` is active outside the lifetime of endpoint `{node}`")]
    OutlivesEndpoint { id: String, node: String, row: u64 },
    #[error("voltage filter is empty")]
    EmptyVoltageFilter,
    #[error("year range is empty")]
    EmptyYearRange,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Plant,
    Substation,
    Transformer,
}

impl NodeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            NodeKind::Plant => "plant",
            NodeKind::Substation => "substation",
            NodeKind::Transformer => "transformer",
        }
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NodeKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "plant" => Ok(NodeKind::Plant),
            "substation" => Ok(NodeKind::Substation),
            "transformer" => Ok(NodeKind::Transformer),
            other => Err(format!("unknown node kind `{other}`")),
        }
    }
}

/// Half-open activity interval `[commissioned, decommissioned)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Lifetime {
    pub commissioned: Year,
    pub decommissioned: Option<Year>,
}

impl Lifetime {
    pub fn new(commissioned: Year, decommissioned: Option<Year>) -> Self {
        Lifetime {
            commissioned,
            decommissioned,
        }
    }

    pub fn is_active(&self, year: Year) -> bool {
        self.commissioned <= year && self.decommissioned.is_none_or(|end| year < end)
    }

    /// True when `self` is active only in years where `outer` is active too.
    pub fn within(&self, outer: &Lifetime) -> bool {
        if self.is_empty() {
            return true;
        }
        let start_ok = outer.commissioned <= self.commissioned;
        let end_ok = match (self.decommissioned, outer.decommissioned) {
            (_, None) => true,
            (None, Some(_)) => false,
            (Some(inner), Some(outer)) => inner <= outer,
        };
        start_ok && end_ok
    }

    fn is_empty(&self) -> bool {
        self.decommissioned == Some(self.commissioned)
    }

    /// Whether two lifetimes share at least one active year.
    pub fn overlaps(&self, other: &Lifetime) -> bool {
        if self.is_empty() || other.is_empty() {
            return false;
        }
        let a_before_b_ends = other
            .decommissioned
            .is_none_or(|end| self.commissioned < end);
        let b_before_a_ends = self
            .decommissioned
            .is_none_or(|end| other.commissioned < end);
        a_before_b_ends && b_before_a_ends
    }

    fn union(&self, other: &Lifetime) -> Lifetime {
        let decommissioned = match (self.decommissioned, other.decommissioned) {
            (Some(a), Some(b)) => Some(a.max(b)),
            _ => None,
        };
        Lifetime::new(self.commissioned.min(other.commissioned), decommissioned)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub id: String,
    pub name: String,
    pub kind: NodeKind,
    pub lifetime: Lifetime,
    pub domestic: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub id: String,
    pub node_a: String,
    pub node_b: String,
    pub voltage_kv: u32,
    pub lifetime: Lifetime,
    pub domestic: bool,
}

impl EdgeRecord {
    /// Endpoint pair in sorted order.
    pub fn endpoints(&self) -> (&str, &str) {
        if self.node_a <= self.node_b {
            (&self.node_a, &self.node_b)
        } else {
            (&self.node_b, &self.node_a)
        }
    }
}

/// Record of parallel circuits folded into one edge at ingest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitMerge {
    /// Id of the surviving edge.
    pub kept: String,
    /// Ids of the rows absorbed into `kept`.
    pub absorbed: Vec<String>,
}

/// Ids of the elements active in one year.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ActiveSet {
    pub nodes: BTreeSet<String>,
    pub edges: BTreeSet<String>,
}

/// Validated, immutable event log.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TemporalGridLog {
    nodes: Vec<NodeRecord>,
    edges: Vec<EdgeRecord>,
    merges: Vec<CircuitMerge>,
    node_lookup: HashMap<String, usize>,
}

impl TemporalGridLog {
    /// Parse `nodes.csv` and `edges.csv` contents.
    pub fn parse<N: Read, E: Read>(nodes_source: N, edges_source: E) -> Result<Self, LogError> {
        let nodes = read_nodes(nodes_source)?;
        let edges = read_edges(edges_source)?;
        Self::from_records(nodes, edges)
    }

    pub fn parse_str(nodes_csv: &str, edges_csv: &str) -> Result<Self, LogError> {
        Self::parse(nodes_csv.as_bytes(), edges_csv.as_bytes())
    }

    /// Validate records and merge parallel circuits. Row numbers in errors
    /// count the header as line 1.
    pub fn from_records(nodes: Vec<NodeRecord>, edges: Vec<EdgeRecord>) -> Result<Self, LogError> {
        let mut node_lookup = HashMap::with_capacity(nodes.len());
        for (i, node) in nodes.iter().enumerate() {
            let row = i as u64 + 2;
            if node_lookup.insert(node.id.clone(), i).is_some() {
                return Err(LogError::DuplicateNode {
                    id: node.id.clone(),
                    row,
                });
            }
            check_order("nodes", &node.id, row, &node.lifetime)?;
        }

        let mut edge_ids = BTreeSet::new();
        for (i, edge) in edges.iter().enumerate() {
            let row = i as u64 + 2;
            if !edge_ids.insert(edge.id.as_str()) {
                return Err(LogError::DuplicateEdge {
                    id: edge.id.clone(),
                    row,
                });
            }
            check_order("edges", &edge.id, row, &edge.lifetime)?;
            if edge.node_a == edge.node_b {
                return Err(LogError::SelfLoop {
                    id: edge.id.clone(),
                    node: edge.node_a.clone(),
                    row,
                });
            }
            for endpoint in [&edge.node_a, &edge.node_b] {
                let Some(&at) = node_lookup.get(endpoint) else {
                    return Err(LogError::UnknownEndpoint {
                        id: endpoint.clone(),
                        row,
                    });
                };
                if !edge.lifetime.within(&nodes[at].lifetime) {
                    return Err(LogError::OutlivesEndpoint {
                        id: edge.id.clone(),
                        node: endpoint.clone(),
                        row,
                    });
                }
            }
        }

        let (edges, merges) = merge_parallel(edges);
        Ok(TemporalGridLog {
            nodes,
            edges,
            merges,
            node_lookup,
        })
    }

    pub fn nodes(&self) -> &[NodeRecord] {
        &self.nodes
    }

    pub fn edges(&self) -> &[EdgeRecord] {
        &self.edges
    }

    pub fn merges(&self) -> &[CircuitMerge] {
        &self.merges
    }

    pub fn node(&self, id: &str) -> Option<&NodeRecord> {
        self.node_lookup.get(id).map(|&i| &self.nodes[i])
    }

    /// Earliest commission year and latest year mentioned by any record.
    pub fn year_range(&self) -> Option<RangeInclusive<Year>> {
        let lifetimes = self
            .nodes
            .iter()
            .map(|n| n.lifetime)
            .chain(self.edges.iter().map(|e| e.lifetime));
        let mut bounds: Option<(Year, Year)> = None;
        for life in lifetimes {
            let hi = life
                .decommissioned
                .unwrap_or(life.commissioned)
                .max(life.commissioned);
            bounds = Some(match bounds {
                None => (life.commissioned, hi),
                Some((lo0, hi0)) => (lo0.min(life.commissioned), hi0.max(hi)),
            });
        }
        bounds.map(|(lo, hi)| lo..=hi)
    }

    fn node_active(&self, id: &str, year: Year) -> bool {
        self.node(id).is_some_and(|n| n.lifetime.is_active(year))
    }

    /// Whether an edge and both of its endpoints are active in `year`.
    pub fn edge_active(&self, edge: &EdgeRecord, year: Year) -> bool {
        edge.lifetime.is_active(year)
            && self.node_active(&edge.node_a, year)
            && self.node_active(&edge.node_b, year)
    }

    pub fn active_elements(&self, year: Year) -> ActiveSet {
        let nodes = self
            .nodes
            .iter()
            .filter(|n| n.lifetime.is_active(year))
            .map(|n| n.id.clone())
            .collect();
        let edges = self
            .edges
            .iter()
            .filter(|e| self.edge_active(e, year))
            .map(|e| e.id.clone())
            .collect();
        ActiveSet { nodes, edges }
    }

    /// Per-year count of active edges with a voltage in `voltages`, optionally
    /// restricted to domestic lines.
    pub fn line_count_series(
        &self,
        voltages: &BTreeSet<u32>,
        domestic_only: bool,
        years: RangeInclusive<Year>,
    ) -> Result<Vec<(Year, usize)>, LogError> {
        if voltages.is_empty() {
            return Err(LogError::EmptyVoltageFilter);
        }
        if years.is_empty() {
            return Err(LogError::EmptyYearRange);
        }
        let selected: Vec<&EdgeRecord> = self
            .edges
            .iter()
            .filter(|e| voltages.contains(&e.voltage_kv) && (!domestic_only || e.domestic))
            .collect();
        Ok(years
            .map(|year| {
                let count = selected
                    .iter()
                    .filter(|e| self.edge_active(e, year))
                    .count();
                (year, count)
            })
            .collect())
    }

    /// Canonical `nodes.csv` text.
    pub fn nodes_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(NODE_COLUMNS).expect("in-memory write");
        for n in &self.nodes {
            w.write_record([
                n.id.as_str(),
                n.name.as_str(),
                n.kind.as_str(),
                &n.lifetime.commissioned.to_string(),
                &opt_year(n.lifetime.decommissioned),
                bool_str(n.domestic),
            ])
            .expect("in-memory write");
        }
        into_string(w)
    }

    /// Canonical `edges.csv` text, after circuit merging.
    pub fn edges_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(EDGE_COLUMNS).expect("in-memory write");
        for e in &self.edges {
            w.write_record([
                e.id.as_str(),
                e.node_a.as_str(),
                e.node_b.as_str(),
                &e.voltage_kv.to_string(),
                &e.lifetime.commissioned.to_string(),
                &opt_year(e.lifetime.decommissioned),
                bool_str(e.domestic),
            ])
            .expect("in-memory write");
        }
        into_string(w)
    }
}

fn into_string(w: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 output")
}

fn opt_year(y: Option<Year>) -> String {
    y.map(|y| y.to_string()).unwrap_or_default()
}

fn bool_str(b: bool) -> &'static str {
    if b {
        "true"
    } else {
        "false"
    }
}

fn check_order(file: &'static str, id: &str, row: u64, life: &Lifetime) -> Result<(), LogError> {
    match life.decommissioned {
        Some(end) if end < life.commissioned => Err(LogError::DecommissionBeforeCommission {
            file,
            id: id.to_string(),
            row,
            commissioned: life.commissioned,
            decommissioned: end,
        }),
        _ => Ok(()),
    }
}

/// Fold rows on the same unordered endpoint pair whose lifetimes overlap. The
/// survivor is the earliest-commissioned row (file order breaks ties); it
/// spans the union of the group's years and takes the highest voltage.
fn merge_parallel(edges: Vec<EdgeRecord>) -> (Vec<EdgeRecord>, Vec<CircuitMerge>) {
    let mut groups: BTreeMap<(String, String), Vec<usize>> = BTreeMap::new();
    for (i, e) in edges.iter().enumerate() {
        let (a, b) = e.endpoints();
        groups
            .entry((a.to_string(), b.to_string()))
            .or_default()
            .push(i);
    }

    let mut absorbed_into: Vec<Option<usize>> = vec![None; edges.len()];
    let mut merged: Vec<EdgeRecord> = edges.clone();
    for members in groups.values() {
        if members.len() < 2 {
            continue;
        }
        let mut order = members.clone();
        order.sort_by_key(|&i| (edges[i].lifetime.commissioned, i));
        let mut head = order[0];
        for &i in &order[1..] {
            if merged[head].lifetime.overlaps(&edges[i].lifetime) {
                merged[head].lifetime = merged[head].lifetime.union(&edges[i].lifetime);
                merged[head].voltage_kv = merged[head].voltage_kv.max(edges[i].voltage_kv);
                absorbed_into[i] = Some(head);
            } else {
                head = i;
            }
        }
    }

    let mut notes: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    for (i, target) in absorbed_into.iter().enumerate() {
        if let Some(t) = target {
            notes.entry(*t).or_default().push(edges[i].id.clone());
        }
    }
    let merges = notes
        .into_iter()
        .map(|(t, absorbed)| CircuitMerge {
            kept: edges[t].id.clone(),
            absorbed,
        })
        .collect();
    let kept = merged
        .into_iter()
        .zip(&absorbed_into)
        .filter(|(_, t)| t.is_none())
        .map(|(e, _)| e)
        .collect();
    (kept, merges)
}

fn reader<R: Read>(source: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(source)
}

fn check_header<R: Read>(
    file: &'static str,
    rdr: &mut csv::Reader<R>,
    expected: &[&str],
) -> Result<(), LogError> {
    let found = rdr
        .headers()
        .map_err(|e| LogError::MalformedRow {
            file,
            row: 1,
            message: e.to_string(),
        })?
        .iter()
        .map(str::trim)
        .collect::<Vec<_>>()
        .join(",");
    let expected = expected.join(",");
    if found != expected {
        return Err(LogError::BadHeader {
            file,
            expected,
            found,
        });
    }
    Ok(())
}

struct Row<'a> {
    file: &'static str,
    line: u64,
    record: &'a csv::StringRecord,
}

impl Row<'_> {
    fn bad(&self, message: impl Into<String>) -> LogError {
        LogError::MalformedRow {
            file: self.file,
            row: self.line,
            message: message.into(),
        }
    }

    fn text(&self, col: usize, name: &str) -> Result<String, LogError> {
        let value = self.record.get(col).unwrap_or("").trim();
        if value.is_empty() {
            return Err(self.bad(format!("missing `{name}`")));
        }
        Ok(value.to_string())
    }

    fn parse<T: FromStr>(&self, col: usize, name: &str) -> Result<T, LogError> {
        let raw = self.text(col, name)?;
        raw.parse()
            .map_err(|_| self.bad(format!("invalid `{name}` value `{raw}`")))
    }

    fn optional_year(&self, col: usize, name: &str) -> Result<Option<Year>, LogError> {
        let raw = self.record.get(col).unwrap_or("").trim();
        if raw.is_empty() {
            return Ok(None);
        }
        raw.parse()
            .map(Some)
            .map_err(|_| self.bad(format!("invalid `{name}` value `{raw}`")))
    }
}

fn read_rows<R: Read>(
    file: &'static str,
    source: R,
    columns: &[&str],
    mut each: impl FnMut(Row<'_>) -> Result<(), LogError>,
) -> Result<(), LogError> {
    let mut rdr = reader(source);
    check_header(file, &mut rdr, columns)?;
    let mut record = csv::StringRecord::new();
    let mut line = 1;
    loop {
        match rdr.read_record(&mut record) {
            Ok(false) => return Ok(()),
            Ok(true) => {
                line = record.position().map_or(line + 1, |p| p.line());
                if record.len() != columns.len() {
                    return Err(LogError::MalformedRow {
                        file,
                        row: line,
                        message: format!(
                            "expected {} fields, found {}",
                            columns.len(),
                            record.len()
                        ),
                    });
                }
                each(Row {
                    file,
                    line,
                    record: &record,
                })?;
            }
            Err(e) => {
                return Err(LogError::MalformedRow {
                    file,
                    row: e.position().map_or(line + 1, |p| p.line()),
                    message: e.to_string(),
                })
            }
        }
    }
}

fn read_nodes<R: Read>(source: R) -> Result<Vec<NodeRecord>, LogError> {
    let mut out = Vec::new();
    read_rows("nodes", source, &NODE_COLUMNS, |row| {
        let kind = row.text(2, "kind")?;
        let kind = kind.parse().map_err(|msg: String| row.bad(msg))?;
        out.push(NodeRecord {
            id: row.text(0, "id")?,
            name: row.record.get(1).unwrap_or("").trim().to_string(),
            kind,
            lifetime: Lifetime::new(
                row.parse(3, "commissioned")?,
                row.optional_year(4, "decommissioned")?,
            ),
            domestic: row.parse(5, "domestic")?,
        });
        Ok(())
    })?;
    Ok(out)
}

fn read_edges<R: Read>(source: R) -> Result<Vec<EdgeRecord>, LogError> {
    let mut out = Vec::new();
    read_rows("edges", source, &EDGE_COLUMNS, |row| {
        let voltage_kv: u32 = row.parse(3, "voltage_kv")?;
        if voltage_kv == 0 {
            return Err(row.bad("`voltage_kv` must be positive"));
        }
        out.push(EdgeRecord {
            id: row.text(0, "id")?,
            node_a: row.text(1, "node_a")?,
            node_b: row.text(2, "node_b")?,
            voltage_kv,
            lifetime: Lifetime::new(
                row.parse(4, "commissioned")?,
                row.optional_year(5, "decommissioned")?,
            ),
            domestic: row.parse(6, "domestic")?,
        });
        Ok(())
    })?;
    Ok(out)
}
