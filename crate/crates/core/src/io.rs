//! Reading raw trajectories and writing results.
//!
//! Input is CSV with rows `entity_id,t,x,y` (an optional header line is
//! skipped). Groups and Reeb graphs can be written as JSON, CSV or DOT; the
//! JSON forms read back into the same values.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::groups::MaximalGroup;
use crate::model::{Dataset, EntitySet, Interval, ModelError, Point};
use crate::reeb::{ReebGraph, VertexKind};
use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot read input: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    ParseError { line: u64, message: String },
    #[error("entity {entity} has two samples at time {time}")]
    DuplicateSample { entity: String, time: f64 },
    #[error("the entities' time ranges have no common window")]
    EmptyCommonWindow,
    #[error("entity {entity} does not cover the window [{start}, {end}]")]
    EntityOutsideWindow { entity: String, start: f64, end: f64 },
    #[error("resampling step must be positive and finite")]
    InvalidStep,
    #[error("samples are not on a common time grid; resample them first")]
    Unsynchronized,
    #[error("unknown entity id {0}")]
    UnknownEntity(String),
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Samples of one entity, sorted by time.
#[derive(Debug, Clone, PartialEq)]
pub struct Series<T> {
    pub id: String,
    pub samples: Vec<(T, Point<T>)>,
}

impl<T: Scalar> Series<T> {
    pub fn start(&self) -> T {
        self.samples[0].0
    }

    pub fn end(&self) -> T {
        self.samples[self.samples.len() - 1].0
    }

    /// Linear interpolation; `t` must lie in `[start, end]`.
    fn at(&self, t: T) -> Point<T> {
        let i = self.samples.partition_point(|(s, _)| *s <= t);
        if i == 0 {
            return self.samples[0].1;
        }
        if i == self.samples.len() {
            return self.samples[i - 1].1;
        }
        let ((t0, p), (t1, q)) = (self.samples[i - 1], self.samples[i]);
        p.lerp(q, (t - t0) / (t1 - t0))
    }
}

/// Orders ids numerically when they all parse as integers, otherwise
/// lexicographically.
pub fn sort_ids(ids: &mut [String]) {
    if ids.iter().all(|s| s.parse::<i64>().is_ok()) {
        ids.sort_by_key(|s| s.parse::<i64>().unwrap_or(0));
    } else {
        ids.sort();
    }
}

/// Raw trajectories as read from CSV, one series per entity in id order.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTrajectories<T> {
    pub series: Vec<Series<T>>,
}

impl<T: Scalar> RawTrajectories<T> {
    /// The trajectories as a dataset when every entity has samples at the
    /// same times.
    pub fn to_dataset(&self) -> Result<Dataset<T>, IoError> {
        let Some(first) = self.series.first() else {
            return Err(ModelError::NoEntities.into());
        };
        let times: Vec<T> = first.samples.iter().map(|(t, _)| *t).collect();
        let synced = self
            .series
            .iter()
            .all(|s| s.samples.len() == times.len() && s.samples.iter().zip(&times).all(|((a, _), b)| a == b));
        if !synced {
            return Err(IoError::Unsynchronized);
        }
        let ids = self.series.iter().map(|s| s.id.clone()).collect();
        let positions = self.series.iter().map(|s| s.samples.iter().map(|(_, p)| *p).collect()).collect();
        Ok(Dataset::new(ids, times, positions)?)
    }
}

fn parse_field<T: Scalar>(field: &str, what: &str, line: u64) -> Result<T, IoError> {
    let v: f64 = field
        .trim()
        .parse()
        .map_err(|_| IoError::ParseError { line, message: format!("cannot parse {what} {field:?}") })?;
    if !v.is_finite() {
        return Err(IoError::ParseError { line, message: format!("{what} is not finite") });
    }
    Ok(T::from_f64_lossy(v))
}

/// Parses `entity_id,t,x,y` rows.
pub fn read_csv<T: Scalar, R: Read>(input: R) -> Result<RawTrajectories<T>, IoError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(false).flexible(true).trim(csv::Trim::All).from_reader(input);
    let mut by_id: BTreeMap<String, Vec<(T, Point<T>)>> = BTreeMap::new();
    let mut record = csv::StringRecord::new();
    let mut first = true;
    loop {
        let more = reader.read_record(&mut record).map_err(|e| IoError::ParseError {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        if !more {
            break;
        }
        let line = record.position().map_or(0, |p| p.line());
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        if record.len() != 4 {
            return Err(IoError::ParseError { line, message: format!("expected 4 fields, found {}", record.len()) });
        }
        if std::mem::take(&mut first) && record[1].parse::<f64>().is_err() {
            continue; // header
        }
        let t = parse_field(&record[1], "time", line)?;
        let p = Point::new(parse_field(&record[2], "x", line)?, parse_field(&record[3], "y", line)?);
        by_id.entry(record[0].to_string()).or_default().push((t, p));
    }
    let mut ids: Vec<String> = by_id.keys().cloned().collect();
    sort_ids(&mut ids);
    let mut series = Vec::with_capacity(ids.len());
    for id in ids {
        let mut samples = by_id.remove(&id).expect("id collected from map");
        samples.sort_by(|a, b| a.0.total_order(b.0));
        if let Some(w) = samples.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(IoError::DuplicateSample { entity: id, time: w[0].0.as_f64() });
        }
        series.push(Series { id, samples });
    }
    Ok(RawTrajectories { series })
}

pub fn load_csv<T: Scalar>(path: impl AsRef<Path>) -> Result<RawTrajectories<T>, IoError> {
    read_csv(std::fs::File::open(path)?)
}

/// Writes a dataset as `entity_id,t,x,y` rows with a header.
pub fn write_dataset_csv<T: Scalar>(ds: &Dataset<T>) -> String {
    let mut out = String::from("entity_id,t,x,y\n");
    for (e, id) in ds.ids().iter().enumerate() {
        for (i, t) in ds.times().iter().enumerate() {
            let p = ds.sample(e, i);
            let _ = writeln!(out, "{id},{t},{},{}", p.x, p.y);
        }
    }
    out
}

/// Options for [`resample`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResampleOptions<T> {
    pub dt: T,
    /// Time window to resample on; defaults to the window covered by every
    /// entity.
    pub window: Option<(T, T)>,
    /// Drop entities that do not cover the window instead of failing.
    pub clip: bool,
}

/// Linear interpolation of every entity on the grid `start, start + dt, …`
/// up to the end of the window.
pub fn resample<T: Scalar>(raw: &RawTrajectories<T>, opts: &ResampleOptions<T>) -> Result<Dataset<T>, IoError> {
    if !(opts.dt.is_finite() && opts.dt > T::zero()) {
        return Err(IoError::InvalidStep);
    }
    if raw.series.is_empty() {
        return Err(ModelError::NoEntities.into());
    }
    let (lo, hi) = match opts.window {
        Some(w) => w,
        None => {
            let lo = raw.series.iter().map(Series::start).fold(T::neg_infinity(), T::max);
            let hi = raw.series.iter().map(Series::end).fold(T::infinity(), T::min);
            (lo, hi)
        }
    };
    if !(lo < hi) {
        return Err(IoError::EmptyCommonWindow);
    }
    let mut kept = Vec::new();
    for s in &raw.series {
        if s.start() <= lo && s.end() >= hi {
            kept.push(s);
        } else if !opts.clip {
            return Err(IoError::EntityOutsideWindow { entity: s.id.clone(), start: lo.as_f64(), end: hi.as_f64() });
        }
    }
    let steps = ((hi - lo) / opts.dt + T::tolerance()).floor().to_usize().unwrap_or(0);
    let times: Vec<T> = (0..=steps).map(|k| lo + opts.dt * T::from_usize(k).unwrap_or_else(T::nan)).collect();
    let ids = kept.iter().map(|s| s.id.clone()).collect();
    let positions = kept.iter().map(|s| times.iter().map(|&t| s.at(t.min(hi))).collect()).collect();
    Ok(Dataset::new(ids, times, positions)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupRecord {
    pub entities: Vec<String>,
    pub start: f64,
    pub end: f64,
}

fn id_list(ids: &[String], set: &EntitySet) -> Vec<String> {
    set.iter().map(|x| ids[x].clone()).collect()
}

fn set_from_ids(ids: &[String], names: &[String]) -> Result<EntitySet, IoError> {
    let mut set = EntitySet::empty(ids.len());
    for name in names {
        let x = ids.iter().position(|i| i == name).ok_or_else(|| IoError::UnknownEntity(name.clone()))?;
        set.insert(x);
    }
    Ok(set)
}

pub fn group_records<T: Scalar>(ids: &[String], groups: &[MaximalGroup<T>]) -> Vec<GroupRecord> {
    groups
        .iter()
        .map(|g| GroupRecord {
            entities: id_list(ids, &g.entities),
            start: g.interval.start.as_f64(),
            end: g.interval.end.as_f64(),
        })
        .collect()
}

pub fn groups_to_json<T: Scalar>(ids: &[String], groups: &[MaximalGroup<T>]) -> String {
    serde_json::to_string_pretty(&group_records(ids, groups)).expect("group records serialize")
}

pub fn groups_from_json<T: Scalar>(ids: &[String], json: &str) -> Result<Vec<MaximalGroup<T>>, IoError> {
    let records: Vec<GroupRecord> = serde_json::from_str(json).map_err(|e| IoError::Json(e.to_string()))?;
    records
        .iter()
        .map(|r| {
            Ok(MaximalGroup {
                entities: set_from_ids(ids, &r.entities)?,
                interval: Interval::new(T::from_f64_lossy(r.start), T::from_f64_lossy(r.end)),
            })
        })
        .collect()
}

/// One row per group: `start,end,size,ids` with ids joined by `;`.
pub fn groups_to_csv<T: Scalar>(ids: &[String], groups: &[MaximalGroup<T>]) -> String {
    let mut out = String::from("start,end,size,ids\n");
    for g in groups {
        let names = id_list(ids, &g.entities).join(";");
        let _ = writeln!(out, "{},{},{},{}", g.interval.start, g.interval.end, g.size(), names);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexRecord {
    pub id: usize,
    pub kind: String,
    pub time: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub id: usize,
    pub from: usize,
    pub to: usize,
    pub entities: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReebRecord {
    pub entities: Vec<String>,
    pub start_time: f64,
    pub end_time: f64,
    pub vertices: Vec<VertexRecord>,
    pub edges: Vec<EdgeRecord>,
}

pub fn reeb_record<T: Scalar>(ids: &[String], reeb: &ReebGraph<T>) -> ReebRecord {
    ReebRecord {
        entities: ids.to_vec(),
        start_time: reeb.start_time().as_f64(),
        end_time: reeb.end_time().as_f64(),
        vertices: reeb
            .vertices()
            .iter()
            .enumerate()
            .map(|(id, v)| VertexRecord { id, kind: v.kind.name().to_string(), time: v.time.as_f64() })
            .collect(),
        edges: reeb
            .edges()
            .iter()
            .enumerate()
            .map(|(id, e)| EdgeRecord { id, from: e.from, to: e.to, entities: id_list(ids, &e.component) })
            .collect(),
    }
}

pub fn reeb_to_json<T: Scalar>(ids: &[String], reeb: &ReebGraph<T>) -> String {
    serde_json::to_string_pretty(&reeb_record(ids, reeb)).expect("Reeb record serializes")
}

pub fn reeb_from_record<T: Scalar>(rec: &ReebRecord) -> Result<ReebGraph<T>, IoError> {
    let mut vertices = Vec::with_capacity(rec.vertices.len());
    for (i, v) in rec.vertices.iter().enumerate() {
        if v.id != i {
            return Err(IoError::Json(format!("vertex ids must be 0..n in order, found {} at {i}", v.id)));
        }
        let kind = VertexKind::from_name(&v.kind).ok_or_else(|| IoError::Json(format!("unknown vertex kind {:?}", v.kind)))?;
        vertices.push((T::from_f64_lossy(v.time), kind));
    }
    let mut edges = Vec::with_capacity(rec.edges.len());
    for (i, e) in rec.edges.iter().enumerate() {
        if e.id != i {
            return Err(IoError::Json(format!("edge ids must be 0..n in order, found {} at {i}", e.id)));
        }
        edges.push((e.from, e.to, set_from_ids(&rec.entities, &e.entities)?));
    }
    ReebGraph::from_parts(
        rec.entities.len(),
        T::from_f64_lossy(rec.start_time),
        T::from_f64_lossy(rec.end_time),
        vertices,
        edges,
    )
    .map_err(|e| IoError::Json(e.to_string()))
}

pub fn reeb_from_json<T: Scalar>(json: &str) -> Result<(Vec<String>, ReebGraph<T>), IoError> {
    let rec: ReebRecord = serde_json::from_str(json).map_err(|e| IoError::Json(e.to_string()))?;
    let graph = reeb_from_record(&rec)?;
    Ok((rec.entities, graph))
}

/// Graphviz rendering; vertices are labeled `kind@time`, edges with the
/// component size (and its ids when `verbose`).
pub fn reeb_to_dot<T: Scalar>(ids: &[String], reeb: &ReebGraph<T>, verbose: bool) -> String {
    let mut out = String::from("digraph reeb {\n  rankdir=LR;\n");
    for (i, v) in reeb.vertices().iter().enumerate() {
        let _ = writeln!(out, "  v{i} [label=\"{}@{}\"];", v.kind.name(), v.time);
    }
    for e in reeb.edges() {
        let mut label = e.component.len().to_string();
        if verbose {
            label.push_str(": ");
            label.push_str(&id_list(ids, &e.component).join(","));
        }
        let _ = writeln!(out, "  v{} -> v{} [label=\"{}\"];", e.from, e.to, label.replace('"', "\\\""));
    }
    out.push_str("}\n");
    out
}
