//! Domain types shared by every stage of the pipeline.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("dataset has no entities")]
    NoEntities,
    #[error("dataset needs at least two timestamps, got {0}")]
    TooFewTimestamps(usize),
    #[error("timestamps not strictly increasing at index {index}")]
    NonMonotonicTime { index: usize },
    #[error("entity {entity} has {len} positions, expected {expected}")]
    RaggedTrajectory { entity: usize, len: usize, expected: usize },
    #[error("entity {entity} has a non-finite coordinate at time index {index}")]
    NonFiniteCoordinate { entity: usize, index: usize },
    #[error("non-finite timestamp at index {index}")]
    NonFiniteTime { index: usize },
    #[error("expected {expected} entity ids, got {got}")]
    IdCountMismatch { expected: usize, got: usize },
    #[error("time {time} outside [{start}, {end}]")]
    TimeOutOfRange { time: f64, start: f64, end: f64 },
    #[error("entity index {0} out of range")]
    UnknownEntity(usize),
    #[error("invalid parameter: {0}")]
    InvalidParams(String),
}

/// A point in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point<T> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> Point<T> {
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    pub fn lerp(self, other: Self, f: T) -> Self {
        Self {
            x: self.x + (other.x - self.x) * f,
            y: self.y + (other.y - self.y) * f,
        }
    }

    pub fn dist_sq(self, other: Self) -> T {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// Synchronized trajectories: `n` entities sampled at the same `τ + 1` times.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<T> {
    ids: Vec<String>,
    times: Vec<T>,
    positions: Vec<Vec<Point<T>>>,
}

impl<T: Scalar> Dataset<T> {
    /// Builds a dataset and validates it.
    pub fn new(
        ids: Vec<String>,
        times: Vec<T>,
        positions: Vec<Vec<Point<T>>>,
    ) -> Result<Self, ModelError> {
        if ids.len() != positions.len() {
            return Err(ModelError::IdCountMismatch { expected: positions.len(), got: ids.len() });
        }
        let ds = Self { ids, times, positions };
        ds.validate()?;
        Ok(ds)
    }

    /// Like [`Dataset::new`] with ids `"0"`, `"1"`, ...
    pub fn with_index_ids(times: Vec<T>, positions: Vec<Vec<Point<T>>>) -> Result<Self, ModelError> {
        let ids = (0..positions.len()).map(|i| i.to_string()).collect();
        Self::new(ids, times, positions)
    }

    /// Checks every dataset invariant, reporting the first violation.
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.positions.is_empty() {
            return Err(ModelError::NoEntities);
        }
        if self.times.len() < 2 {
            return Err(ModelError::TooFewTimestamps(self.times.len()));
        }
        for (i, t) in self.times.iter().enumerate() {
            if !t.is_finite() {
                return Err(ModelError::NonFiniteTime { index: i });
            }
            if i > 0 && !(self.times[i - 1] < *t) {
                return Err(ModelError::NonMonotonicTime { index: i });
            }
        }
        let expected = self.times.len();
        for (entity, traj) in self.positions.iter().enumerate() {
            if traj.len() != expected {
                return Err(ModelError::RaggedTrajectory { entity, len: traj.len(), expected });
            }
            if let Some(index) = traj.iter().position(|p| !p.is_finite()) {
                return Err(ModelError::NonFiniteCoordinate { entity, index });
            }
        }
        Ok(())
    }

    pub fn num_entities(&self) -> usize {
        self.positions.len()
    }

    /// Number of trajectory edges (τ).
    pub fn num_edges(&self) -> usize {
        self.times.len() - 1
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn start_time(&self) -> T {
        self.times[0]
    }

    pub fn end_time(&self) -> T {
        self.times[self.times.len() - 1]
    }

    pub fn trajectory(&self, entity: usize) -> &[Point<T>] {
        &self.positions[entity]
    }

    pub fn sample(&self, entity: usize, index: usize) -> Point<T> {
        self.positions[entity][index]
    }

    /// Position by linear interpolation between the bracketing samples.
    pub fn position_at(&self, entity: usize, t: T) -> Result<Point<T>, ModelError> {
        if entity >= self.num_entities() {
            return Err(ModelError::UnknownEntity(entity));
        }
        if !(t >= self.start_time() && t <= self.end_time()) {
            return Err(ModelError::TimeOutOfRange {
                time: t.as_f64(),
                start: self.start_time().as_f64(),
                end: self.end_time().as_f64(),
            });
        }
        let traj = &self.positions[entity];
        // index of the first timestamp strictly greater than t
        let hi = self.times.partition_point(|&s| s <= t);
        if hi == 0 {
            return Ok(traj[0]);
        }
        let lo = hi - 1;
        if hi == self.times.len() || self.times[lo] == t {
            return Ok(traj[lo]);
        }
        let f = (t - self.times[lo]) / (self.times[hi] - self.times[lo]);
        Ok(traj[lo].lerp(traj[hi], f))
    }
}

/// Group parameters: spatial radius ε, minimum size m, minimum duration δ and
/// robustness window α.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params<T> {
    pub eps: T,
    pub m: usize,
    pub delta: T,
    pub alpha: T,
}

impl<T: Scalar> Params<T> {
    pub fn new(eps: T, m: usize, delta: T, alpha: T) -> Result<Self, ModelError> {
        let p = Self { eps, m, delta, alpha };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let check = |name: &str, v: T| {
            if v.is_finite() && v >= T::zero() {
                Ok(())
            } else {
                Err(ModelError::InvalidParams(format!("{name} must be finite and non-negative")))
            }
        };
        check("eps", self.eps)?;
        check("delta", self.delta)?;
        check("alpha", self.alpha)?;
        if self.m == 0 {
            return Err(ModelError::InvalidParams("group size must be at least 1".into()));
        }
        Ok(())
    }
}

/// Closed time interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval<T> {
    pub start: T,
    pub end: T,
}

impl<T: Scalar> Interval<T> {
    pub fn new(start: T, end: T) -> Self {
        debug_assert!(start <= end, "interval start after end");
        Self { start, end }
    }

    pub fn duration(&self) -> T {
        self.end - self.start
    }

    pub fn contains(&self, t: T) -> bool {
        self.start <= t && t <= self.end
    }

    pub fn covers(&self, other: &Self) -> bool {
        self.start <= other.start && other.end <= self.end
    }
}

const BLOCK: usize = 64;

/// Fixed-capacity bitset over entity indices.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct EntitySet {
    blocks: Vec<u64>,
    capacity: usize,
}

impl EntitySet {
    pub fn empty(capacity: usize) -> Self {
        Self { blocks: vec![0; capacity.div_ceil(BLOCK)], capacity }
    }

    pub fn full(capacity: usize) -> Self {
        let mut s = Self::empty(capacity);
        for i in 0..capacity {
            s.insert(i);
        }
        s
    }

    pub fn singleton(capacity: usize, x: usize) -> Self {
        let mut s = Self::empty(capacity);
        s.insert(x);
        s
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(capacity: usize, items: I) -> Self {
        let mut s = Self::empty(capacity);
        for x in items {
            s.insert(x);
        }
        s
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn insert(&mut self, x: usize) {
        assert!(x < self.capacity, "entity {x} outside set capacity {}", self.capacity);
        self.blocks[x / BLOCK] |= 1 << (x % BLOCK);
    }

    pub fn remove(&mut self, x: usize) {
        if x < self.capacity {
            self.blocks[x / BLOCK] &= !(1 << (x % BLOCK));
        }
    }

    pub fn contains(&self, x: usize) -> bool {
        x < self.capacity && self.blocks[x / BLOCK] & (1 << (x % BLOCK)) != 0
    }

    pub fn len(&self) -> usize {
        self.blocks.iter().map(|b| b.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.iter().all(|&b| b == 0)
    }

    pub fn first(&self) -> Option<usize> {
        self.iter().next()
    }

    fn zip_with(&self, other: &Self, f: impl Fn(u64, u64) -> u64) -> Self {
        assert_eq!(self.capacity, other.capacity, "entity sets of different capacity");
        Self {
            blocks: self.blocks.iter().zip(&other.blocks).map(|(&a, &b)| f(a, b)).collect(),
            capacity: self.capacity,
        }
    }

    pub fn union(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a & !b)
    }

    /// Complement within `0..capacity`.
    pub fn complement(&self) -> Self {
        let mut s = Self {
            blocks: self.blocks.iter().map(|b| !b).collect(),
            capacity: self.capacity,
        };
        let rem = self.capacity % BLOCK;
        if rem != 0 {
            if let Some(last) = s.blocks.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
        s
    }

    pub fn union_with(&mut self, other: &Self) {
        assert_eq!(self.capacity, other.capacity, "entity sets of different capacity");
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            *a |= b;
        }
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.blocks.iter().zip(&other.blocks).all(|(&a, &b)| a & !b == 0)
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.blocks.iter().zip(&other.blocks).all(|(&a, &b)| a & b == 0)
    }

    /// Members in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.blocks.iter().enumerate().flat_map(|(bi, &block)| {
            let mut b = block;
            std::iter::from_fn(move || {
                if b == 0 {
                    return None;
                }
                let bit = b.trailing_zeros() as usize;
                b &= b - 1;
                Some(bi * BLOCK + bit)
            })
        })
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl fmt::Debug for EntitySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Lexicographic order of the ascending member sequences.
impl Ord for EntitySet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.iter().cmp(other.iter())
    }
}

impl PartialOrd for EntitySet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
