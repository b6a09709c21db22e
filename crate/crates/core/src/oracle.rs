//! Brute-force reference implementations.
//!
//! Nothing here calls into the event, connectivity, Reeb or grouping code:
//! positions, contact times and components are all recomputed from the raw
//! samples so the results can be used to check those modules.

use thiserror::Error;

use crate::groups::MaximalGroup;
use crate::model::{Dataset, EntitySet, Interval, Point};
use crate::scalar::Scalar;

/// Largest dataset [`brute_maximal_groups`] will enumerate subsets of.
pub const MAX_BRUTE_ENTITIES: usize = 12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("brute force supports at most {max} entities, got {n}")]
    TooManyEntities { n: usize, max: usize },
    #[error("time {time} outside [{start}, {end}]")]
    TimeOutOfRange { time: f64, start: f64, end: f64 },
}

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut y = x;
        while self.parent[y] != r {
            let next = self.parent[y];
            self.parent[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }

    fn blocks(&mut self) -> Vec<EntitySet> {
        let n = self.parent.len();
        let mut by_root: Vec<Vec<usize>> = vec![Vec::new(); n];
        for x in 0..n {
            let r = self.find(x);
            by_root[r].push(x);
        }
        let mut out: Vec<EntitySet> = by_root
            .into_iter()
            .filter(|b| !b.is_empty())
            .map(|b| EntitySet::from_indices(n, b))
            .collect();
        out.sort();
        out
    }
}

fn check_time<T: Scalar>(ds: &Dataset<T>, t: T) -> Result<(), OracleError> {
    if t >= ds.start_time() && t <= ds.end_time() {
        Ok(())
    } else {
        Err(OracleError::TimeOutOfRange { time: t.as_f64(), start: ds.start_time().as_f64(), end: ds.end_time().as_f64() })
    }
}

/// Index of the trajectory edge used to evaluate time `t`.
fn segment_of<T: Scalar>(times: &[T], t: T) -> usize {
    let mut i = 0;
    while i + 2 < times.len() && times[i + 1] <= t {
        i += 1;
    }
    i
}

fn position<T: Scalar>(ds: &Dataset<T>, x: usize, t: T) -> Point<T> {
    let times = ds.times();
    let i = segment_of(times, t);
    let (t0, t1) = (times[i], times[i + 1]);
    let (p, q) = (ds.sample(x, i), ds.sample(x, i + 1));
    let f = (t - t0) / (t1 - t0);
    Point::new(p.x + (q.x - p.x) * f, p.y + (q.y - p.y) * f)
}

fn close<T: Scalar>(p: Point<T>, q: Point<T>, eps: T) -> bool {
    let (dx, dy) = (p.x - q.x, p.y - q.y);
    let r = eps + eps;
    dx * dx + dy * dy <= r * r
}

/// Partition of the entities into ε-components at time `t`, sorted.
pub fn components_at<T: Scalar>(ds: &Dataset<T>, eps: T, t: T) -> Result<Vec<EntitySet>, OracleError> {
    check_time(ds, t)?;
    let n = ds.num_entities();
    let pos: Vec<Point<T>> = (0..n).map(|x| position(ds, x, t)).collect();
    let mut dsu = Dsu::new(n);
    for a in 0..n {
        for b in a + 1..n {
            if close(pos[a], pos[b], eps) {
                dsu.union(a, b);
            }
        }
    }
    Ok(dsu.blocks())
}

/// Every time at which some pair's distance crosses 2ε, plus all sample
/// times, sorted and deduplicated.
fn critical_times<T: Scalar>(ds: &Dataset<T>, eps: T) -> Vec<T> {
    let times = ds.times();
    let n = ds.num_entities();
    let four_eps_sq = (eps + eps) * (eps + eps);
    let mut out: Vec<T> = times.to_vec();
    let edge = T::from_f64_lossy(1e-12);
    for i in 0..times.len() - 1 {
        let span = times[i + 1] - times[i];
        for a in 0..n {
            for b in a + 1..n {
                let (pa, pb) = (ds.sample(a, i), ds.sample(b, i));
                let (qa, qb) = (ds.sample(a, i + 1), ds.sample(b, i + 1));
                let (dx, dy) = (pb.x - pa.x, pb.y - pa.y);
                let (ex, ey) = ((qb.x - qa.x) - dx, (qb.y - qa.y) - dy);
                let qa_ = ex * ex + ey * ey;
                if qa_ == T::zero() {
                    continue;
                }
                let qb_ = (dx * ex + dy * ey) * T::from_f64_lossy(2.0);
                let qc = dx * dx + dy * dy - four_eps_sq;
                let disc = qb_ * qb_ - T::from_f64_lossy(4.0) * qa_ * qc;
                if disc <= T::zero() {
                    continue;
                }
                let sq = disc.sqrt();
                for u in [(-qb_ - sq) / (qa_ + qa_), (-qb_ + sq) / (qa_ + qa_)] {
                    if u > edge && u < T::one() - edge {
                        out.push(times[i] + u * span);
                    }
                }
            }
        }
    }
    out.sort_by(|a, b| a.total_order(*b));
    out.dedup();
    out
}

/// All maximal groups of at least `m` entities lasting at least `delta`, by
/// enumerating every subset of entities over a piecewise-constant component
/// timeline.
pub fn brute_maximal_groups<T: Scalar>(
    ds: &Dataset<T>,
    eps: T,
    m: usize,
    delta: T,
) -> Result<Vec<MaximalGroup<T>>, OracleError> {
    let n = ds.num_entities();
    if n > MAX_BRUTE_ENTITIES {
        return Err(OracleError::TooManyEntities { n, max: MAX_BRUTE_ENTITIES });
    }
    let crit = critical_times(ds, eps);
    let two = T::one() + T::one();
    // component label of each entity on each open segment between critical times
    let labels: Vec<Vec<usize>> = crit
        .windows(2)
        .map(|w| {
            let blocks = components_at(ds, eps, (w[0] + w[1]) / two).expect("midpoint inside window");
            let mut lab = vec![0; n];
            for (k, b) in blocks.iter().enumerate() {
                for x in b.iter() {
                    lab[x] = k;
                }
            }
            lab
        })
        .collect();

    let together = |mask: u32, seg: usize| {
        let lab = &labels[seg];
        let mut common = None;
        (0..n).filter(|x| mask >> x & 1 == 1).all(|x| *common.get_or_insert(lab[x]) == lab[x])
    };

    let mut out = Vec::new();
    for mask in 1u32..(1u32 << n) {
        if (mask.count_ones() as usize) < m.max(1) {
            continue;
        }
        let mut k = 0;
        while k < labels.len() {
            if !together(mask, k) {
                k += 1;
                continue;
            }
            let first = k;
            while k < labels.len() && together(mask, k) {
                k += 1;
            }
            let run = first..k;
            let extendable = (0..n)
                .filter(|y| mask >> y & 1 == 0)
                .any(|y| run.clone().all(|s| together(mask | 1 << y, s)));
            let (start, end) = (crit[first], crit[k]);
            if !extendable && end - start >= delta {
                out.push(MaximalGroup {
                    entities: EntitySet::from_indices(n, (0..n).filter(|x| mask >> x & 1 == 1)),
                    interval: Interval::new(start, end),
                });
            }
        }
    }
    out.sort_by(|a, b| {
        a.interval
            .start
            .total_order(b.interval.start)
            .then(a.interval.end.total_order(b.interval.end))
            .then_with(|| a.entities.cmp(&b.entities))
    });
    Ok(out)
}

/// Partition into α-components at `t`: two entities are linked when they are
/// within 2ε at some moment of `[t − α/2, t + α/2]` clipped to the data.
pub fn alpha_components_at<T: Scalar>(
    ds: &Dataset<T>,
    eps: T,
    alpha: T,
    t: T,
) -> Result<Vec<EntitySet>, OracleError> {
    check_time(ds, t)?;
    let n = ds.num_entities();
    let two = T::one() + T::one();
    let lo = (t - alpha / two).max(ds.start_time());
    let hi = (t + alpha / two).min(ds.end_time());
    let r = eps + eps;
    let times = ds.times();
    let mut dsu = Dsu::new(n);
    for a in 0..n {
        for b in a + 1..n {
            let mut linked = false;
            for i in 0..times.len() - 1 {
                let (s0, s1) = (times[i].max(lo), times[i + 1].min(hi));
                if s0 > s1 {
                    continue;
                }
                let span = times[i + 1] - times[i];
                let d_at = |s: T| {
                    let f = (s - times[i]) / span;
                    let (pa, qa) = (ds.sample(a, i), ds.sample(a, i + 1));
                    let (pb, qb) = (ds.sample(b, i), ds.sample(b, i + 1));
                    (
                        (pb.x + (qb.x - pb.x) * f) - (pa.x + (qa.x - pa.x) * f),
                        (pb.y + (qb.y - pb.y) * f) - (pa.y + (qa.y - pa.y) * f),
                    )
                };
                let (dx, dy) = d_at(s0);
                let (ex, ey) = d_at(s1);
                let (vx, vy) = (ex - dx, ey - dy);
                let vv = vx * vx + vy * vy;
                let s = if vv > T::zero() { (-(dx * vx + dy * vy) / vv).max(T::zero()).min(T::one()) } else { T::zero() };
                let (mx, my) = (dx + vx * s, dy + vy * s);
                if mx * mx + my * my <= r * r {
                    linked = true;
                    break;
                }
            }
            if linked {
                dsu.union(a, b);
            }
        }
    }
    Ok(dsu.blocks())
}
