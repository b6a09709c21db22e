//! Times at which pairs of entities become directly (dis)connected.
//!
//! Two entities are directly connected while their distance is at most 2ε
//! (closed discs). Along one trajectory edge both entities move linearly, so
//! the squared distance is a quadratic in time and each edge contributes at
//! most one contact interval per pair.

use std::cmp::Ordering;

use crate::model::{Dataset, Point};
use crate::scalar::{two, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EventKind {
    // declared first so that disconnects sort before connects at equal keys
    Disconnect,
    Connect,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairEvent<T> {
    pub time: T,
    pub a: usize,
    pub b: usize,
    pub kind: EventKind,
}

impl<T: Scalar> PairEvent<T> {
    /// Sweep order: time, then pair, then disconnect before connect.
    pub fn sweep_cmp(&self, other: &Self) -> Ordering {
        self.time
            .total_order(other.time)
            .then(self.a.cmp(&other.a))
            .then(self.b.cmp(&other.b))
            .then(self.kind.cmp(&other.kind))
    }
}

pub(crate) fn threshold_sq<T: Scalar>(eps: T) -> T {
    let d = two::<T>() * eps;
    d * d
}

/// Closed direct-connection test on two positions.
pub fn directly_connected<T: Scalar>(p: Point<T>, q: Point<T>, eps: T) -> bool {
    p.dist_sq(q) <= threshold_sq(eps)
}

/// Sub-interval `[lo, hi] ⊆ [0, 1]` of the normalized edge parameter on which
/// `|d0 + u·dd|² ≤ thr`. `None` if the distance never reaches the threshold.
fn contact_window<T: Scalar>(d0: Point<T>, dd: Point<T>, thr: T) -> Option<(T, T)> {
    let a = dd.x * dd.x + dd.y * dd.y;
    let b = d0.x * dd.x + d0.y * dd.y;
    let c = d0.x * d0.x + d0.y * d0.y - thr;
    let (zero, one) = (T::zero(), T::one());
    if a == zero {
        return (c <= zero).then_some((zero, one));
    }
    let disc = b * b - a * c;
    if disc < zero {
        return None;
    }
    let sq = disc.sqrt();
    // stable root pair: q = -(b + sign(b)·sqrt(disc))
    let q = if b >= zero { -(b + sq) } else { -(b - sq) };
    let (r1, r2) = if q == zero { (zero, zero) } else { (q / a, c / q) };
    let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
    let lo = lo.max(zero);
    let hi = hi.min(one);
    (lo <= hi).then_some((lo, hi))
}

/// Connect/disconnect events of one pair, in time order.
///
/// The pair's state at `t_0` is given by [`directly_connected`]; every event
/// flips it. Grazing contacts (the distance only touches 2ε) produce no events
/// and a crossing exactly at a shared timestamp is reported once.
pub fn pair_events<T: Scalar>(ds: &Dataset<T>, a: usize, b: usize, eps: T) -> Vec<PairEvent<T>> {
    assert_ne!(a, b, "pair events need two distinct entities");
    let (a, b) = if a < b { (a, b) } else { (b, a) };
    let mut out = Vec::new();
    pair_events_into(ds, a, b, threshold_sq(eps), &mut out);
    out
}

fn pair_events_into<T: Scalar>(
    ds: &Dataset<T>,
    a: usize,
    b: usize,
    thr: T,
    out: &mut Vec<PairEvent<T>>,
) {
    let eta = T::tolerance();
    let times = ds.times();
    let (ta, tb) = (ds.trajectory(a), ds.trajectory(b));
    let mut connected = ta[0].dist_sq(tb[0]) <= thr;
    let mut emit = |time: T, kind: EventKind| out.push(PairEvent { time, a, b, kind });

    for i in 0..ds.num_edges() {
        let (t0, t1) = (times[i], times[i + 1]);
        let h = t1 - t0;
        let d0 = Point::new(ta[i].x - tb[i].x, ta[i].y - tb[i].y);
        let d1 = Point::new(ta[i + 1].x - tb[i + 1].x, ta[i + 1].y - tb[i + 1].y);
        let dd = Point::new(d1.x - d0.x, d1.y - d0.y);

        let Some((lo, hi)) = contact_window(d0, dd, thr) else {
            if connected {
                // rounding left the previous edge connected at its end
                emit(t0, EventKind::Disconnect);
                connected = false;
            }
            continue;
        };
        let (lo_t, hi_t) = (lo * h, hi * h);
        let touches_start = lo_t <= eta;
        if connected && !touches_start {
            emit(t0, EventKind::Disconnect);
            connected = false;
        }
        if !connected {
            if hi_t - lo_t <= eta {
                // grazing contact: the sign of the distance never changes
                continue;
            }
            let at = if touches_start { t0 } else { (t0 + lo_t).min(t1) };
            emit(at, EventKind::Connect);
            connected = true;
        }
        if hi_t < h - eta {
            emit((t0 + hi_t).min(t1), EventKind::Disconnect);
            connected = false;
        }
    }
}

/// Events of all pairs in sweep order.
pub fn all_events<T: Scalar>(ds: &Dataset<T>, eps: T) -> Vec<PairEvent<T>> {
    let n = ds.num_entities();
    let thr = threshold_sq(eps);
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            pair_events_into(ds, a, b, thr, &mut out);
        }
    }
    out.sort_by(|x, y| x.sweep_cmp(y));
    out
}

/// Pairs `(a, b)`, `a < b`, directly connected at `t_0`.
pub fn initial_adjacency<T: Scalar>(ds: &Dataset<T>, eps: T) -> Vec<(usize, usize)> {
    let n = ds.num_entities();
    let thr = threshold_sq(eps);
    let mut pairs = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if ds.sample(a, 0).dist_sq(ds.sample(b, 0)) <= thr {
                pairs.push((a, b));
            }
        }
    }
    pairs
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ds(times: &[f64], trajs: &[&[(f64, f64)]]) -> Dataset<f64> {
        Dataset::with_index_ids(
            times.to_vec(),
            trajs.iter().map(|t| t.iter().map(|&(x, y)| Point::new(x, y)).collect()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn passing_entity_connects_and_disconnects() {
        let d = ds(&[0.0, 1.0], &[&[(0.0, 0.0), (0.0, 0.0)], &[(-4.0, 0.0), (4.0, 0.0)]]);
        let ev = pair_events(&d, 0, 1, 1.0);
        assert_eq!(ev.len(), 2);
        assert_eq!(ev[0].kind, EventKind::Connect);
        assert!((ev[0].time - 0.25).abs() < 1e-12);
        assert_eq!(ev[1].kind, EventKind::Disconnect);
        assert!((ev[1].time - 0.75).abs() < 1e-12);
    }

    #[test]
    fn identical_trajectories_have_no_events() {
        let d = ds(&[0.0, 1.0, 2.0], &[&[(1.0, 1.0); 3], &[(1.0, 1.0); 3]]);
        assert!(pair_events(&d, 0, 1, 1.0).is_empty());
        assert_eq!(initial_adjacency(&d, 1.0), vec![(0, 1)]);
    }

    #[test]
    fn tangent_pass_is_dropped() {
        let d = ds(&[0.0, 1.0], &[&[(0.0, 0.0), (0.0, 0.0)], &[(-4.0, 2.0), (4.0, 2.0)]]);
        assert!(pair_events(&d, 0, 1, 1.0).is_empty());
    }

    #[test]
    fn crossing_at_shared_timestamp_reported_once() {
        // distance reaches exactly 2 at t = 1 and keeps shrinking
        let d = ds(
            &[0.0, 1.0, 2.0],
            &[&[(0.0, 0.0); 3], &[(3.0, 0.0), (2.0, 0.0), (1.0, 0.0)]],
        );
        let ev = pair_events(&d, 0, 1, 1.0);
        assert_eq!(ev.len(), 1);
        assert_eq!(ev[0].kind, EventKind::Connect);
        assert!((ev[0].time - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sliding_contact_stays_connected() {
        let d = ds(&[0.0, 1.0], &[&[(0.0, 0.0), (1.0, 0.0)], &[(0.0, 2.0), (1.0, 2.0)]]);
        assert!(pair_events(&d, 0, 1, 1.0).is_empty());
        assert_eq!(initial_adjacency(&d, 1.0), vec![(0, 1)]);
    }

    #[test]
    fn boundary_distance_is_connected() {
        let d = ds(&[0.0, 1.0], &[&[(0.0, 0.0); 2], &[(2.0, 0.0); 2], &[(6.001, 0.0); 2]]);
        assert_eq!(initial_adjacency(&d, 1.0), vec![(0, 1)]);
        let d = ds(&[0.0, 1.0], &[&[(0.0, 0.0); 2], &[(2.001, 0.0); 2]]);
        assert!(initial_adjacency(&d, 1.0).is_empty());
    }

    #[test]
    fn chain_layout_is_adjacent_pairwise() {
        let trajs: Vec<Vec<(f64, f64)>> = (0..6).map(|i| vec![(1.5 * i as f64, 0.0); 2]).collect();
        let refs: Vec<&[(f64, f64)]> = trajs.iter().map(|t| t.as_slice()).collect();
        let d = ds(&[0.0, 1.0], &refs);
        assert_eq!(initial_adjacency(&d, 1.0).len(), 5);
    }

    #[test]
    fn no_pairs_no_events() {
        let d = ds(&[0.0, 1.0], &[&[(0.0, 0.0), (5.0, 5.0)]]);
        assert!(all_events(&d, 3.0).is_empty());
    }

    #[test]
    fn three_entities_two_connects() {
        // 0 static at origin, 1 approaches 0 from above, 2 approaches 1 later
        let d = ds(
            &[0.0, 1.0, 2.0],
            &[
                &[(0.0, 0.0), (0.0, 0.0), (0.0, 0.0)],
                &[(0.0, 4.0), (0.0, 1.0), (0.0, 1.0)],
                &[(0.0, 10.0), (0.0, 10.0), (0.0, 2.0)],
            ],
        );
        let ev = all_events(&d, 0.75);
        assert_eq!(ev.len(), 2);
        // |4 - 3t| = 1.5  =>  t = 5/6 ; |9 - 8(t-1)| = 1.5 => t = 1 + 7.5/8
        assert_eq!((ev[0].a, ev[0].b, ev[0].kind), (0, 1, EventKind::Connect));
        assert!((ev[0].time - 5.0 / 6.0).abs() < 1e-12);
        assert_eq!((ev[1].a, ev[1].b, ev[1].kind), (1, 2, EventKind::Connect));
        assert!((ev[1].time - (1.0 + 7.5 / 8.0)).abs() < 1e-12);
    }

    #[test]
    fn sweep_order_puts_disconnects_first() {
        let mk = |kind| PairEvent { time: 1.0, a: 0, b: 1, kind };
        let mut v = [mk(EventKind::Connect), mk(EventKind::Disconnect)];
        v.sort_by(|x, y| x.sweep_cmp(y));
        assert_eq!(v[0].kind, EventKind::Disconnect);
    }

    fn random_walks() -> impl Strategy<Value = (Dataset<f64>, f64)> {
        (2usize..6, 1usize..6).prop_flat_map(|(n, tau)| {
            (
                proptest::collection::vec(proptest::collection::vec((-5.0..5.0f64, -5.0..5.0f64), tau + 1), n),
                0.2..2.0f64,
            )
                .prop_map(move |(pts, eps)| {
                    let times = (0..=tau).map(|i| i as f64).collect();
                    let pos = pts
                        .into_iter()
                        .map(|t| t.into_iter().map(|(x, y)| Point::new(x, y)).collect())
                        .collect();
                    (Dataset::with_index_ids(times, pos).unwrap(), eps)
                })
        })
    }

    proptest! {
        #[test]
        fn replayed_state_matches_distance(
            (d, eps) in random_walks(),
            samples in proptest::collection::vec(0.0..1.0f64, 50),
        ) {
            let n = d.num_entities();
            let span = d.end_time() - d.start_time();
            let events = all_events(&d, eps);
            prop_assert!(events.len() <= d.num_edges() * n * (n - 1));
            for a in 0..n {
                for b in a + 1..n {
                    let evs = pair_events(&d, a, b, eps);
                    let mut state = directly_connected(d.sample(a, 0), d.sample(b, 0), eps);
                    for e in &evs {
                        prop_assert_eq!(e.kind == EventKind::Connect, !state, "events must alternate");
                        state = !state;
                    }
                    let last = d.num_edges();
                    prop_assert_eq!(state, directly_connected(d.sample(a, last), d.sample(b, last), eps));
                    for &u in &samples {
                        let t = d.start_time() + u * span;
                        if evs.iter().any(|e| (e.time - t).abs() < 1e-6) {
                            continue;
                        }
                        let replay = evs.iter().filter(|e| e.time <= t).fold(
                            directly_connected(d.sample(a, 0), d.sample(b, 0), eps),
                            |_, e| e.kind == EventKind::Connect,
                        );
                        let direct = directly_connected(d.position_at(a, t).unwrap(), d.position_at(b, t).unwrap(), eps);
                        prop_assert_eq!(replay, direct);
                    }
                }
            }
        }
    }
}
