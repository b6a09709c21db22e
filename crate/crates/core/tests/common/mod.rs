#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use trajgroup::model::{Dataset, EntitySet, Point};
use trajgroup::reeb::ReebGraph;

/// Random-walk instance with `2 ≤ n ≤ max_n` entities and `1 ≤ τ ≤ max_tau`
/// trajectory edges, plus a random ε.
pub fn random_instance(seed: u64, max_n: usize, max_tau: usize) -> (Dataset<f64>, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..=max_n);
    let tau = rng.gen_range(1..=max_tau);
    let mut times = vec![0.0];
    for _ in 0..tau {
        let last = *times.last().unwrap();
        times.push(last + rng.gen_range(0.5..1.5));
    }
    let positions = (0..n)
        .map(|_| {
            let mut p = Point::new(rng.gen_range(0.0..4.0), rng.gen_range(0.0..4.0));
            let mut path = vec![p];
            for _ in 0..tau {
                p = Point::new(p.x + rng.gen_range(-1.5..1.5), p.y + rng.gen_range(-1.5..1.5));
                path.push(p);
            }
            path
        })
        .collect();
    let eps = rng.gen_range(0.2..1.0);
    (Dataset::with_index_ids(times, positions).unwrap(), eps)
}

/// Partition of the entities induced by the edges whose open time span
/// contains `t`.
pub fn edge_partition(reeb: &ReebGraph<f64>, t: f64) -> Vec<EntitySet> {
    let mut parts = reeb.partition_at(t);
    parts.sort();
    parts
}

pub fn same_times(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9
}
