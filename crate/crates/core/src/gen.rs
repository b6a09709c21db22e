//! Deterministic synthetic datasets.
//!
//! [`gen_flock`] is a boids model in the spirit of the NetLogo flocking
//! model: birds turn to keep a minimum separation, align with and move
//! toward nearby birds, and steer away from the border. The other two
//! generators build worst-case inputs for the size of the Reeb graph and
//! for the number of maximal groups.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::{Dataset, Point};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenError {
    #[error("invalid generator parameter: {0}")]
    InvalidParameter(String),
}

fn invalid(msg: impl Into<String>) -> GenError {
    GenError::InvalidParameter(msg.into())
}

fn dataset<T: Scalar>(times: Vec<f64>, paths: Vec<Vec<(f64, f64)>>) -> Dataset<T> {
    let times = times.into_iter().map(T::from_f64_lossy).collect();
    let positions = paths
        .into_iter()
        .map(|p| p.into_iter().map(|(x, y)| Point::new(T::from_f64_lossy(x), T::from_f64_lossy(y))).collect())
        .collect();
    Dataset::with_index_ids(times, positions).expect("generated dataset is valid")
}

/// Parameters of the flocking model. Angles are in degrees, distances in
/// world units; birds move `speed` units per time step.
#[derive(Debug, Clone, PartialEq)]
pub struct FlockConfig {
    pub n: usize,
    pub tau: usize,
    pub seed: u64,
    /// Side of the square world `[0, world_size]²`.
    pub world_size: f64,
    /// Radius within which other birds are flockmates.
    pub vision: f64,
    /// Birds closer than this turn away from their nearest neighbor.
    pub min_separation: f64,
    /// Largest turn toward the flockmates' mean heading.
    pub alignment: f64,
    /// Largest turn toward the flockmates' centroid.
    pub cohesion: f64,
    /// Largest turn away from the nearest neighbor.
    pub separation: f64,
    /// Largest turn away from a nearby border.
    pub max_turn: f64,
    /// Uniform random heading change in `[-jitter, jitter]` per step.
    pub jitter: f64,
    pub speed: f64,
    /// Start every bird at this `(x, y, heading)` instead of at random.
    pub common_start: Option<(f64, f64, f64)>,
}

impl FlockConfig {
    pub fn new(n: usize, tau: usize, seed: u64) -> Self {
        Self {
            n,
            tau,
            seed,
            world_size: 150.0,
            vision: 5.0,
            min_separation: 1.0,
            alignment: 5.0,
            cohesion: 3.0,
            separation: 1.5,
            max_turn: 10.0,
            jitter: 2.0,
            speed: 1.0,
            common_start: None,
        }
    }

    fn validate(&self) -> Result<(), GenError> {
        if self.n == 0 {
            return Err(invalid("n must be at least 1"));
        }
        if self.tau == 0 {
            return Err(invalid("tau must be at least 1"));
        }
        let finite = [
            self.world_size,
            self.vision,
            self.min_separation,
            self.alignment,
            self.cohesion,
            self.separation,
            self.max_turn,
            self.jitter,
            self.speed,
        ];
        if finite.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(invalid("flock parameters must be finite and non-negative"));
        }
        if self.world_size <= 0.0 {
            return Err(invalid("world_size must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
struct Bird {
    x: f64,
    y: f64,
    heading: f64,
}

/// Signed smallest rotation from heading `from` to heading `to`, in degrees.
fn subtract_headings(to: f64, from: f64) -> f64 {
    let d = (to - from).rem_euclid(360.0);
    if d > 180.0 {
        d - 360.0
    } else {
        d
    }
}

fn turn_toward(heading: f64, target: f64, max: f64) -> f64 {
    heading + subtract_headings(target, heading).clamp(-max, max)
}

fn heading_of(dx: f64, dy: f64) -> f64 {
    dy.atan2(dx).to_degrees()
}

impl Bird {
    fn step(&self, all: &[Bird], me: usize, cfg: &FlockConfig, jitter: f64) -> Bird {
        let mut heading = self.heading;
        let mut nearest: Option<(f64, usize)> = None;
        let (mut sx, mut sy, mut hx, mut hy, mut count) = (0.0, 0.0, 0.0, 0.0, 0usize);
        for (j, other) in all.iter().enumerate() {
            if j == me {
                continue;
            }
            let (dx, dy) = (other.x - self.x, other.y - self.y);
            let d2 = dx * dx + dy * dy;
            if d2 > cfg.vision * cfg.vision {
                continue;
            }
            if nearest.is_none_or(|(best, _)| d2 < best) {
                nearest = Some((d2, j));
            }
            sx += dx;
            sy += dy;
            let h = other.heading.to_radians();
            hx += h.cos();
            hy += h.sin();
            count += 1;
        }
        if let Some((d2, j)) = nearest {
            if d2.sqrt() < cfg.min_separation {
                heading += subtract_headings(heading, all[j].heading).clamp(-cfg.separation, cfg.separation);
            } else {
                if hx != 0.0 || hy != 0.0 {
                    heading = turn_toward(heading, heading_of(hx, hy), cfg.alignment);
                }
                if count > 0 && (sx != 0.0 || sy != 0.0) {
                    heading = turn_toward(heading, heading_of(sx, sy), cfg.cohesion);
                }
            }
        }
        // steer back toward the middle when close to a wall
        let margin = cfg.vision.max(cfg.speed * 4.0).min(cfg.world_size / 4.0);
        let w = cfg.world_size;
        if self.x < margin || self.y < margin || self.x > w - margin || self.y > w - margin {
            heading = turn_toward(heading, heading_of(w / 2.0 - self.x, w / 2.0 - self.y), cfg.max_turn);
        }
        heading += jitter;
        let h = heading.to_radians();
        let x = (self.x + cfg.speed * h.cos()).clamp(0.0, w);
        let y = (self.y + cfg.speed * h.sin()).clamp(0.0, w);
        Bird { x, y, heading: heading.rem_euclid(360.0) }
    }
}

/// Simulates `cfg.tau` steps of the flocking model. The same configuration
/// always yields the same dataset.
pub fn gen_flock<T: Scalar>(cfg: &FlockConfig) -> Result<Dataset<T>, GenError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let w = cfg.world_size;
    let mut birds: Vec<Bird> = (0..cfg.n)
        .map(|_| match cfg.common_start {
            Some((x, y, heading)) => Bird { x, y, heading },
            None => Bird { x: rng.gen_range(0.0..=w), y: rng.gen_range(0.0..=w), heading: rng.gen_range(0.0..360.0) },
        })
        .collect();
    let mut paths: Vec<Vec<(f64, f64)>> = birds.iter().map(|b| vec![(b.x, b.y)]).collect();
    for _ in 0..cfg.tau {
        let jitters: Vec<f64> = (0..cfg.n)
            .map(|_| if cfg.jitter > 0.0 { rng.gen_range(-cfg.jitter..=cfg.jitter) } else { 0.0 })
            .collect();
        birds = (0..cfg.n).map(|i| birds[i].step(&birds, i, cfg, jitters[i])).collect();
        for (path, b) in paths.iter_mut().zip(&birds) {
            path.push((b.x, b.y));
        }
    }
    let times = (0..=cfg.tau).map(|t| t as f64).collect();
    Ok(dataset(times, paths))
}

/// Radius to use with [`gen_reeb_quadratic`].
pub const REEB_QUADRATIC_EPS: f64 = 0.1;

/// Half the entities move right along rows `y = -j`, the other half move
/// down along columns `x = ℓ`; entity `j` of the first half and `ℓ` of the
/// second meet at one point, so every pair merges and splits once per
/// trajectory edge. Odd edges retrace the motion back to the start, which
/// repeats all meetings in reverse order.
pub fn gen_reeb_quadratic<T: Scalar>(n: usize, tau: usize) -> Result<Dataset<T>, GenError> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(invalid("n must be even and at least 2"));
    }
    if tau < 1 {
        return Err(invalid("tau must be at least 1"));
    }
    let half = n / 2;
    let span = (n + 1) as f64;
    let times: Vec<f64> = (0..=tau).map(|k| k as f64 * span).collect();
    let mut paths = Vec::with_capacity(n);
    for j in 1..=half {
        let j = j as f64;
        let (a, b) = ((-j, -j), (-j + span, -j));
        paths.push((0..=tau).map(|k| if k % 2 == 0 { a } else { b }).collect());
    }
    for l in 1..=half {
        let l = l as f64;
        let (a, b) = ((l, l), (l, l - span));
        paths.push((0..=tau).map(|k| if k % 2 == 0 { a } else { b }).collect());
    }
    Ok(dataset(times, paths))
}

/// Radius to use with [`gen_groups_cubic`].
pub const GROUPS_CUBIC_EPS: f64 = 1.0;

/// Layout constants of [`gen_groups_cubic`] for `k = n/4` movers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicLayout {
    /// Spacing of the stationary chain (less than 2ε, so it stays connected).
    pub chain_spacing: f64,
    /// Spacing of the movers (more than 2ε, so they never touch each other).
    pub mover_spacing: f64,
    /// Height of the movers' line.
    pub height: f64,
    /// A mover touches a stationary entity while their x-offset is at most this.
    pub reach: f64,
    /// Distance each mover travels per trajectory edge.
    pub sweep: f64,
}

impl CubicLayout {
    pub fn new(k: usize) -> Self {
        let inc = 0.8 / k as f64;
        let chain_spacing = 2.0 - inc / 2.0;
        let mover_spacing = 2.0 + inc / 2.0;
        let reach = 3.0 * chain_spacing / 8.0;
        let height = (4.0 - reach * reach).sqrt();
        let chain_len = (3 * k - 1) as f64 * chain_spacing;
        let sweep = chain_len + 2.0 * chain_spacing + (k - 1) as f64 * mover_spacing;
        Self { chain_spacing, mover_spacing, height, reach, sweep }
    }

    /// Time between two windows in which a mover touches consecutive
    /// stationary entities (movers travel at unit speed).
    pub fn gap(&self) -> f64 {
        self.chain_spacing - 2.0 * self.reach
    }
}

/// A connected chain of `3n/4` stationary entities on `y = 0` and `n/4`
/// movers on a parallel line that touch one chain entity at a time. The
/// movers' spacing differs slightly from the chain's, so the set of movers
/// attached to the chain keeps changing and the chain together with the
/// attached movers forms Θ(n³) maximal groups per sweep. Even trajectory
/// edges sweep right across the chain, odd ones sweep back.
pub fn gen_groups_cubic<T: Scalar>(n: usize, tau: usize) -> Result<Dataset<T>, GenError> {
    if n < 4 || !n.is_multiple_of(4) {
        return Err(invalid("n must be a positive multiple of 4"));
    }
    if tau < 1 {
        return Err(invalid("tau must be at least 1"));
    }
    let k = n / 4;
    let lay = CubicLayout::new(k);
    let times: Vec<f64> = (0..=tau).map(|t| t as f64 * lay.sweep).collect();
    let mut paths: Vec<Vec<(f64, f64)>> = Vec::with_capacity(n);
    for s in 0..3 * k {
        paths.push(vec![(s as f64 * lay.chain_spacing, 0.0); tau + 1]);
    }
    for i in 0..k {
        let start = -lay.chain_spacing - i as f64 * lay.mover_spacing;
        let (a, b) = ((start, lay.height), (start + lay.sweep, lay.height));
        paths.push((0..=tau).map(|t| if t % 2 == 0 { a } else { b }).collect());
    }
    Ok(dataset(times, paths))
}
