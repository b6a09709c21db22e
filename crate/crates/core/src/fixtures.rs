//! Small hand-built datasets with known grouping structure.

use crate::model::{Dataset, Point};
use crate::scalar::Scalar;

fn build<T: Scalar>(ids: &[&str], times: &[f64], paths: Vec<Vec<(f64, f64)>>) -> Dataset<T> {
    let times = times.iter().map(|&t| T::from_f64_lossy(t)).collect();
    let positions = paths
        .into_iter()
        .map(|p| p.into_iter().map(|(x, y)| Point::new(T::from_f64_lossy(x), T::from_f64_lossy(y))).collect())
        .collect();
    Dataset::new(ids.iter().map(|s| s.to_string()).collect(), times, positions).expect("fixture is valid")
}

fn on_line(xs: &[f64], y: f64) -> Vec<(f64, f64)> {
    xs.iter().map(|&x| (x, y)).collect()
}

/// Radius used with [`figure2`].
pub const FIGURE2_EPS: f64 = 0.5;

/// Six entities: the pair {x1,x2} comes down to {x3,x4} for a while and
/// leaves again; {x5,x6} make a short visit to {x3,x4} later on. With m = 2
/// there are four maximal groups once δ exceeds the length of that visit.
pub fn figure2<T: Scalar>() -> Dataset<T> {
    let times = [0.0, 1.0, 2.0, 3.0, 4.0, 5.0];
    let y12 = [3.5, 2.5, 2.5, 3.5, 3.5, 3.5];
    let x5 = [3.0, 3.0, 3.0, 1.2, 1.2, 3.0];
    let x6: Vec<f64> = x5.iter().map(|x| x + 0.5).collect();
    build(
        &["x1", "x2", "x3", "x4", "x5", "x6"],
        &times,
        vec![
            y12.iter().map(|&y| (0.0, y)).collect(),
            y12.iter().map(|&y| (0.5, y)).collect(),
            on_line(&[0.0; 6], 2.0),
            on_line(&[0.5; 6], 2.0),
            on_line(&x5, 2.0),
            on_line(&x6, 2.0),
        ],
    )
}

/// Radius used with [`figure5`].
pub const FIGURE5_EPS: f64 = 0.5;

/// Eight entities on a line: {1,3}, {5,7}, {2,4} and {6,8} form pairs, the
/// pairs on each side join into two quadruples, those merge into one flock,
/// and finally the flock splits into {1,3,5,7} and {2,4,6,8}.
pub fn figure5<T: Scalar>() -> Dataset<T> {
    let times = [0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
    let left = |a: f64, b: f64, c: f64| [a, b, c, c + 4.0, c + 4.0, c, c];
    let right = |a: f64, b: f64, c: f64| [a, b, c, c - 4.0, c - 4.0, c, c];
    build(
        &["1", "2", "3", "4", "5", "6", "7", "8"],
        &times,
        vec![
            on_line(&left(0.0, 1.0, 3.0), 0.0),
            on_line(&right(12.0, 13.0, 14.0), 0.0),
            on_line(&left(3.0, 1.6, 3.6), 0.0),
            on_line(&right(15.0, 13.8, 14.8), 0.0),
            on_line(&left(6.0, 7.0, 4.5), 0.0),
            on_line(&right(18.0, 19.0, 15.6), 0.0),
            on_line(&left(9.0, 7.7, 5.2), 0.0),
            on_line(&right(21.0, 19.9, 16.5), 0.0),
        ],
    )
}

/// Radius used with [`single_detour`] and [`short_visit`].
pub const DETOUR_EPS: f64 = 0.5;

/// Four entities together on a line; the last one wanders off between
/// t ≈ 1.2 and t ≈ 2.8 and comes back.
pub fn single_detour<T: Scalar>() -> Dataset<T> {
    let times = [0.0, 1.0, 2.0, 3.0, 4.0, 5.0];
    build(
        &["a", "b", "c", "d"],
        &times,
        vec![
            on_line(&[0.0; 6], 0.0),
            on_line(&[0.5; 6], 0.0),
            on_line(&[1.0; 6], 0.0),
            on_line(&[1.5, 1.5, 4.0, 1.5, 1.5, 1.5], 0.0),
        ],
    )
}

/// Two clusters {x1,x2,x3} and {x4,x5,x6}; x3 briefly visits the other
/// cluster around t = 2 and returns.
pub fn short_visit<T: Scalar>() -> Dataset<T> {
    let times = [0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
    build(
        &["x1", "x2", "x3", "x4", "x5", "x6"],
        &times,
        vec![
            on_line(&[0.0; 7], 0.0),
            on_line(&[0.8; 7], 0.0),
            on_line(&[1.6, 1.6, 3.2, 1.6, 1.6, 1.6, 1.6], 0.0),
            on_line(&[4.0; 7], 0.0),
            on_line(&[4.8; 7], 0.0),
            on_line(&[5.6; 7], 0.0),
        ],
    )
}
