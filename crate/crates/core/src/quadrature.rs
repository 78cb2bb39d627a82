//! Composite trapezoidal rule on uniform grids. Every integral reported by the
//! crate (cost functional, averted cases, total cost) goes through here.

use crate::fde::TimeGrid;

/// `∫ y dt` over `grid`, with `y` sampled at every node.
///
/// # Panics
/// If `samples.len() != grid.len()`.
pub fn trapezoid(grid: &TimeGrid, samples: &[f64]) -> f64 {
    assert_eq!(samples.len(), grid.len(), "one sample per grid node");
    let n = samples.len() - 1;
    let interior: f64 = samples[1..n].iter().sum();
    grid.h() * (0.5 * (samples[0] + samples[n]) + interior)
}
