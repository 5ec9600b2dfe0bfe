//! Exhaustive search for the energy-transfer fraction that maximizes throughput.
//!
//! Longer harvesting raises the SNR but shortens the uplink, so throughput in
//! `τ` rises and then falls. Unimodality is not assumed: every grid point is
//! evaluated and the best one wins, with ties going to the smaller `τ`.

use crate::analytic::throughput_cf;
use crate::error::{Error, Result};
use crate::exec::Backend;
use crate::protocol::{ProtocolKind, SystemParams};

pub const DEFAULT_RESOLUTION: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauResult {
    pub kind: ProtocolKind,
    pub tau_star: f64,
    pub psi_star: f64,
    pub grid_resolution: f64,
}

/// Grid `{r, 2r, …}` up to `1 - r`.
pub fn tau_grid(resolution: f64) -> Result<Vec<f64>> {
    if !(1e-4..=1e-2).contains(&resolution) {
        return Err(Error::domain(format!(
            "tau resolution must lie in [1e-4, 1e-2], got {resolution}"
        )));
    }
    let steps = (1.0 / resolution + 1e-9).floor() as usize;
    Ok((1..steps)
        .map(|k| k as f64 * resolution)
        .filter(|&t| t <= 1.0 - resolution + 1e-12)
        .collect())
}

/// Throughput of `kind` at each `τ` in `taus`; the `τ` stored in `params` is ignored.
pub fn throughput_curve(
    backend: Backend,
    kind: ProtocolKind,
    params: &SystemParams,
    taus: &[f64],
) -> Result<Vec<f64>> {
    backend
        .map_collect(taus, |&tau| throughput_cf(kind, &params.with_tau(tau)?))
        .into_iter()
        .collect()
}

pub fn optimal_tau_with(
    backend: Backend,
    kind: ProtocolKind,
    params: &SystemParams,
    resolution: f64,
) -> Result<TauResult> {
    let grid = tau_grid(resolution)?;
    let curve = throughput_curve(backend, kind, params, &grid)?;
    let (best, psi_star) = curve
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, v)| if v > bv { (i, v) } else { (bi, bv) });
    Ok(TauResult {
        kind,
        tau_star: grid[best],
        psi_star,
        grid_resolution: resolution,
    })
}

/// [`optimal_tau_with`] on the default backend.
pub fn optimal_tau(kind: ProtocolKind, params: &SystemParams, resolution: f64) -> Result<TauResult> {
    optimal_tau_with(Backend::default(), kind, params, resolution)
}
