//! Closed-form outage probability and average throughput.
//!
//! HTT is exact. HTC and AT replace the amplify-and-forward SNR with
//! `μ₂ min(h_AS h_SR, h_AR h_RA)`; given that substitution the expressions are
//! exact, and they track the true protocol closely at medium and high AP power.
//!
//! With `t₁ = υ₁/μ₁` and `t₂ = υ₂/μ₂`:
//!
//! ```text
//! P_HTT = 1 - S_{AS,SA}(β_AS β_SA t₁)
//! P_HTC = 1 - S_{AS,SA}(β_AS β_SA t₂) - S_{AR,RA}(β_AR β_RA t₂) [S_{SR,AS}(β_SR β_AS t₂) - Φ(β_SA t₂, β_SR t₂)]
//! P_AT  = 1 - S_{AS,SA}(β_AS β_SA t₁) - S_{AR,RA}(β_AR β_RA t₂) [S_{SR,AS}(β_SR β_AS t₂) - Φ(β_SA t₁, β_SR t₂)]
//! ```

use crate::error::{Error, Result};
use crate::protocol::{Links, SystemParams};
use crate::specfun::{phi_func, s_func};

pub use crate::protocol::ProtocolKind;

/// Slack allowed outside [0, 1] before a closed form is reported as broken.
pub const RANGE_SLACK: f64 = 1e-9;

pub fn outage_htt_cf(params: &SystemParams) -> Result<f64> {
    let t1 = params.direct_threshold();
    if t1 == 0.0 {
        return Ok(0.0);
    }
    let l = params.links();
    let p = 1.0 - s_func(l.as_.m(), l.sa.m(), l.as_.beta() * l.sa.beta() * t1)?;
    guard(p, "HTT")
}

pub fn outage_htc_cf(params: &SystemParams) -> Result<f64> {
    let t2 = params.cooperative_threshold();
    if t2 == 0.0 {
        return Ok(0.0);
    }
    let p = cooperative_outage(params.links(), t2, t2)?;
    guard(p, "HTC")
}

pub fn outage_at_cf(params: &SystemParams) -> Result<f64> {
    let t1 = params.direct_threshold();
    let t2 = params.cooperative_threshold();
    if t1 == 0.0 {
        return Ok(0.0);
    }
    let p = cooperative_outage(params.links(), t1, t2)?;
    guard(p, "AT")
}

/// `Pr(h_AS h_SA < t_direct, min(h_AS h_SR, h_AR h_RA) < t_relay)`.
fn cooperative_outage(l: &Links, t_direct: f64, t_relay: f64) -> Result<f64> {
    let direct_ok = s_func(l.as_.m(), l.sa.m(), l.as_.beta() * l.sa.beta() * t_direct)?;
    let second_hop_ok = s_func(l.ar.m(), l.ra.m(), l.ar.beta() * l.ra.beta() * t_relay)?;
    let first_hop_ok = s_func(l.sr.m(), l.as_.m(), l.sr.beta() * l.as_.beta() * t_relay)?;
    let both_ok = phi_func(
        l.as_.m(),
        l.sa.m(),
        l.sr.m(),
        l.as_.beta(),
        l.sa.beta() * t_direct,
        l.sr.beta() * t_relay,
    )?;
    Ok(1.0 - direct_ok - second_hop_ok * (first_hop_ok - both_ok))
}

fn guard(p: f64, what: &str) -> Result<f64> {
    if !(-RANGE_SLACK..=1.0 + RANGE_SLACK).contains(&p) {
        return Err(Error::Numerical(format!(
            "{what} closed-form outage {p} is outside [0, 1]"
        )));
    }
    Ok(p.clamp(0.0, 1.0))
}

pub fn outage_cf(kind: ProtocolKind, params: &SystemParams) -> Result<f64> {
    match kind {
        ProtocolKind::Htt => outage_htt_cf(params),
        ProtocolKind::Htc => outage_htc_cf(params),
        ProtocolKind::At => outage_at_cf(params),
    }
}

/// Delay-limited throughput `R (1 - P_out)(1 - τ)`.
pub fn throughput_from_outage(params: &SystemParams, outage: f64) -> f64 {
    params.rate() * (1.0 - outage) * (1.0 - params.tau())
}

pub fn throughput_cf(kind: ProtocolKind, params: &SystemParams) -> Result<f64> {
    Ok(throughput_from_outage(params, outage_cf(kind, params)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::Topology;
    use crate::protocol::Severities;
    use crate::specfun::bessel_k_int;

    fn params(m: u32, dbm: f64, rate: f64) -> SystemParams {
        let topo = Topology::new(10.0, 5.0, 2.0).unwrap();
        SystemParams::from_dbm(dbm, -80.0, 0.5, 0.5, rate, topo, Severities::uniform(m)).unwrap()
    }

    #[test]
    fn vanishing_rate_means_no_outage() {
        let p = params(2, 30.0, 1e-12);
        for kind in ProtocolKind::ALL {
            assert!(outage_cf(kind, &p).unwrap() < 1e-6);
            assert!(throughput_cf(kind, &p).unwrap() < 1e-12);
        }
    }

    #[test]
    fn rayleigh_htt_reduces_to_bessel() {
        let p = params(1, 35.0, 2.0);
        let c = p.links().as_.beta() * p.links().sa.beta() * p.direct_threshold();
        let want = 1.0 - 2.0 * c.sqrt() * bessel_k_int(1, 2.0 * c.sqrt()).unwrap();
        assert!((outage_htt_cf(&p).unwrap() - want).abs() < 1e-14);
    }

    #[test]
    fn throughput_substitution() {
        let p = params(1, 40.0, 2.0);
        assert!((throughput_from_outage(&p, 0.25) - 0.75).abs() < 1e-15);
        let near_one = p.with_tau(1.0 - 1e-9).unwrap();
        assert!(throughput_cf(ProtocolKind::At, &near_one).unwrap() < 1e-8);
    }

    #[test]
    fn huge_rate_is_certain_outage() {
        let p = params(2, 40.0, 1e6);
        for kind in ProtocolKind::ALL {
            assert_eq!(outage_cf(kind, &p).unwrap(), 1.0);
        }
    }

    #[test]
    fn adaptive_never_worse() {
        for m in 1..=3 {
            for dbm in [20.0, 27.5, 35.0, 45.0] {
                let p = params(m, dbm, 2.0);
                let at = outage_at_cf(&p).unwrap();
                assert!(at <= outage_htt_cf(&p).unwrap() + 1e-12);
                assert!(at <= outage_htc_cf(&p).unwrap() + 1e-12);
            }
        }
    }

    #[test]
    fn guard_rejects_out_of_range() {
        assert!(matches!(guard(1.0 + 1e-6, "x"), Err(Error::Numerical(_))));
        assert!(matches!(guard(-1e-6, "x"), Err(Error::Numerical(_))));
        assert_eq!(guard(-1e-12, "x").unwrap(), 0.0);
    }
}
