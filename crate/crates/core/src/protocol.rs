//! Per-block physics of the three uplink protocols.
//!
//! Every block starts with a downlink energy transfer of length `τ` (block
//! length normalized to one). Afterwards:
//!
//! * HTT: the source spends its energy on a direct uplink of length `1 - τ`.
//! * HTC: source and relay split `1 - τ` into two equal slots; the relay
//!   amplifies and forwards and the AP keeps the stronger branch.
//! * AT: the AP knows `h_AS h_SA` and runs HTT when it cannot be in outage,
//!   HTC otherwise.
//!
//! Threshold equality always counts as outage (and selects the cooperative
//! branch), so the three indicators are consistent bit for bit.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{omega_from_distance, LinkSpec, Topology};
use crate::error::{Error, Result};

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ProtocolKind {
    #[serde(rename = "HTT", alias = "htt")]
    Htt,
    #[serde(rename = "HTC", alias = "htc")]
    Htc,
    #[serde(rename = "AT", alias = "at")]
    At,
}

impl ProtocolKind {
    pub const ALL: [ProtocolKind; 3] = [ProtocolKind::Htt, ProtocolKind::Htc, ProtocolKind::At];

    pub fn as_str(self) -> &'static str {
        match self {
            ProtocolKind::Htt => "HTT",
            ProtocolKind::Htc => "HTC",
            ProtocolKind::At => "AT",
        }
    }

    /// Whether the closed-form outage of this protocol is exact. HTC and AT
    /// rely on the min-approximation of the relayed SNR.
    pub fn closed_form_is_exact(self) -> bool {
        matches!(self, ProtocolKind::Htt)
    }
}

impl fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProtocolKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "htt" => Ok(ProtocolKind::Htt),
            "htc" => Ok(ProtocolKind::Htc),
            "at" => Ok(ProtocolKind::At),
            _ => Err(Error::config("protocol", format!("unknown protocol `{s}`"))),
        }
    }
}

/// Which relayed-SNR expression the simulator uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RelayMode {
    /// Amplify-and-forward end-to-end SNR.
    Exact,
    /// `μ₂ min(h_AS h_SR, h_AR h_RA)`, the form the closed-form analysis assumes.
    Approx,
}

impl RelayMode {
    pub fn as_str(self) -> &'static str {
        match self {
            RelayMode::Exact => "exact",
            RelayMode::Approx => "approx",
        }
    }
}

impl fmt::Display for RelayMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RelayMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "exact" => Ok(RelayMode::Exact),
            "approx" => Ok(RelayMode::Approx),
            _ => Err(Error::config("mode", format!("unknown relay mode `{s}`"))),
        }
    }
}

/// Fading severities of the five links.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Severities {
    #[serde(rename = "as")]
    pub as_: u32,
    pub sa: u32,
    pub sr: u32,
    pub ar: u32,
    pub ra: u32,
}

impl Severities {
    pub fn uniform(m: u32) -> Self {
        Self {
            as_: m,
            sa: m,
            sr: m,
            ar: m,
            ra: m,
        }
    }
}

/// The five directed links of a scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Links {
    pub as_: LinkSpec,
    pub sa: LinkSpec,
    pub sr: LinkSpec,
    pub ar: LinkSpec,
    pub ra: LinkSpec,
}

impl Links {
    /// Downlink and uplink of a node pair share the path-loss `Ω` but are
    /// drawn independently.
    pub fn from_topology(topology: &Topology, m: Severities) -> Result<Self> {
        let alpha = topology.alpha();
        let omega_as = omega_from_distance(topology.d_as(), alpha)?;
        let omega_sr = omega_from_distance(topology.d_sr(), alpha)?;
        let omega_ar = omega_from_distance(topology.d_ar(), alpha)?;
        Ok(Self {
            as_: LinkSpec::new(m.as_, omega_as)?,
            sa: LinkSpec::new(m.sa, omega_as)?,
            sr: LinkSpec::new(m.sr, omega_sr)?,
            ar: LinkSpec::new(m.ar, omega_ar)?,
            ra: LinkSpec::new(m.ra, omega_ar)?,
        })
    }
}

/// A complete scenario in linear units.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemParams {
    p_a: f64,
    n0: f64,
    eta: f64,
    tau: f64,
    rate: f64,
    topology: Topology,
    severities: Severities,
    links: Links,
}

impl SystemParams {
    /// `p_a` and `n0` in watts, `rate` in bits/s/Hz.
    pub fn new(
        p_a: f64,
        n0: f64,
        eta: f64,
        tau: f64,
        rate: f64,
        topology: Topology,
        severities: Severities,
    ) -> Result<Self> {
        if !(p_a > 0.0) || !p_a.is_finite() {
            return Err(Error::domain(format!("AP power must be > 0 W, got {p_a}")));
        }
        if !(n0 > 0.0) || !n0.is_finite() {
            return Err(Error::domain(format!("noise power must be > 0 W, got {n0}")));
        }
        if !(eta > 0.0 && eta < 1.0) {
            return Err(Error::domain(format!("eta must lie in (0, 1), got {eta}")));
        }
        check_tau(tau)?;
        if !(rate > 0.0) || !rate.is_finite() {
            return Err(Error::domain(format!("rate must be > 0, got {rate}")));
        }
        let links = Links::from_topology(&topology, severities)?;
        Ok(Self {
            p_a,
            n0,
            eta,
            tau,
            rate,
            topology,
            severities,
            links,
        })
    }

    /// Same as [`SystemParams::new`] with powers in dBm.
    pub fn from_dbm(
        p_a_dbm: f64,
        n0_dbm: f64,
        eta: f64,
        tau: f64,
        rate: f64,
        topology: Topology,
        severities: Severities,
    ) -> Result<Self> {
        Self::new(
            dbm_to_watts(p_a_dbm),
            dbm_to_watts(n0_dbm),
            eta,
            tau,
            rate,
            topology,
            severities,
        )
    }

    pub fn with_tau(&self, tau: f64) -> Result<Self> {
        check_tau(tau)?;
        Ok(Self { tau, ..self.clone() })
    }

    pub fn with_rate(&self, rate: f64) -> Result<Self> {
        Self::new(self.p_a, self.n0, self.eta, self.tau, rate, self.topology, self.severities)
    }

    pub fn p_a(&self) -> f64 {
        self.p_a
    }

    pub fn n0(&self) -> f64 {
        self.n0
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn severities(&self) -> Severities {
        self.severities
    }

    pub fn links(&self) -> &Links {
        &self.links
    }

    /// Direct-link SNR scale `η (P_A/N₀) τ/(1-τ)`.
    pub fn mu1(&self) -> f64 {
        self.eta * (self.p_a / self.n0) * self.tau / (1.0 - self.tau)
    }

    /// Two-slot SNR scale; always exactly `2 μ₁`.
    pub fn mu2(&self) -> f64 {
        2.0 * self.mu1()
    }

    /// `2^R - 1`.
    pub fn upsilon1(&self) -> f64 {
        (self.rate * std::f64::consts::LN_2).exp_m1()
    }

    /// `2^{2R} - 1`.
    pub fn upsilon2(&self) -> f64 {
        (2.0 * self.rate * std::f64::consts::LN_2).exp_m1()
    }

    /// Channel-product threshold of the HTT/AT decision, `υ₁/μ₁`.
    pub fn direct_threshold(&self) -> f64 {
        self.upsilon1() / self.mu1()
    }

    /// Channel-product threshold of the two-slot links, `υ₂/μ₂`.
    pub fn cooperative_threshold(&self) -> f64 {
        self.upsilon2() / self.mu2()
    }
}

fn check_tau(tau: f64) -> Result<()> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::domain(format!("tau must lie in (0, 1), got {tau}")));
    }
    Ok(())
}

/// Channel power gains of one block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelRealization {
    pub h_as: f64,
    pub h_sa: f64,
    pub h_sr: f64,
    pub h_ar: f64,
    pub h_ra: f64,
}

impl ChannelRealization {
    /// Draws the five gains in the fixed order AS, SA, SR, AR, RA.
    pub fn sample<R: Rng + ?Sized>(links: &Links, rng: &mut R) -> Self {
        let h_as = links.as_.sample(rng);
        let h_sa = links.sa.sample(rng);
        let h_sr = links.sr.sample(rng);
        let h_ar = links.ar.sample(rng);
        let h_ra = links.ra.sample(rng);
        Self {
            h_as,
            h_sa,
            h_sr,
            h_ar,
            h_ra,
        }
    }

    fn direct_product(&self) -> f64 {
        self.h_as * self.h_sa
    }

    fn first_hop(&self) -> f64 {
        self.h_as * self.h_sr
    }

    fn second_hop(&self) -> f64 {
        self.h_ar * self.h_ra
    }
}

/// Branch taken by the adaptive protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AtBranch {
    /// HTT, chosen when the direct link alone meets the rate.
    Direct,
    /// HTC.
    Cooperative,
}

/// Energy harvested during the downlink phase, `η τ P_A h` (block length 1).
pub fn harvested_energy(params: &SystemParams, h: f64) -> f64 {
    params.eta * params.tau * params.p_a * h
}

pub fn snr_htt(params: &SystemParams, ch: &ChannelRealization) -> f64 {
    params.mu1() * ch.direct_product()
}

pub fn snr_htc_direct(params: &SystemParams, ch: &ChannelRealization) -> f64 {
    params.mu2() * ch.direct_product()
}

/// Amplify-and-forward end-to-end SNR of the S-R-A path.
pub fn snr_htc_relay_exact(params: &SystemParams, ch: &ChannelRealization) -> f64 {
    let mu2 = params.mu2();
    let x = ch.first_hop();
    let y = ch.second_hop();
    mu2 * x * y / (x + y + 1.0 / mu2)
}

pub fn snr_htc_relay_approx(params: &SystemParams, ch: &ChannelRealization) -> f64 {
    params.mu2() * ch.first_hop().min(ch.second_hop())
}

/// Selection-combined SNR of HTC.
pub fn snr_htc(params: &SystemParams, ch: &ChannelRealization, mode: RelayMode) -> f64 {
    let relay = match mode {
        RelayMode::Exact => snr_htc_relay_exact(params, ch),
        RelayMode::Approx => snr_htc_relay_approx(params, ch),
    };
    snr_htc_direct(params, ch).max(relay)
}

pub fn at_branch(params: &SystemParams, ch: &ChannelRealization) -> AtBranch {
    if ch.direct_product() > params.direct_threshold() {
        AtBranch::Direct
    } else {
        AtBranch::Cooperative
    }
}

/// Per-block outage indicator.
pub fn outage(kind: ProtocolKind, params: &SystemParams, ch: &ChannelRealization, mode: RelayMode) -> bool {
    OutageTest::new(params, mode).outage(kind, ch)
}

/// Precomputed thresholds for evaluating many blocks against one scenario.
#[derive(Debug, Clone, Copy)]
pub(crate) struct OutageTest {
    mu2: f64,
    direct_threshold: f64,
    upsilon2: f64,
    mode: RelayMode,
}

impl OutageTest {
    pub(crate) fn new(params: &SystemParams, mode: RelayMode) -> Self {
        Self {
            mu2: params.mu2(),
            direct_threshold: params.direct_threshold(),
            upsilon2: params.upsilon2(),
            mode,
        }
    }

    pub(crate) fn direct_ok(&self, ch: &ChannelRealization) -> bool {
        ch.direct_product() > self.direct_threshold
    }

    pub(crate) fn htc_outage(&self, ch: &ChannelRealization) -> bool {
        let mu2 = self.mu2;
        let direct = mu2 * ch.direct_product();
        let x = ch.first_hop();
        let y = ch.second_hop();
        let relay = match self.mode {
            RelayMode::Exact => mu2 * x * y / (x + y + 1.0 / mu2),
            RelayMode::Approx => mu2 * x.min(y),
        };
        !(direct.max(relay) > self.upsilon2)
    }

    pub(crate) fn outage(&self, kind: ProtocolKind, ch: &ChannelRealization) -> bool {
        match kind {
            ProtocolKind::Htt => !self.direct_ok(ch),
            ProtocolKind::Htc => self.htc_outage(ch),
            ProtocolKind::At => !self.direct_ok(ch) && self.htc_outage(ch),
        }
    }
}
