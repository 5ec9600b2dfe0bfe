//! Seeded Monte Carlo estimation of outage and throughput.
//!
//! Realization `i` is drawn from its own counter-indexed stream, so the set of
//! sampled blocks depends only on `(seed, n)`. Outage events are integer counts
//! merged by addition, which makes every estimate identical across backends.

use crate::channel::StreamFactory;
use crate::error::{Error, Result};
use crate::exec::Backend;
use crate::protocol::{ChannelRealization, OutageTest, ProtocolKind, RelayMode, SystemParams};

/// Smallest accepted block count.
pub const MIN_SAMPLES: u64 = 1_000;

pub const DEFAULT_SAMPLES: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageEstimate {
    pub kind: ProtocolKind,
    pub p_hat: f64,
    /// Binomial standard error `√(p̂(1-p̂)/n)`.
    pub stderr: f64,
    pub n: u64,
    pub outages: u64,
    pub seed: u64,
    pub mode: RelayMode,
}

impl OutageEstimate {
    fn from_count(kind: ProtocolKind, outages: u64, n: u64, seed: u64, mode: RelayMode) -> Self {
        let p_hat = outages as f64 / n as f64;
        Self {
            kind,
            p_hat,
            stderr: (p_hat * (1.0 - p_hat) / n as f64).sqrt(),
            n,
            outages,
            seed,
            mode,
        }
    }

    /// `R (1 - p̂)(1 - τ)`.
    pub fn throughput(&self, params: &SystemParams) -> f64 {
        params.rate() * (1.0 - self.p_hat) * (1.0 - params.tau())
    }
}

/// Monte Carlo driver bound to a backend.
#[derive(Debug, Clone, Copy, Default)]
pub struct Simulator {
    backend: Backend,
}

impl Simulator {
    pub fn new(backend: Backend) -> Self {
        Self { backend }
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    /// Estimates several protocols over one shared set of realizations.
    pub fn estimate_outages(
        &self,
        kinds: &[ProtocolKind],
        params: &SystemParams,
        n: u64,
        seed: u64,
        mode: RelayMode,
    ) -> Result<Vec<OutageEstimate>> {
        check_samples(n)?;
        let test = OutageTest::new(params, mode);
        let streams = StreamFactory::new(seed);
        let links = *params.links();
        let counts = self.backend.map_reduce(
            n,
            vec![0u64; kinds.len()],
            |range| {
                let mut local = vec![0u64; kinds.len()];
                for i in range {
                    let ch = ChannelRealization::sample(&links, &mut streams.stream(i));
                    for (slot, &kind) in local.iter_mut().zip(kinds) {
                        *slot += test.outage(kind, &ch) as u64;
                    }
                }
                local
            },
            add_counts,
        );
        Ok(kinds
            .iter()
            .zip(counts)
            .map(|(&kind, c)| OutageEstimate::from_count(kind, c, n, seed, mode))
            .collect())
    }

    pub fn estimate_outage(
        &self,
        kind: ProtocolKind,
        params: &SystemParams,
        n: u64,
        seed: u64,
        mode: RelayMode,
    ) -> Result<OutageEstimate> {
        Ok(self.estimate_outages(&[kind], params, n, seed, mode)?[0])
    }

    pub fn estimate_throughput(
        &self,
        kind: ProtocolKind,
        params: &SystemParams,
        n: u64,
        seed: u64,
        mode: RelayMode,
    ) -> Result<f64> {
        Ok(self.estimate_outage(kind, params, n, seed, mode)?.throughput(params))
    }

    /// How often the adaptive protocol picks the direct branch.
    pub fn branch_fraction(&self, params: &SystemParams, n: u64, seed: u64) -> Result<BranchEstimate> {
        check_samples(n)?;
        let test = OutageTest::new(params, RelayMode::Exact);
        let streams = StreamFactory::new(seed);
        let links = *params.links();
        let direct = self.backend.map_reduce(
            n,
            0u64,
            |range| {
                range
                    .filter(|&i| {
                        let ch = ChannelRealization::sample(&links, &mut streams.stream(i));
                        test.direct_ok(&ch)
                    })
                    .count() as u64
            },
            |a, b| a + b,
        );
        Ok(BranchEstimate {
            direct,
            n,
            fraction: direct as f64 / n as f64,
        })
    }

    /// Counts realizations where the adaptive protocol is in outage while HTT or
    /// HTC is not. Both counts are zero when the outage sets nest.
    pub fn inclusion_violations(
        &self,
        params: &SystemParams,
        n: u64,
        seed: u64,
        mode: RelayMode,
    ) -> Result<InclusionReport> {
        check_samples(n)?;
        let test = OutageTest::new(params, mode);
        let streams = StreamFactory::new(seed);
        let links = *params.links();
        let counts = self.backend.map_reduce(
            n,
            vec![0u64; 3],
            |range| {
                let mut local = vec![0u64; 3];
                for i in range {
                    let ch = ChannelRealization::sample(&links, &mut streams.stream(i));
                    let at = test.outage(ProtocolKind::At, &ch);
                    local[0] += at as u64;
                    local[1] += (at && !test.outage(ProtocolKind::Htt, &ch)) as u64;
                    local[2] += (at && !test.outage(ProtocolKind::Htc, &ch)) as u64;
                }
                local
            },
            add_counts,
        );
        Ok(InclusionReport {
            n,
            at_outages: counts[0],
            not_in_htt: counts[1],
            not_in_htc: counts[2],
        })
    }
}

fn add_counts(mut a: Vec<u64>, b: Vec<u64>) -> Vec<u64> {
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
    a
}

fn check_samples(n: u64) -> Result<()> {
    if n < MIN_SAMPLES {
        return Err(Error::domain(format!(
            "Monte Carlo needs at least {MIN_SAMPLES} blocks, got {n}"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchEstimate {
    pub direct: u64,
    pub n: u64,
    pub fraction: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InclusionReport {
    pub n: u64,
    pub at_outages: u64,
    pub not_in_htt: u64,
    pub not_in_htc: u64,
}

impl InclusionReport {
    pub fn violations(&self) -> u64 {
        self.not_in_htt + self.not_in_htc
    }
}

/// [`Simulator::estimate_outage`] on the default backend.
pub fn estimate_outage(
    kind: ProtocolKind,
    params: &SystemParams,
    n: u64,
    seed: u64,
    mode: RelayMode,
) -> Result<OutageEstimate> {
    Simulator::default().estimate_outage(kind, params, n, seed, mode)
}

/// [`Simulator::estimate_throughput`] on the default backend.
pub fn estimate_throughput(
    kind: ProtocolKind,
    params: &SystemParams,
    n: u64,
    seed: u64,
    mode: RelayMode,
) -> Result<f64> {
    Simulator::default().estimate_throughput(kind, params, n, seed, mode)
}

/// [`Simulator::branch_fraction`] on the default backend.
pub fn branch_fraction(params: &SystemParams, n: u64, seed: u64) -> Result<BranchEstimate> {
    Simulator::default().branch_fraction(params, n, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::Topology;
    use crate::protocol::Severities;

    fn params(m: u32, dbm: f64, rate: f64) -> SystemParams {
        let topo = Topology::new(10.0, 5.0, 2.0).unwrap();
        SystemParams::from_dbm(dbm, -80.0, 0.5, 0.5, rate, topo, Severities::uniform(m)).unwrap()
    }

    #[test]
    fn too_few_samples() {
        let p = params(1, 40.0, 2.0);
        assert!(matches!(
            estimate_outage(ProtocolKind::Htt, &p, 999, 1, RelayMode::Exact),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn certain_outage_and_certain_success() {
        let hopeless = params(1, 40.0, 1e6);
        for kind in ProtocolKind::ALL {
            let e = estimate_outage(kind, &hopeless, 2_000, 3, RelayMode::Exact).unwrap();
            assert_eq!(e.p_hat, 1.0);
            assert_eq!(e.stderr, 0.0);
            assert_eq!(e.throughput(&hopeless), 0.0);
        }
        let easy = params(2, 40.0, 1e-9);
        for kind in ProtocolKind::ALL {
            let e = estimate_outage(kind, &easy, 2_000, 3, RelayMode::Exact).unwrap();
            assert_eq!(e.p_hat, 0.0);
            assert_eq!(e.throughput(&easy), easy.rate() * (1.0 - easy.tau()));
        }
    }

    #[test]
    fn stderr_is_binomial() {
        let p = params(1, 30.0, 2.0);
        let e = estimate_outage(ProtocolKind::Htt, &p, 20_000, 9, RelayMode::Exact).unwrap();
        assert!(e.p_hat > 0.0 && e.p_hat < 1.0);
        assert_eq!(e.stderr, (e.p_hat * (1.0 - e.p_hat) / 20_000.0).sqrt());
        assert_eq!(e.outages as f64 / 20_000.0, e.p_hat);
    }

    #[test]
    fn branch_fraction_complements_htt_outage() {
        let p = params(2, 25.0, 2.0);
        let b = branch_fraction(&p, 30_000, 11).unwrap();
        let htt = estimate_outage(ProtocolKind::Htt, &p, 30_000, 11, RelayMode::Exact).unwrap();
        assert_eq!(b.direct + htt.outages, 30_000);
        assert!(branch_fraction(&params(2, 90.0, 2.0), 5_000, 1).unwrap().fraction > 0.999);
    }

    #[test]
    fn serial_backend_is_deterministic() {
        let p = params(3, 30.0, 2.0);
        let sim = Simulator::new(Backend::Serial);
        let a = sim.estimate_outages(&ProtocolKind::ALL, &p, 20_000, 5, RelayMode::Exact).unwrap();
        let b = sim.estimate_outages(&ProtocolKind::ALL, &p, 20_000, 5, RelayMode::Exact).unwrap();
        assert_eq!(a, b);
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn backends_agree_exactly() {
        let p = params(2, 30.0, 2.0);
        let n = 50_000;
        let s = Simulator::new(Backend::Serial)
            .estimate_outages(&ProtocolKind::ALL, &p, n, 21, RelayMode::Approx)
            .unwrap();
        let q = Simulator::new(Backend::Parallel)
            .estimate_outages(&ProtocolKind::ALL, &p, n, 21, RelayMode::Approx)
            .unwrap();
        assert_eq!(s, q);
    }
}
