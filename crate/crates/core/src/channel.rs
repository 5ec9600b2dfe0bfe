//! Nakagami-m link model.
//!
//! A Nakagami-m amplitude has a gamma-distributed power gain with shape `m` and
//! mean `Ω`, i.e. rate `β = m/Ω`. Only integer severities are supported, which
//! makes the exact sampler a plain sum of `m` exponentials.

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::specfun::{self, ln_factorial};

/// Largest fading severity accepted. Keeps every Bessel order that the closed
/// forms can produce within `specfun::BESSEL_ORDER_MAX`.
pub const MAX_SEVERITY: u32 = 32;

/// Average power gain at distance `d` under the `10^-3 d^-α` path-loss law.
pub fn omega_from_distance(d: f64, alpha: f64) -> Result<f64> {
    if !(d > 0.0) || !d.is_finite() {
        return Err(Error::domain(format!("distance must be > 0, got {d}")));
    }
    check_alpha(alpha)?;
    Ok(1e-3 * d.powf(-alpha))
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(2.0..=5.0).contains(&alpha) {
        return Err(Error::domain(format!(
            "path-loss exponent must lie in [2, 5], got {alpha}"
        )));
    }
    Ok(())
}

/// One directed fading link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkSpec {
    m: u32,
    omega: f64,
    beta: f64,
}

impl LinkSpec {
    pub fn new(m: u32, omega: f64) -> Result<Self> {
        if m == 0 || m > MAX_SEVERITY {
            return Err(Error::domain(format!(
                "fading severity must be an integer in [1, {MAX_SEVERITY}], got {m}"
            )));
        }
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::domain(format!("average power must be > 0, got {omega}")));
        }
        Ok(Self {
            m,
            omega,
            beta: m as f64 / omega,
        })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// Rate parameter `m/Ω`.
    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn pdf(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0) {
            return Err(Error::domain(format!("pdf argument must be >= 0, got {x}")));
        }
        if x == 0.0 {
            return Ok(if self.m == 1 { self.beta } else { 0.0 });
        }
        let m = self.m as f64;
        let ln_pdf =
            m * self.beta.ln() - ln_factorial(self.m - 1) + (m - 1.0) * x.ln() - self.beta * x;
        Ok(ln_pdf.exp())
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0) {
            return Err(Error::domain(format!("cdf argument must be >= 0, got {x}")));
        }
        specfun::reg_lower_gamma(self.m, self.beta * x)
    }

    /// `Pr(h > x)`, accurate in the far tail.
    pub fn survival(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0) {
            return Err(Error::domain(format!("survival argument must be >= 0, got {x}")));
        }
        specfun::reg_upper_gamma(self.m, self.beta * x)
    }

    /// One power-gain draw: `(Ω/m) Σ_{i=1}^{m} -ln U_i` with `U_i ~ U(0,1)`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let mut acc = 0.0;
        for _ in 0..self.m {
            // Open01 excludes both endpoints, so ln never sees zero.
            let u: f64 = rng.sample(Open01);
            acc -= u.ln();
        }
        acc / self.beta
    }
}

/// Linear topology: the relay sits on the segment between AP and source.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Topology {
    d_as: f64,
    d_ar: f64,
    alpha: f64,
}

impl Topology {
    pub fn new(d_as: f64, d_ar: f64, alpha: f64) -> Result<Self> {
        if !(d_as > 0.0) || !d_as.is_finite() {
            return Err(Error::domain(format!("d_AS must be > 0, got {d_as}")));
        }
        if !(d_ar > 0.0 && d_ar < d_as) {
            return Err(Error::domain(format!(
                "relay must sit strictly between AP and source: need 0 < d_AR < {d_as}, got {d_ar}"
            )));
        }
        check_alpha(alpha)?;
        Ok(Self { d_as, d_ar, alpha })
    }

    pub fn d_as(&self) -> f64 {
        self.d_as
    }

    pub fn d_ar(&self) -> f64 {
        self.d_ar
    }

    pub fn d_sr(&self) -> f64 {
        self.d_as - self.d_ar
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

/// Counter-based random streams: stream `i` is ChaCha8 keyed by the master seed
/// with nonce `i`, so the draws of realization `i` do not depend on how the
/// index range is split across workers.
#[derive(Debug, Clone)]
pub struct StreamFactory {
    key: [u8; 32],
    seed: u64,
}

impl StreamFactory {
    pub fn new(seed: u64) -> Self {
        let mut key = [0u8; 32];
        ChaCha8Rng::seed_from_u64(seed).fill(&mut key);
        Self { key, seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::from_seed(self.key);
        rng.set_stream(index);
        rng
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn omega_examples() {
        assert!((omega_from_distance(10.0, 2.0).unwrap() - 1e-5).abs() < 1e-20);
        assert!((omega_from_distance(1.0, 2.0).unwrap() - 1e-3).abs() < 1e-18);
        assert!((omega_from_distance(5.0, 2.0).unwrap() - 4e-5).abs() < 1e-19);
        assert!(matches!(omega_from_distance(0.0, 2.0), Err(Error::Domain(_))));
        assert!(matches!(omega_from_distance(3.0, 1.5), Err(Error::Domain(_))));
        assert!(matches!(omega_from_distance(3.0, 5.5), Err(Error::Domain(_))));
    }

    #[test]
    fn omega_decreasing() {
        let ds = [1.5, 2.0, 4.0, 9.0, 20.0];
        for w in ds.windows(2) {
            assert!(omega_from_distance(w[1], 3.0).unwrap() < omega_from_distance(w[0], 3.0).unwrap());
        }
        for a in [2.0, 2.5, 3.0, 4.0, 5.0].windows(2) {
            assert!(omega_from_distance(7.0, a[1]).unwrap() < omega_from_distance(7.0, a[0]).unwrap());
        }
    }

    #[test]
    fn link_rejects_bad_parameters() {
        assert!(LinkSpec::new(0, 1.0).is_err());
        assert!(LinkSpec::new(33, 1.0).is_err());
        assert!(LinkSpec::new(2, 0.0).is_err());
        let l = LinkSpec::new(3, 2.0).unwrap();
        assert!((l.beta() * l.omega() - 3.0).abs() < 1e-15);
        assert!(l.pdf(-1.0).is_err());
        assert!(l.cdf(-1.0).is_err());
    }

    #[test]
    fn exponential_special_case() {
        let l = LinkSpec::new(1, 1.0).unwrap();
        for x in [0.0f64, 0.2, 1.0, 4.5] {
            assert!((l.pdf(x).unwrap() - (-x).exp()).abs() < 1e-15);
            assert!((l.cdf(x).unwrap() - (1.0 - (-x).exp())).abs() < 1e-15);
        }
        assert_eq!(LinkSpec::new(2, 1.0).unwrap().pdf(0.0).unwrap(), 0.0);
        assert_eq!(LinkSpec::new(5, 0.3).unwrap().cdf(0.0).unwrap(), 0.0);
    }

    #[test]
    fn cdf_delegates_to_incomplete_gamma() {
        let l = LinkSpec::new(2, 0.5).unwrap();
        let want = specfun::reg_lower_gamma(2, 4.0).unwrap();
        assert_eq!(l.cdf(1.0).unwrap(), want);
        // 1 - e^{-4}(1 + 4)
        assert!((want - (1.0 - 5.0 * (-4.0f64).exp())).abs() < 1e-15);
    }

    #[test]
    fn pdf_matches_cdf_derivative() {
        let l = LinkSpec::new(3, 2.0).unwrap();
        let h = 1e-5;
        let x = 1.5;
        let deriv = (l.cdf(x + h).unwrap() - l.cdf(x - h).unwrap()) / (2.0 * h);
        assert!((l.pdf(x).unwrap() - deriv).abs() < 1e-9);
    }

    #[test]
    fn topology_validation() {
        let t = Topology::new(10.0, 3.0, 2.0).unwrap();
        assert_eq!(t.d_sr(), 7.0);
        assert!(Topology::new(10.0, 10.0, 2.0).is_err());
        assert!(Topology::new(10.0, 0.0, 2.0).is_err());
        assert!(Topology::new(10.0, 5.0, 6.0).is_err());
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let f = StreamFactory::new(42);
        let l = LinkSpec::new(2, 1.0).unwrap();
        let a: Vec<f64> = (0..8).map(|_| 0).scan(f.stream(7), |r, _| Some(l.sample(r))).collect();
        let b: Vec<f64> = (0..8).map(|_| 0).scan(f.stream(7), |r, _| Some(l.sample(r))).collect();
        let c: Vec<f64> = (0..8).map(|_| 0).scan(f.stream(8), |r, _| Some(l.sample(r))).collect();
        assert_eq!(a, b);
        assert_ne!(a, c);
        let other = StreamFactory::new(43);
        assert_ne!(l.sample(&mut other.stream(7)), a[0]);
    }
}
