//! Reference evaluations that share no code path with [`crate::specfun`].
//!
//! Quadrature integrates the defining integrals directly (adaptive
//! Gauss–Kronrod 7/15); Monte Carlo draws gamma variates from a sequential
//! ChaCha stream independent of the simulator's stream layout. The acceptance
//! suite and the kernel tests compare the closed-form kernels against these.

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let pair = f(c - dx) + f(c + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Adaptive integral of `f` over `[a, b]` to the given relative tolerance.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> f64 {
    let (whole, err) = gk15(&f, a, b);
    let mut intervals = vec![(a, b, whole, err)];
    for _ in 0..20_000 {
        let total: f64 = intervals.iter().map(|iv| iv.2).sum();
        let total_err: f64 = intervals.iter().map(|iv| iv.3).sum();
        if total_err <= rel_tol * total.abs() || total_err < 1e-300 {
            break;
        }
        let (worst, _) = intervals
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("nonempty");
        let (lo, hi, _, _) = intervals.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        let (l, le) = gk15(&f, lo, mid);
        let (r, re) = gk15(&f, mid, hi);
        intervals.push((lo, mid, l, le));
        intervals.push((mid, hi, r, re));
    }
    let mut parts: Vec<f64> = intervals.iter().map(|iv| iv.2).collect();
    parts.sort_by(|x, y| x.abs().total_cmp(&y.abs()));
    parts.iter().sum()
}

/// `K_n(z) = ∫_0^∞ e^{-z cosh t} cosh(n t) dt`, integrated after factoring out
/// the peak of the integrand so that huge and tiny values stay representable.
pub fn bessel_k_quad(n: i32, z: f64) -> f64 {
    let nu = n.unsigned_abs() as f64;
    let expo = |t: f64| -z * t.cosh() + nu * t;
    let t_peak = (nu / z).asinh();
    let peak = expo(t_peak);
    let mut t_end = t_peak + 1.0;
    while expo(t_end) - peak > -80.0 {
        t_end += 1.0;
    }
    let g = |t: f64| (expo(t) - peak).exp() * 0.5 * (1.0 + (-2.0 * nu * t).exp());
    let body = integrate(g, 0.0, t_peak, 1e-15) + integrate(g, t_peak, t_end, 1e-15);
    body * peak.exp()
}

/// `γ(m, x)/Γ(m)` by direct integration of `t^{m-1} e^{-t}/(m-1)!`.
pub fn reg_lower_gamma_quad(m: u32, x: f64) -> f64 {
    let ln_norm: f64 = (2..m).map(|k| (k as f64).ln()).sum();
    let mf = m as f64;
    let density = move |t: f64| {
        if t <= 0.0 {
            if m == 1 {
                1.0
            } else {
                0.0
            }
        } else {
            ((mf - 1.0) * t.ln() - t - ln_norm).exp()
        }
    };
    let mode = (mf - 1.0).min(x);
    integrate(density, 0.0, mode, 1e-15) + integrate(density, mode, x, 1e-15)
}

/// Upper regularized gamma via the finite sum, written out independently.
fn upper_tail(m: u32, a: f64) -> f64 {
    if a <= 0.0 {
        return 1.0;
    }
    let mut term = (-a).exp();
    let mut sum = term;
    for i in 1..m {
        term *= a / i as f64;
        sum += term;
    }
    sum.min(1.0)
}

fn unit_gamma_pdf(m: u32, g: f64) -> f64 {
    if g <= 0.0 {
        return if m == 1 { 1.0 } else { 0.0 };
    }
    let ln_norm: f64 = (2..m).map(|k| (k as f64).ln()).sum();
    ((m as f64 - 1.0) * g.ln() - g - ln_norm).exp()
}

/// Integrates `Pr-weight(g) · tail(g)` over a unit-scale gamma variate `g` of shape `m`.
fn gamma_expectation<F: Fn(f64) -> f64>(m: u32, tail: F) -> f64 {
    let mf = m as f64;
    let end = mf + 60.0 + 12.0 * mf.sqrt();
    let split = (mf - 1.0).max(0.5);
    let f = |g: f64| unit_gamma_pdf(m, g) * tail(g);
    integrate(f, 0.0, split, 1e-14) + integrate(f, split, end, 1e-14)
}

/// `Pr(g1 g2 > x)` for unit-scale gammas of shapes `m1`, `m2`, by quadrature over `g2`.
pub fn s_func_quad(m1: u32, m2: u32, x: f64) -> f64 {
    gamma_expectation(m2, |g| upper_tail(m1, x / g))
}

/// `E[Q(m_SA, x1/y) Q(m_SR, x2/y)]` with `y ~ Gamma(m_AS, rate beta_as)`, by quadrature.
pub fn phi_quad(m_as: u32, m_sa: u32, m_sr: u32, beta_as: f64, x1: f64, x2: f64) -> f64 {
    gamma_expectation(m_as, |g| {
        upper_tail(m_sa, beta_as * x1 / g) * upper_tail(m_sr, beta_as * x2 / g)
    })
}

/// Sample mean and its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McValue {
    pub mean: f64,
    pub stderr: f64,
    pub n: u64,
}

impl McValue {
    fn from_sums(sum: f64, sum_sq: f64, n: u64) -> Self {
        let nf = n as f64;
        let mean = sum / nf;
        let var = (sum_sq / nf - mean * mean).max(0.0);
        Self {
            mean,
            stderr: (var / nf).sqrt(),
            n,
        }
    }

    /// Distance from `value` in standard errors.
    pub fn sigmas(&self, value: f64) -> f64 {
        if self.stderr == 0.0 {
            if value == self.mean {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (value - self.mean).abs() / self.stderr
        }
    }
}

fn unit_gamma_draw(rng: &mut ChaCha8Rng, m: u32) -> f64 {
    (0..m)
        .map(|_| -rng.sample::<f64, _>(Open01).ln())
        .sum()
}

/// Monte Carlo estimate of `Pr(g1 g2 > x)`.
pub fn s_func_mc(m1: u32, m2: u32, x: f64, n: u64, seed: u64) -> McValue {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0u64;
    for _ in 0..n {
        let g1 = unit_gamma_draw(&mut rng, m1);
        let g2 = unit_gamma_draw(&mut rng, m2);
        hits += (g1 * g2 > x) as u64;
    }
    let s = hits as f64;
    McValue::from_sums(s, s, n)
}

/// Monte Carlo estimate of `Φ(x1, x2)`.
pub fn phi_mc(m_as: u32, m_sa: u32, m_sr: u32, beta_as: f64, x1: f64, x2: f64, n: u64, seed: u64) -> McValue {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..n {
        let y = unit_gamma_draw(&mut rng, m_as) / beta_as;
        let v = upper_tail(m_sa, x1 / y) * upper_tail(m_sr, x2 / y);
        sum += v;
        sum_sq += v * v;
    }
    McValue::from_sums(sum, sum_sq, n)
}
