//! Special-function kernels for integer orders and shapes.
//!
//! Everything here works on small positive integers (fading severities) and
//! nonnegative reals. The Bessel routines evaluate `K_0` and `K_1` directly and
//! reach higher orders through the forward recurrence, which is stable for `K`.
//!
//! The two closed-form building blocks of the outage analysis are
//!
//! ```text
//! S_{m1,m2}(x) = 2/Γ(m2) Σ_{i<m1} x^{(m2+i)/2}/i! K_{m2-i}(2√x)
//! Φ(x1, x2)    = 2/Γ(m_AS) Σ_{i<m_SA} Σ_{j<m_SR} x1^i/i! x2^j/j! (x1+x2)^{(m_AS-i-j)/2}
//!                  β_AS^{(m_AS+i+j)/2} K_{m_AS-i-j}(2√((x1+x2)β_AS))
//! ```
//!
//! Both are evaluated through the scaled sequence `T_n(x) = e^{2√x} x^{n/2} K_n(2√x)`,
//! which obeys `T_{n+1} = n T_n + x T_{n-1}` and stays finite as `x → 0`
//! (`T_n → e^0 Γ(n)/2`), so the large powers of `x` never meet a huge Bessel value.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Euler–Mascheroni constant.
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Largest `n` with `Γ(n)` finite in binary64.
pub const GAMMA_INT_MAX: u32 = 170;

/// Largest Bessel order accepted by [`bessel_k_int`].
pub const BESSEL_ORDER_MAX: u32 = 64;

/// Beyond this Bessel argument every `S`/`Φ` term is below the smallest
/// subnormal, so the sums are returned as zero without evaluating them.
const ARG_UNDERFLOW: f64 = 1500.0;

const SERIES_EPS: f64 = 1e-17;
const MAX_ITER: usize = 10_000;

/// `Γ(n) = (n-1)!` for integer `n`.
pub fn gamma_int(n: u32) -> Result<f64> {
    if n == 0 || n > GAMMA_INT_MAX {
        return Err(Error::domain(format!(
            "gamma_int needs 1 <= n <= {GAMMA_INT_MAX}, got {n}"
        )));
    }
    Ok((1..n).fold(1.0, |acc, k| acc * k as f64))
}

/// `ln(k!)`.
pub(crate) fn ln_factorial(k: u32) -> f64 {
    (2..=k).map(|j| (j as f64).ln()).sum()
}

/// Regularized lower incomplete gamma `γ(m, x)/Γ(m)` for integer shape `m`.
///
/// For `x >= m` the finite complement `1 - e^{-x} Σ_{i<m} x^i/i!` is used. Below
/// that the complement cancels badly, so the convergent power series
/// `e^{-x} x^m/m! Σ_k x^k/((m+1)…(m+k))` takes over.
pub fn reg_lower_gamma(m: u32, x: f64) -> Result<f64> {
    check_shape(m, "reg_lower_gamma")?;
    check_nonneg(x, "reg_lower_gamma")?;
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(1.0);
    }
    if x < m as f64 {
        Ok(lower_series(m, x))
    } else {
        Ok(1.0 - upper_finite(m, x))
    }
}

/// Regularized upper incomplete gamma `Γ(m, x)/Γ(m) = 1 - reg_lower_gamma(m, x)`,
/// evaluated without cancellation on both sides of `x = m`.
pub fn reg_upper_gamma(m: u32, x: f64) -> Result<f64> {
    check_shape(m, "reg_upper_gamma")?;
    check_nonneg(x, "reg_upper_gamma")?;
    if x == 0.0 {
        return Ok(1.0);
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    if x < m as f64 {
        Ok(1.0 - lower_series(m, x))
    } else {
        Ok(upper_finite(m, x))
    }
}

fn lower_series(m: u32, x: f64) -> f64 {
    let lead = (-x + m as f64 * x.ln() - ln_factorial(m)).exp();
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..MAX_ITER {
        term *= x / (m as f64 + k as f64);
        sum += term;
        if term < SERIES_EPS * sum {
            break;
        }
    }
    (lead * sum).min(1.0)
}

fn upper_finite(m: u32, x: f64) -> f64 {
    let lx = x.ln();
    let terms: Vec<f64> = (0..m)
        .map(|i| (-x + i as f64 * lx - ln_factorial(i)).exp())
        .collect();
    compensated_sum(terms).min(1.0)
}

/// Modified Bessel function of the second kind `K_n(z)` for integer `n`.
pub fn bessel_k_int(n: i32, z: f64) -> Result<f64> {
    let scaled = bessel_k_int_scaled(n, z)?;
    let value = scaled * (-z).exp();
    if !value.is_finite() {
        return Err(Error::Overflow(format!("K_{n}({z}) exceeds f64::MAX")));
    }
    Ok(value)
}

/// Exponentially scaled `e^z K_n(z)`.
pub fn bessel_k_int_scaled(n: i32, z: f64) -> Result<f64> {
    let order = n.unsigned_abs();
    if order > BESSEL_ORDER_MAX {
        return Err(Error::domain(format!(
            "bessel order |{n}| exceeds {BESSEL_ORDER_MAX}"
        )));
    }
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::domain(format!("bessel_k_int needs z > 0, got {z}")));
    }
    let (k0, k1) = k01_scaled(z);
    if order == 0 {
        return Ok(k0);
    }
    let (mut prev, mut cur) = (k0, k1);
    for j in 1..order {
        let next = prev + (2.0 * j as f64 / z) * cur;
        prev = cur;
        cur = next;
        if !cur.is_finite() {
            return Err(Error::Overflow(format!("K_{n}({z}) exceeds f64::MAX")));
        }
    }
    Ok(cur)
}

/// `(e^z K_0(z), e^z K_1(z))`.
fn k01_scaled(z: f64) -> (f64, f64) {
    if z <= 2.0 {
        let (k0, k1) = k01_series(z);
        let e = z.exp();
        (k0 * e, k1 * e)
    } else {
        k01_steed(z)
    }
}

/// Ascending series for `K_0`, `K_1`, accurate for `z <= 2`.
fn k01_series(z: f64) -> (f64, f64) {
    let t = 0.25 * z * z;
    let log_half = (0.5 * z).ln();

    // K_0 = -(ln(z/2) + γ) I_0 + Σ_{k>=1} t^k/(k!)² H_k
    // K_1 = 1/z + ln(z/2) I_1 - (z/4) Σ_{k>=0} (ψ(k+1) + ψ(k+2)) t^k/(k!(k+1)!)
    let mut i0 = 1.0;
    let mut k0_tail = 0.0;
    let mut i1_sum = 1.0;
    let mut k1_tail = 1.0 - 2.0 * EULER_GAMMA; // ψ(1) + ψ(2)
    let mut p0 = 1.0; // t^k/(k!)²
    let mut p1 = 1.0; // t^k/(k!(k+1)!)
    let mut harmonic = 0.0; // H_k
    for k in 1..200 {
        let kf = k as f64;
        harmonic += 1.0 / kf;
        p0 *= t / (kf * kf);
        p1 *= t / (kf * (kf + 1.0));
        i0 += p0;
        k0_tail += p0 * harmonic;
        i1_sum += p1;
        let psi_sum = 2.0 * harmonic + 1.0 / (kf + 1.0) - 2.0 * EULER_GAMMA;
        k1_tail += p1 * psi_sum;
        if p0 * harmonic < SERIES_EPS * k0_tail.abs() && p1 * psi_sum.abs() < SERIES_EPS * k1_tail.abs()
        {
            break;
        }
    }
    let k0 = -(log_half + EULER_GAMMA) * i0 + k0_tail;
    let i1 = 0.5 * z * i1_sum;
    let k1 = 1.0 / z + log_half * i1 - 0.25 * z * k1_tail;
    (k0, k1)
}

/// Steed's continued fraction for `e^z K_0(z)` and `e^z K_1(z)`, `z > 2`.
fn k01_steed(z: f64) -> (f64, f64) {
    let mut b = 2.0 * (1.0 + z);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 1..MAX_ITER {
        let fi = i as f64;
        a -= 2.0 * fi;
        c = -a * c / (fi + 1.0);
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < SERIES_EPS {
            break;
        }
    }
    let h = a1 * h;
    let k0 = (PI / (2.0 * z)).sqrt() / s;
    let k1 = k0 * (z + 0.5 - h) / z;
    (k0, k1)
}

/// `T_n(x) = e^{2√x} x^{n/2} K_n(2√x)` for `n = 0..=nmax`.
fn scaled_t_table(x: f64, nmax: u32) -> Vec<f64> {
    let z = 2.0 * x.sqrt();
    let (k0, k1) = k01_scaled(z);
    let mut t = Vec::with_capacity(nmax as usize + 1);
    t.push(k0);
    if nmax >= 1 {
        t.push(x.sqrt() * k1);
    }
    for n in 1..nmax as usize {
        let next = n as f64 * t[n] + x * t[n - 1];
        t.push(next);
    }
    t
}

/// `ln(u^{ν/2} K_{|ν|}(2√u) e^{2√u}) = min(ν,0) ln u + ln T_{|ν|}(u)`.
fn ln_bessel_factor(table: &[f64], nu: i64, ln_u: f64) -> f64 {
    let order = nu.unsigned_abs() as usize;
    let shift = if nu < 0 { nu as f64 * ln_u } else { 0.0 };
    shift + table[order].ln()
}

/// `S_{m1,m2}(x)`: with `x = β1 β2 c` this is `Pr(h1 h2 > c)` for independent
/// gamma gains of shapes `m1`, `m2`.
pub fn s_func(m1: u32, m2: u32, x: f64) -> Result<f64> {
    check_shape(m1, "s_func")?;
    check_shape(m2, "s_func")?;
    check_order(m1.max(m2), "s_func")?;
    check_nonneg(x, "s_func")?;
    if x == 0.0 {
        return Ok(1.0);
    }
    let z = 2.0 * x.sqrt();
    if z > ARG_UNDERFLOW {
        return Ok(0.0);
    }
    let nmax = m2.max(m1.saturating_sub(1 + m2));
    let table = scaled_t_table(x, nmax);
    let ln_x = x.ln();
    let ln_pref = std::f64::consts::LN_2 - ln_factorial(m2 - 1) - z;
    let terms: Vec<f64> = (0..m1)
        .map(|i| {
            let nu = m2 as i64 - i as i64;
            (ln_pref + i as f64 * ln_x - ln_factorial(i) + ln_bessel_factor(&table, nu, ln_x))
                .exp()
        })
        .collect();
    Ok(compensated_sum(terms))
}

/// `Φ(x1, x2)`: the probability-weighted tail product
/// `E[Q(m_SA, x1/y) Q(m_SR, x2/y)]` in closed form, where `Q` is the
/// regularized upper incomplete gamma and `y` is gamma distributed with shape
/// `m_AS` and rate `beta_as`.
pub fn phi_func(m_as: u32, m_sa: u32, m_sr: u32, beta_as: f64, x1: f64, x2: f64) -> Result<f64> {
    for m in [m_as, m_sa, m_sr] {
        check_shape(m, "phi_func")?;
    }
    if !(beta_as > 0.0) || !beta_as.is_finite() {
        return Err(Error::domain(format!("phi_func needs beta_as > 0, got {beta_as}")));
    }
    check_nonneg(x1, "phi_func")?;
    check_nonneg(x2, "phi_func")?;
    if x1 + x2 == 0.0 {
        return Err(Error::domain("phi_func needs x1 + x2 > 0"));
    }
    let u = (x1 + x2) * beta_as;
    let z = 2.0 * u.sqrt();
    if z > ARG_UNDERFLOW {
        return Ok(0.0);
    }
    let lowest = m_as as i64 - (m_sa as i64 - 1) - (m_sr as i64 - 1);
    let nmax = (m_as as i64).max(-lowest) as u32;
    check_order(nmax, "phi_func")?;
    let table = scaled_t_table(u, nmax);
    let ln_u = u.ln();
    let ln_bx1 = (beta_as * x1).ln();
    let ln_bx2 = (beta_as * x2).ln();
    let ln_pref = std::f64::consts::LN_2 - ln_factorial(m_as - 1) - z;

    let mut terms = Vec::with_capacity((m_sa * m_sr) as usize);
    for i in 0..m_sa {
        if i > 0 && x1 == 0.0 {
            break;
        }
        for j in 0..m_sr {
            if j > 0 && x2 == 0.0 {
                break;
            }
            let nu = m_as as i64 - i as i64 - j as i64;
            let mut ln_term = ln_pref - ln_factorial(i) - ln_factorial(j);
            if i > 0 {
                ln_term += i as f64 * ln_bx1;
            }
            if j > 0 {
                ln_term += j as f64 * ln_bx2;
            }
            ln_term += ln_bessel_factor(&table, nu, ln_u);
            terms.push(ln_term.exp());
        }
    }
    Ok(compensated_sum(terms))
}

/// Neumaier summation over terms sorted by ascending magnitude.
pub(crate) fn compensated_sum(mut terms: Vec<f64>) -> f64 {
    terms.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for t in terms {
        let s = sum + t;
        if sum.abs() >= t.abs() {
            comp += (sum - s) + t;
        } else {
            comp += (t - s) + sum;
        }
        sum = s;
    }
    sum + comp
}

fn check_shape(m: u32, what: &str) -> Result<()> {
    if m == 0 {
        return Err(Error::domain(format!("{what}: shape must be >= 1")));
    }
    Ok(())
}

fn check_order(n: u32, what: &str) -> Result<()> {
    if n > BESSEL_ORDER_MAX {
        return Err(Error::domain(format!(
            "{what}: Bessel order {n} exceeds {BESSEL_ORDER_MAX}"
        )));
    }
    Ok(())
}

fn check_nonneg(x: f64, what: &str) -> Result<()> {
    if !(x >= 0.0) {
        return Err(Error::domain(format!("{what}: argument must be >= 0, got {x}")));
    }
    Ok(())
}
