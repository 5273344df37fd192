//! Elementary number theory and careful real summation.
//!
//! The counting layer leans on three small tools: the Möbius function and
//! divisor enumeration (for inverting divisor sums), compensated summation
//! (so that long alternating accumulations do not lose digits), and a
//! truncated Riemann zeta with a certified tail (used when a summation
//! statistic is bounded against an integral comparison).

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Euler-Mascheroni constant, 20 digits.
pub const EULER_MASCHERONI: f64 = 0.577_215_664_901_532_9;

/// Neumaier variant of Kahan summation. Accumulates f64 values with a
/// running compensation term so that cancellation between large terms does
/// not destroy the small ones.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.comp += (self.sum - t) + value;
        } else {
            self.comp += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl std::iter::FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

/// Möbius function by trial division; mu(1) = 1, zero on non-squarefree
/// integers, otherwise (-1)^(number of prime factors).
pub fn mobius(n: u64) -> Result<i64> {
    if n == 0 {
        return Err(Error::NonPositive { op: "mobius" });
    }
    let mut m = n;
    let mut factors = 0u32;
    let mut p = 2u64;
    while p.saturating_mul(p) <= m {
        if m.is_multiple_of(p) {
            m /= p;
            if m.is_multiple_of(p) {
                return Ok(0);
            }
            factors += 1;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m > 1 {
        factors += 1;
    }
    Ok(if factors.is_multiple_of(2) { 1 } else { -1 })
}

/// Divisors of n in increasing order.
pub fn divisors(n: u64) -> Result<Vec<u64>> {
    if n == 0 {
        return Err(Error::NonPositive { op: "divisors" });
    }
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            let q = n / d;
            if q != d {
                large.push(q);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    Ok(small)
}

/// Harmonic number H(N) = sum_{n<=N} 1/n, compensated.
pub fn harmonic_sum(n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::NonPositive { op: "harmonic_sum" });
    }
    let mut acc = CompensatedSum::new();
    // Summing ascending keeps each added term comparable to the compensation.
    for k in 1..=n {
        acc.add(1.0 / k as f64);
    }
    Ok(acc.value())
}

/// Parameters for the truncated zeta evaluation.
#[derive(Debug, Clone, Copy)]
pub struct ZetaParams {
    /// Absolute tolerance the certified tail bound must meet.
    pub tol: f64,
    /// Hard cap on the number of explicitly summed terms.
    pub term_cap: u64,
    /// Minimal distance of Re(s) above 1 required for convergence.
    pub margin: f64,
}

impl Default for ZetaParams {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            term_cap: 50_000_000,
            // Below 1 + margin the required term count explodes; refuse early.
            margin: 0.05,
        }
    }
}

/// A zeta value together with the certified bound on its truncation error.
#[derive(Debug, Clone, Copy)]
pub struct ZetaValue {
    pub value: Complex64,
    /// Upper bound on |value - zeta(s)| from the integral tail estimate.
    pub certified_error: f64,
    pub terms_used: u64,
}

/// zeta(s) for Re(s) > 1, as the partial sum to N plus the integral tail
/// correction N^(1-s)/(s-1). The midpoint-style correction makes the residual
/// error O(N^-Re(s)), which is what the certificate reports. Real s yields an
/// exactly real value.
pub fn zeta(s: Complex64, params: ZetaParams) -> Result<ZetaValue> {
    if !s.is_finite() {
        return Err(Error::InvalidInput("zeta: s must be finite".into()));
    }
    let sigma = s.re;
    if sigma <= 1.0 + params.margin {
        return Err(Error::OutsideConvergenceRegion {
            re: sigma,
            margin: params.margin,
        });
    }
    // With the tail integral centred between integers, the residual is the
    // accumulated midpoint-rule error: per interval it is bounded by
    // |f''|/24 with f(x) = x^-s, so the total beyond N is at most
    //   |s (s+1)| / (24 (sigma+1)) * (N - 1/2)^-(sigma+1).
    let lead = (s * (s + 1.0)).norm() / (24.0 * (sigma + 1.0));
    let needed = (lead / params.tol).powf(1.0 / (sigma + 1.0)) + 0.5;
    if !needed.is_finite() || needed > params.term_cap as f64 {
        return Err(Error::ToleranceUnreachable {
            needed,
            cap: params.term_cap,
        });
    }
    let n = (needed.ceil() as u64).max(10);
    let mut acc_re = CompensatedSum::new();
    let mut acc_im = CompensatedSum::new();
    for k in 1..=n {
        let term = (-s * (k as f64).ln()).exp();
        acc_re.add(term.re);
        acc_im.add(term.im);
    }
    // Integral tail: integral_N^inf x^-s dx = N^(1-s)/(s-1), with the
    // half-term shift that centres the rectangle rule on each integer.
    let nf = n as f64;
    let tail = ((Complex64::new(1.0, 0.0) - s) * (nf + 0.5).ln()).exp() / (s - 1.0);
    let value = Complex64::new(acc_re.value(), acc_im.value()) + tail;
    let certified_error = lead * (nf - 0.5).powf(-(sigma + 1.0));
    Ok(ZetaValue {
        value,
        certified_error,
        terms_used: n,
    })
}

/// Inverts e(n) = sum_{d|n} g(d) via g(n) = sum_{d|n} mu(n/d) e(d), where the
/// table holds e(1..=len). Returns g for every index the table covers.
pub fn mobius_inversion(e: &[f64]) -> Result<Vec<f64>> {
    let mut g = Vec::with_capacity(e.len());
    for n in 1..=e.len() as u64 {
        let mut acc = CompensatedSum::new();
        for d in divisors(n)? {
            let mu = mobius(n / d)?;
            if mu != 0 {
                acc.add(mu as f64 * e[(d - 1) as usize]);
            }
        }
        g.push(acc.value());
    }
    Ok(g)
}

/// Forward divisor sum e(n) = sum_{d|n} g(d) for every n the table covers.
pub fn divisor_sum_transform(g: &[f64]) -> Result<Vec<f64>> {
    let mut e = Vec::with_capacity(g.len());
    for n in 1..=g.len() as u64 {
        let mut acc = CompensatedSum::new();
        for d in divisors(n)? {
            acc.add(g[(d - 1) as usize]);
        }
        e.push(acc.value());
    }
    Ok(e)
}
