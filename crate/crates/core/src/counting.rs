//! Orbit-counting tables and the weighted sums built on top of them.
//!
//! A [`CountTable`] holds, for `n = 1..=n_max`, three aligned sequences:
//!
//! * `E(n)` — the weighted count of all period-`n` points of the skew
//!   product (periodic points of every period dividing `n`, weighted by
//!   multiplicity and by `exp` of the ergodic potential sum),
//! * `D(n)` — the same sum restricted to points of prime period exactly `n`,
//! * `C(n) = D(n)/n` — the weighted count of closed orbits of length `n`.
//!
//! Tables come in two modes.  *Exact* tables hold big integers and exist
//! only for the zero potential, where `E(n) = (Σ_j r_j)^n + m^n` in terms of
//! the generator degrees `r_j`; `D` is then obtained by the subtraction
//! sieve over proper divisors.  *Numeric* tables hold floating-point values
//! produced by direct enumeration of periodic points.  Both modes expose a
//! common logarithmic view used by the asymptotic comparisons, so the
//! analysis layer never needs to care which mode produced a table.
//!
//! On top of the tables this module provides the classical summatory
//! objects: the cumulative orbit count `π(N)`, the Mertens-style sum
//! `Σ C(n)/λ^n`, the Meissel-style sum `Σ C(n)/(n^k λ^n)` with a certified
//! truncation tail, partial Dirichlet series on both sides of the
//! zeta-quotient identity, the power series `ρ(z) = Σ E(n) z^n / n`, and
//! log-linear growth-rate fits.

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::{CheckedSub, Pow, ToPrimitive, Zero};

use crate::dynamics::{Potential, SkewSystem};
use crate::error::{Error, Result};
use crate::numtheory::{divisors, mobius, zeta, CompensatedSum, ZetaParams, ZetaValue};

/// Relative agreement required between `D(n)` and `n·C(n)` when both are
/// computed independently from an enumeration (points vs. grouped orbits).
pub const COUNT_CONSISTENCY_TOL: f64 = 1e-9;

/// Head length of a Meissel structural evaluation: terms up to this index
/// are taken from the exact table; beyond it the two-term geometric form of
/// `C(n) λ₀^{-n}` is used and the neglected remainder enters the
/// certificate.
const MEISSEL_EXACT_HEAD: usize = 300;

/// Largest truncation index the Meissel tail search will attempt.
const MEISSEL_TRUNCATION_CAP: u64 = 20_000_000;

/// Number of leading bits of a big integer used for its logarithm.
const LN_MANTISSA_BITS: u64 = 53;

/// Natural logarithm of a positive big integer via its top 53 bits.
///
/// The value is exact to roughly `1e-15` relative error, which is far below
/// every tolerance used by the comparison layer.  Returns `-∞` for zero so
/// that `exp` of the result is still correct.
pub fn ln_biguint(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= LN_MANTISSA_BITS {
        return x.to_f64().expect("small big integer fits f64").ln();
    }
    let shift = bits - LN_MANTISSA_BITS;
    let top = (x >> shift).to_f64().expect("53-bit mantissa fits f64");
    top.ln() + (shift as f64) * std::f64::consts::LN_2
}

fn big_to_f64(x: &BigUint) -> f64 {
    x.to_f64().unwrap_or(f64::INFINITY)
}

/// Complex Neumaier accumulator: one compensated stream per component.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct ComplexSum {
    re: CompensatedSum,
    im: CompensatedSum,
}

impl ComplexSum {
    pub(crate) fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub(crate) fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// The two storage modes of a counting table.
#[derive(Debug, Clone)]
pub enum CountData {
    /// Big-integer counts (zero potential only).  All four vectors are
    /// aligned on `n = 1..=n_max`; `pi` is the running sum of `c`.
    Exact {
        e: Vec<BigUint>,
        d: Vec<BigUint>,
        c: Vec<BigUint>,
        pi: Vec<BigUint>,
    },
    /// Floating-point counts from direct enumeration.
    Numeric {
        e: Vec<f64>,
        d: Vec<f64>,
        c: Vec<f64>,
        pi: Vec<f64>,
    },
}

/// Aligned sequences `E`, `D`, `C`, `π` for `n = 1..=n_max`, plus a
/// logarithmic view shared by both storage modes.
#[derive(Debug, Clone)]
pub struct CountTable {
    data: CountData,
    ln_e: Vec<f64>,
    ln_d: Vec<f64>,
    ln_c: Vec<f64>,
    ln_pi: Vec<f64>,
    potential: String,
    system: String,
    lambda_hint: Option<f64>,
}

impl CountTable {
    /// Exact table for the zero potential from the generator degrees alone:
    /// `E(n) = (Σ_j r_j)^n + m^n`, `D` by the subtraction sieve,
    /// `C(n) = D(n)/n`.
    pub fn exact_zero(degrees: &[usize], n_max: usize) -> Result<CountTable> {
        if degrees.is_empty() {
            return Err(Error::InvalidInput(
                "exact table needs at least one generator degree".into(),
            ));
        }
        if degrees.contains(&0) {
            return Err(Error::InvalidInput(
                "generator degrees must be at least 1".into(),
            ));
        }
        if n_max == 0 {
            return Err(Error::NonPositive {
                op: "count table length",
            });
        }
        if n_max > 100_000 {
            return Err(Error::InvalidInput(format!(
                "exact table length {n_max} exceeds the supported 100000"
            )));
        }
        let degree_sum: usize = degrees.iter().sum();
        let lam0 = BigUint::from(degree_sum);
        let gens = BigUint::from(degrees.len());

        let mut e: Vec<BigUint> = Vec::with_capacity(n_max);
        let mut d: Vec<BigUint> = Vec::with_capacity(n_max);
        let mut c: Vec<BigUint> = Vec::with_capacity(n_max);
        let mut pi: Vec<BigUint> = Vec::with_capacity(n_max);
        for n in 1..=n_max {
            let en = Pow::pow(&lam0, n as u32) + Pow::pow(&gens, n as u32);
            let mut dn = en.clone();
            for dv in divisors(n as u64)? {
                let dv = dv as usize;
                if dv == n {
                    continue;
                }
                dn = dn.checked_sub(&d[dv - 1]).ok_or_else(|| {
                    Error::Internal(format!("prime-period sieve went negative at n = {n}"))
                })?;
            }
            let nn = BigUint::from(n);
            if !(&dn % &nn).is_zero() {
                return Err(Error::Internal(format!(
                    "prime-period count at n = {n} is not divisible by {n}"
                )));
            }
            let cn = &dn / &nn;
            let pin = match pi.last() {
                Some(prev) => prev + &cn,
                None => cn.clone(),
            };
            e.push(en);
            d.push(dn);
            c.push(cn);
            pi.push(pin);
        }

        let ln_e = e.iter().map(ln_biguint).collect();
        let ln_d = d.iter().map(ln_biguint).collect();
        let ln_c = c.iter().map(ln_biguint).collect();
        let ln_pi = pi.iter().map(ln_biguint).collect();
        Ok(CountTable {
            data: CountData::Exact { e, d, c, pi },
            ln_e,
            ln_d,
            ln_c,
            ln_pi,
            potential: "zero".into(),
            system: format!("degrees {degrees:?}"),
            lambda_hint: Some(degree_sum as f64),
        })
    }

    /// Numeric table by direct enumeration of periodic points of the skew
    /// product, weighted by `exp` of the ergodic sum of `f`.
    ///
    /// `E(n)` sums over all period-`n` points, `D(n)` over the prime-period
    /// subset, and `C(n)` over grouped closed orbits; `D(n) = n·C(n)` is
    /// verified to relative [`COUNT_CONSISTENCY_TOL`] as a cross-check of
    /// the orbit grouping.
    pub fn enumerate(system: &SkewSystem, f: &Potential, n_max: usize) -> Result<CountTable> {
        if n_max == 0 {
            return Err(Error::NonPositive {
                op: "count table length",
            });
        }
        let mut e: Vec<f64> = Vec::with_capacity(n_max);
        let mut d: Vec<f64> = Vec::with_capacity(n_max);
        let mut c: Vec<f64> = Vec::with_capacity(n_max);
        let mut pi: Vec<f64> = Vec::with_capacity(n_max);
        let mut pi_acc = CompensatedSum::new();
        for n in 1..=n_max {
            let points = system.periodic_points(f, n)?;
            let mut e_acc = CompensatedSum::new();
            let mut d_acc = CompensatedSum::new();
            for p in &points {
                // Every point carries the weight of the closed orbit through
                // it: the ergodic sum over its *prime* cycle. This orbit
                // weighting is what makes the divisor convolution
                // E(n) = Σ_{d|n} d·C(d) exact for every potential.
                let term = p.multiplicity as f64 * p.weight_exponent.exp();
                e_acc.add(term);
                if p.prime_period == n {
                    d_acc.add(term);
                }
            }
            let prime: Vec<_> = points.into_iter().filter(|p| p.prime_period == n).collect();
            let orbits = system.group_into_orbits(n, &prime)?;
            let mut c_acc = CompensatedSum::new();
            for orbit in &orbits {
                c_acc.add(orbit.multiplicity as f64 * orbit.weight_exponent.exp());
            }
            let (en, dn, cn) = (e_acc.value(), d_acc.value(), c_acc.value());
            let scale = dn.abs().max(1.0);
            if (dn - n as f64 * cn).abs() > COUNT_CONSISTENCY_TOL * scale {
                return Err(Error::Internal(format!(
                    "orbit grouping disagrees with prime-period sum at n = {n}: \
                     D = {dn}, n·C = {}",
                    n as f64 * cn
                )));
            }
            pi_acc.add(cn);
            e.push(en);
            d.push(dn);
            c.push(cn);
            pi.push(pi_acc.value());
        }

        let ln_of = |v: &[f64]| v.iter().map(|&x| x.ln()).collect::<Vec<f64>>();
        Ok(CountTable {
            ln_e: ln_of(&e),
            ln_d: ln_of(&d),
            ln_c: ln_of(&c),
            ln_pi: ln_of(&pi),
            data: CountData::Numeric { e, d, c, pi },
            potential: f.describe(),
            system: format!("degrees {:?}", system.degrees()),
            lambda_hint: None,
        })
    }

    /// Numeric table from caller-supplied sequences (for synthetic data and
    /// downstream tooling).  Requires equal lengths, finite values, and
    /// `D(n) = n·C(n)` to relative [`COUNT_CONSISTENCY_TOL`].
    pub fn from_numeric_parts(
        e: Vec<f64>,
        d: Vec<f64>,
        c: Vec<f64>,
        potential: impl Into<String>,
        system: impl Into<String>,
        lambda_hint: Option<f64>,
    ) -> Result<CountTable> {
        if e.is_empty() || e.len() != d.len() || e.len() != c.len() {
            return Err(Error::InvalidInput(format!(
                "count sequences must be non-empty and equally long \
                 (got {}, {}, {})",
                e.len(),
                d.len(),
                c.len()
            )));
        }
        for (name, v) in [("E", &e), ("D", &d), ("C", &c)] {
            if let Some(idx) = v.iter().position(|x| !x.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "{name}({}) is not finite",
                    idx + 1
                )));
            }
        }
        for (i, (&dn, &cn)) in d.iter().zip(&c).enumerate() {
            let n = (i + 1) as f64;
            if (dn - n * cn).abs() > COUNT_CONSISTENCY_TOL * dn.abs().max(1.0) {
                return Err(Error::InvalidInput(format!(
                    "D({0}) = {dn} disagrees with {0}·C({0}) = {1}",
                    i + 1,
                    n * cn
                )));
            }
        }
        let mut pi = Vec::with_capacity(c.len());
        let mut acc = CompensatedSum::new();
        for &cn in &c {
            acc.add(cn);
            pi.push(acc.value());
        }
        let ln_of = |v: &[f64]| v.iter().map(|&x| x.ln()).collect::<Vec<f64>>();
        Ok(CountTable {
            ln_e: ln_of(&e),
            ln_d: ln_of(&d),
            ln_c: ln_of(&c),
            ln_pi: ln_of(&pi),
            data: CountData::Numeric { e, d, c, pi },
            potential: potential.into(),
            system: system.into(),
            lambda_hint,
        })
    }

    /// Largest `n` the table covers.
    pub fn n_max(&self) -> usize {
        self.ln_e.len()
    }

    /// Whether the table stores exact big-integer counts.
    pub fn is_exact(&self) -> bool {
        matches!(self.data, CountData::Exact { .. })
    }

    /// `"exact"` or `"numeric"`, for report rows.
    pub fn mode_name(&self) -> &'static str {
        if self.is_exact() {
            "exact"
        } else {
            "numeric"
        }
    }

    /// Human-readable description of the potential the table was built with.
    pub fn potential(&self) -> &str {
        &self.potential
    }

    /// Human-readable description of the generating system.
    pub fn system(&self) -> &str {
        &self.system
    }

    /// Known growth rate, when the construction implies one (exact mode).
    pub fn lambda_hint(&self) -> Option<f64> {
        self.lambda_hint
    }

    fn check_n(&self, n: usize) -> Result<usize> {
        if n == 0 || n > self.n_max() {
            return Err(Error::MissingDivisorData(n));
        }
        Ok(n - 1)
    }

    /// `E(n)` as a float (converted from the big integer in exact mode).
    pub fn e_f64(&self, n: usize) -> Result<f64> {
        let i = self.check_n(n)?;
        Ok(match &self.data {
            CountData::Exact { e, .. } => big_to_f64(&e[i]),
            CountData::Numeric { e, .. } => e[i],
        })
    }

    /// `D(n)` as a float.
    pub fn d_f64(&self, n: usize) -> Result<f64> {
        let i = self.check_n(n)?;
        Ok(match &self.data {
            CountData::Exact { d, .. } => big_to_f64(&d[i]),
            CountData::Numeric { d, .. } => d[i],
        })
    }

    /// `C(n)` as a float.
    pub fn c_f64(&self, n: usize) -> Result<f64> {
        let i = self.check_n(n)?;
        Ok(match &self.data {
            CountData::Exact { c, .. } => big_to_f64(&c[i]),
            CountData::Numeric { c, .. } => c[i],
        })
    }

    /// `ln E(n)`.
    pub fn ln_e(&self, n: usize) -> Result<f64> {
        Ok(self.ln_e[self.check_n(n)?])
    }

    /// `ln D(n)`.
    pub fn ln_d(&self, n: usize) -> Result<f64> {
        Ok(self.ln_d[self.check_n(n)?])
    }

    /// `ln C(n)`.
    pub fn ln_c(&self, n: usize) -> Result<f64> {
        Ok(self.ln_c[self.check_n(n)?])
    }

    /// `ln π(N)`.
    pub fn ln_pi(&self, n: usize) -> Result<f64> {
        Ok(self.ln_pi[self.check_n(n)?])
    }

    /// Cumulative orbit count `π(N) = Σ_{n ≤ N} C(n)` as a float.
    /// `π(0) = 0`.
    pub fn pi_f64(&self, n: usize) -> Result<f64> {
        if n == 0 {
            return Ok(0.0);
        }
        let i = self.check_n(n)?;
        Ok(match &self.data {
            CountData::Exact { pi, .. } => big_to_f64(&pi[i]),
            CountData::Numeric { pi, .. } => pi[i],
        })
    }

    /// Exact cumulative orbit count; only available in exact mode.
    pub fn pi_big(&self, n: usize) -> Result<BigUint> {
        if n == 0 {
            return Ok(BigUint::zero());
        }
        let i = self.check_n(n)?;
        match &self.data {
            CountData::Exact { pi, .. } => Ok(pi[i].clone()),
            CountData::Numeric { .. } => Err(Error::InvalidInput(
                "exact cumulative count requested from a numeric table".into(),
            )),
        }
    }

    /// Exact `E(n)`; only available in exact mode.
    pub fn e_big(&self, n: usize) -> Result<&BigUint> {
        let i = self.check_n(n)?;
        match &self.data {
            CountData::Exact { e, .. } => Ok(&e[i]),
            CountData::Numeric { .. } => Err(Error::InvalidInput(
                "exact count requested from a numeric table".into(),
            )),
        }
    }

    /// Exact `C(n)`; only available in exact mode.
    pub fn c_big(&self, n: usize) -> Result<&BigUint> {
        let i = self.check_n(n)?;
        match &self.data {
            CountData::Exact { c, .. } => Ok(&c[i]),
            CountData::Numeric { .. } => Err(Error::InvalidInput(
                "exact count requested from a numeric table".into(),
            )),
        }
    }

    /// The row `(E, D, C)` rendered as decimal strings — exact digits in
    /// exact mode, shortest round-trip floats in numeric mode.
    pub fn row_strings(&self, n: usize) -> Result<(String, String, String)> {
        let i = self.check_n(n)?;
        Ok(match &self.data {
            CountData::Exact { e, d, c, .. } => {
                (e[i].to_string(), d[i].to_string(), c[i].to_string())
            }
            CountData::Numeric { e, d, c, .. } => (
                format!("{}", e[i]),
                format!("{}", d[i]),
                format!("{}", c[i]),
            ),
        })
    }
}

/// `C(n)` recovered from a prefix of `E` values by Möbius inversion over
/// the divisors of `n`: `C(n) = (1/n) Σ_{d|n} μ(n/d) E(d)`.
///
/// This is the independent route used to cross-check tables built by the
/// subtraction sieve or by orbit grouping.  Requires `E(d)` for every
/// divisor `d` of `n`; a missing entry is reported by index.
pub fn c_mobius_f64(e: &[f64], n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::NonPositive {
            op: "Möbius inversion index",
        });
    }
    let mut acc = CompensatedSum::new();
    for d in divisors(n as u64)? {
        let d = d as usize;
        if d > e.len() {
            return Err(Error::MissingDivisorData(d));
        }
        let mu = mobius((n / d) as u64)? as f64;
        acc.add(mu * e[d - 1]);
    }
    Ok(acc.value() / n as f64)
}

/// Exact Möbius-inversion route: `C(n)` from big-integer `E` values.
///
/// Positive and negative Möbius contributions are accumulated separately;
/// a negative difference or a non-divisible result would contradict the
/// orbit-partition identity and is reported as an internal error.
pub fn c_mobius_exact(e: &[BigUint], n: usize) -> Result<BigUint> {
    if n == 0 {
        return Err(Error::NonPositive {
            op: "Möbius inversion index",
        });
    }
    let mut pos = BigUint::zero();
    let mut neg = BigUint::zero();
    for d in divisors(n as u64)? {
        let d = d as usize;
        if d > e.len() {
            return Err(Error::MissingDivisorData(d));
        }
        match mobius((n / d) as u64)? {
            1 => pos += &e[d - 1],
            -1 => neg += &e[d - 1],
            _ => {}
        }
    }
    let diff = pos
        .checked_sub(&neg)
        .ok_or_else(|| Error::Internal(format!("Möbius inversion went negative at n = {n}")))?;
    let nn = BigUint::from(n);
    if !(&diff % &nn).is_zero() {
        return Err(Error::Internal(format!(
            "Möbius inversion at n = {n} is not divisible by {n}"
        )));
    }
    Ok(diff / nn)
}

/// Möbius-inversion route applied to a table (float result in both modes).
pub fn c_mobius(table: &CountTable, n: usize) -> Result<f64> {
    match &table.data {
        CountData::Exact { e, .. } => {
            let c = c_mobius_exact(e, n)?;
            Ok(big_to_f64(&c))
        }
        CountData::Numeric { e, .. } => c_mobius_f64(e, n),
    }
}

/// Mertens-style partial sum `Σ_{n ≤ N} C(n) / λ^n`.
///
/// Terms are formed in log space (`exp(ln C(n) − n ln λ)`), so the sum is
/// overflow-free even when the raw counts exceed the float range.
pub fn mertens_sum(table: &CountTable, lambda: f64, n_terms: usize) -> Result<f64> {
    if !(lambda > 1.0) {
        return Err(Error::LambdaNotAboveOne { lambda });
    }
    if n_terms > table.n_max() {
        return Err(Error::MissingDivisorData(n_terms));
    }
    let ln_lambda = lambda.ln();
    let mut acc = CompensatedSum::new();
    for n in 1..=n_terms {
        acc.add((table.ln_c(n)? - n as f64 * ln_lambda).exp());
    }
    Ok(acc.value())
}

/// A Meissel-style sum together with its truncation certificate.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct MeisselValue {
    /// The computed value of `Σ_{n ≥ 1} C(n) / (n^k λ^n)`.
    pub value: f64,
    /// Index at which the series was truncated.
    pub truncation_n: u64,
    /// Certified bound on everything the truncation dropped or approximated.
    pub certified_tail: f64,
}

/// Where a Meissel evaluation takes its coefficients from.
#[derive(Debug, Clone, Copy)]
pub enum MeisselSource<'a> {
    /// Zero-potential system given by its generator degrees; coefficients
    /// follow the exact two-term law and the tail can be certified to any
    /// reasonable tolerance.
    Structural { degrees: &'a [usize] },
    /// An existing table with an explicit growth rate; the tail certificate
    /// is the crude `max_n E(n)/λ^n` envelope and tight tolerances are
    /// honestly refused.
    Table { table: &'a CountTable, lambda: f64 },
}

/// Evaluates `Σ_{n ≥ 1} C(n) / (n^k λ^n)` with a certified truncation tail.
///
/// For a structural source the series decomposes as
/// `C(n)/λ₀^n = (1 + (m/λ₀)^n + ρ_n)/n` with `|ρ_n| ≤ 2λ₀/(λ₀−1) · λ₀^{-n/2}`
/// (from the divisor corrections of the sieve), so the evaluation uses the
/// exact table for a head, the two-term form for the middle range, a
/// midpoint-rule integral for the principal tail, and folds every neglected
/// piece into `certified_tail`.  The truncation index grows until the
/// certificate meets `tail_tol` or the cap is hit, in which case the error
/// names the best bound achieved.
pub fn meissel_sum(source: MeisselSource<'_>, k: f64, tail_tol: f64) -> Result<MeisselValue> {
    if !(k > 0.0) {
        return Err(Error::NonPositive {
            op: "Meissel exponent",
        });
    }
    if !(tail_tol > 0.0) {
        return Err(Error::NonPositive {
            op: "Meissel tail tolerance",
        });
    }
    match source {
        MeisselSource::Structural { degrees } => meissel_structural(degrees, k, tail_tol),
        MeisselSource::Table { table, lambda } => meissel_table(table, lambda, k, tail_tol),
    }
}

fn meissel_structural(degrees: &[usize], k: f64, tail_tol: f64) -> Result<MeisselValue> {
    if degrees.is_empty() || degrees.contains(&0) {
        return Err(Error::InvalidInput(
            "structural Meissel source needs degrees of at least 1".into(),
        ));
    }
    let lam0 = degrees.iter().sum::<usize>() as f64;
    if !(lam0 > 1.0) {
        return Err(Error::LambdaNotAboveOne { lambda: lam0 });
    }
    let gens = degrees.len() as f64;
    let ratio = gens / lam0;
    // When m = λ₀ the secondary geometric series coincides with the
    // principal one; fold it in rather than leaving a ratio-1 "geometric"
    // tail that has no closed form.
    let principal_coeff: f64 = if ratio == 1.0 { 2.0 } else { 1.0 };

    // Bound on Σ_{n > a} |ρ_n| / n^{k+1} given |ρ_n| ≤ ρ_lead · λ₀^{-n/2}.
    let rho_lead = 2.0 * lam0 / (lam0 - 1.0);
    let rho_tail = |a: u64| -> f64 {
        let q = lam0.powf(-0.5);
        rho_lead * q.powf(a as f64 + 1.0) / (1.0 - q) / (a as f64).powf(k + 1.0)
    };
    // Bound on the geometric series Σ_{n > a} ratio^n / n^{k+1} (ratio < 1).
    let geo_tail = |a: u64| -> f64 {
        if ratio == 1.0 {
            0.0
        } else {
            ratio.powf(a as f64 + 1.0) / (1.0 - ratio) / (a as f64).powf(k + 1.0)
        }
    };
    // Midpoint-rule bracket for Σ_{n > a} 1/n^{k+1} against ∫ x^{-(k+1)} dx:
    // the error of the midpoint correction is below a^{-(k+1)}/2 per unit
    // coefficient.
    let midpoint_err = |a: u64| -> f64 { principal_coeff * 0.5 * (a as f64).powf(-(k + 1.0)) };

    let certificate = |a: u64| -> f64 { midpoint_err(a) + geo_tail(a) + rho_tail(a) };

    // The middle range replaces exact coefficients with the two-term law;
    // the ρ contributions dropped there are certified from the head index.
    let head_n = MEISSEL_EXACT_HEAD as u64;

    let mut trunc: u64 = 8;
    loop {
        let cert = certificate(trunc)
            + if trunc > head_n {
                rho_tail(head_n)
            } else {
                0.0
            };
        if cert <= tail_tol {
            break;
        }
        if trunc >= MEISSEL_TRUNCATION_CAP {
            return Err(Error::TailNotCertifiable {
                bound: cert,
                tol: tail_tol,
                n: trunc as usize,
            });
        }
        trunc = (trunc * 2).min(MEISSEL_TRUNCATION_CAP);
    }

    let head_len = (trunc as usize).min(MEISSEL_EXACT_HEAD);
    let table = CountTable::exact_zero(degrees, head_len)?;
    let ln_lam = lam0.ln();
    let mut acc = CompensatedSum::new();
    for n in 1..=head_len {
        acc.add((table.ln_c(n)? - n as f64 * ln_lam - k * (n as f64).ln()).exp());
    }
    // Middle range: two-term law, with the geometric factor accumulated
    // multiplicatively and dropped once it underflows.
    let mut ratio_pow = if ratio == 1.0 {
        0.0
    } else {
        ratio.powi(head_len as i32)
    };
    for n in (head_len as u64 + 1)..=trunc {
        let inv = (n as f64).powf(-(k + 1.0));
        ratio_pow *= ratio;
        acc.add((principal_coeff + ratio_pow) * inv);
        if ratio_pow < 1e-300 {
            ratio_pow = 0.0;
        }
    }
    // Midpoint integral correction for the principal tail:
    // Σ_{n > N} n^{-(k+1)} ≈ (I(N) + I(N+1))/2 with I(a) = a^{-k}/k.
    let integral = |a: f64| a.powf(-k) / k;
    acc.add(principal_coeff * 0.5 * (integral(trunc as f64) + integral(trunc as f64 + 1.0)));

    let final_cert = certificate(trunc)
        + if trunc > head_n {
            rho_tail(head_n)
        } else {
            0.0
        };
    Ok(MeisselValue {
        value: acc.value(),
        truncation_n: trunc,
        certified_tail: final_cert,
    })
}

fn meissel_table(table: &CountTable, lambda: f64, k: f64, tail_tol: f64) -> Result<MeisselValue> {
    if !(lambda > 1.0) {
        return Err(Error::LambdaNotAboveOne { lambda });
    }
    let n_max = table.n_max();
    // Envelope constant: max over the table of E(n)/λ^n, which dominates
    // C(n)/λ^n term by term.
    let ln_lam = lambda.ln();
    let mut kappa2 = 0.0_f64;
    for n in 1..=n_max {
        kappa2 = kappa2.max((table.ln_e(n)? - n as f64 * ln_lam).exp());
    }
    let cert = kappa2 * (n_max as f64).powf(-k) / k;
    if cert > tail_tol {
        return Err(Error::TailNotCertifiable {
            bound: cert,
            tol: tail_tol,
            n: n_max,
        });
    }
    let mut acc = CompensatedSum::new();
    for n in 1..=n_max {
        acc.add((table.ln_c(n)? - n as f64 * ln_lam - k * (n as f64).ln()).exp());
    }
    Ok(MeisselValue {
        value: acc.value(),
        truncation_n: n_max as u64,
        certified_tail: cert,
    })
}

/// Agreement report for the divisor-convolution identity
/// `E(n) = Σ_{d|n} d·C(d)`.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct ConvolutionCheck {
    /// Largest index checked.
    pub up_to: usize,
    /// Whether every comparison was made in exact integers.
    pub exact: bool,
    /// Worst relative deviation seen (0 in exact mode when all rows match).
    pub max_rel_dev: f64,
}

/// Verifies `E(n) = Σ_{d|n} d·C(d)` for every `n ≤ up_to`.
pub fn convolution_check(table: &CountTable, up_to: usize) -> Result<ConvolutionCheck> {
    if up_to == 0 || up_to > table.n_max() {
        return Err(Error::MissingDivisorData(up_to));
    }
    match &table.data {
        CountData::Exact { e, c, .. } => {
            let mut max_rel_dev = 0.0_f64;
            for n in 1..=up_to {
                let mut rhs = BigUint::zero();
                for d in divisors(n as u64)? {
                    let d = d as usize;
                    rhs += &c[d - 1] * BigUint::from(d);
                }
                if rhs != e[n - 1] {
                    let lhs_f = big_to_f64(&e[n - 1]);
                    let rhs_f = big_to_f64(&rhs);
                    let rel = (lhs_f - rhs_f).abs() / lhs_f.abs().max(1.0);
                    max_rel_dev = max_rel_dev.max(rel.max(f64::MIN_POSITIVE));
                }
            }
            Ok(ConvolutionCheck {
                up_to,
                exact: true,
                max_rel_dev,
            })
        }
        CountData::Numeric { e, c, .. } => {
            let mut max_rel_dev = 0.0_f64;
            for n in 1..=up_to {
                let mut acc = CompensatedSum::new();
                for d in divisors(n as u64)? {
                    let d = d as usize;
                    acc.add(d as f64 * c[d - 1]);
                }
                let rel = (acc.value() - e[n - 1]).abs() / e[n - 1].abs().max(1.0);
                max_rel_dev = max_rel_dev.max(rel);
            }
            Ok(ConvolutionCheck {
                up_to,
                exact: false,
                max_rel_dev,
            })
        }
    }
}

/// Matched-truncation partial sums of the Dirichlet-series identity
/// `Σ C(n)/n^s  ≍  (1/ζ(s)) Σ λ^n / n^{s+1}`.
#[derive(Debug, Clone, serde::Serialize)]
pub struct DirichletPartial {
    /// Evaluation point (`Re s > 1` enforced by the zeta evaluation).
    pub s: Complex64,
    /// Truncation used on both sides.
    pub n_used: usize,
    /// Left side `Σ_{n ≤ N} C(n) / n^s`.
    pub lhs: Complex64,
    /// Right side `(1/ζ(s)) Σ_{n ≤ N} λ^n / n^{s+1}`.
    pub rhs: Complex64,
    /// The zeta value used for the right side.
    pub zeta_value: Complex64,
    /// Certified error of that zeta value.
    pub zeta_certified_error: f64,
    /// Divisor-convolution agreement over the same range.
    pub convolution: ConvolutionCheck,
}

/// Evaluates both sides of the Dirichlet identity at `s`, truncated at the
/// same index, together with the convolution check that underlies it.
pub fn dirichlet_partial(
    table: &CountTable,
    lambda: f64,
    s: Complex64,
    n_terms: usize,
    zeta_params: ZetaParams,
) -> Result<DirichletPartial> {
    if !(lambda > 1.0) {
        return Err(Error::LambdaNotAboveOne { lambda });
    }
    if n_terms == 0 || n_terms > table.n_max() {
        return Err(Error::MissingDivisorData(n_terms));
    }
    let ZetaValue {
        value: zeta_value,
        certified_error,
        ..
    } = zeta(s, zeta_params)?;

    let ln_lam = lambda.ln();
    let mut lhs = ComplexSum::default();
    let mut rhs = ComplexSum::default();
    for n in 1..=n_terms {
        let ln_n = (n as f64).ln();
        let lhs_mag = table.ln_c(n)? - s.re * ln_n;
        let rhs_mag = n as f64 * ln_lam - (s.re + 1.0) * ln_n;
        for mag in [lhs_mag, rhs_mag] {
            if mag > 700.0 {
                return Err(Error::Overflow("Dirichlet partial-sum term"));
            }
        }
        let phase = -s.im * ln_n;
        lhs.add(Complex64::from_polar(lhs_mag.exp(), phase));
        rhs.add(Complex64::from_polar(rhs_mag.exp(), phase));
    }
    let convolution = convolution_check(table, n_terms)?;
    Ok(DirichletPartial {
        s,
        n_used: n_terms,
        lhs: lhs.value(),
        rhs: rhs.value() / zeta_value,
        zeta_value,
        zeta_certified_error: certified_error,
        convolution,
    })
}

/// Partial sum of the weighted power series `ρ(z) = Σ_{n ≥ 1} E(n) z^n / n`.
///
/// Refuses points with `|z|·λ̂ ≥ 0.99`, where the truncation cannot be
/// meaningful; inside that disc terms decay geometrically and the partial
/// sum to `n_terms` is returned.
pub fn rho_series(
    table: &CountTable,
    lambda_hat: f64,
    z: Complex64,
    n_terms: usize,
) -> Result<Complex64> {
    if !(lambda_hat > 0.0) {
        return Err(Error::NonPositive {
            op: "growth-rate estimate",
        });
    }
    if n_terms == 0 || n_terms > table.n_max() {
        return Err(Error::MissingDivisorData(n_terms));
    }
    let product = z.norm() * lambda_hat;
    if product >= 0.99 {
        return Err(Error::OutsideRadius { product });
    }
    if z.norm() == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let ln_abs_z = z.norm().ln();
    let arg_z = z.arg();
    let mut acc = ComplexSum::default();
    for n in 1..=n_terms {
        let mag = table.ln_e(n)? + n as f64 * ln_abs_z - (n as f64).ln();
        if mag > 700.0 {
            return Err(Error::Overflow("power-series term"));
        }
        acc.add(Complex64::from_polar(mag.exp(), n as f64 * arg_z));
    }
    Ok(acc.value())
}

/// A log-linear growth fit `ln E(n) ≈ intercept + n·ln λ`.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct LambdaEstimate {
    /// `exp(slope)` — the estimated growth rate.
    pub lambda: f64,
    /// Fitted intercept.
    pub intercept: f64,
    /// Root-mean-square residual of the fit in log space.
    pub rms_residual: f64,
}

fn fit_ln_e(table: &CountTable, lo: usize, hi: usize) -> Result<(f64, f64, f64)> {
    if lo == 0 || hi > table.n_max() || hi < lo {
        return Err(Error::InvalidInput(format!(
            "fit window [{lo}, {hi}] is not inside [1, {}]",
            table.n_max()
        )));
    }
    let len = hi - lo + 1;
    if len < 4 {
        return Err(Error::WindowTooShort { len, min: 4 });
    }
    let mut xs = Vec::with_capacity(len);
    let mut ys = Vec::with_capacity(len);
    for n in lo..=hi {
        let y = table.ln_e(n)?;
        if !y.is_finite() {
            return Err(Error::NonpositiveComparator {
                index: n,
                value: table.e_f64(n)?,
            });
        }
        xs.push(n as f64);
        ys.push(y);
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (mx, my) = (mean(&xs), mean(&ys));
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in xs.iter().zip(&ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let mut ss = 0.0;
    for (&x, &y) in xs.iter().zip(&ys) {
        let r = y - (intercept + slope * x);
        ss += r * r;
    }
    Ok((slope, intercept, (ss / len as f64).sqrt()))
}

/// Least-squares fit of `ln E(n)` over `n ∈ [lo, hi]`, returned as a growth
/// rate.  Fails as "implausible" when the fitted rate is not above 1 or the
/// residual exceeds `residual_ceiling` — the data then does not look like a
/// single-exponential census and downstream comparisons would be
/// meaningless.
pub fn lambda_estimate(
    table: &CountTable,
    lo: usize,
    hi: usize,
    residual_ceiling: f64,
) -> Result<LambdaEstimate> {
    let (slope, intercept, rms_residual) = fit_ln_e(table, lo, hi)?;
    let lambda = slope.exp();
    if lambda <= 1.0 + 1e-9 {
        return Err(Error::HypothesisImplausible(format!(
            "fitted growth rate {lambda:.9} is not above 1"
        )));
    }
    if rms_residual > residual_ceiling {
        return Err(Error::HypothesisImplausible(format!(
            "log-linear fit residual {rms_residual:.3e} exceeds ceiling {residual_ceiling:.3e}"
        )));
    }
    Ok(LambdaEstimate {
        lambda,
        intercept,
        rms_residual,
    })
}

/// Convergence-radius estimate for [`rho_series`]: `exp(−slope)` of the
/// log-linear fit of `E(n)` over the window.
pub fn radius_estimate(table: &CountTable, lo: usize, hi: usize) -> Result<f64> {
    let (slope, _, _) = fit_ln_e(table, lo, hi)?;
    Ok((-slope).exp())
}
