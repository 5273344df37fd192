//! Rational maps on the Riemann sphere.
//!
//! A map is a pair of complex polynomials P/Q with degree d = max(deg P,
//! deg Q). Everything the dynamics layer needs lives here: evaluation with
//! correct chart handling at infinity and at poles, composition (the degree
//! multiplies exactly or the operation fails loudly), derivatives for
//! multiplier computation, and the fixed-point polynomial P(z) - z Q(z)
//! whose roots are the finite fixed points.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dd::{CDd, Coeff};
use crate::error::{Error, Result};
use crate::poly::{add_assign_slices, mul_slices, ComplexPoly, RootFindParams};

/// Scaled-magnitude threshold below which an evaluated polynomial counts as
/// vanished. Well above roundoff for the normalised coefficients used here,
/// well below any honest nonzero value.
pub const EVAL_EPS: f64 = 1e-12;

/// Relative trim threshold for coefficients after composition. Coefficients
/// this far under the largest one are cancellation noise, not structure.
pub const COMPOSE_TRIM_EPS: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A point of the Riemann sphere: a finite complex number or infinity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SpherePoint {
    Finite(Complex64),
    Infinity,
}

impl SpherePoint {
    /// Validated constructor; rejects NaN and overflowed components.
    pub fn finite(z: Complex64) -> Result<Self> {
        if z.is_finite() {
            Ok(SpherePoint::Finite(z))
        } else {
            Err(Error::InvalidInput(format!(
                "sphere point must have finite coordinates, got {z}"
            )))
        }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, SpherePoint::Infinity)
    }

    /// Sort key placing finite points lexicographically by (re, im) and
    /// infinity last; the basis for canonical representatives.
    pub fn sort_key(&self) -> (u8, f64, f64) {
        match self {
            SpherePoint::Finite(z) => (0, z.re, z.im),
            SpherePoint::Infinity => (1, 0.0, 0.0),
        }
    }
}

impl std::fmt::Display for SpherePoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SpherePoint::Finite(z) => write!(f, "{}{:+}i", z.re, z.im),
            SpherePoint::Infinity => write!(f, "inf"),
        }
    }
}

/// Chordal (spherical) distance: 2|z-w| / (sqrt(1+|z|^2) sqrt(1+|w|^2)),
/// extended by continuity to infinity. Both points far outside the unit
/// disc are compared in the inverted chart, so nothing overflows.
pub fn chordal_distance(a: SpherePoint, b: SpherePoint) -> f64 {
    match (a, b) {
        (SpherePoint::Infinity, SpherePoint::Infinity) => 0.0,
        (SpherePoint::Finite(z), SpherePoint::Infinity)
        | (SpherePoint::Infinity, SpherePoint::Finite(z)) => 2.0 / 1.0f64.hypot(z.norm()),
        (SpherePoint::Finite(z), SpherePoint::Finite(w)) => {
            let nz = z.norm();
            let nw = w.norm();
            if nz > 1.0 && nw > 1.0 {
                // d(z, w) = d(1/z, 1/w): the chordal metric is inversion
                // invariant, and the inverted coordinates are small.
                let iz = Complex64::new(1.0, 0.0) / z;
                let iw = Complex64::new(1.0, 0.0) / w;
                2.0 * (iz - iw).norm() / (1.0f64.hypot(iz.norm()) * 1.0f64.hypot(iw.norm()))
            } else {
                2.0 * (z - w).norm() / (1.0f64.hypot(nz) * 1.0f64.hypot(nw))
            }
        }
    }
}

/// Coefficient precision for composition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    #[default]
    Standard,
    /// Compose through double-double coefficients once the result degree
    /// exceeds 512, where repeated f64 convolution starts shedding digits.
    Extended,
}

/// A rational map P/Q on the sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalMap {
    numerator: ComplexPoly,
    denominator: ComplexPoly,
    degree: usize,
}

impl RationalMap {
    /// Validated constructor: requires nonzero numerator and denominator,
    /// degree at least 1, and numerical coprimality (no root of Q within
    /// clustering tolerance of a root of P).
    pub fn new(numerator: ComplexPoly, denominator: ComplexPoly) -> Result<Self> {
        if numerator.is_zero() {
            return Err(Error::InvalidMap(
                "numerator is identically zero (constant map)".into(),
            ));
        }
        if denominator.is_zero() {
            return Err(Error::InvalidMap("denominator is identically zero".into()));
        }
        let degree = numerator.degree().max(denominator.degree());
        if degree == 0 {
            return Err(Error::InvalidMap(
                "both polynomials constant: map degree must be at least 1".into(),
            ));
        }
        if numerator.degree() >= 1 && denominator.degree() >= 1 {
            let params = RootFindParams::default();
            let p_roots = numerator.roots(&params)?;
            let q_roots = denominator.roots(&params)?;
            for qr in &q_roots {
                for pr in &p_roots {
                    let dist = (pr.value - qr.value).norm();
                    if dist <= params.cluster_tol * qr.value.norm().max(1.0) {
                        return Err(Error::CommonRoot {
                            re: qr.value.re,
                            im: qr.value.im,
                            distance: dist,
                        });
                    }
                }
            }
        }
        Ok(RationalMap {
            numerator,
            denominator,
            degree,
        })
    }

    /// Constructor for internally produced maps (compositions of validated
    /// maps), where the coprimality root-finding check would be wasted work.
    pub fn new_unchecked(numerator: ComplexPoly, denominator: ComplexPoly) -> Self {
        let degree = numerator.degree().max(denominator.degree());
        RationalMap {
            numerator,
            denominator,
            degree,
        }
    }

    /// Convenience: polynomial map with real coefficients, denominator 1.
    pub fn polynomial(coeffs: &[f64]) -> Result<Self> {
        RationalMap::new(
            ComplexPoly::from_real(coeffs),
            ComplexPoly::constant(Complex64::new(1.0, 0.0)),
        )
    }

    pub fn numerator(&self) -> &ComplexPoly {
        &self.numerator
    }

    pub fn denominator(&self) -> &ComplexPoly {
        &self.denominator
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// R(p) with chart handling: at infinity the degrees decide; at a finite
    /// pole the value is infinity; simultaneous vanishing is an error
    /// (unreachable for genuinely coprime P, Q).
    pub fn eval_sphere(&self, p: SpherePoint) -> Result<SpherePoint> {
        let z = match p {
            SpherePoint::Infinity => {
                let dp = self.numerator.degree();
                let dq = self.denominator.degree();
                return Ok(match dp.cmp(&dq) {
                    std::cmp::Ordering::Greater => SpherePoint::Infinity,
                    std::cmp::Ordering::Less => SpherePoint::Finite(ZERO),
                    std::cmp::Ordering::Equal => {
                        SpherePoint::Finite(self.numerator.coeff(dp) / self.denominator.coeff(dq))
                    }
                });
            }
            SpherePoint::Finite(z) => z,
        };

        let np = self.numerator.norm1();
        let nq = self.denominator.norm1();
        if z.norm() <= 1.0 {
            let pv = self.numerator.eval(z);
            let qv = self.denominator.eval(z);
            let sp = pv.norm() / np;
            let sq = qv.norm() / nq;
            if sp < EVAL_EPS && sq < EVAL_EPS {
                return Err(Error::IndeterminateEvaluation { at: p.to_string() });
            }
            if sq < EVAL_EPS {
                return Ok(SpherePoint::Infinity);
            }
            Ok(SpherePoint::Finite(pv / qv))
        } else {
            // Reversed-polynomial evaluation at w = 1/z keeps Horner bounded
            // at any degree: P(z)/Q(z) = z^(dp-dq) * Pr(w)/Qr(w).
            let w = Complex64::new(1.0, 0.0) / z;
            let dp = self.numerator.degree();
            let dq = self.denominator.degree();
            let rev = |c: &ComplexPoly| {
                let mut v: Vec<Complex64> = c.coeffs().to_vec();
                v.reverse();
                ComplexPoly::new(v)
            };
            let pv = rev(&self.numerator).eval(w);
            let qv = rev(&self.denominator).eval(w);
            let sp = pv.norm() / np;
            let sq = qv.norm() / nq;
            if sp < EVAL_EPS && sq < EVAL_EPS {
                return Err(Error::IndeterminateEvaluation { at: p.to_string() });
            }
            if sq < EVAL_EPS {
                return Ok(SpherePoint::Infinity);
            }
            // Decide overflow folding in log magnitude so z^(dp-dq) is never
            // formed blindly.
            let ln_scale = (dp as f64 - dq as f64) * z.norm().ln();
            let ln_mag = ln_scale + pv.norm().ln() - qv.norm().ln();
            if ln_mag > 700.0 {
                // Beyond representable range: chordally indistinguishable
                // from infinity (distance under 1e-300).
                return Ok(SpherePoint::Infinity);
            }
            if ln_mag < -740.0 {
                return Ok(SpherePoint::Finite(ZERO));
            }
            let value = if ln_scale.abs() <= 690.0 {
                // The scale factor itself is representable: an exact integer
                // power by repeated squaring keeps the result within a few
                // ulps, where the polar assembly below would lose ~1e-13
                // relative at these magnitudes.
                let mut acc = Complex64::new(1.0, 0.0);
                let mut base = if dp >= dq { z } else { w };
                let mut e = dp.abs_diff(dq);
                while e > 0 {
                    if e & 1 == 1 {
                        acc *= base;
                    }
                    e >>= 1;
                    if e > 0 {
                        base *= base;
                    }
                }
                acc * (pv / qv)
            } else {
                let phase = (dp as f64 - dq as f64) * z.arg() + pv.arg() - qv.arg();
                Complex64::from_polar(ln_mag.exp(), phase)
            };
            Ok(SpherePoint::Finite(value))
        }
    }

    /// Derivative as an unreduced pair (P'Q - PQ', Q^2).
    pub fn derivative(&self) -> (ComplexPoly, ComplexPoly) {
        let dp = self.numerator.derivative();
        let dq = self.denominator.derivative();
        let num = dp.mul(&self.denominator).sub(&self.numerator.mul(&dq));
        let den = self.denominator.mul(&self.denominator);
        (num, den)
    }

    /// R'(z) at a finite non-pole point.
    pub fn derivative_at(&self, z: Complex64) -> Result<Complex64> {
        let (num, den) = self.derivative();
        let dv = den.eval(z);
        if dv.norm() / den.norm1().max(f64::MIN_POSITIVE) < EVAL_EPS {
            return Err(Error::MultiplierUndefined(format!(
                "derivative denominator vanishes at {z} (pole)"
            )));
        }
        Ok(num.eval(z) / dv)
    }

    /// Fixed-point polynomial F(z) = P(z) - z Q(z), plus the multiplicity of
    /// infinity as a fixed point: m_inf = (d+1) - deg F. The two always add
    /// to d+1, the total fixed-point count with multiplicity.
    pub fn fixed_point_polynomial(&self) -> Result<(ComplexPoly, usize)> {
        let zq = self
            .denominator
            .mul(&ComplexPoly::monomial(Complex64::new(1.0, 0.0), 1));
        let f = self.numerator.sub(&zq).trim_relative(COMPOSE_TRIM_EPS);
        if f.is_zero() {
            return Err(Error::TotalDegeneration);
        }
        let m_inf = (self.degree + 1).checked_sub(f.degree()).ok_or_else(|| {
            Error::Internal(format!(
                "fixed-point polynomial degree {} exceeds d+1 = {}",
                f.degree(),
                self.degree + 1
            ))
        })?;
        Ok((f, m_inf))
    }

    /// outer(inner(z)) with degree exactly deg(outer) * deg(inner) and
    /// coefficients jointly normalised to unit max magnitude. Extended
    /// precision reroutes the coefficient arithmetic through double-doubles
    /// once the result degree passes 512.
    pub fn compose(outer: &RationalMap, inner: &RationalMap, precision: Precision) -> Result<Self> {
        let expected = outer.degree * inner.degree;
        let (num, den) = if precision == Precision::Extended && expected > 512 {
            compose_coeffs::<CDd>(outer, inner)
        } else {
            compose_coeffs::<Complex64>(outer, inner)
        };
        let num = ComplexPoly::new(num).trim_relative(COMPOSE_TRIM_EPS);
        let den = ComplexPoly::new(den).trim_relative(COMPOSE_TRIM_EPS);
        if num.is_zero() || den.is_zero() {
            return Err(Error::DegenerateComposition { expected });
        }
        let got = num.degree().max(den.degree());
        if got != expected {
            return Err(Error::DegenerateComposition { expected });
        }
        Ok(RationalMap::new_unchecked(num, den))
    }
}

/// Homogenised Horner: with outer = sum p_i z^i / sum q_i z^i of degree m
/// and inner = N/D, the composition is sum p_i N^i D^(m-i) over the same
/// for q. Both accumulate in the coefficient ring T, then normalise jointly
/// (so the num/den ratio is preserved) and round to f64.
fn compose_coeffs<T: Coeff>(
    outer: &RationalMap,
    inner: &RationalMap,
) -> (Vec<Complex64>, Vec<Complex64>) {
    let m = outer.degree;
    let lift = |p: &ComplexPoly| -> Vec<T> { p.coeffs().iter().map(|&c| T::from_c64(c)).collect() };
    let n_in = lift(inner.numerator());
    let d_in = lift(inner.denominator());
    let po = outer.numerator();
    let qo = outer.denominator();

    let mut acc_p: Vec<T> = vec![T::from_c64(po.coeff(m))];
    let mut acc_q: Vec<T> = vec![T::from_c64(qo.coeff(m))];
    let mut dpow: Vec<T> = vec![T::from_c64(Complex64::new(1.0, 0.0))];
    for i in (0..m).rev() {
        dpow = mul_slices(&dpow, &d_in);
        acc_p = mul_slices(&acc_p, &n_in);
        acc_q = mul_slices(&acc_q, &n_in);
        let tp: Vec<T> = dpow
            .iter()
            .map(|&d| d.mul(T::from_c64(po.coeff(i))))
            .collect();
        let tq: Vec<T> = dpow
            .iter()
            .map(|&d| d.mul(T::from_c64(qo.coeff(i))))
            .collect();
        add_assign_slices(&mut acc_p, &tp);
        add_assign_slices(&mut acc_q, &tq);
    }

    let max_mag = acc_p
        .iter()
        .chain(acc_q.iter())
        .map(|c| c.abs_f64())
        .fold(0.0f64, f64::max);
    let scale = if max_mag > 0.0 { 1.0 / max_mag } else { 1.0 };
    let down =
        |v: Vec<T>| -> Vec<Complex64> { v.into_iter().map(|c| c.scale(scale).to_c64()).collect() };
    (down(acc_p), down(acc_q))
}
