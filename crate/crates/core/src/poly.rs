//! Dense complex polynomials and simultaneous root finding.
//!
//! Roots are found with the Aberth-Ehrlich method: all approximations are
//! iterated together, each Newton correction damped by the repulsion of the
//! other approximations. Updates are applied in place (Gauss-Seidel style),
//! which both accelerates convergence and makes the whole procedure
//! deterministic, because the sweep order is fixed.
//!
//! Three practical refinements matter for the polynomials this crate
//! produces (fixed-point polynomials of high-degree compositions):
//!
//! * exact zero trailing coefficients are deflated first, so `z^4096 - z`
//!   is solved as a root at the origin plus `z^4095 - 1`;
//! * evaluation switches to the reversed polynomial in `1/z` outside the
//!   unit disc, which keeps Horner finite at degrees in the thousands;
//! * after the sweeps converge, every approximation gets a short
//!   multiplicity-aware Newton polish, which collapses the small clusters
//!   that plain iteration leaves around multiple roots.
//!
//! Acceptance is judged by a scaled residual, never by step size alone.

use num_complex::Complex64;

use crate::dd::Coeff;
use crate::error::{Error, Result};

/// Relative residual a root approximation must meet: |p(z)| divided by the
/// coefficient 1-norm times max(1,|z|)^deg. The bound is scale invariant and
/// about 1e10 looser than roundoff, leaving headroom for ill-conditioned
/// clusters while still rejecting garbage.
pub const RESIDUAL_CEILING: f64 = 1e-6;

/// Two approximations closer than this (relative to the root magnitude) are
/// treated as one root with multiplicity. Polished multiple roots land well
/// below 1e-10 apart; distinct roots of the maps used here stay far above.
pub const CLUSTER_TOL: f64 = 1e-8;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Schoolbook product of coefficient slices, generic over the coefficient
/// ring so composition can run in extended precision.
pub(crate) fn mul_slices<T: Coeff>(a: &[T], b: &[T]) -> Vec<T> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![T::zero(); a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] = out[i + j].add(ai.mul(bj));
        }
    }
    out
}

/// out[i] += a[i] for the overlapping prefix, extending out as needed.
pub(crate) fn add_assign_slices<T: Coeff>(out: &mut Vec<T>, a: &[T]) {
    if out.len() < a.len() {
        out.resize(a.len(), T::zero());
    }
    for (o, &ai) in out.iter_mut().zip(a.iter()) {
        *o = o.add(ai);
    }
}

/// Polynomial with f64 complex coefficients, ascending order:
/// `coeffs[k]` multiplies `z^k`. The representation keeps at least one
/// coefficient and no exact-zero leading coefficient (except for the zero
/// polynomial itself, stored as `[0]`).
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexPoly {
    coeffs: Vec<Complex64>,
}

impl ComplexPoly {
    /// Builds a polynomial, stripping exact-zero leading coefficients.
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.re == 0.0 && c.im == 0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(ZERO);
        }
        ComplexPoly { coeffs }
    }

    pub fn zero() -> Self {
        ComplexPoly { coeffs: vec![ZERO] }
    }

    pub fn constant(c: Complex64) -> Self {
        ComplexPoly::new(vec![c])
    }

    /// c * z^k
    pub fn monomial(c: Complex64, k: usize) -> Self {
        let mut coeffs = vec![ZERO; k + 1];
        coeffs[k] = c;
        ComplexPoly::new(coeffs)
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        ComplexPoly::new(coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or(ZERO)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.re == 0.0 && c.im == 0.0)
    }

    /// Sum of coefficient magnitudes; the natural scale for residuals.
    pub fn norm1(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }

    /// Drops leading coefficients smaller than `eps` times the largest
    /// coefficient magnitude. Used after numeric composition, where the
    /// top coefficients of a cancelling combination are pure noise.
    pub fn trim_relative(&self, eps: f64) -> Self {
        let max = self.coeffs.iter().map(|c| c.norm()).fold(0.0f64, f64::max);
        if max == 0.0 {
            return ComplexPoly::zero();
        }
        let cut = max * eps;
        let mut coeffs = self.coeffs.clone();
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.norm() <= cut) {
            coeffs.pop();
        }
        ComplexPoly::new(coeffs)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut p = ZERO;
        for &a in self.coeffs.iter().rev() {
            p = p * z + a;
        }
        p
    }

    /// Value and first derivative in one Horner pass.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut p = ZERO;
        let mut dp = ZERO;
        for &a in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + a;
        }
        (p, dp)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return ComplexPoly::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| c * k as f64)
            .collect();
        ComplexPoly::new(coeffs)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut coeffs = self.coeffs.clone();
        add_assign_slices(&mut coeffs, &rhs.coeffs);
        ComplexPoly::new(coeffs)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let mut coeffs = self.coeffs.clone();
        if coeffs.len() < rhs.coeffs.len() {
            coeffs.resize(rhs.coeffs.len(), ZERO);
        }
        for (o, &r) in coeffs.iter_mut().zip(rhs.coeffs.iter()) {
            *o -= r;
        }
        ComplexPoly::new(coeffs)
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        ComplexPoly::new(mul_slices(&self.coeffs, &rhs.coeffs))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        ComplexPoly::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    /// All roots with multiplicities, sorted by (re, im). The multiplicities
    /// sum to the degree. Fails with `NoConvergence` if any approximation
    /// misses the residual ceiling.
    pub fn roots(&self, params: &RootFindParams) -> Result<Vec<PolyRoot>> {
        if self.is_zero() {
            return Err(Error::InvalidPoly(
                "the zero polynomial does not have a root set".into(),
            ));
        }
        let degree = self.degree();
        if degree == 0 {
            return Ok(Vec::new());
        }

        // Exact-zero trailing coefficients become a root at the origin.
        let zero_mult = self
            .coeffs
            .iter()
            .take_while(|c| c.re == 0.0 && c.im == 0.0)
            .count();
        let work: Vec<Complex64> = self.coeffs[zero_mult..].to_vec();
        let d = work.len() - 1;

        let mut roots = if d == 0 {
            Vec::new()
        } else if d == 1 {
            vec![PolyRoot {
                value: -work[0] / work[1],
                multiplicity: 1,
            }]
        } else {
            aberth(&work, params)?
        };

        if zero_mult > 0 {
            roots.push(PolyRoot {
                value: ZERO,
                multiplicity: zero_mult,
            });
        }
        roots.sort_by(|a, b| {
            (a.value.re, a.value.im)
                .partial_cmp(&(b.value.re, b.value.im))
                .expect("root coordinates are finite")
        });

        let total: usize = roots.iter().map(|r| r.multiplicity).sum();
        if total != degree {
            return Err(Error::Internal(format!(
                "root multiplicities sum to {total}, expected degree {degree}"
            )));
        }
        Ok(roots)
    }
}

/// A located root and how many times it occurs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolyRoot {
    pub value: Complex64,
    pub multiplicity: usize,
}

/// Knobs for the simultaneous root finder. Defaults are tuned for the
/// fixed-point polynomials produced in this crate (degrees up to a few
/// thousand, coefficients normalised to unit max magnitude).
#[derive(Debug, Clone, Copy)]
pub struct RootFindParams {
    /// Sweep budget before giving up on step convergence. Residual checks
    /// still decide acceptance afterwards.
    pub max_iterations: usize,
    /// Relative step size below which the sweeps are considered converged.
    pub step_tol: f64,
    /// Scaled residual every accepted root must meet.
    pub residual_ceiling: f64,
    /// Clustering distance for multiplicity detection.
    pub cluster_tol: f64,
    /// Seed for the deterministic jitter on the initial circle.
    pub seed: u64,
}

impl Default for RootFindParams {
    fn default() -> Self {
        RootFindParams {
            max_iterations: 500,
            step_tol: 5e-14,
            residual_ceiling: RESIDUAL_CEILING,
            cluster_tol: CLUSTER_TOL,
            seed: 0x6f72_6269_7421,
        }
    }
}

/// SplitMix64; tiny, seedable, and good enough for symmetry-breaking jitter.
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform in [-0.5, 0.5).
fn jitter(state: &mut u64) -> f64 {
    (splitmix64(state) >> 11) as f64 / (1u64 << 53) as f64 - 0.5
}

/// Evaluation bundle at one approximation: the Newton correction p/p' and a
/// scale-invariant residual. Outside the unit disc everything is computed
/// through the reversed polynomial q(w) = w^d p(1/w) at w = 1/z, so no
/// intermediate overflows at high degree.
struct EvalData {
    newton: Complex64,
    scaled_residual: f64,
}

fn horner2(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = ZERO;
    let mut dp = ZERO;
    for &a in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

fn eval_data(coeffs: &[Complex64], reversed: &[Complex64], norm1: f64, z: Complex64) -> EvalData {
    let d = (coeffs.len() - 1) as f64;
    if z.norm_sqr() <= 1.0 {
        let (p, dp) = horner2(coeffs, z);
        EvalData {
            newton: p / dp,
            scaled_residual: p.norm() / norm1,
        }
    } else {
        let w = ONE / z;
        let (q, dq) = horner2(reversed, w);
        // p/p' = q / (w (d q - w q')).
        let a = q * d - w * dq;
        EvalData {
            newton: q / (w * a),
            scaled_residual: q.norm() / norm1,
        }
    }
}

/// Fresh start on the initial circle for an approximation whose evaluation
/// went non-finite. A point stuck deep inside the root annulus (where p' can
/// underflow at high degree) cannot escape through a local nudge, so a full
/// restart is the reliable rescue.
fn relocate(r0: f64, state: &mut u64) -> Complex64 {
    Complex64::from_polar(
        r0 * (1.0 + 0.1 * jitter(state)),
        std::f64::consts::TAU * jitter(state),
    )
}

/// Core Aberth-Ehrlich iteration on a polynomial with nonzero constant term.
fn aberth(coeffs: &[Complex64], params: &RootFindParams) -> Result<Vec<PolyRoot>> {
    let d = coeffs.len() - 1;
    let norm1: f64 = coeffs.iter().map(|c| c.norm()).sum();
    if !norm1.is_finite() || norm1 == 0.0 {
        return Err(Error::InvalidPoly(
            "coefficients are not finite or all vanish".into(),
        ));
    }
    let reversed: Vec<Complex64> = coeffs.iter().rev().copied().collect();
    let mut rng = params.seed;

    // Geometric-mean radius |c0/cd|^(1/d), clamped away from degenerate
    // scales, with a fixed angular offset plus jitter to break symmetry.
    let r0 = (coeffs[0].norm() / coeffs[d].norm())
        .powf(1.0 / d as f64)
        .clamp(1e-6, 1e6);
    let mut zs: Vec<Complex64> = (0..d)
        .map(|k| {
            let theta =
                std::f64::consts::TAU * (k as f64 + 0.5) / d as f64 + 0.35 + 0.2 * jitter(&mut rng);
            let r = r0 * (1.0 + 0.1 * jitter(&mut rng));
            Complex64::from_polar(r, theta)
        })
        .collect();

    let mut iterations_used = params.max_iterations;
    for iter in 0..params.max_iterations {
        let mut max_rel_step = 0.0f64;
        let mut max_resid = 0.0f64;
        for i in 0..d {
            let e = eval_data(coeffs, &reversed, norm1, zs[i]);
            max_resid = max_resid.max(e.scaled_residual);
            if !e.newton.is_finite() {
                zs[i] = relocate(r0, &mut rng);
                max_rel_step = f64::INFINITY;
                continue;
            }
            let mut repulsion = ZERO;
            let mut collided = false;
            for j in 0..d {
                if j == i {
                    continue;
                }
                let diff = zs[i] - zs[j];
                if diff.norm_sqr() == 0.0 {
                    collided = true;
                    break;
                }
                repulsion += ONE / diff;
            }
            if collided {
                zs[i] = relocate(r0, &mut rng);
                max_rel_step = f64::INFINITY;
                continue;
            }
            let mut delta = e.newton / (ONE - e.newton * repulsion);
            if !delta.is_finite() {
                zs[i] = relocate(r0, &mut rng);
                max_rel_step = f64::INFINITY;
                continue;
            }
            // Trust region: a stray approximation reenters the root annulus
            // geometrically instead of overshooting straight through it,
            // which at high degree would land it where p' underflows.
            let cap = 0.5 * (zs[i].norm() + r0);
            let step = delta.norm();
            if step > cap {
                delta *= cap / step;
            }
            zs[i] -= delta;
            if !zs[i].is_finite() {
                zs[i] = relocate(r0, &mut rng);
                max_rel_step = f64::INFINITY;
                continue;
            }
            max_rel_step = max_rel_step.max(delta.norm() / zs[i].norm().max(1.0));
        }
        // Multiple roots converge linearly in step size but their residual
        // hits the floor long before; accept either signal. A sweep that had
        // to relocate a point never counts as converged.
        if max_rel_step < params.step_tol
            || (max_rel_step.is_finite() && max_resid <= params.residual_ceiling * 1e-4)
        {
            iterations_used = iter + 1;
            break;
        }
    }

    // Residual acceptance before any grouping; keep each Newton correction
    // for the inclusion radii below.
    let mut newtons = vec![ZERO; d];
    let mut worst = 0.0f64;
    for (i, &z) in zs.iter().enumerate() {
        let e = eval_data(coeffs, &reversed, norm1, z);
        if !e.scaled_residual.is_finite() {
            worst = f64::INFINITY;
            break;
        }
        worst = worst.max(e.scaled_residual);
        if e.newton.is_finite() {
            newtons[i] = e.newton;
        }
    }
    if worst > params.residual_ceiling {
        return Err(Error::NoConvergence {
            residual: worst,
            ceiling: params.residual_ceiling,
            iterations: iterations_used,
        });
    }

    // Every disc |w - z_i| <= d |p/p'(z_i)| is guaranteed to contain a true
    // root, so approximations whose discs overlap are read as one root of
    // multiplicity the cluster size. The base tolerance keeps coincident
    // approximations together even when their corrections vanish.
    fn find_rep(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    let radii: Vec<f64> = newtons.iter().map(|n| d as f64 * n.norm()).collect();
    let mut parent: Vec<usize> = (0..d).collect();
    for i in 0..d {
        for j in (i + 1)..d {
            let reach =
                radii[i] + radii[j] + params.cluster_tol * zs[i].norm().max(zs[j].norm()).max(1.0);
            if (zs[i] - zs[j]).norm() <= reach {
                let (a, b) = (find_rep(&mut parent, i), find_rep(&mut parent, j));
                if a != b {
                    parent[a] = b;
                }
            }
        }
    }
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); d];
    for i in 0..d {
        let rep = find_rep(&mut parent, i);
        members[rep].push(i);
    }

    // The cluster mean cancels the leading error of the individual
    // approximations; the modified Newton step z -= m p/p' then converges
    // quadratically to the m-fold root. Keep the best residual seen, so a
    // polish step ruined by cancellation noise is discarded.
    let mut out = Vec::with_capacity(d);
    for group in members.into_iter().filter(|g| !g.is_empty()) {
        let m = group.len();
        let mut sum = ZERO;
        for &i in &group {
            sum += zs[i];
        }
        let centroid = sum / m as f64;
        let mut best = centroid;
        let mut best_resid = eval_data(coeffs, &reversed, norm1, centroid).scaled_residual;
        let mut cur = centroid;
        for _ in 0..4 {
            let e = eval_data(coeffs, &reversed, norm1, cur);
            if !e.newton.is_finite() {
                break;
            }
            cur -= e.newton * m as f64;
            if !cur.is_finite() {
                break;
            }
            let resid = eval_data(coeffs, &reversed, norm1, cur).scaled_residual;
            if resid <= best_resid {
                best_resid = resid;
                best = cur;
            }
        }
        out.push(PolyRoot {
            value: best,
            multiplicity: m,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn find(poly: &ComplexPoly) -> Vec<PolyRoot> {
        poly.roots(&RootFindParams::default()).unwrap()
    }

    /// Largest distance from each expected root to its nearest computed one.
    fn match_error(found: &[PolyRoot], expected: &[Complex64]) -> f64 {
        expected
            .iter()
            .map(|e| {
                found
                    .iter()
                    .map(|r| (r.value - e).norm())
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn linear_and_quadratic() {
        let r = find(&ComplexPoly::from_real(&[-3.0, 1.5])); // 1.5 z - 3
        assert_eq!(r.len(), 1);
        assert_relative_eq!(r[0].value.re, 2.0, max_relative = 1e-14);

        let r = find(&ComplexPoly::from_real(&[-1.0, 0.0, 1.0])); // z^2 - 1
        assert_eq!(r.len(), 2);
        assert_relative_eq!(r[0].value.re, -1.0, max_relative = 1e-12);
        assert_relative_eq!(r[1].value.re, 1.0, max_relative = 1e-12);
        assert!(r.iter().all(|x| x.multiplicity == 1));
    }

    #[test]
    fn double_root_is_clustered() {
        // (z - 1)^2: the classic case where raw simultaneous iteration
        // leaves two approximations ~1e-8 apart. Polish must fuse them.
        let r = find(&ComplexPoly::from_real(&[1.0, -2.0, 1.0]));
        assert_eq!(r.len(), 1, "expected one clustered root, got {r:?}");
        assert_eq!(r[0].multiplicity, 2);
        assert!((r[0].value - Complex64::new(1.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn triple_root_with_simple_neighbour() {
        // (z - 2)^3 (z + 1) = z^4 - 5 z^3 + 6 z^2 + 4 z - 8
        let r = find(&ComplexPoly::from_real(&[-8.0, 4.0, 6.0, -5.0, 1.0]));
        assert_eq!(r.len(), 2, "{r:?}");
        assert_eq!(r[0].multiplicity, 1);
        assert!((r[0].value - Complex64::new(-1.0, 0.0)).norm() < 1e-9);
        assert_eq!(r[1].multiplicity, 3);
        assert!((r[1].value - Complex64::new(2.0, 0.0)).norm() < 1e-7);
    }

    #[test]
    fn origin_roots_are_deflated() {
        // z^5 - z^3 = z^3 (z - 1)(z + 1)
        let r = find(&ComplexPoly::from_real(&[0.0, 0.0, 0.0, -1.0, 0.0, 1.0]));
        let at_origin = r.iter().find(|x| x.value.norm() == 0.0).unwrap();
        assert_eq!(at_origin.multiplicity, 3);
        let total: usize = r.iter().map(|x| x.multiplicity).sum();
        assert_eq!(total, 5);
    }

    #[test]
    fn roots_of_unity_at_degree_1023() {
        // z^1024 - z: origin plus the 1023rd roots of unity. Exercises the
        // deflation path and the reversed-polynomial evaluation at scale.
        let mut c = vec![0.0; 1025];
        c[1] = -1.0;
        c[1024] = 1.0;
        let r = find(&ComplexPoly::from_real(&c));
        let total: usize = r.iter().map(|x| x.multiplicity).sum();
        assert_eq!(total, 1024);
        assert_eq!(r.len(), 1024);
        for root in &r {
            if root.value.norm() == 0.0 {
                continue;
            }
            assert_relative_eq!(root.value.norm(), 1.0, max_relative = 1e-9);
            // z^1023 must be 1: check via the argument snapped to a lattice.
            let k = root.value.arg() * 1023.0 / std::f64::consts::TAU;
            assert!((k - k.round()).abs() < 1e-6, "arg off-lattice: {k}");
        }
    }

    #[test]
    fn random_simple_roots_are_recovered() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for trial in 0..8 {
            let n = 3 + trial % 5;
            let expected: Vec<Complex64> = (0..n)
                .map(|_| Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
                .collect();
            let mut poly = ComplexPoly::constant(Complex64::new(1.0, 0.0));
            for &root in &expected {
                poly = poly.mul(&ComplexPoly::new(vec![-root, Complex64::new(1.0, 0.0)]));
            }
            let found = find(&poly);
            assert!(
                match_error(&found, &expected) < 1e-7,
                "trial {trial}: {found:?} vs {expected:?}"
            );
        }
    }

    #[test]
    fn moderately_ill_conditioned_real_roots() {
        // Roots 1..=10; coefficients span 7 orders of magnitude.
        let expected: Vec<Complex64> = (1..=10).map(|k| Complex64::new(k as f64, 0.0)).collect();
        let mut poly = ComplexPoly::constant(Complex64::new(1.0, 0.0));
        for &root in &expected {
            poly = poly.mul(&ComplexPoly::new(vec![-root, Complex64::new(1.0, 0.0)]));
        }
        let found = find(&poly);
        assert!(match_error(&found, &expected) < 1e-6);
    }

    #[test]
    fn constant_polynomials() {
        assert!(find(&ComplexPoly::from_real(&[3.0])).is_empty());
        assert!(matches!(
            ComplexPoly::zero().roots(&RootFindParams::default()),
            Err(Error::InvalidPoly(_))
        ));
    }

    #[test]
    fn failure_is_reported_not_hidden() {
        let params = RootFindParams {
            max_iterations: 0,
            ..RootFindParams::default()
        };
        // Without any sweeps the circle guesses cannot meet the ceiling.
        let poly = ComplexPoly::from_real(&[-1.0, 0.0, 0.0, 1.0]);
        assert!(matches!(
            poly.roots(&params),
            Err(Error::NoConvergence { .. })
        ));
    }

    #[test]
    fn determinism_across_runs() {
        let poly = ComplexPoly::from_real(&[-1.0, 2.0, -3.0, 0.5, 1.0]);
        let a = find(&poly);
        let b = find(&poly);
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b.iter()) {
            assert_eq!(x.value, y.value);
            assert_eq!(x.multiplicity, y.multiplicity);
        }
    }

    #[test]
    fn arithmetic_identities() {
        let p = ComplexPoly::from_real(&[1.0, -2.0, 3.0]);
        let q = ComplexPoly::from_real(&[0.5, 4.0]);
        let z = Complex64::new(0.7, -1.3);
        assert_relative_eq!(
            (p.mul(&q).eval(z) - p.eval(z) * q.eval(z)).norm(),
            0.0,
            epsilon = 1e-12
        );
        assert_relative_eq!(
            (p.add(&q).eval(z) - (p.eval(z) + q.eval(z))).norm(),
            0.0,
            epsilon = 1e-12
        );
        let (v, dv) = p.eval_with_derivative(z);
        assert_eq!(v, p.eval(z));
        assert_relative_eq!((dv - p.derivative().eval(z)).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn trim_drops_noise_coefficients() {
        let p = ComplexPoly::new(vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(2.0, 0.0),
            Complex64::new(1e-14, 0.0),
        ]);
        let t = p.trim_relative(1e-10);
        assert_eq!(t.degree(), 1);
        // Interior small coefficients are kept; only the leading tail goes.
        let q = ComplexPoly::new(vec![Complex64::new(1e-14, 0.0), Complex64::new(2.0, 0.0)]);
        assert_eq!(q.trim_relative(1e-10).degree(), 1);
    }
}
