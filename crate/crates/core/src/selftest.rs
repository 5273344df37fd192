//! Built-in self-test: cross-checks the enumeration pipeline against
//! closed forms on small reference systems.
//!
//! Each check pits two independent routes against each other — the exact
//! combinatorial formula versus root-finding enumeration, the divisor
//! sieve versus Möbius inversion, the zeta partial sum versus a closed
//! form — so a regression in any layer surfaces as a named failure.

use num_complex::Complex64;

use crate::counting::{c_mobius_exact, CountTable};
use crate::dynamics::{Potential, SkewSystem};
use crate::error::Result;
use crate::maps::RationalMap;
use crate::numtheory::{zeta, ZetaParams};

/// Outcome of one self-test check.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

fn z_pow(p: usize) -> Result<RationalMap> {
    let mut coeffs = vec![0.0; p + 1];
    coeffs[p] = 1.0;
    RationalMap::polynomial(&coeffs)
}

fn check(name: &str, pass: bool, detail: String) -> CheckOutcome {
    CheckOutcome {
        name: name.to_string(),
        pass,
        detail,
    }
}

/// Runs every built-in check; returns every check outcome (never fails early —
/// callers decide what a failure means).
pub fn run_selftest() -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();

    // Enumerated census vs the closed form (Σ degrees)^n + (#maps)^n for
    // the zero potential, on two reference families.
    for (degrees, n_max) in [(vec![2_usize, 2], 4_usize), (vec![2, 3], 4)] {
        let maps = degrees
            .iter()
            .map(|&d| z_pow(d))
            .collect::<Result<Vec<_>>>()?;
        let system = SkewSystem::with_defaults(maps)?;
        let enumerated = CountTable::enumerate(&system, &Potential::Zero, n_max)?;
        let exact = CountTable::exact_zero(&degrees, n_max)?;
        let mut worst = 0.0_f64;
        for n in 1..=n_max {
            let want = exact.e_f64(n)?;
            let got = enumerated.e_f64(n)?;
            worst = worst.max((got - want).abs());
        }
        out.push(check(
            &format!("enumeration matches closed form, degrees {degrees:?}"),
            worst < 1e-6,
            format!("largest |E_enumerated - E_formula| over n <= {n_max}: {worst:.3e}"),
        ));
    }

    // Divisor sieve vs Möbius inversion on the exact pipeline.
    {
        let exact = CountTable::exact_zero(&[2, 2], 50)?;
        let mut all_equal = true;
        for n in 1..=50 {
            let e: Vec<_> = (1..=n)
                .map(|m| exact.e_big(m).cloned())
                .collect::<Result<Vec<_>>>()?;
            if &c_mobius_exact(&e, n)? != exact.c_big(n)? {
                all_equal = false;
                break;
            }
        }
        out.push(check(
            "divisor sieve agrees with Möbius inversion",
            all_equal,
            "exact big-integer comparison for n <= 50".into(),
        ));
    }

    // Fixed points of a single quadratic map: 2 finite + infinity.
    {
        let system = SkewSystem::with_defaults(vec![z_pow(2)?])?;
        let points = system.periodic_points(&Potential::Zero, 1)?;
        let total: usize = points.iter().map(|p| p.multiplicity).sum();
        out.push(check(
            "quadratic map has three fixed points with multiplicity",
            total == 3,
            format!("found {total}"),
        ));
    }

    // Zeta partial sum vs the closed form at s = 2.
    {
        let got = zeta(Complex64::new(2.0, 0.0), ZetaParams::default())?;
        let want = std::f64::consts::PI * std::f64::consts::PI / 6.0;
        let err = (got.value.re - want).abs();
        out.push(check(
            "zeta(2) matches pi^2/6",
            err < 1e-8 && got.certified_error < 1e-8,
            format!("error {err:.3e}, certified {:.3e}", got.certified_error),
        ));
    }

    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn the_full_suite_passes() {
        let outcomes = run_selftest().unwrap();
        assert!(outcomes.len() >= 5);
        for o in &outcomes {
            assert!(o.pass, "self-test '{}' failed: {}", o.name, o.detail);
        }
    }
}
