//! Skew-product dynamics over a finite family of rational maps.
//!
//! A point of the skew system is a pair (word, fiber point): an infinite
//! symbol sequence together with a point of the sphere. The system applies
//! the map named by the first symbol and shifts the word. Periodic points of
//! period n therefore decompose by the length-n words: for each word w, the
//! fiber points fixed by the composition along w. This module enumerates
//! those points, detects prime periods, groups prime-period points into
//! closed orbits, evaluates potentials and their ergodic sums, and computes
//! multipliers for repelling classification.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maps::{chordal_distance, Precision, RationalMap, SpherePoint};
use crate::numtheory::{divisors, CompensatedSum};
use crate::poly::RootFindParams;

/// Members of one closed orbit carry the same ergodic sum up to roundoff;
/// they are cyclic permutations of the same terms.
pub const ORBIT_WEIGHT_TOL: f64 = 1e-8;

/// A finite word over the alphabet {1..M}; the repeating block of a
/// periodic symbol sequence. Letters are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Word {
    letters: Vec<u8>,
}

impl Word {
    pub fn new(letters: Vec<u8>, alphabet: usize) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::InvalidInput("word must be nonempty".into()));
        }
        if let Some(&bad) = letters.iter().find(|&&l| l == 0 || l as usize > alphabet) {
            return Err(Error::InvalidInput(format!(
                "letter {bad} outside alphabet 1..={alphabet}"
            )));
        }
        Ok(Word { letters })
    }

    pub fn letters(&self) -> &[u8] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn first_letter(&self) -> u8 {
        self.letters[0]
    }

    /// Left rotation by k: the word seen after k applications of the shift.
    pub fn rotate_left(&self, k: usize) -> Word {
        let n = self.letters.len();
        let k = k % n;
        let mut letters = Vec::with_capacity(n);
        letters.extend_from_slice(&self.letters[k..]);
        letters.extend_from_slice(&self.letters[..k]);
        Word { letters }
    }

    /// True when the word is the (len/d)-fold repetition of its length-d
    /// prefix. Requires d to divide the length.
    pub fn is_repetition_of_prefix(&self, d: usize) -> bool {
        let n = self.letters.len();
        if d == 0 || !n.is_multiple_of(d) {
            return false;
        }
        self.letters
            .iter()
            .enumerate()
            .all(|(i, &l)| l == self.letters[i % d])
    }
}

impl std::fmt::Display for Word {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.letters.iter().all(|&l| l <= 9) {
            for l in &self.letters {
                write!(f, "{l}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.letters.iter().map(|l| l.to_string()).collect();
            write!(f, "{}", parts.join("."))
        }
    }
}

/// All M^n words of length n in lexicographic order.
pub fn enumerate_words(alphabet: usize, n: usize, cap: usize) -> Result<Vec<Word>> {
    if alphabet == 0 {
        return Err(Error::NonPositive {
            op: "enumerate_words alphabet",
        });
    }
    if n == 0 {
        return Err(Error::NonPositive {
            op: "enumerate_words length",
        });
    }
    if alphabet > u8::MAX as usize {
        return Err(Error::InvalidInput(format!(
            "alphabet size {alphabet} exceeds the letter representation"
        )));
    }
    let total = (alphabet as u128)
        .checked_pow(n as u32)
        .ok_or(Error::Overflow("enumerate_words total"))?;
    if total > cap as u128 {
        return Err(Error::EnumerationCapExceeded {
            alphabet,
            length: n,
            total,
            cap,
        });
    }
    let mut words = Vec::with_capacity(total as usize);
    let mut current = vec![1u8; n];
    loop {
        words.push(Word {
            letters: current.clone(),
        });
        // Odometer increment, most significant letter first.
        let mut pos = n;
        loop {
            if pos == 0 {
                return Ok(words);
            }
            pos -= 1;
            if (current[pos] as usize) < alphabet {
                current[pos] += 1;
                for l in current.iter_mut().skip(pos + 1) {
                    *l = 1;
                }
                break;
            }
        }
    }
}

/// The weight function f on skew-product points, restricted to evaluable
/// shapes. `PlugIn` admits arbitrary library-user callables: the arguments
/// are the rotated word (the symbol sequence seen at that orbit position)
/// and the fiber point.
/// A caller-supplied potential: any thread-safe function of the current
/// word and fiber point. Returning an error marks the point undefined.
pub type PotentialFn = Arc<dyn Fn(&Word, SpherePoint) -> Result<f64> + Send + Sync>;

#[derive(Clone)]
pub enum Potential {
    Zero,
    Constant(f64),
    /// One real weight per letter; the value at (w, z) is the weight of the
    /// first letter of w. Independent of the fiber coordinate.
    SymbolWeight(Vec<f64>),
    /// log |R'(z)| for the map R named by the first letter. Undefined at
    /// infinity, at poles of R', and at critical points (log 0).
    LogModulusDerivative,
    PlugIn(PotentialFn),
}

impl std::fmt::Debug for Potential {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Potential::Zero => write!(f, "Zero"),
            Potential::Constant(c) => write!(f, "Constant({c})"),
            Potential::SymbolWeight(b) => write!(f, "SymbolWeight({b:?})"),
            Potential::LogModulusDerivative => write!(f, "LogModulusDerivative"),
            Potential::PlugIn(_) => write!(f, "PlugIn(..)"),
        }
    }
}

impl Potential {
    /// Human-readable name for report metadata.
    pub fn describe(&self) -> String {
        match self {
            Potential::Zero => "zero".into(),
            Potential::Constant(c) => format!("constant({c})"),
            Potential::SymbolWeight(b) => {
                let parts: Vec<String> = b.iter().map(|x| x.to_string()).collect();
                format!("symbol_weight({})", parts.join(","))
            }
            Potential::LogModulusDerivative => "log_modulus_derivative".into(),
            Potential::PlugIn(_) => "plug_in".into(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Potential::Zero)
    }
}

/// Numerical decision thresholds, grouped so configurations can override
/// them coherently.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Distance under which root approximations merge into one multiple root.
    pub root_cluster: f64,
    /// Chordal distance under which a fiber orbit counts as closed. Looser
    /// than root clustering because it compares across two root-finding
    /// runs rather than within one.
    pub period_closure: f64,
    /// Scaled residual ceiling for accepted roots.
    pub residual_ceiling: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            root_cluster: 1e-8,
            period_closure: 1e-7,
            residual_ceiling: 1e-6,
        }
    }
}

/// Resource ceilings that stop runaway enumerations before they exhaust
/// memory or time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Caps {
    /// Largest composed map degree the enumeration pipeline will solve.
    pub max_degree: usize,
    /// Largest number of words per period length.
    pub max_words: usize,
    /// Term budget for zeta evaluations.
    pub zeta_terms: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_degree: 1024,
            max_words: 4096,
            zeta_terms: 50_000_000,
        }
    }
}

/// One element of the period-n point set: a word, a fiber point, the root
/// multiplicity, the detected prime period, and the ergodic sum of the
/// potential over that prime period.
#[derive(Debug, Clone, Serialize)]
pub struct SkewPeriodicPoint {
    pub word: Word,
    pub z: SpherePoint,
    pub multiplicity: usize,
    pub prime_period: usize,
    pub weight_exponent: f64,
}

/// A length-n closed orbit: n skew points cyclically permuted by the
/// dynamics. `members` starts at the canonical representative (least word,
/// ties broken by fiber coordinate with infinity last) and follows the
/// dynamics.
#[derive(Debug, Clone, Serialize)]
pub struct ClosedOrbit {
    pub length: usize,
    pub members: Vec<SkewPeriodicPoint>,
    pub multiplicity: usize,
    pub weight_exponent: f64,
}

impl ClosedOrbit {
    pub fn representative(&self) -> &SkewPeriodicPoint {
        &self.members[0]
    }
}

/// A finitely generated system: the maps, plus the thresholds and caps the
/// enumeration pipeline obeys.
#[derive(Debug, Clone)]
pub struct SkewSystem {
    maps: Vec<RationalMap>,
    tolerances: Tolerances,
    caps: Caps,
    precision: Precision,
}

impl SkewSystem {
    pub fn new(
        maps: Vec<RationalMap>,
        tolerances: Tolerances,
        caps: Caps,
        precision: Precision,
    ) -> Result<Self> {
        if maps.is_empty() {
            return Err(Error::InvalidInput("system needs at least one map".into()));
        }
        Ok(SkewSystem {
            maps,
            tolerances,
            caps,
            precision,
        })
    }

    pub fn with_defaults(maps: Vec<RationalMap>) -> Result<Self> {
        SkewSystem::new(
            maps,
            Tolerances::default(),
            Caps::default(),
            Precision::Standard,
        )
    }

    pub fn alphabet_size(&self) -> usize {
        self.maps.len()
    }

    pub fn maps(&self) -> &[RationalMap] {
        &self.maps
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tolerances
    }

    pub fn caps(&self) -> &Caps {
        &self.caps
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.maps.iter().map(|m| m.degree()).collect()
    }

    pub fn degree_sum(&self) -> usize {
        self.maps.iter().map(|m| m.degree()).sum()
    }

    fn map_for(&self, letter: u8) -> &RationalMap {
        &self.maps[(letter - 1) as usize]
    }

    /// One skew step in the fiber: apply the map named by `letter`.
    pub fn apply_letter(&self, letter: u8, p: SpherePoint) -> Result<SpherePoint> {
        self.map_for(letter).eval_sphere(p)
    }

    /// R_{w_n} compose ... compose R_{w_1}: the fiber action of n skew
    /// steps, last letter outermost. Degree is the product of the letter
    /// degrees, checked against the cap before any work is done.
    pub fn compose_along_word(&self, w: &Word) -> Result<RationalMap> {
        let predicted: u128 = w
            .letters()
            .iter()
            .map(|&l| self.map_for(l).degree() as u128)
            .product();
        if predicted > self.caps.max_degree as u128 {
            return Err(Error::DegreeCapExceeded {
                degree: predicted,
                cap: self.caps.max_degree,
            });
        }
        let mut acc = self.map_for(w.letters()[0]).clone();
        for &letter in &w.letters()[1..] {
            acc = RationalMap::compose(self.map_for(letter), &acc, self.precision)?;
        }
        Ok(acc)
    }

    /// The fiber orbit z_0 = z, z_{i+1} = R_{w_{i+1 mod n}}(z_i), for L
    /// points (indices 0..L-1).
    pub fn fiber_orbit(&self, w: &Word, z: SpherePoint, l: usize) -> Result<Vec<SpherePoint>> {
        let n = w.len();
        let mut orbit = Vec::with_capacity(l);
        let mut cur = z;
        for i in 0..l {
            orbit.push(cur);
            if i + 1 < l {
                cur = self.apply_letter(w.letters()[i % n], cur)?;
            }
        }
        Ok(orbit)
    }

    /// Least divisor d of |w| such that w repeats its d-prefix and the
    /// fiber closes after d steps within the period-closure tolerance.
    /// Residuals just above tolerance (within a factor 10) are refused as
    /// ambiguous rather than silently classified as the full period.
    pub fn prime_period(&self, w: &Word, z: SpherePoint) -> Result<usize> {
        let n = w.len();
        let tol = self.tolerances.period_closure;
        for d in divisors(n as u64)? {
            let d = d as usize;
            if d == n {
                break;
            }
            if !w.is_repetition_of_prefix(d) {
                continue;
            }
            let mut cur = z;
            for i in 0..d {
                cur = self.apply_letter(w.letters()[i], cur)?;
            }
            let residual = chordal_distance(z, cur);
            if residual <= tol {
                return Ok(d);
            }
            if residual <= 10.0 * tol {
                return Err(Error::PeriodDetectionAmbiguous {
                    divisor: d,
                    residual,
                    tolerance: tol,
                });
            }
        }
        Ok(n)
    }

    /// Ergodic sum of f over L skew steps starting at (w-periodic sequence,
    /// z): sum of f at the orbit points, compensated.
    pub fn ergodic_sum(&self, f: &Potential, w: &Word, z: SpherePoint, l: usize) -> Result<f64> {
        if l == 0 {
            return Err(Error::NonPositive {
                op: "ergodic_sum length",
            });
        }
        let n = w.len();
        match f {
            Potential::Zero => Ok(0.0),
            Potential::Constant(c) => Ok(c * l as f64),
            Potential::SymbolWeight(beta) => {
                if beta.len() != self.maps.len() {
                    return Err(Error::InvalidInput(format!(
                        "symbol weights: {} values for {} maps",
                        beta.len(),
                        self.maps.len()
                    )));
                }
                let mut acc = CompensatedSum::new();
                for i in 0..l {
                    acc.add(beta[(w.letters()[i % n] - 1) as usize]);
                }
                Ok(acc.value())
            }
            Potential::LogModulusDerivative => {
                let mut acc = CompensatedSum::new();
                let mut cur = z;
                for i in 0..l {
                    let letter = w.letters()[i % n];
                    let zi = match cur {
                        SpherePoint::Finite(v) => v,
                        SpherePoint::Infinity => {
                            return Err(Error::PotentialUndefined {
                                index: i,
                                reason: "log|R'| is undefined at infinity".into(),
                            })
                        }
                    };
                    let deriv = self.map_for(letter).derivative_at(zi).map_err(|e| {
                        Error::PotentialUndefined {
                            index: i,
                            reason: e.to_string(),
                        }
                    })?;
                    let mag = deriv.norm();
                    if mag == 0.0 {
                        return Err(Error::PotentialUndefined {
                            index: i,
                            reason: "critical point: |R'(z)| = 0".into(),
                        });
                    }
                    let val = mag.ln();
                    if !val.is_finite() {
                        return Err(Error::PotentialUndefined {
                            index: i,
                            reason: format!("log|R'| not finite ({mag})"),
                        });
                    }
                    acc.add(val);
                    if i + 1 < l {
                        cur = self.apply_letter(letter, cur)?;
                    }
                }
                Ok(acc.value())
            }
            Potential::PlugIn(g) => {
                let mut acc = CompensatedSum::new();
                let mut cur = z;
                for i in 0..l {
                    let rotated = w.rotate_left(i % n);
                    let val = g(&rotated, cur)?;
                    if !val.is_finite() {
                        return Err(Error::PotentialUndefined {
                            index: i,
                            reason: format!("plug-in returned non-finite value {val}"),
                        });
                    }
                    acc.add(val);
                    if i + 1 < l {
                        cur = self.apply_letter(w.letters()[i % n], cur)?;
                    }
                }
                Ok(acc.value())
            }
        }
    }

    /// Fixed points of the composition along w, with multiplicity, plus
    /// infinity when it is fixed; each point carries its prime period and
    /// the ergodic sum of f over that prime period. Multiplicities sum to
    /// deg(R_w) + 1 exactly.
    pub fn periodic_points_for_word(
        &self,
        f: &Potential,
        w: &Word,
    ) -> Result<Vec<SkewPeriodicPoint>> {
        let composed = self.compose_along_word(w)?;
        let (fp, m_inf) = composed.fixed_point_polynomial()?;
        let params = RootFindParams {
            cluster_tol: self.tolerances.root_cluster,
            residual_ceiling: self.tolerances.residual_ceiling,
            ..RootFindParams::default()
        };
        let mut points = Vec::new();
        if fp.degree() >= 1 {
            for root in fp.roots(&params)? {
                let z = SpherePoint::finite(root.value)?;
                let prime = self.prime_period(w, z)?;
                let weight = self.ergodic_sum(f, w, z, prime)?;
                points.push(SkewPeriodicPoint {
                    word: w.clone(),
                    z,
                    multiplicity: root.multiplicity,
                    prime_period: prime,
                    weight_exponent: weight,
                });
            }
        }
        if m_inf > 0 {
            let prime = self.prime_period(w, SpherePoint::Infinity)?;
            let weight = self.ergodic_sum(f, w, SpherePoint::Infinity, prime)?;
            points.push(SkewPeriodicPoint {
                word: w.clone(),
                z: SpherePoint::Infinity,
                multiplicity: m_inf,
                prime_period: prime,
                weight_exponent: weight,
            });
        }
        let total: usize = points.iter().map(|p| p.multiplicity).sum();
        if total != composed.degree() + 1 {
            return Err(Error::Internal(format!(
                "word {w}: point multiplicities sum to {total}, expected {}",
                composed.degree() + 1
            )));
        }
        Ok(points)
    }

    /// Every period-n point of the skew system, for all words of length n,
    /// in lexicographic word order (and root order within each word). Words
    /// are solved in parallel; the reduction order is fixed, so results are
    /// identical at any thread count.
    pub fn periodic_points(&self, f: &Potential, n: usize) -> Result<Vec<SkewPeriodicPoint>> {
        let words = enumerate_words(self.alphabet_size(), n, self.caps.max_words)?;
        let per_word: Vec<Vec<SkewPeriodicPoint>> = words
            .par_iter()
            .map(|w| self.periodic_points_for_word(f, w))
            .collect::<Result<Vec<_>>>()?;
        Ok(per_word.into_iter().flatten().collect())
    }

    /// Partitions prime-period-n points into closed orbits of length n by
    /// following the dynamics and matching each image against the
    /// enumerated points. Every orbit's members share one multiplicity and
    /// one ergodic sum (checked, not assumed).
    pub fn group_into_orbits(
        &self,
        n: usize,
        points: &[SkewPeriodicPoint],
    ) -> Result<Vec<ClosedOrbit>> {
        for p in points {
            if p.prime_period != n || p.word.len() != n {
                return Err(Error::Internal(format!(
                    "orbit grouping expects prime-period-{n} points, got period {} (word length {})",
                    p.prime_period,
                    p.word.len()
                )));
            }
        }
        let tol = self.tolerances.period_closure;
        let mut used = vec![false; points.len()];
        let mut orbits = Vec::new();
        for start in 0..points.len() {
            if used[start] {
                continue;
            }
            used[start] = true;
            let mut member_indices = vec![start];
            let mut cur_word = points[start].word.clone();
            let mut cur_z = points[start].z;
            for _ in 1..n {
                let letter = cur_word.first_letter();
                let image = self.apply_letter(letter, cur_z)?;
                let next_word = cur_word.rotate_left(1);
                let mut best: Option<(usize, f64)> = None;
                for (i, p) in points.iter().enumerate() {
                    if used[i] || p.word != next_word {
                        continue;
                    }
                    let dist = chordal_distance(p.z, image);
                    if dist <= tol && best.is_none_or(|(_, bd)| dist < bd) {
                        best = Some((i, dist));
                    }
                }
                let (found, _) = best.ok_or_else(|| {
                    Error::OrbitClosureMismatch(format!(
                        "image of ({cur_word}, {cur_z}) not found among enumerated points (expected word {next_word}, fiber {image})"
                    ))
                })?;
                used[found] = true;
                member_indices.push(found);
                cur_word = next_word;
                cur_z = points[found].z;
            }
            // The final step must return to the starting point.
            let back = self.apply_letter(cur_word.first_letter(), cur_z)?;
            if chordal_distance(back, points[start].z) > tol {
                return Err(Error::OrbitClosureMismatch(format!(
                    "orbit through ({}, {}) fails to close after {n} steps",
                    points[start].word, points[start].z
                )));
            }

            let mult = points[start].multiplicity;
            let weight = points[start].weight_exponent;
            for &i in &member_indices {
                if points[i].multiplicity != mult {
                    return Err(Error::OrbitClosureMismatch(format!(
                        "orbit members disagree on multiplicity ({} vs {})",
                        points[i].multiplicity, mult
                    )));
                }
                if (points[i].weight_exponent - weight).abs() > ORBIT_WEIGHT_TOL {
                    return Err(Error::OrbitClosureMismatch(format!(
                        "orbit members disagree on ergodic sum ({} vs {weight})",
                        points[i].weight_exponent
                    )));
                }
            }

            // Canonical representative: least word, then fiber sort order.
            let rep_pos = (0..member_indices.len())
                .min_by(|&a, &b| {
                    let pa = &points[member_indices[a]];
                    let pb = &points[member_indices[b]];
                    (pa.word.letters(), pa.z.sort_key())
                        .partial_cmp(&(pb.word.letters(), pb.z.sort_key()))
                        .expect("sort keys are finite")
                })
                .expect("orbit is nonempty");
            member_indices.rotate_left(rep_pos);
            let members: Vec<SkewPeriodicPoint> =
                member_indices.iter().map(|&i| points[i].clone()).collect();
            let weight_exponent = members[0].weight_exponent;
            orbits.push(ClosedOrbit {
                length: n,
                members,
                multiplicity: mult,
                weight_exponent,
            });
        }
        Ok(orbits)
    }

    /// Chain-rule multiplier of the n-step return map at a finite fiber
    /// point: the product of the one-step derivatives along the orbit.
    pub fn multiplier(&self, w: &Word, z: SpherePoint) -> Result<Complex64> {
        let mut cur = match z {
            SpherePoint::Finite(v) => v,
            SpherePoint::Infinity => {
                return Err(Error::MultiplierUndefined(
                    "multiplier at infinity requires a chart change, which is not implemented"
                        .into(),
                ))
            }
        };
        let mut product = Complex64::new(1.0, 0.0);
        for (i, &letter) in w.letters().iter().enumerate() {
            product *= self.map_for(letter).derivative_at(cur)?;
            if i + 1 < w.len() {
                cur = match self.apply_letter(letter, SpherePoint::Finite(cur))? {
                    SpherePoint::Finite(v) => v,
                    SpherePoint::Infinity => {
                        return Err(Error::MultiplierUndefined(format!(
                            "orbit reaches infinity after {} steps",
                            i + 1
                        )))
                    }
                };
            }
        }
        Ok(product)
    }
}

/// A periodic point is repelling when the modulus of its multiplier
/// exceeds 1.
pub fn classify_repelling(multiplier: Complex64) -> bool {
    multiplier.norm() > 1.0
}
