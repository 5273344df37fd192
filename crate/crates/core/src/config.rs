//! Experiment configuration: one structured text file describes a system,
//! a potential, the table depth, the comparison windows, and the output
//! formats, so that an experiment is reproducible from its config alone.
//!
//! Configs parse from TOML.  Validation turns a raw [`ExperimentConfig`]
//! into a [`ValidatedExperiment`]: constructed rational maps, a resolved
//! potential and counting mode, a derived growth-rate hypothesis when the
//! potential admits one, and a list of non-fatal warnings.
//!
//! Every config has a *semantic digest*: a SHA-256 over the canonical JSON
//! form of the fields that affect computed values.  Execution-only keys —
//! the thread count and the output destination — are excluded, so runs
//! that differ only in parallelism or target directory embed the same
//! digest and must produce byte-identical outputs.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dynamics::{Caps, Potential, SkewSystem, Tolerances};
use crate::error::{Error, Result};
use crate::maps::{Precision, RationalMap};
use crate::poly::ComplexPoly;

/// One generator, as coefficient lists in ascending degree order; each
/// coefficient is a `(re, im)` pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    pub numerator: Vec<[f64; 2]>,
    #[serde(default = "default_denominator")]
    pub denominator: Vec<[f64; 2]>,
}

fn default_denominator() -> Vec<[f64; 2]> {
    vec![[1.0, 0.0]]
}

/// Potential by name plus flat parameter list:
/// `zero` (no parameters), `constant` (one), `symbol_weight` (one per
/// generator), `log_modulus_derivative` (none).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSpec {
    pub name: String,
    #[serde(default)]
    pub parameters: Vec<f64>,
}

impl Default for PotentialSpec {
    fn default() -> Self {
        PotentialSpec {
            name: "zero".into(),
            parameters: Vec::new(),
        }
    }
}

/// Requested counting mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Numeric,
    #[default]
    Auto,
}

/// Counting mode after resolution against the potential.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ResolvedMode {
    Exact,
    Numeric,
}

/// Output file formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
    Plotdata,
}

/// Where and how results are written.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default = "default_directory")]
    pub directory: String,
    #[serde(default = "default_formats")]
    pub formats: Vec<OutputFormat>,
}

fn default_directory() -> String {
    "out".into()
}

fn default_formats() -> Vec<OutputFormat> {
    vec![OutputFormat::Csv, OutputFormat::Json]
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec {
            directory: default_directory(),
            formats: default_formats(),
        }
    }
}

fn default_n_max() -> usize {
    12
}
fn default_window() -> usize {
    25
}
fn default_burn_in() -> usize {
    5
}
fn default_band_ceiling() -> f64 {
    4.0
}
fn default_k_grid() -> Vec<f64> {
    vec![0.1, 0.5, 1.0, 2.0]
}
fn default_s_grid() -> Vec<[f64; 2]> {
    vec![[2.0, 0.0]]
}
fn default_rho_fractions() -> Vec<f64> {
    vec![0.5, 0.9, 0.99]
}
fn default_meissel_tail_tol() -> f64 {
    1e-6
}
fn default_dirichlet_n_max() -> usize {
    40
}
fn default_fit_residual_ceiling() -> f64 {
    0.25
}
fn default_true() -> bool {
    true
}

/// A complete experiment description.
///
/// `n_max` is the census depth (rows of the count table built by
/// enumeration); `N_max` is the summatory window end used by the
/// cumulative comparisons.  In exact mode the table is extended to cover
/// both; in numeric mode the window is clamped to `n_max` with a warning,
/// since each extra row costs an enumeration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Defaults to empty so a missing list surfaces as a semantic
    /// validation error rather than a parse failure.
    #[serde(default)]
    pub maps: Vec<MapSpec>,
    #[serde(default)]
    pub potential: PotentialSpec,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    #[serde(rename = "N_max", default = "default_window")]
    pub window_max: usize,
    /// Growth-rate hypothesis; derived from the potential when omitted.
    #[serde(default)]
    pub lambda: Option<f64>,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub caps: Caps,
    #[serde(default = "default_burn_in")]
    pub burn_in: usize,
    #[serde(default = "default_band_ceiling")]
    pub band_ceiling: f64,
    /// Exponent grid for the Meissel-style comparison.
    #[serde(default = "default_k_grid")]
    pub k_grid: Vec<f64>,
    /// Dirichlet evaluation points as `(re, im)` pairs with `re > 1`.
    #[serde(default = "default_s_grid")]
    pub s_grid: Vec<[f64; 2]>,
    /// Power-series evaluation points as fractions of the fitted radius.
    #[serde(default = "default_rho_fractions")]
    pub rho_radius_fractions: Vec<f64>,
    /// Certified-tail tolerance for Meissel-style sums.
    #[serde(default = "default_meissel_tail_tol")]
    pub meissel_tail_tol: f64,
    /// Truncation for the matched Dirichlet comparison.
    #[serde(default = "default_dirichlet_n_max")]
    pub dirichlet_n_max: usize,
    /// Window `[lo, hi]` for growth-rate fits; defaults to
    /// `[burn_in, table length]`.
    #[serde(default)]
    pub fit_window: Option<[usize; 2]>,
    /// Ceiling on the log-linear fit residual before the growth hypothesis
    /// is declared implausible.
    #[serde(default = "default_fit_residual_ceiling")]
    pub fit_residual_ceiling: f64,
    /// Worker threads; execution-only (not part of the semantic digest).
    #[serde(default)]
    pub threads: Option<usize>,
    /// Output destination; execution-only (not part of the semantic digest).
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default)]
    pub precision: Precision,
    /// Deterministic execution; always on, present for forward
    /// compatibility.
    #[serde(default = "default_true")]
    pub determinism: bool,
}

/// The semantic fields of a config, in declaration order, used for the
/// digest.  `threads` and `output` are deliberately absent.
#[derive(Serialize)]
struct SemanticView<'a> {
    maps: &'a [MapSpec],
    potential: &'a PotentialSpec,
    n_max: usize,
    window_max: usize,
    lambda: Option<f64>,
    mode: Mode,
    tolerances: &'a Tolerances,
    caps: &'a Caps,
    burn_in: usize,
    band_ceiling: f64,
    k_grid: &'a [f64],
    s_grid: &'a [[f64; 2]],
    rho_radius_fractions: &'a [f64],
    meissel_tail_tol: f64,
    dirichlet_n_max: usize,
    fit_window: Option<[usize; 2]>,
    fit_residual_ceiling: f64,
    precision: Precision,
    determinism: bool,
}

/// A config after construction and consistency checks.
#[derive(Debug, Clone)]
pub struct ValidatedExperiment {
    pub config: ExperimentConfig,
    pub system: SkewSystem,
    pub potential: Potential,
    pub mode: ResolvedMode,
    /// Growth-rate hypothesis: the configured value, or the derived one
    /// (`Σ degrees` for the zero potential, `e^c Σ degrees` for a constant
    /// potential), or `None` when it must be estimated from data.
    pub lambda: Option<f64>,
    /// Non-fatal observations (degree hypothesis, window clamping, …).
    pub warnings: Vec<String>,
}

impl ExperimentConfig {
    /// Parses a TOML config.
    pub fn from_toml_str(text: &str) -> Result<ExperimentConfig> {
        toml::from_str(text).map_err(|e| Error::InvalidInput(format!("config parse error: {e}")))
    }

    /// SHA-256 hex digest of the canonical JSON form of all semantic
    /// fields.  Two configs that differ only in `threads` or `output`
    /// share a digest.
    pub fn semantic_digest(&self) -> String {
        let view = SemanticView {
            maps: &self.maps,
            potential: &self.potential,
            n_max: self.n_max,
            window_max: self.window_max,
            lambda: self.lambda,
            mode: self.mode,
            tolerances: &self.tolerances,
            caps: &self.caps,
            burn_in: self.burn_in,
            band_ceiling: self.band_ceiling,
            k_grid: &self.k_grid,
            s_grid: &self.s_grid,
            rho_radius_fractions: &self.rho_radius_fractions,
            meissel_tail_tol: self.meissel_tail_tol,
            dirichlet_n_max: self.dirichlet_n_max,
            fit_window: self.fit_window,
            fit_residual_ceiling: self.fit_residual_ceiling,
            precision: self.precision,
            determinism: self.determinism,
        };
        let json = serde_json::to_string(&view).expect("semantic view serializes");
        let mut hasher = Sha256::new();
        hasher.update(json.as_bytes());
        let out = hasher.finalize();
        let mut hex = String::with_capacity(64);
        for byte in out {
            use std::fmt::Write;
            write!(hex, "{byte:02x}").expect("writing to a string cannot fail");
        }
        hex
    }

    fn build_maps(&self) -> Result<Vec<RationalMap>> {
        if self.maps.is_empty() {
            return Err(Error::InvalidInput("maps list is empty".into()));
        }
        let mut out = Vec::with_capacity(self.maps.len());
        for (i, spec) in self.maps.iter().enumerate() {
            for (part, coeffs) in [
                ("numerator", &spec.numerator),
                ("denominator", &spec.denominator),
            ] {
                if coeffs.is_empty() {
                    return Err(Error::InvalidInput(format!("map {}: empty {part}", i + 1)));
                }
                if coeffs.iter().flatten().any(|c| !c.is_finite()) {
                    return Err(Error::InvalidInput(format!(
                        "map {}: non-finite coefficient in {part}",
                        i + 1
                    )));
                }
            }
            let to_poly = |pairs: &[[f64; 2]]| {
                ComplexPoly::new(
                    pairs
                        .iter()
                        .map(|&[re, im]| Complex64::new(re, im))
                        .collect(),
                )
            };
            out.push(RationalMap::new(
                to_poly(&spec.numerator),
                to_poly(&spec.denominator),
            )?);
        }
        Ok(out)
    }

    fn build_potential(&self, generators: usize) -> Result<Potential> {
        let spec = &self.potential;
        let arity_error = |want: &str| {
            Err(Error::InvalidInput(format!(
                "potential '{}' takes {want}, got {} parameter(s)",
                spec.name,
                spec.parameters.len()
            )))
        };
        match spec.name.as_str() {
            "zero" => {
                if !spec.parameters.is_empty() {
                    return arity_error("no parameters");
                }
                Ok(Potential::Zero)
            }
            "constant" => {
                if spec.parameters.len() != 1 {
                    return arity_error("exactly one parameter");
                }
                let c = spec.parameters[0];
                if !c.is_finite() {
                    return Err(Error::InvalidInput(
                        "constant potential parameter must be finite".into(),
                    ));
                }
                Ok(Potential::Constant(c))
            }
            "symbol_weight" => {
                if spec.parameters.len() != generators {
                    return Err(Error::InvalidInput(format!(
                        "potential 'symbol_weight' needs one weight per generator \
                         ({generators}), got {}",
                        spec.parameters.len()
                    )));
                }
                if spec.parameters.iter().any(|w| !w.is_finite()) {
                    return Err(Error::InvalidInput("symbol weights must be finite".into()));
                }
                Ok(Potential::SymbolWeight(spec.parameters.clone()))
            }
            "log_modulus_derivative" => {
                if !spec.parameters.is_empty() {
                    return arity_error("no parameters");
                }
                Ok(Potential::LogModulusDerivative)
            }
            other => Err(Error::InvalidInput(format!(
                "unknown potential '{other}' (expected zero, constant, symbol_weight, \
                 or log_modulus_derivative)"
            ))),
        }
    }

    /// Validates the config: builds the system, resolves potential and
    /// mode, derives the growth-rate hypothesis, and collects warnings.
    pub fn validate(&self) -> Result<ValidatedExperiment> {
        if !self.determinism {
            return Err(Error::InvalidInput("determinism cannot be disabled".into()));
        }
        if self.n_max == 0 {
            return Err(Error::InvalidInput("n_max must be at least 1".into()));
        }
        if self.window_max == 0 {
            return Err(Error::InvalidInput("N_max must be at least 1".into()));
        }
        if !(self.band_ceiling > 0.0) || !self.band_ceiling.is_finite() {
            return Err(Error::InvalidInput(
                "band_ceiling must be positive and finite".into(),
            ));
        }
        if let Some(lambda) = self.lambda {
            if !lambda.is_finite() {
                return Err(Error::InvalidInput("lambda must be finite".into()));
            }
        }
        if self.k_grid.iter().any(|&k| !(k > 0.0) || !k.is_finite()) {
            return Err(Error::InvalidInput(
                "k_grid entries must be positive and finite".into(),
            ));
        }
        if self
            .rho_radius_fractions
            .iter()
            .any(|&f| !(f > 0.0 && f < 1.0))
        {
            return Err(Error::InvalidInput(
                "rho_radius_fractions must lie strictly between 0 and 1".into(),
            ));
        }
        if !(self.meissel_tail_tol > 0.0) {
            return Err(Error::InvalidInput(
                "meissel_tail_tol must be positive".into(),
            ));
        }
        if self.dirichlet_n_max == 0 {
            return Err(Error::InvalidInput(
                "dirichlet_n_max must be at least 1".into(),
            ));
        }
        if let Some([lo, hi]) = self.fit_window {
            if lo == 0 || hi < lo {
                return Err(Error::InvalidInput(format!(
                    "fit_window [{lo}, {hi}] is not a valid range"
                )));
            }
        }
        if !(self.fit_residual_ceiling > 0.0) {
            return Err(Error::InvalidInput(
                "fit_residual_ceiling must be positive".into(),
            ));
        }
        if self.threads == Some(0) {
            return Err(Error::InvalidInput(
                "threads must be at least 1 when given".into(),
            ));
        }
        if self.output.formats.is_empty() {
            return Err(Error::InvalidInput(
                "output.formats must name at least one format".into(),
            ));
        }
        for s in &self.s_grid {
            if !(s[0] > 1.0) {
                return Err(Error::InvalidInput(format!(
                    "Dirichlet point ({}, {}) needs real part above 1",
                    s[0], s[1]
                )));
            }
        }

        let maps = self.build_maps()?;
        let potential = self.build_potential(maps.len())?;

        let mut warnings = Vec::new();
        if !maps.iter().any(|m| m.degree() >= 2) {
            warnings.push(
                "no generator has degree at least 2; the growth hypotheses assume one".into(),
            );
        }

        let mode = match self.mode {
            Mode::Exact => {
                if !potential.is_zero() {
                    return Err(Error::InvalidInput(
                        "mode = \"exact\" requires the zero potential".into(),
                    ));
                }
                ResolvedMode::Exact
            }
            Mode::Numeric => ResolvedMode::Numeric,
            Mode::Auto => {
                if potential.is_zero() {
                    ResolvedMode::Exact
                } else {
                    ResolvedMode::Numeric
                }
            }
        };

        if mode == ResolvedMode::Numeric && self.window_max > self.n_max {
            warnings.push(format!(
                "N_max = {} exceeds n_max = {}; the summatory window is clamped to {} in \
                 numeric mode",
                self.window_max, self.n_max, self.n_max
            ));
        }

        let degree_sum: usize = maps.iter().map(|m| m.degree()).sum();
        let lambda = self.lambda.or(match &potential {
            Potential::Zero => Some(degree_sum as f64),
            Potential::Constant(c) => Some(c.exp() * degree_sum as f64),
            _ => None,
        });

        let system = SkewSystem::new(maps, self.tolerances, self.caps, self.precision)?;
        Ok(ValidatedExperiment {
            config: self.clone(),
            system,
            potential,
            mode,
            lambda,
            warnings,
        })
    }
}

impl ValidatedExperiment {
    /// Table depth to build: in exact mode the table must cover both the
    /// census depth and the summatory window; in numeric mode only `n_max`.
    pub fn table_len(&self) -> usize {
        match self.mode {
            ResolvedMode::Exact => self.config.n_max.max(self.config.window_max),
            ResolvedMode::Numeric => self.config.n_max,
        }
    }

    /// Effective summatory window end (clamped to the table in numeric
    /// mode).
    pub fn window_max(&self) -> usize {
        self.config.window_max.min(self.table_len())
    }

    /// Growth-fit window: configured, or `[max(burn_in, 1), table_len]`.
    pub fn fit_window(&self) -> (usize, usize) {
        match self.config.fit_window {
            Some([lo, hi]) => (lo, hi),
            None => (self.config.burn_in.max(1), self.table_len()),
        }
    }

    /// Dirichlet evaluation points.
    pub fn s_points(&self) -> Vec<Complex64> {
        self.config
            .s_grid
            .iter()
            .map(|&[re, im]| Complex64::new(re, im))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const REFERENCE: &str = r#"
        n_max = 12
        N_max = 25

        [[maps]]
        numerator = [[0.0, 0.0], [0.0, 0.0], [1.0, 0.0]]

        [[maps]]
        numerator = [[0.0, 0.0], [0.0, 0.0], [1.0, 0.0]]
    "#;

    #[test]
    fn minimal_config_parses_with_defaults() {
        let cfg = ExperimentConfig::from_toml_str(REFERENCE).unwrap();
        assert_eq!(cfg.maps.len(), 2);
        assert_eq!(cfg.n_max, 12);
        assert_eq!(cfg.window_max, 25);
        assert_eq!(cfg.mode, Mode::Auto);
        assert_eq!(cfg.burn_in, 5);
        assert_eq!(cfg.band_ceiling, 4.0);
        assert_eq!(cfg.k_grid, vec![0.1, 0.5, 1.0, 2.0]);
        assert!(cfg.determinism);
        let v = cfg.validate().unwrap();
        assert_eq!(v.mode, ResolvedMode::Exact);
        assert_eq!(v.lambda, Some(4.0));
        assert_eq!(v.system.degrees(), vec![2, 2]);
        assert_eq!(v.table_len(), 25);
        assert!(v.warnings.is_empty());
    }

    #[test]
    fn digest_ignores_execution_keys_only() {
        let base = ExperimentConfig::from_toml_str(REFERENCE).unwrap();
        let mut threaded = base.clone();
        threaded.threads = Some(4);
        threaded.output.directory = "elsewhere".into();
        assert_eq!(base.semantic_digest(), threaded.semantic_digest());
        assert_eq!(base.semantic_digest().len(), 64);

        let mut deeper = base.clone();
        deeper.n_max = 13;
        assert_ne!(base.semantic_digest(), deeper.semantic_digest());

        let mut other_potential = base.clone();
        other_potential.potential = PotentialSpec {
            name: "constant".into(),
            parameters: vec![0.3],
        };
        assert_ne!(base.semantic_digest(), other_potential.semantic_digest());
    }

    #[test]
    fn mode_resolution_follows_the_potential() {
        let mut cfg = ExperimentConfig::from_toml_str(REFERENCE).unwrap();
        cfg.potential = PotentialSpec {
            name: "constant".into(),
            parameters: vec![0.3],
        };
        let v = cfg.validate().unwrap();
        assert_eq!(v.mode, ResolvedMode::Numeric);
        // λ derives as e^c · Σ degrees.
        let expect = 0.3_f64.exp() * 4.0;
        assert!((v.lambda.unwrap() - expect).abs() < 1e-15);

        cfg.mode = Mode::Exact;
        assert!(matches!(cfg.validate(), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn numeric_mode_clamps_the_window_with_a_warning() {
        let mut cfg = ExperimentConfig::from_toml_str(REFERENCE).unwrap();
        cfg.mode = Mode::Numeric;
        let v = cfg.validate().unwrap();
        assert_eq!(v.table_len(), 12);
        assert_eq!(v.window_max(), 12);
        assert!(v.warnings.iter().any(|w| w.contains("clamped")));
    }

    #[test]
    fn invalid_configs_are_refused() {
        for (toml, needle) in [
            ("n_max = 3", "maps list is empty"),
            ("maps = [{ numerator = [] }]", "empty numerator"),
            (
                "maps = [{ numerator = [[1.0, 0.0], [2.0, 0.0]] }]\ndeterminism = false",
                "determinism",
            ),
        ] {
            match ExperimentConfig::from_toml_str(toml).and_then(|c| c.validate()) {
                Err(Error::InvalidInput(msg)) => {
                    assert!(msg.contains(needle), "{msg} missing {needle}")
                }
                other => panic!("expected invalid-input error for {toml:?}, got {other:?}"),
            }
        }
        // Unknown keys are config errors, not silently ignored.
        assert!(ExperimentConfig::from_toml_str("nmax = 3").is_err());
        // Wrong potential arity.
        let mut cfg = ExperimentConfig::from_toml_str(REFERENCE).unwrap();
        cfg.potential = PotentialSpec {
            name: "symbol_weight".into(),
            parameters: vec![0.1],
        };
        assert!(matches!(cfg.validate(), Err(Error::InvalidInput(_))));
        cfg.potential = PotentialSpec {
            name: "entropy".into(),
            parameters: vec![],
        };
        assert!(matches!(cfg.validate(), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn degree_one_systems_warn_but_validate() {
        let toml = r#"
            [[maps]]
            numerator = [[1.0, 0.0], [2.0, 0.0]]
        "#;
        let v = ExperimentConfig::from_toml_str(toml)
            .unwrap()
            .validate()
            .unwrap();
        assert_eq!(v.system.degrees(), vec![1]);
        assert!(v.warnings.iter().any(|w| w.contains("degree")));
    }

    #[test]
    fn full_config_round_trips() {
        let toml = r#"
            n_max = 6
            N_max = 10
            lambda = 4.0
            mode = "exact"
            burn_in = 3
            band_ceiling = 2.5
            k_grid = [0.1, 1.0]
            s_grid = [[2.0, 0.0], [1.5, 0.5]]
            rho_radius_fractions = [0.5]
            meissel_tail_tol = 1e-7
            dirichlet_n_max = 10
            fit_window = [4, 10]
            fit_residual_ceiling = 0.1
            threads = 2
            precision = "extended"
            determinism = true

            [[maps]]
            numerator = [[0.0, 0.0], [0.0, 0.0], [1.0, 0.0]]
            denominator = [[1.0, 0.0]]

            [[maps]]
            numerator = [[-1.0, 0.0], [0.0, 0.0], [1.0, 0.0]]

            [potential]
            name = "zero"

            [tolerances]
            root_cluster = 1e-8
            period_closure = 1e-7
            residual_ceiling = 1e-6

            [caps]
            max_degree = 2048
            max_words = 4096
            zeta_terms = 50000000

            [output]
            directory = "results"
            formats = ["csv", "json", "plotdata"]
        "#;
        let cfg = ExperimentConfig::from_toml_str(toml).unwrap();
        let v = cfg.validate().unwrap();
        assert_eq!(v.mode, ResolvedMode::Exact);
        assert_eq!(v.fit_window(), (4, 10));
        assert_eq!(v.s_points()[1], Complex64::new(1.5, 0.5));
        assert_eq!(cfg.output.formats.len(), 3);
        assert_eq!(cfg.caps.max_degree, 2048);
        assert_eq!(v.table_len(), 10);
    }
}
