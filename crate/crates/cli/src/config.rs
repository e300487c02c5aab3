//! TOML run configuration. A file holds exactly one model block,
//! `[physical]` or `[effective]`, plus optional per-command sections.
//! Command-line flags are applied on top by [`Overrides`].

use std::path::Path;

use bec_squeeze::params::{derive_effective, DEFAULT_MARGIN, UNIT_G};
use bec_squeeze::spectra::{DEFAULT_POLE_GUARD, DEFAULT_VERDICT_TOLERANCE};
use bec_squeeze::sweeps::{
    WindowSide, DEFAULT_OMEGA_TOLERANCE, DEFAULT_SCAN_POINTS, DEFAULT_WINDOW_SPAN,
};
use bec_squeeze::{EffectiveParams, PhysicalParams};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EffectiveBlock {
    #[serde(default = "one")]
    pub g1: f64,
    #[serde(default = "one")]
    pub g2: f64,
    pub omega_prime: f64,
    /// Shorthand for equal decay rates; `kappa1`/`kappa2` take precedence.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa2: Option<f64>,
    pub n_atoms: u64,
    #[serde(default = "unit_g")]
    pub unit: String,
}

fn one() -> f64 {
    1.0
}

fn unit_g() -> String {
    UNIT_G.to_string()
}

impl EffectiveBlock {
    fn to_params(&self) -> Result<EffectiveParams, CliError> {
        let pick = |specific: Option<f64>, name: &str| {
            specific.or(self.kappa).ok_or_else(|| {
                CliError::Config(format!("[effective] needs {name} or kappa"))
            })
        };
        let k1 = pick(self.kappa1, "kappa1")?;
        let k2 = pick(self.kappa2, "kappa2")?;
        Ok(EffectiveParams::from_direct(
            self.g1,
            self.g2,
            self.omega_prime,
            k1,
            k2,
            self.n_atoms,
            self.unit.clone(),
        )?)
    }

    fn from_params(e: &EffectiveParams) -> Self {
        Self {
            g1: e.g1(),
            g2: e.g2(),
            omega_prime: e.omega_prime(),
            kappa: None,
            kappa1: Some(e.kappa1()),
            kappa2: Some(e.kappa2()),
            n_atoms: e.n_atoms(),
            unit: e.unit().to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputSignSetting {
    #[default]
    Minus,
    Plus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumSection {
    pub theta: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_max: Option<f64>,
    pub omega_points: usize,
    /// Adds the large-detuning closed form as an `S_approx` column.
    pub approx: bool,
    pub pole_guard: f64,
    pub input_sign: InputSignSetting,
}

impl Default for SpectrumSection {
    fn default() -> Self {
        Self {
            theta: 0.0,
            omega_min: None,
            omega_max: None,
            omega_points: 2001,
            approx: false,
            pole_guard: DEFAULT_POLE_GUARD,
            input_sign: InputSignSetting::Minus,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum SweepParameter {
    #[default]
    #[serde(rename = "kappa")]
    Kappa,
    #[serde(rename = "N")]
    AtomNumber,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WindowSetting {
    #[default]
    Negative,
    Positive,
    Full,
}

impl From<WindowSetting> for WindowSide {
    fn from(w: WindowSetting) -> Self {
        match w {
            WindowSetting::Negative => WindowSide::Negative,
            WindowSetting::Positive => WindowSide::Positive,
            WindowSetting::Full => WindowSide::Full,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub parameter: SweepParameter,
    pub theta: f64,
    pub kappa: Vec<f64>,
    pub n_atoms: Vec<u64>,
    pub window: WindowSetting,
    pub window_span: f64,
    pub scan_points: usize,
    pub omega_tolerance: f64,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            parameter: SweepParameter::Kappa,
            theta: 0.0,
            kappa: vec![0.25, 0.5, 1.0, 2.0, 4.0, 10.0],
            n_atoms: vec![100, 1000, 10_000],
            window: WindowSetting::Negative,
            window_span: DEFAULT_WINDOW_SPAN,
            scan_points: DEFAULT_SCAN_POINTS,
            omega_tolerance: DEFAULT_OMEGA_TOLERANCE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvolveSection {
    /// Evolution time in units of `1/χ`; ignored when `tau` is set.
    pub chi_tau: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    pub n_max: usize,
    pub tail_threshold: f64,
    pub three_mode: bool,
    /// Truncations for `a₁`, `a₂`, `b` in the three-mode run.
    pub truncations: [usize; 3],
}

impl Default for EvolveSection {
    fn default() -> Self {
        Self {
            chi_tau: 0.3,
            tau: None,
            n_max: 40,
            tail_threshold: 1e-12,
            three_mode: false,
            truncations: [14, 14, 4],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DriftSetting {
    #[default]
    Physical,
    Flipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ValidateSection {
    pub regime_margin: f64,
    pub drift_sign: DriftSetting,
    pub approx_tolerance: f64,
    /// Half-width, in units of `max(g₁, g₂)`, of the approximation check.
    pub approx_span: f64,
    pub verdict_tolerance: f64,
}

impl Default for ValidateSection {
    fn default() -> Self {
        Self {
            regime_margin: DEFAULT_MARGIN,
            drift_sign: DriftSetting::Physical,
            approx_tolerance: 0.02,
            approx_span: 3.0,
            verdict_tolerance: DEFAULT_VERDICT_TOLERANCE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub physical: Option<PhysicalParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub effective: Option<EffectiveBlock>,
    #[serde(default)]
    pub spectrum: SpectrumSection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub evolve: EvolveSection,
    #[serde(default)]
    pub validate: ValidateSection,
}

impl Default for RunConfig {
    /// Used when no file is given: `g = 1`, `ω′ = 10⁴g`, `κ = 10g`, `N = 10⁴`.
    fn default() -> Self {
        Self {
            physical: None,
            effective: Some(EffectiveBlock {
                g1: 1.0,
                g2: 1.0,
                omega_prime: 1e4,
                kappa: None,
                kappa1: Some(10.0),
                kappa2: Some(10.0),
                n_atoms: 10_000,
                unit: unit_g(),
            }),
            spectrum: SpectrumSection::default(),
            sweep: SweepSection::default(),
            evolve: EvolveSection::default(),
            validate: ValidateSection::default(),
        }
    }
}

/// Flag values that win over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub theta: Option<f64>,
    pub omega_min: Option<f64>,
    pub omega_max: Option<f64>,
    pub omega_points: Option<usize>,
    pub approx: bool,
    pub flip_drift_sign: bool,
    pub three_mode: bool,
    pub chi_tau: Option<f64>,
    pub sweep_parameter: Option<SweepParameter>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(t) = o.theta {
            self.spectrum.theta = t;
            self.sweep.theta = t;
        }
        if o.omega_min.is_some() {
            self.spectrum.omega_min = o.omega_min;
        }
        if o.omega_max.is_some() {
            self.spectrum.omega_max = o.omega_max;
        }
        if let Some(n) = o.omega_points {
            self.spectrum.omega_points = n;
        }
        if o.approx {
            self.spectrum.approx = true;
        }
        if o.flip_drift_sign {
            self.validate.drift_sign = DriftSetting::Flipped;
        }
        if o.three_mode {
            self.evolve.three_mode = true;
        }
        if let Some(c) = o.chi_tau {
            self.evolve.chi_tau = c;
            self.evolve.tau = None;
        }
        if let Some(p) = o.sweep_parameter {
            self.sweep.parameter = p;
        }
    }

    /// Checks block exclusivity, derives the model and fills every default
    /// that depends on it.
    pub fn resolve(mut self) -> Result<Resolved, CliError> {
        let effective = match (&self.physical, &self.effective) {
            (Some(p), None) => {
                p.check()?;
                derive_effective(p)?
            }
            (None, Some(b)) => b.to_params()?,
            (Some(_), Some(_)) => {
                return Err(CliError::Config(
                    "give exactly one of [physical] and [effective], not both".into(),
                ))
            }
            (None, None) => {
                return Err(CliError::Config(
                    "missing model block: add [physical] or [effective]".into(),
                ))
            }
        };
        if let Some(b) = &mut self.effective {
            *b = EffectiveBlock::from_params(&effective);
        }
        let span = DEFAULT_WINDOW_SPAN
            * [effective.kappa1(), effective.kappa2(), effective.g1(), effective.g2()]
                .into_iter()
                .fold(0.0, f64::max)
                .max(f64::MIN_POSITIVE);
        self.spectrum.omega_min.get_or_insert(-span);
        self.spectrum.omega_max.get_or_insert(span);
        self.check_sections()?;
        Ok(Resolved {
            config: self,
            effective,
        })
    }

    fn check_sections(&self) -> Result<(), CliError> {
        let s = &self.spectrum;
        if !s.theta.is_finite() || !self.sweep.theta.is_finite() {
            return Err(CliError::Config("theta must be finite".into()));
        }
        if s.omega_points == 0 {
            return Err(CliError::Config("omega_points must be at least 1".into()));
        }
        let (lo, hi) = (s.omega_min.unwrap_or(0.0), s.omega_max.unwrap_or(0.0));
        if !(lo.is_finite() && hi.is_finite()) || (s.omega_points > 1 && lo >= hi) {
            return Err(CliError::Config(format!(
                "omega grid needs omega_min < omega_max, got [{lo}, {hi}]"
            )));
        }
        if !(s.pole_guard > 0.0) {
            return Err(CliError::Config("pole_guard must be positive".into()));
        }
        let w = &self.sweep;
        if w.scan_points < 3 || !(w.omega_tolerance > 0.0) || !(w.window_span > 0.0) {
            return Err(CliError::Config(
                "sweep needs scan_points >= 3 and positive omega_tolerance and window_span"
                    .into(),
            ));
        }
        let e = &self.evolve;
        if e.n_max < 1 || e.truncations.contains(&0) {
            return Err(CliError::Config("truncations must be at least 1".into()));
        }
        if !(e.chi_tau >= 0.0) || e.tau.is_some_and(|t| !(t >= 0.0)) {
            return Err(CliError::Config("evolution time must be non-negative".into()));
        }
        Ok(())
    }
}

/// A configuration with the model derived and every default filled in.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub config: RunConfig,
    pub effective: EffectiveParams,
}

impl Resolved {
    /// The resolved configuration as TOML, reusable as an input file.
    pub fn echo(&self) -> String {
        toml::to_string(&self.config).expect("configuration serializes")
    }
}
