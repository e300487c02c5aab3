//! Physical front-end parameters, the effective model parameters derived
//! from them, and the regime checks that justify the effective model.
//!
//! All downstream computations consume [`EffectiveParams`] only. Rates share
//! one declared unit; the default convention measures everything in units of
//! the Raman coupling `g`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_MARGIN: f64 = 10.0;
pub const UNIT_G: &str = "g";

/// Raw cavity/atom quantities before adiabatic elimination of the excited
/// level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalParams {
    /// Atom-cavity couplings `λ_1`, `λ_2`.
    pub lambda1: f64,
    pub lambda2: f64,
    /// Pump Rabi frequencies `Ω_1`, `Ω_2`.
    pub omega1cap: f64,
    pub omega2cap: f64,
    /// Pump detuning `Δ = ω_31 − ω_L`.
    pub delta: f64,
    /// Ground-state splitting `ω_21`.
    pub omega21: f64,
    /// Half mode splitting, `ω_{1,2} = ω_L ± ν`.
    pub nu: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub n_atoms: u64,
    #[serde(default = "default_unit")]
    pub unit: String,
}

fn default_unit() -> String {
    UNIT_G.to_string()
}

impl PhysicalParams {
    pub fn check(&self) -> Result<()> {
        let rates = [
            ("lambda1", self.lambda1),
            ("lambda2", self.lambda2),
            ("omega1cap", self.omega1cap),
            ("omega2cap", self.omega2cap),
            ("delta", self.delta),
            ("omega21", self.omega21),
            ("nu", self.nu),
            ("kappa1", self.kappa1),
            ("kappa2", self.kappa2),
        ];
        for (name, v) in rates {
            if !v.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be finite, got {v}"),
                });
            }
        }
        if self.delta == 0.0 {
            return Err(Error::ZeroDetuning);
        }
        if self.n_atoms < 1 {
            return Err(Error::InvalidParameter {
                name: "n_atoms",
                reason: "must be at least 1".into(),
            });
        }
        check_kappa("kappa1", self.kappa1)?;
        check_kappa("kappa2", self.kappa2)?;
        Ok(())
    }

    /// Pump-dressed splitting `ω̃ = ω_21 + (Ω_1² − Ω_2²)/Δ`.
    pub fn omega_tilde(&self) -> f64 {
        self.omega21 + (self.omega1cap.powi(2) - self.omega2cap.powi(2)) / self.delta
    }
}

fn check_kappa(name: &'static str, k: f64) -> Result<()> {
    if !(k.is_finite() && k >= 0.0) {
        return Err(Error::InvalidParameter {
            name,
            reason: format!("decay rate must be finite and non-negative, got {k}"),
        });
    }
    Ok(())
}

/// Model-level parameters: Raman couplings `g_j`, collective-mode frequency
/// `ω′`, cavity decay rates and atom number, with the derived
/// `χ_j = g_j² N/ω′` and `χ = g_1 g_2 N/ω′`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EffectiveParams {
    g1: f64,
    g2: f64,
    omega_prime: f64,
    kappa1: f64,
    kappa2: f64,
    n_atoms: u64,
    chi1: f64,
    chi2: f64,
    chi: f64,
    unit: String,
}

impl EffectiveParams {
    /// Builds the effective parameter set directly, in units of g or any other unit.
    ///
    /// `n_atoms = 0` is accepted and describes the uncoupled limit.
    pub fn from_direct(
        g1: f64,
        g2: f64,
        omega_prime: f64,
        kappa1: f64,
        kappa2: f64,
        n_atoms: u64,
        unit: impl Into<String>,
    ) -> Result<Self> {
        if !(omega_prime.is_finite() && omega_prime > 0.0) {
            return Err(Error::NonPositiveOmegaPrime(omega_prime));
        }
        for (name, v) in [("g1", g1), ("g2", g2)] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be finite, got {v}"),
                });
            }
        }
        check_kappa("kappa1", kappa1)?;
        check_kappa("kappa2", kappa2)?;
        let n = n_atoms as f64;
        Ok(Self {
            g1,
            g2,
            omega_prime,
            kappa1,
            kappa2,
            n_atoms,
            chi1: g1 * g1 * n / omega_prime,
            chi2: g2 * g2 * n / omega_prime,
            chi: g1 * g2 * n / omega_prime,
            unit: unit.into(),
        })
    }

    /// Units of g: `g_1 = g_2 = 1`, symmetric decay, unit `"g"`.
    pub fn symmetric(omega_prime: f64, kappa: f64, n_atoms: u64) -> Result<Self> {
        Self::from_direct(1.0, 1.0, omega_prime, kappa, kappa, n_atoms, UNIT_G)
    }

    pub fn g1(&self) -> f64 {
        self.g1
    }
    pub fn g2(&self) -> f64 {
        self.g2
    }
    pub fn omega_prime(&self) -> f64 {
        self.omega_prime
    }
    pub fn kappa1(&self) -> f64 {
        self.kappa1
    }
    pub fn kappa2(&self) -> f64 {
        self.kappa2
    }
    pub fn n_atoms(&self) -> u64 {
        self.n_atoms
    }
    pub fn chi1(&self) -> f64 {
        self.chi1
    }
    pub fn chi2(&self) -> f64 {
        self.chi2
    }
    pub fn chi(&self) -> f64 {
        self.chi
    }
    pub fn unit(&self) -> &str {
        &self.unit
    }

    /// `g_1 g_2 N`, the pair-creation strength entering the spectra.
    pub fn pair_strength(&self) -> f64 {
        self.g1 * self.g2 * self.n_atoms as f64
    }

    /// Both decay rates replaced by `kappa`.
    pub fn with_kappa(&self, kappa: f64) -> Result<Self> {
        Self::from_direct(
            self.g1,
            self.g2,
            self.omega_prime,
            kappa,
            kappa,
            self.n_atoms,
            self.unit.clone(),
        )
    }

    pub fn with_n_atoms(&self, n_atoms: u64) -> Result<Self> {
        Self::from_direct(
            self.g1,
            self.g2,
            self.omega_prime,
            self.kappa1,
            self.kappa2,
            n_atoms,
            self.unit.clone(),
        )
    }

    pub fn with_omega_prime(&self, omega_prime: f64) -> Result<Self> {
        Self::from_direct(
            self.g1,
            self.g2,
            omega_prime,
            self.kappa1,
            self.kappa2,
            self.n_atoms,
            self.unit.clone(),
        )
    }

    /// Same couplings with the off-diagonal pair channel removed.
    pub fn uncoupled(&self) -> Self {
        Self::from_direct(0.0, 0.0, self.omega_prime, self.kappa1, self.kappa2, 0, self.unit.clone())
            .expect("uncoupled copy of a valid parameter set")
    }
}

/// Adiabatic elimination of the excited level: `g_j = λ_j Ω_j / Δ`,
/// `ω′ = ω_21 + (Ω_1² − Ω_2²)/Δ − ν`.
pub fn derive_effective(p: &PhysicalParams) -> Result<EffectiveParams> {
    p.check()?;
    let g1 = p.lambda1 * p.omega1cap / p.delta;
    let g2 = p.lambda2 * p.omega2cap / p.delta;
    let omega_prime = p.omega_tilde() - p.nu;
    EffectiveParams::from_direct(g1, g2, omega_prime, p.kappa1, p.kappa2, p.n_atoms, p.unit.clone())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimeCheck {
    pub name: String,
    /// Human-readable form of the tested inequality.
    pub inequality: String,
    pub larger: f64,
    pub smaller: f64,
    pub ratio: f64,
    pub margin: f64,
    pub passed: bool,
}

impl RegimeCheck {
    fn new(name: &str, inequality: &str, larger: f64, smaller: f64, margin: f64) -> Self {
        let ratio = if smaller == 0.0 {
            f64::INFINITY
        } else {
            larger / smaller
        };
        Self {
            name: name.to_string(),
            inequality: inequality.to_string(),
            larger,
            smaller,
            ratio,
            margin,
            // decimal inputs like Δ = 10λ land a few ulps either side of 10
            passed: ratio >= margin * (1.0 - 1e-12),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimeReport {
    pub checks: Vec<RegimeCheck>,
}

impl RegimeReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&RegimeCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Checks that are required for the effective model itself; the
    /// analytic-approximation check is informational.
    pub fn model_valid(&self) -> bool {
        self.checks
            .iter()
            .filter(|c| c.name != CHECK_APPROX)
            .all(|c| c.passed)
    }
}

pub const CHECK_EXCITED_LEVEL: &str = "excited_level_elimination";
pub const CHECK_LOW_EXCITATION_1: &str = "low_excitation_mode1";
pub const CHECK_LOW_EXCITATION_2: &str = "low_excitation_mode2";
pub const CHECK_APPROX: &str = "analytic_approximation";

/// Full regime report for a physical parameter set and its derived
/// effective parameters.
pub fn validate_regimes(p: &PhysicalParams, e: &EffectiveParams, margin: f64) -> RegimeReport {
    let strongest = [p.omega1cap, p.omega2cap, p.lambda1, p.lambda2]
        .into_iter()
        .map(f64::abs)
        .fold(0.0, f64::max);
    let mut checks = vec![RegimeCheck::new(
        CHECK_EXCITED_LEVEL,
        "|Delta| >> max(Omega_j, lambda_j)",
        p.delta.abs(),
        strongest,
        margin,
    )];
    checks.extend(effective_checks(e, margin));
    RegimeReport { checks }
}

/// Regime checks that only need the effective parameters.
pub fn validate_effective(e: &EffectiveParams, margin: f64) -> RegimeReport {
    RegimeReport {
        checks: effective_checks(e, margin),
    }
}

fn effective_checks(e: &EffectiveParams, margin: f64) -> Vec<RegimeCheck> {
    let sqrt_n = (e.n_atoms as f64).sqrt();
    vec![
        RegimeCheck::new(
            CHECK_LOW_EXCITATION_1,
            "omega' >> g1 sqrt(N)",
            e.omega_prime,
            e.g1.abs() * sqrt_n,
            margin,
        ),
        RegimeCheck::new(
            CHECK_LOW_EXCITATION_2,
            "omega' >> g2 sqrt(N)",
            e.omega_prime,
            e.g2.abs() * sqrt_n,
            margin,
        ),
        // Compared literally in the declared rate unit.
        RegimeCheck::new(
            CHECK_APPROX,
            "omega' >> g1 g2 N",
            e.omega_prime,
            e.pair_strength().abs(),
            margin,
        ),
    ]
}
