//! Closed-form SU(1,1) disentangling of the two-mode effective evolution.
//!
//! With `K₃ = ½(a₁†a₁ + a₂a₂†)` and `K₊ = a₁†a₂† = K₋†`, the pair sector of
//! the effective Hamiltonian is `H = k₃ K₃ + k_p (K₊ + K₋)` up to a global
//! phase, and
//!
//! ```text
//! exp(−iHτ) = exp(Γ K₊) · exp(ln Γ̃ · K₃) · exp(Γ K₋)
//! Γ̃ = (cosh β − γ̃/(2β) sinh β)^(−2)
//! Γ  = 2γ sinh β / (2β cosh β − γ̃ sinh β)
//! ```
//!
//! with `γ = −i k_p τ`, `γ̃ = −i k₃ τ` and `β² = γ̃²/4 − γ²`.

use serde::Serialize;

use crate::params::EffectiveParams;
use crate::C64;

/// Below this `|β|` the removable singularity at `β = 0` is handled with a
/// three-term Taylor expansion of `cosh β` and `sinh β / β`.
pub const SERIES_SWITCH: f64 = 1e-6;

/// The pair-sector Hamiltonian `k₃ K₃ + k_p (K₊ + K₋)`.
///
/// Eliminating the collective mode from the three-mode Hamiltonian gives
/// `H = −X†X/ω′` with `X = √N (g₁a₁ + g₂a₂†)`, i.e.
/// `−[χ₁ a₁†a₁ + χ₂ a₂a₂† + χ (a₁†a₂† + a₁a₂)]`. On the pair sector
/// `χ₁ a₁†a₁ + χ₂ a₂a₂† = (χ₁ + χ₂) K₃ + const`, so `k₃ = −(χ₁ + χ₂)` and
/// `k_p = −χ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairHamiltonian {
    pub k3: f64,
    pub kp: f64,
}

impl PairHamiltonian {
    pub fn from_effective(e: &EffectiveParams) -> Self {
        Self {
            k3: -(e.chi1() + e.chi2()),
            kp: -e.chi(),
        }
    }
}

/// Which square root of `β²` is used; the results do not depend on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Principal,
    Flipped,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Su11Coefficients {
    pub gamma: C64,
    pub gamma_tilde: C64,
    pub beta: C64,
    /// `Γ`
    pub pair_amplitude: C64,
    /// `Γ̃`
    pub squeeze_factor: C64,
    /// `cosh β − (γ̃/2) sinh β / β`; the vacuum amplitude is its inverse.
    denom: C64,
}

impl Su11Coefficients {
    pub fn from_exponents(gamma: C64, gamma_tilde: C64, branch: Branch) -> Self {
        let beta_sq = gamma_tilde * gamma_tilde / 4.0 - gamma * gamma;
        let mut beta = beta_sq.sqrt();
        if branch == Branch::Flipped {
            beta = -beta;
        }
        if beta.norm() < SERIES_SWITCH {
            return Self::series(gamma, gamma_tilde, beta);
        }
        let (sh, ch) = (beta.sinh(), beta.cosh());
        let denom = ch - gamma_tilde / (2.0 * beta) * sh;
        let squeeze_factor = denom.powi(-2);
        let pair_amplitude = 2.0 * gamma * sh / (2.0 * beta * ch - gamma_tilde * sh);
        Self {
            gamma,
            gamma_tilde,
            beta,
            pair_amplitude,
            squeeze_factor,
            denom,
        }
    }

    /// Evaluates with the small-`β` expansions regardless of `|β|`.
    pub fn series_limit(gamma: C64, gamma_tilde: C64) -> Self {
        let beta = (gamma_tilde * gamma_tilde / 4.0 - gamma * gamma).sqrt();
        Self::series(gamma, gamma_tilde, beta)
    }

    fn series(gamma: C64, gamma_tilde: C64, beta: C64) -> Self {
        let b2 = beta * beta;
        let ch = 1.0 + b2 / 2.0 + b2 * b2 / 24.0;
        let sinhc = 1.0 + b2 / 6.0 + b2 * b2 / 120.0;
        let denom = ch - gamma_tilde / 2.0 * sinhc;
        Self {
            gamma,
            gamma_tilde,
            beta,
            pair_amplitude: gamma * sinhc / denom,
            squeeze_factor: denom.powi(-2),
            denom,
        }
    }

    /// Coefficients for `exp(−iHτ)` with `H = k₃ K₃ + k_p (K₊ + K₋)`.
    pub fn for_hamiltonian(h: PairHamiltonian, tau: f64) -> Self {
        let gamma = C64::new(0.0, -h.kp * tau);
        let gamma_tilde = C64::new(0.0, -h.k3 * tau);
        Self::from_exponents(gamma, gamma_tilde, Branch::Principal)
    }

    /// `Γ̃^{1/2}`: the amplitude of `|0,0⟩`, since `K₃|0,0⟩ = ½|0,0⟩`.
    ///
    /// The root is fixed as `1/denom`, which tends to 1 as `τ → 0`.
    pub fn vacuum_amplitude(&self) -> C64 {
        self.denom.inv()
    }

    /// Amplitude on `|n,n⟩`.
    pub fn amplitude(&self, n: usize) -> C64 {
        self.vacuum_amplitude() * self.pair_amplitude.powu(n as u32)
    }

    /// Probability mass on levels `n ≥ n_max`, `|Γ|^(2 n_max)`.
    pub fn tail_mass(&self, n_max: usize) -> f64 {
        self.pair_amplitude.norm_sqr().powi(n_max as i32)
    }

    /// Smallest `n_max` with `|Γ|^(2 n_max) < threshold`.
    pub fn truncation_for(&self, threshold: f64) -> usize {
        let r2 = self.pair_amplitude.norm_sqr();
        if r2 == 0.0 {
            return 1;
        }
        let n = (threshold.ln() / r2.ln()).floor() as usize + 1;
        n.max(1)
    }
}

/// `γ, γ̃, β, Γ, Γ̃` for the effective two-mode evolution over time `tau`.
pub fn su11_coefficients(e: &EffectiveParams, tau: f64) -> Su11Coefficients {
    Su11Coefficients::for_hamiltonian(PairHamiltonian::from_effective(e), tau)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn chis(chi1: f64, chi2: f64) -> EffectiveParams {
        // g_j = sqrt(chi_j) with N = omega' = 1
        EffectiveParams::from_direct(chi1.sqrt(), chi2.sqrt(), 1.0, 1.0, 1.0, 1, "g").unwrap()
    }

    #[test]
    fn identity_at_zero_time() {
        let c = su11_coefficients(&chis(1.0, 1.0), 0.0);
        assert_eq!(c.gamma, C64::new(0.0, 0.0));
        assert_eq!(c.gamma_tilde, C64::new(0.0, 0.0));
        assert_eq!(c.pair_amplitude, C64::new(0.0, 0.0));
        assert_eq!(c.squeeze_factor, C64::new(1.0, 0.0));
    }

    #[test]
    fn first_order_pair_amplitude() {
        // Γ = γ + O(τ²) and γ = +iχτ with the elimination sign
        let c = su11_coefficients(&chis(1.0, 1.0), 0.01);
        let err = (c.pair_amplitude - C64::new(0.0, 0.01)).norm();
        assert!(err < 2e-4, "{:?}", c.pair_amplitude);
        assert!(err > 1e-6);
    }

    #[test]
    fn vacuum_amplitude_normalizes_geometric_series() {
        for (chi1, chi2, t) in [(1.0, 1.0, 0.4), (4.0, 1.0, 0.25), (0.3, 2.0, 1.7)] {
            let c = su11_coefficients(&chis(chi1, chi2), t);
            let r2 = c.pair_amplitude.norm_sqr();
            assert!((c.vacuum_amplitude().norm_sqr() - (1.0 - r2)).abs() < 1e-13);
            assert!((c.vacuum_amplitude().powi(2) - c.squeeze_factor).norm() < 1e-13);
        }
    }

    #[test]
    fn richardson_small_time_slope() {
        let e = chis(1.0, 1.0);
        let slope = |t: f64| su11_coefficients(&e, t).pair_amplitude / t;
        let (t1, t2) = (1e-3, 1e-4);
        let extrapolated = (t1 * slope(t2) - t2 * slope(t1)) / (t1 - t2);
        assert!((extrapolated - C64::new(0.0, e.chi())).norm() < 1e-6);
    }

    #[test]
    fn degenerate_point_uses_series() {
        let c = su11_coefficients(&chis(1.0, 1.0), 0.3);
        assert_eq!(c.beta, C64::new(0.0, 0.0));
        assert!(c.pair_amplitude.is_finite());
        // parabolic case: Γ = γ / (1 − γ̃/2)
        let expected = c.gamma / (1.0 - c.gamma_tilde / 2.0);
        assert!((c.pair_amplitude - expected).norm() < 1e-15);
    }

    #[test]
    fn series_limit_continuity() {
        // pick γ̃ so that |β| = 1e-5 exactly: β² = γ̃²/4 − γ²
        let gamma = C64::new(0.0, 0.2);
        for beta_sq in [C64::new(1e-10, 0.0), C64::new(-1e-10, 0.0)] {
            let gamma_tilde = 2.0 * (beta_sq + gamma * gamma).sqrt();
            let exact = Su11Coefficients::from_exponents(gamma, gamma_tilde, Branch::Principal);
            assert!((exact.beta.norm() - 1e-5).abs() < 1e-12);
            let series = Su11Coefficients::series_limit(gamma, gamma_tilde);
            assert!((exact.pair_amplitude - series.pair_amplitude).norm() < 1e-9);
            assert!((exact.squeeze_factor - series.squeeze_factor).norm() < 1e-9);
            let at_zero = Su11Coefficients::series(gamma, gamma_tilde, C64::new(0.0, 0.0));
            assert!((exact.pair_amplitude - at_zero.pair_amplitude).norm() < 1e-9);
        }
    }

    #[test]
    fn truncation_choice() {
        let c = su11_coefficients(&chis(1.0, 1.0), 0.5);
        let n = c.truncation_for(1e-12);
        assert!(c.tail_mass(n) < 1e-12);
        assert!(c.tail_mass(n - 1) >= 1e-12);
    }

    proptest! {
        #[test]
        fn branch_invariance(chi1 in 0.0..5.0f64, chi2 in 0.0..5.0f64, t in 0.0..3.0f64) {
            let h = PairHamiltonian::from_effective(&chis(chi1, chi2));
            let gamma = C64::new(0.0, -h.kp * t);
            let gamma_tilde = C64::new(0.0, -h.k3 * t);
            let a = Su11Coefficients::from_exponents(gamma, gamma_tilde, Branch::Principal);
            let b = Su11Coefficients::from_exponents(gamma, gamma_tilde, Branch::Flipped);
            prop_assert!((a.pair_amplitude - b.pair_amplitude).norm() <= 1e-12 * a.pair_amplitude.norm().max(1.0));
            prop_assert!((a.squeeze_factor - b.squeeze_factor).norm() <= 1e-12 * a.squeeze_factor.norm().max(1.0));
        }

        #[test]
        fn pair_amplitude_inside_unit_disk(chi1 in 0.0..5.0f64, chi2 in 0.0..5.0f64, t in 0.0..10.0f64) {
            let c = su11_coefficients(&chis(chi1, chi2), t);
            prop_assert!(c.pair_amplitude.norm() < 1.0);
        }
    }
}
