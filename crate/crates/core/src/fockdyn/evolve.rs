use crate::error::{Error, Result};
use crate::linalg::{SparseBuilder, SparseHermitian};
use crate::params::EffectiveParams;
use crate::C64;

use super::state::{ThreeModeState, TwoModeState, DEFAULT_TAIL_THRESHOLD};
use super::su11::su11_coefficients;

fn check_time(tau: f64) -> Result<()> {
    if !(tau.is_finite() && tau >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "tau",
            reason: format!("evolution time must be finite and non-negative, got {tau}"),
        });
    }
    Ok(())
}

fn check_truncation(name: &'static str, n: usize) -> Result<()> {
    if n < 1 {
        return Err(Error::InvalidParameter {
            name,
            reason: "truncation must be at least 1".into(),
        });
    }
    Ok(())
}

/// `|Ψ(τ)⟩ ∝ Σ Γⁿ |n,n⟩`, normalized on `n ≤ n_max`.
///
/// The reported tail mass is the analytic `|Γ|^(2 n_max)`.
pub fn evolve_closed_form(e: &EffectiveParams, tau: f64, n_max: usize) -> Result<TwoModeState> {
    check_time(tau)?;
    check_truncation("n_max", n_max)?;
    let c = su11_coefficients(e, tau);
    let d = n_max + 1;
    let mut amps = vec![C64::new(0.0, 0.0); d * d];
    for n in 0..d {
        amps[n * d + n] = c.amplitude(n);
    }
    Ok(TwoModeState::new(n_max, amps, DEFAULT_TAIL_THRESHOLD).with_tail_mass(c.tail_mass(n_max)))
}

/// Two-mode effective Hamiltonian on `{|m,n⟩ : m, n ≤ n_max}`:
/// `−[χ₁ n₁ + χ₂ n₂ + χ (a₁†a₂† + a₁a₂)]`.
pub fn two_mode_hamiltonian(e: &EffectiveParams, n_max: usize) -> SparseHermitian {
    let d = n_max + 1;
    let idx = |m: usize, n: usize| m * d + n;
    let mut h = SparseBuilder::new(d * d);
    for m in 0..d {
        for n in 0..d {
            let diag = -(e.chi1() * m as f64 + e.chi2() * n as f64);
            h.add(idx(m, n), idx(m, n), C64::new(diag, 0.0));
            if m < n_max && n < n_max {
                // ⟨m+1,n+1| a₁†a₂† |m,n⟩ = √((m+1)(n+1))
                let v = -e.chi() * (((m + 1) * (n + 1)) as f64).sqrt();
                h.add_hermitian_pair(idx(m + 1, n + 1), idx(m, n), C64::new(v, 0.0));
            }
        }
    }
    h.build()
}

/// `exp(−iHτ)|0,0⟩` on the full truncated two-mode space.
pub fn evolve_numeric(e: &EffectiveParams, tau: f64, n_max: usize) -> Result<TwoModeState> {
    check_time(tau)?;
    check_truncation("n_max", n_max)?;
    let h = two_mode_hamiltonian(e, n_max);
    let d = n_max + 1;
    let mut v = vec![C64::new(0.0, 0.0); d * d];
    v[0] = C64::new(1.0, 0.0);
    let out = h.expm_action(tau, &v);
    Ok(TwoModeState::new(n_max, out, DEFAULT_TAIL_THRESHOLD))
}

/// Three-mode Hamiltonian with the collective mode kept explicitly:
/// `ω′ b†b − √N [g₁ (a₁ b† + a₁† b) + g₂ (a₂† b† + a₂ b)]`.
pub fn three_mode_hamiltonian(e: &EffectiveParams, truncations: [usize; 3]) -> SparseHermitian {
    let [t1, t2, tb] = truncations;
    let dim = (t1 + 1) * (t2 + 1) * (tb + 1);
    let idx = |m, n, k| ThreeModeState::index(truncations, m, n, k);
    let sqrt_n = (e.n_atoms() as f64).sqrt();
    let (c1, c2) = (-sqrt_n * e.g1(), -sqrt_n * e.g2());
    let mut h = SparseBuilder::new(dim);
    for m in 0..=t1 {
        for n in 0..=t2 {
            for k in 0..=tb {
                h.add(idx(m, n, k), idx(m, n, k), C64::new(e.omega_prime() * k as f64, 0.0));
                if k < tb && m >= 1 {
                    // a₁ b† : |m,n,k⟩ → √m √(k+1) |m−1,n,k+1⟩
                    let v = c1 * ((m * (k + 1)) as f64).sqrt();
                    h.add_hermitian_pair(idx(m - 1, n, k + 1), idx(m, n, k), C64::new(v, 0.0));
                }
                if k < tb && n < t2 {
                    // a₂† b† : |m,n,k⟩ → √(n+1) √(k+1) |m,n+1,k+1⟩
                    let v = c2 * (((n + 1) * (k + 1)) as f64).sqrt();
                    h.add_hermitian_pair(idx(m, n + 1, k + 1), idx(m, n, k), C64::new(v, 0.0));
                }
            }
        }
    }
    h.build()
}

/// `exp(−iH′τ)|0,0,0⟩` with the three-mode Hamiltonian.
pub fn evolve_three_mode(
    e: &EffectiveParams,
    tau: f64,
    truncations: [usize; 3],
) -> Result<ThreeModeState> {
    check_time(tau)?;
    for (name, t) in ["n_max_a1", "n_max_a2", "n_max_b"].into_iter().zip(truncations) {
        check_truncation(name, t)?;
    }
    let h = three_mode_hamiltonian(e, truncations);
    let mut v = vec![C64::new(0.0, 0.0); h.dim()];
    v[0] = C64::new(1.0, 0.0);
    let out = h.expm_action(tau, &v);
    Ok(ThreeModeState::new(truncations, out, DEFAULT_TAIL_THRESHOLD))
}
