//! Output squeezing spectra from the linear quantum Langevin equations.
//!
//! In frequency space (`d/dt → −iω`) the collective mode carries no input
//! noise and is eliminated exactly,
//! `b(ω) = √N (g₁ a₁(ω) + g₂ a₂†(ω)) / (ω′ − ω)`, leaving the 2×2 system
//!
//! ```text
//! M(ω) (a₁, a₂†)ᵀ = −D (a₁,in, a₂,in†)ᵀ,      D = diag(√(2κ₁), √(2κ₂))
//! M₁₁ = κ₁ − iω − i g₁²N/(ω′−ω)     M₁₂ = −i g₁g₂N/(ω′−ω)
//! M₂₁ = +i g₁g₂N/(ω′−ω)             M₂₂ = κ₂ − iω + i g₂²N/(ω′−ω)
//! ```
//!
//! With `a_out = a_in + √(2κ) a` the outputs are `A(ω) = 𝟙 − D M(ω)⁻¹ D`
//! applied to the inputs.
//!
//! The homodyne currents `I^θ_±(ω)` are linear forms over
//! `{a₁,in, a₁,in†, a₂,in, a₂,in†}(ω)` built from `A(ω)` and `A(−ω)`
//! (using `a†(ω) = [a(−ω)]†`). The spectrum is their symmetrized vacuum
//! two-point function, divided by its value for the uncoupled system so the
//! shot-noise level is exactly 1.
//!
//! The symmetrized spectrum of a Hermitian stationary current is even in
//! `ω`. For large `ω′` it reduces to
//! `S^θ − 1 = 16χ²κ²cos²θ/(κ²+ω²)² − 4χκ sin 2θ/(κ²+ω²)`, so the squeezed
//! quadrature sits near `θ = π/4`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::params::EffectiveParams;
use crate::C64;

pub const DEFAULT_POLE_GUARD: f64 = 1e-6;
pub const DEFAULT_VERDICT_TOLERANCE: f64 = 1e-9;
const SINGULAR_CONDITION: f64 = 1e14;

/// Sign in front of `√(2κ) a_in` in the Langevin equation, paired with the
/// matching input-output relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum InputSign {
    /// `ȧ = … − √(2κ) a_in`, `a_out = a_in + √(2κ) a`.
    #[default]
    Minus,
    /// `ȧ = … + √(2κ) a_in`, `a_out = √(2κ) a − a_in`.
    Plus,
}

/// Relative sign of the off-diagonal drift terms. `Flipped` negates `M₂₁`
/// only, a deliberately broken model used as a negative control. (Negating
/// both entries is the gauge change `a₂ → −a₂` and changes nothing.)
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum DriftSign {
    #[default]
    Physical,
    Flipped,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectraOptions {
    /// Points with `|ω ∓ ω′| ≤ pole_guard · ω′` are rejected.
    pub pole_guard: f64,
    pub input_sign: InputSign,
    pub drift_sign: DriftSign,
}

impl Default for SpectraOptions {
    fn default() -> Self {
        Self {
            pole_guard: DEFAULT_POLE_GUARD,
            input_sign: InputSign::Minus,
            drift_sign: DriftSign::Physical,
        }
    }
}

/// `A(ω)` mapping `(a₁,in, a₂,in†)` to `(a₁,out, a₂,out†)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScatteringMatrix {
    pub omega: f64,
    pub a: [[C64; 2]; 2],
    /// 2-norm condition number of the drift matrix `M(ω)`.
    pub condition: f64,
}

impl ScatteringMatrix {
    pub fn identity(omega: f64) -> Self {
        let (one, zero) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0));
        Self {
            omega,
            a: [[one, zero], [zero, one]],
            condition: 1.0,
        }
    }

    /// Deviations of `|A₁₁|² − |A₁₂|² − 1`, `|A₂₂|² − |A₂₁|² − 1` and
    /// `A₁₁A₂₁* − A₁₂A₂₂*`.
    pub fn bogoliubov_residuals(&self) -> [f64; 3] {
        let [[a11, a12], [a21, a22]] = self.a;
        [
            a11.norm_sqr() - a12.norm_sqr() - 1.0,
            a22.norm_sqr() - a21.norm_sqr() - 1.0,
            (a11 * a21.conj() - a12 * a22.conj()).norm(),
        ]
    }

    pub fn bogoliubov_defect(&self) -> f64 {
        self.bogoliubov_residuals()
            .into_iter()
            .map(f64::abs)
            .fold(0.0, f64::max)
    }
}

fn check_pole(e: &EffectiveParams, omega: f64, guard: f64) -> Result<()> {
    let wp = e.omega_prime();
    if (omega - wp).abs() <= guard * wp || !omega.is_finite() {
        return Err(Error::PoleGuard {
            omega,
            omega_prime: wp,
            guard: guard * wp,
        });
    }
    Ok(())
}

pub fn scattering_matrix(e: &EffectiveParams, omega: f64) -> Result<ScatteringMatrix> {
    scattering_matrix_with(e, omega, &SpectraOptions::default())
}

pub fn scattering_matrix_with(
    e: &EffectiveParams,
    omega: f64,
    opts: &SpectraOptions,
) -> Result<ScatteringMatrix> {
    check_pole(e, omega, opts.pole_guard)?;
    let n = e.n_atoms() as f64;
    let detuning = e.omega_prime() - omega;
    let i = C64::new(0.0, 1.0);
    let off = match opts.drift_sign {
        DriftSign::Physical => 1.0,
        DriftSign::Flipped => -1.0,
    };
    let pair = e.g1() * e.g2() * n / detuning;
    let m11 = e.kappa1() - i * omega - i * (e.g1() * e.g1() * n / detuning);
    let m12 = -i * pair;
    let m21 = i * off * pair;
    let m22 = e.kappa2() - i * omega + i * (e.g2() * e.g2() * n / detuning);

    let det = m11 * m22 - m12 * m21;
    let frob = m11.norm_sqr() + m12.norm_sqr() + m21.norm_sqr() + m22.norm_sqr();
    let condition = if det.norm() == 0.0 {
        f64::INFINITY
    } else {
        // σ_max/σ_min from σ_max² + σ_min² = ‖M‖_F², σ_max σ_min = |det|
        let disc = (frob * frob - 4.0 * det.norm_sqr()).max(0.0).sqrt();
        ((frob + disc) / (frob - disc).max(f64::MIN_POSITIVE)).sqrt()
    };
    if !(condition < SINGULAR_CONDITION) {
        return Err(Error::SingularDrift { omega, condition });
    }
    let inv = [[m22 / det, -m12 / det], [-m21 / det, m11 / det]];
    let d = [(2.0 * e.kappa1()).sqrt(), (2.0 * e.kappa2()).sqrt()];
    let mut a = [[C64::new(0.0, 0.0); 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            let dmd = d[r] * inv[r][c] * d[c];
            let delta = if r == c { 1.0 } else { 0.0 };
            a[r][c] = match opts.input_sign {
                InputSign::Minus => delta - dmd,
                InputSign::Plus => dmd - delta,
            };
        }
    }
    Ok(ScatteringMatrix {
        omega,
        a,
        condition,
    })
}

/// Which of the two joint quadrature currents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Quadrature {
    /// `I₊ = a₁ₒe^{−iθ} + a₁ₒ†e^{iθ} − a₂ₒe^{−iθ} − a₂ₒ†e^{iθ}`
    Plus,
    /// `I₋ = −i[a₁ₒe^{−iθ} − a₁ₒ†e^{iθ} + a₂ₒe^{−iθ} − a₂ₒ†e^{iθ}]`
    Minus,
}

/// Weights of the current on `(a₁ₒ, a₁ₒ†, a₂ₒ, a₂ₒ†)`.
fn current_weights(q: Quadrature, theta: f64) -> [C64; 4] {
    let e = C64::from_polar(1.0, -theta);
    let i = C64::new(0.0, 1.0);
    match q {
        Quadrature::Plus => [e, e.conj(), -e, -e.conj()],
        Quadrature::Minus => [-i * e, i * e.conj(), -i * e, i * e.conj()],
    }
}

/// Coefficients of `I(ω)` on `(a₁,in, a₁,in†, a₂,in, a₂,in†)(ω)`, given
/// `A(ω)` and `A(−ω)`.
fn input_form(w: &[C64; 4], at: &ScatteringMatrix, mirrored: &ScatteringMatrix) -> [C64; 4] {
    let [s1, s1d, s2, s2d] = *w;
    let [[a11, a12], [a21, a22]] = at.a;
    let [[b11, b12], [b21, b22]] = mirrored.a;
    [
        // a₁ₒ(ω) and a₂ₒ†(ω) feed on a₁,in(ω)
        s1 * a11 + s2d * a21,
        // a₁ₒ†(ω) = [a₁ₒ(−ω)]† and a₂ₒ(ω) = [a₂ₒ†(−ω)]† feed on a₁,in†(ω)
        s1d * b11.conj() + s2 * b21.conj(),
        s1d * b12.conj() + s2 * b22.conj(),
        s1 * a12 + s2d * a22,
    ]
}

/// `⟨u_k(ω) u_l(ω′)⟩ = V_kl δ(ω+ω′)` for vacuum inputs; only
/// `⟨a_in a_in†⟩` is nonzero.
fn vacuum_pairing(x: &[C64; 4], y: &[C64; 4]) -> C64 {
    x[0] * y[1] + x[2] * y[3]
}

/// Symmetrized two-point weight `½[K(ω) + K(−ω)]` of a current whose input
/// forms at `ω` and `−ω` are given.
fn symmetrized(at: &[C64; 4], mirrored: &[C64; 4]) -> f64 {
    let k_fwd = vacuum_pairing(at, mirrored);
    let k_bwd = vacuum_pairing(mirrored, at);
    0.5 * (k_fwd + k_bwd).re
}

fn raw_spectrum(
    q: Quadrature,
    theta: f64,
    at: &ScatteringMatrix,
    mirrored: &ScatteringMatrix,
) -> f64 {
    let w = current_weights(q, theta);
    let fwd = input_form(&w, at, mirrored);
    let bwd = input_form(&w, mirrored, at);
    symmetrized(&fwd, &bwd)
}

fn vacuum_level(q: Quadrature, theta: f64) -> f64 {
    let id = ScatteringMatrix::identity(0.0);
    raw_spectrum(q, theta, &id, &id)
}

/// `(S₊, S₋)` at one frequency.
pub fn spectrum_point(
    e: &EffectiveParams,
    theta: f64,
    omega: f64,
    opts: &SpectraOptions,
) -> Result<(f64, f64)> {
    let at = scattering_matrix_with(e, omega, opts)?;
    let mirrored = scattering_matrix_with(e, -omega, opts)?;
    let s = |q| raw_spectrum(q, theta, &at, &mirrored) / vacuum_level(q, theta);
    Ok((s(Quadrature::Plus), s(Quadrature::Minus)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumCurve {
    pub theta: f64,
    pub omegas: Vec<f64>,
    pub s_plus: Vec<f64>,
    pub s_minus: Vec<f64>,
    pub params: EffectiveParams,
    pub approx: Option<Vec<f64>>,
}

impl SpectrumCurve {
    pub fn values(&self, q: Quadrature) -> &[f64] {
        match q {
            Quadrature::Plus => &self.s_plus,
            Quadrature::Minus => &self.s_minus,
        }
    }

    pub fn len(&self) -> usize {
        self.omegas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omegas.is_empty()
    }
}

pub fn squeezing_spectrum(
    e: &EffectiveParams,
    theta: f64,
    omegas: &[f64],
) -> Result<SpectrumCurve> {
    squeezing_spectrum_with(e, theta, omegas, &SpectraOptions::default(), Execution::default())
}

pub fn squeezing_spectrum_with(
    e: &EffectiveParams,
    theta: f64,
    omegas: &[f64],
    opts: &SpectraOptions,
    exec: Execution,
) -> Result<SpectrumCurve> {
    let points = exec.map(omegas, |&w| spectrum_point(e, theta, w, opts));
    let mut s_plus = Vec::with_capacity(omegas.len());
    let mut s_minus = Vec::with_capacity(omegas.len());
    for p in points {
        let (sp, sm) = p?;
        s_plus.push(sp);
        s_minus.push(sm);
    }
    Ok(SpectrumCurve {
        theta,
        omegas: omegas.to_vec(),
        s_plus,
        s_minus,
        params: e.clone(),
        approx: None,
    })
}

/// The large-detuning closed-form approximation, evaluated as printed:
///
/// ```text
/// S(ω) ≈ 1 + 4κ²g₁g₂N / ((κ²+ω²)²(ω′²−ω²))
///          · [4ωω′(κ²−ω²)/(κ²+ω²) + g₁g₂N(ω′²+ω²)/(ω′²−ω²)]
/// ```
pub fn approx_point(e: &EffectiveParams, omega: f64) -> Result<f64> {
    if e.kappa1() != e.kappa2() {
        return Err(Error::ApproxDomain(format!(
            "requires symmetric decay, got kappa1 = {} and kappa2 = {}",
            e.kappa1(),
            e.kappa2()
        )));
    }
    let wp = e.omega_prime();
    if omega * omega >= wp * wp {
        return Err(Error::ApproxDomain(format!("|omega| = {} is not below omega' = {wp}", omega.abs())));
    }
    let k2 = e.kappa1() * e.kappa1();
    let w2 = omega * omega;
    let gn = e.pair_strength();
    let lorentz = k2 + w2;
    let gap = wp * wp - w2;
    let prefactor = 4.0 * k2 * gn / (lorentz * lorentz * gap);
    let odd = 4.0 * omega * wp * (k2 - w2) / lorentz;
    let even = gn * (wp * wp + w2) / gap;
    Ok(1.0 + prefactor * (odd + even))
}

pub fn approx_spectrum(e: &EffectiveParams, omegas: &[f64]) -> Result<SpectrumCurve> {
    let values = omegas
        .iter()
        .map(|&w| approx_point(e, w))
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectrumCurve {
        theta: 0.0,
        omegas: omegas.to_vec(),
        s_plus: values.clone(),
        s_minus: values,
        params: e.clone(),
        approx: None,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntanglementVerdict {
    pub min_s: f64,
    pub argmin: f64,
    /// Maximal runs of grid points with `S < 1 − tolerance`, as
    /// `(first ω, last ω)`.
    pub windows: Vec<(f64, f64)>,
    pub entangled: bool,
    pub tolerance: f64,
}

impl EntanglementVerdict {
    /// Total grid extent covered by sub-unity windows.
    pub fn window_width(&self) -> f64 {
        self.windows.iter().fold(0.0, |acc, (a, b)| acc + (b - a))
    }
}

pub fn verdict(curve: &SpectrumCurve) -> EntanglementVerdict {
    verdict_values(&curve.omegas, &curve.s_plus, DEFAULT_VERDICT_TOLERANCE)
}

pub fn verdict_values(omegas: &[f64], values: &[f64], tolerance: f64) -> EntanglementVerdict {
    assert!(!values.is_empty(), "verdict needs a non-empty curve");
    assert_eq!(omegas.len(), values.len());
    let (mut argmin, mut min_s) = (omegas[0], values[0]);
    for (&w, &s) in omegas.iter().zip(values) {
        if s < min_s {
            min_s = s;
            argmin = w;
        }
    }
    let mut windows = Vec::new();
    let mut open: Option<(f64, f64)> = None;
    for (&w, &s) in omegas.iter().zip(values) {
        if s < 1.0 - tolerance {
            open = Some(match open {
                Some((start, _)) => (start, w),
                None => (w, w),
            });
        } else if let Some(win) = open.take() {
            windows.push(win);
        }
    }
    windows.extend(open);
    EntanglementVerdict {
        min_s,
        argmin,
        windows,
        entangled: min_s < 1.0 - tolerance,
        tolerance,
    }
}

/// `count` evenly spaced points on `[min, max]`.
pub fn linear_grid(min: f64, max: f64, count: usize) -> Result<Vec<f64>> {
    if !(min.is_finite() && max.is_finite()) || count == 0 || (count > 1 && max <= min) {
        return Err(Error::InvalidGrid(format!(
            "need finite min < max and count >= 1, got [{min}, {max}] x {count}"
        )));
    }
    if count == 1 {
        return Ok(vec![min]);
    }
    let step = (max - min) / (count - 1) as f64;
    Ok((0..count).map(|k| min + step * k as f64).collect())
}
