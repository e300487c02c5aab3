//! Spectral minima and their dependence on `κ` and `N`.

use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::params::{EffectiveParams, DEFAULT_MARGIN};
use crate::spectra::{
    approx_point, linear_grid, spectrum_point, SpectraOptions, DEFAULT_VERDICT_TOLERANCE,
};

pub const DEFAULT_SCAN_POINTS: usize = 2001;
pub const DEFAULT_OMEGA_TOLERANCE: f64 = 1e-8;
/// Default half-width of the search window in units of the coupling.
pub const DEFAULT_WINDOW_SPAN: f64 = 10.0;

/// Closed frequency interval searched for the minimum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Window {
    pub min: f64,
    pub max: f64,
}

/// Which part of the frequency axis the default window covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum WindowSide {
    #[default]
    Negative,
    Positive,
    Full,
}

impl Window {
    pub fn new(min: f64, max: f64) -> Result<Self> {
        if !(min.is_finite() && max.is_finite() && min < max) {
            return Err(Error::InvalidGrid(format!("window [{min}, {max}] is empty")));
        }
        Ok(Self { min, max })
    }

    /// `[−span·g, 0]`, `[0, span·g]` or `[−span·g, span·g]` with
    /// `g = max(g₁, g₂)`, or the decay rate when both couplings vanish.
    pub fn around_origin(e: &EffectiveParams, side: WindowSide, span: f64) -> Self {
        let g = e.g1().max(e.g2());
        let scale = if g > 0.0 { g } else { e.kappa1().max(e.kappa2()).max(1.0) };
        let span = span * scale;
        match side {
            WindowSide::Negative => Self { min: -span, max: 0.0 },
            WindowSide::Positive => Self { min: 0.0, max: span },
            WindowSide::Full => Self { min: -span, max: span },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MinimizeOptions {
    pub scan_points: usize,
    pub omega_tolerance: f64,
    pub verdict_tolerance: f64,
    pub spectra: SpectraOptions,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self {
            scan_points: DEFAULT_SCAN_POINTS,
            omega_tolerance: DEFAULT_OMEGA_TOLERANCE,
            verdict_tolerance: DEFAULT_VERDICT_TOLERANCE,
            spectra: SpectraOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralMinimum {
    pub omega_min: f64,
    pub s_min: f64,
    /// Best value on the coarse scan, before refinement.
    pub coarse_min: f64,
    /// Coarse grid spacing.
    pub step: f64,
    /// No sub-unity point was found; `s_min` is the coarse-scan value.
    pub flat: bool,
    pub entangled: bool,
}

/// Minimum of `S^θ₊` over `window`: coarse scan, then golden-section
/// refinement on the bracket around the best scan point.
pub fn min_squeezing(
    e: &EffectiveParams,
    theta: f64,
    window: Window,
    opts: &MinimizeOptions,
    exec: Execution,
) -> Result<SpectralMinimum> {
    if opts.scan_points < 3 {
        return Err(Error::InvalidGrid("coarse scan needs at least 3 points".into()));
    }
    let grid = linear_grid(window.min, window.max, opts.scan_points)?;
    let step = grid[1] - grid[0];
    let values = exec
        .map(&grid, |&w| spectrum_point(e, theta, w, &opts.spectra).map(|s| s.0))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let mut best = 0;
    for (k, v) in values.iter().enumerate() {
        if *v < values[best] {
            best = k;
        }
    }
    let coarse_min = values[best];
    if coarse_min >= 1.0 - opts.verdict_tolerance {
        return Ok(SpectralMinimum {
            omega_min: grid[best],
            s_min: coarse_min,
            coarse_min,
            step,
            flat: true,
            entangled: false,
        });
    }
    let lo = grid[best.saturating_sub(1)];
    let hi = grid[(best + 1).min(grid.len() - 1)];
    let f = |w: f64| spectrum_point(e, theta, w, &opts.spectra).map(|s| s.0);
    let (mut omega_min, mut s_min) = golden_section(f, lo, hi, opts.omega_tolerance)?;
    if coarse_min < s_min {
        omega_min = grid[best];
        s_min = coarse_min;
    }
    Ok(SpectralMinimum {
        omega_min,
        s_min,
        coarse_min,
        step,
        flat: false,
        entangled: s_min < 1.0 - opts.verdict_tolerance,
    })
}

fn golden_section<F>(f: F, mut a: f64, mut b: f64, tol: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    let x = 0.5 * (a + b);
    let fx = f(x)?;
    // the midpoint is not guaranteed to beat the last interior probes
    let (mut best_x, mut best_f) = (x, fx);
    for (px, pf) in [(c, fc), (d, fd)] {
        if pf < best_f {
            best_x = px;
            best_f = pf;
        }
    }
    Ok((best_x, best_f))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SweptParameter {
    Kappa,
    AtomNumber,
}

impl SweptParameter {
    pub fn name(self) -> &'static str {
        match self {
            Self::Kappa => "kappa",
            Self::AtomNumber => "N",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRecord {
    pub value: f64,
    pub omega_min: f64,
    pub s_min: f64,
    pub entangled: bool,
    /// `ω′/(g√N)` fell below the regime margin at this point.
    pub regime_warning: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub parameter: SweptParameter,
    pub theta: f64,
    pub records: Vec<SweepRecord>,
    /// Seconds spent on each point, in grid order. Kept apart from the
    /// records so those stay bit-identical between runs.
    pub wall_times: Vec<f64>,
}

impl SweepResult {
    pub fn s_min(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.s_min).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepOptions {
    pub side: WindowSide,
    /// Window half-width in units of the coupling.
    pub window_span: f64,
    pub minimize: MinimizeOptions,
    pub regime_margin: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            side: WindowSide::Negative,
            window_span: DEFAULT_WINDOW_SPAN,
            minimize: MinimizeOptions::default(),
            regime_margin: DEFAULT_MARGIN,
        }
    }
}

fn check_sweep_grid(values: &[f64], what: &str) -> Result<()> {
    if values.is_empty() {
        return Err(Error::InvalidGrid(format!("{what} grid is empty")));
    }
    let up = values.windows(2).all(|w| w[0] <= w[1]);
    let down = values.windows(2).all(|w| w[0] >= w[1]);
    if !(up || down) {
        return Err(Error::InvalidGrid(format!("{what} grid is not monotone")));
    }
    Ok(())
}

fn low_excitation_warning(e: &EffectiveParams, margin: f64) -> bool {
    let g = e.g1().max(e.g2());
    let collective = g * (e.n_atoms() as f64).sqrt();
    collective > 0.0 && e.omega_prime() / collective < margin
}

fn run_sweep(
    parameter: SweptParameter,
    points: Vec<(f64, EffectiveParams)>,
    theta: f64,
    opts: &SweepOptions,
    exec: Execution,
) -> Result<SweepResult> {
    let outcomes = exec.map(&points, |(value, e)| {
        let start = Instant::now();
        let window = Window::around_origin(e, opts.side, opts.window_span);
        let m = min_squeezing(e, theta, window, &opts.minimize, Execution::Sequential)?;
        let record = SweepRecord {
            value: *value,
            omega_min: m.omega_min,
            s_min: m.s_min,
            entangled: m.entangled,
            regime_warning: low_excitation_warning(e, opts.regime_margin),
        };
        Ok((record, start.elapsed().as_secs_f64()))
    });
    let mut records = Vec::with_capacity(points.len());
    let mut wall_times = Vec::with_capacity(points.len());
    for o in outcomes {
        let (r, t) = o?;
        records.push(r);
        wall_times.push(t);
    }
    Ok(SweepResult {
        parameter,
        theta,
        records,
        wall_times,
    })
}

/// `S_min` at each `κ` (applied to both modes), everything else fixed.
pub fn sweep_kappa(
    e_base: &EffectiveParams,
    kappas: &[f64],
    theta: f64,
    opts: &SweepOptions,
    exec: Execution,
) -> Result<SweepResult> {
    check_sweep_grid(kappas, "kappa")?;
    let points = kappas
        .iter()
        .map(|&k| Ok((k, e_base.with_kappa(k)?)))
        .collect::<Result<Vec<_>>>()?;
    run_sweep(SweptParameter::Kappa, points, theta, opts, exec)
}

/// `S_min` at each atom number, everything else fixed.
pub fn sweep_atoms(
    e_base: &EffectiveParams,
    atoms: &[u64],
    theta: f64,
    opts: &SweepOptions,
    exec: Execution,
) -> Result<SweepResult> {
    let as_f64: Vec<f64> = atoms.iter().map(|&n| n as f64).collect();
    check_sweep_grid(&as_f64, "N")?;
    let points = atoms
        .iter()
        .map(|&n| Ok((n as f64, e_base.with_n_atoms(n)?)))
        .collect::<Result<Vec<_>>>()?;
    run_sweep(SweptParameter::AtomNumber, points, theta, opts, exec)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ApproxRow {
    pub omega: f64,
    pub exact: f64,
    pub approx: f64,
    pub abs_diff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApproxComparison {
    pub rows: Vec<ApproxRow>,
    pub max_abs_diff: f64,
    pub mean_abs_diff: f64,
}

/// Exact `S⁰` against the large-detuning closed form on `omegas`.
pub fn compare_approx(
    e: &EffectiveParams,
    omegas: &[f64],
    exec: Execution,
) -> Result<ApproxComparison> {
    if omegas.is_empty() {
        return Err(Error::InvalidGrid("comparison grid is empty".into()));
    }
    let opts = SpectraOptions::default();
    let rows = exec
        .map(omegas, |&w| {
            let exact = spectrum_point(e, 0.0, w, &opts)?.0;
            let approx = approx_point(e, w)?;
            Ok(ApproxRow {
                omega: w,
                exact,
                approx,
                abs_diff: (exact - approx).abs(),
            })
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let max_abs_diff = rows.iter().map(|r| r.abs_diff).fold(0.0, f64::max);
    let mean_abs_diff = rows.iter().map(|r| r.abs_diff).sum::<f64>() / rows.len() as f64;
    Ok(ApproxComparison {
        rows,
        max_abs_diff,
        mean_abs_diff,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    fn far_detuned() -> EffectiveParams {
        EffectiveParams::symmetric(1e5, 1.0, 10_000).unwrap()
    }

    fn seq() -> Execution {
        Execution::Sequential
    }

    #[test]
    fn golden_section_parabola() {
        let (x, fx) = golden_section(|x| Ok((x - 0.3).powi(2)), -1.0, 1.0, 1e-10).unwrap();
        assert!((x - 0.3).abs() < 1e-8);
        assert!(fx < 1e-16);
    }

    #[test]
    fn uncoupled_minimum_is_flat() {
        let e = far_detuned().uncoupled();
        let w = Window::around_origin(&e, WindowSide::Negative, DEFAULT_WINDOW_SPAN);
        let m = min_squeezing(&e, 0.0, w, &MinimizeOptions::default(), seq()).unwrap();
        assert!(m.flat && !m.entangled);
        assert!((m.s_min - 1.0).abs() < 1e-12);
    }

    #[test]
    fn refinement_improves_and_is_local_minimum() {
        let e = far_detuned();
        let w = Window::around_origin(&e, WindowSide::Full, DEFAULT_WINDOW_SPAN);
        let m = min_squeezing(&e, FRAC_PI_4, w, &MinimizeOptions::default(), seq()).unwrap();
        assert!(m.entangled && !m.flat);
        assert!(m.s_min <= m.coarse_min);
        assert!(m.coarse_min - m.s_min < 1e-3);
        let s = |x| spectrum_point(&e, FRAC_PI_4, x, &SpectraOptions::default()).unwrap().0;
        assert!(s(m.omega_min - m.step) > m.s_min);
        assert!(s(m.omega_min + m.step) > m.s_min);
    }

    #[test]
    fn sweep_is_deterministic_across_execution_modes() {
        let e = EffectiveParams::symmetric(1e4, 1.0, 10_000).unwrap();
        let kappas = [2.0, 2.0, 5.0];
        let opts = SweepOptions::default();
        let a = sweep_kappa(&e, &kappas, FRAC_PI_4, &opts, seq()).unwrap();
        let b = sweep_kappa(&e, &kappas, FRAC_PI_4, &opts, Execution::Parallel).unwrap();
        assert_eq!(a.records, b.records);
        assert_eq!(a.records[0], SweepRecord { value: 2.0, ..a.records[1] });
        assert_eq!(a.wall_times.len(), 3);
    }

    #[test]
    fn sweep_grid_checks() {
        let e = far_detuned();
        let opts = SweepOptions::default();
        assert!(sweep_kappa(&e, &[], 0.0, &opts, seq()).is_err());
        assert!(sweep_kappa(&e, &[1.0, 3.0, 2.0], 0.0, &opts, seq()).is_err());
        assert!(sweep_kappa(&e, &[-1.0], 0.0, &opts, seq()).is_err());
        let single = sweep_kappa(&e, &[1.0], 0.0, &opts, seq()).unwrap();
        assert_eq!(single.records.len(), 1);
    }

    #[test]
    fn atom_sweep_regime_flag_and_empty_condensate() {
        let e = EffectiveParams::symmetric(1e4, 1.0, 10_000).unwrap();
        let r = sweep_atoms(&e, &[0, 100, 10_000, 10_000_000], 0.0, &SweepOptions::default(), seq())
            .unwrap();
        assert!((r.records[0].s_min - 1.0).abs() < 1e-12);
        assert!(!r.records[0].entangled);
        let flags: Vec<bool> = r.records.iter().map(|x| x.regime_warning).collect();
        assert_eq!(flags, vec![false, false, false, true]);
    }

    #[test]
    fn approx_comparison_vanishes_without_coupling() {
        let grid = linear_grid(-3.0, 3.0, 61).unwrap();
        let c = compare_approx(&far_detuned().uncoupled(), &grid, seq()).unwrap();
        assert!(c.max_abs_diff < 1e-12);
        assert_eq!(c.rows.len(), 61);
    }
}
