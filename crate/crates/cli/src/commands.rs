//! The five commands. Each returns the bytes to emit and whether the run
//! counts as a success; errors are usage or input problems.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use bec_squeeze::fockdyn::{
    entanglement_entropy, evolve_closed_form, evolve_numeric, evolve_three_mode, fidelity,
    pair_distribution, reduce_to_two_modes, su11_coefficients, Branch, Su11Coefficients,
};
use bec_squeeze::params::{validate_effective, validate_regimes, RegimeReport, CHECK_APPROX};
use bec_squeeze::spectra::{
    approx_point, linear_grid, scattering_matrix_with, spectrum_point, DriftSign, InputSign,
    SpectraOptions,
};
use bec_squeeze::sweeps::{
    sweep_atoms, sweep_kappa, MinimizeOptions, SweepOptions, SweepResult,
};
use bec_squeeze::{EffectiveParams, Error, Execution, C64};
use serde::Serialize;

use crate::config::{DriftSetting, InputSignSetting, Resolved, SweepParameter};
use crate::error::CliError;
use crate::output::{csv_document, effective_lines, header};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Debug)]
pub struct Outcome {
    pub bytes: Vec<u8>,
    pub ok: bool,
}

fn regime_report(r: &Resolved) -> RegimeReport {
    let margin = r.config.validate.regime_margin;
    match &r.config.physical {
        Some(p) => validate_regimes(p, &r.effective, margin),
        None => validate_effective(&r.effective, margin),
    }
}

fn spectra_options(r: &Resolved) -> SpectraOptions {
    SpectraOptions {
        pole_guard: r.config.spectrum.pole_guard,
        input_sign: match r.config.spectrum.input_sign {
            InputSignSetting::Minus => InputSign::Minus,
            InputSignSetting::Plus => InputSign::Plus,
        },
        drift_sign: match r.config.validate.drift_sign {
            DriftSetting::Physical => DriftSign::Physical,
            DriftSetting::Flipped => DriftSign::Flipped,
        },
    }
}

fn omega_grid(r: &Resolved) -> Result<Vec<f64>, CliError> {
    let s = &r.config.spectrum;
    let lo = s.omega_min.expect("resolved");
    let hi = s.omega_max.expect("resolved");
    Ok(linear_grid(lo, hi, s.omega_points)?)
}

fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut v = serde_json::to_vec_pretty(value).expect("report serializes");
    v.push(b'\n');
    v
}

#[derive(Serialize)]
struct ParamsReport<'a> {
    effective: &'a EffectiveParams,
    regimes: &'a RegimeReport,
}

pub fn cmd_params(r: &Resolved, format: Format) -> Result<Outcome, CliError> {
    let report = regime_report(r);
    let bytes = match format {
        Format::Json => to_json(&ParamsReport {
            effective: &r.effective,
            regimes: &report,
        }),
        Format::Text => {
            let mut out = String::new();
            out.push_str("effective model\n");
            for l in effective_lines(&r.effective) {
                out.push_str(&format!("  {l}\n"));
            }
            out.push_str("regime checks\n");
            for c in &report.checks {
                out.push_str(&format!(
                    "  {} {}: {} ({} / {} = {}, margin {})\n",
                    if c.passed { "ok  " } else { "WARN" },
                    c.name,
                    c.inequality,
                    c.larger,
                    c.smaller,
                    c.ratio,
                    c.margin
                ));
            }
            out.into_bytes()
        }
    };
    Ok(Outcome { bytes, ok: true })
}

pub fn cmd_spectrum(r: &Resolved, exec: Execution) -> Result<Outcome, CliError> {
    let grid = omega_grid(r)?;
    let opts = spectra_options(r);
    let theta = r.config.spectrum.theta;
    let with_approx = r.config.spectrum.approx;
    if with_approx && r.effective.kappa1() != r.effective.kappa2() {
        return Err(CliError::Config(
            "the approximation column needs kappa1 = kappa2".into(),
        ));
    }
    let e = &r.effective;
    let points = exec.map(&grid, |&w| {
        let exact = spectrum_point(e, theta, w, &opts)?;
        let approx = if with_approx { Some(approx_point(e, w)) } else { None };
        Ok::<_, Error>((w, exact, approx))
    });

    let mut comments = header("spectrum", r);
    let mut rows = Vec::with_capacity(grid.len());
    for p in points {
        match p {
            Ok((w, (sp, sm), approx)) => {
                let mut row = vec![w.to_string(), sp.to_string(), sm.to_string()];
                match approx {
                    Some(Ok(a)) => row.push(a.to_string()),
                    Some(Err(err)) => {
                        comments.push(format!("warning: omega = {w}: {err}"));
                        row.push(f64::NAN.to_string());
                    }
                    None => {}
                }
                rows.push(row);
            }
            Err(err @ Error::PoleGuard { .. }) => {
                comments.push(format!("warning: row omitted: {err}"));
            }
            Err(err) => return Err(err.into()),
        }
    }
    let mut columns = vec!["omega", "S_plus", "S_minus"];
    if with_approx {
        columns.push("S_approx");
    }
    Ok(Outcome {
        bytes: csv_document(&comments, &columns, &rows)?,
        ok: true,
    })
}

pub fn run_sweep(r: &Resolved, exec: Execution) -> Result<SweepResult, CliError> {
    let s = &r.config.sweep;
    let opts = SweepOptions {
        side: s.window.into(),
        window_span: s.window_span,
        minimize: MinimizeOptions {
            scan_points: s.scan_points,
            omega_tolerance: s.omega_tolerance,
            verdict_tolerance: r.config.validate.verdict_tolerance,
            spectra: spectra_options(r),
        },
        regime_margin: r.config.validate.regime_margin,
    };
    Ok(match s.parameter {
        SweepParameter::Kappa => sweep_kappa(&r.effective, &s.kappa, s.theta, &opts, exec)?,
        SweepParameter::AtomNumber => {
            sweep_atoms(&r.effective, &s.n_atoms, s.theta, &opts, exec)?
        }
    })
}

pub fn cmd_sweep(r: &Resolved, exec: Execution) -> Result<Outcome, CliError> {
    let result = run_sweep(r, exec)?;
    let mut comments = header("sweep", r);
    comments.push(format!("swept parameter: {}", result.parameter.name()));
    for rec in &result.records {
        if rec.regime_warning {
            comments.push(format!(
                "warning: {} = {}: omega'/(g sqrt N) below the regime margin",
                result.parameter.name(),
                rec.value
            ));
        }
    }
    let rows: Vec<Vec<String>> = result
        .records
        .iter()
        .map(|rec| {
            vec![
                rec.value.to_string(),
                rec.omega_min.to_string(),
                rec.s_min.to_string(),
                rec.entangled.to_string(),
            ]
        })
        .collect();
    Ok(Outcome {
        bytes: csv_document(&comments, &["kappa_or_N", "omega_min", "S_min", "entangled"], &rows)?,
        ok: true,
    })
}

#[derive(Serialize)]
struct Complex {
    re: f64,
    im: f64,
}

impl From<C64> for Complex {
    fn from(c: C64) -> Self {
        Self { re: c.re, im: c.im }
    }
}

#[derive(Serialize)]
struct ThreeModeReport {
    truncations: [usize; 3],
    tail_masses: [f64; 3],
    converged: bool,
    reduced_trace: f64,
    reduced_purity: f64,
    fidelity_with_closed_form: f64,
    charge_mean: f64,
    charge_variance: f64,
    collective_occupation: f64,
}

#[derive(Serialize)]
struct EvolveReport {
    tau: f64,
    chi_tau: f64,
    gamma: Complex,
    gamma_tilde: Complex,
    beta: Complex,
    pair_amplitude: Complex,
    squeeze_factor: Complex,
    n_max: usize,
    tail_threshold: f64,
    closed_form_tail_mass: f64,
    numeric_tail_mass: f64,
    converged: bool,
    pair_distribution: Vec<f64>,
    mean_pairs: f64,
    entanglement_entropy: f64,
    fidelity_closed_vs_numeric: f64,
    numeric_norm: f64,
    numeric_off_pair_mass: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    three_mode: Option<ThreeModeReport>,
}

pub fn cmd_evolve(r: &Resolved, format: Format) -> Result<Outcome, CliError> {
    let ev = &r.config.evolve;
    let e = &r.effective;
    let tau = match ev.tau {
        Some(t) => t,
        None if e.chi() > 0.0 => ev.chi_tau / e.chi(),
        None if ev.chi_tau == 0.0 => 0.0,
        None => {
            return Err(CliError::Config(
                "chi = 0, so chi_tau does not fix a time; set evolve.tau".into(),
            ))
        }
    };
    let coeffs = su11_coefficients(e, tau);
    let closed = evolve_closed_form(e, tau, ev.n_max)?;
    let numeric = evolve_numeric(e, tau, ev.n_max)?;
    let threshold = ev.tail_threshold;
    let mut converged = closed.tail_mass() <= threshold && numeric.tail_mass() <= threshold;
    let dist = pair_distribution(&closed);
    let three_mode = if ev.three_mode {
        let s = evolve_three_mode(e, tau, ev.truncations)?;
        let tails = s.tail_masses();
        let ok = tails.iter().all(|&t| t <= threshold);
        converged &= ok;
        let reduced = reduce_to_two_modes(&s);
        let (charge_mean, charge_variance) = s.charge_moments();
        Some(ThreeModeReport {
            truncations: ev.truncations,
            tail_masses: tails,
            converged: ok,
            reduced_trace: reduced.trace(),
            reduced_purity: reduced.purity(),
            fidelity_with_closed_form: reduced.fidelity_with(&closed),
            charge_mean,
            charge_variance,
            collective_occupation: s.collective_occupation(),
        })
    } else {
        None
    };
    let report = EvolveReport {
        tau,
        chi_tau: e.chi() * tau,
        gamma: coeffs.gamma.into(),
        gamma_tilde: coeffs.gamma_tilde.into(),
        beta: coeffs.beta.into(),
        pair_amplitude: coeffs.pair_amplitude.into(),
        squeeze_factor: coeffs.squeeze_factor.into(),
        n_max: ev.n_max,
        tail_threshold: threshold,
        closed_form_tail_mass: closed.tail_mass(),
        numeric_tail_mass: numeric.tail_mass(),
        converged,
        mean_pairs: dist.iter().enumerate().map(|(n, p)| n as f64 * p).sum(),
        pair_distribution: dist,
        entanglement_entropy: entanglement_entropy(&closed),
        fidelity_closed_vs_numeric: fidelity(&closed, &numeric),
        numeric_norm: numeric.raw_norm_sqr(),
        numeric_off_pair_mass: numeric.off_pair_mass(),
        three_mode,
    };
    let bytes = match format {
        Format::Json => to_json(&report),
        Format::Text => evolve_text(r, &report).into_bytes(),
    };
    Ok(Outcome {
        bytes,
        ok: converged,
    })
}

fn evolve_text(r: &Resolved, rep: &EvolveReport) -> String {
    let c = |z: &Complex| format!("{} {:+}i", z.re, z.im);
    let mut out = String::new();
    for l in header("evolve", r) {
        out.push_str(&format!("# {l}\n"));
    }
    let mut line = |k: &str, v: String| out.push_str(&format!("{k:<28} {v}\n"));
    line("tau", rep.tau.to_string());
    line("chi_tau", rep.chi_tau.to_string());
    line("gamma", c(&rep.gamma));
    line("gamma_tilde", c(&rep.gamma_tilde));
    line("beta", c(&rep.beta));
    line("Gamma", c(&rep.pair_amplitude));
    line("Gamma_tilde", c(&rep.squeeze_factor));
    line("n_max", rep.n_max.to_string());
    line("tail_mass closed/numeric", format!("{} / {}", rep.closed_form_tail_mass, rep.numeric_tail_mass));
    line("converged", rep.converged.to_string());
    line("mean pairs", rep.mean_pairs.to_string());
    line("entropy (nats)", rep.entanglement_entropy.to_string());
    line("fidelity closed vs numeric", rep.fidelity_closed_vs_numeric.to_string());
    line("numeric norm", rep.numeric_norm.to_string());
    line("numeric off-pair mass", rep.numeric_off_pair_mass.to_string());
    let shown: Vec<String> = rep
        .pair_distribution
        .iter()
        .take(8)
        .map(|p| p.to_string())
        .collect();
    line("p_n (n < 8)", shown.join(" "));
    if let Some(t) = &rep.three_mode {
        line("three-mode truncations", format!("{:?}", t.truncations));
        line("three-mode tail masses", format!("{:?}", t.tail_masses));
        line("three-mode fidelity", t.fidelity_with_closed_form.to_string());
        line("reduced trace / purity", format!("{} / {}", t.reduced_trace, t.reduced_purity));
        line("charge mean / variance", format!("{} / {}", t.charge_mean, t.charge_variance));
        line("<n_b>", t.collective_occupation.to_string());
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub status: Status,
    pub detail: String,
}

fn check(name: &'static str, passed: bool, detail: String) -> Check {
    Check {
        name,
        status: if passed { Status::Pass } else { Status::Fail },
        detail,
    }
}

fn worst<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    it.into_iter().fold(0.0, f64::max)
}

/// The invariant suite for one model.
pub fn validation_checks(r: &Resolved, exec: Execution) -> Result<Vec<Check>, CliError> {
    let e = &r.effective;
    let grid = omega_grid(r)?;
    let opts = spectra_options(r);
    let v = &r.config.validate;
    let mut checks = Vec::new();

    let vacuum = e.uncoupled();
    let vac_dev = worst(
        [0.0, FRAC_PI_4, FRAC_PI_2]
            .iter()
            .flat_map(|&t| exec.map(&grid, |&w| spectrum_point(&vacuum, t, w, &opts)))
            .map(|p| p.map(|(a, b)| (a - 1.0).abs().max((b - 1.0).abs())))
            .collect::<Result<Vec<_>, _>>()?,
    );
    checks.push(check("vacuum_baseline", vac_dev <= 1e-12, format!("max |S - 1| = {vac_dev:e}")));

    let bog = exec
        .map(&grid, |&w| scattering_matrix_with(e, w, &opts).map(|a| a.bogoliubov_defect()))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    let bog = worst(bog);
    checks.push(check("bogoliubov_identities", bog <= 1e-10, format!("max residual = {bog:e}")));

    let theta = r.config.spectrum.theta;
    let pairs = exec
        .map(&grid, |&w| {
            let a = spectrum_point(e, theta, w, &opts)?;
            let b = spectrum_point(e, theta + PI, w, &opts)?;
            Ok::<_, Error>((a, b))
        })
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    let pm = worst(pairs.iter().map(|((p, m), _)| (p - m).abs()));
    checks.push(check("plus_equals_minus", pm <= 1e-10, format!("max |S+ - S-| = {pm:e}")));
    let per = worst(pairs.iter().map(|((p, _), (q, _))| (p - q).abs()));
    checks.push(check("theta_pi_periodicity", per <= 1e-10, format!("max |S(θ) - S(θ+π)| = {per:e}")));
    let lowest = pairs.iter().map(|((p, m), _)| p.min(*m)).fold(f64::INFINITY, f64::min);
    checks.push(check("non_negative", lowest >= 0.0, format!("min S = {lowest}")));

    let regimes = regime_report(r);
    let approx_applies = regimes.get(CHECK_APPROX).is_some_and(|c| c.passed)
        && e.kappa1() == e.kappa2();
    if approx_applies {
        let g = e.g1().max(e.g2());
        let span = v.approx_span * g;
        let approx_grid = linear_grid(-span, span, 601)?;
        let devs = exec
            .map(&approx_grid, |&w| {
                let exact = spectrum_point(e, 0.0, w, &opts)?.0;
                Ok::<_, Error>((exact - approx_point(e, w)?).abs())
            })
            .into_iter()
            .collect::<Result<Vec<_>, _>>()?;
        let d = worst(devs);
        checks.push(check(
            "approx_agreement",
            d <= v.approx_tolerance,
            format!("max |S_exact - S_approx| over |ω| ≤ {span} = {d} (tolerance {})", v.approx_tolerance),
        ));
    } else {
        checks.push(Check {
            name: "approx_agreement",
            status: Status::Skip,
            detail: "large-detuning regime or symmetric decay not satisfied".into(),
        });
    }

    if e.chi() > 0.0 {
        let mut worst_fid = 1.0f64;
        let mut off = 0.0f64;
        for chi_tau in [0.1, 0.3, 0.5] {
            let tau = chi_tau / e.chi();
            let closed = evolve_closed_form(e, tau, 40)?;
            let numeric = evolve_numeric(e, tau, 40)?;
            worst_fid = worst_fid.min(fidelity(&closed, &numeric));
            off = off.max(numeric.off_pair_mass());
        }
        checks.push(check(
            "su11_oracle",
            worst_fid >= 1.0 - 1e-8,
            format!("min fidelity over χτ ∈ {{0.1, 0.3, 0.5}} = {worst_fid}"),
        ));
        checks.push(check("pair_superselection", off < 1e-12, format!("max off-pair mass = {off:e}")));

        let tau = 0.3 / e.chi();
        let c = su11_coefficients(e, tau);
        let h = bec_squeeze::fockdyn::PairHamiltonian::from_effective(e);
        let flipped = Su11Coefficients::from_exponents(
            C64::new(0.0, -h.kp * tau),
            C64::new(0.0, -h.k3 * tau),
            Branch::Flipped,
        );
        let d = (c.pair_amplitude - flipped.pair_amplitude)
            .norm()
            .max((c.squeeze_factor - flipped.squeeze_factor).norm());
        checks.push(check("branch_invariance", d <= 1e-12, format!("max difference = {d:e}")));
    } else {
        for name in ["su11_oracle", "pair_superselection", "branch_invariance"] {
            checks.push(Check {
                name,
                status: Status::Skip,
                detail: "chi = 0".into(),
            });
        }
    }
    Ok(checks)
}

pub fn cmd_validate(r: &Resolved, exec: Execution, format: Format) -> Result<Outcome, CliError> {
    let checks = validation_checks(r, exec)?;
    let ok = checks.iter().all(|c| c.status != Status::Fail);
    let regimes = regime_report(r);
    let bytes = match format {
        Format::Json => {
            #[derive(Serialize)]
            struct Report<'a> {
                passed: bool,
                checks: &'a [Check],
                regimes: &'a RegimeReport,
            }
            to_json(&Report {
                passed: ok,
                checks: &checks,
                regimes: &regimes,
            })
        }
        Format::Text => {
            let mut out = String::new();
            for l in header("validate", r) {
                out.push_str(&format!("# {l}\n"));
            }
            for c in &checks {
                let tag = match c.status {
                    Status::Pass => "PASS",
                    Status::Fail => "FAIL",
                    Status::Skip => "SKIP",
                };
                out.push_str(&format!("{tag} {:<24} {}\n", c.name, c.detail));
            }
            for c in &regimes.checks {
                out.push_str(&format!(
                    "INFO regime {:<17} ratio {} ({})\n",
                    c.name,
                    c.ratio,
                    if c.passed { "ok" } else { "below margin" }
                ));
            }
            out.push_str(if ok { "validation passed\n" } else { "validation FAILED\n" });
            out.into_bytes()
        }
    };
    Ok(Outcome { bytes, ok })
}

pub fn swept_is_atoms(r: &Resolved) -> bool {
    r.config.sweep.parameter == SweepParameter::AtomNumber
}
