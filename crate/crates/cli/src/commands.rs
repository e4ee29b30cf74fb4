use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::path::Path;

use nhkitaev::finite::{
    assemble_bdg, eigensolve_with, localization_with, EigenOptions, LocalizationReport,
    LocalizationThresholds,
};
use nhkitaev::infinite::{spectrum_curve_with, Branch, InfiniteOptions, SpectrumPoint};
use nhkitaev::model::periodic_lambda;
use nhkitaev::par::Execution;
use nhkitaev::polycore::Polynomial;
use nhkitaev::skin::{bistritz, no_skin_conditions, skin_sweep, SkinVerdict};
use nhkitaev::zeromode::{has_zero_mode, zero_mode_roots, zero_mode_state};
use nhkitaev::Complex;
use serde::Serialize;
use serde_json::json;

use crate::config::{OutputFormat, RunConfig, DEFAULT_N_ALPHA, DEFAULT_N_K};
use crate::error::CliError;
use crate::literal::parse_complex;
use crate::output::{float, sidecar, Sink};

fn header(sink: &mut Sink, cfg: &RunConfig) -> Result<(), CliError> {
    sink.line(&format!("# {}", cfg.echo()))
}

fn k_grid(n_k: usize) -> impl Iterator<Item = f64> {
    (0..n_k).map(move |j| TAU * j as f64 / n_k as f64)
}

pub fn periodic(cfg: &RunConfig) -> Result<(), CliError> {
    let p = cfg.params()?;
    let n_k = cfg.n_k.unwrap_or(DEFAULT_N_K);
    let rows: Vec<(f64, Complex, Complex)> = k_grid(n_k)
        .map(|k| {
            let (lp, lm) = periodic_lambda(&p, k);
            (k, lp, lm)
        })
        .collect();
    let mut sink = Sink::open(cfg.output_path.as_deref())?;
    match cfg.format() {
        OutputFormat::Csv => {
            header(&mut sink, cfg)?;
            sink.line("k,re_lambda_plus,im_lambda_plus,re_lambda_minus,im_lambda_minus")?;
            for (k, lp, lm) in rows {
                sink.row([float(k), float(lp.re), float(lp.im), float(lm.re), float(lm.im)])?;
            }
        }
        OutputFormat::Json => {
            let rows: Vec<_> =
                rows.iter().map(|(k, lp, lm)| json!({ "k": k, "lambda_plus": lp, "lambda_minus": lm })).collect();
            sink.json(&json!({ "config": cfg, "rows": rows }))?;
        }
    }
    sink.finish()
}

#[derive(Serialize)]
struct FiniteSummary {
    sites: usize,
    pairing_residual: f64,
    precision_flag: nhkitaev::finite::PrecisionFlag,
}

pub fn finite(cfg: &RunConfig, localize: bool, vectors_dir: Option<&Path>) -> Result<(), CliError> {
    let p = cfg.params()?;
    let sites = cfg.sites.ok_or_else(|| CliError::Config("finite needs --L".into()))?;
    let mut opts = EigenOptions::default();
    if let Some(tol) = cfg.tolerance("pairing") {
        opts.pairing_tolerance = tol;
    }
    let mut th = LocalizationThresholds::default();
    if let Some(v) = cfg.tolerance("fit_quality") {
        th.fit_quality = v;
    }
    if let Some(v) = cfg.tolerance("min_rate") {
        th.min_rate = v;
    }
    if let Some(v) = cfg.tolerance("boundary_fraction") {
        th.boundary_fraction = v;
    }

    let mat = assemble_bdg(&p, sites)?;
    let want_vectors = localize || vectors_dir.is_some();
    let eig = eigensolve_with(&mat, want_vectors, opts)?;
    let reports: Option<Vec<LocalizationReport>> = match (&eig.vectors, localize) {
        (Some(vs), true) => Some(vs.iter().map(|v| localization_with(v, sites, th)).collect::<Result<_, _>>()?),
        _ => None,
    };
    let summary =
        FiniteSummary { sites, pairing_residual: eig.pairing_residual, precision_flag: eig.precision_flag };

    let mut sink = Sink::open(cfg.output_path.as_deref())?;
    match cfg.format() {
        OutputFormat::Csv => {
            header(&mut sink, cfg)?;
            sink.line(&format!("# {}", serde_json::to_string(&summary).expect("summary serialises")))?;
            let mut cols = vec!["index", "re_lambda", "im_lambda"];
            if reports.is_some() {
                cols.extend(["decay_fit_rate", "fit_quality", "boundary_mass_left", "boundary_mass_right", "verdict"]);
            }
            sink.line(&cols.join(","))?;
            for (i, z) in eig.values.iter().enumerate() {
                let mut row = vec![i.to_string(), float(z.re), float(z.im)];
                if let Some(r) = reports.as_ref().map(|rs| &rs[i]) {
                    row.extend([
                        float(r.decay_fit_rate),
                        float(r.fit_quality),
                        float(r.boundary_mass_left),
                        float(r.boundary_mass_right),
                        json!(r.verdict).as_str().unwrap_or_default().to_string(),
                    ]);
                }
                sink.row(row)?;
            }
        }
        OutputFormat::Json => {
            sink.json(&json!({
                "config": cfg,
                "summary": summary,
                "eigenvalues": eig.values,
                "localization": reports,
            }))?;
        }
    }
    sink.finish()?;

    if let (Some(dir), Some(vs)) = (vectors_dir, &eig.vectors) {
        let width = (vs.len().max(1) - 1).to_string().len();
        for (i, v) in vs.iter().enumerate() {
            let path = dir.join(format!("state_{i:0width$}.csv"));
            let mut out = Sink::open(Some(&path))?;
            header(&mut out, cfg)?;
            let z = eig.values[i];
            out.line(&format!("# lambda = {}{:+e}i", float(z.re), z.im))?;
            out.line("site,amp_component_1,amp_component_2")?;
            for (s, pair) in v.chunks(2).enumerate() {
                out.row([(s + 1).to_string(), float(pair[0].norm()), float(pair[1].norm())])?;
            }
            out.finish()?;
        }
    }
    Ok(())
}

fn branch_rows<'a>(pts: impl Iterator<Item = &'a SpectrumPoint>) -> Vec<[String; 6]> {
    pts.map(|pt| {
        [
            float(pt.alpha),
            float(pt.lambda.re),
            float(pt.lambda.im),
            pt.branch.label().to_string(),
            float(pt.kappa.norm()),
            float(pt.s.norm()),
        ]
    })
    .collect()
}

const BRANCH_COLUMNS: &str = "alpha,re_lambda,im_lambda,branch,abs_kappa,abs_s";

pub fn infinite(cfg: &RunConfig, exec: Execution) -> Result<(), CliError> {
    let p = cfg.params()?;
    let n_alpha = cfg.n_alpha.unwrap_or(DEFAULT_N_ALPHA);
    let mut opts = InfiniteOptions { execution: exec, ..Default::default() };
    if let Some(v) = cfg.tolerance("modulus") {
        opts.modulus_tol = v;
    }
    if let Some(v) = cfg.tolerance("reconstruction") {
        opts.reconstruction_tol = v;
    }
    let curve = spectrum_curve_with(&p, n_alpha, &opts)?;
    for gap in &curve.gaps {
        eprintln!("gap at alpha = {}: {}", float(gap.alpha), gap.reason);
    }

    match (cfg.format(), cfg.output_path.as_deref()) {
        (OutputFormat::Csv, Some(dir)) => {
            for b in Branch::ALL {
                let mut sink = Sink::open(Some(&dir.join(format!("{}.csv", b.label()))))?;
                header(&mut sink, cfg)?;
                sink.line(BRANCH_COLUMNS)?;
                for row in branch_rows(curve.branch(b)) {
                    sink.row(row)?;
                }
                sink.finish()?;
            }
            Ok(())
        }
        (OutputFormat::Csv, None) => {
            let mut sink = Sink::open(None)?;
            header(&mut sink, cfg)?;
            sink.line(BRANCH_COLUMNS)?;
            for row in branch_rows(curve.points.iter()) {
                sink.row(row)?;
            }
            sink.finish()
        }
        (OutputFormat::Json, path) => {
            let mut sink = Sink::open(path)?;
            sink.json(&json!({ "config": cfg, "curve": curve }))?;
            sink.finish()
        }
    }
}

pub fn zero_mode(cfg: &RunConfig) -> Result<(), CliError> {
    let p = cfg.params()?;
    let verdict = has_zero_mode(&p)?;
    // roots are undefined for d1 = 0; the verdict still is
    let roots = zero_mode_roots(&p).ok();
    let state = match cfg.state {
        Some(sites) => {
            let path = cfg
                .output_path
                .as_deref()
                .ok_or_else(|| CliError::Config("--state needs --out for the verdict file".into()))?;
            Some((sidecar(path, ".state.csv"), zero_mode_state(&p, sites)?))
        }
        None => None,
    };
    let mut sink = Sink::open(cfg.output_path.as_deref())?;
    sink.json(&json!({ "config": cfg, "verdict": verdict, "roots": roots }))?;
    sink.finish()?;

    if let Some((path, psi)) = state {
        let mut out = Sink::open(Some(&path))?;
        header(&mut out, cfg)?;
        out.line("site,re_u,im_u,re_v,im_v")?;
        for (s, pair) in psi.chunks(2).enumerate() {
            out.row([(s + 1).to_string(), float(pair[0].re), float(pair[0].im), float(pair[1].re), float(pair[1].im)])?;
        }
        out.finish()?;
    }
    Ok(())
}

#[derive(Serialize)]
struct SkinFailure {
    k: f64,
    branch: &'static str,
    reason: String,
}

pub fn skin(cfg: &RunConfig, exec: Execution) -> Result<(), CliError> {
    let p = cfg.params()?;
    let n_k = cfg.n_k.unwrap_or(DEFAULT_N_K);
    let conditions = no_skin_conditions(&p);
    let results = skin_sweep(&p, n_k, exec);

    let mut verdicts: Vec<SkinVerdict> = Vec::with_capacity(results.len());
    let mut failures = Vec::new();
    for (j, r) in results.into_iter().enumerate() {
        match r {
            Ok(v) => verdicts.push(v),
            Err(e) => failures.push(SkinFailure {
                k: TAU * (j / 2) as f64 / n_k as f64,
                branch: if j % 2 == 0 { "plus" } else { "minus" },
                reason: e.to_string(),
            }),
        }
    }
    let mut matched: BTreeMap<&str, usize> = BTreeMap::new();
    for v in &verdicts {
        if let Some(c) = v.matched_condition {
            *matched.entry(c.label()).or_default() += 1;
        }
    }
    let summary = json!({
        "grid_points": 2 * n_k,
        "skin": verdicts.iter().filter(|v| v.skin).count(),
        "no_skin": verdicts.iter().filter(|v| !v.skin).count(),
        "special_points": verdicts.iter().filter(|v| v.special_point).count(),
        "ambiguous": verdicts.iter().filter(|v| v.ambiguous).count(),
        "count_disagreements": verdicts.iter().filter(|v| v.on_circle_count != v.root_check_count).count(),
        "applicable_conditions": conditions,
        "matched_conditions": matched,
        "failures": failures,
    });

    let mut sink = Sink::open(cfg.output_path.as_deref())?;
    match cfg.format() {
        OutputFormat::Csv => {
            header(&mut sink, cfg)?;
            sink.line(
                "k,branch,re_lambda,im_lambda,on_circle_count,skin,matched_condition,special_point,root_check_count,ambiguous",
            )?;
            for v in &verdicts {
                sink.row([
                    float(v.k),
                    json!(v.branch_sign).as_str().unwrap_or_default().to_string(),
                    float(v.lambda.re),
                    float(v.lambda.im),
                    v.on_circle_count.to_string(),
                    v.skin.to_string(),
                    v.matched_condition.map(|c| c.label()).unwrap_or("").to_string(),
                    v.special_point.to_string(),
                    v.root_check_count.to_string(),
                    v.ambiguous.to_string(),
                ])?;
            }
            sink.finish()?;
            let text = serde_json::to_string_pretty(&summary).expect("summary serialises");
            match cfg.output_path.as_deref() {
                Some(path) => {
                    let mut side = Sink::open(Some(&sidecar(path, ".summary.json")))?;
                    side.line(&text)?;
                    side.finish()?;
                }
                None => eprintln!("{text}"),
            }
        }
        OutputFormat::Json => {
            sink.json(&json!({ "config": cfg, "summary": summary, "verdicts": verdicts }))?;
            sink.finish()?;
        }
    }
    Ok(())
}

/// `coeffs` are comma-separated complex literals, constant term first.
pub fn bistritz_cmd(coeffs: &str, out: Option<&Path>) -> Result<(), CliError> {
    let cs: Vec<Complex> = coeffs
        .split(',')
        .map(|s| parse_complex(s).map_err(|e| CliError::Config(format!("--coeffs: {e}"))))
        .collect::<Result<_, _>>()?;
    let poly = Polynomial::new(cs.clone());
    if poly.degree() < 1 {
        return Err(CliError::Config("--coeffs must describe a polynomial of degree at least 1".into()));
    }
    let outcome = bistritz(&poly)?;
    let roots = poly.roots()?;
    let moduli: Vec<f64> = roots.iter().map(|z| z.norm()).collect();
    let mut sink = Sink::open(out)?;
    sink.json(&json!({
        "coeffs": cs,
        "outcome": outcome,
        "inside": outcome.inside(),
        "on": outcome.on(),
        "outside": outcome.outside(),
        "roots": roots,
        "root_moduli": moduli,
    }))?;
    sink.finish()
}
