use std::fs;

use dtn_core::domains::{enumerate_modes, normal_derivative, BoundaryFunction, DirichletMode, DomainId, ModeLabel};
use dtn_core::linalg_model::{random_model_with, run_suite, FiniteModel, ModelFile, ModelReport};
use dtn_core::positivity::{certify_table, verdicts_csv, verdicts_json, SearchConfig};
use dtn_core::traceform::{
    branch_eval, branch_sweep, default_basis, eval_form, galerkin_eigenvalues, laurent_data, nearest_pole,
    robin_form, SweepRow, TraceFormSpec,
};
use dtn_core::{Complex64, DtnError};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::args::*;
use crate::output::{emit, json, num, Csv};
use crate::CliError;

fn default_resolution(domain: DomainId) -> usize {
    match domain {
        DomainId::Disc | DomainId::Square => 128,
        DomainId::Ball => 48,
    }
}

fn build_spec(d: &Domain) -> Result<TraceFormSpec, CliError> {
    let domain: DomainId = d.domain.parse()?;
    let res = d.resolution.unwrap_or_else(|| default_resolution(domain));
    Ok(TraceFormSpec::new(domain, res)?.with_tolerance(d.tol)?)
}

fn grid_points(r: &Range) -> Result<Vec<f64>, CliError> {
    if r.count < 2 {
        return Err(CliError::Usage(format!("--count must be at least 2, got {}", r.count)));
    }
    if !(r.z_min.is_finite() && r.z_max.is_finite() && r.z_min < r.z_max) {
        return Err(CliError::Usage(format!("need z-min < z-max, got [{}, {}]", r.z_min, r.z_max)));
    }
    let h = (r.z_max - r.z_min) / (r.count - 1) as f64;
    Ok((0..r.count)
        .map(|i| if i + 1 == r.count { r.z_max } else { r.z_min + h * i as f64 })
        .collect())
}

fn positive(name: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(CliError::Usage(format!("--{name} must be positive, got {v}")))
    }
}

fn label_text(l: &ModeLabel) -> String {
    match *l {
        ModeLabel::Disc { k, l, sine, .. } => format!("k={k} l={l} {}", if sine { "sin" } else { "cos" }),
        ModeLabel::Square { m, n } => format!("m={m} n={n}"),
        ModeLabel::Ball { n, k, l, .. } => format!("n={n} k={k} l={l}"),
    }
}

pub fn spectrum(a: &SpectrumArgs) -> Result<(), CliError> {
    positive("e-max", a.e_max)?;
    let domain: DomainId = a.domain.domain.parse()?;
    let modes = enumerate_modes(domain, a.e_max)?;
    let text = match a.output.format() {
        Format::Json => json(&dtn_core::domains::catalog_json(&modes)),
        Format::Csv => {
            let mut csv = Csv::new(&["domain", "E", "multiplicity", "labels"]);
            for m in &modes {
                let labels: Vec<String> = m.labels.iter().map(label_text).collect();
                csv.row(&[domain.to_string(), num(m.energy), m.multiplicity.to_string(), labels.join(";")]);
            }
            csv.finish()
        }
    };
    emit(a.output.out.as_deref(), &text)
}

fn square_sweep(spec: &TraceFormSpec, index: u32, basis: usize, zs: &[f64]) -> Result<Vec<SweepRow>, CliError> {
    if index as usize >= basis {
        return Err(CliError::Usage(format!("--k {index} must be below --basis {basis}")));
    }
    let rows: dtn_core::Result<Vec<SweepRow>> = zs
        .par_iter()
        .map(|&z| match galerkin_eigenvalues(spec, z, basis) {
            Ok(ev) => {
                let pole_distance = nearest_pole(spec.domain, Complex64::new(z, 0.0))?;
                let result = dtn_core::traceform::EvalResult {
                    value: Complex64::new(ev[index as usize], 0.0),
                    level: basis,
                    tail_bound: f64::NAN,
                    pole_distance,
                    certified: false,
                };
                Ok(SweepRow { z, branch: index, result: Some(result), pole: None })
            }
            Err(DtnError::PoleProximity { pole, .. }) => Ok(SweepRow { z, branch: index, result: None, pole: Some(pole) }),
            Err(e) => Err(e),
        })
        .collect();
    Ok(rows?)
}

pub fn branch(a: &BranchArgs) -> Result<(), CliError> {
    let spec = build_spec(&a.domain)?;
    let zs = grid_points(&a.range)?;
    let rows = match spec.domain {
        DomainId::Square => square_sweep(&spec, a.k, a.basis, &zs)?,
        _ => branch_sweep(&spec, a.k, &zs)?,
    };
    let text = match a.output.format() {
        Format::Json => json(&rows),
        Format::Csv => {
            let mut csv = Csv::new(&["z", "branch_k", "value", "tail_bound", "pole_distance"]);
            for r in &rows {
                let fields = match (&r.result, r.pole) {
                    (Some(res), _) => {
                        // no tail figure for Galerkin eigenvalues
                        let tail = if res.tail_bound.is_nan() { String::new() } else { num(res.tail_bound) };
                        [num(r.z), r.branch.to_string(), num(res.value.re), tail, num(res.pole_distance)]
                    }
                    (None, pole) => {
                        let d = pole.map_or(0.0, |p| (r.z - p).abs());
                        [num(r.z), r.branch.to_string(), "pole".into(), String::new(), num(d)]
                    }
                };
                csv.row(&fields);
            }
            csv.finish()
        }
    };
    emit(a.output.out.as_deref(), &text)
}

#[derive(Debug, Serialize)]
struct LaurentRow {
    domain: DomainId,
    /// Angular family on the disc and ball; absent on the square.
    family: Option<u32>,
    #[serde(rename = "E")]
    energy: f64,
    residue: f64,
    regular_part: f64,
    numeric_limit: f64,
    relative_error: f64,
}

fn relative(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }
}

/// Residue `2E` of a branch against the symmetric limit of `(z − E)Ě_k(z)`
/// at `|z − E| = 1e−4·E`.
fn branch_laurent(spec: &TraceFormSpec, family: u32, e: f64) -> dtn_core::Result<LaurentRow> {
    let delta = 1e-4 * e;
    let up = branch_eval(spec, family, Complex64::new(e + delta, 0.0))?.value.re;
    let down = branch_eval(spec, family, Complex64::new(e - delta, 0.0))?.value.re;
    let residue = 2.0 * e;
    let numeric_limit = 0.5 * delta * (up - down);
    Ok(LaurentRow {
        domain: spec.domain,
        family: Some(family),
        energy: e,
        residue,
        regular_part: 0.5 * (up + down),
        numeric_limit,
        relative_error: relative(numeric_limit, residue),
    })
}

/// Square: `ψ = ∂ν` of the first member, residue from the couplings.
fn square_laurent(spec: &TraceFormSpec, mode: &DirichletMode) -> dtn_core::Result<LaurentRow> {
    let psi: BoundaryFunction = normal_derivative(mode, 0, &spec.grid)?;
    let data = laurent_data(spec, mode, &psi)?;
    let e = mode.energy;
    let delta = 1e-4 * e;
    let up = eval_form(spec, Complex64::new(e + delta, 0.0), &psi, &psi)?.value.re;
    let down = eval_form(spec, Complex64::new(e - delta, 0.0), &psi, &psi)?.value.re;
    let numeric_limit = 0.5 * delta * (up - down);
    Ok(LaurentRow {
        domain: spec.domain,
        family: None,
        energy: e,
        residue: data.residue,
        regular_part: data.regular_part,
        numeric_limit,
        relative_error: relative(numeric_limit, data.residue),
    })
}

pub fn laurent(a: &LaurentArgs) -> Result<(), CliError> {
    positive("e-max", a.e_max)?;
    let spec = build_spec(&a.domain)?;
    let modes = enumerate_modes(spec.domain, a.e_max)?;
    let mut jobs: Vec<(Option<u32>, &DirichletMode)> = Vec::new();
    for mode in &modes {
        if spec.domain == DomainId::Square {
            jobs.push((None, mode));
            continue;
        }
        let mut families: Vec<u32> = mode.labels.iter().map(|l| l.family()).collect();
        families.dedup();
        for f in families {
            if a.k.is_none_or(|k| k == f) {
                jobs.push((Some(f), mode));
            }
        }
    }
    let rows: dtn_core::Result<Vec<LaurentRow>> = jobs
        .par_iter()
        .map(|&(family, mode)| match family {
            Some(f) => branch_laurent(&spec, f, mode.energy),
            None => square_laurent(&spec, mode),
        })
        .collect();
    let rows = rows?;
    let text = match a.output.format() {
        Format::Json => json(&rows),
        Format::Csv => {
            let mut csv = Csv::new(&["domain", "family", "E", "residue", "regular_part", "numeric_limit", "relative_error"]);
            for r in &rows {
                csv.row(&[
                    r.domain.to_string(),
                    r.family.map_or(String::new(), |f| f.to_string()),
                    num(r.energy),
                    num(r.residue),
                    num(r.regular_part),
                    num(r.numeric_limit),
                    num(r.relative_error),
                ]);
            }
            csv.finish()
        }
    };
    emit(a.output.out.as_deref(), &text)
}

pub fn positivity(a: &PositivityArgs) -> Result<(), CliError> {
    positive("e-max", a.e_max)?;
    let spec = build_spec(&a.domain)?;
    let verdicts = certify_table(&spec, a.e_max, SearchConfig { seed: a.seed, draws: a.draws })?;
    let text = match a.output.format() {
        Format::Json => json(&verdicts_json(&verdicts)),
        Format::Csv => verdicts_csv(&verdicts),
    };
    emit(a.output.out.as_deref(), &text)
}

/// Probe for the Robin comparison: the first cosine of family `k` on the
/// disc, the zonal harmonic of degree `k` on the ball, basis sine `k` on
/// the square.
fn robin_probe(spec: &TraceFormSpec, k: u32) -> BoundaryFunction {
    match spec.domain {
        DomainId::Disc => BoundaryFunction::fourier(&spec.grid, k, false),
        DomainId::Ball => BoundaryFunction::spherical_harmonic(&spec.grid, k, 0),
        DomainId::Square => default_basis(spec, k as usize + 1).pop().expect("nonempty basis"),
    }
}

pub fn robin(a: &RobinArgs) -> Result<(), CliError> {
    let spec = build_spec(&a.domain)?;
    let zs = grid_points(&a.range)?;
    if a.beta.is_empty() {
        return Err(CliError::Usage("--beta needs at least one value".into()));
    }
    for &b in &a.beta {
        positive("beta", b)?;
    }
    let probe = robin_probe(&spec, a.k);
    let mut csv = Csv::new(&["beta", "z", "neumann", "robin", "offset"]);
    #[derive(Serialize)]
    struct Row {
        beta: f64,
        z: f64,
        neumann: Option<f64>,
        robin: Option<f64>,
        offset: Option<f64>,
        pole: Option<f64>,
    }
    let mut rows = Vec::new();
    for &beta in &a.beta {
        let rspec = spec.clone().with_constant_robin(beta)?;
        let evaluated: dtn_core::Result<Vec<Row>> = zs
            .par_iter()
            .map(|&z| {
                let zc = Complex64::new(z, 0.0);
                let pair = eval_form(&spec, zc, &probe, &probe).and_then(|n| Ok((n, robin_form(&rspec, zc, &probe, &probe)?)));
                match pair {
                    Ok((n, r)) => {
                        let (n, r) = (n.value.re, r.value.re);
                        Ok(Row { beta, z, neumann: Some(n), robin: Some(r), offset: Some(r - n), pole: None })
                    }
                    Err(DtnError::PoleProximity { pole, .. }) => {
                        Ok(Row { beta, z, neumann: None, robin: None, offset: None, pole: Some(pole) })
                    }
                    Err(e) => Err(e),
                }
            })
            .collect();
        rows.extend(evaluated?);
    }
    let text = match a.output.format() {
        Format::Json => json(&rows),
        Format::Csv => {
            for r in &rows {
                let f = |v: Option<f64>| v.map_or_else(|| "pole".to_string(), num);
                csv.row(&[num(r.beta), num(r.z), f(r.neumann), f(r.robin), f(r.offset)]);
            }
            csv.finish()
        }
    };
    emit(a.output.out.as_deref(), &text)
}

fn worst_ratio(report: &ModelReport) -> (String, f64) {
    let mut worst = (String::new(), 0.0f64);
    for c in &report.checks {
        let ratio = if c.tolerance > 0.0 {
            c.residual / c.tolerance
        } else if c.pass {
            0.0
        } else {
            f64::INFINITY
        };
        if ratio >= worst.1 {
            worst = (c.name.clone(), ratio);
        }
    }
    worst
}

pub fn model(a: &ModelArgs) -> Result<(), CliError> {
    let reports: Vec<ModelReport> = if let Some(path) = &a.input {
        let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let file: ModelFile = serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("{}: not a model file: {e}", path.display())))?;
        let model = FiniteModel::from_file(&file)?;
        let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
        vec![run_suite(&model, &mut rng)?]
    } else {
        if a.n < 2 {
            return Err(CliError::Usage(format!("--n must be at least 2, got {}", a.n)));
        }
        if let Some(m) = a.m {
            if !(1..a.n).contains(&m) {
                return Err(CliError::Usage(format!("--m must lie in [1, n), got {m}")));
            }
        }
        if a.trials == 0 {
            return Err(CliError::Usage("--trials must be positive".into()));
        }
        let reports: dtn_core::Result<Vec<ModelReport>> = (0..a.trials as u64)
            .into_par_iter()
            .map(|t| {
                let (model, mut rng) = random_model_with(a.seed.wrapping_add(t), a.n, a.m);
                run_suite(&model, &mut rng)
            })
            .collect();
        reports?
    };
    let text = match a.output.format() {
        Format::Json => json(&reports),
        Format::Csv => {
            let mut csv = Csv::new(&["trial", "seed", "n", "m", "pass", "indefinite_points", "worst_check", "worst_ratio"]);
            for (t, r) in reports.iter().enumerate() {
                let (name, ratio) = worst_ratio(r);
                csv.row(&[
                    t.to_string(),
                    r.seed.map_or(String::new(), |s| s.to_string()),
                    r.n.to_string(),
                    r.m.to_string(),
                    r.pass.to_string(),
                    r.indefinite_points.to_string(),
                    name,
                    num(ratio),
                ]);
            }
            csv.finish()
        }
    };
    emit(a.output.out.as_deref(), &text)?;
    let failed: Vec<String> = reports
        .iter()
        .enumerate()
        .filter(|(_, r)| !r.pass)
        .map(|(t, r)| format!("trial {t}: {}", r.failures().map(|c| c.name.as_str()).collect::<Vec<_>>().join(", ")))
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Numerical(format!("model checks failed: {}", failed.join("; "))))
    }
}
