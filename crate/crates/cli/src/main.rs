//! Command-line front end: JSON in, JSON out, one job per invocation.
//!
//! Exit codes: 0 success (all verification residuals pass), 2 schema or
//! argument violation, 3 numeric failure, 4 no-solution with an obstruction
//! report, 5 capability limit.

mod payload;

use clap::{Parser, Subcommand};
use cmvkit::cmv::{
    assemble_cmv, defect_data, lm_factors, params_from_truncated, TruncatedCmv,
};
use cmvkit::error::Error;
use cmvkit::inverse::{
    blaschke_condition, mixed_first, mixed_last, reconstruct_from_spectrum, MixedFirstData,
    MixedFirstOutcome, MixedLastData,
};
use cmvkit::numkernel::singular_values;
use cmvkit::opuc::{measure_from_blaschke, verblunsky_from_measure};
use cmvkit::schurfun::{blaschke_from_schur_params, schur_params_of_blaschke, unit_circle_points};
use cmvkit::spectra::{charfun_schur, spectrum, spectrum_of_dense};
use cmvkit::Tolerances;
use num_complex::Complex64;
use payload::*;
use serde_json::{json, Value};
use std::io::Read;
use std::path::Path;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "cmvkit",
    version,
    about = "Spectral toolbox for CMV and truncated CMV matrices",
    long_about = "Builds CMV matrices from Schur parameters, analyzes their spectra and \
                  characteristic functions, and solves the inverse problems from full or \
                  mixed spectral data. All input and output is JSON; complex numbers are \
                  [re, im] pairs."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Input JSON file, or '-' for standard input.
    #[arg(long, global = true, default_value = "-")]
    input: String,
    /// Output file, or '-' for standard output. File writes are atomic.
    #[arg(long, global = true, default_value = "-")]
    output: String,
    /// Override the structural-identity tolerance (default 1e-12).
    #[arg(long, global = true)]
    tol_structural: Option<f64>,
    /// Override the root/eigenvalue tolerance (default 1e-8).
    #[arg(long, global = true)]
    tol_roots: Option<f64>,
    /// Seed for the deterministic Newton multi-start stages.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Schur parameters of a Blaschke product { phase, zeros }.
    SchurParams,
    /// Synthesize the Blaschke product of a parameter list { interior, terminal }.
    Synth,
    /// Assemble the unitary CMV matrix of a parameter list.
    BuildCmv,
    /// Assemble and truncate: the contraction with the given parameters.
    Truncate,
    /// Recover the parameters of a truncated CMV matrix { matrix }.
    RecoverParams,
    /// Eigenvalues (with multiplicities) of a matrix or of the truncation of a parameter list.
    Spectrum,
    /// Evaluate the characteristic Schur function of a parameter list.
    Charfun {
        /// Evaluation point "re,im"; repeatable.
        #[arg(long)]
        at: Vec<String>,
        /// Emit a sampled grid of this many uniform angles.
        #[arg(long)]
        grid: Option<usize>,
        /// Radius for --grid samples.
        #[arg(long, default_value_t = 0.5)]
        radius: f64,
    },
    /// Spectral measure of a Blaschke product { phase, zeros }.
    Measure,
    /// Truncated CMV matrix with the prescribed eigenvalue multiset.
    InvertSpectrum {
        /// Phase convention for the one-parameter family.
        #[arg(long, default_value_t = 0.0)]
        phase: f64,
    },
    /// Reconstruction from partial spectrum + first parameters (unique).
    MixedFirst,
    /// Reconstruction from partial spectrum + last parameters (existence).
    MixedLast,
    /// Run the full invariant suite on a truncated CMV matrix { matrix }.
    Verify,
    /// Partial sums of Σ(1−|z_n|) over a candidate eigenvalue sequence.
    BlaschkeSum,
}

struct Failure {
    code: i32,
    body: Value,
}

impl Failure {
    fn from_error(e: &Error) -> Self {
        Failure {
            code: exit_code_for(e),
            body: error_value(error_kind(e), &e.to_string()),
        }
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Argument(_) => "argument",
        Error::Numeric(_) => "numeric",
        Error::Singular(_) => "singular",
        Error::EigNonConvergence { .. } => "eig-non-convergence",
        Error::NotStrictSchur { .. } => "not-strict-schur",
        Error::InternalConsistency(_) => "internal-consistency",
        Error::Structure(_) => "structure",
        Error::MeasureDegenerate(_) => "measure-degenerate",
        Error::ZerosNotInDisk(_) => "zeros-not-in-disk",
        Error::ExistenceNotFound(_) => "existence-not-found",
        Error::Capability(_) => "capability",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (body, code) = match run(&cli) {
        Ok((value, code)) => (value, code),
        Err(f) => (f.body, f.code),
    };
    let text = serde_json::to_string_pretty(&body).expect("output serializes");
    if let Err(e) = write_output(&cli.output, &text) {
        eprintln!("cmvkit: cannot write output: {e}");
        return ExitCode::from(3);
    }
    ExitCode::from(code as u8)
}

fn write_output(path: &str, text: &str) -> std::io::Result<()> {
    if path == "-" {
        println!("{text}");
        return Ok(());
    }
    let target = Path::new(path);
    let tmp = target.with_extension("cmvkit-tmp");
    std::fs::write(&tmp, format!("{text}\n"))?;
    std::fs::rename(&tmp, target)
}

fn read_input(path: &str) -> Result<String, Failure> {
    if path == "-" {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf).map_err(|e| Failure {
            code: 2,
            body: error_value("input", &format!("cannot read standard input: {e}")),
        })?;
        Ok(buf)
    } else {
        std::fs::read_to_string(path).map_err(|e| Failure {
            code: 2,
            body: error_value("input", &format!("cannot read {path}: {e}")),
        })
    }
}

fn parse_payload<T: serde::de::DeserializeOwned>(text: &str) -> Result<T, Failure> {
    serde_json::from_str(text).map_err(|e| Failure {
        code: 2,
        body: error_value("schema", &format!("payload does not match the schema: {e}")),
    })
}

fn tolerances(cli: &Cli) -> Result<Tolerances, Failure> {
    let base = Tolerances::default();
    let eps_structural = cli.tol_structural.unwrap_or(base.eps_structural);
    let eps_roots = cli.tol_roots.unwrap_or(base.eps_roots);
    let eps_deflate = if eps_structural <= base.eps_deflate && base.eps_deflate <= eps_roots {
        base.eps_deflate
    } else {
        (eps_structural * eps_roots).sqrt()
    };
    Tolerances::new(eps_structural, eps_roots, eps_deflate)
        .map_err(|e| Failure::from_error(&e))
}

fn core<T>(r: cmvkit::Result<T>) -> Result<T, Failure> {
    r.map_err(|e| Failure::from_error(&e))
}

/// Fold a verification block into the output and pick the exit code:
/// 0 when every residual passes, 3 otherwise.
fn finish(mut body: Value, verification: VerificationOut) -> (Value, i32) {
    let code = if verification.passed { 0 } else { 3 };
    body["verification"] = serde_json::to_value(&verification).expect("serializable");
    (body, code)
}

fn run(cli: &Cli) -> Result<(Value, i32), Failure> {
    let tol = tolerances(cli)?;
    let text = read_input(&cli.input)?;
    match &cli.command {
        Command::SchurParams => {
            let input: BlaschkeIn = parse_payload(&text)?;
            let b = core(input.build(&tol))?;
            let params = core(schur_params_of_blaschke(&b, &tol))?;
            // round trip back to (phase, zeros)
            let back = core(blaschke_from_schur_params(&params, &tol))?;
            let zero_gap = multiset_gap(b.zeros(), back.zeros());
            let phase_gap = (b.phase_factor() - back.phase_factor()).norm();
            let verification = VerificationOut::new(vec![
                ("synthesis-zero-round-trip".into(), zero_gap, tol.eps_roots * 10.0),
                ("synthesis-phase-round-trip".into(), phase_gap, tol.eps_roots * 10.0),
            ]);
            let body = json!({
                "command": "schur-params",
                "order": b.order(),
                "params": params_out(&params),
            });
            Ok(finish(body, verification))
        }
        Command::Synth => {
            let input: ParamsIn = parse_payload(&text)?;
            let params = core(input.build(&tol))?;
            let b = core(blaschke_from_schur_params(&params, &tol))?;
            let again = core(schur_params_of_blaschke(&b, &tol))?;
            let verification = VerificationOut::new(vec![(
                "parameter-round-trip".into(),
                again.max_param_diff(&params),
                tol.eps_roots * 10.0,
            )]);
            let body = json!({
                "command": "synth",
                "blaschke": { "phase": b.phase(), "zeros": vec_from_c(b.zeros()) },
            });
            Ok(finish(body, verification))
        }
        Command::BuildCmv => {
            let input: ParamsIn = parse_payload(&text)?;
            let params = core(input.build(&tol))?;
            let c = core(assemble_cmv(&params, &tol))?;
            let (l, m) = core(lm_factors(&params, &tol))?;
            let dim = c.dim() as f64;
            let verification = VerificationOut::new(vec![
                (
                    "unitarity".into(),
                    c.dense().unitarity_residual(),
                    tol.eps_structural * dim,
                ),
                (
                    "lm-factorization".into(),
                    l.mul(&m).sub(c.dense()).frobenius_norm(),
                    tol.eps_structural * dim,
                ),
            ]);
            let body = json!({
                "command": "build-cmv",
                "dimension": c.dim(),
                "matrix": matrix_to_rows(c.dense()),
            });
            Ok(finish(body, verification))
        }
        Command::Truncate => {
            let input: ParamsIn = parse_payload(&text)?;
            let params = core(input.build(&tol))?;
            let tr = core(TruncatedCmv::from_params(&params, &tol))?;
            let svals = singular_values(tr.dense());
            let contraction = (svals.last().copied().unwrap_or(0.0) - 1.0).max(0.0);
            let defect = core(defect_data(&tr, &tol))?;
            let verification = VerificationOut::new(vec![
                ("contraction".into(), contraction, tol.eps_structural),
                ("rank-one-defects".into(), defect.max_residual, tol.eps_roots),
            ]);
            let body = json!({
                "command": "truncate",
                "dimension": tr.dim(),
                "matrix": matrix_to_rows(tr.dense()),
                "colligation": {
                    "scalar": from_c(tr.colligation_scalar()),
                    "row": vec_from_c(&tr.colligation_row()),
                    "column": vec_from_c(&tr.colligation_column()),
                },
            });
            Ok(finish(body, verification))
        }
        Command::RecoverParams => {
            let input: MatrixIn = parse_payload(&text)?;
            let m = core(input.build())?;
            let params = core(params_from_truncated(&m, &tol))?;
            let rebuilt = core(TruncatedCmv::from_params(&params, &tol))?;
            let verification = VerificationOut::new(vec![(
                "reassembly".into(),
                rebuilt.dense().max_abs_diff(&m),
                tol.eps_roots,
            )]);
            let body = json!({
                "command": "recover-params",
                "params": params_out(&params),
                "unique": m.dim() >= 2,
            });
            Ok(finish(body, verification))
        }
        Command::Spectrum => {
            let input: MatrixOrParamsIn = parse_payload(&text)?;
            let (spec, dim, scale) = match input {
                MatrixOrParamsIn::Matrix(m) => {
                    let m = core(m.build())?;
                    (core(spectrum_of_dense(&m, &tol))?, m.dim(), m.max_abs())
                }
                MatrixOrParamsIn::Params(p) => {
                    let params = core(p.build(&tol))?;
                    let tr = core(TruncatedCmv::from_params(&params, &tol))?;
                    (core(spectrum(&tr, &tol))?, tr.dim(), tr.dense().max_abs())
                }
            };
            let worst_residual = spec
                .eigenvalues
                .iter()
                .map(|(_, r)| *r)
                .fold(0.0_f64, f64::max);
            let residual_budget = 100.0 * dim as f64 * tol.eps_structural * scale.max(1.0);
            let multiplicity_total: usize = spec.clustered.iter().map(|(_, m)| m).sum();
            let verification = VerificationOut::new(vec![
                ("eigen-residuals".into(), worst_residual, residual_budget),
                (
                    "multiplicity-conservation".into(),
                    (multiplicity_total as f64 - dim as f64).abs(),
                    0.0,
                ),
            ]);
            let body = json!({
                "command": "spectrum",
                "all_in_disk": spec.all_in_disk,
                "eigenvalues": spec
                    .eigenvalues
                    .iter()
                    .map(|(v, r)| json!({ "value": from_c(*v), "residual": r }))
                    .collect::<Vec<_>>(),
                "clustered": eigen_multiset_out(&spec.clustered),
            });
            Ok(finish(body, verification))
        }
        Command::Charfun { at, grid, radius } => {
            let input: ParamsIn = parse_payload(&text)?;
            let params = core(input.build(&tol))?;
            let c = core(assemble_cmv(&params, &tol))?;
            let mut points: Vec<Complex64> = Vec::new();
            for spec_str in at {
                points.push(parse_point(spec_str)?);
            }
            if let Some(count) = grid {
                if !(*radius > 0.0 && *radius < 1.0) {
                    return Err(Failure {
                        code: 2,
                        body: error_value("argument", "--radius must lie in (0, 1)"),
                    });
                }
                points.extend(
                    unit_circle_points(*count)
                        .into_iter()
                        .map(|z| z * *radius),
                );
            }
            if points.is_empty() {
                return Err(Failure {
                    code: 2,
                    body: error_value("argument", "charfun needs --at points or --grid"),
                });
            }
            let mut values = Vec::with_capacity(points.len());
            let mut worst_modulus = 0.0_f64;
            for z in &points {
                let v = core(charfun_schur(&c, *z, &tol))?;
                worst_modulus = worst_modulus.max((v.norm() - 1.0).max(0.0));
                values.push(json!({ "at": from_c(*z), "value": from_c(v) }));
            }
            let verification = VerificationOut::new(vec![(
                "schur-modulus-bound".into(),
                worst_modulus,
                tol.eps_roots,
            )]);
            let body = json!({ "command": "charfun", "values": values });
            Ok(finish(body, verification))
        }
        Command::Measure => {
            let input: BlaschkeIn = parse_payload(&text)?;
            let b = core(input.build(&tol))?;
            let mu = core(measure_from_blaschke(&b, &tol))?;
            let sum_gap = (mu.weights().iter().sum::<f64>() - 1.0).abs();
            let mut checks = vec![("weight-sum".into(), sum_gap, tol.eps_structural * 10.0)];
            if mu.len() >= 2 {
                let alphas = core(verblunsky_from_measure(&mu, &tol))?;
                let params = core(schur_params_of_blaschke(&b, &tol))?;
                let gap = alphas
                    .iter()
                    .zip(params.interior())
                    .map(|(a, g)| (a - g).norm())
                    .fold(0.0_f64, f64::max);
                checks.push(("coefficient-round-trip".into(), gap, tol.eps_roots * 100.0));
            }
            let verification = VerificationOut::new(checks);
            let body = json!({
                "command": "measure",
                "support": vec_from_c(mu.support()),
                "weights": mu.weights(),
            });
            Ok(finish(body, verification))
        }
        Command::InvertSpectrum { phase } => {
            let input: EigenListIn = parse_payload(&text)?;
            let zs = input.flat();
            let rec = core(reconstruct_from_spectrum(&zs, *phase, &tol))?;
            let verification = VerificationOut::new(vec![(
                "spectrum-round-trip".into(),
                rec.spectrum_residual,
                tol.eps_roots * 100.0,
            )]);
            let body = json!({
                "command": "invert-spectrum",
                "phase": phase,
                "matrix": matrix_to_rows(rec.matrix.dense()),
                "params": params_out(rec.matrix.params()),
                "warnings": rec.warnings,
            });
            Ok(finish(body, verification))
        }
        Command::MixedFirst => {
            let input: MixedFirstIn = parse_payload(&text)?;
            let data = MixedFirstData {
                eigen: input
                    .eigenvalues
                    .iter()
                    .map(|e| (to_c(e.value), e.multiplicity))
                    .collect(),
                first_params: vec_to_c(&input.first_params),
                n: input.n,
            };
            match core(mixed_first(&data, &tol))? {
                MixedFirstOutcome::Unique(sol) => {
                    let verification = VerificationOut::new(vec![(
                        "prescribed-spectrum".into(),
                        sol.spectrum_residual,
                        tol.eps_roots * 100.0,
                    )]);
                    let body = json!({
                        "command": "mixed-first",
                        "outcome": "unique",
                        "matrix": matrix_to_rows(sol.matrix.dense()),
                        "params": params_out(sol.matrix.params()),
                    });
                    Ok(finish(body, verification))
                }
                MixedFirstOutcome::NoSolution(rep) => Err(Failure {
                    code: 4,
                    body: json!({
                        "command": "mixed-first",
                        "outcome": "no-solution",
                        "report": { "reason": rep.reason },
                    }),
                }),
                MixedFirstOutcome::Family(fam) => {
                    let body = json!({
                        "command": "mixed-first",
                        "outcome": "family",
                        "family": {
                            "zero_prefix": fam.zero_prefix,
                            "known_interior": vec_from_c(&fam.known_interior),
                            "free_interior": fam.free_interior,
                            "free_terminal": fam.free_terminal,
                            "open_condition": fam.open_condition,
                            "note": fam.note,
                        },
                        "verification": { "checks": [], "passed": true },
                    });
                    Ok((body, 0))
                }
            }
        }
        Command::MixedLast => {
            let input: MixedLastIn = parse_payload(&text)?;
            let data = MixedLastData {
                eigen: vec_to_c(&input.eigenvalues),
                last_interior: vec_to_c(&input.last_interior),
                terminal: to_c(input.terminal),
                n: input.n,
            };
            let sol = core(mixed_last(&data, &tol, cli.seed))?;
            let verification = VerificationOut::new(vec![
                (
                    "eigenvalue-containment".into(),
                    sol.eigen_residual,
                    tol.eps_roots * 100.0,
                ),
                (
                    "trailing-parameters".into(),
                    sol.param_residual,
                    tol.eps_roots * 100.0,
                ),
            ]);
            let body = json!({
                "command": "mixed-last",
                "matrix": matrix_to_rows(sol.matrix.dense()),
                "params": params_out(sol.matrix.params()),
            });
            Ok(finish(body, verification))
        }
        Command::Verify => {
            let input: MatrixIn = parse_payload(&text)?;
            let m = core(input.build())?;
            let params = core(params_from_truncated(&m, &tol))?;
            let rebuilt = core(TruncatedCmv::from_params(&params, &tol))?;
            let reassembly = rebuilt.dense().max_abs_diff(&m);
            let svals = singular_values(&m);
            let contraction = (svals.last().copied().unwrap_or(0.0) - 1.0).max(0.0);
            let defect = core(defect_data(&rebuilt, &tol))?;
            let parent = core(assemble_cmv(&params, &tol))?;
            let spec = core(spectrum_of_dense(&m, &tol))?;
            let disk_excess = spec
                .eigenvalues
                .iter()
                .map(|(v, _)| (v.norm() - 1.0).max(0.0))
                .fold(0.0_f64, f64::max);
            let verification = VerificationOut::new(vec![
                ("parameter-reassembly".into(), reassembly, tol.eps_roots),
                ("contraction".into(), contraction, tol.eps_structural),
                ("rank-one-defects".into(), defect.max_residual, tol.eps_roots),
                (
                    "parent-unitarity".into(),
                    parent.dense().unitarity_residual(),
                    tol.eps_structural * parent.dim() as f64,
                ),
                ("spectrum-in-disk".into(), disk_excess, tol.eps_roots),
            ]);
            let body = json!({
                "command": "verify",
                "dimension": m.dim(),
                "params": params_out(&params),
            });
            Ok(finish(body, verification))
        }
        Command::BlaschkeSum => {
            let input: SequenceIn = parse_payload(&text)?;
            let rep = core(blaschke_condition(&vec_to_c(&input.sequence)))?;
            let body = json!({
                "command": "blaschke-sum",
                "partial_sum": rep.partial_sum,
                "cumulative": rep.cumulative,
                "note": rep.note,
                "verification": { "checks": [], "passed": true },
            });
            Ok((body, 0))
        }
    }
}

fn parse_point(s: &str) -> Result<Complex64, Failure> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(Failure {
            code: 2,
            body: error_value("argument", &format!("point '{s}' is not 're,im'")),
        });
    }
    let re: f64 = parts[0].trim().parse().map_err(|_| Failure {
        code: 2,
        body: error_value("argument", &format!("cannot parse '{s}'")),
    })?;
    let im: f64 = parts[1].trim().parse().map_err(|_| Failure {
        code: 2,
        body: error_value("argument", &format!("cannot parse '{s}'")),
    })?;
    Ok(Complex64::new(re, im))
}

fn multiset_gap(a: &[Complex64], b: &[Complex64]) -> f64 {
    let mut used = vec![false; b.len()];
    let mut worst = 0.0_f64;
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    for z in a {
        let best = b
            .iter()
            .enumerate()
            .filter(|(i, _)| !used[*i])
            .map(|(i, v)| (i, (v - z).norm()))
            .min_by(|x, y| x.1.partial_cmp(&y.1).unwrap());
        match best {
            Some((i, d)) => {
                used[i] = true;
                worst = worst.max(d);
            }
            None => return f64::INFINITY,
        }
    }
    worst
}
