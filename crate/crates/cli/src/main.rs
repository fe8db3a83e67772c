//! `normvol`: normalized volumes of toric and hypersurface singularities from
//! the command line. Reports go to stdout as JSON; diagnostics go to stderr.
//!
//! Exit codes: 0 success, 1 internal failure or failed reproduction,
//! 2 invalid input, 3 non-convergence or an inconclusive verdict.

mod schema;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use normvol::hypersurface::{Family, WeightedHypersurface};
use normvol::ideals::convergence_report;
use normvol::kstab::{
    build_cone_over_fano, canonical_is_minimizer, filtration_volume_curve, lambda_star, nef_threshold, phi_curve,
    unit_grid, Filtration, Verdict,
};
use normvol::minimizer::{minimize_hypersurface, minimize_toric, MinimizerReport, OptimizerConfig};
use normvol::rational::{parse_rational_list, Rational};
use normvol::reproduce::{reproduce, reproduce_all, REGISTRY};
use normvol::{Error, RationalVector};
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "normvol", version, about = "Normalized volumes of klt singularities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Options,
}

#[derive(Args, Debug)]
struct Options {
    /// JSON input file.
    #[arg(long, global = true, conflicts_with = "json")]
    input: Option<PathBuf>,
    /// Inline JSON input.
    #[arg(long, global = true)]
    json: Option<String>,
    /// Search for the minimizer.
    #[arg(long, global = true)]
    minimize: bool,
    /// Toric valuation, e.g. "1,2/3,1".
    #[arg(long, global = true, allow_hyphen_values = true)]
    xi: Option<String>,
    /// Monomial weight for `hyper`, e.g. "2,2,2,1".
    #[arg(long, global = true)]
    weight: Option<String>,
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    #[arg(long, global = true)]
    restarts: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Size of the worker pool.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Indented output.
    #[arg(long, global = true)]
    pretty: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FamilyName {
    #[value(name = "A_k")]
    Ak,
    E6,
    E7,
    E8,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Toric singularity given by a cone (or a cyclic quotient).
    Toric,
    /// Hypersurface singularity with monomial weights.
    Hyper {
        #[arg(long, value_enum)]
        family: Option<FamilyName>,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        k: Option<u32>,
    },
    /// Monomial ideal invariants, and the valuative ideals of `--xi`.
    Ideal {
        /// With --xi: rows k = 1..=K of the graded family of `xi`.
        #[arg(long, default_value_t = 10)]
        k_max: u32,
    },
    /// K-semistability of a toric Fano via the cone over it.
    Kstab,
    /// Worked examples with golden values; `all` runs the whole registry.
    Reproduce { id: String },
}

enum Failure {
    /// Exit 2.
    Invalid { message: String, pointer: Option<String> },
    /// Exit 1.
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        match e {
            Error::Infeasible | Error::LpUnbounded { .. } => Failure::Internal(e.to_string()),
            _ => Failure::Invalid { message: e.to_string(), pointer: None },
        }
    }
}

/// A report plus whether it signals non-convergence (exit 3) or a failed
/// reproduction (exit 1).
struct Outcome {
    report: Value,
    status: u8,
}

impl Outcome {
    fn ok(report: Value) -> Outcome {
        Outcome { report, status: 0 }
    }
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("reports serialize")
}

fn config(o: &Options) -> Result<OptimizerConfig, Failure> {
    let mut cfg = OptimizerConfig::default();
    if let Some(t) = o.tolerance {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Failure::Invalid { message: format!("tolerance {t} must be positive"), pointer: None });
        }
        cfg.tolerance = t;
    }
    if let Some(r) = o.restarts {
        if r == 0 {
            return Err(Failure::Invalid { message: "restarts must be at least 1".into(), pointer: None });
        }
        cfg.restarts = r;
    }
    if let Some(s) = o.seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn read_input(o: &Options) -> Result<Option<String>, Failure> {
    match (&o.input, &o.json) {
        (Some(p), _) => std::fs::read_to_string(p)
            .map(Some)
            .map_err(|e| Failure::Invalid { message: format!("cannot read {}: {e}", p.display()), pointer: None }),
        (None, Some(s)) => Ok(Some(s.clone())),
        (None, None) => Ok(None),
    }
}

fn require_input(o: &Options) -> Result<String, Failure> {
    read_input(o)?.ok_or_else(|| Failure::Invalid { message: "give --input PATH or --json TEXT".into(), pointer: None })
}

fn parse<T: for<'de> serde::Deserialize<'de>>(text: &str) -> Result<T, Failure> {
    schema::parse(text).map_err(|(pointer, message)| Failure::Invalid { message, pointer: Some(pointer) })
}

fn parse_vector(s: &str, what: &str) -> Result<RationalVector, Failure> {
    parse_rational_list(s)
        .map(RationalVector::new)
        .map_err(|e| Failure::Invalid { message: format!("--{what}: {e}"), pointer: None })
}

/// The exact value when a rational candidate was recovered, else the float.
fn value_string(r: &MinimizerReport) -> String {
    match &r.rational_candidate {
        Some(c) => c.value.to_string(),
        None => r.value.to_string(),
    }
}

fn direction_string(r: &MinimizerReport) -> Option<String> {
    r.rational_candidate.as_ref().map(|c| format!("({})", c.direction.join(",")))
}

fn toric(o: &Options, cfg: &OptimizerConfig) -> Result<Outcome, Failure> {
    let input: schema::ToricInput = parse(&require_input(o)?)?;
    let s = input.build()?;
    let xi = match &o.xi {
        Some(x) => parse_vector(x, "xi")?,
        None => s.default_xi(),
    };
    let mut report = json!({
        "dim": s.dim(),
        "lattice_covolume": s.lattice().covolume().to_string(),
        "generators": to_value(&s.generators()),
        "gorenstein_covector": to_value(s.gorenstein_covector()),
        "xi": to_value(&xi),
        "log_discrepancy": s.log_discrepancy(&xi)?.to_string(),
        "volume": s.volume(&xi)?.to_string(),
        "volume_by_triangulation": s.volume_by_triangulation(&xi)?.to_string(),
        "normalized_volume": s.normalized_volume(&xi)?.to_string(),
    });
    let mut status = 0;
    if o.minimize {
        let m = minimize_toric(&s, cfg)?;
        if !m.converged {
            status = 3;
        }
        report["value"] = json!(value_string(&m));
        report["minimizer_xi"] = json!(direction_string(&m));
        report["minimizer"] = to_value(&m);
    }
    Ok(Outcome { report, status })
}

fn family(name: FamilyName, dim: Option<usize>, k: Option<u32>) -> Result<Family, Failure> {
    let dim = dim.ok_or_else(|| Failure::Invalid { message: "--family needs --dim".into(), pointer: None })?;
    Ok(match name {
        FamilyName::Ak => Family::A {
            dim,
            k: k.ok_or_else(|| Failure::Invalid { message: "--family A_k needs --k".into(), pointer: None })?,
        },
        FamilyName::E6 => Family::E6 { dim },
        FamilyName::E7 => Family::E7 { dim },
        FamilyName::E8 => Family::E8 { dim },
    })
}

fn hyper_eval(h: &WeightedHypersurface, w: &RationalVector) -> Result<Value, Failure> {
    let wf = h.weight_of_f(w)?;
    let active: Vec<&Vec<u32>> = wf.active.iter().map(|&i| &h.terms()[i]).collect();
    Ok(json!({
        "weight": to_value(w),
        "weight_of_f": wf.value.to_string(),
        "active_terms": active,
        "log_discrepancy": h.log_discrepancy(w)?.to_string(),
        "multiplicity": h.multiplicity(w)?.to_string(),
        "normalized_volume": h.normalized_volume(w)?.to_string(),
        "degenerate_initial_form": h.initial_form_is_degenerate(w)?,
        "lct_comparison": to_value(&h.lct_initial_comparison(w)?),
    }))
}

fn hyper(o: &Options, cfg: &OptimizerConfig, fam: Option<FamilyName>, dim: Option<usize>, k: Option<u32>) -> Result<Outcome, Failure> {
    let h = match fam {
        Some(name) => {
            if read_input(o)?.is_some() {
                return Err(Failure::Invalid { message: "give either --family or an input, not both".into(), pointer: None });
            }
            WeightedHypersurface::from_family(family(name, dim, k)?)?
        }
        None => {
            let input: schema::HyperInput = parse(&require_input(o)?)?;
            let (h, warnings) = input.build()?;
            for w in warnings {
                eprintln!("warning: {w}");
            }
            h
        }
    };
    let mut report = json!({
        "ambient_dim": h.ambient_dim(),
        "terms": h.terms(),
        "family": h.family().map(|f| f.to_string()),
        "lct": h.lct().to_string(),
    });
    if let Some(w) = &o.weight {
        report["evaluation"] = hyper_eval(&h, &parse_vector(w, "weight")?)?;
    }
    let mut status = 0;
    if o.minimize {
        let m = minimize_hypersurface(&h, cfg)?;
        if !m.converged {
            status = 3;
        }
        report["value"] = json!(value_string(&m));
        report["weight"] = json!(direction_string(&m));
        report["minimizer"] = to_value(&m);
    }
    Ok(Outcome { report, status })
}

fn ideal(o: &Options, k_max: u32) -> Result<Outcome, Failure> {
    let input: schema::IdealInput = parse(&require_input(o)?)?;
    let ideal = input.build()?;
    let newton = ideal.newton_polyhedron();
    let facets: Vec<Value> = newton
        .facets
        .iter()
        .map(|f| json!({"normal": to_value(&f.normal), "offset": f.offset.to_string()}))
        .collect();
    let primary = ideal.is_primary();
    let opt = |r: Result<Rational, Error>| r.ok().map(|q| q.to_string());
    let mut report = json!({
        "generators": to_value(&ideal.generators()),
        "primary": primary,
        "newton_vertices": to_value(&newton.vertices),
        "newton_facets": facets,
        "multiplicity": opt(ideal.multiplicity()),
        "lct": opt(ideal.lct()),
        "normalized_multiplicity": opt(ideal.normalized_multiplicity()),
    });
    if let Some(x) = &o.xi {
        let xi = parse_vector(x, "xi")?;
        let s = ideal.ambient();
        let rows = convergence_report(s, &xi, k_max)?;
        report["normalized_volume"] = json!(s.normalized_volume(&xi)?.to_string());
        report["all_inequalities_hold"] = json!(rows.iter().all(|r| r.inequality_holds()));
        report["graded_family"] = to_value(&rows);
    }
    Ok(Outcome::ok(report))
}

fn kstab(o: &Options, cfg: &OptimizerConfig) -> Result<Outcome, Failure> {
    let input: schema::KstabInput = parse(&require_input(o)?)?;
    let d = build_cone_over_fano(&input.rays(), &input.r.0)?;
    let rep = canonical_is_minimizer(&d, cfg)?;
    // Probe the curve along the requested valuation, else along the
    // recovered minimizer.
    let xi = match (&o.xi, &rep.minimum.rational_candidate) {
        (Some(x), _) => parse_vector(x, "xi")?,
        (None, Some(c)) => c.arg.clone(),
        (None, None) => d.canonical_xi().clone(),
    };
    let lambda = lambda_star(&d, &xi)?;
    let phi = phi_curve(&d, &xi, &lambda, &unit_grid(8))?;
    let f = Filtration::new(&d, &xi)?;
    let t_grid: Vec<Rational> =
        unit_grid(8).iter().map(|s| &f.c1 + (&f.t_max - &f.c1) * s).collect();
    let filtration = filtration_volume_curve(&d, &xi, &t_grid)?;
    let report = json!({
        "verdict": to_value(&rep.verdict),
        "gap": rep.gap,
        "gap_exact": rep.gap_exact.as_ref().map(|g| g.to_string()),
        "canonical_xi": to_value(d.canonical_xi()),
        "canonical_value": rep.canonical_value.to_string(),
        "canonical_residual": rep.canonical_residual,
        "degree": d.degree().to_string(),
        "cone_rays": to_value(&d.cone().generators()),
        "probe_xi": to_value(&xi),
        "nef_threshold": nef_threshold(&d, &xi)?.to_string(),
        "lambda_star": lambda.to_string(),
        "phi_s_closed_form": phi.derivative_closed_form.to_string(),
        "phi_s_finite_difference": phi.derivative_finite_difference,
        "phi_s_relative_discrepancy": phi.derivative_discrepancy(),
        "phi": to_value(&phi),
        "filtration": to_value(&filtration),
        "minimizer": to_value(&rep.minimum),
    });
    let status = if rep.verdict == Verdict::Inconclusive { 3 } else { 0 };
    Ok(Outcome { report, status })
}

fn run_reproduce(id: &str, cfg: &OptimizerConfig) -> Result<Outcome, Failure> {
    let reports = if id == "all" { reproduce_all(cfg)? } else { vec![reproduce(id, cfg)?] };
    let pass = reports.iter().all(|r| r.pass);
    Ok(Outcome { report: json!({"pass": pass, "examples": to_value(&reports)}), status: if pass { 0 } else { 1 } })
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    if let Some(n) = cli.opts.threads {
        // Ignored if a pool already exists; the flag is only a hint.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let cfg = config(&cli.opts)?;
    match &cli.command {
        Command::Toric => toric(&cli.opts, &cfg),
        Command::Hyper { family, dim, k } => hyper(&cli.opts, &cfg, *family, *dim, *k),
        Command::Ideal { k_max } => ideal(&cli.opts, *k_max),
        Command::Kstab => kstab(&cli.opts, &cfg),
        Command::Reproduce { id } => {
            if id != "all" && !REGISTRY.contains(&id.as_str()) {
                return Err(Failure::Invalid {
                    message: format!("unknown example id '{id}'; known ids: all, {}", REGISTRY.join(", ")),
                    pointer: None,
                });
            }
            run_reproduce(id, &cfg)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(out) => {
            let text = if cli.opts.pretty {
                serde_json::to_string_pretty(&out.report)
            } else {
                serde_json::to_string(&out.report)
            }
            .expect("reports serialize");
            // A closed pipe on the reader's side is not our failure.
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            ExitCode::from(out.status)
        }
        Err(Failure::Invalid { message, pointer }) => {
            eprintln!("{}", json!({"error": "invalid input", "message": message, "pointer": pointer}));
            ExitCode::from(2)
        }
        Err(Failure::Internal(message)) => {
            eprintln!("{}", json!({"error": "internal", "message": message}));
            ExitCode::from(1)
        }
    }
}
