//! Subcommand implementations.

use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use conestab::cone::laws::{LawSamples, DEFAULT_SCALARS, SCALE_ZERO};
use conestab::lab::{
    run_sweep, write_report, LabError, NoiseSpec, ReportFormat, SweepConfig, LAW_TOL_FACTOR,
};
use conestab::samples::{dyadic_points, line_grid, DEFAULT_POINTS, DEFAULT_RADIUS};
use conestab::stability::{
    validation_pairs, DEFAULT_MAX_ITER, DEFAULT_TOL, DEFAULT_VALIDATION_SIDE,
};
use conestab::topology::{neighborhood_law_suite, uc_ladder, xi_ladder};
use conestab::{
    banach_case_verify, check_cone_axioms, check_order_laws, quad_residual, stabilize,
    verify_quadratic_laws, ApproxQuadraticMap, BanachOptions, Euclidean, ExtendedReal,
    ExtendedReals, FunctionCone, NeighborhoodScale, NonnegExtendedReals, NormedCone,
    StabilityError, StabilizeOptions, StructuredSamples, TopologyError, TwoPoint,
    TwoPointPathology, VectorElement,
};
use thiserror::Error;

use crate::config::{load_config, parse_noise_spec, ConfigError, NumericOptions, RunConfig};
use crate::expr::{parse_with_dimension, Expr, ParseError};

/// Scale factors used by the neighborhood identities.
pub const NEIGHBORHOOD_LAMBDAS: [f64; 5] = [0.25, 0.5, 1.0, 2.0, 4.0];
/// Scales `2⁰ … 2⁻ᵈ` used by the neighborhood suite.
pub const NEIGHBORHOOD_DEPTH: u32 = 10;
/// Keys of the function cone checked by `laws`.
pub const FUNCTION_KEYS: [&str; 3] = ["p", "q", "r"];
/// Default `r` for the normed-space check.
pub const DEFAULT_R: f64 = 1.5;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(#[from] ConfigError),
    #[error("expression: {0}")]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Stability(#[from] StabilityError),
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error(transparent)]
    Lab(#[from] LabError),
    #[error("output: {0}")]
    Io(#[from] io::Error),
}

/// Whether every check of a command passed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
}

impl Outcome {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Pass => 0,
            Outcome::Fail => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "conestab",
    version,
    about = "Cone law suites and stabilization of approximately quadratic maps"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check cone axioms, order laws and neighborhood identities
    Laws(LawsArgs),
    /// Stabilize a single map given as an expression in x1..xd
    Stabilize(StabilizeArgs),
    /// Run the perturbation sweep and write a report
    Sweep(SweepArgs),
    /// Verify the normed-space estimates for an expression
    Banach(BanachArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConeKind {
    ExtendedReal,
    NonnegExtendedReal,
    Vector,
    Function,
    TwoPointPathology,
    All,
}

#[derive(Debug, Args)]
pub struct LawsArgs {
    #[arg(long, value_enum)]
    pub cone: Option<ConeKind>,
    /// Only check this vector dimension (default: 1 through 4)
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct NumericArgs {
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long = "max-iter")]
    pub max_iter: Option<u32>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub radius: Option<f64>,
    /// Sample count when the dimension exceeds 1
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Debug, Args)]
pub struct StabilizeArgs {
    #[arg(long)]
    pub expr: Option<String>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[command(flatten)]
    pub numeric: NumericArgs,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BanachArgs {
    #[arg(long)]
    pub expr: Option<String>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub r: Option<f64>,
    #[command(flatten)]
    pub numeric: NumericArgs,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_delimiter = ',')]
    pub epsilon: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub dims: Option<Vec<usize>>,
    #[arg(long, visible_alias = "seed", value_delimiter = ',')]
    pub seeds: Option<Vec<u64>>,
    /// Noise kinds, optionally as kind@fraction of the ε/6 budget
    #[arg(long, value_delimiter = ',', value_parser = parse_noise_spec)]
    pub noise: Option<Vec<NoiseSpec>>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long = "max-iter")]
    pub max_iter: Option<u32>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long)]
    pub pairs: Option<usize>,
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_parser = parse_format)]
    pub format: Option<ReportFormat>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

fn parse_format(s: &str) -> Result<ReportFormat, String> {
    s.parse().map_err(|e: LabError| e.to_string())
}

fn config(path: &Option<PathBuf>) -> Result<RunConfig, CliError> {
    match path {
        Some(p) => Ok(load_config(p)?),
        None => Ok(RunConfig::default()),
    }
}

fn positive(name: &str, value: f64) -> Result<f64, CliError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(CliError::Usage(format!(
            "--{name} must be positive, got {value}"
        )))
    }
}

fn missing(name: &str) -> CliError {
    CliError::Usage(format!("--{name} is required (flag or config file)"))
}

pub fn execute(cli: Cli, out: &mut dyn Write) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Laws(args) => laws(args, out),
        Command::Stabilize(args) => stabilize_cmd(args, out),
        Command::Sweep(args) => sweep(args, out),
        Command::Banach(args) => banach(args, out),
    }
}

// ---------------------------------------------------------------- laws

fn laws(args: LawsArgs, out: &mut dyn Write) -> Result<Outcome, CliError> {
    let file = config(&args.config)?.laws;
    let cone = match (args.cone, &file) {
        (Some(c), _) => c,
        (None, Some(f)) => ConeKind::from_str(&f.cone, true)
            .map_err(|_| CliError::Usage(format!("unknown cone `{}`", f.cone)))?,
        (None, None) => ConeKind::All,
    };
    let dim = args.dim.or(file.as_ref().and_then(|f| f.dim));
    let seed = args
        .seed
        .or(file.as_ref().and_then(|f| f.seed))
        .unwrap_or(1);
    if dim == Some(0) {
        return Err(CliError::Usage("--dim must be positive".into()));
    }

    let mut ok = true;
    let all = cone == ConeKind::All;
    if all || cone == ConeKind::ExtendedReal {
        ok &= law_suites(&ExtendedReals, seed, xi_ladder(NEIGHBORHOOD_DEPTH), out)?;
    }
    if all || cone == ConeKind::NonnegExtendedReal {
        ok &= law_suites(
            &NonnegExtendedReals,
            seed,
            xi_ladder(NEIGHBORHOOD_DEPTH),
            out,
        )?;
    }
    if all || cone == ConeKind::Vector {
        let dims = match dim {
            Some(d) => d..=d,
            None => 1..=4,
        };
        for d in dims {
            let v = Euclidean::new(d).map_err(|e| CliError::Usage(e.to_string()))?;
            let scales = uc_ladder(&v.canonical_unit(), NEIGHBORHOOD_DEPTH);
            ok &= law_suites(&v, seed, scales, out)?;
        }
    }
    if all || cone == ConeKind::Function {
        let f = FunctionCone::new(FUNCTION_KEYS).map_err(|e| CliError::Usage(e.to_string()))?;
        let scales = uc_ladder(&f.canonical_unit(), NEIGHBORHOOD_DEPTH);
        ok &= law_suites(&f, seed, scales, out)?;
    }
    if all || cone == ConeKind::TwoPointPathology {
        let report = check_cone_axioms(
            &TwoPointPathology,
            &[TwoPoint::Zero, TwoPoint::One],
            &DEFAULT_SCALARS,
        );
        write!(out, "{report}")?;
        let failing: Vec<_> = report.failures().map(|e| e.law).collect();
        if !failing.is_empty() {
            writeln!(
                out,
                "two-point pathology: failing axioms {}",
                failing.join(", ")
            )?;
        }
        if all {
            // under `all`, the pathology is expected to break exactly `0a=0`
            let expected = failing == [SCALE_ZERO];
            writeln!(
                out,
                "two-point pathology: expected failure {}",
                if expected {
                    "confirmed"
                } else {
                    "NOT confirmed"
                }
            )?;
            ok &= expected;
        } else {
            ok &= report.passed();
        }
    }
    writeln!(out, "laws: {}", if ok { "PASS" } else { "FAIL" })?;
    Ok(Outcome::from_bool(ok))
}

fn law_suites<C: LawSamples>(
    cone: &C,
    seed: u64,
    scales: Vec<NeighborhoodScale<C::Elem>>,
    out: &mut dyn Write,
) -> Result<bool, CliError> {
    let samples = cone.default_samples(seed);
    let axioms = check_cone_axioms(cone, &samples, &DEFAULT_SCALARS);
    let order = check_order_laws(cone, &samples, &DEFAULT_SCALARS);
    let nbhd = neighborhood_law_suite(cone, &samples, &NEIGHBORHOOD_LAMBDAS, &scales)?;
    write!(out, "{axioms}{order}{nbhd}")?;
    Ok(axioms.passed() && order.passed() && nbhd.passed())
}

// ----------------------------------------------------------- stabilize

struct MapSetup {
    expr: Expr,
    dim: usize,
    epsilon: f64,
    tol: f64,
    max_iter: u32,
    points: Vec<VectorElement>,
    pairs: Vec<(VectorElement, VectorElement)>,
}

fn map_setup(
    expr: Option<String>,
    epsilon: Option<f64>,
    flags: NumericArgs,
    file: NumericOptions,
) -> Result<MapSetup, CliError> {
    let text = expr.ok_or_else(|| missing("expr"))?;
    let epsilon = positive("epsilon", epsilon.ok_or_else(|| missing("epsilon"))?)?;
    let tol = positive("tol", flags.tol.or(file.tol).unwrap_or(DEFAULT_TOL))?;
    let max_iter = flags.max_iter.or(file.max_iter).unwrap_or(DEFAULT_MAX_ITER);
    let seed = flags.seed.or(file.seed).unwrap_or(1);
    let radius = positive(
        "radius",
        flags.radius.or(file.radius).unwrap_or(DEFAULT_RADIUS),
    )?;
    let count = flags.points.or(file.points).unwrap_or(DEFAULT_POINTS);

    let probe = crate::expr::parse_expression(&text)?;
    let dim = flags.dim.or(file.dim).unwrap_or(probe.dimension().max(1));
    if dim == 0 {
        return Err(CliError::Usage("--dim must be positive".into()));
    }
    let expr = parse_with_dimension(&text, dim)?;
    let points = if dim == 1 {
        line_grid(-radius, radius, radius / 16.0)?
    } else {
        dyadic_points(dim, count, radius, seed)?
    };
    let domain = Euclidean::new(dim).map_err(|e| CliError::Usage(e.to_string()))?;
    // on a line the whole grid is cheap, so pairs span the full diameter
    let side = if dim == 1 {
        points.len()
    } else {
        DEFAULT_VALIDATION_SIDE
    };
    let pairs = validation_pairs(&domain, &points, side);
    Ok(MapSetup {
        expr,
        dim,
        epsilon,
        tol,
        max_iter,
        points,
        pairs,
    })
}

/// Wraps an expression as a real-valued map on `ℝᵈ`.
pub fn expression_map(
    expr: Expr,
    dim: usize,
) -> Result<ApproxQuadraticMap<Euclidean, ExtendedReals>, CliError> {
    let domain = Euclidean::new(dim).map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(ApproxQuadraticMap::new(
        domain,
        ExtendedReals,
        move |x: &VectorElement| {
            expr.eval(x.coords())
                .map(ExtendedReal::finite)
                .map_err(|e| conestab::EvalError(e.to_string()))
        },
    ))
}

fn write_rejection(
    out: &mut dyn Write,
    epsilon: f64,
    residual: f64,
    pair: Option<&(VectorElement, VectorElement)>,
) -> io::Result<()> {
    write!(
        out,
        "hypothesis rejected: worst residual {residual} exceeds epsilon={epsilon}"
    )?;
    if let Some((x, y)) = pair {
        write!(out, " at x={:?} y={:?}", x.coords(), y.coords())?;
    }
    writeln!(out)
}

fn stabilize_cmd(args: StabilizeArgs, out: &mut dyn Write) -> Result<Outcome, CliError> {
    let file = config(&args.config)?.stabilize;
    let (fexpr, feps, fopts) = match file {
        Some(s) => (Some(s.expr), Some(s.epsilon), s.options),
        None => (None, None, NumericOptions::default()),
    };
    let setup = map_setup(
        args.expr.or(fexpr),
        args.epsilon.or(feps),
        args.numeric,
        fopts,
    )?;
    writeln!(out, "map: f(x) = {}  (d={})", setup.expr, setup.dim)?;
    let f = expression_map(setup.expr, setup.dim)?;
    let v = NeighborhoodScale::xi(setup.epsilon)?;

    let gate = quad_residual(&f, &setup.pairs, &v)?;
    writeln!(
        out,
        "residual: max={} over {} pairs",
        gate.max_residual, gate.pairs_checked
    )?;
    if !gate.passed {
        write_rejection(
            out,
            setup.epsilon,
            gate.max_residual,
            gate.worst_pair.as_ref(),
        )?;
        return Ok(Outcome::Fail);
    }

    let structured = StructuredSamples {
        points: setup.points,
        pairs: setup.pairs,
    };
    let points = structured.required_points(f.domain())?;
    let opts = StabilizeOptions {
        tol: setup.tol,
        max_iter: setup.max_iter,
        validation_pairs: Some(structured.pairs.clone()),
    };
    let res = stabilize(&f, &points, &v, &opts)?;
    let cert = &res.certificate;
    writeln!(out, "certificate: {cert}")?;
    let gap_ok = res.sandwich_holds && res.max_sandwich_gap <= cert.bound() + setup.tol;
    writeln!(
        out,
        "sandwich: max_gap={} bound={} holds={}",
        res.max_sandwich_gap,
        cert.bound(),
        gap_ok
    )?;
    match res.log_slope() {
        Some(s) => writeln!(
            out,
            "convergence: log-slope={s} over {} steps",
            res.residual_log.len()
        )?,
        None => writeln!(out, "convergence: exact (no slope above the noise floor)")?,
    }
    let laws = verify_quadratic_laws(
        f.domain(),
        f.codomain(),
        &res.q_values,
        &structured,
        LAW_TOL_FACTOR * setup.tol,
    )?;
    write!(out, "{laws}")?;
    let ok = cert.converged && gap_ok && laws.passed();
    writeln!(out, "stabilize: {}", if ok { "PASS" } else { "FAIL" })?;
    Ok(Outcome::from_bool(ok))
}

// -------------------------------------------------------------- banach

fn banach(args: BanachArgs, out: &mut dyn Write) -> Result<Outcome, CliError> {
    let file = config(&args.config)?.banach;
    let (fexpr, feps, fr, fopts) = match file {
        Some(b) => (Some(b.expr), Some(b.epsilon), b.r, b.options),
        None => (None, None, None, NumericOptions::default()),
    };
    let r = args.r.or(fr).unwrap_or(DEFAULT_R);
    if !(r > 1.0 && r.is_finite()) {
        return Err(CliError::Usage(format!("--r must exceed 1, got {r}")));
    }
    let setup = map_setup(
        args.expr.or(fexpr),
        args.epsilon.or(feps),
        args.numeric,
        fopts,
    )?;
    writeln!(out, "map: f(x) = {}  (d={})", setup.expr, setup.dim)?;
    let domain = Euclidean::new(setup.dim).map_err(|e| CliError::Usage(e.to_string()))?;
    let codomain = Euclidean::new(1).map_err(|e| CliError::Usage(e.to_string()))?;
    let expr = setup.expr;
    let f = ApproxQuadraticMap::new(domain, codomain, move |x: &VectorElement| {
        expr.eval(x.coords())
            .map(VectorElement::scalar)
            .map_err(|e| conestab::EvalError(e.to_string()))
    });
    let opts = BanachOptions {
        tol: setup.tol,
        max_iter: setup.max_iter,
        validation_pairs: Some(setup.pairs),
        ..BanachOptions::default()
    };
    let report = match banach_case_verify(&f, setup.epsilon, r, &setup.points, &opts) {
        Err(StabilityError::HypothesisViolated {
            max_residual,
            worst_pair,
        }) => {
            writeln!(
                out,
                "hypothesis rejected: worst residual {max_residual} exceeds epsilon={} at {worst_pair}",
                setup.epsilon
            )?;
            return Ok(Outcome::Fail);
        }
        other => other?,
    };
    writeln!(out, "iterations: {}", report.iterations)?;
    writeln!(
        out,
        "final bound: max |Q - f + f(0)/3| = {} <= epsilon/3 = {}: {}",
        report.final_gauge_max, report.final_bound, report.final_bound_holds
    )?;
    writeln!(
        out,
        "membership (r={}): {}",
        report.r, report.membership_holds
    )?;
    writeln!(
        out,
        "telescoping: {} checks, max excess {:e}: {}",
        report.telescoping_checked, report.telescoping_max_excess, report.telescoping_holds
    )?;
    let ok = report.passed();
    writeln!(out, "banach: {}", if ok { "PASS" } else { "FAIL" })?;
    Ok(Outcome::from_bool(ok))
}

// --------------------------------------------------------------- sweep

fn sweep(args: SweepArgs, out: &mut dyn Write) -> Result<Outcome, CliError> {
    let file = config(&args.config)?.sweep;
    let mut cfg = SweepConfig::default();
    let mut out_path = None;
    let mut format = None;
    if let Some(s) = file {
        cfg.epsilons = s.epsilons;
        cfg.dimensions = s.dims;
        cfg.seeds = s.seeds;
        if let Some(n) = s.noise {
            cfg.noises = n;
        }
        cfg.tol = s.tol.unwrap_or(cfg.tol);
        cfg.max_iter = s.max_iter.unwrap_or(cfg.max_iter);
        cfg.points = s.points.unwrap_or(cfg.points);
        cfg.pairs = s.pairs.unwrap_or(cfg.pairs);
        cfg.radius = s.radius.unwrap_or(cfg.radius);
        out_path = s.out.map(PathBuf::from);
        format = s.format;
    }
    if let Some(e) = args.epsilon {
        cfg.epsilons = e;
    }
    if let Some(d) = args.dims {
        cfg.dimensions = d;
    }
    if let Some(s) = args.seeds {
        cfg.seeds = s;
    }
    if let Some(n) = args.noise {
        cfg.noises = n;
    }
    cfg.tol = args.tol.unwrap_or(cfg.tol);
    cfg.max_iter = args.max_iter.unwrap_or(cfg.max_iter);
    cfg.points = args.points.unwrap_or(cfg.points);
    cfg.pairs = args.pairs.unwrap_or(cfg.pairs);
    cfg.radius = args.radius.unwrap_or(cfg.radius);
    let out_path = args.out.or(out_path);
    let format = args.format.or(format).unwrap_or(ReportFormat::Csv);
    cfg.validate()?;

    let records = run_sweep(&cfg)?;
    let passed = records.iter().filter(|r| r.pass).count();
    for r in records.iter().filter(|r| !r.pass) {
        write!(
            out,
            "FAIL eps={} d={} seed={} noise={} gap={} bound={}",
            r.epsilon, r.dimension, r.seed, r.noise, r.max_gap, r.bound
        )?;
        if let Some(e) = &r.error {
            write!(out, " error: {e}")?;
        }
        writeln!(out)?;
    }
    let worst_slope = records
        .iter()
        .filter_map(|r| r.slope)
        .fold(f64::NEG_INFINITY, f64::max);
    writeln!(
        out,
        "cells: {}  pass: {passed}  fail: {}",
        records.len(),
        records.len() - passed
    )?;
    if worst_slope.is_finite() {
        writeln!(out, "largest log-slope: {worst_slope}")?;
    }
    if let Some(path) = &out_path {
        write_report(&records, path, format)?;
        writeln!(out, "report: {}", path.display())?;
    }
    let ok = passed == records.len();
    writeln!(out, "sweep: {}", if ok { "PASS" } else { "FAIL" })?;
    Ok(Outcome::from_bool(ok))
}
