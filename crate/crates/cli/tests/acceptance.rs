//! The ten acceptance criteria. Each prints one `PASS`/`FAIL` line; run with
//! `cargo test -p conestab-cli --test acceptance -- --nocapture` to see them.

use std::collections::BTreeMap;
use std::panic::{self, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use conestab::lab::{build_perturbed, make_quadratic, run_sweep, NoiseModel, SweepConfig};
use conestab::samples::{line_grid, structured_samples};
use conestab::stability::validation_pairs;
use conestab::topology::{neighborhood_law_suite, xi_ladder, DEFAULT_GAUGE_TOL};
use conestab::{
    banach_case_verify, gauge, quad_residual, stabilize, uniqueness_crosscheck, ApproxQuadraticMap,
    BanachOptions, Cone, Euclidean, ExtendedReal, ExtendedReals, NeighborhoodScale,
    StabilizeOptions, VectorElement,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const LAWS_BUDGET: Duration = Duration::from_secs(5);
const SWEEP_BUDGET: Duration = Duration::from_secs(60);
const GAUGE_TOL: f64 = 1e-9;
const FIXED_POINT_GAP: f64 = 1e-10;
const CLOSED_FORM_TOL: f64 = 1e-9;
const SWEEP_GAP_SLACK: f64 = 1e-6;
const SLOPE_SLACK: f64 = 0.1;
const UNIQUENESS_TOL: f64 = 2e-9;
const TELESCOPING_SLACK: f64 = 1e-12;
const RESIDUAL_TOL: f64 = 1e-9;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: impl Into<String>) -> Outcome {
    if ok {
        Ok(detail.into())
    } else {
        Err(detail.into())
    }
}

fn xi(e: f64) -> NeighborhoodScale<ExtendedReal> {
    NeighborhoodScale::xi(e).unwrap()
}

fn offset_square() -> ApproxQuadraticMap<Euclidean, ExtendedReals> {
    ApproxQuadraticMap::from_fn(
        Euclidean::new(1).unwrap(),
        ExtendedReals,
        |x: &VectorElement| ExtendedReal::finite(x.coords()[0].powi(2) + 1.0),
    )
}

fn criterion_1() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_conestab");
    let start = Instant::now();
    let mut failures = Vec::new();
    for cone in [
        "extended-real",
        "nonneg-extended-real",
        "vector",
        "function",
    ] {
        let out = Command::new(bin)
            .args(["laws", "--cone", cone])
            .output()
            .unwrap();
        if out.status.code() != Some(0) {
            failures.push(cone.to_string());
        }
    }
    let out = Command::new(bin)
        .args(["laws", "--cone", "two-point-pathology"])
        .output()
        .unwrap();
    let elapsed = start.elapsed();
    let text = String::from_utf8_lossy(&out.stdout);
    let failing: Vec<&str> = text
        .lines()
        .filter(|l| l.starts_with("[two-point-pathology] FAIL"))
        .filter_map(|l| l.split_whitespace().nth(2))
        .collect();
    check(
        failures.is_empty()
            && out.status.code() == Some(1)
            && failing == ["0a=0"]
            && elapsed < LAWS_BUDGET,
        format!("failing cones {failures:?}, pathology fails {failing:?}, {elapsed:.2?}"),
    )
}

fn criterion_2() -> Outcome {
    let c = ExtendedReals;
    let (one, two) = (ExtendedReal::finite(1.0), ExtendedReal::finite(2.0));
    let lhs = c.add(&one, &ExtendedReal::INFINITY).unwrap();
    let rhs = c.add(&two, &ExtendedReal::INFINITY).unwrap();
    check(
        one != two && lhs == rhs,
        format!("1+∞ = {lhs:?}, 2+∞ = {rhs:?}"),
    )
}

fn criterion_3() -> Outcome {
    let samples: Vec<ExtendedReal> = [-4.0, -1.5, -0.25, 0.0, 0.5, 1.0, 2.0, 3.5, 8.0]
        .into_iter()
        .map(ExtendedReal::finite)
        .chain([ExtendedReal::INFINITY])
        .collect();
    let report = neighborhood_law_suite(
        &ExtendedReals,
        &samples,
        &[0.25, 0.5, 1.0, 2.0, 4.0],
        &xi_ladder(10),
    )
    .unwrap();
    let violations: Vec<_> = report.failures().map(|e| e.law).collect();
    let checked: usize = report.entries.iter().map(|e| e.checked).sum();
    check(
        violations.is_empty() && report.entries.iter().all(|e| e.checked > 0),
        format!(
            "{} laws, {checked} cases, violations {violations:?}",
            report.entries.len()
        ),
    )
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    for i in 0..1000 {
        let d = 1 + i % 4;
        let cone = Euclidean::new(d).unwrap();
        let coords: Vec<f64> = (0..d).map(|_| rng.gen_range(-100.0..100.0)).collect();
        let oracle = coords.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let a = VectorElement::new(coords).unwrap();
        let g = gauge(&cone, &a, &VectorElement::splat(d, 1.0), DEFAULT_GAUGE_TOL)
            .unwrap()
            .value;
        worst = worst.max((g - oracle).abs());
    }
    let inf = gauge(
        &ExtendedReals,
        &ExtendedReal::INFINITY,
        &ExtendedReal::finite(1.0),
        DEFAULT_GAUGE_TOL,
    )
    .unwrap()
    .value;
    check(
        worst <= GAUGE_TOL && inf == f64::INFINITY,
        format!("max |gauge - max-norm| = {worst:e} over 1000 points, gauge(+∞) = {inf}"),
    )
}

fn criterion_5() -> Outcome {
    let mut worst_gap = 0.0f64;
    let mut bad = Vec::new();
    for seed in 0..20u64 {
        let d = 1 + (seed % 4) as usize;
        let q = make_quadratic(d, seed).unwrap();
        let s = structured_samples(d, 64, 64, 4.0, seed).unwrap();
        let f = build_perturbed(&q, NoiseModel::none(), 1.0, &s.pairs).unwrap();
        let opts = StabilizeOptions {
            validation_pairs: Some(s.pairs.clone()),
            ..StabilizeOptions::default()
        };
        let res = stabilize(&f, &s.points, &xi(1.0), &opts).unwrap();
        worst_gap = worst_gap.max(res.max_sandwich_gap);
        let c = &res.certificate;
        if !(c.lambda == 0.0 && c.gamma == 2.0 / 3.0 && res.max_sandwich_gap <= FIXED_POINT_GAP) {
            bad.push(seed);
        }
    }
    check(
        bad.is_empty(),
        format!("20 forms, max gap {worst_gap:e}, failing seeds {bad:?}"),
    )
}

fn criterion_6() -> Outcome {
    let f = offset_square();
    let pts = line_grid(-4.0, 4.0, 0.25).unwrap();
    let pairs = validation_pairs(f.domain(), &pts, pts.len());
    let opts = StabilizeOptions {
        validation_pairs: Some(pairs.clone()),
        ..StabilizeOptions::default()
    };
    let res = stabilize(&f, &pts, &xi(2.0), &opts).unwrap();
    let c = &res.certificate;
    let q_err = res
        .q_values
        .iter()
        .map(|(x, q)| (q.to_f64() - x.coords()[0].powi(2)).abs())
        .fold(0.0, f64::max);
    let banach = banach_case_verify(
        &ApproxQuadraticMap::from_fn(
            Euclidean::new(1).unwrap(),
            Euclidean::new(1).unwrap(),
            |x: &VectorElement| VectorElement::scalar(x.coords()[0].powi(2) + 1.0),
        ),
        2.0,
        1.5,
        &pts,
        &BanachOptions {
            validation_pairs: Some(pairs),
            ..BanachOptions::default()
        },
    )
    .unwrap();
    let ok = (c.lambda - 0.5).abs() <= CLOSED_FORM_TOL
        && c.gamma == 5.0 / 6.0
        && q_err <= CLOSED_FORM_TOL
        && (res.max_sandwich_gap - 1.0).abs() <= CLOSED_FORM_TOL
        && res.max_sandwich_gap <= c.bound()
        && res.sandwich_holds
        && (banach.final_gauge_max - 2.0 / 3.0).abs() <= CLOSED_FORM_TOL
        && banach.final_gauge_max <= 2.0 / 3.0 + CLOSED_FORM_TOL;
    check(
        ok,
        format!(
            "lambda={} gamma={} |Q-x²|≤{q_err:e} gap={} ≤ {} banach={}",
            c.lambda,
            c.gamma,
            res.max_sandwich_gap,
            c.bound(),
            banach.final_gauge_max
        ),
    )
}

fn criterion_7() -> Outcome {
    let cfg = SweepConfig::default();
    let start = Instant::now();
    let records = run_sweep(&cfg).unwrap();
    let elapsed = start.elapsed();
    let target = -4f64.ln() + SLOPE_SLACK;
    let mut worst_slope = f64::NEG_INFINITY;
    let mut problems = Vec::new();
    let mut verdicts: BTreeMap<(usize, u64, String), Vec<bool>> = BTreeMap::new();
    for r in &records {
        match r.slope {
            Some(s) => worst_slope = worst_slope.max(s),
            None => problems.push(format!("no slope for {r:?}")),
        }
        if r.slope.is_some_and(|s| s > target)
            || !(r.max_gap <= r.gamma * r.epsilon + SWEEP_GAP_SLACK)
        {
            problems.push(format!("{r:?}"));
        }
        verdicts
            .entry((r.dimension, r.seed, r.noise.clone()))
            .or_default()
            .push(r.pass);
    }
    let invariant = verdicts
        .values()
        .all(|v| v.len() == cfg.epsilons.len() && v.iter().all(|p| *p == v[0]));
    let passes = records.iter().filter(|r| r.pass).count();
    check(
        problems.is_empty() && invariant && records.len() == 90 && elapsed < SWEEP_BUDGET,
        format!(
            "{} cells ({passes} pass), largest slope {worst_slope:.4} ≤ {target:.4}, verdicts invariant: {invariant}, {elapsed:.2?}{}",
            records.len(),
            problems.first().map(|p| format!(", first problem: {p}")).unwrap_or_default()
        ),
    )
}

fn criterion_8() -> Outcome {
    let cfg = SweepConfig::default();
    let mut worst = 0.0f64;
    let mut bad = Vec::new();
    for cell in cfg.cells() {
        let setup = cell.setup(&cfg).unwrap();
        let opts = StabilizeOptions {
            tol: cfg.tol,
            max_iter: cfg.max_iter,
            validation_pairs: Some(setup.samples.pairs.clone()),
        };
        let report = uniqueness_crosscheck(&setup.map, &setup.scale, &setup.points, &opts).unwrap();
        worst = worst.max(report.max_disagreement);
        if !(report.max_disagreement <= UNIQUENESS_TOL) {
            bad.push(format!("{cell:?}"));
        }
    }
    check(
        bad.is_empty(),
        format!("max base-2 vs base-4 disagreement {worst:e} ≤ {UNIQUENESS_TOL:e}, failing cells {bad:?}"),
    )
}

fn criterion_9() -> Outcome {
    let f = ApproxQuadraticMap::from_fn(
        Euclidean::new(1).unwrap(),
        Euclidean::new(1).unwrap(),
        |x: &VectorElement| VectorElement::scalar(x.coords()[0].powi(2) + 1.0),
    );
    let pts = line_grid(-4.0, 4.0, 0.25).unwrap();
    let opts = BanachOptions {
        telescoping_depth: 8,
        telescoping_tol: TELESCOPING_SLACK,
        validation_pairs: Some(validation_pairs(f.domain(), &pts, pts.len())),
        ..BanachOptions::default()
    };
    let report = banach_case_verify(&f, 2.0, 1.5, &pts, &opts).unwrap();
    check(
        report.telescoping_holds
            && report.telescoping_max_excess <= TELESCOPING_SLACK
            && report.telescoping_checked == 45 * pts.len(),
        format!(
            "{} (m, n) checks, max excess over the bound {:e}",
            report.telescoping_checked, report.telescoping_max_excess
        ),
    )
}

fn criterion_10() -> Outcome {
    let f = ApproxQuadraticMap::from_fn(
        Euclidean::new(1).unwrap(),
        ExtendedReals,
        |x: &VectorElement| {
            let t = x.coords()[0];
            ExtendedReal::finite(t * t + t)
        },
    );
    let pts = line_grid(-5.0, 5.0, 0.25).unwrap();
    let pairs = validation_pairs(f.domain(), &pts, pts.len());
    let reach = pairs
        .iter()
        .map(|(x, y)| (x.coords()[0] - y.coords()[0]).abs())
        .fold(0.0, f64::max);
    let r = quad_residual(&f, &pairs, &xi(1.0)).unwrap();
    let (x, y) = r.worst_pair.clone().unwrap();
    let analytic = (x.coords()[0] - y.coords()[0]).abs();
    check(
        !r.passed
            && reach == 10.0
            && (r.max_residual - analytic).abs() <= RESIDUAL_TOL
            && analytic == reach,
        format!(
            "rejected: {}, worst residual {} at ({}, {}), analytic |x-y| = {analytic}",
            !r.passed,
            r.max_residual,
            x.coords()[0],
            y.coords()[0]
        ),
    )
}

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 10] = [
        ("axiom gate", criterion_1),
        ("cancellation counterexample", criterion_2),
        ("neighborhood laws", criterion_3),
        ("gauge correctness", criterion_4),
        ("fixed point", criterion_5),
        ("closed-form case", criterion_6),
        ("convergence rate", criterion_7),
        ("uniqueness shadow", criterion_8),
        ("telescoping bound", criterion_9),
        ("hypothesis rejection", criterion_10),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let n = i + 1;
        let outcome = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("PASS criterion {n} ({name}): {detail}"),
            Err(detail) => {
                println!("FAIL criterion {n} ({name}): {detail}");
                failed.push(n);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
