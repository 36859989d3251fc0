use std::time::Instant;

use conestab::lab::{
    render_report, run_cell, run_sweep, NoiseKind, NoiseSpec, ReportFormat, SweepConfig,
};

fn small() -> SweepConfig {
    SweepConfig {
        epsilons: vec![0.06, 0.6],
        dimensions: vec![1, 2],
        seeds: vec![1, 2],
        noises: vec![
            NoiseSpec::full(NoiseKind::Sine),
            NoiseSpec::full(NoiseKind::SeededHash),
            NoiseSpec::full(NoiseKind::ConstantOffset),
        ],
        points: 64,
        pairs: 96,
        ..SweepConfig::default()
    }
}

#[test]
fn sweep_output_is_byte_identical_across_runs() {
    let a = render_report(&run_sweep(&small()).unwrap(), ReportFormat::Csv).unwrap();
    let b = render_report(&run_sweep(&small()).unwrap(), ReportFormat::Csv).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.lines().count(), 1 + 2 * 2 * 2 * 3);
}

#[test]
fn pass_rows_respect_the_bound() {
    let cfg = small();
    for r in run_sweep(&cfg).unwrap() {
        assert!(r.pass, "{r:?}");
        assert!(r.max_gap <= r.bound + cfg.tol);
        assert_eq!(r.gamma, (r.lambda + 2.0) / 3.0);
    }
}

#[test]
fn more_iterations_never_widen_the_gap() {
    let loose = SweepConfig {
        tol: 1e-4,
        ..small()
    };
    let tight = SweepConfig {
        tol: 1e-10,
        ..small()
    };
    for cell in small().cells() {
        let a = run_cell(&cell, &loose);
        let b = run_cell(&cell, &tight);
        assert!(b.iterations >= a.iterations);
        assert!(b.max_gap <= a.max_gap + loose.tol, "{a:?} {b:?}");
    }
}

#[test]
fn default_sweep_passes_with_geometric_rate() {
    let start = Instant::now();
    let records = run_sweep(&SweepConfig::default()).unwrap();
    let elapsed = start.elapsed();
    assert_eq!(records.len(), 90);
    let target = -4f64.ln() + 0.1;
    for r in &records {
        assert!(r.pass, "{r:?}");
        let slope = r.slope.expect("slope");
        assert!(slope <= target, "{r:?}");
        assert!(r.max_gap <= r.bound + 1e-6);
    }
    eprintln!("default sweep: {elapsed:?}");
}
