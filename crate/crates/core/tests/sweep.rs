use toric_ising::config::FileConfig;
use toric_ising::lattice::{Boundary, LatticeKind, LatticeSpec};
use toric_ising::sweep::{run_sweep, Grid, Spacing, SweepConfig};
use toric_ising::Error;

fn csv(cfg: &SweepConfig) -> String {
    let mut out = Vec::new();
    run_sweep(cfg).unwrap().write_csv(&mut out).unwrap();
    String::from_utf8(out).unwrap()
}

#[test]
fn chain_sweep_is_dual_everywhere() {
    let cfg = SweepConfig {
        lattice: LatticeSpec::new(LatticeKind::Path, &[9], Boundary::Rough),
        grid: Grid {
            lo: 0.1,
            hi: 10.0,
            n: 21,
            spacing: Spacing::Log,
        },
        ..Default::default()
    };
    let r = run_sweep(&cfg).unwrap();
    assert_eq!(r.rows.len(), 21);
    assert_eq!(r.n_flagged(), 0);
    for row in &r.rows {
        assert!(row.error.is_none());
        assert!(row.duality_deviation < 1e-9, "{row:?}");
        assert!((row.string_op - row.magnetization).abs() < 1e-9);
        assert!(row.gap > 0.0 && row.chi >= 0.0);
    }
    assert!(r.rows.windows(2).all(|w| w[0].h_over_j < w[1].h_over_j));
}

#[test]
fn rough_square_order_parameter_rises() {
    let cfg = SweepConfig {
        grid: Grid {
            lo: 0.2,
            hi: 5.0,
            n: 5,
            spacing: Spacing::Log,
        },
        ..Default::default()
    };
    let r = run_sweep(&cfg).unwrap();
    assert_eq!(r.n_flagged(), 0);
    assert!(r.rows.windows(2).all(|w| w[0].string_op < w[1].string_op));
    assert!(r.rows[0].string_op < 0.5 && r.rows[4].string_op > 0.9);
}

#[test]
fn reruns_are_byte_identical() {
    let mut cfg = SweepConfig {
        lattice: LatticeSpec::new(LatticeKind::SquareOpen, &[2], Boundary::Rough),
        grid: Grid {
            lo: 0.0,
            hi: 3.0,
            n: 7,
            spacing: Spacing::Lin,
        },
        ..Default::default()
    };
    let a = csv(&cfg);
    assert_eq!(a, csv(&cfg));
    cfg.workers = 3;
    assert_eq!(a, csv(&cfg));
    let lines: Vec<&str> = a.lines().collect();
    assert!(lines[0].starts_with("# schema=toric-ising-sweep/1"));
    assert_eq!(lines.len(), 2 + 7);
}

#[test]
fn bad_grids_are_rejected() {
    for grid in [
        Grid {
            lo: 0.0,
            hi: 1.0,
            n: 0,
            spacing: Spacing::Lin,
        },
        Grid {
            lo: 0.0,
            hi: 1.0,
            n: 4,
            spacing: Spacing::Log,
        },
        Grid {
            lo: 2.0,
            hi: 1.0,
            n: 4,
            spacing: Spacing::Lin,
        },
        Grid {
            lo: -1.0,
            hi: 1.0,
            n: 4,
            spacing: Spacing::Lin,
        },
    ] {
        let cfg = SweepConfig {
            grid,
            ..Default::default()
        };
        assert!(matches!(run_sweep(&cfg), Err(Error::Config(_))), "{grid}");
    }
}

#[test]
fn config_file_drives_a_sweep() {
    let text = r#"
[lattice]
kind = "path"
L = 5

[sweep]
grid = "0.5:2:3:lin"

[solver]
seed = 7
"#;
    let cfg = FileConfig::parse(text).unwrap().sweep_config().unwrap();
    assert_eq!(cfg.lattice.boundary, Boundary::Rough);
    assert_eq!(cfg.seed, 7);
    let r = run_sweep(&cfg).unwrap();
    assert_eq!(r.rows.len(), 3);
    assert_eq!(r.n_flagged(), 0);
}
