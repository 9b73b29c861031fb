//! Pinned reference values. Set `GLASSEY_BLESS=1` to regenerate the data file.

use std::path::PathBuf;

use glassey_core::estimates::{hardy_check, trace_check};
use glassey_core::golden::{find, format_goldens, parse_goldens, Golden};
use glassey_core::grid::RadialGrid;
use glassey_core::norms::{lambda_norms, le_norm};
use glassey_core::picard::smallness_report;
use glassey_core::problem::{ProblemSpec, WeightParams};
use glassey_core::solver::{evolve, make_profile, Assignment, DataProfile, EvolveOptions, InitialData};

const LAMBDA_RMAX: f64 = 12.0;
const LE_RMAX: f64 = 24.0;

fn gaussian(grid: &RadialGrid, eps: f64) -> InitialData {
    make_profile(&DataProfile::gaussian(eps, 1.0, Assignment::ToU0), grid).unwrap()
}

fn compute(name: &str, cells: usize) -> f64 {
    match name {
        "lambda1_gaussian_n3" | "lambda2_gaussian_n3" => {
            let g = RadialGrid::new(LAMBDA_RMAX, cells).unwrap();
            let d = gaussian(&g, 1.0);
            let l = lambda_norms(&d.u0, &d.u1, 3).unwrap();
            if name == "lambda1_gaussian_n3" {
                l.lambda1
            } else {
                l.lambda2
            }
        }
        "trace_ratio_gaussian_n3_s0.5" => {
            let g = RadialGrid::new(LAMBDA_RMAX, cells).unwrap();
            trace_check(&gaussian(&g, 1.0).u0, 3, 0.5).unwrap().ratio
        }
        "hardy_ratio_gaussian_n3_s1" => {
            let g = RadialGrid::new(LAMBDA_RMAX, cells).unwrap();
            hardy_check(&gaussian(&g, 1.0).u0, 3, 1.0).unwrap().ratio
        }
        "le_free_gaussian_n3_T10" => {
            let g = RadialGrid::new(LE_RMAX, cells).unwrap();
            let spec = ProblemSpec::linear(3);
            let opts = EvolveOptions::default().with_sample_interval(0.05);
            let traj = evolve(&spec, &gaussian(&g, 1.0), &g, 10.0, None, true, &opts).unwrap().trajectory;
            le_norm(&traj, &WeightParams::new(0.3, 0.2, 10.0).unwrap(), 3).unwrap().total
        }
        "smallness_gaussian_eps0.1_n3_p2.5" => {
            let g = RadialGrid::new(LAMBDA_RMAX, cells).unwrap();
            let spec = ProblemSpec::new(3, 2.5, 1.0, 0.0).unwrap();
            smallness_report(&spec, &gaussian(&g, 0.1), 0.5, 1.0).unwrap().quantity
        }
        other => panic!("unknown golden {other}"),
    }
}

const SPECS: [(&str, usize, f64); 6] = [
    ("lambda1_gaussian_n3", 8000, 1e-9),
    ("lambda2_gaussian_n3", 8000, 1e-9),
    ("trace_ratio_gaussian_n3_s0.5", 8000, 1e-9),
    ("hardy_ratio_gaussian_n3_s1", 8000, 1e-9),
    ("le_free_gaussian_n3_T10", 2400, 1e-9),
    ("smallness_gaussian_eps0.1_n3_p2.5", 8000, 1e-9),
];

fn path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/goldens.txt")
}

fn load() -> Vec<Golden> {
    if std::env::var_os("GLASSEY_BLESS").is_some() {
        let records: Vec<Golden> = SPECS
            .iter()
            .map(|&(name, resolution, tolerance)| Golden {
                name: name.into(),
                value: compute(name, resolution),
                resolution,
                tolerance,
            })
            .collect();
        std::fs::write(path(), format_goldens(&records)).unwrap();
    }
    parse_goldens(&std::fs::read_to_string(path()).unwrap()).unwrap()
}

#[test]
fn goldens_reproduce() {
    let records = load();
    assert_eq!(records.len(), SPECS.len());
    for g in &records {
        let v = compute(&g.name, g.resolution);
        assert!(g.matches(v), "{}: {v} vs {}", g.name, g.value);
    }
}

#[test]
fn goldens_agree_with_closed_forms() {
    let records = load();
    let pi = std::f64::consts::PI;
    // ‖2r e^{-r²}‖² = 16π ∫ r⁴e^{-2r²} dr = 16π · 3√π / (8 · 2^{5/2})
    let lambda1 = (16.0 * pi * 3.0 * pi.sqrt() / (8.0 * 2f64.powf(2.5))).sqrt();
    assert!((find(&records, "lambda1_gaussian_n3").unwrap().value - lambda1).abs() <= 1e-6);
    let hardy = find(&records, "hardy_ratio_gaussian_n3_s1").unwrap().value;
    assert!((hardy - 2.0 / 3f64.sqrt()).abs() <= 1e-3);
    // √(4π)(1/√2)e^{-1/2} over ‖f‖^{1/2}‖∂ᵣf‖^{1/2}
    let f2 = pi.powf(1.5) / (2.0 * 2f64.sqrt());
    let g2 = 3.0 * pi.powf(1.5) / (2.0 * 2f64.sqrt());
    let trace = (4.0 * pi).sqrt() * (-0.5f64).exp() / 2f64.sqrt() / (f2 * g2).powf(0.25);
    assert!((find(&records, "trace_ratio_gaussian_n3_s0.5").unwrap().value - trace).abs() <= 1e-4);
    let l1 = find(&records, "lambda1_gaussian_n3").unwrap().value;
    let l2 = find(&records, "lambda2_gaussian_n3").unwrap().value;
    let small = 0.1 * (l1.sqrt() * l2.sqrt() + l2);
    assert!((find(&records, "smallness_gaussian_eps0.1_n3_p2.5").unwrap().value - small).abs() <= 1e-9);
}

#[test]
fn le_golden_self_converges() {
    let g = find(&load(), "le_free_gaussian_n3_T10").unwrap().clone();
    let fine = compute(&g.name, 2 * g.resolution);
    assert!(g.value.is_finite() && g.value > 0.0);
    assert!((fine - g.value).abs() <= 0.01 * fine, "{} vs {fine}", g.value);
}
