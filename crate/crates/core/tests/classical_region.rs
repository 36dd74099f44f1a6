//! Shape of the corner-point curves of the classical two-sender region.
//! `lambda` is the weight on path 1.

use spmac_core::capacity::MacOptions;
use spmac_core::info::{classical_region_sweep, ClassicalSweep};

fn sweep() -> ClassicalSweep {
    let lams: Vec<f64> = (0..=200).map(|i| i as f64 / 200.0).collect();
    classical_region_sweep(&lams, &MacOptions { tol: 1e-12, ..MacOptions::default() }, 51).unwrap()
}

/// Chord slopes `dR2/dR1` between neighbouring grid points, tagged with the midpoint lambda.
fn slopes(s: &ClassicalSweep, corner: impl Fn(usize) -> (f64, f64)) -> Vec<(f64, f64)> {
    (0..s.rows.len() - 1)
        .filter_map(|i| {
            let (a, b) = (corner(i), corner(i + 1));
            let dx = b.0 - a.0;
            // degenerate stretches near the ends barely move
            (dx.abs() > 1e-6).then(|| (0.5 * (s.rows[i].lambda + s.rows[i + 1].lambda), (b.1 - a.1) / dx))
        })
        .collect()
}

#[test]
fn corner_curves_steep_below_half_and_shallow_above() {
    let s = sweep();
    let star = slopes(&s, |i| s.rows[i].region.star());
    let dstar = slopes(&s, |i| s.rows[i].region.dstar());
    for (lam, k) in &dstar {
        if *lam < 0.5 {
            assert!(*k < -1.0, "R** slope {k} at lambda {lam}");
        }
    }
    for (lam, k) in &star {
        if *lam > 0.5 {
            assert!(*k > -1.0, "R* slope {k} at lambda {lam}");
        }
    }
    // and the same holds for the other corner, so both curves cross slope -1 at lambda = 1/2
    assert!(star.iter().filter(|(l, _)| *l < 0.5).all(|(_, k)| *k < -1.0));
    assert!(dstar.iter().filter(|(l, _)| *l > 0.5).all(|(_, k)| *k > -1.0));
}

#[test]
fn reversed_lambda_reading_needs_weight_on_path_two() {
    // "R** steeper than -1 for lambda >= 1/2" fails when lambda weights path 1 ...
    let s = sweep();
    let dstar = slopes(&s, |i| s.rows[i].region.dstar());
    assert!(dstar.iter().filter(|(l, _)| *l > 0.5).all(|(_, k)| *k > -1.0));
    // ... and holds once lambda is read as the path-2 weight
    let path2: Vec<(f64, f64)> = dstar.iter().map(|(l, k)| (1.0 - l, *k)).collect();
    assert!(path2.iter().filter(|(l, _)| *l > 0.5).all(|(_, k)| *k < -1.0));
}

#[test]
fn corner_curves_mirror_under_lambda_swap() {
    let s = sweep();
    let n = s.rows.len();
    for i in 0..n {
        let a = s.rows[i].region.star();
        let b = s.rows[n - 1 - i].region.dstar();
        assert!((a.0 - b.1).abs() < 1e-9 && (a.1 - b.0).abs() < 1e-9);
    }
}

#[test]
fn boundary_stays_under_one_bit() {
    let s = sweep();
    assert!(s.boundary.iter().all(|(r1, r2)| r1 + r2 <= 1.0 + 1e-9));
    // the end points of the rate-sum-one segment are reached
    assert!(s.boundary.iter().any(|(r1, r2)| r1.abs() < 1e-9 && (r2 - 1.0).abs() < 1e-6));
}
