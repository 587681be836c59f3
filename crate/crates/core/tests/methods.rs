use ptdirichlet_core::hobasis::{shift_inverted_spectrum, spectrum, BasisOptions};
use ptdirichlet_core::semiclassical::energy_mxtp;
use ptdirichlet_core::shooting::{find_eigenvalues, ShootingOptions};
use ptdirichlet_core::sweep::{detect_isolated_points, run_sweep, Grid, Method, SweepRequest};
use ptdirichlet_core::PotentialSpec;

fn shooting(n: f64, levels: u32) -> Vec<f64> {
    let s = PotentialSpec::new(n).unwrap();
    let opts = ShootingOptions::for_levels(n, levels).unwrap();
    find_eigenvalues(&s, &opts).unwrap().converged_energies()
}

#[test]
fn shooting_and_basis_agree_away_from_isolated_points() {
    for n in [2.5, 3.0, 5.5, 6.0, 7.0] {
        let a = shooting(n, 4);
        let s = PotentialSpec::new(n).unwrap();
        let b = spectrum(&s, &BasisOptions::default()).unwrap().energies();
        assert!(a.len() >= 4 && b.len() >= 4, "N={n}: {a:?} {b:?}");
        for (x, y) in a.iter().zip(&b).take(4) {
            assert!((x - y).abs() < 5e-3, "N={n}: {x} vs {y}");
        }
    }
}

fn nearest_real(e: &[ptdirichlet_core::Complex64], target: f64) -> f64 {
    e.iter()
        .filter(|z| z.im.abs() < 1e-6)
        .map(|z| z.re)
        .min_by(|a, b| (a - target).abs().total_cmp(&(b - target).abs()))
        .unwrap()
}

#[test]
fn truncation_error_falls_with_size() {
    let s = PotentialSpec::new(3.0).unwrap();
    let target = shooting(3.0, 5)[4];
    let level = |size: usize| nearest_real(&shift_inverted_spectrum(&s, size, -0.5).unwrap().energies, target);
    let diffs: Vec<f64> = [25, 50, 100, 200].into_iter().map(|n| (level(n) - level(2 * n)).abs()).collect();
    assert!(diffs.windows(2).all(|w| w[1] <= w[0].max(1e-9)), "{diffs:?}");
    assert!(diffs[3] < 1e-8, "{diffs:?}");
}

#[test]
fn decic_top_level() {
    let s = PotentialSpec::new(10.0).unwrap();
    let opts = BasisOptions { size: 800, ..BasisOptions::default() };
    let e = spectrum(&s, &opts).unwrap().energies();
    assert!(e.len() >= 5, "{e:?}");
    assert!((e[4] - 28.9715).abs() < 2e-2, "{e:?}");
}

#[test]
fn wkb_tracks_shooting_for_excited_levels() {
    for n in [3.0, 6.0] {
        let a = shooting(n, 5);
        let rel: Vec<f64> =
            a.iter().enumerate().map(|(k, e)| (energy_mxtp(n, k as u32).unwrap().energy - e).abs() / e).collect();
        assert!(rel.windows(2).all(|w| w[1] < w[0]), "N={n}: {rel:?}");
        assert!(rel[4] < 1e-2, "N={n}: {rel:?}");
    }
}

#[test]
fn closed_form_sweep_finds_both_isolated_points() {
    let mut req = SweepRequest::new(vec![Method::M1], Grid::new(2.0, 12.0, 0.02).unwrap());
    req.levels = 3;
    let t = run_sweep(&req).unwrap();
    let ips = detect_isolated_points(&t, Method::M1).unwrap();
    assert_eq!(ips.len(), 2, "{ips:?}");
    assert!((ips[0] - 4.0).abs() < 1e-9 && (ips[1] - 8.0).abs() < 1e-9);
}
