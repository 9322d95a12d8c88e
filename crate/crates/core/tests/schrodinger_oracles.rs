use std::f64::consts::PI;

use barrier_spectra_core::functionals::dist_to_halfline;
use barrier_spectra_core::schrodinger::{
    admissible, char_relative_residual, char_residual, continuous_spectrum, eigenfunction_matching,
    full_spectrum, reduced_residual, refine_seed, rescale_to_tilde, seed_mu, tilde_norm_pp,
    window_j_range, ContinuousBarrier, Family, SeedWindow,
};
use barrier_spectra_core::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn wide_window() -> SeedWindow {
    SeedWindow::new(0.15, 0.40, 0.25).unwrap()
}

#[test]
fn admissibility_matches_the_sign_of_re_mu_tan_mu() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut checked = 0;
    while checked < 500 {
        let mu = c(rng.gen_range(-20.0..-1.0), rng.gen_range(0.0..3.0));
        if mu.cos().norm() < 1e-3 {
            continue;
        }
        let tan = mu.sin() / mu.cos();
        let direct = (mu * tan).re;
        if direct.abs() < 1e-9 * (mu * tan).norm() {
            continue;
        }
        assert_eq!(admissible(mu).unwrap(), direct > 0.0, "mu={mu}");
        checked += 1;
    }
}

#[test]
fn residual_examples() {
    assert_eq!(char_residual(c(0.0, 0.0), 2500.0), c(0.0, 2500.0));
    assert!((char_residual(c(PI / 2.0, 0.0), 2500.0) - PI * PI / 4.0).norm() < 1e-9);
    let mu = c(-1.0e4, 0.0);
    assert!((reduced_residual(mu, 1e-6) - mu).norm() <= 1e-3);
}

#[test]
fn seed_formula_structure() {
    let s = seed_mu(1, 4.0);
    assert!((s.re + PI / 4.0).abs() < 1e-15);
    assert!((s.im - (PI / 4.0).ln()).abs() < 1e-15);
    assert!((s.im + 0.2416).abs() < 1e-4);
    for h in [10.0, 2500.0, 1e5] {
        let mut previous = f64::NEG_INFINITY;
        for j in 1..200 {
            let s = seed_mu(j, h);
            assert!((s.re + PI / 4.0 * (8.0 * f64::from(j) - 7.0)).abs() < 1e-9);
            assert!(s.re < 0.0);
            assert!(s.im > previous);
            previous = s.im;
        }
    }
}

#[test]
fn window_range_example() {
    let w = SeedWindow::new(0.1, 0.4, 0.15).unwrap();
    assert_eq!(window_j_range(2500.0, &w), Some((110, 1143)));
    assert!(SeedWindow::new(0.2, 0.2, 0.1).is_err());
    for h in [1.0, 10.0, 1e3, 1e6] {
        let (lo, hi) = window_j_range(h, &w).unwrap();
        assert!(lo <= hi);
    }
}

#[test]
fn reduced_roots_solve_the_full_equation() {
    let h = 2500.0;
    let (lo, hi) = window_j_range(h, &wide_window()).unwrap();
    for j in (lo..=hi).step_by(7) {
        let mu = refine_seed(j, h).unwrap();
        let scale = mu.norm().max(h.sqrt() * mu.cos().norm());
        assert!(reduced_residual(mu, h).norm() <= 1e-10 * scale, "j={j}");
        assert!(char_relative_residual(mu, h) <= 1e-8, "j={j}");
    }
}

#[test]
fn seed_error_shrinks_with_h() {
    let mut errors = Vec::new();
    for h in [1e3, 1e4, 1e5] {
        let (lo, hi) = window_j_range(h, &wide_window()).unwrap();
        let span = hi - lo;
        let worst = (lo + 2 * span / 5..=lo + 3 * span / 5)
            .map(|j| (refine_seed(j, h).unwrap() - seed_mu(j, h)).norm())
            .fold(0.0, f64::max);
        errors.push(worst);
    }
    assert!(errors[0] > errors[1] && errors[1] > errors[2], "{errors:?}");
}

#[test]
fn window_spectrum_at_2500_is_certified() {
    let h = 2500.0;
    let op = ContinuousBarrier::new(h).unwrap();
    let spectrum = continuous_spectrum(&op, &SeedWindow::default(), 1e-9).unwrap();
    assert_eq!(spectrum.zero_count as usize, spectrum.roots.len());
    assert!(!spectrum.eigenpoints.is_empty());
    for r in &spectrum.roots {
        assert!(r.mu.re < -1e-8);
    }
    for e in &spectrum.eigenpoints {
        assert_eq!(e.family, Family::Reduced);
        let scale = e.mu.norm_sqr().max(h * e.mu.cos().norm_sqr());
        assert!(char_residual(e.mu, h).norm() <= 1e-9 * scale);
        assert!(e.lambda.im > 0.0 && e.lambda.im <= h);
        assert!((e.k * e.k - e.lambda).norm() <= 1e-8 * e.lambda.norm());
        assert!(e.k.im > 0.0);
        let defect = eigenfunction_matching(e.mu).unwrap();
        let k = Complex64::i() * e.mu * e.mu.sin() / e.mu.cos();
        let size = (k * e.mu.cos()).norm() + (e.mu * e.mu.sin()).norm();
        assert!(defect <= 1e-12 * size);
    }
}

#[test]
fn window_bounds_at_ten_thousand() {
    let h = 1e4;
    let op = ContinuousBarrier::new(h).unwrap();
    let spectrum = continuous_spectrum(&op, &SeedWindow::default(), 1e-9).unwrap();
    let (lo, hi) = spectrum.j_range;
    assert_eq!(spectrum.eigenpoints.len() as u32, hi - lo + 1);
    for e in &spectrum.eigenpoints {
        assert!(e.lambda.im > h / 2.0, "j={}", e.j);
        assert!(
            e.lambda.norm().sqrt() <= 2.0 * PI * f64::from(e.j),
            "j={}",
            e.j
        );
    }
}

#[test]
fn full_spectrum_at_2500_is_counted() {
    let op = ContinuousBarrier::new(2500.0).unwrap();
    let full = full_spectrum(&op, 1e-9).unwrap();
    assert_eq!(full.zero_count as usize, full.roots.len());
    for r in &full.roots {
        assert!(r.mu.re < -1e-8 && r.mu.im > 0.0);
    }
    for e in &full.eigenpoints {
        assert!(e.lambda.im > 0.0 && e.lambda.im <= 2500.0);
    }
    let window = continuous_spectrum(&op, &SeedWindow::default(), 1e-9).unwrap();
    for e in &window.eigenpoints {
        assert!(full
            .eigenpoints
            .iter()
            .any(|f| (f.mu - e.mu).norm() <= 1e-6));
    }
}

#[test]
fn rescaling_identity_on_the_2500_spectrum() {
    let h = 2500.0;
    let op = ContinuousBarrier::new(h).unwrap();
    let lambdas: Vec<Complex64> = full_spectrum(&op, 1e-9)
        .unwrap()
        .eigenpoints
        .iter()
        .map(|e| e.lambda)
        .collect();
    for (p, sigma) in [(1.0, 0.5), (2.0, 1.0)] {
        let (lhs, rhs) = rescale_to_tilde(&op, &lambdas, p, sigma).unwrap();
        assert!(
            (lhs - rhs).abs() <= 1e-12 * rhs.abs(),
            "p={p} sigma={sigma}"
        );
        let direct: f64 = lambdas
            .iter()
            .map(|l| {
                let t = l / (h * h);
                assert!((dist_to_halfline(t) - t.im).abs() <= 1e-15 * t.norm());
                t.im.powf(p) / t.norm().powf(sigma)
            })
            .sum::<f64>()
            / (2.0 * h.powf(1.0 - p));
        assert!((direct - lhs).abs() <= 1e-12 * lhs);
    }
    assert_eq!(tilde_norm_pp(h, 1.0), 2.0);
    assert_eq!(tilde_norm_pp(4.0, 2.0), 0.5);
}

proptest! {
    #[test]
    fn eigenfunction_defect_is_rounding(re in -40.0f64..40.0, im in -3.0f64..3.0) {
        let mu = c(re, im);
        prop_assume!(mu.cos().norm() > 0.1);
        let k = Complex64::i() * mu * mu.sin() / mu.cos();
        let size = (k * mu.cos()).norm() + (mu * mu.sin()).norm();
        prop_assert!(eigenfunction_matching(mu).unwrap() <= 1e-12 * size);
    }

    #[test]
    fn rescaling_is_exact_for_any_spectrum(
        seed in any::<u64>(),
        h in 1.0f64..1e5,
        p in 1.0f64..3.0,
        sigma in 0.5f64..2.0,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lambdas: Vec<Complex64> = (0..20)
            .map(|_| c(rng.gen_range(0.0..h * h), rng.gen_range(1e-3..h)))
            .collect();
        let op = ContinuousBarrier::new(h).unwrap();
        let (lhs, rhs) = rescale_to_tilde(&op, &lambdas, p, sigma).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs());
    }
}
