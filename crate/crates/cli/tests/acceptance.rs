//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use barrier_spectra::config::{Command, RunConfig};
use barrier_spectra::envelope::{Payload, ResultEnvelope, ScanRecord};
use barrier_spectra::run::run;
use barrier_spectra_core::jacobi::{
    analyze_discrete, birman_schwinger_det_for, branch_roots, char_poly, chebyshev_det_form_for,
    default_tolerance, k_from_z, Branch, DiscreteBarrier, ORACLE_GATE,
};
use barrier_spectra_core::numeric::RootSet;
use barrier_spectra_core::schrodinger::{
    continuous_spectrum, full_spectrum, rescale_to_tilde, tilde_norm_pp, ContinuousBarrier,
    SeedWindow,
};
use barrier_spectra_core::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const LADDER: [u32; 4] = [200, 400, 800, 1600];
const CHEBYSHEV_TOL: f64 = 1e-8;
const SYMMETRY_TOL: f64 = 1e-8;
const LIMIT_TOL: f64 = 1e-10;
const DISTANCE_GROWTH_RATIO: f64 = 1.15;
const BOUNDED_BAND: f64 = 2.0;
const EDGE_SUM_BAND: f64 = 3.0;
const RATE_SLOPE: (f64, f64) = (-1.1, -0.7);
const CONTINUOUS_TOL: f64 = 1e-9;
const RESCALE_TOL: f64 = 1e-12;
const INCREMENT_BAND: f64 = 2.0;
const SLOPE_MARGIN: f64 = 0.15;

type Outcome = Result<String, String>;

fn ensure(ok: bool, message: String) -> Outcome {
    if ok {
        Ok(message)
    } else {
        Err(message)
    }
}

fn scratch() -> tempfile::TempDir {
    tempfile::tempdir().expect("temporary directory")
}

fn run_command(config: RunConfig) -> Result<ResultEnvelope, String> {
    run(&config).map(|o| o.envelope).map_err(|e| e.to_string())
}

fn scan_rows(envelope: &ResultEnvelope) -> Result<Vec<ScanRecord>, String> {
    if let Some(e) = &envelope.error {
        return Err(e.clone());
    }
    match &envelope.result {
        Some(Payload::Scan { rows }) => {
            if let Some(r) = rows.iter().find(|r| r.error.is_some()) {
                return Err(format!("row {} failed: {:?}", r.param, r.error));
            }
            Ok(rows.clone())
        }
        other => Err(format!("expected a scan payload, got {other:?}")),
    }
}

fn scaled(rows: &[ScanRecord]) -> Vec<f64> {
    rows.iter()
        .map(|r| r.scaled_sum.unwrap_or(f64::NAN))
        .collect()
}

fn strictly_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] > w[0])
}

fn spread(v: &[f64]) -> f64 {
    let max = v.iter().copied().fold(f64::MIN, f64::max);
    let min = v.iter().copied().fold(f64::MAX, f64::min);
    max / min
}

fn fmt(v: &[f64]) -> String {
    let items: Vec<String> = v.iter().map(|x| format!("{x:.4}")).collect();
    format!("[{}]", items.join(", "))
}

fn disk_root_count() -> Outcome {
    let mut worst = Vec::new();
    for n in [2u32, 3, 5, 10, 39, 100] {
        for h in [0.1, 1.0] {
            let op = DiscreteBarrier::new(n, h).map_err(|e| e.to_string())?;
            let a = analyze_discrete(&op, default_tolerance(n)).map_err(|e| e.to_string())?;
            if a.disk_multiplicity() != 2 * n - 2 {
                worst.push(format!("n={n} h={h}: {}", a.disk_multiplicity()));
            }
        }
    }
    ensure(worst.is_empty(), format!("12 cases, mismatches {worst:?}"))
}

fn oracle_certification() -> Outcome {
    let op = DiscreteBarrier::new(39, 0.1).map_err(|e| e.to_string())?;
    let a = analyze_discrete(&op, default_tolerance(39)).map_err(|e| e.to_string())?;
    let bs = a.worst_bs_residual();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let k = Complex64::from_polar(rng.gen_range(0.05..0.95), rng.gen_range(-PI..PI));
        let dense = birman_schwinger_det_for(39, op.beta(), k).map_err(|e| e.to_string())?;
        let closed = chebyshev_det_form_for(39, op.beta(), k).map_err(|e| e.to_string())?;
        worst = worst.max((dense - closed).norm() / dense.norm());
    }
    ensure(
        bs <= ORACLE_GATE && worst <= CHEBYSHEV_TOL,
        format!(
            "{} eigenvalues, worst BS residual {bs:.2e} (<= {ORACLE_GATE:.0e}), worst Chebyshev relative gap {worst:.2e} (<= {CHEBYSHEV_TOL:.0e})",
            a.eigenpoints.len()
        ),
    )
}

fn partner_gap(target: Complex64, set: &[Complex64]) -> f64 {
    set.iter()
        .map(|w| (w - target).norm())
        .fold(f64::INFINITY, f64::min)
}

fn multiplicity_near(set: &RootSet, t: f64) -> u32 {
    set.roots
        .iter()
        .filter(|r| (r.value - t).norm() <= 1e-4)
        .map(|r| r.multiplicity)
        .sum()
}

fn symmetry_suite() -> Outcome {
    let mut failures = Vec::new();
    let mut worst_pairing = 0.0f64;
    for n in 2u32..=12 {
        for h in [0.1, 1.0] {
            let op = DiscreteBarrier::new(n, h).map_err(|e| e.to_string())?;
            let tol = default_tolerance(n);
            let roots = |b| branch_roots(&op, b, tol).map_err(|e| e.to_string());
            let (minus, plus) = (roots(Branch::Minus)?, roots(Branch::Plus)?);
            let (m, p) = (minus.expanded(), plus.expanded());
            for branch in Branch::BOTH {
                let dense = char_poly(&op, branch).to_dense();
                let d = dense.len();
                let gap = (0..d)
                    .map(|i| (dense[i] - dense[d - 1 - i]).norm())
                    .fold(0.0, f64::max);
                if gap > SYMMETRY_TOL {
                    failures.push(format!("n={n} h={h} {branch}: not palindromic"));
                }
            }
            for set in [&m, &p] {
                for z in set.iter().filter(|z| z.norm() > 0.0) {
                    worst_pairing = worst_pairing.max(partner_gap(z.inv(), set));
                }
            }
            let reflect = |z: &Complex64| -z.conj();
            let pairs: [(&[Complex64], &[Complex64]); 2] = if n % 2 == 1 {
                [(&m, &m), (&p, &p)]
            } else {
                [(&m, &p), (&p, &m)]
            };
            for (from, to) in pairs {
                for z in from {
                    worst_pairing = worst_pairing.max(partner_gap(reflect(z), to));
                }
            }
            let (at_minus_one, other) = if n % 2 == 1 {
                (&minus, &plus)
            } else {
                (&plus, &minus)
            };
            let doubles = multiplicity_near(&minus, 1.0) == 2
                && multiplicity_near(at_minus_one, -1.0) == 2
                && (n % 2 == 0 || multiplicity_near(other, -1.0) == 0);
            if !doubles {
                failures.push(format!("n={n} h={h}: unit-circle double roots"));
            }
        }
    }
    ensure(
        failures.is_empty() && worst_pairing <= SYMMETRY_TOL,
        format!(
            "22 cases, worst pairing gap {worst_pairing:.2e} (<= {SYMMETRY_TOL:.0e}), failures {failures:?}"
        ),
    )
}

fn boundary_inadmissibility() -> Outcome {
    let mut worst = 0.0f64;
    for n in 3u32..=50 {
        let expected = f64::from(n + 1) / f64::from(n - 1);
        let at_minus_one = if n % 2 == 1 {
            Branch::Minus
        } else {
            Branch::Plus
        };
        for (t, branch) in [(1.0, Branch::Minus), (-1.0, at_minus_one)] {
            let k = k_from_z(Complex64::new(t, 0.0), n, branch).map_err(|e| e.to_string())?;
            worst = worst.max((k.norm() - expected).abs());
        }
    }
    ensure(
        worst <= LIMIT_TOL,
        format!("n = 3..50 at z = ±1, worst gap {worst:.2e} (<= {LIMIT_TOL:.0e})"),
    )
}

fn discrete_scan(extra: (&str, f64), p: f64) -> Result<Vec<f64>, String> {
    let dir = scratch();
    let list: Vec<String> = LADDER.iter().map(u32::to_string).collect();
    let config = RunConfig::new(Command::LtScanDiscrete, dir.path())
        .with_param("p", p)
        .with_param(extra.0, extra.1)
        .with_param("n_list", list.join(","));
    let envelope = run_command(config)?;
    Ok(scaled(&scan_rows(&envelope)?))
}

fn distance_sum_contrast() -> Outcome {
    let growing = discrete_scan(("omega", 0.5), 1.0)?;
    let bounded = discrete_scan(("omega", 1.0), 1.0)?;
    let ratios: Vec<f64> = growing.windows(2).map(|w| w[1] / w[0]).collect();
    let min_ratio = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    ensure(
        strictly_increasing(&growing)
            && min_ratio >= DISTANCE_GROWTH_RATIO
            && spread(&bounded) < BOUNDED_BAND,
        format!(
            "omega=1/2 scaled {} ratios {} (>= {DISTANCE_GROWTH_RATIO}); omega=1 scaled {} spread {:.3} (< {BOUNDED_BAND})",
            fmt(&growing),
            fmt(&ratios),
            fmt(&bounded),
            spread(&bounded)
        ),
    )
}

fn weighted_sum_growth() -> Outcome {
    let weighted = discrete_scan(("sigma", 0.5), 1.0)?;
    let edge = discrete_scan(("tau", 0.5), 1.0)?;
    // scaled sums are already divided by ‖b‖₁ since p = 1
    ensure(
        strictly_increasing(&weighted) && spread(&edge) <= EDGE_SUM_BAND,
        format!(
            "sigma=1/2 scaled {}; tau=1/2 normalized {} spread {:.3} (<= {EDGE_SUM_BAND})",
            fmt(&weighted),
            fmt(&edge),
            spread(&edge)
        ),
    )
}

fn asymptotics() -> Outcome {
    let dir = scratch();
    let list: Vec<String> = LADDER.iter().map(u32::to_string).collect();
    let envelope = run_command(
        RunConfig::new(Command::AsymptoticsCheck, dir.path()).with_param("n_list", list.join(",")),
    )?;
    let Some(Payload::Asymptotics { reports, slope }) = &envelope.result else {
        return Err(format!("no asymptotics payload: {:?}", envelope.error));
    };
    let distances: Vec<String> = reports
        .iter()
        .filter(|r| r.n >= 800)
        .map(|r| match r.min_distance_ratio {
            Some(x) => format!("n={}: {x:.2e}", r.n),
            None => format!("n={}: none", r.n),
        })
        .collect();
    let distance_ok = reports
        .iter()
        .filter(|r| r.n >= 800)
        .all(|r| r.min_distance_ratio.is_some_and(|x| x >= 1.0));
    let matched: Vec<String> = reports
        .iter()
        .map(|r| format!("{}/{}", r.matches.len() - r.unmatched, r.matches.len()))
        .collect();
    let slope_ok = slope.is_some_and(|s| s > RATE_SLOPE.0 && s < RATE_SLOPE.1);
    ensure(
        slope_ok && distance_ok,
        format!(
            "slope {slope:?} (in {RATE_SLOPE:?}), matched {matched:?}, min dist/(n^(-2/3)/2) {distances:?} (>= 1)"
        ),
    )
}

fn continuous_certification() -> Outcome {
    let dir = scratch();
    let output =
        run(&RunConfig::new(Command::Figure2, dir.path()).with_param("tol", CONTINUOUS_TOL))
            .map_err(|e| e.to_string())?;
    let envelope = &output.envelope;
    let Some(Payload::Continuous {
        roots,
        eigenpoints,
        zero_count,
        ..
    }) = &envelope.result
    else {
        return Err(format!("no continuous payload: {:?}", envelope.error));
    };
    let worst = roots.iter().map(|r| r.residual).fold(0.0, f64::max);
    let strip = eigenpoints
        .iter()
        .all(|e| e.lambda.im > 0.0 && e.lambda.im <= 2500.0);
    let svg = output
        .artifacts
        .iter()
        .any(|a| a.name == "figure2.svg" && a.contents.contains("<circle"));
    ensure(
        worst <= CONTINUOUS_TOL && strip && *zero_count as usize == roots.len() && svg,
        format!(
            "h=2500: {} roots, worst residual {worst:.2e} (<= {CONTINUOUS_TOL:.0e}), strip {strip}, count {zero_count}, SVG {svg}",
            roots.len()
        ),
    )
}

fn window_bounds() -> Outcome {
    let h = 1e4;
    let op = ContinuousBarrier::new(h).map_err(|e| e.to_string())?;
    let s = continuous_spectrum(&op, &SeedWindow::default(), CONTINUOUS_TOL)
        .map_err(|e| e.to_string())?;
    let low = s
        .eigenpoints
        .iter()
        .filter(|e| e.lambda.im <= h / 2.0)
        .count();
    let high = s
        .eigenpoints
        .iter()
        .filter(|e| e.lambda.norm().sqrt() > 2.0 * PI * f64::from(e.j))
        .count();
    ensure(
        !s.eigenpoints.is_empty() && low == 0 && high == 0,
        format!(
            "h=1e4 window j {:?}: {} eigenvalues, {low} with Im λ <= h/2, {high} with |λ|^(1/2) > 2πj",
            s.j_range,
            s.eigenpoints.len()
        ),
    )
}

fn scaling_identity() -> Outcome {
    let h = 2500.0;
    let op = ContinuousBarrier::new(h).map_err(|e| e.to_string())?;
    let spectrum: Vec<Complex64> = full_spectrum(&op, CONTINUOUS_TOL)
        .map_err(|e| e.to_string())?
        .eigenpoints
        .iter()
        .map(|e| e.lambda)
        .collect();
    let mut worst = 0.0f64;
    for (p, sigma) in [(1.0, 0.5), (2.0, 1.0)] {
        let (lhs, rhs) = rescale_to_tilde(&op, &spectrum, p, sigma).map_err(|e| e.to_string())?;
        worst = worst.max((lhs - rhs).abs() / rhs.abs());
    }
    let mut norm_gap = 0.0f64;
    for p in [1.0, 1.5, 2.0, 3.0] {
        // ∫_{−h}^{h} |i/h|^p dx
        let direct = 2.0 * h * (1.0 / h).powf(p);
        norm_gap = norm_gap.max((tilde_norm_pp(h, p) - direct).abs() / direct);
    }
    ensure(
        worst <= RESCALE_TOL && norm_gap <= 1e-15,
        format!(
            "{} eigenvalues, worst relative gap {worst:.2e} (<= {RESCALE_TOL:.0e}), norm gap {norm_gap:.1e}",
            spectrum.len()
        ),
    )
}

fn continuous_scan(sigma: f64) -> Result<Vec<f64>, String> {
    let dir = scratch();
    let config = RunConfig::new(Command::LtScanContinuous, dir.path())
        .with_param("p", 1)
        .with_param("sigma", sigma)
        .with_param("h_list", "1000,10000,100000");
    Ok(scaled(&scan_rows(&run_command(config)?)?))
}

fn continuous_growth() -> Outcome {
    let half = continuous_scan(0.5)?;
    let one = continuous_scan(1.0)?;
    let steps: Vec<f64> = half.windows(2).map(|w| w[1] - w[0]).collect();
    let increments_ok = steps.iter().all(|&d| d > 0.0)
        && steps.windows(2).all(|w| {
            let r = w[1] / w[0];
            (1.0 / INCREMENT_BAND..=INCREMENT_BAND).contains(&r)
        });
    let alpha = SeedWindow::default().alpha();
    let target = (2.0 * 1.0 - 1.0) * (0.5 - alpha);
    let samples: Vec<(f64, f64)> = [1e3, 1e4, 1e5]
        .into_iter()
        .zip(one.iter().copied())
        .collect();
    let slope = barrier_spectra_core::asymptotics::rate_regress(&samples).ok();
    let slope_ok = slope.is_some_and(|s| (s - target).abs() <= SLOPE_MARGIN);
    ensure(
        strictly_increasing(&half) && increments_ok && slope_ok,
        format!(
            "sigma=1/2 scaled {} increments {}; sigma=1 scaled {} slope {slope:?} (target {target:.3} ± {SLOPE_MARGIN})",
            fmt(&half),
            fmt(&steps),
            fmt(&one)
        ),
    )
}

fn figure_one() -> Outcome {
    let dir = scratch();
    let output = run(&RunConfig::new(Command::Figure1, dir.path())).map_err(|e| e.to_string())?;
    let checks: Vec<_> = output
        .envelope
        .certification_summary
        .iter()
        .filter(|c| c.name.ends_with("region containment"))
        .collect();
    let svg = output
        .artifacts
        .iter()
        .find(|a| a.name == "figure1.svg")
        .map(|a| a.contents.matches("<clipPath").count());
    let details: Vec<&str> = checks.iter().map(|c| c.detail.as_str()).collect();
    ensure(
        checks.len() == 2 && checks.iter().all(|c| c.passed) && svg == Some(3),
        format!("panels {svg:?}; {}", details.join("; ")),
    )
}

struct Criterion {
    number: u32,
    name: &'static str,
    budget: Duration,
    check: fn() -> Outcome,
}

fn main() {
    let criteria = [
        Criterion {
            number: 1,
            name: "disk-root count",
            budget: Duration::from_secs(10),
            check: disk_root_count,
        },
        Criterion {
            number: 2,
            name: "oracle certification",
            budget: Duration::from_secs(10),
            check: oracle_certification,
        },
        Criterion {
            number: 3,
            name: "symmetry suite",
            budget: Duration::from_secs(5),
            check: symmetry_suite,
        },
        Criterion {
            number: 4,
            name: "boundary inadmissibility",
            budget: Duration::from_secs(1),
            check: boundary_inadmissibility,
        },
        Criterion {
            number: 5,
            name: "distance-sum contrast",
            budget: Duration::from_secs(300),
            check: distance_sum_contrast,
        },
        Criterion {
            number: 6,
            name: "weighted-sum growth",
            budget: Duration::from_secs(300),
            check: weighted_sum_growth,
        },
        Criterion {
            number: 7,
            name: "asymptotics",
            budget: Duration::from_secs(300),
            check: asymptotics,
        },
        Criterion {
            number: 8,
            name: "continuous certification",
            budget: Duration::from_secs(30),
            check: continuous_certification,
        },
        Criterion {
            number: 9,
            name: "window eigenvalue bounds",
            budget: Duration::from_secs(60),
            check: window_bounds,
        },
        Criterion {
            number: 10,
            name: "scaling identity",
            budget: Duration::from_secs(1),
            check: scaling_identity,
        },
        Criterion {
            number: 11,
            name: "continuous growth",
            budget: Duration::from_secs(600),
            check: continuous_growth,
        },
        Criterion {
            number: 12,
            name: "figure-1 reproduction",
            budget: Duration::from_secs(10),
            check: figure_one,
        },
    ];
    let mut failed = 0;
    for c in &criteria {
        let started = Instant::now();
        let outcome = (c.check)();
        let elapsed = started.elapsed();
        let in_budget = elapsed <= c.budget;
        let (passed, detail) = match outcome {
            Ok(d) => (in_budget, d),
            Err(d) => (false, d),
        };
        if !passed {
            failed += 1;
        }
        println!(
            "{} criterion {:>2} {}: {detail}; {:.2}s of {}s",
            if passed { "PASS" } else { "FAIL" },
            c.number,
            c.name,
            elapsed.as_secs_f64(),
            c.budget.as_secs()
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
