//! Dispatch of validated jobs to the computing modules and assembly of the
//! result envelope and output artifacts.

use std::path::PathBuf;
use std::sync::Mutex;
use std::time::Instant;

use barrier_spectra_core::asymptotics::{
    default_match_radius, match_with_radius, predict_window, rate_regress, PredictionWindow,
    MAX_UNMATCHED_FRACTION,
};
use barrier_spectra_core::functionals::{
    discrete_coupling, dist_to_band, scan_continuous, scan_discrete_with, ScanRow, SumSpec,
};
use barrier_spectra_core::jacobi::{
    analyze_discrete, default_tolerance, discrete_spectrum, Admissibility, Branch,
    DiscreteAnalysis, DiscreteBarrier, DiscreteEigenpoint, ORACLE_GATE,
};
use barrier_spectra_core::numeric::Rectangle;
use barrier_spectra_core::schrodinger::{
    continuous_spectrum, eigenfunction_matching, full_spectrum, CharRoot, ContinuousBarrier,
    ContinuousEigenpoint, SeedWindow,
};
use barrier_spectra_core::Complex64;

use crate::cache::SpectrumCache;
use crate::config::{validate, Command, Format, Job, RunConfig};
use crate::contour::{emit_region_contour, RegionContour};
use crate::envelope::{
    AsymptoticsReport, Check, Payload, RegionSummary, ResultEnvelope, ScanRecord,
    CSV_SCHEMA_VERSION,
};
use crate::error::CliError;
use crate::output::{number, table, write_atomic};
use crate::plot::{self, Layer, Marker, Panel};

pub const DISCRETE_COLUMNS: [&str; 8] = [
    "branch",
    "z_re",
    "z_im",
    "k_re",
    "k_im",
    "lambda_re",
    "lambda_im",
    "bs_residual",
];
pub const CONTINUOUS_COLUMNS: [&str; 9] = [
    "j",
    "family",
    "mu_re",
    "mu_im",
    "k_re",
    "k_im",
    "lambda_re",
    "lambda_im",
    "residual",
];
pub const SCAN_DISCRETE_COLUMNS: [&str; 5] = ["n", "norm", "raw_sum", "scaled_sum", "eigencount"];
pub const SCAN_CONTINUOUS_COLUMNS: [&str; 5] = ["h", "norm", "raw_sum", "scaled_sum", "eigencount"];
pub const ASYMPTOTICS_COLUMNS: [&str; 7] = [
    "n",
    "j",
    "approx_re",
    "approx_im",
    "matched_re",
    "matched_im",
    "error",
];

/// Largest relative eigenfunction matching defect accepted.
const MATCHING_GATE: f64 = 1e-10;
/// Accepted range of the fitted log-log slope of the asymptotic error.
pub const RATE_SLOPE_RANGE: (f64, f64) = (-1.1, -0.7);
/// Smallest `n` at which the distance lower bound is checked.
pub const DISTANCE_CHECK_MIN_N: u32 = 800;

/// An output file before it is written.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub contents: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub envelope: ResultEnvelope,
    pub artifacts: Vec<Artifact>,
}

struct Computed {
    payload: Payload,
    checks: Vec<Check>,
    csv: Option<String>,
    svg: Option<String>,
}

/// Validates `config` and runs it. Validation problems are returned as
/// errors; computational failures are recorded in the envelope.
pub fn run(config: &RunConfig) -> Result<RunOutput, CliError> {
    let job = validate(config)?;
    let started = Instant::now();
    let outcome = compute(&job);
    let wall_time_seconds = started.elapsed().as_secs_f64();
    let stem = config.command.name();
    let mut artifacts = Vec::new();
    let (result, checks, error) = match outcome {
        Ok(c) => {
            if config.formats.contains(&Format::Csv) {
                if let Some(csv) = c.csv {
                    artifacts.push(Artifact {
                        name: format!("{stem}.csv"),
                        contents: csv,
                    });
                }
            }
            if config.formats.contains(&Format::Svg) {
                if let Some(svg) = c.svg {
                    artifacts.push(Artifact {
                        name: format!("{stem}.svg"),
                        contents: svg,
                    });
                }
            }
            (Some(c.payload), c.checks, None)
        }
        Err(message) => (None, Vec::new(), Some(message)),
    };
    let envelope = ResultEnvelope {
        config_echo: config.clone(),
        tool_version: crate::TOOL_VERSION.to_string(),
        csv_schema_version: CSV_SCHEMA_VERSION,
        wall_time_seconds,
        result,
        certification_summary: checks,
        error,
    };
    if config.formats.contains(&Format::Json) {
        artifacts.push(Artifact {
            name: format!("{stem}.json"),
            contents: serde_json::to_string_pretty(&envelope)?,
        });
    }
    Ok(RunOutput {
        envelope,
        artifacts,
    })
}

/// Writes every artifact atomically into the configured output directory.
pub fn write_outputs(config: &RunConfig, output: &RunOutput) -> Result<Vec<PathBuf>, CliError> {
    let dir = &config.output_dir;
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    output
        .artifacts
        .iter()
        .map(|a| write_atomic(dir, &a.name, a.contents.as_bytes()))
        .collect()
}

/// [`run`] followed by [`write_outputs`].
pub fn execute(config: &RunConfig) -> Result<RunOutput, CliError> {
    let output = run(config)?;
    write_outputs(config, &output)?;
    Ok(output)
}

fn compute(job: &Job) -> Result<Computed, String> {
    match job {
        Job::JacobiSpectrum { n, h, tol } => jacobi_spectrum(*n, *h, *tol),
        Job::SchrodingerSpectrum {
            h,
            window,
            tol,
            full,
        } => schrodinger_spectrum(*h, window, *tol, *full, Command::SchrodingerSpectrum),
        Job::LtScanDiscrete { spec, n_list } => lt_scan_discrete(spec, n_list),
        Job::LtScanContinuous {
            p,
            sigma,
            h_list,
            window,
            tol,
        } => lt_scan_continuous(*p, *sigma, h_list, window, *tol),
        Job::AsymptoticsCheck { n_list, window } => asymptotics_check(n_list, *window),
        Job::Figure1 { n, h, grid } => figure1(*n, *h, *grid),
        Job::Figure2 { h, tol } => {
            schrodinger_spectrum(*h, &SeedWindow::default(), *tol, true, Command::Figure2)
        }
    }
}

fn re_im(z: Complex64) -> (f64, f64) {
    (z.re, z.im)
}

fn discrete_csv(points: &[DiscreteEigenpoint]) -> Result<String, String> {
    let rows: Vec<Vec<String>> = points
        .iter()
        .map(|e| {
            vec![
                e.branch.name().to_string(),
                number(e.z.re),
                number(e.z.im),
                number(e.k.re),
                number(e.k.im),
                number(e.lambda.re),
                number(e.lambda.im),
                number(e.bs_residual),
            ]
        })
        .collect();
    table(&DISCRETE_COLUMNS, &rows).map_err(|e| e.to_string())
}

fn continuous_csv(points: &[ContinuousEigenpoint]) -> Result<String, String> {
    let rows: Vec<Vec<String>> = points
        .iter()
        .map(|e| {
            vec![
                e.j.to_string(),
                serde_json::to_value(e.family)
                    .ok()
                    .and_then(|v| v.as_str().map(str::to_string))
                    .unwrap_or_default(),
                number(e.mu.re),
                number(e.mu.im),
                number(e.k.re),
                number(e.k.im),
                number(e.lambda.re),
                number(e.lambda.im),
                number(e.residual),
            ]
        })
        .collect();
    table(&CONTINUOUS_COLUMNS, &rows).map_err(|e| e.to_string())
}

fn branch_points(points: &[DiscreteEigenpoint], branch: Branch) -> Vec<(f64, f64)> {
    points
        .iter()
        .filter(|e| e.branch == branch)
        .map(|e| re_im(e.lambda))
        .collect()
}

/// The λ-plane with minus-branch eigenvalues as black balls and plus-branch
/// eigenvalues as orange squares.
fn lambda_panel(title: String, points: &[DiscreteEigenpoint], h: f64) -> Panel {
    let panel = Panel::new(title, "Re λ", "Im λ")
        .layer(Layer::Line {
            points: vec![(-2.0, 0.0), (2.0, 0.0)],
            stroke: plot::GREY,
            dashed: false,
        })
        .layer(Layer::Points {
            points: branch_points(points, Branch::Minus),
            marker: Marker::Ball,
            color: plot::BLACK,
            label: "minus branch".into(),
        })
        .layer(Layer::Points {
            points: branch_points(points, Branch::Plus),
            marker: Marker::Square,
            color: plot::ORANGE,
            label: "plus branch".into(),
        });
    panel.ranges((-2.2, 2.2), (-0.05 * h, 1.1 * h))
}

fn discrete_checks(analysis: &DiscreteAnalysis, tol: f64) -> Vec<Check> {
    let op = analysis.operator;
    let (n, h) = (op.n(), op.h());
    let disk = analysis.disk_multiplicity();
    let enclosure_violations = analysis
        .eigenpoints
        .iter()
        .filter(|e| !(e.lambda.re.abs() <= 2.0 && e.lambda.im > 0.0 && e.lambda.im <= h))
        .count();
    let consistency = analysis
        .eigenpoints
        .iter()
        .map(|e| {
            let a = (e.lambda - (e.k + e.k.inv())).norm();
            let b = (e.lambda - (op.beta() + e.z + e.z.inv())).norm();
            a.max(b)
        })
        .fold(0.0, f64::max);
    vec![
        Check::condition(
            "disk root count",
            disk == 2 * n - 2,
            format!("{disk} roots in the open unit disk, expected {}", 2 * n - 2),
        ),
        Check::bound(
            "polynomial backward error",
            analysis.worst_backward_error(),
            tol,
            "largest |p(r)| / sum |c_d||r|^d over both branches",
        ),
        Check::bound(
            "birman-schwinger residual",
            analysis.worst_bs_residual(),
            ORACLE_GATE,
            format!(
                "{} eigenvalues, {:?} determinant route",
                analysis.eigenpoints.len(),
                analysis.oracle
            ),
        ),
        Check::bound(
            "lambda consistency",
            consistency,
            1e-8,
            "max over eigenvalues of |λ − (k + 1/k)| and |λ − (ih + z + 1/z)|",
        ),
        Check::condition(
            "enclosure",
            enclosure_violations == 0,
            format!("{enclosure_violations} eigenvalues outside [−2,2] × (0,h]"),
        ),
        Check::condition(
            "indeterminate roots",
            true,
            format!(
                "{} disk roots with | |k| − 1 | below the admissibility margin",
                analysis.indeterminate().count()
            ),
        ),
    ]
}

fn analyze(n: u32, h: f64, tol: f64) -> Result<DiscreteAnalysis, String> {
    let op = DiscreteBarrier::new(n, h).map_err(|e| e.to_string())?;
    analyze_discrete(&op, tol).map_err(|e| e.to_string())
}

fn jacobi_spectrum(n: u32, h: f64, tol: f64) -> Result<Computed, String> {
    let analysis = analyze(n, h, tol)?;
    let checks = discrete_checks(&analysis, tol);
    let svg = plot::render(&[lambda_panel(
        format!("n = {n}, h = {h}"),
        &analysis.eigenpoints,
        h,
    )]);
    Ok(Computed {
        csv: Some(discrete_csv(&analysis.eigenpoints)?),
        svg: Some(svg),
        checks,
        payload: Payload::Discrete {
            n,
            h,
            tol,
            oracle: analysis.oracle,
            disk_multiplicity: analysis.disk_multiplicity(),
            eigenpoints: analysis.eigenpoints,
            upper_disk_roots: analysis.upper_disk_roots,
            regions: Vec::new(),
        },
    })
}

fn continuous_checks(
    h: f64,
    tol: f64,
    roots: &[CharRoot],
    eigenpoints: &[ContinuousEigenpoint],
    zero_count: u64,
) -> Vec<Check> {
    let worst = roots.iter().map(|r| r.residual).fold(0.0, f64::max);
    let strip_violations = eigenpoints
        .iter()
        .filter(|e| !(e.lambda.im > 0.0 && e.lambda.im <= h))
        .count();
    let matching = eigenpoints
        .iter()
        .map(|e| {
            let defect = eigenfunction_matching(e.mu).unwrap_or(f64::INFINITY);
            let size = (e.k * e.mu.cos()).norm() + (e.mu * e.mu.sin()).norm();
            defect / size
        })
        .fold(0.0, f64::max);
    vec![
        Check::bound(
            "characteristic residual",
            worst,
            tol,
            "largest |μ² + ih cos²μ| / max(|μ|², h|cos μ|²) over distinct roots",
        ),
        Check::condition(
            "argument-principle count",
            zero_count as usize == roots.len(),
            format!(
                "{zero_count} zeros counted, {} distinct roots found",
                roots.len()
            ),
        ),
        Check::condition(
            "strip",
            strip_violations == 0,
            format!("{strip_violations} eigenvalues outside 0 < Im λ ≤ h"),
        ),
        Check::bound(
            "eigenfunction matching",
            matching,
            MATCHING_GATE,
            "relative derivative-matching defect at x = 1",
        ),
    ]
}

fn schrodinger_spectrum(
    h: f64,
    window: &SeedWindow,
    tol: f64,
    full: bool,
    command: Command,
) -> Result<Computed, String> {
    let op = ContinuousBarrier::new(h).map_err(|e| e.to_string())?;
    let (roots, eigenpoints, rectangle, zero_count): (
        Vec<CharRoot>,
        Vec<ContinuousEigenpoint>,
        Rectangle,
        u64,
    ) = if full {
        let s = full_spectrum(&op, tol).map_err(|e| e.to_string())?;
        (s.roots, s.eigenpoints, s.search_rectangle, s.zero_count)
    } else {
        let s = continuous_spectrum(&op, window, tol).map_err(|e| e.to_string())?;
        (s.roots, s.eigenpoints, s.search_rectangle, s.zero_count)
    };
    let checks = continuous_checks(h, tol, &roots, &eigenpoints, zero_count);
    let title = match command {
        Command::Figure2 => format!("eigenvalues for h = {h}"),
        _ => format!("h = {h}, {} roots", if full { "all" } else { "window" }),
    };
    let points: Vec<(f64, f64)> = eigenpoints.iter().map(|e| re_im(e.lambda)).collect();
    let panel = Panel::new(title, "Re λ", "Im λ")
        .layer(Layer::Points {
            points,
            marker: Marker::Ball,
            color: plot::BLACK,
            label: "eigenvalues".into(),
        })
        .fit();
    let top = panel.y_range.1.max(1.02 * h);
    let x_range = panel.x_range;
    let panel = panel.layer(Layer::Line {
        points: vec![(x_range.0, h), (x_range.1, h)],
        stroke: plot::GREY,
        dashed: true,
    });
    let panel = Panel {
        y_range: (panel.y_range.0.min(0.0), top),
        ..panel
    };
    Ok(Computed {
        csv: Some(continuous_csv(&eigenpoints)?),
        svg: Some(plot::render(&[panel])),
        checks,
        payload: Payload::Continuous {
            h,
            tol,
            scope: if full { "full" } else { "window" }.to_string(),
            search_rectangle: [rectangle.lower_left(), rectangle.upper_right()],
            zero_count,
            roots,
            eigenpoints,
        },
    })
}

fn scan_records(rows: Vec<ScanRow>) -> Vec<ScanRecord> {
    let finite = |v: f64| v.is_finite().then_some(v);
    rows.into_iter()
        .map(|r| ScanRecord {
            param: r.param,
            norm: r.norm_p,
            raw_sum: finite(r.raw_sum),
            scaled_sum: finite(r.scaled_sum),
            eigencount: r.eigencount,
            error: r.error,
        })
        .collect()
}

fn scan_outputs(
    records: Vec<ScanRecord>,
    columns: &[&str],
    x_label: &str,
    title: String,
    mut checks: Vec<Check>,
) -> Result<Computed, String> {
    let missing = |v: Option<f64>| v.map_or_else(|| "NaN".to_string(), number);
    let param = |r: &ScanRecord| {
        if columns[0] == "n" {
            (r.param as u64).to_string()
        } else {
            number(r.param)
        }
    };
    let rows: Vec<Vec<String>> = records
        .iter()
        .map(|r| {
            vec![
                param(r),
                number(r.norm),
                missing(r.raw_sum),
                missing(r.scaled_sum),
                r.eigencount.to_string(),
            ]
        })
        .collect();
    for r in &records {
        checks.push(Check::condition(
            format!("{}={} row", columns[0], param(r)),
            r.error.is_none(),
            r.error
                .clone()
                .unwrap_or_else(|| format!("{} eigenvalues", r.eigencount)),
        ));
    }
    let points: Vec<(f64, f64)> = records
        .iter()
        .filter_map(|r| r.scaled_sum.filter(|s| *s > 0.0).map(|s| (r.param, s)))
        .collect();
    let panel = Panel::new(title, x_label, "scaled sum")
        .log_log()
        .layer(Layer::Line {
            points: points.clone(),
            stroke: plot::BLACK,
            dashed: false,
        })
        .layer(Layer::Points {
            points,
            marker: Marker::Ball,
            color: plot::BLACK,
            label: "scaled sum".into(),
        })
        .fit();
    Ok(Computed {
        csv: Some(table(columns, &rows).map_err(|e| e.to_string())?),
        svg: Some(plot::render(&[panel])),
        checks,
        payload: Payload::Scan { rows: records },
    })
}

fn lt_scan_discrete(spec: &SumSpec, n_list: &[u32]) -> Result<Computed, String> {
    let cache = SpectrumCache::from_env();
    let residuals = Mutex::new(Vec::new());
    let provider = |n: u32| -> Result<Vec<Complex64>, String> {
        let h = discrete_coupling(n);
        let tol = default_tolerance(n);
        let compute = || {
            let op = DiscreteBarrier::new(n, h).map_err(|e| e.to_string())?;
            discrete_spectrum(&op, tol).map_err(|e| e.to_string())
        };
        let points = match &cache {
            Some(c) => c.discrete(n, h, tol, compute)?,
            None => compute()?,
        };
        let worst = points.iter().map(|e| e.bs_residual).fold(0.0, f64::max);
        residuals
            .lock()
            .expect("residual log poisoned")
            .push((n, worst));
        Ok(points.into_iter().map(|e| e.lambda).collect())
    };
    let rows = scan_discrete_with(spec, n_list, provider);
    let mut logged = residuals.into_inner().expect("residual log poisoned");
    logged.sort_by_key(|&(n, _)| n);
    let worst = logged.iter().map(|&(_, r)| r).fold(0.0, f64::max);
    let checks = vec![Check::bound(
        "birman-schwinger residual",
        worst,
        ORACLE_GATE,
        format!(
            "worst over the spectra of n = {:?}",
            logged.iter().map(|l| l.0).collect::<Vec<_>>()
        ),
    )];
    scan_outputs(
        scan_records(rows),
        &SCAN_DISCRETE_COLUMNS,
        "n",
        format!("p = {}, {:?}", spec.p(), spec.mode()),
        checks,
    )
}

fn lt_scan_continuous(
    p: f64,
    sigma: f64,
    h_list: &[f64],
    window: &SeedWindow,
    tol: f64,
) -> Result<Computed, String> {
    let rows = scan_continuous(p, sigma, h_list, window, tol);
    scan_outputs(
        scan_records(rows),
        &SCAN_CONTINUOUS_COLUMNS,
        "h",
        format!("p = {p}, σ = {sigma}"),
        Vec::new(),
    )
}

fn asymptotics_check(n_list: &[u32], window: PredictionWindow) -> Result<Computed, String> {
    let mut reports = Vec::new();
    let mut checks = Vec::new();
    let mut csv_rows = Vec::new();
    for &n in n_list {
        let h = discrete_coupling(n);
        let op = DiscreteBarrier::new(n, h).map_err(|e| e.to_string())?;
        let spectrum = discrete_spectrum(&op, default_tolerance(n)).map_err(|e| e.to_string())?;
        let predictions = predict_window(n, window).map_err(|e| e.to_string())?;
        let report = match_with_radius(&predictions, &spectrum, default_match_radius(n));
        let unmatched = report.unmatched().count();
        let half_height = h / 2.0;
        let min_ratio = report
            .matches
            .iter()
            .filter_map(|m| m.matched_lambda)
            .map(|l| dist_to_band(l) / half_height)
            .reduce(f64::min);
        let k_inside = report
            .matches
            .iter()
            .filter_map(|m| m.matched_k)
            .all(|k| k.norm() < 1.0);
        let total = predictions.len().max(1);
        checks.push(Check::bound(
            format!("n={n} unmatched fraction"),
            unmatched as f64 / total as f64,
            MAX_UNMATCHED_FRACTION,
            format!(
                "{unmatched} of {} predictions without an eigenvalue within {:.3e}",
                predictions.len(),
                report.radius
            ),
        ));
        checks.push(Check::condition(
            format!("n={n} matched |k| < 1"),
            k_inside,
            "admissibility of every matched eigenvalue",
        ));
        if n >= DISTANCE_CHECK_MIN_N {
            checks.push(Check::condition(
                format!("n={n} distance to the band"),
                min_ratio.is_some_and(|r| r >= 1.0),
                match min_ratio {
                    Some(r) => format!("smallest dist(λ, [−2,2]) is {r:.3e} × n^(−2/3)/2"),
                    None => "no matched eigenvalues".to_string(),
                },
            ));
        }
        for m in &report.matches {
            let (mr, mi) = m
                .matched_lambda
                .map_or(("".into(), "".into()), |l| (number(l.re), number(l.im)));
            csv_rows.push(vec![
                n.to_string(),
                m.j.to_string(),
                number(m.lambda_approx.re),
                number(m.lambda_approx.im),
                mr,
                mi,
                m.error.map(number).unwrap_or_default(),
            ]);
        }
        reports.push(AsymptoticsReport {
            n,
            radius: report.radius,
            unmatched,
            max_error: report.max_error(),
            min_distance_ratio: min_ratio,
            matches: report.matches,
        });
    }
    let samples: Vec<(f64, f64)> = reports
        .iter()
        .filter_map(|r| r.max_error.map(|e| (f64::from(r.n), e)))
        .collect();
    let slope = rate_regress(&samples).ok();
    checks.push(Check::condition(
        "error rate",
        slope.is_some_and(|s| s > RATE_SLOPE_RANGE.0 && s < RATE_SLOPE_RANGE.1),
        match slope {
            Some(s) => format!(
                "log-log slope {s:.3} of the max error over {} values of n, accepted ({}, {})",
                samples.len(),
                RATE_SLOPE_RANGE.0,
                RATE_SLOPE_RANGE.1
            ),
            None => format!(
                "only {} values of n with matched eigenvalues",
                samples.len()
            ),
        },
    ));
    let panel = Panel::new("max error of the prediction", "n", "max |λ − λ_approx|")
        .log_log()
        .layer(Layer::Line {
            points: samples.iter().map(|&(n, _)| (n, n.ln() / n)).collect(),
            stroke: plot::GREY,
            dashed: true,
        })
        .layer(Layer::Points {
            points: samples.clone(),
            marker: Marker::Ball,
            color: plot::BLACK,
            label: "max error".into(),
        })
        .fit();
    Ok(Computed {
        csv: Some(table(&ASYMPTOTICS_COLUMNS, &csv_rows).map_err(|e| e.to_string())?),
        svg: Some(plot::render(&[panel])),
        checks,
        payload: Payload::Asymptotics { reports, slope },
    })
}

/// Upper half of the unit circle as a polyline.
fn upper_circle() -> Vec<(f64, f64)> {
    (0..=180)
        .map(|a| {
            let t = std::f64::consts::PI * f64::from(a) / 180.0;
            (t.cos(), t.sin())
        })
        .collect()
}

fn region_panel(analysis: &DiscreteAnalysis, region: &RegionContour, branch: Branch) -> Panel {
    let roots: Vec<_> = analysis
        .upper_disk_roots
        .iter()
        .filter(|r| r.branch == branch)
        .collect();
    let pick = |wanted: Admissibility| -> Vec<(f64, f64)> {
        roots
            .iter()
            .filter(|r| r.admissibility == wanted)
            .map(|r| re_im(r.z))
            .collect()
    };
    let (marker, color) = match branch {
        Branch::Minus => (Marker::Ball, plot::BLACK),
        Branch::Plus => (Marker::Square, plot::ORANGE),
    };
    Panel::new(format!("{branch} branch, z-plane"), "Re z", "Im z")
        .layer(Layer::Region {
            polygons: region
                .polylines
                .iter()
                .map(|l| l.iter().map(|&z| re_im(z)).collect())
                .collect(),
            fill: plot::SHADE,
        })
        .layer(Layer::Line {
            points: upper_circle(),
            stroke: plot::GREY,
            dashed: false,
        })
        .layer(Layer::Points {
            points: pick(Admissibility::Inadmissible),
            marker: Marker::Ring,
            color: plot::GREY,
            label: "inadmissible roots".into(),
        })
        .layer(Layer::Points {
            points: pick(Admissibility::Admissible),
            marker,
            color,
            label: "admissible roots".into(),
        })
        .ranges((-1.05, 1.05), (-0.05, 1.05))
}

/// Containment of the upper-disk roots of one branch in its shaded region.
pub fn containment_check(analysis: &DiscreteAnalysis, region: &RegionContour) -> Check {
    let mut inside_ok = 0;
    let mut outside_ok = 0;
    let mut offenders = Vec::new();
    for r in analysis
        .upper_disk_roots
        .iter()
        .filter(|r| r.branch == region.branch)
    {
        let inside = region.contains(r.z);
        match r.admissibility {
            Admissibility::Admissible if inside => inside_ok += 1,
            Admissibility::Inadmissible if !inside => outside_ok += 1,
            Admissibility::Indeterminate => {}
            _ => offenders.push(r.z),
        }
    }
    let circle_outside =
        !region.contains(Complex64::new(1.0, 0.0)) && !region.contains(Complex64::new(-1.0, 0.0));
    Check::condition(
        format!("{} region containment", region.branch),
        offenders.is_empty() && circle_outside,
        format!(
            "{inside_ok} admissible roots inside, {outside_ok} inadmissible outside, misplaced {offenders:?}, z = ±1 outside: {circle_outside}"
        ),
    )
}

fn figure1(n: u32, h: f64, grid: u32) -> Result<Computed, String> {
    let tol = default_tolerance(n);
    let analysis = analyze(n, h, tol)?;
    let mut checks = discrete_checks(&analysis, tol);
    let mut panels = Vec::new();
    let mut regions = Vec::new();
    for branch in Branch::BOTH {
        let region = emit_region_contour(n, branch, grid).map_err(|e| e.to_string())?;
        checks.push(containment_check(&analysis, &region));
        panels.push(region_panel(&analysis, &region, branch));
        regions.push(RegionSummary {
            branch,
            grid,
            polylines: region.polylines.len(),
            inside_nodes: region.inside_nodes,
        });
    }
    panels.push(lambda_panel(
        format!("λ-plane, n = {n}, β = {h}i"),
        &analysis.eigenpoints,
        h,
    ));
    Ok(Computed {
        csv: Some(discrete_csv(&analysis.eigenpoints)?),
        svg: Some(plot::render(&panels)),
        checks,
        payload: Payload::Discrete {
            n,
            h,
            tol,
            oracle: analysis.oracle,
            disk_multiplicity: analysis.disk_multiplicity(),
            eigenpoints: analysis.eigenpoints,
            upper_disk_roots: analysis.upper_disk_roots,
            regions,
        },
    })
}
