//! Acceptance criteria. Each `criterion_N_*` test corresponds to one
//! criterion and prints a one-line summary (visible with `--nocapture`);
//! the harness prints the pass/fail line.

mod common;

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use proptest::test_runner::{Config, TestRunner};
use spectator::numeric::{
    fock_darwin, integrate_trajectory, radial_spectrum, secular_frequency, NumericScenario,
    RadialGrid, SecularOptions, TrajectoryState,
};
use spectator::pipeline::{run_scenario, Options};
use spectator::report::Report;
use spectator::scenario::Scenario;
use spectator::symcore::{parse, poisson_bracket};

fn fixture(name: &str) -> Report {
    let sc = Scenario::builtin(name).expect("built-in fixture");
    run_scenario(&sc, &Options::symbolic_only()).expect("pipeline runs")
}

/// Exact canonical equality of a reported quantity with `text`.
fn check(report: &Report, key: &str, text: &str) {
    let got = report
        .expr(key)
        .unwrap_or_else(|| panic!("report has no quantity `{key}`"));
    let want = parse(text, got.table()).unwrap();
    assert!(
        got.expand_aliases() == want.expand_aliases(),
        "{key}: computed {got} expected {text}"
    );
}

fn text(report: &Report, key: &str) -> String {
    report
        .quantity(key)
        .unwrap_or_else(|| panic!("no quantity `{key}`"))
        .text()
}

fn summary(n: u32, what: &str, elapsed: Duration) {
    println!(
        "criterion {n}: PASS  {what} ({:.2} s)",
        elapsed.as_secs_f64()
    );
}

#[test]
fn criterion_1_with_flux_line_end_to_end() {
    let start = Instant::now();
    let r = fixture("combined-trap-with-flux");
    let elapsed = start.elapsed();
    check(
        &r,
        "primary.0",
        "p1 + 1/2*mu*omega_c*x2 + mu*omega_0*a^2*x2/(2*(x1^2 + x2^2))",
    );
    check(
        &r,
        "primary.1",
        "p2 - 1/2*mu*omega_c*x1 - mu*omega_0*a^2*x1/(2*(x1^2 + x2^2))",
    );
    check(&r, "constraint_matrix.0.0", "0");
    check(&r, "constraint_matrix.0.1", "mu*omega_c");
    check(&r, "constraint_matrix.1.0", "-mu*omega_c");
    check(&r, "constraint_matrix.1.1", "0");
    assert_eq!(text(&r, "secondary.count"), "0");
    check(&r, "inverse.0.1", "-1/(mu*omega_c)");
    // The stated inverse gives {x1,x2}_D = (C^-1)_12 = -1/(mu*omega_c); the
    // claimed sign is checked on its own below.
    check(&r, "dirac.x1.x2", "-1/(mu*omega_c)");
    assert_eq!(text(&r, "dirac.strong"), "true");
    check(&r, "oscillator.mass", "mu*omega_c^2/omega_P^2");
    check(&r, "oscillator.frequency", "omega_P^2/omega_c");
    check(&r,
        "reduced_h",
        "P^2/(2*(mu*omega_c^2/omega_P^2)) + 1/2*(mu*omega_c^2/omega_P^2)*(omega_P^2/omega_c)^2*X^2 + hbar*omega_c/2",
    );
    check(
        &r,
        "angular_momentum.eliminated",
        "q*Phi0/(2*pi*c) + 1/2*mu*omega_c*(x1^2 + x2^2)",
    );
    check(
        &r,
        "angular_momentum.zero_point",
        "hbar/2 + q*Phi0/(2*pi*c)",
    );
    check(&r, "angular_momentum.induced", "q*Phi0/(2*pi*c)");
    assert!(r
        .goldens
        .iter()
        .filter(|g| !g.quantity.starts_with("numeric."))
        .all(|g| g.passed));
    assert!(elapsed < Duration::from_secs(5), "took {elapsed:?}");
    summary(
        1,
        "constraints, matrix, reduced oscillator and zero-point angular momentum exact",
        elapsed,
    );
}

#[test]
#[ignore = "the claimed {x1,x2}_D = +1/(mu*omega_c) contradicts the claimed inverse matrix -eps/(mu*omega_c); the engine derives -1/(mu*omega_c)"]
fn criterion_1_claimed_coordinate_bracket_sign() {
    let r = fixture("combined-trap-with-flux");
    check(&r, "dirac.x1.x2", "1/(mu*omega_c)");
}

#[test]
fn criterion_2_without_uniform_field() {
    let start = Instant::now();
    let r = fixture("spectator-off");
    let elapsed = start.elapsed();
    for k in ["0.0", "0.1", "1.0", "1.1"] {
        check(&r, &format!("constraint_matrix.{k}"), "0");
    }
    assert_eq!(text(&r, "secondary.count"), "2");
    check(&r, "secondary.0", "-mu*omega_P^2*x1");
    check(&r, "secondary.1", "-mu*omega_P^2*x2");
    assert_eq!(text(&r, "outcome"), "quantization_blocked");
    // Computed secondary/primary brackets sit next to the recorded claim.
    let flagged: Vec<_> = r
        .diagnostics
        .iter()
        .filter(|d| d.quantity.starts_with("full_matrix"))
        .collect();
    assert!(!flagged.is_empty());
    for d in &flagged {
        assert_eq!(d.claimed, "0");
        assert_eq!(d.computed.as_deref(), Some("-mu*omega_P^2"));
        assert!(!d.agrees);
    }
    check(&r, "full_matrix.2.0", "-mu*omega_P^2");
    check(&r, "full_matrix.3.1", "-mu*omega_P^2");
    assert!(
        r.goldens_passed(),
        "a flagged claim does not fail the goldens"
    );
    summary(
        2,
        &format!(
            "zero matrix, secondaries, blocked outcome, {} flagged claims",
            flagged.len()
        ),
        elapsed,
    );
}

#[test]
fn criterion_3_without_flux() {
    let start = Instant::now();
    let r = fixture("flux-off");
    let with_flux = fixture("combined-trap-with-flux");
    let elapsed = start.elapsed();
    check(&r, "primary.0", "p1 + mu*omega_c*x2/2");
    check(&r, "primary.1", "p2 - mu*omega_c*x1/2");
    for k in ["0.0", "0.1", "1.0", "1.1"] {
        let key = format!("constraint_matrix.{k}");
        assert_eq!(text(&r, &key), text(&with_flux, &key), "{key}");
    }
    for n in 0..4 {
        check(
            &r,
            &format!("landau.{n}"),
            &format!("hbar*omega_c*({n} + 1/2)"),
        );
    }
    check(&r, "angular_momentum.zero_point", "hbar/2");
    assert!(r.expr("angular_momentum.induced").unwrap().is_zero());
    summary(
        3,
        "constraints, matrix equal to the flux case, Landau levels, zero-point hbar/2",
        elapsed,
    );
}

#[test]
fn criterion_4_gauge_transformation() {
    let start = Instant::now();
    let r = fixture("combined-trap-with-flux");
    let elapsed = start.elapsed();
    assert_eq!(text(&r, "gauge.curl_free"), "true");
    assert!(r.expr("gauge.potential.0").unwrap().is_zero());
    assert!(r.expr("gauge.potential.1").unwrap().is_zero());
    check(&r,
        "gauge.hamiltonian",
        "(p1 + mu*omega_c*x2/2)^2/(2*mu) + (p2 - mu*omega_c*x1/2)^2/(2*mu) + mu*omega_P^2*(x1^2 + x2^2)/2",
    );
    check(&r, "gauge.primary.0", "p1 + mu*omega_c*x2/2");
    check(&r, "gauge.primary.1", "p2 - mu*omega_c*x1/2");
    check(&r, "gauge.j", "x1*p2 - x2*p1 + q*Phi0/(2*pi*c)");
    check(
        &r,
        "gauge.j_reduced",
        "q*Phi0/(2*pi*c) + 1/2*mu*omega_c*(x1^2 + x2^2)",
    );
    assert_eq!(
        r.expr("gauge.j_reduced").unwrap().expand_aliases(),
        r.expr("angular_momentum.eliminated")
            .unwrap()
            .expand_aliases()
    );
    summary(
        4,
        "potential gauged away, flux-free Hamiltonian, J' equals J",
        elapsed,
    );
}

fn bracket_suite(cases: u32) -> Result<(), String> {
    use common::*;
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    let (t, ps) = trap_table();
    TestRunner::new(config.clone())
        .run(&(rational_terms(), rational_terms()), |(f, g)| {
            let (f, g) = (build_rational(&t, &f), build_rational(&t, &g));
            proptest::prop_assert_eq!(poisson_bracket(&f, &g, &ps), -poisson_bracket(&g, &f, &ps));
            Ok(())
        })
        .map_err(|e| format!("antisymmetry: {e}"))?;
    TestRunner::new(config.clone())
        .run(
            &(poly_terms(), rational_terms(), poly_terms()),
            |(f, g, h)| {
                let (f, g, h) = (
                    build_poly(&t, &f),
                    build_rational(&t, &g),
                    build_poly(&t, &h),
                );
                let lhs = poisson_bracket(&f, &(&g * &h), &ps);
                let rhs = poisson_bracket(&f, &g, &ps) * &h + &g * poisson_bracket(&f, &h, &ps);
                proptest::prop_assert_eq!(lhs, rhs);
                Ok(())
            },
        )
        .map_err(|e| format!("Leibniz: {e}"))?;
    TestRunner::new(config)
        .run(&(poly_terms(), poly_terms(), poly_terms()), |(f, g, h)| {
            let (f, g, h) = (build_poly(&t, &f), build_poly(&t, &g), build_poly(&t, &h));
            let pb = |a: &_, b: &_| poisson_bracket(a, b, &ps);
            let sum = pb(&f, &pb(&g, &h)) + pb(&g, &pb(&h, &f)) + pb(&h, &pb(&f, &g));
            proptest::prop_assert!(sum.is_zero());
            Ok(())
        })
        .map_err(|e| format!("Jacobi: {e}"))
}

#[test]
fn criterion_5_mechanical_momenta() {
    let start = Instant::now();
    let full = fixture("combined-trap-with-flux");
    check(&full, "kinetic.bracket", "mu*omega_c");
    check(&full, "kinetic.bracket_without_flux", "mu*omega_c");
    check(
        &full,
        "kinetic.K.0",
        "p1 + mu*omega_c*x2/2 + mu*omega_0*a^2*x2/(2*(x1^2 + x2^2))",
    );
    let no_flux = fixture("flux-off");
    check(&no_flux, "kinetic.bracket", "mu*omega_c");
    check(&no_flux, "kinetic.K.0", "p1 + mu*omega_c*x2/2");
    let no_field = fixture("spectator-off");
    check(&no_field, "kinetic.bracket", "0");
    bracket_suite(200).unwrap();
    summary(
        5,
        "{K1,K2} = mu*omega_c with and without flux, 0 without field; 3 x 200 random bracket cases",
        start.elapsed(),
    );
}

/// Dense oracle on the staggered grid, `u = sqrt(r) psi`.
fn dense_levels(s: &NumericScenario, m: i64, r_max: f64, n: usize, k: usize) -> Vec<f64> {
    let h = r_max / n as f64;
    let nu = m as f64 + s.alpha;
    let wb2 = s.omega_p * s.omega_p + 0.25 * s.omega_c * s.omega_c;
    let mut a = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        let r = (i as f64 + 0.5) * h;
        a[(i, i)] = 1.0 / (h * h)
            + (nu * nu - 0.25) / (2.0 * r * r)
            + 0.5 * s.omega_c * nu
            + 0.5 * wb2 * r * r;
        if i == 0 {
            a[(i, i)] += 0.5 / (h * h);
        }
        if i + 1 < n {
            a[(i, i + 1)] = -0.5 / (h * h);
            a[(i + 1, i)] = -0.5 / (h * h);
        }
    }
    let mut ev: Vec<f64> = a.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev.truncate(k);
    ev
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn criterion_6_flux_shift_and_closed_form() {
    let start = Instant::now();
    let s = NumericScenario {
        alpha: 0.0,
        omega_c: 1.0,
        omega_p: 0.5,
    };
    // Closed form checked against the dense oracle first.
    let r_max = 12.0 * s.length();
    let (c, f) = (
        dense_levels(&s, 2, r_max, 600, 3),
        dense_levels(&s, 2, r_max, 1200, 3),
    );
    for (k, exact) in fock_darwin(&s, 2, 3).into_iter().enumerate() {
        let o = (4.0 * f[k] - c[k]) / 3.0;
        assert!(rel(o, exact) < 1e-6, "oracle {o} vs closed form {exact}");
    }

    let grid = RadialGrid::auto(&s, 2000);
    let mut worst_fd = 0.0f64;
    for m in -2..=2 {
        let sp = radial_spectrum(&s, m, &grid, 3, 1e-5).unwrap();
        for (e, exact) in sp.levels.iter().zip(fock_darwin(&s, m, 3)) {
            worst_fd = worst_fd.max(rel(*e, exact));
        }
    }
    assert!(worst_fd < 1e-6, "Fock-Darwin deviation {worst_fd:e}");

    let a = NumericScenario { alpha: 0.25, ..s };
    let b = NumericScenario { alpha: 1.25, ..s };
    let grid = RadialGrid::auto(&a, 2000);
    let la = radial_spectrum(&a, 1, &grid, 3, 1e-5).unwrap().levels;
    let lb = radial_spectrum(&b, 0, &grid, 3, 1e-5).unwrap().levels;
    let worst_shift = la
        .iter()
        .zip(&lb)
        .map(|(x, y)| rel(*x, *y))
        .fold(0.0, f64::max);
    assert!(worst_shift < 1e-8, "flux shift deviation {worst_shift:e}");
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    summary(
        6,
        &format!("flux shift {worst_shift:.1e}, Fock-Darwin {worst_fd:.1e} on 2000 points"),
        elapsed,
    );
}

/// Floquet oracle: monodromy of `x'' = kappa cos(drive t) x` over one drive
/// period with velocity Verlet, secular frequency from its trace.
fn floquet_frequency(kappa: f64, drive: f64, steps: usize) -> f64 {
    let period = 2.0 * PI / drive;
    let h = period / steps as f64;
    let mut cols = [[1.0f64, 0.0], [0.0, 1.0]];
    for col in cols.iter_mut() {
        let (mut x, mut v) = (col[0], col[1]);
        for i in 0..steps {
            let t = i as f64 * h;
            v += 0.5 * h * kappa * (drive * t).cos() * x;
            x += h * v;
            v += 0.5 * h * kappa * (drive * (t + h)).cos() * x;
        }
        *col = [x, v];
    }
    let trace = cols[0][0] + cols[1][1];
    (0.5 * trace).acos() / period
}

#[test]
fn criterion_7_secular_frequency() {
    let start = Instant::now();
    let v = 1.0 / 2f64.sqrt();
    let kappa = v / 2.0;
    let mut errors = Vec::new();
    for ratio in [20.0, 50.0, 100.0] {
        let eff = 1.0 / (4.0 * ratio);
        let r = secular_frequency(
            v,
            1.0,
            ratio,
            1.0,
            1.0,
            400.0 * 2.0 * PI / eff,
            SecularOptions::default(),
        )
        .unwrap();
        assert!((r.omega - 1.0).abs() < 1e-12);
        let oracle = floquet_frequency(kappa, ratio, 40_000);
        assert!(
            rel(r.frequency, oracle) < 1e-4,
            "ratio {ratio}: {} vs oracle {oracle}",
            r.frequency
        );
        let e = rel(r.frequency, r.effective);
        println!(
            "ratio {ratio}: extracted {:.9e}, oracle {oracle:.9e}, effective {:.9e}, rel {e:.2e}",
            r.frequency, r.effective
        );
        errors.push(e);
    }
    assert!(errors[1] < 0.02, "ratio 50 error {}", errors[1]);
    assert!(errors[0] > errors[1] && errors[1] > errors[2], "{errors:?}");
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(120), "took {elapsed:?}");
    summary(
        7,
        &format!("ratio 50 within {:.1e}, monotone over 20/50/100", errors[1]),
        elapsed,
    );
}

#[test]
fn criterion_8_trajectory_conservation() {
    let start = Instant::now();
    let full = NumericScenario {
        alpha: 0.25,
        omega_c: 1.0,
        omega_p: 0.5,
    };
    let init = TrajectoryState {
        x1: 1.0,
        x2: 0.0,
        v1: 0.0,
        v2: 0.5,
        time: 0.0,
    };
    let dt = 0.01;
    let periods = 1000.0;
    let steps = (periods * 2.0 * PI / full.omega_c / dt).round() as usize;
    let tr = integrate_trajectory(&full, init, dt, steps, 1000).unwrap();
    assert!(tr.energy_drift < 1e-6, "energy drift {:e}", tr.energy_drift);
    assert!(
        tr.angular_momentum_drift < 1e-6,
        "J drift {:e}",
        tr.angular_momentum_drift
    );

    let magnetic = NumericScenario {
        omega_p: 0.0,
        ..full
    };
    let mag_periods = 100.0;
    let steps = (mag_periods * 2.0 * PI / dt).round() as usize;
    let init = TrajectoryState { v2: -1.0, ..init };
    let mt = integrate_trajectory(&magnetic, init, dt, steps, 100).unwrap();
    let speed = |s: &TrajectoryState| (s.v1 * s.v1 + s.v2 * s.v2).sqrt();
    let v0 = speed(&mt.states[0]);
    let worst = mt
        .states
        .iter()
        .map(|s| rel(speed(s), v0))
        .fold(0.0, f64::max);
    assert!(
        worst / mag_periods < 1e-10,
        "speed drift {worst:e} over {mag_periods} periods"
    );
    summary(
        8,
        &format!(
            "energy {:.1e}, J {:.1e} over 1000 periods; speed {:.1e} per period",
            tr.energy_drift,
            tr.angular_momentum_drift,
            worst / mag_periods
        ),
        start.elapsed(),
    );
}
