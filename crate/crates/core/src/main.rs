use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use spectator::numeric::{self, RadialGrid, SecularOptions, TrajectoryState};
use spectator::pipeline::{run_scenario, Options};
use spectator::report::{Report, Stage, SCHEMA_VERSION};
use spectator::scenario::Scenario;

#[derive(Parser)]
#[command(
    name = "spectator",
    version,
    about = "Constraint analysis and spectra for ions in a combined trap with a flux line"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// Write the JSON report to this path.
    #[arg(long, value_name = "PATH")]
    json: Option<PathBuf>,
    /// Highest level index in symbolic spectra.
    #[arg(long, default_value_t = 3)]
    n_max: usize,
    /// Radial grid points (the refined grid uses twice as many).
    #[arg(long)]
    grid: Option<usize>,
    /// Relative tolerance for the Richardson grid-convergence warning.
    #[arg(long)]
    tolerance: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline on a scenario file or built-in fixture name.
    Analyze {
        scenario: String,
        /// Skip the numeric cross-checks.
        #[arg(long)]
        symbolic_only: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Radial spectrum of one angular-momentum sector.
    Spectrum {
        scenario: String,
        #[arg(long, allow_hyphen_values = true)]
        m: i64,
        #[arg(long)]
        alpha: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Classical trajectory and secular-frequency runs from the numeric section.
    Simulate {
        scenario: String,
        #[command(flatten)]
        common: Common,
    },
    /// Gauge-transformation check.
    GaugeCheck {
        scenario: String,
        #[command(flatten)]
        common: Common,
    },
    /// List or verify the built-in fixtures.
    Fixtures {
        /// Run every fixture and check its goldens; exits with 2 on any failure.
        #[arg(long)]
        verify: bool,
        /// Run the fixtures in parallel.
        #[arg(long)]
        all_fixtures: bool,
        /// Print the TOML source of one fixture.
        #[arg(long, value_name = "NAME")]
        show: Option<String>,
        /// Scenario files or fixture names to run instead of the built-in set.
        scenarios: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug)]
enum Failure {
    Infra(String),
    Goldens,
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Infra(e.to_string())
    }
}

fn options(c: &Common, numeric: bool) -> Options {
    Options {
        n_max: c.n_max,
        grid: c.grid,
        tolerance: c.tolerance,
        numeric,
        ..Options::default()
    }
}

fn write_json(path: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    if let Some(p) = path {
        std::fs::write(p, format!("{text}\n"))
            .map_err(|e| Failure::Infra(format!("cannot write {}: {e}", p.display())))?;
    }
    Ok(())
}

fn analyze(scenario: &str, symbolic_only: bool, c: &Common) -> Result<(), Failure> {
    let sc = Scenario::load(scenario)?;
    let report = run_scenario(&sc, &options(c, !symbolic_only))?;
    print!("{}", report.to_text());
    write_json(&c.json, &report.to_json())
}

fn spectrum(scenario: &str, m: i64, alpha: Option<f64>, c: &Common) -> Result<(), Failure> {
    let sc = Scenario::load(scenario)?;
    let mut s = sc.numeric_scenario();
    if let Some(a) = alpha {
        s.alpha = a;
    }
    let section = sc.numeric.clone();
    let n_points = c.grid.or(section.as_ref().map(|n| n.grid)).unwrap_or(2000);
    let tol = c
        .tolerance
        .or(section.as_ref().map(|n| n.tolerance))
        .unwrap_or(1e-5);
    let mut grid = RadialGrid::auto(&s, n_points);
    if let Some(n) = &section {
        if let Some(r) = n.r_max {
            grid.r_max = r;
        }
        grid.hard_wall = n.hard_wall;
    }
    let k = c.n_max + 1;
    let r = numeric::radial_spectrum(&s, m, &grid, k, tol)?;
    let closed = numeric::fock_darwin(&s, m, k);
    println!(
        "sector m = {m}, alpha = {}, omega_c = {}, omega_P = {} (hbar = mu = q = c = 1)",
        s.alpha, s.omega_c, s.omega_p
    );
    println!(
        "grid: {} points to r = {:.6}, refined to {}",
        grid.n_points,
        grid.r_max,
        2 * grid.n_points
    );
    println!(
        "{:>3}  {:>20}  {:>20}  {:>10}",
        "n", "numeric", "closed form", "rel. dev."
    );
    for (n, (e, f)) in r.levels.iter().zip(&closed).enumerate() {
        println!(
            "{n:>3}  {e:>20.12}  {f:>20.12}  {:>10.2e}",
            (e - f).abs() / f.abs()
        );
    }
    for w in &r.warnings {
        println!("warning: {w}");
    }
    let out = json!({
        "schema_version": SCHEMA_VERSION,
        "scenario": sc.name,
        "m": m,
        "alpha": s.alpha,
        "omega_c": s.omega_c,
        "omega_p": s.omega_p,
        "grid": grid,
        "tolerance": tol,
        "levels": r.levels,
        "coarse": r.coarse,
        "fine": r.fine,
        "closed_form": closed,
        "warnings": r.warnings,
    });
    write_json(&c.json, &serde_json::to_string_pretty(&out)?)
}

fn simulate(scenario: &str, c: &Common) -> Result<(), Failure> {
    let sc = Scenario::load(scenario)?;
    let s = sc.numeric_scenario();
    let section = sc
        .numeric
        .clone()
        .ok_or_else(|| Failure::Infra(format!("scenario `{}` has no numeric section", sc.name)))?;
    let mut out = json!({
        "schema_version": SCHEMA_VERSION,
        "scenario": sc.name,
        "alpha": s.alpha,
        "omega_c": s.omega_c,
        "omega_p": s.omega_p,
    });
    match &section.trajectory {
        None => println!("trajectory: skipped (no trajectory section)"),
        Some(t) => {
            let [x1, x2, v1, v2] = t.initial;
            let init = TrajectoryState {
                x1,
                x2,
                v1,
                v2,
                time: 0.0,
            };
            let period = 2.0 * std::f64::consts::PI
                / if s.omega_c > 0.0 {
                    s.omega_c
                } else {
                    s.omega_p
                };
            let steps = (t.periods * period / t.dt).round() as usize;
            let tr = numeric::integrate_trajectory(&s, init, t.dt, steps, t.stride)?;
            println!("trajectory: {steps} steps of dt = {}", t.dt);
            println!(
                "  max relative energy drift:            {:.3e}",
                tr.energy_drift
            );
            println!(
                "  max relative angular momentum drift:  {:.3e}",
                tr.angular_momentum_drift
            );
            out["trajectory"] = json!({
                "dt": t.dt,
                "steps": steps,
                "energy_drift": tr.energy_drift,
                "angular_momentum_drift": tr.angular_momentum_drift,
                "states": tr.states,
            });
        }
    }
    match &section.secular {
        None => println!("secular: skipped (no secular section)"),
        Some(sec) => {
            println!("secular frequency (Omega = 1):");
            let mut rows = Vec::new();
            for &ratio in &sec.ratios {
                let eff = 1.0 / (4.0 * ratio);
                let duration = sec.secular_periods * 2.0 * std::f64::consts::PI / eff;
                let r = numeric::secular_frequency(
                    1.0 / 2f64.sqrt(),
                    1.0,
                    ratio,
                    1.0,
                    1.0,
                    duration,
                    SecularOptions::default(),
                )?;
                let rel = (r.frequency - r.effective).abs() / r.effective;
                println!(
                    "  ratio {ratio:>6}: {:.12e}  vs Omega^2/(4 drive) {:.12e}  rel {rel:.3e}",
                    r.frequency, r.effective
                );
                rows.push(json!({"ratio": ratio, "result": r, "relative_error": rel}));
            }
            out["secular"] = json!(rows);
        }
    }
    write_json(&c.json, &serde_json::to_string_pretty(&out)?)
}

fn gauge_check(scenario: &str, c: &Common) -> Result<(), Failure> {
    let sc = Scenario::load(scenario)?;
    let report = run_scenario(&sc, &options(c, false))?;
    match report.stage("gauge") {
        Some(Stage::Ok { .. }) => {
            for (k, q) in report.quantities.range("gauge.".to_string()..) {
                if !k.starts_with("gauge.") {
                    break;
                }
                println!("{k} = {}", q.text());
            }
            if let Some(note) = report.metadata.get("gauge.single_valuedness") {
                println!("note: {note}");
            }
        }
        Some(Stage::Skipped { reason }) => println!("gauge: skipped ({reason})"),
        Some(Stage::Error { message }) => println!("gauge: error: {message}"),
        None => println!("gauge: not run"),
    }
    write_json(&c.json, &report.to_json())
}

fn fixtures(
    verify: bool,
    parallel: bool,
    show: Option<String>,
    scenarios: Vec<String>,
    c: &Common,
) -> Result<(), Failure> {
    if let Some(name) = show {
        let text = spectator::scenario::BUILTIN
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, t)| *t)
            .ok_or_else(|| Failure::Infra(format!("no built-in fixture `{name}`")))?;
        print!("{text}");
        return Ok(());
    }
    let names: Vec<String> = if scenarios.is_empty() {
        Scenario::builtin_names()
            .into_iter()
            .map(String::from)
            .collect()
    } else {
        scenarios
    };
    if !verify && !parallel {
        for name in &names {
            println!("{name}");
        }
        return Ok(());
    }
    let opts = options(c, true);
    let run = |name: &str| -> Result<Report, String> {
        let sc = Scenario::load(name).map_err(|e| e.to_string())?;
        run_scenario(&sc, &opts).map_err(|e| e.to_string())
    };
    let results: Vec<Result<Report, String>> = if parallel {
        std::thread::scope(|scope| {
            let handles: Vec<_> = names.iter().map(|n| scope.spawn(move || run(n))).collect();
            handles
                .into_iter()
                .map(|h| {
                    h.join()
                        .unwrap_or_else(|_| Err("fixture run panicked".into()))
                })
                .collect()
        })
    } else {
        names.iter().map(|n| run(n)).collect()
    };
    let mut all_passed = true;
    let mut reports = Vec::new();
    for (name, res) in names.iter().zip(results) {
        let report = res.map_err(Failure::Infra)?;
        let passed = report.goldens.iter().filter(|g| g.passed).count();
        println!("{name}: {passed}/{} goldens passed", report.goldens.len());
        for g in &report.goldens {
            let mark = if g.passed { "PASS" } else { "FAIL" };
            println!("  [{mark}] {} ({})", g.quantity, g.anchor);
            if !g.passed {
                println!(
                    "         expected {}, computed {}",
                    g.expected,
                    g.computed.as_deref().unwrap_or("<missing>")
                );
            }
        }
        for d in report.diagnostics.iter().filter(|d| !d.agrees) {
            println!(
                "  [NOTE] {}: computed {} differs from recorded claim {}",
                d.quantity,
                d.computed.as_deref().unwrap_or("<missing>"),
                d.claimed
            );
        }
        all_passed &= report.goldens_passed();
        reports.push(report);
    }
    if let Some(path) = &c.json {
        let map: serde_json::Map<String, serde_json::Value> = reports
            .iter()
            .map(|r| {
                (
                    r.scenario.clone(),
                    serde_json::to_value(r).expect("report serializes"),
                )
            })
            .collect();
        write_json(&Some(path.clone()), &serde_json::to_string_pretty(&map)?)?;
    }
    if verify && !all_passed {
        return Err(Failure::Goldens);
    }
    Ok(())
}

fn main() -> ExitCode {
    // Exit quietly when stdout is closed early, e.g. piped into `head`.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Analyze {
            scenario,
            symbolic_only,
            common,
        } => analyze(&scenario, symbolic_only, &common),
        Command::Spectrum {
            scenario,
            m,
            alpha,
            common,
        } => spectrum(&scenario, m, alpha, &common),
        Command::Simulate { scenario, common } => simulate(&scenario, &common),
        Command::GaugeCheck { scenario, common } => gauge_check(&scenario, &common),
        Command::Fixtures {
            verify,
            all_fixtures,
            show,
            scenarios,
            common,
        } => fixtures(verify, all_fixtures, show, scenarios, &common),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Goldens) => {
            eprintln!("error: golden checks failed");
            ExitCode::from(2)
        }
        Err(Failure::Infra(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
