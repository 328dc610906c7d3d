//! Runs a scenario through mechanics → dirac → quantize (→ gauge, →
//! numeric) and assembles the report.

use serde_json::{json, Map, Value};

use crate::dirac::{self, ConstraintAnalysis, ReducedCanonicalSystem};
use crate::gauge::{self, GaugeFunction};
use crate::mechanics::{
    self, HamiltonianModel, LagrangianModel, LegendreResult, MechanicalMomenta,
};
use crate::numeric::{self, RadialGrid, SecularOptions, TrajectoryState};
use crate::quantize::{self, OscillatorForm};
use crate::report::{Diagnostic, GoldenResult, Quantity, Report, Stage};
use crate::scenario::{Context, Scenario, ScenarioError};
use crate::symcore::{Bindings, Expr, ExprMatrix, SymbolId};

#[derive(Clone, Debug)]
pub struct Options {
    pub n_max: usize,
    pub grid: Option<usize>,
    pub tolerance: Option<f64>,
    pub numeric: bool,
    pub alpha: Option<f64>,
    pub sectors: Option<Vec<i64>>,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            n_max: 3,
            grid: None,
            tolerance: None,
            numeric: true,
            alpha: None,
            sectors: None,
        }
    }
}

impl Options {
    pub fn symbolic_only() -> Self {
        Options {
            numeric: false,
            ..Options::default()
        }
    }
}

struct Run<'a> {
    sc: &'a Scenario,
    ctx: Context,
    report: Report,
}

fn matrix_json(m: &ExprMatrix, ctx: &Context) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| {
                Value::Array(
                    m.row(i)
                        .iter()
                        .map(|e| Value::String(ctx.present(e).to_string()))
                        .collect(),
                )
            })
            .collect(),
    )
}

impl Run<'_> {
    fn put(&mut self, name: impl Into<String>, e: &Expr) {
        let text = self.ctx.present(e).to_string();
        self.report.quantities.insert(
            name.into(),
            Quantity::Expr {
                expr: e.clone(),
                text,
            },
        );
    }

    fn put_text(&mut self, name: impl Into<String>, t: impl Into<String>) {
        self.report
            .quantities
            .insert(name.into(), Quantity::Text(t.into()));
    }

    fn put_num(&mut self, name: impl Into<String>, x: f64) {
        self.report
            .quantities
            .insert(name.into(), Quantity::Number(x));
    }

    fn put_matrix(&mut self, prefix: &str, m: &ExprMatrix) {
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                self.put(format!("{prefix}.{i}.{j}"), m.get(i, j));
            }
        }
    }

    fn name(&self, s: SymbolId) -> String {
        self.ctx.table.name(s).to_string()
    }

    fn show(&self, e: &Expr) -> String {
        self.ctx.present(e).to_string()
    }

    fn stage(&mut self, name: &str, st: Stage) {
        self.report.stages.insert(name.to_string(), st);
    }

    fn skip(&mut self, name: &str, reason: impl Into<String>) {
        self.stage(
            name,
            Stage::Skipped {
                reason: reason.into(),
            },
        );
    }

    fn fail(&mut self, name: &str, message: impl ToString) {
        self.stage(
            name,
            Stage::Error {
                message: message.to_string(),
            },
        );
    }

    fn ok(&mut self, name: &str, data: Value) {
        self.stage(name, Stage::Ok { data });
    }
}

pub fn run_scenario(sc: &Scenario, opts: &Options) -> Result<Report, ScenarioError> {
    let ctx = sc.context()?;
    let lagrangian = ctx.parse("model.lagrangian", &sc.model.lagrangian)?;
    let level = ctx.parse("model.limit_level", &sc.model.limit_level)?;
    let j = ctx.parse("model.angular_momentum", &sc.model.angular_momentum)?;
    let h_input = sc
        .model
        .hamiltonian
        .as_ref()
        .map(|h| ctx.parse("model.hamiltonian", h))
        .transpose()?;
    let mut run = Run {
        sc,
        ctx,
        report: Report::new(&sc.name, &sc.description),
    };
    let ps = run.ctx.phase_space.clone();

    // Decomposition.
    let model = match mechanics::decompose_lagrangian(&lagrangian, &ps) {
        Ok(m) => {
            run.put_matrix("lagrangian.mass", &m.mass_matrix);
            for (i, a) in m.velocity_coeffs.iter().enumerate() {
                run.put(format!("lagrangian.A.{i}"), a);
            }
            run.put("lagrangian.potential", &m.potential);
            run.put("lagrangian.constant", &m.constant);
            let data = json!({
                "mass_matrix": matrix_json(&m.mass_matrix, &run.ctx),
                "velocity_coeffs": m.velocity_coeffs.iter().map(|a| run.show(a)).collect::<Vec<_>>(),
                "potential": run.show(&m.potential),
                "constant": run.show(&m.constant),
            });
            run.ok("decomposition", data);
            Some(m)
        }
        Err(e) => {
            run.fail("decomposition", e);
            None
        }
    };

    let legendre = model.as_ref().map(|m| mechanics::legendre(m, &ps));
    let legendre: Option<LegendreResult> = match legendre {
        None => {
            run.skip("legendre", "decomposition failed");
            None
        }
        Some(Err(e)) => {
            run.fail("legendre", e);
            None
        }
        Some(Ok(lg)) => {
            run.put("hamiltonian", &lg.hamiltonian.expr);
            run.put_text("hessian_rank", lg.hessian_rank.to_string());
            let mut data = json!({
                "hessian_rank": lg.hessian_rank,
                "momenta": lg.momenta.iter().map(|p| run.show(p)).collect::<Vec<_>>(),
                "hamiltonian": run.show(&lg.hamiltonian.expr),
                "kinetic_part": lg.hamiltonian.kinetic_part.as_ref().map(|t| run.show(t)),
                "primaries": lg.primaries.iter().map(|p| run.show(p)).collect::<Vec<_>>(),
            });
            if let Some(hi) = &h_input {
                let matches = hi.equivalent(&lg.hamiltonian.expr);
                run.put_text("hamiltonian_matches_input", matches.to_string());
                data["matches_input_hamiltonian"] = json!(matches);
            }
            run.ok("legendre", data);
            Some(lg)
        }
    };

    let momenta = stage_momenta(&mut run, legendre.as_ref());
    let limit = stage_limit(&mut run, legendre.as_ref(), model.as_ref(), &level);
    let analysis = stage_constraints(&mut run, limit.as_ref());
    let reduced = stage_reduction(&mut run, analysis.as_ref(), limit.as_ref());
    let osc = stage_oscillator(&mut run, reduced.as_ref(), opts.n_max);
    stage_angular_momentum(
        &mut run,
        &j,
        reduced.as_ref(),
        osc.as_ref(),
        analysis.as_ref(),
    );
    stage_landau(&mut run, momenta.as_ref(), opts.n_max);
    stage_gauge(&mut run, legendre.as_ref(), &level, &j);
    stage_numeric(&mut run, opts);

    verify(&mut run);
    Ok(run.report)
}

fn stage_momenta(run: &mut Run, lg: Option<&LegendreResult>) -> Option<MechanicalMomenta> {
    const NAME: &str = "mechanical_momenta";
    let Some(lg) = lg else {
        run.skip(NAME, "no Hamiltonian");
        return None;
    };
    if lg.hamiltonian.kinetic_part.is_none() {
        run.skip(NAME, "Hamiltonian has no kinetic part");
        return None;
    }
    let ps = run.ctx.phase_space.clone();
    let k = match mechanics::mechanical_momenta(&lg.hamiltonian, &ps) {
        Ok(k) => k,
        Err(e) => {
            run.fail(NAME, e);
            return None;
        }
    };
    for (i, ki) in k.components.iter().enumerate() {
        run.put(format!("kinetic.K.{i}"), ki);
    }
    run.put_matrix("kinetic.brackets", &k.bracket_matrix);
    if k.components.len() >= 2 {
        run.put("kinetic.bracket", k.bracket_matrix.get(0, 1));
        let hbar = run.sc.symbols.hbar.clone();
        run.put_text("kinetic.commutator", k.commutator_text(0, 1, &hbar));
    }
    let mut data = json!({
        "mass": run.show(&k.mass),
        "components": k.components.iter().map(|c| run.show(c)).collect::<Vec<_>>(),
        "brackets": matrix_json(&k.bracket_matrix, &run.ctx),
    });
    let flux = &run.sc.model.flux_parameters;
    if !flux.is_empty() && k.components.len() >= 2 {
        let zero: Option<Bindings> = flux
            .iter()
            .map(|n| {
                run.ctx
                    .table
                    .lookup(n)
                    .map(|s| (s, Expr::zero(&run.ctx.table)))
            })
            .collect();
        let without = zero.and_then(|z| {
            let h = HamiltonianModel {
                expr: lg.hamiltonian.expr.substitute(&z).ok()?,
                kinetic_part: Some(lg.hamiltonian.kinetic_part.as_ref()?.substitute(&z).ok()?),
            };
            mechanics::mechanical_momenta(&h, &ps).ok()
        });
        match without {
            Some(k0) => {
                let b = k0.bracket_matrix.get(0, 1).clone();
                data["bracket_without_flux"] = json!(run.show(&b));
                data["flux_independent"] = json!(k0.bracket_matrix == k.bracket_matrix);
                run.put("kinetic.bracket_without_flux", &b);
                run.put_text(
                    "kinetic.flux_independent",
                    (k0.bracket_matrix == k.bracket_matrix).to_string(),
                );
            }
            None => data["bracket_without_flux"] = json!(null),
        }
    }
    run.ok(NAME, data);
    Some(k)
}

struct Limit {
    h0: HamiltonianModel,
    legendre: LegendreResult,
}

fn stage_limit(
    run: &mut Run,
    lg: Option<&LegendreResult>,
    model: Option<&LagrangianModel>,
    level: &Expr,
) -> Option<Limit> {
    const NAME: &str = "kinetic_limit";
    let (Some(lg), Some(model)) = (lg, model) else {
        run.skip(NAME, "no Hamiltonian");
        return None;
    };
    let ps = run.ctx.phase_space.clone();
    let reduced = mechanics::kinetic_limit_reduce(&lg.hamiltonian, model, level)
        .and_then(|lim| Ok((mechanics::legendre(&lim.l0, &ps)?, lim)));
    match reduced {
        Err(e) => {
            run.fail(NAME, e);
            None
        }
        Ok((lg0, lim)) => {
            run.put("h0", &lim.h0.expr);
            run.put("l0", &lim.l0.to_expr());
            for (i, p) in lg0.primaries.iter().enumerate() {
                run.put(format!("primary.{i}"), p);
            }
            let consistent = lg0.hamiltonian.expr == lim.h0.expr;
            let data = json!({
                "level": run.show(level),
                "h0": run.show(&lim.h0.expr),
                "l0": run.show(&lim.l0.to_expr()),
                "hessian_rank": lg0.hessian_rank,
                "primaries": lg0.primaries.iter().map(|p| run.show(p)).collect::<Vec<_>>(),
                "legendre_of_l0_matches_h0": consistent,
            });
            run.ok(NAME, data);
            Some(Limit {
                h0: lim.h0,
                legendre: lg0,
            })
        }
    }
}

fn put_analysis(run: &mut Run, prefix: &str, an: &ConstraintAnalysis) -> Value {
    let ps = run.ctx.phase_space.clone();
    let table = run.ctx.table.clone();
    let sec: Vec<&Expr> = an
        .constraints
        .iter()
        .filter(|c| c.generation > 1)
        .map(|c| &c.expr)
        .collect();
    run.put_text(format!("{prefix}secondary.count"), sec.len().to_string());
    for (i, s) in sec.iter().enumerate() {
        run.put(format!("{prefix}secondary.{i}"), s);
    }
    let pm = an.primary_matrix.entries.clone();
    run.put_matrix(&format!("{prefix}constraint_matrix"), &pm);
    run.put(
        format!("{prefix}constraint_matrix.determinant"),
        &an.primary_matrix.determinant,
    );
    run.put_text(
        format!("{prefix}constraint_matrix.invertible"),
        an.primary_matrix.invertible.to_string(),
    );
    let full = an.full_matrix.clone();
    run.put_matrix(&format!("{prefix}full_matrix"), &full);
    if let Some(inv) = an.matrix.inverse.clone() {
        run.put_matrix(&format!("{prefix}inverse"), &inv);
    }
    let outcome = match an.outcome {
        dirac::Outcome::Reducible => "reducible",
        dirac::Outcome::QuantizationBlocked => "quantization_blocked",
    };
    run.put_text(format!("{prefix}outcome"), outcome);
    let reasons: Vec<String> = an.blocked_reasons.iter().map(reason_name).collect();
    run.put_text(format!("{prefix}blocked_reasons"), reasons.join(", "));
    let mut dirac_json = Map::new();
    if let Some(t) = an.dirac_table.clone() {
        for ((a, b), v) in &t {
            run.put(
                format!("{prefix}dirac.{}.{}", run.name(*a), run.name(*b)),
                v,
            );
            dirac_json.insert(
                format!("{{{},{}}}", run.name(*a), run.name(*b)),
                json!(run.show(v)),
            );
        }
        let strong = an.second_class().iter().all(|c| {
            ps.variables().iter().all(|&v| {
                an.dirac_bracket(&c.expr, &Expr::symbol(&table, v))
                    .is_ok_and(|d| d.is_zero())
            })
        });
        run.put_text(format!("{prefix}dirac.strong"), strong.to_string());
    }
    json!({
        "constraints": an.constraints.iter().map(|c| json!({
            "expr": run.show(&c.expr),
            "generation": c.generation,
            "class": c.class,
        })).collect::<Vec<_>>(),
        "primary_matrix": matrix_json(&an.primary_matrix.entries, &run.ctx),
        "primary_matrix_invertible": an.primary_matrix.invertible,
        "determinant": run.show(&an.primary_matrix.determinant),
        "full_matrix": matrix_json(&an.full_matrix, &run.ctx),
        "second_class_matrix": matrix_json(&an.matrix.entries, &run.ctx),
        "second_class_determinant": run.show(&an.matrix.determinant),
        "inverse": an.matrix.inverse.as_ref().map(|m| matrix_json(m, &run.ctx)),
        "surface_singular": an.surface.singular,
        "outcome": an.outcome,
        "blocked_reasons": an.blocked_reasons,
        "dirac_table": an.dirac_table.as_ref().map(|_| Value::Object(dirac_json)),
    })
}

fn reason_name(r: &dirac::BlockReason) -> String {
    serde_json::to_value(r)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

fn stage_constraints(run: &mut Run, limit: Option<&Limit>) -> Option<ConstraintAnalysis> {
    const NAME: &str = "constraints";
    let Some(limit) = limit else {
        run.skip(NAME, "kinetic limit unavailable");
        return None;
    };
    let ps = run.ctx.phase_space.clone();
    match dirac::analyze(
        &limit.h0,
        &limit.legendre.primaries,
        &ps,
        run.sc.model.max_generations,
    ) {
        Err(e) => {
            run.fail(NAME, e);
            None
        }
        Ok(an) => {
            let data = put_analysis(run, "", &an);
            run.ok(NAME, data);
            Some(an)
        }
    }
}

fn reduce_with(
    run: &Run,
    an: &ConstraintAnalysis,
    h: &HamiltonianModel,
) -> Result<ReducedCanonicalSystem, dirac::DiracError> {
    dirac::reduce(an, h, &run.ctx.independent, &[run.ctx.reduced])
}

fn stage_reduction(
    run: &mut Run,
    an: Option<&ConstraintAnalysis>,
    limit: Option<&Limit>,
) -> Option<ReducedCanonicalSystem> {
    const NAME: &str = "reduction";
    let (Some(an), Some(limit)) = (an, limit) else {
        run.skip(NAME, "no constraint analysis");
        return None;
    };
    if !an.is_reducible() {
        let reasons: Vec<String> = an.blocked_reasons.iter().map(reason_name).collect();
        run.skip(
            NAME,
            format!("quantization blocked: {}", reasons.join(", ")),
        );
        return None;
    }
    match reduce_with(run, an, &limit.h0) {
        Err(e) => {
            run.fail(NAME, e);
            None
        }
        Ok(red) => {
            let mut elim = Map::new();
            for (s, v) in &red.elimination {
                run.put(format!("elimination.{}", run.name(*s)), v);
                elim.insert(run.name(*s), json!(run.show(v)));
            }
            let pair = red.pairs[0].clone();
            run.put("reduced.x", &pair.x_def);
            run.put("reduced.p", &pair.p_def);
            match an.dirac_bracket(&pair.x_def, &pair.p_def) {
                Ok(b) => run.put("reduced.bracket", &b),
                Err(e) => run.put_text("reduced.bracket", e.to_string()),
            }
            run.put("reduced_h", &red.reduced_h);
            let data = json!({
                "pairs": red.pairs.iter().map(|p| json!({
                    run.name(p.x): run.show(&p.x_def),
                    run.name(p.p): run.show(&p.p_def),
                })).collect::<Vec<_>>(),
                "elimination": elim,
                "reduced_hamiltonian": run.show(&red.reduced_h),
            });
            run.ok(NAME, data);
            Some(red)
        }
    }
}

fn stage_oscillator(
    run: &mut Run,
    red: Option<&ReducedCanonicalSystem>,
    n_max: usize,
) -> Option<OscillatorForm> {
    let Some(red) = red else {
        run.skip("oscillator", "no reduced system");
        run.skip("spectrum", "no reduced system");
        return None;
    };
    match quantize::recognize_oscillator(red) {
        Err(e) => {
            run.fail("oscillator", e);
            run.skip("spectrum", "no oscillator form");
            None
        }
        Ok(osc) => {
            run.put("oscillator.mass", &osc.effective_mass);
            run.put("oscillator.frequency", &osc.effective_frequency);
            run.put("oscillator.offset", &osc.zero_point_offset);
            let data = json!({
                "effective_mass": run.show(&osc.effective_mass),
                "effective_frequency": run.show(&osc.effective_frequency),
                "zero_point_offset": run.show(&osc.zero_point_offset),
            });
            run.ok("oscillator", data);
            let hbar = run.ctx.hbar.clone();
            let sp = quantize::oscillator_spectrum(&osc, n_max, &hbar);
            let mut levels = Vec::new();
            for (n, lv) in sp.levels.iter().enumerate() {
                if let quantize::LevelValue::Exact(e) = &lv.energy {
                    run.put(format!("energy.{n}"), e);
                    levels.push(json!({"n": n, "energy": run.show(e)}));
                }
            }
            run.ok("spectrum", json!({"kind": sp.kind, "levels": levels}));
            Some(osc)
        }
    }
}

fn stage_angular_momentum(
    run: &mut Run,
    j: &Expr,
    red: Option<&ReducedCanonicalSystem>,
    osc: Option<&OscillatorForm>,
    an: Option<&ConstraintAnalysis>,
) {
    const NAME: &str = "angular_momentum";
    let (Some(red), Some(osc)) = (red, osc) else {
        run.skip(NAME, "no oscillator form");
        return;
    };
    let hbar = run.ctx.hbar.clone();
    let eliminated = red.eliminate(j);
    match (
        eliminated,
        quantize::angular_momentum_reduce(j, red, osc, &hbar),
    ) {
        (Ok(el), Ok(am)) => {
            run.put("angular_momentum.eliminated", &el);
            run.put("angular_momentum.reduced", &am.reduced_j);
            run.put("angular_momentum.induced", &am.fractional_offset);
            run.put("angular_momentum.ladder", &am.ladder_coefficient);
            run.put("angular_momentum.number_offset", &am.number_offset);
            run.put("angular_momentum.zero_point", &am.zero_point);
            let mut data = json!({
                "eliminated": run.show(&el),
                "in_reduced_pair": run.show(&am.reduced_j),
                "induced_offset": run.show(&am.fractional_offset),
                "ladder_coefficient": run.show(&am.ladder_coefficient),
                "number_offset": run.show(&am.number_offset),
                "total_zero_point": run.show(&am.zero_point),
            });
            if let Some(an) = an {
                if let Ok(hj) = an.dirac_bracket(j, &red_h_original(red, run)) {
                    data["commutes_with_h0_on_surface"] = json!(an.surface.restrict(&hj).is_zero());
                }
            }
            run.ok(NAME, data);
        }
        (Err(e), _) => run.fail(NAME, e),
        (_, Err(e)) => run.fail(NAME, e),
    }
}

/// H₀ rewritten in the original variables (the reduced Hamiltonian before the
/// change to the reduced pair), used for the Dirac bracket with `J`.
fn red_h_original(red: &ReducedCanonicalSystem, run: &Run) -> Expr {
    let mut back = Bindings::new();
    for p in &red.pairs {
        back.insert(p.x, p.x_def.clone());
        back.insert(p.p, p.p_def.clone());
    }
    red.reduced_h
        .substitute(&back)
        .unwrap_or_else(|_| Expr::zero(&run.ctx.table))
}

fn stage_landau(run: &mut Run, k: Option<&MechanicalMomenta>, n_max: usize) {
    const NAME: &str = "landau";
    let Some(k) = k else {
        run.skip(NAME, "no mechanical momenta");
        return;
    };
    let hbar = run.ctx.hbar.clone();
    match quantize::landau_levels(k, n_max, &hbar) {
        Err(quantize::QuantizeError::CommutingMomenta) => {
            run.put_text("landau.spectrum", "continuous");
            run.fail(NAME, quantize::QuantizeError::CommutingMomenta);
        }
        Err(e) => run.fail(NAME, e),
        Ok((osc, sp)) => {
            run.put_text("landau.spectrum", "discrete");
            run.put("landau.frequency", &osc.effective_frequency);
            let mut levels = Vec::new();
            for (n, lv) in sp.levels.iter().enumerate() {
                if let quantize::LevelValue::Exact(e) = &lv.energy {
                    run.put(format!("landau.{n}"), e);
                    levels.push(json!({"n": n, "energy": run.show(e)}));
                }
            }
            let data = json!({
                "mass": run.show(&osc.effective_mass),
                "frequency": run.show(&osc.effective_frequency),
                "levels": levels,
            });
            run.ok(NAME, data);
        }
    }
}

fn stage_gauge(run: &mut Run, lg: Option<&LegendreResult>, level: &Expr, j: &Expr) {
    const NAME: &str = "gauge";
    let Some(section) = run.sc.gauge.clone() else {
        run.skip(NAME, "no gauge section");
        return;
    };
    let Some(lg) = lg else {
        run.skip(NAME, "no Hamiltonian");
        return;
    };
    match gauge_check(run, &section, lg, level, j) {
        Ok(data) => run.ok(NAME, data),
        Err(e) => run.fail(NAME, e),
    }
}

fn gauge_check(
    run: &mut Run,
    section: &crate::scenario::GaugeSection,
    lg: &LegendreResult,
    level: &Expr,
    j: &Expr,
) -> Result<Value, String> {
    let ps = run.ctx.phase_space.clone();
    let parse_all = |run: &Run, field: &str, v: &[String]| -> Result<Vec<Expr>, String> {
        v.iter()
            .map(|t| run.ctx.parse(field, t).map_err(|e| e.to_string()))
            .collect()
    };
    let gradient = parse_all(run, "gauge.gradient", &section.gradient)?;
    let potential = parse_all(run, "gauge.potential", &section.potential)?;
    let winding = run
        .ctx
        .parse("gauge.winding", &section.winding)
        .map_err(|e| e.to_string())?;
    let coupling = run
        .ctx
        .parse("gauge.coupling", &section.coupling)
        .map_err(|e| e.to_string())?;
    let g = GaugeFunction::new(gradient, winding, &ps).map_err(|e| e.to_string())?;
    run.put_text("gauge.curl_free", g.is_curl_free(&ps).to_string());

    let a_new = gauge::transform_potential(&potential, &g).map_err(|e| e.to_string())?;
    for (i, a) in a_new.iter().enumerate() {
        run.put(format!("gauge.potential.{i}"), a);
    }
    let gauged_away = a_new.iter().all(|a| a.expand_aliases().is_zero());
    run.put_text("gauge.potential_vanishes", gauged_away.to_string());

    let h_new = gauge::transform_hamiltonian(&lg.hamiltonian, &g, &coupling, &ps)
        .map_err(|e| e.to_string())?;
    let h_new = HamiltonianModel {
        expr: h_new.expr.expand_aliases(),
        kinetic_part: h_new.kinetic_part.map(|t| t.expand_aliases()),
    };
    run.put("gauge.hamiltonian", &h_new.expr);
    let mut data = json!({
        "gradient": g.gradient.iter().map(|x| run.show(x)).collect::<Vec<_>>(),
        "winding_constant": run.show(&g.winding_constant),
        "transformed_potential": a_new.iter().map(|x| run.show(x)).collect::<Vec<_>>(),
        "potential_vanishes": gauged_away,
        "transformed_hamiltonian": run.show(&h_new.expr),
    });
    if let Some(expected) = &section.expected_hamiltonian {
        let e = run
            .ctx
            .parse("gauge.expected_hamiltonian", expected)
            .map_err(|e| e.to_string())?;
        let m = e.equivalent(&h_new.expr);
        run.put_text("gauge.hamiltonian_matches", m.to_string());
        data["hamiltonian_matches"] = json!(m);
    }

    // Transformed system through the same kinetic limit and reduction.
    let l_new = mechanics::inverse_legendre(&h_new, &ps).map_err(|e| e.to_string())?;
    let lim = mechanics::kinetic_limit_reduce(&h_new, &l_new, level).map_err(|e| e.to_string())?;
    let lg0 = mechanics::legendre(&lim.l0, &ps).map_err(|e| e.to_string())?;
    let an = dirac::analyze(&lim.h0, &lg0.primaries, &ps, run.sc.model.max_generations)
        .map_err(|e| e.to_string())?;
    for (i, p) in lg0.primaries.iter().enumerate() {
        run.put(format!("gauge.primary.{i}"), p);
    }
    let an_json = put_analysis(run, "gauge.", &an);
    data["constraints"] = an_json;
    let red = reduce_with(run, &an, &lim.h0).map_err(|e| e.to_string())?;
    let j_new = gauge::transform_observable(j, &g, &coupling, &ps).map_err(|e| e.to_string())?;
    run.put("gauge.j", &j_new);
    let j_red = gauge::transform_observable_and_reduce(j, &g, &coupling, &ps, &red)
        .map_err(|e| e.to_string())?;
    run.put("gauge.j_reduced", &j_red);
    data["j_transformed"] = json!(run.show(&j_new));
    data["j_reduced"] = json!(run.show(&j_red));
    if let Some(orig) = run.report.expr("angular_momentum.eliminated").cloned() {
        let m = orig.equivalent(&j_red);
        run.put_text("gauge.j_matches", m.to_string());
        data["j_matches_original_gauge"] = json!(m);
    }
    if let Some(pi) = run.ctx.table.lookup("pi") {
        let pi = Expr::symbol(&run.ctx.table, pi);
        let offset = -(&coupling * &g.winding_constant) / (Expr::integer(&run.ctx.table, 2) * pi);
        run.put("gauge.winding_offset", &offset);
        data["winding_offset"] = json!(run.show(&offset));
    }
    run.report.metadata.insert(
        "gauge.single_valuedness".into(),
        "the phase exp(i q chi/(hbar c)) is single-valued around the flux line only when q*Phi0/(2*pi*hbar*c) is an integer; recorded, not adjudicated".into(),
    );
    Ok(data)
}

fn stage_numeric(run: &mut Run, opts: &Options) {
    const NAME: &str = "numeric";
    if !opts.numeric {
        run.skip(NAME, "disabled by options");
        return;
    }
    let Some(section) = run.sc.numeric.clone() else {
        run.skip(NAME, "no numeric section");
        return;
    };
    match numeric_checks(run, &section, opts) {
        Ok(data) => run.ok(NAME, data),
        Err(e) => run.fail(NAME, e),
    }
}

fn numeric_checks(
    run: &mut Run,
    section: &crate::scenario::NumericSection,
    opts: &Options,
) -> Result<Value, String> {
    let mut s = run.sc.numeric_scenario();
    if let Some(a) = opts.alpha {
        s.alpha = a;
    }
    let tol = opts.tolerance.unwrap_or(section.tolerance);
    let n_points = opts.grid.unwrap_or(section.grid);
    let mut grid = RadialGrid::auto(&s, n_points);
    if let Some(r) = section.r_max {
        grid.r_max = r;
    }
    grid.hard_wall = section.hard_wall;
    let sectors = opts
        .sectors
        .clone()
        .unwrap_or_else(|| section.sectors.clone());
    let spectra: Vec<_> = std::thread::scope(|scope| {
        let handles: Vec<_> = sectors
            .iter()
            .map(|&m| {
                scope.spawn(move || {
                    (
                        m,
                        numeric::radial_spectrum(&s, m, &grid, section.levels, tol),
                    )
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("solver thread"))
            .collect()
    });
    let mut radial = Vec::new();
    let mut warnings = Vec::new();
    for (m, r) in spectra {
        let r = r.map_err(|e| e.to_string())?;
        let closed = numeric::fock_darwin(&s, m, section.levels);
        for (k, (e, c)) in r.levels.iter().zip(&closed).enumerate() {
            run.put_num(format!("numeric.radial.m{m}.n{k}"), *e);
            run.put_num(format!("numeric.fock_darwin.m{m}.n{k}"), *c);
        }
        let max_rel = r
            .levels
            .iter()
            .zip(&closed)
            .map(|(e, c)| (e - c).abs() / c.abs())
            .fold(0.0, f64::max);
        warnings.extend(r.warnings.iter().map(|w| format!("m = {m}: {w}")));
        radial.push(json!({
            "m": m,
            "levels": r.levels,
            "coarse": r.coarse,
            "fine": r.fine,
            "closed_form": closed,
            "max_relative_deviation": max_rel,
        }));
    }
    // Flux shift: (m, α) against (m − 1, α + 1).
    let m0 = sectors.first().copied().unwrap_or(0);
    let shifted = numeric::NumericScenario {
        alpha: s.alpha + 1.0,
        ..s
    };
    let a =
        numeric::radial_spectrum(&s, m0, &grid, section.levels, tol).map_err(|e| e.to_string())?;
    let b = numeric::radial_spectrum(&shifted, m0 - 1, &grid, section.levels, tol)
        .map_err(|e| e.to_string())?;
    let shift = a
        .levels
        .iter()
        .zip(&b.levels)
        .map(|(x, y)| (x - y).abs() / x.abs())
        .fold(0.0, f64::max);
    run.put_num("numeric.flux_shift_max_rel", shift);

    let mut data = json!({
        "units": "hbar = mu = q = c = 1",
        "alpha": s.alpha,
        "omega_c": s.omega_c,
        "omega_p": s.omega_p,
        "grid": {"r_max": grid.r_max, "n_points": grid.n_points, "hard_wall": grid.hard_wall, "refined_points": 2 * grid.n_points},
        "tolerance": tol,
        "radial": radial,
        "flux_shift_max_relative": shift,
        "warnings": warnings,
    });

    if let Some(t) = &section.trajectory {
        let [x1, x2, v1, v2] = t.initial;
        let init = TrajectoryState {
            x1,
            x2,
            v1,
            v2,
            time: 0.0,
        };
        let period = if s.omega_c > 0.0 {
            2.0 * std::f64::consts::PI / s.omega_c
        } else {
            2.0 * std::f64::consts::PI / s.omega_p
        };
        let steps = (t.periods * period / t.dt).round() as usize;
        let tr = numeric::integrate_trajectory(&s, init, t.dt, steps, t.stride)
            .map_err(|e| e.to_string())?;
        run.put_num("numeric.trajectory.energy_drift", tr.energy_drift);
        run.put_num(
            "numeric.trajectory.angular_momentum_drift",
            tr.angular_momentum_drift,
        );
        data["trajectory"] = json!({
            "dt": t.dt,
            "steps": steps,
            "energy_drift": tr.energy_drift,
            "angular_momentum_drift": tr.angular_momentum_drift,
            "canonical_angular_momentum": s.canonical_angular_momentum(&init),
        });
    }
    if let Some(sec) = &section.secular {
        let mut rows = Vec::new();
        for &ratio in &sec.ratios {
            // Ω = 1 with q = μ = d = 1.
            let v = 1.0 / 2f64.sqrt();
            let eff = 1.0 / (4.0 * ratio);
            let duration = sec.secular_periods * 2.0 * std::f64::consts::PI / eff;
            let r = numeric::secular_frequency(
                v,
                1.0,
                ratio,
                1.0,
                1.0,
                duration,
                SecularOptions::default(),
            )
            .map_err(|e| e.to_string())?;
            let rel = (r.frequency - r.effective).abs() / r.effective;
            run.put_num(
                format!("numeric.secular.ratio{ratio}.frequency"),
                r.frequency,
            );
            run.put_num(format!("numeric.secular.ratio{ratio}.relative_error"), rel);
            rows.push(json!({"ratio": ratio, "frequency": r.frequency, "effective": r.effective, "relative_error": rel}));
        }
        data["secular"] = json!(rows);
    }
    Ok(data)
}

fn verify(run: &mut Run) {
    let goldens: Vec<GoldenResult> = run
        .sc
        .golden
        .iter()
        .map(|g| check(&run.report, &run.ctx, g))
        .collect();
    run.report.goldens = goldens;
    let diags: Vec<Diagnostic> = run
        .sc
        .claim
        .iter()
        .map(|c| {
            let computed = run.report.quantity(&c.quantity);
            let agrees =
                computed.is_some_and(|q| matches_expected(q, &c.claimed, None, &run.ctx).is_ok());
            Diagnostic {
                quantity: c.quantity.clone(),
                computed: computed.map(Quantity::text),
                claimed: c.claimed.clone(),
                agrees,
                anchor: c.anchor.clone(),
                note: c.note.clone(),
            }
        })
        .collect();
    run.report.diagnostics = diags;
}

fn matches_expected(
    q: &Quantity,
    expected: &str,
    tolerance: Option<f64>,
    ctx: &Context,
) -> Result<(), String> {
    match q {
        Quantity::Expr { expr, .. } => {
            let e = ctx.parse("expected", expected).map_err(|e| e.to_string())?;
            if expr.equivalent(&e) {
                Ok(())
            } else {
                Err(format!(
                    "difference: {}",
                    ctx.present(&(expr - &e).expand_aliases())
                ))
            }
        }
        Quantity::Text(t) => {
            if t == expected {
                Ok(())
            } else {
                Err(String::new())
            }
        }
        Quantity::Number(x) => {
            let e: f64 = expected
                .trim()
                .parse()
                .map_err(|_| format!("expected value `{expected}` is not a number"))?;
            let tol = tolerance.unwrap_or(1e-12);
            let scale = if e == 0.0 { 1.0 } else { e.abs() };
            if (x - e).abs() <= tol * scale {
                Ok(())
            } else {
                Err(format!(
                    "relative deviation {:.3e} exceeds {tol:.1e}",
                    (x - e).abs() / scale
                ))
            }
        }
    }
}

fn check(report: &Report, ctx: &Context, g: &crate::scenario::Golden) -> GoldenResult {
    let q = report.quantity(&g.quantity);
    let (passed, detail) = match q {
        None => (false, "quantity not computed".to_string()),
        Some(q) => match matches_expected(q, &g.expected, g.tolerance, ctx) {
            Ok(()) => (true, String::new()),
            Err(d) => (false, d),
        },
    };
    GoldenResult {
        quantity: g.quantity.clone(),
        expected: g.expected.clone(),
        computed: q.map(Quantity::text),
        anchor: g.anchor.clone(),
        passed,
        detail,
    }
}
