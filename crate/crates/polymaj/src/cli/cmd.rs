use std::path::Path;

use polymaj_core::compiler::compile_formula;
use polymaj_core::rng::{derive_seed, task_rng};
use polymaj_core::synth::{
    self, bias_recurrence, level_reports, margin_class, resample_until_valid, BandRule, PlanMode,
};
use polymaj_core::truth::assignment;
use polymaj_core::verify::{AgreementMode, MAX_DEGREE_VARS, MAX_EXACT_VARS};
use polymaj_core::{gen, TruthTable};
use serde::Serialize;
use serde_json::json;

use super::{to_value, Mode, Outcome, RunConfig};
use crate::report::{to_csv, to_json, RunMeta};
use crate::{exit, io, par, Error, Result};

const COMPILE_TRIALS: u64 = 2000;
/// Per-input error tables are exhaustive up to this arity.
const COMPILE_MAX_N: u32 = 10;
const SAMPLED_INPUTS: usize = 1024;
const VERIFY_TRIALS: u64 = 100_000;

fn cap(what: String, requested: u32, limit: u32) -> Error {
    Error::Core(polymaj_core::Error::ResourceCap { what, requested: requested as f64, limit: limit as f64 })
}

fn bits(x: &[bool]) -> String {
    x.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

#[derive(Serialize)]
struct ErrorRow {
    /// `x0 x1 ...` as a bit string.
    input: String,
    value: bool,
    mistakes: u64,
    error: f64,
}

#[derive(Serialize)]
struct CompileResult {
    formula: String,
    num_vars: u32,
    size: u64,
    depth: u32,
    gates: u64,
    degree_bound: u64,
    theoretical_bound: f64,
    error_bound: f64,
    trials: u64,
    inputs: &'static str,
    inputs_checked: usize,
    max_error: f64,
    mean_error: f64,
    /// Only known when whole tables are sampled.
    max_degree: Option<usize>,
    degree_violations: Option<u64>,
    ledger_violations: Vec<String>,
    pass: bool,
}

pub(super) fn compile(cfg: &RunConfig, path: &Path) -> Result<Outcome> {
    let f = io::load_formula(path)?;
    let recipe = compile_formula(&f)?;
    let n = f.num_vars();
    let trials = cfg.trials.unwrap_or(COMPILE_TRIALS);
    if trials == 0 {
        return Err(Error::Usage("--trials must be positive".into()));
    }
    let max_n = cfg.max_n.unwrap_or(COMPILE_MAX_N);
    let (rows, max_degree, degree_violations, inputs) = if n <= max_n {
        let target = f.truth_table(n)?;
        let prof = par::error_profile(&recipe, &target, cfg.seed, trials)?;
        let rows: Vec<ErrorRow> = (0..target.len())
            .map(|x| ErrorRow {
                input: bits(&assignment(n, x)),
                value: target.get(x),
                mistakes: prof.mistakes[x],
                error: prof.error_at(x),
            })
            .collect();
        (rows, Some(prof.max_degree), Some(prof.degree_violations), "exhaustive")
    } else {
        let mut r = task_rng(cfg.seed, u64::MAX);
        let xs: Vec<Vec<bool>> = (0..SAMPLED_INPUTS).map(|_| gen::random_assignment(&mut r, n as usize)).collect();
        let m = par::sampled_mistakes(&recipe, &f, &xs, cfg.seed, trials);
        let rows = xs
            .iter()
            .zip(m)
            .map(|(x, m)| ErrorRow { input: bits(x), value: f.eval(x), mistakes: m, error: m as f64 / trials as f64 })
            .collect();
        (rows, None, None, "sampled")
    };
    let ledger_violations = recipe.ledger.violations();
    let pass = ledger_violations.is_empty() && degree_violations.unwrap_or(0) == 0;
    let result = CompileResult {
        formula: f.to_string(),
        num_vars: n,
        size: recipe.size,
        depth: recipe.depth,
        gates: recipe.ledger.gates,
        degree_bound: recipe.degree_bound,
        theoretical_bound: recipe.ledger.theoretical_bound,
        error_bound: recipe.error,
        trials,
        inputs,
        inputs_checked: rows.len(),
        max_error: rows.iter().map(|r| r.error).fold(0.0, f64::max),
        mean_error: rows.iter().map(|r| r.error).sum::<f64>() / rows.len().max(1) as f64,
        max_degree,
        degree_violations,
        ledger_violations,
        pass,
    };
    let ledger = to_csv(&recipe.ledger.table())?;
    Ok(Outcome {
        meta: RunMeta::new(
            "compile",
            cfg.seed,
            Some(trials),
            json!({"formula": path.display().to_string(), "max_n": max_n}),
        ),
        result: to_value(&result)?,
        artifacts: vec![
            ("recipe.json".into(), to_json(&recipe)?),
            ("ledger.csv".into(), ledger.clone()),
            ("errors.csv".into(), to_csv(&rows)?),
        ],
        csv: ledger,
        notes: vec![],
        code: if pass { exit::OK } else { exit::FAIL },
    })
}

/// Largest weight in `N_eps` and least weight in `Y_eps`.
fn margin_weights(n: u64, eps: f64) -> (u64, u64) {
    let lo = (0..=n).rev().find(|&w| margin_class(n, eps, w) < 0).unwrap_or(0);
    let hi = (0..=n).find(|&w| margin_class(n, eps, w) > 0).unwrap_or(n);
    (lo, hi)
}

#[derive(Serialize)]
struct BandRow {
    witness: usize,
    weight: u64,
    class: i8,
    level: usize,
    ones_fraction: f64,
    predicted: f64,
    sigma: f64,
    band_lo: f64,
    band_hi: f64,
    pass: bool,
}

#[derive(Serialize)]
struct PlanRow {
    level: usize,
    kind: String,
    width: f64,
    log_width: f64,
    fan_in: f64,
    log_fan_in: f64,
    center: f64,
}

pub(super) fn synth(
    cfg: &RunConfig,
    n: u64,
    d: usize,
    eps: f64,
    witnesses: usize,
    tries: Option<usize>,
    rule: BandRule,
) -> Result<Outcome> {
    if d < 2 {
        return Err(Error::Usage(format!("depth d = {d}: synthesis needs d >= 2")));
    }
    let p = synth::plan(n, d, eps, &cfg.overrides, cfg.max_width)?;
    let (w_lo, w_hi) = margin_weights(n, eps);
    let predictions: Vec<_> =
        [w_lo, w_hi].iter().map(|&w| json!({"weight": w, "levels": bias_recurrence(&p, w as f64)})).collect();
    let meta = RunMeta::new(
        "synth",
        cfg.seed,
        None,
        json!({
            "n": n, "d": d, "epsilon": eps, "overrides": cfg.overrides, "max_width": cfg.max_width,
            "witnesses": witnesses, "tries": tries, "rule": rule,
        }),
    );
    let plan_json = to_json(&p)?;
    // Desk plans over the caps fall through to `synth`, which reports them.
    if !p.synthesizable && p.mode == PlanMode::Textbook {
        let reason = p.reason.clone().unwrap_or_default();
        let rows: Vec<PlanRow> = p
            .levels
            .iter()
            .map(|l| PlanRow {
                level: l.level,
                kind: l.kind.to_string(),
                width: l.width,
                log_width: l.log_width,
                fan_in: l.fan_in,
                log_fan_in: l.log_fan_in,
                center: l.center,
            })
            .collect();
        return Ok(Outcome {
            meta,
            result: json!({"status": "NOTSYNTH", "reason": reason, "plan": p, "predictions": predictions}),
            csv: to_csv(&rows)?,
            artifacts: vec![("plan.json".into(), plan_json)],
            notes: vec![format!("NOTSYNTH: {reason}")],
            code: exit::OK,
        });
    }
    let xs: Vec<Vec<bool>> = (0..witnesses)
        .map(|j| {
            let w = if j % 2 == 0 { w_lo } else { w_hi };
            gen::assignment_of_weight(&mut task_rng(derive_seed(cfg.seed, 1), j as u64), n as usize, w as usize)
        })
        .collect();
    let root = derive_seed(cfg.seed, 0);
    let (sc, tries_used) = match tries {
        Some(t) => {
            let r = resample_until_valid(&p, &xs, t, rule, root)?;
            (r.circuit, Some(r.tries))
        }
        None => (synth::synth(&p, root)?, None),
    };
    let reports = level_reports(&sc, &p, &xs, rule)?;
    let rows: Vec<BandRow> = reports
        .iter()
        .enumerate()
        .flat_map(|(j, r)| {
            r.levels.iter().map(move |l| BandRow {
                witness: j,
                weight: r.weight,
                class: r.class,
                level: l.level,
                ones_fraction: l.ones_fraction,
                predicted: l.predicted,
                sigma: l.sigma,
                band_lo: l.band_lo,
                band_hi: l.band_hi,
                pass: l.pass,
            })
        })
        .collect();
    let witnesses_ok = reports.iter().all(|r| r.witness_ok());
    let bands = to_csv(&rows)?;
    let c = &sc.circuit;
    Ok(Outcome {
        meta,
        result: json!({
            "status": "OK",
            "plan": p,
            "predictions": predictions,
            "circuit": {
                "seed": sc.seed, "tries": tries_used, "inputs": c.num_inputs(), "gates": c.size(),
                "depth": c.depth(), "monotone": c.is_monotone(),
            },
            "witness_weights": [w_lo, w_hi],
            "witnesses_ok": witnesses_ok,
        }),
        csv: bands.clone(),
        artifacts: vec![
            ("circuit.net".into(), c.to_netlist()),
            ("plan.json".into(), plan_json),
            ("bands.csv".into(), bands),
        ],
        notes: vec![],
        code: exit::OK,
    })
}

#[derive(Serialize)]
struct VerifyResult {
    n: u32,
    epsilon: f64,
    mode: Mode,
    /// Disagreement with majority.
    estimate: f64,
    ci_lo: f64,
    ci_hi: f64,
    disagreements: u64,
    trials: u64,
    seed: Option<u64>,
    pass: bool,
}

pub(super) fn verify(cfg: &RunConfig, path: &Path, eps: f64, mode: Mode) -> Result<Outcome> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::Usage(format!("epsilon {eps} is outside [0, 1]")));
    }
    let c = io::load_netlist(path)?;
    let n = c.num_inputs();
    let trials = cfg.trials.unwrap_or(VERIFY_TRIALS);
    let am = match mode {
        Mode::Exact => {
            let max_n = cfg.max_n.unwrap_or(MAX_EXACT_VARS);
            if n > max_n {
                return Err(cap(format!("exact agreement on {n} variables"), n, max_n));
            }
            AgreementMode::Exact
        }
        Mode::Mc => {
            if trials == 0 {
                return Err(Error::Usage("--trials must be positive".into()));
            }
            AgreementMode::MonteCarlo { trials, seed: cfg.seed }
        }
    };
    let cert = par::certify_approx_majority(&c, eps, am)?;
    let e = cert.disagreement;
    let result = VerifyResult {
        n,
        epsilon: eps,
        mode,
        estimate: e.estimate,
        ci_lo: e.ci_lo,
        ci_hi: e.ci_hi,
        disagreements: e.successes,
        trials: e.trials,
        seed: matches!(mode, Mode::Mc).then_some(cfg.seed),
        pass: cert.pass,
    };
    Ok(Outcome {
        meta: RunMeta::new(
            "verify",
            cfg.seed,
            matches!(mode, Mode::Mc).then_some(trials),
            json!({"netlist": path.display().to_string(), "epsilon": eps, "mode": mode}),
        ),
        csv: to_csv(std::slice::from_ref(&result))?,
        result: to_value(&result)?,
        artifacts: vec![],
        notes: vec![format!(
            "{}: disagreement {} (ci {}..{})",
            if cert.pass { "PASS" } else { "FAIL" },
            e.estimate,
            e.ci_lo,
            e.ci_hi
        )],
        code: if cert.pass { exit::OK } else { exit::FAIL },
    })
}

#[derive(Serialize)]
struct DegreeResult {
    function: String,
    n: u32,
    epsilon: f64,
    budget: u64,
    degree: usize,
    distance: u64,
    exhausted: bool,
    witness: String,
}

#[derive(Serialize)]
struct DegreeRow {
    n: u32,
    epsilon: f64,
    degree: usize,
}

pub(super) fn degree(
    cfg: &RunConfig,
    hex: Option<&str>,
    vars: Option<u32>,
    netlist: Option<&Path>,
    majority: &[u32],
    eps: f64,
) -> Result<Outcome> {
    let max_n = cfg.max_n.unwrap_or(MAX_DEGREE_VARS);
    let check = |n: u32| {
        if n > max_n {
            Err(cap(format!("exhaustive degree search on {n} variables"), n, max_n))
        } else {
            Ok(())
        }
    };
    let mut tables: Vec<(String, TruthTable)> = Vec::new();
    if let Some(h) = hex {
        let t = io::parse_hex_table(h, vars)?;
        check(t.num_vars())?;
        tables.push((format!("hex:{}", io::format_hex_table(&t)), t));
    }
    if let Some(p) = netlist {
        let c = io::load_netlist(p)?;
        check(c.num_inputs())?;
        if c.outputs().len() != 1 {
            return Err(polymaj_core::Error::MultiOutput(c.outputs().len()).into());
        }
        let t = c.truth_table(0)?;
        tables.push((format!("hex:{}", io::format_hex_table(&t)), t));
    }
    for &n in majority {
        check(n)?;
        tables.push((format!("MAJ_{n}"), TruthTable::majority(n)));
    }
    if tables.is_empty() {
        return Err(Error::Usage("give --hex, --netlist or --majority".into()));
    }
    let results = tables
        .into_iter()
        .map(|(function, t)| {
            let c = par::min_approx_degree(&t, eps)?;
            Ok(DegreeResult {
                function,
                n: c.n,
                epsilon: c.epsilon,
                budget: c.budget,
                degree: c.degree,
                distance: c.distance,
                exhausted: c.exhausted,
                witness: c.witness.to_string(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<DegreeRow> =
        results.iter().map(|r| DegreeRow { n: r.n, epsilon: r.epsilon, degree: r.degree }).collect();
    Ok(Outcome {
        meta: RunMeta::new("degree", cfg.seed, None, json!({"epsilon": eps, "max_n": max_n})),
        result: to_value(&results)?,
        csv: to_csv(&rows)?,
        artifacts: vec![("degrees.csv".into(), to_csv(&rows)?)],
        notes: vec![],
        code: exit::OK,
    })
}
