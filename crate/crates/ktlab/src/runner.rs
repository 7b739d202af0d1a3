//! Scenario runner: builds the operator, sweeps the observables, computes
//! the dominating functions, dispatches the requested checks, and writes
//! one output directory per scenario:
//!
//!   decay.csv      t, kt_observable, mu_observable
//!   resolvent.csv  s, resolvent_norm
//!   m.csv          abscissa, value
//!   omega.csv      abscissa, value
//!   report.csv     theorem_id, verdict, observed_exponent, residual, constants
//!   report.txt     human-readable blocks plus run diagnostics
//!
//! Every pipeline is deterministic: fixed reduction order, fixed float
//! formatting, constants in sorted maps. Scenarios run concurrently but
//! never share output files, so the CSV tree is byte-stable across runs.

use crate::dominating::{fmt_g17, minimal_m, minimal_omega, FrequencyGrid, TimeGrid};
use crate::error::Result;
use crate::linalg;
use crate::operators::OperatorModel;
use crate::scenario::Scenario;
use crate::verify::{self, RateFitReport, TheoremId, Verdict};
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// Radius at which the asymptotic-analyticity proxy is evaluated during a
/// scenario run.
pub const PROXY_RADIUS: f64 = 2.0;

/// Relative drift admitted between an eigenvalue family truncated at N and
/// at 2N over the reported time range.
pub const TRUNCATION_DRIFT_LIMIT: f64 = 5e-3;

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    pub scenario_filter: Option<String>,
    pub strict: bool,
    pub refine: bool,
    pub seed: u64,
}

impl RunOptions {
    pub fn new(out_dir: impl Into<PathBuf>) -> Self {
        Self {
            out_dir: out_dir.into(),
            scenario_filter: None,
            strict: false,
            refine: false,
            seed: 0,
        }
    }

    pub fn strict(mut self, on: bool) -> Self {
        self.strict = on;
        self
    }

    pub fn refine(mut self, on: bool) -> Self {
        self.refine = on;
        self
    }

    pub fn filter(mut self, name: Option<String>) -> Self {
        self.scenario_filter = name;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

#[derive(Debug)]
pub struct ScenarioOutcome {
    pub name: String,
    pub reports: Vec<RateFitReport>,
    pub truncation_drift: Option<f64>,
}

/// Run the scenarios and return the process exit code:
/// 0 when every non-inconclusive check is consistent, 2 when any check is
/// inconsistent, 3 under --strict when the only failures are inconclusive,
/// 4 on I/O or computation failure.
pub fn run(scenarios: &[Scenario], opts: &RunOptions) -> i32 {
    let selected: Vec<&Scenario> = scenarios
        .iter()
        .filter(|s| {
            opts.scenario_filter
                .as_ref()
                .map_or(true, |f| &s.name == f)
        })
        .collect();

    let outcomes: Vec<Result<ScenarioOutcome>> = selected
        .par_iter()
        .map(|s| run_scenario(s, opts))
        .collect();

    let mut any_inconsistent = false;
    let mut any_inconclusive = false;
    let mut any_failed = false;
    for (scenario, outcome) in selected.iter().zip(&outcomes) {
        match outcome {
            Ok(o) => {
                for r in &o.reports {
                    match r.verdict {
                        Verdict::Inconsistent => any_inconsistent = true,
                        Verdict::Inconclusive => any_inconclusive = true,
                        Verdict::Consistent => {}
                    }
                }
            }
            Err(e) => {
                eprintln!("scenario `{}` failed: {e}", scenario.name);
                any_failed = true;
            }
        }
    }
    if any_failed {
        4
    } else if any_inconsistent {
        2
    } else if any_inconclusive && opts.strict {
        3
    } else {
        0
    }
}

/// Run one scenario and write its output directory.
pub fn run_scenario(scenario: &Scenario, opts: &RunOptions) -> Result<ScenarioOutcome> {
    let op = scenario.operator.build()?;
    let ppd = scenario.points_per_decade * if opts.refine { 2 } else { 1 };
    let fgrid = FrequencyGrid::new(scenario.s_min, 1.0, ppd)?.with_operator_candidates(&op);
    let tgrid = TimeGrid::new(1.0, scenario.t_max, ppd)?;

    let dir = opts.out_dir.join(&scenario.name);
    std::fs::create_dir_all(&dir)?;

    // decay.csv
    let ts = tgrid.ts();
    let kt = op.kt_observable_sweep(&ts)?;
    let mu = op.mu_observable_sweep(&scenario.measure, &ts)?;
    {
        let mut csv = String::from("t,kt_observable,mu_observable\n");
        for i in 0..ts.len() {
            let _ = writeln!(csv, "{},{},{}", fmt_g17(ts[i]), fmt_g17(kt[i]), fmt_g17(mu[i]));
        }
        std::fs::write(dir.join("decay.csv"), csv)?;
    }

    // resolvent.csv over the grid proper (candidates participate in m but
    // would blow the file up for 10^6-eigenvalue profiles).
    {
        let mut csv = String::from("s,resolvent_norm\n");
        for s in fgrid.points() {
            let _ = writeln!(csv, "{},{}", fmt_g17(s), fmt_g17(op.resolvent_norm(s)?));
        }
        std::fs::write(dir.join("resolvent.csv"), csv)?;
    }

    let m = minimal_m(&op, &fgrid)?;
    let omega = minimal_omega(&op, &tgrid)?;
    {
        let mut buf = Vec::new();
        m.write_csv(&mut buf)?;
        std::fs::write(dir.join("m.csv"), buf)?;
        let mut buf = Vec::new();
        omega.write_csv(&mut buf)?;
        std::fs::write(dir.join("omega.csv"), buf)?;
    }

    // checks, in the scenario's order
    let mut reports = Vec::with_capacity(scenario.checks.len());
    for &id in &scenario.checks {
        let report = dispatch_check(id, scenario, &op, &m, &omega, &fgrid, &tgrid)
            .unwrap_or_else(|e| {
                RateFitReport::new(
                    id,
                    BTreeMap::new(),
                    None,
                    0.0,
                    Verdict::Inconclusive,
                    format!("check did not run: {e}"),
                )
            });
        reports.push(report);
    }

    // report.csv
    {
        let mut csv =
            String::from("theorem_id,verdict,observed_exponent,residual,constants_json_like_text\n");
        for r in &reports {
            let _ = writeln!(csv, "{}", r.csv_row());
        }
        std::fs::write(dir.join("report.csv"), csv)?;
    }

    // diagnostics that belong to the run rather than to a single check
    let truncation_drift = truncation_study(scenario, &ts, &kt)?;
    let oracle_note = matrix_norm_cross_check(&op, opts.seed);

    // report.txt
    {
        let mut txt = String::new();
        let _ = writeln!(txt, "scenario: {}", scenario.name);
        let _ = writeln!(txt, "operator: {}", op.label());
        let _ = writeln!(txt, "measure: {}", scenario.measure);
        let _ = writeln!(
            txt,
            "grids: s in [{:.3e}, 1], t in (1, {:.3e}], {} points/decade{}",
            scenario.s_min,
            scenario.t_max,
            ppd,
            if opts.refine { " (refined)" } else { "" }
        );
        if let Some(drift) = truncation_drift {
            let _ = writeln!(
                txt,
                "truncation study: max relative drift {:.3e} between N and 2N ({})",
                drift,
                if drift < TRUNCATION_DRIFT_LIMIT {
                    "ok"
                } else {
                    "EXCEEDS LIMIT"
                }
            );
        }
        if let Some(note) = oracle_note {
            let _ = writeln!(txt, "{note}");
        }
        let _ = writeln!(txt);
        for r in &reports {
            let _ = writeln!(txt, "{}", r.text_block());
        }
        std::fs::write(dir.join("report.txt"), txt)?;
    }

    Ok(ScenarioOutcome {
        name: scenario.name.clone(),
        reports,
        truncation_drift,
    })
}

fn dispatch_check(
    id: TheoremId,
    scenario: &Scenario,
    op: &OperatorModel,
    m: &crate::dominating::SampledMonotoneFunction,
    omega: &crate::dominating::SampledMonotoneFunction,
    fgrid: &FrequencyGrid,
    tgrid: &TimeGrid,
) -> Result<RateFitReport> {
    match id {
        TheoremId::MLowerBound => Ok(verify::check_m_lower(op, m)),
        TheoremId::ResolventBound23 => verify::check_resolvent_bound(op, omega, scenario.c, fgrid),
        TheoremId::LowerBound24 => verify::check_lower_bound(op, m, tgrid, &scenario.c_scan),
        TheoremId::UpperBound35 => verify::check_upper_bound(op, m, scenario.epsilon, tgrid),
        TheoremId::LogCharacterization25 => {
            verify::check_log_characterization(m, op, scenario.log_c, tgrid)
        }
        TheoremId::Dichotomy22 => verify::check_dichotomy(op, tgrid),
        TheoremId::S0InftyProxy31 => verify::estimate_s0_proxy(op, PROXY_RADIUS),
        TheoremId::MuDecay34 => verify::check_mu_decay(op, &scenario.measure, tgrid),
    }
}

/// Compare the decay observable of a truncated eigenvalue family against
/// the same family truncated at twice the size, on a subsample of the
/// time grid. Returns None for families without a meaningful doubling.
fn truncation_study(scenario: &Scenario, ts: &[f64], kt: &[f64]) -> Result<Option<f64>> {
    let doubled = match scenario.operator.build_doubled() {
        Some(res) => res?,
        None => return Ok(None),
    };
    let sub_ts: Vec<f64> = ts.iter().copied().step_by(8).collect();
    let sub_kt: Vec<f64> = kt.iter().copied().step_by(8).collect();
    let kt2 = doubled.kt_observable_sweep(&sub_ts)?;
    let mut drift = 0.0f64;
    for (a, b) in sub_kt.iter().zip(&kt2) {
        let scale = a.abs().max(b.abs());
        if scale > 1e-280 {
            drift = drift.max((a - b).abs() / scale);
        }
    }
    Ok(Some(drift))
}

/// For matrix scenarios, cross-check the production norm route (full
/// decomposition) against seeded power iteration on A R(1,A).
fn matrix_norm_cross_check(op: &OperatorModel, seed: u64) -> Option<String> {
    let m = match op {
        OperatorModel::Matrix(m) => m,
        OperatorModel::Diagonal(_) => return None,
    };
    let b = m.kt_generator().ok()?;
    let full = linalg::largest_singular_value(&b);
    let power = linalg::largest_singular_value_power(&b, seed, 1e-13, 50_000);
    let rel = (full - power).abs() / full.max(1e-300);
    Some(format!(
        "norm oracle cross-check (seed {seed}): svd {:.12e}, power iteration {:.12e}, rel diff {:.3e}",
        full, power, rel
    ))
}

/// Load a config and run it; convenience wrapper used by the binary.
pub fn run_config(config: &Path, opts: &RunOptions) -> i32 {
    let scenarios = match crate::scenario::parse_config(config) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("config error: {e}");
            return 4;
        }
    };
    run(&scenarios, opts)
}
