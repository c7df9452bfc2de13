//! Pathwise integrals of driftless subordinators: exact jump-measure sums
//! against grid Itô integrals built from the variation atoms.

use stratolevy::integrals::ito_integral;
use stratolevy::levy::{replica_seed, simulate};
use stratolevy::measures::AtomFamily;
use stratolevy::scalar::relative_residual;
use stratolevy::special::{
    jump_measure_hu_meyer, jump_measure_ito, jump_measure_stratonovich, truncation_bias_bound, JumpMeasure,
};

use crate::config::{validate_ladder, ExperimentConfig};
use crate::error::HarnessError;
use crate::report::{ReportRow, SuiteReport};
use crate::runner::{mean_and_stderr, Runner};

const SUITE: &str = "pathwise";

/// Largest accepted mean ratio of successive errors along the ladder.
pub const ERROR_RATIO_TOLERANCE: f64 = 0.75;
pub const HU_MEYER_TOLERANCE: f64 = 1e-10;

struct PathOutcome {
    errors: Vec<f64>,
    hu_meyer_residual: f64,
    bias_bound: f64,
}

/// Mean of `e_{k+1}/e_k` over steps with `e_k > 0`; `None` if there are none.
fn mean_ratio(errors: &[f64]) -> Option<f64> {
    let ratios: Vec<f64> = errors.windows(2).filter(|w| w[0] > 0.0).map(|w| w[1] / w[0]).collect();
    (!ratios.is_empty()).then(|| ratios.iter().sum::<f64>() / ratios.len() as f64)
}

pub fn run_subordinator_pathwise(cfg: &ExperimentConfig, runner: &Runner) -> Result<SuiteReport, HarnessError> {
    if !cfg.model.is_driftless_subordinator() {
        return Err(HarnessError::Config(format!(
            "the pathwise suite needs a driftless subordinator, got `{}`",
            cfg.model.name()
        )));
    }
    validate_ladder(&cfg.ladder)?;
    let finest = *cfg.ladder.last().expect("validated");
    let horizon = cfg.model.horizon();
    let max_order = *cfg.orders.iter().max().expect("n >= 1");
    let f = cfg.integrand.time_fn(horizon);
    let sup_f = cfg.integrand.sup_abs(cfg.n, horizon);
    let grids =
        cfg.ladder.iter().map(|&cells| cfg.integrand.grid(cfg.n, cells, horizon)).collect::<Result<Vec<_>, _>>()?;

    let outcomes: Vec<PathOutcome> = runner
        .map(cfg.replicas as u64, |r| -> Result<PathOutcome, HarnessError> {
            let path = simulate(&cfg.model, finest, replica_seed(cfg.seed, r))?;
            let jm = JumpMeasure::from_path(&path)?;
            let exact = jump_measure_ito(&f, &cfg.orders, &jm)?;
            let mut errors = Vec::with_capacity(grids.len());
            for g in &grids {
                let atoms = AtomFamily::from_path_variations(&path.coarsen_to(g.num_cells())?, max_order)?;
                errors.push((exact - ito_integral(g, &cfg.orders, &atoms)?).abs());
            }
            let hm = jump_measure_hu_meyer(&f, cfg.n, &jm)?;
            let strat = jump_measure_stratonovich(&f, cfg.n, &jm)?;
            Ok(PathOutcome {
                errors,
                hu_meyer_residual: relative_residual(&hm, &strat),
                bias_bound: truncation_bias_bound(cfg.n, cfg.model.truncation_bias_bound(), sup_f, jm.mass()),
            })
        })
        .into_iter()
        .collect::<Result<_, _>>()?;

    let model = cfg.model.name();
    let paths = cfg.replicas;
    let row = |stat: &str, v: f64| ReportRow::info(SUITE, model, stat, v).n(cfg.n).replicas(paths);
    let check = |stat: &str, v: f64, tol: f64| ReportRow::check(SUITE, model, stat, v, tol).n(cfg.n).replicas(paths);
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (k, &cells) in cfg.ladder.iter().enumerate() {
        let column: Vec<f64> = outcomes.iter().map(|o| o.errors[k]).collect();
        let (m, se) = mean_and_stderr(&column);
        rows.push(row("pathwise_ito_error", m).cells(cells).stderr(se));
    }
    let ratios: Vec<f64> = outcomes.iter().filter_map(|o| mean_ratio(&o.errors)).collect();
    rows.push(row("degenerate_paths", (outcomes.len() - ratios.len()) as f64));
    if cfg.ladder.len() > 1 {
        let (m, se) = mean_and_stderr(&ratios);
        // every path degenerate means every error vanished, which passes
        let value = if ratios.is_empty() { 0.0 } else { m };
        let mut r = check("pathwise_error_ratio_mean", value, ERROR_RATIO_TOLERANCE);
        if ratios.len() > 1 {
            r = r.stderr(se);
        }
        rows.push(r);
    }
    let worst = outcomes.iter().map(|o| o.hu_meyer_residual).fold(0.0, f64::max);
    rows.push(check("pathwise_hu_meyer_residual", worst, HU_MEYER_TOLERANCE));
    for (r, o) in outcomes.iter().enumerate() {
        if !(o.hu_meyer_residual <= HU_MEYER_TOLERANCE) {
            failures.push(format!(
                "pathwise_hu_meyer_residual: {} on path {r} (seed {})",
                o.hu_meyer_residual,
                replica_seed(cfg.seed, r as u64)
            ));
        }
    }
    if cfg.model.truncation_bias_bound() > 0.0 {
        let bound = outcomes.iter().map(|o| o.bias_bound).fold(0.0, f64::max);
        rows.push(row("truncation_bias_bound", bound));
    }
    Ok(SuiteReport { rows, failures })
}
