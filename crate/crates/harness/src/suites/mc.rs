//! Monte Carlo studies along an N ladder: diagonal refinement sums, the
//! Brownian chaos expansion and the covariance of Itô integrals.

use stratolevy::diagonal::for_each_distinct_tuple;
use stratolevy::integrals::{ito_integral, stratonovich_integral, symmetrize};
use stratolevy::levy::{moments, replica_seed, simulate, LevyPath};
use stratolevy::measures::{diagonal_product_refinement, AtomFamily};
use stratolevy::special::{brownian_hu_meyer, QuadraticVariation};
use stratolevy::GridFunction;

use crate::config::{validate_ladder, ExperimentConfig, Statistic};
use crate::error::HarnessError;
use crate::report::{ReportRow, SuiteReport};
use crate::runner::{mean_and_stderr, Runner};

const SUITE: &str = "mc";

/// Ratio of final mean to standard error accepted for a vanishing gap.
pub const GAP_SE_FACTOR: f64 = 10.0;
/// Standard errors allowed between a sample mean and its exact target.
pub const TARGET_SE_FACTOR: f64 = 3.0;

struct Ctx<'a> {
    cfg: &'a ExperimentConfig,
    runner: &'a Runner,
    finest: usize,
}

impl Ctx<'_> {
    fn path(&self, replica: u64) -> Result<LevyPath, HarnessError> {
        Ok(simulate(&self.cfg.model, self.finest, replica_seed(self.cfg.seed, replica))?)
    }

    fn row(&self, statistic: &str, value: f64) -> ReportRow {
        ReportRow::info(SUITE, self.cfg.model.name(), statistic, value).n(self.cfg.n).replicas(self.cfg.replicas)
    }

    fn check(&self, statistic: &str, value: f64, tolerance: f64) -> ReportRow {
        ReportRow::check(SUITE, self.cfg.model.name(), statistic, value, tolerance)
            .n(self.cfg.n)
            .replicas(self.cfg.replicas)
    }

    /// One vector of per-N samples per replica, transposed to per-N columns.
    fn columns<F>(&self, f: F) -> Result<Vec<Vec<f64>>, HarnessError>
    where
        F: Fn(&LevyPath) -> Result<Vec<f64>, HarnessError> + Sync + Send,
    {
        let per_replica: Vec<Vec<f64>> =
            self.runner.map(self.cfg.replicas as u64, |r| f(&self.path(r)?)).into_iter().collect::<Result<_, _>>()?;
        let width = per_replica.first().map_or(0, Vec::len);
        Ok((0..width).map(|k| per_replica.iter().map(|v| v[k]).collect()).collect())
    }

    /// Per-N gap rows, a monotonicity check and the final `mean ≤ 10·SE` check.
    fn gap_rows(&self, name: &str, columns: &[Vec<f64>], rows: &mut Vec<ReportRow>) -> (f64, f64) {
        let stats: Vec<(f64, f64)> = columns.iter().map(|c| mean_and_stderr(c)).collect();
        for (&cells, &(m, se)) in self.cfg.ladder.iter().zip(&stats) {
            rows.push(self.row(name, m).cells(cells).stderr(se));
        }
        let increases = stats.windows(2).filter(|w| !(w[1].0 < w[0].0)).count();
        rows.push(self.check(&format!("{name}_increases"), increases as f64, 0.0));
        let (m, se) = *stats.last().expect("nonempty ladder");
        let finest = *self.cfg.ladder.last().expect("nonempty ladder");
        rows.push(self.check(&format!("{name}_final_vs_10se"), m, GAP_SE_FACTOR * se).cells(finest).stderr(se));
        (m, se)
    }
}

pub fn run_mc_convergence(cfg: &ExperimentConfig, runner: &Runner) -> Result<SuiteReport, HarnessError> {
    validate_ladder(&cfg.ladder)?;
    let ctx = Ctx { cfg, runner, finest: *cfg.ladder.last().expect("validated") };
    let mut rows = Vec::new();
    if cfg.wants(Statistic::Diagonal) {
        diagonal_rows(&ctx, &mut rows)?;
    }
    let brownian = cfg.model.name() == "brownian";
    if brownian && cfg.wants(Statistic::BrownianHuMeyer) {
        brownian_rows(&ctx, &mut rows)?;
    } else if !brownian && cfg.statistics.contains(&Statistic::BrownianHuMeyer) {
        return Err(HarnessError::Config("brownian_hu_meyer needs the brownian model".into()));
    }
    if cfg.model.is_centered() && cfg.wants(Statistic::Covariance) {
        covariance_rows(&ctx, &mut rows)?;
    } else if !cfg.model.is_centered() && cfg.statistics.contains(&Statistic::Covariance) {
        return Err(HarnessError::Config("covariance needs a centered model".into()));
    }
    Ok(SuiteReport { rows, failures: Vec::new() })
}

/// `E[(Σ_k Π_i ΔX^(r_i)(I_k) − X^(Σr)_T)²]` over the dyadic cells of each N.
fn diagonal_rows(ctx: &Ctx, rows: &mut Vec<ReportRow>) -> Result<(), HarnessError> {
    let levels: Vec<u32> = ctx.cfg.ladder.iter().map(|n| n.trailing_zeros()).collect();
    let all: Vec<usize> = (0..ctx.finest).collect();
    let columns = ctx.columns(|path| {
        let s = diagonal_product_refinement(path, &ctx.cfg.orders, &all, &levels)?;
        Ok(s.values.iter().map(|v| (v - s.reference).powi(2)).collect())
    })?;
    ctx.gap_rows("diagonal_l2_gap", &columns, rows);
    Ok(())
}

/// `E[(I^S_n(f) − Σ_j c_{n,j} I_{n−2j}(tr_j f))²]` with the deterministic
/// quadratic variation, for the configured tensor-power integrand.
fn brownian_rows(ctx: &Ctx, rows: &mut Vec<ReportRow>) -> Result<(), HarnessError> {
    let cfg = ctx.cfg;
    let horizon = cfg.model.horizon();
    let grids: Vec<GridFunction<f64>> =
        cfg.ladder.iter().map(|&cells| cfg.integrand.grid(cfg.n, cells, horizon)).collect::<Result<_, _>>()?;
    let columns = ctx.columns(|path| {
        grids
            .iter()
            .map(|f| {
                let coarse = path.coarsen_to(f.num_cells())?;
                let strat = stratonovich_integral(f, &AtomFamily::from_path_increments(&coarse))?;
                let hm = brownian_hu_meyer(f, &coarse, QuadraticVariation::Deterministic)?;
                Ok((strat - hm).powi(2))
            })
            .collect()
    })?;
    let (m, se) = ctx.gap_rows("brownian_hu_meyer_gap", &columns, rows);
    if cfg.n == 2 {
        // the gap is Σ_c g_c² ((ΔX_c)² − σ²h); its second moment is 2σ⁴h²Σg⁴
        let cells = ctx.finest;
        let h = horizon / cells as f64;
        let sigma2 = cfg.model.gaussian_variance_rate();
        let g = cfg.integrand.samples(cells, horizon);
        let predicted = 2.0 * sigma2 * sigma2 * h * h * g.iter().map(|x| x.powi(4)).sum::<f64>();
        rows.push(ctx.row("brownian_hu_meyer_gap_predicted", predicted).cells(cells));
        rows.push(
            ctx.check("brownian_hu_meyer_gap_vs_predicted", (m - predicted).abs(), TARGET_SE_FACTOR * se)
                .cells(cells)
                .stderr(se),
        );
    }
    Ok(())
}

/// A non-symmetric product integrand: `Π_k (1 + (k+1) t_k / T)`.
fn skew_product(arity: usize, cells: usize, horizon: f64) -> Result<GridFunction<f64>, HarnessError> {
    let factors =
        (0..arity).map(|k| (1..=cells).map(|c| 1.0 + (k + 1) as f64 * c as f64 / cells as f64).collect()).collect();
    Ok(GridFunction::product(horizon, factors)?)
}

/// `n! Σ_{t distinct} f̃(t) g̃(t)`.
fn distinct_pairing(f: &GridFunction<f64>, g: &GridFunction<f64>) -> Result<f64, HarnessError> {
    let (fs, gs) = (symmetrize(f)?, symmetrize(g)?);
    let mut total = 0.0;
    for_each_distinct_tuple(f.num_cells(), f.arity(), |t| total += fs.value(t) * gs.value(t));
    Ok(total * (1..=f.arity()).product::<usize>() as f64)
}

/// `E[I_n(f) I_n(g)] = K_2^n h^n n! Σ f̃g̃` and `E[I_n(f) I_{n+1}(g')] = 0`.
fn covariance_rows(ctx: &Ctx, rows: &mut Vec<ReportRow>) -> Result<(), HarnessError> {
    let cfg = ctx.cfg;
    let n = cfg.n;
    let horizon = cfg.model.horizon();
    let k2 = moments(&cfg.model, 2)?.get(2)?;
    let mut setups = Vec::new();
    for &cells in &cfg.ladder {
        let f = cfg.integrand.grid(n, cells, horizon)?;
        let g = skew_product(n, cells, horizon)?;
        let g_next = skew_product(n + 1, cells, horizon)?;
        let h = horizon / cells as f64;
        let target = (k2 * h).powi(n as i32) * distinct_pairing(&f, &g)?;
        setups.push((f, g, g_next, target));
    }
    let ones_n = vec![1; n];
    let ones_next = vec![1; n + 1];
    let columns = ctx.columns(|path| {
        let mut out = Vec::with_capacity(2 * setups.len());
        for (f, g, g_next, _) in &setups {
            let atoms = AtomFamily::from_path_increments(&path.coarsen_to(f.num_cells())?);
            let i_f = ito_integral(f, &ones_n, &atoms)?;
            out.push(i_f * ito_integral(g, &ones_n, &atoms)?);
            out.push(i_f * ito_integral(g_next, &ones_next, &atoms)?);
        }
        Ok(out)
    })?;
    for (k, (&cells, (_, _, _, target))) in cfg.ladder.iter().zip(&setups).enumerate() {
        let (same, se_same) = mean_and_stderr(&columns[2 * k]);
        let (cross, se_cross) = mean_and_stderr(&columns[2 * k + 1]);
        rows.push(ctx.row("covariance_same_order_target", *target).cells(cells));
        rows.push(ctx.row("covariance_same_order", same).cells(cells).stderr(se_same));
        rows.push(
            ctx.check("covariance_same_order_deviation", (same - target).abs(), TARGET_SE_FACTOR * se_same)
                .cells(cells)
                .stderr(se_same),
        );
        rows.push(ctx.row("covariance_next_order", cross).cells(cells).stderr(se_cross));
        rows.push(
            ctx.check("covariance_next_order_deviation", cross.abs(), TARGET_SE_FACTOR * se_cross)
                .cells(cells)
                .stderr(se_cross),
        );
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(text: &str) -> ExperimentConfig {
        ExperimentConfig::parse(text).unwrap()
    }

    #[test]
    fn small_brownian_run_is_deterministic() {
        let cfg = config("model = brownian\nn = 2\nladder = 4, 8, 16\nreplicas = 50\nseed = 3\n");
        let a = run_mc_convergence(&cfg, &Runner::serial()).unwrap();
        let b = run_mc_convergence(&cfg, &Runner::with_threads(3).unwrap()).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
        let gaps: Vec<f64> = a.rows.iter().filter(|r| r.statistic == "diagonal_l2_gap").map(|r| r.value).collect();
        assert_eq!(gaps.len(), 3);
        assert!(a.row("covariance_same_order_deviation").is_some());
        assert!(a.row("brownian_hu_meyer_gap_predicted").is_some());
    }

    #[test]
    fn statistics_must_fit_the_model() {
        let cfg = config("model = gamma\nladder = 4\nreplicas = 2\nstatistics = covariance\n");
        assert!(run_mc_convergence(&cfg, &Runner::serial()).is_err());
        let cfg = config("model = compensated_poisson\nladder = 4\nreplicas = 2\nstatistics = brownian_hu_meyer\n");
        assert!(run_mc_convergence(&cfg, &Runner::serial()).is_err());
        let cfg = config("model = gamma\nladder = 4, 8\nreplicas = 5\n");
        let r = run_mc_convergence(&cfg, &Runner::serial()).unwrap();
        assert!(r.row("covariance_same_order").is_none());
        assert!(r.row("diagonal_l2_gap").is_some());
    }

    #[test]
    fn distinct_pairing_by_hand() {
        // n = 2, N = 2: f ≡ 1, g(t) = (1 + t_1)(1 + 2 t_2) on right endpoints
        let f = GridFunction::constant(2, 2, 1.0, 1.0).unwrap();
        let g = skew_product(2, 2, 1.0).unwrap();
        // off-diagonal tuples (0,1), (1,0): g = 1.5·3 and 2·2, so g̃ = 4.25 on both
        assert!((distinct_pairing(&f, &g).unwrap() - 17.0).abs() < 1e-12);
    }
}
