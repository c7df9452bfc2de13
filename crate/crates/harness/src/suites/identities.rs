//! Randomised exact discrete identities (`n ≤ 4`, `N ≤ 4`).

use rand::Rng;
use stratolevy::diagonal::{CellRectangle, CellSet};
use stratolevy::integrals::{
    hu_meyer_evaluate, hu_meyer_symmetric_evaluate, iterated_form, ito_integral, stratonovich_integral, symmetrize,
};
use stratolevy::levy::{replica_seed, rng_from_seed};
use stratolevy::measures::{
    collapse_block_atoms, ito_measure, mobius_recover_ito, product_measure, AtomFamily, DiagonalSpec,
};
use stratolevy::partition::{partitions_above, Partition, Permutation};
use stratolevy::scalar::relative_residual;
use stratolevy::GridFunction;

use crate::error::HarnessError;
use crate::report::{ReportRow, SuiteReport};
use crate::runner::Runner;

pub const IDENTITY_TOLERANCE: f64 = 1e-10;
const SUITE: &str = "identities";

/// Names of the per-trial residuals, in reporting order.
pub const IDENTITY_STATISTICS: [&str; 8] = [
    "hu_meyer_residual",
    "hu_meyer_symmetric_residual",
    "product_vs_ito_sum_residual",
    "mobius_recovery_residual",
    "block_collapse_residual",
    "permutation_invariance_residual",
    "ito_symmetrization_residual",
    "iterated_form_residual",
];

/// One randomised case: sizes and the residual of every identity.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialOutcome {
    pub seed: u64,
    pub n: usize,
    pub cells: usize,
    pub residuals: [f64; 8],
}

fn uniform(rng: &mut impl Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.random_range(-1.0..=1.0)).collect()
}

fn random_partition(rng: &mut impl Rng, n: usize) -> Partition {
    let labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
    Partition::from_labels(&labels).expect("n >= 1")
}

/// Draws one case from `seed` and evaluates every identity.
pub fn identity_trial(seed: u64) -> Result<TrialOutcome, HarnessError> {
    let mut rng = rng_from_seed(seed);
    let n = rng.random_range(1..=4usize);
    let cells = rng.random_range(1..=4usize);
    let base = uniform(&mut rng, cells);
    let atoms = AtomFamily::multiplicative(base)?;
    let f = GridFunction::dense(n, cells, 1.0, uniform(&mut rng, cells.pow(n as u32)))?;
    let mut res = [0.0; 8];

    let strat = stratonovich_integral(&f, &atoms)?;
    res[0] = relative_residual(&hu_meyer_evaluate(&f, &atoms)?, &strat);

    let fs = symmetrize(&f)?;
    res[1] = relative_residual(&hu_meyer_symmetric_evaluate(&fs, &atoms)?, &stratonovich_integral(&fs, &atoms)?);

    // measure level, with a generic family of orders 1..4
    let generic = AtomFamily::registered((1..=4).map(|r| (r, uniform(&mut rng, cells))))?;
    let r: Vec<usize> = (0..n).map(|_| rng.random_range(1..=4)).collect();
    let pi = random_partition(&mut rng, n);
    let factors: Vec<Vec<usize>> = (0..n).map(|_| (0..cells).filter(|_| rng.random_bool(0.75)).collect()).collect();
    let spec = DiagonalSpec::new(CellSet::Rectangle(CellRectangle::new(factors)?), pi.clone())?;
    let mut ito_sum = 0.0;
    for sigma in partitions_above(&pi)? {
        ito_sum += ito_measure(&generic, &r, &spec.with_base(sigma)?)?;
    }
    res[2] = relative_residual(&product_measure(&generic, &r, &spec)?, &ito_sum);
    res[3] = relative_residual(&mobius_recover_ito(&generic, &r, &spec)?, &ito_measure(&generic, &r, &spec)?);

    let sigma = random_partition(&mut rng, n);
    let cube: Vec<usize> = (0..cells).filter(|_| rng.random_bool(0.75)).collect();
    let cube_spec = DiagonalSpec::new(CellSet::Rectangle(CellRectangle::cube(cube.clone(), n)?), sigma.clone())?;
    let ones = vec![1; n];
    let collapsed = collapse_block_atoms(&atoms, &ones, &sigma)?;
    res[4] = relative_residual(&product_measure(&atoms, &ones, &cube_spec)?, &collapsed.product_of_sums(&cube));

    let perms: Vec<Permutation> = Permutation::all(n).collect();
    let p = &perms[rng.random_range(0..perms.len())];
    let ro: Vec<usize> = (0..n).map(|_| rng.random_range(1..=3)).collect();
    let lhs = ito_integral(&f, &ro, &atoms)?;
    let rhs = ito_integral(&f.compose_permutation(&p.inverse())?, &p.permute(&ro)?, &atoms)?;
    res[5] = relative_residual(&lhs, &rhs);

    let k = rng.random_range(1..=3);
    let equal = vec![k; n];
    res[6] = relative_residual(&ito_integral(&f, &equal, &atoms)?, &ito_integral(&fs, &equal, &atoms)?);
    res[7] = relative_residual(&iterated_form(&f, &ro, &atoms)?, &lhs);

    Ok(TrialOutcome { seed, n, cells, residuals: res })
}

pub fn run_discrete_identity_suite(trials: usize, seed: u64, runner: &Runner) -> Result<SuiteReport, HarnessError> {
    if trials == 0 {
        return Err(HarnessError::Config("trials must be >= 1".into()));
    }
    let outcomes: Vec<TrialOutcome> =
        runner.map(trials as u64, |t| identity_trial(replica_seed(seed, t))).into_iter().collect::<Result<_, _>>()?;
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (k, name) in IDENTITY_STATISTICS.iter().enumerate() {
        let worst = outcomes.iter().map(|o| o.residuals[k]).fold(0.0, f64::max);
        rows.push(ReportRow::check(SUITE, "", *name, worst, IDENTITY_TOLERANCE).replicas(trials));
        for o in &outcomes {
            if !(o.residuals[k] <= IDENTITY_TOLERANCE) {
                failures.push(format!(
                    "{name}: residual {} at seed {} (n = {}, N = {})",
                    o.residuals[k], o.seed, o.n, o.cells
                ));
            }
        }
    }
    Ok(SuiteReport { rows, failures })
}
