//! Closed forms for particular Lévy processes: the Brownian Hu–Meyer
//! formula, the Poisson reduction `X^(n) = X + λt`, and pathwise
//! integrals against the jump measure of a subordinator.

use crate::error::{check_budget, invalid, Result};
use crate::integrals::{ito_integral_rows, GridFunction, Symmetry};
use crate::levy::{Jump, LevyPath};
use crate::partition::{block_size_vector, partitions, Partition};
use crate::scalar::Scalar;

/// A trace of a grid function: a function of the remaining arguments,
/// or a number when every argument was traced out.
#[derive(Clone, Debug)]
pub enum Traced<S> {
    Scalar(S),
    Function(GridFunction<S>),
}

impl<S: Scalar> Traced<S> {
    /// `I_m(g)` with the same atoms in every slot; `I_0(c) = c`.
    pub fn ito_integral(&self, atoms: &[S]) -> Result<S> {
        match self {
            Traced::Scalar(c) => Ok(c.clone()),
            Traced::Function(g) => {
                let rows = vec![atoms; g.arity()];
                ito_integral_rows(g, &rows)
            }
        }
    }
}

/// `g(s) = Σ_{t_1..t_j} f(s, t_1, t_1, .., t_j, t_j) Π_i w(t_i)`.
pub fn weighted_trace<S: Scalar>(f: &GridFunction<S>, j: usize, weights: &[S]) -> Result<Traced<S>> {
    let n = f.arity();
    if 2 * j > n {
        return invalid(format!("cannot trace {j} pairs out of {n} arguments"));
    }
    if f.symmetry() != Symmetry::Yes {
        return invalid("traces are defined for functions flagged symmetric");
    }
    if weights.len() != f.num_cells() {
        return invalid("one weight per cell is needed");
    }
    if j == 0 {
        return Ok(Traced::Function(f.clone()));
    }
    let free = n - 2 * j;
    // q_σ for σ = {{1},..,{free},{free+1,free+2},..}
    let labels: Vec<usize> = (0..free).chain((0..j).flat_map(|k| [free + k, free + k])).collect();
    let sigma = Partition::from_labels(&labels)?;
    let g = f.contract(&sigma)?;
    let rows: Vec<Vec<S>> =
        (0..g.arity()).map(|k| if k < free { vec![S::one(); f.num_cells()] } else { weights.to_vec() }).collect();
    if free == 0 {
        return Ok(Traced::Scalar(full_sum(&g, &rows)?));
    }
    check_budget(f.num_cells(), free + j)?;
    let nc = f.num_cells();
    let mut values = Vec::with_capacity(nc.pow(free as u32));
    let mut t = vec![0usize; free + j];
    crate::diagonal::for_each_tuple(nc, free, |s| {
        t[..free].copy_from_slice(s);
        let mut acc = S::zero();
        crate::diagonal::for_each_tuple(nc, j, |u| {
            t[free..].copy_from_slice(u);
            let mut w = g.value(&t);
            for &c in u {
                w *= weights[c].clone();
            }
            acc += w;
        });
        values.push(acc);
    });
    let out = GridFunction::dense(free, nc, f.horizon(), values)?.with_symmetry(Symmetry::Yes)?;
    Ok(Traced::Function(out))
}

fn full_sum<S: Scalar>(g: &GridFunction<S>, rows: &[Vec<S>]) -> Result<S> {
    check_budget(g.num_cells(), g.arity())?;
    let mut total = S::zero();
    crate::diagonal::for_each_tuple(g.num_cells(), g.arity(), |t| {
        let mut w = g.value(t);
        for (r, &c) in rows.iter().zip(t) {
            w *= r[c].clone();
        }
        total += w;
    });
    Ok(total)
}

/// The Brownian trace with pair weight `T/N` per cell.
pub fn brownian_trace<S: Scalar>(f: &GridFunction<S>, j: usize) -> Result<Traced<S>> {
    let w = vec![f.cell_width(); f.num_cells()];
    weighted_trace(f, j, &w)
}

/// `n! / ((n-2j)! j! 2^j)`.
pub fn brownian_coefficient(n: usize, j: usize) -> Result<u128> {
    if 2 * j > n || n > 30 {
        return invalid(format!("coefficient undefined for n = {n}, j = {j}"));
    }
    let fact = |k: usize| (1..=k as u128).product::<u128>();
    Ok(fact(n) / (fact(n - 2 * j) * fact(j) * (1u128 << j)))
}

/// How the order-2 measure is realised in the Brownian formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuadraticVariation {
    /// `σ² T/N` per cell, the limit value.
    Deterministic,
    /// `(ΔX_c)²`, the pre-limit realisation.
    Empirical,
}

/// `Σ_j n!/((n-2j)! j! 2^j) I_{n-2j}(trace_j f)` with the path increments
/// as order-1 atoms.
pub fn brownian_hu_meyer(f: &GridFunction<f64>, path: &LevyPath, variant: QuadraticVariation) -> Result<f64> {
    if !path.jumps().is_empty() || path.gaussian_variance_rate() <= 0.0 {
        return invalid("the Brownian formula needs a Brownian path");
    }
    if f.num_cells() != path.num_cells() {
        return invalid(format!("function has {} cells, path has {}", f.num_cells(), path.num_cells()));
    }
    let dx = path.base_increments();
    let weights: Vec<f64> = match variant {
        QuadraticVariation::Deterministic => vec![path.gaussian_variance_rate() * path.cell_width(); dx.len()],
        QuadraticVariation::Empirical => dx.iter().map(|x| x * x).collect(),
    };
    let n = f.arity();
    let mut total = 0.0;
    for j in 0..=n / 2 {
        let c = brownian_coefficient(n, j)? as f64;
        total += c * weighted_trace(f, j, &weights)?.ito_integral(dx)?;
    }
    Ok(total)
}

/// An integrator in a Poisson reduction pattern.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Integrator {
    DX,
    Dt,
}

/// Expands every slot of order `≥ 2` as `dX + dt`; order-1 slots stay `dX`.
pub fn poisson_reduce(r: &[usize]) -> Result<Vec<(i64, Vec<Integrator>)>> {
    if r.contains(&0) {
        return invalid("orders must be >= 1");
    }
    let split: Vec<usize> = (0..r.len()).filter(|&k| r[k] >= 2).collect();
    Ok((0..1u64 << split.len())
        .map(|mask| {
            let mut pattern = vec![Integrator::DX; r.len()];
            for (b, &k) in split.iter().enumerate() {
                // most significant slot varies slowest
                if mask >> (split.len() - 1 - b) & 1 == 1 {
                    pattern[k] = Integrator::Dt;
                }
            }
            (1, pattern)
        })
        .collect())
}

/// Intensity of a compensated Poisson path (unit jumps, drift `-λ`).
fn poisson_intensity(path: &LevyPath) -> Result<f64> {
    if path.gaussian_variance_rate() != 0.0 || path.jumps().iter().any(|j| j.size != 1.0) {
        return invalid("the Poisson reduction needs a compensated Poisson path");
    }
    let lambda = -path.drift_rate();
    if lambda <= 0.0 {
        return invalid("the Poisson reduction needs a compensated Poisson path");
    }
    Ok(lambda)
}

/// `Σ_patterns I(f)` with `dX` realised by the path increments and `dt` by
/// `λT/N` per cell.
pub fn poisson_reduced_integral(f: &GridFunction<f64>, r: &[usize], path: &LevyPath) -> Result<f64> {
    let lambda = poisson_intensity(path)?;
    if f.arity() != r.len() || f.num_cells() != path.num_cells() {
        return invalid("function shape does not match orders and path");
    }
    let dx = path.base_increments();
    let dt = vec![lambda * path.cell_width(); dx.len()];
    let mut total = 0.0;
    for (coef, pattern) in poisson_reduce(r)? {
        let rows: Vec<&[f64]> = pattern
            .iter()
            .map(|i| match i {
                Integrator::DX => dx,
                Integrator::Dt => &dt[..],
            })
            .collect();
        total += coef as f64 * ito_integral_rows(f, &rows)?;
    }
    Ok(total)
}

/// The jumps of a path: `φ = Σ_i ΔX_{T_i} δ_{T_i}` for a driftless subordinator.
#[derive(Clone, Debug, PartialEq)]
pub struct JumpMeasure {
    jumps: Vec<Jump>,
    horizon: f64,
}

impl JumpMeasure {
    pub fn new(jumps: Vec<Jump>, horizon: f64) -> Result<Self> {
        if !(horizon > 0.0) {
            return invalid("horizon must be positive");
        }
        if jumps.iter().any(|j| !(j.time > 0.0 && j.time <= horizon) || j.size == 0.0) {
            return invalid("jumps need times in (0,T] and nonzero sizes");
        }
        let mut times: Vec<f64> = jumps.iter().map(|j| j.time).collect();
        times.sort_by(f64::total_cmp);
        if times.windows(2).any(|w| w[0] == w[1]) {
            return invalid("jump times must be distinct");
        }
        Ok(Self { jumps, horizon })
    }

    pub fn from_path(path: &LevyPath) -> Result<Self> {
        Self::new(path.jumps().to_vec(), path.horizon())
    }

    pub fn jumps(&self) -> &[Jump] {
        &self.jumps
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// `Σ_i |ΔX_{T_i}|`.
    pub fn mass(&self) -> f64 {
        self.jumps.iter().map(|j| j.size.abs()).sum()
    }
}

/// `Σ_{i_1..i_n distinct} f(T_{i_1}, .., T_{i_n}) Π_k (ΔX_{T_{i_k}})^{r_k}`,
/// with `f` evaluated at the exact jump times.
pub fn jump_measure_ito(f: &dyn Fn(&[f64]) -> f64, r: &[usize], jm: &JumpMeasure) -> Result<f64> {
    let n = r.len();
    if n == 0 {
        return invalid("at least one integrator is needed");
    }
    check_budget(jm.jumps.len(), n)?;
    let mut used = vec![false; jm.jumps.len()];
    let mut times = vec![0.0; n];
    let mut total = 0.0;
    ito_rec(f, r, &jm.jumps, 0, 1.0, &mut times, &mut used, &mut total);
    Ok(total)
}

#[allow(clippy::too_many_arguments)]
fn ito_rec(
    f: &dyn Fn(&[f64]) -> f64,
    r: &[usize],
    jumps: &[Jump],
    depth: usize,
    weight: f64,
    times: &mut Vec<f64>,
    used: &mut [bool],
    total: &mut f64,
) {
    if depth == r.len() {
        *total += weight * f(times);
        return;
    }
    for (i, j) in jumps.iter().enumerate() {
        if used[i] {
            continue;
        }
        used[i] = true;
        times[depth] = j.time;
        ito_rec(f, r, jumps, depth + 1, weight * j.size.powi(r[depth] as i32), times, used, total);
        used[i] = false;
    }
}

/// `Σ_{i_1..i_n} f(T_{i_1}, .., T_{i_n}) Π_k ΔX_{T_{i_k}}`, all tuples.
pub fn jump_measure_stratonovich(f: &dyn Fn(&[f64]) -> f64, n: usize, jm: &JumpMeasure) -> Result<f64> {
    if n == 0 {
        return invalid("at least one integrator is needed");
    }
    check_budget(jm.jumps.len(), n)?;
    let mut total = 0.0;
    let mut times = vec![0.0; n];
    crate::diagonal::for_each_tuple(jm.jumps.len(), n, |t| {
        let mut w = 1.0;
        for (k, &i) in t.iter().enumerate() {
            times[k] = jm.jumps[i].time;
            w *= jm.jumps[i].size;
        }
        total += w * f(&times);
    });
    Ok(total)
}

/// `Σ_σ` of the pathwise Itô integrals of `f ∘ q_σ` with orders `σ̄`.
pub fn jump_measure_hu_meyer(f: &dyn Fn(&[f64]) -> f64, n: usize, jm: &JumpMeasure) -> Result<f64> {
    let mut total = 0.0;
    for sigma in partitions(n)? {
        let labels = sigma.labels().to_vec();
        let contracted = |x: &[f64]| {
            let t: Vec<f64> = labels.iter().map(|&l| x[l as usize]).collect();
            f(&t)
        };
        total += jump_measure_ito(&contracted, &block_size_vector(&sigma), jm)?;
    }
    Ok(total)
}

/// `ε n sup|f| m^{n-1}`: bias from discarding the jumps below `ε` for a
/// path of total jump mass `m`.
pub fn truncation_bias_bound(n: usize, cutoff: f64, sup_f: f64, mass: f64) -> f64 {
    cutoff * n as f64 * sup_f * mass.powi(n as i32 - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    #[test]
    fn coefficients() {
        assert_eq!(brownian_coefficient(2, 0).unwrap(), 1);
        assert_eq!(brownian_coefficient(2, 1).unwrap(), 1);
        assert_eq!(brownian_coefficient(3, 1).unwrap(), 3);
        assert_eq!(brownian_coefficient(4, 1).unwrap(), 6);
        assert_eq!(brownian_coefficient(4, 2).unwrap(), 3);
        assert!(brownian_coefficient(3, 2).is_err());
    }

    #[test]
    fn traces() {
        let g: Vec<Rational> = (1..=4).map(|k| Rational::from_ratio(k, 3)).collect();
        let f = GridFunction::tensor_power(1.0, g.clone(), 2).unwrap();
        let h = Rational::from_ratio(1, 4);
        let want: Rational = g.iter().map(|x| x.clone() * x.clone()).sum::<Rational>() * h;
        match brownian_trace(&f, 1).unwrap() {
            Traced::Scalar(v) => assert_eq!(v, want),
            Traced::Function(_) => panic!("expected a scalar"),
        }
        let f4 = GridFunction::tensor_power(1.0, g.clone(), 4).unwrap();
        let Traced::Function(t) = brownian_trace(&f4, 1).unwrap() else { panic!() };
        assert_eq!(t.arity(), 2);
        assert_eq!(t.value(&[1, 3]), g[1].clone() * g[3].clone() * want);
        assert!(brownian_trace(&f4, 3).is_err());
        let Traced::Function(same) = brownian_trace(&f4, 0).unwrap() else { panic!() };
        assert_eq!(same.value(&[0, 1, 2, 3]), f4.value(&[0, 1, 2, 3]));
        let asym = GridFunction::<f64>::from_cell_fn(2, 4, 1.0, |t| t[0] as f64).unwrap();
        assert!(brownian_trace(&asym, 1).is_err());
    }

    #[test]
    fn poisson_patterns() {
        assert_eq!(poisson_reduce(&[1, 1]).unwrap(), vec![(1, vec![Integrator::DX, Integrator::DX])]);
        assert_eq!(poisson_reduce(&[2]).unwrap(), vec![(1, vec![Integrator::DX]), (1, vec![Integrator::Dt])]);
        assert_eq!(poisson_reduce(&[2, 3]).unwrap().len(), 4);
        assert!(poisson_reduce(&[0]).is_err());
    }

    #[test]
    fn jump_measure_examples() {
        let f = |t: &[f64]| t.iter().map(|x| 1.0 + x).product::<f64>();
        let empty = JumpMeasure::new(vec![], 1.0).unwrap();
        assert_eq!(jump_measure_ito(&f, &[1, 1], &empty).unwrap(), 0.0);
        let one = JumpMeasure::new(vec![Jump { time: 0.25, size: 2.0 }], 1.0).unwrap();
        assert_eq!(jump_measure_ito(&f, &[1, 1], &one).unwrap(), 0.0);
        assert_eq!(jump_measure_stratonovich(&f, 3, &one).unwrap(), 1.25f64.powi(3) * 8.0);
        assert!(JumpMeasure::new(vec![Jump { time: 0.5, size: 1.0 }, Jump { time: 0.5, size: 2.0 }], 1.0).is_err());
        assert!(JumpMeasure::new(vec![Jump { time: 1.5, size: 1.0 }], 1.0).is_err());
    }

    #[test]
    fn bias_bound() {
        assert_eq!(truncation_bias_bound(2, 1e-4, 2.0, 3.0), 1e-4 * 2.0 * 2.0 * 3.0);
    }
}
