//! Multiple Itô and Stratonovich integrals of grid functions, and the
//! Hu–Meyer decomposition
//! `I^S_n(f) = Σ_{σ∈Π_n} I^{σ̄}_{#σ}(f ∘ q_σ)`.

use std::fmt;
use std::sync::Arc;

use crate::diagonal::{flat_index, for_each_tuple, CellSet};
use crate::error::{check_budget, invalid, Result, ENUMERATION_BUDGET};
use crate::levy::MomentTable;
use crate::measures::AtomFamily;
use crate::partition::{block_size_vector, count_by_type, mobius, partitions, Partition, Permutation, TypeVector};
use crate::scalar::{close, Scalar};

/// Largest arity accepted by the Hu–Meyer engine.
pub const MAX_HU_MEYER_N: usize = 7;

/// What is known about invariance under coordinate permutations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symmetry {
    Yes,
    No,
    Unknown,
}

type CellFn<S> = Arc<dyn Fn(&[usize]) -> S + Send + Sync>;

#[derive(Clone)]
enum Repr<S> {
    Dense(Vec<S>),
    Callable(CellFn<S>),
    /// `g_1 ⊗ .. ⊗ g_n`
    Product(Vec<Vec<S>>),
}

/// A function on `{0..N-1}^n`, i.e. on `[0,T]^n` sampled at right cell endpoints.
#[derive(Clone)]
pub struct GridFunction<S> {
    arity: usize,
    num_cells: usize,
    horizon: f64,
    repr: Repr<S>,
    symmetry: Symmetry,
}

impl<S> fmt::Debug for GridFunction<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.repr {
            Repr::Dense(_) => "dense",
            Repr::Callable(_) => "callable",
            Repr::Product(_) => "product",
        };
        f.debug_struct("GridFunction")
            .field("arity", &self.arity)
            .field("num_cells", &self.num_cells)
            .field("horizon", &self.horizon)
            .field("repr", &kind)
            .field("symmetry", &self.symmetry)
            .finish()
    }
}

fn check_shape(arity: usize, num_cells: usize, horizon: f64) -> Result<()> {
    if arity == 0 || num_cells == 0 {
        return invalid("grid functions need arity >= 1 and at least one cell");
    }
    if !(horizon > 0.0 && horizon.is_finite()) {
        return invalid(format!("horizon must be positive, got {horizon}"));
    }
    Ok(())
}

impl<S: Scalar> GridFunction<S> {
    /// Row-major values, `values[flat_index(t)] = f(t)`.
    pub fn dense(arity: usize, num_cells: usize, horizon: f64, values: Vec<S>) -> Result<Self> {
        check_shape(arity, num_cells, horizon)?;
        check_budget(num_cells, arity)?;
        if values.len() != num_cells.pow(arity as u32) {
            return invalid(format!("expected {}^{} values, got {}", num_cells, arity, values.len()));
        }
        Ok(Self { arity, num_cells, horizon, repr: Repr::Dense(values), symmetry: Symmetry::Unknown })
    }

    /// Lazily evaluated function of cell indices.
    pub fn from_cell_fn(
        arity: usize,
        num_cells: usize,
        horizon: f64,
        f: impl Fn(&[usize]) -> S + Send + Sync + 'static,
    ) -> Result<Self> {
        check_shape(arity, num_cells, horizon)?;
        Ok(Self { arity, num_cells, horizon, repr: Repr::Callable(Arc::new(f)), symmetry: Symmetry::Unknown })
    }

    /// Samples `f(t_1..t_n)` at the right endpoints `t = (k+1)T/N`.
    pub fn from_time_fn(
        arity: usize,
        num_cells: usize,
        horizon: f64,
        f: impl Fn(&[f64]) -> S + Send + Sync + 'static,
    ) -> Result<Self> {
        let h = horizon / num_cells as f64;
        Self::from_cell_fn(arity, num_cells, horizon, move |t| {
            let times: Vec<f64> = t.iter().map(|&k| (k + 1) as f64 * h).collect();
            f(&times)
        })
    }

    /// `g_1 ⊗ .. ⊗ g_n`, one factor per coordinate.
    pub fn product(horizon: f64, factors: Vec<Vec<S>>) -> Result<Self> {
        let num_cells = factors.first().map_or(0, Vec::len);
        check_shape(factors.len(), num_cells, horizon)?;
        if factors.iter().any(|g| g.len() != num_cells) {
            return invalid("all factors of a product function need the same cell count");
        }
        let symmetry = if factors.windows(2).all(|w| w[0] == w[1]) { Symmetry::Yes } else { Symmetry::Unknown };
        Ok(Self { arity: factors.len(), num_cells, horizon, repr: Repr::Product(factors), symmetry })
    }

    /// `g^{⊗n}`.
    pub fn tensor_power(horizon: f64, g: Vec<S>, arity: usize) -> Result<Self> {
        Self::product(horizon, vec![g; arity])
    }

    pub fn constant(arity: usize, num_cells: usize, horizon: f64, c: S) -> Result<Self> {
        check_shape(arity, num_cells, horizon)?;
        let mut factors = vec![vec![S::one(); num_cells]; arity];
        factors[0] = vec![c; num_cells];
        let mut f = Self::product(horizon, factors)?;
        f.symmetry = Symmetry::Yes;
        Ok(f)
    }

    /// `1_C` for a set of cell tuples.
    pub fn indicator(arity: usize, num_cells: usize, horizon: f64, set: CellSet) -> Result<Self> {
        Self::from_cell_fn(arity, num_cells, horizon, move |t| if set.contains(t) { S::one() } else { S::zero() })
    }

    /// Declares the symmetry; `Yes` is spot-checked on a sample of tuples.
    pub fn with_symmetry(mut self, symmetry: Symmetry) -> Result<Self> {
        if symmetry == Symmetry::Yes {
            self.spot_check_symmetry()?;
        }
        self.symmetry = symmetry;
        Ok(self)
    }

    fn spot_check_symmetry(&self) -> Result<()> {
        let total = (self.num_cells as u128).saturating_pow(self.arity as u32);
        // every tuple on small grids, a fixed pseudo-random sample otherwise
        let samples: Vec<Vec<usize>> = if total <= 4096 {
            let mut all = Vec::new();
            for_each_tuple(self.num_cells, self.arity, |t| all.push(t.to_vec()));
            all
        } else {
            let mut state: u64 = 0x2545_F491_4F6C_DD1D;
            (0..512)
                .map(|_| {
                    (0..self.arity)
                        .map(|_| {
                            state ^= state << 13;
                            state ^= state >> 7;
                            state ^= state << 17;
                            (state % self.num_cells as u64) as usize
                        })
                        .collect()
                })
                .collect()
        };
        for t in samples {
            let v = self.value(&t);
            for i in 0..self.arity.saturating_sub(1) {
                let mut s = t.clone();
                s.swap(i, i + 1);
                if !close(&self.value(&s), &v, 1e-12) {
                    return invalid(format!("function declared symmetric differs at {t:?} and {s:?}"));
                }
            }
        }
        Ok(())
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn num_cells(&self) -> usize {
        self.num_cells
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// `T/N` as a scalar.
    pub fn cell_width(&self) -> S {
        S::from_f64(self.horizon / self.num_cells as f64)
    }

    pub fn symmetry(&self) -> Symmetry {
        self.symmetry
    }

    pub fn is_product(&self) -> bool {
        matches!(self.repr, Repr::Product(_))
    }

    pub fn value(&self, t: &[usize]) -> S {
        debug_assert_eq!(t.len(), self.arity);
        match &self.repr {
            Repr::Dense(v) => v[flat_index(t, self.num_cells)].clone(),
            Repr::Callable(f) => f(t),
            Repr::Product(g) => {
                let mut acc = S::one();
                for (gk, &c) in g.iter().zip(t) {
                    acc *= gk[c].clone();
                }
                acc
            }
        }
    }

    /// All values in row-major order.
    pub fn to_dense(&self) -> Result<Vec<S>> {
        check_budget(self.num_cells, self.arity)?;
        if let Repr::Dense(v) = &self.repr {
            return Ok(v.clone());
        }
        let mut out = Vec::with_capacity(self.num_cells.pow(self.arity as u32));
        for_each_tuple(self.num_cells, self.arity, |t| out.push(self.value(t)));
        Ok(out)
    }

    /// Dense copy keeping shape and symmetry.
    pub fn densify(&self) -> Result<Self> {
        Ok(Self { repr: Repr::Dense(self.to_dense()?), ..self.clone() })
    }

    /// `f ∘ q_σ`, a function of `#σ` arguments. Products stay products;
    /// dense functions are materialised, callables wrapped.
    pub fn contract(&self, sigma: &Partition) -> Result<Self> {
        if sigma.n() != self.arity {
            return invalid(format!("σ = {sigma} does not match arity {}", self.arity));
        }
        let m = sigma.num_blocks();
        let symmetry =
            if self.symmetry == Symmetry::Yes && sigma.is_coarsest() { Symmetry::Yes } else { Symmetry::Unknown };
        let repr = match &self.repr {
            Repr::Product(g) => Repr::Product(
                sigma
                    .blocks()
                    .iter()
                    .map(|block| {
                        (0..self.num_cells)
                            .map(|c| {
                                let mut acc = S::one();
                                for &i in block {
                                    acc *= g[i][c].clone();
                                }
                                acc
                            })
                            .collect()
                    })
                    .collect(),
            ),
            Repr::Dense(_) => {
                let labels = sigma.labels().to_vec();
                let mut t = vec![0usize; self.arity];
                let mut out = Vec::with_capacity(self.num_cells.pow(m as u32));
                for_each_tuple(self.num_cells, m, |x| {
                    for (ti, &l) in t.iter_mut().zip(&labels) {
                        *ti = x[l as usize];
                    }
                    out.push(self.value(&t));
                });
                Repr::Dense(out)
            }
            Repr::Callable(f) => {
                let f = f.clone();
                let labels = sigma.labels().to_vec();
                Repr::Callable(Arc::new(move |x: &[usize]| {
                    let t: Vec<usize> = labels.iter().map(|&l| x[l as usize]).collect();
                    f(&t)
                }))
            }
        };
        Ok(Self { arity: m, num_cells: self.num_cells, horizon: self.horizon, repr, symmetry })
    }

    /// `f ∘ p`, i.e. `t ↦ f(p(t))`.
    pub fn compose_permutation(&self, p: &Permutation) -> Result<Self> {
        if p.n() != self.arity {
            return invalid(format!("permutation of size {} for a function of arity {}", p.n(), self.arity));
        }
        let repr = match &self.repr {
            // (g_1 ⊗ .. ⊗ g_n)(p(t)) = Π_i g_i(t_{p(i)})
            Repr::Product(g) => {
                let inv = p.inverse();
                Repr::Product((0..self.arity).map(|j| g[inv.apply(j)].clone()).collect())
            }
            _ => {
                let mut out = Vec::new();
                check_budget(self.num_cells, self.arity)?;
                for_each_tuple(self.num_cells, self.arity, |t| {
                    out.push(self.value(&p.permute(t).expect("sizes match")));
                });
                Repr::Dense(out)
            }
        };
        Ok(Self { repr, ..self.clone() })
    }
}

fn check_integrand<S: Scalar>(f: &GridFunction<S>, r: &[usize], atoms: &AtomFamily<S>) -> Result<()> {
    if f.arity != r.len() {
        return invalid(format!("order vector of length {} for a function of arity {}", r.len(), f.arity));
    }
    if f.num_cells != atoms.num_cells() {
        return invalid(format!("function has {} cells, atoms have {}", f.num_cells, atoms.num_cells()));
    }
    Ok(())
}

/// `Σ_{t distinct} f(t) Π_k a_k(t_k)` for explicit per-slot atom rows.
pub fn ito_integral_rows<S: Scalar>(f: &GridFunction<S>, rows: &[&[S]]) -> Result<S> {
    let n = f.arity;
    if rows.len() != n || rows.iter().any(|a| a.len() != f.num_cells) {
        return invalid("one atom row of N cells is needed per coordinate");
    }
    if let Repr::Product(g) = &f.repr {
        // inclusion–exclusion: Σ_τ μ(0̂,τ) Π_{B∈τ} Σ_c Π_{i∈B} g_i(c) a_i(c)
        let h: Vec<Vec<S>> = g
            .iter()
            .zip(rows)
            .map(|(gk, ak)| gk.iter().zip(ak.iter()).map(|(x, y)| x.clone() * y.clone()).collect())
            .collect();
        let bottom = Partition::finest(n)?;
        let mut total = S::zero();
        for tau in partitions(n)? {
            let mu = mobius(&bottom, &tau)?;
            let mut term = S::from_i64(mu);
            for block in tau.blocks() {
                let mut s = S::zero();
                for c in 0..f.num_cells {
                    let mut w = S::one();
                    for &i in &block {
                        w *= h[i][c].clone();
                    }
                    s += w;
                }
                term *= s;
            }
            total += term;
        }
        return Ok(total);
    }
    check_budget(f.num_cells, n)?;
    let mut t = vec![0usize; n];
    let mut used = vec![false; f.num_cells];
    let mut total = S::zero();
    distinct_rec(f, rows, 0, S::one(), &mut t, &mut used, &mut total);
    Ok(total)
}

fn distinct_rec<S: Scalar>(
    f: &GridFunction<S>,
    rows: &[&[S]],
    depth: usize,
    weight: S,
    t: &mut Vec<usize>,
    used: &mut [bool],
    total: &mut S,
) {
    if depth == t.len() {
        *total += weight * f.value(t);
        return;
    }
    for c in 0..used.len() {
        if used[c] || rows[depth][c].is_zero() {
            continue;
        }
        used[c] = true;
        t[depth] = c;
        distinct_rec(f, rows, depth + 1, weight.clone() * rows[depth][c].clone(), t, used, total);
        used[c] = false;
    }
}

/// The discrete multiple Itô integral `I^r_n(f) = Σ_{t distinct} f(t) Π_k a^(r_k)_{t_k}`.
pub fn ito_integral<S: Scalar>(f: &GridFunction<S>, r: &[usize], atoms: &AtomFamily<S>) -> Result<S> {
    check_integrand(f, r, atoms)?;
    let slots = atoms.slots(r)?;
    let rows: Vec<&[S]> = slots.iter().map(|c| c.as_ref()).collect();
    ito_integral_rows(f, &rows)
}

/// The same sum regrouped over the `n!` orderings
/// `t_{p(1)} < .. < t_{p(n)}` of the coordinates.
pub fn iterated_form<S: Scalar>(f: &GridFunction<S>, r: &[usize], atoms: &AtomFamily<S>) -> Result<S> {
    check_integrand(f, r, atoms)?;
    let n = f.arity;
    check_budget(f.num_cells, n)?;
    let slots = atoms.slots(r)?;
    let perms: Vec<Permutation> = Permutation::all(n).collect();
    let mut total = S::zero();
    let mut t = vec![0usize; n];
    for p in &perms {
        let mut sum = S::zero();
        for_each_increasing(f.num_cells, n, |s| {
            for (k, &c) in s.iter().enumerate() {
                t[p.apply(k)] = c;
            }
            let mut w = f.value(&t);
            for (a, &c) in slots.iter().zip(&t) {
                w *= a[c].clone();
            }
            sum += w;
        });
        total += sum;
    }
    Ok(total)
}

fn for_each_increasing(num_cells: usize, arity: usize, mut visit: impl FnMut(&[usize])) {
    if arity > num_cells {
        return;
    }
    let mut s: Vec<usize> = (0..arity).collect();
    loop {
        visit(&s);
        let mut k = arity;
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            if s[k] < num_cells - arity + k {
                s[k] += 1;
                for j in k + 1..arity {
                    s[j] = s[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// `f̃ = (1/n!) Σ_p f ∘ p`, returned dense and flagged symmetric.
pub fn symmetrize<S: Scalar>(f: &GridFunction<S>) -> Result<GridFunction<S>> {
    let n = f.arity;
    let fact: u128 = (1..=n as u128).product();
    let cells = (f.num_cells as u128).saturating_pow(n as u32);
    if fact.saturating_mul(cells) > ENUMERATION_BUDGET {
        return Err(crate::Error::BudgetExceeded { work: fact.saturating_mul(cells), limit: ENUMERATION_BUDGET });
    }
    if f.symmetry == Symmetry::Yes {
        return Ok(f.clone());
    }
    let perms: Vec<Permutation> = Permutation::all(n).collect();
    let scale = S::one() / S::from_i64(fact as i64);
    let mut out = Vec::with_capacity(cells as usize);
    for_each_tuple(f.num_cells, n, |t| {
        let mut s = S::zero();
        for p in &perms {
            s += f.value(&p.permute(t).expect("sizes match"));
        }
        out.push(s * scale.clone());
    });
    Ok(GridFunction { repr: Repr::Dense(out), symmetry: Symmetry::Yes, ..f.clone() })
}

/// `Σ_{t ∈ {0..N-1}^n} f(t) Π_k a^(1)_{t_k}`, the integral against `φ^{⊗n}`.
pub fn stratonovich_integral<S: Scalar>(f: &GridFunction<S>, atoms: &AtomFamily<S>) -> Result<S> {
    if f.num_cells != atoms.num_cells() {
        return invalid(format!("function has {} cells, atoms have {}", f.num_cells, atoms.num_cells()));
    }
    let a = atoms.atoms(1)?;
    if let Repr::Product(g) = &f.repr {
        let mut total = S::one();
        for gk in g {
            let mut s = S::zero();
            for (x, y) in gk.iter().zip(a.iter()) {
                s += x.clone() * y.clone();
            }
            total *= s;
        }
        return Ok(total);
    }
    // contract the last axis repeatedly
    let mut values = f.to_dense()?;
    let n_cells = f.num_cells;
    for _ in 0..f.arity {
        values = values
            .chunks(n_cells)
            .map(|row| {
                let mut s = S::zero();
                for (x, y) in row.iter().zip(a.iter()) {
                    s += x.clone() * y.clone();
                }
                s
            })
            .collect();
    }
    Ok(values.pop().expect("at least one value"))
}

/// One summand `coefficient · I^{orders}_{#σ}(f ∘ q_σ)` of the Hu–Meyer formula.
#[derive(Clone, Debug)]
pub struct HuMeyerTerm<S> {
    pub sigma: Partition,
    pub orders: Vec<usize>,
    pub contracted: GridFunction<S>,
    pub coefficient: u128,
}

impl<S: Scalar> HuMeyerTerm<S> {
    pub fn evaluate(&self, atoms: &AtomFamily<S>) -> Result<S> {
        let v = ito_integral(&self.contracted, &self.orders, atoms)?;
        Ok(S::from_i64(self.coefficient as i64) * v)
    }
}

fn check_hu_meyer_arity(n: usize) -> Result<()> {
    if n > MAX_HU_MEYER_N {
        return invalid(format!("Hu–Meyer expansion supports n <= {MAX_HU_MEYER_N}, got {n}"));
    }
    Ok(())
}

/// One term per `σ ∈ Π_n`, in canonical partition order.
pub fn hu_meyer_terms<S: Scalar>(f: &GridFunction<S>) -> Result<Vec<HuMeyerTerm<S>>> {
    check_hu_meyer_arity(f.arity)?;
    partitions(f.arity)?
        .map(|sigma| {
            Ok(HuMeyerTerm {
                contracted: f.contract(&sigma)?,
                orders: block_size_vector(&sigma),
                sigma,
                coefficient: 1,
            })
        })
        .collect()
}

/// `Σ_σ I^{σ̄}_{#σ}(f ∘ q_σ)`. Equals [`stratonovich_integral`] exactly
/// when the atoms are multiplicative.
pub fn hu_meyer_evaluate<S: Scalar>(f: &GridFunction<S>, atoms: &AtomFamily<S>) -> Result<S> {
    let mut total = S::zero();
    for term in hu_meyer_terms(f)? {
        total += term.evaluate(atoms)?;
    }
    Ok(total)
}

/// One term per partition type, on its consecutive-block representative,
/// weighted by the number of partitions of that type.
pub fn symmetric_hu_meyer_terms<S: Scalar>(f: &GridFunction<S>) -> Result<Vec<HuMeyerTerm<S>>> {
    check_hu_meyer_arity(f.arity)?;
    if f.symmetry != Symmetry::Yes {
        return invalid("the symmetric Hu–Meyer form needs a function flagged symmetric");
    }
    let mut types = TypeVector::all_of_weight(f.arity);
    types.reverse();
    types
        .into_iter()
        .map(|t| {
            let sigma = t.representative()?;
            Ok(HuMeyerTerm {
                contracted: f.contract(&sigma)?,
                orders: block_size_vector(&sigma),
                coefficient: count_by_type(f.arity, &t)?,
                sigma,
            })
        })
        .collect()
}

pub fn hu_meyer_symmetric_evaluate<S: Scalar>(f: &GridFunction<S>, atoms: &AtomFamily<S>) -> Result<S> {
    let mut total = S::zero();
    for term in symmetric_hu_meyer_terms(f)? {
        total += term.evaluate(atoms)?;
    }
    Ok(total)
}

/// `(T/N)^{#σ} Σ_x (f∘q_σ)(x)²` for each `σ ∈ Π_n`.
pub fn lambda_components<S: Scalar>(f: &GridFunction<S>) -> Result<Vec<(Partition, S)>> {
    check_hu_meyer_arity(f.arity)?;
    check_budget(f.num_cells, f.arity)?;
    let h = f.cell_width();
    partitions(f.arity)?
        .map(|sigma| {
            let g = f.contract(&sigma)?;
            let mut s = S::zero();
            if let Repr::Product(factors) = &g.repr {
                s = S::one();
                for gk in factors {
                    let mut t = S::zero();
                    for x in gk {
                        t += x.clone() * x.clone();
                    }
                    s *= t;
                }
            } else {
                for_each_tuple(g.num_cells, g.arity, |x| {
                    let v = g.value(x);
                    s += v.clone() * v;
                });
            }
            Ok((sigma.clone(), h.powi(sigma.num_blocks()) * s))
        })
        .collect()
}

/// The discrete `∫ f² dΛ_n`.
pub fn lambda_norm_sq<S: Scalar>(f: &GridFunction<S>) -> Result<S> {
    let mut total = S::zero();
    for (_, v) in lambda_components(f)? {
        total += v;
    }
    Ok(total)
}

/// `α_r (T/N)^n Σ f²` with `α_r = n! Π_k 2(K_{2r_k} + K_{r_k}² T)`, an
/// upper bound for `E[I^r_n(f)²]`.
///
/// Splitting each `X^(r)` into its Teugels martingale and drift and using
/// `(Σ_{2^n} x)² ≤ 2^n Σ x²` gives the factor `2^n`; the `n!` covers the
/// orderings in which two distinct tuples can pair up.
pub fn ito_bound<S: Scalar>(f: &GridFunction<S>, r: &[usize], moments: &MomentTable) -> Result<f64> {
    if f.arity != r.len() {
        return invalid(format!("order vector of length {} for a function of arity {}", r.len(), f.arity));
    }
    let horizon = f.horizon;
    let mut alpha: f64 = (1..=f.arity).map(|k| k as f64).product();
    for &rk in r {
        let k2 = moments.get(2 * rk)?;
        let k1 = moments.get(rk)?;
        alpha *= 2.0 * (k2 + k1 * k1 * horizon);
    }
    let h = horizon / f.num_cells as f64;
    let sum_sq: f64 = match &f.repr {
        Repr::Product(g) => g.iter().map(|gk| gk.iter().map(|x| x.to_f64().powi(2)).sum::<f64>()).product(),
        _ => f.to_dense()?.iter().map(|x| x.to_f64().powi(2)).sum(),
    };
    Ok(alpha * h.powi(f.arity as i32) * sum_sq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn q(num: i64, den: i64) -> Rational {
        Rational::from_ratio(num, den)
    }

    fn fam(v: &[(i64, i64)]) -> AtomFamily<Rational> {
        AtomFamily::multiplicative(v.iter().map(|&(a, b)| q(a, b)).collect()).unwrap()
    }

    fn dense_q(arity: usize, n: usize, seed: i64) -> GridFunction<Rational> {
        let total = n.pow(arity as u32);
        let vals = (0..total as i64).map(|k| q((k * 7 + seed) % 11 - 5, 3)).collect();
        GridFunction::dense(arity, n, 1.0, vals).unwrap()
    }

    #[test]
    fn two_cell_examples() {
        let a = fam(&[(1, 2), (-2, 3)]);
        let one = GridFunction::constant(2, 2, 1.0, q(1, 1)).unwrap();
        let (b1, b2) = (q(1, 2), q(-2, 3));
        assert_eq!(ito_integral(&one, &[1, 1], &a).unwrap(), q(2, 1) * b1.clone() * b2.clone());
        let zero = GridFunction::constant(3, 2, 1.0, q(0, 1)).unwrap();
        assert_eq!(ito_integral(&zero, &[1, 1, 1], &a).unwrap(), q(0, 1));
        let s = b1.clone() + b2.clone();
        assert_eq!(stratonovich_integral(&one, &a).unwrap(), s.clone() * s.clone());
        assert_eq!(hu_meyer_evaluate(&one, &a).unwrap(), s.clone() * s);
    }

    #[test]
    fn hu_meyer_term_structure() {
        let f = dense_q(3, 2, 1);
        let terms = hu_meyer_terms(&f).unwrap();
        assert_eq!(terms.len(), 5);
        let orders: Vec<Vec<usize>> = terms.iter().map(|t| t.orders.clone()).collect();
        assert_eq!(orders, vec![vec![3], vec![2, 1], vec![2, 1], vec![1, 2], vec![1, 1, 1]]);
        let one = hu_meyer_terms(&dense_q(1, 3, 0)).unwrap();
        assert_eq!(one.len(), 1);
        assert!(hu_meyer_terms(&GridFunction::constant(8, 1, 1.0, 1.0).unwrap()).is_err());
    }

    #[test]
    fn symmetric_coefficients() {
        let f = GridFunction::constant(4, 2, 1.0, q(1, 1)).unwrap();
        let mut coeffs: Vec<(Vec<usize>, u128)> = symmetric_hu_meyer_terms(&f)
            .unwrap()
            .into_iter()
            .map(|t| {
                let mut o = t.orders;
                o.sort_unstable_by(|a, b| b.cmp(a));
                (o, t.coefficient)
            })
            .collect();
        coeffs.sort();
        assert_eq!(
            coeffs,
            vec![(vec![1, 1, 1, 1], 1), (vec![2, 1, 1], 6), (vec![2, 2], 3), (vec![3, 1], 4), (vec![4], 1)]
        );
        let f3 = GridFunction::constant(3, 2, 1.0, q(1, 1)).unwrap();
        let c: Vec<u128> = symmetric_hu_meyer_terms(&f3).unwrap().iter().map(|t| t.coefficient).collect();
        assert_eq!(c, vec![1, 3, 1]);
        assert!(symmetric_hu_meyer_terms(&dense_q(2, 2, 0)).is_err());
    }

    #[test]
    fn symmetrize_examples() {
        let upper =
            GridFunction::<Rational>::from_cell_fn(2, 3, 1.0, |t| if t[0] < t[1] { q(1, 1) } else { q(0, 1) }).unwrap();
        let s = symmetrize(&upper).unwrap();
        for_each_tuple(3, 2, |t| {
            let want = if t[0] != t[1] { q(1, 2) } else { q(0, 1) };
            assert_eq!(s.value(t), want);
        });
        assert_eq!(s.symmetry(), Symmetry::Yes);
        let again = symmetrize(&s).unwrap();
        assert_eq!(again.to_dense().unwrap(), s.to_dense().unwrap());
    }

    #[test]
    fn symmetry_flag_is_checked() {
        assert!(dense_q(2, 3, 0).with_symmetry(Symmetry::Yes).is_err());
        let s = GridFunction::<f64>::from_cell_fn(3, 50, 1.0, |t| (t[0] + t[1] + t[2]) as f64).unwrap();
        assert!(s.with_symmetry(Symmetry::Yes).is_ok());
    }

    #[test]
    fn iterated_form_matches() {
        let a = fam(&[(1, 2), (-2, 3), (3, 1), (1, 5)]);
        for n in 1..=3 {
            let f = dense_q(n, 4, n as i64);
            let r = vec![1; n];
            assert_eq!(iterated_form(&f, &r, &a).unwrap(), ito_integral(&f, &r, &a).unwrap());
        }
    }

    #[test]
    fn product_fast_path_agrees() {
        let a = fam(&[(1, 2), (-2, 3), (3, 1)]);
        let g =
            vec![vec![q(1, 1), q(2, 1), q(-1, 3)], vec![q(0, 1), q(5, 2), q(1, 1)], vec![q(3, 1), q(-1, 1), q(1, 4)]];
        let f = GridFunction::product(1.0, g).unwrap();
        let dense = f.densify().unwrap();
        for r in [[1, 1, 1], [1, 2, 3]] {
            assert_eq!(ito_integral(&f, &r, &a).unwrap(), ito_integral(&dense, &r, &a).unwrap());
        }
        assert_eq!(stratonovich_integral(&f, &a).unwrap(), stratonovich_integral(&dense, &a).unwrap());
        assert_eq!(lambda_norm_sq(&f).unwrap(), lambda_norm_sq(&dense).unwrap());
    }

    #[test]
    fn lambda_norm_of_diagonal() {
        let n = 8;
        let diag = GridFunction::<f64>::from_cell_fn(2, n, n as f64, |t| if t[0] == t[1] { 1.0 } else { 0.0 }).unwrap();
        let comps = lambda_components(&diag).unwrap();
        // the off-diagonal part sees the diagonal with weight h² per cell
        assert_eq!(comps[0].1, n as f64);
        assert_eq!(comps[1].1, n as f64);
        let zero = GridFunction::constant(2, 4, 1.0, 0.0).unwrap();
        assert_eq!(lambda_norm_sq(&zero).unwrap(), 0.0);
    }

    #[test]
    fn ito_bound_examples() {
        let m = crate::levy::LevyModel::brownian(1.0, 0.0, 1.0).unwrap();
        let k = crate::levy::moments(&m, 4).unwrap();
        let one = GridFunction::constant(2, 16, 1.0, 1.0).unwrap();
        assert!(ito_bound(&one, &[1, 1], &k).unwrap() >= 2.0);
        let zero = GridFunction::constant(2, 16, 1.0, 0.0).unwrap();
        assert_eq!(ito_bound(&zero, &[1, 1], &k).unwrap(), 0.0);
        let k2 = crate::levy::moments(&m, 3).unwrap();
        assert!(ito_bound(&one, &[2, 1], &k2).is_err());
    }
}
