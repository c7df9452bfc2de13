//! Diagonal sets on the cell grid `{0..N-1}^n`.
//!
//! A tuple `t` lies in `C_π` exactly when its kernel partition (the
//! equality pattern of its coordinates) is `π`, and in `C_{≥π}` when `π`
//! refines the kernel. Sets are handled extensionally through [`CellSet`];
//! rectangles get their own representation because preimages under the
//! expansion map `q_σ` stay rectangles.
//!
//! Cell `k` of a grid of `N` cells on `[0,T]` is the half-open interval
//! `(kT/N, (k+1)T/N]`; integrands are sampled at its right endpoint.

use std::fmt;
use std::sync::Arc;

use crate::error::{invalid, Result};
use crate::partition::{Partition, Permutation};

/// Equality pattern of a tuple: `i ~ j` iff `t[i] == t[j]`.
pub fn kernel_partition(t: &[usize]) -> Result<Partition> {
    Partition::from_labels(t)
}

/// The expansion `q_σ(x) = y` with `y_i = x_j` whenever `i ∈ B_j`.
pub fn expand_q_sigma<T: Clone>(sigma: &Partition, x: &[T]) -> Result<Vec<T>> {
    if x.len() != sigma.num_blocks() {
        return invalid(format!("q_σ for σ = {sigma} takes {} coordinates, got {}", sigma.num_blocks(), x.len()));
    }
    Ok(sigma.labels().iter().map(|&l| x[l as usize].clone()).collect())
}

/// Coordinate permutation `p(t) = (t_{p(1)}, .., t_{p(n)})`.
pub fn permute_tuple<T: Clone>(p: &Permutation, t: &[T]) -> Result<Vec<T>> {
    p.permute(t)
}

/// `A_1 × .. × A_n` with each factor a set of cells. The empty rectangle
/// is the one with every factor empty.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CellRectangle {
    factors: Vec<Vec<usize>>,
}

impl CellRectangle {
    /// Factors are sorted and deduplicated; a single empty factor turns the
    /// whole rectangle into the canonical empty one.
    pub fn new(factors: Vec<Vec<usize>>) -> Result<Self> {
        if factors.is_empty() {
            return invalid("a rectangle needs at least one factor");
        }
        let mut factors = factors;
        for f in &mut factors {
            f.sort_unstable();
            f.dedup();
        }
        if factors.iter().any(|f| f.is_empty()) {
            return Ok(Self::empty(factors.len()));
        }
        Ok(Self { factors })
    }

    pub fn empty(arity: usize) -> Self {
        Self { factors: vec![Vec::new(); arity] }
    }

    /// `A^n` for a single cell set `A`.
    pub fn cube(cells: Vec<usize>, arity: usize) -> Result<Self> {
        Self::new(vec![cells; arity])
    }

    /// The full grid `{0..N-1}^n`.
    pub fn full(num_cells: usize, arity: usize) -> Result<Self> {
        Self::cube((0..num_cells).collect(), arity)
    }

    pub fn arity(&self) -> usize {
        self.factors.len()
    }

    pub fn factors(&self) -> &[Vec<usize>] {
        &self.factors
    }

    pub fn is_empty(&self) -> bool {
        self.factors[0].is_empty()
    }

    pub fn contains(&self, t: &[usize]) -> bool {
        t.len() == self.arity() && t.iter().zip(&self.factors).all(|(c, f)| f.binary_search(c).is_ok())
    }

    /// Indicator of the factor `k` as a dense mask over `num_cells` cells.
    pub(crate) fn factor_mask(&self, k: usize, num_cells: usize) -> Vec<bool> {
        let mut mask = vec![false; num_cells];
        for &c in &self.factors[k] {
            if c < num_cells {
                mask[c] = true;
            }
        }
        mask
    }
}

/// `q_σ^{-1}(A_1 × .. × A_n) = (∩_{i∈B_1} A_i) × .. × (∩_{i∈B_m} A_i)`.
pub fn preimage_rectangle(sigma: &Partition, rect: &CellRectangle) -> Result<CellRectangle> {
    if rect.arity() != sigma.n() {
        return invalid(format!("rectangle with {} factors does not match σ = {sigma}", rect.arity()));
    }
    if rect.is_empty() {
        return Ok(CellRectangle::empty(sigma.num_blocks()));
    }
    let factors = sigma
        .blocks()
        .iter()
        .map(|block| {
            let mut acc = rect.factors[block[0]].clone();
            for &i in &block[1..] {
                let other = &rect.factors[i];
                acc.retain(|c| other.binary_search(c).is_ok());
            }
            acc
        })
        .collect();
    CellRectangle::new(factors)
}

/// A subset `C ⊆ {0..N-1}^n`.
#[derive(Clone)]
pub enum CellSet {
    /// The whole grid.
    Full,
    Rectangle(CellRectangle),
    Predicate(Arc<dyn Fn(&[usize]) -> bool + Send + Sync>),
}

impl CellSet {
    pub fn predicate(f: impl Fn(&[usize]) -> bool + Send + Sync + 'static) -> Self {
        CellSet::Predicate(Arc::new(f))
    }

    pub fn contains(&self, t: &[usize]) -> bool {
        match self {
            CellSet::Full => true,
            CellSet::Rectangle(r) => r.contains(t),
            CellSet::Predicate(p) => p(t),
        }
    }

    /// `C_σ`: the points of `self` whose kernel is exactly `σ`.
    pub fn exact_diagonal(self, sigma: Partition) -> CellSet {
        CellSet::predicate(move |t| self.contains(t) && Partition::from_labels(t).is_ok_and(|k| k == sigma))
    }

    /// `C_{≥σ}`: the points of `self` constant on every block of `σ`.
    pub fn at_least_diagonal(self, sigma: Partition) -> CellSet {
        CellSet::predicate(move |t| self.contains(t) && constant_on_blocks(&sigma, t))
    }
}

impl fmt::Debug for CellSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CellSet::Full => f.write_str("Full"),
            CellSet::Rectangle(r) => f.debug_tuple("Rectangle").field(r).finish(),
            CellSet::Predicate(_) => f.write_str("Predicate(..)"),
        }
    }
}

/// `t ∈ S^n_{≥σ}`, i.e. `σ ≤ kernel(t)`.
pub fn constant_on_blocks(sigma: &Partition, t: &[usize]) -> bool {
    let mut value = [usize::MAX; 256];
    for (&l, &c) in sigma.labels().iter().zip(t) {
        let slot = &mut value[l as usize];
        if *slot == usize::MAX {
            *slot = c;
        } else if *slot != c {
            return false;
        }
    }
    true
}

/// Calls `visit` on every tuple of `{0..N-1}^n` in row-major order.
pub fn for_each_tuple(num_cells: usize, arity: usize, mut visit: impl FnMut(&[usize])) {
    if num_cells == 0 {
        return;
    }
    let mut t = vec![0usize; arity];
    loop {
        visit(&t);
        let mut k = arity;
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            t[k] += 1;
            if t[k] < num_cells {
                break;
            }
            t[k] = 0;
        }
    }
}

/// Calls `visit` on every tuple of pairwise distinct cells.
pub fn for_each_distinct_tuple(num_cells: usize, arity: usize, mut visit: impl FnMut(&[usize])) {
    fn rec(depth: usize, t: &mut Vec<usize>, used: &mut [bool], arity: usize, visit: &mut dyn FnMut(&[usize])) {
        if depth == arity {
            visit(t);
            return;
        }
        for c in 0..used.len() {
            if used[c] {
                continue;
            }
            used[c] = true;
            t.push(c);
            rec(depth + 1, t, used, arity, visit);
            t.pop();
            used[c] = false;
        }
    }
    let mut used = vec![false; num_cells];
    rec(0, &mut Vec::with_capacity(arity), &mut used, arity, &mut visit);
}

/// Row-major flat index of a tuple.
pub fn flat_index(t: &[usize], num_cells: usize) -> usize {
    t.iter().fold(0, |acc, &c| acc * num_cells + c)
}
