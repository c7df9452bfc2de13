//! Discrete random measures on the cell grid.
//!
//! An [`AtomFamily`] assigns to each order `r` the per-cell masses
//! `a^(r)_c` of the measure `φ_r`. Two flavours exist. A multiplicative
//! family derives `a^(r)_c = (a^(1)_c)^r` on demand, which makes the
//! Hu–Meyer identities exact. A registered family stores each order
//! explicitly, e.g. the variation increments of a path.

use std::borrow::Cow;
use std::collections::BTreeMap;

use crate::diagonal::{constant_on_blocks, for_each_tuple, CellRectangle, CellSet};
use crate::error::{check_budget, invalid, Error, Result};
use crate::levy::LevyPath;
use crate::partition::{mobius, partitions_above, Partition};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct AtomFamily<S> {
    num_cells: usize,
    orders: BTreeMap<usize, Vec<S>>,
    multiplicative: bool,
}

impl<S: Scalar> AtomFamily<S> {
    /// Family whose order-`r` atoms are the `r`-th powers of `base`.
    pub fn multiplicative(base: Vec<S>) -> Result<Self> {
        if base.is_empty() {
            return invalid("an atom family needs at least one cell");
        }
        Ok(Self { num_cells: base.len(), orders: BTreeMap::from([(1, base)]), multiplicative: true })
    }

    /// Family with explicitly registered orders; no others may be queried.
    pub fn registered(orders: impl IntoIterator<Item = (usize, Vec<S>)>) -> Result<Self> {
        let orders: BTreeMap<usize, Vec<S>> = orders.into_iter().collect();
        let Some(first) = orders.values().next() else {
            return invalid("an atom family needs at least one order");
        };
        let num_cells = first.len();
        if num_cells == 0 {
            return invalid("an atom family needs at least one cell");
        }
        if orders.contains_key(&0) {
            return invalid("atom orders start at 1");
        }
        if orders.values().any(|a| a.len() != num_cells) {
            return invalid("all orders of an atom family must share the cell count");
        }
        Ok(Self { num_cells, orders, multiplicative: false })
    }

    /// Adds or replaces the atoms of one order.
    pub fn with_order(mut self, r: usize, atoms: Vec<S>) -> Result<Self> {
        if r == 0 {
            return invalid("atom orders start at 1");
        }
        if atoms.len() != self.num_cells {
            return invalid(format!("expected {} atoms, got {}", self.num_cells, atoms.len()));
        }
        self.orders.insert(r, atoms);
        Ok(self)
    }

    pub fn num_cells(&self) -> usize {
        self.num_cells
    }

    pub fn is_multiplicative(&self) -> bool {
        self.multiplicative
    }

    /// Orders stored explicitly.
    pub fn registered_orders(&self) -> Vec<usize> {
        self.orders.keys().copied().collect()
    }

    /// `a^(r)_1 .. a^(r)_N`.
    pub fn atoms(&self, r: usize) -> Result<Cow<'_, [S]>> {
        if let Some(a) = self.orders.get(&r) {
            return Ok(Cow::Borrowed(a));
        }
        if self.multiplicative && r > 0 {
            let base = &self.orders[&1];
            return Ok(Cow::Owned(base.iter().map(|b| b.powi(r)).collect()));
        }
        Err(Error::UnregisteredOrder(r))
    }

    /// Per-slot atom rows for an order vector.
    pub fn slots(&self, r: &[usize]) -> Result<Vec<Cow<'_, [S]>>> {
        r.iter().map(|&k| self.atoms(k)).collect()
    }
}

impl AtomFamily<f64> {
    /// Multiplicative family of the path's cell increments.
    pub fn from_path_increments(path: &LevyPath) -> Self {
        Self::multiplicative(path.base_increments().to_vec()).expect("paths have cells")
    }

    /// Registered family of the variation increments `ΔX^(r)`, `r ≤ max_order`.
    pub fn from_path_variations(path: &LevyPath, max_order: usize) -> Result<Self> {
        if max_order == 0 {
            return invalid("max_order must be >= 1");
        }
        Self::registered((1..=max_order).map(|r| (r, path.variation_increments(r).expect("r >= 1"))))
    }

    /// Converts every atom to another scalar type.
    pub fn convert<T: Scalar>(&self) -> AtomFamily<T> {
        AtomFamily {
            num_cells: self.num_cells,
            orders: self.orders.iter().map(|(&r, a)| (r, a.iter().map(|&x| T::from_f64(x)).collect())).collect(),
            multiplicative: self.multiplicative,
        }
    }
}

/// The set `C` together with the base partition `π`.
#[derive(Clone, Debug)]
pub struct DiagonalSpec {
    n: usize,
    set: CellSet,
    base: Partition,
}

impl DiagonalSpec {
    pub fn new(set: CellSet, base: Partition) -> Result<Self> {
        if let CellSet::Rectangle(r) = &set {
            if r.arity() != base.n() {
                return invalid(format!("rectangle arity {} does not match π = {base}", r.arity()));
            }
        }
        Ok(Self { n: base.n(), set, base })
    }

    /// `C` the whole grid, `π = 0̂`.
    pub fn full(n: usize) -> Result<Self> {
        Self::new(CellSet::Full, Partition::finest(n)?)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn set(&self) -> &CellSet {
        &self.set
    }

    pub fn base(&self) -> &Partition {
        &self.base
    }

    /// Same set, different base partition.
    pub fn with_base(&self, base: Partition) -> Result<Self> {
        Self::new(self.set.clone(), base)
    }
}

fn check_orders<S: Scalar>(atoms: &AtomFamily<S>, r: &[usize], spec: &DiagonalSpec) -> Result<()> {
    if r.len() != spec.n {
        return invalid(format!("order vector has length {}, expected {}", r.len(), spec.n));
    }
    if let CellSet::Rectangle(rect) = &spec.set {
        if rect.factors().iter().flatten().any(|&c| c >= atoms.num_cells()) {
            return invalid("rectangle refers to cells outside the grid");
        }
    }
    Ok(())
}

fn tuple_weight<S: Scalar>(slots: &[Cow<'_, [S]>], t: &[usize]) -> S {
    let mut w = S::one();
    for (a, &c) in slots.iter().zip(t) {
        w *= a[c].clone();
    }
    w
}

/// Reference `(Φ_{r_1} ⊗ .. ⊗ Φ_{r_n})(C_{≥π})` by visiting all `N^n` tuples.
pub fn product_measure_enumerated<S: Scalar>(atoms: &AtomFamily<S>, r: &[usize], spec: &DiagonalSpec) -> Result<S> {
    check_orders(atoms, r, spec)?;
    check_budget(atoms.num_cells(), spec.n)?;
    let slots = atoms.slots(r)?;
    let mut total = S::zero();
    for_each_tuple(atoms.num_cells(), spec.n, |t| {
        if constant_on_blocks(&spec.base, t) && spec.set.contains(t) {
            total += tuple_weight(&slots, t);
        }
    });
    Ok(total)
}

/// Reference `(Φ_{r_1} ⊗ .. ⊗ Φ_{r_n})(C_π)` by visiting all `N^n` tuples.
pub fn ito_measure_enumerated<S: Scalar>(atoms: &AtomFamily<S>, r: &[usize], spec: &DiagonalSpec) -> Result<S> {
    check_orders(atoms, r, spec)?;
    check_budget(atoms.num_cells(), spec.n)?;
    let slots = atoms.slots(r)?;
    let mut total = S::zero();
    for_each_tuple(atoms.num_cells(), spec.n, |t| {
        if spec.set.contains(t) && Partition::from_labels(t).is_ok_and(|k| k == spec.base) {
            total += tuple_weight(&slots, t);
        }
    });
    Ok(total)
}

// Π_B Σ_{c ∈ ∩_{i∈B} A_i} Π_{i∈B} a^(r_i)_c
fn rectangle_product<S: Scalar>(
    slots: &[Cow<'_, [S]>],
    rect: Option<&CellRectangle>,
    base: &Partition,
    num_cells: usize,
) -> S {
    if rect.is_some_and(|r| r.is_empty()) {
        return S::zero();
    }
    let mut total = S::one();
    for block in base.blocks() {
        let masks: Vec<Vec<bool>> = match rect {
            Some(r) => block.iter().map(|&i| r.factor_mask(i, num_cells)).collect(),
            None => Vec::new(),
        };
        let mut sum = S::zero();
        for c in 0..num_cells {
            if masks.iter().all(|m| m[c]) {
                let mut w = S::one();
                for &i in &block {
                    w *= slots[i][c].clone();
                }
                sum += w;
            }
        }
        total *= sum;
    }
    total
}

fn rectangle_of(set: &CellSet) -> Option<Option<&CellRectangle>> {
    match set {
        CellSet::Full => Some(None),
        CellSet::Rectangle(r) => Some(Some(r)),
        CellSet::Predicate(_) => None,
    }
}

/// `(Φ_{r_1} ⊗ .. ⊗ Φ_{r_n})_π(C) = (Φ_{r_1} ⊗ .. ⊗ Φ_{r_n})(C_{≥π})`.
///
/// Rectangles factor over the blocks of `π`; other sets are enumerated
/// through the `N^{#π}` tuples constant on the blocks.
pub fn product_measure<S: Scalar>(atoms: &AtomFamily<S>, r: &[usize], spec: &DiagonalSpec) -> Result<S> {
    check_orders(atoms, r, spec)?;
    let slots = atoms.slots(r)?;
    if let Some(rect) = rectangle_of(&spec.set) {
        return Ok(rectangle_product(&slots, rect, &spec.base, atoms.num_cells()));
    }
    check_budget(atoms.num_cells(), spec.n)?;
    let labels = spec.base.labels();
    let mut t = vec![0usize; spec.n];
    let mut total = S::zero();
    for_each_tuple(atoms.num_cells(), spec.base.num_blocks(), |x| {
        for (ti, &l) in t.iter_mut().zip(labels) {
            *ti = x[l as usize];
        }
        if spec.set.contains(&t) {
            total += tuple_weight(&slots, &t);
        }
    });
    Ok(total)
}

/// `St^r_π(C) = (Φ_{r_1} ⊗ .. ⊗ Φ_{r_n})(C_π)`: tuples whose kernel is exactly `π`.
///
/// Rectangles go through Möbius inversion of the factorised product
/// measures; other sets are enumerated over distinct block values.
pub fn ito_measure<S: Scalar>(atoms: &AtomFamily<S>, r: &[usize], spec: &DiagonalSpec) -> Result<S> {
    check_orders(atoms, r, spec)?;
    if rectangle_of(&spec.set).is_some() {
        return mobius_recover_ito(atoms, r, spec);
    }
    check_budget(atoms.num_cells(), spec.n)?;
    let slots = atoms.slots(r)?;
    let labels = spec.base.labels();
    let mut t = vec![0usize; spec.n];
    let mut total = S::zero();
    crate::diagonal::for_each_distinct_tuple(atoms.num_cells(), spec.base.num_blocks(), |x| {
        for (ti, &l) in t.iter_mut().zip(labels) {
            *ti = x[l as usize];
        }
        if spec.set.contains(&t) {
            total += tuple_weight(&slots, &t);
        }
    });
    Ok(total)
}

/// `Σ_{σ≥π} μ(π,σ) (Φ_{r_1} ⊗ .. ⊗ Φ_{r_n})_σ(C)`.
pub fn mobius_recover_ito<S: Scalar>(atoms: &AtomFamily<S>, r: &[usize], spec: &DiagonalSpec) -> Result<S> {
    check_orders(atoms, r, spec)?;
    let mut total = S::zero();
    for sigma in partitions_above(&spec.base)? {
        let mu = mobius(&spec.base, &sigma)?;
        let term = product_measure(atoms, r, &spec.with_base(sigma)?)?;
        total += S::from_i64(mu) * term;
    }
    Ok(total)
}

/// Per-block atoms after merging the slots of each block of `σ`.
#[derive(Clone, Debug, PartialEq)]
pub struct SlotAtoms<S> {
    orders: Vec<usize>,
    atoms: Vec<Vec<S>>,
}

impl<S: Scalar> SlotAtoms<S> {
    /// `Σ_{i ∈ B_j} r_i` for each block.
    pub fn orders(&self) -> &[usize] {
        &self.orders
    }

    /// Atom row of block `j`.
    pub fn atoms(&self, j: usize) -> &[S] {
        &self.atoms[j]
    }

    pub fn num_blocks(&self) -> usize {
        self.atoms.len()
    }

    /// `Π_j Σ_{c ∈ A} atom_j(c)`.
    pub fn product_of_sums(&self, cells: &[usize]) -> S {
        let mut total = S::one();
        for row in &self.atoms {
            let mut s = S::zero();
            for &c in cells {
                s += row[c].clone();
            }
            total *= s;
        }
        total
    }
}

/// Merges the slots in each block of `σ`: block `B_j` gets order
/// `Σ_{i∈B_j} r_i` and atoms `Π_{i∈B_j} a^(r_i)_c`.
pub fn collapse_block_atoms<S: Scalar>(atoms: &AtomFamily<S>, r: &[usize], sigma: &Partition) -> Result<SlotAtoms<S>> {
    if r.len() != sigma.n() {
        return invalid(format!("order vector has length {}, σ = {sigma} has {}", r.len(), sigma.n()));
    }
    let slots = atoms.slots(r)?;
    let mut orders = Vec::with_capacity(sigma.num_blocks());
    let mut rows = Vec::with_capacity(sigma.num_blocks());
    for block in sigma.blocks() {
        orders.push(block.iter().map(|&i| r[i]).sum());
        rows.push(
            (0..atoms.num_cells())
                .map(|c| {
                    let mut w = S::one();
                    for &i in &block {
                        w *= slots[i][c].clone();
                    }
                    w
                })
                .collect(),
        );
    }
    Ok(SlotAtoms { orders, atoms: rows })
}

/// Values of the refinement sums at each requested depth, with the limit.
#[derive(Clone, Debug, PartialEq)]
pub struct RefinementSeries {
    pub levels: Vec<u32>,
    pub values: Vec<f64>,
    pub reference: f64,
}

/// `Σ_k Π_i ΔX^(r_i)(I_k ∩ A)` over the dyadic cells `I_k` of each level,
/// against the reference `φ_{Σr}(A)`. `A` is a set of cells of the path grid.
pub fn diagonal_product_refinement(
    path: &LevyPath,
    r: &[usize],
    cells: &[usize],
    levels: &[u32],
) -> Result<RefinementSeries> {
    if r.is_empty() || r.contains(&0) {
        return invalid("orders must be a nonempty list of positive integers");
    }
    if levels.windows(2).any(|w| w[0] >= w[1]) {
        return invalid("levels must be strictly increasing");
    }
    let depth = path.depth();
    if let Some(&deepest) = levels.last() {
        if deepest > depth {
            return invalid(format!("level {deepest} exceeds the grid depth {depth}"));
        }
    }
    let n_cells = path.num_cells();
    let mut mask = vec![false; n_cells];
    for &c in cells {
        if c >= n_cells {
            return invalid(format!("cell {c} outside a grid of {n_cells} cells"));
        }
        mask[c] = true;
    }
    let mut distinct: Vec<usize> = r.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    let restricted: BTreeMap<usize, Vec<f64>> = distinct
        .iter()
        .map(|&k| {
            let v = path.variation_increments(k).expect("k >= 1");
            (k, v.iter().zip(&mask).map(|(&x, &m)| if m { x } else { 0.0 }).collect())
        })
        .collect();
    let total: usize = r.iter().sum();
    let reference = path.variation_increments(total)?.iter().zip(&mask).filter(|(_, &m)| m).map(|(x, _)| x).sum();
    let values = levels
        .iter()
        .map(|&m| {
            let width = n_cells >> m;
            (0..1usize << m)
                .map(|k| {
                    let span = k * width..(k + 1) * width;
                    r.iter().map(|ri| restricted[ri][span.clone()].iter().sum::<f64>()).product::<f64>()
                })
                .sum()
        })
        .collect();
    Ok(RefinementSeries { levels: levels.to_vec(), values, reference })
}

/// `Σ_k (ΔX(I_k ∩ A))^n` along dyadic refinements, against `φ_n(A)`.
pub fn diagonal_measure_refinement(
    path: &LevyPath,
    n: usize,
    cells: &[usize],
    levels: &[u32],
) -> Result<RefinementSeries> {
    if n == 0 {
        return invalid("order must be >= 1");
    }
    diagonal_product_refinement(path, &vec![1; n], cells, levels)
}
