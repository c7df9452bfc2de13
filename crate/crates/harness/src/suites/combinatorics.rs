//! Exhaustive lattice and diagonal-geometry checks for `n ≤ 7`.

use std::collections::{BTreeMap, HashSet};

use stratolevy::diagonal::{
    constant_on_blocks, expand_q_sigma, for_each_distinct_tuple, for_each_tuple, kernel_partition, preimage_rectangle,
    CellRectangle,
};
use stratolevy::partition::{
    bell_number, collapse_interval, count_by_type, enumerate_partitions, expand_interval, mobius,
    mobius_row_by_recursion, partitions_above, permute_partition, Partition, Permutation, TypeVector,
};

use crate::error::HarnessError;
use crate::report::{ReportRow, SuiteReport};

pub const MAX_COMBINATORICS_N: usize = 7;
/// Diagonal checks enumerate `{0..2}^n`.
const GEOMETRY_CELLS: usize = 3;

const SUITE: &str = "combinatorics";

fn mismatch_row(n: usize, statistic: &str, mismatches: usize) -> ReportRow {
    ReportRow::check(SUITE, "", statistic, mismatches as f64, 0.0).n(n)
}

pub fn run_combinatorics_suite(max_n: usize) -> Result<SuiteReport, HarnessError> {
    if max_n == 0 || max_n > MAX_COMBINATORICS_N {
        return Err(HarnessError::Config(format!("max_n must lie in 1..={MAX_COMBINATORICS_N}, got {max_n}")));
    }
    let mut rows = Vec::new();
    for n in 1..=max_n {
        let all = enumerate_partitions(n)?;
        rows.push(
            ReportRow::check(SUITE, "", "bell_count_error", (all.len() as f64 - bell_number(n) as f64).abs(), 0.0).n(n),
        );
        rows.push(ReportRow::info(SUITE, "", "bell_number", all.len() as f64).n(n));

        let bottom = Partition::finest(n)?;
        let top = Partition::coarsest(n)?;
        let mu = mobius(&bottom, &top)?;
        let expected: i64 = (1..n as i64).product::<i64>() * if n % 2 == 0 { -1 } else { 1 };
        rows.push(ReportRow::info(SUITE, "", "mobius_bottom_top", mu as f64).n(n));
        rows.push(mismatch_row(n, "mobius_bottom_top_error", usize::from(mu != expected)));

        rows.push(mismatch_row(n, "mobius_closed_vs_recursive", mobius_recursion_mismatches(&all)?));
        rows.push(mismatch_row(n, "mobius_inversion_identity", mobius_inversion_mismatches(&all)?));
        rows.push(mismatch_row(n, "count_by_type_vs_enumeration", type_count_mismatches(n, &all)?));
        rows.push(mismatch_row(n, "collapse_interval_bijection", collapse_mismatches(&all)?));
        rows.push(mismatch_row(n, "permutation_actions", permutation_mismatches(n, &all)?));
        rows.push(mismatch_row(n, "diagonal_geometry", geometry_mismatches(n, &all)?));
    }
    Ok(SuiteReport { rows, failures: Vec::new() })
}

fn mobius_recursion_mismatches(all: &[Partition]) -> Result<usize, HarnessError> {
    let mut bad = 0;
    for sigma in all {
        for (pi, value) in mobius_row_by_recursion(sigma)? {
            if mobius(sigma, &pi)? != value {
                bad += 1;
            }
        }
    }
    Ok(bad)
}

// Σ_{σ ≤ τ ≤ π} μ(σ,τ) = δ_{σπ}
fn mobius_inversion_mismatches(all: &[Partition]) -> Result<usize, HarnessError> {
    let mut bad = 0;
    for sigma in all {
        let up = partitions_above(sigma)?;
        let mus: Vec<i64> = up.iter().map(|tau| mobius(sigma, tau)).collect::<Result<_, _>>()?;
        for pi in &up {
            let mut sum = 0i64;
            for (tau, mu) in up.iter().zip(&mus) {
                if tau.refines(pi)? {
                    sum += mu;
                }
            }
            if sum != i64::from(pi == sigma) {
                bad += 1;
            }
        }
    }
    Ok(bad)
}

fn type_count_mismatches(n: usize, all: &[Partition]) -> Result<usize, HarnessError> {
    let mut counts: BTreeMap<Vec<usize>, u128> = BTreeMap::new();
    for p in all {
        *counts.entry(p.partition_type().counts().to_vec()).or_default() += 1;
    }
    let mut bad = 0;
    let types = TypeVector::all_of_weight(n);
    if types.len() != counts.len() {
        bad += 1;
    }
    for t in types {
        if counts.get(t.counts()).copied().unwrap_or(0) != count_by_type(n, &t)? {
            bad += 1;
        }
    }
    Ok(bad)
}

// [σ, 1̂] ≅ Π_{#σ}: bijective, order- and Möbius-preserving
fn collapse_mismatches(all: &[Partition]) -> Result<usize, HarnessError> {
    let mut bad = 0;
    for sigma in all {
        let up = partitions_above(sigma)?;
        let images: Vec<Partition> = up.iter().map(|pi| collapse_interval(sigma, pi)).collect::<Result<_, _>>()?;
        let distinct: HashSet<&Partition> = images.iter().collect();
        if distinct.len() != up.len() || up.len() as u128 != bell_number(sigma.num_blocks()) {
            bad += 1;
        }
        let bottom = Partition::finest(sigma.num_blocks())?;
        for (pi, star) in up.iter().zip(&images) {
            if star.n() != sigma.num_blocks() || &expand_interval(sigma, star)? != pi {
                bad += 1;
            }
            if mobius(sigma, pi)? != mobius(&bottom, star)? {
                bad += 1;
            }
        }
        for (a, sa) in up.iter().zip(&images) {
            for (b, sb) in up.iter().zip(&images) {
                if a.refines(b)? != sa.refines(sb)? {
                    bad += 1;
                }
            }
        }
    }
    Ok(bad)
}

fn permutation_mismatches(n: usize, all: &[Partition]) -> Result<usize, HarnessError> {
    let mut bad = 0;
    for p in Permutation::all(n) {
        let inv = p.inverse();
        for sigma in all {
            let (image, p1) = permute_partition(&p, sigma)?;
            // p(σ) has blocks p(B), listed as p(B_{p₁(0)}), p(B_{p₁(1)}), ..
            let blocks = sigma.blocks();
            for (k, block) in image.blocks().iter().enumerate() {
                let mut mapped: Vec<usize> = blocks[p1.apply(k)].iter().map(|&i| p.apply(i)).collect();
                mapped.sort_unstable();
                if &mapped != block {
                    bad += 1;
                }
            }
            if image.canonicalize() != image {
                bad += 1;
            }
            // kernel(p(t)) = p⁻¹(kernel(t)) for the tuple of σ-labels
            let t: Vec<usize> = sigma.labels().iter().map(|&l| l as usize).collect();
            let (pulled, _) = permute_partition(&inv, sigma)?;
            if kernel_partition(&p.permute(&t)?)? != pulled {
                bad += 1;
            }
            // p⁻¹ ∘ q_σ = q_{p(σ)} ∘ p₁ as maps of coordinates
            let x: Vec<usize> = (0..sigma.num_blocks()).map(|j| 10 + j).collect();
            let lhs = inv.permute(&expand_q_sigma(sigma, &x)?)?;
            let rhs = expand_q_sigma(&image, &p1.permute(&x)?)?;
            if lhs != rhs {
                bad += 1;
            }
        }
    }
    Ok(bad)
}

fn geometry_mismatches(n: usize, all: &[Partition]) -> Result<usize, HarnessError> {
    let cells = GEOMETRY_CELLS;
    let mut bad = 0;
    // every tuple lies in exactly one C_π, and in C_{≥σ} iff σ ≤ kernel
    let mut kernels = Vec::new();
    for_each_tuple(cells, n, |t| kernels.push((t.to_vec(), kernel_partition(t).expect("n >= 1"))));
    for (t, k) in &kernels {
        for sigma in all {
            if constant_on_blocks(sigma, t) != sigma.refines(k)? {
                bad += 1;
            }
        }
    }
    for sigma in all {
        for_each_distinct_tuple(cells, sigma.num_blocks(), |x| {
            let k = kernel_partition(&expand_q_sigma(sigma, x).expect("arity")).expect("n >= 1");
            if &k != sigma {
                bad += 1;
            }
        });
    }
    // preimage rectangles against brute force, for a fixed family of rectangles
    for shift in 0..cells {
        let factors: Vec<Vec<usize>> =
            (0..n).map(|i| (0..cells).filter(|c| (c + i + shift) % cells != 0).collect()).collect();
        let rect = CellRectangle::new(factors)?;
        for sigma in all {
            let pre = preimage_rectangle(sigma, &rect)?;
            for_each_tuple(cells, sigma.num_blocks(), |x| {
                let img = expand_q_sigma(sigma, x).expect("arity");
                if pre.contains(x) != rect.contains(&img) {
                    bad += 1;
                }
            });
        }
    }
    Ok(bad)
}
