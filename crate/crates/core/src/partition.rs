//! The lattice of set partitions of `{0, .., n-1}` under the reversed
//! refinement order.
//!
//! A [`Partition`] is stored as its restricted-growth string: `labels[i]` is
//! the index of the block holding element `i`, and blocks are numbered in
//! order of their minimum element. Two partitions are equal exactly when
//! their label strings are equal.
//!
//! Elements are 0-based in the API. `Display` and [`Partition::parse`] use
//! the 1-based brace notation `{{1,3},{2}}` common in the literature.

use std::fmt;

use crate::error::{invalid, Error, Result};

/// Hard cap on `n` for full enumeration of the lattice.
pub const MAX_ENUMERATION_N: usize = 12;

/// A set partition in canonical (restricted-growth) form.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    labels: Vec<u8>,
    num_blocks: u8,
}

impl Partition {
    /// The finest partition `0̂` (all singletons).
    pub fn finest(n: usize) -> Result<Self> {
        check_ground_size(n)?;
        Ok(Self { labels: (0..n as u8).collect(), num_blocks: n as u8 })
    }

    /// The coarsest partition `1̂` (a single block).
    pub fn coarsest(n: usize) -> Result<Self> {
        check_ground_size(n)?;
        Ok(Self { labels: vec![0; n], num_blocks: 1 })
    }

    /// Builds the partition whose blocks are the level sets of `labels`.
    /// Any labelling is accepted; the result is canonical.
    pub fn from_labels<L: Copy + Eq>(labels: &[L]) -> Result<Self> {
        check_ground_size(labels.len())?;
        let mut seen: Vec<L> = Vec::new();
        let mut out = Vec::with_capacity(labels.len());
        for &l in labels {
            let idx = match seen.iter().position(|&s| s == l) {
                Some(i) => i,
                None => {
                    seen.push(l);
                    seen.len() - 1
                }
            };
            out.push(idx as u8);
        }
        Ok(Self { labels: out, num_blocks: seen.len() as u8 })
    }

    /// Builds a partition of `{0..n-1}` from explicit 0-based blocks.
    pub fn from_blocks(n: usize, blocks: &[Vec<usize>]) -> Result<Self> {
        check_ground_size(n)?;
        let mut labels = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return invalid("partition blocks must be nonempty");
            }
            for &e in block {
                if e >= n {
                    return invalid(format!("element {e} outside ground set of size {n}"));
                }
                if labels[e] != usize::MAX {
                    return invalid(format!("element {e} appears in two blocks"));
                }
                labels[e] = b;
            }
        }
        if labels.contains(&usize::MAX) {
            return invalid("blocks do not cover the ground set");
        }
        Self::from_labels(&labels)
    }

    /// Parses 1-based brace notation, e.g. `{{1,3},{2}}`.
    pub fn parse(text: &str) -> Result<Self> {
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let inner = s
            .strip_prefix('{')
            .and_then(|r| r.strip_suffix('}'))
            .ok_or_else(|| Error::InvalidInput(format!("malformed partition `{text}`")))?;
        let mut blocks = Vec::new();
        let mut rest = inner;
        while !rest.is_empty() {
            let body =
                rest.strip_prefix('{').ok_or_else(|| Error::InvalidInput(format!("malformed partition `{text}`")))?;
            let end = body.find('}').ok_or_else(|| Error::InvalidInput(format!("malformed partition `{text}`")))?;
            let mut block = Vec::new();
            for tok in body[..end].split(',') {
                let v: usize =
                    tok.parse().map_err(|_| Error::InvalidInput(format!("bad element `{tok}` in `{text}`")))?;
                if v == 0 {
                    return invalid("brace notation is 1-based");
                }
                block.push(v - 1);
            }
            blocks.push(block);
            rest = body[end + 1..].strip_prefix(',').unwrap_or(&body[end + 1..]);
        }
        let n = blocks.iter().map(|b| b.len()).sum();
        Self::from_blocks(n, &blocks)
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn num_blocks(&self) -> usize {
        self.num_blocks as usize
    }

    /// Restricted-growth string.
    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    /// Index of the (canonically ordered) block containing `element`.
    pub fn block_of(&self, element: usize) -> usize {
        self.labels[element] as usize
    }

    pub fn is_finest(&self) -> bool {
        self.num_blocks() == self.n()
    }

    pub fn is_coarsest(&self) -> bool {
        self.num_blocks == 1
    }

    /// Blocks in canonical order, each sorted ascending.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut blocks = vec![Vec::new(); self.num_blocks()];
        for (i, &l) in self.labels.iter().enumerate() {
            blocks[l as usize].push(i);
        }
        blocks
    }

    /// `(#B_1, .., #B_m)` in canonical block order.
    pub fn block_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.num_blocks()];
        for &l in &self.labels {
            sizes[l as usize] += 1;
        }
        sizes
    }

    /// The type `(1^{r_1} 2^{r_2} ..)` of the partition.
    pub fn partition_type(&self) -> TypeVector {
        TypeVector::from_sizes(&self.block_sizes())
    }

    /// True iff every block of `self` lies inside a block of `other`.
    pub fn refines(&self, other: &Partition) -> Result<bool> {
        if self.n() != other.n() {
            return invalid(format!("partitions of different ground sets ({} vs {})", self.n(), other.n()));
        }
        Ok(self.refines_unchecked(other))
    }

    pub(crate) fn refines_unchecked(&self, other: &Partition) -> bool {
        let mut image = [u8::MAX; 256];
        for (&a, &b) in self.labels.iter().zip(&other.labels) {
            let slot = &mut image[a as usize];
            if *slot == u8::MAX {
                *slot = b;
            } else if *slot != b {
                return false;
            }
        }
        true
    }

    /// Re-derives canonical form (identity on valid values).
    pub fn canonicalize(&self) -> Partition {
        Self::from_labels(&self.labels).expect("a partition is always a valid labelling")
    }
}

fn check_ground_size(n: usize) -> Result<()> {
    if n == 0 {
        return invalid("partitions need a nonempty ground set");
    }
    if n > u8::MAX as usize {
        return invalid(format!("ground set of size {n} exceeds {}", u8::MAX));
    }
    Ok(())
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (b, block) in self.blocks().iter().enumerate() {
            if b > 0 {
                f.write_str(",")?;
            }
            f.write_str("{")?;
            for (i, e) in block.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{}", e + 1)?;
            }
            f.write_str("}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Partition({self})")
    }
}

/// Multiplicities `(r_1, .., r_k)`: `r_j` blocks of size `j` (for a
/// partition) or `r_j` coarse blocks made of `j` fine blocks (for a segment).
/// Stored densely up to the largest `j` with `r_j > 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TypeVector {
    counts: Vec<usize>,
}

impl TypeVector {
    /// Trailing zeros are trimmed.
    pub fn new(counts: Vec<usize>) -> Self {
        let mut counts = counts;
        while counts.last() == Some(&0) {
            counts.pop();
        }
        Self { counts }
    }

    pub fn from_sizes(sizes: &[usize]) -> Self {
        let max = sizes.iter().copied().max().unwrap_or(0);
        let mut counts = vec![0; max];
        for &s in sizes {
            if s > 0 {
                counts[s - 1] += 1;
            }
        }
        Self { counts }
    }

    /// `counts()[j-1] == r_j`.
    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    /// `Σ j r_j`.
    pub fn weight(&self) -> usize {
        self.counts.iter().enumerate().map(|(j, &r)| (j + 1) * r).sum()
    }

    /// `Σ r_j`.
    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    /// Block sizes in non-decreasing order: `[r_1, r_2, ..]` expanded as
    /// `(1,..,1, 2,..,2, ..)`.
    pub fn expanded_sizes(&self) -> Vec<usize> {
        self.counts.iter().enumerate().flat_map(|(j, &r)| std::iter::repeat_n(j + 1, r)).collect()
    }

    /// The partition `{{1},..,{r_1},{r_1+1,r_1+2},..}` with consecutive
    /// blocks of non-decreasing size.
    pub fn representative(&self) -> Result<Partition> {
        let n = self.weight();
        let mut labels = Vec::with_capacity(n);
        for (b, size) in self.expanded_sizes().into_iter().enumerate() {
            labels.extend(std::iter::repeat_n(b, size));
        }
        Partition::from_labels(&labels)
    }

    /// All types of weight `n` (integer partitions of `n`).
    pub fn all_of_weight(n: usize) -> Vec<TypeVector> {
        fn rec(remaining: usize, max_part: usize, parts: &mut Vec<usize>, out: &mut Vec<TypeVector>) {
            if remaining == 0 {
                out.push(TypeVector::from_sizes(parts));
                return;
            }
            for p in (1..=max_part.min(remaining)).rev() {
                parts.push(p);
                rec(remaining - p, p, parts, out);
                parts.pop();
            }
        }
        let mut out = Vec::new();
        rec(n, n, &mut Vec::new(), &mut out);
        out
    }
}

/// A permutation of `{0..n-1}` in one-line notation: `images[i] = p(i)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        if n == 0 {
            return invalid("permutation of an empty set");
        }
        let mut seen = vec![false; n];
        for &v in &images {
            if v >= n || seen[v] {
                return invalid(format!("{images:?} is not a permutation of 0..{n}"));
            }
            seen[v] = true;
        }
        Ok(Self { images })
    }

    /// One-line notation with 1-based values, e.g. `[3, 1, 2]` for
    /// `1→3, 2→1, 3→2`.
    pub fn from_one_based(images: &[usize]) -> Result<Self> {
        if images.contains(&0) {
            return invalid("one-based permutation contains 0");
        }
        Self::new(images.iter().map(|v| v - 1).collect())
    }

    pub fn identity(n: usize) -> Self {
        Self { images: (0..n).collect() }
    }

    pub fn n(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.n()];
        for (i, &v) in self.images.iter().enumerate() {
            inv[v] = i;
        }
        Self { images: inv }
    }

    /// `(self ∘ other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Result<Self> {
        if self.n() != other.n() {
            return invalid("composing permutations of different sizes");
        }
        Ok(Self { images: other.images.iter().map(|&i| self.images[i]).collect() })
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &v)| i == v)
    }

    /// Coordinate action on vectors: `p(x) = (x_{p(1)}, .., x_{p(n)})`.
    pub fn permute<T: Clone>(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.n() {
            return invalid(format!("permutation of size {} applied to a vector of length {}", self.n(), x.len()));
        }
        Ok(self.images.iter().map(|&i| x[i].clone()).collect())
    }

    /// All permutations of `{0..n-1}` in lexicographic order.
    pub fn all(n: usize) -> impl Iterator<Item = Permutation> {
        use itertools::Itertools;
        (0..n).permutations(n).map(|images| Permutation { images })
    }
}

/// Lexicographic iterator over restricted-growth strings of length `n`.
pub struct Partitions {
    labels: Vec<u8>,
    // prefix_max[i] = max(labels[0..=i])
    prefix_max: Vec<u8>,
    done: bool,
}

impl Partitions {
    fn new(n: usize) -> Self {
        Self { labels: vec![0; n], prefix_max: vec![0; n], done: false }
    }

    fn advance(&mut self) {
        let n = self.labels.len();
        let mut i = n;
        while i > 1 {
            i -= 1;
            if self.labels[i] <= self.prefix_max[i - 1] {
                self.labels[i] += 1;
                self.prefix_max[i] = self.prefix_max[i - 1].max(self.labels[i]);
                for j in i + 1..n {
                    self.labels[j] = 0;
                    self.prefix_max[j] = self.prefix_max[i];
                }
                return;
            }
        }
        self.done = true;
    }
}

impl Iterator for Partitions {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        if self.done {
            return None;
        }
        let p = Partition { labels: self.labels.clone(), num_blocks: self.prefix_max.last().map_or(0, |m| m + 1) };
        self.advance();
        Some(p)
    }
}

/// Lazily enumerates `Π_n` in lexicographic restricted-growth order.
pub fn partitions(n: usize) -> Result<Partitions> {
    if n == 0 || n > MAX_ENUMERATION_N {
        return invalid(format!("enumeration needs 1 <= n <= {MAX_ENUMERATION_N}, got {n}"));
    }
    Ok(Partitions::new(n))
}

/// All of `Π_n`, each exactly once, in lexicographic restricted-growth order.
pub fn enumerate_partitions(n: usize) -> Result<Vec<Partition>> {
    Ok(partitions(n)?.collect())
}

/// Bell numbers by the recurrence `B(n+1) = Σ_k C(n,k) B(k)`.
pub fn bell_number(n: usize) -> u128 {
    let mut bell = vec![1u128];
    for m in 0..n {
        let mut next = 0u128;
        let mut binom = 1u128;
        for k in 0..=m {
            next += binom * bell[k];
            binom = binom * (m - k) as u128 / (k + 1) as u128;
        }
        bell.push(next);
    }
    bell[n]
}

pub fn is_refinement(sigma: &Partition, pi: &Partition) -> Result<bool> {
    sigma.refines(pi)
}

pub fn block_size_vector(sigma: &Partition) -> Vec<usize> {
    sigma.block_sizes()
}

fn require_refinement(sigma: &Partition, pi: &Partition) -> Result<()> {
    if !sigma.refines(pi)? {
        return invalid(format!("{sigma} is not a refinement of {pi}"));
    }
    Ok(())
}

/// Type of the segment `[σ, π]`: `r_j` counts blocks of `π` that split into
/// exactly `j` blocks of `σ`.
pub fn segment_type(sigma: &Partition, pi: &Partition) -> Result<TypeVector> {
    require_refinement(sigma, pi)?;
    Ok(segment_type_unchecked(sigma, pi))
}

fn segment_type_unchecked(sigma: &Partition, pi: &Partition) -> TypeVector {
    let mut splits = vec![0usize; pi.num_blocks()];
    let mut seen = vec![false; sigma.num_blocks()];
    for (&s, &p) in sigma.labels.iter().zip(&pi.labels) {
        if !seen[s as usize] {
            seen[s as usize] = true;
            splits[p as usize] += 1;
        }
    }
    TypeVector::from_sizes(&splits)
}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

fn mobius_closed_form(sigma: &Partition, pi: &Partition) -> i64 {
    let t = segment_type_unchecked(sigma, pi);
    let mut value: i64 = 1;
    for (j, &r) in t.counts().iter().enumerate() {
        // a coarse block made of j+1 fine blocks contributes j!
        let f = factorial(j) as i64;
        for _ in 0..r {
            value *= f;
        }
    }
    if (sigma.num_blocks() - pi.num_blocks()) % 2 == 1 {
        -value
    } else {
        value
    }
}

/// Möbius function of the segment `[σ, π]`, from the closed form
/// `(-1)^{m-k} Π_j ((j-1)!)^{r_j}`.
pub fn mobius(sigma: &Partition, pi: &Partition) -> Result<i64> {
    require_refinement(sigma, pi)?;
    let value = mobius_closed_form(sigma, pi);
    #[cfg(debug_assertions)]
    if sigma.num_blocks() <= 4 {
        let collapsed = collapse_interval_unchecked(sigma, pi);
        debug_assert_eq!(value, recursive_mobius_from_bottom(&collapsed));
    }
    Ok(value)
}

// μ(0̂, ρ) on Π_m by recursion, tabulated once per m.
#[cfg(debug_assertions)]
fn recursive_mobius_from_bottom(rho: &Partition) -> i64 {
    use std::cell::RefCell;
    use std::collections::HashMap;

    thread_local! {
        static TABLES: RefCell<HashMap<usize, HashMap<Partition, i64>>> =
            RefCell::new(HashMap::new());
    }
    let m = rho.n();
    TABLES.with(|tables| {
        let mut tables = tables.borrow_mut();
        let table = tables.entry(m).or_insert_with(|| {
            let bottom = Partition::finest(m).expect("m >= 1");
            mobius_row_by_recursion(&bottom).expect("small m").into_iter().collect()
        });
        table[rho]
    })
}

/// `μ(σ, τ)` for every `τ ≥ σ`, from the defining recursion
/// `Σ_{σ≤τ≤π} μ(σ,τ) = δ_{σπ}`. Independent of the closed form.
pub fn mobius_row_by_recursion(sigma: &Partition) -> Result<Vec<(Partition, i64)>> {
    let mut up: Vec<Partition> = partitions(sigma.n())?.filter(|tau| sigma.refines_unchecked(tau)).collect();
    // finer partitions first: every τ' < τ has strictly more blocks
    up.sort_by_key(|tau| std::cmp::Reverse(tau.num_blocks()));
    let mut values: Vec<i64> = Vec::with_capacity(up.len());
    for (i, tau) in up.iter().enumerate() {
        let v = if tau == sigma {
            1
        } else {
            let s: i64 = up[..i]
                .iter()
                .zip(&values)
                .filter(|(rho, _)| rho.num_blocks() > tau.num_blocks() && rho.refines_unchecked(tau))
                .map(|(_, &v)| v)
                .sum();
            -s
        };
        values.push(v);
    }
    Ok(up.into_iter().zip(values).collect())
}

/// `μ(σ, π)` from the defining recursion on the interval.
pub fn mobius_by_recursion(sigma: &Partition, pi: &Partition) -> Result<i64> {
    require_refinement(sigma, pi)?;
    let mut interval: Vec<Partition> =
        partitions(sigma.n())?.filter(|tau| sigma.refines_unchecked(tau) && tau.refines_unchecked(pi)).collect();
    interval.sort_by_key(|tau| std::cmp::Reverse(tau.num_blocks()));
    let mut values: Vec<i64> = Vec::with_capacity(interval.len());
    for (i, tau) in interval.iter().enumerate() {
        let v = if tau == sigma {
            1
        } else {
            -interval[..i]
                .iter()
                .zip(&values)
                .filter(|(rho, _)| rho.num_blocks() > tau.num_blocks() && rho.refines_unchecked(tau))
                .map(|(_, &v)| v)
                .sum::<i64>()
        };
        if tau == pi {
            return Ok(v);
        }
        values.push(v);
    }
    unreachable!("π lies in its own interval")
}

/// The image `π*` of `π ∈ [σ, 1̂]` in `Π_{#σ}`: block `W_i` of `π*` collects
/// the indices of the `σ`-blocks merged into the `i`-th block of `π`.
pub fn collapse_interval(sigma: &Partition, pi: &Partition) -> Result<Partition> {
    require_refinement(sigma, pi)?;
    Ok(collapse_interval_unchecked(sigma, pi))
}

fn collapse_interval_unchecked(sigma: &Partition, pi: &Partition) -> Partition {
    let mut star = vec![0u8; sigma.num_blocks()];
    for (&s, &p) in sigma.labels.iter().zip(&pi.labels) {
        star[s as usize] = p;
    }
    Partition::from_labels(&star).expect("σ has at least one block")
}

/// Inverse of [`collapse_interval`]: lifts `ρ ∈ Π_{#σ}` to the partition
/// of `{0..n-1}` whose blocks are unions of `σ`-blocks grouped by `ρ`.
pub fn expand_interval(sigma: &Partition, rho: &Partition) -> Result<Partition> {
    if rho.n() != sigma.num_blocks() {
        return invalid(format!("{rho} is not a partition of the {} blocks of {sigma}", sigma.num_blocks()));
    }
    let labels: Vec<u8> = sigma.labels.iter().map(|&s| rho.labels[s as usize]).collect();
    Partition::from_labels(&labels)
}

/// Every `π ≥ σ`, obtained by lifting `Π_{#σ}` through [`expand_interval`].
pub fn partitions_above(sigma: &Partition) -> Result<Vec<Partition>> {
    partitions(sigma.num_blocks())?.map(|rho| expand_interval(sigma, &rho)).collect()
}

/// `p(σ)` in canonical order, together with the permutation `p₁` of block
/// indices such that `p(B_{p₁(0)}), p(B_{p₁(1)}), ..` are the canonically
/// ordered blocks of `p(σ)`.
pub fn permute_partition(p: &Permutation, sigma: &Partition) -> Result<(Partition, Permutation)> {
    if p.n() != sigma.n() {
        return invalid(format!("permutation of size {} applied to a partition of size {}", p.n(), sigma.n()));
    }
    let mut image_labels = vec![0u8; sigma.n()];
    for (i, &l) in sigma.labels.iter().enumerate() {
        image_labels[p.apply(i)] = l;
    }
    let image = Partition::from_labels(&image_labels)?;
    // new block k came from old block image_labels[first element of k]
    let mut order = vec![usize::MAX; sigma.num_blocks()];
    for (e, &old) in image_labels.iter().enumerate() {
        let k = image.block_of(e);
        if order[k] == usize::MAX {
            order[k] = old as usize;
        }
    }
    Ok((image, Permutation::new(order)?))
}

/// `n! / Π_j ((j!)^{r_j} r_j!)`, the number of partitions of type `t`.
pub fn count_by_type(n: usize, t: &TypeVector) -> Result<u128> {
    if t.weight() != n {
        return invalid(format!("type {:?} has weight {}, not {n}", t.counts(), t.weight()));
    }
    if n > 30 {
        return invalid("count_by_type supports n <= 30");
    }
    let mut denom: u128 = 1;
    for (j, &r) in t.counts().iter().enumerate() {
        denom *= factorial(j + 1).pow(r as u32) * factorial(r);
    }
    Ok(factorial(n) / denom)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Partition {
        Partition::parse(s).unwrap()
    }

    #[test]
    fn enumeration_small_cases() {
        let one = enumerate_partitions(1).unwrap();
        assert_eq!(one, vec![p("{{1}}")]);
        assert_eq!(enumerate_partitions(3).unwrap().len(), 5);
        assert_eq!(enumerate_partitions(4).unwrap().len(), 15);
        assert!(enumerate_partitions(0).is_err());
        assert!(enumerate_partitions(13).is_err());
    }

    #[test]
    fn enumeration_is_lexicographic_and_canonical() {
        let all = enumerate_partitions(5).unwrap();
        for w in all.windows(2) {
            assert!(w[0].labels() < w[1].labels());
        }
        for q in &all {
            assert_eq!(&q.canonicalize(), q);
        }
    }

    #[test]
    fn bell_recurrence() {
        let expected = [1u128, 1, 2, 5, 15, 52, 203, 877, 4140, 21147, 115975, 678570, 4213597];
        for (n, &b) in expected.iter().enumerate() {
            assert_eq!(bell_number(n), b);
        }
    }

    #[test]
    fn parse_and_display_round_trip() {
        let q = p("{{2, 4}, {1}, {3}}");
        assert_eq!(q.to_string(), "{{1},{2,4},{3}}");
        assert_eq!(q.block_sizes(), vec![1, 2, 1]);
        assert!(Partition::parse("{{1},{1}}").is_err());
        assert!(Partition::parse("{{1},{3}}").is_err());
    }

    #[test]
    fn refinement_examples() {
        let bottom = Partition::finest(3).unwrap();
        for q in enumerate_partitions(3).unwrap() {
            assert!(is_refinement(&bottom, &q).unwrap());
        }
        assert!(!is_refinement(&p("{{1,2},{3}}"), &p("{{1,3},{2}}")).unwrap());
        assert!(is_refinement(&p("{{1},{2},{3,4}}"), &p("{{1},{2,3,4}}")).unwrap());
        assert!(is_refinement(&bottom, &Partition::finest(4).unwrap()).is_err());
    }

    #[test]
    fn block_size_vectors() {
        assert_eq!(block_size_vector(&Partition::coarsest(5).unwrap()), vec![5]);
        assert_eq!(block_size_vector(&Partition::finest(3).unwrap()), vec![1, 1, 1]);
    }

    #[test]
    fn segment_types() {
        let b3 = Partition::finest(3).unwrap();
        let t3 = Partition::coarsest(3).unwrap();
        assert_eq!(segment_type(&b3, &t3).unwrap().counts(), &[0, 0, 1]);
        let s = p("{{1,2},{3},{4}}");
        assert_eq!(segment_type(&s, &s).unwrap().counts(), &[3]);
        let b4 = Partition::finest(4).unwrap();
        assert_eq!(segment_type(&b4, &p("{{1,2},{3,4}}")).unwrap().counts(), &[0, 2]);
        assert!(segment_type(&t3, &b3).is_err());
    }

    #[test]
    fn mobius_examples() {
        let s = p("{{1,3},{2}}");
        assert_eq!(mobius(&s, &s).unwrap(), 1);
        let b3 = Partition::finest(3).unwrap();
        assert_eq!(mobius(&b3, &Partition::coarsest(3).unwrap()).unwrap(), 2);
        let b2 = Partition::finest(2).unwrap();
        assert_eq!(mobius(&b2, &Partition::coarsest(2).unwrap()).unwrap(), -1);
        assert!(mobius(&Partition::coarsest(2).unwrap(), &b2).is_err());
    }

    #[test]
    fn mobius_closed_form_matches_recursion_on_pi5() {
        for sigma in enumerate_partitions(5).unwrap() {
            for (pi, rec) in mobius_row_by_recursion(&sigma).unwrap() {
                assert_eq!(mobius(&sigma, &pi).unwrap(), rec, "[{sigma}, {pi}]");
            }
        }
        let b = Partition::finest(4).unwrap();
        let t = p("{{1,2,3},{4}}");
        assert_eq!(mobius_by_recursion(&b, &t).unwrap(), 2);
    }

    #[test]
    fn collapse_examples() {
        let s = p("{{1},{2},{3,4}}");
        assert_eq!(collapse_interval(&s, &s).unwrap(), Partition::finest(3).unwrap());
        assert_eq!(collapse_interval(&s, &Partition::coarsest(4).unwrap()).unwrap(), Partition::coarsest(3).unwrap());
        assert_eq!(collapse_interval(&s, &p("{{1,3,4},{2}}")).unwrap(), p("{{1,3},{2}}"));
        let star = p("{{1,3},{2}}");
        assert_eq!(expand_interval(&s, &star).unwrap(), p("{{1,3,4},{2}}"));
        assert!(expand_interval(&s, &Partition::finest(4).unwrap()).is_err());
    }

    #[test]
    fn permute_partition_examples() {
        let s = p("{{1,2},{3}}");
        let (img, p1) = permute_partition(&Permutation::identity(3), &s).unwrap();
        assert_eq!(img, s);
        assert!(p1.is_identity());

        let perm = Permutation::from_one_based(&[3, 1, 2]).unwrap();
        let (img, p1) = permute_partition(&perm, &s).unwrap();
        assert_eq!(img, p("{{1,3},{2}}"));
        assert!(p1.is_identity());

        let top = Partition::coarsest(4).unwrap();
        let (img, p1) = permute_partition(&Permutation::from_one_based(&[2, 4, 1, 3]).unwrap(), &top).unwrap();
        assert_eq!(img, top);
        assert_eq!(p1, Permutation::identity(1));
        assert!(permute_partition(&perm, &top).is_err());
    }

    #[test]
    fn block_reordering_permutation() {
        // p sends {1},{2,3} to {3},{1,2}: the second block becomes first
        let s = p("{{1},{2,3}}");
        let perm = Permutation::from_one_based(&[3, 1, 2]).unwrap();
        let (img, p1) = permute_partition(&perm, &s).unwrap();
        assert_eq!(img, p("{{1,2},{3}}"));
        assert_eq!(p1.images(), &[1, 0]);
        assert_eq!(p1.permute(&s.block_sizes()).unwrap(), img.block_sizes());
    }

    #[test]
    fn counts_by_type() {
        assert_eq!(count_by_type(4, &TypeVector::new(vec![2, 1])).unwrap(), 6);
        assert_eq!(count_by_type(3, &TypeVector::new(vec![3])).unwrap(), 1);
        assert_eq!(count_by_type(6, &TypeVector::new(vec![0, 3])).unwrap(), 15);
        assert!(count_by_type(5, &TypeVector::new(vec![0, 2])).is_err());
    }

    #[test]
    fn types_of_weight() {
        let types = TypeVector::all_of_weight(4);
        assert_eq!(types.len(), 5);
        let total: u128 = types.iter().map(|t| count_by_type(4, t).unwrap()).sum();
        assert_eq!(total, 15);
        let rep = TypeVector::new(vec![1, 1]).representative().unwrap();
        assert_eq!(rep, p("{{1},{2,3}}"));
    }

    #[test]
    fn permutation_basics() {
        let q = Permutation::from_one_based(&[2, 3, 1]).unwrap();
        assert_eq!(q.compose(&q.inverse()).unwrap(), Permutation::identity(3));
        assert_eq!(q.permute(&['x', 'y', 'z']).unwrap(), vec!['y', 'z', 'x']);
        assert!(Permutation::new(vec![0, 0]).is_err());
        assert_eq!(Permutation::all(4).count(), 24);
    }
}
