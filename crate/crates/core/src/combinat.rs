//! Multi-index partitions, their canonical form and enumeration, and the
//! combinatorial coefficients used throughout the cumulant formulas.
//!
//! - [`MultiIndex`]: a d-tuple of non-negative integers under graded
//!   lexicographic order
//! - [`MultiIndexPartition`]: a no-zero-column matrix whose rows sum to the
//!   target index, kept in canonical form (distinct columns in strictly
//!   increasing lexicographic order, with multiplicities)
//! - [`enumerate_partitions`], [`partition_coefficient`], [`multinomial`],
//!   [`compositions`], [`augmented_partitions`]
//! - [`IntegerPartition`]: the d=1 specialization with its set-partition
//!   count `d_lambda`

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num::bigint::BigInt;
use num::One;

use crate::error::{Error, Result};
use crate::ring::Rational;

/// A tuple of non-negative integers indexing coefficients, moments and
/// cumulants.
///
/// The `Ord` implementation is graded lexicographic: total degree first,
/// then entrywise comparison. Combinatorial operations require dimension
/// at least 1; zero-dimensional indexes appear only as exponent vectors of
/// constant polynomials.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MultiIndex {
    entries: Vec<u32>,
}

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Self {
        MultiIndex { entries }
    }

    /// The zero index of dimension `d`.
    pub fn zero(d: usize) -> Self {
        MultiIndex {
            entries: vec![0; d],
        }
    }

    /// The r-th unit index e_r of dimension `d`.
    pub fn unit(d: usize, r: usize) -> Self {
        let mut entries = vec![0; d];
        entries[r] = 1;
        MultiIndex { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    /// Total degree |i|.
    pub fn total(&self) -> u32 {
        self.entries.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&e| e == 0)
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn get(&self, r: usize) -> u32 {
        self.entries[r]
    }

    /// Entrywise sum; panics on dimension mismatch.
    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        assert_eq!(self.dim(), other.dim(), "multi-index dimension mismatch");
        MultiIndex {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// Entrywise difference, or `None` if any entry would go negative.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        assert_eq!(self.dim(), other.dim(), "multi-index dimension mismatch");
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<u32>>>()
            .map(|entries| MultiIndex { entries })
    }

    /// Entrywise `self <= other`.
    pub fn component_le(&self, other: &MultiIndex) -> bool {
        self.dim() == other.dim()
            && self
                .entries
                .iter()
                .zip(&other.entries)
                .all(|(a, b)| a <= b)
    }

    /// Scale every entry by `k`.
    pub fn scaled(&self, k: u32) -> MultiIndex {
        MultiIndex {
            entries: self.entries.iter().map(|e| e * k).collect(),
        }
    }

    /// i! = product of the factorials of the entries.
    pub fn factorial(&self) -> BigInt {
        self.entries.iter().map(|&e| factorial(e)).product()
    }

    /// Plain lexicographic comparison, the column order inside partitions.
    pub fn lex_cmp(&self, other: &MultiIndex) -> Ordering {
        assert_eq!(self.dim(), other.dim(), "multi-index dimension mismatch");
        self.entries.cmp(&other.entries)
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total()
            .cmp(&other.total())
            .then_with(|| self.entries.cmp(&other.entries))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let strs: Vec<String> = self.entries.iter().map(|e| e.to_string()).collect();
        write!(f, "{}", strs.join(","))
    }
}

impl FromStr for MultiIndex {
    type Err = Error;

    /// Parses the repo-wide serialization "i1,i2,...,id".
    fn from_str(s: &str) -> Result<Self> {
        let entries = s
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::Parse(format!("bad multi-index entry {p:?}")))
            })
            .collect::<Result<Vec<u32>>>()?;
        if entries.is_empty() {
            return Err(Error::Parse("empty multi-index".into()));
        }
        Ok(MultiIndex { entries })
    }
}

/// n!
pub fn factorial(n: u32) -> BigInt {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= k;
    }
    acc
}

/// binom(n, k), zero when k > n.
pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::from(0);
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for j in 0..k {
        acc = acc * (n - j) / (j + 1);
    }
    acc
}

/// binom(i; j) = prod_r binom(i_r, j_r); zero unless j <= i entrywise.
pub fn multi_binomial(i: &MultiIndex, j: &MultiIndex) -> BigInt {
    assert_eq!(i.dim(), j.dim(), "multi-index dimension mismatch");
    i.entries()
        .iter()
        .zip(j.entries())
        .map(|(&a, &b)| binomial(a, b))
        .product()
}

/// All multi-indexes of dimension `d` with total degree exactly `total`,
/// in lexicographic order.
pub fn indices_of_degree(d: usize, total: u32) -> Vec<MultiIndex> {
    assert!(d >= 1);
    let mut out = Vec::new();
    let mut current = vec![0u32; d];
    fn rec(current: &mut Vec<u32>, pos: usize, remaining: u32, out: &mut Vec<MultiIndex>) {
        if pos + 1 == current.len() {
            current[pos] = remaining;
            out.push(MultiIndex::new(current.clone()));
            return;
        }
        for v in 0..=remaining {
            current[pos] = v;
            rec(current, pos + 1, remaining - v, out);
        }
    }
    rec(&mut current, 0, total, &mut out);
    out
}

/// All multi-indexes of dimension `d` with total degree at most `max_total`,
/// in graded lexicographic order (the zero index first).
pub fn indices_up_to(d: usize, max_total: u32) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    for k in 0..=max_total {
        out.extend(indices_of_degree(d, k));
    }
    out
}

/// All indexes j with 0 <= j <= bound entrywise, in lexicographic order.
pub fn sub_indices(bound: &MultiIndex) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    let mut current = vec![0u32; bound.dim()];
    fn rec(bound: &[u32], current: &mut Vec<u32>, pos: usize, out: &mut Vec<MultiIndex>) {
        if pos == bound.len() {
            out.push(MultiIndex::new(current.clone()));
            return;
        }
        for v in 0..=bound[pos] {
            current[pos] = v;
            rec(bound, current, pos + 1, out);
        }
    }
    rec(bound.entries(), &mut current, 0, &mut out);
    out
}

/// Enumeration size limits. Partition counts explode combinatorially, so
/// enumeration refuses inputs beyond the caps instead of exhausting memory.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SizeCaps {
    pub max_dim: usize,
    pub max_degree: u32,
}

impl Default for SizeCaps {
    fn default() -> Self {
        SizeCaps {
            max_dim: 4,
            max_degree: 12,
        }
    }
}

impl SizeCaps {
    pub fn check(&self, i: &MultiIndex) -> Result<()> {
        if i.dim() > self.max_dim {
            return Err(Error::SizeCap(format!(
                "dimension {} exceeds cap {}",
                i.dim(),
                self.max_dim
            )));
        }
        if i.total() > self.max_degree {
            return Err(Error::SizeCap(format!(
                "total degree {} exceeds cap {}",
                i.total(),
                self.max_degree
            )));
        }
        Ok(())
    }
}

/// A partition of a multi-index: a matrix with no zero columns whose rows
/// sum to the target. Canonical form keeps the distinct columns in strictly
/// increasing lexicographic order together with their multiplicities.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MultiIndexPartition {
    target: MultiIndex,
    parts: Vec<(MultiIndex, u32)>,
}

impl MultiIndexPartition {
    /// Builds a partition from columns with multiplicities, canonicalizing
    /// (merging equal columns, sorting) and validating the invariants.
    ///
    /// The empty column list is accepted exactly when the target is the
    /// zero index; that empty partition only arises inside augmented
    /// matrices, never from [`enumerate_partitions`].
    pub fn new(target: MultiIndex, parts: Vec<(MultiIndex, u32)>) -> Result<Self> {
        let mut merged: Vec<(MultiIndex, u32)> = Vec::new();
        let mut sorted = parts;
        sorted.sort_by(|a, b| a.0.lex_cmp(&b.0));
        for (col, mult) in sorted {
            if col.dim() != target.dim() {
                return Err(Error::DimensionMismatch {
                    expected: target.dim(),
                    found: col.dim(),
                });
            }
            if col.is_zero() {
                return Err(Error::InvalidParameter(
                    "partition columns must be nonzero".into(),
                ));
            }
            if mult == 0 {
                continue;
            }
            match merged.last_mut() {
                Some((last, m)) if *last == col => *m += mult,
                _ => merged.push((col, mult)),
            }
        }
        let mut sum = MultiIndex::zero(target.dim());
        for (col, mult) in &merged {
            sum = sum.add(&col.scaled(*mult));
        }
        if sum != target {
            return Err(Error::NotAPartition {
                parts: format!(
                    "{{{}}}",
                    merged
                        .iter()
                        .map(|(c, m)| format!("({c})^{m}"))
                        .collect::<Vec<_>>()
                        .join(", ")
                ),
                target,
            });
        }
        Ok(MultiIndexPartition {
            target,
            parts: merged,
        })
    }

    fn empty(d: usize) -> Self {
        MultiIndexPartition {
            target: MultiIndex::zero(d),
            parts: Vec::new(),
        }
    }

    pub fn target(&self) -> &MultiIndex {
        &self.target
    }

    /// Distinct columns with multiplicities, strictly increasing.
    pub fn parts(&self) -> &[(MultiIndex, u32)] {
        &self.parts
    }

    /// The length l(lambda): total number of columns counting multiplicity.
    pub fn length(&self) -> u32 {
        self.parts.iter().map(|(_, m)| m).sum()
    }

    /// m(lambda)! = product of the factorials of the multiplicities.
    pub fn multiplicity_factorial(&self) -> BigInt {
        self.parts.iter().map(|(_, m)| factorial(*m)).product()
    }

    /// lambda! = product over columns (with multiplicity) of the column
    /// factorials.
    pub fn part_factorial(&self) -> BigInt {
        self.parts
            .iter()
            .map(|(col, m)| num::pow::pow(col.factorial(), *m as usize))
            .product()
    }

    /// Columns repeated by multiplicity, in canonical order.
    pub fn expanded_columns(&self) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        for (col, m) in &self.parts {
            for _ in 0..*m {
                out.push(col.clone());
            }
        }
        out
    }
}

impl Ord for MultiIndexPartition {
    /// Canonical enumeration order: shorter partitions first, ties broken
    /// lexicographically on the expanded column sequence.
    fn cmp(&self, other: &Self) -> Ordering {
        self.target
            .cmp(&other.target)
            .then_with(|| self.length().cmp(&other.length()))
            .then_with(|| {
                let a = self.expanded_columns();
                let b = other.expanded_columns();
                for (x, y) in a.iter().zip(&b) {
                    match x.lex_cmp(y) {
                        Ordering::Equal => continue,
                        ord => return ord,
                    }
                }
                a.len().cmp(&b.len())
            })
    }
}

impl PartialOrd for MultiIndexPartition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MultiIndexPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cols: Vec<String> = self
            .parts
            .iter()
            .map(|(c, m)| {
                if *m == 1 {
                    format!("({c})")
                } else {
                    format!("({c})^{m}")
                }
            })
            .collect();
        write!(f, "{{{}}}", cols.join(", "))
    }
}

/// Enumerates every partition of `i` exactly once, in canonical order,
/// under the default [`SizeCaps`].
pub fn enumerate_partitions(i: &MultiIndex) -> Result<Vec<MultiIndexPartition>> {
    enumerate_partitions_with_caps(i, &SizeCaps::default())
}

/// Enumeration with explicit caps. Recursive descent chooses the next
/// column strictly above the previous one (lexicographically) and subtracts
/// it from the residual target, so every partition is generated in canonical
/// form exactly once with no post-hoc deduplication.
pub fn enumerate_partitions_with_caps(
    i: &MultiIndex,
    caps: &SizeCaps,
) -> Result<Vec<MultiIndexPartition>> {
    if i.is_zero() {
        return Err(Error::ZeroIndexPartition);
    }
    caps.check(i)?;
    let mut out = Vec::new();
    let mut acc: Vec<(MultiIndex, u32)> = Vec::new();
    descend(i, i, None, &mut acc, &mut out);
    let mut parts: Vec<MultiIndexPartition> = out
        .into_iter()
        .map(|parts| MultiIndexPartition {
            target: i.clone(),
            parts,
        })
        .collect();
    parts.sort();
    Ok(parts)
}

fn descend(
    target: &MultiIndex,
    residual: &MultiIndex,
    min_exclusive: Option<&MultiIndex>,
    acc: &mut Vec<(MultiIndex, u32)>,
    out: &mut Vec<Vec<(MultiIndex, u32)>>,
) {
    if residual.is_zero() {
        out.push(acc.clone());
        return;
    }
    for col in sub_indices(residual) {
        if col.is_zero() {
            continue;
        }
        if let Some(min) = min_exclusive {
            if col.lex_cmp(min) != Ordering::Greater {
                continue;
            }
        }
        // Largest multiplicity r with r*col <= residual entrywise.
        let max_mult = col
            .entries()
            .iter()
            .zip(residual.entries())
            .filter(|(c, _)| **c > 0)
            .map(|(c, r)| r / c)
            .min()
            .unwrap_or(0);
        let mut rem = residual.clone();
        for mult in 1..=max_mult {
            rem = rem
                .checked_sub(&col)
                .expect("multiplicity bound guarantees subtraction");
            acc.push((col.clone(), mult));
            descend(target, &rem, Some(&col), acc, out);
            acc.pop();
        }
    }
}

/// The coefficient i!/(m(lambda)! lambda!) attached to a partition in the
/// cumulant polynomial sum; always a positive integer for a valid partition.
pub fn partition_coefficient(i: &MultiIndex, lambda: &MultiIndexPartition) -> Result<Rational> {
    if lambda.target() != i {
        return Err(Error::NotAPartition {
            parts: lambda.to_string(),
            target: i.clone(),
        });
    }
    let denom = lambda.multiplicity_factorial() * lambda.part_factorial();
    Ok(Rational::new(i.factorial(), denom))
}

/// binom(i; i_1, ..., i_n): the product over coordinates of the row-wise
/// multinomial coefficients. Errors unless the parts sum to `i`.
pub fn multinomial(i: &MultiIndex, parts: &[MultiIndex]) -> Result<Rational> {
    let mut sum = MultiIndex::zero(i.dim());
    for p in parts {
        if p.dim() != i.dim() {
            return Err(Error::DimensionMismatch {
                expected: i.dim(),
                found: p.dim(),
            });
        }
        sum = sum.add(p);
    }
    if &sum != i {
        return Err(Error::PartsDoNotSum);
    }
    let mut denom = BigInt::one();
    for p in parts {
        denom *= p.factorial();
    }
    Ok(Rational::new(i.factorial(), denom))
}

/// All ordered n-tuples of multi-indexes (zero allowed) summing to `i`.
/// The first slot runs from `i` downward, matching the natural expansion
/// order of the multinomial theorem.
pub fn compositions(i: &MultiIndex, n: usize) -> Result<Vec<Vec<MultiIndex>>> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "compositions require n >= 1".into(),
        ));
    }
    let mut out = Vec::new();
    let mut acc: Vec<MultiIndex> = Vec::with_capacity(n);
    fn rec(
        residual: &MultiIndex,
        slots_left: usize,
        acc: &mut Vec<MultiIndex>,
        out: &mut Vec<Vec<MultiIndex>>,
    ) {
        if slots_left == 1 {
            acc.push(residual.clone());
            out.push(acc.clone());
            acc.pop();
            return;
        }
        let mut candidates = sub_indices(residual);
        candidates.reverse();
        for j in candidates {
            let rem = residual.checked_sub(&j).expect("sub_indices bound");
            acc.push(j);
            rec(&rem, slots_left - 1, acc, out);
            acc.pop();
        }
    }
    rec(i, n, &mut acc, &mut out);
    Ok(out)
}

/// An element of P_n(i): an augmented matrix (lambda_1 | ... | lambda_n)
/// with lambda_j a partition of i_j and i_1 + ... + i_n = i. Blocks keep
/// their origin slot; a block for i_j = 0 is the empty partition.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AugmentedPartition {
    target: MultiIndex,
    blocks: Vec<MultiIndexPartition>,
}

impl AugmentedPartition {
    pub fn target(&self) -> &MultiIndex {
        &self.target
    }

    /// The per-slot partitions lambda_1, ..., lambda_n.
    pub fn blocks(&self) -> &[MultiIndexPartition] {
        &self.blocks
    }

    /// l(lambda_j) for each slot.
    pub fn block_lengths(&self) -> Vec<u32> {
        self.blocks.iter().map(|b| b.length()).collect()
    }

    /// i! / (prod_j m(lambda_j)! lambda_j!), the weight of this augmented
    /// matrix in the multinomial expansion.
    pub fn weight(&self) -> Rational {
        let mut denom = BigInt::one();
        for b in &self.blocks {
            denom *= b.multiplicity_factorial() * b.part_factorial();
        }
        Rational::new(self.target.factorial(), denom)
    }

    /// Equal columns grouped across blocks: each distinct column with its
    /// total multiplicity t_j and the (slot, multiplicity) origin labels.
    pub fn grouped_columns(&self) -> Vec<(MultiIndex, u32, Vec<(usize, u32)>)> {
        let mut grouped: Vec<(MultiIndex, u32, Vec<(usize, u32)>)> = Vec::new();
        for (slot, block) in self.blocks.iter().enumerate() {
            for (col, mult) in block.parts() {
                match grouped.iter_mut().find(|(c, _, _)| c == col) {
                    Some((_, t, origins)) => {
                        *t += mult;
                        origins.push((slot, *mult));
                    }
                    None => grouped.push((col.clone(), *mult, vec![(slot, *mult)])),
                }
            }
        }
        grouped.sort_by(|a, b| a.0.lex_cmp(&b.0));
        grouped
    }
}

/// Enumerates the set P_n(i) of augmented matrices used by the
/// multinomial-property expansion.
pub fn augmented_partitions(i: &MultiIndex, n: usize) -> Result<Vec<AugmentedPartition>> {
    augmented_partitions_with_caps(i, n, &SizeCaps::default())
}

pub fn augmented_partitions_with_caps(
    i: &MultiIndex,
    n: usize,
    caps: &SizeCaps,
) -> Result<Vec<AugmentedPartition>> {
    if i.is_zero() {
        return Err(Error::ZeroIndexPartition);
    }
    if n == 0 {
        return Err(Error::InvalidParameter(
            "augmented partitions require n >= 1".into(),
        ));
    }
    caps.check(i)?;
    let mut out = Vec::new();
    for comp in compositions(i, n)? {
        let per_slot: Vec<Vec<MultiIndexPartition>> = comp
            .iter()
            .map(|ij| {
                if ij.is_zero() {
                    Ok(vec![MultiIndexPartition::empty(i.dim())])
                } else {
                    enumerate_partitions_with_caps(ij, caps)
                }
            })
            .collect::<Result<_>>()?;
        let mut acc: Vec<MultiIndexPartition> = Vec::with_capacity(n);
        cartesian(&per_slot, &mut acc, &mut |blocks| {
            out.push(AugmentedPartition {
                target: i.clone(),
                blocks: blocks.to_vec(),
            });
        });
    }
    Ok(out)
}

fn cartesian<T: Clone>(choices: &[Vec<T>], acc: &mut Vec<T>, emit: &mut impl FnMut(&[T])) {
    if acc.len() == choices.len() {
        emit(acc);
        return;
    }
    for item in &choices[acc.len()] {
        acc.push(item.clone());
        cartesian(choices, acc, emit);
        acc.pop();
    }
}

/// An integer partition lambda of i with weakly decreasing parts; the d=1
/// specialization of [`MultiIndexPartition`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IntegerPartition {
    target: u32,
    parts: Vec<u32>,
}

impl IntegerPartition {
    pub fn new(target: u32, mut parts: Vec<u32>) -> Result<Self> {
        parts.sort_unstable_by(|a, b| b.cmp(a));
        if parts.iter().any(|&p| p == 0) {
            return Err(Error::InvalidParameter("zero part".into()));
        }
        if parts.iter().sum::<u32>() != target {
            return Err(Error::PartsDoNotSum);
        }
        Ok(IntegerPartition { target, parts })
    }

    pub fn target(&self) -> u32 {
        self.target
    }

    /// Weakly decreasing parts.
    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn length(&self) -> u32 {
        self.parts.len() as u32
    }

    /// Distinct parts with multiplicities (j, r_j), increasing in j.
    pub fn multiplicities(&self) -> Vec<(u32, u32)> {
        let mut mult: Vec<(u32, u32)> = Vec::new();
        for &p in self.parts.iter().rev() {
            match mult.last_mut() {
                Some((q, r)) if *q == p => *r += 1,
                _ => mult.push((p, 1)),
            }
        }
        mult
    }

    /// d_lambda = i! / ((1!)^{r_1} (2!)^{r_2} ... r_1! r_2! ...), the number
    /// of set partitions of an i-set with block sizes given by the parts.
    pub fn d_lambda(&self) -> Rational {
        let mut denom = BigInt::one();
        for (part, r) in self.multiplicities() {
            denom *= num::pow::pow(factorial(part), r as usize) * factorial(r);
        }
        Rational::new(factorial(self.target), denom)
    }
}

/// All integer partitions of `i`, parts weakly decreasing, enumerated with
/// the largest first part leading.
pub fn enumerate_integer_partitions(i: u32) -> Vec<IntegerPartition> {
    fn rec(remaining: u32, max_part: u32, acc: &mut Vec<u32>, out: &mut Vec<IntegerPartition>) {
        if remaining == 0 {
            out.push(IntegerPartition {
                target: acc.iter().sum(),
                parts: acc.clone(),
            });
            return;
        }
        for part in (1..=remaining.min(max_part)).rev() {
            acc.push(part);
            rec(remaining - part, part, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    let mut acc = Vec::new();
    rec(i, i, &mut acc, &mut out);
    out
}
