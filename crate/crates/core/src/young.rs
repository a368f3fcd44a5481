//! Number partitions, Young subgroups with canonical consecutive blocks,
//! right cosets and the coset-action matrix `T̂` on them.
//!
//! A right coset `Hg` is labelled by the word `w` with `w[j]` the index of
//! the block `Δ_k` such that `j ∈ g(Δ_k)`. Right multiplication by `t`
//! permutes positions: `w'[t(i)] = w[i]`, so an adjacent transposition
//! swaps two neighbouring letters of the label.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{map_indexed, Execution};
use crate::perm::{adjacent_generators, inverse, Permutation};

pub const DEFAULT_COSET_BUDGET: usize = 10_000_000;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct NumberPartition {
    parts: Vec<usize>,
}

impl NumberPartition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidPartition("no parts".into()));
        }
        if parts.contains(&0) {
            return Err(Error::InvalidPartition(format!(
                "{parts:?} has a zero part"
            )));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidPartition(format!(
                "{parts:?} is not weakly decreasing"
            )));
        }
        Ok(NumberPartition { parts })
    }

    /// Parses a partition and checks that it sums to `n`.
    pub fn parse_for(s: &str, n: usize) -> Result<Self> {
        let p: NumberPartition = s.parse()?;
        if p.n() != n {
            return Err(Error::InvalidPartition(format!(
                "{p} sums to {} but n = {n}",
                p.n()
            )));
        }
        Ok(p)
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn n(&self) -> usize {
        self.parts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `Π λᵢ!`, the order of the Young subgroup.
    pub fn young_order(&self) -> BigUint {
        self.parts.iter().map(|&p| factorial(p)).product()
    }

    /// Conjugate (transposed) partition.
    pub fn conjugate(&self) -> NumberPartition {
        let cols = self.parts[0];
        let parts = (0..cols)
            .map(|c| self.parts.iter().filter(|&&p| p > c).count())
            .collect();
        NumberPartition { parts }
    }

    /// All partitions of `n` in reverse lexicographic order, `(n)` first.
    pub fn all(n: usize) -> Vec<NumberPartition> {
        fn rec(rest: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<NumberPartition>) {
            if rest == 0 {
                out.push(NumberPartition { parts: cur.clone() });
                return;
            }
            for p in (1..=rest.min(max)).rev() {
                cur.push(p);
                rec(rest - p, p, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        if n > 0 {
            rec(n, n, &mut Vec::new(), &mut out);
        }
        out
    }
}

impl fmt::Display for NumberPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        f.write_str(&s.join(","))
    }
}

impl fmt::Debug for NumberPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({self})")
    }
}

impl FromStr for NumberPartition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches('(').trim_end_matches(')');
        let parts = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad partition part {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        NumberPartition::new(parts)
    }
}

impl TryFrom<Vec<usize>> for NumberPartition {
    type Error = Error;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        NumberPartition::new(v)
    }
}

impl From<NumberPartition> for Vec<usize> {
    fn from(p: NumberPartition) -> Self {
        p.parts
    }
}

pub fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * k)
}

/// `a` dominates `b`: every prefix sum of `a` is at least the matching
/// prefix sum of `b`.
pub fn dominates(a: &NumberPartition, b: &NumberPartition) -> Result<bool> {
    if a.n() != b.n() {
        return Err(Error::InvalidArgument(format!(
            "partitions of different integers: {a} and {b}"
        )));
    }
    let len = a.len().max(b.len());
    let (mut sa, mut sb) = (0, 0);
    for i in 0..len {
        sa += a.parts.get(i).copied().unwrap_or(0);
        sb += b.parts.get(i).copied().unwrap_or(0);
        if sa < sb {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Every partition of `λ.n()` that dominates `λ`.
pub fn dominating_partitions(lambda: &NumberPartition) -> Vec<NumberPartition> {
    NumberPartition::all(lambda.n())
        .into_iter()
        .filter(|mu| dominates(mu, lambda).expect("same n"))
        .collect()
}

/// The Young subgroup `S_{Δ₁} × ⋯ × S_{Δ_m}` with `Δᵢ` the consecutive
/// intervals of sizes `λᵢ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct YoungSubgroup {
    partition: NumberPartition,
    blocks: Vec<std::ops::Range<usize>>,
    block_of: Vec<u8>,
    order: BigUint,
}

impl YoungSubgroup {
    pub fn new(partition: NumberPartition) -> Result<Self> {
        let n = partition.n();
        if n > Permutation::MAX_N || partition.len() > u8::MAX as usize {
            return Err(Error::InvalidPartition(format!("{partition} is too large")));
        }
        let mut blocks = Vec::with_capacity(partition.len());
        let mut block_of = Vec::with_capacity(n);
        let mut start = 0;
        for (k, &p) in partition.parts.iter().enumerate() {
            blocks.push(start..start + p);
            block_of.extend(std::iter::repeat_n(k as u8, p));
            start += p;
        }
        let order = partition.young_order();
        Ok(YoungSubgroup {
            partition,
            blocks,
            block_of,
            order,
        })
    }

    pub fn partition(&self) -> &NumberPartition {
        &self.partition
    }

    pub fn n(&self) -> usize {
        self.block_of.len()
    }

    /// Blocks as 1-based inclusive intervals `(first, last)`.
    pub fn blocks(&self) -> Vec<(usize, usize)> {
        self.blocks.iter().map(|b| (b.start + 1, b.end)).collect()
    }

    pub fn order(&self) -> &BigUint {
        &self.order
    }

    /// `n! / |H|`, or `None` when it does not fit in `u128`.
    pub fn index(&self) -> Option<u128> {
        multinomial(&self.partition.parts)
    }

    pub fn contains(&self, g: &Permutation) -> bool {
        g.n() == self.n()
            && g.images()
                .iter()
                .enumerate()
                .all(|(i, &v)| self.block_of[i] == self.block_of[v as usize])
    }

    /// Uniform random element, by shuffling inside each block.
    pub fn random_element<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> Permutation {
        use rand::seq::SliceRandom;
        let mut w: Vec<u8> = (0..self.n() as u8).collect();
        for b in &self.blocks {
            w[b.clone()].shuffle(rng);
        }
        Permutation::from_zero_based(w)
    }
}

/// Multinomial coefficient `(Σ kᵢ)! / Π kᵢ!`, `None` on `u128` overflow.
pub fn multinomial(counts: &[usize]) -> Option<u128> {
    let mut acc: u128 = 1;
    let mut total = 0usize;
    for &k in counts {
        for i in 1..=k {
            total += 1;
            // acc * total / i is an integer (it is a binomial product).
            let g = gcd(acc, i as u128);
            let a = acc / g;
            let b = total as u128 / (i as u128 / g);
            acc = a.checked_mul(b)?;
        }
    }
    Some(acc)
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Label of a right coset: `block_of[j]` is the block whose image contains
/// the 0-based point `j`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CosetLabel {
    block_of: Vec<u8>,
}

impl CosetLabel {
    pub fn word(&self) -> &[u8] {
        &self.block_of
    }

    /// Block index of the 1-based point `j`.
    pub fn block_of(&self, j: usize) -> usize {
        self.block_of[j - 1] as usize
    }

    /// Label of `(Hg)·t`.
    pub fn act(&self, t: &Permutation) -> CosetLabel {
        let mut w = vec![0u8; self.block_of.len()];
        for (i, &ti) in t.images().iter().enumerate() {
            w[ti as usize] = self.block_of[i];
        }
        CosetLabel { block_of: w }
    }

    /// A representative `g` of the coset, the one whose blocks are filled
    /// in increasing order.
    pub fn representative(&self, h: &YoungSubgroup) -> Permutation {
        let mut next: Vec<usize> = h.blocks.iter().map(|b| b.start).collect();
        let mut ginv = vec![0u8; self.block_of.len()];
        for (j, &k) in self.block_of.iter().enumerate() {
            ginv[j] = next[k as usize] as u8;
            next[k as usize] += 1;
        }
        inverse(&Permutation::from_zero_based(ginv))
    }
}

impl fmt::Debug for CosetLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self
            .block_of
            .iter()
            .map(|&b| char::from_digit(b as u32, 36).unwrap_or('?'))
            .collect();
        write!(f, "CosetLabel({s})")
    }
}

pub fn coset_label(h: &YoungSubgroup, g: &Permutation) -> Result<CosetLabel> {
    if g.n() != h.n() {
        return Err(Error::LengthMismatch(g.n(), h.n()));
    }
    let mut w = vec![0u8; h.n()];
    for (i, &gi) in g.images().iter().enumerate() {
        w[gi as usize] = h.block_of[i];
    }
    Ok(CosetLabel { block_of: w })
}

fn check_budget(h: &YoungSubgroup, budget: usize) -> Result<usize> {
    match h.index() {
        Some(d) if d <= budget as u128 => Ok(d as usize),
        other => Err(Error::BudgetExceeded {
            what: "coset enumeration",
            needed: other.map_or_else(|| format!("{}!/{}", h.n(), h.order()), |d| d.to_string()),
            limit: budget,
        }),
    }
}

/// All coset labels in lexicographic order of their words.
pub fn enumerate_cosets(h: &YoungSubgroup, budget: usize) -> Result<Vec<CosetLabel>> {
    let dim = check_budget(h, budget)?;
    let mut word = h.block_of.clone();
    let mut out = Vec::with_capacity(dim);
    loop {
        out.push(CosetLabel {
            block_of: word.clone(),
        });
        if !next_multiset_permutation(&mut word) {
            break;
        }
    }
    debug_assert_eq!(out.len(), dim);
    Ok(out)
}

fn next_multiset_permutation(w: &mut [u8]) -> bool {
    let n = w.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && w[i - 1] >= w[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while w[j] <= w[i - 1] {
        j -= 1;
    }
    w.swap(i - 1, j);
    w[i..].reverse();
    true
}

/// Lexicographic rank of a coset label among all labels with the same
/// letter multiplicities.
pub struct LabelRanker {
    blocks: usize,
}

impl LabelRanker {
    pub fn new(h: &YoungSubgroup) -> Self {
        LabelRanker {
            blocks: h.partition.len(),
        }
    }

    pub fn rank(&self, w: &[u8]) -> usize {
        let mut counts = vec![0usize; self.blocks];
        for &b in w {
            counts[b as usize] += 1;
        }
        let mut rank: u128 = 0;
        let mut remaining = w.len() as u128;
        // Number of arrangements of the remaining letters.
        let mut total = multinomial(&counts).expect("budget checked");
        for &b in w {
            let b = b as usize;
            for c in 0..b {
                if counts[c] > 0 {
                    // arrangements with letter c placed here
                    rank += total * counts[c] as u128 / remaining;
                }
            }
            total = total * counts[b] as u128 / remaining;
            counts[b] -= 1;
            remaining -= 1;
        }
        rank as usize
    }
}

/// Square nonnegative integer matrix in compressed row form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseMatrix {
    dim: usize,
    rows: Vec<Vec<(u32, u32)>>,
}

impl SparseMatrix {
    pub fn from_rows(rows: Vec<Vec<(u32, u32)>>) -> Self {
        SparseMatrix {
            dim: rows.len(),
            rows,
        }
    }

    pub fn from_dense(dense: &[Vec<i64>]) -> Result<Self> {
        let dim = dense.len();
        let rows = dense
            .iter()
            .map(|r| {
                if r.len() != dim {
                    return Err(Error::InvalidArgument("matrix is not square".into()));
                }
                r.iter()
                    .enumerate()
                    .filter(|(_, &v)| v != 0)
                    .map(|(j, &v)| {
                        u32::try_from(v)
                            .map(|v| (j as u32, v))
                            .map_err(|_| Error::InvalidArgument(format!("entry {v} out of range")))
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;
        Ok(SparseMatrix { dim, rows })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[(u32, u32)] {
        &self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.rows[i]
            .binary_search_by_key(&(j as u32), |&(c, _)| c)
            .map(|k| self.rows[i][k].1)
            .unwrap_or(0)
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// `(i, j, value)` in row-major order.
    pub fn triples(&self) -> impl Iterator<Item = (usize, usize, u32)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(i, r)| r.iter().map(move |&(j, v)| (i, j as usize, v)))
    }

    pub fn row_sums(&self) -> Vec<u64> {
        self.rows
            .iter()
            .map(|r| r.iter().map(|&(_, v)| v as u64).sum())
            .collect()
    }

    pub fn col_sums(&self) -> Vec<u64> {
        let mut s = vec![0u64; self.dim];
        for (_, j, v) in self.triples() {
            s[j] += v as u64;
        }
        s
    }

    pub fn trace(&self) -> u64 {
        (0..self.dim).map(|i| self.get(i, i) as u64).sum()
    }

    pub fn is_symmetric(&self) -> bool {
        self.triples().all(|(i, j, v)| self.get(j, i) == v)
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut d = vec![vec![0i64; self.dim]; self.dim];
        for (i, j, v) in self.triples() {
            d[i][j] = v as i64;
        }
        d
    }

    /// `P M Pᵀ` for the permutation sending index `i` to `order[i]`'s slot,
    /// i.e. the result has `(a, b)` entry `M[order[a]][order[b]]`.
    pub fn permuted(&self, order: &[usize]) -> SparseMatrix {
        let mut pos = vec![0usize; self.dim];
        for (a, &i) in order.iter().enumerate() {
            pos[i] = a;
        }
        let rows = order
            .iter()
            .map(|&i| {
                let mut r: Vec<(u32, u32)> = self.rows[i]
                    .iter()
                    .map(|&(j, v)| (pos[j as usize] as u32, v))
                    .collect();
                r.sort_unstable();
                r
            })
            .collect();
        SparseMatrix {
            dim: self.dim,
            rows,
        }
    }
}

/// The matrix `Σ_{t ∈ T} ρ_X(t)` for `T = S^r ∪ {ξ}` acting on the right
/// cosets of a Young subgroup.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetActionMatrix {
    pub n: usize,
    pub partition: NumberPartition,
    pub generator_radius: usize,
    pub labels: Vec<CosetLabel>,
    pub entries: SparseMatrix,
}

impl CosetActionMatrix {
    pub fn dim(&self) -> usize {
        self.entries.dim()
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.entries.get(i, j)
    }

    pub fn header(&self) -> String {
        format!(
            "kendall-coset-matrix v1 n={} partition={} r={} dim={}",
            self.n,
            self.partition,
            self.generator_radius,
            self.dim()
        )
    }

    /// Writes the textual sparse coordinate format.
    pub fn write_to<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{}", self.header())?;
        for (i, j, v) in self.entries.triples() {
            writeln!(w, "{i} {j} {v}")?;
        }
        Ok(())
    }

    /// Reads a file written by [`Self::write_to`]. Labels are regenerated
    /// from the header, and the coordinates are checked to be row-major.
    pub fn read_from<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty matrix file".into()))?
            .map_err(|e| Error::Parse(e.to_string()))?;
        let hdr = parse_header(
            &header,
            "kendall-coset-matrix",
            &["n", "partition", "r", "dim"],
        )?;
        let n: usize = parse_field(&hdr[0])?;
        let partition = NumberPartition::parse_for(&hdr[1], n)?;
        let r: usize = parse_field(&hdr[2])?;
        let dim: usize = parse_field(&hdr[3])?;
        let h = YoungSubgroup::new(partition.clone())?;
        let labels = enumerate_cosets(&h, usize::MAX)?;
        if labels.len() != dim {
            return Err(Error::Parse(format!(
                "dim {dim} disagrees with partition {partition} ({} cosets)",
                labels.len()
            )));
        }
        let entries = read_triples(lines, dim)?;
        Ok(CosetActionMatrix {
            n,
            partition,
            generator_radius: r,
            labels,
            entries,
        })
    }
}

pub(crate) fn parse_header(line: &str, magic: &str, keys: &[&str]) -> Result<Vec<String>> {
    let mut toks = line.split_whitespace();
    if toks.next() != Some(magic) || toks.next() != Some("v1") {
        return Err(Error::Parse(format!(
            "expected `{magic} v1` header, got {line:?}"
        )));
    }
    let mut vals = Vec::new();
    for (key, tok) in keys.iter().zip(&mut toks) {
        let v = tok
            .strip_prefix(key)
            .and_then(|t| t.strip_prefix('='))
            .ok_or_else(|| Error::Parse(format!("expected {key}=… in header, got {tok:?}")))?;
        vals.push(v.to_string());
    }
    if vals.len() != keys.len() || toks.next().is_some() {
        return Err(Error::Parse(format!("malformed header {line:?}")));
    }
    Ok(vals)
}

pub(crate) fn parse_field<T: FromStr>(s: &str) -> Result<T> {
    s.parse()
        .map_err(|_| Error::Parse(format!("bad header value {s:?}")))
}

pub(crate) fn read_triples<I>(lines: I, dim: usize) -> Result<SparseMatrix>
where
    I: Iterator<Item = std::io::Result<String>>,
{
    let mut rows: Vec<Vec<(u32, u32)>> = vec![Vec::new(); dim];
    let mut last: Option<(usize, usize)> = None;
    for line in lines {
        let line = line.map_err(|e| Error::Parse(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let mut it = line.split_whitespace();
        let mut next = || -> Result<u64> {
            it.next()
                .ok_or_else(|| Error::Parse(format!("short line {line:?}")))?
                .parse()
                .map_err(|_| Error::Parse(format!("bad number in {line:?}")))
        };
        let (i, j, v) = (next()? as usize, next()? as usize, next()?);
        if i >= dim || j >= dim || v == 0 || v > u32::MAX as u64 {
            return Err(Error::Parse(format!("entry out of range: {line:?}")));
        }
        if last.is_some_and(|l| l >= (i, j)) {
            return Err(Error::Parse(format!(
                "entries not in row-major order at {line:?}"
            )));
        }
        last = Some((i, j));
        rows[i].push((j as u32, v as u32));
    }
    Ok(SparseMatrix::from_rows(rows))
}

/// Builds `T̂` for `T = S^r ∪ {ξ}` with `S` the adjacent transpositions.
/// Entry `(i, j)` counts the `t ∈ T` with `(Haᵢ)·t = Haⱼ`.
pub fn coset_action_matrix(
    h: &YoungSubgroup,
    r: usize,
    budget: usize,
    exec: Execution,
) -> Result<CosetActionMatrix> {
    if r < 1 {
        return Err(Error::InvalidArgument(
            "generator radius must be >= 1".into(),
        ));
    }
    let n = h.n();
    let labels = enumerate_cosets(h, budget)?;
    let ranker = LabelRanker::new(h);
    let rows = if r == 1 || n < 2 {
        map_indexed(labels.len(), exec, |i| {
            let w = labels[i].word();
            let mut row = vec![(i as u32, 1u32)];
            let mut fixed = 0;
            for k in 0..n.saturating_sub(1) {
                if w[k] == w[k + 1] {
                    fixed += 1;
                } else {
                    let mut v = w.to_vec();
                    v.swap(k, k + 1);
                    row.push((ranker.rank(&v) as u32, 1));
                }
            }
            row[0].1 += fixed;
            merge_row(row)
        })
    } else {
        let t = adjacent_generators(n)?.with_radius(r).ball_elements();
        map_indexed(labels.len(), exec, |i| {
            let row = t
                .iter()
                .map(|g| (ranker.rank(labels[i].act(g).word()) as u32, 1u32))
                .collect();
            merge_row(row)
        })
    };
    Ok(CosetActionMatrix {
        n,
        partition: h.partition.clone(),
        generator_radius: r,
        labels,
        entries: SparseMatrix::from_rows(rows),
    })
}

fn merge_row(mut row: Vec<(u32, u32)>) -> Vec<(u32, u32)> {
    row.sort_unstable_by_key(|&(j, _)| j);
    let mut out: Vec<(u32, u32)> = Vec::with_capacity(row.len());
    for (j, v) in row {
        match out.last_mut() {
            Some(last) if last.0 == j => last.1 += v,
            _ => out.push((j, v)),
        }
    }
    out
}

/// Whether a simultaneous row/column permutation turns `m` into the
/// tridiagonal matrix with diagonal `(d-1, d-2, …, d-2, d-1)` and unit
/// off-diagonals, `d` the dimension. Returns the path order when it does.
pub fn tridiagonal_order(m: &SparseMatrix) -> Option<Vec<usize>> {
    let d = m.dim();
    if d < 2 || !m.is_symmetric() {
        return None;
    }
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); d];
    for (i, j, v) in m.triples() {
        if i != j {
            if v != 1 {
                return None;
            }
            adj[i].push(j);
        }
    }
    if adj.iter().any(|a| a.is_empty() || a.len() > 2) {
        return None;
    }
    let ends: Vec<usize> = (0..d).filter(|&i| adj[i].len() == 1).collect();
    if ends.len() != 2 {
        return None;
    }
    let mut order = vec![ends[0]];
    let mut prev = usize::MAX;
    let mut cur = ends[0];
    while let Some(&next) = adj[cur].iter().find(|&&x| x != prev) {
        if order.len() == d {
            return None;
        }
        order.push(next);
        prev = cur;
        cur = next;
    }
    if order.len() != d {
        return None;
    }
    let p = m.permuted(&order);
    let diag_ok = (0..d).all(|i| {
        let want = if i == 0 || i == d - 1 { d - 1 } else { d - 2 };
        p.get(i, i) as usize == want
    });
    diag_ok.then_some(order)
}

pub fn is_tridiagonal_conjugate(m: &CosetActionMatrix) -> bool {
    tridiagonal_order(&m.entries).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::compose;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn part(s: &str) -> NumberPartition {
        s.parse().unwrap()
    }

    fn matrix(s: &str, r: usize) -> CosetActionMatrix {
        let h = YoungSubgroup::new(part(s)).unwrap();
        coset_action_matrix(&h, r, DEFAULT_COSET_BUDGET, Execution::Sequential).unwrap()
    }

    #[test]
    fn partition_validation() {
        assert!(NumberPartition::new(vec![]).is_err());
        assert!(NumberPartition::new(vec![1, 2]).is_err());
        assert!(NumberPartition::new(vec![2, 0]).is_err());
        assert!(NumberPartition::parse_for("9,2", 12).is_err());
        assert_eq!(part("(4,4,2)").parts(), &[4, 4, 2]);
        assert_eq!(part("3,2,2").conjugate(), part("3,3,1"));
    }

    #[test]
    fn partition_counts() {
        let counts: Vec<usize> = (1..=15).map(|n| NumberPartition::all(n).len()).collect();
        assert_eq!(
            counts,
            [1, 2, 3, 5, 7, 11, 15, 22, 30, 42, 56, 77, 101, 135, 176]
        );
    }

    #[test]
    fn dominance_examples() {
        for mu in NumberPartition::all(7) {
            assert!(dominates(&part("7"), &mu).unwrap());
            assert!(dominates(&mu, &mu).unwrap());
        }
        assert!(dominates(&part("3,1"), &part("2,2")).unwrap());
        assert!(!dominates(&part("2,2"), &part("3,1")).unwrap());
        assert!(!dominates(&part("3,3"), &part("4,1,1")).unwrap());
        assert!(!dominates(&part("4,1,1"), &part("3,3")).unwrap());
        assert!(dominates(&part("2,1"), &part("2,2")).is_err());
        assert_eq!(dominating_partitions(&part("4,4,4,3")).len(), 54);
    }

    #[test]
    fn coset_counts() {
        let h = YoungSubgroup::new(part("2,2,2")).unwrap();
        let labels = enumerate_cosets(&h, DEFAULT_COSET_BUDGET).unwrap();
        assert_eq!(labels.len(), 90);
        assert!(labels.windows(2).all(|w| w[0] < w[1]));
        for n in 2..=9 {
            let h = YoungSubgroup::new(NumberPartition::new(vec![n - 1, 1]).unwrap()).unwrap();
            assert_eq!(enumerate_cosets(&h, 100).unwrap().len(), n);
        }
        let h = YoungSubgroup::new(part("6,6,2")).unwrap();
        assert_eq!(h.index(), Some(84084));
        assert!(matches!(
            enumerate_cosets(&h, 1000),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn ranker_inverts_enumeration() {
        for s in ["2,2,2", "3,2,1", "4,1,1", "2,2,1,1"] {
            let h = YoungSubgroup::new(part(s)).unwrap();
            let ranker = LabelRanker::new(&h);
            for (i, l) in enumerate_cosets(&h, 10_000).unwrap().iter().enumerate() {
                assert_eq!(ranker.rank(l.word()), i);
            }
        }
    }

    #[test]
    fn identity_label_is_canonical_blocks() {
        let h = YoungSubgroup::new(part("3,2,2")).unwrap();
        let l = coset_label(&h, &Permutation::identity(7)).unwrap();
        assert_eq!(l.word(), &[0, 0, 0, 1, 1, 2, 2]);
    }

    #[test]
    fn labels_over_s7_for_5_1_1() {
        let h = YoungSubgroup::new(part("5,1,1")).unwrap();
        let all: std::collections::BTreeSet<CosetLabel> =
            enumerate_cosets(&h, 100).unwrap().into_iter().collect();
        let mut seen = std::collections::BTreeSet::new();
        let mut w: Vec<u8> = (0..7).collect();
        loop {
            let g = Permutation::from_zero_based(w.clone());
            let l = coset_label(&h, &g).unwrap();
            assert!(all.contains(&l));
            seen.insert(l);
            if !next_multiset_permutation(&mut w) {
                break;
            }
        }
        assert_eq!(seen.len(), 42);
    }

    #[test]
    fn label_is_constant_on_cosets() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let h = YoungSubgroup::new(part("3,2,2,1")).unwrap();
        for _ in 0..1000 {
            let g = Permutation::random(8, &mut rng);
            let x = h.random_element(&mut rng);
            assert!(h.contains(&x));
            let hg = compose(&x, &g).unwrap();
            assert_eq!(coset_label(&h, &hg).unwrap(), coset_label(&h, &g).unwrap());
        }
    }

    #[test]
    fn representative_has_its_label() {
        let h = YoungSubgroup::new(part("3,2,1")).unwrap();
        for l in enumerate_cosets(&h, 100).unwrap() {
            assert_eq!(coset_label(&h, &l.representative(&h)).unwrap(), l);
        }
    }

    #[test]
    fn row_sums_and_symmetry() {
        for s in ["4,1", "2,2,2", "3,2,1", "5,1,1", "3,3", "2,2,1,1"] {
            let m = matrix(s, 1);
            let n = m.n as u64;
            assert!(m.entries.row_sums().iter().all(|&x| x == n), "{s}");
            assert!(m.entries.col_sums().iter().all(|&x| x == n), "{s}");
            assert!(m.entries.is_symmetric(), "{s}");
        }
        let m = matrix("3,2", 2);
        let t = crate::perm::ball_size(5, 2);
        assert!(m
            .entries
            .row_sums()
            .iter()
            .all(|&x| num_bigint::BigUint::from(x) == t));
        assert!(m.entries.is_symmetric());
    }

    #[test]
    fn entries_match_membership_oracle() {
        // |T ∩ aᵢ⁻¹ H aⱼ| counted directly from explicit representatives.
        let h = YoungSubgroup::new(part("2,2,2")).unwrap();
        let m = matrix("2,2,2", 1);
        let t = adjacent_generators(6)
            .unwrap()
            .with_radius(1)
            .ball_elements();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut pairs: Vec<(usize, usize)> = (0..50)
            .map(|_| (rng.random_range(0..90), rng.random_range(0..90)))
            .collect();
        // make sure some nonzero off-diagonal entries are sampled too
        for i in 0..10 {
            let (j, _) = m.entries.row(i)[m.entries.row(i).len() - 1];
            pairs.push((i, j as usize));
        }
        for (i, j) in pairs {
            let ai = m.labels[i].representative(&h);
            let aj_inv = inverse(&m.labels[j].representative(&h));
            let count = t
                .iter()
                .filter(|x| {
                    let y = compose(&compose(&ai, x).unwrap(), &aj_inv).unwrap();
                    h.contains(&y)
                })
                .count();
            assert_eq!(count as u32, m.get(i, j), "entry ({i},{j})");
        }
    }

    #[test]
    fn radius_two_entries_match_membership_oracle() {
        let h = YoungSubgroup::new(part("2,2,1")).unwrap();
        let m = matrix("2,2,1", 2);
        let t = adjacent_generators(5)
            .unwrap()
            .with_radius(2)
            .ball_elements();
        for i in 0..m.dim() {
            for j in 0..m.dim() {
                let ai = m.labels[i].representative(&h);
                let aj_inv = inverse(&m.labels[j].representative(&h));
                let count = t
                    .iter()
                    .filter(|x| h.contains(&compose(&compose(&ai, x).unwrap(), &aj_inv).unwrap()))
                    .count();
                assert_eq!(count as u32, m.get(i, j));
            }
        }
    }

    #[test]
    fn trace_counts_fixed_cosets() {
        for s in ["2,2,2", "3,2,1"] {
            let m = matrix(s, 1);
            let t = adjacent_generators(m.n)
                .unwrap()
                .with_radius(1)
                .ball_elements();
            let fixed: u64 = t
                .iter()
                .map(|g| m.labels.iter().filter(|l| l.act(g) == **l).count() as u64)
                .sum();
            assert_eq!(m.entries.trace(), fixed);
        }
    }

    #[test]
    fn hook_shape_matrix_is_tridiagonal() {
        for n in 5..=9 {
            let m = matrix(&format!("{},1", n - 1), 1);
            assert!(is_tridiagonal_conjugate(&m), "n = {n}");
        }
        let m = matrix("4,1", 1);
        let order = tridiagonal_order(&m.entries).unwrap();
        let p = m.entries.permuted(&order).to_dense();
        assert_eq!(
            p,
            vec![
                vec![4, 1, 0, 0, 0],
                vec![1, 3, 1, 0, 0],
                vec![0, 1, 3, 1, 0],
                vec![0, 0, 1, 3, 1],
                vec![0, 0, 0, 1, 4],
            ]
        );
    }

    #[test]
    fn non_path_matrices_are_not_tridiagonal() {
        let id = SparseMatrix::from_dense(&[vec![1, 0], vec![0, 1]]).unwrap();
        assert!(tridiagonal_order(&id).is_none());
        let m = matrix("2,2,2", 1);
        assert!((0..m.dim()).any(|i| m.entries.row(i).len() > 3));
        assert!(!is_tridiagonal_conjugate(&m));
    }

    #[test]
    fn parallel_matches_sequential() {
        let h = YoungSubgroup::new(part("3,2,2")).unwrap();
        let a = coset_action_matrix(&h, 1, 10_000, Execution::Sequential).unwrap();
        let b = coset_action_matrix(&h, 1, 10_000, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn file_round_trip() {
        let m = matrix("3,2,1", 1);
        let mut buf = Vec::new();
        m.write_to(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("kendall-coset-matrix v1 n=6 partition=3,2,1 r=1 dim=60\n"));
        let back = CosetActionMatrix::read_from(&buf[..]).unwrap();
        assert_eq!(back, m);
        let bad = text.replacen("dim=60", "dim=61", 1);
        assert!(CosetActionMatrix::read_from(bad.as_bytes()).is_err());
    }
}
