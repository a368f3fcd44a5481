//! Permutations of `[n]`, the Kendall tau metric and balls in the Cayley
//! graph generated by adjacent transpositions.
//!
//! Products follow the left-to-right rule `(a·b)(i) = b(a(i))`. Under this
//! rule the Cayley graph joins `g` and `h` when `g·h⁻¹` is a generator,
//! which amounts to swapping two adjacent positions of the one-line word.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A permutation in one-line notation. Points are `1..=n` externally and
/// stored 0-based.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation {
    word: Box<[u8]>,
}

impl Permutation {
    pub const MAX_N: usize = 255;

    pub fn identity(n: usize) -> Self {
        assert!(n <= Self::MAX_N);
        Permutation {
            word: (0..n as u8).collect(),
        }
    }

    /// Builds a permutation from 1-based one-line notation.
    pub fn from_one_line(word: &[usize]) -> Result<Self> {
        let n = word.len();
        if n == 0 {
            return Err(Error::InvalidPermutation("empty word".into()));
        }
        if n > Self::MAX_N {
            return Err(Error::InvalidPermutation(format!("length {n} too large")));
        }
        let mut seen = vec![false; n];
        for &v in word {
            if v == 0 || v > n || seen[v - 1] {
                return Err(Error::InvalidPermutation(format!(
                    "{word:?} is not a bijection on 1..={n}"
                )));
            }
            seen[v - 1] = true;
        }
        Ok(Permutation {
            word: word.iter().map(|&v| (v - 1) as u8).collect(),
        })
    }

    /// Builds a permutation from 0-based images. Panics on invalid input;
    /// intended for internal callers that already hold a bijection.
    pub(crate) fn from_zero_based(word: Vec<u8>) -> Self {
        debug_assert!({
            let mut s = word.clone();
            s.sort_unstable();
            s.iter().enumerate().all(|(i, &v)| v as usize == i)
        });
        Permutation {
            word: word.into_boxed_slice(),
        }
    }

    pub fn n(&self) -> usize {
        self.word.len()
    }

    /// Image of the 1-based point `i`.
    pub fn apply(&self, i: usize) -> usize {
        self.word[i - 1] as usize + 1
    }

    pub(crate) fn images(&self) -> &[u8] {
        &self.word
    }

    pub fn one_line(&self) -> Vec<usize> {
        self.word.iter().map(|&v| v as usize + 1).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.word.iter().enumerate().all(|(i, &v)| v as usize == i)
    }

    /// The transposition exchanging the 1-based points `i` and `i + 1`.
    pub fn adjacent_transposition(n: usize, i: usize) -> Result<Self> {
        if i == 0 || i >= n {
            return Err(Error::InvalidArgument(format!(
                "adjacent transposition ({i},{}) outside [1,{n}]",
                i + 1
            )));
        }
        let mut w: Vec<u8> = (0..n as u8).collect();
        w.swap(i - 1, i);
        Ok(Permutation::from_zero_based(w))
    }

    /// Swaps the entries at 0-based positions `k` and `k + 1`, i.e. returns
    /// `(k+1, k+2)·self`.
    pub(crate) fn swap_positions(&self, k: usize) -> Self {
        let mut w = self.word.to_vec();
        w.swap(k, k + 1);
        Permutation::from_zero_based(w)
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut w: Vec<u8> = (0..n as u8).collect();
        w.shuffle(rng);
        Permutation::from_zero_based(w)
    }

    pub fn reverse(n: usize) -> Self {
        Permutation::from_zero_based((0..n as u8).rev().collect())
    }

    /// Number of pairs `i < j` with `w(i) > w(j)`, by merge sort.
    pub fn inversions(&self) -> u64 {
        fn sort_count(v: &mut [u8], buf: &mut [u8]) -> u64 {
            let n = v.len();
            if n < 2 {
                return 0;
            }
            let mid = n / 2;
            let mut count = {
                let (l, r) = v.split_at_mut(mid);
                let (bl, br) = buf.split_at_mut(mid);
                sort_count(l, bl) + sort_count(r, br)
            };
            let (mut i, mut j, mut k) = (0, mid, 0);
            while i < mid && j < n {
                if v[i] <= v[j] {
                    buf[k] = v[i];
                    i += 1;
                } else {
                    buf[k] = v[j];
                    count += (mid - i) as u64;
                    j += 1;
                }
                k += 1;
            }
            buf[k..k + mid - i].copy_from_slice(&v[i..mid]);
            k += mid - i;
            buf[k..k + n - j].copy_from_slice(&v[j..n]);
            v.copy_from_slice(&buf[..n]);
            count
        }
        let mut v = self.word.to_vec();
        let mut buf = vec![0u8; v.len()];
        sort_count(&mut v, &mut buf)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.word.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", *v as usize + 1)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}]")
    }
}

impl FromStr for Permutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let word = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad permutation entry {t:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Permutation::from_one_line(&word)
    }
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        Permutation::from_one_line(&v)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.one_line()
    }
}

fn check_len(a: &Permutation, b: &Permutation) -> Result<()> {
    if a.n() != b.n() {
        return Err(Error::LengthMismatch(a.n(), b.n()));
    }
    Ok(())
}

/// The product `a·b`, defined by `(a·b)(i) = b(a(i))`.
pub fn compose(a: &Permutation, b: &Permutation) -> Result<Permutation> {
    check_len(a, b)?;
    Ok(Permutation::from_zero_based(
        a.word.iter().map(|&x| b.word[x as usize]).collect(),
    ))
}

pub fn inverse(a: &Permutation) -> Permutation {
    let mut w = vec![0u8; a.n()];
    for (i, &v) in a.word.iter().enumerate() {
        w[v as usize] = i as u8;
    }
    Permutation::from_zero_based(w)
}

/// Kendall tau distance: the inversion count of `a·b⁻¹`.
pub fn kendall_distance(a: &Permutation, b: &Permutation) -> Result<u64> {
    Ok(compose(a, &inverse(b))?.inversions())
}

/// An inverse-closed generating set `S` together with the radius `r` of
/// `T = S^r ∪ {ξ}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorSet {
    n: usize,
    elements: Vec<Permutation>,
    radius: usize,
}

impl GeneratorSet {
    pub fn new(n: usize, elements: Vec<Permutation>, radius: usize) -> Result<Self> {
        let set: BTreeSet<&Permutation> = elements.iter().collect();
        if set.is_empty() {
            return Err(Error::InvalidArgument("empty generator set".into()));
        }
        for g in &elements {
            if g.n() != n {
                return Err(Error::LengthMismatch(g.n(), n));
            }
            if g.is_identity() {
                return Err(Error::InvalidArgument(
                    "generator set contains the identity".into(),
                ));
            }
            if !set.contains(&inverse(g)) {
                return Err(Error::InvalidArgument(format!(
                    "generator set is not inverse closed: missing inverse of {g}"
                )));
            }
        }
        let elements = set.into_iter().cloned().collect();
        Ok(GeneratorSet {
            n,
            elements,
            radius,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn with_radius(mut self, radius: usize) -> Self {
        self.radius = radius;
        self
    }

    /// The set `T = S^r ∪ {ξ}`, i.e. the ball of radius `r` around the
    /// identity.
    pub fn ball_elements(&self) -> Vec<Permutation> {
        bfs_layers(&Permutation::identity(self.n), &self.elements, self.radius)
            .into_iter()
            .flatten()
            .collect()
    }
}

/// The `n - 1` adjacent transpositions `(i, i+1)`.
pub fn adjacent_generators(n: usize) -> Result<GeneratorSet> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "adjacent generators need n >= 2, got {n}"
        )));
    }
    let elements = (1..n)
        .map(|i| Permutation::adjacent_transposition(n, i))
        .collect::<Result<Vec<_>>>()?;
    GeneratorSet::new(n, elements, 1)
}

/// Breadth-first layers `t·center` for `t` in `S^k`, `k = 0..=r`.
fn bfs_layers(center: &Permutation, gens: &[Permutation], r: usize) -> Vec<Vec<Permutation>> {
    let mut seen: HashSet<Permutation> = HashSet::new();
    seen.insert(center.clone());
    let mut layers = vec![vec![center.clone()]];
    for _ in 0..r {
        let mut next = Vec::new();
        for g in layers.last().unwrap() {
            for s in gens {
                let h = compose(s, g).expect("generator length checked");
                if seen.insert(h.clone()) {
                    next.push(h);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        layers.push(next);
    }
    layers
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ball {
    pub center: Permutation,
    pub radius: usize,
    pub members: BTreeSet<Permutation>,
}

impl Ball {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, p: &Permutation) -> bool {
        self.members.contains(p)
    }
}

/// Ball of radius `r` in the adjacent-transposition Cayley graph, by
/// breadth-first expansion.
pub fn ball(center: &Permutation, r: usize) -> Ball {
    let members = if center.n() < 2 {
        std::iter::once(center.clone()).collect()
    } else {
        let gens = adjacent_generators(center.n()).expect("n >= 2");
        bfs_layers(center, gens.elements(), r)
            .into_iter()
            .flatten()
            .collect()
    };
    Ball {
        center: center.clone(),
        radius: r,
        members,
    }
}

/// Mahonian numbers: `counts[k]` is the number of permutations of `[n]`
/// with exactly `k` inversions, `k = 0..=n(n-1)/2`.
pub fn mahonian_row(n: usize) -> Vec<BigUint> {
    let mut row = vec![BigUint::one()];
    for m in 2..=n {
        // Inserting m into a permutation of m-1 elements adds 0..m-1 inversions.
        let len = row.len() + m - 1;
        let mut next = vec![BigUint::zero(); len];
        let mut window = BigUint::zero();
        for k in 0..len {
            if k < row.len() {
                window += &row[k];
            }
            if k >= m {
                window -= &row[k - m];
            }
            next[k] = window.clone();
        }
        row = next;
    }
    row
}

/// Number of permutations of `[n]` with at most `r` inversions.
pub fn ball_size(n: usize, r: usize) -> BigUint {
    mahonian_row(n.max(1)).into_iter().take(r + 1).sum()
}

/// Shortest path from `a` to `b` in the Cayley graph, as the list of
/// vertices `a = p_0, p_1, …, p_d = b`. Bidirectional breadth-first search
/// with generators tried in increasing order, so the result is
/// deterministic.
pub fn shortest_path(a: &Permutation, b: &Permutation) -> Result<Vec<Permutation>> {
    check_len(a, b)?;
    if a == b {
        return Ok(vec![a.clone()]);
    }
    let n = a.n();
    use std::collections::HashMap;
    let mut parent_a: HashMap<Permutation, Option<Permutation>> = HashMap::new();
    let mut parent_b: HashMap<Permutation, Option<Permutation>> = HashMap::new();
    parent_a.insert(a.clone(), None);
    parent_b.insert(b.clone(), None);
    let mut frontier_a = VecDeque::from([a.clone()]);
    let mut frontier_b = VecDeque::from([b.clone()]);

    let meet = loop {
        let forward = frontier_a.len() <= frontier_b.len();
        let (frontier, parents, others) = if forward {
            (&mut frontier_a, &mut parent_a, &parent_b)
        } else {
            (&mut frontier_b, &mut parent_b, &parent_a)
        };
        let mut next = VecDeque::new();
        let mut found = None;
        for g in frontier.drain(..) {
            for k in 0..n - 1 {
                let h = g.swap_positions(k);
                if parents.contains_key(&h) {
                    continue;
                }
                parents.insert(h.clone(), Some(g.clone()));
                if others.contains_key(&h) && found.is_none() {
                    found = Some(h.clone());
                }
                next.push_back(h);
            }
        }
        if let Some(m) = found {
            break m;
        }
        *frontier = next;
    };

    let mut path = Vec::new();
    let mut cur = Some(meet.clone());
    while let Some(p) = cur {
        cur = parent_a[&p].clone();
        path.push(p);
    }
    path.reverse();
    let mut cur = parent_b[&meet].clone();
    while let Some(p) = cur {
        cur = parent_b[&p].clone();
        path.push(p);
    }
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    fn all_perms(n: usize) -> Vec<Permutation> {
        fn rec(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Permutation>) {
            let n = used.len();
            if cur.len() == n {
                out.push(Permutation::from_one_line(cur).unwrap());
                return;
            }
            for v in 1..=n {
                if !used[v - 1] {
                    used[v - 1] = true;
                    cur.push(v);
                    rec(cur, used, out);
                    cur.pop();
                    used[v - 1] = false;
                }
            }
        }
        let mut out = Vec::new();
        rec(&mut Vec::new(), &mut vec![false; n], &mut out);
        out
    }

    /// Graph distance from `a` by plain BFS over the whole group.
    fn bfs_distances(a: &Permutation) -> std::collections::HashMap<Permutation, u64> {
        let gens = adjacent_generators(a.n()).unwrap();
        let mut dist = std::collections::HashMap::new();
        dist.insert(a.clone(), 0u64);
        let mut q = VecDeque::from([a.clone()]);
        while let Some(g) = q.pop_front() {
            let d = dist[&g];
            for s in gens.elements() {
                let h = compose(s, &g).unwrap();
                if !dist.contains_key(&h) {
                    dist.insert(h.clone(), d + 1);
                    q.push_back(h);
                }
            }
        }
        dist
    }

    #[test]
    fn compose_examples() {
        let e = Permutation::identity(3);
        let b = p("1,3,2");
        assert_eq!(compose(&e, &b).unwrap(), b);
        assert_eq!(compose(&p("2,1,3"), &b).unwrap(), p("3,1,2"));
        assert_eq!(compose(&p("1,2"), &b), Err(Error::LengthMismatch(2, 3)));
    }

    #[test]
    fn compose_with_inverse_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let n = rng.random_range(1..=8);
            let a = Permutation::random(n, &mut rng);
            assert!(compose(&a, &inverse(&a)).unwrap().is_identity());
            assert_eq!(inverse(&inverse(&a)), a);
        }
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(inverse(&Permutation::identity(4)), Permutation::identity(4));
        assert_eq!(inverse(&p("2,3,1")), p("3,1,2"));
    }

    #[test]
    fn adjacent_generator_examples() {
        let g3 = adjacent_generators(3).unwrap();
        let set: BTreeSet<_> = g3.elements().iter().cloned().collect();
        assert_eq!(set, [p("2,1,3"), p("1,3,2")].into_iter().collect());
        let g5 = adjacent_generators(5).unwrap();
        assert_eq!(g5.elements().len(), 4);
        for g in g5.elements() {
            assert!(compose(g, g).unwrap().is_identity());
        }
        assert!(adjacent_generators(1).is_err());
    }

    #[test]
    fn generator_set_rejects_identity_and_non_inverse_closed() {
        assert!(GeneratorSet::new(3, vec![Permutation::identity(3)], 1).is_err());
        assert!(GeneratorSet::new(3, vec![p("2,3,1")], 1).is_err());
        assert!(GeneratorSet::new(3, vec![p("2,3,1"), p("3,1,2")], 1).is_ok());
    }

    #[test]
    fn distance_examples() {
        let a = p("3,1,4,2");
        assert_eq!(kendall_distance(&a, &a).unwrap(), 0);
        assert_eq!(
            kendall_distance(&p("2,1,3,4,5"), &Permutation::identity(5)).unwrap(),
            1
        );
        for n in 1..=9 {
            assert_eq!(
                kendall_distance(&Permutation::reverse(n), &Permutation::identity(n)).unwrap(),
                (n * (n - 1) / 2) as u64
            );
        }
    }

    #[test]
    fn distance_matches_bfs_on_s4() {
        let perms = all_perms(4);
        for a in &perms {
            let dist = bfs_distances(a);
            for b in &perms {
                assert_eq!(kendall_distance(a, b).unwrap(), dist[b], "{a} {b}");
            }
        }
    }

    #[test]
    fn metric_axioms_on_s4() {
        let perms = all_perms(4);
        for a in &perms {
            for b in &perms {
                let dab = kendall_distance(a, b).unwrap();
                assert_eq!(dab, kendall_distance(b, a).unwrap());
                assert_eq!(dab == 0, a == b);
                for c in &perms {
                    assert!(
                        dab <= kendall_distance(a, c).unwrap() + kendall_distance(c, b).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn ball_examples() {
        let e4 = Permutation::identity(4);
        assert_eq!(ball(&e4, 0).members, [e4.clone()].into_iter().collect());
        assert_eq!(ball(&e4, 1).len(), 4);
        assert_eq!(ball(&e4, 2).len(), 9);
        let count = all_perms(4).iter().filter(|q| q.inversions() <= 2).count();
        assert_eq!(count, 9);
    }

    #[test]
    fn ball_size_examples() {
        for n in 1..=10 {
            assert_eq!(ball_size(n, 1), BigUint::from(n.max(1)));
        }
        assert_eq!(ball_size(4, 6), BigUint::from(24u32));
        assert_eq!(ball_size(4, 100), BigUint::from(24u32));
        let bfs = ball(&Permutation::identity(6), 2).len();
        assert_eq!(bfs, 1 + 5 + 14);
        assert_eq!(ball_size(6, 2), BigUint::from(bfs));
    }

    #[test]
    fn mahonian_row_sums_to_factorial() {
        let mut f = BigUint::one();
        for n in 1..=20usize {
            f *= n;
            let row = mahonian_row(n);
            assert_eq!(row.len(), n * (n - 1) / 2 + 1);
            assert_eq!(row.iter().sum::<BigUint>(), f);
        }
    }

    #[test]
    fn shortest_path_is_geodesic() {
        let a = Permutation::identity(4);
        let b = Permutation::reverse(4);
        let path = shortest_path(&a, &b).unwrap();
        assert_eq!(path.len(), 7);
        assert_eq!(path[0], a);
        assert_eq!(path[6], b);
        for w in path.windows(2) {
            assert_eq!(kendall_distance(&w[0], &w[1]).unwrap(), 1);
        }
        assert_eq!(shortest_path(&a, &b).unwrap(), path);
    }

    #[test]
    fn parse_and_display() {
        let q = p("2,1,3");
        assert_eq!(q.to_string(), "2,1,3");
        assert!("1,1,2".parse::<Permutation>().is_err());
        assert!("1,x".parse::<Permutation>().is_err());
        assert!("0,1".parse::<Permutation>().is_err());
    }
}
