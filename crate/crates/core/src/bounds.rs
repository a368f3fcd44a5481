//! Bounds on `P(n, d)`, the largest size of a permutation code in `S_n` with
//! minimum Kendall distance `d`.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::ilp::{build_bound_problem, solve_ilp_with, IlpOptions, IlpSolution, IlpStatus};
use crate::linalg::is_prime_u64;
use crate::perm::{ball, ball_size, kendall_distance, shortest_path, Permutation};
use crate::young::{factorial, NumberPartition};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundMethod {
    Trivial,
    SpherePacking,
    AnalyticPrime,
    Ilp,
    BruteForce,
}

impl BoundMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundMethod::Trivial => "trivial",
            BoundMethod::SpherePacking => "sphere_packing",
            BoundMethod::AnalyticPrime => "analytic_prime",
            BoundMethod::Ilp => "ilp",
            BoundMethod::BruteForce => "brute_force",
        }
    }
}

impl fmt::Display for BoundMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Exact,
    UpperBound,
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundKind::Exact => "exact",
            BoundKind::UpperBound => "upper_bound",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundReport {
    pub n: usize,
    pub d: usize,
    pub method: BoundMethod,
    pub value: BigUint,
    pub kind: BoundKind,
    pub partition: Option<NumberPartition>,
    pub provenance: String,
}

fn pairs(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

fn check_n(n: usize) -> Result<()> {
    if !(2..=Permutation::MAX_N).contains(&n) {
        return Err(Error::InvalidArgument(format!(
            "n must lie in 2..={}, got {n}",
            Permutation::MAX_N
        )));
    }
    Ok(())
}

/// Exact values known in closed form: `P(n,1) = n!`, `P(n,2) = n!/2`, and
/// `P(n,d) = 2` for `(2/3)·C(n,2) < d ≤ C(n,2)`.
pub fn trivial_values(n: usize, d: usize) -> Result<Option<BoundReport>> {
    check_n(n)?;
    let report = |value: BigUint, provenance: &str| BoundReport {
        n,
        d,
        method: BoundMethod::Trivial,
        value,
        kind: BoundKind::Exact,
        partition: None,
        provenance: provenance.into(),
    };
    let c = pairs(n);
    Ok(match d {
        1 => Some(report(factorial(n), "P(n,1) = n!")),
        2 => Some(report(factorial(n) / 2u32, "P(n,2) = n!/2")),
        _ if 3 * d > 2 * c && d <= c => Some(report(
            BigUint::from(2u32),
            "P(n,d) = 2 for 2/3 C(n,2) < d <= C(n,2)",
        )),
        _ => None,
    })
}

/// `⌊n! / |B(r)|⌋` with `r = (d − 1)/2`, for odd `d ≥ 3`.
pub fn sphere_packing_bound(n: usize, d: usize) -> Result<BoundReport> {
    check_n(n)?;
    if d < 3 || d % 2 == 0 {
        return Err(Error::InvalidArgument(format!(
            "the sphere packing bound needs odd d >= 3, got {d}"
        )));
    }
    let r = (d - 1) / 2;
    let b = ball_size(n, r);
    Ok(BoundReport {
        n,
        d,
        method: BoundMethod::SpherePacking,
        value: factorial(n) / &b,
        kind: BoundKind::UpperBound,
        partition: None,
        provenance: format!("floor(n!/|B({r})|), |B({r})| = {b}"),
    })
}

fn ceil_third(p: usize) -> usize {
    p.div_ceil(3)
}

/// `(p−1)! − ⌈p/3⌉ + 2` for primes `p ≥ 11`.
pub fn prime_analytic_bound(p: usize) -> Result<BoundReport> {
    if p < 11 || !is_prime_u64(p as u64) {
        return Err(Error::InvalidArgument(format!("{p} is not a prime >= 11")));
    }
    check_n(p)?;
    Ok(BoundReport {
        n: p,
        d: 3,
        method: BoundMethod::AnalyticPrime,
        value: factorial(p - 1) + 2u32 - ceil_third(p),
        kind: BoundKind::UpperBound,
        partition: None,
        provenance: format!("(p-1)! - ceil(p/3) + 2 with ceil(p/3) = {}", ceil_third(p)),
    })
}

/// The integer program over the cosets of `S_λ`, as a report plus the raw
/// solution.
pub fn ilp_bound_with_solution(
    n: usize,
    d: usize,
    lambda: &NumberPartition,
    coset_budget: usize,
    opts: &IlpOptions,
    exec: Execution,
) -> Result<(BoundReport, IlpSolution)> {
    let problem = build_bound_problem(n, d, lambda, coset_budget, exec)?;
    let sol = solve_ilp_with(&problem, opts)?;
    if sol.status == IlpStatus::Infeasible {
        return Err(Error::Verification(
            "bound program reported infeasible".into(),
        ));
    }
    let provenance = format!(
        "status={} vars={} rhs={} lp_bound={} incumbent={} nodes={} pivots={}",
        sol.status,
        problem.var_count(),
        problem.rhs(),
        sol.lp_bound,
        sol.objective_value,
        sol.node_count,
        sol.pivots
    );
    let report = BoundReport {
        n,
        d,
        method: BoundMethod::Ilp,
        value: sol.upper_bound.clone(),
        kind: BoundKind::UpperBound,
        partition: Some(lambda.clone()),
        provenance,
    };
    Ok((report, sol))
}

pub fn ilp_bound(
    n: usize,
    d: usize,
    lambda: &NumberPartition,
    coset_budget: usize,
    opts: &IlpOptions,
    exec: Execution,
) -> Result<BoundReport> {
    ilp_bound_with_solution(n, d, lambda, coset_budget, opts, exec).map(|(r, _)| r)
}

/// The three properties of solutions of `M x ≤ (p−1)!·1` for the
/// `(p−1, 1)` coset matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemIneqReport {
    pub p: usize,
    /// `|{i : xᵢ ≤ (p−1)!/p}|` against `⌈p/3⌉`.
    pub low_count: usize,
    pub low_needed: usize,
    /// `|{i : xᵢ = max x}|` against `p − k − 2`, `k = (p−1)! − Σx`.
    pub max_count: usize,
    pub max_needed: BigInt,
    pub sum: BigUint,
    pub sum_bound: BigUint,
}

impl SystemIneqReport {
    pub fn low_ok(&self) -> bool {
        self.low_count >= self.low_needed
    }

    pub fn max_ok(&self) -> bool {
        BigInt::from(self.max_count) >= self.max_needed
    }

    pub fn sum_ok(&self) -> bool {
        self.sum <= self.sum_bound
    }

    pub fn all_ok(&self) -> bool {
        self.low_ok() && self.max_ok() && self.sum_ok()
    }
}

/// Evaluates the three properties on any assignment of length `p`.
pub fn systemineq_report(x: &[BigUint], p: usize) -> Result<SystemIneqReport> {
    if p < 7 || !is_prime_u64(p as u64) {
        return Err(Error::InvalidArgument(format!("{p} is not a prime >= 7")));
    }
    if x.len() != p {
        return Err(Error::LengthMismatch(p, x.len()));
    }
    let f = factorial(p - 1);
    let low_count = x.iter().filter(|&v| v * p <= f).count();
    let max = x.iter().max().expect("p > 0");
    let max_count = x.iter().filter(|&v| v == max).count();
    let sum: BigUint = x.iter().sum();
    let k = BigInt::from(f.clone()) - BigInt::from(sum.clone());
    Ok(SystemIneqReport {
        p,
        low_count,
        low_needed: ceil_third(p),
        max_count,
        max_needed: BigInt::from(p) - k - 2,
        sum,
        sum_bound: f + 2u32 - ceil_third(p),
    })
}

/// Checks the solution of the `(p−1, 1)` program; any violated property is
/// an error.
pub fn verify_systemineq_properties(sol: &IlpSolution, p: usize) -> Result<SystemIneqReport> {
    let report = systemineq_report(&sol.assignment, p)?;
    if !report.all_ok() {
        return Err(Error::Verification(format!(
            "systemineq properties violated: {report:?}"
        )));
    }
    Ok(report)
}

/// All of `S_n` in lexicographic order.
pub fn all_permutations(n: usize) -> Vec<Permutation> {
    ball(&Permutation::identity(n), pairs(n))
        .members
        .into_iter()
        .collect()
}

struct Clique<'a> {
    adj: &'a [Vec<u64>],
    best: Vec<usize>,
    nodes: u64,
    budget: u64,
}

impl Clique<'_> {
    fn adjacent(&self, u: usize, v: usize) -> bool {
        self.adj[u][v / 64] >> (v % 64) & 1 == 1
    }

    /// Greedy coloring; returns vertices ordered by color with their color
    /// numbers (1-based), a bound on the clique size within each prefix.
    fn color_sort(&self, cand: &[usize]) -> (Vec<usize>, Vec<usize>) {
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for &v in cand {
            match classes
                .iter_mut()
                .find(|c| c.iter().all(|&u| !self.adjacent(u, v)))
            {
                Some(c) => c.push(v),
                None => classes.push(vec![v]),
            }
        }
        let mut order = Vec::with_capacity(cand.len());
        let mut colors = Vec::with_capacity(cand.len());
        for (k, c) in classes.into_iter().enumerate() {
            for v in c {
                order.push(v);
                colors.push(k + 1);
            }
        }
        (order, colors)
    }

    fn expand(&mut self, current: &mut Vec<usize>, cand: &[usize]) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::BudgetExceeded {
                what: "clique search",
                needed: format!("more than {} nodes", self.budget),
                limit: self.budget as usize,
            });
        }
        let (order, colors) = self.color_sort(cand);
        for i in (0..order.len()).rev() {
            if current.len() + colors[i] <= self.best.len() {
                return Ok(());
            }
            let v = order[i];
            current.push(v);
            let next: Vec<usize> = order[..i]
                .iter()
                .copied()
                .filter(|&u| self.adjacent(u, v))
                .collect();
            if next.is_empty() {
                if current.len() > self.best.len() {
                    self.best = current.clone();
                }
            } else {
                self.expand(current, &next)?;
            }
            current.pop();
        }
        Ok(())
    }
}

/// Exact `P(n, d)` by maximum clique search on the graph joining
/// permutations at distance at least `d`, with the identity fixed in the
/// code (right translations act transitively and preserve distances).
pub fn brute_force_p(
    n: usize,
    d: usize,
    node_budget: u64,
) -> Result<(BoundReport, Vec<Permutation>)> {
    if !(1..=6).contains(&n) {
        return Err(Error::InvalidArgument(format!(
            "brute force is limited to n <= 6, got {n}"
        )));
    }
    let perms = all_permutations(n);
    let m = perms.len();
    let words = m.div_ceil(64);
    let mut adj = vec![vec![0u64; words]; m];
    for i in 0..m {
        for j in i + 1..m {
            if kendall_distance(&perms[i], &perms[j])? >= d as u64 {
                adj[i][j / 64] |= 1 << (j % 64);
                adj[j][i / 64] |= 1 << (i % 64);
            }
        }
    }
    let mut search = Clique {
        adj: &adj,
        best: vec![0],
        nodes: 0,
        budget: node_budget,
    };
    let cand: Vec<usize> = (1..m).filter(|&v| search.adjacent(0, v)).collect();
    let mut current = vec![0];
    if !cand.is_empty() {
        search.expand(&mut current, &cand)?;
    }
    let code: Vec<Permutation> = search.best.iter().map(|&i| perms[i].clone()).collect();
    let report = BoundReport {
        n,
        d,
        method: BoundMethod::BruteForce,
        value: BigUint::from(code.len()),
        kind: BoundKind::Exact,
        partition: None,
        provenance: format!("maximum clique search, {} nodes", search.nodes),
    };
    Ok((report, code))
}

/// A permutation code with its minimum distance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeSet {
    n: usize,
    members: BTreeSet<Permutation>,
}

impl CodeSet {
    pub fn new(n: usize, members: impl IntoIterator<Item = Permutation>) -> Result<Self> {
        let members: BTreeSet<Permutation> = members.into_iter().collect();
        if let Some(p) = members.iter().find(|p| p.n() != n) {
            return Err(Error::LengthMismatch(n, p.n()));
        }
        Ok(CodeSet { n, members })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn members(&self) -> &BTreeSet<Permutation> {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Lexicographically smallest pair at minimum distance.
    pub fn closest_pair(&self) -> Option<(u64, Permutation, Permutation)> {
        let v: Vec<&Permutation> = self.members.iter().collect();
        let mut best: Option<(u64, usize, usize)> = None;
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                let d = kendall_distance(v[i], v[j]).expect("same n");
                if best.is_none_or(|(b, _, _)| d < b) {
                    best = Some((d, i, j));
                }
            }
        }
        best.map(|(d, i, j)| (d, v[i].clone(), v[j].clone()))
    }

    /// Minimum pairwise distance, absent for fewer than two members.
    pub fn min_distance(&self) -> Option<u64> {
        self.closest_pair().map(|(d, _, _)| d)
    }

    /// Permutations outside every radius-`r` ball around a member.
    pub fn uncovered(&self, r: usize) -> BTreeSet<Permutation> {
        let mut rest: BTreeSet<Permutation> = all_permutations(self.n).into_iter().collect();
        for c in &self.members {
            for p in ball(c, r).members {
                rest.remove(&p);
            }
        }
        rest
    }
}

/// Moves one endpoint of the closest pair along a shortest path until the
/// minimum distance is exactly `d`. The cardinality never changes.
pub fn tighten_code(code: &CodeSet, d: u64) -> Result<CodeSet> {
    let mut out = code.clone();
    loop {
        let Some((dist, sigma, tau)) = out.closest_pair() else {
            return Err(Error::InvalidArgument(
                "a code needs two members to tighten".into(),
            ));
        };
        if dist < d {
            return Err(Error::InvalidArgument(format!(
                "minimum distance {dist} is already below {d}"
            )));
        }
        if dist == d {
            return Ok(out);
        }
        let ell = (dist - d) as usize;
        let path = shortest_path(&sigma, &tau)?;
        out.members.remove(&sigma);
        out.members.insert(path[ell].clone());
    }
}

/// Renders `v` as `k!-c` or `k!+c` when it lies within `limit` of a
/// factorial with `k >= 4`, otherwise in decimal.
pub fn factorial_form(v: &BigUint, limit: u64) -> String {
    let v = BigInt::from(v.clone());
    let mut f = BigInt::from(24u32);
    let mut best: Option<(usize, i64)> = None;
    for k in 4..=Permutation::MAX_N {
        if k > 4 {
            f *= k;
        }
        let diff = &v - &f;
        if let Some(x) = diff.to_i64().filter(|x| x.unsigned_abs() <= limit) {
            if best.is_none_or(|(_, b)| x.unsigned_abs() < b.unsigned_abs()) {
                best = Some((k, x));
            }
        }
        if f > v {
            break;
        }
    }
    match best {
        None => v.to_string(),
        Some((k, 0)) => format!("{k}!"),
        Some((k, x)) if x > 0 => format!("{k}!+{x}"),
        Some((k, x)) => format!("{k}!-{}", -x),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;
    use rand::{seq::SliceRandom, Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn trivial_values_examples() {
        assert_eq!(trivial_values(5, 1).unwrap().unwrap().value, big(120));
        assert_eq!(trivial_values(5, 2).unwrap().unwrap().value, big(60));
        let r = trivial_values(5, 8).unwrap().unwrap();
        assert_eq!((r.value, r.kind), (big(2), BoundKind::Exact));
        assert!(trivial_values(5, 6).unwrap().is_none());
        assert!(trivial_values(5, 7).unwrap().is_some());
        assert!(trivial_values(5, 11).unwrap().is_none());
        assert!(trivial_values(1, 1).is_err());
    }

    #[test]
    fn sphere_packing_examples() {
        assert_eq!(sphere_packing_bound(6, 3).unwrap().value, big(120));
        assert_eq!(sphere_packing_bound(4, 3).unwrap().value, big(6));
        // |B(2)| in S_5 is 1 + 4 + 9
        assert_eq!(sphere_packing_bound(5, 5).unwrap().value, big(120 / 14));
        assert!(sphere_packing_bound(5, 4).is_err());
        assert!(sphere_packing_bound(5, 1).is_err());
    }

    #[test]
    fn analytic_prime_examples() {
        assert_eq!(
            prime_analytic_bound(11).unwrap().value,
            factorial(10) - 2u32
        );
        assert_eq!(
            prime_analytic_bound(13).unwrap().value,
            factorial(12) - 3u32
        );
        assert_eq!(
            prime_analytic_bound(19).unwrap().value,
            factorial(18) - 5u32
        );
        for bad in [7, 9, 15, 21] {
            assert!(prime_analytic_bound(bad).is_err());
        }
    }

    #[test]
    fn brute_force_examples() {
        assert_eq!(brute_force_p(4, 1, 1_000_000).unwrap().0.value, big(24));
        assert_eq!(brute_force_p(4, 6, 1_000_000).unwrap().0.value, big(2));
        let (r, code) = brute_force_p(4, 3, 1_000_000).unwrap();
        assert!(r.value <= sphere_packing_bound(4, 3).unwrap().value);
        let c = CodeSet::new(4, code).unwrap();
        assert_eq!(c.len(), r.value.to_usize().unwrap());
        assert!(c.min_distance().unwrap() >= 3);
        assert!(matches!(
            brute_force_p(5, 3, 3),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    /// Exhaustive search over all subsets of S_4 containing the identity.
    #[test]
    fn brute_force_matches_subset_enumeration() {
        let perms = all_permutations(4);
        for d in 1..=2 {
            assert_eq!(
                brute_force_p(4, d, 1_000_000).unwrap().0.value,
                trivial_values(4, d).unwrap().unwrap().value
            );
        }
        for d in 3..=6u64 {
            let mut best = 0;
            let others: Vec<usize> = (1..24)
                .filter(|&i| kendall_distance(&perms[0], &perms[i]).unwrap() >= d)
                .collect();
            fn grow(
                perms: &[Permutation],
                chosen: &mut Vec<usize>,
                rest: &[usize],
                d: u64,
                best: &mut usize,
            ) {
                *best = (*best).max(chosen.len());
                for (k, &v) in rest.iter().enumerate() {
                    if chosen
                        .iter()
                        .all(|&u| kendall_distance(&perms[u], &perms[v]).unwrap() >= d)
                    {
                        chosen.push(v);
                        grow(perms, chosen, &rest[k + 1..], d, best);
                        chosen.pop();
                    }
                }
            }
            grow(&perms, &mut vec![0], &others, d, &mut best);
            assert_eq!(
                brute_force_p(4, d as usize, 1_000_000).unwrap().0.value,
                big(best as u64),
                "d={d}"
            );
        }
    }

    #[test]
    fn brute_force_stays_below_every_upper_bound() {
        for n in [4, 5] {
            let exact = brute_force_p(n, 3, 10_000_000).unwrap().0.value;
            assert!(exact <= sphere_packing_bound(n, 3).unwrap().value);
            for lambda in NumberPartition::all(n) {
                let Ok(r) = ilp_bound(
                    n,
                    3,
                    &lambda,
                    120,
                    &IlpOptions::default(),
                    Execution::Sequential,
                ) else {
                    continue;
                };
                assert!(exact <= r.value, "n={n} λ={lambda}: {exact} > {}", r.value);
            }
        }
    }

    #[test]
    fn ilp_never_exceeds_sphere_packing_for_hook_shapes() {
        for n in 4..=9 {
            let lambda = NumberPartition::new(vec![n - 1, 1]).unwrap();
            let r = ilp_bound(
                n,
                3,
                &lambda,
                1000,
                &IlpOptions::default(),
                Execution::Sequential,
            )
            .unwrap();
            assert!(
                r.value <= sphere_packing_bound(n, 3).unwrap().value,
                "n={n}"
            );
            assert_eq!(r.partition, Some(lambda));
        }
    }

    #[test]
    fn systemineq_on_optima_and_zero() {
        for q in [7, 11, 13] {
            let lambda = NumberPartition::new(vec![q - 1, 1]).unwrap();
            let (_, sol) = ilp_bound_with_solution(
                q,
                3,
                &lambda,
                1000,
                &IlpOptions::default(),
                Execution::Sequential,
            )
            .unwrap();
            assert_eq!(sol.status, IlpStatus::Optimal);
            let r = verify_systemineq_properties(&sol, q).unwrap();
            assert!(r.all_ok());
            let zero = systemineq_report(&vec![BigUint::zero(); q], q).unwrap();
            assert!(zero.low_ok() && zero.sum_ok() && zero.max_ok());
            assert_eq!(zero.max_count, q);
        }
        assert!(systemineq_report(&[], 9).is_err());
        assert!(systemineq_report(&vec![BigUint::zero(); 3], 7).is_err());
    }

    /// Maximal feasible points: random starting values raised greedily in a
    /// random order.
    #[test]
    fn systemineq_holds_on_random_feasible_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for q in [7usize, 11, 13] {
            let lambda = NumberPartition::new(vec![q - 1, 1]).unwrap();
            let problem = build_bound_problem(q, 3, &lambda, 1000, Execution::Sequential).unwrap();
            let m = problem.matrix().to_dense();
            let rhs = problem.rhs().to_u64().unwrap() as i64;
            for _ in 0..1000 {
                let cap = rhs / (q as i64 - 1);
                let mut x: Vec<i64> = (0..q).map(|_| rng.random_range(0..=cap)).collect();
                let slack = |x: &[i64]| -> Vec<i64> {
                    (0..q)
                        .map(|i| rhs - (0..q).map(|j| m[i][j] * x[j]).sum::<i64>())
                        .collect()
                };
                // shrink until feasible
                while slack(&x).iter().any(|&s| s < 0) {
                    let i = rng.random_range(0..q);
                    x[i] /= 2;
                }
                let mut order: Vec<usize> = (0..q).collect();
                order.shuffle(&mut rng);
                for j in order {
                    let s = slack(&x);
                    let room = (0..q)
                        .filter(|&i| m[i][j] > 0)
                        .map(|i| s[i] / m[i][j])
                        .min()
                        .unwrap();
                    x[j] += room;
                }
                assert!(slack(&x).iter().all(|&s| s >= 0));
                let xs: Vec<BigUint> = x.iter().map(|&v| BigUint::from(v as u64)).collect();
                let r = systemineq_report(&xs, q).unwrap();
                assert!(r.low_ok() && r.max_ok(), "p={q} x={x:?} {r:?}");
            }
        }
    }

    fn random_code(rng: &mut ChaCha8Rng, n: usize, d: u64) -> CodeSet {
        let perms = all_permutations(n);
        let mut chosen: Vec<Permutation> = Vec::new();
        let size = rng.random_range(2..=6);
        for _ in 0..500 {
            if chosen.len() == size {
                break;
            }
            let c = &perms[rng.random_range(0..perms.len())];
            if chosen.iter().all(|x| kendall_distance(x, c).unwrap() >= d) {
                chosen.push(c.clone());
            }
        }
        CodeSet::new(n, chosen).unwrap()
    }

    #[test]
    fn tightening_examples() {
        let xi = Permutation::identity(4);
        let rev = Permutation::reverse(4);
        let c = CodeSet::new(4, [xi.clone(), rev.clone()]).unwrap();
        let t = tighten_code(&c, 3).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.min_distance(), Some(3));
        assert!(t.members().contains(&rev));
        assert_eq!(
            kendall_distance(&xi, t.members().iter().find(|p| **p != rev).unwrap()).unwrap(),
            3
        );
        assert_eq!(tighten_code(&t, 3).unwrap(), t);
        assert!(tighten_code(&CodeSet::new(4, [xi.clone()]).unwrap(), 3).is_err());
        assert!(tighten_code(&t, 4).is_err());
    }

    #[test]
    fn tightening_preserves_size_and_hits_d() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..100 {
            let c = random_code(&mut rng, 5, 3);
            if c.len() < 2 {
                continue;
            }
            let t = tighten_code(&c, 3).unwrap();
            assert_eq!(t.len(), c.len());
            assert_eq!(t.min_distance(), Some(3));
        }
    }

    #[test]
    fn uncovered_set_partitions_the_group() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..20 {
            let c = random_code(&mut rng, 4, 3);
            let y = c.uncovered(1);
            let covered: BTreeSet<Permutation> = c
                .members()
                .iter()
                .flat_map(|m| ball(m, 1).members)
                .collect();
            assert!(y.is_disjoint(&covered));
            assert_eq!(y.len() + covered.len(), 24);
        }
    }

    #[test]
    fn factorial_rendering() {
        assert_eq!(factorial_form(&(factorial(16) - 5u32), 1000), "16!-5");
        assert_eq!(factorial_form(&(factorial(10) - 10u32), 1000), "10!-10");
        assert_eq!(factorial_form(&factorial(5), 1000), "5!");
        assert_eq!(factorial_form(&big(716), 10), "6!-4");
        assert_eq!(factorial_form(&big(716), 3), "716");
        assert_eq!(factorial_form(&big(30), 3), "30");
    }
}
