//! Exact LP and branch-and-bound for `maximize Σx subject to Mx ≤ rhs·1`,
//! `x ≥ 0` integral, with `M` nonnegative and symmetric.

mod float;
mod int;
mod tableau;

use std::fmt;
use std::io::{BufRead, Write};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::young::{
    coset_action_matrix, parse_field, parse_header, read_triples, NumberPartition, SparseMatrix,
    YoungSubgroup,
};
use float::{FloatOutcome, FloatTableau};
use int::Int;
use tableau::{LpOutcome, Tableau};

/// Pivot cap for a single LP solve.
const PIVOT_BUDGET: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IlpProblem {
    matrix: SparseMatrix,
    rhs: BigUint,
}

impl IlpProblem {
    pub fn new(matrix: SparseMatrix, rhs: BigUint) -> Result<Self> {
        if rhs.is_zero() {
            return Err(Error::InvalidArgument("rhs must be at least 1".into()));
        }
        if !matrix.is_symmetric() {
            return Err(Error::InvalidArgument(
                "constraint matrix is not symmetric".into(),
            ));
        }
        if let Some(j) = (0..matrix.dim()).find(|&j| matrix.row(j).is_empty()) {
            return Err(Error::InvalidArgument(format!(
                "variable {j} appears in no constraint"
            )));
        }
        Ok(IlpProblem { matrix, rhs })
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    pub fn rhs(&self) -> &BigUint {
        &self.rhs
    }

    pub fn var_count(&self) -> usize {
        self.matrix.dim()
    }

    pub fn header(&self) -> String {
        format!("kendall-ilp v1 vars={} rhs={}", self.var_count(), self.rhs)
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{}", self.header())?;
        for (i, j, v) in self.matrix.triples() {
            writeln!(w, "{i} {j} {v}")?;
        }
        Ok(())
    }

    pub fn read_from<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty problem file".into()))?
            .map_err(|e| Error::Parse(e.to_string()))?;
        let hdr = parse_header(&header, "kendall-ilp", &["vars", "rhs"])?;
        let vars: usize = parse_field(&hdr[0])?;
        let rhs: BigUint = parse_field(&hdr[1])?;
        IlpProblem::new(read_triples(lines, vars)?, rhs)
    }

    /// `Mx ≤ rhs·1` and `Σx`, recomputed from scratch with big integers.
    pub fn check_assignment(&self, x: &[BigUint]) -> Result<BigUint> {
        if x.len() != self.var_count() {
            return Err(Error::LengthMismatch(self.var_count(), x.len()));
        }
        for i in 0..self.var_count() {
            let lhs: BigUint = self
                .matrix
                .row(i)
                .iter()
                .map(|&(j, v)| &x[j as usize] * v)
                .sum();
            if lhs > self.rhs {
                return Err(Error::Verification(format!(
                    "row {i}: {lhs} exceeds {}",
                    self.rhs
                )));
            }
        }
        Ok(x.iter().sum())
    }

    fn dense(&self) -> Vec<Vec<i64>> {
        self.matrix.to_dense()
    }

    fn root_tableau(&self) -> Tableau {
        let k = self.var_count();
        let rhs = BigInt::from(self.rhs.clone());
        Tableau::new(
            &self.dense(),
            &vec![rhs; k],
            vec![1; k],
            vec![BigInt::zero(); k],
        )
    }

    /// `⌊rhs / max row sum⌋`, the largest feasible constant assignment.
    fn seed(&self) -> BigInt {
        let max_row: u64 = self.matrix.row_sums().into_iter().max().unwrap_or(1);
        BigInt::from(self.rhs.clone()) / BigInt::from(max_row)
    }

    /// Raises coordinates in index order as far as the slack allows.
    /// Returns false, leaving `x` unchanged, if `x` is infeasible.
    fn greedy_fill(&self, x: &mut [BigInt]) -> bool {
        let k = self.var_count();
        let rhs = BigInt::from(self.rhs.clone());
        let mut slack: Vec<BigInt> = (0..k)
            .map(|i| {
                let used: BigInt = self
                    .matrix
                    .row(i)
                    .iter()
                    .map(|&(j, v)| &x[j as usize] * v)
                    .sum();
                &rhs - used
            })
            .collect();
        if slack.iter().any(|s| s.is_negative()) {
            return false;
        }
        for j in 0..k {
            // M is symmetric: column j has the support of row j.
            let t = self
                .matrix
                .row(j)
                .iter()
                .map(|&(i, v)| slack[i as usize].div_floor(&BigInt::from(v)))
                .min()
                .expect("nonempty column");
            if t.is_positive() {
                for &(i, v) in self.matrix.row(j) {
                    slack[i as usize] -= &t * v;
                }
                x[j] += t;
            }
        }
        true
    }
}

impl fmt::Display for IlpProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.header())
    }
}

/// The program whose optimum bounds `|C|` for codes of minimum distance `d`
/// that are unions of cosets of `H_λ`.
pub fn build_bound_problem(
    n: usize,
    d: usize,
    lambda: &NumberPartition,
    coset_budget: usize,
    exec: Execution,
) -> Result<IlpProblem> {
    if d < 1 {
        return Err(Error::InvalidArgument("d must be at least 1".into()));
    }
    if lambda.n() != n {
        return Err(Error::InvalidPartition(format!(
            "{lambda} does not partition {n}"
        )));
    }
    let h = YoungSubgroup::new(lambda.clone())?;
    let m = coset_action_matrix(&h, (d - 1) / 2, coset_budget, exec)?;
    IlpProblem::new(m.entries, h.order().clone())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpSolution {
    pub value: BigRational,
    pub vertex: Vec<BigRational>,
    pub duals: Vec<BigRational>,
    pub pivots: u64,
}

impl LpSolution {
    /// Primal and dual feasibility plus equal objectives, so `value` is the
    /// LP optimum.
    pub fn verify(&self, p: &IlpProblem) -> Result<()> {
        let k = p.var_count();
        if self.vertex.len() != k || self.duals.len() != k {
            return Err(Error::Verification("certificate has wrong length".into()));
        }
        let rhs = BigRational::from_integer(BigInt::from(p.rhs.clone()));
        if self
            .vertex
            .iter()
            .chain(&self.duals)
            .any(|v| v.is_negative())
        {
            return Err(Error::Verification("negative primal or dual entry".into()));
        }
        for i in 0..k {
            let row = p.matrix.row(i);
            let ax: BigRational = row
                .iter()
                .map(|&(j, v)| &self.vertex[j as usize] * BigInt::from(v))
                .sum();
            if ax > rhs {
                return Err(Error::Verification(format!("primal row {i} violated")));
            }
            // Column i of M equals row i.
            let aty: BigRational = row
                .iter()
                .map(|&(j, v)| &self.duals[j as usize] * BigInt::from(v))
                .sum();
            if aty < BigRational::one() {
                return Err(Error::Verification(format!("dual column {i} violated")));
            }
        }
        let primal: BigRational = self.vertex.iter().sum();
        let dual: BigRational = self.duals.iter().sum::<BigRational>() * &rhs;
        if primal != self.value || dual != self.value {
            return Err(Error::Verification(format!(
                "objectives disagree: primal {primal}, dual {dual}, claimed {}",
                self.value
            )));
        }
        Ok(())
    }
}

fn ratio(num: BigInt, den: &BigInt) -> BigRational {
    BigRational::new(num, den.clone())
}

fn lp_outcome_error(o: LpOutcome) -> Error {
    match o {
        LpOutcome::IterationLimit => Error::BudgetExceeded {
            what: "simplex pivots",
            needed: format!("> {PIVOT_BUDGET}"),
            limit: PIVOT_BUDGET as usize,
        },
        other => Error::Verification(format!("unexpected LP outcome {other:?}")),
    }
}

pub fn solve_lp_relaxation(p: &IlpProblem) -> Result<LpSolution> {
    let mut tab = p.root_tableau();
    match tab.primal(PIVOT_BUDGET) {
        LpOutcome::Optimal => {}
        other => return Err(lp_outcome_error(other)),
    }
    let det = tab.det();
    let sol = LpSolution {
        value: ratio(tab.objective_scaled(), &det),
        vertex: tab
            .structural_values()
            .into_iter()
            .map(|v| ratio(v, &det))
            .collect(),
        duals: tab
            .duals_scaled()
            .into_iter()
            .map(|v| ratio(v, &det))
            .collect(),
        pivots: tab.pivots,
    };
    Ok(sol)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IlpStatus {
    Optimal,
    Infeasible,
    BudgetExceeded,
}

impl fmt::Display for IlpStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IlpStatus::Optimal => "optimal",
            IlpStatus::Infeasible => "infeasible",
            IlpStatus::BudgetExceeded => "budget_exceeded",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IlpSolution {
    pub status: IlpStatus,
    /// Value of the best assignment found.
    pub objective_value: BigUint,
    pub assignment: Vec<BigUint>,
    /// Root relaxation optimum.
    pub lp_bound: BigRational,
    /// Proven upper bound on the optimum; equals `objective_value` when
    /// the status is optimal.
    pub upper_bound: BigUint,
    pub node_count: u64,
    pub pivots: u64,
}

fn floor_ratio(num: &BigInt, den: &BigInt) -> BigInt {
    num.div_floor(den)
}

fn to_biguint(x: &BigInt) -> BigUint {
    x.to_biguint().expect("nonnegative")
}

/// How node relaxations are solved during branch-and-bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NodeLp {
    /// Every node LP is solved by the exact integer tableau.
    Exact,
    /// Node LPs are solved in floating point from the exact root basis. A
    /// node is pruned only on an upper bound evaluated exactly from its
    /// dual values, candidate solutions are re-checked in integers, and any
    /// node the float solve cannot settle is re-solved exactly.
    #[default]
    Certified,
}

/// Choice of the branching variable among the fractional ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Branching {
    /// Farthest from an integer, ties to the lowest index.
    MostFractional,
    /// Largest diagonal coefficient first, so the variable with the
    /// smallest implied upper bound `rhs / M_jj`; then most fractional,
    /// then lowest index.
    #[default]
    MostConstrained,
}

impl Branching {
    fn priorities(self, p: &IlpProblem) -> Vec<u64> {
        match self {
            Branching::MostFractional => vec![0; p.var_count()],
            Branching::MostConstrained => (0..p.var_count())
                .map(|j| p.matrix.get(j, j) as u64)
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IlpOptions {
    pub node_budget: u64,
    pub node_lp: NodeLp,
    pub branching: Branching,
}

impl Default for IlpOptions {
    fn default() -> Self {
        IlpOptions {
            node_budget: 10_000_000,
            node_lp: NodeLp::default(),
            branching: Branching::default(),
        }
    }
}

/// Best known feasible point.
struct Incumbent {
    x: Vec<BigInt>,
    value: BigInt,
}

impl Incumbent {
    /// Clamps `x` at zero, keeps it only if it is feasible, then raises it
    /// greedily.
    fn offer(&mut self, p: &IlpProblem, mut x: Vec<BigInt>) {
        for v in x.iter_mut() {
            if v.is_negative() {
                *v = BigInt::zero();
            }
        }
        if !p.greedy_fill(&mut x) {
            return;
        }
        let v: BigInt = x.iter().sum();
        if v > self.value {
            self.value = v;
            self.x = x;
        }
    }
}

/// Variable bounds of a node in the original coordinates.
type Bounds = Vec<(BigInt, Option<BigInt>)>;

/// Exact node feasibility: since `M ≥ 0`, the box `[l, u]` meets
/// `Mx ≤ rhs` iff `l ≤ u` and `Ml ≤ rhs`.
fn box_feasible(p: &IlpProblem, bounds: &Bounds) -> bool {
    if bounds
        .iter()
        .any(|(l, u)| u.as_ref().is_some_and(|u| u < l))
    {
        return false;
    }
    let rhs = BigInt::from(p.rhs.clone());
    (0..p.var_count()).all(|i| {
        let used: BigInt = p
            .matrix
            .row(i)
            .iter()
            .map(|&(j, v)| &bounds[j as usize].0 * v)
            .sum();
        used <= rhs
    })
}

fn child_bounds(bounds: &Bounds, j: usize, up: bool, split: &BigInt) -> Bounds {
    let mut b = bounds.clone();
    if up {
        b[j].0 = split + 1;
    } else {
        b[j].1 = Some(split.clone());
    }
    b
}

/// Solves the node LP exactly, warm-started from the optimal root basis.
fn exact_node(root: &Tableau, bounds: &Bounds) -> Result<Option<Tableau>> {
    let mut t = root.clone();
    for (v, (l, u)) in bounds.iter().enumerate() {
        if t.bounds(v) != (l.clone(), u.clone()) {
            t.set_bounds(v, l.clone(), u.clone());
        }
    }
    match t.dual(PIVOT_BUDGET) {
        LpOutcome::Optimal => Ok(Some(t)),
        LpOutcome::Infeasible => Ok(None),
        other => Err(lp_outcome_error(other)),
    }
}

/// Scale of the fixed-point duals used by [`safe_bound`].
const DUAL_SCALE_BITS: u32 = 62;

/// `⌊yᵀb + Σⱼ max over [lⱼ, uⱼ] of (1 − (Mᵀy)ⱼ)·xⱼ⌋` for the nonnegative
/// fixed-point rounding `y` of `duals`, computed exactly in the shifted
/// coordinates `x − shift`. By weak duality this bounds `Σ(x − shift)` over
/// every feasible point in the box. Duals are first raised where needed so
/// that columns without an upper bound get a nonpositive coefficient.
fn safe_bound(
    p: &IlpProblem,
    b: &[Int],
    lower: &[Int],
    upper: &[Option<Int>],
    duals: impl Iterator<Item = f64>,
) -> Option<BigInt> {
    let k = p.var_count();
    let scale = Int::S(1i128 << DUAL_SCALE_BITS);
    let mut y: Vec<Int> = duals
        .map(|d| {
            let s = (d.max(0.0) * (1u64 << DUAL_SCALE_BITS) as f64).round();
            if s.is_finite() && s < 1e36 {
                Int::S(s as i128)
            } else {
                Int::S(0)
            }
        })
        .collect();
    if y.len() != k {
        return None;
    }
    // reduced costs r = scale·1 − Mᵀy; M is symmetric.
    let mut r: Vec<Int> = (0..k)
        .map(|j| {
            p.matrix.row(j).iter().fold(scale.clone(), |acc, &(i, v)| {
                acc.sub(&y[i as usize].mul(&Int::S(v as i128)))
            })
        })
        .collect();
    for j in 0..k {
        if upper[j].is_none() && r[j].is_positive() {
            let &(i, m) = p.matrix.row(j).iter().max_by_key(|&&(_, v)| v)?;
            let m = Int::S(m as i128);
            // raise y_i by ⌈r_j / m⌉
            let step = r[j].add(&m).sub(&Int::S(1)).div_floor(&m);
            y[i as usize] = y[i as usize].add(&step);
            for &(jj, v) in p.matrix.row(i as usize) {
                let jj = jj as usize;
                r[jj] = r[jj].sub(&step.mul(&Int::S(v as i128)));
            }
        }
    }
    let mut total = Int::ZERO;
    for i in 0..k {
        if !y[i].is_zero() {
            total = total.add(&y[i].mul(&b[i]));
        }
    }
    for j in 0..k {
        if r[j].is_positive() {
            total = total.add(&r[j].mul(upper[j].as_ref()?));
        } else if r[j].is_negative() {
            total = total.add(&r[j].mul(&lower[j]));
        }
    }
    Some(total.big().div_floor(&scale.big()))
}

struct Search<'a> {
    p: &'a IlpProblem,
    inc: Incumbent,
    nodes: u64,
    pivots: u64,
}

impl<'a> Search<'a> {
    fn new(p: &'a IlpProblem, root: &Tableau) -> Self {
        let k = p.var_count();
        let mut inc = Incumbent {
            x: vec![BigInt::zero(); k],
            value: BigInt::zero(),
        };
        // Uniform seed ⌊rhs / max row sum⌋·1, then the rounded-down root.
        let seed = p.seed();
        inc.offer(p, vec![seed; k]);
        let det = root.det();
        inc.offer(
            p,
            root.structural_values()
                .iter()
                .map(|v| floor_ratio(v, &det))
                .collect(),
        );
        Search {
            p,
            inc,
            nodes: 0,
            pivots: root.pivots,
        }
    }

    fn finish(
        self,
        lp_bound: BigRational,
        open: impl Iterator<Item = BigInt>,
        exhausted: bool,
    ) -> Result<IlpSolution> {
        let best = self.inc.value.clone();
        let open_max = open.filter(|b| *b > best).max();
        let (status, upper) = match (exhausted, open_max) {
            (false, Some(b)) => (IlpStatus::BudgetExceeded, b),
            _ => (IlpStatus::Optimal, best.clone()),
        };
        let assignment: Vec<BigUint> = self.inc.x.iter().map(to_biguint).collect();
        let objective_value = self.p.check_assignment(&assignment)?;
        Ok(IlpSolution {
            status,
            objective_value,
            assignment,
            lp_bound,
            upper_bound: to_biguint(&upper),
            node_count: self.nodes,
            pivots: self.pivots,
        })
    }
}

fn solve_root(p: &IlpProblem) -> Result<(Tableau, BigRational, BigInt)> {
    let mut root = p.root_tableau();
    match root.primal(PIVOT_BUDGET) {
        LpOutcome::Optimal => {}
        other => return Err(lp_outcome_error(other)),
    }
    let det = root.det();
    let obj = root.objective_scaled();
    let bound = floor_ratio(&obj, &det);
    Ok((root, ratio(obj, &det), bound))
}

/// Larger bound on top of the stack; on ties the down branch goes first.
fn push_ordered<N>(stack: &mut Vec<(BigInt, N)>, mut children: Vec<(BigInt, bool, N)>) {
    children.sort_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1).reverse()));
    stack.extend(children.into_iter().map(|(b, _, n)| (b, n)));
}

/// Branch-and-bound for `maximize Σx, Mx ≤ rhs·1, x ≥ 0` integral, with
/// default options apart from the node budget.
pub fn solve_ilp(p: &IlpProblem, node_budget: u64) -> Result<IlpSolution> {
    solve_ilp_with(
        p,
        &IlpOptions {
            node_budget,
            ..IlpOptions::default()
        },
    )
}

/// Depth-first branch-and-bound on the most fractional variable. Children
/// are solved as soon as they are created, by dual simplex from the
/// parent's basis, and the child with the larger bound is explored first.
pub fn solve_ilp_with(p: &IlpProblem, opts: &IlpOptions) -> Result<IlpSolution> {
    match opts.node_lp {
        NodeLp::Exact => solve_exact(p, opts),
        NodeLp::Certified => solve_certified(p, opts),
    }
}

fn solve_exact(p: &IlpProblem, opts: &IlpOptions) -> Result<IlpSolution> {
    let node_budget = opts.node_budget;
    let priority = opts.branching.priorities(p);
    let (root, lp_bound, root_bound) = solve_root(p)?;
    let mut search = Search::new(p, &root);
    let mut stack: Vec<(BigInt, Tableau)> = vec![(root_bound, root)];
    let mut exhausted = true;
    while let Some((bound, tab)) = stack.pop() {
        if bound <= search.inc.value {
            continue;
        }
        if search.nodes >= node_budget {
            stack.push((bound, tab));
            exhausted = false;
            break;
        }
        search.nodes += 1;
        let det = tab.det();
        let Some((j, v)) = tab.branch_candidate(&priority) else {
            let x = tab.structural_values().iter().map(|v| v / &det).collect();
            search.inc.offer(p, x);
            continue;
        };
        let floors = tab
            .structural_values()
            .iter()
            .map(|v| floor_ratio(v, &det))
            .collect();
        search.inc.offer(p, floors);

        let split = floor_ratio(&v, &det);
        let mut children = Vec::with_capacity(2);
        for up in [false, true] {
            let mut child = tab.clone();
            let (l, u) = child.bounds(j);
            let (l, u) = if up {
                (&split + 1, u)
            } else {
                (l, Some(split.clone()))
            };
            if u.as_ref().is_some_and(|u| *u < l) {
                continue;
            }
            child.set_bounds(j, l, u);
            let before = child.pivots;
            let outcome = child.dual(PIVOT_BUDGET);
            search.pivots += child.pivots - before;
            match outcome {
                LpOutcome::Optimal => {
                    let b = floor_ratio(&child.objective_scaled(), &child.det());
                    if b > search.inc.value {
                        children.push((b, up, child));
                    }
                }
                LpOutcome::Infeasible => {}
                other => return Err(lp_outcome_error(other)),
            }
        }
        push_ordered(&mut stack, children);
    }
    search.finish(lp_bound, stack.into_iter().map(|(b, _)| b), exhausted)
}

/// Tolerance under which a float value counts as integral.
const INT_TOL: f64 = 1e-6;

struct FloatNode {
    tab: FloatTableau,
    bounds: Bounds,
}

fn solve_certified(p: &IlpProblem, opts: &IlpOptions) -> Result<IlpSolution> {
    let node_budget = opts.node_budget;
    let priority = opts.branching.priorities(p);
    let k = p.var_count();
    let (root, lp_bound, root_bound) = solve_root(p)?;
    let mut search = Search::new(p, &root);

    // Shifted coordinates x − seed keep the float values small.
    let seed = p.seed();
    let seed_int = Int::from(&seed);
    let shift = vec![seed.clone(); k];
    let rhs = Int::from(&BigInt::from(p.rhs.clone()));
    let b: Vec<Int> = p
        .matrix
        .row_sums()
        .iter()
        .map(|&rs| rhs.sub(&seed_int.mul(&Int::S(rs as i128))))
        .collect();
    let base = BigInt::from(k) * &seed;
    let cert = |tab: &FloatTableau, bounds: &Bounds| -> Option<BigInt> {
        let lower: Vec<Int> = bounds
            .iter()
            .map(|(l, _)| Int::from(l).sub(&seed_int))
            .collect();
        let upper: Vec<Option<Int>> = bounds
            .iter()
            .map(|(_, u)| u.as_ref().map(|u| Int::from(u).sub(&seed_int)))
            .collect();
        safe_bound(p, &b, &lower, &upper, (0..k).map(|i| tab.dual(i))).map(|v| v + &base)
    };
    let rounded = |tab: &FloatTableau, f: fn(f64) -> f64| -> Vec<BigInt> {
        (0..k)
            .map(|v| BigInt::from(f(tab.value(v)) as i128) + &seed)
            .collect()
    };

    let root_bounds: Bounds = vec![(BigInt::zero(), None); k];
    let mut stack: Vec<(BigInt, FloatNode)> = vec![(
        root_bound,
        FloatNode {
            tab: root.to_float(&shift),
            bounds: root_bounds,
        },
    )];
    let mut exhausted = true;
    let float_cap = 50 * (2 * k as u64 + 10);
    while let Some((bound, node)) = stack.pop() {
        if bound <= search.inc.value {
            continue;
        }
        if search.nodes >= node_budget {
            stack.push((bound, node));
            exhausted = false;
            break;
        }
        search.nodes += 1;
        let FloatNode { mut tab, bounds } = node;
        let branch = match tab.branch_candidate(&priority, INT_TOL) {
            Some((j, x)) => {
                search.inc.offer(p, rounded(&tab, f64::floor));
                Some((j, BigInt::from(x.floor() as i128) + &seed))
            }
            None => {
                search.inc.offer(p, rounded(&tab, f64::round));
                None
            }
        };
        let (j, split) = match branch {
            Some(b) if bound > search.inc.value => b,
            Some(_) => continue,
            None => {
                if bound <= search.inc.value {
                    continue;
                }
                // The float solve claims an integral optimum above the
                // incumbent that the certificate does not confirm.
                let Some(exact) = exact_node(&root, &bounds)? else {
                    continue;
                };
                let det = exact.det();
                if floor_ratio(&exact.objective_scaled(), &det) <= search.inc.value {
                    continue;
                }
                match exact.branch_candidate(&priority) {
                    None => {
                        let x = exact.structural_values().iter().map(|v| v / &det).collect();
                        search.inc.offer(p, x);
                        continue;
                    }
                    Some((j, v)) => {
                        tab = exact.to_float(&shift);
                        (j, floor_ratio(&v, &det))
                    }
                }
            }
        };

        let mut children = Vec::with_capacity(2);
        for up in [false, true] {
            let cb = child_bounds(&bounds, j, up, &split);
            if !box_feasible(p, &cb) {
                continue;
            }
            let mut child = tab.clone();
            let to_f = |x: &BigInt| (x - &seed).to_f64().unwrap_or(f64::NAN);
            child.set_bounds(
                j,
                to_f(&cb[j].0),
                cb[j].1.as_ref().map_or(f64::INFINITY, to_f),
            );
            let before = child.pivots;
            let outcome = child.dual_simplex(float_cap);
            search.pivots += child.pivots - before;
            let certified = match outcome {
                FloatOutcome::Optimal => cert(&child, &cb),
                _ => None,
            };
            let float_value = child.objective() + base.to_f64().unwrap_or(f64::NAN);
            match certified {
                Some(cb_bound) if cb_bound <= search.inc.value => {}
                Some(cb_bound)
                    if outcome == FloatOutcome::Optimal
                        && (cb_bound.to_f64().unwrap_or(f64::NAN) - float_value).abs() < 1.0 =>
                {
                    children.push((
                        cb_bound,
                        up,
                        FloatNode {
                            tab: child,
                            bounds: cb,
                        },
                    ));
                }
                _ => {
                    // Settle the child exactly and restart its float copy.
                    let Some(exact) = exact_node(&root, &cb)? else {
                        continue;
                    };
                    let eb = floor_ratio(&exact.objective_scaled(), &exact.det());
                    if eb > search.inc.value {
                        let tab = exact.to_float(&shift);
                        children.push((eb, up, FloatNode { tab, bounds: cb }));
                    }
                }
            }
        }
        push_ordered(&mut stack, children);
    }
    search.finish(lp_bound, stack.into_iter().map(|(b, _)| b), exhausted)
}

/// `⌊v⌋` of a nonnegative rational as a big integer.
pub fn rational_floor(v: &BigRational) -> BigUint {
    let f = v.floor().to_integer();
    match f.sign() {
        Sign::Minus => BigUint::zero(),
        _ => f.to_biguint().expect("nonnegative"),
    }
}

/// Approximate value of a rational, for display.
pub fn rational_to_f64(v: &BigRational) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn problem(rows: &[Vec<i64>], rhs: u64) -> IlpProblem {
        IlpProblem::new(SparseMatrix::from_dense(rows).unwrap(), BigUint::from(rhs)).unwrap()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn identity_lp_and_ilp() {
        let p = problem(&[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]], 5);
        let lp = solve_lp_relaxation(&p).unwrap();
        assert_eq!(lp.value, q(15, 1));
        assert_eq!(lp.vertex, vec![q(5, 1); 3]);
        lp.verify(&p).unwrap();
        let s = solve_ilp(&p, 100).unwrap();
        assert_eq!(s.status, IlpStatus::Optimal);
        assert_eq!(s.objective_value, BigUint::from(15u32));
        assert_eq!(s.assignment, vec![BigUint::from(5u32); 3]);
    }

    #[test]
    fn two_by_two_lp() {
        let p = problem(&[vec![2, 1], vec![1, 2]], 3);
        let lp = solve_lp_relaxation(&p).unwrap();
        assert_eq!(lp.value, q(2, 1));
        assert_eq!(lp.vertex, vec![q(1, 1), q(1, 1)]);
        lp.verify(&p).unwrap();
    }

    #[test]
    fn fractional_lp_integer_gap() {
        // x+y ≤ 1 on each of three rows of a triangle: LP 3/2, ILP 1.
        let p = problem(&[vec![1, 1, 1], vec![1, 1, 1], vec![1, 1, 1]], 1);
        assert_eq!(
            solve_ilp(&p, 100).unwrap().objective_value,
            BigUint::from(1u32)
        );
        let p = problem(&[vec![1, 1, 0], vec![1, 1, 0], vec![0, 0, 1]], 1);
        let s = solve_ilp(&p, 100).unwrap();
        assert_eq!(s.objective_value, BigUint::from(2u32));
        let p = problem(&[vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]], 1);
        let lp = solve_lp_relaxation(&p).unwrap();
        assert_eq!(lp.value, q(3, 2));
        lp.verify(&p).unwrap();
        assert_eq!(
            solve_ilp(&p, 100).unwrap().objective_value,
            BigUint::from(1u32)
        );
    }

    #[test]
    fn rejects_malformed_problems() {
        let m = SparseMatrix::from_dense(&[vec![1, 2], vec![0, 1]]).unwrap();
        assert!(IlpProblem::new(m, BigUint::one()).is_err());
        let m = SparseMatrix::from_dense(&[vec![1]]).unwrap();
        assert!(IlpProblem::new(m, BigUint::zero()).is_err());
        let m = SparseMatrix::from_dense(&[vec![1, 0], vec![0, 0]]).unwrap();
        assert!(IlpProblem::new(m, BigUint::one()).is_err());
    }

    #[test]
    fn bound_problem_shapes() {
        let cases = [
            ("5,1,1", 7, 42, 120u64),
            ("2,2,2", 6, 90, 8),
            ("9,2", 11, 55, 725_760),
        ];
        for (lam, n, vars, rhs) in cases {
            let lam: NumberPartition = lam.parse().unwrap();
            let p = build_bound_problem(n, 3, &lam, 1_000_000, Execution::Sequential).unwrap();
            assert_eq!(p.var_count(), vars);
            assert_eq!(p.rhs(), &BigUint::from(rhs));
        }
        let lam: NumberPartition = "2,2".parse().unwrap();
        assert!(build_bound_problem(4, 0, &lam, 100, Execution::Sequential).is_err());
        assert!(build_bound_problem(5, 3, &lam, 100, Execution::Sequential).is_err());
    }

    #[test]
    fn dump_round_trip() {
        let lam: NumberPartition = "3,1,1".parse().unwrap();
        let p = build_bound_problem(5, 3, &lam, 1000, Execution::Sequential).unwrap();
        let mut buf = Vec::new();
        p.write_to(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("kendall-ilp v1 vars=20 rhs=6\n"));
        assert_eq!(IlpProblem::read_from(&buf[..]).unwrap(), p);
        assert!(IlpProblem::read_from(&b"kendall-ilp v2 vars=1 rhs=1\n0 0 1\n"[..]).is_err());
    }

    /// Enumerates all bases of `[M | I]` and keeps the best feasible vertex.
    fn vertex_enumeration(m: &[Vec<i64>], rhs: i64) -> BigRational {
        let k = m.len();
        let cols = 2 * k;
        let column = |j: usize, i: usize| -> BigRational {
            if j < k {
                BigRational::from_integer(m[i][j].into())
            } else {
                BigRational::from_integer(((j - k == i) as i64).into())
            }
        };
        let mut best = BigRational::zero();
        let mut subset: Vec<usize> = (0..k).collect();
        loop {
            // Solve B x_B = rhs·1 by Gaussian elimination.
            let mut a: Vec<Vec<BigRational>> = (0..k)
                .map(|i| {
                    let mut row: Vec<BigRational> = subset.iter().map(|&j| column(j, i)).collect();
                    row.push(BigRational::from_integer(rhs.into()));
                    row
                })
                .collect();
            let mut ok = true;
            for c in 0..k {
                let Some(piv) = (c..k).find(|&r| !a[r][c].is_zero()) else {
                    ok = false;
                    break;
                };
                a.swap(c, piv);
                let pv = a[c][c].clone();
                for x in a[c].iter_mut() {
                    *x = &*x / &pv;
                }
                for r in 0..k {
                    if r != c && !a[r][c].is_zero() {
                        let f = a[r][c].clone();
                        let pivot_row = a[c].clone();
                        for (x, y) in a[r].iter_mut().zip(&pivot_row) {
                            *x = &*x - &f * y;
                        }
                    }
                }
            }
            if ok && a.iter().all(|row| !row[k].is_negative()) {
                let obj: BigRational = subset
                    .iter()
                    .zip(&a)
                    .filter(|(&j, _)| j < k)
                    .map(|(_, row)| row[k].clone())
                    .sum();
                if obj > best {
                    best = obj;
                }
            }
            // next k-subset of 0..cols
            let mut i = k;
            loop {
                if i == 0 {
                    return best;
                }
                i -= 1;
                if subset[i] < cols - k + i {
                    subset[i] += 1;
                    for t in i + 1..k {
                        subset[t] = subset[t - 1] + 1;
                    }
                    break;
                }
            }
        }
    }

    fn random_symmetric(rng: &mut ChaCha8Rng, k: usize, max: i64) -> Vec<Vec<i64>> {
        let mut m = vec![vec![0; k]; k];
        for i in 0..k {
            for j in i..k {
                let v = if rng.random_bool(0.4) {
                    0
                } else {
                    rng.random_range(0..=max)
                };
                m[i][j] = v;
                m[j][i] = v;
            }
            if m[i].iter().all(|&v| v == 0) {
                m[i][i] = rng.random_range(1..=max);
            }
        }
        m
    }

    #[test]
    fn lp_matches_vertex_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            let m = random_symmetric(&mut rng, 6, 9);
            let rhs = rng.random_range(1..=30);
            let p = problem(&m, rhs as u64);
            let lp = solve_lp_relaxation(&p).unwrap();
            lp.verify(&p).unwrap();
            assert_eq!(lp.value, vertex_enumeration(&m, rhs), "{m:?} rhs {rhs}");
        }
    }

    #[test]
    fn coset_problem_lp_certificate() {
        let lam: NumberPartition = "4,2".parse().unwrap();
        let p = build_bound_problem(6, 3, &lam, 1000, Execution::Sequential).unwrap();
        let lp = solve_lp_relaxation(&p).unwrap();
        lp.verify(&p).unwrap();
        assert!(lp.value <= BigRational::from_integer(120.into()));
    }

    /// Best objective over all nonnegative integer points with `Mx ≤ rhs`,
    /// by backtracking; feasibility is monotone because `M ≥ 0`.
    fn enumerate_ilp(m: &[Vec<i64>], rhs: i64) -> i64 {
        fn go(m: &[Vec<i64>], rhs: i64, j: usize, used: &mut Vec<i64>, sum: i64, best: &mut i64) {
            if j == m.len() {
                *best = (*best).max(sum);
                return;
            }
            let mut x = 0;
            loop {
                go(m, rhs, j + 1, used, sum + x, best);
                if (0..m.len()).any(|i| used[i] + m[i][j] > rhs) {
                    break;
                }
                for i in 0..m.len() {
                    used[i] += m[i][j];
                }
                x += 1;
            }
            for i in 0..m.len() {
                used[i] -= m[i][j] * x;
            }
        }
        let mut best = 0;
        go(m, rhs, 0, &mut vec![0; m.len()], 0, &mut best);
        best
    }

    #[test]
    fn every_engine_matches_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let engines = [
            (NodeLp::Exact, Branching::MostFractional),
            (NodeLp::Exact, Branching::MostConstrained),
            (NodeLp::Certified, Branching::MostFractional),
            (NodeLp::Certified, Branching::MostConstrained),
        ];
        for _ in 0..40 {
            let k = rng.random_range(1..=6);
            let m = random_symmetric(&mut rng, k, 9);
            let rhs = rng.random_range(1..=25);
            let p = problem(&m, rhs as u64);
            let want = BigUint::from(enumerate_ilp(&m, rhs) as u64);
            for (node_lp, branching) in engines {
                let opts = IlpOptions {
                    node_budget: 100_000,
                    node_lp,
                    branching,
                };
                let s = solve_ilp_with(&p, &opts).unwrap();
                assert_eq!(s.status, IlpStatus::Optimal);
                assert_eq!(s.objective_value, want, "{m:?} rhs {rhs} {node_lp:?}");
                assert_eq!(p.check_assignment(&s.assignment).unwrap(), want);
                assert!(BigRational::from_integer(want.clone().into()) <= s.lp_bound);
            }
        }
    }

    #[test]
    fn box_feasibility_is_lower_corner_check() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..200 {
            let m = random_symmetric(&mut rng, 4, 5);
            let rhs = rng.random_range(1..=12);
            let p = problem(&m, rhs as u64);
            let bounds: Bounds = (0..4)
                .map(|_| {
                    let l = rng.random_range(0..3);
                    let u = rng.random_bool(0.5).then(|| rng.random_range(0..4));
                    (BigInt::from(l), u.map(BigInt::from))
                })
                .collect();
            // brute force over the box clipped at 3
            let mut any = false;
            for code in 0..4usize.pow(4) {
                let x: Vec<i64> = (0..4).map(|j| (code / 4usize.pow(j)) as i64 % 4).collect();
                let inside = x.iter().zip(&bounds).all(|(&v, (l, u))| {
                    BigInt::from(v) >= *l && u.as_ref().is_none_or(|u| BigInt::from(v) <= *u)
                });
                let fits = (0..4).all(|i| (0..4).map(|j| m[i][j] * x[j]).sum::<i64>() <= rhs);
                any |= inside && fits;
            }
            assert_eq!(box_feasible(&p, &bounds), any, "{m:?} {rhs} {bounds:?}");
        }
    }

    #[test]
    fn safe_bound_never_undercuts_the_lp() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..40 {
            let m = random_symmetric(&mut rng, 5, 9);
            let rhs = rng.random_range(1..=40);
            let p = problem(&m, rhs as u64);
            let lp = solve_lp_relaxation(&p).unwrap();
            let b: Vec<Int> = vec![Int::S(rhs as i128); 5];
            let lower = vec![Int::ZERO; 5];
            let upper = vec![None; 5];
            // arbitrary nonnegative duals, including far from optimal ones
            let duals: Vec<f64> = (0..5).map(|_| rng.random_range(0.0..1.0)).collect();
            let sb = safe_bound(&p, &b, &lower, &upper, duals.into_iter()).unwrap();
            assert!(BigRational::from_integer(sb) >= rational_floor_q(&lp.value));
        }
    }

    fn rational_floor_q(v: &BigRational) -> BigRational {
        BigRational::from_integer(v.floor().to_integer())
    }

    #[test]
    fn budget_exhaustion_reports_a_valid_bracket() {
        let lam: NumberPartition = "3,1,1".parse().unwrap();
        let p = build_bound_problem(5, 3, &lam, 1000, Execution::Sequential).unwrap();
        let full = solve_ilp(&p, 1_000_000).unwrap();
        assert_eq!(full.status, IlpStatus::Optimal);
        let cut = solve_ilp(&p, 1).unwrap();
        if cut.status == IlpStatus::BudgetExceeded {
            assert!(cut.objective_value <= full.objective_value);
            assert!(cut.upper_bound >= full.objective_value);
        } else {
            assert_eq!(cut.objective_value, full.objective_value);
        }
        p.check_assignment(&cut.assignment).unwrap();
    }

    #[test]
    fn solves_are_deterministic() {
        let lam: NumberPartition = "4,2".parse().unwrap();
        let p = build_bound_problem(6, 3, &lam, 1000, Execution::Sequential).unwrap();
        let a = solve_ilp(&p, 1_000_000).unwrap();
        let b = solve_ilp(&p, 1_000_000).unwrap();
        assert_eq!(a.objective_value, b.objective_value);
        assert_eq!(a.node_count, b.node_count);
        let exact = solve_ilp_with(
            &p,
            &IlpOptions {
                node_lp: NodeLp::Exact,
                ..IlpOptions::default()
            },
        )
        .unwrap();
        assert_eq!(exact.objective_value, a.objective_value);
    }
}
