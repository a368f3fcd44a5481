//! Irreducible representations of S_n in Young's seminormal and orthogonal
//! forms, and the matrices `I + Σᵢ ρ(sᵢ)` over the adjacent transpositions.

use std::collections::HashMap;
use std::fmt;

use nalgebra::{DMatrix, SymmetricEigen};
use num_bigint::BigUint;
use num_rational::Rational64;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::young::{factorial, NumberPartition};

/// Default dimension cap for eigenvalue computations.
pub const DEFAULT_EIGEN_DIM_CAP: usize = 1000;
/// Default dimension cap for building irreducible representations.
pub const DEFAULT_IRREP_DIM_CAP: usize = 30_000;

/// A standard Young tableau, stored as the row index of each entry.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct StandardTableau {
    shape: NumberPartition,
    /// `row_of[k]` is the 0-based row holding entry `k + 1`.
    row_of: Vec<u8>,
}

impl StandardTableau {
    pub fn shape(&self) -> &NumberPartition {
        &self.shape
    }

    /// Rows of the tableau with 1-based entries.
    pub fn rows(&self) -> Vec<Vec<usize>> {
        let mut rows = vec![Vec::new(); self.shape.len()];
        for (k, &r) in self.row_of.iter().enumerate() {
            rows[r as usize].push(k + 1);
        }
        rows
    }

    /// Row (0-based) of the 1-based entry `k`.
    pub fn row(&self, k: usize) -> usize {
        self.row_of[k - 1] as usize
    }

    /// Column (0-based) of the 1-based entry `k`.
    pub fn column(&self, k: usize) -> usize {
        let r = self.row_of[k - 1];
        self.row_of[..k - 1].iter().filter(|&&x| x == r).count()
    }

    /// `column − row` of entry `k`.
    pub fn content(&self, k: usize) -> i64 {
        self.column(k) as i64 - self.row(k) as i64
    }

    /// Checks that rows and columns increase and the entries are `1..=n`.
    pub fn is_standard(&self) -> bool {
        let rows = self.rows();
        if rows.iter().map(Vec::len).collect::<Vec<_>>() != self.shape.parts() {
            return false;
        }
        let rows_ok = rows.iter().all(|r| r.windows(2).all(|w| w[0] < w[1]));
        let cols_ok = rows
            .windows(2)
            .all(|w| w[1].iter().zip(&w[0]).all(|(below, above)| above < below));
        rows_ok && cols_ok
    }
}

impl fmt::Debug for StandardTableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.rows())
    }
}

/// `n! / Π hook lengths`.
pub fn hook_length_dimension(shape: &NumberPartition) -> BigUint {
    let conj = shape.conjugate();
    let mut hooks = BigUint::one();
    for (i, &len) in shape.parts().iter().enumerate() {
        for j in 0..len {
            let arm = len - j - 1;
            let leg = conj.parts()[j] - i - 1;
            hooks *= arm + leg + 1;
        }
    }
    factorial(shape.n()) / hooks
}

fn dim_within(shape: &NumberPartition, cap: usize) -> Result<usize> {
    let dim = hook_length_dimension(shape);
    match dim.to_usize() {
        Some(d) if d <= cap => Ok(d),
        _ => Err(Error::BudgetExceeded {
            what: "irreducible representation",
            needed: dim.to_string(),
            limit: cap,
        }),
    }
}

/// All standard tableaux of `shape` in last-letter order: ordered by the
/// row of `n` from the bottom row up, then by the row of `n − 1`, and so
/// on. The row-by-row filling comes first.
pub fn standard_tableaux(shape: &NumberPartition, cap: usize) -> Result<Vec<StandardTableau>> {
    let dim = dim_within(shape, cap)?;
    let n = shape.n();
    let mut out = Vec::with_capacity(dim);
    let mut remaining = shape.parts().to_vec();
    let mut suffix = Vec::with_capacity(n);
    fill_from_end(&mut remaining, &mut suffix, &mut |suffix| {
        out.push(StandardTableau {
            shape: shape.clone(),
            row_of: suffix.iter().rev().copied().collect(),
        })
    });
    debug_assert_eq!(out.len(), dim);
    Ok(out)
}

fn fill_from_end(remaining: &mut [usize], suffix: &mut Vec<u8>, emit: &mut impl FnMut(&[u8])) {
    if remaining.iter().all(|&r| r == 0) {
        emit(suffix);
        return;
    }
    for r in (0..remaining.len()).rev() {
        let is_corner = remaining[r] > 0
            && remaining
                .get(r + 1)
                .is_none_or(|&below| below < remaining[r]);
        if !is_corner {
            continue;
        }
        remaining[r] -= 1;
        suffix.push(r as u8);
        fill_from_end(remaining, suffix, emit);
        suffix.pop();
        remaining[r] += 1;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Form {
    Seminormal,
    Orthogonal,
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Form::Seminormal => "seminormal",
            Form::Orthogonal => "orthogonal",
        })
    }
}

/// Square matrix stored by rows as sorted `(column, value)` pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSquare<T> {
    dim: usize,
    rows: Vec<Vec<(u32, T)>>,
}

impl<T: Clone + Zero + PartialEq> SparseSquare<T> {
    fn from_triples(dim: usize, mut triples: Vec<(u32, u32, T)>) -> Self
    where
        T: std::ops::Add<Output = T>,
    {
        triples.sort_by_key(|&(i, j, _)| (i, j));
        let mut rows: Vec<Vec<(u32, T)>> = vec![Vec::new(); dim];
        for (i, j, v) in triples {
            let row = &mut rows[i as usize];
            match row.last_mut() {
                Some((c, acc)) if *c == j => *acc = acc.clone() + v,
                _ => row.push((j, v)),
            }
        }
        for row in &mut rows {
            row.retain(|(_, v)| !v.is_zero());
        }
        SparseSquare { dim, rows }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[(u32, T)] {
        &self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.rows[i]
            .binary_search_by_key(&(j as u32), |(c, _)| *c)
            .map(|k| self.rows[i][k].1.clone())
            .unwrap_or_else(|_| T::zero())
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.dim).all(|i| {
            self.rows[i]
                .iter()
                .all(|(j, v)| self.get(*j as usize, i) == *v)
        })
    }

    pub fn to_dense(&self) -> Vec<Vec<T>> {
        let mut d = vec![vec![T::zero(); self.dim]; self.dim];
        for (i, row) in self.rows.iter().enumerate() {
            for (j, v) in row {
                d[i][*j as usize] = v.clone();
            }
        }
        d
    }
}

/// Matrices of one representation in either form.
#[derive(Debug, Clone, PartialEq)]
pub enum FormMatrix {
    Seminormal(SparseSquare<Rational64>),
    Orthogonal(SparseSquare<f64>),
}

impl FormMatrix {
    pub fn dim(&self) -> usize {
        match self {
            FormMatrix::Seminormal(m) => m.dim(),
            FormMatrix::Orthogonal(m) => m.dim(),
        }
    }

    pub fn form(&self) -> Form {
        match self {
            FormMatrix::Seminormal(_) => Form::Seminormal,
            FormMatrix::Orthogonal(_) => Form::Orthogonal,
        }
    }

    pub fn to_f64_dense(&self) -> DMatrix<f64> {
        let d = self.dim();
        let mut out = DMatrix::zeros(d, d);
        match self {
            FormMatrix::Seminormal(m) => {
                for i in 0..d {
                    for (j, v) in m.row(i) {
                        out[(i, *j as usize)] = v.to_f64().unwrap_or(f64::NAN);
                    }
                }
            }
            FormMatrix::Orthogonal(m) => {
                for i in 0..d {
                    for (j, v) in m.row(i) {
                        out[(i, *j as usize)] = *v;
                    }
                }
            }
        }
        out
    }
}

/// Action of one adjacent transposition on the tableau basis: for each
/// basis vector, its diagonal coefficient and the partner it mixes with.
struct TranspositionAction {
    diagonal: Vec<Rational64>,
    /// `(partner, axial distance)` for tableaux whose swap stays standard.
    partner: Vec<Option<(usize, i64)>>,
}

fn transposition_actions(tableaux: &[StandardTableau]) -> Vec<TranspositionAction> {
    let n = tableaux.first().map_or(0, |t| t.row_of.len());
    let index: HashMap<&[u8], usize> = tableaux
        .iter()
        .enumerate()
        .map(|(i, t)| (t.row_of.as_slice(), i))
        .collect();
    (1..n)
        .map(|i| {
            let mut diagonal = Vec::with_capacity(tableaux.len());
            let mut partner = Vec::with_capacity(tableaux.len());
            for t in tableaux {
                if t.row(i) == t.row(i + 1) {
                    diagonal.push(Rational64::one());
                    partner.push(None);
                } else if t.column(i) == t.column(i + 1) {
                    diagonal.push(-Rational64::one());
                    partner.push(None);
                } else {
                    let r = t.content(i + 1) - t.content(i);
                    diagonal.push(Rational64::new(1, r));
                    let mut swapped = t.row_of.clone();
                    swapped.swap(i - 1, i);
                    partner.push(Some((index[swapped.as_slice()], r)));
                }
            }
            TranspositionAction { diagonal, partner }
        })
        .collect()
}

fn seminormal_triples(a: &TranspositionAction) -> Vec<(u32, u32, Rational64)> {
    let mut triples = Vec::new();
    for (t, d) in a.diagonal.iter().enumerate() {
        triples.push((t as u32, t as u32, *d));
        if let Some((s, r)) = a.partner[t] {
            // column t holds the image of basis vector t
            let off = if r < 0 {
                Rational64::one()
            } else {
                Rational64::one() - Rational64::new(1, r * r)
            };
            triples.push((s as u32, t as u32, off));
        }
    }
    triples
}

fn orthogonal_triples(a: &TranspositionAction) -> Vec<(u32, u32, f64)> {
    let mut triples = Vec::new();
    for (t, d) in a.diagonal.iter().enumerate() {
        triples.push((t as u32, t as u32, d.to_f64().unwrap_or(f64::NAN)));
        if let Some((s, r)) = a.partner[t] {
            let r = r as f64;
            triples.push((s as u32, t as u32, (1.0 - 1.0 / (r * r)).sqrt()));
        }
    }
    triples
}

/// Matrices of the adjacent transpositions `s₁, …, s_{n−1}` on the tableau
/// basis. Column `t` of each matrix is the image of basis vector `t`.
pub fn irrep_generator_matrices(
    shape: &NumberPartition,
    form: Form,
    cap: usize,
) -> Result<Vec<FormMatrix>> {
    let tableaux = standard_tableaux(shape, cap)?;
    let dim = tableaux.len();
    Ok(transposition_actions(&tableaux)
        .iter()
        .map(|a| match form {
            Form::Seminormal => {
                FormMatrix::Seminormal(SparseSquare::from_triples(dim, seminormal_triples(a)))
            }
            Form::Orthogonal => {
                FormMatrix::Orthogonal(SparseSquare::from_triples(dim, orthogonal_triples(a)))
            }
        })
        .collect())
}

/// `Σ_{t ∈ T} ρ_μ(t)` for `T` = identity plus the adjacent transpositions.
#[derive(Debug, Clone, PartialEq)]
pub struct IrrepEvaluation {
    pub shape: NumberPartition,
    pub dim: usize,
    pub matrix: FormMatrix,
}

impl IrrepEvaluation {
    pub fn form(&self) -> Form {
        self.matrix.form()
    }
}

pub fn t_hat_irrep(
    shape: &NumberPartition,
    radius: usize,
    form: Form,
    cap: usize,
) -> Result<IrrepEvaluation> {
    if radius != 1 {
        return Err(Error::InvalidArgument(format!(
            "irreducible evaluation supports radius 1 only, got {radius}"
        )));
    }
    let tableaux = standard_tableaux(shape, cap)?;
    let dim = tableaux.len();
    let actions = transposition_actions(&tableaux);
    let matrix = match form {
        Form::Seminormal => {
            let mut triples: Vec<_> = (0..dim as u32).map(|t| (t, t, Rational64::one())).collect();
            for a in &actions {
                triples.extend(seminormal_triples(a));
            }
            FormMatrix::Seminormal(SparseSquare::from_triples(dim, triples))
        }
        Form::Orthogonal => {
            let mut triples: Vec<_> = (0..dim as u32).map(|t| (t, t, 1.0)).collect();
            for a in &actions {
                triples.extend(orthogonal_triples(a));
            }
            FormMatrix::Orthogonal(SparseSquare::from_triples(dim, triples))
        }
    };
    Ok(IrrepEvaluation {
        shape: shape.clone(),
        dim,
        matrix,
    })
}

/// Eigenvalue of smallest absolute value of an orthogonal-form evaluation.
/// The returned eigenpair must have residual `‖Av − λv‖ ≤ tol·max(1, ‖A‖)`.
pub fn smallest_abs_eigenvalue(e: &IrrepEvaluation, tol: f64, cap: usize) -> Result<f64> {
    let FormMatrix::Orthogonal(m) = &e.matrix else {
        return Err(Error::InvalidArgument(
            "eigenvalues need the symmetric orthogonal form".into(),
        ));
    };
    if !m.is_symmetric() {
        return Err(Error::InvalidArgument("matrix is not symmetric".into()));
    }
    if e.dim > cap {
        return Err(Error::BudgetExceeded {
            what: "eigenvalue computation",
            needed: e.dim.to_string(),
            limit: cap,
        });
    }
    let a = e.matrix.to_f64_dense();
    let eig = SymmetricEigen::new(a.clone());
    let (k, lambda) = eig
        .eigenvalues
        .iter()
        .copied()
        .enumerate()
        .min_by(|x, y| x.1.abs().total_cmp(&y.1.abs()))
        .ok_or_else(|| Error::InvalidArgument("empty matrix".into()))?;
    let v = eig.eigenvectors.column(k);
    let residual = (&a * v - v * lambda).norm();
    let scale = a.norm().max(1.0);
    if residual > tol * scale {
        return Err(Error::Verification(format!(
            "eigenpair residual {residual:e} exceeds {:e}",
            tol * scale
        )));
    }
    Ok(lambda)
}

/// Reduced word `[i₁, …, i_k]` (1-based) with `g = s_{i₁}·…·s_{i_k}` under
/// composition `(a·b)(x) = b(a(x))`.
pub fn reduced_word(g: &crate::perm::Permutation) -> Vec<usize> {
    let mut w = g.one_line();
    let mut word = Vec::new();
    // s_i·w swaps positions i and i+1 of the one-line word
    while let Some(i) = (0..w.len().saturating_sub(1)).find(|&i| w[i] > w[i + 1]) {
        w.swap(i, i + 1);
        word.push(i + 1);
    }
    word
}

/// Exact seminormal matrix of an arbitrary permutation, as the product of
/// generator matrices along a reduced word.
pub fn seminormal_matrix_of(
    generators: &[FormMatrix],
    g: &crate::perm::Permutation,
) -> Result<Vec<Vec<Rational64>>> {
    let dim = generators.first().map_or(1, FormMatrix::dim);
    let mut acc: Vec<Vec<Rational64>> = (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| {
                    if i == j {
                        Rational64::one()
                    } else {
                        Rational64::zero()
                    }
                })
                .collect()
        })
        .collect();
    for i in reduced_word(g) {
        let FormMatrix::Seminormal(m) = &generators[i - 1] else {
            return Err(Error::InvalidArgument(
                "seminormal generators expected".into(),
            ));
        };
        // acc ← acc · m
        let mut next = vec![vec![Rational64::zero(); dim]; dim];
        for (r, next_row) in next.iter_mut().enumerate() {
            for (k, a) in acc[r].iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for (j, v) in m.row(k) {
                    next_row[*j as usize] += a * v;
                }
            }
        }
        acc = next;
    }
    Ok(acc)
}
