//! Nonexistence certificates for perfect codes in S_n: the divisibility
//! test, invertibility of the coset action matrix, and invertibility of
//! every irreducible constituent along the dominance order.

use std::fmt;
use std::io::{BufRead, Write};

use num_bigint::BigUint;
use num_rational::Rational64;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exec::{map_indexed, Execution};
use crate::irreps::{hook_length_dimension, t_hat_irrep, Form, FormMatrix};
use crate::linalg::{
    det_mod, exact_rank_det, is_prime_u64, prime_not_dividing, random_prime, unscale_mod,
    IntMatrix, Montgomery,
};
use crate::perm::{ball_size, Permutation};

const MAX_N: usize = Permutation::MAX_N;
use crate::young::{
    coset_action_matrix, dominating_partitions, factorial, NumberPartition, YoungSubgroup,
};

/// Default dimension cap for the coset route.
pub const DEFAULT_COSET_DIM_CAP: usize = 100_000;
/// Default dimension cap for each irreducible in the dominance route.
pub const DEFAULT_IRREP_DIM_CAP: usize = 30_000;
/// Largest dimension for which exact elimination runs after every modular
/// attempt returned zero.
pub const DEFAULT_EXACT_DIM_CAP: usize = 600;
/// Primes tried before falling back to exact elimination.
pub const MODULAR_ATTEMPTS: usize = 5;

const HEADER: &str = "kendall-certificate v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertificateKind {
    Divisibility,
    CosetInvertible,
    IrrepDominance,
}

impl CertificateKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CertificateKind::Divisibility => "divisibility",
            CertificateKind::CosetInvertible => "coset_invertible",
            CertificateKind::IrrepDominance => "irrep_dominance",
        }
    }
}

impl fmt::Display for CertificateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Nonzero determinant residue of one irreducible's `T̂`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShapeWitness {
    pub shape: NumberPartition,
    pub dim: usize,
    pub modulus: u64,
    pub residue: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// `ball_size ∤ group_order`.
    Divisibility {
        radius: usize,
        ball_size: BigUint,
        group_order: BigUint,
    },
    /// `n ∤ |H|` and `det(T̂) ≢ 0 (mod modulus)`.
    CosetInvertible {
        subgroup_order: BigUint,
        dim: usize,
        modulus: u64,
        residue: u64,
    },
    /// `n ∤ |H|` and every dominating shape has an invertible `T̂`.
    IrrepDominance {
        subgroup_order: BigUint,
        shapes: Vec<ShapeWitness>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub n: usize,
    pub partition: Option<NumberPartition>,
    pub witness: Witness,
    pub conclusion: String,
}

fn conclusion(n: usize, radius: usize) -> String {
    format!("no {radius}-perfect code in S_{n}")
}

impl Certificate {
    pub fn kind(&self) -> CertificateKind {
        match self.witness {
            Witness::Divisibility { .. } => CertificateKind::Divisibility,
            Witness::CosetInvertible { .. } => CertificateKind::CosetInvertible,
            Witness::IrrepDominance { .. } => CertificateKind::IrrepDominance,
        }
    }

    /// Fields in serialization order. Shape witnesses repeat the `shape` key.
    pub fn fields(&self) -> Vec<(&'static str, String)> {
        let mut out = vec![
            ("kind", self.kind().to_string()),
            ("n", self.n.to_string()),
            (
                "partition",
                self.partition
                    .as_ref()
                    .map_or("-".into(), ToString::to_string),
            ),
        ];
        match &self.witness {
            Witness::Divisibility {
                radius,
                ball_size,
                group_order,
            } => {
                out.push(("radius", radius.to_string()));
                out.push(("ball_size", ball_size.to_string()));
                out.push(("group_order", group_order.to_string()));
            }
            Witness::CosetInvertible {
                subgroup_order,
                dim,
                modulus,
                residue,
            } => {
                out.push(("subgroup_order", subgroup_order.to_string()));
                out.push(("dim", dim.to_string()));
                out.push(("modulus", modulus.to_string()));
                out.push(("residue", residue.to_string()));
            }
            Witness::IrrepDominance {
                subgroup_order,
                shapes,
            } => {
                out.push(("subgroup_order", subgroup_order.to_string()));
                for s in shapes {
                    out.push((
                        "shape",
                        format!(
                            "{} dim={} modulus={} residue={}",
                            s.shape, s.dim, s.modulus, s.residue
                        ),
                    ));
                }
            }
        }
        out.push(("conclusion", self.conclusion.clone()));
        out
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{HEADER}")?;
        for (k, v) in self.fields() {
            writeln!(w, "{k}={v}")?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii")
    }

    pub fn read_from<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r
            .lines()
            .map(|l| l.map_err(|e| Error::Parse(e.to_string())));
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty certificate".into()))??;
        if header.trim() != HEADER {
            return Err(Error::Parse(format!(
                "unknown certificate header {header:?}"
            )));
        }
        let mut fields: Vec<(String, String)> = Vec::new();
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("malformed line {line:?}")))?;
            fields.push((k.to_string(), v.to_string()));
        }
        let get = |key: &str| -> Result<&str> {
            fields
                .iter()
                .find(|(k, _)| k == key)
                .map(|(_, v)| v.as_str())
                .ok_or_else(|| Error::Parse(format!("missing field {key}")))
        };
        let n: usize = parse_num(get("n")?)?;
        let partition = match get("partition")? {
            "-" => None,
            s => Some(NumberPartition::parse_for(s, n)?),
        };
        let witness = match get("kind")? {
            "divisibility" => Witness::Divisibility {
                radius: parse_num(get("radius")?)?,
                ball_size: parse_num(get("ball_size")?)?,
                group_order: parse_num(get("group_order")?)?,
            },
            "coset_invertible" => Witness::CosetInvertible {
                subgroup_order: parse_num(get("subgroup_order")?)?,
                dim: parse_num(get("dim")?)?,
                modulus: parse_num(get("modulus")?)?,
                residue: parse_num(get("residue")?)?,
            },
            "irrep_dominance" => Witness::IrrepDominance {
                subgroup_order: parse_num(get("subgroup_order")?)?,
                shapes: fields
                    .iter()
                    .filter(|(k, _)| k == "shape")
                    .map(|(_, v)| parse_shape_witness(v, n))
                    .collect::<Result<_>>()?,
            },
            other => return Err(Error::Parse(format!("unknown certificate kind {other:?}"))),
        };
        Ok(Certificate {
            n,
            partition,
            witness,
            conclusion: get("conclusion")?.to_string(),
        })
    }
}

fn parse_num<T: std::str::FromStr>(s: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("not a number: {s:?}")))
}

fn parse_shape_witness(v: &str, n: usize) -> Result<ShapeWitness> {
    let mut parts = v.split_whitespace();
    let shape = NumberPartition::parse_for(parts.next().unwrap_or(""), n)?;
    let mut get = |key: &str| -> Result<&str> {
        parts
            .next()
            .and_then(|kv| kv.strip_prefix(key))
            .and_then(|rest| rest.strip_prefix('='))
            .ok_or_else(|| Error::Parse(format!("shape witness {v:?} lacks {key}")))
    };
    Ok(ShapeWitness {
        shape,
        dim: parse_num(get("dim")?)?,
        modulus: parse_num(get("modulus")?)?,
        residue: parse_num(get("residue")?)?,
    })
}

/// Certificate iff `ball_size(n, r) ∤ n!`. Without one nothing is decided.
pub fn perfect_divisibility_test(n: usize, r: usize) -> Result<Option<Certificate>> {
    if !(2..=MAX_N).contains(&n) || r < 1 {
        return Err(Error::InvalidArgument(format!(
            "divisibility test needs 2 <= n <= {MAX_N} and r >= 1, got n={n}, r={r}"
        )));
    }
    let ball = ball_size(n, r);
    let order = factorial(n);
    if (&order % &ball).is_zero() {
        return Ok(None);
    }
    Ok(Some(Certificate {
        n,
        partition: None,
        witness: Witness::Divisibility {
            radius: r,
            ball_size: ball,
            group_order: order,
        },
        conclusion: conclusion(n, r),
    }))
}

/// `(q, det(m) mod q)` when the residue is nonzero, a proof that `m` is
/// invertible over the rationals.
pub fn modular_invertibility(m: &IntMatrix, q: u64, exec: Execution) -> Result<Option<(u64, u64)>> {
    if !is_prime_u64(q) {
        return Err(Error::InvalidArgument(format!("{q} is not prime")));
    }
    let d = det_mod(m, q, exec)?;
    Ok((d != 0).then_some((q, d)))
}

/// Outcome of an invertibility check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Invertibility {
    Invertible {
        modulus: u64,
        residue: u64,
    },
    /// Established by exact elimination.
    Singular {
        rank: usize,
    },
    /// Every modular residue was zero and the matrix is too large for
    /// exact elimination.
    Undecided,
}

/// Tries [`MODULAR_ATTEMPTS`] random primes, then exact elimination up to
/// `exact_cap`. `scales` are the row factors applied to clear denominators;
/// the residue reported is that of the unscaled determinant.
pub fn certify_invertible(
    m: &IntMatrix,
    scales: &[i64],
    rng: &mut ChaCha8Rng,
    exact_cap: usize,
    exec: Execution,
) -> Result<Invertibility> {
    let unscaled =
        |q: u64, d: u64| -> Result<u64> { Ok(Montgomery::new(q)?.mul(d, unscale_mod(scales, q)?)) };
    for _ in 0..MODULAR_ATTEMPTS {
        let q = random_prime(rng);
        if let Some((q, d)) = modular_invertibility(m, q, exec)? {
            return Ok(Invertibility::Invertible {
                modulus: q,
                residue: unscaled(q, d)?,
            });
        }
    }
    if m.dim() > exact_cap {
        return Ok(Invertibility::Undecided);
    }
    let (rank, det) = exact_rank_det(m);
    if rank < m.dim() {
        return Ok(Invertibility::Singular { rank });
    }
    let q = prime_not_dividing(&det, rng);
    let d = det_mod(m, q, exec)?;
    Ok(Invertibility::Invertible {
        modulus: q,
        residue: unscaled(q, d)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PerfectOptions {
    pub coset_dim_cap: usize,
    pub irrep_dim_cap: usize,
    pub exact_dim_cap: usize,
    pub seed: u64,
    pub exec: Execution,
}

impl Default for PerfectOptions {
    fn default() -> Self {
        PerfectOptions {
            coset_dim_cap: DEFAULT_COSET_DIM_CAP,
            irrep_dim_cap: DEFAULT_IRREP_DIM_CAP,
            exact_dim_cap: DEFAULT_EXACT_DIM_CAP,
            seed: 0,
            exec: Execution::Parallel,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Certified(Certificate),
    Inconclusive(String),
}

impl Verdict {
    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            Verdict::Certified(c) => Some(c),
            Verdict::Inconclusive(_) => None,
        }
    }
}

fn check_partition(n: usize, lambda: &NumberPartition) -> Result<()> {
    if lambda.n() != n {
        return Err(Error::InvalidPartition(format!(
            "{lambda} does not partition {n}"
        )));
    }
    Ok(())
}

fn divides_subgroup_order(n: usize, lambda: &NumberPartition) -> bool {
    (lambda.young_order() % BigUint::from(n)).is_zero()
}

fn coset_matrix(lambda: &NumberPartition, cap: usize, exec: Execution) -> Result<IntMatrix> {
    let h = YoungSubgroup::new(lambda.clone())?;
    let m = coset_action_matrix(&h, 1, cap, exec)?;
    Ok(IntMatrix::from_sparse(&m.entries))
}

/// Certificate iff `n ∤ |H|` and the radius-1 coset action matrix is
/// invertible.
pub fn nonexistence_by_coset_matrix(
    n: usize,
    lambda: &NumberPartition,
    opts: &PerfectOptions,
) -> Result<Verdict> {
    check_partition(n, lambda)?;
    if divides_subgroup_order(n, lambda) {
        return Ok(Verdict::Inconclusive(format!(
            "{n} divides |H| = {} for H = S_({lambda})",
            lambda.young_order()
        )));
    }
    let m = coset_matrix(lambda, opts.coset_dim_cap, opts.exec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    Ok(
        match certify_invertible(&m, &[], &mut rng, opts.exact_dim_cap, opts.exec)? {
            Invertibility::Invertible { modulus, residue } => Verdict::Certified(Certificate {
                n,
                partition: Some(lambda.clone()),
                witness: Witness::CosetInvertible {
                    subgroup_order: lambda.young_order(),
                    dim: m.dim(),
                    modulus,
                    residue,
                },
                conclusion: conclusion(n, 1),
            }),
            Invertibility::Singular { rank } => Verdict::Inconclusive(format!(
                "coset matrix of dimension {} is singular (rank {rank})",
                m.dim()
            )),
            Invertibility::Undecided => Verdict::Inconclusive(format!(
                "all {MODULAR_ATTEMPTS} modular determinants of the {}-dimensional coset matrix vanished",
                m.dim()
            )),
        },
    )
}

fn seminormal_t_hat(shape: &NumberPartition, cap: usize) -> Result<(IntMatrix, Vec<i64>)> {
    let e = t_hat_irrep(shape, 1, Form::Seminormal, cap)?;
    let FormMatrix::Seminormal(m) = &e.matrix else {
        unreachable!("seminormal requested")
    };
    let rows: Vec<Vec<(u32, Rational64)>> = (0..m.dim()).map(|i| m.row(i).to_vec()).collect();
    IntMatrix::from_rational_rows(&rows)
}

/// Status of one shape in a dominance run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ShapeStatus {
    Invertible { modulus: u64, residue: u64 },
    Singular { rank: usize },
    Undecided,
    OverCap,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShapeOutcome {
    pub shape: NumberPartition,
    pub dim: BigUint,
    pub status: ShapeStatus,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DominanceReport {
    pub n: usize,
    pub partition: NumberPartition,
    pub shapes: Vec<ShapeOutcome>,
    pub verdict: Verdict,
}

impl DominanceReport {
    pub fn certified_shapes(&self) -> impl Iterator<Item = &ShapeOutcome> {
        self.shapes
            .iter()
            .filter(|s| matches!(s.status, ShapeStatus::Invertible { .. }))
    }
}

fn certify_shape(
    shape: &NumberPartition,
    opts: &PerfectOptions,
    stream: u64,
) -> Result<ShapeStatus> {
    let dim = hook_length_dimension(shape);
    if dim > BigUint::from(opts.irrep_dim_cap) {
        return Ok(ShapeStatus::OverCap);
    }
    let (m, scales) = seminormal_t_hat(shape, opts.irrep_dim_cap)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    rng.set_stream(stream);
    Ok(
        match certify_invertible(
            &m,
            &scales,
            &mut rng,
            opts.exact_dim_cap,
            Execution::Sequential,
        )? {
            Invertibility::Invertible { modulus, residue } => {
                ShapeStatus::Invertible { modulus, residue }
            }
            Invertibility::Singular { rank } => ShapeStatus::Singular { rank },
            Invertibility::Undecided => ShapeStatus::Undecided,
        },
    )
}

/// Certifies `T̂^{ρ_μ}` invertible for every `μ` dominating `λ`. Shapes
/// above the dimension cap are reported as such and the certificate is
/// withheld; the shapes below the cap are still processed.
pub fn nonexistence_by_dominance(
    n: usize,
    lambda: &NumberPartition,
    opts: &PerfectOptions,
) -> Result<DominanceReport> {
    check_partition(n, lambda)?;
    let shapes = dominating_partitions(lambda);
    if divides_subgroup_order(n, lambda) {
        return Ok(DominanceReport {
            n,
            partition: lambda.clone(),
            shapes: Vec::new(),
            verdict: Verdict::Inconclusive(format!(
                "{n} divides |H| = {} for H = S_({lambda})",
                lambda.young_order()
            )),
        });
    }
    let statuses = map_indexed(shapes.len(), opts.exec, |i| {
        certify_shape(&shapes[i], opts, i as u64)
    });
    let mut outcomes = Vec::with_capacity(shapes.len());
    for (shape, status) in shapes.into_iter().zip(statuses) {
        outcomes.push(ShapeOutcome {
            dim: hook_length_dimension(&shape),
            shape,
            status: status?,
        });
    }
    let failing: Vec<String> = outcomes
        .iter()
        .filter_map(|o| match o.status {
            ShapeStatus::Invertible { .. } => None,
            ShapeStatus::Singular { rank } => {
                Some(format!("{} singular (rank {rank} of {})", o.shape, o.dim))
            }
            ShapeStatus::Undecided => Some(format!("{} undecided", o.shape)),
            ShapeStatus::OverCap => Some(format!("{} over the cap (dim {})", o.shape, o.dim)),
        })
        .collect();
    let verdict = if failing.is_empty() {
        Verdict::Certified(Certificate {
            n,
            partition: Some(lambda.clone()),
            witness: Witness::IrrepDominance {
                subgroup_order: lambda.young_order(),
                shapes: outcomes
                    .iter()
                    .map(|o| match o.status {
                        ShapeStatus::Invertible { modulus, residue } => ShapeWitness {
                            shape: o.shape.clone(),
                            dim: o.dim.to_string().parse().expect("under cap"),
                            modulus,
                            residue,
                        },
                        _ => unreachable!(),
                    })
                    .collect(),
            },
            conclusion: conclusion(n, 1),
        })
    } else {
        Verdict::Inconclusive(format!(
            "{} of {} shapes not certified: {}",
            failing.len(),
            outcomes.len(),
            failing.join("; ")
        ))
    };
    Ok(DominanceReport {
        n,
        partition: lambda.clone(),
        shapes: outcomes,
        verdict,
    })
}

/// The coset route for `λ = (p−1, p−1, 2)` in `S_{2p}`. For `p ≥ 3`,
/// `2p ∤ ((p−1)!)²·2` always holds.
pub fn conjecture_check(p: usize, opts: &PerfectOptions) -> Result<Verdict> {
    if p < 3 || !is_prime_u64(p as u64) {
        return Err(Error::InvalidArgument(format!("{p} is not an odd prime")));
    }
    let lambda = NumberPartition::new(vec![p - 1, p - 1, 2])?;
    nonexistence_by_coset_matrix(2 * p, &lambda, opts)
}

/// Recomputes every fact the certificate claims.
pub fn verify(cert: &Certificate, exec: Execution) -> Result<()> {
    let fail = |msg: String| Err(Error::Verification(msg));
    let n = cert.n;
    match &cert.witness {
        Witness::Divisibility {
            radius,
            ball_size: ball,
            group_order,
        } => {
            if cert.partition.is_some() {
                return fail("divisibility certificates carry no partition".into());
            }
            if !(2..=MAX_N).contains(&n) || *radius < 1 {
                return fail(format!("n={n}, r={radius} out of range"));
            }
            if *ball != ball_size(n, *radius) {
                return fail(format!("ball size {ball} is wrong"));
            }
            if *group_order != factorial(n) {
                return fail(format!("group order {group_order} is not {n}!"));
            }
            if (group_order % ball).is_zero() {
                return fail(format!("{ball} divides {group_order}"));
            }
            if cert.conclusion != conclusion(n, *radius) {
                return fail(format!("conclusion {:?} does not follow", cert.conclusion));
            }
        }
        Witness::CosetInvertible {
            subgroup_order,
            dim,
            modulus,
            residue,
        } => {
            let lambda = subgroup_checks(cert, subgroup_order)?;
            if !is_prime_u64(*modulus) || *residue == 0 || residue >= modulus {
                return fail(format!("bad modular witness ({modulus}, {residue})"));
            }
            let m = coset_matrix(lambda, *dim, exec)?;
            if m.dim() != *dim {
                return fail(format!("coset matrix has dimension {}, not {dim}", m.dim()));
            }
            let d = det_mod(&m, *modulus, exec)?;
            if d != *residue {
                return fail(format!("determinant residue is {d}, not {residue}"));
            }
        }
        Witness::IrrepDominance {
            subgroup_order,
            shapes,
        } => {
            let lambda = subgroup_checks(cert, subgroup_order)?;
            let expected = dominating_partitions(lambda);
            let listed: Vec<NumberPartition> = shapes.iter().map(|s| s.shape.clone()).collect();
            if listed != expected {
                return fail("shape list is not the set of partitions dominating λ".into());
            }
            let checks = map_indexed(shapes.len(), exec, |i| -> Result<()> {
                let s = &shapes[i];
                if hook_length_dimension(&s.shape) != BigUint::from(s.dim) {
                    return Err(Error::Verification(format!(
                        "{} has the wrong dimension",
                        s.shape
                    )));
                }
                if !is_prime_u64(s.modulus) || s.residue == 0 || s.residue >= s.modulus {
                    return Err(Error::Verification(format!(
                        "{}: bad modular witness",
                        s.shape
                    )));
                }
                let (m, scales) = seminormal_t_hat(&s.shape, s.dim)?;
                let d = Montgomery::new(s.modulus)?.mul(
                    det_mod(&m, s.modulus, Execution::Sequential)?,
                    unscale_mod(&scales, s.modulus)?,
                );
                if d != s.residue {
                    return Err(Error::Verification(format!(
                        "{}: determinant residue is {d}, not {}",
                        s.shape, s.residue
                    )));
                }
                Ok(())
            });
            checks.into_iter().collect::<Result<()>>()?;
        }
    }
    Ok(())
}

fn subgroup_checks<'a>(
    cert: &'a Certificate,
    subgroup_order: &BigUint,
) -> Result<&'a NumberPartition> {
    let Some(lambda) = &cert.partition else {
        return Err(Error::Verification("missing partition".into()));
    };
    if lambda.n() != cert.n {
        return Err(Error::Verification(format!(
            "{lambda} does not partition {}",
            cert.n
        )));
    }
    if *subgroup_order != lambda.young_order() {
        return Err(Error::Verification(format!(
            "|H| is {}, not {subgroup_order}",
            lambda.young_order()
        )));
    }
    if (subgroup_order % BigUint::from(cert.n)).is_zero() {
        return Err(Error::Verification(format!(
            "{} divides |H| = {subgroup_order}",
            cert.n
        )));
    }
    if cert.conclusion != conclusion(cert.n, 1) {
        return Err(Error::Verification(format!(
            "conclusion {:?} does not follow",
            cert.conclusion
        )));
    }
    Ok(lambda)
}
