//! `kendall`: bounds and perfect-code certificates for permutation codes
//! under the Kendall tau metric.

mod output;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use kendall_core::bounds::{self, factorial_form, BoundReport};
use kendall_core::perfect::{
    self, DominanceReport, PerfectOptions, ShapeStatus, Verdict, DEFAULT_COSET_DIM_CAP, DEFAULT_EXACT_DIM_CAP,
};
use kendall_core::young::{dominating_partitions, DEFAULT_COSET_BUDGET};
use kendall_core::{
    ball, ball_size, build_bound_problem, coset_action_matrix, hook_length_dimension, kendall_distance,
    smallest_abs_eigenvalue, solve_ilp_with, t_hat_irrep, Branching, Certificate, Execution, Form,
    IlpOptions, NodeLp, NumberPartition, Permutation, YoungSubgroup,
};
use serde_json::{json, Value};

use output::{emit, write_atomic, Format, Table};

/// Version of the cached matrix files; bump to invalidate old caches.
const CACHE_VERSION: u32 = 1;
/// Largest offset from a factorial rendered as `k!-c`.
const FACTORIAL_FORM_LIMIT: u64 = 1000;

#[derive(Parser, Debug)]
#[command(name = "kendall", version, about = "Permutation codes under the Kendall tau metric")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Directory for cached coset matrices.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Largest number of cosets to enumerate.
    #[arg(long, global = true, default_value_t = DEFAULT_COSET_BUDGET, value_parser = positive_usize)]
    budget_coset_dim: usize,
    /// Branch-and-bound node limit.
    #[arg(long, global = true, default_value_t = 10_000_000, value_parser = positive_u64)]
    budget_ilp_nodes: u64,
    /// Largest irreducible dimension for certificates.
    #[arg(long, global = true, default_value_t = perfect::DEFAULT_IRREP_DIM_CAP, value_parser = positive_usize)]
    budget_irrep_dim: usize,
    /// Node limit for the brute-force clique search.
    #[arg(long, global = true, default_value_t = 100_000_000, value_parser = positive_u64)]
    budget_clique_nodes: u64,
    /// Seed for the random primes used in certificates.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Print values near a factorial as `k!-c`.
    #[arg(long, global = true)]
    factorial_form: bool,
    /// Add wall-clock times to reports (makes output non-reproducible).
    #[arg(long, global = true)]
    timing: bool,
    /// Run data-parallel loops on one thread.
    #[arg(long, global = true)]
    sequential: bool,
}

impl Global {
    fn exec(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        }
    }

    fn big(&self, v: &num_bigint::BigUint) -> String {
        if self.factorial_form {
            factorial_form(v, FACTORIAL_FORM_LIMIT)
        } else {
            v.to_string()
        }
    }

    fn emit(&self, text: &str) -> Result<()> {
        emit(self.output.as_deref(), text)
    }
}

fn positive_usize(s: &str) -> std::result::Result<usize, String> {
    match s.parse::<usize>() {
        Ok(v) if v > 0 => Ok(v),
        _ => Err(format!("expected a positive integer, got {s:?}")),
    }
}

fn positive_u64(s: &str) -> std::result::Result<u64, String> {
    positive_usize(s).map(|v| v as u64)
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Kendall distance between two permutations in one-line notation.
    Distance { a: Permutation, b: Permutation },
    /// Size of the ball of radius r.
    Ball {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
        /// List the members around this center.
        #[arg(long)]
        center: Option<Permutation>,
    },
    /// Coset action matrix of a Young subgroup.
    Matrix {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        partition: String,
        #[arg(long, default_value_t = 1)]
        r: usize,
        /// Matrix file to write (standard output when absent).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Bounds on P(n, d).
    Bound {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        partition: Option<String>,
        /// Comma-separated subset of trivial, sphere, analytic, ilp, brute.
        #[arg(long, value_delimiter = ',')]
        method: Vec<Method>,
    },
    /// Solve the bound integer program and print the solution.
    Ilp {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        partition: String,
        #[arg(long, value_enum, default_value = "certified")]
        node_lp: NodeLpArg,
        #[arg(long, value_enum, default_value = "most-constrained")]
        branching: BranchingArg,
        /// Also write the problem in the dump format.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Nonexistence certificate for perfect codes.
    Perfect {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        partition: Option<String>,
        #[arg(long, value_enum, default_value = "coset")]
        route: Route,
        /// Radius for the divisibility route.
        #[arg(long, default_value_t = 1)]
        r: usize,
        /// Dimension cap for the chosen route.
        #[arg(long, value_parser = positive_usize)]
        max_dim: Option<usize>,
        /// Certificate file to write.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dimensions and smallest |eigenvalue| of the irreducibles above a shape.
    Table1 {
        #[arg(long, default_value = "4,4,4,3")]
        partition: String,
        /// Eigenvalues are computed up to this dimension.
        #[arg(long, default_value_t = 1000)]
        max_dim: usize,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Lower the minimum distance of a code to exactly d.
    Tighten {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: u64,
        /// Members separated by ';', each in one-line notation.
        #[arg(long)]
        code: String,
    },
    /// Re-check a certificate file from scratch.
    VerifyCert { path: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Trivial,
    Sphere,
    Analytic,
    Ilp,
    Brute,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum NodeLpArg {
    Exact,
    Certified,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BranchingArg {
    MostFractional,
    MostConstrained,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Route {
    Divisibility,
    Coset,
    Dominance,
}

fn partition(s: &str, n: usize) -> Result<NumberPartition> {
    Ok(NumberPartition::parse_for(s, n)?)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let msg = e.to_string();
            eprintln!("kendall: {}", msg.lines().next().unwrap_or("invalid arguments").trim_start_matches("error: "));
            return ExitCode::from(2);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let chain: Vec<String> = e.chain().map(|c| c.to_string()).collect();
            eprintln!("kendall: {}", chain.join(": ").replace('\n', " "));
            ExitCode::FAILURE
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    let g = &cli.global;
    match &cli.command {
        Command::Distance { a, b } => g.emit(&format!("{}\n", kendall_distance(a, b)?)),
        Command::Ball { n, r, center } => cmd_ball(g, *n, *r, center.as_ref()),
        Command::Matrix { n, partition: p, r, out } => cmd_matrix(g, *n, &partition(p, *n)?, *r, out.as_deref()),
        Command::Bound {
            n,
            d,
            partition: p,
            method,
        } => {
            let p = p.as_deref().map(|s| partition(s, *n)).transpose()?;
            cmd_bound(g, *n, *d, p.as_ref(), method)
        }
        Command::Ilp {
            n,
            d,
            partition: p,
            node_lp,
            branching,
            dump,
        } => cmd_ilp(g, *n, *d, &partition(p, *n)?, *node_lp, *branching, dump.as_deref()),
        Command::Perfect {
            n,
            partition: p,
            route,
            r,
            max_dim,
            out,
        } => {
            let p = p.as_deref().map(|s| partition(s, *n)).transpose()?;
            cmd_perfect(g, *n, p.as_ref(), *route, *r, *max_dim, out.as_deref())
        }
        Command::Table1 { partition: p, max_dim, tol } => {
            let lambda: NumberPartition = p.parse()?;
            cmd_table1(g, &lambda, *max_dim, *tol)
        }
        Command::Tighten { n, d, code } => cmd_tighten(g, *n, *d, code),
        Command::VerifyCert { path } => cmd_verify(g, path),
    }
}

fn cmd_ball(g: &Global, n: usize, r: usize, center: Option<&Permutation>) -> Result<()> {
    if !(1..=Permutation::MAX_N).contains(&n) {
        bail!("n must lie in 1..={}", Permutation::MAX_N);
    }
    let Some(c) = center else {
        return g.emit(&format!("{}\n", ball_size(n, r)));
    };
    if c.n() != n {
        bail!("center has length {}, expected {n}", c.n());
    }
    let b = ball(c, r);
    let mut t = Table::new(vec!["distance", "permutation"]);
    for m in &b.members {
        t.push(vec![json!(kendall_distance(c, m)?), json!(m.to_string())]);
    }
    g.emit(&t.render(g.format))
}

fn cache_path(dir: &Path, n: usize, lambda: &NumberPartition, r: usize) -> PathBuf {
    let p = lambda.to_string().replace(',', "_");
    dir.join(format!("coset-v{CACHE_VERSION}-n{n}-p{p}-r{r}.txt"))
}

fn cmd_matrix(g: &Global, n: usize, lambda: &NumberPartition, r: usize, out: Option<&Path>) -> Result<()> {
    let cached = g.cache_dir.as_ref().map(|d| cache_path(d, n, lambda, r));
    let bytes = match cached.as_ref().filter(|p| p.exists()) {
        Some(p) => fs::read(p).with_context(|| format!("cannot read {}", p.display()))?,
        None => {
            let h = YoungSubgroup::new(lambda.clone())?;
            let m = coset_action_matrix(&h, r, g.budget_coset_dim, g.exec())?;
            let mut buf = Vec::new();
            m.write_to(&mut buf)?;
            if let Some(p) = &cached {
                write_atomic(p, &buf)?;
            }
            buf
        }
    };
    match out.or(g.output.as_deref()) {
        Some(p) => write_atomic(p, &bytes),
        None => emit(None, &String::from_utf8(bytes)?),
    }
}

fn default_methods(n: usize, d: usize, lambda: Option<&NumberPartition>) -> Vec<Method> {
    let mut m = vec![Method::Trivial];
    if d >= 3 && d % 2 == 1 {
        m.push(Method::Sphere);
    }
    if d == 3 && n >= 11 && bounds::prime_analytic_bound(n).is_ok() {
        m.push(Method::Analytic);
    }
    if lambda.is_some() && d >= 3 {
        m.push(Method::Ilp);
    }
    if n <= 5 {
        m.push(Method::Brute);
    }
    m
}

fn cmd_bound(g: &Global, n: usize, d: usize, lambda: Option<&NumberPartition>, methods: &[Method]) -> Result<()> {
    let methods = if methods.is_empty() {
        default_methods(n, d, lambda)
    } else {
        methods.to_vec()
    };
    let mut headers = vec!["n", "d", "method", "partition", "value", "kind", "provenance"];
    if g.timing {
        headers.push("wall_time_s");
    }
    let mut t = Table::new(headers);
    for m in methods {
        let start = Instant::now();
        let report: Option<BoundReport> = match m {
            Method::Trivial => bounds::trivial_values(n, d)?,
            Method::Sphere => Some(bounds::sphere_packing_bound(n, d)?),
            Method::Analytic => {
                if d != 3 {
                    bail!("the analytic bound is stated for d = 3");
                }
                Some(bounds::prime_analytic_bound(n)?)
            }
            Method::Ilp => {
                let lambda = lambda.context("--method ilp needs --partition")?;
                let opts = IlpOptions {
                    node_budget: g.budget_ilp_nodes,
                    ..IlpOptions::default()
                };
                Some(bounds::ilp_bound(n, d, lambda, g.budget_coset_dim, &opts, g.exec())?)
            }
            Method::Brute => Some(bounds::brute_force_p(n, d, g.budget_clique_nodes)?.0),
        };
        let Some(r) = report else { continue };
        let mut row = vec![
            json!(r.n),
            json!(r.d),
            json!(r.method.as_str()),
            r.partition.as_ref().map_or(Value::Null, |p| json!(p.to_string())),
            json!(g.big(&r.value)),
            json!(r.kind.to_string()),
            json!(r.provenance),
        ];
        if g.timing {
            row.push(json!(start.elapsed().as_secs_f64()));
        }
        t.push(row);
    }
    g.emit(&t.render(g.format))
}

fn cmd_ilp(
    g: &Global,
    n: usize,
    d: usize,
    lambda: &NumberPartition,
    node_lp: NodeLpArg,
    branching: BranchingArg,
    dump: Option<&Path>,
) -> Result<()> {
    let problem = build_bound_problem(n, d, lambda, g.budget_coset_dim, g.exec())?;
    if let Some(p) = dump {
        let mut buf = Vec::new();
        problem.write_to(&mut buf)?;
        write_atomic(p, &buf)?;
    }
    let opts = IlpOptions {
        node_budget: g.budget_ilp_nodes,
        node_lp: match node_lp {
            NodeLpArg::Exact => NodeLp::Exact,
            NodeLpArg::Certified => NodeLp::Certified,
        },
        branching: match branching {
            BranchingArg::MostFractional => Branching::MostFractional,
            BranchingArg::MostConstrained => Branching::MostConstrained,
        },
    };
    let start = Instant::now();
    let sol = solve_ilp_with(&problem, &opts)?;
    let assignment: Vec<String> = sol.assignment.iter().map(ToString::to_string).collect();
    let mut headers = vec![
        "status",
        "objective_value",
        "upper_bound",
        "lp_bound",
        "vars",
        "rhs",
        "node_count",
        "pivots",
        "assignment",
    ];
    if g.timing {
        headers.push("wall_time_s");
    }
    let mut t = Table::new(headers);
    let mut row = vec![
        json!(sol.status.to_string()),
        json!(g.big(&sol.objective_value)),
        json!(g.big(&sol.upper_bound)),
        json!(sol.lp_bound.to_string()),
        json!(problem.var_count()),
        json!(problem.rhs().to_string()),
        json!(sol.node_count),
        json!(sol.pivots),
        json!(assignment.join(" ")),
    ];
    if g.timing {
        row.push(json!(start.elapsed().as_secs_f64()));
    }
    t.push(row);
    g.emit(&t.render(g.format))
}

fn status_cell(s: &ShapeStatus) -> (String, Value) {
    match s {
        ShapeStatus::Invertible { modulus, residue } => (
            "invertible".into(),
            json!(format!("det = {residue} mod {modulus}")),
        ),
        ShapeStatus::Singular { rank } => ("singular".into(), json!(format!("rank {rank}"))),
        ShapeStatus::Undecided => ("undecided".into(), Value::Null),
        ShapeStatus::OverCap => ("over_cap".into(), Value::Null),
    }
}

fn certificate_json(c: &Certificate) -> Value {
    let mut obj = serde_json::Map::new();
    let mut shapes = Vec::new();
    for (k, v) in c.fields() {
        if k == "shape" {
            shapes.push(json!(v));
        } else {
            obj.insert(k.to_string(), json!(v));
        }
    }
    if !shapes.is_empty() {
        obj.insert("shapes".into(), Value::Array(shapes));
    }
    Value::Object(obj)
}

fn cmd_perfect(
    g: &Global,
    n: usize,
    lambda: Option<&NumberPartition>,
    route: Route,
    r: usize,
    max_dim: Option<usize>,
    out: Option<&Path>,
) -> Result<()> {
    let opts = PerfectOptions {
        coset_dim_cap: max_dim.unwrap_or(DEFAULT_COSET_DIM_CAP.min(g.budget_coset_dim)),
        irrep_dim_cap: max_dim.unwrap_or(g.budget_irrep_dim),
        exact_dim_cap: DEFAULT_EXACT_DIM_CAP,
        seed: g.seed,
        exec: g.exec(),
    };
    let need = |l: Option<&NumberPartition>| l.cloned().context("this route needs --partition");
    let mut report: Option<DominanceReport> = None;
    let verdict = match route {
        Route::Divisibility => match perfect::perfect_divisibility_test(n, r)? {
            Some(c) => Verdict::Certified(c),
            None => Verdict::Inconclusive(format!("|B({r})| = {} divides {n}!", ball_size(n, r))),
        },
        Route::Coset => perfect::nonexistence_by_coset_matrix(n, &need(lambda)?, &opts)?,
        Route::Dominance => {
            let rep = perfect::nonexistence_by_dominance(n, &need(lambda)?, &opts)?;
            let v = rep.verdict.clone();
            report = Some(rep);
            v
        }
    };
    if let (Some(c), Some(path)) = (verdict.certificate(), out) {
        write_atomic(path, c.to_text().as_bytes())?;
    }
    let text = match g.format {
        Format::Json => {
            let mut obj = serde_json::Map::new();
            match &verdict {
                Verdict::Certified(c) => {
                    obj.insert("verdict".into(), json!("certified"));
                    obj.insert("conclusion".into(), json!(c.conclusion));
                    obj.insert("certificate".into(), certificate_json(c));
                    if let Some(p) = out {
                        obj.insert("certificate_path".into(), json!(p.display().to_string()));
                    }
                }
                Verdict::Inconclusive(why) => {
                    obj.insert("verdict".into(), json!("inconclusive"));
                    obj.insert("reason".into(), json!(why));
                }
            }
            if let Some(rep) = &report {
                let shapes: Vec<Value> = rep
                    .shapes
                    .iter()
                    .map(|s| {
                        let (status, evidence) = status_cell(&s.status);
                        json!({"shape": s.shape.to_string(), "dim": s.dim.to_string(), "status": status, "evidence": evidence})
                    })
                    .collect();
                obj.insert("shapes".into(), Value::Array(shapes));
            }
            format!("{:#}\n", Value::Object(obj))
        }
        Format::Text | Format::Csv => {
            let mut s = match &verdict {
                Verdict::Certified(c) => format!("certified: {} ({})\n", c.conclusion, c.kind()),
                Verdict::Inconclusive(why) => format!("inconclusive: {why}\n"),
            };
            if let Some(rep) = &report {
                let mut t = Table::new(vec!["shape", "dim", "status", "evidence"]);
                for o in &rep.shapes {
                    let (status, evidence) = status_cell(&o.status);
                    t.push(vec![json!(o.shape.to_string()), json!(o.dim.to_string()), json!(status), evidence]);
                }
                s += &t.render(g.format);
            }
            match (verdict.certificate(), out) {
                (Some(_), Some(p)) => s += &format!("certificate: {}\n", p.display()),
                (Some(c), None) if g.format == Format::Text => s += &c.to_text(),
                _ => {}
            }
            s
        }
    };
    g.emit(&text)
}

fn cmd_table1(g: &Global, lambda: &NumberPartition, max_dim: usize, tol: f64) -> Result<()> {
    let mut t = Table::new(vec!["partition", "dimension", "smallest_abs_eigenvalue"]);
    for mu in dominating_partitions(lambda) {
        let dim = hook_length_dimension(&mu);
        let eig = if dim <= max_dim.into() {
            let e = t_hat_irrep(&mu, 1, Form::Orthogonal, max_dim)?;
            let v = smallest_abs_eigenvalue(&e, tol, max_dim)?;
            json!(significant(v, 4))
        } else {
            Value::Null
        };
        t.push(vec![json!(mu.to_string()), json!(dim.to_string()), eig]);
    }
    g.emit(&t.render(g.format))
}

/// `v` rounded to `digits` significant digits in positional notation.
fn significant(v: f64, digits: i32) -> String {
    if v == 0.0 || !v.is_finite() {
        return v.to_string();
    }
    let decimals = (digits - 1 - v.abs().log10().floor() as i32).max(0) as usize;
    format!("{v:.decimals$}")
}

fn cmd_tighten(g: &Global, n: usize, d: u64, code: &str) -> Result<()> {
    let members = code
        .split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse::<Permutation>())
        .collect::<kendall_core::Result<Vec<_>>>()?;
    let c = bounds::CodeSet::new(n, members)?;
    let t = bounds::tighten_code(&c, d)?;
    let mut table = Table::new(vec!["permutation"]);
    for m in t.members() {
        table.push(vec![json!(m.to_string())]);
    }
    let min = t.min_distance().map_or(Value::Null, |v| json!(v));
    match g.format {
        Format::Json => g.emit(&format!(
            "{:#}\n",
            json!({"n": n, "min_distance": min, "members": table.to_json()})
        )),
        _ => g.emit(&format!("min_distance {min}\n{}", table.render(g.format))),
    }
}

fn cmd_verify(g: &Global, path: &Path) -> Result<()> {
    let f = fs::File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    let cert = Certificate::read_from(std::io::BufReader::new(f))?;
    perfect::verify(&cert, g.exec())?;
    match g.format {
        Format::Json => g.emit(&format!("{:#}\n", json!({"valid": true, "conclusion": cert.conclusion}))),
        _ => g.emit(&format!("valid: {}\n", cert.conclusion)),
    }
}
