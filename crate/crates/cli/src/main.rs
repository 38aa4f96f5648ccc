use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use idemrange::cwd::build_cwd_family;
use idemrange::lb::{
    eligible_sums, lambda, min_cover, sample_hard_query, subproblem, top_box, Check, Knowledge, RepDiagram, Subproblem,
    DEFAULT_DELTA,
};
use idemrange::pointgen::{format_point_set, read_point_set};
use idemrange::workload::{query_rng, sample_query, QueryDist};
use idemrange::{
    build_ids, check_well_distributed, hammersley_wd, uniform_random, BitOr64, BoxD, IdSet, MaxReal, PointSet,
    Semigroup, WdMode, NEG_INF,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(name = "idemrange", version, about = "Range searching with exact cost accounting in idempotent semigroups")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Hammersley,
    Uniform,
}

#[derive(Clone, Copy, ValueEnum)]
enum Dist {
    Uniform,
    Hard,
}

#[derive(Clone, Copy, ValueEnum)]
enum SgArg {
    Max,
    Or,
    Idset,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exact,
    Sampled,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a point set in the text format.
    Gen {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; standard output if absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a point-set file for epsilon-well-distribution.
    Wd {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long, value_enum, default_value = "exact")]
        mode: Mode,
        #[arg(long, default_value_t = idemrange::pointgen::SAMPLED_RECTANGLES)]
        rectangles: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Build a collectively well-distributed family and write it to a directory.
    Cwd {
        #[arg(long = "big-n")]
        big_n: usize,
        #[arg(long)]
        h: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        out: PathBuf,
        /// Also run the sampled check on every contiguous union at this epsilon.
        #[arg(long)]
        verify_eps: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Build the structure over a point-set file and answer one query.
    Query {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value = "idset")]
        semigroup: SgArg,
        /// Comma-separated lower corner; the last d-k entries are ignored.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        lo: Vec<f64>,
        #[arg(long, value_delimiter = ',')]
        hi: Vec<f64>,
    },
    /// Build the structure and time a query workload; CSV on standard output.
    Bench {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        queries: u64,
        #[arg(long, value_enum, default_value = "uniform")]
        dist: Dist,
        #[arg(long, value_enum, default_value = "max")]
        semigroup: SgArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "uniform")]
        input: Kind,
    },
    /// Sample hard queries and report the lower-bound quantities; CSV on standard output.
    Lbprobe {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        samples: u64,
        #[arg(long, default_value_t = DEFAULT_DELTA)]
        delta: f64,
        /// Subproblem index used in every two-sided dimension.
        #[arg(long, default_value_t = 1)]
        j: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Error that maps to the usage exit code.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.is::<Usage>() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn run(cmd: Cmd) -> Result<ExitCode> {
    match cmd {
        Cmd::Gen { kind, n, d, seed, out } => {
            let p = points(kind, n, d, seed)?;
            let text = format_point_set(&p);
            match out {
                Some(path) => std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?,
                None => io::stdout().write_all(text.as_bytes())?,
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Wd { input, eps, mode, rectangles, seed } => {
            let p = read_point_set(&input)?;
            let mode = match mode {
                Mode::Exact => WdMode::Exact,
                Mode::Sampled => WdMode::Sampled { rectangles, seed },
            };
            let r = check_well_distributed(&p, eps, mode)?;
            println!("passed={}", r.passed);
            println!("epsilon_observed={}", r.epsilon_observed);
            println!("worst_rectangle={}", r.worst_rectangle);
            println!("count_condition_holds={}", r.count_condition_holds);
            println!("rectangles_examined={}", r.rectangles_examined);
            Ok(if r.passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Cmd::Cwd { big_n, h, k, d, out, verify_eps, seed } => {
            let fam = build_cwd_family(big_n, h, k, d)?;
            fam.write_dir(&out)?;
            println!("wrote {} sets, {} points to {}", fam.sets().len(), fam.total_points(), out.display());
            if let Some(eps) = verify_eps {
                let rep = fam.verify(eps, WdMode::sampled(seed))?;
                println!("unions={} worst_epsilon={} all_passed={}", rep.unions.len(), rep.worst_epsilon, rep.all_passed);
                if !rep.all_passed {
                    return Ok(ExitCode::from(1));
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Query { input, k, semigroup, lo, hi } => {
            let p = read_point_set(&input)?;
            let d = p.dim();
            if k == 0 || k >= d || lo.len() < k || hi.len() != d {
                return Err(usage(format!("need 1 <= k < d={d}, at least k lower bounds and exactly d upper bounds")));
            }
            let mut qlo = vec![NEG_INF; d];
            qlo[..k].copy_from_slice(&lo[..k]);
            let q = BoxD::new(qlo, hi).map_err(|e| usage(e.to_string()))?;
            match semigroup {
                SgArg::Max => answer_one(&p, k, &q, MaxReal, |v| v.to_string()),
                SgArg::Or => answer_one(&p, k, &q, BitOr64, |v| format!("{v:#x}")),
                SgArg::Idset => answer_one(&p, k, &q, IdSet, |v| format!("{:?}", v.to_vec())),
            }
        }
        Cmd::Bench { n, d, k, queries, dist, semigroup, seed, input } => {
            let dist = match dist {
                Dist::Uniform => QueryDist::Uniform,
                Dist::Hard => QueryDist::Hard,
            };
            if k == 0 || k >= d {
                return Err(usage(format!("need 1 <= k < d, got k={k}, d={d}")));
            }
            if dist == QueryDist::Hard && (d < 2 || k + 1 != d) {
                return Err(usage(format!("--dist hard needs d >= 2 and k = d-1, got d={d}, k={k}")));
            }
            if n < 4 {
                return Err(usage(format!("--n must be at least 4, got {n}")));
            }
            let p = points(input, n, d, seed)?;
            let run_cfg = BenchRun { n, d, k, seed, dist, queries };
            let ok = match semigroup {
                SgArg::Max => bench(&p, &run_cfg, MaxReal)?,
                SgArg::Or => bench(&p, &run_cfg, BitOr64)?,
                SgArg::Idset => bench(&p, &run_cfg, IdSet)?,
            };
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Cmd::Lbprobe { n, d, samples, delta, j, seed } => {
            if d < 2 {
                return Err(usage(format!("lbprobe needs d >= 2, got {d}")));
            }
            if n < 4 || j == 0 || delta.is_nan() || delta <= 0.0 {
                return Err(usage("need n >= 4, j >= 1 and delta > 0"));
            }
            lbprobe(n, d, samples, delta, j, seed)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn points(kind: Kind, n: usize, d: usize, seed: u64) -> Result<PointSet> {
    if n == 0 || d == 0 {
        return Err(usage("--n and --d must be positive"));
    }
    Ok(match kind {
        Kind::Hammersley => hammersley_wd(n, d)?,
        Kind::Uniform => uniform_random(n, d, seed)?,
    })
}

/// Combination of the canonical weights of the points in `q`, by scanning.
fn scan_value<S: Semigroup>(p: &PointSet, q: &BoxD, sg: &S) -> Option<S::Value> {
    let w: Vec<S::Value> = p.iter().filter(|x| q.contains_coords(&x.coords)).map(|x| sg.weight(x.id)).collect();
    sg.combine_all(w.iter()).ok()
}

fn answer_one<S: Semigroup>(p: &PointSet, k: usize, q: &BoxD, sg: S, show: fn(&S::Value) -> String) -> Result<ExitCode> {
    let s = build_ids(p, k, sg.clone())?;
    let (a, tr) = s.query_traced(q)?;
    let verified = a.value == scan_value(p, q, &sg);
    println!("query={q}");
    println!("value={}", a.value.as_ref().map_or("none".into(), show));
    println!("sums_used={}", a.sums_used);
    println!("singletons_used={}", a.singletons_used);
    println!("total_cost={}", a.total_cost());
    println!("s_plus={}", s.s_plus());
    println!("sum_ids={:?}", tr.sum_ids);
    println!("verified={verified}");
    Ok(if verified { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

struct BenchRun {
    n: usize,
    d: usize,
    k: usize,
    seed: u64,
    dist: QueryDist,
    queries: u64,
}

/// Writes the CSV and returns whether every answer matched the scan.
fn bench<S: Semigroup>(p: &PointSet, b: &BenchRun, sg: S) -> Result<bool> {
    let s = build_ids(p, b.k, sg.clone())?;
    let h = s.config().h as u32;
    let mut out = io::BufWriter::new(io::stdout().lock());
    writeln!(out, "n,d,k,seed,dist,query_id,sums_used,singletons_used,total_cost,verified,max_cost,s_plus")?;
    let prefix = format!("{},{},{},{},{}", b.n, b.d, b.k, b.seed, b.dist);
    let (mut sums, mut singles, mut max_cost, mut all_ok) = (0usize, 0usize, 0usize, true);
    for qid in 0..b.queries {
        let q = sample_query(&mut query_rng(b.seed, qid), b.dist, b.d, b.k, h)?;
        let a = s.query(&q)?;
        let ok = a.value == scan_value(p, &q, &sg);
        all_ok &= ok;
        sums += a.sums_used;
        singles += a.singletons_used;
        max_cost = max_cost.max(a.total_cost());
        writeln!(out, "{prefix},{qid},{},{},{},{ok},,", a.sums_used, a.singletons_used, a.total_cost())?;
    }
    let m = b.queries.max(1) as f64;
    writeln!(
        out,
        "{prefix},summary,{:.4},{:.4},{:.4},{all_ok},{max_cost},{}",
        sums as f64 / m,
        singles as f64 / m,
        (sums + singles) as f64 / m,
        s.s_plus()
    )?;
    out.flush()?;
    Ok(all_ok)
}

fn lbprobe(n: usize, d: usize, samples: u64, delta: f64, j: usize, seed: u64) -> Result<()> {
    let p = uniform_random(n, d, seed)?;
    let s = build_ids(&p, d - 1, IdSet)?;
    let h = s.config().h as u32;
    let g = RepDiagram::new(h)?;
    let extents: Vec<BoxD> = s.sums().iter().map(|x| x.tight.clone()).collect();
    let lam = lambda(delta, h as usize, &vec![j; d - 1], n, s.s_plus());
    let all_js = index_vectors(h as usize - 1, d - 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = io::BufWriter::new(io::stdout().lock());
    writeln!(
        out,
        "query_id,h,j,subproblem,defined_subproblems,check_I_fail_rate,check_II_fail_rate,lambda,phi,top_box_size,top_box_beta,targets,structure_cost,min_cover"
    )?;
    let (mut fail_one, mut passed_one, mut fail_two) = (0u64, 0u64, 0u64);
    for qid in 0..samples {
        let hq = sample_hard_query(&mut rng, &g, d)?;
        let defined = all_js
            .iter()
            .filter(|js| matches!(subproblem(&hq, &g, js), Ok(Subproblem::Defined { .. })))
            .count();
        let sub = subproblem(&hq, &g, &vec![j; d - 1])?;
        let status = match &sub {
            Subproblem::Defined { .. } => {
                passed_one += 1;
                "defined"
            }
            Subproblem::Undefined(Check::I { .. }) => {
                fail_one += 1;
                "check_I"
            }
            Subproblem::Undefined(Check::II { .. }) => {
                passed_one += 1;
                fail_two += 1;
                "check_II"
            }
        };
        let rate_one = fail_one as f64 / (qid + 1) as f64;
        let rate_two = if passed_one == 0 { 0.0 } else { fail_two as f64 / passed_one as f64 };
        let (phi, tb_size, tb_beta) = match &sub {
            Subproblem::Defined { .. } => {
                let phi = eligible_sums(&extents, &hq, &sub, &g.tree, Knowledge::Full).len();
                match top_box(&sub, s.points(), lam)? {
                    Some(tb) => (phi.to_string(), tb.ids.len().to_string(), format!("{:.6}", tb.beta)),
                    None => (phi.to_string(), "0".into(), String::new()),
                }
            }
            Subproblem::Undefined(_) => (String::new(), String::new(), String::new()),
        };
        let q = hq.to_box();
        let cost = s.query(&q)?.total_cost();
        let targets = s.ids_in_box(&q);
        let usable: Vec<Vec<u32>> = s
            .sums()
            .iter()
            .map(|x| x.value.to_vec())
            .filter(|ids| ids.iter().all(|id| targets.binary_search(id).is_ok()))
            .collect();
        let mc = match min_cover(&targets, &usable) {
            Ok(v) => v.to_string(),
            Err(_) => "skipped".into(),
        };
        writeln!(
            out,
            "{qid},{h},{j},{status},{defined},{rate_one:.6},{rate_two:.6},{lam},{phi},{tb_size},{tb_beta},{},{cost},{mc}",
            targets.len()
        )?;
    }
    out.flush()?;
    Ok(())
}

/// All vectors in `[1, m]^len`.
fn index_vectors(m: usize, len: usize) -> Vec<Vec<usize>> {
    let mut all = vec![Vec::new()];
    for _ in 0..len {
        all = all.into_iter().flat_map(|v| (1..=m).map(move |x| [v.clone(), vec![x]].concat())).collect();
    }
    all
}
