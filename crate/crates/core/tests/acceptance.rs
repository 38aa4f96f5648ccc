//! Acceptance suite: one PASS/FAIL line per criterion. Exits non-zero if any fails.

use std::collections::BTreeMap;
use std::time::Instant;

use idemrange::cwd::build_cwd_family;
use idemrange::dominance::build_dominance;
use idemrange::dyadic::DyadicTree;
use idemrange::lb::{min_cover, sample_hard_query, subproblem, Check, RepDiagram, Subproblem};
use idemrange::workload::{query_rng, sample_query, uniform_query, QueryDist};
use idemrange::{build_ids, uniform_random, BoxD, IdSet, Ids, MaxReal, PointSet, WdMode};
use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    id: &'static str,
    name: &'static str,
    pass: bool,
    detail: String,
}

fn outcome(id: &'static str, name: &'static str, pass: bool, detail: String) -> Outcome {
    Outcome { id, name, pass, detail }
}

fn scan(p: &PointSet, q: &BoxD) -> Ids {
    p.iter().filter(|x| q.contains_coords(&x.coords)).map(|x| x.id).collect()
}

fn log2(x: f64) -> f64 {
    x.log2()
}

/// Criteria 1 and 2 share one query suite.
fn exactness_and_containment() -> Vec<Outcome> {
    let n = 4096;
    let p = uniform_random(n, 2, 1).unwrap();
    let s = build_ids(&p, 1, IdSet).unwrap();
    let h = s.config().h as u32;
    let (mut wrong, mut used, mut escaped) = (0usize, 0usize, 0usize);
    let start = Instant::now();
    for (dist, seed) in [(QueryDist::Uniform, 11u64), (QueryDist::Hard, 12)] {
        for qid in 0..1000 {
            let q = sample_query(&mut query_rng(seed, qid), dist, 2, 1, h).unwrap();
            let (a, tr) = s.query_traced(&q).unwrap();
            if a.value.unwrap_or_else(Ids::empty) != scan(&p, &q) {
                wrong += 1;
            }
            used += tr.sum_ids.len();
            escaped += tr.sum_ids.iter().filter(|&&id| !q.contains_box(&s.sum(id).region)).count();
        }
    }
    let secs = start.elapsed().as_secs_f64();
    vec![
        outcome(
            "1",
            "exactness vs scan (n=4096, d=2, k=1, 1000 uniform + 1000 hard)",
            wrong == 0 && secs < 60.0,
            format!("mismatches={wrong}/2000, {secs:.1}s"),
        ),
        outcome(
            "2",
            "containment of used sums",
            escaped == 0 && used > 0,
            format!("{escaped} of {used} used sums escape their query"),
        ),
    ]
}

fn storage_bound() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut fails = Vec::new();
    for d in [2usize, 3] {
        for k in [1, d - 1].into_iter().unique() {
            for e in 10..=16 {
                let n = 1usize << e;
                let p = uniform_random(n, d, e as u64).unwrap();
                let s = build_ids(&p, k, MaxReal).unwrap();
                let bound = (1usize << k) * n;
                worst = worst.max(s.s_plus() as f64 / bound as f64);
                if s.s_plus() > bound {
                    fails.push(format!("d={d} k={k} n=2^{e}: {} > {bound}", s.s_plus()));
                }
            }
        }
    }
    outcome(
        "3",
        "storage S+ <= 2^k n for d in {2,3}, k in {1,d-1}, n in 2^10..2^16",
        fails.is_empty(),
        format!("max S+/(2^k n) = {worst:.3}{}", if fails.is_empty() { String::new() } else { format!("; {}", fails.join(", ")) }),
    )
}

fn mean_uniform_cost(n: usize, queries: u64) -> f64 {
    let p = uniform_random(n, 2, n as u64).unwrap();
    let s = build_ids(&p, 1, MaxReal).unwrap();
    let total: usize = (0..queries).map(|qid| s.query(&uniform_query(&mut query_rng(40, qid), 2, 1)).unwrap().total_cost()).sum();
    total as f64 / queries as f64
}

fn query_scaling() -> Outcome {
    let llog = |n: f64| log2(n) * log2(log2(n));
    let sq = |n: f64| log2(n) * log2(n);
    let small: Vec<(f64, f64)> = (10..=12).map(|e| ((1u64 << e) as f64, mean_uniform_cost(1 << e, 500))).collect();
    let c = small.iter().map(|&(n, m)| m / llog(n)).fold(0.0, f64::max);
    let c2 = small.iter().map(|&(n, m)| m / sq(n)).fold(0.0, f64::max);
    let big_n = (1u64 << 16) as f64;
    let big = mean_uniform_cost(1 << 16, 500);
    let limit = 1.5 * c * llog(big_n);
    outcome(
        "4",
        "query cost scaling, d=2 k=1, n=2^16 vs fit on 2^10..2^12",
        big <= limit,
        format!(
            "C={c:.3}, mean@2^16={big:.2} <= {limit:.2} (ratio {:.3}); log^2 fit C2={c2:.3}, ratio@2^16 {:.3}",
            big / (c * llog(big_n)),
            big / (c2 * sq(big_n))
        ),
    )
}

fn prefix_cover_exhaustive() -> Outcome {
    let mut failures = Vec::new();
    let mut leaves = 0;
    for h in 1..=10u32 {
        let t = DyadicTree::new(0.0, 1.0, h).unwrap();
        for r in 0..1u64 << h {
            leaves += 1;
            let v = t.leaf(r);
            let pairs = t.balanced_prefix_cover(v);
            let mut ranges: Vec<(u64, u64)> = Vec::new();
            let mut per_depth: BTreeMap<u32, usize> = BTreeMap::new();
            let mut ok = pairs.len() <= 2 * h as usize;
            for p in &pairs {
                ok &= p.u.depth == p.w.depth && p.w.rank == p.u.rank + 1;
                let shift = h - p.u.depth;
                ranges.push((p.u.rank << shift, (p.u.rank + 1) << shift));
                ok &= (p.w.rank + 1) << shift <= r + 1;
                *per_depth.entry(p.u.depth).or_default() += 1;
            }
            ok &= per_depth.values().all(|&c| c <= 2);
            ranges.sort_unstable();
            let mut at = 0;
            for (a, b) in &ranges {
                ok &= *a == at;
                at = *b;
            }
            ok &= at == r;
            let len: f64 = pairs.iter().map(|p| t.b(p.u) - t.a(p.u)).sum();
            ok &= (len - t.a(v)).abs() < 1e-12;
            if !ok {
                failures.push(format!("h={h} leaf={r}"));
            }
        }
    }
    outcome(
        "5",
        "balanced prefix cover, all leaves of heights 1..10",
        failures.is_empty(),
        format!("{} failures over {leaves} leaves{}", failures.len(), failures.iter().take(5).map(|f| format!(" {f}")).collect::<String>()),
    )
}

fn cwd_verification() -> Outcome {
    let fam = build_cwd_family(512, 8, 1, 2).unwrap();
    let mode = WdMode::Sampled { rectangles: 100_000, seed: 6 };
    let probe = fam.verify(1e-12, mode).unwrap();
    let eps0 = probe.worst_epsilon;
    let rep = fam.verify(eps0, mode).unwrap();
    let count_ok = rep.unions.iter().all(|(_, r)| r.count_condition_holds);
    outcome(
        "6",
        "CWD family N=512 h=8 k=1 d=2, 36 unions, sampled check",
        eps0 > 0.0 && rep.unions.len() == 36 && rep.all_passed && count_ok,
        format!("eps0={eps0:.5}, unions={}, all passed={}, count condition={count_ok}", rep.unions.len(), rep.all_passed),
    )
}

fn dominance_structure() -> Outcome {
    let n = 1usize << 14;
    let p = uniform_random(n, 2, 77).unwrap();
    let mut wrong = 0;
    let mut stats = BTreeMap::new();
    for e in [8u32, 10, 12] {
        let s = 1usize << e;
        let ds = build_dominance(&p, s, IdSet).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(e as u64);
        let (mut max_m, mut singles) = (0usize, 0usize);
        let queries = 10_000;
        for _ in 0..queries {
            let q = [rng.gen::<f64>(), rng.gen::<f64>()];
            let (a, tr) = ds.query_traced(&q).unwrap();
            let want: Ids = p.iter().filter(|x| x.dominated_by(&q)).map(|x| x.id).collect();
            if a.value.unwrap_or_else(Ids::empty) != want {
                wrong += 1;
            }
            max_m = max_m.max(tr.maxima);
            singles += a.singletons_used;
        }
        let mean = singles as f64 / queries as f64;
        stats.insert(e, (max_m, mean / ((n / s) as f64 * log2(n as f64))));
    }
    let c_m = stats[&8].0 as f64 / 8.0;
    let m_ok = stats[&12].0 as f64 <= 2.0 * c_m * 12.0;
    let r_ref = stats[&10].1;
    let r_ok = [8, 12].iter().all(|e| stats[e].1 <= 2.0 * r_ref && stats[e].1 >= r_ref / 2.0);
    outcome(
        "7",
        "dominance structure, d'=2, n=2^14, s in {2^8,2^10,2^12}",
        wrong == 0 && m_ok && r_ok,
        format!(
            "mismatches={wrong}/30000; max|M| {}/{}/{} with C'={c_m:.3}; singletons/((n/s)log n) {:.3}/{:.3}/{:.3}",
            stats[&8].0, stats[&10].0, stats[&12].0, stats[&8].1, stats[&10].1, stats[&12].1
        ),
    )
}

fn hard_distribution() -> Outcome {
    let h = 16u32;
    let g = RepDiagram::new(h).unwrap();
    let samples = 100_000;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut hist = vec![0usize; h as usize];
    let js = [1usize, 4, 8];
    let mut fail_one = [0usize; 3];
    let mut pass_one = [0usize; 3];
    let mut fail_two = [0usize; 3];
    for _ in 0..samples {
        let hq = sample_hard_query(&mut rng, &g, 2).unwrap();
        hist[hq.dims[0].depth() as usize] += 1;
        for (t, &j) in js.iter().enumerate() {
            match subproblem(&hq, &g, &[j]).unwrap() {
                Subproblem::Undefined(Check::I { .. }) => fail_one[t] += 1,
                Subproblem::Undefined(Check::II { .. }) => {
                    pass_one[t] += 1;
                    fail_two[t] += 1;
                }
                Subproblem::Defined { .. } => pass_one[t] += 1,
            }
        }
    }
    let p = 1.0 / h as f64;
    let sigma = (samples as f64 * p * (1.0 - p)).sqrt();
    let expect = samples as f64 * p;
    let worst_dev = hist.iter().map(|&c| (c as f64 - expect).abs() / sigma).fold(0.0, f64::max);
    let mut ok = worst_dev <= 3.0;
    let mut detail = format!("max depth deviation {worst_dev:.2} sigma;");
    for (t, &j) in js.iter().enumerate() {
        let r1 = fail_one[t] as f64 / samples as f64;
        let r2 = fail_two[t] as f64 / pass_one[t] as f64;
        ok &= (r1 - j as f64 / h as f64).abs() <= 0.02 && (r2 - 0.5).abs() <= 0.01;
        detail += &format!(" j={j}: check I {r1:.4} (want {:.4}), check II | I {r2:.4};", j as f64 / h as f64);
    }
    outcome("8", "hard query distribution, h=16, 10^5 samples", ok, detail)
}

/// Tries sum combinations by increasing size.
fn min_cover_by_size(targets: &[u32], sums: &[Vec<u32>]) -> usize {
    let mut best = targets.len();
    for size in 1..=sums.len() {
        if size >= best {
            break;
        }
        for combo in sums.iter().combinations(size) {
            let covered = targets.iter().filter(|id| combo.iter().any(|s| s.contains(id))).count();
            best = best.min(size + targets.len() - covered);
        }
    }
    best
}

fn min_cover_sanity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let (mut instances, mut attempts, mut below, mut disagree, mut strict) = (0, 0, 0, 0, 0);
    while instances < 100 {
        attempts += 1;
        let n = rng.gen_range(4..=16);
        let p = uniform_random(n, 2, rng.gen()).unwrap();
        let s = build_ids(&p, 1, IdSet).unwrap();
        let q = uniform_query(&mut rng, 2, 1);
        let targets = s.ids_in_box(&q);
        let usable: Vec<Vec<u32>> = s
            .sums()
            .iter()
            .map(|x| x.value.to_vec())
            .filter(|ids| ids.iter().all(|id| targets.binary_search(id).is_ok()))
            .collect();
        if targets.len() < 2 || targets.len() > 16 || usable.len() > 16 {
            continue;
        }
        instances += 1;
        let cost = s.query(&q).unwrap().total_cost();
        let mc = min_cover(&targets, &usable).unwrap();
        if cost < mc {
            below += 1;
        }
        if cost > mc {
            strict += 1;
        }
        if mc != min_cover_by_size(&targets, &usable) {
            disagree += 1;
        }
    }
    outcome(
        "9",
        "min cover on 100 tiny instances",
        below == 0 && disagree == 0,
        format!("cost < min_cover: {below}; oracle disagreements: {disagree}; cost > min_cover on {strict}; {attempts} draws"),
    )
}

fn main() {
    let mut results = exactness_and_containment();
    results.push(storage_bound());
    results.push(query_scaling());
    results.push(prefix_cover_exhaustive());
    results.push(cwd_verification());
    results.push(dominance_structure());
    results.push(hard_distribution());
    results.push(min_cover_sanity());
    let mut failed = 0;
    for r in &results {
        println!("[{}] {} {}: {}", if r.pass { "PASS" } else { "FAIL" }, r.id, r.name, r.detail);
        failed += usize::from(!r.pass);
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
