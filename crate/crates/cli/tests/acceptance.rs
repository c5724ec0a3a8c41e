//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits non-zero
//! if any criterion fails or exceeds its time budget.

mod common;

use std::fs;
use std::time::{Duration, Instant};

use attrmeaning::bench::{run_noise_curve, run_split_validation, split_meaningful, SplitProtocol, MEANINGFUL_ROW, NON_MEANINGFUL_ROW};
use attrmeaning::discovery::{lift_features, train_lsh, train_mmc, train_sh, LiftConfig, MmcHyperparams};
use attrmeaning::keywords::{evaluate_hit_rate, generate_keywords, merge_duplicates, NamingTable, TruthTable};
use attrmeaning::synthetic::planted_meaningful_set;
use attrmeaning::{
    brute_force_cvx_oracle, distance_cvx, distance_plain, project_simplex, random_attribute_set, reconstruct_cvx,
    AttributeMatrix, FeatureMatrix, LabelVector, MeaningfulSubspace, SolverConfig,
};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

type Check = Result<String, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Duration,
    run: fn() -> Check,
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e2s<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn solver_oracle_agreement() -> Check {
    let cfg = SolverConfig::default();
    let mut worst = 0.0f64;
    for seed in 0..50u64 {
        let mut r = rng(1000 + seed);
        let n = r.random_range(2..=16);
        let j = r.random_range(1..=3);
        let s = MeaningfulSubspace::new(random_attribute_set(n, j, 2 * seed).map_err(e2s)?);
        let z = random_attribute_set(n, 1, 2 * seed + 1).map_err(e2s)?.attribute(0);
        let fit = reconstruct_cvx(&s, &z, &cfg).map_err(e2s)?;
        let oracle = brute_force_cvx_oracle(&s, &z, 0.01).map_err(e2s)?;
        let gap = (fit.residual - oracle).abs();
        worst = worst.max(gap);
        ensure(gap <= 1e-3, || {
            format!("seed {seed} (N={n}, J={j}): solver {:.6} vs oracle {:.6}", fit.residual, oracle)
        })?;
    }
    Ok(format!("50 instances, max |solver - oracle| = {worst:.2e}"))
}

fn subset_zero() -> Check {
    let cfg = SolverConfig::default();
    let mut worst = 0.0f64;
    for seed in 0..30u64 {
        let mut r = rng(2000 + seed);
        let n = r.random_range(5..=80);
        let j = r.random_range(2..=12);
        let s = MeaningfulSubspace::new(random_attribute_set(n, j, seed).map_err(e2s)?);
        let k = r.random_range(1..=j + 2);
        let cols: Vec<usize> = (0..k).map(|_| r.random_range(0..j)).collect();
        let d = s.attributes().select_columns(&cols).map_err(e2s)?;
        let mean = distance_cvx(&s, &d, &cfg).map_err(e2s)?.mean_distance;
        worst = worst.max(mean);
        ensure(mean <= 1e-6, || format!("seed {seed}: mean distance {mean:e}"))?;
    }
    Ok(format!("30 subsets, max mean distance = {worst:.2e}"))
}

fn relaxation_ordering() -> Check {
    let cfg = SolverConfig::default();
    let mut violations = 0;
    let mut min_margin = f64::INFINITY;
    for seed in 0..100u64 {
        let mut r = rng(3000 + seed);
        let n = r.random_range(4..=60);
        let j = r.random_range(1..=10);
        let k = r.random_range(1..=8);
        let s = MeaningfulSubspace::new(random_attribute_set(n, j, 2 * seed).map_err(e2s)?);
        let d = random_attribute_set(n, k, 2 * seed + 1).map_err(e2s)?;
        let plain = distance_plain(&s, &d).map_err(e2s)?.mean_distance;
        let cvx = distance_cvx(&s, &d, &cfg).map_err(e2s)?.mean_distance;
        min_margin = min_margin.min(cvx - plain);
        // Round-off only: both sides are sums of squares of magnitude <= 4N.
        if plain > cvx + 1e-9 {
            violations += 1;
        }
    }
    ensure(violations == 0, || format!("{violations} violations"))?;
    Ok(format!("100 pairs, 0 violations, min(cvx - plain) = {min_margin:.2e}"))
}

fn split_validation() -> Check {
    let cfg = SolverConfig::default();
    let mut wins = 0;
    for seed in 0..100u64 {
        let s = MeaningfulSubspace::new(planted_meaningful_set(200, 20, 0.05, seed).map_err(e2s)?);
        let proto = SplitProtocol { seed, left_fraction: 0.5 };
        let report = run_split_validation(&s, &[], &proto, &cfg).map_err(e2s)?;
        let m = report.row(MEANINGFUL_ROW).unwrap().mean_distance;
        let r = report.row(NON_MEANINGFUL_ROW).unwrap().mean_distance;
        if m < r {
            wins += 1;
        }
    }
    ensure(wins >= 95, || format!("meaningful set closer in only {wins}/100 seeds"))?;
    Ok(format!("meaningful set closer in {wins}/100 seeds"))
}

fn noise_monotonicity() -> Check {
    let cfg = SolverConfig::default();
    let s = MeaningfulSubspace::new(planted_meaningful_set(200, 20, 0.05, 42).map_err(e2s)?);
    let split = split_meaningful(&s, &SplitProtocol { seed: 42, left_fraction: 0.5 }).map_err(e2s)?;
    let curve = run_noise_curve(&split.right, &split.left, 20, 4, 20, 42, &cfg).map_err(e2s)?;
    ensure(curve.counts == [0, 4, 8, 12, 16, 20], || format!("grid {:?}", curve.counts))?;
    for (i, w) in curve.distances.windows(2).enumerate() {
        ensure(w[1] - w[0] >= -1e-6, || {
            format!("drop at {} -> {}: {:?}", curve.counts[i], curve.counts[i + 1], curve.distances)
        })?;
    }
    let shown: Vec<String> = curve.distances.iter().map(|d| format!("{d:.3}")).collect();
    Ok(format!("curve [{}]", shown.join(", ")))
}

fn projection_correctness() -> Check {
    let mut r = rng(6000);
    let normal = Normal::new(0.0, 2.0).unwrap();
    for case in 0..1000 {
        let j = r.random_range(1..=50);
        let v: Vec<f64> = (0..j).map(|_| normal.sample(&mut r)).collect();
        let p = project_simplex(&v).map_err(e2s)?;
        ensure(p.iter().all(|&x| x >= 0.0), || format!("case {case}: negative entry"))?;
        let sum: f64 = p.iter().sum();
        ensure((sum - 1.0).abs() <= 1e-12, || format!("case {case}: sum {sum}"))?;
        let dist = |q: &[f64]| v.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
        let dp = dist(&p);
        for _ in 0..1000 {
            let e: Vec<f64> = (0..j).map(|_| -r.random::<f64>().max(f64::MIN_POSITIVE).ln()).collect();
            let total: f64 = e.iter().sum();
            let q: Vec<f64> = e.iter().map(|x| x / total).collect();
            ensure(dp <= dist(&q) + 1e-12, || format!("case {case}: feasible point closer"))?;
        }
    }
    Ok("1000 inputs, each against 1000 feasible points".into())
}

fn blobs(n: usize, seed: u64) -> (FeatureMatrix, LabelVector) {
    let mut r = rng(seed);
    let noise = Normal::new(0.0, 0.5).unwrap();
    let labels: Vec<usize> = (0..n).map(|i| i % 2).collect();
    let m = DMatrix::from_fn(n, 2, |i, _| {
        let centre = if labels[i] == 0 { -3.0 } else { 3.0 };
        centre + noise.sample(&mut r)
    });
    (FeatureMatrix::new(m).unwrap(), LabelVector::new(labels).unwrap())
}

/// Perceptron on `[codes, 1]`; returns training accuracy.
fn perceptron_accuracy(z: &AttributeMatrix, y: &[usize]) -> f64 {
    let k = z.k();
    let mut w = vec![0.0; k + 1];
    let predict = |w: &[f64], i: usize| {
        let s: f64 = (0..k).map(|b| w[b] * f64::from(z.get(i, b))).sum::<f64>() + w[k];
        if s > 0.0 { 1 } else { 0 }
    };
    for _ in 0..1000 {
        let mut mistakes = 0;
        for i in 0..z.n() {
            if predict(&w, i) != y[i] {
                mistakes += 1;
                let t = if y[i] == 1 { 1.0 } else { -1.0 };
                for b in 0..k {
                    w[b] += t * f64::from(z.get(i, b));
                }
                w[k] += t;
            }
        }
        if mistakes == 0 {
            break;
        }
    }
    (0..z.n()).filter(|&i| predict(&w, i) == y[i]).count() as f64 / z.n() as f64
}

fn encoder_properties() -> Check {
    let in_codomain = |z: &AttributeMatrix, n: usize, k: usize| {
        z.n() == n && z.k() == k && z.columns().all(|c| c.iter().all(|&b| b == 1 || b == -1))
    };
    let mut r = rng(7000);
    let f = FeatureMatrix::new(DMatrix::from_fn(60, 6, |_, _| r.random::<f64>())).unwrap();
    let y = LabelVector::new((0..60).map(|i| i % 3).collect()).unwrap();

    let lsh = train_lsh(6, 8, 5).map_err(e2s)?;
    let z_lsh = lsh.encode(&f).map_err(e2s)?;
    ensure(in_codomain(&z_lsh, 60, 8), || "LSH codes out of shape or codomain".into())?;
    ensure(train_lsh(6, 8, 5).map_err(e2s)?.encode(&f).map_err(e2s)? == z_lsh, || "LSH not deterministic".into())?;

    let sh = train_sh(&f, 5).map_err(e2s)?;
    ensure(in_codomain(&sh.encode(&f).map_err(e2s)?, 60, 5), || "SH codes out of shape or codomain".into())?;

    let hp = MmcHyperparams::default();
    let mmc = train_mmc(&f, &y, 4, hp, 5).map_err(e2s)?;
    let z_mmc = mmc.encode(&f).map_err(e2s)?;
    ensure(in_codomain(&z_mmc, 60, 4), || "MMC codes out of shape or codomain".into())?;
    ensure(
        train_mmc(&f, &y, 4, hp, 5).map_err(e2s)?.encode(&f).map_err(e2s)? == z_mmc,
        || "MMC not deterministic".into(),
    )?;

    // Unequal sides fix the principal axes, keeping each projection uniform.
    let u = FeatureMatrix::new(DMatrix::from_fn(10_000, 2, |_, j| r.random::<f64>() * [2.0, 1.0][j])).unwrap();
    let z_sh = train_sh(&u, 4).map_err(e2s)?.encode(&u).map_err(e2s)?;
    let mut worst_balance = 0.0f64;
    for col in z_sh.columns() {
        let pos = col.iter().filter(|&&b| b == 1).count() as f64 / 10_000.0;
        worst_balance = worst_balance.max((pos - 0.5).abs());
    }
    ensure(worst_balance <= 0.10, || format!("SH bit balance off by {worst_balance:.3}"))?;

    let (bf, by) = blobs(100, 7100);
    let z_blobs = train_mmc(&bf, &by, 2, hp, 7).map_err(e2s)?.encode(&bf).map_err(e2s)?;
    let acc = perceptron_accuracy(&z_blobs, by.labels());
    ensure(acc == 1.0, || format!("MMC blob codes separable at {:.1}%", 100.0 * acc))?;

    Ok(format!(
        "codomain/determinism ok, SH max imbalance {:.3}, MMC blob accuracy {:.0}%",
        worst_balance,
        100.0 * acc
    ))
}

fn lifting_kernel() -> Check {
    let cfg = LiftConfig { order: 1, period: 0.65 };
    let mut r = rng(8000);
    let mut worst = 0.0f64;
    let mut failures = 0;
    for _ in 0..100 {
        let m = DMatrix::from_fn(2, 5, |_, _| r.random::<f64>());
        let exact: f64 = (0..5).map(|d| m[(0, d)].min(m[(1, d)])).sum();
        let lifted = lift_features(&FeatureMatrix::new(m).unwrap(), &cfg).map_err(e2s)?.features;
        let approx = lifted.matrix().row(0).dot(&lifted.matrix().row(1));
        let rel = (approx - exact).abs() / exact;
        worst = worst.max(rel);
        if rel > 0.10 {
            failures += 1;
        }
    }
    ensure(failures == 0, || {
        format!("{failures}/100 pairs above 10% relative error, max {:.1}%", 100.0 * worst)
    })?;
    Ok(format!("max relative error {:.1}%", 100.0 * worst))
}

fn keyword_exactness() -> Check {
    let rows: Vec<Vec<i8>> = common::TOY_CODES
        .lines()
        .map(|l| l.split(',').map(|t| t.parse().unwrap()).collect())
        .collect();
    let z = AttributeMatrix::from_rows(&rows).map_err(e2s)?;
    let names = NamingTable::new(
        5,
        [(0, "lawn"), (1, "Walking"), (2, ""), (3, " Lawn"), (4, "wood")].map(|(b, s)| (b, s.to_string())),
    )
    .map_err(e2s)?;
    let (merged, merged_names) = merge_duplicates(&z, &names).map_err(e2s)?;
    let expected = AttributeMatrix::from_rows(&[
        vec![1, 1, 1, -1],
        vec![1, -1, 1, 1],
        vec![-1, -1, -1, -1],
        vec![1, -1, -1, 1],
        vec![-1, 1, 1, 1],
    ])
    .map_err(e2s)?;
    ensure(merged == expected, || "merged code matrix differs from hand result".into())?;
    ensure(
        merged_names.names() == [Some("lawn".to_string()), Some("Walking".to_string()), None, Some("wood".to_string())],
        || format!("merged names {:?}", merged_names.names()),
    )?;
    let ids: Vec<String> = common::TOY_ITEMS.lines().map(str::to_string).collect();
    let report = generate_keywords(&merged, &merged_names, &ids).map_err(e2s)?;
    let lists: Vec<Vec<&str>> = report.items.iter().map(|i| i.keywords.iter().map(String::as_str).collect()).collect();
    let want: Vec<Vec<&str>> = vec![
        vec!["lawn", "Walking"],
        vec!["lawn", "wood"],
        vec![],
        vec!["lawn", "wood"],
        vec!["Walking", "wood"],
    ];
    ensure(lists == want, || format!("keywords {lists:?}"))?;

    let mut judgments = Vec::new();
    for line in common::TOY_TRUTH.lines().skip(1) {
        let t: Vec<&str> = line.split(',').collect();
        judgments.push((t[0].to_string(), t[1].to_string(), t[2] == "1"));
    }
    let truth = TruthTable::new(judgments, Vec::new()).map_err(e2s)?;
    let eval = evaluate_hit_rate(&report, &truth).map_err(e2s)?;
    ensure(eval.overall == Some(common::TOY_HIT_RATE), || format!("overall {:?}", eval.overall))?;
    ensure(eval.emitted == 8 && eval.suitable == 5, || format!("{} / {}", eval.suitable, eval.emitted))?;
    Ok("hit rate 5/8 exact, merge and unnamed-bit rules exact".into())
}

fn cli_determinism() -> Check {
    let a = tempfile::tempdir().map_err(e2s)?;
    let b = tempfile::tempdir().map_err(e2s)?;
    common::write_fixtures(a.path());
    common::write_fixtures(b.path());
    let mut files = 0;
    for (args, outputs) in common::golden_commands() {
        for dir in [&a, &b] {
            let out = common::run_in(dir.path(), &args);
            ensure(out.status.success(), || format!("{args:?}: {}", common::stderr(&out)))?;
        }
        for name in outputs {
            let x = fs::read(a.path().join(name)).map_err(e2s)?;
            let y = fs::read(b.path().join(name)).map_err(e2s)?;
            ensure(x == y, || format!("{name} differs between runs"))?;
            files += 1;
        }
    }
    Ok(format!("{files} output files byte-identical across reruns"))
}

fn main() {
    let criteria = [
        Criterion { id: 1, name: "solver-oracle agreement", budget: Duration::from_secs(10), run: solver_oracle_agreement },
        Criterion { id: 2, name: "subset-zero", budget: Duration::from_secs(1), run: subset_zero },
        Criterion { id: 3, name: "relaxation ordering", budget: Duration::from_secs(5), run: relaxation_ordering },
        Criterion { id: 4, name: "split-validation", budget: Duration::from_secs(60), run: split_validation },
        Criterion { id: 5, name: "noise monotonicity", budget: Duration::from_secs(60), run: noise_monotonicity },
        Criterion { id: 6, name: "simplex projection", budget: Duration::from_secs(5), run: projection_correctness },
        Criterion { id: 7, name: "encoder properties", budget: Duration::from_secs(30), run: encoder_properties },
        Criterion { id: 8, name: "lifting kernel approximation", budget: Duration::from_secs(5), run: lifting_kernel },
        Criterion { id: 9, name: "keyword pipeline exactness", budget: Duration::from_secs(1), run: keyword_exactness },
        Criterion { id: 10, name: "CLI determinism", budget: Duration::from_secs(30), run: cli_determinism },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let result = (c.run)();
        let elapsed = start.elapsed();
        let (ok, detail) = match result {
            Ok(d) if elapsed <= c.budget => (true, d),
            Ok(d) => (false, format!("{d}; over time budget")),
            Err(e) => (false, e),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "criterion {:>2} {:<30} {}  ({:.2}s / {}s)  {}",
            c.id,
            c.name,
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            c.budget.as_secs(),
            detail
        );
    }
    println!("acceptance: {} passed, {} failed", criteria.len() - failed, failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
