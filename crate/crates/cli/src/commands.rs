use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use attrmeaning::bench::{
    hit_cost_analysis, run_noise_curve, run_split_validation, HitCost, NoiseCurve, SplitProtocol,
    SplitReport,
};
use attrmeaning::discovery::{
    encode, train_lsh, train_mmc, train_sh, DiscoveryModel, LiftConfig, MmcHyperparams, Preprocessor,
};
use attrmeaning::keywords::{
    default_item_ids, evaluate_hit_rate, generate_keywords, merge_duplicates, nameable_count, HitRateReport,
    KeywordReport,
};
use attrmeaning::{
    distance_cvx, distance_plain, rank_methods, AttributeMatrix, DistanceMode, MeaningfulSubspace, RankedMethod,
    SolverConfig,
};
use serde::Serialize;

use crate::args::*;
use crate::error::{CliError, CliResult};
use crate::io;
use crate::model::ModelDocument;

#[derive(Debug, Serialize)]
struct Meta {
    artifact: &'static str,
    version: &'static str,
    command: Vec<String>,
    seed: Option<u64>,
}

#[derive(Debug, Serialize)]
struct Report<T: Serialize> {
    meta: Meta,
    #[serde(flatten)]
    body: T,
}

struct Ctx {
    argv: Vec<String>,
}

impl Ctx {
    fn report<T: Serialize>(&self, seed: Option<u64>, body: T) -> CliResult<Vec<u8>> {
        io::json_bytes(&Report {
            meta: Meta {
                artifact: env!("CARGO_PKG_NAME"),
                version: env!("CARGO_PKG_VERSION"),
                command: self.argv.clone(),
                seed,
            },
            body,
        })
    }
}

pub fn run(cli: Cli, argv: Vec<String>) -> CliResult<()> {
    let ctx = Ctx { argv };
    match cli.command {
        Command::Discover(a) => discover(&a),
        Command::Encode(a) => encode_cmd(&a),
        Command::Distance(a) => distance(&ctx, &a),
        Command::Rank(a) => rank(&ctx, &a),
        Command::Bench(BenchCommand::SplitValidate(a)) => split_validate(&ctx, &a),
        Command::Bench(BenchCommand::NoiseCurve(a)) => noise_curve(&ctx, &a),
        Command::Bench(BenchCommand::HitCost(a)) => hit_cost(&ctx, &a),
        Command::Keywords(KeywordsCommand::Generate(a)) => keywords_generate(&ctx, &a),
        Command::Keywords(KeywordsCommand::Evaluate(a)) => keywords_evaluate(&ctx, &a),
    }
}

fn solver_config(a: &SolverArgs) -> CliResult<SolverConfig> {
    let cfg = SolverConfig {
        max_iterations: a.max_iterations,
        objective_tolerance: a.tolerance,
        ..SolverConfig::default()
    };
    cfg.validate().map_err(|e| CliError::usage(format!("--tolerance/--max-iterations: {e}")))?;
    Ok(cfg)
}

/// Output paths must be distinct from each other and from every input.
fn check_outputs(inputs: &[&Path], outputs: &[&Path]) -> CliResult<()> {
    let mut seen = BTreeSet::new();
    for out in outputs {
        if !seen.insert(*out) || inputs.contains(out) {
            return Err(CliError::usage(format!(
                "output path {} collides with another input or output",
                out.display()
            )));
        }
    }
    Ok(())
}

fn parse_method_specs(specs: &[String]) -> CliResult<Vec<(String, PathBuf)>> {
    let mut names = BTreeSet::new();
    specs
        .iter()
        .map(|spec| {
            let (name, path) = spec
                .split_once('=')
                .filter(|(n, p)| !n.trim().is_empty() && !p.is_empty())
                .ok_or_else(|| CliError::usage(format!("--method expects NAME=PATH, got '{spec}'")))?;
            let name = name.trim().to_string();
            if !names.insert(name.clone()) {
                return Err(CliError::usage(format!("method name '{name}' given twice")));
            }
            Ok((name, PathBuf::from(path)))
        })
        .collect()
}

fn load_methods(specs: &[(String, PathBuf)]) -> CliResult<Vec<(String, AttributeMatrix)>> {
    specs
        .iter()
        .map(|(name, path)| Ok((name.clone(), io::read_attributes(path)?)))
        .collect()
}

fn same_rows(s: &MeaningfulSubspace, what: &str, d: &AttributeMatrix) -> CliResult<()> {
    if s.n() != d.n() {
        return Err(CliError::input(format!(
            "row-count mismatch: meaningful set has {} rows, {what} has {} rows",
            s.n(),
            d.n()
        )));
    }
    Ok(())
}

fn discover(a: &DiscoverArgs) -> CliResult<()> {
    if a.method == Method::Mmc && a.labels.is_none() {
        return Err(CliError::usage("--labels is required when --method mmc"));
    }
    if a.bits == 0 {
        return Err(CliError::usage("--bits must be at least 1"));
    }
    if let Some(keep) = a.pca_keep {
        if !(keep > 0.0 && keep <= 1.0) {
            return Err(CliError::usage(format!("--pca-keep must be in (0, 1], got {keep}")));
        }
    }
    let lift = a.lift.then_some(LiftConfig {
        order: a.lift_order,
        period: a.lift_period,
    });
    if let Some(cfg) = &lift {
        cfg.validate().map_err(|e| CliError::usage(e.to_string()))?;
    }
    let hp = MmcHyperparams {
        lambda: a.lambda,
        epochs: a.epochs,
        learning_rate: a.learning_rate,
    };
    if a.method == Method::Mmc {
        hp.validate().map_err(|e| CliError::usage(e.to_string()))?;
    }
    let mut inputs = vec![a.features.as_path()];
    inputs.extend(a.labels.as_deref());
    check_outputs(&inputs, &[&a.model_out, &a.codes_out])?;

    let f = io::read_features(&a.features)?;
    let labels = a.labels.as_deref().map(io::read_labels).transpose()?;
    if let Some(y) = &labels {
        if y.len() != f.n() {
            return Err(CliError::input(format!(
                "row-count mismatch: features have {} rows, labels have {}",
                f.n(),
                y.len()
            )));
        }
    }
    let (pre, g, clamped) = Preprocessor::fit(&f, lift, a.pca_keep)?;
    if clamped > 0 {
        eprintln!("warning: {clamped} negative feature values clamped to 0 before lifting");
    }
    let model = match a.method {
        Method::Lsh => DiscoveryModel::Lsh(train_lsh(g.dims(), a.bits, a.seed)?),
        Method::Sh => DiscoveryModel::Sh(train_sh(&g, a.bits)?),
        Method::Mmc => {
            let y = labels.as_ref().expect("checked above");
            DiscoveryModel::Mmc(train_mmc(&g, y, a.bits, hp, a.seed)?)
        }
    };
    let z = encode(&model, &g)?;
    let doc = ModelDocument::new(&model, &pre, f.dims(), a.seed);
    io::write_atomic(&a.model_out, &io::json_bytes(&doc)?)?;
    io::write_atomic(&a.codes_out, io::codes_csv(&z).as_bytes())
}

fn encode_cmd(a: &EncodeArgs) -> CliResult<()> {
    check_outputs(&[&a.model, &a.features], &[&a.codes_out])?;
    let (pre, model) = io::read_json::<ModelDocument>(&a.model)?.into_parts()?;
    let f = io::read_features(&a.features)?;
    let (g, clamped) = pre.apply(&f)?;
    if clamped > 0 {
        eprintln!("warning: {clamped} negative feature values clamped to 0 before lifting");
    }
    let z = encode(&model, &g)?;
    io::write_atomic(&a.codes_out, io::codes_csv(&z).as_bytes())
}

#[derive(Serialize)]
struct DistanceBody {
    mode: DistanceMode,
    instances: usize,
    meaningful_attributes: usize,
    discovered_attributes: usize,
    mean_distance: f64,
    normalized_distance: f64,
    per_attribute_residuals: Vec<f64>,
    converged: Vec<bool>,
    all_converged: bool,
    iterations: Vec<usize>,
    /// One row per discovered attribute, one weight per meaningful attribute.
    coefficients: Vec<Vec<f64>>,
}

fn distance(ctx: &Ctx, a: &DistanceArgs) -> CliResult<()> {
    let cfg = solver_config(&a.solver)?;
    check_outputs(&[&a.meaningful, &a.discovered], &[&a.out])?;
    let s = MeaningfulSubspace::new(io::read_attributes(&a.meaningful)?);
    let d = io::read_attributes(&a.discovered)?;
    same_rows(&s, "discovered set", &d)?;
    let res = match a.mode {
        Mode::Plain => distance_plain(&s, &d)?,
        Mode::Cvx => distance_cvx(&s, &d, &cfg)?,
    };
    if !res.all_converged() {
        eprintln!("warning: simplex solver hit the iteration limit on some attributes");
    }
    let body = DistanceBody {
        mode: res.mode,
        instances: s.n(),
        meaningful_attributes: s.j(),
        discovered_attributes: d.k(),
        mean_distance: res.mean_distance,
        normalized_distance: res.normalized_distance,
        all_converged: res.all_converged(),
        per_attribute_residuals: res.per_attribute_residuals,
        converged: res.converged,
        iterations: res.iterations,
        coefficients: res
            .reconstruction
            .column_iter()
            .map(|c| c.iter().copied().collect())
            .collect(),
    };
    io::write_atomic(&a.out, &ctx.report(None, body)?)
}

#[derive(Serialize)]
struct RankBody {
    ranking: Vec<RankedMethod>,
}

fn rank(ctx: &Ctx, a: &RankArgs) -> CliResult<()> {
    let cfg = solver_config(&a.solver)?;
    let specs = parse_method_specs(&a.methods)?;
    let mut inputs: Vec<&Path> = specs.iter().map(|(_, p)| p.as_path()).collect();
    inputs.push(&a.meaningful);
    check_outputs(&inputs, &[&a.out])?;
    let s = MeaningfulSubspace::new(io::read_attributes(&a.meaningful)?);
    let methods = load_methods(&specs)?;
    for (name, m) in &methods {
        same_rows(&s, &format!("method {name}"), m)?;
    }
    let ranking = rank_methods(&methods, &s, &cfg)?;
    io::write_atomic(&a.out, &ctx.report(None, RankBody { ranking })?)
}

fn split_validate(ctx: &Ctx, a: &SplitArgs) -> CliResult<()> {
    let cfg = solver_config(&a.solver)?;
    if !(a.left_fraction > 0.0 && a.left_fraction < 1.0) {
        return Err(CliError::usage(format!(
            "--left-fraction must be in (0, 1), got {}",
            a.left_fraction
        )));
    }
    let specs = parse_method_specs(&a.methods)?;
    let mut inputs: Vec<&Path> = specs.iter().map(|(_, p)| p.as_path()).collect();
    inputs.push(&a.meaningful);
    check_outputs(&inputs, &[&a.out])?;
    let s = MeaningfulSubspace::new(io::read_attributes(&a.meaningful)?);
    if s.j() < 2 {
        return Err(CliError::input(format!(
            "{}: cannot split a meaningful set with {} attribute(s); need at least 2",
            a.meaningful.display(),
            s.j()
        )));
    }
    let methods = load_methods(&specs)?;
    for (name, m) in &methods {
        same_rows(&s, &format!("method {name}"), m)?;
    }
    let proto = SplitProtocol {
        seed: a.seed,
        left_fraction: a.left_fraction,
    };
    let report: SplitReport = run_split_validation(&s, &methods, &proto, &cfg)?;
    io::write_atomic(&a.out, &ctx.report(Some(a.seed), report)?)
}

#[derive(Serialize)]
struct CurveBody {
    #[serde(flatten)]
    curve: NoiseCurve,
    step: usize,
    max_noise: usize,
}

pub fn curve_csv(curve: &NoiseCurve) -> String {
    let mut out = String::from("count,mean_distance\n");
    for (c, d) in curve.counts.iter().zip(&curve.distances) {
        out.push_str(&format!("{c},{d}\n"));
    }
    out
}

fn noise_curve(ctx: &Ctx, a: &NoiseArgs) -> CliResult<()> {
    let cfg = solver_config(&a.solver)?;
    if a.step == 0 {
        return Err(CliError::usage("--step must be at least 1"));
    }
    if a.max_noise < a.step {
        return Err(CliError::usage(format!(
            "--max-noise ({}) must be at least --step ({})",
            a.max_noise, a.step
        )));
    }
    if a.trials == 0 {
        return Err(CliError::usage("--trials must be at least 1"));
    }
    let mut outputs = vec![a.out.as_path()];
    outputs.extend(a.csv_out.as_deref());
    check_outputs(&[&a.meaningful, &a.discovered], &outputs)?;
    let s = MeaningfulSubspace::new(io::read_attributes(&a.meaningful)?);
    let d = io::read_attributes(&a.discovered)?;
    same_rows(&s, "discovered set", &d)?;
    let curve = run_noise_curve(&d, &s, a.max_noise, a.step, a.trials, a.seed, &cfg)?;
    let csv = curve_csv(&curve);
    let body = CurveBody {
        curve,
        step: a.step,
        max_noise: a.max_noise,
    };
    let json = ctx.report(Some(a.seed), body)?;
    io::write_atomic(&a.out, &json)?;
    if let Some(path) = &a.csv_out {
        io::write_atomic(path, csv.as_bytes())?;
    }
    Ok(())
}

fn hit_cost(ctx: &Ctx, a: &HitCostArgs) -> CliResult<()> {
    if a.attributes == 0 || a.instances == 0 {
        return Err(CliError::usage("--attributes and --instances must be at least 1"));
    }
    let cost: HitCost = hit_cost_analysis(a.attributes, a.instances)?;
    if cost.exceeds_traditional {
        eprintln!("warning: naming attributes needs more HITs than keywording every instance");
    }
    io::write_atomic(&a.out, &ctx.report(None, cost)?)
}

#[derive(Serialize)]
struct GenerateBody {
    bits: usize,
    nameable_bits: usize,
    merged_bits: usize,
    #[serde(flatten)]
    report: KeywordReport,
}

fn keywords_generate(ctx: &Ctx, a: &GenerateArgs) -> CliResult<()> {
    let mut inputs = vec![a.codes.as_path(), a.names.as_path()];
    inputs.extend(a.item_ids.as_deref());
    check_outputs(&inputs, &[&a.out])?;
    let z = io::read_attributes(&a.codes)?;
    let names = io::read_naming_table(&a.names, z.k())?;
    let ids = match &a.item_ids {
        Some(p) => io::read_item_ids(p)?,
        None => default_item_ids(z.n()),
    };
    if ids.len() != z.n() {
        return Err(CliError::input(format!(
            "row-count mismatch: codes have {} rows, item ids list {}",
            z.n(),
            ids.len()
        )));
    }
    let (merged, merged_names) = merge_duplicates(&z, &names)?;
    let report = generate_keywords(&merged, &merged_names, &ids)?;
    let body = GenerateBody {
        bits: z.k(),
        nameable_bits: nameable_count(&names),
        merged_bits: merged.k(),
        report,
    };
    io::write_atomic(&a.out, &ctx.report(None, body)?)
}

fn keywords_evaluate(ctx: &Ctx, a: &EvaluateArgs) -> CliResult<()> {
    let mut inputs = vec![a.keywords.as_path(), a.truth.as_path()];
    inputs.extend(a.actions.as_deref());
    check_outputs(&inputs, &[&a.out])?;
    let report: KeywordReport = io::read_json(&a.keywords)?;
    let truth = io::read_truth(&a.truth, a.actions.as_deref())?;
    let eval: HitRateReport = evaluate_hit_rate(&report, &truth)?;
    io::write_atomic(&a.out, &ctx.report(None, eval)?)
}
