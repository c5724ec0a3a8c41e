#![allow(dead_code)]

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use attrmeaning::synthetic::planted_meaningful_set;
use attrmeaning::{random_attribute_set, AttributeMatrix};

pub fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_attrmeaning"))
}

pub fn run_in(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().expect("spawn attrmeaning")
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

pub fn codes_text(z: &AttributeMatrix) -> String {
    (0..z.n())
        .map(|i| {
            z.row(i)
                .iter()
                .map(|b| b.to_string())
                .collect::<Vec<_>>()
                .join(",")
                + "\n"
        })
        .collect()
}

/// Toy corpus: 5 items, 5 bits of which 4 are named, two names collide after
/// normalisation ("lawn" on bits 0 and 3), bit 2 is unnamed.
pub const TOY_CODES: &str = "\
1,1,1,-1,-1
-1,-1,1,1,1
-1,-1,-1,-1,-1
1,-1,-1,1,1
-1,1,1,-1,1
";
pub const TOY_NAMES: &str = "bit,positive_name\n0,lawn\n1,Walking\n2,\n3, Lawn\n4,wood\n";
pub const TOY_ITEMS: &str = "v0\nv1\nv2\nv3\nv4\n";
/// Full judgments for every item and vocabulary keyword. Emitted pairs:
/// v0 {lawn 1, walking 0}, v1 {lawn 1, wood 1}, v3 {lawn 0, wood 1},
/// v4 {walking 1, wood 0}; 5 of 8 suitable.
pub const TOY_TRUTH: &str = "\
item_id,keyword,suitable
v0,lawn,1
v0,walking,0
v0,wood,1
v1,lawn,1
v1,walking,0
v1,wood,1
v2,lawn,0
v2,walking,1
v2,wood,0
v3,lawn,0
v3,walking,0
v3,wood,1
v4,lawn,1
v4,walking,1
v4,wood,0
";
pub const TOY_ACTIONS: &str = "item_id,action\nv0,mow\nv1,mow\nv2,dig\nv3,dig\nv4,mow\n";
pub const TOY_HIT_RATE: f64 = 5.0 / 8.0;

/// Writes a small, complete input set into `dir`.
pub fn write_fixtures(dir: &Path) {
    let n = 40;
    let mut features = String::new();
    let mut labels = String::new();
    for i in 0..n {
        let class = i % 2;
        let row: Vec<String> = (0..4)
            .map(|j| {
                let base = if class == 0 { 0.2 } else { 0.7 };
                let wiggle = ((i * 7 + j * 13) % 11) as f64 / 50.0;
                format!("{}", base + wiggle)
            })
            .collect();
        features.push_str(&row.join(","));
        features.push('\n');
        labels.push_str(&format!("{class}\n"));
    }
    fs::write(dir.join("features.csv"), features).unwrap();
    fs::write(dir.join("labels.csv"), labels).unwrap();

    let s = planted_meaningful_set(n, 6, 0.05, 11).unwrap();
    fs::write(dir.join("meaningful.csv"), codes_text(&s)).unwrap();
    let d = s.select_columns(&[0, 2, 4]).unwrap();
    fs::write(dir.join("discovered.csv"), codes_text(&d)).unwrap();
    let r = random_attribute_set(n, 3, 99).unwrap();
    fs::write(dir.join("random.csv"), codes_text(&r)).unwrap();

    fs::write(dir.join("toy_codes.csv"), TOY_CODES).unwrap();
    fs::write(dir.join("toy_names.csv"), TOY_NAMES).unwrap();
    fs::write(dir.join("toy_items.txt"), TOY_ITEMS).unwrap();
    fs::write(dir.join("toy_truth.csv"), TOY_TRUTH).unwrap();
    fs::write(dir.join("toy_actions.csv"), TOY_ACTIONS).unwrap();
}

/// Every subcommand with fixed flags; relative paths inside the fixture dir.
pub fn golden_commands() -> Vec<(Vec<&'static str>, Vec<&'static str>)> {
    vec![
        (
            vec!["discover", "--method", "lsh", "--bits", "5", "--features", "features.csv", "--model-out", "lsh.json", "--codes-out", "lsh.csv", "--seed", "3"],
            vec!["lsh.json", "lsh.csv"],
        ),
        (
            vec!["discover", "--method", "sh", "--bits", "4", "--features", "features.csv", "--lift", "--pca-keep", "0.6", "--model-out", "sh.json", "--codes-out", "sh.csv", "--seed", "3"],
            vec!["sh.json", "sh.csv"],
        ),
        (
            vec!["discover", "--method", "mmc", "--bits", "3", "--features", "features.csv", "--labels", "labels.csv", "--model-out", "mmc.json", "--codes-out", "mmc.csv", "--seed", "5"],
            vec!["mmc.json", "mmc.csv"],
        ),
        (
            vec!["encode", "--model", "sh.json", "--features", "features.csv", "--codes-out", "sh_again.csv"],
            vec!["sh_again.csv"],
        ),
        (
            vec!["distance", "--meaningful", "meaningful.csv", "--discovered", "mmc.csv", "--mode", "cvx", "--out", "dist_cvx.json"],
            vec!["dist_cvx.json"],
        ),
        (
            vec!["distance", "--meaningful", "meaningful.csv", "--discovered", "mmc.csv", "--mode", "plain", "--out", "dist_plain.json"],
            vec!["dist_plain.json"],
        ),
        (
            vec!["rank", "--meaningful", "meaningful.csv", "--method", "lsh=lsh.csv", "--method", "mmc=mmc.csv", "--method", "sub=discovered.csv", "--out", "rank.json"],
            vec!["rank.json"],
        ),
        (
            vec!["bench", "split-validate", "--meaningful", "meaningful.csv", "--method", "lsh=lsh.csv", "--seed", "7", "--out", "split.json"],
            vec!["split.json"],
        ),
        (
            vec!["bench", "noise-curve", "--meaningful", "meaningful.csv", "--discovered", "discovered.csv", "--max-noise", "8", "--step", "2", "--trials", "5", "--seed", "9", "--out", "curve.json", "--csv-out", "curve.csv"],
            vec!["curve.json", "curve.csv"],
        ),
        (
            vec!["bench", "hit-cost", "--attributes", "16", "--instances", "6340", "--out", "cost.json"],
            vec!["cost.json"],
        ),
        (
            vec!["keywords", "generate", "--codes", "toy_codes.csv", "--names", "toy_names.csv", "--item-ids", "toy_items.txt", "--out", "kw.json"],
            vec!["kw.json"],
        ),
        (
            vec!["keywords", "evaluate", "--keywords", "kw.json", "--truth", "toy_truth.csv", "--actions", "toy_actions.csv", "--out", "eval.json"],
            vec!["eval.json"],
        ),
    ]
}
