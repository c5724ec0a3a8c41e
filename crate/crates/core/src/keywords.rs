//! Keywords from named attribute bits, and their evaluation against human judgments.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::attribute::AttributeMatrix;
use crate::error::{invalid, shape, Error, Result};

/// Case-folded, trimmed form used to compare names.
pub fn normalize_name(name: &str) -> String {
    name.trim().to_lowercase()
}

/// Human-assigned names for the `+1` side of each bit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamingTable {
    names: Vec<Option<String>>,
}

impl NamingTable {
    /// Table over `bits` bits; entries with an empty name leave the bit unnamed.
    pub fn new(bits: usize, entries: impl IntoIterator<Item = (usize, String)>) -> Result<Self> {
        let mut names = vec![None; bits];
        let mut seen = BTreeSet::new();
        for (bit, name) in entries {
            if bit >= bits {
                return Err(invalid(format!("bit {bit} out of range for {bits} bits")));
            }
            if !seen.insert(bit) {
                return Err(invalid(format!("bit {bit} is named more than once")));
            }
            let trimmed = name.trim();
            if !trimmed.is_empty() {
                names[bit] = Some(trimmed.to_string());
            }
        }
        Ok(Self { names })
    }

    pub fn bits(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, bit: usize) -> Option<&str> {
        self.names.get(bit).and_then(|n| n.as_deref())
    }

    pub fn names(&self) -> &[Option<String>] {
        &self.names
    }
}

pub fn nameable_count(names: &NamingTable) -> usize {
    names.names.iter().filter(|n| n.is_some()).count()
}

fn check_table(z: &AttributeMatrix, names: &NamingTable) -> Result<()> {
    if names.bits() != z.k() {
        return Err(shape(format!(
            "naming table covers {} bits, codes have {}",
            names.bits(),
            z.k()
        )));
    }
    Ok(())
}

/// Collapses bits whose names match after normalization. A merged bit is `+1`
/// wherever any of its sources is `+1`; it sits at the position of its first
/// source and keeps that source's spelling.
pub fn merge_duplicates(z: &AttributeMatrix, names: &NamingTable) -> Result<(AttributeMatrix, NamingTable)> {
    check_table(z, names)?;
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut by_name: HashMap<String, usize> = HashMap::new();
    for bit in 0..z.k() {
        match names.name(bit) {
            Some(name) => match by_name.get(&normalize_name(name)) {
                Some(&g) => groups[g].push(bit),
                None => {
                    by_name.insert(normalize_name(name), groups.len());
                    groups.push(vec![bit]);
                }
            },
            None => groups.push(vec![bit]),
        }
    }
    if groups.len() == z.k() {
        return Ok((z.clone(), names.clone()));
    }

    let n = z.n();
    let mut data = Vec::with_capacity(n * groups.len());
    let mut merged_names = Vec::with_capacity(groups.len());
    for group in &groups {
        for i in 0..n {
            let any = group.iter().any(|&b| z.get(i, b) == 1);
            data.push(if any { 1 } else { -1 });
        }
        merged_names.push(names.names[group[0]].clone());
    }
    let merged = AttributeMatrix::from_column_major(n, groups.len(), data)?;
    Ok((merged, NamingTable { names: merged_names }))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ItemKeywords {
    pub item_id: String,
    pub keywords: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeywordReport {
    pub items: Vec<ItemKeywords>,
    /// Distinct keyword names in bit order.
    pub vocabulary: Vec<String>,
}

/// Default item identifiers: zero-based row indices.
pub fn default_item_ids(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

/// Names of the named `+1` bits of every row. Unnamed bits never emit.
pub fn generate_keywords(z: &AttributeMatrix, names: &NamingTable, item_ids: &[String]) -> Result<KeywordReport> {
    check_table(z, names)?;
    if item_ids.len() != z.n() {
        return Err(shape(format!("{} item ids for {} rows", item_ids.len(), z.n())));
    }
    let mut vocabulary = Vec::new();
    let mut seen = BTreeSet::new();
    for name in names.names.iter().flatten() {
        if seen.insert(normalize_name(name)) {
            vocabulary.push(name.clone());
        }
    }
    let items = item_ids
        .iter()
        .enumerate()
        .map(|(i, id)| {
            let mut emitted = BTreeSet::new();
            let keywords = (0..z.k())
                .filter(|&b| z.get(i, b) == 1)
                .filter_map(|b| names.name(b))
                .filter(|name| emitted.insert(normalize_name(name)))
                .map(str::to_string)
                .collect();
            ItemKeywords {
                item_id: id.clone(),
                keywords,
            }
        })
        .collect();
    Ok(KeywordReport { items, vocabulary })
}

/// Suitability judgments keyed by `(item_id, normalized keyword)`, plus an
/// optional action label per item.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TruthTable {
    judgments: BTreeMap<(String, String), bool>,
    actions: BTreeMap<String, String>,
}

impl TruthTable {
    pub fn new(
        judgments: impl IntoIterator<Item = (String, String, bool)>,
        actions: impl IntoIterator<Item = (String, String)>,
    ) -> Result<Self> {
        let mut table = BTreeMap::new();
        for (item, kw, ok) in judgments {
            let key = (item, normalize_name(&kw));
            if table.insert(key.clone(), ok).is_some() {
                return Err(invalid(format!("duplicate judgment for ({}, {})", key.0, key.1)));
            }
        }
        let mut action_map = BTreeMap::new();
        for (item, action) in actions {
            if action_map.insert(item.clone(), action).is_some() {
                return Err(invalid(format!("duplicate action for item {item}")));
            }
        }
        Ok(Self {
            judgments: table,
            actions: action_map,
        })
    }

    pub fn len(&self) -> usize {
        self.judgments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.judgments.is_empty()
    }

    pub fn judgment(&self, item: &str, keyword: &str) -> Option<bool> {
        self.judgments
            .get(&(item.to_string(), normalize_name(keyword)))
            .copied()
    }

    pub fn action(&self, item: &str) -> Option<&str> {
        self.actions.get(item).map(String::as_str)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HitRateReport {
    /// Suitable emitted keywords over all emitted keywords; `None` if nothing was emitted.
    pub overall: Option<f64>,
    pub emitted: usize,
    pub suitable: usize,
    pub per_keyword: BTreeMap<String, Option<f64>>,
    pub per_keyword_emitted: BTreeMap<String, usize>,
    pub per_action: BTreeMap<String, Option<f64>>,
}

#[derive(Default, Clone, Copy)]
struct Tally {
    emitted: usize,
    suitable: usize,
}

impl Tally {
    fn add(&mut self, ok: bool) {
        self.emitted += 1;
        self.suitable += usize::from(ok);
    }

    fn rate(self) -> Option<f64> {
        (self.emitted > 0).then(|| self.suitable as f64 / self.emitted as f64)
    }
}

/// Correct hit rate, counting every emitted `(item, keyword)` pair once.
pub fn evaluate_hit_rate(report: &KeywordReport, truth: &TruthTable) -> Result<HitRateReport> {
    let mut missing = Vec::new();
    let mut overall = Tally::default();
    let mut per_keyword: BTreeMap<String, Tally> = report
        .vocabulary
        .iter()
        .map(|k| (k.clone(), Tally::default()))
        .collect();
    let mut per_action: BTreeMap<String, Tally> = truth
        .actions
        .values()
        .map(|a| (a.clone(), Tally::default()))
        .collect();
    let spelling: HashMap<String, &str> = report
        .vocabulary
        .iter()
        .map(|k| (normalize_name(k), k.as_str()))
        .collect();

    for item in &report.items {
        for kw in &item.keywords {
            let Some(ok) = truth.judgment(&item.item_id, kw) else {
                missing.push((item.item_id.clone(), kw.clone()));
                continue;
            };
            overall.add(ok);
            let key = spelling.get(&normalize_name(kw)).map_or_else(|| kw.clone(), |s| s.to_string());
            per_keyword.entry(key).or_default().add(ok);
            if let Some(action) = truth.action(&item.item_id) {
                per_action.entry(action.to_string()).or_default().add(ok);
            }
        }
    }
    if !missing.is_empty() {
        return Err(Error::MissingJudgments(missing));
    }

    Ok(HitRateReport {
        overall: overall.rate(),
        emitted: overall.emitted,
        suitable: overall.suitable,
        per_keyword_emitted: per_keyword.iter().map(|(k, t)| (k.clone(), t.emitted)).collect(),
        per_keyword: per_keyword.into_iter().map(|(k, t)| (k, t.rate())).collect(),
        per_action: per_action.into_iter().map(|(k, t)| (k, t.rate())).collect(),
    })
}
