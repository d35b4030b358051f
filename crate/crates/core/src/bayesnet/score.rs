use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::dag::Dag;
use crate::error::{Error, Result};

/// Fully observed discrete data, stored column-wise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscreteDataset {
    cards: Vec<usize>,
    columns: Vec<Vec<u32>>,
    n_rows: usize,
}

impl DiscreteDataset {
    pub fn new(rows: &[Vec<usize>], cards: Vec<usize>) -> Result<Self> {
        if cards.iter().any(|&c| c == 0) {
            return Err(Error::invalid("every variable needs cardinality >= 1"));
        }
        let mut columns = vec![Vec::with_capacity(rows.len()); cards.len()];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cards.len() {
                return Err(Error::invalid(format!("row {i} has {} values, expected {}", row.len(), cards.len())));
            }
            for (v, (&x, &c)) in row.iter().zip(&cards).enumerate() {
                if x >= c {
                    return Err(Error::invalid(format!("row {i}: value {x} of variable {v} exceeds cardinality {c}")));
                }
                columns[v].push(x as u32);
            }
        }
        Ok(DiscreteDataset {
            cards,
            columns,
            n_rows: rows.len(),
        })
    }

    pub fn n_vars(&self) -> usize {
        self.cards.len()
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn cards(&self) -> &[usize] {
        &self.cards
    }

    pub fn column(&self, v: usize) -> &[u32] {
        &self.columns[v]
    }

    pub fn row(&self, i: usize) -> Vec<usize> {
        self.columns.iter().map(|c| c[i] as usize).collect()
    }

    /// Sorted `(parent configuration, value)` keys, one per row. Parent
    /// configurations are mixed-radix indices in the order of `parents`.
    pub(crate) fn family_keys(&self, v: usize, parents: &[usize]) -> Vec<(u64, u32)> {
        let mut keys: Vec<(u64, u32)> = (0..self.n_rows)
            .map(|i| {
                let cfg = parents
                    .iter()
                    .fold(0u64, |acc, &p| acc * self.cards[p] as u64 + self.columns[p][i] as u64);
                (cfg, self.columns[v][i])
            })
            .collect();
        keys.sort_unstable();
        keys
    }
}

/// Penalized-likelihood structure score.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScoreKind {
    /// Penalty `(ln N) / 2` per free parameter.
    #[default]
    Bic,
    /// Penalty 1 per free parameter.
    Aic,
}

impl ScoreKind {
    pub fn name(self) -> &'static str {
        match self {
            ScoreKind::Bic => "bic",
            ScoreKind::Aic => "aic",
        }
    }

    fn penalty_per_param(self, n_rows: usize) -> f64 {
        match self {
            ScoreKind::Bic => (n_rows as f64).ln() / 2.0,
            ScoreKind::Aic => 1.0,
        }
    }
}

impl std::str::FromStr for ScoreKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bic" => Ok(ScoreKind::Bic),
            "aic" => Ok(ScoreKind::Aic),
            other => Err(Error::invalid(format!("unknown score {other:?} (bic | aic)"))),
        }
    }
}

/// Maximized log-likelihood of `v` given `parents`, summed in key order so the
/// result does not depend on hashing.
fn family_log_likelihood(data: &DiscreteDataset, v: usize, parents: &[usize]) -> f64 {
    let keys = data.family_keys(v, parents);
    let mut ll = 0.0;
    let mut i = 0;
    while i < keys.len() {
        let cfg = keys[i].0;
        let mut j = i;
        while j < keys.len() && keys[j].0 == cfg {
            j += 1;
        }
        let n_cfg = (j - i) as f64;
        let mut k = i;
        while k < j {
            let mut l = k;
            while l < j && keys[l].1 == keys[k].1 {
                l += 1;
            }
            let n = (l - k) as f64;
            ll += n * (n / n_cfg).ln();
            k = l;
        }
        i = j;
    }
    ll
}

/// Number of free CPT parameters of a family.
pub fn free_parameters(cards: &[usize], v: usize, parents: &[usize]) -> f64 {
    let q: f64 = parents.iter().map(|&p| cards[p] as f64).product();
    q * (cards[v] as f64 - 1.0)
}

/// Family-score evaluator with a cache keyed by `(variable, parent set)`.
///
/// Scores are decomposable, so a DAG score is the sum of its cached family
/// scores and editing one family never touches the others.
pub struct FamilyScorer<'a> {
    data: &'a DiscreteDataset,
    kind: ScoreKind,
    cache: HashMap<(usize, Vec<usize>), f64>,
}

impl<'a> FamilyScorer<'a> {
    pub fn new(data: &'a DiscreteDataset, kind: ScoreKind) -> Self {
        FamilyScorer {
            data,
            kind,
            cache: HashMap::new(),
        }
    }

    pub fn data(&self) -> &'a DiscreteDataset {
        self.data
    }

    pub fn kind(&self) -> ScoreKind {
        self.kind
    }

    /// `parents` need not be sorted.
    pub fn family(&mut self, v: usize, parents: &[usize]) -> f64 {
        let mut key = parents.to_vec();
        key.sort_unstable();
        if let Some(&s) = self.cache.get(&(v, key.clone())) {
            return s;
        }
        let s = family_log_likelihood(self.data, v, &key)
            - self.kind.penalty_per_param(self.data.n_rows()) * free_parameters(self.data.cards(), v, &key);
        self.cache.insert((v, key), s);
        s
    }

    pub fn cached(&self, v: usize, parents: &[usize]) -> Option<f64> {
        let mut key = parents.to_vec();
        key.sort_unstable();
        self.cache.get(&(v, key)).copied()
    }

    pub fn cache_len(&self) -> usize {
        self.cache.len()
    }

    pub fn score(&mut self, dag: &Dag) -> f64 {
        (0..dag.n_vars()).map(|v| self.family(v, dag.parents(v))).sum()
    }
}

/// Decomposable score of `dag` on `data`.
pub fn score(dag: &Dag, data: &DiscreteDataset, kind: ScoreKind) -> f64 {
    FamilyScorer::new(data, kind).score(dag)
}
