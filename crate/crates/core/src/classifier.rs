//! Training, posterior classification, the nearest-neighbour baseline and the
//! evaluation harness.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::arg::ArgConfig;
use crate::bayesnet::{
    fit_parameters, ga_search, hill_climb, score, BayesianNetwork, Dag, DiscreteDataset, GaConfig,
    HillClimbConfig, ScoreKind,
};
use crate::discretize::{fit_map, DiscretizationMap};
use crate::error::{Error, Result};
use crate::signature::{check_label, Signature, N_FEATURES};

/// Index of the class variable: it follows the 21 features.
pub const CLASS_VAR: usize = N_FEATURES;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    #[default]
    HillClimb,
    Ga,
}

impl Engine {
    pub fn name(self) -> &'static str {
        match self {
            Engine::HillClimb => "hill_climb",
            Engine::Ga => "ga",
        }
    }
}

impl std::str::FromStr for Engine {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hill_climb" | "hill-climb" => Ok(Engine::HillClimb),
            "ga" => Ok(Engine::Ga),
            other => Err(Error::invalid(format!("unknown engine {other:?} (hill_climb | ga)"))),
        }
    }
}

/// Learning configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub engine: Engine,
    pub score: ScoreKind,
    /// Dirichlet pseudo-count added to every CPT cell.
    pub alpha: f64,
    pub max_parents: usize,
    /// Hill-climbing move budget.
    pub max_iters: usize,
    pub population_size: usize,
    pub generations: usize,
    pub mutation_rate: f64,
    pub tournament_size: usize,
    /// Initial histogram size; `None` uses the number of distinct values, capped at 20.
    pub m_init: Option<usize>,
    pub seed: u64,
    /// Extraction settings of the training signatures, reused for vector queries.
    pub arg: ArgConfig,
}

impl Default for TrainConfig {
    fn default() -> Self {
        let ga = GaConfig::default();
        TrainConfig {
            engine: Engine::HillClimb,
            score: ScoreKind::Bic,
            alpha: 1.0,
            max_parents: 4,
            max_iters: HillClimbConfig::default().max_iters,
            population_size: ga.population_size,
            generations: ga.generations,
            mutation_rate: ga.mutation_rate,
            tournament_size: ga.tournament_size,
            m_init: None,
            seed: 0,
            arg: ArgConfig::default(),
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::invalid("alpha must be positive"));
        }
        if self.max_parents == 0 {
            return Err(Error::invalid("max_parents must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.mutation_rate) {
            return Err(Error::invalid("mutation_rate must be in [0, 1]"));
        }
        if self.population_size == 0 || self.tournament_size == 0 {
            return Err(Error::invalid("population and tournament sizes must be positive"));
        }
        if self.m_init == Some(0) {
            return Err(Error::invalid("m_init must be at least 1"));
        }
        self.arg.validate()
    }

    /// Stable `key=value` rendering of every knob.
    pub fn canonical(&self) -> String {
        format!(
            "engine={};score={};alpha={:?};max_parents={};max_iters={};population_size={};generations={};\
             mutation_rate={:?};tournament_size={};m_init={};seed={};tolerance={:?};end_zone={:?};angle_eps={:?}",
            self.engine.name(),
            self.score.name(),
            self.alpha,
            self.max_parents,
            self.max_iters,
            self.population_size,
            self.generations,
            self.mutation_rate,
            self.tournament_size,
            self.m_init.map_or("auto".to_string(), |m| m.to_string()),
            self.seed,
            self.arg.tolerance,
            self.arg.end_zone,
            self.arg.angle_eps
        )
    }

    /// SHA-256 of [`TrainConfig::canonical`], hex encoded.
    pub fn digest(&self) -> String {
        Sha256::digest(self.canonical().as_bytes())
            .iter()
            .fold(String::with_capacity(64), |mut s, b| {
                let _ = write!(s, "{b:02x}");
                s
            })
    }

    pub fn hill_climb(&self) -> HillClimbConfig {
        HillClimbConfig {
            max_parents: self.max_parents,
            max_iters: self.max_iters,
            score: self.score,
        }
    }

    pub fn ga(&self) -> GaConfig {
        GaConfig {
            population_size: self.population_size,
            generations: self.generations,
            mutation_rate: self.mutation_rate,
            tournament_size: self.tournament_size,
            max_parents: self.max_parents,
            seed: self.seed,
            score: self.score,
        }
    }
}

/// Provenance stored with a model.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelMeta {
    pub config: TrainConfig,
    pub config_digest: String,
    /// Structure score of the learned DAG on the training data.
    pub structure_score: f64,
    /// Score of the edgeless DAG on the same data.
    pub empty_score: f64,
}

/// A trained recognizer.
#[derive(Clone, Debug, PartialEq)]
pub struct Model {
    pub map: DiscretizationMap,
    pub net: BayesianNetwork,
    /// Class labels; position is the class variable's value.
    pub classes: Vec<String>,
    pub meta: ModelMeta,
}

impl Model {
    pub fn class_index(&self, label: &str) -> Option<usize> {
        self.classes.iter().position(|c| c == label)
    }
}

fn labels_of(signatures: &[Signature]) -> Result<Vec<String>> {
    let mut classes: Vec<String> = Vec::new();
    for (i, s) in signatures.iter().enumerate() {
        let label = s
            .label
            .as_deref()
            .ok_or_else(|| Error::invalid(format!("training signature {i} has no label")))?;
        check_label(label)?;
        classes.push(label.to_string());
    }
    classes.sort();
    classes.dedup();
    Ok(classes)
}

/// Discretizes the training set and returns it with the map and class list.
pub fn discretize_training(
    signatures: &[Signature],
    m_init: Option<usize>,
) -> Result<(DiscretizationMap, Vec<String>, DiscreteDataset)> {
    if signatures.is_empty() {
        return Err(Error::invalid("empty training set"));
    }
    let classes = labels_of(signatures)?;
    if classes.len() < 2 {
        return Err(Error::invalid("training needs at least two classes"));
    }
    let map = fit_map(signatures, m_init)?;
    let rows: Vec<Vec<usize>> = signatures
        .iter()
        .map(|s| {
            let mut row = map.apply(s);
            let label = s.label.as_deref().expect("checked above");
            row.push(classes.binary_search_by(|c| c.as_str().cmp(label)).expect("known label"));
            row
        })
        .collect();
    let mut cards = map.cardinalities();
    cards.push(classes.len());
    let data = DiscreteDataset::new(&rows, cards)?;
    Ok((map, classes, data))
}

/// Discretize, learn a structure, fit smoothed parameters.
pub fn train(signatures: &[Signature], cfg: &TrainConfig) -> Result<Model> {
    cfg.validate()?;
    let (map, classes, data) = discretize_training(signatures, cfg.m_init)?;
    let outcome = match cfg.engine {
        Engine::HillClimb => hill_climb(&data, &cfg.hill_climb()),
        Engine::Ga => ga_search(&data, &cfg.ga()),
    };
    let net = fit_parameters(&outcome.dag, &data, cfg.alpha, CLASS_VAR)?;
    let empty_score = score(&Dag::empty(data.n_vars()), &data, cfg.score);
    Ok(Model {
        map,
        net,
        classes,
        meta: ModelMeta {
            config: cfg.clone(),
            config_digest: cfg.digest(),
            structure_score: outcome.score,
            empty_score,
        },
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Classification {
    pub label: String,
    pub class_index: usize,
    /// Posterior per class, in model class order.
    pub posterior: Vec<f64>,
}

impl Classification {
    /// `(label, probability)` pairs, most probable first; ties by class order.
    pub fn ranked<'m>(&self, model: &'m Model) -> Vec<(&'m str, f64)> {
        let mut ranked: Vec<(usize, f64)> = self.posterior.iter().copied().enumerate().collect();
        ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        ranked.into_iter().map(|(i, p)| (model.classes[i].as_str(), p)).collect()
    }
}

/// First index of the maximum.
fn argmax(xs: &[f64]) -> usize {
    xs.iter()
        .enumerate()
        .fold(0, |best, (i, &x)| if x > xs[best] { i } else { best })
}

/// Most probable class of `s` under the model; lowest class index on ties.
pub fn classify(model: &Model, s: &Signature) -> Classification {
    let mut evidence: Vec<Option<usize>> = model.map.apply(s).into_iter().map(Some).collect();
    evidence.push(None);
    let posterior = model
        .net
        .posterior(&evidence)
        .expect("evidence built from the model's own map is complete");
    let class_index = argmax(&posterior);
    Classification {
        label: model.classes[class_index].clone(),
        class_index,
        posterior,
    }
}

/// k-nearest-neighbour vote with Euclidean distance on raw signatures.
/// Vote ties go to the smaller distance sum, then the smaller label.
pub fn knn_classify(train: &[Signature], query: &Signature, k: usize) -> Result<String> {
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    if train.is_empty() {
        return Err(Error::invalid("k-NN needs training signatures"));
    }
    let mut dists: Vec<(f64, usize)> = train
        .iter()
        .enumerate()
        .map(|(i, s)| (s.distance_sq(query).sqrt(), i))
        .collect();
    dists.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut votes: BTreeMap<&str, (usize, f64)> = BTreeMap::new();
    for &(d, i) in dists.iter().take(k) {
        let label = train[i]
            .label
            .as_deref()
            .ok_or_else(|| Error::invalid(format!("training signature {i} has no label")))?;
        let e = votes.entry(label).or_insert((0, 0.0));
        e.0 += 1;
        e.1 += d;
    }
    // BTreeMap iterates labels in order, so the first strict winner has the lowest label
    let mut best: Option<(&str, usize, f64)> = None;
    for (label, (count, sum)) in votes {
        let better = match best {
            None => true,
            Some((_, c, s)) => count > c || (count == c && sum < s),
        };
        if better {
            best = Some((label, count, sum));
        }
    }
    Ok(best.expect("k >= 1").0.to_string())
}

/// Recognition result for one test condition.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionResult {
    pub condition: String,
    pub n_classes: usize,
    pub correct: usize,
    pub total: usize,
    pub rate: f64,
    /// `confusion[true][predicted]`, in model class order.
    pub confusion: Vec<Vec<usize>>,
    pub mean_query_micros: f64,
    /// Correct answers of the k-NN baseline, when requested.
    pub baseline_correct: Option<usize>,
}

impl ConditionResult {
    pub fn baseline_rate(&self) -> Option<f64> {
        self.baseline_correct.map(|c| ratio(c, self.total))
    }
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct EvaluationReport {
    pub rows: Vec<ConditionResult>,
}

/// k-NN baseline evaluated alongside the network.
#[derive(Clone, Copy, Debug)]
pub struct Baseline<'a> {
    pub train: &'a [Signature],
    pub k: usize,
}

/// Classifies every labelled query of every condition.
pub fn evaluate(
    model: &Model,
    tests: &[(String, Vec<Signature>)],
    baseline: Option<Baseline<'_>>,
) -> Result<EvaluationReport> {
    let n = model.classes.len();
    let mut rows = Vec::with_capacity(tests.len());
    for (condition, queries) in tests {
        let truth = queries
            .iter()
            .map(|q| {
                let label = q.label.as_deref().ok_or_else(|| Error::invalid("test signature without label"))?;
                model
                    .class_index(label)
                    .ok_or_else(|| Error::invalid(format!("test label {label:?} is not a class of the model")))
            })
            .collect::<Result<Vec<_>>>()?;
        let outcomes = queries
            .par_iter()
            .map(|q| {
                let start = Instant::now();
                let c = classify(model, q);
                let micros = start.elapsed().as_secs_f64() * 1e6;
                let knn = baseline.map(|b| knn_classify(b.train, q, b.k)).transpose()?;
                Ok((c.class_index, micros, knn))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut confusion = vec![vec![0usize; n]; n];
        let mut correct = 0;
        let mut baseline_correct = baseline.map(|_| 0usize);
        let mut micros = 0.0;
        for (&t, (pred, us, knn)) in truth.iter().zip(&outcomes) {
            confusion[t][*pred] += 1;
            correct += usize::from(t == *pred);
            micros += us;
            if let (Some(bc), Some(label)) = (baseline_correct.as_mut(), knn) {
                *bc += usize::from(*label == model.classes[t]);
            }
        }
        rows.push(ConditionResult {
            condition: condition.clone(),
            n_classes: n,
            correct,
            total: queries.len(),
            rate: ratio(correct, queries.len()),
            confusion,
            mean_query_micros: micros / queries.len().max(1) as f64,
            baseline_correct,
        });
    }
    Ok(EvaluationReport { rows })
}

impl EvaluationReport {
    pub fn merge(reports: impl IntoIterator<Item = EvaluationReport>) -> Self {
        EvaluationReport {
            rows: reports.into_iter().flat_map(|r| r.rows).collect(),
        }
    }

    /// `condition,n_classes,correct,total,rate` plus `knn_correct,knn_rate`
    /// when any row carries baseline results.
    pub fn to_csv(&self) -> String {
        let with_knn = self.rows.iter().any(|r| r.baseline_correct.is_some());
        let mut out = String::from("condition,n_classes,correct,total,rate");
        if with_knn {
            out.push_str(",knn_correct,knn_rate");
        }
        out.push('\n');
        for r in &self.rows {
            let _ = write!(out, "{},{},{},{},{:.4}", r.condition, r.n_classes, r.correct, r.total, r.rate);
            if with_knn {
                match r.baseline_correct {
                    Some(c) => {
                        let _ = write!(out, ",{},{:.4}", c, ratio(c, r.total));
                    }
                    None => out.push_str(",,"),
                }
            }
            out.push('\n');
        }
        out
    }

    /// Conditions down, class counts across, percentages in the cells.
    /// Baseline rates get their own `(1-NN)` rows.
    pub fn render_table(&self) -> String {
        let mut counts: Vec<usize> = self.rows.iter().map(|r| r.n_classes).collect();
        counts.sort_unstable();
        counts.dedup();
        let mut conditions: Vec<&str> = Vec::new();
        for r in &self.rows {
            if !conditions.contains(&r.condition.as_str()) {
                conditions.push(&r.condition);
            }
        }
        let cell = |cond: &str, n: usize, knn: bool| {
            self.rows
                .iter()
                .find(|r| r.condition == cond && r.n_classes == n)
                .and_then(|r| if knn { r.baseline_rate() } else { Some(r.rate) })
                .map_or("-".to_string(), |rate| format!("{:.0}%", 100.0 * rate))
        };
        let mut out = format!("{:<18}", "Number of classes");
        for n in &counts {
            let _ = write!(out, "{n:>8}");
        }
        out.push('\n');
        let with_knn = self.rows.iter().any(|r| r.baseline_correct.is_some());
        for cond in &conditions {
            for knn in [false, true] {
                if knn && !with_knn {
                    continue;
                }
                let name = if knn { format!("{cond} (1-NN)") } else { cond.to_string() };
                let _ = write!(out, "{name:<18}");
                for &n in &counts {
                    let _ = write!(out, "{:>8}", cell(cond, n, knn));
                }
                out.push('\n');
            }
        }
        let timed: Vec<&ConditionResult> = self.rows.iter().filter(|r| r.total > 0).collect();
        if !timed.is_empty() {
            let mean = timed.iter().map(|r| r.mean_query_micros).sum::<f64>() / timed.len() as f64;
            let _ = writeln!(out, "mean classification time: {mean:.1} us/query");
        }
        out
    }
}
