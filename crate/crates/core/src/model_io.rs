//! Plain-text model files.
//!
//! A model file is line oriented and self-contained:
//!
//! ```text
//! symrec-model 1
//! config_digest <sha256 hex>
//! engine hill_climb
//! score bic
//! alpha 1.0
//! ...                          one line per training knob
//! structure_score <float>
//! empty_score <float>
//! classes <n> <label> ...
//! bins <feature> <upper> ...   21 lines
//! var <v> card <c> parents <p> ...
//! row <p0> <p1> ...            one line per parent configuration
//! ...
//! end
//! ```
//!
//! Variables are listed in topological order. Floats are written with 17
//! significant digits so a write/read cycle reproduces the model exactly.

use std::fmt::Write as _;

use crate::arg::ArgConfig;
use crate::bayesnet::{BayesianNetwork, Cpt, Dag, ScoreKind};
use crate::classifier::{Engine, Model, ModelMeta, TrainConfig, CLASS_VAR};
use crate::discretize::DiscretizationMap;
use crate::error::{Error, Result};
use crate::signature::{check_label, N_FEATURES};

pub const FORMAT_TAG: &str = "symrec-model";
pub const FORMAT_VERSION: u32 = 1;

fn float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_model(model: &Model) -> String {
    let cfg = &model.meta.config;
    let mut out = String::new();
    let mut line = |s: String| {
        out.push_str(&s);
        out.push('\n');
    };
    line(format!("{FORMAT_TAG} {FORMAT_VERSION}"));
    line(format!("config_digest {}", model.meta.config_digest));
    line(format!("engine {}", cfg.engine.name()));
    line(format!("score {}", cfg.score.name()));
    line(format!("alpha {}", float(cfg.alpha)));
    line(format!("max_parents {}", cfg.max_parents));
    line(format!("max_iters {}", cfg.max_iters));
    line(format!("population_size {}", cfg.population_size));
    line(format!("generations {}", cfg.generations));
    line(format!("mutation_rate {}", float(cfg.mutation_rate)));
    line(format!("tournament_size {}", cfg.tournament_size));
    line(format!("m_init {}", cfg.m_init.map_or("auto".to_string(), |m| m.to_string())));
    line(format!("seed {}", cfg.seed));
    line(format!("tolerance {}", float(cfg.arg.tolerance)));
    line(format!("end_zone {}", float(cfg.arg.end_zone)));
    line(format!("angle_eps {}", float(cfg.arg.angle_eps)));
    line(format!("structure_score {}", float(model.meta.structure_score)));
    line(format!("empty_score {}", float(model.meta.empty_score)));
    line(format!("classes {} {}", model.classes.len(), model.classes.join(" ")));
    for (k, uppers) in model.map.uppers.iter().enumerate() {
        let edges: Vec<String> = uppers.iter().map(i64::to_string).collect();
        line(format!("bins {} {}", k + 1, edges.join(" ")));
    }
    let order = model.net.dag().topological_order().expect("networks are acyclic");
    for v in order {
        let cpt = &model.net.cpts()[v];
        let mut head = format!("var {v} card {} parents", cpt.card);
        for p in &cpt.parents {
            let _ = write!(head, " {p}");
        }
        line(head);
        for r in 0..cpt.n_rows() {
            let probs: Vec<String> = cpt.row(r).iter().map(|&p| float(p)).collect();
            line(format!("row {}", probs.join(" ")));
        }
    }
    line("end".to_string());
    out
}

struct Lines<'a> {
    inner: std::iter::Peekable<std::iter::Enumerate<std::str::Lines<'a>>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Lines {
            inner: text.lines().enumerate().peekable(),
            last: 0,
        }
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::parse(self.last, msg)
    }

    /// Next line split into whitespace tokens, the first of which must be `key`.
    fn expect(&mut self, key: &str) -> Result<Vec<&'a str>> {
        let (i, text) = self
            .inner
            .next()
            .ok_or_else(|| Error::parse(self.last + 1, format!("unexpected end of file, expected `{key}`")))?;
        self.last = i + 1;
        let mut toks = text.split_whitespace();
        match toks.next() {
            Some(k) if k == key => Ok(toks.collect()),
            other => Err(self.err(format!("expected `{key}`, found {:?}", other.unwrap_or("")))),
        }
    }

    fn peek_key(&mut self) -> Option<&'a str> {
        self.inner.peek().and_then(|(_, t)| t.split_whitespace().next())
    }

    fn single(&mut self, key: &str) -> Result<&'a str> {
        match self.expect(key)?.as_slice() {
            [v] => Ok(v),
            _ => Err(self.err(format!("`{key}` takes exactly one value"))),
        }
    }

    fn parse<T: std::str::FromStr>(&mut self, key: &str) -> Result<T> {
        let v = self.single(key)?;
        v.parse().map_err(|_| self.err(format!("bad value {v:?} for `{key}`")))
    }

    fn number<T: std::str::FromStr>(&self, tok: &str, what: &str) -> Result<T> {
        tok.parse().map_err(|_| self.err(format!("bad {what} {tok:?}")))
    }
}

/// Parses a model file, re-validating the network and the config digest.
pub fn read_model(text: &str) -> Result<Model> {
    let mut l = Lines::new(text);
    let header = l.expect(FORMAT_TAG)?;
    if header != [FORMAT_VERSION.to_string().as_str()] {
        return Err(l.err(format!("unsupported model version {:?}", header.join(" "))));
    }
    let digest = l.single("config_digest")?.to_string();
    let engine: Engine = l.single("engine")?.parse().map_err(|e: Error| l.err(e.to_string()))?;
    let score: ScoreKind = l.single("score")?.parse().map_err(|e: Error| l.err(e.to_string()))?;
    let alpha = l.parse("alpha")?;
    let max_parents = l.parse("max_parents")?;
    let max_iters = l.parse("max_iters")?;
    let population_size = l.parse("population_size")?;
    let generations = l.parse("generations")?;
    let mutation_rate = l.parse("mutation_rate")?;
    let tournament_size = l.parse("tournament_size")?;
    let m_init = match l.single("m_init")? {
        "auto" => None,
        v => Some(l.number(v, "m_init")?),
    };
    let seed = l.parse("seed")?;
    let arg = ArgConfig {
        tolerance: l.parse("tolerance")?,
        end_zone: l.parse("end_zone")?,
        angle_eps: l.parse("angle_eps")?,
    };
    let config = TrainConfig {
        engine,
        score,
        alpha,
        max_parents,
        max_iters,
        population_size,
        generations,
        mutation_rate,
        tournament_size,
        m_init,
        seed,
        arg,
    };
    config.validate().map_err(|e| l.err(e.to_string()))?;
    if config.digest() != digest {
        return Err(l.err("config digest does not match the recorded configuration"));
    }
    let structure_score = l.parse("structure_score")?;
    let empty_score = l.parse("empty_score")?;

    let toks = l.expect("classes")?;
    let n_classes: usize = l.number(toks.first().copied().unwrap_or(""), "class count")?;
    let classes: Vec<String> = toks[1..].iter().map(|s| s.to_string()).collect();
    if classes.len() != n_classes || n_classes < 2 {
        return Err(l.err(format!("class list holds {} labels, header says {n_classes}", classes.len())));
    }
    for c in &classes {
        check_label(c).map_err(|e| l.err(e.to_string()))?;
    }
    if classes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(l.err("class labels must be sorted and distinct"));
    }

    let mut uppers = Vec::with_capacity(N_FEATURES);
    for k in 1..=N_FEATURES {
        let toks = l.expect("bins")?;
        let idx: usize = l.number(toks.first().copied().unwrap_or(""), "feature index")?;
        if idx != k {
            return Err(l.err(format!("expected bins for feature {k}, found {idx}")));
        }
        let edges = toks[1..].iter().map(|t| l.number(t, "bin edge")).collect::<Result<Vec<i64>>>()?;
        uppers.push(edges);
    }
    let map = DiscretizationMap::new(uppers).map_err(|e| l.err(e.to_string()))?;

    let n_vars = N_FEATURES + 1;
    let mut cards = map.cardinalities();
    cards.push(n_classes);
    let mut parents: Vec<Option<Vec<usize>>> = vec![None; n_vars];
    let mut tables: Vec<Vec<f64>> = vec![Vec::new(); n_vars];
    while l.peek_key() == Some("var") {
        let toks = l.expect("var")?;
        let (v, card) = match toks.as_slice() {
            [v, "card", c, "parents", ..] => (l.number::<usize>(v, "variable")?, l.number::<usize>(c, "cardinality")?),
            _ => return Err(l.err("expected `var <v> card <c> parents ...`")),
        };
        if v >= n_vars || parents[v].is_some() {
            return Err(l.err(format!("variable {v} is out of range or repeated")));
        }
        if card != cards[v] {
            return Err(l.err(format!("variable {v} has cardinality {card}, the map implies {}", cards[v])));
        }
        let ps = toks[4..].iter().map(|t| l.number(t, "parent")).collect::<Result<Vec<usize>>>()?;
        if let Some(&p) = ps.iter().find(|&&p| p >= n_vars || parents[p].is_none()) {
            return Err(l.err(format!("parent {p} of variable {v} is unknown or listed later")));
        }
        let n_rows: usize = ps.iter().map(|&p| cards[p]).product();
        let mut table = Vec::with_capacity(n_rows * card);
        for _ in 0..n_rows {
            let toks = l.expect("row")?;
            if toks.len() != card {
                return Err(l.err(format!("row has {} entries, expected {card}", toks.len())));
            }
            for t in toks {
                table.push(l.number::<f64>(t, "probability")?);
            }
        }
        parents[v] = Some(ps);
        tables[v] = table;
    }
    l.expect("end")?;
    if let Some((i, extra)) = l.inner.find(|(_, t)| !t.trim().is_empty()) {
        return Err(Error::parse(i + 1, format!("unexpected content after `end`: {extra:?}")));
    }
    let parents = parents
        .into_iter()
        .enumerate()
        .map(|(v, p)| p.ok_or_else(|| l.err(format!("variable {v} is missing"))))
        .collect::<Result<Vec<_>>>()?;
    let cpts = parents
        .iter()
        .zip(tables)
        .enumerate()
        .map(|(v, (ps, table))| Cpt {
            var: v,
            parents: ps.clone(),
            parent_cards: ps.iter().map(|&p| cards[p]).collect(),
            card: cards[v],
            table,
        })
        .collect();
    let dag = Dag::from_parents(parents)?;
    let net = BayesianNetwork::new(dag, cpts, cards, CLASS_VAR)?;
    Ok(Model {
        map,
        net,
        classes,
        meta: ModelMeta {
            config,
            config_digest: digest,
            structure_score,
            empty_score,
        },
    })
}
