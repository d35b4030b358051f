//! Score-based structure search: greedy hill climbing and a genetic algorithm.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::dag::Dag;
use super::score::{DiscreteDataset, FamilyScorer, ScoreKind};

/// Outcome of a structure search.
#[derive(Clone, Debug, PartialEq)]
pub struct SearchOutcome {
    pub dag: Dag,
    pub score: f64,
    /// Score after every accepted move (hill climbing) or best score after
    /// every generation (GA), starting with the initial value.
    pub trace: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HillClimbConfig {
    pub max_parents: usize,
    pub max_iters: usize,
    pub score: ScoreKind,
}

impl Default for HillClimbConfig {
    fn default() -> Self {
        HillClimbConfig {
            max_parents: 4,
            max_iters: 10_000,
            score: ScoreKind::Bic,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GaConfig {
    pub population_size: usize,
    pub generations: usize,
    /// Toggle probability of each ordered variable pair during mutation.
    pub mutation_rate: f64,
    pub tournament_size: usize,
    pub max_parents: usize,
    pub seed: u64,
    pub score: ScoreKind,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            population_size: 50,
            generations: 100,
            mutation_rate: 0.02,
            tournament_size: 3,
            max_parents: 4,
            seed: 0,
            score: ScoreKind::Bic,
        }
    }
}

#[derive(Clone, Copy, Debug)]
enum Move {
    Add(usize, usize),
    Remove(usize, usize),
    Reverse(usize, usize),
}

/// Greedy best-improvement search over single-edge additions, removals and
/// reversals, starting from the empty graph. Only strictly improving moves
/// are taken; ties go to the first move in `(from, to)` order.
pub fn hill_climb(data: &DiscreteDataset, cfg: &HillClimbConfig) -> SearchOutcome {
    let n = data.n_vars();
    let mut scorer = FamilyScorer::new(data, cfg.score);
    let mut dag = Dag::empty(n);
    let mut current = scorer.score(&dag);
    let mut trace = vec![current];

    for _ in 0..cfg.max_iters {
        let mut best: Option<(Move, f64)> = None;
        let mut consider = |m: Move, delta: f64| {
            if delta > 1e-9 && best.map_or(true, |(_, d)| delta > d) {
                best = Some((m, delta));
            }
        };
        for from in 0..n {
            for to in 0..n {
                if from == to {
                    continue;
                }
                let pa_to = dag.parents(to).to_vec();
                if dag.has_edge(from, to) {
                    let without: Vec<usize> = pa_to.iter().copied().filter(|&p| p != from).collect();
                    let d_remove = scorer.family(to, &without) - scorer.family(to, &pa_to);
                    consider(Move::Remove(from, to), d_remove);

                    let pa_from = dag.parents(from).to_vec();
                    if pa_from.len() < cfg.max_parents {
                        let mut probe = dag.clone();
                        probe.remove_edge(from, to);
                        if !probe.has_path(from, to) {
                            let mut with = pa_from.clone();
                            with.push(to);
                            let d = d_remove + scorer.family(from, &with) - scorer.family(from, &pa_from);
                            consider(Move::Reverse(from, to), d);
                        }
                    }
                } else if !dag.has_edge(to, from) && pa_to.len() < cfg.max_parents && !dag.has_path(to, from) {
                    let mut with = pa_to.clone();
                    with.push(from);
                    let d = scorer.family(to, &with) - scorer.family(to, &pa_to);
                    consider(Move::Add(from, to), d);
                }
            }
        }
        let Some((mv, _)) = best else { break };
        match mv {
            Move::Add(a, b) => dag.insert_edge(a, b),
            Move::Remove(a, b) => dag.remove_edge(a, b),
            Move::Reverse(a, b) => {
                dag.remove_edge(a, b);
                dag.insert_edge(b, a);
            }
        }
        debug_assert!(dag.is_acyclic());
        current = scorer.score(&dag);
        trace.push(current);
    }
    SearchOutcome {
        dag,
        score: current,
        trace,
    }
}

/// Score gained by keeping `from -> to` given the current parents of `to`.
fn arc_contribution(scorer: &mut FamilyScorer<'_>, dag: &Dag, from: usize, to: usize) -> f64 {
    let pa = dag.parents(to).to_vec();
    let without: Vec<usize> = pa.iter().copied().filter(|&p| p != from).collect();
    scorer.family(to, &pa) - scorer.family(to, &without)
}

/// Makes `dag` a valid individual: trims parent sets above `max_parents`
/// and breaks cycles, each time dropping the arc that contributes least.
pub(crate) fn repair(dag: &mut Dag, scorer: &mut FamilyScorer<'_>, max_parents: usize) {
    for v in 0..dag.n_vars() {
        while dag.parents(v).len() > max_parents {
            let worst = weakest(scorer, dag, dag.parents(v).iter().map(|&p| (p, v)).collect());
            dag.remove_edge(worst.0, worst.1);
        }
    }
    while let Some(cycle) = dag.find_cycle() {
        let worst = weakest(scorer, dag, cycle);
        dag.remove_edge(worst.0, worst.1);
    }
}

fn weakest(scorer: &mut FamilyScorer<'_>, dag: &Dag, arcs: Vec<(usize, usize)>) -> (usize, usize) {
    let mut best = arcs[0];
    let mut best_c = f64::INFINITY;
    for (a, b) in arcs {
        let c = arc_contribution(scorer, dag, a, b);
        if c < best_c {
            best_c = c;
            best = (a, b);
        }
    }
    best
}

fn random_dag(n: usize, max_parents: usize, rng: &mut ChaCha8Rng) -> Dag {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let p_edge = if n > 1 { (2.0 / (n as f64 - 1.0)).min(1.0) } else { 0.0 };
    let mut dag = Dag::empty(n);
    for (i, &to) in order.iter().enumerate() {
        for &from in &order[..i] {
            if dag.parents(to).len() < max_parents && rng.gen_bool(p_edge) {
                dag.insert_edge(from, to);
            }
        }
    }
    dag
}

fn tournament(fitness: &[f64], size: usize, rng: &mut ChaCha8Rng) -> usize {
    let mut best = rng.gen_range(0..fitness.len());
    for _ in 1..size.max(1) {
        let c = rng.gen_range(0..fitness.len());
        if fitness[c] > fitness[best] {
            best = c;
        }
    }
    best
}

/// Genetic search over DAGs.
///
/// The initial population holds the empty graph plus random DAGs. Each
/// generation keeps the best individual and fills the rest with children:
/// tournament-selected parents, uniform edge-wise crossover, repair, per-pair
/// toggle mutation, repair. Fitness is the decomposable score; the best DAG
/// ever seen is returned. Fully determined by `cfg.seed`.
pub fn ga_search(data: &DiscreteDataset, cfg: &GaConfig) -> SearchOutcome {
    let n = data.n_vars();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut scorer = FamilyScorer::new(data, cfg.score);
    let pop_size = cfg.population_size.max(1);

    let mut population = vec![Dag::empty(n)];
    while population.len() < pop_size {
        let mut d = random_dag(n, cfg.max_parents, &mut rng);
        repair(&mut d, &mut scorer, cfg.max_parents);
        population.push(d);
    }
    let mut fitness: Vec<f64> = population.iter().map(|d| scorer.score(d)).collect();

    let argmax = |f: &[f64]| {
        f.iter()
            .enumerate()
            .fold(0, |b, (i, &x)| if x > f[b] { i } else { b })
    };
    let mut best_idx = argmax(&fitness);
    let mut best = (population[best_idx].clone(), fitness[best_idx]);
    let mut trace = vec![best.1];

    for _ in 0..cfg.generations {
        let mut next = vec![population[best_idx].clone()];
        while next.len() < pop_size {
            let a = &population[tournament(&fitness, cfg.tournament_size, &mut rng)];
            let b = &population[tournament(&fitness, cfg.tournament_size, &mut rng)];
            let mut child = Dag::empty(n);
            for to in 0..n {
                for from in 0..n {
                    if from == to {
                        continue;
                    }
                    let src = if rng.gen_bool(0.5) { a } else { b };
                    if src.has_edge(from, to) {
                        child.insert_edge(from, to);
                    }
                }
            }
            repair(&mut child, &mut scorer, cfg.max_parents);
            for to in 0..n {
                for from in 0..n {
                    if from != to && rng.gen_bool(cfg.mutation_rate.clamp(0.0, 1.0)) {
                        if child.has_edge(from, to) {
                            child.remove_edge(from, to);
                        } else {
                            child.insert_edge(from, to);
                        }
                    }
                }
            }
            repair(&mut child, &mut scorer, cfg.max_parents);
            debug_assert!(child.is_acyclic());
            next.push(child);
        }
        population = next;
        fitness = population.iter().map(|d| scorer.score(d)).collect();
        best_idx = argmax(&fitness);
        if fitness[best_idx] > best.1 {
            best = (population[best_idx].clone(), fitness[best_idx]);
        }
        trace.push(best.1);
    }
    SearchOutcome {
        dag: best.0,
        score: best.1,
        trace,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bayesnet::score::score;

    fn chain_data(n_rows: usize, seed: u64) -> DiscreteDataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows: Vec<Vec<usize>> = (0..n_rows)
            .map(|_| {
                let a = rng.gen_range(0..2usize);
                let b = if rng.gen_bool(0.9) { a } else { 1 - a };
                vec![a, b]
            })
            .collect();
        DiscreteDataset::new(&rows, vec![2, 2]).unwrap()
    }

    fn independent_data(n_rows: usize, seed: u64) -> DiscreteDataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows: Vec<Vec<usize>> = (0..n_rows)
            .map(|_| vec![rng.gen_range(0..2), rng.gen_range(0..2), rng.gen_range(0..2)])
            .collect();
        DiscreteDataset::new(&rows, vec![2, 2, 2]).unwrap()
    }

    #[test]
    fn independent_fair_coins_prefer_no_edge() {
        let data = independent_data(1000, 11);
        let mut with = Dag::empty(3);
        with.add_edge(0, 1);
        assert!(score(&with, &data, ScoreKind::Bic) < score(&Dag::empty(3), &data, ScoreKind::Bic));
    }

    #[test]
    fn hill_climb_recovers_dependence() {
        let data = chain_data(2000, 3);
        let out = hill_climb(&data, &HillClimbConfig::default());
        assert!(out.dag.has_edge(0, 1) || out.dag.has_edge(1, 0));
        assert!(out.trace.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn hill_climb_leaves_independent_columns_alone() {
        let out = hill_climb(&independent_data(2000, 5), &HillClimbConfig::default());
        assert_eq!(out.dag.n_edges(), 0);
    }

    #[test]
    fn ga_recovers_dependence_and_is_reproducible() {
        let data = chain_data(2000, 3);
        let cfg = GaConfig { seed: 9, generations: 20, population_size: 20, ..GaConfig::default() };
        let a = ga_search(&data, &cfg);
        let b = ga_search(&data, &cfg);
        assert_eq!(a, b);
        assert!(a.dag.has_edge(0, 1) || a.dag.has_edge(1, 0));
    }

    #[test]
    fn ga_without_generations_beats_empty() {
        let data = independent_data(500, 1);
        let cfg = GaConfig { generations: 0, seed: 4, ..GaConfig::default() };
        let out = ga_search(&data, &cfg);
        assert!(out.score >= score(&Dag::empty(3), &data, ScoreKind::Bic));
        assert_eq!(out.trace.len(), 1);
    }

    #[test]
    fn repair_enforces_limits() {
        let data = independent_data(200, 2);
        let mut scorer = FamilyScorer::new(&data, ScoreKind::Bic);
        let mut d = Dag::empty(3);
        d.insert_edge(0, 1);
        d.insert_edge(1, 2);
        d.insert_edge(2, 0);
        d.insert_edge(0, 2);
        repair(&mut d, &mut scorer, 1);
        assert!(d.is_acyclic());
        assert!((0..3).all(|v| d.parents(v).len() <= 1));
    }
}
