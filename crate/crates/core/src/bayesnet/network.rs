use rand::Rng;

use super::dag::Dag;
use super::score::DiscreteDataset;
use crate::error::{Error, Result};

/// Largest joint state space [`BayesianNetwork::joint_enumerate`] will walk.
pub const ENUMERATION_LIMIT: u128 = 10_000_000;

/// Conditional probability table of one variable.
///
/// Rows are parent configurations in mixed-radix order over `parents` (the
/// first parent is the most significant digit); each row holds `card`
/// probabilities.
#[derive(Clone, Debug, PartialEq)]
pub struct Cpt {
    pub var: usize,
    pub parents: Vec<usize>,
    pub parent_cards: Vec<usize>,
    pub card: usize,
    pub table: Vec<f64>,
}

impl Cpt {
    pub fn n_rows(&self) -> usize {
        self.parent_cards.iter().product()
    }

    pub fn row(&self, config: usize) -> &[f64] {
        &self.table[config * self.card..(config + 1) * self.card]
    }

    /// Row index of the parent values found in a full assignment.
    pub fn config_of(&self, assignment: &[usize]) -> usize {
        self.parents
            .iter()
            .zip(&self.parent_cards)
            .fold(0, |acc, (&p, &c)| acc * c + assignment[p])
    }

    /// `P(var = assignment[var] | parents)`.
    pub fn prob(&self, assignment: &[usize]) -> f64 {
        self.table[self.config_of(assignment) * self.card + assignment[self.var]]
    }

    fn check(&self, tol: f64) -> Result<()> {
        if self.table.len() != self.n_rows() * self.card {
            return Err(Error::Invariant(format!("cpt {}: table has the wrong size", self.var)));
        }
        for r in 0..self.n_rows() {
            let row = self.row(r);
            if row.iter().any(|&p| !(p > 0.0 && p <= 1.0)) {
                return Err(Error::Invariant(format!("cpt {} row {r}: entry outside (0, 1]", self.var)));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > tol {
                return Err(Error::Invariant(format!("cpt {} row {r} sums to {sum}", self.var)));
            }
        }
        Ok(())
    }
}

/// Discrete Bayesian network with one designated class variable.
#[derive(Clone, Debug, PartialEq)]
pub struct BayesianNetwork {
    dag: Dag,
    cpts: Vec<Cpt>,
    cards: Vec<usize>,
    class_var: usize,
}

impl BayesianNetwork {
    /// Assembles a network, checking that CPTs agree with the DAG and the
    /// cardinalities and that every row is a strictly positive distribution.
    pub fn new(dag: Dag, cpts: Vec<Cpt>, cards: Vec<usize>, class_var: usize) -> Result<Self> {
        let n = dag.n_vars();
        if cards.len() != n || cpts.len() != n || class_var >= n {
            return Err(Error::Invariant("network components disagree on the variable count".into()));
        }
        for (v, cpt) in cpts.iter().enumerate() {
            let expected: Vec<usize> = cpt.parents.iter().map(|&p| cards[p]).collect();
            if cpt.var != v || cpt.parents != dag.parents(v) || cpt.card != cards[v] || cpt.parent_cards != expected {
                return Err(Error::Invariant(format!("cpt {v} does not match the graph")));
            }
            cpt.check(1e-9)?;
        }
        Ok(BayesianNetwork {
            dag,
            cpts,
            cards,
            class_var,
        })
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    pub fn cpts(&self) -> &[Cpt] {
        &self.cpts
    }

    pub fn cards(&self) -> &[usize] {
        &self.cards
    }

    pub fn class_var(&self) -> usize {
        self.class_var
    }

    pub fn n_classes(&self) -> usize {
        self.cards[self.class_var]
    }

    fn check_evidence(&self, evidence: &[Option<usize>]) -> Result<()> {
        if evidence.len() != self.cards.len() {
            return Err(Error::invalid(format!(
                "evidence covers {} variables, network has {}",
                evidence.len(),
                self.cards.len()
            )));
        }
        for (v, e) in evidence.iter().enumerate() {
            if let Some(x) = e {
                if *x >= self.cards[v] {
                    return Err(Error::invalid(format!("value {x} out of range for variable {v}")));
                }
            }
        }
        Ok(())
    }

    /// Class posterior given values for every non-class variable.
    ///
    /// With all features observed the only free variable is the class, so
    /// `P(c | e)` is the normalized product of the CPT entries selected by
    /// `(c, e)`. Computed in log space.
    pub fn posterior(&self, evidence: &[Option<usize>]) -> Result<Vec<f64>> {
        self.check_evidence(evidence)?;
        let mut assignment = Vec::with_capacity(evidence.len());
        for (v, e) in evidence.iter().enumerate() {
            match e {
                Some(x) => assignment.push(*x),
                None if v == self.class_var => assignment.push(0),
                None => return Err(Error::invalid(format!("evidence is missing variable {v}"))),
            }
        }
        let log_joint: Vec<f64> = (0..self.n_classes())
            .map(|c| {
                assignment[self.class_var] = c;
                self.cpts.iter().map(|cpt| cpt.prob(&assignment).ln()).sum()
            })
            .collect();
        let max = log_joint.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let weights: Vec<f64> = log_joint.iter().map(|l| (l - max).exp()).collect();
        let total: f64 = weights.iter().sum();
        Ok(weights.into_iter().map(|w| w / total).collect())
    }

    /// Class posterior by summing the full joint over every unobserved
    /// variable. Exponential; intended as a reference for small networks.
    pub fn joint_enumerate(&self, evidence: &[Option<usize>]) -> Result<Vec<f64>> {
        self.check_evidence(evidence)?;
        let hidden: Vec<usize> = (0..self.cards.len())
            .filter(|&v| v != self.class_var && evidence[v].is_none())
            .collect();
        let space: u128 = hidden
            .iter()
            .chain(std::iter::once(&self.class_var))
            .map(|&v| self.cards[v] as u128)
            .product();
        if space > ENUMERATION_LIMIT {
            return Err(Error::StateSpaceTooLarge(space));
        }

        let mut assignment: Vec<usize> = evidence.iter().map(|e| e.unwrap_or(0)).collect();
        let mut mass = vec![0.0; self.n_classes()];
        for (c, slot) in mass.iter_mut().enumerate() {
            assignment[self.class_var] = c;
            for &h in &hidden {
                assignment[h] = 0;
            }
            loop {
                *slot += self.cpts.iter().map(|cpt| cpt.prob(&assignment)).product::<f64>();
                // odometer step over the hidden variables
                let mut k = 0;
                while k < hidden.len() {
                    let h = hidden[k];
                    assignment[h] += 1;
                    if assignment[h] < self.cards[h] {
                        break;
                    }
                    assignment[h] = 0;
                    k += 1;
                }
                if k == hidden.len() {
                    break;
                }
            }
        }
        let total: f64 = mass.iter().sum();
        Ok(mass.into_iter().map(|m| m / total).collect())
    }
}

/// Dirichlet-smoothed maximum likelihood:
/// `P(x | u) = (N(x, u) + alpha) / (N(u) + alpha * card)`.
pub fn fit_parameters(dag: &Dag, data: &DiscreteDataset, alpha: f64, class_var: usize) -> Result<BayesianNetwork> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::invalid(format!("Dirichlet alpha must be positive, got {alpha}")));
    }
    if dag.n_vars() != data.n_vars() {
        return Err(Error::invalid("graph and data disagree on the variable count"));
    }
    let cards = data.cards().to_vec();
    let mut cpts = Vec::with_capacity(cards.len());
    for v in 0..cards.len() {
        let parents = dag.parents(v).to_vec();
        let parent_cards: Vec<usize> = parents.iter().map(|&p| cards[p]).collect();
        let n_rows: usize = parent_cards.iter().product();
        let card = cards[v];
        let mut counts = vec![0.0f64; n_rows * card];
        for i in 0..data.n_rows() {
            let cfg = parents
                .iter()
                .zip(&parent_cards)
                .fold(0, |acc, (&p, &c)| acc * c + data.column(p)[i] as usize);
            counts[cfg * card + data.column(v)[i] as usize] += 1.0;
        }
        let mut table = counts;
        for row in table.chunks_mut(card) {
            let total: f64 = row.iter().sum();
            let denom = total + alpha * card as f64;
            for x in row.iter_mut() {
                *x = (*x + alpha) / denom;
            }
        }
        cpts.push(Cpt {
            var: v,
            parents,
            parent_cards,
            card,
            table,
        });
    }
    BayesianNetwork::new(dag.clone(), cpts, cards, class_var)
}

/// Random network for tests and benchmarks: `n_vars` variables with
/// cardinalities in `2..=max_card`, a random DAG over a random order with at
/// most `max_parents` parents each, and strictly positive random CPT rows.
/// The class variable is 0.
pub fn random_network<R: Rng>(rng: &mut R, n_vars: usize, max_card: usize, max_parents: usize) -> BayesianNetwork {
    let cards: Vec<usize> = (0..n_vars).map(|_| rng.gen_range(2..=max_card.max(2))).collect();
    let mut order: Vec<usize> = (0..n_vars).collect();
    rand::seq::SliceRandom::shuffle(order.as_mut_slice(), rng);
    let mut dag = Dag::empty(n_vars);
    for (i, &to) in order.iter().enumerate() {
        for &from in &order[..i] {
            if dag.parents(to).len() < max_parents && rng.gen_bool(0.5) {
                dag.insert_edge(from, to);
            }
        }
    }
    let cpts = (0..n_vars)
        .map(|v| {
            let parents = dag.parents(v).to_vec();
            let parent_cards: Vec<usize> = parents.iter().map(|&p| cards[p]).collect();
            let n_rows: usize = parent_cards.iter().product();
            let mut table = Vec::with_capacity(n_rows * cards[v]);
            for _ in 0..n_rows {
                let raw: Vec<f64> = (0..cards[v]).map(|_| rng.gen_range(0.05..1.0)).collect();
                let s: f64 = raw.iter().sum();
                table.extend(raw.into_iter().map(|x| x / s));
            }
            Cpt {
                var: v,
                parents,
                parent_cards,
                card: cards[v],
                table,
            }
        })
        .collect();
    BayesianNetwork::new(dag, cpts, cards, 0).expect("random network is well formed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// class C (2 values) -> features A, B (binary).
    fn naive_toy() -> BayesianNetwork {
        let dag = Dag::from_parents(vec![vec![], vec![0], vec![0]]).unwrap();
        let cpts = vec![
            Cpt { var: 0, parents: vec![], parent_cards: vec![], card: 2, table: vec![0.3, 0.7] },
            Cpt { var: 1, parents: vec![0], parent_cards: vec![2], card: 2, table: vec![0.9, 0.1, 0.2, 0.8] },
            Cpt { var: 2, parents: vec![0], parent_cards: vec![2], card: 2, table: vec![0.6, 0.4, 0.25, 0.75] },
        ];
        BayesianNetwork::new(dag, cpts, vec![2, 2, 2], 0).unwrap()
    }

    #[test]
    fn posterior_matches_bayes_rule_by_hand() {
        let net = naive_toy();
        // e = (A=0, B=1)
        let j0 = 0.3 * 0.9 * 0.4;
        let j1 = 0.7 * 0.2 * 0.75;
        let want = [j0 / (j0 + j1), j1 / (j0 + j1)];
        let ev = [None, Some(0), Some(1)];
        for got in [net.posterior(&ev).unwrap(), net.joint_enumerate(&ev).unwrap()] {
            assert!((got[0] - want[0]).abs() < 1e-12 && (got[1] - want[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn independent_class_gives_prior() {
        let dag = Dag::empty(2);
        let cpts = vec![
            Cpt { var: 0, parents: vec![], parent_cards: vec![], card: 3, table: vec![0.2, 0.5, 0.3] },
            Cpt { var: 1, parents: vec![], parent_cards: vec![], card: 2, table: vec![0.4, 0.6] },
        ];
        let net = BayesianNetwork::new(dag, cpts, vec![3, 2], 0).unwrap();
        let p = net.posterior(&[None, Some(1)]).unwrap();
        for (a, b) in p.iter().zip([0.2, 0.5, 0.3]) {
            assert!((a - b).abs() < 1e-12);
        }
        let single = BayesianNetwork::new(
            Dag::empty(1),
            vec![Cpt { var: 0, parents: vec![], parent_cards: vec![], card: 2, table: vec![0.35, 0.65] }],
            vec![2],
            0,
        )
        .unwrap();
        let p = single.joint_enumerate(&[None]).unwrap();
        assert!((p[0] - 0.35).abs() < 1e-12);
    }

    #[test]
    fn near_deterministic_cpts_concentrate_the_posterior() {
        let dag = Dag::from_parents(vec![vec![], vec![0]]).unwrap();
        let cpts = vec![
            Cpt { var: 0, parents: vec![], parent_cards: vec![], card: 2, table: vec![0.5, 0.5] },
            Cpt { var: 1, parents: vec![0], parent_cards: vec![2], card: 2, table: vec![1.0 - 1e-15, 1e-15, 1e-15, 1.0 - 1e-15] },
        ];
        let net = BayesianNetwork::new(dag, cpts, vec![2, 2], 0).unwrap();
        let p = net.joint_enumerate(&[None, Some(1)]).unwrap();
        assert!(p[1] > 1.0 - 1e-12);
    }

    #[test]
    fn missing_evidence_is_rejected() {
        let net = naive_toy();
        assert!(matches!(net.posterior(&[None, None, Some(1)]), Err(Error::InvalidArgument(_))));
        assert!(net.posterior(&[None, Some(2), Some(1)]).is_err());
        assert!(net.posterior(&[None, Some(0)]).is_err());
        // the oracle accepts partial evidence
        let p = net.joint_enumerate(&[None, None, Some(1)]).unwrap();
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn enumeration_refuses_huge_spaces() {
        let n = 12;
        let dag = Dag::empty(n);
        let cpts = (0..n)
            .map(|v| Cpt { var: v, parents: vec![], parent_cards: vec![], card: 5, table: vec![0.2; 5] })
            .collect();
        let net = BayesianNetwork::new(dag, cpts, vec![5; n], 0).unwrap();
        assert!(matches!(net.joint_enumerate(&vec![None; n]), Err(Error::StateSpaceTooLarge(_))));
    }

    #[test]
    fn laplace_smoothing() {
        let rows = vec![vec![0, 0], vec![0, 0], vec![0, 0], vec![0, 1]];
        let data = DiscreteDataset::new(&rows, vec![2, 2]).unwrap();
        let dag = Dag::from_parents(vec![vec![], vec![0]]).unwrap();
        let net = fit_parameters(&dag, &data, 1.0, 0).unwrap();
        let cpt = &net.cpts()[1];
        assert!((cpt.row(0)[0] - 4.0 / 6.0).abs() < 1e-15);
        assert!((cpt.row(0)[1] - 2.0 / 6.0).abs() < 1e-15);
        // parent value 1 never observed
        assert_eq!(cpt.row(1), &[0.5, 0.5]);
        assert!(fit_parameters(&dag, &data, 0.0, 0).is_err());
    }

    #[test]
    fn random_networks_agree_with_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..50 {
            let n = rng.gen_range(1..=6);
            let net = random_network(&mut rng, n, 3, 3);
            let ev: Vec<Option<usize>> = (0..n)
                .map(|v| (v != 0).then(|| rng.gen_range(0..net.cards()[v])))
                .collect();
            let a = net.posterior(&ev).unwrap();
            let b = net.joint_enumerate(&ev).unwrap();
            assert!((a.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() < 1e-9);
            }
        }
    }
}
