//! Discrete Bayesian networks: decomposable structure scores, hill-climbing
//! and genetic structure search, Dirichlet-smoothed parameters, and exact
//! class posteriors.

mod dag;
mod network;
mod score;
mod search;

pub use dag::Dag;
pub use network::{fit_parameters, random_network, BayesianNetwork, Cpt, ENUMERATION_LIMIT};
pub use score::{free_parameters, score, DiscreteDataset, FamilyScorer, ScoreKind};
pub use search::{ga_search, hill_climb, GaConfig, HillClimbConfig, SearchOutcome};
