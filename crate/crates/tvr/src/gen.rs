//! Seed-deterministic random instances for differential testing.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::model::{Action, Transition, Tvass};
use crate::scalar::{from_i64, Scalar};
use crate::woca::Woca;

/// Parameters of the two-counter instance generator. For each ordered
/// state pair a transition is emitted with probability `edge_prob`; its
/// action is a zero-test with probability `test_density`, otherwise a
/// vector drawn uniformly from `[-max_norm, max_norm]^2`.
#[derive(Debug, Clone)]
pub struct GenParams {
    pub seed: u64,
    pub states: usize,
    pub max_norm: i64,
    pub test_density: f64,
    pub edge_prob: f64,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams { seed: 0, states: 3, max_norm: 2, test_density: 0.25, edge_prob: 0.6 }
    }
}

/// Deterministic for a seed: equal parameters give byte-identical
/// printed models.
pub fn random_instance<S: Scalar>(params: &GenParams) -> Tvass<S> {
    assert!(params.states >= 1, "need at least one state");
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let states: Vec<String> = (0..params.states).map(|i| format!("S{i}")).collect();
    let mut transitions = Vec::new();
    let mut next_id = 0usize;
    let testable = params.test_density > 0.0;
    for src in 0..params.states {
        for dst in 0..params.states {
            if !rng.gen_bool(params.edge_prob) {
                continue;
            }
            let action = if testable && rng.gen_bool(params.test_density) {
                Action::Tst
            } else {
                let a = rng.gen_range(-params.max_norm..=params.max_norm);
                let b = rng.gen_range(-params.max_norm..=params.max_norm);
                Action::Add(vec![from_i64::<S>(a), from_i64::<S>(b)])
            };
            transitions.push(Transition {
                id: format!("t{next_id}"),
                source: states[src].clone(),
                action,
                target: states[dst].clone(),
            });
            next_id += 1;
        }
    }
    Tvass::new(2, states, transitions, testable).expect("generated models are valid")
}

/// Random unit one-counter automaton with weights in `{-1, 0, 1}`;
/// zero-tests carry weight zero.
pub fn random_woca<S: Scalar>(params: &GenParams) -> Woca<S> {
    assert!(params.states >= 1, "need at least one state");
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let states: Vec<String> = (0..params.states).map(|i| format!("S{i}")).collect();
    let mut transitions = Vec::new();
    let mut weights = Vec::new();
    let mut next_id = 0usize;
    for src in 0..params.states {
        for dst in 0..params.states {
            if !rng.gen_bool(params.edge_prob) {
                continue;
            }
            let (action, weight) = if rng.gen_bool(params.test_density) {
                (Action::Tst, 0i8)
            } else {
                let delta = rng.gen_range(-1i64..=1);
                let weight = rng.gen_range(-1i8..=1);
                (Action::Add(vec![from_i64::<S>(delta)]), weight)
            };
            transitions.push(Transition {
                id: format!("t{next_id}"),
                source: states[src].clone(),
                action,
                target: states[dst].clone(),
            });
            weights.push(weight);
            next_id += 1;
        }
    }
    let base = Tvass::new(1, states, transitions, true).expect("generated models are valid");
    Woca::new(base, weights).expect("generated weights are in range")
}
