//! Counter-system models and their exact operational semantics.
//!
//! A [`Tvass`] is a finite automaton over `d` nonnegative counters whose
//! transitions either add an integer vector to the counters or test the
//! first counter for zero. The same type serves as a plain VASS (no
//! zero-tests, `testable = false`) and as a one-counter automaton
//! (`dimension = 1`).

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::scalar::Scalar;

pub type StateId = String;
pub type TransId = String;

/// Suffix appended to transition ids by [`Tvass::reverse`].
pub const REVERSAL_MARKER: char = '~';

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("model has no states")]
    NoStates,
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("duplicate state `{0}`")]
    DuplicateState(String),
    #[error("duplicate transition id `{0}`")]
    DuplicateTransition(String),
    #[error("transition `{id}` references unknown state `{state}`")]
    UnknownState { id: String, state: String },
    #[error("unknown transition id `{0}`")]
    UnknownTransition(String),
    #[error("transition `{id}` has a vector of length {got}, model dimension is {expected}")]
    ArityMismatch { id: String, expected: usize, got: usize },
    #[error("zero-test transition `{0}` in a model declared without zero-tests")]
    TestNotAllowed(String),
    #[error("transition `{trans}` starts in `{expected}` but the configuration is at `{got}`")]
    SourceMismatch { trans: String, expected: String, got: String },
    #[error("configuration has {got} counters, model dimension is {expected}")]
    BadDimension { expected: usize, got: usize },
    #[error("configuration state `{0}` is not a state of the model")]
    BadState(String),
    #[error("configuration counter {0} is negative")]
    NegativeCounter(usize),
    #[error("word is not a path: `{left}` ends in `{at}` but `{right}` starts in `{from}`")]
    BrokenChain { left: String, at: String, right: String, from: String },
    #[error("run is inconsistent at step {0}")]
    InconsistentRun(usize),
}

/// Infinity norm of an integer vector.
pub fn norm<S: Scalar>(v: &[S]) -> S {
    v.iter().fold(S::zero(), |acc, x| {
        let a = x.abs();
        if a > acc {
            a
        } else {
            acc
        }
    })
}

pub fn vec_add<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    a.iter().zip(b).map(|(x, y)| x.clone() + y.clone()).collect()
}

pub fn vec_sub<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    a.iter().zip(b).map(|(x, y)| x.clone() - y.clone()).collect()
}

pub fn vec_neg<S: Scalar>(a: &[S]) -> Vec<S> {
    a.iter().map(|x| -x.clone()).collect()
}

/// Componentwise `a >= b`.
pub fn vec_ge<S: Scalar>(a: &[S], b: &[S]) -> bool {
    a.iter().zip(b).all(|(x, y)| x >= y)
}

pub fn zero_vec<S: Scalar>(d: usize) -> Vec<S> {
    vec![S::zero(); d]
}

/// A transition label: either an addition vector or the zero-test.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Action<S> {
    Add(Vec<S>),
    Tst,
}

impl<S: Scalar> Action<S> {
    pub fn is_test(&self) -> bool {
        matches!(self, Action::Tst)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition<S> {
    pub id: TransId,
    pub source: StateId,
    pub action: Action<S>,
    pub target: StateId,
}

/// A control state together with nonnegative counter values.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Configuration<S> {
    pub state: StateId,
    pub counters: Vec<S>,
}

impl<S: Scalar> Configuration<S> {
    pub fn new(state: impl Into<StateId>, counters: Vec<S>) -> Self {
        Configuration { state: state.into(), counters }
    }

    pub fn norm(&self) -> S {
        norm(&self.counters)
    }
}

impl<S: Scalar> fmt::Display for Configuration<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.state)?;
        for (i, c) in self.counters.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// A word of transition ids.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Trace(pub Vec<TransId>);

impl Trace {
    pub fn empty() -> Self {
        Trace(Vec::new())
    }

    pub fn of(ids: &[&str]) -> Self {
        Trace(ids.iter().map(|s| s.to_string()).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Trace) -> Trace {
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        Trace(v)
    }

    pub fn repeat(&self, n: u64) -> Trace {
        let mut v = Vec::with_capacity(self.0.len() * n as usize);
        for _ in 0..n {
            v.extend(self.0.iter().cloned());
        }
        Trace(v)
    }

    pub fn slice(&self, range: std::ops::Range<usize>) -> Trace {
        Trace(self.0[range].to_vec())
    }

    /// Reverses the word and maps each id to its reversed id, so that the
    /// result is a trace of the reversed model.
    pub fn mirror(&self) -> Trace {
        Trace(
            self.0
                .iter()
                .rev()
                .map(|id| format!("{id}{REVERSAL_MARKER}"))
                .collect(),
        )
    }

    /// Inverse of [`Trace::mirror`]: maps a trace of the reversed model
    /// back to the original. `None` if some id lacks the marker.
    pub fn unmirror(&self) -> Option<Trace> {
        self.0
            .iter()
            .rev()
            .map(|id| id.strip_suffix(REVERSAL_MARKER).map(|s| s.to_string()))
            .collect::<Option<Vec<_>>>()
            .map(Trace)
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "ε");
        }
        write!(f, "{}", self.0.join(" "))
    }
}

/// The automaton: states, actions and named transitions.
#[derive(Debug, Clone)]
pub struct Tvass<S> {
    dimension: usize,
    states: Vec<StateId>,
    state_index: HashMap<StateId, usize>,
    transitions: Vec<Transition<S>>,
    trans_index: HashMap<TransId, usize>,
    testable: bool,
}

impl<S: Scalar> Tvass<S> {
    pub fn new(
        dimension: usize,
        states: Vec<StateId>,
        transitions: Vec<Transition<S>>,
        testable: bool,
    ) -> Result<Self, ModelError> {
        if dimension == 0 {
            return Err(ModelError::ZeroDimension);
        }
        if states.is_empty() {
            return Err(ModelError::NoStates);
        }
        let mut state_index = HashMap::new();
        for (i, s) in states.iter().enumerate() {
            if state_index.insert(s.clone(), i).is_some() {
                return Err(ModelError::DuplicateState(s.clone()));
            }
        }
        let mut trans_index = HashMap::new();
        for (i, t) in transitions.iter().enumerate() {
            if trans_index.insert(t.id.clone(), i).is_some() {
                return Err(ModelError::DuplicateTransition(t.id.clone()));
            }
            for endpoint in [&t.source, &t.target] {
                if !state_index.contains_key(endpoint) {
                    return Err(ModelError::UnknownState {
                        id: t.id.clone(),
                        state: endpoint.clone(),
                    });
                }
            }
            match &t.action {
                Action::Add(v) => {
                    if v.len() != dimension {
                        return Err(ModelError::ArityMismatch {
                            id: t.id.clone(),
                            expected: dimension,
                            got: v.len(),
                        });
                    }
                }
                Action::Tst => {
                    if !testable {
                        return Err(ModelError::TestNotAllowed(t.id.clone()));
                    }
                }
            }
        }
        Ok(Tvass { dimension, states, state_index, transitions, trans_index, testable })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn states(&self) -> &[StateId] {
        &self.states
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn transitions(&self) -> &[Transition<S>] {
        &self.transitions
    }

    pub fn testable(&self) -> bool {
        self.testable
    }

    pub fn is_state(&self, s: &str) -> bool {
        self.state_index.contains_key(s)
    }

    pub fn state_index(&self, s: &str) -> Option<usize> {
        self.state_index.get(s).copied()
    }

    pub fn transition(&self, id: &str) -> Result<&Transition<S>, ModelError> {
        self.trans_index
            .get(id)
            .map(|&i| &self.transitions[i])
            .ok_or_else(|| ModelError::UnknownTransition(id.to_string()))
    }

    pub fn transition_index(&self, id: &str) -> Result<usize, ModelError> {
        self.trans_index
            .get(id)
            .copied()
            .ok_or_else(|| ModelError::UnknownTransition(id.to_string()))
    }

    /// Maximum infinity norm over the addition actions, zero if there are
    /// none.
    pub fn action_norm(&self) -> S {
        let mut best = S::zero();
        for t in &self.transitions {
            if let Action::Add(v) = &t.action {
                let n = norm(v);
                if n > best {
                    best = n;
                }
            }
        }
        best
    }

    pub fn has_tests(&self) -> bool {
        self.transitions.iter().any(|t| t.action.is_test())
    }

    pub fn validate_config(&self, c: &Configuration<S>) -> Result<(), ModelError> {
        if !self.is_state(&c.state) {
            return Err(ModelError::BadState(c.state.clone()));
        }
        if c.counters.len() != self.dimension {
            return Err(ModelError::BadDimension {
                expected: self.dimension,
                got: c.counters.len(),
            });
        }
        for (i, v) in c.counters.iter().enumerate() {
            if v.is_negative() {
                return Err(ModelError::NegativeCounter(i));
            }
        }
        Ok(())
    }

    /// One step of the semantics. `Ok(None)` means the transition exists
    /// and starts in the right state but is disabled here; id or source
    /// mismatches are errors.
    pub fn step(
        &self,
        c: &Configuration<S>,
        id: &str,
    ) -> Result<Option<Configuration<S>>, ModelError> {
        let t = self.transition(id)?;
        if t.source != c.state {
            return Err(ModelError::SourceMismatch {
                trans: id.to_string(),
                expected: t.source.clone(),
                got: c.state.clone(),
            });
        }
        if c.counters.len() != self.dimension {
            return Err(ModelError::BadDimension {
                expected: self.dimension,
                got: c.counters.len(),
            });
        }
        Ok(self.step_unchecked(c, t))
    }

    /// Step with a pre-resolved transition whose source is known to match.
    pub(crate) fn step_unchecked(
        &self,
        c: &Configuration<S>,
        t: &Transition<S>,
    ) -> Option<Configuration<S>> {
        match &t.action {
            Action::Add(a) => {
                let sum = vec_add(&c.counters, a);
                if sum.iter().any(|x| x.is_negative()) {
                    None
                } else {
                    Some(Configuration::new(t.target.clone(), sum))
                }
            }
            Action::Tst => {
                if c.counters[0].is_zero() {
                    Some(Configuration::new(t.target.clone(), c.counters.clone()))
                } else {
                    None
                }
            }
        }
    }

    /// Folds [`Tvass::step`] over a trace; the empty trace is the identity.
    pub fn apply_trace(
        &self,
        c: &Configuration<S>,
        trace: &Trace,
    ) -> Result<Option<Configuration<S>>, ModelError> {
        let mut cur = c.clone();
        for id in &trace.0 {
            match self.step(&cur, id)? {
                Some(next) => cur = next,
                None => return Ok(None),
            }
        }
        Ok(Some(cur))
    }

    /// Chain endpoints of a word, `None` for the empty word. Errors on
    /// unknown ids or broken chaining.
    pub fn path_endpoints(
        &self,
        trace: &Trace,
    ) -> Result<Option<(StateId, StateId)>, ModelError> {
        let mut cur: Option<(StateId, StateId)> = None;
        for (i, id) in trace.0.iter().enumerate() {
            let t = self.transition(id)?;
            match &mut cur {
                None => cur = Some((t.source.clone(), t.target.clone())),
                Some((_, end)) => {
                    if *end != t.source {
                        return Err(ModelError::BrokenChain {
                            left: trace.0[i - 1].clone(),
                            at: end.clone(),
                            right: id.clone(),
                            from: t.source.clone(),
                        });
                    }
                    *end = t.target.clone();
                }
            }
        }
        Ok(cur)
    }

    /// Whether the word is a path from `from` to `to` in the underlying
    /// graph. The empty word is a path exactly when `from == to`.
    pub fn is_path(&self, trace: &Trace, from: &str, to: &str) -> Result<bool, ModelError> {
        let mut cur = from.to_string();
        for id in &trace.0 {
            let t = self.transition(id)?;
            if t.source != cur {
                return Ok(false);
            }
            cur = t.target.clone();
        }
        Ok(cur == to)
    }

    /// The model with every transition effect reversed: `(p, a, q)` becomes
    /// `(q, -a, p)` and `(p, tst, q)` becomes `(q, tst, p)`. Reversed ids
    /// carry a `~` suffix so traces of both models stay distinguishable.
    pub fn reverse(&self) -> Tvass<S> {
        let transitions = self
            .transitions
            .iter()
            .map(|t| Transition {
                id: format!("{}{}", t.id, REVERSAL_MARKER),
                source: t.target.clone(),
                action: match &t.action {
                    Action::Add(a) => Action::Add(vec_neg(a)),
                    Action::Tst => Action::Tst,
                },
                target: t.source.clone(),
            })
            .collect();
        Tvass::new(self.dimension, self.states.clone(), transitions, self.testable)
            .expect("reversal preserves model invariants")
    }
}

/// A run: the visited configurations together with the trace that produced
/// them. `configs.len() == trace.len() + 1` and consecutive configurations
/// are related by the step relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Run<S> {
    configs: Vec<Configuration<S>>,
    trace: Trace,
}

impl<S: Scalar> Run<S> {
    pub fn new(
        model: &Tvass<S>,
        configs: Vec<Configuration<S>>,
        trace: Trace,
    ) -> Result<Self, ModelError> {
        if configs.len() != trace.len() + 1 {
            return Err(ModelError::InconsistentRun(0));
        }
        for (i, id) in trace.0.iter().enumerate() {
            match model.step(&configs[i], id)? {
                Some(next) if next == configs[i + 1] => {}
                _ => return Err(ModelError::InconsistentRun(i)),
            }
        }
        Ok(Run { configs, trace })
    }

    /// Replays a trace from a starting configuration, recording every
    /// visited configuration. `Ok(None)` when some step is disabled.
    pub fn replay(
        model: &Tvass<S>,
        start: Configuration<S>,
        trace: &Trace,
    ) -> Result<Option<Run<S>>, ModelError> {
        model.validate_config(&start)?;
        let mut configs = Vec::with_capacity(trace.len() + 1);
        configs.push(start);
        for id in &trace.0 {
            let cur = configs.last().expect("nonempty");
            match model.step(cur, id)? {
                Some(next) => configs.push(next),
                None => return Ok(None),
            }
        }
        Ok(Some(Run { configs, trace: trace.clone() }))
    }

    pub fn configs(&self) -> &[Configuration<S>] {
        &self.configs
    }

    pub fn trace(&self) -> &Trace {
        &self.trace
    }

    pub fn len(&self) -> usize {
        self.trace.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trace.is_empty()
    }

    pub fn start(&self) -> &Configuration<S> {
        self.configs.first().expect("run has at least one configuration")
    }

    pub fn end(&self) -> &Configuration<S> {
        self.configs.last().expect("run has at least one configuration")
    }
}
