//! Weighted one-counter automata: run factorization by hill cutting,
//! bounded searches for short runs with weight constraints, and the
//! path-plus-cycle weight certificate constructor.
//!
//! All automata here are one-dimensional with unit addition actions
//! (deltas in `{-1, 0, 1}`); weights also range over `{-1, 0, 1}` and
//! accumulate over a run without any sign constraint.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use thiserror::Error;

use crate::model::{Action, Configuration, ModelError, Run, StateId, Trace, TransId, Transition, Tvass};
use crate::scalar::{from_i64, Scalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WocaError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("model must be one-dimensional")]
    NotOneDim,
    #[error("model must be two-dimensional")]
    NotTwoDim,
    #[error("transition `{0}` has a non-unit action")]
    NonUnitAction(String),
    #[error("weight out of range for transition `{0}`")]
    WeightOutOfRange(String),
    #[error("weight table has {got} entries for {expected} transitions")]
    WeightLenMismatch { expected: usize, got: usize },
    #[error("addition transition `{0}` too large to split into unit steps")]
    ActionTooLarge(String),
    #[error("run must start and end with counter zero")]
    NotZeroAnchored,
    #[error("trace of length {got} is shorter than the required {required}")]
    TraceTooShort { required: u128, got: usize },
    #[error("trace does not follow conversion chains at `{0}`")]
    NotAChainTrace(String),
    #[error("extracted factorization failed revalidation")]
    FactorizationInvalid,
    #[error("sub-search `{0}` was inconclusive within its budget")]
    SubSearchInconclusive(&'static str),
    #[error("sub-search `{0}` found no witness; a precondition does not hold")]
    SubSearchEmpty(&'static str),
}

/// Outcome of a bounded search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Search<T> {
    Found(T),
    /// The search range covers the relevant completeness bound (or the
    /// whole reachable space): a genuine no.
    NoneComplete,
    /// Budget ran out before the completeness bound.
    Inconclusive { explored: u64 },
}

impl<T> Search<T> {
    pub fn found(self) -> Option<T> {
        match self {
            Search::Found(t) => Some(t),
            _ => None,
        }
    }

    pub fn is_found(&self) -> bool {
        matches!(self, Search::Found(_))
    }
}

const NODE_BUDGET: u64 = 4_000_000;
/// Exponent of the default cap `(2|Q|)^E` on certificate sizes.
pub const CERT_SIZE_EXPONENT: u32 = 39;

/// A one-counter automaton with unit actions and a weight in `{-1,0,1}`
/// per transition.
#[derive(Debug, Clone)]
pub struct Woca<S> {
    base: Tvass<S>,
    weights: Vec<i8>,
}

impl<S: Scalar> Woca<S> {
    /// `weights` is aligned with `base.transitions()`.
    pub fn new(base: Tvass<S>, weights: Vec<i8>) -> Result<Self, WocaError> {
        check_unit_oca(&base)?;
        if weights.len() != base.transitions().len() {
            return Err(WocaError::WeightLenMismatch {
                expected: base.transitions().len(),
                got: weights.len(),
            });
        }
        for (t, w) in base.transitions().iter().zip(&weights) {
            if !(-1..=1).contains(w) {
                return Err(WocaError::WeightOutOfRange(t.id.clone()));
            }
        }
        Ok(Woca { base, weights })
    }

    pub fn base(&self) -> &Tvass<S> {
        &self.base
    }

    pub fn weight_of(&self, id: &str) -> Result<i64, WocaError> {
        let idx = self.base.transition_index(id)?;
        Ok(self.weights[idx] as i64)
    }

    /// Total weight of a word of transitions.
    pub fn weight(&self, trace: &Trace) -> Result<i64, WocaError> {
        let mut total = 0i64;
        for id in &trace.0 {
            total += self.weight_of(id)?;
        }
        Ok(total)
    }

    fn has_weight_sign(&self, sign: i64) -> bool {
        self.weights.iter().any(|w| (*w as i64) * sign > 0)
    }
}

fn check_unit_oca<S: Scalar>(model: &Tvass<S>) -> Result<(), WocaError> {
    if model.dimension() != 1 {
        return Err(WocaError::NotOneDim);
    }
    for t in model.transitions() {
        if let Action::Add(a) = &t.action {
            if a[0].abs() > S::one() {
                return Err(WocaError::NonUnitAction(t.id.clone()));
            }
        }
    }
    Ok(())
}

/// Trace translation between a two-counter model and its one-counter
/// weighted image.
#[derive(Debug, Clone)]
pub struct TvassWocaMap {
    chains: HashMap<TransId, Vec<TransId>>,
    origin: HashMap<TransId, (TransId, usize, usize)>,
}

impl TvassWocaMap {
    pub fn to_woca_trace(&self, trace: &Trace) -> Result<Trace, WocaError> {
        let mut out = Vec::new();
        for id in &trace.0 {
            let chain = self
                .chains
                .get(id)
                .ok_or_else(|| WocaError::Model(ModelError::UnknownTransition(id.clone())))?;
            out.extend(chain.iter().cloned());
        }
        Ok(Trace(out))
    }

    /// Inverse direction: the trace must consist of complete chains in
    /// order, which holds for every run between original states.
    pub fn to_original_trace(&self, trace: &Trace) -> Result<Trace, WocaError> {
        let mut out = Vec::new();
        let mut expected: Option<(TransId, usize, usize)> = None;
        for id in &trace.0 {
            let &(ref oid, pos, len) = self
                .origin
                .get(id)
                .ok_or_else(|| WocaError::NotAChainTrace(id.clone()))?;
            match &expected {
                None => {
                    if pos != 0 {
                        return Err(WocaError::NotAChainTrace(id.clone()));
                    }
                }
                Some((eid, epos, _)) => {
                    if eid != oid || pos != *epos {
                        return Err(WocaError::NotAChainTrace(id.clone()));
                    }
                }
            }
            if pos + 1 == len {
                out.push(oid.clone());
                expected = None;
            } else {
                expected = Some((oid.clone(), pos + 1, len));
            }
        }
        if expected.is_some() {
            return Err(WocaError::NotAChainTrace("<truncated chain>".into()));
        }
        Ok(Trace(out))
    }
}

const MAX_CHAIN_STEPS: u64 = 1 << 20;

/// Converts a two-counter model into a weighted one-counter automaton:
/// counter 1 stays the counter, counter 2 effects become weights, and
/// every addition action splits into unit steps through fresh
/// intermediate states (counter steps first, then weight steps).
pub fn tvass_to_woca<S: Scalar>(model: &Tvass<S>) -> Result<(Woca<S>, TvassWocaMap), WocaError> {
    if model.dimension() != 2 {
        return Err(WocaError::NotTwoDim);
    }
    let mut states: Vec<StateId> = model.states().to_vec();
    let mut transitions: Vec<Transition<S>> = Vec::new();
    let mut weights: Vec<i8> = Vec::new();
    let mut chains = HashMap::new();
    let mut origin = HashMap::new();

    for t in model.transitions() {
        // unit steps for this original transition: (counter delta, weight)
        let steps: Vec<(i64, i8)> = match &t.action {
            Action::Tst => Vec::new(),
            Action::Add(a) => {
                let c = a[0]
                    .to_i64()
                    .filter(|v| v.unsigned_abs() <= MAX_CHAIN_STEPS)
                    .ok_or_else(|| WocaError::ActionTooLarge(t.id.clone()))?;
                let w = a[1]
                    .to_i64()
                    .filter(|v| v.unsigned_abs() <= MAX_CHAIN_STEPS)
                    .ok_or_else(|| WocaError::ActionTooLarge(t.id.clone()))?;
                let mut steps = Vec::new();
                for _ in 0..c.unsigned_abs() {
                    steps.push((c.signum(), 0i8));
                }
                for _ in 0..w.unsigned_abs() {
                    steps.push((0i64, w.signum() as i8));
                }
                if steps.is_empty() {
                    steps.push((0, 0));
                }
                steps
            }
        };

        if t.action.is_test() {
            transitions.push(Transition {
                id: t.id.clone(),
                source: t.source.clone(),
                action: Action::Tst,
                target: t.target.clone(),
            });
            weights.push(0);
            chains.insert(t.id.clone(), vec![t.id.clone()]);
            origin.insert(t.id.clone(), (t.id.clone(), 0, 1));
            continue;
        }

        let len = steps.len();
        let mut chain_ids = Vec::with_capacity(len);
        let mut prev = t.source.clone();
        for (k, (delta, w)) in steps.into_iter().enumerate() {
            let next = if k + 1 == len {
                t.target.clone()
            } else {
                let s = format!("{}@{}", t.id, k + 1);
                states.push(s.clone());
                s
            };
            let id = if len == 1 { t.id.clone() } else { format!("{}#{}", t.id, k) };
            transitions.push(Transition {
                id: id.clone(),
                source: prev,
                action: Action::Add(vec![from_i64::<S>(delta)]),
                target: next.clone(),
            });
            weights.push(w);
            origin.insert(id.clone(), (t.id.clone(), k, len));
            chain_ids.push(id);
            prev = next;
        }
        chains.insert(t.id.clone(), chain_ids);
    }

    let base = Tvass::new(1, states, transitions, model.testable())?;
    Ok((Woca::new(base, weights)?, TvassWocaMap { chains, origin }))
}

fn counters_u64<S: Scalar>(model: &Tvass<S>, run: &Run<S>) -> Result<Vec<u64>, WocaError> {
    check_unit_oca(model)?;
    let anchored = run.start().counters[0].is_zero() && run.end().counters[0].is_zero();
    if !anchored {
        return Err(WocaError::NotZeroAnchored);
    }
    // from zero with unit steps the counter stays below the run length
    Ok(run
        .configs()
        .iter()
        .map(|c| c.counters[0].to_u64().expect("unit run counter fits u64"))
        .collect())
}

/// Factorization `alpha b1..bm gamma th_m..th_1 eta` of a zero-to-zero
/// run in which each `b_i th_i` pair can be pumped independently.
#[derive(Debug, Clone)]
pub struct HillFactorization {
    pub alpha: Trace,
    pub betas: Vec<Trace>,
    pub gamma: Trace,
    /// `thetas[i]` pairs with `betas[i]`; all empty in the low case.
    pub thetas: Vec<Trace>,
    pub eta: Trace,
    pub anchor_up: StateId,
    pub anchor_down: StateId,
    /// Counter levels of the pumping anchors, one per pair plus the base.
    pub levels: Vec<u64>,
}

impl HillFactorization {
    /// `alpha b1^n1 .. bm^nm gamma th_m^nm .. th_1^n1 eta`.
    pub fn pumped(&self, exponents: &[u64]) -> Trace {
        assert_eq!(exponents.len(), self.betas.len());
        let mut out = self.alpha.clone();
        for (b, &n) in self.betas.iter().zip(exponents) {
            out = out.concat(&b.repeat(n));
        }
        out = out.concat(&self.gamma);
        for (t, &n) in self.thetas.iter().zip(exponents).rev() {
            out = out.concat(&t.repeat(n));
        }
        out.concat(&self.eta)
    }
}

/// Cuts a zero-to-zero run of length at least `m^2 |Q|^3` into `m`
/// independently pumpable cycle pairs. Low runs yield repeated
/// configurations with empty descent cycles; high runs are cut at the
/// counter levels of a state pair that repeats `m+1` times.
pub fn hill_cut<S: Scalar>(
    model: &Tvass<S>,
    run: &Run<S>,
    m: u64,
) -> Result<HillFactorization, WocaError> {
    assert!(m > 0, "pump count must be positive");
    let values = counters_u64(model, run)?;
    let q = model.num_states() as u128;
    let required = (m as u128) * (m as u128) * q * q * q;
    if (run.len() as u128) < required {
        return Err(WocaError::TraceTooShort { required, got: run.len() });
    }
    let threshold = (m as u128) * q * q;

    let fact = if values.iter().all(|&v| (v as u128) < threshold) {
        low_case_hill(model, run, &values, m)
    } else {
        high_case_hill(model, run, &values, m, threshold as u64)
    };

    // exponents all one must reassemble the input exactly, every pair
    // must be pumpable, and small pumped variants must replay
    if fact.pumped(&vec![1; m as usize]) != *run.trace()
        || fact.betas.iter().zip(&fact.thetas).any(|(b, t)| b.is_empty() && t.is_empty())
    {
        return Err(WocaError::FactorizationInvalid);
    }
    for exps in exponent_grid(m as usize) {
        let t = fact.pumped(&exps);
        let end = model.apply_trace(run.start(), &t)?;
        if end.as_ref() != Some(run.end()) {
            return Err(WocaError::FactorizationInvalid);
        }
    }
    Ok(fact)
}

fn exponent_grid(m: usize) -> Vec<Vec<u64>> {
    if m <= 4 {
        let mut out = vec![vec![0u64; m]];
        for i in 0..m {
            let mut next = Vec::new();
            for v in &out {
                for e in 0..=3u64 {
                    let mut w = v.clone();
                    w[i] = e;
                    next.push(w);
                }
            }
            out = next;
        }
        out.sort();
        out.dedup();
        out
    } else {
        // axis sweeps plus the corners
        let mut out = vec![vec![0u64; m], vec![3u64; m], vec![1u64; m]];
        for i in 0..m {
            for e in 0..=3u64 {
                let mut w = vec![1u64; m];
                w[i] = e;
                out.push(w);
            }
        }
        out
    }
}

fn low_case_hill<S: Scalar>(
    model: &Tvass<S>,
    run: &Run<S>,
    values: &[u64],
    m: u64,
) -> HillFactorization {
    // some (state, counter) repeats at least m+1 times
    let mut seen: HashMap<(usize, u64), Vec<usize>> = HashMap::new();
    let mut anchor: Option<Vec<usize>> = None;
    for (i, c) in run.configs().iter().enumerate() {
        let key = (model.state_index(&c.state).expect("run state"), values[i]);
        let positions = seen.entry(key).or_default();
        positions.push(i);
        if positions.len() as u64 == m + 1 {
            anchor = Some(positions.clone());
            break;
        }
    }
    let positions = anchor.expect("pigeonhole guarantees a repeated configuration");
    let trace = run.trace();
    let alpha = trace.slice(0..positions[0]);
    let betas: Vec<Trace> = (1..positions.len())
        .map(|h| trace.slice(positions[h - 1]..positions[h]))
        .collect();
    let eta = trace.slice(positions[positions.len() - 1]..trace.len());
    let state = run.configs()[positions[0]].state.clone();
    HillFactorization {
        alpha,
        thetas: vec![Trace::empty(); betas.len()],
        betas,
        gamma: Trace::empty(),
        eta,
        anchor_up: state.clone(),
        anchor_down: state,
        levels: vec![values[positions[0]]],
    }
}

fn high_case_hill<S: Scalar>(
    model: &Tvass<S>,
    run: &Run<S>,
    values: &[u64],
    m: u64,
    threshold: u64,
) -> HillFactorization {
    let peak = values
        .iter()
        .position(|&v| v >= threshold)
        .expect("high case has a peak");
    // last visit of each level on the way up, first on the way down
    let ups: Vec<usize> = (0..=threshold)
        .map(|level| {
            (0..=peak)
                .rev()
                .find(|&i| values[i] == level)
                .expect("unit steps visit every level before the peak")
        })
        .collect();
    let downs: Vec<usize> = (0..=threshold)
        .map(|level| {
            (peak..values.len())
                .find(|&i| values[i] == level)
                .expect("unit steps visit every level after the peak")
        })
        .collect();

    // state pair repeated at m+1 levels
    let mut by_pair: HashMap<(usize, usize), Vec<u64>> = HashMap::new();
    let mut chosen: Option<Vec<u64>> = None;
    for level in 0..=threshold {
        let pair = (
            model.state_index(&run.configs()[ups[level as usize]].state).expect("state"),
            model.state_index(&run.configs()[downs[level as usize]].state).expect("state"),
        );
        let levels = by_pair.entry(pair).or_default();
        levels.push(level);
        if levels.len() as u64 == m + 1 {
            chosen = Some(levels.clone());
            break;
        }
    }
    let levels = chosen.expect("pigeonhole over state pairs");

    let trace = run.trace();
    let i = |l: u64| ups[l as usize];
    let j = |l: u64| downs[l as usize];
    let base = levels[0];
    let top = levels[levels.len() - 1];
    let alpha = trace.slice(0..i(base));
    let betas: Vec<Trace> =
        (1..levels.len()).map(|h| trace.slice(i(levels[h - 1])..i(levels[h]))).collect();
    let gamma = trace.slice(i(top)..j(top));
    let thetas: Vec<Trace> =
        (1..levels.len()).map(|h| trace.slice(j(levels[h])..j(levels[h - 1]))).collect();
    let eta = trace.slice(j(base)..trace.len());
    HillFactorization {
        alpha,
        betas,
        gamma,
        thetas,
        eta,
        anchor_up: run.configs()[i(base)].state.clone(),
        anchor_down: run.configs()[j(base)].state.clone(),
        levels,
    }
}

/// Single-pair factorization `alpha beta gamma theta eta` with short
/// cycles: `x + d <= 2|Q|^2`, `|beta theta| <= 2|Q|^3` and no zero-test
/// inside `gamma`.
#[derive(Debug, Clone)]
pub struct ShortCycleFactorization {
    pub r: StateId,
    pub s: StateId,
    pub x: u64,
    pub d: u64,
    pub alpha: Trace,
    pub beta: Trace,
    pub gamma: Trace,
    pub theta: Trace,
    pub eta: Trace,
}

impl ShortCycleFactorization {
    pub fn pumped(&self, n: u64) -> Trace {
        self.alpha
            .clone()
            .concat(&self.beta.repeat(n))
            .concat(&self.gamma)
            .concat(&self.theta.repeat(n))
            .concat(&self.eta)
    }
}

/// Tuned hill cutting for a zero-to-zero run of length at least
/// `2|Q|^3`: extracts a single cycle pair meeting the short-cycle size
/// bounds, pumpable any number of times.
pub fn cut_short_cycles<S: Scalar>(
    model: &Tvass<S>,
    run: &Run<S>,
) -> Result<ShortCycleFactorization, WocaError> {
    let values = counters_u64(model, run)?;
    let q = model.num_states() as u128;
    let required = 2 * q * q * q;
    if (run.len() as u128) < required {
        return Err(WocaError::TraceTooShort { required, got: run.len() });
    }
    let qq = (model.num_states() as u64) * (model.num_states() as u64);
    let low_bound = 2 * qq;

    // low case: a configuration repeats within a window staying below
    // 2|Q|^2; scanning with a reset at every high position yields the
    // first repeat, whose interior is duplicate-free
    let mut seen: HashMap<(usize, u64), usize> = HashMap::new();
    let mut low_repeat: Option<(usize, usize)> = None;
    for (idx, c) in run.configs().iter().enumerate() {
        if values[idx] >= low_bound {
            seen.clear();
            continue;
        }
        let key = (model.state_index(&c.state).expect("run state"), values[idx]);
        if let Some(&h) = seen.get(&key) {
            low_repeat = Some((h, idx));
            break;
        }
        seen.insert(key, idx);
    }

    let trace = run.trace();
    let fact = if let Some((h, k)) = low_repeat {
        ShortCycleFactorization {
            r: run.configs()[h].state.clone(),
            s: run.configs()[h].state.clone(),
            x: values[h],
            d: 0,
            alpha: trace.slice(0..h),
            beta: trace.slice(h..k),
            gamma: Trace::empty(),
            theta: Trace::empty(),
            eta: trace.slice(k..trace.len()),
        }
    } else {
        let peak = values
            .iter()
            .position(|&v| v >= low_bound)
            .expect("no low repeat forces a peak at 2|Q|^2");
        // i0: last visit of level |Q|^2 before the peak, then first visits
        // of each level above; mirrored on the way down
        let i0 = (0..=peak).rev().find(|&i| values[i] == qq).expect("level crossed going up");
        let j0 =
            (peak..values.len()).find(|&j| values[j] == qq).expect("level crossed going down");
        let mut ups = vec![i0];
        for level in 1..=qq {
            let pos = (i0..values.len())
                .find(|&i| values[i] == qq + level)
                .expect("unit steps cross every level up to the peak");
            ups.push(pos);
        }
        let mut downs = vec![j0];
        for level in 1..=qq {
            let pos = (0..=j0)
                .rev()
                .find(|&j| values[j] == qq + level)
                .expect("unit steps cross every level down from the peak");
            downs.push(pos);
        }
        let mut by_pair: HashMap<(usize, usize), u64> = HashMap::new();
        let mut found: Option<(u64, u64)> = None;
        for level in 0..=qq {
            let pair = (
                model.state_index(&run.configs()[ups[level as usize]].state).expect("state"),
                model.state_index(&run.configs()[downs[level as usize]].state).expect("state"),
            );
            if let Some(&earlier) = by_pair.get(&pair) {
                found = Some((earlier, level));
                break;
            }
            by_pair.insert(pair, level);
        }
        let (l, l2) = found.expect("|Q|^2 + 1 pairs over |Q|^2 values");
        ShortCycleFactorization {
            r: run.configs()[ups[l as usize]].state.clone(),
            s: run.configs()[downs[l as usize]].state.clone(),
            x: qq + l,
            d: l2 - l,
            alpha: trace.slice(0..ups[l as usize]),
            beta: trace.slice(ups[l as usize]..ups[l2 as usize]),
            gamma: trace.slice(ups[l2 as usize]..downs[l2 as usize]),
            theta: trace.slice(downs[l2 as usize]..downs[l as usize]),
            eta: trace.slice(downs[l as usize]..trace.len()),
        }
    };

    let qcount = model.num_states() as u64;
    if fact.pumped(1) != *run.trace()
        || fact.beta.len() + fact.theta.len() == 0
        || fact.beta.len() + fact.theta.len() > (2 * qcount * qcount * qcount) as usize
        || fact.x + fact.d > 2 * qq
    {
        return Err(WocaError::FactorizationInvalid);
    }
    for id in &fact.gamma.0 {
        if model.transition(id)?.action.is_test() {
            return Err(WocaError::FactorizationInvalid);
        }
    }
    for n in 0..=3u64 {
        if !validate_short_cycle(model, run, &fact, n)? {
            return Err(WocaError::FactorizationInvalid);
        }
    }
    Ok(fact)
}

fn validate_short_cycle<S: Scalar>(
    model: &Tvass<S>,
    run: &Run<S>,
    fact: &ShortCycleFactorization,
    n: u64,
) -> Result<bool, WocaError> {
    let expect = |state: &StateId, value: u64| {
        Configuration::new(state.clone(), vec![from_i64::<S>(value as i64)])
    };
    let mut cur = run.start().clone();
    for (seg, target) in [
        (fact.alpha.clone(), Some(expect(&fact.r, fact.x))),
        (fact.beta.repeat(n), Some(expect(&fact.r, fact.x + n * fact.d))),
        (fact.gamma.clone(), Some(expect(&fact.s, fact.x + n * fact.d))),
        (fact.theta.repeat(n), Some(expect(&fact.s, fact.x))),
        (fact.eta.clone(), Some(run.end().clone())),
    ] {
        match model.apply_trace(&cur, &seg)? {
            Some(next) => {
                if let Some(t) = target {
                    if next != t {
                        return Ok(false);
                    }
                }
                cur = next;
            }
            None => return Ok(false),
        }
    }
    Ok(true)
}

struct BfsNode {
    parent: Option<(usize, usize)>, // arena index, transition index
    depth: u64,
}

/// How a bounded breadth-first search ended.
enum BfsEnd {
    Found(Trace),
    /// The frontier emptied without ever hitting the depth cap: the whole
    /// reachable space was covered.
    ExhaustedSpace,
    /// The frontier emptied, but only because the depth cap cut branches.
    ExhaustedDepth,
    Budget(u64),
}

fn rebuild_trace<S: Scalar>(model: &Tvass<S>, arena: &[BfsNode], mut idx: usize) -> Trace {
    let mut ids = Vec::new();
    while let Some((p, t)) = arena[idx].parent {
        ids.push(model.transitions()[t].id.clone());
        idx = p;
    }
    ids.reverse();
    Trace(ids)
}

fn adjacency<S: Scalar>(model: &Tvass<S>) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); model.num_states()];
    for (i, t) in model.transitions().iter().enumerate() {
        adj[model.state_index(&t.source).expect("valid source")].push(i);
    }
    adj
}

fn unit_delta<S: Scalar>(action: &Action<S>) -> Option<i64> {
    match action {
        Action::Tst => None,
        Action::Add(a) => Some(a[0].to_i64().expect("unit delta")),
    }
}

/// Minimal-length run `p(x) -> q(y)` by breadth-first search. Complete up
/// to the cube bound `(|Q| + x + y)^3`: if any run exists, one shorter
/// than that exists, so exhausting that depth is a decision.
pub fn short_run<S: Scalar>(
    model: &Tvass<S>,
    p: &str,
    x: u64,
    q: &str,
    y: u64,
    cap: Option<u64>,
) -> Result<Search<Trace>, WocaError> {
    check_unit_oca(model)?;
    let p_idx = model.state_index(p).ok_or_else(|| ModelError::BadState(p.to_string()))?;
    let q_idx = model.state_index(q).ok_or_else(|| ModelError::BadState(q.to_string()))?;
    let bound = cube_bound(model.num_states() as u64 + x + y);
    let complete_depth = bound.saturating_sub(1);
    let depth_cap = cap.unwrap_or(complete_depth).min(complete_depth);
    if p_idx == q_idx && x == y {
        return Ok(Search::Found(Trace::empty()));
    }

    let adj = adjacency(model);
    let mut arena: Vec<BfsNode> = vec![BfsNode { parent: None, depth: 0 }];
    let mut keys: Vec<(usize, u64)> = vec![(p_idx, x)];
    let mut visited: HashMap<(usize, u64), usize> = HashMap::new();
    visited.insert((p_idx, x), 0);
    let mut frontier = vec![0usize];
    let mut explored = 0u64;
    let mut truncated = false;
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &cur in &frontier {
            let (state, counter) = keys[cur];
            let depth = arena[cur].depth;
            if depth >= depth_cap {
                truncated = true;
                continue;
            }
            explored += 1;
            if explored > NODE_BUDGET {
                return Ok(Search::Inconclusive { explored });
            }
            for &t_idx in &adj[state] {
                let t = &model.transitions()[t_idx];
                let new_counter = match unit_delta(&t.action) {
                    None => {
                        if counter != 0 {
                            continue;
                        }
                        0
                    }
                    Some(delta) => match counter.checked_add_signed(delta) {
                        Some(c) => c,
                        None => continue,
                    },
                };
                let target = model.state_index(&t.target).expect("valid target");
                let key = (target, new_counter);
                if visited.contains_key(&key) {
                    continue;
                }
                arena.push(BfsNode { parent: Some((cur, t_idx)), depth: depth + 1 });
                keys.push(key);
                let idx = arena.len() - 1;
                visited.insert(key, idx);
                if key == (q_idx, y) {
                    return Ok(Search::Found(rebuild_trace(model, &arena, idx)));
                }
                next.push(idx);
            }
        }
        frontier = next;
    }
    if !truncated || depth_cap >= complete_depth {
        Ok(Search::NoneComplete)
    } else {
        Ok(Search::Inconclusive { explored })
    }
}

fn cube_bound(base: u64) -> u64 {
    let b = base as u128;
    (b * b * b).min(u64::MAX as u128) as u64
}

enum WeightKey {
    Full,
    Mod(u64),
}

/// Weighted product search from `p(0)` for a run to `q(0)` whose total
/// weight satisfies `accept`. The counter along any run from zero stays
/// below the remaining length, so the depth cap keeps the space finite.
fn weighted_bfs<S: Scalar>(
    w: &Woca<S>,
    p: &str,
    q: &str,
    depth_cap: u64,
    key_mode: WeightKey,
    accept: &dyn Fn(i64) -> bool,
) -> Result<BfsEnd, WocaError> {
    let model = w.base();
    let p_idx = model.state_index(p).ok_or_else(|| ModelError::BadState(p.to_string()))?;
    let q_idx = model.state_index(q).ok_or_else(|| ModelError::BadState(q.to_string()))?;

    let key_of = |weight: i64| -> i64 {
        match key_mode {
            WeightKey::Full => weight,
            WeightKey::Mod(m) => weight.rem_euclid(m as i64),
        }
    };
    if p_idx == q_idx && accept(0) {
        return Ok(BfsEnd::Found(Trace::empty()));
    }

    let adj = adjacency(model);
    let mut arena: Vec<BfsNode> = vec![BfsNode { parent: None, depth: 0 }];
    let mut states_at: Vec<(usize, u64)> = vec![(p_idx, 0)];
    let mut weights_at: Vec<i64> = vec![0];
    let mut visited: HashMap<(usize, u64, i64), usize> = HashMap::new();
    visited.insert((p_idx, 0, key_of(0)), 0);
    let mut frontier = vec![0usize];
    let mut explored = 0u64;
    let mut truncated = false;
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &cur in &frontier {
            let (state, counter) = states_at[cur];
            let weight = weights_at[cur];
            let depth = arena[cur].depth;
            if depth >= depth_cap {
                truncated = true;
                continue;
            }
            explored += 1;
            if explored > NODE_BUDGET {
                return Ok(BfsEnd::Budget(explored));
            }
            for &t_idx in &adj[state] {
                let t = &model.transitions()[t_idx];
                let new_counter = match unit_delta(&t.action) {
                    None => {
                        if counter != 0 {
                            continue;
                        }
                        0
                    }
                    Some(delta) => match counter.checked_add_signed(delta) {
                        Some(c) => c,
                        None => continue,
                    },
                };
                let new_weight = weight + w.weights[t_idx] as i64;
                let target = model.state_index(&t.target).expect("valid target");
                let vkey = (target, new_counter, key_of(new_weight));
                if visited.contains_key(&vkey) {
                    continue;
                }
                arena.push(BfsNode { parent: Some((cur, t_idx)), depth: depth + 1 });
                states_at.push((target, new_counter));
                weights_at.push(new_weight);
                let idx = arena.len() - 1;
                visited.insert(vkey, idx);
                if target == q_idx && new_counter == 0 && accept(new_weight) {
                    return Ok(BfsEnd::Found(rebuild_trace(model, &arena, idx)));
                }
                next.push(idx);
            }
        }
        frontier = next;
    }
    Ok(if truncated { BfsEnd::ExhaustedDepth } else { BfsEnd::ExhaustedSpace })
}

/// Default length cap `539 |Q|^9` for signed-cycle searches.
pub fn signed_run_bound(num_states: u64) -> BigInt {
    BigInt::from(539) * BigInt::from(num_states).pow(9)
}

/// Minimal run `p(0) -> q(0)` with total weight of the requested sign.
/// Exhausting the default cap is a complete no; a model without any
/// transition of that weight sign short-circuits to a complete no.
pub fn short_signed_run<S: Scalar>(
    w: &Woca<S>,
    p: &str,
    q: &str,
    sign: i64,
    cap: Option<u64>,
) -> Result<Search<Trace>, WocaError> {
    assert!(sign == 1 || sign == -1, "sign must be +1 or -1");
    if !w.has_weight_sign(sign) {
        return Ok(Search::NoneComplete);
    }
    let complete = signed_run_bound(w.base().num_states() as u64);
    let complete_u64 = complete.to_u64().unwrap_or(u64::MAX);
    let depth_cap = cap.unwrap_or(complete_u64);
    match weighted_bfs(w, p, q, depth_cap, WeightKey::Full, &|total| total * sign > 0)? {
        BfsEnd::Found(t) => Ok(Search::Found(t)),
        BfsEnd::ExhaustedSpace => Ok(Search::NoneComplete),
        BfsEnd::ExhaustedDepth => {
            if depth_cap >= complete_u64 {
                Ok(Search::NoneComplete)
            } else {
                Ok(Search::Inconclusive { explored: depth_cap })
            }
        }
        BfsEnd::Budget(explored) => Ok(Search::Inconclusive { explored }),
    }
}

/// Minimal run `p(0) -> q(0)` whose weight is congruent to `target_w`
/// modulo `m`, of length below `m^2 |Q|^3`. Exhaustion is a complete no
/// whenever `p(0)` and `q(0)` are mutually reachable.
pub fn run_weight_mod<S: Scalar>(
    w: &Woca<S>,
    p: &str,
    q: &str,
    target_w: i64,
    m: u64,
) -> Result<Search<Trace>, WocaError> {
    assert!(m >= 1, "modulus must be positive");
    let qn = w.base().num_states() as u128;
    let depth_cap =
        ((m as u128) * (m as u128) * qn * qn * qn).saturating_sub(1).min(u64::MAX as u128) as u64;
    let residue = target_w.rem_euclid(m as i64);
    match weighted_bfs(w, p, q, depth_cap, WeightKey::Mod(m), &|total| {
        total.rem_euclid(m as i64) == residue
    })? {
        BfsEnd::Found(t) => Ok(Search::Found(t)),
        // the depth cap is the completeness bound itself
        BfsEnd::ExhaustedSpace | BfsEnd::ExhaustedDepth => Ok(Search::NoneComplete),
        BfsEnd::Budget(explored) => Ok(Search::Inconclusive { explored }),
    }
}

/// A reachability-with-weight certificate: `p(0) -a b^n-> q(0)` with
/// total weight `w`, where `b` is a cycle on `q(0)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightCertificate {
    pub alpha: Trace,
    pub beta: Trace,
    pub n: u64,
    pub w: i64,
}

impl WeightCertificate {
    pub fn concrete_trace(&self) -> Trace {
        self.alpha.concat(&self.beta.repeat(self.n))
    }
}

/// Builds a weight certificate for `target_w`, assuming `p(0) ->* q(0)`
/// with that weight and `q(0) ->* p(0)` (caller-established).
///
/// Construction: fix short positive and negative cycles on `q(0)` where
/// they exist, pick the modulus from their weights, fetch a short run
/// with the right residue whose weight error has a pumpable sign, and
/// compensate by iterating one cycle. The result is revalidated by
/// replay and weight recomputation.
pub fn weight_certificate<S: Scalar>(
    w: &Woca<S>,
    p: &str,
    q: &str,
    target_w: i64,
) -> Result<WeightCertificate, WocaError> {
    let pos = short_signed_run(w, q, q, 1, None)?;
    let neg = short_signed_run(w, q, q, -1, None)?;

    // case analysis on the available cycles; an inconclusive side is
    // treated as absent first (sound: every result replays) and only
    // reported when all routes fail
    let mut attempts: Vec<AttemptKind> = Vec::new();
    match (&pos, &neg) {
        (Search::Found(b), Search::Found(t)) => {
            attempts.push(AttemptKind::Both(b.clone(), t.clone()));
        }
        (Search::Found(b), _) => attempts.push(AttemptKind::PosOnly(b.clone())),
        (_, Search::Found(t)) => attempts.push(AttemptKind::NegOnly(t.clone())),
        _ => {}
    }
    attempts.push(AttemptKind::Exact);

    let mut inconclusive: Option<&'static str> = None;
    if matches!(pos, Search::Inconclusive { .. }) {
        inconclusive = Some("positive cycle");
    }
    if matches!(neg, Search::Inconclusive { .. }) {
        inconclusive = Some("negative cycle");
    }

    for attempt in attempts {
        match try_weight_certificate(w, p, q, target_w, &attempt)? {
            Some(cert) => {
                validate_weight_certificate(w, p, q, &cert)?;
                return Ok(cert);
            }
            None => continue,
        }
    }
    match inconclusive {
        Some(which) => Err(WocaError::SubSearchInconclusive(which)),
        None => Err(WocaError::SubSearchEmpty("residue path")),
    }
}

enum AttemptKind {
    Both(Trace, Trace),
    PosOnly(Trace),
    NegOnly(Trace),
    Exact,
}

fn try_weight_certificate<S: Scalar>(
    w: &Woca<S>,
    p: &str,
    q: &str,
    target_w: i64,
    attempt: &AttemptKind,
) -> Result<Option<WeightCertificate>, WocaError> {
    let (modulus, accept): (u64, Box<dyn Fn(i64) -> bool>) = match attempt {
        AttemptKind::Exact => (1, Box::new(move |v: i64| v == target_w)),
        AttemptKind::PosOnly(b) => {
            let m = w.weight(b)?;
            debug_assert!(m > 0);
            (m as u64, Box::new(move |v: i64| v <= target_w && (target_w - v) % m == 0))
        }
        AttemptKind::NegOnly(t) => {
            let m = -w.weight(t)?;
            debug_assert!(m > 0);
            (m as u64, Box::new(move |v: i64| v >= target_w && (v - target_w) % m == 0))
        }
        AttemptKind::Both(b, t) => {
            let m = -w.weight(b)? * w.weight(t)?;
            debug_assert!(m > 0);
            (m as u64, Box::new(move |v: i64| (target_w - v).rem_euclid(m) == 0))
        }
    };
    let qn = w.base().num_states() as u128;
    let depth_cap = ((modulus as u128) * (modulus as u128) * qn * qn * qn)
        .saturating_sub(1)
        .min(u64::MAX as u128) as u64;
    let alpha = match weighted_bfs(w, p, q, depth_cap, WeightKey::Full, accept.as_ref())? {
        BfsEnd::Found(t) => t,
        BfsEnd::ExhaustedSpace | BfsEnd::ExhaustedDepth => return Ok(None),
        BfsEnd::Budget(_) => return Ok(None),
    };

    let u = target_w - w.weight(&alpha)?;
    let (beta, n) = if u == 0 {
        (Trace::empty(), 0)
    } else if u > 0 {
        let b = match attempt {
            AttemptKind::Both(b, _) | AttemptKind::PosOnly(b) => b.clone(),
            _ => return Ok(None),
        };
        let lb = w.weight(&b)?;
        debug_assert!(lb > 0 && u % lb == 0);
        (b, (u / lb) as u64)
    } else {
        let t = match attempt {
            AttemptKind::Both(_, t) | AttemptKind::NegOnly(t) => t.clone(),
            _ => return Ok(None),
        };
        let lt = w.weight(&t)?;
        debug_assert!(lt < 0 && u % lt == 0);
        (t, (u / lt) as u64)
    };
    Ok(Some(WeightCertificate { alpha, beta, n, w: target_w }))
}

fn validate_weight_certificate<S: Scalar>(
    w: &Woca<S>,
    p: &str,
    q: &str,
    cert: &WeightCertificate,
) -> Result<(), WocaError> {
    let start = Configuration::new(p.to_string(), vec![S::zero()]);
    let end = w.base().apply_trace(&start, &cert.concrete_trace())?;
    let ok_end = matches!(&end, Some(c) if c.state == q && c.counters[0].is_zero());
    if !ok_end || w.weight(&cert.concrete_trace())? != cert.w {
        return Err(WocaError::FactorizationInvalid);
    }
    if !cert.beta.is_empty() {
        let at_q = Configuration::new(q.to_string(), vec![S::zero()]);
        let back = w.base().apply_trace(&at_q, &cert.beta)?;
        if back != Some(at_q) {
            return Err(WocaError::FactorizationInvalid);
        }
    }
    let size = BigInt::from(cert.alpha.len() + cert.beta.len());
    let cap = BigInt::from(2 * w.base().num_states() as u64).pow(CERT_SIZE_EXPONENT);
    assert!(size <= cap, "certificate exceeds its size cap");
    Ok(())
}
