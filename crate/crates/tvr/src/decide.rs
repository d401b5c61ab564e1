//! Deciders for reachability, boundedness and termination of
//! two-counter models with zero-tests on the first counter, together
//! with the witness types they emit and the validators for those
//! witnesses.
//!
//! Verdicts are three-valued. A yes always carries a certificate that
//! replays; a no carries the caps under which the exploration provably
//! closed; everything else is an explicit unknown. The constants hidden
//! in the underlying size bounds are exposed as options defaulting
//! to 1, which is not known to be complete, so the deciders never rest
//! a yes or no on them alone.

use std::collections::{HashMap, HashSet, VecDeque};

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use thiserror::Error;

use crate::lps::{eval_counts, CountedLps, LinearPathScheme, LpsError};
use crate::model::{
    norm, vec_ge, vec_sub, Configuration, ModelError, Run, StateId, Trace, Tvass,
};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecideError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Lps(#[from] LpsError),
    #[error("decider requires a two-dimensional model, got dimension {0}")]
    WrongDimension(usize),
    #[error("malformed witness: {0}")]
    MalformedWitness(String),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub explored: u64,
    pub peak_frontier: u64,
}

impl SearchStats {
    fn absorb(&mut self, other: &SearchStats) {
        self.explored += other.explored;
        self.peak_frontier = self.peak_frontier.max(other.peak_frontier);
    }
}

/// A reachability certificate: either a raw trace or a counted scheme.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate {
    Trace(Trace),
    Lps(CountedLps),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReachOutcome {
    Reachable(Certificate),
    Unreachable,
    Unknown(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReachVerdict {
    pub outcome: ReachOutcome,
    pub caps: String,
    pub stats: SearchStats,
}

impl ReachVerdict {
    pub fn is_reachable(&self) -> bool {
        matches!(self.outcome, ReachOutcome::Reachable(_))
    }

    pub fn is_unreachable(&self) -> bool {
        matches!(self.outcome, ReachOutcome::Unreachable)
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self.outcome, ReachOutcome::Unknown(_))
    }
}

/// A pumpable suffix certifying unboundedness: replay `prefix` from the
/// initial configuration, then iterate `pump` forever.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnboundedWitness {
    pub prefix: Trace,
    pub pump: Trace,
}

/// A configuration that repeats exactly: a certificate of nontermination
/// in the bounded case.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lasso {
    pub prefix: Trace,
    pub cycle: Trace,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NontermWitness {
    Pump(UnboundedWitness),
    Lasso(Lasso),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoundedOutcome {
    Bounded { reachable: u64 },
    Unbounded(UnboundedWitness),
    Unknown(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundedVerdict {
    pub outcome: BoundedOutcome,
    pub caps: String,
    pub stats: SearchStats,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TermOutcome {
    Terminating { reachable: u64 },
    Nonterminating(NontermWitness),
    Unknown(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermVerdict {
    pub outcome: TermOutcome,
    pub caps: String,
    pub stats: SearchStats,
}

/// Options for [`reach`].
#[derive(Debug, Clone)]
pub struct ReachOpts {
    pub cap_norm: u32,
    pub cap_steps: u64,
    /// Constant plugged into the short-path bound; `None` skips the
    /// second, bound-guided phase.
    pub bound_const: Option<u32>,
    /// Hard expansion budget for the second phase.
    pub phase2_budget: u64,
}

impl Default for ReachOpts {
    fn default() -> Self {
        ReachOpts { cap_norm: 512, cap_steps: 500_000, bound_const: Some(1), phase2_budget: 2_000_000 }
    }
}

/// Options for [`bounded`] and [`terminates`].
#[derive(Debug, Clone)]
pub struct BoundedOpts {
    pub pump_depth: usize,
    pub pump_budget: u64,
    pub closure_budget: u64,
    pub bound_const: Option<u32>,
}

impl Default for BoundedOpts {
    fn default() -> Self {
        BoundedOpts { pump_depth: 400, pump_budget: 300_000, closure_budget: 400_000, bound_const: Some(1) }
    }
}

fn require_dim2<S: Scalar>(model: &Tvass<S>) -> Result<(), DecideError> {
    if model.dimension() != 2 {
        return Err(DecideError::WrongDimension(model.dimension()));
    }
    Ok(())
}

// ---------------------------------------------------------------------
// closure exploration

struct ClosureSet<S> {
    nodes: Vec<(usize, Vec<S>)>,
    parents: Vec<Option<(usize, usize)>>,
    index: HashMap<(usize, Vec<S>), usize>,
    /// frontier emptied
    closed: bool,
    /// some successor was dropped by the norm cap
    pruned: bool,
    budget_hit: bool,
    stats: SearchStats,
    found: Option<usize>,
}

type TargetFn<'a, S> = &'a dyn Fn(usize, &[S]) -> bool;

fn explore<S: Scalar>(
    model: &Tvass<S>,
    from: &Configuration<S>,
    norm_cap: Option<&BigInt>,
    budget: u64,
    target: Option<TargetFn<'_, S>>,
) -> Result<ClosureSet<S>, DecideError> {
    model.validate_config(from)?;
    let adj = adjacency(model);
    let root_state = model.state_index(&from.state).expect("validated state");
    let root = (root_state, from.counters.clone());

    let mut closure = ClosureSet {
        nodes: vec![root.clone()],
        parents: vec![None],
        index: HashMap::from([(root, 0usize)]),
        closed: false,
        pruned: false,
        budget_hit: false,
        stats: SearchStats::default(),
        found: None,
    };
    if let Some(t) = target {
        if t(root_state, &from.counters) {
            closure.found = Some(0);
            return Ok(closure);
        }
    }

    let mut queue = VecDeque::from([0usize]);
    while let Some(cur) = queue.pop_front() {
        closure.stats.explored += 1;
        if closure.stats.explored > budget {
            closure.budget_hit = true;
            return Ok(closure);
        }
        let (state, counters) = closure.nodes[cur].clone();
        let from_cfg = Configuration::new(model.states()[state].clone(), counters);
        for &t_idx in &adj[state] {
            let t = &model.transitions()[t_idx];
            let next = match model.step_unchecked(&from_cfg, t) {
                Some(c) => c,
                None => continue,
            };
            if let Some(cap) = norm_cap {
                if next.norm().to_big() > *cap {
                    closure.pruned = true;
                    continue;
                }
            }
            let key = (model.state_index(&next.state).expect("valid target"), next.counters);
            if closure.index.contains_key(&key) {
                continue;
            }
            closure.nodes.push(key.clone());
            closure.parents.push(Some((cur, t_idx)));
            let idx = closure.nodes.len() - 1;
            closure.index.insert(key.clone(), idx);
            if let Some(tgt) = target {
                if tgt(key.0, &key.1) {
                    closure.found = Some(idx);
                    return Ok(closure);
                }
            }
            queue.push_back(idx);
        }
        closure.stats.peak_frontier = closure.stats.peak_frontier.max(queue.len() as u64);
    }
    closure.closed = true;
    Ok(closure)
}

fn adjacency<S: Scalar>(model: &Tvass<S>) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); model.num_states()];
    for (i, t) in model.transitions().iter().enumerate() {
        adj[model.state_index(&t.source).expect("valid source")].push(i);
    }
    adj
}

fn trace_to<S: Scalar>(model: &Tvass<S>, closure: &ClosureSet<S>, mut idx: usize) -> Trace {
    let mut ids = Vec::new();
    while let Some((p, t)) = closure.parents[idx] {
        ids.push(model.transitions()[t].id.clone());
        idx = p;
    }
    ids.reverse();
    Trace(ids)
}

// ---------------------------------------------------------------------
// reachability

/// Combined forward and backward search under shared caps. The backward
/// pass explores the reversed model from the target, whose closure is
/// the exact set of configurations that can reach it.
fn bidirectional_reach<S: Scalar>(
    model: &Tvass<S>,
    from: &Configuration<S>,
    to: &Configuration<S>,
    norm_cap: Option<&BigInt>,
    budget: u64,
) -> Result<(ReachOutcome, SearchStats), DecideError> {
    model.validate_config(from)?;
    model.validate_config(to)?;
    let to_state = model.state_index(&to.state).expect("validated state");
    let fwd_target = |s: usize, c: &[S]| s == to_state && c == to.counters.as_slice();
    let forward = explore(model, from, norm_cap, budget, Some(&fwd_target))?;
    let mut stats = forward.stats.clone();
    if let Some(idx) = forward.found {
        let outcome =
            ReachOutcome::Reachable(Certificate::Trace(trace_to(model, &forward, idx)));
        return Ok((outcome, stats));
    }
    if forward.closed && !forward.pruned {
        return Ok((ReachOutcome::Unreachable, stats));
    }

    let reversed = model.reverse();
    let from_state = reversed.state_index(&from.state).expect("same states");
    let bwd_target = |s: usize, c: &[S]| s == from_state && c == from.counters.as_slice();
    let backward = explore(&reversed, to, norm_cap, budget, Some(&bwd_target))?;
    stats.absorb(&backward.stats);
    let outcome = match backward.found {
        Some(idx) => {
            let trace = trace_to(&reversed, &backward, idx)
                .unmirror()
                .expect("reversed traces unmirror");
            debug_assert_eq!(
                model.apply_trace(from, &trace).expect("valid ids").as_ref(),
                Some(to)
            );
            ReachOutcome::Reachable(Certificate::Trace(trace))
        }
        None if backward.closed && !backward.pruned => ReachOutcome::Unreachable,
        None if forward.budget_hit || backward.budget_hit => {
            ReachOutcome::Unknown("step budget exhausted in both directions".into())
        }
        None => ReachOutcome::Unknown("both explorations pruned by the norm cap".into()),
    };
    Ok((outcome, stats))
}

/// Ground-truth breadth-first reachability under explicit caps, run
/// forward from the source and, if that is inconclusive, backward from
/// the target in the reversed model. A yes carries a minimal trace; a
/// no is only reported when one of the explorations closed strictly
/// inside the norm cap with budget to spare.
pub fn oracle_reach<S: Scalar>(
    model: &Tvass<S>,
    from: &Configuration<S>,
    to: &Configuration<S>,
    cap_norm: u32,
    cap_steps: u64,
) -> Result<ReachVerdict, DecideError> {
    let cap = BigInt::from(cap_norm);
    let (outcome, stats) = bidirectional_reach(model, from, to, Some(&cap), cap_steps)?;
    let caps = format!("norm<={cap_norm}, steps<={cap_steps}, both directions");
    Ok(ReachVerdict { outcome, caps, stats })
}

/// Exponential path-length bound `(|Q| + |x| + |y| + |S|)^(c |Q|^3)` on
/// minimal witnesses.
pub fn short_path_bound<S: Scalar>(model: &Tvass<S>, x: &[S], y: &[S], c: u32) -> BigInt {
    let q = model.num_states() as u64;
    let base = BigInt::from(q) + norm(x).to_big() + norm(y).to_big() + model.action_norm().to_big();
    let exponent = (c as u64) * q * q * q;
    pow_big(&base, exponent)
}

fn pow_big(base: &BigInt, exponent: u64) -> BigInt {
    match u32::try_from(exponent) {
        Ok(e) => base.pow(e),
        // the true value would not fit in memory; saturate past any budget
        Err(_) => BigInt::from(u64::MAX),
    }
}

/// Layered reachability decider. Phase one is the capped oracle; on an
/// unknown, phase two re-explores under caps derived from the short-path
/// bound, turning an unpruned closure into a sound no. Every yes is
/// downgraded to a counted-scheme certificate and revalidated.
pub fn reach<S: Scalar>(
    model: &Tvass<S>,
    from: &Configuration<S>,
    to: &Configuration<S>,
    opts: &ReachOpts,
) -> Result<ReachVerdict, DecideError> {
    require_dim2(model)?;
    let mut verdict = oracle_reach(model, from, to, opts.cap_norm, opts.cap_steps)?;
    if let ReachOutcome::Unknown(_) = &verdict.outcome {
        if let Some(c) = opts.bound_const {
            let bound = short_path_bound(model, &from.counters, &to.counters, c);
            let norm_cap = norm(&from.counters).to_big()
                + norm(&to.counters).to_big()
                + &bound * model.action_norm().to_big();
            let budget = bound.to_u64().unwrap_or(u64::MAX).min(opts.phase2_budget);
            let (outcome, phase2_stats) =
                bidirectional_reach(model, from, to, Some(&norm_cap), budget)?;
            let caps =
                format!("phase2: norm<=|x|+|y|+B*|S| with B=({c})-bound, steps<={budget}");
            let mut stats = verdict.stats.clone();
            stats.absorb(&phase2_stats);
            verdict = ReachVerdict { outcome, caps, stats };
        }
    }
    // downgrade any yes to a validated counted scheme
    if let ReachOutcome::Reachable(Certificate::Trace(trace)) = &verdict.outcome {
        let run = Run::replay(model, from.clone(), trace)?
            .expect("oracle traces replay");
        let cert = extract_lps(model, &run)?;
        if !check_certificate(model, from, to, &Certificate::Lps(cert.clone()))? {
            return Err(DecideError::MalformedWitness(
                "extracted scheme certificate failed validation".into(),
            ));
        }
        verdict.outcome = ReachOutcome::Reachable(Certificate::Lps(cert));
    }
    Ok(verdict)
}

/// Replays a certificate and compares the endpoint. Malformed
/// certificates are errors, failed replays are `false`.
pub fn check_certificate<S: Scalar>(
    model: &Tvass<S>,
    from: &Configuration<S>,
    to: &Configuration<S>,
    cert: &Certificate,
) -> Result<bool, DecideError> {
    model.validate_config(from)?;
    model.validate_config(to)?;
    match cert {
        Certificate::Trace(trace) => {
            Ok(model.apply_trace(from, trace)?.as_ref() == Some(to))
        }
        Certificate::Lps(counted) => {
            if counted.counts.len() != counted.scheme.star_len() {
                return Err(DecideError::MalformedWitness("count arity mismatch".into()));
            }
            if *counted.scheme.start_state() != from.state {
                return Ok(false);
            }
            Ok(eval_counts(model, counted, &from.counters)?.as_ref() == Some(to))
        }
    }
}

/// Compresses a run into a counted scheme by greedy detection of
/// adjacent repeated cycles: at each position the candidate with the
/// most repeats wins (shortest cycle on ties), and only blocks repeating
/// at least twice become starred cycles.
pub fn extract_lps<S: Scalar>(model: &Tvass<S>, run: &Run<S>) -> Result<CountedLps, DecideError> {
    let trace = &run.trace().0;
    let n = trace.len();
    let mut alphas: Vec<Trace> = Vec::new();
    let mut betas: Vec<Trace> = Vec::new();
    let mut counts: Vec<u64> = Vec::new();
    let mut pending: Vec<String> = Vec::new();
    let mut i = 0usize;
    while i < n {
        let mut best: Option<(usize, u64)> = None; // (cycle len, repeats)
        let mut len = 1;
        while i + 2 * len <= n {
            let (first, rest) = trace[i..].split_at(len);
            let mut repeats = 1u64;
            for chunk in rest.chunks_exact(len) {
                if chunk != first {
                    break;
                }
                repeats += 1;
            }
            if repeats >= 2 {
                let better = match best {
                    None => true,
                    Some((_, r)) => repeats > r,
                };
                if better {
                    best = Some((len, repeats));
                }
            }
            len += 1;
        }
        match best {
            Some((len, repeats)) => {
                alphas.push(Trace(std::mem::take(&mut pending)));
                betas.push(Trace(trace[i..i + len].to_vec()));
                counts.push(repeats);
                i += len * repeats as usize;
            }
            None => {
                pending.push(trace[i].clone());
                i += 1;
            }
        }
    }
    alphas.push(Trace(pending));
    let scheme =
        LinearPathScheme::with_anchor(model, alphas, betas, run.start().state.clone())?;
    Ok(CountedLps::new(scheme, counts)?)
}

// ---------------------------------------------------------------------
// run factorization at zero levels

/// One factor of a run split at the configurations whose first counter
/// is zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RunFactor {
    /// A segment without zero-tests.
    TestFree(Trace),
    /// A single zero-test step.
    TestStep(String),
    /// A maximal block starting and ending at the same state with the
    /// first counter zero at both ends.
    VerticalLoop { state: StateId, trace: Trace },
}

/// Splits a run into at most `2|Q| + 1` factors: test-free segments,
/// single zero-test steps, and vertical loops obtained by merging blocks
/// anchored at a repeated state.
pub fn vertical_loop_factors<S: Scalar>(
    model: &Tvass<S>,
    run: &Run<S>,
) -> Result<Vec<RunFactor>, DecideError> {
    require_dim2(model)?;
    let trace = run.trace();
    let has_test = trace
        .0
        .iter()
        .map(|id| model.transition(id))
        .collect::<Result<Vec<_>, _>>()?
        .iter()
        .any(|t| t.action.is_test());
    if !has_test {
        return Ok(if trace.is_empty() {
            Vec::new()
        } else {
            vec![RunFactor::TestFree(trace.clone())]
        });
    }

    let zero_positions: Vec<usize> = run
        .configs()
        .iter()
        .enumerate()
        .filter(|(_, c)| c.counters[0].is_zero())
        .map(|(i, _)| i)
        .collect();
    let states: Vec<&StateId> = zero_positions.iter().map(|&i| &run.configs()[i].state).collect();

    let mut factors = Vec::new();
    let push_segment = |lo: usize, hi: usize, factors: &mut Vec<RunFactor>| {
        if lo == hi {
            return;
        }
        let seg = trace.slice(lo..hi);
        if seg.len() == 1 {
            let id = &seg.0[0];
            if model.transition(id).expect("checked above").action.is_test() {
                factors.push(RunFactor::TestStep(id.clone()));
                return;
            }
        }
        factors.push(RunFactor::TestFree(seg));
    };

    push_segment(0, zero_positions[0], &mut factors);
    let mut t = 0usize;
    while t < zero_positions.len() {
        let anchor = states[t];
        let last = (t..zero_positions.len()).rev().find(|&u| states[u] == anchor).unwrap_or(t);
        if last > t {
            factors.push(RunFactor::VerticalLoop {
                state: anchor.clone(),
                trace: trace.slice(zero_positions[t]..zero_positions[last]),
            });
        }
        if last + 1 < zero_positions.len() {
            push_segment(zero_positions[last], zero_positions[last + 1], &mut factors);
        }
        t = last + 1;
    }
    push_segment(*zero_positions.last().expect("nonempty"), trace.len(), &mut factors);
    Ok(factors)
}

// ---------------------------------------------------------------------
// vertical-loop difference sets

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DxSet {
    pub members: std::collections::BTreeSet<u64>,
    /// Every membership query up to the cap was decided conclusively.
    pub conclusive: bool,
}

#[derive(Debug, Clone)]
pub struct DxOpts {
    pub cap_d: u64,
    pub cap_norm: u32,
    pub cap_steps: u64,
}

impl Default for DxOpts {
    fn default() -> Self {
        DxOpts { cap_d: 12, cap_norm: 200, cap_steps: 200_000 }
    }
}

/// The set of differences `d <= cap_d` with `q(0, x) ->* q(0, x + d)`,
/// each membership decided by the capped oracle.
pub fn compute_dx<S: Scalar>(
    model: &Tvass<S>,
    q: &str,
    x: u64,
    opts: &DxOpts,
) -> Result<DxSet, DecideError> {
    require_dim2(model)?;
    let mut members = std::collections::BTreeSet::new();
    let mut conclusive = true;
    for d in 0..=opts.cap_d {
        let from = Configuration::new(q.to_string(), vec![S::zero(), crate::scalar::from_u64(x)]);
        let to =
            Configuration::new(q.to_string(), vec![S::zero(), crate::scalar::from_u64(x + d)]);
        let verdict = oracle_reach(model, &from, &to, opts.cap_norm, opts.cap_steps)?;
        match verdict.outcome {
            ReachOutcome::Reachable(_) => {
                members.insert(d);
            }
            ReachOutcome::Unreachable => {}
            ReachOutcome::Unknown(_) => conclusive = false,
        }
    }
    Ok(DxSet { members, conclusive })
}

#[derive(Debug, Clone)]
pub struct DxTable {
    pub sets: Vec<DxSet>,
    /// First `x` whose set equals all later computed sets. A conjecture:
    /// nothing beyond the computed range is claimed.
    pub conjectured_threshold: Option<u64>,
}

pub fn dx_table<S: Scalar>(
    model: &Tvass<S>,
    q: &str,
    x_max: u64,
    opts: &DxOpts,
) -> Result<DxTable, DecideError> {
    let sets: Vec<DxSet> = (0..=x_max)
        .map(|x| compute_dx::<S>(model, q, x, opts))
        .collect::<Result<_, _>>()?;
    let conjectured_threshold = (0..sets.len())
        .find(|&t| sets[t..].windows(2).all(|w| w[0].members == w[1].members))
        .filter(|&t| t + 1 < sets.len())
        .map(|t| t as u64);
    Ok(DxTable { sets, conjectured_threshold })
}

#[derive(Debug, Clone)]
pub struct IncreasingCycleOpts {
    pub max_h: u64,
    pub cap_norm: u32,
    pub cap_steps: u64,
}

impl Default for IncreasingCycleOpts {
    fn default() -> Self {
        IncreasingCycleOpts { max_h: 16, cap_norm: 200, cap_steps: 200_000 }
    }
}

/// Smallest `h` with a run `q(0, h) ->* q(0, h + m)` for some `m > 0`,
/// together with a witness trace found by breadth-first search.
pub fn find_increasing_cycle<S: Scalar>(
    model: &Tvass<S>,
    q: &str,
    opts: &IncreasingCycleOpts,
) -> Result<Option<(u64, Trace, u64)>, DecideError> {
    require_dim2(model)?;
    let q_idx = model
        .state_index(q)
        .ok_or_else(|| ModelError::BadState(q.to_string()))?;
    for h in 0..=opts.max_h {
        let from =
            Configuration::new(q.to_string(), vec![S::zero(), crate::scalar::from_u64(h)]);
        let floor: S = crate::scalar::from_u64(h);
        let target = |s: usize, c: &[S]| s == q_idx && c[0].is_zero() && c[1] > floor;
        let closure =
            explore(model, &from, Some(&BigInt::from(opts.cap_norm)), opts.cap_steps, Some(&target))?;
        if let Some(idx) = closure.found {
            let gain = closure.nodes[idx].1[1].clone() - floor;
            let m = gain.to_u64().expect("gain under the norm cap");
            return Ok(Some((h, trace_to(model, &closure, idx), m)));
        }
    }
    Ok(None)
}

// ---------------------------------------------------------------------
// boundedness and termination

/// Polynomial bound `(1 + |x|) (|Q| + |S|)^(c |Q|^3)` on reachable
/// configurations of a bounded model.
pub fn boundedness_bound<S: Scalar>(model: &Tvass<S>, x: &[S], c: u32) -> BigInt {
    let q = model.num_states() as u64;
    let base = BigInt::from(q) + model.action_norm().to_big();
    let exponent = (c as u64) * q * q * q;
    (BigInt::from(1) + norm(x).to_big()) * pow_big(&base, exponent)
}

/// Depth-first search for a pumpable suffix: an ancestor on the current
/// path at the same state that the current configuration dominates,
/// with the first counter either exactly preserved or grown along a
/// test-free segment.
fn find_pump<S: Scalar>(
    model: &Tvass<S>,
    from: &Configuration<S>,
    depth_cap: usize,
    budget: u64,
    stats: &mut SearchStats,
) -> Result<Option<UnboundedWitness>, DecideError> {
    model.validate_config(from)?;
    let adj = adjacency(model);
    let is_test: Vec<bool> = model.transitions().iter().map(|t| t.action.is_test()).collect();

    struct Frame {
        state: usize,
        counters_idx: usize,
        next: usize, // next adjacency position to try
    }
    let root_state = model.state_index(&from.state).expect("validated");
    let mut path_cfgs: Vec<(usize, Vec<S>)> = vec![(root_state, from.counters.clone())];
    let mut path_trace: Vec<usize> = Vec::new();
    let mut tests_prefix: Vec<u32> = vec![0];
    let mut visited: HashSet<(usize, Vec<S>)> = HashSet::new();
    visited.insert(path_cfgs[0].clone());
    let mut stack = vec![Frame { state: root_state, counters_idx: 0, next: 0 }];
    let mut expanded = 0u64;

    while let Some(frame) = stack.last_mut() {
        let state = frame.state;
        let pos = frame.counters_idx;
        let Some(&t_idx) = adj[state].get(frame.next) else {
            stack.pop();
            if !path_trace.is_empty() {
                path_trace.pop();
                path_cfgs.pop();
                tests_prefix.pop();
            }
            continue;
        };
        frame.next += 1;

        if stack.len() > depth_cap {
            continue;
        }
        expanded += 1;
        stats.explored += 1;
        if expanded > budget {
            return Ok(None);
        }

        let t = &model.transitions()[t_idx];
        let cur_cfg = Configuration::new(
            model.states()[path_cfgs[pos].0].clone(),
            path_cfgs[pos].1.clone(),
        );
        let next_cfg = match model.step_unchecked(&cur_cfg, t) {
            Some(c) => c,
            None => continue,
        };
        let next_state = model.state_index(&next_cfg.state).expect("valid target");
        let next_key = (next_state, next_cfg.counters.clone());

        let next_tests = tests_prefix[pos] + u32::from(is_test[t_idx]);
        path_cfgs.push(next_key.clone());
        path_trace.push(t_idx);
        tests_prefix.push(next_tests);

        // scan ancestors for a dominated anchor
        for a in (0..path_cfgs.len() - 1).rev() {
            let (astate, acnt) = &path_cfgs[a];
            if *astate != next_state || acnt == &next_cfg.counters {
                continue;
            }
            if !vec_ge(&next_cfg.counters, acnt) {
                continue;
            }
            let same_first = next_cfg.counters[0] == acnt[0];
            let segment_test_free = tests_prefix[path_cfgs.len() - 1] == tests_prefix[a];
            if same_first || segment_test_free {
                let prefix = Trace(
                    path_trace[..a].iter().map(|&i| model.transitions()[i].id.clone()).collect(),
                );
                let pump = Trace(
                    path_trace[a..].iter().map(|&i| model.transitions()[i].id.clone()).collect(),
                );
                let witness = UnboundedWitness { prefix, pump };
                if check_unbounded_witness(model, from, &witness)? {
                    return Ok(Some(witness));
                }
            }
        }

        if visited.contains(&next_key) {
            path_cfgs.pop();
            path_trace.pop();
            tests_prefix.pop();
            continue;
        }
        visited.insert(next_key.clone());
        stack.push(Frame { state: next_state, counters_idx: path_cfgs.len() - 1, next: 0 });
    }
    Ok(None)
}

fn bounded_with_closure<S: Scalar>(
    model: &Tvass<S>,
    from: &Configuration<S>,
    opts: &BoundedOpts,
) -> Result<(BoundedVerdict, Option<ClosureSet<S>>), DecideError> {
    require_dim2(model)?;
    model.validate_config(from)?;
    let mut stats = SearchStats::default();
    if let Some(witness) = find_pump(model, from, opts.pump_depth, opts.pump_budget, &mut stats)? {
        let caps = format!("pump search: depth<={}, budget<={}", opts.pump_depth, opts.pump_budget);
        return Ok((
            BoundedVerdict { outcome: BoundedOutcome::Unbounded(witness), caps, stats },
            None,
        ));
    }

    let bound = opts.bound_const.map(|c| boundedness_bound(model, &from.counters, c));
    let closure = explore(model, from, None, opts.closure_budget, None)?;
    stats.absorb(&closure.stats);
    let caps = format!(
        "pump search depth<={} budget<={}; closure budget<={}{}",
        opts.pump_depth,
        opts.pump_budget,
        opts.closure_budget,
        match &bound {
            Some(b) => format!("; bound B={b}"),
            None => String::new(),
        }
    );

    if closure.closed {
        // genuinely finite reachable set; no bound needed
        let reachable = closure.nodes.len() as u64;
        return Ok((
            BoundedVerdict {
                outcome: BoundedOutcome::Bounded { reachable },
                caps,
                stats,
            },
            Some(closure),
        ));
    }

    // budget ran out; a configuration past the bound suggests
    // unboundedness, so escalate the pump search once before giving up
    let excess = bound
        .as_ref()
        .and_then(|b| closure.nodes.iter().find(|(_, c)| norm(c).to_big() > *b));
    if excess.is_some() {
        if let Some(witness) =
            find_pump(model, from, opts.pump_depth * 2, opts.pump_budget * 2, &mut stats)?
        {
            return Ok((
                BoundedVerdict { outcome: BoundedOutcome::Unbounded(witness), caps, stats },
                None,
            ));
        }
        return Ok((
            BoundedVerdict {
                outcome: BoundedOutcome::Unknown(
                    "a reachable configuration exceeds the boundedness bound but no pump witness was found within budget".into(),
                ),
                caps,
                stats,
            },
            None,
        ));
    }
    Ok((
        BoundedVerdict {
            outcome: BoundedOutcome::Unknown("closure budget exhausted".into()),
            caps,
            stats,
        },
        None,
    ))
}

/// Boundedness decider: a pump witness certifies unboundedness; a closed
/// exploration certifies boundedness with the exact reachable count.
pub fn bounded<S: Scalar>(
    model: &Tvass<S>,
    from: &Configuration<S>,
    opts: &BoundedOpts,
) -> Result<BoundedVerdict, DecideError> {
    Ok(bounded_with_closure(model, from, opts)?.0)
}

/// Termination decider. Unbounded models never terminate (the pump gives
/// an infinite run); bounded ones terminate exactly when the finite
/// reachable set carries no cycle, and a found cycle becomes a lasso.
pub fn terminates<S: Scalar>(
    model: &Tvass<S>,
    from: &Configuration<S>,
    opts: &BoundedOpts,
) -> Result<TermVerdict, DecideError> {
    let (verdict, closure) = bounded_with_closure(model, from, opts)?;
    let caps = verdict.caps.clone();
    let mut stats = verdict.stats.clone();
    match verdict.outcome {
        BoundedOutcome::Unbounded(witness) => Ok(TermVerdict {
            outcome: TermOutcome::Nonterminating(NontermWitness::Pump(witness)),
            caps,
            stats,
        }),
        BoundedOutcome::Unknown(reason) => {
            Ok(TermVerdict { outcome: TermOutcome::Unknown(reason), caps, stats })
        }
        BoundedOutcome::Bounded { reachable } => {
            let closure = closure.expect("bounded verdicts carry their closure");
            match find_lasso(model, &closure)? {
                Some(lasso) => {
                    if !check_lasso(model, from, &lasso)? {
                        return Err(DecideError::MalformedWitness(
                            "extracted lasso failed validation".into(),
                        ));
                    }
                    stats.explored += reachable;
                    Ok(TermVerdict {
                        outcome: TermOutcome::Nonterminating(NontermWitness::Lasso(lasso)),
                        caps,
                        stats,
                    })
                }
                None => Ok(TermVerdict {
                    outcome: TermOutcome::Terminating { reachable },
                    caps,
                    stats,
                }),
            }
        }
    }
}

/// Cycle detection on the step graph of a closed reachable set.
fn find_lasso<S: Scalar>(
    model: &Tvass<S>,
    closure: &ClosureSet<S>,
) -> Result<Option<Lasso>, DecideError> {
    let adj = adjacency(model);
    let n = closure.nodes.len();
    // successor lists by node index
    let mut succ: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (idx, (state, counters)) in closure.nodes.iter().enumerate() {
        let cfg = Configuration::new(model.states()[*state].clone(), counters.clone());
        for &t_idx in &adj[*state] {
            if let Some(next) = model.step_unchecked(&cfg, &model.transitions()[t_idx]) {
                let key = (model.state_index(&next.state).expect("valid"), next.counters);
                let to = *closure.index.get(&key).expect("closure is closed under step");
                succ[idx].push((to, t_idx));
            }
        }
    }
    // iterative three-color cycle search
    let mut color = vec![0u8; n];
    for root in 0..n {
        if color[root] != 0 {
            continue;
        }
        let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
        let mut path: Vec<(usize, usize)> = Vec::new(); // (node, transition into next)
        color[root] = 1;
        while let Some(&mut (node, ref mut next)) = stack.last_mut() {
            if *next >= succ[node].len() {
                color[node] = 2;
                stack.pop();
                path.pop();
                continue;
            }
            let (to, t_idx) = succ[node][*next];
            *next += 1;
            if color[to] == 1 {
                // found a cycle: close it from `to` around to `node`
                let mut cycle_ids = Vec::new();
                let mut in_cycle = false;
                for &(pnode, pt) in path.iter().chain([(node, t_idx)].iter()) {
                    if pnode == to {
                        in_cycle = true;
                    }
                    if in_cycle {
                        cycle_ids.push(model.transitions()[pt].id.clone());
                    }
                }
                let prefix = trace_to(model, closure, to);
                return Ok(Some(Lasso { prefix, cycle: Trace(cycle_ids) }));
            }
            if color[to] == 0 {
                color[to] = 1;
                path.push((node, t_idx));
                stack.push((to, 0));
            }
        }
    }
    Ok(None)
}

/// Replays an unboundedness witness: the pump must return to the anchor
/// state and grow the counters in one of the two sound shapes, three
/// times over with the exact same displacement.
pub fn check_unbounded_witness<S: Scalar>(
    model: &Tvass<S>,
    from: &Configuration<S>,
    witness: &UnboundedWitness,
) -> Result<bool, DecideError> {
    model.validate_config(from)?;
    if witness.pump.is_empty() {
        return Err(DecideError::MalformedWitness("empty pump".into()));
    }
    let anchor = match model.apply_trace(from, &witness.prefix)? {
        Some(c) => c,
        None => return Ok(false),
    };
    let once = match model.apply_trace(&anchor, &witness.pump)? {
        Some(c) => c,
        None => return Ok(false),
    };
    if once.state != anchor.state {
        return Ok(false);
    }
    let delta = vec_sub(&once.counters, &anchor.counters);
    let test_free = {
        let mut tf = true;
        for id in &witness.pump.0 {
            if model.transition(id)?.action.is_test() {
                tf = false;
                break;
            }
        }
        tf
    };
    let fixed_first = delta[0].is_zero() && delta[1].is_positive();
    let monotone = test_free
        && delta.iter().all(|d| !d.is_negative())
        && delta[0].is_positive();
    if !(fixed_first || monotone) {
        return Ok(false);
    }
    // two more rounds with the exact same growth
    let mut cur = once;
    for _ in 0..2 {
        let next = match model.apply_trace(&cur, &witness.pump)? {
            Some(c) => c,
            None => return Ok(false),
        };
        if next.state != anchor.state || vec_sub(&next.counters, &cur.counters) != delta {
            return Ok(false);
        }
        cur = next;
    }
    Ok(true)
}

/// Replays a lasso: the cycle must return to exactly the same
/// configuration.
pub fn check_lasso<S: Scalar>(
    model: &Tvass<S>,
    from: &Configuration<S>,
    lasso: &Lasso,
) -> Result<bool, DecideError> {
    model.validate_config(from)?;
    if lasso.cycle.is_empty() {
        return Err(DecideError::MalformedWitness("empty lasso cycle".into()));
    }
    let at = match model.apply_trace(from, &lasso.prefix)? {
        Some(c) => c,
        None => return Ok(false),
    };
    Ok(model.apply_trace(&at, &lasso.cycle)?.as_ref() == Some(&at))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lps::CountedLps;
    use crate::model::{Action, Transition};
    use crate::testutil::{cfg2, ex_model, v2};

    type M = Tvass<i64>;

    #[test]
    fn oracle_reach_examples() {
        let m: M = ex_model();
        let v = oracle_reach(&m, &cfg2("A", 3, 5), &cfg2("A", 7, 5), 100, 100_000).unwrap();
        match v.outcome {
            ReachOutcome::Reachable(Certificate::Trace(t)) => assert_eq!(t.len(), 14),
            other => panic!("expected reachable, got {other:?}"),
        }
        let v = oracle_reach(&m, &cfg2("A", 0, 1), &cfg2("A", 0, 4), 100, 100_000).unwrap();
        assert!(v.is_unreachable());
        let v = oracle_reach(&m, &cfg2("B", 2, 2), &cfg2("B", 2, 2), 100, 100_000).unwrap();
        match v.outcome {
            ReachOutcome::Reachable(Certificate::Trace(t)) => assert!(t.is_empty()),
            other => panic!("expected trivial reachability, got {other:?}"),
        }
    }

    #[test]
    fn reach_examples() {
        let m: M = ex_model();
        let opts = ReachOpts::default();
        let v = reach(&m, &cfg2("A", 3, 5), &cfg2("A", 5, 5), &opts).unwrap();
        assert!(v.is_reachable());
        let v = reach(&m, &cfg2("A", 0, 2), &cfg2("A", 0, 5), &opts).unwrap();
        assert!(v.is_unreachable());
        let v = reach(&m, &cfg2("A", 0, 3), &cfg2("A", 0, 8), &opts).unwrap();
        assert!(v.is_reachable());
        if let ReachOutcome::Reachable(cert) = &v.outcome {
            assert!(matches!(cert, Certificate::Lps(_)));
            assert!(check_certificate(&m, &cfg2("A", 0, 3), &cfg2("A", 0, 8), cert).unwrap());
        }
    }

    #[test]
    fn short_path_bound_examples() {
        let m: M = ex_model();
        assert_eq!(
            short_path_bound(&m, &v2(3, 5), &v2(5, 5), 1),
            BigInt::from(16u64).pow(8)
        );
        assert_eq!(short_path_bound(&m, &v2(3, 5), &v2(5, 5), 0), BigInt::from(1));
        let tiny = M::new(
            1,
            vec!["p".into()],
            vec![Transition {
                id: "t".into(),
                source: "p".into(),
                action: Action::Add(vec![1]),
                target: "p".into(),
            }],
            true,
        )
        .unwrap();
        assert_eq!(short_path_bound(&tiny, &[0], &[0], 1), BigInt::from(2));
    }

    #[test]
    fn boundedness_bound_examples() {
        let m: M = ex_model();
        assert_eq!(
            boundedness_bound(&m, &v2(3, 5), 1),
            BigInt::from(6) * BigInt::from(6u64).pow(8)
        );
        assert_eq!(boundedness_bound(&m, &v2(3, 5), 0), BigInt::from(6));
        let tiny = M::new(
            1,
            vec!["p".into()],
            vec![Transition {
                id: "t".into(),
                source: "p".into(),
                action: Action::Add(vec![1]),
                target: "p".into(),
            }],
            true,
        )
        .unwrap();
        assert_eq!(boundedness_bound(&tiny, &[0], 1), BigInt::from(2));
    }

    #[test]
    fn certificate_checking() {
        let m: M = ex_model();
        let pi = Trace::of(&["dAA", "dAB", "dBB", "dBB", "dBB", "dBB", "dBA"]);
        let cert = Certificate::Trace(pi);
        assert!(check_certificate(&m, &cfg2("A", 3, 5), &cfg2("A", 5, 5), &cert).unwrap());
        assert!(!check_certificate(&m, &cfg2("A", 3, 5), &cfg2("A", 9, 5), &cert).unwrap());

        let scheme = crate::lps::LinearPathScheme::new(
            &m,
            vec![Trace::of(&["dAA"]), Trace::of(&["dAB"]), Trace::of(&["dBA"])],
            vec![Trace::of(&["dAB", "dBB", "dBB", "dBA", "dAA"]), Trace::of(&["dBB"])],
        )
        .unwrap();
        let good = Certificate::Lps(CountedLps::new(scheme.clone(), vec![1, 6]).unwrap());
        assert!(check_certificate(&m, &cfg2("A", 3, 5), &cfg2("A", 7, 5), &good).unwrap());
        assert!(!check_certificate(&m, &cfg2("A", 3, 5), &cfg2("A", 9, 5), &good).unwrap());
        // counts (1, 5) land on A(6, 6) instead
        let short = Certificate::Lps(CountedLps::new(scheme, vec![1, 5]).unwrap());
        assert!(!check_certificate(&m, &cfg2("A", 3, 5), &cfg2("A", 7, 5), &short).unwrap());
        assert!(check_certificate(&m, &cfg2("A", 3, 5), &cfg2("A", 6, 6), &short).unwrap());
    }

    #[test]
    fn extract_lps_compresses_repeats() {
        let m: M = ex_model();
        let mut ids = vec!["dAA", "dAB", "dBB", "dBB", "dBA", "dAA", "dAB"];
        ids.extend(std::iter::repeat_n("dBB", 6));
        ids.push("dBA");
        let trace = Trace::of(&ids);
        let run = Run::replay(&m, cfg2("A", 3, 5), &trace).unwrap().unwrap();
        let cert = extract_lps(&m, &run).unwrap();
        assert!(cert.scheme.star_len() >= 1);
        assert_eq!(
            eval_counts(&m, &cert, &v2(3, 5)).unwrap(),
            Some(cfg2("A", 7, 5))
        );

        // pure repetition compresses into one starred cycle
        let run = Run::replay(&m, cfg2("B", 0, 9), &Trace::of(&["dBB"]).repeat(4))
            .unwrap()
            .unwrap();
        let cert = extract_lps(&m, &run).unwrap();
        assert_eq!(cert.scheme.star_len(), 1);
        assert_eq!(cert.counts, vec![4]);

        // cycle-free traces stay as they are
        let run = Run::replay(&m, cfg2("A", 3, 5), &Trace::of(&["dAA", "dAB"]))
            .unwrap()
            .unwrap();
        let cert = extract_lps(&m, &run).unwrap();
        assert_eq!(cert.scheme.star_len(), 0);
        assert_eq!(cert.scheme.len(), 2);

        // empty runs still certify
        let run = Run::replay(&m, cfg2("A", 1, 1), &Trace::empty()).unwrap().unwrap();
        let cert = extract_lps(&m, &run).unwrap();
        assert_eq!(eval_counts(&m, &cert, &v2(1, 1)).unwrap(), Some(cfg2("A", 1, 1)));
    }

    #[test]
    fn vertical_loop_factor_examples() {
        let m: M = ex_model();
        let run = Run::replay(
            &m,
            cfg2("A", 3, 5),
            &Trace::of(&["dAA", "dAB", "dBB", "dBB", "dBB", "dBB", "dBA"]),
        )
        .unwrap()
        .unwrap();
        let factors = vertical_loop_factors(&m, &run).unwrap();
        assert_eq!(factors.len(), 3);
        assert!(matches!(factors[0], RunFactor::TestFree(_)));
        assert!(matches!(factors[1], RunFactor::TestStep(_)));
        assert!(matches!(factors[2], RunFactor::TestFree(_)));

        let run =
            Run::replay(&m, cfg2("B", 0, 9), &Trace::of(&["dBB", "dBB"])).unwrap().unwrap();
        let factors = vertical_loop_factors(&m, &run).unwrap();
        assert_eq!(factors.len(), 1);
        assert!(matches!(factors[0], RunFactor::TestFree(_)));

        let pi0 = Trace::of(&["dAB", "dBB", "dBB", "dBA", "dAA"]);
        let run = Run::replay(&m, cfg2("A", 0, 2), &pi0.repeat(2)).unwrap().unwrap();
        let factors = vertical_loop_factors(&m, &run).unwrap();
        assert_eq!(factors.len(), 1);
        assert!(matches!(&factors[0], RunFactor::VerticalLoop { state, .. } if state == "A"));
    }

    #[test]
    fn dx_examples() {
        let m: M = ex_model();
        let opts = DxOpts { cap_d: 8, ..DxOpts::default() };
        let d2 = compute_dx::<i64>(&m, "A", 2, &opts).unwrap();
        assert!(d2.conclusive);
        assert_eq!(d2.members.iter().copied().collect::<Vec<_>>(), vec![0, 2, 4, 6, 7, 8]);
        let d0 = compute_dx::<i64>(&m, "A", 0, &opts).unwrap();
        assert_eq!(d0.members.iter().copied().collect::<Vec<_>>(), vec![0]);
        let d5 = compute_dx::<i64>(&m, "A", 5, &opts).unwrap();
        assert_eq!(
            d5.members.iter().copied().collect::<Vec<_>>(),
            vec![0, 2, 3, 4, 5, 6, 7, 8]
        );
    }

    #[test]
    fn dx_stabilization_conjecture() {
        let m: M = ex_model();
        let opts = DxOpts { cap_d: 12, cap_norm: 80, cap_steps: 120_000 };
        let table = dx_table::<i64>(&m, "A", 10, &opts).unwrap();
        assert!(table.sets.iter().all(|s| s.conclusive));
        // difference sets grow until the odd offsets unlock, then repeat
        assert_eq!(table.conjectured_threshold, Some(5));
    }

    #[test]
    fn increasing_cycle_example() {
        let m: M = ex_model();
        let found = find_increasing_cycle::<i64>(&m, "A", &IncreasingCycleOpts::default())
            .unwrap()
            .expect("the example model pumps from h = 2");
        assert_eq!(found.0, 2);
        assert_eq!(found.2, 2);
        assert_eq!(found.1.len(), 5);

        // on state B the smallest lift also starts at level 2, routed
        // through the loop on A
        let found = find_increasing_cycle::<i64>(&m, "B", &IncreasingCycleOpts::default())
            .unwrap()
            .expect("B lifts as well");
        assert_eq!((found.0, found.2), (2, 2));
        assert_eq!(found.1.len(), 5);

        let down = M::new(
            2,
            vec!["p".into()],
            vec![Transition {
                id: "t".into(),
                source: "p".into(),
                action: Action::Add(vec![0, -1]),
                target: "p".into(),
            }],
            true,
        )
        .unwrap();
        assert!(find_increasing_cycle::<i64>(&down, "p", &IncreasingCycleOpts::default())
            .unwrap()
            .is_none());
    }

    #[test]
    fn bounded_examples() {
        let m: M = ex_model();
        let v = bounded(&m, &cfg2("A", 3, 5), &BoundedOpts::default()).unwrap();
        match &v.outcome {
            BoundedOutcome::Unbounded(w) => {
                assert!(check_unbounded_witness(&m, &cfg2("A", 3, 5), w).unwrap());
            }
            other => panic!("expected unbounded, got {other:?}"),
        }

        let lonely = M::new(2, vec!["p".into()], vec![], true).unwrap();
        let v = bounded(&lonely, &cfg2("p", 0, 0), &BoundedOpts::default()).unwrap();
        assert_eq!(v.outcome, BoundedOutcome::Bounded { reachable: 1 });

        let down = M::new(
            2,
            vec!["p".into()],
            vec![Transition {
                id: "t".into(),
                source: "p".into(),
                action: Action::Add(vec![0, -1]),
                target: "p".into(),
            }],
            true,
        )
        .unwrap();
        let v = bounded(&down, &cfg2("p", 0, 5), &BoundedOpts::default()).unwrap();
        assert_eq!(v.outcome, BoundedOutcome::Bounded { reachable: 6 });

        // the verdict rests on the closure alone, with or without a
        // bound constant
        let trade = M::new(
            2,
            vec!["p".into()],
            vec![Transition {
                id: "t".into(),
                source: "p".into(),
                action: Action::Add(vec![-1, 3]),
                target: "p".into(),
            }],
            true,
        )
        .unwrap();
        let opts = BoundedOpts { bound_const: None, ..BoundedOpts::default() };
        let v = bounded(&trade, &cfg2("p", 5, 0), &opts).unwrap();
        assert_eq!(v.outcome, BoundedOutcome::Bounded { reachable: 6 });
    }

    #[test]
    fn termination_examples() {
        let noop = M::new(
            2,
            vec!["p".into()],
            vec![Transition {
                id: "t".into(),
                source: "p".into(),
                action: Action::Add(vec![0, 0]),
                target: "p".into(),
            }],
            true,
        )
        .unwrap();
        let v = terminates(&noop, &cfg2("p", 0, 0), &BoundedOpts::default()).unwrap();
        match &v.outcome {
            TermOutcome::Nonterminating(NontermWitness::Lasso(l)) => {
                assert!(check_lasso(&noop, &cfg2("p", 0, 0), l).unwrap());
            }
            other => panic!("expected a lasso, got {other:?}"),
        }

        let down = M::new(
            2,
            vec!["p".into()],
            vec![Transition {
                id: "t".into(),
                source: "p".into(),
                action: Action::Add(vec![-1, 0]),
                target: "p".into(),
            }],
            true,
        )
        .unwrap();
        let v = terminates(&down, &cfg2("p", 5, 0), &BoundedOpts::default()).unwrap();
        assert!(matches!(v.outcome, TermOutcome::Terminating { reachable: 6 }));

        let m: M = ex_model();
        let v = terminates(&m, &cfg2("A", 3, 5), &BoundedOpts::default()).unwrap();
        assert!(matches!(v.outcome, TermOutcome::Nonterminating(NontermWitness::Pump(_))));
    }

    #[test]
    fn witness_validators_reject_bad_witnesses() {
        let m: M = ex_model();
        // a pump that decreases counter 2
        let w = UnboundedWitness {
            prefix: Trace::empty(),
            pump: Trace::of(&["dBB"]),
        };
        assert!(!check_unbounded_witness(&m, &cfg2("B", 0, 9), &w).unwrap());
        // a lasso whose cycle changes the configuration
        let l = Lasso { prefix: Trace::empty(), cycle: Trace::of(&["dBB"]) };
        assert!(!check_lasso(&m, &cfg2("B", 0, 9), &l).unwrap());
    }

    #[test]
    fn deciders_require_two_counters() {
        let one = M::new(1, vec!["p".into()], vec![], true).unwrap();
        let c = Configuration::new("p".to_string(), vec![0i64]);
        assert!(matches!(
            reach(&one, &c, &c, &ReachOpts::default()),
            Err(DecideError::WrongDimension(1))
        ));
        assert!(matches!(
            bounded(&one, &c, &BoundedOpts::default()),
            Err(DecideError::WrongDimension(1))
        ));
        assert!(matches!(
            terminates(&one, &c, &BoundedOpts::default()),
            Err(DecideError::WrongDimension(1))
        ));
        // the oracle itself works in any dimension
        assert!(oracle_reach(&one, &c, &c, 4, 100).unwrap().is_reachable());
    }

    #[test]
    fn reach_oracle_agreement_on_example() {
        let m: M = ex_model();
        let opts = ReachOpts::default();
        for x in 0..6u64 {
            for y in 0..6u64 {
                let from = cfg2("A", 0, x as i64);
                let to = cfg2("A", 0, y as i64);
                let o = oracle_reach(&m, &from, &to, 60, 200_000).unwrap();
                let r = reach(&m, &from, &to, &opts).unwrap();
                assert!(
                    !(o.is_reachable() && r.is_unreachable())
                        && !(o.is_unreachable() && r.is_reachable()),
                    "contradiction at x={x} y={y}"
                );
            }
        }
    }
}
