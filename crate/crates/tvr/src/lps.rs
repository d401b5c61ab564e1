//! Linear path schemes and the displacement algebra behind them.
//!
//! A linear path scheme `a0 b1* a1 ... bk* ak` describes a family of runs:
//! straight segments `a_j` interleaved with cycles `b_j` that may be
//! iterated. Fixing iteration counts turns a scheme into a reachability
//! certificate; quantifying over the counts turns it into a system of
//! linear inequalities over the counts whose solutions are exactly the
//! realizable runs through the scheme.

use std::fmt;

use thiserror::Error;

use crate::model::{
    vec_add, vec_ge, zero_vec, Configuration, ModelError, StateId, Trace, Tvass,
};
use crate::scalar::{from_u64, Scalar};
use crate::smallsol::{InhomSystem, SmallSolError, Solve};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LpsError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("word is not a path")]
    NotAPath,
    #[error("segment {0} is not a cycle")]
    NotACycle(String),
    #[error("path is infeasible")]
    Infeasible,
    #[error("infeasible scheme segment {0}")]
    InfeasibleSegment(String),
    #[error("cycle count must be at least 1")]
    ZeroCount,
    #[error("scheme needs {expected} counts, certificate has {got}")]
    CountLenMismatch { expected: usize, got: usize },
    #[error("scheme has {alphas} straight segments and {betas} cycles; need alphas = betas + 1")]
    BadShape { alphas: usize, betas: usize },
    #[error("scheme has no transitions, no anchor state")]
    EmptyScheme,
    #[error("vector has wrong dimension or negative entries")]
    BadVector,
    #[error("too many cycles for exhaustive zero-pattern search: {0}")]
    TooManyCycles(usize),
    #[error("count {0} too large to materialize")]
    CountOverflow(String),
    #[error("small-solution search inconclusive within budget")]
    Inconclusive,
    #[error(transparent)]
    SmallSol(#[from] SmallSolError),
}

/// Sum of the addition vectors along a trace; zero-tests contribute zero.
pub fn displacement<S: Scalar>(model: &Tvass<S>, trace: &Trace) -> Result<Vec<S>, LpsError> {
    let mut total = zero_vec(model.dimension());
    for id in &trace.0 {
        let t = model.transition(id)?;
        if let crate::model::Action::Add(a) = &t.action {
            total = vec_add(&total, a);
        }
    }
    Ok(total)
}

/// Componentwise maximum of the negated displacements over all prefixes
/// (the empty prefix included, so the result is nonnegative). This is the
/// smallest start vector from which a test-free trace replays.
pub fn min_prefix_vector<S: Scalar>(model: &Tvass<S>, trace: &Trace) -> Result<Vec<S>, LpsError> {
    let d = model.dimension();
    let mut running = zero_vec::<S>(d);
    let mut best = zero_vec::<S>(d);
    for id in &trace.0 {
        let t = model.transition(id)?;
        if let crate::model::Action::Add(a) = &t.action {
            running = vec_add(&running, a);
        }
        for i in 0..d {
            let neg = -running[i].clone();
            if neg > best[i] {
                best[i] = neg;
            }
        }
    }
    Ok(best)
}

/// The dominance order a trace induces on start vectors: plain
/// componentwise order, except that a zero-test pins the first counter to
/// an exact value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DominanceOrder {
    Full,
    FirstExact,
}

impl DominanceOrder {
    pub fn holds<S: Scalar>(&self, x: &[S], m: &[S]) -> bool {
        match self {
            DominanceOrder::Full => vec_ge(x, m),
            DominanceOrder::FirstExact => {
                x[0] == m[0] && x.iter().zip(m).skip(1).all(|(a, b)| a >= b)
            }
        }
    }
}

pub fn dominance_of<S: Scalar>(model: &Tvass<S>, trace: &Trace) -> Result<DominanceOrder, LpsError> {
    for id in &trace.0 {
        if model.transition(id)?.action.is_test() {
            return Ok(DominanceOrder::FirstExact);
        }
    }
    Ok(DominanceOrder::Full)
}

/// Whether some pair of counter valuations realizes the path. A single
/// simulation from the min-prefix vector decides this: that vector is the
/// canonical start, exact on the first counter whenever a test occurs.
pub fn is_feasible<S: Scalar>(model: &Tvass<S>, trace: &Trace) -> Result<bool, LpsError> {
    let endpoints = model.path_endpoints(trace)?;
    let (start_state, _) = match endpoints {
        None => return Ok(true),
        Some(ends) => ends,
    };
    let m = min_prefix_vector(model, trace)?;
    let start = Configuration::new(start_state, m);
    Ok(model.apply_trace(&start, trace)?.is_some())
}

/// Evaluates the path characterization `x >=_pi m_pi  and  y = x + disp(pi)`
/// for a feasible path. Agrees with direct simulation.
pub fn path_relation<S: Scalar>(
    model: &Tvass<S>,
    trace: &Trace,
    x: &[S],
    y: &[S],
) -> Result<bool, LpsError> {
    check_vector(model, x)?;
    check_vector(model, y)?;
    if !is_feasible(model, trace)? {
        return Err(LpsError::Infeasible);
    }
    let m = min_prefix_vector(model, trace)?;
    let ord = dominance_of(model, trace)?;
    let disp = displacement(model, trace)?;
    Ok(ord.holds(x, &m) && y == vec_add(x, &disp).as_slice())
}

/// Evaluates the iterated-cycle characterization
/// `x >=_b m_b  and  y >=_b m_rev(b)  and  y = x + n*disp(b)` for a
/// feasible cycle and `n >= 1`.
pub fn cycle_relation<S: Scalar>(
    model: &Tvass<S>,
    beta: &Trace,
    x: &[S],
    y: &[S],
    n: u64,
) -> Result<bool, LpsError> {
    check_vector(model, x)?;
    check_vector(model, y)?;
    if n == 0 {
        return Err(LpsError::ZeroCount);
    }
    if let Some((from, to)) = model.path_endpoints(beta)? {
        if from != to {
            return Err(LpsError::NotACycle(beta.to_string()));
        }
    }
    if !is_feasible(model, beta)? {
        return Err(LpsError::Infeasible);
    }
    let ord = dominance_of(model, beta)?;
    let m_in = min_prefix_vector(model, beta)?;
    let m_out = reversed_min_prefix(model, beta)?;
    let disp = displacement(model, beta)?;
    let scaled: Vec<S> = disp.iter().map(|d| d.clone() * from_u64::<S>(n)).collect();
    Ok(ord.holds(x, &m_in) && ord.holds(y, &m_out) && y == vec_add(x, &scaled).as_slice())
}

/// Min-prefix vector of the mirrored trace in the reversed model, computed
/// directly. Equal to `min_prefix_vector(pi) + displacement(pi)`; the
/// equality is a tested law, not a shortcut taken here.
pub fn reversed_min_prefix<S: Scalar>(model: &Tvass<S>, trace: &Trace) -> Result<Vec<S>, LpsError> {
    let reversed = model.reverse();
    min_prefix_vector(&reversed, &trace.mirror())
}

fn check_vector<S: Scalar>(model: &Tvass<S>, v: &[S]) -> Result<(), LpsError> {
    if v.len() != model.dimension() || v.iter().any(|x| x.is_negative()) {
        return Err(LpsError::BadVector);
    }
    Ok(())
}

/// A scheme `a0 b1* a1 ... bk* ak`, validated against a model: the
/// concatenation chains from `start` to `end` and every `b_j` is a cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearPathScheme {
    alphas: Vec<Trace>,
    betas: Vec<Trace>,
    start: StateId,
    end: StateId,
}

impl LinearPathScheme {
    pub fn new<S: Scalar>(
        model: &Tvass<S>,
        alphas: Vec<Trace>,
        betas: Vec<Trace>,
    ) -> Result<Self, LpsError> {
        Self::build(model, alphas, betas, None)
    }

    /// Like [`LinearPathScheme::new`] but with an explicit anchor state,
    /// which also admits the all-empty scheme.
    pub fn with_anchor<S: Scalar>(
        model: &Tvass<S>,
        alphas: Vec<Trace>,
        betas: Vec<Trace>,
        anchor: StateId,
    ) -> Result<Self, LpsError> {
        if !model.is_state(&anchor) {
            return Err(LpsError::Model(ModelError::BadState(anchor)));
        }
        Self::build(model, alphas, betas, Some(anchor))
    }

    fn build<S: Scalar>(
        model: &Tvass<S>,
        alphas: Vec<Trace>,
        betas: Vec<Trace>,
        anchor: Option<StateId>,
    ) -> Result<Self, LpsError> {
        if alphas.len() != betas.len() + 1 {
            return Err(LpsError::BadShape { alphas: alphas.len(), betas: betas.len() });
        }
        let mut cur: Option<StateId> = None;
        let mut start: Option<StateId> = None;
        let mut chain = |trace: &Trace, must_cycle: bool| -> Result<(), LpsError> {
            let ends = model.path_endpoints(trace)?;
            if let Some((from, to)) = ends {
                if must_cycle && from != to {
                    return Err(LpsError::NotACycle(trace.to_string()));
                }
                match &cur {
                    None => {
                        start = Some(from.clone());
                        cur = Some(to);
                    }
                    Some(at) => {
                        if *at != from {
                            return Err(LpsError::NotAPath);
                        }
                        cur = Some(to);
                    }
                }
            }
            Ok(())
        };
        for j in 0..alphas.len() {
            chain(&alphas[j], false)?;
            if j < betas.len() {
                chain(&betas[j], true)?;
            }
        }
        let (start, end) = match (start, cur, anchor) {
            (Some(s), Some(e), anchor) => {
                if let Some(a) = anchor {
                    if a != s {
                        return Err(LpsError::NotAPath);
                    }
                }
                (s, e)
            }
            (None, None, Some(a)) => (a.clone(), a),
            (None, None, None) => return Err(LpsError::EmptyScheme),
            _ => unreachable!("start and end are set together"),
        };
        Ok(LinearPathScheme { alphas, betas, start, end })
    }

    pub fn alphas(&self) -> &[Trace] {
        &self.alphas
    }

    pub fn betas(&self) -> &[Trace] {
        &self.betas
    }

    pub fn start_state(&self) -> &StateId {
        &self.start
    }

    pub fn end_state(&self) -> &StateId {
        &self.end
    }

    /// Number of starred cycles.
    pub fn star_len(&self) -> usize {
        self.betas.len()
    }

    /// Length of the concatenation `a0 b1 a1 ... bk ak`.
    pub fn len(&self) -> usize {
        self.alphas.iter().map(Trace::len).sum::<usize>()
            + self.betas.iter().map(Trace::len).sum::<usize>()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl fmt::Display for LinearPathScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for j in 0..self.alphas.len() {
            if !self.alphas[j].is_empty() {
                write!(f, "{} ", self.alphas[j])?;
            }
            if j < self.betas.len() {
                write!(f, "({})* ", self.betas[j])?;
            }
        }
        Ok(())
    }
}

/// A scheme with fixed iteration counts: a concrete reachability
/// certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountedLps {
    pub scheme: LinearPathScheme,
    pub counts: Vec<u64>,
}

impl CountedLps {
    pub fn new(scheme: LinearPathScheme, counts: Vec<u64>) -> Result<Self, LpsError> {
        if counts.len() != scheme.star_len() {
            return Err(LpsError::CountLenMismatch {
                expected: scheme.star_len(),
                got: counts.len(),
            });
        }
        Ok(CountedLps { scheme, counts })
    }

    /// The concrete word `a0 b1^n1 a1 ... bk^nk ak`.
    pub fn concrete_trace(&self) -> Trace {
        let mut out = Trace::empty();
        for j in 0..self.scheme.alphas.len() {
            out = out.concat(&self.scheme.alphas[j]);
            if j < self.scheme.betas.len() {
                out = out.concat(&self.scheme.betas[j].repeat(self.counts[j]));
            }
        }
        out
    }
}

/// Row provenance inside a scheme system: which segment and which side of
/// the characterization produced it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowOrigin {
    /// Straight segment `a_j` must be enterable: `x_j >=_a m_a`.
    AlphaEntry { j: usize },
    /// Cycle `b_j` must be enterable: `y_{j-1} >=_b m_b`.
    CycleEntry { j: usize },
    /// Cycle `b_j` must be exitable: `x_j >=_b m_rev(b)`.
    CycleExit { j: usize },
    /// Terminal equality `y = y_k`.
    Endpoint,
}

impl fmt::Display for RowOrigin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RowOrigin::AlphaEntry { j } => write!(f, "alpha[{j}] entry"),
            RowOrigin::CycleEntry { j } => write!(f, "beta[{j}] entry"),
            RowOrigin::CycleExit { j } => write!(f, "beta[{j}] exit"),
            RowOrigin::Endpoint => write!(f, "endpoint"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowSense {
    /// `coeffs . n >= rhs` coming from a `>=` constraint.
    Lower,
    /// `coeffs . n >= rhs` encoding the `<=` half of an equality.
    UpperOfEq,
    /// `coeffs . n >= rhs` encoding the `>=` half of an equality.
    LowerOfEq,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowTag {
    pub origin: RowOrigin,
    pub component: usize,
    pub sense: RowSense,
}

impl fmt::Display for RowTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sense = match self.sense {
            RowSense::Lower => "ge",
            RowSense::LowerOfEq => "eq-ge",
            RowSense::UpperOfEq => "eq-le",
        };
        write!(f, "{}, counter {}, {}", self.origin, self.component + 1, sense)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Row<S> {
    pub coeffs: Vec<S>,
    pub rhs: S,
    pub tag: RowTag,
}

/// System of inequalities `coeffs . n >= rhs` over nonnegative unknowns
/// `n1..nk`, one unknown per cycle of a scheme.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IneqSystem<S> {
    pub num_vars: usize,
    pub rows: Vec<Row<S>>,
}

impl<S: Scalar> IneqSystem<S> {
    pub fn satisfied_by(&self, counts: &[u64]) -> bool {
        assert_eq!(counts.len(), self.num_vars);
        self.rows.iter().all(|row| {
            let lhs = row
                .coeffs
                .iter()
                .zip(counts)
                .fold(S::zero(), |acc, (c, n)| acc + c.clone() * from_u64::<S>(*n));
            lhs >= row.rhs
        })
    }

    /// Drops the provenance tags, keeping the matrix form `M n >= b`.
    pub fn to_inhom(&self) -> InhomSystem<S> {
        InhomSystem::new(
            self.rows.iter().map(|r| r.coeffs.clone()).collect(),
            self.rows.iter().map(|r| r.rhs.clone()).collect(),
        )
        .expect("system rows are consistent by construction")
    }
}

/// Affine vector expression `consts + sum_j coeffs[j] * n_j`.
struct AffineVec<S> {
    consts: Vec<S>,
    coeffs: Vec<Vec<S>>,
}

impl<S: Scalar> AffineVec<S> {
    fn constant(v: Vec<S>, k: usize) -> Self {
        let d = v.len();
        AffineVec { consts: v, coeffs: vec![zero_vec(d); k] }
    }
}

/// Builds the system over `(n1..nk)` characterizing
/// `p(x) -a0 b1^n1 ... bk^nk ak-> q(y)`: every segment's dominance
/// constraint plus the terminal equality, with the first counter pinned
/// exactly wherever the segment contains a zero-test.
pub fn build_system<S: Scalar>(
    model: &Tvass<S>,
    scheme: &LinearPathScheme,
    x: &[S],
    y: &[S],
) -> Result<IneqSystem<S>, LpsError> {
    check_vector(model, x)?;
    check_vector(model, y)?;
    build_system_parts(model, &scheme.alphas, &scheme.betas, x, y)
}

fn push_dominance<S: Scalar>(
    rows: &mut Vec<Row<S>>,
    expr: &AffineVec<S>,
    m: &[S],
    ord: DominanceOrder,
    origin: RowOrigin,
) {
    let d = m.len();
    for i in 0..d {
        let coeffs: Vec<S> = expr.coeffs.iter().map(|c| c[i].clone()).collect();
        let rhs = m[i].clone() - expr.consts[i].clone();
        if i == 0 && ord == DominanceOrder::FirstExact {
            rows.push(Row {
                coeffs: coeffs.clone(),
                rhs: rhs.clone(),
                tag: RowTag { origin, component: i, sense: RowSense::LowerOfEq },
            });
            rows.push(Row {
                coeffs: coeffs.iter().map(|c| -c.clone()).collect(),
                rhs: -rhs,
                tag: RowTag { origin, component: i, sense: RowSense::UpperOfEq },
            });
        } else {
            rows.push(Row {
                coeffs,
                rhs,
                tag: RowTag { origin, component: i, sense: RowSense::Lower },
            });
        }
    }
}

fn build_system_parts<S: Scalar>(
    model: &Tvass<S>,
    alphas: &[Trace],
    betas: &[Trace],
    x: &[S],
    y: &[S],
) -> Result<IneqSystem<S>, LpsError> {
    let k = betas.len();
    let mut rows = Vec::new();
    let mut expr = AffineVec::constant(x.to_vec(), k);
    for j in 0..alphas.len() {
        if j > 0 {
            let beta = &betas[j - 1];
            if !is_feasible(model, beta)? {
                return Err(LpsError::InfeasibleSegment(format!("beta[{j}]")));
            }
            let ord = dominance_of(model, beta)?;
            let m_in = min_prefix_vector(model, beta)?;
            push_dominance(&mut rows, &expr, &m_in, ord, RowOrigin::CycleEntry { j });
            let disp = displacement(model, beta)?;
            expr.coeffs[j - 1] = vec_add(&expr.coeffs[j - 1], &disp);
            let m_out = reversed_min_prefix(model, beta)?;
            push_dominance(&mut rows, &expr, &m_out, ord, RowOrigin::CycleExit { j });
        }
        let alpha = &alphas[j];
        if !is_feasible(model, alpha)? {
            return Err(LpsError::InfeasibleSegment(format!("alpha[{j}]")));
        }
        let ord = dominance_of(model, alpha)?;
        let m = min_prefix_vector(model, alpha)?;
        push_dominance(&mut rows, &expr, &m, ord, RowOrigin::AlphaEntry { j });
        expr.consts = vec_add(&expr.consts, &displacement(model, alpha)?);
    }
    // y = y_k, two rows per component
    for i in 0..model.dimension() {
        let coeffs: Vec<S> = expr.coeffs.iter().map(|c| c[i].clone()).collect();
        let rhs = y[i].clone() - expr.consts[i].clone();
        rows.push(Row {
            coeffs: coeffs.clone(),
            rhs: rhs.clone(),
            tag: RowTag { origin: RowOrigin::Endpoint, component: i, sense: RowSense::LowerOfEq },
        });
        rows.push(Row {
            coeffs: coeffs.iter().map(|c| -c.clone()).collect(),
            rhs: -rhs,
            tag: RowTag { origin: RowOrigin::Endpoint, component: i, sense: RowSense::UpperOfEq },
        });
    }
    Ok(IneqSystem { num_vars: k, rows })
}

/// Replays the concrete word of a certificate from `x`. This is the
/// ground-truth validator for scheme certificates.
pub fn eval_counts<S: Scalar>(
    model: &Tvass<S>,
    cert: &CountedLps,
    x: &[S],
) -> Result<Option<Configuration<S>>, LpsError> {
    check_vector(model, x)?;
    if cert.counts.len() != cert.scheme.star_len() {
        return Err(LpsError::CountLenMismatch {
            expected: cert.scheme.star_len(),
            got: cert.counts.len(),
        });
    }
    let start = Configuration::new(cert.scheme.start.clone(), x.to_vec());
    Ok(model.apply_trace(&start, &cert.concrete_trace())?)
}

const LPS_REACH_MAX_CYCLES: usize = 20;

/// Complete search for counts realizing `p(x) ->L q(y)`.
///
/// The characterization's converse only covers counts that are all at
/// least 1, so the search splits on the set of cycles forced to zero:
/// for each of the `2^k` patterns the dropped cycles are removed (their
/// surrounding straight segments merged), the remaining counts are
/// substituted `n_j = 1 + n'_j`, and the reduced system goes to the
/// small-solution solver. Any witness is validated by replay before being
/// returned.
pub fn lps_reach<S: Scalar>(
    model: &Tvass<S>,
    scheme: &LinearPathScheme,
    x: &[S],
    y: &[S],
) -> Result<Option<Vec<u64>>, LpsError> {
    check_vector(model, x)?;
    check_vector(model, y)?;
    let k = scheme.star_len();
    if k > LPS_REACH_MAX_CYCLES {
        return Err(LpsError::TooManyCycles(k));
    }
    let mut saw_inconclusive = false;
    for mask in 0u64..(1u64 << k) {
        // bit j set: cycle j is kept with count >= 1
        let mut alphas: Vec<Trace> = vec![scheme.alphas[0].clone()];
        let mut betas: Vec<Trace> = Vec::new();
        let mut kept: Vec<usize> = Vec::new();
        for j in 0..k {
            if mask & (1 << j) != 0 {
                kept.push(j);
                betas.push(scheme.betas[j].clone());
                alphas.push(scheme.alphas[j + 1].clone());
            } else {
                let merged = alphas.pop().expect("nonempty").concat(&scheme.alphas[j + 1]);
                alphas.push(merged);
            }
        }
        let system = match build_system_parts(model, &alphas, &betas, x, y) {
            Ok(s) => s,
            Err(LpsError::InfeasibleSegment(_)) => continue,
            Err(e) => return Err(e),
        };
        if kept.is_empty() {
            // constant system: all rows read 0 >= rhs
            if system.rows.iter().all(|r| !r.rhs.is_positive()) {
                let counts = vec![0u64; k];
                let cert = CountedLps::new(scheme.clone(), counts.clone())?;
                if let Some(end) = eval_counts(model, &cert, x)? {
                    if end.state == *scheme.end_state() && end.counters == y {
                        return Ok(Some(counts));
                    }
                }
            }
            continue;
        }
        // substitute n_j = 1 + n'_j
        let shifted = InhomSystem::new(
            system.rows.iter().map(|r| r.coeffs.clone()).collect(),
            system
                .rows
                .iter()
                .map(|r| {
                    let shift =
                        r.coeffs.iter().fold(S::zero(), |acc, c| acc + c.clone());
                    r.rhs.clone() - shift
                })
                .collect(),
        )?;
        match shifted.find_small_solution(None)? {
            Solve::Found(sol) => {
                let mut counts = vec![0u64; k];
                for (pos, &j) in kept.iter().enumerate() {
                    let n = sol[pos]
                        .to_u64()
                        .ok_or_else(|| LpsError::CountOverflow(sol[pos].to_string()))?;
                    counts[j] = 1 + n;
                }
                let cert = CountedLps::new(scheme.clone(), counts.clone())?;
                if let Some(end) = eval_counts(model, &cert, x)? {
                    if end.state == *scheme.end_state() && end.counters == y {
                        return Ok(Some(counts));
                    }
                }
            }
            Solve::NoneComplete => {}
            Solve::Inconclusive { .. } => saw_inconclusive = true,
        }
    }
    if saw_inconclusive {
        return Err(LpsError::Inconclusive);
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::model::{norm, vec_sub};
    use crate::testutil::{cfg2, ex_model, v2};

    type M = Tvass<i64>;

    fn pi0() -> Trace {
        Trace::of(&["dAB", "dBB", "dBB", "dBA", "dAA"])
    }

    /// The scheme dAA (pi0)* dAB (dBB)* dBA.
    fn ex_scheme(m: &M) -> LinearPathScheme {
        LinearPathScheme::new(
            m,
            vec![Trace::of(&["dAA"]), Trace::of(&["dAB"]), Trace::of(&["dBA"])],
            vec![pi0(), Trace::of(&["dBB"])],
        )
        .unwrap()
    }

    #[test]
    fn displacement_examples() {
        let m: M = ex_model();
        assert_eq!(displacement(&m, &Trace::of(&["dAA"])).unwrap(), v2(-3, 4));
        assert_eq!(displacement(&m, &pi0()).unwrap(), v2(0, 2));
        assert_eq!(displacement(&m, &Trace::empty()).unwrap(), v2(0, 0));
    }

    #[test]
    fn min_prefix_examples() {
        let m: M = ex_model();
        assert_eq!(min_prefix_vector(&m, &Trace::of(&["dAA"])).unwrap(), v2(3, 0));
        assert_eq!(min_prefix_vector(&m, &pi0()).unwrap(), v2(0, 2));
        assert_eq!(min_prefix_vector(&m, &Trace::empty()).unwrap(), v2(0, 0));
    }

    #[test]
    fn dominance_examples() {
        let m: M = ex_model();
        assert_eq!(dominance_of(&m, &pi0()).unwrap(), DominanceOrder::FirstExact);
        assert_eq!(dominance_of(&m, &Trace::of(&["dAA"])).unwrap(), DominanceOrder::Full);
        assert_eq!(dominance_of(&m, &Trace::empty()).unwrap(), DominanceOrder::Full);
    }

    #[test]
    fn feasibility_examples() {
        let m: M = ex_model();
        assert!(is_feasible(&m, &pi0()).unwrap());
        assert!(is_feasible(&m, &Trace::of(&["dAA", "dAB"])).unwrap());
        assert!(!is_feasible(&m, &Trace::of(&["dBA", "dAB"])).unwrap());
        // not a path at all: usage error, not a feasibility verdict
        assert!(matches!(
            is_feasible(&m, &Trace::of(&["dAB", "dAB"])),
            Err(LpsError::Model(ModelError::BrokenChain { .. }))
        ));
    }

    #[test]
    fn path_relation_examples() {
        let m: M = ex_model();
        assert!(path_relation(&m, &pi0(), &v2(0, 5), &v2(0, 7)).unwrap());
        assert!(!path_relation(&m, &pi0(), &v2(0, 1), &v2(0, 3)).unwrap());
        assert!(!path_relation(&m, &pi0(), &v2(1, 5), &v2(1, 7)).unwrap());
        assert!(matches!(
            path_relation(&m, &Trace::of(&["dBA", "dAB"]), &v2(0, 0), &v2(1, 0)),
            Err(LpsError::Infeasible)
        ));
    }

    #[test]
    fn cycle_relation_examples() {
        let m: M = ex_model();
        assert!(cycle_relation(&m, &pi0(), &v2(0, 2), &v2(0, 8), 3).unwrap());
        assert!(!cycle_relation(&m, &pi0(), &v2(0, 2), &v2(0, 4), 2).unwrap());
        assert!(cycle_relation(&m, &Trace::of(&["dBB"]), &v2(3, 3), &v2(5, 1), 2).unwrap());
        assert!(matches!(
            cycle_relation(&m, &pi0(), &v2(0, 2), &v2(0, 2), 0),
            Err(LpsError::ZeroCount)
        ));
        assert!(matches!(
            cycle_relation(&m, &Trace::of(&["dAA", "dAB"]), &v2(3, 0), &v2(0, 4), 1),
            Err(LpsError::NotACycle(_))
        ));
    }

    #[test]
    fn reversed_min_prefix_examples() {
        let m: M = ex_model();
        assert_eq!(reversed_min_prefix(&m, &pi0()).unwrap(), v2(0, 4));
        assert_eq!(reversed_min_prefix(&m, &Trace::of(&["dAA"])).unwrap(), v2(0, 4));
        assert_eq!(reversed_min_prefix(&m, &Trace::empty()).unwrap(), v2(0, 0));
    }

    #[test]
    fn system_for_example_scheme() {
        let m: M = ex_model();
        let scheme = ex_scheme(&m);
        let sys = build_system(&m, &scheme, &v2(3, 5), &v2(7, 5)).unwrap();
        assert!(sys.satisfied_by(&[1, 6]));
        assert!(!sys.satisfied_by(&[2, 6]));
        assert_eq!(lps_reach(&m, &scheme, &v2(3, 5), &v2(7, 5)).unwrap(), Some(vec![1, 6]));
        assert_eq!(lps_reach(&m, &scheme, &v2(3, 5), &v2(4, 5)).unwrap(), None);
    }

    #[test]
    fn single_cycle_scheme() {
        let m: M = ex_model();
        let scheme = LinearPathScheme::new(
            &m,
            vec![Trace::empty(), Trace::empty()],
            vec![pi0()],
        )
        .unwrap();
        let sys = build_system(&m, &scheme, &v2(0, 2), &v2(0, 8)).unwrap();
        assert!(sys.satisfied_by(&[3]));
        assert!(!sys.satisfied_by(&[2]));
        assert_eq!(lps_reach(&m, &scheme, &v2(0, 2), &v2(0, 8)).unwrap(), Some(vec![3]));
        assert_eq!(lps_reach(&m, &scheme, &v2(0, 2), &v2(0, 2)).unwrap(), Some(vec![0]));
        // displacement (0,2) can never add 5
        assert_eq!(lps_reach(&m, &scheme, &v2(0, 2), &v2(0, 7)).unwrap(), None);
    }

    /// The companion climb: one zero-test, five loops on B, one return
    /// and two loops on A, lifting the second counter by three.
    fn sigma() -> Trace {
        Trace::of(&["dAB", "dBB", "dBB", "dBB", "dBB", "dBB", "dBA", "dAA", "dAA"])
    }

    #[test]
    fn sigma_characterization() {
        let m: M = ex_model();
        assert_eq!(min_prefix_vector(&m, &sigma()).unwrap(), v2(0, 5));
        assert_eq!(displacement(&m, &sigma()).unwrap(), v2(0, 3));
        assert!(is_feasible(&m, &sigma()).unwrap());
        // A(0, x) -sigma-> A(0, y) exactly when x >= 5 and y = x + 3
        for x in 0..=9i64 {
            for y in 0..=12i64 {
                let holds = path_relation(&m, &sigma(), &v2(0, x), &v2(0, y)).unwrap();
                let sim = m
                    .apply_trace(&cfg2("A", 0, x), &sigma())
                    .unwrap()
                    .is_some_and(|c| c == cfg2("A", 0, y));
                assert_eq!(holds, sim);
                assert_eq!(holds, x >= 5 && y == x + 3);
            }
        }
    }

    #[test]
    fn cycle_free_scheme() {
        let m: M = ex_model();
        let scheme = LinearPathScheme::new(&m, vec![pi0()], vec![]).unwrap();
        assert_eq!(scheme.star_len(), 0);
        assert_eq!(lps_reach(&m, &scheme, &v2(0, 2), &v2(0, 4)).unwrap(), Some(vec![]));
        assert_eq!(lps_reach(&m, &scheme, &v2(0, 2), &v2(0, 5)).unwrap(), None);
        // dominance violated at the start
        assert_eq!(lps_reach(&m, &scheme, &v2(0, 1), &v2(0, 3)).unwrap(), None);
    }

    #[test]
    fn anchored_empty_scheme() {
        let m: M = ex_model();
        assert!(matches!(
            LinearPathScheme::new(&m, vec![Trace::empty()], vec![]),
            Err(LpsError::EmptyScheme)
        ));
        let scheme =
            LinearPathScheme::with_anchor(&m, vec![Trace::empty()], vec![], "A".into()).unwrap();
        let cert = CountedLps::new(scheme, vec![]).unwrap();
        assert_eq!(eval_counts(&m, &cert, &v2(1, 2)).unwrap(), Some(cfg2("A", 1, 2)));
    }

    #[test]
    fn eval_counts_examples() {
        let m: M = ex_model();
        let cert = CountedLps::new(ex_scheme(&m), vec![1, 6]).unwrap();
        assert_eq!(eval_counts(&m, &cert, &v2(3, 5)).unwrap(), Some(cfg2("A", 7, 5)));

        let single =
            LinearPathScheme::new(&m, vec![Trace::empty(), Trace::empty()], vec![pi0()]).unwrap();
        let zero = CountedLps::new(single.clone(), vec![0]).unwrap();
        assert_eq!(eval_counts(&m, &zero, &v2(0, 2)).unwrap(), Some(cfg2("A", 0, 2)));
        let one = CountedLps::new(single, vec![1]).unwrap();
        assert_eq!(eval_counts(&m, &one, &v2(0, 1)).unwrap(), None);
    }

    fn arb_word() -> impl Strategy<Value = Trace> {
        prop::collection::vec(prop::sample::select(vec!["dAA", "dAB", "dBB", "dBA"]), 0..12)
            .prop_map(|ids| Trace(ids.iter().map(|s| s.to_string()).collect()))
    }

    proptest! {
        // m_rev(pi) = m_pi + disp(pi), with both sides computed
        // independently, tests included.
        #[test]
        fn reversed_min_prefix_law(pi in arb_word()) {
            let m: M = ex_model();
            let lhs = reversed_min_prefix(&m, &pi).unwrap();
            let rhs = vec_add(
                &min_prefix_vector(&m, &pi).unwrap(),
                &displacement(&m, &pi).unwrap(),
            );
            prop_assert_eq!(lhs, rhs);
        }

        // Characterization agrees with simulation on feasible paths.
        #[test]
        fn path_relation_matches_simulation(
            pi in arb_word(),
            x0 in 0i64..10, x1 in 0i64..10,
        ) {
            let m: M = ex_model();
            let ends = match m.path_endpoints(&pi) {
                Ok(e) => e,
                Err(_) => return Ok(()),
            };
            let (from, to) = match ends {
                Some(e) => e,
                None => return Ok(()),
            };
            if !is_feasible(&m, &pi).unwrap() {
                return Ok(());
            }
            let x = v2(x0, x1);
            let sim = m.apply_trace(&Configuration::new(from, x.clone()), &pi).unwrap();
            match sim {
                Some(end) => {
                    prop_assert_eq!(end.state, to);
                    prop_assert!(path_relation(&m, &pi, &x, &end.counters).unwrap());
                }
                None => {
                    // no y can satisfy the relation with this x
                    let disp = displacement(&m, &pi).unwrap();
                    let y = vec_add(&x, &disp);
                    if y.iter().all(|v| *v >= 0) {
                        prop_assert!(!path_relation(&m, &pi, &x, &y).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn norm_is_infinity_norm() {
        assert_eq!(norm(&v2(-3, 2)), 3);
        assert_eq!(norm(&vec_sub(&v2(0, 0), &v2(5, -7))), 7);
    }
}
