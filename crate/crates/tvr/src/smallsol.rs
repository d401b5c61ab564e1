//! Small nonnegative solutions of integer linear systems.
//!
//! Two shapes: homogeneous equalities `M x = 0` whose nonzero solutions
//! decompose into componentwise-minimal generators of bounded coordinate
//! sum, and inhomogeneous systems `M x >= b` which, when solvable at all,
//! admit a solution of coordinate sum at most `(2+m)^(k+1+e)`. Both bounds
//! are computed exactly in big integers; searches are bounded by them and
//! fail loudly instead of hanging.

use num_bigint::BigInt;
use num_traits::{One, Signed as _, ToPrimitive, Zero};
use thiserror::Error;

use crate::scalar::{from_u64, Scalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SmallSolError {
    #[error("system has no rows")]
    NoRows,
    #[error("system has no variables")]
    NoVars,
    #[error("row {0} has the wrong number of coefficients")]
    RaggedRow(usize),
    #[error("vector length does not match the number of variables")]
    BadVectorLen,
    #[error("enumeration bound too large: {0}")]
    BoundTooLarge(BigInt),
    #[error("vector is not a solution of the system")]
    NotASolution,
    #[error("greedy decomposition got stuck")]
    DecompositionStuck,
}

/// Search outcome of the bounded inhomogeneous solver.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Solve<S> {
    Found(Vec<S>),
    /// The whole range up to the completeness bound was covered: no
    /// solution exists at all.
    NoneComplete,
    /// Nothing found within the budget, which stopped short of the
    /// completeness bound.
    Inconclusive { searched: BigInt },
}

/// Homogeneous equalities `M x = 0` over nonnegative unknowns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomSystem<S> {
    matrix: Vec<Vec<S>>,
}

impl<S: Scalar> HomSystem<S> {
    pub fn new(matrix: Vec<Vec<S>>) -> Result<Self, SmallSolError> {
        check_matrix(&matrix)?;
        Ok(HomSystem { matrix })
    }

    pub fn rows(&self) -> usize {
        self.matrix.len()
    }

    pub fn vars(&self) -> usize {
        self.matrix[0].len()
    }

    /// `m = max_i sum_j |M_ij|`.
    pub fn weight(&self) -> BigInt {
        self.matrix
            .iter()
            .map(|row| row.iter().map(|c| c.to_big().abs()).sum::<BigInt>())
            .max()
            .expect("at least one row")
    }

    /// Coordinate-sum bound `(1+m)^k` on minimal generators.
    pub fn generator_bound(&self) -> BigInt {
        (BigInt::one() + self.weight()).pow(self.vars() as u32)
    }

    pub fn is_solution(&self, x: &[S]) -> Result<bool, SmallSolError> {
        if x.len() != self.vars() {
            return Err(SmallSolError::BadVectorLen);
        }
        Ok(self.matrix.iter().all(|row| dot(row, x).is_zero()) && x.iter().all(|v| !v.is_negative()))
    }

    /// All componentwise-minimal nonzero solutions, found by exhaustive
    /// enumeration of coordinate sums up to the generator bound. The bound
    /// is checked against `budget` first and refused when it exceeds it.
    pub fn minimal_generators(&self, budget: u64) -> Result<Vec<Vec<S>>, SmallSolError> {
        let bound = self.generator_bound();
        if bound > BigInt::from(budget) {
            return Err(SmallSolError::BoundTooLarge(bound));
        }
        let bound = bound.to_u64().expect("bound fits after budget check");
        let k = self.vars();
        let mut generators: Vec<Vec<u64>> = Vec::new();
        let mut candidate = vec![0u64; k];
        for sum in 1..=bound {
            enumerate_sum(&mut candidate, 0, sum, &mut |v| {
                if generators.iter().any(|g| dominates(v, g)) {
                    return;
                }
                let sv: Vec<S> = v.iter().map(|&n| from_u64(n)).collect();
                if self.matrix.iter().all(|row| dot(row, &sv).is_zero()) {
                    generators.push(v.to_vec());
                }
            });
        }
        Ok(generators
            .into_iter()
            .map(|g| g.into_iter().map(from_u64).collect())
            .collect())
    }

    /// Writes a solution as a multiset of minimal generators summing to it,
    /// by greedy subtraction in generation order.
    pub fn decompose(&self, x: &[S], budget: u64) -> Result<Vec<Vec<S>>, SmallSolError> {
        if !self.is_solution(x)? {
            return Err(SmallSolError::NotASolution);
        }
        let generators = self.minimal_generators(budget)?;
        let mut rest = x.to_vec();
        let mut parts = Vec::new();
        while !rest.iter().all(|v| v.is_zero()) {
            let g = generators
                .iter()
                .find(|g| rest.iter().zip(g.iter()).all(|(r, gi)| r >= gi))
                .ok_or(SmallSolError::DecompositionStuck)?;
            for (r, gi) in rest.iter_mut().zip(g.iter()) {
                *r = r.clone() - gi.clone();
            }
            parts.push(g.clone());
        }
        Ok(parts)
    }
}

/// Inhomogeneous system `M x >= b` over nonnegative unknowns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InhomSystem<S> {
    matrix: Vec<Vec<S>>,
    b: Vec<S>,
}

/// Work guard for the deepening search: number of enumeration nodes
/// visited before giving up with an inconclusive answer.
const WORK_BUDGET: u64 = 40_000_000;
/// Propagated boxes up to this many points are enumerated outright.
const BOX_ENUM_LIMIT: u64 = 4_000_000;
/// Rounds of interval propagation before assuming divergence.
const PROPAGATION_ROUNDS: usize = 200_000;

impl<S: Scalar> InhomSystem<S> {
    pub fn new(matrix: Vec<Vec<S>>, b: Vec<S>) -> Result<Self, SmallSolError> {
        check_matrix(&matrix)?;
        if b.len() != matrix.len() {
            return Err(SmallSolError::BadVectorLen);
        }
        Ok(InhomSystem { matrix, b })
    }

    pub fn rows(&self) -> usize {
        self.matrix.len()
    }

    pub fn vars(&self) -> usize {
        self.matrix[0].len()
    }

    /// `m = max_i (sum_j |M_ij| + |b_i|)`.
    pub fn weight(&self) -> BigInt {
        self.matrix
            .iter()
            .zip(&self.b)
            .map(|(row, bi)| {
                row.iter().map(|c| c.to_big().abs()).sum::<BigInt>() + bi.to_big().abs()
            })
            .max()
            .expect("at least one row")
    }

    /// Completeness bound `(2+m)^(k+1+e)`: if any solution exists, one
    /// exists with coordinate sum at most this.
    pub fn witness_bound(&self) -> BigInt {
        (BigInt::from(2) + self.weight()).pow((self.vars() + 1 + self.rows()) as u32)
    }

    pub fn is_solution(&self, x: &[S]) -> Result<bool, SmallSolError> {
        if x.len() != self.vars() {
            return Err(SmallSolError::BadVectorLen);
        }
        Ok(x.iter().all(|v| !v.is_negative())
            && self.matrix.iter().zip(&self.b).all(|(row, bi)| dot(row, x) >= *bi))
    }

    /// Searches coordinate sums `0, 1, 2, ...` up to
    /// `min(witness_bound, budget)` and returns the first solution, with
    /// a deterministic lexicographic tie-break within each sum.
    ///
    /// Interval propagation over the box `[0, witness_bound]^k` runs
    /// first: an empty propagated box is a complete refutation (any
    /// solution would imply one inside the box), and a small propagated
    /// box is enumerated outright. Otherwise the deepening loop runs until
    /// the cap or the work guard, reporting an inconclusive outcome rather
    /// than an unsound absence.
    pub fn find_small_solution(&self, budget: Option<&BigInt>) -> Result<Solve<S>, SmallSolError> {
        let bound = self.witness_bound();
        let cap = match budget {
            Some(b) if *b < bound => b.clone(),
            _ => bound.clone(),
        };
        let complete_cap = cap == bound;

        let big_rows: Vec<Vec<BigInt>> = self
            .matrix
            .iter()
            .map(|row| row.iter().map(|c| c.to_big()).collect())
            .collect();
        let big_b: Vec<BigInt> = self.b.iter().map(|c| c.to_big()).collect();

        let box_bounds = match propagate_box(&big_rows, &big_b, &bound) {
            None => return Ok(Solve::NoneComplete),
            Some(b) => b,
        };

        // Cheapest outcome: the propagated box is small enough to sweep.
        // Sums past the cap need no visit: any solution implies one of
        // coordinate sum at most the witness bound.
        if box_volume(&box_bounds, BOX_ENUM_LIMIT).is_some() {
            let lo: Vec<u64> = box_bounds.iter().map(|(l, _)| l.to_u64().unwrap()).collect();
            let hi: Vec<u64> = box_bounds.iter().map(|(_, h)| h.to_u64().unwrap()).collect();
            let min_sum: u64 = lo.iter().sum();
            let max_sum: u64 = hi.iter().sum();
            let sum_cap = cap.to_u64().map_or(max_sum, |c| c.min(max_sum));
            let mut candidate = vec![0u64; self.vars()];
            for sum in min_sum..=sum_cap {
                let mut found: Option<Vec<u64>> = None;
                enumerate_sum_boxed(&mut candidate, 0, sum, &lo, &hi, &mut |v| {
                    if found.is_none() && self.check_u64(v) {
                        found = Some(v.to_vec());
                    }
                });
                if let Some(v) = found {
                    return Ok(Solve::Found(v.into_iter().map(from_u64).collect()));
                }
            }
            return Ok(if complete_cap || BigInt::from(max_sum) <= cap {
                Solve::NoneComplete
            } else {
                Solve::Inconclusive { searched: cap }
            });
        }

        // Deepening over sums with a work guard.
        let mut work = 0u64;
        let mut sum = BigInt::zero();
        let mut candidate = vec![0u64; self.vars()];
        while sum <= cap {
            let s = match sum.to_u64() {
                Some(s) => s,
                None => return Ok(Solve::Inconclusive { searched: sum }),
            };
            let mut found: Option<Vec<u64>> = None;
            let mut exhausted_work = false;
            enumerate_sum(&mut candidate, 0, s, &mut |v| {
                work += 1;
                if work > WORK_BUDGET {
                    exhausted_work = true;
                }
                if !exhausted_work && found.is_none() && self.check_u64(v) {
                    found = Some(v.to_vec());
                }
            });
            if let Some(v) = found {
                return Ok(Solve::Found(v.into_iter().map(from_u64).collect()));
            }
            if exhausted_work {
                return Ok(Solve::Inconclusive { searched: sum });
            }
            sum += 1;
        }
        Ok(if complete_cap {
            Solve::NoneComplete
        } else {
            Solve::Inconclusive { searched: cap }
        })
    }

    fn check_u64(&self, v: &[u64]) -> bool {
        let sv: Vec<S> = v.iter().map(|&n| from_u64(n)).collect();
        self.matrix.iter().zip(&self.b).all(|(row, bi)| dot(row, &sv) >= *bi)
    }
}

fn check_matrix<S: Scalar>(matrix: &[Vec<S>]) -> Result<(), SmallSolError> {
    if matrix.is_empty() {
        return Err(SmallSolError::NoRows);
    }
    let k = matrix[0].len();
    if k == 0 {
        return Err(SmallSolError::NoVars);
    }
    for (i, row) in matrix.iter().enumerate() {
        if row.len() != k {
            return Err(SmallSolError::RaggedRow(i));
        }
    }
    Ok(())
}

fn dot<S: Scalar>(row: &[S], x: &[S]) -> S {
    row.iter().zip(x).fold(S::zero(), |acc, (c, v)| acc + c.clone() * v.clone())
}

fn dominates(v: &[u64], g: &[u64]) -> bool {
    v.iter().zip(g).all(|(a, b)| a >= b)
}

/// Visits every vector with the given coordinate sum in lexicographic
/// order (first coordinate varies slowest, ascending).
fn enumerate_sum(v: &mut [u64], idx: usize, remaining: u64, visit: &mut impl FnMut(&[u64])) {
    if idx + 1 == v.len() {
        v[idx] = remaining;
        visit(v);
        return;
    }
    for value in 0..=remaining {
        v[idx] = value;
        enumerate_sum(v, idx + 1, remaining - value, visit);
    }
}

fn enumerate_sum_boxed(
    v: &mut [u64],
    idx: usize,
    remaining: u64,
    lo: &[u64],
    hi: &[u64],
    visit: &mut impl FnMut(&[u64]),
) {
    if idx + 1 == v.len() {
        if remaining >= lo[idx] && remaining <= hi[idx] {
            v[idx] = remaining;
            visit(v);
        }
        return;
    }
    let rest_lo: u64 = lo[idx + 1..].iter().sum();
    let rest_hi: u64 = hi[idx + 1..].iter().sum();
    let min_v = lo[idx].max(remaining.saturating_sub(rest_hi));
    let max_v = hi[idx].min(remaining.saturating_sub(rest_lo));
    for value in min_v..=max_v.min(remaining) {
        v[idx] = value;
        enumerate_sum_boxed(v, idx + 1, remaining - value, lo, hi, visit);
    }
}

/// Tightens per-variable intervals inside `[0, bound]^k` by the rows.
/// Returns `None` when some interval empties: no solution exists in the
/// box, hence (by the witness bound) none at all.
fn propagate_box(
    rows: &[Vec<BigInt>],
    b: &[BigInt],
    bound: &BigInt,
) -> Option<Vec<(BigInt, BigInt)>> {
    let k = rows[0].len();
    let mut lo = vec![BigInt::zero(); k];
    let mut hi = vec![bound.clone(); k];
    for _ in 0..PROPAGATION_ROUNDS {
        let mut changed = false;
        for (row, bi) in rows.iter().zip(b) {
            // max achievable contribution of each term given the box
            let contrib_max: Vec<BigInt> = row
                .iter()
                .enumerate()
                .map(|(j, c)| {
                    if c.is_negative() {
                        c * &lo[j]
                    } else {
                        c * &hi[j]
                    }
                })
                .collect();
            let total_max: BigInt = contrib_max.iter().sum();
            if total_max < *bi {
                return None;
            }
            for j in 0..k {
                let c = &row[j];
                if c.is_zero() {
                    continue;
                }
                // rest = max of the row without term j
                let rest = &total_max - &contrib_max[j];
                if c.is_positive() {
                    // c*xj >= bi - rest  =>  xj >= ceil((bi - rest)/c)
                    let need = bi - &rest;
                    if need.is_positive() {
                        let new_lo = div_ceil_big(&need, c);
                        if new_lo > lo[j] {
                            lo[j] = new_lo;
                            changed = true;
                        }
                    }
                } else {
                    // c*xj >= bi - rest  =>  xj <= floor((rest - bi)/(-c))
                    let slack = &rest - bi;
                    let new_hi = if slack.is_negative() {
                        return None;
                    } else {
                        slack / (-c)
                    };
                    if new_hi < hi[j] {
                        hi[j] = new_hi;
                        changed = true;
                    }
                }
                if lo[j] > hi[j] {
                    return None;
                }
            }
        }
        if !changed {
            break;
        }
    }
    Some(lo.into_iter().zip(hi).collect())
}

fn div_ceil_big(a: &BigInt, b: &BigInt) -> BigInt {
    // b > 0 here
    let (q, r) = num_integer::Integer::div_rem(a, b);
    if r.is_zero() || a.is_negative() {
        q
    } else {
        q + 1
    }
}

/// Number of points in the box if it is at most `limit`, else `None`.
fn box_volume(bounds: &[(BigInt, BigInt)], limit: u64) -> Option<u64> {
    let mut total = BigInt::one();
    for (lo, hi) in bounds {
        total *= hi - lo + 1;
        if total > BigInt::from(limit) {
            return None;
        }
    }
    total.to_u64()
}
