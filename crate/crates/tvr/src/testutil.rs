//! Shared fixtures for unit tests.

use crate::model::{Action, Configuration, Transition, Tvass};
use crate::scalar::{from_i64, Scalar};
use crate::woca::Woca;

/// The two-state model used throughout: a loop on `A` adding `(-3, 4)`,
/// a zero-test from `A` to `B`, a loop on `B` adding `(1, -1)` and a
/// return edge adding `(1, 0)`.
pub const EX_TEXT: &str = "\
# two states, one zero-test
dim 2
states A B
trans dAA A add -3 4 A
trans dAB A tst B
trans dBB B add 1 -1 B
trans dBA B add 1 0 A
";

pub fn ex_model<S: Scalar>() -> Tvass<S> {
    crate::modelfile::parse_model(EX_TEXT).expect("fixture parses")
}

/// One state, unit increment `tp` and unit decrement `tm`.
pub fn oca1<S: Scalar>() -> Tvass<S> {
    Tvass::new(
        1,
        vec!["p".into()],
        vec![
            Transition {
                id: "tp".into(),
                source: "p".into(),
                action: Action::Add(vec![from_i64::<S>(1)]),
                target: "p".into(),
            },
            Transition {
                id: "tm".into(),
                source: "p".into(),
                action: Action::Add(vec![from_i64::<S>(-1)]),
                target: "p".into(),
            },
        ],
        true,
    )
    .expect("fixture is valid")
}

/// One state, one counter-neutral transition of weight `+1`.
pub fn w1<S: Scalar>() -> Woca<S> {
    let base = Tvass::new(
        1,
        vec!["p".into()],
        vec![Transition {
            id: "t0".into(),
            source: "p".into(),
            action: Action::Add(vec![S::zero()]),
            target: "p".into(),
        }],
        true,
    )
    .expect("fixture is valid");
    Woca::new(base, vec![1]).expect("fixture weights are valid")
}

pub fn cfg1<S: Scalar>(state: &str, x: i64) -> Configuration<S> {
    Configuration::new(state.to_string(), vec![from_i64(x)])
}

pub fn cfg2<S: Scalar>(state: &str, x0: i64, x1: i64) -> Configuration<S> {
    Configuration::new(state.to_string(), vec![from_i64(x0), from_i64(x1)])
}

pub fn v2(a: i64, b: i64) -> Vec<i64> {
    vec![a, b]
}
