//! Shared fixtures and independent oracles for the integration tests.
//! Everything here deliberately avoids the library's search machinery so
//! that differential checks stay meaningful.

#![allow(dead_code)]

use std::collections::{HashMap, HashSet, VecDeque};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tvr::model::{Configuration, Run, Trace, Tvass};
use tvr::modelfile::parse_model;
use tvr::scalar::Scalar;

pub const EX_TEXT: &str = "\
dim 2
states A B
trans dAA A add -3 4 A
trans dAB A tst B
trans dBB B add 1 -1 B
trans dBA B add 1 0 A
";

pub fn ex<S: Scalar>() -> Tvass<S> {
    parse_model(EX_TEXT).expect("fixture parses")
}

pub fn cfg2<S: Scalar>(state: &str, a: i64, b: i64) -> Configuration<S> {
    Configuration::new(
        state.to_string(),
        vec![tvr::scalar::from_i64(a), tvr::scalar::from_i64(b)],
    )
}

pub fn cfg1<S: Scalar>(state: &str, a: i64) -> Configuration<S> {
    Configuration::new(state.to_string(), vec![tvr::scalar::from_i64(a)])
}

/// The zero-level reachability condition of the running example:
/// `A(0, x) ->* A(0, y)` holds exactly when `x = y` or
/// `x >= 2 and y >= x+2 and (y = x+3 => x >= 5) and (y = x+5 => x >= 3)`.
pub fn ex_zero_level_condition(x: u64, y: u64) -> bool {
    x == y
        || (x >= 2
            && y >= x + 2
            && (y != x + 3 || x >= 5)
            && (y != x + 5 || x >= 3))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Graph walk ignoring counters: a random path of up to `len` transitions
/// starting at `from`.
pub fn random_graph_walk<S: Scalar>(
    model: &Tvass<S>,
    rng: &mut ChaCha8Rng,
    from: &str,
    len: usize,
) -> Trace {
    let mut out = Vec::new();
    let mut cur = from.to_string();
    for _ in 0..len {
        let choices: Vec<&tvr::model::Transition<S>> =
            model.transitions().iter().filter(|t| t.source == cur).collect();
        if choices.is_empty() {
            break;
        }
        let t = choices[rng.gen_range(0..choices.len())];
        out.push(t.id.clone());
        cur = t.target.clone();
    }
    Trace(out)
}

/// Random graph cycle on `state`: retries random walks until one returns.
pub fn random_graph_cycle<S: Scalar>(
    model: &Tvass<S>,
    rng: &mut ChaCha8Rng,
    state: &str,
    max_len: usize,
    attempts: usize,
) -> Option<Trace> {
    for _ in 0..attempts {
        let len = rng.gen_range(1..=max_len);
        let walk = random_graph_walk(model, rng, state, len);
        if walk.is_empty() {
            return None;
        }
        if let Ok(Some((_, end))) = model.path_endpoints(&walk) {
            if end == state {
                return Some(walk);
            }
        }
    }
    None
}

/// Semantics-respecting random run: picks uniformly among enabled
/// transitions, stopping early when stuck.
pub fn random_run<S: Scalar>(
    model: &Tvass<S>,
    rng: &mut ChaCha8Rng,
    start: Configuration<S>,
    len: usize,
) -> Run<S> {
    let mut trace = Vec::new();
    let mut cur = start.clone();
    for _ in 0..len {
        let enabled: Vec<(&str, Configuration<S>)> = model
            .transitions()
            .iter()
            .filter(|t| t.source == cur.state)
            .filter_map(|t| {
                model.step(&cur, &t.id).expect("valid ids").map(|c| (t.id.as_str(), c))
            })
            .collect();
        if enabled.is_empty() {
            break;
        }
        let (id, next) = enabled[rng.gen_range(0..enabled.len())].clone();
        trace.push(id.to_string());
        cur = next;
    }
    Run::replay(model, start, &Trace(trace)).expect("ids valid").expect("steps were enabled")
}

/// Independent closure enumeration: plain breadth-first search with a
/// node budget. `None` when the budget runs out before the frontier
/// empties; otherwise the full reachable set.
pub fn enumerate_closure<S: Scalar>(
    model: &Tvass<S>,
    from: &Configuration<S>,
    budget: usize,
) -> Option<HashSet<(String, Vec<S>)>> {
    let mut seen: HashSet<(String, Vec<S>)> = HashSet::new();
    let root = (from.state.clone(), from.counters.clone());
    seen.insert(root.clone());
    let mut queue = VecDeque::from([root]);
    let mut expanded = 0usize;
    while let Some((state, counters)) = queue.pop_front() {
        expanded += 1;
        if expanded > budget {
            return None;
        }
        let cfg = Configuration::new(state, counters);
        for t in model.transitions() {
            if t.source != cfg.state {
                continue;
            }
            if let Some(next) = model.step(&cfg, &t.id).expect("valid ids") {
                let key = (next.state, next.counters);
                if seen.insert(key.clone()) {
                    queue.push_back(key);
                }
            }
        }
    }
    Some(seen)
}

/// Cycle existence on the step graph induced by a closed set, by
/// iterative three-color search. Independent of the library's deciders.
pub fn closed_set_has_cycle<S: Scalar>(
    model: &Tvass<S>,
    closed: &HashSet<(String, Vec<S>)>,
) -> bool {
    let nodes: Vec<&(String, Vec<S>)> = closed.iter().collect();
    let index: HashMap<&(String, Vec<S>), usize> =
        nodes.iter().enumerate().map(|(i, n)| (*n, i)).collect();
    let succ: Vec<Vec<usize>> = nodes
        .iter()
        .map(|(state, counters)| {
            let cfg = Configuration::new(state.clone(), counters.clone());
            model
                .transitions()
                .iter()
                .filter(|t| t.source == *state)
                .filter_map(|t| model.step(&cfg, &t.id).expect("valid ids"))
                .map(|next| index[&(next.state, next.counters)])
                .collect()
        })
        .collect();
    let mut color = vec![0u8; nodes.len()];
    for root in 0..nodes.len() {
        if color[root] != 0 {
            continue;
        }
        let mut stack = vec![(root, 0usize)];
        color[root] = 1;
        while let Some(&mut (node, ref mut next)) = stack.last_mut() {
            if *next >= succ[node].len() {
                color[node] = 2;
                stack.pop();
                continue;
            }
            let to = succ[node][*next];
            *next += 1;
            match color[to] {
                1 => return true,
                0 => {
                    color[to] = 1;
                    stack.push((to, 0));
                }
                _ => {}
            }
        }
    }
    false
}
