#![allow(dead_code)]

use maxalg_core::expr::MmpsExpression as E;
use maxalg_core::fa::FiniteAutomaton;
use maxalg_core::mpa::MaxPlusAutomaton;
use maxalg_core::{TropicalMatrix, Weight};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const EPS: Weight = Weight::EPSILON;
pub const TOP: Weight = Weight::TOP;

pub fn w(v: i32) -> Weight {
    Weight::from(v)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Integers in `-20..=20`, plus `ε` and `⊤`.
pub fn extended_weight() -> impl Strategy<Value = Weight> {
    prop_oneof![
        6 => (-20i32..=20).prop_map(Weight::from),
        1 => Just(EPS),
        1 => Just(TOP),
    ]
}

/// Integers in `-20..=20` and `ε`.
pub fn max_plus_weight() -> impl Strategy<Value = Weight> {
    prop_oneof![4 => (-20i32..=20).prop_map(Weight::from), 1 => Just(EPS)]
}

pub fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = TropicalMatrix> {
    proptest::collection::vec(max_plus_weight(), rows * cols)
        .prop_map(move |e| TropicalMatrix::new(rows, cols, e).unwrap())
}

pub fn finite_vec(len: usize) -> impl Strategy<Value = Vec<Weight>> {
    proptest::collection::vec((-20i32..=20).prop_map(Weight::from), len)
}

/// Max-min-plus expressions over `x1..x3` and `u1`.
pub fn mmp_expression() -> impl Strategy<Value = E> {
    let leaf = prop_oneof![
        ((0usize..3), -5i32..=5).prop_map(|(i, c)| E::var_plus(i, c)),
        (0usize..3).prop_map(E::var),
        (-5i32..=5).prop_map(|c| E::plus(E::input(0), E::constant(c))),
        (-5i32..=5).prop_map(E::constant),
    ];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| E::max(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| E::min(a, b)),
            (inner, -5i32..=5).prop_map(|(a, c)| E::plus(a, E::constant(c))),
        ]
    })
}

fn sample_weight(rng: &mut ChaCha8Rng, p_eps: f64) -> Weight {
    if rng.gen_bool(p_eps) {
        EPS
    } else {
        w(rng.gen_range(0..=9))
    }
}

/// A random automaton over `{a, b}` with about half of the weights finite.
pub fn random_mpa(rng: &mut ChaCha8Rng, states: usize) -> MaxPlusAutomaton {
    let mut alpha: Vec<Weight> = (0..states).map(|_| sample_weight(rng, 0.5)).collect();
    if alpha.iter().all(|x| x.is_epsilon()) {
        alpha[rng.gen_range(0..states)] = w(0);
    }
    let beta = (0..states).map(|_| sample_weight(rng, 0.5)).collect();
    let mu = (0..2)
        .map(|_| {
            let e = (0..states * states).map(|_| sample_weight(rng, 0.5)).collect();
            TropicalMatrix::new(states, states, e).unwrap()
        })
        .collect();
    MaxPlusAutomaton::new(
        (1..=states).map(|i| i.to_string()).collect(),
        vec!["a".into(), "b".into()],
        alpha,
        mu,
        beta,
    )
    .unwrap()
}

/// A random automaton over `{a, b}`.
pub fn random_nfa(rng: &mut ChaCha8Rng, states: usize, density: f64) -> FiniteAutomaton {
    let mut fa = FiniteAutomaton::new(
        (0..states).map(|i| i.to_string()).collect(),
        vec!["a".into(), "b".into()],
    );
    for s in 0..states {
        for a in 0..2 {
            for t in 0..states {
                if rng.gen_bool(density) {
                    fa.add_transition_idx(s, a, t).unwrap();
                }
            }
        }
        if rng.gen_bool(0.4) {
            fa.set_final(s).unwrap();
        }
    }
    fa.set_initial(0).unwrap();
    fa
}
