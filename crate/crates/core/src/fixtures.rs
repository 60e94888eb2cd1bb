//! Reference models used by tests, examples and the CLI.
//!
//! * the three-state, two-symbol max-plus automaton with weights
//!   `μ(a) = [[ε,1,3],[ε,ε,4],[ε,ε,ε]]`, `μ(b) = [[ε,ε,ε],[2,1,ε],[7,5,1]]`,
//!   `α = (0,ε,ε)`, `β = (2,ε,ε)`, and the switching system built from it;
//! * a three-machine production line with two routing modes and processing
//!   times `τ`;
//! * a two-mode system with a continuous input, used for closed-loop runs.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use crate::expr::MmpsExpression as E;
use crate::matrix::TropicalMatrix;
use crate::matrix_form::{MatrixForm, ModeDynamics};
use crate::mpa::MaxPlusAutomaton;
use crate::smpl::{ControllerHook, Dims, ModeGuard, SmplSystem, SwitchingKind, SwitchingRule};
use crate::weight::Weight;

const EPS: Weight = Weight::EPSILON;

fn w(v: i32) -> Weight {
    Weight::from(v)
}

/// `(μ(a), μ(b))`.
pub fn gaubert_mu() -> (TropicalMatrix, TropicalMatrix) {
    let a = TropicalMatrix::from_rows(&[[EPS, w(1), w(3)], [EPS, EPS, w(4)], [EPS, EPS, EPS]])
        .expect("3x3");
    let b = TropicalMatrix::from_rows(&[[EPS, EPS, EPS], [w(2), w(1), EPS], [w(7), w(5), w(1)]])
        .expect("3x3");
    (a, b)
}

pub fn gaubert_mpa() -> MaxPlusAutomaton {
    let (a, b) = gaubert_mu();
    MaxPlusAutomaton::new(
        vec!["1".into(), "2".into(), "3".into()],
        vec!["a".into(), "b".into()],
        vec![w(0), EPS, EPS],
        vec![a, b],
        vec![w(2), EPS, EPS],
    )
    .expect("valid automaton")
}

/// The switching system whose modes are `μ(σ)ᵀ` and whose switching rule
/// admits mode `σ` only on input `σ` and only if the next state is not all
/// `ε`.
pub fn gaubert_smpl() -> SmplSystem {
    SmplSystem::from_mpa(&gaubert_mpa())
}

/// State update of the production line in routing mode `l1`, over
/// `x = (x1, x2, x3)` (0-based `Var(0..3)`).
pub fn production_line_mode_l1(tau: [i32; 3]) -> Vec<E> {
    let [t1, t2, t3] = tau;
    vec![
        E::max_of([E::var_plus(0, t1), E::var(1), E::var_plus(2, t3)]),
        E::max(E::var_plus(0, t1), E::var_plus(1, t2)),
        production_line_x3(tau),
    ]
}

/// State update of the production line in routing mode `l2`.
pub fn production_line_mode_l2(tau: [i32; 3]) -> Vec<E> {
    let [t1, t2, t3] = tau;
    vec![
        E::max(E::var_plus(0, t1), E::var(1)),
        E::max_of([E::var_plus(0, t1), E::var_plus(1, t2), E::var_plus(2, t3)]),
        production_line_x3(tau),
    ]
}

fn production_line_x3(tau: [i32; 3]) -> E {
    let [t1, t2, t3] = tau;
    E::max_of([
        E::var_plus(0, t1),
        E::var_plus(1, t2),
        E::var_plus(2, 2 * t3),
        E::min(E::var_plus(0, t1 + t3), E::var_plus(1, t2 + t3)),
    ])
}

/// The production line as a two-mode switching system: `w ∈ {l1, l2}` picks
/// the routing mode, which is admitted only if its next state has a finite
/// entry. `x(0) = (0, 0, ε)`, `y = x3`.
pub fn production_line_smpl(tau: [i32; 3]) -> SmplSystem {
    let output = vec![E::var(2)];
    let modes = vec![
        ModeDynamics::expressions(production_line_mode_l1(tau), output.clone(), 0).expect("n = 3"),
        ModeDynamics::expressions(production_line_mode_l2(tau), output, 0).expect("n = 3"),
    ];
    let names = vec!["l1".to_string(), "l2".to_string()];
    SmplSystem::new(
        Dims {
            n: 3,
            n_u: 0,
            n_v: 0,
            n_y: 1,
            n_r: 0,
        },
        names.clone(),
        modes,
        SwitchingRule::symbol_select(SwitchingKind::Constrained, names.clone(), ModeGuard::HasFiniteEntry),
        vec![w(0), w(0), EPS],
    )
    .expect("valid system")
    .with_discrete_inputs(names)
}

/// Two machines fed by one continuous input `u` and disturbed by an
/// exogenous release time `r`:
///
/// ```text
/// mode p:  x⁺ = [[2, ε], [1, 3]] ⊗ x ⊕ [0, ε]ᵀ ⊗ u ⊕ [ε, 0]ᵀ ⊗ r
/// mode q:  x⁺ = [[1, 4], [ε, 2]] ⊗ x ⊕ [ε, 1]ᵀ ⊗ u ⊕ [0, ε]ᵀ ⊗ r
/// y = max(x1, x2)
/// ```
///
/// `w ∈ {p, q}` selects the mode. With `controller` set to a static feedback
/// the input follows `u(k) = [1, 0] ⊗ x(k-1)`.
pub fn feedback_smpl(closed_loop: bool) -> SmplSystem {
    let a_p = TropicalMatrix::from_rows(&[[w(2), EPS], [w(1), w(3)]]).expect("2x2");
    let a_q = TropicalMatrix::from_rows(&[[w(1), w(4)], [EPS, w(2)]]).expect("2x2");
    // input columns: u, then r
    let b_p = TropicalMatrix::from_rows(&[[w(0), EPS], [EPS, w(0)]]).expect("2x2");
    let b_q = TropicalMatrix::from_rows(&[[EPS, w(0)], [w(1), EPS]]).expect("2x2");
    let c = TropicalMatrix::from_rows(&[[w(0), w(0)]]).expect("1x2");
    let d = TropicalMatrix::epsilon(1, 2);
    let modes = vec![
        ModeDynamics::Matrix(MatrixForm::linear(a_p, b_p, c.clone(), d.clone()).expect("shapes")),
        ModeDynamics::Matrix(MatrixForm::linear(a_q, b_q, c, d).expect("shapes")),
    ];
    let names = vec!["p".to_string(), "q".to_string()];
    let sys = SmplSystem::new(
        Dims {
            n: 2,
            n_u: 1,
            n_v: 0,
            n_y: 1,
            n_r: 1,
        },
        names.clone(),
        modes,
        SwitchingRule::symbol_select(SwitchingKind::Constrained, names.clone(), ModeGuard::HasFiniteEntry),
        vec![w(0), EPS],
    )
    .expect("valid system")
    .with_discrete_inputs(names);
    if closed_loop {
        let k_u = TropicalMatrix::from_rows(&[[w(1), w(0)]]).expect("1x2");
        sys.with_controller(ControllerHook::static_feedback(k_u, TropicalMatrix::epsilon(0, 2)))
            .expect("controller shapes")
    } else {
        sys
    }
}
