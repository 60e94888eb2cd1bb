//! Max-algebraic hybrid automata
//! `(ℚ, 𝕏, 𝕌, 𝕍, 𝕐, Init, F, H, Inv, E, G, R, Λ)`.
//!
//! A step from `(q, x)` under input `(u, v, w)` first resolves the discrete
//! transition, then flows. Staying in `q` needs `(x, u, v, w) ∈ Inv(q)`;
//! moving along `(q, q')` needs `(x, u, v, w) ∈ G(q, q')`. The successor in
//! mode `m` is `(m, F(m, R(x), u))`.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::expr::MmpsExpression;
use crate::fa::FiniteAutomaton;
use crate::matrix::has_finite_entry;
use crate::matrix_form::{transition_graph_f, transition_graph_h, ModeDynamics, VarLabel};
use crate::smpl::{ControllerHook, SmplOrigin, SmplState, SmplSystem, StepInput, SwitchContext, ExogenousInput};
use crate::weight::Weight;
use crate::{Error, Result};

/// Input valuation `(u, v, w)`: continuous `u ∈ 𝕌`, real-valued control
/// `v` and an optional discrete symbol `w ∈ 𝕍`.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct HybridInput {
    pub continuous: Vec<Weight>,
    pub control: Vec<Weight>,
    pub discrete: Option<String>,
}

impl HybridInput {
    pub fn symbol(w: impl Into<String>) -> Self {
        HybridInput {
            discrete: Some(w.into()),
            ..Default::default()
        }
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct HybridState {
    pub q: usize,
    pub x: Vec<Weight>,
}

/// A mode-selection function shared by invariants and guards built from a
/// switching system.
pub trait ModeSelector: Send + Sync {
    fn successors(&self, q: usize, x: &[Weight], input: &HybridInput) -> Result<BTreeSet<usize>>;

    /// Discrete inputs that can select `to` when the automaton is in `from`.
    fn enabling_inputs(&self, from: usize, to: usize) -> BTreeSet<String>;
}

pub type StatePredicate = Arc<dyn Fn(usize, &[Weight], &HybridInput) -> bool + Send + Sync>;

pub type StateMap = Arc<dyn Fn(&[Weight]) -> Vec<Weight> + Send + Sync>;

#[derive(Clone)]
pub enum Predicate {
    True,
    False,
    /// Holds iff the automaton's selector includes this mode.
    Selects(usize),
    Custom(StatePredicate),
}

impl fmt::Debug for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Predicate::True => f.write_str("True"),
            Predicate::False => f.write_str("False"),
            Predicate::Selects(m) => write!(f, "Selects({m})"),
            Predicate::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

#[derive(Clone)]
pub enum Reset {
    Identity,
    Map(StateMap),
}

impl fmt::Debug for Reset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Reset::Identity => f.write_str("Identity"),
            Reset::Map(_) => f.write_str("Map(..)"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub guard: Predicate,
    pub reset: Reset,
    /// Discrete inputs that can enable the guard; used by the abstraction.
    pub labels: BTreeSet<String>,
}

#[derive(Clone)]
pub enum Admissible {
    All,
    Custom(StatePredicate),
}

impl fmt::Debug for Admissible {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Admissible::All => f.write_str("All"),
            Admissible::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum HybridOrigin {
    Direct,
    OpenLoopSmpl { from_mpa: bool },
    ClosedLoopSmpl,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HybridStepRecord {
    pub k: usize,
    pub q: usize,
    pub x: Vec<Weight>,
    pub y: Vec<Weight>,
    /// Modes reachable in this step.
    pub successors: BTreeSet<usize>,
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct HybridRun {
    pub records: Vec<HybridStepRecord>,
    /// Step at which the execution blocked.
    pub halted_at: Option<usize>,
}

#[derive(Clone)]
pub struct HybridAutomaton {
    mode_names: Vec<String>,
    state_dim: usize,
    input_dim: usize,
    control_dim: usize,
    output_dim: usize,
    discrete_inputs: Vec<String>,
    init: Vec<HybridState>,
    start: usize,
    dynamics: Vec<ModeDynamics>,
    invariants: Vec<Predicate>,
    edges: Vec<Edge>,
    admissible: Admissible,
    selector: Option<Arc<dyn ModeSelector>>,
    origin: HybridOrigin,
}

impl fmt::Debug for HybridAutomaton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HybridAutomaton")
            .field("modes", &self.mode_names)
            .field("state_dim", &self.state_dim)
            .field("input_dim", &self.input_dim)
            .field("control_dim", &self.control_dim)
            .field("discrete_inputs", &self.discrete_inputs)
            .field("init", &self.init)
            .field("invariants", &self.invariants)
            .field("edges", &self.edges)
            .field("origin", &self.origin)
            .finish()
    }
}

impl HybridAutomaton {
    /// An automaton with always-true invariants, no edges, and every input
    /// admissible. All modes must share state, input and output dimensions.
    pub fn new(
        mode_names: Vec<String>,
        dynamics: Vec<ModeDynamics>,
        init: Vec<HybridState>,
        discrete_inputs: Vec<String>,
        control_dim: usize,
    ) -> Result<Self> {
        if dynamics.is_empty() || mode_names.len() != dynamics.len() {
            return Err(Error::InvalidModel("need one name per mode and at least one mode".into()));
        }
        let (n, n_u, n_y) = (
            dynamics[0].state_dim(),
            dynamics[0].input_dim(),
            dynamics[0].output_dim(),
        );
        if dynamics
            .iter()
            .any(|d| d.state_dim() != n || d.input_dim() != n_u || d.output_dim() != n_y)
        {
            return Err(Error::InvalidModel("modes disagree on dimensions".into()));
        }
        for s in &init {
            if s.q >= dynamics.len() {
                return Err(Error::InvalidMode {
                    mode: s.q,
                    modes: dynamics.len(),
                });
            }
            if s.x.len() != n {
                return Err(Error::ShapeMismatch {
                    op: "initial hybrid state",
                    left: (n, 1),
                    right: (s.x.len(), 1),
                });
            }
        }
        if init.is_empty() {
            return Err(Error::InvalidModel("Init is empty".into()));
        }
        let modes = dynamics.len();
        Ok(HybridAutomaton {
            mode_names,
            state_dim: n,
            input_dim: n_u,
            control_dim,
            output_dim: n_y,
            discrete_inputs,
            init,
            start: 0,
            dynamics,
            invariants: vec![Predicate::True; modes],
            edges: Vec::new(),
            admissible: Admissible::All,
            selector: None,
            origin: HybridOrigin::Direct,
        })
    }

    fn check_predicate(&self, p: &Predicate) -> Result<()> {
        match p {
            Predicate::Selects(m) if *m >= self.dynamics.len() => Err(Error::InvalidMode {
                mode: *m,
                modes: self.dynamics.len(),
            }),
            Predicate::Selects(_) if self.selector.is_none() => {
                Err(Error::InvalidModel("Selects predicate without a mode selector".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn set_invariant(&mut self, q: usize, p: Predicate) -> Result<()> {
        if q >= self.dynamics.len() {
            return Err(Error::InvalidMode {
                mode: q,
                modes: self.dynamics.len(),
            });
        }
        self.check_predicate(&p)?;
        self.invariants[q] = p;
        Ok(())
    }

    pub fn add_edge(&mut self, edge: Edge) -> Result<()> {
        let modes = self.dynamics.len();
        for m in [edge.from, edge.to] {
            if m >= modes {
                return Err(Error::InvalidMode { mode: m, modes });
            }
        }
        self.check_predicate(&edge.guard)?;
        self.edges.push(edge);
        Ok(())
    }

    pub fn set_selector(&mut self, selector: Arc<dyn ModeSelector>) {
        self.selector = Some(selector);
    }

    pub fn set_admissible(&mut self, a: Admissible) {
        self.admissible = a;
    }

    /// Which element of `Init` a deterministic [`run`](Self::run) starts from.
    pub fn set_start(&mut self, index: usize) -> Result<()> {
        if index >= self.init.len() {
            return Err(Error::IndexOutOfRange {
                kind: "initial state",
                index,
                dim: self.init.len(),
            });
        }
        self.start = index;
        Ok(())
    }

    pub fn mode_names(&self) -> &[String] {
        &self.mode_names
    }
    pub fn mode_count(&self) -> usize {
        self.dynamics.len()
    }
    pub fn state_dim(&self) -> usize {
        self.state_dim
    }
    pub fn input_dim(&self) -> usize {
        self.input_dim
    }
    pub fn control_dim(&self) -> usize {
        self.control_dim
    }
    pub fn output_dim(&self) -> usize {
        self.output_dim
    }
    pub fn discrete_inputs(&self) -> &[String] {
        &self.discrete_inputs
    }
    pub fn init(&self) -> &[HybridState] {
        &self.init
    }
    pub fn start_state(&self) -> &HybridState {
        &self.init[self.start]
    }
    pub fn dynamics(&self) -> &[ModeDynamics] {
        &self.dynamics
    }
    pub fn invariants(&self) -> &[Predicate] {
        &self.invariants
    }
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }
    pub fn origin(&self) -> HybridOrigin {
        self.origin
    }

    /// True when every mode is max-min-plus and every reset is the identity.
    pub fn satisfies_assumption(&self) -> bool {
        self.dynamics.iter().all(ModeDynamics::is_max_min_plus)
            && self.edges.iter().all(|e| matches!(e.reset, Reset::Identity))
    }

    fn check_input(&self, input: &HybridInput) -> Result<()> {
        if input.continuous.len() != self.input_dim || input.control.len() != self.control_dim {
            return Err(Error::ShapeMismatch {
                op: "hybrid input",
                left: (self.input_dim, self.control_dim),
                right: (input.continuous.len(), input.control.len()),
            });
        }
        if let Some(w) = &input.discrete {
            if !self.discrete_inputs.contains(w) {
                return Err(Error::UnknownSymbol(w.clone()));
            }
        }
        Ok(())
    }

    fn holds(
        &self,
        p: &Predicate,
        q: usize,
        x: &[Weight],
        input: &HybridInput,
        selected: &mut Option<BTreeSet<usize>>,
    ) -> Result<bool> {
        Ok(match p {
            Predicate::True => true,
            Predicate::False => false,
            Predicate::Selects(m) => {
                if selected.is_none() {
                    let sel = self
                        .selector
                        .as_ref()
                        .ok_or_else(|| Error::InvalidModel("Selects predicate without a mode selector".into()))?;
                    *selected = Some(sel.successors(q, x, input)?);
                }
                selected.as_ref().is_some_and(|s| s.contains(m))
            }
            Predicate::Custom(f) => f(q, x, input),
        })
    }

    /// All successors of `s` under `input`; an empty set means the
    /// execution blocks.
    pub fn hybrid_step(&self, s: &HybridState, input: &HybridInput) -> Result<BTreeSet<HybridState>> {
        self.check_input(input)?;
        if s.q >= self.dynamics.len() || s.x.len() != self.state_dim {
            return Err(Error::InvalidModel(format!(
                "hybrid state ({}, {} entries) does not fit the automaton",
                s.q,
                s.x.len()
            )));
        }
        if let Admissible::Custom(f) = &self.admissible {
            if !f(s.q, &s.x, input) {
                return Err(Error::InadmissibleInput { mode: s.q });
            }
        }
        let mut selected = None;
        let mut out = BTreeSet::new();
        if self.holds(&self.invariants[s.q], s.q, &s.x, input, &mut selected)? {
            let x = self.dynamics[s.q].next_state(&s.x, &input.continuous)?;
            out.insert(HybridState { q: s.q, x });
        }
        for e in self.edges.iter().filter(|e| e.from == s.q) {
            if self.holds(&e.guard, s.q, &s.x, input, &mut selected)? {
                let reset = match &e.reset {
                    Reset::Identity => s.x.clone(),
                    Reset::Map(f) => f(&s.x),
                };
                let x = self.dynamics[e.to].next_state(&reset, &input.continuous)?;
                out.insert(HybridState { q: e.to, x });
            }
        }
        Ok(out)
    }

    /// `H(q, x, u)`.
    pub fn output(&self, s: &HybridState, input: &HybridInput) -> Result<Vec<Weight>> {
        self.dynamics[s.q].output(&s.x, &input.continuous)
    }

    /// Deterministic execution from the start state, continuing in the
    /// smallest successor mode at each step.
    pub fn run(&self, inputs: &[HybridInput]) -> Result<HybridRun> {
        self.run_from(self.start_state().clone(), inputs)
    }

    pub fn run_from(&self, start: HybridState, inputs: &[HybridInput]) -> Result<HybridRun> {
        let mut state = start;
        let mut run = HybridRun::default();
        for (i, input) in inputs.iter().enumerate() {
            let k = i + 1;
            let succ = self.hybrid_step(&state, input)?;
            let Some(next) = succ.iter().next().cloned() else {
                run.halted_at = Some(k);
                break;
            };
            let y = self.output(&next, input)?;
            run.records.push(HybridStepRecord {
                k,
                q: next.q,
                x: next.x.clone(),
                y,
                successors: succ.iter().map(|s| s.q).collect(),
            });
            state = next;
        }
        Ok(run)
    }

    /// Open-loop switching system to hybrid automaton: one mode per
    /// switching mode, `Inv(q) = {q ∈ φ(q, x, ·)}`,
    /// `G(q, q') = {q' ∈ φ(q, x, ·)}` on every ordered pair `q ≠ q'`,
    /// identity resets, `Init = {(q, x0)}` for every `q`.
    ///
    /// The continuous input is `u ++ r`, the control input `v`.
    pub fn from_smpl_open(s: &SmplSystem) -> Result<Self> {
        if !s.is_open_loop() {
            return Err(Error::ClosedLoopSystem);
        }
        let selector = Arc::new(OpenLoopSelector { sys: s.clone() });
        let from_mpa = s.origin() == SmplOrigin::MaxPlusAutomaton;
        Self::from_smpl_with(
            s,
            s.modes().to_vec(),
            s.x0().to_vec(),
            s.dims().n_v,
            selector,
            HybridOrigin::OpenLoopSmpl { from_mpa },
        )
    }

    /// Closed-loop switching system to hybrid automaton over the augmented
    /// state `z = [l, x, u, v]`, which after step `k` holds
    /// `(l(k) + 1, x(k), u(k), v(k))`. The controller is folded into the
    /// mode dynamics, so it must be a pass-through or a static max-plus
    /// feedback.
    ///
    /// The continuous input is `u ++ v ++ r` for a pass-through controller
    /// and `r` otherwise; there is no separate control input.
    pub fn from_smpl_closed(s: &SmplSystem) -> Result<Self> {
        let d = s.dims();
        let pass = match s.controller() {
            ControllerHook::PassThrough => true,
            ControllerHook::StaticFeedback { .. } => false,
            ControllerHook::Custom(_) => return Err(Error::NonRepresentableController),
        };
        let (ext_u, ext_v) = if pass { (d.n_u, d.n_v) } else { (0, 0) };
        let r_off = ext_u + ext_v;
        let in_dim = r_off + d.n_r;
        let x_var = |i: usize| MmpsExpression::var(1 + i);
        let feedback = |k: &crate::matrix::TropicalMatrix, row: usize| {
            MmpsExpression::max_of(
                k.row_slice(row)
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_epsilon())
                    .map(|(i, &c)| MmpsExpression::plus(x_var(i), MmpsExpression::Const(c))),
            )
        };
        let u_new: Vec<MmpsExpression> = (0..d.n_u)
            .map(|j| match s.controller() {
                ControllerHook::StaticFeedback { k_u, .. } => feedback(k_u, j),
                _ => MmpsExpression::input(j),
            })
            .collect();
        let v_new: Vec<MmpsExpression> = (0..d.n_v)
            .map(|j| match s.controller() {
                ControllerHook::StaticFeedback { k_v, .. } => feedback(k_v, j),
                _ => MmpsExpression::input(ext_u + j),
            })
            .collect();

        let mut dynamics = Vec::with_capacity(s.mode_count());
        for (q, mode) in s.modes().iter().enumerate() {
            let (state, output) = mode.to_expressions();
            let sub_state = |e: &MmpsExpression| match e {
                MmpsExpression::Var(i) => Some(x_var(*i)),
                MmpsExpression::InputVar(j) if *j < d.n_u => Some(u_new[*j].clone()),
                MmpsExpression::InputVar(j) => Some(MmpsExpression::input(r_off + j - d.n_u)),
                _ => None,
            };
            let sub_output = |e: &MmpsExpression| match e {
                MmpsExpression::Var(i) => Some(x_var(*i)),
                MmpsExpression::InputVar(j) if *j < d.n_u => Some(MmpsExpression::var(1 + d.n + j)),
                MmpsExpression::InputVar(j) => Some(MmpsExpression::input(r_off + j - d.n_u)),
                _ => None,
            };
            let mut z_next = vec![MmpsExpression::constant(Weight::finite((q + 1) as f64))];
            z_next.extend(state.iter().map(|e| e.substitute(&sub_state)));
            z_next.extend(u_new.iter().cloned());
            z_next.extend(v_new.iter().cloned());
            let y = output.iter().map(|e| e.substitute(&sub_output)).collect();
            dynamics.push(ModeDynamics::expressions(z_next, y, in_dim)?);
        }

        let mut z0 = vec![Weight::finite((s.initial_mode() + 1) as f64)];
        z0.extend_from_slice(s.x0());
        z0.extend(core::iter::repeat_n(Weight::EPSILON, d.n_u + d.n_v));
        let selector = Arc::new(ClosedLoopSelector {
            sys: s.clone(),
            pass,
        });
        Self::from_smpl_with(s, dynamics, z0, 0, selector, HybridOrigin::ClosedLoopSmpl)
    }

    fn from_smpl_with(
        s: &SmplSystem,
        dynamics: Vec<ModeDynamics>,
        x0: Vec<Weight>,
        control_dim: usize,
        selector: Arc<dyn ModeSelector>,
        origin: HybridOrigin,
    ) -> Result<Self> {
        let modes = s.mode_count();
        let init = (0..modes).map(|q| HybridState { q, x: x0.clone() }).collect();
        let mut h = HybridAutomaton::new(
            s.mode_names().to_vec(),
            dynamics,
            init,
            s.discrete_inputs().to_vec(),
            control_dim,
        )?;
        h.set_selector(selector.clone());
        for q in 0..modes {
            h.set_invariant(q, Predicate::Selects(q))?;
        }
        for q in 0..modes {
            for q2 in (0..modes).filter(|&q2| q2 != q) {
                h.add_edge(Edge {
                    from: q,
                    to: q2,
                    guard: Predicate::Selects(q2),
                    reset: Reset::Identity,
                    labels: selector.enabling_inputs(q, q2),
                })?;
            }
        }
        h.start = s.initial_mode();
        h.origin = origin;
        Ok(h)
    }

    fn abstraction_state_name(&self, q: usize, label: VarLabel) -> String {
        format!("({},{})", self.mode_names[q], label)
    }

    /// Finite-state abstraction over `ℚ × (X_var ∪ U_var)` and alphabet
    /// `𝕍 ∪ {1}`:
    ///
    /// * `(q, v) -1-> (q, x_j)` for every edge `(v, x_j)` of `Γ_F^(q)`;
    /// * `(q, v) -w-> (q', v)` for every edge `(q, q')` and label `w`;
    /// * `(q, x_j)` is initial if some `(q, x) ∈ Init` has `x_j ≠ ε`, and
    ///   `(q, u_p)` if `u_p` feeds a state in `Γ_F^(q)`;
    /// * `(q, v)` is final if `v` feeds an output in `Γ_H^(q)`.
    pub fn finite_abstraction(&self) -> Result<FiniteAutomaton> {
        if !self.satisfies_assumption() {
            return Err(Error::AssumptionViolated(
                "dynamics must be max-min-plus and every reset the identity",
            ));
        }
        if self.init.iter().any(|s| !has_finite_entry(&s.x)) {
            return Err(Error::AssumptionViolated("initial states need a finite entry"));
        }
        if self.discrete_inputs.iter().any(|w| w == "1") {
            return Err(Error::InvalidModel("discrete input `1` clashes with the step label".into()));
        }
        let n = self.state_dim;
        let n_u = self.input_dim;
        let labels: Vec<VarLabel> = (0..n)
            .map(VarLabel::State)
            .chain((0..n_u).map(VarLabel::Input))
            .collect();
        let width = labels.len();
        let index = |q: usize, l: VarLabel| {
            q * width
                + match l {
                    VarLabel::State(i) => i,
                    VarLabel::Input(p) => n + p,
                    VarLabel::Output(_) => unreachable!("outputs are not abstraction states"),
                }
        };
        let mut names = Vec::with_capacity(self.mode_count() * width);
        for q in 0..self.mode_count() {
            for &l in &labels {
                names.push(self.abstraction_state_name(q, l));
            }
        }
        let mut alphabet = self.discrete_inputs.clone();
        alphabet.push("1".to_string());
        let step = alphabet.len() - 1;
        let mut fa = FiniteAutomaton::new(names, alphabet);

        for q in 0..self.mode_count() {
            let mf = self.dynamics[q].to_matrix_form()?;
            let gf = transition_graph_f(&mf);
            let gh = transition_graph_h(&mf);
            for &(src, dst) in &gf.edges {
                fa.add_transition_idx(index(q, src), step, index(q, dst))?;
                if let VarLabel::Input(_) = src {
                    fa.set_initial(index(q, src))?;
                }
            }
            for &(src, _) in &gh.edges {
                fa.set_final(index(q, src))?;
            }
        }
        for e in &self.edges {
            for w in &e.labels {
                let a = fa.symbol_index(w)?;
                for &l in &labels {
                    fa.add_transition_idx(index(e.from, l), a, index(e.to, l))?;
                }
            }
        }
        for s in &self.init {
            for (j, v) in s.x.iter().enumerate() {
                if !v.is_epsilon() {
                    fa.set_initial(index(s.q, VarLabel::State(j)))?;
                }
            }
        }
        Ok(fa)
    }

    /// The fused abstraction of an automaton obtained from a max-plus
    /// automaton: states `ℚ × X_var`, alphabet `Σ`, and
    /// `(q', x_j) ∈ δ((q, x_i), σ)` iff `σ` selects `q'` from `q` and
    /// `[A^(q')]_ji ≠ ε`. Initial states are `(q, x_i)` with `x_i(0) ≠ ε`,
    /// final states `(q, x_j)` with `C_j ≠ ε`.
    pub fn specialized_abstraction_for_mpa_translation(&self) -> Result<FiniteAutomaton> {
        if self.origin != (HybridOrigin::OpenLoopSmpl { from_mpa: true }) {
            return Err(Error::WrongProvenance);
        }
        let selector = self.selector.as_ref().ok_or(Error::WrongProvenance)?;
        let n = self.state_dim;
        let mut names = Vec::new();
        for q in 0..self.mode_count() {
            for i in 0..n {
                names.push(self.abstraction_state_name(q, VarLabel::State(i)));
            }
        }
        let mut fa = FiniteAutomaton::new(names, self.discrete_inputs.clone());
        let mats = self
            .dynamics
            .iter()
            .map(ModeDynamics::to_matrix_form)
            .collect::<Result<Vec<_>>>()?;
        for q in 0..self.mode_count() {
            for (q2, mf) in mats.iter().enumerate() {
                let a = &mf.a()[0];
                for sigma in selector.enabling_inputs(q, q2) {
                    let s = fa.symbol_index(&sigma)?;
                    for i in 0..n {
                        for j in 0..n {
                            if !a.get(j, i).is_epsilon() {
                                fa.add_transition_idx(q * n + i, s, q2 * n + j)?;
                            }
                        }
                    }
                }
            }
        }
        let x0 = &self.start_state().x;
        for (q, m) in mats.iter().enumerate() {
            let c = &m.c()[0];
            for (i, x) in x0.iter().enumerate() {
                if !x.is_epsilon() {
                    fa.set_initial(q * n + i)?;
                }
                if !c.get(0, i).is_epsilon() {
                    fa.set_final(q * n + i)?;
                }
            }
        }
        Ok(fa)
    }
}

/// The state of the abstraction that tracks `(mode, state variable)`.
pub fn abstraction_state(h: &HybridAutomaton, q: usize, label: VarLabel) -> String {
    h.abstraction_state_name(q, label)
}

struct OpenLoopSelector {
    sys: SmplSystem,
}

impl ModeSelector for OpenLoopSelector {
    fn successors(&self, q: usize, x: &[Weight], input: &HybridInput) -> Result<BTreeSet<usize>> {
        let n_u = self.sys.dims().n_u;
        self.sys.successor_modes(&SwitchContext {
            prev: q,
            x,
            u: &input.continuous[..n_u],
            v: &input.control,
            w: input.discrete.as_deref(),
        })
    }

    fn enabling_inputs(&self, from: usize, to: usize) -> BTreeSet<String> {
        self.sys.enabling_inputs(from, to)
    }
}

struct ClosedLoopSelector {
    sys: SmplSystem,
    pass: bool,
}

impl ModeSelector for ClosedLoopSelector {
    fn successors(&self, q: usize, z: &[Weight], input: &HybridInput) -> Result<BTreeSet<usize>> {
        let d = self.sys.dims();
        let x = &z[1..1 + d.n];
        let u_prev = &z[1 + d.n..1 + d.n + d.n_u];
        let v_prev = &z[1 + d.n + d.n_u..];
        let (ext_u, ext_v) = if self.pass { (d.n_u, d.n_v) } else { (0, 0) };
        let step_input = StepInput {
            u: input.continuous[..ext_u].to_vec(),
            v: input.continuous[ext_u..ext_u + ext_v].to_vec(),
            exogenous: ExogenousInput {
                theta_x: input.continuous[ext_u + ext_v..].to_vec(),
                w: input.discrete.clone(),
            },
        };
        let prev = SmplState {
            mode: q,
            x: x.to_vec(),
            u: u_prev.to_vec(),
            v: v_prev.to_vec(),
        };
        let (u, v) = self.sys.control(&prev, &step_input)?;
        self.sys.successor_modes(&SwitchContext {
            prev: q,
            x,
            u: &u,
            v: &v,
            w: input.discrete.as_deref(),
        })
    }

    fn enabling_inputs(&self, from: usize, to: usize) -> BTreeSet<String> {
        self.sys.enabling_inputs(from, to)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{gaubert_smpl, production_line_smpl};
    use crate::matrix::TropicalMatrix;
    use crate::matrix_form::MatrixForm;

    const EPS: Weight = Weight::EPSILON;

    fn w(v: i32) -> Weight {
        Weight::from(v)
    }

    #[test]
    fn example_steps() {
        let h = HybridAutomaton::from_smpl_open(&gaubert_smpl()).unwrap();
        let s0 = HybridState {
            q: 0,
            x: vec![w(0), EPS, EPS],
        };
        let a = h.hybrid_step(&s0, &HybridInput::symbol("a")).unwrap();
        assert_eq!(
            a.into_iter().collect::<Vec<_>>(),
            vec![HybridState {
                q: 0,
                x: vec![EPS, w(1), w(3)]
            }]
        );
        assert!(h.hybrid_step(&s0, &HybridInput::symbol("b")).unwrap().is_empty());
        assert!(h.hybrid_step(&s0, &HybridInput::symbol("z")).is_err());
    }

    #[test]
    fn open_loop_structure() {
        let h = HybridAutomaton::from_smpl_open(&gaubert_smpl()).unwrap();
        assert_eq!(h.mode_count(), 2);
        assert_eq!(h.edges().len(), 2);
        assert_eq!(h.init().len(), 2);
        assert!(h.edges().iter().all(|e| matches!(e.reset, Reset::Identity)));
        assert_eq!(h.origin(), HybridOrigin::OpenLoopSmpl { from_mpa: true });
    }

    #[test]
    fn identity_single_mode() {
        let m = MatrixForm::autonomous(TropicalMatrix::identity(2), TropicalMatrix::identity(2)).unwrap();
        let h = HybridAutomaton::new(
            vec!["q".into()],
            vec![ModeDynamics::Matrix(m)],
            vec![HybridState {
                q: 0,
                x: vec![w(1), w(2)],
            }],
            Vec::new(),
            0,
        )
        .unwrap();
        let run = h.run(&vec![HybridInput::default(); 4]).unwrap();
        assert_eq!(run.records.len(), 4);
        assert!(run.records.iter().all(|r| r.q == 0 && r.x == vec![w(1), w(2)]));
    }

    #[test]
    fn example_abstraction_shape() {
        let h = HybridAutomaton::from_smpl_open(&gaubert_smpl()).unwrap();
        let fa = h.finite_abstraction().unwrap();
        assert_eq!(fa.state_count(), 6);
        assert_eq!(fa.alphabet(), &["a".to_string(), "b".to_string(), "1".to_string()]);
        let named = |set: &BTreeSet<usize>| -> Vec<String> { set.iter().map(|&s| fa.state_names()[s].clone()).collect() };
        assert_eq!(named(fa.initial()), vec!["(a,x1)", "(b,x1)"]);
        assert_eq!(named(fa.final_states()), vec!["(a,x1)", "(b,x1)"]);
    }

    #[test]
    fn production_line_abstraction_partition() {
        let h = HybridAutomaton::from_smpl_open(&production_line_smpl([1, 2, 3])).unwrap();
        let fa = h.finite_abstraction().unwrap();
        let one = fa.symbol_index("1").unwrap();
        let mut per_mode = [BTreeSet::new(), BTreeSet::new()];
        for (s, a, t) in fa.transitions() {
            if a == one {
                per_mode[s / 3].insert((s % 3, t % 3));
            }
        }
        let common: BTreeSet<_> = per_mode[0].intersection(&per_mode[1]).copied().collect();
        let only1: Vec<_> = per_mode[0].difference(&per_mode[1]).copied().collect();
        let only2: Vec<_> = per_mode[1].difference(&per_mode[0]).copied().collect();
        assert_eq!(common.len(), 7);
        assert_eq!(only1, vec![(2, 0)]);
        assert_eq!(only2, vec![(2, 1)]);
    }

    #[test]
    fn hoat_requires_provenance() {
        let h = HybridAutomaton::from_smpl_open(&production_line_smpl([1, 2, 3])).unwrap();
        assert_eq!(
            h.specialized_abstraction_for_mpa_translation().unwrap_err(),
            Error::WrongProvenance
        );
        let h = HybridAutomaton::from_smpl_open(&gaubert_smpl()).unwrap();
        let fa = h.specialized_abstraction_for_mpa_translation().unwrap();
        assert_eq!(fa.state_count(), 6);
        assert_eq!(fa.alphabet(), &["a".to_string(), "b".to_string()]);
    }

    #[test]
    fn closed_loop_dimension() {
        let s = crate::fixtures::feedback_smpl(true);
        let h = HybridAutomaton::from_smpl_closed(&s).unwrap();
        let d = s.dims();
        assert_eq!(h.state_dim(), 1 + d.n + d.n_u + d.n_v);
        assert_eq!(h.input_dim(), d.n_r);
        assert!(HybridAutomaton::from_smpl_open(&s).is_err());
    }

    #[test]
    fn invalid_predicates() {
        let m = MatrixForm::autonomous(TropicalMatrix::identity(1), TropicalMatrix::identity(1)).unwrap();
        let mut h = HybridAutomaton::new(
            vec!["q".into()],
            vec![ModeDynamics::Matrix(m)],
            vec![HybridState { q: 0, x: vec![w(0)] }],
            Vec::new(),
            0,
        )
        .unwrap();
        assert!(h.set_invariant(0, Predicate::Selects(0)).is_err());
        assert!(h.set_invariant(3, Predicate::True).is_err());
        h.set_invariant(0, Predicate::False).unwrap();
        assert!(h
            .hybrid_step(&h.start_state().clone(), &HybridInput::default())
            .unwrap()
            .is_empty());
        h.set_admissible(Admissible::Custom(Arc::new(|_, x, _| x[0] > Weight::ONE)));
        assert_eq!(
            h.hybrid_step(&h.start_state().clone(), &HybridInput::default()),
            Err(Error::InadmissibleInput { mode: 0 })
        );
    }
}
