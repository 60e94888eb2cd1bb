//! Switching max-plus linear systems.
//!
//! At event `k` the system resolves its mode, then updates state and output:
//!
//! ```text
//! l(k) = φ(l(k-1), x(k-1), u(k), v(k), w(k))
//! x(k) = f(l(k), x(k-1), u(k), r(k))
//! y(k) = h(l(k), x(k), u(k), r(k))
//! ```
//!
//! `u` and `v` are the continuous and discrete-choice control inputs, `r` the
//! continuous exogenous input (`Θ_x`) and `w` the discrete exogenous input
//! (`Θ_ℓ`). Mode dynamics take the input vector `u ++ r`.
//!
//! `φ` may return several modes. The run continues in the smallest one and
//! the whole successor set is recorded; an empty set halts the run.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::matrix::{has_finite_entry, is_all_epsilon, TropicalMatrix};
use crate::matrix_form::{MatrixForm, ModeDynamics};
use crate::mpa::MaxPlusAutomaton;
use crate::weight::Weight;
use crate::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub struct Dims {
    /// State dimension.
    pub n: usize,
    /// Continuous control inputs `u`.
    pub n_u: usize,
    /// Discrete-choice control inputs `v`, carried as real values.
    pub n_v: usize,
    /// Outputs.
    pub n_y: usize,
    /// Continuous exogenous inputs `r`.
    pub n_r: usize,
}

/// The arguments a switching rule may read.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum SwitchArg {
    PrevMode,
    State,
    Control,
    DiscreteControl,
    Exogenous,
}

impl SwitchArg {
    pub const ALL: [SwitchArg; 5] = [
        SwitchArg::PrevMode,
        SwitchArg::State,
        SwitchArg::Control,
        SwitchArg::DiscreteControl,
        SwitchArg::Exogenous,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SwitchArg::PrevMode => "prev",
            SwitchArg::State => "x",
            SwitchArg::Control => "u",
            SwitchArg::DiscreteControl => "v",
            SwitchArg::Exogenous => "w",
        }
    }
}

/// Switching taxonomy: state-dependent (autonomous or controlled) and
/// event-driven (externally driven, constrained, constrained controlled).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum SwitchingKind {
    StateDependentAutonomous,
    StateDependentControlled,
    ExternallyDriven,
    Constrained,
    ConstrainedControlled,
}

impl SwitchingKind {
    pub const ALL: [SwitchingKind; 5] = [
        SwitchingKind::StateDependentAutonomous,
        SwitchingKind::StateDependentControlled,
        SwitchingKind::ExternallyDriven,
        SwitchingKind::Constrained,
        SwitchingKind::ConstrainedControlled,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SwitchingKind::StateDependentAutonomous => "state-dependent-autonomous",
            SwitchingKind::StateDependentControlled => "state-dependent-controlled",
            SwitchingKind::ExternallyDriven => "externally-driven",
            SwitchingKind::Constrained => "constrained",
            SwitchingKind::ConstrainedControlled => "constrained-controlled",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }

    /// Arguments a rule of this kind may depend on.
    pub fn allowed(self) -> &'static [SwitchArg] {
        use SwitchArg::*;
        match self {
            SwitchingKind::StateDependentAutonomous => &[PrevMode, State],
            SwitchingKind::StateDependentControlled => &[PrevMode, State, Control, DiscreteControl],
            SwitchingKind::ExternallyDriven => &[Exogenous],
            SwitchingKind::Constrained => &[PrevMode, State, Exogenous],
            SwitchingKind::ConstrainedControlled => &SwitchArg::ALL,
        }
    }

    pub fn is_controlled(self) -> bool {
        matches!(
            self,
            SwitchingKind::StateDependentControlled | SwitchingKind::ConstrainedControlled
        )
    }
}

impl fmt::Display for SwitchingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// What a switching rule sees at event `k`.
#[derive(Clone, Copy, Debug)]
pub struct SwitchContext<'a> {
    pub prev: usize,
    pub x: &'a [Weight],
    pub u: &'a [Weight],
    pub v: &'a [Weight],
    pub w: Option<&'a str>,
}

/// Extra condition a mode must meet to be selected by
/// [`SwitchingLogic::SymbolSelect`]. It looks at the mode's state update
/// `f(l, x, ε)` with all inputs held at `ε`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ModeGuard {
    Always,
    /// `f(l, x, ε) ≠ ℰ`.
    NotAllEpsilon,
    /// `f(l, x, ε)` has an entry that is neither `ε` nor `⊤`.
    HasFiniteEntry,
}

impl ModeGuard {
    pub fn name(self) -> &'static str {
        match self {
            ModeGuard::Always => "always",
            ModeGuard::NotAllEpsilon => "not-all-epsilon",
            ModeGuard::HasFiniteEntry => "has-finite-entry",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        [ModeGuard::Always, ModeGuard::NotAllEpsilon, ModeGuard::HasFiniteEntry]
            .into_iter()
            .find(|g| g.name() == name)
    }
}

pub type CustomSwitch = Arc<dyn Fn(&SwitchContext<'_>) -> BTreeSet<usize> + Send + Sync>;

#[derive(Clone)]
pub enum SwitchingLogic {
    /// Always the same mode.
    Fixed(usize),
    /// Mode `l` is a successor iff `w = symbols[l]` and its guard holds.
    SymbolSelect { symbols: Vec<String>, guard: ModeGuard },
    /// Successors looked up by `(previous mode, w)`; missing keys give `∅`.
    Table(BTreeMap<(usize, String), BTreeSet<usize>>),
    Custom(CustomSwitch),
}

impl fmt::Debug for SwitchingLogic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SwitchingLogic::Fixed(m) => f.debug_tuple("Fixed").field(m).finish(),
            SwitchingLogic::SymbolSelect { symbols, guard } => f
                .debug_struct("SymbolSelect")
                .field("symbols", symbols)
                .field("guard", guard)
                .finish(),
            SwitchingLogic::Table(t) => f.debug_tuple("Table").field(t).finish(),
            SwitchingLogic::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SwitchingRule {
    pub kind: SwitchingKind,
    pub logic: SwitchingLogic,
}

impl SwitchingRule {
    pub fn fixed(mode: usize) -> Self {
        SwitchingRule {
            kind: SwitchingKind::StateDependentAutonomous,
            logic: SwitchingLogic::Fixed(mode),
        }
    }

    pub fn symbol_select(kind: SwitchingKind, symbols: Vec<String>, guard: ModeGuard) -> Self {
        SwitchingRule {
            kind,
            logic: SwitchingLogic::SymbolSelect { symbols, guard },
        }
    }

    pub fn table(kind: SwitchingKind, table: BTreeMap<(usize, String), BTreeSet<usize>>) -> Self {
        SwitchingRule {
            kind,
            logic: SwitchingLogic::Table(table),
        }
    }

    pub fn custom(
        kind: SwitchingKind,
        f: impl Fn(&SwitchContext<'_>) -> BTreeSet<usize> + Send + Sync + 'static,
    ) -> Self {
        SwitchingRule {
            kind,
            logic: SwitchingLogic::Custom(Arc::new(f)),
        }
    }
}

/// What a controller sees when computing `u(k)` and `v(k)`: the memory of
/// the previous event and the current exogenous input.
#[derive(Clone, Copy, Debug)]
pub struct ControllerContext<'a> {
    pub prev_mode: usize,
    pub x: &'a [Weight],
    pub u: &'a [Weight],
    pub v: &'a [Weight],
    pub input: &'a StepInput,
}

pub type CustomController =
    Arc<dyn Fn(&ControllerContext<'_>) -> (Vec<Weight>, Vec<Weight>) + Send + Sync>;

#[derive(Clone)]
pub enum ControllerHook {
    /// `u` and `v` are read verbatim from the step input (open loop).
    PassThrough,
    /// `u(k) = K_u ⊗ x(k-1)`, `v(k) = K_v ⊗ x(k-1)`.
    StaticFeedback {
        k_u: TropicalMatrix,
        k_v: TropicalMatrix,
    },
    Custom(CustomController),
}

impl ControllerHook {
    pub fn static_feedback(k_u: TropicalMatrix, k_v: TropicalMatrix) -> Self {
        ControllerHook::StaticFeedback { k_u, k_v }
    }

    pub fn is_pass_through(&self) -> bool {
        matches!(self, ControllerHook::PassThrough)
    }

    fn control(&self, ctx: &ControllerContext<'_>, dims: &Dims) -> Result<(Vec<Weight>, Vec<Weight>)> {
        let (u, v) = match self {
            ControllerHook::PassThrough => (ctx.input.u.clone(), ctx.input.v.clone()),
            ControllerHook::StaticFeedback { k_u, k_v } => (k_u.apply(ctx.x)?, k_v.apply(ctx.x)?),
            ControllerHook::Custom(f) => f(ctx),
        };
        if u.len() != dims.n_u || v.len() != dims.n_v {
            return Err(Error::ShapeMismatch {
                op: "controller output",
                left: (dims.n_u, dims.n_v),
                right: (u.len(), v.len()),
            });
        }
        Ok((u, v))
    }
}

impl fmt::Debug for ControllerHook {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ControllerHook::PassThrough => f.write_str("PassThrough"),
            ControllerHook::StaticFeedback { k_u, k_v } => f
                .debug_struct("StaticFeedback")
                .field("k_u", k_u)
                .field("k_v", k_v)
                .finish(),
            ControllerHook::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// Exogenous signals `Θ = [Θ_x; Θ_ℓ]` at one event.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct ExogenousInput {
    /// `Θ_x = r`, length `n_r`.
    pub theta_x: Vec<Weight>,
    /// `Θ_ℓ = w`.
    pub w: Option<String>,
}

/// Inputs at one event. `u` and `v` are only read by a pass-through
/// controller.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct StepInput {
    pub u: Vec<Weight>,
    pub v: Vec<Weight>,
    pub exogenous: ExogenousInput,
}

impl StepInput {
    /// Only a discrete exogenous symbol.
    pub fn symbol(w: impl Into<String>) -> Self {
        StepInput {
            exogenous: ExogenousInput {
                theta_x: Vec::new(),
                w: Some(w.into()),
            },
            ..Default::default()
        }
    }

    pub fn w(&self) -> Option<&str> {
        self.exogenous.w.as_deref()
    }
}

/// Memory carried from one event to the next.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SmplState {
    pub mode: usize,
    pub x: Vec<Weight>,
    pub u: Vec<Weight>,
    pub v: Vec<Weight>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SmplStepRecord {
    pub k: usize,
    pub mode: usize,
    pub x: Vec<Weight>,
    pub y: Vec<Weight>,
    pub u: Vec<Weight>,
    pub v: Vec<Weight>,
    /// The full successor set returned by the switching rule.
    pub successors: BTreeSet<usize>,
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct SmplRun {
    pub records: Vec<SmplStepRecord>,
    /// Event at which the switching rule returned no mode.
    pub halted_at: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SmplOrigin {
    Direct,
    /// Built by [`SmplSystem::from_mpa`].
    MaxPlusAutomaton,
}

#[derive(Clone, Debug)]
pub struct SmplSystem {
    dims: Dims,
    mode_names: Vec<String>,
    modes: Vec<ModeDynamics>,
    switching: SwitchingRule,
    x0: Vec<Weight>,
    initial_mode: usize,
    discrete_inputs: Vec<String>,
    controller: ControllerHook,
    origin: SmplOrigin,
}

impl SmplSystem {
    /// Checks every mode against `dims`: state `n`, input `n_u + n_r`,
    /// output `n_y`. The mode of event 0 defaults to the first mode.
    pub fn new(
        dims: Dims,
        mode_names: Vec<String>,
        modes: Vec<ModeDynamics>,
        switching: SwitchingRule,
        x0: Vec<Weight>,
    ) -> Result<Self> {
        if mode_names.len() != modes.len() {
            return Err(Error::InvalidModel(alloc::format!(
                "{} mode names for {} modes",
                mode_names.len(),
                modes.len()
            )));
        }
        for (name, m) in mode_names.iter().zip(&modes) {
            if m.state_dim() != dims.n
                || m.input_dim() != dims.n_u + dims.n_r
                || m.output_dim() != dims.n_y
            {
                return Err(Error::InvalidModel(alloc::format!(
                    "mode {name} has (n, inputs, n_y) = ({}, {}, {}), expected ({}, {}, {})",
                    m.state_dim(),
                    m.input_dim(),
                    m.output_dim(),
                    dims.n,
                    dims.n_u + dims.n_r,
                    dims.n_y
                )));
            }
        }
        if x0.len() != dims.n {
            return Err(Error::ShapeMismatch {
                op: "initial state",
                left: (dims.n, 1),
                right: (x0.len(), 1),
            });
        }
        let n_l = modes.len();
        let check_mode = |m: usize| {
            if m < n_l {
                Ok(())
            } else {
                Err(Error::InvalidMode { mode: m, modes: n_l })
            }
        };
        let mut discrete_inputs = Vec::new();
        match &switching.logic {
            SwitchingLogic::Fixed(m) => check_mode(*m)?,
            SwitchingLogic::SymbolSelect { symbols, .. } => {
                if symbols.len() != n_l {
                    return Err(Error::InvalidModel(alloc::format!(
                        "symbol-select rule lists {} symbols for {n_l} modes",
                        symbols.len()
                    )));
                }
                for s in symbols {
                    if !discrete_inputs.contains(s) {
                        discrete_inputs.push(s.clone());
                    }
                }
            }
            SwitchingLogic::Table(t) => {
                for ((prev, w), succ) in t {
                    check_mode(*prev)?;
                    for &m in succ {
                        check_mode(m)?;
                    }
                    if !discrete_inputs.contains(w) {
                        discrete_inputs.push(w.clone());
                    }
                }
            }
            SwitchingLogic::Custom(_) => {}
        }
        Ok(SmplSystem {
            dims,
            mode_names,
            modes,
            switching,
            x0,
            initial_mode: 0,
            discrete_inputs,
            controller: ControllerHook::PassThrough,
            origin: SmplOrigin::Direct,
        })
    }

    /// Replaces the discrete exogenous alphabet `𝕍`.
    pub fn with_discrete_inputs(mut self, symbols: Vec<String>) -> Self {
        self.discrete_inputs = symbols;
        self
    }

    /// Records where the system came from; only [`SmplOrigin::MaxPlusAutomaton`]
    /// enables the fused abstraction of the hybrid translation.
    pub fn with_origin(mut self, origin: SmplOrigin) -> Self {
        self.origin = origin;
        self
    }

    pub fn with_initial_mode(mut self, mode: usize) -> Result<Self> {
        if mode >= self.modes.len() {
            return Err(Error::InvalidMode {
                mode,
                modes: self.modes.len(),
            });
        }
        self.initial_mode = mode;
        Ok(self)
    }

    pub fn with_controller(mut self, controller: ControllerHook) -> Result<Self> {
        if let ControllerHook::StaticFeedback { k_u, k_v } = &controller {
            if k_u.shape() != (self.dims.n_u, self.dims.n) {
                return Err(Error::ShapeMismatch {
                    op: "feedback gain K_u",
                    left: (self.dims.n_u, self.dims.n),
                    right: k_u.shape(),
                });
            }
            if k_v.shape() != (self.dims.n_v, self.dims.n) {
                return Err(Error::ShapeMismatch {
                    op: "feedback gain K_v",
                    left: (self.dims.n_v, self.dims.n),
                    right: k_v.shape(),
                });
            }
        }
        self.controller = controller;
        Ok(self)
    }

    /// Translation of a max-plus automaton: one mode per symbol with
    /// `A^(l) = μ(σ_l)ᵀ`, `C = βᵀ`, `x(0) = α`. Mode `l` is a successor iff
    /// `w = σ_l` and `A^(l) ⊗ x ≠ ℰ`.
    pub fn from_mpa(a: &MaxPlusAutomaton) -> Self {
        let n = a.state_count();
        let c = TropicalMatrix::row(a.beta());
        let modes = a
            .mu_all()
            .iter()
            .map(|m| ModeDynamics::Matrix(MatrixForm::autonomous(m.transpose(), c.clone()).expect("square")))
            .collect();
        let symbols = a.alphabet().to_vec();
        let mut sys = SmplSystem::new(
            Dims {
                n,
                n_u: 0,
                n_v: 0,
                n_y: 1,
                n_r: 0,
            },
            symbols.clone(),
            modes,
            SwitchingRule::symbol_select(SwitchingKind::Constrained, symbols, ModeGuard::NotAllEpsilon),
            a.alpha().to_vec(),
        )
        .expect("automaton shapes are consistent");
        sys.origin = SmplOrigin::MaxPlusAutomaton;
        sys
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn mode_count(&self) -> usize {
        self.modes.len()
    }

    pub fn mode_names(&self) -> &[String] {
        &self.mode_names
    }

    pub fn modes(&self) -> &[ModeDynamics] {
        &self.modes
    }

    pub fn switching(&self) -> &SwitchingRule {
        &self.switching
    }

    pub fn x0(&self) -> &[Weight] {
        &self.x0
    }

    pub fn initial_mode(&self) -> usize {
        self.initial_mode
    }

    pub fn discrete_inputs(&self) -> &[String] {
        &self.discrete_inputs
    }

    pub fn controller(&self) -> &ControllerHook {
        &self.controller
    }

    pub fn origin(&self) -> SmplOrigin {
        self.origin
    }

    pub fn is_open_loop(&self) -> bool {
        self.controller.is_pass_through()
    }

    pub fn initial_state(&self) -> SmplState {
        SmplState {
            mode: self.initial_mode,
            x: self.x0.clone(),
            u: vec![Weight::EPSILON; self.dims.n_u],
            v: vec![Weight::EPSILON; self.dims.n_v],
        }
    }

    fn guard_holds(&self, guard: ModeGuard, mode: usize, x: &[Weight]) -> Result<bool> {
        if guard == ModeGuard::Always {
            return Ok(true);
        }
        let eps = vec![Weight::EPSILON; self.dims.n_u + self.dims.n_r];
        let next = self.modes[mode].next_state(x, &eps)?;
        Ok(match guard {
            ModeGuard::Always => true,
            ModeGuard::NotAllEpsilon => !is_all_epsilon(&next),
            ModeGuard::HasFiniteEntry => has_finite_entry(&next),
        })
    }

    /// `φ(l⁻, x⁻, u, v, w)`.
    pub fn successor_modes(&self, ctx: &SwitchContext<'_>) -> Result<BTreeSet<usize>> {
        if ctx.x.len() != self.dims.n {
            return Err(Error::ShapeMismatch {
                op: "switching state",
                left: (self.dims.n, 1),
                right: (ctx.x.len(), 1),
            });
        }
        let out = match &self.switching.logic {
            SwitchingLogic::Fixed(m) => BTreeSet::from([*m]),
            SwitchingLogic::SymbolSelect { symbols, guard } => {
                let mut out = BTreeSet::new();
                if let Some(w) = ctx.w {
                    for (l, s) in symbols.iter().enumerate() {
                        if s == w && self.guard_holds(*guard, l, ctx.x)? {
                            out.insert(l);
                        }
                    }
                }
                out
            }
            SwitchingLogic::Table(t) => match ctx.w {
                Some(w) => t.get(&(ctx.prev, String::from(w))).cloned().unwrap_or_default(),
                None => BTreeSet::new(),
            },
            SwitchingLogic::Custom(f) => f(ctx),
        };
        if let Some(&m) = out.iter().find(|&&m| m >= self.modes.len()) {
            return Err(Error::InvalidMode {
                mode: m,
                modes: self.modes.len(),
            });
        }
        Ok(out)
    }

    /// Discrete inputs `w` under which the rule can move from `from` to
    /// `to`. Rules that are not tied to a symbol table report every symbol
    /// of `𝕍`.
    pub fn enabling_inputs(&self, from: usize, to: usize) -> BTreeSet<String> {
        match &self.switching.logic {
            SwitchingLogic::Fixed(m) => {
                if *m == to {
                    self.discrete_inputs.iter().cloned().collect()
                } else {
                    BTreeSet::new()
                }
            }
            SwitchingLogic::SymbolSelect { symbols, .. } => BTreeSet::from([symbols[to].clone()]),
            SwitchingLogic::Table(t) => t
                .iter()
                .filter(|((p, _), succ)| *p == from && succ.contains(&to))
                .map(|((_, w), _)| w.clone())
                .collect(),
            SwitchingLogic::Custom(_) => self.discrete_inputs.iter().cloned().collect(),
        }
    }

    pub(crate) fn mode_input(&self, u: &[Weight], r: &[Weight]) -> Result<Vec<Weight>> {
        if r.len() != self.dims.n_r {
            return Err(Error::ShapeMismatch {
                op: "exogenous continuous input",
                left: (self.dims.n_r, 1),
                right: (r.len(), 1),
            });
        }
        let mut v = u.to_vec();
        v.extend_from_slice(r);
        Ok(v)
    }

    /// `(u(k), v(k))` from the controller.
    pub fn control(&self, prev: &SmplState, input: &StepInput) -> Result<(Vec<Weight>, Vec<Weight>)> {
        self.controller.control(
            &ControllerContext {
                prev_mode: prev.mode,
                x: &prev.x,
                u: &prev.u,
                v: &prev.v,
                input,
            },
            &self.dims,
        )
    }

    /// One event. Returns [`Error::NoSuccessorMode`] when the rule selects
    /// no mode.
    pub fn step(&self, k: usize, prev: &SmplState, input: &StepInput) -> Result<SmplStepRecord> {
        let (u, v) = self.control(prev, input)?;
        let successors = self.successor_modes(&SwitchContext {
            prev: prev.mode,
            x: &prev.x,
            u: &u,
            v: &v,
            w: input.w(),
        })?;
        let Some(&mode) = successors.iter().next() else {
            return Err(Error::NoSuccessorMode { step: k });
        };
        let f_in = self.mode_input(&u, &input.exogenous.theta_x)?;
        let x = self.modes[mode].next_state(&prev.x, &f_in)?;
        let y = self.modes[mode].output(&x, &f_in)?;
        Ok(SmplStepRecord {
            k,
            mode,
            x,
            y,
            u,
            v,
            successors,
        })
    }

    /// Runs events `1..=inputs.len()` from the initial state, stopping at
    /// the first event without a successor mode.
    pub fn simulate(&self, inputs: &[StepInput]) -> Result<SmplRun> {
        let mut state = self.initial_state();
        let mut run = SmplRun::default();
        for (i, input) in inputs.iter().enumerate() {
            let k = i + 1;
            match self.step(k, &state, input) {
                Ok(rec) => {
                    state = SmplState {
                        mode: rec.mode,
                        x: rec.x.clone(),
                        u: rec.u.clone(),
                        v: rec.v.clone(),
                    };
                    run.records.push(rec);
                }
                Err(Error::NoSuccessorMode { .. }) => {
                    run.halted_at = Some(k);
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        Ok(run)
    }

    /// Arguments the switching rule was seen to depend on, by comparing its
    /// output on `probes` random contexts against the same context with one
    /// argument resampled.
    pub fn observed_switching_args(&self, seed: u64, probes: usize) -> Result<BTreeSet<SwitchArg>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut observed = BTreeSet::new();
        if self.modes.is_empty() {
            return Ok(observed);
        }
        for arg in SwitchArg::ALL {
            for _ in 0..probes {
                let base = Probe::sample(&mut rng, self);
                let mut varied = base.clone();
                varied.resample(arg, &mut rng, self);
                if self.successor_modes(&base.ctx())? != self.successor_modes(&varied.ctx())? {
                    observed.insert(arg);
                    break;
                }
            }
        }
        Ok(observed)
    }

    /// Returns the declared kind after checking that the rule only depends
    /// on arguments that kind allows.
    pub fn classify_switching(&self, seed: u64) -> Result<SwitchingKind> {
        let declared = self.switching.kind;
        let observed = self.observed_switching_args(seed, 256)?;
        let extra: Vec<&'static str> = observed
            .iter()
            .filter(|a| !declared.allowed().contains(a))
            .map(|a| a.name())
            .collect();
        if extra.is_empty() {
            Ok(declared)
        } else {
            Err(Error::SwitchingKindMismatch {
                declared: declared.name(),
                observed: observed.iter().map(|a| a.name()).collect(),
            })
        }
    }

    /// The least general kind consistent with the observed dependencies.
    pub fn infer_switching_kind(&self, seed: u64) -> Result<SwitchingKind> {
        let observed = self.observed_switching_args(seed, 256)?;
        let order = [
            SwitchingKind::StateDependentAutonomous,
            SwitchingKind::ExternallyDriven,
            SwitchingKind::Constrained,
            SwitchingKind::StateDependentControlled,
            SwitchingKind::ConstrainedControlled,
        ];
        Ok(order
            .into_iter()
            .find(|k| observed.iter().all(|a| k.allowed().contains(a)))
            .unwrap_or(SwitchingKind::ConstrainedControlled))
    }
}

#[derive(Clone)]
struct Probe {
    prev: usize,
    x: Vec<Weight>,
    u: Vec<Weight>,
    v: Vec<Weight>,
    w: Option<String>,
}

fn sample_weight(rng: &mut ChaCha8Rng) -> Weight {
    if rng.gen_bool(0.3) {
        Weight::EPSILON
    } else {
        Weight::from(rng.gen_range(-3..=8))
    }
}

fn sample_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<Weight> {
    (0..n).map(|_| sample_weight(rng)).collect()
}

impl Probe {
    fn sample(rng: &mut ChaCha8Rng, s: &SmplSystem) -> Self {
        let mut p = Probe {
            prev: 0,
            x: Vec::new(),
            u: Vec::new(),
            v: Vec::new(),
            w: None,
        };
        for arg in SwitchArg::ALL {
            p.resample(arg, rng, s);
        }
        p
    }

    fn resample(&mut self, arg: SwitchArg, rng: &mut ChaCha8Rng, s: &SmplSystem) {
        let d = s.dims;
        match arg {
            SwitchArg::PrevMode => self.prev = rng.gen_range(0..s.modes.len()),
            SwitchArg::State => self.x = sample_vec(rng, d.n),
            SwitchArg::Control => self.u = sample_vec(rng, d.n_u),
            SwitchArg::DiscreteControl => self.v = sample_vec(rng, d.n_v),
            SwitchArg::Exogenous => {
                let k = s.discrete_inputs.len();
                let i = rng.gen_range(0..=k);
                self.w = s.discrete_inputs.get(i).cloned();
            }
        }
    }

    fn ctx(&self) -> SwitchContext<'_> {
        SwitchContext {
            prev: self.prev,
            x: &self.x,
            u: &self.u,
            v: &self.v,
            w: self.w.as_deref(),
        }
    }
}
