use alloc::string::String;
use alloc::vec::Vec;

/// Errors raised by model construction and evaluation.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("shape mismatch in {op}: {left:?} vs {right:?}")]
    ShapeMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("matrix power requires a square matrix and k >= 1 (got {rows}x{cols}, k = {k})")]
    InvalidPower { rows: usize, cols: usize, k: usize },
    #[error("{kind} index {index} out of range (dimension {dim})")]
    IndexOutOfRange {
        kind: &'static str,
        index: usize,
        dim: usize,
    },
    #[error("symbol `{0}` is not in the alphabet")]
    UnknownSymbol(String),
    #[error("expression is not in the max-min-plus fragment: {0}")]
    NotMaxMinPlus(&'static str),
    #[error("conjunctive form has no projections")]
    EmptyConjunctiveForm,
    #[error("no successor mode at event {step}")]
    NoSuccessorMode { step: usize },
    #[error("switching rule returned mode {mode} but the system has {modes} modes")]
    InvalidMode { mode: usize, modes: usize },
    #[error("switching rule declared as {declared} but is sensitive to {observed:?}")]
    SwitchingKindMismatch {
        declared: &'static str,
        observed: Vec<&'static str>,
    },
    #[error("input is not admissible in mode {mode}")]
    InadmissibleInput { mode: usize },
    #[error("system is closed-loop; use the closed-loop construction")]
    ClosedLoopSystem,
    #[error("controller cannot be written as a max-min-plus map")]
    NonRepresentableController,
    #[error("abstraction precondition violated: {0}")]
    AssumptionViolated(&'static str),
    #[error("hybrid automaton was not built from a max-plus automaton")]
    WrongProvenance,
    #[error("alphabets differ")]
    AlphabetMismatch,
    #[error("input/output spaces differ: {0}")]
    SpaceMismatch(&'static str),
    #[error("invalid model: {0}")]
    InvalidModel(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
