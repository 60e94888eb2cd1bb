//! Matrix form of max-min-plus mode dynamics and its one-step transition
//! graphs.
//!
//! A mode is written as
//!
//! ```text
//! x⁺ = min_l (A_l ⊗ x ⊕ B_l ⊗ u)
//! y  = min_m (C_m ⊗ x ⊕ D_m ⊗ u)
//! ```
//!
//! Constant terms are carried by an extra always-`𝟙` input column, flagged by
//! [`MatrixForm::has_constant_input`]. That column has no variable label and
//! never appears in a [`TransitionGraph`].

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::conjunctive::{projection_expression, to_conjunctive, ConjunctiveForm, MaxPlusProjection};
use crate::expr::{eval_all, MmpsExpression};
use crate::matrix::{vec_oplus, vec_oplus_dual, TropicalMatrix};
use crate::weight::Weight;
use crate::{Error, Result};

#[derive(Clone, PartialEq, Debug)]
pub struct MatrixForm {
    a: Vec<TropicalMatrix>,
    b: Vec<TropicalMatrix>,
    c: Vec<TropicalMatrix>,
    d: Vec<TropicalMatrix>,
    constant_input: bool,
}

impl MatrixForm {
    /// Validates shapes: `L, M ≥ 1`, square `A`s of one size `n`, `B`s
    /// `n × n_u'`, `C`s `n_y × n`, `D`s `n_y × n_u'` where `n_u'` counts the
    /// constant column when `constant_input` is set.
    pub fn new(
        a: Vec<TropicalMatrix>,
        b: Vec<TropicalMatrix>,
        c: Vec<TropicalMatrix>,
        d: Vec<TropicalMatrix>,
        constant_input: bool,
    ) -> Result<Self> {
        if a.is_empty() || c.is_empty() {
            return Err(Error::InvalidModel("matrix form needs L >= 1 and M >= 1".into()));
        }
        if a.len() != b.len() || c.len() != d.len() {
            return Err(Error::InvalidModel(
                "matrix form needs one B per A and one D per C".into(),
            ));
        }
        let n = a[0].rows();
        let n_in = b[0].cols();
        let n_y = c[0].rows();
        let check = |m: &TropicalMatrix, shape: (usize, usize), op: &'static str| {
            if m.shape() == shape {
                Ok(())
            } else {
                Err(Error::ShapeMismatch {
                    op,
                    left: shape,
                    right: m.shape(),
                })
            }
        };
        for m in &a {
            check(m, (n, n), "matrix form A")?;
        }
        for m in &b {
            check(m, (n, n_in), "matrix form B")?;
        }
        for m in &c {
            check(m, (n_y, n), "matrix form C")?;
        }
        for m in &d {
            check(m, (n_y, n_in), "matrix form D")?;
        }
        if constant_input && n_in == 0 {
            return Err(Error::InvalidModel("constant input flagged but B has no columns".into()));
        }
        Ok(MatrixForm {
            a,
            b,
            c,
            d,
            constant_input,
        })
    }

    /// Single-branch (max-plus linear) dynamics.
    pub fn linear(
        a: TropicalMatrix,
        b: TropicalMatrix,
        c: TropicalMatrix,
        d: TropicalMatrix,
    ) -> Result<Self> {
        Self::new(vec![a], vec![b], vec![c], vec![d], false)
    }

    /// `x⁺ = A ⊗ x`, `y = C ⊗ x`, no inputs.
    pub fn autonomous(a: TropicalMatrix, c: TropicalMatrix) -> Result<Self> {
        let n = a.rows();
        let n_y = c.rows();
        Self::linear(a, TropicalMatrix::epsilon(n, 0), c, TropicalMatrix::epsilon(n_y, 0))
    }

    pub fn a(&self) -> &[TropicalMatrix] {
        &self.a
    }
    pub fn b(&self) -> &[TropicalMatrix] {
        &self.b
    }
    pub fn c(&self) -> &[TropicalMatrix] {
        &self.c
    }
    pub fn d(&self) -> &[TropicalMatrix] {
        &self.d
    }
    pub fn has_constant_input(&self) -> bool {
        self.constant_input
    }

    pub fn state_dim(&self) -> usize {
        self.a[0].rows()
    }

    /// Input dimension, not counting the constant column.
    pub fn input_dim(&self) -> usize {
        self.b[0].cols() - usize::from(self.constant_input)
    }

    pub fn output_dim(&self) -> usize {
        self.c[0].rows()
    }

    /// `L`, the number of branches of the state update.
    pub fn state_branches(&self) -> usize {
        self.a.len()
    }

    /// `M`, the number of branches of the output map.
    pub fn output_branches(&self) -> usize {
        self.c.len()
    }

    fn extended_input(&self, u: &[Weight]) -> Result<Vec<Weight>> {
        if u.len() != self.input_dim() {
            return Err(Error::ShapeMismatch {
                op: "matrix form input",
                left: (self.input_dim(), 1),
                right: (u.len(), 1),
            });
        }
        let mut v = u.to_vec();
        if self.constant_input {
            v.push(Weight::ONE);
        }
        Ok(v)
    }

    fn branch_min(
        first: &[TropicalMatrix],
        second: &[TropicalMatrix],
        x: &[Weight],
        u: &[Weight],
    ) -> Result<Vec<Weight>> {
        let mut acc: Option<Vec<Weight>> = None;
        for (m, n) in first.iter().zip(second) {
            let v = vec_oplus(&m.apply(x)?, &n.apply(u)?)?;
            acc = Some(match acc {
                None => v,
                Some(prev) => vec_oplus_dual(&prev, &v)?,
            });
        }
        Ok(acc.unwrap_or_default())
    }

    /// `min_l (A_l ⊗ x ⊕ B_l ⊗ u)`.
    pub fn next_state(&self, x: &[Weight], u: &[Weight]) -> Result<Vec<Weight>> {
        let u = self.extended_input(u)?;
        Self::branch_min(&self.a, &self.b, x, &u)
    }

    /// `min_m (C_m ⊗ x ⊕ D_m ⊗ u)`.
    pub fn output(&self, x: &[Weight], u: &[Weight]) -> Result<Vec<Weight>> {
        let u = self.extended_input(u)?;
        Self::branch_min(&self.c, &self.d, x, &u)
    }

    fn projection(&self, x_part: &TropicalMatrix, u_part: &TropicalMatrix, row: usize) -> MaxPlusProjection {
        let n_u = self.input_dim();
        let u_row = u_part.row_slice(row);
        MaxPlusProjection {
            state_coeffs: x_part.row_slice(row).to_vec(),
            input_coeffs: u_row[..n_u].to_vec(),
            constant: if self.constant_input {
                u_row[n_u]
            } else {
                Weight::EPSILON
            },
        }
    }

    /// Component `j` of the state update, as an expression.
    pub fn state_expression(&self, j: usize) -> MmpsExpression {
        MmpsExpression::min_of(
            self.a
                .iter()
                .zip(&self.b)
                .map(|(a, b)| projection_expression(&self.projection(a, b, j))),
        )
    }

    /// Component `j` of the output map, as an expression.
    pub fn output_expression(&self, j: usize) -> MmpsExpression {
        MmpsExpression::min_of(
            self.c
                .iter()
                .zip(&self.d)
                .map(|(c, d)| projection_expression(&self.projection(c, d, j))),
        )
    }
}

fn pad_to<T: Clone>(items: &[T], len: usize) -> Vec<T> {
    let mut v = items.to_vec();
    while v.len() < len {
        v.push(items[items.len() - 1].clone());
    }
    v
}

/// Assembles per-component conjunctive forms into matrix form.
///
/// Each component's projection list is padded to the longest one by
/// repeating its last projection, which leaves the `min` unchanged. A
/// constant column is added when any projection has a constant term.
pub fn to_matrix_form(
    state: &[ConjunctiveForm],
    output: &[ConjunctiveForm],
    n: usize,
    n_u: usize,
) -> Result<MatrixForm> {
    if state.len() != n {
        return Err(Error::ShapeMismatch {
            op: "to_matrix_form state components",
            left: (n, 1),
            right: (state.len(), 1),
        });
    }
    for cf in state.iter().chain(output) {
        if cf.is_empty() {
            return Err(Error::EmptyConjunctiveForm);
        }
        let p = &cf.projections()[0];
        if p.state_coeffs.len() != n || p.input_coeffs.len() != n_u {
            return Err(Error::ShapeMismatch {
                op: "to_matrix_form projection",
                left: (n, n_u),
                right: (p.state_coeffs.len(), p.input_coeffs.len()),
            });
        }
    }
    let constant_input = state
        .iter()
        .chain(output)
        .flat_map(|cf| cf.projections())
        .any(|p| !p.constant.is_epsilon());
    let n_in = n_u + usize::from(constant_input);

    let build = |comps: &[ConjunctiveForm], rows: usize| -> Result<(Vec<TropicalMatrix>, Vec<TropicalMatrix>)> {
        let branches = comps.iter().map(ConjunctiveForm::len).max().unwrap_or(1).max(1);
        let padded: Vec<Vec<MaxPlusProjection>> =
            comps.iter().map(|cf| pad_to(cf.projections(), branches)).collect();
        let mut xs = Vec::with_capacity(branches);
        let mut us = Vec::with_capacity(branches);
        for l in 0..branches {
            let mut xm = TropicalMatrix::epsilon(rows, n);
            let mut um = TropicalMatrix::epsilon(rows, n_in);
            for (j, projs) in padded.iter().enumerate() {
                let p = &projs[l];
                for (i, &c) in p.state_coeffs.iter().enumerate() {
                    xm.set(j, i, c);
                }
                for (i, &c) in p.input_coeffs.iter().enumerate() {
                    um.set(j, i, c);
                }
                if constant_input {
                    um.set(j, n_u, p.constant);
                }
            }
            xs.push(xm);
            us.push(um);
        }
        Ok((xs, us))
    };
    let (a, b) = build(state, n)?;
    let (c, d) = build(output, output.len())?;
    MatrixForm::new(a, b, c, d, constant_input)
}

/// Per-mode continuous dynamics: either matrix form or component
/// expressions for the state update and the output.
#[derive(Clone, PartialEq, Debug)]
pub enum ModeDynamics {
    Matrix(MatrixForm),
    Expressions {
        state: Vec<MmpsExpression>,
        output: Vec<MmpsExpression>,
        input_dim: usize,
    },
}

impl ModeDynamics {
    pub fn expressions(state: Vec<MmpsExpression>, output: Vec<MmpsExpression>, input_dim: usize) -> Result<Self> {
        let n = state.len();
        for e in state.iter().chain(&output) {
            let (need_n, need_u) = e.arity();
            if need_n > n || need_u > input_dim {
                return Err(Error::InvalidModel(alloc::format!(
                    "expression {e} refers to a variable outside n = {n}, n_u = {input_dim}"
                )));
            }
        }
        Ok(ModeDynamics::Expressions {
            state,
            output,
            input_dim,
        })
    }

    pub fn state_dim(&self) -> usize {
        match self {
            ModeDynamics::Matrix(m) => m.state_dim(),
            ModeDynamics::Expressions { state, .. } => state.len(),
        }
    }

    pub fn input_dim(&self) -> usize {
        match self {
            ModeDynamics::Matrix(m) => m.input_dim(),
            ModeDynamics::Expressions { input_dim, .. } => *input_dim,
        }
    }

    pub fn output_dim(&self) -> usize {
        match self {
            ModeDynamics::Matrix(m) => m.output_dim(),
            ModeDynamics::Expressions { output, .. } => output.len(),
        }
    }

    fn check_state(&self, x: &[Weight]) -> Result<()> {
        if x.len() != self.state_dim() {
            return Err(Error::ShapeMismatch {
                op: "mode dynamics state",
                left: (self.state_dim(), 1),
                right: (x.len(), 1),
            });
        }
        Ok(())
    }

    pub fn next_state(&self, x: &[Weight], u: &[Weight]) -> Result<Vec<Weight>> {
        self.check_state(x)?;
        match self {
            ModeDynamics::Matrix(m) => m.next_state(x, u),
            ModeDynamics::Expressions { state, input_dim, .. } => {
                check_input(u, *input_dim)?;
                eval_all(state, x, u)
            }
        }
    }

    pub fn output(&self, x: &[Weight], u: &[Weight]) -> Result<Vec<Weight>> {
        self.check_state(x)?;
        match self {
            ModeDynamics::Matrix(m) => m.output(x, u),
            ModeDynamics::Expressions { output, input_dim, .. } => {
                check_input(u, *input_dim)?;
                eval_all(output, x, u)
            }
        }
    }

    /// Matrix form of this mode; expressions must be max-min-plus.
    pub fn to_matrix_form(&self) -> Result<MatrixForm> {
        match self {
            ModeDynamics::Matrix(m) => Ok(m.clone()),
            ModeDynamics::Expressions {
                state,
                output,
                input_dim,
            } => {
                let n = state.len();
                let sf = state
                    .iter()
                    .map(|e| to_conjunctive(e, n, *input_dim))
                    .collect::<Result<Vec<_>>>()?;
                let of = output
                    .iter()
                    .map(|e| to_conjunctive(e, n, *input_dim))
                    .collect::<Result<Vec<_>>>()?;
                to_matrix_form(&sf, &of, n, *input_dim)
            }
        }
    }

    /// State and output components as expressions.
    pub fn to_expressions(&self) -> (Vec<MmpsExpression>, Vec<MmpsExpression>) {
        match self {
            ModeDynamics::Matrix(m) => (
                (0..m.state_dim()).map(|j| m.state_expression(j)).collect(),
                (0..m.output_dim()).map(|j| m.output_expression(j)).collect(),
            ),
            ModeDynamics::Expressions { state, output, .. } => (state.clone(), output.clone()),
        }
    }

    /// True for matrix dynamics and for expressions inside the max-min-plus
    /// fragment.
    pub fn is_max_min_plus(&self) -> bool {
        match self {
            ModeDynamics::Matrix(_) => true,
            ModeDynamics::Expressions { state, output, .. } => {
                state.iter().chain(output).all(MmpsExpression::is_max_min_plus)
            }
        }
    }
}

fn check_input(u: &[Weight], dim: usize) -> Result<()> {
    if u.len() != dim {
        return Err(Error::ShapeMismatch {
            op: "mode dynamics input",
            left: (dim, 1),
            right: (u.len(), 1),
        });
    }
    Ok(())
}

/// Variable labels of the one-step transition graphs (0-based).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarLabel {
    State(usize),
    Input(usize),
    Output(usize),
}

impl fmt::Display for VarLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarLabel::State(i) => write!(f, "x{}", i + 1),
            VarLabel::Input(i) => write!(f, "u{}", i + 1),
            VarLabel::Output(i) => write!(f, "y{}", i + 1),
        }
    }
}

impl fmt::Debug for VarLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Edge set of a one-step transition graph.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct TransitionGraph {
    pub edges: BTreeSet<(VarLabel, VarLabel)>,
}

impl TransitionGraph {
    pub fn contains(&self, from: VarLabel, to: VarLabel) -> bool {
        self.edges.contains(&(from, to))
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }
}

fn support_edges(
    xs: &[TropicalMatrix],
    us: &[TropicalMatrix],
    n_u: usize,
    target: fn(usize) -> VarLabel,
) -> TransitionGraph {
    let mut edges = BTreeSet::new();
    for (xm, um) in xs.iter().zip(us) {
        for j in 0..xm.rows() {
            for i in 0..xm.cols() {
                if xm.get(j, i).is_finite() {
                    edges.insert((VarLabel::State(i), target(j)));
                }
            }
            for p in 0..n_u {
                if um.get(j, p).is_finite() {
                    edges.insert((VarLabel::Input(p), target(j)));
                }
            }
        }
    }
    TransitionGraph { edges }
}

/// `Γ_F`: `(x_i, x_j)` iff some `[A_l]_ji` is finite; `(u_p, x_j)` iff some
/// `[B_l]_jp` is finite.
pub fn transition_graph_f(mf: &MatrixForm) -> TransitionGraph {
    support_edges(&mf.a, &mf.b, mf.input_dim(), VarLabel::State)
}

/// `Γ_H`: `(x_i, y_j)` iff some `[C_m]_ji` is finite; `(u_p, y_j)` iff some
/// `[D_m]_jp` is finite.
pub fn transition_graph_h(mf: &MatrixForm) -> TransitionGraph {
    support_edges(&mf.c, &mf.d, mf.input_dim(), VarLabel::Output)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{gaubert_mu, production_line_mode_l1, production_line_mode_l2};
    use VarLabel::{Output as Y, State as X};

    fn w(v: i32) -> Weight {
        Weight::from(v)
    }

    fn production_mode(state: Vec<MmpsExpression>) -> ModeDynamics {
        ModeDynamics::expressions(state, vec![MmpsExpression::var(2)], 0).unwrap()
    }

    #[test]
    fn production_line_l1_matrix_form() {
        let mode = production_mode(production_line_mode_l1([1, 2, 3]));
        let mf = mode.to_matrix_form().unwrap();
        assert_eq!(mf.state_branches(), 2);
        assert_eq!(mf.output_branches(), 1);
        assert!(!mf.has_constant_input());
        let (a1, a2) = (&mf.a()[0], &mf.a()[1]);
        assert_eq!(a1.row_slice(0), a2.row_slice(0));
        assert_eq!(a1.row_slice(1), a2.row_slice(1));
        assert_ne!(a1.row_slice(2), a2.row_slice(2));
        let x = [w(0), w(0), Weight::EPSILON];
        assert_eq!(mf.next_state(&x, &[]).unwrap(), vec![w(1), w(2), w(4)]);
        assert_eq!(mf.output(&[w(1), w(2), w(4)], &[]).unwrap(), vec![w(4)]);
    }

    #[test]
    fn linear_dynamics_single_branch() {
        let (a, _) = gaubert_mu();
        let mode = ModeDynamics::expressions(
            (0..3).map(|j| a.transpose().row_slice(j).to_vec()).map(|row| {
                MmpsExpression::max_of(
                    row.iter()
                        .enumerate()
                        .filter(|(_, c)| c.is_finite())
                        .map(|(i, c)| MmpsExpression::var_plus(i, *c)),
                )
            }).collect(),
            vec![MmpsExpression::var(0)],
            0,
        )
        .unwrap();
        let mf = mode.to_matrix_form().unwrap();
        assert_eq!(mf.state_branches(), 1);
        assert_eq!(mf.a()[0], a.transpose());
    }

    #[test]
    fn gaubert_transition_graphs() {
        let (a, b) = gaubert_mu();
        let c = TropicalMatrix::row(&[w(2), Weight::EPSILON, Weight::EPSILON]);
        let g1 = transition_graph_f(&MatrixForm::autonomous(a.transpose(), c.clone()).unwrap());
        let g2 = transition_graph_f(&MatrixForm::autonomous(b.transpose(), c.clone()).unwrap());
        let e1: BTreeSet<_> = [(0, 1), (0, 2), (1, 2)].iter().map(|&(i, j)| (X(i), X(j))).collect();
        let e2: BTreeSet<_> = [(1, 0), (1, 1), (2, 0), (2, 1), (2, 2)]
            .iter()
            .map(|&(i, j)| (X(i), X(j)))
            .collect();
        assert_eq!(g1.edges, e1);
        assert_eq!(g2.edges, e2);
        let h = transition_graph_h(&MatrixForm::autonomous(a.transpose(), c).unwrap());
        assert_eq!(h.edges.iter().copied().collect::<Vec<_>>(), vec![(X(0), Y(0))]);
    }

    #[test]
    fn empty_graph_for_epsilon_dynamics() {
        let mf = MatrixForm::autonomous(TropicalMatrix::epsilon(3, 3), TropicalMatrix::epsilon(1, 3)).unwrap();
        assert!(transition_graph_f(&mf).is_empty());
        assert!(transition_graph_h(&mf).is_empty());
    }

    #[test]
    fn production_line_graph_partition() {
        let g1 = transition_graph_f(&production_mode(production_line_mode_l1([1, 2, 3])).to_matrix_form().unwrap());
        let g2 = transition_graph_f(&production_mode(production_line_mode_l2([1, 2, 3])).to_matrix_form().unwrap());
        let only1: Vec<_> = g1.edges.difference(&g2.edges).copied().collect();
        let only2: Vec<_> = g2.edges.difference(&g1.edges).copied().collect();
        assert_eq!(only1, vec![(X(2), X(0))]);
        assert_eq!(only2, vec![(X(2), X(1))]);
        assert_eq!(g1.edges.intersection(&g2.edges).count(), 7);
    }

    #[test]
    fn constant_column() {
        // x1⁺ = max(x1 + 1, 4)
        let mode = ModeDynamics::expressions(
            vec![MmpsExpression::max(MmpsExpression::var_plus(0, 1), MmpsExpression::constant(4))],
            vec![MmpsExpression::var(0)],
            0,
        )
        .unwrap();
        let mf = mode.to_matrix_form().unwrap();
        assert!(mf.has_constant_input());
        assert_eq!(mf.input_dim(), 0);
        assert_eq!(mf.next_state(&[w(0)], &[]).unwrap(), vec![w(4)]);
        assert_eq!(mf.next_state(&[w(5)], &[]).unwrap(), vec![w(6)]);
        assert_eq!(transition_graph_f(&mf).len(), 1);
    }

    #[test]
    fn empty_conjunctive_rejected() {
        assert!(to_matrix_form(&[], &[], 1, 0).is_err());
    }
}
