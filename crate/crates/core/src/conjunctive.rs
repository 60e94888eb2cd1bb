//! Max-min-plus conjunctive form: a `min` of max-plus projections, no
//! projection below another.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::expr::MmpsExpression;
use crate::weight::{oplus, oplus_dual, otimes, Weight};
use crate::{Error, Result};

/// `⊕_i a_i ⊗ x_i ⊕ ⊕_j b_j ⊗ u_j ⊕ c`.
///
/// The constant `c` plays the role of a coefficient on an always-`𝟙`
/// auxiliary input; it is `ε` when the projection has no constant term.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MaxPlusProjection {
    pub state_coeffs: Vec<Weight>,
    pub input_coeffs: Vec<Weight>,
    pub constant: Weight,
}

impl MaxPlusProjection {
    /// The constant function `ε`.
    pub fn epsilon(n: usize, n_u: usize) -> Self {
        MaxPlusProjection {
            state_coeffs: vec![Weight::EPSILON; n],
            input_coeffs: vec![Weight::EPSILON; n_u],
            constant: Weight::EPSILON,
        }
    }

    pub fn eval(&self, x: &[Weight], u: &[Weight]) -> Result<Weight> {
        if x.len() != self.state_coeffs.len() || u.len() != self.input_coeffs.len() {
            return Err(Error::ShapeMismatch {
                op: "projection evaluation",
                left: (self.state_coeffs.len(), self.input_coeffs.len()),
                right: (x.len(), u.len()),
            });
        }
        let sx = self.state_coeffs.iter().zip(x).map(|(&a, &b)| otimes(a, b));
        let su = self.input_coeffs.iter().zip(u).map(|(&a, &b)| otimes(a, b));
        Ok(sx.chain(su).fold(self.constant, oplus))
    }

    fn coeffs(&self) -> impl Iterator<Item = Weight> + '_ {
        self.state_coeffs
            .iter()
            .chain(&self.input_coeffs)
            .copied()
            .chain(core::iter::once(self.constant))
    }

    fn shifted(mut self, c: Weight) -> Self {
        for a in self
            .state_coeffs
            .iter_mut()
            .chain(self.input_coeffs.iter_mut())
        {
            *a = otimes(*a, c);
        }
        self.constant = otimes(self.constant, c);
        self
    }

    fn join(&self, other: &Self) -> Self {
        let zip = |a: &[Weight], b: &[Weight]| -> Vec<Weight> {
            a.iter().zip(b).map(|(&p, &q)| oplus(p, q)).collect()
        };
        MaxPlusProjection {
            state_coeffs: zip(&self.state_coeffs, &other.state_coeffs),
            input_coeffs: zip(&self.input_coeffs, &other.input_coeffs),
            constant: oplus(self.constant, other.constant),
        }
    }

    pub fn has_finite_coeff(&self) -> bool {
        self.coeffs().any(|c| c.is_finite())
    }
}

impl fmt::Debug for MaxPlusProjection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "proj(x: {:?}, u: {:?}, c: {})",
            self.state_coeffs, self.input_coeffs, self.constant
        )
    }
}

/// True iff every coefficient of `p` is `≥` the matching one of `q`, so
/// that `q ≤ p` pointwise.
pub fn dominates(p: &MaxPlusProjection, q: &MaxPlusProjection) -> Result<bool> {
    if p.state_coeffs.len() != q.state_coeffs.len()
        || p.input_coeffs.len() != q.input_coeffs.len()
    {
        return Err(Error::ShapeMismatch {
            op: "dominates",
            left: (p.state_coeffs.len(), p.input_coeffs.len()),
            right: (q.state_coeffs.len(), q.input_coeffs.len()),
        });
    }
    Ok(p.coeffs().zip(q.coeffs()).all(|(a, b)| a >= b))
}

/// `min` over a non-empty antichain of projections, sorted.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ConjunctiveForm {
    projections: Vec<MaxPlusProjection>,
}

impl ConjunctiveForm {
    /// Prunes dominated projections and sorts the rest.
    pub fn from_projections(projections: Vec<MaxPlusProjection>) -> Result<Self> {
        if projections.is_empty() {
            return Err(Error::EmptyConjunctiveForm);
        }
        let n = projections[0].state_coeffs.len();
        let n_u = projections[0].input_coeffs.len();
        if projections
            .iter()
            .any(|p| p.state_coeffs.len() != n || p.input_coeffs.len() != n_u)
        {
            return Err(Error::ShapeMismatch {
                op: "conjunctive form",
                left: (n, n_u),
                right: (0, 0),
            });
        }
        Ok(ConjunctiveForm {
            projections: prune(projections),
        })
    }

    pub fn projections(&self) -> &[MaxPlusProjection] {
        &self.projections
    }

    pub fn len(&self) -> usize {
        self.projections.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projections.is_empty()
    }

    pub fn eval(&self, x: &[Weight], u: &[Weight]) -> Result<Weight> {
        let mut acc = Weight::TOP;
        for p in &self.projections {
            acc = oplus_dual(acc, p.eval(x, u)?);
        }
        Ok(acc)
    }

    /// No projection lies below another.
    pub fn is_antichain(&self) -> bool {
        self.projections.iter().enumerate().all(|(i, p)| {
            self.projections
                .iter()
                .enumerate()
                .all(|(j, q)| i == j || !dominates(q, p).unwrap_or(false))
        })
    }

    /// The expression `min_l max(...)` this form denotes.
    pub fn to_expression(&self) -> MmpsExpression {
        MmpsExpression::min_of(self.projections.iter().map(projection_expression))
    }
}

impl fmt::Debug for ConjunctiveForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.projections).finish()
    }
}

pub(crate) fn projection_expression(p: &MaxPlusProjection) -> MmpsExpression {
    let term = |leaf: MmpsExpression, c: Weight| {
        if c == Weight::ONE {
            leaf
        } else {
            MmpsExpression::plus(leaf, MmpsExpression::Const(c))
        }
    };
    let mut terms = Vec::new();
    for (i, &c) in p.state_coeffs.iter().enumerate() {
        if !c.is_epsilon() {
            terms.push(term(MmpsExpression::Var(i), c));
        }
    }
    for (j, &c) in p.input_coeffs.iter().enumerate() {
        if !c.is_epsilon() {
            terms.push(term(MmpsExpression::InputVar(j), c));
        }
    }
    if !p.constant.is_epsilon() {
        terms.push(MmpsExpression::Const(p.constant));
    }
    MmpsExpression::max_of(terms)
}

/// Drops every projection that lies above another one (in a `min` it can
/// never be the smallest), then deduplicates and sorts.
fn prune(mut ps: Vec<MaxPlusProjection>) -> Vec<MaxPlusProjection> {
    ps.sort();
    ps.dedup();
    let keep: Vec<bool> = (0..ps.len())
        .map(|i| {
            !(0..ps.len()).any(|j| j != i && dominates(&ps[i], &ps[j]).unwrap_or(false))
        })
        .collect();
    ps.into_iter()
        .zip(keep)
        .filter_map(|(p, k)| k.then_some(p))
        .collect()
}

/// Rewrites a max-min-plus expression over `n` state and `n_u` input
/// variables into conjunctive form by distributing `max` over `min` and
/// pruning after every step.
pub fn to_conjunctive(e: &MmpsExpression, n: usize, n_u: usize) -> Result<ConjunctiveForm> {
    e.check_max_min_plus()?;
    let (need_n, need_u) = e.arity();
    if need_n > n {
        return Err(Error::IndexOutOfRange {
            kind: "state variable",
            index: need_n - 1,
            dim: n,
        });
    }
    if need_u > n_u {
        return Err(Error::IndexOutOfRange {
            kind: "input variable",
            index: need_u - 1,
            dim: n_u,
        });
    }
    let projections = distribute(e, n, n_u)?;
    ConjunctiveForm::from_projections(projections)
}

fn distribute(e: &MmpsExpression, n: usize, n_u: usize) -> Result<Vec<MaxPlusProjection>> {
    use MmpsExpression as E;
    Ok(match e {
        E::Var(i) => {
            let mut p = MaxPlusProjection::epsilon(n, n_u);
            p.state_coeffs[*i] = Weight::ONE;
            vec![p]
        }
        E::InputVar(j) => {
            let mut p = MaxPlusProjection::epsilon(n, n_u);
            p.input_coeffs[*j] = Weight::ONE;
            vec![p]
        }
        E::Const(c) => {
            let mut p = MaxPlusProjection::epsilon(n, n_u);
            p.constant = *c;
            vec![p]
        }
        E::Min(a, b) => {
            let mut ps = distribute(a, n, n_u)?;
            ps.extend(distribute(b, n, n_u)?);
            prune(ps)
        }
        E::Max(a, b) => {
            let pa = distribute(a, n, n_u)?;
            let pb = distribute(b, n, n_u)?;
            let mut out = Vec::with_capacity(pa.len() * pb.len());
            for p in &pa {
                for q in &pb {
                    out.push(p.join(q));
                }
            }
            prune(out)
        }
        E::Plus(a, b) => match (a.as_ref(), b.as_ref()) {
            (E::Const(c), other) | (other, E::Const(c)) if c.is_finite() => distribute(other, n, n_u)?
                .into_iter()
                .map(|p| p.shifted(*c))
                .collect(),
            _ => return Err(Error::NotMaxMinPlus("sum of two non-constant terms")),
        },
        E::Scale(..) => return Err(Error::NotMaxMinPlus("scaling")),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::MmpsExpression as E;
    use crate::fixtures::production_line_mode_l1;

    const EPS: Weight = Weight::EPSILON;

    fn w(v: i32) -> Weight {
        Weight::from(v)
    }

    fn proj(state: &[Weight]) -> MaxPlusProjection {
        MaxPlusProjection {
            state_coeffs: state.to_vec(),
            input_coeffs: Vec::new(),
            constant: EPS,
        }
    }

    #[test]
    fn single_projection() {
        let e = E::max(E::var_plus(0, 1), E::var(1));
        let cf = to_conjunctive(&e, 2, 0).unwrap();
        assert_eq!(cf.projections(), &[proj(&[w(1), w(0)])]);
    }

    #[test]
    fn production_line_x3_splits_into_two() {
        let f = production_line_mode_l1([1, 2, 3]);
        let cf = to_conjunctive(&f[2], 3, 0).unwrap();
        // min(max(x1+τ1+τ3, x2+τ2, x3+2τ3), max(x1+τ1, x2+τ2+τ3, x3+2τ3))
        let mut expected = vec![proj(&[w(4), w(2), w(6)]), proj(&[w(1), w(5), w(6)])];
        expected.sort();
        assert_eq!(cf.projections(), expected.as_slice());
        assert!(cf.is_antichain());
    }

    #[test]
    fn dominated_projection_pruned() {
        // min(max(x0, x1), x0) = x0
        let e = E::min(E::max(E::var(0), E::var(1)), E::var(0));
        let cf = to_conjunctive(&e, 2, 0).unwrap();
        assert_eq!(cf.projections(), &[proj(&[w(0), EPS])]);
    }

    #[test]
    fn rejects_non_fragment() {
        let e = E::scale(2.0, E::var(0));
        assert_eq!(
            to_conjunctive(&e, 1, 0),
            Err(Error::NotMaxMinPlus("scaling"))
        );
        assert!(to_conjunctive(&E::var(3), 2, 0).is_err());
        assert_eq!(
            ConjunctiveForm::from_projections(Vec::new()),
            Err(Error::EmptyConjunctiveForm)
        );
    }

    #[test]
    fn dominance_examples() {
        assert!(dominates(&proj(&[w(1), w(0)]), &proj(&[w(0), w(0)])).unwrap());
        assert!(!dominates(&proj(&[w(1), EPS]), &proj(&[EPS, w(1)])).unwrap());
        assert!(dominates(&proj(&[w(1)]), &proj(&[w(1), w(0)])).is_err());
    }

    #[test]
    fn constants_and_inputs() {
        // min(u1 + 2, max(x1, 5))
        let e = E::min(E::plus(E::input(0), E::constant(2)), E::max(E::var(0), E::constant(5)));
        let cf = to_conjunctive(&e, 1, 1).unwrap();
        assert_eq!(cf.len(), 2);
        for (x, u) in [(0, 0), (7, 1), (3, 9)] {
            assert_eq!(
                cf.eval(&[w(x)], &[w(u)]).unwrap(),
                e.eval(&[w(x)], &[w(u)]).unwrap()
            );
        }
        let back = cf.to_expression();
        assert_eq!(back.eval(&[w(7)], &[w(1)]).unwrap(), w(3));
    }
}
