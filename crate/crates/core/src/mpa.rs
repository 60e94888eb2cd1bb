//! Max-plus automata `(S, Σ, α, μ, β)`.
//!
//! The state row vector follows `x(ϵ) = αᵀ`, `x(ω·σ) = x(ω) ⊗ μ(σ)` and the
//! output is `y(ω) = x(ω) ⊗ β`, the largest weight of an accepting path
//! labelled `ω`.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use crate::fa::FiniteAutomaton;
use crate::matrix::{has_finite_entry, TropicalMatrix};
use crate::weight::{oplus, otimes, Weight};
use crate::word::Word;
use crate::{Error, Result};

#[derive(Clone, PartialEq, Debug)]
pub struct MaxPlusAutomaton {
    state_names: Vec<String>,
    alphabet: Vec<String>,
    alpha: Vec<Weight>,
    mu: Vec<TropicalMatrix>,
    beta: Vec<Weight>,
}

/// A state sequence `s₀ … s_k` with `α(s₀)`, every step weight and `β(s_k)`
/// finite, together with its total weight.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AcceptingPath {
    pub states: Vec<usize>,
    pub weight: Weight,
}

impl MaxPlusAutomaton {
    /// `mu[i]` is the matrix of `alphabet[i]`. Weights must not be `⊤` and
    /// `α` needs a finite entry.
    pub fn new(
        state_names: Vec<String>,
        alphabet: Vec<String>,
        alpha: Vec<Weight>,
        mu: Vec<TropicalMatrix>,
        beta: Vec<Weight>,
    ) -> Result<Self> {
        let n = state_names.len();
        if alpha.len() != n || beta.len() != n {
            return Err(Error::ShapeMismatch {
                op: "automaton initial/final weights",
                left: (n, 1),
                right: (alpha.len(), beta.len()),
            });
        }
        if mu.len() != alphabet.len() {
            return Err(Error::InvalidModel(alloc::format!(
                "{} symbols but {} transition matrices",
                alphabet.len(),
                mu.len()
            )));
        }
        for m in &mu {
            if m.shape() != (n, n) {
                return Err(Error::ShapeMismatch {
                    op: "transition matrix",
                    left: (n, n),
                    right: m.shape(),
                });
            }
            if m.has_top() {
                return Err(Error::InvalidModel("transition weight +inf".into()));
            }
        }
        if alpha.iter().chain(&beta).any(|w| w.is_top()) {
            return Err(Error::InvalidModel("initial or final weight +inf".into()));
        }
        if !has_finite_entry(&alpha) {
            return Err(Error::InvalidModel("no initial state (alpha is all -inf)".into()));
        }
        let mut seen = BTreeSet::new();
        if !alphabet.iter().all(|s| seen.insert(s)) {
            return Err(Error::InvalidModel("duplicate symbol in alphabet".into()));
        }
        Ok(MaxPlusAutomaton {
            state_names,
            alphabet,
            alpha,
            mu,
            beta,
        })
    }

    pub fn state_count(&self) -> usize {
        self.state_names.len()
    }

    pub fn state_names(&self) -> &[String] {
        &self.state_names
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn alpha(&self) -> &[Weight] {
        &self.alpha
    }

    pub fn beta(&self) -> &[Weight] {
        &self.beta
    }

    /// Transition matrices in alphabet order.
    pub fn mu_all(&self) -> &[TropicalMatrix] {
        &self.mu
    }

    pub fn symbol_index(&self, symbol: &str) -> Result<usize> {
        self.alphabet
            .iter()
            .position(|s| s == symbol)
            .ok_or_else(|| Error::UnknownSymbol(symbol.into()))
    }

    pub fn mu(&self, symbol: &str) -> Result<&TropicalMatrix> {
        Ok(&self.mu[self.symbol_index(symbol)?])
    }

    /// `μ(ω)`, the ordered product of the word's matrices; identity for `ϵ`.
    pub fn word_matrix(&self, word: &Word) -> Result<TropicalMatrix> {
        let mut acc = TropicalMatrix::identity(self.state_count());
        for s in word.symbols() {
            acc = acc.otimes(self.mu(s)?)?;
        }
        Ok(acc)
    }

    /// `x(ω)`.
    pub fn eval_state(&self, word: &Word) -> Result<Vec<Weight>> {
        let mut x = self.alpha.clone();
        for s in word.symbols() {
            x = self.mu(s)?.apply_left(&x)?;
        }
        Ok(x)
    }

    /// `y(ω) = x(ω) ⊗ β`.
    pub fn eval_output(&self, word: &Word) -> Result<Weight> {
        Ok(self.output_of_state(&self.eval_state(word)?))
    }

    pub(crate) fn output_of_state(&self, x: &[Weight]) -> Weight {
        x.iter()
            .zip(&self.beta)
            .map(|(&a, &b)| otimes(a, b))
            .fold(Weight::EPSILON, oplus)
    }

    pub fn accepts(&self, word: &Word) -> Result<bool> {
        Ok(!self.eval_output(word)?.is_epsilon())
    }

    /// Accepted words of length at most `max_len`.
    pub fn language_upto(&self, max_len: usize) -> BTreeSet<Word> {
        let mut out = BTreeSet::new();
        let mut frontier = alloc::vec![(Word::empty(), self.alpha.clone())];
        for len in 0..=max_len {
            let mut next = Vec::new();
            for (word, x) in frontier {
                if !self.output_of_state(&x).is_epsilon() {
                    out.insert(word.clone());
                }
                if len == max_len {
                    continue;
                }
                for (sym, m) in self.alphabet.iter().zip(&self.mu) {
                    let x2 = m.apply_left(&x).expect("square matrices");
                    if has_finite_entry(&x2) {
                        let mut w = word.clone();
                        w.push(sym.clone());
                        next.push((w, x2));
                    }
                }
            }
            frontier = next;
        }
        out
    }

    /// A maximum-weight accepting path for `word`, if any.
    pub fn witness_path(&self, word: &Word) -> Result<Option<AcceptingPath>> {
        let n = self.state_count();
        let mats = word
            .symbols()
            .iter()
            .map(|s| self.mu(s))
            .collect::<Result<Vec<_>>>()?;
        // best[k][s]: best weight reaching s after k symbols, with predecessor
        let mut best: Vec<Vec<(Weight, usize)>> = Vec::with_capacity(mats.len() + 1);
        best.push(self.alpha.iter().map(|&a| (a, usize::MAX)).collect());
        for m in &mats {
            let prev = best.last().expect("non-empty");
            let mut row = alloc::vec![(Weight::EPSILON, usize::MAX); n];
            for (t, slot) in row.iter_mut().enumerate() {
                for (s, &(ws, _)) in prev.iter().enumerate() {
                    let cand = otimes(ws, m.get(s, t));
                    if !cand.is_epsilon() && cand > slot.0 {
                        *slot = (cand, s);
                    }
                }
            }
            best.push(row);
        }
        let last = best.last().expect("non-empty");
        let mut end = None;
        let mut total = Weight::EPSILON;
        for (s, &(ws, _)) in last.iter().enumerate() {
            let cand = otimes(ws, self.beta[s]);
            if !cand.is_epsilon() && cand > total {
                total = cand;
                end = Some(s);
            }
        }
        let Some(mut s) = end else {
            return Ok(None);
        };
        let mut states = alloc::vec![s];
        for k in (1..best.len()).rev() {
            s = best[k][s].1;
            states.push(s);
        }
        states.reverse();
        Ok(Some(AcceptingPath {
            states,
            weight: total,
        }))
    }

    /// Boolean abstraction: `s' ∈ δ(s, σ)` iff `[μ(σ)]_{s s'} ≠ ε`, initial
    /// states where `α ≠ ε`, final states where `β ≠ ε`.
    pub fn to_finite_abstraction(&self) -> FiniteAutomaton {
        let mut fa = FiniteAutomaton::new(self.state_names.clone(), self.alphabet.clone());
        for (a, m) in self.mu.iter().enumerate() {
            for s in 0..m.rows() {
                for t in 0..m.cols() {
                    if !m.get(s, t).is_epsilon() {
                        fa.add_transition_idx(s, a, t).expect("in range");
                    }
                }
            }
        }
        for s in 0..self.state_count() {
            if !self.alpha[s].is_epsilon() {
                fa.set_initial(s).expect("in range");
            }
            if !self.beta[s].is_epsilon() {
                fa.set_final(s).expect("in range");
            }
        }
        fa
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::gaubert_mpa;
    use alloc::vec;

    const EPS: Weight = Weight::EPSILON;

    fn w(v: i32) -> Weight {
        Weight::from(v)
    }

    fn word(s: &str) -> Word {
        Word::parse(s)
    }

    #[test]
    fn state_recursion() {
        let a = gaubert_mpa();
        assert_eq!(a.eval_state(&word("")).unwrap(), vec![w(0), EPS, EPS]);
        assert_eq!(a.eval_state(&word("a")).unwrap(), vec![EPS, w(1), w(3)]);
        assert_eq!(a.eval_state(&word("ab")).unwrap(), vec![w(10), w(8), w(4)]);
        assert_eq!(a.eval_state(&word("aab")).unwrap(), vec![w(12), w(10), w(6)]);
    }

    #[test]
    fn outputs() {
        let a = gaubert_mpa();
        assert_eq!(a.eval_output(&word("ab")).unwrap(), w(12));
        assert_eq!(a.eval_output(&word("aab")).unwrap(), w(14));
        assert_eq!(a.eval_output(&word("b")).unwrap(), EPS);
        assert!(a.accepts(&word("ab")).unwrap());
        assert!(a.accepts(&word("aab")).unwrap());
        assert!(!a.accepts(&word("b")).unwrap());
        assert!(!a.accepts(&word("aaa")).unwrap());
        assert!(a.eval_output(&word("c")).is_err());
    }

    #[test]
    fn bounded_language() {
        let a = gaubert_mpa();
        let lang = a.language_upto(3);
        for w in ["ab", "aab", "abb"] {
            assert!(lang.contains(&word(w)), "{w}");
        }
        for w in ["a", "b", "aa", "bb", "aaa"] {
            assert!(!lang.contains(&word(w)), "{w}");
        }
        // αᵀ ⊗ β = 2
        assert!(lang.contains(&Word::empty()));
        assert_eq!(a.language_upto(0).len(), 1);
    }

    #[test]
    fn all_epsilon_beta_rejects_everything() {
        let g = gaubert_mpa();
        let a = MaxPlusAutomaton::new(
            g.state_names().to_vec(),
            g.alphabet().to_vec(),
            g.alpha().to_vec(),
            g.mu_all().to_vec(),
            vec![EPS; 3],
        )
        .unwrap();
        assert!(a.language_upto(4).is_empty());
    }

    #[test]
    fn abstraction_of_fixture() {
        let fa = gaubert_mpa().to_finite_abstraction();
        let edges: Vec<(usize, &str, usize)> = fa
            .transitions()
            .map(|(s, a, t)| (s, fa.alphabet()[a].as_str(), t))
            .collect();
        assert_eq!(
            edges,
            vec![
                (0, "a", 1),
                (0, "a", 2),
                (1, "a", 2),
                (1, "b", 0),
                (1, "b", 1),
                (2, "b", 0),
                (2, "b", 1),
                (2, "b", 2),
            ]
        );
        assert_eq!(fa.initial().iter().copied().collect::<Vec<_>>(), vec![0]);
        assert_eq!(fa.final_states().iter().copied().collect::<Vec<_>>(), vec![0]);
        assert_eq!(fa.language_upto(6), gaubert_mpa().language_upto(6));
    }

    #[test]
    fn witness_paths() {
        let a = gaubert_mpa();
        let p = a.witness_path(&word("ab")).unwrap().unwrap();
        // 0 -a(3)-> 2 -b(7)-> 0, plus α = 0 and β = 2
        assert_eq!(p.states, vec![0, 2, 0]);
        assert_eq!(p.weight, w(12));
        assert!(a.witness_path(&word("b")).unwrap().is_none());
    }

    #[test]
    fn validation() {
        let g = gaubert_mpa();
        let mu = g.mu_all().to_vec();
        let names = g.state_names().to_vec();
        let sigma = g.alphabet().to_vec();
        assert!(MaxPlusAutomaton::new(names.clone(), sigma.clone(), vec![EPS; 3], mu.clone(), vec![EPS; 3]).is_err());
        assert!(MaxPlusAutomaton::new(names.clone(), sigma.clone(), vec![w(0); 2], mu.clone(), vec![EPS; 3]).is_err());
        let mut bad = mu.clone();
        bad[0].set(0, 0, Weight::TOP);
        assert!(MaxPlusAutomaton::new(names.clone(), sigma.clone(), vec![w(0); 3], bad, vec![EPS; 3]).is_err());
        assert!(MaxPlusAutomaton::new(names, vec![], vec![w(0); 3], vec![], vec![EPS; 3]).is_ok());
    }

    #[test]
    fn scalar_automaton() {
        let a = MaxPlusAutomaton::new(
            vec!["s".into()],
            vec!["c".into()],
            vec![w(0)],
            vec![TropicalMatrix::from_rows(&[[w(5)]]).unwrap()],
            vec![w(0)],
        )
        .unwrap();
        assert_eq!(a.eval_output(&word("ccc")).unwrap(), w(15));
    }
}
