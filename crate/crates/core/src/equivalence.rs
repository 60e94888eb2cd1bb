//! Relations between models: bounded and exact language equality,
//! simulation and bisimulation on finite automata, and bounded
//! input/output inclusion between executable models.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fa::FiniteAutomaton;
use crate::maha::{HybridAutomaton, HybridInput};
use crate::mpa::MaxPlusAutomaton;
use crate::smpl::{ExogenousInput, SmplSystem, StepInput};
use crate::weight::Weight;
use crate::word::Word;
use crate::{Error, Result};

/// Every accepted word of length at most `max_len`.
pub fn language_upto(fa: &FiniteAutomaton, max_len: usize) -> BTreeSet<Word> {
    fa.language_upto(max_len)
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum LanguageComparison {
    Equal,
    /// The shortlex-smallest word accepted by exactly one side.
    Differ { witness: Word, accepted_by_first: bool },
}

impl LanguageComparison {
    pub fn is_equal(&self) -> bool {
        matches!(self, LanguageComparison::Equal)
    }
}

/// `b`'s symbol index for each of `a`'s symbols, or
/// [`Error::AlphabetMismatch`] when the alphabets differ as sets.
fn symbol_map(a: &FiniteAutomaton, b: &FiniteAutomaton) -> Result<Vec<usize>> {
    let sa: BTreeSet<&String> = a.alphabet().iter().collect();
    let sb: BTreeSet<&String> = b.alphabet().iter().collect();
    if sa != sb {
        return Err(Error::AlphabetMismatch);
    }
    a.alphabet()
        .iter()
        .map(|s| b.symbol_index(s))
        .collect()
}

/// Compares the languages restricted to words of length at most `bound`
/// (`None` compares them outright) by breadth-first search over pairs of
/// reachable state sets in shortlex order.
fn compare_languages(a: &FiniteAutomaton, b: &FiniteAutomaton, bound: Option<usize>) -> Result<LanguageComparison> {
    let map = symbol_map(a, b)?;
    let mut order: Vec<usize> = (0..a.alphabet().len()).collect();
    order.sort_by(|&x, &y| a.alphabet()[x].cmp(&a.alphabet()[y]));

    let start = (a.initial().clone(), b.initial().clone());
    let mut seen = BTreeSet::from([start.clone()]);
    let mut queue = VecDeque::from([(Word::empty(), start)]);
    while let Some((word, (sa, sb))) = queue.pop_front() {
        let fa_acc = sa.iter().any(|&s| a.is_final(s));
        let fb_acc = sb.iter().any(|&s| b.is_final(s));
        if fa_acc != fb_acc {
            return Ok(LanguageComparison::Differ {
                witness: word,
                accepted_by_first: fa_acc,
            });
        }
        if bound.is_some_and(|k| word.len() >= k) {
            continue;
        }
        for &sym in &order {
            let next = (a.step_set(&sa, sym), b.step_set(&sb, map[sym]));
            if next.0.is_empty() && next.1.is_empty() {
                continue;
            }
            if seen.insert(next.clone()) {
                let mut w = word.clone();
                w.push(a.alphabet()[sym].clone());
                queue.push_back((w, next));
            }
        }
    }
    Ok(LanguageComparison::Equal)
}

/// Equality of the languages restricted to words of length at most
/// `max_len`, with the shortlex-smallest distinguishing word otherwise.
pub fn language_equal_upto(a: &FiniteAutomaton, b: &FiniteAutomaton, max_len: usize) -> Result<LanguageComparison> {
    compare_languages(a, b, Some(max_len))
}

/// Exact language equality.
pub fn language_equal(a: &FiniteAutomaton, b: &FiniteAutomaton) -> Result<LanguageComparison> {
    compare_languages(a, b, None)
}

pub type Relation = BTreeSet<(usize, usize)>;

fn refine(
    a: &FiniteAutomaton,
    b: &FiniteAutomaton,
    map: &[usize],
    mut rel: Relation,
    back: bool,
) -> Relation {
    // `p'` must be matched by some `q'` with `(p', q')` still related.
    let forth_ok = |rel: &Relation, p: usize, q: usize| {
        (0..map.len()).all(|s| {
            a.successors(p, s)
                .iter()
                .all(|&p2| b.successors(q, map[s]).iter().any(|&q2| rel.contains(&(p2, q2))))
        })
    };
    let back_ok = |rel: &Relation, p: usize, q: usize| {
        (0..map.len()).all(|s| {
            b.successors(q, map[s])
                .iter()
                .all(|&q2| a.successors(p, s).iter().any(|&p2| rel.contains(&(p2, q2))))
        })
    };
    loop {
        let drop: Vec<(usize, usize)> = rel
            .iter()
            .copied()
            .filter(|&(p, q)| !forth_ok(&rel, p, q) || (back && !back_ok(&rel, p, q)))
            .collect();
        if drop.is_empty() {
            return rel;
        }
        for pair in drop {
            rel.remove(&pair);
        }
    }
}

fn same_finality(a: &FiniteAutomaton, b: &FiniteAutomaton) -> Relation {
    let mut rel = BTreeSet::new();
    for p in 0..a.state_count() {
        for q in 0..b.state_count() {
            if a.is_final(p) == b.is_final(q) {
                rel.insert((p, q));
            }
        }
    }
    rel
}

/// The largest relation `R` in which related states agree on finality and
/// every move of `p` is matched by a move of `q` into `R`.
pub fn greatest_simulation(a: &FiniteAutomaton, b: &FiniteAutomaton) -> Result<Relation> {
    let map = symbol_map(a, b)?;
    Ok(refine(a, b, &map, same_finality(a, b), false))
}

/// The greatest bisimulation between the two automata.
pub fn greatest_bisimulation(a: &FiniteAutomaton, b: &FiniteAutomaton) -> Result<Relation> {
    let map = symbol_map(a, b)?;
    Ok(refine(a, b, &map, same_finality(a, b), true))
}

/// `b` simulates `a`: every initial state of `a` is related to some
/// initial state of `b`.
pub fn simulates(b: &FiniteAutomaton, a: &FiniteAutomaton) -> Result<bool> {
    let rel = greatest_simulation(a, b)?;
    Ok(a
        .initial()
        .iter()
        .all(|&p| b.initial().iter().any(|&q| rel.contains(&(p, q)))))
}

/// Some bisimulation relates every initial state of either automaton to an
/// initial state of the other.
pub fn bisimilar(a: &FiniteAutomaton, b: &FiniteAutomaton) -> Result<bool> {
    let rel = greatest_bisimulation(a, b)?;
    let forth = a
        .initial()
        .iter()
        .all(|&p| b.initial().iter().any(|&q| rel.contains(&(p, q))));
    let back = b
        .initial()
        .iter()
        .all(|&q| a.initial().iter().any(|&p| rel.contains(&(p, q))));
    Ok(forth && back)
}

/// The input signals a model reads at each event.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct InputSpace {
    pub continuous: usize,
    pub control: usize,
    pub symbols: BTreeSet<String>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BehaviourTrace {
    pub inputs: Vec<HybridInput>,
    /// One output vector per executed event.
    pub outputs: Vec<Vec<Weight>>,
    pub halted_at: Option<usize>,
}

/// A model observed as an input/output map over event sequences.
pub trait IoBehaviour {
    fn input_space(&self) -> InputSpace;
    fn output_dim(&self) -> usize;
    /// `None` when the model does not define a behaviour for `inputs`.
    fn observe(&self, inputs: &[HybridInput]) -> Result<Option<BehaviourTrace>>;
}

impl IoBehaviour for MaxPlusAutomaton {
    fn input_space(&self) -> InputSpace {
        InputSpace {
            continuous: 0,
            control: 0,
            symbols: self.alphabet().iter().cloned().collect(),
        }
    }

    fn output_dim(&self) -> usize {
        1
    }

    /// Defined on accepted words; the output after `k` events is the weight
    /// of the length-`k` prefix.
    fn observe(&self, inputs: &[HybridInput]) -> Result<Option<BehaviourTrace>> {
        let symbols = inputs
            .iter()
            .map(|i| i.discrete.clone().ok_or_else(|| Error::UnknownSymbol(String::new())))
            .collect::<Result<Vec<_>>>()?;
        let word = Word::new(symbols);
        if !self.accepts(&word)? {
            return Ok(None);
        }
        let outputs = (1..=word.len())
            .map(|k| self.eval_output(&word.prefix(k)).map(|y| vec![y]))
            .collect::<Result<Vec<_>>>()?;
        Ok(Some(BehaviourTrace {
            inputs: inputs.to_vec(),
            outputs,
            halted_at: None,
        }))
    }
}

impl IoBehaviour for SmplSystem {
    /// `continuous` is `u ++ r`, `control` is `v`.
    fn input_space(&self) -> InputSpace {
        let d = self.dims();
        InputSpace {
            continuous: d.n_u + d.n_r,
            control: d.n_v,
            symbols: self.discrete_inputs().iter().cloned().collect(),
        }
    }

    fn output_dim(&self) -> usize {
        self.dims().n_y
    }

    fn observe(&self, inputs: &[HybridInput]) -> Result<Option<BehaviourTrace>> {
        let n_u = self.dims().n_u;
        let steps = inputs
            .iter()
            .map(|i| {
                if i.continuous.len() < n_u {
                    return Err(Error::SpaceMismatch("continuous input shorter than u"));
                }
                Ok(StepInput {
                    u: i.continuous[..n_u].to_vec(),
                    v: i.control.clone(),
                    exogenous: ExogenousInput {
                        theta_x: i.continuous[n_u..].to_vec(),
                        w: i.discrete.clone(),
                    },
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let run = self.simulate(&steps)?;
        Ok(Some(BehaviourTrace {
            inputs: inputs.to_vec(),
            outputs: run.records.into_iter().map(|r| r.y).collect(),
            halted_at: run.halted_at,
        }))
    }
}

impl IoBehaviour for HybridAutomaton {
    fn input_space(&self) -> InputSpace {
        InputSpace {
            continuous: self.input_dim(),
            control: self.control_dim(),
            symbols: self.discrete_inputs().iter().cloned().collect(),
        }
    }

    fn output_dim(&self) -> usize {
        HybridAutomaton::output_dim(self)
    }

    fn observe(&self, inputs: &[HybridInput]) -> Result<Option<BehaviourTrace>> {
        let run = self.run(inputs)?;
        Ok(Some(BehaviourTrace {
            inputs: inputs.to_vec(),
            outputs: run.records.into_iter().map(|r| r.y).collect(),
            halted_at: run.halted_at,
        }))
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum InclusionRegime {
    /// Every discrete input sequence up to the bound.
    Exhaustive,
    /// Seeded random input sequences.
    Sampled { samples: usize, seed: u64 },
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Counterexample {
    pub inputs: Vec<HybridInput>,
    pub left: BehaviourTrace,
    pub right: Option<BehaviourTrace>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct InclusionReport {
    pub regime: InclusionRegime,
    pub bound: usize,
    pub checked: usize,
    /// Shortest failing prefix of the first failing sequence.
    pub counterexample: Option<Counterexample>,
}

impl InclusionReport {
    pub fn holds(&self) -> bool {
        self.counterexample.is_none()
    }
}

pub const INCLUSION_SAMPLES: usize = 200;

fn mismatch(
    left: &dyn IoBehaviour,
    right: &dyn IoBehaviour,
    inputs: &[HybridInput],
) -> Result<Option<Counterexample>> {
    let Some(l) = left.observe(inputs)? else {
        return Ok(None);
    };
    let r = right.observe(inputs)?;
    if r.as_ref() == Some(&l) {
        return Ok(None);
    }
    Ok(Some(Counterexample {
        inputs: inputs.to_vec(),
        left: l,
        right: r,
    }))
}

fn minimise(left: &dyn IoBehaviour, right: &dyn IoBehaviour, cex: Counterexample) -> Result<Counterexample> {
    for len in 0..cex.inputs.len() {
        if let Some(shorter) = mismatch(left, right, &cex.inputs[..len])? {
            return Ok(shorter);
        }
    }
    Ok(cex)
}

fn sample_weight(rng: &mut ChaCha8Rng) -> Weight {
    if rng.gen_bool(0.2) {
        Weight::EPSILON
    } else {
        Weight::from(rng.gen_range(-3..=8))
    }
}

/// Checks that every behaviour `left` defines on input sequences of length
/// at most `bound` is also produced by `right`. Sequences are enumerated
/// when the models have no continuous or control inputs and sampled with
/// `seed` otherwise.
pub fn behavioural_inclusion_upto(
    left: &dyn IoBehaviour,
    right: &dyn IoBehaviour,
    bound: usize,
    seed: u64,
) -> Result<InclusionReport> {
    let space = left.input_space();
    if space != right.input_space() {
        return Err(Error::SpaceMismatch("input spaces differ"));
    }
    if left.output_dim() != right.output_dim() {
        return Err(Error::SpaceMismatch("output dimensions differ"));
    }
    let symbols: Vec<Option<String>> = if space.symbols.is_empty() {
        vec![None]
    } else {
        space.symbols.iter().cloned().map(Some).collect()
    };
    let mut checked = 0;
    let mut found = None;

    let regime = if space.continuous == 0 && space.control == 0 {
        let mut frontier: Vec<Vec<HybridInput>> = vec![Vec::new()];
        'outer: for _ in 0..=bound {
            let mut next = Vec::new();
            for seq in &frontier {
                checked += 1;
                if let Some(c) = mismatch(left, right, seq)? {
                    found = Some(c);
                    break 'outer;
                }
                if seq.len() < bound {
                    for w in &symbols {
                        let mut s = seq.clone();
                        s.push(HybridInput {
                            discrete: w.clone(),
                            ..Default::default()
                        });
                        next.push(s);
                    }
                }
            }
            frontier = next;
        }
        InclusionRegime::Exhaustive
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..INCLUSION_SAMPLES {
            let len = rng.gen_range(0..=bound);
            let seq: Vec<HybridInput> = (0..len)
                .map(|_| HybridInput {
                    continuous: (0..space.continuous).map(|_| sample_weight(&mut rng)).collect(),
                    control: (0..space.control).map(|_| sample_weight(&mut rng)).collect(),
                    discrete: symbols[rng.gen_range(0..symbols.len())].clone(),
                })
                .collect();
            checked += 1;
            if let Some(c) = mismatch(left, right, &seq)? {
                found = Some(c);
                break;
            }
        }
        InclusionRegime::Sampled {
            samples: INCLUSION_SAMPLES,
            seed,
        }
    };
    let counterexample = match found {
        Some(c) => Some(minimise(left, right, c)?),
        None => None,
    };
    Ok(InclusionReport {
        regime,
        bound,
        checked,
        counterexample,
    })
}

/// Groups the states of `fa` by the block of the coarsest partition that
/// respects finality and transitions; useful for printing bisimulation
/// classes of a single automaton.
pub fn bisimulation_classes(fa: &FiniteAutomaton) -> Vec<BTreeSet<usize>> {
    let rel = refine(
        fa,
        fa,
        &(0..fa.alphabet().len()).collect::<Vec<_>>(),
        same_finality(fa, fa),
        true,
    );
    let mut classes: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for p in 0..fa.state_count() {
        let rep = (0..fa.state_count())
            .find(|&q| rel.contains(&(p, q)))
            .unwrap_or(p);
        classes.entry(rep).or_default().insert(p);
    }
    classes.into_values().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{feedback_smpl, gaubert_mpa, gaubert_smpl};
    use alloc::string::ToString;

    fn fa(states: usize, alphabet: &[&str], edges: &[(usize, &str, usize)], init: &[usize], fin: &[usize]) -> FiniteAutomaton {
        let mut f = FiniteAutomaton::new(
            (0..states).map(|i| i.to_string()).collect(),
            alphabet.iter().map(|s| s.to_string()).collect(),
        );
        for &(p, a, q) in edges {
            f.add_transition(p, a, q).unwrap();
        }
        for &s in init {
            f.set_initial(s).unwrap();
        }
        for &s in fin {
            f.set_final(s).unwrap();
        }
        f
    }

    fn branching_pair() -> (FiniteAutomaton, FiniteAutomaton) {
        let late = fa(3, &["a", "b", "c"], &[(0, "a", 1), (1, "b", 2), (1, "c", 2)], &[0], &[2]);
        let early = fa(
            4,
            &["a", "b", "c"],
            &[(0, "a", 1), (0, "a", 2), (1, "b", 3), (2, "c", 3)],
            &[0],
            &[3],
        );
        (late, early)
    }

    #[test]
    fn language_equal_but_not_bisimilar() {
        let (late, early) = branching_pair();
        assert!(language_equal_upto(&late, &early, 5).unwrap().is_equal());
        assert!(language_equal(&late, &early).unwrap().is_equal());
        assert!(!bisimilar(&late, &early).unwrap());
        assert!(simulates(&late, &early).unwrap());
        assert!(!simulates(&early, &late).unwrap());
    }

    #[test]
    fn chain_not_simulated_by_silent_loop() {
        let chain = fa(3, &["a", "b"], &[(0, "a", 1), (1, "b", 2)], &[0], &[2]);
        let looping = fa(1, &["a", "b"], &[(0, "a", 0)], &[0], &[]);
        assert!(!simulates(&looping, &chain).unwrap());
    }

    #[test]
    fn shortlex_witness() {
        let x = fa(2, &["b", "a"], &[(0, "a", 1), (0, "b", 1)], &[0], &[1]);
        let y = fa(2, &["a", "b"], &[(0, "b", 1)], &[0], &[1]);
        assert_eq!(
            language_equal_upto(&x, &y, 3).unwrap(),
            LanguageComparison::Differ {
                witness: Word::parse("a"),
                accepted_by_first: true
            }
        );
        let z = fa(1, &["a", "c"], &[], &[0], &[0]);
        assert_eq!(language_equal_upto(&x, &z, 3), Err(Error::AlphabetMismatch));
    }

    #[test]
    fn bound_hides_long_differences() {
        let x = fa(4, &["a"], &[(0, "a", 1), (1, "a", 2), (2, "a", 3)], &[0], &[3]);
        let y = fa(1, &["a"], &[], &[0], &[]);
        assert!(language_equal_upto(&x, &y, 2).unwrap().is_equal());
        assert!(!language_equal_upto(&x, &y, 3).unwrap().is_equal());
    }

    #[test]
    fn bisimulation_of_self() {
        let (late, _) = branching_pair();
        assert!(bisimilar(&late, &late).unwrap());
        let dup = fa(3, &["a"], &[(0, "a", 1), (0, "a", 2)], &[0], &[1, 2]);
        assert_eq!(bisimulation_classes(&dup).len(), 2);
    }

    #[test]
    fn mpa_included_in_translation() {
        let report = behavioural_inclusion_upto(&gaubert_mpa(), &gaubert_smpl(), 4, 1).unwrap();
        assert!(report.holds());
        assert_eq!(report.regime, InclusionRegime::Exhaustive);
        assert_eq!(report.checked, 1 + 2 + 4 + 8 + 16);
        // The converse fails: "a" runs in the switching system but is
        // rejected by the automaton.
        let back = behavioural_inclusion_upto(&gaubert_smpl(), &gaubert_mpa(), 4, 1).unwrap();
        let cex = back.counterexample.unwrap();
        assert_eq!(cex.inputs.len(), 1);
        assert_eq!(cex.right, None);
    }

    #[test]
    fn sampled_regime_with_continuous_inputs() {
        let s = feedback_smpl(false);
        let h = HybridAutomaton::from_smpl_open(&s).unwrap();
        let report = behavioural_inclusion_upto(&s, &h, 5, 7).unwrap();
        assert!(report.holds());
        assert_eq!(
            report.regime,
            InclusionRegime::Sampled {
                samples: INCLUSION_SAMPLES,
                seed: 7
            }
        );
        assert_eq!(
            behavioural_inclusion_upto(&s, &gaubert_mpa(), 3, 0).unwrap_err(),
            Error::SpaceMismatch("input spaces differ")
        );
    }
}
