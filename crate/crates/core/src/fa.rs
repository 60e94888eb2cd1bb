//! Nondeterministic finite automata: the common target of all abstractions.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::word::Word;
use crate::{Error, Result};

/// `(Q, Σ, δ, Q₀, Q_f)` with states and symbols indexed from 0.
#[derive(Clone, PartialEq, Eq)]
pub struct FiniteAutomaton {
    state_names: Vec<String>,
    alphabet: Vec<String>,
    /// `delta[state][symbol]` is the sorted successor list.
    delta: Vec<Vec<Vec<usize>>>,
    initial: BTreeSet<usize>,
    final_states: BTreeSet<usize>,
}

impl FiniteAutomaton {
    pub fn new(state_names: Vec<String>, alphabet: Vec<String>) -> Self {
        let delta = vec![vec![Vec::new(); alphabet.len()]; state_names.len()];
        FiniteAutomaton {
            state_names,
            alphabet,
            delta,
            initial: BTreeSet::new(),
            final_states: BTreeSet::new(),
        }
    }

    pub fn add_state(&mut self, name: impl Into<String>) -> usize {
        self.state_names.push(name.into());
        self.delta.push(vec![Vec::new(); self.alphabet.len()]);
        self.state_names.len() - 1
    }

    fn check_state(&self, s: usize) -> Result<()> {
        if s < self.state_names.len() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                kind: "automaton state",
                index: s,
                dim: self.state_names.len(),
            })
        }
    }

    pub fn symbol_index(&self, symbol: &str) -> Result<usize> {
        self.alphabet
            .iter()
            .position(|s| s == symbol)
            .ok_or_else(|| Error::UnknownSymbol(symbol.into()))
    }

    pub fn add_transition(&mut self, from: usize, symbol: &str, to: usize) -> Result<()> {
        let a = self.symbol_index(symbol)?;
        self.add_transition_idx(from, a, to)
    }

    pub fn add_transition_idx(&mut self, from: usize, symbol: usize, to: usize) -> Result<()> {
        self.check_state(from)?;
        self.check_state(to)?;
        if symbol >= self.alphabet.len() {
            return Err(Error::IndexOutOfRange {
                kind: "symbol",
                index: symbol,
                dim: self.alphabet.len(),
            });
        }
        let succ = &mut self.delta[from][symbol];
        if let Err(pos) = succ.binary_search(&to) {
            succ.insert(pos, to);
        }
        Ok(())
    }

    pub fn set_initial(&mut self, s: usize) -> Result<()> {
        self.check_state(s)?;
        self.initial.insert(s);
        Ok(())
    }

    pub fn set_final(&mut self, s: usize) -> Result<()> {
        self.check_state(s)?;
        self.final_states.insert(s);
        Ok(())
    }

    pub fn unset_final(&mut self, s: usize) {
        self.final_states.remove(&s);
    }

    pub fn state_count(&self) -> usize {
        self.state_names.len()
    }

    pub fn state_names(&self) -> &[String] {
        &self.state_names
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.state_names.iter().position(|s| s == name)
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn initial(&self) -> &BTreeSet<usize> {
        &self.initial
    }

    pub fn final_states(&self) -> &BTreeSet<usize> {
        &self.final_states
    }

    pub fn is_initial(&self, s: usize) -> bool {
        self.initial.contains(&s)
    }

    pub fn is_final(&self, s: usize) -> bool {
        self.final_states.contains(&s)
    }

    pub fn successors(&self, s: usize, symbol: usize) -> &[usize] {
        &self.delta[s][symbol]
    }

    /// All transitions `(from, symbol, to)` in index order.
    pub fn transitions(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.delta.iter().enumerate().flat_map(|(s, row)| {
            row.iter()
                .enumerate()
                .flat_map(move |(a, succ)| succ.iter().map(move |&t| (s, a, t)))
        })
    }

    pub fn transition_count(&self) -> usize {
        self.transitions().count()
    }

    /// The set of states reachable from `from` on `symbol`.
    pub fn step_set(&self, from: &BTreeSet<usize>, symbol: usize) -> BTreeSet<usize> {
        from.iter()
            .flat_map(|&s| self.delta[s][symbol].iter().copied())
            .collect()
    }

    pub fn accepts(&self, word: &Word) -> Result<bool> {
        let mut current = self.initial.clone();
        for sym in word.symbols() {
            let a = self.symbol_index(sym)?;
            current = self.step_set(&current, a);
            if current.is_empty() {
                return Ok(false);
            }
        }
        Ok(current.iter().any(|s| self.final_states.contains(s)))
    }

    /// Every accepted word of length at most `max_len`, by breadth-first
    /// search over reachable state sets.
    pub fn language_upto(&self, max_len: usize) -> BTreeSet<Word> {
        let mut out = BTreeSet::new();
        let mut frontier = vec![(Word::empty(), self.initial.clone())];
        for len in 0..=max_len {
            let mut next = Vec::new();
            for (word, states) in frontier {
                if states.iter().any(|s| self.final_states.contains(s)) {
                    out.insert(word.clone());
                }
                if len == max_len {
                    continue;
                }
                for (a, sym) in self.alphabet.iter().enumerate() {
                    let succ = self.step_set(&states, a);
                    if !succ.is_empty() {
                        let mut w = word.clone();
                        w.push(sym.clone());
                        next.push((w, succ));
                    }
                }
            }
            frontier = next;
        }
        out
    }

    /// Graphviz description of the automaton.
    pub fn to_dot(&self) -> String {
        use core::fmt::Write;
        let mut s = String::from("digraph fa {\n  rankdir=LR;\n");
        for (i, name) in self.state_names.iter().enumerate() {
            let shape = if self.is_final(i) { "doublecircle" } else { "circle" };
            let _ = writeln!(s, "  s{i} [label=\"{name}\", shape={shape}];");
            if self.is_initial(i) {
                let _ = writeln!(s, "  init{i} [shape=point];\n  init{i} -> s{i};");
            }
        }
        for (from, a, to) in self.transitions() {
            let _ = writeln!(s, "  s{from} -> s{to} [label=\"{}\"];", self.alphabet[a]);
        }
        s.push_str("}\n");
        s
    }
}

impl fmt::Debug for FiniteAutomaton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "FiniteAutomaton {{")?;
        writeln!(f, "  states: {:?}", self.state_names)?;
        writeln!(f, "  alphabet: {:?}", self.alphabet)?;
        writeln!(f, "  initial: {:?}", self.initial)?;
        writeln!(f, "  final: {:?}", self.final_states)?;
        for (from, a, to) in self.transitions() {
            writeln!(
                f,
                "  {} -{}-> {}",
                self.state_names[from], self.alphabet[a], self.state_names[to]
            )?;
        }
        write!(f, "}}")
    }
}
