//! The reproduction suite behind `maxalg reproduce`.

use std::collections::BTreeSet;

use maxalg_core::conjunctive::to_conjunctive;
use maxalg_core::equivalence::{behavioural_inclusion_upto, bisimilar, language_equal_upto};
use maxalg_core::expr::eval_all;
use maxalg_core::fixtures::{
    feedback_smpl, gaubert_mpa, gaubert_mu, gaubert_smpl, production_line_mode_l1, production_line_smpl,
};
use maxalg_core::maha::{HybridAutomaton, HybridInput};
use maxalg_core::matrix_form::VarLabel;
use maxalg_core::mpa::MaxPlusAutomaton;
use maxalg_core::smpl::{ExogenousInput, SmplSystem, StepInput};
use maxalg_core::word::words_of_length;
use maxalg_core::{TropicalMatrix, Weight, Word};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::report::{RunReport, Verdict};

type Check = fn(u64) -> Result<(bool, String), String>;

const CHECKS: [(&str, Check); 9] = [
    ("automaton-outputs", automaton_outputs),
    ("example-claims", example_claims),
    ("automaton-in-switching-system", automaton_in_switching_system),
    ("halting", halting),
    ("open-loop-traces", open_loop_traces),
    ("closed-loop-traces", closed_loop_traces),
    ("fused-abstraction-language", fused_abstraction_language),
    ("production-line", production_line),
    ("abstraction-shape", abstraction_shape),
];

/// Runs every check; the report is a function of `seed` alone.
pub fn reproduce(seed: u64) -> RunReport {
    let mut report = RunReport::new("reproduce");
    report.seed = Some(seed);
    for (name, check) in CHECKS {
        let v = match check(seed) {
            Ok((holds, detail)) => Verdict::new(name, holds, detail),
            Err(e) => Verdict::new(name, false, format!("error: {e}")),
        };
        report.verdicts.push(v);
    }
    report
}

fn w(v: i32) -> Weight {
    Weight::from(v)
}

const EPS: Weight = Weight::EPSILON;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn automaton_outputs(_: u64) -> Result<(bool, String), String> {
    let a = gaubert_mpa();
    let y = |s: &str| a.eval_output(&Word::parse(s)).map_err(err);
    let (ab, aab, b) = (y("ab")?, y("aab")?, y("b")?);
    let xa = a.eval_state(&Word::parse("a")).map_err(err)?;
    let holds = ab == w(12) && aab == w(14) && b == EPS && xa == vec![EPS, w(1), w(3)];
    Ok((holds, format!("y(ab) = {ab}, y(aab) = {aab}, y(b) = {b}")))
}

fn example_claims(_: u64) -> Result<(bool, String), String> {
    let (mu_a, mu_b) = gaubert_mu();
    let alpha_b = mu_b.apply_left(&[w(0), EPS, EPS]).map_err(err)?;
    let sq = mu_a.power(2).map_err(err)?;
    let cube = mu_a.power(3).map_err(err)?;
    let holds = alpha_b.iter().all(|x| x.is_epsilon()) && !sq.is_all_epsilon() && cube == TropicalMatrix::epsilon(3, 3);
    Ok((holds, "α ⊗ μ(b) = ε, μ(a)^2 ≠ ε, μ(a)^3 = ε".into()))
}

fn automaton_in_switching_system(seed: u64) -> Result<(bool, String), String> {
    let r = behavioural_inclusion_upto(&gaubert_mpa(), &gaubert_smpl(), 6, seed).map_err(err)?;
    Ok((r.holds(), format!("{} words up to length 6", r.checked)))
}

fn halting(_: u64) -> Result<(bool, String), String> {
    let a = gaubert_mpa();
    let s = gaubert_smpl();
    let mut words = 0;
    for len in 1..=6 {
        for word in words_of_length(a.alphabet(), len) {
            let inputs: Vec<StepInput> = word.symbols().iter().map(StepInput::symbol).collect();
            let run = s.simulate(&inputs).map_err(err)?;
            let dead = (1..=len).find(|&k| {
                a.eval_state(&word.prefix(k))
                    .map(|x| x.iter().all(|v| v.is_epsilon()))
                    .unwrap_or(false)
            });
            if run.halted_at != dead {
                return Ok((false, format!("{word}: halted at {:?}, expected {dead:?}", run.halted_at)));
            }
            words += 1;
        }
    }
    Ok((true, format!("{words} words halt exactly where the state empties")))
}

fn random_step(rng: &mut ChaCha8Rng, s: &SmplSystem) -> StepInput {
    let d = s.dims();
    let weight = |rng: &mut ChaCha8Rng| if rng.gen_bool(0.1) { EPS } else { w(rng.gen_range(0..=10)) };
    let symbols = s.discrete_inputs();
    StepInput {
        u: (0..d.n_u).map(|_| weight(rng)).collect(),
        v: (0..d.n_v).map(|_| weight(rng)).collect(),
        exogenous: ExogenousInput {
            theta_x: (0..d.n_r).map(|_| weight(rng)).collect(),
            w: (!symbols.is_empty()).then(|| symbols[rng.gen_range(0..symbols.len())].clone()),
        },
    }
}

fn compare_traces(seed: u64, closed: bool) -> Result<(bool, String), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut systems = vec![gaubert_smpl(), production_line_smpl([1, 2, 3]), feedback_smpl(false)];
    if closed {
        systems.push(feedback_smpl(true));
    }
    let mut runs = 0;
    for s in &systems {
        let d = s.dims();
        let h = if closed {
            HybridAutomaton::from_smpl_closed(s)
        } else {
            HybridAutomaton::from_smpl_open(s)
        }
        .map_err(err)?;
        for _ in 0..50 {
            let steps: Vec<StepInput> = (0..20).map(|_| random_step(&mut rng, s)).collect();
            let inputs: Vec<HybridInput> = steps
                .iter()
                .map(|i| {
                    let mut continuous = Vec::new();
                    if !closed || s.controller().is_pass_through() {
                        continuous.extend(&i.u);
                    }
                    if closed && s.controller().is_pass_through() {
                        continuous.extend(&i.v);
                    }
                    continuous.extend(&i.exogenous.theta_x);
                    HybridInput {
                        continuous,
                        control: if closed { Vec::new() } else { i.v.clone() },
                        discrete: i.exogenous.w.clone(),
                    }
                })
                .collect();
            let sr = s.simulate(&steps).map_err(err)?;
            let hr = h.run(&inputs).map_err(err)?;
            let same = sr.halted_at == hr.halted_at
                && sr.records.len() == hr.records.len()
                && sr.records.iter().zip(&hr.records).all(|(a, b)| {
                    let x = if closed { &b.x[1..1 + d.n] } else { &b.x[..] };
                    a.mode == b.q && a.x == x && a.y == b.y
                });
            if !same {
                return Ok((false, format!("trace mismatch on {:?}", s.mode_names())));
            }
            runs += 1;
        }
    }
    Ok((true, format!("{runs} runs of 20 events agree")))
}

fn open_loop_traces(seed: u64) -> Result<(bool, String), String> {
    compare_traces(seed, false)
}

fn closed_loop_traces(seed: u64) -> Result<(bool, String), String> {
    compare_traces(seed.wrapping_add(1), true)
}

/// A random three-state automaton over `{a, b}`.
pub fn random_automaton(rng: &mut ChaCha8Rng) -> MaxPlusAutomaton {
    let weight = |rng: &mut ChaCha8Rng| if rng.gen_bool(0.5) { EPS } else { w(rng.gen_range(0..=9)) };
    let mut alpha: Vec<Weight> = (0..3).map(|_| weight(rng)).collect();
    if alpha.iter().all(|x| x.is_epsilon()) {
        alpha[0] = w(0);
    }
    let beta = (0..3).map(|_| weight(rng)).collect();
    let mu = (0..2)
        .map(|_| TropicalMatrix::new(3, 3, (0..9).map(|_| weight(rng)).collect()).expect("3x3"))
        .collect();
    MaxPlusAutomaton::new(
        vec!["1".into(), "2".into(), "3".into()],
        vec!["a".into(), "b".into()],
        alpha,
        mu,
        beta,
    )
    .expect("valid automaton")
}

fn fused_abstraction_language(seed: u64) -> Result<(bool, String), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(2));
    let mut cases = vec![gaubert_mpa()];
    cases.extend((0..20).map(|_| random_automaton(&mut rng)));
    for (i, a) in cases.iter().enumerate() {
        let h = HybridAutomaton::from_smpl_open(&SmplSystem::from_mpa(a)).map_err(err)?;
        let hoat = h.specialized_abstraction_for_mpa_translation().map_err(err)?;
        let at = a.to_finite_abstraction();
        if !language_equal_upto(&at, &hoat, 6).map_err(err)?.is_equal() {
            return Ok((false, format!("languages differ on automaton {i}")));
        }
        if i == 0 && !bisimilar(&at, &hoat).map_err(err)? {
            return Ok((false, "no bisimulation for the example automaton".into()));
        }
    }
    Ok((true, format!("{} automata, languages equal up to length 6", cases.len())))
}

fn production_line(seed: u64) -> Result<(bool, String), String> {
    let tau = [1, 2, 3];
    let s = production_line_smpl(tau);
    let rec = s.step(1, &s.initial_state(), &StepInput::symbol("l1")).map_err(err)?;
    let oracle = eval_all(&production_line_mode_l1(tau), s.x0(), &[]).map_err(err)?;
    let step_ok = rec.x == oracle && rec.x == vec![w(1), w(2), w(4)] && rec.y == vec![w(4)];

    let x3 = &production_line_mode_l1(tau)[2];
    let cf = to_conjunctive(x3, 3, 0).map_err(err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(3));
    let mut cf_ok = true;
    for _ in 0..1000 {
        let x: Vec<Weight> = (0..3).map(|_| w(rng.gen_range(-50..=50))).collect();
        cf_ok &= cf.eval(&x, &[]).map_err(err)? == x3.eval(&x, &[]).map_err(err)?;
    }

    let h = HybridAutomaton::from_smpl_open(&s).map_err(err)?;
    let fa = h.finite_abstraction().map_err(err)?;
    let one = fa.symbol_index("1").map_err(err)?;
    let edges = |mode: &str| -> BTreeSet<(String, String)> {
        fa.transitions()
            .filter(|&(p, a, _)| a == one && fa.state_names()[p].starts_with(&format!("({mode},")))
            .map(|(p, _, q)| (strip(&fa.state_names()[p]), strip(&fa.state_names()[q])))
            .collect()
    };
    let (e1, e2) = (edges("l1"), edges("l2"));
    let only1: Vec<_> = e1.difference(&e2).cloned().collect();
    let only2: Vec<_> = e2.difference(&e1).cloned().collect();
    let x = |i| VarLabel::State(i).to_string();
    let partition_ok = only1 == vec![(x(2), x(0))] && only2 == vec![(x(2), x(1))] && e1.intersection(&e2).count() == 7;

    Ok((
        step_ok && cf_ok && partition_ok,
        format!(
            "x(1) = {}, conjunctive x3 on 1000 states: {}, edge partition: {}",
            fmt_vec(&rec.x),
            if cf_ok { "equal" } else { "differs" },
            if partition_ok { "as expected" } else { "differs" }
        ),
    ))
}

fn strip(state: &str) -> String {
    state
        .trim_matches(|c| c == '(' || c == ')')
        .rsplit(',')
        .next()
        .unwrap_or_default()
        .to_string()
}

fn abstraction_shape(_: u64) -> Result<(bool, String), String> {
    let h = HybridAutomaton::from_smpl_open(&gaubert_smpl()).map_err(err)?;
    let fa = h.finite_abstraction().map_err(err)?;
    let names = |set: &BTreeSet<usize>| set.iter().map(|&s| fa.state_names()[s].clone()).collect::<Vec<_>>();
    let expected = vec!["(a,x1)".to_string(), "(b,x1)".to_string()];
    let holds = fa.state_count() == 6 && names(fa.initial()) == expected && names(fa.final_states()) == expected;
    Ok((
        holds,
        format!(
            "{} states, initial {:?}, final {:?}",
            fa.state_count(),
            names(fa.initial()),
            names(fa.final_states())
        ),
    ))
}

pub fn fmt_vec(v: &[Weight]) -> String {
    format!("({})", v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "))
}
