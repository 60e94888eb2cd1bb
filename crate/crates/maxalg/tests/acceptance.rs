//! One PASS/FAIL line per acceptance criterion, with the tolerance and time
//! limit of each pinned below.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use maxalg_core::conjunctive::to_conjunctive;
use maxalg_core::equivalence::{bisimilar, language_equal_upto, simulates};
use maxalg_core::expr::{eval_all, MmpsExpression as E};
use maxalg_core::fa::FiniteAutomaton;
use maxalg_core::fixtures::{
    feedback_smpl, gaubert_mpa, gaubert_mu, gaubert_smpl, production_line_mode_l1, production_line_mode_l2,
    production_line_smpl,
};
use maxalg_core::maha::{HybridAutomaton, HybridInput};
use maxalg_core::matrix::{leq, vec_oplus};
use maxalg_core::mpa::MaxPlusAutomaton;
use maxalg_core::smpl::{ExogenousInput, SmplSystem, StepInput};
use maxalg_core::weight::{oplus, oplus_dual, otimes, otimes_dual};
use maxalg_core::word::words_of_length;
use maxalg_core::{TropicalMatrix, Weight, Word};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const EPS: Weight = Weight::EPSILON;
const TOP: Weight = Weight::TOP;

/// Every comparison below is exact: integer weights, no tolerance.
const TOLERANCE: f64 = 0.0;

/// Criteria known to fail as stated; see the README.
const EXPECTED_FAILURES: [usize; 1] = [3];

struct Criterion {
    id: usize,
    name: &'static str,
    limit: Option<Duration>,
    run: fn() -> Result<String, String>,
}

fn w(v: i32) -> Weight {
    Weight::from(v)
}

fn same(a: Weight, b: Weight) -> bool {
    a == b || (a.is_finite() && b.is_finite() && (a.value() - b.value()).abs() <= TOLERANCE)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// Maximum over all state sequences of `α(s₀) + Σ μ(σ_t)(s_{t-1}, s_t) + β(s_k)`.
fn all_paths_output(a: &MaxPlusAutomaton, word: &Word) -> Weight {
    let n = a.state_count();
    let k = word.len();
    let mut best = f64::NEG_INFINITY;
    for code in 0..n.pow(k as u32 + 1) {
        let path: Vec<usize> = (0..=k).map(|t| code / n.pow(t as u32) % n).collect();
        let mut total = a.alpha()[path[0]].value() + a.beta()[path[k]].value();
        for (t, sym) in word.symbols().iter().enumerate() {
            total += a.mu(sym).unwrap().get(path[t], path[t + 1]).value();
        }
        best = best.max(total);
    }
    Weight::from_f64(best).unwrap()
}

fn criterion_1() -> Result<String, String> {
    let a = gaubert_mpa();
    for (word, expected) in [("ab", w(12)), ("aab", w(14)), ("b", EPS)] {
        let word = Word::parse(word);
        let rec = a.eval_output(&word).map_err(err)?;
        let oracle = all_paths_output(&a, &word);
        ensure(same(rec, expected) && same(oracle, expected), || {
            format!("{word}: recursion {rec}, all paths {oracle}, expected {expected}")
        })?;
    }
    Ok("ab -> 12, aab -> 14, b -> -inf by recursion and by all paths".into())
}

fn criterion_2() -> Result<String, String> {
    let (mu_a, mu_b) = gaubert_mu();
    let alpha = gaubert_mpa().alpha().to_vec();
    let alpha_b = mu_b.apply_left(&alpha).map_err(err)?;
    ensure(alpha_b.iter().all(|x| x.is_epsilon()), || "alpha ⊗ mu(b) has a finite entry".into())?;
    let sq = mu_a.power(2).map_err(err)?;
    let cube = mu_a.power(3).map_err(err)?;
    let zero = TropicalMatrix::epsilon(3, 3);
    ensure(sq != cube, || "mu(a)^2 = mu(a)^3".into())?;
    ensure(cube == zero, || "mu(a)^3 is not the 3x3 zero matrix".into())?;
    Ok("alpha ⊗ mu(b) = ε, mu(a)^2 ≠ mu(a)^3 = ε (3x3)".into())
}

fn criterion_3() -> Result<String, String> {
    let a = gaubert_mpa();
    let s = gaubert_smpl();
    let mut checked = 0;
    let mut mismatches = Vec::new();
    for len in 1..=6 {
        for word in words_of_length(a.alphabet(), len) {
            let inputs: Vec<StepInput> = word.symbols().iter().map(StepInput::symbol).collect();
            let run = s.simulate(&inputs).map_err(err)?;
            let accepted = a.accepts(&word).map_err(err)?;
            let running = run.halted_at.is_none();
            if accepted != running {
                mismatches.push(format!("{word} (accepted {accepted}, runs {running})"));
            } else if accepted {
                let y = run.records.last().map(|r| r.y[0]).unwrap_or(EPS);
                let expected = a.eval_output(&word).map_err(err)?;
                if !same(y, expected) {
                    mismatches.push(format!("{word} (output {y}, expected {expected})"));
                }
            }
            checked += 1;
        }
    }
    ensure(checked == 126, || format!("{checked} words, expected 126"))?;
    ensure(mismatches.is_empty(), || {
        format!(
            "{} of 126 words disagree, first {}",
            mismatches.len(),
            mismatches.iter().take(3).cloned().collect::<Vec<_>>().join(", ")
        )
    })?;
    Ok("126 words: acceptance ⇔ no halt, outputs equal".into())
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
            w: Some(symbols[rng.gen_range(0..symbols.len())].clone()),
        },
    }
}

/// Runs 50 seeded sequences of 20 events through `s` and `h` and compares
/// modes, states, outputs and halt points.
fn traces_agree(s: &SmplSystem, h: &HybridAutomaton, closed: bool, seed: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = s.dims().n;
    let pass = s.controller().is_pass_through();
    for case in 0..50 {
        let steps: Vec<StepInput> = (0..20).map(|_| random_step(&mut rng, s)).collect();
        let inputs: Vec<HybridInput> = steps
            .iter()
            .map(|i| {
                let mut continuous = Vec::new();
                if !closed || pass {
                    continuous.extend(&i.u);
                }
                if closed && pass {
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
        ensure(sr.halted_at == hr.halted_at, || {
            format!("case {case}: halts at {:?} vs {:?}", sr.halted_at, hr.halted_at)
        })?;
        ensure(sr.records.len() == hr.records.len(), || format!("case {case}: lengths differ"))?;
        for (a, b) in sr.records.iter().zip(&hr.records) {
            // the closed-loop state carries the counter first
            let x = if closed { &b.x[1..1 + n] } else { &b.x[..] };
            ensure(a.mode == b.q && a.x == x && a.y == b.y, || {
                format!("case {case}, event {}: traces differ", a.k)
            })?;
        }
    }
    Ok(())
}

fn criterion_4() -> Result<String, String> {
    let open = [gaubert_smpl(), production_line_smpl([1, 2, 3]), feedback_smpl(false)];
    for (i, s) in open.iter().enumerate() {
        let h = HybridAutomaton::from_smpl_open(s).map_err(err)?;
        traces_agree(s, &h, false, 100 + i as u64).map_err(|e| format!("open loop, fixture {i}: {e}"))?;
    }
    let s = feedback_smpl(true);
    let h = HybridAutomaton::from_smpl_closed(&s).map_err(err)?;
    traces_agree(&s, &h, true, 200).map_err(|e| format!("closed loop: {e}"))?;
    Ok("3 open-loop fixtures and 1 closed-loop fixture, 50 x 20 events each".into())
}

fn random_automaton(rng: &mut ChaCha8Rng) -> MaxPlusAutomaton {
    let weight = |rng: &mut ChaCha8Rng| if rng.gen_bool(0.5) { EPS } else { w(rng.gen_range(0..=9)) };
    let mut alpha: Vec<Weight> = (0..3).map(|_| weight(rng)).collect();
    if alpha.iter().all(|x| x.is_epsilon()) {
        alpha[0] = w(0);
    }
    let beta = (0..3).map(|_| weight(rng)).collect();
    let mu = (0..2)
        .map(|_| TropicalMatrix::new(3, 3, (0..9).map(|_| weight(rng)).collect()).unwrap())
        .collect();
    MaxPlusAutomaton::new(
        vec!["1".into(), "2".into(), "3".into()],
        vec!["a".into(), "b".into()],
        alpha,
        mu,
        beta,
    )
    .unwrap()
}

fn criterion_5() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut cases = vec![gaubert_mpa()];
    cases.extend((0..20).map(|_| random_automaton(&mut rng)));
    for (i, a) in cases.iter().enumerate() {
        let h = HybridAutomaton::from_smpl_open(&SmplSystem::from_mpa(a)).map_err(err)?;
        let hoat = h.specialized_abstraction_for_mpa_translation().map_err(err)?;
        let at = a.to_finite_abstraction();
        ensure(at.language_upto(6) == hoat.language_upto(6), || format!("automaton {i}: languages differ"))?;
        ensure(language_equal_upto(&at, &hoat, 6).map_err(err)?.is_equal(), || {
            format!("automaton {i}: bounded comparison differs")
        })?;
    }
    let a = gaubert_mpa();
    let h = HybridAutomaton::from_smpl_open(&SmplSystem::from_mpa(&a)).map_err(err)?;
    let hoat = h.specialized_abstraction_for_mpa_translation().map_err(err)?;
    ensure(bisimilar(&a.to_finite_abstraction(), &hoat).map_err(err)?, || {
        "no bisimulation for the fixture".into()
    })?;
    Ok("fixture + 20 random automata equal up to length 6, fixture bisimilar".into())
}

/// Edges of mode `mode` labelled with the step symbol, as variable pairs.
fn step_edges(fa: &FiniteAutomaton, mode: &str) -> Vec<(String, String)> {
    let one = fa.symbol_index("1").unwrap();
    let var = |s: &str| s.trim_end_matches(')').rsplit(',').next().unwrap().to_string();
    let prefix = format!("({mode},");
    let mut edges: Vec<_> = fa
        .transitions()
        .filter(|&(p, a, _)| a == one && fa.state_names()[p].starts_with(&prefix))
        .map(|(p, _, q)| (var(&fa.state_names()[p]), var(&fa.state_names()[q])))
        .collect();
    edges.sort();
    edges
}

fn criterion_6() -> Result<String, String> {
    let tau = [1, 2, 3];
    let s = production_line_smpl(tau);
    ensure(s.x0() == [w(0), w(0), EPS], || "unexpected x0".into())?;
    let rec = s.step(1, &s.initial_state(), &StepInput::symbol("l1")).map_err(err)?;
    let oracle = eval_all(&production_line_mode_l1(tau), s.x0(), &[]).map_err(err)?;
    ensure(rec.x == oracle && rec.x == [w(1), w(2), w(4)], || format!("x(1) = {:?}", rec.x))?;
    ensure(rec.y == [w(4)], || format!("y(1) = {:?}", rec.y))?;

    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for mode in [production_line_mode_l1(tau), production_line_mode_l2(tau)] {
        let x3 = &mode[2];
        let cf = to_conjunctive(x3, 3, 0).map_err(err)?;
        for _ in 0..1000 {
            let x: Vec<Weight> = (0..3).map(|_| w(rng.gen_range(-50..=50))).collect();
            let (a, b) = (cf.eval(&x, &[]).map_err(err)?, x3.eval(&x, &[]).map_err(err)?);
            ensure(same(a, b), || format!("x3 at {x:?}: {a} vs {b}"))?;
        }
    }

    let fa = HybridAutomaton::from_smpl_open(&s)
        .and_then(|h| h.finite_abstraction())
        .map_err(err)?;
    let (e1, e2) = (step_edges(&fa, "l1"), step_edges(&fa, "l2"));
    let only = |a: &[(String, String)], b: &[(String, String)]| -> Vec<(String, String)> {
        a.iter().filter(|e| !b.contains(e)).cloned().collect()
    };
    let pair = |p: &str, q: &str| vec![(p.to_string(), q.to_string())];
    ensure(only(&e1, &e2) == pair("x3", "x1"), || format!("l1-only edges {:?}", only(&e1, &e2)))?;
    ensure(only(&e2, &e1) == pair("x3", "x2"), || format!("l2-only edges {:?}", only(&e2, &e1)))?;
    ensure(e1.len() == 8 && e2.len() == 8, || "shared edge count".into())?;
    Ok("x(1) = (1, 2, 4), y(1) = 4; x3 rewrite exact on 1000 states; edge partition".into())
}

fn weight(rng: &mut ChaCha8Rng) -> Weight {
    match rng.gen_range(0..8) {
        0 => EPS,
        1 => TOP,
        _ => w(rng.gen_range(-20..=20)),
    }
}

fn random_expression(rng: &mut ChaCha8Rng, depth: usize) -> E {
    if depth == 0 || rng.gen_bool(0.3) {
        return match rng.gen_range(0..3) {
            0 => E::var_plus(rng.gen_range(0..3), rng.gen_range(-5..=5)),
            1 => E::plus(E::input(0), E::constant(rng.gen_range(-5..=5))),
            _ => E::constant(rng.gen_range(-5..=5)),
        };
    }
    let a = random_expression(rng, depth - 1);
    match rng.gen_range(0..3) {
        0 => E::max(a, random_expression(rng, depth - 1)),
        1 => E::min(a, random_expression(rng, depth - 1)),
        _ => E::plus(a, E::constant(rng.gen_range(-5..=5))),
    }
}

fn random_nfa(rng: &mut ChaCha8Rng, density: f64) -> FiniteAutomaton {
    let mut fa = FiniteAutomaton::new(
        (0..3).map(|i| i.to_string()).collect(),
        vec!["a".into(), "b".into()],
    );
    for s in 0..3 {
        for a in 0..2 {
            for t in 0..3 {
                if rng.gen_bool(density) {
                    fa.add_transition_idx(s, a, t).unwrap();
                }
            }
        }
        if rng.gen_bool(0.4) {
            fa.set_final(s).unwrap();
        }
    }
    fa.set_initial(0).unwrap();
    fa
}

fn criterion_7() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);

    for _ in 0..1000 {
        let (a, b, c) = (weight(&mut rng), weight(&mut rng), weight(&mut rng));
        let laws = [
            oplus(a, b) == oplus(b, a),
            oplus(oplus(a, b), c) == oplus(a, oplus(b, c)),
            oplus(a, EPS) == a && oplus(a, a) == a,
            otimes(a, b) == otimes(b, a),
            otimes(otimes(a, b), c) == otimes(a, otimes(b, c)),
            otimes(a, Weight::ONE) == a && otimes(a, EPS) == EPS,
            otimes(a, oplus(b, c)) == oplus(otimes(a, b), otimes(a, c)),
            oplus_dual(a, TOP) == a && otimes_dual(a, TOP) == TOP,
            otimes_dual(a, oplus_dual(b, c)) == oplus_dual(otimes_dual(a, b), otimes_dual(a, c)),
        ];
        ensure(laws.iter().all(|&l| l), || format!("semiring law fails at ({a}, {b}, {c})"))?;
    }

    for _ in 0..1000 {
        let x: Vec<Weight> = (0..3).map(|_| weight(&mut rng)).collect();
        let y: Vec<Weight> = (0..3).map(|_| weight(&mut rng)).collect();
        let by_order = leq(&x, &y).map_err(err)?;
        let by_sum = vec_oplus(&x, &y).map_err(err)? == y;
        let by_entries = x.iter().zip(&y).all(|(a, b)| a.value() <= b.value());
        ensure(by_order == by_sum && by_sum == by_entries, || format!("order at {x:?}, {y:?}"))?;
    }

    let mut points = 0;
    for _ in 0..50 {
        let e = random_expression(&mut rng, 4);
        let cf = to_conjunctive(&e, 3, 1).map_err(err)?;
        ensure(cf.is_antichain(), || format!("{e}: not an antichain"))?;
        for _ in 0..20 {
            let x: Vec<Weight> = (0..3).map(|_| w(rng.gen_range(-20..=20))).collect();
            let u = [w(rng.gen_range(-20..=20))];
            let (a, b) = (cf.eval(&x, &u).map_err(err)?, e.eval(&x, &u).map_err(err)?);
            ensure(same(a, b), || format!("{e} at {x:?}, {u:?}: {a} vs {b}"))?;
            points += 1;
        }
    }

    let mut matrices = 0;
    for n in 1..=4usize {
        for bits in 0u32..(1 << (n * n)) {
            let entries = (0..n * n)
                .map(|b| if bits >> b & 1 == 1 { Weight::ONE } else { EPS })
                .collect();
            let a = TropicalMatrix::new(n, n, entries).unwrap();
            let step: Vec<u32> = (0..n)
                .map(|m| (0..n).filter(|&t| !a.get(m, t).is_epsilon()).fold(0, |acc, t| acc | 1 << t))
                .collect();
            let mut reach: Vec<u32> = (0..n).map(|i| 1 << i).collect();
            let mut p = TropicalMatrix::identity(n);
            for k in 1..=n {
                reach = reach
                    .iter()
                    .map(|&row| (0..n).filter(|&m| row >> m & 1 == 1).fold(0, |acc, m| acc | step[m]))
                    .collect();
                p = p.otimes(&a).map_err(err)?;
                let support = p.boolean_support();
                for (i, row) in reach.iter().enumerate() {
                    for j in 0..n {
                        ensure((support.get(i, j) == Weight::ONE) == (row >> j & 1 == 1), || {
                            format!("{n}x{n} matrix {bits:#b}, power {k}, entry ({i}, {j})")
                        })?;
                    }
                }
            }
            matrices += 1;
        }
    }

    let mut witnessed = 0;
    for _ in 0..20 {
        let a = random_nfa(&mut rng, 0.3);
        let b = random_nfa(&mut rng, 0.5);
        for (x, y) in [(&a, &b), (&b, &a), (&a, &a)] {
            if simulates(y, x).map_err(err)? {
                witnessed += 1;
                ensure(x.language_upto(6).is_subset(&y.language_upto(6)), || {
                    "simulation without language inclusion".into()
                })?;
            }
        }
    }

    Ok(format!(
        "1000 triples, 1000 order pairs, {points} conjunctive points, {matrices} support matrices, {witnessed} simulation witnesses"
    ))
}

fn criterion_8() -> Result<String, String> {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_maxalg"))
            .args(["reproduce", "--seed", "42"])
            .output()
            .map_err(err)
    };
    let (first, second) = (run()?, run()?);
    ensure(first.status.success(), || format!("reproduce exited with {}", first.status))?;
    ensure(first.stdout == second.stdout, || "reports differ between runs".into())?;
    Ok(format!("{} identical bytes", first.stdout.len()))
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { id: 1, name: "automaton outputs", limit: Some(Duration::from_secs(1)), run: criterion_1 },
        Criterion { id: 2, name: "matrix claims", limit: None, run: criterion_2 },
        Criterion { id: 3, name: "acceptance vs halting", limit: Some(Duration::from_secs(5)), run: criterion_3 },
        Criterion { id: 4, name: "hybrid traces", limit: Some(Duration::from_secs(5)), run: criterion_4 },
        Criterion { id: 5, name: "abstraction languages", limit: Some(Duration::from_secs(10)), run: criterion_5 },
        Criterion { id: 6, name: "production line", limit: Some(Duration::from_secs(2)), run: criterion_6 },
        Criterion { id: 7, name: "property suites", limit: Some(Duration::from_secs(30)), run: criterion_7 },
        Criterion { id: 8, name: "determinism", limit: None, run: criterion_8 },
    ];
    let mut unexpected = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let outcome = match (outcome, c.limit) {
            (Ok(_), Some(limit)) if elapsed > limit => Err(format!("took {elapsed:.2?}, limit {limit:?}")),
            (o, _) => o,
        };
        let expected_fail = EXPECTED_FAILURES.contains(&c.id);
        let (status, detail) = match &outcome {
            Ok(d) => ("PASS", d.clone()),
            Err(e) => ("FAIL", e.clone()),
        };
        let note = if expected_fail { " [expected failure]" } else { "" };
        println!("{status}  {}. {:<22} {elapsed:>9.2?}  {detail}{note}", c.id, c.name);
        if outcome.is_ok() == expected_fail {
            unexpected += 1;
        }
    }
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{unexpected} criteria did not match their expected outcome");
        ExitCode::FAILURE
    }
}
