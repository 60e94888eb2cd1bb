//! The command implementations behind the binary.

use anyhow::{anyhow, bail, Context, Result};
use maxalg_core::equivalence::{
    behavioural_inclusion_upto, bisimilar, greatest_simulation, language_equal_upto, simulates, InclusionRegime,
    IoBehaviour, LanguageComparison,
};
use maxalg_core::fa::FiniteAutomaton;
use maxalg_core::maha::{HybridAutomaton, HybridInput};
use maxalg_core::smpl::{ExogenousInput, SmplSystem, StepInput};
use maxalg_core::{Weight, Word};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::bundled;
use crate::model::{parse_model, serialise_model, Construction, JsonWeight, Model, ModelDocument};
use crate::report::{weight_json, weights_json, RunReport, Verdict};

/// Reads a model from `spec`, which is a file path or the name of a
/// bundled model.
pub fn load_model(spec: &str) -> Result<ModelDocument> {
    let path = std::path::Path::new(spec);
    let text = if path.exists() {
        std::fs::read_to_string(path).with_context(|| format!("reading {spec}"))?
    } else if let Some(text) = bundled::lookup(spec) {
        text.to_string()
    } else {
        bail!("no such file or bundled model: {spec}");
    };
    parse_model(&text).with_context(|| format!("loading {spec}"))
}

fn word_json(w: &Word) -> Value {
    json!(w.to_string())
}

pub fn eval(doc: &ModelDocument, word: &Word) -> Result<RunReport> {
    let mut report = RunReport::new(format!("eval --word {word}"));
    match &doc.model {
        Model::Mpa(a) => {
            for k in 1..=word.len() {
                let p = word.prefix(k);
                report.records.push(json!({
                    "k": k,
                    "x": weights_json(&a.eval_state(&p)?),
                    "y": weight_json(a.eval_output(&p)?),
                }));
            }
            let path = a.witness_path(word)?;
            report.result = Some(json!({
                "word": word_json(word),
                "state": weights_json(&a.eval_state(word)?),
                "output": weight_json(a.eval_output(word)?),
                "accepted": a.accepts(word)?,
                "witness_path": path.map(|p| json!({
                    "states": p.states.iter().map(|&s| a.state_names()[s].clone()).collect::<Vec<_>>(),
                    "weight": weight_json(p.weight),
                })),
            }));
        }
        Model::Fa(fa) => {
            report.result = Some(json!({ "word": word_json(word), "accepted": fa.accepts(word)? }));
        }
        Model::Smpl(_) | Model::Maha { .. } => {
            let inputs: Vec<StepJson> = word
                .symbols()
                .iter()
                .map(|s| StepJson {
                    w: Some(s.clone()),
                    ..Default::default()
                })
                .collect();
            return simulate_inputs(doc, &inputs, format!("eval --word {word}"));
        }
    }
    Ok(report)
}

/// One event of an input file: `{"w": "a", "u": [..], "v": [..], "r": [..]}`.
#[derive(Clone, Default, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepJson {
    #[serde(default)]
    pub w: Option<String>,
    #[serde(default)]
    pub u: Vec<JsonWeight>,
    #[serde(default)]
    pub v: Vec<JsonWeight>,
    #[serde(default)]
    pub r: Vec<JsonWeight>,
}

pub fn parse_inputs(text: &str) -> Result<Vec<StepJson>> {
    serde_json::from_str(text).map_err(|e| anyhow!("input file, line {}, column {}: {e}", e.line(), e.column()))
}

fn plain(v: &[JsonWeight]) -> Vec<Weight> {
    v.iter().map(|w| w.0).collect()
}

fn step_input(s: &StepJson) -> StepInput {
    StepInput {
        u: plain(&s.u),
        v: plain(&s.v),
        exogenous: ExogenousInput {
            theta_x: plain(&s.r),
            w: s.w.clone(),
        },
    }
}

fn hybrid_input(sys: &SmplSystem, construction: Construction, s: &StepJson) -> HybridInput {
    let mut continuous = Vec::new();
    let pass = sys.controller().is_pass_through();
    match construction {
        Construction::Open => {
            continuous.extend(plain(&s.u));
            continuous.extend(plain(&s.r));
            HybridInput {
                continuous,
                control: plain(&s.v),
                discrete: s.w.clone(),
            }
        }
        Construction::Closed => {
            if pass {
                continuous.extend(plain(&s.u));
                continuous.extend(plain(&s.v));
            }
            continuous.extend(plain(&s.r));
            HybridInput {
                continuous,
                control: Vec::new(),
                discrete: s.w.clone(),
            }
        }
    }
}

/// Fills omitted `u`, `v` and `r` vectors with ε.
fn pad_events(sys: &SmplSystem, inputs: &[StepJson]) -> Vec<StepJson> {
    let d = sys.dims();
    let pad = |v: &[JsonWeight], n: usize| {
        if v.is_empty() {
            vec![JsonWeight(Weight::EPSILON); n]
        } else {
            v.to_vec()
        }
    };
    inputs
        .iter()
        .map(|s| StepJson {
            w: s.w.clone(),
            u: pad(&s.u, d.n_u),
            v: pad(&s.v, d.n_v),
            r: pad(&s.r, d.n_r),
        })
        .collect()
}

/// Runs a model on `inputs`; omitted continuous inputs are ε.
pub fn simulate_inputs(doc: &ModelDocument, inputs: &[StepJson], command: String) -> Result<RunReport> {
    let mut report = RunReport::new(command);
    let (halted_at, last_y) = match &doc.model {
        Model::Mpa(a) => {
            let s = SmplSystem::from_mpa(a);
            return simulate_smpl(&s, &pad_events(&s, inputs), report);
        }
        Model::Smpl(s) => return simulate_smpl(s, &pad_events(s, inputs), report),
        Model::Maha {
            construction,
            system,
            automaton,
        } => {
            let hin: Vec<HybridInput> = pad_events(system, inputs)
                .iter()
                .map(|s| hybrid_input(system, *construction, s))
                .collect();
            let run = automaton.run(&hin)?;
            for r in &run.records {
                report.records.push(json!({
                    "k": r.k,
                    "mode": automaton.mode_names()[r.q],
                    "x": weights_json(&r.x),
                    "y": weights_json(&r.y),
                    "successors": r.successors.iter().map(|&m| automaton.mode_names()[m].clone()).collect::<Vec<_>>(),
                }));
            }
            (run.halted_at, run.records.last().map(|r| r.y.clone()))
        }
        Model::Fa(_) => bail!("simulate needs an mpa, smpl or maha model"),
    };
    report.result = Some(json!({
        "halted_at": halted_at,
        "final_y": last_y.map(|y| weights_json(&y)),
    }));
    Ok(report)
}

fn simulate_smpl(s: &SmplSystem, inputs: &[StepJson], mut report: RunReport) -> Result<RunReport> {
    let steps: Vec<StepInput> = inputs.iter().map(step_input).collect();
    let run = s.simulate(&steps)?;
    for r in &run.records {
        report.records.push(json!({
            "k": r.k,
            "mode": s.mode_names()[r.mode],
            "x": weights_json(&r.x),
            "y": weights_json(&r.y),
            "u": weights_json(&r.u),
            "v": weights_json(&r.v),
            "successors": r.successors.iter().map(|&m| s.mode_names()[m].clone()).collect::<Vec<_>>(),
        }));
    }
    report.result = Some(json!({
        "halted_at": run.halted_at,
        "final_y": run.records.last().map(|r| weights_json(&r.y)),
    }));
    Ok(report)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, clap::ValueEnum)]
pub enum Target {
    /// Switching max-plus linear system (from a max-plus automaton).
    Smpl,
    /// Max-algebraic hybrid automaton.
    Maha,
    /// Fused abstraction of the hybrid automaton of a max-plus automaton.
    Hoat,
    /// Finite-state abstraction.
    Fa,
}

fn smpl_of(doc: &ModelDocument) -> Result<SmplSystem> {
    match &doc.model {
        Model::Mpa(a) => Ok(SmplSystem::from_mpa(a)),
        Model::Smpl(s) => Ok(s.clone()),
        Model::Maha { system, .. } => Ok(system.clone()),
        Model::Fa(_) => bail!("a finite automaton has no switching-system form"),
    }
}

fn maha_of(doc: &ModelDocument) -> Result<HybridAutomaton> {
    match &doc.model {
        Model::Maha { automaton, .. } => Ok(automaton.clone()),
        _ => match Model::maha_from(smpl_of(doc)?)? {
            Model::Maha { automaton, .. } => Ok(automaton),
            _ => unreachable!(),
        },
    }
}

/// The finite automaton a model is compared through.
pub fn finite_automaton_of(doc: &ModelDocument) -> Result<FiniteAutomaton> {
    Ok(match &doc.model {
        Model::Fa(f) => f.clone(),
        Model::Mpa(a) => a.to_finite_abstraction(),
        _ => maha_of(doc)?.finite_abstraction()?,
    })
}

pub fn translate(doc: &ModelDocument, to: Target) -> Result<ModelDocument> {
    let model = match to {
        Target::Smpl => Model::Smpl(smpl_of(doc)?),
        Target::Maha => Model::maha_from(smpl_of(doc)?)?,
        Target::Hoat => Model::Fa(maha_of(doc)?.specialized_abstraction_for_mpa_translation()?),
        Target::Fa => Model::Fa(finite_automaton_of(doc)?),
    };
    let name = if doc.meta.name.is_empty() {
        String::new()
    } else {
        format!("{} ({})", doc.meta.name, format!("{to:?}").to_lowercase())
    };
    Ok(ModelDocument::new(model).with_name(name))
}

/// `translate` output: the new model document itself.
pub fn translate_text(doc: &ModelDocument, to: Target) -> Result<String> {
    Ok(serialise_model(&translate(doc, to)?)?)
}

pub fn abstract_text(doc: &ModelDocument, json_format: bool) -> Result<String> {
    let out = translate(doc, Target::Fa)?;
    if json_format {
        return Ok(serialise_model(&out)?);
    }
    let Model::Fa(fa) = &out.model else { unreachable!() };
    let names = |set: &std::collections::BTreeSet<usize>| {
        set.iter().map(|&s| fa.state_names()[s].as_str()).collect::<Vec<_>>().join(" ")
    };
    let mut s = format!(
        "states: {}\nalphabet: {}\ninitial: {}\nfinal: {}\ntransitions:\n",
        fa.state_names().join(" "),
        fa.alphabet().join(" "),
        names(fa.initial()),
        names(fa.final_states()),
    );
    for (p, a, q) in fa.transitions() {
        s.push_str(&format!("  {} --{}--> {}\n", fa.state_names()[p], fa.alphabet()[a], fa.state_names()[q]));
    }
    Ok(s)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, clap::ValueEnum)]
pub enum Relation {
    /// Equal languages up to the bound.
    Language,
    /// The second model simulates the first.
    Simulation,
    Bisimulation,
    /// Every input/output behaviour of the first is one of the second.
    Inclusion,
}

fn behaviour(doc: &ModelDocument) -> Result<&dyn IoBehaviour> {
    Ok(match &doc.model {
        Model::Mpa(a) => a,
        Model::Smpl(s) => s,
        Model::Maha { automaton, .. } => automaton,
        Model::Fa(_) => bail!("inclusion needs mpa, smpl or maha models"),
    })
}

pub fn check(left: &ModelDocument, right: &ModelDocument, relation: Relation, bound: usize, seed: u64) -> Result<RunReport> {
    let mut report = RunReport::new(format!("check --relation {relation:?} --bound {bound}").to_lowercase());
    let verdict = match relation {
        Relation::Language => {
            let (a, b) = (finite_automaton_of(left)?, finite_automaton_of(right)?);
            match language_equal_upto(&a, &b, bound)? {
                LanguageComparison::Equal => Verdict::new("language", true, format!("languages agree up to length {bound}")),
                LanguageComparison::Differ {
                    witness,
                    accepted_by_first,
                } => Verdict::new(
                    "language",
                    false,
                    format!("accepted only by the {} model", if accepted_by_first { "first" } else { "second" }),
                )
                .with_witness(witness.to_string()),
            }
        }
        Relation::Simulation => {
            let (a, b) = (finite_automaton_of(left)?, finite_automaton_of(right)?);
            let holds = simulates(&b, &a)?;
            let rel = greatest_simulation(&a, &b)?;
            let v = Verdict::new(
                "simulation",
                holds,
                format!("greatest simulation has {} pairs", rel.len()),
            );
            if holds {
                v
            } else {
                let p = a
                    .initial()
                    .iter()
                    .find(|&&p| !b.initial().iter().any(|&q| rel.contains(&(p, q))))
                    .copied()
                    .unwrap_or_default();
                v.with_witness(format!("initial state {} is not simulated", a.state_names()[p]))
            }
        }
        Relation::Bisimulation => {
            let (a, b) = (finite_automaton_of(left)?, finite_automaton_of(right)?);
            let holds = bisimilar(&a, &b)?;
            Verdict::new(
                "bisimulation",
                holds,
                if holds { "initial states are bisimilar" } else { "no bisimulation relates the initial states" },
            )
        }
        Relation::Inclusion => {
            report.seed = Some(seed);
            let r = behavioural_inclusion_upto(behaviour(left)?, behaviour(right)?, bound, seed)?;
            let regime = match r.regime {
                InclusionRegime::Exhaustive => "exhaustive".to_string(),
                InclusionRegime::Sampled { samples, seed } => format!("sampled ({samples} sequences, seed {seed})"),
            };
            let v = Verdict::new("inclusion", r.holds(), format!("{regime}, {} sequences checked", r.checked));
            match &r.counterexample {
                None => v,
                Some(c) => v.with_witness(format!(
                    "inputs {} give {} on the first model and {} on the second",
                    c.inputs
                        .iter()
                        .map(|i| i.discrete.clone().unwrap_or_else(|| "-".into()))
                        .collect::<Vec<_>>()
                        .join(","),
                    outputs_text(&c.left.outputs),
                    c.right.as_ref().map_or("no run".into(), |t| outputs_text(&t.outputs))
                )),
            }
        }
    };
    report.verdicts.push(verdict);
    Ok(report)
}

fn outputs_text(outputs: &[Vec<Weight>]) -> String {
    let steps: Vec<String> = outputs
        .iter()
        .map(|y| format!("({})", y.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(", ")))
        .collect();
    format!("[{}]", steps.join(" "))
}
