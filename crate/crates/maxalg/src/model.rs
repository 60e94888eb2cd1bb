//! JSON model documents.
//!
//! Every document carries a `"kind"` discriminator (`mpa`, `smpl`, `maha`,
//! `fa`) and a `"meta"` block. Weights are JSON numbers, with the strings
//! `"-inf"` for `ε` and `"+inf"` for `⊤`. Matrices are lists of rows and
//! modes, states and symbols are referenced by name.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use maxalg_core::expr::MmpsExpression;
use maxalg_core::fa::FiniteAutomaton;
use maxalg_core::maha::HybridAutomaton;
use maxalg_core::matrix_form::{MatrixForm, ModeDynamics};
use maxalg_core::mpa::MaxPlusAutomaton;
use maxalg_core::smpl::{
    ControllerHook, Dims, ModeGuard, SmplOrigin, SmplSystem, SwitchingKind, SwitchingLogic, SwitchingRule,
};
use maxalg_core::{TropicalMatrix, Weight};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("schema error at line {line}, column {column}: {message}")]
    Schema { line: usize, column: usize, message: String },
    #[error("invalid model: {0}")]
    Semantic(String),
    #[error("cannot serialise model: {0}")]
    NotSerialisable(&'static str),
}

type Result<T, E = ModelError> = std::result::Result<T, E>;

fn semantic(msg: impl Into<String>) -> ModelError {
    ModelError::Semantic(msg.into())
}

/// A weight as it appears in model files.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct JsonWeight(pub Weight);

impl Serialize for JsonWeight {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v = self.0.value();
        if self.0.is_epsilon() {
            s.serialize_str("-inf")
        } else if self.0.is_top() {
            s.serialize_str("+inf")
        } else if v.fract() == 0.0 && v.abs() < 9.0e15 {
            s.serialize_i64(v as i64)
        } else {
            s.serialize_f64(v)
        }
    }
}

impl<'de> Deserialize<'de> for JsonWeight {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = JsonWeight;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number, \"-inf\" or \"+inf\"")
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<JsonWeight, E> {
                Ok(JsonWeight(Weight::from(v)))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<JsonWeight, E> {
                i64::try_from(v)
                    .map(|v| JsonWeight(Weight::from(v)))
                    .map_err(|_| E::custom("weight out of range"))
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<JsonWeight, E> {
                Weight::from_f64(v)
                    .map(JsonWeight)
                    .ok_or_else(|| E::custom("weight is NaN"))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<JsonWeight, E> {
                match v {
                    "-inf" => Ok(JsonWeight(Weight::EPSILON)),
                    "+inf" => Ok(JsonWeight(Weight::TOP)),
                    _ => Err(E::invalid_value(de::Unexpected::Str(v), &self)),
                }
            }
        }
        d.deserialize_any(V)
    }
}

type Rows = Vec<Vec<JsonWeight>>;

fn weights(v: &[JsonWeight]) -> Vec<Weight> {
    v.iter().map(|w| w.0).collect()
}

fn json_weights(v: &[Weight]) -> Vec<JsonWeight> {
    v.iter().copied().map(JsonWeight).collect()
}

fn rows_of(m: &TropicalMatrix) -> Rows {
    m.iter_rows().map(json_weights).collect()
}

/// A `rows × cols` matrix; `cols` is needed when there are no rows.
fn matrix(what: &str, rows: &Rows, shape: (usize, usize)) -> Result<TropicalMatrix> {
    if rows.len() != shape.0 {
        return Err(semantic(format!(
            "{what}: expected {} rows, found {}",
            shape.0,
            rows.len()
        )));
    }
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != shape.1) {
        return Err(semantic(format!(
            "{what}: row {} has {} entries, expected {}",
            i + 1,
            r.len(),
            shape.1
        )));
    }
    let entries = rows.iter().flat_map(|r| weights(r)).collect();
    TropicalMatrix::new(shape.0, shape.1, entries).map_err(|e| semantic(format!("{what}: {e}")))
}

#[derive(Clone, Default, PartialEq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Meta {
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub description: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MpaBody {
    #[serde(default)]
    meta: Meta,
    states: Vec<String>,
    alphabet: Vec<String>,
    alpha: Vec<JsonWeight>,
    mu: BTreeMap<String, Rows>,
    beta: Vec<JsonWeight>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DimsBody {
    n: usize,
    #[serde(default)]
    n_u: usize,
    #[serde(default)]
    n_v: usize,
    n_y: usize,
    #[serde(default)]
    n_r: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "lowercase", deny_unknown_fields)]
enum DynamicsBody {
    Matrix {
        #[serde(rename = "A")]
        a: Vec<Rows>,
        #[serde(rename = "B")]
        b: Vec<Rows>,
        #[serde(rename = "C")]
        c: Vec<Rows>,
        #[serde(rename = "D")]
        d: Vec<Rows>,
        #[serde(default)]
        constant_input: bool,
    },
    Expressions {
        state: Vec<String>,
        output: Vec<String>,
    },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModeBody {
    name: String,
    dynamics: DynamicsBody,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableEntry {
    prev: String,
    w: String,
    next: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "logic", rename_all = "kebab-case", deny_unknown_fields)]
enum SwitchingBody {
    Fixed {
        kind: String,
        mode: String,
    },
    SymbolSelect {
        kind: String,
        symbols: Vec<String>,
        guard: String,
    },
    Table {
        kind: String,
        entries: Vec<TableEntry>,
    },
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
enum ControllerBody {
    PassThrough,
    StaticFeedback { k_u: Rows, k_v: Rows },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SmplBody {
    #[serde(default)]
    meta: Meta,
    dims: DimsBody,
    modes: Vec<ModeBody>,
    switching: SwitchingBody,
    x0: Vec<JsonWeight>,
    #[serde(default)]
    initial_mode: Option<String>,
    #[serde(default)]
    discrete_inputs: Option<Vec<String>>,
    #[serde(default = "pass_through")]
    controller: ControllerBody,
    #[serde(default = "direct")]
    origin: String,
}

fn pass_through() -> ControllerBody {
    ControllerBody::PassThrough
}

fn direct() -> String {
    "direct".into()
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MahaBody {
    #[serde(default)]
    meta: Meta,
    construction: String,
    system: SmplBody,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FaBody {
    #[serde(default)]
    meta: Meta,
    states: Vec<String>,
    alphabet: Vec<String>,
    initial: Vec<String>,
    #[serde(rename = "final")]
    final_states: Vec<String>,
    transitions: Vec<(String, String, String)>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum RawDocument {
    Mpa(MpaBody),
    Smpl(SmplBody),
    Maha(MahaBody),
    Fa(FaBody),
}

/// How a hybrid automaton document was built from its switching system.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Construction {
    Open,
    Closed,
}

impl Construction {
    pub fn name(self) -> &'static str {
        match self {
            Construction::Open => "open",
            Construction::Closed => "closed",
        }
    }
}

#[derive(Clone, Debug)]
#[allow(clippy::large_enum_variant)]
pub enum Model {
    Mpa(MaxPlusAutomaton),
    Smpl(SmplSystem),
    /// Hybrid automata are stored as the switching system they are built
    /// from, since their guards are not data.
    Maha {
        construction: Construction,
        system: SmplSystem,
        automaton: HybridAutomaton,
    },
    Fa(FiniteAutomaton),
}

impl Model {
    pub fn kind(&self) -> &'static str {
        match self {
            Model::Mpa(_) => "mpa",
            Model::Smpl(_) => "smpl",
            Model::Maha { .. } => "maha",
            Model::Fa(_) => "fa",
        }
    }

    /// The hybrid automaton for `system`: open-loop when its controller is a
    /// pass-through, closed-loop otherwise.
    pub fn maha_from(system: SmplSystem) -> Result<Model> {
        let construction = if system.is_open_loop() {
            Construction::Open
        } else {
            Construction::Closed
        };
        Self::maha_with(system, construction)
    }

    pub fn maha_with(system: SmplSystem, construction: Construction) -> Result<Model> {
        let automaton = match construction {
            Construction::Open => HybridAutomaton::from_smpl_open(&system),
            Construction::Closed => HybridAutomaton::from_smpl_closed(&system),
        }
        .map_err(|e| semantic(e.to_string()))?;
        Ok(Model::Maha {
            construction,
            system,
            automaton,
        })
    }
}

#[derive(Clone, Debug)]
pub struct ModelDocument {
    pub meta: Meta,
    pub model: Model,
}

impl ModelDocument {
    pub fn new(model: Model) -> Self {
        ModelDocument {
            meta: Meta::default(),
            model,
        }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.meta.name = name.into();
        self
    }
}

/// Parses and validates a model document.
pub fn parse_model(text: &str) -> Result<ModelDocument> {
    let raw: RawDocument = serde_json::from_str(text).map_err(|e| {
        let (line, column, message) = (e.line(), e.column(), e.to_string());
        match e.classify() {
            serde_json::error::Category::Data => ModelError::Schema { line, column, message },
            _ => ModelError::Syntax { line, column, message },
        }
    })?;
    match raw {
        RawDocument::Mpa(b) => Ok(ModelDocument {
            meta: b.meta.clone(),
            model: Model::Mpa(mpa_from_body(b)?),
        }),
        RawDocument::Smpl(b) => Ok(ModelDocument {
            meta: b.meta.clone(),
            model: Model::Smpl(smpl_from_body(b)?),
        }),
        RawDocument::Maha(b) => {
            let construction = match b.construction.as_str() {
                "open" => Construction::Open,
                "closed" => Construction::Closed,
                other => {
                    return Err(semantic(format!(
                        "construction must be \"open\" or \"closed\", found {other:?}"
                    )))
                }
            };
            let system = smpl_from_body(b.system)?;
            Ok(ModelDocument {
                meta: b.meta,
                model: Model::maha_with(system, construction)?,
            })
        }
        RawDocument::Fa(b) => Ok(ModelDocument {
            meta: b.meta.clone(),
            model: Model::Fa(fa_from_body(b)?),
        }),
    }
}

/// Canonical pretty-printed JSON, newline-terminated. Serialising a parsed
/// canonical document reproduces it byte for byte.
pub fn serialise_model(doc: &ModelDocument) -> Result<String> {
    let raw = match &doc.model {
        Model::Mpa(a) => RawDocument::Mpa(mpa_to_body(a, doc.meta.clone())),
        Model::Smpl(s) => RawDocument::Smpl(smpl_to_body(s, doc.meta.clone())?),
        Model::Maha {
            construction, system, ..
        } => RawDocument::Maha(MahaBody {
            meta: doc.meta.clone(),
            construction: construction.name().into(),
            system: smpl_to_body(system, Meta::default())?,
        }),
        Model::Fa(f) => RawDocument::Fa(fa_to_body(f, doc.meta.clone())),
    };
    let mut s = serde_json::to_string_pretty(&raw).expect("documents serialise");
    s.push('\n');
    Ok(s)
}

fn mpa_from_body(b: MpaBody) -> Result<MaxPlusAutomaton> {
    let n = b.states.len();
    let mut mu = Vec::with_capacity(b.alphabet.len());
    for sym in &b.alphabet {
        let rows = b
            .mu
            .get(sym)
            .ok_or_else(|| semantic(format!("mu has no matrix for symbol {sym:?}")))?;
        mu.push(matrix(&format!("mu({sym})"), rows, (n, n))?);
    }
    if let Some(extra) = b.mu.keys().find(|k| !b.alphabet.contains(k)) {
        return Err(semantic(format!("mu lists symbol {extra:?} outside the alphabet")));
    }
    MaxPlusAutomaton::new(b.states, b.alphabet, weights(&b.alpha), mu, weights(&b.beta))
        .map_err(|e| semantic(e.to_string()))
}

fn mpa_to_body(a: &MaxPlusAutomaton, meta: Meta) -> MpaBody {
    MpaBody {
        meta,
        states: a.state_names().to_vec(),
        alphabet: a.alphabet().to_vec(),
        alpha: json_weights(a.alpha()),
        mu: a
            .alphabet()
            .iter()
            .zip(a.mu_all())
            .map(|(s, m)| (s.clone(), rows_of(m)))
            .collect(),
        beta: json_weights(a.beta()),
    }
}

fn mode_index(names: &[String], name: &str) -> Result<usize> {
    names
        .iter()
        .position(|n| n == name)
        .ok_or_else(|| semantic(format!("unknown mode {name:?}")))
}

fn kind_from(name: &str) -> Result<SwitchingKind> {
    SwitchingKind::from_name(name).ok_or_else(|| {
        semantic(format!(
            "unknown switching kind {name:?} (expected one of {})",
            SwitchingKind::ALL.iter().map(|k| k.name()).collect::<Vec<_>>().join(", ")
        ))
    })
}

fn dynamics_from(name: &str, body: DynamicsBody, dims: &Dims) -> Result<ModeDynamics> {
    let n_in = dims.n_u + dims.n_r;
    match body {
        DynamicsBody::Matrix {
            a,
            b,
            c,
            d,
            constant_input,
        } => {
            let cols = n_in + usize::from(constant_input);
            let mats = |what: &str, list: &[Rows], shape: (usize, usize)| -> Result<Vec<TropicalMatrix>> {
                list.iter()
                    .enumerate()
                    .map(|(l, r)| matrix(&format!("mode {name}: {what}[{}]", l + 1), r, shape))
                    .collect()
            };
            let mf = MatrixForm::new(
                mats("A", &a, (dims.n, dims.n))?,
                mats("B", &b, (dims.n, cols))?,
                mats("C", &c, (dims.n_y, dims.n))?,
                mats("D", &d, (dims.n_y, cols))?,
                constant_input,
            )
            .map_err(|e| semantic(format!("mode {name}: {e}")))?;
            Ok(ModeDynamics::Matrix(mf))
        }
        DynamicsBody::Expressions { state, output } => {
            let parse = |list: &[String]| -> Result<Vec<MmpsExpression>> {
                list.iter()
                    .map(|s| s.parse().map_err(|e| semantic(format!("mode {name}: {e}"))))
                    .collect()
            };
            ModeDynamics::expressions(parse(&state)?, parse(&output)?, n_in)
                .map_err(|e| semantic(format!("mode {name}: {e}")))
        }
    }
}

fn smpl_from_body(b: SmplBody) -> Result<SmplSystem> {
    let dims = Dims {
        n: b.dims.n,
        n_u: b.dims.n_u,
        n_v: b.dims.n_v,
        n_y: b.dims.n_y,
        n_r: b.dims.n_r,
    };
    if b.modes.is_empty() {
        return Err(semantic("a switching system needs at least one mode"));
    }
    let names: Vec<String> = b.modes.iter().map(|m| m.name.clone()).collect();
    if names.iter().collect::<BTreeSet<_>>().len() != names.len() {
        return Err(semantic("mode names must be distinct"));
    }
    let modes = b
        .modes
        .into_iter()
        .map(|m| dynamics_from(&m.name, m.dynamics, &dims))
        .collect::<Result<Vec<_>>>()?;
    let rule = match b.switching {
        SwitchingBody::Fixed { kind, mode } => SwitchingRule {
            kind: kind_from(&kind)?,
            logic: SwitchingLogic::Fixed(mode_index(&names, &mode)?),
        },
        SwitchingBody::SymbolSelect { kind, symbols, guard } => SwitchingRule::symbol_select(
            kind_from(&kind)?,
            symbols,
            ModeGuard::from_name(&guard).ok_or_else(|| semantic(format!("unknown mode guard {guard:?}")))?,
        ),
        SwitchingBody::Table { kind, entries } => {
            let mut table = BTreeMap::new();
            for e in entries {
                let next = e
                    .next
                    .iter()
                    .map(|m| mode_index(&names, m))
                    .collect::<Result<BTreeSet<_>>>()?;
                table.insert((mode_index(&names, &e.prev)?, e.w), next);
            }
            SwitchingRule::table(kind_from(&kind)?, table)
        }
    };
    let mut sys = SmplSystem::new(dims, names.clone(), modes, rule, weights(&b.x0)).map_err(|e| semantic(e.to_string()))?;
    if let Some(symbols) = b.discrete_inputs {
        sys = sys.with_discrete_inputs(symbols);
    }
    if let Some(m) = b.initial_mode {
        sys = sys
            .with_initial_mode(mode_index(&names, &m)?)
            .map_err(|e| semantic(e.to_string()))?;
    }
    if let ControllerBody::StaticFeedback { k_u, k_v } = &b.controller {
        let k_u = matrix("controller k_u", k_u, (dims.n_u, dims.n))?;
        let k_v = matrix("controller k_v", k_v, (dims.n_v, dims.n))?;
        sys = sys
            .with_controller(ControllerHook::static_feedback(k_u, k_v))
            .map_err(|e| semantic(e.to_string()))?;
    }
    let origin = match b.origin.as_str() {
        "direct" => SmplOrigin::Direct,
        "mpa" => SmplOrigin::MaxPlusAutomaton,
        other => return Err(semantic(format!("origin must be \"direct\" or \"mpa\", found {other:?}"))),
    };
    Ok(sys.with_origin(origin))
}

fn smpl_to_body(s: &SmplSystem, meta: Meta) -> Result<SmplBody> {
    let d = s.dims();
    let names = s.mode_names();
    let modes = names
        .iter()
        .zip(s.modes())
        .map(|(name, m)| ModeBody {
            name: name.clone(),
            dynamics: match m {
                ModeDynamics::Matrix(mf) => DynamicsBody::Matrix {
                    a: mf.a().iter().map(rows_of).collect(),
                    b: mf.b().iter().map(rows_of).collect(),
                    c: mf.c().iter().map(rows_of).collect(),
                    d: mf.d().iter().map(rows_of).collect(),
                    constant_input: mf.has_constant_input(),
                },
                ModeDynamics::Expressions { state, output, .. } => DynamicsBody::Expressions {
                    state: state.iter().map(ToString::to_string).collect(),
                    output: output.iter().map(ToString::to_string).collect(),
                },
            },
        })
        .collect();
    let kind = s.switching().kind.name().to_string();
    let switching = match &s.switching().logic {
        SwitchingLogic::Fixed(m) => SwitchingBody::Fixed {
            kind,
            mode: names[*m].clone(),
        },
        SwitchingLogic::SymbolSelect { symbols, guard } => SwitchingBody::SymbolSelect {
            kind,
            symbols: symbols.clone(),
            guard: guard.name().into(),
        },
        SwitchingLogic::Table(t) => SwitchingBody::Table {
            kind,
            entries: t
                .iter()
                .map(|((prev, w), next)| TableEntry {
                    prev: names[*prev].clone(),
                    w: w.clone(),
                    next: next.iter().map(|&m| names[m].clone()).collect(),
                })
                .collect(),
        },
        SwitchingLogic::Custom(_) => return Err(ModelError::NotSerialisable("custom switching rule")),
    };
    let controller = match s.controller() {
        ControllerHook::PassThrough => ControllerBody::PassThrough,
        ControllerHook::StaticFeedback { k_u, k_v } => ControllerBody::StaticFeedback {
            k_u: rows_of(k_u),
            k_v: rows_of(k_v),
        },
        ControllerHook::Custom(_) => return Err(ModelError::NotSerialisable("custom controller")),
    };
    Ok(SmplBody {
        meta,
        dims: DimsBody {
            n: d.n,
            n_u: d.n_u,
            n_v: d.n_v,
            n_y: d.n_y,
            n_r: d.n_r,
        },
        modes,
        switching,
        x0: json_weights(s.x0()),
        initial_mode: Some(names[s.initial_mode()].clone()),
        discrete_inputs: Some(s.discrete_inputs().to_vec()),
        controller,
        origin: match s.origin() {
            SmplOrigin::Direct => "direct",
            SmplOrigin::MaxPlusAutomaton => "mpa",
        }
        .into(),
    })
}

fn fa_from_body(b: FaBody) -> Result<FiniteAutomaton> {
    if b.states.iter().collect::<BTreeSet<_>>().len() != b.states.len() {
        return Err(semantic("state names must be distinct"));
    }
    if b.alphabet.iter().collect::<BTreeSet<_>>().len() != b.alphabet.len() {
        return Err(semantic("alphabet symbols must be distinct"));
    }
    let mut fa = FiniteAutomaton::new(b.states, b.alphabet);
    let state = |fa: &FiniteAutomaton, name: &str| {
        fa.state_index(name)
            .ok_or_else(|| semantic(format!("unknown state {name:?}")))
    };
    for s in &b.initial {
        let i = state(&fa, s)?;
        fa.set_initial(i).expect("index checked");
    }
    for s in &b.final_states {
        let i = state(&fa, s)?;
        fa.set_final(i).expect("index checked");
    }
    for (from, sym, to) in &b.transitions {
        let (p, q) = (state(&fa, from)?, state(&fa, to)?);
        fa.add_transition(p, sym, q)
            .map_err(|e| semantic(format!("transition {from} -{sym}-> {to}: {e}")))?;
    }
    Ok(fa)
}

fn fa_to_body(f: &FiniteAutomaton, meta: Meta) -> FaBody {
    let name = |s: usize| f.state_names()[s].clone();
    FaBody {
        meta,
        states: f.state_names().to_vec(),
        alphabet: f.alphabet().to_vec(),
        initial: f.initial().iter().map(|&s| name(s)).collect(),
        final_states: f.final_states().iter().map(|&s| name(s)).collect(),
        transitions: f
            .transitions()
            .map(|(p, a, q)| (name(p), f.alphabet()[a].clone(), name(q)))
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use maxalg_core::fixtures::{feedback_smpl, gaubert_mpa, production_line_smpl};

    fn round_trip(doc: &ModelDocument) -> String {
        let text = serialise_model(doc).unwrap();
        let back = parse_model(&text).unwrap();
        assert_eq!(serialise_model(&back).unwrap(), text);
        text
    }

    #[test]
    fn weights_use_sentinels() {
        let v = vec![JsonWeight(Weight::EPSILON), JsonWeight(Weight::TOP), JsonWeight(Weight::from(3)), JsonWeight(Weight::finite(0.5))];
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"["-inf","+inf",3,0.5]"#);
        let back: Vec<JsonWeight> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
        assert!(serde_json::from_str::<JsonWeight>("\"inf\"").is_err());
    }

    #[test]
    fn fixtures_round_trip() {
        round_trip(&ModelDocument::new(Model::Mpa(gaubert_mpa())));
        round_trip(&ModelDocument::new(Model::Smpl(production_line_smpl([1, 2, 3]))));
        round_trip(&ModelDocument::new(Model::Smpl(feedback_smpl(true))));
        round_trip(&ModelDocument::new(Model::maha_from(feedback_smpl(true)).unwrap()));
        round_trip(&ModelDocument::new(Model::Fa(gaubert_mpa().to_finite_abstraction())));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = parse_model("{\n  \"kind\": \"mpa\",\n  \"states\": [,]\n}").unwrap_err();
        match err {
            ModelError::Syntax { line, column, .. } => assert_eq!((line, column), (3, 14)),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn wrong_row_count_is_semantic() {
        let text = serialise_model(&ModelDocument::new(Model::Mpa(gaubert_mpa()))).unwrap();
        let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
        v["mu"]["a"].as_array_mut().unwrap().pop();
        let err = parse_model(&v.to_string()).unwrap_err();
        assert!(matches!(err, ModelError::Semantic(ref m) if m.contains("mu(a): expected 3 rows")), "{err}");
    }
}
