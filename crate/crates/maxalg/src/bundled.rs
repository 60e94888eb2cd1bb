//! Model files shipped inside the binary.

pub const GAUBERT_MPA: &str = include_str!("../examples/gaubert_mpa.json");
pub const PRODUCTION_LINE: &str = include_str!("../examples/production_line.json");
pub const FEEDBACK_CLOSED_LOOP: &str = include_str!("../examples/feedback_closed_loop.json");

pub const ALL: [(&str, &str); 3] = [
    ("gaubert_mpa", GAUBERT_MPA),
    ("production_line", PRODUCTION_LINE),
    ("feedback_closed_loop", FEEDBACK_CLOSED_LOOP),
];

/// The bundled file named `name`, with or without a leading `examples/`
/// and a trailing `.json`.
pub fn lookup(name: &str) -> Option<&'static str> {
    let stem = name.strip_prefix("examples/").unwrap_or(name);
    let stem = stem.strip_suffix(".json").unwrap_or(stem);
    ALL.iter().find(|(n, _)| *n == stem).map(|(_, text)| *text)
}
