//! Script documents (version 1).
//!
//! ```json
//! {
//!   "version": 1,
//!   "kernel": {"mu": 0.0, "sigma": 1.0},
//!   "initial": {"masses": [2.0, 2.0], "edges": [[1, 2, 2.0]]},
//!   "events": [
//!     {"type": "add_node", "mass": 3.0},
//!     {"type": "add_edge", "k": 1, "l": 3, "w": 2.0},
//!     {"type": "prune", "threshold": 3.6}
//!   ]
//! }
//! ```
//!
//! Unknown fields are rejected. `kernel` may be omitted (mu = 0, sigma = 1),
//! node labels are optional, and a prune threshold may also be written as
//! the string `"Infinity"`, `"-Infinity"` or `"NaN"`.

use std::collections::BTreeSet;
use std::fmt;

use massgraph::{Event, GraphState, KernelParams, NodeId};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub const SCRIPT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScriptDocument {
    pub version: u32,
    #[serde(default)]
    pub kernel: KernelDoc,
    pub initial: InitialDoc,
    #[serde(default)]
    pub events: Vec<EventDoc>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelDoc {
    pub mu: f64,
    pub sigma: f64,
}

impl Default for KernelDoc {
    fn default() -> Self {
        KernelDoc { mu: 0.0, sigma: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialDoc {
    pub masses: Vec<f64>,
    #[serde(default)]
    pub edges: Vec<(u32, u32, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum EventDoc {
    AddEdge {
        k: u32,
        l: u32,
        w: f64,
    },
    AddNode {
        mass: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
    },
    Prune {
        threshold: JsonFloat,
    },
}

/// An `f64` that serializes non-finite values as strings, since JSON numbers
/// cannot hold them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JsonFloat(pub f64);

impl Serialize for JsonFloat {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v = self.0;
        if v.is_finite() {
            s.serialize_f64(v)
        } else if v.is_nan() {
            s.serialize_str("NaN")
        } else if v > 0.0 {
            s.serialize_str("Infinity")
        } else {
            s.serialize_str("-Infinity")
        }
    }
}

impl<'de> Deserialize<'de> for JsonFloat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(JsonFloat(v)),
            Repr::Text(t) => match t.as_str() {
                "Infinity" => Ok(JsonFloat(f64::INFINITY)),
                "-Infinity" => Ok(JsonFloat(f64::NEG_INFINITY)),
                "NaN" => Ok(JsonFloat(f64::NAN)),
                other => Err(serde::de::Error::custom(format!(
                    "expected a number, found string {other:?}"
                ))),
            },
        }
    }
}

#[derive(Debug, Error)]
pub enum ScriptError {
    #[error("parse error at line {line}, column {column} ({path}): {message}")]
    Syntax {
        line: usize,
        column: usize,
        path: String,
        message: String,
    },
    #[error("constraint violation at {path}: {message}")]
    Constraint { path: String, message: String },
}

impl ScriptError {
    fn at(path: impl fmt::Display, message: impl fmt::Display) -> Self {
        ScriptError::Constraint {
            path: path.to_string(),
            message: message.to_string(),
        }
    }

    pub fn path(&self) -> &str {
        match self {
            ScriptError::Syntax { path, .. } | ScriptError::Constraint { path, .. } => path,
        }
    }
}

/// Domain values carried by a script.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedScript {
    pub initial: GraphState,
    pub events: Vec<Event>,
    pub params: KernelParams,
}

/// Strict JSON decoding followed by a re-check of every domain constraint.
pub fn parse_script(bytes: &[u8]) -> Result<ParsedScript, ScriptError> {
    let doc = parse_document(bytes)?;
    document_to_domain(&doc)
}

pub fn parse_document(bytes: &[u8]) -> Result<ScriptDocument, ScriptError> {
    let mut de = serde_json::Deserializer::from_slice(bytes);
    let doc: ScriptDocument = serde_path_to_error::deserialize(&mut de).map_err(syntax_error)?;
    de.end().map_err(|e| ScriptError::Syntax {
        line: e.line(),
        column: e.column(),
        path: ".".into(),
        message: e.to_string(),
    })?;
    Ok(doc)
}

pub(crate) fn syntax_error(err: serde_path_to_error::Error<serde_json::Error>) -> ScriptError {
    let path = err.path().to_string();
    let inner = err.into_inner();
    ScriptError::Syntax {
        line: inner.line(),
        column: inner.column(),
        path,
        message: inner.to_string(),
    }
}

fn greater_than_one(v: f64) -> bool {
    v > 1.0 && v.is_finite()
}

pub fn document_to_domain(doc: &ScriptDocument) -> Result<ParsedScript, ScriptError> {
    if doc.version != SCRIPT_VERSION {
        return Err(ScriptError::at(
            "version",
            format!("unsupported version {} (expected {SCRIPT_VERSION})", doc.version),
        ));
    }
    let params = KernelParams::new(doc.kernel.mu, doc.kernel.sigma).map_err(|e| ScriptError::at("kernel", e))?;

    for (i, &m) in doc.initial.masses.iter().enumerate() {
        if !greater_than_one(m) {
            return Err(ScriptError::at(
                format!("initial.masses[{i}]"),
                format!("mass {m} must be greater than 1"),
            ));
        }
    }
    let n = doc.initial.masses.len() as u32;
    let mut seen = BTreeSet::new();
    for (idx, &(i, j, w)) in doc.initial.edges.iter().enumerate() {
        let path = format!("initial.edges[{idx}]");
        if i == j {
            return Err(ScriptError::at(path, format!("diagonal entry ({i}, {j})")));
        }
        if i == 0 || j == 0 || i > n || j > n {
            return Err(ScriptError::at(path, format!("node index outside 1..={n}")));
        }
        if !greater_than_one(w) {
            return Err(ScriptError::at(path, format!("weight {w} must be greater than 1")));
        }
        if !seen.insert((i.min(j), i.max(j))) {
            return Err(ScriptError::at(path, format!("duplicate pair ({i}, {j})")));
        }
    }
    let initial =
        GraphState::new(&doc.initial.masses, &doc.initial.edges, params).map_err(|e| ScriptError::at("initial", e))?;

    let mut events = Vec::with_capacity(doc.events.len());
    for (idx, ev) in doc.events.iter().enumerate() {
        let event = match ev {
            EventDoc::AddEdge { k, l, w } => {
                if k == l {
                    return Err(ScriptError::at(
                        format!("events[{idx}]"),
                        format!("diagonal edge ({k}, {l})"),
                    ));
                }
                if !greater_than_one(*w) {
                    return Err(ScriptError::at(
                        format!("events[{idx}].w"),
                        format!("initial weight {w} must be greater than 1"),
                    ));
                }
                Event::AddEdge {
                    k: NodeId(*k),
                    l: NodeId(*l),
                    initial_weight: *w,
                }
            }
            EventDoc::AddNode { mass, label } => {
                if !greater_than_one(*mass) {
                    return Err(ScriptError::at(
                        format!("events[{idx}].mass"),
                        format!("initial mass {mass} must be greater than 1"),
                    ));
                }
                Event::AddNode {
                    initial_mass: *mass,
                    label: label.clone(),
                }
            }
            EventDoc::Prune { threshold } => Event::Prune { threshold: threshold.0 },
        };
        events.push(event);
    }
    Ok(ParsedScript {
        initial,
        events,
        params,
    })
}

pub fn event_doc(event: &Event) -> EventDoc {
    match event {
        Event::AddEdge { k, l, initial_weight } => EventDoc::AddEdge {
            k: k.get(),
            l: l.get(),
            w: *initial_weight,
        },
        Event::AddNode { initial_mass, label } => EventDoc::AddNode {
            mass: *initial_mass,
            label: label.clone(),
        },
        Event::Prune { threshold } => EventDoc::Prune {
            threshold: JsonFloat(*threshold),
        },
    }
}

/// Document form of a phase-0 state plus its events.
pub fn render_document(initial: &GraphState, events: &[Event]) -> ScriptDocument {
    ScriptDocument {
        version: SCRIPT_VERSION,
        kernel: KernelDoc {
            mu: initial.params().mu(),
            sigma: initial.params().sigma(),
        },
        initial: InitialDoc {
            masses: initial.nodes().iter().map(|n| n.mass).collect(),
            edges: initial
                .edges()
                .map(|e| (e.key.lo().get(), e.key.hi().get(), e.weight))
                .collect(),
        },
        events: events.iter().map(event_doc).collect(),
    }
}

/// Canonical pretty JSON of a script, with a trailing newline.
pub fn render_script(initial: &GraphState, events: &[Event]) -> String {
    let value = serde_json::to_value(render_document(initial, events)).expect("script documents always serialize");
    crate::canonical::to_canonical_string(&value)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str =
        r#"{"version":1,"kernel":{"mu":0,"sigma":1},"initial":{"masses":[2,2],"edges":[[1,2,2]]},"events":[]}"#;

    #[test]
    fn minimal_document() {
        let parsed = parse_script(MINIMAL.as_bytes()).unwrap();
        assert_eq!(parsed.initial.phase(), 0);
        assert_eq!(parsed.initial.nodes().len(), 2);
        assert_eq!(parsed.initial.weight(NodeId(2), NodeId(1)).unwrap(), 2.0);
        assert!(parsed.events.is_empty());
        assert_eq!(parsed.params, KernelParams::default());
    }

    #[test]
    fn diagonal_edge_path() {
        let text = MINIMAL.replace("[[1,2,2]]", "[[1,1,2]]");
        let err = parse_script(text.as_bytes()).unwrap_err();
        assert_eq!(err.path(), "initial.edges[0]");
        assert!(matches!(err, ScriptError::Constraint { .. }));
    }

    #[test]
    fn small_event_weight_path() {
        let text = MINIMAL.replace(
            r#""events":[]"#,
            r#""events":[{"type":"add_edge","k":1,"l":2,"w":0.5}]"#,
        );
        let err = parse_script(text.as_bytes()).unwrap_err();
        assert_eq!(err.path(), "events[0].w");
    }

    #[test]
    fn unknown_fields_rejected() {
        let text = MINIMAL.replace(r#""version":1"#, r#""version":1,"extra":true"#);
        assert!(matches!(parse_script(text.as_bytes()), Err(ScriptError::Syntax { .. })));

        let text = MINIMAL.replace(
            r#""events":[]"#,
            r#""events":[{"type":"prune","threshold":2,"when":3}]"#,
        );
        let err = parse_script(text.as_bytes()).unwrap_err();
        assert!(matches!(err, ScriptError::Syntax { .. }), "{err}");

        let text = MINIMAL.replace(r#""events":[]"#, r#""events":[{"type":"add_edges","k":1,"l":2,"w":3}]"#);
        assert!(parse_script(text.as_bytes()).is_err());
    }

    #[test]
    fn syntax_error_has_position() {
        let err = parse_script(b"{\n  \"version\": 1,\n  \"initial\": {\"masses\": [2, }\n}").unwrap_err();
        match err {
            ScriptError::Syntax { line, .. } => assert_eq!(line, 3),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn type_error_has_path() {
        let text = MINIMAL.replace("[2,2]", r#"[2,"x"]"#);
        let err = parse_script(text.as_bytes()).unwrap_err();
        assert_eq!(err.path(), "initial.masses[1]");
    }

    #[test]
    fn constraint_paths() {
        let cases = [
            (MINIMAL.replace("[2,2]", "[2,0.5]"), "initial.masses[1]"),
            (MINIMAL.replace("[[1,2,2]]", "[[1,2,2],[2,1,3]]"), "initial.edges[1]"),
            (MINIMAL.replace("[[1,2,2]]", "[[1,5,2]]"), "initial.edges[0]"),
            (MINIMAL.replace(r#""sigma":1"#, r#""sigma":0"#), "kernel"),
            (MINIMAL.replace(r#""version":1"#, r#""version":2"#), "version"),
            (
                MINIMAL.replace(r#""events":[]"#, r#""events":[{"type":"add_node","mass":1}]"#),
                "events[0].mass",
            ),
        ];
        for (text, path) in cases {
            let err = parse_script(text.as_bytes()).unwrap_err();
            assert_eq!(err.path(), path, "{err}");
        }
    }

    #[test]
    fn kernel_defaults_and_labels() {
        let text = r#"{"version":1,"initial":{"masses":[3]},"events":[{"type":"add_node","mass":2.5,"label":"home"},{"type":"prune","threshold":"Infinity"}]}"#;
        let parsed = parse_script(text.as_bytes()).unwrap();
        assert_eq!(parsed.params, KernelParams::default());
        assert_eq!(
            parsed.events[0],
            Event::AddNode {
                initial_mass: 2.5,
                label: Some("home".into())
            }
        );
        assert_eq!(
            parsed.events[1],
            Event::Prune {
                threshold: f64::INFINITY
            }
        );
    }

    #[test]
    fn render_then_parse_is_identity() {
        let text = MINIMAL.replace(
            r#""events":[]"#,
            r#""events":[{"type":"add_node","mass":3.25,"label":"a"},{"type":"add_edge","k":1,"l":3,"w":2.000000000000001},{"type":"prune","threshold":-1e300}]"#,
        );
        let parsed = parse_script(text.as_bytes()).unwrap();
        let rendered = render_script(&parsed.initial, &parsed.events);
        let again = parse_script(rendered.as_bytes()).unwrap();
        assert_eq!(parsed, again);
    }
}
