//! Model files: a matching graph, optionally an arrival law and a policy,
//! in one JSON document. Also the built-in presets used by the reproduction
//! commands.
//!
//! Schema:
//! ```json
//! {
//!   "vertices": ["1", "2", "3", "4"],
//!   "edges": [["1", "2"], ["2", "3"], ["2", "4"], ["3", "4"]],
//!   "mu": {"1": "2/10", "2": "0.3", "3": 0.25, "4": "1/4"},
//!   "policy": "priority",
//!   "prefs": {"2": ["3", "4", "1"]}
//! }
//! ```
//! The `vertices` order fixes the index order everywhere. Rational strings
//! ("p/q" or decimal) stay exact; bare JSON numbers become tolerance-checked
//! floats. `policy` is one of "fcfs", "ml", "priority", "random"; `prefs`
//! (labels, most preferred first) is required for "priority"; an optional
//! `order` gives the ml tie-break order, least preferred first.

use crate::graph::{GraphError, MatchingGraph};
use crate::measure::{MeasureError, ProbabilityVector};
use crate::policy::{MatchingPolicy, PolicyError};
use crate::scalar::{ParseScalarError, Scalar};
use serde::Deserialize;
use std::collections::BTreeMap;
use std::path::Path;

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("cannot read model file: {0}")]
    Io(#[from] std::io::Error),
    #[error("model file is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unknown vertex label `{0}`")]
    UnknownVertex(String),
    #[error("mu must assign a value to every vertex, missing `{0}`")]
    MissingMass(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Policy(#[from] PolicyError),
    #[error("bad number for vertex `{label}`: {source}")]
    BadNumber {
        label: String,
        source: ParseScalarError,
    },
    #[error("unknown policy kind `{0}` (expected fcfs, ml, priority or random)")]
    UnknownPolicy(String),
    #[error("priority policy needs a `prefs` table")]
    MissingPrefs,
}

/// A parsed and validated model file.
#[derive(Debug, Clone)]
pub struct ModelFile {
    pub graph: MatchingGraph,
    pub mu: Option<ProbabilityVector>,
    pub policy: Option<MatchingPolicy>,
}

#[derive(Deserialize)]
struct RawModel {
    vertices: Vec<String>,
    edges: Vec<(String, String)>,
    #[serde(default)]
    mu: Option<BTreeMap<String, RawMass>>,
    #[serde(default)]
    policy: Option<String>,
    #[serde(default)]
    prefs: Option<BTreeMap<String, Vec<String>>>,
    #[serde(default)]
    order: Option<Vec<String>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawMass {
    Text(String),
    Number(f64),
}

pub fn parse_model(text: &str) -> Result<ModelFile, ModelError> {
    let raw: RawModel = serde_json::from_str(text)?;
    let labels = raw.vertices.clone();
    let find = |label: &str| -> Result<usize, ModelError> {
        labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| ModelError::UnknownVertex(label.to_string()))
    };

    let mut edges = Vec::with_capacity(raw.edges.len());
    for (a, b) in &raw.edges {
        edges.push((find(a)?, find(b)?));
    }
    let graph = MatchingGraph::new(labels.clone(), edges)?;

    let mu = match raw.mu {
        None => None,
        Some(table) => {
            for key in table.keys() {
                find(key)?;
            }
            let mut entries = Vec::with_capacity(labels.len());
            for label in &labels {
                let value = table
                    .get(label)
                    .ok_or_else(|| ModelError::MissingMass(label.clone()))?;
                let scalar = match value {
                    RawMass::Text(s) => {
                        Scalar::parse_exact(s).map_err(|source| ModelError::BadNumber {
                            label: label.clone(),
                            source,
                        })?
                    }
                    RawMass::Number(x) => Scalar::Approx(*x),
                };
                entries.push(scalar);
            }
            Some(ProbabilityVector::new(entries)?)
        }
    };

    let policy = match raw.policy.as_deref() {
        None => None,
        Some("fcfs") => Some(MatchingPolicy::fcfs()),
        Some("random") => Some(MatchingPolicy::uniform_random()),
        Some("ml") => Some(match &raw.order {
            None => MatchingPolicy::match_longest(&graph),
            Some(order) => {
                let indices = order
                    .iter()
                    .map(|l| find(l))
                    .collect::<Result<Vec<_>, _>>()?;
                MatchingPolicy::match_longest_with_order(&graph, indices)?
            }
        }),
        Some("priority") => {
            let table = raw.prefs.as_ref().ok_or(ModelError::MissingPrefs)?;
            let mut prefs = vec![Vec::new(); graph.vertex_count()];
            for (label, list) in table {
                let v = find(label)?;
                prefs[v] = list
                    .iter()
                    .map(|l| find(l))
                    .collect::<Result<Vec<_>, _>>()?;
            }
            // Unlisted classes default to ascending label order.
            for (v, list) in prefs.iter_mut().enumerate() {
                if list.is_empty() {
                    *list = graph.neighbors(v).iter().collect();
                }
            }
            Some(MatchingPolicy::priority(&graph, prefs)?)
        }
        Some(other) => return Err(ModelError::UnknownPolicy(other.to_string())),
    };

    Ok(ModelFile { graph, mu, policy })
}

pub fn load_model(path: &Path) -> Result<ModelFile, ModelError> {
    parse_model(&std::fs::read_to_string(path)?)
}

/// Built-in models, so the reproduction commands need no hand-written files.
pub mod presets {
    use super::*;
    use crate::policy;

    /// The four-class graph with edges 1–2, 2–3, 2–4, 3–4.
    pub fn example1_graph() -> MatchingGraph {
        MatchingGraph::with_numeric_labels(4, [(0, 1), (1, 2), (1, 3), (2, 3)])
            .expect("preset is valid")
    }

    /// The cycle on classes 1..5.
    pub fn cycle5_graph() -> MatchingGraph {
        MatchingGraph::with_numeric_labels(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)])
            .expect("preset is valid")
    }

    /// The six-class separable (complete bipartite K_{4,2}) example:
    /// parts {1,2,4,5} and {3,6}.
    pub fn figure5_graph() -> MatchingGraph {
        MatchingGraph::with_numeric_labels(
            6,
            [
                (0, 2),
                (0, 5),
                (1, 2),
                (1, 5),
                (2, 3),
                (2, 4),
                (3, 5),
                (4, 5),
            ],
        )
        .expect("preset is valid")
    }

    /// The five-cycle arrival law parameterized by ε:
    /// μ(1) = 1/2 − 3ε/4, μ(2) = μ(5) = 1/4 − ε/8, μ(3) = μ(4) = ε/2.
    pub fn cycle5_measure(epsilon: &Scalar) -> Result<ProbabilityVector, MeasureError> {
        let half = Scalar::ratio(1, 2);
        let quarter = Scalar::ratio(1, 4);
        let m1 = &half - &(epsilon * &Scalar::ratio(3, 4));
        let m25 = &quarter - &(epsilon * &Scalar::ratio(1, 8));
        let m34 = epsilon * &half;
        ProbabilityVector::new(vec![m1, m25.clone(), m34.clone(), m34, m25])
    }

    /// Looks a preset model up by name: "example1", "cycle5", "figure5".
    pub fn preset(name: &str) -> Option<ModelFile> {
        match name {
            "example1" => Some(ModelFile {
                graph: example1_graph(),
                mu: Some(
                    ProbabilityVector::from_integer_weights(&[20, 30, 25, 25]).expect("preset law"),
                ),
                policy: None,
            }),
            "cycle5" => {
                let graph = cycle5_graph();
                let policy = policy::policy_cycle5(&graph).expect("preset policy");
                Some(ModelFile {
                    mu: Some(cycle5_measure(&Scalar::ratio(1, 10)).expect("preset law")),
                    graph,
                    policy: Some(policy),
                })
            }
            "figure5" => Some(ModelFile {
                graph: figure5_graph(),
                mu: None,
                policy: None,
            }),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Sign;

    const EXAMPLE_JSON: &str = r#"{
        "vertices": ["1", "2", "3", "4"],
        "edges": [["1", "2"], ["2", "3"], ["2", "4"], ["3", "4"]],
        "mu": {"1": "2/10", "2": "0.3", "3": 0.25, "4": "1/4"},
        "policy": "priority",
        "prefs": {"2": ["3", "4", "1"]}
    }"#;

    #[test]
    fn parses_the_reference_model() {
        let model = parse_model(EXAMPLE_JSON).unwrap();
        assert_eq!(model.graph, presets::example1_graph());
        let mu = model.mu.unwrap();
        // "2/10" and "0.3" stay exact; the bare 0.25 is a float.
        assert_eq!(mu.get(0), &Scalar::ratio(1, 5));
        assert_eq!(mu.get(1), &Scalar::ratio(3, 10));
        assert!(!mu.get(2).is_exact());
        match model.policy.unwrap() {
            MatchingPolicy::Priority { prefs } => {
                assert_eq!(prefs[1], vec![2, 3, 0]);
                assert_eq!(prefs[0], vec![1]); // defaulted ascending
            }
            other => panic!("expected priority policy, got {other:?}"),
        }
    }

    #[test]
    fn parses_ml_with_a_tie_break_order() {
        let model = parse_model(
            r#"{"vertices": ["1", "2", "3", "4"],
                "edges": [["1", "2"], ["2", "3"], ["2", "4"], ["3", "4"]],
                "policy": "ml",
                "order": ["4", "3", "2", "1"]}"#,
        )
        .unwrap();
        match model.policy.unwrap() {
            MatchingPolicy::MatchLongest { rank } => assert_eq!(rank, vec![3, 2, 1, 0]),
            other => panic!("expected ml, got {other:?}"),
        }
    }

    #[test]
    fn rejects_malformed_models() {
        assert!(matches!(
            parse_model(r#"{"vertices": ["1","2"], "edges": [["1","9"]]}"#),
            Err(ModelError::UnknownVertex(_))
        ));
        assert!(matches!(
            parse_model(r#"{"vertices": ["1","2"], "edges": [["1","2"]], "mu": {"1": "1/2"}}"#),
            Err(ModelError::MissingMass(_))
        ));
        assert!(matches!(
            parse_model(
                r#"{"vertices": ["1","2"], "edges": [["1","2"]], "mu": {"1": "x", "2": "1/2"}}"#
            ),
            Err(ModelError::BadNumber { .. })
        ));
        assert!(matches!(
            parse_model(r#"{"vertices": ["1","2"], "edges": [["1","2"]], "policy": "lifo"}"#),
            Err(ModelError::UnknownPolicy(_))
        ));
        assert!(matches!(
            parse_model(r#"{"vertices": ["1","2"], "edges": [["1","2"]], "policy": "priority"}"#),
            Err(ModelError::MissingPrefs)
        ));
        // mu keys must be vertex labels.
        assert!(matches!(
            parse_model(
                r#"{"vertices": ["1","2"], "edges": [["1","2"]],
                    "mu": {"1": "1/2", "2": "1/4", "9": "1/4"}}"#
            ),
            Err(ModelError::UnknownVertex(_))
        ));
    }

    #[test]
    fn five_cycle_measure_is_valid_and_documented() {
        let eps = Scalar::ratio(1, 10);
        let mu = presets::cycle5_measure(&eps).unwrap();
        assert_eq!(mu.get(0), &Scalar::ratio(17, 40)); // 1/2 − 3/40
        assert_eq!(mu.get(1), &Scalar::ratio(19, 80)); // 1/4 − 1/80
        assert_eq!(mu.get(2), &Scalar::ratio(1, 20));
        assert_eq!(mu.get(3), &Scalar::ratio(1, 20));
        assert_eq!(mu.get(4), &Scalar::ratio(19, 80));
        assert_eq!(Scalar::sum(mu.entries()).sign(), Sign::Positive);
    }

    #[test]
    fn presets_resolve_by_name() {
        assert!(presets::preset("example1").is_some());
        assert!(presets::preset("cycle5").unwrap().policy.is_some());
        assert!(presets::preset("figure5").is_some());
        assert!(presets::preset("nope").is_none());
    }
}
