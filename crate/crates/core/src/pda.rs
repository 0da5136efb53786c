//! Real-time deterministic pushdown automata whose letter actions are
//! mutually inverse, and their configuration graphs.
//!
//! Every transition consumes exactly one input letter; a machine is checked
//! by confirming that reading a letter and then its inverse restores the
//! configuration, over the reachable configurations to a chosen depth. The
//! configuration graph is then an inverse graph, realized lazily with
//! configurations as keys.

use crate::alphabet::{Alphabet, AlphabetSchema, Letter};
use crate::graph::{InverseGraph, VKey};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PdaError {
    #[error("bad machine description: {0}")]
    Parse(String),
    #[error("bad input alphabet: {0}")]
    Alphabet(String),
    #[error("transition {index} has empty input; every move must consume a letter")]
    RealTimeViolation { index: usize },
    #[error("transition {index} names unknown {what} \"{name}\"")]
    UnknownName { index: usize, what: &'static str, name: String },
    #[error("duplicate transition for (state {state}, letter {letter}, top {top})")]
    Duplicate { state: String, letter: String, top: String },
    #[error("initial configuration names unknown {what} \"{name}\"")]
    BadInitial { what: &'static str, name: String },
    #[error("{what} \"{name}\" may not contain '|' or '.'")]
    BadName { what: &'static str, name: String },
    #[error("the initial stack is empty")]
    EmptyInitialStack,
}

/// A configuration: a control state and a stack, bottom first.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Config {
    pub state: usize,
    pub stack: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PdaSchema {
    pub input: AlphabetSchema,
    pub stack: Vec<String>,
    pub states: Vec<String>,
    pub initial: InitialSchema,
    pub transitions: Vec<TransitionSchema>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InitialSchema {
    pub state: String,
    pub stack: Vec<String>,
}

/// One move: in `state` reading `input` with `top` on the stack, go to
/// `next` and replace the top with `push` (written bottom to top; empty
/// pops).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransitionSchema {
    pub state: String,
    pub input: String,
    pub top: String,
    pub next: String,
    pub push: Vec<String>,
}

pub struct InversePda {
    alphabet: Alphabet,
    states: Vec<String>,
    stack_names: Vec<String>,
    initial: Config,
    delta: BTreeMap<(usize, Letter, usize), (usize, Vec<usize>)>,
}

impl InversePda {
    pub fn from_schema(schema: PdaSchema) -> Result<InversePda, PdaError> {
        let alphabet =
            Alphabet::try_from(schema.input).map_err(|e| PdaError::Alphabet(e.to_string()))?;
        for (what, names) in [("state", &schema.states), ("stack symbol", &schema.stack)] {
            for name in names {
                if name.contains('|') || name.contains('.') || name.is_empty() {
                    return Err(PdaError::BadName { what, name: name.clone() });
                }
            }
        }
        let state_ix: BTreeMap<&str, usize> =
            schema.states.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        let stack_ix: BTreeMap<&str, usize> =
            schema.stack.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        let lookup = |what: &'static str,
                      index: usize,
                      map: &BTreeMap<&str, usize>,
                      name: &str|
         -> Result<usize, PdaError> {
            map.get(name).copied().ok_or_else(|| PdaError::UnknownName {
                index,
                what,
                name: name.to_string(),
            })
        };
        let mut delta = BTreeMap::new();
        for (index, t) in schema.transitions.iter().enumerate() {
            if t.input.is_empty() {
                return Err(PdaError::RealTimeViolation { index });
            }
            let letter = alphabet.parse_letter(&t.input).map_err(|_| PdaError::UnknownName {
                index,
                what: "input letter",
                name: t.input.clone(),
            })?;
            let state = lookup("state", index, &state_ix, &t.state)?;
            let next = lookup("state", index, &state_ix, &t.next)?;
            let top = lookup("stack symbol", index, &stack_ix, &t.top)?;
            let push = t
                .push
                .iter()
                .map(|s| lookup("stack symbol", index, &stack_ix, s))
                .collect::<Result<Vec<usize>, PdaError>>()?;
            if delta.insert((state, letter, top), (next, push)).is_some() {
                return Err(PdaError::Duplicate {
                    state: t.state.clone(),
                    letter: t.input.clone(),
                    top: t.top.clone(),
                });
            }
        }
        if schema.initial.stack.is_empty() {
            return Err(PdaError::EmptyInitialStack);
        }
        let initial = Config {
            state: *state_ix.get(schema.initial.state.as_str()).ok_or(PdaError::BadInitial {
                what: "state",
                name: schema.initial.state.clone(),
            })?,
            stack: schema
                .initial
                .stack
                .iter()
                .map(|s| {
                    stack_ix.get(s.as_str()).copied().ok_or(PdaError::BadInitial {
                        what: "stack symbol",
                        name: s.clone(),
                    })
                })
                .collect::<Result<Vec<usize>, PdaError>>()?,
        };
        Ok(InversePda {
            alphabet,
            states: schema.states,
            stack_names: schema.stack,
            initial,
            delta,
        })
    }

    pub fn from_json(text: &str) -> Result<InversePda, PdaError> {
        let schema: PdaSchema =
            serde_json::from_str(text).map_err(|e| PdaError::Parse(e.to_string()))?;
        InversePda::from_schema(schema)
    }

    pub fn to_json(&self) -> String {
        let schema = PdaSchema {
            input: AlphabetSchema::from(&self.alphabet),
            stack: self.stack_names.clone(),
            states: self.states.clone(),
            initial: InitialSchema {
                state: self.states[self.initial.state].clone(),
                stack: self.initial.stack.iter().map(|&s| self.stack_names[s].clone()).collect(),
            },
            transitions: self
                .delta
                .iter()
                .map(|(&(state, letter, top), (next, push))| TransitionSchema {
                    state: self.states[state].clone(),
                    input: self.alphabet.name(letter).to_string(),
                    top: self.stack_names[top].clone(),
                    next: self.states[*next].clone(),
                    push: push.iter().map(|&s| self.stack_names[s].clone()).collect(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&schema).expect("serializable")
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn initial(&self) -> &Config {
        &self.initial
    }

    /// One move, if defined. Real time: exactly one letter is consumed.
    pub fn step(&self, c: &Config, a: Letter) -> Option<Config> {
        let top = *c.stack.last()?;
        let (next, push) = self.delta.get(&(c.state, a, top))?;
        let mut stack = c.stack[..c.stack.len() - 1].to_vec();
        stack.extend_from_slice(push);
        Some(Config { state: *next, stack })
    }

    /// Check that every defined move is undone by the inverse letter, over
    /// all configurations reachable within `depth` moves. Returns the
    /// violations found, each as one line.
    pub fn validate_reversibility(&self, depth: usize) -> Vec<String> {
        let mut issues = Vec::new();
        let mut seen = BTreeSet::from([self.initial.clone()]);
        let mut frontier = VecDeque::from([(self.initial.clone(), 0usize)]);
        while let Some((c, d)) = frontier.pop_front() {
            for a in self.alphabet.letters() {
                let Some(next) = self.step(&c, a) else { continue };
                let back = self.step(&next, self.alphabet.inv(a));
                if back.as_ref() != Some(&c) {
                    issues.push(format!(
                        "{} then {} leads from {} to {:?}, not back",
                        self.alphabet.name(a),
                        self.alphabet.name(self.alphabet.inv(a)),
                        self.config_key(&c).as_str(),
                        back.map(|b| self.config_key(&b).as_str().to_string()),
                    ));
                }
                if d < depth && seen.insert(next.clone()) {
                    frontier.push_back((next, d + 1));
                }
            }
        }
        issues
    }

    pub fn config_key(&self, c: &Config) -> VKey {
        let stack: Vec<&str> =
            c.stack.iter().map(|&s| self.stack_names[s].as_str()).collect();
        VKey::new(format!("{}|{}", self.states[c.state], stack.join(".")))
    }

    fn parse_key(&self, key: &VKey) -> Option<Config> {
        let (state, stack) = key.as_str().split_once('|')?;
        let state = self.states.iter().position(|s| s == state)?;
        let mut parsed = Vec::new();
        for name in stack.split('.') {
            parsed.push(self.stack_names.iter().position(|s| s == name)?);
        }
        Some(Config { state, stack: parsed })
    }
}

/// The configuration graph: vertices are reachable configurations, edges
/// are moves. For a reversible machine this is an inverse graph.
pub struct ConfigGraph {
    pda: Arc<InversePda>,
}

pub fn config_graph(pda: Arc<InversePda>) -> ConfigGraph {
    ConfigGraph { pda }
}

impl InverseGraph for ConfigGraph {
    fn alphabet(&self) -> &Alphabet {
        &self.pda.alphabet
    }

    fn root(&self) -> VKey {
        self.pda.config_key(&self.pda.initial)
    }

    fn neighbor(&self, v: &VKey, a: Letter) -> Option<VKey> {
        let c = self.pda.parse_key(v)?;
        Some(self.pda.config_key(&self.pda.step(&c, a)?))
    }
}

/// A machine holding a signed counter: state tracks the sign, the stack
/// height tracks the magnitude. Its configuration graph is the integer
/// line over one symmetric letter.
pub fn signed_counter() -> InversePda {
    let schema = PdaSchema {
        input: AlphabetSchema { letters: vec!["a".into(), "a'".into()], inverse: vec![1, 0] },
        stack: vec!["_".into(), "X".into(), "Z".into()],
        states: vec!["q0".into(), "qp".into(), "qn".into()],
        initial: InitialSchema { state: "q0".into(), stack: vec!["_".into()] },
        transitions: counter_moves(),
    };
    InversePda::from_schema(schema).expect("well-formed machine")
}

fn counter_moves() -> Vec<TransitionSchema> {
    let mv = |state: &str, input: &str, top: &str, next: &str, push: &[&str]| TransitionSchema {
        state: state.into(),
        input: input.into(),
        top: top.into(),
        next: next.into(),
        push: push.iter().map(|s| (*s).to_string()).collect(),
    };
    vec![
        // Counting up: leave zero, lengthen a positive stack, or shorten a
        // negative one.
        mv("q0", "a", "_", "qp", &["_", "X"]),
        mv("qp", "a", "X", "qp", &["X", "Z"]),
        mv("qp", "a", "Z", "qp", &["Z", "Z"]),
        mv("qn", "a", "Z", "qn", &[]),
        mv("qn", "a", "X", "q0", &[]),
        // Counting down mirrors counting up.
        mv("q0", "a'", "_", "qn", &["_", "X"]),
        mv("qn", "a'", "X", "qn", &["X", "Z"]),
        mv("qn", "a'", "Z", "qn", &["Z", "Z"]),
        mv("qp", "a'", "Z", "qp", &[]),
        mv("qp", "a'", "X", "q0", &[]),
    ]
}
