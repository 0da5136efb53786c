//! Letter-to-word transducers realizing generator actions on vertex codes.
//!
//! For each alphabet letter the automaton rewrites the code of a vertex to
//! the code of its image, one input letter per step, asynchronously: a step
//! may emit zero, one, two, or three letters. The construction holds back
//! one nonfinal letter while descending, because a generator can pull the
//! endpoint up one cone: the held letter is then replaced by a final one
//! instead of being released. Whatever follows the code is copied out
//! unchanged, and words that do not open with a vertex code are fixed
//! entirely, so every run is total.

use crate::alphabet::Letter;
use crate::codec::{cone_of, Codec, ConeDes, ConeLetter};
use crate::cone::{EdgeKind, EndConeSystem};
use serde::Serialize;
use std::collections::BTreeMap;
use std::sync::Arc;

/// What a state is doing: copying the tail out, starting a run for one
/// generator, or descending for that generator with one letter held back.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateDesc {
    Sink,
    Start(Letter),
    Held(Letter, ConeDes),
}

/// The transition table over all generators, with one start state per
/// generator and a shared copying sink.
pub struct VertexTransducer {
    sys: Arc<EndConeSystem>,
    letters: Vec<ConeLetter>,
    index: BTreeMap<ConeLetter, usize>,
    states: Vec<StateDesc>,
    table: Vec<Vec<(Vec<ConeLetter>, usize)>>,
    /// States per generator: one start plus one hold per designator.
    block: usize,
}

impl VertexTransducer {
    pub fn new(sys: Arc<EndConeSystem>) -> VertexTransducer {
        let codec = Codec::new(&sys);
        let letters: Vec<ConeLetter> = codec.letters().to_vec();
        let designators: Vec<ConeDes> = codec.designators().to_vec();
        drop(codec);
        let index: BTreeMap<ConeLetter, usize> =
            letters.iter().enumerate().map(|(i, &l)| (l, i)).collect();
        let des_index: BTreeMap<ConeDes, usize> =
            designators.iter().enumerate().map(|(i, &d)| (d, i)).collect();

        let block = 1 + designators.len();
        let mut states = vec![StateDesc::Sink];
        for a in sys.alphabet().letters() {
            states.push(StateDesc::Start(a));
            for &des in &designators {
                states.push(StateDesc::Held(a, des));
            }
        }
        let held = |a: Letter, des: ConeDes| 1 + a.index() * block + 1 + des_index[&des];

        let mut table = Vec::with_capacity(states.len());
        for &state in &states {
            let mut row = Vec::with_capacity(letters.len());
            for &input in &letters {
                row.push(transition(&sys, state, input, &held));
            }
            table.push(row);
        }
        VertexTransducer { sys, letters, index, states, table, block }
    }

    pub fn system(&self) -> &Arc<EndConeSystem> {
        &self.sys
    }

    /// The code alphabet the transducer reads and writes.
    pub fn letters(&self) -> &[ConeLetter] {
        &self.letters
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[StateDesc] {
        &self.states
    }

    /// Begin a streaming run of the transducer for generator `a`.
    pub fn stream(&self, a: Letter) -> TransducerRun<'_> {
        TransducerRun { tr: self, state: 1 + a.index() * self.block }
    }

    /// Rewrite `input` by the transducer for generator `a`.
    pub fn run(&self, a: Letter, input: &[ConeLetter]) -> Vec<ConeLetter> {
        let mut run = self.stream(a);
        let mut out = Vec::with_capacity(input.len());
        for &l in input {
            out.extend(run.push(l));
        }
        out.extend(run.finish());
        out
    }

    /// Rewrite `input` by the composition of the per-letter transducers,
    /// applied in word order.
    pub fn apply_word(&self, word: &[Letter], input: &[ConeLetter]) -> Vec<ConeLetter> {
        let mut cur = input.to_vec();
        for &a in word {
            cur = self.run(a, &cur);
        }
        cur
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Edge {
            from: String,
            on: String,
            emit: Vec<String>,
            to: String,
        }
        #[derive(Serialize)]
        struct Export {
            states: Vec<String>,
            letters: Vec<String>,
            transitions: Vec<Edge>,
        }
        let name = |s: usize| state_label(&self.states[s], self.sys.alphabet());
        let mut transitions = Vec::new();
        for (s, row) in self.table.iter().enumerate() {
            for (l, (emit, next)) in row.iter().enumerate() {
                transitions.push(Edge {
                    from: name(s),
                    on: self.letters[l].to_string(),
                    emit: emit.iter().map(|e| e.to_string()).collect(),
                    to: name(*next),
                });
            }
        }
        let export = Export {
            states: (0..self.states.len()).map(name).collect(),
            letters: self.letters.iter().map(|l| l.to_string()).collect(),
            transitions,
        };
        serde_json::to_string_pretty(&export).expect("serializable")
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph transducer {\n  rankdir=LR;\n");
        for (s, desc) in self.states.iter().enumerate() {
            let shape = match desc {
                StateDesc::Sink => "doublecircle",
                _ => "circle",
            };
            out.push_str(&format!(
                "  s{s} [label=\"{}\", shape={shape}];\n",
                state_label(desc, self.sys.alphabet())
            ));
        }
        for (s, row) in self.table.iter().enumerate() {
            for (l, (emit, next)) in row.iter().enumerate() {
                let emitted: Vec<String> = emit.iter().map(|e| e.to_string()).collect();
                out.push_str(&format!(
                    "  s{s} -> s{next} [label=\"{} / {}\"];\n",
                    self.letters[l],
                    if emitted.is_empty() { "e".to_string() } else { emitted.join("") },
                ));
            }
        }
        out.push_str("}\n");
        out
    }
}

fn state_label(desc: &StateDesc, alphabet: &crate::alphabet::Alphabet) -> String {
    match desc {
        StateDesc::Sink => "sink".to_string(),
        StateDesc::Start(a) => format!("start:{}", alphabet.name(*a)),
        StateDesc::Held(a, ConeDes::Root) => format!("held:{}:r", alphabet.name(*a)),
        StateDesc::Held(a, ConeDes::Slot { parent, slot }) => {
            format!("held:{}:{parent}.{slot}", alphabet.name(*a))
        }
    }
}

/// One table entry. `held` maps hold-state descriptors to state indices.
fn transition(
    sys: &EndConeSystem,
    state: StateDesc,
    input: ConeLetter,
    held: &dyn Fn(Letter, ConeDes) -> usize,
) -> (Vec<ConeLetter>, usize) {
    const SINK: usize = 0;
    match state {
        StateDesc::Sink => (vec![input], SINK),
        StateDesc::Start(a) => match (input.des, input.vertex) {
            (ConeDes::Root, None) => (Vec::new(), held(a, ConeDes::Root)),
            (ConeDes::Root, Some(v)) => match sys.edge_kind(sys.root_type(), v, a) {
                Some(EdgeKind::Internal { to }) => {
                    (vec![ConeLetter::fin(ConeDes::Root, to)], SINK)
                }
                Some(EdgeKind::Cross { slot, to }) => (
                    vec![
                        ConeLetter::nonfinal(ConeDes::Root),
                        ConeLetter::fin(ConeDes::Slot { parent: sys.root_type(), slot }, to),
                    ],
                    SINK,
                ),
                // A valid presentation has no exits at the root vertex.
                None => (vec![input], SINK),
            },
            _ => (vec![input], SINK),
        },
        StateDesc::Held(a, c) => {
            let tc = cone_of(sys, c);
            let release = ConeLetter::nonfinal(c);
            match (input.des, input.vertex) {
                (ConeDes::Slot { parent, slot }, None) if parent == tc => {
                    (vec![release], held(a, ConeDes::Slot { parent, slot }))
                }
                (d @ ConeDes::Slot { parent, slot }, Some(v)) if parent == tc => {
                    let u = sys.children(parent)[slot];
                    match sys.edge_kind(u, v, a) {
                        Some(EdgeKind::Internal { to }) => {
                            (vec![release, ConeLetter::fin(d, to)], SINK)
                        }
                        Some(EdgeKind::Cross { slot: deeper, to }) => (
                            vec![
                                release,
                                ConeLetter::nonfinal(d),
                                ConeLetter::fin(ConeDes::Slot { parent: u, slot: deeper }, to),
                            ],
                            SINK,
                        ),
                        None => match sys.up_edge(parent, slot, a, v) {
                            // The generator climbs out: the held letter
                            // becomes final one cone up.
                            Some(up) => (vec![ConeLetter::fin(c, up)], SINK),
                            None => (vec![release, input], SINK),
                        },
                    }
                }
                _ => (vec![release, input], SINK),
            }
        }
    }
}

/// A streaming run; letters go in one at a time and emissions come out.
pub struct TransducerRun<'t> {
    tr: &'t VertexTransducer,
    state: usize,
}

impl TransducerRun<'_> {
    pub fn push(&mut self, l: ConeLetter) -> Vec<ConeLetter> {
        match self.tr.index.get(&l) {
            Some(&li) => {
                let (emit, next) = &self.tr.table[self.state][li];
                self.state = *next;
                emit.clone()
            }
            // A letter from some other system's alphabet: flush and copy.
            None => {
                let mut out = self.flush();
                out.push(l);
                self.state = 0;
                out
            }
        }
    }

    /// End of input: release anything held.
    pub fn finish(mut self) -> Vec<ConeLetter> {
        self.flush()
    }

    fn flush(&mut self) -> Vec<ConeLetter> {
        match self.tr.states[self.state] {
            StateDesc::Held(_, c) => vec![ConeLetter::nonfinal(c)],
            _ => Vec::new(),
        }
    }
}

/// Check that rewriting commutes with the action on a ball: for every
/// address within `radius`, every generator, and every suffix, the run maps
/// code plus suffix to the image's code plus the same suffix. Returns the
/// number of triples checked.
pub fn check_equivariance(
    tr: &VertexTransducer,
    radius: usize,
    suffixes: &[Vec<ConeLetter>],
) -> Result<usize, String> {
    let sys = tr.system();
    let codec = Codec::new(sys);
    let mut checked = 0;
    for addr in sys.addresses_to_depth(radius) {
        let code = codec.encode(&addr);
        for a in sys.alphabet().letters() {
            let image = sys
                .step(&addr, a)
                .map_err(|e| format!("step failed at {addr}: {e}"))?;
            let image_code = codec.encode(&image);
            for suffix in suffixes {
                let mut input = code.clone();
                input.extend_from_slice(suffix);
                let mut expect = image_code.clone();
                expect.extend_from_slice(suffix);
                let got = tr.run(a, &input);
                if got != expect {
                    return Err(format!(
                        "run({}, code({addr})+suffix) diverged from code({image})+suffix",
                        sys.alphabet().name(a),
                    ));
                }
                checked += 1;
            }
        }
    }
    Ok(checked)
}

/// Check the length discipline on a ball: one generator changes code length
/// by at most one, and a word by at most its length. Returns the number of
/// pairs checked.
pub fn check_length_discipline(
    tr: &VertexTransducer,
    radius: usize,
    words: &[Vec<Letter>],
) -> Result<usize, String> {
    let sys = tr.system();
    let codec = Codec::new(sys);
    let mut checked = 0;
    for addr in sys.addresses_to_depth(radius) {
        let code = codec.encode(&addr);
        for word in words {
            let out = tr.apply_word(word, &code);
            let delta = out.len().abs_diff(code.len());
            if delta > word.len() {
                return Err(format!(
                    "length moved by {delta} > {} at {addr}",
                    word.len()
                ));
            }
            checked += 1;
        }
    }
    Ok(checked)
}
