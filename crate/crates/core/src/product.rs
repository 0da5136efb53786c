//! Graph compositions: free products of rooted inverse graphs, loop padding,
//! inflations along inverse Schreier automata, and subgroup graphs over a
//! basis of words.
//!
//! A free product takes two families of rooted graphs over disjoint
//! alphabets. Vertices are alternating words: sequences of non-root factor
//! vertices whose entries alternate between the families. At each vertex the
//! last entry decides where a letter acts: same family means a step inside
//! that factor, other family means a step out of the root of a factor chosen
//! by the gluing rule attached to the entry. The first factor of each family
//! shares its root with the product root.

use crate::alphabet::{Alphabet, Letter, Word};
use crate::cone::{EndConeSystem, VertexAddress};
use crate::graph::{walk, InverseGraph, VKey};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ProductError {
    #[error("a free product needs at least one factor on each side")]
    EmptySide,
    #[error("factor {index} on side {side:?} has a different alphabet from factor 0")]
    MixedAlphabets { side: Side, index: usize },
    #[error("factor alphabets are not disjoint: {0}")]
    AlphabetClash(String),
    #[error("gluing rule on side {side:?} factor {index} points at missing factor {target}")]
    GlueRange { side: Side, index: usize, target: usize },
    #[error("automaton state name {0:?} contains '#'")]
    BadStateName(String),
    #[error("automaton transition table is not total: state {state} letter {letter}")]
    NotTotal { state: usize, letter: String },
    #[error("automaton breaks the inverse condition at state {state} letter {letter}")]
    NotInverse { state: usize, letter: String },
    #[error("automaton output alphabet differs from the graph alphabet")]
    OutputMismatch,
    #[error("basis word {index} uses a letter outside the system alphabet")]
    BasisLetter { index: usize },
    #[error("alphabet error: {0}")]
    Alphabet(#[from] crate::alphabet::AlphabetError),
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub enum Side {
    One,
    Two,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::One => Side::Two,
            Side::Two => Side::One,
        }
    }
}

/// Chooses, per non-root vertex of a factor, which factor of the other
/// family is glued on at that vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GlueRule {
    /// Every vertex glues the same factor.
    Constant(usize),
    /// Integer-keyed factors: strictly positive keys glue `positive`, all
    /// others `other`.
    BySign { positive: usize, other: usize },
    /// Explicit exceptions by vertex key, with a default.
    Table {
        default: usize,
        exceptions: BTreeMap<String, usize>,
    },
}

impl GlueRule {
    pub fn target(&self, key: &VKey) -> Option<usize> {
        match self {
            GlueRule::Constant(i) => Some(*i),
            GlueRule::BySign { positive, other } => {
                let n: i64 = key.as_str().parse().ok()?;
                Some(if n > 0 { *positive } else { *other })
            }
            GlueRule::Table { default, exceptions } => {
                Some(exceptions.get(key.as_str()).copied().unwrap_or(*default))
            }
        }
    }

    fn max_target(&self) -> usize {
        match self {
            GlueRule::Constant(i) => *i,
            GlueRule::BySign { positive, other } => (*positive).max(*other),
            GlueRule::Table { default, exceptions } => exceptions
                .values()
                .copied()
                .chain(std::iter::once(*default))
                .max()
                .unwrap_or(*default),
        }
    }
}

/// Canonical vertex encoding of a free product: alternating non-root factor
/// vertices, outermost first. Keys look like `g0:3|h1:-2` with `g` for the
/// first family and `h` for the second; the root is `*`. Factor keys must
/// not contain `|`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct AlternatingWord {
    pub entries: Vec<(Side, usize, VKey)>,
}

impl AlternatingWord {
    pub fn root() -> Self {
        AlternatingWord { entries: Vec::new() }
    }

    pub fn parse(key: &VKey) -> Option<Self> {
        if key.as_str() == "*" {
            return Some(AlternatingWord::root());
        }
        let mut entries: Vec<(Side, usize, VKey)> = Vec::new();
        for piece in key.as_str().split('|') {
            let mut chars = piece.chars();
            let side = match chars.next()? {
                'g' => Side::One,
                'h' => Side::Two,
                _ => return None,
            };
            let rest = chars.as_str();
            let (idx, inner) = rest.split_once(':')?;
            let idx: usize = idx.parse().ok()?;
            if let Some((last_side, _, _)) = entries.last() {
                if *last_side == side {
                    return None;
                }
            }
            entries.push((side, idx, VKey::new(inner)));
        }
        Some(AlternatingWord { entries })
    }

    pub fn to_key(&self) -> VKey {
        if self.entries.is_empty() {
            return VKey::new("*");
        }
        let parts: Vec<String> = self
            .entries
            .iter()
            .map(|(side, idx, key)| {
                let tag = match side {
                    Side::One => 'g',
                    Side::Two => 'h',
                };
                format!("{tag}{idx}:{key}")
            })
            .collect();
        VKey::new(parts.join("|"))
    }
}

/// Free product of two families of rooted inverse graphs.
pub struct FreeProduct {
    alphabet: Alphabet,
    split: usize,
    side1: Vec<Arc<dyn InverseGraph>>,
    side2: Vec<Arc<dyn InverseGraph>>,
    glue1: Vec<GlueRule>,
    glue2: Vec<GlueRule>,
}

impl FreeProduct {
    pub fn new(
        side1: Vec<(Arc<dyn InverseGraph>, GlueRule)>,
        side2: Vec<(Arc<dyn InverseGraph>, GlueRule)>,
    ) -> Result<FreeProduct, ProductError> {
        if side1.is_empty() || side2.is_empty() {
            return Err(ProductError::EmptySide);
        }
        for (index, (g, _)) in side1.iter().enumerate() {
            if g.alphabet() != side1[0].0.alphabet() {
                return Err(ProductError::MixedAlphabets { side: Side::One, index });
            }
        }
        for (index, (g, _)) in side2.iter().enumerate() {
            if g.alphabet() != side2[0].0.alphabet() {
                return Err(ProductError::MixedAlphabets { side: Side::Two, index });
            }
        }
        let a1 = side1[0].0.alphabet().clone();
        let a2 = side2[0].0.alphabet().clone();
        let alphabet = a1
            .disjoint_union(&a2)
            .map_err(|e| ProductError::AlphabetClash(e.to_string()))?;
        let split = a1.len();
        for (index, (_, rule)) in side1.iter().enumerate() {
            if rule.max_target() >= side2.len() {
                return Err(ProductError::GlueRange {
                    side: Side::One,
                    index,
                    target: rule.max_target(),
                });
            }
        }
        for (index, (_, rule)) in side2.iter().enumerate() {
            if rule.max_target() >= side1.len() {
                return Err(ProductError::GlueRange {
                    side: Side::Two,
                    index,
                    target: rule.max_target(),
                });
            }
        }
        let (side1, glue1) = side1.into_iter().unzip();
        let (side2, glue2) = side2.into_iter().unzip();
        Ok(FreeProduct { alphabet, split, side1, side2, glue1, glue2 })
    }

    /// Which family a product letter belongs to, with its letter index there.
    pub fn split_letter(&self, a: Letter) -> (Side, Letter) {
        if a.index() < self.split {
            (Side::One, a)
        } else {
            (Side::Two, Letter((a.index() - self.split) as u16))
        }
    }

    fn factor(&self, side: Side, idx: usize) -> &Arc<dyn InverseGraph> {
        match side {
            Side::One => &self.side1[idx],
            Side::Two => &self.side2[idx],
        }
    }

    fn glue(&self, side: Side, idx: usize) -> &GlueRule {
        match side {
            Side::One => &self.glue1[idx],
            Side::Two => &self.glue2[idx],
        }
    }
}

impl InverseGraph for FreeProduct {
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn root(&self) -> VKey {
        AlternatingWord::root().to_key()
    }

    fn neighbor(&self, v: &VKey, a: Letter) -> Option<VKey> {
        let mut word = AlternatingWord::parse(v)?;
        let (side, la) = self.split_letter(a);
        match word.entries.last() {
            None => {
                let g = self.factor(side, 0);
                let next = g.neighbor(&g.root(), la)?;
                if next != g.root() {
                    word.entries.push((side, 0, next));
                }
            }
            Some((s, idx, key)) if *s == side => {
                let g = self.factor(side, *idx);
                let next = g.neighbor(key, la)?;
                if next == g.root() {
                    word.entries.pop();
                } else {
                    let last = word.entries.last_mut().expect("nonempty");
                    last.2 = next;
                }
            }
            Some((s, idx, key)) => {
                let target = self.glue(*s, *idx).target(key)?;
                let g = self.factor(side, target);
                let next = g.neighbor(&g.root(), la)?;
                if next != g.root() {
                    word.entries.push((side, target, next));
                }
            }
        }
        Some(word.to_key())
    }
}

/// `inner` viewed over a larger alphabet; letters missing from the inner
/// alphabet become loops at every vertex.
pub struct PaddedGraph {
    inner: Arc<dyn InverseGraph>,
    alphabet: Alphabet,
    /// Per extended letter: the inner letter of the same name, if any.
    translate: Vec<Option<Letter>>,
}

pub fn pad_graph(
    inner: Arc<dyn InverseGraph>,
    alphabet: Alphabet,
) -> Result<PaddedGraph, ProductError> {
    let translate = translate_by_name(&alphabet, inner.alphabet())?;
    Ok(PaddedGraph { inner, alphabet, translate })
}

/// Name-based letter translation `big -> small`, requiring involution
/// compatibility and that every small letter appears in `big`.
fn translate_by_name(
    big: &Alphabet,
    small: &Alphabet,
) -> Result<Vec<Option<Letter>>, ProductError> {
    let mut translate = Vec::with_capacity(big.len());
    for a in big.letters() {
        translate.push(small.lookup(big.name(a)));
    }
    for s in small.letters() {
        let name = small.name(s);
        let b = big
            .lookup(name)
            .ok_or_else(|| ProductError::AlphabetClash(format!("letter {name:?} lost")))?;
        if big.name(big.inv(b)) != small.name(small.inv(s)) {
            return Err(ProductError::AlphabetClash(format!(
                "letter {name:?} changes its inverse"
            )));
        }
        translate[b.index()] = Some(s);
    }
    Ok(translate)
}

impl InverseGraph for PaddedGraph {
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }
    fn root(&self) -> VKey {
        self.inner.root()
    }
    fn neighbor(&self, v: &VKey, a: Letter) -> Option<VKey> {
        match self.translate[a.index()] {
            Some(inner_letter) => self.inner.neighbor(v, inner_letter),
            None => Some(v.clone()),
        }
    }
}

/// Loop padding of a presentation: foreign letters of the larger alphabet
/// loop at every frontier vertex of every type.
pub fn pad_system(
    sys: &EndConeSystem,
    alphabet: Alphabet,
) -> Result<EndConeSystem, ProductError> {
    let translate = translate_by_name(&alphabet, sys.alphabet())?;
    let back: BTreeMap<usize, Letter> = alphabet
        .letters()
        .filter_map(|b| translate[b.index()].map(|s| (s.index(), b)))
        .collect();
    let mut specs = Vec::new();
    for ty in 0..sys.type_count() {
        let mut internal_edges: Vec<(usize, Letter, usize)> = sys
            .internal_edges(ty)
            .iter()
            .map(|&(u, a, v)| (u, back[&a.index()], v))
            .collect();
        for v in 0..sys.frontier(ty).len() {
            for b in alphabet.letters() {
                if translate[b.index()].is_none() {
                    internal_edges.push((v, b, v));
                }
            }
        }
        let cross_edges = sys
            .cross_edges(ty)
            .iter()
            .map(|&(u, a, s, w)| (u, back[&a.index()], s, w))
            .collect();
        specs.push(crate::cone::ConeTypeSpec {
            frontier: sys.frontier(ty).to_vec(),
            internal_edges,
            children: sys.children(ty).to_vec(),
            cross_edges,
        });
    }
    EndConeSystem::new(alphabet, specs, sys.root_type())
        .map_err(|e| ProductError::AlphabetClash(e.to_string()))
}

/// Inverse Schreier automaton: a total letter-to-word transducer whose
/// transitions pair up under inversion.
#[derive(Debug)]
pub struct SchreierAutomaton {
    input: Alphabet,
    output: Alphabet,
    states: Vec<String>,
    initial: usize,
    transitions: BTreeMap<(usize, Letter), (usize, Word)>,
}

impl SchreierAutomaton {
    pub fn new(
        input: Alphabet,
        output: Alphabet,
        states: Vec<String>,
        initial: usize,
        transitions: BTreeMap<(usize, Letter), (usize, Word)>,
    ) -> Result<Self, ProductError> {
        for s in &states {
            if s.contains('#') {
                return Err(ProductError::BadStateName(s.clone()));
            }
        }
        let aut = SchreierAutomaton { input, output, states, initial, transitions };
        for t in 0..aut.states.len() {
            for y in aut.input.letters() {
                let Some((t2, u)) = aut.transitions.get(&(t, y)) else {
                    return Err(ProductError::NotTotal {
                        state: t,
                        letter: aut.input.name(y).to_string(),
                    });
                };
                let back = aut.transitions.get(&(*t2, aut.input.inv(y)));
                if back != Some(&(t, aut.output.invert_word(u))) {
                    return Err(ProductError::NotInverse {
                        state: t,
                        letter: aut.input.name(y).to_string(),
                    });
                }
            }
        }
        Ok(aut)
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }
}

/// Product of an automaton with a graph: states pair with vertices, an input
/// letter moves the state and pushes the output word through the graph.
pub struct InflatedGraph {
    aut: Arc<SchreierAutomaton>,
    inner: Arc<dyn InverseGraph>,
}

pub fn inflated_graph(
    aut: Arc<SchreierAutomaton>,
    inner: Arc<dyn InverseGraph>,
) -> Result<InflatedGraph, ProductError> {
    if aut.output != *inner.alphabet() {
        return Err(ProductError::OutputMismatch);
    }
    Ok(InflatedGraph { aut, inner })
}

impl InverseGraph for InflatedGraph {
    fn alphabet(&self) -> &Alphabet {
        &self.aut.input
    }

    fn root(&self) -> VKey {
        VKey::new(format!(
            "{}#{}",
            self.aut.states[self.aut.initial],
            self.inner.root()
        ))
    }

    fn neighbor(&self, v: &VKey, y: Letter) -> Option<VKey> {
        let (state_name, inner_key) = v.as_str().split_once('#')?;
        let state = self.aut.states.iter().position(|s| s == state_name)?;
        let (next_state, out) = self.aut.transitions.get(&(state, y))?;
        let next_inner = walk(self.inner.as_ref(), &VKey::new(inner_key), out)?;
        Some(VKey::new(format!(
            "{}#{}",
            self.aut.states[*next_state],
            next_inner
        )))
    }
}

/// A graph over fresh letters `B0, B1, ...`, one per basis word, whose
/// vertices are addresses of the presented graph and whose edges apply the
/// basis words. Orbits of the subgroup generated by the basis appear as
/// connected components.
pub struct SubgroupGraph {
    sys: Arc<EndConeSystem>,
    alphabet: Alphabet,
    /// Indexed by letter: `words[2i]` is basis word `i`, `words[2i+1]` its inverse.
    words: Vec<Word>,
    root: VertexAddress,
}

impl SubgroupGraph {
    pub fn base_root(&self) -> &VertexAddress {
        &self.root
    }
}

impl InverseGraph for SubgroupGraph {
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn root(&self) -> VKey {
        self.sys.address_key(&self.root)
    }

    fn neighbor(&self, v: &VKey, b: Letter) -> Option<VKey> {
        let addr = self.sys.parse_key(v).ok()?;
        let next = self.sys.walk_address(&addr, &self.words[b.index()]).ok()?;
        Some(self.sys.address_key(&next))
    }
}

/// Build one `SubgroupGraph` per root address: the canonical instance of
/// each reachable type (shortest slot path, lexicographically least) and
/// every address within `depth` below it.
pub fn subgroup_graphs(
    sys: &Arc<EndConeSystem>,
    basis: &[Word],
    depth: usize,
) -> Result<Vec<SubgroupGraph>, ProductError> {
    for (index, w) in basis.iter().enumerate() {
        if w.iter().any(|l| l.index() >= sys.alphabet().len()) {
            return Err(ProductError::BasisLetter { index });
        }
    }
    let gen_names: Vec<String> = (0..basis.len()).map(|i| format!("B{i}")).collect();
    let name_refs: Vec<&str> = gen_names.iter().map(|s| s.as_str()).collect();
    let alphabet = Alphabet::symmetric(&name_refs);
    let mut words = Vec::with_capacity(2 * basis.len());
    for w in basis {
        words.push(w.clone());
        words.push(sys.alphabet().invert_word(w));
    }

    // Shortest slot path to each reachable type, BFS so ties go to the
    // lexicographically least path.
    let mut paths: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut queue = std::collections::VecDeque::from([(sys.root_type(), Vec::new())]);
    paths.insert(sys.root_type(), Vec::new());
    while let Some((t, path)) = queue.pop_front() {
        for (slot, &child) in sys.children(t).iter().enumerate() {
            if let std::collections::btree_map::Entry::Vacant(e) = paths.entry(child) {
                let mut p = path.clone();
                p.push(slot);
                e.insert(p.clone());
                queue.push_back((child, p));
            }
        }
    }

    let mut out = Vec::new();
    for (&ty, base_path) in &paths {
        // All addresses at most `depth` below this instance.
        let mut level = vec![(base_path.clone(), ty)];
        for offset in 0..=depth {
            for (path, t) in &level {
                for v in 0..sys.frontier(*t).len() {
                    out.push(SubgroupGraph {
                        sys: Arc::clone(sys),
                        alphabet: alphabet.clone(),
                        words: words.clone(),
                        root: VertexAddress::new(path.clone(), v),
                    });
                }
            }
            if offset == depth {
                break;
            }
            level = level
                .iter()
                .flat_map(|(path, t)| {
                    sys.children(*t).iter().enumerate().map(move |(slot, &child)| {
                        let mut p = path.clone();
                        p.push(slot);
                        (p, child)
                    })
                })
                .collect();
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples;
    use crate::graph::{accepts, scan_inverse_properties, FiniteGraph};

    #[test]
    fn alternating_word_round_trip() {
        let w = AlternatingWord {
            entries: vec![
                (Side::One, 0, VKey::new("3")),
                (Side::Two, 1, VKey::new("-2")),
            ],
        };
        let key = w.to_key();
        assert_eq!(key.as_str(), "g0:3|h1:-2");
        assert_eq!(AlternatingWord::parse(&key).unwrap(), w);
        assert_eq!(
            AlternatingWord::parse(&VKey::new("*")).unwrap(),
            AlternatingWord::root()
        );
        // Consecutive entries on one side are not alternating.
        assert!(AlternatingWord::parse(&VKey::new("g0:3|g0:2")).is_none());
    }

    #[test]
    fn comb_product_is_a_complete_inverse_graph() {
        let g = examples::comb();
        assert!(scan_inverse_properties(g.graph.as_ref(), &g.graph.root(), 4, true).is_empty());
    }

    #[test]
    fn padded_line_loops_foreign_letters() {
        let big = Alphabet::symmetric(&["a", "b"]);
        let padded = pad_graph(Arc::new(examples::line()), big.clone()).unwrap();
        let b = big.lookup("b").unwrap();
        let a = big.lookup("a").unwrap();
        let root = padded.root();
        assert_eq!(padded.neighbor(&root, b), Some(root.clone()));
        assert_eq!(padded.neighbor(&root, a), Some(VKey::new("1")));
    }

    #[test]
    fn pad_system_stays_valid() {
        let sys = examples::line_system();
        let big = sys.alphabet().extended_with(&["z"]).unwrap();
        let padded = pad_system(&sys, big.clone()).unwrap();
        assert_eq!(padded.validate(8), Vec::<String>::new());
        let arc = Arc::new(padded);
        let g = arc.as_graph();
        let z = big.lookup("z").unwrap();
        assert_eq!(g.neighbor(&g.root(), z), Some(g.root()));
    }

    #[test]
    fn inflated_line_doubles_steps() {
        // Two states; input letter y crosses between them writing a or a',
        // so the inflated graph is again a line with doubled labels removed.
        let input = Alphabet::symmetric(&["y"]);
        let output = Alphabet::symmetric(&["a"]);
        let y = input.lookup("y").unwrap();
        let yi = input.inv(y);
        let a = output.lookup("a").unwrap();
        let ai = output.inv(a);
        let mut transitions = BTreeMap::new();
        transitions.insert((0, y), (1, vec![a]));
        transitions.insert((1, y), (0, vec![a]));
        transitions.insert((0, yi), (1, vec![ai]));
        transitions.insert((1, yi), (0, vec![ai]));
        let aut = SchreierAutomaton::new(
            input,
            output,
            vec!["even".into(), "odd".into()],
            0,
            transitions,
        )
        .unwrap();
        let g = inflated_graph(Arc::new(aut), Arc::new(examples::line())).unwrap();
        let ball = FiniteGraph::ball(&g, &g.root(), 3);
        assert_eq!(ball.len(), 7);
        assert!(ball.is_complete_fragment());
        assert_eq!(g.neighbor(&g.root(), y), Some(VKey::new("odd#1")));
    }

    #[test]
    fn schreier_automaton_rejects_broken_inverse_condition() {
        let input = Alphabet::symmetric(&["y"]);
        let output = Alphabet::symmetric(&["a"]);
        let y = input.lookup("y").unwrap();
        let yi = input.inv(y);
        let a = output.lookup("a").unwrap();
        let mut transitions = BTreeMap::new();
        transitions.insert((0, y), (0, vec![a]));
        transitions.insert((0, yi), (0, vec![a]));
        let err = SchreierAutomaton::new(input, output, vec!["s".into()], 0, transitions)
            .unwrap_err();
        assert!(matches!(err, ProductError::NotInverse { .. }));
    }

    #[test]
    fn subgroup_graph_of_the_line_over_a_squared() {
        let sys = Arc::new(examples::line_system());
        let al = sys.alphabet().clone();
        let aa = al.parse_word("a a").unwrap();
        let graphs = subgroup_graphs(&sys, &[aa], 1).unwrap();
        assert!(!graphs.is_empty());
        let g = &graphs[0];
        // One generator acting as a^2 on a line: the orbit graph is a line,
        // so B0 B0' is a circuit and B0 alone is not.
        let b = g.alphabet().lookup("B0").unwrap();
        let bi = g.alphabet().inv(b);
        assert!(accepts(g, &g.root(), &[b, bi]).is_accepted());
        assert!(!accepts(g, &g.root(), &[b]).is_accepted());
    }
}
