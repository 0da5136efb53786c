//! Self-similar presentations of inverse graphs by end-cone types.
//!
//! A presentation consists of finitely many cone types. Each type carries a
//! frontier (the vertices at the cone's boundary level), internal edges
//! between frontier vertices, an ordered list of child slots naming the type
//! one level deeper, and cross edges from the frontier into child frontiers.
//! The root type plays the role of the whole graph and must have a singleton
//! frontier. Every vertex of the presented graph is addressed by the slot
//! path leading down to its cone plus a frontier vertex of that cone, and
//! graph distance from the root equals address depth.

use crate::alphabet::{Alphabet, Letter};
use crate::graph::{FiniteGraph, InverseGraph, VKey};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

/// Raw description of one cone type, before indexing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConeTypeSpec {
    /// Names of the frontier vertices, unique within the type.
    pub frontier: Vec<String>,
    /// Edges between frontier vertices: (from, letter, to).
    pub internal_edges: Vec<(usize, Letter, usize)>,
    /// Child type per slot, in slot order.
    pub children: Vec<usize>,
    /// Edges into child frontiers: (from, letter, slot, to-child-frontier-index).
    pub cross_edges: Vec<(usize, Letter, usize, usize)>,
}

/// Public view of one in-cone edge, as returned by [`EndConeSystem::edge_kind`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeKind {
    Internal { to: usize },
    Cross { slot: usize, to: usize },
}

/// Outcome of following one letter from a frontier vertex, staying inside its cone.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum StepKind {
    Internal(usize),
    Cross { slot: usize, to: usize },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SystemError {
    #[error("no cone types given")]
    Empty,
    #[error("root type index {0} out of range")]
    RootTypeRange(usize),
    #[error("type {ty}: frontier is empty")]
    EmptyFrontier { ty: usize },
    #[error("type {ty}: duplicate frontier name {name:?}")]
    DuplicateFrontierName { ty: usize, name: String },
    #[error("type {ty}: child slot {slot} names type {child} which does not exist")]
    ChildRange { ty: usize, slot: usize, child: usize },
    #[error("type {ty}: edge references frontier index {vertex} out of range")]
    VertexRange { ty: usize, vertex: usize },
    #[error("type {ty}: edge references slot {slot} out of range")]
    SlotRange { ty: usize, slot: usize },
    #[error("type {ty}: letter {letter} not in the alphabet")]
    LetterRange { ty: usize, letter: usize },
    #[error("type {ty}: two edges leave frontier vertex {vertex} with the same letter {letter}")]
    NotDeterministic { ty: usize, vertex: usize, letter: String },
    #[error("type {ty} slot {slot}: two cross edges enter child vertex {to} with the same letter")]
    AmbiguousEntry { ty: usize, slot: usize, to: usize },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AddressError {
    #[error("slot {slot} out of range for type {ty} at path position {position}")]
    BadSlot { ty: usize, slot: usize, position: usize },
    #[error("frontier index {vertex} out of range for type {ty}")]
    BadVertex { ty: usize, vertex: usize },
    #[error("letter {letter:?} leaves the root cone")]
    RootExit { letter: String },
    #[error("no edge re-enters the parent for letter {letter:?} at child vertex {vertex}")]
    MissingUpEdge { letter: String, vertex: usize },
    #[error("malformed vertex key {0:?}")]
    BadKey(String),
    #[error("unknown frontier name {name:?} in type {ty}")]
    UnknownName { ty: usize, name: String },
}

/// Address of a vertex: the slot path from the base cone down to the cone
/// holding the vertex, then the frontier index within that cone's type.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VertexAddress {
    pub path: Vec<usize>,
    pub vertex: usize,
}

impl VertexAddress {
    pub fn new(path: Vec<usize>, vertex: usize) -> Self {
        VertexAddress { path, vertex }
    }

    pub fn root() -> Self {
        VertexAddress { path: Vec::new(), vertex: 0 }
    }

    pub fn depth(&self) -> usize {
        self.path.len()
    }
}

impl fmt::Display for VertexAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, s) in self.path.iter().enumerate() {
            if k > 0 {
                write!(f, ".")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, ":{}", self.vertex)
    }
}

/// Result of one in-cone step: either a new address relative to the same
/// base type, or an escape above the base level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConeStep {
    To(VertexAddress),
    Escape,
}

/// One cone type with lookup tables built.
#[derive(Debug, Clone)]
struct ConeTypeIndexed {
    frontier: Vec<String>,
    internal_edges: Vec<(usize, Letter, usize)>,
    children: Vec<usize>,
    cross_edges: Vec<(usize, Letter, usize, usize)>,
    name_index: BTreeMap<String, usize>,
    /// (vertex, letter) -> where the edge goes, inside this cone.
    step: BTreeMap<(usize, Letter), StepKind>,
    /// Per slot: (letter taken at the child vertex, child vertex) -> parent vertex.
    /// Holds the reversed cross edges, used when a walk leaves a child cone.
    up: Vec<BTreeMap<(Letter, usize), usize>>,
}

/// A finite presentation of an inverse graph by end-cone types.
#[derive(Clone)]
pub struct EndConeSystem {
    alphabet: Alphabet,
    types: Vec<ConeTypeIndexed>,
    root_type: usize,
}

impl fmt::Debug for EndConeSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EndConeSystem")
            .field("types", &self.types.len())
            .field("root_type", &self.root_type)
            .finish()
    }
}

impl PartialEq for EndConeSystem {
    fn eq(&self, other: &Self) -> bool {
        self.to_schema() == other.to_schema()
    }
}

impl EndConeSystem {
    pub fn new(
        alphabet: Alphabet,
        specs: Vec<ConeTypeSpec>,
        root_type: usize,
    ) -> Result<Self, SystemError> {
        if specs.is_empty() {
            return Err(SystemError::Empty);
        }
        if root_type >= specs.len() {
            return Err(SystemError::RootTypeRange(root_type));
        }
        let n = specs.len();
        let mut types = Vec::with_capacity(n);
        for (ty, spec) in specs.into_iter().enumerate() {
            if spec.frontier.is_empty() {
                return Err(SystemError::EmptyFrontier { ty });
            }
            let mut name_index = BTreeMap::new();
            for (i, name) in spec.frontier.iter().enumerate() {
                if name_index.insert(name.clone(), i).is_some() {
                    return Err(SystemError::DuplicateFrontierName { ty, name: name.clone() });
                }
            }
            for (slot, &child) in spec.children.iter().enumerate() {
                if child >= n {
                    return Err(SystemError::ChildRange { ty, slot, child });
                }
            }
            let fr = spec.frontier.len();
            let check_vertex = |v: usize| {
                if v >= fr {
                    Err(SystemError::VertexRange { ty, vertex: v })
                } else {
                    Ok(())
                }
            };
            let check_letter = |a: Letter| {
                if a.index() >= alphabet.len() {
                    Err(SystemError::LetterRange { ty, letter: a.index() })
                } else {
                    Ok(())
                }
            };
            let mut step = BTreeMap::new();
            for &(u, a, v) in &spec.internal_edges {
                check_vertex(u)?;
                check_vertex(v)?;
                check_letter(a)?;
                if step.insert((u, a), StepKind::Internal(v)).is_some() {
                    return Err(SystemError::NotDeterministic {
                        ty,
                        vertex: u,
                        letter: alphabet.name(a).to_string(),
                    });
                }
            }
            let mut up: Vec<BTreeMap<(Letter, usize), usize>> =
                vec![BTreeMap::new(); spec.children.len()];
            for &(u, a, slot, w) in &spec.cross_edges {
                check_vertex(u)?;
                check_letter(a)?;
                if slot >= spec.children.len() {
                    return Err(SystemError::SlotRange { ty, slot });
                }
                if step.insert((u, a), StepKind::Cross { slot, to: w }).is_some() {
                    return Err(SystemError::NotDeterministic {
                        ty,
                        vertex: u,
                        letter: alphabet.name(a).to_string(),
                    });
                }
                // Reverse direction: at child vertex w, the inverse letter climbs back to u.
                if up[slot].insert((alphabet.inv(a), w), u).is_some() {
                    return Err(SystemError::AmbiguousEntry { ty, slot, to: w });
                }
            }
            types.push(ConeTypeIndexed {
                frontier: spec.frontier,
                internal_edges: spec.internal_edges,
                children: spec.children,
                cross_edges: spec.cross_edges,
                name_index,
                step,
                up,
            });
        }
        // Cross edge targets must lie in the named child's frontier.
        for ty in 0..n {
            for &(_, _, slot, w) in &types[ty].cross_edges {
                let child = types[ty].children[slot];
                if w >= types[child].frontier.len() {
                    return Err(SystemError::VertexRange { ty, vertex: w });
                }
            }
        }
        Ok(EndConeSystem { alphabet, types, root_type })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn root_type(&self) -> usize {
        self.root_type
    }

    pub fn type_count(&self) -> usize {
        self.types.len()
    }

    pub fn frontier(&self, ty: usize) -> &[String] {
        &self.types[ty].frontier
    }

    pub fn children(&self, ty: usize) -> &[usize] {
        &self.types[ty].children
    }

    pub fn internal_edges(&self, ty: usize) -> &[(usize, Letter, usize)] {
        &self.types[ty].internal_edges
    }

    pub fn cross_edges(&self, ty: usize) -> &[(usize, Letter, usize, usize)] {
        &self.types[ty].cross_edges
    }

    /// Letters that leave the cone at frontier vertex `v` of type `ty`.
    pub fn exit_letters(&self, ty: usize, v: usize) -> Vec<Letter> {
        self.alphabet
            .letters()
            .filter(|&a| !self.types[ty].step.contains_key(&(v, a)))
            .collect()
    }

    /// The edge out of frontier vertex `v` of type `ty` by letter `a`, if
    /// the letter stays inside the cone. `None` means `a` exits.
    pub fn edge_kind(&self, ty: usize, v: usize, a: Letter) -> Option<EdgeKind> {
        match self.types[ty].step.get(&(v, a))? {
            StepKind::Internal(w) => Some(EdgeKind::Internal { to: *w }),
            StepKind::Cross { slot, to } => Some(EdgeKind::Cross { slot: *slot, to: *to }),
        }
    }

    /// The parent-side endpoint of the exit edge that leaves vertex `v` of
    /// the child cone in `slot` of `parent_ty` by letter `a`, if defined.
    pub fn up_edge(&self, parent_ty: usize, slot: usize, a: Letter, v: usize) -> Option<usize> {
        self.types[parent_ty].up.get(slot)?.get(&(a, v)).copied()
    }

    /// Types reachable from the root type through child slots, sorted.
    pub fn reachable_types(&self) -> Vec<usize> {
        let mut seen = BTreeSet::new();
        let mut queue = vec![self.root_type];
        seen.insert(self.root_type);
        while let Some(t) = queue.pop() {
            for &c in &self.types[t].children {
                if seen.insert(c) {
                    queue.push(c);
                }
            }
        }
        seen.into_iter().collect()
    }

    /// The type reached from `base` by following a slot path.
    pub fn type_at(&self, base: usize, path: &[usize]) -> Result<usize, AddressError> {
        let mut t = base;
        for (position, &slot) in path.iter().enumerate() {
            match self.types[t].children.get(slot) {
                Some(&c) => t = c,
                None => return Err(AddressError::BadSlot { ty: t, slot, position }),
            }
        }
        Ok(t)
    }

    /// Follow one letter from an address, relative to cone type `base`.
    /// Escape means the walk left the base cone upward.
    pub fn step_in_cone(
        &self,
        base: usize,
        addr: &VertexAddress,
        a: Letter,
    ) -> Result<ConeStep, AddressError> {
        let ty = self.type_at(base, &addr.path)?;
        if addr.vertex >= self.types[ty].frontier.len() {
            return Err(AddressError::BadVertex { ty, vertex: addr.vertex });
        }
        match self.types[ty].step.get(&(addr.vertex, a)) {
            Some(StepKind::Internal(v)) => {
                Ok(ConeStep::To(VertexAddress::new(addr.path.clone(), *v)))
            }
            Some(StepKind::Cross { slot, to }) => {
                let mut path = addr.path.clone();
                path.push(*slot);
                Ok(ConeStep::To(VertexAddress::new(path, *to)))
            }
            None => {
                // Exit letter: climb to the parent cone.
                if addr.path.is_empty() {
                    return Ok(ConeStep::Escape);
                }
                let mut path = addr.path.clone();
                let slot = path.pop().expect("nonempty");
                let parent = self.type_at(base, &path)?;
                match self.types[parent].up[slot].get(&(a, addr.vertex)) {
                    Some(&u) => Ok(ConeStep::To(VertexAddress::new(path, u))),
                    None => Err(AddressError::MissingUpEdge {
                        letter: self.alphabet.name(a).to_string(),
                        vertex: addr.vertex,
                    }),
                }
            }
        }
    }

    /// Follow one letter from an address of the presented graph (base = root type).
    /// The root cone is the whole graph, so escape here means the system is
    /// incomplete; that is reported as an error by `validate`.
    pub fn step(&self, addr: &VertexAddress, a: Letter) -> Result<VertexAddress, AddressError> {
        match self.step_in_cone(self.root_type, addr, a)? {
            ConeStep::To(next) => Ok(next),
            ConeStep::Escape => Err(AddressError::RootExit {
                letter: self.alphabet.name(a).to_string(),
            }),
        }
    }

    /// Walk a whole word from an address of the presented graph.
    pub fn walk_address(
        &self,
        addr: &VertexAddress,
        word: &[Letter],
    ) -> Result<VertexAddress, AddressError> {
        let mut cur = addr.clone();
        for &a in word {
            cur = self.step(&cur, a)?;
        }
        Ok(cur)
    }

    /// Serialize an address as a vertex key: slot path, then the frontier
    /// vertex name, e.g. `0.1:q` or `:x0` for depth zero.
    pub fn address_key(&self, addr: &VertexAddress) -> VKey {
        let ty = self
            .type_at(self.root_type, &addr.path)
            .expect("address must be well formed");
        let name = &self.types[ty].frontier[addr.vertex];
        VKey(format!("{}:{}", join_path(&addr.path), name))
    }

    pub fn parse_key(&self, key: &VKey) -> Result<VertexAddress, AddressError> {
        let (path_part, name) = key
            .0
            .rsplit_once(':')
            .ok_or_else(|| AddressError::BadKey(key.0.clone()))?;
        let mut path = Vec::new();
        if !path_part.is_empty() {
            for piece in path_part.split('.') {
                let slot: usize = piece
                    .parse()
                    .map_err(|_| AddressError::BadKey(key.0.clone()))?;
                path.push(slot);
            }
        }
        let ty = self.type_at(self.root_type, &path)?;
        let vertex = *self.types[ty]
            .name_index
            .get(name)
            .ok_or_else(|| AddressError::UnknownName { ty, name: name.to_string() })?;
        Ok(VertexAddress::new(path, vertex))
    }

    /// All addresses of depth at most `d`, in breadth-first order.
    pub fn addresses_to_depth(&self, d: usize) -> Vec<VertexAddress> {
        let mut out = Vec::new();
        let mut level: Vec<(Vec<usize>, usize)> = vec![(Vec::new(), self.root_type)];
        for depth in 0..=d {
            for (path, ty) in &level {
                for v in 0..self.types[*ty].frontier.len() {
                    out.push(VertexAddress::new(path.clone(), v));
                }
            }
            if depth == d {
                break;
            }
            let mut next = Vec::new();
            for (path, ty) in &level {
                for (slot, &child) in self.types[*ty].children.iter().enumerate() {
                    let mut p = path.clone();
                    p.push(slot);
                    next.push((p, child));
                }
            }
            level = next;
        }
        out
    }

    /// Vertex counts per distance from the root, for distances 0 through
    /// `depth`. Address depth is graph distance, so the counts follow from
    /// the type recursion without building the graph: the sphere at n is
    /// the total frontier over slot paths of length n.
    pub fn sphere_sizes(&self, depth: usize) -> Vec<u128> {
        let frontier_sizes: Vec<u128> =
            self.types.iter().map(|t| t.frontier.len() as u128).collect();
        let mut at_level = vec![0u128; self.types.len()];
        at_level[self.root_type] = 1;
        let mut out = Vec::with_capacity(depth + 1);
        for _ in 0..=depth {
            out.push(
                at_level.iter().zip(&frontier_sizes).map(|(n, f)| n * f).sum(),
            );
            let mut next = vec![0u128; self.types.len()];
            for (ty, &n) in at_level.iter().enumerate() {
                for &child in &self.types[ty].children {
                    next[child] += n;
                }
            }
            at_level = next;
        }
        out
    }

    /// View the presented graph through the `InverseGraph` interface.
    pub fn as_graph(self: &Arc<Self>) -> ConeGraph {
        ConeGraph { sys: Arc::clone(self) }
    }

    pub fn to_schema(&self) -> SystemSchema {
        SystemSchema {
            alphabet: (&self.alphabet).into(),
            root_type: self.root_type,
            types: self
                .types
                .iter()
                .map(|t| TypeSchema {
                    frontier: t.frontier.clone(),
                    internal_edges: t
                        .internal_edges
                        .iter()
                        .map(|&(u, a, v)| (u, self.alphabet.name(a).to_string(), v))
                        .collect(),
                    children: t.children.clone(),
                    cross_edges: t
                        .cross_edges
                        .iter()
                        .map(|&(u, a, s, w)| (u, self.alphabet.name(a).to_string(), s, w))
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_schema()).expect("schema serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, String> {
        let schema: SystemSchema =
            serde_json::from_str(text).map_err(|e| format!("bad system JSON: {e}"))?;
        schema.try_into()
    }

    /// Check the presentation invariants. Returns a list of human-readable
    /// violations; an empty list means the system is valid. `scan_radius`
    /// controls how far the realized graph is explored for the dynamic
    /// checks (determinism, involutivity, completeness, depth = distance).
    pub fn validate(&self, scan_radius: u32) -> Vec<String> {
        let mut out = Vec::new();
        if self.types[self.root_type].frontier.len() != 1 {
            out.push(format!(
                "root type {} must have a singleton frontier, found {}",
                self.root_type,
                self.types[self.root_type].frontier.len()
            ));
        }
        let reachable: BTreeSet<usize> = self.reachable_types().into_iter().collect();
        for ty in 0..self.types.len() {
            if !reachable.contains(&ty) {
                out.push(format!("type {ty} is unreachable from the root type"));
            }
        }
        // Internal edges must close under inversion.
        for (ty, t) in self.types.iter().enumerate() {
            for &(u, a, v) in &t.internal_edges {
                let back = t.step.get(&(v, self.alphabet.inv(a)));
                if back != Some(&StepKind::Internal(u)) {
                    out.push(format!(
                        "type {ty}: internal edge {u} -{}-> {v} has no inverse edge",
                        self.alphabet.name(a)
                    ));
                }
            }
            for (slot, &child) in t.children.iter().enumerate() {
                if !t.cross_edges.iter().any(|&(_, _, s, _)| s == slot) {
                    out.push(format!(
                        "type {ty}: slot {slot} (type {child}) receives no cross edge"
                    ));
                }
            }
        }
        // Exit letters must match entry letters in every parent context, and
        // the root vertex must have none at all.
        let root_exits = self.exit_letters(self.root_type, 0);
        if !root_exits.is_empty() {
            let names: Vec<_> = root_exits.iter().map(|&a| self.alphabet.name(a)).collect();
            out.push(format!(
                "root frontier vertex has exit letters {:?}; the presented graph would be incomplete",
                names
            ));
        }
        for (ty, t) in self.types.iter().enumerate() {
            for (slot, &child) in t.children.iter().enumerate() {
                for w in 0..self.types[child].frontier.len() {
                    let expected: BTreeSet<Letter> =
                        self.exit_letters(child, w).into_iter().collect();
                    let entering: BTreeSet<Letter> = t
                        .cross_edges
                        .iter()
                        .filter(|&&(_, _, s, to)| s == slot && to == w)
                        .map(|&(_, a, _, _)| self.alphabet.inv(a))
                        .collect();
                    if expected != entering {
                        let show = |set: &BTreeSet<Letter>| {
                            set.iter().map(|&a| self.alphabet.name(a).to_string()).collect::<Vec<_>>()
                        };
                        out.push(format!(
                            "type {ty} slot {slot}: child vertex {w} exits on {:?} but is entered on {:?}",
                            show(&expected),
                            show(&entering)
                        ));
                    }
                }
            }
        }
        if !out.is_empty() {
            return out;
        }
        // Dynamic scan of the realized graph.
        let sys = Arc::new(self.clone());
        let graph = sys.as_graph();
        out.extend(crate::graph::scan_inverse_properties(
            &graph,
            &graph.root(),
            scan_radius,
            true,
        ));
        let ball = FiniteGraph::ball(&graph, &graph.root(), scan_radius);
        for v in ball.vertices() {
            match self.parse_key(v) {
                Ok(addr) => {
                    let dist = ball.distance(v).expect("ball vertex");
                    if addr.depth() as u32 != dist {
                        out.push(format!(
                            "vertex {v} has depth {} but graph distance {dist}",
                            addr.depth()
                        ));
                    }
                }
                Err(e) => out.push(format!("vertex key {v} does not parse: {e}")),
            }
        }
        out
    }
}

fn join_path(path: &[usize]) -> String {
    let mut s = String::new();
    for (k, slot) in path.iter().enumerate() {
        if k > 0 {
            s.push('.');
        }
        s.push_str(&slot.to_string());
    }
    s
}

/// The graph presented by an end-cone system, explored lazily by address.
#[derive(Clone)]
pub struct ConeGraph {
    sys: Arc<EndConeSystem>,
}

impl ConeGraph {
    pub fn system(&self) -> &Arc<EndConeSystem> {
        &self.sys
    }
}

impl InverseGraph for ConeGraph {
    fn alphabet(&self) -> &Alphabet {
        self.sys.alphabet()
    }

    fn root(&self) -> VKey {
        self.sys.address_key(&VertexAddress::root())
    }

    fn neighbor(&self, v: &VKey, a: Letter) -> Option<VKey> {
        let addr = self.sys.parse_key(v).ok()?;
        let next = self.sys.step(&addr, a).ok()?;
        Some(self.sys.address_key(&next))
    }
}

/// Outcome of checking a presentation against a reference graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VerifyOutcome {
    Verified { radius: u32, ball_size: usize },
    Mismatch { detail: String },
}

impl VerifyOutcome {
    pub fn is_verified(&self) -> bool {
        matches!(self, VerifyOutcome::Verified { .. })
    }
}

/// Compare the graph presented by `sys` against `reference` out to `radius`:
/// root-preserving label morphisms are propagated in both directions, which
/// pins down an isomorphism of the radius-`radius` balls when both succeed.
pub fn verify_presentation(
    sys: &Arc<EndConeSystem>,
    reference: &dyn InverseGraph,
    radius: u32,
) -> VerifyOutcome {
    use crate::graph::MorphismResult;
    let presented = sys.as_graph();
    if presented.alphabet() != reference.alphabet() {
        return VerifyOutcome::Mismatch {
            detail: "alphabets differ".to_string(),
        };
    }
    let forward = crate::graph::propagate_morphism(
        &presented,
        &presented.root(),
        reference,
        &reference.root(),
        radius,
    );
    if let MorphismResult::Conflict { at, letter, detail } = forward {
        return VerifyOutcome::Mismatch {
            detail: format!("presented -> reference fails at {at} on {letter}: {detail}"),
        };
    }
    let backward = crate::graph::propagate_morphism(
        reference,
        &reference.root(),
        &presented,
        &presented.root(),
        radius,
    );
    if let MorphismResult::Conflict { at, letter, detail } = backward {
        return VerifyOutcome::Mismatch {
            detail: format!("reference -> presented fails at {at} on {letter}: {detail}"),
        };
    }
    let ball = FiniteGraph::ball(&presented, &presented.root(), radius);
    VerifyOutcome::Verified { radius, ball_size: ball.len() }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemSchema {
    pub alphabet: crate::alphabet::AlphabetSchema,
    pub root_type: usize,
    pub types: Vec<TypeSchema>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeSchema {
    pub frontier: Vec<String>,
    pub internal_edges: Vec<(usize, String, usize)>,
    pub children: Vec<usize>,
    pub cross_edges: Vec<(usize, String, usize, usize)>,
}

impl TryFrom<SystemSchema> for EndConeSystem {
    type Error = String;

    fn try_from(schema: SystemSchema) -> Result<Self, String> {
        let alphabet: Alphabet = schema
            .alphabet
            .try_into()
            .map_err(|e: crate::alphabet::AlphabetError| e.to_string())?;
        let mut specs = Vec::new();
        for (ty, t) in schema.types.into_iter().enumerate() {
            let resolve = |name: &str| {
                alphabet
                    .lookup(name)
                    .ok_or_else(|| format!("type {ty}: unknown letter {name:?}"))
            };
            let mut internal_edges = Vec::new();
            for (u, a, v) in &t.internal_edges {
                internal_edges.push((*u, resolve(a)?, *v));
            }
            let mut cross_edges = Vec::new();
            for (u, a, s, w) in &t.cross_edges {
                cross_edges.push((*u, resolve(a)?, *s, *w));
            }
            specs.push(ConeTypeSpec {
                frontier: t.frontier,
                internal_edges,
                children: t.children,
                cross_edges,
            });
        }
        EndConeSystem::new(alphabet, specs, schema.root_type).map_err(|e| e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples;

    #[test]
    fn line_system_is_valid_and_presents_the_line() {
        let sys = Arc::new(examples::line_system());
        assert_eq!(sys.validate(10), Vec::<String>::new());
        let outcome = verify_presentation(&sys, &examples::line(), 12);
        assert!(outcome.is_verified(), "{outcome:?}");
    }

    #[test]
    fn cycle_system_is_valid_and_presents_the_cycle() {
        let sys = Arc::new(examples::cycle_system());
        assert_eq!(sys.validate(10), Vec::<String>::new());
        let outcome = verify_presentation(&sys, &examples::cycle(5), 12);
        assert!(outcome.is_verified(), "{outcome:?}");
    }

    #[test]
    fn line_system_rejects_wrong_reference() {
        let sys = Arc::new(examples::line_system());
        let outcome = verify_presentation(&sys, &examples::cycle(5), 12);
        assert!(!outcome.is_verified());
    }

    #[test]
    fn addresses_round_trip_through_keys() {
        let sys = Arc::new(examples::tree_system(2));
        for addr in sys.addresses_to_depth(4) {
            let key = sys.address_key(&addr);
            assert_eq!(sys.parse_key(&key).unwrap(), addr);
        }
    }

    #[test]
    fn depth_equals_distance_on_the_tree() {
        let sys = Arc::new(examples::tree_system(2));
        assert_eq!(sys.validate(8), Vec::<String>::new());
    }

    #[test]
    fn json_round_trip_is_exact() {
        let sys = examples::omega_system();
        let text = sys.to_json();
        let back = EndConeSystem::from_json(&text).unwrap();
        assert_eq!(sys, back);
        assert_eq!(text, back.to_json());
    }

    #[test]
    fn exit_consistency_violation_is_reported() {
        // A child vertex entered on a letter it can also consume internally:
        // the entry set and exit set disagree.
        let al = Alphabet::symmetric(&["a"]);
        let a = al.lookup("a").unwrap();
        let a_inv = al.inv(a);
        let root = ConeTypeSpec {
            frontier: vec!["x0".to_string()],
            internal_edges: vec![],
            children: vec![1],
            cross_edges: vec![(0, a, 0, 0), (0, a_inv, 0, 0)],
        };
        let child = ConeTypeSpec {
            frontier: vec!["p".to_string()],
            internal_edges: vec![(0, a, 0), (0, a_inv, 0)],
            children: vec![],
            cross_edges: vec![],
        };
        let sys = EndConeSystem::new(al, vec![root, child], 0).unwrap();
        let violations = sys.validate(4);
        assert!(
            violations.iter().any(|v| v.contains("exits on")),
            "{violations:?}"
        );
    }

    #[test]
    fn escape_is_reported_when_walking_above_the_base_cone() {
        let sys = Arc::new(examples::line_system());
        let al = sys.alphabet().clone();
        let a = al.lookup("a").unwrap();
        // Pick any non-root type and exit its cone through the root side.
        let non_root = (0..sys.type_count()).find(|&t| t != sys.root_type()).unwrap();
        let addr = VertexAddress::root();
        let mut escaped = false;
        for letter in [a, al.inv(a)] {
            if let Ok(ConeStep::Escape) = sys.step_in_cone(non_root, &addr, letter) {
                escaped = true;
            }
        }
        assert!(escaped, "a line cone must have an exit letter at its frontier");
    }
}
