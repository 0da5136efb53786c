//! Inverse graphs presented lazily by a neighbor function, plus finite
//! materialized balls, walks, sphere counts, and morphism propagation.
//!
//! An inverse graph is a connected edge-labeled digraph over an involutive
//! alphabet that is deterministic (at most one `a`-edge out of each vertex)
//! and involutive (an `a`-edge from `u` to `v` forces the `inv(a)`-edge from
//! `v` to `u`). It is complete when every letter is defined at every vertex.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::alphabet::{Alphabet, Letter};

/// Canonical vertex token. Each graph implementation documents its own key
/// syntax; keys are totally ordered and serializable.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct VKey(pub String);

impl VKey {
    pub fn new(s: impl Into<String>) -> Self {
        VKey(s.into())
    }
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for VKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Rooted inverse graph given by a neighbor oracle.
pub trait InverseGraph: Send + Sync {
    fn alphabet(&self) -> &Alphabet;
    fn root(&self) -> VKey;
    /// The endpoint of the `a`-edge at `v`, or `None` where the graph is
    /// incomplete.
    fn neighbor(&self, v: &VKey, a: Letter) -> Option<VKey>;
}

/// Follow `word` from `from`; `None` as soon as a step is undefined.
pub fn walk(g: &dyn InverseGraph, from: &VKey, word: &[Letter]) -> Option<VKey> {
    let mut v = from.clone();
    for &a in word {
        v = g.neighbor(&v, a)?;
    }
    Some(v)
}

/// Outcome of testing `w` against the circuit language at `x0`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Accepts {
    /// The walk exists and returns to `x0`.
    Accepted,
    /// The walk exists and ends elsewhere.
    Rejected { end: VKey },
    /// Some step is undefined (incomplete graph).
    Undefined { after: usize },
}

impl Accepts {
    pub fn is_accepted(&self) -> bool {
        matches!(self, Accepts::Accepted)
    }
}

/// Membership of `w` in `L(g, x0)`, the set of words labeling circuits at `x0`.
pub fn accepts(g: &dyn InverseGraph, x0: &VKey, w: &[Letter]) -> Accepts {
    let mut v = x0.clone();
    for (i, &a) in w.iter().enumerate() {
        match g.neighbor(&v, a) {
            Some(next) => v = next,
            None => return Accepts::Undefined { after: i },
        }
    }
    if &v == x0 {
        Accepts::Accepted
    } else {
        Accepts::Rejected { end: v }
    }
}

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("vertex {0} duplicated in edge list with conflicting {1}-edges")]
    NotDeterministic(VKey, String),
    #[error("edge {0} -{1}-> {2} lacks its involutive partner")]
    NotInvolutive(VKey, String, VKey),
    #[error("vertex {0} is not reachable from the root")]
    Unreachable(VKey),
    #[error("root {0} missing from vertex set")]
    MissingRoot(VKey),
}

/// A finite inverse-graph fragment: either a materialized ball of a lazy
/// graph or an explicitly given finite graph.
#[derive(Clone, Debug)]
pub struct FiniteGraph {
    alphabet: Alphabet,
    vertices: Vec<VKey>,
    index: BTreeMap<VKey, usize>,
    root: usize,
    dist: Vec<u32>,
    edges: BTreeMap<(usize, Letter), usize>,
    /// `(v, a)` pairs inside the fragment whose `a`-edge is undefined in the
    /// source graph (as opposed to merely leaving the fragment).
    missing: Vec<(usize, Letter)>,
    radius: u32,
}

impl FiniteGraph {
    /// Materialize the ball of radius `r` around `center`.
    pub fn ball(g: &dyn InverseGraph, center: &VKey, r: u32) -> FiniteGraph {
        let mut vertices = vec![center.clone()];
        let mut index = BTreeMap::new();
        index.insert(center.clone(), 0usize);
        let mut dist = vec![0u32];
        let mut missing = Vec::new();
        let mut queue = VecDeque::new();
        queue.push_back(0usize);
        while let Some(u) = queue.pop_front() {
            if dist[u] == r {
                continue;
            }
            for a in g.alphabet().letters() {
                match g.neighbor(&vertices[u], a) {
                    Some(w) => {
                        if !index.contains_key(&w) {
                            let id = vertices.len();
                            index.insert(w.clone(), id);
                            vertices.push(w);
                            dist.push(dist[u] + 1);
                            queue.push_back(id);
                        }
                    }
                    None => missing.push((u, a)),
                }
            }
        }
        // Edge pass: record every edge with both endpoints in the ball, and
        // undefined letters at boundary vertices (skipped by the BFS pass).
        let mut edges = BTreeMap::new();
        for u in 0..vertices.len() {
            for a in g.alphabet().letters() {
                match g.neighbor(&vertices[u], a) {
                    Some(w) => {
                        if let Some(&wi) = index.get(&w) {
                            edges.insert((u, a), wi);
                        }
                    }
                    None => {
                        if dist[u] == r {
                            missing.push((u, a));
                        }
                    }
                }
            }
        }
        missing.sort();
        missing.dedup();
        FiniteGraph {
            alphabet: g.alphabet().clone(),
            vertices,
            index,
            root: 0,
            dist,
            edges,
            missing,
            radius: r,
        }
    }

    /// Build from an explicit edge list; checks determinism and the
    /// involutive edge symmetry, and that every vertex is reachable from the
    /// root.
    pub fn from_edges(
        alphabet: Alphabet,
        root: VKey,
        edge_list: &[(VKey, Letter, VKey)],
    ) -> Result<FiniteGraph, GraphError> {
        let mut vertices: Vec<VKey> = Vec::new();
        let mut index: BTreeMap<VKey, usize> = BTreeMap::new();
        let intern = |k: &VKey, vertices: &mut Vec<VKey>, index: &mut BTreeMap<VKey, usize>| {
            *index.entry(k.clone()).or_insert_with(|| {
                vertices.push(k.clone());
                vertices.len() - 1
            })
        };
        let mut edges: BTreeMap<(usize, Letter), usize> = BTreeMap::new();
        for (u, a, v) in edge_list {
            let ui = intern(u, &mut vertices, &mut index);
            let vi = intern(v, &mut vertices, &mut index);
            if let Some(&prev) = edges.get(&(ui, *a)) {
                if prev != vi {
                    return Err(GraphError::NotDeterministic(
                        u.clone(),
                        alphabet.name(*a).to_string(),
                    ));
                }
            }
            edges.insert((ui, *a), vi);
        }
        for (&(ui, a), &vi) in edges.clone().iter() {
            let back = edges.get(&(vi, alphabet.inv(a)));
            if back != Some(&ui) {
                return Err(GraphError::NotInvolutive(
                    vertices[ui].clone(),
                    alphabet.name(a).to_string(),
                    vertices[vi].clone(),
                ));
            }
        }
        let root_ix = *index.get(&root).ok_or(GraphError::MissingRoot(root.clone()))?;
        // BFS distances from the root; inverse graphs are connected.
        let mut dist = vec![u32::MAX; vertices.len()];
        dist[root_ix] = 0;
        let mut queue = VecDeque::from([root_ix]);
        while let Some(u) = queue.pop_front() {
            for a in alphabet.letters() {
                if let Some(&v) = edges.get(&(u, a)) {
                    if dist[v] == u32::MAX {
                        dist[v] = dist[u] + 1;
                        queue.push_back(v);
                    }
                }
            }
        }
        if let Some(u) = (0..vertices.len()).find(|&u| dist[u] == u32::MAX) {
            return Err(GraphError::Unreachable(vertices[u].clone()));
        }
        let radius = dist.iter().copied().max().unwrap_or(0);
        let mut missing = Vec::new();
        for u in 0..vertices.len() {
            for a in alphabet.letters() {
                if !edges.contains_key(&(u, a)) {
                    missing.push((u, a));
                }
            }
        }
        Ok(FiniteGraph {
            alphabet,
            vertices,
            index,
            root: root_ix,
            dist,
            edges,
            missing,
            radius,
        })
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn vertices(&self) -> &[VKey] {
        &self.vertices
    }

    pub fn distance(&self, v: &VKey) -> Option<u32> {
        self.index.get(v).map(|&i| self.dist[i])
    }

    /// Vertices at exactly distance `n` from the center, in key order of
    /// discovery (BFS order).
    pub fn sphere(&self, n: u32) -> Vec<&VKey> {
        (0..self.vertices.len())
            .filter(|&i| self.dist[i] == n)
            .map(|i| &self.vertices[i])
            .collect()
    }

    pub fn sphere_size(&self, n: u32) -> usize {
        self.dist.iter().filter(|&&d| d == n).count()
    }

    /// `(v, a)` pairs with no `a`-edge in the source graph. Empty for balls
    /// of complete graphs.
    pub fn missing_pairs(&self) -> Vec<(VKey, String)> {
        self.missing
            .iter()
            .map(|&(u, a)| (self.vertices[u].clone(), self.alphabet.name(a).to_string()))
            .collect()
    }

    pub fn is_complete_fragment(&self) -> bool {
        self.missing.is_empty()
    }

    /// GraphViz rendering with edge labels; the root is double-circled.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph ball {\n  rankdir=LR;\n  node [shape=circle];\n");
        for (i, v) in self.vertices.iter().enumerate() {
            let extra = if i == self.root { ", peripheries=2" } else { "" };
            s.push_str(&format!(
                "  n{} [label=\"{}\"{}];\n",
                i,
                escape_dot(v.as_str()),
                extra
            ));
        }
        for (&(u, a), &v) in &self.edges {
            s.push_str(&format!(
                "  n{} -> n{} [label=\"{}\"];\n",
                u,
                v,
                escape_dot(self.alphabet.name(a))
            ));
        }
        s.push_str("}\n");
        s
    }

    /// Stable adjacency JSON: vertices sorted by (distance, key), edge maps
    /// keyed by letter name.
    pub fn to_json(&self) -> serde_json::Value {
        let mut order: Vec<usize> = (0..self.vertices.len()).collect();
        order.sort_by(|&i, &j| {
            (self.dist[i], &self.vertices[i]).cmp(&(self.dist[j], &self.vertices[j]))
        });
        let verts: Vec<serde_json::Value> = order
            .iter()
            .map(|&i| {
                let mut adj = BTreeMap::new();
                for a in self.alphabet.letters() {
                    if let Some(&v) = self.edges.get(&(i, a)) {
                        adj.insert(
                            self.alphabet.name(a).to_string(),
                            self.vertices[v].as_str().to_string(),
                        );
                    }
                }
                serde_json::json!({
                    "key": self.vertices[i].as_str(),
                    "distance": self.dist[i],
                    "edges": adj,
                })
            })
            .collect();
        serde_json::json!({
            "root": self.vertices[self.root].as_str(),
            "radius": self.radius,
            "vertex_count": self.vertices.len(),
            "complete": self.missing.is_empty(),
            "vertices": verts,
        })
    }
}

fn escape_dot(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

impl InverseGraph for FiniteGraph {
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }
    fn root(&self) -> VKey {
        self.vertices[self.root].clone()
    }
    fn neighbor(&self, v: &VKey, a: Letter) -> Option<VKey> {
        let &i = self.index.get(v)?;
        self.edges.get(&(i, a)).map(|&j| self.vertices[j].clone())
    }
}

/// Materialize the ball of radius `r` around `center`.
pub fn expand_ball(g: &dyn InverseGraph, center: &VKey, r: u32) -> FiniteGraph {
    FiniteGraph::ball(g, center, r)
}

/// Sphere cardinalities `|S_0|..=|S_r|` around `center`.
pub fn sphere_sizes(g: &dyn InverseGraph, center: &VKey, r: u32) -> Vec<usize> {
    let ball = FiniteGraph::ball(g, center, r);
    (0..=r).map(|n| ball.sphere_size(n)).collect()
}

/// Result of propagating a vertex assignment to a label-preserving morphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MorphismResult {
    /// Every edge of the source ball is matched; the map sends each source
    /// ball vertex to its image.
    Morphism(BTreeMap<VKey, VKey>),
    /// First obstruction found, in BFS order.
    Conflict {
        at: VKey,
        letter: String,
        detail: String,
    },
}

impl MorphismResult {
    pub fn is_morphism(&self) -> bool {
        matches!(self, MorphismResult::Morphism(_))
    }
}

/// Propagate `src_root -> image` to a label-preserving morphism of the
/// radius-`r` ball of `src` into `dst`. There is at most one such morphism;
/// the propagation is forced edge by edge and reports the first conflict.
/// Every edge with both endpoints inside the source ball must be matched in
/// `dst`.
pub fn propagate_morphism(
    src: &dyn InverseGraph,
    src_root: &VKey,
    dst: &dyn InverseGraph,
    image: &VKey,
    r: u32,
) -> MorphismResult {
    let ball = FiniteGraph::ball(src, src_root, r);
    let mut map: BTreeMap<VKey, VKey> = BTreeMap::new();
    map.insert(src_root.clone(), image.clone());
    // BFS order of the ball; vertices[0] is src_root.
    for u in 0..ball.vertices.len() {
        let uk = &ball.vertices[u];
        let phi_u = map.get(uk).expect("BFS order maps parents first").clone();
        for a in src.alphabet().letters() {
            let Some(&w) = ball.edges.get(&(u, a)) else { continue };
            let wk = &ball.vertices[w];
            let img = match dst.neighbor(&phi_u, a) {
                Some(img) => img,
                None => {
                    return MorphismResult::Conflict {
                        at: uk.clone(),
                        letter: src.alphabet().name(a).to_string(),
                        detail: format!("edge to {wk} has no image at {phi_u}"),
                    }
                }
            };
            match map.get(wk) {
                None => {
                    map.insert(wk.clone(), img);
                }
                Some(prev) if *prev == img => {}
                Some(prev) => {
                    return MorphismResult::Conflict {
                        at: uk.clone(),
                        letter: src.alphabet().name(a).to_string(),
                        detail: format!("image of {wk} forced to both {prev} and {img}"),
                    }
                }
            }
        }
    }
    MorphismResult::Morphism(map)
}

/// Scan the radius-`r` ball for violations of determinism, the involutive
/// edge symmetry, and (when `require_complete`) completeness. Returns
/// human-readable violation descriptions; empty means the ball is a valid
/// (complete) inverse-graph fragment.
pub fn scan_inverse_properties(
    g: &dyn InverseGraph,
    center: &VKey,
    r: u32,
    require_complete: bool,
) -> Vec<String> {
    let ball = FiniteGraph::ball(g, center, r);
    let mut out = Vec::new();
    for u in 0..ball.vertices.len() {
        let uk = &ball.vertices[u];
        for a in g.alphabet().letters() {
            match g.neighbor(uk, a) {
                None => {
                    if require_complete {
                        out.push(format!("missing {}-edge at {uk}", g.alphabet().name(a)));
                    }
                }
                // Determinism is structural for neighbor functions; the
                // breakable half is the involutive symmetry, which also
                // forces injectivity of `a`-edges into each vertex.
                Some(w) => match g.neighbor(&w, g.alphabet().inv(a)) {
                    Some(back) if back == *uk => {}
                    Some(back) => out.push(format!(
                        "involution broken: {uk} -{}-> {w} -{}-> {back}",
                        g.alphabet().name(a),
                        g.alphabet().name(g.alphabet().inv(a)),
                    )),
                    None => out.push(format!(
                        "involution broken: {uk} -{}-> {w} has no edge back",
                        g.alphabet().name(a),
                    )),
                },
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::{cycle, line};

    #[test]
    fn line_ball_and_spheres() {
        let g = line();
        let ball = FiniteGraph::ball(&g, &g.root(), 3);
        assert_eq!(ball.len(), 7);
        assert_eq!(ball.sphere_size(0), 1);
        assert_eq!(ball.sphere_size(3), 2);
        assert!(ball.is_complete_fragment());
    }

    #[test]
    fn walk_and_accepts_on_line() {
        let g = line();
        let al = g.alphabet().clone();
        let w = al.parse_word("a a a'").unwrap();
        assert_eq!(walk(&g, &g.root(), &w), Some(VKey::new("1")));
        let circuit = al.parse_word("a a'").unwrap();
        assert!(accepts(&g, &g.root(), &circuit).is_accepted());
        let not = al.parse_word("a").unwrap();
        assert!(matches!(accepts(&g, &g.root(), &not), Accepts::Rejected { .. }));
    }

    #[test]
    fn cycle_ball_saturates() {
        let g = cycle(5);
        let ball = FiniteGraph::ball(&g, &g.root(), 10);
        assert_eq!(ball.len(), 5);
        assert_eq!(ball.radius(), 10);
        assert_eq!(ball.sphere_size(2), 2);
        assert_eq!(ball.sphere_size(3), 0);
    }

    #[test]
    fn morphism_direction_matters_between_line_and_cycle() {
        let line = line();
        let c5 = cycle(5);
        // Reduction mod 5 is a covering morphism, so the line maps onto the
        // cycle at every radius.
        let ok = propagate_morphism(&line, &line.root(), &c5, &c5.root(), 3);
        assert!(ok.is_morphism());
        // The other direction closes the cycle: once the ball holds all five
        // vertices the chord forces one vertex onto two line vertices.
        let small = propagate_morphism(&c5, &c5.root(), &line, &line.root(), 1);
        assert!(small.is_morphism());
        let bad = propagate_morphism(&c5, &c5.root(), &line, &line.root(), 2);
        assert!(!bad.is_morphism());
    }

    #[test]
    fn scan_accepts_line() {
        let g = line();
        assert!(scan_inverse_properties(&g, &g.root(), 4, true).is_empty());
    }

    #[test]
    fn from_edges_rejects_broken_involution() {
        let al = Alphabet::symmetric(&["a"]);
        let a = al.lookup("a").unwrap();
        let err = FiniteGraph::from_edges(
            al.clone(),
            VKey::new("u"),
            &[(VKey::new("u"), a, VKey::new("v"))],
        )
        .unwrap_err();
        assert!(matches!(err, GraphError::NotInvolutive(..)));
    }

    #[test]
    fn dot_marks_root() {
        let g = cycle(3);
        let ball = FiniteGraph::ball(&g, &g.root(), 2);
        let dot = ball.to_dot();
        assert!(dot.contains("peripheries=2"));
        assert!(dot.contains("label=\"a\""));
    }
}
