//! Reconstruction of a presentation from a ball of an inverse graph.
//!
//! Vertices at distance n from the root are grouped into cone pieces: the
//! component of the band of levels n through n + s containing the vertex.
//! Pieces are classified up to labeled isomorphism by a canonical
//! serialization, the classification is required to be stable against
//! deepening s by one, and a presentation is assembled from one shallow
//! representative per class. The assembly is trusted only after
//! [`verify_presentation`] certifies it against the graph, so a truncation
//! depth that is too small yields an error, never a wrong answer.

use crate::alphabet::Alphabet;
use crate::cone::{ConeTypeSpec, EndConeSystem, SystemError, VerifyOutcome};
use crate::graph::{FiniteGraph, InverseGraph, VKey};
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum InferError {
    #[error("need radius >= depth + 2 (got radius {radius}, depth {depth})")]
    TooShallow { radius: usize, depth: usize },
    #[error("classification is not stable from depth {depth} to {}: {detail}", depth + 1)]
    NotStabilized { depth: usize, detail: String },
    #[error("a class first appears at level {level}, too deep to expand within radius {radius}")]
    ClassTooDeep { level: usize, radius: usize },
    #[error("assembled presentation is malformed: {0}")]
    System(#[from] SystemError),
    #[error("assembled presentation failed certification: {0}")]
    NotCertified(String),
}

/// One cone piece: a band component with its frontier in canonical order.
struct Piece {
    level: usize,
    /// Frontier vertices in discovery order of the minimal serialization.
    frontier: Vec<VKey>,
}

/// Classification of every vertex within `max_level` at one truncation depth.
struct Typing {
    /// Piece containing each vertex, at the vertex's own level.
    piece_of: BTreeMap<VKey, usize>,
    pieces: Vec<Piece>,
    class_of_piece: Vec<usize>,
    /// Serialization of each vertex's piece started at that vertex.
    self_code: BTreeMap<VKey, String>,
}

/// Serialize the band component of `start` by letter-ordered breadth-first
/// search. The string captures relative levels and, per vertex and letter,
/// the discovery number of the neighbor, X for an exit above the band, or D
/// for a neighbor below the truncation horizon.
pub(crate) fn piece_code(
    ball: &FiniteGraph,
    al: &Alphabet,
    start: &VKey,
    level: usize,
    depth: usize,
) -> (String, Vec<VKey>) {
    let floor = level as u32;
    let horizon = (level + depth) as u32;
    let mut number: BTreeMap<VKey, usize> = BTreeMap::new();
    let mut order: Vec<VKey> = Vec::new();
    let mut code = String::new();
    number.insert(start.clone(), 0);
    order.push(start.clone());
    let mut at = 0;
    while at < order.len() {
        let u = order[at].clone();
        at += 1;
        let lu = ball.distance(&u).expect("in ball");
        code.push_str(&format!("L{};", lu - floor));
        for a in al.letters() {
            match ball.neighbor(&u, a) {
                None => code.push('?'),
                Some(w) => {
                    let lw = ball.distance(&w).expect("in ball");
                    if lw < floor {
                        code.push('X');
                    } else if lw > horizon {
                        code.push('D');
                    } else {
                        let next = number.len();
                        let n = *number.entry(w.clone()).or_insert_with(|| {
                            order.push(w.clone());
                            next
                        });
                        code.push_str(&n.to_string());
                    }
                }
            }
            code.push(',');
        }
        code.push('|');
    }
    let frontier = order
        .iter()
        .filter(|v| ball.distance(v) == Some(floor))
        .cloned()
        .collect();
    (code, frontier)
}

fn typing(ball: &FiniteGraph, al: &Alphabet, depth: usize, max_level: usize) -> Typing {
    let mut t = Typing {
        piece_of: BTreeMap::new(),
        pieces: Vec::new(),
        class_of_piece: Vec::new(),
        self_code: BTreeMap::new(),
    };
    let mut classes: BTreeMap<String, usize> = BTreeMap::new();
    for v in ball.vertices() {
        let level = ball.distance(v).expect("in ball") as usize;
        if level > max_level || t.piece_of.contains_key(v) {
            continue;
        }
        // Collect the band component of v, then serialize it from each
        // frontier vertex; the minimal code names the class, and ties go
        // to the smallest starting key so the frontier order is stable.
        let members = band_component(ball, al, v, level, depth);
        let piece_id = t.pieces.len();
        let mut best: Option<(String, Vec<VKey>)> = None;
        for u in &members {
            if ball.distance(u) != Some(level as u32) {
                continue;
            }
            let (code, frontier) = piece_code(ball, al, u, level, depth);
            t.self_code.insert(u.clone(), code.clone());
            if best.as_ref().is_none_or(|(b, _)| code < *b) {
                best = Some((code, frontier));
            }
        }
        let (canon, frontier) = best.expect("v itself is at the frontier");
        for u in &members {
            if ball.distance(u) == Some(level as u32) {
                t.piece_of.insert(u.clone(), piece_id);
            }
        }
        let class_count = classes.len();
        let class = *classes.entry(canon).or_insert(class_count);
        t.pieces.push(Piece { level, frontier });
        t.class_of_piece.push(class);
    }
    t
}

pub(crate) fn band_component(
    ball: &FiniteGraph,
    al: &Alphabet,
    start: &VKey,
    level: usize,
    depth: usize,
) -> BTreeSet<VKey> {
    let floor = level as u32;
    let horizon = (level + depth) as u32;
    let mut seen = BTreeSet::from([start.clone()]);
    let mut queue = VecDeque::from([start.clone()]);
    while let Some(u) = queue.pop_front() {
        for a in al.letters() {
            if let Some(w) = ball.neighbor(&u, a) {
                let lw = ball.distance(&w).expect("in ball");
                if lw >= floor && lw <= horizon && seen.insert(w.clone()) {
                    queue.push_back(w);
                }
            }
        }
    }
    seen
}

/// Reconstruct a presentation of `g` from its radius-`radius` ball, using
/// cone pieces truncated at `depth`. The result is certified against `g`
/// to radius `radius - depth` before it is returned.
pub fn infer_system(
    g: &dyn InverseGraph,
    radius: usize,
    depth: usize,
) -> Result<Arc<EndConeSystem>, InferError> {
    if radius < depth + 2 {
        return Err(InferError::TooShallow { radius, depth });
    }
    let al = g.alphabet().clone();
    let ball = FiniteGraph::ball(g, &g.root(), radius as u32);
    let max_level = radius - depth - 1;
    let coarse = typing(&ball, &al, depth, max_level);
    let fine = typing(&ball, &al, depth + 1, max_level.saturating_sub(1));

    // Stability: on the levels where both depths classify, vertices agree
    // at depth s exactly when they agree at depth s + 1.
    let mut forward: BTreeMap<&str, &str> = BTreeMap::new();
    let mut backward: BTreeMap<&str, &str> = BTreeMap::new();
    for (v, fine_code) in &fine.self_code {
        let coarse_code = coarse.self_code[v].as_str();
        for (map, from, to) in [
            (&mut forward, coarse_code, fine_code.as_str()),
            (&mut backward, fine_code.as_str(), coarse_code),
        ] {
            match map.get(from) {
                Some(&seen) if seen != to => {
                    return Err(InferError::NotStabilized {
                        depth,
                        detail: format!("vertices split or merge at {v}"),
                    });
                }
                _ => {
                    map.insert(from, to);
                }
            }
        }
    }

    // Pick the shallowest representative piece of each class.
    let class_count = coarse.class_of_piece.iter().max().map_or(0, |m| m + 1);
    let mut rep: Vec<Option<usize>> = vec![None; class_count];
    for (pid, piece) in coarse.pieces.iter().enumerate() {
        let c = coarse.class_of_piece[pid];
        if rep[c].is_none_or(|r| piece.level < coarse.pieces[r].level) {
            rep[c] = Some(pid);
        }
    }

    // Assemble types from representatives, breadth-first from the root's
    // class so type numbering is deterministic.
    let root_piece = coarse.piece_of[&ball.root()];
    let root_class = coarse.class_of_piece[root_piece];
    let mut type_of_class: BTreeMap<usize, usize> = BTreeMap::from([(root_class, 0)]);
    let mut worklist = VecDeque::from([root_class]);
    let mut specs: Vec<ConeTypeSpec> = Vec::new();
    while let Some(class) = worklist.pop_front() {
        let pid = rep[class].expect("class seen in typing");
        let piece = &coarse.pieces[pid];
        if piece.level > radius.saturating_sub(depth + 2) {
            return Err(InferError::ClassTooDeep { level: piece.level, radius });
        }
        let floor = piece.level as u32;
        let position: BTreeMap<&VKey, usize> =
            piece.frontier.iter().enumerate().map(|(i, v)| (v, i)).collect();
        let mut internal = Vec::new();
        let mut cross = Vec::new();
        let mut slots: Vec<usize> = Vec::new();
        let mut slot_of_piece: BTreeMap<usize, usize> = BTreeMap::new();
        for (i, u) in piece.frontier.iter().enumerate() {
            for a in al.letters() {
                let w = ball.neighbor(u, a).expect("complete in trusted region");
                let lw = ball.distance(&w).expect("in ball");
                if lw == floor {
                    internal.push((i, a, position[&w]));
                } else if lw == floor + 1 {
                    let child_pid = coarse.piece_of[&w];
                    let slot = *slot_of_piece.entry(child_pid).or_insert_with(|| {
                        slots.push(child_pid);
                        slots.len() - 1
                    });
                    let child = &coarse.pieces[child_pid];
                    let entry = child.frontier.iter().position(|x| x == &w).expect("frontier");
                    cross.push((i, a, slot, entry));
                }
            }
        }
        let mut children = Vec::with_capacity(slots.len());
        for child_pid in slots {
            let child_class = coarse.class_of_piece[child_pid];
            let next_id = type_of_class.len();
            let id = *type_of_class.entry(child_class).or_insert_with(|| {
                worklist.push_back(child_class);
                next_id
            });
            children.push(id);
        }
        specs.push(ConeTypeSpec {
            frontier: (0..piece.frontier.len()).map(|i| format!("f{i}")).collect(),
            internal_edges: internal,
            children,
            cross_edges: cross,
        });
    }

    let sys = Arc::new(EndConeSystem::new(al, specs, 0)?);
    match crate::cone::verify_presentation(&sys, g, (radius - depth) as u32) {
        VerifyOutcome::Verified { .. } => Ok(sys),
        VerifyOutcome::Mismatch { detail } => Err(InferError::NotCertified(detail)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples;

    #[test]
    fn line_reconstructs_with_three_types() {
        let g = examples::line();
        let sys = infer_system(&g, 8, 2).unwrap();
        assert_eq!(sys.reachable_types().len(), 3);
        assert!(sys.validate(4).is_empty());
    }

    #[test]
    fn free_tree_reconstructs_with_five_types() {
        let g = examples::free_tree(&["a", "b"]);
        let sys = infer_system(&g, 7, 2).unwrap();
        assert_eq!(sys.reachable_types().len(), 5);
    }

    #[test]
    fn paired_lines_reconstruct_with_four_types() {
        let g = examples::omega().graph;
        let sys = infer_system(g.as_ref(), 9, 2).unwrap();
        assert_eq!(sys.reachable_types().len(), 4);
    }

    #[test]
    fn reconstruction_matches_the_curated_presentation() {
        // Same graph, independent constructions: both certify, and they
        // agree on the count of reachable types.
        let g = examples::comb().graph;
        let inferred = infer_system(g.as_ref(), 8, 2).unwrap();
        let curated = examples::comb_system();
        assert_eq!(
            inferred.reachable_types().len(),
            curated.reachable_types().len()
        );
    }

    #[test]
    fn shallow_radius_is_rejected() {
        let g = examples::line();
        assert!(matches!(
            infer_system(&g, 3, 2),
            Err(InferError::TooShallow { .. })
        ));
    }

    #[test]
    fn depth_zero_is_unstable_on_paired_lines() {
        // At depth 0 the rungs are invisible, so the two line sides fall
        // into classes that depth 1 tells apart.
        let g = examples::omega().graph;
        match infer_system(g.as_ref(), 9, 0) {
            Err(InferError::NotStabilized { .. }) => {}
            Err(InferError::NotCertified(_)) => {}
            other => panic!("unexpected {other:?}"),
        }
    }
}
