//! Perturbation pairs: a graph that differs from a reference family only
//! inside a ball, and the group elements supported there.
//!
//! A pair couples a presented graph with an ensemble that models everything
//! outside the ball of radius `interior` around the root. The coupling is
//! certified by matching the components beyond that ball, one to one and up
//! to labeled isomorphism out to a horizon. Once certified, acting on the
//! ensemble answers questions about the far part of the graph: an element
//! is supported inside the ball exactly when the ensemble cannot see it,
//! and such elements have orders bounded by the sphere they stir.

use crate::alphabet::{Letter, Word};
use crate::cone::EndConeSystem;
use crate::graph::{FiniteGraph, InverseGraph};
use crate::group::{is_identity, Ensemble};
use crate::infer::{band_component, piece_code};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;
use std::collections::BTreeMap;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BoundaryError {
    #[error("graph and reference ensemble use different alphabets")]
    MixedAlphabets,
    #[error("no component matching beyond radius {interior}: {detail}")]
    Disagreement { interior: usize, detail: String },
}

/// Evidence that the graph and the reference family agree beyond the
/// interior ball: their far components matched one to one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LocalAgreement {
    pub components: usize,
    pub horizon: usize,
}

/// Census of far components by canonical serialization.
fn far_components(
    g: &dyn InverseGraph,
    interior: usize,
    horizon: usize,
) -> BTreeMap<String, usize> {
    let al = g.alphabet();
    let floor = interior + 1;
    // One level past the horizon so depth marks resolve identically.
    let ball = FiniteGraph::ball(g, &g.root(), (floor + horizon + 1) as u32);
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    let mut grouped = std::collections::BTreeSet::new();
    for v in ball.vertices() {
        if ball.distance(v) != Some(floor as u32) || grouped.contains(v) {
            continue;
        }
        let members = band_component(&ball, al, v, floor, horizon);
        let mut canon: Option<String> = None;
        for u in &members {
            if ball.distance(u) != Some(floor as u32) {
                continue;
            }
            grouped.insert(u.clone());
            let (code, _) = piece_code(&ball, al, u, floor, horizon);
            if canon.as_ref().is_none_or(|c| code < *c) {
                canon = Some(code);
            }
        }
        *counts.entry(canon.expect("seed is at floor level")).or_insert(0) += 1;
    }
    counts
}

/// Match the components of `gamma` beyond the interior ball against the
/// pooled components of the reference graphs, comparing shapes out to
/// `horizon` levels past the ball.
pub fn check_local_agreement(
    gamma: &dyn InverseGraph,
    reference: &[&dyn InverseGraph],
    interior: usize,
    horizon: usize,
) -> Result<LocalAgreement, BoundaryError> {
    let ours = far_components(gamma, interior, horizon);
    let mut theirs: BTreeMap<String, usize> = BTreeMap::new();
    for g in reference {
        for (code, count) in far_components(*g, interior, horizon) {
            *theirs.entry(code).or_insert(0) += count;
        }
    }
    if ours == theirs {
        Ok(LocalAgreement { components: ours.values().sum(), horizon })
    } else {
        let summarize = |m: &BTreeMap<String, usize>| {
            let mut shapes: Vec<usize> = m.values().copied().collect();
            shapes.sort_unstable();
            format!("{} components in {} shapes (multiplicities {:?})", m.values().sum::<usize>(), m.len(), shapes)
        };
        Err(BoundaryError::Disagreement {
            interior,
            detail: format!("graph has {}, reference has {}", summarize(&ours), summarize(&theirs)),
        })
    }
}

/// A certified pairing of a presented graph with a reference ensemble that
/// agrees with it beyond the interior ball.
pub struct PerturbationPair {
    gamma: Ensemble,
    reference: Ensemble,
    interior: usize,
    agreement: LocalAgreement,
    sphere: u64,
}

impl PerturbationPair {
    /// Certify and build the pair. `horizon` is how far past the interior
    /// ball the component matching looks.
    pub fn new(
        gamma: Arc<EndConeSystem>,
        reference: Ensemble,
        interior: usize,
        horizon: usize,
    ) -> Result<PerturbationPair, BoundaryError> {
        if gamma.alphabet() != reference.alphabet() {
            return Err(BoundaryError::MixedAlphabets);
        }
        let graph = gamma.as_graph();
        let ref_graphs: Vec<_> = reference.systems().iter().map(|s| s.as_graph()).collect();
        let ref_dyn: Vec<&dyn InverseGraph> =
            ref_graphs.iter().map(|g| g as &dyn InverseGraph).collect();
        let agreement = check_local_agreement(&graph, &ref_dyn, interior, horizon)?;
        let sphere =
            FiniteGraph::ball(&graph, &graph.root(), interior as u32).sphere_size(interior as u32)
                as u64;
        Ok(PerturbationPair {
            gamma: Ensemble::new(vec![Arc::try_unwrap(gamma).unwrap_or_else(|a| (*a).clone())])
                .expect("one member"),
            reference,
            interior,
            agreement,
            sphere,
        })
    }

    pub fn agreement(&self) -> &LocalAgreement {
        &self.agreement
    }

    pub fn interior(&self) -> usize {
        self.interior
    }

    pub fn graph_group(&self) -> &Ensemble {
        &self.gamma
    }

    pub fn reference_group(&self) -> &Ensemble {
        &self.reference
    }

    /// Whether `word` moves nothing outside the interior ball. Under the
    /// certified agreement this is exactly acting trivially on the
    /// reference ensemble.
    pub fn supported_in_interior(&self, word: &[Letter]) -> bool {
        is_identity(&self.reference, word)
    }

    /// Order bound for an element supported in the interior: it permutes
    /// at most sphere-many orbits of length at most the word length.
    pub fn interior_order_bound(&self, word: &[Letter]) -> u64 {
        let len = self.gamma.alphabet().free_reduce(word).len().max(1) as u64;
        self.sphere * len
    }

    /// Sample the quotient property: every word acting trivially on the
    /// graph must act trivially on the reference. Half the samples are
    /// random conjugates of the given seed words, which keeps
    /// graph-trivial words in the mix.
    pub fn quotient_samples(
        &self,
        seeds: &[Word],
        count: usize,
        max_len: usize,
        rng_seed: u64,
    ) -> QuotientReport {
        let al = self.gamma.alphabet().clone();
        let mut rng = StdRng::seed_from_u64(rng_seed);
        let mut random_word = |len: usize| -> Word {
            (0..len).map(|_| Letter(rng.gen_range(0..al.len()) as u16)).collect()
        };
        let mut report = QuotientReport::default();
        for i in 0..count {
            let raw: Word = if !seeds.is_empty() && i % 2 == 1 {
                let seed = &seeds[i / 2 % seeds.len()];
                let u = random_word(max_len / 2);
                let mut w = u.clone();
                w.extend_from_slice(seed);
                w.extend(al.invert_word(&u));
                w
            } else {
                random_word(1 + i % max_len)
            };
            let word = al.free_reduce(&raw);
            let on_graph = is_identity(&self.gamma, &word);
            let on_reference = is_identity(&self.reference, &word);
            report.checked += 1;
            report.graph_trivial += usize::from(on_graph);
            report.reference_trivial += usize::from(on_reference);
            if on_graph && !on_reference {
                report.violations.push(al.format_word(&word));
            }
        }
        report
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct QuotientReport {
    pub checked: usize,
    pub graph_trivial: usize,
    pub reference_trivial: usize,
    pub violations: Vec<String>,
}

impl QuotientReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples;

    fn torsion_pair() -> PerturbationPair {
        let gamma = Arc::new(examples::torsion_system());
        let reference = Ensemble::new(examples::torsion_companion()).unwrap();
        PerturbationPair::new(gamma, reference, 1, 6).unwrap()
    }

    #[test]
    fn bridge_graph_agrees_with_two_far_lines() {
        let pair = torsion_pair();
        assert_eq!(pair.agreement().components, 4);
    }

    #[test]
    fn one_far_line_is_not_enough() {
        let gamma = Arc::new(examples::torsion_system());
        let single = Ensemble::new(vec![examples::torsion_companion().remove(0)]).unwrap();
        match PerturbationPair::new(gamma, single, 1, 6) {
            Err(BoundaryError::Disagreement { .. }) => {}
            other => panic!("unexpected {:?}", other.map(|p| p.agreement().clone())),
        }
    }

    #[test]
    fn interior_support_is_vanishing_translation() {
        let pair = torsion_pair();
        let al = pair.graph_group().alphabet().clone();
        // Supported inside exactly when the c exponents cancel: the far
        // lines only feel the c translation.
        for (text, expected) in [
            ("c a c'", true),
            ("a", true),
            ("c a a c'", true),
            ("c", false),
            ("c c a", false),
            ("a c", false),
        ] {
            let w = al.parse_word(text).unwrap();
            assert_eq!(pair.supported_in_interior(&w), expected, "{text}");
        }
    }

    #[test]
    fn interior_elements_obey_the_order_bound() {
        let pair = torsion_pair();
        let al = pair.graph_group().alphabet().clone();
        let h1 = al.parse_word("c a c'").unwrap();
        // Sphere 3 around the bridge, word length 3.
        assert_eq!(pair.interior_order_bound(&h1), 9);
        let sq = al.free_reduce(&[h1.clone(), h1.clone()].concat());
        assert!(is_identity(pair.graph_group(), &sq));
        assert!(!is_identity(pair.graph_group(), &h1));
    }

    #[test]
    fn quotient_property_holds_on_samples() {
        let pair = torsion_pair();
        let al = pair.graph_group().alphabet().clone();
        let seeds = vec![al.parse_word("a a").unwrap()];
        let report = pair.quotient_samples(&seeds, 100, 8, 31);
        assert!(report.ok(), "{:?}", report.violations);
        assert!(report.graph_trivial > 0);
        assert!(report.reference_trivial >= report.graph_trivial);
    }
}
