//! Transition groups of presented graphs: the word problem, element orders
//! with certificates, torsion bounds, and finiteness.
//!
//! An ensemble is a finite family of presentations over one alphabet; its
//! group is the quotient of the free group by the words acting trivially on
//! every member graph. The word problem reduces to a finite grid of bounded
//! walks: a reduced word is nontrivial exactly when one of its rotations
//! walks inside some cone type, from a frontier vertex, to a different
//! endpoint. Rotations whose walk leaves the cone upward prove nothing and
//! are skipped; the root type backstops them, since nothing is above it.

use crate::alphabet::{Letter, Word};
use crate::cone::{ConeStep, EndConeSystem, VertexAddress};
use crate::par;
use serde::Serialize;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GroupError {
    #[error("an ensemble needs at least one member")]
    Empty,
    #[error("member {0} has a different alphabet from member 0")]
    MixedAlphabets(usize),
}

/// A finite family of presentations over a common alphabet, acting on the
/// disjoint union of their graphs.
#[derive(Debug, Clone)]
pub struct Ensemble {
    systems: Vec<Arc<EndConeSystem>>,
}

impl Ensemble {
    pub fn new(systems: Vec<EndConeSystem>) -> Result<Ensemble, GroupError> {
        if systems.is_empty() {
            return Err(GroupError::Empty);
        }
        for (i, s) in systems.iter().enumerate() {
            if s.alphabet() != systems[0].alphabet() {
                return Err(GroupError::MixedAlphabets(i));
            }
        }
        Ok(Ensemble { systems: systems.into_iter().map(Arc::new).collect() })
    }

    pub fn single(sys: EndConeSystem) -> Ensemble {
        Ensemble { systems: vec![Arc::new(sys)] }
    }

    pub fn alphabet(&self) -> &crate::alphabet::Alphabet {
        self.systems[0].alphabet()
    }

    pub fn systems(&self) -> &[Arc<EndConeSystem>] {
        &self.systems
    }
}

/// Evidence that a word is not the identity: the rotation walks inside the
/// named cone type from `frontier_vertex` to a different endpoint.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NonIdentityWitness {
    pub system: usize,
    pub cone_type: usize,
    pub frontier_vertex: String,
    pub rotation: usize,
    pub end: String,
}

/// One cell of the word-problem grid.
type Case = (usize, usize, usize, usize);

fn grid(ens: &Ensemble, rotations: usize) -> Vec<Case> {
    let mut cases = Vec::new();
    for (si, sys) in ens.systems().iter().enumerate() {
        for ty in sys.reachable_types() {
            for q in 0..sys.frontier(ty).len() {
                for shift in 0..rotations {
                    cases.push((si, ty, q, shift));
                }
            }
        }
    }
    cases
}

/// Key of an address relative to a cone type, used in witness reports.
fn relative_key(sys: &EndConeSystem, base: usize, addr: &VertexAddress) -> String {
    let ty = sys.type_at(base, &addr.path).expect("walked address");
    let path: Vec<String> = addr.path.iter().map(|s| s.to_string()).collect();
    format!("{}:{}", path.join("."), sys.frontier(ty)[addr.vertex])
}

fn try_case(ens: &Ensemble, word: &[Letter], case: Case) -> Option<NonIdentityWitness> {
    let (si, ty, q, shift) = case;
    let sys = &ens.systems()[si];
    let start = VertexAddress::new(Vec::new(), q);
    let mut cur = start.clone();
    for i in 0..word.len() {
        let a = word[(shift + i) % word.len()];
        match sys.step_in_cone(ty, &cur, a).expect("valid address") {
            ConeStep::To(next) => cur = next,
            // The rotated walk climbs above the cone: not evidence.
            ConeStep::Escape => return None,
        }
    }
    if cur == start {
        return None;
    }
    Some(NonIdentityWitness {
        system: si,
        cone_type: ty,
        frontier_vertex: sys.frontier(ty)[q].clone(),
        rotation: shift,
        end: relative_key(sys, ty, &cur),
    })
}

/// Decide whether `word` acts as the identity on every member graph; if
/// not, return a witness. The grid of (system, type, frontier vertex,
/// rotation) cells is searched in parallel; the returned witness is the
/// first cell in grid order, independent of thread scheduling.
pub fn word_problem(ens: &Ensemble, word: &[Letter]) -> Option<NonIdentityWitness> {
    let reduced = ens.alphabet().free_reduce(word);
    if reduced.is_empty() {
        return None;
    }
    let cases = grid(ens, reduced.len());
    par::find_map_first(&cases, |&case| try_case(ens, &reduced, case))
}

/// Sequential twin of [`word_problem`], for benchmarking and cross-checks.
pub fn word_problem_seq(ens: &Ensemble, word: &[Letter]) -> Option<NonIdentityWitness> {
    let reduced = ens.alphabet().free_reduce(word);
    if reduced.is_empty() {
        return None;
    }
    let cases = grid(ens, reduced.len());
    par::find_map_first_seq(&cases, |&case| try_case(ens, &reduced, case))
}

pub fn is_identity(ens: &Ensemble, word: &[Letter]) -> bool {
    word_problem(ens, word).is_none()
}

pub fn is_identity_seq(ens: &Ensemble, word: &[Letter]) -> bool {
    word_problem_seq(ens, word).is_none()
}

/// Presentation size constants used by the torsion bound, over reachable
/// types only. For an ensemble each constant is the maximum over members.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SystemConstants {
    /// Number of cone types.
    pub types: usize,
    /// Largest frontier.
    pub max_frontier: usize,
    /// Largest child count.
    pub max_children: usize,
}

pub fn constants(ens: &Ensemble) -> SystemConstants {
    let mut out = SystemConstants { types: 0, max_frontier: 0, max_children: 0 };
    for sys in ens.systems() {
        let reachable = sys.reachable_types();
        out.types = out.types.max(reachable.len());
        for &t in &reachable {
            out.max_frontier = out.max_frontier.max(sys.frontier(t).len());
            out.max_children = out.max_children.max(sys.children(t).len());
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TorsionBound {
    Bound(u64),
    /// The bound is real but does not fit in 64 bits.
    ExceedsU64,
}

impl TorsionBound {
    pub fn value(&self) -> Option<u64> {
        match self {
            TorsionBound::Bound(b) => Some(*b),
            TorsionBound::ExceedsU64 => None,
        }
    }
}

/// Upper bound on the order of any torsion element of reduced length
/// `word_len`, from the presentation constants alone.
///
/// A torsion element of length L permutes the addresses reachable from the
/// frontier starts within the depth its walks can explore before repeating:
/// with branching g >= 2 that space has at most L * d * g^(N L) points, and
/// with g <= 1 paths cannot branch, leaving at most L * d * (N L + 1)
/// points. (The branching formula alone is wrong for thin systems: on the
/// 5-cycle it gives 4, but the generator has order 5.) The order of a
/// permutation of M points is at most the smallest C >= 3 with
/// C / log2(C) >= M.
pub fn torsion_bound(ens: &Ensemble, word_len: usize) -> TorsionBound {
    let c = constants(ens);
    let l = word_len.max(1) as u128;
    let d = c.max_frontier as u128;
    let n = c.types as u128;
    let g = c.max_children as u128;
    let raw = if g >= 2 {
        let exp = n.checked_mul(l);
        let pow = exp.and_then(|e| {
            if e > 256 {
                None
            } else {
                g.checked_pow(e as u32)
            }
        });
        match pow.and_then(|p| l.checked_mul(d)?.checked_mul(p)) {
            Some(r) => r,
            None => return TorsionBound::ExceedsU64,
        }
    } else {
        match n
            .checked_mul(l)
            .and_then(|nl| nl.checked_add(1))
            .and_then(|m| l.checked_mul(d)?.checked_mul(m))
        {
            Some(r) => r,
            None => return TorsionBound::ExceedsU64,
        }
    };
    smallest_landau_cap(raw)
}

/// Smallest C >= 3 with C / log2(C) >= raw, or ExceedsU64.
fn smallest_landau_cap(raw: u128) -> TorsionBound {
    let target = raw as f64;
    let f = |c: u64| (c as f64) / (c as f64).log2();
    if f(u64::MAX) < target {
        return TorsionBound::ExceedsU64;
    }
    let (mut lo, mut hi) = (3u64, u64::MAX);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if f(mid) >= target {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    TorsionBound::Bound(lo)
}

/// Evidence of infinite order: iterating the rotation from the named
/// frontier vertex re-enters the same cone type at the same vertex and word
/// phase, strictly deeper and without climbing back out. Self-similarity
/// then pumps the walk to unbounded depth, so the orbit is infinite.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InfiniteOrderWitness {
    pub system: usize,
    pub cone_type: usize,
    pub frontier_vertex: String,
    pub rotation: usize,
    pub shallow_depth: usize,
    pub deep_depth: usize,
    pub steps: usize,
}

fn certificate_case(ens: &Ensemble, word: &[Letter], case: Case) -> Option<InfiniteOrderWitness> {
    let (si, ty, q, shift) = case;
    let sys = &ens.systems()[si];
    let len = word.len();
    let c = constants(ens);
    let cap = ((c.types * c.max_frontier * len + 4) * len * 4).max(4096);
    let mut cur = VertexAddress::new(Vec::new(), q);
    // entries[d] is the most recent (type, vertex, phase) seen at depth d;
    // truncation keeps only depths on the current descent.
    let mut entries: Vec<(usize, usize, usize)> = Vec::new();
    entries.push((ty, q, 0));
    for step in 0..cap {
        let a = word[(shift + step) % len];
        match sys.step_in_cone(ty, &cur, a).expect("valid address") {
            ConeStep::To(next) => cur = next,
            ConeStep::Escape => return None,
        }
        let d = cur.depth();
        let here = (
            sys.type_at(ty, &cur.path).expect("walked"),
            cur.vertex,
            (step + 1) % len,
        );
        entries.truncate(d);
        if let Some(shallow) = entries.iter().position(|&e| e == here) {
            return Some(InfiniteOrderWitness {
                system: si,
                cone_type: ty,
                frontier_vertex: sys.frontier(ty)[q].clone(),
                rotation: shift,
                shallow_depth: shallow,
                deep_depth: d,
                steps: step + 1,
            });
        }
        entries.push(here);
    }
    None
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum OrderResult {
    Finite { order: u64 },
    InfiniteCertified { witness: InfiniteOrderWitness },
    /// Neither a power collapsed nor a certificate fired within the budget.
    Unknown { exponent_searched: u64, bound: TorsionBound },
}

/// The order of `word` in the ensemble group, by certificate search plus
/// exponent search up to the torsion bound (capped at `max_exponent`).
pub fn order(ens: &Ensemble, word: &[Letter], max_exponent: u64) -> OrderResult {
    let reduced = ens.alphabet().free_reduce(word);
    if reduced.is_empty() {
        return OrderResult::Finite { order: 1 };
    }
    // Certificates are cheap and bounded; settle the infinite case first so
    // the exponent loop below cannot starve it.
    let cases = grid(ens, reduced.len());
    if let Some(witness) =
        par::find_map_first(&cases, |&case| certificate_case(ens, &reduced, case))
    {
        return OrderResult::InfiniteCertified { witness };
    }
    let bound = torsion_bound(ens, reduced.len());
    let cap = bound.value().unwrap_or(max_exponent).min(max_exponent);
    let mut power: Word = Vec::new();
    for k in 1..=cap {
        power.extend_from_slice(&reduced);
        power = ens.alphabet().free_reduce(&power);
        if power.is_empty() || word_problem(ens, &power).is_none() {
            return OrderResult::Finite { order: k };
        }
    }
    OrderResult::Unknown { exponent_searched: cap, bound }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum FinitenessResult {
    Finite { vertices: u128 },
    /// A cycle in the child-type graph pumps addresses forever. A graph
    /// with infinitely many vertices presents an infinite group: words map
    /// the root onto every vertex.
    Infinite { type_cycle: Vec<usize> },
}

/// Decide finiteness of the ensemble group by saturating the type graphs.
pub fn is_finite_group(ens: &Ensemble) -> FinitenessResult {
    let mut total: u128 = 0;
    for sys in ens.systems() {
        if let Some(cycle) = type_cycle(sys) {
            return FinitenessResult::Infinite { type_cycle: cycle };
        }
        total += count_addresses(sys, sys.root_type(), &mut vec![None; sys.type_count()]);
    }
    FinitenessResult::Finite { vertices: total }
}

/// A cycle among reachable types, as a path of type indices, if any.
fn type_cycle(sys: &EndConeSystem) -> Option<Vec<usize>> {
    // Colors: 0 unvisited, 1 on stack, 2 done.
    let mut color = vec![0u8; sys.type_count()];
    let mut stack = vec![(sys.root_type(), 0usize)];
    let mut path = vec![sys.root_type()];
    color[sys.root_type()] = 1;
    while let Some(&mut (t, ref mut next)) = stack.last_mut() {
        if let Some(&child) = sys.children(t).get(*next) {
            *next += 1;
            match color[child] {
                0 => {
                    color[child] = 1;
                    stack.push((child, 0));
                    path.push(child);
                }
                1 => {
                    let from = path.iter().position(|&x| x == child).expect("on stack");
                    return Some(path[from..].to_vec());
                }
                _ => {}
            }
        } else {
            color[t] = 2;
            stack.pop();
            path.pop();
        }
    }
    None
}

fn count_addresses(sys: &EndConeSystem, t: usize, memo: &mut Vec<Option<u128>>) -> u128 {
    if let Some(c) = memo[t] {
        return c;
    }
    let mut c = sys.frontier(t).len() as u128;
    for &child in sys.children(t) {
        c += count_addresses(sys, child, memo);
    }
    memo[t] = Some(c);
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples;

    fn omega_ensemble() -> Ensemble {
        Ensemble::single(examples::omega_system())
    }

    fn words(ens: &Ensemble, texts: &[&str]) -> Vec<Word> {
        texts
            .iter()
            .map(|t| ens.alphabet().parse_word(t).unwrap())
            .collect()
    }

    #[test]
    fn omega_identities_and_non_identities() {
        let ens = omega_ensemble();
        for w in words(&ens, &["c c", "a b a' b'", "c a c' b'"]) {
            assert!(is_identity(&ens, &w), "{w:?}");
        }
        for w in words(&ens, &["a", "b", "c", "a b"]) {
            let witness = word_problem(&ens, &w);
            assert!(witness.is_some(), "{w:?}");
        }
    }

    #[test]
    fn parallel_and_sequential_agree() {
        let ens = omega_ensemble();
        for w in words(&ens, &["c c", "a b a' b'", "a", "c a c'", "b a b'"]) {
            assert_eq!(is_identity(&ens, &w), is_identity_seq(&ens, &w));
        }
    }

    #[test]
    fn orders_on_omega() {
        let ens = omega_ensemble();
        let c = words(&ens, &["c"]).remove(0);
        assert_eq!(order(&ens, &c, 1000), OrderResult::Finite { order: 2 });
        let a = words(&ens, &["a"]).remove(0);
        assert!(matches!(
            order(&ens, &a, 1000),
            OrderResult::InfiniteCertified { .. }
        ));
    }

    #[test]
    fn cycle_generator_has_order_five_within_bound() {
        let ens = Ensemble::single(examples::cycle_system());
        let a = words(&ens, &["a"]).remove(0);
        let bound = torsion_bound(&ens, 1);
        match order(&ens, &a, 10_000) {
            OrderResult::Finite { order } => {
                assert_eq!(order, 5);
                assert!(bound.value().unwrap() >= 5, "{bound:?}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn line_generator_is_certified_infinite() {
        let ens = Ensemble::single(examples::line_system());
        let a = words(&ens, &["a"]).remove(0);
        match order(&ens, &a, 1000) {
            OrderResult::InfiniteCertified { witness } => {
                assert!(witness.deep_depth > witness.shallow_depth);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn finiteness_by_type_graph() {
        let cyc = Ensemble::single(examples::cycle_system());
        assert_eq!(
            is_finite_group(&cyc),
            FinitenessResult::Finite { vertices: 5 }
        );
        let line = Ensemble::single(examples::line_system());
        assert!(matches!(
            is_finite_group(&line),
            FinitenessResult::Infinite { .. }
        ));
    }

    #[test]
    fn torsion_bound_uses_the_thin_formula() {
        // The 5-cycle has branching 1; the thin formula must cover order 5.
        let ens = Ensemble::single(examples::cycle_system());
        let c = constants(&ens);
        assert_eq!((c.types, c.max_frontier, c.max_children), (3, 2, 1));
        // raw = 1 * 2 * (3 * 1 + 1) = 8, so the cap is the least C >= 3
        // with C / log2(C) >= 8.
        assert_eq!(torsion_bound(&ens, 1), TorsionBound::Bound(44));
    }

    #[test]
    fn torsion_bound_overflows_to_marker() {
        let ens = omega_ensemble();
        assert_eq!(torsion_bound(&ens, 100_000), TorsionBound::ExceedsU64);
    }

    #[test]
    fn ensemble_word_problem_spans_members() {
        let members = examples::torsion_companion();
        let ens = Ensemble::new(members).unwrap();
        let al = ens.alphabet().clone();
        // a absorbs everywhere on the companion, so c-free commutators with
        // a act trivially there while c itself does not.
        let w = al.parse_word("a").unwrap();
        assert!(is_identity(&ens, &w));
        let c = al.parse_word("c").unwrap();
        assert!(!is_identity(&ens, &c));
    }

    #[test]
    fn torsion_example_transpositions() {
        let ens = Ensemble::single(examples::torsion_system());
        let al = ens.alphabet().clone();
        let h1 = al.parse_word("c a c'").unwrap();
        assert!(!is_identity(&ens, &h1));
        let sq = al.parse_word("c a c' c a c'").unwrap();
        assert!(is_identity(&ens, &sq));
        assert_eq!(order(&ens, &h1, 100), OrderResult::Finite { order: 2 });
    }
}
