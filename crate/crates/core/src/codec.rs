//! Vertex codes: a prefix-free encoding of addresses as words over a finite
//! alphabet of cone designators.
//!
//! A code word spells the descent to a vertex, one cone per letter. Every
//! letter names a cone position (the root, or a slot of a parent type);
//! interior letters are nonfinal, and the last letter also carries the
//! frontier vertex where the descent stops. The transducers in
//! [`crate::transducer`] rewrite these words to realize generator actions.

use crate::cone::{EndConeSystem, VertexAddress};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

/// A cone position: the root cone, or the child in `slot` of a cone of
/// type `parent`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum ConeDes {
    Root,
    Slot { parent: usize, slot: usize },
}

/// One code letter: a cone position, nonfinal (`vertex: None`) while the
/// descent continues, or final at a frontier vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ConeLetter {
    pub des: ConeDes,
    pub vertex: Option<usize>,
}

impl ConeLetter {
    pub fn nonfinal(des: ConeDes) -> ConeLetter {
        ConeLetter { des, vertex: None }
    }

    pub fn fin(des: ConeDes, vertex: usize) -> ConeLetter {
        ConeLetter { des, vertex: Some(vertex) }
    }
}

impl fmt::Display for ConeLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.des {
            ConeDes::Root => write!(f, "[r")?,
            ConeDes::Slot { parent, slot } => write!(f, "[{parent}.{slot}")?,
        }
        match self.vertex {
            Some(v) => write!(f, ":{v}]"),
            None => write!(f, "]"),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DecodeError {
    #[error("empty code")]
    Empty,
    #[error("letter {position} is invalid: {reason}")]
    Invalid { position: usize, reason: String },
}

/// The code alphabet of a presentation, with letter-to-index lookup. Only
/// reachable types contribute; an address can never visit the others.
#[derive(Debug, Clone)]
pub struct Codec<'a> {
    sys: &'a EndConeSystem,
    letters: Vec<ConeLetter>,
    index: BTreeMap<ConeLetter, usize>,
    designators: Vec<ConeDes>,
}

impl<'a> Codec<'a> {
    pub fn new(sys: &'a EndConeSystem) -> Codec<'a> {
        let mut designators = vec![ConeDes::Root];
        for parent in sys.reachable_types() {
            for slot in 0..sys.children(parent).len() {
                designators.push(ConeDes::Slot { parent, slot });
            }
        }
        let mut letters = Vec::new();
        for &des in &designators {
            letters.push(ConeLetter::nonfinal(des));
            for v in 0..sys.frontier(cone_of(sys, des)).len() {
                letters.push(ConeLetter::fin(des, v));
            }
        }
        let index = letters.iter().enumerate().map(|(i, &l)| (l, i)).collect();
        Codec { sys, letters, index, designators }
    }

    pub fn system(&self) -> &'a EndConeSystem {
        self.sys
    }

    pub fn letters(&self) -> &[ConeLetter] {
        &self.letters
    }

    pub fn designators(&self) -> &[ConeDes] {
        &self.designators
    }

    pub fn letter_index(&self, l: &ConeLetter) -> Option<usize> {
        self.index.get(l).copied()
    }

    /// The type of the cone a designator names.
    pub fn cone_type(&self, des: ConeDes) -> usize {
        cone_of(self.sys, des)
    }

    /// The code word of an address: one letter per visited cone, the last
    /// carrying the frontier vertex.
    pub fn encode(&self, addr: &VertexAddress) -> Vec<ConeLetter> {
        let mut out = Vec::with_capacity(addr.path.len() + 1);
        let mut des = ConeDes::Root;
        let mut ty = self.sys.root_type();
        for &slot in &addr.path {
            out.push(ConeLetter::nonfinal(des));
            des = ConeDes::Slot { parent: ty, slot };
            ty = self.sys.children(ty)[slot];
        }
        out.push(ConeLetter::fin(des, addr.vertex));
        out
    }

    /// The vertex code at the start of `word` and its length, if there is
    /// one. Prefix-freeness makes it unique.
    pub fn decode_prefix(&self, word: &[ConeLetter]) -> Option<(VertexAddress, usize)> {
        let mut path = Vec::new();
        let mut ty = self.sys.root_type();
        for (position, letter) in word.iter().enumerate() {
            match letter.des {
                ConeDes::Root if position == 0 => {}
                ConeDes::Slot { parent, slot } if position > 0 && parent == ty => {
                    match self.sys.children(parent).get(slot) {
                        Some(&child) => {
                            path.push(slot);
                            ty = child;
                        }
                        None => return None,
                    }
                }
                _ => return None,
            }
            if let Some(v) = letter.vertex {
                return (v < self.sys.frontier(ty).len())
                    .then(|| (VertexAddress::new(path, v), position + 1));
            }
        }
        None
    }

    /// Parse a code word back to an address, reporting the first violation.
    pub fn decode(&self, code: &[ConeLetter]) -> Result<VertexAddress, DecodeError> {
        if code.is_empty() {
            return Err(DecodeError::Empty);
        }
        let mut path = Vec::new();
        let mut ty = self.sys.root_type();
        for (position, letter) in code.iter().enumerate() {
            let last = position + 1 == code.len();
            match letter.des {
                ConeDes::Root => {
                    if position != 0 {
                        return Err(DecodeError::Invalid {
                            position,
                            reason: "the root designator can only open a code".into(),
                        });
                    }
                }
                ConeDes::Slot { parent, slot } => {
                    if position == 0 {
                        return Err(DecodeError::Invalid {
                            position,
                            reason: "a code must open with the root designator".into(),
                        });
                    }
                    if parent != ty {
                        return Err(DecodeError::Invalid {
                            position,
                            reason: format!("slot of type {parent} cannot follow type {ty}"),
                        });
                    }
                    match self.sys.children(parent).get(slot) {
                        Some(&child) => {
                            path.push(slot);
                            ty = child;
                        }
                        None => {
                            return Err(DecodeError::Invalid {
                                position,
                                reason: format!("type {parent} has no slot {slot}"),
                            });
                        }
                    }
                }
            }
            match letter.vertex {
                Some(v) if last => {
                    if v >= self.sys.frontier(ty).len() {
                        return Err(DecodeError::Invalid {
                            position,
                            reason: format!("type {ty} has no frontier vertex {v}"),
                        });
                    }
                    return Ok(VertexAddress::new(path, v));
                }
                Some(_) => {
                    return Err(DecodeError::Invalid {
                        position,
                        reason: "final letter before the end of the code".into(),
                    });
                }
                None if last => {
                    return Err(DecodeError::Invalid {
                        position,
                        reason: "code ends without a final letter".into(),
                    });
                }
                None => {}
            }
        }
        unreachable!("loop returns on the last letter");
    }
}

pub(crate) fn cone_of(sys: &EndConeSystem, des: ConeDes) -> usize {
    match des {
        ConeDes::Root => sys.root_type(),
        ConeDes::Slot { parent, slot } => sys.children(parent)[slot],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples;
    use proptest::prelude::*;

    #[test]
    fn round_trip_on_omega() {
        let sys = examples::omega_system();
        let codec = Codec::new(&sys);
        for addr in sys.addresses_to_depth(4) {
            let code = codec.encode(&addr);
            assert_eq!(code.len(), addr.depth() + 1);
            assert_eq!(codec.decode(&code).unwrap(), addr);
        }
    }

    #[test]
    fn alphabet_size_matches_slot_census() {
        // One nonfinal letter per designator plus one final letter per
        // frontier vertex of the designated type.
        let sys = examples::line_system();
        let codec = Codec::new(&sys);
        assert_eq!(codec.designators().len(), 5);
        assert_eq!(codec.letters().len(), 10);
    }

    #[test]
    fn prefix_decoding_splits_code_from_tail() {
        let sys = examples::omega_system();
        let codec = Codec::new(&sys);
        for addr in sys.addresses_to_depth(3) {
            let mut word = codec.encode(&addr);
            let code_len = word.len();
            word.push(ConeLetter::nonfinal(ConeDes::Root));
            word.push(ConeLetter::fin(ConeDes::Root, 0));
            assert_eq!(codec.decode_prefix(&word), Some((addr, code_len)));
        }
        assert_eq!(codec.decode_prefix(&[]), None);
        assert_eq!(
            codec.decode_prefix(&[ConeLetter::nonfinal(ConeDes::Root)]),
            None
        );
    }

    #[test]
    fn decode_pinpoints_the_first_violation() {
        let sys = examples::line_system();
        let codec = Codec::new(&sys);
        let addr = codec
            .system()
            .addresses_to_depth(2)
            .into_iter()
            .find(|a| a.depth() == 2)
            .unwrap();
        let mut code = codec.encode(&addr);
        code[1] = ConeLetter::fin(code[1].des, 0);
        match codec.decode(&code) {
            Err(DecodeError::Invalid { position: 1, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    proptest! {
        #[test]
        fn codes_are_prefix_free(depth_a in 0usize..4, pick_a in 0usize..50,
                                 depth_b in 0usize..4, pick_b in 0usize..50) {
            let sys = examples::antenna_system();
            let codec = Codec::new(&sys);
            let at = |d: usize, pick: usize| {
                let level: Vec<_> = sys
                    .addresses_to_depth(d)
                    .into_iter()
                    .filter(|a| a.depth() == d)
                    .collect();
                level[pick % level.len()].clone()
            };
            let (a, b) = (at(depth_a, pick_a), at(depth_b, pick_b));
            let (ca, cb) = (codec.encode(&a), codec.encode(&b));
            if a != b {
                prop_assert!(ca != cb);
                prop_assert!(!(ca.len() < cb.len() && cb[..ca.len()] == ca[..]));
                prop_assert!(!(cb.len() < ca.len() && ca[..cb.len()] == cb[..]));
            }
        }
    }
}
