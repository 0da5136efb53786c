//! Context-free inverse graphs and their transition groups.
//!
//! The library realizes inverse graphs lazily from finite presentations by
//! end-cone types, and computes with the groups those graphs present:
//! deciding the word problem, bounding and deciding element orders, growth,
//! letter-to-word transducers for the vertex action, reconstruction of
//! presentations from balls, real-time inverse pushdown automata, and
//! boundary quotients.

pub mod alphabet;
pub mod boundary;
pub mod codec;
pub mod cone;
pub mod examples;
pub mod graph;
pub mod group;
pub mod infer;
pub mod par;
pub mod pda;
pub mod product;
pub mod transducer;

pub use alphabet::{Alphabet, Letter, Word};
pub use cone::{ConeTypeSpec, EndConeSystem, VertexAddress};
pub use graph::{FiniteGraph, InverseGraph, VKey};
pub use group::Ensemble;
