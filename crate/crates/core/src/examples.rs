//! A corpus of concrete inverse graphs: building blocks (lines, cycles, the
//! one-vertex loop graph, free trees), four worked examples with independent
//! closed-form oracles, and hand-built end-cone presentations for all of
//! them.
//!
//! Each worked example comes as an [`OracleGraph`]: the graph realized
//! edge-by-edge, paired with an oracle that computes the endpoint of a walk
//! by direct arithmetic on vertex keys. The two routes share no code, so
//! their agreement is a meaningful check on both.

use crate::alphabet::{Alphabet, Letter};
use crate::cone::{ConeTypeSpec, EndConeSystem};
use crate::graph::{FiniteGraph, InverseGraph, VKey};
use crate::product::{pad_system, AlternatingWord, FreeProduct, GlueRule, Side};
use std::sync::Arc;

/// Bi-infinite integer line: one generator moves by +1, every other letter
/// of the alphabet loops. Keys are the integers, root `0`.
pub struct IntLine {
    alphabet: Alphabet,
    fwd: Letter,
}

impl IntLine {
    pub fn new(alphabet: Alphabet, mover: &str) -> IntLine {
        let fwd = alphabet.lookup(mover).expect("mover letter in alphabet");
        IntLine { alphabet, fwd }
    }
}

impl InverseGraph for IntLine {
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }
    fn root(&self) -> VKey {
        VKey::new("0")
    }
    fn neighbor(&self, v: &VKey, a: Letter) -> Option<VKey> {
        let n: i64 = v.as_str().parse().ok()?;
        let m = if a == self.fwd {
            n + 1
        } else if a == self.alphabet.inv(self.fwd) {
            n - 1
        } else {
            n
        };
        Some(VKey::new(m.to_string()))
    }
}

/// The line over `{a, a'}`.
pub fn line() -> IntLine {
    IntLine::new(Alphabet::symmetric(&["a"]), "a")
}

/// A line moved by the named generator, alphabet `{gen, gen'}`.
pub fn line_over(generator: &str) -> IntLine {
    IntLine::new(Alphabet::symmetric(&[generator]), generator)
}

/// Cycle of length `n` over `{a, a'}`: keys `0..n`, `a` steps +1 mod n.
pub struct CycleGraph {
    alphabet: Alphabet,
    n: u64,
}

pub fn cycle(n: u64) -> CycleGraph {
    assert!(n >= 1);
    CycleGraph { alphabet: Alphabet::symmetric(&["a"]), n }
}

impl InverseGraph for CycleGraph {
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }
    fn root(&self) -> VKey {
        VKey::new("0")
    }
    fn neighbor(&self, v: &VKey, a: Letter) -> Option<VKey> {
        let k: u64 = v.as_str().parse().ok()?;
        if k >= self.n {
            return None;
        }
        let fwd = self.alphabet.lookup("a").expect("a");
        let m = if a == fwd { (k + 1) % self.n } else { (k + self.n - 1) % self.n };
        Some(VKey::new(m.to_string()))
    }
}

/// One vertex, every letter a loop. The trivial complete inverse graph.
pub struct LoopVertex {
    alphabet: Alphabet,
}

pub fn loop_vertex(alphabet: Alphabet) -> LoopVertex {
    LoopVertex { alphabet }
}

impl InverseGraph for LoopVertex {
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }
    fn root(&self) -> VKey {
        VKey::new("v")
    }
    fn neighbor(&self, v: &VKey, _a: Letter) -> Option<VKey> {
        Some(v.clone())
    }
}

/// Cayley graph of the free group on the given generators. Keys are reduced
/// words with letters joined by `.`, root `e`.
pub struct FreeTree {
    alphabet: Alphabet,
}

pub fn free_tree(generators: &[&str]) -> FreeTree {
    FreeTree { alphabet: Alphabet::symmetric(generators) }
}

impl FreeTree {
    fn parse(&self, v: &VKey) -> Option<Vec<Letter>> {
        if v.as_str() == "e" {
            return Some(Vec::new());
        }
        let mut word = Vec::new();
        for piece in v.as_str().split('.') {
            word.push(self.alphabet.lookup(piece)?);
        }
        Some(word)
    }

    fn format(&self, w: &[Letter]) -> VKey {
        if w.is_empty() {
            return VKey::new("e");
        }
        let names: Vec<&str> = w.iter().map(|&a| self.alphabet.name(a)).collect();
        VKey::new(names.join("."))
    }
}

impl InverseGraph for FreeTree {
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }
    fn root(&self) -> VKey {
        VKey::new("e")
    }
    fn neighbor(&self, v: &VKey, a: Letter) -> Option<VKey> {
        let mut word = self.parse(v)?;
        word.push(a);
        Some(self.format(&self.alphabet.free_reduce(&word)))
    }
}

/// A worked example: the realized graph plus an independent oracle that
/// computes walk endpoints by closed-form arithmetic on keys.
pub type OracleFn = Arc<dyn Fn(&VKey, &[Letter]) -> Option<VKey> + Send + Sync>;

pub struct OracleGraph {
    pub name: String,
    pub graph: Arc<dyn InverseGraph>,
    oracle: OracleFn,
}

impl OracleGraph {
    pub fn oracle_walk(&self, from: &VKey, word: &[Letter]) -> Option<VKey> {
        (self.oracle)(from, word)
    }
}

/// Two commuting line actions tied together by a swap.
///
/// Vertices `p_i` and `q_i` for integer `i`, root `p0`. The letter `a`
/// shifts the p-line and fixes the q-line, `b` does the opposite, and both
/// `c` and `c'` swap `p_i` with `q_i`. The transition group is the wreath
///-like extension of Z x Z by the coordinate swap.
pub struct PairedLines {
    alphabet: Alphabet,
}

impl PairedLines {
    fn parse(v: &VKey) -> Option<(i64, bool)> {
        let (side, rest) = v.as_str().split_at(1);
        let x: i64 = rest.parse().ok()?;
        match side {
            "p" => Some((x, false)),
            "q" => Some((x, true)),
            _ => None,
        }
    }

    fn format(x: i64, q_side: bool) -> VKey {
        VKey::new(format!("{}{}", if q_side { 'q' } else { 'p' }, x))
    }
}

impl InverseGraph for PairedLines {
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }
    fn root(&self) -> VKey {
        VKey::new("p0")
    }
    fn neighbor(&self, v: &VKey, letter: Letter) -> Option<VKey> {
        let (x, q_side) = Self::parse(v)?;
        let name = self.alphabet.name(letter);
        let next = match (name, q_side) {
            ("a", false) => (x + 1, false),
            ("a'", false) => (x - 1, false),
            ("a", true) | ("a'", true) => (x, true),
            ("b", true) => (x + 1, true),
            ("b'", true) => (x - 1, true),
            ("b", false) | ("b'", false) => (x, false),
            ("c", s) | ("c'", s) => (x, !s),
            _ => return None,
        };
        Some(Self::format(next.0, next.1))
    }
}

/// The paired-lines example with its group-arithmetic oracle: words fold
/// into `((u_p, u_q), swap)` and act by `(x, y) -> (x + u_y, swap(y))`.
pub fn omega() -> OracleGraph {
    let alphabet = Alphabet::symmetric(&["a", "b", "c"]);
    let graph = Arc::new(PairedLines { alphabet: alphabet.clone() });
    let oracle: OracleFn = Arc::new(move |v, word| {
        let (x, q_side) = PairedLines::parse(v)?;
        let mut u = [0i64, 0i64];
        let mut swap = false;
        for &l in word {
            let (du, ds) = match alphabet.name(l) {
                "a" => ([1, 0], false),
                "a'" => ([-1, 0], false),
                "b" => ([0, 1], false),
                "b'" => ([0, -1], false),
                "c" | "c'" => ([0, 0], true),
                _ => return None,
            };
            // Right-to-left wreath composition: the accumulated swap decides
            // which coordinate the new displacement lands on.
            u[0] += du[if swap { 1 } else { 0 }];
            u[1] += du[if swap { 0 } else { 1 }];
            swap ^= ds;
        }
        let y = usize::from(q_side);
        Some(PairedLines::format(x + u[y], q_side ^ swap))
    });
    OracleGraph { name: "omega".into(), graph, oracle }
}

fn alphabet_ca() -> Alphabet {
    Alphabet::symmetric(&["c"])
        .disjoint_union(&Alphabet::symmetric(&["a"]))
        .expect("disjoint names")
}

fn alphabet_cab() -> Alphabet {
    Alphabet::symmetric(&["c"])
        .disjoint_union(&Alphabet::symmetric(&["a", "b"]))
        .expect("disjoint names")
}

/// Signed block path of a product vertex, for the closed-form oracles:
/// every factor key in our products is an integer except the bridge vertex.
fn parse_blocks(v: &VKey) -> Option<Vec<(Side, usize, i64)>> {
    let word = AlternatingWord::parse(v)?;
    let mut out = Vec::with_capacity(word.entries.len());
    for (side, idx, key) in word.entries {
        out.push((side, idx, key.as_str().parse().ok()?));
    }
    Some(out)
}

fn blocks_to_key(blocks: &[(Side, usize, i64)]) -> VKey {
    AlternatingWord {
        entries: blocks
            .iter()
            .map(|&(s, i, n)| (s, i, VKey::new(n.to_string())))
            .collect(),
    }
    .to_key()
}

/// Free product of a c-line against two loop-padded lines, glued by sign:
/// positive c-vertices carry an a-line, the rest carry a b-line, and every
/// non-root line vertex carries a fresh c-line. Spheres grow as 4 * 3^(n-1)
/// and the transition group has elements that freely reduce to nothing over
/// any single block yet act nontrivially.
pub fn antenna() -> OracleGraph {
    let a2 = Alphabet::symmetric(&["a", "b"]);
    let c_line: Arc<dyn InverseGraph> = Arc::new(line_over("c"));
    let lambda_b: Arc<dyn InverseGraph> = Arc::new(IntLine::new(a2.clone(), "b"));
    let lambda_a: Arc<dyn InverseGraph> = Arc::new(IntLine::new(a2, "a"));
    let product = FreeProduct::new(
        vec![(c_line, GlueRule::BySign { positive: 1, other: 0 })],
        vec![
            (lambda_b, GlueRule::Constant(0)),
            (lambda_a, GlueRule::Constant(0)),
        ],
    )
    .expect("antenna product");
    let alphabet = alphabet_cab();
    let oracle: OracleFn = Arc::new(move |v, word| {
        // Blocks: (One, 0, i) is a c-run, (Two, 0, m) a b-run, (Two, 1, m)
        // an a-run. The root behaves like a b-line vertex.
        let mut blocks = parse_blocks(v)?;
        for &l in word {
            let name = alphabet.name(l);
            let delta = if name.ends_with('\'') { -1 } else { 1 };
            let base = name.trim_end_matches('\'');
            match (base, blocks.last().copied()) {
                ("c", Some((Side::One, 0, i))) => {
                    if i + delta == 0 {
                        blocks.pop();
                    } else {
                        blocks.last_mut().expect("nonempty").2 = i + delta;
                    }
                }
                ("c", _) => blocks.push((Side::One, 0, delta)),
                ("a", Some((Side::Two, 1, m))) | ("b", Some((Side::Two, 0, m))) => {
                    if m + delta == 0 {
                        blocks.pop();
                    } else {
                        blocks.last_mut().expect("nonempty").2 = m + delta;
                    }
                }
                ("a", Some((Side::One, 0, i))) if i > 0 => {
                    blocks.push((Side::Two, 1, delta));
                }
                ("b", Some((Side::One, 0, i))) if i <= 0 => {
                    blocks.push((Side::Two, 0, delta));
                }
                ("b", None) => blocks.push((Side::Two, 0, delta)),
                ("a", _) | ("b", _) => {}
                _ => return None,
            }
        }
        Some(blocks_to_key(&blocks))
    });
    OracleGraph { name: "antenna".into(), graph: Arc::new(product), oracle }
}

/// Free product of a c-line against an a-line with dead tooth tips: the
/// spine is the a-line, every spine vertex carries a c-line tooth, and
/// tooth vertices absorb `a`. Spheres grow linearly (4n).
pub fn comb() -> OracleGraph {
    let a2 = Alphabet::symmetric(&["a"]);
    let c_line: Arc<dyn InverseGraph> = Arc::new(line_over("c"));
    let a_line: Arc<dyn InverseGraph> = Arc::new(IntLine::new(a2.clone(), "a"));
    let lambda: Arc<dyn InverseGraph> = Arc::new(loop_vertex(a2));
    let product = FreeProduct::new(
        vec![(c_line, GlueRule::Constant(1))],
        vec![
            (a_line, GlueRule::Constant(0)),
            (lambda, GlueRule::Constant(0)),
        ],
    )
    .expect("comb product");
    let alphabet = alphabet_ca();
    let oracle: OracleFn = Arc::new(move |v, word| {
        // Blocks: (One, 0, i) is a tooth run, (Two, 0, m) a spine run.
        let mut blocks = parse_blocks(v)?;
        for &l in word {
            let name = alphabet.name(l);
            let delta = if name.ends_with('\'') { -1 } else { 1 };
            let base = name.trim_end_matches('\'');
            match (base, blocks.last().copied()) {
                ("c", Some((Side::One, 0, i))) => {
                    if i + delta == 0 {
                        blocks.pop();
                    } else {
                        blocks.last_mut().expect("nonempty").2 = i + delta;
                    }
                }
                ("c", _) => blocks.push((Side::One, 0, delta)),
                ("a", Some((Side::One, 0, _))) => {}
                ("a", Some((Side::Two, 0, m))) => {
                    if m + delta == 0 {
                        blocks.pop();
                    } else {
                        blocks.last_mut().expect("nonempty").2 = m + delta;
                    }
                }
                ("a", _) => blocks.push((Side::Two, 0, delta)),
                _ => return None,
            }
        }
        Some(blocks_to_key(&blocks))
    });
    OracleGraph { name: "comb".into(), graph: Arc::new(product), oracle }
}

/// Two c-lines joined at their origins by a double `a`-bridge (both `a` and
/// `a'` cross it); `a` absorbs everywhere else. Every conjugate `c^n a c^-n`
/// acts as a transposition, so the transition group is infinite with
/// unbounded torsion.
pub fn torsion_graph() -> OracleGraph {
    let a2 = Alphabet::symmetric(&["a"]);
    let a = a2.lookup("a").expect("a");
    let ai = a2.inv(a);
    let x0 = VKey::new("x0");
    let x1 = VKey::new("x1");
    let bridge: Arc<dyn InverseGraph> = Arc::new(
        FiniteGraph::from_edges(
            a2.clone(),
            x0.clone(),
            &[
                (x0.clone(), a, x1.clone()),
                (x1.clone(), a, x0.clone()),
                (x0.clone(), ai, x1.clone()),
                (x1, ai, x0),
            ],
        )
        .expect("bridge graph"),
    );
    let c_line: Arc<dyn InverseGraph> = Arc::new(line_over("c"));
    let lambda: Arc<dyn InverseGraph> = Arc::new(loop_vertex(a2));
    let product = FreeProduct::new(
        vec![(c_line, GlueRule::Constant(1))],
        vec![
            (bridge, GlueRule::Constant(0)),
            (lambda, GlueRule::Constant(0)),
        ],
    )
    .expect("torsion product");
    let alphabet = alphabet_ca();
    let oracle: OracleFn = Arc::new(move |v, word| {
        // State (side, i): side 0 is the root line, side 1 the line at the
        // far bridge vertex; i is the c-coordinate.
        let (mut side, mut i) = match AlternatingWord::parse(v)?.entries.as_slice() {
            [] => (0u8, 0i64),
            [(Side::One, 0, k)] => (0, k.as_str().parse().ok()?),
            [(Side::Two, 0, w)] if w.as_str() == "x1" => (1, 0),
            [(Side::Two, 0, w), (Side::One, 0, k)] if w.as_str() == "x1" => {
                (1, k.as_str().parse().ok()?)
            }
            _ => return None,
        };
        for &l in word {
            match alphabet.name(l) {
                "c" => i += 1,
                "c'" => i -= 1,
                "a" | "a'" => {
                    if i == 0 {
                        side ^= 1;
                    }
                }
                _ => return None,
            }
        }
        let mut blocks = Vec::new();
        if side == 1 {
            blocks.push((Side::Two, 0, VKey::new("x1")));
        }
        if i != 0 {
            blocks.push((Side::One, 0, VKey::new(i.to_string())));
        }
        Some(AlternatingWord { entries: blocks }.to_key())
    });
    OracleGraph { name: "torsion".into(), graph: Arc::new(product), oracle }
}

// ---------------------------------------------------------------------------
// End-cone presentations.

fn spec(
    frontier: &[&str],
    internal: &[(usize, Letter, usize)],
    children: &[usize],
    cross: &[(usize, Letter, usize, usize)],
) -> ConeTypeSpec {
    ConeTypeSpec {
        frontier: frontier.iter().map(|s| s.to_string()).collect(),
        internal_edges: internal.to_vec(),
        children: children.to_vec(),
        cross_edges: cross.to_vec(),
    }
}

/// Three types: root, right ray, left ray.
pub fn line_system() -> EndConeSystem {
    let al = Alphabet::symmetric(&["a"]);
    let a = al.lookup("a").unwrap();
    let ai = al.inv(a);
    let types = vec![
        spec(&["x0"], &[], &[1, 2], &[(0, a, 0, 0), (0, ai, 1, 0)]),
        spec(&["p"], &[], &[1], &[(0, a, 0, 0)]),
        spec(&["m"], &[], &[2], &[(0, ai, 0, 0)]),
    ];
    EndConeSystem::new(al, types, 0).expect("line system")
}

/// The 5-cycle: root, the level-1 pair, the level-2 pair with its chord.
pub fn cycle_system() -> EndConeSystem {
    let al = Alphabet::symmetric(&["a"]);
    let a = al.lookup("a").unwrap();
    let ai = al.inv(a);
    let types = vec![
        spec(&["x0"], &[], &[1], &[(0, a, 0, 0), (0, ai, 0, 1)]),
        spec(&["f1", "f4"], &[], &[2], &[(0, a, 0, 0), (1, ai, 0, 1)]),
        spec(&["f2", "f3"], &[(0, a, 1), (1, ai, 0)], &[], &[]),
    ];
    EndConeSystem::new(al, types, 0).expect("cycle system")
}

/// Free tree on `k` generators: a root type plus one ray type per letter.
pub fn tree_system(k: usize) -> EndConeSystem {
    let gen_names: Vec<String> = (0..k)
        .map(|i| {
            char::from_u32('a' as u32 + i as u32)
                .expect("few generators")
                .to_string()
        })
        .collect();
    let name_refs: Vec<&str> = gen_names.iter().map(|s| s.as_str()).collect();
    let al = Alphabet::symmetric(&name_refs);
    let letters: Vec<Letter> = al.letters().collect();
    let mut types = Vec::with_capacity(1 + letters.len());
    types.push(spec(
        &["e"],
        &[],
        &letters.iter().map(|l| 1 + l.index()).collect::<Vec<_>>(),
        &letters
            .iter()
            .map(|&l| (0, l, l.index(), 0))
            .collect::<Vec<_>>(),
    ));
    for &x in &letters {
        // Below a vertex entered by x, every letter except x' goes deeper.
        let continuing: Vec<Letter> = letters
            .iter()
            .copied()
            .filter(|&y| y != al.inv(x))
            .collect();
        types.push(spec(
            &["v"],
            &[],
            &continuing.iter().map(|y| 1 + y.index()).collect::<Vec<_>>(),
            &continuing
                .iter()
                .enumerate()
                .map(|(slot, &y)| (0, y, slot, 0))
                .collect::<Vec<_>>(),
        ));
    }
    EndConeSystem::new(al, types, 0).expect("tree system")
}

/// Four types: root, the bridging middle cone (both line directions plus the
/// swapped line tail), and the self-similar right and left cones.
pub fn omega_system() -> EndConeSystem {
    let al = Alphabet::symmetric(&["a", "b", "c"]);
    let lk = |s: &str| al.lookup(s).unwrap();
    let (a, ai, b, bi, c, ci) = (lk("a"), lk("a'"), lk("b"), lk("b'"), lk("c"), lk("c'"));
    let types = vec![
        // Root p0: b loops, a and c lead into the single level-1 cone.
        spec(
            &["x0"],
            &[(0, b, 0), (0, bi, 0)],
            &[1],
            &[(0, a, 0, 0), (0, ai, 0, 1), (0, c, 0, 2), (0, ci, 0, 2)],
        ),
        // Middle cone, frontier {p_n, p_-n, q_(n-1)} at level n = 1.
        spec(
            &["P+", "P-", "Q"],
            &[
                (0, b, 0),
                (0, bi, 0),
                (1, b, 1),
                (1, bi, 1),
                (2, a, 2),
                (2, ai, 2),
            ],
            &[2, 3],
            &[
                (0, a, 0, 0),
                (0, c, 0, 1),
                (0, ci, 0, 1),
                (2, b, 0, 1),
                (1, ai, 1, 0),
                (1, c, 1, 1),
                (1, ci, 1, 1),
                (2, bi, 1, 1),
            ],
        ),
        // Right cone, frontier {p_(n+1), q_n}.
        spec(
            &["P", "Q"],
            &[(0, b, 0), (0, bi, 0), (1, a, 1), (1, ai, 1)],
            &[2],
            &[(0, a, 0, 0), (0, c, 0, 1), (0, ci, 0, 1), (1, b, 0, 1)],
        ),
        // Left cone, mirror image.
        spec(
            &["P", "Q"],
            &[(0, b, 0), (0, bi, 0), (1, a, 1), (1, ai, 1)],
            &[3],
            &[(0, ai, 0, 0), (0, c, 0, 1), (0, ci, 0, 1), (1, bi, 0, 1)],
        ),
    ];
    EndConeSystem::new(al, types, 0).expect("omega system")
}

/// Seven types: root, two c-ray types (one per gluing sign), and four
/// loop-line ray types.
pub fn antenna_system() -> EndConeSystem {
    let al = alphabet_cab();
    let lk = |s: &str| al.lookup(s).unwrap();
    let (c, ci, a, ai, b, bi) = (lk("c"), lk("c'"), lk("a"), lk("a'"), lk("b"), lk("b'"));
    let types = vec![
        // 0 root: like a b-line vertex, a loops.
        spec(
            &["x0"],
            &[(0, a, 0), (0, ai, 0)],
            &[1, 2, 5, 6],
            &[(0, c, 0, 0), (0, ci, 1, 0), (0, b, 2, 0), (0, bi, 3, 0)],
        ),
        // 1 positive c-ray: carries an a-line, b loops.
        spec(
            &["z"],
            &[(0, b, 0), (0, bi, 0)],
            &[1, 3, 4],
            &[(0, c, 0, 0), (0, a, 1, 0), (0, ai, 2, 0)],
        ),
        // 2 negative c-ray: carries a b-line, a loops.
        spec(
            &["z"],
            &[(0, a, 0), (0, ai, 0)],
            &[2, 5, 6],
            &[(0, ci, 0, 0), (0, b, 1, 0), (0, bi, 2, 0)],
        ),
        // 3 positive a-ray.
        spec(
            &["w"],
            &[(0, b, 0), (0, bi, 0)],
            &[3, 1, 2],
            &[(0, a, 0, 0), (0, c, 1, 0), (0, ci, 2, 0)],
        ),
        // 4 negative a-ray.
        spec(
            &["w"],
            &[(0, b, 0), (0, bi, 0)],
            &[4, 1, 2],
            &[(0, ai, 0, 0), (0, c, 1, 0), (0, ci, 2, 0)],
        ),
        // 5 positive b-ray.
        spec(
            &["w"],
            &[(0, a, 0), (0, ai, 0)],
            &[5, 1, 2],
            &[(0, b, 0, 0), (0, c, 1, 0), (0, ci, 2, 0)],
        ),
        // 6 negative b-ray.
        spec(
            &["w"],
            &[(0, a, 0), (0, ai, 0)],
            &[6, 1, 2],
            &[(0, bi, 0, 0), (0, c, 1, 0), (0, ci, 2, 0)],
        ),
    ];
    EndConeSystem::new(al, types, 0).expect("antenna system")
}

/// Five types: root, two tooth-ray types, two spine-ray types.
pub fn comb_system() -> EndConeSystem {
    let al = alphabet_ca();
    let lk = |s: &str| al.lookup(s).unwrap();
    let (c, ci, a, ai) = (lk("c"), lk("c'"), lk("a"), lk("a'"));
    let types = vec![
        spec(
            &["x0"],
            &[],
            &[3, 4, 1, 2],
            &[(0, a, 0, 0), (0, ai, 1, 0), (0, c, 2, 0), (0, ci, 3, 0)],
        ),
        // 1 positive tooth ray: a absorbs.
        spec(&["z"], &[(0, a, 0), (0, ai, 0)], &[1], &[(0, c, 0, 0)]),
        // 2 negative tooth ray.
        spec(&["z"], &[(0, a, 0), (0, ai, 0)], &[2], &[(0, ci, 0, 0)]),
        // 3 positive spine ray: fresh teeth at every vertex.
        spec(
            &["w"],
            &[],
            &[3, 1, 2],
            &[(0, a, 0, 0), (0, c, 1, 0), (0, ci, 2, 0)],
        ),
        // 4 negative spine ray.
        spec(
            &["w"],
            &[],
            &[4, 1, 2],
            &[(0, ai, 0, 0), (0, c, 1, 0), (0, ci, 2, 0)],
        ),
    ];
    EndConeSystem::new(al, types, 0).expect("comb system")
}

/// Four types: root, the far bridge vertex with its own line, and the two
/// absorbing c-ray types.
pub fn torsion_system() -> EndConeSystem {
    let al = alphabet_ca();
    let lk = |s: &str| al.lookup(s).unwrap();
    let (c, ci, a, ai) = (lk("c"), lk("c'"), lk("a"), lk("a'"));
    let types = vec![
        // Root x0: both a and a' cross the bridge.
        spec(
            &["x0"],
            &[],
            &[1, 2, 3],
            &[(0, a, 0, 0), (0, ai, 0, 0), (0, c, 1, 0), (0, ci, 2, 0)],
        ),
        // 1 far bridge vertex x1, carrying the second line.
        spec(&["w"], &[], &[2, 3], &[(0, c, 0, 0), (0, ci, 1, 0)]),
        // 2 positive c-ray: a absorbs.
        spec(&["z"], &[(0, a, 0), (0, ai, 0)], &[2], &[(0, c, 0, 0)]),
        // 3 negative c-ray.
        spec(&["z"], &[(0, a, 0), (0, ai, 0)], &[3], &[(0, ci, 0, 0)]),
    ];
    EndConeSystem::new(al, types, 0).expect("torsion system")
}

/// Companion presentation for the torsion example: the quotient that kills
/// the bridge is a disjoint pair of absorbing c-lines, one per component.
pub fn torsion_companion() -> Vec<EndConeSystem> {
    let padded = pad_system(&line_system_over_c(), alphabet_ca()).expect("padded line");
    vec![padded.clone(), padded]
}

fn line_system_over_c() -> EndConeSystem {
    let al = Alphabet::symmetric(&["c"]);
    let c = al.lookup("c").unwrap();
    let ci = al.inv(c);
    let types = vec![
        spec(&["x0"], &[], &[1, 2], &[(0, c, 0, 0), (0, ci, 1, 0)]),
        spec(&["p"], &[], &[1], &[(0, c, 0, 0)]),
        spec(&["m"], &[], &[2], &[(0, ci, 0, 0)]),
    ];
    EndConeSystem::new(al, types, 0).expect("c-line system")
}

/// The worked examples by name, paired with their presentations.
pub fn example_pair(name: &str) -> Option<(OracleGraph, EndConeSystem)> {
    match name {
        "omega" => Some((omega(), omega_system())),
        "antenna" => Some((antenna(), antenna_system())),
        "comb" => Some((comb(), comb_system())),
        "torsion" => Some((torsion_graph(), torsion_system())),
        _ => None,
    }
}

pub const EXAMPLE_NAMES: [&str; 4] = ["omega", "antenna", "comb", "torsion"];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::verify_presentation;
    use crate::graph::{sphere_sizes, walk};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn random_word(al: &Alphabet, rng: &mut StdRng, len: usize) -> Vec<Letter> {
        (0..len)
            .map(|_| Letter(rng.gen_range(0..al.len()) as u16))
            .collect()
    }

    fn check_oracle(example: &OracleGraph, seed: u64) {
        let mut rng = StdRng::seed_from_u64(seed);
        let root = example.graph.root();
        for _ in 0..200 {
            let setup_len = rng.gen_range(0..8);
            let setup = random_word(example.graph.alphabet(), &mut rng, setup_len);
            let Some(start) = walk(example.graph.as_ref(), &root, &setup) else {
                panic!("complete graph must walk anywhere");
            };
            let len = rng.gen_range(0..12);
            let w = random_word(example.graph.alphabet(), &mut rng, len);
            let by_graph = walk(example.graph.as_ref(), &start, &w);
            let by_oracle = example.oracle_walk(&start, &w);
            assert_eq!(by_graph, by_oracle, "word {w:?} from {start}");
        }
    }

    #[test]
    fn omega_oracle_matches_graph() {
        check_oracle(&omega(), 11);
    }

    #[test]
    fn antenna_oracle_matches_graph() {
        check_oracle(&antenna(), 12);
    }

    #[test]
    fn comb_oracle_matches_graph() {
        check_oracle(&comb(), 13);
    }

    #[test]
    fn torsion_oracle_matches_graph() {
        check_oracle(&torsion_graph(), 14);
    }

    #[test]
    fn tree_spheres_grow_by_three() {
        let g = free_tree(&["a", "b"]);
        assert_eq!(sphere_sizes(&g, &g.root(), 4), vec![1, 4, 12, 36, 108]);
    }

    #[test]
    fn comb_spheres_grow_linearly() {
        let g = comb();
        assert_eq!(
            sphere_sizes(g.graph.as_ref(), &g.graph.root(), 5),
            vec![1, 4, 8, 12, 16, 20]
        );
    }

    #[test]
    fn antenna_spheres_triple() {
        let g = antenna();
        assert_eq!(
            sphere_sizes(g.graph.as_ref(), &g.graph.root(), 4),
            vec![1, 4, 12, 36, 108]
        );
    }

    #[test]
    fn presentation_growth_matches_graph_growth() {
        // The type recursion counts spheres without touching the graph;
        // both must agree with the closed forms.
        let tree = tree_system(2);
        assert_eq!(tree.sphere_sizes(6), vec![1, 4, 12, 36, 108, 324, 972]);
        let comb = comb_system();
        assert_eq!(comb.sphere_sizes(5), vec![1, 4, 8, 12, 16, 20]);
        let g = omega();
        let sys = omega_system();
        let by_graph: Vec<u128> = sphere_sizes(g.graph.as_ref(), &g.graph.root(), 6)
            .into_iter()
            .map(|n| n as u128)
            .collect();
        assert_eq!(sys.sphere_sizes(6), by_graph);
    }

    #[test]
    fn all_systems_validate_and_present_their_graphs() {
        for name in EXAMPLE_NAMES {
            let (example, sys) = example_pair(name).unwrap();
            assert_eq!(sys.validate(6), Vec::<String>::new(), "{name}");
            let sys = Arc::new(sys);
            let outcome = verify_presentation(&sys, example.graph.as_ref(), 7);
            assert!(outcome.is_verified(), "{name}: {outcome:?}");
        }
    }

    #[test]
    fn tree_system_presents_the_tree() {
        let sys = Arc::new(tree_system(2));
        assert_eq!(sys.validate(5), Vec::<String>::new());
        let outcome = verify_presentation(&sys, &free_tree(&["a", "b"]), 6);
        assert!(outcome.is_verified(), "{outcome:?}");
    }

    #[test]
    fn companion_members_validate() {
        for member in torsion_companion() {
            assert_eq!(member.validate(6), Vec::<String>::new());
        }
    }

    #[test]
    fn paired_lines_swap_is_involutive() {
        let g = omega();
        let al = g.graph.alphabet().clone();
        let w = al.parse_word("c c").unwrap();
        assert_eq!(walk(g.graph.as_ref(), &g.graph.root(), &w), Some(g.graph.root()));
    }
}
