//! Command-line front end: expand balls, decide the word problem, compute
//! orders, run transducers, infer and verify presentations, and build free
//! products, all over small JSON spec files.
//!
//! Structured results go to stdout as JSON; human summaries go to stderr.
//! Exit codes: 0 success/identity/finite, 1 non-identity/infinite,
//! 2 bad input, 3 inconclusive, 4 verification failure.

mod spec;

use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, bail, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use endcone::alphabet::Word;
use endcone::codec::Codec;
use endcone::cone::{verify_presentation, VerifyOutcome};
use endcone::graph::{expand_ball, sphere_sizes, walk, InverseGraph};
use endcone::group::{is_finite_group, order, word_problem, FinitenessResult, OrderResult};
use endcone::infer::{infer_system, InferError};
use endcone::transducer::VertexTransducer;
use endcone::{Ensemble, VKey};

use spec::GraphSpec;

const EXIT_OK: u8 = 0;
const EXIT_NONTRIVIAL: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_UNKNOWN: u8 = 3;
const EXIT_FAILED: u8 = 4;

#[derive(Parser)]
#[command(
    name = "endcone",
    version,
    about = "Inverse graphs with finitely many end cones and their transition groups"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
}

/// A SPEC argument is a built-in name (see `examples`), a path to a JSON
/// spec file, or `-` for a spec on stdin.
#[derive(Args)]
struct SpecArg {
    /// Graph spec: built-in name, file path, or `-`
    spec: String,
}

#[derive(Subcommand)]
enum Cmd {
    /// List the built-in graphs and their presentations
    Examples,
    /// Expand the ball around a vertex and print it
    Expand {
        #[command(flatten)]
        spec: SpecArg,
        /// Center vertex key (default: the root)
        #[arg(long)]
        center: Option<String>,
        #[arg(long, default_value_t = 3)]
        radius: u32,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Decide whether a word acts as the identity on the family
    Wp {
        #[command(flatten)]
        spec: SpecArg,
        /// The word, e.g. "a b' c"
        #[arg(required = true)]
        word: Vec<String>,
    },
    /// Compute the order of a word in the transition group
    Order {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(required = true)]
        word: Vec<String>,
        /// Cap on the exponent search
        #[arg(long, default_value_t = 1_000_000)]
        max: u64,
    },
    /// Walk a word from a vertex and print the endpoint
    Act {
        #[command(flatten)]
        spec: SpecArg,
        vertex: String,
        #[arg(required = true)]
        word: Vec<String>,
    },
    /// Build the vertex-code transducer of a presentation, or run a word on
    /// an encoded vertex
    Transducer {
        #[command(flatten)]
        spec: SpecArg,
        /// Print the transducer itself
        #[arg(long, conflicts_with = "run")]
        build: bool,
        /// Run: VERTEX WORD (encode VERTEX, stream the letters of WORD)
        #[arg(long, num_args = 2, value_names = ["VERTEX", "WORD"])]
        run: Option<Vec<String>>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Infer an end-cone presentation from a ball of the graph
    Infer {
        #[command(flatten)]
        spec: SpecArg,
        /// Ball radius to sample
        #[arg(long, default_value_t = 10)]
        radius: usize,
        /// Cone-type truncation depth
        #[arg(long, default_value_t = 2)]
        depth: usize,
    },
    /// Verify a presentation against a reference graph, or a PDA's
    /// reversibility
    Verify {
        #[command(flatten)]
        spec: SpecArg,
        /// Presentation to check against the spec graph (name, path, or `-`)
        #[arg(long)]
        system: Option<String>,
        /// Ball radius for the presentation check
        #[arg(long, default_value_t = 6)]
        radius: u32,
        /// Check reversibility of a PDA spec to this configuration depth
        #[arg(long, conflicts_with = "system")]
        reversibility: Option<usize>,
    },
    /// Build a free product spec and report its growth
    Freeproduct {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long, default_value_t = 4)]
        radius: u32,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}

fn emit(v: &serde_json::Value) {
    println!("{v}");
}

fn parse_word(ens_alphabet: &endcone::Alphabet, parts: &[String]) -> Result<Word> {
    ens_alphabet
        .parse_word(&parts.join(" "))
        .map_err(|e| anyhow!("word: {e}"))
}

fn ensemble(gspec: &GraphSpec) -> Result<Ensemble> {
    Ensemble::new(spec::build_systems(gspec)?).map_err(|e| anyhow!("family: {e}"))
}

fn run(cmd: Cmd) -> Result<u8> {
    match cmd {
        Cmd::Examples => cmd_examples(),
        Cmd::Expand { spec, center, radius, format } => {
            cmd_expand(&spec.spec, center.as_deref(), radius, format)
        }
        Cmd::Wp { spec, word } => cmd_wp(&spec.spec, &word),
        Cmd::Order { spec, word, max } => cmd_order(&spec.spec, &word, max),
        Cmd::Act { spec, vertex, word } => cmd_act(&spec.spec, &vertex, &word),
        Cmd::Transducer { spec, build, run, format } => {
            cmd_transducer(&spec.spec, build, run.as_deref(), format)
        }
        Cmd::Infer { spec, radius, depth } => cmd_infer(&spec.spec, radius, depth),
        Cmd::Verify { spec, system, radius, reversibility } => {
            cmd_verify(&spec.spec, system.as_deref(), radius, reversibility)
        }
        Cmd::Freeproduct { spec, radius } => cmd_freeproduct(&spec.spec, radius),
    }
}

fn cmd_examples() -> Result<u8> {
    let mut rows = Vec::new();
    for name in spec::catalog() {
        let gspec = GraphSpec::Example { name: name.to_string() };
        let systems = spec::build_systems(&gspec)?;
        let ens = Ensemble::new(systems).map_err(|e| anyhow!("family: {e}"))?;
        let letters: Vec<&str> = ens
            .alphabet()
            .letters()
            .map(|l| ens.alphabet().name(l))
            .collect();
        let types: Vec<usize> = ens.systems().iter().map(|s| s.type_count()).collect();
        let finite = matches!(is_finite_group(&ens), FinitenessResult::Finite { .. });
        rows.push(json!({
            "name": name,
            "alphabet": letters,
            "type_counts": types,
            "finite_group": finite,
        }));
    }
    emit(&json!(rows));
    eprintln!("{} built-in graphs", rows.len());
    Ok(EXIT_OK)
}

fn cmd_expand(arg: &str, center: Option<&str>, radius: u32, format: Format) -> Result<u8> {
    let g = spec::build_graph(&spec::load(arg)?)?;
    let center = center.map(VKey::new).unwrap_or_else(|| g.root());
    // Lazy graphs cannot enumerate membership, but every vertex they do
    // contain is the root or carries at least one edge.
    let known = center == g.root()
        || g.alphabet().letters().any(|a| g.neighbor(&center, a).is_some());
    if !known {
        bail!("vertex {center} is not in the graph");
    }
    let ball = expand_ball(g.as_ref(), &center, radius);
    match format {
        Format::Json => emit(&ball.to_json()),
        Format::Dot => print!("{}", ball.to_dot()),
    }
    eprintln!(
        "ball of radius {radius} at {center}: {} vertices, {}",
        ball.len(),
        if ball.is_complete_fragment() { "complete" } else { "has missing edges" }
    );
    Ok(EXIT_OK)
}

fn cmd_wp(arg: &str, word: &[String]) -> Result<u8> {
    let ens = ensemble(&spec::load(arg)?)?;
    let w = parse_word(ens.alphabet(), word)?;
    match word_problem(&ens, &w) {
        None => {
            emit(&json!({"identity": true, "word": ens.alphabet().format_word(&w)}));
            eprintln!("identity");
            Ok(EXIT_OK)
        }
        Some(witness) => {
            emit(&json!({
                "identity": false,
                "word": ens.alphabet().format_word(&w),
                "witness": witness,
            }));
            eprintln!(
                "not the identity: rotation {} moves frontier vertex {:?} of type {} to {}",
                witness.rotation, witness.frontier_vertex, witness.cone_type, witness.end
            );
            Ok(EXIT_NONTRIVIAL)
        }
    }
}

fn cmd_order(arg: &str, word: &[String], max: u64) -> Result<u8> {
    let ens = ensemble(&spec::load(arg)?)?;
    let w = parse_word(ens.alphabet(), word)?;
    match order(&ens, &w, max) {
        OrderResult::Finite { order } => {
            emit(&json!({"finite": true, "order": order}));
            eprintln!("order {order}");
            Ok(EXIT_OK)
        }
        OrderResult::InfiniteCertified { witness } => {
            emit(&json!({"finite": false, "witness": witness}));
            eprintln!(
                "infinite (certified): the orbit re-enters type {} at depth {} of a self-similar cone",
                witness.cone_type, witness.deep_depth
            );
            Ok(EXIT_NONTRIVIAL)
        }
        OrderResult::Unknown { exponent_searched, bound } => {
            emit(&json!({
                "finite": null,
                "exponent_searched": exponent_searched,
                "torsion_bound": bound,
            }));
            eprintln!("inconclusive after {exponent_searched} exponents");
            Ok(EXIT_UNKNOWN)
        }
    }
}

fn cmd_act(arg: &str, vertex: &str, word: &[String]) -> Result<u8> {
    let g = spec::build_graph(&spec::load(arg)?)?;
    let w = parse_word(g.alphabet(), word)?;
    let from = VKey::new(vertex);
    match walk(g.as_ref(), &from, &w) {
        Some(to) => {
            emit(&json!({
                "from": from.as_str(),
                "word": g.alphabet().format_word(&w),
                "to": to.as_str(),
            }));
            eprintln!("{from} -> {to}");
            Ok(EXIT_OK)
        }
        None => {
            emit(&json!({"from": from.as_str(), "defined": false}));
            eprintln!("walk undefined (vertex outside the graph, or an incomplete edge)");
            Ok(EXIT_UNKNOWN)
        }
    }
}

fn cmd_transducer(arg: &str, build: bool, run: Option<&[String]>, format: Format) -> Result<u8> {
    let sys = Arc::new(spec::build_one_system(&spec::load(arg)?)?);
    let tr = VertexTransducer::new(Arc::clone(&sys));
    match (build, run) {
        (true, None) => {
            match format {
                Format::Json => println!("{}", tr.to_json()),
                Format::Dot => print!("{}", tr.to_dot()),
            }
            eprintln!(
                "{} states over {} tape letters",
                tr.state_count(),
                tr.letters().len()
            );
            Ok(EXIT_OK)
        }
        (false, Some(parts)) => {
            let [vertex, word] = parts else {
                bail!("--run takes VERTEX WORD");
            };
            let w = sys
                .alphabet()
                .parse_word(word)
                .map_err(|e| anyhow!("word: {e}"))?;
            let addr = sys
                .parse_key(&VKey::new(vertex.clone()))
                .map_err(|e| anyhow!("vertex {vertex:?}: {e}"))?;
            let codec = Codec::new(&sys);
            let code = codec.encode(&addr);
            let out = tr.apply_word(&w, &code);
            let (end, used) = codec
                .decode_prefix(&out)
                .ok_or_else(|| anyhow!("output tape has no decodable prefix"))?;
            if used != out.len() {
                bail!("output tape decodes with {} trailing letters", out.len() - used);
            }
            let show = |c: &[endcone::codec::ConeLetter]| -> Vec<String> {
                c.iter().map(|l| l.to_string()).collect()
            };
            emit(&json!({
                "vertex": vertex,
                "word": sys.alphabet().format_word(&w),
                "input_code": show(&code),
                "output_code": show(&out),
                "end": sys.address_key(&end).as_str(),
            }));
            eprintln!("{vertex} -> {}", sys.address_key(&end));
            Ok(EXIT_OK)
        }
        _ => bail!("pass exactly one of --build or --run VERTEX WORD"),
    }
}

fn cmd_infer(arg: &str, radius: usize, depth: usize) -> Result<u8> {
    let g = spec::build_graph(&spec::load(arg)?)?;
    match infer_system(g.as_ref(), radius, depth) {
        Ok(sys) => {
            println!("{}", sys.to_json());
            eprintln!(
                "inferred {} cone types at depth {depth}, certified against the radius-{} ball",
                sys.type_count(),
                radius - depth,
            );
            Ok(EXIT_OK)
        }
        Err(e @ InferError::TooShallow { .. }) => Err(anyhow!(e)),
        Err(e) => {
            emit(&json!({"inferred": false, "error": e.to_string()}));
            eprintln!("inference failed: {e}");
            Ok(EXIT_UNKNOWN)
        }
    }
}

fn cmd_verify(
    arg: &str,
    system: Option<&str>,
    radius: u32,
    reversibility: Option<usize>,
) -> Result<u8> {
    match (system, reversibility) {
        (Some(sys_arg), None) => {
            let g = spec::build_graph(&spec::load(arg)?)?;
            let sys = Arc::new(spec::build_one_system(&spec::load(sys_arg)?)?);
            match verify_presentation(&sys, g.as_ref(), radius) {
                VerifyOutcome::Verified { radius, ball_size } => {
                    emit(&json!({"verified": true, "radius": radius, "ball": ball_size}));
                    eprintln!("verified: balls of radius {radius} agree ({ball_size} vertices)");
                    Ok(EXIT_OK)
                }
                VerifyOutcome::Mismatch { detail } => {
                    emit(&json!({"verified": false, "detail": detail}));
                    eprintln!("mismatch: {detail}");
                    Ok(EXIT_FAILED)
                }
            }
        }
        (None, Some(depth)) => {
            let machine = spec::machine_of(&spec::load(arg)?)?;
            let violations = machine.validate_reversibility(depth);
            if violations.is_empty() {
                emit(&json!({"reversible": true, "depth": depth}));
                eprintln!("reversible to configuration depth {depth}");
                Ok(EXIT_OK)
            } else {
                emit(&json!({"reversible": false, "violations": violations}));
                eprintln!("{} reversibility violations", violations.len());
                Ok(EXIT_FAILED)
            }
        }
        _ => bail!("pass exactly one of --system SPEC or --reversibility DEPTH"),
    }
}

fn cmd_freeproduct(arg: &str, radius: u32) -> Result<u8> {
    let gspec = spec::load(arg)?;
    let GraphSpec::FreeProduct { side1, side2 } = &gspec else {
        bail!("freeproduct needs a spec of kind \"free_product\"");
    };
    let g = spec::build_product(side1, side2)?;
    let root = g.root();
    let spheres = sphere_sizes(&g, &root, radius);
    let letters: Vec<&str> = g.alphabet().letters().map(|l| g.alphabet().name(l)).collect();
    emit(&json!({
        "alphabet": letters,
        "factors": [side1.len(), side2.len()],
        "root": root.as_str(),
        "radius": radius,
        "spheres": spheres,
    }));
    eprintln!(
        "free product of {}+{} factors; ball of radius {radius} has {} vertices",
        side1.len(),
        side2.len(),
        spheres.iter().sum::<usize>()
    );
    Ok(EXIT_OK)
}
