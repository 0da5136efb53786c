//! Graph spec files: a small JSON vocabulary that names every graph the
//! tool can operate on, from built-in examples to free products and PDA
//! configuration graphs.

use std::fs;
use std::io::Read;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use serde::Deserialize;

use endcone::alphabet::{Alphabet, AlphabetSchema};
use endcone::cone::SystemSchema;
use endcone::examples::{self, example_pair, EXAMPLE_NAMES};
use endcone::graph::{FiniteGraph, InverseGraph, VKey};
use endcone::pda::{self, InversePda, PdaSchema};
use endcone::product::{FreeProduct, GlueRule};
use endcone::{EndConeSystem, Letter};

/// One graph, as named in a spec file. `example` points into the built-in
/// catalog; the other kinds carry their own payload.
#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GraphSpec {
    Example {
        name: String,
    },
    Line {
        generator: String,
        /// Extra letters that act trivially, for padded alphabets.
        #[serde(default)]
        also: Vec<String>,
    },
    Cycle {
        size: u64,
    },
    Finite {
        alphabet: AlphabetSchema,
        root: String,
        edges: Vec<(String, String, String)>,
    },
    FreeProduct {
        side1: Vec<FactorSpec>,
        side2: Vec<FactorSpec>,
    },
    Union {
        members: Vec<GraphSpec>,
    },
    Pda {
        #[serde(default)]
        machine: Option<PdaSchema>,
        #[serde(default)]
        path: Option<String>,
    },
    System {
        #[serde(default)]
        system: Option<SystemSchema>,
        #[serde(default)]
        path: Option<String>,
    },
}

/// A factor of a free product: the graph and where the other family glues on.
#[derive(Debug, Deserialize)]
pub struct FactorSpec {
    pub graph: GraphSpec,
    pub glue: GlueRule,
}

/// Built-in graphs addressable by bare name, each with the presentations of
/// its transition group (one system per member graph of the family).
pub fn catalog() -> Vec<&'static str> {
    let mut names = vec!["line", "tree"];
    names.extend(EXAMPLE_NAMES);
    names
}

fn named(name: &str) -> Option<(Arc<dyn InverseGraph>, Vec<EndConeSystem>)> {
    match name {
        "line" => Some((Arc::new(examples::line()), vec![examples::line_system()])),
        "tree" => Some((
            Arc::new(examples::free_tree(&["a", "b"])),
            vec![examples::tree_system(2)],
        )),
        _ => {
            let (example, sys) = example_pair(name)?;
            Some((example.graph, vec![sys]))
        }
    }
}

/// Resolve a spec argument: a bare catalog name, `-` for stdin, or a path
/// to a JSON spec file. Files holding a bare system schema (as written by
/// `infer`) or a bare PDA schema are accepted as shorthand for the
/// corresponding spec kind.
pub fn load(arg: &str) -> Result<GraphSpec> {
    if named(arg).is_some() {
        return Ok(GraphSpec::Example { name: arg.to_string() });
    }
    let text = if arg == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .context("reading spec from stdin")?;
        buf
    } else {
        fs::read_to_string(arg).with_context(|| format!("reading spec file {arg}"))?
    };
    let as_spec: Result<GraphSpec, _> = serde_json::from_str(&text);
    match as_spec {
        Ok(spec) => Ok(spec),
        Err(spec_err) => {
            if let Ok(schema) = serde_json::from_str::<SystemSchema>(&text) {
                return Ok(GraphSpec::System { system: Some(schema), path: None });
            }
            if let Ok(schema) = serde_json::from_str::<PdaSchema>(&text) {
                return Ok(GraphSpec::Pda { machine: Some(schema), path: None });
            }
            Err(spec_err).with_context(|| format!("parsing spec {arg}"))
        }
    }
}

fn read_aux(path: &str) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {path}"))
}

fn build_pda(machine: &Option<PdaSchema>, path: &Option<String>) -> Result<InversePda> {
    let schema = match (machine, path) {
        (Some(m), None) => m.clone(),
        (None, Some(p)) => serde_json::from_str(&read_aux(p)?)
            .with_context(|| format!("parsing PDA schema {p}"))?,
        _ => bail!("pda spec needs exactly one of `machine` or `path`"),
    };
    InversePda::from_schema(schema).map_err(|e| anyhow!("building PDA: {e}"))
}

fn build_system(system: &Option<SystemSchema>, path: &Option<String>) -> Result<EndConeSystem> {
    let schema = match (system, path) {
        (Some(s), None) => s.clone(),
        (None, Some(p)) => serde_json::from_str(&read_aux(p)?)
            .with_context(|| format!("parsing system schema {p}"))?,
        _ => bail!("system spec needs exactly one of `system` or `path`"),
    };
    EndConeSystem::try_from(schema).map_err(|e| anyhow!("building system: {e}"))
}

/// The machine of a pda-kind spec, for reversibility checks.
pub fn machine_of(spec: &GraphSpec) -> Result<InversePda> {
    match spec {
        GraphSpec::Pda { machine, path } => build_pda(machine, path),
        _ => bail!("reversibility checks need a spec of kind \"pda\""),
    }
}

/// Materialize the spec as a rooted inverse graph.
pub fn build_graph(spec: &GraphSpec) -> Result<Arc<dyn InverseGraph>> {
    match spec {
        GraphSpec::Example { name } => named(name)
            .map(|(g, _)| g)
            .ok_or_else(|| anyhow!("unknown example {name:?}; see `endcone examples`")),
        GraphSpec::Line { generator, also } => {
            let mut gens: Vec<&str> = vec![generator.as_str()];
            gens.extend(also.iter().map(|s| s.as_str()));
            let al = Alphabet::symmetric(&gens);
            Ok(Arc::new(examples::IntLine::new(al, generator)))
        }
        GraphSpec::Cycle { size } => {
            if *size == 0 {
                bail!("cycle size must be at least 1");
            }
            Ok(Arc::new(examples::cycle(*size)))
        }
        GraphSpec::Finite { alphabet, root, edges } => {
            let al: Alphabet = alphabet
                .clone()
                .try_into()
                .map_err(|e| anyhow!("alphabet: {e}"))?;
            let mut list: Vec<(VKey, Letter, VKey)> = Vec::new();
            for (u, a, v) in edges {
                let letter = al
                    .parse_letter(a)
                    .map_err(|e| anyhow!("edge letter {a:?}: {e}"))?;
                list.push((VKey::new(u.clone()), letter, VKey::new(v.clone())));
            }
            let g = FiniteGraph::from_edges(al, VKey::new(root.clone()), &list)
                .map_err(|e| anyhow!("finite graph: {e}"))?;
            Ok(Arc::new(g))
        }
        GraphSpec::FreeProduct { side1, side2 } => Ok(Arc::new(build_product(side1, side2)?)),
        GraphSpec::Union { .. } => {
            bail!("a union is a family, not a single graph; use it with wp/order")
        }
        GraphSpec::Pda { machine, path } => {
            let pda = build_pda(machine, path)?;
            Ok(Arc::new(pda::config_graph(Arc::new(pda))))
        }
        GraphSpec::System { system, path } => {
            let sys = Arc::new(build_system(system, path)?);
            Ok(Arc::new(sys.as_graph()))
        }
    }
}

/// Build the free product of the two factor families.
pub fn build_product(side1: &[FactorSpec], side2: &[FactorSpec]) -> Result<FreeProduct> {
    let realize = |factors: &[FactorSpec]| -> Result<Vec<(Arc<dyn InverseGraph>, GlueRule)>> {
        factors
            .iter()
            .map(|f| Ok((build_graph(&f.graph)?, f.glue.clone())))
            .collect()
    };
    FreeProduct::new(realize(side1)?, realize(side2)?).map_err(|e| anyhow!("free product: {e}"))
}

/// Materialize the spec as a family of end-cone systems, for the group
/// commands. Only specs that carry presentations qualify; raw graphs must
/// go through `infer` first.
pub fn build_systems(spec: &GraphSpec) -> Result<Vec<EndConeSystem>> {
    match spec {
        GraphSpec::Example { name } => named(name)
            .map(|(_, s)| s)
            .ok_or_else(|| anyhow!("unknown example {name:?}; see `endcone examples`")),
        GraphSpec::System { system, path } => Ok(vec![build_system(system, path)?]),
        GraphSpec::Union { members } => {
            let mut all = Vec::new();
            for m in members {
                all.extend(build_systems(m)?);
            }
            Ok(all)
        }
        _ => bail!("this spec kind has no presentation; run `infer` on it first"),
    }
}

/// The single end-cone system of a spec, for commands that need exactly one.
pub fn build_one_system(spec: &GraphSpec) -> Result<EndConeSystem> {
    let mut all = build_systems(spec)?;
    if all.len() != 1 {
        bail!("expected a single system, got a family of {}", all.len());
    }
    Ok(all.pop().expect("checked length"))
}
