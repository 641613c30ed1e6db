use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use sha2::{Digest, Sha256};

use cantor_clique::loop_graph::LoopGraph;
use cantor_clique::render::{embedding_svg, surface_svg};
use cantor_clique::tree::{build, embed_level1, extend_level, TreeEmbedding};
use cantor_clique::verify::{
    check_clique, check_loop_blocking, check_prefix_forcing, default_max_len, forced_prefix_len, verify_pk,
    VerificationReport,
};
use cantor_clique::{intersection_number, is_simple, Code, Error, MarkedSurface};

#[derive(Parser)]
#[command(name = "cantor-clique", version, about = "Rays, loops and an embedded dyadic tree in the plane minus a Cantor set")]
struct Cli {
    #[command(flatten)]
    cfg: RunConfig,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args, Clone, Debug, Serialize)]
struct RunConfig {
    /// Number of nested disks D_1..D_K in the surface.
    #[arg(long, global = true, default_value_t = 2)]
    truncation: u32,
    /// Chunks handed to each new vertex from level 2 on (even, at least 2).
    #[arg(long, global = true, default_value_t = 4)]
    chunks_per_vertex: u32,
    /// Tree level to build or verify.
    #[arg(long, global = true, default_value_t = 2)]
    level: u32,
    /// Length bound for exhaustive searches (default depends on the command).
    #[arg(long, global = true)]
    max_len: Option<usize>,
    /// Output directory.
    #[arg(long, global = true, env = "CANTOR_CLIQUE_OUT", default_value = "out")]
    #[serde(skip)]
    out: PathBuf,
    /// Worker threads (output never depends on it).
    #[arg(long, global = true)]
    #[serde(skip)]
    jobs: Option<usize>,
    /// Write SVG figures.
    #[arg(long, global = true, overrides_with = "no_svg")]
    #[serde(skip)]
    svg: bool,
    /// Do not write SVG figures.
    #[arg(long, global = true)]
    #[serde(skip)]
    no_svg: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Write the canonical surface as JSON (and SVG).
    Surface,
    /// Build the tree up to `--level` and write it as JSON, with one SVG per level.
    Embed,
    /// Run every check on the tree at `--level`, built on the surface of
    /// truncation `--level`, or on an embedding read from a file.
    Verify {
        #[arg(long)]
        embedding: Option<PathBuf>,
        /// Length bound for the loop search (default: the forced-prefix length).
        #[arg(long)]
        loop_len: Option<usize>,
    },
    /// Geometric intersection number of two codes.
    Intersect { a: String, b: String },
    /// Whether a code is simple.
    Simple { code: String },
    /// Whether the given codes are pairwise disjoint.
    Disjoint { codes: Vec<String> },
    /// Graph of disjoint simple loops.
    Loopgraph {
        #[command(subcommand)]
        cmd: LoopCmd,
    },
}

#[derive(Subcommand)]
enum LoopCmd {
    /// Write the graph as JSON adjacency lists and as a text edge list.
    Build,
    /// Distance between two loops.
    Dist { a: String, b: String },
}

enum Failure {
    Check,
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl RunConfig {
    fn svg(&self) -> bool {
        !self.no_svg || self.svg
    }

    /// Short content hash of the parameters that determine the output.
    fn tag(&self, command: &str) -> String {
        let json = serde_json::to_string(&(command, self)).expect("config serializes");
        hex::encode(&Sha256::digest(json.as_bytes())[..6])
    }

    fn surface(&self, truncation: u32) -> Result<MarkedSurface, Failure> {
        Ok(MarkedSurface::canonical(truncation, self.chunks_per_vertex)?)
    }
}

fn write(dir: &Path, name: &str, body: &str) -> Result<PathBuf, Failure> {
    std::fs::create_dir_all(dir).map_err(|e| Failure::Usage(format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    std::fs::write(&path, body).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    println!("wrote {}", path.display());
    Ok(path)
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn code(s: &MarkedSurface, text: &str) -> Result<Code, Failure> {
    let c: Code = text.parse()?;
    c.validate(s)?;
    Ok(c)
}

fn run(cli: Cli) -> Result<(), Failure> {
    let cfg = &cli.cfg;
    if let Some(n) = cfg.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .map_err(|e| Failure::Usage(e.to_string()))?;
    }
    match &cli.cmd {
        Command::Surface => {
            let s = cfg.surface(cfg.truncation)?;
            let tag = cfg.tag("surface");
            write(&cfg.out, &format!("surface-{tag}.json"), &json(&s))?;
            if cfg.svg() {
                write(&cfg.out, &format!("surface-{tag}.svg"), &surface_svg(&s))?;
            }
        }
        Command::Embed => {
            let s = cfg.surface(cfg.truncation)?;
            if cfg.level == 0 || cfg.level > cfg.truncation {
                return Err(Error::LevelOutOfRange { level: cfg.level, truncation: cfg.truncation }.into());
            }
            let tag = cfg.tag("embed");
            let mut e = embed_level1(&s)?;
            loop {
                if cfg.svg() {
                    write(&cfg.out, &format!("embedding-{tag}-level{}.svg", e.level), &embedding_svg(&e)?)?;
                }
                if e.level == cfg.level {
                    break;
                }
                e = extend_level(&e)?;
            }
            write(&cfg.out, &format!("embedding-{tag}.json"), &json(&e))?;
        }
        Command::Verify { embedding, loop_len } => {
            let e: TreeEmbedding = match embedding {
                Some(path) => {
                    let text = std::fs::read_to_string(path)
                        .map_err(|err| Failure::Usage(format!("{}: {err}", path.display())))?;
                    serde_json::from_str(&text).map_err(|err| Failure::Usage(format!("{}: {err}", path.display())))?
                }
                None => build(&cfg.surface(cfg.level)?, cfg.level)?,
            };
            let l = cfg.max_len.unwrap_or_else(|| default_max_len(&e));
            let ll = loop_len.unwrap_or_else(|| forced_prefix_len(&e));
            let reports: Vec<VerificationReport> = vec![
                verify_pk(&e)?,
                check_clique(&e)?,
                check_prefix_forcing(&e, l)?,
                check_loop_blocking(&e, ll)?,
            ];
            for r in &reports {
                print!("{r}");
            }
            let tag = cfg.tag(&format!("verify {:?} {:?}", embedding, loop_len));
            write(&cfg.out, &format!("report-{tag}.json"), &json(&reports))?;
            if reports.iter().any(|r| !r.passed()) {
                return Err(Failure::Check);
            }
        }
        Command::Intersect { a, b } => {
            let s = cfg.surface(cfg.truncation)?;
            println!("{}", intersection_number(&s, &code(&s, a)?, &code(&s, b)?)?);
        }
        Command::Simple { code: c } => {
            let s = cfg.surface(cfg.truncation)?;
            let simple = is_simple(&s, &code(&s, c)?)?;
            println!("{simple}");
            if !simple {
                return Err(Failure::Check);
            }
        }
        Command::Disjoint { codes } => {
            let s = cfg.surface(cfg.truncation)?;
            let cs = codes.iter().map(|c| code(&s, c)).collect::<Result<Vec<_>, _>>()?;
            let mut ok = true;
            for i in 0..cs.len() {
                for j in i + 1..cs.len() {
                    let n = intersection_number(&s, &cs[i], &cs[j])?;
                    if n != 0 {
                        println!("{} and {} meet {n} times", cs[i], cs[j]);
                        ok = false;
                    }
                }
            }
            println!("{}", if ok { "disjoint" } else { "not disjoint" });
            if !ok {
                return Err(Failure::Check);
            }
        }
        Command::Loopgraph { cmd } => {
            let s = cfg.surface(cfg.truncation)?;
            let g = LoopGraph::build(&s, cfg.max_len.unwrap_or(1))?;
            match cmd {
                LoopCmd::Build => {
                    let tag = cfg.tag("loopgraph");
                    println!("{} vertices, {} edges", g.vertices.len(), g.num_edges());
                    write(&cfg.out, &format!("loopgraph-{tag}.json"), &json(&g))?;
                    write(&cfg.out, &format!("loopgraph-{tag}.edges"), &g.edge_list())?;
                }
                LoopCmd::Dist { a, b } => match g.distance(&code(&s, a)?, &code(&s, b)?)? {
                    Some(d) => println!("{d}"),
                    None => println!("unreachable"),
                },
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
