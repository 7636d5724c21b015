//! Command-line front end. Every command prints JSON (or DOT, or a TSV table) on stdout
//! and exits with 0, or with 1 (parse error), 2 (validation failure) or 3 (violated
//! mathematical precondition).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::Rng;
use serde::Serialize;

use crate::algebra::SCHEMA;
use crate::curves::{self, GradedCurve};
use crate::fuzz;
use crate::homs::{records, IntersectionRecord};
use crate::mutation::{self, mutation_graph, Direction};
use crate::oracle::{self, FieldChoice, Fp, PathAlgebra, Q};
use crate::reduction;
use crate::session::{self, arc_index, hom_doc, load_algebra, orbit_doc, Failure};
use crate::silting::{check_admissible, GradedDissection, SiltingReport};
use crate::surface::DissectedSurface;

#[derive(Debug, Parser)]
#[command(name = "siltsurf", version, about = "Surface model of the perfect derived category of a gentle algebra")]
pub struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DirArg {
    Left,
    Right,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FuzzKind {
    Algebra,
    Curve,
    Dissection,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check that an algebra document describes a finite-dimensional gentle algebra.
    Validate { algebra: PathBuf },
    /// Dump the marked surface with its ∘-dissection.
    Surface { algebra: PathBuf },
    /// Dump the dual ●-dissection.
    Dual { algebra: PathBuf },
    /// Degree table of Hom(X, Y) read from the intersections of the curves.
    Hom {
        algebra: PathBuf,
        x: PathBuf,
        y: PathBuf,
        /// Print JSON with the intersection records instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// Oriented intersections of two graded curves, with their degrees.
    Intersect { algebra: PathBuf, x: PathBuf, y: PathBuf },
    /// Admissibility, presilting, silting and tilting verdicts for a graded dissection.
    SiltingCheck { algebra: PathBuf, dissection: PathBuf },
    /// Left or right mutation at one arc; the initial dissection when none is given.
    Mutate {
        algebra: PathBuf,
        dissection: Option<PathBuf>,
        #[arg(long)]
        arc: String,
        #[arg(long = "dir", value_enum)]
        dir: DirArg,
        /// Write the mutated dissection here instead of embedding it in the report.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Mutation graph up to a depth, in Graphviz format.
    Graph {
        algebra: PathBuf,
        dissection: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        #[arg(long = "dir", value_enum, default_value = "both")]
        dir: DirArg,
    },
    /// Cut the surface along an arc given as a curve document.
    Cut { algebra: PathBuf, arc: PathBuf },
    /// Orbit of a curve under ⟨1⟩ in the reduction at an arc.
    Orbit {
        algebra: PathBuf,
        curve: PathBuf,
        #[arg(long)]
        gamma: PathBuf,
    },
    /// Hom in the orbit category, from the cut surface and from the oracle.
    OrbitHom {
        algebra: PathBuf,
        x: PathBuf,
        y: PathBuf,
        #[arg(long)]
        gamma: PathBuf,
    },
    /// Degree table of Hom(X, Y) computed from the complexes of projectives.
    OracleHom { algebra: PathBuf, x: PathBuf, y: PathBuf },
    /// Seeded random algebras, curves or silting dissections.
    Fuzz {
        #[arg(long, value_enum)]
        kind: FuzzKind,
        /// Algebra for curves and dissections; a random one when absent.
        #[arg(long)]
        algebra: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value_t = 5)]
        max_vertices: usize,
    },
    /// Serve the explorer protocol over HTTP.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
    },
}

/// Output of one command run.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::parse(format!("{}: {e}", path.display())))
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("documents serialize");
    s.push('\n');
    s
}

fn curve(s: &DissectedSurface, path: &Path) -> Result<GradedCurve, Failure> {
    curves::from_json(s, &read(path)?).map_err(|e| {
        let f: Failure = e.into();
        Failure { message: format!("{}: {}", path.display(), f.message), ..f }
    })
}

fn dissection(s: &DissectedSurface, path: Option<&Path>) -> Result<GradedDissection, Failure> {
    match path {
        Some(p) => Ok(GradedDissection::from_json(s, &read(p)?)?),
        None => Ok(GradedDissection::initial(s)),
    }
}

fn field() -> Result<FieldChoice, Failure> {
    FieldChoice::from_env().map_err(|e| Failure::validation(format!("SILTSURF_FIELD: {e}")))
}

#[derive(Serialize)]
struct ValidateDoc {
    schema: String,
    vertices: usize,
    arrows: usize,
    relations: usize,
    genus: i64,
    #[serde(rename = "boundaryCount")]
    boundary_count: usize,
    #[serde(rename = "dissectionSize")]
    dissection_size: i64,
}

#[derive(Serialize)]
struct IntersectDoc {
    schema: String,
    #[serde(rename = "intersectionNumber")]
    intersection_number: usize,
    records: Vec<IntersectionRecord>,
}

#[derive(Serialize)]
struct CheckDoc {
    schema: String,
    #[serde(flatten)]
    report: SiltingReport,
}

#[derive(Serialize)]
struct MutateDoc {
    #[serde(flatten)]
    exchange: session::ExchangeDoc,
    #[serde(skip_serializing_if = "Option::is_none")]
    dissection: Option<crate::silting::DissectionDoc>,
}

#[derive(Serialize)]
struct OracleDoc {
    schema: String,
    field: String,
    #[serde(rename = "perDegree")]
    per_degree: BTreeMap<i64, usize>,
    total: usize,
}

#[derive(Serialize)]
struct OrbitHomDoc {
    schema: String,
    field: String,
    /// Intersections of the reduced images on the cut surface.
    geometric: usize,
    /// Hom in the orbit category from cones of approximations.
    oracle: usize,
    agree: bool,
    #[serde(rename = "caseTag")]
    case_tag: u8,
    /// The orbit of the second curve that the oracle sums over.
    orbit: session::OrbitDoc,
}

fn execute(cli: Cli) -> Result<String, Failure> {
    match cli.command {
        Command::Validate { algebra } => {
            let (alg, s) = load_algebra(&read(&algebra)?)?;
            Ok(json(&ValidateDoc {
                schema: SCHEMA.to_string(),
                vertices: alg.n_vertices(),
                arrows: alg.arrows.len(),
                relations: alg.relations.len(),
                genus: s.genus,
                boundary_count: s.boundary_count(),
                dissection_size: s.dissection_size(),
            }))
        }
        Command::Surface { algebra } => Ok(json(&load_algebra(&read(&algebra)?)?.1.dump())),
        Command::Dual { algebra } => Ok(json(&load_algebra(&read(&algebra)?)?.1.dual_dump())),
        Command::Hom { algebra, x, y, json: as_json } => {
            let (_, s) = load_algebra(&read(&algebra)?)?;
            let doc = hom_doc(&s, &curve(&s, &x)?, &curve(&s, &y)?)?;
            if as_json {
                return Ok(json(&doc));
            }
            let mut out = String::from("degree\tdim\n");
            for (d, n) in &doc.per_degree {
                out.push_str(&format!("{d}\t{n}\n"));
            }
            out.push_str(&format!("total\t{}\n", doc.total));
            Ok(out)
        }
        Command::Intersect { algebra, x, y } => {
            let (_, s) = load_algebra(&read(&algebra)?)?;
            let (x, y) = (curve(&s, &x)?, curve(&s, &y)?);
            let recs = records(&s, &x, &y);
            Ok(json(&IntersectDoc {
                schema: SCHEMA.to_string(),
                intersection_number: crate::homs::intersection_number(&s, &x, &y),
                records: recs,
            }))
        }
        Command::SiltingCheck { algebra, dissection: d } => {
            let (_, s) = load_algebra(&read(&algebra)?)?;
            let gd = dissection(&s, Some(&d))?;
            Ok(json(&CheckDoc { schema: SCHEMA.to_string(), report: gd.report(&s) }))
        }
        Command::Mutate { algebra, dissection: d, arc, dir, out } => {
            let (_, s) = load_algebra(&read(&algebra)?)?;
            let gd = dissection(&s, d.as_deref())?;
            let idx = arc_index(&gd, &arc)?;
            let dir = match dir {
                DirArg::Left => Direction::Left,
                DirArg::Right => Direction::Right,
                DirArg::Both => return Err(Failure::validation("mutation needs --dir left or --dir right")),
            };
            let (next, ex) = mutation::mutate(&s, &gd, idx, dir)?;
            let exchange = session::exchange_doc(&s, &ex, &next);
            let embedded = match out {
                Some(p) => {
                    std::fs::write(&p, next.to_json(&s) + "\n")
                        .map_err(|e| Failure::parse(format!("{}: {e}", p.display())))?;
                    None
                }
                None => Some(next.to_doc(&s)),
            };
            Ok(json(&MutateDoc { exchange, dissection: embedded }))
        }
        Command::Graph { algebra, dissection: d, depth, dir } => {
            let (_, s) = load_algebra(&read(&algebra)?)?;
            let gd = dissection(&s, d.as_deref())?;
            let dirs: &[Direction] = match dir {
                DirArg::Left => &[Direction::Left],
                DirArg::Right => &[Direction::Right],
                DirArg::Both => &[Direction::Left, Direction::Right],
            };
            Ok(mutation_graph(&s, &gd, depth, dirs)?.to_dot(&s))
        }
        Command::Cut { algebra, arc } => {
            let (_, s) = load_algebra(&read(&algebra)?)?;
            let g = curve(&s, &arc)?;
            Ok(json(&reduction::cut(&s, &g.word)?.dump(&s)))
        }
        Command::Orbit { algebra, curve: c, gamma } => {
            let (_, s) = load_algebra(&read(&algebra)?)?;
            let (x, g) = (curve(&s, &c)?, curve(&s, &gamma)?);
            let o = reduction::orbit_of(&s, &x, &g)?;
            Ok(json(&orbit_doc(&s, &g, &o)))
        }
        Command::OrbitHom { algebra, x, y, gamma } => {
            let (_, s) = load_algebra(&read(&algebra)?)?;
            let (x, y, g) = (curve(&s, &x)?, curve(&s, &y)?, curve(&s, &gamma)?);
            let c = reduction::cut(&s, &g.word)?;
            let geometric = reduction::orbit_hom(&s, &x, &y, &g)?;
            let o = reduction::orbit_of(&s, &y, &g)?;
            let pa = PathAlgebra::new(&s.algebra);
            let f = field()?;
            let oracle = match f {
                FieldChoice::Rational => reduction::orbit_hom_oracle::<Q>(&pa, &s, &x, &y, &g)?,
                FieldChoice::Prime(p) => {
                    oracle::set_modulus(p);
                    reduction::orbit_hom_oracle::<Fp>(&pa, &s, &x, &y, &g)?
                }
            };
            Ok(json(&OrbitHomDoc {
                schema: SCHEMA.to_string(),
                field: f.name(),
                geometric,
                oracle,
                agree: geometric == oracle,
                case_tag: c.case_tag,
                orbit: orbit_doc(&s, &g, &o),
            }))
        }
        Command::OracleHom { algebra, x, y } => {
            let (_, s) = load_algebra(&read(&algebra)?)?;
            let (x, y) = (curve(&s, &x)?, curve(&s, &y)?);
            let f = field()?;
            let dims: BTreeMap<i64, usize> =
                oracle::hom_dims(f, &s, &x, &y).into_iter().filter(|&(_, n)| n > 0).collect();
            Ok(json(&OracleDoc { schema: SCHEMA.to_string(), field: f.name(), total: dims.values().sum(), per_degree: dims }))
        }
        Command::Fuzz { kind, algebra, count, max_vertices } => {
            let mut r = fuzz::rng(cli.seed);
            let given = match &algebra {
                Some(p) => Some(load_algebra(&read(p)?)?.1),
                None => None,
            };
            let mut docs = Vec::new();
            for _ in 0..count {
                let s = match &given {
                    Some(s) => s.clone(),
                    None => fuzz::random_surface(&mut r, max_vertices.max(1)),
                };
                let doc = match kind {
                    FuzzKind::Algebra => serde_json::to_value(s.algebra.to_doc()),
                    FuzzKind::Curve => serde_json::to_value(curves::encode(&s, &fuzz::random_graded(&mut r, &s, 6, 0.2, 2))),
                    FuzzKind::Dissection => serde_json::to_value(random_silting(&mut r, &s, 6).to_doc(&s)),
                }
                .expect("documents serialize");
                docs.push(doc);
            }
            Ok(if docs.len() == 1 { json(&docs[0]) } else { json(&docs) })
        }
        Command::Serve { host, port } => {
            let rt = tokio::runtime::Runtime::new().map_err(|e| Failure::precondition(e.to_string()))?;
            rt.block_on(crate::serve::serve(&host, port)).map_err(|e| Failure::precondition(e.to_string()))?;
            Ok(String::new())
        }
    }
}

/// A silting dissection reached by a random walk of at most `steps` mutations from the
/// initial one.
pub fn random_silting(r: &mut fuzz::Rng64, s: &DissectedSurface, steps: usize) -> GradedDissection {
    let mut gd = GradedDissection::initial(s);
    for _ in 0..r.gen_range(0..=steps) {
        let idx = r.gen_range(0..gd.arcs.len());
        let dir = if r.gen_bool(0.5) { Direction::Left } else { Direction::Right };
        gd = mutation::mutate_unchecked(s, &gd, idx, dir).expect("mutation of a silting dissection").0;
    }
    debug_assert!(check_admissible(s, &gd.words()).is_dissection());
    gd
}

/// Run the command line given by `args` (program name first).
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { code: 1, stdout: String::new(), stderr: text }
            } else {
                Outcome { code: 0, stdout: text, stderr: String::new() }
            };
        }
    };
    match execute(cli) {
        Ok(stdout) => Outcome { code: 0, stdout, stderr: String::new() },
        Err(f) => Outcome { code: f.exit_code(), stdout: String::new(), stderr: format!("error: {}\n", f.message) },
    }
}
