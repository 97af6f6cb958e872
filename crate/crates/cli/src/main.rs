use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rodcone::analysis::{
    algebraic_verdict, canonical_subgraph, decide_minimal_rigidity, decide_rod_rigidity, sample_cone_realization,
    sample_seeds, Agreement, AnalysisError, CanonicalSubgraph, DecideOptions, Field, Mode, SkipReason, DEFAULT_SEED,
};
use rodcone::generate::random_connected_geometry;
use rodcone::oracle::realization::RealizationDoc;
use rodcone::oracle::field::{P61, P61_ALT};
use rodcone::oracle::{is_regular, realize_cone, rotation, ConcurrenceMatrix, Fp61, Fp61Alt, LinearRealization, Scalar};
use rodcone::render::rod_configuration_svg;
use rodcone::{ConeGraph, ConeIncidenceGeometry, IncidenceGeometry};
use num_rational::BigRational;
use serde_json::json;

const EXIT_RIGID: u8 = 0;
const EXIT_ERROR: u8 = 1;
const EXIT_FLEXIBLE: u8 = 2;
const EXIT_DISAGREEMENT: u8 = 3;

/// Decide infinitesimal rigidity of planar rod configurations.
///
/// Exit status: 0 rigid, 2 flexible, 1 error, 3 the combinatorial and
/// algebraic verdicts disagree (a defect; a reproduction bundle goes to stderr).
#[derive(Debug, Parser)]
#[command(name = "rodcone", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Rigidity verdict from the pebble game on a cone graph.
    Check {
        geometry: PathBuf,
        /// Also rank random realizations of the cone incidence geometry.
        #[arg(long)]
        cross_validate: bool,
        #[arg(long, default_value = "p61")]
        field: Field,
    },
    /// Whether every rod is needed for rigidity.
    Minimal {
        geometry: PathBuf,
        #[arg(long)]
        cross_validate: bool,
        #[arg(long, default_value = "p61")]
        field: Field,
    },
    /// The canonical maximally independent cone subgraph and its subgeometry.
    Canon { geometry: PathBuf },
    /// Algebraic verdict only, from random or given realizations.
    Oracle {
        geometry: PathBuf,
        /// Realization of the rods (JSON); cone points are drawn at random.
        #[arg(long)]
        realization: Option<PathBuf>,
        /// Rotate the given coordinates by the rational parameter t, e.g. `1/2`.
        #[arg(long, requires = "realization")]
        rotate: Option<String>,
        #[arg(long, default_value = "p61")]
        field: Field,
        /// Random realizations to rank when none is given.
        #[arg(long, default_value_t = 3)]
        samples: usize,
        /// Check regularity of the rod realization, refusing geometries with
        /// more incidences than the given budget.
        #[arg(long, requires = "realization", num_args = 0..=1, default_missing_value = "16")]
        check_regular: Option<usize>,
        /// Write the concurrence matrix of the cone realization as CSV.
        #[arg(long)]
        dump_matrix: Option<PathBuf>,
    },
    /// Graphviz drawing of a cone graph.
    Dot {
        geometry: PathBuf,
        /// Inner vertex of each line, comma separated.
        #[arg(long, value_delimiter = ',', conflicts_with = "canonical")]
        inner: Option<Vec<usize>>,
        /// Draw the canonical cone graph with its independent subgraph solid.
        #[arg(long)]
        canonical: bool,
    },
    /// SVG drawing of a rod configuration with its cone points.
    Svg {
        geometry: PathBuf,
        #[arg(long)]
        realization: PathBuf,
        #[arg(long)]
        rotate: Option<String>,
        /// Leave out the cone points.
        #[arg(long)]
        no_cones: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Cross-validate verdicts on random connected geometries.
    Fuzz {
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long, default_value_t = 10)]
        max_points: usize,
        #[arg(long, default_value_t = 6)]
        max_lines: usize,
        /// Probability that a line contains a given point.
        #[arg(long, default_value_t = 0.4)]
        density: f64,
        #[arg(long, default_value = "p61")]
        field: Field,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            if let Some(AnalysisError::Disagreement(bundle)) = e.downcast_ref::<AnalysisError>() {
                eprintln!("error: combinatorial and algebraic verdicts disagree ({})", bundle.detail);
                eprintln!("{}", bundle.to_json());
                return ExitCode::from(EXIT_DISAGREEMENT);
            }
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

fn run(cli: &Cli) -> anyhow::Result<u8> {
    match &cli.command {
        Command::Check {
            geometry,
            cross_validate,
            field,
        } => check(cli, geometry, options(cli, *cross_validate, *field)),
        Command::Minimal {
            geometry,
            cross_validate,
            field,
        } => minimal(cli, geometry, options(cli, *cross_validate, *field)),
        Command::Canon { geometry } => canon(cli, geometry),
        Command::Oracle {
            geometry,
            realization,
            rotate,
            field,
            samples,
            check_regular,
            dump_matrix,
        } => {
            let s = load_geometry(geometry)?;
            let args = OracleArgs {
                seed: cli.seed,
                format: cli.format,
                samples: *samples,
                rotate: rotate.as_deref(),
                check_regular: *check_regular,
                dump_matrix: dump_matrix.as_deref(),
            };
            match realization {
                Some(path) => {
                    let text = read(path)?;
                    let doc: RealizationDoc =
                        serde_json::from_str(&text).with_context(|| format!("{}: invalid realization", path.display()))?;
                    let modulus = doc.modulus.as_deref().and_then(|m| m.parse::<u64>().ok());
                    match (doc.field.as_str(), modulus) {
                        ("rational", _) => oracle_given::<BigRational>(&s, &text, &args),
                        ("zp", Some(P61)) => oracle_given::<Fp61>(&s, &text, &args),
                        ("zp", Some(P61_ALT)) => oracle_given::<Fp61Alt>(&s, &text, &args),
                        (f, _) => bail!("{}: unsupported field `{f}`", path.display()),
                    }
                }
                None => match field {
                    Field::P61 => oracle_random::<Fp61>(&s, *field, &args),
                    Field::P61Alt => oracle_random::<Fp61Alt>(&s, *field, &args),
                    Field::Rational => oracle_random::<BigRational>(&s, *field, &args),
                },
            }
        }
        Command::Dot {
            geometry,
            inner,
            canonical,
        } => {
            let s = load_geometry(geometry)?;
            let dot = if *canonical {
                let w = canonical_subgraph(&s)?;
                let kept: Vec<usize> = (0..w.kept.len()).filter(|&i| w.kept[i]).collect();
                w.cone.to_dot(&s, Some(&kept))
            } else {
                let g = match inner {
                    Some(inner) => ConeGraph::with_inner(&s, inner.clone())?,
                    None => ConeGraph::new(&s),
                };
                g.to_dot(&s, None)
            };
            print!("{dot}");
            Ok(EXIT_RIGID)
        }
        Command::Svg {
            geometry,
            realization,
            rotate,
            no_cones,
            output,
        } => {
            let s = load_geometry(geometry)?;
            let rot = parse_rotation::<BigRational>(rotate.as_deref())?;
            let rho = LinearRealization::<BigRational>::from_json(&s, &read(realization)?, rot)
                .with_context(|| format!("{}: invalid realization", realization.display()))?;
            let cones = if *no_cones {
                None
            } else {
                let cone = ConeIncidenceGeometry::new(&s);
                let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
                let ext = realize_cone(&s, &cone, &rho, &mut rng)?;
                Some(ext.coords[s.num_points()..].to_vec())
            };
            let svg = rod_configuration_svg(&s, &rho, cones.as_deref());
            match output {
                Some(path) => fs::write(path, svg).with_context(|| format!("writing {}", path.display()))?,
                None => print!("{svg}"),
            }
            Ok(EXIT_RIGID)
        }
        Command::Fuzz {
            count,
            max_points,
            max_lines,
            density,
            field,
        } => fuzz(cli, *count, *max_points, *max_lines, *density, *field),
    }
}

fn options(cli: &Cli, cross_validate: bool, field: Field) -> DecideOptions {
    DecideOptions {
        mode: if cross_validate {
            Mode::CrossValidated
        } else {
            Mode::Combinatorial
        },
        seed: cli.seed,
        field,
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

/// Reads the text format, or JSON when the file ends in `.json`.
fn load_geometry(path: &Path) -> anyhow::Result<IncidenceGeometry> {
    let text = read(path)?;
    let parsed = if path.extension().is_some_and(|e| e == "json") {
        IncidenceGeometry::from_json(&text)
    } else {
        IncidenceGeometry::parse(&text)
    };
    parsed.with_context(|| format!("{}", path.display()))
}

fn parse_rotation<F: Scalar>(t: Option<&str>) -> anyhow::Result<Option<(F, F)>> {
    let Some(t) = t else {
        return Ok(None);
    };
    let (n, d) = t.split_once('/').unwrap_or((t, "1"));
    let value = F::from_pair(n.trim(), d.trim()).with_context(|| format!("invalid rotation parameter `{t}`"))?;
    rotation(&value).map(Some).with_context(|| format!("rotation parameter `{t}` gives 1 + t^2 = 0"))
}

fn verdict_code(rigid: bool) -> u8 {
    if rigid {
        EXIT_RIGID
    } else {
        EXIT_FLEXIBLE
    }
}

fn check(cli: &Cli, path: &Path, opts: DecideOptions) -> anyhow::Result<u8> {
    let s = load_geometry(path)?;
    let v = decide_rod_rigidity(&s, &opts)?;
    match cli.format {
        Format::Text => {
            println!("{}", v.summary());
            if let Some(a) = &v.algebraic {
                println!(
                    "algebraic: ranks {:?} of {} over {} ({})",
                    a.ranks, a.required, opts.field, v.agreement
                );
            } else if opts.mode == Mode::CrossValidated {
                println!("algebraic: {}", v.agreement);
            }
        }
        Format::Json => println!("{}", v.report(None).to_json()),
    }
    Ok(verdict_code(v.is_rigid()))
}

fn minimal(cli: &Cli, path: &Path, opts: DecideOptions) -> anyhow::Result<u8> {
    let s = load_geometry(path)?;
    let r = decide_minimal_rigidity(&s, &opts)?;
    let removable = r.removable_rods();
    match cli.format {
        Format::Text => {
            println!("{}", r.verdict.summary());
            for (l, d) in r.deletions.iter().enumerate() {
                println!("without rod {l}: {}", d.summary());
            }
            if removable.is_empty() {
                println!("minimally rigid");
            } else {
                let list: Vec<String> = removable.iter().map(usize::to_string).collect();
                println!("not minimally rigid (removable rods: {})", list.join(", "));
            }
        }
        Format::Json => println!("{}", r.verdict.report(Some(removable.clone())).to_json()),
    }
    Ok(verdict_code(removable.is_empty()))
}

fn vertex_label(s: &IncidenceGeometry, v: usize) -> String {
    if v < s.num_points() {
        s.name(v).map_or_else(|| v.to_string(), str::to_string)
    } else {
        format!("c{}", v - s.num_points())
    }
}

fn canon(cli: &Cli, path: &Path) -> anyhow::Result<u8> {
    let s = load_geometry(path)?;
    let w: CanonicalSubgraph = canonical_subgraph(&s)?;
    let d = &w.derived.geometry;
    let label = |&(u, v): &(usize, usize)| format!("{}-{}", vertex_label(&s, u), vertex_label(&s, v));
    match cli.format {
        Format::Text => {
            let order: Vec<String> = w.line_order.iter().map(usize::to_string).collect();
            println!("line order: {}", order.join(" "));
            let inner: Vec<String> = w.cone.inner_vertices().iter().map(|&p| vertex_label(&s, p)).collect();
            println!("inner vertices: {}", inner.join(" "));
            println!("kept {} of {} cone edges:", w.num_edges(), w.kept.len());
            for &i in &w.trial_order {
                let mark = if w.kept[i] { "+" } else { "-" };
                println!("  {mark} {}", label(&w.cone.edges()[i]));
            }
            println!(
                "derived subgeometry: {} points, {} lines, {} incidences (|L'| + 2|P'| - 3 = {})",
                d.num_points(),
                d.num_lines(),
                d.num_incidences(),
                (d.num_lines() + 2 * d.num_points()).saturating_sub(3)
            );
            print!("{}", d.to_text());
        }
        Format::Json => {
            let edges = |keep: bool| -> Vec<[usize; 2]> {
                w.trial_order
                    .iter()
                    .filter(|&&i| w.kept[i] == keep)
                    .map(|&i| {
                        let (u, v) = w.cone.edges()[i];
                        [u, v]
                    })
                    .collect()
            };
            let doc = json!({
                "line_order": w.line_order,
                "inner_vertices": w.cone.inner_vertices(),
                "kept_edges": edges(true),
                "rejected_edges": edges(false),
                "minimally_rigid": w.is_minimally_rigid(),
                "derived": {
                    "points": d.num_points(),
                    "lines": d.lines(),
                    "source_lines": w.derived.source_lines,
                },
            });
            println!("{}", serde_json::to_string_pretty(&doc)?);
        }
    }
    Ok(verdict_code(w.play.is_rigid()))
}

struct OracleArgs<'a> {
    seed: u64,
    format: Format,
    samples: usize,
    rotate: Option<&'a str>,
    check_regular: Option<usize>,
    dump_matrix: Option<&'a Path>,
}

fn oracle_random<F: Scalar>(s: &IncidenceGeometry, field: Field, args: &OracleArgs) -> anyhow::Result<u8> {
    let a = algebraic_verdict::<F>(s, args.seed, args.samples.max(1))?;
    if let Some(path) = args.dump_matrix {
        let cone = ConeIncidenceGeometry::new(s);
        let seed = sample_seeds(args.seed, 1)[0];
        let rho = sample_cone_realization::<F>(s, &cone, seed)?;
        write_matrix(path, &ConcurrenceMatrix::new(&cone.geometry, &rho))?;
    }
    match args.format {
        Format::Text => {
            let state = if a.is_rigid() {
                "rigid"
            } else if a.is_consistent() {
                "flexible"
            } else {
                "inconsistent"
            };
            println!("{state} (ranks {:?} of {} over {field})", a.ranks, a.required);
        }
        Format::Json => println!("{}", serde_json::to_string_pretty(&a)?),
    }
    Ok(verdict_code(a.is_rigid()))
}

fn oracle_given<F: Scalar>(s: &IncidenceGeometry, text: &str, args: &OracleArgs) -> anyhow::Result<u8> {
    let label = match F::modulus() {
        Some(P61) => "p61",
        Some(_) => "p61-alt",
        None => "rational",
    };
    let rot = parse_rotation::<F>(args.rotate)?;
    let rho = LinearRealization::<F>::from_json(s, text, rot)?;
    if !rho.is_proper() {
        bail!("realization is not proper: two points share coordinates");
    }
    let rods = ConcurrenceMatrix::new(s, &rho);
    let cone = ConeIncidenceGeometry::new(s);
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let ext = realize_cone(s, &cone, &rho, &mut rng)?;
    let m = ConcurrenceMatrix::new(&cone.geometry, &ext);
    let (rank, required) = (m.rank(), m.max_rank());
    if let Some(path) = args.dump_matrix {
        write_matrix(path, &m)?;
    }
    let regular = match args.check_regular {
        Some(budget) => Some(is_regular(s, &rho, budget)?),
        None => None,
    };
    match args.format {
        Format::Text => {
            let state = if rank == required { "rigid" } else { "flexible" };
            println!("{state} (rank {rank} of {required} over {label})");
            println!("rods: rank {} of {}", rods.rank(), rods.num_rows());
            if let Some(r) = regular {
                println!("regular: {}", if r { "yes" } else { "no" });
            }
        }
        Format::Json => {
            let doc = json!({
                "field": label,
                "rank": rank,
                "required": required,
                "rigid": rank == required,
                "rod_rank": rods.rank(),
                "rod_rows": rods.num_rows(),
                "regular": regular,
            });
            println!("{}", serde_json::to_string_pretty(&doc)?);
        }
    }
    Ok(verdict_code(rank == required))
}

fn write_matrix<F: Scalar>(path: &Path, m: &ConcurrenceMatrix<F>) -> anyhow::Result<()> {
    fs::write(path, m.to_csv()).with_context(|| format!("writing {}", path.display()))
}

/// Draws before `fuzz` gives up, per geometry requested.
const FUZZ_DRAWS_PER_CASE: usize = 50;

fn fuzz(cli: &Cli, count: usize, max_points: usize, max_lines: usize, density: f64, field: Field) -> anyhow::Result<u8> {
    if max_points < 2 || max_lines < 1 || !(0.0..=1.0).contains(&density) {
        bail!("need --max-points >= 2, --max-lines >= 1 and --density in [0, 1]");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    let mut skipped = BTreeMap::<&str, usize>::new();
    let mut disagreements = Vec::new();
    let (mut compared, mut agree, mut rigid, mut drawn) = (0, 0, 0, 0);
    // geometries without a proper realization cannot be compared; they are
    // counted and replaced, batch by batch so the result is seed-determined
    while compared < count && drawn < count.saturating_mul(FUZZ_DRAWS_PER_CASE) {
        let cases: Vec<(IncidenceGeometry, u64)> = (0..count - compared)
            .map(|_| {
                let s = random_connected_geometry(&mut rng, max_points, max_lines, density)
                    .context("could not draw a connected geometry with these parameters")?;
                Ok((s, rng.gen()))
            })
            .collect::<anyhow::Result<_>>()?;
        drawn += cases.len();
        let outcomes: Vec<_> = cases
            .par_iter()
            .map(|(s, seed)| {
                let opts = DecideOptions {
                    mode: Mode::CrossValidated,
                    seed: *seed,
                    field,
                };
                decide_rod_rigidity(s, &opts).map(|v| (v.is_rigid(), v.agreement))
            })
            .collect();
        for outcome in outcomes {
            match outcome {
                Ok((r, Agreement::Agree)) => {
                    compared += 1;
                    agree += 1;
                    rigid += r as usize;
                }
                Ok((_, Agreement::Skipped(SkipReason::Infeasible))) => {
                    *skipped.entry(SkipReason::Infeasible.as_str()).or_default() += 1
                }
                Ok((_, Agreement::Skipped(reason))) => {
                    compared += 1;
                    *skipped.entry(reason.as_str()).or_default() += 1;
                }
                Err(AnalysisError::Disagreement(b)) => {
                    compared += 1;
                    disagreements.push(b);
                }
                Err(e) => return Err(e.into()),
            }
        }
    }
    let pass = disagreements.is_empty() && compared == count;
    match cli.format {
        Format::Text => {
            println!(
                "{compared} geometries compared ({drawn} drawn): {agree} agree ({rigid} rigid), {} disagree",
                disagreements.len()
            );
            for (k, v) in &skipped {
                println!("  skipped ({k}): {v}");
            }
            if compared < count {
                println!("  gave up after {drawn} draws");
            }
            println!("{}", if pass { "PASS" } else { "FAIL" });
        }
        Format::Json => {
            let doc = json!({
                "requested": count,
                "compared": compared,
                "drawn": drawn,
                "agree": agree,
                "rigid": rigid,
                "disagree": disagreements.len(),
                "skipped": skipped,
                "pass": pass,
            });
            println!("{}", serde_json::to_string_pretty(&doc)?);
        }
    }
    for b in &disagreements {
        eprintln!("{}", b.to_json());
    }
    Ok(if !disagreements.is_empty() {
        EXIT_DISAGREEMENT
    } else if pass {
        EXIT_RIGID
    } else {
        EXIT_ERROR
    })
}
