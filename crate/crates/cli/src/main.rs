use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use systolic::generators::{generate, GeneratorSpec};
use systolic::geometry::{ball_area, LengthEngine};
use systolic::io::{write_trace_csv, ComplexDocument, NamedCochain, RealizationDocument};
use systolic::optimize::{optimize_restarts, OptimizationTrace, OptimizerConfig};
use systolic::realization::{realize_cycle, Pairing};
use systolic::verify::{
    default_radii, radius_bound, verify_ball_growth, verify_cover_bound, verify_main_inequality, Verdict,
    VerificationReport, SLACK,
};
use systolic::z2::{betti_numbers, cohomology_basis, cup_witness_pairs, homology_basis};
use systolic::{exec, validate, Complex2, MetricComplex, Z2Vector};

/// Z₂ cup products, surface realizations and systolic estimates on
/// piecewise-flat 2-complexes.
#[derive(Parser)]
#[command(name = "systolic", version)]
struct Cli {
    /// Machine-readable JSON output.
    #[arg(long, global = true, conflicts_with = "text")]
    json: bool,
    /// Human-readable output (the default).
    #[arg(long, global = true)]
    text: bool,
    /// Run everything on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the structural invariants of a complex.
    Validate(Input),
    /// Reduced Betti numbers and (co)homology bases.
    Homology(Input),
    /// Pairs of degree-1 classes with non-zero cup product.
    CupWitness(Input),
    /// Closed surface mapping onto a 2-cycle.
    Realize {
        #[command(flatten)]
        input: Input,
        /// Named degree-2 cochain in the document; defaults to the first
        /// homology basis cycle.
        #[arg(long)]
        cycle: Option<String>,
        /// Shuffle the gluing of edge copies with this seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Length of a cohomology class.
    Length {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        class: ClassArgs,
        #[arg(long, default_value_t = 2)]
        level: u32,
    },
    /// Z₂-systole.
    Systole {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 2)]
        level: u32,
    },
    /// Bounds on the area of a metric ball about a vertex.
    Ball {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        center: usize,
        #[arg(long)]
        radius: f64,
        #[arg(long, default_value_t = 2)]
        level: u32,
    },
    /// Check an area inequality; exit 0 when it holds, 2 when inconclusive.
    Verify {
        #[command(subcommand)]
        target: VerifyTarget,
    },
    /// Search for metrics with small systolic ratio.
    Optimize {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        level: u32,
        /// Independent runs with seeds `seed, seed+1, ...`, in parallel.
        #[arg(long, default_value_t = 1)]
        restarts: u64,
        /// Accept only improvements.
        #[arg(long)]
        greedy: bool,
        /// Write `iteration,ratio,accepted` rows of the best run here.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Write the best metric as a complex document here.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Emit a standard complex as JSON.
    Generate {
        /// torus_grid, hex_torus, klein_grid, rp2_minimal, torus_minimal,
        /// genus_g_polygon, sphere or circle.
        family: Option<String>,
        params: Vec<String>,
        /// Full generator spec as inline JSON or a path, for the wedge and
        /// disjoint_union combinators.
        #[arg(long, conflicts_with = "family")]
        spec: Option<String>,
        /// Attach cohomology and homology basis representatives.
        #[arg(long)]
        cochains: bool,
    },
}

#[derive(Subcommand)]
enum VerifyTarget {
    /// `Area ≥ ½·L̂²` for cup-length witness pairs.
    Main(VerifyArgs),
    /// `Area B(x, r) ≥ 2r²` below the witness radius.
    BallGrowth {
        #[command(flatten)]
        args: VerifyArgs,
        /// Radii to check; defaults to four radii below the admissible bound.
        #[arg(long, value_delimiter = ',')]
        radii: Vec<f64>,
    },
    /// Area and ball bounds through the double cover of a cocycle.
    Cover {
        #[command(flatten)]
        args: VerifyArgs,
        #[command(flatten)]
        class: ClassArgs,
        /// Use the zero cocycle (the trivial cover).
        #[arg(long, conflicts_with_all = ["class", "cochain"])]
        trivial: bool,
    },
}

#[derive(Args)]
struct Input {
    /// Complex document; `-` or absent reads standard input.
    path: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long, default_value_t = 3)]
    level: u32,
    /// Check every `*.json` document in a directory, in parallel.
    #[arg(long, conflicts_with = "path")]
    all: Option<PathBuf>,
}

#[derive(Args)]
struct ClassArgs {
    /// Index into the cohomology basis.
    #[arg(long, conflicts_with = "cochain")]
    class: Option<usize>,
    /// Named degree-1 cochain in the document.
    #[arg(long)]
    cochain: Option<String>,
}

struct Output {
    json: bool,
}

impl Output {
    fn emit(&self, value: &Value, text: impl FnOnce() -> String) -> Result<()> {
        if self.json {
            println!("{}", serde_json::to_string_pretty(value)?);
        } else {
            print!("{}", text());
        }
        io::stdout().flush()?;
        Ok(())
    }
}

fn read_text(path: &Option<PathBuf>) -> Result<String> {
    match path {
        Some(p) if p.as_os_str() != "-" => fs::read_to_string(p).with_context(|| format!("reading {}", p.display())),
        _ => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s).context("reading standard input")?;
            Ok(s)
        }
    }
}

fn read_document(input: &Input) -> Result<ComplexDocument> {
    let s = read_text(&input.path)?;
    ComplexDocument::parse(&s).map_err(|e| anyhow!("{}: {e}", source_name(input)))
}

fn source_name(input: &Input) -> String {
    input.path.as_ref().map_or("<stdin>".into(), |p| p.display().to_string())
}

fn read_metric(input: &Input) -> Result<(ComplexDocument, MetricComplex)> {
    let doc = read_document(input)?;
    let mc = doc.to_metric_complex().map_err(|e| anyhow!("{}: {e}", source_name(input)))?;
    Ok((doc, mc))
}

fn pick_class(doc: &ComplexDocument, c: &Complex2, args: &ClassArgs) -> Result<Z2Vector> {
    if let Some(name) = &args.cochain {
        return Ok(doc.cochain(c, name)?);
    }
    let basis = cohomology_basis(c, 1)?;
    let i = args.class.unwrap_or(0);
    basis
        .representatives
        .get(i)
        .cloned()
        .ok_or_else(|| anyhow!("class {i} out of range: H¹ has rank {}", basis.rank()))
}

fn exit_for(verdict: Verdict) -> u8 {
    if verdict.passed() {
        0
    } else {
        2
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.sequential {
        exec::set_parallel(false);
    }
    let out = Output { json: cli.json };
    match run(cli.command, &out) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command, out: &Output) -> Result<u8> {
    match command {
        Command::Validate(input) => {
            let doc = read_document(&input)?;
            let s = validate(doc.vertices, &doc.edges, &doc.triangles)?;
            if doc.lengths.is_some() {
                doc.to_metric_complex()?;
            }
            let v = json!({
                "vertices": s.vertices, "edges": s.edges, "triangles": s.triangles,
                "components": s.components, "euler_characteristic": s.vertices as i64 - s.edges as i64 + s.triangles as i64,
                "metric": doc.lengths.is_some(),
            });
            out.emit(&v, || {
                format!(
                    "valid: {} vertices, {} edges, {} triangles, {} component(s){}\n",
                    s.vertices,
                    s.edges,
                    s.triangles,
                    s.components,
                    if doc.lengths.is_some() { ", metric ok" } else { "" }
                )
            })?;
            Ok(0)
        }
        Command::Homology(input) => {
            let c = read_document(&input)?.to_complex()?;
            let b = betti_numbers(&c);
            let h1 = cohomology_basis(&c, 1)?;
            let h2 = homology_basis(&c, 2)?;
            let v = json!({
                "reduced_betti": b,
                "euler_characteristic": c.euler_characteristic(),
                "h1": h1.representatives.iter().map(|r| r.support()).collect::<Vec<_>>(),
                "h2": h2.representatives.iter().map(|r| r.support()).collect::<Vec<_>>(),
            });
            out.emit(&v, || {
                let mut s = format!("reduced Betti numbers: {} {} {}\nEuler characteristic: {}\n", b[0], b[1], b[2], c.euler_characteristic());
                for (i, r) in h1.representatives.iter().enumerate() {
                    s += &format!("H^1[{i}]: edges {:?}\n", r.support());
                }
                for (i, r) in h2.representatives.iter().enumerate() {
                    s += &format!("H_2[{i}]: triangles {:?}\n", r.support());
                }
                s
            })?;
            Ok(0)
        }
        Command::CupWitness(input) => {
            let c = read_document(&input)?.to_complex()?;
            let pairs = cup_witness_pairs(&c)?;
            let v = json!({
                "maximal_cup_length": !pairs.is_empty(),
                "pairs": pairs.iter().map(|w| json!({
                    "alpha_index": w.alpha_index, "beta_index": w.beta_index,
                    "alpha": w.alpha.support(), "beta": w.beta.support(),
                    "cycle_index": w.cycle_index,
                })).collect::<Vec<_>>(),
            });
            out.emit(&v, || {
                if pairs.is_empty() {
                    return "no pair of classes with non-zero cup product\n".into();
                }
                pairs
                    .iter()
                    .map(|w| format!("α{} ∪ α{} ≠ 0 (detected by H_2[{}])\n", w.alpha_index, w.beta_index, w.cycle_index))
                    .collect()
            })?;
            Ok(0)
        }
        Command::Realize { input, cycle, seed } => {
            let doc = read_document(&input)?;
            let c = doc.to_complex()?;
            let z = match &cycle {
                Some(name) => doc.cochain(&c, name)?,
                None => homology_basis(&c, 2)?
                    .representatives
                    .first()
                    .cloned()
                    .ok_or_else(|| anyhow!("H_2 is trivial: nothing to realize"))?,
            };
            let pairing = seed.map_or(Pairing::Sequential, Pairing::Seeded);
            let real = realize_cycle(&c, &z, pairing)?;
            let metric = match &doc.lengths {
                Some(_) => Some(doc.to_metric_complex()?.metric().clone()),
                None => None,
            };
            let rd = RealizationDocument::new(real, metric.as_ref());
            out.emit(&serde_json::to_value(&rd)?, || {
                let s = &rd.realization.surface;
                let mut t = format!(
                    "surface: {} vertices, {} edges, {} triangles, χ = {}\n",
                    s.vertex_count,
                    s.edges.len(),
                    s.triangles.len(),
                    s.euler_characteristic()
                );
                for comp in &rd.realization.components {
                    t += &format!("  component: {} ({} triangles)\n", comp.kind.name(), comp.triangles.len());
                }
                t
            })?;
            Ok(0)
        }
        Command::Length { input, class, level } => {
            let (doc, mc) = read_metric(&input)?;
            let alpha = pick_class(&doc, mc.complex(), &class)?;
            let est = LengthEngine::new(&mc, level).length_of_class(&alpha)?;
            out.emit(&serde_json::to_value(&est)?, || format!("length = {:?} (level {level}, {:?})\n", est.value, est.kind))?;
            Ok(0)
        }
        Command::Systole { input, level } => {
            let (_, mc) = read_metric(&input)?;
            let basis = cohomology_basis(mc.complex(), 1)?;
            let est = LengthEngine::new(&mc, level).systole(&basis)?;
            out.emit(&serde_json::to_value(&est)?, || format!("systole = {:?} (level {level}, {:?})\n", est.value, est.kind))?;
            Ok(0)
        }
        Command::Ball { input, center, radius, level } => {
            let (_, mc) = read_metric(&input)?;
            let b = ball_area(&mc, center, radius, level)?;
            let v = json!({ "center": center, "radius": radius, "level": level, "lower": b.lower, "upper": b.upper });
            out.emit(&v, || format!("area of B({center}, {radius}) in [{:.9}, {:.9}]\n", b.lower, b.upper))?;
            Ok(0)
        }
        Command::Verify { target } => run_verify(target, out),
        Command::Optimize { input, budget, seed, level, restarts, greedy, csv, output } => {
            let (_, mc) = read_metric(&input)?;
            let mut config = OptimizerConfig { budget, seed, level, ..Default::default() };
            if greedy {
                config.annealing = None;
            }
            let seeds: Vec<u64> = (0..restarts.max(1)).map(|k| seed.wrapping_add(k)).collect();
            let runs = optimize_restarts(mc.complex(), mc.metric(), &config, &seeds);
            let mut traces: Vec<OptimizationTrace> = Vec::new();
            for r in runs {
                traces.push(r?);
            }
            let best = traces
                .iter()
                .min_by(|a, b| a.certified_ratio.total_cmp(&b.certified_ratio))
                .expect("at least one run");
            if let Some(p) = &csv {
                write_trace_csv(best, fs::File::create(p).with_context(|| format!("creating {}", p.display()))?)?;
            }
            if let Some(p) = &output {
                let m = mc.with_metric(systolic::PLMetric::new(best.best_metric.clone()))?;
                fs::write(p, ComplexDocument::from_metric_complex(&m).to_json())
                    .with_context(|| format!("writing {}", p.display()))?;
            }
            out.emit(&serde_json::to_value(best)?, || {
                let mut s = format!(
                    "initial ratio:   {:.9}\nbest ratio:      {:.9} (level {})\ncertified ratio: {:.9} (level {})\n",
                    best.initial_ratio, best.best_ratio, best.level, best.certified_ratio, best.certified_level
                );
                s += &format!("accepted steps:  {} of {}\n", best.steps.iter().filter(|x| x.accepted).count() - 1, best.steps.len() - 1);
                for n in &best.notes {
                    s += &format!("note: {n}\n");
                }
                s
            })?;
            Ok(0)
        }
        Command::Generate { family, params, spec, cochains } => {
            let spec = match (family, spec) {
                (_, Some(s)) => parse_spec_arg(&s)?,
                (Some(f), None) => spec_from_params(&f, &params)?,
                (None, None) => bail!("name a family or pass --spec"),
            };
            let mc = generate(&spec)?;
            let mut doc = ComplexDocument::from_metric_complex(&mc);
            if cochains {
                let c = mc.complex();
                for (i, r) in cohomology_basis(c, 1)?.representatives.iter().enumerate() {
                    doc = doc.with_cochain(NamedCochain::new(format!("h1_{i}"), r));
                }
                for (i, r) in homology_basis(c, 2)?.representatives.iter().enumerate() {
                    doc = doc.with_cochain(NamedCochain::new(format!("h2_{i}"), r));
                }
            }
            println!("{}", doc.to_json());
            Ok(0)
        }
    }
}

fn parse_spec_arg(s: &str) -> Result<GeneratorSpec> {
    let text = if s.trim_start().starts_with('{') {
        s.to_string()
    } else {
        fs::read_to_string(s).with_context(|| format!("reading {s}"))?
    };
    serde_json::from_str(&text).context("generator spec")
}

fn spec_from_params(family: &str, p: &[String]) -> Result<GeneratorSpec> {
    let int = |i: usize, name: &str| -> Result<usize> {
        p.get(i).ok_or_else(|| anyhow!("{family}: missing parameter {name}"))?.parse().with_context(|| format!("{family}: parameter {name}"))
    };
    let real = |i: usize, name: &str, default: Option<f64>| -> Result<f64> {
        match (p.get(i), default) {
            (Some(s), _) => s.parse().with_context(|| format!("{family}: parameter {name}")),
            (None, Some(d)) => Ok(d),
            (None, None) => bail!("{family}: missing parameter {name}"),
        }
    };
    let expect = |n: usize| -> Result<()> {
        if p.len() > n {
            bail!("{family}: expected at most {n} parameters, got {}", p.len());
        }
        Ok(())
    };
    let spec = match family {
        "torus_grid" | "klein_grid" => {
            expect(4)?;
            let (m, n) = (int(0, "m")?, int(1, "n")?);
            let (lx, ly) = (real(2, "lx", Some(1.0))?, real(3, "ly", Some(1.0))?);
            if family == "torus_grid" {
                GeneratorSpec::TorusGrid { m, n, lx, ly }
            } else {
                GeneratorSpec::KleinGrid { m, n, lx, ly }
            }
        }
        "hex_torus" => {
            expect(3)?;
            GeneratorSpec::HexTorus { m: int(0, "m")?, n: int(1, "n")?, side: real(2, "side", Some(1.0))? }
        }
        "rp2_minimal" => {
            expect(0)?;
            GeneratorSpec::Rp2Minimal
        }
        "torus_minimal" => {
            expect(1)?;
            GeneratorSpec::TorusMinimal { side: real(0, "side", Some(1.0))? }
        }
        "genus_g_polygon" => {
            expect(2)?;
            GeneratorSpec::GenusGPolygon { genus: int(0, "genus")?, side: real(1, "side", Some(1.0))? }
        }
        "sphere" => {
            expect(1)?;
            GeneratorSpec::Sphere { side: real(0, "side", Some(1.0))? }
        }
        "circle" => {
            expect(2)?;
            GeneratorSpec::Circle { n: int(0, "n")?, length: real(1, "length", Some(1.0))? }
        }
        "wedge" | "disjoint_union" => bail!("{family} takes its operands through --spec"),
        other => bail!("unknown family {other:?}"),
    };
    Ok(spec)
}

fn verify_one(target: &VerifyTarget, input: &Input) -> Result<VerificationReport> {
    let (doc, mc) = read_metric(input)?;
    let report = match target {
        VerifyTarget::Main(a) => verify_main_inequality(&mc, a.level)?,
        VerifyTarget::BallGrowth { args, radii } => {
            let radii = if radii.is_empty() {
                default_radii((1.0 - SLACK) * radius_bound(&mc, args.level)?, 4)
            } else {
                radii.clone()
            };
            verify_ball_growth(&mc, &radii, args.level)?
        }
        VerifyTarget::Cover { args, class, trivial } => {
            let alpha = if *trivial { Z2Vector::zero(mc.complex(), 1) } else { pick_class(&doc, mc.complex(), class)? };
            verify_cover_bound(&mc, &alpha, args.level)?
        }
    };
    Ok(report)
}

fn run_verify(target: VerifyTarget, out: &Output) -> Result<u8> {
    let args = match &target {
        VerifyTarget::Main(a) | VerifyTarget::BallGrowth { args: a, .. } | VerifyTarget::Cover { args: a, .. } => a,
    };
    let Some(dir) = &args.all else {
        let report = verify_one(&target, &args.input)?;
        out.emit(&serde_json::to_value(&report)?, || report.render_text())?;
        return Ok(exit_for(report.verdict));
    };
    let files = json_files(dir)?;
    let results = exec::map_slice(&files, |p| verify_one(&target, &Input { path: Some(p.clone()) }));
    let mut code = 0;
    let mut failed = false;
    let mut rows = Vec::new();
    let mut text = String::new();
    for (p, r) in files.iter().zip(results) {
        let name = p.display().to_string();
        match r {
            Ok(rep) => {
                code = code.max(exit_for(rep.verdict));
                text += &format!("{name}: {} (margin {})\n", rep.verdict.as_str(), rep.margin.map_or("n/a".into(), |m| format!("{m:.9}")));
                rows.push(json!({ "file": name, "report": rep }));
            }
            Err(e) => {
                failed = true;
                text += &format!("{name}: error: {e:#}\n");
                rows.push(json!({ "file": name, "error": format!("{e:#}") }));
            }
        }
    }
    out.emit(&Value::Array(rows), || text)?;
    Ok(if failed { 1 } else { code })
}

fn json_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    if files.is_empty() {
        bail!("no .json documents in {}", dir.display());
    }
    Ok(files)
}
