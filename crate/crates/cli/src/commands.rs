use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use paradot::bounds::{
    degenerate_pair_bound, nondegenerate_excess, triangle_bound, ExcessReport, PRIME_PLANE_EXPONENT,
};
use paradot::constructions::{construct, slope_i_lines, ConstructionKind};
use paradot::counting::{counts_report, inequality_chain, isosceles_counts, product_set};
use paradot::fourier::{
    extension_ratio, plancherel_error, s0_hat_formula_table, s0_max_discrepancy, SurfaceFunction,
};
use paradot::oracle::oracle_battery;
use paradot::varieties::{
    enum_sphere, random_paraboloid_subset, random_space_subset, PointSet, DEFAULT_CAP,
};
use paradot::FieldSpec;
use serde::Serialize;

use crate::config::{Format, SweepConfig};
use crate::emit;
use crate::sweep::{cell_seed, run_sweep};

/// Largest tolerated error in `fourier-verify`.
pub const FOURIER_TOLERANCE: f64 = 1e-6;

pub const FOURIER_CASES: [(usize, u64); 5] = [(2, 3), (2, 7), (2, 11), (2, 19), (6, 3)];

pub const EXTENSION_PRIMES: [u64; 7] = [3, 7, 11, 19, 23, 31, 43];

pub const EXCESS_PRIMES: [u64; 6] = [7, 11, 19, 23, 31, 43];

#[derive(Debug, Parser)]
#[command(
    name = "paradot",
    version,
    about = "Dot products, isosceles triangles and character sums over prime fields"
)]
pub struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output file (default: stdout).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Table format.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Largest variety or frequency space to enumerate.
    #[arg(long, global = true, default_value_t = DEFAULT_CAP)]
    pub cap: u64,
    #[command(subcommand)]
    pub command: Command,
}

/// A point set read from disk or sampled at random.
#[derive(Debug, Args)]
pub struct Source {
    /// Point-set file (`p d count` header, one point per line).
    #[arg(long, conflicts_with_all = ["p", "d", "size"])]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub p: Option<u64>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub size: Option<usize>,
    /// Sample from all of F_p^d rather than the paraboloid P_d.
    #[arg(long)]
    pub space: bool,
}

impl Source {
    fn load(&self, seed: u64) -> anyhow::Result<PointSet> {
        if let Some(path) = &self.input {
            return Ok(PointSet::load(path)?);
        }
        let (Some(p), Some(d), Some(size)) = (self.p, self.d, self.size) else {
            return Err(paradot::Error::Usage(
                "give --input, or all of --p, --d and --size".into(),
            )
            .into());
        };
        let field = FieldSpec::new(p)?;
        Ok(if self.space {
            random_space_subset(&field, d, size, seed)?
        } else {
            random_paraboloid_subset(&field, d, size, seed)?
        })
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// The dot-product set ∏(E, F).
    Product {
        #[command(flatten)]
        source: Source,
        /// Second set F (default: F = E).
        #[arg(long)]
        other: Option<PathBuf>,
    },
    /// |∏(E)|, D, D*, M and triangle counts as one JSON object.
    Count {
        #[command(flatten)]
        source: Source,
        /// Also check the inequality chain; a violation exits with 1.
        #[arg(long)]
        chain: bool,
    },
    /// Isosceles triangle counts, with the degenerate-pair and triangle bounds when they apply.
    Triangles {
        #[command(flatten)]
        source: Source,
    },
    /// Closed form of the zero-sphere transform against direct summation.
    FourierVerify {
        /// `n:p` pairs (default: 2:3, 2:7, 2:11, 2:19, 6:3).
        #[arg(long = "case", value_parser = parse_case)]
        cases: Vec<(usize, u64)>,
    },
    /// Extension ratios of random functions on a sphere.
    ExtensionRatio {
        #[arg(long = "q", value_delimiter = ',')]
        primes: Vec<u64>,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        radius: i64,
        #[arg(long, default_value_t = 4.0)]
        r_exp: f64,
        #[arg(long, default_value_t = 200)]
        trials: usize,
    },
    /// Builds a few-products construction and writes it with a JSON sidecar.
    Construct {
        #[arg(long)]
        kind: ConstructionKind,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 1)]
        k: u64,
        #[arg(long, default_value_t = 1)]
        lines: usize,
        #[arg(long, default_value_t = 1)]
        per_line: usize,
    },
    /// Runs a sweep configuration.
    Sweep {
        /// JSON sweep configuration.
        config: PathBuf,
    },
    /// Cross-checks every fast count against its definition-literal oracle.
    OracleDiff {
        #[arg(long, default_value_t = 100)]
        instances: usize,
    },
    /// Non-degenerate isosceles excess in the plane against its bound.
    MpprpCheck {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        primes: Vec<u64>,
        #[arg(long, default_value_t = 1)]
        trials: usize,
    },
}

fn parse_case(s: &str) -> Result<(usize, u64), String> {
    let (n, p) = s.split_once(':').ok_or("expected n:p")?;
    Ok((
        n.parse().map_err(|e| format!("{e}"))?,
        p.parse().map_err(|e| format!("{e}"))?,
    ))
}

fn writer(out: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).with_context(|| format!("creating {}", path.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn write_json<T: Serialize>(value: &T, out: Option<&Path>) -> anyhow::Result<()> {
    let mut w = writer(out)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn write_table<T: Serialize>(rows: &[T], format: Format, out: Option<&Path>) -> anyhow::Result<()> {
    match format {
        Format::Json => write_json(&rows, out),
        Format::Csv => {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(writer(out)?);
            for r in rows {
                w.serialize(r)?;
            }
            w.flush()?;
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct ProductOutput {
    p: u32,
    d: usize,
    set_size: usize,
    other_size: usize,
    prod_size: usize,
    products: Vec<u32>,
}

#[derive(Serialize)]
struct TrianglesOutput {
    counts: paradot::counting::TriangleCounts,
    degenerate_bound: Option<paradot::bounds::DegenerateBoundReport>,
    triangle_bound: Option<paradot::bounds::TriangleBoundReport>,
}

#[derive(Debug, Serialize)]
pub struct FourierRow {
    pub n: usize,
    pub p: u64,
    pub s0_max_error: f64,
    pub plancherel_error: f64,
}

#[derive(Debug, Serialize)]
pub struct ExtensionRow {
    pub q: u64,
    pub n: usize,
    pub radius: i64,
    pub sphere_size: usize,
    pub trials: usize,
    pub max_ratio: f64,
    pub mean_ratio: f64,
    pub point_mass_ratio: f64,
}

#[derive(Serialize)]
struct LinesReport {
    kind: ConstructionKind,
    p: u32,
    lines: usize,
    per_line: usize,
    set_size: usize,
    null_triangles: u128,
    t_de: u128,
    within_line_bound: u128,
    cube_over_p: f64,
    passed: bool,
}

#[derive(Debug, Serialize)]
pub struct OracleSummary {
    pub name: String,
    pub instances: usize,
    pub mismatches: usize,
    pub fast_ms: f64,
    pub oracle_ms: f64,
}

pub fn fourier_rows(cases: &[(usize, u64)], cap: u64) -> anyhow::Result<Vec<FourierRow>> {
    cases
        .iter()
        .map(|&(n, p)| {
            let field = FieldSpec::new(p)?;
            let zero = enum_sphere(&field, n, field.scalar(0), cap)?;
            let table = s0_hat_formula_table(&field, n)?;
            Ok(FourierRow {
                n,
                p,
                s0_max_error: s0_max_discrepancy(&field, n)?,
                plancherel_error: plancherel_error(&table, zero.len()),
            })
        })
        .collect()
}

/// Max and mean extension ratio of `trials` random functions on `S_radius ⊂ F_q^n`.
pub fn extension_row(
    q: u64,
    n: usize,
    radius: i64,
    r_exp: f64,
    trials: usize,
    seed: u64,
    cap: u64,
) -> anyhow::Result<ExtensionRow> {
    let field = FieldSpec::new(q)?;
    let sphere = enum_sphere(&field, n, field.scalar(radius), cap)?;
    if sphere.is_empty() {
        bail!("the sphere of radius {radius} in F_{q}^{n} is empty");
    }
    let mut max_ratio = 0f64;
    let mut total = 0f64;
    for t in 0..trials {
        let f = SurfaceFunction::random(sphere.clone(), cell_seed(seed, t as u64))?;
        let r = extension_ratio(&f, r_exp)?;
        max_ratio = max_ratio.max(r);
        total += r;
    }
    let point_mass = extension_ratio(&SurfaceFunction::point_mass(sphere.clone(), 0)?, r_exp)?;
    Ok(ExtensionRow {
        q,
        n,
        radius,
        sphere_size: sphere.len(),
        trials,
        max_ratio,
        mean_ratio: total / trials.max(1) as f64,
        point_mass_ratio: point_mass,
    })
}

/// The excess check on `trials` random sets of `⌈p^(5/4)⌉` points per prime.
pub fn excess_sweep(primes: &[u64], trials: usize, seed: u64) -> anyhow::Result<Vec<ExcessReport>> {
    let mut out = Vec::new();
    for (i, &p) in primes.iter().enumerate() {
        let field = FieldSpec::new(p)?;
        let size = PRIME_PLANE_EXPONENT.ceil_pow(field.p()) as usize;
        for t in 0..trials {
            let x = random_space_subset(&field, 2, size, cell_seed(seed, (i * trials + t) as u64))?;
            out.push(nondegenerate_excess(&x)?);
        }
    }
    Ok(out)
}

pub fn summarize(reports: &[paradot::oracle::OracleReport]) -> Vec<OracleSummary> {
    let mut names: Vec<&str> = Vec::new();
    for r in reports {
        if !names.contains(&r.name.as_str()) {
            names.push(&r.name);
        }
    }
    names
        .into_iter()
        .map(|name| {
            let rs: Vec<_> = reports.iter().filter(|r| r.name == name).collect();
            OracleSummary {
                name: name.to_owned(),
                instances: rs.len(),
                mismatches: rs.iter().filter(|r| !r.matched).count(),
                fast_ms: rs.iter().map(|r| r.fast_ms).sum(),
                oracle_ms: rs.iter().map(|r| r.oracle_ms).sum(),
            }
        })
        .collect()
}

fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".json");
    PathBuf::from(name)
}

/// Runs a parsed command line. `Ok(false)` is a verification failure.
pub fn run(cli: Cli) -> anyhow::Result<bool> {
    let seed = cli.seed.unwrap_or(0);
    let out = cli.out.as_deref();
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(paradot::Error::Usage("--threads must be at least 1".into()).into());
        }
        // only the first configuration of the global pool takes effect
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global();
    }
    match cli.command {
        Command::Product { source, other } => {
            let e = source.load(seed)?;
            let f = match other {
                Some(path) => PointSet::load(path)?,
                None => e.clone(),
            };
            let prods = product_set(&e, &f)?;
            write_json(
                &ProductOutput {
                    p: e.field().p(),
                    d: e.dim(),
                    set_size: e.len(),
                    other_size: f.len(),
                    prod_size: prods.len(),
                    products: prods.iter().map(|s| s.value()).collect(),
                },
                out,
            )?;
            Ok(true)
        }
        Command::Count { source, chain } => {
            let e = source.load(seed)?;
            write_json(&counts_report(&e)?, out)?;
            if chain {
                let report = inequality_chain(&e)?;
                eprintln!("{}", serde_json::to_string(&report)?);
                return Ok(report.all_hold());
            }
            Ok(true)
        }
        Command::Triangles { source } => {
            let x = source.load(seed)?;
            let applies = x.dim() % 4 == 2 && x.field().residue_class_mod_4() == 3;
            let output = TrianglesOutput {
                counts: isosceles_counts(&x),
                degenerate_bound: if applies {
                    Some(degenerate_pair_bound(&x)?)
                } else {
                    None
                },
                triangle_bound: if applies {
                    Some(triangle_bound(&x)?)
                } else {
                    None
                },
            };
            write_json(&output, out)?;
            Ok(output.degenerate_bound.is_none_or(|b| b.holds)
                && output.triangle_bound.is_none_or(|b| b.holds))
        }
        Command::FourierVerify { cases } => {
            let cases = if cases.is_empty() {
                FOURIER_CASES.to_vec()
            } else {
                cases
            };
            let rows = fourier_rows(&cases, cli.cap)?;
            write_table(&rows, cli.format.unwrap_or_default(), out)?;
            Ok(rows.iter().all(|r| {
                r.s0_max_error <= FOURIER_TOLERANCE && r.plancherel_error <= FOURIER_TOLERANCE
            }))
        }
        Command::ExtensionRatio {
            primes,
            n,
            radius,
            r_exp,
            trials,
        } => {
            let primes = if primes.is_empty() {
                EXTENSION_PRIMES.to_vec()
            } else {
                primes
            };
            let rows = primes
                .iter()
                .map(|&q| extension_row(q, n, radius, r_exp, trials, seed, cli.cap))
                .collect::<anyhow::Result<Vec<_>>>()?;
            write_table(&rows, cli.format.unwrap_or_default(), out)?;
            Ok(true)
        }
        Command::Construct {
            kind,
            p,
            d,
            k,
            lines,
            per_line,
        } => {
            let field = FieldSpec::new(p)?;
            let (set, report, passed) = if kind == ConstructionKind::Lines {
                let set = slope_i_lines(&field, lines, per_line, seed)?;
                let t = isosceles_counts(&set);
                let bound = (lines * per_line.pow(3)) as u128;
                let report = LinesReport {
                    kind,
                    p: field.p(),
                    lines,
                    per_line,
                    set_size: set.len(),
                    null_triangles: t.null_triangles,
                    t_de: t.t_de,
                    within_line_bound: bound,
                    cube_over_p: (set.len() as f64).powi(3) / f64::from(field.p()),
                    passed: t.null_triangles >= bound,
                };
                let passed = report.passed;
                (set, serde_json::to_value(report)?, passed)
            } else {
                let c = construct(kind, &field, d, k, seed)?;
                c.subgroup.verify()?;
                c.frame.verify()?;
                let report = c.report()?;
                let passed = report.passed();
                (c.set, serde_json::to_value(report)?, passed)
            };
            match out {
                Some(path) => {
                    set.save(path)?;
                    write_json(&report, Some(&sidecar_path(path)))?;
                }
                None => {
                    print!("{}", set.to_text());
                    eprintln!("{}", serde_json::to_string_pretty(&report)?);
                }
            }
            Ok(passed)
        }
        Command::Sweep { config } => {
            let mut config = SweepConfig::load(&config)?;
            if let Some(s) = cli.seed {
                config.seed = s;
            }
            if cli.threads.is_some() {
                config.threads = cli.threads;
            }
            if let Some(f) = cli.format {
                config.format = f;
            }
            if let Some(path) = &cli.out {
                config.output = Some(path.clone());
            }
            let rows = run_sweep(&config)?;
            emit::emit(&rows, config.format, config.output.as_deref())?;
            // failed cells are data, recorded in their rows
            let failed = rows.iter().filter(|r| r.error.is_some()).count();
            if failed > 0 {
                eprintln!("{failed} of {} cells recorded an error", rows.len());
            }
            Ok(true)
        }
        Command::OracleDiff { instances } => {
            let reports = oracle_battery(instances, seed)?;
            match cli.format.unwrap_or_default() {
                Format::Json => write_json(&reports, out)?,
                Format::Csv => write_table(&summarize(&reports), Format::Csv, out)?,
            }
            Ok(reports.iter().all(|r| r.matched))
        }
        Command::MpprpCheck {
            input,
            primes,
            trials,
        } => {
            let reports = match input {
                Some(path) => vec![nondegenerate_excess(&PointSet::load(path)?)?],
                None => {
                    let primes = if primes.is_empty() {
                        EXCESS_PRIMES.to_vec()
                    } else {
                        primes
                    };
                    excess_sweep(&primes, trials, seed)?
                }
            };
            write_table(&reports, cli.format.unwrap_or_default(), out)?;
            Ok(reports.iter().all(|r| r.holds))
        }
    }
}

/// `0` success, `1` failed verification, `2` bad input or usage.
pub fn exit_code(result: &anyhow::Result<bool>) -> i32 {
    match result {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => match e.downcast_ref::<paradot::Error>() {
            Some(paradot::Error::Violation(_)) => 1,
            _ => 2,
        },
    }
}
