use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use modkernel::cache::Cache;
use modkernel::groups::{DEFAULT_CAP, DEFAULT_MAX_MODULUS};
use modkernel::{
    abelianness_probe, decompose_gamma04, decompose_st, gamma_d_info, u_alpha, Alpha, Analyzer, CongruenceCertificate,
    Error, GammaDInfo, KernelReport, ModularElement, STWord, ScanRow,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

/// Exact computations with Selberg's character on Γ₀(4) and the induced
/// representation U_α of PSL(2,Z).
#[derive(Parser, Debug)]
#[command(name = "modkernel", version)]
struct Cli {
    #[arg(long, value_enum, default_value = "text", global = true)]
    format: Format,

    /// Directory for cached reports and certificates.
    #[arg(long, env = "MODKERNEL_CACHE_DIR", global = true)]
    cache_dir: Option<PathBuf>,

    /// Largest group the enumerations may build.
    #[arg(long, default_value_t = DEFAULT_CAP, global = true)]
    cap: usize,

    /// Largest modulus n for which PSL(2,Z/n) is enumerated.
    #[arg(long, default_value_t = DEFAULT_MAX_MODULUS, global = true)]
    max_modulus: u64,

    /// Seed for sampled checks.
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a matrix (or word) as a word in S, T; with --gamma04, in T, V.
    Decompose {
        input: String,
        #[arg(long)]
        gamma04: bool,
    },
    /// Print U_α(g).
    Rep {
        #[arg(long)]
        alpha: String,
        element: String,
    },
    /// Index, genus, cusps, level and free-generator count of ker U_α.
    KernelInfo {
        #[arg(long)]
        alpha: String,
        /// Cross-check the formulas by enumerating G_α and A_α.
        #[arg(long)]
        verify: bool,
    },
    /// Decide whether ker U_α is a congruence subgroup.
    Congruence {
        #[arg(long)]
        alpha: String,
    },
    /// Tabulate every reduced α = p/q with q <= max-den.
    Scan {
        #[arg(long)]
        max_den: u64,
        /// Cover [0, 1) instead of [0, 1/2].
        #[arg(long)]
        full_range: bool,
    },
    /// Signature, area and the congruence bound for Γ_d.
    GammaD { d: u64 },
    /// Sample commutators of Γ(4) and test them against Γ(2^(k+2)).
    Probe {
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 500)]
        samples: usize,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_) | Error::Domain(_) => 2,
        Error::Membership { .. } => 3,
        Error::CapExceeded { .. } | Error::CapPredicted { .. } => 4,
        Error::ModulusBound { .. } => 5,
        _ => 1,
    }
}

fn parse_element(s: &str) -> Result<ModularElement, Error> {
    if s.trim_start().starts_with('[') {
        s.parse()
    } else {
        Ok(s.parse::<STWord>()?.eval())
    }
}

fn unsupported(cmd: &str) -> Error {
    Error::Parse(format!("csv output is not available for `{cmd}`"))
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn csv_rows<T: Serialize>(rows: &[T]) -> Result<String, Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Error::Internal(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Internal(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

#[derive(Serialize)]
struct ReportRow {
    alpha: String,
    #[serde(rename = "N")]
    n: u64,
    index: u128,
    genus: u128,
    cusps: u128,
    level: u64,
    free_generators: u128,
    area_over_pi: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    group_order: Option<u128>,
    #[serde(skip_serializing_if = "Option::is_none")]
    diagonal_order: Option<u128>,
    #[serde(skip_serializing_if = "Option::is_none")]
    t_image_order: Option<u64>,
}

fn render_report(r: &KernelReport, format: Format) -> Result<String, Error> {
    Ok(match format {
        Format::Json => json(r),
        Format::Csv => csv_rows(&[ReportRow {
            alpha: r.alpha.to_string(),
            n: r.n,
            index: r.index,
            genus: r.genus,
            cusps: r.cusps,
            level: r.level,
            free_generators: r.free_generators,
            area_over_pi: r.area_over_pi.to_string(),
            group_order: r.cross_checks.as_ref().map(|c| c.group_order),
            diagonal_order: r.cross_checks.as_ref().map(|c| c.diagonal_order),
            t_image_order: r.cross_checks.as_ref().map(|c| c.t_image_order),
        }])?,
        Format::Text => {
            let mut s = format!(
                "alpha           = {}\nN               = {}\nindex           = {}\ngenus           = {}\ncusps           = {}\nlevel           = {}\nfree_generators = {}\narea            = {}·π\n",
                r.alpha, r.n, r.index, r.genus, r.cusps, r.level, r.free_generators, r.area_over_pi
            );
            if let Some(c) = &r.cross_checks {
                s += &format!(
                    "checks          = pass (|G_alpha| = {}, |A_alpha| = {}, order of U(T) = {})\n",
                    c.group_order, c.diagonal_order, c.t_image_order
                );
            }
            s
        }
    })
}

fn render_certificate(c: &CongruenceCertificate, format: Format) -> Result<String, Error> {
    Ok(match format {
        Format::Json => json(c),
        Format::Csv => {
            #[derive(Serialize)]
            struct Row {
                alpha: String,
                #[serde(rename = "N")]
                n: u64,
                congruent: bool,
                kernel: String,
                level: u64,
                witness_matrix: String,
                witness_word: String,
            }
            csv_rows(&[Row {
                alpha: c.alpha.to_string(),
                n: c.n,
                congruent: c.congruent,
                kernel: c.kernel.to_string(),
                level: c.level,
                witness_matrix: c.witness.as_ref().map(|w| w.matrix.to_string()).unwrap_or_default(),
                witness_word: c.witness.as_ref().map(|w| w.word.clone()).unwrap_or_default(),
            }])?
        }
        Format::Text => {
            let mut s = format!(
                "alpha     = {}\nN         = {}\nlevel     = {}\ncongruent = {}\nkernel    = {}\n",
                c.alpha, c.n, c.level, c.congruent, c.kernel
            );
            if let Some(w) = &c.witness {
                s += &format!(
                    "witness   = {} in Gamma({}) \\ ker U_alpha\nword      = {}\nimage     =\n{}",
                    w.matrix,
                    c.level,
                    w.word,
                    w.image.render_dense()
                );
            }
            s
        }
    })
}

fn render_scan(rows: &[ScanRow], format: Format) -> Result<String, Error> {
    Ok(match format {
        Format::Json => json(&rows),
        Format::Csv => csv_rows(rows)?,
        Format::Text => {
            let mut s = format!(
                "{:>7} {:>4} {:>10} {:>9} {:>7} {:>6} {:>10} {:>9}\n",
                "alpha", "N", "index", "genus", "cusps", "level", "free_gens", "congruent"
            );
            for r in rows {
                s += &format!(
                    "{:>7} {:>4} {:>10} {:>9} {:>7} {:>6} {:>10} {:>9}\n",
                    r.alpha.to_string(),
                    r.n,
                    r.index,
                    r.genus,
                    r.cusps,
                    r.level,
                    r.free_generators,
                    r.congruent
                );
            }
            s
        }
    })
}

fn render_gamma_d(g: &GammaDInfo, format: Format) -> Result<String, Error> {
    Ok(match format {
        Format::Json => json(g),
        Format::Csv => csv_rows(&[g])?,
        Format::Text => format!(
            "d                            = {}\nindex_in_psl                 = {}\ngenus                        = {}\ncusps                        = {}\nparabolic_generators         = {} (one relation S_1...S_{} = Id)\narea                         = {}·π\ngauss_bonnet_area            = {}·π\nzograf_applicable            = {}\ncongruence_excluded_by_bound = {}\nknown_congruent              = {}\n",
            g.d,
            g.index_in_psl,
            g.genus,
            g.cusps,
            g.parabolic_generators,
            g.parabolic_generators,
            g.area_over_pi,
            g.gauss_bonnet_area_over_pi,
            g.zograf_applicable,
            g.congruence_excluded_by_bound,
            g.known_congruent
        ),
    })
}

fn run(cli: Cli) -> Result<String, Error> {
    let mut analyzer = Analyzer::new(cli.cap, cli.max_modulus);
    if let Some(dir) = &cli.cache_dir {
        analyzer = analyzer.with_cache(Cache::new(dir));
    }
    let format = cli.format;
    match cli.command {
        Command::Decompose { input, gamma04 } => {
            let m = parse_element(&input)?;
            let word = if gamma04 {
                decompose_gamma04(&m)?.to_string()
            } else {
                decompose_st(&m).to_string()
            };
            match format {
                Format::Text => Ok(format!("{word}\n")),
                Format::Json => {
                    #[derive(Serialize)]
                    struct Out<'a> {
                        matrix: &'a ModularElement,
                        generators: &'static str,
                        word: String,
                    }
                    Ok(json(&Out {
                        matrix: &m,
                        generators: if gamma04 { "T,V" } else { "S,T" },
                        word,
                    }))
                }
                Format::Csv => Err(unsupported("decompose")),
            }
        }
        Command::Rep { alpha, element } => {
            let a: Alpha = alpha.parse()?;
            let m = parse_element(&element)?;
            let u = u_alpha(&a, &m)?;
            match format {
                Format::Text => Ok(u.render_dense()),
                Format::Json => Ok(json(&u)),
                Format::Csv => Err(unsupported("rep")),
            }
        }
        Command::KernelInfo { alpha, verify } => {
            let a: Alpha = alpha.parse()?;
            render_report(&analyzer.kernel_report(&a, verify)?, format)
        }
        Command::Congruence { alpha } => {
            let a: Alpha = alpha.parse()?;
            render_certificate(&analyzer.decide_congruence(&a)?, format)
        }
        Command::Scan { max_den, full_range } => {
            if max_den < 1 {
                return Err(Error::Domain("--max-den must be at least 1".into()));
            }
            render_scan(&analyzer.scan(max_den, full_range)?, format)
        }
        Command::GammaD { d } => render_gamma_d(&gamma_d_info(d)?, format),
        Command::Probe { k, samples } => {
            let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
            let p = abelianness_probe(k, samples, &mut rng)?;
            match format {
                Format::Json => Ok(json(&p)),
                Format::Csv => Err(unsupported("probe")),
                Format::Text => {
                    let mut s = format!(
                        "k = {}, modulus = {}\nsampled commutators outside Gamma({}): {} of {}\n",
                        p.k, p.modulus, p.modulus, p.failures, p.samples
                    );
                    if let (Some(w), Some(out)) = (&p.witness, p.witness_outside) {
                        s += &format!(
                            "witness: ({} {})^-1 ({} {}) = {}, in Gamma({}): {}\n",
                            w.h1, w.h2, w.h2, w.h1, w.commutator, p.modulus, !out
                        );
                    }
                    s += &format!("abelian quotient: {}\n", p.abelian());
                    Ok(s)
                }
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            let mut stdout = io::stdout().lock();
            if stdout.write_all(out.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
