//! Command-line front end: range verification with JSON/CSV/text reports,
//! surface construction and validation, directional decompositions, group
//! computation per component, the HLK invariant, and the appendix checks.

use std::fs;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use prym3::cylinders::{cylinder_decomposition, moduli_ratios, Direction};
use prym3::invariants::hlk_invariant;
use prym3::prototypes::{components, Prototype};
use prym3::surface::{build_surface, surface_to_json, validate_surface, SurfaceSpec};
use prym3::twists::{multitwist, twist_permutation};
use prym3::verify::{
    appendix_a_check, compute_group, report_csv, report_text, verify_range, VerifyOptions,
    DEFAULT_STEP_BUDGET,
};

#[derive(Parser)]
#[command(
    name = "prym3",
    about = "Exact verification of the permutation groups induced by affine multitwists on genus-three Prym eigenforms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    #[value(name = "A+")]
    APlus,
    #[value(name = "A-")]
    AMinus,
    Z,
    B8,
    #[value(name = "SQZ")]
    Sqz,
    C,
    D,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum ComponentArg {
    Plus,
    Minus,
}

#[derive(clap::Args)]
struct SurfaceArgs {
    /// Which family to build.
    #[arg(long, value_enum)]
    model: ModelArg,
    /// Discriminant D (models A+, A-, Z).
    #[arg(long = "D")]
    d_param: Option<i64>,
    /// Reduced prototype parameter e ∈ S_D.
    #[arg(long)]
    e: Option<i64>,
    /// Square-tiled parameter d (models SQZ, C, D).
    #[arg(long)]
    d: Option<i64>,
    /// General splitting prototype (a, b, c, e) for models A+/A-.
    #[arg(long)]
    a: Option<i64>,
    #[arg(long)]
    b: Option<i64>,
    #[arg(long)]
    c: Option<i64>,
}

impl SurfaceArgs {
    fn to_spec(&self) -> Result<SurfaceSpec, String> {
        let need = |o: Option<i64>, name: &str| o.ok_or(format!("--{name} is required"));
        match self.model {
            ModelArg::APlus | ModelArg::AMinus => {
                let e = need(self.e, "e")?;
                let proto = if let (Some(a), Some(b), Some(c)) = (self.a, self.b, self.c) {
                    Prototype::new(a, b, c, e).map_err(|x| x.to_string())?
                } else {
                    let d = need(self.d_param, "D")?;
                    Prototype::reduced(d as u64, e).map_err(|x| x.to_string())?
                };
                Ok(match self.model {
                    ModelArg::APlus => SurfaceSpec::APlus(proto),
                    _ => SurfaceSpec::AMinus(proto),
                })
            }
            ModelArg::Z => Ok(SurfaceSpec::Z {
                d_param: need(self.d_param, "D")? as u64,
                e: need(self.e, "e")?,
            }),
            ModelArg::B8 => Ok(SurfaceSpec::B8),
            ModelArg::Sqz => Ok(SurfaceSpec::SquareTiledZ {
                d: need(self.d, "d")?,
                e: need(self.e, "e")?,
            }),
            ModelArg::C => Ok(SurfaceSpec::ModelC {
                d: need(self.d, "d")?,
            }),
            ModelArg::D => Ok(SurfaceSpec::ModelD {
                d: need(self.d, "d")?,
            }),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Verify the classification over a discriminant range.
    Verify {
        #[arg(long)]
        dmin: i64,
        #[arg(long)]
        dmax: i64,
        #[arg(long, default_value_t = 4)]
        jobs: usize,
        #[arg(long, value_enum, default_value_t = FormatArg::Text)]
        format: FormatArg,
        #[arg(long)]
        out: Option<String>,
    },
    /// Build and validate a surface; optionally emit its JSON description.
    Surface {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[arg(long)]
        emit: Option<String>,
    },
    /// Decompose a surface into cylinders in a direction "x,y".
    Decompose {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[arg(long)]
        dir: String,
    },
    /// Compute the permutation group of one component of E_D(4).
    Group {
        #[arg(long = "D")]
        d_param: i64,
        #[arg(long, value_enum)]
        component: Option<ComponentArg>,
    },
    /// HLK invariant of the square-tiled surface Z_{d²}(e).
    Hlk {
        #[arg(long)]
        d: i64,
        #[arg(long)]
        e: i64,
    },
    /// Appendix checks for the one/two-cylinder families at parameter d.
    AppendixA {
        #[arg(long)]
        d: i64,
    },
}

fn run() -> Result<bool, String> {
    let cli = Cli::parse();
    match cli.command {
        Command::Verify {
            dmin,
            dmax,
            jobs,
            format,
            out,
        } => {
            let opts = VerifyOptions {
                dmin,
                dmax,
                jobs,
                step_budget: DEFAULT_STEP_BUDGET,
            };
            let report = verify_range(&opts);
            let rendered = match format {
                FormatArg::Json => {
                    serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?
                }
                FormatArg::Csv => report_csv(&report),
                FormatArg::Text => report_text(&report),
            };
            match out {
                Some(path) => fs::write(&path, rendered).map_err(|e| e.to_string())?,
                None => print!("{rendered}"),
            }
            Ok(report.all_pass)
        }
        Command::Surface { surface, emit } => {
            let spec = surface.to_spec()?;
            let s = build_surface(&spec).map_err(|e| e.to_string())?;
            let v = validate_surface(&s);
            print!("{v}");
            if let Some(path) = emit {
                fs::write(&path, surface_to_json(&s)).map_err(|e| e.to_string())?;
                println!("wrote {path}");
            }
            Ok(v.passed())
        }
        Command::Decompose { surface, dir } => {
            let spec = surface.to_spec()?;
            let s = build_surface(&spec).map_err(|e| e.to_string())?;
            let parts: Vec<i64> = dir
                .split(',')
                .map(|t| t.trim().parse::<i64>().map_err(|e| e.to_string()))
                .collect::<Result<_, _>>()?;
            if parts.len() != 2 {
                return Err("--dir expects \"x,y\"".into());
            }
            let direction =
                Direction::from_ints(s.d_param(), parts[0], parts[1]).map_err(|e| e.to_string())?;
            let dec = cylinder_decomposition(&s, &direction, DEFAULT_STEP_BUDGET)
                .map_err(|e| e.to_string())?;
            println!("direction {direction}: {} cylinders", dec.cylinders.len());
            for (i, c) in dec.cylinders.iter().enumerate() {
                println!(
                    "  cylinder {i}: width = {}, height = {}, modulus = {} (≈ {:.6})",
                    c.width,
                    c.height,
                    c.modulus,
                    c.modulus.approx()
                );
            }
            match moduli_ratios(&dec) {
                Ok(ratios) => println!(
                    "  moduli ratios: {}",
                    ratios
                        .iter()
                        .map(|r| r.to_string())
                        .collect::<Vec<_>>()
                        .join(", ")
                ),
                Err(e) => println!("  moduli ratios: {e}"),
            }
            if let Ok(tw) = multitwist(&dec) {
                println!("  twist counts k = {:?}, t = {}", tw.k, tw.t);
            }
            if let Ok(p) = twist_permutation(&s, &dec) {
                println!("  induced permutation: {}", p.cycles());
            }
            Ok(true)
        }
        Command::Group { d_param, component } => {
            let comps = components(d_param).map_err(|e| e.to_string())?;
            let chosen: Vec<_> = match (component, comps.len()) {
                (None, _) => comps,
                (Some(ComponentArg::Plus), _) => vec![comps[0]],
                (Some(ComponentArg::Minus), n) if n > 1 => vec![comps[1]],
                (Some(ComponentArg::Minus), _) => {
                    return Err(format!("E_{d_param}(4) is connected"))
                }
            };
            let mut all = true;
            for comp in &chosen {
                let r = compute_group(d_param, comp, DEFAULT_STEP_BUDGET);
                println!(
                    "D={d_param} component {}: lower={} upper={} predicted={} verdict={}",
                    r.tag,
                    r.lower,
                    r.upper,
                    r.predicted,
                    if r.verdict { "pass" } else { "FAIL" }
                );
                for g in &r.generators {
                    println!("  {} twist {} ↦ {}", g.surface, g.direction, g.cycles);
                }
                for f in &r.failures {
                    println!("  failure: {f}");
                }
                all &= r.verdict;
            }
            Ok(all)
        }
        Command::Hlk { d, e } => {
            let s = build_surface(&SurfaceSpec::SquareTiledZ { d, e }).map_err(|e| e.to_string())?;
            let h = hlk_invariant(&s).map_err(|e| e.to_string())?;
            println!("HLK(Z_{{{d}²}}({e})) = {h}");
            Ok(true)
        }
        Command::AppendixA { d } => {
            let r = appendix_a_check(d, DEFAULT_STEP_BUDGET);
            for m in &r.models {
                println!(
                    "d={d} model {}: n={} HLK={} vertical={} lateral-equal={} {}",
                    m.model,
                    m.n_squares,
                    m.hlk,
                    m.vertical_cylinders,
                    m.lateral_moduli_equal,
                    if m.failures.is_empty() { "pass" } else { "FAIL" }
                );
                for f in &m.failures {
                    println!("  failure: {f}");
                }
            }
            Ok(r.pass)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
