//! `rpm solve`: a single eigenvalue solve, or a sweep over `--g-list`.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::Args;
use rug::Rational;

use riccati_pade::apnum::PrecisionContext;
use riccati_pade::problem::{decimal_to_rational, parse_coupling, Preset};
use riccati_pade::solver::{self, solve_adaptive, PrecisionPolicy, SolveConfig, SweepRow, Verdict};
use riccati_pade::{Error, ProblemSpec, Result, SequenceReport};

use crate::config::{check_keys, digits_override, load_config, SOLVE_KEYS};
use crate::output::{
    component, component_truncated, coupling_decimal, csv_table, energy_columns, text_table,
    ConfigEcho, Format, OutputRecord, SequenceRowOut, SweepRowOut,
};
use crate::{EXIT_NOT_CONVERGED, EXIT_OK};

#[derive(Args, Debug)]
pub struct SolveArgs {
    /// Built-in potential family: triple-well or double-well
    #[arg(long)]
    preset: Option<String>,
    /// Custom even potential, e.g. "k2=1,k4=-0.0392,k6=0.00038416"
    #[arg(long)]
    potential: Option<String>,
    /// Parity/regularization exponent (0 even states, 1 odd states)
    #[arg(long)]
    alpha: Option<String>,
    /// Centrifugal strength V_{-2} for central-field problems
    #[arg(long)]
    centrifugal: Option<String>,
    /// Coupling, decimal or exact fraction ("0.14" or "7/50")
    #[arg(long)]
    g: Option<String>,
    /// Ascending comma-separated couplings; switches to sweep mode
    #[arg(long = "g-list")]
    g_list: Option<String>,
    /// Hankel displacement d
    #[arg(long)]
    d: Option<usize>,
    /// Largest Hankel dimension D
    #[arg(long)]
    dmax: Option<usize>,
    /// Requested significant digits
    #[arg(long = "target-digits")]
    target_digits: Option<u32>,
    /// Explicit D=2 seed, e.g. "0.97" or "0.95+0.01i"
    #[arg(long)]
    seed: Option<String>,
    /// Eigenvalue family index within the parity class
    #[arg(long)]
    state: Option<u32>,
    /// Fixed working precision in decimal digits (overrides RPM_PRECISION
    /// and the adaptive policy)
    #[arg(long)]
    digits: Option<u32>,
    /// Relative imaginary kick for the real-to-complex bifurcation
    #[arg(long = "imag-kick")]
    imag_kick: Option<f64>,
    /// Output format
    #[arg(long)]
    format: Option<String>,
    /// Config file with key = value lines; flags override it
    #[arg(long)]
    config: Option<PathBuf>,
    /// Worker threads for sweep rows
    #[arg(long)]
    jobs: Option<usize>,
}

struct Effective {
    spec: ProblemSpec,
    preset: Option<Preset>,
    g_list: Option<Vec<Rational>>,
    cfg: SolveConfig,
    format: Format,
    jobs: usize,
    echo: ConfigEcho,
}

fn merged(args: &SolveArgs) -> Result<Effective> {
    let file = match &args.config {
        Some(path) => {
            let map = load_config(path)?;
            check_keys(&map, SOLVE_KEYS)?;
            map
        }
        None => BTreeMap::new(),
    };
    let pick = |flag: &Option<String>, key: &str| -> Option<String> {
        flag.clone().or_else(|| file.get(key).cloned())
    };

    let preset_name = pick(&args.preset, "preset");
    let potential = pick(&args.potential, "potential");
    if preset_name.is_some() && potential.is_some() {
        return Err(Error::Config(
            "--preset and --potential are mutually exclusive".into(),
        ));
    }
    let g_text = pick(&args.g, "g");
    let g_list_text = pick(&args.g_list, "g-list");
    if g_text.is_some() && g_list_text.is_some() {
        return Err(Error::Config(
            "--g and --g-list are mutually exclusive".into(),
        ));
    }

    let alpha_text = pick(&args.alpha, "alpha").unwrap_or_else(|| "0".into());
    let alpha = parse_coupling(&alpha_text)?;
    let centrifugal =
        parse_coupling(&pick(&args.centrifugal, "centrifugal").unwrap_or_else(|| "0".into()))?;

    let preset = match preset_name.as_deref() {
        Some("triple-well") => Some(Preset::TripleWell),
        Some("double-well") => Some(Preset::DoubleWell),
        Some(other) => {
            return Err(Error::Config(format!(
                "unknown preset '{}' (expected triple-well or double-well)",
                other
            )))
        }
        None => None,
    };

    let g = g_text.as_deref().map(parse_coupling).transpose()?;
    let g_list = match &g_list_text {
        Some(text) => Some(
            text.split(',')
                .map(|s| parse_coupling(s.trim()))
                .collect::<Result<Vec<_>>>()?,
        ),
        None => None,
    };

    let spec = match (preset, &potential) {
        (Some(kind), None) => {
            let g0 = g.clone().or_else(|| g_list.as_ref().map(|l| l[0].clone()));
            let g0 = g0.ok_or_else(|| Error::Config("--preset requires --g or --g-list".into()))?;
            let base = ProblemSpec::preset(kind, g0)?;
            if alpha == 1 {
                base.with_alpha(1)?
            } else if alpha == 0 {
                base
            } else {
                return Err(Error::Config("presets accept alpha 0 or 1 only".into()));
            }
        }
        (None, Some(text)) => {
            if g_list.is_some() {
                return Err(Error::Config(
                    "--g-list needs a preset (the ratio column is preset-specific)".into(),
                ));
            }
            ProblemSpec::custom(&parse_potential(text)?, alpha.clone(), centrifugal)?
        }
        (None, None) => return Err(Error::Config("give either --preset or --potential".into())),
        (Some(_), Some(_)) => unreachable!("checked above"),
    };

    fn file_num<T: std::str::FromStr>(
        file: &BTreeMap<String, String>,
        key: &str,
    ) -> Result<Option<T>> {
        match file.get(key) {
            None => Ok(None),
            Some(s) => s.trim().parse::<T>().map(Some).map_err(|_| {
                Error::Config(format!("config key '{}' has invalid value '{}'", key, s))
            }),
        }
    }
    let d = args.d.or(file_num(&file, "d")?).unwrap_or(0);
    let d_max = args.dmax.or(file_num(&file, "dmax")?).unwrap_or(15);
    let target_digits = args
        .target_digits
        .or(file_num(&file, "target-digits")?)
        .unwrap_or(20);
    let state_index = args.state.or(file_num(&file, "state")?).unwrap_or(0);
    let fixed = digits_override(args.digits.or(file_num(&file, "digits")?))?;
    let jobs = args.jobs.or(file_num(&file, "jobs")?).unwrap_or(1).max(1);
    let imag_kick = args
        .imag_kick
        .or(file_num(&file, "imag-kick")?)
        .unwrap_or(1e-6);
    let format = Format::parse(&pick(&args.format, "format").unwrap_or_else(|| "table".into()))?;

    let seed_text = pick(&args.seed, "seed");
    let seed = match &seed_text {
        Some(text) => {
            let parse_digits = fixed.unwrap_or(2 * target_digits + 10 * d_max as u32 + 60);
            let ctx = PrecisionContext::with_digits(parse_digits.max(40))?;
            Some(ctx.parse_decimal(text)?)
        }
        None => None,
    };

    let cfg = SolveConfig {
        displacement: d,
        d_max,
        target_digits,
        seed,
        state_index,
        imag_kick,
        max_newton_iters: 60,
        precision_policy: match fixed {
            Some(d) => PrecisionPolicy::Fixed(d),
            None => PrecisionPolicy::Adaptive,
        },
    };

    let echo = ConfigEcho {
        command: if g_list.is_some() { "sweep" } else { "solve" }.into(),
        preset: preset.map(|p| p.name().to_owned()),
        potential: potential.clone(),
        alpha: alpha.to_string(),
        g: g.as_ref().map(|v| v.to_string()),
        g_list: g_list
            .as_ref()
            .map(|l| l.iter().map(|v| v.to_string()).collect()),
        displacement: d,
        d_max,
        target_digits,
        fixed_digits: fixed,
        seed: seed_text,
        state_index,
        jobs,
    };

    Ok(Effective {
        spec,
        preset,
        g_list,
        cfg,
        format,
        jobs,
        echo,
    })
}

/// Parses "k2=1,k4=-0.0392" into a power -> coefficient map.
fn parse_potential(text: &str) -> Result<BTreeMap<u32, Rational>> {
    let mut out = BTreeMap::new();
    for part in text.split(',') {
        let part = part.trim();
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("expected kN=value, got '{}'", part)))?;
        let power: u32 = key
            .trim()
            .strip_prefix('k')
            .and_then(|p| p.parse().ok())
            .ok_or_else(|| Error::Config(format!("expected power like k4, got '{}'", key)))?;
        out.insert(power, decimal_to_rational(value.trim())?);
    }
    Ok(out)
}

pub fn run(args: SolveArgs) -> Result<i32> {
    let eff = merged(&args)?;
    match &eff.g_list {
        None => run_single(&eff),
        Some(list) => run_sweep(&eff, list),
    }
}

fn run_single(eff: &Effective) -> Result<i32> {
    if eff.spec.is_central_field() {
        eprintln!("note: central-field problem, unvalidated against reference data");
    }
    let report = solve_adaptive(&eff.spec, &eff.cfg)?;
    let mut record = OutputRecord::new(eff.echo.clone());
    record.digits_used = Some(report.digits_used);
    record.stable_digits_re = Some(report.stable_digits_re);
    record.stable_digits_im = Some(report.stable_digits_im);
    record.verdict = Some(report.verdict.as_str().into());
    record.sequence = Some(
        report
            .entries
            .iter()
            .map(|e| {
                let (re, im) = energy_columns(&e.root.energy, eff.cfg.target_digits);
                SequenceRowOut {
                    d: e.dim,
                    re,
                    im,
                    converged: e.root.converged,
                    iterations: e.root.iterations,
                }
            })
            .collect(),
    );

    match eff.format {
        Format::Json => println!("{}", record.to_json()),
        Format::Csv => {
            let rows: Vec<Vec<String>> = record
                .sequence
                .as_ref()
                .unwrap()
                .iter()
                .map(|r| {
                    vec![
                        r.d.to_string(),
                        r.re.clone(),
                        r.im.clone(),
                        r.converged.to_string(),
                        r.iterations.to_string(),
                    ]
                })
                .collect();
            print!(
                "{}",
                csv_table(&["D", "re", "im", "converged", "iterations"], &rows)
            );
        }
        Format::Table => print_sequence_table(eff, &report),
    }
    Ok(if report.verdict == Verdict::Converged {
        EXIT_OK
    } else {
        EXIT_NOT_CONVERGED
    })
}

fn print_sequence_table(eff: &Effective, report: &SequenceReport) {
    let rows: Vec<Vec<String>> = report
        .entries
        .iter()
        .map(|e| {
            let (re, im) = energy_columns(&e.root.energy, eff.cfg.target_digits);
            vec![e.dim.to_string(), re, im]
        })
        .collect();
    print!("{}", text_table(&["D", "Re E", "Im E"], &rows));
    let last = report.final_energy();
    let final_re = component_truncated(last.re(), report.stable_digits_re, eff.cfg.target_digits);
    let final_im = component_truncated(last.im(), report.stable_digits_im, eff.cfg.target_digits);
    println!(
        "E = {} + {} i  (stable to {}/{} digits, {} working digits, {})",
        final_re,
        final_im,
        report.stable_digits_re,
        report.stable_digits_im,
        report.digits_used,
        report.verdict.as_str()
    );
}

fn run_sweep(eff: &Effective, list: &[Rational]) -> Result<i32> {
    let preset = eff
        .preset
        .expect("sweep mode implies a preset (validated in merged)");
    if list.is_empty() {
        return Err(Error::Config("empty g list".into()));
    }
    if list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config("g list must be strictly ascending".into()));
    }

    let rows: Vec<SweepRow> = if eff.jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(eff.jobs)
            .build()
            .map_err(|e| Error::Config(format!("cannot build worker pool: {}", e)))?;
        pool.install(|| {
            use rayon::prelude::*;
            list.par_iter()
                .map(|g| solver::sweep_row(preset, g, &eff.cfg))
                .collect()
        })
    } else {
        solver::sweep(preset, list, &eff.cfg)?
    };

    let out_rows: Vec<SweepRowOut> = rows
        .iter()
        .map(|r| SweepRowOut {
            g: coupling_decimal(&r.g),
            re: r
                .energy
                .as_ref()
                .map(|e| component(e.re(), eff.cfg.target_digits)),
            im: r
                .energy
                .as_ref()
                .map(|e| component(e.im(), eff.cfg.target_digits)),
            ratio: r.ratio.as_ref().map(|v| component(v, 10)),
            verdict: r.verdict.map(|v| v.as_str().to_owned()),
            stable_digits_re: r.stable_digits_re,
            stable_digits_im: r.stable_digits_im,
            digits_used: r.digits_used,
            error: r.error.clone(),
        })
        .collect();

    let mut record = OutputRecord::new(eff.echo.clone());
    record.rows = Some(out_rows.clone());

    match eff.format {
        Format::Json => println!("{}", record.to_json()),
        Format::Csv => {
            let body: Vec<Vec<String>> = out_rows
                .iter()
                .map(|r| {
                    vec![
                        r.g.clone(),
                        r.re.clone().unwrap_or_else(|| "—".into()),
                        r.im.clone().unwrap_or_else(|| "—".into()),
                        r.ratio.clone().unwrap_or_else(|| "—".into()),
                        r.verdict.clone().unwrap_or_else(|| "error".into()),
                    ]
                })
                .collect();
            print!(
                "{}",
                csv_table(&["g", "re", "im", "ratio", "verdict"], &body)
            );
        }
        Format::Table => {
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    let (re, im) = match &r.energy {
                        Some(e) => (
                            component_truncated(e.re(), r.stable_digits_re, eff.cfg.target_digits),
                            component_truncated(e.im(), r.stable_digits_im, eff.cfg.target_digits),
                        ),
                        None => ("—".into(), "—".into()),
                    };
                    vec![
                        coupling_decimal(&r.g),
                        re,
                        im,
                        r.ratio
                            .as_ref()
                            .map(|v| component(v, 10))
                            .unwrap_or_else(|| "—".into()),
                        r.verdict
                            .map(|v| v.as_str().to_owned())
                            .unwrap_or_else(|| "error".into()),
                    ]
                })
                .collect();
            print!(
                "{}",
                text_table(&["g", "Re E", "Im E", "ratio", "verdict"], &body)
            );
        }
    }

    let all_ok = rows
        .iter()
        .all(|r| r.verdict == Some(Verdict::Converged) && r.error.is_none());
    Ok(if all_ok { EXIT_OK } else { EXIT_NOT_CONVERGED })
}

/// Shared with `reproduce`: the g of each row keeps its input spelling.
pub fn sweep_rows_for(
    preset: Preset,
    gs: &[&str],
    cfg: &SolveConfig,
    jobs: usize,
) -> Result<Vec<SweepRow>> {
    let list: Vec<Rational> = gs
        .iter()
        .map(|s| parse_coupling(s))
        .collect::<Result<Vec<_>>>()?;
    if jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::Config(format!("cannot build worker pool: {}", e)))?;
        Ok(pool.install(|| {
            use rayon::prelude::*;
            list.par_iter()
                .map(|g| solver::sweep_row(preset, g, cfg))
                .collect()
        }))
    } else {
        solver::sweep(preset, &list, cfg)
    }
}
