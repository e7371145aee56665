//! `rpm reproduce`: re-compute a built-in reference table and optionally
//! diff every cell against the embedded values.

use clap::Args;
use rug::Float;
use serde::{Deserialize, Serialize};

use riccati_pade::apnum::{agreement_digits, PrecisionContext};
use riccati_pade::oracle::{self, WkbTable};
use riccati_pade::problem::{parse_coupling, Preset};
use riccati_pade::reference::{
    printed_digits, DOUBLE_WELL_RESONANCES, TRIPLE_WELL_CONVERGENCE, TRIPLE_WELL_RESONANCES,
};
use riccati_pade::solver::{solve_adaptive, SolveConfig};
use riccati_pade::{ProblemSpec, Result};

use crate::output::{component, csv_table, text_table, ConfigEcho, Format, OutputRecord};
use crate::solve::sweep_rows_for;
use crate::{EXIT_NOT_CONVERGED, EXIT_OK};

#[derive(Args, Debug)]
pub struct ReproduceArgs {
    /// Which reference table: 1 (convergence), 2 (triple well), 3 (double well)
    table: u32,
    /// Compare against the embedded reference values cell by cell
    #[arg(long)]
    diff: bool,
    /// Output format
    #[arg(long, default_value = "table")]
    format: String,
    /// Worker threads for sweep rows
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

/// One compared cell: the measured agreement and its pass threshold.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CellDiff {
    pub column: String,
    pub ours: String,
    pub reference: String,
    pub agreement_digits: u32,
    pub required_digits: u32,
    pub pass: bool,
}

fn cmp_ctx() -> PrecisionContext {
    PrecisionContext::with_digits(60).unwrap()
}

fn parse_ref(s: &str) -> Float {
    cmp_ctx().parse_decimal(s).unwrap().into_parts().0
}

/// |ours - ref| within 1.1 units of the reference's last printed digit.
fn within_printed_ulp(ours: &Float, reference: &str) -> bool {
    let ctx = cmp_ctx();
    let want = parse_ref(reference);
    let n = printed_digits(reference).max(1);
    let lead = want.clone().abs().log10().to_f64().floor() as i64;
    let ulp = ctx.pow10(lead - (n as i64 - 1));
    let diff = Float::with_val(want.prec().max(ours.prec()), ours - &want).abs();
    diff <= ulp * ctx.real_from_f64(1.1)
}

fn diff_cell(
    column: &str,
    ours: &Float,
    reference: &str,
    required: u32,
    exact_zero: bool,
) -> CellDiff {
    let pass = if exact_zero {
        ours.is_zero()
    } else if required == 0 {
        within_printed_ulp(ours, reference)
    } else {
        agreement_digits(ours, &parse_ref(reference)).is_none_or(|d| d >= required)
    };
    let agreement = if exact_zero {
        if ours.is_zero() {
            60
        } else {
            0
        }
    } else {
        agreement_digits(ours, &parse_ref(reference)).unwrap_or(60)
    };
    CellDiff {
        column: column.into(),
        ours: component(ours, printed_digits(reference).clamp(6, 21)),
        reference: reference.into(),
        agreement_digits: agreement,
        required_digits: if required == 0 {
            printed_digits(reference)
        } else {
            required
        },
        pass,
    }
}

pub fn run(args: ReproduceArgs) -> Result<i32> {
    let format = Format::parse(&args.format)?;
    match args.table {
        1 => run_convergence(&args, format),
        2 => run_resonances(&args, format, Preset::TripleWell, &TRIPLE_WELL_RESONANCES),
        3 => run_resonances(&args, format, Preset::DoubleWell, &DOUBLE_WELL_RESONANCES),
        other => Err(riccati_pade::Error::Config(format!(
            "unknown table {} (expected 1, 2 or 3)",
            other
        ))),
    }
}

fn run_convergence(args: &ReproduceArgs, format: Format) -> Result<i32> {
    let spec = ProblemSpec::triple_well(parse_coupling("0.14")?)?;
    let cfg = SolveConfig::default();
    let report = solve_adaptive(&spec, &cfg)?;

    let mut all_pass = true;
    let mut diffs: Vec<(usize, Vec<CellDiff>)> = Vec::new();
    let mut rows: Vec<Vec<String>> = Vec::new();
    for (entry, (dim, re_ref, im_ref)) in report.entries.iter().zip(TRIPLE_WELL_CONVERGENCE) {
        let e = &entry.root.energy;
        let re = component(e.re(), 20);
        let im = component(e.im(), 20);
        if args.diff {
            // published imaginary parts drift in their 13th digit across the
            // last dimensions; 12 matching digits is the acceptance bar
            let re_cell = diff_cell("re", e.re(), re_ref, 0, false);
            let im_cell = if im_ref == "0" {
                diff_cell("im", e.im(), im_ref, 0, true)
            } else {
                diff_cell("im", e.im(), im_ref, 12, false)
            };
            all_pass &= re_cell.pass && im_cell.pass;
            rows.push(vec![
                dim.to_string(),
                re.clone(),
                im.clone(),
                format!(
                    "{}/{}",
                    re_cell.agreement_digits.min(21),
                    im_cell.agreement_digits.min(21)
                ),
                if re_cell.pass && im_cell.pass {
                    "pass"
                } else {
                    "FAIL"
                }
                .into(),
            ]);
            diffs.push((dim, vec![re_cell, im_cell]));
        } else {
            rows.push(vec![dim.to_string(), re, im]);
        }
    }

    emit_convergence(args, format, &report, rows, diffs)?;
    Ok(if all_pass {
        EXIT_OK
    } else {
        EXIT_NOT_CONVERGED
    })
}

fn emit_convergence(
    args: &ReproduceArgs,
    format: Format,
    report: &riccati_pade::SequenceReport,
    rows: Vec<Vec<String>>,
    diffs: Vec<(usize, Vec<CellDiff>)>,
) -> Result<()> {
    let header: Vec<&str> = if args.diff {
        vec!["D", "Re E", "Im E", "agreement", "status"]
    } else {
        vec!["D", "Re E", "Im E"]
    };
    match format {
        Format::Table => print!("{}", text_table(&header, &rows)),
        Format::Csv => print!("{}", csv_table(&header, &rows)),
        Format::Json => {
            let echo = ConfigEcho {
                command: "reproduce-1".into(),
                preset: Some("triple-well".into()),
                alpha: "0".into(),
                g: Some("7/50".into()),
                displacement: 0,
                d_max: 15,
                target_digits: 20,
                state_index: 0,
                jobs: args.jobs,
                ..Default::default()
            };
            let mut record = OutputRecord::new(echo);
            record.digits_used = Some(report.digits_used);
            record.verdict = Some(report.verdict.as_str().into());
            let mut value = serde_json::to_value(&record).expect("record serializes");
            if args.diff {
                value["diff"] = serde_json::to_value(
                    diffs
                        .iter()
                        .map(|(d, cells)| serde_json::json!({"d": d, "cells": cells}))
                        .collect::<Vec<_>>(),
                )
                .expect("diff serializes");
            }
            value["table"] = serde_json::to_value(
                rows.iter()
                    .map(|r| serde_json::json!({"d": r[0], "re": r[1], "im": r[2]}))
                    .collect::<Vec<_>>(),
            )
            .expect("rows serialize");
            println!("{}", serde_json::to_string_pretty(&value).unwrap());
        }
    }
    Ok(())
}

fn run_resonances(
    args: &ReproduceArgs,
    format: Format,
    preset: Preset,
    reference: &[(&str, &str, &str, &str)],
) -> Result<i32> {
    let cfg = SolveConfig::default();
    let gs: Vec<&str> = reference.iter().map(|r| r.0).collect();
    let rows = sweep_rows_for(preset, &gs, &cfg, args.jobs)?;

    let table: WkbTable = preset.into();
    let mut all_pass = true;
    let mut out_rows: Vec<Vec<String>> = Vec::new();
    let mut diff_rows: Vec<serde_json::Value> = Vec::new();
    for (row, (g_ref, re_ref, im_ref, ratio_ref)) in rows.iter().zip(reference) {
        if let Some(err) = &row.error {
            all_pass = false;
            out_rows.push(vec![(*g_ref).into(), format!("error: {}", err)]);
            continue;
        }
        let e = row.energy.as_ref().unwrap();
        let ratio = oracle::wkb_ratio(table, &parse_coupling(g_ref)?, e.im())?;
        if args.diff {
            let cells = vec![
                diff_cell("re", e.re(), re_ref, 0, false),
                diff_cell("im", e.im(), im_ref, 0, false),
                diff_cell("ratio", &ratio, ratio_ref, 0, false),
            ];
            let pass = cells.iter().all(|c| c.pass);
            all_pass &= pass;
            out_rows.push(vec![
                (*g_ref).into(),
                cells[0].ours.clone(),
                cells[1].ours.clone(),
                cells[2].ours.clone(),
                cells
                    .iter()
                    .map(|c| c.agreement_digits.min(21).to_string())
                    .collect::<Vec<_>>()
                    .join("/"),
                if pass { "pass" } else { "FAIL" }.into(),
            ]);
            diff_rows.push(serde_json::json!({"g": g_ref, "cells": cells}));
        } else {
            out_rows.push(vec![
                (*g_ref).into(),
                component(e.re(), 20),
                component(e.im(), 20),
                component(&ratio, 10),
            ]);
        }
    }

    let header: Vec<&str> = if args.diff {
        vec!["g", "Re E", "Im E", "ratio", "agreement", "status"]
    } else {
        vec!["g", "Re E", "Im E", "ratio"]
    };
    match format {
        Format::Table => print!("{}", text_table(&header, &out_rows)),
        Format::Csv => print!("{}", csv_table(&header, &out_rows)),
        Format::Json => {
            let echo = ConfigEcho {
                command: format!("reproduce-{}", args.table),
                preset: Some(preset.name().into()),
                alpha: "0".into(),
                g_list: Some(gs.iter().map(|s| s.to_string()).collect()),
                displacement: 0,
                d_max: 15,
                target_digits: 20,
                state_index: 0,
                jobs: args.jobs,
                ..Default::default()
            };
            let record = OutputRecord::new(echo);
            let mut value = serde_json::to_value(&record).expect("record serializes");
            value["table"] = serde_json::to_value(
                out_rows
                    .iter()
                    .map(|r| serde_json::json!(r))
                    .collect::<Vec<_>>(),
            )
            .expect("rows serialize");
            if args.diff {
                value["diff"] = serde_json::Value::Array(diff_rows);
            }
            println!("{}", serde_json::to_string_pretty(&value).unwrap());
        }
    }
    Ok(if all_pass {
        EXIT_OK
    } else {
        EXIT_NOT_CONVERGED
    })
}
