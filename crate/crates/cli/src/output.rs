//! Deterministic CSV and JSON rendering.
//!
//! Byte-identical output for identical configurations is part of the
//! contract: floats are printed with 17 significant digits in CSV, JSON maps
//! are sorted, and nothing timing- or thread-dependent is ever emitted.

use clap::ValueEnum;
use loopsim_core::{
    pw_components, seq_label, stage_fraction_qm, Angle, Channel, McResult, StageSpec,
};
use serde_json::{json, Map, Value};

use crate::parallel::ScanRow;
use crate::SeedSource;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Monte Carlo run metadata, echoed into every output that consumed a seed.
#[derive(Debug, Clone, Copy)]
pub struct McMeta {
    pub n: u64,
    pub seed: u64,
    pub seed_source: SeedSource,
}

/// 17 significant digits, fixed scientific form.
fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn json_float(x: f64) -> Value {
    json!(x)
}

const SCAN_HEADER: &str = "theta_deg,phi_deg,f1_coarse,f1_xtheta_phi,f1_xthetabar_phi,\
f2_coarse,f2_ytheta_phi,f2_ytheta_phibar,f3_coarse,f3_xtheta_phi,f3_ytheta_phi,\
eq4_lhs,eq4_rhs,eq5_residual,eq6_lhs,eq6_rhs,eq6_satisfied,identification_gap";

const STAGE_HEADER: &str = "stage,theta_deg,phi_deg,qm_coarse,pw_coarse,split_plus,split_minus";

const MC_HEADER: &str = "stage,theta_deg,phi_deg,n,n_conditioned,seed,seed_source,\
sequence,outcome,count,frequency,stderr";

struct StageSummary {
    name: &'static str,
    qm_coarse: f64,
    pw_coarse: f64,
    split_plus: f64,
    split_minus: f64,
    components: Vec<(String, f64)>,
}

fn summarize_stages(theta: Angle, phi: Angle) -> Vec<StageSummary> {
    [StageSpec::stage1(theta, phi), StageSpec::stage2(theta, phi), StageSpec::stage3(theta, phi)]
        .iter()
        .map(|stage| {
            let split = stage.label.decomposition_loop().expect("canonical stage");
            let pw = pw_components(stage);
            StageSummary {
                name: stage.label.name(),
                qm_coarse: stage_fraction_qm(stage).coarse,
                pw_coarse: pw.coarse,
                split_plus: pw.marginal(split, Channel::Plus).expect("components"),
                split_minus: pw.marginal(split, Channel::Minus).expect("components"),
                components: pw
                    .components
                    .as_ref()
                    .expect("components")
                    .iter()
                    .map(|(seq, p)| (seq_label(seq), *p))
                    .collect(),
            }
        })
        .collect()
}

/// The `stage` document: quantum and pilot-wave fractions for all three
/// canonical stages at one angle pair.
pub fn render_stage(theta_deg: f64, phi_deg: f64, format: Format) -> String {
    let theta = Angle::from_degrees(theta_deg);
    let phi = Angle::from_degrees(phi_deg);
    let summaries = summarize_stages(theta, phi);
    match format {
        Format::Csv => {
            let mut out = String::from(STAGE_HEADER);
            out.push('\n');
            for s in &summaries {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    s.name,
                    fmt_float(theta_deg),
                    fmt_float(phi_deg),
                    fmt_float(s.qm_coarse),
                    fmt_float(s.pw_coarse),
                    fmt_float(s.split_plus),
                    fmt_float(s.split_minus),
                ));
            }
            out
        }
        Format::Json => {
            let stages: Vec<Value> = summaries
                .iter()
                .map(|s| {
                    let mut components = Map::new();
                    for (label, p) in &s.components {
                        components.insert(label.clone(), json_float(*p));
                    }
                    json!({
                        "stage": s.name,
                        "qm": { "coarse": s.qm_coarse },
                        "pilot_wave": {
                            "coarse": s.pw_coarse,
                            "split": { "plus": s.split_plus, "minus": s.split_minus },
                            "components": Value::Object(components),
                        },
                    })
                })
                .collect();
            pretty(json!({
                "command": "stage",
                "theta_deg": theta_deg,
                "phi_deg": phi_deg,
                "stages": stages,
            }))
        }
    }
}

/// The `scan` document: one row per grid point. Monte Carlo metadata, when
/// present, is echoed as a leading `#` comment in CSV and as top-level
/// fields in JSON.
pub fn render_scan(
    step_deg: f64,
    rows: &[ScanRow],
    mc_meta: Option<McMeta>,
    format: Format,
) -> String {
    match format {
        Format::Csv => {
            let mut out = String::new();
            if let Some(meta) = mc_meta {
                out.push_str(&format!(
                    "# model=monte-carlo n={} seed={} seed_source={}\n",
                    meta.n,
                    meta.seed,
                    meta.seed_source.label()
                ));
            }
            out.push_str(SCAN_HEADER);
            out.push('\n');
            for row in rows {
                let f = &row.eval.fractions;
                let r = &row.eval.report;
                let fields = [
                    fmt_float(row.theta_deg),
                    fmt_float(row.phi_deg),
                    fmt_float(f.f1_coarse),
                    fmt_float(f.f1_xtheta_phi),
                    fmt_float(f.f1_xthetabar_phi),
                    fmt_float(f.f2_coarse),
                    fmt_float(f.f2_ytheta_phi),
                    fmt_float(f.f2_ytheta_phibar),
                    fmt_float(f.f3_coarse),
                    fmt_float(f.f3_xtheta_phi),
                    fmt_float(f.f3_ytheta_phi),
                    fmt_float(r.eq4_lhs),
                    fmt_float(r.eq4_rhs),
                    fmt_float(r.eq5_residual),
                    fmt_float(r.eq6_lhs),
                    fmt_float(r.eq6_rhs),
                    if r.eq6_satisfied { "true".into() } else { "false".into() },
                    fmt_float(r.identification_gap),
                ];
                out.push_str(&fields.join(","));
                out.push('\n');
            }
            out
        }
        Format::Json => {
            let json_rows: Vec<Value> = rows
                .iter()
                .map(|row| {
                    let f = &row.eval.fractions;
                    let r = &row.eval.report;
                    let mut obj = json!({
                        "theta_deg": row.theta_deg,
                        "phi_deg": row.phi_deg,
                        "f1_coarse": f.f1_coarse,
                        "f1_xtheta_phi": f.f1_xtheta_phi,
                        "f1_xthetabar_phi": f.f1_xthetabar_phi,
                        "f2_coarse": f.f2_coarse,
                        "f2_ytheta_phi": f.f2_ytheta_phi,
                        "f2_ytheta_phibar": f.f2_ytheta_phibar,
                        "f3_coarse": f.f3_coarse,
                        "f3_xtheta_phi": f.f3_xtheta_phi,
                        "f3_ytheta_phi": f.f3_ytheta_phi,
                        "eq4_lhs": r.eq4_lhs,
                        "eq4_rhs": r.eq4_rhs,
                        "eq5_rhs": r.eq5_rhs,
                        "eq5_residual": r.eq5_residual,
                        "eq6_lhs": r.eq6_lhs,
                        "eq6_rhs": r.eq6_rhs,
                        "eq6_satisfied": r.eq6_satisfied,
                        "identification_gap": r.identification_gap,
                    });
                    if let Some(se) = &row.eval.stderrs {
                        obj["stderr"] = json!({
                            "f1_coarse": se.f1_coarse,
                            "f2_coarse": se.f2_coarse,
                            "f3_coarse": se.f3_coarse,
                        });
                    }
                    obj
                })
                .collect();
            let mut doc = json!({
                "command": "scan",
                "step_deg": step_deg,
                "model": if mc_meta.is_some() { "monte-carlo" } else { "closed-form" },
                "rows": json_rows,
            });
            if let Some(meta) = mc_meta {
                doc["n"] = json!(meta.n);
                doc["seed"] = json!(meta.seed);
                doc["seed_source"] = json!(meta.seed_source.label());
            }
            pretty(doc)
        }
    }
}

/// The `mc` document: McResult summaries for all three canonical stages.
pub fn render_mc(
    theta_deg: f64,
    phi_deg: f64,
    results: &[(&'static str, McResult)],
    meta: McMeta,
    format: Format,
) -> String {
    match format {
        Format::Csv => {
            let mut out = String::from(MC_HEADER);
            out.push('\n');
            for (name, result) in results {
                let mut push_row = |seq: &[Channel], outcome: &str, count: u64| {
                    let freq = if result.n_conditioned == 0 {
                        0.0
                    } else {
                        count as f64 / result.n_conditioned as f64
                    };
                    let se = if result.n_conditioned == 0 {
                        0.0
                    } else {
                        (freq * (1.0 - freq) / result.n_conditioned as f64).sqrt()
                    };
                    out.push_str(&format!(
                        "{},{},{},{},{},{},{},{},{},{},{},{}\n",
                        name,
                        fmt_float(theta_deg),
                        fmt_float(phi_deg),
                        result.n_trials,
                        result.n_conditioned,
                        result.seed,
                        meta.seed_source.label(),
                        seq_label(seq),
                        outcome,
                        count,
                        fmt_float(freq),
                        fmt_float(se),
                    ));
                };
                for (seq, count) in &result.counts {
                    push_row(seq, "detected", *count);
                }
                for (seq, count) in &result.undetected {
                    push_row(seq, "absorbed", *count);
                }
            }
            out
        }
        Format::Json => {
            let stages: Vec<Value> = results
                .iter()
                .map(|(name, result)| {
                    let sequences: Vec<Value> = result
                        .counts
                        .iter()
                        .map(|(seq, count)| {
                            json!({
                                "sequence": seq_label(seq),
                                "count": count,
                                "frequency": result.frequency(seq),
                                "stderr": result.stderr(seq),
                            })
                        })
                        .collect();
                    let absorbed: Vec<Value> = result
                        .undetected
                        .iter()
                        .map(|(seq, count)| {
                            json!({ "sequence": seq_label(seq), "count": count })
                        })
                        .collect();
                    json!({
                        "stage": name,
                        "n_trials": result.n_trials,
                        "n_conditioned": result.n_conditioned,
                        "conditioning_rate": result.conditioning_rate(),
                        "detected_fraction": result.detected_fraction(),
                        "detected_stderr": result.detected_stderr(),
                        "sequences": sequences,
                        "absorbed": absorbed,
                    })
                })
                .collect();
            pretty(json!({
                "command": "mc",
                "theta_deg": theta_deg,
                "phi_deg": phi_deg,
                "n": meta.n,
                "seed": meta.seed,
                "seed_source": meta.seed_source.label(),
                "stages": stages,
            }))
        }
    }
}

fn pretty(value: Value) -> String {
    let mut text = serde_json::to_string_pretty(&value).expect("json serialization");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scan_header_has_the_documented_columns() {
        assert_eq!(SCAN_HEADER.split(',').count(), 18);
        assert!(SCAN_HEADER.starts_with("theta_deg,phi_deg,f1_coarse"));
        assert!(SCAN_HEADER.ends_with("eq6_satisfied,identification_gap"));
    }

    #[test]
    fn floats_carry_seventeen_significant_digits() {
        assert_eq!(fmt_float(0.25), "2.5000000000000000e-1");
        assert_eq!(fmt_float(-0.375), "-3.7500000000000000e-1");
        assert_eq!(fmt_float(30.0), "3.0000000000000000e1");
    }

    #[test]
    fn stage_csv_has_one_row_per_stage() {
        let out = render_stage(30.0, 60.0, Format::Csv);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], STAGE_HEADER);
        assert!(lines[1].starts_with("stage1,"));
        assert!(lines[3].starts_with("stage3,"));
    }

    #[test]
    fn stage_json_reports_the_frozen_fractions() {
        let out = render_stage(30.0, 60.0, Format::Json);
        let doc: Value = serde_json::from_str(&out).unwrap();
        let stages = doc["stages"].as_array().unwrap();
        let coarse: Vec<f64> =
            stages.iter().map(|s| s["pilot_wave"]["coarse"].as_f64().unwrap()).collect();
        assert!((coarse[0] - 0.25).abs() < 1e-12);
        assert!((coarse[1] - 0.25).abs() < 1e-12);
        assert!((coarse[2] - 0.75).abs() < 1e-12);
        let split = &stages[0]["pilot_wave"]["split"];
        assert!((split["plus"].as_f64().unwrap() - 0.1875).abs() < 1e-12);
        assert!((split["minus"].as_f64().unwrap() - 0.0625).abs() < 1e-12);
    }
}
