//! Two-column CSV series extracted from report envelopes.

use serde_json::Value;
use sfuc_core::error::{Error, Result};
use sfuc_core::util::fmt_g17;

struct SeriesSpec {
    name: &'static str,
    header: &'static str,
    extract: fn(&Value) -> Option<Vec<(f64, f64)>>,
}

fn rows_xy(results: &Value, rows_path: &[&str], x: &str, y: &str) -> Option<Vec<(f64, f64)>> {
    let mut node = results;
    for p in rows_path {
        node = node.get(p)?;
    }
    let rows = node.as_array()?;
    let mut out = Vec::new();
    for r in rows {
        let xv = r.get(x)?.as_f64()?;
        if let Some(yv) = r.get(y).and_then(|v| v.as_f64()) {
            out.push((xv, yv));
        }
    }
    Some(out)
}

fn series_for(kind: &str) -> Vec<SeriesSpec> {
    match kind {
        "ucp" => vec![
            SeriesSpec {
                name: "c_obs-vs-L",
                header: "L,C_obs",
                extract: |r| rows_xy(r, &["rows"], "side", "c_obs"),
            },
            SeriesSpec {
                name: "c-formula-vs-L",
                header: "L,C_sfuc",
                extract: |r| rows_xy(r, &["rows"], "side", "c_formula"),
            },
        ],
        "fit-exponent" => vec![SeriesSpec {
            name: "C_obs-vs-delta",
            header: "delta,C_obs",
            extract: |r| {
                let pts = r.get("points")?.as_array()?;
                pts.iter()
                    .map(|p| Some((p.get(0)?.as_f64()?, p.get(1)?.as_f64()?)))
                    .collect()
            },
        }],
        "wegner" => vec![
            SeriesSpec {
                name: "mean-vs-eps",
                header: "eps,mean",
                extract: |r| rows_xy(r, &["rows"], "eps", "mean"),
            },
            SeriesSpec {
                name: "bound-vs-eps",
                header: "eps,bound",
                extract: |r| rows_xy(r, &["rows"], "eps", "bound"),
            },
        ],
        "initial-scale" => vec![SeriesSpec {
            name: "prob-vs-L",
            header: "L,probability",
            extract: |r| rows_xy(r, &["rows"], "side", "probability"),
        }],
        "heat-obs" => vec![
            SeriesSpec {
                name: "kappa-vs-T",
                header: "T,kappa_T",
                extract: |r| rows_xy(r, &["report", "rows"], "time", "kappa"),
            },
            SeriesSpec {
                name: "ln-kappa-vs-invT",
                header: "1/T,ln kappa_T",
                extract: |r| {
                    let rows = rows_xy(r, &["report", "rows"], "time", "kappa")?;
                    Some(rows.into_iter().map(|(t, k)| (1.0 / t, k.ln())).collect())
                },
            },
        ],
        "conditions" => vec![
            SeriesSpec {
                name: "floor-vs-delta",
                header: "delta,floor",
                extract: |r| {
                    let rows = r.get("condition_a")?.get("per_delta")?.as_array()?;
                    rows.iter()
                        .map(|p| Some((p.get(0)?.as_f64()?, p.get(1)?.as_f64()?)))
                        .collect()
                },
            },
            SeriesSpec {
                name: "radius-vs-delta",
                header: "delta,radius",
                extract: |r| {
                    let rows = r.get("condition_a")?.get("per_delta")?.as_array()?;
                    rows.iter()
                        .map(|p| Some((p.get(0)?.as_f64()?, p.get(2)?.as_f64()?)))
                        .collect()
                },
            },
        ],
        "weights" => vec![SeriesSpec {
            name: "distance-vs-delta",
            header: "delta,distance",
            extract: |r| rows_xy(r, &["hyperbola"], "delta", "distance"),
        }],
        "lifting" => vec![SeriesSpec {
            name: "gap-vs-index",
            header: "i,gap",
            extract: |r| {
                let rows = r.get("rows")?.as_array()?;
                rows.iter()
                    .map(|row| Some((row.get("index")?.as_f64()?, row.get("gap")?.as_f64()?)))
                    .collect()
            },
        }],
        "ghost" => vec![SeriesSpec {
            name: "sandwich-mid-vs-index",
            header: "vector,H1_energy",
            extract: |r| {
                let rows = r.get("sandwiches")?.as_array()?;
                rows.iter()
                    .enumerate()
                    .map(|(i, row)| Some((i as f64, row.get("mid")?.as_f64()?)))
                    .collect()
            },
        }],
        _ => vec![],
    }
}

/// Extract a named series from a report file as `x,y` CSV text.
pub fn emit_plotdata(report_text: &str, series: &str) -> Result<String> {
    let envelope: Value = serde_json::from_str(report_text)
        .map_err(|e| Error::Parse(format!("report is not valid JSON: {e}")))?;
    let kind = envelope
        .get("kind")
        .and_then(|k| k.as_str())
        .ok_or_else(|| Error::Parse("report has no `kind` field".into()))?;
    let results = envelope
        .get("results")
        .ok_or_else(|| Error::Parse("report has no `results` field".into()))?;
    let specs = series_for(kind);
    let available: Vec<&str> = specs.iter().map(|s| s.name).collect();
    let spec = specs
        .iter()
        .find(|s| s.name == series)
        .ok_or_else(|| Error::Config(format!("unknown series `{series}`; available: {available:?}")))?;
    let rows = (spec.extract)(results).unwrap_or_default();
    let mut out = format!("{}\n", spec.header);
    for (x, y) in rows {
        out.push_str(&format!("{},{}\n", fmt_g17(x), fmt_g17(y)));
    }
    Ok(out)
}
