use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use super::commands::{CliError, McCheck, RunResult};
use super::config::RunConfig;
use crate::inequalities::{CheckId, VerificationReport};

#[derive(Serialize)]
struct Header {
    tool: &'static str,
    version: &'static str,
    generated_at_unix: u64,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    header: Header,
    config: &'a RunConfig,
    all_pass: bool,
    reports: &'a [VerificationReport],
    #[serde(skip_serializing_if = "Option::is_none")]
    monte_carlo: Option<&'a McCheck>,
}

#[derive(Serialize)]
struct CsvRow<'a> {
    check: &'a str,
    n: usize,
    radius: f64,
    measure: &'a str,
    eps1: String,
    eps2: String,
    lambda: String,
    margin: String,
    pass: bool,
    oracle_diff: String,
    seed: u64,
    expected_failure: bool,
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn io(e: impl std::fmt::Display) -> CliError {
    CliError::Io(e.to_string())
}

pub fn report_json(cfg: &RunConfig, result: &RunResult) -> Result<String, CliError> {
    let generated_at_unix = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let doc = JsonReport {
        header: Header { tool: env!("CARGO_PKG_NAME"), version: env!("CARGO_PKG_VERSION"), generated_at_unix },
        config: cfg,
        all_pass: result.all_pass(),
        reports: &result.reports,
        monte_carlo: result.monte_carlo.as_ref(),
    };
    serde_json::to_string_pretty(&doc).map_err(io)
}

pub fn report_csv(reports: &[VerificationReport]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in reports {
        let p = &r.params;
        w.serialize(CsvRow {
            check: r.check.as_str(),
            n: p.n,
            radius: p.radius,
            measure: &p.measure,
            eps1: opt(p.eps1),
            eps2: opt(p.eps2),
            lambda: opt(p.lambda),
            margin: format!("{:.6e}", r.margin),
            pass: r.pass,
            oracle_diff: r.oracle_diff().map(|d| format!("{d:.3e}")).unwrap_or_default(),
            seed: p.seed.unwrap_or_default(),
            expected_failure: r.expected_failure,
        })
        .map_err(io)?;
    }
    let bytes = w.into_inner().map_err(io)?;
    String::from_utf8(bytes).map_err(io)
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 420.0;
const PAD: f64 = 50.0;

/// Margin against lambda, one polyline per `(eps1, eps2)` pair of each scan.
pub fn margins_svg(reports: &[VerificationReport]) -> Option<String> {
    let mut series: BTreeMap<(CheckId, u64, u64), Vec<(f64, f64)>> = BTreeMap::new();
    for r in reports.iter().filter(|r| matches!(r.check, CheckId::ScanDimBm | CheckId::ScanLogBm)) {
        let (Some(e1), Some(e2), Some(l)) = (r.params.eps1, r.params.eps2, r.params.lambda) else { continue };
        series.entry((r.check, e1.to_bits(), e2.to_bits())).or_default().push((l, r.margin));
    }
    if series.is_empty() {
        return None;
    }
    let ys = series.values().flatten().map(|p| p.1);
    let (lo, hi) = ys.fold((0.0f64, 0.0f64), |(a, b), y| (a.min(y), b.max(y)));
    let span = if hi > lo { hi - lo } else { 1.0 };
    let x = |l: f64| PAD + l * (WIDTH - 2.0 * PAD);
    let y = |m: f64| HEIGHT - PAD - (m - lo) / span * (HEIGHT - 2.0 * PAD);
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}">"#);
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<line x1="{PAD}" y1="{0:.2}" x2="{1:.2}" y2="{0:.2}" stroke="gray" stroke-dasharray="4"/>"#,
        y(0.0),
        WIDTH - PAD
    );
    let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="12">lambda</text>"#, WIDTH / 2.0, HEIGHT - 15.0);
    let _ = writeln!(s, r#"<text x="5" y="{PAD}" font-size="12">{hi:.2e}</text>"#);
    let _ = writeln!(s, r#"<text x="5" y="{}" font-size="12">{lo:.2e}</text>"#, HEIGHT - PAD);
    for (i, ((check, _, _), pts)) in series.iter().enumerate() {
        let color = if *check == CheckId::ScanDimBm { 210 } else { 20 };
        let hue = (color + 7 * i) % 360;
        let path: Vec<String> = pts.iter().map(|&(l, m)| format!("{:.2},{:.2}", x(l), y(m))).collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="hsl({hue},60%,45%)" stroke-width="1" points="{}"/>"#,
            path.join(" ")
        );
    }
    s.push_str("</svg>\n");
    Some(s)
}

/// Write `report.json`, `report.csv` and, when asked, `margins.svg`.
pub fn write_outputs(dir: &Path, cfg: &RunConfig, result: &RunResult, svg: bool) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(io)?;
    fs::write(dir.join("report.json"), report_json(cfg, result)?).map_err(io)?;
    fs::write(dir.join("report.csv"), report_csv(&result.reports)?).map_err(io)?;
    if svg {
        if let Some(text) = margins_svg(&result.reports) {
            // plots never change the exit status
            if let Err(e) = fs::write(dir.join("margins.svg"), text) {
                eprintln!("warning: could not write margins.svg: {e}");
            }
        }
    }
    Ok(())
}
