use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::bench::BenchRow;
use super::bound::BoundRow;
use super::campaign::{SummaryRow, TrialRow};
use crate::error::{Error, Result};

pub const CAMPAIGN_HEADER: &str =
    "snr_db,m,model,method,trial,sum_rate_bps_hz,served_users,elapsed_ms,iterations";
pub const SUMMARY_HEADER: &str = "snr_db,m,model,method,trials,mean_sum_rate_bps_hz,std_sum_rate_bps_hz,mean_served_users,std_served_users,median_elapsed_ms";
pub const BENCH_HEADER: &str =
    "method,m,model,snr_db,median_ms,mean_sum_rate_bps_hz,mean_served_users,repetitions";
pub const BOUND_HEADER: &str = "alpha,m_prime,r_k,r_j,bound,mc_estimate,mc_stderr,mc_samples";

/// Formats like C's `%.9g`.
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0" } else { "0" }.into();
    }
    const P: i32 = 9;
    let sci = format!("{:.*e}", (P - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent in scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..P).contains(&exp) {
        let mantissa = trim_fraction(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        trim_fraction(&format!("{:.*}", (P - 1 - exp) as usize, x)).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn campaign_csv(rows: &[TrialRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CAMPAIGN_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            fmt_float(r.snr_db),
            r.m,
            r.model,
            r.method,
            r.trial,
            fmt_float(r.sum_rate),
            r.served_users,
            fmt_float(r.elapsed_ms),
            r.iterations
        );
    }
    out
}

pub fn parse_campaign_csv(text: &str) -> Result<Vec<TrialRow>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim_end() == CAMPAIGN_HEADER => {}
        _ => {
            return Err(Error::CsvParse {
                line: 1,
                msg: "missing campaign header".into(),
            })
        }
    }
    lines
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, line)| {
            let bad = |msg: String| Error::CsvParse { line: i + 1, msg };
            let f: Vec<&str> = line.trim_end().split(',').collect();
            if f.len() != 9 {
                return Err(bad(format!("expected 9 fields, got {}", f.len())));
            }
            let num = |j: usize| f[j].parse::<f64>().map_err(|e| bad(format!("field {j}: {e}")));
            let int = |j: usize| f[j].parse::<u64>().map_err(|e| bad(format!("field {j}: {e}")));
            Ok(TrialRow {
                snr_db: num(0)?,
                m: int(1)? as usize,
                model: f[2].parse().map_err(|e| bad(format!("{e}")))?,
                method: f[3].parse().map_err(|e| bad(format!("{e}")))?,
                trial: int(4)?,
                sum_rate: num(5)?,
                served_users: int(6)? as usize,
                elapsed_ms: num(7)?,
                iterations: int(8)? as usize,
            })
        })
        .collect()
}

pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            fmt_float(r.snr_db),
            r.m,
            r.model,
            r.method,
            r.trials,
            fmt_float(r.mean_sum_rate),
            fmt_float(r.std_sum_rate),
            fmt_float(r.mean_served_users),
            fmt_float(r.std_served_users),
            fmt_float(r.median_elapsed_ms)
        );
    }
    out
}

pub fn bench_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from(BENCH_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.method,
            r.m,
            r.model,
            fmt_float(r.snr_db),
            fmt_float(r.median_ms),
            fmt_float(r.mean_sum_rate),
            fmt_float(r.mean_served_users),
            r.repetitions
        );
    }
    out
}

pub fn bound_csv(rows: &[BoundRow]) -> String {
    let mut out = String::from(BOUND_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            fmt_float(r.alpha),
            r.m_prime,
            fmt_float(r.r_k),
            fmt_float(r.r_j),
            fmt_float(r.bound),
            fmt_float(r.mc_estimate),
            fmt_float(r.mc_stderr),
            r.mc_samples
        );
    }
    out
}

/// Writes `text` to `path`.
pub fn write_text(path: impl AsRef<Path>, text: &str) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn emit_csv(rows: &[TrialRow], path: impl AsRef<Path>) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::Empty("campaign rows"));
    }
    write_text(path, &campaign_csv(rows))
}

pub fn read_campaign_csv(path: impl AsRef<Path>) -> Result<Vec<TrialRow>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_campaign_csv(&text)
}
