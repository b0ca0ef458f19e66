//! JSON, CSV and table rendering.

use std::fmt::Write as _;

use serde::Serialize;

use lpcb::exponent::BoundResult;

use crate::commands::{BoundReport, SweepRow};
use crate::CliError;

/// Round-trip exact: 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

/// `alpha,upper,lower,feasible`; infeasible rows leave the bounds empty.
pub fn sweep_csv(rows: &[SweepRow]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(["alpha", "upper", "lower", "feasible"]).map_err(io)?;
    for r in rows {
        let (u, l) = if r.feasible { (num(r.upper), num(r.lower)) } else { (String::new(), String::new()) };
        w.write_record([num(r.alpha), u, l, u8::from(r.feasible).to_string()]).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

pub fn sweep_table(rows: &[SweepRow]) -> String {
    let mut s = format!("{:>24}  {:>24}  {:>24}  {}\n", "alpha", "upper", "lower", "feasible");
    for r in rows {
        let _ = writeln!(s, "{:>24}  {:>24}  {:>24}  {}", num(r.alpha), num(r.upper), num(r.lower), u8::from(r.feasible));
    }
    s
}

fn bound_row(s: &mut String, name: &str, b: &BoundResult) {
    let _ = writeln!(
        s,
        "{name:<8}  {:>24}  {:>24}  {:>8}  {:>7}  {:>8}",
        num(b.value),
        num(b.alpha_star),
        b.feasible,
        b.clamped,
        b.at_boundary
    );
    for (k, v) in &b.aux_params {
        let _ = writeln!(s, "  {k:<6}  {:>24}", num(*v));
    }
}

pub fn bound_table(r: &BoundReport) -> String {
    let mut s = format!("model: {}\n", r.model);
    let _ = writeln!(s, "{:<8}  {:>24}  {:>24}  {:>8}  {:>7}  {:>8}", "bound", "value", "alpha*", "feasible", "clamped", "boundary");
    if let Some(b) = &r.upper {
        bound_row(&mut s, "upper", b);
    }
    if let Some(b) = &r.lower {
        bound_row(&mut s, "lower", b);
    }
    for (k, v) in &r.extras {
        let _ = writeln!(s, "{k:<20}  {:>24}", num(*v));
    }
    s
}
