//! The oracle suite as a table.

use lambshift_core::oracle::{run_suite, OracleReport, SuiteOptions, Tolerance};

use crate::CliError;

pub fn suite(loosen: bool) -> Result<Vec<OracleReport>, CliError> {
    let opts = SuiteOptions {
        loosen,
        ..SuiteOptions::default()
    };
    run_suite(&opts).map_err(|e| CliError::Output(format!("oracle suite: {e}")))
}

fn tolerance(t: Tolerance) -> String {
    match t {
        Tolerance::Absolute(v) => format!("abs {v:.0e}"),
        Tolerance::Relative(v) => format!("rel {v}"),
        Tolerance::Report => "report".into(),
    }
}

/// Fixed-width table, one line per row.
pub fn table(rows: &[OracleReport]) -> String {
    let sw = rows
        .iter()
        .map(|r| r.scenario.len())
        .max()
        .unwrap_or(8)
        .max(8);
    let qw = rows
        .iter()
        .map(|r| r.quantity.len())
        .max()
        .unwrap_or(8)
        .max(8);
    let mut out = format!(
        "{:<4}  {:<sw$}  {:<qw$}  {:>14}  {:>14}  {:>10}  {:>10}\n",
        "pass", "scenario", "quantity", "main", "oracle", "abs_dev", "tolerance"
    );
    for r in rows {
        out.push_str(&format!(
            "{:<4}  {:<sw$}  {:<qw$}  {:>14.9}  {:>14.9}  {:>10.2e}  {:>10}",
            if r.pass { "ok" } else { "FAIL" },
            r.scenario,
            r.quantity,
            r.main,
            r.oracle,
            r.abs_dev,
            tolerance(r.tolerance),
        ));
        if let Some(note) = &r.note {
            out.push_str(&format!("  {note}"));
        }
        out.push('\n');
    }
    let failed = rows.iter().filter(|r| !r.pass).count();
    out.push_str(&format!("{} rows, {failed} failed\n", rows.len()));
    out
}
