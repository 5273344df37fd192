//! Output writers: CSV count tables, versioned JSON reports, and
//! two-column plot-data files.
//!
//! Every file embeds the semantic config digest and the tool version, so
//! an output can always be traced back to the experiment that produced
//! it.  All writers are deterministic: exact integers print as full
//! decimal strings, floats as their shortest round-trip representation,
//! and JSON objects serialize structs in declaration order — identical
//! inputs produce byte-identical files regardless of thread count.

use std::io::Write;

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::counting::CountTable;
use crate::error::Result;
use crate::TOOL_VERSION;

/// JSON report schema version.
pub const SCHEMA_VERSION: u32 = 1;

fn hex_digest(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let out = hasher.finalize();
    let mut hex = String::with_capacity(64);
    for byte in out {
        use std::fmt::Write;
        write!(hex, "{byte:02x}").expect("writing to a string cannot fail");
    }
    hex
}

/// SHA-256 over the rendered rows of a table — the digest embedded in
/// verification reports so a verdict names the exact data it was computed
/// from.
pub fn table_digest(table: &CountTable) -> Result<String> {
    let mut body = String::new();
    for n in 1..=table.n_max() {
        let (e, d, c) = table.row_strings(n)?;
        body.push_str(&format!("{n},{e},{d},{c}\n"));
    }
    Ok(hex_digest(body.as_bytes()))
}

/// Writes a count table as CSV with `#`-comment provenance headers and the
/// schema `n,E,D,C,mode`.
pub fn write_count_csv<W: Write>(w: &mut W, table: &CountTable, config_digest: &str) -> Result<()> {
    writeln!(w, "# orbitcensus v{TOOL_VERSION}")?;
    writeln!(w, "# config digest: {config_digest}")?;
    writeln!(w, "# system: {}", table.system())?;
    writeln!(w, "# potential: {}", table.potential())?;
    writeln!(w, "n,E,D,C,mode")?;
    let mode = table.mode_name();
    for n in 1..=table.n_max() {
        let (e, d, c) = table.row_strings(n)?;
        writeln!(w, "{n},{e},{d},{c},{mode}")?;
    }
    Ok(())
}

/// The standard report envelope: schema version, tool version, config
/// digest, report kind, and the payload under `"body"`.
pub fn report_envelope(kind: &str, config_digest: &str, body: Value) -> Value {
    json!({
        "schema": SCHEMA_VERSION,
        "tool_version": TOOL_VERSION,
        "config_digest": config_digest,
        "kind": kind,
        "body": body,
    })
}

/// JSON form of a count table (counts as decimal strings — lossless for
/// both modes).
pub fn count_table_json(table: &CountTable, config_digest: &str) -> Result<Value> {
    let mut rows = Vec::with_capacity(table.n_max());
    for n in 1..=table.n_max() {
        let (e, d, c) = table.row_strings(n)?;
        rows.push(json!({ "n": n, "E": e, "D": d, "C": c }));
    }
    let body = json!({
        "mode": table.mode_name(),
        "system": table.system(),
        "potential": table.potential(),
        "lambda_hint": table.lambda_hint(),
        "table_digest": table_digest(table)?,
        "rows": rows,
    });
    Ok(report_envelope("count_table", config_digest, body))
}

/// Serializes any report structure into the envelope.
pub fn report_json<T: Serialize>(kind: &str, config_digest: &str, payload: &T) -> Result<Value> {
    Ok(report_envelope(
        kind,
        config_digest,
        serde_json::to_value(payload)?,
    ))
}

/// Writes a JSON value pretty-printed with a trailing newline.
pub fn write_json<W: Write>(w: &mut W, value: &Value) -> Result<()> {
    serde_json::to_writer_pretty(&mut *w, value)?;
    writeln!(w)?;
    Ok(())
}

/// Writes a two-column plot-data file with `#`-comment headers.
pub fn write_plot_data<W: Write>(
    w: &mut W,
    config_digest: &str,
    claim: &str,
    columns: (&str, &str),
    rows: &[(f64, f64)],
) -> Result<()> {
    writeln!(w, "# orbitcensus v{TOOL_VERSION}")?;
    writeln!(w, "# config digest: {config_digest}")?;
    writeln!(w, "# claim: {claim}")?;
    writeln!(w, "# columns: {} {}", columns.0, columns.1)?;
    for (x, y) in rows {
        writeln!(w, "{x} {y}")?;
    }
    Ok(())
}
