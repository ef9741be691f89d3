//! Fixed-schema CSV for sweep rows.
//!
//! Numbers are written in shortest round-trip form (`{:?}`), so parsing a cell back
//! yields the identical `f64`. Absent values are empty cells, an open right
//! side is `inf`, and flags are joined with `;`.

use std::io::Write;

use crate::error::{Error, Result};
use crate::scenarios::SweepRow;

pub const COLUMNS: [&str; 20] = [
    "a",
    "b",
    "t",
    "sigma_plus",
    "sigma_minus",
    "mass",
    "dk2sq_narrow",
    "dk2sq_small_a",
    "dk2sq_wide",
    "dk2sq_quadrature",
    "dk2sq_quadrature_err",
    "dk2sq_mc",
    "dk2sq_mc_err",
    "dy2sq_narrow",
    "dy2sq_small_a",
    "dy2sq_quadrature",
    "dy2sq_quadrature_err",
    "dy2sq_mc",
    "dy2sq_mc_err",
    "flags",
];

fn cell(v: Option<f64>) -> String {
    v.map(|x| format!("{x:?}")).unwrap_or_default()
}

fn optional_columns(r: &SweepRow) -> [Option<f64>; 13] {
    [
        r.dk2sq_narrow,
        r.dk2sq_small_a,
        r.dk2sq_wide,
        r.dk2sq_quadrature,
        r.dk2sq_quadrature_err,
        r.dk2sq_mc,
        r.dk2sq_mc_err,
        r.dy2sq_narrow,
        r.dy2sq_small_a,
        r.dy2sq_quadrature,
        r.dy2sq_quadrature_err,
        r.dy2sq_mc,
        r.dy2sq_mc_err,
    ]
}

/// Writes the header and one line per row.
pub fn emit_csv<W: Write + ?Sized>(rows: &[SweepRow], out: &mut W) -> std::io::Result<()> {
    writeln!(out, "{}", COLUMNS.join(","))?;
    for r in rows {
        let mut fields = vec![
            format!("{:?}", r.a),
            r.b.map_or_else(|| "inf".to_string(), |b| format!("{b:?}")),
            format!("{:?}", r.t),
            format!("{:?}", r.sigma_plus),
            format!("{:?}", r.sigma_minus),
            format!("{:?}", r.mass),
        ];
        fields.extend(optional_columns(r).into_iter().map(cell));
        fields.push(r.flags.join(";"));
        writeln!(out, "{}", fields.join(","))?;
    }
    Ok(())
}

/// Renders rows to a string; convenient for tests and in-memory use.
pub fn to_csv_string(rows: &[SweepRow]) -> String {
    let mut buf = Vec::new();
    emit_csv(rows, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("CSV output is ASCII")
}

fn parse_number(s: &str, line: usize, column: &str) -> Result<f64> {
    s.parse()
        .map_err(|_| Error::Config(format!("line {line}: column {column}: bad number {s:?}")))
}

/// Parses CSV produced by [`emit_csv`]. Notes and failure details are not
/// part of the schema and come back empty.
pub fn parse_csv(text: &str) -> Result<Vec<SweepRow>> {
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    if header != COLUMNS.join(",") {
        return Err(Error::Config(format!("unexpected CSV header {header:?}")));
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let n = i + 2;
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != COLUMNS.len() {
            return Err(Error::Config(format!(
                "line {n}: expected {} fields, found {}",
                COLUMNS.len(),
                f.len()
            )));
        }
        let num = |j: usize| parse_number(f[j], n, COLUMNS[j]);
        let opt = |j: usize| -> Result<Option<f64>> {
            if f[j].is_empty() {
                Ok(None)
            } else {
                num(j).map(Some)
            }
        };
        rows.push(SweepRow {
            a: num(0)?,
            b: if f[1] == "inf" { None } else { Some(num(1)?) },
            t: num(2)?,
            sigma_plus: num(3)?,
            sigma_minus: num(4)?,
            mass: num(5)?,
            dk2sq_narrow: opt(6)?,
            dk2sq_small_a: opt(7)?,
            dk2sq_wide: opt(8)?,
            dk2sq_quadrature: opt(9)?,
            dk2sq_quadrature_err: opt(10)?,
            dk2sq_mc: opt(11)?,
            dk2sq_mc_err: opt(12)?,
            dy2sq_narrow: opt(13)?,
            dy2sq_small_a: opt(14)?,
            dy2sq_quadrature: opt(15)?,
            dy2sq_quadrature_err: opt(16)?,
            dy2sq_mc: opt(17)?,
            dy2sq_mc_err: opt(18)?,
            flags: f[19]
                .split(';')
                .filter(|s| !s.is_empty())
                .map(str::to_string)
                .collect(),
            ..Default::default()
        });
    }
    Ok(rows)
}
