//! `curve_id,param,x,y` tables.
//!
//! Floats are written with the shortest representation that parses back to
//! the same value, so parsing and re-emitting a table reproduces it byte for
//! byte.

use loewner_range::BoundaryCurve64;

pub const HEADER: [&str; 4] = ["curve_id", "param", "x", "y"];

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub curve_id: String,
    pub param: f64,
    pub x: f64,
    pub y: f64,
}

pub fn rows_from_curves<'a>(curves: impl IntoIterator<Item = &'a BoundaryCurve64>) -> Vec<Row> {
    curves
        .into_iter()
        .flat_map(|cv| {
            cv.points.iter().map(move |p| Row {
                curve_id: cv.id.label().to_string(),
                param: p.param,
                x: p.x,
                y: p.y,
            })
        })
        .collect()
}

pub fn render(rows: &[Row]) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(HEADER).expect("in-memory write");
    for r in rows {
        w.write_record([
            r.curve_id.clone(),
            r.param.to_string(),
            r.x.to_string(),
            r.y.to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
}

#[derive(Debug, thiserror::Error)]
pub enum ParseError {
    #[error("malformed table: {0}")]
    Csv(#[from] csv::Error),
    #[error("unexpected header {0:?}")]
    Header(Vec<String>),
    #[error("line {line}: {reason}")]
    Field { line: usize, reason: String },
}

pub fn parse(text: &str) -> Result<Vec<Row>, ParseError> {
    let mut rd = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    let header: Vec<String> = rd.headers()?.iter().map(str::to_string).collect();
    if header != HEADER {
        return Err(ParseError::Header(header));
    }
    let mut rows = Vec::new();
    for (i, rec) in rd.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        let num = |k: usize| -> Result<f64, ParseError> {
            rec[k].parse().map_err(|e| ParseError::Field {
                line,
                reason: format!("{}: {e}", HEADER[k]),
            })
        };
        if rec.len() != 4 {
            return Err(ParseError::Field {
                line,
                reason: format!("{} fields", rec.len()),
            });
        }
        rows.push(Row {
            curve_id: rec[0].to_string(),
            param: num(1)?,
            x: num(2)?,
            y: num(3)?,
        });
    }
    Ok(rows)
}
