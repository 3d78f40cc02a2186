use std::fs::File;
use std::io::Read;
use std::path::Path;

use cmi_core::{build_sample, Sample};

use crate::{CliError, Result};

/// Reads a CSV with one `x` column and one or more `y*` columns, returning
/// one sample per outcome column. All samples share the covariate.
pub fn ingest_csv(path: &Path) -> Result<Vec<Sample>> {
    let file = File::open(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    ingest_csv_reader(file)
}

pub fn ingest_csv_reader<R: Read>(reader: R) -> Result<Vec<Sample>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let malformed = |line: u64, message: String| CliError::MalformedCsv { line, message };

    let mut records = rdr.records();
    let header = match records.next() {
        Some(Ok(h)) => h,
        Some(Err(e)) => return Err(malformed(1, e.to_string())),
        None => return Err(malformed(1, "missing header".into())),
    };
    let mut x_col = None;
    let mut y_cols = Vec::new();
    for (i, name) in header.iter().enumerate() {
        if name == "x" {
            if x_col.replace(i).is_some() {
                return Err(malformed(1, "duplicate x column".into()));
            }
        } else if name.starts_with('y') {
            y_cols.push(i);
        } else {
            return Err(malformed(1, format!("unexpected column {name:?}")));
        }
    }
    let x_col = x_col.ok_or_else(|| malformed(1, "header has no x column".into()))?;
    if y_cols.is_empty() {
        return Err(malformed(1, "header has no y column".into()));
    }

    let width = header.len();
    let mut x = Vec::new();
    let mut ys = vec![Vec::new(); y_cols.len()];
    for rec in records {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            malformed(line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        if rec.len() != width {
            return Err(malformed(
                line,
                format!("expected {width} fields, found {}", rec.len()),
            ));
        }
        let cell = |i: usize| -> Result<f64> {
            let v: f64 = rec[i]
                .parse()
                .map_err(|_| malformed(line, format!("non-numeric cell {:?}", &rec[i])))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(malformed(line, format!("non-finite cell {:?}", &rec[i])))
            }
        };
        x.push(cell(x_col)?);
        for (k, &c) in y_cols.iter().enumerate() {
            ys[k].push(cell(c)?);
        }
    }

    let base = build_sample(
        &x.iter()
            .copied()
            .zip(ys[0].iter().copied())
            .collect::<Vec<_>>(),
    )?;
    if ys.len() == 1 {
        return Ok(vec![base]);
    }
    // Rows are re-sorted by x; apply the same permutation to every column.
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut out = Vec::with_capacity(ys.len());
    out.push(base.clone());
    for y in &ys[1..] {
        out.push(base.with_outcome(order.iter().map(|&i| y[i]).collect())?);
    }
    Ok(out)
}
