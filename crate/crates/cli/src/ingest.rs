//! Dataset ingestion: typed columns per design, row-wise validation of the
//! design's sampling inequality, and a reject log with line numbers.

use std::path::Path;

use partreg_core::{
    BinaryRecord, CsRecord, CsSample, DtRecord, DtSample, LtRecord, LtSample, LtrcRecord,
    LtrcSample, RtRecord, RtSample,
};
use partreg_sim::{Design, DesignSample};

use crate::fail::{CliError, CliResult};

/// Expected header per design, in canonical order.
pub fn schema(design: Design) -> &'static [&'static str] {
    match design {
        Design::Plain => &["x", "y"],
        Design::CaseControl => &["x", "y", "s"],
        Design::XTruncated => &["x", "y"],
        Design::LeftTruncated => &["x", "t", "y"],
        Design::Ltrc => &["x", "t", "z", "delta"],
        Design::RightTruncated => &["x", "y", "c"],
        Design::DoubleTruncated => &["x", "t", "y", "c"],
        Design::CurrentStatus => &["x", "c", "delta"],
    }
}

#[derive(Debug)]
pub struct Dataset {
    pub design: Design,
    pub sample: DesignSample,
    pub rows_read: usize,
    /// (1-based data line number, reason) for every rejected row.
    pub rejects: Vec<(usize, String)>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.sample.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sample.is_empty()
    }
}

fn parse_real(fields: &[f64], idx: usize) -> f64 {
    fields[idx]
}

fn parse_binary(fields: &[f64], idx: usize) -> Result<bool, String> {
    let v = fields[idx];
    if v == 0.0 {
        Ok(false)
    } else if v == 1.0 {
        Ok(true)
    } else {
        Err(format!("expected binary 0/1, got {v}"))
    }
}

/// Read a delimited file with a header row into the design's record type.
/// Rows violating the design inequality, rows with non-finite values and
/// malformed rows are rejected individually and logged; a wrong column set
/// is fatal.
pub fn ingest(path: &Path, design: Design) -> CliResult<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?;
    let want = schema(design);
    let headers: Vec<String> =
        reader.headers()?.iter().map(|h| h.trim().to_ascii_lowercase()).collect();
    let mut positions = Vec::with_capacity(want.len());
    for &name in want {
        match headers.iter().position(|h| h == name) {
            Some(i) => positions.push(i),
            None => {
                return Err(CliError::Data(format!(
                    "missing column '{name}' for design {}; expected header: {}",
                    design.name(),
                    want.join(",")
                )))
            }
        }
    }
    if headers.len() != want.len() {
        return Err(CliError::Data(format!(
            "unexpected columns {:?} for design {}; expected header: {}",
            headers,
            design.name(),
            want.join(",")
        )));
    }

    let mut rejects: Vec<(usize, String)> = Vec::new();
    let mut rows_read = 0usize;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut row_lines: Vec<usize> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 1;
        rows_read += 1;
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                rejects.push((line, format!("malformed row: {e}")));
                continue;
            }
        };
        let mut fields = Vec::with_capacity(want.len());
        let mut bad = None;
        for (&pos, &name) in positions.iter().zip(want) {
            match record.get(pos).map(str::parse::<f64>) {
                Some(Ok(v)) if v.is_finite() => fields.push(v),
                Some(Ok(v)) => {
                    bad = Some(format!("non-finite {name} = {v}"));
                    break;
                }
                _ => {
                    bad = Some(format!("cannot parse column '{name}'"));
                    break;
                }
            }
        }
        match bad {
            Some(reason) => rejects.push((line, reason)),
            None => {
                rows.push(fields);
                row_lines.push(line);
            }
        }
    }

    macro_rules! collectform {
        ($build:expr, $check:expr, $lossless:expr) => {{
            let mut kept = Vec::new();
            for (fields, &line) in rows.iter().zip(&row_lines) {
                match $build(fields) {
                    Ok(rec) => {
                        if let Some(reason) = $check(&rec) {
                            rejects.push((line, reason));
                        } else {
                            kept.push(rec);
                        }
                    }
                    Err(reason) => rejects.push((line, reason)),
                }
            }
            if kept.is_empty() {
                return Err(CliError::Data(format!(
                    "no usable rows in {} ({} rejected)",
                    path.display(),
                    rejects.len()
                )));
            }
            $lossless(kept)?
        }};
    }

    let sample = match design {
        Design::Plain | Design::XTruncated => collect_binary(&rows, &row_lines, &mut rejects, false),
        Design::CaseControl => collect_binary(&rows, &row_lines, &mut rejects, true),
        Design::LeftTruncated => collectform!(
            |f: &Vec<f64>| -> Result<LtRecord, String> {
                Ok(LtRecord::new(parse_real(f, 0), parse_real(f, 1), parse_real(f, 2)))
            },
            |r: &LtRecord| {
                (r.t > r.y).then(|| format!("violates t <= y (t = {}, y = {})", r.t, r.y))
            },
            |kept| LtSample::new(kept).map(DesignSample::LeftTruncated)
        ),
        Design::Ltrc => collectform!(
            |f: &Vec<f64>| -> Result<LtrcRecord, String> {
                let delta = parse_binary(f, 3)?;
                Ok(LtrcRecord::new(parse_real(f, 0), parse_real(f, 1), parse_real(f, 2), delta))
            },
            |r: &LtrcRecord| {
                (r.t > r.z).then(|| format!("violates t <= z (t = {}, z = {})", r.t, r.z))
            },
            |kept| LtrcSample::new(kept).map(DesignSample::Ltrc)
        ),
        Design::RightTruncated => collectform!(
            |f: &Vec<f64>| -> Result<RtRecord, String> {
                Ok(RtRecord::new(parse_real(f, 0), parse_real(f, 1), parse_real(f, 2)))
            },
            |r: &RtRecord| {
                (r.y > r.c).then(|| format!("violates y <= c (y = {}, c = {})", r.y, r.c))
            },
            |kept| RtSample::new(kept).map(DesignSample::RightTruncated)
        ),
        Design::DoubleTruncated => collectform!(
            |f: &Vec<f64>| -> Result<DtRecord, String> {
                Ok(DtRecord::new(
                    parse_real(f, 0),
                    parse_real(f, 1),
                    parse_real(f, 2),
                    parse_real(f, 3),
                ))
            },
            |r: &DtRecord| {
                (!(r.t <= r.y && r.y <= r.c))
                    .then(|| format!("violates t <= y <= c (t = {}, y = {}, c = {})", r.t, r.y, r.c))
            },
            |kept| DtSample::new(kept).map(DesignSample::DoubleTruncated)
        ),
        Design::CurrentStatus => collectform!(
            |f: &Vec<f64>| -> Result<CsRecord, String> {
                let delta = parse_binary(f, 2)?;
                Ok(CsRecord::new(parse_real(f, 0), parse_real(f, 1), delta))
            },
            |_r: &CsRecord| None::<String>,
            |kept| CsSample::new(kept).map(DesignSample::CurrentStatus)
        ),
    };

    let sample = match sample {
        DesignSample::Binary(rows) if rows.is_empty() => {
            return Err(CliError::Data(format!(
                "no usable rows in {} ({} rejected)",
                path.display(),
                rejects.len()
            )))
        }
        s => s,
    };
    Ok(Dataset { design, sample, rows_read, rejects })
}

fn collect_binary(
    rows: &[Vec<f64>],
    row_lines: &[usize],
    rejects: &mut Vec<(usize, String)>,
    with_sampling: bool,
) -> DesignSample {
    let mut kept = Vec::new();
    for (fields, &line) in rows.iter().zip(row_lines) {
        let y = match parse_binary(fields, 1) {
            Ok(y) => y,
            Err(reason) => {
                rejects.push((line, format!("column 'y': {reason}")));
                continue;
            }
        };
        let s = if with_sampling {
            match parse_binary(fields, 2) {
                Ok(s) => s,
                Err(reason) => {
                    rejects.push((line, format!("column 's': {reason}")));
                    continue;
                }
            }
        } else {
            true
        };
        kept.push(BinaryRecord::with_sampling(fields[0], y, s));
    }
    DesignSample::Binary(kept)
}
