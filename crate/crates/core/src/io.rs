//! CSV input and output.
//!
//! Every file has a header row. Datasets carry an optional `id` column
//! (otherwise ids are row positions), optional label and truth columns, and
//! numeric feature columns. Numbers are written with 12 significant digits so
//! that output is byte-stable.

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use crate::classify::Prediction;
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::locality::LocalityGrid;
use crate::matrix::Matrix;
use crate::outlier::OutlierReport;
use crate::profile::DepthProfile;

/// Column that is never read as a feature.
pub const LABEL_COLUMN: &str = "label";
pub const ID_COLUMN: &str = "id";

/// Formats `v` with 12 significant digits, trimming trailing zeros; plain
/// notation for exponents in `-5..12`, scientific otherwise.
pub fn fmt_num(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{v:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let fixed = format!("{:.*}", (11 - exp) as usize, v);
        trim_zeros(&fixed).to_string()
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Which non-feature columns to interpret.
#[derive(Debug, Clone, Default)]
pub struct ReadOptions {
    /// Column holding group labels `1..=G`.
    pub label_column: Option<String>,
    /// Column holding outlier ground truth.
    pub truth_column: Option<String>,
}

#[derive(Debug, Clone)]
pub struct LoadedData {
    pub dataset: Dataset,
    pub feature_names: Vec<String>,
    pub truth: Option<Vec<bool>>,
}

fn parse_error(path: &Path, line: u64, column: &str, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        line,
        column: column.to_string(),
        message: message.into(),
    }
}

/// Outlier truth cells: `1`, `true`, `yes`, `outlier` or any nonzero number.
fn parse_truth(cell: &str) -> Option<bool> {
    let c = cell.trim().to_ascii_lowercase();
    match c.as_str() {
        "true" | "yes" | "outlier" => Some(true),
        "false" | "no" | "inlier" => Some(false),
        _ => c.parse::<f64>().ok().map(|v| v != 0.0),
    }
}

pub fn read_dataset<P: AsRef<Path>>(path: P, opts: &ReadOptions) -> Result<LoadedData> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let find = |name: &str| header.iter().position(|h| h == name);
    let id_col = find(ID_COLUMN);
    let label_col = match &opts.label_column {
        Some(name) => Some(find(name).ok_or_else(|| parse_error(path, 1, name, "missing label column"))?),
        None => None,
    };
    let truth_col = match &opts.truth_column {
        Some(name) => Some(find(name).ok_or_else(|| parse_error(path, 1, name, "missing truth column"))?),
        None => None,
    };
    let default_label = find(LABEL_COLUMN);
    let features: Vec<usize> = (0..header.len())
        .filter(|&c| Some(c) != id_col && Some(c) != label_col && Some(c) != truth_col && Some(c) != default_label)
        .collect();
    if features.is_empty() {
        return Err(parse_error(path, 1, "", "no feature columns"));
    }

    let mut coords = Vec::new();
    let mut ids = Vec::new();
    let mut labels = Vec::new();
    let mut truth = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != header.len() {
            let col = header.get(record.len()).or(header.last()).cloned().unwrap_or_default();
            return Err(parse_error(
                path,
                line,
                &col,
                format!("expected {} fields, found {}", header.len(), record.len()),
            ));
        }
        for &c in &features {
            let cell = &record[c];
            let v: f64 = cell
                .parse()
                .map_err(|_| parse_error(path, line, &header[c], format!("non-numeric value '{cell}'")))?;
            if !v.is_finite() {
                return Err(parse_error(path, line, &header[c], format!("non-finite value '{cell}'")));
            }
            coords.push(v);
        }
        if let Some(c) = id_col {
            let cell = &record[c];
            ids.push(
                cell.parse::<u64>()
                    .map_err(|_| parse_error(path, line, ID_COLUMN, format!("invalid id '{cell}'")))?,
            );
        }
        if let Some(c) = label_col {
            let cell = &record[c];
            let g = cell.parse::<usize>().ok().filter(|&g| g >= 1).ok_or_else(|| {
                parse_error(path, line, &header[c], format!("label must be an integer >= 1, got '{cell}'"))
            })?;
            labels.push(g);
        }
        if let Some(c) = truth_col {
            let cell = &record[c];
            truth.push(
                parse_truth(cell)
                    .ok_or_else(|| parse_error(path, line, &header[c], format!("invalid truth value '{cell}'")))?,
            );
        }
    }
    if coords.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let dim = features.len();
    let n = coords.len() / dim;
    let ids = if id_col.is_some() { ids } else { (0..n as u64).collect() };
    let mut dataset = Dataset::with_ids(dim, coords, ids)?;
    if label_col.is_some() {
        dataset = dataset.with_labels(labels)?;
    }
    Ok(LoadedData {
        dataset,
        feature_names: features.iter().map(|&c| header[c].clone()).collect(),
        truth: truth_col.map(|_| truth),
    })
}

fn writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().from_writer(w)
}

fn finish<W: Write>(mut w: csv::Writer<W>) -> Result<()> {
    w.flush()?;
    Ok(())
}

/// Writes `id, x1..xd[, label]`; `labels` overrides the dataset's own labels.
pub fn write_dataset<W: Write>(w: W, x: &Dataset, labels: Option<&[usize]>) -> Result<()> {
    let labels = labels.or(x.labels());
    let mut out = writer(w);
    let mut header = vec![ID_COLUMN.to_string()];
    header.extend((1..=x.dim()).map(|k| format!("x{k}")));
    if labels.is_some() {
        header.push(LABEL_COLUMN.into());
    }
    out.write_record(&header)?;
    for i in 0..x.len() {
        let mut rec = vec![x.id(i).to_string()];
        rec.extend(x.point(i).iter().map(|&v| fmt_num(v)));
        if let Some(l) = labels {
            rec.push(l[i].to_string());
        }
        out.write_record(&rec)?;
    }
    finish(out)
}

/// Writes `id, ld_<beta>..., sild`, one row per profile.
pub fn write_profiles<W: Write>(w: W, grid: &LocalityGrid, profiles: &[DepthProfile], sild: &[f64]) -> Result<()> {
    let mut out = writer(w);
    let mut header = vec![ID_COLUMN.to_string()];
    header.extend(grid.levels().iter().map(|&b| format!("ld_{}", fmt_num(b))));
    header.push("sild".into());
    out.write_record(&header)?;
    for (i, (p, s)) in profiles.iter().zip(sild).enumerate() {
        let id = p.point_id.unwrap_or(i as u64);
        let mut rec = vec![id.to_string()];
        rec.extend(p.ld.iter().map(|&v| fmt_num(v)));
        rec.push(fmt_num(*s));
        out.write_record(&rec)?;
    }
    finish(out)
}

/// Writes a dense matrix: header `id,<ids...>`, then `<id>,<row...>`.
pub fn write_matrix<W: Write>(w: W, ids: &[u64], m: &Matrix) -> Result<()> {
    let mut out = writer(w);
    let mut header = vec![ID_COLUMN.to_string()];
    header.extend(ids.iter().map(u64::to_string));
    out.write_record(&header)?;
    for (i, id) in ids.iter().enumerate() {
        let mut rec = vec![id.to_string()];
        rec.extend(m.row(i).iter().map(|&v| fmt_num(v)));
        out.write_record(&rec)?;
    }
    finish(out)
}

/// Reads a matrix written by [`write_matrix`].
pub fn read_matrix<P: AsRef<Path>>(path: P) -> Result<(Vec<u64>, Matrix)> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new().flexible(true).from_path(path)?;
    let header = reader.headers()?.clone();
    let ids: Vec<u64> = header
        .iter()
        .skip(1)
        .map(|h| h.parse().map_err(|_| parse_error(path, 1, h, "invalid id in header")))
        .collect::<Result<_>>()?;
    let mut rows = Vec::with_capacity(ids.len());
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != ids.len() + 1 {
            return Err(parse_error(path, line, "", format!("expected {} fields, found {}", ids.len() + 1, record.len())));
        }
        let row = record
            .iter()
            .enumerate()
            .skip(1)
            .map(|(c, cell)| {
                cell.parse::<f64>()
                    .map_err(|_| parse_error(path, line, &header[c], format!("non-numeric value '{cell}'")))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    if rows.len() != ids.len() {
        return Err(parse_error(path, 0, "", format!("expected {} rows, found {}", ids.len(), rows.len())));
    }
    Ok((ids, Matrix::from_rows(rows)))
}

/// Writes `id, predicted_group, score_1..score_G`.
pub fn write_predictions<W: Write>(w: W, ids: &[u64], predictions: &[Prediction]) -> Result<()> {
    let groups = predictions.first().map_or(0, |p| p.scores.len());
    let mut out = writer(w);
    let mut header = vec![ID_COLUMN.to_string(), "predicted_group".into()];
    header.extend((1..=groups).map(|g| format!("score_{g}")));
    out.write_record(&header)?;
    for (id, p) in ids.iter().zip(predictions) {
        let mut rec = vec![id.to_string(), p.group.to_string()];
        rec.extend(p.scores.iter().map(|&v| fmt_num(v)));
        out.write_record(&rec)?;
    }
    finish(out)
}

/// Writes `id, score, flagged[, truth]`.
pub fn write_outlier_report<W: Write>(w: W, report: &OutlierReport, truth: Option<&[bool]>) -> Result<()> {
    let flagged = report.is_flagged();
    let mut out = writer(w);
    let mut header = vec![ID_COLUMN, "score", "flagged"];
    if truth.is_some() {
        header.push("truth");
    }
    out.write_record(&header)?;
    for i in 0..report.ids.len() {
        let mut rec = vec![
            report.ids[i].to_string(),
            fmt_num(report.scores[i]),
            u8::from(flagged[i]).to_string(),
        ];
        if let Some(t) = truth {
            rec.push(u8::from(t[i]).to_string());
        }
        out.write_record(&rec)?;
    }
    finish(out)
}

/// Opens `path` for writing, or stdout for `-`.
pub fn create_output(path: &Path) -> Result<Box<dyn Write>> {
    if path.as_os_str() == "-" {
        Ok(Box::new(io::stdout().lock()))
    } else {
        Ok(Box::new(io::BufWriter::new(File::create(path)?)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn temp_csv(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        std::io::Write::write_all(&mut f, contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn number_format() {
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(1.0), "1");
        assert_eq!(fmt_num(0.125), "0.125");
        assert_eq!(fmt_num(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_num(-2.5e-7), "-2.5e-7");
        assert_eq!(fmt_num(123456789012345.0), "1.23456789012e14");
        assert_eq!(fmt_num(0.1 + 0.2), "0.3");
        assert_eq!(fmt_num(99.99999999999999), "100");
    }

    #[test]
    fn reads_ids_labels_truth() {
        let f = temp_csv("id,a,b,label,out\n7,1.5,2,1,0\n3,-1,0.25,2,yes\n");
        let opts = ReadOptions {
            label_column: Some("label".into()),
            truth_column: Some("out".into()),
        };
        let d = read_dataset(f.path(), &opts).unwrap();
        assert_eq!(d.dataset.ids(), &[7, 3]);
        assert_eq!(d.dataset.point(1), &[-1.0, 0.25]);
        assert_eq!(d.dataset.labels(), Some(&[1, 2][..]));
        assert_eq!(d.truth, Some(vec![false, true]));
        assert_eq!(d.feature_names, vec!["a", "b"]);
    }

    #[test]
    fn generated_ids_and_ignored_label() {
        let f = temp_csv("x,y,label\n0,1,1\n2,3,0\n");
        let d = read_dataset(f.path(), &ReadOptions::default()).unwrap();
        assert_eq!(d.dataset.ids(), &[0, 1]);
        assert_eq!(d.dataset.dim(), 2);
        assert!(d.dataset.labels().is_none());
    }

    #[test]
    fn located_errors() {
        let f = temp_csv("x,y\n0,1\n2,abc\n");
        let e = read_dataset(f.path(), &ReadOptions::default()).unwrap_err();
        match e {
            Error::Parse { line, column, .. } => {
                assert_eq!(line, 3);
                assert_eq!(column, "y");
            }
            other => panic!("{other:?}"),
        }
        let f = temp_csv("x,y\n0,1\n2\n");
        let e = read_dataset(f.path(), &ReadOptions::default()).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }), "{e:?}");
        assert!(e.to_string().contains("expected 2 fields"));
    }

    #[test]
    fn matrix_round_trip() {
        let m = Matrix::from_rows(vec![vec![1.0, 0.25], vec![1.0 / 3.0, 0.0]]);
        let mut buf = Vec::new();
        write_matrix(&mut buf, &[4, 9], &m).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "id,4,9\n4,1,0.25\n9,0.333333333333,0\n");
        let f = temp_csv(std::str::from_utf8(&buf).unwrap());
        let (ids, back) = read_matrix(f.path()).unwrap();
        assert_eq!(ids, vec![4, 9]);
        assert!(back.max_abs_diff(&m) < 1e-12);
    }

    #[test]
    fn dataset_round_trip() {
        let x = Dataset::with_ids(2, vec![0.5, -1.0, 2.0, 3.0], vec![10, 11])
            .unwrap()
            .with_labels(vec![2, 1])
            .unwrap();
        let mut buf = Vec::new();
        write_dataset(&mut buf, &x, None).unwrap();
        let f = temp_csv(std::str::from_utf8(&buf).unwrap());
        let opts = ReadOptions {
            label_column: Some("label".into()),
            ..Default::default()
        };
        let back = read_dataset(f.path(), &opts).unwrap().dataset;
        assert_eq!(back, x);
    }
}
