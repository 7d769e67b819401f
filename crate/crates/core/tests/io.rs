use std::fs;

use localdepth::io::{fmt_num, read_dataset, read_matrix, write_dataset, write_matrix, ReadOptions};
use localdepth::{Dataset, Error, Matrix};
use tempfile::TempDir;

fn opts(label: Option<&str>, truth: Option<&str>) -> ReadOptions {
    ReadOptions {
        label_column: label.map(str::to_string),
        truth_column: truth.map(str::to_string),
    }
}

#[test]
fn dataset_round_trip_keeps_ids_and_labels() {
    let t = TempDir::new().unwrap();
    let path = t.path().join("d.csv");
    let x = Dataset::with_ids(2, vec![0.5, -1.25, 3.0, 1e-7, 2.0, 4.0], vec![7, 3, 9])
        .unwrap()
        .with_labels(vec![2, 1, 2])
        .unwrap();
    write_dataset(fs::File::create(&path).unwrap(), &x, None).unwrap();
    let back = read_dataset(&path, &opts(Some("label"), None)).unwrap();
    assert_eq!(back.dataset, x);
    assert_eq!(back.feature_names, ["x1", "x2"]);
}

#[test]
fn label_and_truth_columns_are_not_features() {
    let t = TempDir::new().unwrap();
    let path = t.path().join("d.csv");
    fs::write(&path, "a,label,flag,b\n1,1,yes,2\n3,2,no,4\n5,1,0,6\n").unwrap();
    let plain = read_dataset(&path, &opts(None, Some("flag"))).unwrap();
    assert_eq!(plain.dataset.dim(), 2);
    assert_eq!(plain.dataset.coords(), &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
    assert_eq!(plain.truth, Some(vec![true, false, false]));
    assert_eq!(plain.dataset.ids(), &[0, 1, 2]);
}

#[test]
fn parse_errors_are_located() {
    let t = TempDir::new().unwrap();
    let cases = [
        ("x,y\n1,2\n3,abc\n", 3, "y"),
        ("x,y\n1,2\n3\n", 3, "y"),
        ("x,y\n1,NaN\n", 2, "y"),
        ("x,label\n1,0\n", 2, "label"),
        ("id,x\n1,2\n-4,3\n", 3, "id"),
    ];
    for (body, want_line, want_col) in cases {
        let path = t.path().join("bad.csv");
        fs::write(&path, body).unwrap();
        let label = if want_col == "label" { Some("label") } else { None };
        match read_dataset(&path, &opts(label, None)) {
            Err(Error::Parse { line, column, .. }) => {
                assert_eq!((line, column.as_str()), (want_line, want_col), "{body:?}");
            }
            other => panic!("{body:?}: {other:?}"),
        }
    }
    let path = t.path().join("dup.csv");
    fs::write(&path, "id,x\n1,2\n1,3\n").unwrap();
    assert!(matches!(read_dataset(&path, &opts(None, None)), Err(Error::DuplicateId(1))));
}

#[test]
fn matrix_round_trip() {
    let t = TempDir::new().unwrap();
    let path = t.path().join("m.csv");
    let m = Matrix::from_rows(vec![vec![1.0, 0.25], vec![1.0 / 3.0, 0.0]]);
    write_matrix(fs::File::create(&path).unwrap(), &[4, 8], &m).unwrap();
    let (ids, back) = read_matrix(&path).unwrap();
    assert_eq!(ids, [4, 8]);
    assert!(back.max_abs_diff(&m) < 1e-12);
}

#[test]
fn number_format_is_stable() {
    assert_eq!(fmt_num(0.1 + 0.2), "0.3");
    assert_eq!(fmt_num(-2.5), "-2.5");
    assert_eq!(fmt_num(1.0), "1");
    assert_eq!(fmt_num(1e-9), "1e-9");
    assert_eq!(fmt_num(123456789012345.0), "1.23456789012e14");
    assert_eq!(fmt_num(1.0 / 3.0), "0.333333333333");
}
