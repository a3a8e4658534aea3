use inexact_newton::problems::{
    load_dataset, parse_csv, parse_dataset, parse_svmlight, to_csv_string, write_csv, DataFormat,
};
use inexact_newton::{Error, Loss};

fn fixture(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

#[test]
fn csv_fixture_skips_header_and_blank_lines() {
    let p = load_dataset::<f64>(fixture("tiny.csv"), DataFormat::Csv, Loss::NlsLogistic).unwrap();
    assert_eq!((p.n(), p.dim()), (3, 3));
    assert_eq!(p.rows().row(2), &[1.5, 0.0, 1.0]);
    assert_eq!(p.targets(), &[1.0, 0.0, 1.0]);
}

#[test]
fn svmlight_fixture_fills_missing_features() {
    let p = load_dataset::<f64>(fixture("tiny.svm"), DataFormat::SvmLight, Loss::BiWeight).unwrap();
    assert_eq!((p.n(), p.dim()), (3, 4));
    assert_eq!(p.rows().row(1), &[0.0, 2.0, -0.5, 0.0]);
    assert_eq!(p.rows().row(2), &[1.5, 0.0, 0.0, 1.0]);
    // K_i = 2‖a_i‖²
    assert!((p.row_bounds()[0] - 2.0 * (0.25 + 1.0 + 0.0625)).abs() < 1e-15);
}

#[test]
fn parse_errors_name_the_line() {
    let err = parse_csv::<f64>("1,2,3\n4,5\n").unwrap_err();
    assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
    let err = parse_csv::<f64>("a,b\n1,2\n3,x\n").unwrap_err();
    assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
    let err = parse_csv::<f64>("1,inf\n").unwrap_err();
    assert!(matches!(err, Error::Parse { line: 1, .. }), "{err}");
    let err = parse_svmlight::<f64>("1 1:2\n0 0:1\n").unwrap_err();
    assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
    let err = parse_svmlight::<f64>("1 3-2\n").unwrap_err();
    assert!(matches!(err, Error::Parse { line: 1, .. }), "{err}");
    assert!(parse_csv::<f64>("\n\n").is_err());
    assert!("parquet".parse::<DataFormat>().is_err());
    assert_eq!(
        "LIBSVM".parse::<DataFormat>().unwrap(),
        DataFormat::SvmLight
    );
}

#[test]
fn csv_round_trip_is_exact() {
    let text = std::fs::read_to_string(fixture("tiny.svm")).unwrap();
    let p = parse_dataset::<f64>(&text, DataFormat::SvmLight, Loss::BiWeight).unwrap();
    let back = parse_dataset::<f64>(&to_csv_string(&p), DataFormat::Csv, Loss::BiWeight).unwrap();
    assert_eq!(p.rows().as_slice(), back.rows().as_slice());
    assert_eq!(p.targets(), back.targets());

    let dir = std::env::temp_dir().join(format!("inexact-newton-io-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("round.csv");
    write_csv(&p, &path).unwrap();
    let again = load_dataset::<f64>(&path, DataFormat::Csv, Loss::BiWeight).unwrap();
    assert_eq!(p.rows().as_slice(), again.rows().as_slice());
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn missing_file_is_an_io_error() {
    let err =
        load_dataset::<f64>(fixture("absent.csv"), DataFormat::Csv, Loss::BiWeight).unwrap_err();
    assert!(matches!(err, Error::Io(_)));
}
