use std::fs;

use proptest::prelude::*;
use wavelet_te::signal::{load_recording, save_recording, sidecar_path, Format};
use wavelet_te::{Error, TimeSeries};

fn channels(a: Vec<f64>, b: Vec<f64>) -> Vec<TimeSeries> {
    vec![TimeSeries::new(a, 1024.0, "eeg").unwrap(), TimeSeries::new(b, 1024.0, "emg").unwrap()]
}

fn ingestion_message(r: wavelet_te::Result<Vec<TimeSeries>>) -> String {
    match r {
        Err(Error::Ingestion { message, .. }) => message,
        other => panic!("expected an ingestion error, got {other:?}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn csv_and_raw_round_trip_bit_exactly(
        pairs in prop::collection::vec((-1e12f64..1e12, -1e-9f64..1e-9), 2..200),
    ) {
        let (a, b): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let chans = channels(a, b);
        let dir = tempfile::tempdir().unwrap();
        for (format, name) in [(Format::Csv, "rec.csv"), (Format::RawF64, "rec.bin")] {
            let path = dir.path().join(name);
            save_recording(&path, format, &chans).unwrap();
            let back = load_recording(&path, format, 1024.0).unwrap();
            prop_assert_eq!(back.len(), 2);
            for (x, y) in back.iter().zip(&chans) {
                prop_assert_eq!(x.label(), y.label());
                let same = x.samples().iter().zip(y.samples()).all(|(p, q)| p.to_bits() == q.to_bits());
                prop_assert!(same);
            }
        }
    }
}

#[test]
fn csv_errors_name_the_location() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");

    fs::write(&path, "a,b\n1,2\n3\n").unwrap();
    let msg = ingestion_message(load_recording(&path, Format::Csv, 1024.0));
    assert!(msg.contains("ragged row 3"), "{msg}");

    fs::write(&path, "a,b\n1,2\n3,x\n").unwrap();
    let msg = ingestion_message(load_recording(&path, Format::Csv, 1024.0));
    assert!(msg.contains("row 3") && msg.contains("column 2"), "{msg}");

    fs::write(&path, "a,b\n1,NaN\n").unwrap();
    let msg = ingestion_message(load_recording(&path, Format::Csv, 1024.0));
    assert!(msg.contains("non-finite"), "{msg}");

    let missing = dir.path().join("absent.csv");
    ingestion_message(load_recording(&missing, Format::Csv, 1024.0));
}

#[test]
fn raw_errors() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rec.bin");
    save_recording(&path, Format::RawF64, &channels(vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0])).unwrap();

    let mut bytes = fs::read(&path).unwrap();
    bytes.truncate(40);
    fs::write(&path, &bytes).unwrap();
    let msg = ingestion_message(load_recording(&path, Format::RawF64, 1024.0));
    assert!(msg.contains("48 bytes"), "{msg}");

    fs::remove_file(sidecar_path(&path)).unwrap();
    ingestion_message(load_recording(&path, Format::RawF64, 1024.0));
}

#[test]
fn unequal_channels_are_not_written() {
    let dir = tempfile::tempdir().unwrap();
    let a = TimeSeries::new(vec![1.0, 2.0], 1024.0, "a").unwrap();
    let b = TimeSeries::new(vec![1.0, 2.0, 3.0], 1024.0, "b").unwrap();
    assert!(save_recording(&dir.path().join("x.csv"), Format::Csv, &[a, b]).is_err());
}
