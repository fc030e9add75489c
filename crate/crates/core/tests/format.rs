use mmc_core::datagen::{generate_mmc_data, sample_random_mmc};
use mmc_core::family::{fit_model, FitConfig, ModelKind};
use mmc_core::format::{data_digest, format_sequences, parse_sequences, ModelFile, Provenance};
use mmc_core::{Error, SequenceModel};

fn provenance(kind: ModelKind) -> Provenance {
    Provenance {
        fitter: kind.to_string(),
        seed: Some(1),
        data_digest: String::new(),
        train_log_likelihood: None,
    }
}

#[test]
fn every_family_round_trips_bit_for_bit() {
    let planted = sample_random_mmc(4, 3, 2).unwrap();
    let train = generate_mmc_data(&planted, 2000, 3);
    let test = generate_mmc_data(&planted, 500, 4);
    let config = FitConfig::default();
    for kind in ModelKind::ALL {
        let outcome = fit_model(kind, &train, &config).unwrap();
        let file = ModelFile::new(&outcome.model, 3, provenance(kind));
        let text = file.to_json().unwrap();
        let back = ModelFile::from_json(&text).unwrap();
        assert_eq!(back, file, "{kind}");
        assert_eq!(back.to_json().unwrap(), text);
        let model = back.to_model().unwrap();
        let before = outcome.model.mean_log_likelihood(&test, 1e-6).unwrap();
        let after = model.mean_log_likelihood(&test, 1e-6).unwrap();
        assert_eq!(before.to_bits(), after.to_bits(), "{kind}");
    }
}

#[test]
fn sequence_files_round_trip() {
    let planted = sample_random_mmc(5, 2, 0).unwrap();
    let data = generate_mmc_data(&planted, 100, 1);
    let text = format_sequences(&data, &["made for a test".to_string()]);
    assert!(text.starts_with("# made for a test\nstates 5\n"));
    let back = parse_sequences(&text, 2).unwrap();
    assert_eq!(back, data);
    assert_eq!(data_digest(&back), data_digest(&data));
    assert!(data_digest(&data).starts_with("sha256:"));
}

#[test]
fn malformed_sequence_files_are_format_errors() {
    for text in [
        "",
        "states x\n0 1\n",
        "0 1 2\n",
        "states 3\n0 1 7\n",
        "states 3\n0 -1\n",
        "states 0\n",
    ] {
        assert!(
            matches!(parse_sequences(text, 1), Err(Error::Format(_) | Error::EmptyStateSpace | Error::StateOutOfRange { .. })),
            "{text:?}"
        );
    }
    let ok = parse_sequences("# c\n\nstates 3\n0 1 2\n# mid\n2 1\n", 1).unwrap();
    assert_eq!(ok.sequences().len(), 2);
    assert_eq!(ok.num_windows(), 3);
}

#[test]
fn model_files_reject_bad_content() {
    let planted = sample_random_mmc(3, 2, 0).unwrap();
    let data = generate_mmc_data(&planted, 200, 1);
    let outcome = fit_model(ModelKind::MmcGreedy, &data, &FitConfig::default()).unwrap();
    let text = ModelFile::new(&outcome.model, 2, provenance(ModelKind::MmcGreedy))
        .to_json()
        .unwrap();
    assert!(ModelFile::from_json("{").is_err());
    let wrong_version = text.replace("\"format_version\": 1", "\"format_version\": 99");
    assert!(ModelFile::from_json(&wrong_version).and_then(|f| f.to_model()).is_err());
}
