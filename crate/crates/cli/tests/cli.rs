use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const MINIMAL: &str = r#"{"geometry": {"R": "1mm", "H0": "100um", "T": "25um"}}"#;

fn domewave(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_domewave")).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn minimal_config_echoes_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "min.json", MINIMAL);
    let out = domewave(&["--config", cfg.to_str().unwrap(), "resonance"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let err = stderr(&out);
    assert!(err.contains("default: film.d_eff = "), "{err}");
    assert!(err.contains("default: medium.sound_speed_c = 1480 m/s"), "{err}");
    assert!(err.contains("default: film.d_eff = 3e-11 m/V"), "{err}");
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report["first_resonance_hz"].as_f64().unwrap() > 0.0);

    let quiet = domewave(&["--config", cfg.to_str().unwrap(), "-q", "resonance"]);
    assert!(quiet.stderr.is_empty());
    assert_eq!(quiet.stdout, out.stdout);
}

#[test]
fn validation_errors_exit_one_with_field_path() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (r#"{"geometry": {"R": "1mm", "H0": "100um", "T": "0um"}}"#, "geometry.thickness_T"),
        (r#"{"geometry": {"R": "1mm", "H0": "100um", "thikness": "25um"}}"#, "thikness"),
        (r#"{"geometry": {"R": "1mm", "H0": "100um", "T": "25kg"}}"#, "geometry.thickness_T"),
        ("{\n  \"geometry\": {\"R\": 1e-3,,}\n}", ":2:26:"),
    ];
    for (i, (text, needle)) in cases.iter().enumerate() {
        let cfg = write(dir.path(), &format!("bad{i}.json"), text);
        let out = domewave(&["--config", cfg.to_str().unwrap(), "resonance"]);
        assert_eq!(out.status.code(), Some(1), "{text}");
        assert!(stderr(&out).contains(needle), "{}", stderr(&out));
    }
}

#[test]
fn usage_and_runtime_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "min.json", MINIMAL);
    let cfg = cfg.to_str().unwrap();
    assert_eq!(domewave(&["resonance"]).status.code(), Some(1));
    assert_eq!(domewave(&["--config", cfg, "bogus"]).status.code(), Some(1));
    assert_eq!(domewave(&["--config", cfg, "sweep", "--param", "colour"]).status.code(), Some(1));
    assert_eq!(domewave(&["--config", cfg, "spl", "--frequency", "20kg"]).status.code(), Some(1));
    assert_eq!(
        domewave(&["--config", cfg, "beam", "--from", "-90", "--to", "0", "--steps", "3"]).status.code(),
        Some(2)
    );
    assert_eq!(domewave(&["--config", "/nonexistent/domewave.json", "resonance"]).status.code(), Some(2));

    let thread_env = Command::new(env!("CARGO_BIN_EXE_domewave"))
        .args(["--config", cfg, "resonance"])
        .env("DOMEWAVE_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(thread_env.status.code(), Some(1));
}

#[test]
fn help_lists_units() {
    let out = domewave(&["beam", "--help"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    for needle in ["--from <DEG>", "[deg]", "--config <PATH>", "--drive-db <DB>", "[dB]"] {
        assert!(text.contains(needle), "{needle} missing from\n{text}");
    }
    let text = String::from_utf8_lossy(&domewave(&["calibrate", "--help"]).stdout).into_owned();
    assert!(text.contains("[dB re 1 uPa]") && text.contains("Vpp"), "{text}");
}

#[test]
fn wav_rate_must_match_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "cfg.json",
        r#"{"geometry": {"R": "1mm", "H0": "100um", "T": "25um"}, "link": {"sample_rate": "128kHz"}}"#,
    );
    let wav = dir.path().join("x.wav");
    domewave::commlink::write_wav(&wav, &vec![0.0; 4800], 48e3).unwrap();
    let out = domewave(&[
        "--config",
        cfg.to_str().unwrap(),
        "channel",
        "--input",
        wav.to_str().unwrap(),
        "--out",
        dir.path().join("y.wav").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("48000"), "{}", stderr(&out));
}

#[test]
fn tx_channel_rx_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "min.json", MINIMAL);
    let p = |n: &str| dir.path().join(n).to_str().unwrap().to_owned();
    let img = domewave::commlink::GrayImage::new(8, 4, (0..32).map(|i| i as u8 * 8).collect()).unwrap();
    std::fs::write(p("in.pgm"), img.to_pgm()).unwrap();
    let c = cfg.to_str().unwrap();
    for args in [
        vec!["--config", c, "-q", "tx", "--image", &p("in.pgm"), "--out", &p("tx.wav")],
        vec!["--config", c, "-q", "channel", "--input", &p("tx.wav"), "--out", &p("rx.wav")],
        vec![
            "--config",
            c,
            "-q",
            "rx",
            "--input",
            &p("rx.wav"),
            "--width",
            "8",
            "--height",
            "4",
            "--out",
            &p("out.pgm"),
            "--metrics",
            &p("m.json"),
        ],
    ] {
        let out = domewave(&args);
        assert!(out.status.success(), "{args:?}: {}", stderr(&out));
    }
    assert_eq!(std::fs::read(p("out.pgm")).unwrap(), img.to_pgm());
    let metrics: serde_json::Value = serde_json::from_slice(&std::fs::read(p("m.json")).unwrap()).unwrap();
    assert!(metrics["snr_db"].as_f64().unwrap() > 20.0);
    assert!(metrics["ber"].is_null());

    let out = domewave(&["--config", c, "-q", "--drive-db", "-inf", "loopback", "--image", &p("in.pgm")]);
    assert_eq!(out.status.code(), Some(2));
    let metrics: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(metrics["snr_db"].is_null());
}

#[test]
fn spectrogram_writes_csv_image_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "min.json", MINIMAL);
    let wav = dir.path().join("tone.wav");
    let tone: Vec<f64> = (0..9600).map(|n| (2.0 * std::f64::consts::PI * 24e3 * n as f64 / 192e3).sin()).collect();
    domewave::commlink::write_wav(&wav, &tone, 192e3).unwrap();
    let img = dir.path().join("s.pgm");
    let out = domewave(&[
        "--config",
        cfg.to_str().unwrap(),
        "-q",
        "spectrogram",
        "--input",
        wav.to_str().unwrap(),
        "--window",
        "512",
        "--hop",
        "128",
        "--image",
        img.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.starts_with("freq_hz\\time_s,"));
    assert_eq!(csv.lines().count(), 1 + 257);
    assert!(std::fs::read(&img).unwrap().starts_with(b"P5"));
    let sidecar = std::fs::read_to_string(dir.path().join("s.pgm.txt")).unwrap();
    assert!(sidecar.contains("window_length=512") && sidecar.contains("black_db=-120"), "{sidecar}");
}
