use std::path::Path;

use lzsm_cli::{parse_config, Command, Manifest, Overrides, RunConfig};
use lzsm_core::sweep::Horizon;
use lzsm_core::ModelParams;
use proptest::prelude::*;

const MINIMAL_SPECTRUM: &str = r#"
command = "spectrum"
model = { delta1 = 1.0, delta2 = 1.0, c = 3.0, amp = 10.0, omega = 1.0, eps0 = 0.0 }
time = { horizon = { absolute = 12.566370614359172 } }
"#;

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn minimal_spectrum_config_parses() {
    let cfg = RunConfig::from_toml(MINIMAL_SPECTRUM).unwrap();
    assert_eq!(cfg.command, Command::Spectrum);
    assert_eq!(cfg.model.unwrap(), ModelParams { delta1: 1.0, delta2: 1.0, c: 3.0, amp: 10.0, omega: 1.0, eps0: 0.0 });
    assert_eq!(cfg.time.unwrap().samples, 1001);
    assert_eq!(cfg.output.dir, Path::new("out"));
}

#[test]
fn zero_delta2_names_the_field() {
    let text = MINIMAL_SPECTRUM.replace("delta2 = 1.0", "delta2 = 0.0");
    let err = RunConfig::from_toml(&text).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    assert!(err.to_string().contains("delta2"), "{err}");
}

#[test]
fn unknown_keys_are_rejected_and_named() {
    let err = RunConfig::from_toml(&format!("{MINIMAL_SPECTRUM}\nsmoothing = 3\n")).unwrap_err();
    assert!(err.to_string().contains("smoothing"), "{err}");
    let nested = MINIMAL_SPECTRUM.replace("eps0 = 0.0", "eps0 = 0.0, gain = 2.0");
    let err = RunConfig::from_toml(&nested).unwrap_err();
    assert!(err.to_string().contains("gain"), "{err}");
}

#[test]
fn keys_foreign_to_the_command_are_rejected() {
    let text = format!("{MINIMAL_SPECTRUM}\n[region]\nx_min = 0.0\nx_max = 1.0\nx_count = 2\ny_min = 0.0\ny_max = 1.0\ny_count = 2\n");
    let err = RunConfig::from_toml(&text).unwrap_err();
    assert!(err.to_string().contains("region"), "{err}");
}

#[test]
fn figure_id_resolves_to_the_manifest_entry() {
    let cfg = parse_config(Command::Figure, Some("fig4c"), None, &Overrides::default()).unwrap();
    let mut expected = Manifest::builtin().unwrap().figures["fig4c"].clone();
    expected.figure = Some("fig4c".into());
    assert_eq!(cfg, expected);
}

#[test]
fn figure_file_with_output_dir() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "f.toml", "command = \"figure\"\nfigure = \"fig9b\"\n[output]\ndir = \"elsewhere\"\n");
    let cfg = parse_config(Command::Figure, None, Some(&path), &Overrides::default()).unwrap();
    assert_eq!(cfg.command, Command::Weak);
    assert_eq!(cfg.output.dir, Path::new("elsewhere"));
    let bad = write(dir.path(), "g.toml", "command = \"figure\"\nfigure = \"fig9b\"\nc_values = [1.0]\n");
    assert!(parse_config(Command::Figure, None, Some(&bad), &Overrides::default()).is_err());
}

#[test]
fn figure_runs_reject_model_overrides() {
    let ov = Overrides { c: Some(1.0), ..Overrides::default() };
    assert!(parse_config(Command::Figure, Some("fig4c"), None, &ov).is_err());
}

#[test]
fn command_mismatch_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "s.toml", MINIMAL_SPECTRUM);
    let err = parse_config(Command::Bloch, None, Some(&path), &Overrides::default()).unwrap_err();
    assert!(err.to_string().contains("spectrum"), "{err}");
}

#[test]
fn flags_override_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "s.toml", MINIMAL_SPECTRUM);
    let ov = Overrides { c: Some(0.5), samples: Some(11), ..Overrides::default() };
    let cfg = parse_config(Command::Spectrum, None, Some(&path), &ov).unwrap();
    assert_eq!(cfg.model.unwrap().c, 0.5);
    assert_eq!(cfg.time.unwrap().samples, 11);
}

fn nonzero() -> impl Strategy<Value = f64> {
    prop_oneof![0.05..5.0f64, -5.0..-0.05f64]
}

fn horizon() -> impl Strategy<Value = Horizon> {
    prop_oneof![
        (0.1..100.0f64).prop_map(Horizon::Absolute),
        (0.5..20.0f64).prop_map(Horizon::DrivePeriods),
        (1.0..80.0f64).prop_map(Horizon::InverseDelta),
    ]
}

proptest! {
    #[test]
    fn toml_round_trip(
        cmd in prop_oneof![Just(Command::Trajectory), Just(Command::Bloch), Just(Command::Trapping), Just(Command::Spectrum)],
        d1 in 0.05..5.0f64,
        d2 in nonzero(),
        c in -4.0..4.0f64,
        amp in 0.0..20.0f64,
        omega in 0.1..5.0f64,
        eps0 in -8.0..8.0f64,
        h in horizon(),
        samples in 2usize..5000,
        rtol in 1e-12..1e-6f64,
    ) {
        let mut cfg = RunConfig::new(cmd);
        cfg.model = Some(ModelParams { delta1: d1, delta2: d2, c, amp, omega, eps0 });
        cfg.time = Some(lzsm_cli::config::TimeSpan { t0: 0.0, horizon: h, samples });
        cfg.integrator.rtol = rtol;
        if cmd == Command::Spectrum {
            cfg.c_values = vec![0.0, c];
        }
        let back = RunConfig::from_toml(&cfg.to_toml().unwrap()).unwrap();
        prop_assert_eq!(back, cfg);
    }
}
