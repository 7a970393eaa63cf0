use std::path::Path;
use std::process::Command;

const HEADER: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/include/vpmcf.h");

#[test]
fn header_declares_every_entry_point() {
    let text = std::fs::read_to_string(HEADER).unwrap();
    for name in [
        "vpmcf_last_error",
        "vpmcf_profile_new",
        "vpmcf_profile_free",
        "vpmcf_profile_field",
        "vpmcf_profile_volume",
        "vpmcf_profile_area",
        "vpmcf_flow_config_default",
        "vpmcf_run",
        "vpmcf_trajectory_state",
        "vpmcf_trajectory_fit",
        "vpmcf_fit_series",
    ] {
        assert!(text.contains(&format!("{name}(")), "{name}");
    }
    assert!(text.contains("typedef struct VpmcfProfile VpmcfProfile;"));
}

#[test]
fn header_compiles_as_c() {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let status = Command::new(&cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-x", "c"])
        .arg(Path::new(HEADER))
        .status()
        .expect("C compiler");
    assert!(status.success());
}
