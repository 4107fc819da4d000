//! include/rdlab.h must match what cbindgen generates from the sources.
//! Set RDLAB_BLESS_HEADER=1 to rewrite it.

use std::path::Path;

#[test]
fn header_is_current() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR"));
    let config = cbindgen::Config::from_file(root.join("cbindgen.toml")).expect("cbindgen.toml");
    let mut generated = Vec::new();
    cbindgen::Builder::new()
        .with_crate(root)
        .with_config(config)
        .generate()
        .expect("header generation")
        .write(&mut generated);
    let path = root.join("include/rdlab.h");
    if std::env::var_os("RDLAB_BLESS_HEADER").is_some() {
        std::fs::write(&path, &generated).expect("write header");
    }
    let on_disk = std::fs::read(&path).expect("include/rdlab.h missing; rerun with RDLAB_BLESS_HEADER=1");
    assert!(
        on_disk == generated,
        "include/rdlab.h is stale; rerun with RDLAB_BLESS_HEADER=1"
    );
}

#[test]
fn header_compiles_as_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/rdlab.h");
    let Ok(status) = std::process::Command::new("cc")
        .args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c"])
        .arg(&header)
        .status()
    else {
        eprintln!("no C compiler on PATH; skipping");
        return;
    };
    assert!(status.success(), "cc rejected {}", header.display());
}
