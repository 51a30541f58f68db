use std::path::PathBuf;

/// Regenerate with `WEIL_BLESS_HEADER=1 cargo test -p weil-ffi --test header`.
#[test]
fn checked_in_header_is_current() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let config = cbindgen::Config::from_file(dir.join("cbindgen.toml")).unwrap();
    let mut generated = Vec::new();
    cbindgen::Builder::new().with_crate(&dir).with_config(config).generate().unwrap().write(&mut generated);
    let path = dir.join("include/weil.h");
    if std::env::var_os("WEIL_BLESS_HEADER").is_some() {
        std::fs::write(&path, &generated).unwrap();
    }
    let current = std::fs::read(&path).unwrap_or_default();
    assert!(current == generated, "include/weil.h is stale; rerun with WEIL_BLESS_HEADER=1");
}
