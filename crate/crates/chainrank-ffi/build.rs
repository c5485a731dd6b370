use std::path::PathBuf;

fn main() {
    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=cbindgen.toml");
    let crate_dir = PathBuf::from(std::env::var("CARGO_MANIFEST_DIR").unwrap());
    let config = cbindgen::Config::from_file(crate_dir.join("cbindgen.toml"))
        .expect("cbindgen.toml is invalid");
    match cbindgen::Builder::new()
        .with_crate(&crate_dir)
        .with_config(config)
        .generate()
    {
        // write_to_file leaves the committed header untouched when nothing
        // changed, so normal builds stay clean.
        Ok(bindings) => {
            bindings.write_to_file(crate_dir.join("include/chainrank.h"));
        }
        Err(err) => println!("cargo:warning=skipping header generation: {err}"),
    }
}
