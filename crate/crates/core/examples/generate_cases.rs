//! Writes the ten reference configurations as case files, `cases/i_a.toml`
//! through `cases/ii_e.toml`, or into the directory given as first argument.

use std::path::{Path, PathBuf};

use mooring_shoot::cli::CaseFile;
use mooring_shoot::verify::build_catalog;

pub fn run(dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for case in build_catalog() {
        let name = format!(
            "{}_{}.toml",
            case.id.convention.to_string().to_lowercase(),
            case.id.bc.letter()
        );
        let header = format!("# Reference configuration {}\n\n", case.id);
        let path = dir.join(name);
        std::fs::write(&path, header + &CaseFile::from_catalog(&case).to_toml())?;
        println!("{}", path.display());
        written.push(path);
    }
    Ok(written)
}

#[allow(dead_code)]
fn main() -> std::io::Result<()> {
    let dir = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("cases"));
    run(&dir).map(|_| ())
}
