//! Bundled example inputs.

use std::path::Path;

use crate::algebra::DefFunction;
use crate::error::{Error, Result};
use crate::structure::{function_from_json, Structure};

macro_rules! file {
    ($name:literal) => {
        ($name, include_str!(concat!("../../../fixtures/", $name)))
    };
}

/// Named groups of input files.
pub const FIXTURES: &[(&str, &[(&str, &str)])] = &[
    ("kneser", &[file!("kneser.json")]),
    ("nondefiso", &[file!("nondefiso_A.json"), file!("nondefiso_B.json")]),
    ("smoothing", &[file!("smoothing_A.json"), file!("smoothing_B.json"), file!("smoothing_f.json")]),
    ("circle", &[file!("circle_A.json"), file!("circle_B.json")]),
    ("neighborhoods", &[file!("neighborhoods.json")]),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    FIXTURES.iter().map(|(n, _)| *n)
}

pub fn files(name: &str) -> Result<&'static [(&'static str, &'static str)]> {
    FIXTURES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, f)| *f)
        .ok_or_else(|| Error::Input(format!("unknown fixture `{name}` (known: {})", names().collect::<Vec<_>>().join(", "))))
}

fn file(name: &str) -> Result<&'static str> {
    FIXTURES
        .iter()
        .flat_map(|(_, fs)| fs.iter())
        .find(|(n, _)| *n == name)
        .map(|(_, text)| *text)
        .ok_or_else(|| Error::Input(format!("unknown fixture file `{name}`")))
}

/// A bundled structure by file name, e.g. `circle_A.json`.
pub fn structure(file_name: &str) -> Result<Structure> {
    Structure::from_json(file(file_name)?)
}

/// A bundled function by file name.
pub fn function(file_name: &str) -> Result<DefFunction> {
    function_from_json(file(file_name)?)
}

/// Writes the files of a fixture into `dir`, returning their paths.
pub fn emit(name: &str, dir: &Path) -> Result<Vec<std::path::PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Input(format!("{}: {e}", dir.display())))?;
    files(name)?
        .iter()
        .map(|(file, text)| {
            let path = dir.join(file);
            std::fs::write(&path, text).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
            Ok(path)
        })
        .collect()
}
