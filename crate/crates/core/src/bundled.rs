//! Models shipped with the library, so the examples run from any directory.

use std::path::Path;

pub const MODELS: &[(&str, &str)] = &[
    ("three_species.crn", include_str!("../models/three_species.crn")),
    ("enzyme.crn", include_str!("../models/enzyme.crn")),
    ("yu_craciun.crn", include_str!("../models/yu_craciun.crn")),
    ("simple_translation.crn", include_str!("../models/simple_translation.crn")),
    ("insulin.crn", include_str!("../models/insulin.crn")),
    ("insulin_published.par", include_str!("../models/insulin_published.par")),
    ("insulin_corrected.par", include_str!("../models/insulin_corrected.par")),
];

pub fn get(name: &str) -> Option<&'static str> {
    MODELS.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

/// Reads `path`, or the bundled file with the same file name when the path
/// does not exist.
pub fn read_model(path: &str) -> std::io::Result<String> {
    match std::fs::read_to_string(path) {
        Ok(s) => Ok(s),
        Err(e) => {
            let base = Path::new(path).file_name().and_then(|b| b.to_str()).unwrap_or(path);
            get(base).map(str::to_string).ok_or(e)
        }
    }
}
