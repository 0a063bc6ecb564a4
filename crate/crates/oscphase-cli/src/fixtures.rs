//! Committed reference solutions and the shared sampling grid.
//!
//! Fixtures are generated once by `tools/gen_fixtures.py` (arbitrary
//! precision, see that script) and looked up by problem name and lambda.
//! The `OSCPHASE_FIXTURES` environment variable overrides the directory.

use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use serde::Deserialize;

use crate::problems::ProblemId;

/// Number of equispaced interior sample points used for every error
/// measurement.
pub const N_SAMPLES: usize = 10_000;

/// The equispaced interior grid `t_i = a + i (b-a)/(n+1)`, `i = 1..n`.
/// Must stay bit-identical to the generator script's grid.
pub fn sample_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    let h = (b - a) / (n as f64 + 1.0);
    (1..=n).map(|i| a + i as f64 * h).collect()
}

/// One reference solution, sampled on [`sample_grid`].
#[derive(Debug, Clone, Deserialize)]
pub struct Fixture {
    pub problem: String,
    pub lambda: f64,
    pub interval: (f64, f64),
    pub n: usize,
    pub t_first: f64,
    pub t_last: f64,
    pub y: Vec<f64>,
}

impl Fixture {
    /// The sample grid this fixture was evaluated on.
    pub fn grid(&self) -> Vec<f64> {
        let g = sample_grid(self.interval.0, self.interval.1, self.n);
        assert_eq!(g[0], self.t_first, "fixture grid mismatch");
        assert_eq!(*g.last().unwrap(), self.t_last, "fixture grid mismatch");
        g
    }
}

/// Directory holding the fixture files.
pub fn fixtures_dir() -> PathBuf {
    std::env::var_os("OSCPHASE_FIXTURES")
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures"))
}

fn index() -> &'static Vec<(String, f64, PathBuf)> {
    static INDEX: OnceLock<Vec<(String, f64, PathBuf)>> = OnceLock::new();
    INDEX.get_or_init(|| {
        let mut entries = Vec::new();
        let dir = fixtures_dir();
        let Ok(read) = std::fs::read_dir(&dir) else {
            return entries;
        };
        for entry in read.flatten() {
            let path = entry.path();
            let Some(stem) = path.file_stem().and_then(|s| s.to_str()) else {
                continue;
            };
            if path.extension().and_then(|e| e.to_str()) != Some("json") {
                continue;
            }
            // filenames are {problem}_{lambda}.json with integer lambda
            let Some((problem, lambda_str)) = stem.rsplit_once('_') else {
                continue;
            };
            let Ok(lambda) = lambda_str.parse::<f64>() else {
                continue;
            };
            entries.push((problem.to_string(), lambda, path));
        }
        entries
    })
}

/// Load the reference solution for `(problem, lambda)`. Returns `Ok(None)`
/// when no fixture exists for that pair; errors are never fabricated as a
/// zero-error reference.
pub fn reference_values(problem: ProblemId, lambda: f64) -> std::io::Result<Option<Fixture>> {
    let name = problem.name();
    for (fixture_problem, fixture_lambda, path) in index() {
        if fixture_problem == name
            && (fixture_lambda - lambda).abs() <= 1e-9 * fixture_lambda.abs().max(1.0)
        {
            let text = std::fs::read_to_string(path)?;
            let fixture: Fixture = serde_json::from_str(&text)
                .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))?;
            return Ok(Some(fixture));
        }
    }
    Ok(None)
}
