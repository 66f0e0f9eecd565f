//! The canonical CSV report and its JSON sidecar.

use eddy_core::stats::ConvergenceRow;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const REPORT_CSV: &str = "report.csv";
pub const SIDECAR_JSON: &str = "report.json";
pub const CONFIG_COPY: &str = "config.toml";

/// Column layout, one row per `n`. Directly plottable with
/// `gnuplot: plot 'report.csv' using 2:3 with linespoints` after `set datafile separator ','`.
pub const CSV_HEADER: &str = "n,theta_linf,D,stderr,M,seconds";

/// Index of the wallclock column, which is excluded from replay comparison.
const SECONDS_COLUMN: usize = 5;

pub fn render_csv(rows: &[ConvergenceRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!("{},{},{},{},{},{:.3}\n", r.n, r.theta_linf, r.d, r.stderr, r.samples, r.seconds));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sidecar {
    pub config_sha256: String,
    pub seed: u64,
    pub version: String,
    pub experiment: String,
    pub started_at: String,
    pub finished_at: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Comparison {
    Match,
    /// `row` counts data rows from 1; 0 is the header.
    Mismatch {
        row: usize,
        expected: String,
        found: String,
    },
}

fn masked(line: &str) -> String {
    line.split(',').enumerate().map(|(i, f)| if i == SECONDS_COLUMN { "*" } else { f }).collect::<Vec<_>>().join(",")
}

/// Byte comparison of two reports with the wallclock column masked.
pub fn compare_csv(expected: &str, found: &str) -> Comparison {
    let (e, f): (Vec<&str>, Vec<&str>) = (expected.lines().collect(), found.lines().collect());
    for row in 0..e.len().max(f.len()) {
        let (a, b) = (e.get(row).copied().unwrap_or(""), f.get(row).copied().unwrap_or(""));
        if masked(a) != masked(b) {
            return Comparison::Mismatch { row, expected: a.to_string(), found: b.to_string() };
        }
    }
    if expected.ends_with('\n') != found.ends_with('\n') {
        return Comparison::Mismatch { row: e.len().max(f.len()), expected: String::new(), found: String::new() };
    }
    Comparison::Match
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows() -> Vec<ConvergenceRow> {
        vec![
            ConvergenceRow { n: 2, theta_linf: 0.5, d: 0.25, stderr: 0.01, samples: 64, seconds: 1.23456 },
            ConvergenceRow { n: 4, theta_linf: 0.3, d: 0.125, stderr: 0.0, samples: 64, seconds: 2.0 },
        ]
    }

    #[test]
    fn layout() {
        assert_eq!(
            render_csv(&rows()),
            "n,theta_linf,D,stderr,M,seconds\n2,0.5,0.25,0.01,64,1.235\n4,0.3,0.125,0,64,2.000\n"
        );
    }

    #[test]
    fn wallclock_is_ignored_but_values_are_not() {
        let a = render_csv(&rows());
        let mut r = rows();
        r[1].seconds = 99.0;
        assert_eq!(compare_csv(&a, &render_csv(&r)), Comparison::Match);
        r[1].d = 0.12500000000000003;
        assert!(matches!(compare_csv(&a, &render_csv(&r)), Comparison::Mismatch { row: 2, .. }));
        assert!(matches!(compare_csv(&a, &a[..a.len() - 1]), Comparison::Mismatch { .. }));
    }

    #[test]
    fn digest() {
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }
}
