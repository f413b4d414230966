//! File formats: JSON channel and covariance documents, CSV traces and
//! summaries.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::path::Path;

use wiretap_core::matrix::{ComplexMatrix, HermitianMatrix};
use wiretap_core::rates::RateUnit;
use wiretap_core::signal::{AugmentedCovariance, ChannelPair};
use wiretap_core::solver::ConvergenceTrace;

/// Complex entries are encoded as two-element [re, im] arrays.
pub type ComplexRows = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Serialize, Deserialize)]
pub struct ChannelFile {
    #[serde(rename = "H_r")]
    pub h_r: ComplexRows,
    #[serde(rename = "H_e")]
    pub h_e: ComplexRows,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CovarianceFile {
    #[serde(rename = "K")]
    pub k: ComplexRows,
    #[serde(rename = "K_tilde", default, skip_serializing_if = "Option::is_none")]
    pub k_tilde: Option<ComplexRows>,
}

pub fn rows_to_matrix(rows: &ComplexRows, what: &str) -> Result<ComplexMatrix, String> {
    if rows.is_empty() || rows[0].is_empty() {
        return Err(format!("{what}: matrix must be non-empty"));
    }
    let cols = rows[0].len();
    for (i, r) in rows.iter().enumerate() {
        if r.len() != cols {
            return Err(format!(
                "{what}: row {i} has {} entries, expected {cols}",
                r.len()
            ));
        }
    }
    Ok(ComplexMatrix::from_fn(rows.len(), cols, |i, j| {
        Complex64::new(rows[i][j][0], rows[i][j][1])
    }))
}

// serialization side of the round-trip contract; exercised by the tests
#[allow(dead_code)]
pub fn matrix_to_rows(m: &ComplexMatrix) -> ComplexRows {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub fn load_channel(path: &Path) -> Result<ChannelPair, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read channel file {}: {e}", path.display()))?;
    let doc: ChannelFile = serde_json::from_str(&text)
        .map_err(|e| format!("cannot parse channel file {}: {e}", path.display()))?;
    let h_r = rows_to_matrix(&doc.h_r, "H_r")?;
    let h_e = rows_to_matrix(&doc.h_e, "H_e")?;
    ChannelPair::new(h_r, h_e).map_err(|e| e.to_string())
}

#[allow(dead_code)]
pub fn save_channel(path: &Path, ch: &ChannelPair) -> Result<(), String> {
    let doc = ChannelFile {
        h_r: matrix_to_rows(ch.h_r()),
        h_e: matrix_to_rows(ch.h_e()),
    };
    let text = serde_json::to_string_pretty(&doc).map_err(|e| e.to_string())?;
    std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

pub fn load_covariance(path: &Path) -> Result<AugmentedCovariance, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read covariance file {}: {e}", path.display()))?;
    let doc: CovarianceFile = serde_json::from_str(&text)
        .map_err(|e| format!("cannot parse covariance file {}: {e}", path.display()))?;
    let k_raw = rows_to_matrix(&doc.k, "K")?;
    let k = HermitianMatrix::new(k_raw).map_err(|e| format!("K: {e}"))?;
    match &doc.k_tilde {
        Some(rows) => {
            let kt = rows_to_matrix(rows, "K_tilde")?;
            AugmentedCovariance::new(k, kt).map_err(|e| e.to_string())
        }
        None => AugmentedCovariance::proper(k).map_err(|e| e.to_string()),
    }
}

/// One line per accepted iteration, header names the unit.
pub fn trace_csv(trace: &ConvergenceTrace, unit: RateUnit) -> String {
    let mut out = format!("iteration,objective_{}\n", unit.label());
    let scale = match unit {
        RateUnit::Nats => 1.0,
        RateUnit::Bits => 1.0 / std::f64::consts::LN_2,
    };
    for (i, v) in trace.objectives.iter().enumerate() {
        out.push_str(&format!("{i},{:.12}\n", v * scale));
    }
    out
}

#[derive(Debug, Clone)]
pub struct SummaryRow {
    pub mode: String,
    pub solver: String,
    pub snr_db: f64,
    pub rate: f64,
    pub unit: RateUnit,
    pub iterations: usize,
    pub converged: bool,
}

pub const SUMMARY_HEADER: &str = "mode,solver,snr_db,rate,unit,iterations,converged";

impl SummaryRow {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{:.12},{},{},{}",
            self.mode,
            self.solver,
            self.snr_db,
            self.rate,
            self.unit.label(),
            self.iterations,
            self.converged
        )
    }
}

pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.csv_line());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use wiretap_core::signal::reference_channel;

    #[test]
    fn channel_round_trip_is_entrywise_identical() {
        let dir = std::env::temp_dir().join("wiretap-io-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("channel.json");
        let ch = reference_channel();
        save_channel(&path, &ch).unwrap();
        let back = load_channel(&path).unwrap();
        assert_eq!(back.h_r(), ch.h_r());
        assert_eq!(back.h_e(), ch.h_e());
    }

    #[test]
    fn ragged_rows_are_rejected() {
        let rows: ComplexRows = vec![vec![[1.0, 0.0], [2.0, 0.0]], vec![[3.0, 0.0]]];
        assert!(rows_to_matrix(&rows, "H_r").is_err());
    }

    #[test]
    fn empty_matrix_is_rejected() {
        let rows: ComplexRows = vec![];
        assert!(rows_to_matrix(&rows, "H_r").is_err());
    }
}
