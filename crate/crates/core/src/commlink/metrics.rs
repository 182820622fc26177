//! Bit error rate and the link report.

use super::LinkError;
use serde::{Deserialize, Serialize};

/// Hamming distance over length.
pub fn ber(sent: &[bool], received: &[bool]) -> Result<f64, LinkError> {
    if sent.len() != received.len() {
        return Err(LinkError::LengthMismatch(sent.len(), received.len()));
    }
    if sent.is_empty() {
        return Ok(0.0);
    }
    let errors = sent.iter().zip(received).filter(|(a, b)| a != b).count();
    Ok(errors as f64 / sent.len() as f64)
}

/// Serialised as `{snr_db, ber, bits_sent, bits_errored, drive_level_db, seed}`;
/// quantities that could not be measured are `null`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkMetrics {
    pub snr_db: Option<f64>,
    pub ber: Option<f64>,
    pub bits_sent: usize,
    pub bits_errored: Option<usize>,
    pub drive_level_db: f64,
    pub seed: u64,
}
