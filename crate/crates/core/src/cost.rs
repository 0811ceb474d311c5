//! Analytic retrieval-time estimates over the RS model.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rs::RsParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostInput {
    pub retrieval_data_bits: f64,
    /// Average number of tips transferring at once.
    pub k_parallel: f64,
    /// Average number of seeks.
    pub k_random: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CostEstimate {
    pub total_s: f64,
    pub transfer_s: f64,
    pub seek_s: f64,
}

/// `bits / (TransferRate_rs * K_parallel) + SeekTime_rs * K_random`.
pub fn estimate(c: &CostInput, rs: &RsParams) -> Result<CostEstimate> {
    if !(c.k_parallel > 0.0) || !c.k_parallel.is_finite() {
        return Err(Error::InvalidQuery(format!(
            "k_parallel must be positive, got {}",
            c.k_parallel
        )));
    }
    if !(c.k_random >= 0.0) || !(c.retrieval_data_bits >= 0.0) {
        return Err(Error::InvalidQuery(
            "k_random and retrieval size must be non-negative".into(),
        ));
    }
    let transfer_s = c.retrieval_data_bits / (rs.transfer_rate_rs * c.k_parallel);
    let seek_s = rs.seek_time_rs * c.k_random;
    Ok(CostEstimate {
        total_s: transfer_s + seek_s,
        transfer_s,
        seek_s,
    })
}

/// Time to read `bits` with every allowed tip busy and no seek at all.
pub fn lower_bound(bits: f64, rs: &RsParams, n_apt: u32) -> CostEstimate {
    let transfer_s = bits / (rs.transfer_rate_rs * n_apt as f64);
    CostEstimate {
        total_s: transfer_s,
        transfer_s,
        seek_s: 0.0,
    }
}
