//! Numerical tolerances shared by every computation and echoed into reports.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Relative Hermiticity defect accepted (and symmetrised away) on input.
    pub herm: f64,
    /// Most negative eigenvalue tolerated in a density matrix.
    pub psd: f64,
    /// Allowed |tr ρ − 1|.
    pub trace: f64,
    /// Relative spectral cutoff defining supports.
    pub support_cutoff: f64,
    /// Mass of ρ outside supp σ above which D(ρ‖σ) is reported infinite.
    pub support_leak: f64,
    /// Capacity difference (bits) below which two capacities are equal.
    pub zero: f64,
    /// Pass threshold for the operator reconstruction and recovery checks.
    pub a2: f64,
    /// Pass threshold for the pure-state block conditions.
    pub c1: f64,
    /// Residual at which a Gram decomposition counts as found.
    pub gram: f64,
    /// Relative singular-value cutoff for numerical rank.
    pub rank: f64,
    /// Outcomes with probability below this are dropped from conditionals.
    pub outcome_cutoff: f64,
    /// Allowed representation residual.
    pub rep: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            herm: 1e-10,
            psd: 1e-10,
            trace: 1e-10,
            support_cutoff: 1e-10,
            support_leak: 1e-9,
            zero: 1e-7,
            a2: 1e-7,
            c1: 1e-7,
            gram: 1e-6,
            rank: 1e-9,
            outcome_cutoff: 1e-12,
            rep: 1e-9,
        }
    }
}
