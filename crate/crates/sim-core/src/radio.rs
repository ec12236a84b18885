//! Log-distance path loss, RSRP, and SINR helpers.

use crate::config::SimConfig;
use crate::topology::Cell;

pub fn dbm_to_mw(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0)
}

pub fn mw_to_db(mw: f64) -> f64 {
    10.0 * mw.log10()
}

/// Path loss in dB at `distance_m`, clamped to the 1 m reference distance.
pub fn path_loss_db(pathloss_ref_db: f64, exponent: f64, distance_m: f64) -> f64 {
    pathloss_ref_db + 10.0 * exponent * distance_m.max(1.0).log10()
}

/// Geometry and radio constants shared by all per-tick measurements.
pub struct RadioEnv<'a> {
    pub config: &'a SimConfig,
    pub track_length: f64,
}

impl RadioEnv<'_> {
    /// Distance from a track position to a cell, on the circular track.
    pub fn distance(&self, cell: &Cell, user_x: f64) -> f64 {
        let mut dx = (user_x - cell.position.0).abs();
        if dx > self.track_length / 2.0 {
            dx = self.track_length - dx;
        }
        (dx * dx + cell.position.1 * cell.position.1).sqrt()
    }

    /// Received power in dBm: tx power minus log-distance path loss plus
    /// the caller-supplied shadowing term.
    pub fn rsrp(&self, cell: &Cell, user_x: f64, shadowing_db: f64) -> f64 {
        let d = self.distance(cell, user_x);
        cell.tx_power
            - path_loss_db(self.config.pathloss_ref_db, self.config.pathloss_exponent, d)
            + shadowing_db
    }
}

/// Linear SINR of the serving cell against all co-channel interferers
/// plus noise (frequency reuse 1: every other cell interferes).
pub fn sinr_linear(rsrps_dbm: &[f64], serving: usize, noise_dbm: f64) -> f64 {
    let signal = dbm_to_mw(rsrps_dbm[serving]);
    let mut denom = dbm_to_mw(noise_dbm);
    for (i, &p) in rsrps_dbm.iter().enumerate() {
        if i != serving {
            denom += dbm_to_mw(p);
        }
    }
    signal / denom
}
