//! Scenario parameters for one simulation run.

use std::path::Path;

use thiserror::Error;

/// The sixteen standardized time-to-trigger values, in milliseconds.
pub const TTT_VALUES_MS: [f64; 16] = [
    0.0, 40.0, 64.0, 80.0, 100.0, 128.0, 160.0, 256.0, 320.0, 480.0, 512.0, 640.0, 1024.0,
    1280.0, 2560.0, 5120.0,
];

/// Load contribution of one attached user, as a fraction of cell capacity.
pub const PER_USER_LOAD: f64 = 0.05;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid configuration: {field}: {reason}")]
    InvalidConfig { field: &'static str, reason: String },

    #[error("config file {path}, line {line}: {reason}")]
    ConfigFile {
        path: String,
        line: usize,
        reason: String,
    },

    #[error("no neighbors")]
    NoNeighbors,

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

/// Scenario parameters and handover control settings for one run.
///
/// Distances are meters, powers dBm, times as annotated per field. The
/// handover margin `hom` must lie on the 0..16 dB half-dB grid and `ttt`
/// must be one of [`TTT_VALUES_MS`].
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub num_sites: usize,
    pub cells_per_site: usize,
    /// Spacing between neighboring sites along the track, meters.
    pub inter_site_distance: f64,
    /// Perpendicular distance from the track to the site line, meters.
    pub track_offset: f64,
    pub tx_power: f64,
    /// Hz shared by the users of a cell.
    pub carrier_bandwidth: f64,
    pub noise_power: f64,
    pub pathloss_exponent: f64,
    /// Path loss in dB at the 1 m reference distance.
    pub pathloss_ref_db: f64,
    pub shadowing_sigma: f64,
    /// km/h, constant for every user.
    pub user_speed: f64,
    /// Simulation cycle length, ms.
    pub tick: f64,
    pub num_measured_users: usize,
    /// Total simulated time, seconds (includes the warm-up window).
    pub sim_duration: f64,
    /// Configured handover margin, dB.
    pub hom: f64,
    /// Time-to-trigger, ms.
    pub ttt: f64,
    /// Serving-cell load fraction at which the margin activates.
    pub load_threshold: f64,
    pub rlf_sinr_threshold: f64,
    /// SINR must stay below the threshold this long (ms) to declare RLF.
    pub rlf_timer: f64,
    /// A handover back to the previous cell within this window (ms) counts
    /// as a ping-pong.
    pub pingpong_window: f64,
    /// Per-cell background traffic, redrawn uniformly from this range each
    /// cycle.
    pub background_load_range: (f64, f64),
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            num_sites: 39,
            cells_per_site: 3,
            inter_site_distance: 500.0,
            track_offset: 50.0,
            tx_power: 38.0,
            carrier_bandwidth: 20e6,
            noise_power: -95.0,
            pathloss_exponent: 3.5,
            pathloss_ref_db: 30.0,
            shadowing_sigma: 4.0,
            user_speed: 400.0,
            tick: 40.0,
            num_measured_users: 15,
            sim_duration: 30.0,
            hom: 0.0,
            ttt: 40.0,
            load_threshold: 0.65,
            rlf_sinr_threshold: -8.0,
            rlf_timer: 1000.0,
            pingpong_window: 1000.0,
            background_load_range: (0.3, 0.9),
            seed: 42,
        }
    }
}

fn err(field: &'static str, reason: impl Into<String>) -> SimError {
    SimError::InvalidConfig {
        field,
        reason: reason.into(),
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        if self.num_sites == 0 {
            return Err(err("num_sites", "must be at least 1"));
        }
        if self.cells_per_site == 0 {
            return Err(err("cells_per_site", "must be at least 1"));
        }
        if !(self.inter_site_distance.is_finite() && self.inter_site_distance > 0.0) {
            return Err(err("inter_site_distance", "must be finite and positive"));
        }
        if !self.track_offset.is_finite() || self.track_offset < 0.0 {
            return Err(err("track_offset", "must be finite and non-negative"));
        }
        for (field, v) in [
            ("tx_power", self.tx_power),
            ("noise_power", self.noise_power),
            ("pathloss_ref_db", self.pathloss_ref_db),
            ("rlf_sinr_threshold", self.rlf_sinr_threshold),
        ] {
            if !v.is_finite() {
                return Err(err(field, "must be finite"));
            }
        }
        if !(self.carrier_bandwidth.is_finite() && self.carrier_bandwidth > 0.0) {
            return Err(err("carrier_bandwidth", "must be finite and positive"));
        }
        if !(self.pathloss_exponent.is_finite() && self.pathloss_exponent > 0.0) {
            return Err(err("pathloss_exponent", "must be finite and positive"));
        }
        if !self.shadowing_sigma.is_finite() || self.shadowing_sigma < 0.0 {
            return Err(err("shadowing_sigma", "must be finite and non-negative"));
        }
        if !(self.user_speed.is_finite() && self.user_speed > 0.0) {
            return Err(err("user_speed", "must be finite and positive"));
        }
        if !(self.tick.is_finite() && self.tick > 0.0) {
            return Err(err("tick", "must be finite and positive"));
        }
        if self.num_measured_users == 0 {
            return Err(err("num_measured_users", "must be at least 1"));
        }
        if !(self.sim_duration.is_finite() && self.sim_duration * 1000.0 >= self.tick) {
            return Err(err("sim_duration", "must cover at least one tick"));
        }
        if !(self.hom.is_finite() && (0.0..=16.0).contains(&self.hom))
            || (self.hom * 2.0).round() != self.hom * 2.0
        {
            return Err(err("hom", "must lie in [0, 16] dB on the 0.5 dB grid"));
        }
        if !TTT_VALUES_MS.contains(&self.ttt) {
            return Err(err("ttt", "must be one of the sixteen standardized values"));
        }
        if !(self.load_threshold.is_finite()
            && self.load_threshold > 0.0
            && self.load_threshold < 1.0)
        {
            return Err(err("load_threshold", "must lie strictly between 0 and 1"));
        }
        if !(self.rlf_timer.is_finite() && self.rlf_timer > 0.0) {
            return Err(err("rlf_timer", "must be finite and positive"));
        }
        if !(self.pingpong_window.is_finite() && self.pingpong_window > 0.0) {
            return Err(err("pingpong_window", "must be finite and positive"));
        }
        let (lo, hi) = self.background_load_range;
        if !(lo.is_finite() && hi.is_finite() && (0.0..=1.0).contains(&lo) && lo <= hi && hi <= 1.0)
        {
            return Err(err(
                "background_load_range",
                "must be an ordered pair of fractions in [0, 1]",
            ));
        }
        Ok(())
    }

    /// Loads a config from a plain-text `key=value` file, one field per
    /// line. Field names are exactly the struct field names; blank lines
    /// and `#` comments are ignored. `background_load_range` takes two
    /// comma-separated fractions.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, SimError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| SimError::ConfigFile {
            path: path.display().to_string(),
            line: 0,
            reason: e.to_string(),
        })?;
        Self::from_key_values(&text, &path.display().to_string())
    }

    pub fn from_key_values(text: &str, origin: &str) -> Result<Self, SimError> {
        let mut cfg = SimConfig::default();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| SimError::ConfigFile {
                path: origin.to_string(),
                line: line_no,
                reason: format!("expected key=value, got {line:?}"),
            })?;
            cfg.set_field(key.trim(), value.trim())
                .map_err(|reason| SimError::ConfigFile {
                    path: origin.to_string(),
                    line: line_no,
                    reason,
                })?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn set_field(&mut self, key: &str, value: &str) -> Result<(), String> {
        fn num(value: &str) -> Result<f64, String> {
            value
                .parse::<f64>()
                .map_err(|_| format!("not a number: {value:?}"))
        }
        fn count(value: &str) -> Result<usize, String> {
            value
                .parse::<usize>()
                .map_err(|_| format!("not a count: {value:?}"))
        }
        match key {
            "num_sites" => self.num_sites = count(value)?,
            "cells_per_site" => self.cells_per_site = count(value)?,
            "inter_site_distance" => self.inter_site_distance = num(value)?,
            "track_offset" => self.track_offset = num(value)?,
            "tx_power" => self.tx_power = num(value)?,
            "carrier_bandwidth" => self.carrier_bandwidth = num(value)?,
            "noise_power" => self.noise_power = num(value)?,
            "pathloss_exponent" => self.pathloss_exponent = num(value)?,
            "pathloss_ref_db" => self.pathloss_ref_db = num(value)?,
            "shadowing_sigma" => self.shadowing_sigma = num(value)?,
            "user_speed" => self.user_speed = num(value)?,
            "tick" => self.tick = num(value)?,
            "num_measured_users" => self.num_measured_users = count(value)?,
            "sim_duration" => self.sim_duration = num(value)?,
            "hom" => self.hom = num(value)?,
            "ttt" => self.ttt = num(value)?,
            "load_threshold" => self.load_threshold = num(value)?,
            "rlf_sinr_threshold" => self.rlf_sinr_threshold = num(value)?,
            "rlf_timer" => self.rlf_timer = num(value)?,
            "pingpong_window" => self.pingpong_window = num(value)?,
            "background_load_range" => {
                let (lo, hi) = value
                    .split_once(',')
                    .ok_or_else(|| format!("expected lo,hi pair, got {value:?}"))?;
                self.background_load_range = (num(lo.trim())?, num(hi.trim())?);
            }
            "seed" => {
                self.seed = value
                    .parse::<u64>()
                    .map_err(|_| format!("not a 64-bit seed: {value:?}"))?
            }
            other => return Err(format!("unknown field {other:?}")),
        }
        Ok(())
    }

    /// Number of simulation cycles covered by `sim_duration`.
    pub fn total_ticks(&self) -> u64 {
        (self.sim_duration * 1000.0 / self.tick + 1e-9).floor() as u64
    }

    /// User speed in meters per tick.
    pub fn step_distance(&self) -> f64 {
        self.user_speed / 3.6 * (self.tick / 1000.0)
    }
}
