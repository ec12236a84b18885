//! Discrete-time simulation loop and KPI accounting.
//!
//! Each tick: users advance along the track, per-cell background load is
//! redrawn, every user refreshes RSRP/SINR, the RLF timer and the A3/TTT
//! handover machine run, and KPI accumulators update. The first 10% of
//! cycles are a warm-up window excluded from all KPI accounting.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{SimConfig, SimError, PER_USER_LOAD};
use crate::handover::{advance_ttt, a3_condition, effective_hom, select_target, Neighbor, TttCandidate};
use crate::radio::{mw_to_db, sinr_linear, RadioEnv};
use crate::rng::shadowing_for;
use crate::topology::{build_topology, Topology};

/// Per-user event counters, accumulated over the measurement window only.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct UserCounters {
    pub ho_attempts: u64,
    pub ho_success: u64,
    pub ho_pingpong: u64,
    pub rlf_events: u64,
    pub call_drops: u64,
    pub calls_total: u64,
    /// Sum of per-tick Shannon-share rates, bit/s.
    pub throughput_accumulator: f64,
    /// Sum of per-tick spectral-efficiency samples, bit/s/Hz.
    pub se_accumulator: f64,
    pub sinr_samples: u64,
}

/// Mutable state of one measured user.
#[derive(Debug, Clone)]
pub struct UserState {
    pub user_id: usize,
    /// Position along the (circular) track, meters.
    pub position: f64,
    pub serving_cell: usize,
    pub ttt_candidate: Option<TttCandidate>,
    /// ms since the last successful handover.
    pub time_since_last_ho: f64,
    pub previous_cell: Option<usize>,
    pub rlf_timer_elapsed: f64,
    pub session_active: bool,
    pub counters: UserCounters,
    segment: u64,
    shadowing: Vec<f64>,
}

/// Mutable state of one cell.
#[derive(Debug, Clone)]
pub struct CellState {
    pub cell_id: usize,
    pub background_load: f64,
    pub attached_users: usize,
}

impl CellState {
    /// Load fraction: background traffic plus attached measured users.
    pub fn load(&self) -> f64 {
        (self.background_load + self.attached_users as f64 * PER_USER_LOAD).clamp(0.0, 1.0)
    }

    fn can_admit(&self) -> bool {
        self.background_load + (self.attached_users + 1) as f64 * PER_USER_LOAD <= 1.0 + 1e-12
    }
}

/// One row of the KPI dataset: the `(hom, ttt)` operating point and the
/// seven averaged KPIs of the run.
#[derive(Debug, Clone, PartialEq)]
pub struct KpiRecord {
    pub hom: f64,
    pub ttt: f64,
    /// Mean cell load, percent.
    pub l: f64,
    /// Mean user throughput, Mbps.
    pub t: f64,
    /// Call dropping ratio, percent.
    pub cdr: f64,
    /// Radio-link failures per handover attempt, percent.
    pub rlf: f64,
    /// Mean spectral efficiency, bit/s/Hz.
    pub se: f64,
    /// Ping-pongs per successful handover, percent.
    pub hopp: f64,
    /// Successful handovers per user per cycle, percent.
    pub hop: f64,
}

impl KpiRecord {
    pub const FIELD_COUNT: usize = 9;

    pub fn values(&self) -> [f64; Self::FIELD_COUNT] {
        [
            self.hom, self.ttt, self.l, self.t, self.cdr, self.rlf, self.se, self.hopp, self.hop,
        ]
    }

    pub fn validate(&self) -> Result<(), SimError> {
        for v in self.values() {
            if !v.is_finite() || v < 0.0 {
                return Err(SimError::Invariant(format!(
                    "KPI record has non-finite or negative value: {self:?}"
                )));
            }
        }
        if self.hopp > 100.0 || self.cdr > 100.0 {
            return Err(SimError::Invariant(format!(
                "KPI ratio above 100%: {self:?}"
            )));
        }
        Ok(())
    }
}

/// A single simulation run. Owns all of its state; multiple runs may
/// execute concurrently without coordination.
pub struct Simulation {
    config: SimConfig,
    topology: Topology,
    users: Vec<UserState>,
    cells: Vec<CellState>,
    rng: ChaCha8Rng,
    tick_index: u64,
    total_ticks: u64,
    warmup_ticks: u64,
    measurement_started: bool,
    load_sum: f64,
    load_ticks: u64,
    rsrp_buf: Vec<f64>,
    neighbor_buf: Vec<Neighbor>,
}

impl Simulation {
    pub fn new(config: SimConfig) -> Result<Self, SimError> {
        config.validate()?;
        let topology = build_topology(&config)?;
        let total_ticks = config.total_ticks();
        let warmup_ticks = total_ticks / 10;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

        let mut cells: Vec<CellState> = topology
            .cells
            .iter()
            .map(|c| CellState {
                cell_id: c.cell_id,
                background_load: 0.0,
                attached_users: 0,
            })
            .collect();
        let (lo, hi) = config.background_load_range;
        for cell in &mut cells {
            cell.background_load = lo + rng.gen::<f64>() * (hi - lo);
        }

        // Users start at random positions within the first site span,
        // clustered like carriages of one train.
        let mut users = Vec::with_capacity(config.num_measured_users);
        for user_id in 0..config.num_measured_users {
            let position = rng.gen::<f64>() * config.inter_site_distance;
            let segment = (position / config.inter_site_distance) as u64;
            let shadowing = shadowing_for(
                config.seed,
                user_id,
                segment,
                topology.n_cells(),
                config.shadowing_sigma,
            );
            users.push(UserState {
                user_id,
                position,
                serving_cell: 0,
                ttt_candidate: None,
                time_since_last_ho: f64::INFINITY,
                previous_cell: None,
                rlf_timer_elapsed: 0.0,
                session_active: true,
                counters: UserCounters::default(),
                segment,
                shadowing,
            });
        }

        let mut sim = Simulation {
            config,
            topology,
            users,
            cells,
            rng,
            tick_index: 0,
            total_ticks,
            warmup_ticks,
            measurement_started: false,
            load_sum: 0.0,
            load_ticks: 0,
            rsrp_buf: Vec::new(),
            neighbor_buf: Vec::new(),
        };

        // Initial attachment: best admitting cell by RSRP.
        for u in 0..sim.users.len() {
            let rsrps = sim.measure_rsrps(u);
            let cell = sim.best_admitting_cell(&rsrps);
            sim.cells[cell].attached_users += 1;
            sim.users[u].serving_cell = cell;
            sim.rsrp_buf = rsrps;
        }
        if sim.warmup_ticks == 0 {
            sim.start_measurement();
        }
        Ok(sim)
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn users(&self) -> &[UserState] {
        &self.users
    }

    pub fn cells(&self) -> &[CellState] {
        &self.cells
    }

    pub fn tick_index(&self) -> u64 {
        self.tick_index
    }

    pub fn total_ticks(&self) -> u64 {
        self.total_ticks
    }

    fn measure_rsrps(&self, user: usize) -> Vec<f64> {
        let env = RadioEnv {
            config: &self.config,
            track_length: self.topology.track_length,
        };
        let u = &self.users[user];
        self.topology
            .cells
            .iter()
            .map(|c| env.rsrp(c, u.position, u.shadowing[c.cell_id]))
            .collect()
    }

    fn best_admitting_cell(&self, rsrps: &[f64]) -> usize {
        let mut order: Vec<usize> = (0..rsrps.len()).collect();
        order.sort_by(|&a, &b| rsrps[b].partial_cmp(&rsrps[a]).unwrap().then(a.cmp(&b)));
        for &c in &order {
            if self.cells[c].can_admit() {
                return c;
            }
        }
        order[0]
    }

    fn start_measurement(&mut self) {
        self.measurement_started = true;
        for u in &mut self.users {
            u.counters = UserCounters::default();
            // the call already in progress when measurement starts
            u.counters.calls_total = 1;
        }
    }

    fn check_invariants(&self) -> Result<(), SimError> {
        let attached: usize = self.cells.iter().map(|c| c.attached_users).sum();
        if attached != self.users.len() {
            return Err(SimError::Invariant(format!(
                "attachment count {attached} != user count {}",
                self.users.len()
            )));
        }
        for u in &self.users {
            if u.serving_cell >= self.cells.len() {
                return Err(SimError::Invariant(format!(
                    "user {} attached to unknown cell {}",
                    u.user_id, u.serving_cell
                )));
            }
            if !u.session_active {
                return Err(SimError::Invariant(format!(
                    "user {} left without an active session",
                    u.user_id
                )));
            }
            if let Some(c) = u.ttt_candidate {
                if c.elapsed < 0.0 || c.elapsed > self.config.ttt {
                    return Err(SimError::Invariant(format!(
                        "user {} TTT elapsed {} outside [0, {}]",
                        u.user_id, c.elapsed, self.config.ttt
                    )));
                }
            }
        }
        Ok(())
    }

    /// Advances the simulation by one tick.
    pub fn step(&mut self) -> Result<(), SimError> {
        self.check_invariants()?;
        if !self.measurement_started && self.tick_index >= self.warmup_ticks {
            self.start_measurement();
        }
        let measuring = self.measurement_started;
        let tick_ms = self.config.tick;
        let step_m = self.config.step_distance();
        let n_cells = self.topology.n_cells();

        // Mobility: one direction, fixed speed, circular track.
        for u in &mut self.users {
            u.position = (u.position + step_m) % self.topology.track_length;
            u.time_since_last_ho += tick_ms;
            let segment = (u.position / self.config.inter_site_distance) as u64;
            if segment != u.segment {
                u.segment = segment;
                u.shadowing = shadowing_for(
                    self.config.seed,
                    u.user_id,
                    segment,
                    n_cells,
                    self.config.shadowing_sigma,
                );
            }
        }

        // Traffic: background load redrawn per cell per cycle.
        let (lo, hi) = self.config.background_load_range;
        for cell in &mut self.cells {
            cell.background_load = lo + self.rng.gen::<f64>() * (hi - lo);
        }

        for u in 0..self.users.len() {
            let rsrps = std::mem::take(&mut self.rsrp_buf);
            let rsrps = {
                let mut buf = rsrps;
                buf.clear();
                let env = RadioEnv {
                    config: &self.config,
                    track_length: self.topology.track_length,
                };
                let user = &self.users[u];
                buf.extend(
                    self.topology
                        .cells
                        .iter()
                        .map(|c| env.rsrp(c, user.position, user.shadowing[c.cell_id])),
                );
                buf
            };

            let serving = self.users[u].serving_cell;
            let sinr = sinr_linear(&rsrps, serving, self.config.noise_power);
            let se_sample = (1.0 + sinr).log2();
            let share = self.config.carrier_bandwidth
                / self.cells[serving].attached_users.max(1) as f64;
            if measuring {
                let c = &mut self.users[u].counters;
                c.throughput_accumulator += share * se_sample;
                c.se_accumulator += se_sample;
                c.sinr_samples += 1;
            }

            // Radio-link failure: SINR below threshold for the timer span.
            if mw_to_db(sinr) < self.config.rlf_sinr_threshold {
                self.users[u].rlf_timer_elapsed += tick_ms;
            } else {
                self.users[u].rlf_timer_elapsed = 0.0;
            }
            if self.users[u].rlf_timer_elapsed >= self.config.rlf_timer {
                if measuring {
                    let c = &mut self.users[u].counters;
                    c.rlf_events += 1;
                    c.call_drops += 1;
                    c.calls_total += 1;
                }
                self.users[u].session_active = false;
                self.cells[serving].attached_users -= 1;
                let cell = self.best_admitting_cell(&rsrps);
                self.cells[cell].attached_users += 1;
                let user = &mut self.users[u];
                user.serving_cell = cell;
                user.session_active = true;
                user.rlf_timer_elapsed = 0.0;
                user.ttt_candidate = None;
                user.previous_cell = None;
                user.time_since_last_ho = f64::INFINITY;
                self.rsrp_buf = rsrps;
                continue;
            }

            if n_cells > 1 {
                self.run_handover_machine(u, &rsrps, measuring)?;
            }
            self.rsrp_buf = rsrps;
        }

        if measuring {
            let mean_load: f64 =
                self.cells.iter().map(|c| c.load()).sum::<f64>() / self.cells.len() as f64;
            self.load_sum += mean_load;
            self.load_ticks += 1;
        }
        self.tick_index += 1;
        Ok(())
    }

    fn run_handover_machine(
        &mut self,
        u: usize,
        rsrps: &[f64],
        measuring: bool,
    ) -> Result<(), SimError> {
        let serving = self.users[u].serving_cell;
        let serving_load = self.cells[serving].load();
        let hom_eff = effective_hom(serving_load, self.config.hom, self.config.load_threshold);

        let candidate = self.users[u].ttt_candidate;
        let candidate_holds = candidate
            .map(|c| a3_condition(rsrps[serving], rsrps[c.target], hom_eff))
            .unwrap_or(false);

        let (fresh_target, fresh_holds) = if candidate.is_some() && candidate_holds {
            (None, false)
        } else {
            let mut neighbors = std::mem::take(&mut self.neighbor_buf);
            neighbors.clear();
            neighbors.extend(self.cells.iter().filter(|c| c.cell_id != serving).map(|c| {
                Neighbor {
                    cell_id: c.cell_id,
                    rsrp: rsrps[c.cell_id],
                    load: c.load(),
                }
            }));
            let target = select_target(&neighbors, self.config.load_threshold)?;
            self.neighbor_buf = neighbors;
            let holds = a3_condition(rsrps[serving], rsrps[target], hom_eff);
            (Some(target), holds)
        };

        let (next_candidate, execute) = advance_ttt(
            candidate,
            candidate_holds,
            fresh_target,
            fresh_holds,
            self.config.tick,
            self.config.ttt,
        );
        self.users[u].ttt_candidate = next_candidate;

        if let Some(target) = execute {
            if measuring {
                self.users[u].counters.ho_attempts += 1;
            }
            if self.cells[target].can_admit() {
                let pingpong = self.users[u].previous_cell == Some(target)
                    && self.users[u].time_since_last_ho <= self.config.pingpong_window;
                if measuring {
                    let c = &mut self.users[u].counters;
                    c.ho_success += 1;
                    if pingpong {
                        c.ho_pingpong += 1;
                    }
                }
                self.cells[serving].attached_users -= 1;
                self.cells[target].attached_users += 1;
                let user = &mut self.users[u];
                user.previous_cell = Some(serving);
                user.serving_cell = target;
                user.time_since_last_ho = 0.0;
            } else {
                // admission control blocks the handover: the call drops
                // and a new one starts on the serving cell
                if measuring {
                    let c = &mut self.users[u].counters;
                    c.call_drops += 1;
                    c.calls_total += 1;
                }
            }
        }
        Ok(())
    }

    /// KPIs averaged over the measured users and measured cycles so far.
    pub fn kpi_record(&self) -> Result<KpiRecord, SimError> {
        if self.load_ticks == 0 {
            return Err(SimError::Invariant(
                "no measured cycles yet: run past the warm-up window".into(),
            ));
        }
        let mut attempts = 0u64;
        let mut success = 0u64;
        let mut pingpong = 0u64;
        let mut rlf = 0u64;
        let mut drops = 0u64;
        let mut calls = 0u64;
        let mut tp = 0.0;
        let mut se = 0.0;
        let mut samples = 0u64;
        for u in &self.users {
            let c = &u.counters;
            attempts += c.ho_attempts;
            success += c.ho_success;
            pingpong += c.ho_pingpong;
            rlf += c.rlf_events;
            drops += c.call_drops;
            calls += c.calls_total;
            tp += c.throughput_accumulator;
            se += c.se_accumulator;
            samples += c.sinr_samples;
        }
        let samples_f = samples.max(1) as f64;
        let record = KpiRecord {
            hom: self.config.hom,
            ttt: self.config.ttt,
            l: 100.0 * self.load_sum / self.load_ticks as f64,
            t: tp / samples_f / 1e6,
            cdr: 100.0 * drops as f64 / calls.max(1) as f64,
            rlf: if attempts > 0 {
                100.0 * rlf as f64 / attempts as f64
            } else {
                0.0
            },
            se: se / samples_f,
            hop: 100.0 * success as f64
                / (self.users.len() as f64 * self.load_ticks as f64),
            hopp: if success > 0 {
                100.0 * pingpong as f64 / success as f64
            } else {
                0.0
            },
        };
        record.validate()?;
        Ok(record)
    }
}

/// Runs a full simulation and returns the averaged KPIs. Deterministic
/// given the config (including its seed).
pub fn run_simulation(config: SimConfig) -> Result<KpiRecord, SimError> {
    let mut sim = Simulation::new(config)?;
    for _ in 0..sim.total_ticks {
        sim.step()?;
    }
    sim.kpi_record()
}
