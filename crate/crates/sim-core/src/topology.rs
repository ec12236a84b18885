//! Cell geometry for the linear rail deployment.

use crate::config::{SimConfig, SimError};

/// One cell (sector) of a site. Sectors of a site are co-located and
/// differ only in their shadowing draws and background load.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub cell_id: usize,
    pub site_id: usize,
    /// (x along track, y perpendicular offset), meters.
    pub position: (f64, f64),
    pub tx_power: f64,
}

/// Fixed deployment covering the whole train path. The track is treated
/// as circular with circumference `track_length` so arbitrarily long runs
/// stay in coverage.
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    pub cells: Vec<Cell>,
    pub track_length: f64,
}

impl Topology {
    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }
}

/// Places `num_sites` sites on a line parallel to the track at spacing
/// `inter_site_distance`, offset `track_offset`, with `cells_per_site`
/// co-located cells per site. Deterministic given the config.
pub fn build_topology(config: &SimConfig) -> Result<Topology, SimError> {
    config.validate()?;
    let mut cells = Vec::with_capacity(config.num_sites * config.cells_per_site);
    for site in 0..config.num_sites {
        let x = site as f64 * config.inter_site_distance;
        for sector in 0..config.cells_per_site {
            cells.push(Cell {
                cell_id: site * config.cells_per_site + sector,
                site_id: site,
                position: (x, config.track_offset),
                tx_power: config.tx_power,
            });
        }
    }
    Ok(Topology {
        cells,
        track_length: config.num_sites as f64 * config.inter_site_distance,
    })
}
