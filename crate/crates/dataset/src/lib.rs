//! Sweeps the HOM x TTT grid through the simulator and materializes the
//! KPI dataset in a fixed CSV format.
//!
//! The CSV file is the contract between the simulator half and the ML
//! half: an externally produced file with the same header is equally
//! valid pipeline input.

use std::io::{BufRead, Write};
use std::path::Path;

use rayon::prelude::*;
use thiserror::Error;

use railbench_sim_core::rng::derive_seed;
use railbench_sim_core::{run_simulation, SimConfig, SimError, TTT_VALUES_MS};
pub use railbench_sim_core::KpiRecord;

pub const CSV_HEADER: &str = "HOM,TTT,L,T,CDR,RLF,SE,HOPP,HOP";
pub const FEATURE_NAMES: [&str; 2] = ["HOM", "TTT"];
pub const TARGET_NAMES: [&str; 7] = ["L", "T", "CDR", "RLF", "SE", "HOPP", "HOP"];

const SWEEP_TAG: u64 = 0x53_57_45_45_50; // "SWEEP"

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("simulation failed at hom={hom} dB, ttt={ttt} ms: {source}")]
    Simulation {
        hom: f64,
        ttt: f64,
        #[source]
        source: SimError,
    },

    #[error(transparent)]
    Config(#[from] SimError),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

/// The sweep grid: every `(hom, ttt)` pair gets one simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub hom_values: Vec<f64>,
    pub ttt_values: Vec<f64>,
}

impl Default for Grid {
    /// 33 margins (0 to 16 dB in 0.5 dB steps) x the 16 standardized TTT
    /// values: 528 grid cells.
    fn default() -> Self {
        Grid {
            hom_values: (0..=32).map(|i| i as f64 * 0.5).collect(),
            ttt_values: TTT_VALUES_MS.to_vec(),
        }
    }
}

impl Grid {
    pub fn validate(&self) -> Result<(), DatasetError> {
        for (name, values) in [("hom_values", &self.hom_values), ("ttt_values", &self.ttt_values)]
        {
            if values.is_empty() {
                return Err(DatasetError::InvalidGrid(format!("{name} is empty")));
            }
            if values.windows(2).any(|w| w[0] >= w[1]) {
                return Err(DatasetError::InvalidGrid(format!(
                    "{name} must be strictly ascending with no duplicates"
                )));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.hom_values.len() * self.ttt_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// The materialized KPI table: one row per grid cell, two features and
/// seven targets per row.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    pub rows: Vec<KpiRecord>,
}

impl Dataset {
    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }
}

/// Runs one simulation per grid cell, row-major (hom outer, ttt inner).
///
/// Each cell derives its own seed from the base seed and the cell's grid
/// indices, so results do not depend on sweep order or parallelism.
pub fn sweep(grid: &Grid, base_config: &SimConfig) -> Result<Dataset, DatasetError> {
    grid.validate()?;
    base_config.validate()?;
    let cells: Vec<(usize, usize)> = (0..grid.hom_values.len())
        .flat_map(|i| (0..grid.ttt_values.len()).map(move |j| (i, j)))
        .collect();
    let rows = cells
        .par_iter()
        .map(|&(i, j)| {
            let hom = grid.hom_values[i];
            let ttt = grid.ttt_values[j];
            let config = SimConfig {
                hom,
                ttt,
                seed: derive_seed(base_config.seed, &[SWEEP_TAG, i as u64, j as u64]),
                ..base_config.clone()
            };
            run_simulation(config).map_err(|source| DatasetError::Simulation { hom, ttt, source })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Dataset { rows })
}

/// Serializes with Rust's shortest round-trip float formatting, so
/// `read(write(d)) == d` bit for bit.
pub fn write_csv<W: Write>(dataset: &Dataset, mut out: W) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for row in &dataset.rows {
        let values = row.values();
        let mut line = String::new();
        for (i, v) in values.iter().enumerate() {
            if i > 0 {
                line.push(',');
            }
            line.push_str(&v.to_string());
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

pub fn to_csv_string(dataset: &Dataset) -> String {
    let mut buf = Vec::new();
    write_csv(dataset, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("CSV output is ASCII")
}

/// Writes via a temporary file in the same directory plus a rename, so a
/// failed run never leaves a partial dataset behind.
pub fn write_csv_file(dataset: &Dataset, path: impl AsRef<Path>) -> Result<(), DatasetError> {
    let path = path.as_ref();
    let io_err = |source| DatasetError::Io {
        path: path.display().to_string(),
        source,
    };
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = std::path::PathBuf::from(tmp);
    let file = std::fs::File::create(&tmp).map_err(io_err)?;
    let mut writer = std::io::BufWriter::new(file);
    write_csv(dataset, &mut writer)
        .and_then(|_| writer.flush())
        .map_err(io_err)?;
    drop(writer);
    std::fs::rename(&tmp, path).map_err(io_err)
}

pub fn read_csv<R: BufRead>(reader: R) -> Result<Dataset, DatasetError> {
    let mut lines = reader.lines().enumerate();
    let (_, header) = lines.next().ok_or(DatasetError::Parse {
        line: 1,
        reason: "empty file, expected header".into(),
    })?;
    let header = header.map_err(|e| DatasetError::Parse {
        line: 1,
        reason: e.to_string(),
    })?;
    if header.trim_end() != CSV_HEADER {
        return Err(DatasetError::Parse {
            line: 1,
            reason: format!("header must be exactly {CSV_HEADER:?}, got {header:?}"),
        });
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        let line = line.map_err(|e| DatasetError::Parse {
            line: line_no,
            reason: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != KpiRecord::FIELD_COUNT {
            return Err(DatasetError::Parse {
                line: line_no,
                reason: format!(
                    "expected {} columns, got {}",
                    KpiRecord::FIELD_COUNT,
                    fields.len()
                ),
            });
        }
        let mut values = [0.0; KpiRecord::FIELD_COUNT];
        for (k, field) in fields.iter().enumerate() {
            values[k] = field
                .trim()
                .parse::<f64>()
                .map_err(|_| DatasetError::Parse {
                    line: line_no,
                    reason: format!("non-numeric cell {:?}", field),
                })?;
        }
        let record = KpiRecord {
            hom: values[0],
            ttt: values[1],
            l: values[2],
            t: values[3],
            cdr: values[4],
            rlf: values[5],
            se: values[6],
            hopp: values[7],
            hop: values[8],
        };
        record.validate().map_err(|e| DatasetError::Parse {
            line: line_no,
            reason: e.to_string(),
        })?;
        rows.push(record);
    }
    Ok(Dataset { rows })
}

pub fn read_csv_file(path: impl AsRef<Path>) -> Result<Dataset, DatasetError> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| DatasetError::Io {
        path: path.display().to_string(),
        source,
    })?;
    read_csv(std::io::BufReader::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_config() -> SimConfig {
        SimConfig {
            num_sites: 4,
            sim_duration: 2.0,
            num_measured_users: 4,
            seed: 3,
            ..SimConfig::default()
        }
    }

    fn sample_dataset() -> Dataset {
        Dataset {
            rows: vec![
                KpiRecord {
                    hom: 0.0,
                    ttt: 40.0,
                    l: 61.25,
                    t: 3.5,
                    cdr: 1.0,
                    rlf: 0.5,
                    se: 1.25,
                    hopp: 10.0,
                    hop: 2.0,
                },
                KpiRecord {
                    hom: 0.5,
                    ttt: 40.0,
                    l: 60.0,
                    t: 3.0000000001,
                    cdr: 0.0,
                    rlf: 0.0,
                    se: 1.0,
                    hopp: 0.0,
                    hop: 0.0,
                },
                KpiRecord {
                    hom: 16.0,
                    ttt: 5120.0,
                    l: 59.875,
                    t: 4.125,
                    cdr: 2.5,
                    rlf: 120.0,
                    se: 0.875,
                    hopp: 33.333333333333336,
                    hop: 1.5,
                },
            ],
        }
    }

    #[test]
    fn default_grid_dimensions() {
        let grid = Grid::default();
        assert_eq!(grid.hom_values.len(), 33);
        assert_eq!(grid.ttt_values.len(), 16);
        assert_eq!(grid.len(), 528);
        assert_eq!(grid.hom_values[0], 0.0);
        assert_eq!(grid.hom_values[32], 16.0);
        assert_eq!(grid.hom_values[1], 0.5);
        assert_eq!(grid.ttt_values, TTT_VALUES_MS.to_vec());
        grid.validate().unwrap();
    }

    #[test]
    fn grid_rejects_duplicates_and_disorder() {
        let g = Grid {
            hom_values: vec![0.0, 0.0],
            ttt_values: vec![40.0],
        };
        assert!(g.validate().is_err());
        let g = Grid {
            hom_values: vec![1.0, 0.5],
            ttt_values: vec![40.0],
        };
        assert!(g.validate().is_err());
    }

    #[test]
    fn singleton_sweep_produces_one_row() {
        let grid = Grid {
            hom_values: vec![0.0],
            ttt_values: vec![40.0],
        };
        let ds = sweep(&grid, &tiny_config()).unwrap();
        assert_eq!(ds.n_rows(), 1);
        assert_eq!(ds.rows[0].hom, 0.0);
        assert_eq!(ds.rows[0].ttt, 40.0);
    }

    #[test]
    fn sweep_is_row_major_and_covers_grid() {
        let grid = Grid {
            hom_values: vec![0.0, 1.0],
            ttt_values: vec![0.0, 64.0, 100.0],
        };
        let ds = sweep(&grid, &tiny_config()).unwrap();
        let keys: Vec<(f64, f64)> = ds.rows.iter().map(|r| (r.hom, r.ttt)).collect();
        assert_eq!(
            keys,
            vec![
                (0.0, 0.0),
                (0.0, 64.0),
                (0.0, 100.0),
                (1.0, 0.0),
                (1.0, 64.0),
                (1.0, 100.0)
            ]
        );
    }

    #[test]
    fn sweep_is_deterministic_to_the_byte() {
        let grid = Grid {
            hom_values: vec![0.0, 2.0],
            ttt_values: vec![40.0, 160.0],
        };
        let a = to_csv_string(&sweep(&grid, &tiny_config()).unwrap());
        let b = to_csv_string(&sweep(&grid, &tiny_config()).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn empty_dataset_writes_header_only() {
        let csv = to_csv_string(&Dataset::default());
        assert_eq!(csv, format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn round_trip_reproduces_dataset_exactly() {
        let ds = sample_dataset();
        let csv = to_csv_string(&ds);
        let back = read_csv(csv.as_bytes()).unwrap();
        assert_eq!(ds, back);
    }

    #[test]
    fn wrong_column_count_cites_line() {
        let csv = format!(
            "{CSV_HEADER}\n0,40,1,1,1,1,1,1,1\n0.5,40,1,1,1,1,1,1,1\n1,40,1,1,1,1,1,1,1\n1.5,40,1,1,1,1,1,1\n"
        );
        match read_csv(csv.as_bytes()).unwrap_err() {
            DatasetError::Parse { line, reason } => {
                assert_eq!(line, 5);
                assert!(reason.contains("columns"));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn non_numeric_cell_cites_line() {
        let csv = format!("{CSV_HEADER}\n0,40,1,1,abc,1,1,1,1\n");
        match read_csv(csv.as_bytes()).unwrap_err() {
            DatasetError::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn permuted_header_rejected() {
        let csv = "TTT,HOM,L,T,CDR,RLF,SE,HOPP,HOP\n";
        assert!(matches!(
            read_csv(csv.as_bytes()).unwrap_err(),
            DatasetError::Parse { line: 1, .. }
        ));
    }

    #[test]
    fn atomic_write_never_leaves_partial_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("missing-subdir").join("out.csv");
        assert!(write_csv_file(&sample_dataset(), &path).is_err());
        assert!(!path.exists());

        let ok_path = dir.path().join("out.csv");
        write_csv_file(&sample_dataset(), &ok_path).unwrap();
        let back = read_csv_file(&ok_path).unwrap();
        assert_eq!(back, sample_dataset());
        assert!(!ok_path.with_extension("csv.tmp").exists());
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_record() -> impl Strategy<Value = KpiRecord> {
            (
                0..=32u32,
                prop::sample::select(TTT_VALUES_MS.to_vec()),
                0.0..100.0f64,
                0.0..50.0f64,
                0.0..100.0f64,
                0.0..400.0f64,
                0.0..8.0f64,
                0.0..100.0f64,
                0.0..60.0f64,
            )
                .prop_map(|(h, ttt, l, t, cdr, rlf, se, hopp, hop)| KpiRecord {
                    hom: h as f64 * 0.5,
                    ttt,
                    l,
                    t,
                    cdr,
                    rlf,
                    se,
                    hopp,
                    hop,
                })
        }

        proptest! {
            #[test]
            fn csv_round_trip_is_identity(rows in prop::collection::vec(arb_record(), 0..40)) {
                let ds = Dataset { rows };
                let back = read_csv(to_csv_string(&ds).as_bytes()).unwrap();
                prop_assert_eq!(ds, back);
            }
        }
    }
}
