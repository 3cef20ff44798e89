//! Seeded synthetic clustered data.
//!
//! Informative numeric attributes put every cluster at one of three levels
//! (20, 50, 80) plus Gaussian noise of standard deviation 5. Cluster `c`
//! takes the top level on numeric attribute `c mod numeric`, where the
//! other clusters stay low or mid, so each cluster has one attribute
//! separating it. Informative categorical attributes give each cluster a
//! dominant value. Noise attributes are uniform on `[0, 100]` and ignore the
//! label. Columns appear in a seeded shuffled order.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use cluster_explain::dataset::{ClusterId, Column, Dataset};

use crate::error::CliError;

const LEVELS: [f64; 3] = [20.0, 50.0, 80.0];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SynthConfig {
    pub rows: usize,
    /// Label-informative numeric attributes.
    pub numeric: usize,
    /// Label-informative categorical attributes.
    pub categorical: usize,
    pub clusters: usize,
    /// Label-independent numeric attributes.
    pub noise: usize,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            rows: 1000,
            numeric: 3,
            categorical: 1,
            clusters: 3,
            noise: 2,
            seed: 0,
        }
    }
}

fn round2(v: f64) -> f64 {
    (v * 100.0).round() / 100.0
}

pub fn generate(cfg: &SynthConfig) -> Result<Dataset, CliError> {
    if cfg.rows == 0 || cfg.clusters == 0 {
        return Err(CliError::Usage("rows and clusters must be positive".into()));
    }
    if cfg.numeric + cfg.categorical + cfg.noise == 0 {
        return Err(CliError::Usage("at least one attribute is needed".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let k = cfg.clusters;

    // level per (cluster, numeric attribute)
    let levels: Vec<Vec<usize>> = (0..k)
        .map(|c| {
            (0..cfg.numeric)
                .map(|j| {
                    if c % cfg.numeric == j {
                        2
                    } else {
                        rng.random_range(0..2)
                    }
                })
                .collect()
        })
        .collect();
    let mut labels: Vec<usize> = (0..cfg.rows).map(|i| i % k).collect();
    labels.shuffle(&mut rng);

    let spread = Normal::new(0.0, 5.0).expect("valid normal");
    let mut columns: Vec<Column> = Vec::new();
    for j in 0..cfg.numeric {
        let v = labels
            .iter()
            .map(|&c| Some(round2(LEVELS[levels[c][j]] + spread.sample(&mut rng))))
            .collect();
        columns.push(Column::numeric(format!("num_{j}"), v).expect("finite"));
    }
    let names: Vec<String> = (0..k).map(|c| format!("v{c}")).collect();
    for j in 0..cfg.categorical {
        let v: Vec<Option<&str>> = labels
            .iter()
            .map(|&c| {
                let dominant = (c + j) % k;
                let code = if rng.random_bool(0.9) {
                    dominant
                } else {
                    rng.random_range(0..k)
                };
                Some(names[code].as_str())
            })
            .collect();
        columns.push(Column::categorical(format!("cat_{j}"), &v));
    }
    for j in 0..cfg.noise {
        let v = (0..cfg.rows)
            .map(|_| Some(round2(rng.random_range(0.0..=100.0))))
            .collect();
        columns.push(Column::numeric(format!("noise_{j}"), v).expect("finite"));
    }
    columns.shuffle(&mut rng);

    let ids = labels
        .into_iter()
        .map(|c| ClusterId::from(c as i64))
        .collect();
    Ok(Dataset::new(columns, ids, "cluster")?)
}

/// Generated data as CSV bytes.
pub fn generate_csv(cfg: &SynthConfig) -> Result<Vec<u8>, CliError> {
    let d = generate(cfg)?;
    let mut buf = Vec::new();
    d.write_csv(&mut buf)?;
    Ok(buf)
}
