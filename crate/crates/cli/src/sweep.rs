use std::time::Instant;

use anyhow::Context;
use paradot::constructions::{construct, slope_i_lines};
use paradot::counting::counts_report;
use paradot::varieties::{random_paraboloid_subset, PointSet};
use paradot::FieldSpec;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{Family, SweepConfig};

/// One `(p, d, family, trial)` cell, numbered in configuration order.
#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    pub index: u64,
    pub p: u64,
    pub d: usize,
    pub family: Family,
    pub trial: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub p: u64,
    pub d: usize,
    pub family: String,
    pub trial: usize,
    pub set_size: Option<u128>,
    pub prod_size: Option<u128>,
    /// `|∏(E)| / p`.
    pub ratio: Option<f64>,
    #[serde(rename = "D")]
    pub d_energy: Option<u128>,
    #[serde(rename = "D_star")]
    pub d_star: Option<u128>,
    #[serde(rename = "M")]
    pub m_energy: Option<u128>,
    pub t_nde: Option<u128>,
    pub t_de: Option<u128>,
    pub t_star: Option<u128>,
    pub degenerate_pairs: Option<u128>,
    pub runtime_ms: Option<f64>,
    pub seed: u64,
    pub error: Option<String>,
}

pub const COLUMNS: [&str; 17] = [
    "p",
    "d",
    "family",
    "trial",
    "set_size",
    "prod_size",
    "ratio",
    "D",
    "D_star",
    "M",
    "t_nde",
    "t_de",
    "t_star",
    "degenerate_pairs",
    "runtime_ms",
    "seed",
    "error",
];

/// Stream `index` of a ChaCha generator keyed by the global seed.
pub fn cell_seed(global: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(global);
    rng.set_stream(index);
    rng.next_u64()
}

pub fn cells(config: &SweepConfig) -> Vec<Cell> {
    let mut out = Vec::new();
    for &p in &config.primes {
        for family in &config.families {
            for d in family.dims(&config.dims) {
                for trial in 0..config.trials {
                    out.push(Cell {
                        index: out.len() as u64,
                        p,
                        d,
                        family: family.clone(),
                        trial,
                    });
                }
            }
        }
    }
    out
}

fn build_set(cell: &Cell, seed: u64) -> anyhow::Result<PointSet> {
    let field = FieldSpec::new(cell.p)?;
    Ok(match &cell.family {
        Family::Random { alpha } => {
            let variety = (cell.p as u128).pow(cell.d as u32 - 1);
            let size = u128::from(alpha.ceil_pow(field.p())).min(variety);
            random_paraboloid_subset(&field, cell.d, size as usize, seed)?
        }
        Family::Construction { kind, k } => {
            let c = construct(*kind, &field, cell.d, k.resolve(&field), seed)?;
            c.verify()?;
            c.set
        }
        Family::Lines { lines, per_line } => slope_i_lines(&field, *lines, *per_line, seed)?,
    })
}

pub fn run_cell(cell: &Cell, global_seed: u64, timing: bool) -> SweepRow {
    let seed = cell_seed(global_seed, cell.index);
    let start = Instant::now();
    let mut row = SweepRow {
        p: cell.p,
        d: cell.d,
        family: cell.family.label(),
        trial: cell.trial,
        set_size: None,
        prod_size: None,
        ratio: None,
        d_energy: None,
        d_star: None,
        m_energy: None,
        t_nde: None,
        t_de: None,
        t_star: None,
        degenerate_pairs: None,
        runtime_ms: None,
        seed,
        error: None,
    };
    let result = build_set(cell, seed).and_then(|e| Ok(counts_report(&e)?));
    match result {
        Ok(c) => {
            row.set_size = Some(c.set_size);
            row.prod_size = Some(c.prod_size);
            row.ratio = Some(c.prod_size as f64 / cell.p as f64);
            row.d_energy = Some(c.d_energy);
            row.d_star = c.d_star;
            row.m_energy = Some(c.m_energy);
            row.t_nde = Some(c.t_nde);
            row.t_de = Some(c.t_de);
            row.t_star = Some(c.t_star);
            row.degenerate_pairs = Some(c.degenerate_pairs);
        }
        Err(e) => row.error = Some(format!("{e:#}")),
    }
    if timing {
        row.runtime_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    row
}

/// Runs every cell on a pool of `config.threads` workers. Rows come back in
/// cell order whatever the thread count.
pub fn run_sweep(config: &SweepConfig) -> anyhow::Result<Vec<SweepRow>> {
    config.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = config.threads {
        builder = builder.num_threads(t);
    }
    let pool = builder.build().context("building the worker pool")?;
    let cells = cells(config);
    Ok(pool.install(|| {
        cells
            .par_iter()
            .map(|c| run_cell(c, config.seed, config.timing))
            .collect()
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use paradot::bounds::Exponent;

    fn config(text: &str) -> SweepConfig {
        SweepConfig::parse(text).unwrap()
    }

    #[test]
    fn random_cell_size() {
        let rows = run_sweep(&config(
            r#"{"primes":[7],"dims":[3],"families":[{"family":"random","alpha":"4/3"}],"trials":1,"seed":42}"#,
        ))
        .unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].set_size, Some(14));
        assert!(rows[0].prod_size.unwrap() <= 7);
        assert!(rows[0].error.is_none());
        assert!(rows[0].runtime_ms.is_none());
    }

    #[test]
    fn trials_get_distinct_seeds() {
        let c = config(
            r#"{"primes":[11],"families":[{"family":"random","alpha":1}],"trials":2,"seed":3}"#,
        );
        let rows = run_sweep(&c).unwrap();
        assert_ne!(rows[0].seed, rows[1].seed);
        assert_eq!(rows, run_sweep(&c).unwrap());
    }

    #[test]
    fn lines_cell() {
        let rows = run_sweep(&config(
            r#"{"primes":[13,7],"families":[{"family":"lines","lines":2,"per_line":3}]}"#,
        ))
        .unwrap();
        assert!(rows[0].t_de.unwrap() >= 54);
        // p = 7 has no square root of −1; the cell records the failure
        assert!(rows[1].error.as_deref().unwrap().contains("p ≡ 1"));
        assert!(rows[1].set_size.is_none());
    }

    #[test]
    fn construction_cells() {
        let rows = run_sweep(&config(
            r#"{"primes":[7],"dims":[3,6],"families":[
                {"family":"construction","kind":"odd3mod4","k":3},
                {"family":"construction","kind":"even2mod4","k":3}]}"#,
        ))
        .unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].prod_size, Some(2));
        assert_eq!(rows[1].set_size, Some(147));
    }

    #[test]
    fn caps_at_variety_size() {
        let c = SweepConfig {
            families: vec![Family::Random {
                alpha: Exponent::Ratio(2, 1),
            }],
            ..config(r#"{"primes":[5],"families":[{"family":"random","alpha":1}]}"#)
        };
        let rows = run_sweep(&c).unwrap();
        assert_eq!(rows[0].set_size, Some(25));
    }
}
