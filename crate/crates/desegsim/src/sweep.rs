//! Parameter-sweep harness: the full cross product of leader parameters,
//! replicated with derived seeds, replicates running in parallel with
//! deterministic output assembly.

use rayon::prelude::*;

use crate::config::SimConfig;
use crate::engine;
use crate::error::{Error, Result};
use crate::metrics::aggregate_run;
use crate::rng::replicate_seed;

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub nol: Vec<usize>,
    pub fc: Vec<f64>,
    pub ir: Vec<u64>,
    pub pif: Vec<f64>,
    pub replicates: usize,
    pub base: SimConfig,
    /// Ticks excluded from per-run index means.
    pub warmup: usize,
}

/// Sweep CSV header. Replicate rows leave the two std columns empty; each
/// cell is followed by one summary row (`replicate` = `summary`) carrying the
/// cross-replicate means and standard deviations.
pub const SWEEP_CSV_HEADER: &str =
    "nol,fc,ir,pif,replicate,mean_desegregation,mean_happiness,std_desegregation,std_happiness";

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.nol.is_empty() || self.fc.is_empty() || self.ir.is_empty() || self.pif.is_empty() {
            return Err(Error::Usage("all sweep value lists must be nonempty".into()));
        }
        if self.replicates == 0 {
            return Err(Error::Usage("replicates must be >= 1".into()));
        }
        for cell in self.cells() {
            cell.cfg.validate()?;
        }
        Ok(())
    }

    fn cells(&self) -> Vec<Cell> {
        let mut cells = Vec::new();
        let mut index = 0u64;
        for &nol in &self.nol {
            for &fc in &self.fc {
                for &ir in &self.ir {
                    for &pif in &self.pif {
                        let mut cfg = self.base.clone();
                        cfg.nol = nol;
                        cfg.fc = fc;
                        cfg.ir = ir;
                        cfg.pif = pif;
                        cells.push(Cell { index, cfg });
                        index += 1;
                    }
                }
            }
        }
        cells
    }
}

struct Cell {
    index: u64,
    cfg: SimConfig,
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Run the whole sweep and render the CSV (LF endings, 6 decimal places).
/// All cells are validated before any run starts.
///
/// ```
/// use desegsim::config::{MapSource, SimConfig};
/// use desegsim::sweep::{run_sweep, SweepSpec, SWEEP_CSV_HEADER};
///
/// let spec = SweepSpec {
///     nol: vec![0, 5],
///     fc: vec![0.2],
///     ir: vec![5],
///     pif: vec![0.1],
///     replicates: 2,
///     base: SimConfig {
///         map: MapSource::Voronoi { width: 30, height: 30, regions: 6 },
///         population: 300,
///         max_ticks: 8,
///         equilibrium_window: 0,
///         ..SimConfig::default()
///     },
///     warmup: 2,
/// };
/// let csv = run_sweep(&spec).unwrap();
/// let lines: Vec<&str> = csv.lines().collect();
/// assert_eq!(lines[0], SWEEP_CSV_HEADER);
/// // 2 cells x (2 replicates + 1 summary row)
/// assert_eq!(lines.len(), 1 + 2 * 3);
/// ```
pub fn run_sweep(spec: &SweepSpec) -> Result<String> {
    spec.validate()?;
    let cells = spec.cells();

    let jobs: Vec<(usize, u64)> = (0..cells.len())
        .flat_map(|c| (0..spec.replicates).map(move |k| (c, k as u64)))
        .collect();
    let results: Vec<Result<(f64, f64)>> = jobs
        .par_iter()
        .map(|&(c, k)| {
            let mut cfg = cells[c].cfg.clone();
            cfg.seed = replicate_seed(spec.base.seed, cells[c].index, k);
            let result = engine::run(&cfg)?;
            aggregate_run(&result.rows, spec.warmup.min(result.rows.len().saturating_sub(1)))
        })
        .collect();

    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for (c, cell) in cells.iter().enumerate() {
        let cfg = &cell.cfg;
        let mut ds = Vec::with_capacity(spec.replicates);
        let mut hs = Vec::with_capacity(spec.replicates);
        for k in 0..spec.replicates {
            let (d, h) = match &results[c * spec.replicates + k] {
                Ok(v) => *v,
                Err(e) => return Err(Error::Validation(format!("cell {c} replicate {k}: {e}"))),
            };
            ds.push(d);
            hs.push(h);
            out.push_str(&format!(
                "{},{:.6},{},{:.6},{},{:.6},{:.6},,\n",
                cfg.nol, cfg.fc, cfg.ir, cfg.pif, k, d, h
            ));
        }
        let (md, sd) = mean_std(&ds);
        let (mh, sh) = mean_std(&hs);
        out.push_str(&format!(
            "{},{:.6},{},{:.6},summary,{:.6},{:.6},{:.6},{:.6}\n",
            cfg.nol, cfg.fc, cfg.ir, cfg.pif, md, mh, sd, sh
        ));
    }
    Ok(out)
}
