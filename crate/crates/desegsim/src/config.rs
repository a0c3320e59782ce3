//! Run configuration and the flat `key=value` config file format.

use std::collections::HashMap;
use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::foundress::FoundressConfig;
use crate::segregation::HappinessRule;

#[derive(Debug, Clone, PartialEq)]
pub enum MapSource {
    /// Raster file in the canonical text format.
    Raster(PathBuf),
    /// Synthetic Voronoi partition, seeded from the run seed.
    Voronoi { width: usize, height: usize, regions: usize },
}

#[derive(Debug, Clone)]
pub struct SimConfig {
    pub map: MapSource,
    pub population: usize,
    pub pdtu: f64,
    pub segregation_threshold: f64,
    /// Probability that a seeded household is Expat.
    pub expat_bias: f64,
    pub rule: HappinessRule,
    pub nol: usize,
    pub fc: f64,
    pub pmutation: f64,
    pub cluster_radius: f64,
    pub radius_competition: f64,
    pub pif: f64,
    /// Leader-cycle period in ticks (IR); cycles fire at t % ir == 0.
    pub ir: u64,
    pub influence_duration: u64,
    pub max_ticks: u64,
    /// Consecutive zero-move ticks required to declare equilibrium.
    pub equilibrium_window: u64,
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            map: MapSource::Voronoi { width: 100, height: 100, regions: 54 },
            population: 5000,
            pdtu: 0.4,
            segregation_threshold: 0.4,
            expat_bias: 0.5,
            rule: HappinessRule::Reconciled,
            nol: 0,
            fc: 0.1,
            pmutation: 0.01,
            cluster_radius: 10.0,
            radius_competition: 50.0,
            pif: 0.1,
            ir: 5,
            influence_duration: 1,
            max_ticks: 200,
            equilibrium_window: 5,
            seed: 0,
        }
    }
}

impl SimConfig {
    pub fn foundress(&self) -> FoundressConfig {
        FoundressConfig {
            nol: self.nol,
            fc: self.fc,
            pmutation: self.pmutation,
            cluster_radius: self.cluster_radius,
            radius_competition: self.radius_competition,
            pif: self.pif,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let frac = |v: f64, name: &str| -> Result<()> {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::Usage(format!("{name} must be in [0, 1], got {v}")))
            }
        };
        frac(self.pdtu, "pdtu")?;
        frac(self.segregation_threshold, "segregation_threshold")?;
        frac(self.expat_bias, "expat_bias")?;
        frac(self.fc, "fc")?;
        frac(self.pmutation, "pmutation")?;
        frac(self.pif, "pif")?;
        if self.cluster_radius < 0.0 || self.radius_competition < 0.0 {
            return Err(Error::Usage("radii must be >= 0".into()));
        }
        if self.ir == 0 {
            return Err(Error::Usage("ir must be >= 1".into()));
        }
        if self.influence_duration == 0 {
            return Err(Error::Usage("influence_duration must be >= 1".into()));
        }
        if self.max_ticks == 0 {
            return Err(Error::Usage("max_ticks must be >= 1".into()));
        }
        if let MapSource::Voronoi { width, height, regions } = self.map {
            if regions == 0 || regions > width * height {
                return Err(Error::Usage("voronoi region count out of range".into()));
            }
        }
        Ok(())
    }

    /// Apply `key=value` entries from a config file. Unknown keys are errors;
    /// flags applied afterwards override file values.
    pub fn apply_file(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or(Error::Parse {
                line: lineno + 1,
                message: format!("expected key=value, got {line:?}"),
            })?;
            self.apply_kv(key.trim(), value.trim()).map_err(|e| Error::Parse {
                line: lineno + 1,
                message: e.to_string(),
            })?;
        }
        Ok(())
    }

    fn apply_kv(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |k: &str, v: &str| Error::Usage(format!("invalid value for {k}: {v:?}"));
        macro_rules! parse {
            ($t:ty) => {
                value.parse::<$t>().map_err(|_| bad(key, value))?
            };
        }
        match key {
            "map" => self.map = MapSource::Raster(PathBuf::from(value)),
            "voronoi" => self.map = parse_voronoi(value)?,
            "population" => self.population = parse!(usize),
            "pdtu" => self.pdtu = parse!(f64),
            "segregation_threshold" => self.segregation_threshold = parse!(f64),
            "expat_bias" => self.expat_bias = parse!(f64),
            "rule" => self.rule = parse_rule(value)?,
            "nol" => self.nol = parse!(usize),
            "fc" => self.fc = parse!(f64),
            "pmutation" => self.pmutation = parse!(f64),
            "cluster_radius" => self.cluster_radius = parse!(f64),
            "radius_competition" => self.radius_competition = parse!(f64),
            "pif" => self.pif = parse!(f64),
            "ir" => self.ir = parse!(u64),
            "influence_duration" => self.influence_duration = parse!(u64),
            "max_ticks" => self.max_ticks = parse!(u64),
            "equilibrium_window" => self.equilibrium_window = parse!(u64),
            "seed" => self.seed = parse!(u64),
            _ => return Err(Error::Usage(format!("unknown config key: {key}"))),
        }
        Ok(())
    }
}

/// `WIDTHxHEIGHT:REGIONS`, e.g. `100x100:54`.
pub fn parse_voronoi(spec: &str) -> Result<MapSource> {
    let err = || Error::Usage(format!("expected WIDTHxHEIGHT:REGIONS, got {spec:?}"));
    let (dims, regions) = spec.split_once(':').ok_or_else(err)?;
    let (w, h) = dims.split_once('x').ok_or_else(err)?;
    Ok(MapSource::Voronoi {
        width: w.parse().map_err(|_| err())?,
        height: h.parse().map_err(|_| err())?,
        regions: regions.parse().map_err(|_| err())?,
    })
}

pub fn parse_rule(name: &str) -> Result<HappinessRule> {
    match name {
        "base" => Ok(HappinessRule::Base),
        "literal-eq2" | "literal" => Ok(HappinessRule::LiteralEq2),
        "reconciled" => Ok(HappinessRule::Reconciled),
        _ => Err(Error::Usage(format!(
            "unknown happiness rule {name:?} (expected base | literal-eq2 | reconciled)"
        ))),
    }
}

pub fn rule_name(rule: HappinessRule) -> &'static str {
    match rule {
        HappinessRule::Base => "base",
        HappinessRule::LiteralEq2 => "literal-eq2",
        HappinessRule::Reconciled => "reconciled",
    }
}

/// Flag override map used by the CLI: key/value pairs applied after the file.
pub fn apply_overrides(cfg: &mut SimConfig, overrides: &HashMap<String, String>) -> Result<()> {
    for (k, v) in overrides {
        cfg.apply_kv(k, v)?;
    }
    Ok(())
}
