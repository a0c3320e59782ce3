//! Two-layer lattice model of residential segregation.
//!
//! A *physical layer* of household agents relocates Schelling-style on a
//! region-partitioned grid, while a *virtual layer* of group leaders evolves
//! through nest founding, fights and group competition, periodically stamping
//! influence discs that modulate the households' happiness rule.
//!
//! Everything is driven by a single 64-bit seed; identical configurations
//! produce identical runs on any host.
//!
//! ```
//! use desegsim::config::{MapSource, SimConfig};
//! use desegsim::engine;
//!
//! let cfg = SimConfig {
//!     map: MapSource::Voronoi { width: 40, height: 40, regions: 9 },
//!     population: 600,
//!     nol: 0,
//!     max_ticks: 100,
//!     seed: 7,
//!     ..SimConfig::default()
//! };
//! let result = engine::run(&cfg).unwrap();
//! assert!(!result.rows.is_empty());
//! ```

pub mod cli;
pub mod config;
pub mod engine;
pub mod error;
pub mod foundress;
pub mod lattice;
pub mod mapgen;
pub mod metrics;
pub mod rng;
pub mod segregation;
pub mod sweep;

pub use error::Error;
