//! Artificial ant colonies foraging on grayscale image habitats.
//!
//! Ants move across a toroidal image lattice with a directional bias and a
//! saturating attraction to pheromone, depositing pheromone in proportion to
//! local gray-level contrast. The emergent pheromone maps trace image edges
//! and can be fed into an immersion watershed segmenter in place of a
//! morphological gradient. Both a fixed-size swarm and a self-regulated
//! varying-size swarm (energy, death, reproduction) are provided, plus an
//! experiment harness with deterministic, re-runnable artifacts.

pub mod cli;
pub mod error;
pub mod experiment;
pub mod habitat;
pub mod swarm;
pub mod vps;
pub mod watershed;

pub use error::{Error, Result};
pub use experiment::{ExperimentConfig, HabitatSource, Mode, Polarity, RunArtifacts};
pub use habitat::{CellCoord, ContrastStat, GrayImage, SyntheticKind, SyntheticSpec};
pub use swarm::{
    Ant, Colony, DirectionalBias, EvapMode, Heading, MoveCandidate, PheromoneField, StepReport,
    SwarmParams,
};
pub use vps::{VpsParams, VpsStepReport};
pub use watershed::{Connectivity, LabelMap, ReliefImage, SegmentSource};
