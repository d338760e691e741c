//! Command-line front end; converts flags into an [`ExperimentConfig`].
//!
//! Exit codes: 0 success, 1 usage error, 2 runtime failure.

use std::path::PathBuf;

use clap::{ArgGroup, Parser};

use crate::error::{Error, Result};
use crate::experiment::{
    ExperimentConfig, HabitatSource, Mode, Polarity, RegionSpec, SegmentChoice,
};
use crate::habitat::SyntheticSpec;
use crate::swarm::{EvapMode, SwarmParams};
use crate::vps::VpsParams;

#[derive(Debug, Parser)]
#[command(
    name = "pherogrid",
    version,
    about = "Ant-colony foraging on grayscale image habitats: pheromone maps, \
             population dynamics and watershed segmentation",
    group(ArgGroup::new("habitat").required(true).args(["image", "synthetic"])),
    group(ArgGroup::new("habitat_b").args(["image_b", "synthetic_b", "rotate_b"]))
)]
pub struct Cli {
    /// Engine: fixed (sfps) or self-regulated varying (svps) population size.
    #[arg(long, default_value = "sfps")]
    mode: String,

    /// Habitat image, PGM (P5 or P2).
    #[arg(long, value_name = "PATH")]
    image: Option<PathBuf>,

    /// Synthetic habitat, e.g. cross:100x100:arm=20, checkerboard:64x64:tile=8,
    /// two_blob:64x64:r=8, ramp:256x8. Cross accepts len=,cx=,cy= extras.
    #[arg(long, value_name = "KIND:WxH:PARAMS")]
    synthetic: Option<String>,

    /// Second habitat swapped in at --swap-t.
    #[arg(long = "image-b", value_name = "PATH")]
    image_b: Option<PathBuf>,

    /// Synthetic second habitat.
    #[arg(long = "synthetic-b", value_name = "KIND:WxH:PARAMS")]
    synthetic_b: Option<String>,

    /// Use the 180-degree rotation of the first habitat as the second.
    #[arg(long = "rotate-b")]
    rotate_b: bool,

    /// Step after which the habitat is replaced by the second one.
    #[arg(long = "swap-t", value_name = "STEP")]
    swap_t: Option<u64>,

    /// Total generations to run.
    #[arg(long, default_value_t = 500)]
    steps: u64,

    /// Random seed; equal seeds reproduce runs bit-exactly.
    #[arg(long, default_value_t = 1)]
    seed: u64,

    /// Osmotropotaxic sensitivity (pheromone-following strength).
    #[arg(long, default_value_t = 3.5)]
    beta: f64,

    /// Sensory-capacity parameter; perception saturates at 1/delta.
    #[arg(long, default_value_t = 0.2)]
    delta: f64,

    /// Base pheromone deposit per move.
    #[arg(long, default_value_t = 0.07)]
    eta: f64,

    /// Evaporation constant K.
    #[arg(long, default_value_t = 1.0)]
    evap: f64,

    /// Evaporation mode: multiplicative_percent or subtractive.
    #[arg(long = "evap-mode", default_value = "multiplicative_percent")]
    evap_mode: String,

    /// Contrast gain of the pheromone deposit.
    #[arg(long, default_value_t = 1.5)]
    p: f64,

    /// Initial population as a fraction of the cell count.
    #[arg(long = "s-frac", default_value_t = 0.30)]
    s_frac: f64,

    /// Exact initial population (overrides --s-frac).
    #[arg(long, value_name = "N")]
    count: Option<usize>,

    /// Energy decay per generation (svps).
    #[arg(long, default_value_t = 0.025)]
    alpha: f64,

    /// Reproduction floor (svps).
    #[arg(long, default_value_t = 0.1)]
    mu: f64,

    /// Comma-separated snapshot steps; default 20,100,250,500 clipped to --steps.
    #[arg(long, value_name = "T1,T2,...")]
    snapshots: Option<String>,

    /// Output directory for all artifacts.
    #[arg(long, default_value = "out")]
    out: PathBuf,

    /// Segment the final state: none, classical or pheromone.
    #[arg(long, default_value = "none")]
    segment: String,

    /// Pheromone map rendering: bright_edges or paper_inverted.
    #[arg(long, default_value = "bright_edges")]
    polarity: String,

    /// Region for per-step occupancy metrics: rect:x,y,w,h or band:R[:a|b].
    #[arg(long, value_name = "SPEC")]
    region: Option<String>,

    /// Averaging window (steps) for the mean-population summary.
    #[arg(long = "pop-window", default_value_t = 100)]
    pop_window: u64,
}

impl Cli {
    pub fn into_config(self) -> Result<ExperimentConfig> {
        let habitat_a = match (&self.image, &self.synthetic) {
            (Some(path), None) => HabitatSource::Pgm(path.clone()),
            (None, Some(spec)) => HabitatSource::Synthetic(SyntheticSpec::parse(spec)?),
            _ => return Err(Error::Config("exactly one of --image/--synthetic".into())),
        };
        let habitat_b = match (&self.image_b, &self.synthetic_b, self.rotate_b) {
            (None, None, false) => None,
            (Some(path), None, false) => Some(HabitatSource::Pgm(path.clone())),
            (None, Some(spec), false) => {
                Some(HabitatSource::Synthetic(SyntheticSpec::parse(spec)?))
            }
            (None, None, true) => Some(HabitatSource::Rotate180OfA),
            _ => {
                return Err(Error::Config(
                    "at most one of --image-b/--synthetic-b/--rotate-b".into(),
                ))
            }
        };
        let snapshot_ts = match &self.snapshots {
            Some(list) => {
                let parsed: std::result::Result<Vec<u64>, _> =
                    list.split(',').filter(|s| !s.is_empty()).map(|s| s.trim().parse()).collect();
                parsed.map_err(|_| {
                    Error::Config(format!("--snapshots '{list}' is not a comma list of steps"))
                })?
            }
            None => ExperimentConfig::default_snapshots(self.steps),
        };
        let metrics_region = match &self.region {
            Some(spec) => Some(RegionSpec::parse(spec)?),
            None => None,
        };
        let config = ExperimentConfig {
            mode: Mode::parse(&self.mode)?,
            habitat_a,
            habitat_b,
            swap_t: self.swap_t,
            steps: self.steps,
            snapshot_ts,
            swarm: SwarmParams {
                beta: self.beta,
                delta: self.delta,
                eta: self.eta,
                p: self.p,
                evap: self.evap,
                evap_mode: EvapMode::parse(&self.evap_mode)?,
                s_frac: self.s_frac,
                seed: self.seed,
            },
            vps: VpsParams {
                alpha: self.alpha,
                mu: self.mu,
                ..VpsParams::default()
            },
            out_dir: self.out,
            metrics_region,
            segment: SegmentChoice::parse(&self.segment)?,
            polarity: Polarity::parse(&self.polarity)?,
            pop_window: self.pop_window,
            count_override: self.count,
        };
        config.validate()?;
        Ok(config)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::error::ErrorKind;

    fn parse(args: &[&str]) -> std::result::Result<Cli, clap::Error> {
        Cli::try_parse_from(std::iter::once("pherogrid").chain(args.iter().copied()))
    }

    #[test]
    fn no_args_is_usage_error() {
        let err = parse(&[]).unwrap_err();
        assert_eq!(err.kind(), ErrorKind::MissingRequiredArgument);
    }

    #[test]
    fn defaults_match_published_parameters() {
        let cli = parse(&[
            "--synthetic",
            "cross:100x100:arm=20",
            "--mode",
            "svps",
            "--steps",
            "500",
            "--seed",
            "7",
        ])
        .unwrap();
        let config = cli.into_config().unwrap();
        assert_eq!(config.mode, Mode::Svps);
        assert_eq!(config.swarm.beta, 3.5);
        assert_eq!(config.swarm.delta, 0.2);
        assert_eq!(config.swarm.eta, 0.07);
        assert_eq!(config.swarm.evap, 1.0);
        assert_eq!(config.swarm.evap_mode, EvapMode::MultiplicativePercent);
        assert_eq!(config.swarm.p, 1.5);
        assert_eq!(config.swarm.s_frac, 0.30);
        assert_eq!(config.swarm.seed, 7);
        assert_eq!(config.vps.alpha, 0.025);
        assert_eq!(config.vps.mu, 0.1);
        assert_eq!(config.steps, 500);
        assert_eq!(config.snapshot_ts, vec![20, 100, 250, 500]);
    }

    #[test]
    fn swap_after_end_is_rejected() {
        let cli = parse(&[
            "--synthetic",
            "cross:100x100:arm=20",
            "--rotate-b",
            "--swap-t",
            "600",
            "--steps",
            "500",
        ])
        .unwrap();
        assert!(cli.into_config().is_err());
    }

    #[test]
    fn unknown_flag_is_usage_error() {
        let err = parse(&["--synthetic", "ramp:16x8", "--bogus"]).unwrap_err();
        assert_eq!(err.kind(), ErrorKind::UnknownArgument);
    }

    #[test]
    fn image_and_synthetic_conflict() {
        let err = parse(&["--image", "a.pgm", "--synthetic", "ramp:16x8"]).unwrap_err();
        assert_eq!(err.kind(), ErrorKind::ArgumentConflict);
    }

    #[test]
    fn bad_enum_values_are_config_errors() {
        let cli = parse(&["--synthetic", "ramp:16x8", "--segment", "fancy"]).unwrap();
        assert!(cli.into_config().is_err());
        let cli = parse(&["--synthetic", "ramp:16x8", "--polarity", "dark"]).unwrap();
        assert!(cli.into_config().is_err());
        let cli = parse(&["--synthetic", "ramp:16x8", "--evap-mode", "wat"]).unwrap();
        assert!(cli.into_config().is_err());
        let cli = parse(&["--synthetic", "ramp:16x8", "--mode", "both"]).unwrap();
        assert!(cli.into_config().is_err());
    }

    #[test]
    fn region_specs_parse() {
        let cli =
            parse(&["--synthetic", "cross:32x32:arm=6", "--region", "rect:0,0,10,10"]).unwrap();
        assert!(cli.into_config().is_ok());
        let cli = parse(&[
            "--synthetic",
            "cross:32x32:arm=6",
            "--rotate-b",
            "--swap-t",
            "100",
            "--region",
            "band:2:b",
        ])
        .unwrap();
        let config = cli.into_config().unwrap();
        assert_eq!(
            config.metrics_region,
            Some(RegionSpec::EdgeBand { radius: 2, of_b: true })
        );
    }
}
