//! Experiment harness: static runs, dynamic habitat swaps, snapshot and CSV
//! artifacts, histograms, occupancy metrics and optional segmentation.
//!
//! Every run writes a `manifest.txt` of `key = value` lines that suffices to
//! reproduce all artifacts bit-exactly.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::habitat::{CellCoord, GrayImage, SyntheticSpec};
use crate::swarm::{Colony, EvapMode, PheromoneField, SwarmParams};
use crate::vps::{self, VpsParams};
use crate::watershed::{self, Connectivity, LabelMap, SegmentSource};

/// Which engine steps the colony.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Sfps,
    Svps,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Sfps => "sfps",
            Mode::Svps => "svps",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "sfps" => Ok(Mode::Sfps),
            "svps" => Ok(Mode::Svps),
            other => Err(Error::Config(format!("mode '{other}' is not sfps or svps"))),
        }
    }
}

/// Where a habitat image comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum HabitatSource {
    Pgm(PathBuf),
    Synthetic(SyntheticSpec),
    /// Habitat B only: the 180-degree rotation of habitat A.
    Rotate180OfA,
}

impl HabitatSource {
    pub fn parse(s: &str) -> Result<Self> {
        if let Some(path) = s.strip_prefix("pgm:") {
            Ok(HabitatSource::Pgm(PathBuf::from(path)))
        } else if let Some(spec) = s.strip_prefix("synthetic:") {
            Ok(HabitatSource::Synthetic(SyntheticSpec::parse(spec)?))
        } else if s == "rotate180" {
            Ok(HabitatSource::Rotate180OfA)
        } else {
            Err(Error::Config(format!("habitat source '{s}' not recognized")))
        }
    }
}

impl std::fmt::Display for HabitatSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            HabitatSource::Pgm(p) => write!(f, "pgm:{}", p.display()),
            HabitatSource::Synthetic(s) => write!(f, "synthetic:{s}"),
            HabitatSource::Rotate180OfA => write!(f, "rotate180"),
        }
    }
}

/// Cell set for occupancy metrics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionSpec {
    /// Axis-aligned rectangle (x, y, w, h).
    Rect { x: usize, y: usize, w: usize, h: usize },
    /// Cells within Chebyshev `radius` of the gray-level edges of habitat A
    /// (`of_b = false`) or habitat B (`of_b = true`).
    EdgeBand { radius: usize, of_b: bool },
}

impl RegionSpec {
    pub fn parse(s: &str) -> Result<Self> {
        let bad = |m: String| Error::Config(m);
        if let Some(rest) = s.strip_prefix("rect:") {
            let parts: Vec<&str> = rest.split(',').collect();
            if parts.len() != 4 {
                return Err(bad(format!("rect region '{s}' must be rect:x,y,w,h")));
            }
            let nums: std::result::Result<Vec<usize>, _> =
                parts.iter().map(|p| p.parse::<usize>()).collect();
            let nums = nums.map_err(|_| bad(format!("rect region '{s}' has a bad number")))?;
            Ok(RegionSpec::Rect { x: nums[0], y: nums[1], w: nums[2], h: nums[3] })
        } else if let Some(rest) = s.strip_prefix("band:") {
            let (r_s, which) = match rest.split_once(':') {
                Some((r, which)) => (r, which),
                None => (rest, "a"),
            };
            let radius: usize =
                r_s.parse().map_err(|_| bad(format!("band radius '{r_s}' not an integer")))?;
            let of_b = match which {
                "a" => false,
                "b" => true,
                other => return Err(bad(format!("band habitat '{other}' is not a or b"))),
            };
            Ok(RegionSpec::EdgeBand { radius, of_b })
        } else {
            Err(bad(format!("region '{s}' must start with rect: or band:")))
        }
    }
}

impl std::fmt::Display for RegionSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RegionSpec::Rect { x, y, w, h } => write!(f, "rect:{x},{y},{w},{h}"),
            RegionSpec::EdgeBand { radius, of_b } => {
                write!(f, "band:{radius}:{}", if *of_b { "b" } else { "a" })
            }
        }
    }
}

/// Rendering polarity for pheromone maps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Polarity {
    /// High pheromone renders bright.
    #[default]
    BrightEdges,
    /// Inverted rendering: pheromone-free cells show as level 255.
    PaperInverted,
}

impl Polarity {
    pub fn as_str(&self) -> &'static str {
        match self {
            Polarity::BrightEdges => "bright_edges",
            Polarity::PaperInverted => "paper_inverted",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "bright_edges" => Ok(Polarity::BrightEdges),
            "paper_inverted" => Ok(Polarity::PaperInverted),
            other => Err(Error::Config(format!(
                "polarity '{other}' is not bright_edges or paper_inverted"
            ))),
        }
    }
}

/// Optional end-of-run segmentation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SegmentChoice {
    #[default]
    None,
    Classical,
    Pheromone,
}

impl SegmentChoice {
    pub fn as_str(&self) -> &'static str {
        match self {
            SegmentChoice::None => "none",
            SegmentChoice::Classical => "classical",
            SegmentChoice::Pheromone => "pheromone",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(SegmentChoice::None),
            "classical" => Ok(SegmentChoice::Classical),
            "pheromone" => Ok(SegmentChoice::Pheromone),
            other => Err(Error::Config(format!(
                "segment '{other}' is not none, classical or pheromone"
            ))),
        }
    }
}

/// Everything a run needs; serialized into the manifest.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub habitat_a: HabitatSource,
    pub habitat_b: Option<HabitatSource>,
    pub swap_t: Option<u64>,
    pub steps: u64,
    pub snapshot_ts: Vec<u64>,
    pub swarm: SwarmParams,
    pub vps: VpsParams,
    pub out_dir: PathBuf,
    pub metrics_region: Option<RegionSpec>,
    pub segment: SegmentChoice,
    pub polarity: Polarity,
    /// Averaging window (in steps, from the end of the run) for the mean
    /// population summary.
    pub pop_window: u64,
    /// Exact initial population, overriding s_frac.
    pub count_override: Option<usize>,
}

impl ExperimentConfig {
    /// Default snapshot timestamps, clipped to the run length.
    pub fn default_snapshots(steps: u64) -> Vec<u64> {
        [20u64, 100, 250, 500].into_iter().filter(|&t| t >= 1 && t <= steps).collect()
    }

    pub fn validate(&self) -> Result<()> {
        self.swarm.validate()?;
        if self.mode == Mode::Svps {
            self.vps.validate()?;
        }
        match (self.swap_t, &self.habitat_b) {
            (Some(t), Some(_)) => {
                if t >= self.steps {
                    return Err(Error::Config(format!(
                        "swap_t {t} must be below steps {}",
                        self.steps
                    )));
                }
                if t == 0 {
                    return Err(Error::Config("swap_t must be at least 1".into()));
                }
            }
            (Some(_), None) => {
                return Err(Error::Config("swap_t given without a second habitat".into()))
            }
            (None, Some(_)) => {
                return Err(Error::Config("second habitat given without swap_t".into()))
            }
            (None, None) => {}
        }
        if matches!(self.habitat_a, HabitatSource::Rotate180OfA) {
            return Err(Error::Config("habitat_a cannot be rotate180".into()));
        }
        for &t in &self.snapshot_ts {
            if t < 1 || t > self.steps {
                return Err(Error::Config(format!(
                    "snapshot step {t} outside 1..={}",
                    self.steps
                )));
            }
        }
        if self.pop_window == 0 {
            return Err(Error::Config("pop_window must be at least 1".into()));
        }
        Ok(())
    }
}

/// Paths and summary numbers produced by a run.
#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub out_dir: PathBuf,
    pub manifest_path: PathBuf,
    pub csv_path: Option<PathBuf>,
    pub histogram_path: Option<PathBuf>,
    pub snapshot_pgms: Vec<PathBuf>,
    pub snapshot_dumps: Vec<PathBuf>,
    pub labels_pgm: Option<PathBuf>,
    pub labels_csv: Option<PathBuf>,
    /// Population at the start of each executed step.
    pub populations: Vec<usize>,
    pub final_population: usize,
    pub mean_population_pct: f64,
    pub cumulative_ant_steps: u64,
    pub extinct: bool,
    pub basin_count: Option<u32>,
}

/// Linear rendering of a pheromone field to 8 bits. An all-zero field maps
/// to an all-zero image; `PaperInverted` flips values so pheromone-free
/// cells show as 255.
pub fn render_pheromone(field: &PheromoneField, polarity: Polarity) -> GrayImage {
    let max = field.max();
    let pixels: Vec<u8> = field
        .sigma()
        .iter()
        .map(|&s| {
            let v = if max > 0.0 { (255.0 * s / max).round() as u8 } else { 0 };
            match polarity {
                Polarity::BrightEdges => v,
                Polarity::PaperInverted => 255 - v,
            }
        })
        .collect();
    GrayImage::from_pixels(field.width(), field.height(), pixels)
        .expect("field dimensions are valid")
}

/// Exact gray-level histogram; counts sum to the pixel count.
pub fn gray_histogram(img: &GrayImage) -> [u64; 256] {
    let mut counts = [0u64; 256];
    for &p in img.pixels() {
        counts[p as usize] += 1;
    }
    counts
}

/// Occupancy of a region, as a fraction of the whole population.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionOccupancy {
    pub fraction: f64,
    /// True when the population is extinct (fraction reported as 0).
    pub extinct: bool,
}

/// Fraction of live ants standing inside the region mask.
pub fn region_occupancy(colony: &Colony, region: &[bool]) -> RegionOccupancy {
    let total = colony.population();
    if total == 0 {
        return RegionOccupancy { fraction: 0.0, extinct: true };
    }
    let width = colony.habitat().width();
    let inside = colony
        .ants()
        .iter()
        .filter(|a| region[a.pos.y * width + a.pos.x])
        .count();
    RegionOccupancy { fraction: inside as f64 / total as f64, extinct: false }
}

/// Cells whose gray level differs from at least one 4-neighbor (toroidal):
/// the outline of the image's regions, one cell thick on each side.
pub fn edge_mask(img: &GrayImage) -> Vec<bool> {
    let (w, h) = (img.width(), img.height());
    let mut mask = vec![false; w * h];
    for y in 0..h {
        for x in 0..w {
            let v = img.get(CellCoord::new(x, y));
            let differs = [(0i64, -1i64), (1, 0), (0, 1), (-1, 0)]
                .iter()
                .any(|&(dx, dy)| img.get(img.wrap(x as i64 + dx, y as i64 + dy)) != v);
            mask[y * w + x] = differs;
        }
    }
    mask
}

/// Dilates a mask by Chebyshev `radius` on the torus.
pub fn dilate_mask(mask: &[bool], width: usize, height: usize, radius: usize) -> Vec<bool> {
    let r = radius as i64;
    let mut out = vec![false; width * height];
    for y in 0..height as i64 {
        for x in 0..width as i64 {
            if !mask[y as usize * width + x as usize] {
                continue;
            }
            for dy in -r..=r {
                for dx in -r..=r {
                    let nx = (x + dx).rem_euclid(width as i64) as usize;
                    let ny = (y + dy).rem_euclid(height as i64) as usize;
                    out[ny * width + nx] = true;
                }
            }
        }
    }
    out
}

/// Plain-text matrix dump: one row per line, decimal reals.
pub fn field_dump_text(field: &PheromoneField) -> String {
    let mut out = String::new();
    for y in 0..field.height() {
        for x in 0..field.width() {
            if x > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{}", field.get(CellCoord::new(x, y)));
        }
        out.push('\n');
    }
    out
}

fn resolve_habitat(source: &HabitatSource, first: Option<&GrayImage>) -> Result<GrayImage> {
    match source {
        HabitatSource::Pgm(path) => GrayImage::load_pgm_file(path),
        HabitatSource::Synthetic(spec) => spec.build(),
        HabitatSource::Rotate180OfA => {
            let a = first.ok_or_else(|| {
                Error::Config("rotate180 habitat needs habitat_a resolved first".into())
            })?;
            Ok(a.rotate180())
        }
    }
}

fn resolve_region(
    spec: &RegionSpec,
    habitat_a: &GrayImage,
    habitat_b: Option<&GrayImage>,
) -> Result<Vec<bool>> {
    let (w, h) = (habitat_a.width(), habitat_a.height());
    match *spec {
        RegionSpec::Rect { x, y, w: rw, h: rh } => {
            if rw == 0 || rh == 0 || x + rw > w || y + rh > h {
                return Err(Error::Config(format!(
                    "region rect {x},{y},{rw},{rh} does not fit {w}x{h}"
                )));
            }
            let mut mask = vec![false; w * h];
            for yy in y..y + rh {
                for xx in x..x + rw {
                    mask[yy * w + xx] = true;
                }
            }
            Ok(mask)
        }
        RegionSpec::EdgeBand { radius, of_b } => {
            let img = if of_b {
                habitat_b.ok_or_else(|| {
                    Error::Config("band:..:b region needs a second habitat".into())
                })?
            } else {
                habitat_a
            };
            Ok(dilate_mask(&edge_mask(img), w, h, radius))
        }
    }
}

/// Runs one experiment to completion, writing all artifacts under
/// `config.out_dir`. On failure a `FAILED` marker with the error text is
/// left in the directory.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunArtifacts> {
    std::fs::create_dir_all(&config.out_dir)?;
    match run_inner(config) {
        Ok(artifacts) => Ok(artifacts),
        Err(e) => {
            let marker = config.out_dir.join("FAILED");
            let _ = std::fs::write(&marker, format!("{e}\n"));
            Err(e)
        }
    }
}

fn run_inner(config: &ExperimentConfig) -> Result<RunArtifacts> {
    config.validate()?;
    let habitat_a = resolve_habitat(&config.habitat_a, None)?;
    let habitat_b = match &config.habitat_b {
        Some(src) => {
            let img = resolve_habitat(src, Some(&habitat_a))?;
            if img.width() != habitat_a.width() || img.height() != habitat_a.height() {
                return Err(Error::DimensionMismatch {
                    expected_w: habitat_a.width(),
                    expected_h: habitat_a.height(),
                    got_w: img.width(),
                    got_h: img.height(),
                });
            }
            Some(img)
        }
        None => None,
    };
    let region_mask = match &config.metrics_region {
        Some(spec) => Some(resolve_region(spec, &habitat_a, habitat_b.as_ref())?),
        None => None,
    };

    let initial_energy = match config.mode {
        Mode::Sfps => 1.0,
        Mode::Svps => vps::initial_energy(&config.vps),
    };
    let mut colony = Colony::init(
        habitat_a,
        config.swarm.clone(),
        config.count_override,
        initial_energy,
    )?;

    let out = &config.out_dir;
    let mut snapshot_pgms = Vec::new();
    let mut snapshot_dumps = Vec::new();
    let write_snapshot = |colony: &Colony, t: u64| -> Result<(PathBuf, PathBuf)> {
        let pgm = out.join(format!("pheromone_t{t:05}.pgm"));
        render_pheromone(colony.field(), config.polarity).save_pgm_file(&pgm)?;
        let txt = out.join(format!("pheromone_t{t:05}.txt"));
        std::fs::write(&txt, field_dump_text(colony.field()))?;
        Ok((pgm, txt))
    };

    // Initial snapshot is always written.
    let (pgm, txt) = write_snapshot(&colony, 0)?;
    snapshot_pgms.push(pgm);
    snapshot_dumps.push(txt);

    let csv_path = if config.steps > 0 { Some(out.join("steps.csv")) } else { None };
    let mut csv = match &csv_path {
        Some(path) => {
            let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
            let mut header = match config.mode {
                Mode::Sfps => String::from("t,population,moved,total_deposit,max_delta_gl"),
                Mode::Svps => String::from("t,population,births,deaths,mean_energy"),
            };
            if region_mask.is_some() {
                header.push_str(",region_occupancy");
            }
            writeln!(w, "{header}")?;
            Some(w)
        }
        None => None,
    };

    let mut populations = Vec::with_capacity(config.steps as usize);
    let mut cumulative_ant_steps = 0u64;
    for t in 1..=config.steps {
        let pop_before = colony.population();
        populations.push(pop_before);
        cumulative_ant_steps += pop_before as u64;

        let mut row = match config.mode {
            Mode::Sfps => {
                let r = colony.step_sfps();
                format!(
                    "{},{},{},{},{}",
                    r.t, r.population, r.moved, r.total_deposit, r.max_delta_gl
                )
            }
            Mode::Svps => {
                let r = colony.step_svps(&config.vps);
                format!(
                    "{},{},{},{},{}",
                    r.t, r.population, r.births, r.deaths, r.mean_energy
                )
            }
        };
        if let Some(mask) = &region_mask {
            let occ = region_occupancy(&colony, mask);
            let _ = write!(row, ",{}", occ.fraction);
        }
        if let Some(w) = csv.as_mut() {
            writeln!(w, "{row}")?;
        }

        if config.snapshot_ts.contains(&t) {
            let (pgm, txt) = write_snapshot(&colony, t)?;
            snapshot_pgms.push(pgm);
            snapshot_dumps.push(txt);
        }

        // The habitat is replaced the moment step swap_t completes; the
        // pheromone field, ants, energies and the contrast maximum persist.
        if config.swap_t == Some(t) {
            colony.swap_habitat(habitat_b.clone().expect("validated with swap_t"))?;
        }
    }
    if let Some(w) = csv.as_mut() {
        w.flush()?;
    }
    drop(csv);

    // Final rendered histogram (skipped for zero-step runs).
    let histogram_path = if config.steps > 0 {
        let rendered = render_pheromone(colony.field(), config.polarity);
        let counts = gray_histogram(&rendered);
        let mut text = String::from("level,count\n");
        for (level, count) in counts.iter().enumerate() {
            let _ = writeln!(text, "{level},{count}");
        }
        let path = out.join("histogram.csv");
        std::fs::write(&path, text)?;
        Some(path)
    } else {
        None
    };

    // Optional segmentation of the final state.
    let (labels_pgm, labels_csv, basin_count) = match config.segment {
        SegmentChoice::None => (None, None, None),
        choice => {
            let source = match choice {
                SegmentChoice::Classical => SegmentSource::Classical,
                SegmentChoice::Pheromone => SegmentSource::Pheromone,
                SegmentChoice::None => unreachable!(),
            };
            let map: LabelMap = watershed::segment(
                colony.habitat(),
                source,
                Some(colony.field()),
                Connectivity::Eight,
            )?;
            let pgm = out.join("labels.pgm");
            std::fs::write(&pgm, map.to_pgm_bytes())?;
            let csv = out.join("labels.csv");
            std::fs::write(&csv, map.to_csv())?;
            (Some(pgm), Some(csv), Some(map.basin_count()))
        }
    };

    let cells = (colony.habitat().width() * colony.habitat().height()) as f64;
    let final_population = colony.population();
    let mean_population_pct = if populations.is_empty() {
        100.0 * final_population as f64 / cells
    } else {
        let window = (config.pop_window as usize).min(populations.len());
        let tail = &populations[populations.len() - window..];
        100.0 * tail.iter().sum::<usize>() as f64 / window as f64 / cells
    };
    let extinct = final_population == 0;

    let manifest_path = out.join("manifest.txt");
    let results = ManifestResults {
        final_population,
        mean_population_pct,
        cumulative_ant_steps,
        extinct,
        basin_count,
    };
    std::fs::write(&manifest_path, manifest_text(config, Some(&results)))?;

    Ok(RunArtifacts {
        out_dir: out.clone(),
        manifest_path,
        csv_path,
        histogram_path,
        snapshot_pgms,
        snapshot_dumps,
        labels_pgm,
        labels_csv,
        populations,
        final_population,
        mean_population_pct,
        cumulative_ant_steps,
        extinct,
        basin_count,
    })
}

struct ManifestResults {
    final_population: usize,
    mean_population_pct: f64,
    cumulative_ant_steps: u64,
    extinct: bool,
    basin_count: Option<u32>,
}

fn manifest_text(config: &ExperimentConfig, results: Option<&ManifestResults>) -> String {
    let mut m = String::new();
    let mut kv = |k: &str, v: String| {
        let _ = writeln!(m, "{k} = {v}");
    };
    kv("mode", config.mode.as_str().to_string());
    kv("habitat_a", config.habitat_a.to_string());
    if let Some(b) = &config.habitat_b {
        kv("habitat_b", b.to_string());
    }
    if let Some(t) = config.swap_t {
        kv("swap_t", t.to_string());
    }
    kv("steps", config.steps.to_string());
    kv("seed", config.swarm.seed.to_string());
    kv("beta", config.swarm.beta.to_string());
    kv("delta", config.swarm.delta.to_string());
    kv("eta", config.swarm.eta.to_string());
    kv("p", config.swarm.p.to_string());
    kv("evap", config.swarm.evap.to_string());
    kv("evap_mode", config.swarm.evap_mode.as_str().to_string());
    kv("s_frac", config.swarm.s_frac.to_string());
    kv("alpha", config.vps.alpha.to_string());
    kv("mu", config.vps.mu.to_string());
    kv(
        "w_n",
        config
            .vps
            .w_n
            .iter()
            .map(|w| w.to_string())
            .collect::<Vec<_>>()
            .join(","),
    );
    kv(
        "snapshots",
        config
            .snapshot_ts
            .iter()
            .map(|t| t.to_string())
            .collect::<Vec<_>>()
            .join(","),
    );
    kv("segment", config.segment.as_str().to_string());
    kv("polarity", config.polarity.as_str().to_string());
    kv("pop_window", config.pop_window.to_string());
    if let Some(region) = &config.metrics_region {
        kv("region", region.to_string());
    }
    if let Some(count) = config.count_override {
        kv("count_override", count.to_string());
    }
    if let Some(r) = results {
        kv("result_final_population", r.final_population.to_string());
        kv("result_mean_population_pct", r.mean_population_pct.to_string());
        kv("result_cumulative_ant_steps", r.cumulative_ant_steps.to_string());
        kv("result_extinct", r.extinct.to_string());
        if let Some(b) = r.basin_count {
            kv("result_basin_count", b.to_string());
        }
    }
    m
}

/// Serializes a config as manifest text (without result lines).
pub fn config_to_manifest(config: &ExperimentConfig) -> String {
    manifest_text(config, None)
}

/// Rebuilds a config from manifest text; `result_*` lines are ignored.
/// `out_dir` is taken from the argument since re-runs target a fresh
/// directory.
pub fn config_from_manifest(text: &str, out_dir: PathBuf) -> Result<ExperimentConfig> {
    let mut map = std::collections::BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Manifest(format!("line {}: missing '='", lineno + 1)))?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    let get = |k: &str| -> Result<&String> {
        map.get(k).ok_or_else(|| Error::Manifest(format!("missing key '{k}'")))
    };
    let parse_f64 = |k: &str| -> Result<f64> {
        get(k)?.parse::<f64>().map_err(|_| Error::Manifest(format!("key '{k}' not a number")))
    };
    let parse_u64 = |k: &str| -> Result<u64> {
        get(k)?.parse::<u64>().map_err(|_| Error::Manifest(format!("key '{k}' not an integer")))
    };

    let mode = Mode::parse(get("mode")?)?;
    let habitat_a = HabitatSource::parse(get("habitat_a")?)?;
    let habitat_b = match map.get("habitat_b") {
        Some(s) => Some(HabitatSource::parse(s)?),
        None => None,
    };
    let swap_t = match map.get("swap_t") {
        Some(s) => Some(
            s.parse::<u64>()
                .map_err(|_| Error::Manifest("key 'swap_t' not an integer".into()))?,
        ),
        None => None,
    };
    let steps = parse_u64("steps")?;
    let swarm = SwarmParams {
        beta: parse_f64("beta")?,
        delta: parse_f64("delta")?,
        eta: parse_f64("eta")?,
        p: parse_f64("p")?,
        evap: parse_f64("evap")?,
        evap_mode: EvapMode::parse(get("evap_mode")?)?,
        s_frac: parse_f64("s_frac")?,
        seed: parse_u64("seed")?,
    };
    let w_n_s = get("w_n")?;
    let w_n_vec: std::result::Result<Vec<f64>, _> =
        w_n_s.split(',').map(|s| s.trim().parse::<f64>()).collect();
    let w_n_vec = w_n_vec.map_err(|_| Error::Manifest("key 'w_n' has a bad number".into()))?;
    if w_n_vec.len() != 9 {
        return Err(Error::Manifest(format!("key 'w_n' needs 9 values, got {}", w_n_vec.len())));
    }
    let mut w_n = [0.0; 9];
    w_n.copy_from_slice(&w_n_vec);
    let vps = VpsParams { alpha: parse_f64("alpha")?, mu: parse_f64("mu")?, w_n };
    let snapshot_ts = {
        let s = get("snapshots")?;
        if s.is_empty() {
            Vec::new()
        } else {
            let parsed: std::result::Result<Vec<u64>, _> =
                s.split(',').map(|t| t.trim().parse::<u64>()).collect();
            parsed.map_err(|_| Error::Manifest("key 'snapshots' has a bad number".into()))?
        }
    };
    let metrics_region = match map.get("region") {
        Some(s) => Some(RegionSpec::parse(s)?),
        None => None,
    };
    let count_override = match map.get("count_override") {
        Some(s) => Some(
            s.parse::<usize>()
                .map_err(|_| Error::Manifest("key 'count_override' not an integer".into()))?,
        ),
        None => None,
    };
    Ok(ExperimentConfig {
        mode,
        habitat_a,
        habitat_b,
        swap_t,
        steps,
        snapshot_ts,
        swarm,
        vps,
        out_dir,
        metrics_region,
        segment: SegmentChoice::parse(get("segment")?)?,
        polarity: Polarity::parse(get("polarity")?)?,
        pop_window: parse_u64("pop_window")?,
        count_override,
    })
}
