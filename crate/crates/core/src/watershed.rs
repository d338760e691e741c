//! Immersion watershed segmentation over integer reliefs, applied either to
//! a morphological gradient of the habitat or to a normalized pheromone map.
//!
//! Flooding proceeds level by level from the regional minima with FIFO
//! breadth-first propagation; cells reached by two distinct basins at the
//! same level become watershed-line cells. Reliefs are non-toroidal:
//! segmentation respects image borders.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::habitat::GrayImage;
use crate::swarm::PheromoneField;

/// Topographic relief: high levels are ridges, low levels basin interiors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReliefImage {
    width: usize,
    height: usize,
    levels: Vec<u8>,
}

impl ReliefImage {
    pub fn from_levels(width: usize, height: usize, levels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 || levels.len() != width * height {
            return Err(Error::InvalidParam {
                name: "relief",
                reason: format!(
                    "levels length {} does not fit {}x{}",
                    levels.len(),
                    width,
                    height
                ),
            });
        }
        Ok(ReliefImage { width, height, levels })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn levels(&self) -> &[u8] {
        &self.levels
    }
}

/// Neighborhood used for flooding and basin connectivity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Connectivity {
    Four,
    #[default]
    Eight,
}

impl Connectivity {
    fn offsets(&self) -> &'static [(i64, i64)] {
        match self {
            Connectivity::Four => &[(0, -1), (1, 0), (0, 1), (-1, 0)],
            Connectivity::Eight => &[
                (0, -1),
                (1, -1),
                (1, 0),
                (1, 1),
                (0, 1),
                (-1, 1),
                (-1, 0),
                (-1, -1),
            ],
        }
    }
}

/// Label for watershed-line cells.
pub const WSHED: u32 = 0;

/// Watershed output: 0 marks watershed lines, labels 1..=basin_count mark
/// catchment basins.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMap {
    width: usize,
    height: usize,
    labels: Vec<u32>,
    basin_count: u32,
}

impl LabelMap {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn basin_count(&self) -> u32 {
        self.basin_count
    }

    pub fn label_at(&self, x: usize, y: usize) -> u32 {
        self.labels[y * self.width + x]
    }

    /// Renders labels as gray levels for inspection: watershed lines are
    /// white (255), basins get scattered levels in 0..=254.
    pub fn to_pgm_bytes(&self) -> Vec<u8> {
        let pixels: Vec<u8> = self
            .labels
            .iter()
            .map(|&l| {
                if l == WSHED {
                    255
                } else {
                    (l.wrapping_mul(2654435761) >> 8) as u8 % 255
                }
            })
            .collect();
        let mut out = format!("P5\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&pixels);
        out
    }

    /// CSV rows of (x, y, label) with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y,label\n");
        for y in 0..self.height {
            for x in 0..self.width {
                out.push_str(&format!("{},{},{}\n", x, y, self.labels[y * self.width + x]));
            }
        }
        out
    }

    /// True for cells on a basin boundary: watershed lines and cells with a
    /// differently-labeled neighbor.
    pub fn boundary_mask(&self, conn: Connectivity) -> Vec<bool> {
        let mut mask = vec![false; self.labels.len()];
        for y in 0..self.height {
            for x in 0..self.width {
                let i = y * self.width + x;
                if self.labels[i] == WSHED {
                    mask[i] = true;
                    continue;
                }
                for &(dx, dy) in conn.offsets() {
                    let nx = x as i64 + dx;
                    let ny = y as i64 + dy;
                    if nx < 0 || ny < 0 || nx >= self.width as i64 || ny >= self.height as i64 {
                        continue;
                    }
                    if self.labels[ny as usize * self.width + nx as usize] != self.labels[i] {
                        mask[i] = true;
                        break;
                    }
                }
            }
        }
        mask
    }
}

/// 3x3 morphological gradient (max - min), clamped at image borders.
pub fn morphological_gradient(img: &GrayImage) -> ReliefImage {
    let (w, h) = (img.width(), img.height());
    let mut levels = vec![0u8; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut lo = 255u8;
            let mut hi = 0u8;
            for dy in -1i64..=1 {
                for dx in -1i64..=1 {
                    let nx = x as i64 + dx;
                    let ny = y as i64 + dy;
                    if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                        continue;
                    }
                    let v = img.pixels()[ny as usize * w + nx as usize];
                    lo = lo.min(v);
                    hi = hi.max(v);
                }
            }
            levels[y * w + x] = hi - lo;
        }
    }
    ReliefImage { width: w, height: h, levels }
}

/// Normalizes a pheromone field to an 8-bit relief: high pheromone (edges)
/// becomes high relief, so basins grow inside homogeneous regions. The map
/// is invariant under uniform scaling of the field.
pub fn pheromone_relief(field: &PheromoneField) -> ReliefImage {
    let (w, h) = (field.width(), field.height());
    let max = field.max();
    let levels = if max > 0.0 {
        field
            .sigma()
            .iter()
            .map(|&s| (255.0 * s / max).round() as u8)
            .collect()
    } else {
        vec![0u8; w * h]
    };
    ReliefImage { width: w, height: h, levels }
}

const INIT: i64 = -1;
const MASK: i64 = -2;
const FICTITIOUS: u32 = u32::MAX;

/// Immersion watershed: sort cells by level, flood level-by-level with FIFO
/// breadth-first propagation from already-labeled neighbors; equidistant
/// meetings of distinct basins become watershed cells; unreached plateaus
/// seed new basins. Cell order within a level is row-major, so labels are
/// deterministic.
pub fn watershed_immersion(relief: &ReliefImage, conn: Connectivity) -> LabelMap {
    let w = relief.width;
    let h = relief.height;
    let n = w * h;
    let offsets = conn.offsets();

    let mut buckets: Vec<Vec<u32>> = vec![Vec::new(); 256];
    for (i, &level) in relief.levels.iter().enumerate() {
        buckets[level as usize].push(i as u32);
    }

    let mut lab = vec![INIT; n];
    let mut dist = vec![0u32; n];
    let mut fifo: VecDeque<u32> = VecDeque::new();
    let mut current_label: i64 = 0;

    let neighbors = |cell: u32, out: &mut Vec<u32>| {
        out.clear();
        let x = (cell as usize % w) as i64;
        let y = (cell as usize / w) as i64;
        for &(dx, dy) in offsets {
            let nx = x + dx;
            let ny = y + dy;
            if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                continue;
            }
            out.push((ny as usize * w + nx as usize) as u32);
        }
    };
    let mut nbr = Vec::with_capacity(8);

    for level in 0..256 {
        let cells = std::mem::take(&mut buckets[level]);
        if cells.is_empty() {
            continue;
        }

        // Mask the level; seed the queue with cells bordering labeled ground.
        for &p in &cells {
            lab[p as usize] = MASK;
            neighbors(p, &mut nbr);
            if nbr
                .iter()
                .any(|&q| lab[q as usize] > 0 || lab[q as usize] == WSHED as i64)
            {
                dist[p as usize] = 1;
                fifo.push_back(p);
            }
        }

        let mut curdist = 1u32;
        fifo.push_back(FICTITIOUS);
        loop {
            let mut p = fifo.pop_front().expect("queue holds the marker");
            if p == FICTITIOUS {
                if fifo.is_empty() {
                    break;
                }
                fifo.push_back(FICTITIOUS);
                curdist += 1;
                p = fifo.pop_front().expect("non-empty after marker");
            }
            neighbors(p, &mut nbr);
            // WSHED from touching the watershed line alone is provisional
            // and may be reclaimed by a basin; WSHED from seeing two
            // distinct basins is final.
            let mut basin_conflict = false;
            for &q in &nbr {
                let lq = lab[q as usize];
                if dist[q as usize] < curdist && (lq > 0 || lq == WSHED as i64) {
                    // q already belongs to a basin or to the watershed.
                    if lq > 0 {
                        let lp = lab[p as usize];
                        if !basin_conflict && (lp == MASK || lp == WSHED as i64) {
                            lab[p as usize] = lq;
                        } else if lp != lq {
                            lab[p as usize] = WSHED as i64;
                            basin_conflict = true;
                        }
                    } else if lab[p as usize] == MASK {
                        lab[p as usize] = WSHED as i64;
                    }
                } else if lq == MASK && dist[q as usize] == 0 {
                    dist[q as usize] = curdist + 1;
                    fifo.push_back(q);
                }
            }
        }

        // Remaining masked cells are new regional minima at this level.
        for &p in &cells {
            dist[p as usize] = 0;
            if lab[p as usize] == MASK {
                current_label += 1;
                lab[p as usize] = current_label;
                fifo.push_back(p);
                while let Some(q) = fifo.pop_front() {
                    neighbors(q, &mut nbr);
                    for &r in &nbr {
                        if lab[r as usize] == MASK {
                            lab[r as usize] = current_label;
                            fifo.push_back(r);
                        }
                    }
                }
            }
        }
    }

    let labels: Vec<u32> = lab
        .into_iter()
        .map(|l| {
            debug_assert!(l >= 0, "unlabeled cell after immersion");
            l as u32
        })
        .collect();
    LabelMap {
        width: w,
        height: h,
        labels,
        basin_count: current_label as u32,
    }
}

/// Which relief feeds the watershed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SegmentSource {
    /// Morphological gradient of the habitat image.
    Classical,
    /// Normalized pheromone field.
    Pheromone,
}

/// Segments an image either classically or through a pheromone map of
/// matching dimensions. Flooding connectivity defaults to eight.
pub fn segment(
    img: &GrayImage,
    source: SegmentSource,
    field: Option<&PheromoneField>,
    conn: Connectivity,
) -> Result<LabelMap> {
    let relief = match source {
        SegmentSource::Classical => morphological_gradient(img),
        SegmentSource::Pheromone => {
            let field = field.ok_or_else(|| {
                Error::SegmentSource("pheromone source requires a field".into())
            })?;
            if field.width() != img.width() || field.height() != img.height() {
                return Err(Error::DimensionMismatch {
                    expected_w: img.width(),
                    expected_h: img.height(),
                    got_w: field.width(),
                    got_h: field.height(),
                });
            }
            pheromone_relief(field)
        }
    };
    Ok(watershed_immersion(&relief, conn))
}
