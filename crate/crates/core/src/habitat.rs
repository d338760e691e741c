//! Grayscale image habitats: PGM I/O, toroidal geometry, neighborhood
//! gray-level statistics and synthetic test-image generators.
//!
//! The habitat is an 8-bit lattice whose coordinate arithmetic wraps in both
//! axes, so every cell has a full Moore neighborhood.

use crate::error::{Error, Result};

/// Column/row address on the lattice, already normalized into bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CellCoord {
    pub x: usize,
    pub y: usize,
}

impl CellCoord {
    pub fn new(x: usize, y: usize) -> Self {
        CellCoord { x, y }
    }
}

/// Local-contrast statistic: absolute difference of two 3x3 median gray
/// levels, in gray-level units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContrastStat {
    pub delta_gl: f64,
}

/// 8-bit grayscale image on a toroidal lattice, row-major, top-left origin.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    /// Builds an image from row-major pixels. Dimensions must be positive and
    /// match the pixel count.
    pub fn from_pixels(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidParam {
                name: "dimensions",
                reason: format!("{width}x{height} must be positive"),
            });
        }
        if pixels.len() != width * height {
            return Err(Error::InvalidParam {
                name: "pixels",
                reason: format!("expected {} values, got {}", width * height, pixels.len()),
            });
        }
        Ok(GrayImage { width, height, pixels })
    }

    pub fn constant(width: usize, height: usize, level: u8) -> Result<Self> {
        Self::from_pixels(width, height, vec![level; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    #[inline]
    pub fn index(&self, c: CellCoord) -> usize {
        c.y * self.width + c.x
    }

    #[inline]
    pub fn get(&self, c: CellCoord) -> u8 {
        self.pixels[self.index(c)]
    }

    /// Wraps arbitrary signed offsets onto the torus.
    #[inline]
    pub fn wrap(&self, x: i64, y: i64) -> CellCoord {
        let w = self.width as i64;
        let h = self.height as i64;
        CellCoord {
            x: x.rem_euclid(w) as usize,
            y: y.rem_euclid(h) as usize,
        }
    }

    /// The cell's 8 Moore neighbors in fixed clockwise order starting north.
    pub fn moore_neighbors(&self, c: CellCoord) -> [CellCoord; 8] {
        let x = c.x as i64;
        let y = c.y as i64;
        MOORE_OFFSETS.map(|(dx, dy)| self.wrap(x + dx, y + dy))
    }

    /// 180-degree rotation: out(x, y) = in(w-1-x, h-1-y).
    pub fn rotate180(&self) -> GrayImage {
        let mut pixels = self.pixels.clone();
        pixels.reverse();
        GrayImage {
            width: self.width,
            height: self.height,
            pixels,
        }
    }

    /// Decodes a binary (P5) or ASCII (P2) PGM with maxval <= 255.
    pub fn load_pgm(bytes: &[u8]) -> Result<Self> {
        decode_pgm(bytes)
    }

    pub fn load_pgm_file(path: &std::path::Path) -> Result<Self> {
        let bytes = std::fs::read(path)?;
        decode_pgm(&bytes)
    }

    /// Encodes as binary PGM: header `P5\n<w> <h>\n255\n` plus raw rows.
    pub fn to_pgm_bytes(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.pixels);
        out
    }

    pub fn save_pgm_file(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_pgm_bytes())?;
        Ok(())
    }
}

/// Moore offsets in heading order N, NE, E, SE, S, SW, W, NW.
/// North is up, i.e. toward smaller y.
pub const MOORE_OFFSETS: [(i64, i64); 8] = [
    (0, -1),
    (1, -1),
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
    (-1, 0),
    (-1, -1),
];

/// Median gray level of the 3x3 Moore window centered on `c`, center
/// included, toroidal. The median of 9 values is the 5th order statistic.
pub fn median_gray(img: &GrayImage, c: CellCoord) -> u8 {
    let mut window = [0u8; 9];
    let x = c.x as i64;
    let y = c.y as i64;
    let mut i = 0;
    for dy in -1..=1 {
        for dx in -1..=1 {
            window[i] = img.get(img.wrap(x + dx, y + dy));
            i += 1;
        }
    }
    window.sort_unstable();
    window[4]
}

/// Absolute difference between the 3x3 median gray levels of two cells.
pub fn delta_gl(img: &GrayImage, prev: CellCoord, cur: CellCoord) -> ContrastStat {
    let a = median_gray(img, prev) as f64;
    let b = median_gray(img, cur) as f64;
    ContrastStat { delta_gl: (a - b).abs() }
}

/// Per-cell 3x3 median map; the engine caches this so transition contrast is
/// two lookups instead of two window sorts.
pub fn median_map(img: &GrayImage) -> Vec<u8> {
    let mut out = vec![0u8; img.width() * img.height()];
    for y in 0..img.height() {
        for x in 0..img.width() {
            let c = CellCoord::new(x, y);
            out[img.index(c)] = median_gray(img, c);
        }
    }
    out
}

/// Synthetic habitat family; stand-ins for classical test images.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SyntheticKind {
    /// Dark cross on light background. Arms span the full lattice unless
    /// `arm_len` limits them; `center` defaults to the image center.
    Cross {
        arm_width: usize,
        arm_len: Option<usize>,
        center: Option<(usize, usize)>,
    },
    /// Alternating dark/light tiles.
    Checkerboard { tile: usize },
    /// Two dark discs on light background, centered at (w/4, h/2) and
    /// (3w/4, h/2).
    TwoBlob { radius: usize },
    /// Horizontal gradient, 0 at the left edge to 255 at the right.
    Ramp,
}

/// Parsed form of the CLI/manifest habitat token `kind:WxH:k=v,...`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntheticSpec {
    pub kind: SyntheticKind,
    pub width: usize,
    pub height: usize,
}

const DARK: u8 = 0;
const LIGHT: u8 = 255;

impl SyntheticSpec {
    pub fn build(&self) -> Result<GrayImage> {
        make_synthetic(&self.kind, self.width, self.height)
    }

    /// Parses `kind:WxH[:k=v,k=v]`, e.g. `cross:100x100:arm=20`.
    pub fn parse(s: &str) -> Result<Self> {
        let bad = |reason: String| Error::InvalidParam { name: "synthetic", reason };
        let mut parts = s.splitn(3, ':');
        let kind_s = parts.next().unwrap_or("");
        let dims_s = parts
            .next()
            .ok_or_else(|| bad(format!("missing dimensions in '{s}'")))?;
        let params_s = parts.next().unwrap_or("");

        let (w_s, h_s) = dims_s
            .split_once(['x', 'X'])
            .ok_or_else(|| bad(format!("dimensions '{dims_s}' not WxH")))?;
        let width: usize = w_s
            .parse()
            .map_err(|_| bad(format!("bad width '{w_s}'")))?;
        let height: usize = h_s
            .parse()
            .map_err(|_| bad(format!("bad height '{h_s}'")))?;

        let mut kv = std::collections::BTreeMap::new();
        for pair in params_s.split(',').filter(|p| !p.is_empty()) {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| bad(format!("parameter '{pair}' not k=v")))?;
            let v: usize = v
                .parse()
                .map_err(|_| bad(format!("parameter '{pair}' value not an integer")))?;
            kv.insert(k.to_string(), v);
        }

        let kind = match kind_s {
            "cross" => SyntheticKind::Cross {
                arm_width: *kv
                    .get("arm")
                    .ok_or_else(|| bad("cross requires arm=<width>".into()))?,
                arm_len: kv.get("len").copied(),
                center: match (kv.get("cx"), kv.get("cy")) {
                    (Some(&cx), Some(&cy)) => Some((cx, cy)),
                    (None, None) => None,
                    _ => return Err(bad("cx and cy must be given together".into())),
                },
            },
            "checkerboard" => SyntheticKind::Checkerboard {
                tile: *kv
                    .get("tile")
                    .ok_or_else(|| bad("checkerboard requires tile=<size>".into()))?,
            },
            "two_blob" => SyntheticKind::TwoBlob {
                radius: *kv
                    .get("r")
                    .ok_or_else(|| bad("two_blob requires r=<radius>".into()))?,
            },
            "ramp" => SyntheticKind::Ramp,
            other => return Err(bad(format!("unknown kind '{other}'"))),
        };
        Ok(SyntheticSpec { kind, width, height })
    }
}

impl std::fmt::Display for SyntheticSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let (w, h) = (self.width, self.height);
        match &self.kind {
            SyntheticKind::Cross { arm_width, arm_len, center } => {
                write!(f, "cross:{w}x{h}:arm={arm_width}")?;
                if let Some(len) = arm_len {
                    write!(f, ",len={len}")?;
                }
                if let Some((cx, cy)) = center {
                    write!(f, ",cx={cx},cy={cy}")?;
                }
                Ok(())
            }
            SyntheticKind::Checkerboard { tile } => write!(f, "checkerboard:{w}x{h}:tile={tile}"),
            SyntheticKind::TwoBlob { radius } => write!(f, "two_blob:{w}x{h}:r={radius}"),
            SyntheticKind::Ramp => write!(f, "ramp:{w}x{h}"),
        }
    }
}

/// Builds a deterministic synthetic habitat. Dimensions must be at least 8x8
/// and pattern parameters must fit inside the lattice.
pub fn make_synthetic(kind: &SyntheticKind, width: usize, height: usize) -> Result<GrayImage> {
    if width < 8 || height < 8 {
        return Err(Error::InvalidParam {
            name: "dimensions",
            reason: format!("{width}x{height} below minimum 8x8"),
        });
    }
    match *kind {
        SyntheticKind::Cross { arm_width, arm_len, center } => {
            cross(width, height, arm_width, arm_len, center)
        }
        SyntheticKind::Checkerboard { tile } => checkerboard(width, height, tile),
        SyntheticKind::TwoBlob { radius } => two_blob(width, height, radius),
        SyntheticKind::Ramp => ramp(width, height),
    }
}

fn cross(
    width: usize,
    height: usize,
    arm_width: usize,
    arm_len: Option<usize>,
    center: Option<(usize, usize)>,
) -> Result<GrayImage> {
    if arm_width == 0 || arm_width >= width.min(height) {
        return Err(Error::InvalidParam {
            name: "arm",
            reason: format!("arm width {arm_width} must be in 1..{}", width.min(height)),
        });
    }
    let (cx, cy) = center.unwrap_or((width / 2, height / 2));
    if cx >= width || cy >= height {
        return Err(Error::InvalidParam {
            name: "center",
            reason: format!("({cx}, {cy}) outside {width}x{height}"),
        });
    }
    // Span of a bar of size n centered (left-biased) on c, clipped to [0, limit).
    let span = |c: usize, n: usize, limit: usize| -> (usize, usize) {
        let lo = c.saturating_sub(n / 2);
        let hi = (lo + n).min(limit);
        (lo, hi)
    };
    let (vx0, vx1) = span(cx, arm_width, width);
    let (hy0, hy1) = span(cy, arm_width, height);
    let (vy0, vy1) = match arm_len {
        Some(len) => span(cy, len, height),
        None => (0, height),
    };
    let (hx0, hx1) = match arm_len {
        Some(len) => span(cx, len, width),
        None => (0, width),
    };
    let mut pixels = vec![LIGHT; width * height];
    for y in 0..height {
        for x in 0..width {
            let in_vertical = x >= vx0 && x < vx1 && y >= vy0 && y < vy1;
            let in_horizontal = y >= hy0 && y < hy1 && x >= hx0 && x < hx1;
            if in_vertical || in_horizontal {
                pixels[y * width + x] = DARK;
            }
        }
    }
    GrayImage::from_pixels(width, height, pixels)
}

fn checkerboard(width: usize, height: usize, tile: usize) -> Result<GrayImage> {
    if tile == 0 || tile > width.min(height) / 2 {
        return Err(Error::InvalidParam {
            name: "tile",
            reason: format!("tile {tile} must be in 1..={}", width.min(height) / 2),
        });
    }
    let mut pixels = vec![LIGHT; width * height];
    for y in 0..height {
        for x in 0..width {
            if (x / tile + y / tile) % 2 == 0 {
                pixels[y * width + x] = DARK;
            }
        }
    }
    GrayImage::from_pixels(width, height, pixels)
}

fn two_blob(width: usize, height: usize, radius: usize) -> Result<GrayImage> {
    if radius == 0 || radius >= width / 4 || radius >= height / 2 {
        return Err(Error::InvalidParam {
            name: "r",
            reason: format!(
                "radius {radius} must be in 1..{} for {width}x{height}",
                (width / 4).min(height / 2)
            ),
        });
    }
    let centers = [(width / 4, height / 2), (3 * width / 4, height / 2)];
    let r2 = (radius * radius) as i64;
    let mut pixels = vec![LIGHT; width * height];
    for y in 0..height {
        for x in 0..width {
            for &(cx, cy) in &centers {
                let dx = x as i64 - cx as i64;
                let dy = y as i64 - cy as i64;
                if dx * dx + dy * dy <= r2 {
                    pixels[y * width + x] = DARK;
                }
            }
        }
    }
    GrayImage::from_pixels(width, height, pixels)
}

fn ramp(width: usize, height: usize) -> Result<GrayImage> {
    let mut pixels = vec![0u8; width * height];
    for y in 0..height {
        for x in 0..width {
            let v = (255.0 * x as f64 / (width - 1) as f64).round() as u8;
            pixels[y * width + x] = v;
        }
    }
    GrayImage::from_pixels(width, height, pixels)
}

// ---------------------------------------------------------------------------
// PGM decoding
// ---------------------------------------------------------------------------

struct PgmCursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> PgmCursor<'a> {
    /// Next header token, skipping whitespace and `#` comment lines.
    fn token(&mut self, field: &'static str) -> Result<&'a [u8]> {
        loop {
            while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
            if self.pos < self.bytes.len() && self.bytes[self.pos] == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
                continue;
            }
            break;
        }
        let start = self.pos;
        while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::PgmDecode {
                field,
                reason: "unexpected end of input".into(),
            });
        }
        Ok(&self.bytes[start..self.pos])
    }

    fn number(&mut self, field: &'static str) -> Result<u64> {
        let tok = self.token(field)?;
        let s = std::str::from_utf8(tok).map_err(|_| Error::PgmDecode {
            field,
            reason: "not ASCII".into(),
        })?;
        s.parse::<u64>().map_err(|_| Error::PgmDecode {
            field,
            reason: format!("'{s}' is not a non-negative integer"),
        })
    }
}

fn decode_pgm(bytes: &[u8]) -> Result<GrayImage> {
    let mut cur = PgmCursor { bytes, pos: 0 };
    let magic = cur.token("magic")?;
    let binary = match magic {
        b"P5" => true,
        b"P2" => false,
        other => {
            return Err(Error::PgmDecode {
                field: "magic",
                reason: format!("expected P2 or P5, got '{}'", String::from_utf8_lossy(other)),
            })
        }
    };
    let width = cur.number("width")? as usize;
    let height = cur.number("height")? as usize;
    if width < 3 {
        return Err(Error::PgmDecode {
            field: "width",
            reason: format!("{width} below minimum 3"),
        });
    }
    if height < 3 {
        return Err(Error::PgmDecode {
            field: "height",
            reason: format!("{height} below minimum 3"),
        });
    }
    let maxval = cur.number("maxval")?;
    if maxval == 0 || maxval > 255 {
        return Err(Error::PgmDecode {
            field: "maxval",
            reason: format!("unsupported maxval {maxval} (must be 1..=255)"),
        });
    }

    let count = width * height;
    let pixels = if binary {
        // Exactly one whitespace byte separates the header from the payload.
        if cur.pos >= bytes.len() || !bytes[cur.pos].is_ascii_whitespace() {
            return Err(Error::PgmDecode {
                field: "payload",
                reason: "missing separator after maxval".into(),
            });
        }
        let start = cur.pos + 1;
        if bytes.len() < start + count {
            return Err(Error::PgmDecode {
                field: "payload",
                reason: format!(
                    "truncated: expected {count} bytes, got {}",
                    bytes.len().saturating_sub(start)
                ),
            });
        }
        bytes[start..start + count].to_vec()
    } else {
        let mut pixels = Vec::with_capacity(count);
        for _ in 0..count {
            let v = cur.number("payload")?;
            if v > maxval {
                return Err(Error::PgmDecode {
                    field: "payload",
                    reason: format!("value {v} exceeds maxval {maxval}"),
                });
            }
            pixels.push(v as u8);
        }
        pixels
    };
    GrayImage::from_pixels(width, height, pixels)
}
