//! Grayscale images treated as probability densities on the unit square.

use std::path::Path;

use rand::Rng;

use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// A grayscale raster with integer intensities, row 0 at the top.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    pub width: usize,
    pub height: usize,
    pub max_value: u16,
    pub pixels: Vec<u16>,
}

impl GrayImage {
    /// Parses binary (P5) or plain (P2) PGM.
    pub fn parse_pgm(bytes: &[u8]) -> Result<GrayImage> {
        let mut pos = 0;
        let magic = next_token(bytes, &mut pos)?;
        let binary = match magic.as_str() {
            "P5" => true,
            "P2" => false,
            other => return Err(Error::Format(format!("not a PGM file (magic {other:?})"))),
        };
        let width = parse_header_int(bytes, &mut pos, "width")?;
        let height = parse_header_int(bytes, &mut pos, "height")?;
        let max_value = parse_header_int(bytes, &mut pos, "max value")?;
        if width == 0 || height == 0 {
            return Err(Error::Format(format!("empty image {width}x{height}")));
        }
        if max_value == 0 || max_value > 65535 {
            return Err(Error::Format(format!("max value {max_value} outside 1..=65535")));
        }
        let n = width * height;
        let mut pixels = Vec::with_capacity(n);
        if binary {
            // exactly one whitespace byte separates the header from the raster
            pos += 1;
            let wide = max_value > 255;
            let need = if wide { 2 * n } else { n };
            let raster = bytes
                .get(pos..pos + need)
                .ok_or_else(|| Error::Format(format!("raster truncated: need {need} bytes")))?;
            if wide {
                pixels.extend(raster.chunks_exact(2).map(|c| u16::from_be_bytes([c[0], c[1]])));
            } else {
                pixels.extend(raster.iter().map(|&b| u16::from(b)));
            }
        } else {
            for i in 0..n {
                let v = parse_header_int(bytes, &mut pos, "pixel")
                    .map_err(|_| Error::Format(format!("pixel {i} missing or malformed")))?;
                pixels.push(v as u16);
            }
        }
        if let Some(&v) = pixels.iter().find(|&&v| v as usize > max_value) {
            return Err(Error::Format(format!("pixel value {v} exceeds max value {max_value}")));
        }
        Ok(GrayImage {
            width,
            height,
            max_value: max_value as u16,
            pixels,
        })
    }

    /// Binary PGM encoding.
    pub fn to_pgm(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n{}\n", self.width, self.height, self.max_value).into_bytes();
        if self.max_value > 255 {
            out.extend(self.pixels.iter().flat_map(|p| p.to_be_bytes()));
        } else {
            out.extend(self.pixels.iter().map(|&p| p as u8));
        }
        out
    }
}

fn next_token(bytes: &[u8], pos: &mut usize) -> Result<String> {
    loop {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < bytes.len() && bytes[*pos] == b'#' {
            while *pos < bytes.len() && bytes[*pos] != b'\n' {
                *pos += 1;
            }
            continue;
        }
        break;
    }
    let start = *pos;
    while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    if start == *pos {
        return Err(Error::Format("unexpected end of PGM header".into()));
    }
    Ok(String::from_utf8_lossy(&bytes[start..*pos]).into_owned())
}

fn parse_header_int(bytes: &[u8], pos: &mut usize, what: &str) -> Result<usize> {
    let tok = next_token(bytes, pos)?;
    tok.parse()
        .map_err(|_| Error::Format(format!("malformed {what}: {tok:?}")))
}

/// Pixel masses normalized to sum one, row-major with row 0 at the top.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityGrid {
    width: usize,
    height: usize,
    mass: Vec<f64>,
    cumulative: Vec<f64>,
}

impl DensityGrid {
    pub fn from_intensities(width: usize, height: usize, intensities: &[u64]) -> Result<Self> {
        if width == 0 || height == 0 || intensities.len() != width * height {
            return Err(Error::Dimension(format!(
                "{} intensities for a {width}x{height} grid",
                intensities.len()
            )));
        }
        // integer total keeps the normalization exact up to one rounding per pixel
        let total: u64 = intensities.iter().sum();
        if total == 0 {
            return Err(Error::DegenerateDensity("all pixel intensities are zero".into()));
        }
        let mass: Vec<f64> = intensities.iter().map(|&v| v as f64 / total as f64).collect();
        let mut acc = 0u64;
        let cumulative = intensities
            .iter()
            .map(|&v| {
                acc += v;
                acc as f64 / total as f64
            })
            .collect();
        Ok(DensityGrid {
            width,
            height,
            mass,
            cumulative,
        })
    }

    pub fn from_image(img: &GrayImage) -> Result<Self> {
        let ints: Vec<u64> = img.pixels.iter().map(|&p| u64::from(p)).collect();
        Self::from_intensities(img.width, img.height, &ints)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    /// Pixel index for a uniform draw in `[0, 1)`.
    fn pixel_for(&self, u: f64) -> usize {
        let idx = self.cumulative.partition_point(|&c| c <= u);
        // zero-mass pixels share a cumulative value with their predecessor and are never hit
        idx.min(self.mass.len() - 1)
    }

    /// Unit-square cell `[x0, x1) x [y0, y1)` of a pixel; y grows upwards.
    pub fn cell(&self, pixel: usize) -> ([f64; 2], [f64; 2]) {
        let (row, col) = (pixel / self.width, pixel % self.width);
        let x0 = col as f64 / self.width as f64;
        let y0 = (self.height - 1 - row) as f64 / self.height as f64;
        ([x0, y0], [x0 + 1.0 / self.width as f64, y0 + 1.0 / self.height as f64])
    }
}

pub fn load_density_image(path: impl AsRef<Path>) -> Result<DensityGrid> {
    let bytes = std::fs::read(path)?;
    DensityGrid::from_image(&GrayImage::parse_pgm(&bytes)?)
}

/// Draws `n` points in `[0,1]^2`: a pixel with probability equal to its mass, then
/// a uniform position inside that pixel's cell. Also returns the chosen pixels.
pub fn sample_density_cells<R: Rng + ?Sized>(
    grid: &DensityGrid,
    n: usize,
    rng: &mut R,
) -> Result<(TimeSeries, Vec<usize>)> {
    if n == 0 {
        return Err(Error::Config("sample count must be positive".into()));
    }
    let mut data = Vec::with_capacity(2 * n);
    let mut pixels = Vec::with_capacity(n);
    for _ in 0..n {
        let p = grid.pixel_for(rng.random::<f64>());
        let (lo, hi) = grid.cell(p);
        data.push(lo[0] + (hi[0] - lo[0]) * rng.random::<f64>());
        data.push(lo[1] + (hi[1] - lo[1]) * rng.random::<f64>());
        pixels.push(p);
    }
    Ok((TimeSeries::from_rows(n, 2, data)?, pixels))
}

/// [`sample_density_cells`] followed by centering to zero empirical mean.
pub fn sample_from_density<R: Rng + ?Sized>(grid: &DensityGrid, n: usize, rng: &mut R) -> Result<TimeSeries> {
    let (mut pts, _) = sample_density_cells(grid, n, rng)?;
    pts.center();
    Ok(pts)
}
