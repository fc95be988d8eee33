use crate::{QrError, QrSymbol};

/// 8-bit raster, row-major, 1 (gray) or 3 (RGB) interleaved channels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RasterImage {
    width: usize,
    height: usize,
    channels: usize,
    pixels: Vec<u8>,
}

impl RasterImage {
    pub fn new(width: usize, height: usize, channels: usize, pixels: Vec<u8>) -> Result<Self, QrError> {
        if width == 0 || height == 0 {
            return Err(QrError::InvalidRaster("dimensions must be at least 1x1"));
        }
        if channels != 1 && channels != 3 {
            return Err(QrError::InvalidRaster("channels must be 1 or 3"));
        }
        if pixels.len() != width * height * channels {
            return Err(QrError::InvalidRaster("pixel buffer length mismatch"));
        }
        Ok(RasterImage { width, height, channels, pixels })
    }

    pub fn filled(width: usize, height: usize, channels: usize, value: u8) -> Result<Self, QrError> {
        Self::new(width, height, channels, vec![value; width * height * channels])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn pixels_mut(&mut self) -> &mut [u8] {
        &mut self.pixels
    }

    pub fn into_pixels(self) -> Vec<u8> {
        self.pixels
    }

    pub fn pixel(&self, x: usize, y: usize) -> &[u8] {
        let i = (y * self.width + x) * self.channels;
        &self.pixels[i..i + self.channels]
    }

    pub fn pixel_mut(&mut self, x: usize, y: usize) -> &mut [u8] {
        let i = (y * self.width + x) * self.channels;
        &mut self.pixels[i..i + self.channels]
    }

    /// Rec. 601 luma of one pixel.
    pub fn luma(&self, x: usize, y: usize) -> u8 {
        match self.pixel(x, y) {
            [g] => *g,
            [r, g, b] => ((299 * *r as u32 + 587 * *g as u32 + 114 * *b as u32 + 500) / 1000) as u8,
            _ => unreachable!(),
        }
    }

    pub fn to_luma(&self) -> Vec<u8> {
        if self.channels == 1 {
            return self.pixels.clone();
        }
        (0..self.height)
            .flat_map(|y| (0..self.width).map(move |x| (x, y)))
            .map(|(x, y)| self.luma(x, y))
            .collect()
    }
}

/// Renders `symbol` as a grayscale raster with `module_px` pixels per module
/// and a light border of `quiet_zone_modules` modules.
pub fn render(symbol: &QrSymbol, module_px: usize, quiet_zone_modules: usize) -> Result<RasterImage, QrError> {
    if module_px == 0 {
        return Err(QrError::InvalidRender("module_px must be at least 1"));
    }
    if quiet_zone_modules < 4 {
        return Err(QrError::InvalidRender("quiet zone must be at least 4 modules"));
    }
    let side_px = (symbol.side() + 2 * quiet_zone_modules) * module_px;
    let mut pixels = vec![255u8; side_px * side_px];
    for (my, row) in symbol.rows().enumerate() {
        for (mx, &dark) in row.iter().enumerate() {
            if !dark {
                continue;
            }
            let x0 = (mx + quiet_zone_modules) * module_px;
            let y0 = (my + quiet_zone_modules) * module_px;
            for y in y0..y0 + module_px {
                pixels[y * side_px + x0..y * side_px + x0 + module_px].fill(0);
            }
        }
    }
    RasterImage::new(side_px, side_px, 1, pixels)
}
