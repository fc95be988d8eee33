//! What a social portal does to uploaded photos, and the two carriers that
//! do not survive it (container metadata and LSB steganography).

mod container;
mod lsb;

use std::io::Cursor;

use image::codecs::jpeg::JpegEncoder;
use image::codecs::png::PngEncoder;
use image::imageops::{self, FilterType};
use image::{DynamicImage, ExtendedColorType, GrayImage, ImageEncoder, RgbImage};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use socialkey_qr::RasterImage;
use thiserror::Error;

pub use container::{image_end, sniff, ImageFormat};
pub use lsb::{bit_error_rate, embed_lsb, embed_lsb_bits, extract_lsb, extract_lsb_bits, LSB_BER_THRESHOLD};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PipeError {
    #[error("not a PNG or JPEG file")]
    Unrecognized,
    #[error("malformed image container: {0}")]
    Malformed(String),
    #[error("pixel decode failed: {0}")]
    Decode(String),
    #[error("encode failed: {0}")]
    Encode(String),
    #[error("invalid optimization profile: {0}")]
    InvalidProfile(&'static str),
    #[error("invalid metadata entry: {0}")]
    InvalidMetadata(&'static str),
    #[error("metadata block of {0} bytes does not fit one APP1 segment")]
    MetadataTooLarge(usize),
    #[error("payload of {bits} bits exceeds LSB capacity of {capacity} pixels")]
    LsbCapacity { bits: usize, capacity: usize },
}

impl PipeError {
    pub fn category(&self) -> &'static str {
        match self {
            PipeError::Unrecognized | PipeError::Malformed(_) | PipeError::Decode(_) => "bad-image",
            PipeError::Encode(_) => "encode-failed",
            PipeError::InvalidProfile(_) => "invalid-profile",
            PipeError::InvalidMetadata(_) | PipeError::MetadataTooLarge(_) => "invalid-metadata",
            PipeError::LsbCapacity { .. } => "capacity-exceeded",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ResizeFilter {
    #[default]
    Bilinear,
    Nearest,
}

impl ResizeFilter {
    fn filter_type(self) -> FilterType {
        match self {
            ResizeFilter::Bilinear => FilterType::Triangle,
            ResizeFilter::Nearest => FilterType::Nearest,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OptimizationProfile {
    pub max_dimension: u32,
    pub jpeg_quality: u8,
    pub strip_metadata: bool,
    pub truncate_after_eof: bool,
    pub force_jpeg: bool,
    #[serde(default)]
    pub resize_filter: ResizeFilter,
}

impl Default for OptimizationProfile {
    fn default() -> Self {
        OptimizationProfile {
            max_dimension: 1024,
            jpeg_quality: 75,
            strip_metadata: true,
            truncate_after_eof: true,
            force_jpeg: true,
            resize_filter: ResizeFilter::Bilinear,
        }
    }
}

impl OptimizationProfile {
    /// No recompression, no stripping, no truncation: pixels and container
    /// extras pass through unchanged for images up to 4096 pixels.
    pub fn lossless() -> Self {
        OptimizationProfile {
            max_dimension: 4096,
            jpeg_quality: 100,
            strip_metadata: false,
            truncate_after_eof: false,
            force_jpeg: false,
            resize_filter: ResizeFilter::Bilinear,
        }
    }

    pub fn validate(&self) -> Result<(), PipeError> {
        if self.max_dimension < 16 {
            return Err(PipeError::InvalidProfile("max_dimension below 16"));
        }
        if !(1..=100).contains(&self.jpeg_quality) {
            return Err(PipeError::InvalidProfile("jpeg_quality outside 1..=100"));
        }
        Ok(())
    }
}

/// Ordered text key/value pairs carried in the image container.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetadataBlock {
    pub entries: Vec<(String, String)>,
}

impl MetadataBlock {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, key: &str, value: &str) -> Self {
        self.entries.push((key.to_string(), value.to_string()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn validate(&self) -> Result<(), PipeError> {
        for (k, v) in &self.entries {
            if k.is_empty() || k.len() > 79 {
                return Err(PipeError::InvalidMetadata("key must be 1 to 79 bytes"));
            }
            if k.contains('\0') || v.contains('\0') {
                return Err(PipeError::InvalidMetadata("NUL byte in key or value"));
            }
        }
        Ok(())
    }
}

pub fn embed_metadata(file: &[u8], block: &MetadataBlock) -> Result<Vec<u8>, PipeError> {
    container::embed(file, block)
}

/// Metadata written by [`embed_metadata`]; empty when none is present.
pub fn extract_metadata(file: &[u8]) -> Result<MetadataBlock, PipeError> {
    container::extract(file)
}

pub fn strip_metadata(file: &[u8]) -> Result<Vec<u8>, PipeError> {
    container::strip(file)
}

/// The file cut at its end-of-image marker.
pub fn truncate_after_eof(file: &[u8]) -> Result<Vec<u8>, PipeError> {
    Ok(file[..image_end(file)?].to_vec())
}

pub fn decode_raster(file: &[u8]) -> Result<RasterImage, PipeError> {
    let format = match sniff(file).ok_or(PipeError::Unrecognized)? {
        ImageFormat::Png => image::ImageFormat::Png,
        ImageFormat::Jpeg => image::ImageFormat::Jpeg,
    };
    let img = image::load_from_memory_with_format(file, format).map_err(|e| PipeError::Decode(e.to_string()))?;
    Ok(from_dynamic(img))
}

fn from_dynamic(img: DynamicImage) -> RasterImage {
    let (w, h) = (img.width() as usize, img.height() as usize);
    if img.color().has_color() {
        RasterImage::new(w, h, 3, img.into_rgb8().into_raw()).expect("buffer sized by decoder")
    } else {
        RasterImage::new(w, h, 1, img.into_luma8().into_raw()).expect("buffer sized by decoder")
    }
}

fn color_type(img: &RasterImage) -> ExtendedColorType {
    if img.channels() == 3 {
        ExtendedColorType::Rgb8
    } else {
        ExtendedColorType::L8
    }
}

pub fn encode_png(img: &RasterImage) -> Result<Vec<u8>, PipeError> {
    let mut out = Vec::new();
    PngEncoder::new(Cursor::new(&mut out))
        .write_image(img.pixels(), img.width() as u32, img.height() as u32, color_type(img))
        .map_err(|e| PipeError::Encode(e.to_string()))?;
    Ok(out)
}

pub fn encode_jpeg(img: &RasterImage, quality: u8) -> Result<Vec<u8>, PipeError> {
    let mut out = Vec::new();
    JpegEncoder::new_with_quality(Cursor::new(&mut out), quality.clamp(1, 100))
        .encode(img.pixels(), img.width() as u32, img.height() as u32, color_type(img))
        .map_err(|e| PipeError::Encode(e.to_string()))?;
    Ok(out)
}

pub fn resize(img: &RasterImage, width: usize, height: usize, filter: ResizeFilter) -> RasterImage {
    let (w, h) = (img.width() as u32, img.height() as u32);
    let f = filter.filter_type();
    if img.channels() == 3 {
        let src = RgbImage::from_raw(w, h, img.pixels().to_vec()).expect("validated raster");
        let out = imageops::resize(&src, width as u32, height as u32, f);
        RasterImage::new(width, height, 3, out.into_raw()).expect("resize output")
    } else {
        let src = GrayImage::from_raw(w, h, img.to_luma()).expect("validated raster");
        let out = imageops::resize(&src, width as u32, height as u32, f);
        RasterImage::new(width, height, 1, out.into_raw()).expect("resize output")
    }
}

/// Dimensions after scaling the longest side down to `max_dimension`.
pub fn fit_within(width: usize, height: usize, max_dimension: usize) -> (usize, usize) {
    let longest = width.max(height);
    if longest <= max_dimension {
        return (width, height);
    }
    let scale = |v: usize| ((v as f64 * max_dimension as f64 / longest as f64).round() as usize).max(1);
    if width >= height {
        (max_dimension, scale(height))
    } else {
        (scale(width), max_dimension)
    }
}

/// Applies the portal upload pipeline: truncate after EOF, decode, resize,
/// re-encode, strip metadata. Disabled stages leave their part of the file
/// intact (metadata and trailing bytes are carried over to the new file).
pub fn optimize(file: &[u8], profile: &OptimizationProfile) -> Result<Vec<u8>, PipeError> {
    profile.validate()?;
    let format = sniff(file).ok_or(PipeError::Unrecognized)?;
    let end = image_end(file)?;
    let (body, trailer) = file.split_at(end);
    let kept_metadata = if profile.strip_metadata { None } else { Some(extract_metadata(body)?) };

    let mut img = decode_raster(body)?;
    let (w, h) = fit_within(img.width(), img.height(), profile.max_dimension as usize);
    if (w, h) != (img.width(), img.height()) {
        img = resize(&img, w, h, profile.resize_filter);
    }

    let mut out = if profile.force_jpeg || format == ImageFormat::Jpeg {
        encode_jpeg(&img, profile.jpeg_quality)?
    } else {
        encode_png(&img)?
    };
    out = strip_metadata(&out)?;
    if let Some(block) = kept_metadata.filter(|b| !b.is_empty()) {
        out = embed_metadata(&out, &block)?;
    }
    if !profile.truncate_after_eof {
        out.extend_from_slice(trailer);
    }
    Ok(out)
}

/// Deterministic photo-like RGB test image: smooth gradients, a few soft
/// blobs and mild sensor noise.
pub fn synthetic_photo(width: usize, height: usize, seed: u64) -> RasterImage {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let blobs: Vec<(f64, f64, f64, [f64; 3])> = (0..6)
        .map(|_| {
            let cx = rng.gen_range(0.0..width as f64);
            let cy = rng.gen_range(0.0..height as f64);
            let r = rng.gen_range(0.1..0.4) * width.max(height) as f64;
            let c = [rng.gen_range(-90.0..90.0), rng.gen_range(-90.0..90.0), rng.gen_range(-90.0..90.0)];
            (cx, cy, r, c)
        })
        .collect();
    let base: [f64; 3] = [rng.gen_range(60.0..190.0), rng.gen_range(60.0..190.0), rng.gen_range(60.0..190.0)];
    let mut pixels = Vec::with_capacity(width * height * 3);
    for y in 0..height {
        for x in 0..width {
            let gx = x as f64 / width as f64;
            let gy = y as f64 / height as f64;
            for (c, b) in base.iter().enumerate() {
                let mut v = b + 40.0 * (gx - 0.5) + 30.0 * (gy - 0.5) * if c == 1 { -1.0 } else { 1.0 };
                for (cx, cy, r, col) in &blobs {
                    let d2 = ((x as f64 - cx).powi(2) + (y as f64 - cy).powi(2)) / (r * r);
                    v += col[c] * (-d2).exp();
                }
                v += rng.gen_range(-6.0..6.0);
                pixels.push(v.round().clamp(0.0, 255.0) as u8);
            }
        }
    }
    RasterImage::new(width, height, 3, pixels).expect("sized buffer")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn png_of(w: usize, h: usize) -> Vec<u8> {
        encode_png(&synthetic_photo(w, h, 1)).unwrap()
    }

    fn dims(file: &[u8]) -> (usize, usize) {
        let img = decode_raster(file).unwrap();
        (img.width(), img.height())
    }

    #[test]
    fn fit_within_preserves_aspect() {
        assert_eq!(fit_within(2000, 1000, 1024), (1024, 512));
        assert_eq!(fit_within(1000, 2000, 1024), (512, 1024));
        assert_eq!(fit_within(300, 200, 1024), (300, 200));
        assert_eq!(fit_within(5000, 1, 1024), (1024, 1));
    }

    #[test]
    fn optimize_scales_2000x1000_to_1024x512() {
        let out = optimize(&png_of(2000, 1000), &OptimizationProfile::default()).unwrap();
        assert_eq!(sniff(&out), Some(ImageFormat::Jpeg));
        assert_eq!(dims(&out), (1024, 512));
    }

    #[test]
    fn optimize_removes_metadata() {
        let block = MetadataBlock::new().with("Comment", "hello").with("pubkey", &"k".repeat(300));
        let file = embed_metadata(&png_of(64, 48), &block).unwrap();
        assert_eq!(extract_metadata(&file).unwrap(), block);
        let out = optimize(&file, &OptimizationProfile::default()).unwrap();
        assert!(extract_metadata(&out).unwrap().is_empty());
    }

    #[test]
    fn optimize_drops_bytes_after_eof() {
        for base in [png_of(40, 30), encode_jpeg(&synthetic_photo(40, 30, 2), 90).unwrap()] {
            let mut file = base.clone();
            let tail: Vec<u8> = (0..100u8).collect();
            file.extend_from_slice(&tail);
            assert_eq!(image_end(&file).unwrap(), base.len());
            let out = optimize(&file, &OptimizationProfile::default()).unwrap();
            assert_eq!(image_end(&out).unwrap(), out.len());
            assert!(out.ends_with(&[0xFF, 0xD9]));
            assert!(!out.windows(tail.len()).any(|w| w == tail.as_slice()));
        }
    }

    #[test]
    fn disabled_stages_carry_extras_over() {
        let block = MetadataBlock::new().with("k", "v");
        let mut file = embed_metadata(&png_of(40, 30), &block).unwrap();
        file.extend_from_slice(b"TRAILER");
        let profile = OptimizationProfile {
            strip_metadata: false,
            truncate_after_eof: false,
            ..OptimizationProfile::default()
        };
        let out = optimize(&file, &profile).unwrap();
        assert_eq!(extract_metadata(&out).unwrap(), block);
        assert!(out.ends_with(b"TRAILER"));
    }

    #[test]
    fn jpeg_metadata_round_trip_and_strip() {
        let jpeg = encode_jpeg(&synthetic_photo(32, 32, 3), 80).unwrap();
        let key_text = "Q".repeat(300);
        let block = MetadataBlock::new().with("pubkey", &key_text);
        let file = embed_metadata(&jpeg, &block).unwrap();
        assert_eq!(extract_metadata(&file).unwrap(), block);
        assert_eq!(decode_raster(&file).unwrap(), decode_raster(&jpeg).unwrap());
        let stripped = strip_metadata(&file).unwrap();
        assert!(extract_metadata(&stripped).unwrap().is_empty());
        // Re-embedding replaces rather than appends.
        let twice = embed_metadata(&file, &MetadataBlock::new().with("a", "b")).unwrap();
        assert_eq!(extract_metadata(&twice).unwrap().entries, vec![("a".into(), "b".into())]);
    }

    #[test]
    fn png_embed_keeps_pixels() {
        let png = png_of(20, 10);
        let file = embed_metadata(&png, &MetadataBlock::new().with("x", "y")).unwrap();
        assert_eq!(decode_raster(&file).unwrap(), decode_raster(&png).unwrap());
    }

    #[test]
    fn optimize_is_idempotent_on_dimensions_and_never_enlarges() {
        let profile = OptimizationProfile::default();
        for (w, h) in [(2000, 1000), (300, 900), (50, 50)] {
            let once = optimize(&png_of(w, h), &profile).unwrap();
            let twice = optimize(&once, &profile).unwrap();
            let d1 = dims(&once);
            assert!(d1.0 <= w && d1.1 <= h);
            assert_eq!(dims(&twice), d1);
            assert!(extract_metadata(&twice).unwrap().is_empty());
        }
    }

    #[test]
    fn lossless_profile_keeps_pixels() {
        let img = synthetic_photo(100, 80, 4);
        let out = optimize(&encode_png(&img).unwrap(), &OptimizationProfile::lossless()).unwrap();
        assert_eq!(decode_raster(&out).unwrap(), img);
    }

    #[test]
    fn rejects_garbage_and_bad_profiles() {
        assert_eq!(optimize(b"GIF89a....", &OptimizationProfile::default()), Err(PipeError::Unrecognized));
        let bad = OptimizationProfile { max_dimension: 8, ..OptimizationProfile::default() };
        assert!(matches!(optimize(&png_of(10, 10), &bad), Err(PipeError::InvalidProfile(_))));
        let bad = OptimizationProfile { jpeg_quality: 0, ..OptimizationProfile::default() };
        assert!(matches!(optimize(&png_of(10, 10), &bad), Err(PipeError::InvalidProfile(_))));
        let mut cut = png_of(10, 10);
        cut.truncate(cut.len() - 20);
        assert!(optimize(&cut, &OptimizationProfile::default()).is_err());
    }
}
