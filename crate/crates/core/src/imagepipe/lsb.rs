//! One bit per pixel in the least significant bit of the blue channel
//! (the only channel of a grayscale image), pixels in row-major order,
//! payload bits most significant first.

use socialkey_qr::RasterImage;

use super::PipeError;

/// Bit error rate above which an LSB payload counts as destroyed. Set from
/// the calibration test below: JPEG at quality 75 leaves the blue LSBs
/// close to coin flips, far above this line.
pub const LSB_BER_THRESHOLD: f64 = 0.05;

fn carrier_channel(img: &RasterImage) -> usize {
    if img.channels() == 3 {
        2
    } else {
        0
    }
}

pub fn embed_lsb(img: &RasterImage, payload: &[u8]) -> Result<RasterImage, PipeError> {
    let bits: Vec<bool> = (0..payload.len() * 8).map(|i| (payload[i / 8] >> (7 - i % 8)) & 1 == 1).collect();
    embed_lsb_bits(img, &bits)
}

pub fn extract_lsb(img: &RasterImage, len: usize) -> Result<Vec<u8>, PipeError> {
    let bits = extract_lsb_bits(img, len * 8)?;
    let mut out = vec![0u8; len];
    for (i, bit) in bits.into_iter().enumerate() {
        out[i / 8] |= (bit as u8) << (7 - i % 8);
    }
    Ok(out)
}

fn check_capacity(img: &RasterImage, bits: usize) -> Result<(), PipeError> {
    let capacity = img.width() * img.height();
    if bits > capacity {
        return Err(PipeError::LsbCapacity { bits, capacity });
    }
    Ok(())
}

pub fn embed_lsb_bits(img: &RasterImage, bits: &[bool]) -> Result<RasterImage, PipeError> {
    check_capacity(img, bits.len())?;
    let mut out = img.clone();
    let ch = carrier_channel(img);
    let stride = img.channels();
    let pixels = out.pixels_mut();
    for (i, &bit) in bits.iter().enumerate() {
        let s = &mut pixels[i * stride + ch];
        *s = (*s & !1) | bit as u8;
    }
    Ok(out)
}

pub fn extract_lsb_bits(img: &RasterImage, count: usize) -> Result<Vec<bool>, PipeError> {
    check_capacity(img, count)?;
    let ch = carrier_channel(img);
    let stride = img.channels();
    Ok((0..count).map(|i| img.pixels()[i * stride + ch] & 1 == 1).collect())
}

/// Fraction of differing bits. Missing bytes on either side count as
/// entirely wrong.
pub fn bit_error_rate(expected: &[u8], actual: &[u8]) -> f64 {
    let n = expected.len().max(actual.len());
    if n == 0 {
        return 0.0;
    }
    let mut errors = 0u32;
    for i in 0..n {
        match (expected.get(i), actual.get(i)) {
            (Some(a), Some(b)) => errors += (a ^ b).count_ones(),
            _ => errors += 8,
        }
    }
    errors as f64 / (n * 8) as f64
}
