//! Byte-level PNG chunk and JPEG segment handling: metadata blocks,
//! stripping, and end-of-image detection.

use super::{MetadataBlock, PipeError};

pub const PNG_SIGNATURE: &[u8; 8] = b"\x89PNG\r\n\x1a\n";
/// Identifier at the start of our JPEG APP1 payload.
pub const JPEG_META_ID: &[u8; 7] = b"QKMeta\0";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageFormat {
    Png,
    Jpeg,
}

pub fn sniff(bytes: &[u8]) -> Option<ImageFormat> {
    if bytes.starts_with(PNG_SIGNATURE) {
        Some(ImageFormat::Png)
    } else if bytes.starts_with(&[0xFF, 0xD8]) {
        Some(ImageFormat::Jpeg)
    } else {
        None
    }
}

fn malformed(msg: &str) -> PipeError {
    PipeError::Malformed(msg.to_string())
}

/// Byte range of one PNG chunk including length, type and CRC.
#[derive(Debug, Clone, Copy)]
pub struct Chunk {
    pub kind: [u8; 4],
    pub start: usize,
    pub end: usize,
}

impl Chunk {
    pub fn data<'a>(&self, bytes: &'a [u8]) -> &'a [u8] {
        &bytes[self.start + 8..self.end - 4]
    }

    pub fn is_critical(&self) -> bool {
        self.kind[0] & 0x20 == 0
    }
}

/// Chunks up to and including IEND.
pub fn png_chunks(bytes: &[u8]) -> Result<Vec<Chunk>, PipeError> {
    if !bytes.starts_with(PNG_SIGNATURE) {
        return Err(PipeError::Unrecognized);
    }
    let mut pos = PNG_SIGNATURE.len();
    let mut out = Vec::new();
    loop {
        let header = bytes.get(pos..pos + 8).ok_or_else(|| malformed("PNG chunk header truncated"))?;
        let len = u32::from_be_bytes(header[..4].try_into().unwrap()) as usize;
        let kind: [u8; 4] = header[4..].try_into().unwrap();
        let end = pos
            .checked_add(12 + len)
            .filter(|&e| e <= bytes.len())
            .ok_or_else(|| malformed("PNG chunk truncated"))?;
        out.push(Chunk { kind, start: pos, end });
        pos = end;
        if &kind == b"IEND" {
            return Ok(out);
        }
    }
}

fn png_chunk(kind: &[u8; 4], data: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(data.len() + 12);
    out.extend_from_slice(&(data.len() as u32).to_be_bytes());
    out.extend_from_slice(kind);
    out.extend_from_slice(data);
    let mut crc = crc32fast::Hasher::new();
    crc.update(kind);
    crc.update(data);
    out.extend_from_slice(&crc.finalize().to_be_bytes());
    out
}

/// Byte range of one JPEG marker segment. The entropy-coded data following
/// an SOS header is counted as part of that segment.
#[derive(Debug, Clone, Copy)]
pub struct Segment {
    pub marker: u8,
    pub start: usize,
    pub end: usize,
}

impl Segment {
    /// Payload after the marker and length field.
    pub fn payload<'a>(&self, bytes: &'a [u8]) -> &'a [u8] {
        if has_length(self.marker) {
            let len = u16::from_be_bytes([bytes[self.start + 2], bytes[self.start + 3]]) as usize;
            &bytes[self.start + 4..self.start + 2 + len]
        } else {
            &[]
        }
    }
}

fn has_length(marker: u8) -> bool {
    !matches!(marker, 0x01 | 0xD0..=0xD9)
}

/// Segments from SOI through EOI inclusive.
pub fn jpeg_segments(bytes: &[u8]) -> Result<Vec<Segment>, PipeError> {
    if !bytes.starts_with(&[0xFF, 0xD8]) {
        return Err(PipeError::Unrecognized);
    }
    let mut out = vec![Segment { marker: 0xD8, start: 0, end: 2 }];
    let mut pos = 2;
    loop {
        if bytes.get(pos) != Some(&0xFF) {
            return Err(malformed("expected JPEG marker"));
        }
        let start = pos;
        while bytes.get(pos) == Some(&0xFF) {
            pos += 1;
        }
        let marker = *bytes.get(pos).ok_or_else(|| malformed("JPEG ends before EOI"))?;
        pos += 1;
        if marker == 0xD9 {
            out.push(Segment { marker, start, end: pos });
            return Ok(out);
        }
        if has_length(marker) {
            let len = bytes
                .get(pos..pos + 2)
                .map(|b| u16::from_be_bytes([b[0], b[1]]) as usize)
                .ok_or_else(|| malformed("JPEG segment length truncated"))?;
            if len < 2 || pos + len > bytes.len() {
                return Err(malformed("JPEG segment truncated"));
            }
            pos += len;
        }
        if marker == 0xDA {
            pos = skip_entropy_data(bytes, pos)?;
        }
        out.push(Segment { marker, start, end: pos });
    }
}

fn skip_entropy_data(bytes: &[u8], mut pos: usize) -> Result<usize, PipeError> {
    while pos + 1 < bytes.len() {
        if bytes[pos] != 0xFF {
            pos += 1;
            continue;
        }
        match bytes[pos + 1] {
            0x00 | 0xD0..=0xD7 => pos += 2,
            0xFF => pos += 1,
            _ => return Ok(pos),
        }
    }
    Err(malformed("JPEG entropy data runs past end of file"))
}

/// Length of the image proper: through PNG IEND or JPEG EOI.
pub fn image_end(bytes: &[u8]) -> Result<usize, PipeError> {
    match sniff(bytes) {
        Some(ImageFormat::Png) => Ok(png_chunks(bytes)?.last().unwrap().end),
        Some(ImageFormat::Jpeg) => Ok(jpeg_segments(bytes)?.last().unwrap().end),
        None => Err(PipeError::Unrecognized),
    }
}

fn is_our_app1(bytes: &[u8], seg: &Segment) -> bool {
    seg.marker == 0xE1 && seg.payload(bytes).starts_with(JPEG_META_ID)
}

fn is_jfif(bytes: &[u8], seg: &Segment) -> bool {
    seg.marker == 0xE0 && seg.payload(bytes).starts_with(b"JFIF\0")
}

pub fn extract(bytes: &[u8]) -> Result<MetadataBlock, PipeError> {
    let mut block = MetadataBlock::default();
    match sniff(bytes).ok_or(PipeError::Unrecognized)? {
        ImageFormat::Png => {
            for chunk in png_chunks(bytes)? {
                if &chunk.kind == b"tEXt" {
                    let data = chunk.data(bytes);
                    if let Some(nul) = data.iter().position(|&b| b == 0) {
                        push_pair(&mut block, &data[..nul], &data[nul + 1..]);
                    }
                }
            }
        }
        ImageFormat::Jpeg => {
            for seg in jpeg_segments(bytes)? {
                if is_our_app1(bytes, &seg) {
                    let mut fields = seg.payload(bytes)[JPEG_META_ID.len()..].split(|&b| b == 0);
                    while let (Some(k), Some(v)) = (fields.next(), fields.next()) {
                        if !k.is_empty() {
                            push_pair(&mut block, k, v);
                        }
                    }
                }
            }
        }
    }
    Ok(block)
}

fn push_pair(block: &mut MetadataBlock, key: &[u8], value: &[u8]) {
    block.entries.push((String::from_utf8_lossy(key).into_owned(), String::from_utf8_lossy(value).into_owned()));
}

/// Replaces any existing metadata block with `block`. Pixel data is untouched.
pub fn embed(bytes: &[u8], block: &MetadataBlock) -> Result<Vec<u8>, PipeError> {
    block.validate()?;
    match sniff(bytes).ok_or(PipeError::Unrecognized)? {
        ImageFormat::Png => {
            let chunks = png_chunks(bytes)?;
            let end = chunks.last().unwrap().end;
            let mut out = PNG_SIGNATURE.to_vec();
            for (i, chunk) in chunks.iter().enumerate() {
                if &chunk.kind == b"tEXt" {
                    continue;
                }
                out.extend_from_slice(&bytes[chunk.start..chunk.end]);
                if i == 0 {
                    for (k, v) in &block.entries {
                        let mut data = k.as_bytes().to_vec();
                        data.push(0);
                        data.extend_from_slice(v.as_bytes());
                        out.extend_from_slice(&png_chunk(b"tEXt", &data));
                    }
                }
            }
            out.extend_from_slice(&bytes[end..]);
            Ok(out)
        }
        ImageFormat::Jpeg => {
            let segments = jpeg_segments(bytes)?;
            let end = segments.last().unwrap().end;
            let mut payload = JPEG_META_ID.to_vec();
            for (k, v) in &block.entries {
                payload.extend_from_slice(k.as_bytes());
                payload.push(0);
                payload.extend_from_slice(v.as_bytes());
                payload.push(0);
            }
            if payload.len() + 2 > u16::MAX as usize {
                return Err(PipeError::MetadataTooLarge(payload.len()));
            }
            let mut app1 = vec![0xFF, 0xE1];
            app1.extend_from_slice(&((payload.len() + 2) as u16).to_be_bytes());
            app1.extend_from_slice(&payload);

            // After SOI and a leading JFIF APP0, where readers expect APP1.
            let insert_after = if segments.len() > 1 && is_jfif(bytes, &segments[1]) { 1 } else { 0 };
            let mut out = Vec::with_capacity(bytes.len() + app1.len());
            for (i, seg) in segments.iter().enumerate() {
                if is_our_app1(bytes, seg) {
                    continue;
                }
                out.extend_from_slice(&bytes[seg.start..seg.end]);
                if i == insert_after && !block.entries.is_empty() {
                    out.extend_from_slice(&app1);
                }
            }
            out.extend_from_slice(&bytes[end..]);
            Ok(out)
        }
    }
}

/// Drops ancillary PNG chunks and JPEG APPn (other than JFIF) and COM
/// segments. Bytes after the end of the image are kept.
pub fn strip(bytes: &[u8]) -> Result<Vec<u8>, PipeError> {
    match sniff(bytes).ok_or(PipeError::Unrecognized)? {
        ImageFormat::Png => {
            let chunks = png_chunks(bytes)?;
            let end = chunks.last().unwrap().end;
            let mut out = PNG_SIGNATURE.to_vec();
            for chunk in chunks.iter().filter(|c| c.is_critical()) {
                out.extend_from_slice(&bytes[chunk.start..chunk.end]);
            }
            out.extend_from_slice(&bytes[end..]);
            Ok(out)
        }
        ImageFormat::Jpeg => {
            let segments = jpeg_segments(bytes)?;
            let end = segments.last().unwrap().end;
            let mut out = Vec::with_capacity(bytes.len());
            for seg in &segments {
                let metadata = matches!(seg.marker, 0xE0..=0xEF | 0xFE) && !is_jfif(bytes, seg);
                if !metadata {
                    out.extend_from_slice(&bytes[seg.start..seg.end]);
                }
            }
            out.extend_from_slice(&bytes[end..]);
            Ok(out)
        }
    }
}
