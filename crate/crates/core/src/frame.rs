//! Grayscale frames, binary PGM I/O and the synthetic star test pattern.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use thiserror::Error;

use crate::compensation::ResidualImage;

/// Errors from frame construction and PGM decoding.
#[derive(Debug, Error)]
pub enum FrameError {
    #[error("frame dimensions must be positive, got {width}x{height}")]
    EmptyDimensions { width: usize, height: usize },
    #[error("pixel buffer holds {actual} values, expected {expected}")]
    BufferSize { expected: usize, actual: usize },
    #[error("cannot read {path}: {source}")]
    Open { path: String, source: io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: String, source: io::Error },
    #[error("malformed PGM header: {0}")]
    MalformedHeader(String),
    #[error("unsupported maxval {0} (only 255 is accepted)")]
    UnsupportedMaxval(u32),
    #[error("truncated pixel data: expected {expected} bytes, found {actual}")]
    Truncated { expected: usize, actual: usize },
    #[error("invalid star pattern: {0}")]
    InvalidStar(String),
}

/// 8-bit grayscale raster, row-major, top-left origin.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl Frame {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self, FrameError> {
        if width == 0 || height == 0 {
            return Err(FrameError::EmptyDimensions { width, height });
        }
        let expected = width * height;
        if pixels.len() != expected {
            return Err(FrameError::BufferSize {
                expected,
                actual: pixels.len(),
            });
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    /// A frame with every pixel set to `value`.
    pub fn filled(width: usize, height: usize, value: u8) -> Result<Self, FrameError> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> u8,
    ) -> Result<Self, FrameError> {
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        Self::new(width, height, pixels)
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    #[inline]
    pub fn row(&self, y: usize) -> &[u8] {
        &self.pixels[y * self.width..(y + 1) * self.width]
    }

    pub fn same_dims(&self, other: &Frame) -> bool {
        self.width == other.width && self.height == other.height
    }

    /// Copies the `w`×`h` window at (`x`, `y`) into a row-major buffer.
    pub fn window(&self, x: usize, y: usize, w: usize, h: usize) -> Vec<u8> {
        let mut out = Vec::with_capacity(w * h);
        for row in y..y + h {
            out.extend_from_slice(&self.row(row)[x..x + w]);
        }
        out
    }

    pub fn into_pixels(self) -> Vec<u8> {
        self.pixels
    }
}

/// Decodes a binary (P5) PGM with maxval 255. `#` comments in the header are skipped.
pub fn decode_pgm(data: &[u8]) -> Result<Frame, FrameError> {
    let mut pos = 0;
    let magic = next_token(data, &mut pos)
        .ok_or_else(|| FrameError::MalformedHeader("missing magic number".into()))?;
    if magic != b"P5" {
        return Err(FrameError::MalformedHeader(format!(
            "expected magic P5, found {:?}",
            String::from_utf8_lossy(magic)
        )));
    }
    let width = header_number(data, &mut pos, "width")?;
    let height = header_number(data, &mut pos, "height")?;
    let maxval = header_number(data, &mut pos, "maxval")?;
    if width == 0 || height == 0 {
        return Err(FrameError::MalformedHeader(format!(
            "zero dimension {width}x{height}"
        )));
    }
    if maxval != 255 {
        return Err(FrameError::UnsupportedMaxval(maxval));
    }
    // Exactly one whitespace byte separates maxval from the raster.
    match data.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos += 1,
        _ => {
            return Err(FrameError::MalformedHeader(
                "missing whitespace after maxval".into(),
            ))
        }
    }
    let (width, height) = (width as usize, height as usize);
    let expected = width * height;
    let payload = &data[pos..];
    if payload.len() < expected {
        return Err(FrameError::Truncated {
            expected,
            actual: payload.len(),
        });
    }
    Frame::new(width, height, payload[..expected].to_vec())
}

fn next_token<'a>(data: &'a [u8], pos: &mut usize) -> Option<&'a [u8]> {
    loop {
        while *pos < data.len() && data[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < data.len() && data[*pos] == b'#' {
            while *pos < data.len() && data[*pos] != b'\n' {
                *pos += 1;
            }
            continue;
        }
        break;
    }
    let start = *pos;
    while *pos < data.len() && !data[*pos].is_ascii_whitespace() && data[*pos] != b'#' {
        *pos += 1;
    }
    (start < *pos).then(|| &data[start..*pos])
}

fn header_number(data: &[u8], pos: &mut usize, what: &str) -> Result<u32, FrameError> {
    let token = next_token(data, pos)
        .ok_or_else(|| FrameError::MalformedHeader(format!("missing {what}")))?;
    std::str::from_utf8(token)
        .ok()
        .and_then(|s| s.parse::<u32>().ok())
        .ok_or_else(|| {
            FrameError::MalformedHeader(format!(
                "bad {what} {:?}",
                String::from_utf8_lossy(token)
            ))
        })
}

/// Canonical P5 encoding: `P5\n<w> <h>\n255\n` followed by the raw raster.
pub fn encode_pgm(frame: &Frame) -> Vec<u8> {
    let header = format!("P5\n{} {}\n255\n", frame.width, frame.height);
    let mut out = Vec::with_capacity(header.len() + frame.pixels.len());
    out.extend_from_slice(header.as_bytes());
    out.extend_from_slice(&frame.pixels);
    out
}

pub fn load_pgm(path: impl AsRef<Path>) -> Result<Frame, FrameError> {
    let path = path.as_ref();
    let data = fs::read(path).map_err(|source| FrameError::Open {
        path: path.display().to_string(),
        source,
    })?;
    decode_pgm(&data)
}

pub fn save_pgm(frame: &Frame, path: impl AsRef<Path>) -> Result<(), FrameError> {
    let path = path.as_ref();
    let wrap = |source| FrameError::Write {
        path: path.display().to_string(),
        source,
    };
    let mut file = fs::File::create(path).map_err(wrap)?;
    file.write_all(&encode_pgm(frame)).map_err(wrap)?;
    Ok(())
}

/// Geometry of the star test pattern: a central square plus eight rays of
/// squares along the axes and both diagonals.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StarSpec {
    pub image_size: usize,
    pub square_size: usize,
    /// Per-axis distance between the centers of consecutive squares on a ray.
    pub pitch: usize,
    /// Saturation of the outward shift used by the displaced star.
    pub max_displacement: usize,
}

impl Default for StarSpec {
    fn default() -> Self {
        Self {
            image_size: 512,
            square_size: 16,
            pitch: 32,
            max_displacement: 7,
        }
    }
}

/// The eight ray directions, counter-clockwise from +x.
pub const RAY_DIRECTIONS: [(i64, i64); 8] = [
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
    (-1, 0),
    (-1, -1),
    (0, -1),
    (1, -1),
];

/// One black square of a rendered star.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StarSquare {
    /// `None` for the central square.
    pub ray: Option<(i64, i64)>,
    /// Position along the ray, 0 for the central square.
    pub index: usize,
    /// Top-left corner in the rendered frame.
    pub origin: (usize, usize),
    /// Per-axis displacement applied relative to the undisplaced star.
    pub shift: (i64, i64),
}

impl StarSpec {
    pub fn validate(&self) -> Result<(), FrameError> {
        if self.image_size == 0 || self.square_size == 0 {
            return Err(FrameError::InvalidStar(
                "image and square sizes must be positive".into(),
            ));
        }
        if !self.image_size.is_multiple_of(self.square_size) {
            return Err(FrameError::InvalidStar(format!(
                "square size {} does not divide image size {}",
                self.square_size, self.image_size
            )));
        }
        if self.pitch < self.square_size {
            return Err(FrameError::InvalidStar(format!(
                "pitch {} is smaller than square size {}",
                self.pitch, self.square_size
            )));
        }
        Ok(())
    }

    /// Outward per-axis shift of square `index` in the displaced star.
    pub fn displacement(&self, index: usize) -> usize {
        index.saturating_sub(1).min(self.max_displacement)
    }

    /// Squares that fit entirely inside the image, central square first.
    pub fn squares(&self, displaced: bool) -> Result<Vec<StarSquare>, FrameError> {
        self.validate()?;
        let size = self.image_size as i64;
        let half = (self.square_size / 2) as i64;
        let centre = size / 2;
        let fits = |ox: i64, oy: i64| {
            let q = self.square_size as i64;
            ox >= 0 && oy >= 0 && ox + q <= size && oy + q <= size
        };

        let mut out = Vec::new();
        if fits(centre - half, centre - half) {
            out.push(StarSquare {
                ray: None,
                index: 0,
                origin: ((centre - half) as usize, (centre - half) as usize),
                shift: (0, 0),
            });
        }
        for &(ux, uy) in &RAY_DIRECTIONS {
            // Rays are bounded by the image, so index never exceeds size / pitch.
            for index in 1..=(self.image_size / self.pitch.max(1)) {
                let d = if displaced {
                    self.displacement(index) as i64
                } else {
                    0
                };
                let reach = (index * self.pitch) as i64;
                let ox = centre + ux * reach - half + ux * d;
                let oy = centre + uy * reach - half + uy * d;
                if fits(ox, oy) {
                    out.push(StarSquare {
                        ray: Some((ux, uy)),
                        index,
                        origin: (ox as usize, oy as usize),
                        shift: (ux * d, uy * d),
                    });
                }
            }
        }
        Ok(out)
    }

    fn render(&self, displaced: bool) -> Result<Frame, FrameError> {
        let squares = self.squares(displaced)?;
        let n = self.image_size;
        let mut pixels = vec![255u8; n * n];
        for sq in squares {
            let (ox, oy) = sq.origin;
            for y in oy..oy + self.square_size {
                pixels[y * n + ox..y * n + ox + self.square_size].fill(0);
            }
        }
        Frame::new(n, n, pixels)
    }
}

/// Renders the star: black squares on a white background.
pub fn generate_star(spec: &StarSpec) -> Result<Frame, FrameError> {
    spec.render(false)
}

/// Renders the star with square `k` of every ray pushed outward by
/// `min(k - 1, max_displacement)` pixels per involved axis.
pub fn generate_displaced_star(spec: &StarSpec) -> Result<Frame, FrameError> {
    spec.render(true)
}

/// Maps a signed residual to a viewable frame: `clamp(v + 128, 0, 255)`.
pub fn export_residual_view(residual: &ResidualImage) -> Frame {
    let pixels = residual
        .values()
        .iter()
        .map(|&v| (v as i32 + 128).clamp(0, 255) as u8)
        .collect();
    Frame::new(residual.width(), residual.height(), pixels)
        .expect("residual dimensions are positive")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decodes_small_p5() {
        let mut data = b"P5\n2 2\n255\n".to_vec();
        data.extend_from_slice(&[0, 255, 128, 64]);
        let f = decode_pgm(&data).unwrap();
        assert_eq!((f.width(), f.height()), (2, 2));
        assert_eq!(f.pixels(), &[0, 255, 128, 64]);
    }

    #[test]
    fn header_comments_and_odd_whitespace() {
        let mut data = b"P5 # magic\n# a comment line\n 3\t1 \n255\n".to_vec();
        data.extend_from_slice(&[1, 2, 3]);
        let f = decode_pgm(&data).unwrap();
        assert_eq!(f.pixels(), &[1, 2, 3]);
    }

    #[test]
    fn rejects_wide_maxval() {
        let mut data = b"P5\n1 1\n65535\n".to_vec();
        data.extend_from_slice(&[0, 0]);
        let err = decode_pgm(&data).unwrap_err();
        assert!(matches!(err, FrameError::UnsupportedMaxval(65535)));
        assert!(err.to_string().contains("unsupported maxval"));
    }

    #[test]
    fn rejects_ascii_pgm_and_garbage() {
        assert!(matches!(
            decode_pgm(b"P2\n1 1\n255\n0\n"),
            Err(FrameError::MalformedHeader(_))
        ));
        assert!(matches!(
            decode_pgm(b"P5\nx 1\n255\n\0"),
            Err(FrameError::MalformedHeader(_))
        ));
        assert!(matches!(
            decode_pgm(b""),
            Err(FrameError::MalformedHeader(_))
        ));
    }

    #[test]
    fn rejects_truncated_raster() {
        let err = decode_pgm(b"P5\n2 2\n255\n\x01\x02").unwrap_err();
        assert!(matches!(
            err,
            FrameError::Truncated {
                expected: 4,
                actual: 2
            }
        ));
    }

    #[test]
    fn missing_file_is_distinct() {
        let err = load_pgm("/nonexistent/definitely/missing.pgm").unwrap_err();
        assert!(matches!(err, FrameError::Open { .. }));
    }

    #[test]
    fn single_pixel_encoding() {
        let f = Frame::new(1, 1, vec![0]).unwrap();
        let bytes = encode_pgm(&f);
        assert_eq!(bytes.len(), 12);
        assert_eq!(*bytes.last().unwrap(), 0);
    }

    #[test]
    fn row_major_payload() {
        let f = Frame::new(2, 1, vec![255, 0]).unwrap();
        let bytes = encode_pgm(&f);
        assert_eq!(&bytes[bytes.len() - 2..], &[0xFF, 0x00]);
        assert!(bytes.starts_with(b"P5\n2 1\n255\n"));
    }

    #[test]
    fn frame_rejects_bad_buffers() {
        assert!(Frame::new(0, 3, vec![]).is_err());
        assert!(matches!(
            Frame::new(2, 2, vec![0; 3]),
            Err(FrameError::BufferSize {
                expected: 4,
                actual: 3
            })
        ));
    }

    #[test]
    fn default_star_has_57_squares() {
        let spec = StarSpec::default();
        assert_eq!(spec.squares(false).unwrap().len(), 57);
        assert_eq!(spec.squares(true).unwrap().len(), 57);
        let star = generate_star(&spec).unwrap();
        assert_eq!(star.get(256, 256), 0);
        assert_eq!(star.get(0, 0), 255);
        assert!(star.pixels().iter().all(|&p| p == 0 || p == 255));
    }

    #[test]
    fn star_spec_validation() {
        let bad = StarSpec {
            square_size: 15,
            ..StarSpec::default()
        };
        assert!(bad.validate().is_err());
        let overlap = StarSpec {
            pitch: 8,
            ..StarSpec::default()
        };
        assert!(generate_star(&overlap).is_err());
    }

    #[test]
    fn residual_view_mapping() {
        let r = ResidualImage::new(3, 1, vec![0, -200, 100]).unwrap();
        assert_eq!(export_residual_view(&r).pixels(), &[128, 0, 228]);
        let zero = ResidualImage::new(2, 2, vec![0; 4]).unwrap();
        assert!(export_residual_view(&zero).pixels().iter().all(|&p| p == 128));
    }
}
