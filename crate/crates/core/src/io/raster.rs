//! Portable graymap (PGM) rasters: binary `P5` output, `P2`/`P5` input.

use crate::error::{Error, Result};
use crate::hausdorff::FiniteCompact;

/// Row-major grayscale image, row 0 at the top.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graymap {
    width: usize,
    height: usize,
    maxval: u16,
    pixels: Vec<u16>,
}

impl Graymap {
    pub fn new(width: usize, height: usize, maxval: u16) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidInput(format!(
                "raster size {width}x{height} must be positive"
            )));
        }
        if maxval == 0 {
            return Err(Error::InvalidInput("raster maxval must be positive".into()));
        }
        Ok(Graymap {
            width,
            height,
            maxval,
            pixels: vec![0; width * height],
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn maxval(&self) -> u16 {
        self.maxval
    }

    pub fn get(&self, col: usize, row: usize) -> u16 {
        self.pixels[row * self.width + col]
    }

    pub fn set(&mut self, col: usize, row: usize, v: u16) {
        self.pixels[row * self.width + col] = v.min(self.maxval);
    }

    pub fn pixels(&self) -> &[u16] {
        &self.pixels
    }

    /// Number of nonzero pixels in the column/row window `[c0, c1) x [r0, r1)`.
    pub fn count_lit(&self, c0: usize, c1: usize, r0: usize, r1: usize) -> usize {
        (r0..r1.min(self.height))
            .flat_map(|r| (c0..c1.min(self.width)).map(move |c| (c, r)))
            .filter(|&(c, r)| self.get(c, r) > 0)
            .count()
    }

    /// Binary `P5` encoding; two bytes per sample (big endian) above 255.
    pub fn to_pgm(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n{}\n", self.width, self.height, self.maxval).into_bytes();
        if self.maxval < 256 {
            out.extend(self.pixels.iter().map(|&p| p as u8));
        } else {
            out.extend(self.pixels.iter().flat_map(|p| p.to_be_bytes()));
        }
        out
    }
}

struct Header<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Header<'_> {
    fn skip_space(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while self.bytes.get(self.pos).is_some_and(|&b| b != b'\n') {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn token(&mut self) -> Result<&str> {
        self.skip_space();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(|b| !b.is_ascii_whitespace()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::InvalidInput("truncated PGM header".into()));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .map_err(|_| Error::InvalidInput("PGM header is not ASCII".into()))
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        let tok = self.token()?;
        tok.parse()
            .map_err(|_| Error::InvalidInput(format!("bad PGM {what} `{tok}`")))
    }
}

pub fn parse_pgm(bytes: &[u8]) -> Result<Graymap> {
    let mut h = Header { bytes, pos: 0 };
    let magic = h.token()?.to_owned();
    let (width, height) = (h.number("width")?, h.number("height")?);
    let maxval = h.number("maxval")?;
    let maxval =
        u16::try_from(maxval).map_err(|_| Error::InvalidInput(format!("PGM maxval {maxval} exceeds 65535")))?;
    let mut img = Graymap::new(width, height, maxval)?;
    let n = width * height;
    match magic.as_str() {
        "P2" => {
            for i in 0..n {
                let v = h.number("sample")?;
                if v > maxval as usize {
                    return Err(Error::InvalidInput(format!("PGM sample {v} exceeds maxval {maxval}")));
                }
                img.pixels[i] = v as u16;
            }
        }
        "P5" => {
            // Exactly one whitespace byte separates the header from the payload.
            let data = &bytes[(h.pos + 1).min(bytes.len())..];
            let wide = maxval > 255;
            let need = if wide { 2 * n } else { n };
            if data.len() < need {
                return Err(Error::InvalidInput(format!(
                    "PGM payload has {} bytes, expected {need}",
                    data.len()
                )));
            }
            for (i, px) in img.pixels.iter_mut().enumerate() {
                *px = if wide {
                    u16::from_be_bytes([data[2 * i], data[2 * i + 1]])
                } else {
                    data[i] as u16
                };
                if *px > maxval {
                    return Err(Error::InvalidInput(format!("PGM sample {px} exceeds maxval {maxval}")));
                }
            }
        }
        other => return Err(Error::InvalidInput(format!("unsupported raster magic `{other}`"))),
    }
    Ok(img)
}

/// Draws a 1-D or 2-D cloud, lit pixels 255 on black. The bounding box is
/// scaled uniformly to fit and centered; the y axis points up. A 1-D cloud
/// lights full columns.
pub fn render(set: &FiniteCompact, width: usize, height: usize) -> Result<Graymap> {
    let d = set.dim();
    if d > 2 {
        return Err(Error::Unsupported(format!("cannot render a {d}-dimensional cloud")));
    }
    let mut img = Graymap::new(width, height, 255)?;
    let (lo, hi) = set.bounding_box();
    let span_x = hi[0] - lo[0];
    let span_y = if d == 2 { hi[1] - lo[1] } else { 0.0 };
    let (w1, h1) = ((width - 1) as f64, (height - 1) as f64);
    let fit = |span: f64, room: f64| if span > 0.0 { room / span } else { f64::INFINITY };
    let mut scale = fit(span_x, w1).min(if d == 2 { fit(span_y, h1) } else { f64::INFINITY });
    if !scale.is_finite() {
        scale = 0.0;
    }
    let off_x = (w1 - span_x * scale) / 2.0;
    let off_y = (h1 - span_y * scale) / 2.0;
    let clamp = |v: f64, max: usize| (v.round().max(0.0) as usize).min(max);
    for p in set.points() {
        let col = clamp(off_x + (p[0] - lo[0]) * scale, width - 1);
        if d == 1 {
            for row in 0..height {
                img.set(col, row, 255);
            }
        } else {
            let up = clamp(off_y + (p[1] - lo[1]) * scale, height - 1);
            img.set(col, height - 1 - up, 255);
        }
    }
    Ok(img)
}

/// Nonzero pixels as 2-D lattice points of spacing `1 / max(w - 1, h - 1)`,
/// bottom-left pixel at the origin.
pub fn cloud_from_raster(img: &Graymap) -> Result<FiniteCompact> {
    let step = 1.0 / (img.width.max(img.height) - 1).max(1) as f64;
    let mut coords = Vec::new();
    for row in 0..img.height {
        for col in 0..img.width {
            if img.get(col, row) > 0 {
                coords.push(col as f64 * step);
                coords.push((img.height - 1 - row) as f64 * step);
            }
        }
    }
    if coords.is_empty() {
        return Err(Error::InvalidInput("raster has no lit pixels".into()));
    }
    FiniteCompact::from_flat(2, coords)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pgm_round_trip_binary_and_ascii() {
        let mut img = Graymap::new(3, 2, 255).unwrap();
        img.set(0, 0, 255);
        img.set(2, 1, 7);
        let bytes = img.to_pgm();
        assert_eq!(&bytes[..11], b"P5\n3 2\n255\n");
        assert_eq!(parse_pgm(&bytes).unwrap(), img);
        let ascii = b"P2\n# made by hand\n3 2\n255\n255 0 0\n0 0 7\n";
        assert_eq!(parse_pgm(ascii).unwrap(), img);

        let mut wide = Graymap::new(2, 1, 1000).unwrap();
        wide.set(1, 0, 999);
        assert_eq!(parse_pgm(&wide.to_pgm()).unwrap(), wide);
    }

    #[test]
    fn pgm_rejects_garbage() {
        assert!(parse_pgm(b"").is_err());
        assert!(parse_pgm(b"P6\n1 1\n255\n\0\0\0").is_err());
        assert!(parse_pgm(b"P5\n2 2\n255\n\0").is_err());
        assert!(parse_pgm(b"P2\n1 1\n3\n4\n").is_err());
        assert!(parse_pgm(b"P2\n0 1\n3\n").is_err());
    }

    #[test]
    fn singleton_lights_one_pixel() {
        let img = render(&FiniteCompact::from_flat(2, vec![0.3, -1.0]).unwrap(), 9, 5).unwrap();
        assert_eq!(img.count_lit(0, 9, 0, 5), 1);
        assert_eq!(img.get(4, 2), 255);
    }

    #[test]
    fn square_corners_and_aspect() {
        let set = FiniteCompact::from_flat(2, vec![0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 1.0, 1.0]).unwrap();
        let img = render(&set, 11, 5).unwrap();
        // Height limits the scale; the square is centered horizontally.
        for (c, r) in [(3, 0), (7, 0), (3, 4), (7, 4)] {
            assert_eq!(img.get(c, r), 255, "({c}, {r})");
        }
        assert_eq!(img.count_lit(0, 11, 0, 5), 4);
        let back = cloud_from_raster(&render(&set, 5, 5).unwrap()).unwrap();
        assert_eq!(back, set);
    }

    #[test]
    fn one_dimensional_columns() {
        let img = render(&FiniteCompact::from_scalars(&[0.0, 1.0]).unwrap(), 4, 3).unwrap();
        assert_eq!(img.count_lit(0, 1, 0, 3), 3);
        assert_eq!(img.count_lit(3, 4, 0, 3), 3);
        assert_eq!(img.count_lit(1, 3, 0, 3), 0);
    }

    #[test]
    fn blank_raster_is_not_a_cloud() {
        assert!(cloud_from_raster(&Graymap::new(2, 2, 1).unwrap()).is_err());
    }
}
