//! Binary PGM (P5, 8-bit) rasters.

use std::io::{self, Write};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    pub width: usize,
    pub height: usize,
    /// Row-major, top row first.
    pub pixels: Vec<u8>,
}

fn bad(msg: &str) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, format!("PGM: {msg}"))
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> io::Result<Self> {
        if pixels.len() != width * height {
            return Err(bad("pixel count does not match dimensions"));
        }
        Ok(GrayImage { width, height, pixels })
    }

    pub fn from_pgm(data: &[u8]) -> io::Result<Self> {
        let mut pos = 0;
        let mut token = || -> io::Result<&[u8]> {
            loop {
                match data.get(pos) {
                    Some(b'#') => {
                        while data.get(pos).is_some_and(|&c| c != b'\n') {
                            pos += 1;
                        }
                    }
                    Some(c) if c.is_ascii_whitespace() => pos += 1,
                    Some(_) => break,
                    None => return Err(bad("unexpected end of header")),
                }
            }
            let start = pos;
            while data.get(pos).is_some_and(|c| !c.is_ascii_whitespace()) {
                pos += 1;
            }
            Ok(&data[start..pos])
        };
        if token()? != b"P5" {
            return Err(bad("only binary P5 files are supported"));
        }
        let mut number = || -> io::Result<usize> {
            std::str::from_utf8(token()?).ok().and_then(|s| s.parse().ok()).ok_or_else(|| bad("malformed header field"))
        };
        let width = number()?;
        let height = number()?;
        let maxval = number()?;
        if maxval == 0 || maxval > 255 {
            return Err(bad("only 8-bit maxval is supported"));
        }
        // Exactly one whitespace byte separates the header from the raster.
        let start = pos + 1;
        let end = start + width * height;
        if data.len() < end {
            return Err(bad("raster truncated"));
        }
        GrayImage::new(width, height, data[start..end].to_vec())
    }

    pub fn write_pgm<W: Write>(&self, mut out: W) -> io::Result<()> {
        write!(out, "P5\n{} {}\n255\n", self.width, self.height)?;
        out.write_all(&self.pixels)
    }

    pub fn to_pgm(&self) -> Vec<u8> {
        let mut buf = Vec::with_capacity(self.pixels.len() + 20);
        self.write_pgm(&mut buf).expect("writing to a Vec cannot fail");
        buf
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_and_comments() {
        let img = GrayImage::new(3, 2, vec![0, 10, 20, 30, 40, 255]).unwrap();
        assert_eq!(GrayImage::from_pgm(&img.to_pgm()).unwrap(), img);
        let mut with_comment = b"P5\n# made by hand\n3 2\n255\n".to_vec();
        with_comment.extend_from_slice(&img.pixels);
        assert_eq!(GrayImage::from_pgm(&with_comment).unwrap(), img);
    }

    #[test]
    fn rejects_other_formats() {
        assert!(GrayImage::from_pgm(b"P2\n1 1\n255\n0").is_err());
        assert!(GrayImage::from_pgm(b"P5\n2 2\n255\n\x00").is_err());
        assert!(GrayImage::from_pgm(b"P5\n1 1\n65535\n\x00\x00").is_err());
    }
}
