//! Bit framing: `preamble(32) ∥ length(16, BE) ∥ payload ∥ CRC-16`.
//!
//! The CRC is CRC-16/CCITT-FALSE (poly 0x1021, init 0xFFFF, unreflected)
//! over the two length bytes followed by the payload. Bits are MSB-first.

use super::image::GrayImage;
use thiserror::Error;

/// 32-bit sync word (the CCSDS attached sync marker).
pub const PREAMBLE: u32 = 0x1ACF_FC1D;
pub const PREAMBLE_BITS: usize = 32;
pub const LENGTH_BITS: usize = 16;
pub const CRC_BITS: usize = 16;
pub const MAX_PAYLOAD_BYTES: usize = u16::MAX as usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FrameError {
    #[error("payload of {0} bytes exceeds the 65535-byte frame limit")]
    PayloadTooLarge(usize),
    #[error("frame does not start with the preamble")]
    PreambleMismatch,
    #[error("frame truncated: need {needed} bits, have {have}")]
    Truncated { needed: usize, have: usize },
    #[error("CRC mismatch: frame carries {carried:#06x}, payload gives {computed:#06x}")]
    CrcMismatch { carried: u16, computed: u16 },
    #[error("payload of {payload} bytes does not match a {width}x{height} image")]
    DimensionMismatch { payload: usize, width: usize, height: usize },
}

pub fn crc16(bytes: &[u8]) -> u16 {
    let mut crc: u16 = 0xFFFF;
    for &b in bytes {
        crc ^= (b as u16) << 8;
        for _ in 0..8 {
            crc = if crc & 0x8000 != 0 { (crc << 1) ^ 0x1021 } else { crc << 1 };
        }
    }
    crc
}

pub fn push_bits(out: &mut Vec<bool>, value: u32, width: usize) {
    for i in (0..width).rev() {
        out.push((value >> i) & 1 == 1);
    }
}

fn read_bits(bits: &[bool]) -> u32 {
    bits.iter().fold(0, |acc, &b| (acc << 1) | u32::from(b))
}

pub fn preamble_bits() -> Vec<bool> {
    let mut bits = Vec::with_capacity(PREAMBLE_BITS);
    push_bits(&mut bits, PREAMBLE, PREAMBLE_BITS);
    bits
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub payload: Vec<u8>,
}

impl Frame {
    pub fn new(payload: Vec<u8>) -> Result<Self, FrameError> {
        if payload.len() > MAX_PAYLOAD_BYTES {
            return Err(FrameError::PayloadTooLarge(payload.len()));
        }
        Ok(Frame { payload })
    }

    pub fn bit_len(&self) -> usize {
        PREAMBLE_BITS + LENGTH_BITS + 8 * self.payload.len() + CRC_BITS
    }

    fn checked_bytes(payload: &[u8]) -> Vec<u8> {
        let mut bytes = Vec::with_capacity(payload.len() + 2);
        bytes.extend_from_slice(&(payload.len() as u16).to_be_bytes());
        bytes.extend_from_slice(payload);
        bytes
    }

    pub fn to_bits(&self) -> Vec<bool> {
        let mut bits = Vec::with_capacity(self.bit_len());
        push_bits(&mut bits, PREAMBLE, PREAMBLE_BITS);
        let checked = Self::checked_bytes(&self.payload);
        for &b in &checked {
            push_bits(&mut bits, b as u32, 8);
        }
        push_bits(&mut bits, crc16(&checked) as u32, CRC_BITS);
        bits
    }

    /// Parses a frame from the start of `bits`; trailing bits are ignored.
    pub fn from_bits(bits: &[bool]) -> Result<Self, FrameError> {
        let header = PREAMBLE_BITS + LENGTH_BITS;
        if bits.len() < header {
            return Err(FrameError::Truncated { needed: header, have: bits.len() });
        }
        if read_bits(&bits[..PREAMBLE_BITS]) != PREAMBLE {
            return Err(FrameError::PreambleMismatch);
        }
        let len = read_bits(&bits[PREAMBLE_BITS..header]) as usize;
        let needed = header + 8 * len + CRC_BITS;
        if bits.len() < needed {
            return Err(FrameError::Truncated { needed, have: bits.len() });
        }
        let payload: Vec<u8> = bits[header..header + 8 * len].chunks(8).map(|c| read_bits(c) as u8).collect();
        let carried = read_bits(&bits[needed - CRC_BITS..needed]) as u16;
        let computed = crc16(&Self::checked_bytes(&payload));
        if carried != computed {
            return Err(FrameError::CrcMismatch { carried, computed });
        }
        Ok(Frame { payload })
    }
}

/// Frames the raw raster of an 8-bit image.
pub fn encode_image(image: &GrayImage) -> Result<Vec<bool>, FrameError> {
    Ok(Frame::new(image.pixels.clone())?.to_bits())
}

/// Inverse of [`encode_image`]; dimensions travel out of band.
pub fn decode_image(bits: &[bool], width: usize, height: usize) -> Result<GrayImage, FrameError> {
    let frame = Frame::from_bits(bits)?;
    if frame.payload.len() != width * height {
        return Err(FrameError::DimensionMismatch { payload: frame.payload.len(), width, height });
    }
    Ok(GrayImage { width, height, pixels: frame.payload })
}
