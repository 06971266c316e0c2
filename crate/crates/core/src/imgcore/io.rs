//! Grayscale image loading and saving.
//!
//! Decoding goes through the `image` crate (PGM/PNM, PNG, TIFF) and converts to 8-bit luma;
//! outputs are written as binary PGM, which round-trips bit-exactly.

use std::fs;
use std::path::Path;

use image::codecs::pnm::{PnmEncoder, PnmSubtype, SampleEncoding};
use image::{ExtendedColorType, ImageEncoder};

use crate::error::{invalid, Error, Result};
use crate::scalar::Scalar;

use super::raster::GrayImage;

/// Encodes 8-bit samples as a binary PGM (`P5`).
pub fn encode_pgm(width: usize, height: usize, pixels: &[u8]) -> Result<Vec<u8>> {
    if pixels.len() != width * height {
        return Err(invalid(format!(
            "{} samples do not fill {width}x{height}",
            pixels.len()
        )));
    }
    let mut out = Vec::new();
    PnmEncoder::new(&mut out)
        .with_subtype(PnmSubtype::Graymap(SampleEncoding::Binary))
        .write_image(pixels, width as u32, height as u32, ExtendedColorType::L8)
        .map_err(|e| invalid(e.to_string()))?;
    Ok(out)
}

/// Loads any supported file as a gray image with samples in `[0, 1]`.
pub fn load_gray<T: Scalar>(path: &Path) -> Result<GrayImage<T>> {
    let bytes = fs::read(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    decode_gray(&bytes).map_err(|e| Error::Decode {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })
}

pub fn decode_gray<T: Scalar>(bytes: &[u8]) -> Result<GrayImage<T>> {
    let img = image::load_from_memory(bytes).map_err(|e| invalid(e.to_string()))?;
    let luma = img.to_luma8();
    let (w, h) = luma.dimensions();
    GrayImage::from_u8(w as usize, h as usize, luma.as_raw())
}

/// Writes 8-bit samples as PGM, creating parent directories.
pub fn save_pgm_u8(path: &Path, width: usize, height: usize, pixels: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|source| Error::Io {
                path: parent.to_path_buf(),
                source,
            })?;
        }
    }
    fs::write(path, encode_pgm(width, height, pixels)?).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn save_pgm<T: Scalar>(path: &Path, img: &GrayImage<T>) -> Result<()> {
    save_pgm_u8(path, img.width(), img.height(), &img.to_u8())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pgm_round_trip_is_exact() {
        let px: Vec<u8> = (0..=255).cycle().take(17 * 9).collect();
        let bytes = encode_pgm(17, 9, &px).unwrap();
        assert!(bytes.starts_with(b"P5"));
        let img: GrayImage<f64> = decode_gray(&bytes).unwrap();
        assert_eq!((img.width(), img.height()), (17, 9));
        assert_eq!(img.to_u8(), px);
    }

    #[test]
    fn pgm_header_comments_and_small_maxval() {
        let mut bytes = b"P5\n# comment\n2 1\n15\n".to_vec();
        bytes.extend([0u8, 15]);
        let img: GrayImage<f64> = decode_gray(&bytes).unwrap();
        assert_eq!(img.to_u8(), vec![0, 255]);
    }

    #[test]
    fn short_buffer_is_rejected() {
        assert!(encode_pgm(4, 4, &[0; 3]).is_err());
        assert!(decode_gray::<f64>(b"P5\n4 4\n255\n\0\0").is_err());
    }
}
