use std::fs;
use std::path::Path;

use super::{DataError, Dataset};
use crate::matrix::DenseMatrix;

pub const IDX_IMAGES_MAGIC: u32 = 0x0000_0803;
pub const IDX_LABELS_MAGIC: u32 = 0x0000_0801;

fn read_file(path: &Path) -> Result<Vec<u8>, DataError> {
    fs::read(path).map_err(|source| DataError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn be_u32(bytes: &[u8], offset: usize) -> Result<u32, DataError> {
    bytes
        .get(offset..offset + 4)
        .map(|b| u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
        .ok_or(DataError::Truncated {
            expected: offset + 4,
            found: bytes.len(),
        })
}

/// Loads an IDX image file (and optional IDX label file). Pixels are
/// flattened row-major and scaled to `[0, 1]`.
pub fn load_idx(images_path: &Path, labels_path: Option<&Path>) -> Result<Dataset, DataError> {
    let images = read_file(images_path)?;
    let labels = labels_path.map(read_file).transpose()?;
    let name = images_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    decode_idx(&images, labels.as_deref(), name)
}

pub(crate) fn decode_idx(
    images: &[u8],
    labels: Option<&[u8]>,
    name: String,
) -> Result<Dataset, DataError> {
    let magic = be_u32(images, 0)?;
    if magic != IDX_IMAGES_MAGIC {
        return Err(DataError::WrongMagic {
            expected: IDX_IMAGES_MAGIC,
            found: magic,
        });
    }
    let count = be_u32(images, 4)? as usize;
    let rows = be_u32(images, 8)? as usize;
    let cols = be_u32(images, 12)? as usize;
    let d = rows * cols;
    let expected = 16 + count * d;
    if images.len() < expected {
        return Err(DataError::Truncated {
            expected,
            found: images.len(),
        });
    }
    let features: Vec<f64> = images[16..expected]
        .iter()
        .map(|&b| f64::from(b) / 255.0)
        .collect();

    let labels = match labels {
        None => None,
        Some(bytes) => {
            let magic = be_u32(bytes, 0)?;
            if magic != IDX_LABELS_MAGIC {
                return Err(DataError::WrongMagic {
                    expected: IDX_LABELS_MAGIC,
                    found: magic,
                });
            }
            let n = be_u32(bytes, 4)? as usize;
            if n != count {
                return Err(DataError::CountMismatch {
                    images: count,
                    labels: n,
                });
            }
            let payload = bytes.get(8..8 + n).ok_or(DataError::Truncated {
                expected: 8 + n,
                found: bytes.len(),
            })?;
            Some(payload.iter().map(|&b| b as usize).collect())
        }
    };
    Dataset::new(DenseMatrix::from_vec(count, d, features), labels, name)
}

#[cfg(test)]
pub(crate) fn encode_images(count: u32, rows: u32, cols: u32, pixels: &[u8]) -> Vec<u8> {
    let mut out = Vec::new();
    for v in [IDX_IMAGES_MAGIC, count, rows, cols] {
        out.extend_from_slice(&v.to_be_bytes());
    }
    out.extend_from_slice(pixels);
    out
}
