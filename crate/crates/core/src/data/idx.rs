//! IDX container decoding (the MNIST distribution format).
//!
//! An IDX file is a big-endian magic word whose third byte is the element
//! type (0x08 = unsigned byte) and fourth byte the number of dimensions,
//! followed by one big-endian `u32` per dimension and the payload.

use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use flate2::read::GzDecoder;

use super::DataError;

/// Magic word of a rank-1 unsigned-byte file (labels).
pub const LABEL_MAGIC: u32 = 0x0000_0801;
/// Magic word of a rank-3 unsigned-byte file (images).
pub const IMAGE_MAGIC: u32 = 0x0000_0803;

/// Images and labels decoded from a pair of IDX files.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawImageSet {
    pub rows: usize,
    pub cols: usize,
    /// `count * rows * cols` intensities, image-major, row-major within an image.
    pub pixels: Vec<u8>,
    pub labels: Vec<u8>,
}

impl RawImageSet {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn image(&self, i: usize) -> &[u8] {
        let sz = self.rows * self.cols;
        &self.pixels[i * sz..(i + 1) * sz]
    }
}

fn be_u32(bytes: &[u8], at: usize) -> Result<u32, DataError> {
    bytes
        .get(at..at + 4)
        .map(|b| u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
        .ok_or(DataError::TruncatedPayload {
            expected: at + 4,
            found: bytes.len(),
        })
}

/// Decodes an image file, returning `(count, rows, cols, pixels)`.
pub fn parse_idx_images(bytes: &[u8]) -> Result<(usize, usize, usize, Vec<u8>), DataError> {
    let magic = be_u32(bytes, 0)?;
    if magic != IMAGE_MAGIC {
        return Err(DataError::BadMagic { found: magic, expected: IMAGE_MAGIC });
    }
    let count = be_u32(bytes, 4)? as usize;
    let rows = be_u32(bytes, 8)? as usize;
    let cols = be_u32(bytes, 12)? as usize;
    let expected = 16 + count * rows * cols;
    if bytes.len() != expected {
        return Err(DataError::TruncatedPayload { expected, found: bytes.len() });
    }
    Ok((count, rows, cols, bytes[16..].to_vec()))
}

pub fn parse_idx_labels(bytes: &[u8]) -> Result<Vec<u8>, DataError> {
    let magic = be_u32(bytes, 0)?;
    if magic != LABEL_MAGIC {
        return Err(DataError::BadMagic { found: magic, expected: LABEL_MAGIC });
    }
    let count = be_u32(bytes, 4)? as usize;
    let expected = 8 + count;
    if bytes.len() != expected {
        return Err(DataError::TruncatedPayload { expected, found: bytes.len() });
    }
    let labels = bytes[8..].to_vec();
    if let Some(&bad) = labels.iter().find(|&&l| l > 9) {
        return Err(DataError::LabelOutOfRange(bad));
    }
    Ok(labels)
}

/// Decodes an image file and its label file into one consistent set.
pub fn parse_idx(image_bytes: &[u8], label_bytes: &[u8]) -> Result<RawImageSet, DataError> {
    let (count, rows, cols, pixels) = parse_idx_images(image_bytes)?;
    let labels = parse_idx_labels(label_bytes)?;
    if labels.len() != count {
        return Err(DataError::CountMismatch { images: count, labels: labels.len() });
    }
    Ok(RawImageSet { rows, cols, pixels, labels })
}

/// Reads a file, transparently inflating it when it carries the gzip magic.
pub fn read_maybe_gzip(path: &Path) -> Result<Vec<u8>, DataError> {
    let raw = fs::read(path).map_err(|e| DataError::io(path, e))?;
    if raw.starts_with(&[0x1f, 0x8b]) {
        let mut out = Vec::new();
        GzDecoder::new(&raw[..])
            .read_to_end(&mut out)
            .map_err(|e| DataError::io(path, e))?;
        Ok(out)
    } else {
        Ok(raw)
    }
}

fn locate(dir: &Path, stem: &str) -> Result<PathBuf, DataError> {
    let candidates = [
        stem.to_string(),
        format!("{stem}.gz"),
        stem.replacen("-idx", ".idx", 1),
        format!("{}.gz", stem.replacen("-idx", ".idx", 1)),
    ];
    candidates
        .iter()
        .map(|c| dir.join(c))
        .find(|p| p.is_file())
        .ok_or_else(|| DataError::MissingFile(dir.join(stem)))
}

/// The two official MNIST splits.
#[derive(Debug, Clone)]
pub struct MnistRaw {
    pub train: RawImageSet,
    pub test: RawImageSet,
}

/// Loads the four standard MNIST files (plain or `.gz`) from `dir`.
pub fn load_mnist(dir: &Path) -> Result<MnistRaw, DataError> {
    let read = |stem: &str| read_maybe_gzip(&locate(dir, stem)?);
    let train = parse_idx(&read("train-images-idx3-ubyte")?, &read("train-labels-idx1-ubyte")?)?;
    let test = parse_idx(&read("t10k-images-idx3-ubyte")?, &read("t10k-labels-idx1-ubyte")?)?;
    Ok(MnistRaw { train, test })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn encode_images(count: u32, rows: u32, cols: u32, pixels: &[u8]) -> Vec<u8> {
        let mut v = Vec::new();
        for x in [IMAGE_MAGIC, count, rows, cols] {
            v.extend_from_slice(&x.to_be_bytes());
        }
        v.extend_from_slice(pixels);
        v
    }

    pub(crate) fn encode_labels(labels: &[u8]) -> Vec<u8> {
        let mut v = Vec::new();
        v.extend_from_slice(&LABEL_MAGIC.to_be_bytes());
        v.extend_from_slice(&(labels.len() as u32).to_be_bytes());
        v.extend_from_slice(labels);
        v
    }

    #[test]
    fn magic_words_match_published_format() {
        // 0x0801 and 0x0803 are 2049 and 2051
        assert_eq!(LABEL_MAGIC, 2049);
        assert_eq!(IMAGE_MAGIC, 2051);
    }

    #[test]
    fn decodes_small_pair() {
        let pixels: Vec<u8> = (0..2 * 3 * 2).map(|i| i as u8).collect();
        let set = parse_idx(&encode_images(2, 3, 2, &pixels), &encode_labels(&[7, 1])).unwrap();
        assert_eq!(set.len(), 2);
        assert_eq!((set.rows, set.cols), (3, 2));
        assert_eq!(set.image(1), &[6, 7, 8, 9, 10, 11]);
        assert_eq!(set.labels, vec![7, 1]);
    }

    #[test]
    fn swapped_files_report_bad_magic() {
        let imgs = encode_images(1, 1, 1, &[0]);
        let lbls = encode_labels(&[0]);
        assert!(matches!(parse_idx(&lbls, &imgs), Err(DataError::BadMagic { .. })));
    }

    #[test]
    fn count_mismatch_is_an_error() {
        let imgs = encode_images(9, 1, 1, &[0; 9]);
        let lbls = encode_labels(&[0; 10]);
        assert!(matches!(
            parse_idx(&imgs, &lbls),
            Err(DataError::CountMismatch { images: 9, labels: 10 })
        ));
    }

    #[test]
    fn short_payload_is_truncated() {
        let mut imgs = encode_images(3, 2, 2, &[0; 12]);
        imgs.pop();
        assert!(matches!(parse_idx_images(&imgs), Err(DataError::TruncatedPayload { .. })));
        assert!(matches!(parse_idx_labels(&[0, 0, 8]), Err(DataError::TruncatedPayload { .. })));
    }

    #[test]
    fn labels_above_nine_are_rejected() {
        assert!(matches!(parse_idx_labels(&encode_labels(&[3, 12])), Err(DataError::LabelOutOfRange(12))));
    }

    #[test]
    fn gzip_files_are_inflated() {
        use flate2::write::GzEncoder;
        use std::io::Write;
        let dir = tempfile::tempdir().unwrap();
        let payload = encode_labels(&[1, 2, 3]);
        let mut enc = GzEncoder::new(Vec::new(), flate2::Compression::default());
        enc.write_all(&payload).unwrap();
        let path = dir.path().join("x.gz");
        fs::write(&path, enc.finish().unwrap()).unwrap();
        assert_eq!(read_maybe_gzip(&path).unwrap(), payload);
    }
}
