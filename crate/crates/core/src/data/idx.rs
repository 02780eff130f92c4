use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// Big-endian magic for unsigned-byte rank-3 (image) IDX files.
pub const IMAGE_MAGIC: u32 = 0x0000_0803;
/// Big-endian magic for unsigned-byte rank-1 (label) IDX files.
pub const LABEL_MAGIC: u32 = 0x0000_0801;

pub const IMAGE_SIDE: usize = 28;
pub const IMAGE_PIXELS: usize = IMAGE_SIDE * IMAGE_SIDE;

/// Payload of a parsed IDX file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IdxContent {
    Images(Vec<[u8; IMAGE_PIXELS]>),
    Labels(Vec<u8>),
}

fn read_u32(bytes: &[u8], offset: usize) -> Result<u32> {
    let end = offset + 4;
    if bytes.len() < end {
        return Err(Error::IdxTruncated { needed: end, found: bytes.len() });
    }
    Ok(u32::from_be_bytes([bytes[offset], bytes[offset + 1], bytes[offset + 2], bytes[offset + 3]]))
}

/// Decode an IDX byte buffer into images or labels.
///
/// Only the two unsigned-byte layouts used by the MNIST family are accepted:
/// rank-3 28x28 images and rank-1 labels. Payload length must match the
/// declared dimensions exactly.
pub fn parse_idx(bytes: &[u8]) -> Result<IdxContent> {
    let magic = read_u32(bytes, 0)?;
    match magic {
        IMAGE_MAGIC => {
            let count = read_u32(bytes, 4)? as usize;
            let rows = read_u32(bytes, 8)?;
            let cols = read_u32(bytes, 12)?;
            if rows as usize != IMAGE_SIDE || cols as usize != IMAGE_SIDE {
                return Err(Error::IdxGeometry { rows, cols });
            }
            let payload = count.checked_mul(IMAGE_PIXELS).ok_or(Error::IdxOverflow)?;
            let needed = payload.checked_add(16).ok_or(Error::IdxOverflow)?;
            if bytes.len() != needed {
                return Err(Error::IdxTruncated { needed, found: bytes.len() });
            }
            let images = bytes[16..]
                .chunks_exact(IMAGE_PIXELS)
                .map(|chunk| {
                    let mut img = [0u8; IMAGE_PIXELS];
                    img.copy_from_slice(chunk);
                    img
                })
                .collect();
            Ok(IdxContent::Images(images))
        }
        LABEL_MAGIC => {
            let count = read_u32(bytes, 4)? as usize;
            let needed = count.checked_add(8).ok_or(Error::IdxOverflow)?;
            if bytes.len() != needed {
                return Err(Error::IdxTruncated { needed, found: bytes.len() });
            }
            Ok(IdxContent::Labels(bytes[8..].to_vec()))
        }
        other => Err(Error::IdxBadMagic(other)),
    }
}

pub fn read_idx_file(path: &Path) -> Result<IdxContent> {
    if !path.is_file() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    parse_idx(&fs::read(path)?)
}

pub fn write_idx_images(path: &Path, images: &[[u8; IMAGE_PIXELS]]) -> Result<()> {
    let mut bytes = Vec::with_capacity(16 + images.len() * IMAGE_PIXELS);
    bytes.extend_from_slice(&IMAGE_MAGIC.to_be_bytes());
    bytes.extend_from_slice(&(images.len() as u32).to_be_bytes());
    bytes.extend_from_slice(&(IMAGE_SIDE as u32).to_be_bytes());
    bytes.extend_from_slice(&(IMAGE_SIDE as u32).to_be_bytes());
    for img in images {
        bytes.extend_from_slice(img);
    }
    fs::write(path, bytes)?;
    Ok(())
}

pub fn write_idx_labels(path: &Path, labels: &[u8]) -> Result<()> {
    let mut bytes = Vec::with_capacity(8 + labels.len());
    bytes.extend_from_slice(&LABEL_MAGIC.to_be_bytes());
    bytes.extend_from_slice(&(labels.len() as u32).to_be_bytes());
    bytes.extend_from_slice(labels);
    fs::write(path, bytes)?;
    Ok(())
}

/// Matched image and label arrays loaded from a pair of IDX files.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawImageSet {
    pub images: Vec<[u8; IMAGE_PIXELS]>,
    pub labels: Vec<u8>,
}

impl RawImageSet {
    pub fn new(images: Vec<[u8; IMAGE_PIXELS]>, labels: Vec<u8>) -> Result<Self> {
        if images.len() != labels.len() {
            return Err(Error::CountMismatch { images: images.len(), labels: labels.len() });
        }
        if let Some(&bad) = labels.iter().find(|&&l| l > 9) {
            return Err(Error::LabelRange(bad));
        }
        Ok(Self { images, labels })
    }

    pub fn load(images_path: &Path, labels_path: &Path) -> Result<Self> {
        let images = match read_idx_file(images_path)? {
            IdxContent::Images(images) => images,
            IdxContent::Labels(_) => return Err(Error::IdxBadMagic(LABEL_MAGIC)),
        };
        let labels = match read_idx_file(labels_path)? {
            IdxContent::Labels(labels) => labels,
            IdxContent::Images(_) => return Err(Error::IdxBadMagic(IMAGE_MAGIC)),
        };
        Self::new(images, labels)
    }

    pub fn save(&self, images_path: &Path, labels_path: &Path) -> Result<()> {
        write_idx_images(images_path, &self.images)?;
        write_idx_labels(labels_path, &self.labels)
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }
}
