//! Streaming luma-plane readers: raw YUV420, Y4M, and directories of
//! numbered PNG/PGM frames. Only the luma plane is decoded; chroma
//! bytes are skipped.

use std::fs::File;
use std::io::{BufReader, Read, Seek, SeekFrom};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::frame::LumaFrame;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameGeometry {
    pub width: usize,
    pub height: usize,
    pub bit_depth: u8,
}

enum Source {
    RawYuv420 {
        reader: BufReader<File>,
        geometry: FrameGeometry,
    },
    Y4m {
        decoder: y4m::Decoder<BufReader<File>>,
        width: usize,
        height: usize,
        bit_depth: u8,
    },
    ImageDir {
        files: Vec<PathBuf>,
        next: usize,
    },
}

/// Lazy frame sequence: one `LumaFrame` at a time, constant memory in
/// the number of frames.
pub struct FrameReader {
    path: PathBuf,
    source: Source,
    frame_index: usize,
}

/// Last run of digits in a file stem, for numeric ordering
/// (frame_2 sorts before frame_10).
fn numeric_key(path: &Path) -> (u64, String) {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("");
    let digits: String = stem
        .chars()
        .rev()
        .skip_while(|c| !c.is_ascii_digit())
        .take_while(|c| c.is_ascii_digit())
        .collect::<Vec<_>>()
        .into_iter()
        .rev()
        .collect();
    (digits.parse().unwrap_or(u64::MAX), stem.to_string())
}

impl FrameReader {
    pub fn open(path: &Path, geometry: FrameGeometry) -> Result<Self> {
        let source = if path.is_dir() {
            let mut files: Vec<PathBuf> = std::fs::read_dir(path)
                .map_err(|e| Error::io(path, e))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| {
                    matches!(
                        p.extension().and_then(|e| e.to_str()),
                        Some("png") | Some("pgm")
                    )
                })
                .collect();
            if files.is_empty() {
                return Err(Error::FormatUnknown(path.to_path_buf()));
            }
            files.sort_by_key(|p| numeric_key(p));
            Source::ImageDir { files, next: 0 }
        } else {
            match path.extension().and_then(|e| e.to_str()) {
                Some("y4m") => {
                    let file = File::open(path).map_err(|e| Error::io(path, e))?;
                    let decoder = y4m::decode(BufReader::new(file))
                        .map_err(|e| Error::parse(path, format!("y4m header: {e}")))?;
                    let bit_depth = decoder.get_bit_depth();
                    if bit_depth != 8 && bit_depth != 10 {
                        return Err(Error::FormatUnknown(path.to_path_buf()));
                    }
                    Source::Y4m {
                        width: decoder.get_width(),
                        height: decoder.get_height(),
                        bit_depth: bit_depth as u8,
                        decoder,
                    }
                }
                Some("yuv") | Some("raw") => {
                    let file = File::open(path).map_err(|e| Error::io(path, e))?;
                    Source::RawYuv420 {
                        reader: BufReader::new(file),
                        geometry,
                    }
                }
                _ => return Err(Error::FormatUnknown(path.to_path_buf())),
            }
        };
        Ok(FrameReader {
            path: path.to_path_buf(),
            source,
            frame_index: 0,
        })
    }

    /// Next luma plane, or `None` at a clean end of input.
    pub fn next_frame(&mut self) -> Result<Option<LumaFrame>> {
        let index = self.frame_index;
        let frame = match &mut self.source {
            Source::RawYuv420 { reader, geometry } => {
                read_raw_frame(reader, *geometry, &self.path, index)?
            }
            Source::Y4m {
                decoder,
                width,
                height,
                bit_depth,
            } => match decoder.read_frame() {
                Ok(frame) => {
                    let y = frame.get_y_plane();
                    Some(plane_from_bytes(
                        y, *width, *height, *bit_depth, &self.path, index,
                    )?)
                }
                Err(y4m::Error::EOF) => None,
                Err(e) => return Err(Error::parse(&self.path, format!("frame {index}: {e}"))),
            },
            Source::ImageDir { files, next } => {
                if *next >= files.len() {
                    None
                } else {
                    let file = &files[*next];
                    *next += 1;
                    Some(read_image_luma(file)?)
                }
            }
        };
        if frame.is_some() {
            self.frame_index += 1;
        }
        Ok(frame)
    }
}

fn plane_from_bytes(
    bytes: &[u8],
    width: usize,
    height: usize,
    bit_depth: u8,
    path: &Path,
    frame: usize,
) -> Result<LumaFrame> {
    let n = width * height;
    let samples: Vec<f32> = if bit_depth == 8 {
        if bytes.len() < n {
            return Err(Error::TruncatedFile {
                path: path.to_path_buf(),
                frame,
            });
        }
        bytes[..n].iter().map(|&b| b as f32).collect()
    } else {
        if bytes.len() < 2 * n {
            return Err(Error::TruncatedFile {
                path: path.to_path_buf(),
                frame,
            });
        }
        bytes[..2 * n]
            .chunks_exact(2)
            .map(|c| u16::from_le_bytes([c[0], c[1]]) as f32)
            .collect()
    };
    Ok(LumaFrame::new(width, height, bit_depth, samples))
}

/// Read one frame of planar YUV 4:2:0; the luma plane is kept, the
/// two chroma planes are skipped in place.
fn read_raw_frame(
    reader: &mut BufReader<File>,
    geometry: FrameGeometry,
    path: &Path,
    frame: usize,
) -> Result<Option<LumaFrame>> {
    let bytes_per_sample = if geometry.bit_depth == 8 { 1 } else { 2 };
    let y_bytes = geometry.width * geometry.height * bytes_per_sample;
    let chroma_bytes = 2 * (geometry.width / 2) * (geometry.height / 2) * bytes_per_sample;
    let mut buf = vec![0u8; y_bytes];
    let mut filled = 0;
    while filled < y_bytes {
        let n = reader
            .read(&mut buf[filled..])
            .map_err(|e| Error::io(path, e))?;
        if n == 0 {
            if filled == 0 {
                return Ok(None);
            }
            return Err(Error::TruncatedFile {
                path: path.to_path_buf(),
                frame,
            });
        }
        filled += n;
    }
    reader
        .seek(SeekFrom::Current(chroma_bytes as i64))
        .map_err(|e| Error::io(path, e))?;
    // A frame whose chroma ran past EOF is caught on the next read.
    let luma = plane_from_bytes(
        &buf,
        geometry.width,
        geometry.height,
        geometry.bit_depth,
        path,
        frame,
    )?;
    Ok(Some(luma))
}

fn read_image_luma(path: &Path) -> Result<LumaFrame> {
    let img = image::open(path).map_err(|e| Error::parse(path, e.to_string()))?;
    Ok(match img {
        image::DynamicImage::ImageLuma16(plane) => {
            let (w, h) = (plane.width() as usize, plane.height() as usize);
            LumaFrame::new(
                w,
                h,
                10,
                plane.into_raw().into_iter().map(|v| v as f32).collect(),
            )
        }
        other => {
            let plane = other.to_luma8();
            let (w, h) = (plane.width() as usize, plane.height() as usize);
            LumaFrame::new(
                w,
                h,
                8,
                plane.into_raw().into_iter().map(|v| v as f32).collect(),
            )
        }
    })
}
