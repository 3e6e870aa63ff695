use std::fs;
use std::io::BufWriter;
use std::path::Path;

use image::codecs::png::{CompressionType, FilterType, PngEncoder};
use image::{ExtendedColorType, ImageEncoder, RgbImage};

use super::VideoIoError;

/// An ordered run of same-sized RGB frames. The first frame fixes the
/// dimensions; pushing a frame of another size is rejected.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameSequence {
    frames: Vec<RgbImage>,
}

impl FrameSequence {
    pub fn new(frames: Vec<RgbImage>) -> Result<Self, VideoIoError> {
        if frames.is_empty() {
            return Err(VideoIoError::EmptySequence);
        }
        let (w, h) = (frames[0].width(), frames[0].height());
        for (i, f) in frames.iter().enumerate() {
            if f.width() != w || f.height() != h {
                return Err(VideoIoError::ShapeMismatch {
                    index: i,
                    got_w: f.width(),
                    got_h: f.height(),
                    want_w: w,
                    want_h: h,
                });
            }
        }
        Ok(Self { frames })
    }

    pub fn width(&self) -> u32 {
        self.frames[0].width()
    }

    pub fn height(&self) -> u32 {
        self.frames[0].height()
    }

    pub fn count(&self) -> usize {
        self.frames.len()
    }

    pub fn frame(&self, i: usize) -> &RgbImage {
        &self.frames[i]
    }

    pub fn frames(&self) -> &[RgbImage] {
        &self.frames
    }

    pub fn into_frames(self) -> Vec<RgbImage> {
        self.frames
    }
}

pub fn frame_name(index: usize) -> String {
    format!("frame_{index:05}.png")
}

/// Single-image writer with the same pinned PNG settings as write_frames,
/// so identical pixels always produce identical bytes.
pub fn write_png(img: &RgbImage, path: &Path) -> Result<(), VideoIoError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let file = fs::File::create(path)?;
    let enc = PngEncoder::new_with_quality(
        BufWriter::new(file),
        CompressionType::Fast,
        FilterType::NoFilter,
    );
    enc.write_image(img.as_raw(), img.width(), img.height(), ExtendedColorType::Rgb8)?;
    Ok(())
}

/// Writes `seq` as frame_00000.png, frame_00001.png, ... under `dir`,
/// creating the directory if needed. PNG settings are pinned so identical
/// pixels always produce identical bytes.
pub fn write_frames(seq: &FrameSequence, dir: &Path) -> Result<(), VideoIoError> {
    fs::create_dir_all(dir)?;
    for (i, frame) in seq.frames.iter().enumerate() {
        let file = fs::File::create(dir.join(frame_name(i)))?;
        let enc = PngEncoder::new_with_quality(
            BufWriter::new(file),
            CompressionType::Fast,
            FilterType::NoFilter,
        );
        enc.write_image(
            frame.as_raw(),
            frame.width(),
            frame.height(),
            ExtendedColorType::Rgb8,
        )?;
    }
    Ok(())
}

/// Reads frame_%05d.png files back in index order. Indices must be
/// contiguous from zero and every frame must share the first frame's size.
pub fn read_frames(dir: &Path) -> Result<FrameSequence, VideoIoError> {
    let mut indices = Vec::new();
    for entry in fs::read_dir(dir)? {
        let entry = entry?;
        let name = entry.file_name();
        let Some(name) = name.to_str() else { continue };
        let Some(stem) = name.strip_prefix("frame_").and_then(|s| s.strip_suffix(".png")) else {
            continue;
        };
        if stem.len() == 5 {
            if let Ok(i) = stem.parse::<usize>() {
                indices.push(i);
            }
        }
    }
    if indices.is_empty() {
        return Err(VideoIoError::EmptySequence);
    }
    indices.sort_unstable();
    for (want, &got) in indices.iter().enumerate() {
        if got != want {
            return Err(VideoIoError::MissingFrame(want));
        }
    }
    let mut frames = Vec::with_capacity(indices.len());
    for i in 0..indices.len() {
        let img = image::open(dir.join(frame_name(i)))?.to_rgb8();
        frames.push(img);
    }
    FrameSequence::new(frames)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn solid(w: u32, h: u32, rgb: [u8; 3]) -> RgbImage {
        RgbImage::from_pixel(w, h, image::Rgb(rgb))
    }

    #[test]
    fn round_trip_preserves_every_pixel() {
        let frames: Vec<RgbImage> = (0..81)
            .map(|i| {
                let mut f = solid(32, 24, [i as u8, 0, 255 - i as u8]);
                f.put_pixel(i % 32, (i * 7) % 24, image::Rgb([255, 255, 0]));
                f
            })
            .collect();
        let seq = FrameSequence::new(frames).unwrap();
        let dir = tempfile::tempdir().unwrap();
        write_frames(&seq, dir.path()).unwrap();
        let back = read_frames(dir.path()).unwrap();
        assert_eq!(back, seq);
    }

    #[test]
    fn gap_in_indices_is_missing_frame() {
        let seq = FrameSequence::new(vec![solid(8, 8, [1, 2, 3]); 3]).unwrap();
        let dir = tempfile::tempdir().unwrap();
        write_frames(&seq, dir.path()).unwrap();
        fs::remove_file(dir.path().join("frame_00001.png")).unwrap();
        match read_frames(dir.path()) {
            Err(VideoIoError::MissingFrame(1)) => {}
            other => panic!("expected MissingFrame(1), got {other:?}"),
        }
    }

    #[test]
    fn empty_directory_is_empty_sequence() {
        let dir = tempfile::tempdir().unwrap();
        match read_frames(dir.path()) {
            Err(VideoIoError::EmptySequence) => {}
            other => panic!("expected EmptySequence, got {other:?}"),
        }
    }

    #[test]
    fn mixed_dimensions_rejected_at_construction() {
        let frames = vec![solid(8, 8, [0, 0, 0]), solid(8, 9, [0, 0, 0])];
        match FrameSequence::new(frames) {
            Err(VideoIoError::ShapeMismatch { index: 1, .. }) => {}
            other => panic!("expected ShapeMismatch, got {other:?}"),
        }
    }

    #[test]
    fn identical_sequences_write_identical_bytes() {
        let seq = FrameSequence::new(vec![solid(16, 16, [9, 8, 7]); 2]).unwrap();
        let d1 = tempfile::tempdir().unwrap();
        let d2 = tempfile::tempdir().unwrap();
        write_frames(&seq, d1.path()).unwrap();
        write_frames(&seq, d2.path()).unwrap();
        let a = fs::read(d1.path().join("frame_00000.png")).unwrap();
        let b = fs::read(d2.path().join("frame_00000.png")).unwrap();
        assert_eq!(a, b);
        assert!(!a.is_empty());
    }
}
