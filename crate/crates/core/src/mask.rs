//! Run-length-encoded binary masks.
//!
//! Bitmaps are flattened in column-major order (pixel `(row, col)` sits at
//! flat index `row + height * col`), the same layout COCO tooling uses. Runs
//! alternate between background and foreground and always start with a
//! background run, which may be empty. In canonical form no run other than the
//! first is empty.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest pixel count accepted for a single mask.
pub const MAX_PIXELS: u64 = 1 << 32;

/// A dense binary image, stored column-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bitmap {
    height: u32,
    width: u32,
    data: Vec<bool>,
}

impl Bitmap {
    pub fn zeros(height: u32, width: u32) -> Self {
        let n = height as usize * width as usize;
        Bitmap {
            height,
            width,
            data: vec![false; n],
        }
    }

    /// Builds a bitmap from row-major rows. All rows must have equal length.
    pub fn from_rows(rows: &[Vec<bool>]) -> Result<Self> {
        let height = rows.len();
        let width = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != width) {
            return Err(Error::Dimension("ragged bitmap rows".into()));
        }
        let mut bitmap = Bitmap::zeros(height as u32, width as u32);
        for (r, row) in rows.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                bitmap.set(r, c, v);
            }
        }
        Ok(bitmap)
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.data[row + self.height as usize * col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: bool) {
        let h = self.height as usize;
        self.data[row + h * col] = value;
    }

    /// Column-major pixel values.
    pub fn as_column_major(&self) -> &[bool] {
        &self.data
    }

    pub fn count_ones(&self) -> u64 {
        self.data.iter().filter(|&&v| v).count() as u64
    }
}

/// Accumulates runs, merging adjacent runs of equal value and dropping empty ones.
#[derive(Debug, Default)]
struct RunBuilder {
    counts: Vec<u64>,
    // value of the last run in `counts`
    last: bool,
}

impl RunBuilder {
    fn push(&mut self, value: bool, len: u64) {
        if len == 0 {
            return;
        }
        if self.counts.is_empty() {
            if value {
                self.counts.push(0);
            }
            self.counts.push(len);
            self.last = value;
        } else if value == self.last {
            *self.counts.last_mut().unwrap() += len;
        } else {
            self.counts.push(len);
            self.last = value;
        }
    }

    fn finish(mut self) -> Vec<u64> {
        if self.counts.is_empty() {
            self.counts.push(0);
        }
        self.counts
    }
}

/// A binary mask in canonical run-length form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RleMask {
    height: u32,
    width: u32,
    counts: Vec<u64>,
}

fn check_dims(height: u32, width: u32) -> Result<u64> {
    if height == 0 || width == 0 {
        return Err(Error::Dimension(format!(
            "mask dimensions must be positive, got {height}x{width}"
        )));
    }
    let n = height as u64 * width as u64;
    if n > MAX_PIXELS {
        return Err(Error::Dimension(format!(
            "mask of {height}x{width} exceeds {MAX_PIXELS} pixels"
        )));
    }
    Ok(n)
}

impl RleMask {
    /// Builds a mask from raw run lengths, normalising interior empty runs.
    pub fn new(height: u32, width: u32, counts: Vec<u64>) -> Result<Self> {
        let n = check_dims(height, width)?;
        let total = counts
            .iter()
            .try_fold(0u64, |acc, &c| acc.checked_add(c))
            .ok_or_else(|| Error::CorruptMask("run lengths overflow".into()))?;
        if total != n {
            return Err(Error::CorruptMask(format!(
                "run lengths sum to {total}, expected {height}x{width} = {n}"
            )));
        }
        let canonical = counts.iter().skip(1).all(|&c| c > 0) && !counts.is_empty();
        let counts = if canonical {
            counts
        } else {
            let mut builder = RunBuilder::default();
            for (i, &c) in counts.iter().enumerate() {
                builder.push(i % 2 == 1, c);
            }
            builder.finish()
        };
        Ok(RleMask {
            height,
            width,
            counts,
        })
    }

    /// An all-background mask.
    pub fn empty(height: u32, width: u32) -> Result<Self> {
        let n = check_dims(height, width)?;
        Ok(RleMask {
            height,
            width,
            counts: vec![n],
        })
    }

    /// Mask of the half-open rectangle `rows × cols`, clipped to the canvas.
    pub fn from_rect(
        height: u32,
        width: u32,
        rows: std::ops::Range<u32>,
        cols: std::ops::Range<u32>,
    ) -> Result<Self> {
        check_dims(height, width)?;
        let (top, bottom) = (rows.start.min(height), rows.end.min(height));
        let (left, right) = (cols.start.min(width), cols.end.min(width));
        let h = height as u64;
        let mut builder = RunBuilder::default();
        if top >= bottom || left >= right {
            builder.push(false, h * width as u64);
            return Ok(RleMask {
                height,
                width,
                counts: builder.finish(),
            });
        }
        builder.push(false, h * left as u64);
        for _ in left..right {
            builder.push(false, top as u64);
            builder.push(true, (bottom - top) as u64);
            builder.push(false, (height - bottom) as u64);
        }
        builder.push(false, h * (width - right) as u64);
        Ok(RleMask {
            height,
            width,
            counts: builder.finish(),
        })
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn pixel_count(&self) -> u64 {
        self.height as u64 * self.width as u64
    }

    /// Number of foreground pixels: the sum of the odd-indexed runs.
    pub fn area(&self) -> u64 {
        self.counts.iter().skip(1).step_by(2).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.area() == 0
    }

    fn same_dims(&self, other: &RleMask) -> Result<()> {
        if self.height != other.height || self.width != other.width {
            return Err(Error::Dimension(format!(
                "mask dimensions differ: {}x{} vs {}x{}",
                self.height, self.width, other.height, other.width
            )));
        }
        Ok(())
    }

    /// `|self ∩ other|`, computed by walking both run lists in lockstep.
    pub fn intersection_area(&self, other: &RleMask) -> Result<u64> {
        self.same_dims(other)?;
        let (a, b) = (&self.counts, &other.counts);
        let (mut i, mut j) = (0usize, 0usize);
        let (mut left_a, mut left_b) = (a[0], b[0]);
        let mut total = 0u64;
        loop {
            // skip exhausted runs; the value of run k is k % 2
            while left_a == 0 {
                i += 1;
                if i == a.len() {
                    return Ok(total);
                }
                left_a = a[i];
            }
            while left_b == 0 {
                j += 1;
                if j == b.len() {
                    return Ok(total);
                }
                left_b = b[j];
            }
            let step = left_a.min(left_b);
            if i % 2 == 1 && j % 2 == 1 {
                total += step;
            }
            left_a -= step;
            left_b -= step;
        }
    }

    pub fn union_area(&self, other: &RleMask) -> Result<u64> {
        let inter = self.intersection_area(other)?;
        Ok(self.area() + other.area() - inter)
    }

    /// Expands the runs to a dense bitmap.
    pub fn decode(&self) -> Bitmap {
        let mut data = Vec::with_capacity(self.pixel_count() as usize);
        for (k, &c) in self.counts.iter().enumerate() {
            data.extend(std::iter::repeat_n(k % 2 == 1, c as usize));
        }
        Bitmap {
            height: self.height,
            width: self.width,
            data,
        }
    }
}

/// Encodes a bitmap into canonical run-length form.
pub fn rle_encode(bitmap: &Bitmap) -> Result<RleMask> {
    check_dims(bitmap.height, bitmap.width)?;
    let mut builder = RunBuilder::default();
    let mut current = false;
    let mut run = 0u64;
    for &v in &bitmap.data {
        if v != current {
            builder.push(current, run);
            current = v;
            run = 0;
        }
        run += 1;
    }
    builder.push(current, run);
    Ok(RleMask {
        height: bitmap.height,
        width: bitmap.width,
        counts: builder.finish(),
    })
}

/// Decodes a mask, re-checking the run-length sum.
pub fn rle_decode(mask: &RleMask) -> Result<Bitmap> {
    let total: u64 = mask.counts.iter().sum();
    if total != mask.pixel_count() {
        return Err(Error::CorruptMask(format!(
            "run lengths sum to {total}, expected {}",
            mask.pixel_count()
        )));
    }
    Ok(mask.decode())
}

pub fn mask_area(mask: &RleMask) -> u64 {
    mask.area()
}

pub fn intersection_area(a: &RleMask, b: &RleMask) -> Result<u64> {
    a.intersection_area(b)
}

#[derive(Serialize, Deserialize)]
struct RleJson {
    size: [u32; 2],
    counts: Vec<u64>,
}

impl Serialize for RleMask {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        RleJson {
            size: [self.height, self.width],
            counts: self.counts.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RleMask {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = RleJson::deserialize(deserializer)?;
        RleMask::new(raw.size[0], raw.size[1], raw.counts).map_err(serde::de::Error::custom)
    }
}
