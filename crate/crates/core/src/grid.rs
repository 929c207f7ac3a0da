//! Dense image-aligned grids: binary masks and scalar cost grids.
//!
//! Both are row-major with index `n * width + m`, where `m` is the column and
//! `n` the row. Row 0 is the top of the image.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Mask {
    width: usize,
    height: usize,
    data: Vec<bool>,
}

impl Mask {
    pub fn new(width: usize, height: usize) -> Self {
        Mask {
            width,
            height,
            data: vec![false; width * height],
        }
    }

    pub fn from_vec(width: usize, height: usize, data: Vec<bool>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::DimensionMismatch(format!(
                "mask data has {} entries, expected {}x{}",
                data.len(),
                width,
                height
            )));
        }
        Ok(Mask {
            width,
            height,
            data,
        })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for n in 0..height {
            for m in 0..width {
                data.push(f(m, n));
            }
        }
        Mask {
            width,
            height,
            data,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn get(&self, m: usize, n: usize) -> bool {
        self.data[n * self.width + m]
    }

    #[inline]
    pub fn set(&mut self, m: usize, n: usize, value: bool) {
        self.data[n * self.width + m] = value;
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.data
    }

    /// Number of set pixels, `|M|`.
    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.data.iter().any(|&b| b)
    }

    /// Square (Chebyshev) dilation for `radius > 0`, erosion for `radius < 0`.
    /// Pixels outside the image count as unset.
    pub fn morph(&self, radius: i32) -> Mask {
        if radius == 0 {
            return self.clone();
        }
        let dilate = radius > 0;
        let r = radius.unsigned_abs() as usize;
        let (w, h) = (self.width, self.height);
        // Separable: a square window is the product of a row window and a column window.
        let pass = |src: &[bool], horizontal: bool| -> Vec<bool> {
            let mut out = vec![false; w * h];
            for n in 0..h {
                for m in 0..w {
                    let (pos, len) = if horizontal { (m, w) } else { (n, h) };
                    let lo = pos.saturating_sub(r);
                    let hi = pos + r;
                    let at = |k: usize| {
                        if horizontal {
                            src[n * w + k]
                        } else {
                            src[k * w + m]
                        }
                    };
                    out[n * w + m] = if dilate {
                        (lo..=hi.min(len - 1)).any(at)
                    } else {
                        pos >= r && hi < len && (lo..=hi).all(at)
                    };
                }
            }
            out
        };
        let rows = pass(&self.data, true);
        let data = pass(&rows, false);
        Mask {
            width: w,
            height: h,
            data,
        }
    }
}

/// Scalar grid aligned with the camera image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl Grid {
    pub fn zeros(width: usize, height: usize) -> Self {
        Grid {
            width,
            height,
            values: vec![0.0; width * height],
        }
    }

    pub fn from_vec(width: usize, height: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != width * height {
            return Err(Error::DimensionMismatch(format!(
                "grid data has {} entries, expected {}x{}",
                values.len(),
                width,
                height
            )));
        }
        Ok(Grid {
            width,
            height,
            values,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn get(&self, m: usize, n: usize) -> f64 {
        self.values[n * self.width + m]
    }

    #[inline]
    pub fn set(&mut self, m: usize, n: usize, value: f64) {
        self.values[n * self.width + m] = value;
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }
}
