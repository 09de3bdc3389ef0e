use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numeric::pairwise_sum_by;

/// Samples further than this many bandwidths from `x` contribute nothing
/// to a Gaussian estimate at `x` (`exp(-72)` relative).
const GAUSSIAN_CUTOFF: f64 = 12.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Kernel {
    #[default]
    Gaussian,
    Epanechnikov,
}

impl Kernel {
    pub fn eval(self, u: f64) -> f64 {
        match self {
            Kernel::Gaussian => (-0.5 * u * u).exp() / (2.0 * PI).sqrt(),
            Kernel::Epanechnikov => {
                if u.abs() <= 1.0 {
                    0.75 * (1.0 - u * u)
                } else {
                    0.0
                }
            }
        }
    }

    fn radius(self) -> f64 {
        match self {
            Kernel::Gaussian => GAUSSIAN_CUTOFF,
            Kernel::Epanechnikov => 1.0,
        }
    }
}

impl std::str::FromStr for Kernel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gaussian" => Ok(Kernel::Gaussian),
            "epanechnikov" => Ok(Kernel::Epanechnikov),
            other => Err(Error::InvalidConfig(format!("unknown kernel {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Bandwidth {
    #[default]
    Silverman,
    Fixed(f64),
}

/// Silverman's rule of thumb, `0.9 * min(sd, IQR / 1.34) * n^(-1/5)`.
///
/// Degenerate samples follow R's `bw.nrd0`: a zero IQR falls back to the
/// standard deviation, then to `|x[0]|`, then to 1.
pub fn silverman_bandwidth(samples: &[f64]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = samples.len() as f64;
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mean = pairwise_sum_by(sorted.iter(), |&x| x) / n;
    let sd = if samples.len() > 1 {
        (pairwise_sum_by(sorted.iter(), |&x| (x - mean) * (x - mean)) / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    let iqr = quantile(&sorted, 0.75) - quantile(&sorted, 0.25);
    let mut scale = sd.min(iqr / 1.34);
    for fallback in [sd, samples[0].abs(), 1.0] {
        if scale > 0.0 {
            break;
        }
        scale = fallback;
    }
    Ok(0.9 * scale * n.powf(-0.2))
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// `f(x) = 1/(n h) * sum_i K((x - c_i) / h)`.
#[derive(Debug, Clone)]
pub struct KernelDensity {
    samples: Vec<f64>,
    bandwidth: f64,
    kernel: Kernel,
}

impl KernelDensity {
    pub fn new(samples: &[f64], kernel: Kernel, bandwidth: Bandwidth) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptyInput);
        }
        if samples.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidConfig("samples must be finite".into()));
        }
        let h = match bandwidth {
            Bandwidth::Silverman => silverman_bandwidth(samples)?,
            Bandwidth::Fixed(h) => h,
        };
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::NonpositiveBandwidth(h));
        }
        let mut samples = samples.to_vec();
        samples.sort_by(f64::total_cmp);
        Ok(KernelDensity {
            samples,
            bandwidth: h,
            kernel,
        })
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn kernel(&self) -> Kernel {
        self.kernel
    }

    pub fn min(&self) -> f64 {
        self.samples[0]
    }

    pub fn max(&self) -> f64 {
        self.samples[self.samples.len() - 1]
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        let h = self.bandwidth;
        let reach = self.kernel.radius() * h;
        let start = self.samples.partition_point(|&c| c < x - reach);
        let end = self.samples.partition_point(|&c| c <= x + reach);
        let sum = pairwise_sum_by(self.samples[start..end].iter(), |&c| {
            self.kernel.eval((x - c) / h)
        });
        sum / (self.samples.len() as f64 * h)
    }
}
