//! Spectral kernel banks: log-warped Hann windows with a DC low-pass, plus
//! user-supplied kernels.
//!
//! For a bank with `M` kernels and overlap `R`, the warped axis is
//! `w(lambda) = ln(lambda / lambda_floor)` (clamped to 0 below the floor).
//! Kernels `2..=M` are Hann windows of width `R * delta` centered at
//! `(m - 2 + R/2) * delta` with `delta = w(lambda_max) / (M - 1)`, so every
//! band-pass kernel vanishes on `[0, lambda_floor]`. Kernel 1 collects the
//! translates below the first center, which makes `G = sum g_m^2` equal to
//! `3R/8` on all of `[0, lambda_max]` when `R >= 3`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hann window, `cos^2(pi t)` on `|t| < 1/2`.
fn hann(t: f64) -> f64 {
    if t.abs() >= 0.5 {
        0.0
    } else {
        0.5 + 0.5 * (2.0 * PI * t).cos()
    }
}

/// Interior value of `sum g_m^2` for `R`-fold overlapping Hann windows.
pub fn hann_tight_constant(overlap: usize) -> f64 {
    3.0 * overlap as f64 / 8.0
}

pub type KernelFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Shape {
    LogHann(LogHann),
    Manual(Vec<KernelFn>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct LogHann {
    overlap: usize,
    lambda_floor: f64,
    lambda_max: f64,
    centers: Vec<f64>,
    width: f64,
}

impl LogHann {
    fn warp(&self, lambda: f64) -> f64 {
        if lambda <= self.lambda_floor {
            0.0
        } else {
            (lambda / self.lambda_floor).ln()
        }
    }

    fn values(&self, lambda: f64, out: &mut Vec<f64>) {
        let w = self.warp(lambda);
        let delta = self.width / self.overlap as f64;
        let first = self.centers[0];
        let lowpass: f64 = (1..=self.overlap + 1)
            .map(|k| hann((w - first + k as f64 * delta) / self.width).powi(2))
            .sum();
        out.push(lowpass.sqrt());
        out.extend(self.centers.iter().map(|&c| hann((w - c) / self.width)));
    }
}

/// Per-eigenvalue rescaling that flattens `G` on a spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    /// `(eigenvalue, scale)` pairs sorted by eigenvalue.
    pub table: Vec<(f64, f64)>,
    /// Eigenvalues within this distance of a table entry use its scale.
    pub match_tol: f64,
}

impl Normalization {
    fn scale_at(&self, lambda: f64) -> Option<f64> {
        let idx = self.table.partition_point(|&(l, _)| l < lambda - self.match_tol);
        self.table
            .get(idx)
            .filter(|&&(l, _)| (l - lambda).abs() <= self.match_tol)
            .map(|&(_, s)| s)
    }
}

/// A family of nonnegative spectral kernels `g_1, ..., g_M`.
#[derive(Clone)]
pub struct KernelBank {
    shape: Shape,
    target: f64,
    normalization: Option<Normalization>,
}

impl fmt::Debug for KernelBank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = f.debug_struct("KernelBank");
        match &self.shape {
            Shape::LogHann(h) => s.field("log_hann", h),
            Shape::Manual(k) => s.field("manual_kernels", &k.len()),
        };
        s.field("target", &self.target)
            .field("normalization", &self.normalization)
            .finish()
    }
}

/// Serializable description of a log-Hann bank.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BankExport {
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "R")]
    pub r: usize,
    pub centers: Vec<f64>,
    pub width: f64,
    pub lambda_floor: f64,
    pub lambda_max: f64,
    pub target: f64,
    pub normalization: Option<Normalization>,
}

/// Builds a log-warped Hann bank covering `[0, lambda_max]`.
///
/// The warp floor is the smallest positive value in `spectrum_for_floor`
/// (falling back to `1e-4 * lambda_max`); it is pulled down to
/// `lambda_max / 2` when the nonzero spectrum is a single point.
pub fn hann_bank(
    lambda_max: f64,
    kernels: usize,
    overlap: usize,
    spectrum_for_floor: &[f64],
) -> Result<KernelBank> {
    if !(lambda_max > 0.0) || !lambda_max.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "lambda_max must be positive, got {lambda_max}"
        )));
    }
    if kernels < 2 {
        return Err(Error::InvalidParameter(format!(
            "a Hann bank needs at least 2 kernels, got {kernels}"
        )));
    }
    if overlap < 2 {
        return Err(Error::InvalidParameter(format!(
            "overlap must be at least 2, got {overlap}"
        )));
    }
    let mut floor = spectrum_for_floor
        .iter()
        .copied()
        .filter(|&l| l > 0.0)
        .fold(f64::INFINITY, f64::min);
    if !floor.is_finite() {
        floor = 1e-4 * lambda_max;
    }
    if (lambda_max / floor).ln() < 1e-6 {
        floor = lambda_max / 2.0;
    }
    let w_max = (lambda_max / floor).ln();
    let delta = w_max / (kernels - 1) as f64;
    let half = overlap as f64 / 2.0;
    let centers = (0..kernels - 1).map(|k| (k as f64 + half) * delta).collect();
    Ok(KernelBank {
        shape: Shape::LogHann(LogHann {
            overlap,
            lambda_floor: floor,
            lambda_max,
            centers,
            width: overlap as f64 * delta,
        }),
        target: hann_tight_constant(overlap),
        normalization: None,
    })
}

impl KernelBank {
    /// A bank of arbitrary kernels; `G` is normalized towards 1.
    pub fn manual(kernels: Vec<KernelFn>) -> Self {
        KernelBank {
            shape: Shape::Manual(kernels),
            target: 1.0,
            normalization: None,
        }
    }

    /// Convenience for closures.
    pub fn from_fns<F>(kernels: Vec<F>) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::manual(kernels.into_iter().map(|k| Arc::new(k) as KernelFn).collect())
    }

    pub fn with_target(mut self, target: f64) -> Self {
        self.target = target;
        self
    }

    pub fn from_export(spec: &BankExport) -> Result<Self> {
        if spec.centers.len() + 1 != spec.m {
            return Err(Error::InvalidParameter("center count must be M - 1".into()));
        }
        Ok(KernelBank {
            shape: Shape::LogHann(LogHann {
                overlap: spec.r,
                lambda_floor: spec.lambda_floor,
                lambda_max: spec.lambda_max,
                centers: spec.centers.clone(),
                width: spec.width,
            }),
            target: spec.target,
            normalization: spec.normalization.clone(),
        })
    }

    /// Export for log-Hann banks; manual banks have no portable form.
    pub fn export(&self) -> Option<BankExport> {
        match &self.shape {
            Shape::LogHann(h) => Some(BankExport {
                m: h.centers.len() + 1,
                r: h.overlap,
                centers: h.centers.clone(),
                width: h.width,
                lambda_floor: h.lambda_floor,
                lambda_max: h.lambda_max,
                target: self.target,
                normalization: self.normalization.clone(),
            }),
            Shape::Manual(_) => None,
        }
    }

    pub fn len(&self) -> usize {
        match &self.shape {
            Shape::LogHann(h) => h.centers.len() + 1,
            Shape::Manual(k) => k.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The constant that `G` is normalized to.
    pub fn target(&self) -> f64 {
        self.target
    }

    pub fn overlap(&self) -> Option<usize> {
        match &self.shape {
            Shape::LogHann(h) => Some(h.overlap),
            Shape::Manual(_) => None,
        }
    }

    pub fn lambda_floor(&self) -> Option<f64> {
        match &self.shape {
            Shape::LogHann(h) => Some(h.lambda_floor),
            Shape::Manual(_) => None,
        }
    }

    pub fn normalization(&self) -> Option<&Normalization> {
        self.normalization.as_ref()
    }

    /// Whether kernel 1 is nonzero at the origin.
    pub fn includes_dc(&self) -> bool {
        self.raw(0.0)[0] > 0.0
    }

    /// Indices of kernels with `g(0) = 0`.
    pub fn band_pass(&self) -> Vec<usize> {
        self.raw(0.0)
            .iter()
            .enumerate()
            .filter(|(_, &g)| g == 0.0)
            .map(|(m, _)| m)
            .collect()
    }

    fn raw(&self, lambda: f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len());
        match &self.shape {
            Shape::LogHann(h) => h.values(lambda, &mut out),
            Shape::Manual(k) => out.extend(k.iter().map(|g| g(lambda))),
        }
        out
    }

    /// Kernel values at `lambda`, normalization included.
    pub fn evaluate(&self, lambda: f64) -> Result<Vec<f64>> {
        if lambda < 0.0 || lambda.is_nan() {
            return Err(Error::NegativeLambda(lambda));
        }
        let mut values = self.raw(lambda);
        if let Some(s) = self.normalization.as_ref().and_then(|n| n.scale_at(lambda)) {
            values.iter_mut().for_each(|v| *v *= s);
        }
        Ok(values)
    }

    /// `G(lambda) = sum_m |g_m(lambda)|^2`.
    pub fn g_sum(&self, lambda: f64) -> Result<f64> {
        Ok(self.evaluate(lambda)?.iter().map(|g| g * g).sum())
    }

    /// Rescales the bank so that `G` equals [`target`](Self::target) at
    /// every distinct value of `eigenvalues`.
    pub fn normalize_on_spectrum(&self, eigenvalues: &[f64]) -> Result<KernelBank> {
        let mut sorted: Vec<f64> = eigenvalues.to_vec();
        sorted.sort_by(f64::total_cmp);
        let top = sorted.last().copied().unwrap_or(0.0).abs();
        let match_tol = (1e-9 * top).max(1e-300);
        let mut table: Vec<(f64, f64)> = Vec::new();
        for &l in &sorted {
            if table.last().is_some_and(|&(prev, _)| l - prev <= match_tol) {
                continue;
            }
            if l < 0.0 {
                return Err(Error::NegativeLambda(l));
            }
            let g: f64 = self.raw(l).iter().map(|g| g * g).sum();
            if !(g > 0.0) {
                return Err(Error::UncoveredEigenvalue(l));
            }
            table.push((l, (self.target / g).sqrt()));
        }
        Ok(KernelBank {
            shape: self.shape.clone(),
            target: self.target,
            normalization: Some(Normalization { table, match_tol }),
        })
    }
}

pub fn normalize_on_spectrum(bank: &KernelBank, eigenvalues: &[f64]) -> Result<KernelBank> {
    bank.normalize_on_spectrum(eigenvalues)
}
