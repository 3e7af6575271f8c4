//! Periodic sampling on `[0, L)^d` and the unitary discrete Fourier transform.
//!
//! Coefficients approximate the continuous unitary transform restricted to
//! the lattice `ξ = k/L`: `c_k = L^{d/2} N^{-d} Σ_n f(nL/N) e^{-2πi k·n/N}`, so
//! `Σ|c_k|² = (L/N)^d Σ|f_n|²` and a multiplier with symbol `σ` acts by
//! `c_k ↦ σ(k/L) c_k`. Both fields are stored row-major with the last axis
//! fastest; coefficients are in FFT order (index `i` holds `k = i` for
//! `i < N/2` and `k = i - N` otherwise).

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::{Fft, FftDirection, FftPlanner};
use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::Path;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{domain, Error, Result};
use crate::exec;

/// Default cap on `N^d`.
pub const DEFAULT_SAMPLE_BUDGET: usize = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GridSpec {
    pub dimension: usize,
    pub points_per_axis: usize,
    pub period: f64,
}

impl GridSpec {
    pub fn new(dimension: usize, points_per_axis: usize, period: f64) -> Result<Self> {
        Self::with_budget(dimension, points_per_axis, period, DEFAULT_SAMPLE_BUDGET)
    }

    pub fn with_budget(
        dimension: usize,
        points_per_axis: usize,
        period: f64,
        budget: usize,
    ) -> Result<Self> {
        if dimension == 0 {
            return domain("dimension must be ≥ 1");
        }
        if points_per_axis < 4 || points_per_axis % 2 != 0 {
            return domain(format!(
                "points per axis must be even and ≥ 4, got {points_per_axis}"
            ));
        }
        if !(period > 0.0) || !period.is_finite() {
            return domain(format!("period must be positive, got {period}"));
        }
        match checked_len(dimension, points_per_axis) {
            Some(n) if n <= budget => Ok(Self {
                dimension,
                points_per_axis,
                period,
            }),
            _ => Err(Error::Resource(format!(
                "{points_per_axis}^{dimension} samples exceed the budget of {budget}"
            ))),
        }
    }

    pub fn len(&self) -> usize {
        self.points_per_axis.pow(self.dimension as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `(L/N)^d`.
    pub fn cell_volume(&self) -> f64 {
        (self.period / self.points_per_axis as f64).powi(self.dimension as i32)
    }

    /// Signed wavenumber of FFT-order index `i` along one axis.
    #[inline]
    pub fn wavenumber(&self, i: usize) -> i64 {
        let n = self.points_per_axis;
        if i < n / 2 {
            i as i64
        } else {
            i as i64 - n as i64
        }
    }

    /// FFT-order index of wavenumber `k` along one axis.
    #[inline]
    pub fn index_of(&self, k: i64) -> usize {
        k.rem_euclid(self.points_per_axis as i64) as usize
    }

    /// Decodes a flat index into per-axis wavenumbers.
    pub fn wavevector(&self, flat: usize, out: &mut [i64]) {
        let n = self.points_per_axis;
        let mut rest = flat;
        for a in (0..self.dimension).rev() {
            out[a] = self.wavenumber(rest % n);
            rest /= n;
        }
    }

    /// Flat index of a wavevector.
    pub fn flat_index(&self, k: &[i64]) -> usize {
        k.iter()
            .fold(0, |acc, &ki| acc * self.points_per_axis + self.index_of(ki))
    }

    /// `|k|²` for every lattice point, in storage order.
    pub fn k_squared(&self) -> Vec<u64> {
        let n = self.points_per_axis;
        let axis: Vec<u64> = (0..n).map(|i| self.wavenumber(i).pow(2) as u64).collect();
        let mut out = vec![0u64];
        for _ in 0..self.dimension {
            let mut next = Vec::with_capacity(out.len() * n);
            for &base in &out {
                next.extend(axis.iter().map(|&a| base + a));
            }
            out = next;
        }
        out
    }

    /// Spatial coordinates of a flat sample index.
    pub fn position(&self, flat: usize, out: &mut [f64]) {
        let n = self.points_per_axis;
        let h = self.period / n as f64;
        let mut rest = flat;
        for a in (0..self.dimension).rev() {
            out[a] = (rest % n) as f64 * h;
            rest /= n;
        }
    }
}

fn checked_len(d: usize, n: usize) -> Option<usize> {
    n.checked_pow(u32::try_from(d).ok()?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpatialField {
    pub spec: GridSpec,
    pub samples: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    pub spec: GridSpec,
    pub coefficients: Vec<Complex64>,
}

impl SpatialField {
    pub fn new(spec: GridSpec, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != spec.len() {
            return domain(format!(
                "expected {} samples, got {}",
                spec.len(),
                samples.len()
            ));
        }
        if samples.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return domain("samples must be finite");
        }
        Ok(Self { spec, samples })
    }

    pub fn zeros(spec: GridSpec) -> Self {
        Self {
            spec,
            samples: vec![Complex64::new(0.0, 0.0); spec.len()],
        }
    }

    /// Samples `f` at the grid points.
    pub fn from_fn<F>(spec: GridSpec, f: F) -> Self
    where
        F: Fn(&[f64]) -> Complex64 + Sync + Send,
    {
        let mut samples = vec![Complex64::new(0.0, 0.0); spec.len()];
        exec::fill_indexed(&mut samples, 4096, |i| {
            let mut x = [0.0; 64];
            spec.position(i, &mut x[..spec.dimension]);
            f(&x[..spec.dimension])
        });
        Self { spec, samples }
    }

    /// `e^{2πi k·x/L}`.
    pub fn plane_wave(spec: GridSpec, k: &[i64]) -> Self {
        let l = spec.period;
        Self::from_fn(spec, |x| {
            let phase: f64 = x.iter().zip(k).map(|(xi, &ki)| xi * ki as f64).sum();
            Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * phase / l)
        })
    }

    /// Real nonnegative field from magnitudes.
    pub fn from_real(spec: GridSpec, values: Vec<f64>) -> Self {
        Self {
            spec,
            samples: values.into_iter().map(|v| Complex64::new(v, 0.0)).collect(),
        }
    }

    pub fn l2_norm(&self) -> f64 {
        (self.samples.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.spec.cell_volume()).sqrt()
    }

    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        if !(p >= 1.0) || !p.is_finite() {
            return domain(format!("lp_norm needs 1 ≤ p < ∞, got {p}"));
        }
        let s: f64 = self.samples.iter().map(|z| z.norm().powf(p)).sum();
        Ok((s * self.spec.cell_volume()).powf(1.0 / p))
    }

    pub fn sup_norm(&self) -> f64 {
        self.samples.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self {
            spec: self.spec,
            samples: self.samples.iter().map(|z| z * a).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        same_spec(&self.spec, &other.spec)?;
        Ok(Self {
            spec: self.spec,
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        same_spec(&self.spec, &other.spec)?;
        Ok(Self {
            spec: self.spec,
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    /// `‖self - other‖₂ / ‖other‖₂`.
    pub fn relative_l2_error(&self, reference: &Self) -> Result<f64> {
        Ok(self.sub(reference)?.l2_norm() / reference.l2_norm())
    }

    /// Flat binary layout: `d`, `N` as little-endian u64, `L` as little-endian
    /// f64, then the samples as interleaved little-endian f64 pairs.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(&(self.spec.dimension as u64).to_le_bytes())?;
        w.write_all(&(self.spec.points_per_axis as u64).to_le_bytes())?;
        w.write_all(&self.spec.period.to_le_bytes())?;
        let mut buf = Vec::with_capacity(16 * self.samples.len());
        for z in &self.samples {
            buf.extend_from_slice(&z.re.to_le_bytes());
            buf.extend_from_slice(&z.im.to_le_bytes());
        }
        w.write_all(&buf)?;
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let mut word = [0u8; 8];
        let mut next = |r: &mut R| -> Result<[u8; 8]> {
            r.read_exact(&mut word)
                .map_err(|e| Error::Format(format!("truncated header: {e}")))?;
            Ok(word)
        };
        let d = u64::from_le_bytes(next(&mut r)?);
        let n = u64::from_le_bytes(next(&mut r)?);
        let l = f64::from_le_bytes(next(&mut r)?);
        let spec = GridSpec::new(
            usize::try_from(d).map_err(|_| Error::Format("dimension".into()))?,
            usize::try_from(n).map_err(|_| Error::Format("grid size".into()))?,
            l,
        )
        .map_err(|e| Error::Format(format!("bad header: {e}")))?;
        let mut bytes = vec![0u8; 16 * spec.len()];
        r.read_exact(&mut bytes)
            .map_err(|e| Error::Format(format!("truncated samples: {e}")))?;
        let samples = bytes
            .chunks_exact(16)
            .map(|c| {
                Complex64::new(
                    f64::from_le_bytes(c[..8].try_into().unwrap()),
                    f64::from_le_bytes(c[8..].try_into().unwrap()),
                )
            })
            .collect();
        Self::new(spec, samples).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let f = std::fs::File::create(path)?;
        self.write_to(std::io::BufWriter::new(f))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let f = std::fs::File::open(path)?;
        Self::read_from(std::io::BufReader::new(f))
    }
}

fn same_spec(a: &GridSpec, b: &GridSpec) -> Result<()> {
    if a != b {
        return domain("fields live on different grids");
    }
    Ok(())
}

impl SpectralField {
    pub fn zeros(spec: GridSpec) -> Self {
        Self {
            spec,
            coefficients: vec![Complex64::new(0.0, 0.0); spec.len()],
        }
    }

    /// `(Σ|c_k|²)^{1/2}`, equal to the spatial L² norm.
    pub fn l2_norm(&self) -> f64 {
        self.coefficients
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn coefficient(&self, k: &[i64]) -> Complex64 {
        self.coefficients[self.spec.flat_index(k)]
    }
}

fn planner() -> &'static Mutex<(FftPlanner<f64>, HashMap<(usize, bool), Arc<dyn Fft<f64>>>)> {
    static PLANNER: OnceLock<
        Mutex<(FftPlanner<f64>, HashMap<(usize, bool), Arc<dyn Fft<f64>>>)>,
    > = OnceLock::new();
    PLANNER.get_or_init(|| Mutex::new((FftPlanner::new(), HashMap::new())))
}

fn plan(n: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    let mut guard = planner().lock().unwrap();
    let (planner, cache) = &mut *guard;
    let forward = direction == FftDirection::Forward;
    cache
        .entry((n, forward))
        .or_insert_with(|| planner.plan_fft(n, direction))
        .clone()
}

/// Transposes a `rows × cols` row-major matrix.
fn transpose(src: &[Complex64], dst: &mut [Complex64], rows: usize, cols: usize) {
    const TILE: usize = 16;
    // Output row j is input column j; each chunk of TILE output rows is filled
    // by sweeping the input once.
    exec::for_each_chunk_mut(dst, TILE * rows, |chunk_idx, out| {
        let j0 = chunk_idx * TILE;
        let width = out.len() / rows;
        for i in 0..rows {
            let row = &src[i * cols + j0..i * cols + j0 + width];
            for (dj, z) in row.iter().enumerate() {
                out[dj * rows + i] = *z;
            }
        }
    });
}

/// In-place unnormalised d-dimensional DFT.
fn fft_nd(data: &mut Vec<Complex64>, spec: &GridSpec, direction: FftDirection) {
    let n = spec.points_per_axis;
    let rows = data.len() / n;
    let fft = plan(n, direction);
    let mut scratch = vec![Complex64::new(0.0, 0.0); data.len()];
    // Transform the last axis, then rotate the axes so the next one is last;
    // after d rounds the original order is restored.
    for _ in 0..spec.dimension {
        let block = n * (4096 / n).max(1);
        exec::for_each_chunk_mut(data, block, |_, chunk| {
            let mut work = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
            fft.process_with_scratch(chunk, &mut work);
        });
        transpose(data, &mut scratch, rows, n);
        std::mem::swap(data, &mut scratch);
    }
}

pub fn forward_transform(f: &SpatialField) -> Result<SpectralField> {
    let spec = f.spec;
    let mut data = f.samples.clone();
    fft_nd(&mut data, &spec, FftDirection::Forward);
    let scale = spec.period.powf(0.5 * spec.dimension as f64) / spec.len() as f64;
    data.iter_mut().for_each(|z| *z *= scale);
    Ok(SpectralField {
        spec,
        coefficients: data,
    })
}

pub fn inverse_transform(c: &SpectralField) -> Result<SpatialField> {
    let spec = c.spec;
    let mut data = c.coefficients.clone();
    fft_nd(&mut data, &spec, FftDirection::Inverse);
    let scale = spec.period.powf(-0.5 * spec.dimension as f64);
    data.iter_mut().for_each(|z| *z *= scale);
    Ok(SpatialField {
        spec,
        samples: data,
    })
}

/// Wavevectors with `0 < |k| ≤ radius` in lexicographic order; the list for
/// a given `(d, radius)` does not depend on `N`.
pub fn lattice_ball(d: usize, radius: f64) -> Vec<Vec<i64>> {
    let kmax = radius.floor() as i64;
    let r2 = radius * radius;
    let mut out = Vec::new();
    let mut k = vec![-kmax; d];
    loop {
        let s: i64 = k.iter().map(|v| v * v).sum();
        if s > 0 && s as f64 <= r2 * (1.0 + 1e-12) {
            out.push(k.clone());
        }
        let mut a = d;
        loop {
            if a == 0 {
                return out;
            }
            a -= 1;
            if k[a] < kmax {
                k[a] += 1;
                break;
            }
            k[a] = -kmax;
        }
    }
}

/// Real, mean-zero field with i.i.d. complex Gaussian coefficients on
/// `0 < |k|/L ≤ band_radius`, conjugate-symmetrised. Coefficients are drawn in
/// a fixed wavevector order, so equal seeds give the same function on every
/// grid that resolves the band.
pub fn random_band_limited(spec: GridSpec, band_radius: f64, seed: u64) -> Result<SpatialField> {
    let nyquist = spec.points_per_axis as f64 / (2.0 * spec.period);
    if !(band_radius > 0.0) || band_radius >= nyquist {
        return domain(format!(
            "band radius must lie in (0, {nyquist}), got {band_radius}"
        ));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut coeffs = SpectralField::zeros(spec);
    for k in lattice_ball(spec.dimension, band_radius * spec.period) {
        // Draw only for the half with positive leading nonzero component.
        let lead = k.iter().copied().find(|&v| v != 0).unwrap_or(0);
        if lead < 0 {
            continue;
        }
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        let z = Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2;
        let neg: Vec<i64> = k.iter().map(|v| -v).collect();
        let i = spec.flat_index(&k);
        let j = spec.flat_index(&neg);
        coeffs.coefficients[i] = z;
        coeffs.coefficients[j] = z.conj();
    }
    let mut f = inverse_transform(&coeffs)?;
    f.samples.iter_mut().for_each(|z| z.im = 0.0);
    Ok(f)
}
