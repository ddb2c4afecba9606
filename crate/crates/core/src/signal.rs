//! Time series synthesis and ingestion helpers, additive noise, delay
//! embedding, windowing and k-means downsampling.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};

/// A uniformly sampled, possibly multichannel, time series.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    t0: f64,
    dt: f64,
    channels: usize,
    samples: Vec<f64>,
}

impl TimeSeries {
    /// `samples` is row-major: sample `i` occupies `samples[i*channels..(i+1)*channels]`.
    pub fn new(t0: f64, dt: f64, channels: usize, samples: Vec<f64>) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() || !t0.is_finite() {
            return Err(Error::InvalidParameter(format!("time step must be positive and finite, got {dt}")));
        }
        if channels == 0 {
            return Err(Error::InvalidParameter("a time series needs at least one channel".into()));
        }
        if samples.is_empty() {
            return Err(Error::Empty("time series has no samples".into()));
        }
        if !samples.len().is_multiple_of(channels) {
            return Err(Error::DimensionMismatch(format!(
                "{} values do not split into {channels} channels",
                samples.len()
            )));
        }
        if let Some(i) = samples.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter(format!("sample value {i} is not finite")));
        }
        Ok(TimeSeries { t0, dt, channels, samples })
    }

    pub fn univariate(t0: f64, dt: f64, values: Vec<f64>) -> Result<Self> {
        Self::new(t0, dt, 1, values)
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn len(&self) -> usize {
        self.samples.len() / self.channels
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt
    }

    pub fn sample(&self, i: usize) -> &[f64] {
        &self.samples[i * self.channels..(i + 1) * self.channels]
    }

    pub fn values(&self) -> &[f64] {
        &self.samples
    }

    pub fn channel(&self, c: usize) -> Vec<f64> {
        assert!(c < self.channels, "channel {c} out of range");
        self.samples.iter().skip(c).step_by(self.channels).copied().collect()
    }

    /// Single-channel series made of channel `c`.
    pub fn select_channel(&self, c: usize) -> Result<TimeSeries> {
        if c >= self.channels {
            return Err(Error::InvalidParameter(format!("channel {c} out of range ({})", self.channels)));
        }
        TimeSeries::univariate(self.t0, self.dt, self.channel(c))
    }

    /// Drops samples with `t < t_start`.
    pub fn drop_before(&self, t_start: f64) -> Result<TimeSeries> {
        let first = (0..self.len()).find(|&i| self.time(i) >= t_start).ok_or_else(|| {
            Error::Empty(format!("no samples at or after t = {t_start}"))
        })?;
        TimeSeries::new(
            self.time(first),
            self.dt,
            self.channels,
            self.samples[first * self.channels..].to_vec(),
        )
    }

    /// Keeps every `stride`-th sample starting with the first.
    pub fn decimate(&self, stride: usize) -> Result<TimeSeries> {
        if stride == 0 {
            return Err(Error::InvalidParameter("decimation stride must be at least 1".into()));
        }
        let samples = (0..self.len()).step_by(stride).flat_map(|i| self.sample(i).iter().copied()).collect();
        TimeSeries::new(self.t0, self.dt * stride as f64, self.channels, samples)
    }

    /// Joins the parts sample-wise on the first part's time axis.
    pub fn concat(parts: &[TimeSeries]) -> Result<TimeSeries> {
        let first = parts.first().ok_or_else(|| Error::Empty("nothing to concatenate".into()))?;
        if parts.iter().any(|p| p.channels != first.channels) {
            return Err(Error::DimensionMismatch("channel counts differ".into()));
        }
        let samples = parts.iter().flat_map(|p| p.samples.iter().copied()).collect();
        TimeSeries::new(first.t0, first.dt, first.channels, samples)
    }
}

/// A finite set of points in `R^dim`, kept in insertion order.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
}

impl PointCloud {
    pub fn new(dim: usize, points: &[Vec<f64>]) -> Result<Self> {
        let mut coords = Vec::with_capacity(points.len() * dim);
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::DimensionMismatch(format!("point {i} has {} coordinates, expected {dim}", p.len())));
            }
            coords.extend_from_slice(p);
        }
        Self::from_flat(dim, coords)
    }

    pub fn from_flat(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("point dimension must be at least 1".into()));
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::DimensionMismatch(format!("{} coordinates do not split into dimension {dim}", coords.len())));
        }
        if coords.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("point coordinates must be finite".into()));
        }
        Ok(PointCloud { dim, coords })
    }

    pub fn empty(dim: usize) -> Self {
        PointCloud { dim, coords: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    /// Largest pairwise Euclidean distance (0 for fewer than two points).
    pub fn diameter(&self) -> f64 {
        let n = self.len();
        let mut best = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                best = best.max(euclidean(self.point(i), self.point(j)));
            }
        }
        best
    }

    /// Concatenation of several clouds of equal dimension.
    pub fn concat(clouds: &[&PointCloud]) -> Result<PointCloud> {
        let dim = clouds.first().map_or(1, |c| c.dim);
        if clouds.iter().any(|c| c.dim != dim) {
            return Err(Error::DimensionMismatch("point clouds of different dimension".into()));
        }
        Ok(PointCloud { dim, coords: clouds.iter().flat_map(|c| c.coords.iter().copied()).collect() })
    }
}

pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Ordered point clouds, one per time window.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowedClouds {
    windows: Vec<PointCloud>,
}

impl WindowedClouds {
    pub fn new(windows: Vec<PointCloud>) -> Result<Self> {
        let first = windows.first().ok_or_else(|| Error::Empty("no windows".into()))?;
        if windows.iter().any(|w| w.dim() != first.dim()) {
            return Err(Error::DimensionMismatch("windows have different point dimensions".into()));
        }
        Ok(WindowedClouds { windows })
    }

    pub fn windows(&self) -> &[PointCloud] {
        &self.windows
    }

    pub fn len(&self) -> usize {
        self.windows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.windows.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.windows[0].dim()
    }

    /// Diameter of the union of all windows.
    pub fn global_diameter(&self) -> f64 {
        let refs: Vec<&PointCloud> = self.windows.iter().collect();
        PointCloud::concat(&refs).map(|c| c.diameter()).unwrap_or(0.0)
    }

    pub fn map<F>(&self, f: F) -> Result<WindowedClouds>
    where
        F: Fn(usize, &PointCloud) -> Result<PointCloud> + Sync,
    {
        use rayon::prelude::*;
        let windows = self
            .windows
            .par_iter()
            .enumerate()
            .map(|(i, w)| f(i, w))
            .collect::<Result<Vec<_>>>()?;
        WindowedClouds::new(windows)
    }
}

fn sample_count(t0: f64, t1: f64, rate: f64) -> Result<usize> {
    if !(t1 > t0) || !t0.is_finite() || !t1.is_finite() {
        return Err(Error::InvalidParameter(format!("invalid time range [{t0}, {t1}]")));
    }
    if !(rate > 0.0) || !rate.is_finite() {
        return Err(Error::InvalidParameter(format!("sampling rate must be positive, got {rate}")));
    }
    Ok(((t1 - t0) * rate + 1e-9).floor() as usize + 1)
}

/// `sin(2π·freq·t) + offset` sampled at `rate` Hz on `[t0, t1]`, both ends included.
pub fn gen_sine(t0: f64, t1: f64, rate: f64, freq: f64, offset: f64) -> Result<TimeSeries> {
    gen_sine_jump_unchecked(t0, t1, rate, freq, offset, offset)
}

/// Like [`gen_sine`] but with `offset_before` for `t < 0` and `offset_after` for `t ≥ 0`.
pub fn gen_sine_jump(
    t0: f64,
    t1: f64,
    rate: f64,
    freq: f64,
    offset_before: f64,
    offset_after: f64,
) -> Result<TimeSeries> {
    if !(t0 < 0.0 && 0.0 < t1) {
        return Err(Error::InvalidParameter(format!("jump at t = 0 needs t0 < 0 < t1, got [{t0}, {t1}]")));
    }
    gen_sine_jump_unchecked(t0, t1, rate, freq, offset_before, offset_after)
}

fn gen_sine_jump_unchecked(
    t0: f64,
    t1: f64,
    rate: f64,
    freq: f64,
    before: f64,
    after: f64,
) -> Result<TimeSeries> {
    let n = sample_count(t0, t1, rate)?;
    if !(freq > 0.0) || !freq.is_finite() {
        return Err(Error::InvalidParameter(format!("frequency must be positive, got {freq}")));
    }
    let values = (0..n)
        .map(|i| {
            let t = t0 + i as f64 / rate;
            let offset = if t < 0.0 { before } else { after };
            (2.0 * PI * freq * t).sin() + offset
        })
        .collect();
    TimeSeries::univariate(t0, 1.0 / rate, values)
}

/// Right-hand side of the Sel'kov glycolysis model.
pub fn selkov_field(a: f64, b: f64, x: f64, y: f64) -> (f64, f64) {
    let x2y = x * x * y;
    (-x + a * y + x2y, b - a * y - x2y)
}

/// Classical RK4 integration of the Sel'kov model from `(x0, y0)` at `t = 0`
/// up to `t_end`, one sample per step. Channel 0 is `x`, channel 1 is `y`.
pub fn gen_selkov(b: f64, a: f64, x0: f64, y0: f64, t_end: f64, dt: f64) -> Result<TimeSeries> {
    if !(dt > 0.0) || !(t_end > 0.0) {
        return Err(Error::InvalidParameter(format!("need dt > 0 and t_end > 0, got dt = {dt}, t_end = {t_end}")));
    }
    let steps = (t_end / dt).round() as usize;
    let mut samples = Vec::with_capacity(2 * (steps + 1));
    let (mut x, mut y) = (x0, y0);
    samples.extend([x, y]);
    let f = |x: f64, y: f64| selkov_field(a, b, x, y);
    for step in 1..=steps {
        let (k1x, k1y) = f(x, y);
        let (k2x, k2y) = f(x + 0.5 * dt * k1x, y + 0.5 * dt * k1y);
        let (k3x, k3y) = f(x + 0.5 * dt * k2x, y + 0.5 * dt * k2y);
        let (k4x, k4y) = f(x + dt * k3x, y + dt * k3y);
        x += dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        y += dt / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        if !x.is_finite() || !y.is_finite() {
            return Err(Error::NonFinite { t: step as f64 * dt });
        }
        samples.extend([x, y]);
    }
    TimeSeries::new(0.0, dt, 2, samples)
}

/// Adds white Gaussian noise per channel at the given signal-to-noise ratio.
///
/// The noise variance is `P / 10^(snr_db/10)` with `P` the channel's mean
/// squared value. An infinite `snr_db` means no noise.
pub fn add_awgn(ts: &TimeSeries, snr_db: f64, seed: u64) -> Result<TimeSeries> {
    if ts.len() < 2 {
        return Err(Error::SeriesTooShort { needed: 2, have: ts.len() });
    }
    if snr_db.is_nan() {
        return Err(Error::InvalidParameter("SNR is NaN".into()));
    }
    if snr_db == f64::INFINITY {
        return Ok(ts.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = ts.channels;
    let n = ts.len() as f64;
    let mut out = ts.samples.clone();
    for c in 0..d {
        let power = ts.samples.iter().skip(c).step_by(d).map(|x| x * x).sum::<f64>() / n;
        let sigma = (power / 10f64.powf(snr_db / 10.0)).sqrt();
        if sigma == 0.0 {
            continue;
        }
        let normal = Normal::new(0.0, sigma).map_err(|e| Error::InvalidParameter(e.to_string()))?;
        for x in out.iter_mut().skip(c).step_by(d) {
            *x += normal.sample(&mut rng);
        }
    }
    TimeSeries::new(ts.t0, ts.dt, d, out)
}

/// Delay embedding: point `i` is `(x_i, x_{i+tau}, …, x_{i+(d-1)tau})`.
pub fn delay_embed(ts: &TimeSeries, d: usize, tau: usize) -> Result<PointCloud> {
    if ts.channels != 1 {
        return Err(Error::InvalidParameter(format!("delay embedding needs a univariate series, got {} channels", ts.channels)));
    }
    if d == 0 || tau == 0 {
        return Err(Error::InvalidParameter("embedding dimension and delay must be at least 1".into()));
    }
    let span = (d - 1) * tau;
    let n = ts.len();
    if n < span + 1 {
        return Err(Error::SeriesTooShort { needed: span + 1, have: n });
    }
    let x = &ts.samples;
    let count = n - span;
    let mut coords = Vec::with_capacity(count * d);
    for i in 0..count {
        coords.extend((0..d).map(|j| x[i + j * tau]));
    }
    PointCloud::from_flat(d, coords)
}

/// Splits the ordered points into `t_windows` contiguous blocks whose sizes
/// differ by at most one, earlier blocks taking the remainder.
pub fn segment_windows(pc: &PointCloud, t_windows: usize) -> Result<WindowedClouds> {
    if t_windows == 0 {
        return Err(Error::InvalidParameter("need at least one window".into()));
    }
    let n = pc.len();
    if n < t_windows {
        return Err(Error::TooFewPoints { needed: t_windows, have: n });
    }
    let base = n / t_windows;
    let extra = n % t_windows;
    let mut start = 0;
    let mut windows = Vec::with_capacity(t_windows);
    for w in 0..t_windows {
        let size = base + usize::from(w < extra);
        let coords = pc.coords[start * pc.dim..(start + size) * pc.dim].to_vec();
        windows.push(PointCloud { dim: pc.dim, coords });
        start += size;
    }
    WindowedClouds::new(windows)
}

const KMEANS_MAX_ITER: usize = 100;
const KMEANS_TOL: f64 = 1e-9;

/// Replaces `pc` by the `m` centroids of Lloyd's algorithm with k-means++
/// seeding. Clouds with at most `m` points are returned unchanged.
pub fn kmeans_downsample(pc: &PointCloud, m: usize, seed: u64) -> Result<PointCloud> {
    if pc.is_empty() {
        return Err(Error::Empty("cannot downsample an empty point cloud".into()));
    }
    if m == 0 {
        return Err(Error::InvalidParameter("need at least one centroid".into()));
    }
    let n = pc.len();
    if n <= m {
        return Ok(pc.clone());
    }
    let dim = pc.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // k-means++ seeding
    let mut centroids: Vec<f64> = Vec::with_capacity(m * dim);
    let first = rng.random_range(0..n);
    centroids.extend_from_slice(pc.point(first));
    let mut nearest: Vec<f64> = pc.points().map(|p| squared_distance(p, pc.point(first))).collect();
    for _ in 1..m {
        let total: f64 = nearest.iter().sum();
        let pick = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut chosen = n - 1;
            for (i, w) in nearest.iter().enumerate() {
                acc += w;
                if acc > target && *w > 0.0 {
                    chosen = i;
                    break;
                }
            }
            chosen
        } else {
            rng.random_range(0..n)
        };
        let c = pc.point(pick).to_vec();
        for (i, p) in pc.points().enumerate() {
            nearest[i] = nearest[i].min(squared_distance(p, &c));
        }
        centroids.extend_from_slice(&c);
    }

    // Lloyd iterations
    let mut assignment = vec![0usize; n];
    for _ in 0..KMEANS_MAX_ITER {
        for (i, p) in pc.points().enumerate() {
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for (k, c) in centroids.chunks_exact(dim).enumerate() {
                let d = squared_distance(p, c);
                if d < best_d {
                    best_d = d;
                    best = k;
                }
            }
            assignment[i] = best;
        }
        let mut sums = vec![0.0; m * dim];
        let mut counts = vec![0usize; m];
        for (i, p) in pc.points().enumerate() {
            let k = assignment[i];
            counts[k] += 1;
            for (s, x) in sums[k * dim..(k + 1) * dim].iter_mut().zip(p) {
                *s += x;
            }
        }
        let mut shift = 0.0f64;
        for k in 0..m {
            if counts[k] == 0 {
                continue;
            }
            let new: Vec<f64> = sums[k * dim..(k + 1) * dim].iter().map(|s| s / counts[k] as f64).collect();
            shift = shift.max(squared_distance(&new, &centroids[k * dim..(k + 1) * dim]).sqrt());
            centroids[k * dim..(k + 1) * dim].copy_from_slice(&new);
        }
        if shift < KMEANS_TOL {
            break;
        }
    }
    PointCloud::from_flat(dim, centroids)
}
