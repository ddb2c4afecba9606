//! End-to-end runs: series → delay embedding → windows → k-means → grid →
//! landscape, plus the synthetic data sets used in the experiments.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grid::{build_grid, BifiltrationGrid};
use crate::landscape::{compute_landscape, Landscape};
use crate::signal::{
    add_awgn, delay_embed, gen_selkov, gen_sine, gen_sine_jump, kmeans_downsample, segment_windows, PointCloud,
    TimeSeries, WindowedClouds,
};

/// Scale values: an explicit ascending list, or `n` values from 0 to half the
/// diameter of all windows together.
#[derive(Debug, Clone, PartialEq)]
pub enum EpsilonSpec {
    Explicit(Vec<f64>),
    Auto(usize),
}

impl FromStr for EpsilonSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(n) = s.strip_prefix("auto:") {
            let n: usize = n.trim().parse().map_err(|_| Error::InvalidParameter(format!("bad scale count in {s:?}")))?;
            if n == 0 {
                return Err(Error::InvalidParameter("auto scale count must be at least 1".into()));
            }
            return Ok(EpsilonSpec::Auto(n));
        }
        let values = s
            .split(',')
            .map(|v| v.trim().parse::<f64>().map_err(|_| Error::InvalidParameter(format!("bad scale {v:?}"))))
            .collect::<Result<Vec<_>>>()?;
        if values.is_empty() || values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidParameter("scales must be finite and non-negative".into()));
        }
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter("scales must be strictly ascending".into()));
        }
        Ok(EpsilonSpec::Explicit(values))
    }
}

impl fmt::Display for EpsilonSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EpsilonSpec::Auto(n) => write!(f, "auto:{n}"),
            EpsilonSpec::Explicit(v) => {
                let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                write!(f, "{}", parts.join(","))
            }
        }
    }
}

impl EpsilonSpec {
    pub fn resolve(&self, wc: &WindowedClouds) -> Vec<f64> {
        match self {
            EpsilonSpec::Explicit(v) => v.clone(),
            EpsilonSpec::Auto(n) => {
                let half = wc.global_diameter() / 2.0;
                // a single repeated point has no scale; fall back to unit steps
                let top = if half > 0.0 { half } else { (*n as f64 - 1.0).max(1.0) };
                if *n == 1 {
                    return vec![0.0];
                }
                (0..*n).map(|i| top * i as f64 / (*n as f64 - 1.0)).collect()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub windows: usize,
    pub points_per_window: usize,
    pub embed_dim: usize,
    pub delay: usize,
    pub epsilons: EpsilonSpec,
    pub hom_dim: usize,
    pub k_max: usize,
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            windows: 16,
            points_per_window: 40,
            embed_dim: 2,
            delay: 1,
            epsilons: EpsilonSpec::Auto(15),
            hom_dim: 1,
            k_max: 3,
            seed: 0,
        }
    }
}

impl PipelineConfig {
    /// One window per `b` value and a delay of 1.6 s at the default 0.1 s spacing.
    pub fn selkov() -> Self {
        PipelineConfig { windows: 12, delay: 16, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("windows", self.windows),
            ("points per window", self.points_per_window),
            ("embedding dimension", self.embed_dim),
            ("delay", self.delay),
            ("k_max", self.k_max),
        ] {
            if v == 0 {
                return Err(Error::InvalidParameter(format!("{name} must be at least 1")));
            }
        }
        if let EpsilonSpec::Explicit(v) = &self.epsilons {
            if v.is_empty() || v.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidParameter("scales must be strictly ascending".into()));
            }
        }
        Ok(())
    }
}

/// Delay embedding that also accepts several channels: point `i` stacks the
/// samples `i, i + tau, …, i + (d − 1)·tau`, each with all its channels.
pub fn embed(ts: &TimeSeries, d: usize, tau: usize) -> Result<PointCloud> {
    if ts.channels() == 1 {
        return delay_embed(ts, d, tau);
    }
    if d == 0 || tau == 0 {
        return Err(Error::InvalidParameter("embedding dimension and delay must be at least 1".into()));
    }
    let span = (d - 1) * tau;
    if ts.len() < span + 1 {
        return Err(Error::SeriesTooShort { needed: span + 1, have: ts.len() });
    }
    let coords = (0..ts.len() - span).flat_map(|i| (0..d).flat_map(move |j| ts.sample(i + j * tau).iter().copied())).collect();
    PointCloud::from_flat(d * ts.channels(), coords)
}

/// Embeds, windows and downsamples a series. Window `i` uses k-means seed `seed + i`.
pub fn prepare_windows(ts: &TimeSeries, cfg: &PipelineConfig) -> Result<WindowedClouds> {
    cfg.validate()?;
    let pc = embed(ts, cfg.embed_dim, cfg.delay)?;
    let wc = segment_windows(&pc, cfg.windows)?;
    wc.map(|i, w| kmeans_downsample(w, cfg.points_per_window, cfg.seed.wrapping_add(i as u64)))
}

pub fn run_grid(ts: &TimeSeries, cfg: &PipelineConfig) -> Result<BifiltrationGrid> {
    let wc = prepare_windows(ts, cfg)?;
    let eps = cfg.epsilons.resolve(&wc);
    build_grid(&wc, &eps, cfg.hom_dim)
}

pub fn run(ts: &TimeSeries, cfg: &PipelineConfig) -> Result<Landscape> {
    compute_landscape(&run_grid(ts, cfg)?, cfg.k_max)
}

/// A sine on a symmetric time range, optionally with a jump in offset at `t = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SineParams {
    pub t_start: f64,
    pub t_end: f64,
    pub rate: f64,
    pub freq: f64,
    pub offset_before: f64,
    pub offset_after: f64,
}

impl Default for SineParams {
    fn default() -> Self {
        SineParams { t_start: -250.0, t_end: 250.0, rate: 4.0, freq: 0.9, offset_before: -2.0, offset_after: 2.0 }
    }
}

impl SineParams {
    pub fn plain(&self) -> Result<TimeSeries> {
        gen_sine(self.t_start, self.t_end, self.rate, self.freq, 0.0)
    }

    pub fn with_jump(&self) -> Result<TimeSeries> {
        gen_sine_jump(self.t_start, self.t_end, self.rate, self.freq, self.offset_before, self.offset_after)
    }
}

/// Sel'kov runs over a sweep of `b`, concatenated into one x-channel series.
#[derive(Debug, Clone, PartialEq)]
pub struct SelkovParams {
    pub a: f64,
    pub b_start: f64,
    pub b_step: f64,
    pub b_count: usize,
    pub x0: f64,
    pub y0: f64,
    pub dt: f64,
    pub t_end: f64,
    /// transient discarded from each run
    pub t_drop: f64,
    /// keep every `stride`-th sample
    pub stride: usize,
}

impl Default for SelkovParams {
    fn default() -> Self {
        SelkovParams {
            a: 0.1,
            b_start: 0.35,
            b_step: 0.05,
            b_count: 12,
            x0: 1.0,
            y0: 1.0,
            dt: 0.01,
            t_end: 500.0,
            t_drop: 250.0,
            stride: 10,
        }
    }
}

impl SelkovParams {
    pub fn b_values(&self) -> Vec<f64> {
        (0..self.b_count).map(|i| self.b_start + self.b_step * i as f64).collect()
    }

    /// One segment per `b`, each of the same length.
    pub fn series(&self) -> Result<TimeSeries> {
        if self.b_count == 0 || self.stride == 0 {
            return Err(Error::InvalidParameter("need at least one b value and a positive stride".into()));
        }
        let parts = self
            .b_values()
            .iter()
            .map(|&b| {
                gen_selkov(b, self.a, self.x0, self.y0, self.t_end, self.dt)?
                    .select_channel(0)?
                    .drop_before(self.t_drop)?
                    .decimate(self.stride)
            })
            .collect::<Result<Vec<_>>>()?;
        TimeSeries::concat(&parts)
    }
}

/// Adds noise at `snr_db`; infinite SNR returns the series unchanged.
pub fn noisy(ts: &TimeSeries, snr_db: f64, seed: u64) -> Result<TimeSeries> {
    add_awgn(ts, snr_db, seed)
}
