//! Discrete curvature flows on edge weights.
//!
//! All flows are explicit Euler steps. Curvature and operators are evaluated
//! at the weights of the previous step; node weights never change. Weights
//! that would fall below a positive floor are clamped to it and counted.
//!
//! | variant      | update                                   |
//! |--------------|------------------------------------------|
//! | `Standard`   | `w' = w - dt * Ric(e) * w`               |
//! | `Reverse`    | `w' = w + dt * Ric(e) * w`               |
//! | `Normalized` | `w' = w - dt * (Ric(e) - mean Ric) * w`  |
//! | `Laplacian`  | `w' = w + dt * (L - diag Ric) w`         |
//!
//! `mean Ric` is weighted by edge weight, `sum Ric(e) w_e / sum w_e`, so the
//! normalized step preserves the total edge weight to first order.

use log::warn;

use crate::curvature::curvature_field;
use crate::error::{Error, Result};
use crate::graph::WeightedNetwork;
use crate::laplacian::bochner_laplacian;
use crate::numeric::pairwise_sum;

pub const DEFAULT_WEIGHT_FLOOR: f64 = 1e-9;

/// Relative correction above which [`denoise`] warns that the small-noise
/// assumption no longer holds.
pub const SMALL_CORRECTION: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowVariant {
    Standard,
    Normalized,
    Reverse,
    Laplacian,
}

/// Right-hand side of the curvature flows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UpdateForm {
    /// `dw = -Ric * w`.
    #[default]
    Multiplicative,
    /// `dw = -Ric`. Known to be less stable; kept for comparison.
    Additive,
}

/// Sign in front of `(Ric - mean Ric)` in the normalized flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NormalizedSign {
    /// `-`, matching the standard flow.
    #[default]
    Smoothing,
    /// `+`.
    Plus,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOptions {
    pub weight_floor: f64,
    pub form: UpdateForm,
    pub normalized_sign: NormalizedSign,
    /// Fail with [`Error::StepTooLarge`] instead of clamping.
    pub strict: bool,
}

impl Default for StepOptions {
    fn default() -> Self {
        StepOptions {
            weight_floor: DEFAULT_WEIGHT_FLOOR,
            form: UpdateForm::default(),
            normalized_sign: NormalizedSign::default(),
            strict: false,
        }
    }
}

impl StepOptions {
    fn validate(&self) -> Result<()> {
        if !(self.weight_floor > 0.0 && self.weight_floor < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "weight floor must lie in (0, 1), got {}",
                self.weight_floor
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowConfig {
    pub dt: f64,
    pub steps: usize,
    pub variant: FlowVariant,
    pub options: StepOptions,
}

impl FlowConfig {
    pub fn new(dt: f64, steps: usize, variant: FlowVariant) -> Result<Self> {
        let cfg = FlowConfig {
            dt,
            steps,
            variant,
            options: StepOptions::default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidConfig(format!("dt must be positive, got {}", self.dt)));
        }
        if self.steps == 0 {
            return Err(Error::InvalidConfig("steps must be at least 1".into()));
        }
        self.options.validate()
    }
}

/// One flow step.
#[derive(Debug, Clone)]
pub struct FlowStep {
    pub network: WeightedNetwork,
    /// Edges whose unclamped weight was non-positive.
    pub clamped: usize,
}

/// Edge weights along a flow.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FlowTrace {
    /// `steps + 1` weight vectors, the first being the input.
    pub snapshots: Vec<Vec<f64>>,
    /// Weighted mean curvature of each snapshot.
    pub mean_curvature: Vec<f64>,
    /// Clamped edge count of each step.
    pub clamped: Vec<usize>,
}

fn check_dt(dt: f64) -> Result<()> {
    if dt >= 0.0 && dt.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!("dt must be non-negative, got {dt}")))
    }
}

/// `w + scale * delta`, floored.
fn apply_update(
    g: &WeightedNetwork,
    delta: &[f64],
    scale: f64,
    opts: &StepOptions,
) -> Result<FlowStep> {
    let mut clamped = 0;
    let mut weights = Vec::with_capacity(delta.len());
    for (&w, &d) in g.edge_weights().iter().zip(delta) {
        let next = w + scale * d;
        if !next.is_finite() {
            return Err(Error::Diverged);
        }
        if next <= 0.0 {
            clamped += 1;
        }
        weights.push(next.max(opts.weight_floor));
    }
    if clamped > 0 {
        if opts.strict {
            return Err(Error::StepTooLarge { count: clamped });
        }
        warn!("flow step drove {clamped} edge weight(s) non-positive; clamped");
    }
    Ok(FlowStep {
        network: g.with_edge_weights_unchecked(weights),
        clamped,
    })
}

/// One step of the standard, reverse or normalized Ricci flow, or of the
/// Laplacian flow, with default options.
pub fn ricci_flow_step(g: &WeightedNetwork, dt: f64, variant: FlowVariant) -> Result<FlowStep> {
    flow_step(g, dt, variant, &StepOptions::default())
}

pub fn flow_step(
    g: &WeightedNetwork,
    dt: f64,
    variant: FlowVariant,
    opts: &StepOptions,
) -> Result<FlowStep> {
    check_dt(dt)?;
    opts.validate()?;
    if variant == FlowVariant::Laplacian {
        return laplacian_update(g, dt, opts);
    }
    let field = curvature_field(g);
    let weights = g.edge_weights();
    let mean = match variant {
        FlowVariant::Normalized => field.weighted_mean(weights),
        _ => 0.0,
    };
    let sign = match (variant, opts.normalized_sign) {
        (FlowVariant::Reverse, _) | (FlowVariant::Normalized, NormalizedSign::Plus) => 1.0,
        _ => -1.0,
    };
    let delta: Vec<f64> = field
        .edge
        .iter()
        .zip(weights)
        .map(|(&ric, &w)| match opts.form {
            UpdateForm::Multiplicative => (ric - mean) * w,
            UpdateForm::Additive => ric - mean,
        })
        .collect();
    apply_update(g, &delta, sign * dt, opts)
}

/// `w' = w + dt * (L - diag Ric) w`.
pub fn laplacian_flow_step(g: &WeightedNetwork, dt: f64) -> Result<FlowStep> {
    check_dt(dt)?;
    laplacian_update(g, dt, &StepOptions::default())
}

fn laplacian_update(g: &WeightedNetwork, scale: f64, opts: &StepOptions) -> Result<FlowStep> {
    let delta = rough_laplacian_action(g);
    apply_update(g, &delta, scale, opts)
}

/// `(L - diag Ric) w` at the current weights.
pub fn rough_laplacian_action(g: &WeightedNetwork) -> Vec<f64> {
    bochner_laplacian(g)
        .rough_laplacian()
        .mul_vec(g.edge_weights())
}

/// Iterates a flow `cfg.steps` times, recording every weight vector.
pub fn run_flow(g: &WeightedNetwork, cfg: &FlowConfig) -> Result<(WeightedNetwork, FlowTrace)> {
    cfg.validate()?;
    let mut current = g.clone();
    let mut trace = FlowTrace {
        snapshots: vec![current.edge_weights().to_vec()],
        mean_curvature: vec![mean_curvature(&current)],
        clamped: Vec::with_capacity(cfg.steps),
    };
    for _ in 0..cfg.steps {
        let step = flow_step(&current, cfg.dt, cfg.variant, &cfg.options)?;
        current = step.network;
        trace.snapshots.push(current.edge_weights().to_vec());
        trace.mean_curvature.push(mean_curvature(&current));
        trace.clamped.push(step.clamped);
    }
    Ok((current, trace))
}

fn mean_curvature(g: &WeightedNetwork) -> f64 {
    if g.edge_count() == 0 {
        return 0.0;
    }
    curvature_field(g).weighted_mean(g.edge_weights())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DenoiseConfig {
    pub dt: f64,
    pub steps: usize,
    pub weight_floor: f64,
    /// Fail when a correction drives a weight non-positive instead of clamping.
    pub strict: bool,
}

impl DenoiseConfig {
    pub fn new(dt: f64, steps: usize) -> Self {
        DenoiseConfig {
            dt,
            steps,
            weight_floor: DEFAULT_WEIGHT_FLOOR,
            strict: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Denoised {
    pub network: WeightedNetwork,
    /// L1 distance between output and input edge weights.
    pub level: f64,
    /// Largest `|dt * correction| / w` seen over all steps.
    pub max_relative_correction: f64,
    pub clamped: usize,
}

/// Short-term Laplacian flow with negative sign, `w' = w - dt * (L - diag Ric) w`.
pub fn denoise(g: &WeightedNetwork, dt: f64, steps: usize) -> Result<Denoised> {
    denoise_with(g, &DenoiseConfig::new(dt, steps))
}

pub fn denoise_with(g: &WeightedNetwork, cfg: &DenoiseConfig) -> Result<Denoised> {
    check_dt(cfg.dt)?;
    let opts = StepOptions {
        weight_floor: cfg.weight_floor,
        strict: cfg.strict,
        ..StepOptions::default()
    };
    opts.validate()?;
    let mut current = g.clone();
    let mut max_relative_correction: f64 = 0.0;
    let mut clamped = 0;
    for _ in 0..cfg.steps {
        let delta = rough_laplacian_action(&current);
        for (d, w) in delta.iter().zip(current.edge_weights()) {
            max_relative_correction = max_relative_correction.max((cfg.dt * d).abs() / w);
        }
        let step = apply_update(&current, &delta, -cfg.dt, &opts)?;
        clamped += step.clamped;
        current = step.network;
    }
    if max_relative_correction > SMALL_CORRECTION {
        warn!(
            "denoising correction reached {max_relative_correction:.3} of the edge weight; \
             the small-fluctuation assumption does not hold"
        );
    }
    let diffs: Vec<f64> = current
        .edge_weights()
        .iter()
        .zip(g.edge_weights())
        .map(|(a, b)| (a - b).abs())
        .collect();
    Ok(Denoised {
        level: pairwise_sum(&diffs),
        network: current,
        max_relative_correction,
        clamped,
    })
}
