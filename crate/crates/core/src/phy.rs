//! Physical layer: SINR with geodesic path loss, and the link-layer success
//! models (hard SINR threshold, continuous exponential tail, and a fixed
//! per-link probability), each with an optional fixed retransmission count.

use serde::{Deserialize, Serialize};

use crate::error::GeometryError;
use crate::sphere::geodesic_distance;
use crate::{SphereParams, SpherePoint};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhyParams {
    /// Common transmit power, linear scale.
    pub power_p: f64,
    /// Noise power; 0 keeps the model interference-limited.
    pub noise_n: f64,
    /// Path loss exponent; the interference integrals need alpha > 2.
    pub alpha: f64,
    /// SINR threshold of the hard-threshold model.
    pub beta_threshold: f64,
}

impl Default for PhyParams {
    fn default() -> Self {
        Self {
            power_p: 1.0,
            noise_n: 0.0,
            alpha: 4.0,
            beta_threshold: 10.0,
        }
    }
}

impl PhyParams {
    pub fn validate(&self) -> Result<(), crate::error::ConfigError> {
        if !(self.alpha > 2.0) {
            return Err(crate::error::ConfigError::Invalid(format!(
                "alpha must exceed 2, got {}",
                self.alpha
            )));
        }
        if !(self.power_p > 0.0) || self.noise_n < 0.0 {
            return Err(crate::error::ConfigError::Invalid(
                "need power_p > 0 and noise_n >= 0".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum LinkKind {
    /// Success iff SINR >= beta.
    Threshold { beta: f64 },
    /// Success probability 1 - exp(-kappa * SINR).
    ContinuousExponential { kappa: f64 },
    /// SINR-independent per-link success probability.
    FixedProbability { p: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkModel {
    pub kind: LinkKind,
    /// Fixed retry count r; a hop succeeds if any of the r+1 attempts does.
    pub retransmissions: u32,
}

impl LinkModel {
    pub fn threshold(beta: f64) -> Self {
        Self {
            kind: LinkKind::Threshold { beta },
            retransmissions: 0,
        }
    }

    pub fn continuous(kappa: f64) -> Self {
        Self {
            kind: LinkKind::ContinuousExponential { kappa },
            retransmissions: 0,
        }
    }

    pub fn fixed(p: f64) -> Self {
        Self {
            kind: LinkKind::FixedProbability { p },
            retransmissions: 0,
        }
    }

    pub fn with_retransmissions(mut self, r: u32) -> Self {
        self.retransmissions = r;
        self
    }

    pub fn validate(&self) -> Result<(), crate::error::ConfigError> {
        let ok = match self.kind {
            LinkKind::Threshold { beta } => beta >= 0.0,
            LinkKind::ContinuousExponential { kappa } => kappa > 0.0,
            LinkKind::FixedProbability { p } => p > 0.0 && p <= 1.0,
        };
        if ok {
            Ok(())
        } else {
            Err(crate::error::ConfigError::Invalid(format!(
                "invalid link model {:?}",
                self.kind
            )))
        }
    }
}

/// SINR at `rx` for transmitter `tx` against the given interferer set:
/// P d(tx,rx)^-alpha / (N + sum_k P d(k,rx)^-alpha), all distances geodesic.
pub fn compute_sinr(
    rx: &SpherePoint,
    tx: &SpherePoint,
    interferers: &[SpherePoint],
    pp: &PhyParams,
    sp: &SphereParams,
) -> Result<f64, GeometryError> {
    let d = geodesic_distance(tx, rx, sp);
    if d == 0.0 {
        return Err(GeometryError::ZeroDistance);
    }
    let signal = pp.power_p * d.powf(-pp.alpha);
    let mut denom = pp.noise_n;
    for k in interferers {
        let dk = geodesic_distance(k, rx, sp);
        if dk == 0.0 {
            return Err(GeometryError::ZeroDistance);
        }
        denom += pp.power_p * dk.powf(-pp.alpha);
    }
    if denom == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(signal / denom)
}

/// Per-attempt success probability of the model, lifted over the fixed
/// retransmission count: 1 - (1 - base)^(r+1).
pub fn success_prob(sinr: f64, lm: &LinkModel) -> f64 {
    let base = match lm.kind {
        LinkKind::Threshold { beta } => {
            if sinr >= beta {
                1.0
            } else {
                0.0
            }
        }
        LinkKind::ContinuousExponential { kappa } => 1.0 - (-kappa * sinr).exp(),
        LinkKind::FixedProbability { p } => p,
    };
    if lm.retransmissions == 0 {
        base
    } else {
        1.0 - (1.0 - base).powi(lm.retransmissions as i32 + 1)
    }
}

/// End-to-end success probability under hop independence.
pub fn route_success_prob(per_hop: &[f64]) -> f64 {
    per_hop.iter().product()
}
