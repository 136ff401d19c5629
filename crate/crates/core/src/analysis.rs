//! Closed-form quantities used to cross-check simulation output: SINR caps,
//! the expected per-connection attenuation E[delta^L], loss budgets, and the
//! throughput envelopes for both scheduling policies.

use serde::{Deserialize, Serialize};

use crate::error::AnalysisError;

/// Long-hop fraction target 1/8 - 1/32 used to pin t0.
pub const DEFAULT_T0_TARGET: f64 = 3.0 / 32.0;

/// Solve (1 - 16 t / pi) / (8 - t) = target for t by bisection on (0, pi/16).
pub fn solve_t0(target: f64) -> Result<f64, AnalysisError> {
    let f = |t: f64| (1.0 - 16.0 * t / std::f64::consts::PI) / (8.0 - t) - target;
    let (mut lo, mut hi) = (0.0f64, std::f64::consts::PI / 16.0);
    if !(f(lo) > 0.0 && f(hi) < 0.0) {
        return Err(AnalysisError::Domain {
            name: "target",
            value: target,
            constraint: "target must lie strictly between the endpoint values of the hop fraction",
        });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Reuse distance constant M0 = 64 (1 + c1).
pub fn m0(c1: f64) -> f64 {
    64.0 * (1.0 + c1)
}

/// SINR cap beta0 = ((M0 + 8) / t0)^alpha for constant-reuse schedules.
pub fn beta0(t0: f64, m0: f64, alpha: f64) -> Result<f64, AnalysisError> {
    if !(t0 > 0.0) {
        return Err(AnalysisError::Domain {
            name: "t0",
            value: t0,
            constraint: "t0 > 0",
        });
    }
    if !(m0 > 9.0) {
        return Err(AnalysisError::Domain {
            name: "M0",
            value: m0,
            constraint: "M0 > 9",
        });
    }
    Ok(((m0 + 8.0) / t0).powf(alpha))
}

/// SINR cap beta1 = 100^alpha (M0 + 8)^alpha for arbitrary valid routes.
pub fn beta1(m0: f64, alpha: f64) -> Result<f64, AnalysisError> {
    if !(m0 > 16.0) {
        return Err(AnalysisError::Domain {
            name: "M0",
            value: m0,
            constraint: "M0 > 16",
        });
    }
    Ok((100.0 * (m0 + 8.0)).powf(alpha))
}

/// E[delta^L] for L the distance between two uniform points on the sphere of
/// area n: 2 pi (1 + delta^(sqrt(pi n)/2)) / (4 pi + n (ln delta)^2).
pub fn expected_delta_l(delta: f64, n: f64) -> Result<f64, AnalysisError> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(AnalysisError::Domain {
            name: "delta",
            value: delta,
            constraint: "0 < delta <= 1",
        });
    }
    if !(n > 0.0) {
        return Err(AnalysisError::Domain {
            name: "n",
            value: n,
            constraint: "n > 0",
        });
    }
    let pi = std::f64::consts::PI;
    let half_circ = (pi * n).sqrt() / 2.0;
    let ln_d = delta.ln();
    Ok(2.0 * pi * (1.0 + delta.powf(half_circ)) / (4.0 * pi + n * ln_d * ln_d))
}

/// Per-link loss budget sqrt(pi) rho_n epsilon / (8 sqrt(n)) that keeps the
/// end-to-end loss of every connection below epsilon by union bound.
pub fn per_link_loss_budget(epsilon: f64, n: f64, rho_n: f64) -> f64 {
    std::f64::consts::PI.sqrt() * rho_n * epsilon / (8.0 * n.sqrt())
}

/// Goodput upper envelope for constant-reuse scheduling:
/// lambda_n 1024 pi rho_n^2 / (n (ln phi(beta0))^2).
pub fn throughput_upper_pi1(
    lambda_n: f64,
    n: f64,
    rho_n: f64,
    phi_beta0: f64,
) -> Result<f64, AnalysisError> {
    if !(phi_beta0 > 0.0 && phi_beta0 < 1.0) {
        return Err(AnalysisError::Domain {
            name: "phi_beta0",
            value: phi_beta0,
            constraint: "0 < phi(beta0) < 1",
        });
    }
    let l = phi_beta0.ln();
    Ok(lambda_n * 1024.0 * std::f64::consts::PI * rho_n * rho_n / (n * l * l))
}

/// Coefficients of K_n = V_n + 1 as a polynomial in x = (ln n)^(1/(alpha-2)):
/// a0 + a1 x + a2 x^2.
pub fn reuse_expansion(alpha: f64) -> Result<(f64, f64, f64), AnalysisError> {
    if !(alpha > 2.0) {
        return Err(AnalysisError::Domain {
            name: "alpha",
            value: alpha,
            constraint: "alpha > 2",
        });
    }
    let base = (256.0 / (alpha - 2.0)).powf(1.0 / (alpha - 2.0));
    Ok((9.0, 64.0 * base, 128.0 * base * base))
}

/// Goodput lower envelope for exclusion-radius scheduling:
/// (1 - eps) W / (c5 sqrt(n ln n) (a0 + a1 x + a2 x^2)).
pub fn throughput_lower_pi2(
    n: f64,
    alpha: f64,
    epsilon: f64,
    w_bandwidth: f64,
    c5: f64,
) -> Result<f64, AnalysisError> {
    let (a0, a1, a2) = reuse_expansion(alpha)?;
    let x = n.ln().powf(1.0 / (alpha - 2.0));
    let k = a0 + a1 * x + a2 * x * x;
    Ok((1.0 - epsilon) * w_bandwidth / (c5 * (n * n.ln()).sqrt() * k))
}

/// Cap on interference-free interior hops: (L / rho_n) 2 (1 + c1) / M.
pub fn ni_bound(l: f64, rho_n: f64, m: f64, c1: f64) -> Result<f64, AnalysisError> {
    if !(m > 9.0) {
        return Err(AnalysisError::Domain {
            name: "M",
            value: m,
            constraint: "M > 9",
        });
    }
    Ok((l / rho_n) * 2.0 * (1.0 + c1) / m)
}

/// Bundle of solved constants, kept alongside experiment reports.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct AnalysisConstants {
    pub t0: f64,
    pub m0: f64,
    pub beta0: f64,
    pub beta1: f64,
    /// Per-hop attenuation base phi(beta0)^(1/(16 rho_n)), when it lies in
    /// (0, 1); None when phi(beta0) rounds to 1 at this precision.
    pub delta: Option<f64>,
    pub epsilon: f64,
    pub c5: f64,
}

impl AnalysisConstants {
    pub fn derive(
        alpha: f64,
        c1: f64,
        rho_n: f64,
        epsilon: f64,
        phi_beta0: f64,
        c5: f64,
    ) -> Result<Self, AnalysisError> {
        let t0 = solve_t0(DEFAULT_T0_TARGET)?;
        let m0v = m0(c1);
        let b0 = beta0(t0, m0v, alpha)?;
        let b1 = beta1(m0v, alpha)?;
        let delta = if phi_beta0 > 0.0 && phi_beta0 < 1.0 {
            Some(phi_beta0.powf(1.0 / (16.0 * rho_n)))
        } else {
            None
        };
        Ok(Self {
            t0,
            m0: m0v,
            beta0: b0,
            beta1: b1,
            delta,
            epsilon,
            c5,
        })
    }
}
