//! Closed-form guarantees for the light-cone spoofer.
//!
//! Everything is evaluated in the log domain where the raw expression would
//! overflow or cancel, so the functions stay meaningful for n in the hundreds.

use serde::{Deserialize, Serialize};

use crate::error::{Result, XebError};

fn ln_15() -> f64 {
    15f64.ln()
}

/// (1 + 15^-d)^m - 1.
pub fn theorem_bound(m: usize, d: usize) -> f64 {
    let x = (-(d as f64) * ln_15()).exp();
    (m as f64 * x.ln_1p()).exp_m1()
}

/// (1 - ε) ((1 + 15^-d)^m - 1) / 2^m: lower bound on the fraction of circuits
/// whose spoofing fidelity exceeds ε times [`theorem_bound`].
pub fn success_prob_bound(m: usize, d: usize, epsilon: f64) -> f64 {
    let b = theorem_bound(m, d);
    if b == 0.0 || epsilon >= 1.0 {
        return 0.0;
    }
    ((1.0 - epsilon).ln() + b.ln() - m as f64 * std::f64::consts::LN_2).exp()
}

/// Sample count `T = ceil(var / (ε^2 δ))` after which the empirical XEB falls
/// more than ε below its mean with probability at most δ. Never below 1.
pub fn chebyshev_samples(var: f64, epsilon: f64, delta: f64) -> Result<u64> {
    if !var.is_finite() || var < 0.0 {
        return Err(XebError::InvalidArgument(format!(
            "variance {var} must be finite and >= 0"
        )));
    }
    check_unit("epsilon", epsilon)?;
    check_unit("delta", delta)?;
    let t = var / (epsilon * epsilon * delta);
    let nearest = t.round();
    // ε = δ = 0.1 style inputs land a few ulps above an integer
    let t = if (t - nearest).abs() <= 1e-9 * nearest.max(1.0) {
        nearest
    } else {
        t.ceil()
    };
    if t > u64::MAX as f64 {
        return Err(XebError::InvalidArgument(format!(
            "sample count {t:e} overflows"
        )));
    }
    Ok((t as u64).max(1))
}

fn check_unit(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v < 1.0) {
        return Err(XebError::InvalidArgument(format!(
            "{name} = {v} must lie in (0, 1)"
        )));
    }
    Ok(())
}

/// 2^(m+n) CP(q_C): upper bound on Var_{x~A_C}[F_C(x)].
pub fn variance_cp_bound(m: usize, n: usize, cp: f64) -> f64 {
    if cp <= 0.0 {
        return 0.0;
    }
    if n <= 50 {
        2f64.powi((m + n) as i32) * cp
    } else {
        ((m + n) as f64 * std::f64::consts::LN_2 + cp.ln()).exp()
    }
}

/// (1 + (4/5)^d)^floor(n/2): bound on the total weight of type-(i) domain
/// walls in the 1D collision-probability expansion.
pub fn type1_path_bound(n: usize, d: usize) -> f64 {
    let x = (d as f64 * (0.8f64).ln()).exp();
    ((n / 2) as f64 * x.ln_1p()).exp()
}

/// ceil(log n / log(5/4)): depth at which the 1D anti-concentration bound kicks in.
pub fn anticoncentration_depth(n: usize) -> usize {
    if n <= 1 {
        return 0;
    }
    ((n as f64).ln() / 1.25f64.ln()).ceil() as usize
}

/// Inputs for [`BoundsReport::compute`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    pub n: usize,
    pub d: usize,
    pub light_cone: usize,
    pub m: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub cp: f64,
    pub var: Option<f64>,
}

impl BoundInputs {
    pub fn validate(&self) -> Result<()> {
        check_unit("epsilon", self.epsilon)?;
        check_unit("delta", self.delta)?;
        if self.light_cone == 0 {
            return Err(XebError::InvalidArgument(
                "light cone size must be positive".into(),
            ));
        }
        if self.m > self.n / self.light_cone {
            return Err(XebError::InvalidArgument(format!(
                "m = {} exceeds floor(n / L) = {}",
                self.m,
                self.n / self.light_cone
            )));
        }
        let floor = (-(self.n as f64) * std::f64::consts::LN_2).exp();
        if !(self.cp <= 1.0 && self.cp >= floor * (1.0 - 1e-12)) {
            return Err(XebError::InvalidArgument(format!(
                "collision probability {} outside [2^-n, 1]",
                self.cp
            )));
        }
        Ok(())
    }
}

/// All closed-form bounds for one parameter set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub inputs: BoundInputs,
    pub theorem_bound: f64,
    pub success_prob_bound: f64,
    pub variance_cp_bound: f64,
    /// Uses `inputs.var` when given, otherwise `variance_cp_bound`.
    pub chebyshev_samples: u64,
    pub type1_path_bound: f64,
}

impl BoundsReport {
    pub fn compute(inputs: BoundInputs) -> Result<Self> {
        inputs.validate()?;
        let var_bound = variance_cp_bound(inputs.m, inputs.n, inputs.cp);
        let var = inputs.var.unwrap_or(var_bound);
        Ok(BoundsReport {
            theorem_bound: theorem_bound(inputs.m, inputs.d),
            success_prob_bound: success_prob_bound(inputs.m, inputs.d, inputs.epsilon),
            variance_cp_bound: var_bound,
            chebyshev_samples: chebyshev_samples(var, inputs.epsilon, inputs.delta)?,
            type1_path_bound: type1_path_bound(inputs.n, inputs.d),
            inputs,
        })
    }
}
