//! Light-cone spoofer.
//!
//! The sampler picks outputs with pairwise-disjoint light cones, computes the
//! single-qubit marginal of each one by simulating only its cone, samples
//! those bits from the marginals and fills the rest of the string with fair
//! coins. The resulting distribution is
//! `A_C(x) = 2^-(n-m) Π_j q_{C,i_j}(x_{i_j})`.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, XebError};
use crate::statevector::{apply_2q, check_bits, marginal_of, Circuit, OutputDistribution};

/// Per-output marginals are clamped to zero when they fall in `[-CLAMP, 0)`.
pub const CLAMP: f64 = 1e-12;

/// Simulation cap on a single light cone.
pub const DEFAULT_MAX_CONE: usize = 24;

#[derive(Clone, Debug, PartialEq)]
pub struct SpoofPlan {
    n: usize,
    selected: Vec<usize>,
    marginals: Vec<[f64; 2]>,
    cone_sizes: Vec<usize>,
    requested: usize,
}

impl SpoofPlan {
    /// Plan from precomputed marginals. Entries must lie in `[-1e-12, 1]`
    /// and each pair must sum to 1 within 1e-9.
    pub fn from_marginals(
        n: usize,
        selected: Vec<usize>,
        marginals: Vec<[f64; 2]>,
        requested: usize,
    ) -> Result<Self> {
        if selected.len() != marginals.len() {
            return Err(XebError::DimensionMismatch {
                expected: selected.len(),
                got: marginals.len(),
            });
        }
        if n == 0 || n > 63 {
            return Err(XebError::InvalidArgument(format!("unsupported width {n}")));
        }
        let mut seen = vec![false; n];
        for &i in &selected {
            if i >= n {
                return Err(XebError::IndexOutOfRange { index: i, len: n });
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(XebError::InvalidArgument(format!(
                    "output {i} selected twice"
                )));
            }
        }
        let marginals = marginals
            .into_iter()
            .map(|pair| {
                let mut out = [0.0; 2];
                for (o, &v) in out.iter_mut().zip(pair.iter()) {
                    if !v.is_finite() || !(-CLAMP..=1.0 + 1e-9).contains(&v) {
                        return Err(XebError::Numerical(format!("marginal {v} outside [0, 1]")));
                    }
                    *o = v.max(0.0);
                }
                if (out[0] + out[1] - 1.0).abs() > 1e-9 {
                    return Err(XebError::Numerical(format!(
                        "marginal pair {:?} does not sum to 1",
                        out
                    )));
                }
                Ok(out)
            })
            .collect::<Result<Vec<_>>>()?;
        let cone_sizes = vec![0; selected.len()];
        Ok(SpoofPlan {
            n,
            selected,
            marginals,
            cone_sizes,
            requested,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of outputs actually sampled from marginals.
    pub fn m(&self) -> usize {
        self.selected.len()
    }

    pub fn requested(&self) -> usize {
        self.requested
    }

    pub fn shortfall(&self) -> bool {
        self.m() < self.requested
    }

    pub fn selected(&self) -> &[usize] {
        &self.selected
    }

    pub fn marginals(&self) -> &[[f64; 2]] {
        &self.marginals
    }

    pub fn cone_sizes(&self) -> &[usize] {
        &self.cone_sizes
    }

    pub fn dump(&self) -> PlanDump {
        PlanDump {
            n: self.n,
            requested_m: self.requested,
            achieved_m: self.m(),
            shortfall: self.shortfall(),
            selected: self.selected.iter().map(|i| i + 1).collect(),
            marginals: self.marginals.clone(),
            light_cone_sizes: self.cone_sizes.clone(),
        }
    }
}

/// JSON view of a plan; output indices are 1-based.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanDump {
    pub n: usize,
    pub requested_m: usize,
    pub achieved_m: usize,
    pub shortfall: bool,
    pub selected: Vec<usize>,
    pub marginals: Vec<[f64; 2]>,
    pub light_cone_sizes: Vec<usize>,
}

/// Marginal of `output` from a simulation of its light cone only.
pub fn cone_marginal(c: &Circuit, output: usize) -> Result<[f64; 2]> {
    cone_marginal_with(c, output, DEFAULT_MAX_CONE)
}

pub fn cone_marginal_with(c: &Circuit, output: usize, max_cone: usize) -> Result<[f64; 2]> {
    let sched = c.skeleton().cone_schedule(output)?;
    let w = sched.width();
    crate::statevector::check_cap("light-cone state", w, 16, max_cone)?;
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << w];
    amps[0] = Complex64::new(1.0, 0.0);
    for op in &sched.ops {
        apply_2q(&mut amps, c.gate(op.layer, op.gate), op.wires.0, op.wires.1);
    }
    Ok(marginal_of(&amps, sched.output_wire))
}

/// Selects up to `m` outputs with disjoint cones and computes their marginals.
pub fn plan(c: &Circuit, m: usize) -> Result<SpoofPlan> {
    let s = c.skeleton();
    let selection = s.greedy_disjoint(m)?;
    let computed = selection
        .selected
        .par_iter()
        .map(|&i| -> Result<([f64; 2], usize)> {
            let marg = cone_marginal(c, i)?;
            Ok((marg, s.light_cone(i)?.size()))
        })
        .collect::<Result<Vec<_>>>()?;
    let (marginals, cone_sizes): (Vec<_>, Vec<_>) = computed.into_iter().unzip();
    let mut p = SpoofPlan::from_marginals(s.n(), selection.selected, marginals, m)?;
    p.cone_sizes = cone_sizes;
    Ok(p)
}

/// One draw from the spoofing distribution.
pub fn sample<R: Rng + ?Sized>(p: &SpoofPlan, rng: &mut R) -> u64 {
    let mut x: u64 = if p.n == 64 {
        rng.gen()
    } else {
        rng.gen::<u64>() & ((1u64 << p.n) - 1)
    };
    for (&i, marg) in p.selected.iter().zip(&p.marginals) {
        let u: f64 = rng.gen();
        let bit = u64::from(u >= marg[0]);
        x = (x & !(1u64 << i)) | (bit << i);
    }
    x
}

/// A_C(x) = 2^-(n-m) Π_j q_{i_j}(x_{i_j}).
pub fn spoof_pdf(p: &SpoofPlan, x: u64) -> Result<f64> {
    check_bits(x, p.n)?;
    Ok(pdf_unchecked(p, x))
}

fn pdf_unchecked(p: &SpoofPlan, x: u64) -> f64 {
    let prod: f64 = p
        .selected
        .iter()
        .zip(&p.marginals)
        .map(|(&i, marg)| marg[((x >> i) & 1) as usize])
        .product();
    prod * 2f64.powi(p.m() as i32 - p.n as i32)
}

impl OutputDistribution for SpoofPlan {
    fn num_qubits(&self) -> usize {
        self.n
    }

    fn prob_unchecked(&self, x: u64) -> f64 {
        pdf_unchecked(self, x)
    }
}

/// Π_j 2(q_{i_j,0}^2 + q_{i_j,1}^2) - 1.
pub fn closed_form_fidelity(p: &SpoofPlan) -> f64 {
    p.marginals
        .iter()
        .map(|[a, b]| 2.0 * (a * a + b * b))
        .product::<f64>()
        - 1.0
}
