//! Exact Haar averages through the Pauli-basis Markov chain.
//!
//! Averaging one Haar 2-qubit gate over the doubled tensor network replaces it
//! by a 16x16 transition matrix on Pauli pairs: `II -> II` with weight 1, any
//! non-identity pair to any non-identity pair with weight 1/15, and nothing
//! between the two classes. A configuration vector carries a weight for every
//! string in `{I,X,Y,Z}^w`; digit `k` of the base-4 index is the Pauli on wire
//! `k` (I=0, X=1, Y=2, Z=3).
//!
//! The input boundary is `Π_k tr(|0><0| σ_k/√2)^2`, which is 1/2 on I and Z
//! and zero on X and Y. The output boundary for `tr(Z_i ρ)^2` is 2 on `Z` at
//! wire `i`, 2 on `I` everywhere else, zero otherwise.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Result, XebError};
use crate::gates::Pauli;
use crate::skeleton::{ConeSchedule, Skeleton};
use crate::statevector::check_cap;

/// Largest configuration width handled by default (4^10 weights).
pub const DEFAULT_MAX_WIDTH: usize = 10;

/// The 16x16 gate-averaged transition matrix; pair index is `4 σ1 + σ2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransitionMatrix {
    entries: [[f64; 16]; 16],
}

impl TransitionMatrix {
    pub fn new() -> Self {
        let mut entries = [[1.0 / 15.0; 16]; 16];
        entries[0] = [0.0; 16];
        for row in entries.iter_mut() {
            row[0] = 0.0;
        }
        entries[0][0] = 1.0;
        TransitionMatrix { entries }
    }

    pub fn get(&self, from: (Pauli, Pauli), to: (Pauli, Pauli)) -> f64 {
        self.entries[pair_index(from)][pair_index(to)]
    }

    pub fn entries(&self) -> &[[f64; 16]; 16] {
        &self.entries
    }

    /// Exact entry as a rational.
    pub fn exact(from: (Pauli, Pauli), to: (Pauli, Pauli)) -> BigRational {
        let a = pair_index(from) == 0;
        let b = pair_index(to) == 0;
        match (a, b) {
            (true, true) => BigRational::one(),
            (false, false) => BigRational::new(BigInt::from(1), BigInt::from(15)),
            _ => BigRational::zero(),
        }
    }
}

impl Default for TransitionMatrix {
    fn default() -> Self {
        TransitionMatrix::new()
    }
}

fn pair_index((a, b): (Pauli, Pauli)) -> usize {
    4 * a.index() + b.index()
}

/// Weights over Pauli strings on `n` wires.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliConfigVector {
    n: usize,
    weights: Vec<f64>,
}

impl PauliConfigVector {
    pub fn zeros(n: usize) -> Self {
        PauliConfigVector {
            n,
            weights: vec![0.0; 1 << (2 * n)],
        }
    }

    /// Unit weight on a single configuration.
    pub fn delta(config: &[Pauli]) -> Self {
        let mut v = PauliConfigVector::zeros(config.len());
        v.weights[config_index(config)] = 1.0;
        v
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, config: &[Pauli]) -> f64 {
        assert_eq!(config.len(), self.n);
        self.weights[config_index(config)]
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Applies the transition matrix to wires `(a, b)` in place.
    pub fn apply_gate(&mut self, a: usize, b: usize) {
        debug_assert!(a != b && a < self.n && b < self.n);
        let (sa, sb) = (1usize << (2 * a), 1usize << (2 * b));
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let quarter = self.weights.len() >> 4;
        for k in 0..quarter {
            let base = insert_zero_digits(k, lo, hi);
            let mut rest = 0.0;
            for pa in 0..4 {
                for pb in 0..4 {
                    if pa | pb != 0 {
                        rest += self.weights[base + pa * sa + pb * sb];
                    }
                }
            }
            let spread = rest / 15.0;
            for pa in 0..4 {
                for pb in 0..4 {
                    if pa | pb != 0 {
                        self.weights[base + pa * sa + pb * sb] = spread;
                    }
                }
            }
        }
    }

    /// Moves the Pauli on wire `p` to wire `perm[p]`.
    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(XebError::DimensionMismatch {
                expected: self.n,
                got: perm.len(),
            });
        }
        let mut out = PauliConfigVector::zeros(self.n);
        for (idx, &w) in self.weights.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let mut target = 0usize;
            for (p, &img) in perm.iter().enumerate() {
                target |= ((idx >> (2 * p)) & 3) << (2 * img);
            }
            out.weights[target] += w;
        }
        Ok(out)
    }
}

#[inline]
fn insert_zero_digits(idx: usize, lo: usize, hi: usize) -> usize {
    let lo_mask = (1usize << (2 * lo)) - 1;
    let x = (idx & lo_mask) | ((idx & !lo_mask) << 2);
    let hi_mask = (1usize << (2 * hi)) - 1;
    (x & hi_mask) | ((x & !hi_mask) << 2)
}

fn config_index(config: &[Pauli]) -> usize {
    config
        .iter()
        .enumerate()
        .map(|(k, p)| p.index() << (2 * k))
        .sum()
}

pub fn input_boundary(n: usize) -> Result<PauliConfigVector> {
    input_boundary_with(n, DEFAULT_MAX_WIDTH)
}

/// 2^-n on every string in {I,Z}^n, zero elsewhere.
pub fn input_boundary_with(n: usize, max_width: usize) -> Result<PauliConfigVector> {
    if n == 0 {
        return Err(XebError::InvalidArgument(
            "boundary needs at least one wire".into(),
        ));
    }
    check_cap("Pauli configuration vector", n, 8u128 << n, max_width)?;
    let mut v = PauliConfigVector::zeros(n);
    let w = 0.5f64.powi(n as i32);
    for mask in 0..1usize << n {
        // Z = 3 on the wires set in `mask`
        let idx: usize = (0..n)
            .filter(|k| mask >> k & 1 == 1)
            .map(|k| 3 << (2 * k))
            .sum();
        v.weights[idx] = w;
    }
    Ok(v)
}

/// One full-width gate layer `t` (`1..=d`): the transition matrix on every
/// gate's pair of positions, then the wiring permutation `π^(t)`.
pub fn layer_transfer(v: &PauliConfigVector, s: &Skeleton, t: usize) -> Result<PauliConfigVector> {
    if v.n != s.n() {
        return Err(XebError::DimensionMismatch {
            expected: s.n(),
            got: v.n,
        });
    }
    if t == 0 || t > s.depth() {
        return Err(XebError::InvalidArgument(format!(
            "gate layer {t} outside 1..={}",
            s.depth()
        )));
    }
    let mut out = v.clone();
    for j in 0..s.gates_per_layer() {
        out.apply_gate(2 * j, 2 * j + 1);
    }
    out.permute(s.perm(t))
}

/// Output-boundary overlap: 2^w times the weight of Z on `wire`, I elsewhere.
fn output_overlap(v: &PauliConfigVector, wire: usize) -> f64 {
    v.weights[3 << (2 * wire)] * 2f64.powi(v.n as i32)
}

/// Runs the chain over a light-cone schedule and returns the final vector.
fn run_schedule(
    sched: &ConeSchedule,
    max_width: usize,
    masses: Option<&mut Vec<f64>>,
) -> Result<PauliConfigVector> {
    let mut v = input_boundary_with(sched.width(), max_width)?;
    let mut masses = masses;
    if let Some(m) = masses.as_deref_mut() {
        m.push(v.total_mass());
    }
    let mut current_layer = None;
    for op in &sched.ops {
        if let (Some(m), Some(prev)) = (masses.as_deref_mut(), current_layer) {
            if prev != op.layer {
                m.push(v.total_mass());
            }
        }
        current_layer = Some(op.layer);
        v.apply_gate(op.wires.0, op.wires.1);
    }
    if let Some(m) = masses {
        if current_layer.is_some() {
            m.push(v.total_mass());
        }
    }
    Ok(v)
}

pub fn expected_trace_squared(s: &Skeleton, output: usize) -> Result<f64> {
    expected_trace_squared_with(s, output, DEFAULT_MAX_WIDTH)
}

/// E_C[<ψ|Z_i|ψ>^2] for Haar gates, computed on the light cone of `output`.
pub fn expected_trace_squared_with(s: &Skeleton, output: usize, max_width: usize) -> Result<f64> {
    let sched = s.cone_schedule(output)?;
    let v = run_schedule(&sched, max_width, None)?;
    Ok(output_overlap(&v, sched.output_wire))
}

/// Same quantity on the full register, layer by layer. Used to check that the
/// light-cone restriction does not change the value.
pub fn expected_trace_squared_full(s: &Skeleton, output: usize, max_width: usize) -> Result<f64> {
    if output >= s.n() {
        return Err(XebError::IndexOutOfRange {
            index: output,
            len: s.n(),
        });
    }
    let mut v = input_boundary_with(s.n(), max_width)?.permute(s.perm(0))?;
    for t in 1..=s.depth() {
        v = layer_transfer(&v, s, t)?;
    }
    Ok(output_overlap(&v, output))
}

/// Chain mass after the input boundary and after each cone layer, plus the
/// final value.
pub fn layer_masses(s: &Skeleton, output: usize) -> Result<(Vec<f64>, f64)> {
    let sched = s.cone_schedule(output)?;
    let mut masses = Vec::new();
    let v = run_schedule(&sched, DEFAULT_MAX_WIDTH, Some(&mut masses))?;
    Ok((masses, output_overlap(&v, sched.output_wire)))
}

/// E[q_{i,0}^2 + q_{i,1}^2] = (1 + E[<Z_i>^2]) / 2.
pub fn single_qubit_expected_sos(s: &Skeleton, output: usize) -> Result<f64> {
    Ok((1.0 + expected_trace_squared(s, output)?) / 2.0)
}

/// Π_j 2 E[q_{i_j,0}^2 + q_{i_j,1}^2] - 1 for outputs with disjoint cones.
pub fn expected_fidelity_exact(s: &Skeleton, outputs: &[usize]) -> Result<f64> {
    let cones = outputs
        .iter()
        .map(|&i| s.light_cone(i))
        .collect::<Result<Vec<_>>>()?;
    for (a, ca) in cones.iter().enumerate() {
        for cb in &cones[a + 1..] {
            if !ca.is_disjoint(cb) {
                return Err(XebError::InvalidArgument(format!(
                    "outputs {} and {} have overlapping light cones",
                    ca.output_qubit + 1,
                    cb.output_qubit + 1
                )));
            }
        }
    }
    let mut prod = 1.0;
    for &i in outputs {
        prod *= 2.0 * single_qubit_expected_sos(s, i)?;
    }
    Ok(prod - 1.0)
}

/// A Pauli label for every wire position of every layer: `layers[0]` are the
/// input qubits, `layers[t]` the gate-input positions of layer `t` (`1..=d`),
/// and `layers[d + 1]` the output qubits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PauliAssignment {
    pub layers: Vec<Vec<Pauli>>,
}

/// Single Z threaded backward from `output`, identity everywhere else.
pub fn lower_bound_assignment(s: &Skeleton, output: usize) -> Result<PauliAssignment> {
    let n = s.n();
    if output >= n {
        return Err(XebError::IndexOutOfRange {
            index: output,
            len: n,
        });
    }
    let d = s.depth();
    let mut layers = vec![vec![Pauli::I; n]; d + 2];
    let mut pos = output;
    layers[d + 1][pos] = Pauli::Z;
    for t in (0..=d).rev() {
        pos = s.inverse_perm(t)[pos];
        layers[t][pos] = Pauli::Z;
    }
    Ok(PauliAssignment { layers })
}

/// Exact product of the boundary and layer weights for one assignment.
pub fn assignment_weight(s: &Skeleton, output: usize, a: &PauliAssignment) -> Result<BigRational> {
    let n = s.n();
    let d = s.depth();
    if a.layers.len() != d + 2 || a.layers.iter().any(|l| l.len() != n) {
        return Err(XebError::DimensionMismatch {
            expected: d + 2,
            got: a.layers.len(),
        });
    }
    if output >= n {
        return Err(XebError::IndexOutOfRange {
            index: output,
            len: n,
        });
    }
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    let two = BigRational::from_integer(BigInt::from(2));
    let mut w = BigRational::one();

    // input q feeds position π^(0)(q); Pauli orthogonality forces equal labels
    for q in 0..n {
        let sigma = a.layers[0][q];
        if a.layers[1][s.perm(0)[q]] != sigma {
            return Ok(BigRational::zero());
        }
        match sigma {
            Pauli::I | Pauli::Z => w *= &half,
            _ => return Ok(BigRational::zero()),
        }
    }
    for t in 1..=d {
        let next = &a.layers[t + 1];
        let perm = s.perm(t);
        for j in 0..s.gates_per_layer() {
            let from = (a.layers[t][2 * j], a.layers[t][2 * j + 1]);
            let to = (next[perm[2 * j]], next[perm[2 * j + 1]]);
            w *= TransitionMatrix::exact(from, to);
            if w.is_zero() {
                return Ok(w);
            }
        }
    }
    let out = &a.layers[d + 1];
    for (k, &sigma) in out.iter().enumerate() {
        let want = if k == output { Pauli::Z } else { Pauli::I };
        if sigma != want {
            return Ok(BigRational::zero());
        }
        w *= &two;
    }
    Ok(w)
}

/// Weight of [`lower_bound_assignment`]; equals 15^-d.
pub fn lower_bound_assignment_weight(s: &Skeleton, output: usize) -> Result<BigRational> {
    let a = lower_bound_assignment(s, output)?;
    assignment_weight(s, output, &a)
}
