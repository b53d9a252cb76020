//! Dense statevector simulation, used as the ground-truth oracle for q_C.
//!
//! Bit convention: output qubit `i` (0-based) is bit `i` of the basis index,
//! so `x = Σ x_i 2^i`.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, XebError};
use crate::gates::{haar_sample, Unitary2Q};
use crate::skeleton::Skeleton;

pub const DEFAULT_MAX_QUBITS: usize = 24;
const PARALLEL_MIN_QUBITS: usize = 14;

/// A skeleton with one unitary per gate node. `gates[t - 1][j]` sits on gate
/// `j` of layer `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    skeleton: Skeleton,
    gates: Vec<Vec<Unitary2Q>>,
}

impl Circuit {
    pub fn new(skeleton: Skeleton, gates: Vec<Vec<Unitary2Q>>) -> Result<Self> {
        if gates.len() != skeleton.depth() {
            return Err(XebError::DimensionMismatch {
                expected: skeleton.depth(),
                got: gates.len(),
            });
        }
        for layer in &gates {
            if layer.len() != skeleton.gates_per_layer() {
                return Err(XebError::DimensionMismatch {
                    expected: skeleton.gates_per_layer(),
                    got: layer.len(),
                });
            }
        }
        Ok(Circuit { skeleton, gates })
    }

    /// Every gate set to `u`.
    pub fn uniform(skeleton: Skeleton, u: Unitary2Q) -> Self {
        let gates = vec![vec![u; skeleton.gates_per_layer()]; skeleton.depth()];
        Circuit { skeleton, gates }
    }

    /// Independent Haar gates, drawn layer by layer, gate by gate.
    pub fn haar<R: Rng + ?Sized>(skeleton: Skeleton, rng: &mut R) -> Self {
        let gates = (0..skeleton.depth())
            .map(|_| {
                (0..skeleton.gates_per_layer())
                    .map(|_| haar_sample(rng))
                    .collect()
            })
            .collect();
        Circuit { skeleton, gates }
    }

    pub fn skeleton(&self) -> &Skeleton {
        &self.skeleton
    }

    pub fn n(&self) -> usize {
        self.skeleton.n()
    }

    /// Gate `j` of layer `t` (`1..=d`).
    pub fn gate(&self, t: usize, j: usize) -> &Unitary2Q {
        &self.gates[t - 1][j]
    }

    pub fn gates(&self) -> &[Vec<Unitary2Q>] {
        &self.gates
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("circuit serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

#[derive(Serialize, Deserialize)]
struct CircuitJson {
    #[serde(flatten)]
    skeleton: Skeleton,
    gates: Vec<Vec<Unitary2Q>>,
}

impl Serialize for Circuit {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CircuitJson {
            skeleton: self.skeleton.clone(),
            gates: self.gates.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Circuit {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = CircuitJson::deserialize(d)?;
        Circuit::new(j.skeleton, j.gates).map_err(serde::de::Error::custom)
    }
}

/// Read access to a probability distribution over n-bit strings.
pub trait OutputDistribution {
    fn num_qubits(&self) -> usize;

    /// Probability of basis string `x`; `x` is assumed to fit in n bits.
    fn prob_unchecked(&self, x: u64) -> f64;

    fn prob(&self, x: u64) -> Result<f64> {
        check_bits(x, self.num_qubits())?;
        Ok(self.prob_unchecked(x))
    }
}

pub(crate) fn check_bits(x: u64, n: usize) -> Result<()> {
    if n < 64 && x >> n != 0 {
        return Err(XebError::BitLength { value: x, n });
    }
    Ok(())
}

/// Probability vector indexed by basis string.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseDistribution {
    n: usize,
    probs: Vec<f64>,
}

impl DenseDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if !probs.len().is_power_of_two() {
            return Err(XebError::InvalidArgument(format!(
                "distribution length {} is not a power of two",
                probs.len()
            )));
        }
        let n = probs.len().trailing_zeros() as usize;
        Ok(DenseDistribution { n, probs })
    }

    pub fn uniform(n: usize) -> Self {
        let len = 1usize << n;
        DenseDistribution {
            n,
            probs: vec![1.0 / len as f64; len],
        }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// `bitstring,probability` rows; the bitstring is the basis index.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bitstring,probability\n");
        for (x, p) in self.probs.iter().enumerate() {
            out.push_str(&format!("{x},{p}\n"));
        }
        out
    }
}

impl OutputDistribution for DenseDistribution {
    fn num_qubits(&self) -> usize {
        self.n
    }

    fn prob_unchecked(&self, x: u64) -> f64 {
        self.probs[x as usize]
    }
}

/// Pure state on `n` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn zero(n: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[0] = Complex64::new(1.0, 0.0);
        StateVector { n, amps }
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        if !amps.len().is_power_of_two() {
            return Err(XebError::InvalidArgument(format!(
                "amplitude count {} is not a power of two",
                amps.len()
            )));
        }
        let n = amps.len().trailing_zeros() as usize;
        Ok(StateVector { n, amps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn output_probability(&self, x: u64) -> Result<f64> {
        self.prob(x)
    }

    /// `(Pr[x_i = 0], Pr[x_i = 1])`.
    pub fn marginal(&self, qubit: usize) -> Result<[f64; 2]> {
        if qubit >= self.n {
            return Err(XebError::IndexOutOfRange {
                index: qubit,
                len: self.n,
            });
        }
        Ok(marginal_of(&self.amps, qubit))
    }

    /// Marginal probability that the qubits in `qubits` read `bits[k]`.
    pub fn joint_marginal(&self, qubits: &[usize], bits: &[u8]) -> Result<f64> {
        if qubits.len() != bits.len() {
            return Err(XebError::DimensionMismatch {
                expected: qubits.len(),
                got: bits.len(),
            });
        }
        let mut mask = 0usize;
        let mut want = 0usize;
        for (&q, &b) in qubits.iter().zip(bits) {
            if q >= self.n {
                return Err(XebError::IndexOutOfRange {
                    index: q,
                    len: self.n,
                });
            }
            mask |= 1 << q;
            want |= usize::from(b & 1) << q;
        }
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(x, _)| x & mask == want)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// <psi| Z_i |psi>.
    pub fn z_expectation(&self, qubit: usize) -> Result<f64> {
        let [p0, p1] = self.marginal(qubit)?;
        Ok(p0 - p1)
    }

    /// Σ_x q(x)^2.
    pub fn collision_probability(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr().powi(2)).sum()
    }

    pub fn to_distribution(&self) -> DenseDistribution {
        DenseDistribution {
            n: self.n,
            probs: self.probabilities(),
        }
    }

    /// Applies `u` with `first` as the high bit of the pair index.
    pub fn apply_gate(&mut self, u: &Unitary2Q, first: usize, second: usize) {
        apply_2q(&mut self.amps, u, first, second);
    }
}

impl OutputDistribution for StateVector {
    fn num_qubits(&self) -> usize {
        self.n
    }

    fn prob_unchecked(&self, x: u64) -> f64 {
        self.amps[x as usize].norm_sqr()
    }
}

pub(crate) fn marginal_of(amps: &[Complex64], bit: usize) -> [f64; 2] {
    let mut m = [0.0; 2];
    for (x, a) in amps.iter().enumerate() {
        m[(x >> bit) & 1] += a.norm_sqr();
    }
    m
}

#[inline]
fn insert_zero_bits(idx: usize, lo: usize, hi: usize) -> usize {
    let lo_mask = (1 << lo) - 1;
    let x = (idx & lo_mask) | ((idx & !lo_mask) << 1);
    let hi_mask = (1 << hi) - 1;
    (x & hi_mask) | ((x & !hi_mask) << 1)
}

#[inline]
fn apply_block(amps: &mut [Complex64], u: &Unitary2Q, first: usize, second: usize) {
    let (lo, hi) = if first < second {
        (first, second)
    } else {
        (second, first)
    };
    let quarter = amps.len() >> 2;
    let (fa, fb) = (1usize << first, 1usize << second);
    for k in 0..quarter {
        let base = insert_zero_bits(k, lo, hi);
        let idx = [base, base | fb, base | fa, base | fa | fb];
        let v = [amps[idx[0]], amps[idx[1]], amps[idx[2]], amps[idx[3]]];
        for (r, &i) in idx.iter().enumerate() {
            amps[i] =
                u.get(r, 0) * v[0] + u.get(r, 1) * v[1] + u.get(r, 2) * v[2] + u.get(r, 3) * v[3];
        }
    }
}

/// Applies a 2-qubit gate on bits `first` (high) and `second` (low).
pub(crate) fn apply_2q(amps: &mut [Complex64], u: &Unitary2Q, first: usize, second: usize) {
    debug_assert_ne!(first, second);
    let n = amps.len().trailing_zeros() as usize;
    let block = 1usize << (first.max(second) + 1);
    if n >= PARALLEL_MIN_QUBITS && block < amps.len() {
        // contiguous blocks of size 2^(hi+1) are closed under the gate
        amps.par_chunks_mut(block)
            .for_each(|chunk| apply_block(chunk, u, first, second));
    } else {
        apply_block(amps, u, first, second);
    }
}

/// Options for [`simulate_with`].
#[derive(Clone, Copy, Debug)]
pub struct SimOptions {
    pub max_qubits: usize,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions {
            max_qubits: DEFAULT_MAX_QUBITS,
        }
    }
}

pub(crate) fn check_cap(
    what: &'static str,
    width: usize,
    bytes_per: u128,
    cap: usize,
) -> Result<()> {
    if width > cap {
        let bytes = if width < 100 {
            bytes_per << width
        } else {
            u128::MAX
        };
        return Err(XebError::ResourceCap {
            what,
            width,
            bytes,
            cap,
        });
    }
    Ok(())
}

pub fn simulate(c: &Circuit) -> Result<StateVector> {
    simulate_with(c, SimOptions::default())
}

/// C|0^n>. Wiring permutations are tracked as a position-to-bit map and
/// resolved by a single reindexing at the end.
pub fn simulate_with(c: &Circuit, opts: SimOptions) -> Result<StateVector> {
    let s = c.skeleton();
    let n = s.n();
    check_cap("statevector", n, 16, opts.max_qubits)?;
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
    amps[0] = Complex64::new(1.0, 0.0);

    // bit_at[p]: amplitude bit holding the wire at position p
    let mut bit_at = vec![0usize; n];
    for q in 0..n {
        bit_at[s.perm(0)[q]] = q;
    }
    for t in 1..=s.depth() {
        for j in 0..s.gates_per_layer() {
            apply_2q(&mut amps, c.gate(t, j), bit_at[2 * j], bit_at[2 * j + 1]);
        }
        debug_assert!(
            (amps.iter().map(|a| a.norm_sqr()).sum::<f64>() - 1.0).abs() < 1e-10,
            "norm drifted in layer {t}"
        );
        let perm = s.perm(t);
        let mut next = vec![0usize; n];
        for p in 0..n {
            next[perm[p]] = bit_at[p];
        }
        bit_at = next;
    }

    if bit_at.iter().enumerate().all(|(i, &b)| i == b) {
        return Ok(StateVector { n, amps });
    }
    let mut out = vec![Complex64::new(0.0, 0.0); 1 << n];
    for (x, slot) in out.iter_mut().enumerate() {
        let mut y = 0usize;
        for (i, &b) in bit_at.iter().enumerate() {
            y |= ((x >> i) & 1) << b;
        }
        *slot = amps[y];
    }
    Ok(StateVector { n, amps: out })
}

/// Instance score 2^n q(x) - 1.
pub fn xeb_instance<Q: OutputDistribution + ?Sized>(q: &Q, x: u64) -> Result<f64> {
    let p = q.prob(x)?;
    Ok(scale(q.num_qubits()) * p - 1.0)
}

/// F_C(p) = 2^n Σ_x q(x) p(x) - 1 by exhaustive summation.
pub fn linear_xeb<Q, P>(q: &Q, p: &P) -> Result<f64>
where
    Q: OutputDistribution + ?Sized,
    P: OutputDistribution + ?Sized,
{
    let n = q.num_qubits();
    if p.num_qubits() != n {
        return Err(XebError::DimensionMismatch {
            expected: n,
            got: p.num_qubits(),
        });
    }
    let total: f64 = (0..1u64 << n)
        .map(|x| q.prob_unchecked(x) * p.prob_unchecked(x))
        .sum();
    Ok(scale(n) * total - 1.0)
}

pub fn collision_probability(psi: &StateVector) -> f64 {
    psi.collision_probability()
}

pub(crate) fn scale(n: usize) -> f64 {
    2f64.powi(n as i32)
}
