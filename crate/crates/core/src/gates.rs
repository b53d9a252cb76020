//! Two-qubit unitaries, Pauli matrices and Haar sampling.

use nalgebra::Matrix4;
use num_complex::Complex64;
use num_rational::Rational64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Result, XebError};

pub const UNITARITY_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A 4x4 unitary acting on a wire pair, row-major in the basis
/// |00>, |01>, |10>, |11> with the first wire as the high bit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Unitary2Q {
    entries: [Complex64; 16],
}

impl Unitary2Q {
    pub fn identity() -> Self {
        let mut entries = [ZERO; 16];
        for k in 0..4 {
            entries[5 * k] = ONE;
        }
        Unitary2Q { entries }
    }

    /// Checks unitarity to [`UNITARITY_TOL`].
    pub fn new(entries: [Complex64; 16]) -> Result<Self> {
        let u = Unitary2Q { entries };
        let dev = u.unitarity_deviation();
        if dev > UNITARITY_TOL {
            return Err(XebError::Numerical(format!(
                "matrix is not unitary (max |U†U - I| = {dev:e})"
            )));
        }
        Ok(u)
    }

    pub fn from_unchecked(entries: [Complex64; 16]) -> Self {
        Unitary2Q { entries }
    }

    /// Kronecker product `a ⊗ b`, `a` on the first wire.
    pub fn kron(a: &[[Complex64; 2]; 2], b: &[[Complex64; 2]; 2]) -> Self {
        let mut entries = [ZERO; 16];
        for r in 0..4 {
            for c in 0..4 {
                entries[4 * r + c] = a[r / 2][c / 2] * b[r % 2][c % 2];
            }
        }
        Unitary2Q { entries }
    }

    pub fn hadamard_pair() -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let had = [[h, h], [h, -h]];
        Unitary2Q::kron(&had, &had)
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[4 * row + col]
    }

    pub fn entries(&self) -> &[Complex64; 16] {
        &self.entries
    }

    pub fn adjoint(&self) -> Self {
        let mut entries = [ZERO; 16];
        for r in 0..4 {
            for c in 0..4 {
                entries[4 * r + c] = self.get(c, r).conj();
            }
        }
        Unitary2Q { entries }
    }

    pub fn mul(&self, other: &Unitary2Q) -> Self {
        let mut entries = [ZERO; 16];
        for r in 0..4 {
            for c in 0..4 {
                entries[4 * r + c] = (0..4).map(|k| self.get(r, k) * other.get(k, c)).sum();
            }
        }
        Unitary2Q { entries }
    }

    /// max over entries of |U†U - I|.
    pub fn unitarity_deviation(&self) -> f64 {
        let p = self.adjoint().mul(self);
        let id = Unitary2Q::identity();
        p.entries
            .iter()
            .zip(id.entries.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_unitary(&self) -> bool {
        self.unitarity_deviation() <= UNITARITY_TOL
    }
}

impl Default for Unitary2Q {
    fn default() -> Self {
        Unitary2Q::identity()
    }
}

impl Serialize for Unitary2Q {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = self.entries.iter().map(|z| [z.re, z.im]).collect();
        pairs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Unitary2Q {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(d)?;
        if pairs.len() != 16 {
            return Err(serde::de::Error::custom(format!(
                "a 2-qubit gate has 16 entries, got {}",
                pairs.len()
            )));
        }
        let mut entries = [ZERO; 16];
        for (e, p) in entries.iter_mut().zip(pairs) {
            *e = Complex64::new(p[0], p[1]);
        }
        Unitary2Q::new(entries).map_err(serde::de::Error::custom)
    }
}

/// Haar-random 4x4 unitary.
///
/// Draws a Ginibre matrix, takes its QR factorization and multiplies each
/// column of Q by the phase of the matching diagonal entry of R. Without the
/// phase fix the law of Q depends on the QR routine and is not Haar.
pub fn haar_sample<R: Rng + ?Sized>(rng: &mut R) -> Unitary2Q {
    loop {
        let g = Matrix4::<Complex64>::from_fn(|_, _| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
        });
        let qr = g.qr();
        let r = qr.r();
        if (0..4).any(|k| r[(k, k)].norm() < 1e-10) {
            continue;
        }
        let mut q = qr.q();
        for c in 0..4 {
            let phase = r[(c, c)] / r[(c, c)].norm();
            for row in 0..4 {
                q[(row, c)] *= phase;
            }
        }
        let mut entries = [ZERO; 16];
        for row in 0..4 {
            for c in 0..4 {
                entries[4 * row + c] = q[(row, c)];
            }
        }
        return Unitary2Q { entries };
    }
}

/// Single-qubit Pauli label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    /// Digit used in base-4 Pauli configuration indices.
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(k: usize) -> Pauli {
        Pauli::ALL[k]
    }

    pub fn matrix(self) -> [[Complex64; 2]; 2] {
        let i = Complex64::new(0.0, 1.0);
        match self {
            Pauli::I => [[ONE, ZERO], [ZERO, ONE]],
            Pauli::X => [[ZERO, ONE], [ONE, ZERO]],
            Pauli::Y => [[ZERO, i], [-i, ZERO]],
            Pauli::Z => [[ONE, ZERO], [ZERO, -ONE]],
        }
    }
}

/// `tr(a b)` for 2x2 matrices.
pub fn trace_product(a: &[[Complex64; 2]; 2], b: &[[Complex64; 2]; 2]) -> Complex64 {
    let mut t = ZERO;
    for r in 0..2 {
        for k in 0..2 {
            t += a[r][k] * b[k][r];
        }
    }
    t
}

/// Haar fourth moment E[U_{xa ya} conj(U_{xb yb}) U_{xc yc} conj(U_{xd yd})]
/// for 4x4 unitaries, indices in `0..4`, as an exact rational.
#[allow(clippy::too_many_arguments)]
pub fn fourth_moment_reference(
    xa: usize,
    xb: usize,
    xc: usize,
    xd: usize,
    ya: usize,
    yb: usize,
    yc: usize,
    yd: usize,
) -> Rational64 {
    let delta = |a: usize, b: usize| i64::from(a == b);
    let same = delta(xa, xb) * delta(xc, xd) * delta(ya, yb) * delta(yc, yd)
        + delta(xa, xd) * delta(xb, xc) * delta(ya, yd) * delta(yb, yc);
    let crossed = delta(xa, xb) * delta(xc, xd) * delta(ya, yd) * delta(yb, yc)
        + delta(xa, xd) * delta(xb, xc) * delta(ya, yb) * delta(yc, yd);
    Rational64::new(same, 15) - Rational64::new(crossed, 60)
}
