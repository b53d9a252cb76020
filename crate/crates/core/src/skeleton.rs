//! Layered circuit architectures.
//!
//! A skeleton on `n` wires (n even) with `d` gate layers is described by `d + 1`
//! wiring permutations. Positions are 0-based internally:
//!
//! * input qubit `q` enters gate layer 1 at position `perms[0][q]`;
//! * in gate layer `t` (1-based, `1..=d`), gate `j` consumes positions `2j` and
//!   `2j + 1`, and emits its two outputs on the same two positions;
//! * position `p` after gate layer `t` feeds position `perms[t][p]` of the next
//!   layer, and after layer `d` the position is the output qubit index.
//!
//! JSON and CLI surfaces use 1-based qubit indices (`internal + 1`).

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Result, XebError};

/// A layer-by-layer wiring of 2-qubit gates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Skeleton {
    n: usize,
    perms: Vec<Vec<usize>>,
    inverse: Vec<Vec<usize>>,
}

/// Gate reference: (gate layer in `1..=d`, gate node in `0..n/2`).
pub type GateRef = (usize, usize);

/// Backward light cone of one output qubit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LightCone {
    pub output_qubit: usize,
    pub inputs: BTreeSet<usize>,
    pub gates: BTreeSet<GateRef>,
}

impl LightCone {
    pub fn size(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_disjoint(&self, other: &LightCone) -> bool {
        self.inputs.is_disjoint(&other.inputs)
    }
}

/// Outcome of greedy output selection; may hold fewer than `requested` outputs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DisjointSelection {
    pub selected: Vec<usize>,
    pub requested: usize,
}

impl DisjointSelection {
    pub fn achieved(&self) -> usize {
        self.selected.len()
    }

    pub fn shortfall(&self) -> bool {
        self.selected.len() < self.requested
    }
}

fn check_perm(n: usize, perm: &[usize]) -> Result<Vec<usize>> {
    if perm.len() != n {
        return Err(XebError::InvalidArchitecture(format!(
            "permutation has {} entries, expected {n}",
            perm.len()
        )));
    }
    let mut inv = vec![usize::MAX; n];
    for (p, &img) in perm.iter().enumerate() {
        if img >= n || inv[img] != usize::MAX {
            return Err(XebError::InvalidArchitecture(format!(
                "not a bijection on {n} wires: {perm:?}"
            )));
        }
        inv[img] = p;
    }
    Ok(inv)
}

impl Skeleton {
    /// Builds a skeleton from `d + 1` 0-based wiring permutations.
    pub fn new(n: usize, perms: Vec<Vec<usize>>) -> Result<Self> {
        if n < 2 || !n.is_multiple_of(2) {
            return Err(XebError::InvalidArchitecture(format!(
                "qubit count must be even and at least 2, got {n}"
            )));
        }
        if perms.is_empty() {
            return Err(XebError::InvalidArchitecture(
                "a skeleton needs at least one wiring permutation".into(),
            ));
        }
        let inverse = perms
            .iter()
            .map(|p| check_perm(n, p))
            .collect::<Result<Vec<_>>>()?;
        Ok(Skeleton { n, perms, inverse })
    }

    /// Same as [`Skeleton::new`] but with 1-based permutation images.
    pub fn from_one_based(n: usize, perms: &[Vec<usize>]) -> Result<Self> {
        let zero = perms
            .iter()
            .map(|p| {
                p.iter()
                    .map(|&v| {
                        v.checked_sub(1)
                            .ok_or_else(|| XebError::InvalidArchitecture("1-based image 0".into()))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Skeleton::new(n, zero)
    }

    /// Builds a skeleton from one perfect matching of logical wires per gate
    /// layer. Logical wire `w` is input qubit `w` and ends at output qubit `w`.
    pub fn from_pairings(n: usize, layers: &[Vec<(usize, usize)>]) -> Result<Self> {
        if n < 2 || !n.is_multiple_of(2) {
            return Err(XebError::InvalidArchitecture(format!(
                "qubit count must be even and at least 2, got {n}"
            )));
        }
        // wire_at[k][p]: logical wire at position p of gate layer k+1
        let mut wire_at = Vec::with_capacity(layers.len());
        for layer in layers {
            if layer.len() != n / 2 {
                return Err(XebError::InvalidArchitecture(format!(
                    "layer has {} gates, expected {}",
                    layer.len(),
                    n / 2
                )));
            }
            let mut w = Vec::with_capacity(n);
            for &(a, b) in layer {
                w.push(a);
                w.push(b);
            }
            check_perm(n, &w)?;
            wire_at.push(w);
        }
        let identity: Vec<usize> = (0..n).collect();
        let position_of = |w: &[usize]| {
            let mut pos = vec![0; n];
            for (p, &wire) in w.iter().enumerate() {
                pos[wire] = p;
            }
            pos
        };
        let mut perms = Vec::with_capacity(layers.len() + 1);
        let mut prev = identity.clone();
        for w in &wire_at {
            let pos = position_of(w);
            perms.push(prev.iter().map(|&wire| pos[wire]).collect());
            prev = w.clone();
        }
        perms.push(prev);
        Skeleton::new(n, perms)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of gate layers.
    pub fn depth(&self) -> usize {
        self.perms.len() - 1
    }

    pub fn gates_per_layer(&self) -> usize {
        self.n / 2
    }

    /// Wiring permutation leaving layer `t` (`0..=d`).
    pub fn perm(&self, t: usize) -> &[usize] {
        &self.perms[t]
    }

    pub fn inverse_perm(&self, t: usize) -> &[usize] {
        &self.inverse[t]
    }

    pub fn perms(&self) -> &[Vec<usize>] {
        &self.perms
    }

    pub fn light_cone(&self, output: usize) -> Result<LightCone> {
        if output >= self.n {
            return Err(XebError::IndexOutOfRange {
                index: output,
                len: self.n,
            });
        }
        let d = self.depth();
        let mut positions: BTreeSet<usize> = BTreeSet::from([output]);
        let mut gates = BTreeSet::new();
        for t in (1..=d).rev() {
            let inv = &self.inverse[t];
            let mut before = BTreeSet::new();
            for &p in &positions {
                let j = inv[p] / 2;
                gates.insert((t, j));
                before.insert(2 * j);
                before.insert(2 * j + 1);
            }
            positions = before;
        }
        let inv0 = &self.inverse[0];
        let inputs = positions.iter().map(|&p| inv0[p]).collect();
        Ok(LightCone {
            output_qubit: output,
            inputs,
            gates,
        })
    }

    pub fn light_cones(&self) -> Vec<LightCone> {
        (0..self.n)
            .map(|i| self.light_cone(i).expect("index in range"))
            .collect()
    }

    /// Largest light cone over all outputs.
    pub fn light_cone_size(&self) -> usize {
        self.light_cones()
            .iter()
            .map(LightCone::size)
            .max()
            .unwrap_or(0)
    }

    /// Scans outputs in ascending order and keeps each one whose cone misses
    /// every cone kept so far, stopping at `m`.
    pub fn greedy_disjoint(&self, m: usize) -> Result<DisjointSelection> {
        if m < 1 {
            return Err(XebError::InvalidArgument(
                "requested output count must be at least 1".into(),
            ));
        }
        let mut used = BTreeSet::new();
        let mut selected = Vec::new();
        for i in 0..self.n {
            if selected.len() == m {
                break;
            }
            let cone = self.light_cone(i)?;
            if cone.inputs.is_disjoint(&used) {
                used.extend(cone.inputs.iter().copied());
                selected.push(i);
            }
        }
        Ok(DisjointSelection {
            selected,
            requested: m,
        })
    }

    /// Restriction of the circuit to the backward light cone of `output`.
    pub fn cone_schedule(&self, output: usize) -> Result<ConeSchedule> {
        let cone = self.light_cone(output)?;
        let inputs: Vec<usize> = cone.inputs.iter().copied().collect();
        let mut local: Vec<Option<usize>> = vec![None; self.n];
        for (k, &q) in inputs.iter().enumerate() {
            local[self.perms[0][q]] = Some(k);
        }
        let mut ops = Vec::with_capacity(cone.gates.len());
        for t in 1..=self.depth() {
            for j in 0..self.n / 2 {
                let (pa, pb) = (2 * j, 2 * j + 1);
                if cone.gates.contains(&(t, j)) {
                    let a = local[pa].expect("cone gate fed by a cone wire");
                    let b = local[pb].expect("cone gate fed by a cone wire");
                    ops.push(ConeOp {
                        layer: t,
                        gate: j,
                        wires: (a, b),
                    });
                } else {
                    // outputs of this gate never reach `output`
                    local[pa] = None;
                    local[pb] = None;
                }
            }
            let perm = &self.perms[t];
            let mut next = vec![None; self.n];
            for (p, &slot) in local.iter().enumerate() {
                next[perm[p]] = slot;
            }
            local = next;
        }
        let output_wire = local[output].expect("output lies in its own cone");
        Ok(ConeSchedule {
            inputs,
            ops,
            output_wire,
        })
    }
}

/// One gate of a [`ConeSchedule`], acting on local wires `(first, second)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConeOp {
    pub layer: usize,
    pub gate: usize,
    pub wires: (usize, usize),
}

/// Gate sequence on the `inputs.len()` local wires of one light cone.
///
/// Local wire `k` starts as input qubit `inputs[k]`; gates are listed in
/// circuit order, so earlier layers come first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeSchedule {
    pub inputs: Vec<usize>,
    pub ops: Vec<ConeOp>,
    pub output_wire: usize,
}

impl ConeSchedule {
    pub fn width(&self) -> usize {
        self.inputs.len()
    }
}

/// Canonical periodic brickwork: layer `k` (0-based) pairs `(0,1),(2,3),…` for
/// even `k` and `(1,2),…,(n-1,0)` for odd `k`.
pub fn build_1d_brickwork(n: usize, d: usize) -> Result<Skeleton> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(XebError::InvalidArchitecture(format!(
            "1D brickwork needs an even qubit count >= 2, got {n}"
        )));
    }
    let layers: Vec<_> = (0..d)
        .map(|k| ring_pairs(&(0..n).collect::<Vec<_>>(), k % 2))
        .collect();
    Skeleton::from_pairings(n, &layers)
}

// Pairs consecutive entries of a cyclic order starting at `offset`.
fn ring_pairs(order: &[usize], offset: usize) -> Vec<(usize, usize)> {
    let len = order.len();
    (0..len / 2)
        .map(|g| {
            let k = offset + 2 * g;
            (order[k % len], order[(k + 1) % len])
        })
        .collect()
}

/// 2D grid with layers cycling horizontal-even, horizontal-odd, vertical-even,
/// vertical-odd. Qubit `(r, c)` has index `r * cols + c`.
///
/// Horizontal layers pair within rows (periodic for the odd offset) when `cols`
/// is even and otherwise pair along the row-major order; vertical layers do the
/// same with columns. With `rows == 1` this is exactly [`build_1d_brickwork`].
pub fn build_2d_grid(rows: usize, cols: usize, d: usize) -> Result<Skeleton> {
    let n = rows * cols;
    if rows == 0 || cols == 0 || !n.is_multiple_of(2) {
        return Err(XebError::InvalidArchitecture(format!(
            "grid {rows}x{cols} must have an even, positive qubit count"
        )));
    }
    let row_major: Vec<usize> = (0..n).collect();
    let col_major: Vec<usize> = (0..n).map(|k| (k % rows) * cols + k / rows).collect();
    let layers: Vec<_> = (0..d)
        .map(|k| {
            let offset = k % 2;
            if k % 4 < 2 {
                if cols.is_multiple_of(2) {
                    (0..rows)
                        .flat_map(|r| {
                            let row: Vec<usize> = (0..cols).map(|c| r * cols + c).collect();
                            ring_pairs(&row, offset)
                        })
                        .collect()
                } else {
                    ring_pairs(&row_major, offset)
                }
            } else if rows.is_multiple_of(2) {
                (0..cols)
                    .flat_map(|c| {
                        let col: Vec<usize> = (0..rows).map(|r| r * cols + c).collect();
                        ring_pairs(&col, offset)
                    })
                    .collect()
            } else {
                ring_pairs(&col_major, offset)
            }
        })
        .collect();
    Skeleton::from_pairings(n, &layers)
}

#[derive(Serialize, Deserialize)]
pub(crate) struct SkeletonJson {
    pub n: usize,
    pub d: usize,
    pub perms: Vec<Vec<usize>>,
}

impl From<&Skeleton> for SkeletonJson {
    fn from(s: &Skeleton) -> Self {
        SkeletonJson {
            n: s.n,
            d: s.depth(),
            perms: s
                .perms
                .iter()
                .map(|p| p.iter().map(|v| v + 1).collect())
                .collect(),
        }
    }
}

impl TryFrom<SkeletonJson> for Skeleton {
    type Error = XebError;

    fn try_from(j: SkeletonJson) -> Result<Self> {
        if j.perms.len() != j.d + 1 {
            return Err(XebError::InvalidArchitecture(format!(
                "d = {} requires {} permutations, got {}",
                j.d,
                j.d + 1,
                j.perms.len()
            )));
        }
        Skeleton::from_one_based(j.n, &j.perms)
    }
}

impl Serialize for Skeleton {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SkeletonJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Skeleton {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = SkeletonJson::deserialize(d)?;
        Skeleton::try_from(j).map_err(serde::de::Error::custom)
    }
}

impl Skeleton {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("skeleton serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}
