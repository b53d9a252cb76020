//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use xebspoof::{build_1d_brickwork, build_2d_grid, Circuit, Skeleton};

/// Inputs whose forward wire paths reach `output`, found by pushing every
/// input forward through the layers (the library walks backwards instead).
pub fn forward_cone(s: &Skeleton, output: usize) -> BTreeSet<usize> {
    (0..s.n())
        .filter(|&q| forward_reach(s, q).contains(&output))
        .collect()
}

pub fn forward_reach(s: &Skeleton, input: usize) -> BTreeSet<usize> {
    let mut pos: BTreeSet<usize> = [s.perm(0)[input]].into();
    for t in 1..=s.depth() {
        let touched: BTreeSet<usize> = pos.iter().flat_map(|&p| [p, p ^ 1]).collect();
        pos = touched.iter().map(|&p| s.perm(t)[p]).collect();
    }
    pos
}

fn apply_pair(amps: &mut [Complex64], u: &[Complex64; 16], hi: usize, lo: usize) {
    let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
    for (x, o) in out.iter_mut().enumerate() {
        let row = (((x >> hi) & 1) << 1) | ((x >> lo) & 1);
        let base = x & !(1 << hi) & !(1 << lo);
        for col in 0..4 {
            let y = base | ((col >> 1) << hi) | ((col & 1) << lo);
            *o += u[4 * row + col] * amps[y];
        }
    }
    amps.copy_from_slice(&out);
}

fn permute_bits(amps: &[Complex64], perm: &[usize]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
    for (x, a) in amps.iter().enumerate() {
        let mut y = 0;
        for (p, &q) in perm.iter().enumerate() {
            y |= ((x >> p) & 1) << q;
        }
        out[y] = *a;
    }
    out
}

/// Dense simulation that physically moves amplitudes for every wiring
/// permutation; bit `p` of the index is the qubit at position `p`.
pub fn naive_simulate(c: &Circuit) -> Vec<Complex64> {
    let s = c.skeleton();
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << s.n()];
    amps[0] = Complex64::new(1.0, 0.0);
    amps = permute_bits(&amps, s.perm(0));
    for t in 1..=s.depth() {
        for j in 0..s.n() / 2 {
            apply_pair(&mut amps, c.gate(t, j).entries(), 2 * j, 2 * j + 1);
        }
        amps = permute_bits(&amps, s.perm(t));
    }
    amps
}

pub fn random_skeleton<R: Rng>(n: usize, d: usize, rng: &mut R) -> Skeleton {
    let perms = (0..=d)
        .map(|_| {
            let mut p: Vec<usize> = (0..n).collect();
            p.shuffle(rng);
            p
        })
        .collect();
    Skeleton::new(n, perms).unwrap()
}

/// 1D brickwork, 2D grid or fully random wiring, chosen by `kind % 3`.
pub fn mixed_skeleton<R: Rng>(kind: usize, rng: &mut R) -> Skeleton {
    let d = rng.gen_range(0..=3);
    match kind % 3 {
        0 => build_1d_brickwork(2 * rng.gen_range(1..=5), d).unwrap(),
        1 => {
            let (r, c) =
                [(2, 2), (2, 3), (3, 2), (2, 4), (4, 2), (1, 6), (2, 5)][rng.gen_range(0..7)];
            build_2d_grid(r, c, d).unwrap()
        }
        _ => random_skeleton(2 * rng.gen_range(1..=5), d, rng),
    }
}

pub fn z_expectation(amps: &[Complex64], qubit: usize) -> f64 {
    amps.iter()
        .enumerate()
        .map(|(x, a)| {
            if (x >> qubit) & 1 == 0 {
                a.norm_sqr()
            } else {
                -a.norm_sqr()
            }
        })
        .sum()
}

pub fn marginal(amps: &[Complex64], qubit: usize) -> [f64; 2] {
    let mut m = [0.0; 2];
    for (x, a) in amps.iter().enumerate() {
        m[(x >> qubit) & 1] += a.norm_sqr();
    }
    m
}

pub fn mean_stderr(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}
