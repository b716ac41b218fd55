#![allow(dead_code)]

use mm_access::numerics::ComplexMatrix;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub fn random_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

pub fn to_na(m: &ComplexMatrix) -> DMatrix<Complex64> {
    DMatrix::from_fn(m.rows(), m.cols(), |r, c| m[(r, c)])
}

/// `(A^H A)^{-1} A^H B` through the normal equations, solved by LU with one
/// step of iterative refinement on the normal system.
pub fn normal_equations(a: &ComplexMatrix, b: &ComplexMatrix) -> DMatrix<Complex64> {
    let a = to_na(a);
    let b = to_na(b);
    let gram = a.adjoint() * &a;
    let rhs = a.adjoint() * &b;
    let lu = gram.clone().lu();
    let mut x = lu.solve(&rhs).expect("full rank");
    let correction = lu.solve(&(&rhs - &gram * &x)).expect("full rank");
    x += correction;
    x
}

pub fn rel_err(got: &ComplexMatrix, want: &DMatrix<Complex64>) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for r in 0..got.rows() {
        for c in 0..got.cols() {
            num += (got[(r, c)] - want[(r, c)]).norm_sqr();
            den += want[(r, c)].norm_sqr();
        }
    }
    (num / den.max(f64::MIN_POSITIVE)).sqrt()
}

use mm_access::model::{modulate_word, ChannelMatrix, Constellation, GroundTruth};

/// Exhaustive ML search for one slot over every word combination of the
/// given devices. Returns the best word per device, in `devices` order.
pub fn brute_force_ml(
    y: &[Complex64],
    channel: &ChannelMatrix,
    devices: &[usize],
    bits_per_symbol: u32,
    constellation: &Constellation,
) -> Vec<u32> {
    let words = 1u32 << bits_per_symbol;
    let maps = channel.maps;
    let combos = (words as u64).pow(devices.len() as u32);
    let mut best = (f64::INFINITY, Vec::new());
    for idx in 0..combos {
        let mut rest = idx;
        let mut choice = Vec::with_capacity(devices.len());
        let mut r = y.to_vec();
        for &d in devices {
            let w = (rest % words as u64) as u32;
            rest /= words as u64;
            let (map, s) = modulate_word(w, constellation);
            let col = channel.h.column(d * maps + map);
            for (ri, hi) in r.iter_mut().zip(col) {
                *ri -= hi * s;
            }
            choice.push(w);
        }
        let cost: f64 = r.iter().map(|z| z.norm_sqr()).sum();
        if cost < best.0 {
            best = (cost, choice);
        }
    }
    best.1
}

/// Transmitted words of the true active devices in slot `j`.
pub fn sent_words(truth: &GroundTruth, j: usize) -> Vec<u32> {
    truth.symbols.iter().map(|s| s[j].word).collect()
}
