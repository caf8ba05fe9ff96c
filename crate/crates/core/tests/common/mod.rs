//! Oracles shared by integration tests. Independent of the library's
//! sampling code.

#![allow(dead_code)]

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use toric_core::gf2::Gf2Matrix;
use toric_core::lattice::Lattice;
use toric_core::stabilizer::generators;

/// Specific heat per spin of the 3D Ising model `e^{K Σ s s'}` on an L³
/// torus, by single-spin Metropolis. Returns `(K, c)` per grid point.
pub fn ising3d_specific_heat(l: usize, grid: &[f64], sweeps: usize, seed: u64) -> Vec<(f64, f64)> {
    let n = l * l * l;
    let nb = |i: usize| {
        let (x, y, z) = (i / (l * l), i / l % l, i % l);
        [
            ((x + 1) % l) * l * l + y * l + z,
            ((x + l - 1) % l) * l * l + y * l + z,
            x * l * l + ((y + 1) % l) * l + z,
            x * l * l + ((y + l - 1) % l) * l + z,
            x * l * l + y * l + (z + 1) % l,
            x * l * l + y * l + (z + l - 1) % l,
        ]
    };
    let neighbours: Vec<[usize; 6]> = (0..n).map(nb).collect();
    grid.iter()
        .enumerate()
        .map(|(g, &k)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (g as u64) << 40);
            let mut s = vec![1i8; n];
            let table: Vec<f64> = (0..=6).map(|h| (-2.0 * k * (2 * h as i64 - 6) as f64).exp()).collect();
            let mut energies = Vec::new();
            for sweep in 0..sweeps {
                for i in 0..n {
                    let h: i64 = neighbours[i].iter().map(|&j| s[j] as i64).sum::<i64>() * s[i] as i64;
                    let p = table[((h + 6) / 2) as usize];
                    if p >= 1.0 || rng.random::<f64>() < p {
                        s[i] = -s[i];
                    }
                }
                if sweep >= sweeps / 5 {
                    let bonds: i64 = (0..n)
                        .map(|i| s[i] as i64 * (s[neighbours[i][0]] + s[neighbours[i][2]] + s[neighbours[i][4]]) as i64)
                        .sum();
                    energies.push(bonds as f64);
                }
            }
            let m = energies.iter().sum::<f64>() / energies.len() as f64;
            let v = energies.iter().map(|e| (e - m).powi(2)).sum::<f64>() / energies.len() as f64;
            (k, k * k * v / n as f64)
        })
        .collect()
}

/// 3D Ising coupling mapped to the dual Z2 gauge coupling, `tanh K = e^{-2βμ}`.
pub fn ising_to_gauge(k: f64) -> f64 {
    -0.5 * k.tanh().ln()
}

/// Probability that `n` independent ±1 variables with mean `t` contain an
/// odd number of -1's.
pub fn odd(n: i32, t: f64) -> f64 {
    (1.0 - t.powi(n)) / 2.0
}

/// Exact nontrivial fraction for the (2,1) slab geometry with independent
/// plaquettes of mean `t`, conditioned on a clean interface and on the
/// global even-parity constraint. `parts` are the component sizes of the
/// exterior region `D` and `rest` the plaquette count strictly inside `C`.
pub fn conditional_nontrivial_fraction(parts: &[i32], rest: i32, t: f64) -> f64 {
    let total: i32 = parts.iter().sum::<i32>() + rest;
    let even_total = (1.0 + t.powi(total)) / 2.0;
    let all_even_d: f64 = parts.iter().map(|&n| 1.0 - odd(n, t)).product();
    let trivial = all_even_d * (1.0 - odd(rest, t));
    (even_total - trivial) / even_total
}

pub fn masks(m: &Gf2Matrix) -> Vec<usize> {
    (0..m.rows())
        .map(|r| m.row_vec(r).iter_ones().fold(0usize, |acc, i| acc | 1 << i))
        .collect()
}

pub fn parity(x: usize) -> f64 {
    if x.count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// `H = -λ Σ X-strings - μ Σ Z-strings` on `n` qubits.
pub fn hamiltonian(n: usize, x_terms: &[usize], z_terms: &[usize], lambda: f64, mu: f64) -> DMatrix<f64> {
    let dim = 1 << n;
    let mut h = DMatrix::zeros(dim, dim);
    for f in 0..dim {
        h[(f, f)] -= mu * z_terms.iter().map(|&z| parity(f & z)).sum::<f64>();
        for &x in x_terms {
            h[(f ^ x, f)] -= lambda;
        }
    }
    h
}

pub fn ln_trace_exp(h: &DMatrix<f64>, beta: f64) -> f64 {
    let e = SymmetricEigen::new(h.clone()).eigenvalues;
    let m = e.iter().cloned().fold(f64::INFINITY, f64::min);
    -beta * m + e.iter().map(|&x| (-beta * (x - m)).exp()).sum::<f64>().ln()
}

pub fn von_neumann(rho: &DMatrix<f64>) -> f64 {
    SymmetricEigen::new(rho.clone())
        .eigenvalues
        .iter()
        .filter(|&&p| p > 1e-15)
        .map(|&p| -p * p.ln())
        .sum()
}

/// Gauge-theory state `e^{βμ Σ B} P / Z` reduced to the spins in `c_mask`.
pub fn reduced_gauge_state(l: &Lattice, beta: f64, mu: f64, c_mask: usize) -> DMatrix<f64> {
    let g = generators(l, 1).unwrap();
    let stars = masks(&g.star);
    let plaqs = masks(&g.plaquette);
    let n = l.num_cells(1);
    let dim = 1 << n;
    let mut group = vec![0usize];
    for &s in &stars {
        if !group.contains(&s) {
            let extra: Vec<usize> = group.iter().map(|&x| x ^ s).collect();
            for e in extra {
                if !group.contains(&e) {
                    group.push(e);
                }
            }
        }
    }
    let mut rho = DMatrix::<f64>::zeros(dim, dim);
    for f in 0..dim {
        let w = (beta * mu * plaqs.iter().map(|&p| parity(f & p)).sum::<f64>()).exp();
        for &x in &group {
            rho[(f ^ x, f)] += w;
        }
    }
    let tr = rho.trace();
    rho /= tr;
    let c_bits: Vec<usize> = (0..n).filter(|b| c_mask >> b & 1 == 1).collect();
    let d_bits: Vec<usize> = (0..n).filter(|b| c_mask >> b & 1 == 0).collect();
    let embed = |bits: &[usize], code: usize| {
        bits.iter()
            .enumerate()
            .fold(0, |acc, (i, &b)| acc | (code >> i & 1) << b)
    };
    let dc = 1 << c_bits.len();
    let mut red = DMatrix::<f64>::zeros(dc, dc);
    for a in 0..dc {
        for b in 0..dc {
            let mut s = 0.0;
            for d in 0..1 << d_bits.len() {
                let dd = embed(&d_bits, d);
                s += rho[(embed(&c_bits, a) | dd, embed(&c_bits, b) | dd)];
            }
            red[(a, b)] = s;
        }
    }
    red
}
