//! Brute-force check of the analytic bands.
//!
//! The single-excitation sector of the lattice Hamiltonian on an M-cell ring
//! is a dense real symmetric 2M×2M matrix. Its spectrum, obtained with a
//! cyclic Jacobi eigensolver, must coincide with {Ω₁(k_j), Ω₂(k_j)} at the
//! ring's quasi-momenta k_j·l = 2πj/M.

use std::io::Write;

use crate::bands::branch_frequencies;
use crate::error::{Error, Result};
use crate::io::fmt_f64;
use crate::params::CrystalParams;

/// Off-diagonal Frobenius norm at which a Jacobi run counts as converged,
/// relative to the diagonal Frobenius norm.
pub const JACOBI_TOLERANCE: f64 = 1e-12;
pub const JACOBI_MAX_SWEEPS: usize = 100;
/// Agreement threshold for [`SpectrumComparison::max_rel_dev`].
pub const ORACLE_THRESHOLD: f64 = 1e-9;

/// Dense row-major matrix over the basis (photon₁..photon_M, atom₁..atom_M).
#[derive(Debug, Clone, PartialEq)]
pub struct SingleExcitationHamiltonian {
    dim: usize,
    matrix: Vec<f64>,
}

impl SingleExcitationHamiltonian {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.matrix[row * self.dim + col]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    fn set_pair(&mut self, i: usize, j: usize, value: f64) {
        self.matrix[i * self.dim + j] = value;
        self.matrix[j * self.dim + i] = value;
    }

    /// Relabels cells m → m + shift (mod M) in both sublattices.
    pub fn cyclically_relabelled(&self, shift: usize) -> Self {
        let cells = self.dim / 2;
        let map = |i: usize| {
            let (block, cell) = (i / cells, i % cells);
            block * cells + (cell + shift) % cells
        };
        let mut out = vec![0.0; self.dim * self.dim];
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[map(i) * self.dim + map(j)] = self.get(i, j);
            }
        }
        Self {
            dim: self.dim,
            matrix: out,
        }
    }
}

/// Assembles the ring Hamiltonian. Each bond gets −α (−β): half from the
/// site's own hopping term and half from its Hermitian conjugate.
pub fn build_hamiltonian(p: &CrystalParams) -> SingleExcitationHamiltonian {
    let m = p.cells;
    let dim = 2 * m;
    let mut h = SingleExcitationHamiltonian {
        dim,
        matrix: vec![0.0; dim * dim],
    };
    for cell in 0..m {
        let next = (cell + 1) % m;
        h.set_pair(cell, cell, p.omega_ph);
        h.set_pair(m + cell, m + cell, p.omega_ab);
        h.set_pair(cell, next, -p.alpha);
        h.set_pair(m + cell, m + next, -p.beta);
        h.set_pair(cell, m + cell, p.g);
    }
    h
}

fn off_and_diag_norms(a: &[f64], n: usize) -> (f64, f64) {
    let mut off = 0.0;
    let mut diag = 0.0;
    for i in 0..n {
        for j in 0..n {
            let x = a[i * n + j];
            if i == j {
                diag += x * x;
            } else {
                off += x * x;
            }
        }
    }
    (off.sqrt(), diag.sqrt())
}

/// All eigenvalues of the symmetric `n`×`n` row-major `matrix`, ascending.
///
/// Cyclic-by-row Jacobi: every sweep rotates away each (p, q) entry above the
/// diagonal once.
pub fn symmetric_eigenvalues(matrix: &[f64], n: usize) -> Result<Vec<f64>> {
    if matrix.len() != n * n {
        return Err(Error::InvalidArgument(format!(
            "matrix has {} entries, expected {}",
            matrix.len(),
            n * n
        )));
    }
    let mut a = matrix.to_vec();
    let mut converged = false;
    let mut residual = 0.0;
    for _ in 0..=JACOBI_MAX_SWEEPS {
        let (off, diag) = off_and_diag_norms(&a, n);
        residual = off;
        if off == 0.0 || off < JACOBI_TOLERANCE * diag {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, n, p, q);
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            sweeps: JACOBI_MAX_SWEEPS,
            residual,
        });
    }
    let mut eig: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    eig.sort_by(f64::total_cmp);
    Ok(eig)
}

fn rotate(a: &mut [f64], n: usize, p: usize, q: usize) {
    let apq = a[p * n + q];
    if apq == 0.0 {
        return;
    }
    let app = a[p * n + p];
    let aqq = a[q * n + q];
    let theta = (aqq - app) / (2.0 * apq);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let akp = a[k * n + p];
        let akq = a[k * n + q];
        let new_kp = c * akp - s * akq;
        let new_kq = s * akp + c * akq;
        a[k * n + p] = new_kp;
        a[p * n + k] = new_kp;
        a[k * n + q] = new_kq;
        a[q * n + k] = new_kq;
    }
    a[p * n + p] = app - t * apq;
    a[q * n + q] = aqq + t * apq;
    a[p * n + q] = 0.0;
    a[q * n + p] = 0.0;
}

pub fn eigenvalues(h: &SingleExcitationHamiltonian) -> Result<Vec<f64>> {
    symmetric_eigenvalues(&h.matrix, h.dim)
}

/// Ω₁ and Ω₂ at every ring momentum, ascending.
pub fn analytic_ring_spectrum(p: &CrystalParams) -> Vec<f64> {
    let m = p.cells;
    let mut out: Vec<f64> = (0..m)
        .flat_map(|j| {
            let kl = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
            let (w1, w2) = branch_frequencies(p, kl / p.l);
            [w1, w2]
        })
        .collect();
    out.sort_by(f64::total_cmp);
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumComparison {
    pub eigenvalues: Vec<f64>,
    pub analytic: Vec<f64>,
    /// max |λ_oracle − λ_analytic| / (|λ_analytic| + ω_ab) over sorted pairs.
    pub max_rel_dev: f64,
}

impl SpectrumComparison {
    pub fn passes(&self) -> bool {
        self.max_rel_dev < ORACLE_THRESHOLD
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "oracle_rad_s,analytic_rad_s")?;
        for (o, a) in self.eigenvalues.iter().zip(&self.analytic) {
            writeln!(out, "{},{}", fmt_f64(*o), fmt_f64(*a))?;
        }
        Ok(())
    }

    pub fn summary_line(&self) -> String {
        format!(
            "max_rel_dev={} ({})",
            fmt_f64(self.max_rel_dev),
            if self.passes() { "pass" } else { "FAIL" }
        )
    }
}

pub fn compare_to_analytic(p: &CrystalParams) -> Result<SpectrumComparison> {
    let eigenvalues = eigenvalues(&build_hamiltonian(p))?;
    let analytic = analytic_ring_spectrum(p);
    let max_rel_dev = eigenvalues
        .iter()
        .zip(&analytic)
        .map(|(o, a)| (o - a).abs() / (a.abs() + p.omega_ab))
        .fold(0.0, f64::max);
    Ok(SpectrumComparison {
        eigenvalues,
        analytic,
        max_rel_dev,
    })
}
