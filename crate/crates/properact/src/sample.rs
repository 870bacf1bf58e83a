//! Seeded random generators for verification sweeps and tests.
//!
//! Every randomized sweep in the crate draws from one [`Sampler`] so that a
//! recorded seed reproduces the run exactly.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::numerics::{DenseMatrix, Vector};

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn uniform(&mut self) -> f64 {
        self.rng.gen::<f64>()
    }

    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Standard normal via Box-Muller.
    pub fn gaussian(&mut self) -> f64 {
        let u1: f64 = self.rng.gen_range(f64::MIN_POSITIVE..1.0);
        let u2: f64 = self.rng.gen();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }

    pub fn gaussian_vector(&mut self, n: usize) -> Vector {
        DVector::from_iterator(n, (0..n).map(|_| self.gaussian()))
    }

    pub fn gaussian_matrix(&mut self, m: usize, n: usize) -> DenseMatrix {
        DMatrix::from_iterator(m, n, (0..m * n).map(|_| self.gaussian()))
    }

    /// Haar-ish random orthogonal matrix from the QR of a Gaussian matrix.
    pub fn random_orthogonal(&mut self, n: usize) -> DenseMatrix {
        let a = self.gaussian_matrix(n, n);
        let qr = a.qr();
        let mut q = qr.q();
        let r = qr.r();
        for j in 0..n {
            if r[(j, j)] < 0.0 {
                let neg = -q.column(j);
                q.set_column(j, &neg);
            }
        }
        q
    }

    /// Random rotation (determinant +1).
    pub fn random_rotation(&mut self, n: usize) -> DenseMatrix {
        let mut q = self.random_orthogonal(n);
        if q.determinant() < 0.0 {
            let neg = -q.column(0);
            q.set_column(0, &neg);
        }
        q
    }

    pub fn random_symmetric(&mut self, n: usize, scale: f64) -> DenseMatrix {
        let a = self.gaussian_matrix(n, n) * scale;
        (&a + a.transpose()) * 0.5
    }

    /// Random skew-symmetric matrix with unit Frobenius norm.
    pub fn random_skew(&mut self, n: usize) -> DenseMatrix {
        let a = self.gaussian_matrix(n, n);
        let s = (&a - a.transpose()) * 0.5;
        let norm = s.norm();
        if norm < 1e-14 {
            return DenseMatrix::zeros(n, n);
        }
        s / norm
    }

    /// Random SPD matrix with log-eigenvalues uniform in `[-log_scale, log_scale]`.
    pub fn random_spd(&mut self, n: usize, log_scale: f64) -> DenseMatrix {
        let q = self.random_orthogonal(n);
        let lam = DVector::from_iterator(
            n,
            (0..n).map(|_| self.uniform_in(-log_scale, log_scale).exp()),
        );
        &q * DMatrix::from_diagonal(&lam) * q.transpose()
    }

    /// Random SPD matrix of determinant one.
    pub fn random_spd_det1(&mut self, n: usize, log_scale: f64) -> DenseMatrix {
        let q = self.random_orthogonal(n);
        let mut logs: Vec<f64> = (0..n).map(|_| self.uniform_in(-log_scale, log_scale)).collect();
        let mean = logs.iter().sum::<f64>() / n as f64;
        for l in logs.iter_mut() {
            *l -= mean;
        }
        let lam = DVector::from_iterator(n, logs.into_iter().map(f64::exp));
        &q * DMatrix::from_diagonal(&lam) * q.transpose()
    }

    /// Random element of SL(n, R): Gaussian matrix rescaled to determinant one.
    pub fn random_sl(&mut self, n: usize) -> DenseMatrix {
        loop {
            let mut a = self.gaussian_matrix(n, n);
            let det = a.determinant();
            if det.abs() < 1e-6 {
                continue;
            }
            if det < 0.0 {
                let neg = -a.column(0);
                a.set_column(0, &neg);
            }
            let det = a.determinant();
            a /= det.powf(1.0 / n as f64);
            return a;
        }
    }

    /// Random invertible matrix with determinant bounded away from zero.
    pub fn random_invertible(&mut self, n: usize) -> DenseMatrix {
        loop {
            let a = self.gaussian_matrix(n, n);
            if a.determinant().abs() > 1e-6 {
                return a;
            }
        }
    }

    /// Random unit vector.
    pub fn unit_vector(&mut self, n: usize) -> Vector {
        loop {
            let v = self.gaussian_vector(n);
            let norm = v.norm();
            if norm > 1e-8 {
                return v / norm;
            }
        }
    }

    /// Random k-dimensional orthonormal basis in dimension d (columns).
    pub fn random_subspace_basis(&mut self, d: usize, k: usize) -> DenseMatrix {
        let q = self.random_orthogonal(d);
        q.columns(0, k).into_owned()
    }

    /// Uniform random index in `0..n`.
    pub fn index(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }
}
