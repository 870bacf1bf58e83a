//! Dense small-matrix linear algebra and feasibility primitives.
//!
//! Everything geometric in this crate ultimately reduces to a handful of
//! decompositions on small dense matrices, plus polyhedral-cone feasibility.
//! All of them share one [`TolerancePolicy`] so that rank decisions made in
//! different modules cannot disagree.

mod cone;

pub use cone::{cone_distance, cone_extreme_rays, nnls, nonzero_cone_point, ConeGenerators};

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

pub type DenseMatrix = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Shared thresholds for all geometric decisions.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TolerancePolicy {
    /// Orthogonality defect allowed in factors.
    pub eps_orth: f64,
    /// Rank / nullspace / subspace-equality threshold.
    pub eps_rank: f64,
    /// Distance comparisons and neighborhood membership.
    pub eps_geom: f64,
    /// Factorization reconstruction residual.
    pub eps_recon: f64,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        TolerancePolicy {
            eps_orth: 1e-12,
            eps_rank: 1e-8,
            eps_geom: 1e-9,
            eps_recon: 1e-9,
        }
    }
}

impl TolerancePolicy {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps_orth > 0.0 && self.eps_rank > 0.0 && self.eps_geom > 0.0 && self.eps_recon > 0.0)
        {
            return Err(Error::Contract("tolerances must be strictly positive".into()));
        }
        if self.eps_rank < self.eps_orth {
            return Err(Error::Contract("eps_rank must be >= eps_orth".into()));
        }
        Ok(())
    }
}

pub fn all_finite(a: &DenseMatrix) -> bool {
    a.iter().all(|x| x.is_finite())
}

pub fn is_symmetric(s: &DenseMatrix, tol: &TolerancePolicy) -> bool {
    if !s.is_square() {
        return false;
    }
    let scale = 1.0_f64.max(s.amax());
    let n = s.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            if (s[(i, j)] - s[(j, i)]).abs() > tol.eps_orth * scale {
                return false;
            }
        }
    }
    true
}

pub fn orthogonality_defect(q: &DenseMatrix) -> f64 {
    let k = q.ncols();
    let qtq = q.transpose() * q;
    (&qtq - DMatrix::identity(k, k)).amax()
}

/// Singular value decomposition `A = U diag(s) V^T` with `s` descending and a
/// deterministic sign convention: the first nonzero entry of every left
/// singular vector is nonnegative.
pub fn svd(a: &DenseMatrix, _tol: &TolerancePolicy) -> Result<(DenseMatrix, Vector, DenseMatrix)> {
    if !all_finite(a) {
        return Err(Error::Contract("svd: input has non-finite entries".into()));
    }
    let decomp = nalgebra::SVD::try_new(a.clone(), true, true, f64::EPSILON, 200)
        .ok_or_else(|| Error::Numerical("svd did not converge within iteration budget".into()))?;
    let u = decomp.u.expect("requested u");
    let v_t = decomp.v_t.expect("requested v_t");
    let s = decomp.singular_values;

    // Sort descending, permuting the factor columns alongside.
    let k = s.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| s[j].partial_cmp(&s[i]).unwrap());
    let mut u_sorted = DMatrix::zeros(u.nrows(), k);
    let mut v_sorted = DMatrix::zeros(v_t.ncols(), k);
    let mut s_sorted = DVector::zeros(k);
    for (new, &old) in order.iter().enumerate() {
        u_sorted.set_column(new, &u.column(old));
        v_sorted.set_column(new, &v_t.row(old).transpose());
        s_sorted[new] = s[old];
    }
    // Sign convention for reproducible factors.
    for j in 0..k {
        let col = u_sorted.column(j);
        if let Some(first) = col.iter().find(|x| x.abs() > 1e-14) {
            if *first < 0.0 {
                let neg_u = -u_sorted.column(j);
                let neg_v = -v_sorted.column(j);
                u_sorted.set_column(j, &neg_u);
                v_sorted.set_column(j, &neg_v);
            }
        }
    }
    Ok((u_sorted, s_sorted, v_sorted))
}

/// Symmetric eigendecomposition `S = Q diag(lam) Q^T`, eigenvalues descending.
pub fn sym_eig(s: &DenseMatrix, tol: &TolerancePolicy) -> Result<(DenseMatrix, Vector)> {
    if !is_symmetric(s, tol) {
        return Err(Error::Contract("sym_eig: input is not symmetric".into()));
    }
    // Symmetrize exactly so the solver sees a bitwise-symmetric matrix.
    let sym = (s + s.transpose()) * 0.5;
    let k = sym.nrows();
    let scale = sym.norm().max(1.0);
    let mut q = DMatrix::identity(k, k);
    let mut working = sym.clone();
    // The solver sometimes converges loosely on clustered spectra; re-running
    // it on the (near-diagonal) conjugated matrix refines the pairs to
    // machine precision in one or two passes.
    for _ in 0..3 {
        let eig = nalgebra::SymmetricEigen::new(working.clone());
        q = &q * &eig.eigenvectors;
        working = q.transpose() * &sym * &q;
        let mut off = 0.0_f64;
        for i in 0..k {
            for j in 0..k {
                if i != j {
                    off = off.max(working[(i, j)].abs());
                }
            }
        }
        if off <= 1e-15 * scale {
            break;
        }
    }
    let raw_lam: Vec<f64> = (0..k).map(|i| working[(i, i)]).collect();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| raw_lam[j].partial_cmp(&raw_lam[i]).unwrap());
    let mut q_sorted = DMatrix::zeros(k, k);
    let mut lam = DVector::zeros(k);
    for (new, &old) in order.iter().enumerate() {
        q_sorted.set_column(new, &q.column(old));
        lam[new] = raw_lam[old];
    }
    Ok((q_sorted, lam))
}

/// Matrix logarithm of a symmetric positive definite matrix.
pub fn spd_log(p: &DenseMatrix, tol: &TolerancePolicy) -> Result<DenseMatrix> {
    let (q, lam) = sym_eig(p, tol)?;
    if lam.iter().any(|&l| l <= tol.eps_rank) {
        return Err(Error::Domain(format!(
            "spd_log: eigenvalue {:.3e} is not positive",
            lam.min()
        )));
    }
    let log_lam = DMatrix::from_diagonal(&lam.map(f64::ln));
    Ok(&q * log_lam * q.transpose())
}

/// Matrix exponential of a symmetric matrix.
pub fn sym_exp(x: &DenseMatrix, tol: &TolerancePolicy) -> Result<DenseMatrix> {
    let (q, lam) = sym_eig(x, tol)?;
    let exp_lam = DMatrix::from_diagonal(&lam.map(f64::exp));
    Ok(&q * exp_lam * q.transpose())
}

fn commutator_defect(x: &DenseMatrix, y: &DenseMatrix) -> f64 {
    let c = x * y - y * x;
    let scale = 1.0_f64.max(x.norm() * y.norm());
    c.norm() / scale
}

/// Jointly diagonalize a commuting family of symmetric matrices: returns an
/// orthogonal `Q` with `Q^T X_i Q` diagonal for every `i`, and the diagonals.
///
/// Uses a generic linear combination of the family; if a coefficient choice
/// collides two distinct joint eigenvalues, the verification fails and the
/// combination is retried with fresh deterministic coefficients.
pub fn simultaneous_diag(
    xs: &[DenseMatrix],
    tol: &TolerancePolicy,
) -> Result<(DenseMatrix, Vec<Vector>)> {
    if xs.is_empty() {
        return Err(Error::Contract("simultaneous_diag: empty family".into()));
    }
    let n = xs[0].nrows();
    for (i, x) in xs.iter().enumerate() {
        if !is_symmetric(x, tol) {
            return Err(Error::Contract(format!(
                "simultaneous_diag: matrix {i} is not symmetric"
            )));
        }
        if x.nrows() != n {
            return Err(Error::Contract("simultaneous_diag: size mismatch".into()));
        }
    }
    for i in 0..xs.len() {
        for j in (i + 1)..xs.len() {
            if commutator_defect(&xs[i], &xs[j]) > tol.eps_recon {
                return Err(Error::Domain(format!(
                    "simultaneous_diag: matrices {i} and {j} do not commute"
                )));
            }
        }
    }

    // Deterministic "generic" coefficient sequences.
    for attempt in 0..6u32 {
        let mut combo = DMatrix::zeros(n, n);
        for (i, x) in xs.iter().enumerate() {
            let c = (1.0 + i as f64 * std::f64::consts::SQRT_2 + attempt as f64 * 0.7311).sin()
                + 2.0;
            combo += x * c;
        }
        let (q, _) = sym_eig(&combo, tol)?;
        let mut diags = Vec::with_capacity(xs.len());
        let mut ok = true;
        for x in xs {
            let d = q.transpose() * x * &q;
            let scale = 1.0_f64.max(x.norm());
            let mut off = 0.0_f64;
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        off = off.max(d[(i, j)].abs());
                    }
                }
            }
            if off > tol.eps_recon * scale {
                ok = false;
                break;
            }
            diags.push(DVector::from_iterator(n, (0..n).map(|i| d[(i, i)])));
        }
        if ok {
            return Ok((q, diags));
        }
    }
    Err(Error::Numerical(
        "simultaneous_diag: no generic combination separated the joint eigenspaces".into(),
    ))
}
