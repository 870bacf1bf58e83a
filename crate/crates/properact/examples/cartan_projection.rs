//! Cartan projection and KAK decomposition of a single matrix.

use nalgebra::{DMatrix, DVector};
use properact::cartan::{
    cartan_projection, chamber_representative, kak_decompose, weyl_orbit,
};
use properact::numerics::TolerancePolicy;

fn main() -> properact::Result<()> {
    let tol = TolerancePolicy::default();

    // A unipotent shear: logarithms of its singular values.
    let g = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]);
    let mu = cartan_projection(&g, &tol)?;
    println!("mu([[1,1],[0,1]]) = ({:.4}, {:.4})", mu[0], mu[1]);

    // g = k1 · exp(X) · k2 with k1, k2 orthogonal and X diagonal.
    let g = DMatrix::from_row_slice(3, 3, &[2.0, 1.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.5]);
    let (k1, x, k2) = kak_decompose(&g, &tol)?;
    let recon = &k1 * DMatrix::from_diagonal(&x.diagonal().map(f64::exp)) * &k2;
    println!("KAK reconstruction residual: {:.3e}", (&recon - &g).norm());
    println!(
        "orthogonality defects: {:.3e}, {:.3e}",
        (k1.transpose() * &k1 - DMatrix::identity(3, 3)).norm(),
        (k2.transpose() * &k2 - DMatrix::identity(3, 3)).norm()
    );

    // The Weyl orbit of a Cartan vector, and its chamber representative.
    let v = DVector::from_vec(vec![1.0, -1.0, 0.0]);
    println!("Weyl orbit of (1, -1, 0) has {} points", weyl_orbit(&v).len());
    let rep = chamber_representative(&v);
    println!("chamber representative: ({}, {}, {})", rep[0], rep[1], rep[2]);
    Ok(())
}
