//! The ambient reductive matrix group: Cartan projection, KAK
//! decomposition, and construction of the Cartan image `a(H)` for subgroup
//! specifications.
//!
//! The ambient group is `SL(N, R)` or `GL(N, R)` with the transpose
//! involution; `K` is the orthogonal factor, the flat `a` is the diagonal
//! subspace (sum-zero slice for SL), and the Weyl group is the full
//! permutation group of coordinates.

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};

use crate::flats::{FlatSpace, SetVariant, StructuredSet};
use crate::numerics::{
    all_finite, simultaneous_diag, svd, sym_exp, DenseMatrix, TolerancePolicy, Vector,
};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum GroupKind {
    #[serde(rename = "GL")]
    Gl,
    #[serde(rename = "SL")]
    Sl,
}

/// The ambient group `G` in its matrix realization.
#[derive(Debug, Clone)]
pub struct AmbientGroup {
    pub n: usize,
    pub kind: GroupKind,
}

impl AmbientGroup {
    pub fn new(kind: GroupKind, n: usize) -> Result<Self> {
        if n == 0 || n > 32 {
            return Err(Error::Contract(format!("ambient size {n} out of range 1..=32")));
        }
        Ok(AmbientGroup { n, kind })
    }

    /// Real rank of the ambient: N-1 for SL, N for GL.
    pub fn real_rank(&self) -> usize {
        match self.kind {
            GroupKind::Sl => self.n - 1,
            GroupKind::Gl => self.n,
        }
    }

    /// The flat `a` with its permutation Weyl group.
    pub fn cartan_space(&self) -> Result<FlatSpace> {
        permutation_flat_space(self.n, self.kind == GroupKind::Sl)
    }

    /// Verify the invariants of a group element.
    pub fn check_element(&self, g: &DenseMatrix, tol: &TolerancePolicy) -> Result<()> {
        if g.nrows() != self.n || g.ncols() != self.n {
            return Err(Error::Contract(format!(
                "element is {}x{}, ambient is {}x{}",
                g.nrows(),
                g.ncols(),
                self.n,
                self.n
            )));
        }
        if !all_finite(g) {
            return Err(Error::Contract("element has non-finite entries".into()));
        }
        let (_, s, _) = svd(g, tol)?;
        if s[s.len() - 1] <= tol.eps_rank {
            return Err(Error::Domain(format!(
                "element is numerically singular (smallest singular value {:.3e})",
                s[s.len() - 1]
            )));
        }
        if self.kind == GroupKind::Sl {
            let det = g.determinant();
            if (det - 1.0).abs() > tol.eps_recon * self.n as f64 * (1.0 + g.norm()) {
                return Err(Error::Domain(format!(
                    "determinant {det:.6} is not 1 for an SL element"
                )));
            }
        }
        Ok(())
    }
}

/// The flat `R^n` (sum-zero slice when requested) acted on by all `n!`
/// permutation matrices.
pub fn permutation_flat_space(n: usize, sum_zero: bool) -> Result<FlatSpace> {
    if n > 8 {
        return Err(Error::Budget(format!(
            "permutation group of degree {n} exceeds the supported size"
        )));
    }
    let mut group = Vec::new();
    for perm in (0..n).permutations(n) {
        let mut m = DMatrix::zeros(n, n);
        for (i, &j) in perm.iter().enumerate() {
            m[(i, j)] = 1.0;
        }
        group.push(m);
    }
    Ok(FlatSpace {
        ambient_dim: n,
        constraint: if sum_zero {
            Some(DVector::from_element(n, 1.0))
        } else {
            None
        },
        group,
    })
}

/// Specification of a subgroup `H` of the ambient group.
#[derive(Debug, Clone)]
pub enum SubgroupSpec {
    /// A reductive subgroup given by commuting symmetric generators spanning
    /// a Cartan subspace of `h ∩ p`.
    ReductiveCartan { generators: Vec<DenseMatrix> },
    /// A discrete subgroup given by matrix generators.
    Discrete { generators: Vec<DenseMatrix> },
    /// The one-parameter subgroup `exp(t X)` of a symmetric `X`.
    OneParameter { x: DenseMatrix },
    /// An explicit finite list of elements.
    ElementList { elements: Vec<DenseMatrix> },
}

impl SubgroupSpec {
    pub fn is_reductive_variant(&self) -> bool {
        matches!(
            self,
            SubgroupSpec::ReductiveCartan { .. } | SubgroupSpec::OneParameter { .. }
        )
    }

    /// Validate the variant invariants against the ambient group.
    pub fn validate(&self, ambient: &AmbientGroup, tol: &TolerancePolicy) -> Result<()> {
        match self {
            SubgroupSpec::ReductiveCartan { generators } => {
                if generators.is_empty() {
                    return Err(Error::Contract("reductive spec: no generators".into()));
                }
                for (i, x) in generators.iter().enumerate() {
                    check_cartan_generator(ambient, x, i, tol)?;
                }
                for i in 0..generators.len() {
                    for j in (i + 1)..generators.len() {
                        let c = &generators[i] * &generators[j] - &generators[j] * &generators[i];
                        let scale = 1.0_f64.max(generators[i].norm() * generators[j].norm());
                        if c.norm() > tol.eps_recon * scale {
                            return Err(Error::Domain(format!(
                                "reductive spec: generators {i} and {j} do not commute"
                            )));
                        }
                    }
                }
                Ok(())
            }
            SubgroupSpec::OneParameter { x } => check_cartan_generator(ambient, x, 0, tol),
            SubgroupSpec::Discrete { generators } => {
                if generators.is_empty() {
                    return Err(Error::Contract("discrete spec: no generators".into()));
                }
                for (i, g) in generators.iter().enumerate() {
                    ambient
                        .check_element(g, tol)
                        .map_err(|e| e.tag(&format!("generator {i}")))?;
                }
                Ok(())
            }
            SubgroupSpec::ElementList { elements } => {
                if elements.is_empty() {
                    return Err(Error::Contract("element list: empty".into()));
                }
                for (i, g) in elements.iter().enumerate() {
                    ambient
                        .check_element(g, tol)
                        .map_err(|e| e.tag(&format!("element {i}")))?;
                }
                Ok(())
            }
        }
    }
}

fn check_cartan_generator(
    ambient: &AmbientGroup,
    x: &DenseMatrix,
    idx: usize,
    tol: &TolerancePolicy,
) -> Result<()> {
    if x.nrows() != ambient.n || x.ncols() != ambient.n {
        return Err(Error::Contract(format!("generator {idx}: wrong size")));
    }
    if !crate::numerics::is_symmetric(x, &TolerancePolicy {
        eps_orth: tol.eps_orth * 100.0,
        ..*tol
    }) {
        return Err(Error::Domain(format!(
            "generator {idx} is not symmetric; the Cartan image of its one-parameter group is not a line"
        )));
    }
    if ambient.kind == GroupKind::Sl && x.trace().abs() > tol.eps_recon * (1.0 + x.norm()) {
        return Err(Error::Domain(format!(
            "generator {idx} has nonzero trace; exp(tX) leaves SL"
        )));
    }
    Ok(())
}

/// Cartan projection: descending log singular values of `g`.
pub fn cartan_projection(g: &DenseMatrix, tol: &TolerancePolicy) -> Result<Vector> {
    let (_, s, _) = svd(g, tol)?;
    if s[s.len() - 1] <= tol.eps_rank {
        return Err(Error::Domain("cartan_projection: singular matrix".into()));
    }
    Ok(s.map(f64::ln))
}

/// KAK decomposition `g = k1 exp(X) k2` with `X = diag(cartan_projection(g))`.
pub fn kak_decompose(
    g: &DenseMatrix,
    tol: &TolerancePolicy,
) -> Result<(DenseMatrix, DenseMatrix, DenseMatrix)> {
    let (u, s, v) = svd(g, tol)?;
    if s[s.len() - 1] <= tol.eps_rank {
        return Err(Error::Domain("kak_decompose: singular matrix".into()));
    }
    let x = DMatrix::from_diagonal(&s.map(f64::ln));
    Ok((u, x, v.transpose()))
}

/// All distinct coordinate permutations of `v`.
pub fn weyl_orbit(v: &Vector) -> Vec<Vector> {
    let n = v.len();
    let mut out: Vec<Vector> = Vec::new();
    for perm in (0..n).permutations(n) {
        let w = DVector::from_iterator(n, perm.iter().map(|&i| v[i]));
        if !out.iter().any(|u| (u - &w).amax() < 1e-12) {
            out.push(w);
        }
    }
    out
}

/// Sorted-descending copy of a vector (the closed-chamber representative).
pub fn chamber_representative(v: &Vector) -> Vector {
    let mut entries: Vec<f64> = v.iter().copied().collect();
    entries.sort_by(|a, b| b.partial_cmp(a).unwrap());
    DVector::from_vec(entries)
}

/// Budget-tagged word ball of a finitely generated subgroup: all products of
/// generators and inverses of length at most `word_length`, deduplicated by
/// relative Frobenius distance.
pub fn word_ball(
    generators: &[DenseMatrix],
    word_length: usize,
    tol: &TolerancePolicy,
) -> Result<Vec<DenseMatrix>> {
    let n = generators
        .first()
        .map(|g| g.nrows())
        .ok_or_else(|| Error::Contract("word_ball: no generators".into()))?;
    let mut letters: Vec<DenseMatrix> = Vec::new();
    for g in generators {
        letters.push(g.clone());
        let inv = g
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Domain("word_ball: non-invertible generator".into()))?;
        letters.push(inv);
    }
    let mut ball: Vec<DenseMatrix> = vec![DMatrix::identity(n, n)];
    let mut frontier: Vec<DenseMatrix> = vec![DMatrix::identity(n, n)];
    let close = |a: &DenseMatrix, b: &DenseMatrix| -> bool {
        (a - b).norm() <= tol.eps_geom * (1.0 + a.norm().max(b.norm()))
    };
    for _ in 0..word_length {
        let mut next: Vec<DenseMatrix> = Vec::new();
        for w in &frontier {
            for l in &letters {
                let prod = w * l;
                if !ball.iter().chain(next.iter()).any(|e| close(e, &prod)) {
                    next.push(prod);
                }
            }
        }
        if ball.len() + next.len() > 200_000 {
            return Err(Error::Budget(format!(
                "word ball exceeds 200000 elements at the requested length"
            )));
        }
        ball.extend(next.iter().cloned());
        frontier = next;
    }
    Ok(ball)
}

/// The Cartan image `a(H)` of a subgroup specification.
///
/// Reductive variants yield an exact, W-saturated union of subspaces.
/// Discrete / element-list variants yield a W-saturated point cloud tagged by
/// the word-length budget; it is empirical by nature and is never fed to the
/// exact decision.
pub fn a_of_subgroup(
    ambient: &AmbientGroup,
    spec: &SubgroupSpec,
    word_length: usize,
    tol: &TolerancePolicy,
) -> Result<StructuredSet> {
    spec.validate(ambient, tol)?;
    let space = ambient.cartan_space()?;
    match spec {
        SubgroupSpec::ReductiveCartan { generators } => {
            let (_, diags) = simultaneous_diag(generators, tol)?;
            subspace_from_diagonals(&diags, ambient.n, &space, tol)
        }
        SubgroupSpec::OneParameter { x } => {
            let (_, diag) = crate::numerics::sym_eig(x, tol)?;
            subspace_from_diagonals(&[diag], ambient.n, &space, tol)
        }
        SubgroupSpec::Discrete { generators } => {
            let ball = word_ball(generators, word_length, tol)?;
            cloud_from_elements(&ball, tol)
        }
        SubgroupSpec::ElementList { elements } => cloud_from_elements(elements, tol),
    }
}

fn subspace_from_diagonals(
    diags: &[Vector],
    n: usize,
    space: &FlatSpace,
    tol: &TolerancePolicy,
) -> Result<StructuredSet> {
    // Span of the diagonal vectors as a subspace of a, orthonormalized.
    let mat = DMatrix::from_columns(diags);
    let (u, s, _) = svd(&mat, tol)?;
    let scale = s.iter().cloned().fold(1.0_f64, f64::max);
    let rank = s.iter().filter(|&&x| x > tol.eps_rank * scale).count();
    debug_assert_eq!(u.nrows(), n);
    let basis: DenseMatrix = u.columns(0, rank).into_owned();
    let set = StructuredSet::subspaces(vec![basis]);
    crate::flats::symmetrize(&set, space, tol)
}

fn cloud_from_elements(elements: &[DenseMatrix], tol: &TolerancePolicy) -> Result<StructuredSet> {
    let mut points: Vec<Vector> = Vec::new();
    for g in elements {
        let mu = cartan_projection(g, tol)?;
        for p in weyl_orbit(&mu) {
            if !points
                .iter()
                .any(|q| (q - &p).norm() <= tol.eps_geom * (1.0 + p.norm()))
            {
                points.push(p);
            }
        }
    }
    Ok(StructuredSet {
        variant: SetVariant::Cloud(points),
        w_saturated: true,
    })
}

/// Real rank of a reductive-variant specification: the dimension of the
/// supplied Cartan subspace.
pub fn real_rank(
    ambient: &AmbientGroup,
    spec: &SubgroupSpec,
    tol: &TolerancePolicy,
) -> Result<usize> {
    match spec {
        SubgroupSpec::ReductiveCartan { generators } => {
            spec.validate(ambient, tol)?;
            let (_, diags) = simultaneous_diag(generators, tol)?;
            let mat = DMatrix::from_columns(&diags);
            let (_, s, _) = svd(&mat, tol)?;
            let scale = s.iter().cloned().fold(1.0_f64, f64::max);
            Ok(s.iter().filter(|&&x| x > tol.eps_rank * scale).count())
        }
        SubgroupSpec::OneParameter { x } => {
            spec.validate(ambient, tol)?;
            Ok(if x.norm() > tol.eps_rank { 1 } else { 0 })
        }
        _ => Err(Error::Unsupported(
            "real rank is defined only for reductive-variant specifications".into(),
        )),
    }
}

/// A finite mesh-net of the compact two-sided thickening
/// `D_rho = { g | d(g·*, *) <= rho }`.
#[derive(Debug, Clone)]
pub struct CompactNetD {
    pub rho: f64,
    pub mesh: f64,
    pub elements: Vec<DenseMatrix>,
}

/// Deterministic net of `D_rho` of the form `k exp(X) k'` with `k, k'` on a
/// net of K and `X` on a grid of the rho/2 ball of `a` (the factor 2 from
/// the `p = g g^T` metric convention).
pub fn group_ball_net(
    ambient: &AmbientGroup,
    rho: f64,
    mesh: f64,
    tol: &TolerancePolicy,
) -> Result<CompactNetD> {
    if rho < 0.0 || mesh <= 0.0 {
        return Err(Error::Contract("group_ball_net: rho >= 0 and mesh > 0 required".into()));
    }
    if ambient.n > 3 {
        return Err(Error::Contract(
            "group_ball_net: only N <= 3 is supported (combinatorial size)".into(),
        ));
    }
    let k_net = orthogonal_net(ambient, mesh)?;
    let grid = cartan_ball_grid(ambient, rho / 2.0, mesh);
    let estimate = k_net.len() * k_net.len() * grid.len();
    if estimate > 1_000_000 {
        return Err(Error::Budget(format!(
            "group_ball_net: {} x {} x {} = {estimate} elements exceeds the 1e6 budget; \
             coarsen the mesh or shrink rho",
            k_net.len(),
            k_net.len(),
            grid.len()
        )));
    }
    let mut elements = Vec::with_capacity(estimate.min(1 << 20));
    let mut seen: std::collections::HashSet<Vec<i64>> = std::collections::HashSet::new();
    for k1 in &k_net {
        for x in &grid {
            let ax = sym_exp(&DMatrix::from_diagonal(x), tol)?;
            let k1ax = k1 * ax;
            for k2 in &k_net {
                let g = &k1ax * k2;
                let key: Vec<i64> = g.iter().map(|v| (v * 1e7).round() as i64).collect();
                if seen.insert(key) {
                    elements.push(g);
                }
            }
        }
    }
    Ok(CompactNetD {
        rho,
        mesh,
        elements,
    })
}

fn orthogonal_net(ambient: &AmbientGroup, mesh: f64) -> Result<Vec<DenseMatrix>> {
    let n = ambient.n;
    let mut rotations: Vec<DenseMatrix> = Vec::new();
    match n {
        1 => rotations.push(DMatrix::identity(1, 1)),
        2 => {
            let steps = (2.0 * std::f64::consts::PI / mesh).ceil() as usize;
            for i in 0..steps {
                let t = 2.0 * std::f64::consts::PI * i as f64 / steps as f64;
                rotations.push(DMatrix::from_row_slice(
                    2,
                    2,
                    &[t.cos(), -t.sin(), t.sin(), t.cos()],
                ));
            }
        }
        3 => {
            // Euler-angle grid on SO(3).
            let steps = (2.0 * std::f64::consts::PI / mesh).ceil() as usize;
            let half = (std::f64::consts::PI / mesh).ceil() as usize + 1;
            let rz = |t: f64| {
                DMatrix::from_row_slice(
                    3,
                    3,
                    &[t.cos(), -t.sin(), 0.0, t.sin(), t.cos(), 0.0, 0.0, 0.0, 1.0],
                )
            };
            let ry = |t: f64| {
                DMatrix::from_row_slice(
                    3,
                    3,
                    &[t.cos(), 0.0, t.sin(), 0.0, 1.0, 0.0, -t.sin(), 0.0, t.cos()],
                )
            };
            for i in 0..steps {
                let a = 2.0 * std::f64::consts::PI * i as f64 / steps as f64;
                for j in 0..half {
                    let b = std::f64::consts::PI * j as f64 / (half - 1).max(1) as f64;
                    for k in 0..steps {
                        let c = 2.0 * std::f64::consts::PI * k as f64 / steps as f64;
                        rotations.push(rz(a) * ry(b) * rz(c));
                    }
                }
            }
        }
        _ => unreachable!(),
    }
    if ambient.kind == GroupKind::Gl {
        // O(n): adjoin the reflection coset.
        let mut refl = DMatrix::identity(n, n);
        refl[(0, 0)] = -1.0;
        let mirrored: Vec<DenseMatrix> = rotations.iter().map(|r| &refl * r).collect();
        rotations.extend(mirrored);
    }
    Ok(rotations)
}

fn cartan_ball_grid(ambient: &AmbientGroup, radius: f64, mesh: f64) -> Vec<Vector> {
    let n = ambient.n;
    let mut out: Vec<Vector> = Vec::new();
    if radius <= 0.0 {
        out.push(DVector::zeros(n));
        return out;
    }
    match ambient.kind {
        GroupKind::Sl => {
            // Sum-zero slice: a lattice in the (n-1)-dimensional slice.
            match n {
                1 => out.push(DVector::zeros(1)),
                2 => {
                    // X = diag(t, -t), |X| = sqrt(2)|t|.
                    let tmax = radius / 2.0_f64.sqrt();
                    let step = mesh / 2.0_f64.sqrt();
                    let k = (tmax / step).floor() as i64;
                    for i in -k..=k {
                        let t = i as f64 * step;
                        out.push(DVector::from_vec(vec![t, -t]));
                    }
                }
                3 => {
                    // X = diag(u, v, -u-v).
                    let step = mesh / 3.0_f64.sqrt();
                    let k = (radius / step).ceil() as i64;
                    for i in -k..=k {
                        for j in -k..=k {
                            let u = i as f64 * step;
                            let v = j as f64 * step;
                            let x = DVector::from_vec(vec![u, v, -u - v]);
                            if x.norm() <= radius {
                                out.push(x);
                            }
                        }
                    }
                }
                _ => {}
            }
        }
        GroupKind::Gl => {
            let step = mesh / (n as f64).sqrt();
            let k = (radius / step).ceil() as i64;
            let mut idx = vec![-k; n];
            loop {
                let x = DVector::from_iterator(n, idx.iter().map(|&i| i as f64 * step));
                if x.norm() <= radius {
                    out.push(x);
                }
                let mut carry = 0;
                loop {
                    if carry == n {
                        return ensure_origin(out, n);
                    }
                    idx[carry] += 1;
                    if idx[carry] <= k {
                        break;
                    }
                    idx[carry] = -k;
                    carry += 1;
                }
            }
        }
    }
    ensure_origin(out, n)
}

fn ensure_origin(mut grid: Vec<Vector>, n: usize) -> Vec<Vector> {
    if !grid.iter().any(|x| x.norm() < 1e-14) {
        grid.push(DVector::zeros(n));
    }
    grid
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::Sampler;

    fn tol() -> TolerancePolicy {
        TolerancePolicy::default()
    }

    #[test]
    fn projection_of_identity_and_diagonal() {
        let t = tol();
        assert!(cartan_projection(&DMatrix::identity(3, 3), &t).unwrap().norm() < 1e-12);
        let e = std::f64::consts::E;
        let g = DMatrix::from_diagonal(&DVector::from_vec(vec![e * e, 1.0 / e, 1.0 / e]));
        let mu = cartan_projection(&g, &t).unwrap();
        assert!((mu - DVector::from_vec(vec![2.0, -1.0, -1.0])).amax() < 1e-12);
    }

    #[test]
    fn projection_of_shear_matches_characteristic_polynomial() {
        // Oracle: eigenvalues of g g^T are (3 ± sqrt 5)/2, so
        // mu = (log(...)/2, -log(...)/2).
        let t = tol();
        let g = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]);
        let mu = cartan_projection(&g, &t).unwrap();
        let expected = 0.5 * ((3.0 + 5.0_f64.sqrt()) / 2.0).ln();
        assert!((mu[0] - expected).abs() < 1e-12);
        assert!((mu[1] + expected).abs() < 1e-12);
        assert!((mu[0] - 0.4812).abs() < 1e-4);
    }

    #[test]
    fn projection_sum_is_log_det() {
        let t = tol();
        let mut rng = Sampler::new(17);
        for _ in 0..100 {
            let g = rng.random_invertible(4);
            let mu = cartan_projection(&g, &t).unwrap();
            assert!((mu.sum() - g.determinant().abs().ln()).abs() < 1e-8);
        }
        for _ in 0..100 {
            let g = rng.random_sl(4);
            let mu = cartan_projection(&g, &t).unwrap();
            assert!(mu.sum().abs() < 1e-9);
        }
    }

    #[test]
    fn projection_laws() {
        let t = tol();
        let mut rng = Sampler::new(23);
        for _ in 0..300 {
            let g = rng.random_sl(3);
            let mu = cartan_projection(&g, &t).unwrap();
            // mu(g^{-1}) = descending sort of -mu(g).
            let inv = g.clone().try_inverse().unwrap();
            let mu_inv = cartan_projection(&inv, &t).unwrap();
            let expected = chamber_representative(&(-&mu));
            assert!((mu_inv - expected).amax() < 1e-8);
            // bi-K-invariance.
            let k1 = rng.random_rotation(3);
            let k2 = rng.random_rotation(3);
            let mu_k = cartan_projection(&(&k1 * &g * &k2), &t).unwrap();
            assert!((&mu - &mu_k).amax() < 1e-9);
            // Lipschitz law.
            let h = rng.random_sl(3);
            let mu_h = cartan_projection(&h, &t).unwrap();
            let mu_gh = cartan_projection(&(&g * &h), &t).unwrap();
            assert!((&mu_gh - &mu).norm() <= mu_h.norm() + 1e-9);
        }
    }

    #[test]
    fn kak_reconstruction() {
        let t = tol();
        let (k1, x, k2) = kak_decompose(&DMatrix::identity(3, 3), &t).unwrap();
        assert!(x.norm() < 1e-12);
        assert!((k1 * k2 - DMatrix::identity(3, 3)).norm() < 1e-12);

        let mut rng = Sampler::new(29);
        for _ in 0..200 {
            let g = rng.random_sl(4);
            let (k1, x, k2) = kak_decompose(&g, &t).unwrap();
            let recon = &k1 * crate::numerics::sym_exp(&x, &t).unwrap() * &k2;
            assert!((recon - &g).norm() <= 1e-9 * g.norm());
            assert!(crate::numerics::orthogonality_defect(&k1) < 1e-10);
            assert!(crate::numerics::orthogonality_defect(&k2) < 1e-10);
            // X is the diagonal of the projection.
            let mu = cartan_projection(&g, &t).unwrap();
            for i in 0..4 {
                assert!((x[(i, i)] - mu[i]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn weyl_orbit_sizes() {
        assert_eq!(weyl_orbit(&DVector::zeros(3)).len(), 1);
        assert_eq!(weyl_orbit(&DVector::from_vec(vec![1.0, -1.0, 0.0])).len(), 6);
        assert_eq!(weyl_orbit(&DVector::from_vec(vec![1.0, 1.0, -2.0])).len(), 3);
    }

    #[test]
    fn a_of_one_parameter_is_weyl_orbit_of_line() {
        let t = tol();
        let ambient = AmbientGroup::new(GroupKind::Sl, 3).unwrap();
        let spec = SubgroupSpec::OneParameter {
            x: DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1.0, -2.0])),
        };
        let set = a_of_subgroup(&ambient, &spec, 0, &t).unwrap();
        let SetVariant::Subspaces(bases) = &set.variant else { panic!() };
        assert_eq!(bases.len(), 3);
        assert!(set.w_saturated);
        // Contains mu(exp(tX)) = t-scaled sorted diagonal for sampled t.
        for &s in &[0.1, 0.5, 2.0] {
            let g = sym_exp(&(DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1.0, -2.0])) * s), &t)
                .unwrap();
            let mu = cartan_projection(&g, &t).unwrap();
            let d = crate::flats::dist_to_set(&mu, &set, &t).unwrap();
            assert!(d < 1e-9);
        }
    }

    #[test]
    fn a_of_element_list_identity() {
        let t = tol();
        let ambient = AmbientGroup::new(GroupKind::Sl, 2).unwrap();
        let spec = SubgroupSpec::ElementList {
            elements: vec![DMatrix::identity(2, 2)],
        };
        let set = a_of_subgroup(&ambient, &spec, 0, &t).unwrap();
        let SetVariant::Cloud(pts) = &set.variant else { panic!() };
        assert_eq!(pts.len(), 1);
        assert!(pts[0].norm() < 1e-12);
    }

    #[test]
    fn a_of_discrete_diagonal_powers() {
        let t = tol();
        let ambient = AmbientGroup::new(GroupKind::Sl, 2).unwrap();
        let e = std::f64::consts::E;
        let spec = SubgroupSpec::Discrete {
            generators: vec![DMatrix::from_diagonal(&DVector::from_vec(vec![e, 1.0 / e]))],
        };
        let set = a_of_subgroup(&ambient, &spec, 3, &t).unwrap();
        let SetVariant::Cloud(pts) = &set.variant else { panic!() };
        // {(k, -k) | |k| <= 3}: 7 points.
        assert_eq!(pts.len(), 7);
        for k in -3i32..=3 {
            let p = DVector::from_vec(vec![k as f64, -k as f64]);
            assert!(pts.iter().any(|q| (q - &p).amax() < 1e-9));
        }
    }

    #[test]
    fn rank_cases() {
        let t = tol();
        let ambient = AmbientGroup::new(GroupKind::Sl, 3).unwrap();
        let x1 = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, -1.0, 0.0]));
        let x2 = DMatrix::from_diagonal(&DVector::from_vec(vec![0.0, 1.0, -1.0]));
        let spec = SubgroupSpec::ReductiveCartan {
            generators: vec![x1.clone(), x2],
        };
        assert_eq!(real_rank(&ambient, &spec, &t).unwrap(), 2);

        let spec = SubgroupSpec::ReductiveCartan {
            generators: vec![x1.clone(), &x1 * 2.0],
        };
        assert_eq!(real_rank(&ambient, &spec, &t).unwrap(), 1);

        let spec = SubgroupSpec::OneParameter { x: x1 };
        assert_eq!(real_rank(&ambient, &spec, &t).unwrap(), 1);

        let spec = SubgroupSpec::Discrete {
            generators: vec![DMatrix::identity(3, 3)],
        };
        assert!(matches!(
            real_rank(&ambient, &spec, &t),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn ball_net_projection_bound_and_cover() {
        let t = tol();
        let ambient = AmbientGroup::new(GroupKind::Sl, 2).unwrap();
        let net = group_ball_net(&ambient, 1.0, 0.2, &t).unwrap();
        assert!(!net.elements.is_empty());
        for g in &net.elements {
            let mu = cartan_projection(g, &t).unwrap();
            assert!(mu.norm() <= 0.5 + 1e-9);
        }
        // Identity present.
        assert!(net
            .elements
            .iter()
            .any(|g| (g - DMatrix::identity(2, 2)).norm() < 1e-9));

        // Covering in chamber distance: random g with small projection has
        // a net element nearby in mu-coordinates.
        let mut rng = Sampler::new(37);
        let mut found_all = true;
        for _ in 0..50 {
            let k1 = rng.random_rotation(2);
            let k2 = rng.random_rotation(2);
            let a = rng.uniform_in(0.0, 0.5 / 2.0_f64.sqrt());
            let g = &k1
                * DMatrix::from_diagonal(&DVector::from_vec(vec![a.exp(), (-a).exp()]))
                * &k2;
            let mu = cartan_projection(&g, &t).unwrap();
            let ok = net.elements.iter().any(|e| {
                let mu_e = cartan_projection(e, &t).unwrap();
                (&mu - mu_e).norm() <= net.mesh + 1e-9
            });
            found_all &= ok;
        }
        assert!(found_all);
    }

    #[test]
    fn ball_net_rho_zero() {
        let t = tol();
        let ambient = AmbientGroup::new(GroupKind::Sl, 2).unwrap();
        let net = group_ball_net(&ambient, 0.0, 0.5, &t).unwrap();
        for g in &net.elements {
            assert!(cartan_projection(g, &t).unwrap().norm() < 1e-9);
        }
    }

    #[test]
    fn one_parameter_rejects_nonsymmetric() {
        let t = tol();
        let ambient = AmbientGroup::new(GroupKind::Sl, 2).unwrap();
        let spec = SubgroupSpec::OneParameter {
            x: DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]),
        };
        assert!(matches!(
            a_of_subgroup(&ambient, &spec, 0, &t),
            Err(Error::Domain(_))
        ));
    }
}
