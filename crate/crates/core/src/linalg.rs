//! Dense complex linear algebra helpers shared by the other modules.
//!
//! Qubit 0 is the most significant bit of a basis index, so a state index
//! reads left to right in the same order as a tensor product.

use nalgebra::{DMatrix, DVector, Matrix2, Matrix3, SymmetricEigen, Vector3};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// σ⁰..σ³ as 2×2 matrices.
pub fn sigma(i: u8) -> Matrix2<C64> {
    match i {
        0 => Matrix2::new(ONE, ZERO, ZERO, ONE),
        1 => Matrix2::new(ZERO, ONE, ONE, ZERO),
        2 => Matrix2::new(ZERO, -I, I, ZERO),
        3 => Matrix2::new(ONE, ZERO, ZERO, -ONE),
        _ => panic!("Pauli index {i} out of range"),
    }
}

pub fn sigma_dyn(i: u8) -> CMat {
    let s = sigma(i);
    CMat::from_fn(2, 2, |r, c| s[(r, c)])
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn kron_all(factors: &[CMat]) -> CMat {
    factors.iter().fold(CMat::identity(1, 1), |acc, f| kron(&acc, f))
}

pub fn dagger(m: &CMat) -> CMat {
    m.adjoint()
}

/// Largest entrywise |m − m†|.
pub fn hermitian_deviation(m: &CMat) -> f64 {
    let mut worst = 0.0f64;
    for r in 0..m.nrows() {
        for c in r..m.ncols() {
            worst = worst.max((m[(r, c)] - m[(c, r)].conj()).norm());
        }
    }
    worst
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0f64, |a, z| a.max(z.norm()))
}

fn is_real(m: &CMat) -> bool {
    m.iter().all(|z| z.im == 0.0)
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
///
/// Real symmetric input takes the (much faster) real path.
pub fn eigh(m: &CMat) -> (Vec<f64>, CMat) {
    let n = m.nrows();
    let (vals, vecs): (Vec<f64>, CMat) = if is_real(m) {
        let real = DMatrix::<f64>::from_fn(n, n, |r, c| 0.5 * (m[(r, c)].re + m[(c, r)].re));
        let eig = SymmetricEigen::new(real);
        (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors.map(re))
    } else {
        let herm = (m + m.adjoint()) * re(0.5);
        let eig = SymmetricEigen::new(herm);
        (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
    let sorted_vals = order.iter().map(|&i| vals[i]).collect();
    let sorted_vecs = CMat::from_fn(n, n, |r, c| vecs[(r, order[c])]);
    (sorted_vals, sorted_vecs)
}

pub fn eigvalsh(m: &CMat) -> Vec<f64> {
    let n = m.nrows();
    let mut vals: Vec<f64> = if is_real(m) {
        let real = DMatrix::<f64>::from_fn(n, n, |r, c| 0.5 * (m[(r, c)].re + m[(c, r)].re));
        real.symmetric_eigenvalues().iter().copied().collect()
    } else {
        let herm = (m + m.adjoint()) * re(0.5);
        herm.symmetric_eigenvalues().iter().copied().collect()
    };
    vals.sort_by(f64::total_cmp);
    vals
}

/// Operator norm (largest singular value).
pub fn op_norm(m: &CMat) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    if m.is_square() && hermitian_deviation(m) <= 1e-13 * max_abs(m).max(1e-300) {
        return eigvalsh(m).iter().fold(0.0f64, |a, v| a.max(v.abs()));
    }
    m.clone().svd(false, false).singular_values.iter().fold(0.0f64, |a, v| a.max(*v))
}

/// Embed a k-qubit operator acting on `qubits` (in that order) into n qubits.
pub fn embed(op: &CMat, qubits: &[usize], n: usize) -> CMat {
    let dim = 1usize << n;
    let k = qubits.len();
    assert_eq!(op.nrows(), 1 << k);
    let masks: Vec<usize> = qubits.iter().map(|&q| 1usize << (n - 1 - q)).collect();
    let full_mask: usize = masks.iter().sum();
    let mut out = CMat::zeros(dim, dim);
    for i in 0..dim {
        let r = local_index(i, &masks);
        let base = i & !full_mask;
        for c in 0..(1 << k) {
            let v = op[(r, c)];
            if v != ZERO {
                out[(i, base | spread(c, &masks))] += v;
            }
        }
    }
    out
}

/// Bits of `i` at `masks`, packed with masks[0] most significant.
#[inline]
pub fn local_index(i: usize, masks: &[usize]) -> usize {
    let k = masks.len();
    let mut r = 0;
    for (p, m) in masks.iter().enumerate() {
        if i & m != 0 {
            r |= 1 << (k - 1 - p);
        }
    }
    r
}

/// Inverse of [`local_index`]: place the k bits of `c` at `masks`.
#[inline]
pub fn spread(c: usize, masks: &[usize]) -> usize {
    let k = masks.len();
    let mut out = 0;
    for (p, m) in masks.iter().enumerate() {
        if c & (1 << (k - 1 - p)) != 0 {
            out |= m;
        }
    }
    out
}

/// Orthonormal basis of the null space of `m` (singular values below `tol`·max).
pub fn null_space(m: &DMatrix<f64>, tol: f64) -> Vec<DVector<f64>> {
    let cols = m.ncols();
    if m.nrows() == 0 {
        return (0..cols).map(|i| DVector::from_fn(cols, |r, _| if r == i { 1.0 } else { 0.0 })).collect();
    }
    // Gram-free route: pad to square so the SVD returns a full V.
    let rows = m.nrows().max(cols);
    let mut padded = DMatrix::<f64>::zeros(rows, cols);
    padded.view_mut((0, 0), (m.nrows(), cols)).copy_from(m);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested V");
    let smax = svd.singular_values.iter().fold(0.0f64, |a, v| a.max(*v));
    let mut out = Vec::new();
    for (i, s) in svd.singular_values.iter().enumerate() {
        if *s <= tol * smax.max(f64::MIN_POSITIVE) || smax == 0.0 {
            out.push(v_t.row(i).transpose());
        }
    }
    out
}

pub fn mat3_max_abs(m: &Matrix3<f64>) -> f64 {
    m.iter().fold(0.0f64, |a, v| a.max(v.abs()))
}

/// Rotation taking unit vector `u` to `target` by the shortest arc.
pub fn rotation_between(u: &Vector3<f64>, target: &Vector3<f64>) -> Matrix3<f64> {
    let u = u.normalize();
    let t = target.normalize();
    let cross = u.cross(&t);
    let s = cross.norm();
    let c = u.dot(&t);
    if s < 1e-14 {
        if c > 0.0 {
            return Matrix3::identity();
        }
        // Antiparallel: rotate by π about an axis orthogonal to u.
        let helper = if u.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() };
        let axis = u.cross(&helper).normalize();
        return axis_angle(&axis, std::f64::consts::PI);
    }
    axis_angle(&(cross / s), s.atan2(c))
}

/// Rodrigues rotation by angle θ about a unit axis.
pub fn axis_angle(axis: &Vector3<f64>, theta: f64) -> Matrix3<f64> {
    let k = Matrix3::new(0.0, -axis.z, axis.y, axis.z, 0.0, -axis.x, -axis.y, axis.x, 0.0);
    Matrix3::identity() + k * theta.sin() + k * k * (1.0 - theta.cos())
}

pub fn random_hermitian<R: Rng>(dim: usize, rng: &mut R) -> CMat {
    let a = CMat::from_fn(dim, dim, |_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    (&a + a.adjoint()) * re(0.5)
}

pub fn random_real_symmetric<R: Rng>(dim: usize, rng: &mut R) -> CMat {
    let a = DMatrix::<f64>::from_fn(dim, dim, |_, _| rng.sample(StandardNormal));
    ((&a + a.transpose()) * 0.5).map(re)
}

/// Haar-random element of SO(3), built from a uniformly random unit quaternion.
pub fn random_so3<R: Rng>(rng: &mut R) -> Matrix3<f64> {
    let q: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
    let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
    let (w, x, y, z) = (q[0] / n, q[1] / n, q[2] / n, q[3] / n);
    Matrix3::new(
        1.0 - 2.0 * (y * y + z * z),
        2.0 * (x * y - w * z),
        2.0 * (x * z + w * y),
        2.0 * (x * y + w * z),
        1.0 - 2.0 * (x * x + z * z),
        2.0 * (y * z - w * x),
        2.0 * (x * z - w * y),
        2.0 * (y * z + w * x),
        1.0 - 2.0 * (x * x + y * y),
    )
}

pub fn random_unit_vector<R: Rng>(rng: &mut R) -> Vector3<f64> {
    loop {
        let v = Vector3::new(rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal));
        if v.norm() > 1e-6 {
            return v.normalize();
        }
    }
}

pub fn basis_state(n: usize, index: usize) -> CVec {
    let mut v = CVec::zeros(1 << n);
    v[index] = ONE;
    v
}

/// Projector |ψ⟩⟨ψ|.
pub fn projector(psi: &CVec) -> CMat {
    psi * psi.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn embed_matches_kron_for_leading_qubits() {
        let z = sigma_dyn(3);
        let x = sigma_dyn(1);
        let op = kron(&z, &x);
        let full = embed(&op, &[0, 1], 3);
        let direct = kron_all(&[z.clone(), x.clone(), CMat::identity(2, 2)]);
        assert!((full - direct).norm() < 1e-15);
        // Reversed qubit order swaps the factors.
        let rev = embed(&op, &[1, 0], 2);
        assert!((rev - kron(&x, &z)).norm() < 1e-15);
    }

    #[test]
    fn eigh_is_sorted_and_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = random_hermitian(6, &mut rng);
        let (vals, vecs) = eigh(&h);
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        let d = CMat::from_diagonal(&DVector::from_iterator(6, vals.iter().map(|v| re(*v))));
        let back = &vecs * d * vecs.adjoint();
        assert!((back - h).norm() < 1e-10);
    }

    #[test]
    fn rotation_between_maps_vectors() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let u = random_unit_vector(&mut rng);
            let t = random_unit_vector(&mut rng);
            let r = rotation_between(&u, &t);
            assert!((r * u - t).norm() < 1e-12);
            assert!((r.determinant() - 1.0).abs() < 1e-12);
        }
        let r = rotation_between(&Vector3::z(), &(-Vector3::z()));
        assert!((r * Vector3::z() + Vector3::z()).norm() < 1e-12);
    }

    #[test]
    fn null_space_of_rank_one_rows() {
        let m = DMatrix::from_row_slice(2, 3, &[1.0, 0.0, 0.0, 2.0, 0.0, 0.0]);
        let ns = null_space(&m, 1e-9);
        assert_eq!(ns.len(), 2);
        for v in ns {
            assert!(v[0].abs() < 1e-12);
        }
    }

    #[test]
    fn op_norm_of_pauli_sum() {
        let h = sigma_dyn(1) + sigma_dyn(3);
        assert!((op_norm(&h) - 2f64.sqrt()).abs() < 1e-12);
        let nonherm = CMat::from_row_slice(2, 2, &[ZERO, re(3.0), ZERO, ZERO]);
        assert!((op_norm(&nonherm) - 3.0).abs() < 1e-12);
    }
}
