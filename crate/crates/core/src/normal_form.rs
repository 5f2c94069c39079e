//! Local rotations, two-qubit normal forms and local-diagonalizability tests.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, Matrix2, Matrix3, SymmetricEigen, Vector3};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{embed, kron, null_space, op_norm, rotation_between, sigma, C64, CMat};
use crate::pauli::{correlation_matrix, digit, matrix_rank3, with_digit, PauliTable, RANK_TOL};

const SO3_TOL: f64 = 1e-9;

/// A single-qubit rotation in both pictures: U ∈ SU(2) and R ∈ SO(3) with
/// U σⁱ U† = Σⱼ R_ji σʲ.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalRotation {
    pub u: Matrix2<C64>,
    pub r: Matrix3<f64>,
}

impl Serialize for LocalRotation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<[f64; 3]> = (0..3).map(|i| [self.r[(i, 0)], self.r[(i, 1)], self.r[(i, 2)]]).collect();
        let u: Vec<[[f64; 2]; 2]> =
            (0..2).map(|i| [[self.u[(i, 0)].re, self.u[(i, 0)].im], [self.u[(i, 1)].re, self.u[(i, 1)].im]]).collect();
        let mut map = BTreeMap::new();
        map.insert("r", serde_json::json!(rows));
        map.insert("u", serde_json::json!(u));
        map.serialize(s)
    }
}

impl LocalRotation {
    pub fn identity() -> Self {
        LocalRotation { u: Matrix2::identity(), r: Matrix3::identity() }
    }

    /// The rotation sending unit vector `axis` to e₃, so U (axis·σ) U† = Z.
    pub fn axis_to_z(axis: &Vector3<f64>) -> Self {
        su2_from_so3(&rotation_between(axis, &Vector3::z())).expect("rotation_between is special orthogonal")
    }

    pub fn inverse(&self) -> Self {
        LocalRotation { u: self.u.adjoint(), r: self.r.transpose() }
    }

    /// `self` applied after `first`.
    pub fn after(&self, first: &LocalRotation) -> Self {
        su2_from_so3(&(self.r * first.r)).expect("product of rotations")
    }

    pub fn apply(&self, t: &PauliTable) -> PauliTable {
        conjugate_local(t, self)
    }

    pub fn u_dyn(&self) -> CMat {
        CMat::from_fn(2, 2, |r, c| self.u[(r, c)])
    }

    /// Largest entrywise violation of U σⁱ U† = Σⱼ R_ji σʲ.
    pub fn consistency_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 1..=3u8 {
            let lhs = self.u * sigma(i) * self.u.adjoint();
            let mut rhs = Matrix2::zeros();
            for j in 1..=3u8 {
                rhs += sigma(j) * C64::new(self.r[(j as usize - 1, i as usize - 1)], 0.0);
            }
            worst = worst.max((lhs - rhs).iter().fold(0.0f64, |a, z| a.max(z.norm())));
        }
        worst
    }
}

fn so3_deviation(r: &Matrix3<f64>) -> f64 {
    let orth = (r.transpose() * r - Matrix3::identity()).abs().max();
    orth.max((r.determinant() - 1.0).abs())
}

/// Lift R ∈ SO(3) to U ∈ SU(2), fixing the sign so that Re U₀₀ ≥ 0.
pub fn su2_from_so3(r: &Matrix3<f64>) -> Result<LocalRotation> {
    let dev = so3_deviation(r);
    if dev > SO3_TOL {
        return Err(Error::NotSpecialOrthogonal(dev));
    }
    // Quaternion (w, x, y, z) of R; U = w I − i(xX + yY + zZ).
    let tr = r.trace();
    let (mut w, mut x, mut y, mut z);
    if tr > 0.0 {
        let s = (tr + 1.0).sqrt() * 2.0;
        w = 0.25 * s;
        x = (r[(2, 1)] - r[(1, 2)]) / s;
        y = (r[(0, 2)] - r[(2, 0)]) / s;
        z = (r[(1, 0)] - r[(0, 1)]) / s;
    } else if r[(0, 0)] > r[(1, 1)] && r[(0, 0)] > r[(2, 2)] {
        let s = (1.0 + r[(0, 0)] - r[(1, 1)] - r[(2, 2)]).sqrt() * 2.0;
        w = (r[(2, 1)] - r[(1, 2)]) / s;
        x = 0.25 * s;
        y = (r[(0, 1)] + r[(1, 0)]) / s;
        z = (r[(0, 2)] + r[(2, 0)]) / s;
    } else if r[(1, 1)] > r[(2, 2)] {
        let s = (1.0 + r[(1, 1)] - r[(0, 0)] - r[(2, 2)]).sqrt() * 2.0;
        w = (r[(0, 2)] - r[(2, 0)]) / s;
        x = (r[(0, 1)] + r[(1, 0)]) / s;
        y = 0.25 * s;
        z = (r[(1, 2)] + r[(2, 1)]) / s;
    } else {
        let s = (1.0 + r[(2, 2)] - r[(0, 0)] - r[(1, 1)]).sqrt() * 2.0;
        w = (r[(1, 0)] - r[(0, 1)]) / s;
        x = (r[(0, 2)] + r[(2, 0)]) / s;
        y = (r[(1, 2)] + r[(2, 1)]) / s;
        z = 0.25 * s;
    }
    let n = (w * w + x * x + y * y + z * z).sqrt();
    (w, x, y, z) = (w / n, x / n, y / n, z / n);
    let flip = if w.abs() > 1e-14 {
        w < 0.0
    } else {
        // Half-turn: Re U₀₀ = 0 for both signs; make the first axis component positive.
        [x, y, z].iter().find(|c| c.abs() > 1e-12).is_some_and(|c| *c < 0.0)
    };
    if flip {
        (w, x, y, z) = (-w, -x, -y, -z);
    }
    let c = |re: f64, im: f64| C64::new(re, im);
    let u = Matrix2::new(c(w, -z), c(-y, -x), c(y, -x), c(w, z));
    Ok(LocalRotation { u, r: *r })
}

/// R from U via R_ji = Tr(σʲ U σⁱ U†)/2.
pub fn so3_from_su2(u: &Matrix2<C64>) -> Matrix3<f64> {
    Matrix3::from_fn(|j, i| {
        let m = sigma(j as u8 + 1) * u * sigma(i as u8 + 1) * u.adjoint();
        0.5 * (m[(0, 0)] + m[(1, 1)]).re
    })
}

/// U^{⊗k} H U^{†⊗k} computed on Pauli coefficients.
pub fn conjugate_local(t: &PauliTable, rot: &LocalRotation) -> PauliTable {
    let k = t.k();
    let mut out = PauliTable::zero(k);
    for (code, v) in t.iter() {
        let mut partial: Vec<(u32, f64)> = vec![(code, v)];
        for q in 0..k {
            let d = digit(code, k, q);
            if d == 0 {
                continue;
            }
            let mut next = Vec::with_capacity(partial.len() * 3);
            for (c, val) in &partial {
                for j in 1..=3u8 {
                    let f = rot.r[(j as usize - 1, d as usize - 1)];
                    if f != 0.0 {
                        next.push((with_digit(*c, k, q, j), val * f));
                    }
                }
            }
            partial = next;
        }
        for (c, val) in partial {
            out.add_code(c, val);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SymmetricNormalForm {
    pub rotation: LocalRotation,
    pub alpha: [f64; 3],
    pub beta: [f64; 3],
}

impl SymmetricNormalForm {
    pub fn table(&self) -> PauliTable {
        let mut t = PauliTable::zero(2);
        for i in 0..3u32 {
            t.add_code((i + 1) * 5, self.alpha[i as usize]);
            t.add_code((i + 1) * 4, self.beta[i as usize]);
            t.add_code(i + 1, self.beta[i as usize]);
        }
        t
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AntisymmetricNormalForm {
    pub rotation: LocalRotation,
    pub alpha: f64,
    pub pair: (usize, usize),
    pub beta: [f64; 3],
}

impl AntisymmetricNormalForm {
    pub fn table(&self) -> PauliTable {
        let (i, j) = (self.pair.0 as u32, self.pair.1 as u32);
        let mut t = PauliTable::zero(2);
        t.add_code(i * 4 + j, self.alpha);
        t.add_code(j * 4 + i, -self.alpha);
        for k in 0..3u32 {
            t.add_code((k + 1) * 4, self.beta[k as usize]);
            t.add_code(k + 1, -self.beta[k as usize]);
        }
        t
    }
}

fn parity_tol(t: &PauliTable) -> f64 {
    RANK_TOL * t.max_abs().max(1.0)
}

/// Diagonalize M(H) for swap-symmetric H. The identity coefficient is ignored.
pub fn normal_form_symmetric(t: &PauliTable) -> Result<SymmetricNormalForm> {
    let d = correlation_matrix(t)?;
    let tol = parity_tol(t);
    if (d.m - d.m.transpose()).abs().max() > tol || (d.v - d.w).abs().max() > tol {
        return Err(Error::NotSymmetric);
    }
    let sym = (d.m + d.m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b].abs().total_cmp(&eig.eigenvalues[a].abs()).then(eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]))
    });
    let mut r = Matrix3::zeros();
    for (row, &idx) in order.iter().enumerate() {
        let mut e: Vector3<f64> = eig.eigenvectors.column(idx).into_owned();
        if let Some(first) = e.iter().find(|c| c.abs() > 1e-12) {
            if *first < 0.0 {
                e = -e;
            }
        }
        r.set_row(row, &e.transpose());
    }
    if r.determinant() < 0.0 {
        // Flip the axis with the smallest |α|; its sign convention is the least informative.
        let last = -r.row(2).into_owned();
        r.set_row(2, &last);
    }
    let rotation = su2_from_so3(&r)?;
    let alpha = [0, 1, 2].map(|i| eig.eigenvalues[order[i]]);
    let bv = r * (d.v + d.w) * 0.5;
    Ok(SymmetricNormalForm { rotation, alpha, beta: [bv.x, bv.y, bv.z] })
}

/// Rotate the skew part of M(H) onto α(XZ − ZX) with α ≥ 0.
pub fn normal_form_antisymmetric(t: &PauliTable) -> Result<AntisymmetricNormalForm> {
    let d = correlation_matrix(t)?;
    let tol = parity_tol(t);
    if (d.m + d.m.transpose()).abs().max() > tol || (d.v + d.w).abs().max() > tol {
        return Err(Error::NotAntisymmetric);
    }
    // M_ij = ε_ijk c_k; the skew form XZ − ZX has axial vector −e₂.
    let axial = Vector3::new(d.m[(1, 2)], -d.m[(0, 2)], d.m[(0, 1)]);
    let alpha = axial.norm();
    let r = if alpha > tol { rotation_between(&axial, &-Vector3::y()) } else { Matrix3::identity() };
    let rotation = su2_from_so3(&r)?;
    let bv = r * (d.v - d.w) * 0.5;
    Ok(AntisymmetricNormalForm { rotation, alpha, pair: (1, 3), beta: [bv.x, bv.y, bv.z] })
}

/// Commutant constraints: rows of the linear map a ↦ {[a·σ on site j, H]} over the
/// Pauli components of a.
fn commutant_rows(tables: &[PauliTable]) -> DMatrix<f64> {
    let mut rows: BTreeMap<(usize, usize, u32), [f64; 3]> = BTreeMap::new();
    for (ti, t) in tables.iter().enumerate() {
        let t = t.pruned(RANK_TOL * t.max_abs());
        let k = t.k();
        for (code, h) in t.iter() {
            for j in 0..k {
                let p = digit(code, k, j);
                if p == 0 {
                    continue;
                }
                for m in 1..=3u8 {
                    if m == p {
                        continue;
                    }
                    let l = 6 - m - p;
                    let eps = levi_civita(m, p, l);
                    let target = with_digit(code, k, j, l);
                    rows.entry((ti, j, target)).or_insert([0.0; 3])[m as usize - 1] += eps * h;
                }
            }
        }
    }
    let mut m = DMatrix::zeros(rows.len(), 3);
    for (r, vals) in rows.values().enumerate() {
        for c in 0..3 {
            m[(r, c)] = vals[c];
        }
    }
    m
}

fn levi_civita(a: u8, b: u8, c: u8) -> f64 {
    match (a, b, c) {
        (1, 2, 3) | (2, 3, 1) | (3, 1, 2) => 1.0,
        (3, 2, 1) | (1, 3, 2) | (2, 1, 3) => -1.0,
        _ => 0.0,
    }
}

/// Largest coefficient on strings containing X or Y.
pub fn off_diagonal_weight(t: &PauliTable) -> f64 {
    let k = t.k();
    t.iter()
        .filter(|(c, _)| (0..k).any(|q| matches!(digit(*c, k, q), 1 | 2)))
        .fold(0.0f64, |a, (_, v)| a.max(v.abs()))
}

pub fn is_diagonal(t: &PauliTable) -> bool {
    off_diagonal_weight(t) <= RANK_TOL * t.max_abs().max(1e-300)
}

/// A single rotation diagonalizing every table, found from the intersection of
/// the per-site commutants. The result is always re-verified.
pub fn common_diagonalizer(s: &[PauliTable]) -> Option<LocalRotation> {
    let rows = commutant_rows(s);
    let null = null_space(&rows, RANK_TOL);
    if null.is_empty() {
        return None;
    }
    // A traceless a·σ with a ≠ 0 is never degenerate, so every null vector is a
    // valid candidate. Prefer the one closest to the current z-axis.
    let mut candidates: Vec<Vector3<f64>> = Vec::new();
    for axis in [Vector3::z(), Vector3::x(), Vector3::y()] {
        let proj: Vector3<f64> = null
            .iter()
            .map(|b| {
                let b = Vector3::new(b[0], b[1], b[2]);
                b * b.dot(&axis)
            })
            .sum();
        if proj.norm() > 1e-6 {
            candidates.push(proj.normalize());
        }
    }
    candidates.extend(null.iter().map(|b| Vector3::new(b[0], b[1], b[2]).normalize()));
    for a in candidates {
        let rot = LocalRotation::axis_to_z(&a);
        if s.iter().all(|t| is_diagonal(&rot.apply(t))) {
            return Some(rot);
        }
    }
    None
}

pub fn test_local_diagonalizable(t: &PauliTable) -> Option<LocalRotation> {
    common_diagonalizer(std::slice::from_ref(t))
}

/// Common product axis for rank-≤1 two-qubit tables: each M(Hᵢ) = αᵢ uuᵀ.
pub fn tim_axis_test(s: &[PauliTable]) -> Result<Option<LocalRotation>> {
    let mut ms = Vec::new();
    for (index, t) in s.iter().enumerate() {
        let d = correlation_matrix(t)?;
        let rank = matrix_rank3(&d.m);
        if rank >= 2 {
            return Err(Error::RankTooHigh { index, rank });
        }
        if rank == 1 {
            ms.push(d.m);
        }
    }
    let Some(first) = ms.first() else {
        return Ok(Some(LocalRotation::identity()));
    };
    let svd = first.svd(true, false);
    let idx = svd.singular_values.imax();
    let u: Vector3<f64> = svd.u.expect("requested U").column(idx).into_owned();
    let uut = u * u.transpose();
    for m in &ms {
        let a = (u.transpose() * m * u)[(0, 0)];
        let scale = m.abs().max();
        if (m - uut * a).abs().max() > RANK_TOL * scale.max(1e-300) * 10.0 {
            return Ok(None);
        }
    }
    Ok(Some(LocalRotation::axis_to_z(&u)))
}

/// [H⊗I, I⊗H] = [H⊗I, I⊗FHF] = [FHF⊗I, I⊗H] = 0 on three qubits.
pub fn commutator_characterization(t: &PauliTable) -> Result<bool> {
    correlation_matrix(t)?;
    let h = t.to_dense();
    let f = t.permuted(&[1, 0]).to_dense();
    let scale = op_norm(&h).powi(2).max(1e-300);
    let comm = |a: &CMat, b: &CMat| {
        let l = embed(a, &[0, 1], 3);
        let r = embed(b, &[1, 2], 3);
        op_norm(&(&l * &r - &r * &l))
    };
    let worst = comm(&h, &h).max(comm(&h, &f)).max(comm(&f, &h));
    Ok(worst <= 1e-9 * scale)
}

/// H = αA⊗A + βA⊗I + γI⊗A + δI⊗I for one traceless A.
pub fn product_form_characterization(t: &PauliTable) -> Result<bool> {
    let d = correlation_matrix(t)?;
    let tol = RANK_TOL * t.max_abs().max(1e-300) * 10.0;
    let axis: Option<Vector3<f64>> = if d.m.abs().max() > tol {
        let svd = d.m.svd(true, false);
        let idx = svd.singular_values.imax();
        let u: Vector3<f64> = svd.u.expect("requested U").column(idx).into_owned();
        let a = (u.transpose() * d.m * u)[(0, 0)];
        if (d.m - u * u.transpose() * a).abs().max() > tol {
            return Ok(false);
        }
        Some(u)
    } else if d.v.norm() > tol {
        Some(d.v.normalize())
    } else if d.w.norm() > tol {
        Some(d.w.normalize())
    } else {
        None
    };
    Ok(match axis {
        None => true,
        Some(u) => {
            let perp = |x: &Vector3<f64>| (x - u * u.dot(x)).abs().max();
            perp(&d.v) <= tol && perp(&d.w) <= tol
        }
    })
}

/// Local unitary on every factor of a dense operator, for cross-checks.
pub fn conjugate_dense(h: &CMat, rot: &LocalRotation, k: usize) -> CMat {
    let u1 = rot.u_dyn();
    let u = (1..k).fold(u1.clone(), |acc, _| kron(&acc, &u1));
    &u * h * u.adjoint()
}

/// U with U X U† = Z and friends, handy in tests: the half-turn exchanging x and z.
pub fn exchange_xz() -> LocalRotation {
    su2_from_so3(&Matrix3::new(0.0, 0.0, 1.0, 0.0, -1.0, 0.0, 1.0, 0.0, 0.0)).expect("half-turn")
}
