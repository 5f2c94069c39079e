//! Eigensolvers, low-energy restriction H_{<λ} and comparison against predicted
//! effective Hamiltonians.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::{AssembledOperator, HamiltonianInstance};
use crate::linalg::{eigh, op_norm, CMat, CVec, C64, ONE};

/// Residual tolerance relative to ‖H‖.
pub const EIG_TOL: f64 = 1e-9;
/// Minimum gap around a cutoff, relative to ‖H‖.
pub const GAP_MIN: f64 = 1e-6;
/// Largest dimension handled by full dense diagonalization.
pub const DENSE_EIG_MAX: usize = 1 << 10;

const BASIS_MAX: usize = 64;
const MATVEC_BUDGET: usize = 200_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Solver {
    Dense,
    Lanczos,
}

#[derive(Clone, Debug)]
pub struct EigenSystem {
    pub values: Vec<f64>,
    /// Columns are eigenvectors, in the order of `values`.
    pub vectors: CMat,
    pub residual_norms: Vec<f64>,
    /// ‖H‖ for dense solves; a lower bound from Ritz values otherwise.
    pub norm_estimate: f64,
    pub solver: Solver,
}

impl EigenSystem {
    pub fn vector(&self, i: usize) -> CVec {
        self.vectors.column(i).into_owned()
    }
}

fn residuals(op: &AssembledOperator, values: &[f64], vectors: &CMat) -> Vec<f64> {
    values
        .iter()
        .enumerate()
        .map(|(i, &l)| {
            let v = vectors.column(i).into_owned();
            (op.apply(&v) - v * C64::new(l, 0.0)).norm()
        })
        .collect()
}

/// The `k` lowest eigenpairs (seed 0 for the iterative start vectors).
pub fn eigensystem(op: &AssembledOperator, k: usize) -> Result<EigenSystem> {
    eigensystem_seeded(op, k, 0)
}

pub fn eigensystem_seeded(op: &AssembledOperator, k: usize, seed: u64) -> Result<EigenSystem> {
    let dim = op.dim();
    if k > dim {
        return Err(Error::DimensionMismatch { expected: dim, got: k });
    }
    if dim <= DENSE_EIG_MAX {
        let (vals, vecs) = eigh(op.dense());
        let norm = vals.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let values = vals[..k].to_vec();
        let vectors = vecs.columns(0, k).into_owned();
        let residual_norms = residuals(op, &values, &vectors);
        return Ok(EigenSystem { values, vectors, residual_norms, norm_estimate: norm, solver: Solver::Dense });
    }
    Lanczos::new(op, seed).run(k)
}

struct Lanczos<'a> {
    op: &'a AssembledOperator,
    rng: ChaCha8Rng,
    locked: Vec<CVec>,
    norm: f64,
    matvecs: usize,
}

impl<'a> Lanczos<'a> {
    fn new(op: &'a AssembledOperator, seed: u64) -> Self {
        Lanczos { op, rng: ChaCha8Rng::seed_from_u64(seed), locked: Vec::new(), norm: 0.0, matvecs: 0 }
    }

    fn random_vector(&mut self) -> CVec {
        let dim = self.op.dim();
        CVec::from_fn(dim, |_, _| C64::new(self.rng.random::<f64>() - 0.5, self.rng.random::<f64>() - 0.5))
    }

    /// Orthogonalize against locked vectors and `basis` (two passes); returns the remaining norm.
    fn orthogonalize(&self, q: &mut CVec, basis: &[CVec]) -> f64 {
        for _ in 0..2 {
            for b in self.locked.iter().chain(basis) {
                let c = b.dotc(q);
                q.axpy(-c, b, ONE);
            }
        }
        q.norm()
    }

    fn apply(&mut self, v: &CVec) -> CVec {
        self.matvecs += 1;
        self.op.apply(v)
    }

    /// Lowest eigenpair of H on the orthogonal complement of the locked vectors,
    /// by thick-restart Lanczos with full reorthogonalization.
    fn lowest(&mut self) -> Result<(f64, CVec, f64)> {
        let avail = self.op.dim() - self.locked.len();
        let m = BASIS_MAX.min(avail);
        let keep = (m / 3).max(1);
        let mut basis: Vec<CVec> = Vec::with_capacity(m);
        let mut images: Vec<CVec> = Vec::with_capacity(m);
        let mut q = self.random_vector();
        let mut best = f64::INFINITY;
        loop {
            while basis.len() < m {
                let mut nrm = self.orthogonalize(&mut q, &basis);
                if nrm < 1e-10 {
                    q = self.random_vector();
                    nrm = self.orthogonalize(&mut q, &basis);
                    if nrm < 1e-10 {
                        break;
                    }
                }
                q /= C64::new(nrm, 0.0);
                let hq = self.apply(&q);
                basis.push(q);
                images.push(hq.clone());
                q = hq;
            }
            let p = basis.len();
            let g = CMat::from_fn(p, p, |r, c| basis[r].dotc(&images[c]));
            let g = (&g + g.adjoint()) * C64::new(0.5, 0.0);
            let (theta, y) = eigh(&g);
            self.norm = theta.iter().fold(self.norm, |a, t| a.max(t.abs()));
            let combine = |set: &[CVec], col: usize| {
                let mut out = CVec::zeros(set[0].len());
                for (j, v) in set.iter().enumerate() {
                    out.axpy(y[(j, col)], v, ONE);
                }
                out
            };
            let u = combine(&basis, 0);
            let hu = combine(&images, 0);
            let r = &hu - &u * C64::new(theta[0], 0.0);
            let res = r.norm();
            best = best.min(res);
            if res <= EIG_TOL * self.norm.max(f64::MIN_POSITIVE) || p >= avail {
                return Ok((theta[0], u, res));
            }
            if self.matvecs > MATVEC_BUDGET {
                return Err(Error::NoConvergence { iterations: self.matvecs, residual: best });
            }
            let kk = keep.min(p);
            let new_basis: Vec<CVec> = (0..kk).map(|c| combine(&basis, c)).collect();
            let new_images: Vec<CVec> = (0..kk).map(|c| combine(&images, c)).collect();
            basis = new_basis;
            images = new_images;
            q = r;
        }
    }

    fn run(mut self, k: usize) -> Result<EigenSystem> {
        let mut values: Vec<f64> = Vec::with_capacity(k);
        while self.locked.len() < k {
            let (t, u, _) = self.lowest()?;
            values.push(t);
            self.locked.push(u);
        }
        // A converged pair can hide a degenerate partner below it; sweep once
        // more in the deflated space and swap in anything lower.
        for _ in 0..k {
            if self.locked.len() >= self.op.dim() {
                break;
            }
            let (t, u, _) = self.lowest()?;
            let (imax, vmax) = values.iter().enumerate().fold((0, f64::NEG_INFINITY), |a, (i, &v)| if v > a.1 { (i, v) } else { a });
            if t < vmax - 10.0 * EIG_TOL * self.norm {
                values.remove(imax);
                self.locked.remove(imax);
                values.push(t);
                self.locked.push(u);
            } else {
                break;
            }
        }
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let vals: Vec<f64> = order.iter().map(|&i| values[i]).collect();
        let vectors = CMat::from_columns(&order.iter().map(|&i| self.locked[i].clone()).collect::<Vec<_>>());
        let residual_norms = residuals(self.op, &vals, &vectors);
        Ok(EigenSystem { values: vals, vectors, residual_norms, norm_estimate: self.norm, solver: Solver::Lanczos })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    AtMostA,
    AtLeastB,
    ViolatesPromise,
}

#[derive(Clone, Debug, Serialize)]
pub struct GroundEnergy {
    pub energy: f64,
    pub residual: f64,
    pub verdict: Option<Verdict>,
}

pub fn ground_energy(inst: &HamiltonianInstance) -> Result<GroundEnergy> {
    let op = inst.assemble()?;
    let es = eigensystem(&op, 1)?;
    let energy = es.values[0];
    let slack = EIG_TOL * es.norm_estimate.max(1.0);
    let verdict = inst.thresholds.as_ref().map(|th| {
        if energy <= th.a + slack {
            Verdict::AtMostA
        } else if energy >= th.b - slack {
            Verdict::AtLeastB
        } else {
            Verdict::ViolatesPromise
        }
    });
    Ok(GroundEnergy { energy, residual: es.residual_norms[0], verdict })
}

#[derive(Clone, Debug)]
pub struct LowEnergyBlock {
    pub cutoff: f64,
    /// Orthonormal columns spanning the eigenvectors below the cutoff.
    pub basis: CMat,
    pub restricted: CMat,
    pub values: Vec<f64>,
    /// Lowest eigenvalue at or above the cutoff, if any.
    pub next_above: Option<f64>,
}

impl LowEnergyBlock {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// The restriction as an operator on the full space.
    pub fn as_supported(&self) -> SupportedOperator {
        SupportedOperator { basis: self.basis.clone(), matrix: self.restricted.clone() }
    }
}

pub fn low_energy_block(op: &AssembledOperator, cutoff: f64) -> Result<LowEnergyBlock> {
    let dim = op.dim();
    let mut k = dim.min(if dim <= DENSE_EIG_MAX { dim } else { 8 });
    let es = loop {
        let es = eigensystem(op, k)?;
        if k == dim || *es.values.last().unwrap() >= cutoff {
            break es;
        }
        k = (2 * k).min(dim);
    };
    let below = es.values.iter().take_while(|&&v| v < cutoff).count();
    let next_above = es.values.get(below).copied();
    let gap = match (below, next_above) {
        (0, _) | (_, None) => f64::INFINITY,
        (b, Some(up)) => up - es.values[b - 1],
    };
    let guard = GAP_MIN * es.norm_estimate;
    if gap < guard {
        return Err(Error::CutoffInsideCluster { cutoff, gap, guard });
    }
    let basis = es.vectors.columns(0, below).into_owned();
    let image = CMat::from_columns(&(0..below).map(|i| op.apply(&basis.column(i).into_owned())).collect::<Vec<_>>());
    let restricted = if below == 0 { CMat::zeros(0, 0) } else { basis.adjoint() * image };
    let restricted = (&restricted + restricted.adjoint()) * C64::new(0.5, 0.0);
    Ok(LowEnergyBlock { cutoff, basis, restricted, values: es.values[..below].to_vec(), next_above })
}

/// An operator B·A·B† given by an isometry B (dim × m) and an m × m matrix A.
#[derive(Clone, Debug)]
pub struct SupportedOperator {
    pub basis: CMat,
    pub matrix: CMat,
}

impl SupportedOperator {
    pub fn from_dense(m: &CMat) -> Self {
        SupportedOperator { basis: CMat::identity(m.nrows(), m.nrows()), matrix: m.clone() }
    }

    pub fn to_dense(&self) -> CMat {
        &self.basis * &self.matrix * self.basis.adjoint()
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }
}

/// Orthonormal basis of the column span of `m`.
pub fn orthonormal_span(m: &CMat, tol: f64) -> CMat {
    if m.ncols() == 0 {
        return m.clone();
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("requested U");
    let cols: Vec<CVec> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, s)| **s > tol)
        .map(|(i, _)| u.column(i).into_owned())
        .collect();
    if cols.is_empty() {
        return CMat::zeros(m.nrows(), 0);
    }
    CMat::from_columns(&cols)
}

/// ‖A − B‖ for two supported operators, computed on the joint support.
pub fn supported_distance(a: &SupportedOperator, b: &SupportedOperator) -> f64 {
    assert_eq!(a.dim(), b.dim());
    let joint = orthonormal_span(&concat_columns(&a.basis, &b.basis), 1e-12);
    let project = |s: &SupportedOperator| {
        let c = joint.adjoint() * &s.basis;
        &c * &s.matrix * c.adjoint()
    };
    op_norm(&(project(a) - project(b)))
}

fn concat_columns(a: &CMat, b: &CMat) -> CMat {
    let mut out = CMat::zeros(a.nrows(), a.ncols() + b.ncols());
    out.columns_mut(0, a.ncols()).copy_from(a);
    out.columns_mut(a.ncols(), b.ncols()).copy_from(b);
    out
}

/// ‖op_{<cutoff} − predicted‖, both as operators on the full space.
pub fn effective_distance(op: &AssembledOperator, cutoff: f64, predicted: &SupportedOperator) -> Result<f64> {
    let block = low_energy_block(op, cutoff)?;
    Ok(supported_distance(&block.as_supported(), predicted))
}

/// Σ₋(z) as a matrix in the basis `basis` of the low space of H.
#[derive(Clone, Debug)]
pub struct SelfEnergy {
    pub basis: CMat,
    pub matrix: CMat,
}

struct Split {
    low: CMat,
    high: CMat,
    high_vals: Vec<f64>,
    low_vals: Vec<f64>,
}

fn split(h: &CMat, cutoff: f64) -> Split {
    let (vals, vecs) = eigh(h);
    let nlow = vals.iter().take_while(|&&v| v < cutoff).count();
    Split {
        low: vecs.columns(0, nlow).into_owned(),
        high: vecs.columns(nlow, vals.len() - nlow).into_owned(),
        high_vals: vals[nlow..].to_vec(),
        low_vals: vals[..nlow].to_vec(),
    }
}

fn resolvent_high(z: C64, s: &Split, scale: f64) -> Result<CMat> {
    let mut g = CMat::zeros(s.high_vals.len(), s.high_vals.len());
    for (i, &l) in s.high_vals.iter().enumerate() {
        let d = z - C64::new(l, 0.0);
        if d.norm() <= 1e-12 * scale.max(1.0) {
            return Err(Error::ResolventSingular);
        }
        g[(i, i)] = ONE / d;
    }
    Ok(g)
}

/// Closed-form self-energy H₋ + V₋ + V₋₊G₊(I₊ − V₊G₊)⁻¹V₊₋ on the low space of `h`.
pub fn self_energy(z: C64, h: &CMat, v: &CMat, cutoff: f64) -> Result<SelfEnergy> {
    let s = split(h, cutoff);
    let scale = op_norm(h);
    let g = resolvent_high(z, &s, scale)?;
    let h_low = CMat::from_diagonal(&CVec::from_iterator(s.low_vals.len(), s.low_vals.iter().map(|&x| C64::new(x, 0.0))));
    let v_ll = s.low.adjoint() * v * &s.low;
    let v_lh = s.low.adjoint() * v * &s.high;
    let v_hh = s.high.adjoint() * v * &s.high;
    let nh = s.high_vals.len();
    let inner = CMat::identity(nh, nh) - &v_hh * &g;
    let inv = inner.try_inverse().ok_or(Error::ResolventSingular)?;
    let tail = &v_lh * &g * inv * v_lh.adjoint();
    Ok(SelfEnergy { basis: s.low, matrix: h_low + v_ll + tail })
}

/// The series truncated after `order` resolvent factors.
pub fn self_energy_series(z: C64, h: &CMat, v: &CMat, cutoff: f64, order: usize) -> Result<SelfEnergy> {
    let s = split(h, cutoff);
    let scale = op_norm(h);
    let g = resolvent_high(z, &s, scale)?;
    let h_low = CMat::from_diagonal(&CVec::from_iterator(s.low_vals.len(), s.low_vals.iter().map(|&x| C64::new(x, 0.0))));
    let v_lh = s.low.adjoint() * v * &s.high;
    let v_hh = s.high.adjoint() * v * &s.high;
    let mut out = h_low + s.low.adjoint() * v * &s.low;
    let mut left = &v_lh * &g;
    for i in 1..=order {
        out += &left * v_lh.adjoint();
        if i < order {
            left = left * &v_hh * &g;
        }
    }
    Ok(SelfEnergy { basis: s.low, matrix: out })
}

/// Σ_{i>order} ‖V‖^{i+1}‖G₊‖^i (infinite when the ratio reaches 1).
pub fn series_tail_bound(v_norm: f64, g_norm: f64, order: usize) -> f64 {
    let q = v_norm * g_norm;
    if q >= 1.0 {
        return f64::INFINITY;
    }
    v_norm * q.powi(order as i32 + 1) / (1.0 - q)
}

/// ‖G₊(z)‖ for the split of `h` at `cutoff`.
pub fn resolvent_norm(z: C64, h: &CMat, cutoff: f64) -> f64 {
    let s = split(h, cutoff);
    s.high_vals.iter().map(|&l| 1.0 / (z - C64::new(l, 0.0)).norm()).fold(0.0, f64::max)
}

/// Dense (matrix, basis) helper: the low space of a plain matrix as a supported operator.
pub fn dense_low_block(h: &CMat, cutoff: f64) -> SupportedOperator {
    let s = split(h, cutoff);
    let m = CMat::from_diagonal(&CVec::from_iterator(s.low_vals.len(), s.low_vals.iter().map(|&x| C64::new(x, 0.0))));
    SupportedOperator { basis: s.low, matrix: m }
}

/// Compress a real matrix to complex form.
pub fn complexify(m: &DMatrix<f64>) -> CMat {
    m.map(|x| C64::new(x, 0.0))
}
