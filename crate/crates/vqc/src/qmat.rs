//! Dense complex linear algebra.
//!
//! Matrices are row-major. All routines are value-semantic and allocate
//! their results.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tol;

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Dense row-major complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row-major data; `data.len()` must equal `rows * cols`.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from nested rows. Panics on ragged input.
    pub fn from_rows<R: AsRef<[C64]>>(rows: &[R]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.as_ref().len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.as_ref().len(), c, "ragged rows");
            data.extend_from_slice(row.as_ref());
        }
        Self { rows: r, cols: c, data }
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Self {
        assert_eq!(data.len(), rows * cols);
        Self {
            rows,
            cols,
            data: data.iter().map(|&x| C64::new(x, 0.0)).collect(),
        }
    }

    pub fn diag(d: &[C64]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &v) in d.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    /// Matrix product. Panics on inner-dimension mismatch.
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul inner dimension");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let b_row = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &ComplexVector) -> ComplexVector {
        assert_eq!(self.cols, v.dim(), "matrix-vector dimension");
        let data = (0..self.rows)
            .map(|i| self.row(i).iter().zip(v.data()).map(|(a, b)| a * b).sum())
            .collect();
        ComplexVector::new(data)
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// `‖A − A†‖_F`.
    pub fn hermitian_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        frobenius_norm(&self.sub(&self.adjoint()))
    }

    /// `‖A†A − I‖_F`.
    pub fn unitary_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        frobenius_norm(&self.adjoint().matmul(self).sub(&Self::identity(self.rows)))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Largest `|Im a_ij|`.
    pub fn max_abs_imag(&self) -> f64 {
        self.data.iter().fold(0.0, |m, z| m.max(z.im.abs()))
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Dense complex column vector.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexVector {
    data: Vec<C64>,
}

impl ComplexVector {
    pub fn new(data: Vec<C64>) -> Self {
        Self { data }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            data: vec![ZERO; dim],
        }
    }

    pub fn from_real(x: &[f64]) -> Self {
        Self {
            data: x.iter().map(|&v| C64::new(v, 0.0)).collect(),
        }
    }

    /// Computational basis state `|index⟩` of dimension `dim`.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.data[index] = ONE;
        v
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨self|other⟩`, conjugating `self`.
    pub fn dot(&self, other: &Self) -> C64 {
        assert_eq!(self.dim(), other.dim());
        self.data.iter().zip(&other.data).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (br, bc) = (b.rows, b.cols);
    ComplexMatrix::from_fn(a.rows * br, a.cols * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}

pub fn frobenius_norm(a: &ComplexMatrix) -> f64 {
    a.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `a = k1 · diag(sigma) · k2dag` with `sigma` descending.
#[derive(Clone, Debug)]
pub struct SvdResult {
    pub k1: ComplexMatrix,
    pub sigma: Vec<f64>,
    pub k2dag: ComplexMatrix,
}

impl SvdResult {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.sigma.len();
        let mut us = self.k1.clone();
        for i in 0..n {
            for j in 0..n {
                us[(i, j)] *= self.sigma[j];
            }
        }
        us.matmul(&self.k2dag)
    }
}

/// Singular value decomposition of a square matrix by one-sided complex Jacobi.
///
/// Real input yields real factors.
pub fn svd(a: &ComplexMatrix) -> Result<SvdResult> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "svd expects a square matrix, got {}x{}",
            a.rows, a.cols
        )));
    }
    if !a.is_finite() {
        return Err(Error::NonFinite("svd input"));
    }
    let n = a.rows;
    // Column-major working copies: w holds A·V, v accumulates V.
    let mut w: Vec<Vec<C64>> = (0..n).map(|j| (0..n).map(|i| a[(i, j)]).collect()).collect();
    let mut v: Vec<Vec<C64>> = (0..n).map(|j| ComplexVector::basis(n, j).data).collect();

    let mut converged = false;
    let mut residual = 0.0;
    for _ in 0..tol::JACOBI_MAX_SWEEPS {
        residual = 0.0f64;
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha: f64 = w[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = w[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma: C64 = w[p].iter().zip(&w[q]).map(|(x, y)| x.conj() * y).sum();
                let g = gamma.norm();
                if alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                let rel = g / (alpha * beta).sqrt();
                residual = residual.max(rel);
                if rel <= tol::JACOBI_OFFDIAG {
                    continue;
                }
                rotated = true;
                // Phase e^{-i arg γ} on column q makes the pair's overlap real.
                let phase = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate_pair(&mut w, p, q, phase, c, s);
                rotate_pair(&mut v, p, q, phase, c, s);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            what: "one-sided Jacobi SVD",
            sweeps: tol::JACOBI_MAX_SWEEPS,
            residual,
        });
    }

    let mut sigma: Vec<f64> = w.iter().map(|col| col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| sigma[y].total_cmp(&sigma[x]).then(x.cmp(&y)));

    let scale = sigma.iter().cloned().fold(0.0, f64::max);
    let tiny = scale * (n as f64) * f64::EPSILON;
    let mut ucols: Vec<Vec<C64>> = Vec::with_capacity(n);
    let mut vcols: Vec<Vec<C64>> = Vec::with_capacity(n);
    let mut sorted_sigma = Vec::with_capacity(n);
    let mut deficient = Vec::new();
    for (slot, &j) in order.iter().enumerate() {
        vcols.push(v[j].clone());
        if sigma[j] > tiny && sigma[j] > 0.0 {
            let inv = 1.0 / sigma[j];
            ucols.push(w[j].iter().map(|z| z * inv).collect());
            sorted_sigma.push(sigma[j]);
        } else {
            ucols.push(vec![ZERO; n]);
            sorted_sigma.push(0.0);
            deficient.push(slot);
        }
    }
    complete_orthonormal(&mut ucols, &deficient, a.max_abs_imag() == 0.0);
    sigma = sorted_sigma;

    let k1 = ComplexMatrix::from_fn(n, n, |i, j| ucols[j][i]);
    let k2dag = ComplexMatrix::from_fn(n, n, |i, j| vcols[i][j].conj());
    Ok(SvdResult { k1, sigma, k2dag })
}

fn rotate_pair(cols: &mut [Vec<C64>], p: usize, q: usize, phase: C64, c: f64, s: f64) {
    let (left, right) = cols.split_at_mut(q);
    let cp = &mut left[p];
    let cq = &mut right[0];
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let yq = *y * phase;
        let xp = *x;
        *x = xp * c - yq * s;
        *y = xp * s + yq * c;
    }
}

/// Fills the listed zero columns with unit vectors orthogonal to all others.
fn complete_orthonormal(cols: &mut [Vec<C64>], missing: &[usize], real: bool) {
    let n = cols.len();
    let mut candidate = 0;
    for &slot in missing {
        loop {
            assert!(candidate < n, "basis completion exhausted candidates");
            let mut e = ComplexVector::basis(n, candidate).data;
            candidate += 1;
            // Two Gram-Schmidt passes against every current column.
            for _ in 0..2 {
                for (k, col) in cols.iter().enumerate() {
                    if k == slot {
                        continue;
                    }
                    let proj: C64 = col.iter().zip(&e).map(|(a, b)| a.conj() * b).sum();
                    for (ei, ci) in e.iter_mut().zip(col) {
                        *ei -= proj * ci;
                    }
                }
            }
            let nrm = e.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if nrm > 1e-6 {
                if real {
                    for z in e.iter_mut() {
                        z.im = 0.0;
                    }
                }
                let nrm = e.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                cols[slot] = e.iter().map(|z| z / nrm).collect();
                break;
            }
        }
    }
}

/// Eigendecomposition `H = V diag(λ) V†` of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermEig {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
///
/// Eigenvalues are returned in ascending order.
pub fn herm_eig(h: &ComplexMatrix) -> Result<HermEig> {
    let residual = h.hermitian_residual();
    if residual > tol::HERMITIAN {
        return Err(Error::NotHermitian { residual });
    }
    let n = h.rows;
    // Symmetrize so rounding in the input cannot break the sweep invariant.
    let mut a = h.add(&h.adjoint()).scale(C64::new(0.5, 0.0));
    let mut v = ComplexMatrix::identity(n);
    let total = frobenius_norm(&a).max(f64::MIN_POSITIVE);

    let off = |a: &ComplexMatrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut converged = off(&a) <= tol::JACOBI_OFFDIAG * total;
    let mut sweeps = 0;
    while !converged && sweeps < tol::JACOBI_MAX_SWEEPS {
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let g = apq.norm();
                if g <= f64::MIN_POSITIVE {
                    continue;
                }
                let phase = (apq / g).conj();
                let zeta = (a[(q, q)].re - a[(p, p)].re) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                // J acts on columns p,q: [[c, s], [-s·φ, c·φ]] with φ = phase.
                let jpp = C64::new(c, 0.0);
                let jpq = C64::new(s, 0.0);
                let jqp = phase * (-s);
                let jqq = phase * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * jpp + akq * jqp;
                    a[(k, q)] = akp * jpq + akq * jqq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
                    a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * jpp + vkq * jqp;
                    v[(k, q)] = vkp * jpq + vkq * jqq;
                }
            }
        }
        converged = off(&a) <= tol::JACOBI_OFFDIAG * total;
    }
    if !converged {
        return Err(Error::NoConvergence {
            what: "Hermitian Jacobi eigensolver",
            sweeps,
            residual: off(&a) / total,
        });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[(x, x)].re.total_cmp(&a[(y, y)].re).then(x.cmp(&y)));
    let values = order.iter().map(|&k| a[(k, k)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(HermEig { values, vectors })
}

/// `exp(−i t H)` for Hermitian `H`.
pub fn herm_expm(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    let eig = herm_eig(h)?;
    let n = h.rows;
    let phases: Vec<C64> = eig.values.iter().map(|&l| C64::from_polar(1.0, -t * l)).collect();
    let mut vp = eig.vectors.clone();
    for i in 0..n {
        for j in 0..n {
            vp[(i, j)] *= phases[j];
        }
    }
    Ok(vp.matmul(&eig.vectors.adjoint()))
}

/// `Re ψ†Oψ` for Hermitian `O` and unit `ψ`.
pub fn expectation(o: &ComplexMatrix, psi: &ComplexVector) -> Result<f64> {
    if !o.is_square() || o.rows != psi.dim() {
        return Err(Error::Dimension(format!(
            "observable {}x{} against state of dimension {}",
            o.rows,
            o.cols,
            psi.dim()
        )));
    }
    let norm = psi.norm();
    if (norm - 1.0).abs() > tol::STATE_NORM {
        return Err(Error::NotNormalized { norm });
    }
    let val = psi.dot(&o.mul_vec(psi));
    debug_assert!(
        val.im.abs() <= tol::EXPECTATION_IMAG.max(1e-12 * frobenius_norm(o)),
        "imaginary expectation residue {}",
        val.im
    );
    Ok(val.re)
}
