//! Dense linear algebra for small complex matrices (n <= 8).
//!
//! Dependency-light kernels used by the eigenbundle analyzer and the
//! fixed-size algebra: LU solve, characteristic polynomial, polynomial
//! roots via companion-matrix QR iteration, kernel/image bases with
//! pivoted Gram-Schmidt, subspace overlaps, and a Jacobi eigensolver for
//! real symmetric 4x4 matrices.

use num_complex::Complex64 as C64;

use crate::error::Error;
use crate::Result;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Dense n x n complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatN {
    n: usize,
    a: Vec<C64>,
}

impl CMatN {
    pub fn zero(n: usize) -> Self {
        CMatN { n, a: vec![ZERO; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for k in 0..n {
            m.set(k, k, ONE);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<C64>>) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "matrix must be square");
        CMatN { n, a: rows.into_iter().flatten().collect() }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.a[r * self.n + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: C64) {
        self.a[r * self.n + c] = v;
    }

    pub fn mul(&self, other: &CMatN) -> CMatN {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = CMatN::zero(n);
        for r in 0..n {
            for k in 0..n {
                let s = self.get(r, k);
                if s == ZERO {
                    continue;
                }
                for c in 0..n {
                    out.a[r * n + c] += s * other.get(k, c);
                }
            }
        }
        out
    }

    pub fn add_scaled_identity(&mut self, alpha: C64) {
        for k in 0..self.n {
            self.a[k * self.n + k] += alpha;
        }
    }

    pub fn scale(&mut self, alpha: C64) {
        for e in self.a.iter_mut() {
            *e *= alpha;
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.n).map(|k| self.get(k, k)).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.a.iter().map(|e| e.norm()).fold(0.0, f64::max)
    }

    pub fn column(&self, c: usize) -> Vec<C64> {
        (0..self.n).map(|r| self.get(r, c)).collect()
    }

    pub fn row(&self, r: usize) -> Vec<C64> {
        (0..self.n).map(|c| self.get(r, c)).collect()
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        let n = self.n;
        let mut out = vec![ZERO; n];
        for r in 0..n {
            for c in 0..n {
                out[r] += self.get(r, c) * v[c];
            }
        }
        out
    }
}

/// Solve `A x = b` by LU with partial pivoting. Errors when A is
/// numerically singular.
pub fn solve(a: &CMatN, b: &[C64]) -> Result<Vec<C64>> {
    let n = a.dim();
    assert_eq!(b.len(), n);
    let mut m = a.clone();
    let mut rhs = b.to_vec();
    for col in 0..n {
        let (pivot_row, pivot_abs) = (col..n)
            .map(|r| (r, m.get(r, col).norm()))
            .max_by(|x, y| x.1.partial_cmp(&y.1).unwrap())
            .unwrap();
        if pivot_abs < 1e-300 {
            return Err(Error::EigensolveFailed);
        }
        if pivot_row != col {
            for c in 0..n {
                let t = m.get(col, c);
                m.set(col, c, m.get(pivot_row, c));
                m.set(pivot_row, c, t);
            }
            rhs.swap(col, pivot_row);
        }
        let inv = ONE / m.get(col, col);
        for r in col + 1..n {
            let f = m.get(r, col) * inv;
            if f == ZERO {
                continue;
            }
            for c in col..n {
                let v = m.get(r, c) - f * m.get(col, c);
                m.set(r, c, v);
            }
            let upd = f * rhs[col];
            rhs[r] -= upd;
        }
    }
    for r in (0..n).rev() {
        let mut acc = rhs[r];
        for c in r + 1..n {
            acc -= m.get(r, c) * rhs[c];
        }
        rhs[r] = acc / m.get(r, r);
    }
    Ok(rhs)
}

/// Monic characteristic polynomial by the Faddeev-LeVerrier recurrence.
///
/// Returns `[c1, ..., cn]` with `p(t) = t^n + c1 t^(n-1) + ... + cn`.
/// The matrix is normalized by its largest entry first; coefficients are
/// rescaled back, which keeps the recurrence well conditioned at the
/// scales used here.
pub fn char_poly(m: &CMatN) -> Vec<C64> {
    let n = m.dim();
    let s = m.max_abs().max(1e-30);
    let mut a = m.clone();
    a.scale(C64::new(1.0 / s, 0.0));
    let mut coeffs = vec![ZERO; n];
    let mut mk = a.clone();
    for k in 1..=n {
        let ck = -mk.trace() / (k as f64);
        coeffs[k - 1] = ck;
        if k < n {
            let mut next = mk.clone();
            next.add_scaled_identity(ck);
            mk = a.mul(&next);
        }
    }
    // undo the normalization: c_k scales by s^k
    let mut f = 1.0;
    for c in coeffs.iter_mut() {
        f *= s;
        *c *= C64::new(f, 0.0);
    }
    coeffs
}

/// All n roots (with multiplicity) of the monic polynomial
/// `t^n + c1 t^(n-1) + ... + cn`, via companion-matrix QR iteration.
pub fn poly_roots(coeffs: &[C64]) -> Result<Vec<C64>> {
    let n = coeffs.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let scale = coeffs.iter().map(|c| c.norm()).fold(1.0, f64::max);
    // peel off exact-ish zero roots so nilpotent companions never reach QR
    let mut work: Vec<C64> = coeffs.to_vec();
    let mut zeros = 0usize;
    while !work.is_empty() && work.last().unwrap().norm() <= 1e-300 * scale.max(1.0) {
        work.pop();
        zeros += 1;
    }
    let mut roots = vec![ZERO; zeros];
    let m = work.len();
    if m == 0 {
        return Ok(roots);
    }
    if m == 1 {
        roots.push(-work[0]);
        return Ok(roots);
    }
    if m == 2 {
        let (r1, r2) = quadratic_roots(work[0], work[1]);
        roots.push(r1);
        roots.push(r2);
        return Ok(roots);
    }
    let mut h = CMatN::zero(m);
    for (j, c) in work.iter().enumerate() {
        h.set(0, j, -c);
    }
    for r in 1..m {
        h.set(r, r - 1, ONE);
    }
    roots.extend(hessenberg_eigenvalues(h)?);
    Ok(roots)
}

/// Eigenvalues of a matrix via Hessenberg reduction followed by shifted
/// QR. Used directly on small general matrices and on companions (already
/// Hessenberg).
pub fn eigenvalues(m: &CMatN) -> Result<Vec<C64>> {
    let roots = poly_roots(&char_poly(m))?;
    Ok(roots)
}

fn quadratic_roots(c1: C64, c2: C64) -> (C64, C64) {
    // t^2 + c1 t + c2
    let half = C64::new(0.5, 0.0);
    let disc = (c1 * c1 - 4.0 * c2).sqrt();
    // pick the larger-magnitude root first to avoid cancellation
    let q = if (-c1 + disc).norm() >= (-c1 - disc).norm() { (-c1 + disc) * half } else { (-c1 - disc) * half };
    if q.norm() < 1e-300 {
        (ZERO, ZERO)
    } else {
        (q, c2 / q)
    }
}

fn eig2(a: C64, b: C64, c: C64, d: C64) -> (C64, C64) {
    let tr = a + d;
    let det = a * d - b * c;
    quadratic_roots(-tr, det)
}

fn givens(f: C64, g: C64) -> (f64, C64) {
    if g.norm() == 0.0 {
        return (1.0, ZERO);
    }
    if f.norm() == 0.0 {
        return (0.0, g.conj() / g.norm());
    }
    let d = (f.norm_sqr() + g.norm_sqr()).sqrt();
    let cth = f.norm() / d;
    let s = (f / f.norm()) * (g.conj() / d);
    (cth, s)
}

/// Eigenvalues of an upper Hessenberg matrix by complex single-shift QR
/// with deflation and occasional exceptional shifts.
fn hessenberg_eigenvalues(mut h: CMatN) -> Result<Vec<C64>> {
    let n = h.dim();
    let mut eigs = vec![ZERO; n];
    let mut hi = n;
    let mut iters = 0usize;
    let max_iters = 60 * n.max(1);
    while hi > 0 {
        // deflation scan
        let mut lo = hi - 1;
        while lo > 0 {
            let s = h.get(lo - 1, lo - 1).norm() + h.get(lo, lo).norm();
            let s = if s > 0.0 { s } else { h.max_abs().max(1e-300) };
            if h.get(lo, lo - 1).norm() <= 1e-15 * s {
                h.set(lo, lo - 1, ZERO);
                break;
            }
            lo -= 1;
        }
        if lo == hi - 1 {
            eigs[hi - 1] = h.get(hi - 1, hi - 1);
            hi -= 1;
            iters = 0;
            continue;
        }
        if lo == hi - 2 {
            let (e1, e2) = eig2(
                h.get(lo, lo),
                h.get(lo, lo + 1),
                h.get(lo + 1, lo),
                h.get(lo + 1, lo + 1),
            );
            eigs[lo] = e1;
            eigs[lo + 1] = e2;
            hi -= 2;
            iters = 0;
            continue;
        }
        iters += 1;
        if iters > max_iters {
            return Err(Error::EigensolveFailed);
        }
        let sigma = if iters % 12 == 0 {
            // exceptional shift breaks cycles on highly symmetric spectra
            let t = h.get(hi - 1, hi - 2).norm() + h.get(hi - 2, hi - 3.min(hi - 2)).norm();
            C64::new(0.75 * t, 0.4375 * t)
        } else {
            wilkinson_shift(&h, hi)
        };
        qr_step(&mut h, lo, hi, sigma);
    }
    Ok(eigs)
}

fn wilkinson_shift(h: &CMatN, hi: usize) -> C64 {
    let a = h.get(hi - 2, hi - 2);
    let b = h.get(hi - 2, hi - 1);
    let c = h.get(hi - 1, hi - 2);
    let d = h.get(hi - 1, hi - 1);
    let (e1, e2) = eig2(a, b, c, d);
    if (e1 - d).norm() <= (e2 - d).norm() {
        e1
    } else {
        e2
    }
}

fn qr_step(h: &mut CMatN, lo: usize, hi: usize, sigma: C64) {
    for k in lo..hi {
        let v = h.get(k, k) - sigma;
        h.set(k, k, v);
    }
    let mut rots = Vec::with_capacity(hi - lo);
    for k in lo..hi - 1 {
        let (cth, s) = givens(h.get(k, k), h.get(k + 1, k));
        for j in k..hi {
            let a = h.get(k, j);
            let b = h.get(k + 1, j);
            h.set(k, j, cth * a + s * b);
            h.set(k + 1, j, -s.conj() * a + cth * b);
        }
        h.set(k + 1, k, ZERO);
        rots.push((cth, s));
    }
    for (idx, (cth, s)) in rots.iter().enumerate() {
        let k = lo + idx;
        for i in lo..hi {
            let a = h.get(i, k);
            let b = h.get(i, k + 1);
            h.set(i, k, *cth * a + s.conj() * b);
            h.set(i, k + 1, -*s * a + *cth * b);
        }
    }
    for k in lo..hi {
        let v = h.get(k, k) + sigma;
        h.set(k, k, v);
    }
}

fn hermitian_dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

fn vec_norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Orthonormalize `candidates` against `basis` and each other, keeping
/// vectors whose residual norm exceeds `thresh`. Appends in place.
fn mgs_extend(basis: &mut Vec<Vec<C64>>, candidates: &[Vec<C64>], thresh: f64, limit: usize) {
    for cand in candidates {
        if basis.len() >= limit {
            return;
        }
        let mut v = cand.clone();
        for _ in 0..2 {
            for q in basis.iter() {
                let o = hermitian_dot(q, &v);
                for (vi, qi) in v.iter_mut().zip(q.iter()) {
                    *vi -= o * qi;
                }
            }
        }
        let nrm = vec_norm(&v);
        if nrm > thresh {
            for vi in v.iter_mut() {
                *vi /= C64::new(nrm, 0.0);
            }
            basis.push(v);
        }
    }
}

/// Orthonormal basis of the column space, by column-pivoted Gram-Schmidt.
/// `rel_tol` is relative to the largest column norm.
pub fn image_basis(m: &CMatN, rel_tol: f64) -> Vec<Vec<C64>> {
    let n = m.dim();
    let mut cols: Vec<Vec<C64>> = (0..n).map(|c| m.column(c)).collect();
    let scale = cols.iter().map(|c| vec_norm(c)).fold(0.0, f64::max);
    if scale == 0.0 {
        return Vec::new();
    }
    let thresh = rel_tol * scale;
    let mut basis: Vec<Vec<C64>> = Vec::new();
    loop {
        // residual-pivot: orthogonalize all remaining, take the largest
        let mut best: Option<(usize, f64)> = None;
        for (k, cand) in cols.iter().enumerate() {
            let mut v = cand.clone();
            for q in basis.iter() {
                let o = hermitian_dot(q, &v);
                for (vi, qi) in v.iter_mut().zip(q.iter()) {
                    *vi -= o * qi;
                }
            }
            let nrm = vec_norm(&v);
            if best.is_none_or(|(_, bn)| nrm > bn) {
                best = Some((k, nrm));
            }
        }
        match best {
            Some((k, nrm)) if nrm > thresh => {
                let cand = cols.remove(k);
                mgs_extend(&mut basis, &[cand], thresh * 0.5, n);
            }
            _ => break,
        }
        if cols.is_empty() {
            break;
        }
    }
    basis
}

/// Orthonormal basis of the null space `{x : Mx = 0}`.
///
/// The null space is the orthogonal complement of the span of the
/// conjugated rows; that span is orthonormalized and then completed with
/// coordinate vectors.
pub fn kernel_basis(m: &CMatN, rel_tol: f64) -> Vec<Vec<C64>> {
    let n = m.dim();
    let rows: Vec<Vec<C64>> = (0..n)
        .map(|r| m.row(r).iter().map(|e| e.conj()).collect())
        .collect();
    let scale = rows.iter().map(|r| vec_norm(r)).fold(0.0, f64::max);
    if scale == 0.0 {
        // zero matrix: kernel is everything
        let mut id = Vec::new();
        for k in 0..n {
            let mut e = vec![ZERO; n];
            e[k] = ONE;
            id.push(e);
        }
        return id;
    }
    let thresh = rel_tol * scale;
    // orthonormalize the row space with residual pivoting
    let mut row_space: Vec<Vec<C64>> = Vec::new();
    let mut remaining = rows;
    loop {
        let mut best: Option<(usize, f64)> = None;
        for (k, cand) in remaining.iter().enumerate() {
            let mut v = cand.clone();
            for q in row_space.iter() {
                let o = hermitian_dot(q, &v);
                for (vi, qi) in v.iter_mut().zip(q.iter()) {
                    *vi -= o * qi;
                }
            }
            let nrm = vec_norm(&v);
            if best.is_none_or(|(_, bn)| nrm > bn) {
                best = Some((k, nrm));
            }
        }
        match best {
            Some((k, nrm)) if nrm > thresh => {
                let cand = remaining.remove(k);
                mgs_extend(&mut row_space, &[cand], thresh * 0.5, n);
            }
            _ => break,
        }
        if remaining.is_empty() {
            break;
        }
    }
    // complete to a full orthonormal basis; the completion spans the kernel
    let mut full = row_space.clone();
    let rank = row_space.len();
    let coords: Vec<Vec<C64>> = (0..n)
        .map(|k| {
            let mut e = vec![ZERO; n];
            e[k] = ONE;
            e
        })
        .collect();
    mgs_extend(&mut full, &coords, 0.3, n);
    full.split_off(rank)
}

/// Smallest singular value of the overlap matrix `A^H B` between two sets
/// of orthonormal columns; equals the cosine of the largest principal
/// angle between the spanned subspaces.
pub fn min_subspace_overlap(a: &[Vec<C64>], b: &[Vec<C64>]) -> f64 {
    let k = a.len().min(b.len());
    if k == 0 {
        return 0.0;
    }
    let mut w = CMatN::zero(k);
    for (r, av) in a.iter().take(k).enumerate() {
        for (c, bv) in b.iter().take(k).enumerate() {
            w.set(r, c, hermitian_dot(av, bv));
        }
    }
    let mut g = CMatN::zero(k);
    for r in 0..k {
        for c in 0..k {
            let mut acc = ZERO;
            for j in 0..k {
                acc += w.get(j, r).conj() * w.get(j, c);
            }
            g.set(r, c, acc);
        }
    }
    match eigenvalues(&g) {
        Ok(eigs) => eigs
            .iter()
            .map(|e| e.re.max(0.0).sqrt())
            .fold(f64::INFINITY, f64::min),
        Err(_) => 0.0,
    }
}

/// Dimension of the joint span of two vector sets.
pub fn union_dim(a: &[Vec<C64>], b: &[Vec<C64>], n: usize) -> usize {
    let mut basis: Vec<Vec<C64>> = Vec::new();
    mgs_extend(&mut basis, a, 1e-8, n);
    mgs_extend(&mut basis, b, 1e-8, n);
    basis.len()
}

/// Singular values and left singular vectors of a real 4x4 matrix by
/// one-sided Jacobi (column orthogonalization), which keeps small
/// singular values accurate instead of flooring them at sqrt(eps) the
/// way the normal-equations route would. Returns singular values in
/// descending order with the matching unit left vectors as columns.
pub fn svd4(m: [[f64; 4]; 4]) -> ([f64; 4], [[f64; 4]; 4]) {
    let mut a = m;
    for _ in 0..60 {
        let mut rotated = false;
        for p in 0..4 {
            for q in p + 1..4 {
                let mut app = 0.0;
                let mut aqq = 0.0;
                let mut apq = 0.0;
                for k in 0..4 {
                    app += a[k][p] * a[k][p];
                    aqq += a[k][q] * a[k][q];
                    apq += a[k][p] * a[k][q];
                }
                if apq.abs() <= 1e-17 * (app * aqq).sqrt() + 1e-300 {
                    continue;
                }
                rotated = true;
                let theta = 0.5 * (2.0 * apq).atan2(app - aqq);
                let (s, c) = theta.sin_cos();
                for k in 0..4 {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp + s * akq;
                    a[k][q] = -s * akp + c * akq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sigmas = [0.0f64; 4];
    let mut left = [[0.0f64; 4]; 4];
    for j in 0..4 {
        let nrm: f64 = (0..4).map(|k| a[k][j] * a[k][j]).sum::<f64>().sqrt();
        sigmas[j] = nrm;
        if nrm > 0.0 {
            for k in 0..4 {
                left[k][j] = a[k][j] / nrm;
            }
        }
    }
    // sort descending, carrying columns along
    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|&i, &j| sigmas[j].partial_cmp(&sigmas[i]).unwrap());
    let mut s_sorted = [0.0f64; 4];
    let mut v_sorted = [[0.0f64; 4]; 4];
    for (dst, &src) in order.iter().enumerate() {
        s_sorted[dst] = sigmas[src];
        for k in 0..4 {
            v_sorted[k][dst] = left[k][src];
        }
    }
    (s_sorted, v_sorted)
}
