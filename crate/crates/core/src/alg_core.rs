//! The 4x4 matrix representation of the biquaternions.
//!
//! A biquaternion is stored as a complex scalar part plus a complex
//! 3-vector part together with a chirality flag selecting one of the two
//! commuting pure-vector copies `S` and `SBar` inside `M4(C)`. The matrix
//! carrier is materialized on demand by [`Biquat::rep_matrix`]; the eight
//! complex numbers are the canonical coordinates.

use num_complex::Complex64;

use crate::error::Error;
use crate::smallmat::CMatN;
use crate::Result;

/// Scalar field of the representation.
pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Which of the two commuting pure-vector copies an element lives in.
///
/// `S` carries the cross-product block `v -> v x (-iA)`, `SBar` the
/// conjugate block `v -> v x (+iA)`. The two copies are entrywise complex
/// conjugates of each other and commute elementwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Chirality {
    S,
    SBar,
}

/// A biquaternion `a0*I + F` in coordinates: scalar part, vector part,
/// chirality of the vector part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Biquat {
    pub scalar: C64,
    pub vector: [C64; 3],
    pub chirality: Chirality,
}

/// Dense 4x4 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CMat4(pub [[C64; 4]; 4]);

/// Coefficients of a matrix in the 16-element basis, in the fixed order
/// x, X, y, Y, z, Z, xY, yX, yZ, zY, zX, xZ, xX, yY, zZ, I.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisDecomp {
    pub coeffs: [C64; 16],
}

/// Names of the 16 basis matrices in decomposition order.
pub const BASIS_NAMES: [&str; 16] = [
    "x", "X", "y", "Y", "z", "Z", "xY", "yX", "yZ", "zY", "zX", "xZ", "xX", "yY", "zZ", "I",
];

impl Biquat {
    /// Build a biquaternion from finite components.
    ///
    /// Panics if any component is NaN or infinite; the public constructors
    /// admit only finite coordinates.
    pub fn new(scalar: C64, vector: [C64; 3], chirality: Chirality) -> Self {
        let finite = |z: &C64| z.re.is_finite() && z.im.is_finite();
        assert!(
            finite(&scalar) && vector.iter().all(finite),
            "biquaternion components must be finite"
        );
        Biquat { scalar, vector, chirality }
    }

    /// Pure-vector element (zero scalar part).
    pub fn pure(vector: [C64; 3], chirality: Chirality) -> Self {
        Self::new(ZERO, vector, chirality)
    }

    /// The multiplicative identity in either copy.
    pub fn identity(chirality: Chirality) -> Self {
        Self::new(ONE, [ZERO; 3], chirality)
    }

    /// Complex bilinear dot product of the vector part with itself.
    /// Its square roots are the eigenvalue offsets of the element.
    pub fn vector_dot(&self) -> C64 {
        self.vector.iter().map(|a| a * a).sum()
    }

    /// Euclidean norm of the coordinate vector (scalar plus vector parts).
    pub fn norm(&self) -> f64 {
        (self.scalar.norm_sqr() + self.vector.iter().map(|a| a.norm_sqr()).sum::<f64>()).sqrt()
    }

    pub fn neg(&self) -> Self {
        Biquat {
            scalar: -self.scalar,
            vector: [-self.vector[0], -self.vector[1], -self.vector[2]],
            chirality: self.chirality,
        }
    }

    pub fn scale(&self, alpha: C64) -> Self {
        Biquat {
            scalar: alpha * self.scalar,
            vector: [alpha * self.vector[0], alpha * self.vector[1], alpha * self.vector[2]],
            chirality: self.chirality,
        }
    }

    /// Materialize the representing matrix `a0*I + F`.
    ///
    /// `F` has first row `(0, A^T)`, first column `(0, A)`, and spatial
    /// block `v -> v x (-iA)` for chirality `S`, `v -> v x (+iA)` for
    /// `SBar`.
    pub fn rep_matrix(&self) -> CMat4 {
        let a = self.vector;
        let i = C64::new(0.0, 1.0);
        let s = match self.chirality {
            Chirality::S => -i,
            Chirality::SBar => i,
        };
        // cross-product matrix of w = s*A: rows [[0,w3,-w2],[-w3,0,w1],[w2,-w1,0]]
        let w = [s * a[0], s * a[1], s * a[2]];
        let mut m = [[ZERO; 4]; 4];
        for k in 0..4 {
            m[k][k] = self.scalar;
        }
        for k in 0..3 {
            m[0][k + 1] = a[k];
            m[k + 1][0] = a[k];
        }
        m[1][2] += w[2];
        m[1][3] += -w[1];
        m[2][1] += -w[2];
        m[2][3] += w[0];
        m[3][1] += w[1];
        m[3][2] += -w[0];
        CMat4(m)
    }

    /// Read a biquaternion back off its representing matrix.
    ///
    /// The scalar part comes from entry (0,0) and the vector part from the
    /// first column; the reconstruction must reproduce `m` with relative
    /// residual at most 1e-10 or the matrix is rejected as not being in
    /// the chosen copy.
    pub fn from_matrix(m: &CMat4, chirality: Chirality) -> Result<Self> {
        let scalar = m.0[0][0];
        let vector = [m.0[1][0], m.0[2][0], m.0[3][0]];
        let q = Biquat { scalar, vector, chirality };
        let residual = q.rep_matrix().sub(m).fro_norm();
        if residual <= 1e-10 * m.fro_norm() {
            Ok(q)
        } else {
            Err(Error::NotInRepresentation { residual })
        }
    }

    /// Product of two biquaternions of the same chirality, in closed form.
    ///
    /// For pure parts F, G with vector parts A, B the product is
    /// `(a0*b0 + A.B) I + (b0 A + a0 B +- i A x B)` with the sign of the
    /// cross term fixed by the chirality. Agrees with the dense matrix
    /// product of the representations.
    pub fn try_mul(&self, other: &Biquat) -> Result<Biquat> {
        if self.chirality != other.chirality {
            return Err(Error::ChiralityMismatch);
        }
        let i = C64::new(0.0, 1.0);
        let s = match self.chirality {
            Chirality::S => i,
            Chirality::SBar => -i,
        };
        let a = self.vector;
        let b = other.vector;
        let dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
        let cross = [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ];
        let scalar = self.scalar * other.scalar + dot;
        let mut vector = [ZERO; 3];
        for k in 0..3 {
            vector[k] = other.scalar * a[k] + self.scalar * b[k] + s * cross[k];
        }
        Ok(Biquat { scalar, vector, chirality: self.chirality })
    }

    /// Entrywise complex conjugation; swaps the chirality and conjugates
    /// the coordinates.
    pub fn conj(&self) -> Biquat {
        Biquat {
            scalar: self.scalar.conj(),
            vector: [self.vector[0].conj(), self.vector[1].conj(), self.vector[2].conj()],
            chirality: match self.chirality {
                Chirality::S => Chirality::SBar,
                Chirality::SBar => Chirality::S,
            },
        }
    }
}

impl CMat4 {
    pub fn zero() -> Self {
        CMat4([[ZERO; 4]; 4])
    }

    pub fn identity() -> Self {
        let mut m = [[ZERO; 4]; 4];
        for k in 0..4 {
            m[k][k] = ONE;
        }
        CMat4(m)
    }

    pub fn add(&self, other: &CMat4) -> CMat4 {
        let mut m = [[ZERO; 4]; 4];
        for r in 0..4 {
            for c in 0..4 {
                m[r][c] = self.0[r][c] + other.0[r][c];
            }
        }
        CMat4(m)
    }

    pub fn sub(&self, other: &CMat4) -> CMat4 {
        let mut m = [[ZERO; 4]; 4];
        for r in 0..4 {
            for c in 0..4 {
                m[r][c] = self.0[r][c] - other.0[r][c];
            }
        }
        CMat4(m)
    }

    pub fn mul(&self, other: &CMat4) -> CMat4 {
        let mut m = [[ZERO; 4]; 4];
        for r in 0..4 {
            for c in 0..4 {
                let mut acc = ZERO;
                for k in 0..4 {
                    acc += self.0[r][k] * other.0[k][c];
                }
                m[r][c] = acc;
            }
        }
        CMat4(m)
    }

    pub fn scale(&self, alpha: C64) -> CMat4 {
        let mut m = self.0;
        for row in m.iter_mut() {
            for e in row.iter_mut() {
                *e *= alpha;
            }
        }
        CMat4(m)
    }

    pub fn conj(&self) -> CMat4 {
        let mut m = self.0;
        for row in m.iter_mut() {
            for e in row.iter_mut() {
                *e = e.conj();
            }
        }
        CMat4(m)
    }

    pub fn transpose(&self) -> CMat4 {
        let mut m = [[ZERO; 4]; 4];
        for r in 0..4 {
            for c in 0..4 {
                m[r][c] = self.0[c][r];
            }
        }
        CMat4(m)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> CMat4 {
        self.transpose().conj()
    }

    pub fn trace(&self) -> C64 {
        (0..4).map(|k| self.0[k][k]).sum()
    }

    pub fn fro_norm(&self) -> f64 {
        self.0
            .iter()
            .flat_map(|row| row.iter())
            .map(|e| e.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flat_map(|row| row.iter())
            .map(|e| e.norm())
            .fold(0.0, f64::max)
    }

    pub fn apply(&self, v: [C64; 4]) -> [C64; 4] {
        let mut out = [ZERO; 4];
        for r in 0..4 {
            for c in 0..4 {
                out[r] += self.0[r][c] * v[c];
            }
        }
        out
    }

    /// Largest imaginary magnitude over the entries.
    pub fn imag_residue(&self) -> f64 {
        self.0
            .iter()
            .flat_map(|row| row.iter())
            .map(|e| e.im.abs())
            .fold(0.0, f64::max)
    }

    pub(crate) fn to_cmatn(&self) -> CMatN {
        let mut m = CMatN::zero(4);
        for r in 0..4 {
            for c in 0..4 {
                m.set(r, c, self.0[r][c]);
            }
        }
        m
    }
}

/// The 16 basis matrices of `M4(C)` in decomposition order.
///
/// Single letters are the pure generators (lowercase in `S`, uppercase in
/// `SBar`), two-letter entries are their products. Every entry squares to
/// the identity, is Hermitian, and is traceless except for `I` itself.
pub fn basis16() -> [CMat4; 16] {
    let x = Biquat::pure([ONE, ZERO, ZERO], Chirality::S).rep_matrix();
    let y = Biquat::pure([ZERO, ONE, ZERO], Chirality::S).rep_matrix();
    let z = Biquat::pure([ZERO, ZERO, ONE], Chirality::S).rep_matrix();
    let xc = Biquat::pure([ONE, ZERO, ZERO], Chirality::SBar).rep_matrix();
    let yc = Biquat::pure([ZERO, ONE, ZERO], Chirality::SBar).rep_matrix();
    let zc = Biquat::pure([ZERO, ZERO, ONE], Chirality::SBar).rep_matrix();
    [
        x,
        xc,
        y,
        yc,
        z,
        zc,
        x.mul(&yc),
        y.mul(&xc),
        y.mul(&zc),
        z.mul(&yc),
        z.mul(&xc),
        x.mul(&zc),
        x.mul(&xc),
        y.mul(&yc),
        z.mul(&zc),
        CMat4::identity(),
    ]
}

/// Solve for the coefficients of `m` in the 16-element basis.
///
/// Stacks each basis matrix column-major into a 16x16 system; the basis
/// spans, so the system is square nonsingular. Recomposition reproduces
/// the input to 1e-12 relative.
pub fn decompose(m: &CMat4) -> BasisDecomp {
    let basis = basis16();
    let mut a = CMatN::zero(16);
    for (j, b) in basis.iter().enumerate() {
        for c in 0..4 {
            for r in 0..4 {
                a.set(c * 4 + r, j, b.0[r][c]);
            }
        }
    }
    let mut rhs = [ZERO; 16];
    for c in 0..4 {
        for r in 0..4 {
            rhs[c * 4 + r] = m.0[r][c];
        }
    }
    let sol = crate::smallmat::solve(&a, &rhs).expect("16-element basis is nonsingular");
    let mut coeffs = [ZERO; 16];
    coeffs.copy_from_slice(&sol);
    BasisDecomp { coeffs }
}

/// Reassemble a matrix from basis coefficients.
pub fn recompose(d: &BasisDecomp) -> CMat4 {
    let basis = basis16();
    let mut m = CMat4::zero();
    for (c, b) in d.coeffs.iter().zip(basis.iter()) {
        m = m.add(&b.scale(*c));
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn x_matrix_matches_displayed_form() {
        let x = Biquat::pure([ONE, ZERO, ZERO], Chirality::S).rep_matrix();
        let i = c(0.0, 1.0);
        let expect = CMat4([
            [ZERO, ONE, ZERO, ZERO],
            [ONE, ZERO, ZERO, ZERO],
            [ZERO, ZERO, ZERO, -i],
            [ZERO, ZERO, i, ZERO],
        ]);
        assert_eq!(x, expect);
    }

    #[test]
    fn identity_case() {
        let q = Biquat::new(ONE, [ZERO; 3], Chirality::S);
        assert_eq!(q.rep_matrix(), CMat4::identity());
    }

    #[test]
    fn sbar_is_entrywise_conjugate_of_s() {
        let a = [c(0.3, -0.7), c(1.2, 0.4), c(-0.5, 0.9)];
        let ac = [a[0].conj(), a[1].conj(), a[2].conj()];
        let s = Biquat::pure(ac, Chirality::S).rep_matrix();
        let sbar = Biquat::pure(a, Chirality::SBar).rep_matrix();
        assert!(sbar.sub(&s.conj()).fro_norm() < 1e-15);
        // and for real vector parts, SBar is exactly conj(S at same vector)
        let b = [ONE, c(2.0, 0.0), c(-1.0, 0.0)];
        let sb = Biquat::pure(b, Chirality::SBar).rep_matrix();
        assert_eq!(sb, Biquat::pure(b, Chirality::S).rep_matrix().conj());
    }

    #[test]
    fn basis_products_xy_iz() {
        let b = basis16();
        let (x, y, z) = (b[0], b[2], b[4]);
        let iz = z.scale(c(0.0, 1.0));
        assert_eq!(x.mul(&y), iz);
        // xy = -yx
        assert_eq!(x.mul(&y), y.mul(&x).scale(c(-1.0, 0.0)));
    }

    #[test]
    fn basis_squares_hermitian_traceless() {
        for (k, b) in basis16().iter().enumerate() {
            assert_eq!(b.mul(b), CMat4::identity(), "basis {k} squared");
            assert_eq!(*b, b.adjoint(), "basis {k} hermitian");
            if k != 15 {
                assert_eq!(b.trace(), ZERO, "basis {k} trace");
            } else {
                assert_eq!(b.trace(), c(4.0, 0.0));
            }
        }
    }

    #[test]
    fn decompose_basis_element() {
        let b = basis16();
        let d = decompose(&b[0]);
        for (k, coeff) in d.coeffs.iter().enumerate() {
            let expect = if k == 0 { ONE } else { ZERO };
            assert!((coeff - expect).norm() < 1e-13, "coeff {k} = {coeff}");
        }
    }

    #[test]
    fn decompose_product_xy() {
        let b = basis16();
        let d = decompose(&b[0].mul(&b[2]));
        for (k, coeff) in d.coeffs.iter().enumerate() {
            let expect = if k == 4 { c(0.0, 1.0) } else { ZERO };
            assert!((coeff - expect).norm() < 1e-13, "coeff {k} = {coeff}");
        }
    }

    #[test]
    fn mul_x_squared_is_identity() {
        let q = Biquat::pure([ONE, ZERO, ZERO], Chirality::S);
        let p = q.try_mul(&q).unwrap();
        assert_eq!(p, Biquat::identity(Chirality::S));
    }

    #[test]
    fn mul_identity_is_neutral() {
        let q = Biquat::new(c(0.2, 0.5), [c(1.0, -1.0), c(0.0, 2.0), c(3.0, 0.1)], Chirality::SBar);
        let e = Biquat::identity(Chirality::SBar);
        assert_eq!(e.try_mul(&q).unwrap(), q);
        assert_eq!(q.try_mul(&e).unwrap(), q);
    }

    #[test]
    fn mul_matches_dense_product() {
        let p = Biquat::pure([ONE, ZERO, ZERO], Chirality::S);
        let q = Biquat::pure([ZERO, ONE, ZERO], Chirality::S);
        let prod = p.try_mul(&q).unwrap();
        assert_eq!(prod.scalar, ZERO);
        let dense = p.rep_matrix().mul(&q.rep_matrix());
        assert!(prod.rep_matrix().sub(&dense).fro_norm() < 1e-14);
    }

    #[test]
    fn mul_rejects_mixed_chirality() {
        let p = Biquat::pure([ONE, ZERO, ZERO], Chirality::S);
        let q = Biquat::pure([ONE, ZERO, ZERO], Chirality::SBar);
        assert_eq!(p.try_mul(&q), Err(Error::ChiralityMismatch));
    }

    #[test]
    fn from_matrix_round_trip() {
        let q = Biquat::new(c(1.5, -0.25), [c(0.5, 1.0), c(-2.0, 0.0), c(0.0, 3.0)], Chirality::S);
        let back = Biquat::from_matrix(&q.rep_matrix(), Chirality::S).unwrap();
        assert_eq!(back, q);
        assert_eq!(
            Biquat::from_matrix(&CMat4::identity(), Chirality::SBar).unwrap(),
            Biquat::identity(Chirality::SBar)
        );
    }

    #[test]
    fn from_matrix_sum_of_generators() {
        let b = basis16();
        let sum = b[0].add(&b[2]);
        let q = Biquat::from_matrix(&sum, Chirality::S).unwrap();
        assert_eq!(q, Biquat::pure([ONE, ONE, ZERO], Chirality::S));
    }

    #[test]
    fn from_matrix_rejects_foreign_matrix() {
        // X is in SBar, not S
        let xc = basis16()[1];
        assert!(matches!(
            Biquat::from_matrix(&xc, Chirality::S),
            Err(Error::NotInRepresentation { .. })
        ));
    }

    #[test]
    fn minkowski_skew_invariant() {
        // F^T = -eta F eta for the pure part of either copy
        let eta = CMat4([
            [c(-1.0, 0.0), ZERO, ZERO, ZERO],
            [ZERO, ONE, ZERO, ZERO],
            [ZERO, ZERO, ONE, ZERO],
            [ZERO, ZERO, ZERO, ONE],
        ]);
        for chir in [Chirality::S, Chirality::SBar] {
            let f = Biquat::pure([c(0.4, 0.2), c(-1.0, 0.6), c(0.3, -0.9)], chir).rep_matrix();
            let lhs = f.transpose();
            let rhs = eta.mul(&f).mul(&eta).scale(c(-1.0, 0.0));
            assert!(lhs.sub(&rhs).fro_norm() < 1e-14);
        }
    }
}
