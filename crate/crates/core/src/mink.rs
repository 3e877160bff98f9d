//! Minkowski metric (-+++), observers, the real/dual field decomposition,
//! and Lorentz-membership tests.
//!
//! Index 0 is time; `eta = diag(-1, 1, 1, 1)`. The inner product is
//! complex bilinear (not sesquilinear) when extended to complex vectors.

use crate::alg_core::{Biquat, CMat4, Chirality, C64, ZERO};
use crate::error::Error;
use crate::Result;

/// Absolute tolerance for the observer normalization `<u,u> = -1`.
pub const OBSERVER_TOL: f64 = 1e-9;

/// Real 4-vector `(t, x, y, z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vec4 {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// Complex 4-vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CVec4 {
    pub t: C64,
    pub x: C64,
    pub y: C64,
    pub z: C64,
}

/// Electromagnetic field data: two real 3-vectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EMField {
    pub e: [f64; 3],
    pub b: [f64; 3],
}

/// Dense real 4x4 matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RMat4(pub [[f64; 4]; 4]);

/// The four matrices attached to a field: real part, Hodge dual, and the
/// two complexifications `cF = F - i F*`, `cbarF = F + i F*`.
#[derive(Debug, Clone)]
pub struct FieldMatrices {
    pub f: RMat4,
    pub f_star: RMat4,
    pub c_f: CMat4,
    pub c_bar_f: CMat4,
}

/// Outcome of the Lorentz-membership test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LorentzClass {
    ProperOrthochronous,
    OtherComponent,
    NotLorentz,
}

impl Vec4 {
    pub fn new(t: f64, x: f64, y: f64, z: f64) -> Self {
        assert!(
            t.is_finite() && x.is_finite() && y.is_finite() && z.is_finite(),
            "vector components must be finite"
        );
        Vec4 { t, x, y, z }
    }

    /// The default observer `(1, 0, 0, 0)`.
    pub fn default_observer() -> Self {
        Vec4 { t: 1.0, x: 0.0, y: 0.0, z: 0.0 }
    }

    /// Embed a spatial 3-vector with zero time component.
    pub fn spatial(v: [f64; 3]) -> Self {
        Vec4::new(0.0, v[0], v[1], v[2])
    }

    pub fn minkowski(&self, other: &Vec4) -> f64 {
        -self.t * other.t + self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn add(&self, other: &Vec4) -> Vec4 {
        Vec4 { t: self.t + other.t, x: self.x + other.x, y: self.y + other.y, z: self.z + other.z }
    }

    pub fn scale(&self, s: f64) -> Vec4 {
        Vec4 { t: s * self.t, x: s * self.x, y: s * self.y, z: s * self.z }
    }

    pub fn to_cvec(&self) -> CVec4 {
        CVec4 {
            t: C64::new(self.t, 0.0),
            x: C64::new(self.x, 0.0),
            y: C64::new(self.y, 0.0),
            z: C64::new(self.z, 0.0),
        }
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.t, self.x, self.y, self.z]
    }

    pub fn norm(&self) -> f64 {
        (self.t * self.t + self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub(crate) fn check_observer(&self) -> Result<()> {
        let n = self.minkowski(self);
        if (n + 1.0).abs() <= OBSERVER_TOL {
            Ok(())
        } else {
            Err(Error::NotAnObserver { norm: n })
        }
    }
}

impl CVec4 {
    pub fn from_array(a: [C64; 4]) -> Self {
        CVec4 { t: a[0], x: a[1], y: a[2], z: a[3] }
    }

    pub fn as_array(&self) -> [C64; 4] {
        [self.t, self.x, self.y, self.z]
    }

    /// Largest imaginary magnitude over the components.
    pub fn imag_residue(&self) -> f64 {
        self.as_array().iter().map(|e| e.im.abs()).fold(0.0, f64::max)
    }

    pub fn re(&self) -> Vec4 {
        Vec4 { t: self.t.re, x: self.x.re, y: self.y.re, z: self.z.re }
    }
}

/// Complex-bilinear Minkowski inner product with signature -+++.
pub fn minkowski_inner(a: &CVec4, b: &CVec4) -> C64 {
    -a.t * b.t + a.x * b.x + a.y * b.y + a.z * b.z
}

impl EMField {
    pub fn new(e: [f64; 3], b: [f64; 3]) -> Self {
        assert!(
            e.iter().chain(b.iter()).all(|v| v.is_finite()),
            "field components must be finite"
        );
        EMField { e, b }
    }

    pub fn zero() -> Self {
        EMField { e: [0.0; 3], b: [0.0; 3] }
    }

    pub fn is_zero(&self) -> bool {
        self.e.iter().chain(self.b.iter()).all(|v| *v == 0.0)
    }

    pub fn e_sq(&self) -> f64 {
        dot3(self.e, self.e)
    }

    pub fn b_sq(&self) -> f64 {
        dot3(self.b, self.b)
    }

    pub fn e_dot_b(&self) -> f64 {
        dot3(self.e, self.b)
    }

    pub fn poynting(&self) -> [f64; 3] {
        cross3(self.e, self.b)
    }

    /// The pure `S`-chirality biquaternion with vector part `E + iB`.
    pub fn to_biquat(&self) -> Biquat {
        let v = [
            C64::new(self.e[0], self.b[0]),
            C64::new(self.e[1], self.b[1]),
            C64::new(self.e[2], self.b[2]),
        ];
        Biquat::pure(v, Chirality::S)
    }
}

pub fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// so(3,1) element assembled from its electric and magnetic parts:
/// top row `(0, E^T)`, left column `(0, E)`, spatial block `v -> v x B`.
pub fn so31_matrix(e: [f64; 3], b: [f64; 3]) -> RMat4 {
    let mut m = [[0.0; 4]; 4];
    for k in 0..3 {
        m[0][k + 1] = e[k];
        m[k + 1][0] = e[k];
    }
    m[1][2] = b[2];
    m[1][3] = -b[1];
    m[2][1] = -b[2];
    m[2][3] = b[0];
    m[3][1] = b[1];
    m[3][2] = -b[0];
    RMat4(m)
}

/// The real part, Hodge dual, and complexifications of a field.
pub fn field_matrices(f: &EMField) -> FieldMatrices {
    let fr = so31_matrix(f.e, f.b);
    let fs = so31_matrix([-f.b[0], -f.b[1], -f.b[2]], f.e);
    let i = C64::new(0.0, 1.0);
    let c_f = fr.to_cmat4().add(&fs.to_cmat4().scale(-i));
    let c_bar_f = fr.to_cmat4().add(&fs.to_cmat4().scale(i));
    FieldMatrices { f: fr, f_star: fs, c_f, c_bar_f }
}

/// Classify a real matrix against the Lorentz group: checks
/// `|L^T eta L - eta| <= tol`, then `det L > 0` and `L[0][0] >= 1 - tol`
/// for the identity component.
pub fn classify_lorentz(l: &RMat4, tol: f64) -> LorentzClass {
    assert!(tol > 0.0, "tolerance must be positive");
    let eta = RMat4::eta();
    let resid = l.transpose().mul(&eta).mul(l).sub(&eta).fro_norm();
    if resid > tol {
        return LorentzClass::NotLorentz;
    }
    if l.det() > 0.0 && l.0[0][0] >= 1.0 - tol {
        LorentzClass::ProperOrthochronous
    } else {
        LorentzClass::OtherComponent
    }
}

/// Boost the observer `u` by the velocity `w` given in the coordinate
/// rest frame: `u' = (u + w) / sqrt(1 - w^2)`.
///
/// `w` is promoted to a 4-vector with zero time component, so it must lie
/// in the rest space of `u` for the result to be normalized (always true
/// for the default observer).
pub fn boost_observer(u: &Vec4, w: [f64; 3]) -> Result<Vec4> {
    u.check_observer()?;
    let w_sq = dot3(w, w);
    if w_sq >= 1.0 {
        return Err(Error::SpeedNotSubluminal { speed: w_sq.sqrt() });
    }
    let gamma = 1.0 / (1.0 - w_sq).sqrt();
    Ok(u.add(&Vec4::spatial(w)).scale(gamma))
}

impl RMat4 {
    pub fn zero() -> Self {
        RMat4([[0.0; 4]; 4])
    }

    pub fn identity() -> Self {
        let mut m = [[0.0; 4]; 4];
        for k in 0..4 {
            m[k][k] = 1.0;
        }
        RMat4(m)
    }

    /// The metric `diag(-1, 1, 1, 1)`.
    pub fn eta() -> Self {
        let mut m = RMat4::identity();
        m.0[0][0] = -1.0;
        m
    }

    pub fn add(&self, other: &RMat4) -> RMat4 {
        let mut m = [[0.0; 4]; 4];
        for r in 0..4 {
            for c in 0..4 {
                m[r][c] = self.0[r][c] + other.0[r][c];
            }
        }
        RMat4(m)
    }

    pub fn sub(&self, other: &RMat4) -> RMat4 {
        let mut m = [[0.0; 4]; 4];
        for r in 0..4 {
            for c in 0..4 {
                m[r][c] = self.0[r][c] - other.0[r][c];
            }
        }
        RMat4(m)
    }

    pub fn mul(&self, other: &RMat4) -> RMat4 {
        let mut m = [[0.0; 4]; 4];
        for r in 0..4 {
            for c in 0..4 {
                let mut acc = 0.0;
                for k in 0..4 {
                    acc += self.0[r][k] * other.0[k][c];
                }
                m[r][c] = acc;
            }
        }
        RMat4(m)
    }

    pub fn scale(&self, s: f64) -> RMat4 {
        let mut m = self.0;
        for row in m.iter_mut() {
            for e in row.iter_mut() {
                *e *= s;
            }
        }
        RMat4(m)
    }

    pub fn transpose(&self) -> RMat4 {
        let mut m = [[0.0; 4]; 4];
        for r in 0..4 {
            for c in 0..4 {
                m[r][c] = self.0[c][r];
            }
        }
        RMat4(m)
    }

    pub fn trace(&self) -> f64 {
        (0..4).map(|k| self.0[k][k]).sum()
    }

    pub fn fro_norm(&self) -> f64 {
        self.0
            .iter()
            .flat_map(|row| row.iter())
            .map(|e| e * e)
            .sum::<f64>()
            .sqrt()
    }

    pub fn apply(&self, v: &Vec4) -> Vec4 {
        let a = v.as_array();
        let mut out = [0.0; 4];
        for r in 0..4 {
            for c in 0..4 {
                out[r] += self.0[r][c] * a[c];
            }
        }
        Vec4 { t: out[0], x: out[1], y: out[2], z: out[3] }
    }

    pub fn det(&self) -> f64 {
        let m = &self.0;
        let det3 = |a: [[f64; 3]; 3]| -> f64 {
            a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
                - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
                + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
        };
        let minor = |col: usize| -> [[f64; 3]; 3] {
            let mut out = [[0.0; 3]; 3];
            for r in 1..4 {
                let mut cc = 0;
                for c in 0..4 {
                    if c == col {
                        continue;
                    }
                    out[r - 1][cc] = m[r][c];
                    cc += 1;
                }
            }
            out
        };
        let mut acc = 0.0;
        let mut sign = 1.0;
        for c in 0..4 {
            acc += sign * m[0][c] * det3(minor(c));
            sign = -sign;
        }
        acc
    }

    pub fn to_cmat4(&self) -> CMat4 {
        let mut m = [[ZERO; 4]; 4];
        for r in 0..4 {
            for c in 0..4 {
                m[r][c] = C64::new(self.0[r][c], 0.0);
            }
        }
        CMat4(m)
    }
}

impl CMat4 {
    /// Real part as a real matrix.
    pub fn re_part(&self) -> RMat4 {
        let mut m = [[0.0; 4]; 4];
        for r in 0..4 {
            for c in 0..4 {
                m[r][c] = self.0[r][c].re;
            }
        }
        RMat4(m)
    }
}
