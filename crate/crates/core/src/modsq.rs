//! The modulus-squared homomorphism `q -> conj(q) q` from the scalar-plus-S
//! sector onto real matrices: rotations, proper Lorentz transformations,
//! electromagnetic energy-momentum tensors, and nullquat images. Includes
//! the gauge-fixed inverse lift from a proper Lorentz matrix back to a
//! biquaternion.

use crate::alg_core::{decompose, Biquat, Chirality, C64, ONE, ZERO};
use crate::error::Error;
use crate::mink::{classify_lorentz, EMField, LorentzClass, RMat4, Vec4};
use crate::smallmat::svd4;
use crate::Result;

/// Modulus squared `conj(rep(q)) * rep(q)` as a real matrix.
///
/// The product is real because the two chirality copies commute; the
/// imaginary residue stays below 1e-13 relative. Multiplicative:
/// `m(pq) = m(p) m(q)`.
pub fn modulus_squared(q: &Biquat) -> RMat4 {
    let m = q.rep_matrix();
    let prod = m.conj().mul(&m);
    debug_assert!(prod.imag_residue() <= 1e-13 * prod.fro_norm().max(1.0));
    prod.re_part()
}

/// Electromagnetic energy-momentum tensor `T = 1/2 cbarF cF`.
///
/// Real with zero trace; `T u` has time component `(E^2+B^2)/2` and
/// spatial part `E x B` for the default observer.
pub fn energy_momentum(f: &EMField) -> RMat4 {
    let q = f.to_biquat();
    modulus_squared(&q).scale(0.5)
}

const LORENTZ_GATE_TOL: f64 = 1e-8;

/// Gauge-fixed preimage of a proper Lorentz matrix under the modulus
/// squared map.
///
/// The coefficients of `L` in the 16-element basis determine the scalar
/// magnitude and the products `conj(a) b_j`; the remaining unit-modulus
/// phase is fixed so that the biquaternion Lorentz membership
/// `a^2 - lambda^2 = 1` holds exactly, with an overall sign normalized
/// deterministically. Validated by recomposition; a residual above
/// tolerance is an internal alarm, not an input error.
pub fn lift_lorentz(l: &RMat4) -> Result<Biquat> {
    let gate = LORENTZ_GATE_TOL * l.fro_norm().max(1.0);
    if classify_lorentz(l, gate) != LorentzClass::ProperOrthochronous {
        return Err(Error::NotProperLorentz);
    }
    let d = decompose(&l.to_cmat4());
    let c = d.coeffs;
    // |a|^2 from the I coefficient, conj(a) b_j from the x, y, z slots
    let a_mag = c[15].re.max(0.0).sqrt();
    let (a_raw, b_raw) = if a_mag >= 0.5 {
        // dividing by a is well conditioned here; membership forces
        // max(|a|, |b|) to be order one
        let inv = C64::new(1.0 / a_mag, 0.0);
        (C64::new(a_mag, 0.0), [c[0] * inv, c[2] * inv, c[4] * inv])
    } else {
        // small or vanishing scalar part: recover b from the rank-one
        // Gram matrix G[i][j] = conj(b_i) b_j read off the two-letter
        // coefficients, then the scalar from a conj(b_i) on the
        // uppercase slots
        let g = [
            [c[12], c[7], c[10]],
            [c[6], c[13], c[9]],
            [c[11], c[8], c[14]],
        ];
        let diag = [g[0][0].re, g[1][1].re, g[2][2].re];
        let max_diag = diag.iter().cloned().fold(0.0, f64::max);
        if max_diag <= 0.0 {
            return Err(Error::LiftFailed { residual: f64::INFINITY });
        }
        let k = (0..3)
            .find(|&k| diag[k] > 1e-8 * max_diag.max(1.0))
            .unwrap_or(0);
        let bk = diag[k].max(0.0).sqrt();
        let mut b = [ZERO; 3];
        for (j, bj) in b.iter_mut().enumerate() {
            *bj = g[k][j] / C64::new(bk, 0.0);
        }
        // coeff(X_k) = a conj(b0_k); with b = beta b0 this yields the
        // scalar in the same gauge as b
        let upper = [c[1], c[3], c[5]];
        let a = upper[k] / b[k].conj();
        (a, b)
    };
    // membership gauge: rescale by a unit-modulus alpha so that
    // a^2 - b.b = 1 exactly
    let membership = a_raw * a_raw - (b_raw[0] * b_raw[0] + b_raw[1] * b_raw[1] + b_raw[2] * b_raw[2]);
    if membership.norm() < 0.25 {
        return Err(Error::LiftFailed { residual: (membership - ONE).norm() });
    }
    let alpha = ONE / membership.sqrt();
    let mut q = Biquat::new(
        a_raw * alpha,
        [b_raw[0] * alpha, b_raw[1] * alpha, b_raw[2] * alpha],
        Chirality::S,
    );
    q = canonical_sign(q);
    let resid = modulus_squared(&q).sub(l).fro_norm();
    let tol = 1e-9 * l.fro_norm().max(1.0);
    if resid <= tol {
        Ok(q)
    } else {
        Err(Error::LiftFailed { residual: resid })
    }
}

/// Both `q` and `-q` satisfy the membership identity and map to the same
/// matrix; pick the representative whose first significant coordinate has
/// positive real part (imaginary part breaking ties).
fn canonical_sign(q: Biquat) -> Biquat {
    let coords = [q.scalar, q.vector[0], q.vector[1], q.vector[2]];
    let scale = coords.iter().map(|z| z.norm()).fold(0.0, f64::max);
    for z in coords {
        if z.norm() <= 1e-9 * scale {
            continue;
        }
        if z.re.abs() > 1e-9 * scale {
            return if z.re < 0.0 { q.neg() } else { q };
        }
        return if z.im < 0.0 { q.neg() } else { q };
    }
    q
}

/// Image of a nullquat under the modulus squared map, with rank report.
#[derive(Debug, Clone, PartialEq)]
pub struct NullquatImage {
    pub matrix: RMat4,
    pub rank: usize,
    /// Generator of the column space when the rank is one: a real null
    /// eigenvector of the nullquat's pure part.
    pub span: Option<Vec4>,
    /// Set for the zero element, whose image is the zero matrix.
    pub degenerate: bool,
}

/// Modulus-squared image of a nullquat `a I + F` with `a^2 = lambda^2`.
///
/// The image has numerical rank one; its column space is spanned by a
/// real null eigenvector of the pure part.
pub fn nullquat_image(q: &Biquat) -> Result<NullquatImage> {
    let aa = q.vector_dot();
    let a_sq = q.scalar * q.scalar;
    let scale = a_sq.norm().max(aa.norm()).max(1.0);
    let resid = (a_sq - aa).norm();
    if resid > 1e-9 * scale {
        return Err(Error::NotNullquat { residual: resid });
    }
    let m = modulus_squared(q);
    let (sigmas, left) = svd4(m.0);
    let sigma_max = sigmas[0];
    let rank = if sigma_max == 0.0 {
        0
    } else {
        sigmas.iter().filter(|s| **s > 1e-9 * sigma_max).count()
    };
    let span = if rank >= 1 {
        let mut v = [left[0][0], left[1][0], left[2][0], left[3][0]];
        // deterministic orientation
        let lead = v.iter().cloned().max_by(|a, b| a.abs().partial_cmp(&b.abs()).unwrap()).unwrap();
        if lead < 0.0 {
            for e in v.iter_mut() {
                *e = -*e;
            }
        }
        Some(Vec4::new(v[0], v[1], v[2], v[3]))
    } else {
        None
    };
    Ok(NullquatImage { matrix: m, rank, span, degenerate: rank == 0 })
}
