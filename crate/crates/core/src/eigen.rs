//! Closed-form eigenvalues and real eigenvectors of so(3,1) elements,
//! spectral classification of biquaternions, nullquat eigenspaces, and
//! two quantum-probability formulas expressed as Minkowski inner products
//! of eigenvectors.

use crate::alg_core::{Biquat, CMat4, C64, ZERO};
use crate::error::Error;
use crate::mink::{dot3, field_matrices, minkowski_inner, CVec4, EMField, Vec4};
use crate::smallmat;
use crate::Result;

/// The eigenvalue bundle of an so(3,1) element.
///
/// `lambda_t` is the energy-momentum eigenvalue, `lambda_f` the chosen
/// nonnegative eigenvalue of the real part, `lambda_f_star` the paired
/// eigenvalue of the dual. The complexification's eigenvalue is
/// `lambda_f - i lambda_f_star` and squares to `A.A`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenData {
    pub lambda_t: f64,
    pub lambda_f: f64,
    pub lambda_f_star: f64,
    /// Set when the field is identically zero; every direction is then an
    /// eigenvector and the formulas below return the zero vector.
    pub degenerate: bool,
}

impl EigenData {
    /// Eigenvalue of the complexification, `lambda_f - i lambda_f_star`.
    pub fn lambda_cf(&self) -> C64 {
        C64::new(self.lambda_f, -self.lambda_f_star)
    }
}

/// Eigenspace structure of a biquaternion, keyed on the vector part.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectralCase {
    /// `A.A != 0`: eigenvalues `a0 +- lambda`, each with a 2-dim eigenspace.
    TwoEigenvaluesGeneric,
    /// `A.A = 0`, `A != 0`: single eigenvalue `a0` with a 2-dim eigenspace.
    NullDegenerate,
    /// `A = 0`: scalar matrix, every vector is an eigenvector.
    ScalarOnly,
}

/// A real eigenvector together with the zero-field degeneracy flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigvec {
    pub s: Vec4,
    pub degenerate: bool,
}

/// Two columns spanning a 2-dimensional eigenspace.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenspaceBasis {
    pub vectors: [CVec4; 2],
    /// True for scalar elements, where the eigenspace is all of C^4 and
    /// the returned canonical pair is not unique.
    pub non_unique: bool,
}

/// Closed-form eigenvalues of the field matrices.
///
/// `lambda_t = sqrt(((E^2-B^2)/2)^2 + (E.B)^2)`,
/// `lambda_f = +sqrt(lambda_t + (E^2-B^2)/2)`, and the sign of
/// `lambda_f_star` is fixed by `lambda_f * lambda_f_star = -E.B`, which
/// makes `lambda_cf^2 = A.A` hold for `A = E + iB`. Radicands that dip
/// below zero by floating-point dust are clamped at zero.
pub fn eigenvalues_em(f: &EMField) -> EigenData {
    let half_diff = 0.5 * (f.e_sq() - f.b_sq());
    let eb = f.e_dot_b();
    let lambda_t = (half_diff * half_diff + eb * eb).sqrt();
    let clamp = |r: f64| if r > 0.0 { r.sqrt() } else { 0.0 };
    let lambda_f = clamp(lambda_t + half_diff);
    let mag_star = clamp(lambda_t - half_diff);
    let lambda_f_star = if eb > 0.0 { -mag_star } else { mag_star };
    EigenData { lambda_t, lambda_f, lambda_f_star, degenerate: f.is_zero() }
}

fn joint_eigenvector(f: &EMField, u: &Vec4, flip_sign: bool) -> Result<Eigvec> {
    u.check_observer()?;
    let ev = eigenvalues_em(f);
    if ev.degenerate {
        return Ok(Eigvec { s: Vec4::new(0.0, 0.0, 0.0, 0.0), degenerate: true });
    }
    let fm = field_matrices(f);
    let sign = if flip_sign { -1.0 } else { 1.0 };
    let l_cf = ev.lambda_cf() * sign;
    let l_cbar = l_cf.conj();
    // s = (l_cf I + cF)(l_cbar I + cbarF) u; real because the factors
    // commute and u is real
    let mut a = fm.c_f;
    let mut b = fm.c_bar_f;
    for k in 0..4 {
        a.0[k][k] += l_cf;
        b.0[k][k] += l_cbar;
    }
    let uc = u.to_cvec().as_array();
    let s = a.apply(b.apply(uc));
    let sv = CVec4::from_array(s);
    debug_assert!(sv.imag_residue() <= 1e-9 * (1.0 + sv.re().norm()));
    Ok(Eigvec { s: sv.re(), degenerate: false })
}

/// Canonical joint eigenvector as seen by observer `u`: for the default
/// observer it reduces to
/// `s = 2((lambda_t + (E^2+B^2)/2) u + ExB + lambda_f E - lambda_f_star B)`
/// and satisfies `F s = lambda_f s`, `F* s = lambda_f_star s`,
/// `T s = lambda_t s` simultaneously.
pub fn principal_eigenvector(f: &EMField, u: &Vec4) -> Result<Eigvec> {
    joint_eigenvector(f, u, false)
}

/// Companion eigenvector with the signs of `lambda_f`, `lambda_f_star`
/// flipped; satisfies `F s = -lambda_f s`. Coincides with the principal
/// one for null fields, which carry a single real null eigendirection.
pub fn negative_eigenvector(f: &EMField, u: &Vec4) -> Result<Eigvec> {
    joint_eigenvector(f, u, true)
}

/// Relative threshold deciding when `A.A` counts as zero.
const NULL_TOL: f64 = 1e-12;

/// Classify the eigenspace structure from the vector part.
pub fn classify(q: &Biquat) -> SpectralCase {
    let norm_sq: f64 = q.vector.iter().map(|a| a.norm_sqr()).sum();
    if norm_sq == 0.0 {
        return SpectralCase::ScalarOnly;
    }
    let aa = q.vector_dot();
    if aa.norm() <= NULL_TOL * norm_sq {
        SpectralCase::NullDegenerate
    } else {
        SpectralCase::TwoEigenvaluesGeneric
    }
}

/// Two independent columns spanning the eigenspace of `rep_matrix(q)` for
/// the eigenvalue `lambda`.
///
/// The eigenspace is the image of `(lambda - a0) I + F`, which has rank
/// two both in the generic and in the nullquat case. Scalar elements are
/// flagged: the eigenspace is all of C^4 and the canonical pair returned
/// is not unique.
pub fn eigenspace_basis(q: &Biquat, lambda: C64) -> Result<EigenspaceBasis> {
    let nu = lambda - q.scalar;
    let aa = q.vector_dot();
    let norm_sq: f64 = q.vector.iter().map(|a| a.norm_sqr()).sum();
    let scale = norm_sq.max(nu.norm_sqr()).max(1.0);
    if norm_sq == 0.0 {
        if nu.norm_sqr() > 1e-16 * scale {
            return Err(Error::NotAnEigenvalue { re: lambda.re, im: lambda.im });
        }
        let e0 = CVec4::from_array([C64::new(1.0, 0.0), ZERO, ZERO, ZERO]);
        let e1 = CVec4::from_array([ZERO, C64::new(1.0, 0.0), ZERO, ZERO]);
        return Ok(EigenspaceBasis { vectors: [e0, e1], non_unique: true });
    }
    if (nu * nu - aa).norm() > 1e-8 * scale {
        return Err(Error::NotAnEigenvalue { re: lambda.re, im: lambda.im });
    }
    let shifted = Biquat::new(nu, q.vector, q.chirality).rep_matrix();
    let cols = smallmat::image_basis(&shifted.to_cmatn(), 1e-9);
    if cols.len() != 2 {
        // rank should be exactly two here; anything else means the input
        // was not really an eigenvalue within tolerance
        return Err(Error::NotAnEigenvalue { re: lambda.re, im: lambda.im });
    }
    let v0 = CVec4::from_array([cols[0][0], cols[0][1], cols[0][2], cols[0][3]]);
    let v1 = CVec4::from_array([cols[1][0], cols[1][1], cols[1][2], cols[1][3]]);
    Ok(EigenspaceBasis { vectors: [v0, v1], non_unique: false })
}

fn check_unit(v: [f64; 3]) -> Result<()> {
    let n = dot3(v, v).sqrt();
    if (n - 1.0).abs() <= 1e-9 {
        Ok(())
    } else {
        Err(Error::NotUnitSpatial { norm: n })
    }
}

/// Probability of measuring spin +1/2 along `w` for a particle whose spin
/// points along `v`, both unit vectors in the rest space of `u`:
/// `-1/2 <u + v, u + w> = sin^2(theta/2)` with `cos(theta) = v.w`.
pub fn spin_probability(u: &Vec4, v: [f64; 3], w: [f64; 3]) -> Result<f64> {
    u.check_observer()?;
    check_unit(v)?;
    check_unit(w)?;
    let a = u.add(&Vec4::spatial(v)).to_cvec();
    let b = u.add(&Vec4::spatial(w)).to_cvec();
    let p = -0.5 * minkowski_inner(&a, &b).re;
    Ok(p.clamp(0.0, 1.0))
}

/// Angular distribution of beta-decay electrons with speed `v` in a
/// magnetic field along the unit vector `b_dir`:
/// `-<sqrt(1-v^2) u', u + b_dir> = 1 - v cos(theta)`.
pub fn beta_decay_distribution(u: &Vec4, v: [f64; 3], b_dir: [f64; 3]) -> Result<f64> {
    u.check_observer()?;
    check_unit(b_dir)?;
    let v_sq = dot3(v, v);
    if v_sq >= 1.0 {
        return Err(Error::SpeedNotSubluminal { speed: v_sq.sqrt() });
    }
    // sqrt(1-v^2) u' = u + v, so the inner product needs no gamma factor
    let a = u.add(&Vec4::spatial(v)).to_cvec();
    let b = u.add(&Vec4::spatial(b_dir)).to_cvec();
    Ok(-minkowski_inner(&a, &b).re)
}

/// Residual helper shared by tests: max of `|M s - lambda s|` components.
pub fn eigen_residual(m: &CMat4, s: &Vec4, lambda: f64) -> f64 {
    let sv = s.to_cvec().as_array();
    let ms = m.apply(sv);
    (0..4)
        .map(|k| (ms[k] - lambda * sv[k]).norm())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alg_core::Chirality;
    use crate::modsq::energy_momentum;

    const ONE: C64 = C64::new(1.0, 0.0);
    const I: C64 = C64::new(0.0, 1.0);

    #[test]
    fn pure_electric_eigenvalues() {
        let ev = eigenvalues_em(&EMField::new([1.0, 0.0, 0.0], [0.0; 3]));
        assert!((ev.lambda_t - 0.5).abs() < 1e-15);
        assert!((ev.lambda_f - 1.0).abs() < 1e-15);
        assert_eq!(ev.lambda_f_star, 0.0);
        assert!(!ev.degenerate);
    }

    #[test]
    fn zero_field_is_degenerate() {
        let ev = eigenvalues_em(&EMField::zero());
        assert_eq!((ev.lambda_t, ev.lambda_f, ev.lambda_f_star), (0.0, 0.0, 0.0));
        assert!(ev.degenerate);
    }

    #[test]
    fn null_field_eigenvalues_vanish() {
        let ev = eigenvalues_em(&EMField::new([1.0, 0.0, 0.0], [0.0, 1.0, 0.0]));
        assert_eq!((ev.lambda_t, ev.lambda_f, ev.lambda_f_star), (0.0, 0.0, 0.0));
        assert!(!ev.degenerate);
    }

    #[test]
    fn lambda_cf_squares_to_a_dot_a() {
        let fields = [
            EMField::new([1.0, 0.2, -0.5], [0.3, 0.9, 0.1]),
            EMField::new([1.0, 0.0, 0.0], [1.0, 0.0, 0.0]),
            EMField::new([0.0, 0.0, 0.0], [0.0, 0.0, 2.0]),
        ];
        for f in fields {
            let ev = eigenvalues_em(&f);
            let aa = C64::new(f.e_sq() - f.b_sq(), 2.0 * f.e_dot_b());
            let sq = ev.lambda_cf() * ev.lambda_cf();
            assert!((sq - aa).norm() < 1e-10 * aa.norm().max(1.0), "{f:?}");
        }
    }

    #[test]
    fn principal_eigenvector_pure_electric() {
        let f = EMField::new([1.0, 0.0, 0.0], [0.0; 3]);
        let u = Vec4::default_observer();
        let r = principal_eigenvector(&f, &u).unwrap();
        assert!(!r.degenerate);
        let expect = Vec4::new(2.0, 2.0, 0.0, 0.0);
        assert!((r.s.add(&expect.scale(-1.0))).norm() < 1e-12);
        let neg = negative_eigenvector(&f, &u).unwrap();
        let expect_n = Vec4::new(2.0, -2.0, 0.0, 0.0);
        assert!((neg.s.add(&expect_n.scale(-1.0))).norm() < 1e-12);
    }

    #[test]
    fn null_field_single_direction() {
        let f = EMField::new([1.0, 0.0, 0.0], [0.0, 1.0, 0.0]);
        let u = Vec4::default_observer();
        let s = principal_eigenvector(&f, &u).unwrap().s;
        let expect = Vec4::new(2.0, 0.0, 0.0, 2.0);
        assert!((s.add(&expect.scale(-1.0))).norm() < 1e-12);
        let s_neg = negative_eigenvector(&f, &u).unwrap().s;
        assert!((s_neg.add(&s.scale(-1.0))).norm() < 1e-12);
        // s is null
        assert!(s.minkowski(&s).abs() < 1e-12);
    }

    #[test]
    fn zero_field_eigenvector_is_flagged() {
        let u = Vec4::default_observer();
        let r = principal_eigenvector(&EMField::zero(), &u).unwrap();
        assert!(r.degenerate);
        assert_eq!(r.s, Vec4::new(0.0, 0.0, 0.0, 0.0));
        let n = negative_eigenvector(&EMField::zero(), &u).unwrap();
        assert!(n.degenerate);
        assert_eq!(n.s, Vec4::new(0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn joint_eigenvector_property() {
        let f = EMField::new([0.7, -0.2, 1.1], [0.4, 0.8, -0.3]);
        let u = Vec4::default_observer();
        let ev = eigenvalues_em(&f);
        let s = principal_eigenvector(&f, &u).unwrap().s;
        let fm = field_matrices(&f);
        let scale = fm.f.fro_norm().max(1.0) * s.norm();
        assert!(eigen_residual(&fm.f.to_cmat4(), &s, ev.lambda_f) < 1e-9 * scale);
        assert!(eigen_residual(&fm.f_star.to_cmat4(), &s, ev.lambda_f_star) < 1e-9 * scale);
        let t = energy_momentum(&f);
        assert!(eigen_residual(&t.to_cmat4(), &s, ev.lambda_t) < 1e-9 * scale);
    }

    #[test]
    fn inner_product_identity_for_negative_vector() {
        let f = EMField::new([0.9, 0.1, -0.6], [0.2, -0.7, 0.5]);
        let u = Vec4::default_observer();
        let ev = eigenvalues_em(&f);
        let s_neg = negative_eigenvector(&f, &u).unwrap().s;
        let lhs = u.minkowski(&s_neg);
        let rhs = -2.0 * (ev.lambda_t + 0.5 * (f.e_sq() + f.b_sq()));
        assert!((lhs - rhs).abs() < 1e-10 * rhs.abs().max(1.0));
    }

    #[test]
    fn classify_cases() {
        let scalar = Biquat::new(C64::new(3.0, -1.0), [ZERO; 3], Chirality::S);
        assert_eq!(classify(&scalar), SpectralCase::ScalarOnly);
        let null = Biquat::pure([ONE, I, ZERO], Chirality::S);
        assert_eq!(classify(&null), SpectralCase::NullDegenerate);
        let generic = Biquat::pure([ONE, ZERO, ZERO], Chirality::S);
        assert_eq!(classify(&generic), SpectralCase::TwoEigenvaluesGeneric);
    }

    #[test]
    fn eigenspace_of_null_element() {
        let f = EMField::new([1.0, 0.0, 0.0], [0.0, 1.0, 0.0]);
        let q = f.to_biquat();
        let basis = eigenspace_basis(&q, ZERO).unwrap();
        assert!(!basis.non_unique);
        let m = q.rep_matrix().to_cmatn();
        // both stated eigenvectors lie in the span
        let known = [
            vec![ZERO, ONE, I, ZERO],               // E + iB
            vec![ONE, ZERO, ZERO, ONE],             // E^2 u + ExB
        ];
        let span: Vec<Vec<C64>> = basis
            .vectors
            .iter()
            .map(|v| v.as_array().to_vec())
            .collect();
        for k in &known {
            assert_eq!(smallmat::union_dim(&span, std::slice::from_ref(k), 4), 2);
        }
        for v in &span {
            let mv = m.apply(v);
            assert!(mv.iter().map(|e| e.norm()).fold(0.0, f64::max) < 1e-9);
        }
    }

    #[test]
    fn eigenspace_generic_residual() {
        let q = Biquat::new(
            C64::new(0.5, 0.2),
            [C64::new(1.0, 0.3), C64::new(-0.4, 0.8), C64::new(0.2, -0.6)],
            Chirality::S,
        );
        let lambda = q.scalar + q.vector_dot().sqrt();
        let basis = eigenspace_basis(&q, lambda).unwrap();
        let m = q.rep_matrix().to_cmatn();
        for v in &basis.vectors {
            let arr = v.as_array().to_vec();
            let mv = m.apply(&arr);
            let resid = (0..4)
                .map(|k| (mv[k] - lambda * arr[k]).norm())
                .fold(0.0, f64::max);
            assert!(resid < 1e-9, "residual {resid}");
        }
    }

    #[test]
    fn eigenspace_scalar_flagged() {
        let q = Biquat::new(C64::new(2.0, 0.0), [ZERO; 3], Chirality::S);
        let basis = eigenspace_basis(&q, C64::new(2.0, 0.0)).unwrap();
        assert!(basis.non_unique);
        assert!(matches!(
            eigenspace_basis(&q, C64::new(3.0, 0.0)),
            Err(Error::NotAnEigenvalue { .. })
        ));
    }

    #[test]
    fn spin_probability_limits() {
        let u = Vec4::default_observer();
        let v = [1.0, 0.0, 0.0];
        assert_eq!(spin_probability(&u, v, v).unwrap(), 0.0);
        assert_eq!(spin_probability(&u, v, [-1.0, 0.0, 0.0]).unwrap(), 1.0);
        let w = [0.0, 1.0, 0.0];
        assert!((spin_probability(&u, v, w).unwrap() - 0.5).abs() < 1e-15);
        assert!(matches!(
            spin_probability(&u, [2.0, 0.0, 0.0], w),
            Err(Error::NotUnitSpatial { .. })
        ));
    }

    #[test]
    fn beta_decay_values() {
        let u = Vec4::default_observer();
        let bdir = [1.0, 0.0, 0.0];
        assert_eq!(beta_decay_distribution(&u, [0.0; 3], bdir).unwrap(), 1.0);
        let v = [0.5, 0.0, 0.0];
        assert!((beta_decay_distribution(&u, v, bdir).unwrap() - 0.5).abs() < 1e-15);
        let v_perp = [0.0, 0.5, 0.0];
        assert!((beta_decay_distribution(&u, v_perp, bdir).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(
            beta_decay_distribution(&u, [1.0, 0.0, 0.0], bdir),
            Err(Error::SpeedNotSubluminal { .. })
        ));
    }
}
