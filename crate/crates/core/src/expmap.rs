//! Closed-form exponential on the pure biquaternion sector and on
//! so(3,1), plus a constructive logarithm realizing the surjectivity of
//! exp onto the proper Lorentz group.

use crate::alg_core::{Biquat, C64, ONE};
use crate::error::Error;
use crate::mink::{classify_lorentz, so31_matrix, LorentzClass, RMat4};
use crate::modsq::{lift_lorentz, modulus_squared};
use crate::Result;

/// `sinh(z)/z` with the removable singularity filled by its Taylor series
/// for small arguments. The crossover at |z| = 1e-3 keeps the switch
/// error below 1e-16.
pub(crate) fn sinhc(z: C64) -> C64 {
    if z.norm() < 1e-3 {
        let z2 = z * z;
        ONE + z2 / 6.0 + z2 * z2 / 120.0
    } else {
        z.sinh() / z
    }
}

/// Closed-form exponential of a pure element:
/// `exp(F) = cosh(lambda) I + sinh(lambda)/lambda * F` with
/// `lambda^2 = A.A`. Either square root gives the same result since both
/// factors are even. Null elements exponentiate to `I + F` exactly.
pub fn exp_biquat(q: &Biquat) -> Result<Biquat> {
    let mag = q.scalar.norm();
    if mag > 1e-12 * q.norm().max(1.0) {
        return Err(Error::NotPure { magnitude: mag });
    }
    let lambda = q.vector_dot().sqrt();
    let factor = sinhc(lambda);
    let mut out = q.scale(factor);
    out.scalar = lambda.cosh();
    Ok(out)
}

/// Split a Minkowski-skew real matrix into its electric part (symmetric
/// time-space block) and magnetic part (antisymmetric spatial block).
pub fn split_so31(f: &RMat4) -> Result<([f64; 3], [f64; 3])> {
    let e = [
        0.5 * (f.0[0][1] + f.0[1][0]),
        0.5 * (f.0[0][2] + f.0[2][0]),
        0.5 * (f.0[0][3] + f.0[3][0]),
    ];
    let b = [
        0.5 * (f.0[2][3] - f.0[3][2]),
        0.5 * (f.0[3][1] - f.0[1][3]),
        0.5 * (f.0[1][2] - f.0[2][1]),
    ];
    let rebuilt = so31_matrix(e, b);
    let resid = rebuilt.sub(f).fro_norm();
    if resid <= 1e-10 * f.fro_norm().max(1.0) {
        Ok((e, b))
    } else {
        Err(Error::NotSkew { residual: resid })
    }
}

/// Exponential on so(3,1) through the commuting split
/// `exp(F) = exp(cF/2) exp(cbarF/2)`, evaluated as the modulus squared of
/// the closed-form biquaternion exponential. Always lands in the proper
/// orthochronous component.
pub fn exp_so31(f: &RMat4) -> Result<RMat4> {
    let (e, b) = split_so31(f)?;
    let half = C64::new(0.5, 0.0);
    let q = crate::mink::EMField::new(e, b).to_biquat().scale(half);
    let exp_q = exp_biquat(&q)?;
    // m(exp(cF/2)) = exp(cF/2) exp(cbarF/2) = exp(F)
    Ok(modulus_squared(&exp_q))
}

/// Constructive logarithm on the biquaternion Lorentz group.
///
/// Solves `cosh(lambda) = a` through the principal branches
/// `lambda = ln(a + sqrt(a^2 - 1))` and rescales the pure part. The
/// exceptional family `-I + N` with `N` null and nonzero is the one
/// obstruction and is reported as an error; `-I` itself has the canonical
/// logarithm with eigenvalue `i pi`.
pub fn log_biquat_lorentz(l: &Biquat) -> Result<Biquat> {
    let a = l.scalar;
    let h = Biquat::pure(l.vector, l.chirality);
    let aa = h.vector_dot();
    let scale = a.norm_sqr().max(aa.norm()).max(1.0);
    let memb = a * a - aa - ONE;
    if memb.norm() > 1e-9 * scale {
        return Err(Error::NotBiquatLorentz { residual: memb.norm() });
    }
    let lambda = (a + (a * a - ONE).sqrt()).ln();
    let i_pi = C64::new(0.0, std::f64::consts::PI);
    if (lambda - i_pi).norm() < 1e-6 {
        // a = -1: scalar -I has the canonical log, -I + N does not
        if h.norm() <= 1e-9 {
            return Ok(Biquat::pure([i_pi, C64::new(0.0, 0.0), C64::new(0.0, 0.0)], l.chirality));
        }
        return Err(Error::NotExponentialInS);
    }
    // D = (lambda / sinh(lambda)) H, with the ratio continued through 0
    Ok(h.scale(ONE / sinhc(lambda)))
}

/// Constructive logarithm on the proper Lorentz group.
///
/// Lifts `L` to a biquaternion with the membership gauge, takes the pure
/// logarithm there, and doubles the real part:
/// `m(exp(cD)) = exp(cD + conj(cD)) = exp(2 Re D)`. The gauge keeps the
/// lift away from the exceptional `-I + N` family; if a direct call ever
/// lands there the sign-flipped lift is used instead.
pub fn log_so31(l: &RMat4) -> Result<RMat4> {
    let gate = 1e-8 * l.fro_norm().max(1.0);
    if classify_lorentz(l, gate) != LorentzClass::ProperOrthochronous {
        return Err(Error::NotProperLorentz);
    }
    let lift = lift_lorentz(l)?;
    let d = match log_biquat_lorentz(&lift) {
        Ok(d) => d,
        Err(Error::NotExponentialInS) => log_biquat_lorentz(&lift.neg())?,
        Err(e) => return Err(e),
    };
    let e = [2.0 * d.vector[0].re, 2.0 * d.vector[1].re, 2.0 * d.vector[2].re];
    let b = [2.0 * d.vector[0].im, 2.0 * d.vector[1].im, 2.0 * d.vector[2].im];
    Ok(so31_matrix(e, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alg_core::{Chirality, ZERO};
    use crate::mink::EMField;

    const I: C64 = C64::new(0.0, 1.0);

    #[test]
    fn exp_of_zero_is_identity() {
        let q = Biquat::pure([ZERO; 3], Chirality::S);
        assert_eq!(exp_biquat(&q).unwrap(), Biquat::identity(Chirality::S));
    }

    #[test]
    fn exp_unit_vector_closed_form() {
        let q = Biquat::pure([ONE, ZERO, ZERO], Chirality::S);
        let e = exp_biquat(&q).unwrap();
        assert!((e.scalar.re - 1.0_f64.cosh()).abs() < 1e-15);
        assert!((e.vector[0].re - 1.0_f64.sinh()).abs() < 1e-15);
    }

    #[test]
    fn exp_null_is_affine() {
        let q = Biquat::pure([ONE, I, ZERO], Chirality::S);
        let e = exp_biquat(&q).unwrap();
        assert_eq!(e.scalar, ONE);
        assert_eq!(e.vector, q.vector);
    }

    #[test]
    fn exp_rejects_scalar_part() {
        let q = Biquat::new(ONE, [ONE, ZERO, ZERO], Chirality::S);
        assert!(matches!(exp_biquat(&q), Err(Error::NotPure { .. })));
    }

    #[test]
    fn exp_inverse_family() {
        let q = Biquat::pure([C64::new(0.7, 0.2), C64::new(-0.3, 0.9), C64::new(0.1, -0.4)], Chirality::S);
        let p = exp_biquat(&q).unwrap().try_mul(&exp_biquat(&q.neg()).unwrap()).unwrap();
        assert!((p.scalar - ONE).norm() < 1e-12);
        assert!(p.vector.iter().all(|v| v.norm() < 1e-12));
    }

    #[test]
    fn exp_so31_boost_and_rotation() {
        let a = 0.8_f64;
        let boost = exp_so31(&so31_matrix([a, 0.0, 0.0], [0.0; 3])).unwrap();
        assert!((boost.0[0][0] - a.cosh()).abs() < 1e-12);
        assert!((boost.0[0][1] - a.sinh()).abs() < 1e-12);
        assert!((boost.0[1][0] - a.sinh()).abs() < 1e-12);
        assert!((boost.0[1][1] - a.cosh()).abs() < 1e-12);

        let th = 0.6_f64;
        let rot = exp_so31(&so31_matrix([0.0; 3], [0.0, 0.0, th])).unwrap();
        assert!((rot.0[1][1] - th.cos()).abs() < 1e-12);
        assert!((rot.0[1][2] - th.sin()).abs() < 1e-12);
        assert!((rot.0[2][1] + th.sin()).abs() < 1e-12);
        assert!((rot.0[3][3] - 1.0).abs() < 1e-14);
        assert_eq!(classify_lorentz(&rot, 1e-10), LorentzClass::ProperOrthochronous);
    }

    #[test]
    fn exp_so31_zero_and_not_skew() {
        assert_eq!(exp_so31(&RMat4::zero()).unwrap(), RMat4::identity());
        let mut m = RMat4::zero();
        m.0[1][1] = 1.0;
        assert!(matches!(exp_so31(&m), Err(Error::NotSkew { .. })));
    }

    #[test]
    fn log_identity_and_round_trip() {
        let id = Biquat::identity(Chirality::S);
        let d = log_biquat_lorentz(&id).unwrap();
        assert!(d.norm() < 1e-12);

        let l = Biquat::new(
            C64::new(1.0_f64.cosh(), 0.0),
            [C64::new(1.0_f64.sinh(), 0.0), ZERO, ZERO],
            Chirality::S,
        );
        let d = log_biquat_lorentz(&l).unwrap();
        assert!((d.vector[0] - ONE).norm() < 1e-12);
        let back = exp_biquat(&d).unwrap();
        assert!((back.scalar - l.scalar).norm() < 1e-12);
    }

    #[test]
    fn log_rejects_exceptional_family() {
        let n = EMField::new([1.0, 0.0, 0.0], [0.0, 1.0, 0.0]).to_biquat();
        let minus_i_plus_n = Biquat::new(-ONE, n.vector, Chirality::S);
        assert_eq!(log_biquat_lorentz(&minus_i_plus_n), Err(Error::NotExponentialInS));
        // -I alone is fine
        let minus_i = Biquat::new(-ONE, [ZERO; 3], Chirality::S);
        let d = log_biquat_lorentz(&minus_i).unwrap();
        let back = exp_biquat(&d).unwrap();
        assert!((back.scalar + ONE).norm() < 1e-12);
        assert!(back.vector.iter().all(|v| v.norm() < 1e-12));
    }

    #[test]
    fn log_rejects_non_member() {
        let q = Biquat::new(C64::new(2.0, 0.0), [ONE, ZERO, ZERO], Chirality::S);
        assert!(matches!(log_biquat_lorentz(&q), Err(Error::NotBiquatLorentz { .. })));
    }

    #[test]
    fn log_of_i_plus_null() {
        let n = EMField::new([0.5, 0.0, 0.0], [0.0, 0.5, 0.0]).to_biquat();
        let l = Biquat::new(ONE, n.vector, Chirality::S);
        let d = log_biquat_lorentz(&l).unwrap();
        for k in 0..3 {
            assert!((d.vector[k] - n.vector[k]).norm() < 1e-12);
        }
    }

    #[test]
    fn log_so31_round_trips() {
        let f = so31_matrix([0.4, -0.2, 0.7], [0.1, 0.9, -0.3]);
        let l = exp_so31(&f).unwrap();
        let f2 = log_so31(&l).unwrap();
        let l2 = exp_so31(&f2).unwrap();
        assert!(l2.sub(&l).fro_norm() < 1e-10 * l.fro_norm().max(1.0));
    }

    #[test]
    fn log_so31_identity() {
        assert!(log_so31(&RMat4::identity()).unwrap().fro_norm() < 1e-12);
    }

    #[test]
    fn log_so31_null_rotation() {
        // exp of an exactly null generator: a = 1 branch of the log
        let n = so31_matrix([1.0, 0.0, 0.0], [0.0, 1.0, 0.0]);
        let l = exp_so31(&n).unwrap();
        let f = log_so31(&l).unwrap();
        let l2 = exp_so31(&f).unwrap();
        assert!(l2.sub(&l).fro_norm() < 1e-10);
    }

    #[test]
    fn log_so31_pi_rotation_with_null_factor() {
        // rotation by pi about z composed with a null rotation: the
        // smallest case adjacent to the exceptional family
        let rot = exp_so31(&so31_matrix([0.0; 3], [0.0, 0.0, std::f64::consts::PI])).unwrap();
        let null = exp_so31(&so31_matrix([0.3, 0.0, 0.0], [0.0, 0.3, 0.0])).unwrap();
        let l = rot.mul(&null);
        let f = log_so31(&l).unwrap();
        let l2 = exp_so31(&f).unwrap();
        assert!(l2.sub(&l).fro_norm() < 1e-8 * l.fro_norm().max(1.0));
    }

    #[test]
    fn log_so31_rejects_time_reversal() {
        let mut t = RMat4::identity();
        t.0[0][0] = -1.0;
        assert!(matches!(log_so31(&t), Err(Error::NotProperLorentz)));
    }
}
