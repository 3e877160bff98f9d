//! Independent numerical oracles for the biquat test suites.
//!
//! Everything here deliberately avoids the algorithms used by the library
//! under test: the matrix exponential is plain scaling-and-squaring with
//! a truncated Taylor series, eigenvalues come from determinant
//! interpolation plus Durand-Kerner root iteration, and ranks come from
//! straight Gaussian elimination.

use num_complex::Complex64 as C64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Matrix exponential of a 4x4 complex matrix by scaling-and-squaring
/// with a degree-30 Taylor series.
pub fn taylor_expm(m: &[[C64; 4]; 4]) -> [[C64; 4]; 4] {
    let norm: f64 = m
        .iter()
        .flat_map(|r| r.iter())
        .map(|e| e.norm())
        .fold(0.0, f64::max);
    let mut squarings = 0u32;
    let mut scale = 1.0;
    while norm * scale > 0.5 {
        scale *= 0.5;
        squarings += 1;
    }
    let a = scale4(m, C64::new(scale, 0.0));
    let mut term = identity4();
    let mut sum = identity4();
    for k in 1..=30 {
        term = mul4(&term, &a);
        term = scale4(&term, C64::new(1.0 / k as f64, 0.0));
        sum = add4(&sum, &term);
    }
    for _ in 0..squarings {
        sum = mul4(&sum, &sum);
    }
    sum
}

pub fn identity4() -> [[C64; 4]; 4] {
    let mut m = [[ZERO; 4]; 4];
    for k in 0..4 {
        m[k][k] = ONE;
    }
    m
}

pub fn mul4(a: &[[C64; 4]; 4], b: &[[C64; 4]; 4]) -> [[C64; 4]; 4] {
    let mut out = [[ZERO; 4]; 4];
    for r in 0..4 {
        for c in 0..4 {
            let mut acc = ZERO;
            for k in 0..4 {
                acc += a[r][k] * b[k][c];
            }
            out[r][c] = acc;
        }
    }
    out
}

pub fn add4(a: &[[C64; 4]; 4], b: &[[C64; 4]; 4]) -> [[C64; 4]; 4] {
    let mut out = [[ZERO; 4]; 4];
    for r in 0..4 {
        for c in 0..4 {
            out[r][c] = a[r][c] + b[r][c];
        }
    }
    out
}

pub fn scale4(a: &[[C64; 4]; 4], s: C64) -> [[C64; 4]; 4] {
    let mut out = *a;
    for row in out.iter_mut() {
        for e in row.iter_mut() {
            *e *= s;
        }
    }
    out
}

pub fn max_abs_diff4(a: &[[C64; 4]; 4], b: &[[C64; 4]; 4]) -> f64 {
    let mut worst = 0.0f64;
    for r in 0..4 {
        for c in 0..4 {
            worst = worst.max((a[r][c] - b[r][c]).norm());
        }
    }
    worst
}

/// Determinant by Laplace expansion (any order).
pub fn det(m: &[Vec<C64>]) -> C64 {
    let n = m.len();
    if n == 1 {
        return m[0][0];
    }
    let mut acc = ZERO;
    let mut sign = ONE;
    for c in 0..n {
        if m[0][c] != ZERO {
            let minor: Vec<Vec<C64>> = m[1..]
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter(|(j, _)| *j != c)
                        .map(|(_, v)| *v)
                        .collect()
                })
                .collect();
            acc += sign * m[0][c] * det(&minor);
        }
        sign = -sign;
    }
    acc
}

/// Monic characteristic polynomial coefficients `[c1, ..., cn]` of an
/// n x n matrix by evaluating `det(tI - M)` at n+1 nodes and solving the
/// Vandermonde system.
pub fn char_poly_interp(m: &[Vec<C64>]) -> Vec<C64> {
    let n = m.len();
    // nodes spread on a circle scaled to the matrix
    let scale: f64 = m
        .iter()
        .flat_map(|r| r.iter())
        .map(|e| e.norm())
        .fold(1.0, f64::max);
    let nodes: Vec<C64> = (0..=n)
        .map(|k| C64::from_polar(2.0 * scale, 2.0 * std::f64::consts::PI * (k as f64) / ((n + 1) as f64) + 0.37))
        .collect();
    let values: Vec<C64> = nodes
        .iter()
        .map(|t| {
            let shifted: Vec<Vec<C64>> = (0..n)
                .map(|r| {
                    (0..n)
                        .map(|c| if r == c { t - m[r][c] } else { -m[r][c] })
                        .collect()
                })
                .collect();
            det(&shifted)
        })
        .collect();
    // p(t) = t^n + c1 t^(n-1) + ... + cn; unknowns c1..cn
    // Vandermonde solve by Gaussian elimination on (n+1) x n system using
    // the first n equations (the last is consistency)
    let mut a: Vec<Vec<C64>> = Vec::new();
    let mut b: Vec<C64> = Vec::new();
    for (t, v) in nodes.iter().zip(values.iter()).take(n) {
        let mut row = Vec::with_capacity(n);
        let mut p = ONE;
        // t^(n-1), ..., t, 1
        let mut powers = vec![ONE; n];
        for k in (0..n).rev() {
            powers[k] = p;
            p *= t;
        }
        row.extend_from_slice(&powers);
        a.push(row);
        b.push(v - p); // p = t^n here
    }
    gauss_solve(&mut a, &mut b);
    b
}

fn gauss_solve(a: &mut [Vec<C64>], b: &mut [C64]) {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].norm().partial_cmp(&a[j][col].norm()).unwrap())
            .unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for c in col..n {
                let v = a[r][c] - f * a[col][c];
                a[r][c] = v;
            }
            let v = b[r] - f * b[col];
            b[r] = v;
        }
    }
    for r in (0..n).rev() {
        let mut acc = b[r];
        for c in r + 1..n {
            acc -= a[r][c] * b[c];
        }
        b[r] = acc / a[r][r];
    }
}

/// All roots of the monic polynomial `t^n + c1 t^(n-1) + ... + cn` by
/// Durand-Kerner iteration.
pub fn durand_kerner(coeffs: &[C64]) -> Vec<C64> {
    let n = coeffs.len();
    if n == 0 {
        return Vec::new();
    }
    let eval = |z: C64| -> C64 {
        let mut p = ONE;
        for c in coeffs {
            p = p * z + c;
        }
        p
    };
    let radius = 1.0 + coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let seed = C64::new(0.4, 0.9);
    let mut z: Vec<C64> = (0..n).map(|k| seed.powu(k as u32 + 1) * radius).collect();
    for _ in 0..400 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let mut denom = ONE;
            for j in 0..n {
                if i != j {
                    denom *= z[i] - z[j];
                }
            }
            if denom.norm() < 1e-280 {
                continue;
            }
            let delta = eval(z[i]) / denom;
            z[i] -= delta;
            moved = moved.max(delta.norm());
        }
        if moved < 1e-14 * radius {
            break;
        }
    }
    z
}

/// Eigenvalues of a small matrix via determinant interpolation and
/// Durand-Kerner, fully independent of the library's companion-QR path.
pub fn eigenvalues_oracle(m: &[Vec<C64>]) -> Vec<C64> {
    durand_kerner(&char_poly_interp(m))
}

/// Numerical rank by Gaussian elimination with full pivoting.
pub fn rank_gauss(m: &[Vec<C64>], rel_tol: f64) -> usize {
    let n = m.len();
    let mut a: Vec<Vec<C64>> = m.to_vec();
    let scale = a
        .iter()
        .flat_map(|r| r.iter())
        .map(|e| e.norm())
        .fold(0.0, f64::max);
    if scale == 0.0 {
        return 0;
    }
    let thresh = rel_tol * scale;
    let mut rank = 0;
    let cols = a[0].len();
    let mut used_rows = vec![false; n];
    for _ in 0..cols.min(n) {
        // find the largest remaining pivot
        let mut best = (0usize, 0usize, 0.0f64);
        for (r, row) in a.iter().enumerate() {
            if used_rows[r] {
                continue;
            }
            for (c, e) in row.iter().enumerate() {
                if e.norm() > best.2 {
                    best = (r, c, e.norm());
                }
            }
        }
        if best.2 <= thresh {
            break;
        }
        let (pr, pc, _) = best;
        used_rows[pr] = true;
        rank += 1;
        let pivot = a[pr][pc];
        let pivot_row = a[pr].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if used_rows[r] {
                continue;
            }
            let f = row[pc] / pivot;
            for (c, e) in row.iter_mut().enumerate() {
                *e -= f * pivot_row[c];
            }
        }
    }
    rank
}

/// Winding number of a closed complex loop around the origin, from
/// summed argument increments. The loop must repeat its first value at
/// the end.
pub fn winding_number(vals: &[C64]) -> i64 {
    let mut total = 0.0f64;
    for w in vals.windows(2) {
        let ratio = w[1] / w[0];
        total += ratio.arg();
    }
    (total / (2.0 * std::f64::consts::PI)).round() as i64
}
