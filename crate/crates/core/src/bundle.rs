//! Parameterized matrix fields and their eigenvalue bundles: branch
//! tracking along sampled paths, monodromy at loop closure, degeneracy
//! events, discrete line-bundle holonomy, and the Doppler factor relating
//! the principal eigenvector seen by two observers.
//!
//! Tracking works on the characteristic-polynomial roots at each sample,
//! matched between consecutive samples by a minimal-total-displacement
//! assignment. Whenever the smallest gap between distinct branch values
//! drops below a multiple of the largest branch movement the segment is
//! bisected, re-evaluating the field, up to a depth limit; persistent
//! ambiguity is reported with the offending interval rather than guessed
//! away.

use num_complex::Complex64 as C64;

use crate::alg_core::Biquat;
use crate::eigen::eigenvalues_em;
use crate::error::Error;
use crate::mink::{cross3, dot3, EMField, Vec4};
use crate::smallmat;
pub use crate::smallmat::CMatN;
use crate::Result;

const ZERO: C64 = C64::new(0.0, 0.0);

/// Built-in matrix fields plus explicit sampling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    /// `[[1, t], [0, 1]]` over the real line.
    Example1,
    /// `[[1, f(t)], [f(-t), 1]]` with `f(t) = max(t, 0)`.
    Example2,
    /// `[[u, v], [v, w]]` over 3-space.
    Example3,
    /// The pure 4x4 representation over a complex 3-vector.
    Example4,
    /// The full scalar-plus-vector 4x4 representation over a complex
    /// 4-vector.
    Example5,
    /// Entrywise linear interpolation between explicit samples along a
    /// 1-dimensional arc parameter.
    ExplicitSamples,
}

/// Scalar field the eigenproblem is considered over. Affects holonomy
/// reporting (sign versus phase); roots are always computed over C.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scalars {
    RealField,
    ComplexField,
}

/// A named or explicitly sampled map from parameter points to square
/// matrices.
#[derive(Debug, Clone)]
pub struct MatrixField {
    kind: FieldKind,
    dim: usize,
    param_dim: usize,
    scalars: Scalars,
    samples: Option<SampleData>,
}

#[derive(Debug, Clone)]
struct SampleData {
    ts: Vec<f64>,
    mats: Vec<CMatN>,
}

/// A sampled path or loop in parameter space. Closed paths carry their
/// first point again as the last.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamPath {
    pub points: Vec<Vec<f64>>,
    pub closed: bool,
}

/// Knobs for tracking and transport.
#[derive(Debug, Clone)]
pub struct TraceOpts {
    /// Maximum bisection depth per segment.
    pub max_depth: usize,
    /// Refinement triggers when the smallest inter-branch gap is below
    /// this multiple of the largest branch movement.
    pub refine_factor: f64,
    /// Gap below which branch values count as one cluster. Defaults to
    /// 1e-8 times the largest eigenvalue magnitude seen (floor 1).
    pub degeneracy_tol: Option<f64>,
    /// Transport overlap below which holonomy inserts midpoints.
    pub min_overlap: f64,
}

impl Default for TraceOpts {
    fn default() -> Self {
        TraceOpts { max_depth: 20, refine_factor: 3.0, degeneracy_tol: None, min_overlap: 0.5 }
    }
}

/// Tracked eigenvalue branches along a (possibly refined) sample set.
#[derive(Debug, Clone)]
pub struct TraceResult {
    /// Final sample points, including refinement midpoints.
    pub points: Vec<Vec<f64>>,
    /// `values[sample][branch]`, branches labeled by their order at the
    /// first sample (sorted by real then imaginary part).
    pub values: Vec<Vec<C64>>,
    /// Closure permutation for closed paths: branch `j` ends on the value
    /// that branch `monodromy[j]` started with. Identity for open paths.
    pub monodromy: Vec<usize>,
    /// Degeneracy events visible at the sampled points.
    pub degeneracies: Vec<DegeneracyEvent>,
    /// Number of midpoints inserted by adaptive bisection.
    pub refinement_count: usize,
}

/// A location where eigenvalue clusters merge with an eigenspace jump.
#[derive(Debug, Clone, PartialEq)]
pub struct DegeneracyEvent {
    /// Representative parameter point.
    pub location: Vec<f64>,
    /// Bracketing interval around the event.
    pub bracket: (Vec<f64>, Vec<f64>),
    /// The closest pair of colliding branch labels.
    pub branches: (usize, usize),
    /// Dimension of the eigenspace at (or spanning) the event; at least 2.
    pub eigenspace_dim: usize,
}

/// Closure overlap of a transported unit eigenvector.
#[derive(Debug, Clone, PartialEq)]
pub struct HolonomyResult {
    pub branch: usize,
    /// Unit-modulus closure overlap; the discrete Berry phase is its
    /// argument.
    pub value: C64,
    pub samples_used: usize,
}

impl HolonomyResult {
    /// `+1`/`-1` for real fields; `None` when the overlap is not real.
    pub fn sign(&self) -> Option<i8> {
        if self.value.im.abs() < 1e-6 {
            Some(if self.value.re >= 0.0 { 1 } else { -1 })
        } else {
            None
        }
    }
}

/// Loop-level verdict on the existence of a continuous eigenvalue
/// function: obstructed exactly when the closure permutation moves some
/// branch.
#[derive(Debug, Clone, PartialEq)]
pub struct S1Report {
    pub obstructed: bool,
    pub monodromy: Vec<usize>,
}

impl MatrixField {
    pub fn example1() -> Self {
        MatrixField { kind: FieldKind::Example1, dim: 2, param_dim: 1, scalars: Scalars::RealField, samples: None }
    }

    pub fn example2() -> Self {
        MatrixField { kind: FieldKind::Example2, dim: 2, param_dim: 1, scalars: Scalars::RealField, samples: None }
    }

    pub fn example3() -> Self {
        MatrixField { kind: FieldKind::Example3, dim: 2, param_dim: 3, scalars: Scalars::RealField, samples: None }
    }

    /// Parameter layout: `[re A1, im A1, re A2, im A2, re A3, im A3]`.
    pub fn example4() -> Self {
        MatrixField { kind: FieldKind::Example4, dim: 4, param_dim: 6, scalars: Scalars::ComplexField, samples: None }
    }

    /// Parameter layout: `[re A0, im A0, re A1, im A1, ...]`.
    pub fn example5() -> Self {
        MatrixField { kind: FieldKind::Example5, dim: 4, param_dim: 8, scalars: Scalars::ComplexField, samples: None }
    }

    /// Field given by explicit samples along an ascending 1-dimensional
    /// arc parameter; queries interpolate entrywise between bracketing
    /// samples.
    pub fn from_samples(ts: Vec<f64>, mats: Vec<CMatN>, scalars: Scalars) -> Result<Self> {
        if ts.len() < 2 || ts.len() != mats.len() {
            return Err(Error::OutOfDomain { detail: "need matching sample lists with at least two entries".into() });
        }
        if !ts.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::OutOfDomain { detail: "sample parameters must be strictly increasing".into() });
        }
        let dim = mats[0].dim();
        if dim == 0 || dim > 8 || !mats.iter().all(|m| m.dim() == dim) {
            return Err(Error::OutOfDomain { detail: "matrix order must be uniform and between 1 and 8".into() });
        }
        Ok(MatrixField {
            kind: FieldKind::ExplicitSamples,
            dim,
            param_dim: 1,
            scalars,
            samples: Some(SampleData { ts, mats }),
        })
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn param_dim(&self) -> usize {
        self.param_dim
    }

    pub fn scalars(&self) -> Scalars {
        self.scalars
    }
}

/// Evaluate the field at a parameter point.
pub fn eval_field(field: &MatrixField, point: &[f64]) -> Result<CMatN> {
    if point.len() != field.param_dim || !point.iter().all(|v| v.is_finite()) {
        return Err(Error::OutOfDomain {
            detail: format!("expected {} finite coordinates, got {:?}", field.param_dim, point),
        });
    }
    let c = |re: f64| C64::new(re, 0.0);
    match field.kind {
        FieldKind::Example1 => Ok(CMatN::from_rows(vec![
            vec![c(1.0), c(point[0])],
            vec![ZERO, c(1.0)],
        ])),
        FieldKind::Example2 => Ok(CMatN::from_rows(vec![
            vec![c(1.0), c(point[0].max(0.0))],
            vec![c((-point[0]).max(0.0)), c(1.0)],
        ])),
        FieldKind::Example3 => Ok(CMatN::from_rows(vec![
            vec![c(point[0]), c(point[1])],
            vec![c(point[1]), c(point[2])],
        ])),
        FieldKind::Example4 => {
            let v = [
                C64::new(point[0], point[1]),
                C64::new(point[2], point[3]),
                C64::new(point[4], point[5]),
            ];
            Ok(Biquat::pure(v, crate::alg_core::Chirality::S).rep_matrix().to_cmatn())
        }
        FieldKind::Example5 => {
            let a0 = C64::new(point[0], point[1]);
            let v = [
                C64::new(point[2], point[3]),
                C64::new(point[4], point[5]),
                C64::new(point[6], point[7]),
            ];
            Ok(Biquat::new(a0, v, crate::alg_core::Chirality::S).rep_matrix().to_cmatn())
        }
        FieldKind::ExplicitSamples => {
            let data = field.samples.as_ref().expect("explicit field carries samples");
            let t = point[0];
            let (t0, t1) = (data.ts[0], *data.ts.last().unwrap());
            if t < t0 || t > t1 {
                return Err(Error::OutOfDomain { detail: format!("{t} outside [{t0}, {t1}]") });
            }
            let hi = data.ts.partition_point(|s| *s < t).min(data.ts.len() - 1).max(1);
            let lo = hi - 1;
            let span = data.ts[hi] - data.ts[lo];
            let w = if span > 0.0 { (t - data.ts[lo]) / span } else { 0.0 };
            let n = field.dim;
            let mut m = CMatN::zero(n);
            for r in 0..n {
                for cidx in 0..n {
                    let a = data.mats[lo].get(r, cidx);
                    let b = data.mats[hi].get(r, cidx);
                    m.set(r, cidx, a + (b - a) * w);
                }
            }
            Ok(m)
        }
    }
}

impl ParamPath {
    pub fn open(points: Vec<Vec<f64>>) -> Self {
        ParamPath { points, closed: false }
    }

    pub fn closed(points: Vec<Vec<f64>>) -> Self {
        ParamPath { points, closed: true }
    }

    /// Uniform samples of `[a, b]` for 1-parameter fields.
    pub fn linear_range(a: f64, b: f64, samples: usize) -> Self {
        let n = samples.max(2);
        let points = (0..n)
            .map(|i| vec![a + (b - a) * (i as f64) / ((n - 1) as f64)])
            .collect();
        ParamPath { points, closed: false }
    }

    fn validate(&self, param_dim: usize) -> Result<()> {
        if self.points.len() < 2 {
            return Err(Error::InvalidPath { detail: "need at least two points".into() });
        }
        if !self.points.iter().all(|p| p.len() == param_dim) {
            return Err(Error::InvalidPath { detail: format!("points must have {param_dim} coordinates") });
        }
        if self.closed {
            let first = &self.points[0];
            let last = self.points.last().unwrap();
            let d: f64 = first.iter().zip(last.iter()).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            let scale: f64 = first.iter().map(|v| v.abs()).fold(1.0, f64::max);
            if d > 1e-9 * scale {
                return Err(Error::InvalidPath { detail: "closed path must end where it starts".into() });
            }
        }
        Ok(())
    }

    /// Snap the endpoint of a closed path onto the start so closure
    /// comparisons see the identical matrix.
    fn snapped(&self) -> ParamPath {
        let mut p = self.clone();
        if p.closed {
            let first = p.points[0].clone();
            *p.points.last_mut().unwrap() = first;
        }
        p
    }
}

/// Named loops used by the regression fixtures and the CLI.
///
/// `builtin-linking` (Example 3) links the degenerate line; on Example 4
/// and 5, `builtin-winding` winds `A.A` once around zero and
/// `builtin-null` stays inside the null stratum. `samples` counts the
/// distinct points; the closing point is appended.
pub fn builtin_loop(field: &MatrixField, name: &str, samples: usize) -> Result<ParamPath> {
    let n = samples.max(8);
    let step = 2.0 * std::f64::consts::PI / (n as f64);
    let mut points: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    for i in 0..n {
        let t = step * (i as f64);
        let p = match (field.kind, name) {
            (FieldKind::Example3, "builtin-linking") => vec![t.cos(), t.sin(), -t.cos()],
            (FieldKind::Example4, "builtin-winding") => {
                vec![1.0, 0.0, 0.5 * t.sin(), 1.0 - 0.5 * t.cos(), 0.0, 0.0]
            }
            (FieldKind::Example4, "builtin-null") => {
                vec![t.cos(), -t.sin(), t.sin(), t.cos(), 0.0, 0.0]
            }
            (FieldKind::Example5, "builtin-winding") => {
                vec![0.0, 0.0, 1.0, 0.0, 0.5 * t.sin(), 1.0 - 0.5 * t.cos(), 0.0, 0.0]
            }
            (FieldKind::Example5, "builtin-null") => {
                vec![0.0, 0.0, t.cos(), -t.sin(), t.sin(), t.cos(), 0.0, 0.0]
            }
            _ => {
                return Err(Error::InvalidPath {
                    detail: format!("no builtin loop '{name}' for this field"),
                })
            }
        };
        points.push(p);
    }
    points.push(points[0].clone());
    Ok(ParamPath::closed(points))
}

fn roots_at(field: &MatrixField, point: &[f64]) -> Result<Vec<C64>> {
    let m = eval_field(field, point)?;
    smallmat::eigenvalues(&m)
}

/// All characteristic-polynomial roots of a small matrix, with
/// multiplicity, via the same companion-matrix route the tracker uses.
pub fn matrix_eigenvalues(m: &CMatN) -> Result<Vec<C64>> {
    smallmat::eigenvalues(m)
}

/// Minimal-total-displacement assignment `from[j] -> to[perm[j]]`,
/// lexicographically smallest among minimizers so that exact ties keep
/// the previous ordering. Exact bitmask DP; n <= 8.
fn assign_min_cost(from: &[C64], to: &[C64]) -> Vec<usize> {
    let n = from.len();
    debug_assert_eq!(to.len(), n);
    let cost = |r: usize, c: usize| (from[r] - to[c]).norm();
    let full: usize = (1 << n) - 1;
    // h[mask] = min cost of assigning the last popcount(mask) rows to the
    // column set mask
    let mut h = vec![f64::INFINITY; 1 << n];
    h[0] = 0.0;
    for mask in 1..=full {
        let k = (mask as u32).count_ones() as usize;
        let row = n - k;
        let mut best = f64::INFINITY;
        for c in 0..n {
            if mask & (1 << c) == 0 {
                continue;
            }
            let v = cost(row, c) + h[mask ^ (1 << c)];
            if v < best {
                best = v;
            }
        }
        h[mask] = best;
    }
    let mut perm = vec![0usize; n];
    let mut free = full;
    for r in 0..n {
        let mut best_c = usize::MAX;
        let mut best_v = f64::INFINITY;
        for c in 0..n {
            if free & (1 << c) == 0 {
                continue;
            }
            let v = cost(r, c) + h[free ^ (1 << c)];
            if v + 1e-300 < best_v {
                best_v = v;
                best_c = c;
            }
        }
        perm[r] = best_c;
        free ^= 1 << best_c;
    }
    perm
}

fn midpoint(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b.iter()).map(|(x, y)| 0.5 * (x + y)).collect()
}

struct Tracker<'a> {
    field: &'a MatrixField,
    opts: &'a TraceOpts,
    points: Vec<Vec<f64>>,
    values: Vec<Vec<C64>>,
    scale: f64,
    refinements: usize,
    /// When set, persistent ambiguity is tolerated instead of reported;
    /// used by the degeneracy detector, which treats it as evidence.
    best_effort: bool,
}

impl<'a> Tracker<'a> {
    fn cluster_tol(&self) -> f64 {
        let auto = 1e-8 * self.scale.max(1.0);
        let noise_floor = 1e-7 * self.scale.max(1.0);
        self.opts.degeneracy_tol.unwrap_or(auto).max(noise_floor)
    }

    fn start(field: &'a MatrixField, opts: &'a TraceOpts, first_point: &[f64], best_effort: bool) -> Result<Self> {
        let mut first = roots_at(field, first_point)?;
        first.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
        let scale = first.iter().map(|v| v.norm()).fold(1.0, f64::max);
        Ok(Tracker {
            field,
            opts,
            points: vec![first_point.to_vec()],
            values: vec![first],
            scale,
            refinements: 0,
            best_effort,
        })
    }

    fn advance(&mut self, target: &[f64], depth: usize) -> Result<()> {
        let cur = self.values.last().unwrap().clone();
        let raw = roots_at(self.field, target)?;
        let perm = assign_min_cost(&cur, &raw);
        let matched: Vec<C64> = perm.iter().map(|&c| raw[c]).collect();
        for v in &matched {
            self.scale = self.scale.max(v.norm());
        }
        let movement = cur
            .iter()
            .zip(matched.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        let ctol = self.cluster_tol();
        let mut gap: Option<f64> = None;
        for j in 0..matched.len() {
            for k in j + 1..matched.len() {
                let d = (matched[j] - matched[k]).norm();
                if d > ctol {
                    gap = Some(gap.map_or(d, |g: f64| g.min(d)));
                }
            }
        }
        if let Some(g) = gap {
            if g < self.opts.refine_factor * movement {
                if depth >= self.opts.max_depth {
                    if self.best_effort {
                        self.points.push(target.to_vec());
                        self.values.push(matched);
                        return Ok(());
                    }
                    return Err(Error::RefinementExhausted {
                        lo: self.points.last().unwrap().clone(),
                        hi: target.to_vec(),
                    });
                }
                let mid = midpoint(self.points.last().unwrap(), target);
                self.refinements += 1;
                self.advance(&mid, depth + 1)?;
                self.advance(target, depth + 1)?;
                return Ok(());
            }
        }
        self.points.push(target.to_vec());
        self.values.push(matched);
        Ok(())
    }
}

/// Track the characteristic-polynomial roots of the field along the path.
pub fn track_eigenvalues(field: &MatrixField, path: &ParamPath, opts: &TraceOpts) -> Result<TraceResult> {
    path.validate(field.param_dim)?;
    let path = path.snapped();
    let mut tracker = Tracker::start(field, opts, &path.points[0], false)?;
    for target in &path.points[1..] {
        tracker.advance(target, 0)?;
    }
    let n = tracker.values[0].len();
    let monodromy = if path.closed {
        assign_min_cost(tracker.values.last().unwrap(), &tracker.values[0])
    } else {
        (0..n).collect()
    };
    let ctol = tracker.cluster_tol();
    let degeneracies = point_events(field, &tracker.points, &tracker.values, ctol)?;
    Ok(TraceResult {
        points: tracker.points,
        values: tracker.values,
        monodromy,
        degeneracies,
        refinement_count: tracker.refinements,
    })
}

/// Loop-level verdict from a closed trace.
pub fn s1_report(trace: &TraceResult) -> S1Report {
    let obstructed = trace.monodromy.iter().enumerate().any(|(j, &k)| j != k);
    S1Report { obstructed, monodromy: trace.monodromy.clone() }
}

/// Clusters of branch indices whose values agree within `tol`, by
/// single-linkage union.
fn clusters_at(values: &[C64], tol: f64) -> Vec<Vec<usize>> {
    let n = values.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for j in 0..n {
        for k in j + 1..n {
            if (values[j] - values[k]).norm() <= tol {
                let (a, b) = (find(&mut parent, j), find(&mut parent, k));
                if a != b {
                    parent[a] = b;
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); n];
    for j in 0..n {
        let r = find(&mut parent, j);
        groups[r].push(j);
    }
    groups.into_iter().filter(|g| !g.is_empty()).collect()
}

/// Orthonormal basis of the eigenspace for the value cluster `mu`.
fn cluster_eigenspace(m: &CMatN, mu: C64) -> Vec<Vec<C64>> {
    let mut shifted = m.clone();
    shifted.add_scaled_identity(-mu);
    for tol in [1e-9, 1e-7, 1e-5] {
        let ker = smallmat::kernel_basis(&shifted, tol);
        if !ker.is_empty() {
            return ker;
        }
    }
    Vec::new()
}

fn cluster_mean(values: &[C64], labels: &[usize]) -> C64 {
    let sum: C64 = labels.iter().map(|&j| values[j]).sum();
    sum / (labels.len() as f64)
}

fn closest_pair(values: &[C64], labels: &[usize]) -> (usize, usize) {
    let mut best = (labels[0], labels[labels.len() - 1]);
    let mut best_d = f64::INFINITY;
    for (i, &a) in labels.iter().enumerate() {
        for &b in labels.iter().skip(i + 1) {
            let d = (values[a] - values[b]).norm();
            if d < best_d {
                best_d = d;
                best = (a, b);
            }
        }
    }
    best
}

/// Events visible at the sampled points: a cluster whose eigenspace
/// dimension is at least two and exceeds what the same labels carry at
/// the neighboring samples.
fn point_events(
    field: &MatrixField,
    points: &[Vec<f64>],
    values: &[Vec<C64>],
    tol: f64,
) -> Result<Vec<DegeneracyEvent>> {
    let n_samples = points.len();
    // per-sample cluster descriptors: (sorted labels, eigenspace dim)
    let mut sample_clusters: Vec<Vec<(Vec<usize>, usize)>> = Vec::with_capacity(n_samples);
    for s in 0..n_samples {
        let mut descr = Vec::new();
        let groups = clusters_at(&values[s], tol);
        let m = eval_field(field, &points[s])?;
        for mut g in groups {
            g.sort_unstable();
            if g.len() < 2 {
                descr.push((g, 1));
                continue;
            }
            let mu = cluster_mean(&values[s], &g);
            let dim = cluster_eigenspace(&m, mu).len();
            descr.push((g, dim));
        }
        sample_clusters.push(descr);
    }
    let dim_of = |s: usize, labels: &[usize]| -> usize {
        for (g, d) in &sample_clusters[s] {
            if labels.iter().all(|l| g.contains(l)) {
                return *d;
            }
        }
        0
    };
    let mut flagged: Vec<(usize, Vec<usize>, usize)> = Vec::new();
    for s in 0..n_samples {
        for (labels, dim) in &sample_clusters[s] {
            if labels.len() < 2 || *dim < 2 {
                continue;
            }
            let left = if s > 0 { dim_of(s - 1, labels) } else { 0 };
            let right = if s + 1 < n_samples { dim_of(s + 1, labels) } else { 0 };
            if left.max(right) < *dim {
                flagged.push((s, labels.clone(), *dim));
            }
        }
    }
    // merge runs of consecutive flagged samples with the same labels
    let mut events: Vec<DegeneracyEvent> = Vec::new();
    let mut used = vec![false; flagged.len()];
    for i in 0..flagged.len() {
        if used[i] {
            continue;
        }
        let (mut s_rep, labels, mut dim) = flagged[i].clone();
        let mut s_end = flagged[i].0;
        for (j, item) in flagged.iter().enumerate().skip(i + 1) {
            if used[j] || item.1 != labels || item.0 != s_end + 1 {
                continue;
            }
            s_end = item.0;
            if item.2 > dim {
                dim = item.2;
                s_rep = item.0;
            }
            used[j] = true;
        }
        let lo = if flagged[i].0 > 0 { flagged[i].0 - 1 } else { flagged[i].0 };
        let hi = (s_end + 1).min(points.len() - 1);
        events.push(DegeneracyEvent {
            location: points[s_rep].clone(),
            bracket: (points[lo].clone(), points[hi].clone()),
            branches: closest_pair(&values[s_rep], &labels),
            eigenspace_dim: dim,
        });
    }
    Ok(events)
}

/// Scan adjacent samples for eigenspace flips that reveal a degeneracy
/// between them, bisecting to bracket the location.
#[allow(clippy::too_many_arguments)]
fn flip_scan(
    field: &MatrixField,
    p_a: &[f64],
    mu_a: C64,
    v_a: &[Vec<C64>],
    p_b: &[f64],
    mu_b: C64,
    v_b: &[Vec<C64>],
    depth: usize,
    max_depth: usize,
    out: &mut Vec<(Vec<f64>, Vec<f64>, usize)>,
) -> Result<()> {
    if v_a.is_empty() || v_b.is_empty() || v_a.len() != v_b.len() {
        return Ok(());
    }
    let overlap = smallmat::min_subspace_overlap(v_a, v_b);
    if overlap >= std::f64::consts::FRAC_1_SQRT_2 {
        return Ok(());
    }
    if depth >= max_depth {
        let n = eval_field(field, p_a)?.dim();
        let union = smallmat::union_dim(v_a, v_b, n);
        if union > v_a.len() {
            out.push((p_a.to_vec(), p_b.to_vec(), union));
        }
        return Ok(());
    }
    let p_m = midpoint(p_a, p_b);
    let m = eval_field(field, &p_m)?;
    let roots = smallmat::eigenvalues(&m)?;
    // take the root cluster closest to the segment's eigenvalue
    let target = (mu_a + mu_b) * 0.5;
    let mu_m = roots
        .iter()
        .min_by(|a, b| (*a - target).norm().partial_cmp(&(*b - target).norm()).unwrap())
        .copied()
        .unwrap_or(target);
    let v_m = cluster_eigenspace(&m, mu_m);
    flip_scan(field, p_a, mu_a, v_a, &p_m, mu_m, &v_m, depth + 1, max_depth, out)?;
    flip_scan(field, &p_m, mu_m, &v_m, p_b, mu_b, v_b, depth + 1, max_depth, out)?;
    Ok(())
}

/// Detect degeneracy events along the path: sampled points where
/// eigenvalue clusters merge with an eigenspace-dimension jump, plus
/// between-sample events revealed by eigenspace flips (bracketed by
/// bisection).
pub fn detect_degeneracies(field: &MatrixField, path: &ParamPath, tol: f64) -> Result<Vec<DegeneracyEvent>> {
    path.validate(field.param_dim)?;
    let path = path.snapped();
    let opts = TraceOpts { degeneracy_tol: Some(tol), ..TraceOpts::default() };
    let mut tracker = Tracker::start(field, &opts, &path.points[0], true)?;
    for target in &path.points[1..] {
        tracker.advance(target, 0)?;
    }
    let ctol = tracker.cluster_tol();
    let points = tracker.points;
    let values = tracker.values;
    let mut events = point_events(field, &points, &values, ctol)?;
    let flagged_samples: Vec<Vec<f64>> = events
        .iter()
        .flat_map(|e| [e.bracket.0.clone(), e.location.clone(), e.bracket.1.clone()])
        .collect();
    // eigenspaces per sample per cluster, for the flip scan
    let mut raw_flips: Vec<(Vec<f64>, Vec<f64>, usize)> = Vec::new();
    for s in 0..points.len() - 1 {
        if flagged_samples.contains(&points[s]) || flagged_samples.contains(&points[s + 1]) {
            continue;
        }
        let groups_a = clusters_at(&values[s], ctol);
        let groups_b = clusters_at(&values[s + 1], ctol);
        let m_a = eval_field(field, &points[s])?;
        let m_b = eval_field(field, &points[s + 1])?;
        for g in &groups_a {
            let mut labels = g.clone();
            labels.sort_unstable();
            let matching = groups_b.iter().find(|h| {
                let mut hh = (*h).clone();
                hh.sort_unstable();
                hh == labels
            });
            let Some(_) = matching else { continue };
            let mu_a = cluster_mean(&values[s], &labels);
            let mu_b = cluster_mean(&values[s + 1], &labels);
            let v_a = cluster_eigenspace(&m_a, mu_a);
            let v_b = cluster_eigenspace(&m_b, mu_b);
            flip_scan(
                field,
                &points[s],
                mu_a,
                &v_a,
                &points[s + 1],
                mu_b,
                &v_b,
                0,
                opts.max_depth,
                &mut raw_flips,
            )?;
        }
    }
    for (lo, hi, union) in raw_flips {
        let loc = midpoint(&lo, &hi);
        // the colliding pair is the closest pair at the nearer sample
        let nearest = points
            .iter()
            .enumerate()
            .min_by(|(_, p), (_, q)| {
                let dp: f64 = p.iter().zip(loc.iter()).map(|(a, b)| (a - b) * (a - b)).sum();
                let dq: f64 = q.iter().zip(loc.iter()).map(|(a, b)| (a - b) * (a - b)).sum();
                dp.partial_cmp(&dq).unwrap()
            })
            .map(|(i, _)| i)
            .unwrap_or(0);
        let all: Vec<usize> = (0..values[nearest].len()).collect();
        events.push(DegeneracyEvent {
            location: loc,
            bracket: (lo, hi),
            branches: closest_pair(&values[nearest], &all),
            eigenspace_dim: union,
        });
    }
    Ok(events)
}

/// Transport a unit eigenvector of a simple branch around a closed loop
/// and report the closure overlap.
///
/// The gauge maximizes the real part of the overlap with the previous
/// sample's vector; for real symmetric fields the result is a sign, for
/// complex fields its argument is the discrete Berry phase.
pub fn line_holonomy(
    field: &MatrixField,
    loop_path: &ParamPath,
    branch: usize,
    opts: &TraceOpts,
) -> Result<HolonomyResult> {
    if !loop_path.closed {
        return Err(Error::InvalidPath { detail: "holonomy needs a closed loop".into() });
    }
    let trace = track_eigenvalues(field, loop_path, opts)?;
    let n_branches = trace.values[0].len();
    if branch >= n_branches {
        return Err(Error::InvalidPath { detail: format!("branch {branch} out of range (n = {n_branches})") });
    }
    let ctol = {
        let scale = trace
            .values
            .iter()
            .flat_map(|v| v.iter())
            .map(|v| v.norm())
            .fold(1.0, f64::max);
        opts.degeneracy_tol
            .unwrap_or(1e-8 * scale)
            .max(1e-7 * scale)
    };
    for vals in &trace.values {
        for (k, v) in vals.iter().enumerate() {
            if k != branch && (v - vals[branch]).norm() <= ctol {
                return Err(Error::BranchDegenerate { branch });
            }
        }
    }
    // unit eigenvector at a point; the branch value is re-anchored to the
    // nearest root of the local matrix so refinement midpoints get their
    // true eigenvalue, not an interpolated guess
    let vector_at = |point: &[f64], mu_guess: C64| -> Result<Vec<C64>> {
        let m = eval_field(field, point)?;
        let roots = smallmat::eigenvalues(&m)?;
        let mu = roots
            .iter()
            .min_by(|a, b| {
                (*a - mu_guess).norm().partial_cmp(&(*b - mu_guess).norm()).unwrap()
            })
            .copied()
            .unwrap_or(mu_guess);
        let ker = cluster_eigenspace(&m, mu);
        match ker.len() {
            1 => Ok(ker.into_iter().next().unwrap()),
            _ => Err(Error::BranchDegenerate { branch }),
        }
    };
    let first = vector_at(&trace.points[0], trace.values[0][branch])?;
    let mut prev = first.clone();
    let mut samples_used = trace.points.len();
    for s in 1..trace.points.len() {
        let mut segments: Vec<(Vec<f64>, C64)> = vec![(trace.points[s].clone(), trace.values[s][branch])];
        let mut seg_prev_point = trace.points[s - 1].clone();
        let mut seg_prev_mu = trace.values[s - 1][branch];
        let mut depth = 0usize;
        while let Some((pt, mu)) = segments.pop() {
            let mut v = vector_at(&pt, mu)?;
            let overlap: C64 = prev.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
            if overlap.norm() < opts.min_overlap {
                if depth >= opts.max_depth {
                    return Err(Error::RefinementExhausted { lo: seg_prev_point, hi: pt });
                }
                depth += 1;
                samples_used += 1;
                let mid = midpoint(&seg_prev_point, &pt);
                let mid_mu = (seg_prev_mu + mu) * 0.5;
                segments.push((pt, mu));
                segments.push((mid, mid_mu));
                continue;
            }
            let phase = overlap.conj() / overlap.norm();
            for e in v.iter_mut() {
                *e *= phase;
            }
            seg_prev_point = pt;
            seg_prev_mu = mu;
            prev = v;
        }
    }
    let closure: C64 = first.iter().zip(prev.iter()).map(|(a, b)| a.conj() * b).sum();
    let value = if closure.norm() > 0.0 { closure / closure.norm() } else { C64::new(1.0, 0.0) };
    Ok(HolonomyResult { branch, value, samples_used })
}

/// Scalar factor relating the principal eigenvector seen by the boosted
/// observer to the one seen by `u`:
/// `1/sqrt(1-w^2) [1 + (-(ExB).w + lambda_f E.w - lambda_f_star B.w) / (lambda_t + (E^2+B^2)/2)]`.
///
/// For null fields and radial `w` this is the Doppler shift ratio
/// `sqrt((1-w_r)/(1+w_r))`.
pub fn doppler_factor(f: &EMField, u: &Vec4, w: [f64; 3]) -> Result<f64> {
    u.check_observer()?;
    let w_sq = dot3(w, w);
    if w_sq >= 1.0 {
        return Err(Error::SpeedNotSubluminal { speed: w_sq.sqrt() });
    }
    let ev = eigenvalues_em(f);
    let denom = ev.lambda_t + 0.5 * (f.e_sq() + f.b_sq());
    if denom <= 0.0 {
        return Err(Error::ZeroField);
    }
    let poynting = cross3(f.e, f.b);
    let numer = -dot3(poynting, w) + ev.lambda_f * dot3(f.e, w) - ev.lambda_f_star * dot3(f.b, w);
    Ok((1.0 + numer / denom) / (1.0 - w_sq).sqrt())
}

/// Re-exported here because the contract pairs it with this module's
/// Doppler factor in tests.
pub use crate::eigen::principal_eigenvector;
