//! JSON wire formats: complex numbers as `[re, im]`, matrices as nested
//! row-major arrays, biquaternions as `{a0, A, chirality}`. Output
//! structs serialize in declaration order so identical invocations emit
//! byte-identical documents.

use biquat::alg_core::{Biquat, CMat4, Chirality, C64};
use biquat::bundle::{
    CMatN, DegeneracyEvent, HolonomyResult, MatrixField, ParamPath, Scalars, TraceResult,
};
use biquat::mink::{RMat4, Vec4};
use serde::{Deserialize, Serialize};

pub type Cpx = [f64; 2];

pub fn cpx(z: C64) -> Cpx {
    [z.re, z.im]
}

pub fn to_c64(v: Cpx) -> C64 {
    C64::new(v[0], v[1])
}

#[derive(Debug, Serialize, Deserialize)]
pub struct BiquatJson {
    pub a0: Cpx,
    #[serde(rename = "A")]
    pub a: [Cpx; 3],
    pub chirality: String,
}

impl BiquatJson {
    pub fn from_biquat(q: &Biquat) -> Self {
        BiquatJson {
            a0: cpx(q.scalar),
            a: [cpx(q.vector[0]), cpx(q.vector[1]), cpx(q.vector[2])],
            chirality: match q.chirality {
                Chirality::S => "S".into(),
                Chirality::SBar => "SBar".into(),
            },
        }
    }

    pub fn to_biquat(&self) -> Result<Biquat, String> {
        let chirality = match self.chirality.as_str() {
            "S" => Chirality::S,
            "SBar" => Chirality::SBar,
            other => return Err(format!("unknown chirality '{other}'")),
        };
        Ok(Biquat::new(
            to_c64(self.a0),
            [to_c64(self.a[0]), to_c64(self.a[1]), to_c64(self.a[2])],
            chirality,
        ))
    }
}

pub type CMat4Json = [[Cpx; 4]; 4];

pub fn cmat4_from(j: &CMat4Json) -> CMat4 {
    let mut m = CMat4::zero();
    for r in 0..4 {
        for c in 0..4 {
            m.0[r][c] = to_c64(j[r][c]);
        }
    }
    m
}

pub type RMat4Json = [[f64; 4]; 4];

pub fn rmat4_json(m: &RMat4) -> RMat4Json {
    m.0
}

pub fn rmat4_from(j: &RMat4Json) -> RMat4 {
    RMat4(*j)
}

pub fn vec4_json(v: &Vec4) -> [f64; 4] {
    v.as_array()
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ParamPathJson {
    pub points: Vec<Vec<f64>>,
    pub closed: bool,
}

impl ParamPathJson {
    pub fn to_path(&self) -> ParamPath {
        ParamPath { points: self.points.clone(), closed: self.closed }
    }
}

/// Matrix of arbitrary order n <= 8 as nested rows of `[re, im]` pairs.
pub fn cmatn_from(rows: &[Vec<Cpx>]) -> Result<CMatN, String> {
    let n = rows.len();
    if n == 0 || n > 8 || !rows.iter().all(|r| r.len() == n) {
        return Err("matrix must be square with order between 1 and 8".into());
    }
    Ok(CMatN::from_rows(
        rows.iter()
            .map(|r| r.iter().map(|e| to_c64(*e)).collect())
            .collect(),
    ))
}

/// Explicit-sample field description accepted by `--field-file`.
#[derive(Debug, Serialize, Deserialize)]
pub struct ExplicitFieldJson {
    pub ts: Vec<f64>,
    pub matrices: Vec<Vec<Vec<Cpx>>>,
    pub scalars: String,
}

impl ExplicitFieldJson {
    pub fn to_field(&self) -> Result<MatrixField, String> {
        let scalars = match self.scalars.as_str() {
            "real" => Scalars::RealField,
            "complex" => Scalars::ComplexField,
            other => return Err(format!("unknown scalars '{other}' (use real|complex)")),
        };
        let mats = self
            .matrices
            .iter()
            .map(|m| cmatn_from(m))
            .collect::<Result<Vec<_>, _>>()?;
        MatrixField::from_samples(self.ts.clone(), mats, scalars).map_err(|e| e.to_string())
    }
}

#[derive(Debug, Serialize)]
pub struct DegeneracyEventJson {
    pub location: Vec<f64>,
    pub bracket: [Vec<f64>; 2],
    pub branches: [usize; 2],
    pub eigenspace_dim: usize,
}

impl DegeneracyEventJson {
    pub fn from_event(e: &DegeneracyEvent) -> Self {
        DegeneracyEventJson {
            location: e.location.clone(),
            bracket: [e.bracket.0.clone(), e.bracket.1.clone()],
            branches: [e.branches.0, e.branches.1],
            eigenspace_dim: e.eigenspace_dim,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct TraceResultJson {
    pub points: Vec<Vec<f64>>,
    pub branches: Vec<Vec<Cpx>>,
    pub monodromy: Vec<usize>,
    pub s1_obstructed: bool,
    pub degeneracies: Vec<DegeneracyEventJson>,
    pub refinement_count: usize,
    /// Present when the invocation requested a branch holonomy.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub holonomy: Option<HolonomyJson>,
}

impl TraceResultJson {
    pub fn from_trace(t: &TraceResult) -> Self {
        let report = biquat::bundle::s1_report(t);
        TraceResultJson {
            points: t.points.clone(),
            branches: t
                .values
                .iter()
                .map(|vals| vals.iter().map(|v| cpx(*v)).collect())
                .collect(),
            monodromy: t.monodromy.clone(),
            s1_obstructed: report.obstructed,
            degeneracies: t.degeneracies.iter().map(DegeneracyEventJson::from_event).collect(),
            refinement_count: t.refinement_count,
            holonomy: None,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct HolonomyJson {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sign: Option<i8>,
    pub value: Cpx,
    pub phase: f64,
    pub branch: usize,
    pub samples_used: usize,
}

impl HolonomyJson {
    pub fn from_result(h: &HolonomyResult, real_field: bool) -> Self {
        HolonomyJson {
            sign: if real_field { h.sign() } else { None },
            value: cpx(h.value),
            phase: h.value.arg(),
            branch: h.branch,
            samples_used: h.samples_used,
        }
    }
}
