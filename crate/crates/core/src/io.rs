//! JSON interchange: matrices, GZ values, stratum reports and verdict records.
//!
//! Non-finite floats are written as `null`.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::algebra::{AlgebraContext, Family};
use crate::error::{GzError, Result};
use crate::invariants::GzValues;
use crate::linalg::{CMat, C64};
use crate::regularity::Verdict;
use crate::strata::{StratumReport, StratumVerdict};

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

/// `{"n", "family", "re", "im"}` with row-major nested arrays.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub n: usize,
    pub family: Family,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixJson {
    pub fn from_matrix(family: Family, m: &CMat) -> MatrixJson {
        let n = m.nrows();
        let rows = |f: fn(&C64) -> f64| (0..n).map(|r| (0..n).map(|c| f(&m[(r, c)])).collect()).collect();
        MatrixJson { n, family, re: rows(|z| z.re), im: rows(|z| z.im) }
    }

    pub fn to_matrix(&self) -> Result<CMat> {
        let n = self.n;
        let bad = |what: &str| GzError::Parse(format!("{what} must be a {n}x{n} array"));
        if self.re.len() != n || self.re.iter().any(|r| r.len() != n) {
            return Err(bad("re"));
        }
        if self.im.len() != n || self.im.iter().any(|r| r.len() != n) {
            return Err(bad("im"));
        }
        Ok(CMat::from_fn(n, n, |r, c| C64::new(self.re[r][c], self.im[r][c])))
    }
}

pub fn matrix_to_json(family: Family, m: &CMat) -> String {
    serde_json::to_string(&MatrixJson::from_matrix(family, m)).expect("serializable")
}

/// Parses a matrix and checks membership in the family's top algebra.
pub fn parse_member(text: &str) -> Result<(AlgebraContext, CMat)> {
    let mj: MatrixJson = serde_json::from_str(text).map_err(|e| GzError::Parse(e.to_string()))?;
    let m = mj.to_matrix()?;
    let ctx = AlgebraContext::new(mj.family, mj.n)?;
    ctx.check_member(&m)?;
    Ok((ctx, m))
}

/// `{"index": [[i, j], ...], "re": [...], "im": [...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GzValuesJson {
    pub index: Vec<[usize; 2]>,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl From<&GzValues> for GzValuesJson {
    fn from(v: &GzValues) -> Self {
        GzValuesJson {
            index: v.index.iter().map(|&(i, j)| [i, j]).collect(),
            re: v.values.iter().map(|z| z.re).collect(),
            im: v.values.iter().map(|z| z.im).collect(),
        }
    }
}

impl GzValuesJson {
    pub fn values(&self) -> Result<Vec<C64>> {
        if self.re.len() != self.im.len() || self.re.len() != self.index.len() {
            return Err(GzError::Parse("index, re and im must have equal lengths".into()));
        }
        Ok(self.re.iter().zip(&self.im).map(|(&a, &b)| C64::new(a, b)).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexList {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl ComplexList {
    pub fn new(v: &[C64]) -> ComplexList {
        ComplexList { re: v.iter().map(|z| z.re).collect(), im: v.iter().map(|z| z.im).collect() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelJson {
    pub level: usize,
    pub spectrum: ComplexList,
    pub zero_multiplicity: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarginJson {
    pub levels: [usize; 2],
    pub margin: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StratumVerdictJson {
    pub member: bool,
    pub margin: Option<f64>,
    pub boundary: bool,
}

impl From<&StratumVerdict> for StratumVerdictJson {
    fn from(v: &StratumVerdict) -> Self {
        StratumVerdictJson { member: v.member, margin: finite(v.margin), boundary: v.boundary }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StratumReportJson {
    pub n: usize,
    pub levels: Vec<LevelJson>,
    pub margins: Vec<MarginJson>,
    pub tol_spec: f64,
    pub in_g_zero: StratumVerdictJson,
    pub in_g_theta: bool,
    pub boundary: bool,
    pub m_levels: Vec<usize>,
    /// 2^m when the element lies in g_Θ and n > 3.
    pub components: Option<u64>,
}

impl From<&StratumReport> for StratumReportJson {
    fn from(r: &StratumReport) -> Self {
        StratumReportJson {
            n: r.n,
            levels: r
                .levels
                .iter()
                .map(|l| LevelJson {
                    level: l.level,
                    spectrum: ComplexList::new(&l.spectrum),
                    zero_multiplicity: l.zero_multiplicity,
                })
                .collect(),
            margins: r
                .levels
                .windows(2)
                .zip(&r.margins)
                .map(|(w, &m)| MarginJson { levels: [w[0].level, w[1].level], margin: finite(m) })
                .collect(),
            tol_spec: r.tol_spec,
            in_g_zero: (&r.in_g_zero).into(),
            in_g_theta: r.in_g_theta,
            boundary: r.boundary,
            m_levels: r.m_levels.clone(),
            components: (r.in_g_theta && r.n > 3).then(|| 1u64 << r.m_levels.len()),
        }
    }
}

/// Hex SHA-256 of the little-endian bit patterns of (re, im), row-major.
pub fn matrix_hash(m: &CMat) -> String {
    let mut h = Sha256::new();
    h.update((m.nrows() as u64).to_le_bytes());
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            h.update(m[(r, c)].re.to_le_bytes());
            h.update(m[(r, c)].im.to_le_bytes());
        }
    }
    hex::encode(h.finalize())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerdictRecord {
    pub x_hash: String,
    pub sreg_rank: bool,
    pub sreg_chain: bool,
    /// The smaller of the two rank-decision margins.
    pub margin: Option<f64>,
}

impl VerdictRecord {
    pub fn new(x: &CMat, rank: Verdict, chain: Verdict) -> VerdictRecord {
        VerdictRecord {
            x_hash: matrix_hash(x),
            sreg_rank: rank.holds,
            sreg_chain: chain.holds,
            margin: finite(rank.margin.min(chain.margin)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariants::kw_map;
    use crate::sampling::{random_element, rng_from_seed};
    use crate::strata::{in_g_theta, SpectralTol};

    #[test]
    fn matrix_round_trip() {
        let ctx = AlgebraContext::new(Family::Orthogonal, 5).unwrap();
        let x = random_element(ctx.top(), &mut rng_from_seed(1), 1.0);
        let text = matrix_to_json(Family::Orthogonal, &x);
        let (back_ctx, back) = parse_member(&text).unwrap();
        assert_eq!(back, x);
        assert_eq!(back_ctx.n(), 5);
        assert_eq!(matrix_hash(&back), matrix_hash(&x));
    }

    #[test]
    fn parse_errors_are_reported() {
        assert!(matches!(parse_member("{not json"), Err(GzError::Parse(_))));
        let short = r#"{"n": 2, "family": "gl", "re": [[1.0]], "im": [[0.0]]}"#;
        assert!(matches!(parse_member(short), Err(GzError::Parse(_))));
        let outside = r#"{"n": 2, "family": "so", "re": [[1.0, 0.0], [0.0, 1.0]], "im": [[0.0, 0.0], [0.0, 0.0]]}"#;
        assert!(matches!(parse_member(outside), Err(GzError::NotMember(_))));
    }

    #[test]
    fn values_and_reports_serialize() {
        let ctx = AlgebraContext::new(Family::Orthogonal, 4).unwrap();
        let x = random_element(ctx.top(), &mut rng_from_seed(2), 1.0);
        let v = kw_map(&ctx, &x).unwrap();
        let j = GzValuesJson::from(&v);
        assert_eq!(j.index, vec![[2, 1], [3, 1], [4, 1], [4, 2]]);
        assert_eq!(j.values().unwrap(), v.values);
        let rep = in_g_theta(&ctx, &x, SpectralTol::default()).unwrap();
        let s = serde_json::to_string(&StratumReportJson::from(&rep)).unwrap();
        let back: StratumReportJson = serde_json::from_str(&s).unwrap();
        assert_eq!(back.components, Some(1));
        assert_eq!(back.margins.len(), 2);
    }
}
