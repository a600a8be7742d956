//! Matrix realizations of so(n) and gl(n), the subalgebra chain, the involutions and roots.
//!
//! Orthogonal algebras preserve the form with ones on the skew diagonal, so the
//! diagonal matrices form a Cartan subalgebra and the upper triangular ones a Borel.
//! Vectors are labelled by signed indices 1..l, (0), -l..-1 in row order.

use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{GzError, Result};
use crate::linalg::{max_abs, to_complex, CMat, CVec, C64, ZERO};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "so")]
    Orthogonal,
    #[serde(rename = "gl")]
    GeneralLinear,
}

impl Family {
    pub fn tag(self) -> &'static str {
        match self {
            Family::Orthogonal => "so",
            Family::GeneralLinear => "gl",
        }
    }
}

impl std::str::FromStr for Family {
    type Err = GzError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "so" | "orthogonal" => Ok(Family::Orthogonal),
            "gl" | "general-linear" => Ok(Family::GeneralLinear),
            other => Err(GzError::Invalid(format!("unknown family '{other}'"))),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Type B (odd size) or type D (even size).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrthogonalType {
    B,
    D,
}

/// Root ε(a) − ε(b) for signed indices a, b, with ε(-k) = -ε_k and ε(0) = 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Root {
    pub a: i32,
    pub b: i32,
}

impl Root {
    /// ε_i − ε_j
    pub fn diff(i: i32, j: i32) -> Root {
        Root { a: i, b: j }
    }
    /// ε_i + ε_j
    pub fn sum(i: i32, j: i32) -> Root {
        Root { a: i, b: -j }
    }
    /// −ε_i − ε_j
    pub fn neg_sum(i: i32, j: i32) -> Root {
        Root { a: -i, b: j }
    }
    /// ε_i (type B only)
    pub fn short(i: i32) -> Root {
        Root { a: i, b: 0 }
    }
    /// −ε_i (type B only)
    pub fn neg_short(i: i32) -> Root {
        Root { a: 0, b: i }
    }

    pub fn negated(&self) -> Root {
        Root { a: self.b, b: self.a }
    }

    /// Coefficients on ε_1..ε_l.
    pub fn weight(&self, l: usize) -> Vec<i32> {
        let mut w = vec![0; l];
        let mut add = |s: i32, sign: i32| {
            if s != 0 {
                w[(s.unsigned_abs() - 1) as usize] += sign * s.signum();
            }
        };
        add(self.a, 1);
        add(self.b, -1);
        w
    }

    /// Value on the diagonal element with ε-coordinates `eps`.
    pub fn eval(&self, eps: &[C64]) -> C64 {
        let e = |s: i32| -> C64 {
            match s {
                0 => ZERO,
                s if s > 0 => eps[(s - 1) as usize],
                s => -eps[(-s - 1) as usize],
            }
        };
        e(self.a) - e(self.b)
    }
}

impl fmt::Display for Root {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = self.a.unsigned_abs().max(self.b.unsigned_abs()) as usize;
        let mut first = true;
        for (k, c) in self.weight(l).iter().enumerate() {
            if *c == 0 {
                continue;
            }
            let sign = if *c < 0 { "-" } else if first { "" } else { "+" };
            let mag = if c.abs() == 1 { String::new() } else { c.abs().to_string() };
            write!(f, "{sign}{mag}e{}", k + 1)?;
            first = false;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// A single algebra so(n) or gl(n) with its fixed basis.
#[derive(Clone, Debug)]
pub struct Algebra {
    family: Family,
    n: usize,
    basis: Vec<CMat>,
    positions: Vec<(usize, usize)>,
    form: Option<DMatrix<f64>>,
    gram: DMatrix<f64>,
}

impl Algebra {
    pub fn new(family: Family, n: usize) -> Result<Algebra> {
        if n < 1 {
            return Err(GzError::SizeTooSmall(n, 1));
        }
        let mut positions = Vec::new();
        let mut basis = Vec::new();
        let form = match family {
            Family::Orthogonal => {
                for p in 0..n {
                    for q in 0..n {
                        if p + q + 1 < n {
                            let mut m = CMat::zeros(n, n);
                            m[(p, q)] += 1.0;
                            m[(n - 1 - q, n - 1 - p)] -= 1.0;
                            positions.push((p, q));
                            basis.push(m);
                        }
                    }
                }
                let mut s = DMatrix::<f64>::zeros(n, n);
                for p in 0..n {
                    s[(p, n - 1 - p)] = 1.0;
                }
                Some(s)
            }
            Family::GeneralLinear => {
                for p in 0..n {
                    for q in 0..n {
                        let mut m = CMat::zeros(n, n);
                        m[(p, q)] = C64::new(1.0, 0.0);
                        positions.push((p, q));
                        basis.push(m);
                    }
                }
                None
            }
        };
        let d = basis.len();
        let mut gram = DMatrix::<f64>::zeros(d, d);
        for k in 0..d {
            for m in 0..d {
                gram[(k, m)] = crate::linalg::trace(&(&basis[k] * &basis[m])).re;
            }
        }
        Ok(Algebra { family, n, basis, positions, form, gram })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn rank(&self) -> usize {
        match self.family {
            Family::Orthogonal => self.n / 2,
            Family::GeneralLinear => self.n,
        }
    }

    pub fn orthogonal_type(&self) -> Option<OrthogonalType> {
        match self.family {
            Family::Orthogonal if self.n % 2 == 1 => Some(OrthogonalType::B),
            Family::Orthogonal => Some(OrthogonalType::D),
            Family::GeneralLinear => None,
        }
    }

    pub fn basis(&self) -> &[CMat] {
        &self.basis
    }

    /// Matrix position (row, col) carrying the +1 of each basis element.
    pub fn basis_positions(&self) -> &[(usize, usize)] {
        &self.positions
    }

    pub fn form(&self) -> Option<&DMatrix<f64>> {
        self.form.as_ref()
    }

    /// Gram matrix Tr(B_k B_m) of the trace form on the basis.
    pub fn trace_gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    fn check_shape(&self, x: &CMat) -> Result<()> {
        if x.nrows() != self.n || x.ncols() != self.n {
            return Err(GzError::Shape { expected: self.n, rows: x.nrows(), cols: x.ncols() });
        }
        Ok(())
    }

    /// ‖xᵀS + Sx‖_∞ (zero for gl).
    pub fn membership_residual(&self, x: &CMat) -> Result<f64> {
        self.check_shape(x)?;
        Ok(match &self.form {
            Some(s) => {
                let s = to_complex(s);
                max_abs(&(x.transpose() * &s + &s * x))
            }
            None => 0.0,
        })
    }

    pub fn check_member(&self, x: &CMat) -> Result<()> {
        let r = self.membership_residual(x)?;
        let scale = max_abs(x);
        if r > 1e-12 * scale {
            return Err(GzError::NotMember(r / scale));
        }
        Ok(())
    }

    /// Coordinates of a member in the basis (the basis is Frobenius-orthogonal).
    pub fn coords(&self, x: &CMat) -> CVec {
        let n = self.n;
        CVec::from_iterator(
            self.positions.len(),
            self.positions.iter().map(|&(p, q)| match self.family {
                Family::Orthogonal => (x[(p, q)] - x[(n - 1 - q, n - 1 - p)]) * 0.5,
                Family::GeneralLinear => x[(p, q)],
            }),
        )
    }

    pub fn from_coords(&self, c: &CVec) -> CMat {
        let n = self.n;
        let mut m = CMat::zeros(n, n);
        for (&(p, q), &v) in self.positions.iter().zip(c.iter()) {
            m[(p, q)] += v;
            if self.family == Family::Orthogonal {
                m[(n - 1 - q, n - 1 - p)] -= v;
            }
        }
        m
    }

    /// Matrix of ad(y) on the basis coordinates.
    pub fn ad_matrix(&self, y: &CMat) -> CMat {
        let d = self.dim();
        let mut ad = CMat::zeros(d, d);
        for (k, b) in self.basis.iter().enumerate() {
            let c = self.coords(&(y * b - b * y));
            ad.set_column(k, &c);
        }
        ad
    }

    /// Position of a signed index.
    pub fn position(&self, s: i32) -> usize {
        let n = self.n as i32;
        let l = n / 2;
        match s {
            0 => l as usize,
            s if s > 0 => (s - 1) as usize,
            s => (n + s) as usize,
        }
    }

    /// Signed index of a position.
    pub fn signed_index(&self, p: usize) -> i32 {
        let n = self.n;
        let l = n / 2;
        if p < l {
            p as i32 + 1
        } else if n % 2 == 1 && p == l {
            0
        } else {
            -((n - p) as i32)
        }
    }

    /// Diagonal element with ε-coordinates `eps` (length r for so, n for gl).
    pub fn cartan_element(&self, eps: &[C64]) -> Result<CMat> {
        if eps.len() != self.rank() {
            return Err(GzError::Invalid(format!(
                "expected {} Cartan coordinates, got {}",
                self.rank(),
                eps.len()
            )));
        }
        let n = self.n;
        let mut m = CMat::zeros(n, n);
        match self.family {
            Family::GeneralLinear => {
                for (k, v) in eps.iter().enumerate() {
                    m[(k, k)] = *v;
                }
            }
            Family::Orthogonal => {
                for (k, v) in eps.iter().enumerate() {
                    m[(k, k)] = *v;
                    m[(n - 1 - k, n - 1 - k)] = -*v;
                }
            }
        }
        Ok(m)
    }

    /// ε-coordinates of the diagonal part of x (orthogonal family).
    pub fn cartan_coords(&self, x: &CMat) -> Vec<C64> {
        (0..self.rank()).map(|k| x[(k, k)]).collect()
    }

    fn validate_root(&self, r: Root) -> Result<()> {
        if self.family != Family::Orthogonal {
            return Err(GzError::NotOrthogonal);
        }
        let l = (self.n / 2) as i32;
        let bad = || GzError::InvalidRoot(format!("{r} for so({})", self.n));
        let ok_index = |s: i32| s.abs() <= l && (s != 0 || self.n % 2 == 1);
        if !ok_index(r.a) || !ok_index(r.b) || r.a == r.b || r.a == -r.b {
            return Err(bad());
        }
        Ok(())
    }

    /// The matrix E_{a,b} − E_{−b,−a} spanning the root space of ε(a) − ε(b).
    pub fn root_vector(&self, r: Root) -> Result<CMat> {
        self.validate_root(r)?;
        let n = self.n;
        let (p, q) = (self.position(r.a), self.position(r.b));
        let mut m = CMat::zeros(n, n);
        m[(p, q)] += 1.0;
        m[(n - 1 - q, n - 1 - p)] -= 1.0;
        Ok(m)
    }

    /// Positive roots, one per upper triangular basis element.
    pub fn positive_roots(&self) -> Result<Vec<Root>> {
        if self.family != Family::Orthogonal {
            return Err(GzError::NotOrthogonal);
        }
        Ok(self
            .positions
            .iter()
            .filter(|(p, q)| p < q)
            .map(|&(p, q)| Root { a: self.signed_index(p), b: self.signed_index(q) })
            .collect())
    }

    pub fn simple_roots(&self) -> Result<Vec<Root>> {
        let ty = self.orthogonal_type().ok_or(GzError::NotOrthogonal)?;
        let l = (self.n / 2) as i32;
        if l < 1 || (ty == OrthogonalType::D && l < 2) {
            return Err(GzError::SizeTooSmall(self.n, 3));
        }
        let mut out: Vec<Root> = (1..l).map(|i| Root::diff(i, i + 1)).collect();
        match ty {
            OrthogonalType::B => out.push(Root::short(l)),
            OrthogonalType::D => out.push(Root::sum(l - 1, l)),
        }
        Ok(out)
    }
}

/// The involution whose fixed algebra is the next algebra down the chain.
#[derive(Clone, Debug)]
pub struct InvolutionData {
    /// θ on basis coordinates.
    pub theta_matrix: DMatrix<f64>,
    pub fixed_projector: DMatrix<f64>,
    pub anti_projector: DMatrix<f64>,
    /// Type B: the torus element t with θ = Ad(t). Type D: the permutation
    /// exchanging e_l and e_{-l}; it has determinant -1, and θ(x) = P x P.
    pub representative: DMatrix<f64>,
}

impl InvolutionData {
    pub fn new(alg: &Algebra) -> Result<InvolutionData> {
        if alg.family() != Family::Orthogonal {
            return Err(GzError::NotOrthogonal);
        }
        let n = alg.n();
        if n < 3 {
            return Err(GzError::SizeTooSmall(n, 3));
        }
        let l = n / 2;
        let mut rep = DMatrix::<f64>::zeros(n, n);
        if n % 2 == 1 {
            for p in 0..n {
                rep[(p, p)] = if p == l { 1.0 } else { -1.0 };
            }
        } else {
            for p in 0..n {
                let q = if p == l - 1 {
                    l
                } else if p == l {
                    l - 1
                } else {
                    p
                };
                rep[(p, q)] = 1.0;
            }
        }
        let r = to_complex(&rep);
        let d = alg.dim();
        let mut theta = DMatrix::<f64>::zeros(d, d);
        for (k, b) in alg.basis().iter().enumerate() {
            let c = alg.coords(&(&r * b * &r));
            for m in 0..d {
                theta[(m, k)] = c[m].re;
            }
        }
        let id = DMatrix::<f64>::identity(d, d);
        let fixed = (&id + &theta) * 0.5;
        let anti = (&id - &theta) * 0.5;
        Ok(InvolutionData { theta_matrix: theta, fixed_projector: fixed, anti_projector: anti, representative: rep })
    }

    pub fn apply(&self, x: &CMat) -> CMat {
        let r = to_complex(&self.representative);
        &r * x * &r
    }
}

/// One step of the chain: g_i with its embedding into the top algebra.
#[derive(Clone, Debug)]
pub struct ChainLevel {
    index: usize,
    algebra: Algebra,
    /// n × i isometry E with x_i = Eᵀ x E.
    embedding: DMatrix<f64>,
    /// Coordinate matrix of y ↦ E y Eᵀ.
    lift: DMatrix<f64>,
}

impl ChainLevel {
    pub fn index(&self) -> usize {
        self.index
    }
    pub fn algebra(&self) -> &Algebra {
        &self.algebra
    }
    pub fn embedding(&self) -> &DMatrix<f64> {
        &self.embedding
    }
    /// Maps level coordinates to top-level coordinates.
    pub fn lift(&self) -> &DMatrix<f64> {
        &self.lift
    }
}

/// Isometry from size m-1 into size m compatible with the forms.
fn chain_step(family: Family, m: usize) -> DMatrix<f64> {
    let mut q = DMatrix::<f64>::zeros(m, m - 1);
    match family {
        Family::GeneralLinear => {
            for c in 0..m - 1 {
                q[(c, c)] = 1.0;
            }
        }
        Family::Orthogonal if m % 2 == 1 => {
            let mid = m / 2;
            for c in 0..m - 1 {
                q[(if c < mid { c } else { c + 1 }, c)] = 1.0;
            }
        }
        Family::Orthogonal => {
            let l = m / 2;
            for c in 0..m - 1 {
                if c + 1 < l {
                    q[(c, c)] = 1.0;
                } else if c + 1 == l {
                    let h = std::f64::consts::FRAC_1_SQRT_2;
                    q[(l - 1, c)] = h;
                    q[(l, c)] = h;
                } else {
                    q[(c + 1, c)] = 1.0;
                }
            }
        }
    }
    q
}

/// The full chain g_{first} ⊂ … ⊂ g_n.
#[derive(Clone, Debug)]
pub struct AlgebraContext {
    levels: Vec<ChainLevel>,
}

impl AlgebraContext {
    pub fn new(family: Family, n: usize) -> Result<AlgebraContext> {
        if n < 2 {
            return Err(GzError::SizeTooSmall(n, 2));
        }
        let first = Self::first_index_for(family);
        let mut levels = Vec::new();
        let top = Algebra::new(family, n)?;
        let mut e = DMatrix::<f64>::identity(n, n);
        let mut i = n;
        loop {
            let algebra = if i == n { top.clone() } else { Algebra::new(family, i)? };
            let mut lift = DMatrix::<f64>::zeros(top.dim(), algebra.dim());
            let ec = to_complex(&e);
            for (k, b) in algebra.basis().iter().enumerate() {
                let c = top.coords(&(&ec * b * ec.transpose()));
                for m in 0..top.dim() {
                    lift[(m, k)] = c[m].re;
                }
            }
            levels.push(ChainLevel { index: i, algebra, embedding: e.clone(), lift });
            if i == first {
                break;
            }
            e = &e * chain_step(family, i);
            i -= 1;
        }
        levels.reverse();
        Ok(AlgebraContext { levels })
    }

    fn first_index_for(family: Family) -> usize {
        match family {
            Family::Orthogonal => 2,
            Family::GeneralLinear => 1,
        }
    }

    pub fn family(&self) -> Family {
        self.top().family()
    }

    pub fn n(&self) -> usize {
        self.top().n()
    }

    pub fn top(&self) -> &Algebra {
        &self.levels.last().expect("nonempty chain").algebra
    }

    pub fn dim(&self) -> usize {
        self.top().dim()
    }

    pub fn rank(&self) -> usize {
        self.top().rank()
    }

    pub fn first_index(&self) -> usize {
        self.levels[0].index
    }

    pub fn levels(&self) -> &[ChainLevel] {
        &self.levels
    }

    pub fn level(&self, i: usize) -> Result<&ChainLevel> {
        let lo = self.first_index();
        if i < lo || i > self.n() {
            return Err(GzError::ChainIndex { index: i, lo, hi: self.n() });
        }
        Ok(&self.levels[i - lo])
    }

    /// Number of GZ functions, Σ r_i over the chain.
    pub fn gz_count(&self) -> usize {
        self.levels.iter().map(|l| l.algebra.rank()).sum()
    }

    pub fn check_member(&self, x: &CMat) -> Result<()> {
        self.top().check_member(x)
    }

    /// x_i, the trace-form orthogonal projection of x onto g_i.
    pub fn project(&self, x: &CMat, i: usize) -> Result<CMat> {
        let lvl = self.level(i)?;
        self.top().check_shape(x)?;
        let e = to_complex(&lvl.embedding);
        Ok(e.transpose() * x * e)
    }

    /// The inclusion g_i → g.
    pub fn embed(&self, i: usize, y: &CMat) -> Result<CMat> {
        let lvl = self.level(i)?;
        lvl.algebra.check_shape(y)?;
        let e = to_complex(&lvl.embedding);
        Ok(&e * y * e.transpose())
    }

    pub fn involution(&self) -> Result<InvolutionData> {
        InvolutionData::new(self.top())
    }

    pub fn theta(&self, x: &CMat) -> Result<CMat> {
        self.top().check_shape(x)?;
        Ok(self.involution()?.apply(x))
    }

    /// x = x_k + x_p with θ(x_k) = x_k and θ(x_p) = −x_p.
    pub fn cartan_decompose(&self, x: &CMat) -> Result<(CMat, CMat)> {
        let t = self.theta(x)?;
        let xk = (x + &t) * C64::new(0.5, 0.0);
        let xp = (x - &t) * C64::new(0.5, 0.0);
        Ok((xk, xp))
    }
}
