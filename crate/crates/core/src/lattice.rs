//! The Mukai lattice H⁰ ⊕ H² ⊕ H⁴ with exact rational coefficients: the
//! truncated cohomology ring, the Mukai pairing, lattice membership via
//! Smith normal form, and isometry validation.
//!
//! Conventions, fixed once and used everywhere:
//! * classes are graded triples (r, c, s) with c a degree-two vector whose
//!   length is the rank of the ambient gram form;
//! * the Mukai pairing is ⟨(r,c,s),(r',c',s')⟩ = c·c' − r s' − s r', so the
//!   vector (1,0,1) has square −2 and the point class (0,0,1) is isotropic;
//! * matrices act on column coordinate vectors ordered (r, c₁…c_n, s).

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::matrix::{self, QMat, ZMat};
use crate::rational::{self, sqrt_exact, Rational};

/// A nondegenerate symmetric bilinear form on the degree-two part.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GramForm {
    matrix: QMat,
    preset: Option<String>,
}

impl GramForm {
    /// Wraps a symmetric nondegenerate matrix.
    pub fn from_matrix(matrix: QMat) -> Result<Self, Error> {
        if !matrix.is_square() {
            return Err(Error::NotSquare { rows: matrix.rows(), cols: matrix.cols() });
        }
        if !matrix.is_symmetric() {
            return Err(Error::AsymmetricGram);
        }
        if matrix.det()?.is_zero() {
            return Err(Error::DegenerateGram);
        }
        Ok(GramForm { matrix, preset: None })
    }

    /// Named presets. `"U"` is one hyperbolic plane, `"U3"` three of them,
    /// `"U3_E8m2"` the K3 surface form U³ ⊕ E₈(−1)² in that basis order.
    pub fn preset(name: &str) -> Result<Self, Error> {
        let blocks: Vec<QMat> = match name {
            "U" => vec![hyperbolic_block()],
            "U3" => vec![hyperbolic_block(), hyperbolic_block(), hyperbolic_block()],
            "U3_E8m2" => vec![
                hyperbolic_block(),
                hyperbolic_block(),
                hyperbolic_block(),
                e8_minus_block(),
                e8_minus_block(),
            ],
            other => return Err(Error::UnknownPreset(other.to_string())),
        };
        let mut g = Self::from_matrix(direct_sum(&blocks))?;
        g.preset = Some(name.to_string());
        Ok(g)
    }

    pub fn rank(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &QMat {
        &self.matrix
    }

    pub fn preset_name(&self) -> Option<&str> {
        self.preset.as_deref()
    }

    pub fn is_integral(&self) -> bool {
        self.matrix.is_integral()
    }

    /// The degree-two pairing x ·_G y.
    pub fn pair(&self, x: &[Rational], y: &[Rational]) -> Result<Rational, Error> {
        let n = self.rank();
        if x.len() != n || y.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "vectors of length {}/{} against gram of rank {}",
                x.len(),
                y.len(),
                n
            )));
        }
        let gy = self.matrix.mul_vec(y)?;
        let mut acc = Rational::zero();
        for i in 0..n {
            if !x[i].is_zero() {
                acc += &x[i] * &gy[i];
            }
        }
        Ok(acc)
    }

    /// Signature (positive, negative) of the degree-two form.
    pub fn signature(&self) -> Result<(usize, usize), Error> {
        let (p, n, _) = self.matrix.signature()?;
        Ok((p, n))
    }
}

fn hyperbolic_block() -> QMat {
    QMat::from_rows(vec![
        vec![rational::int(0), rational::int(1)],
        vec![rational::int(1), rational::int(0)],
    ])
    .expect("fixed shape")
}

/// E₈ Cartan matrix negated: even, unimodular, negative definite.
fn e8_minus_block() -> QMat {
    // Dynkin diagram edges 1-3, 3-4, 2-4, 4-5, 5-6, 6-7, 7-8.
    let edges = [(0usize, 2usize), (2, 3), (1, 3), (3, 4), (4, 5), (5, 6), (6, 7)];
    let mut m = QMat::zeros(8, 8);
    for i in 0..8 {
        m[(i, i)] = rational::int(-2);
    }
    for &(a, b) in &edges {
        m[(a, b)] = rational::int(1);
        m[(b, a)] = rational::int(1);
    }
    m
}

fn direct_sum(blocks: &[QMat]) -> QMat {
    let n: usize = blocks.iter().map(|b| b.rows()).sum();
    let mut m = QMat::zeros(n, n);
    let mut off = 0;
    for b in blocks {
        for i in 0..b.rows() {
            for j in 0..b.cols() {
                m[(off + i, off + j)] = b[(i, j)].clone();
            }
        }
        off += b.rows();
    }
    m
}

/// A graded cohomology class (r, c, s) ∈ H⁰ ⊕ H² ⊕ H⁴.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CohClass {
    pub r: Rational,
    pub c: Vec<Rational>,
    pub s: Rational,
}

impl CohClass {
    pub fn new(r: Rational, c: Vec<Rational>, s: Rational) -> Self {
        CohClass { r, c, s }
    }

    /// The ring unit (1, 0, 0).
    pub fn unit(rank: usize) -> Self {
        CohClass::new(Rational::one(), vec![Rational::zero(); rank], Rational::zero())
    }

    /// The point class (0, 0, 1).
    pub fn point(rank: usize) -> Self {
        CohClass::new(Rational::zero(), vec![Rational::zero(); rank], Rational::one())
    }

    pub fn zero(rank: usize) -> Self {
        CohClass::new(Rational::zero(), vec![Rational::zero(); rank], Rational::zero())
    }

    /// A purely degree-two class (0, c, 0).
    pub fn from_degree_two(c: Vec<Rational>) -> Self {
        let n = c.len();
        CohClass::new(Rational::zero(), c, Rational::zero()).with_rank_checked(n)
    }

    fn with_rank_checked(self, _n: usize) -> Self {
        self
    }

    /// exp(b) = (1, b, b·b/2) for a degree-two vector b.
    pub fn exp(b: &[Rational], gram: &GramForm) -> Result<Self, Error> {
        let half_square = gram.pair(b, b)? / rational::int(2);
        Ok(CohClass::new(Rational::one(), b.to_vec(), half_square))
    }

    pub fn rank_len(&self) -> usize {
        self.c.len()
    }

    pub fn is_zero(&self) -> bool {
        self.r.is_zero() && self.s.is_zero() && self.c.iter().all(|x| x.is_zero())
    }

    pub fn is_integral(&self) -> bool {
        self.r.denom().is_one()
            && self.s.denom().is_one()
            && self.c.iter().all(|x| x.denom().is_one())
    }

    /// Coordinates (r, c₁…c_n, s) as a column vector.
    pub fn coords(&self) -> Vec<Rational> {
        let mut v = Vec::with_capacity(self.c.len() + 2);
        v.push(self.r.clone());
        v.extend(self.c.iter().cloned());
        v.push(self.s.clone());
        v
    }

    pub fn from_coords(coords: &[Rational]) -> Result<Self, Error> {
        if coords.len() < 2 {
            return Err(Error::DimensionMismatch("coordinate vector too short".into()));
        }
        Ok(CohClass::new(
            coords[0].clone(),
            coords[1..coords.len() - 1].to_vec(),
            coords[coords.len() - 1].clone(),
        ))
    }

    /// gcd of all coordinates; zero for the zero class. Only meaningful for
    /// integral classes.
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for x in self.coords() {
            debug_assert!(x.denom().is_one());
            g = num_integer::Integer::gcd(&g, x.numer());
        }
        g
    }

    pub fn negate(&self) -> Self {
        CohClass::new(-self.r.clone(), self.c.iter().map(|x| -x.clone()).collect(), -self.s.clone())
    }
}

fn check_same_rank(a: &CohClass, b: &CohClass, gram: &GramForm) -> Result<(), Error> {
    if a.rank_len() != gram.rank() || b.rank_len() != gram.rank() {
        return Err(Error::DimensionMismatch(format!(
            "classes of degree-two length {}/{} against gram of rank {}",
            a.rank_len(),
            b.rank_len(),
            gram.rank()
        )));
    }
    Ok(())
}

/// ⟨(r,c,s),(r',c',s')⟩ = c·c' − r s' − s r'.
pub fn mukai_pairing(v: &CohClass, w: &CohClass, gram: &GramForm) -> Result<Rational, Error> {
    check_same_rank(v, w, gram)?;
    Ok(gram.pair(&v.c, &w.c)? - &v.r * &w.s - &v.s * &w.r)
}

/// Truncated cup product:
/// (r₁,c₁,s₁)(r₂,c₂,s₂) = (r₁r₂, r₁c₂+r₂c₁, r₁s₂+r₂s₁+c₁·c₂).
pub fn ring_mult(a: &CohClass, b: &CohClass, gram: &GramForm) -> Result<CohClass, Error> {
    check_same_rank(a, b, gram)?;
    let r = &a.r * &b.r;
    let c: Vec<Rational> = a
        .c
        .iter()
        .zip(&b.c)
        .map(|(ca, cb)| &a.r * cb + &b.r * ca)
        .collect();
    let s = &a.r * &b.s + &b.r * &a.s + gram.pair(&a.c, &b.c)?;
    Ok(CohClass::new(r, c, s))
}

/// Inverse of a unit: (r,c,s)⁻¹ = (1/r, −c/r², c·c/r³ − s/r²).
pub fn ring_inverse(a: &CohClass, gram: &GramForm) -> Result<CohClass, Error> {
    if a.rank_len() != gram.rank() {
        return Err(Error::DimensionMismatch("class/gram rank".into()));
    }
    if a.r.is_zero() {
        return Err(Error::NonUnitClass);
    }
    let r2 = &a.r * &a.r;
    let r3 = &r2 * &a.r;
    let cc = gram.pair(&a.c, &a.c)?;
    let r = Rational::one() / &a.r;
    let c: Vec<Rational> = a.c.iter().map(|x| -(x / &r2)).collect();
    let s = cc / r3 - &a.s / r2;
    Ok(CohClass::new(r, c, s))
}

/// Square root with positive degree-zero part:
/// (ρ, c/2ρ, s/2ρ − c·c/8ρ³) where ρ = √r.
pub fn ring_sqrt(a: &CohClass, gram: &GramForm) -> Result<CohClass, Error> {
    if a.rank_len() != gram.rank() {
        return Err(Error::DimensionMismatch("class/gram rank".into()));
    }
    if !a.r.is_positive() {
        return Err(Error::NoRationalSquareRoot(
            "degree-0 part must be positive".into(),
        ));
    }
    let rho = sqrt_exact(&a.r).ok_or_else(|| {
        Error::NoRationalSquareRoot(format!(
            "degree-0 part {} is not a rational square",
            rational::render_rational(&a.r)
        ))
    })?;
    let two_rho = rational::int(2) * &rho;
    let c: Vec<Rational> = a.c.iter().map(|x| x / &two_rho).collect();
    let cc = gram.pair(&a.c, &a.c)?;
    let s = &a.s / &two_rho - cc / (rational::int(8) * &rho * &rho * &rho);
    Ok(CohClass::new(rho, c, s))
}

/// Integer coefficients expressing `v` over the given independent integral
/// basis, or `None` when `v` is not in the spanned lattice.
pub fn lattice_membership(v: &[Rational], basis: &[Vec<BigInt>]) -> Option<Vec<BigInt>> {
    if basis.is_empty() {
        return if v.iter().all(|x| x.is_zero()) { Some(vec![]) } else { None };
    }
    let dim = basis[0].len();
    if v.len() != dim || basis.iter().any(|b| b.len() != dim) {
        return None;
    }
    // columns are the basis vectors; scale v to clear denominators
    let (v_scaled, d) = rational::scale_to_integers(v);
    let mut cols = ZMat::zeros(dim, basis.len());
    for (j, b) in basis.iter().enumerate() {
        for i in 0..dim {
            cols[(i, j)] = &b[i] * &d;
        }
    }
    matrix::solve_integer(&cols, &v_scaled)
}

/// The full Mukai gram on coordinates (r, c₁…c_n, s): the degree-two gram
/// extended by the hyperbolic block pairing H⁰ with H⁴ as ⟨e₀,e₄⟩ = −1.
pub fn mukai_gram(gram: &GramForm) -> QMat {
    let n = gram.rank();
    let mut m = QMat::zeros(n + 2, n + 2);
    for i in 0..n {
        for j in 0..n {
            m[(i + 1, j + 1)] = gram.matrix()[(i, j)].clone();
        }
    }
    m[(0, n + 1)] = rational::int(-1);
    m[(n + 1, 0)] = rational::int(-1);
    m
}

/// True iff `m` is integral of the right size and Mᵀ Ĝ M = Ĝ for the full
/// Mukai gram Ĝ.
pub fn is_isometry(m: &ZMat, gram: &GramForm) -> bool {
    is_isometry_between(m, gram, gram)
}

/// Isometry check between two presentations: Mᵀ Ĝ_target M = Ĝ_source.
pub fn is_isometry_between(m: &ZMat, source: &GramForm, target: &GramForm) -> bool {
    let n = source.rank() + 2;
    if target.rank() + 2 != n || m.rows() != n || m.cols() != n {
        return false;
    }
    let ghat_src = mukai_gram(source);
    let ghat_tgt = mukai_gram(target);
    let mq = m.to_qmat();
    let lhs = mq
        .transpose()
        .mul(&ghat_tgt)
        .and_then(|t| t.mul(&mq));
    matches!(lhs, Ok(p) if p == ghat_src)
}

/// An integral matrix acting on Mukai coordinates (r | c | s).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Isometry {
    pub matrix: ZMat,
}

impl Isometry {
    pub fn new(matrix: ZMat) -> Self {
        Isometry { matrix }
    }

    pub fn identity(gram_rank: usize) -> Self {
        Isometry { matrix: ZMat::identity(gram_rank + 2) }
    }

    pub fn size(&self) -> usize {
        self.matrix.rows()
    }

    /// Checks the defining invariant against a gram form.
    pub fn is_valid(&self, gram: &GramForm) -> bool {
        is_isometry(&self.matrix, gram)
    }

    pub fn apply(&self, v: &CohClass) -> Result<CohClass, Error> {
        let coords = v.coords();
        let q = self.matrix.to_qmat();
        let out = q.mul_vec(&coords)?;
        CohClass::from_coords(&out)
    }

    /// `self ∘ other` as maps, i.e. `other` is applied first.
    pub fn compose(&self, other: &Isometry) -> Result<Isometry, Error> {
        Ok(Isometry { matrix: self.matrix.mul(&other.matrix)? })
    }

    pub fn is_identity(&self) -> bool {
        self.matrix.is_identity()
    }

    /// Inverse through the Mukai gram: M⁻¹ = Ĝ⁻¹ Mᵀ Ĝ, which stays integral
    /// for a genuine isometry.
    pub fn inverse(&self, gram: &GramForm) -> Result<Isometry, Error> {
        let ghat = mukai_gram(gram);
        let ginv = ghat
            .inverse()?
            .ok_or(Error::DegenerateGram)?;
        let mq = self.matrix.to_qmat();
        let inv = ginv.mul(&mq.transpose())?.mul(&ghat)?;
        Ok(Isometry { matrix: ZMat::try_from_qmat(&inv)? })
    }
}

/// Signature of the full Mukai gram, by exact diagonalization.
pub fn mukai_signature(gram: &GramForm) -> Result<(usize, usize), Error> {
    let (p, n, _) = mukai_gram(gram).signature()?;
    Ok((p, n))
}
