//! Synthetic twisted Hodge data for K3 surfaces.
//!
//! A [`TwistedSurface`] carries a degree-two gram form, a rational period
//! plane (σ₁, σ₂), a B-field, an ample class ω and a finite list of
//! effective (−2)-roots. Periods are synthetic rational planes: every
//! lattice-level statement depends only on the plane, its orientation and
//! its orthogonality data, so rational models keep all checks exact.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;
use crate::lattice::{mukai_gram, mukai_pairing, CohClass, GramForm, Isometry};
use crate::matrix::{self, QMat, ZMat};
use crate::rational::{self, Rational};

/// Synthetic surface datum; see the module docs for the invariants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwistedSurface {
    pub gram: GramForm,
    pub sigma1: Vec<Rational>,
    pub sigma2: Vec<Rational>,
    pub b_field: Vec<Rational>,
    pub omega: Vec<Rational>,
    pub roots: Vec<Vec<BigInt>>,
}

/// One violated surface invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    DimensionMismatch(String),
    PeriodNormMismatch,
    PeriodNotPositive,
    PeriodNotOrthogonal,
    AmpleNotOrthogonal,
    AmpleNotPositive,
    RootNormWrong(usize),
    RootNotOrthogonal(usize),
    RootNotEffective(usize),
    PositiveGramNotDefinite,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::DimensionMismatch(what) => write!(f, "dimension mismatch: {what}"),
            Violation::PeriodNormMismatch => write!(f, "period norms differ: need s1*s1 = s2*s2"),
            Violation::PeriodNotPositive => write!(f, "period plane not positive: need s1*s1 > 0"),
            Violation::PeriodNotOrthogonal => write!(f, "period not orthogonal: need s1*s2 = 0"),
            Violation::AmpleNotOrthogonal => write!(f, "ample class pairs with the period"),
            Violation::AmpleNotPositive => write!(f, "ample class not positive: need w*w > 0"),
            Violation::RootNormWrong(i) => write!(f, "root {i} does not have square -2"),
            Violation::RootNotOrthogonal(i) => write!(f, "root {i} pairs with the period"),
            Violation::RootNotEffective(i) => write!(f, "root {i} has nonpositive pairing with the ample class"),
            Violation::PositiveGramNotDefinite => {
                write!(f, "gram of the four positive directions is not positive definite")
            }
        }
    }
}

impl TwistedSurface {
    pub fn new(
        gram: GramForm,
        sigma1: Vec<Rational>,
        sigma2: Vec<Rational>,
        b_field: Vec<Rational>,
        omega: Vec<Rational>,
        roots: Vec<Vec<BigInt>>,
    ) -> Self {
        TwistedSurface { gram, sigma1, sigma2, b_field, omega, roots }
    }

    pub fn rank(&self) -> usize {
        self.gram.rank()
    }

    /// Same surface with a different B-field.
    pub fn with_b_field(&self, b: Vec<Rational>) -> Self {
        let mut s = self.clone();
        s.b_field = b;
        s
    }

    fn root_q(&self, i: usize) -> Vec<Rational> {
        self.roots[i].iter().map(|x| Rational::from_integer(x.clone())).collect()
    }

    /// Generators of the twisted period plane:
    /// Re(exp(B)σ) = (0, σ₁, B·σ₁) and Im(exp(B)σ) = (0, σ₂, B·σ₂).
    pub fn period_plane(&self) -> Result<[CohClass; 2], Error> {
        let p1 = CohClass::new(
            Rational::zero(),
            self.sigma1.clone(),
            self.gram.pair(&self.b_field, &self.sigma1)?,
        );
        let p2 = CohClass::new(
            Rational::zero(),
            self.sigma2.clone(),
            self.gram.pair(&self.b_field, &self.sigma2)?,
        );
        Ok([p1, p2])
    }

    /// The four positive directions
    /// {Re(exp(B)σ), Im(exp(B)σ), Re(exp(B+iω)), Im(exp(B+iω))}.
    pub fn positive_four_basis(&self) -> Result<[CohClass; 4], Error> {
        let [p1, p2] = self.period_plane()?;
        let bb = self.gram.pair(&self.b_field, &self.b_field)?;
        let ww = self.gram.pair(&self.omega, &self.omega)?;
        let bw = self.gram.pair(&self.b_field, &self.omega)?;
        let f3 = CohClass::new(
            Rational::one(),
            self.b_field.clone(),
            (bb - ww) / rational::int(2),
        );
        let f4 = CohClass::new(Rational::zero(), self.omega.clone(), bw);
        Ok([p1, p2, f3, f4])
    }

    /// Checks every invariant exactly; all violations are reported, not just
    /// the first.
    pub fn validate(&self) -> Result<(), Vec<Violation>> {
        let n = self.gram.rank();
        let mut violations = Vec::new();
        for (name, v) in [
            ("sigma1", &self.sigma1),
            ("sigma2", &self.sigma2),
            ("B", &self.b_field),
            ("omega", &self.omega),
        ] {
            if v.len() != n {
                violations.push(Violation::DimensionMismatch(format!(
                    "{name} has length {}, gram rank is {n}",
                    v.len()
                )));
            }
        }
        for (i, c) in self.roots.iter().enumerate() {
            if c.len() != n {
                violations.push(Violation::DimensionMismatch(format!(
                    "root {i} has length {}, gram rank is {n}",
                    c.len()
                )));
            }
        }
        if !violations.is_empty() {
            return Err(violations);
        }

        let pair = |x: &[Rational], y: &[Rational]| self.gram.pair(x, y).expect("sizes checked");
        let s11 = pair(&self.sigma1, &self.sigma1);
        let s22 = pair(&self.sigma2, &self.sigma2);
        if s11 != s22 {
            violations.push(Violation::PeriodNormMismatch);
        }
        if !s11.is_positive() {
            violations.push(Violation::PeriodNotPositive);
        }
        if !pair(&self.sigma1, &self.sigma2).is_zero() {
            violations.push(Violation::PeriodNotOrthogonal);
        }
        if !pair(&self.omega, &self.sigma1).is_zero() || !pair(&self.omega, &self.sigma2).is_zero()
        {
            violations.push(Violation::AmpleNotOrthogonal);
        }
        if !pair(&self.omega, &self.omega).is_positive() {
            violations.push(Violation::AmpleNotPositive);
        }
        for i in 0..self.roots.len() {
            let c = self.root_q(i);
            if pair(&c, &c) != rational::int(-2) {
                violations.push(Violation::RootNormWrong(i));
            }
            if !pair(&c, &self.sigma1).is_zero() || !pair(&c, &self.sigma2).is_zero() {
                violations.push(Violation::RootNotOrthogonal(i));
            }
            if !pair(&c, &self.omega).is_positive() {
                violations.push(Violation::RootNotEffective(i));
            }
        }

        if violations.is_empty() {
            // gram of the four positive directions must be positive definite
            let basis = self.positive_four_basis().expect("sizes checked");
            let mut gram4 = QMat::zeros(4, 4);
            for i in 0..4 {
                for j in 0..4 {
                    gram4[(i, j)] =
                        mukai_pairing(&basis[i], &basis[j], &self.gram).expect("sizes checked");
                }
            }
            if !is_positive_definite(&gram4) {
                violations.push(Violation::PositiveGramNotDefinite);
            }
        }

        if violations.is_empty() { Ok(()) } else { Err(violations) }
    }

    pub fn validated(&self) -> Result<(), Error> {
        self.validate().map_err(|v| {
            Error::InvalidSurface(
                v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; "),
            )
        })
    }
}

/// Sylvester criterion on leading principal minors; exact.
fn is_positive_definite(m: &QMat) -> bool {
    let n = m.rows();
    for k in 1..=n {
        let mut minor = QMat::zeros(k, k);
        for i in 0..k {
            for j in 0..k {
                minor[(i, j)] = m[(i, j)].clone();
            }
        }
        match minor.det() {
            Ok(d) if d.is_positive() => {}
            _ => return false,
        }
    }
    true
}

/// The integral (1,1)-part of the twisted Mukai lattice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PicardLattice {
    /// ℤ-basis in Mukai coordinates (r, c₁…c_n, s); saturated.
    pub basis: Vec<Vec<BigInt>>,
}

impl PicardLattice {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Gram matrix of the basis under the Mukai pairing; integral.
    pub fn gram(&self, gram: &GramForm) -> Result<ZMat, Error> {
        let ghat = mukai_gram(gram);
        let k = self.basis.len();
        let mut out = ZMat::zeros(k, k);
        for i in 0..k {
            let bi: Vec<Rational> =
                self.basis[i].iter().map(|x| Rational::from_integer(x.clone())).collect();
            let gbi = ghat.mul_vec(&bi)?;
            for j in 0..k {
                let mut acc = Rational::zero();
                for (x, y) in self.basis[j].iter().zip(&gbi) {
                    acc += Rational::from_integer(x.clone()) * y;
                }
                if !acc.denom().is_one() {
                    return Err(Error::NotIntegral("picard gram".into()));
                }
                out[(i, j)] = acc.numer().clone();
            }
        }
        Ok(out)
    }

    /// Integer coefficients of an integral Mukai vector over the basis.
    pub fn membership(&self, v: &CohClass) -> Option<Vec<BigInt>> {
        crate::lattice::lattice_membership(&v.coords(), &self.basis)
    }

    /// The Mukai vector with the given coefficients.
    pub fn vector(&self, coeffs: &[BigInt]) -> Result<CohClass, Error> {
        if coeffs.len() != self.basis.len() {
            return Err(Error::DimensionMismatch("coefficients / picard rank".into()));
        }
        let dim = self.basis.first().map_or(0, |b| b.len());
        let mut out = vec![Rational::zero(); dim];
        for (x, b) in coeffs.iter().zip(&self.basis) {
            for i in 0..dim {
                out[i] += Rational::from_integer(x * &b[i]);
            }
        }
        CohClass::from_coords(&out)
    }
}

/// Saturated kernel lattice of v ↦ (⟨v, p̃₁⟩, ⟨v, p̃₂⟩) inside ℤ^{n+2}:
/// the conditions read c·σᵢ = r (B·σᵢ).
pub fn picard_lattice(surface: &TwistedSurface) -> Result<PicardLattice, Error> {
    surface.validated()?;
    let n = surface.rank();
    // rows of the condition matrix over Q on coordinates (r, c, s)
    let mut rows = Vec::with_capacity(2);
    for sigma in [&surface.sigma1, &surface.sigma2] {
        let g_sigma = surface.gram.matrix().mul_vec(sigma)?;
        let b_sigma = surface.gram.pair(&surface.b_field, sigma)?;
        let mut row = Vec::with_capacity(n + 2);
        row.push(-b_sigma);
        row.extend(g_sigma);
        row.push(Rational::zero());
        rows.push(row);
    }
    // clear denominators row by row; the kernel is unchanged
    let scaled: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|row| rational::scale_to_integers(row).0)
        .collect();
    let a = ZMat::from_rows(scaled)?;
    Ok(PicardLattice { basis: matrix::integer_kernel_basis(&a) })
}

/// True iff `g` maps the twisted period plane of `source` onto that of
/// `target` complex-linearly (the induced 2×2 map has positive
/// determinant).
pub fn is_hodge_isometry(
    g: &Isometry,
    source: &TwistedSurface,
    target: &TwistedSurface,
) -> Result<bool, Error> {
    source.validated()?;
    target.validated()?;
    if g.size() != source.rank() + 2 || g.size() != target.rank() + 2 {
        return Err(Error::DimensionMismatch("isometry size / surface rank".into()));
    }
    let src_plane = source.period_plane()?;
    let tgt_plane = target.period_plane()?;
    // columns of the target plane as a (n+2) x 2 system
    let n2 = target.rank() + 2;
    let mut sys = QMat::zeros(n2, 2);
    for (j, p) in tgt_plane.iter().enumerate() {
        for (i, x) in p.coords().iter().enumerate() {
            sys[(i, j)] = x.clone();
        }
    }
    let mut induced = QMat::zeros(2, 2);
    for (j, p) in src_plane.iter().enumerate() {
        let image = g.apply(p)?;
        match sys.solve(&image.coords())? {
            None => return Ok(false),
            Some(coeffs) => {
                induced[(0, j)] = coeffs[0].clone();
                induced[(1, j)] = coeffs[1].clone();
            }
        }
    }
    Ok(induced.det()?.is_positive())
}

/// Sign of the determinant of the image of the positive four-basis of the
/// source, projected onto the positive four-space of the target.
///
/// The projection matrix in the target basis is G'⁻¹ P with
/// P[j][k] = ⟨g f_k, f'_j⟩; since det G' > 0 the sign is det P.
pub fn orientation_sign(
    g: &Isometry,
    source: &TwistedSurface,
    target: &TwistedSurface,
) -> Result<i8, Error> {
    if !is_hodge_isometry(g, source, target)? {
        return Err(Error::NotHodge);
    }
    let fs = source.positive_four_basis()?;
    let ft = target.positive_four_basis()?;
    let mut p = QMat::zeros(4, 4);
    for k in 0..4 {
        let image = g.apply(&fs[k])?;
        for j in 0..4 {
            p[(j, k)] = mukai_pairing(&image, &ft[j], &target.gram)?;
        }
    }
    let det = p.det()?;
    if det.is_positive() {
        Ok(1)
    } else if det.is_negative() {
        Ok(-1)
    } else {
        Err(Error::Internal("projected positive four-space is degenerate".into()))
    }
}

/// True iff B1 − B2 ∈ H²(ℤ) + NS⊗ℚ with NS = {x : x·σᵢ = 0}.
///
/// Pairing with (σ₁, σ₂) kills exactly NS⊗ℚ, so the test reduces to
/// membership of the paired difference in the lattice spanned by the paired
/// standard basis vectors.
pub fn brauer_equivalent(
    b1: &[Rational],
    b2: &[Rational],
    surface: &TwistedSurface,
) -> Result<bool, Error> {
    let n = surface.rank();
    if b1.len() != n || b2.len() != n {
        return Err(Error::DimensionMismatch("B-field length / gram rank".into()));
    }
    let diff: Vec<Rational> = b1.iter().zip(b2).map(|(a, b)| a - b).collect();
    let t1 = surface.gram.pair(&diff, &surface.sigma1)?;
    let t2 = surface.gram.pair(&diff, &surface.sigma2)?;
    let g_s1 = surface.gram.matrix().mul_vec(&surface.sigma1)?;
    let g_s2 = surface.gram.matrix().mul_vec(&surface.sigma2)?;
    // scale all 2(n+1) rationals by one denominator
    let mut all: Vec<Rational> = vec![t1, t2];
    all.extend(g_s1.iter().cloned());
    all.extend(g_s2.iter().cloned());
    let (scaled, _) = rational::scale_to_integers(&all);
    let target = vec![scaled[0].clone(), scaled[1].clone()];
    let mut gens = ZMat::zeros(2, n);
    for j in 0..n {
        gens[(0, j)] = scaled[2 + j].clone();
        gens[(1, j)] = scaled[2 + n + j].clone();
    }
    Ok(matrix::solve_integer(&gens, &target).is_some())
}

/// Component test against the ample class: x·x > 0 and x·ω > 0.
pub fn in_positive_cone(x: &[Rational], surface: &TwistedSurface) -> Result<bool, Error> {
    let xx = surface.gram.pair(x, x)?;
    let xw = surface.gram.pair(x, &surface.omega)?;
    Ok(xx.is_positive() && xw.is_positive())
}

/// Closure variant: x ≠ 0, x·x ≥ 0 and x·ω ≥ 0.
pub fn in_positive_cone_closure(x: &[Rational], surface: &TwistedSurface) -> Result<bool, Error> {
    if x.iter().all(|v| v.is_zero()) {
        return Ok(false);
    }
    let xx = surface.gram.pair(x, x)?;
    let xw = surface.gram.pair(x, &surface.omega)?;
    Ok(!xx.is_negative() && !xw.is_negative())
}

/// Result of a spherical-class search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SphericalOutcome {
    /// A vector in the twisted Picard lattice of square −2, with its
    /// coefficients over the computed basis.
    Witness { coefficients: Vec<BigInt>, vector: CohClass },
    /// No such vector with coefficients bounded by the requested bound.
    /// When `obstruction_modulus` is set, the quadratic form represents
    /// nothing ≡ −2 modulo that value, which rules out every bound.
    Absent { obstruction_modulus: Option<u64>, bound: u32 },
}

/// Searches the twisted Picard lattice for a class of square −2 with
/// coefficients bounded by `bound` over the computed basis.
///
/// The search first scans small moduli: if x ↦ ⟨x,x⟩ misses −2 modulo m the
/// answer is `Absent` for every bound, with the modulus reported. Otherwise
/// coefficient vectors are enumerated in magnitude order (0, 1, −1, 2, …,
/// lexicographically by position) with the last coordinate solved in closed
/// form, and the first witness is returned.
pub fn spherical_search(
    surface: &TwistedSurface,
    bound: u32,
) -> Result<SphericalOutcome, Error> {
    let pic = picard_lattice(surface)?;
    let k = pic.rank();
    if k == 0 {
        return Ok(SphericalOutcome::Absent { obstruction_modulus: None, bound });
    }
    let gram_z = pic.gram(&surface.gram)?;
    let mut q = vec![vec![0i64; k]; k];
    for i in 0..k {
        for j in 0..k {
            q[i][j] = gram_z[(i, j)]
                .to_i64()
                .ok_or_else(|| Error::Internal("picard gram entry exceeds i64".into()))?;
        }
    }

    // residue obstruction: does q(x) = -2 (mod m) have any solution?
    for m in [2u64, 4, 8, 16] {
        let states = (m as u128).checked_pow(k as u32);
        match states {
            Some(s) if s <= 1 << 22 => {
                if !residue_reachable(&q, m as i64, -2) {
                    return Ok(SphericalOutcome::Absent {
                        obstruction_modulus: Some(m),
                        bound,
                    });
                }
            }
            _ => break,
        }
    }

    if let Some(x) = enumerate_square(&q, bound as i64, -2) {
        let coeffs: Vec<BigInt> = x.iter().map(|&v| BigInt::from(v)).collect();
        let vector = pic.vector(&coeffs)?;
        debug_assert_eq!(
            mukai_pairing(&vector, &vector, &surface.gram)?,
            rational::int(-2)
        );
        return Ok(SphericalOutcome::Witness { coefficients: coeffs, vector });
    }
    Ok(SphericalOutcome::Absent { obstruction_modulus: None, bound })
}

fn residue_reachable(q: &[Vec<i64>], m: i64, target: i64) -> bool {
    let k = q.len();
    let want = target.rem_euclid(m);
    let mut x = vec![0i64; k];
    loop {
        let mut acc = 0i64;
        for i in 0..k {
            for j in 0..k {
                acc = (acc + q[i][j] % m * x[i] % m * x[j]) % m;
            }
        }
        if acc.rem_euclid(m) == want {
            return true;
        }
        // odometer over (Z/m)^k
        let mut pos = k;
        loop {
            if pos == 0 {
                return false;
            }
            pos -= 1;
            x[pos] += 1;
            if x[pos] < m {
                break;
            }
            x[pos] = 0;
        }
    }
}

/// First solution of xᵀQx = target with |xᵢ| ≤ bound, in magnitude order
/// (0 < 1 < −1 < 2 < −2 …) lexicographically by coordinate. The last
/// coordinate is solved in closed form.
fn enumerate_square(q: &[Vec<i64>], bound: i64, target: i64) -> Option<Vec<i64>> {
    let k = q.len();
    if k == 1 {
        for x in MagnitudeRange::new(bound) {
            if q[0][0].checked_mul(x * x) == Some(target) {
                return Some(vec![x]);
            }
        }
        return None;
    }
    let mut prefix = vec![0i64; k - 1];
    let mut stack = vec![MagnitudeRange::new(bound)];
    loop {
        let depth = stack.len() - 1;
        match stack.last_mut().unwrap().next() {
            None => {
                stack.pop();
                if stack.is_empty() {
                    return None;
                }
                continue;
            }
            Some(v) => {
                prefix[depth] = v;
                if depth + 1 < k - 1 {
                    stack.push(MagnitudeRange::new(bound));
                    continue;
                }
                if let Some(last) = solve_last(q, &prefix, bound, target) {
                    let mut sol = prefix.clone();
                    sol.push(last);
                    return Some(sol);
                }
            }
        }
    }
}

/// Solves q(prefix, t) = target for the last coordinate t, returning the
/// solution of smallest magnitude within the bound.
fn solve_last(q: &[Vec<i64>], prefix: &[i64], bound: i64, target: i64) -> Option<i64> {
    let k = q.len();
    let last = k - 1;
    let quad = i128::from(q[last][last]);
    let mut lin: i128 = 0; // coefficient of t (already doubled)
    let mut cst: i128 = 0;
    for i in 0..last {
        lin += 2 * i128::from(q[i][last]) * i128::from(prefix[i]);
        for j in 0..last {
            cst += i128::from(q[i][j]) * i128::from(prefix[i]) * i128::from(prefix[j]);
        }
    }
    cst -= i128::from(target);
    // quad t^2 + lin t + cst = 0
    if quad == 0 {
        if lin == 0 {
            return if cst == 0 { Some(0) } else { None };
        }
        if cst % lin != 0 {
            return None;
        }
        let t = -cst / lin;
        return (t.abs() <= i128::from(bound)).then_some(t as i64);
    }
    let disc = lin * lin - 4 * quad * cst;
    if disc < 0 {
        return None;
    }
    let root = isqrt_i128(disc)?;
    let mut best: Option<i64> = None;
    for r in [root, -root] {
        let num = -lin + r;
        if num % (2 * quad) != 0 {
            continue;
        }
        let t = num / (2 * quad);
        if t.abs() > i128::from(bound) {
            continue;
        }
        let t = t as i64;
        best = match best {
            None => Some(t),
            Some(b) if magnitude_key(t) < magnitude_key(b) => Some(t),
            other => other,
        };
    }
    best
}

fn magnitude_key(t: i64) -> (i64, bool) {
    (t.abs(), t < 0)
}

fn isqrt_i128(n: i128) -> Option<i128> {
    if n < 0 {
        return None;
    }
    let approx = (n as f64).sqrt() as i128;
    for cand in approx.saturating_sub(2)..=approx + 2 {
        if cand >= 0 && cand * cand == n {
            return Some(cand);
        }
    }
    None
}

/// Iterator through 0, 1, −1, 2, −2, …, bound, −bound.
struct MagnitudeRange {
    bound: i64,
    next_mag: i64,
    pending_neg: Option<i64>,
}

impl MagnitudeRange {
    fn new(bound: i64) -> Self {
        MagnitudeRange { bound, next_mag: 0, pending_neg: None }
    }
}

impl Iterator for MagnitudeRange {
    type Item = i64;
    fn next(&mut self) -> Option<i64> {
        if let Some(v) = self.pending_neg.take() {
            return Some(v);
        }
        if self.next_mag > self.bound {
            return None;
        }
        let mag = self.next_mag;
        self.next_mag += 1;
        if mag > 0 {
            self.pending_neg = Some(-mag);
        }
        Some(mag)
    }
}

/// Ready-made desk surfaces used across tests, benches and the shipped
/// examples.
pub mod presets {
    use super::*;

    fn unit(n: usize, i: usize) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); n];
        v[i] = Rational::one();
        v
    }

    fn sum(n: usize, idx: &[usize]) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); n];
        for &i in idx {
            v[i] = Rational::one();
        }
        v
    }

    /// Hyperbolic desk model: gram U³ with the period spanning the second
    /// and third planes, ample class in the first, no roots, B = 0.
    pub fn u3_model() -> TwistedSurface {
        let gram = GramForm::preset("U3").expect("preset");
        TwistedSurface::new(
            gram,
            sum(6, &[2, 3]),
            sum(6, &[4, 5]),
            vec![Rational::zero(); 6],
            sum(6, &[0, 1]),
            vec![],
        )
    }

    /// The U³ model twisted by B = e₂/2.
    pub fn u3_half_twist() -> TwistedSurface {
        let mut s = u3_model();
        let mut b = vec![Rational::zero(); 6];
        b[2] = rational::ratio(1, 2);
        s.b_field = b;
        s
    }

    /// The U³ model with two effective (−2)-roots e₁ ± (e₂ − f₂).
    pub fn u3_with_roots() -> TwistedSurface {
        let mut s = u3_model();
        s.roots = vec![
            vec![1, 0, 1, -1, 0, 0].into_iter().map(BigInt::from).collect(),
            vec![1, 0, -1, 1, 0, 0].into_iter().map(BigInt::from).collect(),
        ];
        s
    }

    /// Full K3 form U³ ⊕ E₈(−1)², untwisted, with one effective root
    /// e₁ + α where α is the first simple root of the first E₈(−1) block.
    pub fn k3_model() -> TwistedSurface {
        let gram = GramForm::preset("U3_E8m2").expect("preset");
        let mut root = vec![BigInt::zero(); 22];
        root[0] = BigInt::one();
        root[6] = BigInt::one();
        TwistedSurface::new(
            gram,
            sum(22, &[2, 3]),
            sum(22, &[4, 5]),
            vec![Rational::zero(); 22],
            sum(22, &[0, 1]),
            vec![root],
        )
    }

    /// The K3 model twisted by B = e₂/2.
    pub fn k3_half_twist() -> TwistedSurface {
        let mut s = k3_model();
        let mut b = vec![Rational::zero(); 22];
        b[2] = rational::ratio(1, 2);
        s.b_field = b;
        s
    }

    /// A twisted surface without spherical classes.
    ///
    /// The gram is U(2)³ (hyperbolic planes scaled by 2), the period spans
    /// the second and third planes and B = e₂/2. All pairings in U(2)³ are
    /// even and all squares divisible by 4; combined with the B-field
    /// condition 2(c₃+c₄) = r, the Picard form takes values ≡ 0 (mod 4),
    /// so −2 is never represented. `spherical_search` certifies this with
    /// the modulus-4 obstruction.
    pub fn no_spherical_witness() -> TwistedSurface {
        let two = rational::int(2);
        let mut block = QMat::zeros(6, 6);
        for k in 0..3 {
            block[(2 * k, 2 * k + 1)] = two.clone();
            block[(2 * k + 1, 2 * k)] = two.clone();
        }
        let gram = GramForm::from_matrix(block).expect("nondegenerate");
        let mut b = vec![Rational::zero(); 6];
        b[2] = rational::ratio(1, 2);
        TwistedSurface::new(gram, sum(6, &[2, 3]), sum(6, &[4, 5]), b, sum(6, &[0, 1]), vec![])
    }

    pub fn unit_vector(n: usize, i: usize) -> Vec<Rational> {
        unit(n, i)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::ring_mult;
    use num_integer::Integer;
    use presets::*;

    #[test]
    fn preset_surfaces_validate() {
        for s in [u3_model(), u3_half_twist(), u3_with_roots(), k3_model(), k3_half_twist(), no_spherical_witness()] {
            assert_eq!(s.validate(), Ok(()), "surface should validate");
        }
    }

    #[test]
    fn validation_reports_individual_violations() {
        let mut s = u3_model();
        s.sigma2 = s.sigma1.clone(); // breaks orthogonality, keeps norms
        let violations = s.validate().unwrap_err();
        assert!(violations.contains(&Violation::PeriodNotOrthogonal));

        let mut s = u3_model();
        s.omega = {
            let mut v = vec![Rational::zero(); 6];
            v[0] = rational::int(1);
            v[1] = rational::int(-1); // omega^2 = -2
            v
        };
        let violations = s.validate().unwrap_err();
        assert!(violations.contains(&Violation::AmpleNotPositive));

        let mut s = u3_model();
        s.roots = vec![vec![BigInt::one(); 6]];
        assert!(!s.validate().unwrap_err().is_empty());
    }

    #[test]
    fn positive_four_basis_matches_exponential_formulas() {
        let s = k3_half_twist();
        let [p1, p2, f3, f4] = s.positive_four_basis().unwrap();
        // p_i = (0, sigma_i, B*sigma_i)
        assert_eq!(p1.c, s.sigma1);
        assert_eq!(p1.s, s.gram.pair(&s.b_field, &s.sigma1).unwrap());
        assert_eq!(p2.s, s.gram.pair(&s.b_field, &s.sigma2).unwrap());
        // f3 agrees with the degree-wise expansion of exp(B + i w)
        assert_eq!(f3.r, rational::int(1));
        assert_eq!(f3.c, s.b_field);
        // the real part of (B+iw)^2/2 is (B*B - w*w)/2
        let expected = (s.gram.pair(&s.b_field, &s.b_field).unwrap()
            - s.gram.pair(&s.omega, &s.omega).unwrap())
            / rational::int(2);
        assert_eq!(f3.s, expected);
        assert_eq!(f4.c, s.omega);

        // cross-check degree-4 parts through the ring: exp(B)*(0,sigma,0)
        let eb = CohClass::exp(&s.b_field, &s.gram).unwrap();
        let sigma = CohClass::from_degree_two(s.sigma1.clone());
        let prod = ring_mult(&eb, &sigma, &s.gram).unwrap();
        assert_eq!(prod, p1);
    }

    #[test]
    fn picard_untwisted_contains_unit_and_point() {
        let s = u3_model();
        let pic = picard_lattice(&s).unwrap();
        assert_eq!(pic.rank(), 6);
        assert!(pic.membership(&CohClass::unit(6)).is_some());
        assert!(pic.membership(&CohClass::point(6)).is_some());
        // H^2 part: c with c*sigma_i = 0, e.g. e2 - f2
        let mut c = vec![Rational::zero(); 6];
        c[2] = rational::int(1);
        c[3] = rational::int(-1);
        assert!(pic.membership(&CohClass::from_degree_two(c)).is_some());
        // e2 itself pairs with sigma1
        let mut c = vec![Rational::zero(); 6];
        c[2] = rational::int(1);
        assert!(pic.membership(&CohClass::from_degree_two(c)).is_none());
    }

    #[test]
    fn picard_half_twist_congruence() {
        let s = u3_half_twist();
        let pic = picard_lattice(&s).unwrap();
        assert_eq!(pic.rank(), 6);
        // (2, f2, s) lies in Pic for every integral s
        for t in -3i64..=3 {
            let mut c = vec![Rational::zero(); 6];
            c[3] = rational::int(1);
            let v = CohClass::new(rational::int(2), c, rational::int(t));
            assert!(pic.membership(&v).is_some(), "missing (2, f2, {t})");
        }
        // no rank-1 vector: every basis vector has even degree-0 part
        for b in &pic.basis {
            assert!(b[0].is_even(), "degree-0 part {} not even", b[0]);
        }
        // (1, c, s) with c*sigma1 = 1/2 has no integral solution
        let v = CohClass::new(rational::int(1), vec![Rational::zero(); 6], rational::int(0));
        assert!(pic.membership(&v).is_none());
    }

    #[test]
    fn picard_vectors_annihilate_the_period_plane() {
        for s in [u3_half_twist(), k3_half_twist()] {
            let pic = picard_lattice(&s).unwrap();
            let plane = s.period_plane().unwrap();
            for b in &pic.basis {
                let v = CohClass::from_coords(
                    &b.iter().map(|x| Rational::from_integer(x.clone())).collect::<Vec<_>>(),
                )
                .unwrap();
                for p in &plane {
                    assert!(mukai_pairing(&v, p, &s.gram).unwrap().is_zero());
                }
            }
        }
    }

    #[test]
    fn hodge_checks_for_simple_isometries() {
        let s = u3_model();
        let id = Isometry::identity(6);
        assert!(is_hodge_isometry(&id, &s, &s).unwrap());

        // identity between (X,B) and (X,B+b) for b of type (1,1)
        let mut b = vec![Rational::zero(); 6];
        b[0] = rational::ratio(1, 3);
        let target = s.with_b_field(b);
        assert!(is_hodge_isometry(&id, &s, &target).unwrap());

        // -id on the whole lattice: plane maps to itself, det (+1)
        let neg = Isometry::new(
            ZMat::try_from_qmat(&{
                let mut m = QMat::identity(8);
                for i in 0..8 {
                    m[(i, i)] = rational::int(-1);
                }
                m
            })
            .unwrap(),
        );
        assert!(is_hodge_isometry(&neg, &s, &s).unwrap());
        assert_eq!(orientation_sign(&neg, &s, &s).unwrap(), 1);
        assert_eq!(orientation_sign(&id, &s, &s).unwrap(), 1);
    }

    #[test]
    fn orientation_flips_for_negated_degree_two() {
        for s in [u3_model(), k3_model()] {
            let n = s.rank();
            let mut m = QMat::identity(n + 2);
            for i in 1..=n {
                m[(i, i)] = rational::int(-1);
            }
            let g = Isometry::new(ZMat::try_from_qmat(&m).unwrap());
            assert!(is_hodge_isometry(&g, &s, &s).unwrap());
            assert_eq!(orientation_sign(&g, &s, &s).unwrap(), -1);
        }
    }

    #[test]
    fn brauer_examples() {
        let s = u3_half_twist();
        let b = s.b_field.clone();
        // integral shift
        let mut shifted = b.clone();
        shifted[0] += rational::int(3);
        assert!(brauer_equivalent(&b, &shifted, &s).unwrap());
        // (1,1) rational shift: e1 direction is orthogonal to the period
        let mut ns_shift = b.clone();
        ns_shift[0] += rational::ratio(5, 7);
        assert!(brauer_equivalent(&b, &ns_shift, &s).unwrap());
        // e2/2 against 0 is a genuine twist
        let zero = vec![Rational::zero(); 6];
        assert!(!brauer_equivalent(&b, &zero, &s).unwrap());
    }

    #[test]
    fn positive_cone_examples() {
        let s = u3_model();
        assert!(in_positive_cone(&s.omega, &s).unwrap());
        let neg: Vec<Rational> = s.omega.iter().map(|x| -x.clone()).collect();
        assert!(!in_positive_cone(&neg, &s).unwrap());
        // isotropic class e1 with e1*omega = 1: in the closure only
        let e1 = presets::unit_vector(6, 0);
        assert!(!in_positive_cone(&e1, &s).unwrap());
        assert!(in_positive_cone_closure(&e1, &s).unwrap());
        assert!(!in_positive_cone_closure(&vec![Rational::zero(); 6], &s).unwrap());
    }

    #[test]
    fn spherical_search_finds_untwisted_witness() {
        let s = u3_model();
        // (1,0,1) is a valid spherical class here and must be in Pic
        let pic = picard_lattice(&s).unwrap();
        let v = CohClass::new(rational::int(1), vec![Rational::zero(); 6], rational::int(1));
        assert!(pic.membership(&v).is_some());
        assert_eq!(mukai_pairing(&v, &v, &s.gram).unwrap(), rational::int(-2));

        match spherical_search(&s, 3).unwrap() {
            SphericalOutcome::Witness { vector, coefficients } => {
                assert_eq!(
                    mukai_pairing(&vector, &vector, &s.gram).unwrap(),
                    rational::int(-2)
                );
                assert!(pic.membership(&vector).is_some());
                assert!(coefficients.iter().any(|c| !c.is_zero()));
            }
            other => panic!("expected a witness, got {other:?}"),
        }
    }

    #[test]
    fn spherical_search_accepts_root_witnesses() {
        let s = u3_with_roots();
        let root = CohClass::from_degree_two(
            s.roots[0].iter().map(|x| Rational::from_integer(x.clone())).collect(),
        );
        assert_eq!(mukai_pairing(&root, &root, &s.gram).unwrap(), rational::int(-2));
        let pic = picard_lattice(&s).unwrap();
        assert!(pic.membership(&root).is_some());
        assert!(matches!(
            spherical_search(&s, 3).unwrap(),
            SphericalOutcome::Witness { .. }
        ));
    }

    #[test]
    fn spherical_search_certifies_nonexistence() {
        let s = no_spherical_witness();
        match spherical_search(&s, 50).unwrap() {
            SphericalOutcome::Absent { obstruction_modulus, .. } => {
                assert_eq!(obstruction_modulus, Some(4));
            }
            other => panic!("expected absence, got {other:?}"),
        }
        // the mod-4 claim: every diagonal entry of the picard gram is
        // divisible by 4 and every off-diagonal entry is even
        let pic = picard_lattice(&s).unwrap();
        let q = pic.gram(&s.gram).unwrap();
        for i in 0..pic.rank() {
            for j in 0..pic.rank() {
                let v = &q[(i, j)];
                if i == j {
                    assert!((v % BigInt::from(4)).is_zero());
                } else {
                    assert!(v.is_even());
                }
            }
        }
    }
}
