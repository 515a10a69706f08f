//! The catalogue of cohomological Fourier–Mukai generator actions and the
//! reflection machinery for chamber descent.
//!
//! Every constructor checks the full generator contract on the spot: the
//! matrix is an integral isometry, respects the twisted period planes and
//! preserves the orientation of the four positive directions. A value of
//! type [`Generator`] is therefore always sound.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::lattice::{
    is_isometry_between, mukai_gram, mukai_pairing, CohClass, GramForm, Isometry,
};
use crate::matrix::{QMat, ZMat};
use crate::rational::{self, Rational};
use crate::surface::{
    in_positive_cone, is_hodge_isometry, orientation_sign, picard_lattice, TwistedSurface,
};

/// Default reflection cap for chamber descent.
pub const DESCENT_CAP: usize = 10_000;

/// The kind of a generator, with the data that determines its matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GeneratorKind {
    /// The shift: −id on the whole lattice.
    Shift,
    /// Multiplication by exp(c₁) of a line bundle class.
    LineBundle(Vec<BigInt>),
    /// Multiplication by exp(b) for an integral b; moves B to B + b.
    BShift(Vec<BigInt>),
    /// The identity, re-reading the B-field as B + b for rational (1,1) b.
    ReTwist(Vec<Rational>),
    /// Reflection in a spherical class v of square −2.
    Spherical(CohClass),
    /// A degree-two isometry extended block-diagonally.
    Automorphism(ZMat),
}

impl GeneratorKind {
    pub fn name(&self) -> &'static str {
        match self {
            GeneratorKind::Shift => "shift",
            GeneratorKind::LineBundle(_) => "line-bundle",
            GeneratorKind::BShift(_) => "b-shift",
            GeneratorKind::ReTwist(_) => "re-twist",
            GeneratorKind::Spherical(_) => "spherical",
            GeneratorKind::Automorphism(_) => "automorphism",
        }
    }
}

/// A cohomological Fourier–Mukai generator action.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub kind: GeneratorKind,
    pub matrix: Isometry,
    pub source: TwistedSurface,
    pub target: TwistedSurface,
}

impl Generator {
    fn checked(
        kind: GeneratorKind,
        matrix: Isometry,
        source: TwistedSurface,
        target: TwistedSurface,
    ) -> Result<Generator, Error> {
        if !is_isometry_between(&matrix.matrix, &source.gram, &target.gram) {
            return Err(Error::NotIsometry);
        }
        if !is_hodge_isometry(&matrix, &source, &target)? {
            return Err(Error::NotHodge);
        }
        if orientation_sign(&matrix, &source, &target)? != 1 {
            return Err(Error::OrientationReversing);
        }
        Ok(Generator { kind, matrix, source, target })
    }

    /// The inverse generator, of the same catalogue form.
    pub fn inverse(&self) -> Result<Generator, Error> {
        match &self.kind {
            GeneratorKind::Shift => gen_shift(&self.source),
            GeneratorKind::LineBundle(l) => {
                gen_line_bundle(&l.iter().map(|x| -x.clone()).collect::<Vec<_>>(), &self.source)
            }
            GeneratorKind::BShift(b) => {
                gen_bshift(&b.iter().map(|x| -x.clone()).collect::<Vec<_>>(), &self.target)
            }
            GeneratorKind::ReTwist(b) => {
                gen_retwist(&b.iter().map(|x| -x.clone()).collect::<Vec<_>>(), &self.target)
            }
            GeneratorKind::Spherical(v) => gen_spherical(v, &self.source),
            GeneratorKind::Automorphism(m) => {
                let minv = invert_unimodular(m)?;
                gen_automorphism(&minv, &self.target, &self.source)
            }
        }
    }
}

fn invert_unimodular(m: &ZMat) -> Result<ZMat, Error> {
    let inv = m
        .to_qmat()
        .inverse()?
        .ok_or_else(|| Error::Generator("degree-two block is singular".into()))?;
    ZMat::try_from_qmat(&inv)
}

/// Matrix of multiplication by exp(b) on (r, c, s):
/// (r, c + r b, s + b·c + r b·b/2). Errors when the result is not integral.
pub fn exp_matrix(b: &[Rational], gram: &GramForm) -> Result<ZMat, Error> {
    let n = gram.rank();
    if b.len() != n {
        return Err(Error::DimensionMismatch("exp vector / gram rank".into()));
    }
    let mut m = QMat::identity(n + 2);
    let gb = gram.matrix().mul_vec(b)?;
    let half_sq = gram.pair(b, b)? / rational::int(2);
    for i in 0..n {
        m[(i + 1, 0)] = b[i].clone();
        m[(n + 1, i + 1)] = gb[i].clone();
    }
    m[(n + 1, 0)] = half_sq;
    ZMat::try_from_qmat(&m)
}

/// Reflection x ↦ x + ⟨x, v⟩ v as a matrix: I + v (Ĝ v)ᵀ.
pub fn reflection_matrix(v: &CohClass, gram: &GramForm) -> Result<ZMat, Error> {
    let n = gram.rank();
    if v.rank_len() != n {
        return Err(Error::DimensionMismatch("class / gram rank".into()));
    }
    let ghat = mukai_gram(gram);
    let coords = v.coords();
    let gv = ghat.mul_vec(&coords)?;
    let mut m = QMat::identity(n + 2);
    for i in 0..n + 2 {
        for j in 0..n + 2 {
            let add = &coords[i] * &gv[j];
            m[(i, j)] += add;
        }
    }
    ZMat::try_from_qmat(&m)
}

/// −id on the full Mukai lattice, lifted from the shift.
pub fn gen_shift(surface: &TwistedSurface) -> Result<Generator, Error> {
    surface.validated()?;
    let n = surface.rank() + 2;
    let mut m = ZMat::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = -BigInt::one();
    }
    Generator::checked(
        GeneratorKind::Shift,
        Isometry::new(m),
        surface.clone(),
        surface.clone(),
    )
}

/// Multiplication by exp(L) for an integral line bundle class L (type
/// (1,1): L·σᵢ = 0).
pub fn gen_line_bundle(l: &[BigInt], surface: &TwistedSurface) -> Result<Generator, Error> {
    surface.validated()?;
    let lq: Vec<Rational> = l.iter().map(|x| Rational::from_integer(x.clone())).collect();
    for sigma in [&surface.sigma1, &surface.sigma2] {
        if !surface.gram.pair(&lq, sigma)?.is_zero() {
            return Err(Error::Generator(
                "line bundle class must pair to zero with the period".into(),
            ));
        }
    }
    let m = exp_matrix(&lq, &surface.gram)?;
    Generator::checked(
        GeneratorKind::LineBundle(l.to_vec()),
        Isometry::new(m),
        surface.clone(),
        surface.clone(),
    )
}

/// Multiplication by exp(b) for integral b, landing on the surface with
/// B-field B + b. The Brauer class is unchanged.
pub fn gen_bshift(b: &[BigInt], surface: &TwistedSurface) -> Result<Generator, Error> {
    surface.validated()?;
    let bq: Vec<Rational> = b.iter().map(|x| Rational::from_integer(x.clone())).collect();
    let m = exp_matrix(&bq, &surface.gram)?;
    let new_b: Vec<Rational> =
        surface.b_field.iter().zip(&bq).map(|(x, y)| x + y).collect();
    let target = surface.with_b_field(new_b);
    target.validated()?;
    Generator::checked(
        GeneratorKind::BShift(b.to_vec()),
        Isometry::new(m),
        surface.clone(),
        target,
    )
}

/// The identity map, re-twisting B to B + b for a rational (1,1) class b.
pub fn gen_retwist(b: &[Rational], surface: &TwistedSurface) -> Result<Generator, Error> {
    surface.validated()?;
    if b.len() != surface.rank() {
        return Err(Error::DimensionMismatch("re-twist vector / gram rank".into()));
    }
    for sigma in [&surface.sigma1, &surface.sigma2] {
        if !surface.gram.pair(b, sigma)?.is_zero() {
            return Err(Error::Generator("re-twist class must be of type (1,1)".into()));
        }
    }
    let new_b: Vec<Rational> = surface.b_field.iter().zip(b).map(|(x, y)| x + y).collect();
    let target = surface.with_b_field(new_b);
    Generator::checked(
        GeneratorKind::ReTwist(b.to_vec()),
        Isometry::identity(surface.rank()),
        surface.clone(),
        target,
    )
}

/// Reflection in a spherical class: v must be integral of square −2 and lie
/// in the twisted Picard lattice.
pub fn gen_spherical(v: &CohClass, surface: &TwistedSurface) -> Result<Generator, Error> {
    surface.validated()?;
    if !v.is_integral() {
        return Err(Error::Generator("spherical class must be integral".into()));
    }
    if mukai_pairing(v, v, &surface.gram)? != rational::int(-2) {
        return Err(Error::Generator("spherical class must have square -2".into()));
    }
    let pic = picard_lattice(surface)?;
    if pic.membership(v).is_none() {
        return Err(Error::Generator(
            "spherical class must lie in the twisted Picard lattice".into(),
        ));
    }
    let m = reflection_matrix(v, &surface.gram)?;
    Generator::checked(
        GeneratorKind::Spherical(v.clone()),
        Isometry::new(m),
        surface.clone(),
        surface.clone(),
    )
}

/// A degree-two isometry m extended by the identity on H⁰ ⊕ H⁴. Requires
/// m to map the period plane onto the target plane, m(B) = B′, and m(ω)
/// inside the target positive cone.
pub fn gen_automorphism(
    m: &ZMat,
    source: &TwistedSurface,
    target: &TwistedSurface,
) -> Result<Generator, Error> {
    source.validated()?;
    target.validated()?;
    let n = source.rank();
    if m.rows() != n || m.cols() != n || target.rank() != n {
        return Err(Error::DimensionMismatch("degree-two block / gram rank".into()));
    }
    let mq = m.to_qmat();
    let gsrc = source.gram.matrix();
    let gtgt = target.gram.matrix();
    let preserved = mq.transpose().mul(gtgt).and_then(|t| t.mul(&mq));
    if !matches!(preserved, Ok(p) if p == *gsrc) {
        return Err(Error::Generator("degree-two block is not an isometry".into()));
    }
    // m(B) = B'
    let image_b = mq.mul_vec(&source.b_field)?;
    if image_b != target.b_field {
        return Err(Error::Generator("degree-two block must carry B to B'".into()));
    }
    // period plane onto period plane
    let mut sys = QMat::zeros(n, 2);
    for (j, sigma) in [&target.sigma1, &target.sigma2].into_iter().enumerate() {
        for i in 0..n {
            sys[(i, j)] = sigma[i].clone();
        }
    }
    for sigma in [&source.sigma1, &source.sigma2] {
        let image = mq.mul_vec(sigma)?;
        if sys.solve(&image)?.is_none() {
            return Err(Error::Generator(
                "degree-two block does not carry the period plane".into(),
            ));
        }
    }
    // ample side: m(omega) in the positive cone of the target
    let image_omega = mq.mul_vec(&source.omega)?;
    if !in_positive_cone(&image_omega, target)? {
        return Err(Error::Generator(
            "degree-two block does not carry the ample class into the positive cone".into(),
        ));
    }
    let mut full = ZMat::identity(n + 2);
    for i in 0..n {
        for j in 0..n {
            full[(i + 1, j + 1)] = m[(i, j)].clone();
        }
    }
    Generator::checked(
        GeneratorKind::Automorphism(m.clone()),
        Isometry::new(full),
        source.clone(),
        target.clone(),
    )
}

/// Reflects `x` in listed roots until it pairs nonnegatively with all of
/// them. Always reflects in the root with the most negative pairing, ties
/// broken by list order, so output words are deterministic. Returns the
/// final vector and the indices of the applied roots in application order.
pub fn chamber_descent(
    gram: &GramForm,
    roots: &[Vec<BigInt>],
    x: &[Rational],
    cap: usize,
) -> Result<(Vec<Rational>, Vec<usize>), Error> {
    let n = gram.rank();
    if x.len() != n || roots.iter().any(|c| c.len() != n) {
        return Err(Error::DimensionMismatch("vector or root length / gram rank".into()));
    }
    let roots_q: Vec<Vec<Rational>> = roots
        .iter()
        .map(|c| c.iter().map(|v| Rational::from_integer(v.clone())).collect())
        .collect();
    let mut current = x.to_vec();
    let mut word = Vec::new();
    for _ in 0..cap {
        let mut worst: Option<(usize, Rational)> = None;
        for (i, c) in roots_q.iter().enumerate() {
            let p = gram.pair(&current, c)?;
            if p.is_negative() {
                worst = match worst {
                    None => Some((i, p)),
                    Some((_, ref w)) if p < *w => Some((i, p)),
                    other => other,
                };
            }
        }
        let Some((idx, pairing)) = worst else {
            return Ok((current, word));
        };
        // s_C(y) = y + (y*C) C for C of square -2
        for (cur, c) in current.iter_mut().zip(&roots_q[idx]) {
            *cur += &pairing * c;
        }
        word.push(idx);
    }
    Err(Error::DescentCap { cap, applied: word.len() })
}

/// Chains and multiplies a word of generators, applied in order. The empty
/// word is not composable without an ambient rank, so it is rejected here;
/// the factorizer handles empty words with explicit surfaces.
pub fn compose_word(word: &[Generator]) -> Result<Isometry, Error> {
    let first = word
        .first()
        .ok_or_else(|| Error::ChainMismatch("empty word".into()))?;
    let mut matrix = first.matrix.clone();
    let mut current = &first.target;
    for (i, gen) in word.iter().enumerate().skip(1) {
        if gen.source != *current {
            return Err(Error::ChainMismatch(format!(
                "generator {i} does not start where generator {} ends",
                i - 1
            )));
        }
        matrix = gen.matrix.compose(&matrix)?;
        current = &gen.target;
    }
    Ok(matrix)
}
