//! The twisted Chern character dictionary.
//!
//! Twisted sheaves are represented purely by their character data: a class
//! together with the B-field it is twisted by. The operations here are the
//! B-field shift ch ↦ ch·exp(b), the Mukai vector ch·√td, the Euler pairing
//! χ = −⟨·,·⟩, the Azumaya-side characters ch_G^B and ch_G, and the
//! exp(−B_G) comparison between the two.

use num_traits::{One, Zero};

use crate::error::Error;
use crate::lattice::{mukai_pairing, ring_inverse, ring_mult, ring_sqrt, CohClass, GramForm};
use crate::rational::{int, Rational};

/// A class together with the B-field it is twisted by.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwistedChernClass {
    pub value: CohClass,
    pub b_field: Vec<Rational>,
}

impl TwistedChernClass {
    pub fn new(value: CohClass, b_field: Vec<Rational>) -> Result<Self, Error> {
        if value.rank_len() != b_field.len() {
            return Err(Error::DimensionMismatch("class / B-field length".into()));
        }
        Ok(TwistedChernClass { value, b_field })
    }

    /// An untwisted class (B = 0).
    pub fn untwisted(value: CohClass) -> Self {
        let n = value.rank_len();
        TwistedChernClass { value, b_field: vec![Rational::zero(); n] }
    }
}

/// v = ch·√td, still carrying its B-field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MukaiVector {
    pub value: CohClass,
    pub b_field: Vec<Rational>,
}

/// The character datum of a twisted locally free sheaf of positive rank.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocallyFreeDatum {
    rank: u32,
    ch_b: TwistedChernClass,
}

impl LocallyFreeDatum {
    pub fn new(rank: u32, ch_b: TwistedChernClass) -> Result<Self, Error> {
        if rank == 0 {
            return Err(Error::NonUnitClass);
        }
        if ch_b.value.r != int(rank as i64) {
            return Err(Error::DimensionMismatch(format!(
                "degree-0 part of the character must equal the rank {rank}"
            )));
        }
        Ok(LocallyFreeDatum { rank, ch_b })
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn ch_b(&self) -> &TwistedChernClass {
        &self.ch_b
    }
}

/// ch^{B+b} = ch^B · exp(b); the carried B-field grows by b.
pub fn shift_chern(
    ch: &TwistedChernClass,
    b: &[Rational],
    gram: &GramForm,
) -> Result<TwistedChernClass, Error> {
    if b.len() != gram.rank() {
        return Err(Error::DimensionMismatch("shift vector / gram rank".into()));
    }
    let eb = CohClass::exp(b, gram)?;
    let value = ring_mult(&ch.value, &eb, gram)?;
    let b_field = ch.b_field.iter().zip(b).map(|(x, y)| x + y).collect();
    Ok(TwistedChernClass { value, b_field })
}

/// v = ch · √td with √td = (1, 0, 1).
pub fn mukai_vector(ch: &TwistedChernClass, gram: &GramForm) -> Result<MukaiVector, Error> {
    let sqrt_td = CohClass::new(
        Rational::one(),
        vec![Rational::zero(); gram.rank()],
        Rational::one(),
    );
    Ok(MukaiVector {
        value: ring_mult(&ch.value, &sqrt_td, gram)?,
        b_field: ch.b_field.clone(),
    })
}

/// χ(F₁, F₂) = −⟨v₁, v₂⟩. Both vectors must be twisted by the same B-field.
pub fn euler_pairing(
    v1: &MukaiVector,
    v2: &MukaiVector,
    gram: &GramForm,
) -> Result<Rational, Error> {
    if v1.b_field != v2.b_field {
        return Err(Error::DimensionMismatch(
            "Euler pairing needs matching B-fields".into(),
        ));
    }
    Ok(-mukai_pairing(&v1.value, &v2.value, gram)?)
}

/// (r, c, s)∨ = (r, −c, s), with the B-field sign flipped.
pub fn dual_chern(ch: &TwistedChernClass) -> TwistedChernClass {
    TwistedChernClass {
        value: CohClass::new(
            ch.value.r.clone(),
            ch.value.c.iter().map(|x| -x.clone()).collect(),
            ch.value.s.clone(),
        ),
        b_field: ch.b_field.iter().map(|x| -x.clone()).collect(),
    }
}

/// ch(A_G) = ch^{−B}(G∨) · ch^B(G): an untwisted class of degree-0 part
/// rank² whose degree-2 part always vanishes.
pub fn azumaya_chern(g: &LocallyFreeDatum, gram: &GramForm) -> Result<CohClass, Error> {
    let dual = dual_chern(g.ch_b());
    let product = ring_mult(&dual.value, &g.ch_b().value, gram)?;
    debug_assert!(product.c.iter().all(|x| x.is_zero()));
    debug_assert_eq!(product.r, int((g.rank() as i64) * (g.rank() as i64)));
    Ok(product)
}

/// ch_G^B(F) = ch(F) / ch^{−B}(G∨); the result is twisted by G's B-field.
pub fn ch_g_b(
    ch_f: &CohClass,
    g: &LocallyFreeDatum,
    gram: &GramForm,
) -> Result<TwistedChernClass, Error> {
    let dual = dual_chern(g.ch_b());
    let inv = ring_inverse(&dual.value, gram)?;
    Ok(TwistedChernClass {
        value: ring_mult(ch_f, &inv, gram)?,
        b_field: g.ch_b().b_field.clone(),
    })
}

/// ch_G(F) = ch(F) / √(ch(A_G)); an untwisted class.
pub fn ch_g(ch_f: &CohClass, g: &LocallyFreeDatum, gram: &GramForm) -> Result<CohClass, Error> {
    let azumaya = azumaya_chern(g, gram)?;
    let root = ring_sqrt(&azumaya, gram)?;
    let inv = ring_inverse(&root, gram)?;
    ring_mult(ch_f, &inv, gram)
}

/// B_G = c₁^B(G) / rk(G): the degree-two part of the character divided by
/// the rank. Defines the same Brauer class as B.
pub fn b_field_of(g: &LocallyFreeDatum) -> Vec<Rational> {
    let rank = int(g.rank() as i64);
    g.ch_b().value.c.iter().map(|x| x / &rank).collect()
}
