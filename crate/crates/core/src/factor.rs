//! Factorization of orientation-preserving twisted Hodge isometries into
//! generator words with a certified terminal residual.
//!
//! The normalization peels generators on the target side until the residual
//! lands in one of three certified classes:
//!
//! * `IDENTITY` — the residual is the identity between equal surfaces;
//! * `TORELLI`  — the residual is grading-preserving, fixes (1,0,0) and
//!   (0,0,1), matches the B-fields and carries the ample class into the
//!   closed ample chamber; lifting it is the business of the Global Torelli
//!   theorem, treated as an axiom here;
//! * `MODULI(w)` — the residual sends (0,0,1) to a primitive isotropic
//!   (1,1)-vector w of positive rank, or of rank zero with nef nonzero
//!   degree-two part; the corresponding moduli space of twisted sheaves is
//!   treated as an axiom.
//!
//! Certificates store the exact word, the residual and the predicate
//! results, and recompose to the original matrix entrywise.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::lattice::{is_isometry_between, mukai_pairing, CohClass, GramForm, Isometry};
use crate::matrix::ZMat;
use crate::rational::{self, Rational};
use crate::surface::{
    in_positive_cone, in_positive_cone_closure, is_hodge_isometry, orientation_sign,
    TwistedSurface,
};
use crate::transform::{
    chamber_descent, compose_word, gen_bshift, gen_retwist, gen_shift, gen_spherical,
    Generator, GeneratorKind, DESCENT_CAP,
};

/// Branch classification of w = g(0,0,1) = (r, ℓ, s).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageCase {
    PointPlus,
    PointMinus,
    RankPos,
    RankNeg,
    Fiber,
}

/// Classifies an integral Mukai vector by sign of the degree-0 part and
/// vanishing of the degree-2 part.
pub fn classify_image_vector(w: &CohClass) -> Result<ImageCase, Error> {
    if !w.is_integral() {
        return Err(Error::NotIntegral("image vector must be integral".into()));
    }
    if w.r.is_positive() {
        return Ok(ImageCase::RankPos);
    }
    if w.r.is_negative() {
        return Ok(ImageCase::RankNeg);
    }
    if w.c.iter().any(|x| !x.is_zero()) {
        return Ok(ImageCase::Fiber);
    }
    if w.s.is_positive() {
        return Ok(ImageCase::PointPlus);
    }
    if w.s.is_negative() {
        return Ok(ImageCase::PointMinus);
    }
    Err(Error::Internal("image of a primitive vector cannot be zero".into()))
}

/// Recovers b from u = exp(b) = (1, b, b·b/2) with b integral, if u has
/// that shape.
pub fn step2_exp_form(u: &CohClass, gram: &GramForm) -> Result<Option<Vec<BigInt>>, Error> {
    if u.rank_len() != gram.rank() {
        return Err(Error::DimensionMismatch("class / gram rank".into()));
    }
    if !u.r.is_one() {
        return Ok(None);
    }
    if !rational::all_integral(&u.c) {
        return Ok(None);
    }
    let half_square = gram.pair(&u.c, &u.c)? / rational::int(2);
    if u.s != half_square {
        return Ok(None);
    }
    Ok(Some(u.c.iter().map(|x| x.numer().clone()).collect()))
}

/// Outcome of one named terminal check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PredicateStatus {
    Passed,
    Failed(String),
    /// Carried as a hypothesis the lattice data cannot discharge.
    Assumed,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Predicate {
    pub name: String,
    pub status: PredicateStatus,
}

impl Predicate {
    fn check(name: &str, ok: bool, detail: &str) -> Self {
        Predicate {
            name: name.into(),
            status: if ok {
                PredicateStatus::Passed
            } else {
                PredicateStatus::Failed(detail.into())
            },
        }
    }

    fn assumed(name: &str) -> Self {
        Predicate { name: name.into(), status: PredicateStatus::Assumed }
    }

    pub fn is_failed(&self) -> bool {
        matches!(self.status, PredicateStatus::Failed(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModuliSubcase {
    RankPositive,
    FiberType,
}

/// The certified terminal class of a factorization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TerminalKind {
    Identity,
    Torelli { h2_block: ZMat },
    Moduli { vector: CohClass, subcase: ModuliSubcase },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TerminalToken {
    pub kind: TerminalKind,
    pub predicates: Vec<Predicate>,
}

/// A factorization record: `compose_word(word) ∘ residual = original`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub source: TwistedSurface,
    pub target: TwistedSurface,
    pub original: Isometry,
    /// Generators in application order (after the residual).
    pub word: Vec<Generator>,
    pub residual: Isometry,
    /// The surface the residual lands on; the word chains from here to
    /// `target`.
    pub residual_target: TwistedSurface,
    pub terminal: TerminalToken,
}

#[derive(Debug, Clone, Copy)]
pub struct FactorizeOptions {
    /// Demand that a TORELLI residual maps the source root set onto the
    /// target root set.
    pub strict_torelli: bool,
    /// Reflection cap for chamber descent.
    pub descent_cap: usize,
}

impl Default for FactorizeOptions {
    fn default() -> Self {
        FactorizeOptions { strict_torelli: false, descent_cap: DESCENT_CAP }
    }
}

/// Extracts the degree-two block of a grading-preserving matrix, or `None`
/// when any off-block entry is nonzero.
fn grading_block(matrix: &ZMat, n: usize) -> Option<ZMat> {
    let size = n + 2;
    if matrix.rows() != size || matrix.cols() != size {
        return None;
    }
    for j in 1..size {
        if !matrix[(0, j)].is_zero() {
            return None;
        }
    }
    for i in 1..size {
        if !matrix[(i, 0)].is_zero() && i != size - 1 {
            return None;
        }
    }
    if !matrix[(size - 1, 0)].is_zero() {
        return None;
    }
    for i in 1..=n {
        if !matrix[(i, size - 1)].is_zero() {
            return None;
        }
    }
    for j in 1..=n {
        if !matrix[(size - 1, j)].is_zero() {
            return None;
        }
    }
    let mut block = ZMat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            block[(i, j)] = matrix[(i + 1, j + 1)].clone();
        }
    }
    Some(block)
}

fn roots_as_rational(surface: &TwistedSurface) -> Vec<Vec<Rational>> {
    surface
        .roots
        .iter()
        .map(|c| c.iter().map(|x| Rational::from_integer(x.clone())).collect())
        .collect()
}

/// Predicates for a MODULI terminal over the surface the residual lands on.
fn moduli_predicates(
    w: &CohClass,
    subcase: ModuliSubcase,
    surface: &TwistedSurface,
) -> Result<Vec<Predicate>, Error> {
    let mut preds = Vec::new();
    preds.push(Predicate::check(
        "primitivity",
        w.is_integral() && w.content().is_one(),
        "vector is not primitive",
    ));
    let square = mukai_pairing(w, w, &surface.gram)?;
    preds.push(Predicate::check("isotropy", square.is_zero(), "vector has nonzero square"));
    let plane = surface.period_plane()?;
    let type11 = plane
        .iter()
        .map(|p| mukai_pairing(w, p, &surface.gram))
        .collect::<Result<Vec<_>, _>>()?
        .iter()
        .all(|x| x.is_zero());
    preds.push(Predicate::check("type-(1,1)", type11, "vector pairs with the period plane"));
    match subcase {
        ModuliSubcase::RankPositive => {
            preds.push(Predicate::check(
                "rank-positive",
                w.r.is_positive(),
                "degree-0 part is not positive",
            ));
        }
        ModuliSubcase::FiberType => {
            preds.push(Predicate::check(
                "rank-zero",
                w.r.is_zero(),
                "degree-0 part is not zero",
            ));
            let ell_nonzero = w.c.iter().any(|x| !x.is_zero());
            preds.push(Predicate::check(
                "fiber-class-nonzero",
                ell_nonzero,
                "degree-2 part vanishes",
            ));
            let in_closure = ell_nonzero && in_positive_cone_closure(&w.c, surface)?;
            let chamber = roots_as_rational(surface).iter().try_fold(
                true,
                |acc, c| -> Result<bool, Error> {
                    Ok(acc && !surface.gram.pair(&w.c, c)?.is_negative())
                },
            )?;
            preds.push(Predicate::check(
                "fiber-class-nef",
                in_closure && chamber,
                "degree-2 part is not nef",
            ));
        }
    }
    preds.push(Predicate::assumed("moduli-orientation-transport"));
    Ok(preds)
}

/// Predicates for a TORELLI terminal.
fn torelli_predicates(
    residual: &Isometry,
    source: &TwistedSurface,
    surface: &TwistedSurface,
    strict: bool,
) -> Result<Vec<Predicate>, Error> {
    let n = surface.rank();
    let mut preds = Vec::new();
    let block = grading_block(&residual.matrix, n);
    preds.push(Predicate::check(
        "grading-preserving",
        block.is_some(),
        "matrix mixes cohomological degrees",
    ));
    let unit = CohClass::unit(n);
    let point = CohClass::point(n);
    preds.push(Predicate::check(
        "fixes-unit-class",
        residual.apply(&unit)? == unit,
        "(1,0,0) is not fixed",
    ));
    preds.push(Predicate::check(
        "fixes-point-class",
        residual.apply(&point)? == point,
        "(0,0,1) is not fixed",
    ));
    if let Some(block) = block {
        let bq = block.to_qmat();
        let image_omega = bq.mul_vec(&source.omega)?;
        preds.push(Predicate::check(
            "ample-image-in-positive-cone",
            in_positive_cone(&image_omega, surface)?,
            "image of the ample class leaves the positive cone",
        ));
        let chamber = roots_as_rational(surface).iter().try_fold(
            true,
            |acc, c| -> Result<bool, Error> {
                Ok(acc && !surface.gram.pair(&image_omega, c)?.is_negative())
            },
        )?;
        preds.push(Predicate::check(
            "ample-image-in-closed-chamber",
            chamber,
            "image of the ample class pairs negatively with a root",
        ));
        let image_b = bq.mul_vec(&source.b_field)?;
        preds.push(Predicate::check(
            "b-field-match",
            image_b == surface.b_field,
            "degree-two block does not carry B to the target B-field",
        ));
        if strict {
            let mut images: Vec<Vec<Rational>> = Vec::new();
            for c in roots_as_rational(source) {
                images.push(bq.mul_vec(&c)?);
            }
            let mut targets: Vec<Vec<Rational>> = roots_as_rational(surface);
            images.sort();
            targets.sort();
            preds.push(Predicate::check(
                "root-transport",
                images == targets,
                "degree-two block does not map the root set onto the target roots",
            ));
        }
    }
    Ok(preds)
}

fn identity_predicates(
    residual: &Isometry,
    source: &TwistedSurface,
    surface: &TwistedSurface,
) -> Vec<Predicate> {
    vec![
        Predicate::check(
            "residual-is-identity",
            residual.is_identity(),
            "residual matrix is not the identity",
        ),
        Predicate::check(
            "surfaces-equal",
            source == surface,
            "source and residual surfaces differ",
        ),
    ]
}

fn fail_on_predicates(preds: &[Predicate]) -> Result<(), Error> {
    for p in preds {
        if let PredicateStatus::Failed(detail) = &p.status {
            return Err(Error::Predicate(format!("{}: {detail}", p.name)));
        }
    }
    Ok(())
}

struct Peeler {
    residual: Isometry,
    surface: TwistedSurface,
    peeled: Vec<Generator>,
}

impl Peeler {
    /// Applies a freshly built generator on the target side:
    /// residual ← gen ∘ residual.
    fn peel(&mut self, gen: Generator) -> Result<(), Error> {
        debug_assert_eq!(gen.source, self.surface);
        self.residual = gen.matrix.compose(&self.residual)?;
        self.surface = gen.target.clone();
        self.peeled.push(gen);
        Ok(())
    }

    /// The certificate word: inverses of the peeled generators, reversed,
    /// so that compose_word(word) ∘ residual = original.
    fn word(&self) -> Result<Vec<Generator>, Error> {
        self.peeled.iter().rev().map(|g| g.inverse()).collect()
    }
}

/// Factorizes an orientation-preserving twisted Hodge isometry into a word
/// of computable generators and a certified terminal residual.
pub fn factorize(
    g: &Isometry,
    source: &TwistedSurface,
    target: &TwistedSurface,
    opts: &FactorizeOptions,
) -> Result<Certificate, Error> {
    source.validated()?;
    target.validated()?;
    if !is_isometry_between(&g.matrix, &source.gram, &target.gram) {
        return Err(Error::NotIsometry);
    }
    if !is_hodge_isometry(g, source, target)? {
        return Err(Error::NotHodge);
    }
    if orientation_sign(g, source, target)? != 1 {
        return Err(Error::OrientationReversing);
    }

    let n = source.rank();
    let point = CohClass::point(n);
    let unit = CohClass::unit(n);
    let mut peeler =
        Peeler { residual: g.clone(), surface: target.clone(), peeled: Vec::new() };

    // sign normalization by the shift
    let w = peeler.residual.apply(&point)?;
    let needs_shift = match classify_image_vector(&w)? {
        ImageCase::RankNeg | ImageCase::PointMinus => true,
        ImageCase::Fiber => {
            let effective = in_positive_cone_closure(&w.c, &peeler.surface)?;
            let anti: Vec<Rational> = w.c.iter().map(|x| -x.clone()).collect();
            let anti_effective = in_positive_cone_closure(&anti, &peeler.surface)?;
            if !effective && !anti_effective {
                return Err(Error::Internal(
                    "fiber class lies in neither closed positive cone".into(),
                ));
            }
            !effective
        }
        _ => false,
    };
    if needs_shift {
        let shift = gen_shift(&peeler.surface)?;
        peeler.peel(shift)?;
    }

    let w = peeler.residual.apply(&point)?;
    let terminal = match classify_image_vector(&w)? {
        ImageCase::RankNeg | ImageCase::PointMinus => {
            return Err(Error::Internal("sign normalization failed".into()));
        }
        ImageCase::RankPos => {
            let preds = moduli_predicates(&w, ModuliSubcase::RankPositive, &peeler.surface)?;
            fail_on_predicates(&preds)?;
            TerminalToken {
                kind: TerminalKind::Moduli { vector: w, subcase: ModuliSubcase::RankPositive },
                predicates: preds,
            }
        }
        ImageCase::Fiber => {
            let (_, descent) =
                chamber_descent(&peeler.surface.gram, &peeler.surface.roots, &w.c, opts.descent_cap)?;
            for idx in descent {
                let root = CohClass::from_degree_two(
                    peeler.surface.roots[idx]
                        .iter()
                        .map(|x| Rational::from_integer(x.clone()))
                        .collect(),
                );
                let gen = gen_spherical(&root, &peeler.surface)?;
                peeler.peel(gen)?;
            }
            let w = peeler.residual.apply(&point)?;
            let preds = moduli_predicates(&w, ModuliSubcase::FiberType, &peeler.surface)?;
            fail_on_predicates(&preds)?;
            TerminalToken {
                kind: TerminalKind::Moduli { vector: w, subcase: ModuliSubcase::FiberType },
                predicates: preds,
            }
        }
        ImageCase::PointPlus => {
            if w != point {
                return Err(Error::Internal(
                    "image of the point class is a nontrivial multiple".into(),
                ));
            }
            // peel exp(b) so that (1,0,0) is fixed
            let u = peeler.residual.apply(&unit)?;
            if u != unit {
                let b = step2_exp_form(&u, &peeler.surface.gram)?.ok_or_else(|| {
                    Error::NotExpForm(format!(
                        "g(1,0,0) has degree-0 part {}",
                        rational::render_rational(&u.r)
                    ))
                })?;
                let neg_b: Vec<BigInt> = b.iter().map(|x| -x.clone()).collect();
                let gen = gen_bshift(&neg_b, &peeler.surface)?;
                peeler.peel(gen)?;
            }

            // first re-twist: align the target B-field with the image of B
            let block = grading_block(&peeler.residual.matrix, n).ok_or_else(|| {
                Error::Internal("residual fixing (1,0,0) and (0,0,1) must be graded".into())
            })?;
            let image_b = block.to_qmat().mul_vec(&source.b_field)?;
            let twist: Vec<Rational> = image_b
                .iter()
                .zip(&peeler.surface.b_field)
                .map(|(x, y)| x - y)
                .collect();
            if twist.iter().any(|x| !x.is_zero()) {
                let gen = gen_retwist(&twist, &peeler.surface)?;
                peeler.peel(gen)?;
            }

            // chamber descent for the image of the ample class
            let block = grading_block(&peeler.residual.matrix, n)
                .ok_or_else(|| Error::Internal("graded residual expected".into()))?;
            let image_omega = block.to_qmat().mul_vec(&source.omega)?;
            let (_, descent) = chamber_descent(
                &peeler.surface.gram,
                &peeler.surface.roots,
                &image_omega,
                opts.descent_cap,
            )?;
            for idx in descent {
                let root = CohClass::from_degree_two(
                    peeler.surface.roots[idx]
                        .iter()
                        .map(|x| Rational::from_integer(x.clone()))
                        .collect(),
                );
                let gen = gen_spherical(&root, &peeler.surface)?;
                peeler.peel(gen)?;
            }

            // second re-twist: the reflections may have moved the image of B
            let block = grading_block(&peeler.residual.matrix, n)
                .ok_or_else(|| Error::Internal("graded residual expected".into()))?;
            let image_b = block.to_qmat().mul_vec(&source.b_field)?;
            let twist: Vec<Rational> = image_b
                .iter()
                .zip(&peeler.surface.b_field)
                .map(|(x, y)| x - y)
                .collect();
            if twist.iter().any(|x| !x.is_zero()) {
                let gen = gen_retwist(&twist, &peeler.surface)?;
                peeler.peel(gen)?;
            }

            if peeler.residual.is_identity() && *source == peeler.surface {
                let preds = identity_predicates(&peeler.residual, source, &peeler.surface);
                fail_on_predicates(&preds)?;
                TerminalToken { kind: TerminalKind::Identity, predicates: preds }
            } else {
                let block = grading_block(&peeler.residual.matrix, n)
                    .ok_or_else(|| Error::Internal("graded residual expected".into()))?;
                let preds = torelli_predicates(
                    &peeler.residual,
                    source,
                    &peeler.surface,
                    opts.strict_torelli,
                )?;
                fail_on_predicates(&preds)?;
                TerminalToken { kind: TerminalKind::Torelli { h2_block: block }, predicates: preds }
            }
        }
    };

    let word = peeler.word()?;
    let certificate = Certificate {
        source: source.clone(),
        target: target.clone(),
        original: g.clone(),
        word,
        residual: peeler.residual,
        residual_target: peeler.surface,
        terminal: terminal,
    };
    let failures = verify_certificate(&certificate)?;
    if !failures.is_empty() {
        return Err(Error::Predicate(failures.join("; ")));
    }
    Ok(certificate)
}

/// Rebuilds a generator from its kind over the given surfaces; used to
/// confirm that a stored generator matrix matches its parameters.
fn rebuild_generator(
    kind: &GeneratorKind,
    source: &TwistedSurface,
    target: &TwistedSurface,
) -> Result<Generator, Error> {
    match kind {
        GeneratorKind::Shift => gen_shift(source),
        GeneratorKind::LineBundle(l) => crate::transform::gen_line_bundle(l, source),
        GeneratorKind::BShift(b) => gen_bshift(b, source),
        GeneratorKind::ReTwist(b) => gen_retwist(b, source),
        GeneratorKind::Spherical(v) => gen_spherical(v, source),
        GeneratorKind::Automorphism(m) => {
            crate::transform::gen_automorphism(m, source, target)
        }
    }
}

/// Re-checks a certificate from scratch: surface validity, generator
/// reconstruction, chaining, exact recomposition and every terminal
/// predicate. Failures are returned as human-readable strings; an empty
/// list means the certificate verifies.
pub fn verify_certificate(cert: &Certificate) -> Result<Vec<String>, Error> {
    let mut failures = Vec::new();
    for (name, s) in [
        ("source", &cert.source),
        ("target", &cert.target),
        ("residual target", &cert.residual_target),
    ] {
        if let Err(violations) = s.validate() {
            failures.push(format!(
                "{name} surface invalid: {}",
                violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ")
            ));
        }
    }
    if !failures.is_empty() {
        return Ok(failures);
    }

    if !is_isometry_between(&cert.original.matrix, &cert.source.gram, &cert.target.gram) {
        failures.push("original matrix is not an isometry".into());
    }
    if !is_isometry_between(
        &cert.residual.matrix,
        &cert.source.gram,
        &cert.residual_target.gram,
    ) {
        failures.push("residual matrix is not an isometry".into());
    }
    match is_hodge_isometry(&cert.original, &cert.source, &cert.target) {
        Ok(true) => match orientation_sign(&cert.original, &cert.source, &cert.target) {
            Ok(1) => {}
            Ok(_) => failures.push("original isometry is orientation-reversing".into()),
            Err(e) => failures.push(format!("orientation check failed: {e}")),
        },
        Ok(false) => failures.push("original matrix is not a Hodge isometry".into()),
        Err(e) => failures.push(format!("Hodge check failed: {e}")),
    }

    // generator-by-generator reconstruction and chaining
    let mut current = cert.residual_target.clone();
    for (i, gen) in cert.word.iter().enumerate() {
        if gen.source != current {
            failures.push(format!("word entry {i} does not chain from the previous surface"));
            break;
        }
        match rebuild_generator(&gen.kind, &gen.source, &gen.target) {
            Ok(rebuilt) => {
                if rebuilt.matrix != gen.matrix {
                    failures.push(format!(
                        "word entry {i} ({}) does not match its parameters",
                        gen.kind.name()
                    ));
                }
                if rebuilt.target != gen.target {
                    failures.push(format!(
                        "word entry {i} ({}) declares the wrong target surface",
                        gen.kind.name()
                    ));
                }
                current = rebuilt.target;
            }
            Err(e) => {
                failures.push(format!("word entry {i} cannot be rebuilt: {e}"));
                break;
            }
        }
    }
    if current != cert.target {
        failures.push("word does not chain to the certificate target".into());
    }

    // exact recomposition
    let recomposed = if cert.word.is_empty() {
        cert.residual.clone()
    } else {
        match compose_word(&cert.word) {
            Ok(w) => match w.compose(&cert.residual) {
                Ok(m) => m,
                Err(e) => {
                    failures.push(format!("recomposition failed: {e}"));
                    return Ok(failures);
                }
            },
            Err(e) => {
                failures.push(format!("word composition failed: {e}"));
                return Ok(failures);
            }
        }
    };
    if recomposed != cert.original {
        failures.push("recomposition mismatch: word ∘ residual differs from the original".into());
    }

    // terminal predicates, recomputed
    let recomputed = match &cert.terminal.kind {
        TerminalKind::Identity => {
            identity_predicates(&cert.residual, &cert.source, &cert.residual_target)
        }
        TerminalKind::Torelli { h2_block } => {
            match grading_block(&cert.residual.matrix, cert.residual_target.rank()) {
                Some(block) if block == *h2_block => {}
                _ => failures.push("stored degree-two block does not match the residual".into()),
            }
            let strict = cert
                .terminal
                .predicates
                .iter()
                .any(|p| p.name == "root-transport");
            torelli_predicates(&cert.residual, &cert.source, &cert.residual_target, strict)?
        }
        TerminalKind::Moduli { vector, subcase } => {
            let n = cert.residual_target.rank();
            let image = cert.residual.apply(&CohClass::point(n))?;
            if image != *vector {
                failures.push("stored moduli vector does not match the residual image".into());
            }
            moduli_predicates(vector, *subcase, &cert.residual_target)?
        }
    };
    for p in &recomputed {
        if let PredicateStatus::Failed(detail) = &p.status {
            failures.push(format!("{}: {detail}", p.name));
        }
    }
    Ok(failures)
}
