//! Deterministic sampling of rationals, spherical classes and generator
//! words. Used by the randomized property suites, the benchmark harness
//! and the command-line self test; everything is seeded, so identical
//! seeds give identical samples.

use crate::lattice::{mukai_pairing, CohClass};
use crate::matrix::{integer_kernel_basis, ZMat};
use crate::rational::{self, Rational};
use crate::surface::TwistedSurface;
use crate::transform::{
    gen_automorphism, gen_bshift, gen_line_bundle, gen_retwist, gen_shift, gen_spherical,
    Generator,
};
use num_bigint::BigInt;
use num_traits::Zero;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn small_rational(rng: &mut ChaCha8Rng) -> Rational {
    rational::ratio(rng.gen_range(-12i64..=12), rng.gen_range(1i64..=6))
}

pub fn random_rational_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<Rational> {
    (0..n).map(|_| small_rational(rng)).collect()
}

pub fn random_integral_vec(rng: &mut ChaCha8Rng, n: usize, bound: i64) -> Vec<BigInt> {
    (0..n).map(|_| BigInt::from(rng.gen_range(-bound..=bound))).collect()
}

/// Integral basis of NS = {x : x·σᵢ = 0} for the surface.
pub fn ns_basis(s: &TwistedSurface) -> Vec<Vec<BigInt>> {
    let n = s.rank();
    let mut rows = Vec::new();
    for sigma in [&s.sigma1, &s.sigma2] {
        let g_sigma = s.gram.matrix().mul_vec(sigma).unwrap();
        rows.push(rational::scale_to_integers(&g_sigma).0);
    }
    let a = ZMat::from_rows(rows).unwrap();
    let _ = n;
    integer_kernel_basis(&a)
}

/// Small NS combinations of square −2: always valid spherical classes in
/// degree two, for any B-field.
pub fn degree_two_sphericals(s: &TwistedSurface, max: usize) -> Vec<CohClass> {
    let basis = ns_basis(s);
    let n = s.rank();
    let mut out = Vec::new();
    let coeffs = [-1i64, 0, 1];
    for i in 0..basis.len() {
        for j in i..basis.len() {
            for &a in &coeffs {
                for &b in &coeffs {
                    if a == 0 && b == 0 {
                        continue;
                    }
                    let mut c = vec![Rational::zero(); n];
                    for t in 0..n {
                        c[t] = Rational::from_integer(
                            BigInt::from(a) * &basis[i][t] + BigInt::from(b) * &basis[j][t],
                        );
                    }
                    let class = CohClass::from_degree_two(c);
                    if mukai_pairing(&class, &class, &s.gram).unwrap() == rational::int(-2) {
                        out.push(class);
                        if out.len() >= max {
                            return out;
                        }
                    }
                }
            }
        }
    }
    out
}

/// One random generator anchored at `s`. `fixing` restricts to kinds that
/// fix the point class (0,0,1).
pub fn random_generator(
    rng: &mut ChaCha8Rng,
    s: &TwistedSurface,
    fixing: bool,
) -> Generator {
    let n = s.rank();
    let ns = ns_basis(s);
    loop {
        let kind = rng.gen_range(0..6u8);
        let attempt = match kind {
            0 if !fixing => gen_shift(s),
            1 => {
                let mut l = vec![BigInt::zero(); n];
                for b in &ns {
                    let k = rng.gen_range(-2i64..=2);
                    for t in 0..n {
                        l[t] += BigInt::from(k) * &b[t];
                    }
                }
                gen_line_bundle(&l, s)
            }
            2 => gen_bshift(&random_integral_vec(rng, n, 2), s),
            3 => {
                let mut b = vec![Rational::zero(); n];
                for basis_vec in &ns {
                    let k = rational::ratio(rng.gen_range(-3i64..=3), rng.gen_range(1i64..=3));
                    for t in 0..n {
                        b[t] += &k * &Rational::from_integer(basis_vec[t].clone());
                    }
                }
                gen_retwist(&b, s)
            }
            4 => {
                let mut candidates: Vec<CohClass> = s
                    .roots
                    .iter()
                    .map(|c| {
                        CohClass::from_degree_two(
                            c.iter().map(|x| Rational::from_integer(x.clone())).collect(),
                        )
                    })
                    .collect();
                candidates.extend(degree_two_sphericals(s, 4));
                if !fixing {
                    // rank-one spherical, valid when B pairs to zero with σ
                    candidates.push(CohClass::new(
                        rational::int(1),
                        vec![Rational::zero(); n],
                        rational::int(1),
                    ));
                }
                if candidates.is_empty() {
                    continue;
                }
                let v = &candidates[rng.gen_range(0..candidates.len())];
                gen_spherical(v, s)
            }
            _ => {
                // candidate degree-two isometries that often fix the data:
                // swap of the first hyperbolic plane, or of the two E8
                // blocks on the rank-22 form
                let mut m = ZMat::identity(n);
                if n == 22 && rng.gen_bool(0.5) {
                    for i in 0..8 {
                        m[(6 + i, 6 + i)] = BigInt::zero();
                        m[(14 + i, 14 + i)] = BigInt::zero();
                        m[(6 + i, 14 + i)] = BigInt::from(1);
                        m[(14 + i, 6 + i)] = BigInt::from(1);
                    }
                } else {
                    m[(0, 0)] = BigInt::zero();
                    m[(1, 1)] = BigInt::zero();
                    m[(0, 1)] = BigInt::from(1);
                    m[(1, 0)] = BigInt::from(1);
                }
                let image_b = m.to_qmat().mul_vec(&s.b_field).unwrap();
                let target = s.with_b_field(image_b);
                if target.validate().is_err() {
                    continue;
                }
                gen_automorphism(&m, s, &target)
            }
        };
        if let Ok(gen) = attempt {
            return gen;
        }
    }
}

/// A chained word of up to `max_len` generators starting at `start`.
pub fn random_word(
    rng: &mut ChaCha8Rng,
    start: &TwistedSurface,
    max_len: usize,
    fixing: bool,
) -> Vec<Generator> {
    let len = rng.gen_range(1..=max_len);
    let mut word = Vec::with_capacity(len);
    let mut current = start.clone();
    for _ in 0..len {
        let gen = random_generator(rng, &current, fixing);
        current = gen.target.clone();
        word.push(gen);
    }
    word
}
