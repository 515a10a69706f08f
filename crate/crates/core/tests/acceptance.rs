//! Acceptance suite: one test per criterion, each printing a pass line and
//! holding its stated time budget. All value checks are exact.
//!
//! Run with `cargo test -p mukai-core --test acceptance -- --nocapture` to
//! see the per-criterion lines.

mod common;

use std::sync::{Mutex, MutexGuard};
use std::time::Instant;

use common::*;
use mukai_core::chern::{
    azumaya_chern, b_field_of, ch_g, ch_g_b, mukai_vector, shift_chern, LocallyFreeDatum,
    MukaiVector, TwistedChernClass,
};
use mukai_core::factor::{factorize, step2_exp_form, verify_certificate, FactorizeOptions};
use mukai_core::lattice::{
    is_isometry, mukai_gram, mukai_pairing, ring_mult, CohClass, GramForm,
};
use mukai_core::matrix::{QMat, ZMat};
use mukai_core::rational::{self, Rational};
use mukai_core::surface::{
    in_positive_cone_closure, is_hodge_isometry, orientation_sign, picard_lattice, presets,
    spherical_search, SphericalOutcome,
};
use mukai_core::transform::{chamber_descent, compose_word, GeneratorKind, DESCENT_CAP};
use mukai_core::{Generator, Isometry};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The budgets are wall-clock, so the criteria must not race each other on
/// the test threads; each takes this lock before starting its timer.
static EXCLUSIVE: Mutex<()> = Mutex::new(());

fn exclusive() -> MutexGuard<'static, ()> {
    EXCLUSIVE.lock().unwrap_or_else(|poisoned| poisoned.into_inner())
}

fn pass(criterion: u32, what: &str, elapsed_ms: f64, budget_ms: f64) {
    println!("[PASS] criterion {criterion}: {what} ({elapsed_ms:.2} ms, budget {budget_ms:.0} ms)");
    assert!(
        elapsed_ms <= budget_ms,
        "criterion {criterion} exceeded its budget: {elapsed_ms:.2} ms > {budget_ms:.0} ms"
    );
}

fn untwisted_vector(class: CohClass, gram: &GramForm) -> MukaiVector {
    mukai_vector(&TwistedChernClass::untwisted(class), gram).unwrap()
}

#[test]
fn criterion_01_euler_pairing_anchors() {
    let _guard = exclusive();
    let gram = GramForm::preset("U3_E8m2").unwrap();
    let n = gram.rank();
    let v_sphere = untwisted_vector(CohClass::unit(n), &gram);
    let mut c = vec![Rational::zero(); n];
    c[6] = rational::int(1); // a (-2)-class inside the first E8(-1) block
    let v_curve = untwisted_vector(CohClass::from_degree_two(c), &gram);
    let v_point = untwisted_vector(CohClass::point(n), &gram);

    let start = Instant::now();
    let chi_sphere =
        -mukai_pairing(&v_sphere.value, &v_sphere.value, &gram).unwrap();
    let chi_curve = -mukai_pairing(&v_curve.value, &v_curve.value, &gram).unwrap();
    let chi_point = -mukai_pairing(&v_point.value, &v_point.value, &gram).unwrap();
    let elapsed = start.elapsed().as_secs_f64() * 1e3;

    assert_eq!(chi_sphere, rational::int(2));
    assert_eq!(chi_curve, rational::int(2));
    assert_eq!(chi_point, rational::int(0));
    pass(1, "Euler pairing anchors chi = 2, 2, 0", elapsed, 1.0);
}

#[test]
fn criterion_02_chern_group_law() {
    let _guard = exclusive();
    let gram = GramForm::preset("U3_E8m2").unwrap();
    let n = gram.rank();
    let mut rng = ChaCha8Rng::seed_from_u64(0x02);
    // data generation stays outside the timed section
    let cases: Vec<(Vec<Rational>, Vec<Rational>, TwistedChernClass)> = (0..1000)
        .map(|_| {
            (
                random_rational_vec(&mut rng, n),
                random_rational_vec(&mut rng, n),
                TwistedChernClass::new(
                    CohClass::from_coords(&random_rational_vec(&mut rng, n + 2)).unwrap(),
                    random_rational_vec(&mut rng, n),
                )
                .unwrap(),
            )
        })
        .collect();
    let start = Instant::now();
    for (b, b2, ch) in &cases {
        // exp(b) exp(b') = exp(b + b')
        let eb = CohClass::exp(b, &gram).unwrap();
        let eb2 = CohClass::exp(b2, &gram).unwrap();
        let sum: Vec<Rational> = b.iter().zip(b2).map(|(x, y)| x + y).collect();
        assert_eq!(
            ring_mult(&eb, &eb2, &gram).unwrap(),
            CohClass::exp(&sum, &gram).unwrap()
        );
        // ch^{B+b} = ch^B exp(b), two routes, including the bookkeeping
        let shifted = shift_chern(ch, b, &gram).unwrap();
        assert_eq!(shifted.value, ring_mult(&ch.value, &eb, &gram).unwrap());
        assert_eq!(
            shifted.b_field,
            ch.b_field.iter().zip(b).map(|(x, y)| x + y).collect::<Vec<_>>()
        );
    }
    let elapsed = start.elapsed().as_secs_f64() * 1e3;
    pass(2, "Chern group law over 1000 random rational shifts", elapsed, 1000.0);
}

#[test]
fn criterion_03_azumaya_dictionary() {
    let _guard = exclusive();
    let gram = GramForm::preset("U3_E8m2").unwrap();
    let n = gram.rank();
    let mut rng = ChaCha8Rng::seed_from_u64(0x03);
    let start = Instant::now();
    for _ in 0..1000 {
        let rank = rng.gen_range(1u32..=8);
        let mut c1 = random_rational_vec(&mut rng, n);
        c1.truncate(n);
        let datum = LocallyFreeDatum::new(
            rank,
            TwistedChernClass::new(
                CohClass::new(rational::int(rank as i64), c1, small_rational(&mut rng)),
                random_rational_vec(&mut rng, n),
            )
            .unwrap(),
        )
        .unwrap();
        let f = CohClass::from_coords(&random_rational_vec(&mut rng, n + 2)).unwrap();
        // exp(-B_G) ch_G^B(F) = ch_G(F)
        let bg = b_field_of(&datum);
        let neg_bg: Vec<Rational> = bg.iter().map(|x| -x.clone()).collect();
        let lhs = ring_mult(
            &CohClass::exp(&neg_bg, &gram).unwrap(),
            &ch_g_b(&f, &datum, &gram).unwrap().value,
            &gram,
        )
        .unwrap();
        assert_eq!(lhs, ch_g(&f, &datum, &gram).unwrap());
        // the Azumaya class has rank^2 in degree 0 and no degree-2 part
        let a = azumaya_chern(&datum, &gram).unwrap();
        assert_eq!(a.r, rational::int((rank as i64) * (rank as i64)));
        assert!(a.c.iter().all(|x| x.is_zero()));
    }
    // invariance under G -> G (x) H for untwisted H
    for _ in 0..200 {
        let rank = rng.gen_range(1u32..=4);
        let h_rank = rng.gen_range(1i64..=4);
        let datum = LocallyFreeDatum::new(
            rank,
            TwistedChernClass::new(
                CohClass::new(
                    rational::int(rank as i64),
                    random_rational_vec(&mut rng, n),
                    small_rational(&mut rng),
                ),
                random_rational_vec(&mut rng, n),
            )
            .unwrap(),
        )
        .unwrap();
        let ch_h = CohClass::new(
            rational::int(h_rank),
            random_rational_vec(&mut rng, n),
            small_rational(&mut rng),
        );
        let ch_h_dual = CohClass::new(
            ch_h.r.clone(),
            ch_h.c.iter().map(|x| -x.clone()).collect(),
            ch_h.s.clone(),
        );
        let f = CohClass::from_coords(&random_rational_vec(&mut rng, n + 2)).unwrap();
        let prod = ring_mult(&datum.ch_b().value, &ch_h, &gram).unwrap();
        let datum_h = LocallyFreeDatum::new(
            rank * (h_rank as u32),
            TwistedChernClass::new(prod, datum.ch_b().b_field.clone()).unwrap(),
        )
        .unwrap();
        let f_h = ring_mult(&ch_h_dual, &f, &gram).unwrap();
        assert_eq!(
            ch_g_b(&f, &datum, &gram).unwrap(),
            ch_g_b(&f_h, &datum_h, &gram).unwrap()
        );
    }
    let elapsed = start.elapsed().as_secs_f64() * 1e3;
    pass(3, "Azumaya character dictionary and G-invariance", elapsed, 2000.0);
}

#[test]
fn criterion_04_generator_soundness() {
    let _guard = exclusive();
    let mut rng = ChaCha8Rng::seed_from_u64(0x04);
    let desk = presets::u3_with_roots();
    let k3 = presets::k3_model();
    let start = Instant::now();
    for i in 0..500 {
        let surface = if i % 5 == 0 { &k3 } else { &desk };
        let gen = random_generator(&mut rng, surface, false);
        // the constructor enforces the contract; re-check from outside
        assert!(is_isometry(&gen.matrix.matrix, &surface.gram));
        assert!(is_hodge_isometry(&gen.matrix, &gen.source, &gen.target).unwrap());
        assert_eq!(orientation_sign(&gen.matrix, &gen.source, &gen.target).unwrap(), 1);
        if let GeneratorKind::Spherical(v) = &gen.kind {
            // involution
            assert!(gen.matrix.compose(&gen.matrix).unwrap().is_identity());
            // fixes the orthogonal complement pointwise
            let ghat = mukai_gram(&surface.gram);
            let gv = ghat.mul_vec(&v.coords()).unwrap();
            let row = QMat::from_rows(vec![gv]).unwrap();
            for basis_vec in row.kernel_basis() {
                let x = CohClass::from_coords(&basis_vec).unwrap();
                assert_eq!(gen.matrix.apply(&x).unwrap(), x);
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64() * 1e3;
    pass(4, "500 random generators sound (isometry, Hodge, orientation)", elapsed, 2000.0);
}

#[test]
fn criterion_05_orientation_calibration() {
    let _guard = exclusive();
    let start = Instant::now();
    for surface in [presets::u3_model(), presets::k3_model()] {
        let n = surface.rank();
        // the shift: -id on the whole lattice has sign +1
        let mut neg_all = ZMat::zeros(n + 2, n + 2);
        for i in 0..n + 2 {
            neg_all[(i, i)] = -BigInt::one();
        }
        let shift = Isometry::new(neg_all);
        assert_eq!(orientation_sign(&shift, &surface, &surface).unwrap(), 1);
        // -id on degree two only has sign -1
        let mut neg_h2 = ZMat::identity(n + 2);
        for i in 1..=n {
            neg_h2[(i, i)] = -BigInt::one();
        }
        let flip = Isometry::new(neg_h2);
        assert!(is_hodge_isometry(&flip, &surface, &surface).unwrap());
        assert_eq!(orientation_sign(&flip, &surface, &surface).unwrap(), -1);
    }
    let elapsed = start.elapsed().as_secs_f64() * 1e3;
    pass(5, "orientation calibration: shift +1, -id on H2 gives -1", elapsed, 1000.0);
}

#[test]
fn criterion_06_factorization_round_trip() {
    let _guard = exclusive();
    let mut rng = ChaCha8Rng::seed_from_u64(0x06);
    let desk = presets::u3_with_roots();
    let k3 = presets::k3_model();
    let opts = FactorizeOptions::default();
    let start = Instant::now();
    for i in 0..200 {
        let surface = if i % 2 == 0 { &desk } else { &k3 };
        let word = random_word(&mut rng, surface, 6, false);
        let end_surface = word.last().unwrap().target.clone();
        let composed = compose_word(&word).unwrap();
        let cert = factorize(&composed, surface, &end_surface, &opts)
            .unwrap_or_else(|e| panic!("word {i} failed to factorize: {e}"));
        let failures = verify_certificate(&cert).unwrap();
        assert!(failures.is_empty(), "word {i}: {failures:?}");
        let recomposed = if cert.word.is_empty() {
            cert.residual.clone()
        } else {
            compose_word(&cert.word).unwrap().compose(&cert.residual).unwrap()
        };
        assert_eq!(recomposed.matrix, composed.matrix, "word {i} recomposition");
    }
    let elapsed = start.elapsed().as_secs_f64() * 1e3;
    pass(6, "200 random words factorize and recompose entrywise", elapsed, 30_000.0);
}

#[test]
fn criterion_07_step2_lemma() {
    let _guard = exclusive();
    let mut rng = ChaCha8Rng::seed_from_u64(0x07);
    let desk = presets::u3_with_roots();
    let k3 = presets::k3_model();
    let start = Instant::now();
    let n_desk = desk.rank();
    let point_desk = CohClass::point(n_desk);
    let unit_desk = CohClass::unit(n_desk);
    for i in 0..500 {
        let surface = if i % 10 == 0 { &k3 } else { &desk };
        let word = random_word(&mut rng, surface, 4, true);
        let g = compose_word(&word).unwrap();
        let end = &word.last().unwrap().target;
        let (point, unit) = if surface.rank() == n_desk {
            (point_desk.clone(), unit_desk.clone())
        } else {
            (CohClass::point(surface.rank()), CohClass::unit(surface.rank()))
        };
        assert_eq!(g.apply(&point).unwrap(), point, "word {i} does not fix (0,0,1)");
        let u = g.apply(&unit).unwrap();
        let b = step2_exp_form(&u, &end.gram).unwrap();
        assert!(b.is_some(), "word {i}: g(1,0,0) = {u:?} is not of exponential form");
    }
    let elapsed = start.elapsed().as_secs_f64() * 1e3;
    pass(7, "g(1,0,0) has exponential form for 500 point-fixing isometries", elapsed, 10_000.0);
}

#[test]
fn criterion_08_chamber_descent() {
    let _guard = exclusive();
    let start = Instant::now();
    // documented example on U: (1,2) against root (-1,1) descends in one step
    let u = GramForm::preset("U").unwrap();
    let root: Vec<BigInt> = vec![BigInt::from(-1), BigInt::from(1)];
    let x = vec![rational::int(1), rational::int(2)];
    let (out, word) = chamber_descent(&u, &[root.clone()], &x, DESCENT_CAP).unwrap();
    assert_eq!(out, vec![rational::int(2), rational::int(1)]);
    assert_eq!(word.len(), 1);

    // random inputs over root systems of up to 4 roots
    let mut rng = ChaCha8Rng::seed_from_u64(0x08);
    let all_roots: Vec<Vec<BigInt>> = vec![
        vec![1, 0, 1, -1, 0, 0],
        vec![1, 0, -1, 1, 0, 0],
        vec![1, 0, 0, 0, 1, -1],
        vec![1, 0, 0, 0, -1, 1],
    ]
    .into_iter()
    .map(|v| v.into_iter().map(BigInt::from).collect())
    .collect();
    let surface = presets::u3_model();
    for _ in 0..100 {
        let count = rng.gen_range(1..=4usize);
        let roots: Vec<Vec<BigInt>> = all_roots.iter().take(count).cloned().collect();
        // ample-heavy sample stays in the closure of the positive cone
        let k = rng.gen_range(3i64..=8);
        let mut x = vec![Rational::zero(); 6];
        x[0] = rational::int(k + rng.gen_range(0..=3));
        x[1] = rational::int(k);
        x[2] = rational::int(rng.gen_range(-2i64..=2));
        x[3] = -x[2].clone();
        x[4] = rational::int(rng.gen_range(-2i64..=2));
        x[5] = -x[4].clone();
        if !in_positive_cone_closure(&x, &surface).unwrap() {
            continue;
        }
        let (out, word) = chamber_descent(&surface.gram, &roots, &x, DESCENT_CAP).unwrap();
        for c in &roots {
            let cq: Vec<Rational> =
                c.iter().map(|v| Rational::from_integer(v.clone())).collect();
            assert!(!surface.gram.pair(&out, &cq).unwrap().is_negative());
        }
        // replaying the word maps x to the output exactly
        let mut replay = x;
        for &idx in &word {
            let cq: Vec<Rational> =
                roots[idx].iter().map(|v| Rational::from_integer(v.clone())).collect();
            let p = surface.gram.pair(&replay, &cq).unwrap();
            for (r, c) in replay.iter_mut().zip(&cq) {
                *r += &p * c;
            }
        }
        assert_eq!(replay, out);
    }
    let elapsed = start.elapsed().as_secs_f64() * 1e3;
    pass(8, "chamber descent: documented example and random systems", elapsed, 1000.0);
}

#[test]
fn criterion_09_twisted_picard_against_brute_force() {
    let _guard = exclusive();
    let start = Instant::now();
    let surface = presets::u3_half_twist();
    let pic = picard_lattice(&surface).unwrap();

    // membership of (2, f2, s) for every integral s in the box
    for s in -5i64..=5 {
        let mut c = vec![Rational::zero(); 6];
        c[3] = rational::int(1);
        let v = CohClass::new(rational::int(2), c, rational::int(s));
        assert!(pic.membership(&v).is_some(), "missing (2, f2, {s})");
    }
    // no rank-1 vector, globally: every basis vector has even degree-0 part
    for b in &pic.basis {
        assert!(b[0].is_even());
    }

    // brute-force kernel enumeration over the coefficient box of radius 5:
    // every integral Mukai vector in the box that annihilates the twisted
    // plane must be an integer combination of the computed basis
    let plane = surface.period_plane().unwrap();
    let ghat = mukai_gram(&surface.gram);
    let mut condition_rows: Vec<Vec<i64>> = Vec::new();
    for p in &plane {
        let gp = ghat.mul_vec(&p.coords()).unwrap();
        let (ints, _) = rational::scale_to_integers(&gp);
        condition_rows.push(ints.iter().map(|x| x.to_i64().unwrap()).collect());
    }
    // integral left-solver for the basis: coords = (B^T B)^{-1} B^T x
    let basis_q = QMat::from_rows(
        pic.basis
            .iter()
            .map(|b| b.iter().map(|x| Rational::from_integer(x.clone())).collect())
            .collect::<Vec<_>>(),
    )
    .unwrap()
    .transpose();
    let btb = basis_q.transpose().mul(&basis_q).unwrap();
    let solver = btb.inverse().unwrap().unwrap().mul(&basis_q.transpose()).unwrap();
    let mut solver_scaled: Vec<Vec<i64>> = Vec::new();
    let mut denoms: Vec<i64> = Vec::new();
    for i in 0..solver.rows() {
        let row: Vec<Rational> = (0..solver.cols()).map(|j| solver[(i, j)].clone()).collect();
        let (ints, d) = rational::scale_to_integers(&row);
        solver_scaled.push(ints.iter().map(|x| x.to_i64().unwrap()).collect());
        denoms.push(d.to_i64().unwrap());
    }

    let radius = 5i64;
    let mut kernel_points = 0u64;
    let mut members = 0u64;
    let mut coords = [0i64; 8];
    // nested loops with early pruning on the two linear conditions; the
    // pruning is exact, so the scan is equivalent to the full box
    for r in -radius..=radius {
        coords[0] = r;
        for c3 in -radius..=radius {
            coords[3] = c3;
            for c4 in -radius..=radius {
                coords[4] = c4;
                // condition row 1 involves only (r, c3, c4) here
                let dot1 = condition_rows[0][0] * r
                    + condition_rows[0][3] * c3
                    + condition_rows[0][4] * c4;
                if dot1 != 0 {
                    continue;
                }
                for c5 in -radius..=radius {
                    coords[5] = c5;
                    for c6 in -radius..=radius {
                        coords[6] = c6;
                        let dot2 = condition_rows[1][5] * c5 + condition_rows[1][6] * c6;
                        if dot2 != 0 {
                            continue;
                        }
                        for c1 in -radius..=radius {
                            coords[1] = c1;
                            for c2 in -radius..=radius {
                                coords[2] = c2;
                                for s in -radius..=radius {
                                    coords[7] = s;
                                    kernel_points += 1;
                                    // integral coordinates over the basis?
                                    let mut integral = true;
                                    for (row, d) in
                                        solver_scaled.iter().zip(&denoms)
                                    {
                                        let mut acc = 0i64;
                                        for t in 0..8 {
                                            acc += row[t] * coords[t];
                                        }
                                        if acc % d != 0 {
                                            integral = false;
                                            break;
                                        }
                                    }
                                    if integral {
                                        members += 1;
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    assert_eq!(
        kernel_points, members,
        "computed basis is not saturated: {} kernel points, {} members",
        kernel_points, members
    );
    assert!(kernel_points > 0);
    let elapsed = start.elapsed().as_secs_f64() * 1e3;
    pass(9, "twisted Picard lattice matches brute-force kernel enumeration", elapsed, 5000.0);
}

#[test]
fn criterion_10_spherical_nonexistence_witness() {
    let _guard = exclusive();
    let start = Instant::now();
    let surface = presets::no_spherical_witness();
    assert_eq!(surface.validate(), Ok(()));
    match spherical_search(&surface, 50).unwrap() {
        SphericalOutcome::Absent { obstruction_modulus, bound } => {
            assert_eq!(bound, 50);
            assert_eq!(obstruction_modulus, Some(4), "expected the mod-4 obstruction");
        }
        SphericalOutcome::Witness { vector, .. } => {
            panic!("unexpected spherical witness {vector:?}");
        }
    }
    // the documented congruence: the Picard form takes values ≡ 0 (mod 4),
    // so -2 is never represented at any bound
    let pic = picard_lattice(&surface).unwrap();
    let q = pic.gram(&surface.gram).unwrap();
    for i in 0..pic.rank() {
        assert!((&q[(i, i)] % BigInt::from(4)).is_zero());
        for j in 0..pic.rank() {
            if i != j {
                assert!(q[(i, j)].is_even());
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64() * 1e3;
    pass(10, "spherical search certifies nonexistence via the mod-4 obstruction", elapsed, 10_000.0);
}

// keep the sampling helpers referenced so the shared module stays honest
#[allow(dead_code)]
fn _touch(_: &Generator) {}
