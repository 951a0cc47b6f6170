//! Invariants of the flat-extension machinery beyond the acceptance round
//! trips: soundness of successful certificates, rejection of inconsistent
//! functionals, the catalecticant lower bound, and coordinate invariance of
//! the certified rank.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use apolar_rank::flat_extension::{
    extend, extension_rank_search, functional_from_terms, plus_closure, recover,
    verify_generalized,
};
use apolar_rank::linalg::QMat;
use apolar_rank::poly::{LinearForm, Monomial, PointDiffTerm, QPoly};

fn q(n: i64) -> BigRational {
    BigRational::from(BigInt::from(n))
}

fn identity(n: usize) -> Vec<Vec<BigRational>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { q(1) } else { q(0) }).collect())
        .collect()
}

fn random_points(rng: &mut ChaCha8Rng, r: usize, n: usize) -> Vec<Vec<BigRational>> {
    let mut points: Vec<Vec<BigRational>> = Vec::new();
    while points.len() < r {
        let p: Vec<BigRational> = (0..n).map(|_| q(rng.gen_range(-7..=7i64))).collect();
        if !points.contains(&p) {
            points.push(p);
        }
    }
    points
}

fn sum_of_powers(points: &[Vec<BigRational>], weights: &[i64], d: u32) -> QPoly {
    let n = points[0].len();
    let mut f = QPoly::zero(n + 1);
    for (p, &w) in points.iter().zip(weights) {
        let mut coords = vec![q(1)];
        coords.extend(p.iter().cloned());
        f = f.add(&LinearForm::new(coords).power(d).scale(&q(w)));
    }
    f
}

#[test]
fn certificates_recover_and_verify() {
    // whenever the search certifies a synthetic point functional, recovery
    // verifies and the size equals the certificate rank
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for trial in 0..20u64 {
        let r = rng.gen_range(1..=4usize);
        let n = rng.gen_range(1..=3usize);
        let d = rng.gen_range((2 * r as u32).max(3)..=8);
        let points = random_points(&mut rng, r, n);
        let weights: Vec<i64> = (0..r).map(|_| rng.gen_range(1..=5i64)).collect();
        let f = sum_of_powers(&points, &weights, d);
        let out = extension_rank_search(&f, 6, trial).unwrap();
        let Some(success) = out.result else {
            panic!("trial {}: inconclusive on a rank-{} point functional", trial, r);
        };
        assert_eq!(success.rank, r, "trial {}", trial);
        assert!(success.rank >= out.catalecticant_rank, "monotonicity");
        let dec = success.decomposition.expect("recovery at d >= 2r");
        assert_eq!(dec.size, r);
        let rep = verify_generalized(&dec, &f).unwrap();
        assert!(rep.passed(1e-6), "trial {}: residual {}", trial, rep.residual);
    }
}

#[test]
fn inconsistent_functional_never_certifies() {
    // three simple points plus a deep multiplicity term: the data is not
    // flat at rank 3, so the size-3 basis must fail at the commutator,
    // the principal block, or at recovery verification
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let points = random_points(&mut rng, 3, 2);
    let mut terms: Vec<PointDiffTerm<BigRational>> = points
        .iter()
        .map(|p| PointDiffTerm { point: p.clone(), phi: QPoly::constant(2, q(1)) })
        .collect();
    let clean = functional_from_terms(2, 8, &terms);
    let b = vec![
        Monomial::unit(2),
        Monomial::var(2, 0, 1),
        Monomial::var(2, 1, 1),
    ];
    let cert = extend(&clean, &b, &b, identity(3)).unwrap();
    let dec = recover(&cert, &clean, 0).unwrap();
    assert_eq!(dec.size, 3);

    terms.push(PointDiffTerm {
        point: vec![q(9), q(-9)],
        phi: QPoly::monomial(2, Monomial::new(vec![2, 2]), q(1)),
    });
    let corrupted = functional_from_terms(2, 8, &terms);
    let outcome = extend(&corrupted, &b, &b, identity(3));
    let certified = match outcome {
        Err(_) => false,
        Ok(cert) => match recover(&cert, &corrupted, 0) {
            Err(_) => false,
            Ok(dec) => dec.size == 3,
        },
    };
    assert!(!certified, "an inconsistent functional must not certify rank 3");
}

#[test]
fn coordinate_change_invariance_of_certified_rank() {
    // PGL-invariance: the certified rank agrees across random invertible
    // coordinate changes of the source polynomial
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    let points = random_points(&mut rng, 3, 2);
    let f = sum_of_powers(&points, &[1, 1, 1], 6);
    let baseline = extension_rank_search(&f, 6, 0)
        .unwrap()
        .result
        .expect("baseline certificate")
        .rank;
    assert_eq!(baseline, 3);
    for trial in 0..5u64 {
        let g = loop {
            let cand: Vec<Vec<BigRational>> = (0..3)
                .map(|_| (0..3).map(|_| q(rng.gen_range(-4..=4i64))).collect())
                .collect();
            let m = QMat::from_fn(3, 3, |i, j| cand[i][j].clone());
            if m.determinant_nonzero() {
                break cand;
            }
        };
        let fg = f.change_coordinates(&g);
        let out = extension_rank_search(&fg, 6, trial).unwrap();
        let rank = out.result.expect("transformed certificate").rank;
        assert_eq!(rank, baseline, "trial {}", trial);
    }
}

#[test]
fn search_never_returns_below_catalecticant_rank() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for trial in 0..15u64 {
        let nvars = rng.gen_range(2..=4usize);
        let d = rng.gen_range(3..=5u32);
        let monos = apolar_rank::poly::monomials_of_degree(nvars, d);
        let mut f = QPoly::zero(nvars);
        for _ in 0..rng.gen_range(2..=4usize) {
            f.add_term(
                monos[rng.gen_range(0..monos.len())].clone(),
                q(rng.gen_range(-4..=4i64)),
            );
        }
        if f.is_zero() {
            continue;
        }
        let out = extension_rank_search(&f, 10, trial).unwrap();
        if let Some(s) = out.result {
            assert!(
                s.rank >= out.catalecticant_rank,
                "trial {}: rank {} below r_H {}",
                trial,
                s.rank,
                out.catalecticant_rank
            );
        }
    }
}

#[test]
fn plus_closure_contains_base_and_shifts() {
    let b = vec![Monomial::unit(2), Monomial::var(2, 1, 1)];
    let plus = plus_closure(&b);
    for m in &b {
        assert!(plus.contains(m));
    }
    assert!(plus.contains(&Monomial::new(vec![1, 1])));
    assert!(plus.contains(&Monomial::new(vec![0, 2])));
}
