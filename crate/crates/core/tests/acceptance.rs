//! Acceptance suite: the fixed behavioral contract of the library, one test
//! per criterion, each printing a pass/fail line (run with
//! `cargo test --test acceptance -- --nocapture` to see them).

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use apolar_rank::apolarity;
use apolar_rank::catalecticant;
use apolar_rank::flat_extension::{self, DecompositionTerms};
use apolar_rank::hierarchy::{self, CorpusParams, SchemeBound};
use apolar_rank::monomial_decomp::{self, VerifyMode};
use apolar_rank::poly::scalar::rational_to_f64;
use apolar_rank::poly::{apolar_product, monomials_of_degree, LinearForm, Monomial, QPoly};
use apolar_rank::parse;

fn q(n: i64) -> BigRational {
    BigRational::from(BigInt::from(n))
}

fn qr(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn conclude(criterion: &str, failures: Vec<String>) {
    if failures.is_empty() {
        println!("PASS {}", criterion);
    } else {
        println!("FAIL {}", criterion);
        for f in &failures {
            println!("  - {}", f);
        }
        panic!("{} failed:\n{}", criterion, failures.join("\n"));
    }
}

#[test]
fn criterion_1_hilbert_golden() {
    let mut failures = Vec::new();
    let f = parse("x0*x1^2*x2^2", 2).unwrap();
    let h = apolarity::hilbert_function(&f).unwrap().values;
    if h != vec![1, 3, 5, 5, 3, 1] {
        failures.push(format!("hilbert = {:?}, want [1,3,5,5,3,1]", h));
    }
    let rh = catalecticant::catalecticant_rank(&f).unwrap();
    if rh != 5 {
        failures.push(format!("catalecticant rank = {}, want 5", rh));
    }
    conclude("criterion 1: Hilbert series golden (exact)", failures);
}

#[test]
fn criterion_2_separating_cubic() {
    let mut failures = Vec::new();
    let f = parse("x0^2*x2 + 6*x1^2*x3 - 3*(x0+x1)^2*x4", 4).unwrap();
    let h = apolarity::hilbert_function(&f).unwrap().values;
    if h != vec![1, 5, 5, 1] {
        failures.push(format!("hilbert = {:?}, want [1,5,5,1]", h));
    }
    // the colon must equal span{x2, x3, x4} exactly
    let colon = apolarity::colon_with_maximal(&f, 2).unwrap();
    if colon.dim() != 3 {
        failures.push(format!("colon dim = {}, want 3", colon.dim()));
    }
    let vars: Vec<Monomial> = (2..5).map(|i| Monomial::var(5, i, 1)).collect();
    for g in &colon.basis {
        for (m, _) in g.terms() {
            if !vars.contains(m) {
                failures.push(format!("colon basis strays outside span{{x2,x3,x4}}: {}", m));
            }
        }
    }
    // and conversely each of x2,x3,x4 must lie in the colon span: with a
    // 3-dim space inside a 3-dim span, containment one way plus dimension
    // settles equality, checked above.
    match hierarchy::scheme_length_lower_bound(&f, 5).unwrap() {
        SchemeBound::Proven { .. } => {}
        SchemeBound::Inconclusive => failures.push("scheme bound not proven".into()),
    }
    // border family residual at eps = 1e-3 stays within 1e-2
    let eps = qr(1, 1000);
    let (dec, remainder) = monomial_decomp::jarek_family(&eps).unwrap();
    if dec.len() != 5 {
        failures.push(format!("family size {} != 5", dec.len()));
    }
    let norm = remainder
        .terms()
        .map(|(_, c)| rational_to_f64(&num_traits::Signed::abs(c)))
        .fold(0.0, f64::max);
    if norm > 1e-2 {
        failures.push(format!("family residual {} > 1e-2", norm));
    }
    // the separation: border bound 5 strictly below scheme bound 6
    let rep = hierarchy::rank_report(&f, 8, 0).unwrap();
    if !(rep.r_border_upper == Some(5) && rep.sch_lower == Some(6)) {
        failures.push(format!(
            "separation not reproduced: border {:?}, sch_lower {:?}",
            rep.r_border_upper, rep.sch_lower
        ));
    }
    conclude("criterion 2: border rank / smoothable rank separation", failures);
}

fn all_positive_compositions(vars: usize, total: u32) -> Vec<Vec<u32>> {
    fn rec(out: &mut Vec<Vec<u32>>, cur: &mut Vec<u32>, slots: usize, left: u32) {
        if slots == 1 {
            if left >= 1 {
                cur.push(left);
                out.push(cur.clone());
                cur.pop();
            }
            return;
        }
        for e in 1..=(left + 1 - slots as u32) {
            cur.push(e);
            rec(out, cur, slots - 1, left - e);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if total >= vars as u32 {
        rec(&mut out, &mut Vec::new(), vars, total);
    }
    out
}

#[test]
fn criterion_3_monomial_decompositions() {
    let mut failures = Vec::new();
    let mut checked = 0usize;
    for nvars in 1..=4usize {
        for d in 1..=6u32 {
            for alpha in all_positive_compositions(nvars, d) {
                let want = monomial_decomp::monomial_rank(&alpha) as usize;
                for eps in [q(1), qr(1, 2)] {
                    let dec = monomial_decomp::monomial_waring(&alpha, &eps).unwrap();
                    if dec.len() != want {
                        failures.push(format!(
                            "alpha {:?}: {} terms, formula says {}",
                            alpha,
                            dec.len(),
                            want
                        ));
                    }
                    let rep = monomial_decomp::verify(&dec, VerifyMode::Exact, 1e-9);
                    if rep.exact_match != Some(true) {
                        failures.push(format!(
                            "alpha {:?} at eps {}: exact verification failed (residual {})",
                            alpha, eps, rep.residual
                        ));
                    }
                    checked += 1;
                }
                // border family: prod/max terms, O(eps) remainder
                let fam = monomial_decomp::monomial_border_family(&alpha).unwrap();
                if fam.term_count() != monomial_decomp::monomial_border_size(&alpha) {
                    failures.push(format!("alpha {:?}: wrong border family size", alpha));
                }
                for (num, den) in [(1i64, 100i64), (1, 1000)] {
                    let eps = qr(num, den);
                    let norm = fam.remainder_norm(&eps);
                    let bound = 10.0 * (num as f64) / (den as f64);
                    if norm > bound {
                        failures.push(format!(
                            "alpha {:?}: border remainder {} > {}",
                            alpha, norm, bound
                        ));
                    }
                }
            }
        }
    }
    assert!(checked > 100, "enumeration too small: {}", checked);
    conclude(
        &format!(
            "criterion 3: {} exact monomial decompositions + border families",
            checked
        ),
        failures,
    );
}

#[test]
fn criterion_4_flat_extension_round_trip() {
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0FFEE);
    let mut done = 0;
    while done < 50 {
        let r = rng.gen_range(1..=4usize);
        let n = rng.gen_range(1..=3usize);
        let d = (2 * r as u32).max(2);
        // r distinct rational points with unit leading coordinate
        let mut points: Vec<Vec<BigRational>> = Vec::new();
        while points.len() < r {
            let p: Vec<BigRational> = (0..n).map(|_| q(rng.gen_range(-6..=6i64))).collect();
            if !points.contains(&p) {
                points.push(p);
            }
        }
        let mut f = QPoly::zero(n + 1);
        for p in &points {
            let mut coords = vec![q(1)];
            coords.extend(p.iter().cloned());
            f = f.add(&LinearForm::new(coords).power(d));
        }
        let out = match flat_extension::extension_rank_search(&f, 6, 0) {
            Ok(o) => o,
            Err(e) => {
                failures.push(format!("instance {}: search error {}", done, e));
                done += 1;
                continue;
            }
        };
        let Some(success) = out.result else {
            failures.push(format!(
                "instance {} (r={}, n={}, d={}): inconclusive",
                done, r, n, d
            ));
            done += 1;
            continue;
        };
        if success.rank != r {
            failures.push(format!(
                "instance {}: rank {} != {} (n={}, d={})",
                done, success.rank, r, n, d
            ));
            done += 1;
            continue;
        }
        let Some(dec) = success.decomposition else {
            failures.push(format!("instance {}: no recovery at d >= 2r", done));
            done += 1;
            continue;
        };
        // recovered points match the construction after scale normalization,
        // paired greedily by distance
        let got: Vec<Vec<Complex64>> = dec.points_in_source_frame();
        let want: Vec<Vec<Complex64>> = points
            .iter()
            .map(|p| {
                let mut v = vec![Complex64::new(1.0, 0.0)];
                v.extend(p.iter().map(|c| Complex64::new(rational_to_f64(c), 0.0)));
                v
            })
            .collect();
        let dist = |a: &[Complex64], b: &[Complex64]| {
            a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
        };
        let mut used = vec![false; got.len()];
        for w in &want {
            let best = (0..got.len())
                .filter(|&j| !used[j])
                .min_by(|&a, &b| dist(w, &got[a]).total_cmp(&dist(w, &got[b])));
            match best {
                Some(j) if dist(w, &got[j]) <= 1e-6 => used[j] = true,
                _ => {
                    failures.push(format!(
                        "instance {}: no recovered point within 1e-6 of {:?}",
                        done, w
                    ));
                    break;
                }
            }
        }
        done += 1;
    }
    conclude("criterion 4: 50 seeded flat-extension round trips", failures);
}

#[test]
fn criterion_5_generalized_rank_goldens() {
    let mut failures = Vec::new();
    let cases: Vec<(QPoly, usize, &str)> = {
        let mut v: Vec<(QPoly, usize, &str)> = vec![(
            parse("x0^3*x1 + x1^3*x2", 2).unwrap(),
            4,
            "x^3y + y^3z",
        )];
        for d in 3..=6u32 {
            v.push((
                QPoly::monomial(2, Monomial::new(vec![d - 1, 1]), q(1)),
                2,
                "x0^(d-1) x1",
            ));
        }
        v.push((parse("x0*x1^2*x2^2", 2).unwrap(), 6, "x0 x1^2 x2^2"));
        v
    };
    for (f, want, name) in cases {
        match flat_extension::extension_rank_search(&f, 12, 0) {
            Ok(out) => match out.result {
                Some(s) if s.rank == want => {}
                Some(s) => failures.push(format!("{}: rank {} want {}", name, s.rank, want)),
                None => failures.push(format!("{}: inconclusive, want {}", name, want)),
            },
            Err(e) => failures.push(format!("{}: {}", name, e)),
        }
    }
    conclude("criterion 5: generalized-rank goldens", failures);
}

#[test]
fn criterion_6_sylvester_binary() {
    let mut failures = Vec::new();
    for d in 3..=8u32 {
        let f = QPoly::monomial(2, Monomial::new(vec![1, d - 1]), q(1));
        let got = hierarchy::sylvester_binary_rank(&f).unwrap();
        if got != d as usize {
            failures.push(format!("x0 x1^{}: rank {} want {}", d - 1, got, d));
        }
    }
    for d in 2..=8u32 {
        let f = parse("(x0+x1)^2", 1).unwrap();
        let _ = f;
        let g = LinearForm::new(vec![q(1), q(1)]).power(d);
        let got = hierarchy::sylvester_binary_rank(&g).unwrap();
        if got != 1 {
            failures.push(format!("(x0+x1)^{}: rank {} want 1", d, got));
        }
    }
    for d in 2..=8u32 {
        for a in 1..d {
            let f = QPoly::monomial(2, Monomial::new(vec![a, d - a]), q(1));
            let got = hierarchy::sylvester_binary_rank(&f).unwrap();
            let want = monomial_decomp::monomial_rank(&[a, d - a]) as usize;
            if got != want {
                failures.push(format!("x0^{} x1^{}: {} vs formula {}", a, d - a, got, want));
            }
        }
    }
    conclude("criterion 6: Sylvester binary ranks", failures);
}

#[test]
fn criterion_7_property_suites() {
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(7);

    let random_poly = |rng: &mut ChaCha8Rng, nvars: usize, d: u32| -> QPoly {
        let monos = monomials_of_degree(nvars, d);
        let mut f = QPoly::zero(nvars);
        let terms = rng.gen_range(2..=5usize);
        for _ in 0..terms {
            let m = monos[rng.gen_range(0..monos.len())].clone();
            f.add_term(m, q(rng.gen_range(-5..=5i64)));
        }
        if f.is_zero() {
            f.add_term(monos[0].clone(), q(1));
        }
        f
    };

    // apolar symmetry + pairing identity + transpose symmetry
    for _ in 0..60 {
        let nvars = rng.gen_range(2..=4usize);
        let d = rng.gen_range(2..=5u32);
        let f = random_poly(&mut rng, nvars, d);
        let g = random_poly(&mut rng, nvars, d);
        if apolar_product(&f, &g).unwrap() != apolar_product(&g, &f).unwrap() {
            failures.push("apolar symmetry broken".into());
        }
        let k = rng.gen_range(0..=d);
        if catalecticant::rank(&f, k).unwrap() != catalecticant::rank(&f, d - k).unwrap() {
            failures.push(format!("transpose symmetry broken at k = {}", k));
        }
        if k >= 1 && d - k >= 1 {
            let c = catalecticant::build(&f, k).unwrap();
            let p = random_poly(&mut rng, nvars, k);
            let qq = random_poly(&mut rng, nvars, d - k);
            if c.pairing(&p, &qq) != apolar_product(&f, &p.mul(&qq)).unwrap() {
                failures.push("pairing identity broken".into());
            }
        }
    }

    // hierarchy chain on the bundled corpus
    let corpus_text = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../data/corpus.json"
    ))
    .expect("bundled corpus");
    let entries: Vec<hierarchy::CorpusEntry> = serde_json::from_str(&corpus_text).unwrap();
    let outcomes = hierarchy::corpus_run(&entries, CorpusParams::default());
    for o in &outcomes {
        if let Err(e) = &o.report {
            failures.push(format!("corpus entry '{}' failed: {}", o.name, e));
        }
        for d in &o.diffs {
            if d.status == hierarchy::DiffStatus::Mismatch {
                failures.push(format!(
                    "corpus entry '{}': {} expected {} got {:?}",
                    o.name, d.field, d.expected, d.computed
                ));
            }
        }
    }

    // hierarchy chain on 100 random polynomials: rank_report hard-errors on
    // any violated inequality, so a clean pass is the assertion
    for i in 0..100 {
        let nvars = rng.gen_range(2..=4usize);
        let d = rng.gen_range(3..=5u32);
        let f = random_poly(&mut rng, nvars, d);
        if let Err(hierarchy::HierarchyError::Inconsistency(msg)) =
            hierarchy::rank_report(&f, 10, i as u64)
        {
            failures.push(format!("random instance {}: hierarchy violated: {}", i, msg));
        }
    }
    conclude("criterion 7: property suites (symmetry, pairing, hierarchy chain)", failures);
}

#[test]
fn criterion_8_corpus_determinism() {
    let mut failures = Vec::new();
    let exe = env!("CARGO_BIN_EXE_apolar-rank");
    let corpus = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/corpus.json");
    let run = || {
        std::process::Command::new(exe)
            .args(["corpus", corpus, "--seed", "0"])
            .env("APOLAR_RANK_THREADS", "3")
            .output()
            .expect("corpus run")
    };
    let a = run();
    let b = run();
    if !a.status.success() || !b.status.success() {
        failures.push("corpus run failed".into());
    }
    if a.stdout != b.stdout {
        failures.push("corpus output differs between identical runs".into());
    }
    if a.stdout.is_empty() {
        failures.push("corpus output empty".into());
    }
    conclude("criterion 8: byte-identical corpus runs", failures);
}
