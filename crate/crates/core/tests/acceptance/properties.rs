use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use qcl_core::linalg::random_invertible;
use qcl_core::{
    build_code, canonical_form, classify4, shared_geometry, spectrum, zero_set, Fe, Field, Form4,
    ScanOptions, SpectrumMode,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::{oracle, Check, SURFACES};

fn runner(cases: u32) -> TestRunner {
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

/// Product of two elements as polynomials in the modulus root, reduced by
/// long division.
fn poly_mul(field: &Field, a: Fe, b: Fe) -> Vec<u32> {
    let p = field.p();
    let (da, db) = (field.digits(a), field.digits(b));
    let mut prod = vec![0u32; da.len() + db.len()];
    for (i, x) in da.iter().enumerate() {
        for (j, y) in db.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    let modulus = field.modulus();
    let m = modulus.len() - 1;
    for deg in (m..prod.len()).rev() {
        let c = prod[deg];
        if c == 0 {
            continue;
        }
        for (k, &mk) in modulus.iter().enumerate() {
            let idx = deg - m + k;
            prod[idx] = (prod[idx] + p * p - c * mk % p) % p;
        }
    }
    prod.truncate(m);
    prod
}

fn field_axioms(c: &mut Check) {
    for q in [3u32, 4, 5, 7, 8, 9] {
        let f = Field::with_order(q).unwrap();
        let p = f.p();
        let els: Vec<Fe> = f.elements().collect();
        c.eq(&format!("GF({q}) size"), els.len(), q as usize);
        for &a in &els {
            c.expect(f.add(a, Fe::ZERO) == a && f.mul(a, Fe::ONE) == a, || format!("GF({q}) identities at {a:?}"));
            c.expect(f.add(a, f.neg(a)).is_zero(), || format!("GF({q}) negation at {a:?}"));
            if !a.is_zero() {
                let inv = f.inv(a).unwrap();
                c.expect(f.mul(a, inv) == Fe::ONE, || format!("GF({q}) inverse at {a:?}"));
            }
            for &b in &els {
                c.expect(f.add(a, b) == f.add(b, a) && f.mul(a, b) == f.mul(b, a), || format!("GF({q}) commutativity"));
                let sum: Vec<u32> = f.digits(a).iter().zip(f.digits(b)).map(|(x, y)| (x + y) % p).collect();
                c.expect(f.digits(f.add(a, b)) == sum, || format!("GF({q}) addition oracle at {a:?}+{b:?}"));
                c.expect(f.digits(f.mul(a, b)) == poly_mul(&f, a, b), || format!("GF({q}) product oracle at {a:?}*{b:?}"));
                for &e in &els {
                    c.expect(f.add(f.add(a, b), e) == f.add(a, f.add(b, e)), || format!("GF({q}) additive associativity"));
                    c.expect(f.mul(f.mul(a, b), e) == f.mul(a, f.mul(b, e)), || format!("GF({q}) multiplicative associativity"));
                    c.expect(
                        f.mul(a, f.add(b, e)) == f.add(f.mul(a, b), f.mul(a, e)),
                        || format!("GF({q}) distributivity"),
                    );
                }
            }
        }
        // the multiplicative group is cyclic of order q-1
        let has_generator = els.iter().any(|&g| {
            !g.is_zero() && (1..q - 1).all(|e| f.pow(g, e as u64) != Fe::ONE)
        });
        c.expect(has_generator, || format!("GF({q}) has no primitive element"));
    }
}

fn random_form(field: &Field, rng: &mut ChaCha8Rng) -> Form4 {
    use rand::Rng;
    let q = field.q();
    loop {
        let reps: [u32; 10] = std::array::from_fn(|_| rng.random_range(0..q));
        let f = Form4::from_reps(field, reps).unwrap();
        if !f.is_zero() {
            return f;
        }
    }
}

fn classification_invariance(c: &mut Check) {
    let result = runner(300).run(&(prop::sample::select(vec![3u32, 4, 5]), any::<u64>()), |(q, seed)| {
        let g = shared_geometry(q).unwrap();
        let field = g.field();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_form(field, &mut rng);
        let m = random_invertible(field, &mut rng);
        let lambda = field.element(1 + (seed % (q as u64 - 1)) as u32).unwrap();
        let image = f.compose(field, &m).scale(field, lambda);
        prop_assert_eq!(classify4(&g, &f).unwrap(), classify4(&g, &image).unwrap());
        prop_assert_eq!(zero_set(&g, &f).unwrap().len(), zero_set(&g, &image).unwrap().len());
        Ok(())
    });
    c.expect(result.is_ok(), || format!("classification invariance: {}", result.unwrap_err()));
}

fn distribution_invariance(c: &mut Check) {
    let strategy = (prop::sample::select(vec![3u32, 4]), prop::sample::select(SURFACES.to_vec()), any::<u64>());
    let result = runner(12).run(&strategy, |(q, class, seed)| {
        let g = shared_geometry(q).unwrap();
        let field = g.field();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = canonical_form(field, class);
        let m = random_invertible(field, &mut rng);
        let lambda = field.element(1 + (seed % (q as u64 - 1)) as u32).unwrap();
        let image = f.compose(field, &m).scale(field, lambda);
        let opts = ScanOptions::default();
        let base = build_code(&g, &f).unwrap().weight_distribution(opts).unwrap();
        let moved = build_code(&g, &image).unwrap().weight_distribution(opts).unwrap();
        prop_assert_eq!(base.counts, moved.counts);
        Ok(())
    });
    c.expect(result.is_ok(), || format!("weight distribution invariance: {}", result.unwrap_err()));
}

fn duality(c: &mut Check) {
    let g = shared_geometry(3).unwrap();
    let field = g.field();
    for class in SURFACES {
        let code = build_code(&g, &canonical_form(field, class)).unwrap();
        let n = code.n();
        let dist = code.weight_distribution(ScanOptions::default()).unwrap();
        let kernel = 3u64.pow((10 - code.k()) as u32);
        let s = spectrum(&g, &code, SpectrumMode::Exhaustive, false).unwrap();
        c.eq(&format!("{} kernel forms", class.name()), s.kernel_skipped, kernel - 1);
        for w in 1..=n {
            let got = s.attained.get(&(n - w)).copied().unwrap_or(0);
            c.eq(&format!("{} forms meeting X in {} points", class.name(), n - w), got, dist.count(w) * kernel);
        }
        let pts: Vec<[Fe; 4]> = code.points().iter().map(|&p| *g.point(p).coords()).collect();
        let brute = oracle::form_weight_histogram(field, &pts);
        let scaled: Vec<u64> = dist.counts.iter().map(|&x| x * kernel).collect();
        c.eq(&format!("{} brute-force weights", class.name()), brute, scaled);
    }
}

pub fn run() -> Check {
    let mut c = Check::default();
    field_axioms(&mut c);
    classification_invariance(&mut c);
    distribution_invariance(&mut c);
    duality(&mut c);
    c.note("field axioms at q = 3, 4, 5, 7, 8, 9; 300 classification and 12 distribution invariance cases; duality at q=3");
    c
}
