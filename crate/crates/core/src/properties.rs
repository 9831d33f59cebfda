//! Seeded randomized property suites. Each suite draws its cases from a
//! ChaCha stream so that a run is reproducible from `(seed, cases)`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::etale::{alpha_tot_product_check, galois_sw_total, EtaleAlgebraExpr, Extension};
use crate::ksymbols::{FieldModel, Preset, UnitMonomial};
use crate::polyring::{
    fiber_pushforward, make_ring, Poly, RawTerm, ReductionOrder, Ring, RingPresentation,
};

pub const DEFAULT_SEED: u64 = 0x5eed_2716;
pub const DEFAULT_CASES: usize = 1000;

pub const SUITES: [&str; 8] = [
    "normal-form-idempotent",
    "normal-form-confluent",
    "ring-axioms",
    "projection-formula",
    "symbol-square",
    "symbol-opposite",
    "alpha-multiplicative",
    "alpha-vanishing",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteOutcome {
    pub name: String,
    pub cases: usize,
    pub failures: usize,
    pub first_failure: Option<String>,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

pub fn run_all(seed: u64, cases: usize) -> Vec<SuiteOutcome> {
    SUITES
        .iter()
        .map(|name| run_suite(name, seed, cases).expect("listed suite"))
        .collect()
}

pub fn run_suite(name: &str, seed: u64, cases: usize) -> Option<SuiteOutcome> {
    let index = SUITES.iter().position(|s| *s == name)?;
    let mut rng =
        ChaCha8Rng::seed_from_u64(seed ^ (index as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let case: fn(&mut ChaCha8Rng, &Fixtures) -> Result<(), String> = match index {
        0 => nf_idempotent,
        1 => nf_confluent,
        2 => ring_axioms,
        3 => projection_formula,
        4 => symbol_square,
        5 => symbol_opposite,
        6 => alpha_multiplicative,
        _ => alpha_vanishing,
    };
    let fixtures = Fixtures::new();
    let mut failures = 0;
    let mut first_failure = None;
    for i in 0..cases {
        if let Err(msg) = case(&mut rng, &fixtures) {
            failures += 1;
            first_failure.get_or_insert_with(|| format!("case {i}: {msg}"));
        }
    }
    Some(SuiteOutcome {
        name: name.to_string(),
        cases,
        failures,
        first_failure,
    })
}

struct Fixtures {
    ring: Ring,
    models: Vec<FieldModel>,
}

impl Fixtures {
    fn new() -> Self {
        // Z[c1,c2,c3][t]/(t^3 + c1 t^2 + c2 t + c3) followed by a conic
        // bundle s^2 + (t - c1) s + (c2 - t^2) over it.
        let ring = make_ring(
            RingPresentation::new()
                .generator("c1", 1)
                .generator("c2", 2)
                .generator("c3", 3)
                .generator("t", 1)
                .relation_str("t", &["1", "c1", "c2", "c3"])
                .generator("s", 1)
                .relation_str("s", &["1", "t - c1", "c2 - t^2"])
                .working_degree(6),
        )
        .expect("fixture ring");
        let models = [Preset::Closed, Preset::Euclidean, Preset::Generic]
            .iter()
            .map(|p| FieldModel::preset(*p, &["a", "b", "c"]).expect("fixture model"))
            .collect();
        Fixtures { ring, models }
    }

    fn model<'a>(&'a self, rng: &mut ChaCha8Rng) -> &'a FieldModel {
        self.models.choose(rng).expect("nonempty")
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// Random raw terms over the generators in `allowed`, each monomial of degree
/// at most `max_degree`.
fn raw_terms(rng: &mut ChaCha8Rng, ring: &Ring, allowed: &[&str], max_degree: u32) -> Vec<RawTerm> {
    let n = rng.gen_range(1..=4);
    (0..n)
        .map(|_| {
            let mut budget = rng.gen_range(0..=max_degree);
            let mut factors: Vec<(&str, u32)> = Vec::new();
            for _ in 0..4 {
                let name = *allowed.choose(rng).expect("nonempty");
                let deg = ring.generator_degree(ring.generator_index(name).expect("known"));
                if deg <= budget {
                    let k = rng.gen_range(1..=budget / deg);
                    budget -= k * deg;
                    factors.push((name, k));
                }
            }
            RawTerm::new(rng.gen_range(-5i64..=5), &factors)
        })
        .collect()
}

fn random_poly(
    rng: &mut ChaCha8Rng,
    ring: &Ring,
    allowed: &[&str],
    max_degree: u32,
) -> Result<Poly, String> {
    ring.normal_form(&raw_terms(rng, ring, allowed, max_degree))
        .map_err(err)
}

const ALL: [&str; 5] = ["c1", "c2", "c3", "t", "s"];

fn to_raw(p: &Poly) -> Vec<RawTerm> {
    let names = p.ring().generator_names();
    p.terms()
        .map(|(e, c)| {
            let factors: Vec<(&str, u32)> = e
                .iter()
                .zip(&names)
                .filter(|(x, _)| **x > 0)
                .map(|(x, n)| (*n, *x))
                .collect();
            RawTerm::new(c.clone(), &factors)
        })
        .collect()
}

fn nf_idempotent(rng: &mut ChaCha8Rng, fx: &Fixtures) -> Result<(), String> {
    let p = random_poly(rng, &fx.ring, &ALL, 6)?;
    let again = fx.ring.normal_form(&to_raw(&p)).map_err(err)?;
    if again == p {
        Ok(())
    } else {
        Err(format!("{p} renormalized to {again}"))
    }
}

fn nf_confluent(rng: &mut ChaCha8Rng, fx: &Fixtures) -> Result<(), String> {
    let raw = raw_terms(rng, &fx.ring, &ALL, 6);
    let a = fx
        .ring
        .normal_form_with(&raw, ReductionOrder::LastGeneratorFirst)
        .map_err(err)?;
    let b = fx
        .ring
        .normal_form_with(&raw, ReductionOrder::FirstGeneratorFirst)
        .map_err(err)?;
    if a == b {
        Ok(())
    } else {
        Err(format!("{a} differs from {b}"))
    }
}

fn ring_axioms(rng: &mut ChaCha8Rng, fx: &Fixtures) -> Result<(), String> {
    let p = random_poly(rng, &fx.ring, &ALL, 2)?;
    let q = random_poly(rng, &fx.ring, &ALL, 2)?;
    let r = random_poly(rng, &fx.ring, &ALL, 2)?;
    let check = |ok: bool, what: &str| {
        if ok {
            Ok(())
        } else {
            Err(format!("{what} fails for {p}; {q}; {r}"))
        }
    };
    let pq = p.mul(&q).map_err(err)?;
    check(
        pq.mul(&r).map_err(err)? == p.mul(&q.mul(&r).map_err(err)?).map_err(err)?,
        "associativity",
    )?;
    check(pq == q.mul(&p).map_err(err)?, "commutativity")?;
    let lhs = p.mul(&q.add(&r).map_err(err)?).map_err(err)?;
    let rhs = pq.add(&p.mul(&r).map_err(err)?).map_err(err)?;
    check(lhs == rhs, "distributivity")?;
    check(p.add(&p.neg()).map_err(err)?.is_zero(), "additive inverse")?;
    check(p.mul(&fx.ring.one()).map_err(err)? == p, "unit")?;
    check(
        p.add(&q).map_err(err)? == q.add(&p).map_err(err)?,
        "additive commutativity",
    )
}

/// `pi_*(pi^* a * b) = a * pi_*(b)` for either bundle in the tower.
fn projection_formula(rng: &mut ChaCha8Rng, fx: &Fixtures) -> Result<(), String> {
    let (gen, base, total): (&str, &[&str], &[&str]) = if rng.gen_bool(0.5) {
        ("t", &ALL[..3], &ALL[..4])
    } else {
        ("s", &ALL[..4], &ALL)
    };
    let a = random_poly(rng, &fx.ring, base, 3)?;
    let b = random_poly(rng, &fx.ring, total, 3)?;
    let lhs = fiber_pushforward(&a.mul(&b).map_err(err)?, gen).map_err(err)?;
    let rhs = a
        .mul(&fiber_pushforward(&b, gen).map_err(err)?)
        .map_err(err)?;
    if lhs == rhs {
        Ok(())
    } else {
        Err(format!(
            "pushforward along {gen} of ({a})*({b}): {lhs} vs {rhs}"
        ))
    }
}

fn random_unit(rng: &mut ChaCha8Rng, model: &FieldModel) -> UnitMonomial {
    let n = model.class_names().len();
    model.unit(rng.gen_range(0..1u64 << n))
}

fn symbol_square(rng: &mut ChaCha8Rng, fx: &Fixtures) -> Result<(), String> {
    let model = fx.model(rng);
    let x = random_unit(rng, model);
    let minus_one = model.parse_unit("-1").map_err(err)?;
    let prefix: Vec<UnitMonomial> = (0..rng.gen_range(0..3))
        .map(|_| random_unit(rng, model))
        .collect();
    let with = |tail: [UnitMonomial; 2]| {
        let mut v = prefix.clone();
        v.extend(tail);
        model.symbol(&v)
    };
    let lhs = with([x, x]);
    let rhs = with([minus_one, x]);
    if lhs == rhs {
        Ok(())
    } else {
        Err(format!(
            "{{x,x}} = {lhs} but {{-1,x}} = {rhs} for x = {}",
            x.render(model)
        ))
    }
}

fn symbol_opposite(rng: &mut ChaCha8Rng, fx: &Fixtures) -> Result<(), String> {
    let model = fx.model(rng);
    let x = random_unit(rng, model);
    let minus_x = x.mul(model.parse_unit("-1").map_err(err)?);
    let s = model.symbol(&[x, minus_x]);
    if s.is_zero() {
        Ok(())
    } else {
        Err(format!("{{x,-x}} = {s} for x = {}", x.render(model)))
    }
}

/// A random product of multiquadratic extensions of total rank at most
/// `max_rank`.
fn random_algebra(rng: &mut ChaCha8Rng, model: &FieldModel, max_rank: usize) -> EtaleAlgebraExpr {
    let mut alg = EtaleAlgebraExpr::new(model);
    let mut budget = rng.gen_range(1..=max_rank);
    while budget > 0 {
        let max_s = (0..4).filter(|s| 1usize << s <= budget).max().unwrap_or(0);
        let s = rng.gen_range(0..=max_s);
        let ext = loop {
            let classes: Vec<UnitMonomial> = (0..s).map(|_| random_unit(rng, model)).collect();
            if let Ok(e) = Extension::new(classes, model) {
                break e;
            }
        };
        let room = budget / ext.degree();
        let mult = rng.gen_range(1..=room);
        budget -= mult * ext.degree();
        alg = alg.with_factor(ext, mult as u32);
    }
    alg
}

fn alpha_multiplicative(rng: &mut ChaCha8Rng, fx: &Fixtures) -> Result<(), String> {
    let model = fx.model(rng);
    let a = random_algebra(rng, model, 8);
    let b = random_algebra(rng, model, 8);
    if alpha_tot_product_check(&a, &b).map_err(err)? {
        Ok(())
    } else {
        Err(format!(
            "alpha_tot not multiplicative on {a} and {b} over {}",
            model.describe()
        ))
    }
}

fn alpha_vanishing(rng: &mut ChaCha8Rng, fx: &Fixtures) -> Result<(), String> {
    let model = fx.model(rng);
    let alg = random_algebra(rng, model, 8);
    let alpha = galois_sw_total(&alg).map_err(err)?;
    let half = alg.rank() / 2;
    match alpha
        .classes
        .iter()
        .enumerate()
        .skip(half + 1)
        .find(|(_, x)| !x.is_zero())
    {
        None => Ok(()),
        Some((i, x)) => Err(format!(
            "alpha_{i} = {x} for {alg} over {}",
            model.describe()
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_suite_passes() {
        for outcome in run_all(DEFAULT_SEED, 200) {
            assert!(
                outcome.passed(),
                "{}: {:?}",
                outcome.name,
                outcome.first_failure
            );
        }
    }

    #[test]
    fn runs_are_reproducible() {
        let a = run_suite("normal-form-idempotent", 7, 5).unwrap();
        let b = run_suite("normal-form-idempotent", 7, 5).unwrap();
        assert_eq!(a, b);
        assert!(run_suite("no-such-suite", 7, 5).is_none());
    }
}
