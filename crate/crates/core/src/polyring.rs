//! Exact integer arithmetic in towers of graded polynomial rings.
//!
//! A ring is presented by an ordered list of generators. Each generator is
//! either free, or a *fiber* generator `g` carrying one monic relation
//! `g^n + r_1 g^(n-1) + ... + r_n = 0` whose coefficients only involve
//! generators declared before `g`. This is the shape of the Chow ring of a
//! tower of projective bundles. A ring may additionally carry a working
//! degree: relations that live above it are omitted from the presentation, so
//! any computation producing a term of larger degree is rejected.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub type Exponents = Vec<u32>;
type Terms = BTreeMap<Exponents, BigInt>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("relation for `{0}` references `{0}` itself or a later generator")]
    CyclicTower(String),
    #[error("relation for `{0}` is not monic")]
    NonMonicRelation(String),
    #[error(
        "relation coefficient r_{index} for `{generator}` is not homogeneous of degree {expected}"
    )]
    NonHomogeneousRelation {
        generator: String,
        index: usize,
        expected: u32,
    },
    #[error("duplicate generator `{0}`")]
    DuplicateGenerator(String),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("operands live in different rings")]
    RingMismatch,
    #[error("term of degree {degree} exceeds the working degree {limit}")]
    DegreeOverflow { degree: u32, limit: u32 },
    #[error("not divisible")]
    NotDivisible,
    #[error("quotient is not unique (solution space of dimension {0})")]
    NonUnique(usize),
    #[error("polynomial is not homogeneous")]
    NotHomogeneous,
    #[error("polynomial is not symmetric in {0:?}")]
    NotSymmetric(Vec<String>),
    #[error("image of `{0}` does not have the generator's degree")]
    DegreeMismatch(String),
    #[error("`{0}` is not a fiber generator")]
    NotAFiberGenerator(String),
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, PolyError>;

/// One term of an unreduced polynomial, with generators referenced by name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawTerm {
    pub coeff: BigInt,
    pub factors: Vec<(String, u32)>,
}

impl RawTerm {
    pub fn new(coeff: impl Into<BigInt>, factors: &[(&str, u32)]) -> Self {
        RawTerm {
            coeff: coeff.into(),
            factors: factors.iter().map(|(n, e)| (n.to_string(), *e)).collect(),
        }
    }
}

/// Parses a sum of monomials such as `-3*h^2*t + l1 - 5`.
///
/// No parentheses: this is the rendering grammar of [`Poly`], so every
/// rendered polynomial parses back.
pub fn parse_terms(text: &str) -> Result<Vec<RawTerm>> {
    let bytes = text.as_bytes();
    let mut pos = 0;
    let mut out = Vec::new();
    let err = |pos: usize, msg: &str| PolyError::Parse {
        pos,
        msg: msg.to_string(),
    };
    let skip_ws = |pos: &mut usize| {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
    };
    let read_int = |pos: &mut usize| -> Option<BigInt> {
        let start = *pos;
        while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
            *pos += 1;
        }
        (start < *pos).then(|| text[start..*pos].parse().unwrap())
    };
    let mut first = true;
    loop {
        skip_ws(&mut pos);
        if pos >= bytes.len() {
            if first {
                return Err(err(pos, "empty polynomial"));
            }
            break;
        }
        let mut sign = BigInt::one();
        if bytes[pos] == b'+' || bytes[pos] == b'-' {
            if bytes[pos] == b'-' {
                sign = -sign;
            }
            pos += 1;
            skip_ws(&mut pos);
        } else if !first {
            return Err(err(pos, "expected `+` or `-`"));
        }
        first = false;
        let mut coeff = sign;
        let mut factors = Vec::new();
        let mut expect_factor = true;
        while expect_factor {
            skip_ws(&mut pos);
            if pos >= bytes.len() {
                return Err(err(pos, "unexpected end of input"));
            }
            if bytes[pos].is_ascii_digit() {
                coeff *= read_int(&mut pos).unwrap();
            } else if bytes[pos].is_ascii_alphabetic() || bytes[pos] == b'_' {
                let start = pos;
                while pos < bytes.len()
                    && (bytes[pos].is_ascii_alphanumeric() || bytes[pos] == b'_')
                {
                    pos += 1;
                }
                let name = text[start..pos].to_string();
                skip_ws(&mut pos);
                let mut exp = 1u32;
                if pos < bytes.len() && bytes[pos] == b'^' {
                    pos += 1;
                    skip_ws(&mut pos);
                    let e = read_int(&mut pos).ok_or_else(|| err(pos, "expected exponent"))?;
                    exp = u32::try_from(e).map_err(|_| err(pos, "exponent too large"))?;
                }
                factors.push((name, exp));
            } else {
                return Err(err(pos, "expected a number or a generator name"));
            }
            skip_ws(&mut pos);
            expect_factor = pos < bytes.len() && bytes[pos] == b'*';
            if expect_factor {
                pos += 1;
            }
        }
        out.push(RawTerm { coeff, factors });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Kind {
    Free,
    Fiber(Vec<Terms>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct GeneratorData {
    name: String,
    degree: u32,
    kind: Kind,
}

/// Declarative description of a ring, validated by [`make_ring`].
#[derive(Debug, Clone, Default)]
pub struct RingPresentation {
    generators: Vec<(String, u32)>,
    relations: Vec<(String, Vec<Vec<RawTerm>>)>,
    working_degree: Option<u32>,
}

impl RingPresentation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn generator(mut self, name: &str, degree: u32) -> Self {
        self.generators.push((name.to_string(), degree));
        self
    }

    /// Declares the monic relation of `name`. `coefficients` lists the full
    /// coefficient vector `(r_0, r_1, ..., r_n)` of `r_0 g^n + ... + r_n`;
    /// `r_0` must be the constant 1.
    pub fn relation(mut self, name: &str, coefficients: Vec<Vec<RawTerm>>) -> Self {
        self.relations.push((name.to_string(), coefficients));
        self
    }

    /// Like [`relation`](Self::relation) with coefficients in the textual
    /// monomial-sum syntax. Panics on malformed text.
    pub fn relation_str(self, name: &str, coefficients: &[&str]) -> Self {
        let parsed = coefficients
            .iter()
            .map(|c| parse_terms(c).expect("malformed relation coefficient"))
            .collect();
        self.relation(name, parsed)
    }

    /// Declares that some generator's relation sits above `degree` and has been
    /// omitted; every computation must stay in degrees `<= degree`.
    pub fn working_degree(mut self, degree: u32) -> Self {
        self.working_degree = Some(self.working_degree.map_or(degree, |d| d.min(degree)));
        self
    }
}

#[derive(Debug, PartialEq, Eq)]
struct RingData {
    generators: Vec<GeneratorData>,
    index: HashMap<String, usize>,
    working_degree: Option<u32>,
}

/// Shared handle to a validated ring presentation.
#[derive(Clone)]
pub struct Ring(Arc<RingData>);

impl fmt::Debug for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ring{:?}", self.generator_names())
    }
}

impl PartialEq for Ring {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl Eq for Ring {}

pub fn make_ring(presentation: RingPresentation) -> Result<Ring> {
    let mut data = RingData {
        generators: Vec::new(),
        index: HashMap::new(),
        working_degree: presentation.working_degree,
    };
    for (name, degree) in &presentation.generators {
        if data.index.contains_key(name) {
            return Err(PolyError::DuplicateGenerator(name.clone()));
        }
        data.index.insert(name.clone(), data.generators.len());
        data.generators.push(GeneratorData {
            name: name.clone(),
            degree: *degree,
            kind: Kind::Free,
        });
    }
    let mut seen = Vec::new();
    for (name, _) in &presentation.relations {
        if seen.contains(name) {
            return Err(PolyError::DuplicateGenerator(name.clone()));
        }
        seen.push(name.clone());
    }
    // Relations are installed in generator order so that each coefficient can
    // be normalized with the relations of earlier generators.
    let mut relations: Vec<_> = presentation
        .relations
        .iter()
        .map(|(name, coeffs)| {
            data.index
                .get(name)
                .copied()
                .map(|i| (i, name, coeffs))
                .ok_or_else(|| PolyError::UnknownGenerator(name.clone()))
        })
        .collect::<Result<_>>()?;
    relations.sort_by_key(|(i, _, _)| *i);
    for (gi, name, coeffs) in relations {
        if coeffs.len() < 2 {
            return Err(PolyError::NonMonicRelation(name.clone()));
        }
        let lead = data.raw_to_terms(&coeffs[0])?;
        let monic = lead.len() == 1
            && lead
                .get(&vec![0; data.generators.len()])
                .is_some_and(|c| c.is_one());
        if !monic {
            return Err(PolyError::NonMonicRelation(name.clone()));
        }
        let gdeg = data.generators[gi].degree;
        let mut normalized = Vec::new();
        for (k, raw) in coeffs.iter().enumerate().skip(1) {
            let terms = data.raw_to_terms(raw)?;
            if terms.keys().any(|e| e[gi..].iter().any(|&x| x > 0)) {
                return Err(PolyError::CyclicTower(name.clone()));
            }
            let expected = k as u32 * gdeg;
            if terms.keys().any(|e| data.monomial_degree(e) != expected) {
                return Err(PolyError::NonHomogeneousRelation {
                    generator: name.clone(),
                    index: k,
                    expected,
                });
            }
            normalized.push(data.reduce(terms, ReductionOrder::default()));
        }
        data.generators[gi].kind = Kind::Fiber(normalized);
    }
    Ok(Ring(Arc::new(data)))
}

/// Which reducible generator is rewritten first. The normal form does not
/// depend on this choice; it is exposed so that confluence can be tested.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum ReductionOrder {
    #[default]
    LastGeneratorFirst,
    FirstGeneratorFirst,
}

impl RingData {
    fn monomial_degree(&self, e: &[u32]) -> u32 {
        e.iter()
            .zip(&self.generators)
            .map(|(x, g)| x * g.degree)
            .sum()
    }

    fn raw_to_terms(&self, raw: &[RawTerm]) -> Result<Terms> {
        let mut terms = Terms::new();
        for t in raw {
            let mut e = vec![0; self.generators.len()];
            for (name, exp) in &t.factors {
                let i = *self
                    .index
                    .get(name)
                    .ok_or_else(|| PolyError::UnknownGenerator(name.clone()))?;
                e[i] += exp;
            }
            add_term(&mut terms, e, t.coeff.clone());
        }
        Ok(terms)
    }

    fn check_degrees(&self, terms: &Terms) -> Result<()> {
        if let Some(limit) = self.working_degree {
            for e in terms.keys() {
                let degree = self.monomial_degree(e);
                if degree > limit {
                    return Err(PolyError::DegreeOverflow { degree, limit });
                }
            }
        }
        Ok(())
    }

    fn reducible(&self, e: &[u32], order: ReductionOrder) -> Option<usize> {
        let hit = |i: &usize| match &self.generators[*i].kind {
            Kind::Fiber(r) => e[*i] >= r.len() as u32,
            Kind::Free => false,
        };
        match order {
            ReductionOrder::LastGeneratorFirst => (0..e.len()).rev().find(hit),
            ReductionOrder::FirstGeneratorFirst => (0..e.len()).find(hit),
        }
    }

    /// Rewrites every term until all fiber exponents are below their relation
    /// degrees. Terminates because each rewrite lowers the exponent vector in
    /// the lexicographic order read from the last generator.
    fn reduce(&self, terms: Terms, order: ReductionOrder) -> Terms {
        let mut out = Terms::new();
        let mut stack: Vec<(Exponents, BigInt)> = terms.into_iter().collect();
        while let Some((mut e, c)) = stack.pop() {
            if c.is_zero() {
                continue;
            }
            let Some(gi) = self.reducible(&e, order) else {
                add_term(&mut out, e, c);
                continue;
            };
            let Kind::Fiber(rel) = &self.generators[gi].kind else {
                unreachable!()
            };
            let n = rel.len() as u32;
            e[gi] -= n;
            for (k, rk) in rel.iter().enumerate() {
                for (re, rc) in rk {
                    let mut ne: Exponents = e.iter().zip(re).map(|(a, b)| a + b).collect();
                    ne[gi] += n - 1 - k as u32;
                    stack.push((ne, -(&c * rc)));
                }
            }
        }
        out
    }
}

fn add_term(terms: &mut Terms, e: Exponents, c: BigInt) {
    if c.is_zero() {
        return;
    }
    use std::collections::btree_map::Entry;
    match terms.entry(e) {
        Entry::Vacant(v) => {
            v.insert(c);
        }
        Entry::Occupied(mut o) => {
            *o.get_mut() += c;
            if o.get().is_zero() {
                o.remove();
            }
        }
    }
}

impl Ring {
    pub fn generator_names(&self) -> Vec<&str> {
        self.0.generators.iter().map(|g| g.name.as_str()).collect()
    }

    pub fn num_generators(&self) -> usize {
        self.0.generators.len()
    }

    pub fn generator_index(&self, name: &str) -> Result<usize> {
        self.0
            .index
            .get(name)
            .copied()
            .ok_or_else(|| PolyError::UnknownGenerator(name.to_string()))
    }

    pub fn generator_degree(&self, i: usize) -> u32 {
        self.0.generators[i].degree
    }

    /// Degree of the monic relation of a fiber generator.
    pub fn relation_degree(&self, name: &str) -> Result<u32> {
        let i = self.generator_index(name)?;
        match &self.0.generators[i].kind {
            Kind::Fiber(r) => Ok(r.len() as u32),
            Kind::Free => Err(PolyError::NotAFiberGenerator(name.to_string())),
        }
    }

    pub fn working_degree(&self) -> Option<u32> {
        self.0.working_degree
    }

    pub fn monomial_degree(&self, e: &[u32]) -> u32 {
        self.0.monomial_degree(e)
    }

    pub fn zero(&self) -> Poly {
        Poly {
            ring: self.clone(),
            terms: Terms::new(),
        }
    }

    pub fn one(&self) -> Poly {
        self.constant(1)
    }

    pub fn constant(&self, c: impl Into<BigInt>) -> Poly {
        let mut terms = Terms::new();
        add_term(&mut terms, vec![0; self.num_generators()], c.into());
        Poly {
            ring: self.clone(),
            terms,
        }
    }

    pub fn gen(&self, name: &str) -> Result<Poly> {
        self.normal_form(&[RawTerm::new(1, &[(name, 1)])])
    }

    pub fn parse(&self, text: &str) -> Result<Poly> {
        self.normal_form(&parse_terms(text)?)
    }

    pub fn normal_form(&self, raw: &[RawTerm]) -> Result<Poly> {
        self.normal_form_with(raw, ReductionOrder::default())
    }

    pub fn normal_form_with(&self, raw: &[RawTerm], order: ReductionOrder) -> Result<Poly> {
        let terms = self.0.raw_to_terms(raw)?;
        self.reduce_terms(terms, order)
    }

    fn reduce_terms(&self, terms: Terms, order: ReductionOrder) -> Result<Poly> {
        self.0.check_degrees(&terms)?;
        Ok(Poly {
            ring: self.clone(),
            terms: self.0.reduce(terms, order),
        })
    }

    /// Builds a polynomial from dense exponent vectors, reducing it.
    pub fn from_exponents<I>(&self, terms: I) -> Result<Poly>
    where
        I: IntoIterator<Item = (Exponents, BigInt)>,
    {
        let mut map = Terms::new();
        for (e, c) in terms {
            assert_eq!(e.len(), self.num_generators(), "exponent vector width");
            add_term(&mut map, e, c);
        }
        self.reduce_terms(map, ReductionOrder::default())
    }

    /// All reduced monomials of the given degree, in ascending exponent order.
    pub fn monomial_basis(&self, degree: u32) -> Vec<Exponents> {
        let gens = &self.0.generators;
        let caps: Vec<Option<u32>> = gens
            .iter()
            .map(|g| match &g.kind {
                Kind::Fiber(r) => Some(r.len() as u32 - 1),
                Kind::Free => None,
            })
            .collect();
        let mut out = Vec::new();
        let mut cur = vec![0; gens.len()];
        fn rec(
            i: usize,
            left: u32,
            gens: &[GeneratorData],
            caps: &[Option<u32>],
            cur: &mut Exponents,
            out: &mut Vec<Exponents>,
        ) {
            if i == gens.len() {
                if left == 0 {
                    out.push(cur.clone());
                }
                return;
            }
            let d = gens[i].degree;
            let mut e = 0;
            while e * d <= left && caps[i].is_none_or(|c| e <= c) {
                cur[i] = e;
                rec(i + 1, left - e * d, gens, caps, cur, out);
                e += 1;
            }
            cur[i] = 0;
        }
        rec(0, degree, gens, &caps, &mut cur, &mut out);
        out.sort();
        out
    }
}

/// A polynomial in normal form: every fiber exponent lies below the degree
/// of its relation and no stored coefficient is zero.
#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    ring: Ring,
    terms: Terms,
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

impl Poly {
    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &BigInt)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, e: &[u32]) -> BigInt {
        self.terms.get(e).cloned().unwrap_or_default()
    }

    /// Coefficient of a single monomial given by generator names.
    pub fn coefficient_of(&self, factors: &[(&str, u32)]) -> Result<BigInt> {
        let mut e = vec![0; self.ring.num_generators()];
        for (n, x) in factors {
            e[self.ring.generator_index(n)?] += x;
        }
        Ok(self.coefficient(&e))
    }

    /// The common degree of all terms, or `None` for zero and mixed-degree
    /// polynomials.
    pub fn degree(&self) -> Option<u32> {
        let mut degs = self.terms.keys().map(|e| self.ring.monomial_degree(e));
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.is_zero() || self.degree().is_some()
    }

    /// Gcd of all coefficients; zero for the zero polynomial.
    pub fn content(&self) -> BigInt {
        self.terms
            .values()
            .fold(BigInt::zero(), |acc, c| acc.gcd(c))
    }

    fn check_ring(&self, other: &Poly) -> Result<()> {
        if self.ring == other.ring {
            Ok(())
        } else {
            Err(PolyError::RingMismatch)
        }
    }

    pub fn add(&self, other: &Poly) -> Result<Poly> {
        self.check_ring(other)?;
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            add_term(&mut terms, e.clone(), c.clone());
        }
        Ok(Poly {
            ring: self.ring.clone(),
            terms,
        })
    }

    pub fn sub(&self, other: &Poly) -> Result<Poly> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Poly {
        self.scale(&-BigInt::one())
    }

    pub fn scale(&self, k: &BigInt) -> Poly {
        let terms = if k.is_zero() {
            Terms::new()
        } else {
            self.terms.iter().map(|(e, c)| (e.clone(), c * k)).collect()
        };
        Poly {
            ring: self.ring.clone(),
            terms,
        }
    }

    pub fn mul(&self, other: &Poly) -> Result<Poly> {
        self.check_ring(other)?;
        let mut terms = Terms::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Exponents = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                add_term(&mut terms, e, c1 * c2);
            }
        }
        self.ring.reduce_terms(terms, ReductionOrder::default())
    }

    pub fn pow(&self, n: u32) -> Result<Poly> {
        let mut acc = self.ring.one();
        for _ in 0..n {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Divides every coefficient by `k`, which must divide the content.
    pub fn div_exact_scalar(&self, k: &BigInt) -> Result<Poly> {
        if k.is_zero() || self.terms.values().any(|c| !c.is_multiple_of(k)) {
            return Err(PolyError::NotDivisible);
        }
        Ok(Poly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c / k)).collect(),
        })
    }

    /// Renders with monomials sorted by descending degree and, within a
    /// degree, by the exponents of later generators first.
    fn sorted_terms(&self) -> Vec<(&Exponents, &BigInt)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|(a, _), (b, _)| {
            let (da, db) = (self.ring.monomial_degree(a), self.ring.monomial_degree(b));
            db.cmp(&da).then_with(|| b.iter().rev().cmp(a.iter().rev()))
        });
        v
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let names = self.ring.generator_names();
        for (k, (e, c)) in self.sorted_terms().into_iter().enumerate() {
            let neg = c.is_negative();
            match (k, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let abs = c.abs();
            let factors: Vec<String> = e
                .iter()
                .zip(&names)
                .filter(|(x, _)| **x > 0)
                .map(|(x, n)| {
                    if *x == 1 {
                        n.to_string()
                    } else {
                        format!("{n}^{x}")
                    }
                })
                .collect();
            if factors.is_empty() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{abs}*{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

/// Normal form of a raw term list in `ring`.
pub fn normal_form(ring: &Ring, raw: &[RawTerm]) -> Result<Poly> {
    ring.normal_form(raw)
}

/// Finds the unique homogeneous `q` with `q * den == num`.
///
/// The quotient is solved for as a linear system over the rationals on the
/// reduced monomial basis of degree `deg(num) - deg(den)`; a solution that is
/// not integral, or a missing solution, is `NotDivisible`, and a solution
/// space of positive dimension is reported as `NonUnique`.
pub fn exact_divide(num: &Poly, den: &Poly) -> Result<Poly> {
    num.check_ring(den)?;
    let ring = num.ring();
    let den_deg = den.degree().ok_or(if den.is_zero() {
        PolyError::NotDivisible
    } else {
        PolyError::NotHomogeneous
    })?;
    if !num.is_homogeneous() {
        return Err(PolyError::NotHomogeneous);
    }
    let Some(num_deg) = num.degree() else {
        return Ok(ring.zero());
    };
    if num_deg < den_deg {
        return Err(PolyError::NotDivisible);
    }
    let basis = ring.monomial_basis(num_deg - den_deg);
    let mut columns = Vec::with_capacity(basis.len());
    for m in &basis {
        let mono = ring.from_exponents([(m.clone(), BigInt::one())])?;
        columns.push(mono.mul(den)?);
    }
    let mut rows: BTreeMap<&Exponents, usize> = BTreeMap::new();
    for p in columns.iter().chain(std::iter::once(num)) {
        for e in p.terms.keys() {
            let n = rows.len();
            rows.entry(e).or_insert(n);
        }
    }
    let ncols = basis.len();
    let mut matrix = vec![vec![BigRational::zero(); ncols + 1]; rows.len()];
    for (j, p) in columns.iter().enumerate() {
        for (e, c) in &p.terms {
            matrix[rows[e]][j] = BigRational::from_integer(c.clone());
        }
    }
    for (e, c) in &num.terms {
        matrix[rows[e]][ncols] = BigRational::from_integer(c.clone());
    }
    let pivots = row_reduce(&mut matrix, ncols);
    if matrix
        .iter()
        .skip(pivots.len())
        .any(|row| !row[ncols].is_zero())
    {
        return Err(PolyError::NotDivisible);
    }
    if pivots.len() < ncols {
        return Err(PolyError::NonUnique(ncols - pivots.len()));
    }
    let mut quotient = Vec::new();
    for (r, &col) in pivots.iter().enumerate() {
        let v = &matrix[r][ncols];
        if !v.is_integer() {
            return Err(PolyError::NotDivisible);
        }
        quotient.push((basis[col].clone(), v.to_integer()));
    }
    ring.from_exponents(quotient)
}

/// Gauss-Jordan elimination on the first `ncols` columns; returns pivot
/// columns, with pivot rows moved to the top.
fn row_reduce(m: &mut [Vec<BigRational>], ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let factor = m[i][c].clone();
                let (src, dst) = if i < r {
                    let (a, b) = m.split_at_mut(r);
                    (&b[0], &mut a[i])
                } else {
                    let (a, b) = m.split_at_mut(i);
                    (&a[r], &mut b[0])
                };
                for (d, s) in dst.iter_mut().zip(src.iter()) {
                    *d -= &factor * s;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Rewrites a polynomial that is symmetric in the generators `roots` in terms
/// of the signed elementary symmetric classes `chern`, with
/// `chern[i-1] = (-1)^i e_i(roots)`.
///
/// The result lives in `target`, which must contain every generator of `p`
/// other than the roots (matched by name) plus the `chern` generators.
pub fn symmetric_reduce(p: &Poly, roots: &[&str], chern: &[&str], target: &Ring) -> Result<Poly> {
    assert_eq!(roots.len(), chern.len(), "one Chern class per root");
    let src = p.ring();
    let k = roots.len();
    let root_idx: Vec<usize> = roots
        .iter()
        .map(|r| src.generator_index(r))
        .collect::<Result<_>>()?;
    let chern_idx: Vec<usize> = chern
        .iter()
        .map(|c| target.generator_index(c))
        .collect::<Result<_>>()?;
    let names = src.generator_names();
    let mut other_map = Vec::new();
    for (i, n) in names.iter().enumerate() {
        let used = p.terms.keys().any(|e| e[i] > 0);
        if used && !root_idx.contains(&i) {
            other_map.push((i, target.generator_index(n)?));
        }
    }
    let not_symmetric = || PolyError::NotSymmetric(roots.iter().map(|s| s.to_string()).collect());

    // Group by the exponents of the non-root generators.
    let mut groups: BTreeMap<Exponents, Terms> = BTreeMap::new();
    for (e, c) in &p.terms {
        let other: Exponents = other_map.iter().map(|(i, _)| e[*i]).collect();
        let lexp: Exponents = root_idx.iter().map(|&i| e[i]).collect();
        add_term(groups.entry(other).or_default(), lexp, c.clone());
    }

    let elementary: Vec<Terms> = (1..=k).map(|i| elementary_symmetric(k, i)).collect();
    let mut out = Terms::new();
    for (other, mut sym) in groups {
        while let Some((lead, c)) = sym.iter().next_back().map(|(e, c)| (e.clone(), c.clone())) {
            if lead.windows(2).any(|w| w[0] < w[1]) {
                return Err(not_symmetric());
            }
            // lead = (a1 >= a2 >= ... >= ak) is the leading term of
            // e1^(a1-a2) e2^(a2-a3) ... ek^ak.
            let powers: Vec<u32> = (0..k)
                .map(|i| lead[i] - if i + 1 < k { lead[i + 1] } else { 0 })
                .collect();
            let mut prod = Terms::new();
            add_term(&mut prod, vec![0; k], BigInt::one());
            for (i, &b) in powers.iter().enumerate() {
                for _ in 0..b {
                    prod = mul_terms(&prod, &elementary[i]);
                }
            }
            for (e, pc) in prod {
                add_term(&mut sym, e, -(&c * pc));
            }
            let mut te = vec![0; target.num_generators()];
            for (j, (_, ti)) in other_map.iter().enumerate() {
                te[*ti] += other[j];
            }
            let mut sign = BigInt::one();
            for (i, &b) in powers.iter().enumerate() {
                te[chern_idx[i]] += b;
                if (i + 1) % 2 == 1 && b % 2 == 1 {
                    sign = -sign;
                }
            }
            add_term(&mut out, te, sign * c);
            if sym.contains_key(&lead) {
                return Err(not_symmetric());
            }
        }
    }
    target.reduce_terms(out, ReductionOrder::default())
}

fn elementary_symmetric(k: usize, i: usize) -> Terms {
    let mut out = Terms::new();
    for mask in 0u32..(1 << k) {
        if mask.count_ones() as usize == i {
            let e = (0..k).map(|j| (mask >> j) & 1).collect();
            add_term(&mut out, e, BigInt::one());
        }
    }
    out
}

fn mul_terms(a: &Terms, b: &Terms) -> Terms {
    let mut out = Terms::new();
    for (e1, c1) in a {
        for (e2, c2) in b {
            add_term(
                &mut out,
                e1.iter().zip(e2).map(|(x, y)| x + y).collect(),
                c1 * c2,
            );
        }
    }
    out
}

/// Ring homomorphism image of `p` in `target`.
///
/// Generators listed in `renaming` go to the given polynomials of `target`;
/// every other generator goes to the generator of `target` with the same
/// name. Images must be homogeneous of the generator's degree.
pub fn substitute(p: &Poly, renaming: &[(&str, Poly)], target: &Ring) -> Result<Poly> {
    let src = p.ring();
    let mut images: Vec<Option<Poly>> = vec![None; src.num_generators()];
    for (name, img) in renaming {
        let i = src.generator_index(name)?;
        if img.ring() != target {
            return Err(PolyError::RingMismatch);
        }
        if !img.is_zero() && img.degree() != Some(src.generator_degree(i)) {
            return Err(PolyError::DegreeMismatch(name.to_string()));
        }
        images[i] = Some(img.clone());
    }
    let names = src.generator_names();
    let used: Vec<bool> = (0..src.num_generators())
        .map(|i| p.terms.keys().any(|e| e[i] > 0))
        .collect();
    for i in 0..images.len() {
        if images[i].is_none() && used[i] {
            let g = target.gen(names[i])?;
            if target.generator_degree(target.generator_index(names[i])?) != src.generator_degree(i)
            {
                return Err(PolyError::DegreeMismatch(names[i].to_string()));
            }
            images[i] = Some(g);
        }
    }
    let mut acc = target.zero();
    for (e, c) in &p.terms {
        let mut term = target.constant(c.clone());
        for (i, &x) in e.iter().enumerate() {
            if x > 0 {
                term = term.mul(&images[i].as_ref().unwrap().pow(x)?)?;
            }
        }
        acc = acc.add(&term)?;
    }
    Ok(acc)
}

/// Pushforward along the projective bundle of the fiber generator `gen`:
/// the coefficient of `gen^(n-1)` in the normal form, where `n` is the
/// degree of its relation. The result lives in the same ring and no longer
/// involves `gen`.
pub fn fiber_pushforward(p: &Poly, gen: &str) -> Result<Poly> {
    let ring = p.ring();
    let n = ring.relation_degree(gen)?;
    let gi = ring.generator_index(gen)?;
    let terms = p
        .terms
        .iter()
        .filter(|(e, _)| e[gi] == n - 1)
        .map(|(e, c)| {
            let mut e = e.clone();
            e[gi] = 0;
            (e, c.clone())
        })
        .collect();
    Ok(Poly {
        ring: ring.clone(),
        terms,
    })
}

/// Moves `p` into `target` by generator name.
pub fn transfer(p: &Poly, target: &Ring) -> Result<Poly> {
    substitute(p, &[], target)
}
