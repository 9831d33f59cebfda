//! Étale algebras that are products of multiquadratic extensions, their trace
//! forms, and their (Galois-)Stiefel-Whitney classes in mod 2 K-theory.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::ksymbols::{FieldModel, KElement, KError, UnitMonomial};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EtaleError {
    #[error("syntax error at {pos}: {msg}")]
    SyntaxError { pos: usize, msg: String },
    #[error("square classes {0} are dependent")]
    DependentClasses(String),
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("trace form is not diagonal")]
    NonDiagonalGram,
    #[error("algebras belong to different field models")]
    ModelMismatch,
    #[error(transparent)]
    K(#[from] KError),
}

pub type Result<T> = std::result::Result<T, EtaleError>;

/// `F(sqrt(m_1), ..., sqrt(m_s))` for independent square classes `m_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extension {
    classes: Vec<UnitMonomial>,
}

impl Extension {
    pub fn base() -> Self {
        Extension {
            classes: Vec::new(),
        }
    }

    /// Checks that no nonempty subproduct of `classes` is a square.
    pub fn new(classes: Vec<UnitMonomial>, model: &FieldModel) -> Result<Self> {
        let free = |u: UnitMonomial| reduce(u, model);
        let s = classes.len();
        if s > 16 {
            return Err(EtaleError::DependentClasses("(too many)".into()));
        }
        for subset in 1u32..(1 << s) {
            let prod = (0..s)
                .filter(|j| subset >> j & 1 == 1)
                .fold(UnitMonomial(0), |acc, j| acc.mul(classes[j]));
            if free(prod).is_one() {
                let names: Vec<String> = classes.iter().map(|c| c.render(model)).collect();
                return Err(EtaleError::DependentClasses(names.join(", ")));
            }
        }
        Ok(Extension { classes })
    }

    pub fn classes(&self) -> &[UnitMonomial] {
        &self.classes
    }

    pub fn degree(&self) -> usize {
        1 << self.classes.len()
    }

    /// Reduced row echelon basis of the span of the classes, sorted; two
    /// extensions are isomorphic iff these agree.
    fn canonical_basis(&self, model: &FieldModel) -> Vec<UnitMonomial> {
        let mut rows: Vec<u64> = self.classes.iter().map(|c| reduce(*c, model).0).collect();
        let mut basis: Vec<u64> = Vec::new();
        for r in rows.drain(..) {
            let mut v = r;
            for b in &basis {
                let pivot = 1u64 << (63 - b.leading_zeros());
                if v & pivot != 0 {
                    v ^= b;
                }
            }
            if v == 0 {
                continue;
            }
            let pivot = 1u64 << (63 - v.leading_zeros());
            for b in basis.iter_mut() {
                if *b & pivot != 0 {
                    *b ^= v;
                }
            }
            basis.push(v);
        }
        let mut out: Vec<UnitMonomial> = basis.into_iter().map(UnitMonomial).collect();
        out.sort_by_key(|u| monomial_key(*u));
        out
    }
}

fn reduce(u: UnitMonomial, model: &FieldModel) -> UnitMonomial {
    let mask = (0..64)
        .filter(|&i| u.0 >> i & 1 == 1 && !model.is_trivial(i))
        .fold(0u64, |m, i| m | 1 << i);
    UnitMonomial(mask)
}

fn monomial_key(u: UnitMonomial) -> (u32, Vec<u32>) {
    (
        u.0.count_ones(),
        (0..64).filter(|i| u.0 >> i & 1 == 1).collect(),
    )
}

/// A formal product of multiquadratic extensions with multiplicities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EtaleAlgebraExpr {
    model: FieldModel,
    factors: Vec<(Extension, u32)>,
}

impl EtaleAlgebraExpr {
    pub fn new(model: &FieldModel) -> Self {
        EtaleAlgebraExpr {
            model: model.clone(),
            factors: Vec::new(),
        }
    }

    pub fn with_factor(mut self, ext: Extension, multiplicity: u32) -> Self {
        if multiplicity > 0 {
            self.factors.push((ext, multiplicity));
        }
        self
    }

    pub fn model(&self) -> &FieldModel {
        &self.model
    }

    pub fn factors(&self) -> &[(Extension, u32)] {
        &self.factors
    }

    pub fn rank(&self) -> usize {
        self.factors
            .iter()
            .map(|(e, m)| e.degree() * *m as usize)
            .sum()
    }

    pub fn product(&self, other: &EtaleAlgebraExpr) -> Result<EtaleAlgebraExpr> {
        if self.model != other.model {
            return Err(EtaleError::ModelMismatch);
        }
        let mut out = self.clone();
        out.factors.extend(other.factors.iter().cloned());
        Ok(out)
    }

    /// Factors up to isomorphism, merged, as `(basis, multiplicity)`.
    pub fn canonical(&self) -> Vec<(Vec<UnitMonomial>, u32)> {
        type Key = (usize, Vec<(u32, Vec<u32>)>);
        let mut merged: BTreeMap<Key, (Vec<UnitMonomial>, u32)> = BTreeMap::new();
        for (e, m) in &self.factors {
            let basis = e.canonical_basis(&self.model);
            let key = (
                basis.len(),
                basis.iter().map(|u| monomial_key(*u)).collect(),
            );
            merged.entry(key).or_insert((basis, 0)).1 += m;
        }
        merged.into_values().collect()
    }

    pub fn isomorphic(&self, other: &EtaleAlgebraExpr) -> bool {
        self.model == other.model && self.canonical() == other.canonical()
    }

    /// Diagonal square classes of the trace form, with multiplicity.
    pub fn trace_classes(&self) -> Result<Vec<UnitMonomial>> {
        let mut out = Vec::with_capacity(self.rank());
        for (e, m) in &self.factors {
            let diag = trace_form(e, &self.model)?;
            for _ in 0..*m {
                out.extend(diag.iter().copied());
            }
        }
        Ok(out)
    }

    pub fn canonical_string(&self) -> String {
        let parts: Vec<String> = self
            .canonical()
            .iter()
            .map(|(b, m)| render_factor(b, *m, &self.model))
            .collect();
        parts.join(" * ")
    }
}

fn render_factor(classes: &[UnitMonomial], mult: u32, model: &FieldModel) -> String {
    let mut s = "F".to_string();
    if !classes.is_empty() {
        let roots: Vec<String> = classes
            .iter()
            .map(|c| format!("sqrt({})", c.render(model)))
            .collect();
        s.push_str(&format!("({})", roots.join(",")));
    }
    if mult != 1 {
        s.push_str(&format!("^{mult}"));
    }
    s
}

impl fmt::Display for EtaleAlgebraExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|(e, m)| render_factor(&e.classes, *m, &self.model))
            .collect();
        write!(f, "{}", parts.join(" * "))
    }
}

/// Scalar `c * prod m_j^{k_j}` in the multiplication table.
type Scalar = (i64, Vec<u32>);

/// Gram matrix of the trace pairing on the basis `e_S = prod_{j in S} sqrt(m_j)`,
/// computed from the multiplication table. Returns the diagonal as square
/// classes: the entry for `S` is `2^s prod_{j in S} m_j`.
pub fn trace_form(ext: &Extension, model: &FieldModel) -> Result<Vec<UnitMonomial>> {
    trace_diagonal(ext)?
        .into_iter()
        .map(|(c, k)| scalar_class(c, &k, &ext.classes, model))
        .collect()
}

/// The diagonal Gram entries `tr(e_S * e_S)` rendered as integers times
/// products of the `m_j`, e.g. `4*a*b`.
pub fn trace_diagonal_strings(ext: &Extension, model: &FieldModel) -> Result<Vec<String>> {
    let render = |(c, k): Scalar| {
        let mut parts = vec![c.to_string()];
        for (j, &kj) in k.iter().enumerate() {
            let m = ext.classes[j].render(model);
            let m = if m.contains('*') { format!("({m})") } else { m };
            parts.extend(std::iter::repeat_n(m, kj as usize));
        }
        parts.join("*")
    };
    Ok(trace_diagonal(ext)?.into_iter().map(render).collect())
}

fn trace_diagonal(ext: &Extension) -> Result<Vec<Scalar>> {
    let s = ext.classes.len();
    let n = 1usize << s;
    // e_A * e_B = (prod_{j in A and B} m_j) e_{A xor B}.
    let product = |a: usize, b: usize| -> (Scalar, usize) {
        let k = (0..s).map(|j| ((a & b) >> j & 1) as u32).collect();
        ((1, k), a ^ b)
    };
    // Trace of x -> e_U x as a combination of monomials in the m_j.
    let trace_of = |u: usize| -> BTreeMap<Vec<u32>, i64> {
        let mut acc = BTreeMap::new();
        for t in 0..n {
            let ((c, k), image) = product(u, t);
            if image == t {
                *acc.entry(k).or_insert(0) += c;
            }
        }
        acc.retain(|_, c| *c != 0);
        acc
    };
    let mut diag = Vec::with_capacity(n);
    for a in 0..n {
        for b in 0..n {
            let ((c, k), u) = product(a, b);
            let entry: BTreeMap<Vec<u32>, i64> = trace_of(u)
                .into_iter()
                .map(|(kk, cc)| (kk.iter().zip(&k).map(|(x, y)| x + y).collect(), cc * c))
                .collect();
            if a != b {
                if !entry.is_empty() {
                    return Err(EtaleError::NonDiagonalGram);
                }
                continue;
            }
            let mut it = entry.into_iter();
            match (it.next(), it.next()) {
                (Some((k, c)), None) => diag.push((c, k)),
                _ => return Err(EtaleError::NonDiagonalGram),
            }
        }
    }
    Ok(diag)
}

/// Square class of `c * prod m_j^{k_j}` with `c = +-2^e`.
fn scalar_class(
    c: i64,
    k: &[u32],
    classes: &[UnitMonomial],
    model: &FieldModel,
) -> Result<UnitMonomial> {
    let abs = c.unsigned_abs();
    if !abs.is_power_of_two() {
        return Err(EtaleError::NonDiagonalGram);
    }
    let mut u = UnitMonomial(0);
    if c < 0 {
        u = u.mul(UnitMonomial(1));
    }
    if abs.trailing_zeros() % 2 == 1 {
        // A model without a class for 2 treats it as a square.
        if let Ok(i) = model.index_of("2") {
            u = u.mul(UnitMonomial(1 << i));
        }
    }
    for (j, &kj) in k.iter().enumerate() {
        if kj % 2 == 1 {
            u = u.mul(classes[j]);
        }
    }
    Ok(u)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flavor {
    StiefelWhitney,
    GaloisStiefelWhitney,
}

/// `classes[i]` is the degree-`i` class, for `i` up to the computed cap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SWClassVector {
    pub flavor: Flavor,
    pub classes: Vec<KElement>,
}

impl SWClassVector {
    pub fn get(&self, i: usize) -> Option<&KElement> {
        self.classes.get(i)
    }

    /// Sum of all computed classes.
    pub fn total(&self) -> KElement {
        let model = self.classes[0].model();
        self.classes
            .iter()
            .fold(model.zero(), |acc, x| acc.add(x).expect("one model"))
    }
}

pub const DEFAULT_MAX_DEGREE: usize = 7;

/// Elementary symmetric polynomials of `{d_1}, ..., {d_n}` up to degree
/// `max_degree`, by the recurrence `e_i <- e_i + {d} e_{i-1}`.
pub fn sw_total_capped(alg: &EtaleAlgebraExpr, max_degree: usize) -> Result<SWClassVector> {
    let model = alg.model();
    let cap = max_degree.min(alg.rank());
    let mut e: Vec<KElement> = vec![model.zero(); cap + 1];
    e[0] = model.one();
    for d in alg.trace_classes()? {
        let x = model.symbol(&[d]);
        if x.is_zero() {
            continue;
        }
        for i in (1..=cap).rev() {
            let term = e[i - 1].mul(&x)?;
            e[i] = e[i].add(&term)?;
        }
    }
    Ok(SWClassVector {
        flavor: Flavor::StiefelWhitney,
        classes: e,
    })
}

pub fn sw_total(alg: &EtaleAlgebraExpr) -> Result<SWClassVector> {
    sw_total_capped(alg, alg.rank())
}

/// `alpha_i = alpha_i^SW` for odd `i` and `alpha_i^SW + {2} alpha_{i-1}^SW`
/// for even `i`.
pub fn galois_sw_total_capped(alg: &EtaleAlgebraExpr, max_degree: usize) -> Result<SWClassVector> {
    let sw = sw_total_capped(alg, max_degree)?;
    let model = alg.model();
    let two = model.symbol_str(&["2"]).unwrap_or_else(|_| model.zero());
    let mut classes = sw.classes.clone();
    for i in (2..classes.len()).step_by(2) {
        let corr = two.mul(&sw.classes[i - 1])?;
        classes[i] = classes[i].add(&corr)?;
    }
    Ok(SWClassVector {
        flavor: Flavor::GaloisStiefelWhitney,
        classes,
    })
}

pub fn galois_sw_total(alg: &EtaleAlgebraExpr) -> Result<SWClassVector> {
    galois_sw_total_capped(alg, alg.rank())
}

/// Whether the total Galois-Stiefel-Whitney class is multiplicative on `a * b`.
pub fn alpha_tot_product_check(a: &EtaleAlgebraExpr, b: &EtaleAlgebraExpr) -> Result<bool> {
    let ab = a.product(b)?;
    let lhs = galois_sw_total(&ab)?.total();
    let rhs = galois_sw_total(a)?
        .total()
        .mul(&galois_sw_total(b)?.total())?;
    Ok(lhs == rhs)
}

/// Parses `F^3 * F(sqrt(a))^2 * F(sqrt(a),sqrt(-b*c))`.
pub fn parse_algebra(text: &str, model: &FieldModel) -> Result<EtaleAlgebraExpr> {
    let mut p = AlgebraParser { text, pos: 0 };
    let mut alg = EtaleAlgebraExpr::new(model);
    loop {
        let (ext, mult) = p.term(model)?;
        alg = alg.with_factor(ext, mult);
        if !p.eat("*") {
            break;
        }
    }
    p.skip_ws();
    if p.pos != text.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(alg)
}

struct AlgebraParser<'a> {
    text: &'a str,
    pos: usize,
}

impl AlgebraParser<'_> {
    fn err(&self, msg: &str) -> EtaleError {
        EtaleError::SyntaxError {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.text[self.pos..].starts_with(|c: char| c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.text[self.pos..].starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &str) -> Result<()> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.err(&format!("expected `{tok}`")))
        }
    }

    fn word(&mut self) -> Result<&str> {
        self.skip_ws();
        let start = self.pos;
        while self.text[self.pos..].starts_with(|c: char| c.is_ascii_alphanumeric() || c == '_') {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a name"));
        }
        Ok(&self.text[start..self.pos])
    }

    fn int(&mut self) -> Result<u32> {
        let at = self.pos;
        let w = self.word()?;
        w.parse().map_err(|_| EtaleError::SyntaxError {
            pos: at,
            msg: "expected an exponent".into(),
        })
    }

    fn term(&mut self, model: &FieldModel) -> Result<(Extension, u32)> {
        self.skip_ws();
        let at = self.pos;
        if self.word()? != "F" {
            self.pos = at;
            return Err(self.err("expected `F`"));
        }
        let mut classes = Vec::new();
        if self.eat("(") {
            loop {
                self.skip_ws();
                let at = self.pos;
                if self.word()? != "sqrt" {
                    self.pos = at;
                    return Err(self.err("expected `sqrt`"));
                }
                self.expect("(")?;
                classes.push(self.monomial(model)?);
                self.expect(")")?;
                if !self.eat(",") {
                    break;
                }
            }
            self.expect(")")?;
        }
        let mult = if self.eat("^") { self.int()? } else { 1 };
        Ok((Extension::new(classes, model)?, mult))
    }

    fn monomial(&mut self, model: &FieldModel) -> Result<UnitMonomial> {
        let mut u = UnitMonomial(0);
        if self.eat("-") {
            u = u.mul(UnitMonomial(1));
        }
        loop {
            let name = self.word()?.to_string();
            if name != "1" {
                let i = model
                    .index_of(&name)
                    .map_err(|_| EtaleError::UnknownName(name.clone()))?;
                u = u.mul(UnitMonomial(1 << i));
            }
            if !self.eat("*") {
                break;
            }
        }
        Ok(u)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eu() -> FieldModel {
        FieldModel::euclidean(&["a", "b", "c"]).unwrap()
    }

    #[test]
    fn parse_examples() {
        let m = eu();
        let alg = parse_algebra("F(sqrt(a)) * F(sqrt(b)) * F(sqrt(a*b))", &m).unwrap();
        assert_eq!(alg.factors().len(), 3);
        assert_eq!(alg.rank(), 6);
        let f3 = parse_algebra("F^3", &m).unwrap();
        assert_eq!(f3.rank(), 3);
        assert!(matches!(
            parse_algebra("F(sqrt(a), sqrt(a))", &m).unwrap_err(),
            EtaleError::DependentClasses(_)
        ));
        assert_eq!(
            parse_algebra("F(sqrt(q))", &m).unwrap_err(),
            EtaleError::UnknownName("q".into())
        );
        assert!(matches!(
            parse_algebra("F(sqrt(a)", &m).unwrap_err(),
            EtaleError::SyntaxError { pos: 9, .. }
        ));
        assert!(matches!(
            parse_algebra("G", &m).unwrap_err(),
            EtaleError::SyntaxError { pos: 0, .. }
        ));
    }

    #[test]
    fn biquadratic_trace_form() {
        let m = eu();
        let alg = parse_algebra("F(sqrt(a),sqrt(b))", &m).unwrap();
        let diag = trace_form(&alg.factors()[0].0, &m).unwrap();
        let rendered: Vec<String> = diag.iter().map(|u| u.render(&m)).collect();
        // 4, 4a, 4b, 4ab up to squares.
        assert_eq!(rendered, ["1", "a", "b", "a*b"]);
    }

    #[test]
    fn quadratic_trace_form_keeps_two() {
        let m = FieldModel::generic(&["a"]).unwrap();
        let alg = parse_algebra("F(sqrt(a))", &m).unwrap();
        let diag = trace_form(&alg.factors()[0].0, &m).unwrap();
        let rendered: Vec<String> = diag.iter().map(|u| u.render(&m)).collect();
        assert_eq!(rendered, ["2", "2*a"]);
        let trivial = trace_form(&Extension::base(), &m).unwrap();
        assert_eq!(trivial, vec![UnitMonomial(0)]);
    }

    #[test]
    fn sw_of_biquadratic() {
        let m = eu();
        let alg = parse_algebra("F(sqrt(a),sqrt(b))", &m).unwrap();
        let sw = sw_total(&alg).unwrap();
        assert!(sw.classes[1].is_zero());
        let expected = m.parse_element("{a,b} + {a,a*b} + {b,a*b}").unwrap();
        assert_eq!(sw.classes[2], expected);
        let g = galois_sw_total(&alg).unwrap();
        assert!(g.classes[1].is_zero());
        assert_eq!(g.classes[2].to_string(), "{a,b} + {-1,a*b}");
    }

    #[test]
    fn example_product_of_quadratics() {
        let m = eu();
        let alg = parse_algebra("F(sqrt(a)) * F(sqrt(b)) * F(sqrt(a*b))", &m).unwrap();
        let tot = galois_sw_total(&alg).unwrap().total();
        assert_eq!(tot.to_string(), "1 + {a,b} + {-1,a*b}");
    }

    #[test]
    fn split_algebra_is_trivial() {
        for m in [eu(), FieldModel::generic(&["a"]).unwrap()] {
            let alg = parse_algebra("F^28", &m).unwrap();
            assert!(galois_sw_total(&alg).unwrap().total().is_one());
        }
    }

    #[test]
    fn quadratic_total_class_in_generic_model() {
        let m = FieldModel::generic(&["a", "b"]).unwrap();
        for u in ["a", "b", "-a*b", "2", "-1"] {
            let alg = parse_algebra(&format!("F(sqrt({u}))"), &m).unwrap();
            let tot = galois_sw_total(&alg).unwrap().total();
            let expected = m.one().add(&m.symbol_str(&[u]).unwrap()).unwrap();
            assert_eq!(tot, expected, "F(sqrt({u}))");
        }
    }

    #[test]
    fn product_check_examples() {
        let m = eu();
        let fa = parse_algebra("F(sqrt(a))", &m).unwrap();
        let fb = parse_algebra("F(sqrt(b))", &m).unwrap();
        assert!(alpha_tot_product_check(&fa, &fb).unwrap());
        let f5 = parse_algebra("F^5", &m).unwrap();
        assert!(alpha_tot_product_check(&f5, &fa).unwrap());
        let other = parse_algebra("F", &FieldModel::closed(&["a"]).unwrap()).unwrap();
        assert_eq!(
            alpha_tot_product_check(&fa, &other).unwrap_err(),
            EtaleError::ModelMismatch
        );
    }

    #[test]
    fn canonical_merges_isomorphic_factors() {
        let m = eu();
        let x = parse_algebra("F(sqrt(a),sqrt(a*b)) * F * F^2 * F(sqrt(b*a))", &m).unwrap();
        assert_eq!(
            x.canonical_string(),
            "F^3 * F(sqrt(a*b)) * F(sqrt(a),sqrt(b))"
        );
    }
}
