//! Mod 2 Milnor K-theory of `k(x_1, ..., x_n)` on symbols whose entries are
//! signed monomials in the indeterminates times classes of base-field units.
//!
//! Every element is a sum over `Z/2` of basis symbols `eps^m {g_1, ..., g_r}`
//! where `eps = {-1}` and the `g_i` are distinct free square classes. The base
//! field `k` is described by a [`FieldModel`] saying which constant classes
//! (`-1`, `2`, ...) are squares.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KError {
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("elements belong to different field models")]
    ModelMismatch,
    #[error("`{0}` is not an indeterminate")]
    NotAnIndeterminate(String),
    #[error("too many square classes (at most 64)")]
    TooManyClasses,
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, KError>;

pub const MINUS_ONE: &str = "minus_one";
pub const TWO: &str = "two";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    /// `k` quadratically closed: every constant class is a square.
    Closed,
    /// `-1` is not a square (and no sum of squares is), `2` is a square.
    Euclidean,
    /// Both `-1` and `2` are free.
    Generic,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Closed => "closed",
            Preset::Euclidean => "euclidean",
            Preset::Generic => "generic",
        }
    }
}

impl std::str::FromStr for Preset {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "closed" => Ok(Preset::Closed),
            "euclidean" => Ok(Preset::Euclidean),
            "generic" => Ok(Preset::Generic),
            other => Err(format!("unknown field model `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct ModelData {
    /// Constant classes first (`minus_one` at index 0), then indeterminates.
    names: Vec<String>,
    trivial: u64,
    num_constants: usize,
    preset: Option<Preset>,
}

/// Square-class bookkeeping for the base field and the indeterminates.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldModel(Arc<ModelData>);

impl fmt::Debug for FieldModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.describe())
    }
}

impl FieldModel {
    /// `constants` lists `(name, is_trivial)`; `minus_one` is added in front
    /// if missing.
    pub fn new(constants: &[(&str, bool)], indeterminates: &[&str]) -> Result<Self> {
        let mut names = vec![MINUS_ONE.to_string()];
        let mut trivial = 0u64;
        if let Some((_, t)) = constants.iter().find(|(n, _)| *n == MINUS_ONE) {
            if *t {
                trivial |= 1;
            }
        }
        for (n, t) in constants.iter().filter(|(n, _)| *n != MINUS_ONE) {
            if *t {
                trivial |= 1 << names.len();
            }
            names.push(n.to_string());
        }
        let num_constants = names.len();
        names.extend(indeterminates.iter().map(|s| s.to_string()));
        if names.len() > 64 {
            return Err(KError::TooManyClasses);
        }
        let mut seen = BTreeSet::new();
        for n in &names {
            if !seen.insert(n) || !valid_name(n) {
                return Err(KError::UnknownGenerator(n.clone()));
            }
        }
        Ok(FieldModel(Arc::new(ModelData {
            names,
            trivial,
            num_constants,
            preset: None,
        })))
    }

    pub fn preset(preset: Preset, indeterminates: &[&str]) -> Result<Self> {
        let (m1, two) = match preset {
            Preset::Closed => (true, true),
            Preset::Euclidean => (false, true),
            Preset::Generic => (false, false),
        };
        let model = Self::new(&[(MINUS_ONE, m1), (TWO, two)], indeterminates)?;
        let mut data = (*model.0).clone();
        data.preset = Some(preset);
        Ok(FieldModel(Arc::new(data)))
    }

    pub fn closed(indeterminates: &[&str]) -> Result<Self> {
        Self::preset(Preset::Closed, indeterminates)
    }

    pub fn euclidean(indeterminates: &[&str]) -> Result<Self> {
        Self::preset(Preset::Euclidean, indeterminates)
    }

    pub fn generic(indeterminates: &[&str]) -> Result<Self> {
        Self::preset(Preset::Generic, indeterminates)
    }

    pub fn preset_kind(&self) -> Option<Preset> {
        self.0.preset
    }

    pub fn describe(&self) -> String {
        let kind = self.0.preset.map_or("custom", Preset::name);
        format!("{kind} over k({})", self.indeterminates().join(","))
    }

    pub fn indeterminates(&self) -> Vec<&str> {
        self.0.names[self.0.num_constants..]
            .iter()
            .map(String::as_str)
            .collect()
    }

    pub fn class_names(&self) -> &[String] {
        &self.0.names
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        let lookup = match name {
            "-1" => MINUS_ONE,
            "2" => TWO,
            n => n,
        };
        self.0
            .names
            .iter()
            .position(|n| n == lookup)
            .ok_or_else(|| KError::UnknownGenerator(name.to_string()))
    }

    pub fn is_indeterminate(&self, i: usize) -> bool {
        i >= self.0.num_constants
    }

    pub fn indeterminate_mask(&self) -> u64 {
        let n = self.0.names.len();
        let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        all & !((1u64 << self.0.num_constants) - 1)
    }

    pub fn eps_free(&self) -> bool {
        self.0.trivial & 1 == 0
    }

    pub fn is_trivial(&self, i: usize) -> bool {
        self.0.trivial >> i & 1 == 1
    }

    fn two_bit(&self) -> Option<u64> {
        let i = self.0.names.iter().position(|n| n == TWO)?;
        (!self.is_trivial(i)).then_some(1 << i)
    }

    fn display_name(&self, i: usize) -> &str {
        match self.0.names[i].as_str() {
            MINUS_ONE => "-1",
            TWO => "2",
            n => n,
        }
    }

    /// The unit monomial with the given class bits (`-1` is bit 0).
    pub fn unit(&self, mask: u64) -> UnitMonomial {
        UnitMonomial(mask)
    }

    /// Parses `-a*b`, `2`, `-1`, `1`, ...
    pub fn parse_unit(&self, text: &str) -> Result<UnitMonomial> {
        let mut p = Parser::new(text);
        let u = p.unit(self)?;
        p.end()?;
        Ok(u)
    }

    pub fn one(&self) -> KElement {
        KElement::from_symbols(self, [BasisSymbol::ONE])
    }

    pub fn zero(&self) -> KElement {
        KElement::from_symbols(self, [])
    }

    /// The normalized symbol `{x_1, ..., x_r}`.
    pub fn symbol(&self, entries: &[UnitMonomial]) -> KElement {
        // Multilinear expansion: pick one class from every entry.
        let mut words: Vec<Vec<usize>> = vec![Vec::new()];
        for e in entries {
            let bits: Vec<usize> = (0..64).filter(|i| e.0 >> i & 1 == 1).collect();
            words = words
                .iter()
                .flat_map(|w| {
                    bits.iter().map(move |&b| {
                        let mut w = w.clone();
                        w.push(b);
                        w
                    })
                })
                .collect();
        }
        let mut out = self.zero();
        for w in words {
            if let Some(s) = self.collapse(&w) {
                out.toggle(s);
            }
        }
        out
    }

    pub fn symbol_str(&self, entries: &[&str]) -> Result<KElement> {
        let units = entries
            .iter()
            .map(|e| self.parse_unit(e))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.symbol(&units))
    }

    /// Normal form of the pure symbol on a word of class indices:
    /// `{x, x} = {-1, x}` iterated, then the model's vanishing rules.
    fn collapse(&self, word: &[usize]) -> Option<BasisSymbol> {
        let mut m = 0u32;
        let mut gens = 0u64;
        for &i in word {
            if i == 0 || gens >> i & 1 == 1 {
                m += 1;
            } else {
                gens |= 1 << i;
            }
        }
        self.apply_model(BasisSymbol { m, gens })
    }

    fn apply_model(&self, s: BasisSymbol) -> Option<BasisSymbol> {
        if s.gens & self.0.trivial != 0 {
            return None;
        }
        if s.m > 0 && !self.eps_free() {
            return None;
        }
        // {-1, 2} = 0 because -1 + 2 = 1.
        if s.m > 0 && self.two_bit().is_some_and(|t| s.gens & t != 0) {
            return None;
        }
        Some(s)
    }

    pub fn parse_element(&self, text: &str) -> Result<KElement> {
        let mut p = Parser::new(text);
        let x = p.element(self)?;
        p.end()?;
        Ok(x)
    }
}

fn valid_name(n: &str) -> bool {
    let mut chars = n.chars();
    chars
        .next()
        .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// A product of square classes, one bit per class of the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UnitMonomial(pub u64);

impl UnitMonomial {
    #[allow(clippy::should_implement_trait)]
    pub fn mul(self, other: UnitMonomial) -> UnitMonomial {
        UnitMonomial(self.0 ^ other.0)
    }

    pub fn is_one(self) -> bool {
        self.0 == 0
    }

    pub fn render(self, model: &FieldModel) -> String {
        if self.0 == 0 {
            return "1".into();
        }
        let mut parts = Vec::new();
        let neg = self.0 & 1 == 1;
        for i in 1..64 {
            if self.0 >> i & 1 == 1 {
                parts.push(model.display_name(i).to_string());
            }
        }
        match (neg, parts.is_empty()) {
            (true, true) => "-1".into(),
            (true, false) => format!("-{}", parts.join("*")),
            _ => parts.join("*"),
        }
    }
}

/// `eps^m {g_1, ..., g_r}` with the `g_i` given as a bitmask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BasisSymbol {
    pub m: u32,
    pub gens: u64,
}

impl BasisSymbol {
    pub const ONE: BasisSymbol = BasisSymbol { m: 0, gens: 0 };

    pub fn degree(&self) -> u32 {
        self.m + self.gens.count_ones()
    }

    fn indices(&self) -> impl Iterator<Item = u32> + '_ {
        (0..64).filter(|i| self.gens >> i & 1 == 1)
    }
}

/// Degree, then power of `eps`, then generator lists lexicographically.
impl Ord for BasisSymbol {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.degree(), self.m)
            .cmp(&(other.degree(), other.m))
            .then_with(|| self.indices().cmp(other.indices()))
    }
}

impl PartialOrd for BasisSymbol {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// A `Z/2`-linear combination of basis symbols.
#[derive(Clone, PartialEq, Eq)]
pub struct KElement {
    model: FieldModel,
    support: BTreeSet<BasisSymbol>,
}

impl fmt::Debug for KElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "KElement({self})")
    }
}

impl KElement {
    pub fn from_symbols(
        model: &FieldModel,
        symbols: impl IntoIterator<Item = BasisSymbol>,
    ) -> Self {
        let mut x = KElement {
            model: model.clone(),
            support: BTreeSet::new(),
        };
        for s in symbols {
            if let Some(s) = model.apply_model(s) {
                x.toggle(s);
            }
        }
        x
    }

    fn toggle(&mut self, s: BasisSymbol) {
        if !self.support.remove(&s) {
            self.support.insert(s);
        }
    }

    pub fn model(&self) -> &FieldModel {
        &self.model
    }

    pub fn support(&self) -> impl Iterator<Item = &BasisSymbol> {
        self.support.iter()
    }

    pub fn contains(&self, s: &BasisSymbol) -> bool {
        self.support.contains(s)
    }

    pub fn is_zero(&self) -> bool {
        self.support.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.support.len() == 1 && self.support.contains(&BasisSymbol::ONE)
    }

    pub fn max_degree(&self) -> Option<u32> {
        self.support.iter().map(BasisSymbol::degree).max()
    }

    fn same_model(&self, other: &KElement) -> Result<()> {
        if self.model == other.model {
            Ok(())
        } else {
            Err(KError::ModelMismatch)
        }
    }

    pub fn add(&self, other: &KElement) -> Result<KElement> {
        self.same_model(other)?;
        let support = self
            .support
            .symmetric_difference(&other.support)
            .copied()
            .collect();
        Ok(KElement {
            model: self.model.clone(),
            support,
        })
    }

    pub fn mul(&self, other: &KElement) -> Result<KElement> {
        self.same_model(other)?;
        let mut out = self.model.zero();
        for a in &self.support {
            for b in &other.support {
                let shared = a.gens & b.gens;
                let s = BasisSymbol {
                    m: a.m + b.m + shared.count_ones(),
                    gens: a.gens | b.gens,
                };
                if let Some(s) = self.model.apply_model(s) {
                    out.toggle(s);
                }
            }
        }
        Ok(out)
    }

    /// Product with `deg` copies of `eps`.
    pub fn mul_eps(&self, deg: u32) -> KElement {
        KElement::from_symbols(
            &self.model,
            self.support.iter().map(|s| BasisSymbol {
                m: s.m + deg,
                gens: s.gens,
            }),
        )
    }

    /// Residue at the valuation `at = 0` of `k(x_1, ..., x_n)`.
    pub fn residue(&self, at: &str) -> Result<KElement> {
        let i = self.model.index_of(at)?;
        if !self.model.is_indeterminate(i) {
            return Err(KError::NotAnIndeterminate(at.to_string()));
        }
        let bit = 1u64 << i;
        Ok(KElement::from_symbols(
            &self.model,
            self.support
                .iter()
                .filter(|s| s.gens & bit != 0)
                .map(|s| BasisSymbol {
                    m: s.m,
                    gens: s.gens & !bit,
                }),
        ))
    }

    pub fn degree_part(&self, d: u32) -> KElement {
        KElement {
            model: self.model.clone(),
            support: self
                .support
                .iter()
                .filter(|s| s.degree() == d)
                .copied()
                .collect(),
        }
    }
}

impl fmt::Display for KElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.support.is_empty() {
            return write!(f, "0");
        }
        // Symbols sharing eps^m (m >= 1) and all generators but the last are
        // merged into one symbol whose last entry is a product, as in
        // {-1,a} + {-1,b} = {-1,a*b}.
        let mut groups: Vec<(BasisSymbol, Vec<usize>)> = Vec::new();
        for s in &self.support {
            if s.m > 0 && s.gens != 0 {
                let top = 63 - s.gens.leading_zeros() as usize;
                let prefix = s.gens & !(1u64 << top);
                if let Some((_, tops)) = groups
                    .iter_mut()
                    .find(|(g, tops)| g.m == s.m && g.gens == prefix && !tops.is_empty())
                {
                    tops.push(top);
                    continue;
                }
                groups.push((
                    BasisSymbol {
                        m: s.m,
                        gens: prefix,
                    },
                    vec![top],
                ));
            } else {
                groups.push((*s, Vec::new()));
            }
        }
        let names = |mask: u64| -> Vec<String> {
            (0..64)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| self.model.display_name(i).to_string())
                .collect()
        };
        for (k, (g, tops)) in groups.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            let mut entries: Vec<String> = vec!["-1".to_string(); g.m as usize];
            entries.extend(names(g.gens));
            if !tops.is_empty() {
                let product: Vec<String> = tops
                    .iter()
                    .map(|&t| self.model.display_name(t).to_string())
                    .collect();
                entries.push(product.join("*"));
            }
            if entries.is_empty() {
                write!(f, "1")?;
            } else {
                write!(f, "{{{}}}", entries.join(","))?;
            }
        }
        Ok(())
    }
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser { text, pos: 0 }
    }

    fn err(&self, msg: &str) -> KError {
        KError::Parse {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn peek(&mut self) -> Option<u8> {
        while self
            .text
            .as_bytes()
            .get(self.pos)
            .is_some_and(u8::is_ascii_whitespace)
        {
            self.pos += 1;
        }
        self.text.as_bytes().get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn end(&mut self) -> Result<()> {
        match self.peek() {
            None => Ok(()),
            Some(_) => Err(self.err("unexpected trailing input")),
        }
    }

    fn atom(&mut self) -> Result<String> {
        self.peek();
        let start = self.pos;
        let bytes = self.text.as_bytes();
        while self.pos < bytes.len()
            && (bytes[self.pos].is_ascii_alphanumeric() || bytes[self.pos] == b'_')
        {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a class name"));
        }
        Ok(self.text[start..self.pos].to_string())
    }

    fn unit(&mut self, model: &FieldModel) -> Result<UnitMonomial> {
        let mut mask = 0u64;
        if self.eat(b'-') {
            mask ^= 1;
        }
        loop {
            let name = self.atom()?;
            if name != "1" {
                mask ^= 1 << model.index_of(&name)?;
            }
            if !self.eat(b'*') {
                break;
            }
        }
        Ok(UnitMonomial(mask))
    }

    fn element(&mut self, model: &FieldModel) -> Result<KElement> {
        let mut acc = model.zero();
        loop {
            let term = if self.eat(b'{') {
                let mut entries = Vec::new();
                if !self.eat(b'}') {
                    loop {
                        entries.push(self.unit(model)?);
                        if self.eat(b'}') {
                            break;
                        }
                        if !self.eat(b',') {
                            return Err(self.err("expected `,` or `}`"));
                        }
                    }
                }
                model.symbol(&entries)
            } else {
                match self.atom()?.as_str() {
                    "1" => model.one(),
                    "0" => model.zero(),
                    _ => return Err(self.err("expected `{`, `0` or `1`")),
                }
            };
            acc = acc.add(&term)?;
            if !self.eat(b'+') {
                break;
            }
        }
        Ok(acc)
    }
}

/// Recovers whether `s` occurs in `x` using only residues and the
/// constant-field part: take residues at every indeterminate of `s`, kill the
/// remaining indeterminates by specializing them to 1, and test for
/// `eps^m` times the constant generators of `s`.
pub fn residue_signature(x: &KElement, s: &BasisSymbol) -> Result<bool> {
    let model = x.model();
    let mut y = x.clone();
    for i in 0..64 {
        if s.gens >> i & 1 == 1 && model.is_indeterminate(i) {
            y = y.residue(&model.class_names()[i].clone())?;
        }
    }
    let indets = model.indeterminate_mask();
    let constant_part: Vec<BasisSymbol> = y
        .support()
        .filter(|t| t.gens & indets == 0)
        .copied()
        .collect();
    let target = BasisSymbol {
        m: s.m,
        gens: s.gens & !indets,
    };
    Ok(constant_part.contains(&target))
}

/// A residue path telling `x` and `y` apart: a basis symbol present in
/// exactly one of them, together with the indeterminates whose residues
/// expose it. `None` when `x == y`.
pub fn distinguishing_witness(
    x: &KElement,
    y: &KElement,
) -> Result<Option<(BasisSymbol, Vec<String>)>> {
    let diff = x.add(y)?;
    for s in diff.support() {
        if residue_signature(x, s)? != residue_signature(y, s)? {
            let model = x.model();
            let path = (0..64)
                .filter(|&i| s.gens >> i & 1 == 1 && model.is_indeterminate(i))
                .map(|i| model.class_names()[i].clone())
                .collect();
            return Ok(Some((*s, path)));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eu() -> FieldModel {
        FieldModel::euclidean(&["a", "b", "c"]).unwrap()
    }

    fn cl() -> FieldModel {
        FieldModel::closed(&["a", "b", "c"]).unwrap()
    }

    #[test]
    fn multilinearity() {
        let m = eu();
        let x = m.symbol_str(&["a*b", "c"]).unwrap();
        assert_eq!(x.to_string(), "{a,c} + {b,c}");
    }

    #[test]
    fn square_rule() {
        let x = eu().symbol_str(&["a", "a"]).unwrap();
        assert_eq!(x.to_string(), "{-1,a}");
        assert!(cl().symbol_str(&["a", "a"]).unwrap().is_zero());
    }

    #[test]
    fn x_minus_x_vanishes() {
        for m in [eu(), cl(), FieldModel::generic(&["a", "b", "c"]).unwrap()] {
            assert!(m.symbol_str(&["a", "-a"]).unwrap().is_zero());
            assert!(m.symbol_str(&["a*b", "-a*b"]).unwrap().is_zero());
        }
    }

    #[test]
    fn products() {
        let m = eu();
        let a = m.symbol_str(&["a"]).unwrap();
        let b = m.symbol_str(&["b"]).unwrap();
        assert_eq!(a.mul(&b).unwrap().to_string(), "{a,b}");
        assert_eq!(a.mul(&a).unwrap().to_string(), "{-1,a}");
        let one = m.one();
        let f = |u: &str| one.add(&m.symbol_str(&[u]).unwrap()).unwrap();
        let prod = f("a").mul(&f("b")).unwrap().mul(&f("a*b")).unwrap();
        assert_eq!(prod.to_string(), "1 + {a,b} + {-1,a*b}");
    }

    #[test]
    fn residues() {
        let m = eu();
        let ab = m.symbol_str(&["a", "b"]).unwrap();
        assert_eq!(ab.residue("a").unwrap().to_string(), "{b}");
        assert!(m
            .symbol_str(&["b"])
            .unwrap()
            .residue("a")
            .unwrap()
            .is_zero());
        let alpha = m.parse_element("{a,b} + {-1,a*b}").unwrap();
        let r = alpha.residue("b").unwrap().residue("a").unwrap();
        assert!(r.is_one());
        assert_eq!(
            alpha.residue("minus_one").unwrap_err(),
            KError::NotAnIndeterminate("minus_one".into())
        );
    }

    #[test]
    fn degree_parts() {
        let x = eu().parse_element("1 + {a,b} + {-1,a*b}").unwrap();
        assert_eq!(x.degree_part(2).to_string(), "{a,b} + {-1,a*b}");
        assert!(x.degree_part(5).is_zero());
        let sum = (0..=3).fold(eu().zero(), |acc, d| acc.add(&x.degree_part(d)).unwrap());
        assert_eq!(sum, x);
    }

    #[test]
    fn rendering_roundtrip() {
        let m = FieldModel::generic(&["a", "b", "c"]).unwrap();
        for text in [
            "0",
            "1",
            "{a,b} + {-1,a*b}",
            "{-1,-1,-1,a,b,c} + {-1,-1,-1,-1,-1,a*b*c}",
            "{2,a} + {-1,b,c}",
            "{-1,a,c} + {-1,b,c}",
        ] {
            let x = m.parse_element(text).unwrap();
            assert_eq!(x.to_string(), text);
            assert_eq!(m.parse_element(&x.to_string()).unwrap(), x);
        }
    }

    #[test]
    fn generic_two_is_killed_by_eps() {
        let m = FieldModel::generic(&["a"]).unwrap();
        assert!(m.symbol_str(&["-1", "2"]).unwrap().is_zero());
        assert!(!m.symbol_str(&["2", "a"]).unwrap().is_zero());
        // {2,2} = {-1,2} = 0
        assert!(m.symbol_str(&["2", "2"]).unwrap().is_zero());
    }

    #[test]
    fn closed_constants_vanish() {
        let m = cl();
        assert!(m.symbol_str(&["-1"]).unwrap().is_zero());
        assert!(m.symbol_str(&["2", "-1"]).unwrap().is_zero());
        assert!(m.symbol_str(&["-1", "-1", "-1"]).unwrap().is_zero());
    }

    #[test]
    fn model_mismatch_and_unknown() {
        assert_eq!(
            eu().one().add(&cl().one()).unwrap_err(),
            KError::ModelMismatch
        );
        assert_eq!(
            eu().symbol_str(&["q"]).unwrap_err(),
            KError::UnknownGenerator("q".into())
        );
    }

    #[test]
    fn signature_reads_support() {
        let m = FieldModel::generic(&["a", "b", "c"]).unwrap();
        let x = m
            .parse_element("{2,a} + {-1,-1,b,c} + {a,b,c} + {-1}")
            .unwrap();
        for s in x.support() {
            assert!(residue_signature(&x, s).unwrap());
        }
        let absent = BasisSymbol { m: 1, gens: 0b1000 };
        assert!(!residue_signature(&x, &absent).unwrap());
    }
}
