//! The 27 lines on the cubic surface obtained by blowing up three conjugate
//! pairs of points in the plane, with the Galois action of the multiquadratic
//! field over which the points are defined.
//!
//! The Galois group of `K = F(sqrt(g_1), ..., sqrt(g_k))` is `(Z/2)^k`, an
//! element being a bitmask whose bit `j` flips the sign of `sqrt(g_j)`. Pair
//! `i` of points is defined over `F(sqrt(m_i))` with `m_i` a product of the
//! `g_j`, so an element swaps the pair iff it flips `sqrt(m_i)`.

use std::fmt;

use num_bigint::BigInt;
use thiserror::Error;

use crate::etale::{galois_sw_total_capped, EtaleAlgebraExpr, EtaleError, Extension};
use crate::ksymbols::{FieldModel, KElement, KError, UnitMonomial};
use crate::polyring::{make_ring, Poly, PolyError, Ring, RingPresentation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CubicError {
    #[error("the Galois action is not a group homomorphism")]
    ActionNotHomomorphism,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("degenerate configuration: {0:?} vanish")]
    DeterminantZero(Vec<String>),
    #[error("residue chain ends at {0}, not 1")]
    CertificateFails(String),
    #[error(transparent)]
    Etale(#[from] EtaleError),
    #[error(transparent)]
    K(#[from] KError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

pub type Result<T> = std::result::Result<T, CubicError>;

const ELEMENT_NAMES: [&str; 6] = ["sigma", "tau", "rho", "g4", "g5", "g6"];

/// Three conjugate pairs of points; pair `i` lives over `F(sqrt(m_i))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointConfig {
    /// Indeterminates generating the splitting field.
    pub generators: Vec<String>,
    /// `pair_masks[i]` has bit `j` set iff `g_j` divides `m_i`.
    pub pair_masks: [u32; 3],
    /// Homogeneous coordinates of the six points `Q1, Q1', Q2, Q2', Q3, Q3'`
    /// in `Z[a,b][x,y]/(x^2 - a, y^2 - b)`, only for two generators.
    pub coordinates: Option<[[String; 3]; 6]>,
}

impl PointConfig {
    /// Pairs over `F(sqrt(a))`, `F(sqrt(b))`, `F(sqrt(ab))` with the points
    /// `(+-sqrt(a):1:0)`, `(+-sqrt(b):0:1)`, `(0:+-sqrt(ab):1)`.
    pub fn default_two() -> Self {
        let c = |a: &str, b: &str, c: &str| [a.to_string(), b.to_string(), c.to_string()];
        PointConfig {
            generators: vec!["a".into(), "b".into()],
            pair_masks: [0b01, 0b10, 0b11],
            coordinates: Some([
                c("x", "1", "0"),
                c("-x", "1", "0"),
                c("y", "0", "1"),
                c("-y", "0", "1"),
                c("0", "x*y", "1"),
                c("0", "-x*y", "1"),
            ]),
        }
    }

    /// Pairs over `F(sqrt(a))`, `F(sqrt(b))`, `F(sqrt(c))`.
    pub fn default_three() -> Self {
        PointConfig {
            generators: vec!["a".into(), "b".into(), "c".into()],
            pair_masks: [0b001, 0b010, 0b100],
            coordinates: None,
        }
    }

    pub fn from_generators(gens: &[&str]) -> Result<Self> {
        match gens {
            [a, b] if a != b => {
                let mut cfg = Self::default_two();
                cfg.generators = vec![a.to_string(), b.to_string()];
                Ok(cfg)
            }
            [a, b, c] if a != b && b != c && a != c => {
                let mut cfg = Self::default_three();
                cfg.generators = vec![a.to_string(), b.to_string(), c.to_string()];
                Ok(cfg)
            }
            _ => Err(CubicError::InvalidConfig(
                "expected two or three distinct generators".into(),
            )),
        }
    }

    pub fn group_order(&self) -> usize {
        1 << self.generators.len()
    }

    fn validate(&self) -> Result<()> {
        let k = self.generators.len();
        if !(1..=ELEMENT_NAMES.len()).contains(&k) {
            return Err(CubicError::InvalidConfig(
                "unsupported number of generators".into(),
            ));
        }
        for m in self.pair_masks {
            if m == 0 || m >> k != 0 {
                return Err(CubicError::InvalidConfig("pair class out of range".into()));
            }
        }
        Ok(())
    }

    pub fn element_name(&self, g: u32) -> String {
        if g == 0 {
            return "1".into();
        }
        let parts: Vec<&str> = (0..self.generators.len())
            .filter(|j| g >> j & 1 == 1)
            .map(|j| ELEMENT_NAMES[j])
            .collect();
        parts.join("*")
    }

    /// The square class `prod_{j in mask} g_j` in `model`.
    fn class_of(&self, mask: u32, model: &FieldModel) -> Result<UnitMonomial> {
        let mut u = UnitMonomial(0);
        for (j, g) in self.generators.iter().enumerate() {
            if mask >> j & 1 == 1 {
                u = u.mul(UnitMonomial(1 << model.index_of(g)?));
            }
        }
        Ok(u)
    }

    /// Permutation of the six points (0-based) induced by `g`.
    pub fn point_permutation(&self, g: u32) -> [usize; 6] {
        let mut p = [0, 1, 2, 3, 4, 5];
        for (i, m) in self.pair_masks.iter().enumerate() {
            if (g & m).count_ones() % 2 == 1 {
                p.swap(2 * i, 2 * i + 1);
            }
        }
        p
    }
}

/// The 27 labels in a fixed order: `E1..E6`, `L12..L56`, `C1..C6`.
pub fn line_labels() -> Vec<String> {
    let mut v: Vec<String> = (1..=6).map(|i| format!("E{i}")).collect();
    for i in 1..=6 {
        for j in i + 1..=6 {
            v.push(format!("L{i}{j}"));
        }
    }
    v.extend((1..=6).map(|i| format!("C{i}")));
    v
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Line {
    Exceptional(usize),
    Through(usize, usize),
    Conic(usize),
}

fn lines() -> Vec<Line> {
    let mut v: Vec<Line> = (0..6).map(Line::Exceptional).collect();
    for i in 0..6 {
        for j in i + 1..6 {
            v.push(Line::Through(i, j));
        }
    }
    v.extend((0..6).map(Line::Conic));
    v
}

/// The 27 labels with the permutation of each group element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineSet {
    pub config: PointConfig,
    pub labels: Vec<String>,
    /// `action[g][i]` is the index of `g` applied to label `i`.
    pub action: Vec<Vec<usize>>,
}

impl LineSet {
    pub fn apply(&self, g: u32, label: &str) -> Option<&str> {
        let i = self.labels.iter().position(|l| l == label)?;
        Some(&self.labels[self.action[g as usize][i]])
    }

    /// Whether `g h` acts as `g` after `h` for all pairs of elements.
    pub fn is_homomorphism(&self) -> bool {
        let n = self.action.len();
        (0..n).all(|g| {
            (0..n).all(|h| {
                (0..27).all(|i| self.action[g][self.action[h][i]] == self.action[g ^ h][i])
            })
        })
    }
}

pub fn build_action(cfg: &PointConfig) -> Result<LineSet> {
    cfg.validate()?;
    let all = lines();
    let index = |l: Line| all.iter().position(|x| *x == l).unwrap();
    let mut action = Vec::with_capacity(cfg.group_order());
    for g in 0..cfg.group_order() as u32 {
        let p = cfg.point_permutation(g);
        let perm = all
            .iter()
            .map(|l| match *l {
                Line::Exceptional(i) => index(Line::Exceptional(p[i])),
                Line::Through(i, j) => {
                    let (a, b) = (p[i].min(p[j]), p[i].max(p[j]));
                    index(Line::Through(a, b))
                }
                Line::Conic(i) => index(Line::Conic(p[i])),
            })
            .collect();
        action.push(perm);
    }
    let ls = LineSet {
        config: cfg.clone(),
        labels: line_labels(),
        action,
    };
    if !ls.is_homomorphism() {
        return Err(CubicError::ActionNotHomomorphism);
    }
    Ok(ls)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orbit {
    pub labels: Vec<String>,
    /// Stabilizer of the first label, as group elements.
    pub stabilizer: Vec<u32>,
    /// Square-class masks `m` with `F(sqrt(m), ...)` the fixed field of the
    /// stabilizer; empty for `F`.
    pub fixed_field: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitReport {
    pub orbits: Vec<Orbit>,
    pub algebra: EtaleAlgebraExpr,
}

/// Basis of the characters of `(Z/2)^k` trivial on `h`, i.e. the square
/// classes whose roots are fixed by `h`.
fn annihilator(h: &[u32], k: usize) -> Vec<u32> {
    let mut basis: Vec<u32> = Vec::new();
    for m in 1u32..(1 << k) {
        if h.iter().all(|g| (g & m).count_ones() % 2 == 0) {
            let mut v = m;
            for b in &basis {
                let pivot = 1 << (31 - b.leading_zeros());
                if v & pivot != 0 {
                    v ^= b;
                }
            }
            if v != 0 {
                basis.push(m);
            }
        }
    }
    basis
}

pub fn orbit_decomposition(ls: &LineSet, model: &FieldModel) -> Result<OrbitReport> {
    if !ls.is_homomorphism() {
        return Err(CubicError::ActionNotHomomorphism);
    }
    let cfg = &ls.config;
    let order = cfg.group_order();
    let mut seen = [false; 27];
    let mut orbits = Vec::new();
    let mut algebra = EtaleAlgebraExpr::new(model);
    for start in 0..27 {
        if seen[start] {
            continue;
        }
        let mut members = vec![start];
        let mut frontier = vec![start];
        seen[start] = true;
        while let Some(i) = frontier.pop() {
            for perm in &ls.action {
                let j = perm[i];
                if !seen[j] {
                    seen[j] = true;
                    members.push(j);
                    frontier.push(j);
                }
            }
        }
        members.sort_unstable();
        let stabilizer: Vec<u32> = (0..order as u32)
            .filter(|&g| ls.action[g as usize][start] == start)
            .collect();
        if members.len() * stabilizer.len() != order {
            return Err(CubicError::ActionNotHomomorphism);
        }
        let fixed_field = annihilator(&stabilizer, cfg.generators.len());
        let classes = fixed_field
            .iter()
            .map(|&m| cfg.class_of(m, model))
            .collect::<Result<Vec<_>>>()?;
        algebra = algebra.with_factor(Extension::new(classes, model)?, 1);
        orbits.push(Orbit {
            labels: members.iter().map(|&i| ls.labels[i].clone()).collect(),
            stabilizer,
            fixed_field,
        });
    }
    Ok(OrbitReport { orbits, algebra })
}

/// The model the configuration's square classes live in.
pub fn euclidean_model(cfg: &PointConfig) -> Result<FieldModel> {
    let gens: Vec<&str> = cfg.generators.iter().map(String::as_str).collect();
    Ok(FieldModel::euclidean(&gens)?)
}

/// The 27-line algebra times one copy of `F`: rank 28.
pub fn bitangent_algebra(cfg: &PointConfig, model: &FieldModel) -> Result<EtaleAlgebraExpr> {
    let ls = build_action(cfg)?;
    let report = orbit_decomposition(&ls, model)?;
    Ok(report.algebra.with_factor(Extension::base(), 1))
}

/// `alpha_2` followed by its residues along the generators in reverse order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub steps: Vec<(String, KElement)>,
}

impl Certificate {
    pub fn rendered(&self) -> Vec<String> {
        self.steps
            .iter()
            .map(|(label, x)| format!("{label} = {x}"))
            .collect()
    }
}

/// Residues of `alpha_2(alg)` at `second = 0` then `first = 0`; the chain
/// must end at 1, which makes `x -> alpha_2 * x` injective on constants.
pub fn nontriviality_certificate(
    alg: &EtaleAlgebraExpr,
    first: &str,
    second: &str,
) -> Result<Certificate> {
    let alpha2 = galois_sw_total_capped(alg, 2)?
        .classes
        .get(2)
        .cloned()
        .unwrap_or_else(|| alg.model().zero());
    let r1 = alpha2.residue(second)?;
    let r2 = r1.residue(first)?;
    let steps = vec![
        ("alpha2".to_string(), alpha2),
        (format!("d_{second}(alpha2)"), r1),
        (format!("d_{first}(d_{second}(alpha2))"), r2.clone()),
    ];
    if !r2.is_one() {
        return Err(CubicError::CertificateFails(r2.to_string()));
    }
    Ok(Certificate { steps })
}

/// `Z[a,b][x,y]/(x^2 - a, y^2 - b)`, a polynomial ring in `x, y` in disguise,
/// hence a domain.
pub fn coordinate_ring() -> Ring {
    make_ring(
        RingPresentation::new()
            .generator("a", 2)
            .generator("b", 2)
            .generator("x", 1)
            .relation_str("x", &["1", "0", "-a"])
            .generator("y", 1)
            .relation_str("y", &["1", "0", "-b"]),
    )
    .expect("static presentation")
}

const POINT_NAMES: [&str; 6] = ["Q1", "Q1'", "Q2", "Q2'", "Q3", "Q3'"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeterminantEntry {
    pub label: String,
    pub value: Poly,
    pub nonzero: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneralPositionReport {
    pub entries: Vec<DeterminantEntry>,
    pub pass: bool,
}

impl GeneralPositionReport {
    pub fn failures(&self) -> Vec<String> {
        self.entries
            .iter()
            .filter(|e| !e.nonzero)
            .map(|e| e.label.clone())
            .collect()
    }
}

impl fmt::Display for GeneralPositionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            writeln!(
                f,
                "{}: {}",
                e.label,
                if e.nonzero { "nonzero" } else { "ZERO" }
            )?;
        }
        write!(
            f,
            "general position: {}",
            if self.pass { "yes" } else { "no" }
        )
    }
}

/// Determinant by cofactor expansion along the first row.
fn determinant(m: &[Vec<Poly>]) -> Result<Poly> {
    let n = m.len();
    let ring = m[0][0].ring().clone();
    if n == 1 {
        return Ok(m[0][0].clone());
    }
    let mut acc = ring.zero();
    for (j, entry) in m[0].iter().enumerate() {
        if entry.is_zero() {
            continue;
        }
        let minor: Vec<Vec<Poly>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(c, _)| *c != j)
                    .map(|(_, p)| p.clone())
                    .collect()
            })
            .collect();
        let term = entry.mul(&determinant(&minor)?)?;
        acc = if j % 2 == 0 {
            acc.add(&term)?
        } else {
            acc.sub(&term)?
        };
    }
    Ok(acc)
}

/// Evaluates the 20 collinearity determinants and the determinant of the
/// conic monomials `u^2, uv, v^2, uw, vw, w^2` at the six points.
pub fn general_position_report(cfg: &PointConfig) -> Result<GeneralPositionReport> {
    let coords = cfg.coordinates.as_ref().ok_or_else(|| {
        CubicError::InvalidConfig("explicit coordinates are only available over k(a,b)".into())
    })?;
    let ring = coordinate_ring();
    let points: Vec<Vec<Poly>> = coords
        .iter()
        .map(|p| {
            p.iter()
                .map(|c| ring.parse(c))
                .collect::<std::result::Result<_, _>>()
        })
        .collect::<std::result::Result<_, _>>()?;
    let mut entries = Vec::new();
    for i in 0..6 {
        for j in i + 1..6 {
            for k in j + 1..6 {
                let m = vec![points[i].clone(), points[j].clone(), points[k].clone()];
                let value = determinant(&m)?;
                entries.push(DeterminantEntry {
                    label: format!(
                        "line {},{},{}",
                        POINT_NAMES[i], POINT_NAMES[j], POINT_NAMES[k]
                    ),
                    nonzero: !value.is_zero(),
                    value,
                });
            }
        }
    }
    let conic_rows = points
        .iter()
        .map(|p| {
            let (u, v, w) = (&p[0], &p[1], &p[2]);
            Ok(vec![
                u.mul(u)?,
                u.mul(v)?,
                v.mul(v)?,
                u.mul(w)?,
                v.mul(w)?,
                w.mul(w)?,
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    let value = determinant(&conic_rows)?;
    entries.push(DeterminantEntry {
        label: "conic through all six".into(),
        nonzero: !value.is_zero(),
        value,
    });
    let pass = entries.iter().all(|e| e.nonzero);
    Ok(GeneralPositionReport { entries, pass })
}

pub fn verify_general_position(cfg: &PointConfig) -> Result<GeneralPositionReport> {
    let report = general_position_report(cfg)?;
    if report.pass {
        Ok(report)
    } else {
        Err(CubicError::DeterminantZero(report.failures()))
    }
}

/// Gcd of the coefficients of a determinant: when it is 1 the determinant
/// stays nonzero in every characteristic.
pub fn determinant_content(e: &DeterminantEntry) -> BigInt {
    e.value.content()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_action_examples() {
        let ls = build_action(&PointConfig::default_two()).unwrap();
        let (sigma, tau) = (0b01, 0b10);
        assert_eq!(ls.apply(sigma, "E1"), Some("E2"));
        assert_eq!(ls.apply(sigma, "E3"), Some("E3"));
        assert_eq!(ls.apply(tau, "E1"), Some("E1"));
        assert_eq!(ls.apply(sigma | tau, "L13"), Some("L24"));
        assert!((0..27).all(|i| ls.action[0][i] == i));
        assert_eq!(ls.config.element_name(sigma | tau), "sigma*tau");
    }

    #[test]
    fn pair_fixers_match_description() {
        // Pair 1 is fixed by tau, pair 2 by sigma, pair 3 by sigma*tau.
        let cfg = PointConfig::default_two();
        assert_eq!(cfg.point_permutation(0b10)[..2], [0, 1]);
        assert_eq!(cfg.point_permutation(0b01)[2..4], [2, 3]);
        assert_eq!(cfg.point_permutation(0b11)[4..], [4, 5]);
    }

    #[test]
    fn orbit_sizes_and_algebra() {
        let cfg = PointConfig::default_two();
        let model = euclidean_model(&cfg).unwrap();
        let report = orbit_decomposition(&build_action(&cfg).unwrap(), &model).unwrap();
        let mut sizes: Vec<usize> = report.orbits.iter().map(|o| o.labels.len()).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, [1, 1, 1, 2, 2, 2, 2, 2, 2, 4, 4, 4]);
        for o in &report.orbits {
            assert_eq!(o.labels.len() * o.stabilizer.len(), 4);
        }
        assert_eq!(
            report.algebra.canonical_string(),
            "F^3 * F(sqrt(a))^2 * F(sqrt(b))^2 * F(sqrt(a*b))^2 * F(sqrt(a),sqrt(b))^3"
        );
    }

    #[test]
    fn certificate_for_default_and_split() {
        let cfg = PointConfig::default_two();
        let model = euclidean_model(&cfg).unwrap();
        let alg = bitangent_algebra(&cfg, &model).unwrap();
        assert_eq!(alg.rank(), 28);
        let cert = nontriviality_certificate(&alg, "a", "b").unwrap();
        assert_eq!(cert.steps[0].1.to_string(), "{a,b} + {-1,a*b}");
        assert!(cert.steps[2].1.is_one());
        let split = crate::etale::parse_algebra("F^28", &model).unwrap();
        assert_eq!(
            nontriviality_certificate(&split, "a", "b").unwrap_err(),
            CubicError::CertificateFails("0".into())
        );
    }

    #[test]
    fn default_points_in_general_position() {
        let report = verify_general_position(&PointConfig::default_two()).unwrap();
        assert_eq!(report.entries.len(), 21);
        // (x:1:0), (-x:1:0), (y:0:1): x*(0-... ) expands to 2x by hand.
        assert_eq!(report.entries[0].value.to_string(), "2*x");
    }

    #[test]
    fn collinear_points_are_caught() {
        let mut cfg = PointConfig::default_two();
        let coords = cfg.coordinates.as_mut().unwrap();
        coords[4] = ["x + y".into(), "1".into(), "1".into()];
        match verify_general_position(&cfg).unwrap_err() {
            CubicError::DeterminantZero(bad) => assert_eq!(bad, ["line Q1,Q2,Q3"]),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn three_generator_configuration() {
        let cfg = PointConfig::default_three();
        let model = euclidean_model(&cfg).unwrap();
        let alg = bitangent_algebra(&cfg, &model).unwrap();
        assert_eq!(alg.rank(), 28);
        let g = galois_sw_total_capped(&alg, 7).unwrap();
        let expect = [
            "1",
            "0",
            "{a,b} + {a,c} + {b,c} + {-1,a*b*c}",
            "0",
            "{-1,-1,-1,a*b*c}",
            "0",
            "{-1,-1,-1,a,b,c} + {-1,-1,-1,-1,-1,a*b*c}",
            "0",
        ];
        for (i, e) in expect.iter().enumerate() {
            assert_eq!(g.classes[i].to_string(), *e, "degree {i}");
        }
        let cert = nontriviality_certificate(&alg, "a", "b").unwrap();
        assert!(cert.steps[2].1.is_one());
    }

    #[test]
    fn relabelling_points_keeps_verdict() {
        let mut cfg = PointConfig::default_two();
        cfg.coordinates.as_mut().unwrap().reverse();
        assert!(verify_general_position(&cfg).unwrap().pass);
    }
}
