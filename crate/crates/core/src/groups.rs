//! Abelian-group answers for invariants and Brauer groups of moduli of plane
//! curves, genus three curves and abelian threefolds, assembled from the
//! degree, the characteristic and whether the base field is closed.

use std::fmt;

use num_integer::Integer;
use thiserror::Error;

use crate::intersect::{r_value, three_part, IntersectError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("degree {d} is below the minimum {min}")]
    DegreeTooSmall { d: u32, min: u32 },
    #[error("characteristic {p} is not supported here: {reason}")]
    UnsupportedCharacteristic { p: u64, reason: String },
    #[error("the group is not determined in this case: {0}")]
    Undetermined(String),
    #[error("a degree is required for this stack")]
    MissingDegree,
}

pub type Result<T> = std::result::Result<T, GroupError>;

impl From<IntersectError> for GroupError {
    fn from(e: IntersectError) -> Self {
        match e {
            IntersectError::DegreeTooSmall { d, min } => GroupError::DegreeTooSmall { d, min },
            IntersectError::Poly(p) => GroupError::Undetermined(p.to_string()),
        }
    }
}

fn guard(d: u32, min: u32) -> Result<()> {
    if d < min {
        Err(GroupError::DegreeTooSmall { d, min })
    } else {
        Ok(())
    }
}

/// A cyclic summand `Z/order`; with a positive `shift` it stands for the
/// `order`-torsion of the base cycle module placed in that degree, generated
/// by `label`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct CyclicSummand {
    pub order: u64,
    pub shift: u32,
    pub label: String,
}

#[derive(Debug, Clone, Default)]
pub struct GroupDescriptor {
    pub cyclic: Vec<CyclicSummand>,
    /// Opaque summands such as `Br(k)` or `H^1(k, Z/9)`.
    pub field_summands: Vec<String>,
    /// An undetermined p-primary part, by name.
    pub placeholder: Option<String>,
    /// Only the l-primary parts for l prime to the characteristic are
    /// described.
    pub ell_parts_only: bool,
}

impl GroupDescriptor {
    pub fn trivial() -> Self {
        Self::default()
    }

    pub fn field(mut self, name: &str) -> Self {
        self.field_summands.push(name.to_string());
        self
    }

    pub fn cyclic(mut self, order: u64) -> Self {
        self.cyclic.push(CyclicSummand {
            order,
            shift: 0,
            label: String::new(),
        });
        self
    }

    pub fn torsion(mut self, order: u64, shift: u32, label: &str) -> Self {
        self.cyclic.push(CyclicSummand {
            order,
            shift,
            label: label.to_string(),
        });
        self
    }

    pub fn with_placeholder(mut self, name: &str) -> Self {
        self.placeholder = Some(name.to_string());
        self
    }

    pub fn ell_parts(mut self, yes: bool) -> Self {
        self.ell_parts_only = yes;
        self
    }

    fn visible_cyclic(&self) -> Vec<&CyclicSummand> {
        let mut v: Vec<&CyclicSummand> = self.cyclic.iter().filter(|c| c.order > 1).collect();
        v.sort();
        v
    }

    fn sorted_fields(&self) -> Vec<&String> {
        let mut v: Vec<&String> = self.field_summands.iter().collect();
        v.sort();
        v
    }

    pub fn is_trivial(&self) -> bool {
        self.field_summands.is_empty()
            && self.visible_cyclic().is_empty()
            && self.placeholder.is_none()
    }

    /// Product of the orders of the plain cyclic summands.
    pub fn cyclic_order(&self) -> u64 {
        self.cyclic
            .iter()
            .filter(|c| c.shift == 0)
            .map(|c| c.order)
            .product()
    }

    pub fn summand_strings(&self) -> Vec<String> {
        let mut out: Vec<String> = self.field_summands.clone();
        for c in &self.cyclic {
            if c.order <= 1 {
                continue;
            }
            out.push(match (c.shift, c.label.is_empty()) {
                (0, _) => format!("Z/{}", c.order),
                (s, true) => format!("M(k)_{}[{s}]", c.order),
                (s, false) => format!("{}*M(k)_{}[{s}]", c.label, c.order),
            });
        }
        out.extend(self.placeholder.iter().cloned());
        out
    }
}

/// Multiset equality; order-1 summands are ignored.
impl PartialEq for GroupDescriptor {
    fn eq(&self, other: &Self) -> bool {
        self.visible_cyclic() == other.visible_cyclic()
            && self.sorted_fields() == other.sorted_fields()
            && self.placeholder == other.placeholder
            && self.ell_parts_only == other.ell_parts_only
    }
}

impl Eq for GroupDescriptor {}

impl fmt::Display for GroupDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts = self.summand_strings();
        if parts.is_empty() {
            write!(f, "0")?;
        } else {
            write!(f, "{}", parts.join(" ⊕ "))?;
        }
        if self.ell_parts_only {
            write!(f, "  (l-primary parts, l prime to the characteristic)")?;
        }
        Ok(())
    }
}

/// Order `3^{i_d} (d-1)^2` of the degree-one torsion invariant.
pub fn beta1_order(d: u32) -> Result<u64> {
    guard(d, 3)?;
    Ok(three_part(d) as u64 * (d as u64 - 1).pow(2))
}

/// Order of the kernel of multiplication by 2 on `Z/r`, `r = r_value(d)`.
pub fn n_torsion(d: u32) -> Result<u32> {
    let r = r_value(d)?;
    let parity = if d.is_multiple_of(2) { 2 } else { 1 };
    let kernel = r.gcd(&2) as u32;
    if kernel != parity {
        return Err(GroupError::Undetermined(format!(
            "r = {r} has the wrong parity for d = {d}"
        )));
    }
    Ok(kernel)
}

fn is_prime(p: u64) -> bool {
    p >= 2
        && (2..)
            .take_while(|q| q * q <= p)
            .all(|q| !p.is_multiple_of(q))
}

fn check_char(p: u64, excluded: &[u64], d: Option<u32>) -> Result<()> {
    if p == 0 {
        return Ok(());
    }
    let fail = |reason: String| Err(GroupError::UnsupportedCharacteristic { p, reason });
    if !is_prime(p) {
        return fail("not a prime".into());
    }
    if excluded.contains(&p) {
        return fail(format!("characteristics {excluded:?} are excluded"));
    }
    if let Some(d) = d {
        if (d as u64).is_multiple_of(p) {
            return fail(format!("it divides d = {d}"));
        }
    }
    Ok(())
}

/// `Br` of smooth plane curves of degree `d` over an algebraically closed
/// field: `Z/gcd(d, 6)`, plus a p-primary part in characteristic `p`.
pub fn brauer_xd(d: u32, p: u64) -> Result<GroupDescriptor> {
    guard(d, 3)?;
    check_char(p, &[2, 3], Some(d))?;
    let g = GroupDescriptor::trivial().cyclic(d.gcd(&6) as u64);
    Ok(if p > 0 {
        g.with_placeholder(&format!("B'_{{{p},{d}}}"))
    } else {
        g
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stack {
    Xd,
    XdFramed,
    X4Framed,
    M3,
    M3MinusH3,
    A3,
}

impl Stack {
    pub fn name(self) -> &'static str {
        match self {
            Stack::Xd => "xd",
            Stack::XdFramed => "xdfr",
            Stack::X4Framed => "x4fr",
            Stack::M3 => "m3",
            Stack::M3MinusH3 => "m3-minus-h3",
            Stack::A3 => "a3",
        }
    }
}

impl std::str::FromStr for Stack {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s.replace('_', "-").as_str() {
            "xd" => Stack::Xd,
            "xdfr" => Stack::XdFramed,
            "x4fr" => Stack::X4Framed,
            "m3" => Stack::M3,
            "m3-minus-h3" => Stack::M3MinusH3,
            "a3" => Stack::A3,
            other => return Err(format!("unknown stack `{other}`")),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BrauerParams {
    pub d: Option<u32>,
    /// 0 or a prime.
    pub characteristic: u64,
    /// Whether the base field is algebraically closed.
    pub closed: bool,
}

fn h1(n: u64) -> String {
    format!("H^1(k, Z/{n})")
}

pub fn brauer_stack(stack: Stack, params: BrauerParams) -> Result<GroupDescriptor> {
    let p = params.characteristic;
    let br = if params.closed { None } else { Some("Br(k)") };
    let base = || match br {
        Some(b) => GroupDescriptor::trivial().field(b),
        None => GroupDescriptor::trivial(),
    };
    match stack {
        Stack::Xd => brauer_xd(params.d.ok_or(GroupError::MissingDegree)?, p),
        Stack::XdFramed => {
            let d = params.d.ok_or(GroupError::MissingDegree)?;
            guard(d, 3)?;
            check_char(p, &[2], Some(d))?;
            if params.closed {
                let g = GroupDescriptor::trivial().cyclic(d.gcd(&2) as u64);
                return Ok(if p > 0 {
                    g.with_placeholder(&format!("B_{{{d},{p}}}"))
                } else {
                    g
                });
            }
            if d % 2 == 0 {
                return Err(GroupError::Undetermined(
                    "even d over a field that is not algebraically closed".into(),
                ));
            }
            Ok(base().field(&h1(beta1_order(d)?)).ell_parts(p > 0))
        }
        Stack::X4Framed | Stack::M3MinusH3 => {
            check_char(p, &[2], None)?;
            let mut g = base();
            // In characteristic 3 the 9-torsion has no l-primary part.
            if p != 3 && !params.closed {
                g = g.field(&h1(9));
            }
            Ok(g.cyclic(2).ell_parts(p > 0))
        }
        Stack::M3 => {
            check_char(p, &[2], None)?;
            let g = base().cyclic(2);
            Ok(if p > 0 {
                g.with_placeholder(&format!("B_{p}"))
            } else {
                g
            })
        }
        Stack::A3 => {
            check_char(p, &[2], None)?;
            let g = base().cyclic(2);
            Ok(if p > 0 {
                g.with_placeholder(&format!("B''_{p}"))
            } else {
                g
            })
        }
    }
}

/// Degree `<= 2` invariants of framed smooth plane curves of degree `d` with
/// coefficients in a cycle module `M`. For even `d` over a field that is not
/// algebraically closed the degree-two torsion part `N` is only known to sit
/// inside `M^0(k)_2`; it is reported as a placeholder except for quartics,
/// where the explicit cubic-surface certificate shows it is all of it.
pub fn inv_xdfr(d: u32, closed: bool) -> Result<GroupDescriptor> {
    let n = beta1_order(d)?;
    let g = GroupDescriptor::trivial()
        .field("M^{<=2}(k)")
        .torsion(n, 1, "beta1");
    if d % 2 == 1 {
        return Ok(g);
    }
    if closed || d == 4 {
        Ok(g.torsion(2, 2, "alpha2"))
    } else {
        Ok(g.with_placeholder("N ⊆ M^0(k)_2[2]"))
    }
}

/// Divisibility of the class of the closure of the hyperelliptic locus in
/// the moduli of abelian threefolds: `9` from its class on curves times the
/// degree `2` of the Torelli map onto its image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HyperellipticDivisibility {
    pub value: u64,
    pub factors: Vec<u64>,
}

pub fn hyperelliptic_divisibility() -> HyperellipticDivisibility {
    let on_curves = 9;
    let torelli_degree = 2;
    HyperellipticDivisibility {
        value: on_curves * torelli_degree,
        factors: vec![on_curves, torelli_degree],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beta1_examples() {
        assert_eq!(beta1_order(4).unwrap(), 9);
        assert_eq!(beta1_order(6).unwrap(), 75);
        assert_eq!(beta1_order(5).unwrap(), 16);
        assert!(beta1_order(2).is_err());
    }

    #[test]
    fn n_torsion_examples() {
        assert_eq!(n_torsion(4).unwrap(), 2);
        assert_eq!(n_torsion(5).unwrap(), 1);
        assert_eq!(n_torsion(8).unwrap(), 2);
        assert_eq!(r_value(8).unwrap(), 2);
    }

    #[test]
    fn brauer_xd_examples() {
        assert_eq!(brauer_xd(6, 0).unwrap().to_string(), "Z/6");
        assert!(brauer_xd(5, 0).unwrap().is_trivial());
        assert_eq!(brauer_xd(4, 7).unwrap().to_string(), "Z/2 ⊕ B'_{7,4}");
        assert!(matches!(
            brauer_xd(4, 3).unwrap_err(),
            GroupError::UnsupportedCharacteristic { p: 3, .. }
        ));
        assert!(brauer_xd(10, 5).is_err());
        assert!(brauer_xd(4, 9).is_err());
    }

    #[test]
    fn stack_examples() {
        let m3 = brauer_stack(Stack::M3, BrauerParams::default()).unwrap();
        assert_eq!(m3, GroupDescriptor::trivial().cyclic(2).field("Br(k)"));
        assert_eq!(m3.to_string(), "Br(k) ⊕ Z/2");
        let m3h = brauer_stack(Stack::M3MinusH3, BrauerParams::default()).unwrap();
        assert_eq!(m3h.to_string(), "Br(k) ⊕ H^1(k, Z/9) ⊕ Z/2");
        let xdfr = brauer_stack(
            Stack::XdFramed,
            BrauerParams {
                d: Some(5),
                characteristic: 0,
                closed: true,
            },
        )
        .unwrap();
        assert!(xdfr.is_trivial());
        let a3 = brauer_stack(
            Stack::A3,
            BrauerParams {
                characteristic: 5,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(a3.to_string(), "Br(k) ⊕ Z/2 ⊕ B''_5");
        assert!(brauer_stack(
            Stack::M3,
            BrauerParams {
                characteristic: 2,
                ..Default::default()
            }
        )
        .is_err());
    }

    #[test]
    fn odd_framed_over_any_field() {
        let g = brauer_stack(
            Stack::XdFramed,
            BrauerParams {
                d: Some(5),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(g.to_string(), "Br(k) ⊕ H^1(k, Z/16)");
    }

    #[test]
    fn descriptor_equality_ignores_order() {
        let a = GroupDescriptor::trivial()
            .cyclic(2)
            .field("Br(k)")
            .cyclic(1);
        let b = GroupDescriptor::trivial().field("Br(k)").cyclic(2);
        assert_eq!(a, b);
        assert_ne!(a, b.clone().cyclic(3));
    }

    #[test]
    fn invariants_of_framed_curves() {
        assert_eq!(
            inv_xdfr(4, false).unwrap().to_string(),
            "M^{<=2}(k) ⊕ beta1*M(k)_9[1] ⊕ alpha2*M(k)_2[2]"
        );
        assert_eq!(
            inv_xdfr(5, false).unwrap().to_string(),
            "M^{<=2}(k) ⊕ beta1*M(k)_16[1]"
        );
        assert!(inv_xdfr(6, false).unwrap().placeholder.is_some());
    }

    #[test]
    fn hyperelliptic() {
        let h = hyperelliptic_divisibility();
        assert_eq!(h.value, 18);
        assert_eq!(h.factors, [9, 2]);
        assert_eq!(h.value.gcd(&16), 2);
    }
}
