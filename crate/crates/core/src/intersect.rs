//! Equivariant fundamental classes of loci of singular plane curves.
//!
//! Everything happens in torus-equivariant Chow rings: `l1, l2, l3` are the
//! torus weights, `h` the hyperplane class of the space of degree-`d` forms,
//! and `s`, `t` the hyperplane classes of two copies of the projective plane,
//! each satisfying `x^3 + c1 x^2 + c2 x + c3 = 0` with `c_i` the signed
//! elementary symmetric polynomials of the weights. The class `h` is only
//! ever needed in low degree, so its relation is omitted and all rings carry
//! the working degree [`WORKING_DEGREE`].

use std::collections::BTreeMap;
use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::polyring::{
    exact_divide, fiber_pushforward, make_ring, substitute, symmetric_reduce, transfer, Poly,
    PolyError, Ring, RingPresentation,
};

pub const WORKING_DEGREE: u32 = 6;

pub const ROOTS: [&str; 3] = ["l1", "l2", "l3"];
pub const CHERN: [&str; 3] = ["c1", "c2", "c3"];

const CUBIC: [&str; 4] = ["1", "-l1 - l2 - l3", "l1*l2 + l1*l3 + l2*l3", "-l1*l2*l3"];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IntersectError {
    #[error("degree {d} is below the minimum {min} for this locus")]
    DegreeTooSmall { d: u32, min: u32 },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

pub type Result<T> = std::result::Result<T, IntersectError>;

fn guard(d: u32, min: u32) -> Result<()> {
    if d < min {
        Err(IntersectError::DegreeTooSmall { d, min })
    } else {
        Ok(())
    }
}

/// Torus-equivariant ring with the given projective-plane fibers.
fn weight_ring(fibers: &[&str]) -> Ring {
    let mut p = RingPresentation::new();
    for l in ROOTS {
        p = p.generator(l, 1);
    }
    p = p.generator("h", 1);
    for f in fibers {
        p = p.generator(f, 1).relation_str(f, &CUBIC);
    }
    make_ring(p.working_degree(WORKING_DEGREE)).expect("static presentation")
}

/// `Z[c1,c2,c3][extra...][h]`, the target of symmetric reduction.
fn chern_ring(extra: &[&str], top: &str) -> Ring {
    let mut p = RingPresentation::new();
    for e in extra {
        p = p.generator(e, 1);
    }
    for (i, c) in CHERN.iter().enumerate() {
        p = p.generator(c, i as u32 + 1);
    }
    p = p.generator(top, 1);
    make_ring(p.working_degree(WORKING_DEGREE)).expect("static presentation")
}

/// Ring of the pair locus after restriction: `u` is the hyperplane class of
/// the plane and `hz` the hyperplane class of the locus.
pub fn ztilde_ring() -> Ring {
    chern_ring(&["u"], "hz")
}

/// Class of the hypersurface of forms singular at the point of the `fiber`
/// plane: `prod_i (h + (d-1) fiber + l_i)`.
fn incidence_product(ring: &Ring, fiber: &str, d: u32) -> Result<Poly> {
    let mut acc = ring.one();
    for l in ROOTS {
        let f = ring.parse(&format!("h + {}*{fiber} + {l}", d - 1))?;
        acc = acc.mul(&f)?;
    }
    Ok(acc)
}

/// `prod_i (h + (d-1) t + l_i)` in `Z[l1,l2,l3][h][t]/(t^3 + c1 t^2 + c2 t + c3)`.
pub fn class_ztilde(d: u32) -> Result<Poly> {
    guard(d, 3)?;
    incidence_product(&weight_ring(&["t"]), "t", d)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocusClassReport {
    pub d: u32,
    pub class: Poly,
    pub coefficients: BTreeMap<String, BigInt>,
    pub content: BigInt,
    pub expected_divisor: BigInt,
    pub divisibility_ok: bool,
    pub elapsed_ms: f64,
}

fn report(
    d: u32,
    class: Poly,
    basis: &[&str],
    expected_divisor: BigInt,
    start: Instant,
) -> Result<LocusClassReport> {
    let mut coefficients = BTreeMap::new();
    for b in basis {
        coefficients.insert(b.to_string(), class.coefficient_of(&[(b, 1)])?);
    }
    let content = class.content();
    let divisibility_ok = !expected_divisor.is_zero() && content.is_multiple_of(&expected_divisor);
    Ok(LocusClassReport {
        d,
        class,
        coefficients,
        content,
        expected_divisor,
        divisibility_ok,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// `3^{i_d}` with `i_d = 1` exactly when `3 | d`.
pub fn three_part(d: u32) -> u32 {
    if d.is_multiple_of(3) {
        3
    } else {
        1
    }
}

/// Class of the locus of singular curves, pushed down from the incidence
/// correspondence and written in `Z[c1,c2,c3][h]`.
pub fn class_z(d: u32) -> Result<LocusClassReport> {
    guard(d, 3)?;
    let start = Instant::now();
    let z = class_ztilde(d)?;
    let pushed = fiber_pushforward(&z, "t")?;
    let class = symmetric_reduce(&pushed, &ROOTS, &CHERN, &chern_ring(&[], "h"))?;
    let expected = BigInt::from(three_part(d)) * BigInt::from(d - 1).pow(2);
    report(d, class, &["h", "c1"], expected, start)
}

/// Which plane factor gets integrated out in the two-node computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PushedFactor {
    S,
    #[default]
    T,
}

/// Degree-one part of the residual-intersection correction, computed from
/// the normal bundle data in `Z[l1,l2,l3][u][hz]`: twice the sum of the
/// incidence divisors minus the first Chern class of the normal bundle of
/// the diagonal.
pub fn rho_interior(d: u32) -> Result<Poly> {
    let ring = make_ring(
        RingPresentation::new()
            .generator("l1", 1)
            .generator("l2", 1)
            .generator("l3", 1)
            .generator("u", 1)
            .generator("hz", 1),
    )?;
    let mut sum = ring.zero();
    for l in ROOTS {
        sum = sum.add(&ring.parse(&format!("hz + {}*u + {l}", d - 1))?)?;
    }
    let normal_c1 = sum.add(&ring.parse("3*u + l1 + l2 + l3")?)?;
    Ok(sum.scale(&BigInt::from(2)).sub(&normal_c1)?)
}

/// Class of the closure of the locus of curves with two nodes, pulled back
/// to the incidence locus, in the basis `hz, u, c1`.
pub fn class_bin(d: u32) -> Result<LocusClassReport> {
    class_bin_with(d, PushedFactor::T)
}

pub fn class_bin_with(d: u32, pushed: PushedFactor) -> Result<LocusClassReport> {
    guard(d, 4)?;
    let start = Instant::now();
    let (gone, kept) = match pushed {
        PushedFactor::T => ("t", "s"),
        PushedFactor::S => ("s", "t"),
    };
    let ring = weight_ring(&["s", "t"]);
    let xi = incidence_product(&ring, "s", d)?.mul(&incidence_product(&ring, "t", d)?)?;
    let push = fiber_pushforward(&xi, gone)?;

    // The residual component is the diagonal over the incidence locus; its
    // pushforward is the incidence class itself, so by the projection
    // formula it contributes rho * [Z~] with rho pulled back along the
    // diagonal (hz -> h, u -> the kept plane class).
    let rho = rho_interior(d)?;
    let lift = substitute(
        &rho,
        &[("hz", ring.gen("h")?), ("u", ring.gen(kept)?)],
        &ring,
    )?;
    let ztilde_kept = incidence_product(&ring, kept, d)?;
    let num = push.sub(&lift.mul(&ztilde_kept)?)?;

    let small = weight_ring(&[kept]);
    let quotient = exact_divide(&transfer(&num, &small)?, &transfer(&ztilde_kept, &small)?)?;
    let reduced = symmetric_reduce(&quotient, &ROOTS, &CHERN, &chern_ring(&[kept], "h"))?;
    let target = ztilde_ring();
    let class = substitute(
        &reduced,
        &[("h", target.gen("hz")?), (kept, target.gen("u")?)],
        &target,
    )?;
    let expected = BigInt::from(r_value(d)?);
    report(d, class, &["hz", "u", "c1"], expected, start)
}

/// `gcd(d (d-1)^2, 3 (d-2))`.
pub fn r_value(d: u32) -> Result<u64> {
    guard(d, 4)?;
    let d = d as u64;
    Ok((d * (d - 1) * (d - 1)).gcd(&(3 * (d - 2))))
}

/// `(d-1)^2 (3h - d c1)` evaluated as a polynomial, for any `d >= 1`.
pub fn closed_form_z(d: u32) -> Poly {
    let ring = chern_ring(&[], "h");
    let k = BigInt::from(d as i64 - 1).pow(2);
    let base = ring.parse(&format!("3*h - {d}*c1")).expect("static");
    base.scale(&k)
}

/// `3d(d-2) hz - d(d-1)^2 c1 - 3(d-2) u`, for any `d >= 1`.
pub fn closed_form_bin(d: u32) -> Poly {
    let ring = ztilde_ring();
    let d = BigInt::from(d);
    let one = BigInt::one();
    let two = BigInt::from(2);
    let three = BigInt::from(3);
    let a = &three * &d * (&d - &two);
    let b = &d * (&d - &one) * (&d - &one);
    let c = &three * (&d - &two);
    ring.gen("hz")
        .unwrap()
        .scale(&a)
        .sub(&ring.gen("c1").unwrap().scale(&b))
        .unwrap()
        .sub(&ring.gen("u").unwrap().scale(&c))
        .unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::parse_terms;

    #[test]
    fn ztilde_guard_and_symmetry() {
        assert_eq!(
            class_ztilde(2).unwrap_err(),
            IntersectError::DegreeTooSmall { d: 2, min: 3 }
        );
        let z = class_ztilde(5).unwrap();
        let swapped = substitute(
            &z,
            &[
                ("l1", z.ring().gen("l2").unwrap()),
                ("l2", z.ring().gen("l3").unwrap()),
                ("l3", z.ring().gen("l1").unwrap()),
            ],
            z.ring(),
        )
        .unwrap();
        assert_eq!(swapped, z);
    }

    #[test]
    fn ztilde_t_squared_coefficient_for_quartics() {
        // Expanding by hand: t^2 carries 9(3h + l1 + l2 + l3) from the
        // product, plus 27 t^3 = 27(-c1 t^2 - ...) with -c1 = l1 + l2 + l3.
        let z = class_ztilde(4).unwrap();
        let ring = z.ring().clone();
        let t2 = |f: &[(&str, u32)]| {
            let mut v = f.to_vec();
            v.push(("t", 2));
            z.coefficient_of(&v).unwrap()
        };
        assert_eq!(t2(&[("h", 1)]), BigInt::from(27));
        for l in ROOTS {
            assert_eq!(t2(&[(l, 1)]), BigInt::from(9 + 27));
        }
        assert_eq!(z.coefficient_of(&[("t", 3)]).unwrap(), BigInt::zero());
        assert_eq!(ring.relation_degree("t").unwrap(), 3);
    }

    #[test]
    fn pushforward_examples() {
        let ring = weight_ring(&["t"]);
        let push = |s: &str| fiber_pushforward(&ring.parse(s).unwrap(), "t").unwrap();
        assert!(push("1").is_zero());
        assert!(push("t").is_zero());
        assert_eq!(push("t^2"), ring.one());
        assert_eq!(push("t^3"), ring.parse("l1 + l2 + l3").unwrap());
        assert_eq!(push("h*t^2 + h^2*t"), ring.gen("h").unwrap());
    }

    #[test]
    fn class_z_small_degrees() {
        let r = class_z(4).unwrap();
        assert_eq!(r.class.to_string(), "27*h - 36*c1");
        assert_eq!(r.content, BigInt::from(9));
        assert!(r.divisibility_ok);
        let r = class_z(6).unwrap();
        assert_eq!(r.class.to_string(), "75*h - 150*c1");
        assert_eq!(r.content, BigInt::from(75));
        let r = class_z(3).unwrap();
        assert_eq!(r.class.to_string(), "12*h - 12*c1");
        assert_eq!(r.expected_divisor, BigInt::from(12));
    }

    #[test]
    fn class_bin_matches_closed_form() {
        let r = class_bin(4).unwrap();
        assert_eq!(r.class, closed_form_bin(4));
        assert_eq!(r.content, BigInt::from(6));
        assert_eq!(
            class_bin(5).unwrap().class.to_string(),
            "45*hz - 80*c1 - 9*u"
        );
        assert_eq!(class_bin(6).unwrap().content, BigInt::from(6));
        assert!(matches!(
            class_bin(3).unwrap_err(),
            IntersectError::DegreeTooSmall { d: 3, min: 4 }
        ));
    }

    #[test]
    fn quotient_before_renaming() {
        // The quartic quotient expressed in h, s, c1 before renaming.
        let r = class_bin(4).unwrap();
        let target = chern_ring(&["s"], "h");
        let back = substitute(
            &r.class,
            &[
                ("hz", target.gen("h").unwrap()),
                ("u", target.gen("s").unwrap()),
            ],
            &target,
        )
        .unwrap();
        assert_eq!(back, target.parse("24*h - 36*c1 - 6*s").unwrap());
    }

    #[test]
    fn rho_interior_value() {
        assert_eq!(rho_interior(7).unwrap().to_string(), "3*hz + 15*u");
    }

    #[test]
    fn r_values() {
        assert_eq!(r_value(4).unwrap(), 6);
        assert_eq!(r_value(5).unwrap(), 1);
        assert_eq!(r_value(7).unwrap(), 3);
        assert!(r_value(3).is_err());
    }

    /// Independent check of the pushforward bookkeeping: write the residual
    /// component as the honest class of the relative diagonal in the fiber
    /// product of the two plane bundles, form the class of the two-node
    /// locus as a cycle on the product and push it forward directly. This
    /// needs degree 9, well below the omitted relation of `h` (which lives
    /// in degree `(d+1)(d+2)/2 >= 15`).
    #[test]
    fn diagonal_oracle_agrees_with_projection_formula() {
        for d in [4u32, 5, 7] {
            let mut p = RingPresentation::new();
            for l in ROOTS {
                p = p.generator(l, 1);
            }
            let ring = make_ring(
                p.generator("h", 1)
                    .generator("s", 1)
                    .generator("t", 1)
                    .relation("s", CUBIC.iter().map(|c| parse_terms(c).unwrap()).collect())
                    .relation("t", CUBIC.iter().map(|c| parse_terms(c).unwrap()).collect())
                    .working_degree(10),
            )
            .unwrap();
            // c1 = -(l1+l2+l3), c2 = e2.
            let diagonal = ring
                .parse("s^2 + s*t + t^2 - l1*s - l2*s - l3*s - l1*t - l2*t - l3*t + l1*l2 + l1*l3 + l2*l3")
                .unwrap();
            // The diagonal restricts test classes correctly: pr_*(diag * t^k) = s^k.
            for k in 0..4u32 {
                let y = ring.gen("t").unwrap().pow(k).unwrap();
                let lhs = fiber_pushforward(&diagonal.mul(&y).unwrap(), "t").unwrap();
                assert_eq!(lhs, ring.gen("s").unwrap().pow(k).unwrap());
            }
            let zs = incidence_product(&ring, "s", d).unwrap();
            let zt = incidence_product(&ring, "t", d).unwrap();
            let residual = zs.mul(&diagonal).unwrap();
            let rho = ring.parse(&format!("3*h + {}*s", 3 * (d - 2))).unwrap();
            let b = zs
                .mul(&zt)
                .unwrap()
                .sub(&rho.mul(&residual).unwrap())
                .unwrap();
            let pushed = fiber_pushforward(&b, "t").unwrap();
            let q = ring
                .parse(&format!(
                    "{}*h - {}*s + {}*l1 + {}*l2 + {}*l3",
                    3 * d * (d - 2),
                    3 * (d - 2),
                    d * (d - 1) * (d - 1),
                    d * (d - 1) * (d - 1),
                    d * (d - 1) * (d - 1)
                ))
                .unwrap();
            assert_eq!(pushed, q.mul(&zs).unwrap(), "d = {d}");
        }
    }

    #[test]
    fn swap_gives_same_class() {
        for d in 4..=7 {
            assert_eq!(
                class_bin_with(d, PushedFactor::S).unwrap().class,
                class_bin_with(d, PushedFactor::T).unwrap().class
            );
        }
    }
}
