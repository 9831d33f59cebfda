use ccalc_core::cubic27::{
    bitangent_algebra, build_action, euclidean_model, orbit_decomposition, PointConfig,
};
use ccalc_core::etale::{galois_sw_total_capped, parse_algebra};
use ccalc_core::groups::{beta1_order, brauer_xd, n_torsion};
use ccalc_core::intersect::{
    class_bin, class_z, closed_form_bin, closed_form_z, r_value, three_part,
};
use num_bigint::BigInt;
use num_integer::Integer;

#[test]
fn beta1_order_is_the_content_of_the_singular_class() {
    for d in 3..=12 {
        assert_eq!(
            BigInt::from(beta1_order(d).unwrap()),
            class_z(d).unwrap().content,
            "d = {d}"
        );
    }
}

#[test]
fn n_torsion_is_the_two_kernel_of_r() {
    for d in 4..=12 {
        assert_eq!(
            n_torsion(d).unwrap() as u64,
            r_value(d).unwrap().gcd(&2),
            "d = {d}"
        );
    }
}

#[test]
fn brauer_xd_splits_into_two_and_three_parts() {
    for d in 3..=30u32 {
        let two = if d >= 4 {
            n_torsion(d).unwrap() as u64
        } else {
            1
        };
        let three = three_part(d) as u64;
        assert_eq!(
            brauer_xd(d, 0).unwrap().cyclic_order(),
            two * three,
            "d = {d}"
        );
        assert_eq!(two * three, d.gcd(&6) as u64);
    }
}

#[test]
fn pipelines_agree_with_closed_forms() {
    for d in 3..=12 {
        let z = class_z(d).unwrap();
        assert_eq!(z.class, closed_form_z(d));
        assert!(z.divisibility_ok);
    }
    for d in 4..=12 {
        let b = class_bin(d).unwrap();
        assert_eq!(b.class, closed_form_bin(d));
        assert_eq!(BigInt::from(r_value(d).unwrap()), b.content);
    }
}

#[test]
fn action_and_orbits_on_the_lines() {
    for cfg in [PointConfig::default_two(), PointConfig::default_three()] {
        let ls = build_action(&cfg).unwrap();
        assert!(ls.is_homomorphism());
        let model = euclidean_model(&cfg).unwrap();
        let report = orbit_decomposition(&ls, &model).unwrap();
        let total: usize = report.orbits.iter().map(|o| o.labels.len()).sum();
        assert_eq!(total, 27);
        assert_eq!(report.algebra.rank(), 27);
        assert_eq!(bitangent_algebra(&cfg, &model).unwrap().rank(), 28);
    }
}

#[test]
fn two_paths_to_alpha2_agree() {
    let cfg = PointConfig::default_two();
    let model = euclidean_model(&cfg).unwrap();
    let from_orbits = bitangent_algebra(&cfg, &model).unwrap();
    let by_hand = parse_algebra(
        "F^3 * F(sqrt(a))^2 * F(sqrt(b))^2 * F(sqrt(a*b))^2 * F(sqrt(a),sqrt(b))^3 * F",
        &model,
    )
    .unwrap();
    assert!(from_orbits.isomorphic(&by_hand));
    let a = galois_sw_total_capped(&from_orbits, 2).unwrap();
    let b = galois_sw_total_capped(&by_hand, 2).unwrap();
    assert_eq!(a.classes[2], b.classes[2]);
    assert_eq!(a.classes[2].to_string(), "{a,b} + {-1,a*b}");
}
