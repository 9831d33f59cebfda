use ccalc_core::groups::GroupDescriptor;
use ccalc_core::ksymbols::{FieldModel, UnitMonomial};
use proptest::prelude::*;

fn model() -> FieldModel {
    FieldModel::euclidean(&["a", "b", "c"]).unwrap()
}

proptest! {
    #[test]
    fn symbols_are_bilinear(x in 0u64..32, y in 0u64..32, z in 0u64..32) {
        let m = model();
        let (x, y, z) = (m.unit(x), m.unit(y), m.unit(z));
        let lhs = m.symbol(&[x.mul(y), z]);
        let rhs = m.symbol(&[x, z]).add(&m.symbol(&[y, z])).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn symbols_are_graded_commutative(x in 0u64..32, y in 0u64..32) {
        let m = model();
        let (x, y) = (m.unit(x), m.unit(y));
        prop_assert_eq!(m.symbol(&[x, y]), m.symbol(&[y, x]));
    }

    #[test]
    fn rendering_round_trips(x in 0u64..32, y in 0u64..32, z in 0u64..32, w in 0u64..32) {
        let m = model();
        let e = m.symbol(&[m.unit(x), m.unit(y)]).add(&m.symbol(&[m.unit(z), m.unit(w), m.unit(x)])).unwrap();
        prop_assert_eq!(m.parse_element(&e.to_string()).unwrap(), e);
    }

    #[test]
    fn descriptor_equality_ignores_order(orders in proptest::collection::vec(1u64..20, 0..6), seed in 0usize..720) {
        let mut shuffled = orders.clone();
        let n = shuffled.len();
        if n > 1 {
            shuffled.rotate_left(seed % n);
            shuffled.swap(0, (seed / n) % n);
        }
        let build = |v: &[u64]| v.iter().fold(GroupDescriptor::trivial().field("Br(k)"), |g, o| g.cyclic(*o));
        prop_assert_eq!(build(&orders), build(&shuffled));
    }
}

#[test]
fn unit_multiplication_is_xor() {
    assert_eq!(
        UnitMonomial(0b101).mul(UnitMonomial(0b110)),
        UnitMonomial(0b011)
    );
}
