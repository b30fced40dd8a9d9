//! Randomized invariants over the public API.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

use otkit::analysis::maximal_order;
use otkit::geometry::{
    act, metric_det_check, ot_volume, point_from_f64, reduce_to_domain, torsion_upper_bound,
    torsion_upper_bound_sharp, FundamentalDomainData,
};
use otkit::order::{is_irreducible, signature, OrderElement, Signature, SubOrder};
use otkit::poly::IntPolynomial;
use otkit::units::{j_ideal, torsion_group, unit_group, unit_product, UnitConfig, UnitGroupData};

struct Field {
    o: SubOrder,
    u: UnitGroupData,
}

/// Fields with rank 1 and rank 2 positive unit groups, computed once.
fn fields() -> &'static [Field] {
    static CELL: OnceLock<Vec<Field>> = OnceLock::new();
    CELL.get_or_init(|| {
        ["T^3 + T^2 - 1", "T^3 - T + 7", "T^4 - T - 1", "T^4 - 2*T^3 - T^2 + 2*T - 1"]
            .iter()
            .map(|f| {
                let o = maximal_order(&f.parse().unwrap()).unwrap();
                let u = unit_group(&o, &UnitConfig::default()).unwrap();
                Field { o, u }
            })
            .collect()
    })
}

fn s1_cubic() -> impl Strategy<Value = IntPolynomial> {
    (-9i64..=9, -9i64..=9, -9i64..=9)
        .prop_map(|(a, b, c)| IntPolynomial::from_i64s(&[c, b, a, 1]))
        .prop_filter("irreducible with one real place", |f| {
            !f.coeff(0).is_zero() && is_irreducible(f) && signature(f) == Signature { s: 1, t: 1 }
        })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn j_of_product_is_sum_of_j(k in 0usize..4, a in prop::collection::vec(-3i64..=3, 2), b in prop::collection::vec(-3i64..=3, 2)) {
        let f = &fields()[k];
        let g = &f.u.totally_positive_generators;
        let (a, b) = (&a[..g.len()], &b[..g.len()]);
        prop_assume!(a.iter().any(|&x| x != 0) && b.iter().any(|&x| x != 0));
        let x = unit_product(&f.o, g, a).unwrap();
        let y = unit_product(&f.o, g, b).unwrap();
        let lhs = j_ideal(&f.o, std::slice::from_ref(&x)).unwrap().sum(&j_ideal(&f.o, std::slice::from_ref(&y)).unwrap()).unwrap();
        let rhs = j_ideal(&f.o, &[x, y]).unwrap();
        prop_assert_eq!(lhs.basis, rhs.basis);
    }

    #[test]
    fn j_ignores_choice_of_generators(k in 0usize..4, shear in -3i64..=3, flip in any::<bool>()) {
        let f = &fields()[k];
        let g = &f.u.totally_positive_generators;
        let mut h: Vec<OrderElement> = g.clone();
        if flip {
            h[0] = f.o.unit_inverse(&h[0]).unwrap();
        }
        if h.len() == 2 {
            let t = f.o.pow(&h[1], shear).unwrap();
            h[0] = f.o.mul(&h[0], &t);
        }
        let a = j_ideal(&f.o, g).unwrap();
        let b = j_ideal(&f.o, &h).unwrap();
        prop_assert_eq!(&a.basis, &b.basis);
        prop_assert!(a.is_o_module(&f.o));
    }

    #[test]
    fn norm_of_j_is_torsion_order(f in s1_cubic()) {
        let o = maximal_order(&f).unwrap();
        let u = unit_group(&o, &UnitConfig::default()).unwrap();
        let tp = &u.totally_positive_generators;
        let j = j_ideal(&o, tp).unwrap();
        let t = torsion_group(&o, tp).unwrap();
        prop_assert_eq!(&j.norm, &t.order_of_torsion);
        prop_assert_eq!(t.free_rank, 0);
        let d = o.disc().abs();
        let v = ot_volume(1, &d, &u.regulator).unwrap().value;
        let n = num_traits::ToPrimitive::to_f64(&t.order_of_torsion).unwrap();
        prop_assert!(torsion_upper_bound(&v, &d).mid_f64() >= n);
        prop_assert!(torsion_upper_bound_sharp(&v, &d).mid_f64() >= n);
    }

    #[test]
    fn translation_preserves_field_invariants(f in s1_cubic(), k in -3i64..=3) {
        let g = f.shift(&BigInt::from(k));
        let (o, p) = (maximal_order(&f).unwrap(), maximal_order(&g).unwrap());
        prop_assert_eq!(o.disc(), p.disc());
        let cfg = UnitConfig::default();
        let (r, q) = (unit_group(&o, &cfg).unwrap().regulator, unit_group(&p, &cfg).unwrap().regulator);
        prop_assert!(r.overlaps(&q), "{} vs {}", r, q);
    }

    #[test]
    fn metric_determinant_matches_closed_form(s in 1usize..=4, logs in prop::collection::vec(-4.0f64..4.0, 4)) {
        let y: Vec<f64> = logs[..s].iter().map(|l| l.exp()).collect();
        let r = metric_det_check(s, &y, 192).unwrap();
        prop_assert!(r.passes(2f64.powi(-64)), "rel {}", r.rel_dev);
    }

    #[test]
    fn polynomial_display_round_trips(c in prop::collection::vec(-50i64..=50, 1..7)) {
        let f = IntPolynomial::from_i64s(&c);
        let back: IntPolynomial = f.to_string().parse().unwrap();
        prop_assert_eq!(f, back);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn reduction_is_idempotent_and_orbit_invariant(
        k in 0usize..4,
        xs in prop::collection::vec(-20.0f64..20.0, 3),
        ly in prop::collection::vec(-3.0f64..3.0, 2),
        shift in prop::collection::vec(-5i64..=5, 4),
        ex in prop::collection::vec(-2i64..=2, 2),
    ) {
        let f = &fields()[k];
        let prec = 160;
        let d = FundamentalDomainData::new(&f.o, &f.u.totally_positive_generators, prec).unwrap();
        let s = d.s;
        let mut z: Vec<(f64, f64)> = (0..s).map(|i| (xs[i], ly[i].exp())).collect();
        z.push((xs[2], ly[0] * 5.0));
        let p = point_from_f64(&z, prec);
        let r = reduce_to_domain(&p, &d, &f.o).unwrap();
        prop_assert!(reduce_to_domain(&r.point, &d, &f.o).unwrap().is_identity());
        let u = OrderElement::new(shift[..f.o.degree()].iter().map(|&c| BigInt::from(c)).collect());
        let v = unit_product(&f.o, &d.square_gens, &ex[..s]).unwrap();
        let moved = act(&f.o, &d.emb, &u, &v, &p);
        let r2 = reduce_to_domain(&moved, &d, &f.o).unwrap();
        for (a, b) in r.point.iter().zip(&r2.point) {
            let (a, b) = (a.to_f64(), b.to_f64());
            prop_assert!((a.0 - b.0).abs() <= 1e-20 * a.0.abs().max(1.0));
            prop_assert!((a.1 - b.1).abs() <= 1e-20 * a.1.abs().max(1.0));
        }
    }
}
