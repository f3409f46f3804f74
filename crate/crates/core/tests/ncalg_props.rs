mod common;

use common::{build, coeff, raw_poly, system, RawPoly};
use free_stein::ncalg::serial::{tuple_from_value, tuple_to_value};
use free_stein::ncalg::{diff_quotient, jacobian, mai_kernel, parse_tuple, KernelMatrix, NCPoly, Word};
use proptest::prelude::*;

fn pair(n: usize) -> impl Strategy<Value = (RawPoly, RawPoly)> {
    (raw_poly(n, 6), raw_poly(n, 6))
}

proptest! {
    #[test]
    fn leibniz((n, (p, q)) in (1usize..=3).prop_flat_map(|n| (Just(n), pair(n)))) {
        let sys = system(n);
        let (p, q) = (build(&sys, &p), build(&sys, &q));
        let one = NCPoly::one(&sys);
        for i in 0..n {
            let lhs = diff_quotient(i, &p.mul(&q).unwrap()).unwrap();
            let rhs = diff_quotient(i, &q).unwrap().act(&p, &one).unwrap()
                .add(&diff_quotient(i, &p).unwrap().act(&one, &q).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn difference_quotient_lowers_degree_by_one(w in prop::collection::vec(0usize..3, 0..=8)) {
        let sys = system(3);
        let p = NCPoly::monomial(&sys, Word::from_indices(&w), common::one()).unwrap();
        for i in 0..3 {
            let d = diff_quotient(i, &p).unwrap();
            let occurrences = w.iter().filter(|&&l| l == i).count();
            let mut weight = 0;
            for (a, b, c) in d.terms() {
                prop_assert_eq!(a.degree() + b.degree() + 1, w.len());
                weight += num_traits::ToPrimitive::to_i64(&c.re.to_integer()).unwrap();
            }
            prop_assert_eq!(weight as usize, occurrences);
        }
    }

    #[test]
    fn adjoint_is_an_involutive_anti_automorphism(
        (p, q) in pair(2), re in -3i64..=3, im in -3i64..=3,
    ) {
        let sys = system(2);
        let (p, q) = (build(&sys, &p), build(&sys, &q));
        prop_assert_eq!(p.adjoint().adjoint(), p.clone());
        prop_assert_eq!(p.mul(&q).unwrap().adjoint(), q.adjoint().mul(&p.adjoint()).unwrap());
        let c = coeff(re, im);
        prop_assert_eq!(p.scale(&c).adjoint(), p.adjoint().scale(&c.conj()));
        for i in 0..2 {
            let d = diff_quotient(i, &p).unwrap();
            prop_assert_eq!(d.flip_adjoint().flip_adjoint(), d.clone());
            prop_assert_eq!(d.adjoint().adjoint(), d.clone());
            // ∂_i(p*) = ∂_{i*}(p)† with every generator self-adjoint.
            prop_assert_eq!(diff_quotient(i, &p.adjoint()).unwrap(), d.flip_adjoint());
        }
    }

    #[test]
    fn mai_kernel_is_linear_in_xi(a in raw_poly(2, 3), b in raw_poly(2, 3), re in -3i64..=3, im in -3i64..=3) {
        let sys = system(2);
        let x = NCPoly::generators(&sys);
        let xi = vec![build(&sys, &a), build(&sys, &b)];
        let eta = vec![build(&sys, &b), build(&sys, &a)];
        let c = coeff(re, im);
        let mixed: Vec<NCPoly> = xi.iter().zip(&eta).map(|(u, v)| u.add(&v.scale(&c)).unwrap()).collect();
        let lhs = mai_kernel(&mixed, &x).unwrap();
        let rhs = mai_kernel(&xi, &x).unwrap().add(&mai_kernel(&eta, &x).unwrap().scale(&c)).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn tuples_round_trip_through_text_and_json(a in raw_poly(2, 4), b in raw_poly(2, 4)) {
        let sys = system(2);
        let t = vec![build(&sys, &a), build(&sys, &b)];
        let text = format!("({}, {})", t[0], t[1]);
        prop_assert_eq!(parse_tuple(&text, &sys).unwrap(), t.clone());
        prop_assert_eq!(tuple_from_value(&tuple_to_value(&t), &sys).unwrap(), t);
    }
}

#[test]
fn jacobian_of_the_generators_is_the_identity() {
    for n in 1..=4 {
        let sys = system(n);
        assert_eq!(jacobian(&NCPoly::generators(&sys)).unwrap(), KernelMatrix::identity(&sys));
    }
}
