use fareycount::arith::{gcd_raw, is_prime};
use fareycount::counting::{count_l_fast, count_l_naive, count_n_brute, CoefficientVector, IntegerBox};
use fareycount::expsum::{congruence_count, congruence_count_brute, ratio_sum, ColumnDomain};
use fareycount::lcm_filter::{is_admissible, is_admissible_modular, DenominatorVector};
use fareycount::rationals::{Accumulator, Fraction};
use fareycount::RunOptions;
use num_bigint::BigInt;
use num_rational::Ratio;
use proptest::prelude::*;

fn small_prime() -> impl Strategy<Value = u64> {
    (7u64..200).prop_filter("prime", |&p| is_prime(p))
}

proptest! {
    #[test]
    fn fraction_order_matches_rationals(a in 0u64..500, b in 1u64..500, c in 0u64..500, d in 1u64..500) {
        let x = Fraction::reduce(a, b).unwrap();
        let y = Fraction::reduce(c, d).unwrap();
        prop_assert_eq!(x.cmp(&y), Ratio::new(a, b).cmp(&Ratio::new(c, d)));
        prop_assert_eq!(gcd_raw(x.numerator(), x.denominator()), 1);
        prop_assert_eq!(x.to_string().parse::<Fraction>().unwrap(), x);
    }

    #[test]
    fn accumulator_matches_rationals(terms in prop::collection::vec((-50i64..50, 0u64..60, 1u64..60), 1..8)) {
        let mut acc = Accumulator::zero();
        let mut expect = Ratio::<i64>::from_integer(0);
        for &(c, s, r) in &terms {
            acc = acc.accumulate(&BigInt::from(c), &Fraction::reduce(s, r).unwrap());
            expect += Ratio::new(c * s as i64, r as i64);
        }
        prop_assert_eq!(acc.numerator().clone(), BigInt::from(*expect.numer()));
        prop_assert_eq!(acc.denominator().clone(), num_bigint::BigUint::from(*expect.denom() as u64));
    }

    #[test]
    fn admissibility_tests_agree(r in prop::collection::vec(1u64..80, 1..5)) {
        let v = DenominatorVector::new(r.clone()).unwrap();
        prop_assert_eq!(is_admissible(&v).unwrap(), is_admissible_modular(&r));
    }

    #[test]
    fn fast_matches_naive(n in 2usize..=3, h in 1u64..=9) {
        let o = RunOptions::default();
        prop_assert_eq!(count_l_fast(n, h, &o).unwrap().count, count_l_naive(n, h, &o).unwrap().count);
    }

    #[test]
    fn box_count_permutation_equivariant(
        a in prop::collection::vec((1i64..6, any::<bool>()), 3),
        a0 in -4i64..5,
        len0 in prop::collection::vec(1u64..5, 3),
        len in prop::collection::vec(1u64..5, 3),
        off in prop::collection::vec(-5i64..5, 3),
    ) {
        let a: Vec<i64> = a.iter().map(|&(x, neg)| if neg { -x } else { x }).collect();
        let o = RunOptions::default();
        let base = count_n_brute(
            &CoefficientVector::from_i64(a0, &a).unwrap(),
            &IntegerBox::at_origin(len0.clone()).unwrap(),
            &IntegerBox::new(off.clone(), len.clone()).unwrap(),
            &o,
        ).unwrap().count;
        let p = [2usize, 0, 1];
        let perm = |v: &[i64]| p.iter().map(|&i| v[i]).collect::<Vec<_>>();
        let permu = |v: &[u64]| p.iter().map(|&i| v[i]).collect::<Vec<_>>();
        let swapped = count_n_brute(
            &CoefficientVector::from_i64(a0, &perm(&a)).unwrap(),
            &IntegerBox::at_origin(permu(&len0)).unwrap(),
            &IntegerBox::new(perm(&off), permu(&len)).unwrap(),
            &o,
        ).unwrap().count;
        prop_assert_eq!(base, swapped);
    }

    #[test]
    fn ratio_sum_magnitude_and_conjugation(p in small_prime(), a in 1i64..400, u in 1u64..7, v in 0u64..30) {
        let d = ColumnDomain::right_triangle(u, v).unwrap();
        let s = ratio_sum(a, p, &d).unwrap();
        let t = ratio_sum(-a, p, &d).unwrap();
        prop_assert!(s.norm() <= d.point_count() as f64 + 1e-9);
        prop_assert!((s - t.conj()).norm() < 1e-9);
    }

    #[test]
    fn congruence_histogram_matches_scan(
        p in small_prime(),
        a in prop::collection::vec(-9i64..10, 2),
        a0 in -9i64..10,
        len in prop::collection::vec(1u64..6, 4),
        off in prop::collection::vec(-8i64..8, 2),
    ) {
        prop_assume!(a.iter().all(|&x| x != 0));
        let c = CoefficientVector::from_i64(a0, &a).unwrap();
        let b0 = IntegerBox::at_origin(len[..2].to_vec()).unwrap();
        let b = IntegerBox::new(off, len[2..].to_vec()).unwrap();
        let m = congruence_count(&c, p, &b0, &b, &RunOptions::default()).unwrap();
        prop_assert_eq!(m, congruence_count_brute(&c, p, &b0, &b).unwrap());
        prop_assert!(count_n_brute(&c, &b0, &b, &RunOptions::default()).unwrap().count <= m);
    }
}
