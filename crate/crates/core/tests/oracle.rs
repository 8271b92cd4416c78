use isoresidual::arith::{GaussianRational, Integer};
use isoresidual::counting::count_closed_form;
use isoresidual::oracle::*;
use isoresidual::profile::{OrderProfile, ResidueTuple, VanishingStructure};
use isoresidual::subset::IndexSubset;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn q(p: i64, d: i64) -> GaussianRational {
    GaussianRational::from_ratio(p, d)
}

fn int(v: i64) -> GaussianRational {
    GaussianRational::from_int(v)
}

fn mu(b: &[u64]) -> OrderProfile {
    OrderProfile::from_poles(b.to_vec()).unwrap()
}

fn rho(v: &[i64]) -> ResidueTuple {
    ResidueTuple::from_integers(v).unwrap()
}

fn poly(c: &[i64]) -> Poly {
    Poly::new(c.iter().map(|&x| int(x)).collect())
}

/// Three-pole profiles with `sum(b) <= max`.
fn profiles(max: u64) -> Vec<Vec<u64>> {
    let mut out = vec![];
    for b1 in 1..=max {
        for b2 in 1..=max {
            for b3 in 1..=max {
                if b1 + b2 + b3 <= max {
                    out.push(vec![b1, b2, b3]);
                }
            }
        }
    }
    out
}

/// Residue at `0` of `1 / (z^b0 * prod (z - c)^b)` by inverting the power
/// series of the polynomial `prod (z - c)^b` around `0`.
fn residue_by_series(b0: u64, others: &[(u64, GaussianRational)]) -> GaussianRational {
    let want = b0 as usize - 1;
    let mut den = vec![GaussianRational::one()];
    for (b, c) in others {
        for _ in 0..*b {
            let mut next = vec![GaussianRational::zero(); den.len() + 1];
            for (i, x) in den.iter().enumerate() {
                next[i + 1] = &next[i + 1] + x;
                next[i] = &next[i] - &(x * c);
            }
            den = next;
        }
    }
    let inv0 = den[0].inv().unwrap();
    let mut inv = vec![inv0.clone()];
    for k in 1..=want {
        let mut acc = GaussianRational::zero();
        for j in 1..=k.min(den.len() - 1) {
            acc = &acc + &(&den[j] * &inv[k - j]);
        }
        inv.push(-(&acc * &inv0));
    }
    inv[want].clone()
}

/// All three residues at a concrete pole position `p`, by translating each
/// pole to the origin.
fn residues_at(b: &[u64], p: &GaussianRational) -> [GaussianRational; 3] {
    let zero = GaussianRational::zero();
    let one = GaussianRational::one();
    let pts = [zero, one, p.clone()];
    let mut out: [GaussianRational; 3] = Default::default();
    for i in 0..3 {
        let others: Vec<(u64, GaussianRational)> =
            (0..3).filter(|&j| j != i).map(|j| (b[j], &pts[j] - &pts[i])).collect();
        out[i] = residue_by_series(b[i], &others);
    }
    out
}

#[test]
fn poly_arithmetic() {
    let a = poly(&[-1, 0, 1]); // p^2 - 1
    let b = poly(&[1, 1]); // p + 1
    let (quo, rem) = a.div_rem(&b).unwrap();
    assert_eq!(quo, poly(&[-1, 1]));
    assert!(rem.is_zero());
    assert_eq!(a.gcd(&poly(&[1, 2, 1])), b);
    assert_eq!(poly(&[0, 0, 1, 1]).strip_root(&int(0)), (poly(&[1, 1]), 2));
    assert_eq!(poly(&[1, 2, 1]).squarefree_part(), b);
    assert!(!poly(&[1, 2, 1]).is_squarefree());
    assert!(poly(&[-1, 2, 1]).is_squarefree());
    assert_eq!(poly(&[-1, 2, 1]).to_string(), "p^2 + 2*p + -1");
    assert_eq!(Poly::zero().degree(), None);
    assert!(a.div_rem(&Poly::zero()).is_none());
}

#[test]
fn gaussian_coefficients() {
    // p^2 + 1 = (p - i)(p + i)
    let p = poly(&[1, 0, 1]);
    let (rest, k) = p.strip_root(&GaussianRational::i());
    assert_eq!(k, 1);
    assert_eq!(rest, Poly::linear_root(&-GaussianRational::i()));
}

#[test]
fn residue_function_examples() {
    let [r0, r1, rp] = residue_functions(&mu(&[1, 1, 1])).unwrap();
    assert_eq!(r0, RatFunc::new(poly(&[1]), poly(&[0, 1])).unwrap());
    assert_eq!(r1, RatFunc::new(poly(&[1]), poly(&[1, -1])).unwrap());
    assert_eq!(rp, RatFunc::new(poly(&[1]), poly(&[0, -1, 1])).unwrap());

    let [r0, r1, rp] = residue_functions(&mu(&[1, 1, 2])).unwrap();
    assert_eq!(r0, RatFunc::new(poly(&[-1]), poly(&[0, 0, 1])).unwrap());
    assert_eq!(r1, RatFunc::new(poly(&[1]), poly(&[1, -2, 1])).unwrap());
    // -(2p - 1) / (p^2 (p - 1)^2)
    let den = &poly(&[0, 0, 1]) * &poly(&[1, -2, 1]);
    assert_eq!(rp, RatFunc::new(poly(&[1, -2]), den).unwrap());
}

#[test]
fn residues_sum_to_zero_identically() {
    for b in profiles(10) {
        let [r0, r1, rp] = residue_functions(&mu(&b)).unwrap();
        assert!((&(&r0 + &r1) + &rp).is_zero(), "b = {b:?}");
    }
}

#[test]
fn residue_functions_match_series_inversion() {
    let points = [int(3), q(-2, 5), &int(2) + &GaussianRational::i(), q(7, 3)];
    for b in profiles(9) {
        let funcs = residue_functions(&mu(&b)).unwrap();
        for p in &points {
            let expected = residues_at(&b, p);
            for i in 0..3 {
                assert_eq!(funcs[i].eval(p).unwrap(), expected[i], "b = {b:?}, p = {p}, pole {i}");
            }
        }
    }
}

#[test]
fn oracle_examples() {
    let m = mu(&[1, 1, 2]);
    let c = oracle_count(&m, &rho(&[2, -1, -1])).unwrap();
    assert_eq!(c.count, Integer::from(2));
    assert_eq!(c.eliminant, poly(&[-1, 2, 1]));
    assert!(c.squarefree);

    let c = oracle_count(&m, &rho(&[1, -1, 0])).unwrap();
    assert_eq!(c.count, Integer::from(1));
    assert!(c.eliminant.eval(&q(1, 2)).is_zero());

    let c = oracle_count(&mu(&[1, 1, 1]), &rho(&[1, 2, -3])).unwrap();
    assert_eq!(c.count, Integer::from(1));
    assert!(c.eliminant.eval(&q(2, 3)).is_zero());

    assert_eq!(oracle_count(&mu(&[3, 5]), &rho(&[1, -1])).unwrap().count, Integer::from(1));
}

#[test]
fn oracle_errors() {
    assert_eq!(oracle_count(&mu(&[1, 1, 2]), &rho(&[0, 0, 0])), Err(OracleError::DegenerateInput));
    assert!(matches!(
        oracle_count(&mu(&[1, 1, 1, 1]), &rho(&[1, -1, 1, -1])),
        Err(OracleError::UnsupportedPoleCount(4))
    ));
    assert!(oracle_count(&mu(&[1, 1, 2]), &rho(&[1, -1])).is_err());
    assert!(matches!(residue_functions(&mu(&[1, 1])), Err(OracleError::UnsupportedPoleCount(2))));
}

#[test]
fn zero_tuple_has_no_differentials() {
    for b in profiles(10) {
        let c = oracle_count_zero_residues(&mu(&b)).unwrap();
        assert_eq!(c.count, Integer::zero(), "b = {b:?}");
    }
    for b1 in 1..=6 {
        for b2 in 1..=6 {
            assert_eq!(oracle_count_zero_residues(&mu(&[b1, b2])).unwrap().count, Integer::zero());
        }
    }
}

fn check_against_closed_form(b: &[u64], r: &ResidueTuple) {
    let m = mu(b);
    let c = oracle_count(&m, r).unwrap();
    assert!(c.squarefree, "b = {b:?}, rho = {r}: eliminant {}", c.eliminant);
    let v = VanishingStructure::from_residues(r);
    assert_eq!(c.count, count_closed_form(&m, &v).unwrap().total, "b = {b:?}, rho = {r}");
}

#[test]
fn oracle_matches_closed_form_generic() {
    let trivial = VanishingStructure::trivial(3).unwrap();
    for b in profiles(8) {
        for seed in 0..5 {
            check_against_closed_form(&b, &trivial.realize(seed).unwrap());
        }
    }
}

#[test]
fn oracle_matches_closed_form_one_vanishing() {
    for b in profiles(8) {
        for i in 1..=3 {
            let v = VanishingStructure::from_generators(3, &[IndexSubset::from_indices([i]).unwrap()]).unwrap();
            check_against_closed_form(&b, &v.realize(1).unwrap());
        }
    }
}

#[test]
fn multiplier_examples() {
    let r = multipliers_to_residues(&[int(2), int(0)]).unwrap();
    assert_eq!(r.values(), &[int(-1), int(1)]);

    let err = multipliers_to_residues(&[int(-1), int(-1), int(3)]).unwrap_err();
    assert_eq!(err, OracleError::IndexConstraintViolated { sum: Box::new(q(1, 2)) });
    assert!(matches!(
        multipliers_to_residues(&[int(3), int(3), int(3)]),
        Err(OracleError::IndexConstraintViolated { .. })
    ));
    assert_eq!(
        multipliers_to_residues(&[int(1), int(5)]),
        Err(OracleError::ParabolicMultiplier { index: 1 })
    );
    assert_eq!(
        multipliers_to_residues(&[int(0), int(1), int(5)]),
        Err(OracleError::ParabolicMultiplier { index: 2 })
    );
}

#[test]
fn polynomial_counts() {
    // residues (1, 2, -3)
    assert_eq!(count_polynomials_with_multipliers(&[int(0), q(1, 2), q(4, 3)]).unwrap(), Integer::from(1));
    // residues (1, 2, 4, -7), no partial sum vanishes
    assert_eq!(
        count_polynomials_with_multipliers(&[int(0), q(1, 2), q(3, 4), q(8, 7)]).unwrap(),
        Integer::from(2)
    );
    // residues (1, -1, 2, -2): one zero-sum pair
    assert_eq!(
        count_polynomials_with_multipliers(&[int(0), int(2), q(1, 2), q(3, 2)]).unwrap(),
        Integer::from(1)
    );
    // complex multipliers with residues (i, -i, 2, -2): one zero-sum pair
    let i = GaussianRational::i();
    let lambdas: Vec<GaussianRational> = [i.clone(), -i, int(2), int(-2)]
        .iter()
        .map(|r| &GaussianRational::one() - &r.inv().unwrap())
        .collect();
    assert_eq!(count_polynomials_with_multipliers(&lambdas).unwrap(), Integer::from(1));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn oracle_equals_closed_form(
        b in prop::collection::vec(1u64..=4, 3),
        r1 in -20i64..=20,
        r2 in -20i64..=20,
        d in 1i64..=5,
    ) {
        let r = ResidueTuple::new(vec![q(r1, d), q(r2, 1), q(-r1 - r2 * d, d)]).unwrap();
        prop_assume!(!r.is_zero());
        check_against_closed_form(&b, &r);
    }

    #[test]
    fn relabeling_poles_keeps_the_count(
        b in prop::collection::vec(1u64..=4, 3),
        r1 in -9i64..=9,
        r2 in -9i64..=9,
        shift in 1usize..3,
    ) {
        let r = rho(&[r1, r2, -r1 - r2]);
        prop_assume!(!r.is_zero());
        let base = oracle_count(&mu(&b), &r).unwrap().count;
        let perm: Vec<usize> = (0..3).map(|i| (i + shift) % 3).collect();
        let b2: Vec<u64> = perm.iter().map(|&i| b[i]).collect();
        let r2v: Vec<GaussianRational> = perm.iter().map(|&i| r.values()[i].clone()).collect();
        let permuted = oracle_count(&mu(&b2), &ResidueTuple::new(r2v).unwrap()).unwrap().count;
        prop_assert_eq!(base, permuted);
    }

    #[test]
    fn residue_identity_at_random_points(
        b in prop::collection::vec(1u64..=4, 3),
        num in -30i64..=30,
        den in 1i64..=7,
    ) {
        let p = q(num, den);
        prop_assume!(!p.is_zero() && p != int(1));
        let funcs = residue_functions(&mu(&b)).unwrap();
        let vals: Vec<GaussianRational> = funcs.iter().map(|f| f.eval(&p).unwrap()).collect();
        prop_assert!((&(&vals[0] + &vals[1]) + &vals[2]).is_zero());
        prop_assert_eq!(vals, residues_at(&b, &p).to_vec());
    }
}
