use isoresidual::arith::{Integer, Rational};
use isoresidual::counting::*;
use isoresidual::profile::{OrderProfile, ResidueTuple, VanishingStructure};
use isoresidual::subset::IndexSubset;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn mu(b: &[u64]) -> OrderProfile {
    OrderProfile::from_poles(b.to_vec()).unwrap()
}

fn s(idx: &[usize]) -> IndexSubset {
    IndexSubset::from_indices(idx.iter().copied()).unwrap()
}

fn closure(n: usize, gens: &[&[usize]]) -> VanishingStructure {
    let gens: Vec<IndexSubset> = gens.iter().map(|g| s(g)).collect();
    VanishingStructure::from_generators(n, &gens).unwrap()
}

fn int(v: i64) -> Integer {
    Integer::from(v)
}

fn rat(v: i64) -> Rational {
    Rational::from_integer(int(v))
}

fn total(b: &[u64], v: &VanishingStructure) -> Integer {
    count_closed_form(&mu(b), v).unwrap().total
}

/// Independent evaluation straight from a residue tuple: subset sums decide
/// which parts vanish, and a DP over masks sums the part products by size.
#[allow(clippy::needless_range_loop)]
fn oracle(b: &[u64], rho: &[i128]) -> Rational {
    let n = b.len();
    let a1 = b.iter().sum::<u64>() as i128 - 1;
    let f = |x: i128, m: usize| -> Rational {
        if m == 1 {
            Rational::new(int(1), Integer::from(x + 1))
        } else {
            Rational::from_integer((0..m as i128 - 2).map(|j| Integer::from(x - j)).product())
        }
    };
    let full = (1usize << n) - 1;
    // g[mask][s] = sum over partitions of mask into s zero-sum parts
    let mut g = vec![vec![Rational::zero(); n + 1]; full + 1];
    g[0][0] = rat(1);
    for mask in 1..=full {
        let low = mask & mask.wrapping_neg();
        let rest = mask ^ low;
        let mut sub = rest;
        loop {
            let part = sub | low;
            let sum: i128 = (0..n).filter(|i| part >> i & 1 == 1).map(|i| rho[i]).sum();
            if sum == 0 {
                let b_j: i128 = (0..n).filter(|i| part >> i & 1 == 1).map(|i| b[i] as i128).sum();
                let w = f(b_j - 1, part.count_ones() as usize + 1);
                for k in 1..=n {
                    if !g[mask ^ part][k - 1].is_zero() {
                        let add = &g[mask ^ part][k - 1] * &w;
                        g[mask][k] += add;
                    }
                }
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
    }
    let mut total = Rational::zero();
    for k in 1..=n {
        let scale = if k == 1 {
            Rational::new(int(1), Integer::from(a1))
        } else {
            Rational::from_integer(num_traits::pow(Integer::from(a1), k - 2))
        };
        let term = scale * &g[full][k];
        if k % 2 == 0 {
            total -= term;
        } else {
            total += term;
        }
    }
    total
}

fn integer_residues(rho: &ResidueTuple) -> Vec<i128> {
    rho.values()
        .iter()
        .map(|r| {
            assert!(r.is_real() && r.re.is_integer());
            i128::try_from(r.re.to_integer()).unwrap()
        })
        .collect()
}

#[test]
fn closed_form_examples() {
    assert_eq!(total(&[1, 1, 2], &VanishingStructure::trivial(3).unwrap()), int(2));
    assert_eq!(total(&[1, 1, 2], &closure(3, &[&[3]])), int(1));
    let b = [2, 2, 1, 1];
    let one = count_closed_form(&mu(&b), &closure(4, &[&[1, 2]])).unwrap();
    assert_eq!(one.total, int(9));
    let values: Vec<Rational> = one.per_s.iter().map(|t| t.value.clone()).collect();
    assert_eq!(values, vec![rat(12), rat(-3)]);
    let two = count_closed_form(&mu(&b), &closure(4, &[&[1, 2], &[1, 3]])).unwrap();
    assert_eq!(two.total, int(5));
    assert_eq!(two.per_s[1].partitions.len(), 2);
    assert_eq!(two.per_s[1].value, rat(-7));
    assert_eq!(total(&b, &VanishingStructure::identically_zero(4).unwrap()), int(0));
}

#[test]
fn breakdown_reports_sizes_and_warnings() {
    let v = VanishingStructure::identically_zero(3).unwrap();
    let br = count_closed_form(&mu(&[1, 1, 1]), &v).unwrap();
    assert_eq!(br.max_s, 3);
    let sizes: Vec<usize> = br.per_s.iter().map(|t| t.partitions.len()).collect();
    assert_eq!(sizes, vec![1, 3, 1]);
    assert_eq!(br.warnings.len(), 3);
    assert_eq!(br.warnings[0], CountWarning::ZeroResidueAtSimplePole { pole: 1 });

    let quiet = count_closed_form(&mu(&[2, 2, 1, 1]), &closure(4, &[&[1, 2]])).unwrap();
    assert!(quiet.warnings.is_empty());
}

#[test]
fn size_mismatch_is_rejected() {
    let err = count_closed_form(&mu(&[1, 1, 2]), &VanishingStructure::trivial(4).unwrap());
    assert_eq!(err, Err(CountError::SizeMismatch { profile: 3, structure: 4 }));
}

#[test]
fn general_count_examples() {
    assert_eq!(count_general(&mu(&[1, 1, 2])), int(2));
    assert_eq!(count_general(&mu(&[1, 1, 1])), int(1));
    let fact = [1i64, 1, 2, 6, 24, 120, 720];
    for n in 2..=8 {
        assert_eq!(count_general(&mu(&vec![1; n])), int(fact[n - 2]));
    }
}

#[test]
fn one_vanishing_examples() {
    assert_eq!(count_one_vanishing(&mu(&[1, 1, 2]), s(&[3])).unwrap(), int(1));
    assert_eq!(count_one_vanishing(&mu(&[2, 2, 1, 1]), s(&[1, 2])).unwrap(), int(9));
    assert_eq!(count_one_vanishing(&mu(&[2, 2, 1, 1]), s(&[3, 4])).unwrap(), int(9));
    assert!(count_one_vanishing(&mu(&[2, 2, 1, 1]), s(&[1, 2, 3, 4])).is_err());
}

#[test]
fn two_nonzero_examples() {
    assert_eq!(count_two_nonzero(&mu(&[2, 2, 1, 1]), 3, 4).unwrap(), int(2));
    assert_eq!(count_two_nonzero(&mu(&[1, 1, 2]), 1, 2).unwrap(), int(1));
    assert_eq!(count_two_nonzero(&mu(&[2, 2, 1, 1]), 1, 2).unwrap(), int(0));
    assert!(count_two_nonzero(&mu(&[1, 1, 2]), 2, 2).is_err());
    let v = two_nonzero_structure(4, 3, 4).unwrap();
    assert_eq!(v.rank(), 2);
    assert_eq!(total(&[2, 2, 1, 1], &v), int(2));
}

#[test]
fn zero_identity_examples() {
    let terms = zero_identity_terms(&mu(&[1, 1, 1])).unwrap();
    assert_eq!(terms, vec![(1, rat(1)), (2, rat(-3)), (3, rat(2))]);
    let terms = zero_identity_terms(&mu(&[1, 1])).unwrap();
    assert_eq!(terms, vec![(1, rat(1)), (2, rat(-1))]);
    assert!(zero_identity_value(&mu(&[2, 2, 1, 1])).unwrap().is_zero());
}

#[test]
fn s_one_term_is_the_general_count() {
    for b in [[1u64, 1, 2], [3, 1, 4], [5, 5, 5]] {
        let v = closure(3, &[&[2]]);
        let br = count_closed_form(&mu(&b), &v).unwrap();
        assert_eq!(br.per_s[0].s, 1);
        assert_eq!(br.per_s[0].value, Rational::from_integer(count_general(&mu(&b))));
    }
}

#[test]
fn plan_and_breakdown_agree_including_big_values() {
    let v = closure(6, &[&[1, 2], &[3, 4]]);
    let plan = ClosedFormPlan::new(&v);
    for b in [[1u64, 2, 3, 1, 2, 2], [40, 30, 20, 10, 5, 1], [u32::MAX as u64, 7, 9, 1, 2, 3]] {
        assert_eq!(plan.count_poles(&b).unwrap(), total(&b, &v));
    }
    // large enough that i128 overflows and the big-integer path takes over
    let huge = [u64::MAX / 8; 6];
    assert!(plan.total::<i128>(&huge.map(i128::from)).is_err());
    assert_eq!(plan.count_poles(&huge).unwrap(), total(&huge, &v));
    let counts: Vec<(usize, usize)> = plan.partition_counts().collect();
    assert_eq!(counts, vec![(1, 1), (2, 3), (3, 1)]);
}

#[test]
fn refinement_chain_decreases() {
    let m = mu(&[2, 2, 1, 1]);
    let chain = [
        VanishingStructure::trivial(4).unwrap(),
        closure(4, &[&[1, 2]]),
        closure(4, &[&[1, 2], &[1, 3]]),
        VanishingStructure::identically_zero(4).unwrap(),
    ];
    let values: Vec<Integer> = chain.iter().map(|v| count_closed_form(&m, v).unwrap().total).collect();
    assert_eq!(values, vec![int(12), int(9), int(5), int(0)]);
    for w in chain.windows(2) {
        assert!(check_monotonicity(&m, &w[0], &w[1]).unwrap());
    }
    assert!(check_monotonicity(&m, &chain[1], &chain[0]).is_err());
    assert!(check_monotonicity(&m, &chain[1], &chain[1]).is_err());
}

#[test]
fn degree_fit_examples() {
    let trivial = check_polynomial_degree(&VanishingStructure::trivial(3).unwrap(), 4).unwrap();
    assert_eq!(trivial.total_degree, Some(1));
    assert!(trivial.top_component_nonzero);
    assert_eq!(trivial.per_variable_degree, vec![1, 1, 1]);
    assert_eq!(trivial.held_out_checked, 64 - 4);

    let one = check_polynomial_degree(&closure(3, &[&[3]]), 3).unwrap();
    assert_eq!(one.total_degree, Some(1));

    for n in 2..=5 {
        let r = check_polynomial_degree(&VanishingStructure::trivial(n).unwrap(), n as u64).unwrap();
        assert_eq!(r.total_degree, Some(n - 2));
        assert_eq!(r.per_variable_degree, vec![n - 2; n]);
    }
    assert!(check_polynomial_degree(&VanishingStructure::identically_zero(3).unwrap(), 4).is_err());
    assert!(check_polynomial_degree(&VanishingStructure::trivial(5).unwrap(), 3).is_err());
}

#[test]
fn zero_count_exactly_for_zero_structure_on_admissible_inputs() {
    // Every structure generated by up to two subsets on five poles.
    for g1 in (1u64..31).step_by(2) {
        for g2 in (1u64..31).step_by(2) {
            let v = VanishingStructure::from_generators(
                5,
                &[IndexSubset::from_mask(g1), IndexSubset::from_mask(g2)],
            )
            .unwrap();
            let plan = ClosedFormPlan::new(&v);
            for code in 0..243u32 {
                let b: Vec<u64> = (0..5).map(|i| (code / 3u32.pow(i)) as u64 % 3 + 1).collect();
                let m = mu(&b);
                let n = plan.count(&m).unwrap();
                let admissible = simple_pole_warnings(&m, &v).is_empty();
                if v.is_identically_zero() {
                    assert!(n.is_zero());
                } else if admissible {
                    assert!(n.is_positive(), "b = {b:?}, V = {v}");
                }
            }
        }
    }
}

fn arb_case() -> impl Strategy<Value = (Vec<u64>, Vec<u64>, u64)> {
    (2usize..=6).prop_flat_map(|n| {
        (
            prop::collection::vec(1u64..=5, n),
            prop::collection::vec(1u64..(1u64 << n) - 1, 0..n),
            any::<u64>(),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn closed_form_matches_residue_oracle((b, gens, seed) in arb_case()) {
        let n = b.len();
        let gens: Vec<IndexSubset> = gens.into_iter().map(IndexSubset::from_mask).collect();
        let v = VanishingStructure::from_generators(n, &gens).unwrap();
        let rho = v.realize(seed).unwrap();
        let expected = oracle(&b, &integer_residues(&rho));
        let br = count_closed_form(&mu(&b), &v).unwrap();
        prop_assert_eq!(Rational::from_integer(br.total.clone()), expected);
        let sum: Rational = br.per_s.iter().map(|t| &t.value).sum();
        prop_assert_eq!(Rational::from_integer(br.total.clone()), sum);
        prop_assert_eq!(ClosedFormPlan::new(&v).count(&mu(&b)).unwrap(), br.total);
    }

    #[test]
    fn relabeling_is_equivariant((b, gens, _seed) in arb_case(), rot in 0usize..6) {
        let n = b.len();
        let gens: Vec<IndexSubset> = gens.into_iter().map(IndexSubset::from_mask).collect();
        let v = VanishingStructure::from_generators(n, &gens).unwrap();
        // pole i moves to position perm[i-1]
        let perm: Vec<usize> = (0..n).map(|i| (i + rot) % n + 1).collect();
        let mut moved = vec![0u64; n];
        for (i, &p) in perm.iter().enumerate() {
            moved[p - 1] = b[i];
        }
        let w = v.permuted(&perm).unwrap();
        prop_assert_eq!(total(&b, &v), total(&moved, &w));
    }

    #[test]
    fn special_cases_agree_with_closed_form(b in prop::collection::vec(1u64..=5, 2..=7), pick in any::<u64>()) {
        let n = b.len();
        let m = mu(&b);
        prop_assert_eq!(total(&b, &VanishingStructure::trivial(n).unwrap()), count_general(&m));
        let full = (1u64 << n) - 1;
        let i = IndexSubset::from_mask(pick % (full - 1) + 1);
        prop_assert_eq!(
            total(&b, &VanishingStructure::from_generators(n, &[i]).unwrap()),
            count_one_vanishing(&m, i).unwrap()
        );
        let p = (pick % n as u64) as usize + 1;
        let q = ((pick / 7) % (n as u64 - 1)) as usize + 1;
        let q = if q >= p { q + 1 } else { q };
        prop_assert_eq!(
            total(&b, &two_nonzero_structure(n, p, q).unwrap()),
            count_two_nonzero(&m, p, q).unwrap()
        );
        prop_assert!(zero_identity_value(&m).unwrap().is_zero());
    }
}
