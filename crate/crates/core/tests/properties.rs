use std::sync::Arc;

use dcover::census::{hypertangent_schedule, prop41_bound, telescoping_bruteforce, telescoping_product};
use dcover::linalg::Matrix;
use dcover::macaulay::{
    hilbert_function, koszul_coefficient, regular_sequence_certificate, saturated_linear_forms, GradedIdeal,
};
use dcover::regularity::{check_parameters, generate_instance, random_point, GenConfig, ImposedPoint, Outcome, Reason, Verdict};
use dcover::sqrt_branch::{h_component, sqrt_truncation};
use dcover::subst::linear_change;
use dcover::{quadratic_rank, restrict, FpPoly, LinearSubstitution, Monomial, PrimeField, QPoly, Rationals, VarList};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const P: u32 = 32003;

fn fp() -> PrimeField {
    PrimeField::new(P as u64).unwrap()
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn sparse_monos(n: usize, max_deg: u32, terms: usize, r: &mut ChaCha8Rng) -> Vec<Monomial> {
    (0..terms)
        .map(|_| {
            let d = r.gen_range(0..=max_deg);
            let all = Monomial::all_of_degree(n, d);
            all[r.gen_range(0..all.len())]
        })
        .collect()
}

fn random_fp(vars: &Arc<VarList>, max_deg: u32, terms: usize, r: &mut ChaCha8Rng) -> FpPoly {
    let monos = sparse_monos(vars.len(), max_deg, terms, r);
    FpPoly::from_terms(&fp(), vars, monos.into_iter().map(|m| (m, r.gen_range(0..P))))
}

fn random_q(vars: &Arc<VarList>, max_deg: u32, terms: usize, r: &mut ChaCha8Rng) -> QPoly {
    let monos = sparse_monos(vars.len(), max_deg, terms, r);
    QPoly::from_terms(
        &Rationals,
        vars,
        monos.into_iter().map(|m| (m, BigRational::new(BigInt::from(r.gen_range(-9i64..=9)), BigInt::from(r.gen_range(1i64..=6))))),
    )
}

fn random_form(vars: &Arc<VarList>, d: u32, r: &mut ChaCha8Rng) -> FpPoly {
    FpPoly::from_terms(&fp(), vars, Monomial::all_of_degree(vars.len(), d).into_iter().map(|m| (m, r.gen_range(0..P))))
}

fn random_invertible(n: usize, r: &mut ChaCha8Rng) -> Matrix {
    loop {
        let rows: Vec<Vec<u32>> = (0..n).map(|_| (0..n).map(|_| r.gen_range(0..P)).collect()).collect();
        let m = Matrix::from_rows(&rows, n);
        if m.rank(&fp()) == n {
            return m;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms_fp(seed in any::<u64>()) {
        let mut r = rng(seed);
        let v = VarList::z(3);
        let (a, b, c) = (random_fp(&v, 3, 6, &mut r), random_fp(&v, 3, 6, &mut r), random_fp(&v, 3, 6, &mut r));
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
    }

    #[test]
    fn ring_axioms_q(seed in any::<u64>()) {
        let mut r = rng(seed);
        let v = VarList::z(3);
        let (a, b, c) = (random_q(&v, 3, 5, &mut r), random_q(&v, 3, 5, &mut r), random_q(&v, 3, 5, &mut r));
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
    }

    #[test]
    fn restriction_is_multiplicative(seed in any::<u64>()) {
        let mut r = rng(seed);
        let v = VarList::z(4);
        let a = random_fp(&v, 3, 6, &mut r);
        let b = random_fp(&v, 3, 6, &mut r);
        let img1 = FpPoly::linear(&fp(), &v, &[0, r.gen_range(0..P), r.gen_range(0..P), 0]);
        let img2 = FpPoly::linear(&fp(), &v, &[0, r.gen_range(0..P), r.gen_range(0..P), 0]);
        let s = LinearSubstitution::new(&v, vec![("z1", img1), ("z4", img2)]).unwrap();
        prop_assert_eq!(restrict(&(&a * &b), &s).unwrap(), &restrict(&a, &s).unwrap() * &restrict(&b, &s).unwrap());
    }

    #[test]
    fn quadratic_rank_is_frame_invariant(seed in any::<u64>(), n in 2usize..6) {
        let mut r = rng(seed);
        let v = VarList::z(n);
        let k = r.gen_range(1..=n);
        let mut q = FpPoly::zero(&fp(), &v);
        for _ in 0..k {
            let l = random_form(&v, 1, &mut r);
            q = &q + &(&l * &l).scale(&r.gen_range(1..P));
        }
        let rank = quadratic_rank(&q).unwrap();
        prop_assert!(rank <= k);
        for _ in 0..20 {
            let b = random_invertible(n, &mut r);
            prop_assert_eq!(quadratic_rank(&linear_change(&q, &b).unwrap()).unwrap(), rank);
        }
    }

    #[test]
    fn reduction_commutes_with_arithmetic(seed in any::<u64>()) {
        let mut r = rng(seed);
        let v = VarList::z(3);
        let a = random_q(&v, 3, 5, &mut r);
        let b = random_q(&v, 3, 5, &mut r);
        let f = fp();
        let lhs = (&(&a * &b) + &a).reduce_mod(&f).unwrap();
        let (ap, bp) = (a.reduce_mod(&f).unwrap(), b.reduce_mod(&f).unwrap());
        prop_assert_eq!(lhs, &(&ap * &bp) + &ap);
    }

    #[test]
    fn coordinate_powers_are_regular(seed in any::<u64>(), n in 2usize..5) {
        let mut r = rng(seed);
        let v = VarList::z(n);
        let c = r.gen_range(1..=n);
        let mut slots: Vec<usize> = (0..n).collect();
        for i in 0..c {
            let j = r.gen_range(i..n);
            slots.swap(i, j);
        }
        let degrees: Vec<u32> = (0..c).map(|_| r.gen_range(1..4)).collect();
        let seq: Vec<FpPoly> = (0..c)
            .map(|i| FpPoly::monomial(&fp(), &v, Monomial::var(slots[i]).with_exp(slots[i], degrees[i]), 1))
            .collect();
        let cert = regular_sequence_certificate(&seq, 12).unwrap();
        prop_assert!(cert.is_regular());
        for row in &cert.rows {
            prop_assert_eq!(row.actual as i128, koszul_coefficient(&degrees, n, row.degree));
        }
    }

    #[test]
    fn hilbert_function_drops_when_adding_generators(seed in any::<u64>()) {
        let mut r = rng(seed);
        let v = VarList::z(4);
        let gens: Vec<FpPoly> = (0..3).map(|_| random_form(&v, r.gen_range(1..4), &mut r)).collect();
        let small = GradedIdeal::from_nonzero(fp(), &v, gens[..2].to_vec()).unwrap();
        let large = GradedIdeal::from_nonzero(fp(), &v, gens).unwrap();
        for d in 0..6 {
            prop_assert!(hilbert_function(&large, d) <= hilbert_function(&small, d));
        }
    }

    #[test]
    fn saturated_linear_part_ignores_recombination(seed in any::<u64>()) {
        let mut r = rng(seed);
        let v = VarList::z(4);
        let l = random_form(&v, 1, &mut r);
        let mut gens: Vec<FpPoly> = (0..4).map(|_| &l * &random_form(&v, 1, &mut r)).collect();
        gens.push(random_form(&v, 2, &mut r));
        let ideal = GradedIdeal::from_nonzero(fp(), &v, gens.clone()).unwrap();
        let before = saturated_linear_forms(&ideal, 4);
        let mix = random_invertible(gens.len(), &mut r);
        let mixed: Vec<FpPoly> = (0..gens.len())
            .map(|i| gens.iter().enumerate().fold(FpPoly::zero(&fp(), &v), |acc, (j, g)| &acc + &g.scale(&mix.get(i, j))))
            .collect();
        let after = saturated_linear_forms(&GradedIdeal::from_nonzero(fp(), &v, mixed).unwrap(), 4);
        prop_assert_eq!(before.dimension(), after.dimension());
        prop_assert!(before.spans(&after.basis, &fp()) && after.spans(&before.basis, &fp()));
    }

    #[test]
    fn square_root_identity(seed in any::<u64>(), j in 0u32..=8) {
        let mut r = rng(seed);
        let v = VarList::z(3);
        let mut g = random_fp(&v, 8, 30, &mut r);
        g.add_term(Monomial::ONE, fp().sub_u32(1, g.constant_term()));
        let root = sqrt_truncation(&g, j).unwrap();
        let residual = &g - &(&root * &root);
        for d in 0..=j {
            prop_assert!(residual.homogeneous_component(d).is_zero());
        }
    }

    #[test]
    fn squares_have_no_residual(seed in any::<u64>()) {
        let mut r = rng(seed);
        let v = VarList::z(3);
        let mut s = random_fp(&v, 3, 8, &mut r);
        s.add_term(Monomial::ONE, fp().sub_u32(1, s.constant_term()));
        let g = &s * &s;
        let d = s.degree().unwrap();
        for j in 0..8 {
            let h = h_component(&g, j).unwrap();
            if j >= d {
                prop_assert!(h.is_zero());
            } else {
                prop_assert_eq!(h, s.homogeneous_component(j + 1).scale(&2));
            }
        }
    }

    #[test]
    fn square_root_commutes_with_reduction(seed in any::<u64>(), j in 0u32..=6) {
        let mut r = rng(seed);
        let v = VarList::z(3);
        let mut g = random_q(&v, 6, 12, &mut r);
        g.add_term(Monomial::ONE, &BigRational::from_integer(1.into()) - g.constant_term());
        let over_q = sqrt_truncation(&g, j).unwrap().reduce_mod(&fp()).unwrap();
        let over_p = sqrt_truncation(&g.reduce_mod(&fp()).unwrap(), j).unwrap();
        prop_assert_eq!(over_q, over_p);
    }

    #[test]
    fn prop41_is_monotone(n in 3u64..30, degs in prop::collection::vec(2u64..8, 1..4), bump in 0usize..4) {
        prop_assume!(degs.len() as u64 <= n);
        let base = prop41_bound(n, &degs).unwrap();
        prop_assert!(prop41_bound(n + 1, &degs).unwrap() >= base);
        let mut more = degs.clone();
        let i = bump % more.len();
        more[i] += 1;
        prop_assert!(prop41_bound(n, &more).unwrap() >= base);
    }

    #[test]
    fn outcome_combination_is_worst(a in 0u8..3, b in 0u8..3) {
        let mk = |k: u8| match k {
            0 => Outcome::pass(),
            1 => Outcome::inconclusive(Reason::DCap, "cap"),
            _ => Outcome::fail(dcover::regularity::Witness::LinearSpan { forms: vec!["z1".into()] }),
        };
        let v = |k: u8| [Verdict::Pass, Verdict::Inconclusive, Verdict::Fail][k as usize];
        prop_assert_eq!(mk(a).and(mk(b)).verdict, v(a.max(b)));
    }

    #[test]
    fn generator_honours_imposed_points(seed in any::<u64>(), flags in prop::collection::vec(any::<bool>(), 0..5)) {
        let mut r = rng(seed);
        let f = fp();
        let imposed: Vec<ImposedPoint> =
            flags.iter().map(|&on_branch| ImposedPoint { coords: random_point(&f, 5, &mut r), on_branch }).collect();
        let cfg = GenConfig { big_m: 4, m: 3, l: 2, p: P, toy: true, seed, imposed: imposed.clone() };
        let inst = generate_instance(&cfg, &mut rng(seed)).unwrap();
        for ip in &imposed {
            prop_assert_eq!(inst.f.evaluate(&ip.coords), 0);
            prop_assert_eq!(inst.g.evaluate(&ip.coords), u32::from(!ip.on_branch));
        }
        prop_assert_eq!(inst.to_json(), generate_instance(&cfg, &mut rng(seed)).unwrap().to_json());
    }

    #[test]
    fn strict_parameters_are_exactly_the_admissible_ones(big_m in 3u32..16, m in 1u32..12, l in 1u32..12) {
        let ok = check_parameters(big_m, m, l, P, false).is_ok();
        prop_assert_eq!(ok, m >= 3 && l >= 2 && big_m >= 6 && m + l == big_m + 1);
    }
}

#[test]
fn schedules_cover_every_codimension() {
    for big_m in 6u64..=30 {
        for m in 3..=big_m - 1 {
            let l = big_m + 1 - m;
            if l < 2 {
                continue;
            }
            let s = hypertangent_schedule(m, l).unwrap();
            assert_eq!(s.len() as u64, big_m - 1);
            for (i, &k) in s.ks.iter().enumerate() {
                assert!(s.codim_base_set(k) >= i as u64 + 1, "(m, l) = ({m}, {l}) position {}", i + 1);
            }
        }
    }
}

#[test]
fn telescoping_matches_bruteforce() {
    for big_m in 6u64..=30 {
        for m in 3..=big_m - 1 {
            let l = big_m + 1 - m;
            if l < 2 {
                continue;
            }
            let t = telescoping_product(m, l).unwrap();
            let ks = hypertangent_schedule(m, l).unwrap().ks;
            assert_eq!(t.exact, telescoping_bruteforce(&ks[4..]), "(m, l) = ({m}, {l})");
        }
    }
}
