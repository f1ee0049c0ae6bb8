use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::linalg::Matrix;
use crate::poly::{FpPoly, VarList};
use crate::quadratic::quadratic_rank;
use crate::subst::linear_change;
use crate::text::parse_poly;
use crate::PrimeField;

fn field() -> PrimeField {
    PrimeField::new(32003).unwrap()
}

fn vars(big_m: u32) -> Arc<VarList> {
    VarList::z(big_m as usize + 1)
}

fn poly(big_m: u32, text: &str) -> FpPoly {
    parse_poly(&field(), &vars(big_m), text).unwrap()
}

/// Random homogeneous components of degrees `lo..=hi`.
fn tail(big_m: u32, lo: u32, hi: u32, rng: &mut ChaCha8Rng) -> FpPoly {
    let full = random_poly(&field(), &vars(big_m), hi, rng);
    let mut out = FpPoly::zero(&field(), &vars(big_m));
    for (m, &c) in full.terms() {
        if m.degree() >= lo {
            out.add_term(*m, c);
        }
    }
    out
}

fn add(a: &FpPoly, b: &FpPoly) -> FpPoly {
    let mut out = a.clone();
    for (m, &c) in b.terms() {
        out.add_term(*m, c);
    }
    out
}

fn instance(big_m: u32, m: u32, l: u32, f: FpPoly, g: FpPoly) -> DoubleCoverInstance {
    let toy = big_m < 6 || m + l != big_m + 1;
    DoubleCoverInstance::new(big_m, m, l, field(), f, g, toy).unwrap()
}

fn origin(big_m: u32) -> Vec<u32> {
    vec![0; big_m as usize + 1]
}

fn generic(big_m: u32, m: u32, l: u32, seed: u64, branch: &[bool]) -> DoubleCoverInstance {
    let toy = big_m < 6 || m + l != big_m + 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let imposed = branch
        .iter()
        .map(|&on_branch| ImposedPoint { coords: random_point(&field(), big_m as usize + 1, &mut rng), on_branch })
        .collect();
    let cfg = GenConfig { big_m, m, l, p: 32003, toy, seed, imposed };
    generate_instance(&cfg, &mut rng).unwrap()
}

fn opts(lambda_samples: usize) -> CheckOptions {
    CheckOptions { lambda_samples, hyperplanes: 2, ..CheckOptions::default() }
}

fn entry(r: &PointReport, c: ConditionId) -> &ConditionEntry {
    r.entries.iter().find(|e| e.condition == c).unwrap_or_else(|| panic!("no {c} entry in {r:?}"))
}

fn assert_no_fail(r: &RegularityReport) {
    r.validate().unwrap();
    for (p, e) in r.entries() {
        assert!(p.error.is_none(), "point error {:?}", p.error);
        assert_ne!(e.verdict(), Verdict::Fail, "point {} {}: {:?}", p.index, e.condition, e.outcome);
        if e.verdict() == Verdict::Inconclusive {
            assert!(matches!(e.outcome.reason, Some(Reason::DCap | Reason::ComponentProbe)), "{:?}", e.outcome);
        }
    }
}

#[test]
fn classify_examples() {
    let f = poly(6, "z7 + z1^2 + z2*z3 + z4^3");
    let ctx = classify_point(&instance(6, 3, 4, f.clone(), poly(6, "1 + z1 + z5^2")), &origin(6)).unwrap();
    assert_eq!((ctx.branch, ctx.singular), (BranchFlag::OutsideBranch, SingularFlag::Smooth));
    assert_eq!(ctx.g.constant_term(), 1);

    let ctx = classify_point(&instance(6, 3, 4, f.clone(), poly(6, "z1 + z2^2 + z3*z4")), &origin(6)).unwrap();
    assert_eq!((ctx.branch, ctx.singular), (BranchFlag::OnBranch, SingularFlag::Smooth));
    let n = ctx.nvars();
    let mut unit_last = vec![0; n];
    unit_last[n - 1] = 1;
    let mut unit_first = vec![0; n];
    unit_first[0] = 1;
    assert_eq!(ctx.q(1).linear_coeffs(), unit_last);
    assert_eq!(ctx.w(1).linear_coeffs(), unit_first);

    let quad = "z1^2 + z2^2 + z3^2 + z4^2 + z5^2 + z6^2 + z7^2 + z1*z2*z3";
    let ctx = classify_point(&instance(6, 3, 4, poly(6, quad), poly(6, "3 + z1")), &origin(6)).unwrap();
    assert_eq!((ctx.branch, ctx.singular), (BranchFlag::OutsideBranch, SingularFlag::Type1));
    assert_eq!(ctx.g.constant_term(), 1);

    let ctx = classify_point(&instance(6, 3, 4, f.clone(), poly(6, "5*z7 + z1^2")), &origin(6)).unwrap();
    assert_eq!((ctx.branch, ctx.singular), (BranchFlag::OnBranch, SingularFlag::Type2));
}

#[test]
fn classify_errors() {
    let inst = instance(6, 3, 4, poly(6, "z7 + 1 + z1^3"), poly(6, "1 + z1"));
    assert!(matches!(classify_point(&inst, &origin(6)), Err(crate::Error::PointNotOnHypersurface)));
    let inst = instance(6, 3, 4, poly(6, "z1^2 + z2^2 + z3^3"), poly(6, "1 + z1"));
    assert!(classify_point(&inst, &origin(6)).is_err());
    let inst = instance(6, 3, 4, poly(6, "z1^2 + z2^2 + z3^3"), poly(6, "z1"));
    assert!(classify_point(&inst, &origin(6)).is_err());
    let inst = instance(6, 3, 4, poly(6, "z7 + z1^2"), poly(6, "1"));
    assert!(classify_point(&inst, &[0, 0, 0]).is_err());
    let report = run_full_report(&inst, &[vec![1, 0, 0, 0, 0, 0, 0]], &opts(0));
    assert!(report.points[0].error.is_some());
    assert_eq!(report.verdict(), Verdict::Inconclusive);
}

#[test]
fn hyperplane_examples() {
    let z2 = vec![1, 0, 0, 0, 0];
    let z2_z3 = vec![1, 1, 0, 0, 0];
    let zero = vec![0; 5];
    let class = |lambda: &Vec<u32>, y| classify_hyperplane(&HyperplaneClass { lambda: lambda.clone(), y_coefficient: y });
    assert_eq!(class(&zero, 1).unwrap(), HyperplaneKind::NotPulledBack);
    assert_eq!(class(&z2, 0).unwrap(), HyperplaneKind::PulledBack);
    assert_eq!(class(&z2_z3, 1).unwrap(), HyperplaneKind::NotPulledBack);
    assert!(class(&zero, 0).is_err());
}

#[test]
fn generic_points_have_no_fail() {
    let inst = generic(6, 3, 4, 11, &[false, true]);
    let report = run_full_report(&inst, &inst.points, &opts(4));
    assert_no_fail(&report);
    assert_eq!(report.points[0].branch, Some(BranchFlag::OutsideBranch));
    assert_eq!(report.points[1].branch, Some(BranchFlag::OnBranch));
    let conditions: Vec<ConditionId> = report.entries().map(|(_, e)| e.condition).collect();
    use ConditionId::*;
    assert_eq!(conditions, vec![R1_1, R1_2, R1_3, R2_1, R2_2, R2_3]);
}

#[test]
fn toy_points_certify_fully() {
    let inst = generic(5, 3, 3, 5, &[false, false]);
    let report = run_full_report(&inst, &inst.points, &opts(6));
    report.validate().unwrap();
    for (p, e) in report.entries() {
        assert_eq!(e.verdict(), Verdict::Pass, "point {} {}: {:?}", p.index, e.condition, e.outcome);
    }
}

#[test]
fn smallest_toy_has_no_fail() {
    let inst = generic(4, 3, 2, 5, &[false, false]);
    let report = run_full_report(&inst, &inst.points, &opts(6));
    assert_no_fail(&report);
    for (_, e) in report.entries() {
        if e.condition == ConditionId::R1_1 {
            assert_eq!(e.verdict(), Verdict::Pass);
        }
    }
    let on = generic(4, 3, 2, 5, &[true]);
    let r = check_point(&on, 0, &on.points[0], &opts(0));
    let e = entry(&r, ConditionId::R2_1);
    assert!(matches!(e.outcome.witness, Some(Witness::Rank { rank: 3, required: 4, .. })));
}

#[test]
fn exact_square_fails_r13() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let h = add(&poly(6, "1"), &tail(6, 1, 4, &mut rng));
    let f = add(&poly(6, "z7"), &tail(6, 2, 3, &mut rng));
    let inst = instance(6, 3, 4, f, h.pow(2));
    let report = run_full_report(&inst, &[origin(6)], &opts(2));
    report.validate().unwrap();
    let e = entry(&report.points[0], ConditionId::R1_3);
    assert_eq!(e.verdict(), Verdict::Fail);
    assert!(matches!(e.outcome.witness, Some(Witness::ExactSquare { .. })), "{:?}", e.outcome);
    assert_eq!(report.verdict(), Verdict::Fail);
}

#[test]
fn exact_square_fails_r13_for_quartic() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let h = add(&poly(6, "1"), &tail(6, 1, 3, &mut rng));
    let f = add(&poly(6, "z7"), &tail(6, 2, 4, &mut rng));
    let inst = instance(6, 4, 3, f, h.pow(2));
    let r = check_point(&inst, 0, &origin(6), &opts(1));
    let e = entry(&r, ConditionId::R1_3);
    assert_eq!(e.verdict(), Verdict::Fail, "{:?}", e.outcome);
}

fn rank_three_instance(rng: &mut ChaCha8Rng) -> DoubleCoverInstance {
    let f = add(&poly(6, "z7"), &tail(6, 2, 3, rng));
    let g = add(&poly(6, "z1 + z2^2 + z3^2 - z4^2 + z1*z5 + 4*z7*z2 + z7^2"), &tail(6, 3, 8, rng));
    instance(6, 3, 4, f, g)
}

#[test]
fn rank_three_branch_form_fails_r21() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let inst = rank_three_instance(&mut rng);
    let r = check_point(&inst, 0, &origin(6), &opts(2));
    assert_eq!(r.branch, Some(BranchFlag::OnBranch));
    let e = entry(&r, ConditionId::R2_1);
    assert_eq!(e.verdict(), Verdict::Fail);
    match &e.outcome.witness {
        Some(Witness::Rank { form, vars, polynomial, rank, required }) => {
            assert_eq!(form, "w2bar");
            assert_eq!((*rank, *required), (3, 4));
            let vl = VarList::new(vars.clone()).unwrap();
            let p = parse_poly(&field(), &vl, polynomial).unwrap();
            assert_eq!(quadratic_rank(&p).unwrap(), 3);
        }
        other => panic!("unexpected witness {other:?}"),
    }
}

#[test]
fn vanishing_q2_q3_fails_r11() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let f = add(&poly(6, "z7"), &tail(6, 4, 4, &mut rng));
    let g = add(&poly(6, "1"), &tail(6, 1, 6, &mut rng));
    let inst = instance(6, 4, 3, f, g);
    let r = check_point(&inst, 0, &origin(6), &opts(1));
    let e = entry(&r, ConditionId::R1_1);
    assert_eq!(e.verdict(), Verdict::Fail);
    match &e.outcome.witness {
        Some(Witness::DefectDegree { degree, actual, expected, polynomials, .. }) => {
            assert_eq!(*degree, 2);
            assert!(*actual as i64 > *expected);
            assert_eq!(polynomials[1], "0");
        }
        other => panic!("unexpected witness {other:?}"),
    }
}

#[test]
fn type1_diagonal_passes() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let f = add(&poly(4, "z1^2 + 2*z2^2 + 3*z3^2 + z4^2 - z5^2"), &tail(4, 3, 3, &mut rng));
    let g = add(&poly(4, "1"), &tail(4, 1, 4, &mut rng));
    let inst = instance(4, 3, 2, f, g);
    let r = check_point(&inst, 0, &origin(4), &opts(5));
    assert_eq!(r.singular, Some(SingularFlag::Type1));
    assert_eq!(r.entries.len(), 1);
    let e = entry(&r, ConditionId::R1_4);
    assert_eq!(e.verdict(), Verdict::Pass, "{:?}", e.samples);
    assert!(e.samples.iter().all(|s| s.kind != SampleKind::Zero));
}

#[test]
fn type2_degenerate_quadric_fails_r24() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let f = add(&poly(4, "z5 + z1^2 + z2^2 + z3^2 + z5*z1"), &tail(4, 3, 3, &mut rng));
    let g = add(&poly(4, "2*z5 + z1^2 + z2^2 + z3^2 - z4^2"), &tail(4, 3, 4, &mut rng));
    let inst = instance(4, 3, 2, f, g);
    let r = check_point(&inst, 0, &origin(4), &opts(2));
    assert_eq!(r.singular, Some(SingularFlag::Type2));
    let e = entry(&r, ConditionId::R2_4);
    assert_eq!(e.verdict(), Verdict::Fail);
    match &e.outcome.witness {
        Some(Witness::Rank { form, rank, required, .. }) => {
            assert_eq!(form, "q2bar");
            assert_eq!((*rank, *required), (3, 4));
        }
        other => panic!("unexpected witness {other:?}"),
    }
}

#[test]
fn type2_full_rank_has_no_fail() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let f = add(&poly(4, "z5 + z1^2 + z2^2 + z3^2 - z4^2"), &tail(4, 3, 3, &mut rng));
    let g = add(&poly(4, "-z5 + z1*z2 + z3^2 + 2*z4^2 + z2^2"), &tail(4, 3, 4, &mut rng));
    let inst = instance(4, 3, 2, f, g);
    let report = run_full_report(&inst, &[origin(4)], &opts(4));
    assert_eq!(report.points[0].singular, Some(SingularFlag::Type2));
    assert_no_fail(&report);
}

#[test]
fn high_degree_q_uses_h_2l() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let f = add(&poly(6, "z1^2 + z2^2 + z3^2 + z4^2 + z5^2 + z6^2 + z7^2"), &tail(6, 3, 5, &mut rng));
    let g = add(&poly(6, "1"), &tail(6, 1, 4, &mut rng));
    let inst = instance(6, 5, 2, f, g);
    let r = check_point(&inst, 0, &origin(6), &opts(0));
    let e = entry(&r, ConditionId::R1_4);
    let s = &e.samples[0];
    let seq = s
        .evidence
        .iter()
        .find_map(|ev| match ev {
            Evidence::Sequence { sequence, .. } => Some(sequence.clone()),
            _ => None,
        })
        .unwrap();
    assert_eq!(seq, vec!["lambda", "q2", "q3", "q4", "h3", "h4"]);
    assert_ne!(e.verdict(), Verdict::Fail, "{:?}", e.outcome);
}

#[test]
fn empty_point_list_passes() {
    let inst = generic(6, 3, 4, 1, &[]);
    let report = run_full_report(&inst, &[], &opts(2));
    assert_eq!(report.verdict(), Verdict::Pass);
    assert!(report.points.is_empty());
    assert!(report.summary.first_fail.is_none());
    report.validate().unwrap();
}

#[test]
fn one_failing_point_fails_report() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let inst = rank_three_instance(&mut rng);
    let mut points = sample_points(&inst, 2, &mut rng).unwrap();
    points.insert(1, origin(6));
    let report = run_full_report(&inst, &points, &opts(1));
    assert_eq!(report.verdict(), Verdict::Fail);
    let first = report.summary.first_fail.clone().unwrap();
    assert_eq!((first.point, first.condition), (1, ConditionId::R2_1));
    assert!(matches!(first.witness, Some(Witness::Rank { rank: 3, .. })));
    assert_eq!(report.summary.fail, 1);
}

#[test]
fn deterministic_lambda_suite_is_enumerated() {
    let inst = generic(6, 3, 4, 2, &[true]);
    let r = check_point(&inst, 0, &inst.points[0], &opts(3));
    let e = entry(&r, ConditionId::R2_1);
    let kinds: Vec<SampleKind> = e.samples.iter().map(|s| s.kind).collect();
    let mut expected = vec![SampleKind::Zero];
    expected.extend(std::iter::repeat(SampleKind::Coordinate).take(5));
    expected.push(SampleKind::AllOnes);
    expected.extend(std::iter::repeat(SampleKind::Random).take(3));
    assert_eq!(kinds, expected);
    assert_eq!(e.samples[0].form, "0");
    let coords: Vec<&str> = e.samples[1..6].iter().map(|s| s.form.as_str()).collect();
    assert_eq!(coords, vec!["z2", "z3", "z4", "z5", "z6"]);
    let sampled = e.sampled.clone().unwrap();
    assert_eq!((sampled.deterministic, sampled.random), (7, 3));
}

#[test]
fn more_lambdas_never_improve_a_verdict() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let planted = rank_three_instance(&mut rng);
    let generic_inst = generic(4, 3, 2, 12, &[true, false]);
    let cases = [(planted, vec![origin(6)]), (generic_inst.clone(), generic_inst.points.clone())];
    for (inst, points) in cases {
        for pt in &points {
            let small = check_point(&inst, 0, pt, &opts(2));
            let large = check_point(&inst, 0, pt, &opts(6));
            for (a, b) in small.entries.iter().zip(&large.entries) {
                assert_eq!(a.condition, b.condition);
                assert!(b.verdict() >= a.verdict());
                assert_eq!(a.samples[..], b.samples[..a.samples.len()]);
            }
        }
    }
}

fn random_invertible(n: usize, rng: &mut ChaCha8Rng) -> Matrix {
    loop {
        let rows: Vec<Vec<u32>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(0..32003)).collect()).collect();
        let m = Matrix::from_rows(&rows, n);
        if m.rank(&field()) == n {
            return m;
        }
    }
}

fn verdicts(r: &PointReport) -> Vec<(ConditionId, Verdict)> {
    r.entries.iter().map(|e| (e.condition, e.verdict())).collect()
}

#[test]
fn verdicts_are_frame_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let planted = rank_three_instance(&mut rng);
    let base_inst = generic(4, 3, 2, 14, &[false, true]);
    let f = field();
    let cases = [(base_inst.clone(), base_inst.points.clone(), 4), (planted, vec![origin(6)], 1)];
    for (inst, points, changes) in cases {
        let n = inst.nvars();
        let base: Vec<_> = points.iter().map(|pt| verdicts(&check_point(&inst, 0, pt, &opts(3)))).collect();
        for _ in 0..changes {
            let a = random_invertible(n, &mut rng);
            let inv = a.inverse(&f).unwrap();
            let moved = DoubleCoverInstance::new(
                inst.big_m,
                inst.m,
                inst.l,
                f,
                linear_change(&inst.f, &a).unwrap(),
                linear_change(&inst.g, &a).unwrap(),
                inst.toy,
            )
            .unwrap();
            for (pt, want) in points.iter().zip(&base) {
                let col = Matrix::from_rows(&pt.iter().map(|&x| vec![x]).collect::<Vec<_>>(), 1);
                let y: Vec<u32> = inv.mul(&col, &f).to_rows().into_iter().map(|r| r[0]).collect();
                assert_eq!(&verdicts(&check_point(&moved, 0, &y, &opts(3))), want);
            }
        }
    }
}

#[test]
fn reports_are_deterministic_and_serializable() {
    let inst = generic(4, 3, 2, 15, &[false, true]);
    let a = run_full_report(&inst, &inst.points, &opts(3));
    let b = run_full_report(&inst, &inst.points, &opts(3));
    let ja = serde_json::to_string_pretty(&a).unwrap();
    assert_eq!(ja, serde_json::to_string_pretty(&b).unwrap());
    let back: RegularityReport = serde_json::from_str(&ja).unwrap();
    assert_eq!(back, a);
}

#[test]
fn generator_imposes_points() {
    let inst = generic(6, 3, 4, 16, &[true, false, false]);
    assert_eq!(inst.points.len(), 3);
    for (i, pt) in inst.points.iter().enumerate() {
        assert_eq!(inst.f.evaluate(pt), 0);
        assert_eq!(inst.g.evaluate(pt), u32::from(i > 0));
    }
    let again = generic(6, 3, 4, 16, &[true, false, false]);
    assert_eq!(inst.to_json(), again.to_json());
    let parsed = DoubleCoverInstance::from_json(&inst.to_json()).unwrap();
    assert_eq!(parsed.f, inst.f);
    assert_eq!(parsed.points, inst.points);
}

#[test]
fn sampled_points_lie_on_q() {
    let inst = generic(6, 3, 4, 17, &[]);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let pts = sample_points(&inst, 10, &mut rng).unwrap();
    assert_eq!(pts.len(), 10);
    assert!(pts.iter().all(|p| inst.f.evaluate(p) == 0));
}

#[test]
fn parameters_are_validated() {
    assert!(check_parameters(6, 2, 5, 32003, false).is_err());
    assert!(check_parameters(6, 3, 1, 32003, false).is_err());
    assert!(check_parameters(6, 3, 3, 32003, false).is_err());
    assert!(check_parameters(5, 3, 3, 32003, false).is_err());
    assert!(check_parameters(6, 3, 4, 7, false).is_err());
    assert!(check_parameters(6, 3, 4, 32002, false).is_err());
    assert!(check_parameters(6, 3, 4, 32003, false).unwrap().is_empty());
    assert!(!check_parameters(4, 3, 2, 32003, true).unwrap().is_empty());
}
