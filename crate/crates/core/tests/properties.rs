use bellrelax::bilocality::{min_bilocality, BilocalProgram, Grid, ScanOptions};
use bellrelax::format::DistributionFile;
use bellrelax::functionals::{bilocal_ij, chsh, chsh_max, i3322, relabeling_group};
use bellrelax::lp::programs::max_l1_lp;
use bellrelax::lp::{minimize_linear, minimize_max_l1, Status};
use bellrelax::matrix::Matrix;
use bellrelax::measures::{
    causal_influence_functionals, min_causal_influence, min_communication, InfluenceVariant, MdProgram, MdTarget,
};
use bellrelax::num::{Rational, Scalar};
use bellrelax::polytope::{enumerate_dual_vertices, evaluate_closed_form};
use bellrelax::quantum::{bilocal_distribution, chsh_distribution, double_singlet_xyz, i3322_mixture};
use bellrelax::sampling::{random_bilocal, random_local, random_nonsignalling_chsh};
use bellrelax::scenario::{
    build_response_matrix, enumerate_strategies, CausalModel, Distribution, Intervention, ScenarioSpec, Variant,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

fn zero() -> Rational {
    Rational::from_integer(0)
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn ns_point(seed: u64) -> Distribution<Rational> {
    random_nonsignalling_chsh(&mut rng(seed)).unwrap()
}

fn local_point(seed: u64) -> Distribution<Rational> {
    random_local(&ScenarioSpec::chsh(), 3, &mut rng(seed)).unwrap()
}

fn influence(p: &Distribution<Rational>, v: InfluenceVariant) -> Rational {
    min_causal_influence(p, v).unwrap().value
}

fn md(p: &Distribution<Rational>) -> Rational {
    MdProgram::new(&MdTarget::Distribution(p.clone()), None).unwrap().solve().unwrap().value
}

fn variants() -> [Variant; 5] {
    [
        Variant::Lhv,
        Variant::InputSignalling,
        Variant::OutcomeSignalling,
        Variant::MessageCommunication,
        Variant::MeasurementDependence,
    ]
}

#[test]
fn response_columns_are_deterministic() {
    for v in variants() {
        let sc = ScenarioSpec::chsh();
        let space = enumerate_strategies(&CausalModel::new(v, sc.clone()).unwrap()).unwrap();
        let t = build_response_matrix::<Rational>(&space, None).unwrap();
        let one = Rational::from_integer(1);
        for s in 0..t.cols() {
            let col = t.column(s);
            assert!(col.iter().all(|e| *e == zero() || *e == one));
            if v != Variant::MeasurementDependence {
                for k in 0..sc.num_input_tuples() {
                    let ones = (0..sc.num_output_tuples()).filter(|&o| col[k * sc.num_output_tuples() + o] == one).count();
                    assert_eq!(ones, 1, "{v:?} strategy {s} inputs {k}");
                }
            }
        }
        let uniform = vec![q(1, t.cols() as i64); t.cols()];
        let p = t.mul_vec(&uniform);
        if v != Variant::MeasurementDependence {
            Distribution::new(sc, p).unwrap();
        }
    }
}

#[test]
fn consistent_interventions_change_nothing() {
    let sc = ScenarioSpec::chsh();
    for (variant, make) in [
        (Variant::InputSignalling, (|v| Intervention::Input { value: v }) as fn(usize) -> Intervention),
        (Variant::OutcomeSignalling, |v| Intervention::Outcome { value: v }),
    ] {
        let space = enumerate_strategies(&CausalModel::new(variant, sc.clone()).unwrap()).unwrap();
        let t = build_response_matrix::<Rational>(&space, None).unwrap();
        for value in 0..2 {
            let iv = make(value);
            let ti = build_response_matrix::<Rational>(&space, Some(&iv)).unwrap();
            for s in 0..space.len() {
                for k in 0..sc.num_input_tuples() {
                    let inp = sc.input_tuple(k);
                    let out = space.respond(s, &inp, None);
                    let forced = match iv {
                        Intervention::Input { value } => inp[0] == value,
                        Intervention::Outcome { value } => out[0] == value,
                    };
                    if forced {
                        for o in 0..sc.num_output_tuples() {
                            let j = k * sc.num_output_tuples() + o;
                            assert_eq!(t[(j, s)], ti[(j, s)]);
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn max_l1_dimensions() {
    for (l, k, m, n) in [(1, 2, 3, 4), (2, 3, 2, 5), (3, 1, 4, 2)] {
        let a = Matrix::<Rational>::zeros(m, n);
        let ms: Vec<Matrix<Rational>> = (0..l).map(|_| Matrix::zeros(k, n)).collect();
        let lp = max_l1_lp(&a, &vec![zero(); m], &ms).unwrap();
        assert_eq!(lp.phi.rows(), l + 2 * l * k + 2 * m + 2);
        assert_eq!(lp.phi.cols(), 1 + l * k + n);
    }
}

#[test]
fn lhv_contains_every_chsh_local_point() {
    let sc = ScenarioSpec::chsh();
    let space = enumerate_strategies(&CausalModel::new(Variant::Lhv, sc).unwrap()).unwrap();
    let t = build_response_matrix::<Rational>(&space, None).unwrap();
    let c = vec![zero(); space.len()];
    let mut checked = 0;
    let mut seed = 0;
    while checked < 50 {
        seed += 1;
        let p = ns_point(seed);
        if chsh_max(&p).unwrap() > zero() {
            continue;
        }
        assert_eq!(minimize_linear(&t, p.entries(), &c).unwrap().status, Status::Optimal);
        checked += 1;
    }
}

#[test]
fn ray_exclusion_is_sound() {
    let vs = causal_influence_functionals(&ScenarioSpec::chsh(), InfluenceVariant::XToB).unwrap();
    for seed in 0..20 {
        let p = ns_point(seed);
        let (best, _) = evaluate_closed_form(&vs, p.entries()).unwrap();
        for v in &vs.vertices {
            for r in &vs.rays {
                let moved: Vec<Rational> = v.iter().zip(r).map(|(a, b)| a.clone() + q(1000, 1) * b.clone()).collect();
                let val = moved.iter().zip(p.entries()).fold(zero(), |acc, (a, b)| acc + a.clone() * b.clone());
                assert!(val <= best);
            }
        }
    }
}

#[test]
fn windows_shrink_when_fixing_coordinates() {
    let p = double_singlet_xyz().unwrap();
    let prog = BilocalProgram::new(&p).unwrap();
    let free = prog.free_parameters().to_vec();
    let (lo0, hi0) = prog.window(free[1], &[]).unwrap().unwrap();
    let (l, h) = prog.window(free[0], &[]).unwrap().unwrap();
    for v in [l.clone(), (l.clone() + h.clone()) / q(2, 1), h] {
        if let Some((lo, hi)) = prog.window(free[1], &[(free[0], v)]).unwrap() {
            assert!(lo >= lo0 && hi <= hi0 && lo <= hi);
        }
    }
}

#[test]
fn chsh_of_werner_family_is_affine() {
    let f = chsh().convert(|r| r.to_f64());
    let vals: Vec<f64> = [0.2, 0.5, 0.9].iter().map(|&v| f.evaluate(&chsh_distribution(v).unwrap()).unwrap()).collect();
    let s1 = (vals[1] - vals[0]) / 0.3;
    let s2 = (vals[2] - vals[1]) / 0.4;
    assert!((s1 - s2).abs() < 1e-12);
    assert!((s1 - std::f64::consts::SQRT_2 / 2.0).abs() < 1e-12);
}

#[test]
fn zero_scans_return_factorizing_models() {
    for k in [0, 3, 7, 14] {
        let p = bilocal_distribution(&q(k, 20)).unwrap();
        let prog = BilocalProgram::new(&p).unwrap();
        let r = min_bilocality(&p, &Grid::Uniform(9), &ScanOptions::default()).unwrap();
        assert_eq!(r.minimum, zero());
        assert_eq!(prog.a.mul_vec(&r.q), p.entries().to_vec());
        assert_eq!(prog.factorization_residual(&r.q), zero());
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, ..ProptestConfig::default() })]

    #[test]
    fn measures_vanish_on_local_points(seed in any::<u64>()) {
        let p = local_point(seed);
        for v in [InfluenceVariant::XToB, InfluenceVariant::AToB] {
            prop_assert_eq!(influence(&p, v), zero());
        }
        prop_assert_eq!(min_communication(&p).unwrap().value, zero());
        let prog = MdProgram::new(&MdTarget::Distribution(p), None).unwrap();
        prop_assert_eq!(prog.solve().unwrap().value, zero());
        prop_assert_eq!(prog.solve_hall().unwrap().value, zero());
    }

    #[test]
    fn bilocal_points_have_zero_at_true_marginal(seed in any::<u64>()) {
        let (p, qa) = random_bilocal(&ScenarioSpec::bilocal(2, 2, 4), &mut rng(seed)).unwrap();
        let prog = BilocalProgram::new(&p).unwrap();
        let nu: Vec<Rational> = prog.free_parameters().iter().map(|&c| qa[c].clone()).collect();
        let pt = prog.solve_at(&nu).unwrap().unwrap();
        prop_assert_eq!(pt.value, zero());
        prop_assert_eq!(pt.gap, Some(zero()));
    }

    #[test]
    fn rational_duality_gap_is_zero(seed in any::<u64>()) {
        let p = ns_point(seed);
        for v in [InfluenceVariant::XToB, InfluenceVariant::AToB] {
            let r = min_causal_influence(&p, v).unwrap();
            prop_assert_eq!(r.gap, Some(zero()));
            prop_assert!(r.dual_feasible);
        }
        let r = min_communication(&p).unwrap();
        prop_assert_eq!(r.gap, Some(zero()));
        let r = MdProgram::new(&MdTarget::Distribution(p), None).unwrap().solve().unwrap();
        prop_assert_eq!(r.gap, Some(zero()));
    }

    #[test]
    fn float_matches_rational(seed in any::<u64>()) {
        let p = ns_point(seed);
        let pf = p.to_f64();
        for v in [InfluenceVariant::XToB, InfluenceVariant::AToB] {
            let d = min_causal_influence(&pf, v).unwrap().value - influence(&p, v).to_f64();
            prop_assert!(d.abs() <= 1e-7);
        }
        let d = min_communication(&pf).unwrap().value - min_communication(&p).unwrap().value.to_f64();
        prop_assert!(d.abs() <= 1e-7);
        let mf = MdProgram::new(&MdTarget::Distribution(pf), None).unwrap().solve().unwrap().value;
        prop_assert!((mf - md(&p).to_f64()).abs() <= 1e-7);
    }

    #[test]
    fn closed_form_equals_lp(seed in any::<u64>()) {
        let vs = causal_influence_functionals(&ScenarioSpec::chsh(), InfluenceVariant::XToB).unwrap();
        let p = ns_point(seed);
        let (v, _) = evaluate_closed_form(&vs, p.entries()).unwrap();
        prop_assert_eq!(&v, &influence(&p, InfluenceVariant::XToB));
        let want = chsh_max(&p).unwrap();
        prop_assert_eq!(v, if want > zero() { want } else { zero() });
    }

    #[test]
    fn measures_are_convex(s1 in any::<u64>(), s2 in any::<u64>()) {
        let (p1, p2) = (ns_point(s1), ns_point(s2));
        let mid = p1.mix(&p2, &q(1, 2)).unwrap();
        for v in [InfluenceVariant::XToB, InfluenceVariant::AToB] {
            prop_assert!(influence(&mid, v) * q(2, 1) <= influence(&p1, v) + influence(&p2, v));
        }
        prop_assert!(md(&mid) * q(2, 1) <= md(&p1) + md(&p2));
    }

    #[test]
    fn relabelings_preserve_measures(seed in any::<u64>(), pick in 0usize..64) {
        let p = ns_point(seed);
        let group: Vec<_> = relabeling_group(&ScenarioSpec::chsh()).into_iter().filter(|r| !r.swap_parties).collect();
        let r = &group[pick % group.len()];
        let pr = r.apply_distribution(&p).unwrap();
        for v in [InfluenceVariant::XToB, InfluenceVariant::AToB] {
            prop_assert_eq!(influence(&pr, v), influence(&p, v));
        }
        prop_assert_eq!(md(&pr), md(&p));
        prop_assert_eq!(min_communication(&pr).unwrap().value, min_communication(&p).unwrap().value);
    }

    #[test]
    fn hall_vanishes_with_m(seed in any::<u64>()) {
        let p = ns_point(seed);
        let prog = MdProgram::new(&MdTarget::Distribution(p), None).unwrap();
        let m = prog.solve().unwrap().value;
        let h = prog.solve_hall().unwrap().value;
        prop_assert!(h >= zero());
        prop_assert_eq!(m == zero(), h == zero());
    }

    #[test]
    fn max_l1_objective_matches_direct_norm(w in proptest::collection::vec(1i64..20, 4), entries in proptest::collection::vec(-3i64..4, 24)) {
        let total: i64 = w.iter().sum();
        let qv: Vec<Rational> = w.iter().map(|&x| q(x, total)).collect();
        let ms: Vec<Matrix<Rational>> = entries
            .chunks(12)
            .map(|c| Matrix::from_vec(3, 4, c.iter().map(|&x| Rational::from_integer(x)).collect()))
            .collect();
        let sol = minimize_max_l1(&Matrix::identity(4), &qv, &ms).unwrap();
        let direct = ms
            .iter()
            .map(|m| m.mul_vec(&qv).iter().fold(zero(), |a, x| a + x.abs_val()))
            .max()
            .unwrap();
        prop_assert_eq!(sol.value.unwrap(), direct);
    }

    #[test]
    fn enumerated_vertices_are_dual_feasible(entries in proptest::collection::vec(-2i64..3, 6), c in proptest::collection::vec(0i64..3, 3)) {
        let phi_t = Matrix::from_vec(3, 2, entries.into_iter().map(Rational::from_integer).collect());
        let c: Vec<Rational> = c.into_iter().map(Rational::from_integer).collect();
        let vs = enumerate_dual_vertices(&phi_t, &c).unwrap();
        for v in &vs.vertices {
            prop_assert!(vs.region.contains(v));
        }
    }

    #[test]
    fn bilocal_value_is_convex_in_nu(k in 15i64..=20, a in 0usize..9, b in 0usize..9) {
        let p = bilocal_distribution(&q(k, 20)).unwrap();
        let prog = BilocalProgram::new(&p).unwrap();
        let comp = prog.free_parameters()[0];
        let (lo, hi) = prog.window(comp, &[]).unwrap().unwrap();
        let at = |i: usize| lo.clone() + (hi.clone() - lo.clone()) * q(i as i64, 8);
        let (x, y) = (at(a), at(b));
        let mid = (x.clone() + y.clone()) / q(2, 1);
        let f = |v: Rational| prog.solve_at(&[v]).unwrap().unwrap().value;
        prop_assert!(f(mid) * q(2, 1) <= f(x) + f(y));
    }

    #[test]
    fn bilocal_minimum_is_monotone_in_v(k1 in 0i64..=20, k2 in 0i64..=20) {
        let (lo, hi) = (k1.min(k2), k1.max(k2));
        let opts = ScanOptions { refine: false, ..ScanOptions::default() };
        let m = |k: i64| min_bilocality(&bilocal_distribution(&q(k, 20)).unwrap(), &Grid::Uniform(5), &opts).unwrap().minimum;
        prop_assert!(m(lo) <= m(hi));
    }

    #[test]
    fn generated_distributions_are_valid(v in 0i64..=100) {
        let v = q(v, 100);
        let p = i3322_mixture(&v).unwrap();
        prop_assert!(p.is_nonsignalling(0.0));
        prop_assert_eq!(i3322().evaluate(&p).unwrap(), q(2, 1) * v.clone() - q(1, 1));
        let b = bilocal_distribution(&v).unwrap();
        prop_assert!(b.is_nonsignalling(0.0));
        let (i, j) = bilocal_ij();
        let half_sq = v.clone() * v.clone() / q(2, 1);
        prop_assert_eq!(i.evaluate(&b).unwrap(), half_sq.clone());
        prop_assert_eq!(j.evaluate(&b).unwrap(), half_sq);
        let w = chsh_distribution(v.to_f64()).unwrap();
        prop_assert!(w.is_nonsignalling(1e-12));
    }

    #[test]
    fn distribution_files_round_trip(seed in any::<u64>()) {
        let p = ns_point(seed);
        let file = DistributionFile::from_distribution(&p).unwrap();
        let back = DistributionFile::from_json(&file.to_json()).unwrap().to_rational().unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn rationals_round_trip_through_text(n in -10_000i64..10_000, d in 1i64..10_000) {
        let r = q(n, d);
        let back: Rational = r.to_string().parse().unwrap();
        prop_assert_eq!(back, r);
    }
}
