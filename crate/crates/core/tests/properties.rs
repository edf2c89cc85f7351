use fvst_core::io;
use fvst_core::lp::{self, LpConfig};
use fvst_core::solvers;
use fvst_core::structure;
use fvst_core::tournament::{verify_fvs, Tournament, VertexSet, WeightScheme, WeightedTournament};
use fvst_core::weight;
use proptest::prelude::*;

fn scheme(k: u32) -> WeightScheme {
    if k == 0 {
        WeightScheme::Unit
    } else {
        WeightScheme::UniformInt(k)
    }
}

fn instance(max_n: usize) -> impl Strategy<Value = WeightedTournament> {
    (1..=max_n, any::<u64>(), 0u32..12).prop_map(|(n, seed, k)| WeightedTournament::random(n, seed, scheme(k)))
}

fn light_instance() -> impl Strategy<Value = WeightedTournament> {
    (5usize..=12, any::<u64>(), 0u32..8).prop_filter_map("heavy", |(n, seed, k)| {
        let t = Tournament::random_biased(n, 0.15, seed);
        let w = WeightedTournament::random(n, seed, scheme(k)).weights;
        structure::is_light(&t).then(|| WeightedTournament::new(t, w).unwrap())
    })
}

fn permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn emitted_text_parses_back(wt in instance(30)) {
        let text = io::emit_instance(&wt);
        let back = io::parse_instance(&text).unwrap();
        prop_assert_eq!(&back, &wt);
        prop_assert_eq!(io::instance_hash(&back), io::instance_hash(&wt));
        prop_assert_eq!(io::emit_instance(&back), text);
    }

    #[test]
    fn canonical_form_ignores_labels((t, perm) in (4usize..=9, any::<u64>()).prop_flat_map(|(n, s)| (Just(Tournament::random(n, s)), permutation(n)))) {
        let p = t.permuted(&perm);
        prop_assert_eq!(t.canonical_form().unwrap(), p.canonical_form().unwrap());
        prop_assert_eq!(t.triangle_count(), p.triangle_count());
        prop_assert_eq!(structure::is_light(&t), structure::is_light(&p));
    }

    #[test]
    fn deleting_a_vertex_never_raises_the_relaxations(wt in instance(9), pick in any::<prop::sample::Index>()) {
        let cfg = LpConfig::default();
        let v = pick.index(wt.n());
        let (sub, _) = wt.induced(wt.tournament.vertices().without(v)).unwrap();
        for level in [0, 1] {
            let full = lp::lp_value(&wt, level, &cfg).unwrap();
            let part = lp::lp_value(&sub, level, &cfg).unwrap();
            prop_assert!(part <= full + 1e-6 * full.max(1.0), "level {level}: {part} > {full}");
        }
    }

    #[test]
    fn solvers_agree_with_the_exact_optimum(wt in instance(11)) {
        let cfg = LpConfig::default();
        let opt = solvers::exact_fvs(&wt).unwrap();
        let lr = solvers::local_ratio_3approx(&wt);
        let sa = solvers::fvst_7_3(&wt, &cfg).unwrap();
        for s in [&opt, &lr, &sa.solution] {
            prop_assert!(verify_fvs(&wt, s.chosen).is_valid());
            prop_assert!(s.weight >= opt.weight);
        }
        prop_assert!(lr.weight <= opt.weight.clone() * weight::int(3));
        prop_assert!(sa.solution.weight.clone() * weight::int(3) <= opt.weight.clone() * weight::int(7));
        let sa1 = sa.rounding.sa1_value();
        prop_assert!(sa1 <= weight::to_f64(&opt.weight) + 1e-6);
    }

    #[test]
    fn layering_on_light_inputs(wt in light_instance()) {
        let cfg = LpConfig::default();
        let (sol, trace) = solvers::layers(&wt, &cfg).unwrap();
        prop_assert!(verify_fvs(&wt, sol.chosen).is_valid());
        prop_assert!(sol.weight.clone() * weight::int(4) <= wt.total_weight() * weight::int(3));
        prop_assert!(trace.check_structure(wt.tournament.vertices()).is_ok());
        prop_assert!(trace.check_weights(&wt.weights).is_ok());
        prop_assert_eq!(trace.l0.union(trace.l1), wt.tournament.vertices());
    }

    #[test]
    fn cdz_is_exact_when_t5_free(n in 4usize..=11, seed in any::<u64>(), k in 0u32..8) {
        let t = Tournament::random_biased(n, 0.2, seed);
        prop_assume!(structure::is_t5_free(&t).is_none());
        let wt = WeightedTournament::new(t, WeightedTournament::random(n, seed, scheme(k)).weights).unwrap();
        let out = solvers::cdz(&wt, &LpConfig::default()).unwrap();
        prop_assert!(out.fallback.is_none());
        prop_assert_eq!(out.solution.weight, solvers::exact_fvs(&wt).unwrap().weight);
    }
}

#[test]
fn zero_weight_vertices_are_taken_for_free() {
    let mut wt = WeightedTournament::random(9, 5, WeightScheme::UniformInt(4));
    for v in [1, 4, 7] {
        wt.weights[v] = weight::int(0);
    }
    let out = solvers::fvst_7_3(&wt, &LpConfig::default()).unwrap();
    let zero: VertexSet = [1, 4, 7].into_iter().collect();
    assert_eq!(out.rounding.zero_weight, zero);
    assert!(zero.is_subset(out.solution.chosen));
    let opt = solvers::exact_fvs(&wt).unwrap();
    assert!(out.solution.weight.clone() * weight::int(3) <= opt.weight * weight::int(7));
}

#[test]
fn half_rounding_residual_has_third_weight_value() {
    let cfg = LpConfig::default();
    let mut seen = 0;
    for seed in 0..3000u64 {
        let n = 5 + (seed % 5) as usize;
        let t = Tournament::random(n, seed);
        if !structure::is_light(&t) {
            continue;
        }
        let wt = WeightedTournament::unit(t);
        let h = solvers::half_rounding(&wt, wt.tournament.vertices(), &cfg).unwrap();
        if h.residual.is_empty() {
            continue;
        }
        seen += 1;
        let third = weight::to_f64(&wt.weight_of(h.residual)) / 3.0;
        assert!((h.residual_sa0 - third).abs() < 1e-6 * third.max(1.0));
        assert!(h.residual.iter().all(|v| !h.f.contains(v) && !h.z.contains(v)));
    }
    assert!(seen > 10, "only {seen} nonempty residuals");
}
