use actform::action::execute_indexed;
use actform::bisim::{bisimilar, n_bisimilar, refines};
use actform::check::{check, eval_all, eval_basic, random_model, Sampler};
use actform::kripke::{disjoint_union, PointedKripkeModel};
use actform::normform::{explicit_disjunction, to_adnf, to_dnf, to_explicit, ExplicitBudget};
use actform::prover::{equiv, satisfiable};
use actform::reduce::{exists, reduce};
use actform::synth::synthesize;
use actform::syntax::{modal_depth, parse_action, parse_formula, print_action, print_formula, Action, AgentSet, F};
use actform::tau::tau;
use actform::FrameClass;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn agents() -> AgentSet {
    ["a".to_string(), "b".to_string()].into()
}

fn atoms() -> Vec<String> {
    vec!["p".to_string(), "q".to_string()]
}

fn class() -> impl Strategy<Value = FrameClass> {
    prop::sample::select(FrameClass::ALL.to_vec())
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn full_sampler() -> Sampler {
    let mut s = Sampler::basic(&agents(), &atoms());
    s.dynamic = true;
    s.refinement = true;
    s.max_ops = 2;
    s
}

/// The same pointed model twice side by side, pointed in the second copy.
fn shadow(m: &PointedKripkeModel) -> PointedKripkeModel {
    let (u, _, right) = disjoint_union(&m.model, &m.model).unwrap();
    PointedKripkeModel::new(u, m.points.iter().map(|&s| right[s]).collect())
}

fn guards_are_basic(a: &Action) -> bool {
    match a {
        Action::Test(f) => f.is_basic(),
        Action::Choice(x, y) | Action::Compose(x, y) | Action::Learn(_, x, y) => guards_are_basic(x) && guards_are_basic(y),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn printed_formulae_parse_back(seed in any::<u64>()) {
        let f = full_sampler().full_formula(&mut rng(seed), 3);
        let text = print_formula(&f);
        prop_assert_eq!(parse_formula(&text, &agents()).unwrap(), f, "{}", text);
    }

    #[test]
    fn printed_actions_parse_back(seed in any::<u64>()) {
        let a = full_sampler().action(&mut rng(seed), 3);
        let text = print_action(&a);
        prop_assert_eq!(parse_action(&text, &agents()).unwrap(), a, "{}", text);
    }

    #[test]
    fn bisimilarity_is_an_equivalence(c in class(), s1 in any::<u64>(), s2 in any::<u64>()) {
        let m1 = random_model(&mut rng(s1), c, 4, &agents(), &atoms());
        let m2 = random_model(&mut rng(s2), c, 4, &agents(), &atoms());
        prop_assert!(bisimilar(&m1, &m1).unwrap());
        prop_assert!(bisimilar(&m1, &shadow(&m1)).unwrap());
        prop_assert_eq!(bisimilar(&m1, &m2).unwrap(), bisimilar(&m2, &m1).unwrap());
    }

    #[test]
    fn bounded_bisimilarity_weakens_with_depth(c in class(), s1 in any::<u64>(), s2 in any::<u64>()) {
        let m1 = random_model(&mut rng(s1), c, 4, &agents(), &atoms());
        let m2 = random_model(&mut rng(s2), c, 4, &agents(), &atoms());
        let full = bisimilar(&m1, &m2).unwrap();
        let mut previous = true;
        for n in 0..6 {
            let now = n_bisimilar(&m1, &m2, n).unwrap();
            prop_assert!(previous || !now, "n = {}", n);
            prop_assert!(!full || now);
            previous = now;
        }
    }

    #[test]
    fn bounded_bisimilarity_preserves_shallow_formulae(s1 in any::<u64>(), s2 in any::<u64>(), fs in any::<u64>()) {
        let c = FrameClass::K;
        let m1 = random_model(&mut rng(s1), c, 3, &agents(), &atoms());
        let m2 = random_model(&mut rng(s2), c, 3, &agents(), &atoms());
        let f = Sampler::basic(&agents(), &atoms()).formula(&mut rng(fs), 2);
        let n = modal_depth(&f).unwrap();
        if n_bisimilar(&m1, &m2, n).unwrap() {
            prop_assert_eq!(eval_basic(&m1, &f).unwrap(), eval_basic(&m2, &f).unwrap());
        }
    }

    #[test]
    fn bisimilar_models_agree_on_every_formula(c in class(), ms in any::<u64>(), fs in any::<u64>()) {
        let m = random_model(&mut rng(ms), c, 4, &agents(), &atoms());
        let f = full_sampler().full_formula(&mut rng(fs), 2);
        prop_assert_eq!(check(&m, &f, c).unwrap(), check(&shadow(&m), &f, c).unwrap());
    }

    #[test]
    fn execution_preserves_bisimilarity(c in class(), ms in any::<u64>(), acts in any::<u64>()) {
        let m = random_model(&mut rng(ms), c, 4, &agents(), &atoms());
        let twin = shadow(&m);
        let am = tau(&Sampler::basic(&agents(), &atoms()).action(&mut rng(acts), 2), c, &agents()).unwrap();
        let (r1, p1) = execute_indexed(&m, &am, &mut |km, f| eval_all(km, f)).unwrap();
        let (r2, p2) = execute_indexed(&twin, &am, &mut |km, f| eval_all(km, f)).unwrap();
        prop_assert_eq!(r1.points.len(), r2.points.len());
        for &x in &r1.points {
            let t = p1[x].1;
            let y = r2.points.iter().copied().find(|&y| p2[y].1 == t).unwrap();
            prop_assert!(bisimilar(&r1.with_points(vec![x]), &r2.with_points(vec![y])).unwrap());
        }
    }

    #[test]
    fn fewer_designated_states_keep_validity(c in class(), ms in any::<u64>(), fs in any::<u64>(), mask in any::<u8>()) {
        let m = random_model(&mut rng(ms), c, 5, &agents(), &atoms());
        let all = m.with_points((0..m.model.len()).collect());
        let some: Vec<usize> = (0..m.model.len()).filter(|s| mask >> s & 1 == 1).collect();
        let f = full_sampler().full_formula(&mut rng(fs), 2);
        if check(&all, &f, c).unwrap() {
            prop_assert!(check(&m.with_points(some), &f, c).unwrap());
        }
    }

    #[test]
    fn reduction_is_basic_and_agrees(c in class(), ms in any::<u64>(), fs in any::<u64>()) {
        let m = random_model(&mut rng(ms), c, 4, &agents(), &atoms());
        let f = full_sampler().full_formula(&mut rng(fs), 2);
        let r = reduce(&f, c, &agents()).unwrap();
        prop_assert!(r.is_basic());
        prop_assert_eq!(eval_basic(&m, &r).unwrap(), check(&m, &f, c).unwrap());
    }

    #[test]
    fn truth_survives_into_the_refinement_quantifier(c in class(), ms in any::<u64>(), fs in any::<u64>()) {
        let m = random_model(&mut rng(ms), c, 4, &agents(), &atoms());
        let f = Sampler::basic(&agents(), &atoms()).formula(&mut rng(fs), 2);
        if eval_basic(&m, &f).unwrap() {
            prop_assert!(eval_basic(&m, &exists(&f, c, &agents()).unwrap()).unwrap());
        }
    }

    #[test]
    fn unsatisfiable_formulae_have_no_models(c in class(), ms in any::<u64>(), fs in any::<u64>()) {
        let m = random_model(&mut rng(ms), c, 4, &agents(), &atoms());
        let f = Sampler::basic(&agents(), &atoms()).formula(&mut rng(fs), 2);
        if eval_basic(&m, &f).unwrap() {
            prop_assert!(satisfiable(&f, c).unwrap());
        }
    }

    #[test]
    fn normal_forms_are_equivalent(fs in any::<u64>()) {
        let f = Sampler::basic(&agents(), &atoms()).formula(&mut rng(fs), 2);
        prop_assert!(equiv(&f, &to_dnf(&f).unwrap().to_formula(), FrameClass::K).unwrap());
        let adnf = to_adnf(&f).unwrap();
        prop_assert!(adnf.is_alternating());
        prop_assert!(equiv(&f, &adnf.to_formula(), FrameClass::K45).unwrap());
    }

    #[test]
    fn explicit_forms_are_equivalent_in_s5(fs in any::<u64>()) {
        let f = Sampler::basic(&agents(), &atoms()).formula(&mut rng(fs), 1);
        let budget = ExplicitBudget { max_items: 8, max_candidates: 6, max_disjuncts: 400 };
        if let Ok(es) = to_explicit(&f, budget) {
            prop_assert!(equiv(&f, &explicit_disjunction(&es), FrameClass::S5).unwrap());
        }
    }

    #[test]
    fn updates_refine_their_input(c in class(), ms in any::<u64>(), acts in any::<u64>()) {
        let m = random_model(&mut rng(ms), c, 4, &agents(), &atoms());
        let am = tau(&Sampler::basic(&agents(), &atoms()).action(&mut rng(acts), 2), c, &agents()).unwrap();
        let r = actform::action::execute(&m, &am, &mut |km, f| eval_all(km, f)).unwrap();
        for &x in &r.points {
            prop_assert!(refines(&r.with_points(vec![x]), &m).unwrap());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn synthesized_guards_are_basic(c in class(), fs in any::<u64>()) {
        let goal: F = Sampler::basic(&agents(), &atoms()).formula(&mut rng(fs), 2);
        let a = synthesize(&goal, c, &agents()).unwrap();
        prop_assert!(guards_are_basic(&a), "{}", print_action(&a));
    }

    #[test]
    fn translation_is_deterministic(c in class(), acts in any::<u64>()) {
        let a = Sampler::basic(&agents(), &atoms()).action(&mut rng(acts), 3);
        prop_assert_eq!(tau(&a, c, &agents()).unwrap().to_json(), tau(&a, c, &agents()).unwrap().to_json());
    }
}
