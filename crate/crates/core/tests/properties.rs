use elicit_core::aggregation::{max_relative_error, oracle_global, pool};
use elicit_core::families::{
    batch_update, ppd_density, posterior_update, DirichletHyper, Family, Hyper, Outcome,
};
use elicit_core::mechanisms::{match_probability, Mechanism, MechanismKind};
use elicit_core::scoring::{expected_score, truthful_report, AgentBelief, Report, ScoreRule};
use elicit_core::Belief;
use proptest::prelude::*;

fn reals(lo: f64, hi: f64, max_len: usize) -> impl Strategy<Value = Vec<Outcome>> {
    prop::collection::vec((lo..hi).prop_map(Outcome::Real), 0..max_len)
}

fn counts(max_len: usize) -> impl Strategy<Value = Vec<Outcome>> {
    prop::collection::vec((0u64..40).prop_map(Outcome::Count), 0..max_len)
}

fn labels(k: usize, max_len: usize) -> impl Strategy<Value = Vec<Outcome>> {
    prop::collection::vec((1..=k).prop_map(Outcome::Category), 0..max_len)
}

fn alpha(k: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.2f64..20.0, k)
}

fn fold(family: Family, prior: &Hyper, xs: &[Outcome]) -> Hyper {
    xs.iter().fold(prior.clone(), |h, x| posterior_update(family, &h, x).unwrap())
}

fn dirichlet(a: &[f64]) -> Hyper {
    Hyper::new(a.to_vec(), a.iter().sum())
}

/// Splits `xs` into `parts` consecutive chunks at the given cut points.
fn split(xs: &[Outcome], cuts: &[usize]) -> Vec<Vec<Outcome>> {
    let mut idx: Vec<usize> = cuts.iter().map(|c| c % (xs.len() + 1)).collect();
    idx.sort_unstable();
    let mut out = Vec::new();
    let mut start = 0;
    for i in idx.into_iter().chain([xs.len()]) {
        out.push(xs[start..i].to_vec());
        start = i;
    }
    out
}

fn round_trip(kind: MechanismKind, family: Family, prior: Hyper, xs: &[Outcome]) -> f64 {
    let mech = Mechanism::new(kind, family, prior.clone()).unwrap();
    let h = batch_update(family, &prior, xs).unwrap();
    let decoded = mech.decode(&mech.elicit(&h).unwrap()).unwrap();
    max_relative_error(&decoded, &h)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn updates_commute_for_counts(xs in counts(30), seed in any::<u64>()) {
        let prior = Hyper::scalar(1.5, 1.0);
        let mut ys = xs.clone();
        let n = ys.len();
        if n > 1 {
            ys.swap(0, (seed as usize) % n);
            ys.reverse();
        }
        let a = fold(Family::PoissonGamma, &prior, &xs);
        prop_assert_eq!(&a, &fold(Family::PoissonGamma, &prior, &ys));
        prop_assert_eq!(&a, &batch_update(Family::PoissonGamma, &prior, &xs).unwrap());
    }

    #[test]
    fn updates_commute_for_labels(xs in labels(4, 30)) {
        let family = Family::categorical(4);
        let prior = dirichlet(&[1.0, 0.5, 2.0, 1.0]);
        let mut ys = xs.clone();
        ys.sort_by_key(|x| match x { Outcome::Category(c) => std::cmp::Reverse(*c), _ => std::cmp::Reverse(0) });
        let a = batch_update(family, &prior, &xs).unwrap();
        prop_assert_eq!(&a, &fold(family, &prior, &ys));
        prop_assert_eq!(&a, &batch_update(family, &prior, &ys).unwrap());
    }

    #[test]
    fn updates_commute_for_reals(xs in reals(-20.0, 20.0, 30)) {
        let family = Family::normal();
        let prior = Hyper::scalar(0.3, 1.0);
        let mut ys = xs.clone();
        ys.reverse();
        let a = fold(family, &prior, &xs);
        prop_assert!(max_relative_error(&a, &fold(family, &prior, &ys)) < 1e-12);
        prop_assert!(max_relative_error(&a, &batch_update(family, &prior, &xs).unwrap()) < 1e-12);

        let u = Family::UniformPareto;
        let positive: Vec<Outcome> = xs.iter().map(|x| Outcome::Real(x.value().unwrap().abs())).collect();
        let mut rev = positive.clone();
        rev.reverse();
        let prior = Hyper::scalar(1.0, 3.0);
        prop_assert_eq!(fold(u, &prior, &positive), fold(u, &prior, &rev));
    }

    /// Scaling alpha preserves the predictive but not the match probability.
    #[test]
    fn dirichlet_scaling_collides(a in alpha(3), c in 1.1f64..10.0) {
        let family = Family::categorical(3);
        let (h, hc) = (dirichlet(&a), dirichlet(&a.iter().map(|v| v * c).collect::<Vec<_>>()));
        for i in 1..=3 {
            let (p, q) = (
                ppd_density(family, &h, &Outcome::Category(i)).unwrap(),
                ppd_density(family, &hc, &Outcome::Category(i)).unwrap(),
            );
            prop_assert!((p - q).abs() <= 1e-14);
        }
        let b = match_probability(&DirichletHyper::new(a.clone()).unwrap());
        let bc = match_probability(&DirichletHyper::from(&hc));
        prop_assert!(bc < b);
    }

    #[test]
    fn match_probability_decreases_in_n(a in alpha(4), step in 0.01f64..5.0) {
        let n: f64 = a.iter().sum();
        let grown: Vec<f64> = a.iter().map(|v| v * (n + step) / n).collect();
        let b0 = match_probability(&DirichletHyper::new(a).unwrap());
        let b1 = match_probability(&DirichletHyper::new(grown).unwrap());
        prop_assert!(b1 < b0);
    }

    #[test]
    fn normal_round_trip(xs in reals(-50.0, 50.0, 40), nu in -5.0f64..5.0) {
        let err = round_trip(MechanismKind::SingleSampleMoments, Family::normal(), Hyper::scalar(nu, 1.0), &xs);
        prop_assert!(err <= 1e-10, "{}", err);
    }

    #[test]
    fn poisson_round_trip(xs in counts(40), nu in 0.1f64..10.0, n in 0.2f64..5.0) {
        let err = round_trip(MechanismKind::SingleSampleMoments, Family::PoissonGamma, Hyper::scalar(nu, n), &xs);
        prop_assert!(err <= 1e-10, "{}", err);
    }

    #[test]
    fn uniform_round_trip(xs in reals(0.0, 30.0, 40), nu in 0.1f64..10.0, n in 2.5f64..8.0) {
        let err = round_trip(MechanismKind::SingleSampleMoments, Family::UniformPareto, Hyper::scalar(nu, n), &xs);
        prop_assert!(err <= 1e-10, "{}", err);
    }

    #[test]
    fn full_ppd_round_trip(xs in counts(40)) {
        let err = round_trip(MechanismKind::SingleSampleFullPpd, Family::PoissonGamma, Hyper::scalar(2.0, 1.0), &xs);
        prop_assert!(err <= 1e-10, "{}", err);
    }

    #[test]
    fn dirichlet_round_trip(a in alpha(5), xs in labels(5, 40)) {
        let err = round_trip(MechanismKind::TwoSampleDirichlet, Family::categorical(5), dirichlet(&a), &xs);
        prop_assert!(err <= 1e-10, "{}", err);
    }

    /// Splitting one sample pool among agents and pooling their decoded
    /// hypers reproduces the oracle exactly, in any agent order.
    #[test]
    fn pooling_matches_oracle_and_ignores_order(xs in counts(60), cuts in prop::collection::vec(any::<usize>(), 0..5)) {
        let family = Family::PoissonGamma;
        let prior = Hyper::scalar(1.0, 1.0);
        let mech = Mechanism::new(MechanismKind::SingleSampleMoments, family, prior.clone()).unwrap();
        let decoded: Vec<Hyper> = split(&xs, &cuts)
            .iter()
            .map(|part| {
                let h = batch_update(family, &prior, part).unwrap();
                mech.decode(&mech.elicit(&h).unwrap()).unwrap()
            })
            .collect();
        let oracle = oracle_global(family, &prior, &xs).unwrap();
        let pooled = pool(family, &prior, &decoded).unwrap();
        prop_assert_eq!(&pooled, &oracle);
        let mut reversed = decoded.clone();
        reversed.reverse();
        prop_assert_eq!(pool(family, &prior, &reversed).unwrap(), pooled);
    }

    #[test]
    fn dirichlet_pooling_matches_oracle(a in alpha(3), xs in labels(3, 60), cuts in prop::collection::vec(any::<usize>(), 0..5)) {
        let family = Family::categorical(3);
        let prior = dirichlet(&a);
        let mech = Mechanism::new(MechanismKind::TwoSampleDirichlet, family, prior.clone()).unwrap();
        let decoded: Vec<Hyper> = split(&xs, &cuts)
            .iter()
            .map(|part| {
                let h = batch_update(family, &prior, part).unwrap();
                mech.decode(&mech.elicit(&h).unwrap()).unwrap()
            })
            .collect();
        let oracle = oracle_global(family, &prior, &xs).unwrap();
        prop_assert!(max_relative_error(&pool(family, &prior, &decoded).unwrap(), &oracle) <= 1e-10);
    }

    /// The truthful categorical report beats an arbitrary other report.
    #[test]
    fn truthful_categorical_report_wins(a in alpha(4), q in prop::collection::vec(0.01f64..1.0, 4)) {
        let belief = AgentBelief::from(Belief::new(Family::categorical(4), dirichlet(&a)).unwrap());
        let total: f64 = q.iter().sum();
        let other = Report::Categorical(q.iter().map(|v| v / total).collect());
        let truthful = truthful_report(ScoreRule::Log, &belief).unwrap();
        let gap = expected_score(ScoreRule::Log, &truthful, &belief).unwrap()
            - expected_score(ScoreRule::Log, &other, &belief).unwrap();
        prop_assert!(gap >= -1e-12);
    }
}
