mod support;

use ctgfeat_core::everest::{group_sizes, Predicate};
use ctgfeat_core::{everest, top_group_risk_ratio, Outcome, OutcomeDefinition, Split};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use support::oracle;

fn outcome(ph: f64, compromise: bool) -> Outcome {
    Outcome {
        cord_ph: Some(ph),
        compromise,
        split: Split::Unassigned,
    }
}

fn ids(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("p{i:05}")).collect()
}

#[test]
fn conservation_and_monotone_invariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(51);
    let defs = OutcomeDefinition::standard_default();
    for _ in 0..200 {
        let n = rng.random_range(2..400);
        let n_group = rng.random_range(2..=n.min(20));
        let values: Vec<f64> = (0..n)
            .map(|_| {
                // Coarse values so ties are common.
                f64::from(rng.random_range(0..30u32)) * 0.5
            })
            .collect();
        let outcomes: Vec<Outcome> = (0..n)
            .map(|_| outcome(rng.random_range(6.9..7.4), rng.random_bool(0.3)))
            .collect();
        let r = everest("f", &values, &ids(n), &outcomes, &defs, n_group).unwrap();
        let max = *r.group_sizes.iter().max().unwrap();
        let min = *r.group_sizes.iter().min().unwrap();
        assert!(max - min <= 1);
        assert_eq!(r.group_sizes.iter().sum::<usize>(), n);
        assert!(r.group_boundaries.windows(2).all(|w| w[0] <= w[1]));
        for (o, def) in r.outcomes.iter().zip(&defs) {
            let weighted: f64 = o
                .group_rates
                .iter()
                .zip(&r.group_sizes)
                .map(|(rate, &s)| rate * s as f64)
                .sum::<f64>()
                / n as f64;
            let prevalence = outcomes.iter().filter(|x| def.holds(x)).count() as f64 / n as f64;
            assert!((weighted - prevalence).abs() <= 1e-12);
            let events: Vec<bool> = outcomes.iter().map(|x| def.holds(x)).collect();
            let (sizes, rates) = oracle::group_rates(&values, &events, n_group);
            assert_eq!(sizes, r.group_sizes);
            assert_eq!(rates, o.group_rates);
        }
        let transformed: Vec<f64> = values.iter().map(|v| (0.3 * v).exp() * 2.0 - 7.0).collect();
        let t = everest("f", &transformed, &ids(n), &outcomes, &defs, n_group).unwrap();
        assert_eq!(t.groups, r.groups);
        assert_eq!(t.outcomes, r.outcomes);
    }
}

#[test]
fn ninety_five_patients_in_ten_groups() {
    assert_eq!(group_sizes(95, 10), [10, 10, 10, 10, 10, 9, 9, 9, 9, 9]);
}

#[test]
fn uniform_rates_have_unit_risk_ratio() {
    let values: Vec<f64> = (0..20).map(f64::from).collect();
    let outcomes: Vec<Outcome> = (0..20).map(|i| outcome(7.2, i % 2 == 0)).collect();
    let defs = [OutcomeDefinition::new("c", Predicate::Compromise)];
    let r = everest("f", &values, &ids(20), &outcomes, &defs, 10).unwrap();
    assert_eq!(top_group_risk_ratio(&r, "c").unwrap(), 1.0);
}

proptest! {
    #[test]
    fn input_order_does_not_matter(
        rows in prop::collection::vec((0u8..20, any::<bool>()), 4..80),
        n_group in 2usize..5,
        shift in 0usize..80,
    ) {
        let n = rows.len();
        prop_assume!(n >= n_group);
        let names = ids(n);
        let values: Vec<f64> = rows.iter().map(|r| f64::from(r.0)).collect();
        let outcomes: Vec<Outcome> = rows.iter().map(|r| outcome(7.2, r.1)).collect();
        let defs = [OutcomeDefinition::new("c", Predicate::Compromise)];
        let a = everest("f", &values, &names, &outcomes, &defs, n_group).unwrap();

        let perm: Vec<usize> = (0..n).map(|i| (i + shift) % n).collect();
        let pv: Vec<f64> = perm.iter().map(|&i| values[i]).collect();
        let pn: Vec<String> = perm.iter().map(|&i| names[i].clone()).collect();
        let po: Vec<Outcome> = perm.iter().map(|&i| outcomes[i].clone()).collect();
        let b = everest("f", &pv, &pn, &po, &defs, n_group).unwrap();
        prop_assert_eq!(&a.outcomes, &b.outcomes);
        prop_assert_eq!(&a.group_boundaries, &b.group_boundaries);
        let ga: Vec<Vec<&String>> = a.groups.iter().map(|g| g.iter().map(|&i| &names[i]).collect()).collect();
        let gb: Vec<Vec<&String>> = b.groups.iter().map(|g| g.iter().map(|&i| &pn[i]).collect()).collect();
        prop_assert_eq!(ga, gb);
    }
}
