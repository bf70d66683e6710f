use std::sync::atomic::{AtomicBool, Ordering};

use proptest::prelude::*;
use sbrtune::corpus::{load_matrix, save_matrix, split_folds};
use sbrtune::harness::{confusion, metrics};
use sbrtune::sampling::smote_seeded;
use sbrtune::stats::{a12, scott_knott};
use sbrtune::tuner::de_optimize;
use sbrtune::{Dataset, DeConfig, Dimension, Label, ParamSpace, Provenance, Row, SmoteParams};

fn dataset(labels: &[bool], values: &[u8]) -> Dataset {
    let rows = labels
        .iter()
        .enumerate()
        .map(|(i, &sbr)| Row {
            id: format!("r{i}"),
            values: vec![f64::from(values[i % values.len()]), (i % 7) as f64],
            label: Label::from_flag(sbr),
        })
        .collect();
    Dataset::new(vec!["a".into(), "b".into()], rows, Provenance::train("prop")).unwrap()
}

fn labels_with_both(max: usize) -> impl Strategy<Value = Vec<bool>> {
    prop::collection::vec(any::<bool>(), 4..max)
        .prop_filter("both classes", |l| l.contains(&true) && l.contains(&false))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn folds_partition_rows(labels in labels_with_both(120), bins in 1usize..12, seed in any::<u64>()) {
        prop_assume!(bins <= labels.len());
        let d = dataset(&labels, &[1, 2, 3]);
        let f = split_folds(&d, bins, seed).unwrap();
        let mut all: Vec<usize> = f.bins.iter().flatten().copied().collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..labels.len()).collect::<Vec<_>>());
        let sizes: Vec<usize> = f.bins.iter().map(Vec::len).collect();
        prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        let sbr: Vec<usize> = f.bins.iter().map(|b| b.iter().filter(|&&i| labels[i]).count()).collect();
        prop_assert!(sbr.iter().max().unwrap() - sbr.iter().min().unwrap() <= 1);
        prop_assert_eq!(f, split_folds(&d, bins, seed).unwrap());
    }

    #[test]
    fn matrix_round_trip(labels in labels_with_both(40), values in prop::collection::vec(0u8..9, 1..10)) {
        let d = dataset(&labels, &values);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        save_matrix(&d, &path).unwrap();
        prop_assert_eq!(load_matrix(&path, Provenance::train("prop")).unwrap(), d);
    }

    #[test]
    fn smote_keeps_minority_and_cuts_only_majority(
        n_sbr in 2usize..15,
        n_nsbr in 20usize..80,
        k in 1usize..=20,
        m in 50usize..=400,
        r in 1u32..=6,
        seed in any::<u64>(),
    ) {
        let labels: Vec<bool> = (0..n_sbr + n_nsbr).map(|i| i < n_sbr).collect();
        let d = dataset(&labels, &[0, 1, 4, 2, 8]);
        let p = SmoteParams::new(k, m, r).unwrap();
        let out = smote_seeded(&d, &p, seed).unwrap();
        let target = p.target(d.n_rows());
        prop_assert!(out.count(Label::Sbr).abs_diff(target) <= 1);
        prop_assert_eq!(out.count(Label::Nsbr), n_nsbr.min(target));
        for row in d.rows() {
            let kept = out.rows().iter().any(|o| o.id == row.id);
            prop_assert!(kept || row.label == Label::Nsbr);
        }
        prop_assert_eq!(out, smote_seeded(&d, &p, seed).unwrap());
    }

    #[test]
    fn a12_halves_add_to_one(
        m in prop::collection::vec(0u8..6, 1..30),
        n in prop::collection::vec(0u8..6, 1..30),
    ) {
        let m: Vec<f64> = m.into_iter().map(f64::from).collect();
        let n: Vec<f64> = n.into_iter().map(f64::from).collect();
        prop_assert_eq!(a12(&m, &n).unwrap() + a12(&n, &m).unwrap(), 1.0);
    }

    #[test]
    fn scott_knott_ignores_names_order_and_shift(
        centres in prop::collection::vec(0u8..5, 2..5),
        shift in -50.0f64..50.0,
    ) {
        let groups: Vec<(String, Vec<f64>)> = centres
            .iter()
            .enumerate()
            .map(|(i, &c)| (format!("g{i}"), (0..12).map(|j| f64::from(c) * 10.0 + f64::from(j % 4)).collect()))
            .collect();
        let base = scott_knott(&groups, 3).unwrap();
        let ranks = |t: &sbrtune::RankTable, names: &[String]| -> Vec<usize> {
            names.iter().map(|n| t.rank_of(n).unwrap()).collect()
        };
        let names: Vec<String> = groups.iter().map(|g| g.0.clone()).collect();

        let renamed: Vec<(String, Vec<f64>)> = groups.iter().map(|(n, v)| (format!("x{n}"), v.clone())).collect();
        let renamed_names: Vec<String> = renamed.iter().map(|g| g.0.clone()).collect();
        prop_assert_eq!(ranks(&base, &names), ranks(&scott_knott(&renamed, 3).unwrap(), &renamed_names));

        let mut reversed = groups.clone();
        reversed.reverse();
        prop_assert_eq!(ranks(&base, &names), ranks(&scott_knott(&reversed, 3).unwrap(), &names));

        let shifted: Vec<(String, Vec<f64>)> =
            groups.iter().map(|(n, v)| (n.clone(), v.iter().map(|x| x + shift).collect())).collect();
        prop_assert_eq!(ranks(&base, &names), ranks(&scott_knott(&shifted, 3).unwrap(), &names));
    }

    #[test]
    fn g_is_a_rate(preds in prop::collection::vec(any::<bool>(), 1..60), seed in any::<u64>()) {
        let truth: Vec<Label> = preds.iter().enumerate().map(|(i, _)| Label::from_flag((seed >> (i % 64)) & 1 == 1)).collect();
        let preds: Vec<Label> = preds.into_iter().map(Label::from_flag).collect();
        let m = metrics(&confusion(&preds, &truth).unwrap());
        prop_assert!((0.0..=1.0).contains(&m.g));
        if m.pd == 0.0 {
            prop_assert_eq!(m.g, 0.0);
        }
    }

    #[test]
    fn de_only_evaluates_valid_candidates(seed in any::<u64>(), gens in 0usize..5) {
        let space = ParamSpace::new(vec![
            Dimension::real("x", -2.0, 3.0),
            Dimension::integer("n", 1.0, 9.0),
            Dimension::boolean("b"),
        ])
        .unwrap();
        let bad = AtomicBool::new(false);
        let fitness = |v: &[f64]| {
            if !space.contains(v) {
                bad.store(true, Ordering::Relaxed);
            }
            Ok(-(v[0] - 1.0).powi(2) - (v[1] - 4.0).abs() + v[2])
        };
        let cfg = DeConfig::for_space(&space, gens, seed).unwrap();
        let out = de_optimize(&space, fitness, &cfg, &[vec![10.0, 0.3, 0.7]]).unwrap();
        prop_assert!(!bad.load(Ordering::Relaxed));
        prop_assert!(space.contains(&out.best.values));
        prop_assert_eq!(out.evaluations, cfg.np * (gens + 1));
    }
}
