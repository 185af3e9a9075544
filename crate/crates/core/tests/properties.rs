mod common;

use std::collections::{BTreeMap, HashMap};

use lowres_mt::corpus::compute_stats;
use lowres_mt::cpt::{ratio_count, Mixer};
use lowres_mt::eval::{chrf_corpus, chrf_segment};
use lowres_mt::sampling::{allocate, allocate_capped, draw, temperature_distribution};
use lowres_mt::{BpeModel, ChrfParams, EvalSet, MixStrategy, MixerConfig, MonoRecord, ParallelRecord};
use proptest::prelude::*;

fn sizes_strategy() -> impl Strategy<Value = BTreeMap<String, f64>> {
    prop::collection::btree_map("[a-z]{3}", 1.0e-3f64..1.0e7, 1..12)
}

fn probs_strategy() -> impl Strategy<Value = BTreeMap<String, f64>> {
    prop::collection::btree_map("[a-z]{3}", 1u32..1000, 1..12).prop_map(|m| {
        let z: f64 = m.values().map(|&v| v as f64).sum();
        m.into_iter().map(|(k, v)| (k, v as f64 / z)).collect()
    })
}

proptest! {
    #[test]
    fn distribution_sums_to_one(sizes in sizes_strategy(), tau in 0.5f64..200.0) {
        let p = temperature_distribution(&sizes, tau).unwrap();
        prop_assert!((p.values().sum::<f64>() - 1.0).abs() < 1e-9);
        prop_assert!(p.values().all(|&x| x > 0.0 && x <= 1.0));
    }

    #[test]
    fn distribution_is_scale_invariant(sizes in sizes_strategy(), tau in 0.5f64..200.0, c in 1.0e-3f64..1.0e3) {
        let scaled: BTreeMap<String, f64> = sizes.iter().map(|(k, v)| (k.clone(), v * c)).collect();
        let a = temperature_distribution(&sizes, tau).unwrap();
        let b = temperature_distribution(&scaled, tau).unwrap();
        for (k, v) in &a {
            prop_assert!((v - b[k]).abs() < 1e-9);
        }
    }

    #[test]
    fn distribution_preserves_order(sizes in sizes_strategy(), tau in 0.5f64..200.0) {
        let p = temperature_distribution(&sizes, tau).unwrap();
        for (a, da) in &sizes {
            for (b, db) in &sizes {
                if da > db {
                    prop_assert!(p[a] >= p[b]);
                }
            }
        }
    }

    #[test]
    fn tau_one_is_proportional(sizes in sizes_strategy()) {
        let p = temperature_distribution(&sizes, 1.0).unwrap();
        let z: f64 = sizes.values().sum();
        for (k, v) in &sizes {
            prop_assert!((p[k] - v / z).abs() < 1e-12);
        }
    }

    #[test]
    fn higher_tau_flattens(sizes in sizes_strategy(), tau in 1.0f64..50.0) {
        let spread = |t: f64| {
            let p = temperature_distribution(&sizes, t).unwrap();
            let max = p.values().cloned().fold(f64::MIN, f64::max);
            let min = p.values().cloned().fold(f64::MAX, f64::min);
            max - min
        };
        prop_assert!(spread(tau * 2.0) <= spread(tau) + 1e-12);
    }

    #[test]
    fn allocation_is_exact(p in probs_strategy(), target in 0usize..20_000) {
        let counts = allocate(&p, target);
        prop_assert_eq!(counts.values().sum::<usize>(), target);
        for (k, &n) in &counts {
            prop_assert!((n as f64 - target as f64 * p[k]).abs() < 1.0);
        }
    }

    #[test]
    fn capped_allocation_respects_caps(p in probs_strategy(), target in 0usize..2000, cap_seed in 0usize..500) {
        let caps: BTreeMap<String, usize> = p.keys().enumerate().map(|(i, k)| (k.clone(), (cap_seed * (i + 3)) % 400)).collect();
        let counts = allocate_capped(&p, &caps, target);
        for (k, &n) in &counts {
            prop_assert!(n <= caps[k]);
        }
        prop_assert_eq!(counts.values().sum::<usize>(), target.min(caps.values().sum()));
    }

    #[test]
    fn draw_multiplicities_are_balanced(n_records in 1usize..30, n in 0usize..200, seed in any::<u64>()) {
        let mut corpus = BTreeMap::new();
        corpus.insert("aym".to_string(), (0..n_records).collect::<Vec<_>>());
        let mut counts = BTreeMap::new();
        counts.insert("aym".to_string(), n);
        let out = draw(&corpus, &counts, seed).unwrap();
        prop_assert_eq!(out.len(), n);
        let mut mult = vec![0usize; n_records];
        for i in out {
            mult[i] += 1;
        }
        let lo = n / n_records;
        prop_assert!(mult.iter().all(|&m| m == lo || m == lo + 1));
    }

    #[test]
    fn stats_are_additive(
        a in prop::collection::vec(("(aym|quy|grn)", "[a-z ]{0,30}"), 0..30),
        b in prop::collection::vec(("(aym|quy|grn)", "[a-z ]{0,30}"), 0..30),
    ) {
        let rec = |v: &Vec<(String, String)>| v.iter().map(|(l, t)| MonoRecord::new(l.as_str(), t.as_str(), "p")).collect::<Vec<_>>();
        let (ra, rb) = (rec(&a), rec(&b));
        let mut both = ra.clone();
        both.extend(rb.clone());
        let joint = compute_stats(&both, None).unwrap();
        let sum = compute_stats(&ra, None).unwrap() + compute_stats(&rb, None).unwrap();
        prop_assert_eq!(joint, sum);
    }

    #[test]
    fn bpe_never_exceeds_bytes(text in "\\PC{0,40}") {
        let vocab: HashMap<String, u32> = ["a", "b", "ab", "c", "abc"].iter().enumerate().map(|(i, t)| (t.to_string(), i as u32)).collect();
        let merges = vec![("a".to_string(), "b".to_string()), ("ab".to_string(), "c".to_string())];
        let model = BpeModel::new(vocab, merges, true).unwrap();
        let n = model.bpe_count(&text).unwrap();
        prop_assert!(n <= text.len());
        prop_assert_eq!(n == 0, text.is_empty());
    }

    #[test]
    fn global_shuffle_is_a_permutation(
        mono in prop::collection::vec(("(aym|quy)", "[a-z]{1,8}"), 0..40),
        npairs in 0usize..20,
        seed in any::<u64>(),
    ) {
        let mono: Vec<MonoRecord> = mono.iter().map(|(l, t)| MonoRecord::new(l.as_str(), t.as_str(), "p")).collect();
        let pairs: Vec<ParallelRecord> = (0..npairs).map(|i| ParallelRecord::new("spa", "aym", format!("s{i}"), format!("t{i}"), "p")).collect();
        let out = Mixer::new(MixerConfig::new(MixStrategy::MonoParallelSeparate, None, seed)).build(&mono, &pairs).unwrap();
        let mut got: Vec<String> = out.sequences.iter().map(|s| s.text.clone()).collect();
        let mut want: Vec<String> = mono.iter().map(|m| m.text.clone()).chain(pairs.iter().flat_map(|p| [p.src.clone(), p.tgt.clone()])).collect();
        got.sort();
        want.sort();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn ratio_count_is_floor(k in 0usize..=100, n in 0usize..20_000) {
        let r = k as f64 / 100.0;
        prop_assert_eq!(ratio_count(r, n), k * n / 100);
    }

    #[test]
    fn chrf_self_score_is_100(s in "\\PC{1,40}") {
        prop_assume!(!s.trim().is_empty());
        prop_assert!((chrf_segment(&s, &s, &ChrfParams::default()) - 100.0).abs() < 1e-9);
    }

    #[test]
    fn chrf_is_bounded(h in "\\PC{0,30}", r in "\\PC{0,30}") {
        let v = chrf_segment(&h, &r, &ChrfParams::default());
        prop_assert!((0.0..=100.0 + 1e-9).contains(&v));
    }

    #[test]
    fn duplicated_eval_set_scores_the_same(pairs in prop::collection::vec(("[a-zñ ]{0,20}", "[a-zñ ]{1,20}"), 1..15)) {
        let hyp: Vec<String> = pairs.iter().map(|p| p.0.clone()).collect();
        let refs: Vec<String> = pairs.iter().map(|p| p.1.clone()).collect();
        let once = chrf_corpus(&EvalSet::new("x", hyp.clone(), refs.clone()), &ChrfParams::default()).unwrap();
        let twice = chrf_corpus(
            &EvalSet::new("x", [hyp.clone(), hyp].concat(), [refs.clone(), refs].concat()),
            &ChrfParams::default(),
        )
        .unwrap();
        prop_assert!((once - twice).abs() < 1e-9);
    }

    #[test]
    fn seeded_shuffle_is_a_permutation(n in 0usize..200, seed in any::<u64>()) {
        let mut v: Vec<usize> = (0..n).collect();
        lowres_mt::seed::shuffle(&mut v, seed, "prop");
        v.sort_unstable();
        prop_assert_eq!(v, (0..n).collect::<Vec<_>>());
    }
}
