use std::collections::BTreeSet;

use insight_core::feed::{apply_query, reorder_for_selection};
use insight_core::{FeedQuery, FeedStore, Insight, ModuleKind, Origin, SortOrder};
use proptest::prelude::*;

const FIELDS: [&str; 5] = ["a", "b", "c", "d", "e"];
const WORDS: [&str; 4] = ["alpha", "Beta", "gamma", "DELTA"];

fn insight_strategy() -> impl Strategy<Value = (ModuleKind, Vec<usize>, usize, usize)> {
    (
        prop::sample::select(ModuleKind::MODULES.to_vec()),
        prop::collection::vec(0..FIELDS.len(), 1..=2),
        0..WORDS.len(),
        0..5usize,
    )
}

/// Builds a feed through the store so `created_at` is assigned as in use.
fn feed_from(specs: &[(ModuleKind, Vec<usize>, usize, usize)]) -> Vec<Insight> {
    let store = FeedStore::new();
    for (i, (kind, fields, word, score)) in specs.iter().enumerate() {
        store
            .add(Insight {
                id: format!("i{i:03}"),
                kind: *kind,
                fields: fields.iter().map(|&f| FIELDS[f].to_string()).collect(),
                title: format!("{} {}", WORDS[*word], i % 3),
                description: format!("about {}", FIELDS[fields[0]]),
                // few distinct scores so ties are common
                score: *score as f64 / 4.0,
                chart_id: format!("c{i:03}"),
                created_at: 0,
                origin: Origin::Auto,
            })
            .unwrap();
    }
    store.snapshot()
}

fn query_strategy() -> impl Strategy<Value = FeedQuery> {
    (
        prop::option::of(prop::collection::btree_set(prop::sample::select(ModuleKind::MODULES.to_vec()), 0..4)),
        prop::option::of(prop::sample::select(vec!["a", "ALPHA", "beta", "1", "about c", "zzz", ""])),
        prop::sample::select(vec![SortOrder::Time, SortOrder::Score, SortOrder::Alpha]),
        any::<bool>(),
        prop::collection::btree_set(prop::sample::select(FIELDS.to_vec()), 0..3),
    )
        .prop_map(|(kinds, text, sort, group_by_kind, selected)| FeedQuery {
            kinds,
            text: text.map(str::to_string),
            sort,
            group_by_kind,
            selected_fields: selected.into_iter().map(str::to_string).collect(),
        })
}

fn ids(v: &[Insight]) -> Vec<String> {
    v.iter().map(|i| i.id.clone()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn query_is_deterministic_and_order_independent(
        specs in prop::collection::vec(insight_strategy(), 0..40),
        q in query_strategy(),
        rotate in 0usize..40,
    ) {
        let items = feed_from(&specs);
        let first = apply_query(&items, &q);
        prop_assert_eq!(&first, &apply_query(&items, &q));
        // the stored order of the input does not matter
        let mut shuffled = items.clone();
        if !shuffled.is_empty() {
            let r = rotate % shuffled.len();
            shuffled.rotate_left(r);
        }
        prop_assert_eq!(ids(&first), ids(&apply_query(&shuffled, &q)));
    }

    #[test]
    fn filter_and_search_commute(
        specs in prop::collection::vec(insight_strategy(), 0..40),
        q in query_strategy(),
    ) {
        let items = feed_from(&specs);
        let only_kinds = FeedQuery { kinds: q.kinds.clone(), sort: q.sort, ..FeedQuery::default() };
        let only_text = FeedQuery { text: q.text.clone(), sort: q.sort, ..FeedQuery::default() };
        let both = FeedQuery { kinds: q.kinds.clone(), text: q.text.clone(), sort: q.sort, ..FeedQuery::default() };
        let a = apply_query(&apply_query(&items, &only_kinds), &only_text);
        let b = apply_query(&apply_query(&items, &only_text), &only_kinds);
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(&a, &apply_query(&items, &both));
        // filters only remove items
        prop_assert!(a.len() <= items.len());
    }

    #[test]
    fn sorts_are_ordered(specs in prop::collection::vec(insight_strategy(), 0..40)) {
        let items = feed_from(&specs);
        let q = |sort| FeedQuery { sort, ..FeedQuery::default() };
        let by_time = apply_query(&items, &q(SortOrder::Time));
        prop_assert!(by_time.windows(2).all(|w| w[0].created_at > w[1].created_at));
        let by_score = apply_query(&items, &q(SortOrder::Score));
        prop_assert!(by_score.windows(2).all(|w| w[0].score > w[1].score
            || (w[0].score == w[1].score && w[0].created_at > w[1].created_at)));
        let by_title = apply_query(&items, &q(SortOrder::Alpha));
        prop_assert!(by_title.windows(2).all(|w| (&w[0].title, &w[0].id) < (&w[1].title, &w[1].id)));
    }

    #[test]
    fn grouping_is_a_stable_partition(specs in prop::collection::vec(insight_strategy(), 0..40)) {
        let items = feed_from(&specs);
        let flat = apply_query(&items, &FeedQuery::default());
        let grouped = apply_query(&items, &FeedQuery { group_by_kind: true, ..FeedQuery::default() });
        prop_assert_eq!(flat.len(), grouped.len());
        // each kind is contiguous
        let mut seen = Vec::new();
        for w in grouped.windows(2) {
            if w[0].kind != w[1].kind {
                prop_assert!(!seen.contains(&w[1].kind));
                seen.push(w[0].kind);
            }
        }
        for k in ModuleKind::MODULES {
            let a: Vec<&Insight> = flat.iter().filter(|i| i.kind == k).collect();
            let b: Vec<&Insight> = grouped.iter().filter(|i| i.kind == k).collect();
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn selection_reorder_is_a_stable_permutation(
        specs in prop::collection::vec(insight_strategy(), 0..40),
        selected in prop::collection::btree_set(prop::sample::select(FIELDS.to_vec()), 0..3),
    ) {
        let items = apply_query(&feed_from(&specs), &FeedQuery::default());
        let selected: BTreeSet<String> = selected.into_iter().map(str::to_string).collect();
        let out = reorder_for_selection(items.clone(), &selected);

        let mut a = ids(&items);
        let mut b = ids(&out);
        a.sort();
        b.sort();
        prop_assert_eq!(a, b);

        let touches = |i: &Insight| i.touches_any(selected.iter().map(String::as_str));
        let hot: BTreeSet<ModuleKind> = items.iter().filter(|i| touches(i)).map(|i| i.kind).collect();
        // hot kinds form the top block
        let top = out.iter().take_while(|i| hot.contains(&i.kind)).count();
        prop_assert_eq!(top, items.iter().filter(|i| hot.contains(&i.kind)).count());
        // within a kind, touching items lead and relative order survives
        for k in ModuleKind::MODULES {
            for class in [true, false] {
                let pick = |v: &[Insight]| -> Vec<String> {
                    v.iter()
                        .filter(|i| i.kind == k && (!hot.contains(&k) || touches(i) == class))
                        .map(|i| i.id.clone())
                        .collect()
                };
                prop_assert_eq!(pick(&items), pick(&out));
            }
            let kind_block: Vec<bool> = out.iter().filter(|i| i.kind == k).map(|i| touches(i)).collect();
            prop_assert!(kind_block.windows(2).all(|w| w[0] || !w[1]));
        }
        // items of cold kinds keep their relative order
        let cold = |v: &[Insight]| -> Vec<String> {
            v.iter().filter(|i| !hot.contains(&i.kind)).map(|i| i.id.clone()).collect()
        };
        prop_assert_eq!(cold(&items), cold(&out));
        if hot.is_empty() {
            prop_assert_eq!(&out, &items);
        }
        prop_assert_eq!(reorder_for_selection(out.clone(), &selected), out);
    }
}
