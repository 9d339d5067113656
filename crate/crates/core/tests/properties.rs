mod common;

use std::collections::BTreeSet;
use std::sync::OnceLock;

use ca_ps::digraph::{find_config_cycles, WordIndexer};
use ca_ps::theory::{euler_phi, lambda, limit_cdf_y};
use ca_ps::word::{divisors, shift_order};
use ca_ps::{Rule, Tile, Word};
use common::Matrix;
use proptest::prelude::*;

const CASES: u32 = 10_000;

fn rule_strategy(max_n: u32) -> impl Strategy<Value = Rule> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec(0..n, (n * n) as usize).prop_map(move |t| Rule::new(n, t).unwrap())
    })
}

fn rule_and_word(max_n: u32, max_len: usize) -> impl Strategy<Value = (Rule, Word)> {
    rule_strategy(max_n).prop_flat_map(move |r| {
        let n = r.n();
        (
            Just(r),
            prop::collection::vec(0..n, 1..=max_len).prop_map(|w| Word::new(w).unwrap()),
        )
    })
}

fn catalog() -> &'static Vec<(u32, Matrix)> {
    static CATALOG: OnceLock<Vec<(u32, Matrix)>> = OnceLock::new();
    CATALOG.get_or_init(|| common::simple_tile_catalog(4, 8))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(CASES))]

    #[test]
    fn evolution_commutes_with_rotation((rule, w) in rule_and_word(8, 10), i in 0usize..10, t in 0usize..6) {
        let i = i % w.len();
        let a = rule.evolve(&w.rotate(i), t).unwrap();
        let b = rule.evolve(&w, t).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert_eq!(x, &y.rotate(i));
        }
        prop_assert_eq!(rule.step(&w).into_states(), common::step(&rule, w.states()));
    }

    #[test]
    fn configuration_graph_is_functional(rule in rule_strategy(5), sigma in 1usize..=4) {
        let ix = WordIndexer::new(rule.n(), sigma).unwrap();
        let mut on_cycle = vec![false; ix.size()];
        for c in find_config_cycles(&rule, sigma).unwrap() {
            let p = c.words[0].period();
            for (k, w) in c.words.iter().enumerate() {
                let idx = ix.encode(w.states());
                prop_assert!(!on_cycle[idx], "word on two cycles");
                on_cycle[idx] = true;
                prop_assert_eq!(&rule.step(w), &c.words[(k + 1) % c.words.len()]);
                prop_assert_eq!(w.period(), p);
            }
        }
        // The periodic points are exactly the image of the size-fold iterate.
        let mut image = vec![false; ix.size()];
        for idx in 0..ix.size() {
            let mut w = ix.word(idx);
            for _ in 0..ix.size() {
                w = rule.step(&w);
            }
            image[ix.encode(w.states())] = true;
        }
        prop_assert_eq!(image, on_cycle);
    }

    #[test]
    fn rule_text_round_trips(rule in rule_strategy(14)) {
        let text = rule.format();
        let back = Rule::parse(&text, rule.n()).unwrap();
        prop_assert_eq!(&back, &rule);
        prop_assert_eq!(back.format(), text);
    }

    #[test]
    fn word_and_tile_round_trip((rule, w) in rule_and_word(12, 8), tau in 1usize..4) {
        let n = rule.n();
        prop_assert_eq!(Word::parse(&w.format(n), n).unwrap(), w.clone());
        let rows: Vec<Word> = (0..tau).map(|k| w.rotate(k)).collect();
        let tile = Tile::from_row_words(&rows).unwrap();
        let json = serde_json::to_string(&tile).unwrap();
        prop_assert_eq!(serde_json::from_str::<Tile>(&json).unwrap(), tile.clone());
        prop_assert_eq!(tile.canonical().to_rows(), common::canonical(&tile.to_rows()));
    }

    #[test]
    fn word_periods_and_rotations(w in prop::collection::vec(0u32..3, 1..12), i in 0usize..12) {
        let w = Word::new(w).unwrap();
        let r = w.rotate(i % w.len());
        prop_assert_eq!(r.period(), w.period());
        prop_assert_eq!(w.period(), common::period(w.states()));
        prop_assert_eq!(r.canonical_rotation(), w.canonical_rotation());
        prop_assert_eq!(w.canonical_rotation().canonical_rotation(), w.canonical_rotation());
    }

    #[test]
    fn lambda_is_symmetric(tau in 1u64..200, sigma in 1u64..200, y in 1u64..30) {
        prop_assert_eq!(lambda(tau, sigma), lambda(sigma, tau));
        let s = 1 + sigma % 6;
        let (a, b) = (limit_cdf_y(s, y), limit_cdf_y(s, y + 1));
        prop_assert!(a <= b && b < 1.0);
    }

    #[test]
    fn simple_tiles_repeat_by_rotation(k in any::<prop::sample::Index>()) {
        let (_, m) = &catalog()[k.index(catalog().len())];
        prop_assert!(common::repeat_structure_holds(m), "{:?}", m);
    }

    #[test]
    fn overlapping_simple_tiles_diverge(a in any::<prop::sample::Index>(), b in any::<prop::sample::Index>()) {
        let cat = catalog();
        let (x, y) = (&cat[a.index(cat.len())].1, &cat[b.index(cat.len())].1);
        if x != y && common::compatible(x, y) && !common::states(x).is_disjoint(&common::states(y)) {
            prop_assert!(common::has_diverging_neighbor(x, y), "{:?} {:?}", x, y);
        }
        let (tx, ty) = (Tile::from_rows(x.clone()).unwrap(), Tile::from_rows(y.clone()).unwrap());
        if tx.is_disjoint_from(&ty) {
            prop_assert!(tx.is_orthogonal_to(&ty));
        }
    }
}

#[test]
fn shift_orders_follow_totient() {
    for k in 1..=12 {
        for d in divisors(k) {
            let count = (0..k).filter(|&i| shift_order(i, k) == d).count() as u64;
            assert_eq!(count, euler_phi(d as u64), "k={k} d={d}");
        }
    }
}

#[test]
fn simple_tile_catalog_exhaustive_checks() {
    let cat = catalog();
    assert!(cat.len() >= 90, "{}", cat.len());
    for (_, m) in cat {
        assert!(common::repeat_structure_holds(m), "{m:?}");
        let t = Tile::from_rows(m.clone()).unwrap();
        assert!(t.is_simple() && t.is_valid());
        assert_eq!(
            t.row_shift_order().unwrap(),
            t.column_shift_order().unwrap()
        );
    }
    // Realized state counts are tau*sigma/d for d | gcd, capped by n.
    for n in 1..=4u32 {
        for tau in 1..=8usize {
            for sigma in 1..=8 / tau {
                let realized: BTreeSet<usize> = cat
                    .iter()
                    .filter(|(k, m)| *k == n && m.len() == tau && m[0].len() == sigma)
                    .map(|(_, m)| common::states(m).len())
                    .collect();
                let g = gcd(tau, sigma);
                let expect: BTreeSet<usize> = divisors(g)
                    .into_iter()
                    .map(|d| tau * sigma / d)
                    .filter(|&s| s <= n as usize)
                    .collect();
                assert_eq!(realized, expect, "n={n} tau={tau} sigma={sigma}");
            }
        }
    }
    let mut pairs = 0;
    for (i, (_, x)) in cat.iter().enumerate() {
        for (_, y) in &cat[i + 1..] {
            if x != y
                && common::compatible(x, y)
                && !common::states(x).is_disjoint(&common::states(y))
            {
                pairs += 1;
                assert!(common::has_diverging_neighbor(x, y), "{x:?} {y:?}");
            }
        }
    }
    assert!(pairs > 0);
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}
