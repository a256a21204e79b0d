mod common;

use std::collections::BTreeSet;

use common::tau_oracle;

use hypgrpd_core::hypgraph::four_point_delta;
use hypgrpd_core::quadratic::QSqrt;
use hypgrpd_core::selfsim::{all_words, WreathRecursion};
use hypgrpd_core::smale::sft::{in_stable_plaque, in_unstable_plaque, sample_biseqs};
use hypgrpd_core::smale::*;
use hypgrpd_core::words::Letter;
use proptest::prelude::*;

fn sft(words: &[&str]) -> SftSystem {
    let w: Vec<String> = words.iter().map(|s| s.to_string()).collect();
    SftSystem::from_prohibited_strs(None, &w).unwrap()
}

/// Words of length `n` that extend `pad` letters to both sides inside an
/// admissible word, by brute force over all words.
fn central_oracle(s: &SftSystem, n: usize, pad: usize) -> BTreeSet<Vec<Letter>> {
    all_words(s.alphabet().len(), n + 2 * pad).into_iter().filter(|w| s.admissible(w)).map(|w| w[pad..pad + n].to_vec()).collect()
}

#[test]
fn splice_example_full_shift() {
    let s = SftSystem::full_shift(2);
    let x = BiSeq::parse(&s, "(0).0(1)").unwrap();
    let y = BiSeq::parse(&s, "(10)1.(0)").unwrap();
    let z = splice(&s, &x, &y).unwrap();
    assert_eq!(z, BiSeq::parse(&s, "(10)1.0(1)").unwrap());
    assert!(in_stable_plaque(&x, &z));
    assert!(in_unstable_plaque(&y, &z));
    let w = BiSeq::parse(&s, "(0).(1)").unwrap();
    assert!(splice(&s, &x, &w).is_err());
}

#[test]
fn splice_rectangle_golden_mean() {
    let s = SftSystem::golden_mean();
    let pts = sample_biseqs(&s, 1, 2);
    let mut triples = 0;
    for x in &pts {
        assert_eq!(&splice(&s, x, x).unwrap(), x);
        for y in pts.iter().filter(|y| same_chart(&s, x, y)) {
            let xy = splice(&s, x, y).unwrap();
            assert!(xy.admissible(&s));
            // coordinate-wise: future of x, past of y
            for k in -6..=6 {
                assert_eq!(xy.at(k), if k >= 0 { x.at(k) } else { y.at(k) });
            }
            for z in pts.iter().filter(|z| same_chart(&s, x, z)) {
                let xz = splice(&s, x, z).unwrap();
                assert_eq!(splice(&s, x, &splice(&s, y, z).unwrap()).unwrap(), xz);
                assert_eq!(splice(&s, &xy, z).unwrap(), xz);
                triples += 1;
            }
        }
    }
    assert!(triples >= 100, "{triples}");
}

#[test]
fn splice_commutes_with_shift() {
    let s = SftSystem::golden_mean();
    let pts = sample_biseqs(&s, 1, 2);
    for x in &pts {
        assert_eq!(&x.shift().unshift(), x);
        for y in pts.iter().filter(|y| same_chart(&s, x, y) && same_chart(&s, &x.shift(), &y.shift())) {
            assert_eq!(splice(&s, &x.shift(), &y.shift()).unwrap(), splice(&s, x, y).unwrap().shift());
        }
    }
}

#[test]
fn fried_scale_cases() {
    let s = SftSystem::full_shift(2);
    let x = BiSeq::parse(&s, "(0).(0)").unwrap();
    assert_eq!(fried_logscale(&x, &x, 40), 40);
    let y = BiSeq::parse(&s, "(0).00000(1)").unwrap();
    assert_eq!(fried_logscale(&x, &y, 40), 5);
    let z = BiSeq::parse(&s, "(0)10000.(0)").unwrap();
    assert_eq!(fried_logscale(&x, &z, 40), 5);
    assert_eq!(fried_logscale(&x, &BiSeq::parse(&s, "(0).(1)").unwrap(), 40), 0);
    assert_eq!(fried_logscale(&x, &y, 3), 3);
}

#[test]
fn fried_scale_is_ultrametric_and_shift_lipschitz() {
    let s = SftSystem::golden_mean();
    let pts = sample_biseqs(&s, 1, 2);
    let h = 30;
    for x in pts.iter().take(40) {
        for y in pts.iter().take(40) {
            let d = fried_logscale(x, y, h);
            assert_eq!(d, fried_logscale(y, x, h));
            let ds = fried_logscale(&x.shift(), &y.shift(), h);
            assert!(ds + 1 >= d && ds <= d + 1 || d == h || ds == h);
            for z in pts.iter().take(20) {
                assert!(d >= fried_logscale(x, z, h).min(fried_logscale(z, y, h)));
            }
        }
    }
}

#[test]
fn dual_examples() {
    let s = sft(&["12"]);
    assert_eq!(s.dual().prohibited_strs(), vec!["21"]);
    let m = SftSystem::from_matrix(None, vec![vec![1, 0], vec![1, 1]]).unwrap();
    assert_eq!(m.dual().matrix().unwrap(), &vec![vec![1, 1], vec![0, 1]]);
    assert_eq!(m.dual().prohibited_strs(), vec!["10"]);
    assert_eq!(SftSystem::golden_mean().dual(), SftSystem::golden_mean());
    let f = SftSystem::free_group();
    assert!(f.is_reversal_invariant());
    assert_eq!(f.dual(), f);
    assert!(!s.is_reversal_invariant());
}

#[test]
fn json_roundtrip() {
    for s in [sft(&["12", "23"]), SftSystem::from_matrix(None, vec![vec![1, 1], vec![1, 0]]).unwrap()] {
        assert_eq!(SftSystem::from_json(&s.to_json()).unwrap(), s);
    }
    assert!(SftSystem::from_json(&serde_json::json!({"prohibited": ["11"], "matrix": [[1]]})).is_err());
}

#[test]
fn past_language_matches_brute_force() {
    for s in [SftSystem::golden_mean(), sft(&["12", "23"]), sft(&["01", "11"]), sft(&["001", "110"]), SftSystem::free_group()] {
        for n in 1..=4 {
            let pad = match s.alphabet().len() {
                2 => 6,
                3 => 3,
                _ => 2,
            };
            let central = central_oracle(&s, n, pad);
            assert_eq!(s.central_language(n), central, "{:?} n={n}", s.prohibited_strs());
            let past: BTreeSet<Vec<Letter>> = central.iter().map(|w| w.iter().rev().copied().collect()).collect();
            assert_eq!(s.past_language(n), past);
        }
    }
    // 1 never occurs in a two-sided sequence
    let s = sft(&["01", "11"]);
    assert_eq!(s.central_language(3), BTreeSet::from([vec![0, 0, 0]]));
}

#[test]
fn duality_certificates() {
    let r = duality_witness(&SftSystem::full_shift(2), 10);
    assert!(r.passed);
    assert_eq!(r.levels.iter().map(|l| l.past_words).collect::<Vec<_>>(), (1..=10).map(|n| 1usize << n).collect::<Vec<_>>());
    let r = duality_witness(&SftSystem::golden_mean(), 10);
    assert!(r.passed && r.mismatch.is_none());
    // Fibonacci counts
    assert_eq!(r.levels.iter().map(|l| l.past_words).collect::<Vec<_>>(), vec![2, 3, 5, 8, 13, 21, 34, 55, 89, 144]);
    let r = duality_witness(&sft(&["12", "23"]), 8);
    assert!(r.passed);
    assert_eq!(r.dual_prohibited, vec!["21", "32"]);
    assert!(duality_witness(&SftSystem::free_group(), 6).passed);
}

fn arb_sft() -> impl Strategy<Value = SftSystem> {
    (2usize..=3).prop_flat_map(|k| {
        let word = proptest::collection::vec(0..k as Letter, 1..=3);
        proptest::collection::vec(word, 0..5).prop_map(move |p| SftSystem::from_prohibited((0..k).map(|i| i.to_string()).collect(), p).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(48) })]

    #[test]
    fn dual_is_involution(s in arb_sft()) {
        prop_assert_eq!(s.dual().dual(), s);
    }

    #[test]
    fn duality_holds_for_random_sfts(s in arb_sft()) {
        prop_assert!(duality_witness(&s, 5).passed);
    }

    #[test]
    fn substitution_prefix_nesting(n in 0usize..7) {
        let a = AdicSystem::golden_example();
        let w = a.substitution_expand(&[0], n);
        let v = a.substitution_expand(&[0], n + 1);
        prop_assert!(v.starts_with(&w));
    }
}

#[test]
fn vershik_matches_recurrences() {
    let a = AdicSystem::golden_example();
    let mut checked = 0;
    for n in 1..=8 {
        for p in a.paths(n) {
            let s: Vec<char> = a.format_path(&p).chars().collect();
            let got = a.vershik_map(&p).ok().map(|q| a.format_path(&q).chars().collect::<Vec<_>>());
            assert_eq!(got, tau_oracle(&s), "{}", a.format_path(&p));
            checked += 1;
        }
    }
    assert!(checked > 1000);
    assert!(a.vershik_map(&a.parse_path("53").unwrap()).is_err());
    assert!(a.parse_path("14").is_ok() && a.parse_path("41").is_err());
}

#[test]
fn substitution_words() {
    let a = AdicSystem::golden_example();
    let tiles = |n| a.tile_word(&a.substitution_expand(&[a.vertex("A").unwrap()], n));
    assert_eq!(tiles(1), "AAB");
    assert_eq!(tiles(2), "AABAABAB");
    // string rewriting oracle
    let mut w = String::from("A");
    for n in 0..8 {
        assert_eq!(tiles(n), w);
        w = w.chars().map(|c| if c == 'A' { "AAB" } else { "AB" }).collect();
    }
    assert_eq!(a.substitution_matrix(), vec![vec![2, 1], vec![1, 1]]);
    assert!(AdicSystem::from_json(&a.to_json()).unwrap() == a);
}

#[test]
fn identity_substitution_fixes_seed() {
    let e = |l: &str, s: usize, r: usize| (l.to_string(), s, r);
    let a = AdicSystem::new(vec!["A".into(), "B".into()], vec![e("x", 0, 0), e("y", 1, 1)], vec![vec!["x".into()], vec!["y".into()]], None).unwrap();
    assert_eq!(a.substitution_expand(&[0, 1, 1], 5), vec![0, 1, 1]);
    assert!(tile_lengths(&a.substitution_matrix()).is_err());
}

fn exact(t: TileLengths) -> (QSqrt, Vec<QSqrt>) {
    match t {
        TileLengths::Exact { eigenvalue, lengths } => (eigenvalue, lengths),
        other => panic!("expected exact lengths, got {other:?}"),
    }
}

#[test]
fn tile_lengths_exact() {
    let (l, v) = exact(tile_lengths(&[vec![2, 1], vec![1, 1]]).unwrap());
    assert_eq!(l, QSqrt::ints(3, 1, 2, 5).unwrap());
    assert_eq!(v, vec![QSqrt::ints(1, 0, 1, 1).unwrap(), QSqrt::ints(-1, 1, 2, 5).unwrap()]);
    let (l, v) = exact(tile_lengths(&[vec![1, 1], vec![1, 0]]).unwrap());
    assert_eq!(l, QSqrt::ints(1, 1, 2, 5).unwrap());
    assert_eq!(v[1], QSqrt::ints(-1, 1, 2, 5).unwrap());
    assert!(tile_lengths(&[vec![1, 0], vec![0, 1]]).is_err());
    assert!(tile_lengths(&[vec![1, 1]]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(64) })]

    #[test]
    fn tile_lengths_are_eigenvectors(a in 1u64..6, b in 1u64..6, c in 1u64..6, d in 0u64..6) {
        let m = vec![vec![a, b], vec![c, d]];
        let (l, v) = exact(tile_lengths(&m).unwrap());
        let q = |x: u64| QSqrt::ints(x as i64, 0, 1, 5).unwrap();
        for i in 0..2 {
            let mv = q(m[i][0]).mul(&v[0]).add(&q(m[i][1]).mul(&v[1]));
            prop_assert!(mv.sub(&l.mul(&v[i])).is_zero());
        }
        prop_assert!(v[1].approx() > 0.0);
        // dominant root of the characteristic polynomial
        let (tr, det) = ((a + d) as f64, (a * d) as f64 - (b * c) as f64);
        let root = (tr + (tr * tr - 4.0 * det).sqrt()) / 2.0;
        prop_assert!((l.approx() - root).abs() < 1e-9);
    }
}

#[test]
fn tile_lengths_interval_for_three_letters() {
    let m = vec![vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]];
    match tile_lengths(&m).unwrap() {
        TileLengths::Interval { lo, hi, .. } => {
            let f = |s: &str| {
                let (p, q) = s.split_once('/').unwrap_or((s, "1"));
                p.parse::<f64>().unwrap() / q.parse::<f64>().unwrap()
            };
            assert!(f(&lo) <= 2.0 + 1e-12 && 2.0 - 1e-12 <= f(&hi));
            assert!(f(&hi) - f(&lo) < 1e-6);
        }
        other => panic!("{other:?}"),
    }
    let (lo, hi, _) = collatz_wielandt(&[vec![2, 1, 0], vec![1, 1, 1], vec![0, 1, 3]], 100);
    assert!(lo <= hi);
    assert!(is_primitive(&m) && !is_primitive(&[vec![0, 1], vec![1, 0]]));
}

fn is_factor(w: &str, big: &str) -> bool {
    big.contains(w)
}

#[test]
fn itineraries_are_substitution_factors() {
    let a = AdicSystem::golden_example();
    let p = a.minimal_path(8);
    assert_eq!(a.tile_word(&a.leaf_itinerary(&p, 1).unwrap()).len(), 1);
    let it = a.tile_word(&a.leaf_itinerary(&p, 8).unwrap());
    assert!(is_factor(&it, "AABAABAB"), "{it}");
    let big = a.tile_word(&a.substitution_expand(&[0], 10));
    for n in 1..=8 {
        for q in a.paths(n) {
            if let Ok(w) = a.leaf_itinerary(&q, 6) {
                assert!(is_factor(&a.tile_word(&w), &big), "{}", a.format_path(&q));
            }
        }
    }
}

#[test]
fn itinerary_frequencies_approach_perron_ratio() {
    let a = AdicSystem::golden_example();
    let w = a.tile_word(&a.leaf_itinerary(&a.minimal_path(14), 2000).unwrap());
    let na = w.chars().filter(|&c| c == 'A').count() as f64;
    let nb = w.len() as f64 - na;
    let golden = (1.0 + 5f64.sqrt()) / 2.0;
    assert!(((na / nb) - golden).abs() / golden < 0.1, "{na} {nb}");
}

fn nucleus(r: &WreathRecursion) -> Vec<hypgrpd_core::selfsim::GroupElement> {
    r.nucleus(2000).elements().unwrap().to_vec()
}

#[test]
fn adding_machine_gluing_is_a_cycle() {
    let r = WreathRecursion::adding_machine();
    let nuc = nucleus(&r);
    for n in 2..=4usize {
        let g = limit_space_gluing(&r, &nuc, n);
        assert_eq!(cycle_length(&g.graph()), Some(1 << n));
        // v ~ v + 1 (little-endian) and nothing else
        let words = all_words(2, n);
        let num = |w: &[Letter]| w.iter().rev().fold(0usize, |a, &x| 2 * a + x as usize);
        let mut oracle = BTreeSet::new();
        for v in &words {
            for w in &words {
                if (num(v) + 1) % (1 << n) == num(w) {
                    let (a, b) = (r.format_word(v), r.format_word(w));
                    oracle.insert(if a < b { (a, b) } else { (b, a) });
                }
            }
        }
        assert_eq!(g.pairs(), oracle);
    }
}

#[test]
fn trivial_group_gluing_is_discrete() {
    let r = WreathRecursion::trivial();
    let g = limit_space_gluing(&r, &nucleus(&r), 3);
    assert_eq!(g.identifications(), 0);
    assert_eq!(g.words.len(), 8);
}

#[test]
fn basilica_gluing_is_stable() {
    let r = WreathRecursion::basilica();
    let small = limit_space_gluing(&r, r.nucleus(500).elements().unwrap(), 3);
    let large = limit_space_gluing(&r, r.nucleus(5000).elements().unwrap(), 3);
    assert_eq!(small.pairs(), large.pairs());
    assert!(small.identifications() > 0);
    assert!(small.graph().is_connected());
    assert!(large.to_dot("g").starts_with("graph"));
}

#[test]
fn gamma_graph_small() {
    let r = WreathRecursion::adding_machine();
    let g = gamma_graph(&r, 1).unwrap();
    assert_eq!(g.graph.labels(), &["ε", "0", "1"]);
    assert_eq!(g.lambda, vec![0, 1, 1]);
    let mut arrows = g.graph.arrows();
    arrows.sort();
    assert_eq!(arrows, vec![(1, 0), (2, 0)]);
    assert!(g.graph.has_edge(1, 2));
    assert_eq!(g.graph.edge_count(), 3);
}

#[test]
fn gamma_graph_counts() {
    let r = WreathRecursion::basilica();
    for n in 1..=5usize {
        let g = gamma_graph(&r, n).unwrap();
        assert_eq!(g.len(), (1usize << (n + 1)) - 1);
        assert_eq!(g.graph.arrows().len(), (1usize << (n + 1)) - 2);
        assert!(g.graph.is_connected());
        // links stay inside a level
        for (u, v) in g.graph.edges().into_iter().filter(|&(u, v)| !g.graph.has_arrow(u, v) && !g.graph.has_arrow(v, u)) {
            assert_eq!(g.lambda[u], g.lambda[v]);
        }
    }
}

#[test]
fn basilica_gamma_delta_stabilizes() {
    let r = WreathRecursion::basilica();
    let deltas: Vec<f64> = (4..=7)
        .map(|n| {
            let g = gamma_graph(&r, n).unwrap();
            let d = four_point_delta(&g.graph, 0, n as u32).unwrap();
            *d.numer() as f64 / *d.denom() as f64
        })
        .collect();
    assert!((deltas[3] - deltas[2]).abs() <= 0.5, "{deltas:?}");
    assert!(deltas[3] <= 3.0, "{deltas:?}");
}

#[test]
fn biseq_parse_format_roundtrip() {
    let s = SftSystem::golden_mean();
    for x in sample_biseqs(&s, 1, 2) {
        assert_eq!(BiSeq::parse(&s, &x.format(s.alphabet())).unwrap(), x);
    }
    assert!(BiSeq::parse(&s, "(1).1(0)").is_err());
    assert!(BiSeq::parse(&s, "0.(0)").is_err());
}
