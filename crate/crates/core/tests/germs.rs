use std::collections::{BTreeSet, HashMap, VecDeque};
use std::time::Instant;

use hypgrpd_core::germs::*;
use hypgrpd_core::quadratic::Quad;
use hypgrpd_core::selfsim::Verdict;
use hypgrpd_core::smale::SftSystem;
use hypgrpd_core::{with_groupoid, EvPeriodicWord, GroupElement, WreathRecursion};
use num_rational::Rational64;
use proptest::prelude::*;

#[test]
fn doubling_ball_is_regular_tree() {
    let g = ExpandingShift::doubling();
    for r in 0..=6u32 {
        let b = cayley_ball(&g, r, 100).unwrap();
        assert_eq!(b.len(), 1 + 3 * ((1usize << r) - 1), "radius {r}");
        assert!(b.cocycle.graph.is_tree());
    }
    let b = cayley_ball(&g, 3, 100).unwrap();
    let gr = &b.cocycle.graph;
    for v in 0..b.len() {
        if b.dist[v] < 3 {
            let incoming = (0..b.len()).filter(|&u| gr.has_arrow(u, v)).count();
            assert_eq!(gr.out_neighbors(v).len(), 1);
            assert_eq!(incoming, 2);
        }
    }
    assert!(b.truncated);
}

#[test]
fn preimage_tree_counts_golden_mean_words() {
    let s = SftSystem::golden_mean();
    let t = EvPeriodicWord::periodic(vec![0]);
    let tree = tree_of_preimages(&s, &t, 8).unwrap();
    // words of length n without "11"
    let oracle: Vec<usize> = (0..=8).map(|n| (0..1u32 << n).filter(|w| w & (w >> 1) == 0).count()).collect();
    assert_eq!(tree.level_sizes, oracle);
    assert!(tree.graph.is_tree());
    let full = tree_of_preimages(&SftSystem::full_shift(3), &t, 4).unwrap();
    assert_eq!(full.level_sizes, vec![1, 3, 9, 27, 81]);
}

#[test]
fn preimage_tree_rejects_inadmissible_root() {
    let s = SftSystem::golden_mean();
    assert!(tree_of_preimages(&s, &EvPeriodicWord::periodic(vec![1]), 3).is_err());
}

/// Germs of `x ↦ 2^k x + c` at 0 reachable through the partial maps on ℤ.
fn dyadic_oracle(radius: u32) -> usize {
    let gens: [(i64, i64); 3] = [(1, 0), (1, 1), (1, -1)];
    let mut seen: BTreeSet<(i64, Rational64)> = BTreeSet::from([(0, Rational64::from_integer(0))]);
    let mut frontier = vec![(0i64, Rational64::from_integer(0))];
    for _ in 0..radius {
        let mut next = Vec::new();
        for &(k, c) in &frontier {
            // point reached from 0 is c
            for &(_, e) in &gens {
                let img = c * 2 + e;
                if seen.insert((k + 1, img)) {
                    next.push((k + 1, img));
                }
                let pre = (c - e) / 2;
                if pre.is_integer() && seen.insert((k - 1, pre)) {
                    next.push((k - 1, pre));
                }
            }
        }
        frontier = next;
    }
    seen.len()
}

#[test]
fn dyadic_ball_matches_oracle() {
    let g = DyadicAffine::new(0);
    for r in 0..=5 {
        assert_eq!(cayley_ball(&g, r, 10).unwrap().len(), dyadic_oracle(r), "radius {r}");
    }
}

#[test]
fn degree_is_exact_cocycle_on_presets() {
    for name in PRESETS {
        let spec = GroupoidSpec::preset(name).unwrap();
        let check = with_groupoid!(&spec, g => {
            let b = cayley_ball(g, 3, 2000).unwrap();
            degree_cocycle_check(g, &b).unwrap()
        });
        assert!(check.passed(), "{name}: {:?}", check.violations);
        assert!(check.products > 0 && check.quotients > 0);
    }
}

#[test]
fn basilica_shift_germ_equality() {
    let g = SelfSimilarShift::basilica();
    let unit = g.unit();
    let b = g.rec.generator("b").unwrap();
    // b fixes 0X^ω pointwise
    let gb = SsGerm { g: b.clone(), ..unit.clone() };
    assert_eq!(g.target(&gb).unwrap(), unit.source);
    assert_eq!(g.germ_equal(&unit, &gb, 200).unwrap(), Verdict::Yes);
    // b b^-1 written with an extended v
    let gbb = SsGerm { u: vec![0, 0], g: b.mul(&b.inverse()), v: vec![0, 0], source: unit.source.clone() };
    assert_eq!(g.germ_equal(&unit, &gbb, 200).unwrap(), Verdict::Yes);
    // unreduced a·a⁻¹
    let a = g.rec.generator("a").unwrap();
    let aa = SsGerm { g: GroupElement::from_gens(a.word().iter().copied().chain(a.inverse().word().iter().copied())), ..unit.clone() };
    assert_eq!(g.germ_equal(&unit, &aa, 200).unwrap(), Verdict::Yes);
}

#[test]
fn nontrivial_isotropy_germ() {
    // g = (g, h) fixes 0^∞ but moves 0^k 1 0 for every k
    let rec = WreathRecursion::new(
        vec!["0".into(), "1".into()],
        vec!["g".into(), "h".into()],
        vec![vec![(0, vec![(0, false)]), (1, vec![(1, false)])], vec![(1, vec![]), (0, vec![])]],
    )
    .unwrap();
    let sh = SelfSimilarShift::new(rec, EvPeriodicWord::periodic(vec![0])).unwrap();
    let unit = sh.unit();
    let gg = SsGerm { g: sh.rec.generator("g").unwrap(), ..unit.clone() };
    assert_eq!(sh.target(&gg).unwrap(), unit.source);
    match sh.germ_equal(&unit, &gg, 200).unwrap() {
        Verdict::No(w) => {
            let g = sh.rec.generator("g").unwrap();
            assert_ne!(sh.rec.act(&g, &w), w);
        }
        v => panic!("expected No, got {v:?}"),
    }
}

#[test]
fn basilica_shift_steps_and_inverse() {
    let g = SelfSimilarShift::basilica();
    let b = cayley_ball(&g, 3, 500).unwrap();
    for (i, h) in b.germs.iter().enumerate() {
        let inv = g.inverse(h).unwrap();
        let p = g.compose(h, &inv).unwrap().expect("composable");
        assert_eq!(g.degree(&p), 0);
        assert_eq!(g.target(&p).unwrap(), g.target(h).unwrap(), "vertex {i}");
        assert!(g.germ_equal(&p, &SsGerm { source: g.target(h).unwrap(), ..g.unit() }, 500).unwrap().is_yes());
    }
}

#[test]
fn golden_rotation_ball_is_connected_and_graded() {
    let g = QuadraticAffine::golden();
    let b = cayley_ball(&g, 3, 10).unwrap();
    assert!(b.cocycle.graph.is_connected());
    assert!(b.cocycle.validate().is_ok());
    let levels: BTreeSet<i64> = b.cocycle.lambda.iter().copied().collect();
    assert_eq!(levels, (-3..=3).collect());
}

#[test]
fn quadratic_parse_roundtrip() {
    let g = QuadraticAffine::golden();
    for (a, b) in [(0, 0), (1, 0), (0, 1), (0, -1), (2, -3), (-4, 5), (-1, 1)] {
        let x = Quad { a, b };
        assert_eq!(g.parse(&g.format(x)).unwrap(), x);
    }
    assert_eq!(g.parse("3*phi").unwrap(), Quad { a: 0, b: 3 });
    assert!(g.parse("3x").is_err());
}

/// BFS over `a + bφ` in `[lo, hi]` using floating point; the interval ends
/// are integers, which no other point of ℤ[φ] equals.
fn rotation_oracle(lo: f64, hi: f64, bound: u32) -> (usize, u32) {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let inside = |p: (i64, i64)| {
        let x = p.0 as f64 + p.1 as f64 * phi;
        x >= lo - 1e-9 && x <= hi + 1e-9
    };
    let mut dist: HashMap<(i64, i64), u32> = HashMap::from([((0, 0), 0)]);
    let mut q = VecDeque::from([(0i64, 0i64)]);
    while let Some(p) = q.pop_front() {
        if dist[&p] == bound {
            continue;
        }
        for d in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
            let n = (p.0 + d.0, p.1 + d.1);
            if inside(n) && !dist.contains_key(&n) {
                dist.insert(n, dist[&p] + 1);
                q.push_back(n);
            }
        }
    }
    let pts: Vec<_> = dist.keys().copied().collect();
    let mut diam = 0;
    for &s in &pts {
        let mut d: HashMap<(i64, i64), u32> = HashMap::from([(s, 0)]);
        let mut q = VecDeque::from([s]);
        while let Some(p) = q.pop_front() {
            for e in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
                let n = (p.0 + e.0, p.1 + e.1);
                if dist.contains_key(&n) && !d.contains_key(&n) {
                    d.insert(n, d[&p] + 1);
                    q.push_back(n);
                }
            }
        }
        diam = diam.max(*d.values().max().unwrap());
    }
    (pts.len(), diam)
}

#[test]
fn rotation_graph_matches_oracle() {
    let g = QuadraticAffine::golden().with_translations(vec![Quad::ONE, Quad { a: 0, b: 1 }], false);
    let r = |x: i64| Rational64::from_integer(x);
    for bound in [2, 4, 8, 12] {
        let rg = rotation_orbital_graph(&g, r(0), r(3), bound).unwrap();
        let (n, d) = rotation_oracle(0.0, 3.0, bound);
        assert_eq!((rg.points.len(), rg.diameter), (n, d), "bound {bound}");
    }
    // only 0 and 1 are reachable inside [0, 1]
    let small = rotation_orbital_graph(&g, r(0), r(1), 10).unwrap();
    assert_eq!(small.points, vec!["0", "1"]);
}

#[test]
fn rotation_graph_grows_linearly() {
    let g = QuadraticAffine::golden().with_translations(vec![Quad::ONE, Quad { a: 0, b: 1 }], false);
    let r = |x: i64| Rational64::from_integer(x);
    let sizes: Vec<usize> = [5, 10, 20, 40].iter().map(|&b| rotation_orbital_graph(&g, r(0), r(3), b).unwrap().points.len()).collect();
    for w in sizes.windows(2) {
        let ratio = w[1] as f64 / w[0] as f64;
        assert!((1.5..=2.5).contains(&ratio), "{sizes:?}");
    }
}

#[test]
fn boundary_scale_rejects_bad_rays() {
    let g = ExpandingShift::doubling();
    let b = cayley_ball(&g, 2, 10).unwrap();
    assert!(boundary_scale(&b.cocycle, &[], &[0]).is_err());
    let down = b.follow(0, &["shift".to_string()]).unwrap();
    assert!(boundary_scale(&b.cocycle, &down, &[0]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// For the doubling map at `0^∞`, two rays of prepended letters share
    /// descendants exactly up to their common prefix of steps.
    #[test]
    fn doubling_boundary_scale_is_common_prefix(r1 in proptest::collection::vec(0u8..2, 1..=5), r2 in proptest::collection::vec(0u8..2, 1..=5)) {
        let g = ExpandingShift::doubling();
        let b = cayley_ball(&g, 5, 10).unwrap();
        let lab = |r: &[u8]| r.iter().map(|x| format!("pre_{x}")).collect::<Vec<_>>();
        let p1 = b.follow(0, &lab(&r1)).unwrap();
        let p2 = b.follow(0, &lab(&r2)).unwrap();
        let s = boundary_scale(&b.cocycle, &p1, &p2).unwrap();
        let common = r1.iter().zip(&r2).take_while(|(a, b)| a == b).count();
        prop_assert_eq!(s.n, Some(common as i64));
    }

    #[test]
    fn dyadic_compose_inverse(k in -5i64..5, t in -50i64..50, s in -50i64..50) {
        let g = DyadicAffine::new(0);
        let x = AffineGerm { k, t, s };
        let inv = g.inverse(&x).unwrap();
        let p = g.compose(&x, &inv).unwrap().unwrap();
        prop_assert_eq!(g.degree(&p), 0);
        prop_assert_eq!(p.t, p.s);
        prop_assert_eq!(g.compose(&x, &x).unwrap().is_some(), t == s);
    }
}

#[test]
fn preset_balls_radius_six_are_fast() {
    for name in PRESETS {
        let t = Instant::now();
        let spec = GroupoidSpec::preset(name).unwrap();
        let (n, ok) = with_groupoid!(&spec, g => {
            let b = cayley_ball(g, 6, 4000).unwrap();
            (b.len(), degree_cocycle_check(g, &b).unwrap().passed())
        });
        eprintln!("{name}: {n} germs in {:?}", t.elapsed());
        assert!(ok);
    }
}
