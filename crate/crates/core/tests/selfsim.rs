use std::collections::BTreeSet;

use hypgrpd_core::selfsim::{all_words, GroupElement, NucleusResult, Verdict, WreathRecursion};
use hypgrpd_core::words::{EvPeriodicWord, Letter};
use proptest::prelude::*;

fn increment(w: &[Letter]) -> Vec<Letter> {
    let mut v = w.to_vec();
    for x in v.iter_mut() {
        if *x == 0 {
            *x = 1;
            return v;
        }
        *x = 0;
    }
    v
}

/// Action signature on all words of length `n`.
fn signature(rec: &WreathRecursion, g: &GroupElement, n: usize) -> Vec<Vec<Letter>> {
    all_words(rec.degree(), n).iter().map(|w| rec.act(g, w)).collect()
}

/// Elements of word length at most `len` over the generators and inverses.
fn short_elements(rec: &WreathRecursion, len: usize) -> Vec<GroupElement> {
    let mut gens = Vec::new();
    for g in rec.generators() {
        gens.push(g.inverse());
        gens.push(g);
    }
    let mut out = vec![GroupElement::identity()];
    let mut layer = vec![GroupElement::identity()];
    for _ in 0..len {
        let mut next = Vec::new();
        for e in &layer {
            for s in &gens {
                next.push(e.mul(s));
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Sections at a deep level of short elements, up to action on words of length `n`.
fn nucleus_oracle(rec: &WreathRecursion, depth: usize, n: usize) -> BTreeSet<Vec<Vec<Letter>>> {
    let mut out = BTreeSet::new();
    for g in short_elements(rec, 2) {
        for v in all_words(rec.degree(), depth) {
            out.insert(signature(rec, &rec.section(&g, &v), n));
        }
    }
    out
}

fn nucleus_signatures(rec: &WreathRecursion, n: usize) -> BTreeSet<Vec<Vec<Letter>>> {
    let nuc = rec.nucleus(10_000);
    let NucleusResult::Nucleus(elems) = nuc else { panic!("expected a nucleus") };
    elems.iter().map(|g| signature(rec, g, n)).collect()
}

#[test]
fn adding_machine_examples() {
    let rec = WreathRecursion::adding_machine();
    let t = rec.generator("t").unwrap();
    assert_eq!(rec.act(&t, &[0, 1, 1]), vec![1, 1, 1]);
    for n in 1..=10 {
        assert_eq!(rec.act(&t, &vec![1; n]), vec![0; n]);
    }
    assert_eq!(rec.section(&t, &[1]), t);
    assert!(rec.section(&t, &[0]).is_identity_word());
}

#[test]
fn adding_machine_is_increment() {
    let rec = WreathRecursion::adding_machine();
    let t = rec.generator("t").unwrap();
    for n in 0..=12 {
        for w in all_words(2, n) {
            assert_eq!(rec.act(&t, &w), increment(&w));
        }
    }
}

#[test]
fn basilica_examples() {
    let rec = WreathRecursion::basilica();
    let a = rec.generator("a").unwrap();
    assert_eq!(rec.act(&a, &[1, 1]), vec![0, 1]);
    let aa = a.mul(&a);
    let s = rec.section(&aa, &[1]);
    for n in 0..=8 {
        for w in all_words(2, n) {
            let mut v = vec![1];
            v.extend(&w);
            let mut expect = rec.act(&aa, &[1]);
            expect.extend(rec.act(&s, &w));
            assert_eq!(rec.act(&aa, &v), expect);
        }
    }
}

#[test]
fn triviality() {
    let rec = WreathRecursion::adding_machine();
    let t = rec.generator("t").unwrap();
    assert_eq!(rec.is_trivial(&GroupElement::identity(), 10), Verdict::Yes);
    assert_eq!(rec.equal(&t, &t, 10), Verdict::Yes);
    let bas = WreathRecursion::basilica();
    let a = bas.generator("a").unwrap();
    let b = bas.generator("b").unwrap();
    let comm = a.mul(&b).mul(&a.inverse()).mul(&b.inverse());
    match bas.is_trivial(&comm, 1000) {
        Verdict::No(w) => assert_ne!(bas.act(&comm, &w), w),
        v => panic!("commutator verdict {v:?}"),
    }
    // a^2 is not trivial but a^2 = (b, b) acts trivially on the first letter
    assert!(bas.is_trivial(&a.pow(2), 1000).is_no());
}

#[test]
fn nucleus_presets() {
    let triv = WreathRecursion::trivial();
    let nuc = triv.nucleus(100);
    assert_eq!(nuc.elements().map(|e| e.len()), Some(1));

    let am = WreathRecursion::adding_machine();
    let n = am.nucleus(1000);
    let elems = n.elements().unwrap();
    assert_eq!(elems.len(), 3);
    let t = am.generator("t").unwrap();
    for g in [GroupElement::identity(), t.clone(), t.inverse()] {
        assert!(elems.iter().any(|e| am.equal(e, &g, 100).is_yes()));
    }
    assert_eq!(nucleus_signatures(&am, 8), nucleus_oracle(&am, 8, 8));
}

#[test]
fn basilica_nucleus_matches_oracle() {
    let rec = WreathRecursion::basilica();
    let sigs = nucleus_signatures(&rec, 8);
    assert_eq!(sigs, nucleus_oracle(&rec, 8, 8));
    assert_eq!(sigs.len(), 7);
    for g in short_elements(&rec, 1) {
        assert!(sigs.contains(&signature(&rec, &g, 8)));
    }
}

#[test]
fn nucleus_is_section_closed() {
    for rec in [WreathRecursion::adding_machine(), WreathRecursion::basilica()] {
        let nuc = rec.nucleus(1000);
        let elems = nuc.elements().unwrap();
        for g in elems {
            for x in 0..rec.degree() as Letter {
                let s = rec.section(g, &[x]);
                assert!(elems.iter().any(|e| rec.equal(e, &s, 1000).is_yes()));
            }
        }
    }
}

#[test]
fn non_contracting_reports_budget() {
    // g(0w) = 1 g(w), g(1w) = 0 g^2(w): sections grow without bound
    let rec = WreathRecursion::new(vec!["0".into(), "1".into()], vec!["g".into()], vec![vec![(1, vec![(0, false)]), (0, vec![(0, false), (0, false)])]]).unwrap();
    assert!(matches!(rec.nucleus(50), NucleusResult::NotContracting { .. }));
}

#[test]
fn schreier_graphs() {
    let bas = WreathRecursion::basilica();
    let s1 = bas.schreier_graph(1);
    let mut e = s1.edges.clone();
    e.sort();
    let l = |s: &str| s.to_string();
    assert_eq!(e, vec![(0, 0, l("b")), (0, 1, l("a")), (1, 0, l("a")), (1, 1, l("b"))]);
    for n in 1..=8 {
        assert!(bas.schreier_graph(n).is_connected(), "level {n}");
    }
    let am = WreathRecursion::adding_machine();
    for n in 1..=6 {
        let g = am.schreier_graph(n).graph();
        let size = 1usize << n;
        assert!(g.is_connected());
        if size > 2 {
            assert!((0..size).all(|v| g.neighbors(v).len() == 2));
            assert_eq!(g.edge_count(), size);
        }
    }
    assert!(bas.schreier_graph(2).to_dot("s").contains("label=\"a\""));
}

#[test]
fn orbits() {
    let am = WreathRecursion::adding_machine();
    assert_eq!(am.orbit(&[GroupElement::identity()], &[0, 1]), vec![vec![0, 1]]);
    assert_eq!(am.orbit(&am.generators(), &[0, 0, 0]).len(), 8);
    let bas = WreathRecursion::basilica();
    assert_eq!(bas.orbit(&bas.generators(), &[0, 0]), all_words(2, 2));
}

#[test]
fn periodic_action() {
    let am = WreathRecursion::adding_machine();
    let t = am.generator("t").unwrap();
    // 1^∞ + 1 = 0^∞
    let (img, trunc) = am.act_periodic(&t, &EvPeriodicWord::periodic(vec![1]), 16, 100);
    assert!(!trunc);
    assert_eq!(img, EvPeriodicWord::periodic(vec![0]));
    let w = EvPeriodicWord::new(vec![1, 1, 0], vec![0, 1]);
    let (img, trunc) = am.act_periodic(&t, &w, 16, 100);
    assert!(!trunc);
    assert_eq!(img.prefix(40), am.act(&t, &w.prefix(40)));
    let bas = WreathRecursion::basilica();
    let g = bas.parse_element("a*b^-1*a").unwrap();
    for (pre, per) in [(vec![], vec![1]), (vec![0, 1], vec![1, 0, 0])] {
        let w = EvPeriodicWord::new(pre, per);
        let (img, trunc) = bas.act_periodic(&g, &w, 32, 100);
        assert!(!trunc);
        assert_eq!(img.prefix(60), bas.act(&g, &w.prefix(60)));
    }
}

#[test]
fn json_round_trip() {
    let bas = WreathRecursion::basilica();
    let j = bas.to_json();
    assert_eq!(WreathRecursion::from_json(&j).unwrap(), bas);
    let bad = serde_json::json!({"alphabet": ["0", "1"], "generators": {"a": {"0": ["0", []], "1": ["0", []]}}});
    assert!(WreathRecursion::from_json(&bad).is_err());
    let unknown = serde_json::json!({"alphabet": ["0", "1"], "generators": {"a": {"0": ["1", ["c"]], "1": ["0", []]}}});
    assert!(WreathRecursion::from_json(&unknown).is_err());
}

#[test]
fn hausdorff_heuristic_flags_nothing_on_presets() {
    for rec in [WreathRecursion::adding_machine(), WreathRecursion::basilica()] {
        let nuc = rec.nucleus(1000);
        let rep = rec.hausdorff_heuristic(nuc.elements().unwrap(), 2, 4, 1000);
        assert!(rep.suspicious.is_empty());
        assert!(!rep.complete);
    }
}

#[test]
fn canonical_words() {
    let w = EvPeriodicWord::new(vec![0, 1, 0, 1], vec![0, 1, 0, 1]);
    assert!(w.pre().is_empty());
    assert_eq!(w.period(), &[0, 1]);
    assert_eq!(EvPeriodicWord::new(vec![1, 1, 0], vec![1, 0]), EvPeriodicWord::new(vec![1], vec![1, 0]));
    let alpha = vec!["0".to_string(), "1".to_string()];
    let p = EvPeriodicWord::parse(&alpha, "10(01)").unwrap();
    assert_eq!(p.format(&alpha), "10(01)");
    assert_eq!(EvPeriodicWord::parse(&alpha, "1(01)").unwrap().format(&alpha), "(10)");
    assert_eq!(p.prefix(7), vec![1, 0, 0, 1, 0, 1, 0]);
    assert_eq!(p.tail(3).prefix(4), vec![1, 0, 1, 0]);
}

fn element_strategy() -> impl Strategy<Value = Vec<(u16, bool)>> {
    proptest::collection::vec((0u16..2, any::<bool>()), 0..6)
}

fn build(w: &[(u16, bool)]) -> GroupElement {
    GroupElement::from_gens(w.iter().map(|&(idx, inv)| hypgrpd_core::selfsim::Gen { idx, inv }))
}

proptest! {
    #[test]
    fn action_is_a_group_action(g in element_strategy(), h in element_strategy(), w in proptest::collection::vec(0u8..2, 0..9)) {
        let rec = WreathRecursion::basilica();
        let (g, h) = (build(&g), build(&h));
        prop_assert_eq!(rec.act(&g, &rec.act(&h, &w)), rec.act(&g.mul(&h), &w));
        prop_assert_eq!(rec.act(&g.inverse(), &rec.act(&g, &w)), w);
    }

    #[test]
    fn section_identity(g in element_strategy(), v in proptest::collection::vec(0u8..2, 0..4), w in proptest::collection::vec(0u8..2, 0..6)) {
        let rec = WreathRecursion::basilica();
        let g = build(&g);
        let mut vw = v.clone();
        vw.extend(&w);
        let mut expect = rec.act(&g, &v);
        expect.extend(rec.act(&rec.section(&g, &v), &w));
        prop_assert_eq!(rec.act(&g, &vw), expect);
    }

    #[test]
    fn periodic_canonical_form_preserves_letters(pre in proptest::collection::vec(0u8..3, 0..6), per in proptest::collection::vec(0u8..3, 1..5)) {
        let w = EvPeriodicWord::new(pre.clone(), per.clone());
        for i in 0..40 {
            let raw = if i < pre.len() { pre[i] } else { per[(i - pre.len()) % per.len()] };
            prop_assert_eq!(w.letter(i), Some(raw));
        }
        prop_assert_eq!(EvPeriodicWord::new(w.pre().to_vec(), w.period().to_vec()), w);
    }
}
