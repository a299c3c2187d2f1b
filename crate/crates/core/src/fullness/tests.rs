use super::*;
use crate::core_model::git_form;
use crate::exceptionality::euler_pairing;

fn set(n: usize, m: &[usize]) -> MarkingSet {
    MarkingSet::new(n, m).unwrap()
}

fn tags(terms: &[Term], degree: usize) -> BTreeSet<Tag> {
    terms.iter().filter(|t| t.degree == degree).map(|t| t.tag).collect()
}

#[test]
fn odd_koszul_examples() {
    let k = koszul_terms(KoszulKind::OddType1, 3, &set(3, &[1, 2]), (set(3, &[]), 2)).unwrap();
    assert_eq!(tags(&k.terms, 0), BTreeSet::from([Tag::l(set(3, &[]), 2)]));
    assert_eq!(tags(&k.terms, 1), BTreeSet::from([Tag::l(set(3, &[1]), 1), Tag::l(set(3, &[2]), 1)]));
    assert_eq!(tags(&k.terms, 2), BTreeSet::from([Tag::l(set(3, &[1, 2]), 0)]));

    let k = koszul_terms(KoszulKind::OddType1, 3, &set(3, &[2, 3]), (set(3, &[1]), 1)).unwrap();
    assert_eq!(tags(&k.terms, 0), BTreeSet::from([Tag::l(set(3, &[1]), 1)]));
    assert_eq!(tags(&k.terms, 1), BTreeSet::from([Tag::l(set(3, &[1, 2]), 0), Tag::l(set(3, &[1, 3]), 0)]));
    assert_eq!(tags(&k.terms, 2), BTreeSet::from([Tag::l(set(3, &[1, 2, 3]), -1)]));

    assert!(koszul_terms(KoszulKind::OddType1, 3, &set(3, &[1]), (set(3, &[]), 2)).is_err());
    assert!(koszul_terms(KoszulKind::OddType1, 3, &set(3, &[1, 2]), (set(3, &[]), 1)).is_err());
    assert!(koszul_terms(KoszulKind::EvenK1, 3, &set(3, &[1, 2]), (set(3, &[]), 2)).is_err());
}

#[test]
fn even_koszul_k2_example() {
    let e = set(4, &[1, 2]);
    for p in [-2, 0, 4] {
        let k = koszul_terms(KoszulKind::EvenK2, 4, &e, (e, p)).unwrap();
        let r = |m: &[usize], q| Tag::line(BundleKind::R, set(4, m), q);
        assert_eq!(tags(&k.terms, 0), BTreeSet::from([r(&[1, 2], p)]));
        assert_eq!(tags(&k.terms, 1), BTreeSet::from([r(&[1], p - 1), r(&[2], p - 1)]));
        assert_eq!(tags(&k.terms, 2), BTreeSet::from([r(&[], p - 2)]));
    }
    assert!(koszul_terms(KoszulKind::EvenK2, 4, &set(4, &[1, 3]), (set(4, &[1]), 1)).is_err());
    assert!(koszul_terms(KoszulKind::EvenK1, 4, &set(4, &[1, 3]), (set(4, &[1]), 1)).is_err());
}

#[test]
fn quotient_chain_examples() {
    let c = quotient_chain(4, Relation::LtoR, &MarkingSet::full(4), 2).unwrap();
    assert_eq!(c.quotients.len(), 6);
    assert!(c.quotients.iter().all(|&(_, u, v)| (u, v) == (-1, 0)));
    assert!(quotient_chain(4, Relation::LtoQ, &MarkingSet::empty(4), 0).unwrap().quotients.is_empty());
    let c = quotient_chain(4, Relation::RtoV, &set(4, &[1, 2]), 0).unwrap();
    assert_eq!(c.quotients, vec![(set(4, &[3, 4]), 0, -1)]);
    assert!(quotient_chain(4, Relation::RtoV, &set(4, &[1]), 0).is_err());
    assert!(quotient_chain(5, Relation::RtoV, &set(5, &[1]), 1).is_err());
}

#[test]
fn pairing_matches_gram_entries() {
    for n in [2usize, 3, 4, 5, 6] {
        let mut k = KPairing::new(n).unwrap();
        let items = k.items().to_vec();
        for (j, y) in items.iter().enumerate() {
            let v = k.vector(&Tag::from_item(y)).unwrap().to_vec();
            for (i, x) in items.iter().enumerate() {
                assert_eq!(v[i], euler_pairing(x, y).unwrap() as i128, "n={n} {x} {y}");
            }
            assert_eq!(v[j], 1);
        }
    }
}

#[test]
fn pushforward_target_counts() {
    assert_eq!(pushforward_targets(3).unwrap().len(), 6);
    let t2 = pushforward_targets(2).unwrap();
    assert_eq!(t2, vec![Tag::l(MarkingSet::empty(2), 0), Tag::line(BundleKind::V, MarkingSet::full(2), 0)]);
    let b = git_form(BundleKind::V, 2, &MarkingSet::full(2), 0).unwrap();
    assert_eq!(b, git_form(BundleKind::L, 2, &MarkingSet::full(2), 0).unwrap());
    let e = set(4, &[1, 2]);
    let v = git_form(BundleKind::V, 4, &e, 0).unwrap();
    assert_eq!(v.exponents, vec![-1, -1, 0, 0]);
    assert_eq!(v.character, 0);
    for t in MarkingSet::half_sets(4) {
        assert_eq!(v.exc(&t), (1 - e.intersection(&t.complement()).len() as i64).abs());
    }
    assert!(pushforward_targets(1).is_err());
}

#[test]
fn odd_examples() {
    let c = generate_odd(3, &MarkingSet::empty(3), 2).unwrap();
    // L_{{1},1} and L_{{2},1} first, then L_{∅,2} over I = {1,2}
    assert_eq!(c.nodes.len(), 3);
    assert!(c.nodes.iter().all(|x| matches!(&x.step, Step::Koszul(k) if k.kind == KoszulKind::OddType1)));
    assert!(matches!(&c.nodes[2].step, Step::Koszul(k) if k.i == set(3, &[1, 2])));
    assert!(verify_certificate(&c).unwrap().passed());
    let leaf = generate_odd(3, &set(3, &[1, 2]), 0).unwrap();
    assert!(leaf.nodes.is_empty());
    assert!(verify_certificate(&leaf).unwrap().passed());
    let c = generate_odd(5, &MarkingSet::empty(5), 4).unwrap();
    assert!(verify_certificate(&c).unwrap().passed());
    assert!(c.leaves.iter().all(|it| match it {
        CollectionItem::LineBundle { e, p } => crate::core_model::score(5, e, *p) <= 2,
        _ => false,
    }));
}

#[test]
fn even_examples() {
    let leaf = generate_even(4, &Tag::l(set(4, &[1, 2]), 0)).unwrap();
    assert!(leaf.nodes.is_empty());
    let c = generate_even(4, &Tag::line(BundleKind::R, MarkingSet::full(4), 2)).unwrap();
    let check = verify_certificate(&c).unwrap();
    assert!(check.passed(), "{:?}", check.failures);
    let c = generate_even(2, &Tag::l(MarkingSet::empty(2), 2)).unwrap();
    let check = verify_certificate(&c).unwrap();
    assert!(check.passed(), "{:?}", check.failures);
}

#[test]
fn negative_certificates() {
    let mut c = generate_odd(3, &MarkingSet::empty(3), 2).unwrap();
    let bad = CollectionItem::LineBundle { e: MarkingSet::full(3), p: 3 };
    c.leaves[0] = bad;
    assert!(verify_certificate(&c).unwrap().failed('b'));

    let mut c = generate_odd(3, &MarkingSet::empty(3), 2).unwrap();
    if let Step::Koszul(k) = &mut c.nodes[1].step {
        k.terms[1].multiplicity = 2;
    }
    let r = verify_certificate(&c).unwrap();
    assert!(r.failed('d') && r.failed('c'));

    let mut c = generate_odd(3, &MarkingSet::empty(3), 2).unwrap();
    c.nodes.swap(1, 2);
    c.nodes[1].id = 1;
    c.nodes[2].id = 2;
    assert!(verify_certificate(&c).unwrap().failed('a'));
}

#[test]
fn json_round_trip() {
    let c = generate_even(4, &Tag::line(BundleKind::V, MarkingSet::full(4), 2)).unwrap();
    let back = GenerationCertificate::from_json(&c.to_json().unwrap()).unwrap();
    assert_eq!(back, c);
    let bad = c.to_json().unwrap().replace(CERTIFICATE_SCHEMA, "other/9");
    assert!(GenerationCertificate::from_json(&bad).is_err());
}

#[test]
fn small_fullness() {
    for n in 2..=5 {
        let r = verify_fullness(n).unwrap();
        let bad: Vec<_> = r.targets.iter().filter(|t| !t.passed).collect();
        assert!(bad.is_empty(), "n={n}: {bad:?}");
    }
}
