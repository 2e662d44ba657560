use heffter::field::{Elem, FieldCtx};
use heffter::search::*;

#[test]
fn printed_rulers_verify() {
    let data: [(u64, &[u64]); 6] = [
        (67, &[1, 10, 56]),
        (71, &[1, 25, 49, 43, 24]),
        (211, &[1, 4, 82, 64, 154, 59, 58]),
        (271, &[1, 36, 110, 44, 179, 56, 224, 156, 7]),
        (419, &[1, 4, 148, 64, 388, 45, 226, 363, 48, 73, 316]),
        (599, &[1, 49, 515, 245, 181, 526, 117, 34, 332, 432, 130, 424, 9]),
    ];
    for (q, codes) in data {
        let ctx = FieldCtx::build(q, 1, None, None).unwrap();
        let elems: Vec<Elem> = codes.iter().map(|&c| Elem(c)).collect();
        let report = verify_ruler(&ctx, codes.len(), &elems).unwrap();
        assert!(report.is_heffter_ruler(), "q={q}: {:?}", report.defects);
        assert!(report.simple, "q={q} printed order should be simple");
    }
}

#[test]
fn ruler_h3_failure() {
    let ctx = FieldCtx::build(67, 1, None, None).unwrap();
    let elems = [Elem(1), Elem(10), Elem(55)];
    let report = verify_ruler(&ctx, 3, &elems).unwrap();
    assert!(!report.zero_sum);
    assert!(!report.is_heffter_ruler());
}

#[test]
fn search_small_k3() {
    let ctx19 = FieldCtx::build(19, 1, None, None).unwrap();
    assert!(search_rulers(&ctx19, 3, SearchMode::All).unwrap().is_empty());

    let ctx67 = FieldCtx::build(67, 1, None, None).unwrap();
    let found = search_rulers(&ctx67, 3, SearchMode::All).unwrap();
    assert!(!found.is_empty());
    let target = Ruler::from_codes(&[1, 10, 56]).canonical_form(&ctx67);
    assert!(found.iter().any(|r| r.canonical_form(&ctx67) == target));
}

#[test]
fn search_k5_below_71() {
    for q in [11u64, 31] {
        let ctx = FieldCtx::build(q, 1, None, None).unwrap();
        assert!(search_rulers(&ctx, 5, SearchMode::All).unwrap().is_empty(), "q={q}");
    }
    let ctx71 = FieldCtx::build(71, 1, None, None).unwrap();
    let found = search_rulers(&ctx71, 5, SearchMode::All).unwrap();
    let target = Ruler::from_codes(&[1, 25, 49, 43, 24]).canonical_form(&ctx71);
    assert!(found.iter().any(|r| r.canonical_form(&ctx71) == target));
}

#[test]
fn inequivalent_table_spot() {
    for (q, expected) in [(19u64, 0usize), (67, 1), (151, 2), (163, 2), (199, 3)] {
        let ctx = FieldCtx::build(q, 1, None, None).unwrap();
        assert_eq!(enumerate_inequivalent_rulers(&ctx, 3).unwrap().count(), expected, "q={q}");
    }
}

#[test]
fn q151_k5_facts() {
    let ctx = FieldCtx::build(151, 1, None, None).unwrap();
    let ineq = enumerate_inequivalent_rulers(&ctx, 5).unwrap();
    assert_eq!(ineq.count(), 26);
    // printed packing verifies
    let packing = DifferencePacking {
        rulers: vec![
            Ruler::from_codes(&[1, 36, 58, 110, 97]),
            Ruler::from_codes(&[1, 78, 22, 139, 62]),
        ],
    };
    assert!(verify_packing(&ctx, &packing).unwrap().valid());
    // a 2-packing is found, no 3-packing exists
    assert!(search_packing(&ctx, 5, 2, PackingMode::Exhaustive).unwrap().is_some());
    assert!(search_packing(&ctx, 5, 3, PackingMode::Exhaustive).unwrap().is_none());
}

#[test]
fn weil_values() {
    let b = weil_threshold(5, 1);
    assert_eq!(b.simple_bound, 25000);
    assert_eq!(b.q_floor, 22047);
    assert!(b.q_below_simple);
    assert!(weil_q_below(10, 100, 25000));
    let b3 = weil_threshold(3, 1);
    assert_eq!(b3.simple_bound, 1944);
    for k in [3u64, 5, 7, 9, 11, 13] {
        for n in 1..=10 {
            assert!(weil_threshold(k, n).q_below_simple, "k={k} n={n}");
        }
    }
}

#[test]
fn greedy_small() {
    // smallest qualifying prime power above 8*3^5 = 1944 with q = 7 (mod 12)
    let q = (1945u64..).find(|&q| q % 12 == 7 && heffter::field::is_prime(q)).unwrap();
    assert_eq!(q, 1951);
    let ctx = FieldCtx::build(q, 1, None, None).unwrap();
    let p = search_packing(&ctx, 3, 1, PackingMode::Greedy { seed: None }).unwrap().unwrap();
    assert!(verify_packing(&ctx, &p).unwrap().valid());
}

#[test]
fn net_seed_search_163() {
    let ctx = FieldCtx::build(163, 1, None, None).unwrap();
    let seed = search_net_seed(&ctx, NetSeedStrategy::Backtrack).unwrap();
    assert!(seed.is_some());
    let seed = seed.unwrap();
    assert_eq!(heffter::construct::check_net_seed(&ctx, &seed).unwrap(), 3);
}

#[test]
fn net_seed_n1_rejected() {
    let ctx = FieldCtx::build(19, 1, None, None).unwrap();
    assert_eq!(search_net_seed(&ctx, NetSeedStrategy::Backtrack).unwrap(), None);
}
#[test]
fn k3_inequivalent_full_table() {
    let table: [(u64, usize); 19] = [
        (19, 0), (31, 0), (43, 0), (67, 1), (79, 0), (103, 0), (127, 1), (139, 1),
        (151, 2), (163, 2), (199, 3), (211, 3), (223, 2), (271, 3), (283, 2),
        (307, 3), (331, 1), (367, 2), (379, 2),
    ];
    for (q, expected) in table {
        let ctx = FieldCtx::build(q, 1, None, None).unwrap();
        let got = enumerate_inequivalent_rulers(&ctx, 3).unwrap().count();
        assert_eq!(got, expected, "q={q}");
    }
}

#[test]
fn greedy_25031() {
    // smallest prime power = 11 (mod 20) above 25000
    let q = (25001u64..).find(|&q| q % 20 == 11 && heffter::field::is_prime(q)).unwrap();
    assert_eq!(q, 25031);
    let ctx = FieldCtx::build(q, 1, None, None).unwrap();
    let p = search_packing(&ctx, 5, 1, PackingMode::Greedy { seed: None }).unwrap().unwrap();
    assert!(verify_packing(&ctx, &p).unwrap().valid());
    assert!(verify_packing(&ctx, &p).unwrap().simple());
}
