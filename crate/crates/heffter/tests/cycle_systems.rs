use heffter::construct::develop_packing;
use heffter::cycles::sts::*;
use heffter::cycles::*;
use heffter::field::FieldCtx;
use heffter::search::{DifferencePacking, Ruler};

fn space71() -> (FieldCtx, heffter::designs::HeffterSpace) {
    let ctx = FieldCtx::build(71, 1, None, None).unwrap();
    let packing = DifferencePacking { rulers: vec![Ruler::from_codes(&[1, 25, 49, 43, 24])] };
    let space = develop_packing(&ctx, &packing).unwrap();
    (ctx, space)
}

#[test]
fn base_cycles_f1_f2() {
    let (ctx, space) = space71();
    let f1 = base_cycles(&ctx, &space.class_system(0)).unwrap();
    let printed_f1: [[u64; 5]; 7] = [
        [1, 25, 50, 22, 0], [45, 60, 49, 67, 0], [37, 2, 4, 33, 0], [32, 19, 38, 65, 0],
        [20, 3, 6, 14, 0], [48, 64, 57, 62, 0], [30, 40, 9, 21, 0],
    ];
    for (c, row) in f1.iter().zip(printed_f1) {
        let got: Vec<u64> = c.vertices().iter().map(|e| e.0).collect();
        assert_eq!(got, row.to_vec());
    }
    let f2 = base_cycles(&ctx, &space.class_system(1)).unwrap();
    let printed_f2: [[u64; 5]; 7] = [
        [49, 18, 36, 13, 0], [4, 29, 58, 17, 0], [38, 27, 54, 55, 0], [6, 8, 16, 61, 0],
        [57, 5, 10, 47, 0], [9, 12, 24, 56, 0], [50, 43, 15, 35, 0],
    ];
    for (c, row) in f2.iter().zip(printed_f2) {
        let got: Vec<u64> = c.vertices().iter().map(|e| e.0).collect();
        assert_eq!(got, row.to_vec());
    }
}

#[test]
fn five_systems_decompose_and_orthogonal() {
    let (ctx, space) = space71();
    let mut systems = Vec::new();
    for i in 0..5 {
        let base = base_cycles(&ctx, &space.class_system(i)).unwrap();
        let rep = verify_base_cycles(&ctx, &base);
        assert!(rep.valid(), "class {i}");
        let full = develop_cycle_system(&ctx, &base).unwrap();
        assert_eq!(full.len(), 497);
        let edges: usize = full.iter().map(|c| c.k()).sum();
        assert_eq!(edges, 2485);
        systems.push((base, full));
    }
    for i in 0..5 {
        for j in i + 1..5 {
            let w = systems_orthogonal(&systems[i].1, &systems[j].1).unwrap();
            assert!(w.orthogonal, "pair ({i},{j})");
            let wb = systems_orthogonal_base(&ctx, &systems[i].0, &systems[j].0).unwrap();
            assert_eq!(w.orthogonal, wb.orthogonal, "compact vs materialized at ({i},{j})");
        }
    }
    // a system is never orthogonal to itself
    let w = systems_orthogonal(&systems[0].1, &systems[0].1).unwrap();
    assert!(!w.orthogonal);
}

#[test]
fn sts9_enumeration_and_omega() {
    let all = enumerate_all(9);
    assert_eq!(all.len(), 840);
    let mut disjoint_pairs = 0usize;
    for i in 0..all.len() {
        for j in i + 1..all.len() {
            let rep = sts_super_orthogonal(&all[i], &all[j]).unwrap();
            assert_eq!(rep.implication, rep.factor_bound, "formulations disagree at ({i},{j})");
            if rep.disjoint {
                disjoint_pairs += 1;
                assert!(!rep.super_orthogonal(), "omega(9)=1 violated at ({i},{j})");
            }
        }
    }
    assert!(disjoint_pairs > 0);
}

#[test]
fn super_orthogonal_pair_at_19() {
    let pair = find_super_orthogonal_pair(19, 0x4865ff as u64);
    let (a, b) = pair.expect("a super-orthogonal pair of STS(19) exists");
    let rep = sts_super_orthogonal(&a, &b).unwrap();
    assert!(rep.super_orthogonal());
    assert_eq!(rep.implication, rep.factor_bound);
}
