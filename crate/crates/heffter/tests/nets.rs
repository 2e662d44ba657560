use heffter::construct::{builtin, check_net_seed, net_ag2_11, net_via_roots};
use heffter::designs::{density, verify_heffter_space, ReportKind};
use heffter::field::FieldCtx;

#[test]
fn net163_matches_paper() {
    let ctx = FieldCtx::build(163, 1, None, None).unwrap();
    assert_eq!(ctx.generator().0, 2);
    let seed = builtin::net_seed_163(&ctx);
    assert_eq!(check_net_seed(&ctx, &seed).unwrap(), 3);
    let (space, m) = net_via_roots(&ctx, &seed).unwrap();
    let report = verify_heffter_space(&ctx, &space);
    assert!(report.valid());
    assert_eq!(report.kind, ReportKind::Net);
    assert_eq!(report.v, 81);
    assert_eq!(report.r, 4);
    let row1: Vec<u64> = m.row(1).iter().map(|e| e.0).collect();
    assert_eq!(&row1[..3], &[40, 80, 43]);
    // alpha exponents of Y: dlog base 2, congruent to i mod 9
    for (i, &y) in seed.y.iter().enumerate() {
        assert_eq!(ctx.dlog(y).unwrap() % 9, i as u64 % 9);
    }
}

#[test]
fn nets_883_and_1459() {
    for (q, vv, k) in [(883u64, 441usize, 21), (1459, 729, 27)] {
        let ctx = FieldCtx::build(q, 1, None, None).unwrap();
        let seed = if q == 883 { builtin::net_seed_883(&ctx) } else { builtin::net_seed_1459(&ctx) };
        let (space, _m) = net_via_roots(&ctx, &seed).unwrap();
        let report = verify_heffter_space(&ctx, &space);
        assert!(report.valid(), "q={q}: {}", report.summary());
        assert_eq!(report.kind, ReportKind::Net);
        assert_eq!(report.v, vv);
        assert_eq!(report.class_sizes().unwrap(), vec![k; 4]);
    }
}

#[test]
fn ag211_net() {
    let ctx = builtin::gf243();
    let labeling = builtin::ag211_labeling(&ctx);
    // Y dlog permutation mod 11
    let perm: Vec<u64> = labeling.y.iter().map(|&y| ctx.dlog(y).unwrap() % 11).collect();
    assert_eq!(perm, vec![0, 1, 7, 3, 4, 5, 10, 8, 6, 9, 2]);
    let (space, m) = net_ag2_11(&ctx, &labeling).unwrap();
    let report = verify_heffter_space(&ctx, &space);
    assert!(report.valid(), "{}", report.summary());
    assert_eq!(report.kind, ReportKind::Net);
    assert_eq!((report.v, report.r), (121, 9));
    assert_eq!(density(&ctx, &space).unwrap(), num_rational::Ratio::new(3i64, 4));
    assert_eq!(ctx.coeff_string(m.get(0, 0)), "10000");
    assert_eq!(ctx.coeff_string(m.get(0, 1)), "01000");
}

#[test]
fn ag211_slope4_fails() {
    use heffter::construct::{ConstructError, Slope, SlopeLabeling};
    let ctx = builtin::gf243();
    let mut labeling = builtin::ag211_labeling(&ctx);
    labeling.slopes = vec![Slope::Finite(4)];
    let lab = SlopeLabeling { y: labeling.y.clone(), slopes: vec![Slope::Finite(4)] };
    match net_ag2_11(&ctx, &lab) {
        Err(ConstructError::IdentityViolated(Slope::Finite(4))) => {}
        other => panic!("expected identity violation at slope 4, got {other:?}"),
    }
}
