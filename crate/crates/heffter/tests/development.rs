use heffter::construct::{develop_packing, extend_with_cosets};
use heffter::designs::{density, verify_heffter_space};
use heffter::field::FieldCtx;
use heffter::search::{DifferencePacking, Ruler};

#[test]
fn develop_convention_reproduces_printed_tables() {
    let ctx = FieldCtx::build(71, 1, None, None).unwrap();
    let packing = DifferencePacking { rulers: vec![Ruler::from_codes(&[1, 25, 49, 43, 24])] };
    let space = develop_packing(&ctx, &packing).unwrap();
    assert_eq!(space.classes.len(), 5);
    let row = |c: usize, b: usize| -> Vec<u64> {
        space.classes[c].blocks[b].elements().iter().map(|e| e.0).collect()
    };
    assert_eq!(row(0, 0), vec![1, 24, 25, 43, 49]);
    assert_eq!(row(0, 1), vec![45, 15, 60, 18, 4]);
    assert_eq!(row(0, 6), vec![30, 10, 40, 12, 50]);
    assert_eq!(row(1, 0), vec![49, 40, 18, 48, 58]);
    assert_eq!(row(2, 0), vec![58, 43, 30, 9, 2]);
    assert_eq!(row(3, 2), vec![3, 1, 4, 58, 5]);
    assert_eq!(row(4, 0), vec![27, 9, 36, 25, 45]);
    let report = verify_heffter_space(&ctx, &space);
    assert!(report.valid());
    assert_eq!(density(&ctx, &space).unwrap(), num_rational::Ratio::new(10i64, 17));
    let ext = extend_with_cosets(&ctx, &space).unwrap();
    let crow = |b: usize| -> Vec<u64> {
        ext.classes[5].blocks[b].elements().iter().map(|e| e.0).collect()
    };
    assert_eq!(crow(0), vec![1, 45, 37, 32, 20, 48, 30]);
    assert_eq!(crow(1), vec![49, 4, 38, 6, 57, 9, 50]);
    assert_eq!(crow(4), vec![27, 8, 5, 12, 43, 18, 29]);
    assert_eq!(density(&ctx, &ext).unwrap(), num_rational::Ratio::new(13i64, 17));
}

#[test]
fn two_ruler_packing_151() {
    let ctx = FieldCtx::build(151, 1, None, None).unwrap();
    let packing = DifferencePacking {
        rulers: vec![
            Ruler::from_codes(&[1, 36, 58, 110, 97]),
            Ruler::from_codes(&[1, 78, 22, 139, 62]),
        ],
    };
    let space = develop_packing(&ctx, &packing).unwrap();
    let report = verify_heffter_space(&ctx, &space);
    assert!(report.valid(), "{}", report.summary());
    assert_eq!(report.v, 75);
    assert_eq!(report.r, 10);
    assert_eq!(report.class_sizes().unwrap(), vec![5; 10]);
}

#[test]
fn empty_packing_gives_empty_space() {
    let ctx = FieldCtx::build(71, 1, None, None).unwrap();
    let space = develop_packing(&ctx, &DifferencePacking { rulers: vec![] }).unwrap();
    assert_eq!(space.classes.len(), 0);
    assert!(verify_heffter_space(&ctx, &space).valid());
}

#[test]
fn invalid_packing_rejected() {
    use heffter::construct::ConstructError;
    let ctx = FieldCtx::build(71, 1, None, None).unwrap();
    // two copies of the same ruler share every difference
    let packing = DifferencePacking {
        rulers: vec![
            Ruler::from_codes(&[1, 25, 49, 43, 24]),
            Ruler::from_codes(&[1, 25, 49, 43, 24]),
        ],
    };
    assert!(matches!(
        develop_packing(&ctx, &packing),
        Err(ConstructError::InvalidPacking(_))
    ));
}

#[test]
fn extend_twice_rejected() {
    use heffter::construct::ConstructError;
    let ctx = FieldCtx::build(71, 1, None, None).unwrap();
    let packing = DifferencePacking { rulers: vec![Ruler::from_codes(&[1, 25, 49, 43, 24])] };
    let space = develop_packing(&ctx, &packing).unwrap();
    let ext = extend_with_cosets(&ctx, &space).unwrap();
    assert!(matches!(
        extend_with_cosets(&ctx, &ext),
        Err(ConstructError::NotConstantBlockSize(_))
    ));
}

#[test]
fn partial_partition_spaces() {
    use heffter::construct::{partial_partition_space, ConstructError};
    use heffter::designs::ReportKind;

    let ctx211 = FieldCtx::build(211, 1, None, None).unwrap();
    let space = partial_partition_space(&ctx211, &[3, 5, 7]).unwrap();
    let report = verify_heffter_space(&ctx211, &space);
    assert!(report.valid(), "{}", report.summary());
    assert_eq!(report.kind, ReportKind::Space);
    assert_eq!(report.v, 105);
    assert_eq!(report.class_sizes().unwrap(), vec![3, 5, 7]);

    let ctx31 = FieldCtx::build(31, 1, None, None).unwrap();
    let space = partial_partition_space(&ctx31, &[3, 5]).unwrap();
    assert!(verify_heffter_space(&ctx31, &space).valid());
    assert_eq!(space.order(), 15);

    let ctx7 = FieldCtx::build(7, 1, None, None).unwrap();
    let space = partial_partition_space(&ctx7, &[3]).unwrap();
    assert_eq!(space.classes.len(), 1);
    let block: Vec<u64> = space.classes[0].blocks[0].elements().iter().map(|e| e.0).collect();
    let mut sorted = block.clone();
    sorted.sort_unstable();
    assert_eq!(sorted, vec![1, 2, 4]);

    // parameter errors
    assert!(matches!(
        partial_partition_space(&ctx211, &[3, 5, 9]),
        Err(ConstructError::NotCoprime(3, 9))
    ));
    assert!(matches!(
        partial_partition_space(&ctx211, &[3, 5]),
        Err(ConstructError::WrongProduct { .. })
    ));
    let ctx41 = FieldCtx::build(41, 1, None, None).unwrap();
    assert!(matches!(
        partial_partition_space(&ctx41, &[5]),
        Err(ConstructError::WrongCongruence(41))
    ));
}
