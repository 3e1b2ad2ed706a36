//! The worked degeneracy-locus examples, end to end through the
//! localization engine.

use num::BigInt;
use quiver_odl::chow::BaseSpace;
use quiver_odl::odl::{odl_invariants, ODLConfig, Quantity};
use quiver_odl::orbit::OrbitInvariants;
use quiver_odl::quiver::{DimVector, Quiver};
use quiver_odl::resolution::{BundleExpr, ResType};

fn dualu() -> BundleExpr {
    BundleExpr::Dual(Box::new(BundleExpr::BaseU))
}

fn sum(items: Vec<BundleExpr>) -> BundleExpr {
    BundleExpr::Sum(items)
}

#[test]
fn gr48_fourfold_chi_two_and_trivial_k() {
    // X = Gr(4,8), E1 = 2(O(-1) ⊕ O), E2 = Q ⊕ O, E3 = 3O, Y = O̅_{3,1,3}
    let cfg = ODLConfig {
        base: BaseSpace::Grassmannian { k: 4, n: 8 },
        cuts: vec![],
        bundles: vec![
            sum(vec![
                BundleExpr::BaseO(-1),
                BundleExpr::BaseO(-1),
                BundleExpr::Trivial(2),
            ]),
            sum(vec![BundleExpr::BaseQ, BundleExpr::Trivial(1)]),
            BundleExpr::Trivial(3),
        ],
        quiver: Quiver::a3_sink_center(),
        d: DimVector(vec![4, 5, 3]),
        inv: OrbitInvariants::A3SinkCenter {
            r1: 3,
            r2: 1,
            p1: 3,
        },
        res_type: None,
        seed: 42,
    };
    let report = odl_invariants(&cfg, &[Quantity::ChiO]).unwrap();
    assert_eq!(report.res_type, ResType::II);
    assert!(report.crepant);
    assert_eq!(report.codim_x, 12);
    assert_eq!(report.dim_d, 4);
    assert_eq!(report.canonical_total_trivial, Some(true));
    assert_eq!(report.numeric["chi_O"], "2");
}

#[test]
fn d4_threefold_cy() {
    // X = Gr(3,7) ∩ O(1) ∩ O(2); E2 = U^*, others trivial; Y = O̅_{1,1,1,2}
    let cfg = ODLConfig {
        base: BaseSpace::Grassmannian { k: 3, n: 7 },
        cuts: vec![BundleExpr::BaseO(1), BundleExpr::BaseO(2)],
        bundles: vec![
            BundleExpr::Trivial(2),
            dualu(),
            BundleExpr::Trivial(2),
            BundleExpr::Trivial(2),
        ],
        quiver: Quiver::d4_sink_center(),
        d: DimVector(vec![2, 3, 2, 2]),
        inv: OrbitInvariants::D4SinkCenter {
            r: [1, 1, 1],
            rij: [0, 0, 0],
            r123: 0,
            s123: 2,
        },
        res_type: Some(ResType::III),
        seed: 7,
    };
    let report = odl_invariants(&cfg, &[Quantity::ChiO]).unwrap();
    assert!(report.crepant);
    assert_eq!(report.codim_x, 7);
    assert_eq!(report.dim_d, 3);
    assert_eq!(report.canonical_total_trivial, Some(true));
    let chi: BigInt = report.numeric["chi_O"].parse().unwrap();
    // Calabi-Yau threefold resolution: chi(O) = 0
    assert_eq!(chi, BigInt::from(0));
}
