use std::sync::OnceLock;

use proptest::prelude::*;
use tubepoly::analysis::partition_bounds;
use tubepoly::geometry::{enumerate_one_blocks, CrossSection};
use tubepoly::oracle::{enumerate_polygons, EnumerationTable};
use tubepoly::transfer::FreeEnergySolver;
use tubepoly::{OneBlock, PairPartition, PatternSystem, TubeSpec};

fn blocks_2x1() -> &'static (CrossSection, Vec<OneBlock>) {
    static CELL: OnceLock<(CrossSection, Vec<OneBlock>)> = OnceLock::new();
    CELL.get_or_init(|| {
        let spec = TubeSpec::new(2, 1).unwrap();
        (CrossSection::new(spec), enumerate_one_blocks(spec, false))
    })
}

fn table_2x1() -> &'static EnumerationTable {
    static CELL: OnceLock<EnumerationTable> = OnceLock::new();
    CELL.get_or_init(|| enumerate_polygons(TubeSpec::new(2, 1).unwrap(), 12).unwrap())
}

fn solver_1x1() -> &'static FreeEnergySolver {
    static CELL: OnceLock<FreeEnergySolver> = OnceLock::new();
    CELL.get_or_init(|| {
        let spec = TubeSpec::new(1, 1).unwrap();
        FreeEnergySolver::new(&PatternSystem::build(spec, false).unwrap())
    })
}

/// A perfect matching on `2k` labels from a shuffle.
fn matching() -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
    (1usize..=5)
        .prop_flat_map(|k| Just((0..2 * k).collect::<Vec<_>>()).prop_shuffle())
        .prop_map(|labels| {
            let pairs = labels.chunks(2).map(|p| (p[0], p[1])).collect();
            (labels.len(), pairs)
        })
}

proptest! {
    #[test]
    fn tube_extents_are_symmetric(l in 0u32..6, m in 0u32..6) {
        prop_assume!(l + m > 0);
        let a = TubeSpec::new(l, m).unwrap();
        let b = TubeSpec::new(m, l).unwrap();
        prop_assert_eq!(a, b);
        prop_assert!(a.l() >= a.m());
        prop_assert_eq!(a.width(), ((l + 1) * (m + 1)) as usize);
    }

    #[test]
    fn matchings_are_involutions((r, pairs) in matching()) {
        let p = PairPartition::from_pairs(r, &pairs).unwrap();
        for a in 0..r {
            prop_assert_ne!(p.mate(a), a);
            prop_assert_eq!(p.mate(p.mate(a)), a);
        }
        prop_assert_eq!(PairPartition::from_pairs(r, &p.pairs()), Some(p.clone()));
        prop_assert!(PairPartition::all(r).contains(&p));
    }

    #[test]
    fn block_length_counts_occupied_vertices(i in any::<prop::sample::Index>()) {
        let (cs, blocks) = blocks_2x1();
        let b = blocks[i.index(blocks.len())];
        prop_assert_eq!(b.length(), b.occupied(cs).count_ones());
        prop_assert!(b.length() as usize <= cs.width());
    }

    #[test]
    fn partition_function_bounds(n in (2usize..=6).prop_map(|k| 2 * k), f in -20.0f64..20.0) {
        let b = partition_bounds(table_2x1(), n, f).unwrap();
        prop_assert!(b.holds(), "{:?}", b);
    }

    #[test]
    fn free_energy_is_convex(a in -8.0f64..8.0, d1 in 0.05f64..3.0, d2 in 0.05f64..3.0) {
        let s = solver_1x1();
        let (f1, f2, f3) = (a, a + d1, a + d1 + d2);
        let [p1, p2, p3] = [f1, f2, f3].map(|f| s.solve(f).unwrap().free_energy);
        let chord = (d2 * p1 + d1 * p3) / (d1 + d2);
        prop_assert!(p2 <= chord + 1e-9, "F({}) = {} above chord {}", f2, p2, chord);
    }
}
