//! Cross-module property tests: metric axioms, syndrome algebra, matching
//! optimality, and the decode → verify contract, over randomized inputs.

use proptest::prelude::*;

use tqc_core::lattice::{cell_distance, Axis, CellClass, CellCoord, LatticeDims, QubitCoord};
use tqc_core::matching::{brute_force_matching, build_graph, mwpm};
use tqc_core::noise::{reduce_to_z, sample_errors, NoiseChannel};
use tqc_core::pipeline::{decode_batch, verify};
use tqc_core::syndrome::syndrome_from_errors;

fn dims_strategy() -> impl Strategy<Value = LatticeDims> {
    (3u32..=6, 3u32..=6, 3u32..=6, any::<bool>()).prop_map(|(lx, ly, lt, periodic)| {
        if periodic {
            LatticeDims::periodic(lx, ly, lt).unwrap()
        } else {
            LatticeDims::open(lx, ly, lt).unwrap()
        }
    })
}

proptest! {
    #[test]
    fn distance_is_a_metric(
        dims in dims_strategy(),
        class in prop_oneof![Just(CellClass::Primal), Just(CellClass::Dual)],
        raw in prop::array::uniform3((0i64..6, 0i64..6, 0i64..6)),
    ) {
        let off = match class { CellClass::Primal => 0i64, CellClass::Dual => 1 };
        let mk = |(x, y, t): (i64, i64, i64)| {
            CellCoord::new(
                2 * (x % dims.len(Axis::X) as i64) + off,
                2 * (y % dims.len(Axis::Y) as i64) + off,
                2 * (t % dims.len(Axis::T) as i64) + off,
                class,
            )
        };
        let [a, b, c] = raw.map(mk);
        let d = |p, q| cell_distance(p, q, dims).unwrap();
        prop_assert_eq!(d(a, a), 0);
        prop_assert_eq!(d(a, b), d(b, a));
        prop_assert!(d(a, c) <= d(a, b) + d(b, c));
        prop_assert!(a == b || d(a, b) > 0);
    }

    #[test]
    fn syndrome_size_even_on_periodic(
        (lx, ly, lt) in (3u32..=5, 3u32..=5, 3u32..=5),
        seed in any::<u64>(),
    ) {
        let dims = LatticeDims::periodic(lx, ly, lt).unwrap();
        let ch = NoiseChannel::symmetric(0.04).unwrap();
        let pat = sample_errors(dims, &ch, seed).unwrap();
        let (pz, dz) = reduce_to_z(&pat, dims);
        for (z, class) in [(&pz, CellClass::Primal), (&dz, CellClass::Dual)] {
            let syn = syndrome_from_errors(z, dims, class).unwrap();
            prop_assert_eq!(syn.len() % 2, 0);
        }
    }

    #[test]
    fn decode_always_clears_residual(
        (lx, ly, lt) in (3u32..=5, 3u32..=5, 3u32..=5),
        periodic in any::<bool>(),
        seed in any::<u64>(),
    ) {
        let dims = if periodic {
            LatticeDims::periodic(lx, ly, lt).unwrap()
        } else {
            LatticeDims::open(lx, ly, lt).unwrap()
        };
        let ch = NoiseChannel::symmetric(0.03).unwrap();
        let pat = sample_errors(dims, &ch, seed).unwrap();
        let (pz, dz) = reduce_to_z(&pat, dims);
        let out = decode_batch(&pat, dims).unwrap();
        for (z, corr, class) in [
            (&pz, &out.primal, CellClass::Primal),
            (&dz, &out.dual, CellClass::Dual),
        ] {
            let rep = verify(z, corr, class, dims).unwrap();
            prop_assert!(rep.residual_syndrome_empty);
        }
    }

    #[test]
    fn logical_failure_invariant_under_contractible_loops(
        (lx, ly, lt) in (3u32..=5, 3u32..=5, 3u32..=5),
        seed in any::<u64>(),
        (cx, cy, ct) in (0i64..5, 0i64..5, 0i64..5),
    ) {
        // Adding a closed 4-face loop to the correction is a homology no-op:
        // residual stays clear and the wrap classification cannot change.
        let dims = LatticeDims::periodic(lx, ly, lt).unwrap();
        let ch = NoiseChannel::pure_z(0.03).unwrap();
        let pat = sample_errors(dims, &ch, seed).unwrap();
        let (pz, _) = reduce_to_z(&pat, dims);
        let out = decode_batch(&pat, dims).unwrap();
        let base = verify(&pz, &out.primal, CellClass::Primal, dims).unwrap();

        let (cx, cy, ct) = (
            2 * (cx % lx as i64),
            2 * (cy % ly as i64),
            2 * (ct % lt as i64),
        );
        let mut perturbed = out.primal.clone();
        for q in [
            QubitCoord::new(cx + 1, cy, ct),
            QubitCoord::new(cx + 2, cy + 1, ct),
            QubitCoord::new(cx + 1, cy + 2, ct),
            QubitCoord::new(cx, cy + 1, ct),
        ] {
            perturbed.toggle(dims.canon_qubit(q));
        }
        let rep = verify(&pz, &perturbed, CellClass::Primal, dims).unwrap();
        prop_assert!(rep.residual_syndrome_empty);
        prop_assert_eq!(rep.wrap, base.wrap);
    }

    #[test]
    fn mwpm_matches_oracle(
        dims in dims_strategy(),
        flips in prop::collection::btree_set((0i64..5, 0i64..5, 0i64..5), 0..=8),
    ) {
        let cells: Vec<CellCoord> = flips
            .into_iter()
            .map(|(x, y, t)| {
                CellCoord::new(
                    2 * (x % dims.len(Axis::X) as i64),
                    2 * (y % dims.len(Axis::Y) as i64),
                    2 * (t % dims.len(Axis::T) as i64),
                    CellClass::Primal,
                )
            })
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .collect();
        if dims.is_periodic() && cells.len() % 2 != 0 {
            return Ok(());
        }
        let g = build_graph(cells, CellClass::Primal, dims);
        let fast = mwpm(&g).unwrap();
        let slow = brute_force_matching(&g).unwrap();
        prop_assert_eq!(fast.total_weight, slow.total_weight);
    }
}
