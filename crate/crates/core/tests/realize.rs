use std::f64::consts::FRAC_PI_4;

use mqcomp::circuit::mat::{distance_mod_phase, C64};
use mqcomp::circuit::{to_unitary, Axis, Circuit, Gate};
use mqcomp::cost::{
    baseline_parallel_merge, nuclear_norm, realize, star_norm, RealizationScheme,
};
use mqcomp::gadget::{GadgetSequence, MultiQubitGate, PhaseGadget};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_sequence(rng: &mut impl Rng, n: usize, len: usize) -> GadgetSequence {
    let gadgets = (0..len)
        .map(|_| {
            let axis = if rng.random_bool(0.5) { Axis::Z } else { Axis::X };
            let support: Vec<usize> = (0..n).filter(|_| rng.random_bool(0.5)).collect();
            let support = if support.is_empty() { vec![rng.random_range(0..n)] } else { support };
            PhaseGadget::new(axis, rng.random_range(-0.5..0.5), support)
        })
        .collect();
    GadgetSequence::from_gadgets(n, gadgets)
}

/// Logical block of a unitary with the ancilla (top qubit) in |0⟩, and the
/// amplitude leaking into ancilla |1⟩.
fn ancilla_block(u: &DMatrix<C64>, n: usize) -> (DMatrix<C64>, f64) {
    let d = 1 << n;
    let block = u.view((0, 0), (d, d)).into_owned();
    let leak = u.view((d, 0), (d, d)).iter().map(|z| z.norm_sqr()).sum::<f64>();
    (block, leak)
}

#[test]
fn realizations_match_sequences() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for trial in 0..60 {
        let n = 2 + trial % 4;
        let seq = random_sequence(&mut rng, n, 1 + trial % 7);
        let reference = to_unitary(&seq.to_circuit(), 12).unwrap();
        let r = realize(&seq, RealizationScheme::NoAncilla).unwrap();
        let u = to_unitary(&r.circuit, 12).unwrap();
        assert!(distance_mod_phase(&reference, &u) < 1e-10, "no-ancilla trial {trial}");

        let r = realize(&seq, RealizationScheme::AncillaMerged).unwrap();
        let u = to_unitary(&r.circuit, 12).unwrap();
        let (block, leak) = ancilla_block(&u, n);
        assert!(leak < 1e-12, "leak {leak}");
        assert!(distance_mod_phase(&reference, &block) < 1e-10, "ancilla trial {trial}");
    }
}

fn alternating(m: usize, width: usize) -> GadgetSequence {
    let gadgets = (0..m)
        .map(|i| {
            let axis = if i % 2 == 0 { Axis::Z } else { Axis::X };
            PhaseGadget::new(axis, 0.1 + 0.01 * i as f64, 0..width)
        })
        .collect();
    GadgetSequence::from_gadgets(width, gadgets)
}

#[test]
fn alternating_gadget_counts() {
    for m in 1..=20 {
        let seq = alternating(m, 3);
        let with = realize(&seq, RealizationScheme::AncillaMerged).unwrap();
        assert_eq!(with.mq_count(), m + 1, "M = {m}");
        let without = realize(&seq, RealizationScheme::NoAncilla).unwrap();
        assert_eq!(without.mq_count(), 2 * m, "M = {m}");
        for g in &with.gates {
            for (_, t) in g.pairs() {
                assert!((t.abs() - FRAC_PI_4).abs() < 1e-15 || t == 0.0);
            }
        }
    }
    assert_eq!(realize(&GadgetSequence::new(3), RealizationScheme::AncillaMerged).unwrap().mq_count(), 0);
}

#[test]
fn star_norms() {
    for k in 1..=64 {
        let g = MultiQubitGate::from_pairs((1..=k).map(|q| (0, q, FRAC_PI_4)));
        assert!((nuclear_norm(&g) - star_norm(k)).abs() < 1e-10, "k = {k}");
        let sequential: f64 = (1..=k)
            .map(|q| nuclear_norm(&MultiQubitGate::from_pairs([(0, q, FRAC_PI_4)])))
            .sum();
        assert!((sequential / nuclear_norm(&g) - (k as f64).sqrt()).abs() < 1e-10);
    }
    assert!((star_norm(30) - 4.301).abs() < 1e-3);
    assert_eq!(nuclear_norm(&MultiQubitGate::new()), 0.0);
}

#[test]
fn baseline_examples() {
    let parallel = Circuit::with_gates(4, vec![Gate::zz(0, 1, 0.3), Gate::zz(2, 3, 0.2)]);
    assert_eq!(baseline_parallel_merge(&parallel).unwrap().mq_count, 1);
    let serial = Circuit::with_gates(3, vec![Gate::zz(0, 1, 0.3), Gate::zz(1, 2, 0.2)]);
    assert_eq!(baseline_parallel_merge(&serial).unwrap().mq_count, 2);
}
