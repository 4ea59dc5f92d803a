use mqcomp::circuit::mat::{self, distance_mod_phase, C64};
use mqcomp::circuit::{to_unitary, Axis, Circuit, Gate};
use mqcomp::cost::{CostOrder, RealizationScheme};
use mqcomp::gadget::PhaseGadget;
use mqcomp::passes::{
    exhaustive_matching, greedy_matching, matching_weight, optimize_traced, pg_left, pg_right,
    CompileOptions, MatchingMode,
};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_circuit(rng: &mut impl Rng, n: usize, depth: usize) -> Circuit {
    let mut c = Circuit::new(n);
    for _ in 0..depth {
        match rng.random_range(0..3) {
            0 => {
                let q = rng.random_range(0..n);
                c.push(Gate::single(
                    q,
                    mat::u3(rng.random_range(0.0..3.0), rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)),
                ));
            }
            k => {
                let a = rng.random_range(0..n);
                let b = (a + rng.random_range(1..n)) % n;
                if k == 1 {
                    c.push(Gate::cx(a, b));
                } else {
                    c.push(Gate::zz(a, b, rng.random_range(-1.0..1.0)));
                }
            }
        }
    }
    c
}

fn unitary(c: &Circuit) -> DMatrix<C64> {
    to_unitary(c, 12).unwrap()
}

fn logical_block(u: &DMatrix<C64>, n: usize, ancilla: bool) -> DMatrix<C64> {
    if !ancilla {
        return u.clone();
    }
    let d = 1 << n;
    let leak: f64 = u.view((d, 0), (d, d)).iter().map(|z| z.norm_sqr()).sum();
    assert!(leak < 1e-12, "ancilla leakage {leak}");
    u.view((0, 0), (d, d)).into_owned()
}

#[test]
fn primitive_examples() {
    let one = Circuit::with_gates(3, vec![Gate::cx(0, 2)]);
    let (seq, layer) = pg_left(&one).unwrap();
    assert!(seq.is_empty() && seq.frame.is_identity());
    assert_eq!(layer.word(), vec![(0, 2)]);
    let (layer, seq) = pg_right(&one).unwrap();
    assert!(seq.is_empty());
    assert_eq!(layer.word(), vec![(0, 2)]);

    let zz = Circuit::with_gates(3, vec![Gate::zz(1, 2, 0.3)]);
    let (seq, layer) = pg_left(&zz).unwrap();
    assert!(layer.is_identity());
    assert_eq!(seq.gadgets.len(), 1);
    let g = &seq.gadgets[0];
    assert_eq!((g.axis, g.support.to_vec()), (Axis::Z, vec![1, 2]));
    assert!((g.alpha - 0.6 / std::f64::consts::PI).abs() < 1e-12);
}

#[test]
fn primitives_reconstruct() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for trial in 0..40 {
        let n = 2 + trial % 5;
        let c = random_circuit(&mut rng, n, 5 + trial);
        let reference = unitary(&c);
        let (seq, layer) = pg_left(&c).unwrap();
        let mut l = layer.to_circuit();
        l.extend(&seq.to_circuit());
        assert!(distance_mod_phase(&reference, &unitary(&l)) < 1e-9, "left {trial}");
        let (layer, seq) = pg_right(&c).unwrap();
        let mut r = seq.to_circuit();
        r.extend(&layer.to_circuit());
        assert!(distance_mod_phase(&reference, &unitary(&r)) < 1e-9, "right {trial}");
    }
}

#[test]
fn compiled_programs_match_inputs() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for trial in 0..24 {
        let n = 2 + trial % 5;
        let c = random_circuit(&mut rng, n, 10 + 2 * trial);
        let reference = unitary(&c);
        for scheme in [RealizationScheme::NoAncilla, RealizationScheme::AncillaMerged] {
            let opts = CompileOptions {
                scheme,
                ..Default::default()
            };
            let (p, trace) = optimize_traced(&c, &opts).unwrap();
            assert!(distance_mod_phase(&reference, &unitary(&p.logical_circuit())) < 1e-8);
            let phys = unitary(&p.physical_circuit().unwrap());
            let block = logical_block(&phys, n, p.ancilla().is_some());
            assert!(distance_mod_phase(&reference, &block) < 1e-8, "trial {trial} {scheme:?}");
            for w in trace.accepted.windows(2) {
                assert!(opts.cost.less(&w[1], &w[0]));
            }
        }
    }
}

#[test]
fn weighted_cost_and_empty_circuit() {
    let opts = CompileOptions {
        cost: "weighted:0.5".parse::<CostOrder>().unwrap(),
        ..Default::default()
    };
    let (p, _) = optimize_traced(&Circuit::new(3), &opts).unwrap();
    assert!(p.body.is_empty() && p.pre.is_identity() && p.post.is_identity());
}

#[test]
fn clifford_circuits_give_clifford_gadgets() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let cliffords = [mat::hadamard(), mat::phase(std::f64::consts::FRAC_PI_2), mat::pauli(Axis::X)];
    for _ in 0..10 {
        let mut c = Circuit::new(4);
        for _ in 0..25 {
            if rng.random_bool(0.5) {
                c.push(Gate::single(rng.random_range(0..4), cliffords[rng.random_range(0..3)]));
            } else {
                let a = rng.random_range(0..4);
                c.push(Gate::cx(a, (a + rng.random_range(1..4)) % 4));
            }
        }
        let (p, _) = optimize_traced(&c, &CompileOptions::default()).unwrap();
        for PhaseGadget { alpha, .. } in &p.body.gadgets {
            let k = alpha * 2.0;
            assert!((k - k.round()).abs() < 1e-9, "alpha {alpha}");
        }
    }
}

#[test]
fn greedy_matching_is_half_optimal() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..200 {
        let n = rng.random_range(2..=8);
        let mut w = DMatrix::zeros(n, n);
        for a in 0..n {
            for b in a + 1..n {
                let v = if rng.random_bool(0.3) { 0.0 } else { rng.random_range(0.0..1.0) };
                w[(a, b)] = v;
                w[(b, a)] = v;
            }
        }
        let g = matching_weight(&w, &greedy_matching(&w));
        let e = matching_weight(&w, &exhaustive_matching(&w));
        assert!(g >= 0.5 * e - 1e-12 && g <= e + 1e-12);
    }
    let _ = MatchingMode::Exhaustive;
}
