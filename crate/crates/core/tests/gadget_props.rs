use mqcomp::circuit::mat::{distance_mod_phase, C64};
use mqcomp::circuit::{to_unitary, Axis, Circuit, Gate, QubitSet};
use mqcomp::gadget::{commute_cnot, decompose_pg, pg_commutes, Direction, JStar, PhaseGadget};
use nalgebra::DMatrix;
use proptest::prelude::*;

/// Dense `P_{j1} P_{j2} …` on `n` qubits, qubit 0 least significant.
fn pauli_string(n: usize, axis: Axis, support: &QubitSet) -> DMatrix<C64> {
    let d = 1usize << n;
    let mut m = DMatrix::zeros(d, d);
    for col in 0..d {
        let mut row = col;
        let mut amp = C64::new(1.0, 0.0);
        for q in support.iter() {
            let bit = (col >> q) & 1;
            match axis {
                Axis::X => row ^= 1 << q,
                Axis::Y => {
                    row ^= 1 << q;
                    amp *= if bit == 0 { C64::new(0.0, 1.0) } else { C64::new(0.0, -1.0) };
                }
                Axis::Z => {
                    if bit == 1 {
                        amp = -amp;
                    }
                }
            }
        }
        m[(row, col)] = amp;
    }
    m
}

fn gadget_matrix(n: usize, g: &PhaseGadget) -> DMatrix<C64> {
    let t = g.alpha * std::f64::consts::FRAC_PI_2;
    let id = DMatrix::<C64>::identity(1 << n, 1 << n);
    id * C64::new(t.cos(), 0.0) + pauli_string(n, g.axis, &g.support) * C64::new(0.0, t.sin())
}

fn cnot_matrix(n: usize, c: usize, t: usize) -> DMatrix<C64> {
    let d = 1usize << n;
    DMatrix::from_fn(d, d, |r, k| {
        let image = if (k >> c) & 1 == 1 { k ^ (1 << t) } else { k };
        if r == image {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

fn axis() -> impl Strategy<Value = Axis> {
    prop::sample::select(vec![Axis::X, Axis::Y, Axis::Z])
}

fn gadget(n: usize, axes: impl Strategy<Value = Axis>) -> impl Strategy<Value = PhaseGadget> {
    (axes, -1.9..2.0f64, prop::collection::btree_set(0..n, 1..=n))
        .prop_map(|(a, alpha, s)| PhaseGadget::new(a, alpha, s))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn decomposition_matches_gadget((n, g, k) in (1usize..5).prop_flat_map(|n| (Just(n), gadget(n, axis()), any::<usize>()))) {
        let pick = g.support.iter().nth(k % g.support.len()).unwrap();
        let reference = gadget_matrix(n, &g);
        for js in [JStar::Default, JStar::Qubit(pick)] {
            let c = decompose_pg(&g, js, n).unwrap();
            prop_assert!(distance_mod_phase(&reference, &to_unitary(&c, 12).unwrap()) < 1e-10);
        }
        let c = decompose_pg(&g, JStar::Ancilla(n), n).unwrap();
        let u = to_unitary(&c, 12).unwrap();
        let d = 1usize << n;
        let leak: f64 = (0..d).map(|j| (d..2 * d).map(|i| u[(i, j)].norm_sqr()).sum::<f64>()).fold(0.0, f64::max);
        prop_assert!(leak < 1e-12);
        prop_assert!(distance_mod_phase(&reference, &u.view((0, 0), (d, d)).into_owned()) < 1e-10);
    }

    #[test]
    fn cnot_commutation_matches_dense(
        (n, g, c, t) in (2usize..5).prop_flat_map(|n| {
            (Just(n), gadget(n, prop::sample::select(vec![Axis::X, Axis::Z])), 0..n, 1..n)
        })
    ) {
        let t = (c + t) % n;
        let out = commute_cnot(c, t, &g, Direction::Left).unwrap();
        let cm = cnot_matrix(n, c, t);
        let conj = &cm * gadget_matrix(n, &g) * &cm;
        prop_assert!((conj - gadget_matrix(n, &out)).camax() < 1e-10);
        prop_assert_eq!(commute_cnot(c, t, &g, Direction::Right).unwrap(), out);
    }

    #[test]
    fn parity_rule_matches_dense(
        (n, a, b) in (1usize..5).prop_flat_map(|n| (Just(n), gadget(n, axis()), gadget(n, axis())))
    ) {
        let (ma, mb) = (pauli_string(n, a.axis, &a.support), pauli_string(n, b.axis, &b.support));
        let commutes = (&ma * &mb - &mb * &ma).camax() < 1e-12;
        prop_assert_eq!(pg_commutes(&a, &b), commutes);
        let (ga, gb) = (gadget_matrix(n, &a), gadget_matrix(n, &b));
        if commutes {
            prop_assert!((&ga * &gb - &gb * &ga).camax() < 1e-10);
        }
    }
}

#[test]
fn oracle_agrees_with_single_qubit_gates() {
    let g = PhaseGadget::new(Axis::Z, 0.3, [0]);
    let c = Circuit::with_gates(1, vec![Gate::rz(0, -0.3 * std::f64::consts::PI)]);
    assert!(distance_mod_phase(&gadget_matrix(1, &g), &to_unitary(&c, 12).unwrap()) < 1e-12);
}
