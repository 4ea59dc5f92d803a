//! End-to-end acceptance checks. Runs as a plain binary and prints one
//! PASS/FAIL line per criterion.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex64 as C;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mqcomp::bench::{self, BenchOptions};
use mqcomp::circuit::{to_unitary, Axis, Circuit, Gate, QubitSet};
use mqcomp::cost::{nuclear_norm, realize, star_norm, CostOrder, RealizationScheme};
use mqcomp::gadget::{
    commute_cnot, decompose_pg, merge_interface, pg_commutes, Direction, GadgetSequence, JStar,
    MultiQubitGate, PhaseGadget,
};
use mqcomp::noise::{
    depol_prob, paired_relative_error, paired_success_error, relative_error, sample_runs,
    Experiment, NoiseModel,
};
use mqcomp::passes::{
    conjugation_costs, exhaustive_matching, greedy_matching, matching_weight, optimize_traced,
    CompileOptions,
};
use mqcomp::qasm::{parse_qasm, to_zz_basis};

type M = DMatrix<C>;
type Outcome = Result<String, String>;

// ---- dense oracle, independent of the library simulator ----

fn pauli(a: Axis) -> M {
    let (o, z, i) = (C::new(1.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 1.0));
    match a {
        Axis::X => M::from_row_slice(2, 2, &[z, o, o, z]),
        Axis::Y => M::from_row_slice(2, 2, &[z, -i, i, z]),
        Axis::Z => M::from_row_slice(2, 2, &[o, z, z, -o]),
    }
}

/// Tensor product with qubit 0 as the least significant bit.
fn embed(n: usize, ops: &[(usize, M)]) -> M {
    let mut out = M::identity(1, 1);
    for q in (0..n).rev() {
        let f = ops
            .iter()
            .find(|(p, _)| *p == q)
            .map_or_else(|| M::identity(2, 2), |(_, m)| m.clone());
        out = out.kronecker(&f);
    }
    out
}

fn string(n: usize, a: Axis, support: &[usize]) -> M {
    embed(n, &support.iter().map(|&q| (q, pauli(a))).collect::<Vec<_>>())
}

/// `exp(iθ P)` for a Pauli string `P`.
fn pexp(n: usize, a: Axis, support: &[usize], theta: f64) -> M {
    let d = 1 << n;
    M::identity(d, d) * C::new(theta.cos(), 0.0) + string(n, a, support) * C::new(0.0, theta.sin())
}

fn mixed_pexp(n: usize, ops: &[(usize, Axis)], theta: f64) -> M {
    let d = 1 << n;
    let p = embed(n, &ops.iter().map(|&(q, a)| (q, pauli(a))).collect::<Vec<_>>());
    M::identity(d, d) * C::new(theta.cos(), 0.0) + p * C::new(0.0, theta.sin())
}

/// `I − 2 Π⁻(P_j) Π⁻(Q_k)`.
fn gcnot(n: usize, p: Axis, j: usize, q: Axis, k: usize) -> M {
    let d = 1 << n;
    let minus = |a: Axis| (M::identity(2, 2) - pauli(a)) * C::new(0.5, 0.0);
    M::identity(d, d) - embed(n, &[(j, minus(p)), (k, minus(q))]) * C::new(2.0, 0.0)
}

fn cnot(n: usize, j: usize, k: usize) -> M {
    gcnot(n, Axis::Z, j, Axis::X, k)
}

fn dist(a: &M, b: &M) -> f64 {
    (a - b).norm()
}

fn dist_phase(a: &M, b: &M) -> f64 {
    let o: C = (b.adjoint() * a).trace();
    let ph = if o.norm() > 1e-300 { o / o.norm() } else { C::new(1.0, 0.0) };
    (a - b * ph).norm()
}

fn lib_unitary(c: &Circuit) -> M {
    to_unitary(c, 12).expect("oracle cap")
}

/// Block on which qubit `a = n - 1` starts and ends in `|0⟩`, plus the
/// population that leaves it.
fn ancilla_block(u: &M, n_sys: usize) -> (M, f64) {
    let d = 1 << n_sys;
    let leak = (0..d)
        .map(|j| (d..2 * d).map(|i| u[(i, j)].norm_sqr()).sum::<f64>())
        .fold(0.0, f64::max);
    (u.view((0, 0), (d, d)).into_owned(), leak)
}

fn random_axis(rng: &mut impl Rng) -> Axis {
    [Axis::X, Axis::Y, Axis::Z][rng.random_range(0..3)]
}

fn random_subset(rng: &mut impl Rng, pool: &[usize], lo: usize, hi: usize) -> Vec<usize> {
    let k = rng.random_range(lo..=hi.min(pool.len()));
    let mut v = pool.to_vec();
    v.shuffle(rng);
    v.truncate(k);
    v.sort_unstable();
    v
}

fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn corpus() -> Vec<(String, Circuit)> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(corpus_dir())
        .expect("corpus directory")
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "qasm"))
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|p| {
            let name = p.file_stem().unwrap().to_string_lossy().into_owned();
            let c = parse_qasm(&std::fs::read_to_string(&p).unwrap()).unwrap_or_else(|e| panic!("{name}: {e}"));
            (name, to_zz_basis(&c))
        })
        .collect()
}

fn random_qasm(rng: &mut impl Rng, n: usize, depth: usize) -> String {
    let mut s = format!("OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[{n}];\ncreg c[{n}];\n");
    let ang = |rng: &mut dyn rand::RngCore| format!("{:.6}", rng.random_range(-3.2..3.2));
    for _ in 0..depth {
        let mut qs: Vec<usize> = (0..n).collect();
        qs.shuffle(rng);
        let line = match rng.random_range(0..10) {
            0..=2 => {
                let g = ["h", "x", "y", "z", "s", "sdg", "t", "tdg", "sx"][rng.random_range(0..9)];
                format!("{g} q[{}];", qs[0])
            }
            3 | 4 => match rng.random_range(0..5) {
                0 => format!("rx({}) q[{}];", ang(rng), qs[0]),
                1 => format!("ry({}) q[{}];", ang(rng), qs[0]),
                2 => format!("rz({}) q[{}];", ang(rng), qs[0]),
                3 => format!("u2({},{}) q[{}];", ang(rng), ang(rng), qs[0]),
                _ => format!("u3({},{},{}) q[{}];", ang(rng), ang(rng), ang(rng), qs[0]),
            },
            5..=8 => match rng.random_range(0..10) {
                0..=3 => format!("cx q[{}],q[{}];", qs[0], qs[1]),
                4 => format!("cz q[{}],q[{}];", qs[0], qs[1]),
                5 => format!("rzz({}) q[{}],q[{}];", ang(rng), qs[0], qs[1]),
                6 => format!("crz({}) q[{}],q[{}];", ang(rng), qs[0], qs[1]),
                7 => format!("cu1({}) q[{}],q[{}];", ang(rng), qs[0], qs[1]),
                8 => format!("swap q[{}],q[{}];", qs[0], qs[1]),
                _ => format!("cu3({},{},{}) q[{}],q[{}];", ang(rng), ang(rng), ang(rng), qs[0], qs[1]),
            },
            _ if n >= 3 => {
                let g = if rng.random_bool(0.7) { "ccx" } else { "cswap" };
                format!("{g} q[{}],q[{}],q[{}];", qs[0], qs[1], qs[2])
            }
            _ => format!("cx q[{}],q[{}];", qs[0], qs[1]),
        };
        s.push_str(&line);
        s.push('\n');
    }
    if rng.random_bool(0.5) {
        s.push_str("measure q -> c;\n");
    }
    s
}

fn random_circuits(count: usize, seed: u64) -> Vec<Circuit> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.random_range(2..=8);
            let depth = rng.random_range(1..=60);
            let src = random_qasm(&mut rng, n, depth);
            to_zz_basis(&parse_qasm(&src).unwrap_or_else(|e| panic!("{e}\n{src}")))
        })
        .collect()
}

fn scheme_opts(scheme: RealizationScheme) -> CompileOptions {
    CompileOptions {
        scheme,
        ..CompileOptions::default()
    }
}

// ---- criteria ----

fn semantic_preservation() -> Outcome {
    let circuits = random_circuits(200, 1);
    let mut worst = (0.0f64, 0.0f64);
    let mut checked = 0;
    let mut check = |label: &str, c: &Circuit, scheme: RealizationScheme| -> Result<(), String> {
        let p = mqcomp::passes::optimize(c, &scheme_opts(scheme)).map_err(|e| format!("{label}: {e}"))?;
        let r = bench::verify(&p, c, 11, false).map_err(|e| format!("{label}: {e}"))?;
        worst = (worst.0.max(r.distance), worst.1.max(r.ancilla_leak));
        checked += 1;
        if r.passed {
            Ok(())
        } else {
            Err(format!("{label} {scheme:?}: distance {:.2e}, leak {:.2e}", r.distance, r.ancilla_leak))
        }
    };
    for (i, c) in circuits.iter().enumerate() {
        let scheme = if i % 2 == 0 { RealizationScheme::AncillaMerged } else { RealizationScheme::NoAncilla };
        check(&format!("random #{i}"), c, scheme)?;
    }
    for (name, c) in corpus() {
        if c.num_qubits <= 10 {
            for scheme in [RealizationScheme::AncillaMerged, RealizationScheme::NoAncilla] {
                check(&name, &c, scheme)?;
            }
        }
    }
    Ok(format!(
        "{checked} compilations, max distance {:.1e}, max ancilla leak {:.1e}",
        worst.0, worst.1
    ))
}

fn identity_suite() -> Outcome {
    const TRIALS: usize = 100;
    const TOL: f64 = 1e-10;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    let mut bump = |d: f64, what: &str| -> Result<(), String> {
        worst = worst.max(d);
        if d < TOL {
            Ok(())
        } else {
            Err(format!("{what}: deviation {d:.2e}"))
        }
    };

    // gadget decomposition, on a support qubit and through an ancilla
    for t in 0..TRIALS {
        let n = rng.random_range(2..=4);
        let pool: Vec<usize> = (0..n).collect();
        let support = random_subset(&mut rng, &pool, 1, n);
        let axis = random_axis(&mut rng);
        let alpha = rng.random_range(-2.0..2.0);
        let g = PhaseGadget::new(axis, alpha, support.iter().copied());
        let expected = pexp(n, axis, &support, alpha * FRAC_PI_2);
        let jstar = if t % 2 == 0 { JStar::Default } else { JStar::Qubit(support[rng.random_range(0..support.len())]) };
        let c = decompose_pg(&g, jstar, n).map_err(|e| e.to_string())?;
        bump(dist_phase(&lib_unitary(&c), &expected), "decomposition")?;
        let c = decompose_pg(&g, JStar::Ancilla(n), n + 1).map_err(|e| e.to_string())?;
        let (block, leak) = ancilla_block(&lib_unitary(&c), n);
        bump(dist_phase(&block, &expected), "ancilla decomposition")?;
        bump(leak, "ancilla decomposition leak")?;
    }

    // interface merge against the CNOT product, and its star shape
    for _ in 0..TRIALS {
        let n = 5;
        let pool: Vec<usize> = (1..n).collect();
        let j = random_subset(&mut rng, &pool, 1, 4);
        let k = random_subset(&mut rng, &pool, 1, 4);
        let star = merge_interface(&QubitSet::from_iter(j.iter().copied()), &QubitSet::from_iter(k.iter().copied()), 0)
            .map_err(|e| e.to_string())?;
        let mut expected = M::identity(1 << n, 1 << n);
        for &q in &j {
            expected = gcnot(n, Axis::Z, q, Axis::Y, 0) * expected;
        }
        for &q in &k {
            expected = gcnot(n, Axis::X, q, Axis::Y, 0) * expected;
        }
        bump(dist_phase(&lib_unitary(&star.to_circuit(n)), &expected), "interface merge")?;
        let mut spokes: Vec<usize> = j.iter().chain(&k).copied().collect();
        spokes.sort_unstable();
        spokes.dedup();
        let pairs: Vec<((usize, usize), f64)> = star.gate.pairs().collect();
        let shape_ok = pairs.len() == spokes.len()
            && pairs.iter().zip(&spokes).all(|(((a, b), t), &q)| (*a, *b) == (0, q) && t.abs() == FRAC_PI_4);
        if !shape_ok {
            return Err(format!("interface J={j:?} K={k:?} has pairs {pairs:?}"));
        }
    }

    // closed form: the Z-then-X interface on one set J
    for _ in 0..TRIALS {
        let n = 5;
        let pool: Vec<usize> = (1..n).collect();
        let j = random_subset(&mut rng, &pool, 1, 4);
        let set = QubitSet::from_iter(j.iter().copied());
        let star = merge_interface(&set, &set, 0).map_err(|e| e.to_string())?;
        let mut closed = M::identity(1 << n, 1 << n);
        let mut forward = M::identity(1 << n, 1 << n);
        let mut conj = M::identity(1 << n, 1 << n);
        for &q in &j {
            closed = closed * pexp(n, Axis::Y, &[q], -FRAC_PI_4) * mixed_pexp(n, &[(0, Axis::Y), (q, Axis::Y)], FRAC_PI_4);
            conj = conj * pexp(n, Axis::Y, &[q], FRAC_PI_4) * mixed_pexp(n, &[(0, Axis::Y), (q, Axis::Y)], -FRAC_PI_4);
        }
        // operator products as written: Z-controls product left of X-controls product
        let (mut pz, mut px) = (M::identity(1 << n, 1 << n), M::identity(1 << n, 1 << n));
        for &q in &j {
            pz = pz * gcnot(n, Axis::Z, q, Axis::Y, 0);
            px = px * gcnot(n, Axis::X, q, Axis::Y, 0);
        }
        forward = forward * &pz * &px;
        bump(dist_phase(&lib_unitary(&star.to_circuit(n)), &closed), "merge closed form")?;
        bump(dist_phase(&(px * pz), &closed), "merge closed form (oracle)")?;
        bump(dist_phase(&forward, &conj), "merge closed form, other order")?;
    }

    // adjacent Z and X gadgets through one ancilla: three Clifford gates
    for _ in 0..TRIALS {
        let n = rng.random_range(3..=4);
        let pool: Vec<usize> = (0..n).collect();
        let j = random_subset(&mut rng, &pool, 3, n);
        let k = random_subset(&mut rng, &pool, 3, n);
        let (a, b) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let seq = GadgetSequence::from_gadgets(
            n,
            vec![PhaseGadget::new(Axis::Z, a, j.iter().copied()), PhaseGadget::new(Axis::X, b, k.iter().copied())],
        );
        let r = realize(&seq, RealizationScheme::AncillaMerged).map_err(|e| e.to_string())?;
        let (block, leak) = ancilla_block(&lib_unitary(&r.circuit), n);
        let expected = pexp(n, Axis::X, &k, b * FRAC_PI_2) * pexp(n, Axis::Z, &j, a * FRAC_PI_2);
        bump(dist_phase(&block, &expected), "two-gadget merge")?;
        bump(leak, "two-gadget merge leak")?;
        if r.mq_count() != 3 {
            return Err(format!("two merged gadgets used {} gates", r.mq_count()));
        }
    }

    // CNOT commutation, three cases per gadget axis
    let cases: [(Axis, &str); 6] = [
        (Axis::Z, "j,k in K"),
        (Axis::Z, "k in K, j not"),
        (Axis::Z, "k not in K"),
        (Axis::X, "j,k in K"),
        (Axis::X, "j in K, k not"),
        (Axis::X, "j not in K"),
    ];
    for (ci, (axis, label)) in cases.iter().enumerate() {
        for t in 0..TRIALS {
            let n = rng.random_range(3..=5);
            let mut qs: Vec<usize> = (0..n).collect();
            qs.shuffle(&mut rng);
            let (j, k) = (qs[0], qs[1]);
            let mut support = random_subset(&mut rng, &qs[2..], 0, n - 2);
            // the control of a Z gadget's rule is j, the target k; X swaps roles
            let (hit, other) = if *axis == Axis::Z { (k, j) } else { (j, k) };
            match ci % 3 {
                0 => support.extend([hit, other]),
                1 => support.push(hit),
                _ => {
                    if support.is_empty() {
                        support.push(qs[2]);
                    }
                    if rng.random_bool(0.5) {
                        support.push(other);
                    }
                }
            }
            support.sort_unstable();
            let alpha = rng.random_range(-1.5..1.5);
            let g = PhaseGadget::new(*axis, alpha, support.iter().copied());
            let dir = if t % 2 == 0 { Direction::Left } else { Direction::Right };
            let out = commute_cnot(j, k, &g, dir).map_err(|e| e.to_string())?;
            let mut want: Vec<usize> = support.clone();
            match ci % 3 {
                0 => want.retain(|&q| q != other),
                1 => want.push(other),
                _ => {}
            }
            want.sort_unstable();
            if out.support.to_vec() != want || out.axis != *axis || out.alpha != alpha {
                return Err(format!("commutation case '{label}': got {:?}, want {want:?}", out.support.to_vec()));
            }
            let c = cnot(n, j, k);
            let lhs = &c * pexp(n, *axis, &support, alpha * FRAC_PI_2) * &c;
            bump(dist(&lhs, &pexp(n, *axis, &want, alpha * FRAC_PI_2)), label)?;
        }
    }

    // parity rule for gadget commutation
    let mut odd_seen = 0;
    for _ in 0..TRIALS {
        let n = rng.random_range(2..=5);
        let pool: Vec<usize> = (0..n).collect();
        let j = random_subset(&mut rng, &pool, 1, n);
        let k = random_subset(&mut rng, &pool, 1, n);
        let (ax, bx) = if rng.random_bool(0.8) { (Axis::X, Axis::Z) } else { (Axis::Z, Axis::Z) };
        let (a, b) = (rng.random_range(0.2..0.8), rng.random_range(0.2..0.8));
        let ga = PhaseGadget::new(ax, a, j.iter().copied());
        let gb = PhaseGadget::new(bx, b, k.iter().copied());
        let overlap = j.iter().filter(|q| k.contains(q)).count();
        let predicted = ax == bx || overlap % 2 == 0;
        if pg_commutes(&ga, &gb) != predicted {
            return Err(format!("parity rule: J={j:?} K={k:?} misclassified"));
        }
        let ua = pexp(n, ax, &j, a * FRAC_PI_2);
        let ub = pexp(n, bx, &k, b * FRAC_PI_2);
        let comm = (&ua * &ub - &ub * &ua).norm();
        if predicted {
            bump(comm, "parity rule (commuting)")?;
        } else {
            odd_seen += 1;
            if comm < 1e-6 {
                return Err(format!("parity rule: J={j:?} K={k:?} predicted to anticommute, commutator {comm:.1e}"));
            }
        }
    }
    if odd_seen == 0 {
        return Err("parity rule: no anticommuting instance drawn".into());
    }
    Ok(format!("{} identities x {TRIALS} trials, max deviation {worst:.1e}", 11))
}

/// `M` alternating Z/X gadgets of weight ≥ 3; with `shared` all gadgets act
/// on one support, otherwise each draws its own.
fn alternating_sequence(rng: &mut impl Rng, m: usize, shared: bool) -> GadgetSequence {
    let n = rng.random_range(3..=6);
    let pool: Vec<usize> = (0..n).collect();
    let common = random_subset(rng, &pool, 3, n);
    let gadgets = (0..m)
        .map(|i| {
            let axis = if i % 2 == 0 { Axis::Z } else { Axis::X };
            let support = if shared { common.clone() } else { random_subset(rng, &pool, 3, n) };
            PhaseGadget::new(axis, rng.random_range(0.05..0.45), support)
        })
        .collect();
    GadgetSequence::from_gadgets(n, gadgets)
}

fn gate_count_laws() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut merged_below = 0;
    for m in 1..=20 {
        for t in 0..10 {
            let shared = t < 5;
            let seq = alternating_sequence(&mut rng, m, shared);
            let with = realize(&seq, RealizationScheme::AncillaMerged).map_err(|e| e.to_string())?;
            let without = realize(&seq, RealizationScheme::NoAncilla).map_err(|e| e.to_string())?;
            let ok = with.mq_count() == m + 1
                && if shared { without.mq_count() == 2 * m } else { without.mq_count() <= 2 * m };
            if !ok {
                return Err(format!(
                    "M = {m} ({} support): {} gates with ancilla, {} without",
                    if shared { "shared" } else { "mixed" },
                    with.mq_count(),
                    without.mq_count()
                ));
            }
            merged_below += (without.mq_count() < 2 * m) as usize;
        }
    }
    Ok(format!(
        "M in 1..=20: M+1 with ancilla on all 200 chains; exactly 2M without on shared-support chains, \
         mixed-support chains ≤ 2M ({merged_below} merged below)"
    ))
}

fn is_clifford_grid(theta: f64) -> bool {
    let k = theta / FRAC_PI_4;
    (k - k.round()).abs() <= 1e-12 && k.round().abs() <= 1.0
}

fn clifford_structure() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut gates = 0;
    let check = |r: &mqcomp::cost::Realization, gates: &mut usize, label: &str| -> Result<(), String> {
        let a = r.ancilla.expect("ancilla scheme");
        for g in &r.gates {
            if g.pairs().any(|((x, y), _)| x == a || y == a) {
                *gates += 1;
                if let Some(((x, y), t)) = g.pairs().find(|(_, t)| !is_clifford_grid(*t)) {
                    return Err(format!("{label}: pair ({x},{y}) has phase {t}"));
                }
            }
        }
        Ok(())
    };
    for m in 1..=20 {
        let seq = alternating_sequence(&mut rng, m, m % 2 == 0);
        let r = realize(&seq, RealizationScheme::AncillaMerged).map_err(|e| e.to_string())?;
        // every gate of a pure gadget chain runs through the ancilla
        if let Some(g) = r.gates.iter().find(|g| g.pairs().any(|(_, t)| !is_clifford_grid(t))) {
            return Err(format!("alternating chain M = {m}: non-Clifford gate {g:?}"));
        }
        check(&r, &mut gates, "alternating chain")?;
    }
    let mut programs: Vec<(String, Circuit)> = corpus();
    programs.extend(random_circuits(40, 44).into_iter().enumerate().map(|(i, c)| (format!("random #{i}"), c)));
    for (name, c) in &programs {
        let p = mqcomp::passes::optimize(c, &scheme_opts(RealizationScheme::AncillaMerged)).map_err(|e| e.to_string())?;
        check(&p.realize().map_err(|e| e.to_string())?, &mut gates, name)?;
    }
    Ok(format!("{gates} ancilla-merged gates, all pair phases in {{0, ±π/4}}"))
}

fn norm_model() -> Outcome {
    let mut worst = 0.0f64;
    for k in 1..=64usize {
        let star = MultiQubitGate::from_pairs((1..=k).map(|q| (0, q, FRAC_PI_4)));
        let closed = FRAC_PI_4 * (k as f64).sqrt();
        let d = (nuclear_norm(&star) - closed).abs().max((star_norm(k) - closed).abs());
        worst = worst.max(d);
        if d > 1e-10 {
            return Err(format!("k = {k}: star norm {} vs {closed}", nuclear_norm(&star)));
        }
        let sequential: f64 = (1..=k).map(|q| nuclear_norm(&MultiQubitGate::from_pairs([(0, q, FRAC_PI_4)]))).sum();
        let ratio = sequential / nuclear_norm(&star);
        if (ratio - (k as f64).sqrt()).abs() > 1e-10 {
            return Err(format!("k = {k}: sequential/star ratio {ratio}"));
        }
    }
    let star30 = Gate::MultiQubit(MultiQubitGate::from_pairs((1..=30).map(|q| (0, q, FRAC_PI_4))));
    let p = depol_prob(&star30, &NoiseModel::default()).map_err(|e| e.to_string())?;
    let rel = (p - 0.00528).abs() / 0.00528;
    if rel > 0.10 {
        return Err(format!("k = 30 depolarization {p:.5} is {:.1}% from 0.00528", 100.0 * rel));
    }
    Ok(format!("max norm deviation {worst:.1e}; k = 30 depolarization {p:.5} ({:.1}% from 0.00528)", 100.0 * rel))
}

fn benchmark_reproduction() -> Outcome {
    let opts = BenchOptions::default();
    let report = bench::run_bench(&corpus_dir(), &opts).map_err(|e| e.to_string())?;
    let rows: Vec<_> = report.rows().filter(|r| r.num_qubits.is_some_and(|n| n <= 10)).collect();
    let names: Vec<&str> = rows.iter().map(|r| r.name.as_str()).collect();
    for family in ["qaoa_n6", "qft", "ising", "swap_test"] {
        if !names.iter().any(|n| n.starts_with(family)) {
            return Err(format!("suite lacks a {family} circuit"));
        }
    }
    if rows.len() < 10 || rows.iter().any(|r| !r.is_ok()) {
        return Err(format!("{} usable circuits; statuses {:?}", rows.len(), rows.iter().map(|r| &r.status).collect::<Vec<_>>()));
    }
    let total = rows.len() as f64;
    let g: Vec<f64> = rows.iter().map(|r| r.gate_count_ratio.unwrap()).collect();
    let pm: Vec<f64> = rows.iter().map(|r| r.parallel_merge_ratio.unwrap()).collect();
    let nr: Vec<f64> = rows.iter().map(|r| r.norm_ratio.unwrap()).collect();
    if let Some((r, x)) = rows.iter().zip(&g).find(|(_, x)| **x <= 1.0) {
        return Err(format!("{}: gate-count ratio {x}", r.name));
    }
    if let Some((r, x)) = rows.iter().zip(&pm).find(|(_, x)| **x < 1.0) {
        return Err(format!("{}: parallel-merge ratio {x}", r.name));
    }
    let strict = pm.iter().filter(|x| **x > 1.0).count() as f64 / total;
    let norm_ok = nr.iter().filter(|x| **x >= 1.0).count() as f64 / total;
    if strict < 0.7 || norm_ok < 0.7 {
        return Err(format!("strict merge improvement on {:.0}%, norm ratio ≥ 1 on {:.0}%", 100.0 * strict, 100.0 * norm_ok));
    }
    let a = &report.aggregates;
    let mean_nr = {
        let finite: Vec<f64> = nr.iter().copied().filter(|x| x.is_finite()).collect();
        finite.iter().sum::<f64>() / finite.len() as f64
    };
    let eps: Vec<f64> = rows.iter().filter_map(|r| r.eps_success).collect();
    Ok(format!(
        "{} circuits; means: gate-count ratio {:.2}, parallel-merge ratio {:.2}, norm ratio {:.2} (finite), eps {:.2}; strict merge gain {:.0}%, norm ratio ≥ 1 {:.0}%",
        rows.len(),
        a.mean_gate_count_ratio.unwrap_or(f64::NAN),
        a.mean_parallel_merge_ratio.unwrap_or(f64::NAN),
        mean_nr,
        eps.iter().sum::<f64>() / eps.len() as f64,
        100.0 * strict,
        100.0 * norm_ok
    ))
}

fn noise_pipeline() -> Outcome {
    let src = std::fs::read_to_string(corpus_dir().join("qaoa_n6.qasm")).map_err(|e| e.to_string())?;
    let input = to_zz_basis(&parse_qasm(&src).map_err(|e| e.to_string())?);
    let program = mqcomp::passes::optimize(&input, &CompileOptions::default()).map_err(|e| e.to_string())?;
    let model = NoiseModel::new(1e-3, 1e-3, 0).map_err(|e| e.to_string())?;
    let e_inp = Experiment::from_circuit(&input).map_err(|e| e.to_string())?;
    let e_comp = Experiment::from_program(&program).map_err(|e| e.to_string())?;
    let (samples, shots) = (10_000, 10);
    let run_i = sample_runs(&e_inp, &model, samples, shots).map_err(|e| e.to_string())?;
    let run_c = sample_runs(&e_comp, &model, samples, shots).map_err(|e| e.to_string())?;
    let ideal = e_inp.ideal().map_err(|e| e.to_string())?;
    let mc = paired_relative_error(&run_c, &run_i, &ideal).map_err(|e| e.to_string())?;
    let sp = paired_success_error(&run_c, &run_i).map_err(|e| e.to_string())?;
    let closed = relative_error(
        e_comp.success_probability(&model).map_err(|e| e.to_string())?,
        e_inp.success_probability(&model).map_err(|e| e.to_string())?,
    )
    .ok_or("closed-form relative error undefined")?;
    let detail = format!(
        "success-prob eps {:.3} [{:.3}, {:.3}] (closed form {closed:.3}), Monte Carlo eps {:.3} [{:.3}, {:.3}]",
        sp.value, sp.lo, sp.hi, mc.value, mc.lo, mc.hi
    );
    let overlap = sp.lo <= mc.hi && mc.lo <= sp.hi;
    if sp.lo > 0.0 && mc.lo > 0.0 && closed > 0.0 && overlap {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn optimization_dynamics() -> Outcome {
    let mut circuits = corpus();
    circuits.extend(random_circuits(30, 8).into_iter().enumerate().map(|(i, c)| (format!("random #{i}"), c)));
    let mut steps = 0;
    for (name, c) in &circuits {
        for cost in [CostOrder::Lexicographic, CostOrder::Weighted(0.5)] {
            let opts = CompileOptions { cost, ..CompileOptions::default() };
            let (_, trace) = optimize_traced(c, &opts).map_err(|e| e.to_string())?;
            steps += trace.accepted.len().saturating_sub(1);
            if let Some(w) = trace.accepted.windows(2).find(|w| !cost.less(&w[1], &w[0])) {
                return Err(format!("{name}: cost went from {:?} to {:?}", w[0], w[1]));
            }
            if trace.rejected > 1 {
                return Err(format!("{name}: {} rejected candidates", trace.rejected));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst = f64::INFINITY;
    let mut instances = 0;
    let mut compare = |w: &DMatrix<f64>| -> Result<(), String> {
        let g = matching_weight(w, &greedy_matching(w));
        let e = matching_weight(w, &exhaustive_matching(w));
        instances += 1;
        if e > 0.0 {
            worst = worst.min(g / e);
        }
        if g + 1e-12 < 0.5 * e {
            return Err(format!("greedy {g} below half of exhaustive {e}"));
        }
        Ok(())
    };
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
        compare(&w)?;
    }
    // improvement weights of actual gadget sequences
    for _ in 0..40 {
        let n = rng.random_range(3..=8);
        let pool: Vec<usize> = (0..n).collect();
        let gadgets = (0..rng.random_range(2..8))
            .map(|_| PhaseGadget::new(if rng.random_bool(0.5) { Axis::X } else { Axis::Z }, rng.random_range(-0.5..0.5), random_subset(&mut rng, &pool, 2, n)))
            .collect();
        let seq = GadgetSequence::from_gadgets(n, gadgets);
        let costs = conjugation_costs(&seq, RealizationScheme::AncillaMerged).map_err(|e| e.to_string())?;
        let w = DMatrix::from_fn(n, n, |a, b| {
            if a == b {
                return 0.0;
            }
            let gain = |x: usize, y: usize| costs.current.total_norm - costs.costs[x][y].total_norm;
            gain(a, b).max(gain(b, a)).max(0.0)
        });
        compare(&w)?;
    }
    Ok(format!(
        "{} compilations, {steps} accepted steps all strictly decreasing; greedy/exhaustive ≥ {worst:.2} over {instances} instances",
        2 * circuits.len()
    ))
}

fn run_cli(args: &[&str], dir: &Path) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_mqcomp"))
        .args(args)
        .current_dir(dir)
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(format!("mqcomp {args:?}: {}", String::from_utf8_lossy(&out.stderr)))
    }
}

fn determinism() -> Outcome {
    let corpus = corpus_dir();
    let corpus = corpus.to_str().unwrap();
    let mut outputs: Vec<Vec<(String, Vec<u8>)>> = Vec::new();
    for _ in 0..2 {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let mut files = Vec::new();
        for name in ["qaoa_n6", "adder_n6", "swap_test_n5"] {
            let src = format!("{corpus}/{name}.qasm");
            run_cli(&["compile", &src, "--out", &format!("{name}.json")], dir.path())?;
            files.push(format!("{name}.json"));
            files.push(format!("{name}.metrics.json"));
        }
        run_cli(
            &["bench", corpus, "--samples", "300", "--shots", "10", "--seed", "7", "--csv", "r.csv", "--out", "r.json"],
            dir.path(),
        )?;
        files.push("r.csv".into());
        outputs.push(
            files
                .into_iter()
                .map(|f| {
                    let bytes = std::fs::read(dir.path().join(&f)).unwrap_or_default();
                    (f, bytes)
                })
                .collect(),
        );
    }
    for ((name, a), (_, b)) in outputs[0].iter().zip(&outputs[1]) {
        if a.is_empty() || a != b {
            return Err(format!("{name} differs between runs or is empty"));
        }
    }
    Ok(format!("{} output files byte-identical across two runs", outputs[0].len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("semantic preservation", semantic_preservation),
        ("algebraic identities", identity_suite),
        ("gate-count laws", gate_count_laws),
        ("Clifford structure", clifford_structure),
        ("norm model", norm_model),
        ("benchmark reproduction", benchmark_reproduction),
        ("noise pipeline", noise_pipeline),
        ("optimization dynamics", optimization_dynamics),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name} ({secs:.1}s): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL {name} ({secs:.1}s): {detail}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
    println!("all {} criteria passed", criteria.len());
}
