//! Brute-force oracles shared by the integration tests. They deliberately
//! avoid the library's own simulation code.
#![allow(dead_code)]

use dqc_core::circuit::{Circuit, Gate};
use dqc_core::hypergraph::WeightedHypergraph;
use dqc_core::matrix::{ComplexMatrix, C64};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn cx(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Textbook U(θ,φ,λ).
pub fn u_matrix(theta: f64, phi: f64, lambda: f64) -> [[C64; 2]; 2] {
    let (cs, sn) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    [
        [cx(cs, 0.0), -C64::from_polar(sn, lambda)],
        [C64::from_polar(sn, phi), C64::from_polar(cs, phi + lambda)],
    ]
}

fn bit(x: usize, q: usize, n: usize) -> usize {
    (x >> (n - 1 - q)) & 1
}

/// Full 2^n matrix of a single-qubit `u` on qubit `q`, entry by entry.
pub fn full_single(n: usize, q: usize, u: [[C64; 2]; 2]) -> ComplexMatrix {
    let dim = 1 << n;
    let mut m = ComplexMatrix::zeros(dim);
    for r in 0..dim {
        for c in 0..dim {
            if (r ^ c) & !(1 << (n - 1 - q)) == 0 {
                m.set(r, c, u[bit(r, q, n)][bit(c, q, n)]);
            }
        }
    }
    m
}

/// Controlled-`u` as a full matrix.
pub fn full_controlled(n: usize, ctl: usize, tgt: usize, u: [[C64; 2]; 2]) -> ComplexMatrix {
    let dim = 1 << n;
    let mut m = ComplexMatrix::zeros(dim);
    for r in 0..dim {
        for c in 0..dim {
            if (r ^ c) & !(1 << (n - 1 - tgt)) != 0 || bit(r, ctl, n) != bit(c, ctl, n) {
                continue;
            }
            let v = if bit(c, ctl, n) == 0 {
                if r == c { cx(1.0, 0.0) } else { cx(0.0, 0.0) }
            } else {
                u[bit(r, tgt, n)][bit(c, tgt, n)]
            };
            m.set(r, c, v);
        }
    }
    m
}

pub fn x_matrix() -> [[C64; 2]; 2] {
    [[cx(0.0, 0.0), cx(1.0, 0.0)], [cx(1.0, 0.0), cx(0.0, 0.0)]]
}

/// Product of `U`/`CX` primitives, later gates multiplied on the left.
pub fn primitive_unitary(n: usize, ops: &[(String, Vec<f64>, Vec<usize>)]) -> ComplexMatrix {
    let mut acc = ComplexMatrix::identity(1 << n);
    for (name, p, q) in ops {
        let g = match name.as_str() {
            "U" => full_single(n, q[0], u_matrix(p[0], p[1], p[2])),
            "CX" => full_controlled(n, q[0], q[1], x_matrix()),
            other => panic!("not a primitive: {other}"),
        };
        acc = g.matmul(&acc);
    }
    acc
}

/// Permutation matrix flipping `target` when all `controls` are set.
pub fn multi_controlled_x(n: usize, controls: &[usize], target: usize) -> ComplexMatrix {
    let dim = 1 << n;
    let mut m = ComplexMatrix::zeros(dim);
    for c in 0..dim {
        let fire = controls.iter().all(|&q| bit(c, q, n) == 1);
        let r = if fire { c ^ (1 << (n - 1 - target)) } else { c };
        m.set(r, c, cx(1.0, 0.0));
    }
    m
}

/// Worked example with four qubits: gates (1)-(4) on {0,1} rooted at 0 with
/// an anti-diagonal root gate, a Hadamard on the root, (5) and (8) rooted at
/// 0, the diagonal controlled gates (6), (7) and (10) rooted at 1, and the
/// diagonal gate (9) on qubit 1.
pub fn worked_example() -> Circuit {
    Circuit::from_gates(
        4,
        vec![
            Gate::cx(0, 1),
            Gate::cry(0.7, 0, 1),
            Gate::x(0),
            Gate::cx(0, 1),
            Gate::h(0),
            Gate::cx(0, 2),
            Gate::crz(0.4, 1, 0),
            Gate::crz(1.3, 1, 0),
            Gate::cx(0, 3),
            Gate::z(1),
            Gate::cx(1, 0),
        ],
    )
    .unwrap()
}

/// Random circuits over a wider gateset than the benchmark generator, so
/// that control-symmetric flips and free riders occur.
pub fn random_test_circuit(rng: &mut ChaCha8Rng, n: usize, len: usize) -> Circuit {
    let mut gates = Vec::new();
    for _ in 0..len {
        let a = rng.random_range(0..n);
        let mut b = rng.random_range(0..n - 1);
        if b >= a {
            b += 1;
        }
        let t = rng.random_range(0.0..std::f64::consts::TAU);
        gates.push(match rng.random_range(0..11) {
            0 => Gate::h(a),
            1 => Gate::x(a),
            2 => Gate::rz(t, a),
            3 => Gate::ry(t, a),
            4 => Gate::t(a),
            5 | 6 => Gate::cx(a, b),
            7 => Gate::crz(t, a, b),
            8 => Gate::cp(t, a, b),
            9 => Gate::cz(a, b),
            _ => Gate::cry(t, a, b),
        });
    }
    Circuit::from_gates(n, gates).unwrap()
}

/// Exhaustive minimum of Σ (parts spanned − 1)·w over all capacity-feasible
/// bipartitions, computed independently of the library's cost routine.
pub fn brute_force_bipartition(h: &WeightedHypergraph, capacity: usize) -> u64 {
    let n = h.num_nodes;
    let mut best = u64::MAX;
    for mask in 0u32..(1 << n) {
        let ones = mask.count_ones() as usize;
        if ones > capacity || n - ones > capacity {
            continue;
        }
        let cost: u64 = h
            .edges
            .iter()
            .map(|e| {
                let side: Vec<bool> = e.nodes.iter().map(|&v| mask >> v & 1 == 1).collect();
                let cut = side.iter().any(|&s| s) && side.iter().any(|&s| !s);
                if cut {
                    e.weight
                } else {
                    0
                }
            })
            .sum();
        best = best.min(cost);
    }
    best
}

pub fn random_hypergraph(rng: &mut ChaCha8Rng, n: usize, m: usize) -> WeightedHypergraph {
    let edges = (0..m).map(|_| {
        let size = rng.random_range(2..=4.min(n));
        let mut nodes: Vec<usize> = (0..n).collect();
        for i in 0..size {
            let j = rng.random_range(i..n);
            nodes.swap(i, j);
        }
        nodes.truncate(size);
        (nodes, rng.random_range(1..=3))
    });
    WeightedHypergraph::from_edges(n, edges)
}


/// State after applying `gates` to `input`, one amplitude pair at a time.
pub fn oracle_apply(n: usize, gates: &[Gate], input: &[C64]) -> Vec<C64> {
    let mut s = input.to_vec();
    for g in gates {
        let u = g.unitary();
        let tmask = 1usize << (n - 1 - g.target());
        let cmask = g.control().map_or(0, |c| 1usize << (n - 1 - c));
        for i in 0..s.len() {
            if i & tmask != 0 || i & cmask != cmask {
                continue;
            }
            let (a, b) = (s[i], s[i | tmask]);
            s[i] = u.get(0, 0) * a + u.get(0, 1) * b;
            s[i | tmask] = u.get(1, 0) * a + u.get(1, 1) * b;
        }
    }
    s
}

/// Columns of the circuit unitary, one simulated basis state each.
pub fn oracle_columns(c: &Circuit) -> Vec<Vec<C64>> {
    let n = c.num_qubits();
    (0..1usize << n)
        .map(|k| {
            let mut e = vec![cx(0.0, 0.0); 1 << n];
            e[k] = cx(1.0, 0.0);
            oracle_apply(n, c.gates(), &e)
        })
        .collect()
}

/// Largest entrywise distance between `a` and `b` after removing the global
/// phase fixed by `a`'s largest entry.
pub fn phase_distance(a: &[Vec<C64>], b: &[Vec<C64>]) -> f64 {
    let (mut best, mut at) = (0.0, (0, 0));
    for (j, col) in a.iter().enumerate() {
        for (i, v) in col.iter().enumerate() {
            if v.norm() > best {
                best = v.norm();
                at = (j, i);
            }
        }
    }
    let phase = b[at.0][at.1] / a[at.0][at.1];
    let phase = phase / phase.norm();
    a.iter()
        .zip(b)
        .flat_map(|(ca, cb)| ca.iter().zip(cb).map(move |(x, y)| (x * phase - y).norm()))
        .fold(0.0, f64::max)
}
