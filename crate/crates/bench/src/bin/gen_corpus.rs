//! Writes the QASM benchmark corpus.
//!
//! Usage: `gen_corpus [OUT_DIR]` (default `corpus/qasmbench`).

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Qasm {
    n: usize,
    body: String,
}

impl Qasm {
    fn new(n: usize) -> Self {
        Qasm { n, body: String::new() }
    }

    fn op(&mut self, s: impl AsRef<str>) {
        self.body.push_str(s.as_ref());
        self.body.push('\n');
    }

    fn barrier(&mut self) {
        let qs: Vec<String> = (0..self.n).map(|i| format!("q[{i}]")).collect();
        self.op(format!("barrier {};", qs.join(",")));
    }

    fn finish(self, measured: &[usize]) -> String {
        let mut out = String::from("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
        let _ = writeln!(out, "qreg q[{}];", self.n);
        let _ = writeln!(out, "creg c[{}];", measured.len().max(1));
        out.push_str(&self.body);
        for (k, q) in measured.iter().enumerate() {
            let _ = writeln!(out, "measure q[{q}] -> c[{k}];");
        }
        out
    }
}

fn all(n: usize) -> Vec<usize> {
    (0..n).collect()
}

fn ghz(n: usize) -> String {
    let mut q = Qasm::new(n);
    q.op("h q[0];");
    for i in 0..n - 1 {
        q.op(format!("cx q[{}],q[{}];", i, i + 1));
    }
    q.finish(&all(n))
}

fn cat(n: usize) -> String {
    let mut q = Qasm::new(n);
    q.op("h q[0];");
    for i in 1..n {
        q.op(format!("cx q[0],q[{i}];"));
    }
    q.finish(&all(n))
}

/// Bernstein-Vazirani with the ancilla on the last qubit and a secret of
/// `ones` set bits spread over the data qubits.
fn bv(n: usize, ones: usize) -> String {
    let data = n - 1;
    let mut q = Qasm::new(n);
    q.op(format!("x q[{data}];"));
    for i in 0..n {
        q.op(format!("h q[{i}];"));
    }
    q.barrier();
    for i in 0..data {
        if (i * ones) % data < ones {
            q.op(format!("cx q[{i}],q[{data}];"));
        }
    }
    q.barrier();
    for i in 0..data {
        q.op(format!("h q[{i}];"));
    }
    q.finish(&all(data))
}

/// Transverse-field Ising chain, `steps` Trotter steps.
fn ising(n: usize, steps: usize) -> String {
    let (j, h, dt) = (1.0, 0.5, 0.1);
    let mut q = Qasm::new(n);
    for i in 0..n {
        q.op(format!("h q[{i}];"));
    }
    for _ in 0..steps {
        for parity in [0, 1] {
            for i in (parity..n - 1).step_by(2) {
                q.op(format!("cx q[{}],q[{}];", i, i + 1));
                q.op(format!("rz({:.12}) q[{}];", -2.0 * j * dt, i + 1));
                q.op(format!("cx q[{}],q[{}];", i, i + 1));
            }
        }
        for i in 0..n {
            q.op(format!("rx({:.12}) q[{i}];", 2.0 * h * dt));
        }
    }
    q.finish(&all(n))
}

/// Ancilla on qubit 0 compares two registers with controlled swaps.
fn swap_test(n: usize, rng: &mut ChaCha8Rng) -> String {
    let half = (n - 1) / 2;
    let mut q = Qasm::new(n);
    for i in 1..n {
        q.op(format!("u3({:.12},{:.12},0) q[{i}];", rng.random_range(0.0..PI), rng.random_range(0.0..2.0 * PI)));
    }
    q.barrier();
    q.op("h q[0];");
    for i in 1..=half {
        q.op(format!("cswap q[0],q[{}],q[{}];", i, i + half));
    }
    q.op("h q[0];");
    q.finish(&[0])
}

/// Nearest-neighbour distance estimate: amplitude-encoded test and
/// training vectors followed by a swap test.
fn knn(n: usize, rng: &mut ChaCha8Rng) -> String {
    let half = (n - 1) / 2;
    let mut q = Qasm::new(n);
    for i in 1..n {
        q.op(format!("ry({:.12}) q[{i}];", rng.random_range(0.0..PI)));
    }
    q.op("h q[0];");
    for i in 1..=half {
        q.op(format!("cswap q[0],q[{}],q[{}];", i, i + half));
    }
    q.op("h q[0];");
    q.finish(&[0])
}

/// Cascade of controlled rotations followed by a CNOT ladder.
fn w_state(n: usize) -> String {
    let mut q = Qasm::new(n);
    q.op("x q[0];");
    for i in 0..n - 1 {
        let theta = (1.0 / ((n - i) as f64)).sqrt().acos();
        q.op(format!("ry({:.12}) q[{}];", -theta, i + 1));
        q.op(format!("cz q[{}],q[{}];", i, i + 1));
        q.op(format!("ry({:.12}) q[{}];", theta, i + 1));
    }
    for i in 0..n - 1 {
        q.op(format!("cx q[{}],q[{}];", i + 1, i));
    }
    q.finish(&all(n))
}

fn qft(n: usize) -> String {
    let mut q = Qasm::new(n);
    for i in (0..n).step_by(3) {
        q.op(format!("x q[{i}];"));
    }
    q.barrier();
    for i in 0..n {
        q.op(format!("h q[{i}];"));
        for j in i + 1..n {
            let d = j - i;
            let angle = if d < 31 {
                format!("pi/{}", 1u64 << d)
            } else {
                format!("{:e}", PI / 2f64.powi(d as i32))
            };
            q.op(format!("cu1({angle}) q[{j}],q[{i}];"));
        }
    }
    q.finish(&all(n))
}

/// Quantum volume: each layer pairs the qubits at random and applies a
/// random two-qubit block of three CNOTs interleaved with random u3.
fn quantum_volume(n: usize, depth: usize, rng: &mut ChaCha8Rng) -> String {
    let mut q = Qasm::new(n);
    let u3 = |q: &mut Qasm, rng: &mut ChaCha8Rng, t: usize| {
        q.op(format!(
            "u3({:.12},{:.12},{:.12}) q[{t}];",
            rng.random_range(0.1..PI - 0.1),
            rng.random_range(0.0..2.0 * PI),
            rng.random_range(0.0..2.0 * PI)
        ));
    };
    for _ in 0..depth {
        let mut perm = all(n);
        for i in (1..n).rev() {
            perm.swap(i, rng.random_range(0..=i));
        }
        for pair in perm.chunks(2) {
            let (a, b) = (pair[0], pair[1]);
            for (c, t) in [(a, b), (b, a), (a, b)] {
                u3(&mut q, rng, a);
                u3(&mut q, rng, b);
                q.op(format!("cx q[{c}],q[{t}];"));
            }
            u3(&mut q, rng, a);
            u3(&mut q, rng, b);
        }
    }
    q.finish(&all(n))
}

fn main() -> std::io::Result<()> {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("corpus/qasmbench"));
    std::fs::create_dir_all(&out)?;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let files = [
        ("ghz_n40", ghz(40)),
        ("cat_n35", cat(35)),
        ("bv_n70", bv(70, 36)),
        ("ising_n34", ising(34, 1)),
        ("knn_n41", knn(41, &mut rng)),
        ("wstate_n76", w_state(76)),
        ("swap_test_n25", swap_test(25, &mut rng)),
        ("swap_test_n41", swap_test(41, &mut rng)),
        ("qft_n29", qft(29)),
        ("qft_n63", qft(63)),
        ("qv_n32", quantum_volume(32, 32, &mut rng)),
    ];
    for (name, text) in files {
        let path = out.join(format!("{name}.qasm"));
        std::fs::write(&path, text)?;
        println!("{}", path.display());
    }
    Ok(())
}
