//! Acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line. Tolerances are pinned in the assertions. Run with
//! `cargo test -p gamma-interp-cli --test acceptance -- --nocapture`.

use gamma_interp::cpick::{self, InterpProblem, PencilStatus};
use gamma_interp::diamond;
use gamma_interp::gamma::{self, GammaMap, GammaPoint, RoyalStructure};
use gamma_interp::nevpick::{self, NPData, Solvability};
use gamma_interp::pipeline::{self, ClassKind, SolveOptions, SolveStatus};
use gamma_interp::rational::{phasar_derivative, BlaschkeProduct};
use gamma_interp::{c64, families, GridConfig, Tolerances};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_gamma-interp")
}

fn tols() -> Tolerances {
    Tolerances::default()
}

fn std_nodes() -> Vec<Complex64> {
    vec![c64(0.3, 0.0), c64(-0.2, 0.0), c64(0.0, 0.4)]
}

struct Criterion {
    name: &'static str,
    failures: Vec<String>,
}

impl Criterion {
    fn new(name: &'static str) -> Self {
        Criterion {
            name,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: &str) {
        if !ok {
            self.failures.push(what.to_string());
        }
    }

    fn finish(self) {
        if self.failures.is_empty() {
            println!("{}: PASS", self.name);
        } else {
            println!("{}: FAIL — {}", self.name, self.failures.join("; "));
        }
        assert!(
            self.failures.is_empty(),
            "{}: {}",
            self.name,
            self.failures.join("; ")
        );
    }
}

fn problem_json(nodes: &[Complex64], h: &GammaMap, m_override: Option<&BlaschkeProduct>) -> Value {
    let targets: Vec<Value> = nodes
        .iter()
        .map(|&z| {
            let t = h.eval(z);
            serde_json::json!({"s": [t.s.re, t.s.im], "p": [t.p.re, t.p.im]})
        })
        .collect();
    let mut v = serde_json::json!({
        "version": "gamma-interp/1",
        "nodes": nodes.iter().map(|z| vec![z.re, z.im]).collect::<Vec<_>>(),
        "targets": targets,
    });
    if let Some(m) = m_override {
        v["overrides"] = serde_json::json!({
            "m": serde_json::to_value(m).unwrap(),
        });
    }
    v
}

fn parse_rational(v: &Value) -> gamma_interp::rational::RationalFn {
    let poly = |entry: &Value| {
        gamma_interp::rational::ComplexPoly::new(
            entry
                .as_array()
                .unwrap()
                .iter()
                .map(|c| c64(c[0].as_f64().unwrap(), c[1].as_f64().unwrap()))
                .collect(),
        )
    };
    gamma_interp::rational::RationalFn::new_unreduced(poly(&v["num"]), poly(&v["den"])).unwrap()
}

fn parse_blaschke(v: &Value) -> BlaschkeProduct {
    serde_json::from_value(v.clone()).unwrap()
}

/// Example 5.2(2) end to end: solved by the CLI; the override run recovers
/// q = -λ² and the closed-form map, the free run recovers m = -λ.
#[test]
fn criterion_1_aligned_end_to_end() {
    let mut c = Criterion::new("criterion 1 (aligned family end-to-end)");
    let h = families::ex52_2(0.5);
    let nodes = std_nodes();
    let dir = std::env::temp_dir().join("gamma_interp_acceptance");
    std::fs::create_dir_all(&dir).unwrap();

    // free-search run through the CLI
    let free_path = dir.join("ex52_2_free.json");
    std::fs::write(
        &free_path,
        serde_json::to_string(&problem_json(&nodes, &h, None)).unwrap(),
    )
    .unwrap();
    let out = Command::new(bin())
        .args(["solve", free_path.to_str().unwrap()])
        .output()
        .unwrap();
    c.check(
        out.status.code() == Some(0),
        &format!("cmd_solve (free) exit code {:?}", out.status.code()),
    );
    let report: Value = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    c.check(
        report["status"] == "solved",
        &format!("free-search status {}", report["status"]),
    );
    if report["m"].is_object() {
        let m_hat = parse_blaschke(&report["m"]);
        let worst = nodes
            .iter()
            .map(|&l| (m_hat.eval(l) + l).norm())
            .fold(0.0, f64::max);
        c.check(
            worst <= 1e-3,
            &format!("free-search auxiliary extremal deviation {worst:.3e} > 1e-3"),
        );
    } else {
        c.check(false, "free-search report carries no m");
    }

    // override run with m = -λ
    let m = BlaschkeProduct::mobius(c64(-1.0, 0.0), c64(0.0, 0.0)).unwrap();
    let over_path = dir.join("ex52_2_override.json");
    std::fs::write(
        &over_path,
        serde_json::to_string(&problem_json(&nodes, &h, Some(&m))).unwrap(),
    )
    .unwrap();
    let out = Command::new(bin())
        .args(["solve", over_path.to_str().unwrap()])
        .output()
        .unwrap();
    c.check(
        out.status.code() == Some(0),
        &format!("cmd_solve (override) exit code {:?}", out.status.code()),
    );
    let report: Value = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    c.check(report["status"] == "solved", "override run not solved");

    if report["q"].is_object() {
        let q_hat = parse_blaschke(&report["q"]);
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        let worst = (0..50)
            .map(|_| {
                let z = Complex64::from_polar(rng.gen_range(0.0..0.95), rng.gen_range(0.0..6.28));
                (q_hat.eval(z) + z * z).norm()
            })
            .fold(0.0, f64::max);
        c.check(
            worst <= 1e-6,
            &format!("override q̂ deviation from -λ² is {worst:.3e} > 1e-6"),
        );
    } else {
        c.check(false, "override report carries no q");
    }

    if report["h"].is_object() {
        let s_hat = parse_rational(&report["h"]["s"]);
        let p_hat = parse_rational(&report["h"]["p"]);
        let mut rng = ChaCha8Rng::seed_from_u64(102);
        let worst = (0..20)
            .map(|_| {
                let z = Complex64::from_polar(rng.gen_range(0.0..0.9), rng.gen_range(0.0..6.28));
                let t = h.eval(z);
                (s_hat.eval(z) - t.s).norm().max((p_hat.eval(z) - t.p).norm())
            })
            .fold(0.0, f64::max);
        c.check(
            worst <= 1e-5,
            &format!("override ĥ held-out deviation {worst:.3e} > 1e-5"),
        );
    } else {
        c.check(false, "override report carries no h");
    }
    c.finish();
}

/// Royal-node locations, multiplicities and classifications of the corpus.
#[test]
fn criterion_2_royal_node_corpus() {
    let mut c = Criterion::new("criterion 2 (royal-node/classification corpus)");
    let t = tols();

    // aligned family: cube roots of -1, targets -ω
    let h = families::ex52_2(0.5);
    let cls = pipeline::classify(&h, &t).unwrap();
    c.check(cls.kind == ClassKind::Aligned, "ex52_2 not aligned");
    c.check(cls.circle_nodes.len() == 3, "ex52_2 node count");
    for (node, target) in cls.circle_nodes.iter().zip(&cls.target_points) {
        let w = c64(node[0], node[1]);
        let tv = c64(target[0], target[1]);
        c.check(
            (w.powi(3) + 1.0).norm() <= 1e-8,
            &format!("ex52_2 node {w} not a cube root of -1"),
        );
        c.check(
            (tv + w).norm() <= 1e-8,
            &format!("ex52_2 target at {w} is not -ω"),
        );
    }

    // symmetrised squares: fourth roots of unity, caddywhompus
    let h = families::excaddy2(0.5).unwrap();
    let cls = pipeline::classify(&h, &t).unwrap();
    c.check(cls.kind == ClassKind::Caddywhompus, "excaddy2 class");
    for target in [c64(1.0, 0.0), c64(0.0, 1.0), c64(-1.0, 0.0), c64(0.0, -1.0)] {
        c.check(
            cls.circle_nodes
                .iter()
                .any(|n| (c64(n[0], n[1]) - target).norm() <= 1e-8),
            &format!("excaddy2 missing node {target}"),
        );
    }

    // cubic symmetrisation at α = -1/√3
    let h = families::excaddy3(-1.0 / 3.0f64.sqrt()).unwrap();
    let cls = pipeline::classify(&h, &t).unwrap();
    c.check(cls.kind == ClassKind::Caddywhompus, "excaddy3 class");
    let special = Complex64::from_polar(1.0, 5.0 * std::f64::consts::PI / 6.0);
    let mut expected = vec![c64(1.0, 0.0), c64(-1.0, 0.0), special, special.conj()];
    for n in &cls.circle_nodes {
        let w = c64(n[0], n[1]);
        if let Some(k) = expected.iter().position(|e| (e - w).norm() <= 1e-8) {
            expected.remove(k);
        }
    }
    c.check(expected.is_empty(), "excaddy3 node set mismatch");
    let idx = cls
        .circle_nodes
        .iter()
        .position(|n| (c64(n[0], n[1]) - special).norm() <= 1e-8);
    match idx {
        Some(k) => {
            let tv = c64(cls.target_points[k][0], cls.target_points[k][1]);
            c.check(
                (tv - c64(0.0, -1.0)).norm() <= 1e-8,
                &format!("excaddy3 target at e^{{i5π/6}} is {tv}, not -i"),
            );
        }
        None => c.check(false, "excaddy3 special node missing"),
    }

    // coalesced node of the degree-3 symmetrisation at α = 1/3
    let h = families::excaddy4(1.0 / 3.0).unwrap();
    match gamma::royal_nodes(&h, &t).unwrap() {
        RoyalStructure::Nodes(nodes) => {
            let circle: Vec<_> = nodes.iter().filter(|n| n.on_circle).collect();
            c.check(circle.len() == 1, "excaddy4 should have one circle node");
            if let [n] = circle.as_slice() {
                c.check(n.multiplicity == 6, "excaddy4 multiplicity");
                c.check(
                    n.point().map_or(false, |w| (w - c64(1.0, 0.0)).norm() <= 1e-6),
                    "excaddy4 node location",
                );
            }
        }
        RoyalStructure::RoyalMap => c.check(false, "excaddy4 is not a royal map"),
    }
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let z = Complex64::from_polar(rng.gen_range(0.0..0.95), rng.gen_range(0.0..6.28));
        let s = h.s.eval(z);
        let p = h.p.eval(z);
        let lhs = s * s - 4.0 * p;
        let rhs = (z - 1.0).powi(6) / (3.0 - z).powi(2);
        worst = worst.max((lhs - rhs).norm() / (1.0 + rhs.norm()));
    }
    c.check(
        worst <= 1e-10,
        &format!("excaddy4 pointwise identity defect {worst:.3e}"),
    );
    c.finish();
}

/// The four algebraic identities under 100-sample fuzz.
#[test]
fn criterion_3_identity_suite() {
    let mut c = Criterion::new("criterion 3 (identity suite)");
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let rand_unit =
        |rng: &mut ChaCha8Rng| Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU));
    let rand_disc = |rng: &mut ChaCha8Rng, rmax: f64| {
        Complex64::from_polar(rng.gen_range(0.0..rmax), rng.gen_range(0.0..std::f64::consts::TAU))
    };
    let rand_blaschke = |rng: &mut ChaCha8Rng, d: usize| {
        let zeros = (0..d).map(|_| rand_disc(rng, 0.85)).collect();
        BlaschkeProduct::new(rand_unit(rng), zeros).unwrap()
    };

    // royal identity
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let m = rand_blaschke(&mut rng, 1);
        let q = rand_blaschke(&mut rng, 2);
        let p = rand_blaschke(&mut rng, 4);
        let z = rand_disc(&mut rng, 0.95);
        let (mv, qv, pv) = (m.eval(z), q.eval(z), p.eval(z));
        if (1.0 - mv * qv).norm() < 1e-2 {
            continue;
        }
        let s = 2.0 * (mv * pv - qv) / (1.0 - mv * qv);
        let lhs = s * s - 4.0 * pv;
        let rhs =
            4.0 * (mv * mv * pv - 1.0) * (pv - qv * qv) / ((1.0 - mv * qv) * (1.0 - mv * qv));
        worst = worst.max((lhs - rhs).norm() / (1.0 + lhs.norm().max(rhs.norm())));
    }
    c.check(worst <= 1e-9, &format!("royal identity defect {worst:.3e}"));

    // boundary symmetry s = s̄p
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let m = rand_blaschke(&mut rng, 1);
        let q = rand_blaschke(&mut rng, 2);
        let p = rand_blaschke(&mut rng, 4);
        let z = rand_unit(&mut rng);
        let (mv, qv, pv) = (m.eval(z), q.eval(z), p.eval(z));
        if (1.0 - mv * qv).norm() < 1e-3 {
            continue;
        }
        let s = 2.0 * (mv * pv - qv) / (1.0 - mv * qv);
        worst = worst.max((s - s.conj() * pv).norm() / (1.0 + s.norm()));
    }
    c.check(worst <= 1e-9, &format!("boundary symmetry defect {worst:.3e}"));

    // scaling identity
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let z = rand_unit(&mut rng);
        let s = rand_disc(&mut rng, 3.0);
        let p = rand_disc(&mut rng, 2.0);
        let r = rng.gen_range(0.05..0.999);
        let v = gamma::scaling_identity_check(z, s, p, r);
        worst = worst.max(v / (1.0 + s.norm_sqr()));
    }
    c.check(worst <= 1e-9, &format!("scaling identity defect {worst:.3e}"));

    // phasar product rule
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let d1 = rng.gen_range(1..=2);
        let d2 = rng.gen_range(1..=2);
        let psi = rand_blaschke(&mut rng, d1);
        let phi = rand_blaschke(&mut rng, d2);
        let z = rand_unit(&mut rng);
        let a1 = phasar_derivative(&psi.as_rational(), z).unwrap();
        let a2 = phasar_derivative(&phi.as_rational(), z).unwrap();
        let ap = phasar_derivative(&psi.product(&phi).as_rational(), z).unwrap();
        worst = worst.max((ap - a1 - a2).abs() / (1.0 + ap.abs()));
    }
    c.check(worst <= 1e-9, &format!("phasar product rule defect {worst:.3e}"));
    c.finish();
}

/// Eigenvalue solvability versus the nested-reduction oracle, 200 of 200.
#[test]
fn criterion_4_np_oracle_equivalence() {
    let mut c = Criterion::new("criterion 4 (scalar solvability oracle)");
    let t = tols();

    fn oracle(nodes: &[Complex64], values: &[Complex64]) -> Solvability {
        const BAND: f64 = 1e-7;
        if values.iter().any(|w| w.norm() > 1.0 + BAND) {
            return Solvability::Unsolvable;
        }
        if let Some(k) = values.iter().position(|w| w.norm() >= 1.0 - BAND) {
            let w = values[k];
            return if values.iter().all(|v| (v - w).norm() <= BAND) {
                Solvability::ExtremallySolvable
            } else {
                Solvability::Unsolvable
            };
        }
        if nodes.len() == 1 {
            return Solvability::Solvable;
        }
        let (l1, w1) = (nodes[0], values[0]);
        let mut rn = Vec::new();
        let mut rv = Vec::new();
        for k in 1..nodes.len() {
            let bl = (nodes[k] - l1) / (1.0 - l1.conj() * nodes[k]);
            let bw = (values[k] - w1) / (1.0 - w1.conj() * values[k]);
            rn.push(nodes[k]);
            rv.push(bw / bl);
        }
        oracle(&rn, &rv)
    }

    let mut rng = ChaCha8Rng::seed_from_u64(4242);
    let mut agree = 0usize;
    let mut worst_res = 0.0f64;
    for case in 0..200 {
        let nodes = loop {
            let n: Vec<Complex64> = (0..3)
                .map(|_| Complex64::from_polar(rng.gen_range(0.0..0.7), rng.gen_range(0.0..6.28)))
                .collect();
            if n.iter()
                .enumerate()
                .all(|(i, a)| n.iter().skip(i + 1).all(|b| (a - b).norm() > 0.2))
            {
                break n;
            }
        };
        let values: Vec<Complex64> = match case % 10 {
            0 | 1 | 2 => {
                let d = rng.gen_range(0..=2);
                let zeros = (0..d)
                    .map(|_| Complex64::from_polar(rng.gen_range(0.0..0.8), rng.gen_range(0.0..6.28)))
                    .collect();
                let b =
                    BlaschkeProduct::new(Complex64::from_polar(1.0, rng.gen_range(0.0..6.28)), zeros)
                        .unwrap();
                nodes.iter().map(|&z| b.eval(z)).collect()
            }
            3 | 4 | 5 => {
                let d = rng.gen_range(1..=3);
                let zeros = (0..d)
                    .map(|_| Complex64::from_polar(rng.gen_range(0.0..0.8), rng.gen_range(0.0..6.28)))
                    .collect();
                let b =
                    BlaschkeProduct::new(Complex64::from_polar(1.0, rng.gen_range(0.0..6.28)), zeros)
                        .unwrap();
                let shrink = rng.gen_range(0.3..0.9);
                nodes.iter().map(|&z| b.eval(z) * shrink).collect()
            }
            6 | 7 => (0..3)
                .map(|_| Complex64::from_polar(rng.gen_range(0.5..0.999), rng.gen_range(0.0..6.28)))
                .collect(),
            _ => (0..3)
                .map(|_| Complex64::from_polar(rng.gen_range(0.0..0.5), rng.gen_range(0.0..6.28)))
                .collect(),
        };
        let data = NPData::new(nodes.clone(), values.clone()).unwrap();
        let got = nevpick::np_solvable(&data, &t);
        if got == oracle(&nodes, &values) {
            agree += 1;
        }
        if got == Solvability::ExtremallySolvable {
            if let Ok(b) = nevpick::np_solve_extremal(&data, &t) {
                let res = nodes
                    .iter()
                    .zip(&values)
                    .map(|(&l, &w)| (b.eval(l) - w).norm())
                    .fold(0.0, f64::max);
                worst_res = worst_res.max(res);
            } else {
                c.check(false, "extremal solve failed on an extremal instance");
            }
        }
    }
    c.check(agree == 200, &format!("oracle agreement {agree}/200"));
    c.check(
        worst_res <= 1e-8,
        &format!("worst extremal residual {worst_res:.3e}"),
    );
    c.finish();
}

/// Necessity of the pencil condition on data from genuine maps into Γ.
#[test]
fn criterion_5_necessity_on_symmetrisations() {
    let mut c = Criterion::new("criterion 5 (pencil necessity on symmetrisations)");
    let t = tols();
    let g = GridConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    for case in 0..50 {
        let mut mk = |rng: &mut ChaCha8Rng| {
            let d = rng.gen_range(1..=2);
            let zeros = (0..d)
                .map(|_| Complex64::from_polar(rng.gen_range(0.0..0.8), rng.gen_range(0.0..6.28)))
                .collect();
            BlaschkeProduct::new(Complex64::from_polar(1.0, rng.gen_range(0.0..6.28)), zeros)
                .unwrap()
        };
        let f = mk(&mut rng);
        let gg = mk(&mut rng);
        let h = families::symmetrize(&f, &gg);
        let nodes = loop {
            let n: Vec<Complex64> = (0..3)
                .map(|_| Complex64::from_polar(rng.gen_range(0.0..0.7), rng.gen_range(0.0..6.28)))
                .collect();
            if n.iter()
                .enumerate()
                .all(|(i, a)| n.iter().skip(i + 1).all(|b| (a - b).norm() > 0.2))
            {
                break n;
            }
        };
        let prob = match InterpProblem::from_map(&h, &nodes, t) {
            Ok(p) => p,
            Err(e) => {
                c.check(false, &format!("case {case}: problem rejected: {e}"));
                continue;
            }
        };
        let rep = cpick::check_c_nu(&prob, 1, &g);
        c.check(
            rep.status != PencilStatus::Fails,
            &format!("case {case}: pencil failed with min eig {:.3e}", rep.min_eigenvalue),
        );
        let mmat = cpick::mgeq0_matrix(&prob);
        let eps = t.eig_threshold(mmat.trace(), mmat.n());
        c.check(
            mmat.min_eigenvalue() >= -eps,
            &format!("case {case}: averaged matrix not PSD"),
        );
    }
    c.finish();
}

/// Structure and solution of the mixed problem for the aligned instance.
#[test]
fn criterion_6_diamond_desk_check() {
    let mut c = Criterion::new("criterion 6 (mixed problem desk check)");
    let t = tols();
    let h = families::ex52_2(0.5);
    let prob = InterpProblem::from_map(&h, &std_nodes(), t).unwrap();
    let m = BlaschkeProduct::mobius(c64(-1.0, 0.0), c64(0.0, 0.0)).unwrap();
    let q = BlaschkeProduct::new(c64(-1.0, 0.0), vec![c64(0.0, 0.0); 2]).unwrap();
    let dp = diamond::make_diamond(&prob, &m, &q).unwrap();
    c.check(dp.boundary_nodes.len() == 3, "τ count");
    for (tau, target) in dp.boundary_nodes.iter().zip(&dp.boundary_targets) {
        c.check(
            (tau.powi(3) - 1.0).norm() <= 1e-9,
            &format!("τ = {tau} does not cube to 1"),
        );
        c.check((tau - target).norm() <= 1e-9, "boundary target should equal τ");
    }
    let feas = diamond::diamond_feasible(&dp, &t);
    c.check(feas.feasible, "mixed problem infeasible");
    c.check(feas.rank <= 4, &format!("rank {} > 4", feas.rank));
    match diamond::diamond_solve(&dp, &t, &GridConfig::default()) {
        Ok(p_hat) => {
            let p_true = |z: Complex64| z * (z.powi(3) + 0.5) / (1.0 + 0.5 * z.powi(3));
            let mut rng = ChaCha8Rng::seed_from_u64(106);
            let worst = (0..20)
                .map(|_| {
                    let z =
                        Complex64::from_polar(rng.gen_range(0.0..0.9), rng.gen_range(0.0..6.28));
                    (p_hat.eval(z) - p_true(z)).norm()
                })
                .fold(0.0, f64::max);
            c.check(
                worst <= 1e-6,
                &format!("p̂ deviates from the closed form by {worst:.3e}"),
            );
        }
        Err(e) => c.check(false, &format!("solve failed: {e}")),
    }
    c.finish();
}

/// Boundary-target routing both ways.
#[test]
fn criterion_7_boundary_routing() {
    let mut c = Criterion::new("criterion 7 (boundary-data routing)");
    let t = tols();
    let nodes = std_nodes();
    let omega = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
    // solvable p-targets sampled from a Schur function
    let p_targets: Vec<Complex64> = nodes.iter().map(|&z| 0.6 * z + 0.2 * z * z).collect();
    let targets: Vec<GammaPoint> = p_targets
        .iter()
        .map(|&p| GammaPoint::new(omega * p + omega.conj(), p))
        .collect();
    match gamma::boundary_interp_solve(&nodes, &targets, &t) {
        Ok(gamma::BoundarySolution::DiscFamily { omega: w, f }) => {
            c.check((w - omega).norm() <= 1e-9, "recovered ω differs");
            let worst = nodes
                .iter()
                .zip(&targets)
                .map(|(&l, tgt)| {
                    let fv = f.eval(l);
                    let s = w * fv + w.conj();
                    (s - tgt.s).norm().max((fv - tgt.p).norm())
                })
                .fold(0.0, f64::max);
            c.check(
                worst <= 1e-8,
                &format!("disc-family interpolation residual {worst:.3e}"),
            );
        }
        other => c.check(false, &format!("expected a disc family, got {other:?}")),
    }
    // unequal points of bΓ are unsolvable
    let z1 = GammaPoint::new(c64(2.0, 0.0), c64(1.0, 0.0));
    let z2 = GammaPoint::new(c64(0.0, 0.0), c64(-1.0, 0.0));
    match gamma::boundary_interp_solve(&nodes, &[z1, z2, z1], &t) {
        Ok(gamma::BoundarySolution::Unsolvable) => {}
        other => c.check(false, &format!("expected unsolvable, got {other:?}")),
    }
    c.finish();
}

/// Data from the injective caddywhompus source never reports solved or a
/// pencil failure: the tool must stay inconclusive with evidence.
#[test]
fn criterion_8_negative_evidence() {
    let mut c = Criterion::new("criterion 8 (caddywhompus negative evidence)");
    let t = tols();
    let g = GridConfig::default();
    let h = families::excaddy3(-1.0 / 3.0f64.sqrt()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(107);
    for trial in 0..10 {
        let nodes = loop {
            let n: Vec<Complex64> = (0..3)
                .map(|_| Complex64::from_polar(rng.gen_range(0.0..0.7), rng.gen_range(0.0..6.28)))
                .collect();
            if n.iter()
                .enumerate()
                .all(|(i, a)| n.iter().skip(i + 1).all(|b| (a - b).norm() > 0.2))
            {
                break n;
            }
        };
        let prob = InterpProblem::from_map(&h, &nodes, t).unwrap();
        let rep = pipeline::solve_3pt(&prob, &SolveOptions::default(), &g);
        c.check(
            rep.status != SolveStatus::Solved && rep.status != SolveStatus::UnsolvableC1,
            &format!("trial {trial}: status {:?}", rep.status),
        );
        c.check(
            rep.diagnostics.pencil_min_eigenvalue.is_some(),
            &format!("trial {trial}: no pencil eigenvalue reported"),
        );
    }
    c.finish();
}
