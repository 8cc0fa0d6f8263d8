//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits with a
//! non-zero status if any criterion fails.

mod common;

use std::f64::consts::{FRAC_1_SQRT_2, LN_2, PI};
use std::time::{Duration, Instant};

use kgap::models::{
    heisenberg_hamiltonian, make_lattice, spin1_chain_hamiltonian, Boundary, HeisenbergParams,
    LatticeKind, LatticeSpec, ModelSpec, Spin1ChainParams,
};
use kgap::random::{random_density, random_hermitian, seeded};
use kgap::separability::{gap_from, ksep_energy, ksep_levels, OptimizerConfig};
use kgap::spectral::eig_hermitian;
use kgap::sweep::{run_sweep, Axis, Criterion, SweepConfig, KT_AXIS};
use kgap::tensor::{CMatrix, CVector, Operator, PureState, SystemShape, C64};
use kgap::thermal::thermal_state;
use kgap::witness::{
    entropy_threshold_ksep, entropy_witness, gme_concurrence_pure, q0, qm, EntropySearch, QOptions,
};
use nalgebra::SymmetricEigen;
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn dimer(h: f64) -> Operator {
    let chain = make_lattice(LatticeKind::Chain, &[2], Boundary::Open).unwrap();
    heisenberg_hamiltonian(
        &chain,
        &HeisenbergParams {
            h,
            ..Default::default()
        },
    )
    .unwrap()
}

fn square(gamma: f64, h: f64) -> Operator {
    let l = make_lattice(LatticeKind::SquareGrid, &[2, 2], Boundary::Open).unwrap();
    heisenberg_hamiltonian(
        &l,
        &HeisenbergParams {
            gamma,
            h,
            ..Default::default()
        },
    )
    .unwrap()
}

fn criterion_1() -> Outcome {
    let h = dimer(0.0);
    // {|00⟩, |11⟩} block [[JΔ, 0], [0, JΔ]], {|01⟩, |10⟩} block [[−JΔ, J], [J, −JΔ]], J = Δ = 1
    let expected = [-2.0, 0.0, 1.0, 1.0];
    let spec = eig_hermitian(&h).unwrap();
    let spectrum_err = spec
        .eigenvalues
        .iter()
        .zip(expected)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let grid = common::bloch_grid_minimum(h.matrix(), 64, 1e-3);
    let e2 = ksep_energy(&h, 2, &OptimizerConfig::default())
        .unwrap()
        .energy;
    let gap = gap_from(spec.ground_energy(), e2);
    let pass = spectrum_err < 1e-10 && (e2 - grid).abs() < 1e-6 && (gap - 1.0).abs() < 1e-6;
    outcome(
        pass,
        format!(
            "spectrum err {spectrum_err:.1e}; E_2sep {e2:.12} vs grid {grid:.12} (|diff| {:.1e}); gap {gap:.12}",
            (e2 - grid).abs()
        ),
    )
}

fn chain_violation(h: &Operator, cfg: &OptimizerConfig) -> f64 {
    let e0 = eig_hermitian(h).unwrap().ground_energy();
    let mut chain = vec![e0];
    chain.extend(ksep_levels(h, cfg).unwrap().iter().map(|r| r.energy));
    chain
        .windows(2)
        .map(|w| w[0] - w[1])
        .fold(f64::NEG_INFINITY, f64::max)
}

fn criterion_2() -> Outcome {
    let cfg = OptimizerConfig::default();
    let shape = SystemShape::qubits(4).unwrap();
    let mut worst = f64::NEG_INFINITY;
    let mut failures = 0;
    for i in 0..50u64 {
        let h = random_hermitian(&shape, &mut seeded(1000 + i));
        let v = chain_violation(&h, &cfg);
        worst = worst.max(v);
        failures += usize::from(v > 1e-8);
    }
    for gamma in [0.0, 1.0] {
        for hf in [0.0, 1.0, 2.0, 4.0] {
            let v = chain_violation(&square(gamma, hf), &cfg);
            worst = worst.max(v);
            failures += usize::from(v > 1e-8);
        }
    }
    outcome(
        failures == 0,
        format!("58 operators, {failures} chain violations; max(E_k − E_k+1) = {worst:.2e}"),
    )
}

fn criterion_3() -> Outcome {
    let c = |gamma: f64, h: f64| {
        let spec = eig_hermitian(&square(gamma, h)).unwrap();
        (
            gme_concurrence_pure(&spec.ground_state()).unwrap().value,
            spec.ground_degeneracy(),
        )
    };
    let mut low = Vec::new();
    for h in [0.0, 1.0] {
        for gamma in [-1.0, 0.0, 1.0] {
            let (v, g) = c(gamma, h);
            low.push((h, gamma, v, g));
        }
    }
    let min_low = low.iter().map(|x| x.2).fold(f64::INFINITY, f64::min);
    let degenerate: Vec<String> = low
        .iter()
        .filter(|x| x.3 > 1)
        .map(|x| format!("(h={}, γ={})", x.0, x.1))
        .collect();
    let series: Vec<f64> = [2.0, 2.5, 3.0, 4.0, 5.0]
        .iter()
        .map(|&h| c(1.0, h).0)
        .collect();
    let worst_step = series
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::NEG_INFINITY, f64::max);
    let total = series[0] - series[series.len() - 1];
    let pass = min_low >= 0.9 && degenerate.is_empty() && worst_step <= 1e-8 && total > 0.05;
    outcome(
        pass,
        format!(
            "min C over {{0,1}}×{{−1,0,1}} = {min_low:.4}{}; γ=1 series {:?}; largest step increase {worst_step:.1e}; total decrease {total:.4}",
            if degenerate.is_empty() { String::new() } else { format!(" (degenerate at {})", degenerate.join(", ")) },
            series.iter().map(|x| (x * 1e4).round() / 1e4).collect::<Vec<_>>()
        ),
    )
}

fn criterion_4() -> Outcome {
    let cfg = OptimizerConfig::default();
    let gap = |h: f64| {
        let ham = spin1_chain_hamiltonian(&Spin1ChainParams {
            n: 3,
            beta: 1.0,
            h,
            boundary: Boundary::Periodic,
        })
        .unwrap();
        let spec = eig_hermitian(&ham).unwrap();
        let e2 = ksep_energy(&ham, 2, &cfg).unwrap().energy;
        (e2 - spec.ground_energy(), spec.ground_degeneracy())
    };
    let mut pass = true;
    let mut parts = Vec::new();
    for h in [0.0, 1.0, 2.0, 2.5] {
        let (g, d) = gap(h);
        pass &= g > 1e-3;
        parts.push(format!(
            "h={h}: {g:.3e} (deg {d}){}",
            if g > 1e-3 { "" } else { " ✗" }
        ));
    }
    for h in [3.5, 4.0] {
        let (g, d) = gap(h);
        pass &= g < 1e-6;
        parts.push(format!(
            "h={h}: {g:.3e} (deg {d}){}",
            if g < 1e-6 { "" } else { " ✗" }
        ));
    }
    outcome(pass, format!("GME gaps {}", parts.join(", ")))
}

fn ghz(n: usize) -> PureState {
    let mut v = CVector::zeros(1 << n);
    v[0] = C64::new(FRAC_1_SQRT_2, 0.0);
    v[(1 << n) - 1] = C64::new(FRAC_1_SQRT_2, 0.0);
    PureState::new(v, SystemShape::qubits(n).unwrap()).unwrap()
}

fn criterion_5() -> Outcome {
    let ghz_q0 = q0(&ghz(4).density()).unwrap();
    let mut rng = seeded(5005);
    let mut worst_sep = f64::NEG_INFINITY;
    for n in [3, 4] {
        for _ in 0..200 {
            let rho = common::random_biseparable(n, &mut rng);
            worst_sep = worst_sep.max(q0(&rho).unwrap());
            for m in 1..=n / 2 {
                worst_sep = worst_sep.max(qm(&rho, m).unwrap());
            }
        }
    }
    let mut worst_path = 0.0f64;
    let shape = SystemShape::qubits(3).unwrap();
    for i in 0..50 {
        let rank = 1 + i % 8;
        let rho = random_density(&shape, rank, &mut rng);
        worst_path =
            worst_path.max((q0(&rho).unwrap() - common::q0_literal(rho.matrix(), 3)).abs());
        worst_path =
            worst_path.max((qm(&rho, 1).unwrap() - common::qm_literal(rho.matrix(), 3, 1)).abs());
    }
    let pass = (ghz_q0 - 0.5).abs() < 1e-12 && worst_sep <= 1e-9 && worst_path < 1e-10;
    outcome(
        pass,
        format!(
            "Q0(GHZ4) = {ghz_q0:.15}; max Q over 400 biseparable states {worst_sep:.2e}; two-path max diff {worst_path:.1e}"
        ),
    )
}

fn criterion_6() -> Outcome {
    let models = [
        ("2x2 γ=1 h=1", square(1.0, 1.0)),
        (
            "spin-1 n=3 h=1",
            spin1_chain_hamiltonian(&Spin1ChainParams {
                n: 3,
                beta: 1.0,
                h: 1.0,
                boundary: Boundary::Periodic,
            })
            .unwrap(),
        ),
    ];
    let grid: Vec<f64> = (0..50)
        .map(|i| 0.01 * 10f64.powf(4.0 * i as f64 / 49.0))
        .collect();
    let (mut trace_err, mut gibbs_err, mut mono, mut limit_err) =
        (0.0f64, 0.0f64, f64::NEG_INFINITY, 0.0f64);
    for (_, h) in &models {
        let spec = eig_hermitian(h).unwrap();
        let e0 = spec.ground_energy();
        let mut prev: Option<(f64, f64)> = None;
        for &kt in &grid {
            let t = thermal_state(&spec, kt).unwrap();
            trace_err = trace_err.max((t.state.matrix().trace() - C64::new(1.0, 0.0)).norm());
            gibbs_err = gibbs_err
                .max((t.partition_function.ln() - (t.entropy - (t.energy - e0) / kt)).abs());
            if let Some((e, s)) = prev {
                mono = mono.max(e - t.energy).max(s - t.entropy);
            }
            prev = Some((t.energy, t.entropy));
        }
        let d = spec.dim();
        let hot = thermal_state(&spec, 1e7).unwrap();
        let mixed = CMatrix::identity(d, d) / C64::new(d as f64, 0.0);
        limit_err = limit_err.max((hot.state.matrix() - mixed).camax());
    }
    let pass = trace_err < 1e-12 && mono <= 0.0 && gibbs_err < 1e-8 && limit_err < 1e-6;
    outcome(
        pass,
        format!(
            "{} models × 50 kT: trace err {trace_err:.1e}; largest decrease of E or S {mono:.1e}; Gibbs err {gibbs_err:.1e}; kT=1e7 vs I/d {limit_err:.1e}",
            models.len()
        ),
    )
}

fn fig2_config() -> SweepConfig {
    SweepConfig {
        model: ModelSpec::Heisenberg {
            lattice: LatticeSpec {
                kind: LatticeKind::SquareGrid,
                dims: vec![2, 2],
                boundary: Boundary::Open,
            },
            j: 1.0,
            gamma: 1.0,
            delta: 1.0,
            h: 0.0,
        },
        axes: vec![
            Axis::new("h", -6.0, 6.0, 25),
            Axis::new(KT_AXIS, 0.01, 3.0, 25),
        ],
        criteria: vec![
            Criterion::Gap(2),
            Criterion::Gap(3),
            Criterion::Gap(4),
            Criterion::Q,
        ],
        optimizer: OptimizerConfig::default(),
        q: QOptions::default(),
        entropy: EntropySearch::default(),
        kt: 0.0,
        allow_zero_temperature: false,
        output: None,
    }
}

fn criterion_7() -> Outcome {
    let cfg = fig2_config();
    let table = run_sweep(&cfg).unwrap();
    let csv_a = table.to_csv_string().unwrap();
    let csv_b = run_sweep(&cfg).unwrap().to_csv_string().unwrap();
    let identical = csv_a == csv_b;

    let n_kt = table.axes[1].values.len();
    let mut gme_columns = 0;
    let mut bad_columns = Vec::new();
    for (i, &h) in table.axes[0].values.iter().enumerate() {
        let column = &table.rows[i * n_kt..(i + 1) * n_kt];
        if column[0].degeneracy != 1 || column[0].concurrence <= 1e-6 {
            continue;
        }
        gme_columns += 1;
        let det: Vec<bool> = column
            .iter()
            .map(|r| r.verdict("gap-k2").unwrap().detected)
            .collect();
        let extent = det.iter().take_while(|&&d| d).count();
        if extent == 0 || det[extent..].iter().any(|&d| d) {
            bad_columns.push(h);
        }
    }
    let detections = table.gap_detections();
    let literal_violations = detections
        .iter()
        .filter(|d| (d[2] && !d[1]) || (d[1] && !d[0]))
        .count();
    let implied_violations = detections
        .iter()
        .filter(|d| (d[0] && !d[1]) || (d[1] && !d[2]))
        .count();
    let a = bad_columns.is_empty() && gme_columns > 0;
    let b = literal_violations == 0;
    outcome(
        a && b && identical,
        format!(
            "(a) {} of {gme_columns} GME columns downward-closed with positive extent{}; \
             (b) detected(k=4)⇒(k=3)⇒(k=2) violated at {literal_violations}/{} points \
             [reverse direction (k=2)⇒(k=3)⇒(k=4) violated at {implied_violations}]; (c) byte-identical: {identical}",
            gme_columns - bad_columns.len(),
            if bad_columns.is_empty() { String::new() } else { format!(" (failing h: {bad_columns:?})") },
            detections.len()
        ),
    )
}

/// −⟨ψ|ln ω|ψ⟩ for a two-qubit ψ; infinite when ψ leaves the support of ω.
fn ground_relative_entropy(psi: &CVector, omega: &CMatrix) -> f64 {
    let eig = SymmetricEigen::new(omega.clone());
    let mut s = 0.0;
    for (i, &lambda) in eig.eigenvalues.iter().enumerate() {
        let w = eig.eigenvectors.column(i).dotc(psi).norm_sqr();
        if w < 1e-14 {
            continue;
        }
        if lambda <= 1e-14 {
            return f64::INFINITY;
        }
        s -= w * lambda.ln();
    }
    s
}

/// Separable two-qubit mixture of `ATOMS` product states; each atom is
/// (θ_a, φ_a, θ_b, φ_b, weight logit).
const ATOMS: usize = 4;

fn mixture(params: &[f64]) -> CMatrix {
    let logits: Vec<f64> = params.chunks(5).map(|c| c[4]).collect();
    let top = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = logits.iter().map(|l| (l - top).exp()).collect();
    let total: f64 = weights.iter().sum();
    let mut omega = CMatrix::zeros(4, 4);
    for (c, w) in params.chunks(5).zip(&weights) {
        let a = common::bloch(c[0], c[1]);
        let b = common::bloch(c[2], c[3]);
        let v = CVector::from_vec(vec![a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]]);
        omega += &v * v.adjoint() * C64::new(w / total, 0.0);
    }
    omega
}

/// Hill-climbing random search over separable mixtures with `samples`
/// objective evaluations in total.
fn random_search_oracle(psi: &CVector, samples: usize, restarts: usize) -> f64 {
    let mut rng = seeded(8008);
    let per_restart = samples / restarts;
    let mut best_overall = f64::INFINITY;
    for _ in 0..restarts {
        let mut x: Vec<f64> = (0..ATOMS)
            .flat_map(|_| {
                [
                    rng.random::<f64>() * PI,
                    rng.random::<f64>() * 2.0 * PI,
                    rng.random::<f64>() * PI,
                    rng.random::<f64>() * 2.0 * PI,
                    0.0,
                ]
            })
            .collect();
        let mut fx = ground_relative_entropy(psi, &mixture(&x));
        for t in 0..per_restart {
            let step = 0.5 * (1.0 - t as f64 / per_restart as f64) + 1e-3;
            let mut y = x.clone();
            let k = rng.random_range(0..y.len());
            y[k] += step * (2.0 * rng.random::<f64>() - 1.0);
            if rng.random::<f64>() < 0.3 {
                let k2 = rng.random_range(0..y.len());
                y[k2] += step * (2.0 * rng.random::<f64>() - 1.0);
            }
            let fy = ground_relative_entropy(psi, &mixture(&y));
            if fy < fx {
                x = y;
                fx = fy;
            }
        }
        best_overall = best_overall.min(fx);
    }
    best_overall
}

fn criterion_8() -> Outcome {
    let h = dimer(0.0);
    let spec = eig_hermitian(&h).unwrap();
    let ground = spec.ground_state();
    let threshold = entropy_threshold_ksep(&ground, 2, &OptimizerConfig::default()).unwrap();
    let singlet = CVector::from_vec(vec![
        C64::new(0.0, 0.0),
        C64::new(FRAC_1_SQRT_2, 0.0),
        C64::new(-FRAC_1_SQRT_2, 0.0),
        C64::new(0.0, 0.0),
    ]);
    let oracle = random_search_oracle(&singlet, 1_000_000, 10);
    let rel = (threshold.value - oracle).abs() / oracle;
    let cold = entropy_witness(
        &thermal_state(&spec, 0.01).unwrap().state,
        &ground,
        2,
        &threshold,
    )
    .unwrap();
    let hot = entropy_witness(
        &thermal_state(&spec, 10.0).unwrap().state,
        &ground,
        2,
        &threshold,
    )
    .unwrap();
    let pass = rel <= 0.05 && cold.detected && !hot.detected;
    outcome(
        pass,
        format!(
            "threshold {:.6} vs random-search oracle {oracle:.6} (rel diff {:.2}%, ln 2 = {LN_2:.6}); kT=0.01 detected: {}; kT=10 detected: {}; caveat: {}",
            threshold.value,
            100.0 * rel,
            cold.detected,
            hot.detected,
            threshold.caveat.as_deref().unwrap_or("none")
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Option<Duration>); 8] = [
        ("dimer oracle", criterion_1, Some(Duration::from_secs(1))),
        (
            "ordering chain",
            criterion_2,
            Some(Duration::from_secs(300)),
        ),
        (
            "2x2 lattice gme-concurrence",
            criterion_3,
            Some(Duration::from_secs(120)),
        ),
        (
            "spin-1 chain GME gap boundary",
            criterion_4,
            Some(Duration::from_secs(300)),
        ),
        (
            "Q criteria soundness and anchors",
            criterion_5,
            Some(Duration::from_secs(600)),
        ),
        ("thermal machinery", criterion_6, None),
        (
            "2x2 lattice thermal sweep properties",
            criterion_7,
            Some(Duration::from_secs(900)),
        ),
        ("entropy criterion", criterion_8, None),
    ];
    let mut failed = 0;
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let in_time = limit.is_none_or(|l| elapsed <= l);
        let pass = result.pass && in_time;
        failed += usize::from(!pass);
        let budget = limit.map_or(String::new(), |l| format!(" / limit {:.0?}", l));
        println!(
            "ACCEPTANCE {} {}: {} [{:.2?}{budget}] {}",
            i + 1,
            name,
            if pass { "PASS" } else { "FAIL" },
            elapsed,
            result.detail
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
