//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness; exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_traits::{Signed, Zero};
use werner_lp::chernoff::{self, classical_chernoff, quantum_chernoff};
use werner_lp::dense::{self, povm_error, tensor_power};
use werner_lp::lp;
use werner_lp::protocol::{run_protocol, SimulationConfig};
use werner_lp::rational::{self, int, ratio, ExactScalar};
use werner_lp::symmetric::{ak_pt_coefficients, q_matrix};
use werner_lp::werner::{self, Branch, Instance};

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        passed,
        detail: detail.into(),
    }
}

fn within(limit: Duration, elapsed: Duration) -> bool {
    elapsed <= limit
}

fn priors() -> Vec<ExactScalar> {
    vec![ratio(1, 10), ratio(1, 3), ratio(1, 2), ratio(2, 3), ratio(9, 10)]
}

fn exact_optimality() -> Verdict {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut count = 0;
    for d in 2..=6 {
        for n in 1..=20 {
            for p in priors() {
                count += 1;
                let inst = Instance::new(d, n, p.clone()).unwrap();
                let closed = werner::perr_closed_form(&inst);
                let form = lp::build_primal(&inst);
                let simplex = lp::simplex_solve(&form).map(|s| s.error_probability);
                let x = lp::locc_primal_point(&inst);
                let primal = form.error_from_objective(&form.objective(x.as_slice()));
                let cert = lp::dual_certificate(&inst);
                let dual = lp::dual_value(&cert, &form).map(|v| form.error_from_objective(&v));
                let gap = lp::optimality_gap(&x, &cert, &form);
                let ok = simplex.as_ref() == Ok(&closed)
                    && primal == closed
                    && dual.as_ref() == Ok(&closed)
                    && gap.as_ref().is_ok_and(|g| g.is_zero());
                if !ok {
                    failures.push(format!("(d={d}, n={n}, p={})", rational::render(&p)));
                }
            }
        }
    }
    let t = start.elapsed();
    verdict(
        failures.is_empty() && within(Duration::from_secs(60), t),
        format!("{count} instances, {} mismatches {:?}, {:.1}s (limit 60s)", failures.len(), failures, t.as_secs_f64()),
    )
}

fn appendix_identities() -> Verdict {
    let start = Instant::now();
    let mut bad = Vec::new();
    let mut negative_u = Vec::new();
    let mut count = 0;
    for d in 2..=10u32 {
        for n in 1..=50u32 {
            let r_n = rational::pow(&ratio(d as i64 - 1, d as i64 + 1), n);
            for s in lp::appendix_sums_all(d, n).unwrap() {
                count += 1;
                let e1 = if s.k == 0 { int(1) } else { int(0) };
                let e2 = if s.k == n as usize { r_n.clone() } else { int(0) };
                if s.s1_termwise != e1 || s.s2_termwise != e2 {
                    bad.push((d, n, s.k));
                }
            }
            if lp::certificate_u(d, n).iter().any(|u| u.is_negative()) {
                negative_u.push((d, n));
            }
        }
    }
    let t = start.elapsed();
    verdict(
        bad.is_empty() && negative_u.is_empty() && within(Duration::from_secs(30), t),
        format!(
            "{count} (d,n,k) triples, {} sum mismatches, {} grids with negative u*, {:.1}s (limit 30s)",
            bad.len(),
            negative_u.len(),
            t.as_secs_f64()
        ),
    )
}

fn q_ground_truth() -> Verdict {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut worst_residual: f64 = 0.0;
    let mut cases = 0;
    let mut rows_ok = true;
    for n in 1..=6usize {
        for d in 2..=64usize {
            if (d * d).checked_pow(n as u32).is_none_or(|v| v > dense::DENSE_CAP) {
                continue;
            }
            cases += 1;
            let e = dense::pt_expansion(d, n).unwrap();
            for k in 0..=n {
                let exact = ak_pt_coefficients(d as u32, n as u32, k).unwrap();
                for (c, x) in e.coeffs[k].iter().zip(&exact) {
                    worst = worst.max((c - rational::to_f64(x)).abs());
                }
            }
            worst_residual = worst_residual.max(e.residuals.iter().cloned().fold(0.0, f64::max));
            rows_ok &= q_matrix(d as u32, n as u32).unwrap().row_sums_ok();
        }
    }
    let t = start.elapsed();
    verdict(
        worst <= 1e-9 && worst_residual <= 1e-9 && rows_ok && within(Duration::from_secs(120), t),
        format!(
            "{cases} (d,n) pairs, max coefficient error {worst:.2e}, max residual {worst_residual:.2e} (tol 1e-9), row sums exact: {rows_ok}, {:.1}s (limit 120s)",
            t.as_secs_f64()
        ),
    )
}

fn chernoff_value() -> Verdict {
    let mut worst: f64 = 0.0;
    let mut all_infinite = true;
    for d in 2..=10u32 {
        let dist = werner::outcome_distributions(d).unwrap();
        let c = classical_chernoff(&dist.symmetric_f64(), &dist.antisymmetric_f64()).unwrap();
        let closed = ((d as f64 + 1.0) / (d as f64 - 1.0)).log2();
        worst = worst.max((c.value_bits - closed).abs());
        let q = quantum_chernoff(
            &dense::sigma_state(d as usize).unwrap(),
            &dense::alpha_state(d as usize).unwrap(),
        )
        .unwrap();
        all_infinite &= q.is_infinite();
    }
    let d2 = chernoff::ci_locc_werner(2).unwrap().bits;
    let d2_ok = (d2 - 1.584_962_5).abs() < 1e-7;
    verdict(
        worst <= 1e-10 && d2_ok && all_infinite,
        format!("max |C - log2((d+1)/(d-1))| = {worst:.2e} (tol 1e-10), d=2 gives {d2:.7}, unrestricted distance infinite for all d: {all_infinite}"),
    )
}

fn protocol_simulation() -> Verdict {
    let start = Instant::now();
    let inst = Instance::new(2, 3, ratio(1, 2)).unwrap();
    let r = run_protocol(&SimulationConfig::new(inst, 1_000_000, 42)).unwrap();
    let main_ok = r.z_score.abs() <= 4.0 && r.errors_antisymmetric == 0;

    let mut matrix_z: f64 = 0.0;
    let mut anti_errors = 0;
    for (i, (d, n, p)) in [2u32, 3]
        .iter()
        .flat_map(|&d| [1u32, 3, 5].into_iter().flat_map(move |n| [ratio(1, 3), ratio(1, 2)].map(|p| (d, n, p))))
        .enumerate()
    {
        let inst = Instance::new(d, n, p).unwrap();
        let r = run_protocol(&SimulationConfig::new(inst, 1_000_000, 1000 + i as u64)).unwrap();
        matrix_z = matrix_z.max(r.z_score.abs());
        if r.branch.measures() {
            anti_errors += r.errors_antisymmetric;
        }
    }
    let t = start.elapsed();
    verdict(
        main_ok && matrix_z <= 4.0 && anti_errors == 0 && within(Duration::from_secs(30), t),
        format!(
            "d=2 n=3 p=1/2: empirical {:.6} vs 1/54, z = {:.3}; 12-run matrix max |z| = {matrix_z:.3}; antisymmetric errors {}; {:.1}s (limit 30s)",
            r.empirical_error,
            r.z_score,
            r.errors_antisymmetric + anti_errors,
            t.as_secs_f64()
        ),
    )
}

fn bias_chain() -> Verdict {
    let mut runs = 0;
    let mut min_bias_slack = f64::INFINITY;
    let mut min_helstrom_slack = f64::INFINITY;
    for (di, dim) in [4usize, 9, 16].into_iter().enumerate() {
        for p in [0.25, 0.5] {
            for i in 0..200 {
                let (r1, r2) = dense::random_state_pair(dim, 0xB1A5 + di as u64, i).unwrap();
                let ball = dense::separable_ball_povm(&r1, &r2, p).unwrap();
                let h = dense::helstrom(&r1, &r2, p).unwrap();
                min_bias_slack = min_bias_slack.min(ball.bias - ball.bias_all / (2.0 * (dim as f64).sqrt()));
                min_helstrom_slack = min_helstrom_slack.min(ball.error - h);
                runs += 1;
            }
        }
    }
    verdict(
        min_bias_slack >= -1e-9 && min_helstrom_slack >= -1e-9,
        format!("{runs} pairs, min bias slack {min_bias_slack:.3e}, min error-vs-Helstrom slack {min_helstrom_slack:.3e} (tol -1e-9)"),
    )
}

fn data_hiding_ratio() -> Verdict {
    let mut bad = Vec::new();
    for d in 2..=6u32 {
        let inst = Instance::new(d, 1, ratio(1, 2)).unwrap();
        let sol = lp::simplex_solve(&lp::build_primal(&inst)).unwrap();
        let bias = int(1) - int(2) * &sol.error_probability;
        if bias != ratio(2, d as i64 + 1) {
            bad.push((d, rational::render(&bias)));
        }
    }
    verdict(bad.is_empty(), format!("LP bias = 2/(d+1) exactly for d=2..6; mismatches {bad:?}"))
}

fn twirl_equivalence() -> Verdict {
    let mut worst: f64 = 0.0;
    for d in [2usize, 3] {
        for n in [1usize, 2] {
            let s = tensor_power(&dense::sigma_state(d).unwrap(), n).unwrap();
            let a = tensor_power(&dense::alpha_state(d).unwrap(), n).unwrap();
            let g = tensor_power(&dense::computational_g(d).unwrap(), n).unwrap();
            let m = tensor_power(&dense::twirled_m(d).unwrap(), n).unwrap();
            for p in [0.1, 0.5, 0.9] {
                let eg = povm_error(&s, &a, p, &g).unwrap();
                let em = povm_error(&s, &a, p, &m).unwrap();
                worst = worst.max((eg - em).abs());
            }
        }
    }
    verdict(worst <= 1e-12, format!("max |err(G^n) - err(M^n)| = {worst:.2e} (tol 1e-12)"))
}

fn rate_convergence() -> Verdict {
    let start = Instant::now();
    let mut details = Vec::new();
    let mut ok = true;
    for d in [2u32, 3, 6, 10] {
        for p in [ratio(1, 10), ratio(1, 2), ratio(9, 10)] {
            let seq = chernoff::rate_convergence_check(d, 10_000, &p).unwrap();
            let good = seq.monotone && seq.final_gap <= 1e-3;
            ok &= good;
            if !good {
                details.push(format!("d={d} p={}: gap {:.2e}", rational::render(&p), seq.final_gap));
            }
            ok &= seq.points.last().is_some_and(|pt| pt.branch == Branch::Protocol);
        }
    }
    verdict(
        ok,
        format!(
            "rates monotone and within 1e-3 of log2((d+1)/(d-1)) at n=10^4 for 12 (d,p) pairs; failures {details:?}; {:.1}s",
            start.elapsed().as_secs_f64()
        ),
    )
}

type Criterion = (&'static str, fn() -> Verdict);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("1 exact optimality", exact_optimality),
        ("2 symmetric-basis identities", appendix_identities),
        ("3 Q-matrix ground truth", q_ground_truth),
        ("4 Chernoff value", chernoff_value),
        ("5 protocol simulation", protocol_simulation),
        ("6 bias chain", bias_chain),
        ("7 data-hiding norm ratio", data_hiding_ratio),
        ("8 twirl equivalence", twirl_equivalence),
        ("rate convergence", rate_convergence),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let v = f();
        println!("{} [{name}] {}", if v.passed { "PASS" } else { "FAIL" }, v.detail);
        failed += (!v.passed) as usize;
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
