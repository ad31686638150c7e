use std::path::{Path, PathBuf};
use std::process::ExitCode;

use num_traits::Zero;
use serde_json::{json, Value};

use werner_lp::chernoff::{self, classical_chernoff, classical_chernoff_exact, quantum_chernoff};
use werner_lp::dense::{self, DenseSymmetric};
use werner_lp::lp;
use werner_lp::protocol::{self, SimulationConfig};
use werner_lp::rational::{self, ExactScalar};
use werner_lp::symmetric::{self, q_matrix};
use werner_lp::werner::{self, Instance};

use crate::outcome::CommandOutcome;
use crate::InstanceArgs;

/// Any failure that maps to the `error` status.
struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

struct Done {
    results: Value,
    passed: bool,
    summary: String,
}

fn run(command: &str, params: Value, f: impl FnOnce() -> Result<Done, Failure>) -> CommandOutcome {
    match f() {
        Ok(done) => CommandOutcome::new(command, params, done.results, done.passed, done.summary),
        Err(Failure(msg)) => CommandOutcome::error(command, params, msg),
    }
}

fn instance(a: &InstanceArgs) -> Result<Instance, Failure> {
    Ok(Instance::new(a.d, a.n, rational::parse(&a.p)?)?)
}

fn instance_params(a: &InstanceArgs) -> Value {
    json!({"d": a.d, "n": a.n, "p": a.p})
}

fn exact(r: &ExactScalar) -> Value {
    json!({"exact": rational::render(r), "decimal": rational::to_f64(r)})
}

pub fn qmatrix(d: u32, n: u32) -> CommandOutcome {
    run("qmatrix", json!({"d": d, "n": n, "format": "json"}), || {
        let q = q_matrix(d, n)?;
        let ok = q.row_sums_ok();
        let sums: Vec<String> = q.row_sums().iter().map(|v| v.to_string()).collect();
        Ok(Done {
            results: json!({"q": q, "row_sums": sums, "rowSumOk": ok}),
            passed: ok,
            summary: format!("Q for d={d}, n={n}: {0}x{0}, rowSumOk={ok}", q.size()),
        })
    })
}

pub fn qmatrix_csv(d: u32, n: u32) -> ExitCode {
    match q_matrix(d, n) {
        Ok(q) => {
            print!("{}", q.to_csv());
            if !q.to_csv().ends_with('\n') {
                println!();
            }
            let ok = q.row_sums_ok();
            eprintln!("rowSumOk={ok}");
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

pub fn perr(a: &InstanceArgs) -> CommandOutcome {
    run("perr", instance_params(a), || {
        let inst = instance(a)?;
        let perr = werner::perr_closed_form(&inst);
        let protocol = &inst.p * inst.ratio_pow();
        let guess = ExactScalar::from_integer(1.into()) - &inst.p;
        let branch = inst.branch();
        Ok(Done {
            summary: format!("perr = {} ({} branch)", rational::render(&perr), format!("{branch:?}").to_lowercase()),
            results: json!({
                "perr": rational::render(&perr),
                "decimal": rational::to_f64(&perr),
                "branch": branch,
                "protocol_value": exact(&protocol),
                "guess_value": exact(&guess),
            }),
            passed: true,
        })
    })
}

pub fn certify(a: &InstanceArgs, corrupt: bool) -> CommandOutcome {
    let mut params = instance_params(a);
    if corrupt {
        params["corrupt_certificate"] = json!(true);
    }
    run("certify", params, || {
        let inst = instance(a)?;
        let form = lp::build_primal(&inst);
        let x = lp::locc_primal_point(&inst);
        let mut cert = lp::dual_certificate(&inst);
        if corrupt {
            *cert.u.last_mut().expect("n >= 1") = ExactScalar::zero();
        }
        let primal = lp::verify_primal_feasibility(x.as_slice(), &form)?;
        let dual = lp::verify_dual_feasibility(&cert, &form)?;
        let primal_obj = form.objective(x.as_slice());
        let dual_obj = lp::dual_value(&cert, &form)?;
        let gap = &primal_obj - &dual_obj;
        let closed = werner::perr_closed_form(&inst);
        let perr_primal = form.error_from_objective(&primal_obj);
        let perr_dual = form.error_from_objective(&dual_obj);
        let passed = primal.feasible && dual.feasible && gap.is_zero() && perr_primal == closed;

        let violated: Vec<_> = dual.violated.iter().map(|&k| &dual.constraints[k]).collect();
        let summary = if passed {
            format!("certified: perr = {}, gap 0/1", rational::render(&closed))
        } else {
            format!(
                "certificate check failed: primal feasible {}, dual feasible {}, violated dual constraints {:?}, gap {}",
                primal.feasible,
                dual.feasible,
                dual.violated,
                rational::render(&gap)
            )
        };
        Ok(Done {
            results: json!({
                "primal_point": x,
                "certificate": cert,
                "primal_feasible": primal.feasible,
                "primal_violated": primal.violated,
                "primal_negative": primal.negative,
                "dual_feasible": dual.feasible,
                "dual_violated": violated,
                "dual_negative": dual.negative,
                "qt_u": dual.qt_u.iter().map(rational::render).collect::<Vec<_>>(),
                "qt_u_identity": dual.qt_u_identity,
                "primal_objective": rational::render(&primal_obj),
                "dual_objective": rational::render(&dual_obj),
                "gap": rational::render(&gap),
                "perr_primal": rational::render(&perr_primal),
                "perr_dual": rational::render(&perr_dual),
                "perr_closed_form": rational::render(&closed),
                "branch": inst.branch(),
            }),
            passed,
            summary,
        })
    })
}

pub fn lp_solve(a: &InstanceArgs) -> CommandOutcome {
    run("lp-solve", instance_params(a), || {
        let inst = instance(a)?;
        let form = lp::build_primal(&inst);
        let sol = lp::simplex_solve(&form)?;
        let closed = werner::perr_closed_form(&inst);
        let passed = sol.error_probability == closed;
        let bias = ExactScalar::from_integer(1.into()) - ExactScalar::from_integer(2.into()) * &sol.error_probability;
        Ok(Done {
            summary: format!(
                "simplex perr = {} after {} pivots; closed form {}",
                rational::render(&sol.error_probability),
                sol.iterations,
                if passed { "agrees" } else { "DISAGREES" }
            ),
            results: json!({
                "solution": sol,
                "bias": rational::render(&bias),
                "closed_form": rational::render(&closed),
                "matches_closed_form": passed,
            }),
            passed,
        })
    })
}

enum Dist {
    Exact(Vec<ExactScalar>),
    Float(Vec<f64>),
}

fn read_dist(path: &Path) -> Result<Dist, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    let v: Vec<Value> = serde_json::from_str(&text).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    if v.iter().all(Value::is_string) {
        let r = v
            .iter()
            .map(|x| rational::parse(x.as_str().unwrap_or_default()))
            .collect::<Result<_, _>>()?;
        return Ok(Dist::Exact(r));
    }
    let f = v
        .iter()
        .map(|x| match x {
            Value::Number(n) => n.as_f64().ok_or_else(|| Failure(format!("bad number {n}"))),
            Value::String(s) => Ok(rational::to_f64(&rational::parse(s)?)),
            other => Err(Failure(format!("bad entry {other}"))),
        })
        .collect::<Result<_, _>>()?;
    Ok(Dist::Float(f))
}

fn as_float(d: Dist) -> Vec<f64> {
    match d {
        Dist::Exact(v) => v.iter().map(rational::to_f64).collect(),
        Dist::Float(v) => v,
    }
}

pub fn chernoff(d: Option<u32>, files: &[PathBuf], rates: Option<u32>, p: &str) -> CommandOutcome {
    let params = json!({
        "d": d,
        "dist_file": files.iter().map(|f| f.display().to_string()).collect::<Vec<_>>(),
        "rates": rates,
        "p": p,
    });
    run("chernoff", params, || {
        if let Some(d) = d {
            let w = chernoff::ci_locc_werner(d)?;
            let mut results = json!({
                "bits": w.bits,
                "nats": w.nats,
                "exact_ratio": rational::render(&w.exact_ratio),
                "single_copy": w.single_copy,
            });
            if (d as usize) * (d as usize) <= dense::DENSE_CAP {
                let q = quantum_chernoff(&dense::sigma_state(d as usize)?, &dense::alpha_state(d as usize)?)?;
                results["unrestricted"] = serde_json::to_value(q)?;
            }
            let mut passed = true;
            if let Some(n_max) = rates {
                let seq = chernoff::rate_convergence_check(d, n_max, &rational::parse(p)?)?;
                passed = seq.monotone;
                results["rates"] = serde_json::to_value(&seq)?;
            }
            return Ok(Done {
                summary: format!("C_LOCC = C_PPT = log2({}) = {:.6} bits", rational::render(&w.exact_ratio), w.bits),
                results,
                passed,
            });
        }
        if files.len() != 2 {
            return Err(Failure("give either --d or exactly two --dist-file arguments".into()));
        }
        let a = read_dist(&files[0])?;
        let b = read_dist(&files[1])?;
        let r = match (a, b) {
            (Dist::Exact(x), Dist::Exact(y)) => classical_chernoff_exact(&x, &y)?,
            (a, b) => classical_chernoff(&as_float(a), &as_float(b))?,
        };
        Ok(Done {
            summary: if r.is_infinite() {
                "disjoint supports: Chernoff distance is infinite".to_string()
            } else {
                format!("Chernoff distance {:.9} bits", r.value_bits)
            },
            results: serde_json::to_value(r)?,
            passed: true,
        })
    })
}

pub fn simulate(a: &InstanceArgs, trials: u64, seed: u64, chunk_size: u64) -> CommandOutcome {
    let mut params = instance_params(a);
    params["trials"] = json!(trials);
    params["seed"] = json!(seed);
    params["chunk_size"] = json!(chunk_size);
    run("simulate", params, || {
        let inst = instance(a)?;
        let mut cfg = SimulationConfig::new(inst, trials, seed);
        cfg.chunk_size = chunk_size;
        let r = protocol::run_protocol(&cfg)?;
        let one_sided = !r.branch.measures() || r.errors_antisymmetric == 0;
        let passed = r.z_score.abs() <= 4.0 && one_sided;
        Ok(Done {
            summary: format!(
                "{} errors in {} trials: {:.6} vs closed form {:.6} (z = {:.3})",
                r.errors, r.trials, r.empirical_error, r.closed_form_value, r.z_score
            ),
            results: serde_json::to_value(&r)?,
            passed,
        })
    })
}

const SLACK: f64 = 1e-9;

fn bias_record(r1: &DenseSymmetric, r2: &DenseSymmetric, p: f64) -> Result<(Value, bool), Failure> {
    let ball = dense::separable_ball_povm(r1, r2, p)?;
    let h = dense::helstrom(r1, r2, p)?;
    let bound = ball.bias_all / (2.0 * (r1.dim() as f64).sqrt());
    let bias_ok = ball.bias >= bound - SLACK;
    let helstrom_ok = ball.error >= h - SLACK;
    Ok((
        json!({
            "error": ball.error,
            "bias": ball.bias,
            "bias_all": ball.bias_all,
            "bound": bound,
            "helstrom_error": h,
            "m_norm": ball.m_norm,
            "rank": ball.rank,
            "degenerate": ball.degenerate,
            "bias_ok": bias_ok,
            "helstrom_ok": helstrom_ok,
        }),
        bias_ok && helstrom_ok,
    ))
}

fn parse_prior(p: &str) -> Result<f64, Failure> {
    let v = rational::to_f64(&rational::parse(p)?);
    if !(v > 0.0 && v < 1.0) {
        return Err(Failure(format!("prior {p} must lie strictly between 0 and 1")));
    }
    Ok(v)
}

pub fn bias_bound_files(files: &[PathBuf], p: &str) -> CommandOutcome {
    let params = json!({
        "state_file": files.iter().map(|f| f.display().to_string()).collect::<Vec<_>>(),
        "p": p,
    });
    run("bias-bound", params, || {
        if files.len() != 2 {
            return Err(Failure("give exactly two --state-file arguments, or --random".into()));
        }
        let load = |f: &PathBuf| -> Result<DenseSymmetric, Failure> {
            let text = std::fs::read_to_string(f).map_err(|e| Failure(format!("{}: {e}", f.display())))?;
            Ok(dense::load_state_json(&text)?.0)
        };
        let r1 = load(&files[0])?;
        let r2 = load(&files[1])?;
        let (rec, passed) = bias_record(&r1, &r2, parse_prior(p)?)?;
        Ok(Done {
            summary: format!(
                "bias {:.6} vs bound {:.6}: {}",
                rec["bias"].as_f64().unwrap_or(f64::NAN),
                rec["bound"].as_f64().unwrap_or(f64::NAN),
                if passed { "holds" } else { "VIOLATED" }
            ),
            results: rec,
            passed,
        })
    })
}

pub fn bias_bound_random(dim: usize, samples: u64, seed: u64, p: &str) -> CommandOutcome {
    let params = json!({"random": true, "dim": dim, "samples": samples, "seed": seed, "p": p});
    run("bias-bound", params, || {
        if dim == 0 || dim > dense::DENSE_CAP {
            return Err(Failure(format!("--dim must be between 1 and {}", dense::DENSE_CAP)));
        }
        let prior = parse_prior(p)?;
        let mut records = Vec::with_capacity(samples as usize);
        let mut holds = 0u64;
        let mut min_slack = f64::INFINITY;
        for i in 0..samples {
            let (r1, r2) = dense::random_state_pair(dim, seed, i)?;
            let (rec, ok) = bias_record(&r1, &r2, prior)?;
            holds += ok as u64;
            let slack = rec["bias"].as_f64().unwrap_or(f64::NAN) - rec["bound"].as_f64().unwrap_or(f64::NAN);
            min_slack = min_slack.min(slack);
            records.push(rec);
        }
        let passed = holds == samples;
        Ok(Done {
            summary: format!(
                "{holds}/{samples} samples satisfy bias >= bias_all/(2*sqrt({dim})) and error >= Helstrom"
            ),
            results: json!({
                "samples": samples,
                "satisfied": holds,
                "min_bias_slack": min_slack,
                "records": records,
            }),
            passed,
        })
    })
}

fn check(name: &str, passed: bool, value: f64, tolerance: f64) -> Value {
    json!({"check": name, "passed": passed, "value": value, "tolerance": tolerance})
}

/// Largest dimension for which the effect-validating error checks run.
const POVM_CHECK_MAX_DIM: usize = 256;

pub fn oracle_verify(d: u32, n: u32) -> CommandOutcome {
    run("oracle-verify", json!({"d": d, "n": n}), || {
        let (du, nu) = (d as usize, n as usize);
        let e = dense::pt_expansion(du, nu)?;
        let mut checks = Vec::new();

        let mut coeff_err: f64 = 0.0;
        let mut trace_err: f64 = 0.0;
        for k in 0..=nu {
            let exact = symmetric::ak_pt_coefficients(d, n, k)?;
            for (c, x) in e.coeffs[k].iter().zip(&exact) {
                coeff_err = coeff_err.max((c - rational::to_f64(x)).abs());
            }
            let tr = symmetric::ak_trace(d, n, k)?;
            let tr = rational::to_f64(&ExactScalar::from_integer(tr));
            trace_err = trace_err.max((e.ak_traces[k] - tr).abs() / tr.max(1.0));
        }
        let residual = e.residuals.iter().cloned().fold(0.0, f64::max);
        checks.push(check("ak_pt_matches_q", coeff_err <= 1e-9, coeff_err, 1e-9));
        checks.push(check("ak_pt_in_tl_span", residual <= 1e-9, residual, 1e-9));
        checks.push(check("ak_resolve_identity", e.resolution_error <= 1e-12, e.resolution_error, 1e-12));
        checks.push(check("ak_traces", trace_err <= 1e-12, trace_err, 1e-12));
        checks.push(check("tl_orthogonal", e.tl_overlap <= 1e-9, e.tl_overlap, 1e-9));
        let rows_ok = q_matrix(d, n)?.row_sums_ok();
        checks.push(check("q_row_sums", rows_ok, if rows_ok { 0.0 } else { 1.0 }, 0.0));

        let proj = dense::build_projectors(du)?;
        let flip_pt = dense::partial_transpose(&proj.flip, &dense::SubsystemShape::copies(du, 1), &[1])?;
        let flip_err = flip_pt.max_abs_diff(&proj.phi.scaled(d as f64))?;
        checks.push(check("flip_pt_is_d_phi", flip_err <= 1e-12, flip_err, 1e-12));

        let dim = (du * du).pow(n);
        if dim <= POVM_CHECK_MAX_DIM {
            let s = dense::tensor_power(&dense::sigma_state(du)?, nu)?;
            let a = dense::tensor_power(&dense::alpha_state(du)?, nu)?;
            let g = dense::tensor_power(&dense::computational_g(du)?, nu)?;
            let m = dense::tensor_power(&dense::twirled_m(du)?, nu)?;
            let eg = dense::povm_error(&s, &a, 0.5, &g)?;
            let em = dense::povm_error(&s, &a, 0.5, &m)?;
            let inst = Instance::new(d, n, rational::ratio(1, 2))?;
            let closed = rational::to_f64(&werner::perr_closed_form(&inst));
            checks.push(check("twirl_equivalence", (eg - em).abs() <= 1e-12, (eg - em).abs(), 1e-12));
            checks.push(check("protocol_error", (em - closed).abs() <= 1e-12, (em - closed).abs(), 1e-12));
        } else {
            checks.push(json!({"check": "twirl_equivalence", "skipped": format!("dimension {dim} > {POVM_CHECK_MAX_DIM}")}));
        }

        let failed: Vec<String> = checks
            .iter()
            .filter(|c| c["passed"] == json!(false))
            .map(|c| c["check"].as_str().unwrap_or_default().to_string())
            .collect();
        let passed = failed.is_empty();
        Ok(Done {
            summary: if passed {
                format!("dense oracle agrees with the exact algebra for d={d}, n={n}")
            } else {
                format!("dense oracle checks failed: {}", failed.join(", "))
            },
            results: json!({
                "dimension": dim,
                "checks": checks,
                "coefficients": e.coeffs,
            }),
            passed,
        })
    })
}
