use num_traits::Zero;
use proptest::prelude::*;

use werner_lp::chernoff::{classical_chernoff, rate_convergence_check};
use werner_lp::dense::{self, partial_transpose, povm_error, tensor_power, DenseSymmetric, SubsystemShape};
use werner_lp::lp;
use werner_lp::rational::{self, ratio, ExactScalar};
use werner_lp::symmetric::{ppt_feasible, q_matrix, SymmetricPovmVector};
use werner_lp::werner::{self, Instance, WernerRole};

fn prior() -> impl Strategy<Value = ExactScalar> {
    (1i64..100, 1i64..100).prop_map(|(a, b)| ratio(a.min(b), a.max(b) + 1))
}

#[test]
fn dense_error_matches_exact_for_protocol_vector() {
    // Σ_k x_k A_k built densely, evaluated on σ^⊗n and α^⊗n.
    for (d, n) in [(2usize, 1usize), (2, 2), (3, 2)] {
        let inst = Instance::new(d as u32, n as u32, ratio(2, 5)).unwrap();
        let x = lp::locc_primal_point(&inst);
        let dim = (d * d).pow(n as u32);
        let mut e1 = DenseSymmetric::zeros(dim);
        for (k, xk) in x.as_slice().iter().enumerate() {
            e1.add_scaled(rational::to_f64(xk), &dense::build_ak(d, n, k).unwrap()).unwrap();
        }
        let s = tensor_power(&dense::sigma_state(d).unwrap(), n).unwrap();
        let a = tensor_power(&dense::alpha_state(d).unwrap(), n).unwrap();
        let dense_err = povm_error(&s, &a, 0.4, &e1).unwrap();
        let exact = werner::povm_error_symmetric(x.as_slice(), &inst).unwrap();
        assert!((dense_err - rational::to_f64(&exact)).abs() < 1e-12, "d={d} n={n}");
    }
}

#[test]
fn ppt_feasibility_agrees_with_dense_partial_transpose() {
    let (d, n) = (2usize, 2usize);
    let q = q_matrix(d as u32, n as u32).unwrap();
    let shape = SubsystemShape::copies(d, n);
    let aks: Vec<DenseSymmetric> = (0..=n).map(|k| dense::build_ak(d, n, k).unwrap()).collect();
    let candidates = [
        vec![ratio(1, 9), ratio(1, 3), ratio(1, 1)],
        vec![ratio(1, 1), ratio(0, 1), ratio(0, 1)],
        vec![ratio(0, 1), ratio(1, 2), ratio(1, 1)],
        vec![ratio(1, 2), ratio(1, 2), ratio(1, 2)],
    ];
    for x in candidates {
        let v = SymmetricPovmVector::new(x).unwrap();
        let exact = ppt_feasible(&v, &q).unwrap().feasible;
        let mut dense_ok = true;
        for family in [v.clone(), v.complement()] {
            let mut e = DenseSymmetric::zeros(16);
            for (xk, ak) in family.as_slice().iter().zip(&aks) {
                e.add_scaled(rational::to_f64(xk), ak).unwrap();
            }
            let eg = partial_transpose(&e, &shape, &shape.second_parties()).unwrap();
            dense_ok &= dense::eigh(&eg).unwrap().values[0] >= -1e-12;
        }
        assert_eq!(exact, dense_ok, "{:?}", v.as_slice());
    }
}

#[test]
fn outcome_distributions_match_born_rule() {
    for d in 2..=4usize {
        let g = dense::computational_g(d).unwrap();
        let dist = werner::outcome_distributions(d as u32).unwrap();
        let sigma = dense::sigma_state(d).unwrap();
        let alpha = dense::alpha_state(d).unwrap();
        assert!((g.inner(&sigma).unwrap() - dist.symmetric_f64()[0]).abs() < 1e-12);
        assert!((g.inner(&alpha).unwrap() - dist.antisymmetric_f64()[0]).abs() < 1e-12);
        let c = classical_chernoff(&dist.symmetric_f64(), &dist.antisymmetric_f64()).unwrap();
        assert!((c.value_bits - ((d as f64 + 1.0) / (d as f64 - 1.0)).log2()).abs() < 1e-10);
    }
}

#[test]
fn norm_ratio_from_dense_and_lp() {
    // Unrestricted bias of ½(α − σ) is 1; the LP bias is 2/(d+1).
    for d in 2..=6usize {
        let s = dense::sigma_state(d).unwrap();
        let a = dense::alpha_state(d).unwrap();
        let all = 1.0 - 2.0 * dense::helstrom(&s, &a, 0.5).unwrap();
        assert!((all - 1.0).abs() < 1e-12);
        let inst = Instance::new(d as u32, 1, ratio(1, 2)).unwrap();
        let sol = lp::simplex_solve(&lp::build_primal(&inst)).unwrap();
        let bias = rational::int(1) - rational::int(2) * sol.error_probability;
        assert_eq!(bias, ratio(2, d as i64 + 1));
    }
}

#[test]
fn sampled_symmetric_frequencies_match_born_rule() {
    use werner_lp::protocol::{chunk_rng, sample_outcome_pair};
    let d = 3usize;
    let sigma = dense::sigma_state(d).unwrap();
    let mut rng = chunk_rng(2024, 0);
    let trials = 300_000;
    let mut counts = vec![0u32; d * d];
    for _ in 0..trials {
        let (i, j) = sample_outcome_pair(WernerRole::Symmetric, d as u32, &mut rng);
        counts[i as usize * d + j as usize] += 1;
    }
    for (idx, c) in counts.iter().enumerate() {
        let born = sigma.get(idx, idx);
        let sd = (born * (1.0 - born) / trials as f64).sqrt();
        assert!((*c as f64 / trials as f64 - born).abs() < 5.0 * sd);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn certificate_closes_gap(d in 2u32..9, n in 1u32..16, p in prior()) {
        let inst = Instance::new(d, n, p).unwrap();
        let form = lp::build_primal(&inst);
        let x = lp::locc_primal_point(&inst);
        let cert = lp::dual_certificate(&inst);
        prop_assert!(lp::optimality_gap(&x, &cert, &form).unwrap().is_zero());
        let dual = lp::dual_value(&cert, &form).unwrap();
        prop_assert_eq!(form.error_from_objective(&dual), werner::perr_closed_form(&inst));
    }

    #[test]
    fn simplex_agrees_with_closed_form(d in 2u32..7, n in 1u32..9, p in prior()) {
        let inst = Instance::new(d, n, p).unwrap();
        let sol = lp::simplex_solve(&lp::build_primal(&inst)).unwrap();
        prop_assert_eq!(sol.error_probability, werner::perr_closed_form(&inst));
    }

    #[test]
    fn rates_decrease_on_protocol_branch(d in 2u32..12, p in prior()) {
        let seq = rate_convergence_check(d, 200, &p).unwrap();
        prop_assert!(seq.monotone);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn partial_transpose_involution_2x2x2(seed in any::<u64>(), w in -3.0f64..3.0) {
        let shape = SubsystemShape::copies(2, 2);
        let x = dense::random_state(16, 16, seed).unwrap()
            .combine(w, &dense::random_state(16, 3, seed ^ 0xFF).unwrap(), 1.0).unwrap();
        let back = partial_transpose(&partial_transpose(&x, &shape, &[1, 3]).unwrap(), &shape, &[1, 3]).unwrap();
        prop_assert_eq!(back, x);
    }

    #[test]
    fn partial_transpose_involution_3x3(seed in any::<u64>(), w in -3.0f64..3.0) {
        let shape = SubsystemShape::copies(3, 1);
        let x = dense::random_state(9, 9, seed).unwrap()
            .combine(w, &dense::random_state(9, 2, seed ^ 0xFF).unwrap(), 1.0).unwrap();
        let g = partial_transpose(&x, &shape, &[1]).unwrap();
        prop_assert!((g.trace() - x.trace()).abs() < 1e-12);
        prop_assert_eq!(partial_transpose(&g, &shape, &[1]).unwrap(), x);
    }
}
