//! Solver checks against brute-force oracles on randomized instances.

use peakaoi::config::{PolicyKind, ProtocolKind, SystemConfig};
use peakaoi::opt::{self, build_problem};
use peakaoi::sim::rng::SplitMix64;

/// Draw a perturbed parameter set that keeps all six problems feasible.
fn random_config(rng: &mut SplitMix64) -> SystemConfig {
    let mut cfg = SystemConfig::default();
    cfg.packet_len_bits = 40.0 + (360.0 * rng.next_f64()).round();
    cfg.n_devices = 1 + (rng.next_u64() % 10) as usize;
    cfg.distances_m = peakaoi::config::linspace(3.0, 5.0, cfg.n_devices);
    cfg.capacity_gap = 0.5 + rng.next_f64();
    cfg.lambda_max = 5.0 + 10.0 * rng.next_f64();
    cfg.ee_min = 1e4 + 5e4 * rng.next_f64();
    cfg
}

#[test]
fn subproblem_matches_dense_grid_on_random_instances() {
    let mut rng = SplitMix64::new(2024);
    let mut checked = 0;
    while checked < 20 {
        let cfg = random_config(&mut rng);
        let protocol = ProtocolKind::ALL[(rng.next_u64() % 3) as usize];
        let policy = PolicyKind::ALL[(rng.next_u64() % 2) as usize];
        let device = (rng.next_u64() % cfg.n_devices as u64) as usize;
        let Ok(problem) = build_problem(protocol, policy, &cfg, device) else {
            continue;
        };
        let lambda = cfg.lambda_min + (cfg.lambda_max - cfg.lambda_min) * rng.next_f64();
        let Ok((x, obj)) = opt::solve_subproblem_fixed_lambda(&problem, lambda) else {
            continue;
        };
        assert!(problem.is_feasible(&x));

        let lo = problem.tau_b_floor();
        let hi = problem.tau_b_ceil(lambda);
        let mut grid_best = f64::INFINITY;
        for i in 0..=10_000 {
            let tau = lo + (hi - lo) * i as f64 / 10_000.0;
            let Ok(y) = problem.point_at(lambda, tau) else {
                continue;
            };
            if problem.is_feasible(&y) {
                if let Ok(v) = problem.objective(&y) {
                    grid_best = grid_best.min(v);
                }
            }
        }
        assert!(
            (obj - grid_best).abs() <= 1e-8,
            "{protocol}-{policy} lambda={lambda}: golden {obj} vs grid {grid_best}"
        );
        checked += 1;
    }
}

#[test]
fn exact_and_ccp_agree_on_every_instance_with_nonzero_vacation_floor() {
    // A nonzero vacation floor keeps the MV optimum away from the
    // degenerate tau_s = 0 corner; both solvers must track it.
    let mut cfg = SystemConfig::default();
    cfg.tau_s_min_s = 0.004;
    for protocol in ProtocolKind::ALL {
        for policy in PolicyKind::ALL {
            let p = build_problem(protocol, policy, &cfg, cfg.n_devices - 1).unwrap();
            let exact = opt::exact_linear_search(&p, 300).unwrap();
            let x0 = opt::find_feasible_point(&p).unwrap();
            let ccp = opt::ccp_solve(&p, &x0, 50, 1e-6).unwrap();
            let gap = (ccp.objective_s - exact.objective_s).abs() / exact.objective_s;
            assert!(gap <= 0.02, "{protocol}-{policy}: gap {gap}");
            if policy == PolicyKind::Mv {
                assert!((exact.x_star.policy_param.value() - 0.004).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn solver_reports_are_deterministic() {
    let cfg = SystemConfig::default();
    let p = build_problem(ProtocolKind::Noma, PolicyKind::Mv, &cfg, 9).unwrap();
    let a = opt::exact_linear_search(&p, 200).unwrap();
    let b = opt::exact_linear_search(&p, 200).unwrap();
    assert_eq!(
        a.x_star.lambda_rate.to_bits(),
        b.x_star.lambda_rate.to_bits()
    );
    assert_eq!(a.x_star.tau_b_s.to_bits(), b.x_star.tau_b_s.to_bits());
    assert_eq!(a.objective_s.to_bits(), b.objective_s.to_bits());
}
