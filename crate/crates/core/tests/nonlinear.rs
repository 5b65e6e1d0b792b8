use nsfk_core::nonlinear::{rhs, run, w_diagnostics, RunSpec, Scheme, Solver, StateField};
use nsfk_core::{Domain, IdealGas, State};

const EQ: State = State {
    rho: 1.0,
    u: 0.0,
    theta: 1.0,
    rho_x: 0.0,
};

fn solver(n: usize, length: f64) -> Solver {
    let eos = IdealGas::REFERENCE.build().unwrap();
    Solver::new(&eos, &EQ, n, length, Domain::default()).unwrap()
}

fn bump(s: &Solver, a: f64) -> StateField {
    let n = s.grid.n;
    let l = s.grid.length;
    let mut f = StateField::constant(&s.equilibrium, n, l);
    for j in 0..n {
        let x = s.grid.x(j) - 0.5 * l;
        let g = (-x * x / 4.0).exp();
        f.rho[j] += a * g;
        f.u[j] += 0.5 * a * x * g;
        f.theta[j] -= 0.3 * a * g;
    }
    f
}

fn evolve(s: &Solver, f: &StateField, t: f64, dt: f64, scheme: Scheme) -> StateField {
    let k = (t / dt).round() as usize;
    let mut g = f.clone();
    for _ in 0..k {
        g = s.step(&g, dt, scheme).unwrap();
    }
    g
}

fn dist(a: &StateField, b: &StateField) -> f64 {
    let pairs = a
        .rho
        .iter()
        .zip(&b.rho)
        .chain(a.u.iter().zip(&b.u))
        .chain(a.theta.iter().zip(&b.theta));
    pairs.map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn convergence_ratio(scheme: Scheme, dt: f64) -> f64 {
    let s = solver(128, 40.0);
    let f = bump(&s, 0.1);
    let t = 1.6;
    let reference = evolve(&s, &f, t, dt / 32.0, scheme);
    let coarse = dist(&evolve(&s, &f, t, dt, scheme), &reference);
    let fine = dist(&evolve(&s, &f, t, dt / 2.0, scheme), &reference);
    coarse / fine
}

#[test]
fn integrating_factor_is_fourth_order() {
    let r = convergence_ratio(Scheme::IfRk4, 0.1);
    assert!((r / 16.0 - 1.0).abs() <= 0.2, "ratio {r}");
}

#[test]
fn explicit_rk4_is_fourth_order() {
    let r = convergence_ratio(Scheme::Rk4, 0.008);
    assert!((r / 16.0 - 1.0).abs() <= 0.2, "ratio {r}");
}

// Eighth-order central difference of an analytic function.
fn d1(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    const C: [f64; 4] = [4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];
    C.iter()
        .enumerate()
        .map(|(k, c)| {
            let s = (k + 1) as f64 * h;
            c * (f(x + s) - f(x - s))
        })
        .sum::<f64>()
        / h
}

#[test]
fn inviscid_limit_matches_finite_difference_euler() {
    let gamma = 5.0 / 3.0;
    let eos = IdealGas {
        kappa0: 0.0,
        mu0: 0.0,
        alpha0: 0.0,
        ..IdealGas::REFERENCE
    }
    .build_limit()
    .unwrap();
    let length = 2.0 * std::f64::consts::PI;
    let rho = |x: f64| 1.0 + 0.1 * x.sin();
    let u = |x: f64| 0.2 * (2.0 * x).cos();
    let theta = |x: f64| 1.0 + 0.1 * (x + 1.0).sin();
    let n = 64;
    let xs: Vec<f64> = (0..n).map(|j| j as f64 * length / n as f64).collect();
    let field = StateField {
        length,
        rho: xs.iter().map(|x| rho(*x)).collect(),
        u: xs.iter().map(|x| u(*x)).collect(),
        theta: xs.iter().map(|x| theta(*x)).collect(),
    };
    let d = rhs(&eos, &field).unwrap();
    let h = 1e-2;
    for (j, &x) in xs.iter().enumerate() {
        let p = |x: f64| rho(x) * theta(x);
        let rho_t = -d1(|x| rho(x) * u(x), x, h);
        let u_t = -u(x) * d1(u, x, h) - d1(p, x, h) / rho(x);
        let theta_t = -u(x) * d1(theta, x, h) - (gamma - 1.0) * theta(x) * d1(u, x, h);
        assert!((d.rho[j] - rho_t).abs() <= 1e-6, "rho_t at {x}");
        assert!((d.u[j] - u_t).abs() <= 1e-6, "u_t at {x}");
        assert!((d.theta[j] - theta_t).abs() <= 1e-6, "theta_t at {x}");
    }
}

#[test]
fn equilibrium_stays_put() {
    let s = solver(64, 20.0);
    let f = StateField::constant(&EQ, 64, 20.0);
    for scheme in [Scheme::Rk4, Scheme::IfRk4] {
        let g = evolve(&s, &f, 0.05, 0.005, scheme);
        assert!(dist(&f, &g) <= 1e-15);
    }
}

#[test]
fn step_preserves_realness_and_first_w_component() {
    let s = solver(128, 40.0);
    let f = evolve(&s, &bump(&s, 0.05), 0.5, 0.1, Scheme::IfRk4);
    assert!(f
        .rho
        .iter()
        .chain(&f.u)
        .chain(&f.theta)
        .all(|v| v.is_finite()));
    let d = w_diagnostics(&s.eos, &EQ, &f).unwrap();
    for j in 0..128 {
        assert_eq!(d.w[0][j], f.rho[j] - 1.0);
    }
}

#[test]
fn doubling_resolution_changes_little() {
    let eos = IdealGas::REFERENCE.build().unwrap();
    let norm = |n: usize| {
        let spec = RunSpec {
            length: 40.0,
            n,
            dt: 0.05,
            t_final: 4.0,
            sample_interval: 4.0,
            ..RunSpec::default()
        };
        let r = run(&eos, &EQ, &spec).unwrap();
        assert!(r.termination.is_none());
        r.ledger.rows.last().unwrap().norm_u
    };
    let (a, b) = (norm(256), norm(512));
    assert!((a - b).abs() <= 1e-6 * b, "{a} vs {b}");
}

#[test]
fn halving_amplitude_quarters_remainder() {
    let s = solver(256, 40.0);
    let big = w_diagnostics(&s.eos, &EQ, &bump(&s, 1e-2)).unwrap().n_max;
    let small = w_diagnostics(&s.eos, &EQ, &bump(&s, 5e-3)).unwrap().n_max;
    let r = big / small;
    assert!((r - 4.0).abs() <= 0.2, "ratio {r}");
}
