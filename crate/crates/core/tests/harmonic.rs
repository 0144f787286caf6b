use cgle_core::harmonic::{
    build_h_dirichlet, build_htilde_neumann, build_q_dirichlet, build_qtilde_neumann,
    build_r_dirichlet, build_rtilde, solve_laplace_dirichlet, solve_laplace_neumann,
    DirichletLaplace, HarmonicField, NeumannLaplace,
};
use cgle_core::initial::{BoundaryPhase, PhaseMode, VortexSpec};
use cgle_core::{Grid2D, Point};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn square(n: usize) -> Grid2D {
    Grid2D::new(-1.0, 1.0, -1.0, 1.0, n, n).unwrap()
}

fn trace_of(g: &Grid2D, f: impl Fn(Point) -> f64) -> Vec<f64> {
    g.boundary_nodes().iter().map(|&(i, j)| f(g.node(i, j))).collect()
}

fn nodal_error(u: &HarmonicField, f: impl Fn(Point) -> f64, shift: f64) -> f64 {
    u.values
        .indexed_iter()
        .map(|((i, j), v)| (v - f(u.grid.node(i, j)) + shift).abs())
        .fold(0.0, f64::max)
}

fn orders(e: &[f64]) -> Vec<f64> {
    e.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

#[test]
fn dirichlet_cubic_is_reproduced_exactly() {
    // Re (x + i y)^3 has vanishing fourth derivatives
    let f = |p: Point| p.x.powi(3) - 3.0 * p.x * p.y * p.y;
    let g = square(16);
    let u = solve_laplace_dirichlet(&g, &trace_of(&g, f)).unwrap();
    assert!(nodal_error(&u, f, 0.0) < 1e-13);
}

#[test]
fn dirichlet_quartic_converges_at_second_order() {
    // Re (x + i y)^4
    let f = |p: Point| p.x.powi(4) - 6.0 * p.x * p.x * p.y * p.y + p.y.powi(4);
    let e: Vec<f64> = [16, 32, 64, 128]
        .iter()
        .map(|&n| {
            let g = square(n);
            let u = solve_laplace_dirichlet(&g, &trace_of(&g, f)).unwrap();
            assert!(u.interior_residual() < 1e-10);
            nodal_error(&u, f, 0.0)
        })
        .collect();
    assert!(orders(&e).iter().all(|&o| o >= 1.9), "{e:?}");
}

#[test]
fn neumann_flux_reconstruction_converges_at_second_order() {
    let f = |p: Point| p.x.exp() * p.y.cos();
    let grad = |p: Point| Point::new(p.x.exp() * p.y.cos(), -p.x.exp() * p.y.sin());
    let e: Vec<f64> = [16, 32, 64, 128]
        .iter()
        .map(|&n| {
            let g = Grid2D::new(-1.0, 1.0, -0.65, 0.65, n, n).unwrap();
            let u = solve_laplace_neumann(&g, &|p, nu| grad(p).dot(nu)).unwrap();
            assert!(u.mean().abs() < 1e-12);
            let exact = HarmonicField {
                grid: g,
                values: ndarray::Array2::from_shape_fn(g.shape(), |(i, j)| f(g.node(i, j))),
                gauge: u.gauge,
            };
            nodal_error(&u, f, exact.mean())
        })
        .collect();
    assert!(orders(&e).iter().all(|&o| o >= 1.9), "{e:?}");
}

#[test]
fn gradients_of_simple_fields() {
    let g = square(64);
    let lin = solve_laplace_dirichlet(&g, &trace_of(&g, |p| p.x)).unwrap();
    for p in [Point::new(0.0, 0.0), Point::new(0.31, -0.77), Point::new(-0.9, 0.9)] {
        let d = lin.grad_at(p).unwrap();
        assert!((d.x - 1.0).abs() < 1e-12 && d.y.abs() < 1e-12);
    }
    let quad = solve_laplace_dirichlet(&g, &trace_of(&g, |p| p.x * p.x - p.y * p.y)).unwrap();
    let d = quad.grad_at(Point::new(0.25, 0.1)).unwrap();
    assert!((d.x - 0.5).abs() < 1e-3 && (d.y + 0.2).abs() < 1e-3, "{d:?}");
}

#[test]
fn centered_vortex_flux_is_compatible_and_symmetric() {
    let centers = [Point::new(0.0, 0.0)];
    let u = build_qtilde_neumann(&NeumannLaplace::new(square(64)), &centers, &[1]).unwrap();
    assert!(u.grad_at(Point::new(0.0, 0.0)).unwrap().norm() < 1e-10);
}

#[test]
fn q_vanishes_at_the_initial_configuration() {
    let specs = vec![VortexSpec::new(-0.3, 0.1, 1), VortexSpec::new(0.4, -0.2, -1)];
    let omega = BoundaryPhase::new(PhaseMode::Mode0, specs.clone()).unwrap();
    let centers: Vec<Point> = specs.iter().map(|s| s.center).collect();
    let q = build_q_dirichlet(&DirichletLaplace::new(square(64)), &omega, &centers, &[1, -1]).unwrap();
    assert!(q.values.iter().all(|v| v.abs() < 1e-10));

    let one = vec![VortexSpec::new(0.2, 0.1, 1)];
    let omega = BoundaryPhase::new(PhaseMode::Mode1, one).unwrap();
    let q = build_q_dirichlet(&DirichletLaplace::new(square(64)), &omega, &[Point::new(0.2, 0.1)], &[1]).unwrap();
    let d = q.grad_at(Point::new(0.2, 0.1)).unwrap();
    assert!((d.x - 1.0).abs() < 1e-10 && (d.y - 1.0).abs() < 1e-10);
}

#[test]
fn dipole_qtilde_is_mirror_symmetric() {
    let g = square(64);
    let centers = [Point::new(-0.3, 0.0), Point::new(0.3, 0.0)];
    let u = build_qtilde_neumann(&NeumannLaplace::new(g), &centers, &[-1, 1]).unwrap();
    let mirrored = [Point::new(0.3, 0.0), Point::new(-0.3, 0.0)];
    let v = build_qtilde_neumann(&NeumannLaplace::new(g), &mirrored, &[-1, 1]).unwrap();
    for p in [Point::new(0.2, 0.3), Point::new(-0.5, -0.1)] {
        let a = u.grad_at(p).unwrap();
        let b = v.grad_at(Point::new(-p.x, p.y)).unwrap();
        // x -> -x maps theta to pi - theta: gradients flip sign and x-reflect
        assert!((a.x - b.x).abs() < 1e-10 && (a.y + b.y).abs() < 1e-10, "{a:?} {b:?}");
    }
}

/// A random configuration of one to three vortices, its boundary phase from
/// displaced initial positions, and five probes.
struct Config {
    centers: Vec<Point>,
    windings: Vec<i8>,
    omega: BoundaryPhase,
    probes: Vec<Point>,
}

fn random_config(rng: &mut StdRng) -> Config {
    let m = rng.gen_range(1..=3);
    let mut centers: Vec<Point> = Vec::new();
    while centers.len() < m {
        let p = Point::new(rng.gen_range(-0.7..0.7), rng.gen_range(-0.7..0.7));
        if centers.iter().all(|c| c.dist(p) > 0.2) {
            centers.push(p);
        }
    }
    let windings: Vec<i8> = (0..m).map(|_| if rng.gen_bool(0.5) { 1 } else { -1 }).collect();
    let specs = centers
        .iter()
        .zip(&windings)
        .map(|(c, &n)| VortexSpec::new(c.x + rng.gen_range(-0.1..0.1), c.y + rng.gen_range(-0.1..0.1), n))
        .collect();
    let mode = PhaseMode::CLOSED_FORM[rng.gen_range(0..6)];
    let probes = (0..5)
        .map(|_| Point::new(rng.gen_range(-0.85..0.85), rng.gen_range(-0.85..0.85)))
        .collect();
    Config {
        centers,
        windings,
        omega: BoundaryPhase::new(mode, specs).unwrap(),
        probes,
    }
}

/// Largest identity discrepancy over the probes, Dirichlet and Neumann.
fn identity_gaps(c: &Config, n: usize) -> (f64, f64) {
    let g = square(n);
    let (dir, neu) = (DirichletLaplace::new(g), NeumannLaplace::new(g));
    let q = build_q_dirichlet(&dir, &c.omega, &c.centers, &c.windings).unwrap();
    let h = build_h_dirichlet(&dir, &c.omega, &c.centers, &c.windings).unwrap();
    let r = build_r_dirichlet(&neu, &c.omega, &c.centers, &c.windings).unwrap();
    let qt = build_qtilde_neumann(&neu, &c.centers, &c.windings).unwrap();
    let ht = build_htilde_neumann(&dir, &c.centers, &c.windings).unwrap();
    let rt = build_rtilde(&dir, &c.centers, &c.windings).unwrap();
    let (mut d, mut m) = (0.0_f64, 0.0_f64);
    for &p in &c.probes {
        let gr = r.grad_at(p).unwrap();
        let gq = q.grad_at(p).unwrap().rot90();
        let gh = h.grad_at(p).unwrap().rot90();
        d = d.max((gr + gq).norm()).max((gr + gh).norm());
        let grt = rt.grad_at(p).unwrap();
        let gqt = qt.grad_at(p).unwrap().rot90();
        let ght = ht.grad_at(p).unwrap();
        m = m.max((grt + gqt).norm()).max((grt + ght).norm());
    }
    (d, m)
}

#[test]
fn gradient_identities_hold_and_converge() {
    let mut rng = StdRng::seed_from_u64(2024);
    let configs: Vec<Config> = (0..10).map(|_| random_config(&mut rng)).collect();
    let coarse: Vec<(f64, f64)> = configs.iter().map(|c| identity_gaps(c, 256)).collect();
    let fine: Vec<(f64, f64)> = configs.iter().map(|c| identity_gaps(c, 512)).collect();
    let worst = coarse.iter().fold(0.0_f64, |m, &(a, b)| m.max(a).max(b));
    assert!(worst <= 1e-3, "identity gap {worst:e}");
    let sum = |v: &[(f64, f64)], pick: fn(&(f64, f64)) -> f64| v.iter().map(pick).sum::<f64>();
    let od = (sum(&coarse, |x| x.0) / sum(&fine, |x| x.0)).log2();
    let on = (sum(&coarse, |x| x.1) / sum(&fine, |x| x.1)).log2();
    assert!(od >= 1.8 && on >= 1.8, "observed orders {od} {on}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn gradients_ignore_the_additive_constant(c in -50.0f64..50.0, x in -0.8f64..0.8, y in -0.8f64..0.8) {
        let g = square(32);
        let mut u = solve_laplace_dirichlet(&g, &trace_of(&g, |p| p.x * p.y + p.x)).unwrap();
        let before = u.grad_at(Point::new(x, y)).unwrap();
        u.add_constant(c);
        let after = u.grad_at(Point::new(x, y)).unwrap();
        prop_assert!((before - after).norm() <= 1e-12 * (1.0 + c.abs()));
    }

    #[test]
    fn dirichlet_residual_is_small(a in -2.0f64..2.0, b in -2.0f64..2.0, k in 1.0f64..4.0) {
        let g = Grid2D::new(-1.0, 1.0, -0.65, 0.65, 40, 26).unwrap();
        let u = solve_laplace_dirichlet(&g, &trace_of(&g, |p| a * (k * p.x).sin() + b * (k * p.y).cos())).unwrap();
        prop_assert!(u.interior_residual() <= 1e-10 * (a.abs() + b.abs()).max(1.0));
    }
}
