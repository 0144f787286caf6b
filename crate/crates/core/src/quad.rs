//! Gauss-Legendre line quadrature along straight segments.

use crate::grid::Point;

const GL8_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL8_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Eight-point Gauss-Legendre rule on `[a, b]`.
pub fn gauss8(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let m = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    let mut s = 0.0;
    for (x, w) in GL8_NODES.iter().zip(GL8_WEIGHTS) {
        s += w * (f(m - r * x) + f(m + r * x));
    }
    s * r
}

/// Adaptive bisection on top of [`gauss8`] until two levels agree to `tol`.
pub fn adaptive(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rec(f: &impl Fn(f64) -> f64, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let left = gauss8(f, a, m);
        let right = gauss8(f, m, b);
        let both = left + right;
        if depth == 0 || (both - whole).abs() <= tol {
            return both;
        }
        rec(f, a, m, left, 0.5 * tol, depth - 1) + rec(f, m, b, right, 0.5 * tol, depth - 1)
    }
    rec(f, a, b, gauss8(f, a, b), tol, 30)
}

/// `int_p^q g(x) ds` along the straight segment from `p` to `q`.
pub fn segment(g: &impl Fn(Point) -> f64, p: Point, q: Point, tol: f64) -> f64 {
    let len = p.dist(q);
    let d = q - p;
    adaptive(&|t: f64| g(p + d * t), 0.0, 1.0, tol / len.max(1e-300)) * len
}
