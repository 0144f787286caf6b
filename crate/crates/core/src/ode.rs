//! Dormand-Prince 5(4) integrator with dense output and terminal events.

use crate::error::{Error, Result};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
/// Fifth-order weights minus embedded fourth-order weights.
const E: [f64; 7] = [
    35.0 / 384.0 - 5179.0 / 57600.0,
    0.0,
    500.0 / 1113.0 - 7571.0 / 16695.0,
    125.0 / 192.0 - 393.0 / 640.0,
    -2187.0 / 6784.0 + 92097.0 / 339200.0,
    11.0 / 84.0 - 187.0 / 2100.0,
    -1.0 / 40.0,
];
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h_max: f64,
    pub h_init: Option<f64>,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-8,
            atol: 1e-10,
            h_max: f64::INFINITY,
            h_init: None,
        }
    }
}

/// One accepted step with its continuous extension.
#[derive(Clone, Debug)]
pub struct DenseStep {
    pub t0: f64,
    pub t1: f64,
    rc: [Vec<f64>; 5],
}

impl DenseStep {
    pub fn y0(&self) -> &[f64] {
        &self.rc[0]
    }

    pub fn y1(&self) -> Vec<f64> {
        self.rc[0].iter().zip(&self.rc[1]).map(|(a, b)| a + b).collect()
    }

    /// Fourth-order interpolant at `t` in `[t0, t1]`.
    pub fn eval(&self, t: f64) -> Vec<f64> {
        let th = (t - self.t0) / (self.t1 - self.t0);
        let th1 = 1.0 - th;
        let [r0, r1, r2, r3, r4] = &self.rc;
        (0..r0.len())
            .map(|i| r0[i] + th * (r1[i] + th1 * (r2[i] + th * (r3[i] + th1 * r4[i]))))
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum OdeStop {
    End,
    /// Event function `index` reached zero at `t`.
    Event { index: usize, t: f64 },
}

#[derive(Clone, Debug)]
pub struct OdeSolution {
    pub t0: f64,
    pub y0: Vec<f64>,
    pub steps: Vec<DenseStep>,
    pub stop: OdeStop,
}

impl OdeSolution {
    pub fn t_final(&self) -> f64 {
        match self.stop {
            OdeStop::Event { t, .. } => t,
            OdeStop::End => self.steps.last().map_or(self.t0, |s| s.t1),
        }
    }

    /// State at `t` in `[t0, t_final]`.
    pub fn eval(&self, t: f64) -> Vec<f64> {
        if self.steps.is_empty() || t <= self.t0 {
            return self.y0.clone();
        }
        let k = self.steps.partition_point(|s| s.t1 < t).min(self.steps.len() - 1);
        self.steps[k].eval(t)
    }
}

/// Time accuracy of located events.
const EVENT_TOL: f64 = 1e-10;

/// Integrates `y' = f(t, y)` from `t0` to `t_end`.
///
/// `events(y)` returns values that must stay positive; integration stops at
/// the first time any of them reaches zero, located by bisection on the
/// dense output. A failing right-hand side evaluation rejects the step and
/// retries with a smaller one.
pub fn dopri5<F, G>(
    mut f: F,
    t0: f64,
    y0: &[f64],
    t_end: f64,
    opts: &OdeOptions,
    events: G,
) -> Result<OdeSolution>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
    G: Fn(&[f64]) -> Vec<f64>,
{
    if !(opts.rtol > 0.0 && opts.atol > 0.0 && opts.h_max > 0.0) {
        return Err(Error::InvalidParameter("tolerances and h_max must be positive".into()));
    }
    let n = y0.len();
    let mut sol = OdeSolution {
        t0,
        y0: y0.to_vec(),
        steps: Vec::new(),
        stop: OdeStop::End,
    };
    if let Some(index) = first_nonpositive(&events(y0)) {
        sol.stop = OdeStop::Event { index, t: t0 };
        return Ok(sol);
    }
    if t_end <= t0 {
        return Ok(sol);
    }

    let mut t = t0;
    let mut y = y0.to_vec();
    let mut k: [Vec<f64>; 7] = std::array::from_fn(|_| vec![0.0; n]);
    f(t, &y, &mut k[0])?;
    let mut h = opts
        .h_init
        .unwrap_or_else(|| initial_step(&y, &k[0], opts))
        .min(opts.h_max)
        .min(t_end - t0);
    let mut ytmp = vec![0.0; n];
    let mut y1 = vec![0.0; n];

    loop {
        let h_min = 1e-14 * t.abs().max(1.0);
        if h < h_min {
            return Err(Error::StepUnderflow { t, h, state: y });
        }
        let last = t + h >= t_end - 1e-12 * t_end.abs().max(1.0);
        let h_step = if last { t_end - t } else { h };

        // stages 2..7
        let mut failed = None;
        for s in 1..7 {
            for i in 0..n {
                let mut acc = 0.0;
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc += A[s][j] * kj[i];
                }
                ytmp[i] = y[i] + h_step * acc;
            }
            if s == 6 {
                y1.copy_from_slice(&ytmp);
            }
            if let Err(e) = f(t + C[s] * h_step, &ytmp, &mut k[s]) {
                failed = Some(e);
                break;
            }
        }
        if let Some(e) = failed {
            log::debug!("right-hand side failed at t = {t}, h = {h_step:e}: {e}");
            if h_step * 0.25 < h_min {
                return Err(e);
            }
            h = h_step * 0.25;
            continue;
        }

        let mut err = 0.0;
        for i in 0..n {
            let mut d = 0.0;
            for (s, ks) in k.iter().enumerate() {
                d += E[s] * ks[i];
            }
            let sc = opts.atol + opts.rtol * y[i].abs().max(y1[i].abs());
            err += (h_step * d / sc).powi(2);
        }
        let err = (err / n.max(1) as f64).sqrt();
        if !err.is_finite() {
            h = h_step * 0.25;
            continue;
        }
        let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        if err > 1.0 {
            h = h_step * fac.min(1.0);
            continue;
        }

        let step = dense(t, h_step, &y, &y1, &k);
        let t_next = if last { t_end } else { t + h_step };
        let g1 = events(&y1);
        if first_nonpositive(&g1).is_some() {
            let (index, te) = locate_event(&step, t, t_next, &events);
            let mut step = step;
            step.t1 = t_next;
            sol.steps.push(step);
            sol.stop = OdeStop::Event { index, t: te };
            return Ok(sol);
        }
        let mut step = step;
        step.t1 = t_next;
        sol.steps.push(step);

        t = t_next;
        y.copy_from_slice(&y1);
        if last {
            return Ok(sol);
        }
        // first-same-as-last
        let (first, rest) = k.split_at_mut(1);
        first[0].copy_from_slice(&rest[5]);
        h = (h_step * fac).min(opts.h_max);
    }
}

fn first_nonpositive(g: &[f64]) -> Option<usize> {
    g.iter().position(|v| !(*v > 0.0))
}

fn initial_step(y: &[f64], f0: &[f64], opts: &OdeOptions) -> f64 {
    let sc = |i: usize| opts.atol + opts.rtol * y[i].abs();
    let n = y.len().max(1) as f64;
    let d0 = (y.iter().enumerate().map(|(i, v)| (v / sc(i)).powi(2)).sum::<f64>() / n).sqrt();
    let d1 = (f0.iter().enumerate().map(|(i, v)| (v / sc(i)).powi(2)).sum::<f64>() / n).sqrt();
    if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    }
}

fn dense(t: f64, h: f64, y0: &[f64], y1: &[f64], k: &[Vec<f64>; 7]) -> DenseStep {
    let n = y0.len();
    let mut rc: [Vec<f64>; 5] = std::array::from_fn(|_| vec![0.0; n]);
    for i in 0..n {
        let ydiff = y1[i] - y0[i];
        let bspl = h * k[0][i] - ydiff;
        rc[0][i] = y0[i];
        rc[1][i] = ydiff;
        rc[2][i] = bspl;
        rc[3][i] = ydiff - h * k[6][i] - bspl;
        let mut d = 0.0;
        for (s, ks) in k.iter().enumerate() {
            d += D[s] * ks[i];
        }
        rc[4][i] = h * d;
    }
    DenseStep {
        t0: t,
        t1: t + h,
        rc,
    }
}

/// Earliest zero of the smallest event function on `[a, b]`.
fn locate_event<G: Fn(&[f64]) -> Vec<f64>>(step: &DenseStep, a: f64, b: f64, events: &G) -> (usize, f64) {
    let g_min = |t: f64| {
        let y = if t >= b { step.eval(b) } else { step.eval(t) };
        let g = events(&y);
        let idx = g
            .iter()
            .enumerate()
            .fold((usize::MAX, f64::INFINITY), |(bi, bv), (i, &v)| if v < bv { (i, v) } else { (bi, bv) });
        idx
    };
    let (mut lo, mut hi) = (a, b);
    // sampling guards against an event entered and left inside one step
    let probes = 16;
    for p in 1..=probes {
        let t = a + (b - a) * p as f64 / probes as f64;
        if !(g_min(t).1 > 0.0) {
            hi = t;
            lo = a + (b - a) * (p - 1) as f64 / probes as f64;
            break;
        }
    }
    while hi - lo > EVENT_TOL {
        let mid = 0.5 * (lo + hi);
        if g_min(mid).1 > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (g_min(hi).0, hi)
}
