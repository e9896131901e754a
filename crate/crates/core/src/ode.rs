//! Adaptive Dormand–Prince 5(4) integration for complex first-order systems.

use num_complex::Complex;

use crate::error::{LabError, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions<T> {
    pub atol: T,
    pub rtol: T,
    /// Step-size safety factor.
    pub safety: T,
    pub max_steps: usize,
    /// Initial step; `None` picks `|t1 - t0| / 100`.
    pub h0: Option<T>,
}

impl<T: Real> Default for OdeOptions<T> {
    fn default() -> Self {
        Self {
            atol: T::lit(1e-11),
            rtol: T::lit(1e-11),
            safety: T::lit(0.9),
            max_steps: 200_000,
            h0: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
}

// Dormand–Prince tableau.
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
// Fifth-order weights equal the last row of A; the error weights are the
// difference between fifth- and fourth-order solutions.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrates `y' = f(t, y)` from `t0` to `t1` and returns `y(t1)`.
pub fn dopri5<T, F>(
    mut f: F,
    t0: T,
    t1: T,
    y0: &[Complex<T>],
    opts: &OdeOptions<T>,
) -> Result<(Vec<Complex<T>>, OdeStats)>
where
    T: Real,
    F: FnMut(T, &[Complex<T>], &mut [Complex<T>]),
{
    let n = y0.len();
    let mut stats = OdeStats::default();
    let mut y = y0.to_vec();
    if t1 == t0 || n == 0 {
        return Ok((y, stats));
    }
    let span = t1 - t0;
    let dir = if span > T::zero() { T::one() } else { -T::one() };
    let mut t = t0;
    let mut h = opts.h0.unwrap_or(span.abs() / T::lit(100.0)).abs().min(span.abs()) * dir;
    let c: Vec<T> = C.iter().map(|&v| T::lit(v)).collect();
    let a: Vec<Vec<T>> = A.iter().map(|r| r.iter().map(|&v| T::lit(v)).collect()).collect();
    let e: Vec<T> = E.iter().map(|&v| T::lit(v)).collect();
    let zero = Complex::new(T::zero(), T::zero());
    let mut k = vec![vec![zero; n]; 7];
    let mut stage = vec![zero; n];
    let mut y_new = vec![zero; n];
    f(t, &y, &mut k[0]);
    let min_factor = T::lit(0.2);
    let max_factor = T::lit(5.0);
    let h_min = T::default_epsilon() * T::lit(16.0) * (t0.abs().max(t1.abs()).max(T::one()));

    while (t1 - t) * dir > T::zero() {
        if stats.accepted + stats.rejected >= opts.max_steps {
            return Err(LabError::Integrator(format!(
                "exceeded {} steps at t = {t}",
                opts.max_steps
            )));
        }
        if (t + h - t1) * dir > T::zero() {
            h = t1 - t;
        }
        for s in 1..7 {
            for i in 0..n {
                let mut acc = y[i];
                for (j, kj) in k.iter().enumerate().take(s) {
                    if a[s][j] != T::zero() {
                        acc += kj[i] * (h * a[s][j]);
                    }
                }
                stage[i] = acc;
            }
            let (head, tail) = k.split_at_mut(s);
            let _ = head;
            f(t + c[s] * h, &stage, &mut tail[0]);
            if s == 6 {
                y_new.copy_from_slice(&stage);
            }
        }
        // error estimate, RMS over components
        let mut err = T::zero();
        for i in 0..n {
            let mut ei = zero;
            for (j, kj) in k.iter().enumerate() {
                if e[j] != T::zero() {
                    ei += kj[i] * (h * e[j]);
                }
            }
            let scale = opts.atol + opts.rtol * y[i].norm_sqr().sqrt().max(y_new[i].norm_sqr().sqrt());
            let r = ei.norm_sqr().sqrt() / scale;
            err += r * r;
        }
        err = (err / T::count(n)).sqrt();
        if !err.is_finite() {
            return Err(LabError::Integrator(format!("non-finite error at t = {t}")));
        }
        if err <= T::one() {
            stats.accepted += 1;
            t += h;
            y.copy_from_slice(&y_new);
            // FSAL: last stage derivative is f(t + h, y_new)
            let last = k[6].clone();
            k[0] = last;
            let factor = if err == T::zero() {
                max_factor
            } else {
                (opts.safety * err.powf(T::lit(-0.2))).min(max_factor).max(min_factor)
            };
            h *= factor;
        } else {
            stats.rejected += 1;
            let factor = (opts.safety * err.powf(T::lit(-0.2))).max(min_factor);
            h *= factor;
        }
        if h.abs() < h_min {
            return Err(LabError::Integrator(format!("step size underflow at t = {t}")));
        }
    }
    Ok((y, stats))
}
