//! Adaptive Dormand-Prince 5(4) integration for small real systems.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Steps below this fraction of |x| count as a blow-up.
    pub min_step: f64,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions { rtol: 1e-11, atol: 1e-13, max_steps: 2_000_000, min_step: 1e-15 }
    }
}

/// Accepted states at the requested abscissae, plus every accepted step.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub at_targets: Vec<Vec<f64>>,
    pub steps: Vec<(f64, Vec<f64>)>,
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrates y' = f(x, y) from x0 through the monotone list of targets,
/// landing exactly on each. `check` may reject a state (blow-up detection).
pub fn integrate<F, G>(
    f: F,
    x0: f64,
    y0: &[f64],
    targets: &[f64],
    opts: &OdeOptions,
    check: G,
) -> Result<Trajectory>
where
    F: Fn(f64, &[f64], &mut [f64]),
    G: Fn(f64, &[f64]) -> Option<String>,
{
    let d = y0.len();
    let mut x = x0;
    let mut y = y0.to_vec();
    let mut out = Trajectory { at_targets: vec![], steps: vec![(x, y.clone())] };
    let Some(&last) = targets.last() else {
        return Ok(out);
    };
    let dir = if last >= x0 { 1.0 } else { -1.0 };
    let mut h = dir * (1e-3 * x0.abs().max(1e-3)).min((last - x0).abs().max(1e-12));
    let mut k = vec![vec![0.0; d]; 7];
    let mut tmp = vec![0.0; d];
    let mut y5 = vec![0.0; d];
    let mut steps = 0usize;
    f(x, &y, &mut k[0]);
    for &t in targets {
        if (t - x) * dir < 0.0 {
            return Err(Error::Input("targets must be monotone in the integration direction".into()));
        }
        while (t - x) * dir > 0.0 {
            steps += 1;
            if steps > opts.max_steps {
                return Err(Error::Integration { at: x, msg: "step budget exhausted".into() });
            }
            let hit = (x + h - t) * dir >= 0.0;
            let planned = h;
            if hit {
                h = t - x;
            }
            for s in 1..7 {
                for i in 0..d {
                    let mut acc = y[i];
                    for j in 0..s {
                        acc += h * A[s][j] * k[j][i];
                    }
                    tmp[i] = acc;
                }
                f(x + C[s] * h, &tmp, &mut k[s]);
            }
            let mut err: f64 = 0.0;
            for i in 0..d {
                let mut a5 = y[i];
                let mut e = 0.0;
                for s in 0..7 {
                    a5 += h * B5[s] * k[s][i];
                    e += h * (B5[s] - B4[s]) * k[s][i];
                }
                y5[i] = a5;
                let sc = opts.atol + opts.rtol * y[i].abs().max(a5.abs());
                err = err.max((e / sc).abs());
            }
            if !err.is_finite() {
                h *= 0.25;
                if h.abs() < opts.min_step * x.abs().max(1.0) {
                    return Err(Error::Integration { at: x, msg: "non-finite derivative".into() });
                }
                continue;
            }
            if err <= 1.0 {
                x = if hit { t } else { x + h };
                y.copy_from_slice(&y5);
                if let Some(msg) = check(x, &y) {
                    return Err(Error::Integration { at: x, msg });
                }
                // first-same-as-last: stage 7 is f at the new point
                let last_stage = k[6].clone();
                k[0].copy_from_slice(&last_stage);
                out.steps.push((x, y.clone()));
            }
            let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            let new_h = h * fac;
            if err > 1.0 && new_h.abs() < opts.min_step * x.abs().max(1e-300) {
                return Err(Error::Integration { at: x, msg: "step size underflow".into() });
            }
            h = if hit && err <= 1.0 { planned } else { new_h };
        }
        out.at_targets.push(y.clone());
    }
    Ok(out)
}
