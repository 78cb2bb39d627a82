//! Independent classical (integer-order) reference solvers used as oracles.
//! Nothing here calls into the fractional solver.
#![allow(dead_code)]

use fractb::ModelParams;

/// Classical fourth-order Runge–Kutta on `n` uniform steps over `[0, tf]`.
pub fn rk4<F>(f: F, x0: &[f64], tf: f64, n: usize) -> Vec<Vec<f64>>
where
    F: Fn(f64, &[f64]) -> Vec<f64>,
{
    let h = tf / n as f64;
    let mut out = Vec::with_capacity(n + 1);
    let mut x = x0.to_vec();
    out.push(x.clone());
    for j in 0..n {
        let t = j as f64 * h;
        let axpy = |a: &[f64], k: &[f64], s: f64| a.iter().zip(k).map(|(a, k)| a + s * k).collect::<Vec<_>>();
        let k1 = f(t, &x);
        let k2 = f(t + h / 2.0, &axpy(&x, &k1, h / 2.0));
        let k3 = f(t + h / 2.0, &axpy(&x, &k2, h / 2.0));
        let k4 = f(t + h, &axpy(&x, &k3, h));
        for i in 0..x.len() {
            x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        out.push(x.clone());
    }
    out
}

/// Linear interpolation of node samples at time `t`.
pub fn interp(samples: &[f64], tf: f64, t: f64) -> f64 {
    let n = samples.len() - 1;
    let s = (t / tf * n as f64).clamp(0.0, n as f64);
    let j = (s.floor() as usize).min(n - 1);
    let w = s - j as f64;
    (1.0 - w) * samples[j] + w * samples[j + 1]
}

pub fn tb_field(m: &ModelParams, x: &[f64], u: f64) -> Vec<f64> {
    let (s, l, i, t) = (x[0], x[1], x[2], x[3]);
    vec![
        m.lambda - m.beta * i * s - m.mu * s,
        m.beta * i * s + (1.0 - m.k) * m.delta * t - (m.mu + m.epsilon) * l,
        m.epsilon * l + m.k * m.delta * t - (m.mu + u + m.alpha1) * i,
        u * i - (m.mu + m.delta + m.alpha2) * t,
    ]
}

/// dp/dt of the costates (published form), for states `x` and control `u`.
pub fn costate_field(m: &ModelParams, x: &[f64], p: &[f64], u: f64) -> Vec<f64> {
    let (s, i) = (x[0], x[2]);
    vec![
        m.mu * p[0] - m.beta * i * (p[0] - p[1]),
        (m.epsilon + m.mu) * p[1] - m.epsilon * p[2],
        -1.0 + (m.alpha1 + u + m.mu) * p[2] - u * p[3] + m.beta * s * (p[0] - p[1]),
        (m.alpha2 + m.mu + m.delta) * p[3] + m.delta * (m.k - 1.0) * p[1] - m.delta * m.k * p[2],
    ]
}

/// RK4 states under a node-sampled control (linearly interpolated between nodes).
pub fn classical_states(m: &ModelParams, x0: &[f64], u: &[f64], tf: f64) -> Vec<Vec<f64>> {
    let n = u.len() - 1;
    rk4(|t, x| tb_field(m, x, interp(u, tf, t)), x0, tf, n)
}

/// RK4 costates integrated backward from `p(tf) = 0`; returned in forward time.
pub fn classical_costates(m: &ModelParams, states: &[Vec<f64>], u: &[f64], tf: f64) -> Vec<Vec<f64>> {
    let n = u.len() - 1;
    let comps: Vec<Vec<f64>> = (0..4).map(|c| states.iter().map(|x| x[c]).collect()).collect();
    let state_at = |t: f64| -> Vec<f64> { comps.iter().map(|c| interp(c, tf, t)).collect() };
    // s = tf - t, dp/ds = -dp/dt
    let back = rk4(
        |s, p| {
            let t = tf - s;
            costate_field(m, &state_at(t), p, interp(u, tf, t)).into_iter().map(|v| -v).collect()
        },
        &[0.0; 4],
        tf,
        n,
    );
    back.into_iter().rev().collect()
}

pub fn trapezoid(y: &[f64], tf: f64) -> f64 {
    let n = y.len() - 1;
    let h = tf / n as f64;
    h * (0.5 * (y[0] + y[n]) + y[1..n].iter().sum::<f64>())
}

pub struct ClassicalSweep {
    pub u: Vec<f64>,
    pub infectious: Vec<f64>,
    pub j: f64,
    pub iterations: usize,
}

/// Integer-order forward-backward sweep with RK4 in both directions.
pub fn classical_sweep(
    m: &ModelParams,
    x0: &[f64],
    (b, rho, u_max): (f64, f64, f64),
    tf: f64,
    n: usize,
) -> ClassicalSweep {
    let mut u = vec![0.0; n + 1];
    for it in 1..=500 {
        let xs = classical_states(m, x0, &u, tf);
        let ps = classical_costates(m, &xs, &u, tf);
        let law: Vec<f64> =
            xs.iter().zip(&ps).map(|(x, p)| ((p[2] - p[3]) * x[2] / (2.0 * b * rho)).clamp(0.0, u_max)).collect();
        let change = law.iter().zip(&u).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if change <= 1e-6 {
            let infectious: Vec<f64> = xs.iter().map(|x| x[2]).collect();
            let integrand: Vec<f64> = infectious.iter().zip(&u).map(|(i, u)| i + b * rho * u * u).collect();
            return ClassicalSweep { j: trapezoid(&integrand, tf), u, infectious, iterations: it };
        }
        u = law.iter().zip(&u).map(|(a, b)| 0.5 * a + 0.5 * b).collect();
    }
    panic!("classical sweep did not converge");
}
