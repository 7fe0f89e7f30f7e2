//! Independent reference solvers used by several test targets.
#![allow(dead_code)]

use std::f64::consts::PI;

/// Ground state of the one-orbital Hartree model in R^3
///   -t phi'' - (2t/r) phi' - Z/r phi + c u phi = lambda phi,  -Laplace u = 4 pi phi^2
/// by Numerov shooting on y = r phi over a uniform grid, bisection on the
/// node count, and a shell-theorem Hartree potential, iterated to self-consistency.
pub fn shooting_hartree(z: f64, c: f64, t: f64, outer: f64, steps: usize) -> f64 {
    let h = outer / steps as f64;
    let r: Vec<f64> = (0..=steps).map(|i| i as f64 * h).collect();
    let mut hartree = vec![0.0; steps + 1];
    let mut lambda = 0.0;
    for _ in 0..200 {
        let (lam, y) = ground_state(z, t, &r, &hartree, c);
        let next = hartree_from(&r, &y);
        let change = (lam - lambda).abs();
        lambda = lam;
        for (old, new) in hartree.iter_mut().zip(&next) {
            *old = 0.5 * *old + 0.5 * new;
        }
        if change < 1e-12 {
            return lambda;
        }
    }
    panic!("shooting oracle did not settle");
}

/// Nodeless solution y with y(R) = 0 for the potential -Z/r + c H(r).
fn ground_state(z: f64, t: f64, r: &[f64], hartree: &[f64], c: f64) -> (f64, Vec<f64>) {
    let (mut lo, mut hi) = (
        -z * z / t - 10.0,
        c * hartree.iter().fold(0.0f64, |m, v| m.max(*v)) + 10.0,
    );
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let (nodes, _) = integrate(z, t, r, hartree, c, mid);
        if nodes > 0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < 1e-14 {
            break;
        }
    }
    let lam = 0.5 * (lo + hi);
    let (_, mut y) = integrate(z, t, r, hartree, c, lo);
    // cut the diverging tail where |y| starts to grow again
    let imin = (1..y.len())
        .min_by(|&a, &b| y[a].abs().partial_cmp(&y[b].abs()).unwrap())
        .unwrap();
    for v in y.iter_mut().skip(imin) {
        *v = 0.0;
    }
    let h = r[1] - r[0];
    let norm: f64 = 4.0 * PI * h * y.iter().map(|v| v * v).sum::<f64>();
    y.iter_mut().for_each(|v| *v /= norm.sqrt());
    (lam, y)
}

/// Numerov integration of y'' = g y, g = (-Z/r + c H - lambda) / t, from y(0) = 0;
/// returns the number of sign changes and y.
fn integrate(z: f64, t: f64, r: &[f64], hartree: &[f64], c: f64, lambda: f64) -> (usize, Vec<f64>) {
    let n = r.len();
    let h = r[1] - r[0];
    let g = |i: usize| (-z / r[i] + c * hartree[i] - lambda) / t;
    let mut y = vec![0.0; n];
    // series y = r (1 + a1 r + a2 r^2) of the regular solution
    let a1 = -z / (2.0 * t);
    let a2 = (-z * a1 + c * hartree[0] - lambda) / (6.0 * t);
    y[1] = h + a1 * h * h + a2 * h * h * h;
    let k = h * h / 12.0;
    let mut nodes = 0;
    for i in 1..n - 1 {
        // (g y) at the origin is the limit -Z y'(0) / t
        let prev = if i == 1 {
            -(k * (-z / t))
        } else {
            y[i - 1] * (1.0 - k * g(i - 1))
        };
        y[i + 1] = (2.0 * y[i] * (1.0 + 5.0 * k * g(i)) - prev) / (1.0 - k * g(i + 1));
        if y[i + 1].signum() != y[i].signum() && y[i + 1] != 0.0 {
            nodes += 1;
            break;
        }
        if y[i + 1].abs() > 1e200 {
            break;
        }
    }
    (nodes, y)
}

/// Shell-theorem potential of rho = (y/r)^2 with 4 pi int y^2 = 1.
fn hartree_from(r: &[f64], y: &[f64]) -> Vec<f64> {
    let n = r.len();
    let h = r[1] - r[0];
    let dens: Vec<f64> = y.iter().map(|v| 4.0 * PI * v * v).collect();
    // inner[i] = int_0^r 4 pi y^2, outer[i] = int_r^R 4 pi y^2 / s (trapezoid)
    let mut inner = vec![0.0; n];
    for i in 1..n {
        inner[i] = inner[i - 1] + 0.5 * h * (dens[i - 1] + dens[i]);
    }
    let over_r = |i: usize| if i == 0 { 0.0 } else { dens[i] / r[i] };
    let mut outer = vec![0.0; n];
    for i in (0..n - 1).rev() {
        outer[i] = outer[i + 1] + 0.5 * h * (over_r(i) + over_r(i + 1));
    }
    (0..n)
        .map(|i| {
            if i == 0 {
                outer[0]
            } else {
                inner[i] / r[i] + outer[i]
            }
        })
        .collect()
}
