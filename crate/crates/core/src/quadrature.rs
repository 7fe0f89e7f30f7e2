//! Gauss rules, Lagrange interpolation on Lobatto nodes and compensated sums.

use std::f64::consts::PI;

/// Legendre polynomial P_n and its derivative at `x`.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = if (1.0 - x * x).abs() < 1e-300 {
        // endpoint derivative: P_n'(±1) = (±1)^{n-1} n(n+1)/2
        let s = if x > 0.0 || n % 2 == 1 { 1.0 } else { -1.0 };
        s * (n * (n + 1)) as f64 / 2.0
    } else {
        n as f64 * (x * p1 - p0) / (x * x - 1.0)
    };
    (p1, dp)
}

/// Gauss-Legendre rule with `n` points on [-1, 1], nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, z);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, z);
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Gauss-Lobatto-Legendre nodes (n >= 2 points, endpoints included) and weights.
pub fn gauss_lobatto(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2);
    let m = n - 1;
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    x[0] = -1.0;
    x[m] = 1.0;
    let wend = 2.0 / (m * n) as f64;
    w[0] = wend;
    w[m] = wend;
    // interior nodes are roots of P_m'
    for i in 1..m {
        let mut z = -(PI * i as f64 / m as f64).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(m, z);
            // P_m'' from the Legendre ODE
            let d2p = (2.0 * z * dp - (m * (m + 1)) as f64 * p) / (1.0 - z * z);
            let dz = dp / d2p;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (p, _) = legendre(m, z);
        x[i] = z;
        w[i] = 2.0 / ((m * n) as f64 * p * p);
    }
    (x, w)
}

/// Lagrange basis on a fixed node set, evaluated through barycentric weights.
#[derive(Debug, Clone)]
pub struct LagrangeBasis {
    nodes: Vec<f64>,
    bary: Vec<f64>,
}

impl LagrangeBasis {
    pub fn new(nodes: Vec<f64>) -> Self {
        let n = nodes.len();
        let bary = (0..n)
            .map(|j| {
                let prod: f64 = (0..n)
                    .filter(|&k| k != j)
                    .map(|k| nodes[j] - nodes[k])
                    .product();
                1.0 / prod
            })
            .collect();
        Self { nodes, bary }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Values of every basis polynomial at `x`.
    pub fn values(&self, x: f64, out: &mut [f64]) {
        let n = self.nodes.len();
        if let Some(j) = self.nodes.iter().position(|&xj| xj == x) {
            out[..n].fill(0.0);
            out[j] = 1.0;
            return;
        }
        let mut s = 0.0;
        for j in 0..n {
            let t = self.bary[j] / (x - self.nodes[j]);
            out[j] = t;
            s += t;
        }
        for v in out[..n].iter_mut() {
            *v /= s;
        }
    }

    /// Values and first derivatives of every basis polynomial at `x`.
    pub fn values_and_derivatives(&self, x: f64, val: &mut [f64], der: &mut [f64]) {
        let n = self.nodes.len();
        // product form: l_j(x) = w_j prod_{k != j}(x - x_k); derivative by the
        // log-derivative sum, stable at and away from nodes.
        for j in 0..n {
            let mut p = self.bary[j];
            let mut d = 0.0;
            for k in 0..n {
                if k == j {
                    continue;
                }
                let f = x - self.nodes[k];
                d = d * f + p;
                p *= f;
            }
            val[j] = p;
            der[j] = d;
        }
    }
}

/// Neumaier compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl std::iter::FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}
