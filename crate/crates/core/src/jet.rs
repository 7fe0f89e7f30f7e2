//! Truncated Taylor series arithmetic for exact-order derivatives of closed forms.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Taylor coefficients c_m = f^{(m)}(x0)/m! up to a fixed order.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet(pub Vec<f64>);

impl Jet {
    /// The independent variable x0 + h.
    pub fn var(x0: f64, order: usize) -> Self {
        let mut c = vec![0.0; order + 1];
        c[0] = x0;
        if order > 0 {
            c[1] = 1.0;
        }
        Jet(c)
    }

    pub fn constant(v: f64, order: usize) -> Self {
        let mut c = vec![0.0; order + 1];
        c[0] = v;
        Jet(c)
    }

    pub fn order(&self) -> usize {
        self.0.len() - 1
    }

    /// Derivatives f^{(m)}(x0) for m = 0..=order.
    pub fn derivatives(&self) -> Vec<f64> {
        let mut fact = 1.0;
        self.0
            .iter()
            .enumerate()
            .map(|(m, c)| {
                if m > 0 {
                    fact *= m as f64;
                }
                c * fact
            })
            .collect()
    }

    pub fn scale(&self, s: f64) -> Jet {
        Jet(self.0.iter().map(|c| c * s).collect())
    }

    pub fn exp(&self) -> Jet {
        let a = &self.0;
        let n = a.len();
        let mut b = vec![0.0; n];
        b[0] = a[0].exp();
        for m in 1..n {
            let s: f64 = (1..=m).map(|k| k as f64 * a[k] * b[m - k]).sum();
            b[m] = s / m as f64;
        }
        Jet(b)
    }

    pub fn ln(&self) -> Jet {
        let a = &self.0;
        let n = a.len();
        let mut b = vec![0.0; n];
        b[0] = a[0].ln();
        for m in 1..n {
            let s: f64 = (1..m).map(|k| k as f64 * b[k] * a[m - k]).sum();
            b[m] = (a[m] - s / m as f64) / a[0];
        }
        Jet(b)
    }

    /// self^s for a positive leading coefficient.
    pub fn powf(&self, s: f64) -> Jet {
        let a = &self.0;
        let n = a.len();
        let mut b = vec![0.0; n];
        b[0] = a[0].powf(s);
        for m in 1..n {
            let acc: f64 = (1..=m)
                .map(|k| (s * k as f64 - (m - k) as f64) * a[k] * b[m - k])
                .sum();
            b[m] = acc / (m as f64 * a[0]);
        }
        Jet(b)
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, o: &Jet) -> Jet {
        Jet(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, o: &Jet) -> Jet {
        Jet(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, o: &Jet) -> Jet {
        let n = self.0.len();
        let mut c = vec![0.0; n];
        for i in 0..n {
            for j in 0..n - i {
                c[i + j] += self.0[i] * o.0[j];
            }
        }
        Jet(c)
    }
}

impl Div for &Jet {
    type Output = Jet;
    fn div(self, o: &Jet) -> Jet {
        let (a, b) = (&self.0, &o.0);
        let n = a.len();
        let mut c = vec![0.0; n];
        for m in 0..n {
            let s: f64 = (0..m).map(|k| c[k] * b[m - k]).sum();
            c[m] = (a[m] - s) / b[0];
        }
        Jet(c)
    }
}
