//! Truncated Taylor series arithmetic (forward-mode jets).

use num_complex::Complex64 as C64;

/// Taylor coefficients c_k = f^{(k)}(x0)/k!, k = 0..len.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet(pub Vec<C64>);

impl Jet {
    pub fn constant(v: C64, len: usize) -> Self {
        let mut c = vec![C64::new(0.0, 0.0); len];
        c[0] = v;
        Jet(c)
    }

    pub fn variable(v: f64, len: usize) -> Self {
        let mut j = Self::constant(C64::new(v, 0.0), len);
        if len > 1 {
            j.0[1] = C64::new(1.0, 0.0);
        }
        j
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn value(&self) -> C64 {
        self.0[0]
    }

    /// k-th derivative at the expansion point.
    pub fn derivative(&self, k: usize) -> C64 {
        self.0[k] * crate::special::factorial(k)
    }

    pub fn add(&self, o: &Jet) -> Jet {
        Jet(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, o: &Jet) -> Jet {
        Jet(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> Jet {
        Jet(self.0.iter().map(|a| -a).collect())
    }

    pub fn scale(&self, s: C64) -> Jet {
        Jet(self.0.iter().map(|a| a * s).collect())
    }

    pub fn mul(&self, o: &Jet) -> Jet {
        let n = self.len();
        let mut c = vec![C64::new(0.0, 0.0); n];
        for i in 0..n {
            for j in 0..n - i {
                c[i + j] += self.0[i] * o.0[j];
            }
        }
        Jet(c)
    }

    pub fn div(&self, o: &Jet) -> Jet {
        let n = self.len();
        let mut q = vec![C64::new(0.0, 0.0); n];
        for k in 0..n {
            let mut acc = self.0[k];
            for j in 0..k {
                acc -= q[j] * o.0[k - j];
            }
            q[k] = acc / o.0[0];
        }
        Jet(q)
    }

    /// Principal logarithm at the expansion point.
    pub fn ln(&self) -> Jet {
        let n = self.len();
        let a = &self.0;
        let mut l = vec![C64::new(0.0, 0.0); n];
        l[0] = a[0].ln();
        for k in 1..n {
            let mut acc = a[k];
            for j in 1..k {
                acc -= l[j] * a[k - j] * (j as f64 / k as f64);
            }
            l[k] = acc / a[0];
        }
        Jet(l)
    }

    pub fn exp(&self) -> Jet {
        let n = self.len();
        let a = &self.0;
        let mut e = vec![C64::new(0.0, 0.0); n];
        e[0] = a[0].exp();
        for k in 1..n {
            let mut acc = C64::new(0.0, 0.0);
            for j in 1..=k {
                acc += a[j] * e[k - j] * (j as f64 / k as f64);
            }
            e[k] = acc;
        }
        Jet(e)
    }

    /// Principal power self^e.
    pub fn pow(&self, e: &Jet) -> Jet {
        e.mul(&self.ln()).exp()
    }
}
