//! Truncated Taylor ("jet") arithmetic along the radial coordinate.
//!
//! Every pointwise curvature quantity in this crate is an algebraic
//! expression in a warping profile and its t-derivatives. Carrying a value
//! together with its first `ord` derivatives through the arithmetic gives
//! exact derivatives of derived quantities (sectional curvatures, Ricci,
//! |z|^2, ...) with no hand-derived chain rules. Order 4 on the profile is
//! enough for the gradient of the Z^2 functional, which needs second
//! derivatives of the trace-free Ricci tensor.

/// Value plus derivatives d[1..=ord] at a point. `d[k]` is the k-th
/// t-derivative; entries past `ord` are meaningless.
#[derive(Clone, Copy, Debug)]
pub struct Jet {
    pub d: [f64; 5],
    pub ord: usize,
}

impl Jet {
    pub fn constant(v: f64, ord: usize) -> Self {
        let mut d = [0.0; 5];
        d[0] = v;
        Jet { d, ord }
    }

    /// The coordinate itself: value t, first derivative 1.
    pub fn var(t: f64, ord: usize) -> Self {
        let mut d = [0.0; 5];
        d[0] = t;
        if ord >= 1 {
            d[1] = 1.0;
        }
        Jet { d, ord }
    }

    pub fn from_derivs(d: &[f64]) -> Self {
        assert!(!d.is_empty() && d.len() <= 5);
        let mut arr = [0.0; 5];
        arr[..d.len()].copy_from_slice(d);
        Jet {
            d: arr,
            ord: d.len() - 1,
        }
    }

    pub fn value(&self) -> f64 {
        self.d[0]
    }

    pub fn deriv(&self, k: usize) -> f64 {
        assert!(k <= self.ord, "jet order {} has no derivative {}", self.ord, k);
        self.d[k]
    }

    /// Jet of the first derivative (one order lower).
    pub fn d1(&self) -> Jet {
        assert!(self.ord >= 1);
        let mut d = [0.0; 5];
        d[..self.ord].copy_from_slice(&self.d[1..=self.ord]);
        Jet {
            d,
            ord: self.ord - 1,
        }
    }

    /// Jet of the second derivative (two orders lower).
    pub fn d2(&self) -> Jet {
        self.d1().d1()
    }

    pub fn add(&self, o: &Jet) -> Jet {
        let ord = self.ord.min(o.ord);
        let mut d = [0.0; 5];
        for k in 0..=ord {
            d[k] = self.d[k] + o.d[k];
        }
        Jet { d, ord }
    }

    pub fn sub(&self, o: &Jet) -> Jet {
        let ord = self.ord.min(o.ord);
        let mut d = [0.0; 5];
        for k in 0..=ord {
            d[k] = self.d[k] - o.d[k];
        }
        Jet { d, ord }
    }

    pub fn scale(&self, c: f64) -> Jet {
        let mut d = [0.0; 5];
        for k in 0..=self.ord {
            d[k] = c * self.d[k];
        }
        Jet { d, ord: self.ord }
    }

    pub fn mul(&self, o: &Jet) -> Jet {
        let ord = self.ord.min(o.ord);
        let mut d = [0.0; 5];
        for k in 0..=ord {
            let mut acc = 0.0;
            for i in 0..=k {
                acc += BINOM[k][i] * self.d[i] * o.d[k - i];
            }
            d[k] = acc;
        }
        Jet { d, ord }
    }

    pub fn div(&self, o: &Jet) -> Jet {
        let ord = self.ord.min(o.ord);
        let mut q = [0.0; 5];
        for k in 0..=ord {
            let mut acc = self.d[k];
            for i in 1..=k {
                acc -= BINOM[k][i] * o.d[i] * q[k - i];
            }
            q[k] = acc / o.d[0];
        }
        Jet { d: q, ord }
    }

    pub fn sq(&self) -> Jet {
        self.mul(self)
    }

    pub fn sqrt(&self) -> Jet {
        let mut s = [0.0; 5];
        s[0] = self.d[0].sqrt();
        for k in 1..=self.ord {
            // (s*s)^(k) = f^(k)  =>  2 s0 s_k = f_k - sum_{i=1..k-1} C(k,i) s_i s_{k-i}
            let mut acc = self.d[k];
            for i in 1..k {
                acc -= BINOM[k][i] * s[i] * s[k - i];
            }
            s[k] = acc / (2.0 * s[0]);
        }
        Jet {
            d: s,
            ord: self.ord,
        }
    }

    pub fn recip(&self) -> Jet {
        Jet::constant(1.0, self.ord).div(self)
    }
}

/// Binomial coefficients up to C(4, k).
const BINOM: [[f64; 5]; 5] = [
    [1.0, 0.0, 0.0, 0.0, 0.0],
    [1.0, 1.0, 0.0, 0.0, 0.0],
    [1.0, 2.0, 1.0, 0.0, 0.0],
    [1.0, 3.0, 3.0, 1.0, 0.0],
    [1.0, 4.0, 6.0, 4.0, 1.0],
];

/// Jet of sin(t) at t to order `ord`.
pub fn jet_sin(t: f64, ord: usize) -> Jet {
    let (s, c) = t.sin_cos();
    Jet::from_derivs(&[s, c, -s, -c, s][..=ord])
}

/// Jet of sinh(t).
pub fn jet_sinh(t: f64, ord: usize) -> Jet {
    let (s, c) = (t.sinh(), t.cosh());
    Jet::from_derivs(&[s, c, s, c, s][..=ord])
}

/// Jet of cosh(t).
pub fn jet_cosh(t: f64, ord: usize) -> Jet {
    let (s, c) = (t.sinh(), t.cosh());
    Jet::from_derivs(&[c, s, c, s, c][..=ord])
}

/// Jet of t^a (real exponent, t > 0).
pub fn jet_pow(t: f64, a: f64, ord: usize) -> Jet {
    let mut d = [0.0; 5];
    let mut coef = 1.0;
    for (k, slot) in d.iter_mut().enumerate().take(ord + 1) {
        *slot = coef * t.powf(a - k as f64);
        coef *= a - k as f64;
    }
    Jet { d, ord }
}
