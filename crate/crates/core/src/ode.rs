//! Adaptive Dormand–Prince 5(4) integration with dense output, for the
//! two-dimensional profile systems (f, f') used by the model caps.
//!
//! The cap ODEs are started from a Taylor series at the degenerate t = 0
//! point by the caller; this solver only sees the regular part of the range.

use crate::error::{Error, Result};

pub type State = [f64; 2];

const A: [[f64; 6]; 6] = [
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

const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
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

struct Segment {
    t0: f64,
    h: f64,
    rcont: [[f64; 2]; 5],
}

/// Dense solution over [t_start, t_end]; evaluation clamps to the solved
/// range within a small slack, which callers use for reflected endpoints.
pub struct DenseSolution {
    pub t_start: f64,
    pub t_end: f64,
    segments: Vec<Segment>,
    pub n_steps: usize,
}

impl DenseSolution {
    pub fn eval(&self, t: f64) -> State {
        let t = t.clamp(self.t_start, self.t_end);
        // binary search for the segment containing t
        let mut lo = 0usize;
        let mut hi = self.segments.len() - 1;
        while lo < hi {
            let mid = (lo + hi + 1) / 2;
            if self.segments[mid].t0 <= t {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        let seg = &self.segments[lo];
        let th = ((t - seg.t0) / seg.h).clamp(0.0, 1.0);
        let th1 = 1.0 - th;
        let mut y = [0.0; 2];
        for i in 0..2 {
            let r = &seg.rcont;
            y[i] = r[0][i] + th * (r[1][i] + th1 * (r[2][i] + th * (r[3][i] + th1 * r[4][i])));
        }
        y
    }
}

#[derive(Clone, Copy)]
pub struct OdeOpts {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: f64,
    pub max_steps: usize,
}

impl Default for OdeOpts {
    fn default() -> Self {
        OdeOpts {
            rtol: 1e-11,
            atol: 1e-13,
            h_init: 1e-4,
            max_steps: 200_000,
        }
    }
}

/// Integrate y' = f(t, y) from (t0, y0) to t_end with dense output.
pub fn solve<F: Fn(f64, &State) -> State>(
    f: F,
    t0: f64,
    t_end: f64,
    y0: State,
    opts: OdeOpts,
) -> Result<DenseSolution> {
    if t_end <= t0 {
        return Err(Error::Input(format!(
            "ODE range [{t0}, {t_end}] not increasing"
        )));
    }
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    let mut h = opts.h_init.min(t_end - t0);
    let mut segments = Vec::new();
    let mut n_steps = 0usize;

    while t < t_end {
        if n_steps > opts.max_steps {
            return Err(Error::Ode(format!("step cap exceeded at t = {t}")));
        }
        if h < 1e-15 * (1.0 + t.abs()) {
            return Err(Error::Ode(format!("step underflow at t = {t}")));
        }
        h = h.min(t_end - t);

        let mut k = [[0.0f64; 2]; 7];
        k[0] = k1;
        for stage in 0..5 {
            let mut yi = y;
            for (j, kj) in k.iter().enumerate().take(stage + 1) {
                for c in 0..2 {
                    yi[c] += h * A[stage][j] * kj[c];
                }
            }
            k[stage + 1] = f(t + CS[stage] * h, &yi);
        }
        // the a7 row equals b: the last stage value is y_new (FSAL)
        let y_new = {
            let mut v = y;
            for (j, kj) in k.iter().enumerate().take(6) {
                for c in 0..2 {
                    v[c] += h * A[5][j] * kj[c];
                }
            }
            v
        };
        let k7 = f(t + h, &y_new);

        let mut err = 0.0f64;
        for c in 0..2 {
            let mut e = 0.0;
            for (j, kj) in k.iter().enumerate().take(6) {
                e += E[j] * kj[c];
            }
            e += E[6] * k7[c];
            e *= h;
            let sc = opts.atol + opts.rtol * y[c].abs().max(y_new[c].abs());
            err += (e / sc) * (e / sc);
        }
        err = (err / 2.0).sqrt();

        if err <= 1.0 {
            // accept; build dense output coefficients
            let mut rcont = [[0.0f64; 2]; 5];
            for c in 0..2 {
                let ydiff = y_new[c] - y[c];
                let bspl = h * k[0][c] - ydiff;
                rcont[0][c] = y[c];
                rcont[1][c] = ydiff;
                rcont[2][c] = bspl;
                rcont[3][c] = ydiff - h * k7[c] - bspl;
                let mut acc = 0.0;
                for (j, kj) in k.iter().enumerate().take(6) {
                    acc += D[j] * kj[c];
                }
                acc += D[6] * k7[c];
                rcont[4][c] = h * acc;
            }
            segments.push(Segment { t0: t, h, rcont });
            t += h;
            y = y_new;
            k1 = k7;
            n_steps += 1;
        }
        let fac = (0.9 * err.powf(-0.2)).clamp(0.2, 5.0);
        h *= fac;
    }

    Ok(DenseSolution {
        t_start: t0,
        t_end,
        segments,
        n_steps,
    })
}

const CS: [f64; 6] = [0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
