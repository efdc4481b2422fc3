use super::{GridError, Support};

/// Natural cubic spline through uniformly spaced samples.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicSpline {
    a: f64,
    b: f64,
    h: f64,
    y: Vec<f64>,
    m2: Vec<f64>,
}

impl CubicSpline {
    pub fn new(a: f64, b: f64, y: &[f64]) -> Self {
        let n = y.len() - 1;
        let h = (b - a) / n as f64;
        let mut m2 = vec![0.0; n + 1];
        if n >= 2 {
            // Thomas algorithm for M[i-1] + 4 M[i] + M[i+1] = 6 Δ²y / h².
            let k = n - 1;
            let mut c = vec![0.0; k];
            let mut d = vec![0.0; k];
            for i in 0..k {
                let rhs = 6.0 * (y[i] - 2.0 * y[i + 1] + y[i + 2]) / (h * h);
                let (sub, diag) = if i == 0 {
                    (0.0, 4.0)
                } else {
                    (1.0, 4.0 - c[i - 1])
                };
                c[i] = 1.0 / diag;
                d[i] = (rhs - sub * if i == 0 { 0.0 } else { d[i - 1] }) / diag;
            }
            m2[k] = d[k - 1];
            for i in (1..k).rev() {
                m2[i] = d[i - 1] - c[i - 1] * m2[i + 1];
            }
        }
        CubicSpline {
            a,
            b,
            h,
            y: y.to_vec(),
            m2,
        }
    }

    pub fn second_derivatives(&self) -> &[f64] {
        &self.m2
    }

    fn cells(&self) -> usize {
        self.y.len() - 1
    }

    /// Cell index and offset `t − t_i` for `t` in `[a, b]`.
    fn locate(&self, t: f64) -> (usize, f64) {
        let p = (t - self.a) / self.h;
        let i = (p.floor().max(0.0) as usize).min(self.cells() - 1);
        (i, (p - i as f64) * self.h)
    }

    /// A point within rounding of `[a, b]` counts as inside.
    fn inside(&self, t: f64) -> bool {
        let slack = 1e-12 * (self.b - self.a);
        t >= self.a - slack && t <= self.b + slack
    }

    /// Value at `t` in `[a, b]`; nodes return their sample exactly.
    pub fn eval(&self, t: f64) -> Result<f64, GridError> {
        if !self.inside(t) {
            return Err(GridError::DomainError { t });
        }
        let (i, dx) = self.locate(t);
        Ok(self.piece(i, dx))
    }

    /// Value at `t_j + s`: exact sample when `s = 0`.
    pub fn eval_near(&self, j: usize, s: f64, support: Support) -> Result<f64, GridError> {
        if s == 0.0 {
            return Ok(self.y[j]);
        }
        let t = self.a + j as f64 * self.h + s;
        self.eval_ext(t, support)
    }

    /// [`eval`](Self::eval) with zero extension for compact support.
    pub fn eval_ext(&self, t: f64, support: Support) -> Result<f64, GridError> {
        match support {
            Support::Compact if !self.inside(t) => Ok(0.0),
            _ => self.eval(t),
        }
    }

    pub fn deriv(&self, t: f64) -> Result<f64, GridError> {
        if !self.inside(t) {
            return Err(GridError::DomainError { t });
        }
        let (i, dx) = self.locate(t);
        let (h, mi, mj) = (self.h, self.m2[i], self.m2[i + 1]);
        let rx = h - dx;
        Ok(
            -mi * rx * rx / (2.0 * h) + mj * dx * dx / (2.0 * h) + (self.y[i + 1] - self.y[i]) / h
                - (mj - mi) * h / 6.0,
        )
    }

    fn piece(&self, i: usize, dx: f64) -> f64 {
        if dx == 0.0 {
            return self.y[i];
        }
        let (h, mi, mj) = (self.h, self.m2[i], self.m2[i + 1]);
        let rx = h - dx;
        if rx == 0.0 {
            return self.y[i + 1];
        }
        mi * rx.powi(3) / (6.0 * h)
            + mj * dx.powi(3) / (6.0 * h)
            + (self.y[i] - mi * h * h / 6.0) * rx / h
            + (self.y[i + 1] - mj * h * h / 6.0) * dx / h
    }
}
