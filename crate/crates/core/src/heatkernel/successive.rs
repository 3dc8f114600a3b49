//! Successive approximation `p = H − H♯R + H♯R♯R − …` for zonal sphere
//! kernels, with `R = (∂_t − ½Δ)H`.
//!
//! The second correction needs `R♯R`, which is tabulated once per kernel in
//! the Gaussian-envelope form `(R♯R)(s,δ) / G(s,δ)` on a grid uniform in
//! `(√s, δ)`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use super::parametrix::Parametrix;
use super::sharp::ZonalRule;
use crate::exec::Exec;

const ENVELOPE_FLOOR: f64 = 600.0;

#[derive(Debug)]
struct EnvelopeTable {
    t_max: f64,
    ns: usize,
    nd: usize,
    w: Vec<f64>,
}

fn envelope(s: f64, d: f64) -> f64 {
    (-d * d / (2.0 * s)).exp() / (2.0 * PI * s)
}

impl EnvelopeTable {
    fn build(
        param: &Parametrix,
        rule: &ZonalRule,
        t_max: f64,
        ns: usize,
        nd: usize,
        exec: Exec,
    ) -> Self {
        let r = |s: f64, d: f64| param.zonal_residual(s, d);
        let cells = exec.map((ns + 1) * (nd + 1), |idx| {
            let (i, j) = (idx / (nd + 1), idx % (nd + 1));
            if i == 0 {
                return 0.0;
            }
            let s = t_max * (i as f64 / ns as f64).powi(2);
            let d = PI * j as f64 / nd as f64;
            if d * d / (2.0 * s) > ENVELOPE_FLOOR {
                return 0.0;
            }
            rule.convolve(&r, &r, s, d) / envelope(s, d)
        });
        EnvelopeTable {
            t_max,
            ns,
            nd,
            w: cells,
        }
    }

    fn eval(&self, s: f64, d: f64) -> f64 {
        if s <= 0.0 || d * d / (2.0 * s) > ENVELOPE_FLOOR {
            return 0.0;
        }
        let x = ((s / self.t_max).sqrt() * self.ns as f64).min(self.ns as f64);
        let y = (d / PI * self.nd as f64).clamp(0.0, self.nd as f64);
        let i = (x.floor() as usize).min(self.ns - 1);
        let j = (y.floor() as usize).min(self.nd - 1);
        let (fx, fy) = (x - i as f64, y - j as f64);
        let at = |a: usize, b: usize| self.w[a * (self.nd + 1) + b];
        let w = at(i, j) * (1.0 - fx) * (1.0 - fy)
            + at(i + 1, j) * fx * (1.0 - fy)
            + at(i, j + 1) * (1.0 - fx) * fy
            + at(i + 1, j + 1) * fx * fy;
        w * envelope(s, d)
    }
}

/// Successive approximation of the unit-sphere kernel as a function of
/// `(t, d)`.
#[derive(Debug)]
pub struct ZonalSeries {
    param: Parametrix,
    depth: usize,
    rule: ZonalRule,
    horizon: f64,
    exec: Exec,
    table: OnceLock<EnvelopeTable>,
}

impl ZonalSeries {
    pub fn new(param: Parametrix, depth: usize, horizon: f64, exec: Exec) -> Self {
        ZonalSeries {
            param,
            depth,
            rule: ZonalRule::default(),
            horizon,
            exec,
            table: OnceLock::new(),
        }
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Largest unit-sphere time covered by the tabulated second correction.
    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    fn table(&self) -> &EnvelopeTable {
        self.table.get_or_init(|| {
            EnvelopeTable::build(&self.param, &self.rule, self.horizon, 16, 32, self.exec)
        })
    }

    /// Individual terms `[H, −H♯R, +H♯R♯R, …]` up to the configured depth.
    pub fn terms(&self, t: f64, d: f64) -> Vec<f64> {
        let p = &self.param;
        let mut out = vec![p.zonal(t, d)];
        if self.depth >= 1 {
            let h = |s: f64, d: f64| p.zonal(s, d);
            let r = |s: f64, d: f64| p.zonal_residual(s, d);
            out.push(-self.rule.convolve(&h, &r, t, d));
            if self.depth >= 2 && t <= self.horizon {
                let table = self.table();
                let rr = |s: f64, d: f64| table.eval(s, d);
                out.push(self.rule.convolve(&h, &rr, t, d));
            }
        }
        out
    }

    pub fn eval(&self, t: f64, d: f64) -> f64 {
        if self.depth == 0 {
            return self.param.zonal(t, d);
        }
        self.terms(t, d).iter().sum()
    }
}
