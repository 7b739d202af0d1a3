//! Dominating functions on logarithmic grids.
//!
//! The minimal dominating function for the resolvent,
//!     m(s) = sup { ||R(ir, A)|| : s <= |r| <= 1 },
//! and the one for the semigroup,
//!     omega(t) = sup { ||T(s) A R(1,A)|| : s >= t },
//! are realised as sampled monotone functions with log-log piecewise-linear
//! interpolation, which reproduces power laws exactly. Suprema over a
//! continuum are captured on a grid augmented with the eigenvalue imaginary
//! parts, where the resolvent spikes actually sit; a uniform grid provably
//! misses those spikes for clustered spectra.

use crate::error::{Error, Result};
use crate::operators::{OperatorModel, SPECTRUM_TOL};
use std::io::Write;

/// Values are floored here so that identically-zero observables (e.g. the
/// generator {0}) still fit the positive-valued log-log representation.
pub const VALUE_FLOOR: f64 = 1e-300;

/// Abscissa slot that carries the t = 0 sample of omega; the log-log
/// representation cannot hold 0 itself.
const ZERO_TIME_SLOT: f64 = 1e-9;

/// Spectral-abscissa level below which a matrix semigroup is treated as
/// uniformly exponentially stable for tail-bounding purposes.
const STABLE_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Nonincreasing,
    Nondecreasing,
}

/// A weakly monotone function sampled on a strictly increasing positive
/// grid, interpolated piecewise-linearly in (log x, log f(x)) and extended
/// by its endpoint values outside the sampled range.
#[derive(Debug, Clone)]
pub struct SampledMonotoneFunction {
    abscissae: Vec<f64>,
    values: Vec<f64>,
    direction: Direction,
}

impl SampledMonotoneFunction {
    pub fn new(abscissae: Vec<f64>, values: Vec<f64>, direction: Direction) -> Result<Self> {
        if abscissae.len() != values.len() {
            return Err(Error::InvalidFunction(format!(
                "{} abscissae vs {} values",
                abscissae.len(),
                values.len()
            )));
        }
        if abscissae.len() < 2 {
            return Err(Error::InvalidFunction("need at least 2 sample points".into()));
        }
        for w in abscissae.windows(2) {
            if !(w[0] > 0.0) || !(w[1] > w[0]) {
                return Err(Error::InvalidFunction(
                    "abscissae must be strictly increasing and positive".into(),
                ));
            }
        }
        for pair in values.windows(2) {
            let ok = match direction {
                Direction::Nonincreasing => pair[1] <= pair[0],
                Direction::Nondecreasing => pair[1] >= pair[0],
            };
            if !ok {
                return Err(Error::InvalidFunction(format!(
                    "values violate declared monotonicity: {} then {}",
                    pair[0], pair[1]
                )));
            }
        }
        if values.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
            return Err(Error::InvalidFunction(
                "values must be strictly positive and finite".into(),
            ));
        }
        Ok(Self {
            abscissae,
            values,
            direction,
        })
    }

    pub fn abscissae(&self) -> &[f64] {
        &self.abscissae
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn min_value(&self) -> f64 {
        match self.direction {
            Direction::Nonincreasing => *self.values.last().unwrap(),
            Direction::Nondecreasing => self.values[0],
        }
    }

    pub fn max_value(&self) -> f64 {
        match self.direction {
            Direction::Nonincreasing => self.values[0],
            Direction::Nondecreasing => *self.values.last().unwrap(),
        }
    }

    /// Interpolated evaluation; constant extension outside the range.
    pub fn eval(&self, x: f64) -> f64 {
        let a = &self.abscissae;
        if x <= a[0] {
            return self.values[0];
        }
        if x >= *a.last().unwrap() {
            return *self.values.last().unwrap();
        }
        let i = a.partition_point(|&t| t < x);
        // a[i-1] < x <= a[i] with 1 <= i < len
        if a[i] == x {
            return self.values[i];
        }
        interp_loglog(a[i - 1], self.values[i - 1], a[i], self.values[i], x)
    }

    /// Right-inverse of a nonincreasing function: the largest sampled or
    /// interpolated s with f(s) = y. On plateaus the largest abscissa wins,
    /// so a constant function maps its value to the final sample point.
    pub fn right_inverse(&self, y: f64) -> Result<f64> {
        if self.direction != Direction::Nonincreasing {
            return Err(Error::InvalidFunction(
                "right_inverse requires a nonincreasing function".into(),
            ));
        }
        let lo = self.min_value();
        let hi = self.max_value();
        if !(y >= lo && y <= hi) {
            return Err(Error::OutOfRange { y, lo, hi });
        }
        let n = self.values.len();
        // Scan segments from the right so ties resolve to the largest s.
        if y <= self.values[n - 1] {
            return Ok(self.abscissae[n - 1]);
        }
        for i in (0..n - 1).rev() {
            let (v_l, v_r) = (self.values[i], self.values[i + 1]);
            if y > v_l {
                continue;
            }
            // v_r < y <= v_l on a nonincreasing segment
            if y == v_l {
                return Ok(self.abscissae[i]);
            }
            return Ok(invert_loglog(
                self.abscissae[i],
                v_l,
                self.abscissae[i + 1],
                v_r,
                y,
            ));
        }
        Ok(self.abscissae[0])
    }

    /// omega*(s) = min { t >= 0 : omega(t) <= s } for nonincreasing omega.
    /// Levels at or above the first sample report t = 0: the function is
    /// conceptually defined on all of [0, infinity) and its largest value
    /// is already attained at the origin.
    pub fn omega_star(&self, s: f64) -> Result<f64> {
        if self.direction != Direction::Nonincreasing {
            return Err(Error::InvalidFunction(
                "omega_star requires a nonincreasing function".into(),
            ));
        }
        if s >= self.values[0] {
            return Ok(0.0);
        }
        if s < self.min_value() {
            return Err(Error::NotAttained { s });
        }
        // First index where the value drops to s or below; plateaus
        // resolve to the smallest admissible t.
        let idx = self.values.partition_point(|&v| v > s);
        debug_assert!(idx > 0 && idx < self.values.len());
        let (v_l, v_r) = (self.values[idx - 1], self.values[idx]);
        if v_r == s || v_l == v_r {
            return Ok(self.abscissae[idx]);
        }
        Ok(invert_loglog(
            self.abscissae[idx - 1],
            v_l,
            self.abscissae[idx],
            v_r,
            s,
        ))
    }

    /// CSV dump: `abscissa,value` header then one row per sample at full
    /// (17 significant digit) precision.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "abscissa,value")?;
        for (a, v) in self.abscissae.iter().zip(&self.values) {
            writeln!(w, "{},{}", fmt_g17(*a), fmt_g17(*v))?;
        }
        Ok(())
    }
}

/// 17-significant-digit scientific formatting used by every CSV writer.
pub fn fmt_g17(x: f64) -> String {
    format!("{x:.16e}")
}

fn interp_loglog(x0: f64, y0: f64, x1: f64, y1: f64, x: f64) -> f64 {
    let t = (x.ln() - x0.ln()) / (x1.ln() - x0.ln());
    (y0.ln() * (1.0 - t) + y1.ln() * t).exp()
}

fn invert_loglog(x0: f64, y0: f64, x1: f64, y1: f64, y: f64) -> f64 {
    let t = (y.ln() - y0.ln()) / (y1.ln() - y0.ln());
    (x0.ln() * (1.0 - t) + x1.ln() * t).exp()
}

/// Logarithmic frequency grid on [lo, hi] with `points_per_decade` nodes
/// per decade on the 10^{k/ppd} lattice, plus injected candidates at which
/// suprema must also be evaluated.
#[derive(Debug, Clone)]
pub struct FrequencyGrid {
    lo: f64,
    hi: f64,
    points_per_decade: u32,
    extra_candidates: Vec<f64>,
}

impl FrequencyGrid {
    pub fn new(lo: f64, hi: f64, points_per_decade: u32) -> Result<Self> {
        if !(lo > 1e-13) || !(hi > lo) || !hi.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "need 1e-13 < lo < hi, got [{lo}, {hi}]"
            )));
        }
        if points_per_decade < 4 {
            return Err(Error::InvalidGrid(format!(
                "points_per_decade must be >= 4, got {points_per_decade}"
            )));
        }
        Ok(Self {
            lo,
            hi,
            points_per_decade,
            extra_candidates: Vec::new(),
        })
    }

    /// Inject the operator's eigenvalue imaginary parts (in magnitude,
    /// clamped to the grid window) as supremum candidates.
    pub fn with_operator_candidates(mut self, op: &OperatorModel) -> Self {
        let mut extras: Vec<f64> = op
            .eigenvalues()
            .iter()
            .map(|z| z.im.abs())
            .filter(|&a| a >= self.lo && a <= self.hi)
            .collect();
        extras.sort_by(|a, b| a.partial_cmp(b).unwrap());
        extras.dedup();
        self.extra_candidates = extras;
        self
    }

    pub fn with_extra_candidates(mut self, extras: Vec<f64>) -> Self {
        self.extra_candidates = extras;
        self
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn points_per_decade(&self) -> u32 {
        self.points_per_decade
    }

    pub fn extra_candidates(&self) -> &[f64] {
        &self.extra_candidates
    }

    /// A copy with doubled density (refinement studies).
    pub fn refined(&self) -> Self {
        Self {
            lo: self.lo,
            hi: self.hi,
            points_per_decade: self.points_per_decade * 2,
            extra_candidates: self.extra_candidates.clone(),
        }
    }

    /// Lattice points 10^{k/ppd} covering [lo, hi], endpoints included.
    pub fn points(&self) -> Vec<f64> {
        lattice_points(self.lo, self.hi, self.points_per_decade)
    }

    /// Grid points and extra candidates merged, ascending, deduplicated.
    pub fn candidates(&self) -> Vec<f64> {
        let mut all = self.points();
        all.extend_from_slice(&self.extra_candidates);
        all.sort_by(|a, b| a.partial_cmp(b).unwrap());
        all.dedup();
        all
    }
}

/// Time grid {0} followed by the 10^{k/ppd} lattice on (t_min, t_max]:
/// left-open because the t = 0 row stands in for the bottom of the window.
#[derive(Debug, Clone)]
pub struct TimeGrid {
    t_min: f64,
    t_max: f64,
    points_per_decade: u32,
}

impl TimeGrid {
    pub fn new(t_min: f64, t_max: f64, points_per_decade: u32) -> Result<Self> {
        if !(t_min > 1e-8) || !(t_max > t_min) || !t_max.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "need 1e-8 < t_min < t_max, got [{t_min}, {t_max}]"
            )));
        }
        if points_per_decade < 4 {
            return Err(Error::InvalidGrid(format!(
                "points_per_decade must be >= 4, got {points_per_decade}"
            )));
        }
        Ok(Self {
            t_min,
            t_max,
            points_per_decade,
        })
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn t_min(&self) -> f64 {
        self.t_min
    }

    pub fn points_per_decade(&self) -> u32 {
        self.points_per_decade
    }

    pub fn refined(&self) -> Self {
        Self {
            t_min: self.t_min,
            t_max: self.t_max,
            points_per_decade: self.points_per_decade * 2,
        }
    }

    /// All sample times including the leading 0.
    pub fn ts(&self) -> Vec<f64> {
        let mut out = vec![0.0];
        let lattice = lattice_points(self.t_min, self.t_max, self.points_per_decade);
        out.extend(lattice.into_iter().skip(1));
        out
    }
}

fn lattice_points(lo: f64, hi: f64, ppd: u32) -> Vec<f64> {
    let k_lo = (ppd as f64 * lo.log10()).round() as i64;
    let k_hi = (ppd as f64 * hi.log10()).round() as i64;
    (k_lo..=k_hi)
        .map(|k| 10f64.powf(k as f64 / ppd as f64))
        .collect()
}

/// Minimal dominating function for the resolvent,
/// m(s) = sup { max(||R(ir)||, ||R(-ir)||) : s <= r <= hi }, sampled at the
/// grid abscissae with the injected candidates participating in every sup.
pub fn minimal_m(op: &OperatorModel, grid: &FrequencyGrid) -> Result<SampledMonotoneFunction> {
    if (grid.hi - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidGrid(format!(
            "minimal_m is defined on the unit window (0, 1]; grid ends at {}",
            grid.hi
        )));
    }
    // A nonzero eigenvalue on the axis inside the window makes m infinite.
    for z in op.eigenvalues() {
        if z.norm() > SPECTRUM_TOL && z.re.abs() <= SPECTRUM_TOL && z.im.abs() <= 1.0 {
            return Err(Error::SpectrumInWindow { re: z.re, im: z.im });
        }
    }
    let abscissae = grid.points();
    let candidates = grid.candidates();
    // Running maximum downward from hi: each abscissa's sup covers every
    // candidate at or above it.
    let mut values = vec![0.0f64; abscissae.len()];
    let mut run_max = 0.0f64;
    let mut ci = candidates.len();
    for (i, &s) in abscissae.iter().enumerate().rev() {
        while ci > 0 && candidates[ci - 1] >= s {
            let r = candidates[ci - 1];
            let v = op.resolvent_norm(r)?.max(op.resolvent_norm(-r)?);
            if v > run_max {
                run_max = v;
            }
            ci -= 1;
        }
        values[i] = run_max.max(VALUE_FLOOR);
    }
    SampledMonotoneFunction::new(abscissae, values, Direction::Nonincreasing)
}

/// Minimal dominating function for the decay observable,
/// omega(t) = sup { ||T(s) A R(1,A)|| : s >= t }: the running maximum of
/// the sampled observable from the right, closed off by a tail bound.
///
/// For diagonal models the observable is nonincreasing, so the tail beyond
/// t_max equals the final sample. For matrices the tail is bounded by
/// sup_u ||T(u)|| * kt(t_max); the propagator supremum is estimated on the
/// grid and rejected if the semigroup shows a growth trend.
pub fn minimal_omega(op: &OperatorModel, grid: &TimeGrid) -> Result<SampledMonotoneFunction> {
    let ts = grid.ts();
    let kt = op.kt_observable_sweep(&ts)?;
    let tail = match op {
        OperatorModel::Diagonal(_) => *kt.last().unwrap(),
        OperatorModel::Matrix(m) => {
            let abscissa = m.spectral_abscissa();
            if abscissa > STABLE_MARGIN {
                return Err(Error::TailUnbounded(format!(
                    "spectral abscissa {abscissa:.3e} > 0"
                )));
            }
            // sup ||T(t)|| over the grid; a growth trend between the two
            // halves means boundary modes are defective and the power
            // bound is not trustworthy.
            let props = ts
                .iter()
                .map(|&t| m.propagator_norm(t))
                .collect::<Result<Vec<_>>>()?;
            let half = props.len() / 2;
            let early = props[..half].iter().cloned().fold(0.0, f64::max);
            let late = props[half..].iter().cloned().fold(0.0, f64::max);
            if late > early.max(1.0) * (1.0 + 1e-3) {
                return Err(Error::TailUnbounded(format!(
                    "propagator norm grows across the window ({early:.3e} -> {late:.3e})"
                )));
            }
            early.max(late) * kt.last().unwrap()
        }
    };
    let mut values = vec![0.0f64; kt.len()];
    let mut run = tail;
    for (i, &v) in kt.iter().enumerate().rev() {
        run = run.max(v);
        values[i] = run.max(VALUE_FLOOR);
    }
    let mut abscissae = ts;
    abscissae[0] = ZERO_TIME_SLOT; // holds the t = 0 sample
    SampledMonotoneFunction::new(abscissae, values, Direction::Nonincreasing)
}
