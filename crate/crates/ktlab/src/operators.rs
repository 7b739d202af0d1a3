//! Semigroup generators and their operator norms.
//!
//! Two exactly solvable families are provided. A [`DiagonalOperator`] is a
//! normal generator given by an explicit eigenvalue family in the closed
//! left half-plane; every operator norm is an exact supremum over the
//! eigenvalues, so truncations of genuinely infinite-dimensional examples
//! can be pushed to 10^6 modes and beyond. A [`MatrixOperator`] is a dense
//! complex matrix; norms go through singular values and the semigroup
//! through the matrix exponential, which exercises the non-normal machinery
//! (transient growth, Jordan structure).
//!
//! The decay observable ||T(t) A R(1,A)|| is the quantity all rate checks
//! revolve around; it equals ||T(t) mu_hat(T)|| for mu = e - delta_0.

use crate::error::{Error, Result};
use crate::linalg::{self, C64, CMatrix};
use crate::measures::BoundedMeasure;

/// Queries closer to the spectrum than this are rejected: below it the
/// 1/distance formula is numerically meaningless.
pub const SPECTRUM_TOL: f64 = 1e-14;

/// Spectral-abscissa slack accepted by the `bounded` matrix constructor.
pub const ABSCISSA_TOL: f64 = 1e-9;

/// Normal generator with an explicit eigenvalue family, Re lambda <= 0.
#[derive(Debug, Clone)]
pub struct DiagonalOperator {
    /// Deduplicated, sorted by (Im, Re) ascending.
    eigenvalues: Vec<C64>,
    label: String,
    max_re: f64,
    /// (coefficient, Re lambda) with coefficient = |lambda / (1 - lambda)|,
    /// sorted by coefficient descending. The supremum sweep walks this list
    /// and stops as soon as the remaining coefficients cannot win.
    kt_pairs: Vec<(f64, f64)>,
}

impl DiagonalOperator {
    pub fn new(eigenvalues: Vec<C64>, label: impl Into<String>) -> Result<Self> {
        if eigenvalues.is_empty() {
            return Err(Error::InvalidOperator("empty eigenvalue list".into()));
        }
        for z in &eigenvalues {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::InvalidOperator("non-finite eigenvalue".into()));
            }
            if z.re > 0.0 {
                return Err(Error::InvalidOperator(format!(
                    "eigenvalue {z} has positive real part; only bounded semigroups are modelled"
                )));
            }
        }
        let mut eigs = eigenvalues;
        eigs.sort_by(|a, b| (a.im, a.re).partial_cmp(&(b.im, b.re)).unwrap());
        eigs.dedup();
        let max_re = eigs.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
        let kt_pairs = decay_pairs(eigs.iter().map(|&z| (kt_coefficient(z), z.re)));
        Ok(Self {
            eigenvalues: eigs,
            label: label.into(),
            max_re,
            kt_pairs,
        })
    }

    /// Polynomial profile: lambda_k = -k^{-alpha} + i k^{-1}, k = 1..n,
    /// optionally with the eigenvalue 0 adjoined. The minimal dominating
    /// function of this family grows like s^{-alpha} and the decay
    /// observable falls off like t^{-1/alpha}.
    pub fn polynomial_profile(alpha: f64, n: usize, adjoin_zero: bool) -> Result<Self> {
        if !(alpha >= 1.0) || n == 0 {
            return Err(Error::InvalidOperator(format!(
                "polynomial profile needs alpha >= 1 and n >= 1, got alpha={alpha}, n={n}"
            )));
        }
        let mut eigs = Vec::with_capacity(n + 1);
        if adjoin_zero {
            eigs.push(C64::new(0.0, 0.0));
        }
        for k in 1..=n {
            let kf = k as f64;
            eigs.push(C64::new(-kf.powf(-alpha), 1.0 / kf));
        }
        Self::new(
            eigs,
            format!("polynomial(alpha={alpha}, n={n}, adjoin_zero={adjoin_zero})"),
        )
    }

    /// Exponential profile: lambda_k = -e^{-k} + i/k, k = 1..n. The
    /// resolvent spikes like e^{1/s}, so the decay observable is only
    /// logarithmic in t. n is capped at 32: beyond that the real parts
    /// sink under the on-spectrum tolerance and the minimal dominating
    /// function is no longer finite at working precision.
    pub fn exponential_profile(n: usize) -> Result<Self> {
        if n == 0 || n > 32 {
            return Err(Error::InvalidOperator(format!(
                "exponential profile needs 1 <= n <= 32, got {n}"
            )));
        }
        let eigs = (1..=n)
            .map(|k| C64::new(-(-(k as f64)).exp(), 1.0 / k as f64))
            .collect();
        Self::new(eigs, format!("exponential(n={n})"))
    }

    /// Lacunary profile: the eigenvalue 0 together with
    /// lambda_j = -10^{-2j} + i/j, j = 1..levels. The decay observable
    /// loses one eigenvalue plateau per two decades of t, so it decays
    /// roughly like 1/log t: the "arbitrarily slow" regime over a direct
    /// sum. levels is capped at 6 to keep all real parts above the
    /// on-spectrum tolerance.
    pub fn lacunary_profile(levels: usize) -> Result<Self> {
        if levels == 0 || levels > 6 {
            return Err(Error::InvalidOperator(format!(
                "lacunary profile needs 1 <= levels <= 6, got {levels}"
            )));
        }
        let mut eigs = vec![C64::new(0.0, 0.0)];
        eigs.extend((1..=levels).map(|j| C64::new(-10f64.powi(-2 * j as i32), 1.0 / j as f64)));
        Self::new(eigs, format!("lacunary(levels={levels})"))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Eigenvalues sorted by (Im, Re).
    pub fn eigenvalues(&self) -> &[C64] {
        &self.eigenvalues
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains_zero(&self) -> bool {
        self.eigenvalues.iter().any(|z| z.norm() <= SPECTRUM_TOL)
    }

    /// Exact distance from z to the spectrum. The list is sorted by
    /// imaginary part, so the search expands outward from the insertion
    /// point of z.im and stops once the imaginary gap alone exceeds the
    /// best distance found.
    pub fn distance_to_spectrum(&self, z: C64) -> f64 {
        let eigs = &self.eigenvalues;
        let pos = eigs.partition_point(|w| w.im < z.im);
        let mut best2 = f64::INFINITY;
        let (mut lo, mut hi) = (pos as isize - 1, pos);
        loop {
            let mut advanced = false;
            if hi < eigs.len() {
                let gap = eigs[hi].im - z.im;
                if gap * gap < best2 {
                    let d2 = (eigs[hi] - z).norm_sqr();
                    if d2 < best2 {
                        best2 = d2;
                    }
                    hi += 1;
                    advanced = true;
                }
            }
            if lo >= 0 {
                let gap = z.im - eigs[lo as usize].im;
                if gap * gap < best2 {
                    let d2 = (eigs[lo as usize] - z).norm_sqr();
                    if d2 < best2 {
                        best2 = d2;
                    }
                    lo -= 1;
                    advanced = true;
                }
            }
            if !advanced {
                break;
            }
        }
        best2.sqrt()
    }

    /// ||R(is, A)|| = 1 / dist(is, sigma(A)), exact for normal operators.
    pub fn resolvent_norm(&self, s: f64) -> Result<f64> {
        let d = self.distance_to_spectrum(C64::new(0.0, s));
        if d <= SPECTRUM_TOL {
            return Err(Error::SpectrumHit { s, dist: d });
        }
        Ok(1.0 / d)
    }

    /// ||T(t)|| = sup_k e^{t Re lambda_k} = e^{t max_k Re lambda_k}.
    pub fn propagator_norm(&self, t: f64) -> Result<f64> {
        check_time(t)?;
        Ok((t * self.max_re).exp())
    }

    /// ||T(t) A R(1,A)|| = sup_k |e^{t lambda_k} lambda_k / (1 - lambda_k)|.
    pub fn kt_observable(&self, t: f64) -> Result<f64> {
        check_time(t)?;
        Ok(sup_decay(&self.kt_pairs, t))
    }

    pub fn kt_observable_sweep(&self, ts: &[f64]) -> Result<Vec<f64>> {
        ts.iter().map(|&t| self.kt_observable(t)).collect()
    }

    /// ||T(t) mu_hat(T)|| = sup_k |e^{t lambda_k} L(mu)(-lambda_k)|.
    pub fn mu_observable(&self, mu: &BoundedMeasure, t: f64) -> Result<f64> {
        check_time(t)?;
        let pairs = self.mu_pairs(mu)?;
        Ok(sup_decay(&pairs, t))
    }

    /// Sweep version: the Laplace coefficients are computed once.
    pub fn mu_observable_sweep(&self, mu: &BoundedMeasure, ts: &[f64]) -> Result<Vec<f64>> {
        let pairs = self.mu_pairs(mu)?;
        ts.iter()
            .map(|&t| {
                check_time(t)?;
                Ok(sup_decay(&pairs, t))
            })
            .collect()
    }

    fn mu_pairs(&self, mu: &BoundedMeasure) -> Result<Vec<(f64, f64)>> {
        let coefs: Result<Vec<(f64, f64)>> = self
            .eigenvalues
            .iter()
            .map(|&z| Ok((mu.laplace(-z)?.norm(), z.re)))
            .collect();
        Ok(decay_pairs(coefs?.into_iter()))
    }

    /// Embed as a dense diagonal matrix (oracle cross-checks).
    pub fn to_matrix(&self) -> Result<MatrixOperator> {
        let n = self.eigenvalues.len();
        let m = CMatrix::from_fn(n, n, |i, j| {
            if i == j {
                self.eigenvalues[i]
            } else {
                C64::new(0.0, 0.0)
            }
        });
        MatrixOperator::bounded(m)
    }
}

/// |lambda / (1 - lambda)|; zero eigenvalues contribute nothing.
fn kt_coefficient(z: C64) -> f64 {
    (z / (C64::new(1.0, 0.0) - z)).norm()
}

/// Sort (coefficient, re) pairs by coefficient descending.
fn decay_pairs(it: impl Iterator<Item = (f64, f64)>) -> Vec<(f64, f64)> {
    let mut pairs: Vec<(f64, f64)> = it.collect();
    pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    pairs
}

/// sup_k coef_k e^{t re_k} over pairs sorted by coef descending. Since
/// e^{t re} <= 1, any pair whose coefficient is below the best value so
/// far cannot win, nor can the ones after it.
fn sup_decay(pairs: &[(f64, f64)], t: f64) -> f64 {
    let mut best = 0.0f64;
    for &(coef, re) in pairs {
        if coef <= best {
            break;
        }
        let v = coef * (t * re).exp();
        if v > best {
            best = v;
        }
    }
    best
}

fn check_time(t: f64) -> Result<()> {
    if t < 0.0 || !t.is_finite() {
        return Err(Error::NegativeTime(t));
    }
    Ok(())
}

/// Dense complex matrix generator.
#[derive(Debug, Clone)]
pub struct MatrixOperator {
    entries: CMatrix,
    eigenvalues: Vec<C64>,
    bounded: bool,
}

impl MatrixOperator {
    /// Constructor for bounded-semigroup models: rejects matrices whose
    /// spectral abscissa exceeds the tolerance.
    pub fn bounded(entries: CMatrix) -> Result<Self> {
        let op = Self::raw(entries)?;
        let abscissa = op.spectral_abscissa();
        if abscissa > ABSCISSA_TOL {
            return Err(Error::InvalidOperator(format!(
                "spectral abscissa {abscissa:.3e} > 0; use `raw` for unrestricted matrices"
            )));
        }
        Ok(Self { bounded: true, ..op })
    }

    /// Unrestricted constructor; the result is flagged as unvalidated.
    pub fn raw(entries: CMatrix) -> Result<Self> {
        if entries.nrows() != entries.ncols() || entries.nrows() == 0 {
            return Err(Error::InvalidOperator(format!(
                "matrix must be square and nonempty, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidOperator("non-finite matrix entry".into()));
        }
        let eigenvalues = linalg::eigenvalues(&entries)
            .ok_or_else(|| Error::InvalidOperator("eigenvalue iteration failed".into()))?;
        let mut eigenvalues = eigenvalues;
        eigenvalues.sort_by(|a, b| (a.im, a.re).partial_cmp(&(b.im, b.re)).unwrap());
        Ok(Self {
            entries,
            eigenvalues,
            bounded: false,
        })
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.entries
    }

    pub fn is_bounded_validated(&self) -> bool {
        self.bounded
    }

    /// Eigenvalues sorted by (Im, Re).
    pub fn eigenvalues(&self) -> &[C64] {
        &self.eigenvalues
    }

    pub fn spectral_abscissa(&self) -> f64 {
        self.eigenvalues
            .iter()
            .map(|z| z.re)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn contains_zero(&self) -> bool {
        self.eigenvalues.iter().any(|z| z.norm() <= SPECTRUM_TOL)
    }

    /// ||R(is, A)|| = 1 / sigma_min(is I - A).
    pub fn resolvent_norm(&self, s: f64) -> Result<f64> {
        let z = C64::new(0.0, s);
        let dist = self
            .eigenvalues
            .iter()
            .map(|&w| (w - z).norm())
            .fold(f64::INFINITY, f64::min);
        if dist <= SPECTRUM_TOL {
            return Err(Error::SpectrumHit { s, dist });
        }
        let n = self.dim();
        let shifted = CMatrix::identity(n, n) * z - &self.entries;
        let smin = linalg::smallest_singular_value(&shifted);
        if smin <= 0.0 || !smin.is_finite() {
            return Err(Error::SingularMatrix);
        }
        Ok(1.0 / smin)
    }

    /// ||T(t)|| = sigma_max(exp(tA)).
    pub fn propagator_norm(&self, t: f64) -> Result<f64> {
        check_time(t)?;
        Ok(linalg::largest_singular_value(&self.exp_at(t)))
    }

    pub fn exp_at(&self, t: f64) -> CMatrix {
        linalg::expm(&(&self.entries * C64::new(t, 0.0)))
    }

    /// A R(1,A) = A (I - A)^{-1}.
    pub fn kt_generator(&self) -> Result<CMatrix> {
        linalg::shifted_solve(&self.entries, C64::new(1.0, 0.0), &self.entries)
            .ok_or(Error::SingularMatrix)
    }

    /// ||T(t) A R(1,A)|| = sigma_max(exp(tA) A (I-A)^{-1}).
    pub fn kt_observable(&self, t: f64) -> Result<f64> {
        check_time(t)?;
        let b = self.kt_generator()?;
        Ok(linalg::largest_singular_value(&(self.exp_at(t) * b)))
    }

    pub fn kt_observable_sweep(&self, ts: &[f64]) -> Result<Vec<f64>> {
        let b = self.kt_generator()?;
        ts.iter()
            .map(|&t| {
                check_time(t)?;
                Ok(linalg::largest_singular_value(&(self.exp_at(t) * &b)))
            })
            .collect()
    }

    /// mu_hat(T) = integral exp(tA) d mu(t), in closed form:
    /// atoms contribute w_j exp(t_j A) and each density monomial
    /// c_n t^n e^{-at} contributes c_n n! R(a, A)^{n+1}.
    pub fn hat_mu(&self, mu: &BoundedMeasure) -> Result<CMatrix> {
        let n = self.dim();
        let mut acc = CMatrix::zeros(n, n);
        for a in &mu.atoms {
            acc += self.exp_at(a.location) * a.weight;
        }
        let id = CMatrix::identity(n, n);
        for d in &mu.densities {
            if d.decay.re <= 0.0 {
                return Err(Error::LaplaceDomain(format!(
                    "density decay rate {} has nonpositive real part",
                    d.decay
                )));
            }
            let resolvent = linalg::shifted_solve(&self.entries, d.decay, &id)
                .ok_or(Error::SingularMatrix)?;
            let mut power = resolvent.clone(); // R(a,A)^{n+1} for n = 0
            let mut fact = 1.0f64;
            for (k, &c) in d.coeffs.iter().enumerate() {
                if k > 0 {
                    fact *= k as f64;
                    power = &power * &resolvent;
                }
                acc += &power * (c * C64::new(fact, 0.0));
            }
        }
        Ok(acc)
    }

    /// Quadrature fallback for `hat_mu`, for cross-validation: atoms are
    /// exact, each density term is integrated on [0, T_cut] by a composite
    /// Gauss-Legendre rule with panel-width halving until two successive
    /// passes agree, with a closed-form bound on the discarded tail.
    pub fn hat_mu_quadrature(&self, mu: &BoundedMeasure, rel_tol: f64) -> Result<CMatrix> {
        let n = self.dim();
        let mut acc = CMatrix::zeros(n, n);
        for a in &mu.atoms {
            acc += self.exp_at(a.location) * a.weight;
        }
        if mu.densities.is_empty() {
            return Ok(acc);
        }

        // sup ||T(t)|| estimated on a coarse logarithmic grid; enters the
        // tail cutoff M * integral_{T_cut}^inf d|mu| < 1e-12.
        let mut m_hat = self.propagator_norm(0.0)?;
        let mut t = 1e-2;
        while t <= 1e3 {
            m_hat = m_hat.max(self.propagator_norm(t)?);
            t *= 10.0_f64.powf(0.25);
        }

        for d in &mu.densities {
            let scale: f64 = d
                .coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c.norm() * term_weight(k, d.decay.re))
                .sum();
            if scale == 0.0 {
                continue;
            }
            let mut t_cut = 1.0f64;
            while m_hat * crate::measures::density_tail(d, t_cut) > 1e-12 * scale && t_cut < 2e4 {
                t_cut *= 2.0;
            }
            let mut prev: Option<CMatrix> = None;
            let mut width = 1.0f64;
            loop {
                let cur = self.integrate_density_panels(d, t_cut, width);
                if let Some(p) = &prev {
                    let diff = linalg::largest_singular_value(&(&cur - p));
                    let size = linalg::largest_singular_value(&cur).max(scale * 1e-6);
                    if diff <= rel_tol * size || width <= 0.0626 {
                        acc += cur;
                        break;
                    }
                }
                prev = Some(cur);
                width *= 0.5;
            }
        }
        Ok(acc)
    }

    /// Composite 10-point Gauss-Legendre over panels of the given width.
    /// Panel starts are chained: exp((p w + x) A) = exp(p w A) exp(x A),
    /// so each panel costs one matrix product per node.
    fn integrate_density_panels(&self, d: &crate::measures::DensityTerm, t_cut: f64, width: f64) -> CMatrix {
        let n = self.dim();
        let panels = (t_cut / width).ceil() as usize;
        let e_w = self.exp_at(width);
        let nodes: Vec<(f64, f64)> = GL10
            .iter()
            .map(|&(x, w)| (0.5 * width * (x + 1.0), 0.5 * width * w))
            .collect();
        let e_nodes: Vec<CMatrix> = nodes.iter().map(|&(x, _)| self.exp_at(x)).collect();
        let mut start = CMatrix::identity(n, n);
        let mut acc = CMatrix::zeros(n, n);
        for p in 0..panels {
            let t0 = p as f64 * width;
            for (i, &(x, w)) in nodes.iter().enumerate() {
                let t = t0 + x;
                if t > t_cut {
                    continue;
                }
                let val = d.eval(t) * C64::new(w, 0.0);
                acc += (&start * &e_nodes[i]) * val;
            }
            if p + 1 < panels {
                start *= &e_w;
            }
        }
        acc
    }

    /// ||T(t) mu_hat(T)|| through the closed-form calculus.
    pub fn mu_observable(&self, mu: &BoundedMeasure, t: f64) -> Result<f64> {
        check_time(t)?;
        let h = self.hat_mu(mu)?;
        Ok(linalg::largest_singular_value(&(self.exp_at(t) * h)))
    }

    pub fn mu_observable_sweep(&self, mu: &BoundedMeasure, ts: &[f64]) -> Result<Vec<f64>> {
        let h = self.hat_mu(mu)?;
        ts.iter()
            .map(|&t| {
                check_time(t)?;
                Ok(linalg::largest_singular_value(&(self.exp_at(t) * &h)))
            })
            .collect()
    }
}

fn term_weight(k: usize, rate: f64) -> f64 {
    let mut fact = 1.0;
    for i in 1..=k {
        fact *= i as f64;
    }
    fact / rate.powi(k as i32 + 1)
}

/// 10-point Gauss-Legendre nodes and weights on [-1, 1].
const GL10: [(f64, f64); 10] = [
    (-0.973_906_528_517_171_7, 0.066_671_344_308_688_14),
    (-0.865_063_366_688_984_5, 0.149_451_349_150_580_6),
    (-0.679_409_568_299_024_4, 0.219_086_362_515_982_0),
    (-0.433_395_394_129_247_2, 0.269_266_719_309_996_3),
    (-0.148_874_338_981_631_2, 0.295_524_224_714_752_9),
    (0.148_874_338_981_631_2, 0.295_524_224_714_752_9),
    (0.433_395_394_129_247_2, 0.269_266_719_309_996_3),
    (0.679_409_568_299_024_4, 0.219_086_362_515_982_0),
    (0.865_063_366_688_984_5, 0.149_451_349_150_580_6),
    (0.973_906_528_517_171_7, 0.066_671_344_308_688_14),
];

/// Tagged union of the two generator families.
#[derive(Debug, Clone)]
pub enum OperatorModel {
    Diagonal(DiagonalOperator),
    Matrix(MatrixOperator),
}

impl OperatorModel {
    pub fn resolvent_norm(&self, s: f64) -> Result<f64> {
        match self {
            Self::Diagonal(op) => op.resolvent_norm(s),
            Self::Matrix(op) => op.resolvent_norm(s),
        }
    }

    pub fn propagator_norm(&self, t: f64) -> Result<f64> {
        match self {
            Self::Diagonal(op) => op.propagator_norm(t),
            Self::Matrix(op) => op.propagator_norm(t),
        }
    }

    pub fn kt_observable(&self, t: f64) -> Result<f64> {
        match self {
            Self::Diagonal(op) => op.kt_observable(t),
            Self::Matrix(op) => op.kt_observable(t),
        }
    }

    pub fn kt_observable_sweep(&self, ts: &[f64]) -> Result<Vec<f64>> {
        match self {
            Self::Diagonal(op) => op.kt_observable_sweep(ts),
            Self::Matrix(op) => op.kt_observable_sweep(ts),
        }
    }

    pub fn mu_observable(&self, mu: &BoundedMeasure, t: f64) -> Result<f64> {
        match self {
            Self::Diagonal(op) => op.mu_observable(mu, t),
            Self::Matrix(op) => op.mu_observable(mu, t),
        }
    }

    pub fn mu_observable_sweep(&self, mu: &BoundedMeasure, ts: &[f64]) -> Result<Vec<f64>> {
        match self {
            Self::Diagonal(op) => op.mu_observable_sweep(mu, ts),
            Self::Matrix(op) => op.mu_observable_sweep(mu, ts),
        }
    }

    /// Eigenvalues sorted by (Im, Re): exact for diagonal models, computed
    /// for matrices.
    pub fn eigenvalues(&self) -> &[C64] {
        match self {
            Self::Diagonal(op) => op.eigenvalues(),
            Self::Matrix(op) => op.eigenvalues(),
        }
    }

    pub fn contains_zero(&self) -> bool {
        match self {
            Self::Diagonal(op) => op.contains_zero(),
            Self::Matrix(op) => op.contains_zero(),
        }
    }

    pub fn is_diagonal(&self) -> bool {
        matches!(self, Self::Diagonal(_))
    }

    pub fn label(&self) -> String {
        match self {
            Self::Diagonal(op) => op.label().to_string(),
            Self::Matrix(op) => format!("matrix(n={})", op.dim()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn diag(eigs: &[(f64, f64)]) -> DiagonalOperator {
        DiagonalOperator::new(eigs.iter().map(|&(re, im)| c(re, im)).collect(), "test").unwrap()
    }

    #[test]
    fn resolvent_norm_examples() {
        assert_relative_eq!(diag(&[(-1.0, 0.0)]).resolvent_norm(0.0).unwrap(), 1.0);
        assert_relative_eq!(diag(&[(0.0, 0.0)]).resolvent_norm(1.0).unwrap(), 1.0);
    }

    #[test]
    fn resolvent_norm_polynomial_profile_exhaustive_oracle() {
        let op = DiagonalOperator::polynomial_profile(2.0, 1000, false).unwrap();
        // Oracle: plain minimum over every eigenvalue, no pruning.
        let z = c(0.0, 0.1);
        let oracle = op
            .eigenvalues()
            .iter()
            .map(|&w| (w - z).norm())
            .fold(f64::INFINITY, f64::min);
        assert_relative_eq!(oracle, 1e-2, max_relative = 1e-12); // minimiser k = 10
        assert_relative_eq!(op.resolvent_norm(0.1).unwrap(), 100.0, max_relative = 1e-12);
    }

    #[test]
    fn pruned_distance_matches_exhaustive_on_random_queries() {
        let op = DiagonalOperator::polynomial_profile(1.5, 5000, true).unwrap();
        let mut s = -2.0;
        while s <= 2.0 {
            let z = c(0.0, s);
            let oracle = op
                .eigenvalues()
                .iter()
                .map(|&w| (w - z).norm())
                .fold(f64::INFINITY, f64::min);
            assert_relative_eq!(op.distance_to_spectrum(z), oracle, max_relative = 1e-13);
            s += 0.0137;
        }
    }

    #[test]
    fn resolvent_lower_bound_with_zero_in_spectrum() {
        // dist(is, sigma) <= |is - 0| = |s|, so the norm is at least 1/|s|.
        let op = diag(&[(0.0, 0.0), (-0.5, 0.3), (-2.0, -1.0)]);
        let mut s = 1e-3;
        while s <= 1.0 {
            assert!(op.resolvent_norm(s).unwrap() >= 1.0 / s);
            assert!(op.resolvent_norm(-s).unwrap() >= 1.0 / s);
            s *= 1.7;
        }
    }

    #[test]
    fn spectrum_hit_rejected() {
        let op = diag(&[(0.0, 0.5)]);
        assert!(matches!(
            op.resolvent_norm(0.5),
            Err(Error::SpectrumHit { .. })
        ));
    }

    #[test]
    fn propagator_norm_examples() {
        let op = diag(&[(-1.0, 0.0), (-2.0, 0.0)]);
        assert_relative_eq!(op.propagator_norm(1.0).unwrap(), (-1.0f64).exp());
        assert_relative_eq!(op.propagator_norm(0.0).unwrap(), 1.0);
        assert!(matches!(
            op.propagator_norm(-0.5),
            Err(Error::NegativeTime(_))
        ));
    }

    #[test]
    fn propagator_norm_nilpotent_matrix_svd_oracle() {
        let a = CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(0., 0.), c(0., 0.)]);
        let op = MatrixOperator::bounded(a).unwrap();
        // exp(2A) = [[1,2],[0,1]]; closed-form 2x2 singular value oracle:
        // sigma^2 = (d^2 + 2 + d sqrt(d^2+4))/2 with d = 2 gives (1+sqrt2)^2.
        let d = 2.0f64;
        let oracle = ((d * d + 2.0 + d * (d * d + 4.0).sqrt()) / 2.0).sqrt();
        assert_relative_eq!(oracle, 1.0 + 2.0f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(op.propagator_norm(2.0).unwrap(), oracle, max_relative = 1e-12);
        assert_relative_eq!(op.propagator_norm(0.0).unwrap(), 1.0, max_relative = 1e-13);
    }

    #[test]
    fn kt_observable_examples() {
        let zero = diag(&[(0.0, 0.0)]);
        for t in [0.0, 1.0, 37.5] {
            assert_eq!(zero.kt_observable(t).unwrap(), 0.0);
        }
        let one = diag(&[(-1.0, 0.0)]);
        assert_relative_eq!(one.kt_observable(0.0).unwrap(), 0.5);
        // single eigenvalue closed form |lambda/(1-lambda)| e^{t Re lambda}
        assert_relative_eq!(
            one.kt_observable(3.0).unwrap(),
            0.5 * (-3.0f64).exp(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn kt_observable_pruned_sweep_matches_exhaustive() {
        let op = DiagonalOperator::polynomial_profile(2.0, 20_000, true).unwrap();
        for t in [0.0, 0.5, 3.0, 100.0, 5e4] {
            let oracle = op
                .eigenvalues()
                .iter()
                .map(|&z| (z / (c(1.0, 0.0) - z)).norm() * (t * z.re).exp())
                .fold(0.0, f64::max);
            assert_relative_eq!(op.kt_observable(t).unwrap(), oracle, max_relative = 1e-13);
        }
    }

    #[test]
    fn kt_observable_nonincreasing_in_time() {
        let op = DiagonalOperator::polynomial_profile(1.5, 2000, true).unwrap();
        let mut state = 0x9E3779B97F4A7C15u64;
        let mut rand01 = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..100 {
            let a = rand01() * 1e4;
            let b = rand01() * 1e4;
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let v_lo = op.kt_observable(lo).unwrap();
            let v_hi = op.kt_observable(hi).unwrap();
            assert!(v_hi <= v_lo * (1.0 + 1e-12), "kt not monotone: {v_lo} -> {v_hi}");
        }
    }

    #[test]
    fn mu_observable_special_measures() {
        let op = diag(&[(-1.0, 0.0), (-0.25, 2.0), (0.0, 0.0)]);
        let delta = BoundedMeasure::delta_zero();
        let kt_mu = BoundedMeasure::e_minus_delta();
        for t in [0.0, 0.7, 4.0, 55.0] {
            assert_relative_eq!(
                op.mu_observable(&delta, t).unwrap(),
                op.propagator_norm(t).unwrap(),
                max_relative = 1e-13
            );
            assert_relative_eq!(
                op.mu_observable(&kt_mu, t).unwrap(),
                op.kt_observable(t).unwrap(),
                max_relative = 1e-13
            );
        }
    }

    #[test]
    fn mu_observable_time_shift_atom() {
        // atom at t0 = 2 acts as T(2): sup over {-1, -1+i} of |e^{3 lambda}|.
        let op = diag(&[(-1.0, 0.0), (-1.0, 1.0)]);
        let mu = BoundedMeasure::dirac(2.0, c(1.0, 0.0)).unwrap();
        let got = op.mu_observable(&mu, 1.0).unwrap();
        assert_relative_eq!(got, (-3.0f64).exp(), max_relative = 1e-13);
    }

    #[test]
    fn hat_mu_identity_and_kt_generator() {
        let a = CMatrix::from_row_slice(
            2,
            2,
            &[c(-0.5, 0.3), c(0.2, 0.0), c(0.0, -0.1), c(-1.5, 0.0)],
        );
        let op = MatrixOperator::bounded(a).unwrap();
        let id_err = op.hat_mu(&BoundedMeasure::delta_zero()).unwrap()
            - CMatrix::identity(2, 2);
        assert!(linalg::largest_singular_value(&id_err) < 1e-14);

        // mu = e - delta_0 gives A(I-A)^{-1}; cross-check against the
        // resolvent identity R(1,A) - I computed independently.
        let h = op.hat_mu(&BoundedMeasure::e_minus_delta()).unwrap();
        let r1 = linalg::shifted_solve(op.matrix(), c(1.0, 0.0), &CMatrix::identity(2, 2)).unwrap();
        let alt = r1 - CMatrix::identity(2, 2);
        assert!(linalg::largest_singular_value(&(&h - &alt)) < 1e-13);
        let direct = op.kt_generator().unwrap();
        assert!(linalg::largest_singular_value(&(&h - &direct)) < 1e-13);
    }

    #[test]
    fn hat_mu_density_scalar_oracle() {
        // density t e^{-2t} on A = diag(-1): 1! R(2,-1)^2 = 1/9.
        let a = CMatrix::from_element(1, 1, c(-1.0, 0.0));
        let op = MatrixOperator::bounded(a).unwrap();
        let mu = BoundedMeasure::exp_density(c(2.0, 0.0), &[c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        let h = op.hat_mu(&mu).unwrap();
        assert_relative_eq!(h[(0, 0)].re, 1.0 / 9.0, max_relative = 1e-14);
        // Independent scalar Simpson oracle of int t e^{-2t} e^{-t} dt.
        let oracle = crate::measures::adaptive_simpson_scalar(
            &|t: f64| t * (-3.0 * t).exp(),
            0.0,
            40.0,
            1e-13,
        );
        assert_relative_eq!(h[(0, 0)].re, oracle, max_relative = 1e-10);
        // Quadrature fallback agrees too.
        let q = op.hat_mu_quadrature(&mu, 1e-9).unwrap();
        assert_relative_eq!(q[(0, 0)].re, 1.0 / 9.0, max_relative = 1e-8);
    }

    #[test]
    fn bounded_constructor_rejects_unstable() {
        let a = CMatrix::from_row_slice(2, 2, &[c(0.1, 0.0), c(0., 0.), c(0., 0.), c(-1., 0.)]);
        assert!(MatrixOperator::bounded(a.clone()).is_err());
        let raw = MatrixOperator::raw(a).unwrap();
        assert!(!raw.is_bounded_validated());
        assert_relative_eq!(raw.spectral_abscissa(), 0.1, max_relative = 1e-10);
    }

    #[test]
    fn diagonal_invariants_enforced() {
        assert!(DiagonalOperator::new(vec![], "x").is_err());
        assert!(DiagonalOperator::new(vec![c(0.1, 0.0)], "x").is_err());
        // duplicates collapse, zero kept once
        let op = DiagonalOperator::new(
            vec![c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 2.0), c(-1.0, 2.0)],
            "x",
        )
        .unwrap();
        assert_eq!(op.len(), 2);
        assert!(op.contains_zero());
    }
}
