//! Bounded Borel measures on the half-line, restricted to a class that is
//! closed under the operations the functional calculus needs: finitely many
//! atoms plus densities of the form sum_n c_n t^n e^{-a t} with Re a > 0.
//!
//! Fourier and Laplace transforms are evaluated in closed form from
//!     integral_0^inf t^n e^{-a t} e^{-z t} dt = n! / (z + a)^{n+1},
//! and convolution stays inside the class (partial fractions for distinct
//! decay rates, polynomial-degree growth for confluent ones).

use crate::error::{Error, Result};
use crate::linalg::C64;
use std::fmt;

/// Hard cap on polynomial degree of a density term. Confluent convolutions
/// grow the degree; beyond the cap the result is rejected rather than
/// silently truncated.
pub const MAX_DENSITY_DEGREE: usize = 16;

/// Relative threshold under which two decay rates are treated as equal
/// (confluent) during convolution; closer than this the partial-fraction
/// coefficients are numerically meaningless.
const CONFLUENT_TOL: f64 = 1e-12;

/// Point mass `weight * delta_{location}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub location: f64,
    pub weight: C64,
}

/// Density `(c_0 + c_1 t + ... + c_d t^d) e^{-decay t}` on [0, inf).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityTerm {
    /// c_0..c_d, low degree first. Trailing zeros are trimmed on construction.
    pub coeffs: Vec<C64>,
    /// Decay rate with strictly positive real part.
    pub decay: C64,
}

impl DensityTerm {
    fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Density value at t >= 0.
    pub(crate) fn eval(&self, t: f64) -> C64 {
        let mut p = C64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            p = p * C64::new(t, 0.0) + c;
        }
        p * (-self.decay * C64::new(t, 0.0)).exp()
    }
}

/// A bounded measure on the half-line: atoms plus exponential-polynomial
/// density terms.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BoundedMeasure {
    pub atoms: Vec<Atom>,
    pub densities: Vec<DensityTerm>,
}

impl BoundedMeasure {
    /// The zero measure.
    pub fn zero() -> Self {
        Self::default()
    }

    /// `weight * delta_{location}`.
    pub fn dirac(location: f64, weight: C64) -> Result<Self> {
        if !(location >= 0.0) || !location.is_finite() {
            return Err(Error::InvalidMeasure(format!(
                "atom location must be finite and >= 0, got {location}"
            )));
        }
        if !weight.re.is_finite() || !weight.im.is_finite() {
            return Err(Error::InvalidMeasure("atom weight must be finite".into()));
        }
        Ok(Self {
            atoms: vec![Atom { location, weight }],
            densities: Vec::new(),
        })
    }

    /// Density measure `(c_0 + c_1 t + ...) e^{-decay t} dt`.
    pub fn exp_density(decay: C64, coeffs: &[C64]) -> Result<Self> {
        if !(decay.re > 0.0) {
            return Err(Error::InvalidMeasure(format!(
                "density decay rate must have Re > 0, got {decay}"
            )));
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidMeasure("density coefficients must be finite".into()));
        }
        if coeffs.len() > MAX_DENSITY_DEGREE + 1 {
            return Err(Error::NotRepresentable(format!(
                "density degree {} exceeds cap {MAX_DENSITY_DEGREE}",
                coeffs.len().saturating_sub(1)
            )));
        }
        let mut m = Self {
            atoms: Vec::new(),
            densities: vec![DensityTerm {
                coeffs: coeffs.to_vec(),
                decay,
            }],
        };
        m.normalize();
        Ok(m)
    }

    /// The measure e(t) dt with e(t) = e^{-t}.
    pub fn exponential_e() -> Self {
        Self::exp_density(C64::new(1.0, 0.0), &[C64::new(1.0, 0.0)]).expect("valid by construction")
    }

    /// Unit Dirac mass at the origin.
    pub fn delta_zero() -> Self {
        Self::dirac(0.0, C64::new(1.0, 0.0)).expect("valid by construction")
    }

    /// The measure e - delta_0, whose calculus operator is A R(1,A).
    pub fn e_minus_delta() -> Self {
        let mut m = Self::exponential_e();
        m = m.sub(&Self::delta_zero());
        m
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.atoms.extend_from_slice(&other.atoms);
        out.densities.extend_from_slice(&other.densities);
        out.normalize();
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, factor: C64) -> Self {
        let mut out = self.clone();
        for a in &mut out.atoms {
            a.weight *= factor;
        }
        for d in &mut out.densities {
            for c in &mut d.coeffs {
                *c *= factor;
            }
        }
        out.normalize();
        out
    }

    /// Merge coincident atoms and equal-rate density terms, drop zeros.
    fn normalize(&mut self) {
        self.atoms
            .sort_by(|a, b| a.location.partial_cmp(&b.location).unwrap());
        let mut atoms: Vec<Atom> = Vec::with_capacity(self.atoms.len());
        for a in self.atoms.drain(..) {
            match atoms.last_mut() {
                Some(last) if last.location == a.location => last.weight += a.weight,
                _ => atoms.push(a),
            }
        }
        atoms.retain(|a| a.weight.norm() != 0.0);
        self.atoms = atoms;

        self.densities.sort_by(|a, b| {
            (a.decay.re, a.decay.im)
                .partial_cmp(&(b.decay.re, b.decay.im))
                .unwrap()
        });
        let mut dens: Vec<DensityTerm> = Vec::with_capacity(self.densities.len());
        for d in self.densities.drain(..) {
            match dens.last_mut() {
                Some(last) if last.decay == d.decay => {
                    if last.coeffs.len() < d.coeffs.len() {
                        last.coeffs.resize(d.coeffs.len(), C64::new(0.0, 0.0));
                    }
                    for (i, c) in d.coeffs.iter().enumerate() {
                        last.coeffs[i] += c;
                    }
                }
                _ => dens.push(d),
            }
        }
        for d in &mut dens {
            while d.coeffs.len() > 1 && d.coeffs.last().map(|c| c.norm()) == Some(0.0) {
                d.coeffs.pop();
            }
        }
        dens.retain(|d| d.coeffs.iter().any(|c| c.norm() != 0.0));
        self.densities = dens;
    }

    /// Fourier transform (F mu)(s) = integral e^{-i s t} d mu(t).
    pub fn fourier(&self, s: f64) -> C64 {
        let mut out = C64::new(0.0, 0.0);
        for a in &self.atoms {
            out += a.weight * (C64::new(0.0, -s * a.location)).exp();
        }
        for d in &self.densities {
            let den = d.decay + C64::new(0.0, s);
            out += rational_part(&d.coeffs, den);
        }
        out
    }

    /// Laplace transform L(mu)(z) = integral e^{-z t} d mu(t). Defined for
    /// Re z >= 0 here; fails if z hits a density pole.
    pub fn laplace(&self, z: C64) -> Result<C64> {
        let mut out = C64::new(0.0, 0.0);
        for a in &self.atoms {
            out += a.weight * (-z * C64::new(a.location, 0.0)).exp();
        }
        for d in &self.densities {
            let den = z + d.decay;
            // The integral of t^n e^{-(z+a)t} converges iff Re(z+a) > 0,
            // which in particular excludes the pole itself.
            if den.re <= 0.0 {
                return Err(Error::LaplaceDomain(format!(
                    "z = {z} outside convergence half-plane of decay rate {}",
                    d.decay
                )));
            }
            out += rational_part(&d.coeffs, den);
        }
        Ok(out)
    }

    /// Total variation: sum of |atom weights| plus, per density term, the
    /// integral of |density| on the half-line (quadrature on a finite window
    /// plus a closed-form tail bound). Exact up to quadrature tolerance.
    pub fn total_variation(&self) -> f64 {
        let mut tv: f64 = self.atoms.iter().map(|a| a.weight.norm()).sum();
        for d in &self.densities {
            tv += density_abs_integral(d);
        }
        tv
    }

    /// Convolution mu * nu within the representable class.
    pub fn convolve(&self, other: &Self) -> Result<Self> {
        let mut out = Self::zero();

        // atom (x) atom
        for a in &self.atoms {
            for b in &other.atoms {
                out.atoms.push(Atom {
                    location: a.location + b.location,
                    weight: a.weight * b.weight,
                });
            }
        }

        // atom (x) density: representable only for an atom at the origin;
        // an atom elsewhere would shift the density support off [0, inf).
        for (atoms, dens) in [(&self.atoms, &other.densities), (&other.atoms, &self.densities)] {
            for a in atoms.iter() {
                if a.location != 0.0 {
                    if !dens.is_empty() {
                        return Err(Error::NotRepresentable(format!(
                            "atom at t = {} convolved with a density leaves the class",
                            a.location
                        )));
                    }
                    continue;
                }
                for d in dens.iter() {
                    out.densities.push(DensityTerm {
                        coeffs: d.coeffs.iter().map(|c| c * a.weight).collect(),
                        decay: d.decay,
                    });
                }
            }
        }

        // density (x) density
        for d1 in &self.densities {
            for d2 in &other.densities {
                convolve_terms(d1, d2, &mut out)?;
            }
        }

        out.normalize();
        Ok(out)
    }
}

impl fmt::Display for BoundedMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for a in &self.atoms {
            if !first {
                write!(f, " + ")?;
            }
            write!(f, "atom({}, {}, {})", a.location, a.weight.re, a.weight.im)?;
            first = false;
        }
        for d in &self.densities {
            if !first {
                write!(f, " + ")?;
            }
            write!(f, "expdensity({}, {};", d.decay.re, d.decay.im)?;
            for (i, c) in d.coeffs.iter().enumerate() {
                if c.im == 0.0 {
                    write!(f, "{}{}", if i == 0 { " " } else { ", " }, c.re)?;
                } else {
                    write!(f, "{}{}{:+}i", if i == 0 { " " } else { ", " }, c.re, c.im)?;
                }
            }
            write!(f, ")")?;
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// sum_n c_n n! / den^{n+1}
fn rational_part(coeffs: &[C64], den: C64) -> C64 {
    let inv = C64::new(1.0, 0.0) / den;
    let mut acc = C64::new(0.0, 0.0);
    let mut fact = 1.0f64;
    let mut pw = inv;
    for (n, &c) in coeffs.iter().enumerate() {
        if n > 0 {
            fact *= n as f64;
            pw *= inv;
        }
        acc += c * C64::new(fact, 0.0) * pw;
    }
    acc
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Convolve two single-rate terms and accumulate the result.
fn convolve_terms(d1: &DensityTerm, d2: &DensityTerm, out: &mut BoundedMeasure) -> Result<()> {
    let a = d1.decay;
    let b = d2.decay;
    let scale = a.norm().max(b.norm()).max(1.0);
    if (a - b).norm() <= CONFLUENT_TOL * scale {
        // t^m e^{-at} * t^n e^{-at} = m! n!/(m+n+1)! t^{m+n+1} e^{-at}
        let deg = d1.degree() + d2.degree() + 1;
        if deg > MAX_DENSITY_DEGREE {
            return Err(Error::NotRepresentable(format!(
                "confluent convolution degree {deg} exceeds cap {MAX_DENSITY_DEGREE}"
            )));
        }
        let mut coeffs = vec![C64::new(0.0, 0.0); deg + 1];
        for (m, &cm) in d1.coeffs.iter().enumerate() {
            for (n, &cn) in d2.coeffs.iter().enumerate() {
                let k = m + n + 1;
                let w = factorial(m) * factorial(n) / factorial(k);
                coeffs[k] += cm * cn * C64::new(w, 0.0);
            }
        }
        out.densities.push(DensityTerm { coeffs, decay: a });
        return Ok(());
    }

    // Distinct rates: expand m! n!/((z+a)^{m+1} (z+b)^{n+1}) into simple
    // fractions. alpha_j is the coefficient of (z+a)^{-j}:
    //   alpha_j = (-1)^{M-j} C(N+M-j-1, M-j) (b-a)^{-(N+M-j)},  M = m+1, N = n+1,
    // and 1/(z+a)^j pulls back to t^{j-1} e^{-at}/(j-1)!.
    let mut acc_a = vec![C64::new(0.0, 0.0); d1.coeffs.len()];
    let mut acc_b = vec![C64::new(0.0, 0.0); d2.coeffs.len()];
    for (m, &cm) in d1.coeffs.iter().enumerate() {
        for (n, &cn) in d2.coeffs.iter().enumerate() {
            if cm.norm() == 0.0 || cn.norm() == 0.0 {
                continue;
            }
            let front = cm * cn * C64::new(factorial(m) * factorial(n), 0.0);
            let cap_m = m + 1;
            let cap_n = n + 1;
            accumulate_pole(front, cap_m, cap_n, b - a, &mut acc_a);
            accumulate_pole(front, cap_n, cap_m, a - b, &mut acc_b);
        }
    }
    out.densities.push(DensityTerm { coeffs: acc_a, decay: a });
    out.densities.push(DensityTerm { coeffs: acc_b, decay: b });
    Ok(())
}

/// Add front * [partial fraction coefficients at the pole of order `m`
/// against an order-`n` pole at distance `diff`] into time-domain
/// polynomial coefficients for that pole's decay rate.
fn accumulate_pole(front: C64, m: usize, n: usize, diff: C64, acc: &mut Vec<C64>) {
    for j in 1..=m {
        let i = m - j;
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        let comb = binomial(n + i - 1, i);
        let alpha = front * C64::new(sign * comb, 0.0) / diff.powi((n + i) as i32);
        // alpha / (z+a)^j  <->  alpha t^{j-1} e^{-at} / (j-1)!
        if acc.len() < j {
            acc.resize(j, C64::new(0.0, 0.0));
        }
        acc[j - 1] += alpha / C64::new(factorial(j - 1), 0.0);
    }
}

/// integral_0^inf |p(t)| e^{-Re a t} dt for one density term: adaptive
/// Simpson on [0, T] with T chosen so the monomial triangle bound on the
/// tail is below 1e-13 of the leading scale.
fn density_abs_integral(d: &DensityTerm) -> f64 {
    let rate = d.decay.re;
    let crude: f64 = d
        .coeffs
        .iter()
        .enumerate()
        .map(|(n, c)| c.norm() * factorial(n) / rate.powi(n as i32 + 1))
        .sum();
    if crude == 0.0 {
        return 0.0;
    }
    let mut t_cut = 1.0f64;
    while density_tail(d, t_cut) > 1e-13 * crude && t_cut < 1e6 {
        t_cut *= 2.0;
    }
    let f = |t: f64| d.eval(t).norm();
    adaptive_simpson_scalar(&f, 0.0, t_cut, 1e-11 * crude.max(1e-30)) + density_tail(d, t_cut)
}

/// Closed-form bound on integral_T^inf |p| e^{-rt} via monomial triangle
/// inequality and the upper incomplete gamma at integer order:
/// Gamma(n+1, x) = n! e^{-x} sum_{k<=n} x^k/k!.
pub(crate) fn density_tail(d: &DensityTerm, t: f64) -> f64 {
    let r = d.decay.re;
    let x = r * t;
    let mut tail = 0.0;
    for (n, c) in d.coeffs.iter().enumerate() {
        let mut s = 0.0;
        let mut term = 1.0;
        for k in 0..=n {
            if k > 0 {
                term *= x / k as f64;
            }
            s += term;
        }
        let gamma_upper = factorial(n) * (-x).exp() * s;
        tail += c.norm() * gamma_upper / r.powi(n as i32 + 1);
    }
    tail
}

pub(crate) fn adaptive_simpson_scalar(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> f64 {
    fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: usize,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(a, m, fa, flm, fm);
        let right = simpson(m, b, fm, frm, fb);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            return left + right + (left + right - whole) / 15.0;
        }
        recurse(f, a, m, fa, flm, fm, left, tol * 0.5, depth - 1)
            + recurse(f, m, b, fm, frm, fb, right, tol * 0.5, depth - 1)
    }
    let fa = f(lo);
    let fb = f(hi);
    let fm = f(0.5 * (lo + hi));
    let whole = simpson(lo, hi, fa, fm, fb);
    recurse(f, lo, hi, fa, fm, fb, whole, tol, 40)
}

/// Parse the textual measure grammar: `atom(t, re, im)`,
/// `expdensity(a_re, a_im; c0, c1, ...)`, combined with `+` and `-`.
pub fn parse_measure(text: &str) -> Result<BoundedMeasure> {
    let mut out = BoundedMeasure::zero();
    let mut rest = text.trim();
    if rest.is_empty() {
        return Err(Error::InvalidMeasure("empty measure expression".into()));
    }
    let mut sign = 1.0;
    let mut first = true;
    while !rest.is_empty() {
        rest = rest.trim_start();
        if !first || rest.starts_with('+') || rest.starts_with('-') {
            match rest.chars().next() {
                Some('+') => {
                    sign = 1.0;
                    rest = &rest[1..];
                }
                Some('-') => {
                    sign = -1.0;
                    rest = &rest[1..];
                }
                _ if first => {}
                _ => {
                    return Err(Error::InvalidMeasure(format!(
                        "expected `+` or `-` before `{rest}`"
                    )))
                }
            }
        }
        rest = rest.trim_start();
        let (term, tail) = parse_measure_term(rest)?;
        out = out.add(&term.scale(C64::new(sign, 0.0)));
        rest = tail.trim_start();
        sign = 1.0;
        first = false;
    }
    Ok(out)
}

fn parse_measure_term(text: &str) -> Result<(BoundedMeasure, &str)> {
    let open = text.find('(').ok_or_else(|| {
        Error::InvalidMeasure(format!("expected `atom(...)` or `expdensity(...)` at `{text}`"))
    })?;
    let head = text[..open].trim();
    let close = text[open..]
        .find(')')
        .ok_or_else(|| Error::InvalidMeasure(format!("unclosed parenthesis in `{text}`")))?
        + open;
    let body = &text[open + 1..close];
    let tail = &text[close + 1..];
    match head {
        "atom" => {
            let nums = parse_number_list(body)?;
            if nums.len() != 3 {
                return Err(Error::InvalidMeasure(format!(
                    "atom takes (t, re, im), got {} values",
                    nums.len()
                )));
            }
            Ok((
                BoundedMeasure::dirac(nums[0], C64::new(nums[1], nums[2]))?,
                tail,
            ))
        }
        "expdensity" => {
            let parts: Vec<&str> = body.splitn(2, ';').collect();
            if parts.len() != 2 {
                return Err(Error::InvalidMeasure(
                    "expdensity takes (a_re, a_im; c0, c1, ...)".into(),
                ));
            }
            let rate = parse_number_list(parts[0])?;
            if rate.len() != 2 {
                return Err(Error::InvalidMeasure(
                    "expdensity decay rate takes two values (a_re, a_im)".into(),
                ));
            }
            let coeffs: Vec<C64> = parse_number_list(parts[1])?
                .into_iter()
                .map(|c| C64::new(c, 0.0))
                .collect();
            if coeffs.is_empty() {
                return Err(Error::InvalidMeasure("expdensity needs at least c0".into()));
            }
            Ok((
                BoundedMeasure::exp_density(C64::new(rate[0], rate[1]), &coeffs)?,
                tail,
            ))
        }
        other => Err(Error::InvalidMeasure(format!(
            "unknown measure term `{other}`"
        ))),
    }
}

fn parse_number_list(body: &str) -> Result<Vec<f64>> {
    body.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidMeasure(format!("bad number `{}`", tok.trim())))
        })
        .collect()
}
