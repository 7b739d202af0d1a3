//! Dense complex linear algebra helpers: matrix exponential, operator
//! norms, and eigenvalues for small generators.
//!
//! The matrix exponential uses scaling-and-squaring with a fixed Pade(13)
//! approximant (Higham 2005). For the matrix sizes handled here (n <= a few
//! hundred) this reaches ~1e-13 relative accuracy for ||A|| up to 1e3 after
//! scaling, which is what the norm pipeline needs.

use nalgebra::{Complex, DMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;

/// theta_13 from Higham's 2005 scaling analysis (Table 10.2).
const THETA_13: f64 = 5.371_920_351_148_152;

/// Pade(13) numerator coefficients b_0..b_13.
const PADE13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

/// 1-norm (maximum absolute column sum).
pub fn one_norm(a: &CMatrix) -> f64 {
    let mut best = 0.0f64;
    for j in 0..a.ncols() {
        let s: f64 = a.column(j).iter().map(|z| z.norm()).sum();
        best = best.max(s);
    }
    best
}

/// exp(A) by scaling-and-squaring with Pade(13).
pub fn expm(a: &CMatrix) -> CMatrix {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm requires a square matrix");
    if n == 0 {
        return CMatrix::zeros(0, 0);
    }
    if n == 1 {
        return CMatrix::from_element(1, 1, a[(0, 0)].exp());
    }

    let norm = one_norm(a);
    let s = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil() as u32
    } else {
        0
    };
    let scale = C64::new((0.5f64).powi(s as i32), 0.0);
    let a1 = a * scale;

    let id = CMatrix::identity(n, n);
    let a2 = &a1 * &a1;
    let a4 = &a2 * &a2;
    let a6 = &a2 * &a4;

    // u = A (b13 A^6 + b11 A^4 + b9 A^2) A^6 + A (b7 A^6 + b5 A^4 + b3 A^2 + b1 I)
    let w1 = &a6 * cr(PADE13[13]) + &a4 * cr(PADE13[11]) + &a2 * cr(PADE13[9]);
    let w2 = &a6 * cr(PADE13[7]) + &a4 * cr(PADE13[5]) + &a2 * cr(PADE13[3]) + &id * cr(PADE13[1]);
    let u = &a1 * (&a6 * &w1 + &w2);
    // v = (b12 A^6 + b10 A^4 + b8 A^2) A^6 + b6 A^6 + b4 A^4 + b2 A^2 + b0 I
    let z1 = &a6 * cr(PADE13[12]) + &a4 * cr(PADE13[10]) + &a2 * cr(PADE13[8]);
    let v = &a6 * &z1 + &a6 * cr(PADE13[6]) + &a4 * cr(PADE13[4]) + &a2 * cr(PADE13[2])
        + &id * cr(PADE13[0]);

    let num = &v + &u;
    let den = &v - &u;
    let mut r = den
        .lu()
        .solve(&num)
        .expect("Pade denominator must be invertible after scaling");

    for _ in 0..s {
        r = &r * &r;
    }
    r
}

fn cr(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Largest singular value through the full decomposition.
pub fn largest_singular_value(a: &CMatrix) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    let svd = a.clone().svd(false, false);
    svd.singular_values.iter().cloned().fold(0.0, f64::max)
}

/// Smallest singular value through the full decomposition.
pub fn smallest_singular_value(a: &CMatrix) -> f64 {
    let svd = a.clone().svd(false, false);
    svd.singular_values
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

/// Largest singular value by power iteration on A^H A, independent of the
/// SVD route. Converges in value even when the top singular value is
/// degenerate. Returns an estimate with relative accuracy ~`tol`.
pub fn largest_singular_value_power(a: &CMatrix, seed: u64, tol: f64, max_iter: usize) -> f64 {
    let n = a.ncols();
    if a.is_empty() {
        return 0.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = nalgebra::DVector::<C64>::from_fn(n, |_, _| {
        C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
    });
    let nv = v.norm();
    if nv == 0.0 {
        return 0.0;
    }
    v /= cr(nv);

    let ah = a.adjoint();
    let mut sigma = 0.0f64;
    for _ in 0..max_iter {
        let w = &ah * (a * &v);
        let nw = w.norm();
        if nw == 0.0 {
            return 0.0;
        }
        let next = nw.sqrt();
        let done = (next - sigma).abs() <= tol * next.max(1e-300);
        sigma = next;
        v = w / cr(nw);
        if done {
            break;
        }
    }
    sigma
}

/// Eigenvalues of a dense complex matrix (unordered).
pub fn eigenvalues(a: &CMatrix) -> Option<Vec<C64>> {
    if a.is_empty() {
        return Some(Vec::new());
    }
    a.clone().eigenvalues().map(|v| v.as_slice().to_vec())
}

/// max Re lambda over the spectrum.
pub fn spectral_abscissa(a: &CMatrix) -> Option<f64> {
    eigenvalues(a).map(|ev| ev.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max))
}

/// Solve (z I - A) X = B.
pub fn shifted_solve(a: &CMatrix, z: C64, b: &CMatrix) -> Option<CMatrix> {
    let n = a.nrows();
    let shifted = CMatrix::identity(n, n) * z - a;
    shifted.lu().solve(b)
}
