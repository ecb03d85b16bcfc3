//! Shared test support: an eigenvalue oracle independent of the library's
//! dense solver, plus seeded random-input helpers.
//!
//! The oracle computes the characteristic polynomial by the
//! Faddeev-LeVerrier trace recursion and finds all its complex roots with
//! Durand-Kerner iteration. It shares no code with the nalgebra-backed
//! implementation path it is used to check, and is intended for sides up to
//! about 9.

#![allow(dead_code)]

use jsr::matrix::Matrix;
use jsr::set::MatrixSet;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cplx {
    pub re: f64,
    pub im: f64,
}

impl Cplx {
    pub fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }

    pub fn abs(self) -> f64 {
        self.re.hypot(self.im)
    }

    fn add(self, o: Cplx) -> Cplx {
        Cplx::new(self.re + o.re, self.im + o.im)
    }

    fn sub(self, o: Cplx) -> Cplx {
        Cplx::new(self.re - o.re, self.im - o.im)
    }

    fn mul(self, o: Cplx) -> Cplx {
        Cplx::new(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )
    }

    fn div(self, o: Cplx) -> Cplx {
        let d = o.re * o.re + o.im * o.im;
        Cplx::new(
            (self.re * o.re + self.im * o.im) / d,
            (self.im * o.re - self.re * o.im) / d,
        )
    }
}

/// Monic characteristic polynomial coefficients `[c_0, ..., c_{n-1}]` of
/// `lambda^n + c_{n-1} lambda^{n-1} + ... + c_0` via Faddeev-LeVerrier.
pub fn char_poly(a: &Matrix) -> Vec<f64> {
    assert!(a.is_square());
    let n = a.rows();
    let mut coeffs = vec![0.0; n];
    let mut m = a.clone();
    let mut c = -m.trace();
    coeffs[n - 1] = c;
    for k in 2..=n {
        // M_{k} = A (M_{k-1} + c I)
        let mut shifted = m.clone();
        for i in 0..n {
            shifted.set(i, i, shifted.get(i, i) + c);
        }
        m = a.mul(&shifted);
        c = -m.trace() / k as f64;
        coeffs[n - k] = c;
    }
    coeffs
}

/// All complex roots of the monic polynomial with the given low-order
/// coefficients, by Durand-Kerner iteration.
pub fn poly_roots(coeffs: &[f64]) -> Vec<Cplx> {
    let n = coeffs.len();
    if n == 0 {
        return vec![];
    }
    let eval = |z: Cplx| -> Cplx {
        let mut acc = Cplx::new(1.0, 0.0);
        for &c in coeffs.iter().rev() {
            acc = acc.mul(z).add(Cplx::new(c, 0.0));
        }
        acc
    };
    // Start on a spiral that is not a root pattern of real polynomials.
    let seed = Cplx::new(0.4, 0.9);
    let mut roots: Vec<Cplx> = Vec::with_capacity(n);
    let mut cur = Cplx::new(1.0, 0.0);
    for _ in 0..n {
        cur = cur.mul(seed);
        roots.push(cur);
    }
    for _ in 0..600 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let mut denom = Cplx::new(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    denom = denom.mul(roots[i].sub(roots[j]));
                }
            }
            let delta = eval(roots[i]).div(denom);
            roots[i] = roots[i].sub(delta);
            moved = moved.max(delta.abs());
        }
        if moved < 1e-14 {
            break;
        }
    }
    roots
}

/// Largest root modulus of the characteristic polynomial; the reference for
/// the library's spectral radius. Prescaled to keep coefficients in range.
pub fn oracle_spectral_radius(a: &Matrix) -> f64 {
    let scale = a.max_abs();
    if scale == 0.0 {
        return 0.0;
    }
    let scaled = a.scale(1.0 / (scale * a.rows() as f64));
    let coeffs = char_poly(&scaled);
    let rho = poly_roots(&coeffs)
        .into_iter()
        .map(Cplx::abs)
        .fold(0.0, f64::max);
    rho * scale * a.rows() as f64
}

/// All eigenvalues (as complex pairs) through the oracle route.
pub fn oracle_eigenvalues(a: &Matrix) -> Vec<Cplx> {
    let scale = a.max_abs();
    if scale == 0.0 {
        return vec![Cplx::new(0.0, 0.0); a.rows()];
    }
    let factor = scale * a.rows() as f64;
    let scaled = a.scale(1.0 / factor);
    poly_roots(&char_poly(&scaled))
        .into_iter()
        .map(|z| Cplx::new(z.re * factor, z.im * factor))
        .collect()
}

/// Largest singular value through the oracle: square root of the largest
/// characteristic root of the Gram matrix.
pub fn oracle_spectral_norm(a: &Matrix) -> f64 {
    let gram = a.transpose().mul(a);
    oracle_spectral_radius(&gram).max(0.0).sqrt()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Matrix {
    let data: Vec<f64> = (0..n * n).map(|_| rng.gen_range(lo..hi)).collect();
    Matrix::new(n, n, data).unwrap()
}

pub fn random_set(rng: &mut ChaCha8Rng, m: usize, n: usize, lo: f64, hi: f64) -> MatrixSet {
    MatrixSet::new((0..m).map(|_| random_matrix(rng, n, lo, hi)).collect()).unwrap()
}

pub fn random_symmetric(rng: &mut ChaCha8Rng, n: usize) -> Matrix {
    let mut m = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = rng.gen_range(-1.0..1.0);
            m.set(i, j, v);
            m.set(j, i, v);
        }
    }
    m
}

pub fn fib_pair() -> MatrixSet {
    let a = Matrix::from_rows(&[&[1.0, 1.0], &[0.0, 1.0]]).unwrap();
    let b = Matrix::from_rows(&[&[1.0, 0.0], &[1.0, 1.0]]).unwrap();
    MatrixSet::new(vec![a, b]).unwrap()
}
