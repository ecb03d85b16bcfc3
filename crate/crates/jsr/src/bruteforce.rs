//! Reference bounds from explicit products.
//!
//! For any `k`, the joint spectral radius is sandwiched between
//! `max_w rho(A_w)^{1/k}` and `max_w ||A_w||^{1/k}` over the length-`k`
//! words `w`. The spectral radius of a product is invariant under cyclic
//! rotation of its factors, so the lower bound only visits one
//! representative per necklace; matrix norms are not rotation-invariant, so
//! the upper bound visits all `m^k` words.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::set::MatrixSet;

/// Default cap on the number of enumerated words.
pub const DEFAULT_WORD_BUDGET: u64 = 1 << 20;

/// A word over the alphabet `{0, ..., m-1}` selecting matrices of a product.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductWord {
    letters: Vec<usize>,
}

impl ProductWord {
    pub fn letters(&self) -> &[usize] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Whether the word is the lexicographically minimal rotation of its
    /// cyclic class.
    pub fn is_canonical(&self) -> bool {
        is_canonical(&self.letters)
    }
}

impl std::fmt::Display for ProductWord {
    /// One-based letters, matching the usual indexing of the input set.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for &l in &self.letters {
            write!(f, "{}", l + 1)?;
        }
        Ok(())
    }
}

fn is_canonical(word: &[usize]) -> bool {
    let k = word.len();
    for shift in 1..k {
        for i in 0..k {
            let rotated = word[(i + shift) % k];
            match rotated.cmp(&word[i]) {
                std::cmp::Ordering::Less => return false,
                std::cmp::Ordering::Greater => break,
                std::cmp::Ordering::Equal => continue,
            }
        }
    }
    true
}

/// Streams all length-`k` words over `m` letters in lexicographic order,
/// optionally keeping only the canonical representative of each cyclic
/// class.
pub fn enumerate_words(
    m: usize,
    k: u32,
    dedup_cyclic: bool,
    max_words: u64,
) -> Result<WordStream> {
    if m == 0 || k == 0 {
        return Err(Error::InvalidData { expected: 1, got: 0 });
    }
    let total = crate::matrix::checked_pow(m, k).ok_or(Error::Capacity {
        what: format!("{m}^{k} words"),
        limit: "u64 arithmetic".to_string(),
    })?;
    if total > max_words {
        return Err(Error::Capacity {
            what: format!("{m}^{k} = {total} words"),
            limit: format!("{max_words}"),
        });
    }
    Ok(WordStream {
        m,
        dedup: dedup_cyclic,
        next: Some(vec![0; k as usize]),
    })
}

/// Iterator produced by [`enumerate_words`].
pub struct WordStream {
    m: usize,
    dedup: bool,
    next: Option<Vec<usize>>,
}

impl WordStream {
    fn advance(&mut self) {
        let Some(word) = self.next.as_mut() else {
            return;
        };
        for i in (0..word.len()).rev() {
            if word[i] + 1 < self.m {
                word[i] += 1;
                word[i + 1..].iter_mut().for_each(|l| *l = 0);
                return;
            }
        }
        self.next = None;
    }
}

impl Iterator for WordStream {
    type Item = ProductWord;

    fn next(&mut self) -> Option<ProductWord> {
        loop {
            let word = self.next.clone()?;
            self.advance();
            if !self.dedup || is_canonical(&word) {
                return Some(ProductWord { letters: word });
            }
        }
    }
}

/// The bounds `(max_w rho(A_w)^{1/k}, max_w ||A_w||^{1/k})`.
///
/// Products are evaluated depth-first with a running product so each prefix
/// is multiplied once; all matrices are prescaled by the largest spectral
/// norm to keep degree-`k` products in range. The norm maximum runs over all
/// words, the radius maximum only over canonical representatives.
pub fn brute_force_bounds(set: &MatrixSet, k: u32, max_words: u64) -> Result<(f64, f64)> {
    if k == 0 {
        return Err(Error::InvalidData { expected: 1, got: 0 });
    }
    let m = set.len();
    let total = crate::matrix::checked_pow(m, k).ok_or(Error::Capacity {
        what: format!("{m}^{k} words"),
        limit: "u64 arithmetic".to_string(),
    })?;
    if total > max_words {
        return Err(Error::Capacity {
            what: format!("{m}^{k} = {total} words"),
            limit: format!("{max_words}"),
        });
    }
    let scale = set.max_spectral_norm();
    if scale == 0.0 {
        return Ok((0.0, 0.0));
    }
    let scaled = set.scaled(1.0 / scale);

    let mut state = DfsState {
        set: &scaled,
        k: k as usize,
        word: Vec::with_capacity(k as usize),
        best_rho: 0.0f64,
        best_norm: 0.0f64,
    };
    let n = set.dim();
    state.descend(&Matrix::identity(n))?;

    let exponent = 1.0 / k as f64;
    Ok((
        scale * state.best_rho.powf(exponent),
        scale * state.best_norm.powf(exponent),
    ))
}

struct DfsState<'a> {
    set: &'a MatrixSet,
    k: usize,
    word: Vec<usize>,
    best_rho: f64,
    best_norm: f64,
}

impl DfsState<'_> {
    fn descend(&mut self, prefix: &Matrix) -> Result<()> {
        if self.word.len() == self.k {
            self.best_norm = self.best_norm.max(prefix.spectral_norm());
            if is_canonical(&self.word) {
                self.best_rho = self.best_rho.max(prefix.spectral_radius()?);
            }
            return Ok(());
        }
        for letter in 0..self.set.len() {
            self.word.push(letter);
            let product = prefix.mul(self.set.get(letter));
            self.descend(&product)?;
            self.word.pop();
        }
        Ok(())
    }
}

/// Necklace count `(1/k) sum_{d | k} phi(d) m^{k/d}`: the number of cyclic
/// classes of length-`k` words, hence of canonical representatives.
pub fn necklace_count(m: u64, k: u64) -> u64 {
    let mut total = 0u64;
    for d in 1..=k {
        if k % d == 0 {
            total += euler_phi(d) * m.pow((k / d) as u32);
        }
    }
    total / k
}

fn euler_phi(mut n: u64) -> u64 {
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}
