//! Ordered compositions of an integer, enumerated lazily in lexicographic order.

use crate::error::{QError, Result};
use crate::precise::{Mp, Prec};
use crate::sum::Neumaier;

/// Largest degree accepted by composition-sum paths; the number of
/// compositions of `n` is `2^{n-1}`.
pub const MAX_COMPOSITION_DEGREE: u32 = 24;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Composition {
    pub parts: Vec<u32>,
}

impl Composition {
    pub fn n(&self) -> u32 {
        self.parts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }
}

/// Streaming enumerator of the compositions of `n` into `l` positive parts.
///
/// Besides the `Iterator` interface, [`Compositions::advance`] steps in place
/// and reports the first position that changed, so callers can reuse prefix
/// products.
#[derive(Debug, Clone)]
pub struct Compositions {
    parts: Vec<u32>,
    state: State,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum State {
    Fresh,
    Running,
    Done,
}

impl Compositions {
    pub fn new(n: u32, l: u32) -> Self {
        if l == 0 || l > n {
            return Self {
                parts: Vec::new(),
                state: State::Done,
            };
        }
        let mut parts = vec![1; l as usize];
        parts[l as usize - 1] = n - l + 1;
        Self {
            parts,
            state: State::Fresh,
        }
    }

    /// Current composition; meaningful after `advance` returned `Some`.
    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    /// Move to the next composition, returning the first index that changed
    /// (0 for the very first one), or `None` when exhausted.
    pub fn advance(&mut self) -> Option<usize> {
        match self.state {
            State::Done => None,
            State::Fresh => {
                self.state = State::Running;
                Some(0)
            }
            State::Running => {
                let l = self.parts.len();
                let mut tail = self.parts[l - 1];
                for i in (0..l.saturating_sub(1)).rev() {
                    let slots = (l - 1 - i) as u32;
                    if tail > slots {
                        self.parts[i] += 1;
                        for p in &mut self.parts[i + 1..l - 1] {
                            *p = 1;
                        }
                        self.parts[l - 1] = tail - slots;
                        return Some(i);
                    }
                    tail += self.parts[i];
                }
                self.state = State::Done;
                None
            }
        }
    }
}

impl Iterator for Compositions {
    type Item = Composition;

    fn next(&mut self) -> Option<Composition> {
        self.advance().map(|_| Composition {
            parts: self.parts.clone(),
        })
    }
}

/// All compositions of `n` with exactly `l` parts.
pub fn compositions(n: u32, l: u32) -> Compositions {
    Compositions::new(n, l)
}

/// `C(n, k)` as a float, exact while it fits the mantissa.
pub fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

pub(crate) fn check_degree(n: u32) -> Result<()> {
    if n > MAX_COMPOSITION_DEGREE {
        Err(QError::IndexOutOfRange(format!(
            "degree {n} exceeds the composition-sum limit {MAX_COMPOSITION_DEGREE}"
        )))
    } else {
        Ok(())
    }
}

/// Compensated sum of `weight` over the compositions of `n` into `l` parts.
pub fn composition_sum<F>(n: u32, l: u32, mut weight: F) -> Result<f64>
where
    F: FnMut(&[u32]) -> f64,
{
    check_degree(n)?;
    let mut stream = compositions(n, l);
    let mut acc = Neumaier::new();
    while stream.advance().is_some() {
        acc.add(weight(stream.parts()));
    }
    Ok(acc.value())
}

/// `sum over compositions of prod values[k_i]`, in multiprecision.
///
/// Prefix products are cached so each step costs only the changed suffix.
pub(crate) fn product_sum(n: u32, l: u32, values: &[Mp], p: Prec) -> Mp {
    let mut stream = compositions(n, l);
    let mut total = p.zero();
    // prefix[i] = product of the first i parts
    let mut prefix: Vec<Mp> = vec![p.one(); l as usize + 1];
    while let Some(first) = stream.advance() {
        let parts = stream.parts();
        for i in first..parts.len() {
            prefix[i + 1] = &prefix[i] * &values[parts[i] as usize];
        }
        total += &prefix[parts.len()];
    }
    total
}
