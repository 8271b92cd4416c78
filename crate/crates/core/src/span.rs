//! Exact span membership for 0/1 indicator vectors.
//!
//! `Span::new(n, masks)` is the rational span of the indicators of `masks`
//! together with the all-ones vector. Membership is decided through an
//! integer basis of the orthogonal complement: `J` lies in the span iff
//! every basis vector sums to zero over `J`.

use num_integer::Integer;

use crate::subset::bits;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Span {
    n: usize,
    /// Primitive integer basis of `{ r : r . v = 0 for every spanning v }`.
    complement: Vec<Vec<i128>>,
}

impl Span {
    pub fn new<I: IntoIterator<Item = u64>>(n: usize, masks: I) -> Self {
        let mut rows: Vec<Vec<i128>> = vec![vec![1; n]];
        rows.extend(
            masks
                .into_iter()
                .map(|m| (0..n).map(|i| i128::from(m >> i & 1 == 1)).collect()),
        );
        Self { n, complement: null_space(n, rows) }
    }

    /// Dimension of the span (including the all-ones direction).
    pub fn dim(&self) -> usize {
        self.n - self.complement.len()
    }

    pub fn contains(&self, mask: u64) -> bool {
        self.complement
            .iter()
            .all(|w| bits(mask).map(|i| w[i]).sum::<i128>() == 0)
    }

    /// Integer basis of residue tuples annihilated by the span.
    pub fn complement(&self) -> &[Vec<i128>] {
        &self.complement
    }

    /// `table[mask]` is true iff `mask` lies in the span; `table[0]` is true.
    pub fn membership_table(&self) -> Vec<bool> {
        let size = 1usize << self.n;
        let mut table = vec![true; size];
        let mut sums = vec![0i128; size];
        for w in &self.complement {
            for mask in 1..size {
                let low = mask.trailing_zeros() as usize;
                sums[mask] = sums[mask & (mask - 1)] + w[low];
                if sums[mask] != 0 {
                    table[mask] = false;
                }
            }
        }
        table
    }
}

/// Rank of an integer matrix given by rows of length `n`.
pub(crate) fn integer_rank(n: usize, rows: Vec<Vec<i128>>) -> usize {
    if rows.is_empty() {
        return 0;
    }
    n - null_space(n, rows).len()
}

fn primitive(v: &mut [i128]) {
    let g = v.iter().fold(0i128, |g, &x| g.gcd(&x));
    if g > 1 {
        v.iter_mut().for_each(|x| *x /= g);
    }
}

/// Fraction-free reduction to reduced row echelon form, then one integer
/// null vector per free column.
fn null_space(n: usize, mut rows: Vec<Vec<i128>>) -> Vec<Vec<i128>> {
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for col in 0..n {
        let Some(p) = (r..rows.len()).find(|&i| rows[i][col] != 0) else {
            continue;
        };
        rows.swap(r, p);
        if rows[r][col] < 0 {
            rows[r].iter_mut().for_each(|x| *x = -*x);
        }
        primitive(&mut rows[r]);
        for i in 0..rows.len() {
            if i == r || rows[i][col] == 0 {
                continue;
            }
            let (a, b) = (rows[r][col], rows[i][col]);
            let g = a.gcd(&b);
            let (ka, kb) = (a / g, b / g);
            let pivot = rows[r].clone();
            for (x, p) in rows[i].iter_mut().zip(&pivot) {
                *x = *x * ka - p * kb;
            }
            primitive(&mut rows[i]);
        }
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }

    let lcm = pivots
        .iter()
        .enumerate()
        .fold(1i128, |l, (i, &c)| l.lcm(&rows[i][c]));
    (0..n)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![0i128; n];
            v[free] = lcm;
            for (i, &c) in pivots.iter().enumerate() {
                v[c] = -rows[i][free] * (lcm / rows[i][c]);
            }
            primitive(&mut v);
            v
        })
        .collect()
}
