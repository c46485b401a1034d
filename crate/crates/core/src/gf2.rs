//! Linear algebra over GF(2) on bit-packed row vectors.

use alloc::vec::Vec;

/// Reduced row echelon form; returns the pivot rows and their pivot bits.
fn echelon(vectors: &[u64]) -> Vec<(u64, u32)> {
    let mut rows: Vec<(u64, u32)> = Vec::new();
    for &v in vectors {
        let mut x = v;
        for &(r, p) in &rows {
            if x >> p & 1 == 1 {
                x ^= r;
            }
        }
        if x == 0 {
            continue;
        }
        let p = 63 - x.leading_zeros();
        for (r, _) in rows.iter_mut() {
            if *r >> p & 1 == 1 {
                *r ^= x;
            }
        }
        rows.push((x, p));
    }
    rows
}

pub fn gf2_rank(vectors: &[u64]) -> usize {
    echelon(vectors).len()
}

/// A nonzero s in {0,1}^n with y·s ≡ 0 for every y, if one exists.
/// Free variables are all set to 0 except the lowest one.
pub fn gf2_kernel_vector(vectors: &[u64], n: u32) -> Option<u64> {
    let mask = if n >= 64 { u64::MAX } else { (1u64 << n) - 1 };
    let clipped: Vec<u64> = vectors.iter().map(|v| v & mask).collect();
    let rows = echelon(&clipped);
    let pivots = rows.iter().fold(0u64, |acc, &(_, p)| acc | 1 << p);
    let free = (0..n).find(|&b| pivots >> b & 1 == 0)?;
    let mut s = 1u64 << free;
    for &(r, p) in &rows {
        // Row r reads x_p + Σ_{free j in r} x_j = 0.
        if r >> free & 1 == 1 {
            s |= 1 << p;
        }
    }
    Some(s)
}

pub fn dot(a: u64, b: u64) -> u32 {
    (a & b).count_ones() & 1
}
