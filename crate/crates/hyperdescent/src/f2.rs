//! Linear algebra over F_2 with rows packed into u64 bitmasks.
//!
//! Column i is bit i; every matrix here has at most 64 columns, which is
//! plenty (the largest space in the descent bookkeeping has dimension 22).

/// Parity of the intersection: the F_2 inner product.
pub fn dot(a: u64, b: u64) -> u64 {
    ((a & b).count_ones() % 2) as u64
}

/// Rank of the row span.
pub fn rank(rows: &[u64]) -> usize {
    let mut basis: Vec<u64> = Vec::new();
    for &r in rows {
        let mut v = r;
        for &b in &basis {
            let pivot = 1u64 << (63 - b.leading_zeros());
            if v & pivot != 0 {
                v ^= b;
            }
        }
        if v != 0 {
            basis.push(v);
        }
    }
    basis.len()
}

/// Row-echelon basis of the span (each row's leading bit is unique).
pub fn echelon_basis(rows: &[u64]) -> Vec<u64> {
    let mut basis: Vec<u64> = Vec::new();
    for &r in rows {
        let mut v = r;
        for &b in &basis {
            let pivot = 1u64 << (63 - b.leading_zeros());
            if v & pivot != 0 {
                v ^= b;
            }
        }
        if v != 0 {
            basis.push(v);
            basis.sort_by(|a, b| b.cmp(a));
        }
    }
    basis
}

/// Does v lie in the span of the rows?
pub fn in_span(rows: &[u64], v: u64) -> bool {
    let mut basis = echelon_basis(rows);
    basis.push(v);
    rank(&basis) == rank(rows)
}

/// Basis of {x in F_2^ncols : row . x = 0 for every row}.
///
/// This doubles as the annihilator of a set of vectors: the conditions are
/// symmetric in the inner product.
pub fn nullspace(rows: &[u64], ncols: usize) -> Vec<u64> {
    assert!(ncols <= 64);
    let mut mat: Vec<u64> = rows.iter().copied().filter(|&r| r != 0).collect();
    let mut pivot_cols: Vec<usize> = Vec::new();
    let mut row_at = 0usize;
    for col in 0..ncols {
        let Some(src) = (row_at..mat.len()).find(|&i| mat[i] >> col & 1 == 1) else {
            continue;
        };
        mat.swap(row_at, src);
        let pivot_row = mat[row_at];
        for (i, r) in mat.iter_mut().enumerate() {
            if i != row_at && *r >> col & 1 == 1 {
                *r ^= pivot_row;
            }
        }
        pivot_cols.push(col);
        row_at += 1;
    }
    let mut out = Vec::new();
    for free in 0..ncols {
        if pivot_cols.contains(&free) {
            continue;
        }
        let mut x = 1u64 << free;
        for (r, &pc) in pivot_cols.iter().enumerate() {
            if mat[r] >> free & 1 == 1 {
                x |= 1 << pc;
            }
        }
        out.push(x);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn rank_of_known_matrices() {
        assert_eq!(rank(&[]), 0);
        assert_eq!(rank(&[0b101, 0b011, 0b110]), 2); // third = sum of first two
        assert_eq!(rank(&[0b101, 0b011, 0b111]), 3);
        assert_eq!(rank(&[0b1, 0b10, 0b100, 0b111]), 3);
    }

    #[test]
    fn span_membership() {
        let rows = [0b1100u64, 0b0110, 0b0011];
        assert!(in_span(&rows, 0b1010)); // r0 + r1
        assert!(in_span(&rows, 0b1001)); // r0 + r1 + r2
        assert!(in_span(&rows, 0));
        assert!(!in_span(&rows, 0b0001));
    }

    #[test]
    fn nullspace_of_known_matrix() {
        // x0 + x1 = 0, x1 + x2 = 0 over F_2^3: kernel = {(0,0,0),(1,1,1)}
        let ker = nullspace(&[0b011, 0b110], 3);
        assert_eq!(ker, vec![0b111]);
        // zero map has full kernel
        assert_eq!(nullspace(&[], 4).len(), 4);
    }

    #[test]
    fn rank_nullity_and_orthogonality_hold_for_random_matrices() {
        let mut rng = StdRng::seed_from_u64(0xf2f2);
        for _ in 0..400 {
            let ncols = rng.gen_range(1..=22usize);
            let nrows = rng.gen_range(0..=26usize);
            let mask = if ncols == 64 { u64::MAX } else { (1u64 << ncols) - 1 };
            let rows: Vec<u64> = (0..nrows).map(|_| rng.gen::<u64>() & mask).collect();
            let ker = nullspace(&rows, ncols);
            assert_eq!(rank(&rows) + ker.len(), ncols);
            for &x in &ker {
                for &r in &rows {
                    assert_eq!(dot(r, x), 0);
                }
            }
            // kernel vectors are independent by construction
            assert_eq!(rank(&ker), ker.len());
        }
    }

    #[test]
    fn echelon_preserves_span() {
        let mut rng = StdRng::seed_from_u64(0xec8e);
        for _ in 0..200 {
            let rows: Vec<u64> = (0..8).map(|_| rng.gen::<u64>() & 0x3ff).collect();
            let ech = echelon_basis(&rows);
            assert_eq!(rank(&ech), rank(&rows));
            for &r in &rows {
                assert!(in_span(&ech, r));
            }
            for &b in &ech {
                assert!(in_span(&rows, b));
            }
        }
    }
}
