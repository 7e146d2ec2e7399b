//! Exact Gaussian elimination over Q(i).
//!
//! Everything here is deterministic: pivots are chosen as the first nonzero
//! entry in column order, so reduced row echelon forms, kernel bases and
//! particular solutions are canonical for a given row ordering.

use crate::gaussian::GaussianRational;

pub type Row = Vec<GaussianRational>;

/// Reduces `m` to reduced row echelon form in place and returns the pivot
/// column of each nonzero row, in order.
pub fn rref_in_place(m: &mut [Row]) -> Vec<usize> {
    let nrows = m.len();
    let ncols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        if row == nrows {
            break;
        }
        let Some(pr) = (row..nrows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, pr);
        let inv = m[row][col].inv();
        for c in col..ncols {
            m[row][c] = &m[row][c] * &inv;
        }
        for r in 0..nrows {
            if r != row && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                for c in col..ncols {
                    let delta = &factor * &m[row][c];
                    m[r][c] = &m[r][c] - &delta;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

/// Canonical basis of the null space of `m` (one vector per free column,
/// carrying a 1 in that column), in ascending free-column order.
pub fn kernel_basis(m: &[Row], ncols: usize) -> Vec<Row> {
    let mut work: Vec<Row> = m.iter().filter(|r| !r.iter().all(|c| c.is_zero())).cloned().collect();
    for r in &work {
        assert_eq!(r.len(), ncols, "ragged matrix");
    }
    let pivots = rref_in_place(&mut work);
    let mut basis = Vec::new();
    for free in 0..ncols {
        if pivots.contains(&free) {
            continue;
        }
        let mut v = vec![GaussianRational::zero(); ncols];
        v[free] = GaussianRational::one();
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = -&work[r][free];
        }
        basis.push(v);
    }
    basis
}

/// Solves `m * x = b` exactly.  Returns the canonical particular solution
/// (free variables zero) together with the kernel basis, or None when the
/// system is inconsistent.
pub fn solve_affine(m: &[Row], b: &[GaussianRational]) -> Option<(Row, Vec<Row>)> {
    assert_eq!(m.len(), b.len(), "rhs length mismatch");
    let ncols = m.first().map_or(0, Vec::len);
    let mut aug: Vec<Row> = m
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let pivots = rref_in_place(&mut aug);
    if pivots.contains(&ncols) {
        return None; // a row reduced to 0 = 1
    }
    let mut particular = vec![GaussianRational::zero(); ncols];
    for (r, &pc) in pivots.iter().enumerate() {
        particular[pc] = aug[r][ncols].clone();
    }
    let homogeneous: Vec<Row> = aug.iter().map(|r| r[..ncols].to_vec()).collect();
    Some((particular, kernel_basis(&homogeneous, ncols)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: i64) -> GaussianRational {
        GaussianRational::from_integer(n)
    }

    #[test]
    fn kernel_of_rank_one_matrix() {
        // x + 2y + 3z = 0 has a two-dimensional kernel.
        let m = vec![vec![g(1), g(2), g(3)]];
        let k = kernel_basis(&m, 3);
        assert_eq!(k.len(), 2);
        for v in &k {
            let dot = &(&(&v[0] * &g(1)) + &(&v[1] * &g(2))) + &(&v[2] * &g(3));
            assert!(dot.is_zero());
        }
        // Canonical: first vector is free in column 1, second in column 2.
        assert!(k[0][1].is_one());
        assert!(k[1][2].is_one());
    }

    #[test]
    fn affine_solve_finds_particular_solution() {
        // x + y = 3, x - y = 1  =>  x = 2, y = 1
        let m = vec![vec![g(1), g(1)], vec![g(1), g(-1)]];
        let (x, kernel) = solve_affine(&m, &[g(3), g(1)]).unwrap();
        assert_eq!(x, vec![g(2), g(1)]);
        assert!(kernel.is_empty());
    }

    #[test]
    fn inconsistent_system_detected() {
        let m = vec![vec![g(1), g(1)], vec![g(2), g(2)]];
        assert!(solve_affine(&m, &[g(1), g(3)]).is_none());
    }

    #[test]
    fn underdetermined_affine_system() {
        // 3x + 5y = 8: canonical particular (8/3, 0), kernel (-5/3, 1).
        let m = vec![vec![g(3), g(5)]];
        let (x, kernel) = solve_affine(&m, &[g(8)]).unwrap();
        assert_eq!(x, vec![GaussianRational::from_ratio(8, 3), g(0)]);
        assert_eq!(kernel.len(), 1);
        assert_eq!(kernel[0], vec![GaussianRational::from_ratio(-5, 3), g(1)]);
    }

    #[test]
    fn complex_pivots() {
        // i*x = 1 + i  =>  x = 1 - i... actually (1+i)/i = 1 - i... check: i*(1-i) = i - i^2 = 1 + i
        let m = vec![vec![GaussianRational::i()]];
        let b = vec![&g(1) + &GaussianRational::i()];
        let (x, _) = solve_affine(&m, &b).unwrap();
        assert_eq!(&x[0] * &GaussianRational::i(), b[0]);
    }
}
