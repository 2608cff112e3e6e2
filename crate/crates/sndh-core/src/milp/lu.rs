//! Basis factorization for the simplex engine.
//!
//! Bases coming from network-design LPs are close to triangular, so the
//! factorization peels row and column singletons first -- those pivots cause
//! no fill and no numeric updates -- and runs dense Gaussian elimination with
//! partial pivoting only on the small remaining "bump".
//!
//! Factors are stored in elimination-position space. `L` is unit lower
//! triangular held by column; `U` is held both by column (for forward
//! solves) and by row (for transposed solves).

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Tolerance below which a pivot is considered numerically zero.
const PIVOT_TOL: f64 = 1e-11;

pub(crate) struct LuFactors {
    m: usize,
    /// elimination position -> original row.
    row_of: Vec<usize>,
    /// elimination position -> basis slot.
    slot_of: Vec<usize>,
    /// L by column: entries (position q > p, multiplier).
    l_cols: CompressedCols,
    /// U strictly-above-diagonal entries by column and by row.
    u_cols: CompressedCols,
    u_rows: CompressedCols,
    u_diag: Vec<f64>,
}

/// Simple CSC-like storage keyed by elimination position.
struct CompressedCols {
    ptr: Vec<usize>,
    idx: Vec<usize>,
    val: Vec<f64>,
}

impl CompressedCols {
    fn from_lists(lists: &[Vec<(usize, f64)>]) -> CompressedCols {
        let mut ptr = Vec::with_capacity(lists.len() + 1);
        ptr.push(0);
        let total: usize = lists.iter().map(|l| l.len()).sum();
        let mut idx = Vec::with_capacity(total);
        let mut val = Vec::with_capacity(total);
        for list in lists {
            for &(i, v) in list {
                idx.push(i);
                val.push(v);
            }
            ptr.push(idx.len());
        }
        CompressedCols { ptr, idx, val }
    }

    fn transpose(&self, m: usize) -> CompressedCols {
        let mut counts = vec![0usize; m + 1];
        for &i in &self.idx {
            counts[i + 1] += 1;
        }
        for p in 0..m {
            counts[p + 1] += counts[p];
        }
        let mut ptr = counts.clone();
        let mut idx = vec![0usize; self.idx.len()];
        let mut val = vec![0.0; self.idx.len()];
        for col in 0..self.ptr.len() - 1 {
            for e in self.ptr[col]..self.ptr[col + 1] {
                let row = self.idx[e];
                let dst = ptr[row];
                ptr[row] += 1;
                idx[dst] = col;
                val[dst] = self.val[e];
            }
        }
        CompressedCols { ptr: counts, idx, val }
    }

    #[inline]
    fn col(&self, p: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.idx[self.ptr[p]..self.ptr[p + 1]]
            .iter()
            .copied()
            .zip(self.val[self.ptr[p]..self.ptr[p + 1]].iter().copied())
    }
}

impl LuFactors {
    /// Factorizes the basis given by `column(slot)` -> sparse column entries.
    pub(crate) fn factorize<'a, F>(m: usize, column: F) -> Result<LuFactors>
    where
        F: Fn(usize) -> ColumnEntries<'a>,
    {
        // working copies of the basis in both orientations
        let mut col_entries: Vec<Vec<(usize, f64)>> = Vec::with_capacity(m);
        for slot in 0..m {
            let col: Vec<(usize, f64)> = match column(slot) {
                ColumnEntries::Sparse(rows, vals) => {
                    rows.iter().copied().zip(vals.iter().copied()).collect()
                }
                ColumnEntries::Unit(row, val) => vec![(row, val)],
            };
            col_entries.push(col);
        }
        let mut row_entries: Vec<Vec<(usize, f64)>> = vec![Vec::new(); m];
        for (slot, col) in col_entries.iter().enumerate() {
            for &(row, val) in col {
                row_entries[row].push((slot, val));
            }
        }

        let mut row_alive = vec![true; m];
        let mut col_alive = vec![true; m];
        let mut row_count: Vec<usize> = row_entries.iter().map(|r| r.len()).collect();
        let mut col_count: Vec<usize> = col_entries.iter().map(|c| c.len()).collect();
        if row_count.iter().any(|c| *c == 0) || col_count.iter().any(|c| *c == 0) {
            return Err(Error::Internal("structurally singular basis"));
        }

        let mut row_of = Vec::with_capacity(m);
        let mut slot_of = Vec::with_capacity(m);
        let mut row_pos = vec![usize::MAX; m];
        let mut slot_pos = vec![usize::MAX; m];
        // L/U entries recorded during peeling, in original row / slot ids;
        // remapped to positions once every pivot is placed.
        let mut l_raw: Vec<Vec<(usize, f64)>> = Vec::with_capacity(m);
        let mut u_raw: Vec<Vec<(usize, f64)>> = Vec::with_capacity(m);
        let mut u_diag = Vec::with_capacity(m);

        let mut col_queue: Vec<usize> = (0..m).filter(|&j| col_count[j] == 1).collect();
        let mut row_queue: Vec<usize> = (0..m).filter(|&i| row_count[i] == 1).collect();

        let mut place = |row: usize,
                         slot: usize,
                         pivot: f64,
                         l: Vec<(usize, f64)>,
                         u: Vec<(usize, f64)>,
                         row_of: &mut Vec<usize>,
                         slot_of: &mut Vec<usize>,
                         row_pos: &mut Vec<usize>,
                         slot_pos: &mut Vec<usize>| {
            let p = row_of.len();
            row_pos[row] = p;
            slot_pos[slot] = p;
            row_of.push(row);
            slot_of.push(slot);
            u_diag.push(pivot);
            l_raw.push(l);
            u_raw.push(u);
        };

        loop {
            // column singleton: pivot column is empty below the diagonal
            let mut progressed = false;
            while let Some(slot) = col_queue.pop() {
                if !col_alive[slot] || col_count[slot] != 1 {
                    continue;
                }
                let &(row, pivot) = col_entries[slot]
                    .iter()
                    .find(|(r, _)| row_alive[*r])
                    .expect("count said one alive entry");
                if pivot.abs() <= PIVOT_TOL {
                    return Err(Error::Internal("numerically singular basis (column singleton)"));
                }
                col_alive[slot] = false;
                row_alive[row] = false;
                let u: Vec<(usize, f64)> = row_entries[row]
                    .iter()
                    .filter(|(s, _)| col_alive[*s])
                    .copied()
                    .collect();
                for &(s, _) in &u {
                    col_count[s] -= 1;
                    if col_count[s] == 1 {
                        col_queue.push(s);
                    }
                }
                place(row, slot, pivot, Vec::new(), u, &mut row_of, &mut slot_of, &mut row_pos, &mut slot_pos);
                progressed = true;
            }
            // row singleton: pivot row is empty right of the diagonal
            while let Some(row) = row_queue.pop() {
                if !row_alive[row] || row_count[row] != 1 {
                    continue;
                }
                let &(slot, pivot) = row_entries[row]
                    .iter()
                    .find(|(s, _)| col_alive[*s])
                    .expect("count said one alive entry");
                if pivot.abs() <= PIVOT_TOL {
                    return Err(Error::Internal("numerically singular basis (row singleton)"));
                }
                row_alive[row] = false;
                col_alive[slot] = false;
                let l: Vec<(usize, f64)> = col_entries[slot]
                    .iter()
                    .filter(|(r, _)| row_alive[*r])
                    .map(|&(r, v)| (r, v / pivot))
                    .collect();
                for &(r, _) in &l {
                    row_count[r] -= 1;
                    if row_count[r] == 1 {
                        row_queue.push(r);
                    }
                }
                place(row, slot, pivot, l, Vec::new(), &mut row_of, &mut slot_of, &mut row_pos, &mut slot_pos);
                progressed = true;
                if col_queue.iter().any(|&s| col_alive[s] && col_count[s] == 1) {
                    break; // give column singletons priority again
                }
            }
            if !progressed {
                break;
            }
        }

        // dense elimination of whatever is left
        let bump_rows: Vec<usize> = (0..m).filter(|&i| row_alive[i]).collect();
        let bump_cols: Vec<usize> = (0..m).filter(|&j| col_alive[j]).collect();
        let r = bump_rows.len();
        debug_assert_eq!(r, bump_cols.len());
        if r > 0 {
            let mut dense = vec![0.0; r * r];
            let mut bump_row_pos = vec![usize::MAX; m];
            for (bi, &row) in bump_rows.iter().enumerate() {
                bump_row_pos[row] = bi;
            }
            for (bj, &slot) in bump_cols.iter().enumerate() {
                for &(row, val) in &col_entries[slot] {
                    if row_alive[row] {
                        dense[bump_row_pos[row] * r + bj] = val;
                    }
                }
            }
            // row permutation of the dense block from partial pivoting
            let mut perm: Vec<usize> = (0..r).collect();
            for k in 0..r {
                let mut best = k;
                let mut best_val = dense[perm[k] * r + k].abs();
                for (cand, &pr) in perm.iter().enumerate().skip(k + 1) {
                    let v = dense[pr * r + k].abs();
                    if v > best_val {
                        best_val = v;
                        best = cand;
                    }
                }
                if best_val <= PIVOT_TOL {
                    return Err(Error::Internal("numerically singular basis (bump)"));
                }
                perm.swap(k, best);
                let prow = perm[k];
                let pivot = dense[prow * r + k];
                let mut l = Vec::new();
                for &qrow in &perm[k + 1..] {
                    let factor = dense[qrow * r + k] / pivot;
                    if factor != 0.0 {
                        dense[qrow * r + k] = 0.0;
                        for j in k + 1..r {
                            dense[qrow * r + j] -= factor * dense[prow * r + j];
                        }
                        l.push((bump_rows[qrow], factor));
                    }
                }
                let u: Vec<(usize, f64)> = (k + 1..r)
                    .filter(|&j| dense[prow * r + j] != 0.0)
                    .map(|j| (bump_cols[j], dense[prow * r + j]))
                    .collect();
                place(
                    bump_rows[prow],
                    bump_cols[k],
                    pivot,
                    l,
                    u,
                    &mut row_of,
                    &mut slot_of,
                    &mut row_pos,
                    &mut slot_pos,
                );
            }
        }

        debug_assert_eq!(row_of.len(), m);

        // remap L to row positions and U to slot positions
        let l_lists: Vec<Vec<(usize, f64)>> = l_raw
            .into_iter()
            .map(|list| list.into_iter().map(|(row, v)| (row_pos[row], v)).collect())
            .collect();
        let u_lists: Vec<Vec<(usize, f64)>> = u_raw
            .into_iter()
            .map(|list| list.into_iter().map(|(slot, v)| (slot_pos[slot], v)).collect())
            .collect();
        let l_cols = CompressedCols::from_lists(&l_lists);
        // u_lists[p] holds row p of U; store as rows and transpose for columns
        let u_rows = CompressedCols::from_lists(&u_lists);
        let u_cols = u_rows.transpose(m);
        Ok(LuFactors { m, row_of, slot_of, l_cols, u_cols, u_rows, u_diag })
    }

    /// Solves `B x = a`. Input `a` is indexed by original row, output by
    /// basis slot. `work` must have length `m`; it is used and cleared.
    pub(crate) fn solve(&self, a: &[f64], x: &mut [f64], work: &mut [f64]) {
        debug_assert_eq!(a.len(), self.m);
        for p in 0..self.m {
            work[p] = a[self.row_of[p]];
        }
        for p in 0..self.m {
            let wp = work[p];
            if wp != 0.0 {
                for (q, lv) in self.l_cols.col(p) {
                    work[q] -= lv * wp;
                }
            }
        }
        for p in (0..self.m).rev() {
            let xp = work[p] / self.u_diag[p];
            work[p] = xp;
            if xp != 0.0 {
                for (q, uv) in self.u_cols.col(p) {
                    work[q] -= uv * xp;
                }
            }
        }
        for p in 0..self.m {
            x[self.slot_of[p]] = work[p];
        }
    }

    /// Solves `B^T z = c`. Input `c` is indexed by basis slot, output by
    /// original row.
    pub(crate) fn solve_transposed(&self, c: &[f64], z: &mut [f64], work: &mut [f64]) {
        debug_assert_eq!(c.len(), self.m);
        for p in 0..self.m {
            work[p] = c[self.slot_of[p]];
        }
        for p in 0..self.m {
            let yp = work[p] / self.u_diag[p];
            work[p] = yp;
            if yp != 0.0 {
                for (q, uv) in self.u_rows.col(p) {
                    work[q] -= uv * yp;
                }
            }
        }
        for p in (0..self.m).rev() {
            let mut acc = work[p];
            for (q, lv) in self.l_cols.col(p) {
                acc -= lv * work[q];
            }
            work[p] = acc;
        }
        for p in 0..self.m {
            z[self.row_of[p]] = work[p];
        }
    }

}

/// Basis column content handed to the factorization.
pub(crate) enum ColumnEntries<'a> {
    Sparse(&'a [usize], &'a [f64]),
    /// A +/-1 unit column in the given row (slacks, artificials).
    Unit(usize, f64),
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factor_dense(matrix: &[&[f64]]) -> LuFactors {
        let m = matrix.len();
        let cols: Vec<(Vec<usize>, Vec<f64>)> = (0..m)
            .map(|j| {
                let mut rows = Vec::new();
                let mut vals = Vec::new();
                for i in 0..m {
                    if matrix[i][j] != 0.0 {
                        rows.push(i);
                        vals.push(matrix[i][j]);
                    }
                }
                (rows, vals)
            })
            .collect();
        LuFactors::factorize(m, |j| ColumnEntries::Sparse(&cols[j].0, &cols[j].1)).unwrap()
    }

    fn check_solchildren(matrix: &[&[f64]], rhs: &[f64]) {
        let m = matrix.len();
        let lu = factor_dense(matrix);
        let mut x = vec![0.0; m];
        let mut work = vec![0.0; m];
        lu.solve(rhs, &mut x, &mut work);
        for i in 0..m {
            let acc: f64 = (0..m).map(|j| matrix[i][j] * x[j]).sum();
            assert!((acc - rhs[i]).abs() < 1e-9, "row {i}: {acc} vs {}", rhs[i]);
        }
        let mut z = vec![0.0; m];
        lu.solve_transposed(rhs, &mut z, &mut work);
        for j in 0..m {
            let acc: f64 = (0..m).map(|i| matrix[i][j] * z[i]).sum();
            assert!((acc - rhs[j]).abs() < 1e-9, "col {j}: {acc} vs {}", rhs[j]);
        }
    }

    #[test]
    fn identity_and_permutation() {
        check_solchildren(&[&[1.0, 0.0], &[0.0, 1.0]], &[3.0, -2.0]);
        check_solchildren(&[&[0.0, 2.0], &[-1.0, 0.0]], &[4.0, 5.0]);
    }

    #[test]
    fn triangular_and_dense() {
        check_solchildren(
            &[&[2.0, 0.0, 0.0], &[1.0, 3.0, 0.0], &[-1.0, 4.0, 5.0]],
            &[2.0, 7.0, 1.0],
        );
        check_solchildren(
            &[&[4.0, 1.0, 2.0], &[2.0, 5.0, 1.0], &[1.0, 2.0, 6.0]],
            &[1.0, -2.0, 3.0],
        );
    }

    #[test]
    fn mixed_peel_and_bump() {
        // first two columns peel as singletons, the 3x3 tail is dense
        let matrix: &[&[f64]] = &[
            &[1.0, 0.0, 0.0, 0.0, 0.0],
            &[2.0, 1.0, 0.0, 0.0, 0.0],
            &[0.0, 3.0, 4.0, 1.0, 2.0],
            &[1.0, 0.0, 2.0, 5.0, 1.0],
            &[0.0, 1.0, 1.0, 2.0, 6.0],
        ];
        check_solchildren(matrix, &[1.0, 2.0, 3.0, 4.0, 5.0]);
    }

    #[test]
    fn singular_is_detected() {
        let m = 2;
        let rows: Vec<usize> = vec![0, 1];
        let vals: Vec<f64> = vec![1.0, 1.0];
        let result = LuFactors::factorize(m, |_| ColumnEntries::Sparse(&rows, &vals));
        assert!(result.is_err());
    }

    #[test]
    fn unit_columns() {
        let lu = LuFactors::factorize(3, |j| ColumnEntries::Unit(2 - j, if j == 1 { -1.0 } else { 1.0 }))
            .unwrap();
        let mut x = vec![0.0; 3];
        let mut work = vec![0.0; 3];
        lu.solve(&[5.0, 6.0, 7.0], &mut x, &mut work);
        assert_eq!(x, vec![7.0, -6.0, 5.0]);
    }
}

#[cfg(test)]
mod scale_tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    // network-flavored random basis: a permuted unit diagonal plus sparse
    // off-diagonal entries, so peeling leaves a nontrivial bump
    fn random_basis(m: usize, extra_per_col: usize, seed: u64) -> (Vec<Vec<usize>>, Vec<Vec<f64>>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut perm: Vec<usize> = (0..m).collect();
        for i in (1..m).rev() {
            let j = rng.random_range(0..=i);
            perm.swap(i, j);
        }
        let mut rows_per_col = Vec::with_capacity(m);
        let mut vals_per_col = Vec::with_capacity(m);
        for j in 0..m {
            let mut col = vec![(perm[j], if rng.random_bool(0.5) { 1.0 } else { -1.0 })];
            for _ in 0..rng.random_range(0..=extra_per_col) {
                let row = rng.random_range(0..m);
                if col.iter().all(|(r, _)| *r != row) {
                    col.push((row, rng.random_range(-3..=3) as f64));
                }
            }
            col.sort_by_key(|(r, _)| *r);
            rows_per_col.push(col.iter().map(|(r, _)| *r).collect());
            vals_per_col.push(col.iter().map(|(_, v)| *v).collect());
        }
        (rows_per_col, vals_per_col)
    }

    #[test]
    fn large_random_bases_solve_accurately() {
        for seed in 0..30u64 {
            let m = 50 + (seed as usize * 17) % 250;
            let (rows, vals) = random_basis(m, 3, seed);
            let lu = match LuFactors::factorize(m, |j| ColumnEntries::Sparse(&rows[j], &vals[j])) {
                Ok(lu) => lu,
                Err(_) => continue, // randomly singular draws are fine to skip
            };
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabcd);
            let a: Vec<f64> = (0..m).map(|_| rng.random_range(-5.0..5.0)).collect();
            let mut x = vec![0.0; m];
            let mut work = vec![0.0; m];
            lu.solve(&a, &mut x, &mut work);
            // residual of B x against a
            let mut residual = a.clone();
            for j in 0..m {
                for (&r, &v) in rows[j].iter().zip(&vals[j]) {
                    residual[r] -= v * x[j];
                }
            }
            let worst = residual.iter().fold(0.0_f64, |acc, r| acc.max(r.abs()));
            assert!(worst < 1e-8, "seed {seed} m {m}: solve residual {worst}");

            let mut z = vec![0.0; m];
            lu.solve_transposed(&a, &mut z, &mut work);
            for j in 0..m {
                let acc: f64 = rows[j].iter().zip(&vals[j]).map(|(&r, &v)| v * z[r]).sum();
                assert!((acc - a[j]).abs() < 1e-8, "seed {seed} m {m} col {j}");
            }
        }
    }
}
