//! Sparse LU factorization of simplex bases with Markowitz pivoting, plus
//! product-form eta updates between refactorizations.

#![allow(clippy::needless_range_loop)]

use crate::scalar::Scalar;

const NONE: usize = usize::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Singular;

/// Doubly linked lists of indices bucketed by a count.
struct Buckets {
    head: Vec<usize>,
    next: Vec<usize>,
    prev: Vec<usize>,
    count: Vec<usize>,
    live: Vec<bool>,
}

impl Buckets {
    fn new(n: usize, max_count: usize) -> Self {
        Buckets {
            head: vec![NONE; max_count + 2],
            next: vec![NONE; n],
            prev: vec![NONE; n],
            count: vec![0; n],
            live: vec![false; n],
        }
    }

    fn insert(&mut self, x: usize, c: usize) {
        let c = c.min(self.head.len() - 1);
        self.count[x] = c;
        self.live[x] = true;
        self.prev[x] = NONE;
        self.next[x] = self.head[c];
        if self.head[c] != NONE {
            self.prev[self.head[c]] = x;
        }
        self.head[c] = x;
    }

    fn remove(&mut self, x: usize) {
        if !self.live[x] {
            return;
        }
        let (p, n) = (self.prev[x], self.next[x]);
        if p != NONE {
            self.next[p] = n;
        } else {
            self.head[self.count[x]] = n;
        }
        if n != NONE {
            self.prev[n] = p;
        }
        self.live[x] = false;
    }

    fn update(&mut self, x: usize, c: usize) {
        if self.live[x] {
            self.remove(x);
            self.insert(x, c);
        }
    }
}

/// `B = P^T L U Q^T` stored as the ordered list of pivots.
#[derive(Clone, Debug)]
pub struct LuFactors<T> {
    m: usize,
    prow: Vec<usize>,
    pcol: Vec<usize>,
    diag: Vec<T>,
    /// Multipliers applied to other rows when pivot `k` was eliminated.
    lower: Vec<Vec<(usize, T)>>,
    /// Off-diagonal entries of the pivot row `k`, by column.
    upper: Vec<Vec<(usize, T)>>,
}

impl<T: Scalar> LuFactors<T> {
    /// Factorizes the square matrix whose column `j` is `cols[j]` (row, value).
    pub fn factorize(m: usize, cols: &[Vec<(usize, T)>]) -> Result<Self, Singular> {
        assert_eq!(cols.len(), m);
        let drop_tol = T::epsilon() * T::of(16.0);
        let mut rows: Vec<Vec<(usize, T)>> = vec![Vec::new(); m];
        let mut col_pat: Vec<Vec<usize>> = vec![Vec::new(); m];
        for (j, col) in cols.iter().enumerate() {
            for &(i, v) in col {
                if v.abs() > drop_tol {
                    rows[i].push((j, v));
                    col_pat[j].push(i);
                }
            }
        }
        let mut col_count: Vec<usize> = col_pat.iter().map(Vec::len).collect();
        let mut row_done = vec![false; m];
        let mut col_b = Buckets::new(m, m);
        let mut row_b = Buckets::new(m, m);
        for j in 0..m {
            col_b.insert(j, col_count[j]);
        }
        for (i, r) in rows.iter().enumerate() {
            row_b.insert(i, r.len());
        }
        let mut marker = vec![NONE; m];
        let mut lu = LuFactors {
            m,
            prow: Vec::with_capacity(m),
            pcol: Vec::with_capacity(m),
            diag: Vec::with_capacity(m),
            lower: Vec::with_capacity(m),
            upper: Vec::with_capacity(m),
        };

        let value_at = |rows: &Vec<Vec<(usize, T)>>, i: usize, j: usize| -> Option<T> {
            rows[i].iter().find(|e| e.0 == j).map(|e| e.1)
        };
        let active_rows =
            |col_pat: &Vec<Vec<usize>>, rows: &Vec<Vec<(usize, T)>>, row_done: &[bool], j: usize| -> Vec<usize> {
                let mut out: Vec<usize> =
                    col_pat[j].iter().copied().filter(|&i| !row_done[i] && rows[i].iter().any(|e| e.0 == j)).collect();
                out.sort_unstable();
                out.dedup();
                out
            };

        for _ in 0..m {
            // empty active column => structurally singular
            if col_b.head[0] != NONE {
                return Err(Singular);
            }
            let mut choice: Option<(usize, usize, T)> = None;
            if col_b.head[1] != NONE {
                let j = col_b.head[1];
                let i = active_rows(&col_pat, &rows, &row_done, j)[0];
                choice = Some((i, j, value_at(&rows, i, j).unwrap()));
            }
            if choice.is_none() && row_b.head[1] != NONE {
                let mut i = row_b.head[1];
                while i != NONE {
                    let (j, v) = rows[i][0];
                    let cmax = active_rows(&col_pat, &rows, &row_done, j)
                        .iter()
                        .map(|&r| value_at(&rows, r, j).unwrap().abs())
                        .fold(T::zero(), T::max);
                    if v.abs() >= T::of(0.01) * cmax {
                        choice = Some((i, j, v));
                        break;
                    }
                    i = row_b.next[i];
                }
            }
            if choice.is_none() {
                let mut best: Option<(usize, usize, usize, T)> = None;
                let mut examined = 0;
                'search: for c in 2..col_b.head.len() {
                    let mut j = col_b.head[c];
                    while j != NONE {
                        let rs = active_rows(&col_pat, &rows, &row_done, j);
                        let vals: Vec<T> = rs.iter().map(|&r| value_at(&rows, r, j).unwrap()).collect();
                        let cmax = vals.iter().fold(T::zero(), |a, v| a.max(v.abs()));
                        for (&r, &v) in rs.iter().zip(&vals) {
                            if v.abs() < T::of(0.1) * cmax {
                                continue;
                            }
                            let cost = (rows[r].len() - 1) * (rs.len() - 1);
                            if best.is_none_or(|b| cost < b.2) {
                                best = Some((r, j, cost, v));
                            }
                        }
                        examined += 1;
                        if examined >= 4 {
                            break 'search;
                        }
                        j = col_b.next[j];
                    }
                }
                choice = best.map(|(i, j, _, v)| (i, j, v));
            }
            let (p, q, pv) = choice.ok_or(Singular)?;
            if pv.abs() <= drop_tol {
                return Err(Singular);
            }

            let pivot_row = std::mem::take(&mut rows[p]);
            row_done[p] = true;
            row_b.remove(p);
            col_b.remove(q);
            let urow: Vec<(usize, T)> = pivot_row.iter().copied().filter(|e| e.0 != q).collect();
            for &(j, _) in &urow {
                col_count[j] -= 1;
                col_b.update(j, col_count[j]);
            }
            let mut lcol = Vec::new();
            for i in active_rows(&col_pat, &rows, &row_done, q) {
                let aiq = value_at(&rows, i, q).unwrap();
                let l = aiq / pv;
                lcol.push((i, l));
                rows[i].retain(|e| e.0 != q);
                for (k, e) in rows[i].iter().enumerate() {
                    marker[e.0] = k;
                }
                for &(j, u) in &urow {
                    let k = marker[j];
                    if k != NONE {
                        rows[i][k].1 = rows[i][k].1 - l * u;
                    } else {
                        rows[i].push((j, -(l * u)));
                        marker[j] = rows[i].len() - 1;
                        col_count[j] += 1;
                        col_pat[j].push(i);
                        col_b.update(j, col_count[j]);
                    }
                }
                for e in &rows[i] {
                    marker[e.0] = NONE;
                }
                let mut dropped = Vec::new();
                rows[i].retain(|e| {
                    let keep = e.1.abs() > drop_tol;
                    if !keep {
                        dropped.push(e.0);
                    }
                    keep
                });
                for j in dropped {
                    col_count[j] -= 1;
                    col_b.update(j, col_count[j]);
                }
                row_b.update(i, rows[i].len());
            }
            lu.prow.push(p);
            lu.pcol.push(q);
            lu.diag.push(pv);
            lu.lower.push(lcol);
            lu.upper.push(urow);
        }
        Ok(lu)
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    /// Solves `B x = b`; `b` is indexed by row, the result by column.
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let mut w = b.to_vec();
        for k in 0..self.m {
            let bp = w[self.prow[k]];
            if bp != T::zero() {
                for &(i, l) in &self.lower[k] {
                    w[i] = w[i] - l * bp;
                }
            }
        }
        let mut x = vec![T::zero(); self.m];
        for k in (0..self.m).rev() {
            let mut acc = w[self.prow[k]];
            for &(j, u) in &self.upper[k] {
                acc = acc - u * x[j];
            }
            x[self.pcol[k]] = acc / self.diag[k];
        }
        x
    }

    /// Solves `y^T B = c^T`; `c` is indexed by column, the result by row.
    pub fn solve_transposed(&self, c: &[T]) -> Vec<T> {
        let mut c = c.to_vec();
        let mut w = vec![T::zero(); self.m];
        for k in 0..self.m {
            let wk = c[self.pcol[k]] / self.diag[k];
            w[self.prow[k]] = wk;
            if wk != T::zero() {
                for &(j, u) in &self.upper[k] {
                    c[j] = c[j] - u * wk;
                }
            }
        }
        for k in (0..self.m).rev() {
            let s: T = self.lower[k].iter().map(|&(i, l)| l * w[i]).sum();
            let p = self.prow[k];
            w[p] = w[p] - s;
        }
        w
    }
}

/// Basis inverse as an LU factorization followed by eta columns, one per
/// pivot since the last refactorization.
#[derive(Clone, Debug)]
pub struct BasisFactor<T> {
    lu: LuFactors<T>,
    etas: Vec<Eta<T>>,
}

#[derive(Clone, Debug)]
struct Eta<T> {
    pos: usize,
    pivot: T,
    others: Vec<(usize, T)>,
}

impl<T: Scalar> BasisFactor<T> {
    pub fn new(m: usize, cols: &[Vec<(usize, T)>]) -> Result<Self, Singular> {
        Ok(BasisFactor { lu: LuFactors::factorize(m, cols)?, etas: Vec::new() })
    }

    pub fn eta_count(&self) -> usize {
        self.etas.len()
    }

    /// `B^{-1} b`, indexed by basis position.
    pub fn ftran(&self, b: &[T]) -> Vec<T> {
        let mut x = self.lu.solve(b);
        for eta in &self.etas {
            let xr = x[eta.pos] / eta.pivot;
            if xr != T::zero() {
                for &(i, a) in &eta.others {
                    x[i] = x[i] - a * xr;
                }
            }
            x[eta.pos] = xr;
        }
        x
    }

    /// `B^{-T} c` for `c` indexed by basis position; result indexed by row.
    pub fn btran(&self, c: &[T]) -> Vec<T> {
        let mut c = c.to_vec();
        for eta in self.etas.iter().rev() {
            let s: T = eta.others.iter().map(|&(i, a)| a * c[i]).sum();
            c[eta.pos] = (c[eta.pos] - s) / eta.pivot;
        }
        self.lu.solve_transposed(&c)
    }

    /// Records that the column whose FTRAN image is `alpha` replaced the
    /// basic variable at position `pos`.
    pub fn push_eta(&mut self, pos: usize, alpha: &[T]) {
        let drop_tol = T::epsilon();
        let others =
            alpha.iter().enumerate().filter(|&(i, a)| i != pos && a.abs() > drop_tol).map(|(i, &a)| (i, a)).collect();
        self.etas.push(Eta { pos, pivot: alpha[pos], others });
    }
}
