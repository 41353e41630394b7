//! Smith normal form of small integer matrices, tracking the column transform.

/// Result of `U·A·V = D` with `D` diagonal; only `V` and `V⁻¹` are kept.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Smith {
    /// Nonnegative diagonal, each entry dividing the next (zeros last).
    pub diag: Vec<i64>,
    pub v: Vec<Vec<i64>>,
    pub v_inv: Vec<Vec<i64>>,
}

fn identity(n: usize) -> Vec<Vec<i64>> {
    (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect()
}

struct Work {
    a: Vec<Vec<i64>>,
    v: Vec<Vec<i64>>,
    v_inv: Vec<Vec<i64>>,
    cols: usize,
}

impl Work {
    fn swap_cols(&mut self, j: usize, k: usize) {
        if j == k {
            return;
        }
        for row in self.a.iter_mut().chain(self.v.iter_mut()) {
            row.swap(j, k);
        }
        self.v_inv.swap(j, k);
    }

    /// col_j -= q·col_t
    fn sub_col(&mut self, j: usize, t: usize, q: i64) {
        for row in self.a.iter_mut().chain(self.v.iter_mut()) {
            row[j] -= q * row[t];
        }
        for c in 0..self.cols {
            let add = q * self.v_inv[j][c];
            self.v_inv[t][c] += add;
        }
    }

    /// row_i -= q·row_t
    fn sub_row(&mut self, i: usize, t: usize, q: i64) {
        for c in 0..self.cols {
            let s = q * self.a[t][c];
            self.a[i][c] -= s;
        }
    }

    fn add_row(&mut self, t: usize, i: usize) {
        for c in 0..self.cols {
            let s = self.a[i][c];
            self.a[t][c] += s;
        }
    }

    /// Moves the smallest nonzero entry of the trailing block to (t, t).
    fn pivot(&mut self, t: usize) -> bool {
        let mut best: Option<(usize, usize)> = None;
        for i in t..self.a.len() {
            for j in t..self.cols {
                let x = self.a[i][j].abs();
                if x != 0 && best.is_none_or(|(bi, bj)| x < self.a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        match best {
            Some((i, j)) => {
                self.a.swap(t, i);
                self.swap_cols(t, j);
                true
            }
            None => false,
        }
    }
}

pub fn smith(a: &[Vec<i64>], cols: usize) -> Smith {
    let rows = a.len();
    let mut w = Work {
        a: a.to_vec(),
        v: identity(cols),
        v_inv: identity(cols),
        cols,
    };
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        if !w.pivot(t) {
            break;
        }
        loop {
            let p = w.a[t][t];
            let mut dirty = false;
            for i in t + 1..rows {
                let q = w.a[i][t].div_euclid(p);
                if q != 0 {
                    w.sub_row(i, t, q);
                }
                dirty |= w.a[i][t] != 0;
            }
            for j in t + 1..cols {
                let q = w.a[t][j].div_euclid(p);
                if q != 0 {
                    w.sub_col(j, t, q);
                }
                dirty |= w.a[t][j] != 0;
            }
            if dirty {
                w.pivot(t);
                continue;
            }
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| w.a[i][j] % p != 0));
            match bad {
                Some(i) => {
                    w.add_row(t, i);
                    continue;
                }
                None => break,
            }
        }
        diag.push(w.a[t][t].abs());
        t += 1;
    }
    diag.resize(cols, 0);
    Smith {
        diag,
        v: w.v,
        v_inv: w.v_inv,
    }
}
