use super::{FieldDesc, FieldElem};

/// Row-reduced echelon form of a list of row vectors.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub rows: Vec<Vec<FieldElem>>,
    pub pivots: Vec<usize>,
    pub ncols: usize,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduce a vector against the echelon rows, clearing pivot positions.
    pub fn reduce(&self, v: &mut [FieldElem], f: &FieldDesc) {
        for (row, &pc) in self.rows.iter().zip(&self.pivots) {
            let c = v[pc];
            if c.is_zero() {
                continue;
            }
            axpy(v, f.neg(c), row, f);
        }
    }

    pub fn contains(&self, v: &[FieldElem], f: &FieldDesc) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w, f);
        w.iter().all(|c| c.is_zero())
    }

    /// Coordinates of a vector of the row space in terms of the echelon rows.
    pub fn coordinates(&self, v: &[FieldElem]) -> Vec<FieldElem> {
        self.pivots.iter().map(|&p| v[p]).collect()
    }
}

/// v += c·w
#[inline]
pub fn axpy(v: &mut [FieldElem], c: FieldElem, w: &[FieldElem], f: &FieldDesc) {
    if c.is_zero() {
        return;
    }
    for (x, &y) in v.iter_mut().zip(w) {
        if !y.is_zero() {
            *x = f.add(*x, f.mul(c, y));
        }
    }
}

pub fn rref(rows: Vec<Vec<FieldElem>>, ncols: usize, f: &FieldDesc) -> Echelon {
    let mut m = rows;
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        if r == m.len() {
            break;
        }
        let Some(sel) = (r..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(r, sel);
        let inv = f.inv(m[r][col]);
        for x in m[r].iter_mut() {
            *x = f.mul(*x, inv);
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[col].is_zero() {
                let c = f.neg(row[col]);
                axpy(row, c, &pivot_row, f);
            }
        }
        pivots.push(col);
        r += 1;
    }
    m.truncate(r);
    Echelon {
        rows: m,
        pivots,
        ncols,
    }
}

pub fn rank(rows: &[Vec<FieldElem>], ncols: usize, f: &FieldDesc) -> usize {
    rref(rows.to_vec(), ncols, f).rank()
}

/// Basis of {x : A x = 0}, returned in reduced echelon form.
pub fn nullspace(rows: &[Vec<FieldElem>], ncols: usize, f: &FieldDesc) -> Vec<Vec<FieldElem>> {
    let e = rref(rows.to_vec(), ncols, f);
    let mut is_pivot = vec![false; ncols];
    for &p in &e.pivots {
        is_pivot[p] = true;
    }
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![FieldElem::ZERO; ncols];
        v[free] = FieldElem::ONE;
        for (row, &pc) in e.rows.iter().zip(&e.pivots) {
            v[pc] = f.neg(row[free]);
        }
        basis.push(v);
    }
    rref(basis, ncols, f).rows
}

/// Matrix-vector product with the matrix given by rows.
pub fn apply(rows: &[Vec<FieldElem>], v: &[FieldElem], f: &FieldDesc) -> Vec<FieldElem> {
    rows.iter()
        .map(|row| {
            row.iter().zip(v).fold(FieldElem::ZERO, |acc, (&a, &b)| {
                if a.is_zero() || b.is_zero() {
                    acc
                } else {
                    f.add(acc, f.mul(a, b))
                }
            })
        })
        .collect()
}

/// Transpose a dense matrix.
pub fn transpose(rows: &[Vec<FieldElem>], ncols: usize) -> Vec<Vec<FieldElem>> {
    (0..ncols)
        .map(|c| rows.iter().map(|r| r[c]).collect())
        .collect()
}
