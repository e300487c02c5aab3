//! Sparse Hermitian operators on truncated Fock spaces and the action of
//! their exponential on a state vector.

use crate::C64;

/// Hermitian operator in compressed sparse row form.
#[derive(Debug, Clone)]
pub struct SparseHermitian {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
}

/// Collects matrix elements; duplicates are summed.
#[derive(Debug, Clone)]
pub struct SparseBuilder {
    dim: usize,
    triplets: Vec<(usize, usize, C64)>,
}

impl SparseBuilder {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            triplets: Vec::new(),
        }
    }

    pub fn add(&mut self, row: usize, col: usize, v: C64) {
        assert!(row < self.dim && col < self.dim, "index out of range");
        if v != C64::new(0.0, 0.0) {
            self.triplets.push((row, col, v));
        }
    }

    /// Adds `v` at (row, col) and its conjugate at (col, row).
    pub fn add_hermitian_pair(&mut self, row: usize, col: usize, v: C64) {
        self.add(row, col, v);
        if row != col {
            self.add(col, row, v.conj());
        }
    }

    pub fn build(mut self) -> SparseHermitian {
        self.triplets.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; self.dim + 1];
        let mut cols = Vec::with_capacity(self.triplets.len());
        let mut vals: Vec<C64> = Vec::with_capacity(self.triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in self.triplets {
            if last == Some((r, c)) {
                *vals.last_mut().unwrap() += v;
                continue;
            }
            cols.push(c);
            vals.push(v);
            row_ptr[r + 1] += 1;
            last = Some((r, c));
        }
        for i in 0..self.dim {
            row_ptr[i + 1] += row_ptr[i];
        }
        SparseHermitian {
            dim: self.dim,
            row_ptr,
            cols,
            vals,
        }
    }
}

impl SparseHermitian {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    fn row(&self, i: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[span.clone()]
            .iter()
            .copied()
            .zip(self.vals[span].iter().copied())
    }

    /// `out = (H - shift) v`
    fn apply_shifted(&self, v: &[C64], shift: f64, out: &mut [C64]) {
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = -shift * v[i];
            for (j, h) in self.row(i) {
                acc += h * v[j];
            }
            *o = acc;
        }
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.dim];
        self.apply_shifted(v, 0.0, &mut out);
        out
    }

    /// `⟨v|H|v⟩`, real for Hermitian `H`.
    pub fn expectation(&self, v: &[C64]) -> f64 {
        let hv = self.apply(v);
        v.iter().zip(&hv).map(|(a, b)| (a.conj() * b).re).sum()
    }

    /// Largest deviation from Hermiticity, `max |H_ij − conj(H_ji)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for (j, h) in self.row(i) {
                let hji = self.row(j).find(|&(c, _)| c == i).map(|(_, v)| v);
                let d = match hji {
                    Some(v) => (h - v.conj()).norm(),
                    None => h.norm(),
                };
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Gershgorin enclosure `[lo, hi]` of the (real) spectrum.
    pub fn spectral_bounds(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..self.dim {
            let mut diag = 0.0;
            let mut radius = 0.0;
            for (j, h) in self.row(i) {
                if j == i {
                    diag = h.re;
                } else {
                    radius += h.norm();
                }
            }
            lo = lo.min(diag - radius);
            hi = hi.max(diag + radius);
        }
        if self.dim == 0 {
            (0.0, 0.0)
        } else {
            (lo, hi)
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<C64>> {
        let mut m = vec![vec![C64::new(0.0, 0.0); self.dim]; self.dim];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, h) in self.row(i) {
                row[j] = h;
            }
        }
        m
    }

    /// `exp(−i t H) v` by a scaled, shifted Taylor series.
    ///
    /// The spectrum is centred with its Gershgorin midpoint (the shift only
    /// contributes a global phase, which is restored), then the interval is
    /// split into substeps with `|t|·radius ≤ STEP_NORM` so each Taylor
    /// series converges to round-off in a few dozen terms.
    pub fn expm_action(&self, t: f64, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.dim, "state/operator dimension mismatch");
        const STEP_NORM: f64 = 2.0;
        const MAX_TERMS: usize = 120;
        let mut w = v.to_vec();
        if t == 0.0 || self.dim == 0 {
            return w;
        }
        let (lo, hi) = self.spectral_bounds();
        let shift = 0.5 * (lo + hi);
        let radius = 0.5 * (hi - lo);
        let steps = ((t.abs() * radius) / STEP_NORM).ceil().max(1.0) as usize;
        let h = t / steps as f64;
        let minus_ih = C64::new(0.0, -h);

        let mut term = vec![C64::new(0.0, 0.0); self.dim];
        let mut next = vec![C64::new(0.0, 0.0); self.dim];
        for _ in 0..steps {
            term.copy_from_slice(&w);
            let mut small_in_a_row = 0;
            for k in 1..=MAX_TERMS {
                self.apply_shifted(&term, shift, &mut next);
                let scale = minus_ih / k as f64;
                let mut term_norm = 0.0f64;
                let mut w_norm = 0.0f64;
                for ((t_i, n_i), w_i) in term.iter_mut().zip(&next).zip(w.iter_mut()) {
                    *t_i = n_i * scale;
                    *w_i += *t_i;
                    term_norm = term_norm.max(t_i.norm());
                    w_norm = w_norm.max(w_i.norm());
                }
                if term_norm <= 1e-17 * w_norm.max(1e-300) {
                    small_in_a_row += 1;
                    if small_in_a_row == 2 {
                        break;
                    }
                } else {
                    small_in_a_row = 0;
                }
            }
        }
        let phase = C64::from_polar(1.0, -shift * t);
        for x in &mut w {
            *x *= phase;
        }
        w
    }
}

pub fn norm_sqr(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum()
}

pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn random_hermitian(dim: usize, seed: u64) -> SparseHermitian {
        // small LCG keeps the test deterministic without pulling in rand
        let mut s = seed;
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let mut b = SparseBuilder::new(dim);
        for i in 0..dim {
            b.add(i, i, C64::new(10.0 * next(), 0.0));
            for j in (i + 1)..dim {
                if next() > 0.2 {
                    b.add_hermitian_pair(i, j, C64::new(3.0 * next(), 3.0 * next()));
                }
            }
        }
        b.build()
    }

    #[test]
    fn matches_dense_pade_exponential() {
        for (dim, seed, t) in [(6, 1, 0.3), (12, 7, 2.5), (20, 11, -4.0)] {
            let h = random_hermitian(dim, seed);
            assert!(h.hermiticity_defect() < 1e-15);
            let dense = h.to_dense();
            let m = DMatrix::from_fn(dim, dim, |i, j| dense[i][j] * C64::new(0.0, -t));
            let u = m.exp();
            let v: Vec<C64> = (0..dim).map(|k| C64::new(1.0 / (k + 1) as f64, 0.1 * k as f64)).collect();
            let expected: Vec<C64> = (0..dim)
                .map(|i| (0..dim).map(|j| u[(i, j)] * v[j]).sum())
                .collect();
            let got = h.expm_action(t, &v);
            let err = got
                .iter()
                .zip(&expected)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            assert!(err < 1e-11, "dim {dim}: err {err}");
        }
    }

    #[test]
    fn preserves_norm() {
        let h = random_hermitian(30, 3);
        let mut v = vec![C64::new(0.0, 0.0); 30];
        v[0] = C64::new(1.0, 0.0);
        let w = h.expm_action(37.0, &v);
        assert!((norm_sqr(&w) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn duplicates_are_summed() {
        let mut b = SparseBuilder::new(2);
        b.add(0, 1, C64::new(1.0, 0.0));
        b.add(0, 1, C64::new(2.0, 0.0));
        b.add(1, 0, C64::new(3.0, 0.0));
        let h = b.build();
        assert_eq!(h.nnz(), 2);
        assert_eq!(h.to_dense()[0][1], C64::new(3.0, 0.0));
    }

    #[test]
    fn zero_time_is_identity() {
        let h = random_hermitian(5, 5);
        let v = vec![C64::new(0.5, 0.5); 5];
        assert_eq!(h.expm_action(0.0, &v), v);
    }
}
