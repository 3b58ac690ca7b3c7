/// One envelope inequality `X ≥ a·x_i + b·x_j + c` (lower) or `X ≤ …` (upper).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeRow {
    pub slope_i: f64,
    pub slope_j: f64,
    pub intercept: f64,
    pub upper: bool,
}

impl EnvelopeRow {
    /// Signed slack at `(x_i, x_j, X)`; negative means violated.
    pub fn slack(&self, xi: f64, xj: f64, prod: f64) -> f64 {
        let rhs = self.slope_i * xi + self.slope_j * xj + self.intercept;
        if self.upper {
            rhs - prod
        } else {
            prod - rhs
        }
    }
}

/// McCormick envelope of `X_ij = x_i x_j` over a box, in lifted indices
/// (`x_i = Y_0i`, `X_ij = Y_ij`, `i, j >= 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct McCormickRow {
    pub pair: (usize, usize),
    pub rows: Vec<EnvelopeRow>,
}

/// The four envelope inequalities for `(i, j)` over `[li, ui] x [lj, uj]`.
/// For `i == j` the two concave rows coincide and only one is kept.
pub fn mccormick_rows(
    i: usize,
    j: usize,
    (li, ui): (f64, f64),
    (lj, uj): (f64, f64),
) -> McCormickRow {
    debug_assert!(li <= ui && lj <= uj);
    let lower = |a: f64, b: f64| EnvelopeRow {
        slope_i: b,
        slope_j: a,
        intercept: -a * b,
        upper: false,
    };
    let upper = |a: f64, b: f64| EnvelopeRow {
        slope_i: b,
        slope_j: a,
        intercept: -a * b,
        upper: true,
    };
    let mut rows = vec![lower(li, lj), lower(ui, uj), upper(li, uj)];
    if i != j {
        rows.push(upper(ui, lj));
    }
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    McCormickRow { pair: (i, j), rows }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rendered(r: &EnvelopeRow) -> (f64, f64, f64, bool) {
        (r.slope_i, r.slope_j, r.intercept, r.upper)
    }

    #[test]
    fn unit_box_bilinear() {
        let m = mccormick_rows(1, 2, (0.0, 1.0), (0.0, 1.0));
        let got: Vec<_> = m.rows.iter().map(rendered).collect();
        // X >= 0, X >= x_i + x_j - 1, X <= x_i, X <= x_j
        assert_eq!(
            got,
            vec![
                (0.0, 0.0, -0.0, false),
                (1.0, 1.0, -1.0, false),
                (1.0, 0.0, -0.0, true),
                (0.0, 1.0, -0.0, true)
            ]
        );
    }

    #[test]
    fn unit_box_square_collapses_concave_rows() {
        let m = mccormick_rows(1, 1, (0.0, 1.0), (0.0, 1.0));
        assert_eq!(m.rows.len(), 3);
        // X >= 0, X >= 2x - 1, X <= x
        let xs = [0.0, 0.25, 0.5, 1.0];
        for &x in &xs {
            assert!(m.rows.iter().all(|r| r.slack(x, x, x * x) >= 0.0));
        }
        assert_eq!(m.rows[1].slack(0.5, 0.5, 0.0), 0.0);
        assert_eq!(m.rows[2].slack(0.5, 0.5, 0.5), 0.0);
    }

    #[test]
    fn random_boxes_never_violated() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let (a, b): (f64, f64) = (rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
            let (c, d): (f64, f64) = (rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
            let bi = (a.min(b), a.max(b));
            let bj = (c.min(d), c.max(d));
            let m = mccormick_rows(1, 2, bi, bj);
            for _ in 0..500 {
                let xi = rng.gen_range(bi.0..=bi.1);
                let xj = rng.gen_range(bj.0..=bj.1);
                for r in &m.rows {
                    assert!(r.slack(xi, xj, xi * xj) >= -1e-12);
                }
            }
        }
    }
}
