use super::ccp::CcpRefiner;
use crate::backend::ConicBackend;
use crate::model::{QcqpInstance, QuadraticFunction};

/// Constraint tolerance of the grid oracle.
pub const GRID_FEAS_TOL: f64 = 1e-9;

/// Dense copy of a quadratic for coordinate-wise restriction.
struct DenseQuadratic {
    n: usize,
    q: Vec<f64>,
    c: Vec<f64>,
    d: f64,
}

impl DenseQuadratic {
    fn new(f: &QuadraticFunction, n: usize) -> Self {
        let mut q = vec![0.0; n * n];
        for &(i, j, v) in f.q.entries() {
            q[i * n + j] = v;
            q[j * n + i] = v;
        }
        Self {
            n,
            q,
            c: f.c.clone(),
            d: f.d,
        }
    }

    /// `(a, b, k)` with `f(x + (t - x_i) e_i) = a t² + b t + k`.
    fn restrict(&self, x: &[f64], i: usize) -> (f64, f64, f64) {
        let row = &self.q[i * self.n..(i + 1) * self.n];
        let a = row[i];
        let cross: f64 = row
            .iter()
            .zip(x)
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, (q, x))| q * x)
            .sum();
        let b = 2.0 * cross + self.c[i];
        let k = self.eval(x) - a * x[i] * x[i] - b * x[i];
        (a, b, k)
    }

    fn eval(&self, x: &[f64]) -> f64 {
        let mut v = self.d;
        for i in 0..self.n {
            let row = &self.q[i * self.n..(i + 1) * self.n];
            v += x[i] * (self.c[i] + row.iter().zip(x).map(|(q, x)| q * x).sum::<f64>());
        }
        v
    }
}

/// Sub-intervals of `[lo, hi]` where `a t² + b t + k <= 0`.
fn sublevel(a: f64, b: f64, k: f64, lo: f64, hi: f64) -> Vec<(f64, f64)> {
    let scale = a.abs().max(b.abs()).max(k.abs()).max(1.0);
    let clip = |segs: Vec<(f64, f64)>| -> Vec<(f64, f64)> {
        segs.into_iter()
            .map(|(s, e)| (s.max(lo), e.min(hi)))
            .filter(|(s, e)| s <= e)
            .collect()
    };
    if a.abs() <= 1e-14 * scale {
        if b.abs() <= 1e-14 * scale {
            return if k <= 0.0 { vec![(lo, hi)] } else { Vec::new() };
        }
        let r = -k / b;
        return clip(if b > 0.0 {
            vec![(f64::NEG_INFINITY, r)]
        } else {
            vec![(r, f64::INFINITY)]
        });
    }
    let disc = b * b - 4.0 * a * k;
    if disc < 0.0 {
        return if a < 0.0 { vec![(lo, hi)] } else { Vec::new() };
    }
    let sq = disc.sqrt();
    // numerically stable roots
    let qq = -0.5 * (b + b.signum() * sq);
    let (mut r1, mut r2) = if qq == 0.0 {
        (0.0, 0.0)
    } else {
        (qq / a, k / qq)
    };
    if r1 > r2 {
        std::mem::swap(&mut r1, &mut r2);
    }
    clip(if a > 0.0 {
        vec![(r1, r2)]
    } else {
        vec![(f64::NEG_INFINITY, r1), (r2, f64::INFINITY)]
    })
}

fn intersect(a: &[(f64, f64)], b: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for &(s1, e1) in a {
        for &(s2, e2) in b {
            let (s, e) = (s1.max(s2), e1.min(e2));
            if s <= e {
                out.push((s, e));
            }
        }
    }
    out
}

/// Exact coordinate descent: each step minimizes the objective along one axis
/// over the set where every constraint is nonpositive. Starts must satisfy
/// the constraints within `tol`; a coordinate only moves to points with no
/// violation.
pub struct Polisher {
    objective: DenseQuadratic,
    constraints: Vec<DenseQuadratic>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    tol: f64,
}

impl Polisher {
    pub fn new(instance: &QcqpInstance, tol: f64) -> Self {
        let n = instance.n();
        Self {
            objective: DenseQuadratic::new(instance.objective(), n),
            constraints: instance
                .constraints()
                .iter()
                .map(|f| DenseQuadratic::new(f, n))
                .collect(),
            lower: instance.lower().to_vec(),
            upper: instance.upper().to_vec(),
            tol,
        }
    }

    pub fn polish(&self, start: &[f64]) -> Option<(f64, Vec<f64>)> {
        let mut x = start.to_vec();
        for (v, (l, u)) in x.iter_mut().zip(self.lower.iter().zip(&self.upper)) {
            *v = v.clamp(*l, *u);
        }
        if self.constraints.iter().any(|g| g.eval(&x) > self.tol) {
            return None;
        }
        let mut value = self.objective.eval(&x);
        for _ in 0..200 {
            let before = value;
            for i in 0..x.len() {
                let mut feasible = vec![(self.lower[i], self.upper[i])];
                for g in &self.constraints {
                    let (a, b, k) = g.restrict(&x, i);
                    feasible =
                        intersect(&feasible, &sublevel(a, b, k, self.lower[i], self.upper[i]));
                }
                let (a, b, k) = self.objective.restrict(&x, i);
                let f = |t: f64| (a * t + b) * t + k;
                let mut best = (f(x[i]), x[i]);
                for &(s, e) in &feasible {
                    let mut candidates = vec![s, e];
                    if a > 0.0 {
                        candidates.push((-b / (2.0 * a)).clamp(s, e));
                    }
                    for t in candidates {
                        if f(t) < best.0 {
                            best = (f(t), t);
                        }
                    }
                }
                x[i] = best.1;
            }
            value = self.objective.eval(&x);
            if before - value <= 1e-12 * value.abs().max(1.0) {
                break;
            }
        }
        let ok = self.constraints.iter().all(|g| g.eval(&x) <= self.tol);
        ok.then_some((value, x))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridResult {
    /// Best feasible grid point.
    pub grid_value: f64,
    pub grid_x: Vec<f64>,
    /// Best value after polishing the leading grid points.
    pub value: f64,
    pub x: Vec<f64>,
    pub feasible_points: usize,
}

/// Number of best grid points handed to the polisher.
const POLISH_STARTS: usize = 16;

/// Uniform grid with `resolution` points per axis, followed by coordinate
/// descent from the best feasible points. `None` when no grid point is
/// feasible (not a proof of infeasibility).
pub fn brute_force_grid(instance: &QcqpInstance, resolution: usize) -> Option<GridResult> {
    grid_search(instance, resolution, None)
}

/// [`brute_force_grid`] with every polished start further refined by
/// convex-concave steps.
pub fn grid_oracle(
    instance: &QcqpInstance,
    resolution: usize,
    backend: &dyn ConicBackend,
) -> Option<GridResult> {
    grid_search(
        instance,
        resolution,
        Some(&CcpRefiner::new(instance, backend, GRID_FEAS_TOL)),
    )
}

fn grid_search(
    instance: &QcqpInstance,
    resolution: usize,
    refiner: Option<&CcpRefiner>,
) -> Option<GridResult> {
    let n = instance.n();
    let resolution = resolution.max(2);
    let axis: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let (l, u) = (instance.lower()[i], instance.upper()[i]);
            (0..resolution)
                .map(|k| {
                    if k + 1 == resolution {
                        u
                    } else {
                        l + (u - l) * k as f64 / (resolution - 1) as f64
                    }
                })
                .collect()
        })
        .collect();
    let objective = DenseQuadratic::new(instance.objective(), n);
    let constraints: Vec<DenseQuadratic> = instance
        .constraints()
        .iter()
        .map(|f| DenseQuadratic::new(f, n))
        .collect();

    let mut best: Vec<(f64, Vec<f64>)> = Vec::new();
    let mut feasible_points = 0usize;
    let mut index = vec![0usize; n];
    let mut x: Vec<f64> = axis.iter().map(|a| a[0]).collect();
    loop {
        if constraints.iter().all(|g| g.eval(&x) <= GRID_FEAS_TOL) {
            feasible_points += 1;
            let v = objective.eval(&x);
            if best.len() < POLISH_STARTS || v < best[best.len() - 1].0 {
                let pos = best.partition_point(|(b, _)| *b <= v);
                best.insert(pos, (v, x.clone()));
                best.truncate(POLISH_STARTS);
            }
        }
        // odometer increment
        let mut k = 0;
        loop {
            if k == n {
                let (grid_value, grid_x) = best.first().cloned()?;
                let polisher = Polisher::new(instance, GRID_FEAS_TOL);
                let (value, x) = best
                    .iter()
                    .filter_map(|(_, p)| polisher.polish(p))
                    .flat_map(|(v, p)| {
                        let refined = refiner
                            .and_then(|r| r.refine(&p))
                            .and_then(|q| polisher.polish(&q.1));
                        std::iter::once((v, p)).chain(refined)
                    })
                    .chain(std::iter::once((grid_value, grid_x.clone())))
                    .min_by(|a, b| a.0.total_cmp(&b.0))
                    .expect("at least the grid point");
                return Some(GridResult {
                    grid_value,
                    grid_x,
                    value,
                    x,
                    feasible_points,
                });
            }
            index[k] += 1;
            if index[k] < resolution {
                x[k] = axis[k][index[k]];
                break;
            }
            index[k] = 0;
            x[k] = axis[k][0];
            k += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SparseSym;

    fn concave_1d() -> QcqpInstance {
        let f = QuadraticFunction::new(
            SparseSym::from_symmetric_entries([(0, 0, -1.0)]),
            vec![0.0],
            0.0,
        );
        QcqpInstance::new("neg-square", f, vec![], vec![0.0], vec![1.0]).unwrap()
    }

    #[test]
    fn grid_hits_endpoint() {
        let r = brute_force_grid(&concave_1d(), 11).unwrap();
        assert_eq!(r.grid_value, -1.0);
        assert_eq!(r.value, -1.0);
        assert_eq!(r.x, vec![1.0]);
    }

    #[test]
    fn convex_interior_optimum() {
        // (x - 0.3)^2 + (y - 0.71)^2 on [0,1]^2
        let f = QuadraticFunction::new(
            SparseSym::from_symmetric_entries([(0, 0, 1.0), (1, 1, 1.0)]),
            vec![-0.6, -1.42],
            0.09 + 0.5041,
        );
        let inst = QcqpInstance::new("convex", f, vec![], vec![0.0; 2], vec![1.0; 2]).unwrap();
        let r = brute_force_grid(&inst, 5).unwrap();
        assert!(r.value.abs() < 1e-12);
        assert!((r.x[0] - 0.3).abs() < 1e-9 && (r.x[1] - 0.71).abs() < 1e-9);
    }

    #[test]
    fn infeasible_grid_reports_none() {
        // x^2 - 0.0001 <= 0 with x in [0.5, 1]
        let g = QuadraticFunction::new(
            SparseSym::from_symmetric_entries([(0, 0, 1.0)]),
            vec![0.0],
            -1e-4,
        );
        let inst = QcqpInstance::new(
            "infeasible",
            concave_1d().objective().clone(),
            vec![g],
            vec![0.5],
            vec![1.0],
        )
        .unwrap();
        assert!(brute_force_grid(&inst, 7).is_none());
    }

    #[test]
    fn polish_respects_constraint_boundary() {
        // min -x - y  s.t.  x^2 + y^2 <= 1 on [0,1]^2
        let f = QuadraticFunction::new(SparseSym::new(), vec![-1.0, -1.0], 0.0);
        let g = QuadraticFunction::new(
            SparseSym::from_symmetric_entries([(0, 0, 1.0), (1, 1, 1.0)]),
            vec![0.0, 0.0],
            -1.0,
        );
        let inst =
            QcqpInstance::new("disk", f, vec![g.clone()], vec![0.0; 2], vec![1.0; 2]).unwrap();
        let (v, x) = Polisher::new(&inst, 0.0).polish(&[0.0, 0.0]).unwrap();
        assert!(g.eval(&x) <= 1e-12);
        assert!(v <= -1.0);
    }

    #[test]
    fn sublevel_cases() {
        assert_eq!(sublevel(1.0, 0.0, -1.0, -5.0, 5.0), vec![(-1.0, 1.0)]);
        assert_eq!(
            sublevel(-1.0, 0.0, 1.0, -5.0, 5.0),
            vec![(-5.0, -1.0), (1.0, 5.0)]
        );
        assert_eq!(sublevel(0.0, 2.0, -1.0, 0.0, 1.0), vec![(0.0, 0.5)]);
        assert!(sublevel(1.0, 0.0, 1.0, -1.0, 1.0).is_empty());
    }
}
