use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::model::{QcqpInstance, QuadraticFunction, SparseSym};

/// Parameters of a random box-constrained QCQP on `[0, 1]^n`.
///
/// Randomness comes from ChaCha8 seeded with `seed`: stream 0 decides the
/// sparsity structure, stream 1 draws every coefficient. Both streams are
/// consumed in a fixed order, so instances are identical across platforms.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig {
    pub n: usize,
    /// Probability that a strictly upper-triangular objective entry is nonzero.
    pub density: f64,
    /// Number of quadratic constraints.
    pub num_qc: usize,
    pub seed: u64,
    /// Variation index `i` used in the instance name.
    pub index: u32,
    /// Inclusive integer range for coefficients.
    pub coeff_range: (i64, i64),
    /// Fraction of the objective's support that each constraint samples
    /// (1.0 samples every entry).
    pub constraint_density: f64,
}

impl GeneratorConfig {
    /// Config for variation `index` with the seed derived from all parameters.
    pub fn new(n: usize, density: f64, num_qc: usize, index: u32) -> Self {
        Self {
            n,
            density,
            num_qc,
            seed: derive_seed(n, density, num_qc, index),
            index,
            coeff_range: (-50, 50),
            constraint_density: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Config(format!("n = {} must be at least 2", self.n)));
        }
        if !(self.density > 0.0 && self.density <= 1.0) {
            return Err(Error::Config(format!(
                "density {} must lie in (0, 1]",
                self.density
            )));
        }
        if !(self.constraint_density > 0.0 && self.constraint_density <= 1.0) {
            return Err(Error::Config(format!(
                "constraint density {} must lie in (0, 1]",
                self.constraint_density
            )));
        }
        if self.coeff_range.0 > self.coeff_range.1 {
            return Err(Error::Config("empty coefficient range".into()));
        }
        Ok(())
    }

    /// `spar[n]-[ρ]-[i]_[k]qc`, with `n` and `100ρ` zero-padded to three digits.
    pub fn name(&self) -> String {
        format!(
            "spar{:03}-{:03}-{}_{}qc",
            self.n,
            (self.density * 100.0).round() as u32,
            self.index,
            self.num_qc
        )
    }
}

/// Seed for variation `index` of the `(n, density, num_qc)` family.
pub fn derive_seed(n: usize, density: f64, num_qc: usize, index: u32) -> u64 {
    let mut h = Sha256::new();
    h.update(b"spar");
    h.update((n as u64).to_le_bytes());
    h.update(density.to_bits().to_le_bytes());
    h.update((num_qc as u64).to_le_bytes());
    h.update(index.to_le_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}

fn coeff(rng: &mut ChaCha8Rng, (lo, hi): (i64, i64)) -> f64 {
    rng.gen_range(lo..=hi) as f64
}

fn nonzero_coeff(rng: &mut ChaCha8Rng, range: (i64, i64)) -> f64 {
    if range == (0, 0) {
        return 0.0;
    }
    loop {
        let v = coeff(rng, range);
        if v != 0.0 {
            return v;
        }
    }
}

/// Random BoxQCQP: the objective has a full diagonal and linear part and
/// off-diagonal entries present with probability `density`; each constraint
/// reuses the objective's support and has its constant chosen so that it is
/// active at `x = 0.5·1`.
pub fn generate_boxqcqp(cfg: &GeneratorConfig) -> Result<QcqpInstance> {
    cfg.validate()?;
    let n = cfg.n;
    let mut structure = ChaCha8Rng::seed_from_u64(cfg.seed);
    structure.set_stream(0);
    let mut values = ChaCha8Rng::seed_from_u64(cfg.seed);
    values.set_stream(1);

    let mut off_diag = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if structure.gen_bool(cfg.density) {
                off_diag.push((i, j));
            }
        }
    }

    let mut q0: Vec<(usize, usize, f64)> = (0..n)
        .map(|i| (i, i, coeff(&mut values, cfg.coeff_range)))
        .collect();
    q0.extend(
        off_diag
            .iter()
            .map(|&(i, j)| (i, j, nonzero_coeff(&mut values, cfg.coeff_range))),
    );
    let c0: Vec<f64> = (0..n)
        .map(|_| coeff(&mut values, cfg.coeff_range))
        .collect();
    let objective = QuadraticFunction::new(SparseSym::from_symmetric_entries(q0), c0, 0.0);

    let support: Vec<(usize, usize)> = (0..n)
        .map(|i| (i, i))
        .chain(off_diag.iter().copied())
        .collect();
    let center = vec![0.5; n];
    let mut constraints = Vec::with_capacity(cfg.num_qc);
    for _ in 0..cfg.num_qc {
        let mut entries = Vec::with_capacity(support.len());
        for &(i, j) in &support {
            let keep = cfg.constraint_density >= 1.0 || structure.gen_bool(cfg.constraint_density);
            let v = coeff(&mut values, cfg.coeff_range);
            if keep {
                entries.push((i, j, v));
            }
        }
        let c: Vec<f64> = (0..n)
            .map(|_| coeff(&mut values, cfg.coeff_range))
            .collect();
        let mut f = QuadraticFunction::new(SparseSym::from_symmetric_entries(entries), c, 0.0);
        // integer coefficients times 0.25 / 0.5 are exact, so f(center) = 0 exactly
        f.d = -f.eval(&center);
        constraints.push(f);
    }

    QcqpInstance::new(
        cfg.name(),
        objective,
        constraints,
        vec![0.0; n],
        vec![1.0; n],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::build_support_set;

    #[test]
    fn naming_pattern() {
        assert_eq!(
            GeneratorConfig::new(20, 0.1, 5, 3).name(),
            "spar020-010-3_5qc"
        );
        assert_eq!(
            GeneratorConfig::new(125, 0.25, 10, 1).name(),
            "spar125-025-1_10qc"
        );
    }

    #[test]
    fn two_variable_constraint_is_active_at_center() {
        let mut cfg = GeneratorConfig::new(2, 1.0, 1, 1);
        cfg.seed = 1;
        let inst = generate_boxqcqp(&cfg).unwrap();
        assert_eq!((inst.n(), inst.m()), (2, 1));
        assert_eq!(inst.constraints()[0].eval(&[0.5, 0.5]), 0.0);
        assert!(inst.nonneg());
        assert!(inst.lower().iter().all(|&l| l == 0.0) && inst.upper().iter().all(|&u| u == 1.0));
    }

    #[test]
    fn no_constraints_gives_box_qp() {
        let inst = generate_boxqcqp(&GeneratorConfig::new(6, 0.5, 0, 1)).unwrap();
        assert_eq!(inst.m(), 0);
    }

    #[test]
    fn deterministic_for_equal_configs() {
        let cfg = GeneratorConfig::new(12, 0.3, 3, 2);
        assert_eq!(
            generate_boxqcqp(&cfg).unwrap(),
            generate_boxqcqp(&cfg).unwrap()
        );
        let other = GeneratorConfig::new(12, 0.3, 3, 3);
        assert_ne!(
            generate_boxqcqp(&cfg).unwrap(),
            generate_boxqcqp(&other).unwrap()
        );
    }

    #[test]
    fn constraint_support_within_objective_support() {
        for (idx, dens) in [(1, 0.1), (2, 0.5), (3, 1.0)] {
            let inst = generate_boxqcqp(&GeneratorConfig::new(15, dens, 4, idx)).unwrap();
            let obj = inst.objective();
            for f in inst.constraints() {
                for &(i, j, _) in f.q.entries() {
                    assert!(i == j || obj.q.get(i, j) != 0.0);
                }
            }
            let objective_only = crate::model::SupportSet::lifted(
                inst.n() + 1,
                obj.q.entries().iter().map(|&(i, j, _)| (i + 1, j + 1)),
            );
            assert_eq!(build_support_set(&inst), objective_only);
        }
    }

    #[test]
    fn support_size_matches_direct_scan() {
        let mut cfg = GeneratorConfig::new(20, 0.25, 2, 1);
        cfg.seed = 7;
        let inst = generate_boxqcqp(&cfg).unwrap();
        let mut off = std::collections::BTreeSet::new();
        for f in inst.functions() {
            for &(i, j, v) in f.q.entries() {
                if i != j && v != 0.0 {
                    off.insert((i, j));
                }
            }
        }
        let n = inst.n();
        assert_eq!(build_support_set(&inst).len(), 1 + n + n + off.len());
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(generate_boxqcqp(&GeneratorConfig::new(1, 0.5, 0, 1)).is_err());
        assert!(generate_boxqcqp(&GeneratorConfig::new(5, 0.0, 0, 1)).is_err());
        assert!(generate_boxqcqp(&GeneratorConfig::new(5, 1.5, 0, 1)).is_err());
    }
}
