//! Reader for the continuous QCQP fragment of the QPLIB text format.
//!
//! Supported: three-letter type codes with objective `L`, `D`, `C` or `Q`,
//! variables `C` (continuous), and constraints `N`, `B`, `L`, `D`, `C` or `Q`.
//! Records are read in QPLIB order up to the variable bounds; anything after
//! the bounds (starting points, names) is ignored. Text after the values on a
//! line is treated as a comment.
//!
//! QPLIB writes `½ xᵀQx + bᵀx + q` with the lower triangle of `Q` listed once;
//! entries are converted to the `xᵀQ̄x` convention (`Q̄ = Q/2`). A two-sided
//! constraint `c_l <= g(x) <= c_u` becomes up to two `<= 0` rows, so
//! equalities are split. Maximization is negated.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::model::{QcqpInstance, QuadraticFunction, SparseSym};

struct Records<'a> {
    lines: std::iter::Enumerate<std::str::Lines<'a>>,
    last_line: usize,
}

impl<'a> Records<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            lines: text.lines().enumerate(),
            last_line: 0,
        }
    }

    fn next(&mut self) -> Result<(usize, Vec<&'a str>)> {
        for (k, line) in self.lines.by_ref() {
            let t = line.trim();
            if t.is_empty() || t.starts_with('!') || t.starts_with('#') || t.starts_with('%') {
                continue;
            }
            self.last_line = k + 1;
            return Ok((k + 1, t.split_whitespace().collect()));
        }
        Err(Error::Parse {
            line: self.last_line + 1,
            msg: "unexpected end of file".into(),
        })
    }

    fn values<const N: usize>(&mut self, what: &str) -> Result<(usize, [&'a str; N])> {
        let (line, toks) = self.next()?;
        if toks.len() < N {
            return Err(Error::Parse {
                line,
                msg: format!("expected {N} value(s) for {what}"),
            });
        }
        Ok((line, std::array::from_fn(|k| toks[k])))
    }

    fn int(&mut self, what: &str) -> Result<usize> {
        let (line, [t]) = self.values::<1>(what)?;
        parse_int(t, line, what)
    }

    fn real(&mut self, what: &str) -> Result<f64> {
        let (line, [t]) = self.values::<1>(what)?;
        parse_real(t, line, what)
    }
}

fn parse_int(t: &str, line: usize, what: &str) -> Result<usize> {
    t.parse::<usize>().map_err(|_| Error::Parse {
        line,
        msg: format!("{what}: `{t}` is not a nonnegative integer"),
    })
}

fn parse_real(t: &str, line: usize, what: &str) -> Result<f64> {
    let v = t
        .replace(['d', 'D'], "e")
        .parse::<f64>()
        .map_err(|_| Error::Parse {
            line,
            msg: format!("{what}: `{t}` is not a number"),
        })?;
    if v.is_nan() {
        return Err(Error::Parse {
            line,
            msg: format!("{what}: NaN"),
        });
    }
    Ok(v)
}

fn index(t: &str, line: usize, bound: usize, what: &str) -> Result<usize> {
    let i = parse_int(t, line, what)?;
    if i == 0 || i > bound {
        return Err(Error::Parse {
            line,
            msg: format!("{what}: index {i} outside 1..={bound}"),
        });
    }
    Ok(i - 1)
}

/// Default value plus sparse overrides, as QPLIB writes vectors.
fn dense_vector(r: &mut Records, len: usize, what: &str) -> Result<Vec<f64>> {
    let default = r.real(&format!("default {what}"))?;
    let mut v = vec![default; len];
    let count = r.int(&format!("number of non-default {what}"))?;
    for _ in 0..count {
        let (line, [i, x]) = r.values::<2>(what)?;
        v[index(i, line, len, what)?] = parse_real(x, line, what)?;
    }
    Ok(v)
}

pub fn parse_qplib_subset(text: &str) -> Result<QcqpInstance> {
    let mut r = Records::new(text);
    let (_, [name]) = r.values::<1>("problem name")?;
    let (line, [code]) = r.values::<1>("problem type")?;
    let code: Vec<char> = code.to_ascii_uppercase().chars().collect();
    if code.len() != 3 {
        return Err(Error::Parse {
            line,
            msg: "problem type must have three letters".into(),
        });
    }
    let (obj_code, var_code, con_code) = (code[0], code[1], code[2]);
    match var_code {
        'C' => {}
        'B' | 'M' | 'I' | 'G' => return Err(Error::UnsupportedFeature("integer variables".into())),
        other => {
            return Err(Error::UnsupportedFeature(format!(
                "variable type `{other}`"
            )))
        }
    }
    if !matches!(obj_code, 'L' | 'D' | 'C' | 'Q') {
        return Err(Error::UnsupportedFeature(format!(
            "general nonlinear terms (objective type `{obj_code}`)"
        )));
    }
    if !matches!(con_code, 'N' | 'B' | 'L' | 'D' | 'C' | 'Q') {
        return Err(Error::UnsupportedFeature(format!(
            "general nonlinear terms (constraint type `{con_code}`)"
        )));
    }

    let (line, [sense]) = r.values::<1>("objective sense")?;
    let maximize = match sense.to_ascii_lowercase().as_str() {
        "minimize" | "min" => false,
        "maximize" | "max" => true,
        other => {
            return Err(Error::Parse {
                line,
                msg: format!("unknown objective sense `{other}`"),
            })
        }
    };
    let n = r.int("number of variables")?;
    if n == 0 {
        return Err(Error::Parse {
            line: r.last_line,
            msg: "instance has no variables".into(),
        });
    }
    let m = if matches!(con_code, 'N' | 'B') {
        0
    } else {
        r.int("number of constraints")?
    };

    let mut q0 = Vec::new();
    if obj_code != 'L' {
        let nnz = r.int("number of objective quadratic terms")?;
        for _ in 0..nnz {
            let (line, [i, j, v]) = r.values::<3>("objective quadratic term")?;
            let (i, j) = (
                index(i, line, n, "variable")?,
                index(j, line, n, "variable")?,
            );
            q0.push((i, j, 0.5 * parse_real(v, line, "coefficient")?));
        }
    }
    let b0 = dense_vector(&mut r, n, "objective linear coefficients")?;
    let q0_const = r.real("objective constant")?;

    let mut cq: BTreeMap<usize, Vec<(usize, usize, f64)>> = BTreeMap::new();
    if matches!(con_code, 'D' | 'C' | 'Q') {
        let nnz = r.int("number of constraint quadratic terms")?;
        for _ in 0..nnz {
            let (line, [k, i, j, v]) = r.values::<4>("constraint quadratic term")?;
            let k = index(k, line, m, "constraint")?;
            let (i, j) = (
                index(i, line, n, "variable")?,
                index(j, line, n, "variable")?,
            );
            cq.entry(k)
                .or_default()
                .push((i, j, 0.5 * parse_real(v, line, "coefficient")?));
        }
    }
    let mut cb = vec![vec![0.0; n]; m];
    if m > 0 {
        let nnz = r.int("number of constraint linear terms")?;
        for _ in 0..nnz {
            let (line, [k, i, v]) = r.values::<3>("constraint linear term")?;
            let k = index(k, line, m, "constraint")?;
            cb[k][index(i, line, n, "variable")?] += parse_real(v, line, "coefficient")?;
        }
    }
    let infinity = r.real("infinity")?.abs();
    let (cl, cu) = if m > 0 {
        (
            dense_vector(&mut r, m, "constraint lower bounds")?,
            dense_vector(&mut r, m, "constraint upper bounds")?,
        )
    } else {
        (Vec::new(), Vec::new())
    };
    let lower = dense_vector(&mut r, n, "variable lower bounds")?;
    let upper = dense_vector(&mut r, n, "variable upper bounds")?;
    for i in 0..n {
        if lower[i] <= -infinity
            || upper[i] >= infinity
            || !lower[i].is_finite()
            || !upper[i].is_finite()
        {
            return Err(Error::UnsupportedFeature(format!(
                "unbounded variable {}",
                i + 1
            )));
        }
    }

    let mut objective = QuadraticFunction::new(SparseSym::from_symmetric_entries(q0), b0, q0_const);
    if maximize {
        objective = objective.negated();
    }
    let mut constraints = Vec::new();
    for k in 0..m {
        let g = QuadraticFunction::new(
            SparseSym::from_symmetric_entries(cq.remove(&k).unwrap_or_default()),
            std::mem::take(&mut cb[k]),
            0.0,
        );
        if cu[k] < infinity {
            // g(x) - c_u <= 0
            let mut up = g.clone();
            up.d = -cu[k];
            constraints.push(up);
        }
        if cl[k] > -infinity {
            // c_l - g(x) <= 0
            let mut lo = g.negated();
            lo.d = cl[k];
            constraints.push(lo);
        }
    }
    QcqpInstance::new(name, objective, constraints, lower, upper)
}
