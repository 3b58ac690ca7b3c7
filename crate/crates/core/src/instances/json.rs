use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};
use crate::model::{QcqpInstance, QuadraticFunction, SparseSym};

/// A coefficient: a JSON number, or a string holding a decimal number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(transparent)]
struct Coef(f64);

impl<'de> Deserialize<'de> for Coef {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Coef(v)),
            Raw::Str(s) => s
                .trim()
                .parse::<f64>()
                .map(Coef)
                .map_err(|_| serde::de::Error::custom(format!("`{s}` is not a number"))),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct FunctionDoc {
    #[serde(rename = "Q")]
    q: Vec<(usize, usize, Coef)>,
    c: Vec<Coef>,
    d: Coef,
}

#[derive(Debug, Serialize, Deserialize)]
struct InstanceDoc {
    name: String,
    n: usize,
    m: usize,
    objective: FunctionDoc,
    constraints: Vec<FunctionDoc>,
    lower: Vec<Coef>,
    upper: Vec<Coef>,
}

impl FunctionDoc {
    fn from_function(f: &QuadraticFunction) -> Self {
        Self {
            q: f.q
                .entries()
                .iter()
                .map(|&(i, j, v)| (i, j, Coef(v)))
                .collect(),
            c: f.c.iter().copied().map(Coef).collect(),
            d: Coef(f.d),
        }
    }

    fn into_function(self, what: &str) -> Result<QuadraticFunction> {
        let finite = |v: f64, field: &str| {
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::Schema(format!(
                    "{what}.{field}: non-finite coefficient {v}"
                )))
            }
        };
        let mut entries = Vec::with_capacity(self.q.len());
        for (i, j, v) in self.q {
            entries.push((i, j, finite(v.0, "Q")?));
        }
        let c = self
            .c
            .into_iter()
            .map(|v| finite(v.0, "c"))
            .collect::<Result<Vec<_>>>()?;
        let d = finite(self.d.0, "d")?;
        Ok(QuadraticFunction::new(
            SparseSym::from_symmetric_entries(entries),
            c,
            d,
        ))
    }
}

/// Serializes an instance. Floats use the shortest representation that
/// round-trips exactly, so `read_json(write_json(x)) == x`.
pub fn write_json(instance: &QcqpInstance) -> String {
    let doc = InstanceDoc {
        name: instance.name().to_string(),
        n: instance.n(),
        m: instance.m(),
        objective: FunctionDoc::from_function(instance.objective()),
        constraints: instance
            .constraints()
            .iter()
            .map(FunctionDoc::from_function)
            .collect(),
        lower: instance.lower().iter().copied().map(Coef).collect(),
        upper: instance.upper().iter().copied().map(Coef).collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("instance documents always serialize");
    s.push('\n');
    s
}

pub fn read_json(text: &str) -> Result<QcqpInstance> {
    let doc: InstanceDoc = serde_json::from_str(text)?;
    if doc.constraints.len() != doc.m {
        return Err(Error::Schema(format!(
            "m = {} but {} constraints listed",
            doc.m,
            doc.constraints.len()
        )));
    }
    if doc.lower.len() != doc.n || doc.upper.len() != doc.n {
        return Err(Error::Schema(format!(
            "bounds must have length n = {}",
            doc.n
        )));
    }
    let bounds = |v: Vec<Coef>, what: &str| {
        v.into_iter()
            .map(|c| {
                if c.0.is_nan() {
                    Err(Error::Schema(format!("{what}: NaN bound")))
                } else {
                    Ok(c.0)
                }
            })
            .collect::<Result<Vec<_>>>()
    };
    let lower = bounds(doc.lower, "lower")?;
    let upper = bounds(doc.upper, "upper")?;
    let objective = doc.objective.into_function("objective")?;
    let constraints = doc
        .constraints
        .into_iter()
        .enumerate()
        .map(|(k, f)| f.into_function(&format!("constraints[{k}]")))
        .collect::<Result<Vec<_>>>()?;
    QcqpInstance::new(doc.name, objective, constraints, lower, upper)
        .map_err(|e| Error::Schema(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{generate_boxqcqp, GeneratorConfig};

    #[test]
    fn empty_constraint_list_round_trip() {
        let inst = generate_boxqcqp(&GeneratorConfig::new(4, 0.5, 0, 1)).unwrap();
        let back = read_json(&write_json(&inst)).unwrap();
        assert_eq!(back, inst);
        assert_eq!(back.m(), 0);
    }

    #[test]
    fn generated_round_trip() {
        let inst = generate_boxqcqp(&GeneratorConfig::new(9, 0.4, 3, 2)).unwrap();
        assert_eq!(read_json(&write_json(&inst)).unwrap(), inst);
    }

    #[test]
    fn awkward_floats_survive() {
        let f = QuadraticFunction::new(
            SparseSym::from_symmetric_entries([(0, 1, 0.1 + 0.2), (1, 1, 1e-300)]),
            vec![std::f64::consts::PI, -0.0],
            1.0 / 3.0,
        );
        let inst =
            QcqpInstance::new("odd", f, vec![], vec![-1e-7, 0.0], vec![1.0 / 7.0, 3.0]).unwrap();
        assert_eq!(read_json(&write_json(&inst)).unwrap(), inst);
    }

    #[test]
    fn nan_coefficient_is_a_schema_violation() {
        let text = r#"{"name":"x","n":1,"m":0,
            "objective":{"Q":[[0,0,"NaN"]],"c":[0],"d":0},
            "constraints":[],"lower":[0],"upper":[1]}"#;
        assert!(matches!(read_json(text), Err(Error::Schema(_))));
    }

    #[test]
    fn string_coefficients_are_accepted() {
        let text = r#"{"name":"x","n":1,"m":0,
            "objective":{"Q":[[0,0,"2.5"]],"c":["-1"],"d":0},
            "constraints":[],"lower":[0],"upper":[1]}"#;
        let inst = read_json(text).unwrap();
        assert_eq!(inst.objective().q.get(0, 0), 2.5);
        assert_eq!(inst.objective().c[0], -1.0);
    }

    #[test]
    fn malformed_and_inconsistent_documents() {
        assert!(matches!(read_json("{not json"), Err(Error::Json(_))));
        let wrong_m = r#"{"name":"x","n":1,"m":2,"objective":{"Q":[],"c":[0],"d":0},
            "constraints":[],"lower":[0],"upper":[1]}"#;
        assert!(matches!(read_json(wrong_m), Err(Error::Schema(_))));
        let bad_index = r#"{"name":"x","n":1,"m":0,"objective":{"Q":[[0,3,1]],"c":[0],"d":0},
            "constraints":[],"lower":[0],"upper":[1]}"#;
        assert!(matches!(read_json(bad_index), Err(Error::Schema(_))));
    }
}
