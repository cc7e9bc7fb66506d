use serde_yaml::Value;

use crate::config::{extract_optim_domains, set_path, ConfigError, OptimAnnotation, OptimDomain, Scalar};

/// Optimizable parameters mapped onto the unit hypercube.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchSpace {
    pub dims: Vec<OptimAnnotation>,
}

impl SearchSpace {
    pub fn new(dims: Vec<OptimAnnotation>) -> Self {
        Self { dims }
    }

    /// Every `optimization_domain` in a raw configuration tree.
    pub fn from_tree(tree: &Value) -> Result<Self, ConfigError> {
        Ok(Self::new(extract_optim_domains(tree)?))
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    /// Normalized coordinates of the `init` values (0.5 where absent).
    pub fn initial_point(&self) -> Vec<f64> {
        self.dims
            .iter()
            .map(|d| match &d.init {
                Some(v) => encode_one(&d.domain, v),
                None => 0.5,
            })
            .collect()
    }

    pub fn encode(&self, values: &[Scalar]) -> Vec<f64> {
        self.dims.iter().zip(values).map(|(d, v)| encode_one(&d.domain, v)).collect()
    }

    /// Clips to `[0, 1]` then maps into each domain: ints round to nearest,
    /// categoricals take one of `n` equal bins.
    pub fn decode(&self, x: &[f64]) -> Vec<Scalar> {
        self.dims.iter().zip(x).map(|(d, &x)| decode_one(&d.domain, x)).collect()
    }

    /// `tree` with every optimized path set to `values`.
    pub fn apply(&self, tree: &Value, values: &[Scalar]) -> Result<Value, ConfigError> {
        let mut out = tree.clone();
        for (d, v) in self.dims.iter().zip(values) {
            set_path(&mut out, &d.path, v.to_yaml())?;
        }
        Ok(out)
    }

    /// `{"path": value, ...}` for logs.
    pub fn describe(&self, values: &[Scalar]) -> String {
        let parts: Vec<String> =
            self.dims.iter().zip(values).map(|(d, v)| format!("\"{}\": {}", d.path, scalar_json(v))).collect();
        format!("{{{}}}", parts.join(", "))
    }
}

fn scalar_json(v: &Scalar) -> String {
    match v {
        Scalar::Str(s) => format!("{s:?}"),
        Scalar::Int(i) => i.to_string(),
        Scalar::Float(f) => f.to_string(),
        Scalar::Bool(b) => b.to_string(),
    }
}

fn encode_one(domain: &OptimDomain, v: &Scalar) -> f64 {
    match domain {
        OptimDomain::Int { min, max } => {
            let i = v.as_f64().unwrap_or(*min as f64);
            if max == min {
                0.5
            } else {
                ((i - *min as f64) / (*max - *min) as f64).clamp(0.0, 1.0)
            }
        }
        OptimDomain::Float { min, max } => {
            let f = v.as_f64().unwrap_or(*min);
            if max == min {
                0.5
            } else {
                ((f - min) / (max - min)).clamp(0.0, 1.0)
            }
        }
        OptimDomain::Categorical { choices } => {
            let k = choices.iter().position(|c| c == v).unwrap_or(0);
            (k as f64 + 0.5) / choices.len() as f64
        }
    }
}

fn decode_one(domain: &OptimDomain, x: f64) -> Scalar {
    let x = if x.is_nan() { 0.5 } else { x.clamp(0.0, 1.0) };
    match domain {
        OptimDomain::Int { min, max } => Scalar::Int(min + (x * (max - min) as f64).round() as i64),
        OptimDomain::Float { min, max } => Scalar::Float((min + x * (max - min)).clamp(*min, *max)),
        OptimDomain::Categorical { choices } => {
            let k = ((x * choices.len() as f64) as usize).min(choices.len() - 1);
            choices[k].clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    fn space() -> SearchSpace {
        SearchSpace::new(vec![
            OptimAnnotation { path: "parameters.a".into(), domain: OptimDomain::Int { min: 10, max: 1000 }, init: Some(Scalar::Int(50)) },
            OptimAnnotation { path: "parameters.b".into(), domain: OptimDomain::Float { min: -1.0, max: 3.0 }, init: None },
            OptimAnnotation {
                path: "parameters.c".into(),
                domain: OptimDomain::Categorical { choices: vec![Scalar::Str("x".into()), Scalar::Int(2), Scalar::Bool(true)] },
                init: None,
            },
        ])
    }

    #[test]
    fn bounds_and_init() {
        let s = space();
        assert_eq!(s.decode(&[1.0, 1.0, 1.0]), vec![Scalar::Int(1000), Scalar::Float(3.0), Scalar::Bool(true)]);
        assert_eq!(s.decode(&[-4.0, 0.0, 0.0]), vec![Scalar::Int(10), Scalar::Float(-1.0), Scalar::Str("x".into())]);
        let x0 = s.initial_point();
        assert!((x0[0] - 40.0 / 990.0).abs() < 1e-15);
        assert_eq!(&x0[1..], &[0.5, 0.5]);
        assert_eq!(s.describe(&s.decode(&[1.0, 0.5, 0.0])), r#"{"parameters.a": 1000, "parameters.b": 1, "parameters.c": "x"}"#);
    }

    proptest! {
        #[test]
        fn decode_inverts_encode(a in 10i64..=1000, b in -1.0f64..=3.0, c in 0usize..3) {
            let s = space();
            let choices = match &s.dims[2].domain { OptimDomain::Categorical { choices } => choices.clone(), _ => unreachable!() };
            let v = vec![Scalar::Int(a), Scalar::Float(b), choices[c].clone()];
            let back = s.decode(&s.encode(&v));
            prop_assert_eq!(&back[0], &v[0]);
            prop_assert_eq!(&back[2], &v[2]);
            prop_assert!((back[1].as_f64().unwrap() - b).abs() < 1e-12);
        }

        #[test]
        fn decode_stays_in_domain(x in proptest::collection::vec(-10.0f64..10.0, 3)) {
            let s = space();
            let v = s.decode(&x);
            for (d, v) in s.dims.iter().zip(&v) {
                prop_assert!(d.domain.contains(v));
            }
        }
    }
}
