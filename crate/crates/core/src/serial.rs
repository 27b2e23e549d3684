//! JSON documents for phenomena, hypothesis models and limit distributions.
//!
//! ```json
//! {"kind":"moments","backend":"exact","values":["1","1/2","1/3"]}
//! {"kind":"atomic","backend":"exact","atoms":[{"p":"1/3","weight":"1"}]}
//! {"kind":"hypotheses","components":[{"label":"a","prior":"2/3","phenomenon":{…}}]}
//! ```
//!
//! Exact values are `"num/den"` strings and float values are JSON numbers.
//! A document whose backend differs from the requested one is rejected with
//! [`Error::MixedBackend`].

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::limitdist::LimitCdf;
use crate::mixtures::{AtomicMixture, Hypothesis, HypothesisModel};
use crate::moments::MomentSequence;
use crate::phenomenon::Phenomenon;
use crate::scalar::{Backend, Scalar};

fn field<'a>(obj: &'a Map<String, Value>, name: &str) -> Result<&'a Value> {
    obj.get(name)
        .ok_or_else(|| Error::Parse(format!("missing field {name:?}")))
}

fn object(value: &Value) -> Result<&Map<String, Value>> {
    value
        .as_object()
        .ok_or_else(|| Error::Parse("expected a JSON object".into()))
}

fn array<'a>(obj: &'a Map<String, Value>, name: &str) -> Result<&'a Vec<Value>> {
    field(obj, name)?
        .as_array()
        .ok_or_else(|| Error::Parse(format!("field {name:?} must be an array")))
}

fn kind(obj: &Map<String, Value>) -> Result<&str> {
    field(obj, "kind")?
        .as_str()
        .ok_or_else(|| Error::Parse("field \"kind\" must be a string".into()))
}

/// Backend named by a phenomenon or model document. Models take the backend
/// of their first component.
pub fn document_backend(value: &Value) -> Result<Backend> {
    let obj = object(value)?;
    if kind(obj)? == "hypotheses" {
        let first = array(obj, "components")?
            .first()
            .ok_or_else(|| Error::InvalidModel("no hypotheses".into()))?;
        return document_backend(field(object(first)?, "phenomenon")?);
    }
    field(obj, "backend")?
        .as_str()
        .ok_or_else(|| Error::Parse("field \"backend\" must be a string".into()))?
        .parse()
}

fn check_backend<S: Scalar>(obj: &Map<String, Value>) -> Result<()> {
    let named: Backend = field(obj, "backend")?
        .as_str()
        .ok_or_else(|| Error::Parse("field \"backend\" must be a string".into()))?
        .parse()?;
    if named != S::BACKEND {
        return Err(Error::MixedBackend {
            expected: S::BACKEND,
        });
    }
    Ok(())
}

fn atoms_to_json<S: Scalar>(a: &AtomicMixture<S>) -> Value {
    a.atoms()
        .iter()
        .map(|x| json!({"p": x.p.to_json(), "weight": x.weight.to_json()}))
        .collect()
}

fn atoms_from_json<S: Scalar>(obj: &Map<String, Value>) -> Result<AtomicMixture<S>> {
    let list = array(obj, "atoms")?
        .iter()
        .map(|item| {
            let item = object(item)?;
            Ok((
                S::from_json(field(item, "p")?)?,
                S::from_json(field(item, "weight")?)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    AtomicMixture::new(list)
}

pub fn phenomenon_to_json<S: Scalar>(ph: &Phenomenon<S>) -> Value {
    match ph {
        Phenomenon::Moments(m) => json!({
            "kind": "moments",
            "backend": S::BACKEND.as_str(),
            "values": m.values().iter().map(Scalar::to_json).collect::<Vec<_>>(),
        }),
        Phenomenon::Atomic(a) => json!({
            "kind": "atomic",
            "backend": S::BACKEND.as_str(),
            "atoms": atoms_to_json(a),
        }),
    }
}

pub fn phenomenon_from_json<S: Scalar>(value: &Value) -> Result<Phenomenon<S>> {
    let obj = object(value)?;
    match kind(obj)? {
        "moments" => {
            check_backend::<S>(obj)?;
            let values = array(obj, "values")?
                .iter()
                .map(S::from_json)
                .collect::<Result<Vec<_>>>()?;
            Ok(MomentSequence::new(values)?.into())
        }
        "atomic" => {
            check_backend::<S>(obj)?;
            Ok(atoms_from_json(obj)?.into())
        }
        other => Err(Error::Parse(format!("unknown phenomenon kind {other:?}"))),
    }
}

pub fn model_to_json<S: Scalar>(model: &HypothesisModel<S>) -> Value {
    let components: Vec<Value> = model
        .components()
        .iter()
        .map(|c| {
            json!({
                "label": c.label,
                "prior": c.prior.to_json(),
                "phenomenon": phenomenon_to_json(&c.phenomenon),
            })
        })
        .collect();
    json!({"kind": "hypotheses", "components": components})
}

pub fn model_from_json<S: Scalar>(value: &Value) -> Result<HypothesisModel<S>> {
    let obj = object(value)?;
    if kind(obj)? != "hypotheses" {
        return Err(Error::Parse("expected kind \"hypotheses\"".into()));
    }
    let components = array(obj, "components")?
        .iter()
        .map(|item| {
            let item = object(item)?;
            let label = field(item, "label")?
                .as_str()
                .ok_or_else(|| Error::Parse("label must be a string".into()))?
                .to_string();
            Ok(Hypothesis {
                label,
                prior: S::from_json(field(item, "prior")?)?,
                phenomenon: phenomenon_from_json(field(item, "phenomenon")?)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    HypothesisModel::new(components)
}

/// Atomic limits mirror the atomic phenomenon document with kind `"cdf"`.
pub fn limit_cdf_to_json<S: Scalar>(cdf: &LimitCdf<S>) -> Value {
    match cdf {
        LimitCdf::Atomic(a) => json!({
            "kind": "cdf",
            "backend": S::BACKEND.as_str(),
            "atoms": atoms_to_json(a),
        }),
        LimitCdf::Uniform => json!({
            "kind": "cdf",
            "backend": S::BACKEND.as_str(),
            "uniform": true,
        }),
        LimitCdf::Sampled { n, grid } => json!({
            "kind": "cdf",
            "backend": S::BACKEND.as_str(),
            "n": n,
            "grid": grid
                .iter()
                .map(|(xi, phi)| json!([xi.to_json(), phi.to_json()]))
                .collect::<Vec<_>>(),
        }),
    }
}

pub fn limit_cdf_from_json<S: Scalar>(value: &Value) -> Result<LimitCdf<S>> {
    let obj = object(value)?;
    if kind(obj)? != "cdf" {
        return Err(Error::Parse("expected kind \"cdf\"".into()));
    }
    check_backend::<S>(obj)?;
    if obj.contains_key("atoms") {
        return Ok(LimitCdf::Atomic(atoms_from_json(obj)?));
    }
    if obj.get("uniform") == Some(&Value::Bool(true)) {
        return Ok(LimitCdf::Uniform);
    }
    let n = field(obj, "n")?
        .as_u64()
        .ok_or_else(|| Error::Parse("n must be a nonnegative integer".into()))? as usize;
    let grid = array(obj, "grid")?
        .iter()
        .map(|pair| match pair.as_array().map(Vec::as_slice) {
            Some([xi, phi]) => Ok((S::from_json(xi)?, S::from_json(phi)?)),
            _ => Err(Error::Parse("grid entries must be [xi, phi] pairs".into())),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LimitCdf::Sampled { n, grid })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mixtures::{atomic_mixture, urn_scenario, uniform_phenomenon};
    use crate::scalar::Exact;

    fn q(n: i64, d: i64) -> Exact {
        Exact::from_ratio(n, d)
    }

    #[test]
    fn moments_document() {
        let u = uniform_phenomenon::<Exact>(2);
        let v = phenomenon_to_json(&u);
        assert_eq!(
            v.to_string(),
            r#"{"backend":"exact","kind":"moments","values":["1","1/2","1/3"]}"#
        );
        assert_eq!(phenomenon_from_json::<Exact>(&v).unwrap(), u);
        assert_eq!(document_backend(&v).unwrap(), Backend::Exact);
    }

    #[test]
    fn atomic_and_float_round_trip() {
        let a = atomic_mixture([(q(1, 5), q(1, 2)), (q(7, 10), q(1, 2))]).unwrap();
        assert_eq!(phenomenon_from_json::<Exact>(&phenomenon_to_json(&a)).unwrap(), a);
        let f = atomic_mixture([(0.2, 0.5), (0.7, 0.5)]).unwrap();
        let v = phenomenon_to_json(&f);
        assert_eq!(v["atoms"][0]["p"], json!(0.2));
        assert_eq!(phenomenon_from_json::<f64>(&v).unwrap(), f);
    }

    #[test]
    fn backend_mismatch_is_rejected() {
        let exact = phenomenon_to_json(&uniform_phenomenon::<Exact>(2));
        assert_eq!(
            phenomenon_from_json::<f64>(&exact),
            Err(Error::MixedBackend {
                expected: Backend::Float
            })
        );
        let lying = json!({"kind":"moments","backend":"float","values":["1","1/2"]});
        assert!(matches!(
            phenomenon_from_json::<f64>(&lying),
            Err(Error::MixedBackend { .. })
        ));
        let invalid = json!({"kind":"moments","backend":"exact","values":["1","1/2","3/5"]});
        assert!(matches!(
            phenomenon_from_json::<Exact>(&invalid),
            Err(Error::NotCompletelyMonotone { .. })
        ));
        assert!(matches!(
            phenomenon_from_json::<Exact>(&json!({"kind":"beta"})),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn models_and_limits() {
        let model = urn_scenario::<Exact>(12, 4, 6, q(2, 3), q(1, 3)).unwrap();
        let v = model_to_json(&model);
        assert_eq!(v["components"][0]["prior"], "2/3");
        assert_eq!(document_backend(&v).unwrap(), Backend::Exact);
        assert_eq!(model_from_json::<Exact>(&v).unwrap(), model);

        let a = atomic_mixture([(q(1, 5), q(1, 2)), (q(7, 10), q(1, 2))]).unwrap();
        let cdf = LimitCdf::exact(&a).unwrap();
        let v = limit_cdf_to_json(&cdf);
        assert_eq!(v["atoms"][1]["p"], "7/10");
        assert_eq!(limit_cdf_from_json::<Exact>(&v).unwrap(), cdf);
        let sampled = LimitCdf::sampled(&a, 5, 3).unwrap();
        assert_eq!(
            limit_cdf_from_json::<Exact>(&limit_cdf_to_json(&sampled)).unwrap(),
            sampled
        );
        let uniform = LimitCdf::<Exact>::Uniform;
        assert_eq!(
            limit_cdf_from_json::<Exact>(&limit_cdf_to_json(&uniform)).unwrap(),
            uniform
        );
    }
}
