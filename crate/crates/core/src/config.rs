//! JSON model configuration files.
//!
//! ```json
//! {"family": "predator_prey",
//!  "params": {"r": 1.0, "b": 3.0, "a": 0.5, "c1": 1.0, "c2": 0.5, "d": 1.0},
//!  "tail_caps": [1e6, 1e6]}
//! ```

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::builtin::{
    BuiltinModel, ModelParams, Mutualism, PredationAllee, PredatorPrey, StrongAlleeCompetition,
    WeakAlleeCompetition,
};
use crate::error::{Error, Result};
use crate::model::TailCaps;

pub const FAMILIES: [&str; 5] = [
    "predation_allee",
    "strong_allee_competition",
    "weak_allee_competition",
    "predator_prey",
    "mutualism",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub family: String,
    pub params: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail_caps: Option<[f64; 2]>,
}

impl ModelConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_params(params: &ModelParams, caps: Option<TailCaps>) -> Self {
        ModelConfig {
            family: params.family().to_string(),
            params: params
                .named()
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
            tail_caps: caps.map(|c| [c.x, c.y]),
        }
    }

    pub fn to_params(&self) -> Result<ModelParams> {
        let mut bag = ParamBag {
            family: &self.family,
            map: self.params.clone(),
        };
        let params = match self.family.as_str() {
            "predation_allee" => ModelParams::PredationAllee(PredationAllee {
                r: bag.take("r")?,
                m: bag.take("m")?,
                b: bag.take("b")?,
            }),
            "strong_allee_competition" => ModelParams::StrongAlleeCompetition(StrongAlleeCompetition {
                r1: bag.take("r1")?,
                r2: bag.take("r2")?,
                m1: bag.take("m1")?,
                m2: bag.take("m2")?,
                b1: bag.take("b1")?,
                b2: bag.take("b2")?,
                a: bag.take("a")?,
                c: bag.take("c")?,
            }),
            "weak_allee_competition" => ModelParams::WeakAlleeCompetition(WeakAlleeCompetition {
                r1: bag.take("r1")?,
                r2: bag.take("r2")?,
                m1: bag.take("m1")?,
                m2: bag.take("m2")?,
                b1: bag.take("b1")?,
                b2: bag.take("b2")?,
                a1: bag.take("a1")?,
                a2: bag.take("a2")?,
            }),
            "predator_prey" => ModelParams::PredatorPrey(PredatorPrey {
                r: bag.take("r")?,
                b: bag.take("b")?,
                a: bag.take("a")?,
                c1: bag.take("c1")?,
                c2: bag.take("c2")?,
                d: bag.take("d")?,
            }),
            "mutualism" => ModelParams::Mutualism(Mutualism {
                r1: bag.take("r1")?,
                r2: bag.take("r2")?,
                a11: bag.take("a11")?,
                a12: bag.take("a12")?,
                a21: bag.take("a21")?,
                a22: bag.take("a22")?,
                v11: bag.take("v11")?,
                v12: bag.take("v12")?,
                v21: bag.take("v21")?,
                v22: bag.take("v22")?,
            }),
            other => {
                return Err(Error::Config(format!(
                    "field `family`: unknown family `{other}`, expected one of {}",
                    FAMILIES.join(", ")
                )))
            }
        };
        bag.finish()?;
        Ok(params)
    }

    pub fn build(&self) -> Result<BuiltinModel> {
        let model = BuiltinModel::new(self.to_params()?)?;
        match self.tail_caps {
            Some([x, y]) => model.with_tail_caps(TailCaps { x, y }),
            None => Ok(model),
        }
    }

    /// Returns a copy with one parameter replaced, for parameter scans.
    pub fn with_param(&self, name: &str, value: f64) -> Result<Self> {
        if !self.params.contains_key(name) {
            return Err(Error::Config(format!(
                "field `params.{name}`: not a parameter of family `{}`",
                self.family
            )));
        }
        let mut out = self.clone();
        out.params.insert(name.to_string(), value);
        Ok(out)
    }
}

struct ParamBag<'a> {
    family: &'a str,
    map: BTreeMap<String, f64>,
}

impl ParamBag<'_> {
    fn take(&mut self, name: &str) -> Result<f64> {
        self.map.remove(name).ok_or_else(|| {
            Error::Config(format!(
                "field `params.{name}`: missing, required by family `{}`",
                self.family
            ))
        })
    }

    fn finish(self) -> Result<()> {
        match self.map.keys().next() {
            Some(extra) => Err(Error::Config(format!(
                "field `params.{extra}`: unknown parameter for family `{}`",
                self.family
            ))),
            None => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::GrowthModel;

    #[test]
    fn parses_strong_allee() {
        let text = r#"{"family":"strong_allee_competition",
            "params":{"r1":4.1,"r2":0.85,"m1":4,"m2":1,"b1":1,"b2":2.5,"a":1,"c":22}}"#;
        let cfg = ModelConfig::from_json(text).unwrap();
        let model = cfg.build().unwrap();
        assert_eq!(
            *model.params(),
            ModelParams::StrongAlleeCompetition(StrongAlleeCompetition::example())
        );
        assert_eq!(model.tail_caps(), TailCaps::default());
    }

    #[test]
    fn tail_caps_override() {
        let text = r#"{"family":"predation_allee","params":{"r":2,"m":1,"b":1},"tail_caps":[100,50]}"#;
        let model = ModelConfig::from_json(text).unwrap().build().unwrap();
        assert_eq!(model.tail_caps(), TailCaps { x: 100.0, y: 50.0 });
    }

    #[test]
    fn missing_and_unknown_params_name_the_field() {
        let missing = r#"{"family":"predation_allee","params":{"r":2,"m":1}}"#;
        let err = ModelConfig::from_json(missing).unwrap().build().unwrap_err();
        assert!(err.to_string().contains("params.b"), "{err}");

        let extra = r#"{"family":"predation_allee","params":{"r":2,"m":1,"b":1,"q":3}}"#;
        let err = ModelConfig::from_json(extra).unwrap().build().unwrap_err();
        assert!(err.to_string().contains("params.q"), "{err}");

        let fam = r#"{"family":"lotka","params":{}}"#;
        let err = ModelConfig::from_json(fam).unwrap().build().unwrap_err();
        assert!(err.to_string().contains("family"), "{err}");
    }

    #[test]
    fn malformed_json_reports_position() {
        let err = ModelConfig::from_json("{\"family\": \"mutualism\",\n \"params\": {").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn round_trips_through_params() {
        let params = ModelParams::StrongAlleeCompetition(StrongAlleeCompetition::example());
        let cfg = ModelConfig::from_params(&params, None);
        assert_eq!(cfg.to_params().unwrap(), params);
    }
}
