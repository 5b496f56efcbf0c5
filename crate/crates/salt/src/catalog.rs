//! Hardware abstraction vocabulary: which words each feature senses or actuates.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WordSpec {
    pub word: String,
    pub arity: usize,
}

impl WordSpec {
    pub fn new(word: &str, arity: usize) -> Self {
        WordSpec {
            word: word.to_string(),
            arity,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Feature {
    pub name: String,
    pub sensing: Vec<WordSpec>,
    pub actuating: Vec<WordSpec>,
}

impl Feature {
    fn new(name: &str, sensing: &[(&str, usize)], actuating: &[(&str, usize)]) -> Self {
        let specs = |list: &[(&str, usize)]| list.iter().map(|&(w, a)| WordSpec::new(w, a)).collect();
        Feature {
            name: name.to_string(),
            sensing: specs(sensing),
            actuating: specs(actuating),
        }
    }
}

/// Map from feature name to its words.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FeatureCatalog {
    features: BTreeMap<String, Feature>,
}

/// Word used by the virtual timer feature to start a timer (1 argument: ticks).
pub const TIMER_WORD: &str = "timer";
/// Word injected when a timer expires.
pub const TIMEOUT_WORD: &str = "timeout";

impl FeatureCatalog {
    /// The stock catalog shipped with every node.
    ///
    /// `led` takes `on` or `off`; `notify` takes a string; `sms` takes
    /// a number and a message. `timer` is virtual: starting a timer is an
    /// actuation, its expiry is sensed as `timeout`.
    pub fn standard() -> Self {
        let features = [
            Feature::new("button", &[("push", 0)], &[]),
            Feature::new("acceleration", &[("accelerationChanged", 3)], &[]),
            Feature::new("gps", &[("positionChanged", 3)], &[]),
            Feature::new(
                "joystick",
                &[("Click", 0), ("RightUp", 0), ("CenterDOWN", 0), ("Right", 0)],
                &[],
            ),
            Feature::new("light", &[("lightChanged", 1)], &[]),
            Feature::new("led", &[], &[("led", 1)]),
            Feature::new("notification", &[], &[("notify", 1)]),
            Feature::new("sms", &[], &[("sms", 2)]),
            Feature::new("timer", &[(TIMEOUT_WORD, 0)], &[(TIMER_WORD, 1)]),
        ];
        FeatureCatalog::from_features(features)
    }

    pub fn from_features(features: impl IntoIterator<Item = Feature>) -> Self {
        FeatureCatalog {
            features: features.into_iter().map(|f| (f.name.clone(), f)).collect(),
        }
    }

    pub fn get(&self, name: &str) -> Option<&Feature> {
        self.features.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.features.contains_key(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.features.keys().map(String::as_str)
    }

    /// Looks up `word` among the sensing words of the named features.
    pub fn find_sensing<'a>(&'a self, features: &[String], word: &str) -> Option<&'a WordSpec> {
        features
            .iter()
            .filter_map(|f| self.get(f))
            .flat_map(|f| f.sensing.iter())
            .find(|w| w.word == word)
    }

    /// Looks up `word` among the actuating words of the named features.
    pub fn find_actuating<'a>(&'a self, features: &[String], word: &str) -> Option<&'a WordSpec> {
        features
            .iter()
            .filter_map(|f| self.get(f))
            .flat_map(|f| f.actuating.iter())
            .find(|w| w.word == word)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_words() {
        let cat = FeatureCatalog::standard();
        let button = cat.get("button").unwrap();
        assert_eq!(button.sensing, vec![WordSpec::new("push", 0)]);
        assert_eq!(cat.get("sms").unwrap().actuating, vec![WordSpec::new("sms", 2)]);
        assert_eq!(cat.get("gps").unwrap().sensing[0].arity, 3);
        assert!(cat.get("bogus").is_none());
    }

    #[test]
    fn lookup_is_scoped_to_features() {
        let cat = FeatureCatalog::standard();
        let feats = vec!["led".to_string(), "notification".to_string()];
        assert_eq!(cat.find_actuating(&feats, "notify").unwrap().arity, 1);
        assert!(cat.find_actuating(&feats, "sms").is_none());
        assert!(cat.find_sensing(&feats, "push").is_none());
    }
}
