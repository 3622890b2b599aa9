//! JSON structure files:
//!
//! ```json
//! { "atoms": [{"label": "x", "weight": "1/2"}, {"label": "y", "weight": "1/2"}],
//!   "events": {"A": ["x"]},
//!   "subalgebras": {"C": ["A"]} }
//! ```
//!
//! Weights are exact rationals written as strings. Subalgebras list the
//! events that generate them. `events` and `subalgebras` may be omitted.
//!
//! References used by the CLI resolve as follows. Events: a name from the
//! event table, `ALL`/`FULL`, `NONE`/`EMPTY`, a single atom label, or a
//! label set `{x,y}`. Subalgebras: a name from the subalgebra table,
//! `trivial`, `full`, or `+`-separated event references generating it.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::algebra::{Event, FiniteProbabilityAlgebra, Subalgebra};
use crate::error::{Error, Result};
use crate::rational::{fmt_ratio, parse_rational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AtomEntry {
    pub label: String,
    pub weight: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureDocument {
    pub atoms: Vec<AtomEntry>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub events: BTreeMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub subalgebras: BTreeMap<String, Vec<String>>,
}

/// A loaded document: the algebra with its named events and subalgebras.
#[derive(Clone, Debug)]
pub struct Structure {
    pub algebra: FiniteProbabilityAlgebra,
    pub events: BTreeMap<String, Event>,
    pub subalgebras: BTreeMap<String, Subalgebra>,
}

impl StructureDocument {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    /// Document describing `alg` with the given named events.
    pub fn describe(alg: &FiniteProbabilityAlgebra, events: &BTreeMap<String, Event>) -> Self {
        let labels = alg.labels();
        StructureDocument {
            atoms: labels
                .iter()
                .zip(alg.weights())
                .map(|(l, w)| AtomEntry {
                    label: l.clone(),
                    weight: fmt_ratio(w),
                })
                .collect(),
            events: events
                .iter()
                .map(|(k, e)| (k.clone(), e.atoms().map(|x| labels[x].clone()).collect()))
                .collect(),
            subalgebras: BTreeMap::new(),
        }
    }

    fn parts(&self) -> Result<(Vec<crate::Rational>, Vec<String>)> {
        let weights = self
            .atoms
            .iter()
            .map(|a| {
                parse_rational(&a.weight).map_err(|_| Error::Document(format!("bad weight `{}` for `{}`", a.weight, a.label)))
            })
            .collect::<Result<_>>()?;
        Ok((weights, self.atoms.iter().map(|a| a.label.clone()).collect()))
    }

    /// Validated load.
    pub fn load(&self) -> Result<Structure> {
        let (w, l) = self.parts()?;
        self.attach(FiniteProbabilityAlgebra::new(w, Some(l))?)
    }

    /// Load without measure checks, for axiom reports on broken files.
    pub fn load_unchecked(&self) -> Result<Structure> {
        let (w, l) = self.parts()?;
        self.attach(FiniteProbabilityAlgebra::unchecked(w, Some(l))?)
    }

    fn attach(&self, algebra: FiniteProbabilityAlgebra) -> Result<Structure> {
        let mut s = Structure {
            algebra,
            events: BTreeMap::new(),
            subalgebras: BTreeMap::new(),
        };
        for (name, labels) in &self.events {
            let e = s
                .algebra
                .event_from_labels(labels)
                .map_err(|_| Error::Document(format!("event `{name}` names an unknown atom")))?;
            s.events.insert(name.clone(), e);
        }
        for (name, gens) in &self.subalgebras {
            let events = gens.iter().map(|g| s.event(g)).collect::<Result<Vec<_>>>()?;
            let sub = s.algebra.generated_subalgebra(&events)?;
            s.subalgebras.insert(name.clone(), sub);
        }
        Ok(s)
    }
}

impl Structure {
    pub fn from_json(text: &str) -> Result<Self> {
        StructureDocument::from_json(text)?.load()
    }

    pub fn event(&self, reference: &str) -> Result<Event> {
        let r = reference.trim();
        if let Some(e) = self.events.get(r) {
            return Ok(e.clone());
        }
        match r {
            "ALL" | "FULL" => return Ok(self.algebra.full()),
            "NONE" | "EMPTY" => return Ok(self.algebra.empty()),
            _ => {}
        }
        if let Some(inner) = r.strip_prefix('{').and_then(|t| t.strip_suffix('}')) {
            let labels: Vec<&str> = inner.split(',').map(str::trim).filter(|t| !t.is_empty()).collect();
            return self
                .algebra
                .event_from_labels(&labels)
                .map_err(|_| Error::Document(format!("unknown atom in `{r}`")));
        }
        match self.algebra.label_index(r) {
            Some(i) => Ok(self.algebra.atom(i)),
            None => Err(Error::Document(format!("unknown event `{r}`"))),
        }
    }

    /// Comma-separated event references, outside braces.
    pub fn events_list(&self, reference: &str) -> Result<Vec<Event>> {
        split_top(reference, ',').into_iter().map(|t| self.event(t)).collect()
    }

    pub fn subalgebra(&self, reference: &str) -> Result<Subalgebra> {
        let r = reference.trim();
        if let Some(s) = self.subalgebras.get(r) {
            return Ok(s.clone());
        }
        match r {
            "trivial" => Ok(Subalgebra::trivial(&self.algebra)),
            "full" => Ok(Subalgebra::full(&self.algebra)),
            _ => {
                let events = split_top(r, '+').into_iter().map(|t| self.event(t)).collect::<Result<Vec<_>>>()?;
                self.algebra.generated_subalgebra(&events)
            }
        }
    }

    /// Label set of an event, as `{x,y}`.
    pub fn show(&self, e: &Event) -> String {
        let labels: Vec<&str> = e.atoms().map(|x| self.algebra.labels()[x].as_str()).collect();
        format!("{{{}}}", labels.join(","))
    }
}

/// Splits on `sep` except inside braces; empty pieces are dropped.
fn split_top(text: &str, sep: char) -> Vec<&str> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0usize, 0usize);
    for (i, ch) in text.char_indices() {
        match ch {
            '{' => depth += 1,
            '}' => depth = depth.saturating_sub(1),
            c if c == sep && depth == 0 => {
                out.push(&text[start..i]);
                start = i + ch.len_utf8();
            }
            _ => {}
        }
    }
    out.push(&text[start..]);
    out.into_iter().map(str::trim).filter(|t| !t.is_empty()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    const XYZ: &str = r#"{
        "atoms": [{"label": "x", "weight": "1/2"}, {"label": "y", "weight": "1/4"}, {"label": "z", "weight": "0.25"}],
        "events": {"A": ["x", "y"]},
        "subalgebras": {"C": ["x"]}
    }"#;

    #[test]
    fn loads_and_resolves() {
        let s = Structure::from_json(XYZ).unwrap();
        assert_eq!(s.algebra.weights(), &[rat(1, 2), rat(1, 4), rat(1, 4)]);
        let a = s.event("A").unwrap();
        assert_eq!(a, s.algebra.event([0, 1]).unwrap());
        assert_eq!(s.event("{y, z}").unwrap(), s.algebra.event([1, 2]).unwrap());
        assert_eq!(s.event("ALL").unwrap(), s.algebra.full());
        assert_eq!(s.event("z").unwrap(), s.algebra.atom(2));
        assert_eq!(s.subalgebra("C").unwrap().block_count(), 2);
        assert_eq!(s.subalgebra("A+{y,z}").unwrap().block_count(), 3);
        assert_eq!(s.events_list("A, {z}, NONE").unwrap().len(), 3);
        assert_eq!(s.events_list("{x,y},z").unwrap().len(), 2);
        assert_eq!(s.show(&a), "{x,y}");
        assert!(matches!(s.event("B"), Err(Error::Document(_))));
    }

    #[test]
    fn round_trip() {
        let s = Structure::from_json(XYZ).unwrap();
        let doc = StructureDocument::describe(&s.algebra, &s.events);
        let again = StructureDocument::from_json(&doc.to_json()).unwrap().load().unwrap();
        assert_eq!(again.algebra, s.algebra);
        assert_eq!(again.show(&again.events["A"]), s.show(&s.events["A"]));
    }

    #[test]
    fn broken_weights() {
        let doc = StructureDocument::from_json(r#"{"atoms": [{"label": "x", "weight": "1/2"}, {"label": "y", "weight": "1/4"}]}"#).unwrap();
        assert!(matches!(doc.load(), Err(Error::InvalidAlgebra(_))));
        let s = doc.load_unchecked().unwrap();
        assert!(!s.algebra.verify_axioms().all_passed());
        assert!(matches!(StructureDocument::from_json("{"), Err(Error::Document(_))));
    }
}
