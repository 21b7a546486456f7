//! Lexical relations and stored phrase axioms.
//!
//! Relation files are UTF-8 with one `source<TAB>target<TAB>kind` entry per
//! line. Axiom files hold one JSON record per line. Both start with `#v1`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::axiom::{Axiom, AxiomRecord};
use crate::config::EngineConfig;
use crate::error::KbError;

pub const HEADER: &str = "#v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RelationKind {
    Synonym,
    Hypernym,
    Antonym,
}

impl RelationKind {
    /// Synonyms and hypernyms license `source(x) → target(x)`.
    pub fn is_positive(self) -> bool {
        !matches!(self, RelationKind::Antonym)
    }
}

impl fmt::Display for RelationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RelationKind::Synonym => "synonym",
            RelationKind::Hypernym => "hypernym",
            RelationKind::Antonym => "antonym",
        })
    }
}

impl FromStr for RelationKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "synonym" => Ok(RelationKind::Synonym),
            "hypernym" => Ok(RelationKind::Hypernym),
            "antonym" => Ok(RelationKind::Antonym),
            other => Err(format!("unknown relation kind `{other}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WordRelation {
    pub source: String,
    pub target: String,
    pub kind: RelationKind,
}

/// Read-only during proving; safe to share between worker threads.
#[derive(Clone, Debug, Default)]
pub struct KnowledgeBase {
    relations: HashMap<(String, String), RelationKind>,
    by_source: BTreeMap<String, Vec<String>>,
    axioms: Vec<Axiom>,
    signatures: HashMap<String, Vec<usize>>,
}

impl KnowledgeBase {
    pub fn new() -> Self {
        KnowledgeBase::default()
    }

    /// Adds a relation with symmetric closure for synonyms and antonyms.
    /// A synonym overrides a hypernym on the same pair; an antonym clashing
    /// with a synonym or hypernym is an error.
    pub fn add_relation(&mut self, source: &str, target: &str, kind: RelationKind) -> Result<(), String> {
        self.add_directed(source, target, kind)?;
        if kind != RelationKind::Hypernym {
            self.add_directed(target, source, kind)?;
        }
        Ok(())
    }

    fn add_directed(&mut self, source: &str, target: &str, kind: RelationKind) -> Result<(), String> {
        let key = (source.to_string(), target.to_string());
        let merged = match self.relations.get(&key) {
            None => kind,
            Some(&old) if old == kind => return Ok(()),
            Some(&old) if old.is_positive() && kind.is_positive() => RelationKind::Synonym,
            Some(&old) => {
                return Err(format!("{source} -> {target}: {kind} conflicts with {old}"));
            }
        };
        if !self.relations.contains_key(&key) {
            let targets = self.by_source.entry(key.0.clone()).or_default();
            targets.push(key.1.clone());
            targets.sort();
        }
        self.relations.insert(key, merged);
        Ok(())
    }

    pub fn parse_word_relations(text: &str) -> Result<KnowledgeBase, KbError> {
        let mut kb = KnowledgeBase::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').map(str::trim).collect();
            let err = |message: String| KbError::Format { line: line_no, message };
            if cols.len() != 3 || cols.iter().any(|c| c.is_empty()) {
                return Err(err(format!("expected 3 tab-separated columns, found `{raw}`")));
            }
            let kind: RelationKind = cols[2].parse().map_err(err)?;
            kb.add_relation(cols[0], cols[1], kind).map_err(err)?;
        }
        Ok(kb)
    }

    pub fn load_word_relations(path: impl AsRef<Path>) -> Result<KnowledgeBase, KbError> {
        KnowledgeBase::parse_word_relations(&fs::read_to_string(path)?)
    }

    pub fn lookup(&self, source: &str, target: &str) -> Option<WordRelation> {
        self.relations
            .get(&(source.to_string(), target.to_string()))
            .map(|&kind| WordRelation {
                source: source.to_string(),
                target: target.to_string(),
                kind,
            })
    }

    /// Relation kinds from `source` to every related target, in target order.
    pub fn related<'a>(&'a self, source: &'a str) -> impl Iterator<Item = WordRelation> + 'a {
        self.by_source
            .get(source)
            .into_iter()
            .flatten()
            .filter_map(move |t| self.lookup(source, t))
    }

    pub fn relations(&self) -> Vec<WordRelation> {
        self.by_source
            .keys()
            .flat_map(|s| self.related(s))
            .collect()
    }

    pub fn relation_count(&self) -> usize {
        self.relations.len()
    }

    /// Inserts unless an α-equivalent axiom is already stored.
    pub fn insert_axiom(&mut self, axiom: Axiom) -> bool {
        let sig = axiom.signature();
        let slot = self.signatures.entry(sig).or_default();
        if slot.iter().any(|&i| self.axioms[i].alpha_eq(&axiom)) {
            return false;
        }
        slot.push(self.axioms.len());
        self.axioms.push(axiom);
        true
    }

    pub fn contains_axiom(&self, axiom: &Axiom) -> bool {
        self.signatures
            .get(&axiom.signature())
            .is_some_and(|slot| slot.iter().any(|&i| self.axioms[i].alpha_eq(axiom)))
    }

    pub fn axioms(&self) -> &[Axiom] {
        &self.axioms
    }

    pub fn axioms_to_string(&self) -> String {
        let mut out = String::from(HEADER);
        out.push('\n');
        for ax in &self.axioms {
            out.push_str(&serde_json::to_string(&ax.to_record()).expect("record serializes"));
            out.push('\n');
        }
        out
    }

    pub fn save_axioms(&self, path: impl AsRef<Path>) -> Result<(), KbError> {
        fs::write(path, self.axioms_to_string())?;
        Ok(())
    }

    /// Adds the axioms of an axiom file to this knowledge base.
    pub fn parse_axioms_into(&mut self, text: &str, config: &EngineConfig) -> Result<usize, KbError> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h.trim() == HEADER => {}
            Some(_) => {
                return Err(KbError::Format { line: 1, message: format!("missing `{HEADER}` header") })
            }
            None => return Ok(0),
        }
        let mut added = 0;
        for (i, line) in lines {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| KbError::Format { line: i + 1, message };
            let rec: AxiomRecord = serde_json::from_str(line).map_err(|e| err(e.to_string()))?;
            let ax = Axiom::from_record(&rec, config).map_err(err)?;
            if self.insert_axiom(ax) {
                added += 1;
            }
        }
        Ok(added)
    }

    pub fn load_axioms(path: impl AsRef<Path>, config: &EngineConfig) -> Result<KnowledgeBase, KbError> {
        let mut kb = KnowledgeBase::new();
        kb.parse_axioms_into(&fs::read_to_string(path)?, config)?;
        Ok(kb)
    }

    pub fn merge_axioms_from(&mut self, path: impl AsRef<Path>, config: &EngineConfig) -> Result<usize, KbError> {
        self.parse_axioms_into(&fs::read_to_string(path)?, config)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Sort;

    #[test]
    fn hypernym_is_directional() {
        let kb = KnowledgeBase::parse_word_relations("#v1\nlady\twoman\thypernym\n").unwrap();
        assert_eq!(kb.lookup("lady", "woman").unwrap().kind, RelationKind::Hypernym);
        assert!(kb.lookup("woman", "lady").is_none());
    }

    #[test]
    fn synonyms_close_symmetrically() {
        let kb = KnowledgeBase::parse_word_relations("cut\tslice\tsynonym\n").unwrap();
        assert_eq!(kb.lookup("cut", "slice").unwrap().kind, RelationKind::Synonym);
        assert_eq!(kb.lookup("slice", "cut").unwrap().kind, RelationKind::Synonym);
    }

    #[test]
    fn empty_and_comment_only_files() {
        assert_eq!(KnowledgeBase::parse_word_relations("").unwrap().relation_count(), 0);
        let kb = KnowledgeBase::parse_word_relations("#v1\n# nothing\n\n").unwrap();
        assert_eq!(kb.relation_count(), 0);
    }

    #[test]
    fn antonym_lookup_with_multiword_names() {
        let kb = KnowledgeBase::parse_word_relations("put_on\tremove\tantonym\n").unwrap();
        assert_eq!(kb.lookup("put_on", "remove").unwrap().kind, RelationKind::Antonym);
        assert_eq!(kb.lookup("remove", "put_on").unwrap().kind, RelationKind::Antonym);
    }

    #[test]
    fn synonym_wins_over_hypernym() {
        let kb =
            KnowledgeBase::parse_word_relations("a\tb\thypernym\na\tb\tsynonym\n").unwrap();
        assert_eq!(kb.lookup("a", "b").unwrap().kind, RelationKind::Synonym);
    }

    #[test]
    fn format_errors_carry_line_numbers() {
        let err = KnowledgeBase::parse_word_relations("#v1\na\tb\n").unwrap_err();
        assert!(matches!(err, KbError::Format { line: 2, .. }));
        let err = KnowledgeBase::parse_word_relations("a\tb\tcousin\n").unwrap_err();
        assert!(matches!(err, KbError::Format { line: 1, .. }));
        let err = KnowledgeBase::parse_word_relations("a\tb\thypernym\nb\ta\tantonym\n").unwrap_err();
        assert!(matches!(err, KbError::Format { line: 2, .. }));
    }

    #[test]
    fn axiom_dedup_and_empty_file() {
        let mut kb = KnowledgeBase::new();
        assert_eq!(kb.axioms_to_string(), "#v1\n");
        assert!(kb.insert_axiom(Axiom::word("lady", "woman", Sort::Entity, false)));
        assert!(!kb.insert_axiom(Axiom::word("lady", "woman", Sort::Entity, false)));
        assert_eq!(kb.axioms().len(), 1);
    }
}
