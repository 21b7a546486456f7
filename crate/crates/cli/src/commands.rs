use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use entail_core::prover::extract_from_pair;
use entail_core::{
    classify, parse_formula, Axiom, AxiomMode, EngineConfig, Formula, KnowledgeBase, Label, Mode, ProverError,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::dataset::{self, InputError, PairRecord};
use crate::metrics::Metrics;

#[derive(Debug, thiserror::Error)]
pub enum Fatal {
    #[error(transparent)]
    Input(#[from] InputError),
    #[error(transparent)]
    Kb(#[from] entail_core::KbError),
    #[error("{0}")]
    Other(String),
}

pub struct Common {
    pub dataset: PathBuf,
    pub relations: Option<PathBuf>,
    pub axioms: Option<PathBuf>,
    pub mode: Mode,
    pub jobs: usize,
    pub timeout_secs: u64,
}

impl Common {
    fn config(&self) -> EngineConfig {
        let mut cfg = EngineConfig::default().with_mode(self.mode);
        if self.timeout_secs > 0 {
            cfg.time_limit = Some(Duration::from_secs(self.timeout_secs));
        }
        cfg
    }

    fn knowledge(&self, cfg: &EngineConfig) -> Result<KnowledgeBase, Fatal> {
        let mut kb = match &self.relations {
            Some(p) => KnowledgeBase::load_word_relations(p)?,
            None => KnowledgeBase::new(),
        };
        if let Some(p) = &self.axioms {
            kb.merge_axioms_from(p, cfg)?;
        }
        Ok(kb)
    }

    fn run<T: Send>(&self, rows: &[PairRecord], f: impl Fn(&PairRecord) -> T + Sync) -> Result<Vec<T>, Fatal> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.jobs)
            .build()
            .map_err(|e| Fatal::Other(e.to_string()))?;
        Ok(pool.install(|| rows.par_iter().map(&f).collect()))
    }
}

/// A command's report and whether some pair failed.
pub struct Summary<T> {
    pub report: T,
    pub partial: bool,
}

fn parse_pair(rec: &PairRecord, cfg: &EngineConfig) -> Result<(Formula, Formula), String> {
    let t = parse_formula(&rec.premise, cfg).map_err(|e| format!("premise: {e}"))?;
    let h = parse_formula(&rec.hypothesis, cfg).map_err(|e| format!("hypothesis: {e}"))?;
    Ok((t, h))
}

#[derive(Serialize)]
pub struct PairTiming {
    pub id: String,
    pub seconds: f64,
    pub axioms: usize,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub truncated: bool,
}

#[derive(Serialize)]
pub struct ExtractReport {
    pub pairs: usize,
    pub labeled: usize,
    pub skipped_unknown: usize,
    pub failed: Vec<String>,
    pub written: usize,
    pub word_axioms: usize,
    pub phrase_axioms: usize,
    pub mean_seconds: f64,
    pub max_seconds: f64,
    pub timings: Vec<PairTiming>,
}

enum Extracted {
    Skipped,
    Done { axioms: Vec<Axiom>, seconds: f64, truncated: bool },
    Failed(String),
}

pub fn extract(common: &Common, out: &Path) -> Result<Summary<ExtractReport>, Fatal> {
    let rows = dataset::load_dataset(&common.dataset)?;
    let cfg = common.config();
    let kb = common.knowledge(&cfg)?;
    let results = common.run(&rows, |rec| {
        let gold = match rec.gold {
            Some(g @ (Label::Yes | Label::No)) => g,
            _ => return Extracted::Skipped,
        };
        let start = Instant::now();
        let (t, h) = match parse_pair(rec, &cfg) {
            Ok(p) => p,
            Err(e) => return Extracted::Failed(e),
        };
        let (axioms, truncated) = match extract_from_pair(&t, &h, gold, &kb, &cfg) {
            Ok(axioms) => (axioms, false),
            Err(ProverError::Timeout) => (Vec::new(), true),
            Err(e) => return Extracted::Failed(e.to_string()),
        };
        Extracted::Done { axioms, seconds: start.elapsed().as_secs_f64(), truncated }
    })?;

    let mut learned = KnowledgeBase::new();
    let mut report = ExtractReport {
        pairs: rows.len(),
        labeled: 0,
        skipped_unknown: 0,
        failed: Vec::new(),
        written: 0,
        word_axioms: 0,
        phrase_axioms: 0,
        mean_seconds: 0.0,
        max_seconds: 0.0,
        timings: Vec::new(),
    };
    for (rec, res) in rows.iter().zip(results) {
        match res {
            Extracted::Skipped => report.skipped_unknown += 1,
            Extracted::Failed(e) => {
                eprintln!("warning: pair {}: {e}", rec.id);
                report.failed.push(rec.id.clone());
            }
            Extracted::Done { axioms, seconds, truncated } => {
                report.labeled += 1;
                if truncated {
                    eprintln!("warning: pair {}: time limit reached", rec.id);
                }
                report.timings.push(PairTiming { id: rec.id.clone(), seconds, axioms: axioms.len(), truncated });
                for mut ax in axioms {
                    if let Some(p) = ax.provenance.as_mut() {
                        p.pair = rec.id.clone();
                    }
                    learned.insert_axiom(ax);
                }
            }
        }
    }
    if report.labeled == 0 {
        eprintln!("warning: no pair with a yes or no gold label");
    }
    for ax in learned.axioms() {
        match ax.mode() {
            Some(AxiomMode::Phrase) => report.phrase_axioms += 1,
            _ => report.word_axioms += 1,
        }
    }
    report.written = learned.axioms().len();
    let secs: Vec<f64> = report.timings.iter().map(|t| t.seconds).collect();
    if !secs.is_empty() {
        report.mean_seconds = secs.iter().sum::<f64>() / secs.len() as f64;
        report.max_seconds = secs.iter().cloned().fold(0.0, f64::max);
    }
    learned.save_axioms(out)?;
    let partial = !report.failed.is_empty();
    Ok(Summary { report, partial })
}

#[derive(Serialize)]
pub struct ClassifyReport {
    pub pairs: usize,
    pub mode: String,
    pub failed: Vec<String>,
    pub truncated: Vec<String>,
    pub counts: LabelCounts,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metrics: Option<Metrics>,
}

#[derive(Default, Serialize)]
pub struct LabelCounts {
    pub yes: usize,
    pub no: usize,
    pub unknown: usize,
}

struct Classified {
    label: Label,
    truncated: bool,
    trace: String,
    error: Option<String>,
}

pub fn classify_cmd(common: &Common, out: &Path, trace: bool, abduce: bool) -> Result<Summary<ClassifyReport>, Fatal> {
    let rows = dataset::load_dataset(&common.dataset)?;
    let cfg = common.config().with_phrase_abduction(abduce);
    let kb = common.knowledge(&cfg)?;
    let results = common.run(&rows, |rec| {
        let failed = |e: String| Classified { label: Label::Unknown, truncated: false, trace: String::new(), error: Some(e) };
        let (t, h) = match parse_pair(rec, &cfg) {
            Ok(p) => p,
            Err(e) => return failed(e),
        };
        match classify(&t, &h, &kb, &cfg) {
            Ok(c) => {
                let shown = if c.label == Label::No { &c.contradict } else { &c.entail };
                let trace = if trace { shown.trace_text() } else { String::new() };
                Classified { label: c.label, truncated: c.truncated, trace, error: None }
            }
            Err(e) => failed(e.to_string()),
        }
    })?;

    let mut report = ClassifyReport {
        pairs: rows.len(),
        mode: common.mode.to_string(),
        failed: Vec::new(),
        truncated: Vec::new(),
        counts: LabelCounts::default(),
        metrics: None,
    };
    let mut predictions = Vec::new();
    let mut scored = Vec::new();
    for (rec, res) in rows.iter().zip(results) {
        if let Some(e) = &res.error {
            eprintln!("warning: pair {}: {e}", rec.id);
            report.failed.push(rec.id.clone());
        }
        if res.truncated {
            report.truncated.push(rec.id.clone());
        }
        if trace {
            eprintln!("# {} {}", rec.id, res.label);
            eprint!("{}", res.trace);
        }
        match res.label {
            Label::Yes => report.counts.yes += 1,
            Label::No => report.counts.no += 1,
            Label::Unknown => report.counts.unknown += 1,
        }
        if let Some(g) = rec.gold {
            scored.push((g, res.label));
        }
        predictions.push((rec.id.clone(), res.label));
    }
    if !scored.is_empty() {
        report.metrics = Some(Metrics::from_pairs(scored));
    }
    std::fs::write(out, dataset::format_predictions(&predictions))
        .map_err(|source| InputError::Io { path: out.display().to_string(), source })?;
    let partial = !report.failed.is_empty();
    Ok(Summary { report, partial })
}

pub fn report(predictions: &Path, gold: &Path) -> Result<Metrics, Fatal> {
    let rows = dataset::load_dataset(gold)?;
    let preds = dataset::parse_predictions(&dataset::read(predictions)?, &predictions.display().to_string())?;
    if preds.len() != rows.len() {
        return Err(InputError::IdMismatch(format!("{} predictions for {} pairs", preds.len(), rows.len())).into());
    }
    let mut pairs = Vec::new();
    for (rec, (id, label)) in rows.iter().zip(&preds) {
        if &rec.id != id {
            return Err(InputError::IdMismatch(format!("expected `{}`, found `{id}`", rec.id)).into());
        }
        let gold = rec
            .gold
            .ok_or_else(|| InputError::IdMismatch(format!("pair `{id}` has no gold label")))?;
        pairs.push((gold, *label));
    }
    Ok(Metrics::from_pairs(pairs))
}
