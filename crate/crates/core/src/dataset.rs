//! Corpus ingestion, feature standardization, pair-set construction, and
//! synthetic corpora with known latent intensity.
//!
//! On-disk formats:
//!
//! - corpus CSV with header `id,speaker,emotion,f0..f{d-1}`; emotion labels
//!   are case-insensitive
//! - corpus JSONL with the same keys, one object per line
//! - latent-intensity ground truth as CSV `id,latent`
//! - embeddings as JSONL `{"id": ..., "values": [...]}`
//! - [`Scaler`] as JSON `{"means": [...], "stds": [...]}`
//!
//! All types are immutable after construction and all operations are pure
//! given their inputs and seed.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;

use rand::distributions::Distribution;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::seed;
use crate::stats;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("row {row}: expected {expected} feature values, found {got}")]
    RaggedRow { row: usize, expected: usize, got: usize },
    #[error("row {row}: unknown emotion label {label:?}")]
    UnknownEmotion { row: usize, label: String },
    #[error("row {row}: {message}")]
    BadRow { row: usize, message: String },
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("utterance {id:?} has a non-finite feature value")]
    NonFiniteFeature { id: String },
    #[error("utterance at index {index} has {got} features, corpus dimension is {expected}")]
    InconsistentDim { index: usize, expected: usize, got: usize },
    #[error("corpus has no neutral utterances")]
    NoNeutral,
    #[error("corpus has no non-neutral utterances")]
    NoNonNeutral,
    #[error("invalid synthetic spec: {0}")]
    InvalidSpec(String),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

fn io_err(path: &Path, source: std::io::Error) -> DatasetError {
    DatasetError::Io { path: path.display().to_string(), source }
}

// ---------------------------------------------------------------------------
// Emotion and core records
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Emotion {
    Neutral,
    Angry,
    Happy,
    Sad,
    Surprise,
}

impl Emotion {
    pub const ALL: [Emotion; 5] =
        [Emotion::Neutral, Emotion::Angry, Emotion::Happy, Emotion::Sad, Emotion::Surprise];

    /// The four non-neutral classes, in canonical order.
    pub const CLASSES: [Emotion; 4] = [Emotion::Angry, Emotion::Happy, Emotion::Sad, Emotion::Surprise];

    pub fn is_neutral(self) -> bool {
        self == Emotion::Neutral
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Emotion::Neutral => "neutral",
            Emotion::Angry => "angry",
            Emotion::Happy => "happy",
            Emotion::Sad => "sad",
            Emotion::Surprise => "surprise",
        }
    }
}

impl fmt::Display for Emotion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Emotion {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "neutral" => Ok(Emotion::Neutral),
            "angry" => Ok(Emotion::Angry),
            "happy" => Ok(Emotion::Happy),
            "sad" => Ok(Emotion::Sad),
            "surprise" => Ok(Emotion::Surprise),
            other => Err(format!("unknown emotion {other:?}")),
        }
    }
}

/// One speech sample: a precomputed feature vector plus labels.
/// `latent_intensity` is only present for synthetic data and is consumed by
/// test oracles and reports, never by training.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Utterance {
    pub id: String,
    pub speaker_id: String,
    pub emotion: Emotion,
    pub features: Vec<f64>,
    pub latent_intensity: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Corpus {
    utterances: Vec<Utterance>,
    feature_dim: usize,
    emotion_classes: Vec<Emotion>,
    per_class_counts: BTreeMap<Emotion, usize>,
}

impl Corpus {
    /// Validates dimensions and finiteness; the field invariants hold for
    /// every constructed corpus.
    pub fn new(utterances: Vec<Utterance>) -> Result<Self, DatasetError> {
        let first = utterances.first().ok_or(DatasetError::EmptyCorpus)?;
        let feature_dim = first.features.len();
        if feature_dim == 0 {
            return Err(DatasetError::InconsistentDim { index: 0, expected: 1, got: 0 });
        }
        let mut per_class_counts: BTreeMap<Emotion, usize> = BTreeMap::new();
        for (index, utt) in utterances.iter().enumerate() {
            if utt.features.len() != feature_dim {
                return Err(DatasetError::InconsistentDim {
                    index,
                    expected: feature_dim,
                    got: utt.features.len(),
                });
            }
            if utt.features.iter().any(|f| !f.is_finite()) {
                return Err(DatasetError::NonFiniteFeature { id: utt.id.clone() });
            }
            *per_class_counts.entry(utt.emotion).or_default() += 1;
        }
        let emotion_classes: Vec<Emotion> =
            Emotion::CLASSES.iter().copied().filter(|e| per_class_counts.contains_key(e)).collect();
        Ok(Self { utterances, feature_dim, emotion_classes, per_class_counts })
    }

    pub fn utterances(&self) -> &[Utterance] {
        &self.utterances
    }

    pub fn len(&self) -> usize {
        self.utterances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.utterances.is_empty()
    }

    pub fn feature_dim(&self) -> usize {
        self.feature_dim
    }

    /// Non-neutral classes present, in canonical order.
    pub fn emotion_classes(&self) -> &[Emotion] {
        &self.emotion_classes
    }

    /// Counts for every emotion present, neutral included.
    pub fn per_class_counts(&self) -> &BTreeMap<Emotion, usize> {
        &self.per_class_counts
    }

    pub fn indices_of(&self, emotion: Emotion) -> Vec<usize> {
        self.utterances
            .iter()
            .enumerate()
            .filter(|(_, u)| u.emotion == emotion)
            .map(|(i, _)| i)
            .collect()
    }

    /// Attach latent intensities by utterance id (from a ground-truth file).
    pub fn with_latents(mut self, latents: &BTreeMap<String, f64>) -> Self {
        for utt in &mut self.utterances {
            if let Some(&v) = latents.get(&utt.id) {
                utt.latent_intensity = Some(v);
            }
        }
        self
    }
}

// ---------------------------------------------------------------------------
// Loading and saving
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorpusFormat {
    Csv,
    Jsonl,
}

/// Load a corpus. Rows are preserved in file order; row numbers in errors
/// are 1-based data rows (the CSV header does not count).
pub fn load_corpus(path: &Path, format: CorpusFormat) -> Result<Corpus, DatasetError> {
    match format {
        CorpusFormat::Csv => load_csv(path),
        CorpusFormat::Jsonl => load_jsonl(path),
    }
}

fn parse_emotion(label: &str, row: usize) -> Result<Emotion, DatasetError> {
    label.parse().map_err(|_| DatasetError::UnknownEmotion { row, label: label.to_string() })
}

fn load_csv(path: &Path) -> Result<Corpus, DatasetError> {
    let file = fs::File::open(path).map_err(|e| io_err(path, e))?;
    let mut reader = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(file);
    let headers = reader.headers()?.clone();
    if headers.len() < 4 || &headers[0] != "id" || &headers[1] != "speaker" || &headers[2] != "emotion" {
        return Err(DatasetError::BadRow {
            row: 0,
            message: "header must start with id,speaker,emotion,f0,...".into(),
        });
    }
    let dim = headers.len() - 3;
    let mut utterances = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record?;
        if record.len() != dim + 3 {
            return Err(DatasetError::RaggedRow {
                row,
                expected: dim,
                got: record.len().saturating_sub(3),
            });
        }
        let emotion = parse_emotion(&record[2], row)?;
        let mut features = Vec::with_capacity(dim);
        for (j, field) in record.iter().skip(3).enumerate() {
            let v: f64 = field.parse().map_err(|_| DatasetError::BadRow {
                row,
                message: format!("column f{j}: {field:?} is not a number"),
            })?;
            features.push(v);
        }
        utterances.push(Utterance {
            id: record[0].to_string(),
            speaker_id: record[1].to_string(),
            emotion,
            features,
            latent_intensity: None,
        });
    }
    Corpus::new(utterances)
}

fn load_jsonl(path: &Path) -> Result<Corpus, DatasetError> {
    let file = fs::File::open(path).map_err(|e| io_err(path, e))?;
    let reader = BufReader::new(file);
    let mut utterances = Vec::new();
    let mut dim: Option<usize> = None;
    for (i, line) in reader.lines().enumerate() {
        let row = i + 1;
        let line = line.map_err(|e| io_err(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let value: serde_json::Value = serde_json::from_str(&line)
            .map_err(|e| DatasetError::BadRow { row, message: e.to_string() })?;
        let obj = value
            .as_object()
            .ok_or_else(|| DatasetError::BadRow { row, message: "expected a JSON object".into() })?;
        let get_str = |key: &str| -> Result<String, DatasetError> {
            obj.get(key)
                .and_then(|v| v.as_str())
                .map(str::to_string)
                .ok_or_else(|| DatasetError::BadRow { row, message: format!("missing string key {key:?}") })
        };
        let id = get_str("id")?;
        let speaker = get_str("speaker")?;
        let emotion = parse_emotion(&get_str("emotion")?, row)?;
        let n_feats = obj.keys().filter(|k| is_feature_key(k)).count();
        let expected = *dim.get_or_insert(n_feats);
        if n_feats != expected {
            return Err(DatasetError::RaggedRow { row, expected, got: n_feats });
        }
        let mut features = Vec::with_capacity(expected);
        for j in 0..expected {
            let key = format!("f{j}");
            let v = obj.get(&key).and_then(|v| v.as_f64()).ok_or_else(|| DatasetError::BadRow {
                row,
                message: format!("missing numeric key {key:?}"),
            })?;
            features.push(v);
        }
        utterances.push(Utterance { id, speaker_id: speaker, emotion, features, latent_intensity: None });
    }
    Corpus::new(utterances)
}

fn is_feature_key(key: &str) -> bool {
    key.strip_prefix('f').is_some_and(|rest| !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()))
}

pub fn save_corpus(corpus: &Corpus, path: &Path, format: CorpusFormat) -> Result<(), DatasetError> {
    let mut out = fs::File::create(path).map_err(|e| io_err(path, e))?;
    match format {
        CorpusFormat::Csv => {
            let mut header = String::from("id,speaker,emotion");
            for j in 0..corpus.feature_dim() {
                header.push_str(&format!(",f{j}"));
            }
            writeln!(out, "{header}").map_err(|e| io_err(path, e))?;
            for utt in corpus.utterances() {
                let feats: Vec<String> = utt.features.iter().map(|f| format!("{f}")).collect();
                writeln!(out, "{},{},{},{}", utt.id, utt.speaker_id, utt.emotion, feats.join(","))
                    .map_err(|e| io_err(path, e))?;
            }
        }
        CorpusFormat::Jsonl => {
            for utt in corpus.utterances() {
                let mut obj = serde_json::Map::new();
                obj.insert("id".into(), utt.id.clone().into());
                obj.insert("speaker".into(), utt.speaker_id.clone().into());
                obj.insert("emotion".into(), utt.emotion.as_str().into());
                for (j, &f) in utt.features.iter().enumerate() {
                    obj.insert(format!("f{j}"), f.into());
                }
                writeln!(out, "{}", serde_json::Value::Object(obj)).map_err(|e| io_err(path, e))?;
            }
        }
    }
    Ok(())
}

/// Ground-truth latent intensities, CSV `id,latent`.
pub fn save_latents(corpus: &Corpus, path: &Path) -> Result<(), DatasetError> {
    let mut out = fs::File::create(path).map_err(|e| io_err(path, e))?;
    writeln!(out, "id,latent").map_err(|e| io_err(path, e))?;
    for utt in corpus.utterances() {
        if let Some(latent) = utt.latent_intensity {
            writeln!(out, "{},{latent}", utt.id).map_err(|e| io_err(path, e))?;
        }
    }
    Ok(())
}

pub fn load_latents(path: &Path) -> Result<BTreeMap<String, f64>, DatasetError> {
    let file = fs::File::open(path).map_err(|e| io_err(path, e))?;
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(file);
    let mut map = BTreeMap::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record?;
        let latent: f64 = record
            .get(1)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| DatasetError::BadRow { row, message: "bad latent value".into() })?;
        map.insert(record[0].to_string(), latent);
    }
    Ok(map)
}

/// One precomputed embedding, keyed by utterance id.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EmbeddingRecord {
    pub id: String,
    pub values: Vec<f64>,
}

/// Load embeddings from JSONL `{"id": ..., "values": [...]}`.
pub fn load_embeddings(path: &Path) -> Result<Vec<EmbeddingRecord>, DatasetError> {
    let file = fs::File::open(path).map_err(|e| io_err(path, e))?;
    let reader = BufReader::new(file);
    let mut records = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| io_err(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: EmbeddingRecord = serde_json::from_str(&line)
            .map_err(|e| DatasetError::BadRow { row: i + 1, message: e.to_string() })?;
        records.push(rec);
    }
    Ok(records)
}

// ---------------------------------------------------------------------------
// Standardization
// ---------------------------------------------------------------------------

/// Per-dimension z-score parameters, reusable at inference time.
/// Dimensions with zero variance map to 0.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Scaler {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

impl Scaler {
    pub fn transform(&self, features: &[f64]) -> Vec<f64> {
        features
            .iter()
            .zip(self.means.iter().zip(&self.stds))
            .map(|(&x, (&m, &s))| if s == 0.0 { 0.0 } else { (x - m) / s })
            .collect()
    }

    pub fn apply(&self, corpus: &Corpus) -> Corpus {
        let utterances = corpus
            .utterances()
            .iter()
            .map(|u| Utterance { features: self.transform(&u.features), ..u.clone() })
            .collect();
        Corpus::new(utterances).expect("scaling preserves corpus validity")
    }

    pub fn save(&self, path: &Path) -> Result<(), DatasetError> {
        let json = serde_json::to_string_pretty(self)?;
        fs::write(path, json).map_err(|e| io_err(path, e))
    }

    pub fn load(path: &Path) -> Result<Self, DatasetError> {
        let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Z-score every feature dimension (population standard deviation).
/// Applying the returned [`Scaler`] to the input corpus reproduces the
/// standardized corpus bit for bit.
pub fn standardize_features(corpus: &Corpus) -> Result<(Corpus, Scaler), DatasetError> {
    if corpus.is_empty() {
        return Err(DatasetError::EmptyCorpus);
    }
    let d = corpus.feature_dim();
    let n = corpus.len() as f64;
    let mut means = vec![0.0; d];
    for utt in corpus.utterances() {
        for (m, &x) in means.iter_mut().zip(&utt.features) {
            *m += x;
        }
    }
    for m in &mut means {
        *m /= n;
    }
    let mut stds = vec![0.0; d];
    for utt in corpus.utterances() {
        for (s, (&x, &m)) in stds.iter_mut().zip(utt.features.iter().zip(&means)) {
            *s += (x - m) * (x - m);
        }
    }
    for s in &mut stds {
        *s = (*s / n).sqrt();
    }
    let scaler = Scaler { means, stds };
    Ok((scaler.apply(corpus), scaler))
}

// ---------------------------------------------------------------------------
// Pair sets
// ---------------------------------------------------------------------------

/// Ordered pairs `O` (non-neutral i, neutral j) and similar pairs `M`
/// (same emotion, neutral-neutral included). Pairs index into the corpus
/// the set was built from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairSet {
    pub ordered_pairs: Vec<(usize, usize)>,
    pub similar_pairs: Vec<(usize, usize)>,
}

impl PairSet {
    /// Restrict to the subproblem for one class: `O` pairs of that class
    /// against neutral, `M` pairs within the class or within neutral.
    pub fn restrict_to_class(&self, corpus: &Corpus, class: Emotion) -> PairSet {
        let emo = |i: usize| corpus.utterances()[i].emotion;
        PairSet {
            ordered_pairs: self.ordered_pairs.iter().copied().filter(|&(i, _)| emo(i) == class).collect(),
            similar_pairs: self
                .similar_pairs
                .iter()
                .copied()
                .filter(|&(i, _)| emo(i) == class || emo(i).is_neutral())
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PairStrategy {
    /// Exhaustive for corpora up to 2,000 utterances, sampled above.
    Auto,
    Exhaustive,
    Sampled,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairSamplingConfig {
    pub strategy: PairStrategy,
    /// Cap per pair set when sampling.
    pub max_pairs_per_set: usize,
    pub seed: u64,
}

impl Default for PairSamplingConfig {
    fn default() -> Self {
        Self { strategy: PairStrategy::Auto, max_pairs_per_set: 100_000, seed: 0 }
    }
}

const AUTO_EXHAUSTIVE_LIMIT: usize = 2000;

/// Build the `O`/`M` constraint sets.
///
/// Exhaustive mode enumerates all `(non-neutral, neutral)` ordered pairs
/// and all same-class unordered pairs. Sampled mode draws up to
/// `max_pairs_per_set` distinct pairs per set, uniformly and
/// deterministically for the configured seed.
pub fn build_pair_sets(corpus: &Corpus, config: &PairSamplingConfig) -> Result<PairSet, DatasetError> {
    let neutral = corpus.indices_of(Emotion::Neutral);
    if neutral.is_empty() {
        return Err(DatasetError::NoNeutral);
    }
    let non_neutral: Vec<usize> = corpus
        .utterances()
        .iter()
        .enumerate()
        .filter(|(_, u)| !u.emotion.is_neutral())
        .map(|(i, _)| i)
        .collect();
    if non_neutral.is_empty() {
        return Err(DatasetError::NoNonNeutral);
    }

    let exhaustive = match config.strategy {
        PairStrategy::Exhaustive => true,
        PairStrategy::Sampled => false,
        PairStrategy::Auto => corpus.len() <= AUTO_EXHAUSTIVE_LIMIT,
    };

    // groups for M: neutral first, then classes in canonical order
    let mut groups: Vec<Vec<usize>> = vec![neutral.clone()];
    for &class in corpus.emotion_classes() {
        groups.push(corpus.indices_of(class));
    }

    let o_total = non_neutral.len() * neutral.len();
    let m_total: usize = groups.iter().map(|g| g.len() * g.len().saturating_sub(1) / 2).sum();

    let ordered_pairs = if exhaustive || o_total <= config.max_pairs_per_set {
        let mut pairs = Vec::with_capacity(o_total);
        for &i in &non_neutral {
            for &j in &neutral {
                pairs.push((i, j));
            }
        }
        pairs
    } else {
        let mut rng = seed::stage_rng(config.seed, "pairs.ordered");
        let mut picks: Vec<usize> =
            rand::seq::index::sample(&mut rng, o_total, config.max_pairs_per_set).into_vec();
        picks.sort_unstable();
        picks
            .into_iter()
            .map(|idx| (non_neutral[idx / neutral.len()], neutral[idx % neutral.len()]))
            .collect()
    };

    let similar_pairs = if exhaustive || m_total <= config.max_pairs_per_set {
        let mut pairs = Vec::with_capacity(m_total);
        for group in &groups {
            for (a, &i) in group.iter().enumerate() {
                for &j in &group[a + 1..] {
                    pairs.push((i, j));
                }
            }
        }
        pairs
    } else {
        let mut rng = seed::stage_rng(config.seed, "pairs.similar");
        let mut picks: Vec<usize> =
            rand::seq::index::sample(&mut rng, m_total, config.max_pairs_per_set).into_vec();
        picks.sort_unstable();
        picks.into_iter().map(|idx| unrank_group_pair(&groups, idx)).collect()
    };

    Ok(PairSet { ordered_pairs, similar_pairs })
}

/// Map a global index in `0..sum C(|g|,2)` to the corresponding
/// within-group unordered pair.
fn unrank_group_pair(groups: &[Vec<usize>], mut idx: usize) -> (usize, usize) {
    for group in groups {
        let n = group.len();
        let count = n * n.saturating_sub(1) / 2;
        if idx < count {
            // unrank within the group: row i owns (n - 1 - i) pairs
            let mut i = 0;
            let mut remaining = idx;
            while remaining >= n - 1 - i {
                remaining -= n - 1 - i;
                i += 1;
            }
            let j = i + 1 + remaining;
            return (group[i], group[j]);
        }
        idx -= count;
    }
    unreachable!("pair index out of range");
}

// ---------------------------------------------------------------------------
// Synthetic corpora
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LatentLayout {
    /// Latents drawn uniformly from the class interval.
    Uniform,
    /// Latents evenly spaced across the class interval, in sample order.
    Linspace,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassSpec {
    pub emotion: Emotion,
    pub count: usize,
    /// Center of this class's latent-intensity interval.
    pub offset: f64,
}

/// Recipe for a synthetic corpus: features are `direction * latent` plus
/// isotropic Gaussian noise. Neutral latents are centered at 0; each class
/// interval sits at its offset, strictly above every neutral latent by at
/// least `margin`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub feature_dim: usize,
    pub neutral_count: usize,
    pub classes: Vec<ClassSpec>,
    /// Ground-truth ranking direction, length `feature_dim`.
    pub direction: Vec<f64>,
    /// Guaranteed minimum latent gap between class and neutral samples.
    pub margin: f64,
    /// Full width of each latent interval.
    pub intensity_spread: f64,
    pub noise_std: f64,
    pub layout: LatentLayout,
    /// Utterances are assigned round-robin to this many speakers.
    pub speakers: usize,
}

impl SyntheticSpec {
    /// Balanced spec: every class gets `per_class` samples at the smallest
    /// offset compatible with the margin, `margin + intensity_spread`.
    pub fn balanced(
        classes: &[Emotion],
        per_class: usize,
        neutral_count: usize,
        feature_dim: usize,
        margin: f64,
        intensity_spread: f64,
        noise_std: f64,
    ) -> Self {
        let norm = (feature_dim as f64).sqrt();
        Self {
            feature_dim,
            neutral_count,
            classes: classes
                .iter()
                .map(|&emotion| ClassSpec { emotion, count: per_class, offset: margin + intensity_spread })
                .collect(),
            direction: vec![1.0 / norm; feature_dim],
            margin,
            intensity_spread,
            noise_std,
            layout: LatentLayout::Uniform,
            speakers: 4,
        }
    }

    fn validate(&self) -> Result<(), DatasetError> {
        if self.feature_dim == 0 {
            return Err(DatasetError::InvalidSpec("feature_dim must be positive".into()));
        }
        if self.neutral_count == 0 {
            return Err(DatasetError::InvalidSpec("neutral_count must be positive".into()));
        }
        if self.direction.len() != self.feature_dim {
            return Err(DatasetError::InvalidSpec(format!(
                "direction has length {}, expected {}",
                self.direction.len(),
                self.feature_dim
            )));
        }
        if self.classes.is_empty() {
            return Err(DatasetError::InvalidSpec("at least one emotion class required".into()));
        }
        for class in &self.classes {
            if class.count == 0 {
                return Err(DatasetError::InvalidSpec(format!("class {} has zero count", class.emotion)));
            }
            if class.emotion.is_neutral() {
                return Err(DatasetError::InvalidSpec("classes must be non-neutral".into()));
            }
            // neutral tops out at spread/2; the class floor must clear it by the margin
            if class.offset - self.intensity_spread < self.margin {
                return Err(DatasetError::InvalidSpec(format!(
                    "class {} offset {} too low for margin {} at spread {}",
                    class.emotion, class.offset, self.margin, self.intensity_spread
                )));
            }
        }
        if self.noise_std < 0.0 || self.intensity_spread < 0.0 || self.margin < 0.0 {
            return Err(DatasetError::InvalidSpec("negative spread, margin, or noise".into()));
        }
        if self.speakers == 0 {
            return Err(DatasetError::InvalidSpec("speakers must be positive".into()));
        }
        Ok(())
    }
}

/// Generate a synthetic corpus. Deterministic per (spec, seed).
pub fn synth_corpus(spec: &SyntheticSpec, seed: u64) -> Result<Corpus, DatasetError> {
    spec.validate()?;
    let mut rng = seed::stage_rng(seed, "synth");
    let normal = rand_distr::Normal::new(0.0, spec.noise_std)
        .map_err(|e| DatasetError::InvalidSpec(e.to_string()))?;
    let half = spec.intensity_spread / 2.0;

    let mut utterances = Vec::new();
    let mut speaker_cursor = 0usize;
    let mut blocks: Vec<(Emotion, usize, f64)> = vec![(Emotion::Neutral, spec.neutral_count, 0.0)];
    blocks.extend(spec.classes.iter().map(|c| (c.emotion, c.count, c.offset)));

    for (emotion, count, offset) in blocks {
        for i in 0..count {
            let latent = match spec.layout {
                LatentLayout::Uniform => {
                    if half == 0.0 {
                        offset
                    } else {
                        offset + rng.gen_range(-half..=half)
                    }
                }
                LatentLayout::Linspace => {
                    if count == 1 {
                        offset
                    } else {
                        offset - half + spec.intensity_spread * i as f64 / (count - 1) as f64
                    }
                }
            };
            let mut features: Vec<f64> = spec.direction.iter().map(|w| w * latent).collect();
            if spec.noise_std > 0.0 {
                for f in &mut features {
                    *f += normal.sample(&mut rng);
                }
            }
            utterances.push(Utterance {
                id: format!("{emotion}_{i:04}"),
                speaker_id: format!("spk{}", speaker_cursor % spec.speakers),
                emotion,
                features,
                latent_intensity: Some(latent),
            });
            speaker_cursor += 1;
        }
    }
    Corpus::new(utterances)
}
