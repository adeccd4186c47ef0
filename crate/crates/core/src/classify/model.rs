use std::cell::Cell;
use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::ClassifyError;
use crate::text::{is_punct, tokenize};

pub const DEFAULT_EPOCHS: usize = 10;
const HEADER: &str = "linmodel v1";

thread_local! {
    static FIT_CALLS: Cell<u64> = const { Cell::new(0) };
}

/// How many times [`fit`] has run on the current thread.
pub fn fit_invocations() -> u64 {
    FIT_CALLS.with(Cell::get)
}

/// Case-folded unigrams plus `a_b` bigrams of adjacent words, with counts,
/// in order of first occurrence. Punctuation is not a word.
pub fn featurize(text: &str) -> Vec<(String, u32)> {
    let words: Vec<String> = tokenize(text)
        .into_iter()
        .filter(|t| !t.text.chars().all(is_punct))
        .map(|t| t.lower)
        .collect();
    let mut order: Vec<(String, u32)> = Vec::new();
    let mut seen: HashMap<String, usize> = HashMap::new();
    let mut bump = |f: String| match seen.get(&f) {
        Some(&i) => order[i].1 += 1,
        None => {
            seen.insert(f.clone(), order.len());
            order.push((f, 1));
        }
    };
    for w in &words {
        bump(w.clone());
    }
    for pair in words.windows(2) {
        bump(format!("{}_{}", pair[0], pair[1]));
    }
    order
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrainingExample {
    pub text: String,
    pub label: String,
}

impl TrainingExample {
    pub fn new(label: impl Into<String>, text: impl Into<String>) -> Self {
        TrainingExample { text: text.into(), label: label.into() }
    }
}

/// Reads `label<TAB>text` lines. Blank lines and `#` comments are skipped.
pub fn parse_corpus(text: &str) -> Result<Vec<TrainingExample>, ClassifyError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let (label, body) = line.split_once('\t').ok_or(ClassifyError::CorpusParse { line: i + 1 })?;
        if label.trim().is_empty() {
            return Err(ClassifyError::CorpusParse { line: i + 1 });
        }
        out.push(TrainingExample::new(label.trim(), body.trim()));
    }
    Ok(out)
}

/// A multiclass linear model over bag-of-words features.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    classes: Vec<String>,
    vocabulary: Vec<String>,
    index: HashMap<String, usize>,
    weights: Vec<Vec<f64>>,
    bias: Vec<f64>,
}

impl LinearModel {
    /// A model with all-zero weights.
    pub fn zeros(classes: Vec<String>, vocabulary: Vec<String>) -> Self {
        let index = vocabulary.iter().enumerate().map(|(i, f)| (f.clone(), i)).collect();
        let weights = vec![vec![0.0; vocabulary.len()]; classes.len()];
        let bias = vec![0.0; classes.len()];
        LinearModel { classes, vocabulary, index, weights, bias }
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn vocabulary(&self) -> &[String] {
        &self.vocabulary
    }

    pub fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    /// Multiplies every weight and bias by `factor`.
    pub fn scaled(&self, factor: f64) -> LinearModel {
        let mut m = self.clone();
        m.weights.iter_mut().flatten().for_each(|w| *w *= factor);
        m.bias.iter_mut().for_each(|b| *b *= factor);
        m
    }

    /// Known features as `(vocabulary index, count)`, sorted by index.
    pub fn vectorize(&self, text: &str) -> Vec<(usize, f64)> {
        let mut v: Vec<(usize, f64)> = featurize(text)
            .into_iter()
            .filter_map(|(f, n)| self.index.get(&f).map(|&i| (i, f64::from(n))))
            .collect();
        v.sort_by_key(|&(i, _)| i);
        v
    }

    fn score_vec(&self, class: usize, x: &[(usize, f64)]) -> f64 {
        self.bias[class] + x.iter().map(|&(i, n)| self.weights[class][i] * n).sum::<f64>()
    }

    /// Score of every class, in class order.
    pub fn scores(&self, text: &str) -> Vec<f64> {
        let x = self.vectorize(text);
        (0..self.classes.len()).map(|c| self.score_vec(c, &x)).collect()
    }

    fn argmax(scores: &[f64]) -> usize {
        let mut best = 0;
        for (i, s) in scores.iter().enumerate().skip(1) {
            if *s > scores[best] {
                best = i;
            }
        }
        best
    }

    /// Highest-scoring class; ties go to the earliest class.
    pub fn predict(&self, text: &str) -> (String, f64) {
        let scores = self.scores(text);
        let best = Self::argmax(&scores);
        (self.classes[best].clone(), scores[best])
    }

    /// Writes the `linmodel v1` text format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{HEADER}");
        let _ = writeln!(out, "classes\t{}", self.classes.len());
        for c in &self.classes {
            let _ = writeln!(out, "{c}");
        }
        let _ = writeln!(out, "vocabulary\t{}", self.vocabulary.len());
        for f in &self.vocabulary {
            let _ = writeln!(out, "{f}");
        }
        let _ = writeln!(out, "weights");
        for (c, row) in self.weights.iter().enumerate() {
            let mut line = format!("{}", self.bias[c]);
            for w in row {
                let _ = write!(line, " {w}");
            }
            let _ = writeln!(out, "{line}");
        }
        out
    }

    pub fn from_text(text: &str) -> Result<LinearModel, ClassifyError> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end_matches('\r')));
        let mut next = |what: &str| {
            lines.next().ok_or_else(|| ClassifyError::ModelFormat {
                line: 0,
                message: format!("unexpected end of file, expected {what}"),
            })
        };
        let bad = |line: usize, message: &str| ClassifyError::ModelFormat { line, message: message.to_string() };
        let (n, header) = next("header")?;
        if header != HEADER {
            return Err(bad(n, "missing `linmodel v1` header"));
        }
        let count = |line: (usize, &str), key: &str| -> Result<usize, ClassifyError> {
            line.1
                .strip_prefix(key)
                .and_then(|r| r.strip_prefix('\t'))
                .and_then(|r| r.parse().ok())
                .ok_or_else(|| bad(line.0, &format!("expected `{key}<TAB>count`")))
        };
        let n_classes = count(next("class count")?, "classes")?;
        let mut classes = Vec::with_capacity(n_classes);
        for _ in 0..n_classes {
            classes.push(next("class label")?.1.to_string());
        }
        let n_vocab = count(next("vocabulary size")?, "vocabulary")?;
        let mut vocabulary = Vec::with_capacity(n_vocab);
        for _ in 0..n_vocab {
            vocabulary.push(next("feature")?.1.to_string());
        }
        let (n, w) = next("weights")?;
        if w != "weights" {
            return Err(bad(n, "expected `weights`"));
        }
        let mut model = LinearModel::zeros(classes, vocabulary);
        for c in 0..n_classes {
            let (n, row) = next("weight row")?;
            let nums: Result<Vec<f64>, _> = row.split(' ').map(str::parse::<f64>).collect();
            let nums = nums.map_err(|_| bad(n, "malformed number"))?;
            if nums.len() != n_vocab + 1 {
                return Err(bad(n, "weight row length does not match the vocabulary"));
            }
            model.bias[c] = nums[0];
            model.weights[c] = nums[1..].to_vec();
        }
        Ok(model)
    }

    pub fn save(&self, path: &Path) -> Result<(), ClassifyError> {
        fs::write(path, self.to_text()).map_err(|e| ClassifyError::Io(format!("{}: {e}", path.display())))
    }

    pub fn load(path: &Path) -> Result<LinearModel, ClassifyError> {
        let text = fs::read_to_string(path).map_err(|e| ClassifyError::Io(format!("{}: {e}", path.display())))?;
        LinearModel::from_text(&text)
    }
}

/// Multiclass perceptron: exactly `epochs` passes in the given order,
/// learning rate 1, no shuffling, no averaging. Classes and vocabulary are
/// ordered by first appearance. The bias acts as an always-on feature.
pub fn fit(examples: &[TrainingExample], epochs: usize) -> Result<LinearModel, ClassifyError> {
    FIT_CALLS.with(|c| c.set(c.get() + 1));
    if examples.is_empty() {
        return Err(ClassifyError::EmptyTrainingSet);
    }
    let mut classes: Vec<String> = Vec::new();
    let mut vocabulary: Vec<String> = Vec::new();
    let mut seen: HashMap<String, ()> = HashMap::new();
    for ex in examples {
        if !classes.contains(&ex.label) {
            classes.push(ex.label.clone());
        }
        for (f, _) in featurize(&ex.text) {
            if seen.insert(f.clone(), ()).is_none() {
                vocabulary.push(f);
            }
        }
    }
    let mut model = LinearModel::zeros(classes, vocabulary);
    let data: Vec<(usize, Vec<(usize, f64)>)> = examples
        .iter()
        .map(|ex| {
            let y = model.classes.iter().position(|c| *c == ex.label).unwrap_or(0);
            (y, model.vectorize(&ex.text))
        })
        .collect();
    for _ in 0..epochs {
        for (y, x) in &data {
            let scores: Vec<f64> = (0..model.classes.len()).map(|c| model.score_vec(c, x)).collect();
            let guess = LinearModel::argmax(&scores);
            if guess != *y {
                for &(i, n) in x {
                    model.weights[*y][i] += n;
                    model.weights[guess][i] -= n;
                }
                model.bias[*y] += 1.0;
                model.bias[guess] -= 1.0;
            }
        }
    }
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn feats(text: &str) -> Vec<(String, u32)> {
        featurize(text)
    }

    #[test]
    fn featurize_definition() {
        assert_eq!(
            feats("delete room"),
            vec![("delete".into(), 1), ("room".into(), 1), ("delete_room".into(), 1)]
        );
        assert!(feats("").is_empty());
        assert_eq!(feats("a a"), vec![("a".into(), 2), ("a_a".into(), 1)]);
        assert_eq!(feats("Rooms?"), vec![("rooms".into(), 1)]);
    }

    #[test]
    fn empty_training_set() {
        assert_eq!(fit(&[], 10), Err(ClassifyError::EmptyTrainingSet));
    }

    #[test]
    fn single_class_predicts_itself() {
        let m = fit(&[TrainingExample::new("SELECT", "show rooms"), TrainingExample::new("SELECT", "list guests")], 10).unwrap();
        assert_eq!(m.predict("completely unseen words").0, "SELECT");
        assert_eq!(m.predict("").0, "SELECT");
    }

    #[test]
    fn zero_weights_tie_to_first_class() {
        let m = LinearModel::zeros(vec!["SELECT".into(), "DELETE".into()], vec!["x".into()]);
        assert_eq!(m.predict("x"), ("SELECT".into(), 0.0));
    }

    /// Hand simulation of the update rule on three examples.
    ///
    /// Vocabulary (first appearance, unigrams before bigrams per example):
    /// how, many, rooms, how_many, many_rooms, delete, booking, delete_booking,
    /// show, show_rooms. Classes: SELECT_AGG, DELETE, SELECT.
    ///
    /// Epoch 1
    /// - ex1 (SELECT_AGG): all scores 0, guess SELECT_AGG (earliest). Correct.
    /// - ex2 (DELETE): all scores 0, guess SELECT_AGG. DELETE += {delete, booking,
    ///   delete_booking}, bias +1; SELECT_AGG -= same, bias -1.
    /// - ex3 (SELECT): x = {show, rooms, show_rooms}. Scores -1, 1, 0: guess DELETE.
    ///   SELECT += x, bias +1; DELETE -= x, bias -1 (back to 0).
    ///
    /// Epoch 2
    /// - ex1: SELECT_AGG -1, DELETE rooms(-1) = -1, SELECT 1 + rooms(1) = 2. Guess SELECT.
    ///   SELECT_AGG += x (bias 0); SELECT -= x (bias 0).
    /// - ex2: scores -3, 3, 0. Correct.
    /// - ex3: scores rooms(1) = 1, -3, 0 + 1 + 1 = 2. Correct.
    ///
    /// Epoch 3: ex1 scores 5, -1, -4. No errors remain, so the remaining epochs
    /// leave the weights unchanged.
    #[test]
    fn perceptron_matches_hand_simulation() {
        let data = [
            TrainingExample::new("SELECT_AGG", "how many rooms"),
            TrainingExample::new("DELETE", "delete booking"),
            TrainingExample::new("SELECT", "show rooms"),
        ];
        let m = fit(&data, 10).unwrap();
        assert_eq!(m.classes(), ["SELECT_AGG", "DELETE", "SELECT"]);
        assert_eq!(
            m.vocabulary(),
            ["how", "many", "rooms", "how_many", "many_rooms", "delete", "booking", "delete_booking", "show", "show_rooms"]
        );
        let agg = vec![1.0, 1.0, 1.0, 1.0, 1.0, -1.0, -1.0, -1.0, 0.0, 0.0];
        let del = vec![0.0, 0.0, -1.0, 0.0, 0.0, 1.0, 1.0, 1.0, -1.0, -1.0];
        let sel = vec![-1.0, -1.0, 0.0, -1.0, -1.0, 0.0, 0.0, 0.0, 1.0, 1.0];
        assert_eq!(m.weights(), [agg, del, sel]);
        assert_eq!(m.bias(), [0.0, 0.0, 0.0]);
        // how + many + how_many; `bookings` and `many_bookings` are out of vocabulary.
        assert_eq!(m.predict("how many bookings"), ("SELECT_AGG".into(), 3.0));
    }

    #[test]
    fn persistence_round_trips() {
        let data = [
            TrainingExample::new("A", "how many rooms"),
            TrainingExample::new("B", "delete booking"),
        ];
        let m = fit(&data, 10).unwrap().scaled(0.1);
        let text = m.to_text();
        assert!(text.starts_with("linmodel v1\n"));
        assert_eq!(LinearModel::from_text(&text).unwrap(), m);
    }

    #[test]
    fn rejects_malformed_model() {
        assert!(LinearModel::from_text("nope").is_err());
        assert!(LinearModel::from_text("linmodel v1\nclasses\t1\nA\nvocabulary\t1\nx\nweights\n0\n").is_err());
    }

    #[test]
    fn corpus_format() {
        let c = parse_corpus("# x\nSELECT\tshow rooms\n\nDELETE\tdelete booking\n").unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(parse_corpus("no tab here"), Err(ClassifyError::CorpusParse { line: 1 }));
    }

    #[test]
    fn fit_is_counted() {
        let before = fit_invocations();
        let _ = fit(&[TrainingExample::new("A", "x")], 1);
        assert_eq!(fit_invocations(), before + 1);
    }
}
