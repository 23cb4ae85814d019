use bagsel::potentials::RelationScorer;
use bagsel::synth::OneShotTask;
use bagsel::{Error, Result};

use crate::stats::confidence_interval;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OneShotResult {
    pub accuracy: f64,
    pub ci_half_width: f64,
    pub tasks: usize,
}

/// Index of the support item with the highest relation to the query; the
/// first one wins ties.
pub fn predict<S: RelationScorer + ?Sized>(scorer: &S, task: &OneShotTask) -> usize {
    let mut best = 0;
    let mut best_score = f64::NEG_INFINITY;
    for (k, s) in task.support.iter().enumerate() {
        let score = scorer.score(&task.query, s);
        if score > best_score {
            best = k;
            best_score = score;
        }
    }
    best
}

fn check(task: &OneShotTask, index: usize) -> Result<()> {
    let bad = |m: String| Err(Error::InvalidEpisode(format!("one-shot task {index}: {m}")));
    if task.support.is_empty() || task.support.len() != task.support_classes.len() {
        return bad("support items and classes must be non-empty and aligned".into());
    }
    let dim = task.query.dim();
    if let Some(s) = task.support.iter().find(|s| s.dim() != dim) {
        return bad(format!("support dim {} differs from query dim {dim}", s.dim()));
    }
    for (k, c) in task.support_classes.iter().enumerate() {
        if task.support_classes[..k].contains(c) {
            return bad(format!("class {c} has more than one support item"));
        }
    }
    if !task.support_classes.contains(&task.query_class) {
        return bad(format!("query class {} is not in the support set", task.query_class));
    }
    Ok(())
}

/// Accuracy of argmax-relation classification with a 95% interval over tasks.
pub fn one_shot_eval<S: RelationScorer + ?Sized>(scorer: &S, tasks: &[OneShotTask]) -> Result<OneShotResult> {
    let mut hits = Vec::with_capacity(tasks.len());
    for (i, task) in tasks.iter().enumerate() {
        check(task, i)?;
        let k = predict(scorer, task);
        hits.push(f64::from(u8::from(task.support_classes[k] == task.query_class)));
    }
    let (accuracy, ci_half_width) = confidence_interval(&hits)?;
    Ok(OneShotResult {
        accuracy,
        ci_half_width,
        tasks: tasks.len(),
    })
}
