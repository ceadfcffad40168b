mod common;

use tdlens::corpus::split_sentences;
use tdlens::eval::{evaluate_pipeline, split_dataset};
use tdlens::hierarchy::TypeHierarchy;
use tdlens::pipeline::{
    classify_comment, classify_comments, train_pipeline, train_pipeline_with_report, HierarchySource,
    PipelineConfig, PipelineError,
};
use tdlens::synth::synthetic_comments;
use tdlens::{ClassifierSpec, SentenceLabel, TdType};

#[test]
fn preset_hierarchy_pipeline_is_accurate() {
    let data = common::small_dataset(30, 11);
    let (train, test) = split_dataset(&data, 11).unwrap();
    let cfg = PipelineConfig::new(
        ClassifierSpec::linear(0),
        HierarchySource::Preset(TypeHierarchy::paper_preset()),
        11,
    );
    let (model, report) = train_pipeline_with_report(&train, &cfg).unwrap();
    assert_eq!(report.k, 3);
    assert!(report.induction.is_none());
    assert_eq!(model.leaf_models.len(), 3);
    let ev = evaluate_pipeline(&model, &test).unwrap();
    assert!(ev.stage1.macro_f1 >= 0.95, "{}", ev.stage1.macro_f1);
    assert!(ev.end_to_end_11class.macro_f1 >= 0.9, "{}", ev.end_to_end_11class.macro_f1);
}

#[test]
fn instances_carry_provenance_in_order() {
    let model = common::small_model(20, 3);
    let comments = synthetic_comments(60, 5, 21);
    let serial = classify_comments(&model, &comments, 1);
    assert_eq!(serial, classify_comments(&model, &comments, 7));
    let expected: Vec<_> = comments.iter().flat_map(|c| classify_comment(&model, c)).collect();
    assert_eq!(serial, expected);
    for inst in &serial {
        let c = comments.iter().find(|c| c.comment_id == inst.comment_id).unwrap();
        assert_eq!(split_sentences(&c.body)[inst.position], inst.sentence);
        assert_eq!(inst.url, c.url);
        assert_eq!(inst.created_at, Some(c.created_at));
        assert_eq!(model.hierarchy.cluster_of(inst.td_type).name, inst.cluster);
    }
}

#[test]
fn non_td_sentences_never_become_instances() {
    let model = common::small_model(20, 3);
    let mut comment = synthetic_comments(1, 1, 1).remove(0);
    comment.body = "Thanks, approved and welcome. Congratulations!".into();
    assert!(classify_comment(&model, &comment).is_empty());
    assert_eq!(model.predict_label("We appreciate the work, thanks."), SentenceLabel::NonTd);
    assert_eq!(
        model.predict_label("The vignette and readme need a roxygen pass."),
        SentenceLabel::Td(TdType::Documentation)
    );
}

#[test]
fn gate_threshold_one_rejects_everything() {
    let data = common::small_dataset(12, 1);
    let mut cfg = PipelineConfig::new(ClassifierSpec::linear(0), HierarchySource::Induce { k_max: 9, folds: 3 }, 1);
    cfg.gate_threshold = Some(1.0);
    let model = train_pipeline(&data, &cfg).unwrap();
    assert!(data.iter().all(|s| !model.trace_sentence(&s.text).is_td));
}

#[test]
fn dataset_without_non_td_is_rejected() {
    let data: Vec<_> = common::small_dataset(6, 1).into_iter().filter(|s| s.label.is_td()).collect();
    let cfg = PipelineConfig::new(
        ClassifierSpec::linear(0),
        HierarchySource::Preset(TypeHierarchy::paper_preset()),
        1,
    );
    assert!(matches!(train_pipeline(&data, &cfg), Err(PipelineError::NoNonTd)));
}
