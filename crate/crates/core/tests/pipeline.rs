use trajgroup::fixtures::{self, DETOUR_EPS, FIGURE2_EPS};
use trajgroup::{run_pipeline, Dataset, Params, PipelineError};

#[test]
fn figure2_end_to_end() {
    let out = run_pipeline(&fixtures::figure2::<f64>(), &Params::new(FIGURE2_EPS, 2, 1.5, 0.0).unwrap()).unwrap();
    assert_eq!(out.groups.len(), 4);
    assert_eq!(out.robust_reeb, out.reeb);
    assert_eq!(out.stats.encounters(), 0);
    out.reduced.check_subgraph_invariants().unwrap();
}

#[test]
fn group_size_above_n_gives_nothing() {
    let ds = fixtures::figure2::<f64>();
    let out = run_pipeline(&ds, &Params::new(FIGURE2_EPS, ds.num_entities() + 1, 0.0, 0.0).unwrap()).unwrap();
    assert!(out.groups.is_empty());
    assert!(out.reduced.vertices().is_empty());
}

#[test]
fn large_alpha_merges_the_detour() {
    let ds = fixtures::single_detour::<f64>();
    let out = run_pipeline(&ds, &Params::new(DETOUR_EPS, 1, 0.0, 10.0).unwrap()).unwrap();
    assert_eq!(out.groups.len(), 1);
    assert_eq!(out.groups[0].size(), ds.num_entities());
    assert_eq!(out.stats.collapses, 1);
}

#[test]
fn static_herd_is_one_group() {
    let p = trajgroup::Point::new(1.0, 1.0);
    let ds = Dataset::with_index_ids(vec![0.0, 1.0, 2.0], vec![vec![p; 3]; 4]).unwrap();
    let out = run_pipeline(&ds, &Params::new(0.1, 1, 0.0, 0.0).unwrap()).unwrap();
    assert_eq!(out.groups.len(), 1);
    assert_eq!((out.groups[0].interval.start, out.groups[0].interval.end), (0.0, 2.0));
}

#[test]
fn single_precision_agrees() {
    let out = run_pipeline(&fixtures::figure2::<f32>(), &trajgroup::Params32::new(0.5, 2, 1.5, 0.0).unwrap()).unwrap();
    assert_eq!(out.groups.len(), 4);
}

#[test]
fn bad_parameters_are_input_errors() {
    let ds = fixtures::figure2::<f64>();
    let mut params = Params::new(FIGURE2_EPS, 2, 0.0, 0.0).unwrap();
    params.alpha = -1.0;
    let err = run_pipeline(&ds, &params).unwrap_err();
    assert!(matches!(err, PipelineError::Model(_) | PipelineError::Robust(_)));
    assert!(!err.is_internal());
    assert!(Params::new(-1.0, 2, 0.0, 0.0).is_err());
    assert!(Params::new(1.0, 0, 0.0, 0.0).is_err());
}
