use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use trajgroup::fixtures::{figure2, FIGURE2_EPS};
use trajgroup::io::{self, IoError, ResampleOptions};
use trajgroup::reeb::build_reeb;
use trajgroup::{run_pipeline, Params};

const TWO_BY_THREE: &str = "entity_id,t,x,y\na,0,0,0\na,1,1,0\na,2,2,0\nb,0,0,1\nb,1,1,1\nb,2,2,2\n";

#[test]
fn reads_a_small_table() {
    let raw = io::read_csv::<f64, _>(TWO_BY_THREE.as_bytes()).unwrap();
    let ds = raw.to_dataset().unwrap();
    assert_eq!(ds.ids(), ["a", "b"]);
    assert_eq!(ds.times(), [0.0, 1.0, 2.0]);
    assert_eq!(ds.sample(1, 2).y, 2.0);
}

#[test]
fn header_is_optional_and_rows_may_be_shuffled() {
    let rows = "b,1,1,1\na,2,2,0\na,0,0,0\nb,0,0,1\na,1,1,0\nb,2,2,2\n";
    let a = io::read_csv::<f64, _>(rows.as_bytes()).unwrap().to_dataset().unwrap();
    let b = io::read_csv::<f64, _>(TWO_BY_THREE.as_bytes()).unwrap().to_dataset().unwrap();
    assert_eq!(a, b);
}

#[test]
fn numeric_ids_sort_numerically() {
    let rows = "10,0,0,0\n10,1,0,0\n9,0,1,1\n9,1,1,1\n";
    let ds = io::read_csv::<f64, _>(rows.as_bytes()).unwrap().to_dataset().unwrap();
    assert_eq!(ds.ids(), ["9", "10"]);
}

#[test]
fn malformed_rows_report_their_line() {
    let rows = "entity_id,t,x,y\na,0,0,0\na,1,oops,0\n";
    match io::read_csv::<f64, _>(rows.as_bytes()) {
        Err(IoError::ParseError { line, .. }) => assert_eq!(line, 3),
        other => panic!("unexpected {other:?}"),
    }
    match io::read_csv::<f64, _>("a,0,0\n".as_bytes()) {
        Err(IoError::ParseError { line, .. }) => assert_eq!(line, 1),
        other => panic!("unexpected {other:?}"),
    }
    assert!(matches!(io::read_csv::<f64, _>("a,0,inf,0\n".as_bytes()), Err(IoError::ParseError { .. })));
}

#[test]
fn duplicate_samples_are_rejected() {
    let rows = "a,0,0,0\na,1,1,0\na,1,2,0\n";
    match io::read_csv::<f64, _>(rows.as_bytes()) {
        Err(IoError::DuplicateSample { entity, time }) => assert_eq!((entity.as_str(), time), ("a", 1.0)),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn unsynchronized_input_needs_resampling() {
    let rows = "a,0,0,0\na,2,2,0\nb,0,0,5\nb,1,1,5\nb,2,2,5\n";
    let raw = io::read_csv::<f64, _>(rows.as_bytes()).unwrap();
    assert!(matches!(raw.to_dataset(), Err(IoError::Unsynchronized)));
    let ds = io::resample(&raw, &ResampleOptions { dt: 1.0, window: None, clip: false }).unwrap();
    assert_eq!(ds.times(), [0.0, 1.0, 2.0]);
    // the midpoint of a's samples is interpolated
    assert_eq!((ds.sample(0, 1).x, ds.sample(0, 1).y), (1.0, 0.0));
}

#[test]
fn resample_window_errors() {
    let rows = "a,0,0,0\na,1,1,0\nb,2,0,5\nb,3,1,5\n";
    let raw = io::read_csv::<f64, _>(rows.as_bytes()).unwrap();
    let opts = ResampleOptions { dt: 0.5, window: None, clip: false };
    assert!(matches!(io::resample(&raw, &opts), Err(IoError::EmptyCommonWindow)));
    assert!(matches!(io::resample(&raw, &ResampleOptions { dt: 0.0, ..opts }), Err(IoError::InvalidStep)));
    let window = Some((0.0, 1.0));
    assert!(matches!(
        io::resample(&raw, &ResampleOptions { window, ..opts }),
        Err(IoError::EntityOutsideWindow { .. })
    ));
    let clipped = io::resample(&raw, &ResampleOptions { window, clip: true, ..opts }).unwrap();
    assert_eq!(clipped.ids(), ["a"]);
    assert_eq!(clipped.num_edges(), 2);
}

#[test]
fn resamples_a_large_unsynchronized_herd() {
    // 126 entities with about 1264 samples each at jittered times
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut text = String::from("entity_id,t,x,y\n");
    for e in 0..126 {
        let mut t = -rng.gen_range(0.0..0.5);
        for _ in 0..1266 {
            text.push_str(&format!("{e},{t},{},{}\n", rng.gen_range(0.0..100.0), rng.gen_range(0.0..100.0)));
            t += rng.gen_range(0.5..1.5);
        }
    }
    let raw = io::read_csv::<f64, _>(text.as_bytes()).unwrap();
    let ds = io::resample(&raw, &ResampleOptions { dt: 1.0, window: Some((0.0, 500.0)), clip: false }).unwrap();
    ds.validate().unwrap();
    assert_eq!(ds.num_entities(), 126);
    assert_eq!(ds.num_edges(), 500);
}

#[test]
fn dataset_csv_round_trips() {
    let ds = figure2::<f64>();
    let text = io::write_dataset_csv(&ds);
    let back = io::read_csv::<f64, _>(text.as_bytes()).unwrap().to_dataset().unwrap();
    assert_eq!(back, ds);
}

#[test]
fn groups_json_round_trips() {
    let ds = figure2::<f64>();
    let out = run_pipeline(&ds, &Params::new(FIGURE2_EPS, 2, 0.0, 0.0).unwrap()).unwrap();
    let json = io::groups_to_json(ds.ids(), &out.groups);
    let back = io::groups_from_json::<f64>(ds.ids(), &json).unwrap();
    assert_eq!(back, out.groups);
    assert!(matches!(io::groups_from_json::<f64>(&ds.ids()[..2], &json), Err(IoError::UnknownEntity(_))));
    assert!(matches!(io::groups_from_json::<f64>(ds.ids(), "{"), Err(IoError::Json(_))));
}

#[test]
fn reeb_json_round_trips() {
    let ds = figure2::<f64>();
    let reeb = build_reeb(&ds, FIGURE2_EPS).unwrap();
    let (ids, back) = io::reeb_from_json::<f64>(&io::reeb_to_json(ds.ids(), &reeb)).unwrap();
    assert_eq!(ids, ds.ids());
    assert_eq!(back, reeb);
}

#[test]
fn dot_edges_point_forward_in_time() {
    let ds = figure2::<f64>();
    let reeb = build_reeb(&ds, FIGURE2_EPS).unwrap();
    let dot = io::reeb_to_dot(ds.ids(), &reeb, true);
    assert!(dot.starts_with("digraph"));
    let time_of = |v: &str| -> f64 {
        let line = dot.lines().find(|l| l.trim_start().starts_with(&format!("{v} [label="))).unwrap();
        line.split('@').nth(1).unwrap().split('"').next().unwrap().parse().unwrap()
    };
    let mut edges = 0;
    for line in dot.lines().filter(|l| l.contains("->")) {
        let mut parts = line.split_whitespace();
        let from = parts.next().unwrap();
        parts.next();
        let to = parts.next().unwrap();
        assert!(time_of(from) <= time_of(to));
        edges += 1;
    }
    assert_eq!(edges, reeb.edges().len());
    assert!(dot.contains("x1"));
}

#[test]
fn groups_csv_lists_ids() {
    let ds = figure2::<f64>();
    let out = run_pipeline(&ds, &Params::new(FIGURE2_EPS, 2, 1.5, 0.0).unwrap()).unwrap();
    let csv = io::groups_to_csv(ds.ids(), &out.groups);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("start,end,size,ids"));
    assert_eq!(lines.count(), out.groups.len());
}
