//! Cross-module integration: schema generation through training,
//! evaluation and persistence.

use retain::dataset::Cell;
use retain::model::{Algorithm, ModelFile, ModelKind};
use retain::schema::{self, AdmissionType, Category, GradStream, Location, Medium, Retention,
    Sex, StudentRecord};
use retain::tree::Node;
use retain::{adtree, arff, c45, eval, id3, AlgoSpec, Prediction};

/// Relabel a synthetic cohort so RET is a pure function of the graduation
/// stream, then check the paper's walk-through shape: the B.Sc.-with-Math
/// student reaches a leaf labeled 1 over a unique path of length one.
#[test]
fn bsc_with_math_reaches_a_depth_one_leaf() {
    let mut d = schema::generate_synthetic(240, 0.2, 31).unwrap();
    let gs_index = 4;
    let science_streams = [2usize, 7]; // B.Sc. with Math, B.Tech
    for inst in &mut d.instances {
        let gs = match inst.cells[gs_index] {
            Cell::Nominal(v) => v,
            _ => unreachable!(),
        };
        let ret = usize::from(science_streams.contains(&gs));
        inst.cells[schema::CLASS_INDEX] = Cell::Nominal(ret);
    }
    // every stream must be observed for the root split to be clean
    let mut seen = [false; 8];
    for inst in &d.instances {
        if let Cell::Nominal(v) = inst.cells[gs_index] {
            seen[v] = true;
        }
    }
    assert!(seen.iter().all(|&s| s), "240 draws cover all 8 streams");

    let t = id3::train(&d).unwrap();
    match &t.root {
        Node::NominalSplit {
            attribute,
            children,
            ..
        } => {
            assert_eq!(*attribute, gs_index, "root must split on GS");
            match &children[2] {
                Node::Leaf { label, counts } => {
                    assert_eq!(*label, 1);
                    assert!(counts.is_pure());
                }
                other => panic!("expected a leaf under B.Sc. with Math, got {other:?}"),
            }
        }
        other => panic!("expected a root split, got {other:?}"),
    }

    let probe = schema::encode_record(&StudentRecord {
        sex: Sex::Male,
        cat: Category::General,
        ss_percent: 75.0,
        ss_math_percent: Some(70.0),
        grad_stream: GradStream::BScWithMath,
        grad_percent: 65.0, // GOG = First
        med: Medium::English,
        cl: Location::Urban,
        atype: AdmissionType::Upsee,
        ret: Retention::Continue,
    })
    .unwrap();
    assert_eq!(id3::predict(&t, &probe).unwrap(), Prediction::Class(1));
}

#[test]
fn arff_round_trip_feeds_training_unchanged() {
    let d = schema::generate_synthetic(120, 0.25, 8).unwrap();
    let reparsed = arff::parse(&arff::write(&d)).unwrap();
    assert_eq!(reparsed, d);

    let t1 = c45::train(&d, &c45::C45Params::default()).unwrap();
    let t2 = c45::train(&reparsed, &c45::C45Params::default()).unwrap();
    assert_eq!(t1, t2);
}

#[test]
fn saved_models_predict_identically_for_all_three_algorithms() {
    let train_data = schema::generate_synthetic(150, 0.2, 19).unwrap();
    let probes = schema::generate_synthetic(60, 0.2, 77).unwrap();

    let id3_tree = id3::train(&train_data).unwrap();
    let c45_tree = c45::train(&train_data, &c45::C45Params::default()).unwrap();
    let adt = adtree::train(&train_data, 10).unwrap();

    let files = [
        ModelFile::new(Algorithm::Id3, &train_data, ModelKind::Tree(id3_tree.clone())),
        ModelFile::new(Algorithm::C45, &train_data, ModelKind::Tree(c45_tree.clone())),
        ModelFile::new(Algorithm::Adt, &train_data, ModelKind::Adt(adt.clone())),
    ];
    for file in files {
        let loaded = ModelFile::from_json(&file.to_json().unwrap()).unwrap();
        loaded.check_compatible(&probes).unwrap();
        for x in &probes.instances {
            match (&loaded.model, &loaded.algorithm) {
                (ModelKind::Tree(t), Algorithm::Id3) => {
                    assert_eq!(id3::predict(t, x).unwrap(), id3::predict(&id3_tree, x).unwrap());
                }
                (ModelKind::Tree(t), _) => {
                    assert_eq!(c45::predict(t, x).unwrap(), c45::predict(&c45_tree, x).unwrap());
                }
                (ModelKind::Adt(m), _) => {
                    assert_eq!(adtree::score(m, x).unwrap(), adtree::score(&adt, x).unwrap());
                }
            }
        }
    }
}

#[test]
fn report_json_uses_the_documented_key_names() {
    let d = schema::generate_synthetic(60, 0.3, 4).unwrap();
    let report = eval::cross_validate(&d, &AlgoSpec::Id3, 5, 7, 0).unwrap();
    let value = serde_json::to_value(&report).unwrap();
    let object = value.as_object().unwrap();
    for key in [
        "algorithm",
        "accuracy_pct",
        "incorrect_pct",
        "unclassified_pct",
        "precision",
        "recall",
        "build_time_s",
        "k",
        "seed",
    ] {
        assert!(object.contains_key(key), "missing key {key}");
    }
    assert_eq!(object.len(), 9);
    assert_eq!(object["k"], 5);
    assert_eq!(object["seed"], 7);
}

#[test]
fn all_three_algorithms_beat_guessing_on_skewed_synthetic_data() {
    // the generator's class-conditional skew must make trees learnable
    let d = schema::generate_synthetic(400, 0.5, 99).unwrap();
    let majority = {
        let dist = d.class_distribution();
        *dist.iter().max().unwrap() as f64 * 100.0 / d.num_instances() as f64
    };
    for algo in [
        AlgoSpec::C45(c45::C45Params::default()),
        AlgoSpec::Adt { iterations: 10 },
    ] {
        let report = eval::cross_validate(&d, &algo, 10, 7, 0).unwrap();
        assert!(
            report.accuracy_pct > majority,
            "{} accuracy {:.1} should beat the {majority:.1} majority rate",
            report.algorithm,
            report.accuracy_pct
        );
    }
}
