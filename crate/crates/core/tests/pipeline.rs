use symrec::arg::build_arg;
use symrec::classifier::{classify, evaluate, knn_classify, train, Baseline, Engine, TrainConfig};
use symrec::datagen::{generate_protocol, Condition, ProtocolConfig};
use symrec::geometry::VectorSymbol;
use symrec::model_io::{read_model, write_model};
use symrec::signature::{compute_signature, Signature};

fn labelled(symbols: &[VectorSymbol]) -> Vec<Signature> {
    let cfg = TrainConfig::default().arg;
    symbols
        .iter()
        .map(|s| {
            let mut sig = compute_signature(&build_arg(s, &cfg));
            sig.label = s.label.clone();
            sig
        })
        .collect()
}

#[test]
fn eight_class_protocol_end_to_end() {
    let mut cfg = ProtocolConfig::new(8, 21);
    cfg.conditions = vec![Condition::Clean, Condition::Deform(1)];
    let data = generate_protocol(&cfg).unwrap();
    let train_rows = labelled(&data.train);
    let tests: Vec<(String, Vec<Signature>)> =
        data.tests.iter().map(|(c, q)| (c.name(), labelled(q))).collect();

    for engine in [Engine::HillClimb, Engine::Ga] {
        let model = train(&train_rows, &TrainConfig { engine, seed: 3, ..TrainConfig::default() }).unwrap();
        assert!(model.meta.structure_score >= model.meta.empty_score);

        let report = evaluate(&model, &tests, Some(Baseline { train: &train_rows, k: 1 })).unwrap();
        let clean = &report.rows[0];
        assert_eq!(clean.rate, 1.0, "{engine:?}");
        assert_eq!(clean.baseline_rate(), Some(1.0));
        for row in &report.rows {
            for (i, r) in row.confusion.iter().enumerate() {
                assert_eq!(r.iter().sum::<usize>(), cfg.queries_per_class, "class {i}");
            }
        }

        // text form is lossless, and classification agrees with brute-force enumeration
        let text = write_model(&model);
        let back = read_model(&text).unwrap();
        assert_eq!(back, model);
        for q in &tests[1].1 {
            let c = classify(&back, q);
            assert_eq!(c, classify(&model, q));
            let mut evidence: Vec<Option<usize>> = model.map.apply(q).into_iter().map(Some).collect();
            evidence.push(None);
            let reference = model.net.joint_enumerate(&evidence).unwrap();
            for (a, b) in c.posterior.iter().zip(&reference) {
                assert!((a - b).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn training_is_deterministic() {
    let data = generate_protocol(&ProtocolConfig::new(4, 8)).unwrap();
    let rows = labelled(&data.train);
    for engine in [Engine::HillClimb, Engine::Ga] {
        let cfg = TrainConfig { engine, seed: 7, generations: 20, ..TrainConfig::default() };
        let a = write_model(&train(&rows, &cfg).unwrap());
        let b = write_model(&train(&rows, &cfg).unwrap());
        assert_eq!(a, b);
    }
}

#[test]
fn knn_on_training_rows_is_exact() {
    let data = generate_protocol(&ProtocolConfig::new(5, 1)).unwrap();
    let rows = labelled(&data.train);
    for r in rows.iter().step_by(7) {
        assert_eq!(knn_classify(&rows, r, 1).unwrap(), r.label.clone().unwrap());
    }
}
