//! End-to-end workflow: sample a model, rebuild it from its serialized
//! form, run the whole spectral pipeline on both, and compare every output
//! byte for byte.

use std::sync::Arc;

use theta_monad::chow::{existence_gate, twist, Verdict};
use theta_monad::complexes::{build_decomposable, chern_of_cohomology, Monad};
use theta_monad::hyperext::spectral_report;
use theta_monad::sections::{check_genericity, sample_model, GenericModel};
use theta_monad::serre::{correspondence_chern, stable, CurveSpec};

#[test]
fn serialized_model_reproduces_the_whole_run() {
    let model = sample_model(3, 21).unwrap();
    let rebuilt = GenericModel::from_json(&model.to_canonical_json()).unwrap();
    assert_eq!(model, rebuilt);
    assert!(check_genericity(&rebuilt).all_pass());

    let m1 = build_decomposable(&Arc::new(model), None).unwrap();
    let m2 = build_decomposable(&Arc::new(rebuilt), None).unwrap();
    let r1 = spectral_report(&m1).unwrap();
    let r2 = spectral_report(&m2).unwrap();
    assert_eq!(serde_json::to_string(&r1).unwrap(), serde_json::to_string(&r2).unwrap());

    let m3 = Monad::from_json(&m1.to_json()).unwrap();
    let r3 = spectral_report(&m3).unwrap();
    assert_eq!(serde_json::to_string(&r1).unwrap(), serde_json::to_string(&r3).unwrap());
}

#[test]
fn the_construction_story_holds_together() {
    // a two-component curve gives a stable bundle in the existence region
    let curve = CurveSpec::standard(2).unwrap();
    assert!(stable(&curve, 2).unwrap());
    let chern = correspondence_chern(&curve).unwrap();
    assert_eq!(existence_gate(chern), Verdict::Exists);

    // the untwisted bundle is the cohomology of the matching monad
    let model = Arc::new(sample_model(2, 3).unwrap());
    let monad = build_decomposable(&model, None).unwrap();
    let from_monad = chern_of_cohomology(&monad).unwrap();
    assert_eq!(twist(from_monad, 1), chern);

    // and its deformation space has the dimension the grid formula predicts
    let report = spectral_report(&monad).unwrap();
    assert!(report.formula_match);
    assert_eq!(report.ext_dims, [1, 13, 13, 1]);
}
