//! Hand-derived verdict table checked against the engine.

use wiener_core::criteria::{evaluate, CriterionCase, CriterionId, Num};

#[test]
fn golden_table_matches() {
    let mut rdr = csv::Reader::from_path(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/thm_c_golden.csv")).unwrap();
    let mut rows = 0;
    for rec in rdr.records() {
        let rec = rec.unwrap();
        let id: CriterionId = rec[0].parse().unwrap();
        let mut case = CriterionCase::new(id, rec[1].parse().unwrap());
        let opt = |i: usize| (!rec[i].is_empty()).then(|| rec[i].parse::<Num>().unwrap());
        case.p = opt(2);
        case.q = opt(3);
        case.r = opt(4);
        case.s = opt(5);
        let v = evaluate(&case);
        assert_eq!(v.status.as_str(), &rec[6], "row {:?}", rec);
        if !rec[7].is_empty() {
            assert_eq!(v.derived.delta.as_ref().unwrap().to_string(), &rec[7], "row {:?}", rec);
        }
        rows += 1;
    }
    assert_eq!(rows, 24);
}
