//! Verdicts and their serialized form, driven through the public API only.

use rhaly_core::classifier::{classify_bergman, classify_hardy, decreasing_rule, Conclusion, Theorem};
use rhaly_core::constructions::construct_upsilon;
use rhaly_core::lipschitz::Thresholds;
use rhaly_core::rhaly::SequenceSpec;

const DEEP: usize = (1 << 13) - 1;

#[test]
fn specs_parse_from_json() {
    let ces: SequenceSpec = serde_json::from_str(r#"{"kind":"cesaro","truncation":8191}"#).unwrap();
    assert_eq!(ces, SequenceSpec::Cesaro { truncation: DEEP });
    let lit: SequenceSpec = serde_json::from_str(r#"{"kind":"literal","values":[1,[0,1]]}"#).unwrap();
    assert_eq!(lit.truncation(), 1);
    assert!(
        serde_json::from_str::<SequenceSpec>(r#"{"kind":"power_law","c":1,"s":1,"truncation":0}"#).is_err()
    );
}

#[test]
fn verdict_json_carries_tags() {
    let v = classify_hardy(
        &SequenceSpec::Cesaro { truncation: DEEP },
        3.0,
        Thresholds::default(),
    )
    .unwrap();
    assert_eq!((v.conclusion, v.theorem), (Conclusion::Bounded, Theorem::Thm1c));
    let j = serde_json::to_value(&v).unwrap();
    assert_eq!(j["theorem"], "Thm1c");
    assert_eq!(j["space"]["kind"], "hardy");
    assert!(!j["evidence"].as_array().unwrap().is_empty());
}

#[test]
fn bounded_by_one_over_n_is_bounded_from_two_up() {
    let u = construct_upsilon(1.5, 10, 1024, 3).unwrap();
    let specs = [
        SequenceSpec::Cesaro { truncation: DEEP },
        SequenceSpec::PowerLaw {
            c: 3.0,
            s: 1.0,
            truncation: DEEP,
        },
        u.spec,
    ];
    for eta in &specs {
        for p in [2.0, 3.0, 4.0] {
            let v = classify_hardy(eta, p, Thresholds::default()).unwrap();
            assert!(v.conclusion.is_bounded(), "{eta:?} p={p}: {:?}", v.conclusion);
        }
    }
}

#[test]
fn signed_log_is_not_bounded_below_two() {
    let u = construct_upsilon(1.5, 10, 1024, 3).unwrap();
    let v = classify_hardy(&u.spec, 1.5, Thresholds::default()).unwrap();
    assert_eq!(v.conclusion, Conclusion::NotBounded);
    // |eta_n| = 1/n is still decreasing, but n |eta_n| is flat, so the
    // monotone rule has nothing to say below p = 2
    let d = decreasing_rule(&u.spec, 1.5).unwrap();
    assert_eq!(
        (d.conclusion, d.theorem),
        (Conclusion::Inconclusive, Theorem::Prop8)
    );
}

#[test]
fn bergman_verdicts_follow_hardy_at_two() {
    for (s, bounded) in [(0.8, false), (1.0, true), (1.2, true)] {
        let eta = SequenceSpec::PowerLaw {
            c: 1.0,
            s,
            truncation: DEEP,
        };
        let b = classify_bergman(&eta, 2.0, 0.0, Thresholds::default()).unwrap();
        let h = classify_hardy(&eta, 2.0, Thresholds::default()).unwrap();
        assert_eq!(b.conclusion.is_bounded(), bounded);
        assert_eq!(b.conclusion, h.conclusion);
        assert_eq!(b.theorem, Theorem::Thm3);
    }
    let eta = SequenceSpec::PowerLaw {
        c: 1.0,
        s: 0.8,
        truncation: DEEP,
    };
    assert_eq!(
        classify_bergman(&eta, 2.0, 1.0, Thresholds::default())
            .unwrap()
            .theorem,
        Theorem::Thm7
    );
}
