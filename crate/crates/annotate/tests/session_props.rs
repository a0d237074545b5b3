use discourse_annotate::{Session, SessionError, SessionPhase};
use discourse_core::lacan::{build_partition, detect_ambiguities, Annotation};
use discourse_core::{Dataset, Headline, HeadlineId, Label, LacanCode, Record};
use proptest::prelude::*;

#[derive(Clone, Debug)]
enum Op {
    Submit(u64, u8),
    Reveal,
    Reassign(u64, u8, bool),
    Extend(u64),
    Close,
}

fn op() -> impl Strategy<Value = Op> {
    prop_oneof![
        6 => (0u64..9, 0u8..16).prop_map(|(i, c)| Op::Submit(i, c)),
        1 => Just(Op::Reveal),
        2 => (0u64..12, 0u8..16, any::<bool>()).prop_map(|(i, c, j)| Op::Reassign(i, c, j)),
        1 => (0u64..12).prop_map(Op::Extend),
        1 => Just(Op::Close),
    ]
}

fn dataset(labels: &[bool]) -> Dataset {
    Dataset::new(
        labels
            .iter()
            .enumerate()
            .map(|(i, &fake)| {
                let label = if fake { Label::Fake } else { Label::Real };
                Record::new(Headline::new(HeadlineId(i as u64), "some headline text", label).unwrap())
            })
            .collect(),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn any_operation_sequence_replays_and_stays_consistent(
        labels in prop::collection::vec(any::<bool>(), 12),
        batch in 1usize..6,
        ops in prop::collection::vec(op(), 0..60),
    ) {
        let d = dataset(&labels);
        let ids: Vec<HeadlineId> = (0..8).map(HeadlineId).collect();
        let mut s = Session::create("p", &ids, batch, &d, None).unwrap();
        for op in ops {
            let before = serde_json::to_string(&s.state(&d)).unwrap();
            let result = match op {
                Op::Submit(i, c) => s.submit_code(HeadlineId(i), LacanCode::from_index(c).unwrap(), &d),
                Op::Reveal => s.reveal(&d).map(|_| ()),
                Op::Reassign(i, c, j) => s
                    .reassign(HeadlineId(i), LacanCode::from_index(c).unwrap(), if j { "why" } else { "" }, &d)
                    .map(|_| ()),
                Op::Extend(i) => s.extend(&[HeadlineId(i)], &d),
                Op::Close => s.close(&d),
            };
            if result.is_err() {
                // Rejected operations leave no trace.
                prop_assert_eq!(serde_json::to_string(&s.state(&d)).unwrap(), before);
            }
            let state = s.state(&d);
            prop_assert_eq!(state.label_visibility, s.phase() != SessionPhase::BlindAssign);
            prop_assert_eq!(state.labels.is_some(), state.label_visibility);
            if state.label_visibility {
                let annotations: Vec<Annotation> = s
                    .assignments()
                    .iter()
                    .map(|(&id, &c)| Annotation::new(id, c, d.get(id).unwrap().label()))
                    .collect();
                prop_assert_eq!(&detect_ambiguities(&annotations).unwrap(), s.ambiguities());
                prop_assert_eq!(s.phase() == SessionPhase::Resolve, !s.ambiguities().is_empty());
                if s.ambiguities().is_empty() {
                    prop_assert!(build_partition(&annotations).is_ok());
                }
            } else {
                prop_assert!(s.ambiguities().is_empty());
            }
        }
        let replayed = Session::replay(s.events(), &d).unwrap();
        prop_assert_eq!(
            serde_json::to_string(&replayed.state(&d)).unwrap(),
            serde_json::to_string(&s.state(&d)).unwrap()
        );
        for (i, e) in s.events().iter().enumerate() {
            prop_assert_eq!(e.sequence_no, i as u64);
        }
        match s.export(&d) {
            Ok(export) => prop_assert_eq!(export.annotations.len(), s.assignments().len()),
            Err(SessionError::WrongPhase { .. }) => prop_assert!(!s.label_visibility()),
            Err(SessionError::Ambiguous(r)) => prop_assert_eq!(&r, s.ambiguities()),
            Err(SessionError::Lacan(_)) => {}
            Err(other) => prop_assert!(false, "{other}"),
        }
    }
}
