use irp_core::planner::SearchMode;
use irp_session::bench::run_task_session;
use irp_session::{Session, SessionError, SCHEMA_VERSION};

#[test]
fn benchmark_session_survives_save_and_load() {
    for task in [4, 6] {
        let (_, s) = run_task_session(task, SearchMode::Ff).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("session.json");
        s.save(&path).unwrap();
        let back = Session::load(&path).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.to_json(), s.to_json());
        assert!(!back.plans.is_empty());
        assert!(back.model.is_some());
    }
}

#[test]
fn loaded_session_keeps_working() {
    let (_, s) = run_task_session(1, SearchMode::Ff).unwrap();
    let mut back = Session::from_json(&s.to_json()).unwrap();
    let next = back.next_plan_id;
    let id = back.replan("task1", SearchMode::Optimal).unwrap();
    assert_eq!(id, next);
    assert!(back.plan(id).unwrap().plan.is_empty());
}

#[test]
fn future_versions_are_refused() {
    let text = Session::default().to_json();
    let version = format!("\"schema_version\": {SCHEMA_VERSION}");
    let future = text.replacen(&version, "\"schema_version\": 7", 1);
    match Session::from_json(&future) {
        Err(SessionError::SchemaVersionMismatch { found: 7, expected }) => assert_eq!(expected, SCHEMA_VERSION),
        other => panic!("{other:?}"),
    }
}

#[test]
fn truncation_reports_the_end_offset() {
    let (_, s) = run_task_session(2, SearchMode::Ff).unwrap();
    let text = s.to_json();
    for cut in [text.len() / 3, text.len() - 2] {
        match Session::from_json(&text[..cut]) {
            Err(SessionError::CorruptFile { offset, .. }) => assert_eq!(offset, cut),
            other => panic!("{other:?}"),
        }
    }
}

#[test]
fn garbage_reports_where_it_starts() {
    let text = Session::default().to_json();
    let at = text.find("\"domain\"").unwrap();
    let broken = format!("{}@{}", &text[..at], &text[at..]);
    match Session::from_json(&broken) {
        Err(SessionError::CorruptFile { offset, .. }) => assert!((at..=at + 1).contains(&offset), "{offset} vs {at}"),
        other => panic!("{other:?}"),
    }
    assert!(matches!(Session::from_json("{}"), Err(SessionError::CorruptFile { offset: 0, .. })));
    assert!(matches!(Session::load(std::path::Path::new("/nonexistent/s.json")), Err(SessionError::Io { .. })));
}
