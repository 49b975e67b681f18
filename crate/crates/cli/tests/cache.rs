use std::fs;
use std::sync::Arc;

use hilbertforge_cli::builtin::stable_pair;
use hilbertforge_cli::cache::{Cache, Lookup};
use hilbertforge_cli::report::{case_id, run_case, RecordStatus, TOOL_VERSION};

#[test]
fn second_run_is_served_from_cache_and_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cache = Cache::new(dir.path());
    let case = stable_pair(3);
    let fresh = run_case(&case, Some(&cache), true);
    let again = run_case(&case, Some(&cache), true);
    assert!(!fresh.run.cached);
    assert!(again.run.cached);
    assert_eq!(fresh.without_run_info().to_json_line(), again.without_run_info().to_json_line());
    let uncached = run_case(&case, None, false);
    assert_eq!(uncached.to_json_line(), fresh.without_run_info().to_json_line());
}

#[test]
fn version_or_configuration_mismatch_misses() {
    let dir = tempfile::tempdir().unwrap();
    let cache = Cache::new(dir.path());
    let case = stable_pair(2);
    let id = case_id(&case.spec, &case.config);
    run_case(&case, Some(&cache), false);
    let primes = case.config.primes();
    assert!(matches!(cache.lookup(&id, TOOL_VERSION, &primes, 0), Lookup::Hit(_)));
    assert!(matches!(cache.lookup(&id, "999.0.0", &primes, 0), Lookup::Miss));
    assert!(matches!(cache.lookup(&id, TOOL_VERSION, &[32003], 0), Lookup::Miss));
    assert!(matches!(cache.lookup(&id, TOOL_VERSION, &primes, 5), Lookup::Miss));
    let mut reseeded = case.clone();
    reseeded.config.seed = 5;
    assert_ne!(case_id(&reseeded.spec, &reseeded.config), id);
    let mut relabeled = case.clone();
    relabeled.label = "renamed".into();
    assert_eq!(case_id(&relabeled.spec, &relabeled.config), id);
}

#[test]
fn corrupt_entries_are_evicted_and_recomputed() {
    let dir = tempfile::tempdir().unwrap();
    let cache = Cache::new(dir.path());
    let case = stable_pair(4);
    let id = case_id(&case.spec, &case.config);
    let reference = run_case(&case, None, false);
    for garbage in [&b"{ not json"[..], br#"{"id":"other","tool_version":"0","primes":[],"seed":0,"report":0,"ledger":0,"verdict":0}"#] {
        fs::write(cache.entry_path(&id), garbage).unwrap();
        assert!(matches!(cache.lookup(&id, TOOL_VERSION, &case.config.primes(), 0), Lookup::Evicted(_)));
        assert!(!cache.entry_path(&id).exists());
        fs::write(cache.entry_path(&id), garbage).unwrap();
        let rec = run_case(&case, Some(&cache), false);
        assert!(!rec.run.cached);
        assert_eq!(rec.to_json_line(), reference.to_json_line());
        assert!(matches!(cache.lookup(&id, TOOL_VERSION, &case.config.primes(), 0), Lookup::Hit(_)));
    }
}

#[test]
fn concurrent_writers_leave_one_entry() {
    let dir = tempfile::tempdir().unwrap();
    let cache = Arc::new(Cache::new(dir.path()));
    let case = Arc::new(stable_pair(5));
    let handles: Vec<_> = (0..8)
        .map(|_| {
            let (cache, case) = (cache.clone(), case.clone());
            std::thread::spawn(move || run_case(&case, Some(&cache), false))
        })
        .collect();
    let records: Vec<_> = handles.into_iter().map(|h| h.join().unwrap()).collect();
    for r in &records {
        assert_eq!(r.status, RecordStatus::Pass);
        assert_eq!(r.without_run_info(), records[0].without_run_info());
    }
    let names: Vec<_> = fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    assert_eq!(names, vec![format!("{}.json", records[0].id)]);
}
