use std::io::Write;

use bifree::acceptance::run_all;

#[test]
fn acceptance() {
    let reports = run_all();
    let failed: Vec<u8> = reports.iter().filter(|r| !r.passed).map(|r| r.id).collect();
    let mut text: String = reports.iter().map(|r| format!("{r}\n")).collect();
    text.push_str(&format!("{} of {} criteria passed\n", reports.len() - failed.len(), reports.len()));
    // written to the raw handle so the report shows even when the harness captures output
    std::io::stderr().write_all(text.as_bytes()).unwrap();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
