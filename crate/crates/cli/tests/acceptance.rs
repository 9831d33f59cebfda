use std::process::Command;
use std::time::{Duration, Instant};

use ccalc_core::checks::{run_criterion, CRITERIA};

fn main() {
    let mut failed = Vec::new();
    for (n, _) in CRITERIA {
        let report = run_criterion(n);
        println!("{}", report.summary());
        for o in report.outcomes.iter().filter(|o| !o.passed()) {
            println!(
                "    {}: expected `{}`, computed `{}` ({:.1} ms, limit {} ms)",
                o.row.check, o.row.expected, o.computed, o.elapsed_ms, o.row.limit_ms
            );
        }
        if !report.passed() {
            failed.push(n);
        }
    }

    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_ccalc"))
        .arg("check-all")
        .output()
        .expect("run ccalc check-all");
    let elapsed = start.elapsed();
    let ok = out.status.success() && elapsed < Duration::from_secs(60);
    println!(
        "criterion 10 (check-all exits 0 within 60 s): {} [exit {:?}, {:.1} ms]",
        if ok { "PASS" } else { "FAIL" },
        out.status.code(),
        elapsed.as_secs_f64() * 1e3
    );
    if !ok {
        println!("{}", String::from_utf8_lossy(&out.stdout));
        failed.push(10);
    }

    if !failed.is_empty() {
        eprintln!("failing criteria: {failed:?}");
        std::process::exit(1);
    }
}
