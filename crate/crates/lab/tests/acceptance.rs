//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Tolerances live in `qmf_lab::checks`.

use qmf_lab::checks::{run, Context, CRITERIA};

fn main() {
    let ctx = Context::default();
    let mut failed = Vec::new();
    for (id, _, _) in CRITERIA {
        let o = run(id, &ctx);
        println!("{}", o.line());
        if !o.passed {
            failed.push(id);
        }
    }
    println!("acceptance: {} passed, {} failed {:?}", CRITERIA.len() - failed.len(), failed.len(), failed);
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
