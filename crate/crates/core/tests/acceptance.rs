use sharpthresh::acceptance::{run_criterion, criterion_ids, AcceptanceOptions};

fn main() {
    // Ignore libtest flags such as `--nocapture` passed through by cargo.
    let filter: Vec<u8> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let options = AcceptanceOptions::default();
    let mut failed = 0;
    for id in criterion_ids().filter(|id| filter.is_empty() || filter.contains(id)) {
        let outcome = run_criterion(id, options).expect("known criterion");
        println!("{}", outcome.line());
        failed += usize::from(!outcome.passed);
    }
    if failed > 0 {
        println!("acceptance: {failed} criteria failed");
        std::process::exit(1);
    }
    println!("acceptance: all criteria passed");
}
