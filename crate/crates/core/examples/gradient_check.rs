//! Compare backprop against central differences for every training objective.

fn main() {
    let batches: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(5);
    for line in hanabi::cli::grad_check(0, batches) {
        println!("{:<10} batches={} max_rel_err={:.3e}", line.objective, line.batches, line.max_relative_error);
    }
}
