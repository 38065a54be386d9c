//! Prints `G_D(n, d)` next to the conjectured and naive estimates.
//!
//! `cargo run --release --example regular_count -- 22 10`

use loopcount::asymptotics::{conjecture_g2, naive_g2};
use loopcount::{log_big, DegreeSequence, ExactCounter, LoopModel};

fn main() {
    let args: Vec<u64> = std::env::args()
        .skip(1)
        .map(|a| a.parse().expect("integer argument"))
        .collect();
    let (n, d) = match args[..] {
        [n, d] => (n, d),
        _ => {
            eprintln!("usage: regular_count N D");
            std::process::exit(2);
        }
    };
    let counter = ExactCounter::new();
    let seq = DegreeSequence::regular(n as usize, d as u32);
    let count = counter.count_loopy(&seq, LoopModel::Twice).expect("count");
    println!("G_2({n},{d}) = {count}");
    if let (Ok(c), Ok(v)) = (conjecture_g2(n, d), naive_g2(n, d)) {
        let exact = log_big(&count).expect("positive count");
        println!(
            "log(exact/conjecture) = {:.6e}",
            (exact - c.log_value).to_f64()
        );
        println!(
            "log(exact/naive)      = {:.6}",
            (exact - v.log_value).to_f64()
        );
    }
    println!("memo entries: {}", counter.cache().len());
}
