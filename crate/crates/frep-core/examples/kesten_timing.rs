//! Timing scratch for the ball compression runs used by the acceptance
//! suite: prints per-run wall time and the resulting lower bounds.

use frep_core::lambda::{ball_lower, kesten_norm, symmetric_generator_element};
use std::time::Instant;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let k: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(2);
    let radius: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(14);
    let iters: usize = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(60);
    let f = symmetric_generator_element(k);
    let t0 = Instant::now();
    let lower = ball_lower(&f, radius, iters, 2024).unwrap();
    let dt = t0.elapsed().as_secs_f64();
    println!(
        "k={k} R={radius} iters={iters}: lower = {lower:.9} (closed form {:.9}) in {dt:.1}s ({:.2}s/iter)",
        kesten_norm(k),
        dt / iters as f64
    );
}
