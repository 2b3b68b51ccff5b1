use frep_core::algebra::random_element;
use frep_core::ball::{compression_rayleigh, BallIndexer};
use frep_core::seed::rng_from_seed;
use frep_core::word::enumerate_words;
use nalgebra::DMatrix;

fn main() {
    let mut rng = rng_from_seed(17);
    for trial in 0..8 {
        let k = if trial % 2 == 0 { 2 } else { 3 };
        let f = random_element(k, 2, 4, &mut rng);
        if f.is_zero() { continue; }
        let h = f.involution().convolve(&f).unwrap();
        for radius in [1usize, 2, 3] {
            let words = enumerate_words(k, radius).unwrap();
            let m = DMatrix::from_fn(words.len(), words.len(), |i, j| {
                h.coefficient(&words[i].multiply(&words[j].inverse()))
            });
            let top = nalgebra::SymmetricEigen::new(m).eigenvalues.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
            let est = compression_rayleigh(&f, radius, 3000, 7).unwrap();
            println!("trial {trial} k {k} R {radius}: est {:.9} top {top:.9} (iters {})", est.rayleigh, est.iterations);
        }
        let idx = BallIndexer::new(k, 3).unwrap();
        let _ = idx;
    }
}
