//! Edge statistics of the matrix process against Airy-process laws.

use kpzlab_core::dyson::edge_time_series;
use kpzlab_core::Execution;

#[test]
fn short_time_structure_function_is_near_2t() {
    let n = 200;
    let grid = [0.0, 0.05, 0.1, 0.2];
    let samples = 300;
    let s = edge_time_series(n, &grid, samples, 51, Execution::Parallel).unwrap();
    let mut prev = 0.0;
    for k in 1..grid.len() {
        let sf = s.iter().map(|r| (r[0] - r[k]).powi(2)).sum::<f64>() / samples as f64;
        let t = grid[k];
        assert!(sf > prev, "t {t}: {sf} not increasing");
        assert!(sf <= 2.0 * t * 1.5, "t {t}: {sf} above 3t");
        prev = sf;
    }
}
