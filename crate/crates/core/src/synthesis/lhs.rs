use rand::seq::SliceRandom;
use rand::Rng;

/// `n x dims` Latin hypercube in `[0, 1)`: every column has exactly one
/// point in each of the `n` equal strata.
pub fn lhs_sample<R: Rng + ?Sized>(n: usize, dims: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let mut grid = vec![vec![0.0; dims]; n];
    for d in 0..dims {
        let mut strata: Vec<usize> = (0..n).collect();
        strata.shuffle(rng);
        for (row, &s) in grid.iter_mut().zip(&strata) {
            row[d] = (s as f64 + rng.random::<f64>()) / n as f64;
        }
    }
    grid
}

/// `h -> 2h - 1`
pub fn map_to_signed(h: f64) -> f64 {
    2.0 * h - 1.0
}

/// Affine map of `[0, 1]` onto `[lo, hi]`.
pub fn map_to_range(h: f64, (lo, hi): (f64, f64)) -> f64 {
    lo + (hi - lo) * h
}
