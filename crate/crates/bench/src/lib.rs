//! Fixtures shared by the benchmarks under `benches/`.

use wiener_core::{Grid, ModelField, SampledField};

/// `e^{-|x|²/2}` on `[-20, 20)^n` with `points` per axis.
pub fn gaussian(n: usize, points: usize) -> SampledField {
    let grid = Grid::new(n, 20.0, points).expect("valid grid");
    ModelField::from_json(r#"{"kind": "gaussian", "a": 0.5}"#)
        .expect("valid model")
        .sample(&grid)
        .expect("gaussian samples")
}

/// `m_{2,1}` in one dimension on a grid that resolves its phase.
pub fn chirp(points: usize) -> SampledField {
    let half_width = (points as f64).sqrt() / 2.0;
    let grid = Grid::new(1, half_width, points).expect("valid grid");
    ModelField::from_json(r#"{"kind": "chirp", "alpha": 2, "beta": 1}"#)
        .expect("valid model")
        .sample(&grid)
        .expect("resolved chirp")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_build() {
        assert_eq!(gaussian(2, 64).values().len(), 64 * 64);
        assert_eq!(chirp(1 << 12).values().len(), 1 << 12);
    }
}
