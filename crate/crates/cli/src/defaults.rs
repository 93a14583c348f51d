//! Every CLI default in one place.
//!
//! | flag                 | default | applies to                    |
//! |----------------------|---------|-------------------------------|
//! | `--n`                | 1       | all                           |
//! | `--L`                | 20      | transform, norm, fit-rate     |
//! | `--N`                | 4096    | transform, norm, fit-rate     |
//! | `--a`                | 1       | gaussian models               |
//! | `--max-phase`        | π/2     | chirp-type sampling           |
//! | `--sweep-radii`      | 2:10    | chirp                         |
//! | `--q-sum`            | 2       | norm                          |
//! | `--bins`             | 64      | fit-rate                      |
//! | `--log-correction`   | none    | fit-rate                      |
//! | `--ensemble`         | gn-1d   | gn-check                      |
//! | `--dilations`        | -2..2   | gn-check                      |
//!
//! `WIENER_LAB_THREADS` sets the worker count (default: logical cores);
//! results do not depend on it.

pub const N_DIM: &str = "1";
pub const HALF_WIDTH: &str = "20";
pub const POINTS: &str = "4096";
pub const GAUSSIAN_A: &str = "1";
pub const SWEEP_RADII: &str = "2:10";
pub const Q_SUM: &str = "2";
pub const BINS: &str = "64";
pub const ENSEMBLE: &str = "gn-1d";
pub const DILATIONS: &str = "-2,-1,0,1,2";
pub const THREADS_ENV: &str = "WIENER_LAB_THREADS";
