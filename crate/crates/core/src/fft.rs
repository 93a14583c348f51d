//! Axis-by-axis complex FFT over a row-major hypercube of side `len`.

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};
use std::sync::Arc;

pub(crate) fn fft_nd(data: &mut [Complex64], dim: usize, len: usize, direction: FftDirection) {
    debug_assert_eq!(data.len(), len.pow(dim as u32));
    let mut planner = FftPlanner::new();
    let plan = planner.plan_fft(len, direction);
    let mut scratch = vec![Complex64::default(); plan.get_inplace_scratch_len()];

    // Last axis is contiguous.
    for line in data.chunks_exact_mut(len) {
        plan.process_with_scratch(line, &mut scratch);
    }
    if dim == 1 {
        return;
    }
    let mut buf = Vec::new();
    for axis in 0..dim - 1 {
        let stride = len.pow((dim - 1 - axis) as u32);
        strided_pass(data, len, stride, &plan, &mut buf, &mut scratch);
    }
}

/// Columns are gathered `BATCH` at a time so every read and write touches
/// contiguous runs.
const BATCH: usize = 32;

fn strided_pass(
    data: &mut [Complex64],
    len: usize,
    stride: usize,
    plan: &Arc<dyn Fft<f64>>,
    buf: &mut Vec<Complex64>,
    scratch: &mut [Complex64],
) {
    let block = stride * len;
    buf.resize(BATCH * len, Complex64::default());
    for base in (0..data.len()).step_by(block) {
        for first in (0..stride).step_by(BATCH) {
            let width = BATCH.min(stride - first);
            for i in 0..len {
                let row = &data[base + i * stride + first..][..width];
                for (c, v) in row.iter().enumerate() {
                    buf[c * len + i] = *v;
                }
            }
            plan.process_with_scratch(&mut buf[..width * len], scratch);
            for i in 0..len {
                let row = &mut data[base + i * stride + first..][..width];
                for (c, v) in row.iter_mut().enumerate() {
                    *v = buf[c * len + i];
                }
            }
        }
    }
}

/// Apply `f` to every line along `axis`, writing the returned line back.
pub(crate) fn map_lines(
    data: &[Complex64],
    dim: usize,
    len: usize,
    axis: usize,
    mut f: impl FnMut(&[Complex64]) -> Vec<Complex64>,
) -> Vec<Complex64> {
    let stride = len.pow((dim - 1 - axis) as u32);
    let block = stride * len;
    let mut out = vec![Complex64::default(); data.len()];
    let mut line = vec![Complex64::default(); len];
    for base in (0..data.len()).step_by(block) {
        for offset in 0..stride {
            let start = base + offset;
            for (i, slot) in line.iter_mut().enumerate() {
                *slot = data[start + i * stride];
            }
            let mapped = f(&line);
            for (i, v) in mapped.into_iter().enumerate() {
                out[start + i * stride] = v;
            }
        }
    }
    out
}
