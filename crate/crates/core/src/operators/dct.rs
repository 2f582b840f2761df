//! Orthonormal DCT-II (and its inverse) for 1D signals and separable 2D grids.

use std::fmt;
use std::sync::Arc;

use rustdct::{DctPlanner, TransformType2And3};

use crate::signal::Shape;

#[derive(Clone)]
pub(crate) struct OrthoDct {
    shape: Shape,
    rows: Arc<dyn TransformType2And3<f64>>,
    cols: Option<Arc<dyn TransformType2And3<f64>>>,
}

impl fmt::Debug for OrthoDct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OrthoDct").field("shape", &self.shape).finish()
    }
}

fn scale_forward(buf: &mut [f64]) {
    let n = buf.len() as f64;
    let s0 = (1.0 / n).sqrt();
    let s = (2.0 / n).sqrt();
    buf[0] *= s0;
    for v in &mut buf[1..] {
        *v *= s;
    }
}

fn scale_inverse(buf: &mut [f64]) {
    let n = buf.len() as f64;
    buf[0] *= 2.0 / n.sqrt();
    let s = (2.0 / n).sqrt();
    for v in &mut buf[1..] {
        *v *= s;
    }
}

impl OrthoDct {
    pub(crate) fn new(shape: Shape) -> Self {
        let mut planner = DctPlanner::new();
        match shape {
            Shape::Line(n) => Self {
                shape,
                rows: planner.plan_dct2(n),
                cols: None,
            },
            Shape::Grid { rows, cols } => Self {
                shape,
                // `rows` transforms each row (length = cols), `cols` each column.
                rows: planner.plan_dct2(cols),
                cols: Some(planner.plan_dct2(rows)),
            },
        }
    }

    pub(crate) fn forward(&self, buf: &mut [f64]) {
        self.apply(buf, true)
    }

    pub(crate) fn inverse(&self, buf: &mut [f64]) {
        self.apply(buf, false)
    }

    fn apply(&self, buf: &mut [f64], forward: bool) {
        let run = |plan: &Arc<dyn TransformType2And3<f64>>, line: &mut [f64]| {
            if forward {
                plan.process_dct2(line);
                scale_forward(line);
            } else {
                scale_inverse(line);
                plan.process_dct3(line);
            }
        };
        match self.shape {
            Shape::Line(_) => run(&self.rows, buf),
            Shape::Grid { rows, cols } => {
                for r in 0..rows {
                    run(&self.rows, &mut buf[r * cols..(r + 1) * cols]);
                }
                let col_plan = self.cols.as_ref().expect("grid plan");
                let mut column = vec![0.0; rows];
                for c in 0..cols {
                    for r in 0..rows {
                        column[r] = buf[r * cols + c];
                    }
                    run(col_plan, &mut column);
                    for r in 0..rows {
                        buf[r * cols + c] = column[r];
                    }
                }
            }
        }
    }
}
