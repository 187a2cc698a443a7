use crate::device::{self, DeviceParams, DeviceState};
use crate::error::{invalid, Result};

/// Side length of the array and of resized images.
pub const GRID_SIDE: usize = 20;

/// Row-major intensity grid with values in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct ImageGrid {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl ImageGrid {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return invalid(format!("grid of {rows}x{cols} needs {} values, got {}", rows * cols, data.len()));
        }
        if let Some(v) = data.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return invalid(format!("grid value {v} outside [0, 1]"));
        }
        Ok(ImageGrid { rows, cols, data })
    }

    pub fn filled(rows: usize, cols: usize, value: f64) -> Result<Self> {
        ImageGrid::new(rows, cols, vec![value; rows * cols])
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let data = (0..rows * cols).map(|i| f(i / cols, i % cols)).collect();
        ImageGrid::new(rows, cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> ImageGrid {
        ImageGrid { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&v| f(v)).collect() }
    }

    /// `1 - v` cellwise.
    pub fn inverted(&self) -> ImageGrid {
        self.map(|v| 1.0 - v)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self.get(r, c).to_string()).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Map every intensity to {0, 1} by `v >= threshold`.
pub fn binarize(img: &ImageGrid, threshold: f64) -> ImageGrid {
    img.map(|v| if v >= threshold { 1.0 } else { 0.0 })
}

/// Grid of devices sharing one parameter set.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayState {
    pub params: DeviceParams,
    rows: usize,
    cols: usize,
    cells: Vec<DeviceState>,
}

impl ArrayState {
    /// Every cell OFF (high resistance).
    pub fn new(params: DeviceParams, rows: usize, cols: usize) -> Self {
        ArrayState { params, rows, cols, cells: vec![DeviceState::off(&params); rows * cols] }
    }

    pub fn standard(params: DeviceParams) -> Self {
        ArrayState::new(params, GRID_SIDE, GRID_SIDE)
    }

    /// Rebuild from exported normalized states.
    pub fn from_normalized(params: DeviceParams, grid: &ImageGrid) -> Self {
        let cells = grid.values().iter().map(|&n| DeviceState::new(params.w_off - n * params.span())).collect();
        ArrayState { params, rows: grid.rows(), cols: grid.cols(), cells }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn cells(&self) -> &[DeviceState] {
        &self.cells
    }

    pub(crate) fn cells_mut(&mut self) -> &mut [DeviceState] {
        &mut self.cells
    }

    pub fn cell(&self, r: usize, c: usize) -> DeviceState {
        self.cells[r * self.cols + c]
    }

    pub fn resistance(&self, r: usize, c: usize) -> f64 {
        device::resistance(&self.params, self.cell(r, c).w)
    }
}

/// Normalized state of every cell (0 = low resistance).
pub fn array_state(array: &ArrayState) -> ImageGrid {
    let (rows, cols) = array.dims();
    let data = array.cells().iter().map(|s| device::normalized_state(&array.params, s.w)).collect();
    ImageGrid::new(rows, cols, data).expect("normalized states lie in [0, 1]")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn binarize_examples() {
        let hi = ImageGrid::filled(20, 20, 0.9).unwrap();
        assert!(binarize(&hi, 0.5).values().iter().all(|&v| v == 1.0));
        let lo = ImageGrid::filled(20, 20, 0.1).unwrap();
        assert!(binarize(&lo, 0.5).values().iter().all(|&v| v == 0.0));
        let checker = ImageGrid::from_fn(20, 20, |r, c| if (r + c) % 2 == 0 { 0.2 } else { 0.8 }).unwrap();
        let b = binarize(&checker, 0.5);
        for r in 0..20 {
            for c in 0..20 {
                assert_eq!(b.get(r, c), if (r + c) % 2 == 0 { 0.0 } else { 1.0 });
            }
        }
    }

    #[test]
    fn grid_validation() {
        assert!(ImageGrid::new(2, 2, vec![0.0; 3]).is_err());
        assert!(ImageGrid::new(1, 2, vec![0.0, 1.5]).is_err());
        assert!(ImageGrid::new(1, 2, vec![0.0, f64::NAN]).is_err());
    }

    #[test]
    fn array_state_extremes_and_midpoint() {
        let p = DeviceParams::default();
        let off = ArrayState::standard(p);
        assert!(array_state(&off).values().iter().all(|&v| v == 1.0));
        let on = ArrayState::from_normalized(p, &ImageGrid::filled(20, 20, 0.0).unwrap());
        assert!(array_state(&on).values().iter().all(|&v| v == 0.0));
        assert_relative_eq!(on.resistance(3, 4), 20e3, max_relative = 1e-12);

        let mut mid = ArrayState::standard(p);
        mid.cells_mut()[0] = DeviceState::new(p.state_for_resistance((20e3f64 * 190e3).sqrt()));
        assert_relative_eq!(array_state(&mid).get(0, 0), 0.5, epsilon = 1e-12);
    }
}
