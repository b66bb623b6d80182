use super::SolverError;

/// Uniform periodic Cartesian mesh. Cells are numbered with the first axis
/// running fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid<const D: usize> {
    cells: [usize; D],
    lower: [f64; D],
    extent: [f64; D],
    dx: [f64; D],
    strides: [usize; D],
}

impl<const D: usize> Grid<D> {
    pub fn new(cells: [usize; D], lower: [f64; D], extent: [f64; D]) -> Result<Self, SolverError> {
        if D == 0 || D > 3 {
            return Err(SolverError::InvalidGrid(format!("dimension {D} not in 1..=3")));
        }
        let mut dx = [0.0; D];
        let mut strides = [1; D];
        for j in 0..D {
            if cells[j] < 3 {
                return Err(SolverError::InvalidGrid(format!(
                    "axis {j} has {} cells, need at least 3",
                    cells[j]
                )));
            }
            if !(extent[j].is_finite() && extent[j] > 0.0) {
                return Err(SolverError::InvalidGrid(format!(
                    "axis {j} has non-positive extent {}",
                    extent[j]
                )));
            }
            dx[j] = extent[j] / cells[j] as f64;
            if j > 0 {
                strides[j] = strides[j - 1] * cells[j - 1];
            }
        }
        Ok(Self {
            cells,
            lower,
            extent,
            dx,
            strides,
        })
    }

    /// Same number of cells and extent on every axis.
    pub fn cube(n: usize, lower: f64, extent: f64) -> Result<Self, SolverError> {
        Self::new([n; D], [lower; D], [extent; D])
    }

    pub fn cells(&self) -> [usize; D] {
        self.cells
    }

    pub fn lower(&self) -> [f64; D] {
        self.lower
    }

    pub fn extent(&self) -> [f64; D] {
        self.extent
    }

    pub fn dx(&self) -> [f64; D] {
        self.dx
    }

    pub fn min_dx(&self) -> f64 {
        self.dx.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn len(&self) -> usize {
        self.cells.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_volume(&self) -> f64 {
        self.dx.iter().product()
    }

    pub fn domain_volume(&self) -> f64 {
        self.extent.iter().product()
    }

    pub fn stride(&self, axis: usize) -> usize {
        self.strides[axis]
    }

    pub fn coords(&self, index: usize) -> [usize; D] {
        let mut c = [0; D];
        for j in 0..D {
            c[j] = (index / self.strides[j]) % self.cells[j];
        }
        c
    }

    pub fn index(&self, coords: [usize; D]) -> usize {
        coords
            .iter()
            .zip(&self.strides)
            .map(|(c, s)| c * s)
            .sum()
    }

    /// Cell centre coordinates.
    pub fn center(&self, index: usize) -> [f64; D] {
        let c = self.coords(index);
        let mut x = [0.0; D];
        for j in 0..D {
            x[j] = self.lower[j] + (c[j] as f64 + 0.5) * self.dx[j];
        }
        x
    }

    /// Periodic neighbour one cell up along `axis`.
    #[inline]
    pub fn next(&self, index: usize, axis: usize) -> usize {
        let s = self.strides[axis];
        let c = (index / s) % self.cells[axis];
        if c + 1 == self.cells[axis] {
            index + s - s * self.cells[axis]
        } else {
            index + s
        }
    }

    /// Periodic neighbour one cell down along `axis`.
    #[inline]
    pub fn prev(&self, index: usize, axis: usize) -> usize {
        let s = self.strides[axis];
        let c = (index / s) % self.cells[axis];
        if c == 0 {
            index + s * self.cells[axis] - s
        } else {
            index - s
        }
    }
}
