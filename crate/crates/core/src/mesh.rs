//! Cell/face geometry for finite-volume schemes.
//!
//! The [`Mesh`] type is a general polygonal-mesh description: cells with a
//! measure, a centroid and a diameter, faces with a measure, a centroid and a
//! unit reference normal, and the incidence between them. Only two providers
//! exist: uniform 1D intervals ([`Mesh::build_1d`]) and uniform 2D Cartesian
//! grids ([`Mesh::build_2d`]).
//!
//! Orientation: every face stores an ordered pair of cells `(K, L)`, with `L`
//! absent on the boundary, and its reference normal points out of `K`. The
//! outward normal of `L` on the same face is the opposite vector. Face-based
//! velocities in this crate are stored along the reference normal, so that
//! `u_{K,σ} = -u_{L,σ}` holds by construction.
//!
//! In 1D faces are points and carry measure 1, so fluxes reduce to pointwise
//! values. The diameter of a 1D cell is its length, that of a 2D cell the
//! diagonal of the rectangle.

use alloc::vec;
use alloc::vec::Vec;

use crate::math::sqrt;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    pub measure: f64,
    pub centroid: [f64; 2],
    pub diameter: f64,
    /// Indices of the faces of the cell.
    pub faces: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Face {
    pub measure: f64,
    pub centroid: [f64; 2],
    /// Unit normal pointing out of `cells.0`.
    pub normal: [f64; 2],
    /// `(K, Some(L))` for an interior face `σ = K|L`, `(K, None)` on the boundary.
    pub cells: (usize, Option<usize>),
}

impl Face {
    pub fn is_boundary(&self) -> bool {
        self.cells.1.is_none()
    }
}

/// Immutable mesh. Refinement builds a new one.
#[derive(Clone, Debug)]
pub struct Mesh {
    dim: usize,
    extent: [f64; 2],
    cells: Vec<Cell>,
    faces: Vec<Face>,
}

impl Mesh {
    /// Uniform mesh of `(0, length)` with `n_cells` cells.
    pub fn build_1d(n_cells: usize, length: f64) -> Result<Self> {
        if n_cells == 0 {
            return Err(Error::InvalidMesh("number of cells must be at least 1"));
        }
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::InvalidMesh("length must be positive"));
        }
        let h = length / n_cells as f64;
        let cells = (0..n_cells)
            .map(|k| Cell {
                measure: h,
                centroid: [(k as f64 + 0.5) * h, 0.0],
                diameter: h,
                faces: vec![k, k + 1],
            })
            .collect();
        let faces = (0..=n_cells)
            .map(|i| {
                let (cells, normal) = if i == 0 {
                    ((0, None), [-1.0, 0.0])
                } else if i == n_cells {
                    ((n_cells - 1, None), [1.0, 0.0])
                } else {
                    ((i - 1, Some(i)), [1.0, 0.0])
                };
                Face {
                    measure: 1.0,
                    centroid: [i as f64 * h, 0.0],
                    normal,
                    cells,
                }
            })
            .collect();
        Ok(Mesh {
            dim: 1,
            extent: [length, 0.0],
            cells,
            faces,
        })
    }

    /// Uniform `nx × ny` Cartesian grid of `(0, lx) × (0, ly)`.
    ///
    /// Cell `(i, j)` has index `j * nx + i`; its faces are stored in the order
    /// left, right, bottom, top.
    pub fn build_2d(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(Error::InvalidMesh("number of cells must be at least 1 in each direction"));
        }
        if !(lx > 0.0 && ly > 0.0) || !lx.is_finite() || !ly.is_finite() {
            return Err(Error::InvalidMesh("domain lengths must be positive"));
        }
        let dx = lx / nx as f64;
        let dy = ly / ny as f64;
        let cell_id = |i: usize, j: usize| j * nx + i;
        let n_vertical = ny * (nx + 1);
        let vertical = |i: usize, j: usize| j * (nx + 1) + i;
        let horizontal = |i: usize, j: usize| n_vertical + j * nx + i;

        let mut faces = Vec::with_capacity(n_vertical + (ny + 1) * nx);
        for j in 0..ny {
            for i in 0..=nx {
                let (cells, normal) = if i == 0 {
                    ((cell_id(0, j), None), [-1.0, 0.0])
                } else if i == nx {
                    ((cell_id(nx - 1, j), None), [1.0, 0.0])
                } else {
                    ((cell_id(i - 1, j), Some(cell_id(i, j))), [1.0, 0.0])
                };
                faces.push(Face {
                    measure: dy,
                    centroid: [i as f64 * dx, (j as f64 + 0.5) * dy],
                    normal,
                    cells,
                });
            }
        }
        for j in 0..=ny {
            for i in 0..nx {
                let (cells, normal) = if j == 0 {
                    ((cell_id(i, 0), None), [0.0, -1.0])
                } else if j == ny {
                    ((cell_id(i, ny - 1), None), [0.0, 1.0])
                } else {
                    ((cell_id(i, j - 1), Some(cell_id(i, j))), [0.0, 1.0])
                };
                faces.push(Face {
                    measure: dx,
                    centroid: [(i as f64 + 0.5) * dx, j as f64 * dy],
                    normal,
                    cells,
                });
            }
        }

        let diameter = sqrt(dx * dx + dy * dy);
        let mut cells = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                cells.push(Cell {
                    measure: dx * dy,
                    centroid: [(i as f64 + 0.5) * dx, (j as f64 + 0.5) * dy],
                    diameter,
                    faces: vec![
                        vertical(i, j),
                        vertical(i + 1, j),
                        horizontal(i, j),
                        horizontal(i, j + 1),
                    ],
                });
            }
        }
        Ok(Mesh {
            dim: 2,
            extent: [lx, ly],
            cells,
            faces,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Domain lengths; the second entry is 0 in 1D.
    pub fn extent(&self) -> [f64; 2] {
        self.extent
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn n_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn cell(&self, k: usize) -> &Cell {
        &self.cells[k]
    }

    pub fn face(&self, s: usize) -> &Face {
        &self.faces[s]
    }

    /// Interior faces as `(face, K, L)` with the reference normal out of `K`.
    pub fn interior_faces(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.faces
            .iter()
            .enumerate()
            .filter_map(|(s, f)| f.cells.1.map(|l| (s, f.cells.0, l)))
    }

    /// `+1` when the reference normal of `face` points out of `cell`, `-1`
    /// otherwise.
    #[inline]
    pub fn orientation(&self, cell: usize, face: usize) -> f64 {
        if self.faces[face].cells.0 == cell {
            1.0
        } else {
            -1.0
        }
    }

    /// Unit normal to `face`, outward from `cell`.
    pub fn outward_normal(&self, cell: usize, face: usize) -> [f64; 2] {
        let n = self.faces[face].normal;
        let o = self.orientation(cell, face);
        [o * n[0], o * n[1]]
    }

    /// The cell on the other side of `face`, if any.
    #[inline]
    pub fn neighbor(&self, cell: usize, face: usize) -> Option<usize> {
        let (k, l) = self.faces[face].cells;
        if k == cell {
            l
        } else {
            Some(k)
        }
    }

    pub fn max_faces_per_cell(&self) -> usize {
        self.cells.iter().map(|c| c.faces.len()).max().unwrap_or(0)
    }

    pub fn total_measure(&self) -> f64 {
        self.cells.iter().map(|c| c.measure).sum()
    }

    /// `h_M`: the largest cell diameter.
    pub fn h_max(&self) -> f64 {
        self.cells.iter().map(|c| c.diameter).fold(0.0, f64::max)
    }

    /// `min_K |K| / Σ_{σ∈E(K)} |σ|`, boundary faces included.
    pub fn h_underline(&self) -> f64 {
        self.cells
            .iter()
            .map(|c| {
                let perimeter: f64 = c.faces.iter().map(|&s| self.faces[s].measure).sum();
                c.measure / perimeter
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// `C_M = max_{K, (σ,σ')∈E(K)²} (|σ| + |σ'|) h_K / |K|`.
    pub fn regularity_cm(&self) -> f64 {
        self.cells
            .iter()
            .map(|c| {
                let largest = c
                    .faces
                    .iter()
                    .map(|&s| self.faces[s].measure)
                    .fold(0.0, f64::max);
                2.0 * largest * c.diameter / c.measure
            })
            .fold(0.0, f64::max)
    }

    /// Per-cell `Σ_σ |σ| n_{K,σ}`, which vanishes for closed cells.
    pub fn closure_defect(&self, cell: usize) -> [f64; 2] {
        let mut acc = [0.0; 2];
        for &s in &self.cells[cell].faces {
            let n = self.outward_normal(cell, s);
            let m = self.faces[s].measure;
            acc[0] += m * n[0];
            acc[1] += m * n[1];
        }
        acc
    }

    pub(crate) fn check_cell_field(&self, what: &'static str, field: &[f64]) -> Result<()> {
        if field.len() != self.n_cells() {
            return Err(Error::SizeMismatch {
                what,
                expected: self.n_cells(),
                found: field.len(),
            });
        }
        Ok(())
    }

    pub(crate) fn check_face_field(&self, what: &'static str, field: &[f64]) -> Result<()> {
        if field.len() != self.n_faces() {
            return Err(Error::SizeMismatch {
                what,
                expected: self.n_faces(),
                found: field.len(),
            });
        }
        Ok(())
    }
}
