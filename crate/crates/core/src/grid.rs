//! Uniform cell-centered mesh on the (r, z) half-plane.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Uniform grid covering `r ∈ (0, r_max]`, `z ∈ [−z_half, z_half]` with
/// cell centers at `r_i = (i+1/2)·dr`, `z_j = −z_half + (j+1/2)·dz`.
/// Cell centers never touch the axis, so `1/r` stays finite everywhere the
/// scheme evaluates it; the axis itself is a face at `r = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid2D<T> {
    pub nr: usize,
    pub nz: usize,
    pub dr: T,
    pub dz: T,
    pub r_max: T,
    pub z_half: T,
    pub ghost_width: usize,
}

impl<T: Real> Grid2D<T> {
    pub fn new(nr: usize, nz: usize, r_max: T, z_half: T) -> Result<Self> {
        Self::with_ghost_width(nr, nz, r_max, z_half, 2)
    }

    pub fn with_ghost_width(
        nr: usize,
        nz: usize,
        r_max: T,
        z_half: T,
        ghost_width: usize,
    ) -> Result<Self> {
        if nr < 4 || nz < 4 {
            return Err(Error::Config(format!(
                "grid.nr/grid.nz: need at least 4 cells per direction, got {nr}x{nz}"
            )));
        }
        if !(r_max > T::zero()) || !(z_half > T::zero()) {
            return Err(Error::Config(
                "grid.r_max/grid.z_half: extents must be positive".into(),
            ));
        }
        if ghost_width < 2 {
            return Err(Error::Config(format!(
                "grid.ghost_width: need >= 2, got {ghost_width}"
            )));
        }
        Ok(Grid2D {
            nr,
            nz,
            dr: r_max / T::of_usize(nr),
            dz: T::cst(2.0) * z_half / T::of_usize(nz),
            r_max,
            z_half,
            ghost_width,
        })
    }

    /// Radius of the center of interior cell `i` (0-based).
    #[inline]
    pub fn r_center(&self, i: usize) -> T {
        (T::of_usize(i) + T::cst(0.5)) * self.dr
    }

    /// Axial coordinate of the center of interior cell `j`.
    #[inline]
    pub fn z_center(&self, j: usize) -> T {
        -self.z_half + (T::of_usize(j) + T::cst(0.5)) * self.dz
    }

    /// Euclidean radius of a cell center.
    #[inline]
    pub fn euclid_radius(&self, i: usize, j: usize) -> T {
        let r = self.r_center(i);
        let z = self.z_center(j);
        (r * r + z * z).sqrt()
    }

    /// Largest cell extent, the `h` of refinement statements.
    #[inline]
    pub fn h_max(&self) -> T {
        self.dr.max(self.dz)
    }

    /// Total storage width/height including ghost frames.
    #[inline]
    pub fn width(&self) -> usize {
        self.nr + 2 * self.ghost_width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.nz + 2 * self.ghost_width
    }

    /// Flat index for cell `(i, j)`, ghosts addressed by negative indices.
    #[inline]
    pub fn idx(&self, i: isize, j: isize) -> usize {
        let g = self.ghost_width as isize;
        debug_assert!(i >= -g && i < self.nr as isize + g);
        debug_assert!(j >= -g && j < self.nz as isize + g);
        ((i + g) as usize) * self.height() + (j + g) as usize
    }

    pub fn n_cells(&self) -> usize {
        self.width() * self.height()
    }
}
