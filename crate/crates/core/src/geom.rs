//! Points, great hyperspheres and half-space regions on the unit sphere
//! `S^n ⊂ R^{n+1}`, spherical simplices, and the action of `GL(n+1, R)`
//! (read projectively) on all of them.
//!
//! Projective objects are represented on the sphere: a point of `RP^n` is an
//! antipodal pair of unit vectors, a hyperplane of `RP^n` is an oriented great
//! hypersphere whose orientation selects one of its two open sides.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

/// Norm below which an input vector is treated as zero.
pub const ZERO_TOLERANCE: f64 = 1e-12;
/// Default bound on `|det|` of the normalized vertex matrix of a simplex.
pub const DEFAULT_DET_TOLERANCE: f64 = 1e-9;
/// Matching tolerance for points, faces and maps.
pub const MATCH_TOLERANCE: f64 = 1e-9;
/// Bound on `|det|` below which a map matrix is singular.
pub const SINGULAR_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("zero vector (norm {norm:e})")]
    ZeroVector { norm: f64 },
    #[error("degenerate simplex: |det| = {det:e} is not above {tolerance:e}")]
    DegenerateSimplex { det: f64, tolerance: f64 },
    #[error("singular matrix: |det| = {det:e}")]
    SingularMatrix { det: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("a simplex in S^{dim} needs {expected} vertices, got {found}")]
    VertexCount { dim: usize, expected: usize, found: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("non-finite coordinate")]
    NonFinite,
    #[error("cut set {bits:#b} refers to planes beyond {planes}")]
    CutSetOutOfRange { bits: u64, planes: usize },
}

fn normalized(v: DVector<f64>) -> Result<DVector<f64>, GeomError> {
    if v.iter().any(|c| !c.is_finite()) {
        return Err(GeomError::NonFinite);
    }
    let norm = v.norm();
    if norm < ZERO_TOLERANCE {
        return Err(GeomError::ZeroVector { norm });
    }
    Ok(v / norm)
}

/// A point of `S^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitPoint {
    coords: DVector<f64>,
}

impl UnitPoint {
    /// Normalizes `coords` onto the sphere.
    pub fn new(coords: impl Into<Vec<f64>>) -> Result<Self, GeomError> {
        Self::from_vector(DVector::from_vec(coords.into()))
    }

    pub fn from_vector(v: DVector<f64>) -> Result<Self, GeomError> {
        Ok(Self {
            coords: normalized(v)?,
        })
    }

    /// Standard basis vector `e_index` of `R^{dim+1}`.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = DVector::zeros(dim + 1);
        v[index] = 1.0;
        Self { coords: v }
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.coords
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.coords.iter().copied().collect()
    }

    /// The `n` of `S^n`.
    pub fn ambient_dim(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn antipode(&self) -> Self {
        Self {
            coords: -&self.coords,
        }
    }

    pub fn dot(&self, other: &UnitPoint) -> f64 {
        self.coords.dot(&other.coords)
    }

    /// Equality within `tol` (max-norm).
    pub fn approx_eq(&self, other: &UnitPoint, tol: f64) -> bool {
        self.coords.len() == other.coords.len() && (&self.coords - &other.coords).amax() <= tol
    }

    /// Equality of the underlying points of `RP^n`.
    pub fn projectively_eq(&self, other: &UnitPoint, tol: f64) -> bool {
        self.approx_eq(other, tol) || self.antipode().approx_eq(other, tol)
    }

    /// Representative of the antipodal pair whose first coordinate that is
    /// not negligible is positive.
    pub fn canonical(&self) -> Self {
        let lead = self.coords.iter().find(|c| c.abs() > MATCH_TOLERANCE);
        match lead {
            Some(c) if *c < 0.0 => self.antipode(),
            _ => self.clone(),
        }
    }

    /// Uniformly distributed point on `S^dim`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Self {
        loop {
            let v = DVector::from_fn(dim + 1, |_, _| rng.sample::<f64, _>(StandardNormal));
            if let Ok(p) = Self::from_vector(v) {
                return p;
            }
        }
    }
}

/// An oriented great hypersphere; its positive side is `{x : <normal, x> > 0}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Hyperplane {
    normal: DVector<f64>,
}

impl Hyperplane {
    pub fn new(normal: impl Into<Vec<f64>>) -> Result<Self, GeomError> {
        Self::from_vector(DVector::from_vec(normal.into()))
    }

    pub fn from_vector(v: DVector<f64>) -> Result<Self, GeomError> {
        Ok(Self {
            normal: normalized(v)?,
        })
    }

    pub fn normal(&self) -> &DVector<f64> {
        &self.normal
    }

    pub fn ambient_dim(&self) -> usize {
        self.normal.len() - 1
    }

    /// Signed distance-like value `<normal, x>`.
    pub fn side(&self, x: &DVector<f64>) -> f64 {
        self.normal.dot(x)
    }

    pub fn contains_strictly(&self, x: &DVector<f64>) -> bool {
        self.side(x) > 0.0
    }

    /// Same great hypersphere, opposite side.
    pub fn flipped(&self) -> Self {
        Self {
            normal: -&self.normal,
        }
    }

    pub fn approx_eq(&self, other: &Hyperplane, tol: f64) -> bool {
        self.normal.len() == other.normal.len() && (&self.normal - &other.normal).amax() <= tol
    }
}

/// Intersection of open positive sides of finitely many hyperplanes.
/// No hyperplanes means the whole sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    dim: usize,
    halves: Vec<Hyperplane>,
}

impl Region {
    pub fn whole(dim: usize) -> Self {
        Self {
            dim,
            halves: Vec::new(),
        }
    }

    pub fn new(dim: usize, halves: Vec<Hyperplane>) -> Result<Self, GeomError> {
        for h in &halves {
            if h.ambient_dim() != dim {
                return Err(GeomError::DimensionMismatch {
                    expected: dim,
                    found: h.ambient_dim(),
                });
            }
        }
        Ok(Self { dim, halves })
    }

    /// Region from raw normals, e.g. as read from a document.
    pub fn from_normals(dim: usize, normals: &[Vec<f64>]) -> Result<Self, GeomError> {
        let halves = normals
            .iter()
            .map(|n| Hyperplane::new(n.clone()))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(dim, halves)
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn halves(&self) -> &[Hyperplane] {
        &self.halves
    }

    pub fn is_whole(&self) -> bool {
        self.halves.is_empty()
    }

    pub fn contains(&self, x: &DVector<f64>) -> bool {
        self.halves.iter().all(|h| h.contains_strictly(x))
    }

    pub fn contains_point(&self, p: &UnitPoint) -> bool {
        self.contains(p.coords())
    }

    /// The image under `x ↦ -x`.
    pub fn antipodal(&self) -> Self {
        Self {
            dim: self.dim,
            halves: self.halves.iter().map(Hyperplane::flipped).collect(),
        }
    }

    pub fn intersect(&self, other: &Region) -> Result<Self, GeomError> {
        if self.dim != other.dim {
            return Err(GeomError::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        let mut halves = self.halves.clone();
        halves.extend(other.halves.iter().cloned());
        Ok(Self {
            dim: self.dim,
            halves,
        })
    }

    pub fn with_half(&self, h: Hyperplane) -> Result<Self, GeomError> {
        self.intersect(&Region::new(self.dim, vec![h])?)
    }
}

/// A subset of plane indices `{0, …, n}` of a simplex, stored as a bit mask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct CutSet(u64);

impl CutSet {
    pub const EMPTY: CutSet = CutSet(0);

    pub fn from_bits(bits: u64) -> Self {
        Self(bits)
    }

    pub fn from_indices(indices: impl IntoIterator<Item = usize>) -> Self {
        Self(indices.into_iter().fold(0, |acc, i| acc | (1u64 << i)))
    }

    /// All `planes` indices.
    pub fn full(planes: usize) -> Self {
        Self(if planes >= 64 { u64::MAX } else { (1u64 << planes) - 1 })
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, index: usize) -> bool {
        index < 64 && self.0 & (1u64 << index) != 0
    }

    pub fn indices(self) -> impl Iterator<Item = usize> {
        (0..64).filter(move |i| self.0 & (1u64 << i) != 0)
    }

    /// Every subset of `{0, …, planes-1}`, in increasing bit order.
    pub fn all(planes: usize) -> impl Iterator<Item = CutSet> {
        (0..=CutSet::full(planes).0).map(CutSet)
    }

    /// Largest index, if any.
    pub fn max_index(self) -> Option<usize> {
        if self.0 == 0 {
            None
        } else {
            Some(63 - self.0.leading_zeros() as usize)
        }
    }

    pub fn without(self, index: usize) -> Self {
        Self(self.0 & !(1u64 << index))
    }
}

/// A spherical `n`-simplex: `n + 1` linearly independent unit vertices and
/// the `n + 1` great hyperspheres through its facets. Plane `i` passes
/// through every vertex except vertex `i`, which lies on its positive side.
#[derive(Debug, Clone, PartialEq)]
pub struct SphericalSimplex {
    vertices: Vec<UnitPoint>,
    planes: Vec<Hyperplane>,
    det: f64,
}

impl SphericalSimplex {
    pub fn from_vertices(vertices: &[Vec<f64>]) -> Result<Self, GeomError> {
        Self::with_tolerance(vertices, DEFAULT_DET_TOLERANCE)
    }

    pub fn with_tolerance(vertices: &[Vec<f64>], det_tolerance: f64) -> Result<Self, GeomError> {
        let points = vertices
            .iter()
            .map(|v| UnitPoint::new(v.clone()))
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_points(points, det_tolerance)
    }

    pub fn from_points(vertices: Vec<UnitPoint>, det_tolerance: f64) -> Result<Self, GeomError> {
        let m = vertices.len();
        if m == 0 {
            return Err(GeomError::VertexCount {
                dim: 0,
                expected: 1,
                found: 0,
            });
        }
        for v in &vertices {
            if v.coords().len() != m {
                return Err(GeomError::VertexCount {
                    dim: v.coords().len() - 1,
                    expected: v.coords().len(),
                    found: m,
                });
            }
        }
        let columns: Vec<DVector<f64>> = vertices.iter().map(|v| v.coords().clone()).collect();
        let vmat = DMatrix::from_columns(&columns);
        let det = vmat.determinant();
        if det.abs() <= det_tolerance {
            return Err(GeomError::DegenerateSimplex {
                det,
                tolerance: det_tolerance,
            });
        }
        let inverse = vmat
            .try_inverse()
            .ok_or(GeomError::DegenerateSimplex {
                det,
                tolerance: det_tolerance,
            })?;
        // Row i of V^{-1} is orthogonal to every vertex but i and pairs
        // positively with vertex i.
        let planes = (0..m)
            .map(|i| Hyperplane::from_vector(inverse.row(i).transpose()))
            .collect::<Result<Vec<_>, _>>()?;
        let simplex = Self {
            vertices,
            planes,
            det,
        };
        let bary = simplex.barycenter();
        if simplex.planes.iter().any(|p| p.side(bary.coords()) <= 0.0) {
            return Err(GeomError::DegenerateSimplex {
                det,
                tolerance: det_tolerance,
            });
        }
        Ok(simplex)
    }

    /// Random simplex with Gaussian vertices, redrawn until well conditioned.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Self {
        loop {
            let pts: Vec<UnitPoint> = (0..=dim).map(|_| UnitPoint::random(rng, dim)).collect();
            if let Ok(s) = Self::from_points(pts, 1e-3) {
                return s;
            }
        }
    }

    /// The `n` of `s^n`.
    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn vertices(&self) -> &[UnitPoint] {
        &self.vertices
    }

    pub fn planes(&self) -> &[Hyperplane] {
        &self.planes
    }

    pub fn determinant(&self) -> f64 {
        self.det
    }

    /// Normalized vertex sum.
    pub fn barycenter(&self) -> UnitPoint {
        let sum = self
            .vertices
            .iter()
            .fold(DVector::zeros(self.vertices.len()), |acc, v| acc + v.coords());
        UnitPoint::from_vector(sum).expect("vertex sum of an independent set is nonzero")
    }

    pub fn check_cut(&self, cut: CutSet) -> Result<(), GeomError> {
        let planes = self.planes.len();
        if cut.bits() & !CutSet::full(planes).bits() != 0 {
            return Err(GeomError::CutSetOutOfRange {
                bits: cut.bits(),
                planes,
            });
        }
        Ok(())
    }

    /// Intersection of the positive sides of the planes in `cut`: the region
    /// whose measure is twice the angle at the face cut out by those planes.
    pub fn face_region(&self, cut: CutSet) -> Result<Region, GeomError> {
        self.check_cut(cut)?;
        Ok(Region {
            dim: self.dim(),
            halves: cut.indices().map(|i| self.planes[i].clone()).collect(),
        })
    }

    /// The open simplex itself.
    pub fn interior_region(&self) -> Region {
        Region {
            dim: self.dim(),
            halves: self.planes.clone(),
        }
    }

    /// Vertex indices of the face cut out by `cut`; it has dimension
    /// `n - |cut|`.
    pub fn face_vertices(&self, cut: CutSet) -> Vec<usize> {
        (0..self.vertices.len()).filter(|i| !cut.contains(*i)).collect()
    }

    pub fn antipodal(&self) -> Self {
        Self {
            vertices: self.vertices.iter().map(UnitPoint::antipode).collect(),
            planes: self.planes.iter().map(Hyperplane::flipped).collect(),
            det: if self.vertices.len().is_multiple_of(2) {
                self.det
            } else {
                -self.det
            },
        }
    }
}

/// An invertible linear map of `R^{n+1}`, read as an element of
/// `PGL(n+1, R)` acting on `S^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectiveMap {
    matrix: DMatrix<f64>,
    inverse: DMatrix<f64>,
}

impl ProjectiveMap {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self, GeomError> {
        if matrix.nrows() != matrix.ncols() {
            return Err(GeomError::NotSquare {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        if matrix.iter().any(|c| !c.is_finite()) {
            return Err(GeomError::NonFinite);
        }
        let det = matrix.determinant();
        if det.abs() <= SINGULAR_TOLERANCE {
            return Err(GeomError::SingularMatrix { det });
        }
        let inverse = matrix
            .clone()
            .try_inverse()
            .ok_or(GeomError::SingularMatrix { det })?;
        Ok(Self { matrix, inverse })
    }

    /// Row-major construction.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, GeomError> {
        let n = rows.len();
        for r in rows {
            if r.len() != n {
                return Err(GeomError::NotSquare {
                    rows: n,
                    cols: r.len(),
                });
            }
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: DMatrix::identity(dim + 1, dim + 1),
            inverse: DMatrix::identity(dim + 1, dim + 1),
        }
    }

    /// `-I`; the identity of `PGL`, the antipodal map of `S^n`.
    pub fn antipodal(dim: usize) -> Self {
        Self {
            matrix: -DMatrix::identity(dim + 1, dim + 1),
            inverse: -DMatrix::identity(dim + 1, dim + 1),
        }
    }

    /// Rotation of `R^3` by `angle` about `axis` (right-hand rule).
    pub fn rotation(axis: [f64; 3], angle: f64) -> Result<Self, GeomError> {
        let a = normalized(DVector::from_row_slice(&axis))?;
        let (s, c) = angle.sin_cos();
        let (x, y, z) = (a[0], a[1], a[2]);
        let t = 1.0 - c;
        let m = DMatrix::from_row_slice(
            3,
            3,
            &[
                t * x * x + c,
                t * x * y - s * z,
                t * x * z + s * y,
                t * x * y + s * z,
                t * y * y + c,
                t * y * z - s * x,
                t * x * z - s * y,
                t * y * z + s * x,
                t * z * z + c,
            ],
        );
        Self::new(m)
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.matrix
            .row_iter()
            .map(|r| r.iter().copied().collect())
            .collect()
    }

    /// The `n` of `S^n` acted upon.
    pub fn ambient_dim(&self) -> usize {
        self.matrix.nrows() - 1
    }

    pub fn inverse(&self) -> Self {
        Self {
            matrix: self.inverse.clone(),
            inverse: self.matrix.clone(),
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &ProjectiveMap) -> Self {
        Self {
            matrix: &self.matrix * &other.matrix,
            inverse: &other.inverse * &self.inverse,
        }
    }

    /// Equality in `PGL`: `self = c · other` for some nonzero `c`, with the
    /// residual measured relative to the size of `self`.
    pub fn projectively_eq(&self, other: &ProjectiveMap, tol: f64) -> bool {
        if self.matrix.shape() != other.matrix.shape() {
            return false;
        }
        let bb = other.matrix.norm_squared();
        let c = self.matrix.dot(&other.matrix) / bb;
        if c == 0.0 {
            return false;
        }
        let residual = (&self.matrix - &other.matrix * c).amax();
        residual <= tol * self.matrix.amax()
    }

    fn check_dim(&self, len: usize) -> Result<(), GeomError> {
        if len != self.matrix.nrows() {
            return Err(GeomError::DimensionMismatch {
                expected: self.matrix.nrows() - 1,
                found: len.saturating_sub(1),
            });
        }
        Ok(())
    }

    pub fn apply<T: ProjectiveAction>(&self, x: &T) -> Result<T, GeomError> {
        x.transformed(self)
    }
}

/// Objects `PGL(n+1, R)` acts on. Containment is preserved:
/// `x ∈ H⁺ ⇔ g·x ∈ (g·H)⁺`.
pub trait ProjectiveAction: Sized {
    fn transformed(&self, g: &ProjectiveMap) -> Result<Self, GeomError>;
}

impl ProjectiveAction for UnitPoint {
    fn transformed(&self, g: &ProjectiveMap) -> Result<Self, GeomError> {
        g.check_dim(self.coords.len())?;
        UnitPoint::from_vector(&g.matrix * &self.coords)
    }
}

impl ProjectiveAction for Hyperplane {
    fn transformed(&self, g: &ProjectiveMap) -> Result<Self, GeomError> {
        g.check_dim(self.normal.len())?;
        Hyperplane::from_vector(g.inverse.transpose() * &self.normal)
    }
}

impl ProjectiveAction for Region {
    fn transformed(&self, g: &ProjectiveMap) -> Result<Self, GeomError> {
        g.check_dim(self.dim + 1)?;
        Ok(Region {
            dim: self.dim,
            halves: self
                .halves
                .iter()
                .map(|h| h.transformed(g))
                .collect::<Result<_, _>>()?,
        })
    }
}

impl ProjectiveAction for SphericalSimplex {
    fn transformed(&self, g: &ProjectiveMap) -> Result<Self, GeomError> {
        g.check_dim(self.vertices.len())?;
        let vertices = self
            .vertices
            .iter()
            .map(|v| v.transformed(g))
            .collect::<Result<Vec<_>, _>>()?;
        let planes = self
            .planes
            .iter()
            .map(|h| h.transformed(g))
            .collect::<Result<Vec<_>, _>>()?;
        let det = DMatrix::from_columns(
            &vertices.iter().map(|v| v.coords().clone()).collect::<Vec<_>>(),
        )
        .determinant();
        Ok(SphericalSimplex {
            vertices,
            planes,
            det,
        })
    }
}
