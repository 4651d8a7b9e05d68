use nalgebra::{DMatrix, DVector};

use super::ops::hermitian_eigendecomposition;
use super::shape::SubsystemShape;
use super::STATE_TOL;
use crate::{CMatrix, CVector, Error, Result, C64};

/// Square complex matrix on a labeled tensor-product space.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledMatrix {
    data: CMatrix,
    shape: SubsystemShape,
}

impl LabeledMatrix {
    pub fn new(data: CMatrix, shape: SubsystemShape) -> Result<Self> {
        let d = shape.total_dim();
        if data.nrows() != d || data.ncols() != d {
            return Err(Error::shape(format!(
                "matrix is {}x{}, shape {shape} needs {d}x{d}",
                data.nrows(),
                data.ncols()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::domain("matrix has non-finite entries"));
        }
        Ok(Self { data, shape })
    }

    pub(crate) fn new_unchecked(data: CMatrix, shape: SubsystemShape) -> Self {
        debug_assert_eq!(data.nrows(), shape.total_dim());
        Self { data, shape }
    }

    pub fn identity(shape: SubsystemShape) -> Self {
        let d = shape.total_dim();
        Self::new_unchecked(CMatrix::identity(d, d), shape)
    }

    pub fn from_real_diagonal(diag: &[f64], shape: SubsystemShape) -> Result<Self> {
        let v = DVector::from_iterator(diag.len(), diag.iter().map(|&x| C64::new(x, 0.0)));
        Self::new(DMatrix::from_diagonal(&v), shape)
    }

    pub fn data(&self) -> &CMatrix {
        &self.data
    }

    pub fn into_data(self) -> CMatrix {
        self.data
    }

    pub fn shape(&self) -> &SubsystemShape {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn trace(&self) -> C64 {
        self.data.trace()
    }

    /// Largest entrywise deviation `max |M - M†|`.
    pub fn hermitian_residual(&self) -> f64 {
        hermitian_residual(&self.data)
    }

    /// Kronecker product with concatenated shape.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let shape = self.shape.concat(&other.shape)?;
        Ok(Self::new_unchecked(self.data.kronecker(&other.data), shape))
    }

    /// Partial trace keeping `keep`, which are returned in their original order.
    pub fn partial_trace(&self, keep: &[&str]) -> Result<Self> {
        let mut pos = self.shape.positions(keep)?;
        pos.sort_unstable();
        let labels: Vec<&str> = pos
            .iter()
            .map(|&p| self.shape.entries()[p].0.as_str())
            .collect();
        let shape = self.shape.select(&labels)?;
        let (kept, traced, kd, td) = self.shape.split_indices(&pos);
        // group flat indices by their traced-out digits
        let mut groups: Vec<Vec<(usize, usize)>> = vec![Vec::with_capacity(kd); td];
        for (flat, (&k, &t)) in kept.iter().zip(traced.iter()).enumerate() {
            groups[t].push((flat, k));
        }
        let mut out = CMatrix::zeros(kd, kd);
        for group in &groups {
            for &(j, kj) in group {
                for &(i, ki) in group {
                    out[(ki, kj)] += self.data[(i, j)];
                }
            }
        }
        Ok(Self::new_unchecked(out, shape))
    }

    /// Reorder subsystems; `order` must list every label exactly once.
    pub fn permute(&self, order: &[&str]) -> Result<Self> {
        if order.len() != self.shape.len() {
            return Err(Error::labeling(format!(
                "permutation {order:?} does not cover {}",
                self.shape
            )));
        }
        let pos = self.shape.positions(order)?;
        let map = self.shape.permutation_map(&pos);
        let d = self.dim();
        let mut out = CMatrix::zeros(d, d);
        for j in 0..d {
            for i in 0..d {
                out[(map[i], map[j])] = self.data[(i, j)];
            }
        }
        Ok(Self::new_unchecked(out, self.shape.select(order)?))
    }

    pub fn relabel(&self, from: &str, to: &str) -> Result<Self> {
        Ok(Self::new_unchecked(
            self.data.clone(),
            self.shape.relabel(from, to)?,
        ))
    }

    /// `self - other`; shapes must agree exactly.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.shape != other.shape {
            return Err(Error::shape(format!(
                "cannot subtract {} from {}",
                other.shape, self.shape
            )));
        }
        Ok(Self::new_unchecked(&self.data - &other.data, self.shape.clone()))
    }
}

pub(crate) fn hermitian_residual(m: &CMatrix) -> f64 {
    let mut worst = 0.0f64;
    for j in 0..m.ncols() {
        for i in 0..=j.min(m.nrows().saturating_sub(1)) {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Validated density operator: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator(LabeledMatrix);

impl DensityOperator {
    pub fn new(m: LabeledMatrix) -> Result<Self> {
        let herm = m.hermitian_residual();
        if herm > STATE_TOL {
            return Err(Error::domain(format!("not Hermitian (residual {herm:.3e})")));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::domain(format!("trace is {tr}, expected 1")));
        }
        let eig = hermitian_eigendecomposition(m.data())?;
        let min = eig.values.last().copied().unwrap_or(0.0);
        if min < -STATE_TOL {
            return Err(Error::domain(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(Self(m))
    }

    /// Wrap an operator known to be a state by construction.
    pub(crate) fn new_unchecked(m: LabeledMatrix) -> Self {
        Self(m)
    }

    pub fn from_pure(psi: &PureState) -> Self {
        let v = psi.data();
        Self(LabeledMatrix::new_unchecked(
            v * v.adjoint(),
            psi.shape().clone(),
        ))
    }

    pub fn maximally_mixed(shape: SubsystemShape) -> Self {
        let d = shape.total_dim();
        let scale = C64::new(1.0 / d as f64, 0.0);
        Self(LabeledMatrix::new_unchecked(
            CMatrix::identity(d, d) * scale,
            shape,
        ))
    }

    pub fn as_matrix(&self) -> &LabeledMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> LabeledMatrix {
        self.0
    }

    pub fn data(&self) -> &CMatrix {
        self.0.data()
    }

    pub fn shape(&self) -> &SubsystemShape {
        self.0.shape()
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn partial_trace(&self, keep: &[&str]) -> Result<Self> {
        Ok(Self(self.0.partial_trace(keep)?))
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        Ok(Self(self.0.tensor(&other.0)?))
    }

    pub fn permute(&self, order: &[&str]) -> Result<Self> {
        Ok(Self(self.0.permute(order)?))
    }

    pub fn relabel(&self, from: &str, to: &str) -> Result<Self> {
        Ok(Self(self.0.relabel(from, to)?))
    }
}

/// Unit vector on a labeled tensor-product space.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    data: CVector,
    shape: SubsystemShape,
}

impl PureState {
    pub fn new(data: CVector, shape: SubsystemShape) -> Result<Self> {
        if data.len() != shape.total_dim() {
            return Err(Error::shape(format!(
                "vector has length {}, shape {shape} needs {}",
                data.len(),
                shape.total_dim()
            )));
        }
        let norm = data.norm();
        if !norm.is_finite() || (norm - 1.0).abs() > STATE_TOL {
            return Err(Error::domain(format!("state norm is {norm}, expected 1")));
        }
        Ok(Self { data, shape })
    }

    /// Normalize `data` and wrap it.
    pub fn normalized(data: CVector, shape: SubsystemShape) -> Result<Self> {
        let norm = data.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::domain("cannot normalize a zero vector"));
        }
        Self::new(data.unscale(norm), shape)
    }

    pub(crate) fn new_unchecked(data: CVector, shape: SubsystemShape) -> Self {
        Self { data, shape }
    }

    /// Computational basis vector `|index⟩`.
    pub fn basis(shape: SubsystemShape, index: usize) -> Result<Self> {
        let d = shape.total_dim();
        if index >= d {
            return Err(Error::shape(format!("basis index {index} out of range {d}")));
        }
        let mut v = CVector::zeros(d);
        v[index] = C64::new(1.0, 0.0);
        Ok(Self { data: v, shape })
    }

    /// `Σ_i |i⟩|i⟩ / √d` on two systems of dimension `d`.
    pub fn maximally_entangled(first: &str, second: &str, d: usize) -> Result<Self> {
        let shape = SubsystemShape::new([(first, d), (second, d)])?;
        let mut v = CVector::zeros(d * d);
        let amp = C64::new(1.0 / (d as f64).sqrt(), 0.0);
        for i in 0..d {
            v[i * d + i] = amp;
        }
        Ok(Self { data: v, shape })
    }

    pub fn data(&self) -> &CVector {
        &self.data
    }

    pub fn shape(&self) -> &SubsystemShape {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let shape = self.shape.concat(&other.shape)?;
        Ok(Self {
            data: self.data.kronecker(&other.data),
            shape,
        })
    }

    pub fn to_density(&self) -> DensityOperator {
        DensityOperator::from_pure(self)
    }

    pub fn permute(&self, order: &[&str]) -> Result<Self> {
        if order.len() != self.shape.len() {
            return Err(Error::labeling(format!(
                "permutation {order:?} does not cover {}",
                self.shape
            )));
        }
        let pos = self.shape.positions(order)?;
        let map = self.shape.permutation_map(&pos);
        let mut out = CVector::zeros(self.dim());
        for (i, &m) in map.iter().enumerate() {
            out[m] = self.data[i];
        }
        Ok(Self {
            data: out,
            shape: self.shape.select(order)?,
        })
    }

    pub fn relabel(&self, from: &str, to: &str) -> Result<Self> {
        Ok(Self {
            data: self.data.clone(),
            shape: self.shape.relabel(from, to)?,
        })
    }

    /// Coefficient matrix `M[k, r]` with the `keep` factors (given order) as
    /// rows and the remaining factors (shape order) as columns.
    pub fn coefficient_matrix(&self, keep: &[&str]) -> Result<CMatrix> {
        let pos = self.shape.positions(keep)?;
        let (kept, traced, kd, td) = self.shape.split_indices(&pos);
        let mut m = CMatrix::zeros(kd, td);
        for (flat, z) in self.data.iter().enumerate() {
            m[(kept[flat], traced[flat])] = *z;
        }
        Ok(m)
    }

    /// Reduced state on `keep`, returned in original subsystem order.
    pub fn reduced(&self, keep: &[&str]) -> Result<DensityOperator> {
        let mut pos = self.shape.positions(keep)?;
        pos.sort_unstable();
        let labels: Vec<&str> = pos
            .iter()
            .map(|&p| self.shape.entries()[p].0.as_str())
            .collect();
        let m = self.coefficient_matrix(&labels)?;
        Ok(DensityOperator::new_unchecked(LabeledMatrix::new_unchecked(
            &m * m.adjoint(),
            self.shape.select(&labels)?,
        )))
    }

    /// Apply a linear map to the subsystems named by its input shape. The
    /// output factors take the place of the first input factor. The result
    /// is returned unnormalized-checked: the map must preserve the norm.
    pub fn apply(&self, op: &LabeledMap) -> Result<Self> {
        let v = self.apply_unnormalized(op)?;
        Self::new(v.data, v.shape)
    }

    pub(crate) fn apply_unnormalized(&self, op: &LabeledMap) -> Result<Self> {
        let in_labels: Vec<&str> = op.input.labels().collect();
        for (label, dim) in op.input.entries() {
            let have = self.shape.dim_of(label)?;
            if have != *dim {
                return Err(Error::shape(format!(
                    "map expects {label}:{dim}, state has {label}:{have}"
                )));
            }
        }
        let rest: Vec<&str> = self.shape.complement(&in_labels);
        let rest_shape = self.shape.select(&rest)?;
        let out_full = rest_shape.concat(&op.output)?;
        // coefficient matrix: rows = input factors, cols = rest
        let m = self.coefficient_matrix(&in_labels)?;
        let applied = &op.data * m; // out_dim x rest_dim
        let rd = rest_shape.total_dim();
        let od = op.output.total_dim();
        let mut v = CVector::zeros(rd * od);
        for r in 0..rd {
            for o in 0..od {
                v[r * od + o] = applied[(o, r)];
            }
        }
        let staged = Self::new_unchecked(v, out_full);
        let order = splice_order(&self.shape, &in_labels, &op.output);
        let order: Vec<&str> = order.iter().map(String::as_str).collect();
        staged.permute_unchecked(&order)
    }

    fn permute_unchecked(&self, order: &[&str]) -> Result<Self> {
        let pos = self.shape.positions(order)?;
        let map = self.shape.permutation_map(&pos);
        let mut out = CVector::zeros(self.dim());
        for (i, &m) in map.iter().enumerate() {
            out[m] = self.data[i];
        }
        Ok(Self {
            data: out,
            shape: self.shape.select(order)?,
        })
    }
}

/// Label order obtained by replacing the `replaced` factors of `shape` with
/// `inserted`, placed where the first replaced factor was.
pub(crate) fn splice_order(
    shape: &SubsystemShape,
    replaced: &[&str],
    inserted: &SubsystemShape,
) -> Vec<String> {
    let first = replaced
        .iter()
        .filter_map(|l| shape.position(l))
        .min()
        .unwrap_or(shape.len());
    let mut order = Vec::new();
    for (p, label) in shape.labels().enumerate() {
        if p == first {
            order.extend(inserted.labels().map(str::to_string));
        }
        if !replaced.contains(&label) {
            order.push(label.to_string());
        }
    }
    if first >= shape.len() {
        order.extend(inserted.labels().map(str::to_string));
    }
    order
}

/// Linear map between labeled spaces, `data` is `output_dim x input_dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledMap {
    data: CMatrix,
    input: SubsystemShape,
    output: SubsystemShape,
}

impl LabeledMap {
    pub fn new(data: CMatrix, input: SubsystemShape, output: SubsystemShape) -> Result<Self> {
        if data.nrows() != output.total_dim() || data.ncols() != input.total_dim() {
            return Err(Error::shape(format!(
                "map is {}x{}, expected {}x{} for {input} -> {output}",
                data.nrows(),
                data.ncols(),
                output.total_dim(),
                input.total_dim()
            )));
        }
        Ok(Self {
            data,
            input,
            output,
        })
    }

    pub fn data(&self) -> &CMatrix {
        &self.data
    }

    pub fn input_shape(&self) -> &SubsystemShape {
        &self.input
    }

    pub fn output_shape(&self) -> &SubsystemShape {
        &self.output
    }

    /// Largest entry of `|V†V - I|`.
    pub fn isometry_residual(&self) -> f64 {
        let g = self.data.adjoint() * &self.data;
        let d = g.nrows();
        (g - CMatrix::identity(d, d))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}
