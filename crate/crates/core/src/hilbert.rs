// Copyright 2026 oisd-lab Contributors
// SPDX-License-Identifier: Apache-2.0

//! Truncated Fock and spin spaces, their canonical operators, tensor
//! embeddings, interior projectors and partial traces.
//!
//! Basis conventions:
//! - Fock: `|0⟩ … |cutoff⟩`, index = occupation number.
//! - Spin: `|−h) … |h)`, index = `m + h`.
//! - Tensor `H = G ⊗ F`: spin-major, flat index = `spin_index · dim(F) + fock_index`.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use ndarray::{s, Array2};

use crate::error::{invalid, Error, Result};
use crate::{re, Mat, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FockGeometry {
    cutoff: usize,
}

impl FockGeometry {
    pub fn new(cutoff: usize) -> Result<Self> {
        if cutoff < 1 {
            return Err(invalid("fock_cutoff", "cutoff must be at least 1"));
        }
        Ok(Self { cutoff })
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.cutoff + 1
    }
}

/// Truncation scheme for the infinite-component spin.
///
/// `Hard` keeps `[M, l±] = ±l±` and sends the escaping boundary to zero;
/// `Cyclic` wraps the shift so that `l₊l₋ = l₋l₊ = 1` exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum SpinScheme {
    #[default]
    Hard,
    Cyclic,
}

impl fmt::Display for SpinScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpinScheme::Hard => f.write_str("hard"),
            SpinScheme::Cyclic => f.write_str("cyclic"),
        }
    }
}

impl FromStr for SpinScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "hard" => Ok(SpinScheme::Hard),
            "cyclic" => Ok(SpinScheme::Cyclic),
            other => Err(invalid("scheme", format!("unknown spin scheme `{other}` (hard|cyclic)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SpinGeometry {
    halfwidth: usize,
    scheme: SpinScheme,
}

impl SpinGeometry {
    pub fn new(halfwidth: usize, scheme: SpinScheme) -> Result<Self> {
        if halfwidth < 1 {
            return Err(invalid("spin_halfwidth", "halfwidth must be at least 1"));
        }
        Ok(Self { halfwidth, scheme })
    }

    pub fn halfwidth(&self) -> usize {
        self.halfwidth
    }

    pub fn scheme(&self) -> SpinScheme {
        self.scheme
    }

    pub fn dim(&self) -> usize {
        2 * self.halfwidth + 1
    }

    /// Basis index of the eigenvalue `m` of `M`, if it lies in the truncation.
    pub fn index(&self, m: i64) -> Option<usize> {
        let h = self.halfwidth as i64;
        (-h..=h).contains(&m).then(|| (m + h) as usize)
    }

    /// Eigenvalue of `M` at basis index `idx`.
    pub fn value(&self, idx: usize) -> i64 {
        idx as i64 - self.halfwidth as i64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TensorGeometry {
    spin: SpinGeometry,
    fock: FockGeometry,
}

impl TensorGeometry {
    pub fn new(spin: SpinGeometry, fock: FockGeometry) -> Self {
        Self { spin, fock }
    }

    pub fn spin(&self) -> SpinGeometry {
        self.spin
    }

    pub fn fock(&self) -> FockGeometry {
        self.fock
    }

    pub fn dim(&self) -> usize {
        self.spin.dim() * self.fock.dim()
    }

    /// The single index map of the tensor basis.
    #[inline]
    pub fn index(&self, spin_idx: usize, fock_idx: usize) -> usize {
        spin_idx * self.fock.dim() + fock_idx
    }

    /// Inverse of [`TensorGeometry::index`].
    #[inline]
    pub fn split(&self, idx: usize) -> (usize, usize) {
        (idx / self.fock.dim(), idx % self.fock.dim())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Geometry {
    Fock(FockGeometry),
    Spin(SpinGeometry),
    Tensor(TensorGeometry),
}

impl Geometry {
    pub fn dim(&self) -> usize {
        match self {
            Geometry::Fock(g) => g.dim(),
            Geometry::Spin(g) => g.dim(),
            Geometry::Tensor(g) => g.dim(),
        }
    }

    pub fn as_tensor(&self) -> Result<TensorGeometry> {
        match self {
            Geometry::Tensor(g) => Ok(*g),
            _ => Err(invalid("geometry", "a tensor-product geometry is required")),
        }
    }
}

impl From<FockGeometry> for Geometry {
    fn from(g: FockGeometry) -> Self {
        Geometry::Fock(g)
    }
}

impl From<SpinGeometry> for Geometry {
    fn from(g: SpinGeometry) -> Self {
        Geometry::Spin(g)
    }
}

impl From<TensorGeometry> for Geometry {
    fn from(g: TensorGeometry) -> Self {
        Geometry::Tensor(g)
    }
}

/// Row-wise nonzero structure used to skip zeros in products.
#[derive(Debug, Clone)]
enum Pattern {
    Dense,
    Sparse(Vec<Vec<(usize, C64)>>),
}

/// Square complex matrix tagged with the geometry it acts on.
#[derive(Debug, Clone)]
pub struct Operator {
    geometry: Geometry,
    matrix: Mat,
    pattern: OnceLock<Pattern>,
}

impl PartialEq for Operator {
    fn eq(&self, other: &Self) -> bool {
        self.geometry == other.geometry && self.matrix == other.matrix
    }
}

impl Operator {
    pub fn new(geometry: impl Into<Geometry>, matrix: Mat) -> Result<Self> {
        let geometry = geometry.into();
        let d = geometry.dim();
        if matrix.nrows() != matrix.ncols() {
            return Err(invalid("operator", "matrix must be square"));
        }
        if matrix.nrows() != d {
            return Err(invalid(
                "operator",
                format!("matrix dimension {} does not match geometry dimension {d}", matrix.nrows()),
            ));
        }
        Ok(Self::from_parts(geometry, matrix))
    }

    fn from_parts(geometry: Geometry, matrix: Mat) -> Self {
        let matrix = if matrix.is_standard_layout() { matrix } else { matrix.as_standard_layout().into_owned() };
        Self { geometry, matrix, pattern: OnceLock::new() }
    }

    pub fn identity(geometry: impl Into<Geometry>) -> Self {
        let geometry = geometry.into();
        let d = geometry.dim();
        Self::from_parts(geometry, Array2::eye(d))
    }

    pub fn zeros(geometry: impl Into<Geometry>) -> Self {
        let geometry = geometry.into();
        let d = geometry.dim();
        Self::from_parts(geometry, Array2::zeros((d, d)))
    }

    pub fn diagonal(geometry: impl Into<Geometry>, diag: impl IntoIterator<Item = C64>) -> Result<Self> {
        let geometry = geometry.into();
        let d = geometry.dim();
        let diag: Vec<C64> = diag.into_iter().collect();
        if diag.len() != d {
            return Err(invalid("operator", "diagonal length does not match geometry"));
        }
        let mut m = Array2::zeros((d, d));
        for (i, v) in diag.into_iter().enumerate() {
            m[[i, i]] = v;
        }
        Ok(Self::from_parts(geometry, m))
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &Mat {
        &self.matrix
    }

    pub fn into_matrix(self) -> Mat {
        self.matrix
    }

    fn check_same(&self, other: &Operator) -> Result<()> {
        if self.geometry != other.geometry {
            return Err(invalid("operator", "geometry mismatch between operands"));
        }
        Ok(())
    }

    pub fn adjoint(&self) -> Operator {
        Self::from_parts(self.geometry, self.matrix.t().mapv(|z| z.conj()))
    }

    pub fn transpose(&self) -> Operator {
        Self::from_parts(self.geometry, self.matrix.t().to_owned())
    }

    pub fn scaled(&self, c: C64) -> Operator {
        Self::from_parts(self.geometry, self.matrix.mapv(|z| z * c))
    }

    pub fn add(&self, other: &Operator) -> Result<Operator> {
        self.check_same(other)?;
        Ok(Self::from_parts(self.geometry, &self.matrix + &other.matrix))
    }

    pub fn sub(&self, other: &Operator) -> Result<Operator> {
        self.check_same(other)?;
        Ok(Self::from_parts(self.geometry, &self.matrix - &other.matrix))
    }

    /// Operator product `self · other`.
    pub fn mul(&self, other: &Operator) -> Result<Operator> {
        self.check_same(other)?;
        Ok(Self::from_parts(self.geometry, self.left_mul(&other.matrix)))
    }

    /// `[self, other]`.
    pub fn commutator(&self, other: &Operator) -> Result<Operator> {
        Ok(Self::from_parts(self.geometry, self.mul(other)?.matrix - other.mul(self)?.matrix))
    }

    /// `{self, other}`.
    pub fn anticommutator(&self, other: &Operator) -> Result<Operator> {
        Ok(Self::from_parts(self.geometry, self.mul(other)?.matrix + other.mul(self)?.matrix))
    }

    /// Number of nonzero entries.
    pub fn nnz(&self) -> usize {
        self.matrix.iter().filter(|z| **z != C64::default()).count()
    }

    fn pattern(&self) -> &Pattern {
        self.pattern.get_or_init(|| {
            let d = self.dim();
            if self.nnz() * 4 > d * d || d < 4 {
                return Pattern::Dense;
            }
            let rows = self
                .matrix
                .outer_iter()
                .map(|row| {
                    row.iter().enumerate().filter(|(_, z)| **z != C64::default()).map(|(j, z)| (j, *z)).collect()
                })
                .collect();
            Pattern::Sparse(rows)
        })
    }

    /// `self · x`, skipping structural zeros of `self`.
    pub fn left_mul(&self, x: &Mat) -> Mat {
        match self.pattern() {
            Pattern::Dense => self.matrix.dot(x),
            Pattern::Sparse(rows) => {
                let mut out = Array2::zeros((self.dim(), x.ncols()));
                for (i, row) in rows.iter().enumerate() {
                    let mut orow = out.row_mut(i);
                    for &(k, v) in row {
                        orow.scaled_add(v, &x.row(k));
                    }
                }
                out
            }
        }
    }

    /// `x · self`, skipping structural zeros of `self`.
    pub fn right_mul(&self, x: &Mat) -> Mat {
        match self.pattern() {
            Pattern::Dense => x.dot(&self.matrix),
            Pattern::Sparse(rows) => {
                let x = x.as_standard_layout();
                let mut out = Array2::<C64>::zeros((x.nrows(), self.dim()));
                let zero = C64::default();
                for (xrow, mut orow) in x.outer_iter().zip(out.outer_iter_mut()) {
                    let o = orow.as_slice_mut().expect("standard layout");
                    for (k, &xv) in xrow.iter().enumerate() {
                        if xv == zero {
                            continue;
                        }
                        for &(j, v) in &rows[k] {
                            o[j] += xv * v;
                        }
                    }
                }
                out
            }
        }
    }
}

/// Canonical operators of a truncated Fock space.
#[derive(Debug, Clone)]
pub struct FockSpace {
    pub geometry: FockGeometry,
    pub a: Operator,
    pub adag: Operator,
    pub n: Operator,
}

/// Canonical operators of a truncated infinite-component spin.
#[derive(Debug, Clone)]
pub struct SpinSpace {
    pub geometry: SpinGeometry,
    pub l_plus: Operator,
    pub l_minus: Operator,
    pub m: Operator,
}

/// Builds `a`, `a†` and `N = a†a` on `|0⟩…|cutoff⟩`.
pub fn build_fock(cutoff: usize) -> Result<FockSpace> {
    let geometry = FockGeometry::new(cutoff)?;
    let d = geometry.dim();
    let mut a = Array2::zeros((d, d));
    for n in 1..d {
        a[[n - 1, n]] = re((n as f64).sqrt());
    }
    let a = Operator::new(geometry, a)?;
    let adag = a.adjoint();
    let n = Operator::diagonal(geometry, (0..d).map(|k| re(k as f64)))?;
    Ok(FockSpace { geometry, a, adag, n })
}

/// Builds `l₊`, `l₋ = l₊†` and `M` on `|−h)…|h)`.
pub fn build_spin(halfwidth: usize, scheme: SpinScheme) -> Result<SpinSpace> {
    let geometry = SpinGeometry::new(halfwidth, scheme)?;
    let d = geometry.dim();
    let mut lp = Array2::zeros((d, d));
    for i in 0..d - 1 {
        lp[[i + 1, i]] = re(1.0);
    }
    if scheme == SpinScheme::Cyclic {
        lp[[0, d - 1]] = re(1.0);
    }
    let l_plus = Operator::new(geometry, lp)?;
    let l_minus = l_plus.adjoint();
    let m = Operator::diagonal(geometry, (0..d).map(|i| re(geometry.value(i) as f64)))?;
    Ok(SpinSpace { geometry, l_plus, l_minus, m })
}

/// Kronecker embedding `spin_op ⊗ fock_op`; `None` stands for the identity factor.
pub fn tensor_embed(spin_op: Option<&Operator>, fock_op: Option<&Operator>, geo: TensorGeometry) -> Result<Operator> {
    let ds = geo.spin().dim();
    let df = geo.fock().dim();
    let s = match spin_op {
        Some(op) if op.dim() != ds => return Err(invalid("spin_op", "dimension does not match the spin factor")),
        Some(op) => op.matrix().clone(),
        None => Array2::eye(ds),
    };
    let f = match fock_op {
        Some(op) if op.dim() != df => return Err(invalid("fock_op", "dimension does not match the Fock factor")),
        Some(op) => op.matrix().clone(),
        None => Array2::eye(df),
    };
    Operator::new(geo, ndarray::linalg::kron(&s, &f))
}

/// Per-basis-vector interior membership; see [`interior_projector`].
pub fn interior_mask(geo: Geometry, margin_spin: usize, margin_fock: usize) -> Result<Vec<bool>> {
    let fock_ok = |g: &FockGeometry| -> Result<Vec<bool>> {
        if margin_fock >= g.cutoff() && margin_fock > 0 {
            return Err(invalid("margin_fock", "margin must be smaller than the Fock cutoff"));
        }
        Ok((0..g.dim()).map(|n| n + margin_fock <= g.cutoff()).collect())
    };
    let spin_ok = |g: &SpinGeometry| -> Result<Vec<bool>> {
        if margin_spin >= g.halfwidth() && margin_spin > 0 {
            return Err(invalid("margin_spin", "margin must be smaller than the spin halfwidth"));
        }
        let lim = (g.halfwidth() - margin_spin) as i64;
        Ok((0..g.dim()).map(|i| g.value(i).abs() <= lim).collect())
    };
    match geo {
        Geometry::Fock(g) => fock_ok(&g),
        Geometry::Spin(g) => spin_ok(&g),
        Geometry::Tensor(g) => {
            let sm = spin_ok(&g.spin())?;
            let fm = fock_ok(&g.fock())?;
            Ok(sm.iter().flat_map(|&s| fm.iter().map(move |&f| s && f)).collect())
        }
    }
}

/// Orthogonal projector onto basis vectors at distance at least the margin
/// from every truncation boundary (Fock: from the cutoff; spin: from `±h`).
pub fn interior_projector(geo: Geometry, margin_spin: usize, margin_fock: usize) -> Result<Operator> {
    let mask = interior_mask(geo, margin_spin, margin_fock)?;
    Operator::diagonal(geo, mask.into_iter().map(|b| re(if b { 1.0 } else { 0.0 })))
}

/// `P X P` for a diagonal 0/1 projector given as a mask.
pub fn project(mask: &[bool], x: &Mat) -> Mat {
    let mut out = x.clone();
    for ((i, j), z) in out.indexed_iter_mut() {
        if !(mask[i] && mask[j]) {
            *z = C64::default();
        }
    }
    out
}

fn check_tensor_matrix(geo: &TensorGeometry, x: &Mat) -> Result<()> {
    if x.nrows() != geo.dim() || x.ncols() != geo.dim() {
        return Err(invalid("rho", "matrix does not live on the tensor geometry"));
    }
    Ok(())
}

/// `Tr_F`: traces out the Fock factor.
pub fn partial_trace_fock(geo: &TensorGeometry, x: &Mat) -> Result<Mat> {
    check_tensor_matrix(geo, x)?;
    let ds = geo.spin().dim();
    let df = geo.fock().dim();
    Ok(Array2::from_shape_fn((ds, ds), |(i, j)| (0..df).map(|k| x[[geo.index(i, k), geo.index(j, k)]]).sum()))
}

/// `Tr_G`: traces out the spin factor.
pub fn partial_trace_spin(geo: &TensorGeometry, x: &Mat) -> Result<Mat> {
    check_tensor_matrix(geo, x)?;
    let ds = geo.spin().dim();
    let df = geo.fock().dim();
    let mut out = Array2::zeros((df, df));
    for i in 0..ds {
        let b = geo.index(i, 0);
        out += &x.slice(s![b..b + df, b..b + df]);
    }
    Ok(out)
}

/// Applies a linear map of the Fock factor, `(1 ⊗ Φ)(X)`, block by block.
pub fn map_fock_factor(geo: &TensorGeometry, x: &Mat, mut f: impl FnMut(&Mat) -> Mat) -> Mat {
    let ds = geo.spin().dim();
    let df = geo.fock().dim();
    let mut out = Array2::zeros(x.raw_dim());
    for i in 0..ds {
        for j in 0..ds {
            let (bi, bj) = (geo.index(i, 0), geo.index(j, 0));
            let block = x.slice(s![bi..bi + df, bj..bj + df]).to_owned();
            if block.iter().all(|z| *z == C64::default()) {
                continue;
            }
            out.slice_mut(s![bi..bi + df, bj..bj + df]).assign(&f(&block));
        }
    }
    out
}

/// Applies a linear map of the spin factor, `(Φ ⊗ 1)(X)`, fiber by fiber.
pub fn map_spin_factor(geo: &TensorGeometry, x: &Mat, mut f: impl FnMut(&Mat) -> Mat) -> Mat {
    let ds = geo.spin().dim();
    let df = geo.fock().dim();
    let mut out = Array2::zeros(x.raw_dim());
    for k in 0..df {
        for l in 0..df {
            let fiber = Array2::from_shape_fn((ds, ds), |(i, j)| x[[geo.index(i, k), geo.index(j, l)]]);
            if fiber.iter().all(|z| *z == C64::default()) {
                continue;
            }
            let y = f(&fiber);
            for ((i, j), v) in y.indexed_iter() {
                out[[geo.index(i, k), geo.index(j, l)]] = *v;
            }
        }
    }
    out
}

/// Canonical operators of `G ⊗ F` embedded in the tensor space.
#[derive(Debug, Clone)]
pub struct TensorSpace {
    pub geometry: TensorGeometry,
    pub fock: FockSpace,
    pub spin: SpinSpace,
    /// `1 ⊗ a`
    pub a: Operator,
    /// `1 ⊗ a†`
    pub adag: Operator,
    /// `1 ⊗ N`
    pub n: Operator,
    /// `l₊ ⊗ 1`
    pub l_plus: Operator,
    /// `l₋ ⊗ 1`
    pub l_minus: Operator,
    /// `M ⊗ 1`
    pub m: Operator,
}

impl TensorSpace {
    pub fn new(halfwidth: usize, scheme: SpinScheme, cutoff: usize) -> Result<Self> {
        let fock = build_fock(cutoff)?;
        let spin = build_spin(halfwidth, scheme)?;
        let geometry = TensorGeometry::new(spin.geometry, fock.geometry);
        Ok(Self {
            a: tensor_embed(None, Some(&fock.a), geometry)?,
            adag: tensor_embed(None, Some(&fock.adag), geometry)?,
            n: tensor_embed(None, Some(&fock.n), geometry)?,
            l_plus: tensor_embed(Some(&spin.l_plus), None, geometry)?,
            l_minus: tensor_embed(Some(&spin.l_minus), None, geometry)?,
            m: tensor_embed(Some(&spin.m), None, geometry)?,
            geometry,
            fock,
            spin,
        })
    }

    pub fn dim(&self) -> usize {
        self.geometry.dim()
    }

    /// Spin eigenvalue `m` and occupation `n` of a flat tensor index.
    pub fn labels(&self, idx: usize) -> (i64, usize) {
        let (s, f) = self.geometry.split(idx);
        (self.geometry.spin().value(s), f)
    }
}
