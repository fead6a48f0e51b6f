// Copyright 2026 oisd-lab Contributors
// SPDX-License-Identifier: Apache-2.0

//! Superoperator calculus: commutator maps `K_A(ρ) = [A, ρ]`, dissipators
//! `D_{B∘C}(ρ) = 2BρC − {CB, ρ}`, their linear combinations, compositions and
//! commutators.
//!
//! Superoperators are immutable expression trees. `apply` works matrix-free;
//! sums of `K`/`D` leaves are flattened once into the form
//! `ρ ↦ Lρ + ρR + sρ + Σ c·BρC`. Dense matrices use column-stacking
//! vectorization, `vec(ρ)[i + j·d] = ρ[i, j]`.

mod identities;

mod sector;

pub use identities::{verify_identity_suite, IdentityReport, IdentityRow, IdentitySuiteConfig, IDENTITY_TAGS};
pub use sector::{sector_evolve, Sector};

use std::fmt;
use std::sync::{Arc, OnceLock};

use ndarray::linalg::kron;
use ndarray::{Array1, Array2};

use crate::error::{invalid, Error, Result};
use crate::hilbert::{Geometry, Operator, TensorSpace};
use crate::numerics::{check_density, DensityReport, ToleranceConfig};
use crate::{re, Mat, C64};

/// Default cap on the operator dimension for dense superoperator matrices.
pub const DENSE_DIM_CAP: usize = 100;

/// Structure of a superoperator node.
#[allow(clippy::large_enum_variant)]
#[derive(Debug)]
pub enum Kind {
    Identity,
    /// `K_A`
    Commutator(Operator),
    /// `D_{B∘C}`; `cb = C·B` is cached.
    Dissipator {
        b: Operator,
        c: Operator,
        cb: Operator,
    },
    Sum(Vec<(C64, SuperOperator)>),
    /// `outer ∘ inner`: `inner` acts first.
    Compose {
        outer: SuperOperator,
        inner: SuperOperator,
    },
}

#[derive(Debug)]
struct Node {
    geometry: Geometry,
    kind: Kind,
    dense: OnceLock<Mat>,
    flat: OnceLock<Option<Flat>>,
}

#[derive(Debug)]
struct Flat {
    left: Option<Operator>,
    right: Option<Operator>,
    scalar: C64,
    sandwiches: Vec<(C64, Operator, Operator)>,
}

/// Linear map on matrices over a fixed geometry.
#[derive(Clone)]
pub struct SuperOperator(Arc<Node>);

impl fmt::Debug for SuperOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SuperOperator").field("geometry", &self.0.geometry).field("kind", &self.0.kind).finish()
    }
}

fn node(geometry: Geometry, kind: Kind) -> SuperOperator {
    SuperOperator(Arc::new(Node { geometry, kind, dense: OnceLock::new(), flat: OnceLock::new() }))
}

/// `K_A`.
pub fn k(a: &Operator) -> SuperOperator {
    node(a.geometry(), Kind::Commutator(a.clone()))
}

/// `D_{B∘C}`.
pub fn d(b: &Operator, c: &Operator) -> Result<SuperOperator> {
    if b.geometry() != c.geometry() {
        return Err(invalid("D", "B and C live on different geometries"));
    }
    let cb = c.mul(b)?;
    Ok(node(b.geometry(), Kind::Dissipator { b: b.clone(), c: c.clone(), cb }))
}

/// Identity superoperator.
pub fn identity(geometry: impl Into<Geometry>) -> SuperOperator {
    node(geometry.into(), Kind::Identity)
}

/// Zero superoperator (empty sum).
pub fn zero(geometry: impl Into<Geometry>) -> SuperOperator {
    node(geometry.into(), Kind::Sum(Vec::new()))
}

/// `Σ cᵢ Sᵢ`.
pub fn combine(terms: &[(C64, &SuperOperator)]) -> Result<SuperOperator> {
    let first = terms.first().ok_or_else(|| invalid("terms", "combination needs at least one term"))?;
    let geometry = first.1.geometry();
    if terms.iter().any(|(_, s)| s.geometry() != geometry) {
        return Err(invalid("terms", "superoperators live on different geometries"));
    }
    Ok(node(geometry, Kind::Sum(terms.iter().map(|(c, s)| (*c, (*s).clone())).collect())))
}

/// `outer ∘ inner`.
pub fn compose(outer: &SuperOperator, inner: &SuperOperator) -> Result<SuperOperator> {
    if outer.geometry() != inner.geometry() {
        return Err(invalid("compose", "superoperators live on different geometries"));
    }
    Ok(node(outer.geometry(), Kind::Compose { outer: outer.clone(), inner: inner.clone() }))
}

/// `[S₁, S₂] = S₁∘S₂ − S₂∘S₁`.
pub fn commutator(s1: &SuperOperator, s2: &SuperOperator) -> Result<SuperOperator> {
    let a = compose(s1, s2)?;
    let b = compose(s2, s1)?;
    combine(&[(re(1.0), &a), (re(-1.0), &b)])
}

/// Column-stacking vectorization.
pub fn vec(x: &Mat) -> Array1<C64> {
    let d = x.nrows();
    Array1::from_shape_fn(x.len(), |k| x[[k % d, k / d]])
}

/// Inverse of [`vec`] for a `d × d` matrix.
pub fn unvec(v: &Array1<C64>, d: usize) -> Result<Mat> {
    if v.len() != d * d {
        return Err(invalid("vec", "length is not dim²"));
    }
    Ok(Array2::from_shape_fn((d, d), |(i, j)| v[i + j * d]))
}

impl SuperOperator {
    pub fn geometry(&self) -> Geometry {
        self.0.geometry
    }

    pub fn dim(&self) -> usize {
        self.0.geometry.dim()
    }

    pub fn kind(&self) -> &Kind {
        &self.0.kind
    }

    pub fn scaled(&self, c: C64) -> SuperOperator {
        node(self.geometry(), Kind::Sum(vec![(c, self.clone())]))
    }

    pub fn add(&self, other: &SuperOperator) -> Result<SuperOperator> {
        combine(&[(re(1.0), self), (re(1.0), other)])
    }

    pub fn sub(&self, other: &SuperOperator) -> Result<SuperOperator> {
        combine(&[(re(1.0), self), (re(-1.0), other)])
    }

    /// Rejects matrices whose shape does not match the geometry.
    pub fn check_state(&self, x: &Mat) -> Result<()> {
        let d = self.dim();
        if x.nrows() != d || x.ncols() != d {
            return Err(invalid(
                "rho",
                format!("{}×{} matrix does not match geometry dimension {d}", x.nrows(), x.ncols()),
            ));
        }
        Ok(())
    }

    /// `S(ρ)`.
    pub fn apply(&self, x: &Mat) -> Result<Mat> {
        self.check_state(x)?;
        Ok(self.apply_unchecked(x))
    }

    /// `S(ρ)` without the shape check.
    pub fn apply_unchecked(&self, x: &Mat) -> Mat {
        if let Some(flat) = self.flat() {
            return flat.apply(x);
        }
        match &self.0.kind {
            Kind::Sum(terms) => {
                let mut out = Array2::zeros(x.raw_dim());
                for (c, s) in terms {
                    out.scaled_add(*c, &s.apply_unchecked(x));
                }
                out
            }
            Kind::Compose { outer, inner } => outer.apply_unchecked(&inner.apply_unchecked(x)),
            _ => unreachable!("leaves always flatten"),
        }
    }

    fn flat(&self) -> Option<&Flat> {
        self.0
            .flat
            .get_or_init(|| {
                let mut acc = FlatBuilder::default();
                acc.push(self, re(1.0)).then(|| acc.finish(self.geometry()))
            })
            .as_ref()
    }

    /// Dense matrix on the vectorized space, capped at operator dimension
    /// [`DENSE_DIM_CAP`].
    pub fn to_matrix(&self) -> Result<Mat> {
        self.to_matrix_capped(DENSE_DIM_CAP)
    }

    pub fn to_matrix_capped(&self, cap: usize) -> Result<Mat> {
        let d = self.dim();
        if d > cap {
            return Err(Error::ResourceLimit(format!("dense superoperator of dimension {d}² exceeds the cap {cap}²")));
        }
        if let Some(m) = self.0.dense.get() {
            return Ok(m.clone());
        }
        let m = self.build_dense(cap)?;
        Ok(self.0.dense.get_or_init(|| m).clone())
    }

    fn build_dense(&self, cap: usize) -> Result<Mat> {
        let d = self.dim();
        let eye: Mat = Array2::eye(d);
        Ok(match &self.0.kind {
            Kind::Identity => Array2::eye(d * d),
            Kind::Commutator(a) => kron(&eye, a.matrix()) - kron(&a.matrix().t().to_owned(), &eye),
            Kind::Dissipator { b, c, cb } => {
                kron(&c.matrix().t().to_owned(), b.matrix()) * re(2.0)
                    - kron(&eye, cb.matrix())
                    - kron(&cb.matrix().t().to_owned(), &eye)
            }
            Kind::Sum(terms) => {
                let mut out = Array2::zeros((d * d, d * d));
                for (c, s) in terms {
                    out.scaled_add(*c, &s.to_matrix_capped(cap)?);
                }
                out
            }
            Kind::Compose { outer, inner } => outer.to_matrix_capped(cap)?.dot(&inner.to_matrix_capped(cap)?),
        })
    }
}

#[derive(Default)]
struct FlatBuilder {
    left: Option<Mat>,
    right: Option<Mat>,
    scalar: C64,
    sandwiches: Vec<(C64, Operator, Operator)>,
}

fn accumulate(slot: &mut Option<Mat>, c: C64, x: &Mat) {
    match slot {
        Some(m) => m.scaled_add(c, x),
        None => *slot = Some(x.mapv(|z| z * c)),
    }
}

impl FlatBuilder {
    /// Returns `false` when the tree contains a composition.
    fn push(&mut self, s: &SuperOperator, coef: C64) -> bool {
        match s.kind() {
            Kind::Identity => {
                self.scalar += coef;
                true
            }
            Kind::Commutator(a) => {
                accumulate(&mut self.left, coef, a.matrix());
                accumulate(&mut self.right, -coef, a.matrix());
                true
            }
            Kind::Dissipator { b, c, cb } => {
                accumulate(&mut self.left, -coef, cb.matrix());
                accumulate(&mut self.right, -coef, cb.matrix());
                match self.sandwiches.iter_mut().find(|(_, bb, cc)| bb == b && cc == c) {
                    Some(entry) => entry.0 += coef * 2.0,
                    None => self.sandwiches.push((coef * 2.0, b.clone(), c.clone())),
                }
                true
            }
            Kind::Sum(terms) => terms.iter().all(|(c, t)| self.push(t, coef * c)),
            Kind::Compose { .. } => false,
        }
    }

    fn finish(self, geometry: Geometry) -> Flat {
        let wrap = |m: Option<Mat>| {
            m.filter(|m| m.iter().any(|z| *z != C64::default()))
                .map(|m| Operator::new(geometry, m).expect("dimension checked at construction"))
        };
        Flat {
            left: wrap(self.left),
            right: wrap(self.right),
            scalar: self.scalar,
            sandwiches: self.sandwiches.into_iter().filter(|(c, _, _)| *c != C64::default()).collect(),
        }
    }
}

impl Flat {
    fn apply(&self, x: &Mat) -> Mat {
        let mut out = match &self.left {
            Some(l) => l.left_mul(x),
            None => Array2::zeros(x.raw_dim()),
        };
        if let Some(r) = &self.right {
            out += &r.right_mul(x);
        }
        if self.scalar != C64::default() {
            out.scaled_add(self.scalar, x);
        }
        for (c, b, cc) in &self.sandwiches {
            out.scaled_add(*c, &cc.right_mul(&b.left_mul(x)));
        }
        out
    }
}

/// Validated density matrix: Hermitian, unit trace, positive semidefinite
/// within the configured tolerances.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    geometry: Geometry,
    entries: Mat,
}

impl DensityMatrix {
    pub fn new(geometry: impl Into<Geometry>, entries: Mat, tol: &ToleranceConfig) -> Result<Self> {
        let geometry = geometry.into();
        let d = geometry.dim();
        if entries.nrows() != d || entries.ncols() != d {
            return Err(invalid("rho", "matrix does not match the geometry"));
        }
        let report = check_density(&entries, tol);
        if !report.passed {
            return Err(invalid(
                "rho",
                format!(
                    "not a density matrix: hermiticity {:.3e}, trace {:.3e}, min eigenvalue {:.3e}",
                    report.hermiticity_defect, report.trace_defect, report.min_eigenvalue
                ),
            ));
        }
        Ok(Self { geometry, entries })
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn entries(&self) -> &Mat {
        &self.entries
    }

    pub fn into_entries(self) -> Mat {
        self.entries
    }

    pub fn report(&self, tol: &ToleranceConfig) -> DensityReport {
        check_density(&self.entries, tol)
    }
}

/// The building blocks of the OISD Liouvillian on `G ⊗ F` with bath
/// parameter `J`.
#[derive(Debug, Clone)]
pub struct OisdBlocks {
    /// `K_M`
    pub k_sp: SuperOperator,
    /// `K_N`
    pub k_ph: SuperOperator,
    /// `K_{l₋a†}`
    pub k_mp: SuperOperator,
    /// `K_{l₊a}`
    pub k_pm: SuperOperator,
    /// `(J+1) D_{l₋∘l₊} + J D_{l₊∘l₋}`
    pub d_sp: SuperOperator,
    /// `(J+1) D_{a∘a†} + J D_{a†∘a}`
    pub d_ph: SuperOperator,
    /// `(J+1) D_{l₋∘a†} + J D_{a†∘l₋}`
    pub d_mp: SuperOperator,
    /// `(J+1) D_{a∘l₊} + J D_{l₊∘a}`
    pub d_pm: SuperOperator,
}

fn thermal_pair(x: &Operator, y: &Operator, j: f64) -> Result<SuperOperator> {
    let first = d(x, y)?;
    let second = d(y, x)?;
    combine(&[(re(j + 1.0), &first), (re(j), &second)])
}

impl OisdBlocks {
    pub fn new(space: &TensorSpace, j: f64) -> Result<Self> {
        if !(j >= 0.0 && j.is_finite()) {
            return Err(invalid("J", "bath parameter must be finite and non-negative"));
        }
        let lm_ad = space.l_minus.mul(&space.adag)?;
        let lp_a = space.l_plus.mul(&space.a)?;
        Ok(Self {
            k_sp: k(&space.m),
            k_ph: k(&space.n),
            k_mp: k(&lm_ad),
            k_pm: k(&lp_a),
            d_sp: thermal_pair(&space.l_minus, &space.l_plus, j)?,
            d_ph: thermal_pair(&space.a, &space.adag, j)?,
            d_mp: {
                let first = d(&space.l_minus, &space.adag)?;
                let second = d(&space.adag, &space.l_minus)?;
                combine(&[(re(j + 1.0), &first), (re(j), &second)])?
            },
            d_pm: {
                let first = d(&space.a, &space.l_plus)?;
                let second = d(&space.l_plus, &space.a)?;
                combine(&[(re(j + 1.0), &first), (re(j), &second)])?
            },
        })
    }
}
