//! Finite-dimensional *-algebra machinery: commutants, generated algebras,
//! fixed-point algebras, subspace lattice operations, and Wedderburn
//! structure extraction.
//!
//! Subspaces of M_d are represented by Hilbert–Schmidt-orthonormal bases.
//! The Wedderburn decomposition presents a *-closed, multiplicatively closed
//! subspace as ⊕_k M_{n_k} ⊗ I_{m_k} after a unitary change of basis; the
//! minimal central projections come from spectral projections of a generic
//! self-adjoint central element, and the multiplicity structure from a
//! generic element of the commutant restricted to each central block.

use num_complex::Complex;
use num_traits::One;

use crate::channel::Superoperator;
use crate::linalg::{eigh, hs_inner, null_space_scaled, orthonormalize, svd, CMatrix, Tolerance};
use crate::{Error, Real, Result, C};

/// An HS-orthonormal basis of a subspace of M_d.
#[derive(Clone)]
pub struct OperatorSubspace<T> {
    dim_ambient: usize,
    basis: Vec<CMatrix<T>>,
    warnings: Vec<String>,
}

impl<T: Real> OperatorSubspace<T> {
    /// Orthonormalises the span of `mats` inside M_d.
    pub fn from_span(d: usize, mats: &[CMatrix<T>], tol: &Tolerance<T>) -> Result<Self> {
        for m in mats {
            if !m.is_square() || m.rows() != d {
                return Err(Error::Shape("subspace elements must be d×d".into()));
            }
        }
        let (basis, borderline) = orthonormalize(mats, tol)?;
        let mut warnings = Vec::new();
        if borderline {
            warnings.push("borderline rank decision while orthonormalising".into());
        }
        Ok(Self { dim_ambient: d, basis, warnings })
    }

    /// Wraps a basis that is already HS-orthonormal (validated).
    pub fn from_orthonormal(d: usize, basis: Vec<CMatrix<T>>, tol: &Tolerance<T>) -> Result<Self> {
        for (i, a) in basis.iter().enumerate() {
            for (j, b) in basis.iter().enumerate() {
                let g = hs_inner(a, b)?;
                let expect = if i == j { T::one() } else { T::zero() };
                if (g - Complex::new(expect, T::zero())).norm() > tol.residual_eps {
                    return Err(Error::Numeric("basis is not HS-orthonormal".into()));
                }
            }
        }
        Ok(Self { dim_ambient: d, basis, warnings: Vec::new() })
    }

    /// The full matrix algebra M_d (matrix units are HS-orthonormal).
    pub fn full(d: usize) -> Self {
        let mut basis = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                let mut e = CMatrix::zeros(d, d);
                e[(i, j)] = Complex::one();
                basis.push(e);
            }
        }
        Self { dim_ambient: d, basis, warnings: Vec::new() }
    }

    /// The scalars C·I.
    pub fn trivial(d: usize) -> Self {
        let s = T::one() / T::from_usize(d).unwrap().sqrt();
        Self {
            dim_ambient: d,
            basis: vec![CMatrix::identity(d).scale_re(s)],
            warnings: Vec::new(),
        }
    }

    pub fn zero(d: usize) -> Self {
        Self { dim_ambient: d, basis: Vec::new(), warnings: Vec::new() }
    }

    pub fn dim_ambient(&self) -> usize {
        self.dim_ambient
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[CMatrix<T>] {
        &self.basis
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn push_warning(&mut self, w: String) {
        self.warnings.push(w);
    }

    /// Orthogonal projection of x onto the subspace.
    pub fn project(&self, x: &CMatrix<T>) -> CMatrix<T> {
        let mut out = CMatrix::zeros(self.dim_ambient, self.dim_ambient);
        for b in &self.basis {
            let c = hs_inner(x, b).expect("shapes validated");
            out = &out + &b.scale(c);
        }
        out
    }

    /// ‖x − P(x)‖, distance of x from the subspace.
    pub fn residual(&self, x: &CMatrix<T>) -> T {
        (x - &self.project(x)).hs_norm()
    }

    pub fn contains(&self, x: &CMatrix<T>, tol: &Tolerance<T>) -> bool {
        self.residual(x) <= tol.residual_eps * x.hs_norm().max(T::one())
    }

    /// Span equality: dimensions agree and every basis element of `self`
    /// projects onto `other` with negligible residual.
    pub fn equals(&self, other: &Self, tol: &Tolerance<T>) -> bool {
        if self.dim_ambient != other.dim_ambient || self.dimension() != other.dimension() {
            return false;
        }
        self.basis
            .iter()
            .all(|b| other.residual(b) <= tol.residual_eps)
    }

    /// Worst span-equality residual, for reporting.
    pub fn equality_residual(&self, other: &Self) -> T {
        self.basis
            .iter()
            .map(|b| other.residual(b))
            .fold(T::zero(), |a, b| a.max(b))
    }

    /// d²×m matrix whose columns are the vectorised basis elements.
    pub fn stacked_columns(&self) -> CMatrix<T> {
        let d2 = self.dim_ambient * self.dim_ambient;
        CMatrix::from_fn(d2, self.basis.len(), |i, j| {
            let d = self.dim_ambient;
            self.basis[j][(i % d, i / d)]
        })
    }

    /// Worst residual of products b_i·b_j against the span.
    pub fn closure_defect(&self) -> T {
        let mut worst = T::zero();
        for a in &self.basis {
            for b in &self.basis {
                worst = worst.max(self.residual(&(a * b)));
            }
        }
        worst
    }

    /// Worst residual of adjoints b_i* against the span.
    pub fn star_defect(&self) -> T {
        self.basis
            .iter()
            .map(|b| self.residual(&b.adjoint()))
            .fold(T::zero(), |a, b| a.max(b))
    }

    pub fn is_mult_closed(&self, tol: &Tolerance<T>) -> bool {
        let d = T::from_usize(self.dim_ambient).unwrap().sqrt();
        self.closure_defect() <= tol.residual_eps * d.max(T::one())
    }

    pub fn is_star_closed(&self, tol: &Tolerance<T>) -> bool {
        self.star_defect() <= tol.residual_eps
    }

    /// Worst pairwise commutator norm among basis elements.
    pub fn commutator_defect(&self) -> T {
        let mut worst = T::zero();
        for a in &self.basis {
            for b in &self.basis {
                worst = worst.max((&(a * b) - &(b * a)).hs_norm());
            }
        }
        worst
    }
}

impl<T: Real> std::fmt::Debug for OperatorSubspace<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "OperatorSubspace {{ ambient: M_{}, dimension: {} }}",
            self.dim_ambient,
            self.basis.len()
        )
    }
}

/// Commutant of a generator set: `{x : x·g = g·x for g in gens ∪ gens*}`.
///
/// The generator list is symmetrised with adjoints so the result is always a
/// *-algebra. The empty set commutes with everything.
pub fn commutant<T: Real>(
    d: usize,
    gens: &[CMatrix<T>],
    tol: &Tolerance<T>,
) -> Result<OperatorSubspace<T>> {
    if gens.is_empty() {
        return Ok(OperatorSubspace::full(d));
    }
    for g in gens {
        if !g.is_square() || g.rows() != d {
            return Err(Error::Shape("commutant generators must be d×d".into()));
        }
    }
    // drop generators that are roundoff-level relative to the largest one
    // (e.g. products of exactly orthogonal Kraus operators), then normalise;
    // a scalar inflated out of noise would otherwise poison the kernel
    let max_norm = gens
        .iter()
        .map(|g| g.hs_norm())
        .fold(T::zero(), |a, b| a.max(b));
    let gen_floor = max_norm * T::epsilon() * T::from_f64(1e3).unwrap();
    let mut sym: Vec<CMatrix<T>> = Vec::with_capacity(gens.len() * 2);
    for g in gens {
        let norm = g.hs_norm();
        if norm <= gen_floor || norm == T::zero() {
            continue;
        }
        let gn = g.scale_re(T::one() / norm);
        sym.push(gn.adjoint());
        sym.push(gn);
    }
    let d2 = d * d;
    let id = CMatrix::identity(d);
    // stack the maps x ↦ x·g − g·x = (gᵀ⊗I − I⊗g)·vec(x); generators are
    // normalised, and scalar ones (commutation map ≈ 0) are dropped so
    // roundoff cannot masquerade as rank
    let drop_level = T::epsilon()
        * T::from_usize(d).unwrap().sqrt()
        * T::from_f64(1e3).unwrap();
    let mut blocks = Vec::new();
    for g in &sym {
        let block = &g.transpose().kron(&id) - &id.kron(g);
        if block.hs_norm() > drop_level {
            blocks.push(block);
        }
    }
    if blocks.is_empty() {
        return Ok(OperatorSubspace::full(d));
    }
    let mut stack = CMatrix::zeros(d2 * blocks.len(), d2);
    for (k, block) in blocks.iter().enumerate() {
        for i in 0..d2 {
            for j in 0..d2 {
                stack[(k * d2 + i, j)] = block[(i, j)];
            }
        }
    }
    let ns = null_space_scaled(&stack, tol, T::one());
    let basis: Vec<CMatrix<T>> = ns.basis.iter().map(|v| CMatrix::unvectorize(d, v)).collect();
    let mut out = OperatorSubspace { dim_ambient: d, basis, warnings: Vec::new() };
    if ns.borderline {
        out.warnings.push("borderline rank in commutant kernel".into());
    }
    Ok(out)
}

/// Smallest subspace containing `gens` (plus I when `unital`) closed under
/// multiplication and adjoints, by closure iteration.
pub fn generated_algebra<T: Real>(
    d: usize,
    gens: &[CMatrix<T>],
    unital: bool,
    tol: &Tolerance<T>,
) -> Result<OperatorSubspace<T>> {
    let mut seed: Vec<CMatrix<T>> = gens.to_vec();
    if unital {
        seed.push(CMatrix::identity(d));
    }
    if seed.is_empty() {
        return Ok(OperatorSubspace::zero(d));
    }
    let (mut basis, _) = orthonormalize(&seed, tol)?;
    for _ in 0..=d * d {
        let mut extended = basis.clone();
        for b in &basis {
            extended.push(b.adjoint());
        }
        for a in &basis {
            for b in &basis {
                extended.push(a * b);
            }
        }
        let (next, _) = orthonormalize(&extended, tol)?;
        if next.len() == basis.len() {
            return Ok(OperatorSubspace { dim_ambient: d, basis: next, warnings: Vec::new() });
        }
        basis = next;
    }
    Err(Error::Numeric(
        "generated_algebra: closure iteration failed to stabilise".into(),
    ))
}

/// Fixed points of a superoperator: unvec of ker(S − I).
///
/// Closure under multiplication is verified, not assumed; a failure is
/// recorded as a warning on the result (for non-unital or non-TP maps the
/// fixed-point set need not be an algebra).
pub fn fixed_point_algebra<T: Real>(
    s: &Superoperator<T>,
    tol: &Tolerance<T>,
) -> OperatorSubspace<T> {
    let d = s.dim();
    let m = s.matrix() - &CMatrix::identity(d * d);
    let ns = null_space_scaled(&m, tol, T::one());
    let basis: Vec<CMatrix<T>> = ns.basis.iter().map(|v| CMatrix::unvectorize(d, v)).collect();
    let mut out = OperatorSubspace { dim_ambient: d, basis, warnings: Vec::new() };
    if ns.borderline {
        out.warnings.push("borderline rank in fixed-point kernel".into());
    }
    if !out.is_mult_closed(tol) {
        out.warnings.push(format!(
            "fixed-point set is not multiplicatively closed (defect {})",
            out.closure_defect()
        ));
    }
    out
}

/// Intersection of two subspaces via the kernel of stacked complement
/// projectors.
pub fn intersect<T: Real>(
    a: &OperatorSubspace<T>,
    b: &OperatorSubspace<T>,
    tol: &Tolerance<T>,
) -> Result<OperatorSubspace<T>> {
    if a.dim_ambient != b.dim_ambient {
        return Err(Error::Shape("intersect: ambient dimension mismatch".into()));
    }
    let d = a.dim_ambient;
    let d2 = d * d;
    let id = CMatrix::identity(d2);
    let ba = a.stacked_columns();
    let bb = b.stacked_columns();
    let pa = &ba * &ba.adjoint();
    let pb = &bb * &bb.adjoint();
    let ca = &id - &pa;
    let cb = &id - &pb;
    let mut stack = CMatrix::zeros(2 * d2, d2);
    for i in 0..d2 {
        for j in 0..d2 {
            stack[(i, j)] = ca[(i, j)];
            stack[(d2 + i, j)] = cb[(i, j)];
        }
    }
    let ns = null_space_scaled(&stack, tol, T::one());
    let basis: Vec<CMatrix<T>> = ns.basis.iter().map(|v| CMatrix::unvectorize(d, v)).collect();
    let mut out = OperatorSubspace { dim_ambient: d, basis, warnings: Vec::new() };
    if ns.borderline {
        out.warnings.push("borderline rank in intersection".into());
    }
    Ok(out)
}

/// Wedderburn data: factor sizes with multiplicities, minimal central
/// projections, and the unitary realising the block-diagonal form
/// ⊕_k (M_{n_k} ⊗ I_{m_k}).
#[derive(Clone)]
pub struct StarAlgebraStructure<T> {
    pub blocks: Vec<(usize, usize)>,
    pub central_projections: Vec<CMatrix<T>>,
    pub basis_change: CMatrix<T>,
    pub unital: bool,
}

const WEDDERBURN_RETRIES: usize = 8;

/// Extracts the Wedderburn decomposition of a *-closed, multiplicatively
/// closed subspace of M_d.
///
/// Generic elements are drawn from a fixed-seed stream and redrawn when a
/// degenerate spectrum is detected, so runs are deterministic.
pub fn wedderburn<T: Real>(
    a: &OperatorSubspace<T>,
    tol: &Tolerance<T>,
) -> Result<StarAlgebraStructure<T>> {
    if a.dimension() == 0 {
        return Err(Error::Precondition("wedderburn: zero subspace".into()));
    }
    if !a.is_star_closed(tol) {
        return Err(Error::Precondition(format!(
            "wedderburn: input is not *-closed (defect {})",
            a.star_defect()
        )));
    }
    if !a.is_mult_closed(tol) {
        return Err(Error::Precondition(format!(
            "wedderburn: input is not multiplicatively closed (defect {})",
            a.closure_defect()
        )));
    }
    let mut last_err = None;
    for attempt in 0..WEDDERBURN_RETRIES {
        let mut stream = 0x5eed_0000_u64 + attempt as u64;
        match try_wedderburn(a, tol, &mut stream) {
            Ok(s) => return Ok(s),
            Err(e) => last_err = Some(e),
        }
    }
    Err(Error::Numeric(format!(
        "wedderburn: degenerate-randomness retry limit exceeded ({})",
        last_err.map(|e| e.to_string()).unwrap_or_default()
    )))
}

fn try_wedderburn<T: Real>(
    a: &OperatorSubspace<T>,
    tol: &Tolerance<T>,
    stream: &mut u64,
) -> Result<StarAlgebraStructure<T>> {
    let d = a.dim_ambient();
    let unit = algebra_unit(a, tol)?;
    let unital = (&unit - &CMatrix::identity(d)).hs_norm() <= tol.residual_eps * T::from_usize(d).unwrap();

    // 1. centre of the algebra
    let center = center_of(a, tol)?;

    // 2. generic self-adjoint central element, shifted to be ≫ 0 on the
    //    algebra's support so that the support complement is the 0-cluster
    let mut z = random_self_adjoint(&center, stream);
    let znorm = z.hs_norm();
    if znorm > T::zero() {
        z = z.scale_re(T::one() / znorm);
    }
    let shift = T::from_f64(4.0).unwrap();
    z = &z + &unit.scale_re(shift);
    let (vals, vecs) = eigh(&z)?;
    let clusters = cluster(&vals, tol)?;

    // 3. blocks from each nonzero cluster
    let mut blocks = Vec::new();
    let mut central_projections = Vec::new();
    let mut columns: Vec<Vec<C<T>>> = Vec::new();
    let mut complement_cols: Vec<Vec<C<T>>> = Vec::new();
    for cl in &clusters {
        let mean = cl.iter().map(|&i| vals[i]).fold(T::zero(), |s, t| s + t)
            / T::from_usize(cl.len()).unwrap();
        if mean.abs() < shift / T::from_f64(2.0).unwrap() {
            // support complement (only present for non-unital algebras)
            for &i in cl {
                complement_cols.push(vecs.col(i));
            }
            continue;
        }
        let q = CMatrix::from_fn(d, cl.len(), |r, c| vecs[(r, cl[c])]);
        let (n_k, m_k, block_cols) = resolve_block(a, &q, tol, stream)?;
        blocks.push((n_k, m_k));
        central_projections.push(&q * &q.adjoint());
        columns.extend(block_cols);
    }
    columns.extend(complement_cols);
    if columns.len() != d {
        return Err(Error::Numeric(format!(
            "wedderburn: assembled {} basis columns for d = {}",
            columns.len(),
            d
        )));
    }
    let u = CMatrix::from_fn(d, d, |i, j| columns[j][i]);
    if u.unitary_residual() > tol.residual_eps * T::from_usize(d).unwrap() {
        return Err(Error::Numeric("wedderburn: basis change is not unitary".into()));
    }

    // 4. structural checks
    let dim_sum: usize = blocks.iter().map(|&(n, _)| n * n).sum();
    if dim_sum != a.dimension() {
        return Err(Error::Numeric(format!(
            "wedderburn: Σ n_k² = {dim_sum} but algebra dimension is {}",
            a.dimension()
        )));
    }
    if unital {
        let support: usize = blocks.iter().map(|&(n, m)| n * m).sum();
        if support != d {
            return Err(Error::Numeric(format!(
                "wedderburn: Σ n_k·m_k = {support} for a unital algebra in M_{d}"
            )));
        }
    }
    let rebuilt = reconstruct_span(&blocks, &u, d, tol)?;
    if !rebuilt.equals(a, tol) || rebuilt.equality_residual(a) > tol.residual_eps {
        return Err(Error::Numeric(
            "wedderburn: reconstructed block algebra does not span the input".into(),
        ));
    }

    // canonical order for reporting
    let mut order: Vec<usize> = (0..blocks.len()).collect();
    order.sort_by_key(|&i| blocks[i]);
    let blocks: Vec<_> = order.iter().map(|&i| blocks[i]).collect();
    let central_projections: Vec<_> = order.iter().map(|&i| central_projections[i].clone()).collect();

    Ok(StarAlgebraStructure { blocks, central_projections, basis_change: u, unital })
}

/// Multiplicative unit of the algebra, solved from e·b_i = b_i in the
/// coefficient space of the basis.
fn algebra_unit<T: Real>(a: &OperatorSubspace<T>, tol: &Tolerance<T>) -> Result<CMatrix<T>> {
    let m = a.dimension();
    let d = a.dim_ambient();
    let d2 = d * d;
    // columns j: stacked vec(b_j·b_i) over i; rhs: stacked vec(b_i)
    let mut mat = CMatrix::zeros(m * d2, m);
    let mut rhs = CMatrix::zeros(m * d2, 1);
    for (i, bi) in a.basis().iter().enumerate() {
        let vi = bi.vectorize();
        for r in 0..d2 {
            rhs[(i * d2 + r, 0)] = vi[r];
        }
        for (j, bj) in a.basis().iter().enumerate() {
            let v = (bj * bi).vectorize();
            for r in 0..d2 {
                mat[(i * d2 + r, j)] = v[r];
            }
        }
    }
    // least squares through the normal equations (the system is consistent
    // for a genuine algebra)
    let mtm = &mat.adjoint() * &mat;
    let mtr = &mat.adjoint() * &rhs;
    let coeff = crate::linalg::solve(&mtm, &mtr)?;
    let mut e = CMatrix::zeros(d, d);
    for (j, bj) in a.basis().iter().enumerate() {
        e = &e + &bj.scale(coeff[(j, 0)]);
    }
    let defect = a
        .basis()
        .iter()
        .map(|b| (&(&e * b) - b).hs_norm().max((&(b * &e) - b).hs_norm()))
        .fold(T::zero(), |s, t| s.max(t));
    if defect > tol.residual_eps * T::from_usize(d).unwrap() * T::from_f64(100.0).unwrap() {
        return Err(Error::Numeric(format!(
            "algebra has no multiplicative unit (defect {defect})"
        )));
    }
    Ok(e)
}

/// Centre: elements of `a` commuting with every basis element.
fn center_of<T: Real>(a: &OperatorSubspace<T>, tol: &Tolerance<T>) -> Result<OperatorSubspace<T>> {
    let d = a.dim_ambient();
    let comm = commutant(d, a.basis(), tol)?;
    intersect(a, &comm, tol)
}

pub(crate) fn rand_real<T: Real>(stream: &mut u64) -> T {
    *stream = stream.wrapping_add(0x9e3779b97f4a7c15);
    let mut x = *stream;
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^= x >> 31;
    let u = (x >> 11) as f64 / (1u64 << 53) as f64;
    T::from_f64(2.0 * u - 1.0).unwrap()
}

/// Random self-adjoint combination of a *-closed subspace's basis.
fn random_self_adjoint<T: Real>(space: &OperatorSubspace<T>, stream: &mut u64) -> CMatrix<T> {
    let d = space.dim_ambient();
    let half = T::from_f64(0.5).unwrap();
    let mut out = CMatrix::zeros(d, d);
    for b in space.basis() {
        let re = rand_real::<T>(stream);
        let im = rand_real::<T>(stream);
        let h1 = (b + &b.adjoint()).scale_re(half);
        let h2 = (b - &b.adjoint()).scale(Complex::new(T::zero(), -half));
        out = &(&out + &h1.scale_re(re)) + &h2.scale_re(im);
    }
    out
}

fn random_member<T: Real>(space: &OperatorSubspace<T>, stream: &mut u64) -> CMatrix<T> {
    let d = space.dim_ambient();
    let mut out = CMatrix::zeros(d, d);
    for b in space.basis() {
        let z = Complex::new(rand_real::<T>(stream), rand_real::<T>(stream));
        out = &out + &b.scale(z);
    }
    out
}

/// Groups sorted eigenvalues into clusters; errors when the gap structure is
/// ambiguous (triggering a redraw of the random element).
fn cluster<T: Real>(vals: &[T], tol: &Tolerance<T>) -> Result<Vec<Vec<usize>>> {
    let split = tol.eig_eps * T::from_f64(100.0).unwrap();
    let tight = tol.residual_eps * T::from_f64(10.0).unwrap();
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for i in 0..vals.len() {
        let gap_ok = i > 0 && (vals[i - 1] - vals[i]).abs() <= split;
        if gap_ok {
            clusters.last_mut().unwrap().push(i);
        } else {
            clusters.push(vec![i]);
        }
    }
    // a cluster must be numerically tight, otherwise the random element was
    // unlucky
    for cl in &clusters {
        let lo = vals[*cl.last().unwrap()];
        let hi = vals[cl[0]];
        if hi - lo > tight {
            return Err(Error::Numeric(format!(
                "ambiguous eigenvalue cluster of width {}",
                hi - lo
            )));
        }
    }
    Ok(clusters)
}

/// Factor size, multiplicity and aligned basis columns of one central block.
type BlockData<T> = (usize, usize, Vec<Vec<C<T>>>);

/// Resolves one central block: factor size n_k, multiplicity m_k, and the
/// aligned orthonormal columns (i-major over the factor index) in which the
/// block algebra acts as M_{n_k} ⊗ I_{m_k}.
fn resolve_block<T: Real>(
    a: &OperatorSubspace<T>,
    q: &CMatrix<T>,
    tol: &Tolerance<T>,
    stream: &mut u64,
) -> Result<BlockData<T>> {
    let r_k = q.cols();
    // compress the algebra onto range(q)
    let compressed: Vec<CMatrix<T>> = a
        .basis()
        .iter()
        .map(|b| &(&q.adjoint() * b) * q)
        .collect();
    let (cbasis, _) = orthonormalize(&compressed, tol)?;
    let dim_block = cbasis.len();
    let n_k = isqrt_checked(dim_block).ok_or_else(|| {
        Error::Numeric(format!("block dimension {dim_block} is not a perfect square"))
    })?;
    if n_k == 0 || !r_k.is_multiple_of(n_k) {
        return Err(Error::Numeric(format!(
            "block rank {r_k} not divisible by factor size {n_k}"
        )));
    }
    let m_k = r_k / n_k;

    if m_k == 1 {
        // factor acts irreducibly on the whole block; any orthonormal basis works
        return Ok((n_k, 1, (0..r_k).map(|j| q.col(j)).collect()));
    }

    // commutant of the compressed algebra ≅ I_{n_k} ⊗ M_{m_k}
    let comm = commutant(r_k, &cbasis, tol)?;
    if comm.dimension() != m_k * m_k {
        return Err(Error::Numeric(format!(
            "block commutant has dimension {} instead of {}",
            comm.dimension(),
            m_k * m_k
        )));
    }
    let y = random_self_adjoint(&comm, stream);
    let (yvals, yvecs) = eigh(&y)?;
    let yclusters = cluster(&yvals, tol)?;
    if yclusters.len() != m_k || yclusters.iter().any(|c| c.len() != n_k) {
        return Err(Error::Numeric(
            "commutant spectrum did not split into m_k clusters of size n_k".into(),
        ));
    }
    // eigenbases W_β of y; W_0 is the reference copy
    let w: Vec<CMatrix<T>> = yclusters
        .iter()
        .map(|cl| CMatrix::from_fn(r_k, n_k, |r, c| yvecs[(r, cl[c])]))
        .collect();
    let c_elem = random_member(&comm, stream);
    let mut aligned: Vec<CMatrix<T>> = Vec::with_capacity(m_k);
    aligned.push(w[0].clone());
    for beta in 1..m_k {
        // unitary polar factor of the commutant element mapping W_0 → W_β
        let m = &(&w[beta].adjoint() * &c_elem) * &w[0];
        let dec = svd(&m);
        let smin = dec.singular_values.last().copied().unwrap_or_else(T::zero);
        if smin <= tol.rank_eps * dec.singular_values[0].max(T::one()) {
            return Err(Error::Numeric(
                "commutant element is singular between multiplicity copies".into(),
            ));
        }
        let polar = &dec.u * &dec.v.adjoint();
        aligned.push(&w[beta] * &polar);
    }
    // columns ordered (i, β) i-major so the algebra acts as [a] ⊗ I_{m_k}
    let mut cols = Vec::with_capacity(r_k);
    for i in 0..n_k {
        for al in aligned.iter() {
            let inner = al.col(i);
            cols.push(q.matvec(&inner));
        }
    }
    Ok((n_k, m_k, cols))
}

fn isqrt_checked(x: usize) -> Option<usize> {
    let r = (x as f64).sqrt().round() as usize;
    (r * r == x).then_some(r)
}

/// Span of { U·(E_ij ⊗ I_{m_k})·U* } over all blocks, for verification.
fn reconstruct_span<T: Real>(
    blocks: &[(usize, usize)],
    u: &CMatrix<T>,
    d: usize,
    tol: &Tolerance<T>,
) -> Result<OperatorSubspace<T>> {
    let mut mats = Vec::new();
    let mut offset = 0usize;
    for &(n_k, m_k) in blocks {
        for i in 0..n_k {
            for j in 0..n_k {
                let mut e = CMatrix::zeros(d, d);
                for beta in 0..m_k {
                    e[(offset + i * m_k + beta, offset + j * m_k + beta)] = Complex::one();
                }
                mats.push(&(u * &e) * &u.adjoint());
            }
        }
        offset += n_k * m_k;
    }
    OperatorSubspace::from_span(d, &mats, tol)
}
