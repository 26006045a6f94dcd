//! Truncated Fock-space linear algebra: dense complex operators, ladder /
//! position / momentum / parity / displacement operators and a Hermitian
//! eigensystem wrapper.
//!
//! All operators are dense `N x N` complex matrices in the number basis
//! `{|e_0>, ..., |e_{N-1}>}`. Identities that hold in infinite dimension are
//! only asserted on a leading block shrunk by a guard (see [`default_guard`]);
//! the last rows and columns of any truncated operator are contaminated by
//! the cut.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use statrs::function::gamma::ln_gamma;

use crate::dd::{Dd, DdC};
use crate::error::{Error, Result};

/// Guard width used when asserting infinite-dimensional identities on a
/// truncated operator: comparisons are restricted to the leading
/// `N - default_guard(N)` block.
pub fn default_guard(n: usize) -> usize {
    (n / 8).max(8)
}

/// Truncation request: operators are assembled at `dim + guard` and reported
/// on the leading `dim x dim` block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TruncationSpec {
    pub dim: usize,
    pub guard: usize,
}

impl TruncationSpec {
    pub fn new(dim: usize, guard: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(format!("dim = {dim}, need >= 2")));
        }
        Ok(TruncationSpec { dim, guard })
    }

    /// Truncation with the default guard `max(8, dim/8)`.
    pub fn with_default_guard(dim: usize) -> Result<Self> {
        Self::new(dim, default_guard(dim))
    }

    pub fn working_dim(&self) -> usize {
        self.dim + self.guard
    }
}

/// Physical scales of the phase-space construction: `hbar`, the length unit
/// `ell` and the derived momentum unit `wp = hbar/ell`. Mass and a limiting
/// speed are optional; when both are present the Compton length and the rest
/// energy are available.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseSpaceScales {
    hbar: f64,
    ell: f64,
    mass: Option<f64>,
    light_speed: Option<f64>,
}

impl PhaseSpaceScales {
    pub fn new(hbar: f64, ell: f64) -> Result<Self> {
        if !(hbar > 0.0) || !(ell > 0.0) {
            return Err(Error::Domain(format!(
                "scales require hbar > 0 and ell > 0 (got hbar = {hbar}, ell = {ell})"
            )));
        }
        Ok(PhaseSpaceScales { hbar, ell, mass: None, light_speed: None })
    }

    /// Dimensionless convention `hbar = ell = 1`.
    pub fn dimensionless() -> Self {
        PhaseSpaceScales { hbar: 1.0, ell: 1.0, mass: None, light_speed: None }
    }

    /// Scales of a massive particle with `ell` fixed to half the Compton
    /// length `l_C = hbar/(m c)`, so that `hbar^2/(4 m ell^2) = m c^2`.
    pub fn compton(hbar: f64, mass: f64, light_speed: f64) -> Result<Self> {
        if !(hbar > 0.0) || !(mass > 0.0) || !(light_speed > 0.0) {
            return Err(Error::Domain(
                "compton scales require hbar, mass, light speed > 0".into(),
            ));
        }
        let ell = hbar / (2.0 * mass * light_speed);
        Ok(PhaseSpaceScales { hbar, ell, mass: Some(mass), light_speed: Some(light_speed) })
    }

    pub fn with_mass(mut self, mass: f64, light_speed: f64) -> Result<Self> {
        if !(mass > 0.0) || !(light_speed > 0.0) {
            return Err(Error::Domain("mass and light speed must be positive".into()));
        }
        self.mass = Some(mass);
        self.light_speed = Some(light_speed);
        Ok(self)
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn ell(&self) -> f64 {
        self.ell
    }

    /// Momentum unit, always derived: `wp * ell = hbar` exactly.
    pub fn wp(&self) -> f64 {
        self.hbar / self.ell
    }

    pub fn mass(&self) -> Option<f64> {
        self.mass
    }

    pub fn light_speed(&self) -> Option<f64> {
        self.light_speed
    }

    pub fn compton_length(&self) -> Option<f64> {
        match (self.mass, self.light_speed) {
            (Some(m), Some(c)) => Some(self.hbar / (m * c)),
            _ => None,
        }
    }

    pub fn rest_energy(&self) -> Option<f64> {
        match (self.mass, self.light_speed) {
            (Some(m), Some(c)) => Some(m * c * c),
            _ => None,
        }
    }
}

/// Non-fatal accuracy notes attached to an operator by its constructor.
#[derive(Debug, Clone, PartialEq)]
pub enum OpWarning {
    /// `|z|^2 > dim/4`: the displaced state leaks past the truncation edge.
    TruncationUnreliable { z_mod_sq: f64, dim: usize },
    /// Quadrature rule smaller than the sizing rule requires.
    QuadratureUndersized { needed_radial: usize, actual_radial: usize },
    /// Polynomial powers exceeding the truncation were dropped.
    PolynomialTruncated { degree: u32, dim: usize },
    /// Tabulated data was interpolated; estimated interpolation error.
    Interpolation { estimate: f64 },
}

/// A dense operator on the first `N` Fock levels. Row `m`, column `n` holds
/// `<e_m| A |e_n>`.
#[derive(Debug, Clone)]
pub struct FockOperator {
    mat: DMatrix<C64>,
    hermitian_hint: bool,
    warnings: Vec<OpWarning>,
}

/// Relative Hermiticity tolerance for the `hermitian_hint` invariant.
pub const HERMITICITY_TOL: f64 = 1e-12;

impl FockOperator {
    /// Wraps a matrix, validating finiteness and (when hinted) Hermiticity.
    pub fn from_matrix(mat: DMatrix<C64>, hermitian_hint: bool) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::InvalidDimension(format!(
                "operator matrix must be square, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        if mat.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::Numeric("operator entries must be finite".into()));
        }
        let op = FockOperator { mat, hermitian_hint, warnings: Vec::new() };
        if hermitian_hint {
            let dev = op.hermiticity_deviation();
            let scale = 1.0 + op.max_abs();
            if dev > HERMITICITY_TOL * scale {
                return Err(Error::Numeric(format!(
                    "hermitian_hint set but max |A - A^dag| = {dev:.3e} exceeds {:.3e}",
                    HERMITICITY_TOL * scale
                )));
            }
        }
        Ok(op)
    }

    pub(crate) fn from_matrix_unchecked(mat: DMatrix<C64>, hermitian_hint: bool) -> Self {
        FockOperator { mat, hermitian_hint, warnings: Vec::new() }
    }

    pub fn identity(dim: usize) -> Self {
        FockOperator {
            mat: DMatrix::identity(dim, dim),
            hermitian_hint: true,
            warnings: Vec::new(),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        FockOperator {
            mat: DMatrix::zeros(dim, dim),
            hermitian_hint: true,
            warnings: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn entry(&self, m: usize, n: usize) -> C64 {
        self.mat[(m, n)]
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.mat
    }

    pub fn hermitian_hint(&self) -> bool {
        self.hermitian_hint
    }

    pub fn warnings(&self) -> &[OpWarning] {
        &self.warnings
    }

    pub(crate) fn push_warning(&mut self, w: OpWarning) {
        self.warnings.push(w);
    }

    pub fn adjoint(&self) -> FockOperator {
        FockOperator {
            mat: self.mat.adjoint(),
            hermitian_hint: self.hermitian_hint,
            warnings: Vec::new(),
        }
    }

    pub fn mul(&self, other: &FockOperator) -> FockOperator {
        FockOperator {
            mat: &self.mat * &other.mat,
            hermitian_hint: false,
            warnings: Vec::new(),
        }
    }

    pub fn add(&self, other: &FockOperator) -> FockOperator {
        FockOperator {
            mat: &self.mat + &other.mat,
            hermitian_hint: self.hermitian_hint && other.hermitian_hint,
            warnings: Vec::new(),
        }
    }

    pub fn sub(&self, other: &FockOperator) -> FockOperator {
        FockOperator {
            mat: &self.mat - &other.mat,
            hermitian_hint: self.hermitian_hint && other.hermitian_hint,
            warnings: Vec::new(),
        }
    }

    pub fn scale(&self, s: C64) -> FockOperator {
        FockOperator {
            mat: self.mat.map(|c| c * s),
            hermitian_hint: self.hermitian_hint && s.im == 0.0,
            warnings: Vec::new(),
        }
    }

    /// Adds `s * I`.
    pub fn shift(&self, s: f64) -> FockOperator {
        let mut mat = self.mat.clone();
        for k in 0..mat.nrows() {
            mat[(k, k)] += C64::new(s, 0.0);
        }
        FockOperator { mat, hermitian_hint: self.hermitian_hint, warnings: Vec::new() }
    }

    /// Leading `k x k` sub-operator.
    pub fn leading_block(&self, k: usize) -> FockOperator {
        let k = k.min(self.dim());
        FockOperator {
            mat: self.mat.view((0, 0), (k, k)).into_owned(),
            hermitian_hint: self.hermitian_hint,
            warnings: self.warnings.clone(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.mat.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        let n = self.dim();
        let mut dev: f64 = 0.0;
        for m in 0..n {
            for k in m..n {
                dev = dev.max((self.mat[(m, k)] - self.mat[(k, m)].conj()).norm());
            }
        }
        dev
    }

    /// Forces the matrix onto its Hermitian part `(A + A^dag)/2`.
    pub fn symmetrized(&self) -> FockOperator {
        let h = (&self.mat + self.mat.adjoint()).map(|c| c * C64::new(0.5, 0.0));
        FockOperator { mat: h, hermitian_hint: true, warnings: Vec::new() }
    }
}

/// Max-norm of `A - B` over the full matrix.
pub fn max_abs_diff(a: &FockOperator, b: &FockOperator) -> f64 {
    assert_eq!(a.dim(), b.dim(), "dimension mismatch");
    a.matrix()
        .iter()
        .zip(b.matrix().iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Max-norm of `A - B` restricted to the leading `k x k` block.
pub fn max_abs_diff_block(a: &FockOperator, b: &FockOperator, k: usize) -> f64 {
    let k = k.min(a.dim()).min(b.dim());
    let mut dev: f64 = 0.0;
    for m in 0..k {
        for n in 0..k {
            dev = dev.max((a.entry(m, n) - b.entry(m, n)).norm());
        }
    }
    dev
}

/// Lowering and raising operators: `a|e_n> = sqrt(n)|e_{n-1}>`,
/// `a^dag|e_n> = sqrt(n+1)|e_{n+1}>`.
pub fn ladder_ops(dim: usize) -> Result<(FockOperator, FockOperator)> {
    if dim < 2 {
        return Err(Error::InvalidDimension(format!("ladder_ops needs dim >= 2, got {dim}")));
    }
    let mut a = DMatrix::<C64>::zeros(dim, dim);
    for n in 0..dim - 1 {
        a[(n, n + 1)] = C64::new(((n + 1) as f64).sqrt(), 0.0);
    }
    let a_dag = a.adjoint();
    Ok((
        FockOperator::from_matrix_unchecked(a, false),
        FockOperator::from_matrix_unchecked(a_dag, false),
    ))
}

/// Position and momentum at the length scale `b`:
/// `Q = (b/sqrt 2)(a + a^dag)`, `P = (hbar/(i b sqrt 2))(a - a^dag)`.
///
/// Any positive `b` gives a canonical pair with `[Q, P] = i hbar` on the
/// guarded block; `position_momentum` uses `scales.ell()`.
pub fn position_momentum_at(
    dim: usize,
    hbar: f64,
    b: f64,
) -> Result<(FockOperator, FockOperator)> {
    if !(b > 0.0) || !(hbar > 0.0) {
        return Err(Error::Domain(format!(
            "position_momentum needs hbar > 0 and length > 0 (got {hbar}, {b})"
        )));
    }
    let (a, a_dag) = ladder_ops(dim)?;
    let q = a.add(&a_dag).scale(C64::new(b / f64::sqrt(2.0), 0.0));
    // (a - a^dag)/i = -i(a - a^dag)
    let p = a.sub(&a_dag).scale(C64::new(0.0, -hbar / (b * f64::sqrt(2.0))));
    let mut q = q;
    let mut p = p;
    q.hermitian_hint = true;
    p.hermitian_hint = true;
    Ok((q, p))
}

pub fn position_momentum(
    dim: usize,
    scales: &PhaseSpaceScales,
) -> Result<(FockOperator, FockOperator)> {
    position_momentum_at(dim, scales.hbar(), scales.ell())
}

/// Parity: diagonal `(-1)^n`.
pub fn parity_op(dim: usize) -> Result<FockOperator> {
    if dim < 1 {
        return Err(Error::InvalidDimension("parity_op needs dim >= 1".into()));
    }
    let mut m = DMatrix::<C64>::zeros(dim, dim);
    for n in 0..dim {
        m[(n, n)] = C64::new(if n % 2 == 0 { 1.0 } else { -1.0 }, 0.0);
    }
    Ok(FockOperator::from_matrix_unchecked(m, true))
}

/// How to evaluate the displacement operator `D(z) = exp(z a^dag - zbar a)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DisplacementMethod {
    /// Closed-form matrix elements through associated Laguerre polynomials,
    /// evaluated by a scaled recurrence in log space. Every entry equals the
    /// infinite-dimensional matrix element up to rounding.
    #[default]
    Laguerre,
    /// Disentangled form `e^{-|z|^2/2} exp(z a^dag) exp(-zbar a)` as a product
    /// of triangular Taylor factors (nilpotent at finite dimension). The
    /// alternating sums are ill-conditioned in f64, so the factors and the
    /// product are carried in double-double arithmetic.
    NormalOrdered,
}

/// Rescaling bound for the Laguerre recurrence.
const RESCALE_LIMIT: f64 = 1e140;

/// Runs the scaled associated-Laguerre recurrence
/// `T_j = sqrt(j! Gamma(alpha+1) / (j+alpha)!) L_j^{(alpha)}(t)` along one
/// diagonal, calling `emit(j, sign, ln_mag)` with `ln_mag = ln|T_j|`.
fn scaled_laguerre_diagonal(alpha: usize, t: f64, len: usize, mut emit: impl FnMut(usize, f64, f64)) {
    let af = alpha as f64;
    let mut offset = 0.0f64;
    let mut prev = 0.0f64;
    let mut cur = 1.0f64; // T_0 = 1
    for j in 0..len {
        if cur == 0.0 {
            emit(j, 1.0, f64::NEG_INFINITY);
        } else {
            emit(j, cur.signum(), cur.abs().ln() + offset);
        }
        // advance to T_{j+1}
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0 + af - t) * cur - (jf * (jf + af)).sqrt() * prev)
            / (((jf + 1.0) * (jf + 1.0 + af)).sqrt());
        prev = cur;
        cur = next;
        let m = prev.abs().max(cur.abs());
        if m > RESCALE_LIMIT {
            prev /= RESCALE_LIMIT;
            cur /= RESCALE_LIMIT;
            offset += RESCALE_LIMIT.ln();
        } else if m != 0.0 && m < 1.0 / RESCALE_LIMIT {
            prev *= RESCALE_LIMIT;
            cur *= RESCALE_LIMIT;
            offset -= RESCALE_LIMIT.ln();
        }
    }
}

fn displacement_laguerre(z: C64, dim: usize) -> DMatrix<C64> {
    let t = z.norm_sqr();
    let mut mat = DMatrix::<C64>::zeros(dim, dim);
    if t == 0.0 {
        for n in 0..dim {
            mat[(n, n)] = C64::new(1.0, 0.0);
        }
        return mat;
    }
    let ln_r = z.norm().ln();
    let phi = z.arg();
    for alpha in 0..dim {
        let af = alpha as f64;
        let ln_pref = af * ln_r - 0.5 * t - 0.5 * ln_gamma(af + 1.0);
        // phases for the lower (m = j+alpha, n = j) and upper entries
        let phase_lo = C64::from_polar(1.0, af * phi);
        let phase_up = C64::from_polar(1.0, -af * phi)
            * C64::new(if alpha % 2 == 0 { 1.0 } else { -1.0 }, 0.0);
        scaled_laguerre_diagonal(alpha, t, dim - alpha, |j, sign, ln_mag| {
            if ln_mag.is_finite() {
                let v = sign * (ln_pref + ln_mag).exp();
                mat[(j + alpha, j)] = phase_lo * v;
                if alpha > 0 {
                    mat[(j, j + alpha)] = phase_up * v;
                }
            }
        });
    }
    mat
}

/// `D_{mk}(r)` for real `r >= 0` on an `nrows x ncols` rectangle. Used by the
/// phase-covariant radial decomposition of the integral quantizers.
pub(crate) fn displacement_rectangle_real(r: f64, nrows: usize, ncols: usize) -> DMatrix<f64> {
    let t = r * r;
    let mut mat = DMatrix::<f64>::zeros(nrows, ncols);
    if t == 0.0 {
        for n in 0..nrows.min(ncols) {
            mat[(n, n)] = 1.0;
        }
        return mat;
    }
    let ln_r = r.ln();
    let max_alpha = nrows.max(ncols) - 1;
    for alpha in 0..=max_alpha {
        let af = alpha as f64;
        let ln_pref = af * ln_r - 0.5 * t - 0.5 * ln_gamma(af + 1.0);
        let sign_up = if alpha % 2 == 0 { 1.0 } else { -1.0 };
        let len_lo = if nrows > alpha { (nrows - alpha).min(ncols) } else { 0 };
        let len_up = if ncols > alpha { (ncols - alpha).min(nrows) } else { 0 };
        let len = len_lo.max(len_up);
        if len == 0 {
            continue;
        }
        scaled_laguerre_diagonal(alpha, t, len, |j, sign, ln_mag| {
            if ln_mag.is_finite() {
                let v = sign * (ln_pref + ln_mag).exp();
                if j < len_lo {
                    mat[(j + alpha, j)] = v;
                }
                if alpha > 0 && j < len_up {
                    mat[(j, j + alpha)] = sign_up * v;
                }
            }
        });
    }
    mat
}

fn displacement_normal_ordered(z: C64, dim: usize) -> DMatrix<C64> {
    // c[m][n] = sqrt(m!/(n! ((m-n)!)^2)) in double-double, built row by row:
    // c[m][0] = 1/sqrt(m!), c[m][n+1] = c[m][n] * (m-n)/sqrt(n+1).
    let mut coeff: Vec<Vec<Dd>> = Vec::with_capacity(dim);
    let mut c_m0 = Dd::from_f64(1.0);
    for m in 0..dim {
        if m > 0 {
            c_m0 = c_m0.div(Dd::from_f64(m as f64).sqrt());
        }
        let mut row = Vec::with_capacity(m + 1);
        let mut c = c_m0;
        row.push(c);
        for n in 0..m {
            c = c.mul(Dd::from_f64((m - n) as f64)).div(Dd::from_f64((n + 1) as f64).sqrt());
            row.push(c);
        }
        coeff.push(row);
    }
    // powers of z and of -conj(z)
    let zdd = DdC::from_f64(z.re, z.im);
    let zbn = DdC::from_f64(-z.re, z.im);
    let mut zp: Vec<DdC> = Vec::with_capacity(dim);
    let mut zbp: Vec<DdC> = Vec::with_capacity(dim);
    zp.push(DdC::from_f64(1.0, 0.0));
    zbp.push(DdC::from_f64(1.0, 0.0));
    for k in 1..dim {
        zp.push(zp[k - 1].mul(zdd));
        zbp.push(zbp[k - 1].mul(zbn));
    }
    let pref = (-0.5 * z.norm_sqr()).exp();
    let mut mat = DMatrix::<C64>::zeros(dim, dim);
    for m in 0..dim {
        for n in 0..dim {
            let mut acc = DdC::ZERO;
            for k in 0..=m.min(n) {
                let term = zp[m - k].scale(coeff[m][k]).mul(zbp[n - k].scale(coeff[n][k]));
                acc = acc.add(term);
            }
            mat[(m, n)] = C64::new(pref * acc.re.to_f64(), pref * acc.im.to_f64());
        }
    }
    mat
}

/// Displacement operator `D(z)` truncated to `dim` levels.
///
/// Carries a [`OpWarning::TruncationUnreliable`] flag when `|z|^2 > dim/4`.
pub fn displacement(z: C64, dim: usize, method: DisplacementMethod) -> Result<FockOperator> {
    if dim < 1 {
        return Err(Error::InvalidDimension("displacement needs dim >= 1".into()));
    }
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Domain("displacement argument must be finite".into()));
    }
    let mat = match method {
        DisplacementMethod::Laguerre => displacement_laguerre(z, dim),
        DisplacementMethod::NormalOrdered => displacement_normal_ordered(z, dim),
    };
    let mut op = FockOperator::from_matrix_unchecked(mat, false);
    if z.norm_sqr() > dim as f64 / 4.0 {
        op.push_warning(OpWarning::TruncationUnreliable { z_mod_sq: z.norm_sqr(), dim });
    }
    Ok(op)
}

/// Result of a Hermitian eigendecomposition: `values` ascending,
/// `vectors` orthonormal columns with `A v_i = values[i] v_i`.
#[derive(Debug, Clone)]
pub struct Eigensystem {
    pub values: Vec<f64>,
    pub vectors: DMatrix<C64>,
}

impl Eigensystem {
    /// `V diag(f(lambda)) V^dag` for a real function of the spectrum.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> DMatrix<C64> {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for (j, &lam) in self.values.iter().enumerate() {
            let fv = f(lam);
            for i in 0..n {
                scaled[(i, j)] *= C64::new(fv, 0.0);
            }
        }
        scaled * self.vectors.adjoint()
    }
}

/// Eigendecomposition of a Hermitian operator. The input is symmetrized to
/// `(A + A^dag)/2` before factorization; eigenvalues are returned ascending.
pub fn hermitian_eigensystem(a: &FockOperator) -> Result<Eigensystem> {
    if a.matrix().iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(Error::Numeric("eigensystem input has non-finite entries".into()));
    }
    let h = a.symmetrized();
    let se = nalgebra::SymmetricEigen::try_new(h.into_matrix(), f64::EPSILON, 0)
        .ok_or_else(|| Error::Numeric("hermitian eigensolver did not converge".into()))?;
    let n = se.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| se.eigenvalues[i].partial_cmp(&se.eigenvalues[j]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut vectors = DMatrix::<C64>::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &se.eigenvectors.column(src));
    }
    Ok(Eigensystem { values, vectors })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn commutator(a: &FockOperator, b: &FockOperator) -> FockOperator {
        a.mul(b).sub(&b.mul(a))
    }

    #[test]
    fn ladder_annihilates_vacuum_and_matches_sqrt_rule() {
        let (a, a_dag) = ladder_ops(8).unwrap();
        for m in 0..8 {
            assert_eq!(a.entry(m, 0), C64::new(0.0, 0.0));
        }
        assert_abs_diff_eq!(a.entry(1, 2).re, 2.0f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(a_dag.entry(2, 1).re, 2.0f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn ladder_commutator_block_is_identity() {
        let n = 16;
        let (a, a_dag) = ladder_ops(n).unwrap();
        let c = commutator(&a, &a_dag);
        let id = FockOperator::identity(n);
        assert!(max_abs_diff_block(&c, &id, n - 1) <= 1e-12);
    }

    #[test]
    fn ladder_rejects_small_dims() {
        assert!(matches!(ladder_ops(1), Err(Error::InvalidDimension(_))));
    }

    #[test]
    fn position_matrix_element_and_canonical_commutator() {
        let scales = PhaseSpaceScales::new(1.0, 0.7).unwrap();
        let (q, p) = position_momentum(64, &scales).unwrap();
        assert_abs_diff_eq!(q.entry(0, 1).re, 0.7 / 2.0f64.sqrt(), epsilon = 1e-15);
        assert!(q.hermitian_hint() && p.hermitian_hint());
        let c = commutator(&q, &p);
        // [Q, P] = i hbar on the leading (N-1) block
        let mut dev: f64 = 0.0;
        for m in 0..63 {
            for n in 0..63 {
                let target = if m == n { C64::new(0.0, 1.0) } else { C64::new(0.0, 0.0) };
                dev = dev.max((c.entry(m, n) - target).norm());
            }
        }
        assert!(dev <= 1e-12, "commutator deviation {dev:.3e}");
    }

    /// Independent oracle: zeros of the physicists' Hermite polynomial H_12
    /// by sign-change bisection of the three-term recurrence. `Q` at `ell = 1`
    /// is the Gauss-Hermite Jacobi matrix, so its eigenvalues must match.
    fn hermite_zeros(n: usize) -> Vec<f64> {
        fn h(n: usize, x: f64) -> f64 {
            let (mut h0, mut h1) = (1.0f64, 2.0 * x);
            if n == 0 {
                return h0;
            }
            for k in 1..n {
                let h2 = 2.0 * x * h1 - 2.0 * (k as f64) * h0;
                h0 = h1;
                h1 = h2;
            }
            h1
        }
        // all zeros lie inside |x| < sqrt(2n+1); bracket on a fine grid
        let bound = (2.0 * n as f64 + 1.0).sqrt();
        let grid = 20_000;
        let mut zeros = Vec::with_capacity(n);
        let mut x_prev = -bound;
        let mut f_prev = h(n, x_prev);
        for i in 1..=grid {
            let x = -bound + 2.0 * bound * (i as f64) / (grid as f64);
            let f = h(n, x);
            if f_prev == 0.0 {
                zeros.push(x_prev);
            } else if f_prev.signum() != f.signum() {
                let (mut lo, mut hi) = (x_prev, x);
                let mut flo = f_prev;
                for _ in 0..100 {
                    let mid = 0.5 * (lo + hi);
                    let fm = h(n, mid);
                    if fm == 0.0 {
                        lo = mid;
                        hi = mid;
                        break;
                    }
                    if flo.signum() == fm.signum() {
                        lo = mid;
                        flo = fm;
                    } else {
                        hi = mid;
                    }
                }
                zeros.push(0.5 * (lo + hi));
            }
            x_prev = x;
            f_prev = f;
        }
        assert_eq!(zeros.len(), n, "oracle must bracket all {n} zeros");
        zeros
    }

    #[test]
    fn position_eigenvalues_are_hermite_zeros() {
        let scales = PhaseSpaceScales::dimensionless();
        let (q, _) = position_momentum(12, &scales).unwrap();
        let eig = hermitian_eigensystem(&q).unwrap();
        let zeros = hermite_zeros(12);
        // sanity pin for the oracle itself (largest zero of H_12)
        assert_abs_diff_eq!(zeros[11], 3.889724897869782, epsilon = 1e-12);
        for (lam, z) in eig.values.iter().zip(zeros.iter()) {
            assert_abs_diff_eq!(lam, z, epsilon = 1e-10);
        }
    }

    #[test]
    fn parity_action_and_involution() {
        let p = parity_op(8).unwrap();
        assert_eq!(p.entry(3, 3), C64::new(-1.0, 0.0));
        let p2 = p.mul(&p);
        assert_eq!(max_abs_diff(&p2, &FockOperator::identity(8)), 0.0);
        let (a, _) = ladder_ops(8).unwrap();
        let pap = p.mul(&a).mul(&p);
        assert_eq!(max_abs_diff(&pap, &a.scale(C64::new(-1.0, 0.0))), 0.0);
    }

    #[test]
    fn displacement_at_zero_is_identity() {
        for method in [DisplacementMethod::Laguerre, DisplacementMethod::NormalOrdered] {
            let d = displacement(C64::new(0.0, 0.0), 6, method).unwrap();
            assert_eq!(max_abs_diff(&d, &FockOperator::identity(6)), 0.0);
        }
    }

    #[test]
    fn displacement_first_column_is_coherent_state() {
        let z = C64::new(0.6, -0.3);
        let d = displacement(z, 24, DisplacementMethod::Laguerre).unwrap();
        // <e_n|D(z)|e_0> = e^{-|z|^2/2} z^n / sqrt(n!)
        let pref = (-0.5 * z.norm_sqr()).exp();
        let mut zn = C64::new(1.0, 0.0);
        let mut fact = 1.0f64;
        for n in 0..24 {
            if n > 0 {
                zn *= z;
                fact *= n as f64;
            }
            let expect = zn * C64::new(pref / fact.sqrt(), 0.0);
            assert!((d.entry(n, 0) - expect).norm() < 1e-14);
        }
        assert!((d.entry(1, 0) - z * C64::new(pref, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn displacement_methods_agree_and_invert() {
        let n = 64;
        let z = C64::new(0.8, 0.5);
        let dl = displacement(z, n, DisplacementMethod::Laguerre).unwrap();
        let dn = displacement(z, n, DisplacementMethod::NormalOrdered).unwrap();
        let keep = n - (4.0 * z.norm_sqr()).ceil() as usize;
        assert!(max_abs_diff_block(&dl, &dn, keep) <= 1e-12);
        // D(z) D(-z) = I on the leading N/2 block for |z|^2 <= N/8
        let dinv = displacement(-z, n, DisplacementMethod::Laguerre).unwrap();
        let prod = dl.mul(&dinv);
        let id = FockOperator::identity(n);
        assert!(max_abs_diff_block(&prod, &id, n / 2) <= 1e-8);
    }

    #[test]
    fn displacement_parity_conjugation() {
        let n = 24;
        let z = C64::new(0.4, 0.9);
        let p = parity_op(n).unwrap();
        let d = displacement(z, n, DisplacementMethod::Laguerre).unwrap();
        let dm = displacement(-z, n, DisplacementMethod::Laguerre).unwrap();
        let pdp = p.mul(&d).mul(&p);
        assert!(max_abs_diff(&pdp, &dm) <= 1e-10);
    }

    #[test]
    fn displacement_truncation_warning() {
        let d = displacement(C64::new(3.0, 0.0), 16, DisplacementMethod::Laguerre).unwrap();
        assert!(matches!(d.warnings()[0], OpWarning::TruncationUnreliable { .. }));
        let ok = displacement(C64::new(0.5, 0.0), 16, DisplacementMethod::Laguerre).unwrap();
        assert!(ok.warnings().is_empty());
    }

    #[test]
    fn eigensystem_sorts_and_reconstructs() {
        let mat = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            C64::new(3.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(2.0, 0.0),
        ]));
        let op = FockOperator::from_matrix(mat, true).unwrap();
        let eig = hermitian_eigensystem(&op).unwrap();
        assert_eq!(eig.values, vec![1.0, 2.0, 3.0]);

        let (a, a_dag) = ladder_ops(10).unwrap();
        let num = a_dag.mul(&a).symmetrized();
        let eig = hermitian_eigensystem(&num).unwrap();
        for (n, lam) in eig.values.iter().enumerate() {
            assert_abs_diff_eq!(lam, &(n as f64), epsilon = 1e-12);
        }
    }

    #[test]
    fn eigensystem_rejects_non_finite() {
        let mut mat = DMatrix::<C64>::zeros(3, 3);
        mat[(0, 0)] = C64::new(f64::NAN, 0.0);
        let op = FockOperator::from_matrix_unchecked(mat, false);
        assert!(matches!(hermitian_eigensystem(&op), Err(Error::Numeric(_))));
    }

    #[test]
    fn compton_scales_identities() {
        // electron, SI
        let hbar = 1.054571817e-34;
        let me = 9.1093837015e-31;
        let c = 299792458.0;
        let s = PhaseSpaceScales::compton(hbar, me, c).unwrap();
        let lc = s.compton_length().unwrap();
        assert_abs_diff_eq!(lc, 3.8616e-13, epsilon = 1e-16);
        assert_abs_diff_eq!(s.ell(), lc / 2.0, epsilon = 1e-28);
        // hbar^2/(4 m ell^2) = m c^2 and wp * ell = hbar, both exact identities
        let kin = hbar * hbar / (4.0 * me * s.ell() * s.ell());
        assert_abs_diff_eq!(kin, me * c * c, epsilon = 1e-22 * kin.abs());
        assert_abs_diff_eq!(s.wp() * s.ell(), hbar, epsilon = 1e-50);
    }

    #[test]
    fn hermitian_hint_invariant_enforced() {
        let mut mat = DMatrix::<C64>::zeros(2, 2);
        mat[(0, 1)] = C64::new(1.0, 0.0);
        assert!(FockOperator::from_matrix(mat.clone(), true).is_err());
        assert!(FockOperator::from_matrix(mat, false).is_ok());
    }
}
