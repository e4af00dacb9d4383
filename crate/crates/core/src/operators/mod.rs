//! Linear operators with fast apply/adjoint.
//!
//! Every measurement operator used by the solvers is a [`LinearMap`]. The
//! structured partial isometries all factor as `A = R·U` where `U` is an
//! orthonormal [`OrthoBasis`] and `R` keeps the rows listed in a
//! [`SamplingMask`]; [`LinearMap::transform_factorization`] exposes that
//! factorization so solvers can work in the `U` domain.
//!
//! Maps are immutable after construction and can be shared across threads.

mod basis;
mod difference;

use std::cell::Cell;
use std::fmt;
use std::sync::Arc;

pub use basis::{fwht_normalized, Dct4Basis, DctBasis, HadamardBasis, OrthoBasis, RealFourier2d, SpectralRow};
pub use difference::{forward_difference, forward_difference_adjoint};

use crate::config::{ConfigError, Section};
use crate::error::{Error, Result};
use crate::rng::Rng64;
use crate::vecops::{dot, norm2};

/// Counts operator applications made on behalf of one solve.
#[derive(Debug, Default)]
pub struct CallCounter(Cell<u64>);

impl CallCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self) -> u64 {
        self.0.get()
    }

    pub fn add(&self, k: u64) {
        self.0.set(self.0.get() + k);
    }
}

/// Sorted subset of `0..total` selecting measured coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SamplingMask {
    total: usize,
    kept: Vec<usize>,
}

impl SamplingMask {
    pub fn new(total: usize, mut kept: Vec<usize>) -> Result<Self> {
        kept.sort_unstable();
        if kept.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid("sampling mask has repeated indices"));
        }
        if kept.last().is_some_and(|&i| i >= total) {
            return Err(Error::invalid("sampling mask index out of range"));
        }
        Ok(SamplingMask { total, kept })
    }

    pub fn full(total: usize) -> Self {
        SamplingMask {
            total,
            kept: (0..total).collect(),
        }
    }

    /// `m` indices drawn uniformly without replacement (partial Fisher–Yates).
    pub fn random(total: usize, m: usize, seed: u64) -> Result<Self> {
        if m == 0 || m > total {
            return Err(Error::invalid(format!(
                "need 1 <= m <= n, got m={m}, n={total}"
            )));
        }
        let mut rng = Rng64::new(seed);
        SamplingMask::new(total, rng.sample(total, m))
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn len(&self) -> usize {
        self.kept.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kept.is_empty()
    }

    pub fn indices(&self) -> &[usize] {
        &self.kept
    }

    /// `R v`
    pub fn restrict(&self, v: &[f64]) -> Vec<f64> {
        self.kept.iter().map(|&i| v[i]).collect()
    }

    /// `R* y`
    pub fn extend(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.total];
        for (&i, &v) in self.kept.iter().zip(y) {
            out[i] = v;
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OperatorKind {
    SubsampledDct,
    PermutedSubsampledHadamard,
    PartialFourier2d,
    DenseMatrix,
    Dictionary,
    FiniteDifference2d,
    Composition,
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            OperatorKind::SubsampledDct => "dct",
            OperatorKind::PermutedSubsampledHadamard => "hadamard",
            OperatorKind::PartialFourier2d => "fourier2d",
            OperatorKind::DenseMatrix => "dense",
            OperatorKind::Dictionary => "dictionary",
            OperatorKind::FiniteDifference2d => "finite-difference",
            OperatorKind::Composition => "composition",
        };
        f.write_str(s)
    }
}

#[derive(Clone)]
enum Repr {
    Subsampled { basis: OrthoBasis, mask: SamplingMask },
    /// Row-major `rows × cols`.
    Dense { rows: usize, cols: usize, data: Vec<f64> },
    /// `[C₂ᵀ | C₄ᵀ] / √2`, a Parseval frame of two orthonormal cosine bases.
    DctFrame { dct2: DctBasis, dct4: Dct4Basis },
    /// Orthonormal DCT used as a synthesis dictionary (`W = Cᵀ`).
    DctBasisDictionary { dct2: DctBasis },
    FiniteDifference { rows: usize, cols: usize },
    /// `outer ∘ inner`
    Compose { outer: Arc<LinearMap>, inner: Arc<LinearMap> },
}

/// A real linear operator `ℝ^in_dim → ℝ^out_dim`.
#[derive(Clone)]
pub struct LinearMap {
    repr: Repr,
    kind: OperatorKind,
    in_dim: usize,
    out_dim: usize,
    partial_isometry: bool,
    norm_sq: f64,
    seed: u64,
}

impl fmt::Debug for LinearMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LinearMap")
            .field("kind", &self.kind)
            .field("in_dim", &self.in_dim)
            .field("out_dim", &self.out_dim)
            .field("partial_isometry", &self.partial_isometry)
            .field("seed", &self.seed)
            .finish()
    }
}

/// Power-iteration steps used for dictionary norm estimates.
pub const POWER_ITERATIONS: usize = 50;
/// Multiplier applied to the estimated `‖W‖²` so `L_μ` is not underestimated.
pub const NORM_SAFETY: f64 = 1.01;
pub const POWER_ITERATIONS_MAX: usize = 5000;
const POWER_SEED: u64 = 0x005E_ED0F_F00D;

impl LinearMap {
    /// `R·C` with `C` the unitary type-II DCT and `R` keeping `m` random rows.
    pub fn subsampled_dct(n: usize, m: usize, seed: u64) -> Result<Self> {
        let mask = SamplingMask::random(n, m, seed)?;
        Ok(Self::from_basis(
            OrthoBasis::Dct(DctBasis::new(n)),
            mask,
            OperatorKind::SubsampledDct,
            seed,
        ))
    }

    /// `R·H·P` with `H` the normalized Walsh–Hadamard transform and `P` a random
    /// column permutation. The permutation and the mask use separate streams
    /// of `seed`.
    pub fn permuted_subsampled_hadamard(n: usize, m: usize, seed: u64) -> Result<Self> {
        if !n.is_power_of_two() {
            return Err(Error::invalid(format!("Hadamard size {n} is not a power of two")));
        }
        let perm = Rng64::stream(seed, 0).permutation(n);
        Self::hadamard_with(perm, m, seed)
    }

    /// Same as [`permuted_subsampled_hadamard`](Self::permuted_subsampled_hadamard)
    /// with an explicit permutation.
    pub fn hadamard_with(perm: Vec<usize>, m: usize, seed: u64) -> Result<Self> {
        let n = perm.len();
        if !n.is_power_of_two() {
            return Err(Error::invalid(format!("Hadamard size {n} is not a power of two")));
        }
        let mut check = perm.clone();
        check.sort_unstable();
        if check.iter().enumerate().any(|(i, &p)| i != p) {
            return Err(Error::invalid("not a permutation"));
        }
        let mask = if m == n {
            SamplingMask::full(n)
        } else {
            SamplingMask::random(n, m, Rng64::stream(seed, 1).next_u64())?
        };
        Ok(Self::from_basis(
            OrthoBasis::Hadamard(HadamardBasis::new(perm)),
            mask,
            OperatorKind::PermutedSubsampledHadamard,
            seed,
        ))
    }

    /// Real-valued partial 2-D Fourier operator on a row-major `rows × cols`
    /// image.
    ///
    /// Frequencies are chosen as whole conjugate pairs: the DC term is always
    /// kept, the remaining frequency units are visited in seeded random order
    /// and taken while they fit in `m` real measurements. If a single slot is
    /// left and only pairs remain, the real part of one more pair fills it.
    pub fn partial_fourier2d(rows: usize, cols: usize, m: usize, seed: u64) -> Result<Self> {
        Self::check_fourier_dims(rows, cols, m)?;
        let fourier = RealFourier2d::new(rows, cols);
        let units = fourier.frequency_units().len();
        let order = Rng64::new(seed).permutation(units - 1);
        Self::fourier_from_order(fourier, m, order, seed)
    }

    /// Partial 2-D Fourier operator that favours low frequencies: frequency
    /// units are drawn without replacement with weight `(1 + |k|)^{−decay}`,
    /// `|k|` the radial frequency. `decay = 0` samples uniformly.
    pub fn partial_fourier2d_variable_density(
        rows: usize,
        cols: usize,
        m: usize,
        decay: f64,
        seed: u64,
    ) -> Result<Self> {
        Self::check_fourier_dims(rows, cols, m)?;
        if !(decay >= 0.0 && decay.is_finite()) {
            return Err(Error::invalid(format!("density decay must be >= 0, got {decay}")));
        }
        let fourier = RealFourier2d::new(rows, cols);
        let radius = |k: usize| {
            let signed = |i: usize, len: usize| if i <= len / 2 { i as f64 } else { i as f64 - len as f64 };
            signed(k / cols, rows).hypot(signed(k % cols, cols))
        };
        let mut rng = Rng64::new(seed);
        // Efraimidis–Spirakis keys u^{1/w}, computed in log form
        let mut keyed: Vec<(f64, usize)> = fourier.frequency_units()[1..]
            .iter()
            .enumerate()
            .map(|(i, unit)| {
                let k = match fourier.layout()[unit[0]] {
                    SpectralRow::SelfConjugate(k) | SpectralRow::Real(k) | SpectralRow::Imag(k) => k,
                };
                let w = (1.0 + radius(k)).powf(-decay);
                (rng.uniform().max(f64::MIN_POSITIVE).ln() / w, i)
            })
            .collect();
        keyed.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        let order = keyed.into_iter().map(|(_, i)| i).collect();
        Self::fourier_from_order(fourier, m, order, seed)
    }

    fn check_fourier_dims(rows: usize, cols: usize, m: usize) -> Result<()> {
        let n = rows * cols;
        if n == 0 {
            return Err(Error::invalid("empty image"));
        }
        if m == 0 || m > n {
            return Err(Error::invalid(format!(
                "need 1 <= m <= rows*cols = {n}, got m={m}"
            )));
        }
        Ok(())
    }

    /// Keeps DC, then frequency units (indices past DC) in `order` while
    /// they fit.
    fn fourier_from_order(fourier: RealFourier2d, m: usize, order: Vec<usize>, seed: u64) -> Result<Self> {
        let n = fourier.rows() * fourier.cols();
        let mut units = fourier.frequency_units();
        let dc = units.remove(0);
        let mut kept = dc;
        let mut spare_pair = None;
        for &u in &order {
            let unit = &units[u];
            let room = m - kept.len();
            if room == 0 {
                break;
            }
            if unit.len() <= room {
                kept.extend_from_slice(unit);
            } else if spare_pair.is_none() {
                spare_pair = Some(unit[0]);
            }
        }
        if kept.len() < m {
            if let Some(re) = spare_pair {
                kept.push(re);
            }
        }
        debug_assert_eq!(kept.len(), m);
        let mask = SamplingMask::new(n, kept)?;
        Ok(Self::from_basis(
            OrthoBasis::Fourier2d(fourier),
            mask,
            OperatorKind::PartialFourier2d,
            seed,
        ))
    }

    /// `R·U` for an arbitrary orthonormal basis and mask.
    pub fn subsampled(basis: OrthoBasis, mask: SamplingMask) -> Result<Self> {
        Error::check_len(basis.dim(), mask.total())?;
        let kind = match basis {
            OrthoBasis::Dct(_) => OperatorKind::SubsampledDct,
            OrthoBasis::Hadamard(_) => OperatorKind::PermutedSubsampledHadamard,
            OrthoBasis::Fourier2d(_) => OperatorKind::PartialFourier2d,
        };
        Ok(Self::from_basis(basis, mask, kind, 0))
    }

    fn from_basis(basis: OrthoBasis, mask: SamplingMask, kind: OperatorKind, seed: u64) -> Self {
        LinearMap {
            in_dim: basis.dim(),
            out_dim: mask.len(),
            repr: Repr::Subsampled { basis, mask },
            kind,
            partial_isometry: true,
            norm_sq: 1.0,
            seed,
        }
    }

    /// Dense row-major `rows × cols` matrix. `‖M‖²` is estimated by power
    /// iteration. The partial-isometry flag is set only if `M Mᵀ = I` holds
    /// to `1e-12`.
    pub fn dense(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        Self::dense_as(rows, cols, data, OperatorKind::DenseMatrix)
    }

    /// Synthesis dictionary `W` from a dense `n × p` matrix whose columns are
    /// atoms: `apply` synthesizes a signal from `p` coefficients and
    /// `adjoint` is the analysis operator `W*`.
    pub fn dictionary(n: usize, p: usize, data: Vec<f64>) -> Result<Self> {
        Self::dense_as(n, p, data, OperatorKind::Dictionary)
    }

    fn dense_as(rows: usize, cols: usize, data: Vec<f64>, kind: OperatorKind) -> Result<Self> {
        Error::check_len(rows * cols, data.len())?;
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("matrix has non-finite entries"));
        }
        let mut map = LinearMap {
            repr: Repr::Dense { rows, cols, data },
            kind,
            in_dim: cols,
            out_dim: rows,
            partial_isometry: false,
            norm_sq: 0.0,
            seed: 0,
        };
        map.partial_isometry = map.rows_orthonormal();
        map.norm_sq = if map.partial_isometry {
            1.0
        } else {
            NORM_SAFETY * estimate_norm_sq(&map, POWER_ITERATIONS, POWER_SEED)
        };
        Ok(map)
    }

    /// Tight cosine frame of length-`n` signals with `redundancy` 1 or 2.
    ///
    /// Redundancy 1 is the orthonormal DCT-II basis. Redundancy 2 stacks the
    /// DCT-II and DCT-IV bases, scaled by `1/√2` so that `W W* = I`.
    pub fn dct_frame(n: usize, redundancy: usize) -> Result<Self> {
        let repr = match redundancy {
            1 => Repr::DctBasisDictionary {
                dct2: DctBasis::new(n),
            },
            2 => Repr::DctFrame {
                dct2: DctBasis::new(n),
                dct4: Dct4Basis::new(n),
            },
            r => return Err(Error::invalid(format!("unsupported frame redundancy {r}"))),
        };
        Ok(LinearMap {
            repr,
            kind: OperatorKind::Dictionary,
            in_dim: redundancy * n,
            out_dim: n,
            partial_isometry: true,
            norm_sq: 1.0,
            seed: 0,
        })
    }

    /// Stacked forward differences `[D₁; D₂]` of a row-major image, mapping
    /// `rows·cols` pixels to `2·rows·cols` differences.
    pub fn finite_difference_2d(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::invalid("empty image"));
        }
        Ok(LinearMap {
            repr: Repr::FiniteDifference { rows, cols },
            kind: OperatorKind::FiniteDifference2d,
            in_dim: rows * cols,
            out_dim: 2 * rows * cols,
            partial_isometry: false,
            norm_sq: 8.0,
            seed: 0,
        })
    }

    /// `outer ∘ inner`. A partial isometry when both factors are.
    pub fn compose(outer: Arc<LinearMap>, inner: Arc<LinearMap>) -> Result<Self> {
        Error::check_len(outer.in_dim, inner.out_dim)?;
        Ok(LinearMap {
            kind: OperatorKind::Composition,
            in_dim: inner.in_dim,
            out_dim: outer.out_dim,
            partial_isometry: outer.partial_isometry && inner.partial_isometry,
            norm_sq: outer.norm_sq * inner.norm_sq,
            seed: 0,
            repr: Repr::Compose { outer, inner },
        })
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    /// True iff `A A* = I` on the output space.
    pub fn is_partial_isometry(&self) -> bool {
        self.partial_isometry
    }

    /// Upper bound on `‖A‖²`.
    pub fn norm_sq(&self) -> f64 {
        self.norm_sq
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// The `(U, R)` pair when this map is `R·U` with `U` orthonormal.
    pub fn transform_factorization(&self) -> Option<(&OrthoBasis, &SamplingMask)> {
        match &self.repr {
            Repr::Subsampled { basis, mask } => Some((basis, mask)),
            _ => None,
        }
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.out_dim];
        self.apply_into(x, &mut out)?;
        Ok(out)
    }

    pub fn adjoint(&self, y: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.in_dim];
        self.adjoint_into(y, &mut out)?;
        Ok(out)
    }

    pub fn apply_counted(&self, x: &[f64], counter: &CallCounter) -> Result<Vec<f64>> {
        counter.add(1);
        self.apply(x)
    }

    pub fn adjoint_counted(&self, y: &[f64], counter: &CallCounter) -> Result<Vec<f64>> {
        counter.add(1);
        self.adjoint(y)
    }

    pub fn apply_into(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        Error::check_len(self.in_dim, x.len())?;
        Error::check_len(self.out_dim, out.len())?;
        match &self.repr {
            Repr::Subsampled { basis, mask } => {
                let mut full = vec![0.0; basis.dim()];
                basis.forward(x, &mut full);
                for (o, &i) in out.iter_mut().zip(mask.indices()) {
                    *o = full[i];
                }
            }
            Repr::Dense { cols, data, .. } => {
                for (o, row) in out.iter_mut().zip(data.chunks_exact(*cols)) {
                    *o = dot(row, x);
                }
            }
            Repr::DctBasisDictionary { dct2 } => {
                OrthoBasis::Dct(dct2.clone()).inverse(x, out);
            }
            Repr::DctFrame { dct2, dct4 } => {
                let n = self.out_dim;
                let mut part = vec![0.0; n];
                OrthoBasis::Dct(dct2.clone()).inverse(&x[..n], out);
                dct4.apply(&x[n..], &mut part);
                let h = std::f64::consts::FRAC_1_SQRT_2;
                for (o, p) in out.iter_mut().zip(&part) {
                    *o = h * (*o + p);
                }
            }
            Repr::FiniteDifference { rows, cols } => {
                forward_difference(x, *rows, *cols, out);
            }
            Repr::Compose { outer, inner } => {
                let mid = inner.apply(x)?;
                outer.apply_into(&mid, out)?;
            }
        }
        Ok(())
    }

    pub fn adjoint_into(&self, y: &[f64], out: &mut [f64]) -> Result<()> {
        Error::check_len(self.out_dim, y.len())?;
        Error::check_len(self.in_dim, out.len())?;
        match &self.repr {
            Repr::Subsampled { basis, mask } => {
                let full = mask.extend(y);
                basis.inverse(&full, out);
            }
            Repr::Dense { cols, data, .. } => {
                out.iter_mut().for_each(|v| *v = 0.0);
                for (row, &yi) in data.chunks_exact(*cols).zip(y) {
                    for (o, a) in out.iter_mut().zip(row) {
                        *o += a * yi;
                    }
                }
            }
            Repr::DctBasisDictionary { dct2 } => {
                OrthoBasis::Dct(dct2.clone()).forward(y, out);
            }
            Repr::DctFrame { dct2, dct4 } => {
                let n = self.out_dim;
                let (lo, hi) = out.split_at_mut(n);
                OrthoBasis::Dct(dct2.clone()).forward(y, lo);
                dct4.apply(y, hi);
                let h = std::f64::consts::FRAC_1_SQRT_2;
                out.iter_mut().for_each(|v| *v *= h);
            }
            Repr::FiniteDifference { rows, cols } => {
                forward_difference_adjoint(y, *rows, *cols, out);
            }
            Repr::Compose { outer, inner } => {
                let mid = outer.adjoint(y)?;
                inner.adjoint_into(&mid, out)?;
            }
        }
        Ok(())
    }

    fn rows_orthonormal(&self) -> bool {
        let Repr::Dense { rows, cols, data } = &self.repr else {
            return false;
        };
        if rows > cols {
            return false;
        }
        let r: Vec<&[f64]> = data.chunks_exact(*cols).collect();
        for a in 0..*rows {
            for b in a..*rows {
                let g = dot(r[a], r[b]);
                let want = if a == b { 1.0 } else { 0.0 };
                if (g - want).abs() > 1e-12 {
                    return false;
                }
            }
        }
        true
    }
}

/// Power-iteration estimate of `‖A‖²` (the top eigenvalue of `A*A`).
///
/// Runs at least `iterations` steps, then keeps going while the Rayleigh
/// quotient still moves by more than `1e-14` relative, up to
/// [`POWER_ITERATIONS_MAX`] steps in total.
pub fn estimate_norm_sq(op: &LinearMap, iterations: usize, seed: u64) -> f64 {
    let mut rng = Rng64::new(seed);
    let mut v: Vec<f64> = (0..op.in_dim()).map(|_| rng.gaussian()).collect();
    let mut nv = norm2(&v);
    if nv == 0.0 {
        return 0.0;
    }
    v.iter_mut().for_each(|x| *x /= nv);
    let mut estimate: f64 = 0.0;
    for k in 0..POWER_ITERATIONS_MAX.max(iterations) {
        let av = op.apply(&v).expect("dimensions fixed by construction");
        let next = dot(&av, &av);
        let settled = (next - estimate).abs() <= 1e-14 * next;
        estimate = estimate.max(next);
        if k + 1 >= iterations.max(1) && settled {
            break;
        }
        let w = op.adjoint(&av).expect("dimensions fixed by construction");
        nv = norm2(&w);
        if nv == 0.0 {
            return 0.0;
        }
        v = w.into_iter().map(|x| x / nv).collect();
    }
    estimate
}

/// Operator description read from a config section:
///
/// ```text
/// [operator]
/// kind = dct            # dct | hadamard | fourier2d
/// n = 4096              # signal length (dct, hadamard)
/// rows = 128            # image dims (fourier2d)
/// cols = 128
/// m = 512
/// seed = 1
/// density_decay = 2     # optional, fourier2d only; 0 samples uniformly
/// ```
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorSpec {
    pub kind: OperatorKind,
    pub n: usize,
    pub m: usize,
    pub rows: usize,
    pub cols: usize,
    /// Low-frequency preference of `fourier2d` sampling; `0` is uniform.
    pub density_decay: f64,
    pub seed: u64,
}

impl OperatorSpec {
    pub fn from_section(sec: &Section) -> std::result::Result<Self, ConfigError> {
        let kind_str = sec.get_str("kind")?;
        let kind = parse_kind(kind_str).ok_or_else(|| ConfigError::InvalidValue {
            key: sec.qualified("kind"),
            value: kind_str.to_string(),
            reason: "expected dct, hadamard or fourier2d".into(),
        })?;
        let (rows, cols, n) = if kind == OperatorKind::PartialFourier2d {
            let rows: usize = sec.get("rows")?;
            let cols: usize = sec.get("cols")?;
            (rows, cols, rows * cols)
        } else {
            (0, 0, sec.get("n")?)
        };
        Ok(OperatorSpec {
            kind,
            n,
            m: sec.get("m")?,
            rows,
            cols,
            density_decay: sec.get_or("density_decay", 0.0)?,
            seed: sec.get_or("seed", 0u64)?,
        })
    }

    pub fn build(&self) -> Result<LinearMap> {
        match self.kind {
            OperatorKind::SubsampledDct => LinearMap::subsampled_dct(self.n, self.m, self.seed),
            OperatorKind::PermutedSubsampledHadamard => {
                LinearMap::permuted_subsampled_hadamard(self.n, self.m, self.seed)
            }
            OperatorKind::PartialFourier2d if self.density_decay > 0.0 => {
                LinearMap::partial_fourier2d_variable_density(self.rows, self.cols, self.m, self.density_decay, self.seed)
            }
            OperatorKind::PartialFourier2d => {
                LinearMap::partial_fourier2d(self.rows, self.cols, self.m, self.seed)
            }
            k => Err(Error::Unsupported(format!("operator kind {k} cannot be built from a config"))),
        }
    }
}

pub fn parse_kind(s: &str) -> Option<OperatorKind> {
    match s.trim().to_ascii_lowercase().as_str() {
        "dct" | "subsampled-dct" => Some(OperatorKind::SubsampledDct),
        "hadamard" | "permuted-hadamard" => Some(OperatorKind::PermutedSubsampledHadamard),
        "fourier2d" | "partial-fourier2d" => Some(OperatorKind::PartialFourier2d),
        _ => None,
    }
}

#[cfg(test)]
mod tests;
