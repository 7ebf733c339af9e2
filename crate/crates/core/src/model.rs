//! Block operator model: assembly of `A`, `V`, `B = A + V` and `J` from
//! block data, spectral-gap detection and classification, shifted form
//! operators `S_μ = J(A − μI)`, and the relative bounds
//! `v_μ = ‖S_μ^{-1/2} V S_μ^{-1/2}‖`.

use crate::error::{Error, Result};
use crate::linalg::{
    matrix_abs_inv_sqrt, matrix_inv_sqrt, operator_norm, symmetric_eigendecomposition,
    symmetric_eigenvalues, DenseRect, DenseSymmetric, SpectralDecomposition,
};
use crate::{GAP_GUARD_FRACTION, MAX_OPERATOR_DIM};

/// How closely an eigenvector signature `⟨q, Jq⟩` must approach ±1 to be
/// assigned to a cluster.
pub const SIGNATURE_TOLERANCE: f64 = 1e-8;

/// Maximum allowed `max |J² − I|` for the involution.
pub const INVOLUTION_TOLERANCE: f64 = 1e-10;

/// Which block layout the input data describes.  All blocks are given as
/// positive definite matrices; the layout decides the signs.
///
/// * `Central`: `A = diag(a₊, −a₋)`, so the spectral gap contains zero.
/// * `CaseTwo`: `A = diag(a₊, a₋)` with `a₋` strictly below `a₊`, so the
///   gap sits on the positive half line.
/// * `CaseTwoMirrored`: `A = diag(−a₊, −a₋)` with `a₋` strictly above
///   `a₊`, the reflection of `CaseTwo` to the negative half line (`−a₊` is
///   then the upper cluster).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    Central,
    CaseTwo,
    CaseTwoMirrored,
}

impl Layout {
    pub fn as_str(self) -> &'static str {
        match self {
            Layout::Central => "central",
            Layout::CaseTwo => "case2",
            Layout::CaseTwoMirrored => "case2-mirrored",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "central" => Ok(Layout::Central),
            "case2" => Ok(Layout::CaseTwo),
            "case2-mirrored" => Ok(Layout::CaseTwoMirrored),
            other => Err(Error::InvalidArgument {
                reason: format!(
                    "unknown layout {other:?}, expected \"central\", \"case2\" or \"case2-mirrored\""
                ),
            }),
        }
    }
}

/// Validated block data for one instance: two symmetric diagonal blocks and
/// the rectangular coupling `W` that fills the off-diagonal corners of `V`.
#[derive(Debug, Clone)]
pub struct BlockOperatorSpec {
    label: String,
    layout: Layout,
    a_plus: DenseSymmetric,
    a_minus: DenseSymmetric,
    w: DenseRect,
}

impl BlockOperatorSpec {
    pub fn new(
        label: impl Into<String>,
        layout: Layout,
        a_plus: DenseSymmetric,
        a_minus: DenseSymmetric,
        w: DenseRect,
    ) -> Result<Self> {
        if w.rows() != a_plus.dim() {
            return Err(Error::DimensionMismatch {
                context: "coupling rows vs plus block",
                left: w.rows(),
                right: a_plus.dim(),
            });
        }
        if w.cols() != a_minus.dim() {
            return Err(Error::DimensionMismatch {
                context: "coupling cols vs minus block",
                left: w.cols(),
                right: a_minus.dim(),
            });
        }
        let n = a_plus.dim() + a_minus.dim();
        if n > MAX_OPERATOR_DIM {
            return Err(Error::DimensionTooLarge {
                n,
                max: MAX_OPERATOR_DIM,
            });
        }
        Ok(Self {
            label: label.into(),
            layout,
            a_plus,
            a_minus,
            w,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn a_plus(&self) -> &DenseSymmetric {
        &self.a_plus
    }

    pub fn a_minus(&self) -> &DenseSymmetric {
        &self.a_minus
    }

    pub fn w(&self) -> &DenseRect {
        &self.w
    }

    pub fn n_plus(&self) -> usize {
        self.a_plus.dim()
    }

    pub fn n_minus(&self) -> usize {
        self.a_minus.dim()
    }
}

/// Fully assembled operator data: the unperturbed `A`, the off-diagonal
/// perturbation `V`, the perturbed `B = A + V`, the involution `J`, and the
/// eigendecomposition of `A`.
#[derive(Debug, Clone)]
pub struct AssembledPair {
    label: String,
    a: DenseSymmetric,
    v: DenseSymmetric,
    b: DenseSymmetric,
    j: DenseSymmetric,
    j_diag: Vec<f64>,
    decomp_a: SpectralDecomposition,
    n_plus: usize,
    n_minus: usize,
}

impl AssembledPair {
    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn a(&self) -> &DenseSymmetric {
        &self.a
    }

    pub fn v(&self) -> &DenseSymmetric {
        &self.v
    }

    pub fn b(&self) -> &DenseSymmetric {
        &self.b
    }

    pub fn j(&self) -> &DenseSymmetric {
        &self.j
    }

    pub fn decomp_a(&self) -> &SpectralDecomposition {
        &self.decomp_a
    }

    pub fn n(&self) -> usize {
        self.n_plus + self.n_minus
    }

    pub fn n_plus(&self) -> usize {
        self.n_plus
    }

    pub fn n_minus(&self) -> usize {
        self.n_minus
    }

    /// The coupling block `W` read back out of `V`.
    pub fn w_block(&self) -> DenseRect {
        let mut w = DenseRect::zeros(self.n_plus, self.n_minus);
        for i in 0..self.n_plus {
            for j in 0..self.n_minus {
                w.set(i, j, self.v.get(i, self.n_plus + j));
            }
        }
        w
    }

    /// Splits a vector into its `H₊` and `H₋` components `(I ± J)x/2`.
    pub fn split_vector(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut plus = vec![0.0; x.len()];
        let mut minus = vec![0.0; x.len()];
        for (k, &xv) in x.iter().enumerate() {
            if self.j_diag[k] > 0.0 {
                plus[k] = xv;
            } else {
                minus[k] = xv;
            }
        }
        (plus, minus)
    }

    /// Eigenvalues of `A` split by cluster: `(Σ₋, Σ₊)`, each ascending.
    pub fn split_spectrum(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        let signs = eigenvector_signatures(&self.decomp_a, &self.j)?;
        let mut minus = Vec::new();
        let mut plus = Vec::new();
        for (k, &lambda) in self.decomp_a.eigenvalues().iter().enumerate() {
            if signs[k] > 0.0 {
                plus.push(lambda);
            } else {
                minus.push(lambda);
            }
        }
        Ok((minus, plus))
    }
}

/// Which of the gap regimes an instance falls into.
///
/// `CaseI` refines `Central` (zero inside the gap *and* the far cluster
/// within one gap length, `d₊ > d₋`); `CaseTwoMirrored` marks a spectrum
/// entirely below zero that is analyzed through the reflection `A ↦ −A`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseTag {
    Central,
    CaseI,
    CaseII,
    CaseIIMirrored,
}

impl CaseTag {
    pub fn as_str(self) -> &'static str {
        match self {
            CaseTag::Central => "central",
            CaseTag::CaseI => "case1",
            CaseTag::CaseII => "case2",
            CaseTag::CaseIIMirrored => "case2-mirrored",
        }
    }
}

/// Everything the bounds need to know about the spectral gap of `A`.
///
/// `alpha`/`beta` are the gap endpoints read from the actual spectrum
/// (`alpha = max Σ₋`, `beta = min Σ₊`).  The cluster distances `d_plus`,
/// `d_minus` are stated in the canonical frame: for `CaseIIMirrored` they
/// describe the reflected operator `−A`, where the case assumptions hold.
/// `m_plus = beta` and `m_minus = −alpha`, so the admissible shift interval
/// `(−m_minus, m_plus)` is exactly the gap.
#[derive(Debug, Clone, PartialEq)]
pub struct GapGeometry {
    pub alpha: f64,
    pub beta: f64,
    pub d_plus: f64,
    pub d_minus: f64,
    pub m_plus: f64,
    pub m_minus: f64,
    pub sigma_minus_min: f64,
    pub sigma_plus_max: f64,
    pub case_tag: CaseTag,
}

impl GapGeometry {
    pub fn gap_width(&self) -> f64 {
        self.beta - self.alpha
    }

    /// The shift interval actually used by scans and optimizers: the gap
    /// with a fraction of its width trimmed from both ends.
    pub fn guarded_interval(&self) -> (f64, f64) {
        let margin = GAP_GUARD_FRACTION * self.gap_width();
        (self.alpha + margin, self.beta - margin)
    }

    pub fn contains_guarded(&self, mu: f64) -> bool {
        let (lo, hi) = self.guarded_interval();
        mu >= lo && mu <= hi
    }

    /// Relative gap length `δ`: `(d₊ + d₋)/√(d₊d₋)` when zero lies inside
    /// the gap (CaseI), `(d₊ − d₋)/√(d₊d₋)` when the spectrum is
    /// sign-definite (CaseII and its mirror).  `None` for plain `Central`.
    pub fn delta(&self) -> Option<f64> {
        let root = (self.d_plus * self.d_minus).sqrt();
        match self.case_tag {
            CaseTag::Central => None,
            CaseTag::CaseI => Some((self.d_plus + self.d_minus) / root),
            CaseTag::CaseII | CaseTag::CaseIIMirrored => {
                Some((self.d_plus - self.d_minus) / root)
            }
        }
    }

    /// The fixed shift the two-case bound is proved with, in the canonical
    /// frame: `(d₊ − d₋)/2` for CaseI, `(d₊ + d₋)/2` for CaseII.
    pub fn fixed_shift_canonical(&self) -> Option<f64> {
        match self.case_tag {
            CaseTag::Central => None,
            CaseTag::CaseI => Some(0.5 * (self.d_plus - self.d_minus)),
            CaseTag::CaseII | CaseTag::CaseIIMirrored => {
                Some(0.5 * (self.d_plus + self.d_minus))
            }
        }
    }

    /// The same fixed shift expressed in the original (unreflected) frame,
    /// i.e. inside `(alpha, beta)`.
    pub fn fixed_shift_original(&self) -> Option<f64> {
        self.fixed_shift_canonical().map(|mu| {
            if self.case_tag == CaseTag::CaseIIMirrored {
                -mu
            } else {
                mu
            }
        })
    }

    /// Zero strictly inside the gap?
    pub fn is_central_type(&self) -> bool {
        matches!(self.case_tag, CaseTag::Central | CaseTag::CaseI)
    }

    /// Whether the cluster structure actually satisfies the sign-definiteness
    /// the two-case bound needs (`Σ₋ > 0` in CaseII, `Σ₊ < 0` mirrored).
    /// Hand-crafted inputs can carry a positive `alpha` while `Σ₋` still dips
    /// below zero; the bound is not valid there.
    pub fn case_assumptions_hold(&self) -> bool {
        match self.case_tag {
            CaseTag::Central => false,
            CaseTag::CaseI => true,
            CaseTag::CaseII => self.sigma_minus_min > 0.0,
            CaseTag::CaseIIMirrored => self.sigma_plus_max < 0.0,
        }
    }
}

/// Shifted form operator `S_μ = J(A − μI)` together with its inverse square
/// root and its smallest eigenvalue.
#[derive(Debug, Clone)]
pub struct ShiftedFormOperator {
    mu: f64,
    s: DenseSymmetric,
    inv_sqrt_s: DenseSymmetric,
    min_eig: f64,
}

impl ShiftedFormOperator {
    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn s(&self) -> &DenseSymmetric {
        &self.s
    }

    pub fn inv_sqrt_s(&self) -> &DenseSymmetric {
        &self.inv_sqrt_s
    }

    pub fn min_eig(&self) -> f64 {
        self.min_eig
    }
}

fn assert_positive_definite_block(block: &DenseSymmetric, eps_factor: f64) -> Result<Vec<f64>> {
    let values = symmetric_eigenvalues(block)?;
    let scale = values.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    let band = eps_factor * scale.max(1.0);
    let min = values[0];
    if min <= band {
        return Err(Error::BlockNotPositiveDefinite { min_eig: min });
    }
    Ok(values)
}

/// Assembles `A`, `V`, `B` and `J` from validated block data.
///
/// For the `Central` layout `A = diag(a₊, −a₋)`; for `CaseTwo`
/// `A = diag(a₊, a₋)` and the block spectra must be strictly separated with
/// `a₋` below.  Both layouts require positive definite blocks.  `V` is
/// block-antidiagonal by construction, hence exactly off-diagonal.
pub fn assemble(spec: &BlockOperatorSpec, eps_factor: f64) -> Result<AssembledPair> {
    let plus_values = assert_positive_definite_block(spec.a_plus(), eps_factor)?;
    let minus_values = assert_positive_definite_block(spec.a_minus(), eps_factor)?;

    let scale = plus_values[plus_values.len() - 1].max(minus_values[minus_values.len() - 1]);
    let band = eps_factor * scale.max(1.0);
    match spec.layout() {
        Layout::Central => {}
        // a₋ must sit strictly below a₊ on the positive half line.
        Layout::CaseTwo => {
            let max_minus = minus_values[minus_values.len() - 1];
            let min_plus = plus_values[0];
            if min_plus - max_minus <= band {
                return Err(Error::NoGap {
                    alpha: max_minus,
                    beta: min_plus,
                });
            }
        }
        // After negation −a₊ must sit strictly above −a₋, i.e. a₋ above a₊.
        Layout::CaseTwoMirrored => {
            let max_plus = plus_values[plus_values.len() - 1];
            let min_minus = minus_values[0];
            if min_minus - max_plus <= band {
                return Err(Error::NoGap {
                    alpha: -min_minus,
                    beta: -max_plus,
                });
            }
        }
    }

    let np = spec.n_plus();
    let nm = spec.n_minus();
    let n = np + nm;

    let (upper, lower) = match spec.layout() {
        Layout::Central => (spec.a_plus().clone(), spec.a_minus().scale(-1.0)),
        Layout::CaseTwo => (spec.a_plus().clone(), spec.a_minus().clone()),
        Layout::CaseTwoMirrored => (spec.a_plus().scale(-1.0), spec.a_minus().scale(-1.0)),
    };
    let a = DenseSymmetric::block_diagonal(&[&upper, &lower]);

    let w = spec.w();
    let v = DenseSymmetric::from_fn_symmetric(n, |i, j| {
        if i < np && j >= np {
            w.get(i, j - np)
        } else {
            0.0
        }
    })?;

    let b = a.add(&v)?;

    let mut j_diag = vec![1.0; n];
    for s in j_diag.iter_mut().skip(np) {
        *s = -1.0;
    }
    let j = DenseSymmetric::diagonal(&j_diag);

    // V is block-antidiagonal and J = I₊ ⊕ −I₋, so JV + VJ vanishes
    // entry-for-entry; anything else is a construction bug.
    let mut anticommutator_defect = 0.0f64;
    for i in 0..n {
        for k in 0..n {
            anticommutator_defect =
                anticommutator_defect.max(((j_diag[i] + j_diag[k]) * v.get(i, k)).abs());
        }
    }
    if anticommutator_defect > 1e-12 * v.max_abs().max(1.0) {
        return Err(Error::internal(format!(
            "assembled perturbation failed the off-diagonality check: {anticommutator_defect:.3e}"
        )));
    }

    let decomp_a = symmetric_eigendecomposition(&a)?;

    Ok(AssembledPair {
        label: spec.label().to_string(),
        a,
        v,
        b,
        j,
        j_diag,
        decomp_a,
        n_plus: np,
        n_minus: nm,
    })
}

/// Signature `⟨q_k, J q_k⟩` of each eigenvector, snapped to ±1.
fn eigenvector_signatures(
    decomp: &SpectralDecomposition,
    j: &DenseSymmetric,
) -> Result<Vec<f64>> {
    if j.dim() != decomp.dim() {
        return Err(Error::DimensionMismatch {
            context: "involution vs decomposition",
            left: j.dim(),
            right: decomp.dim(),
        });
    }
    let n = decomp.dim();
    let mut signs = Vec::with_capacity(n);
    for k in 0..n {
        let q = decomp.basis().column(k);
        let s = j.quadratic_form(&q);
        if (s.abs() - 1.0).abs() > SIGNATURE_TOLERANCE {
            return Err(Error::ClusterMismatch {
                index: k,
                signature: s,
            });
        }
        signs.push(if s > 0.0 { 1.0 } else { -1.0 });
    }
    Ok(signs)
}

fn verify_involution(j: &DenseSymmetric) -> Result<()> {
    let jj = j.to_rect().matmul(&j.to_rect())?;
    let n = j.dim();
    let mut defect = 0.0f64;
    for i in 0..n {
        for k in 0..n {
            let target = if i == k { 1.0 } else { 0.0 };
            defect = defect.max((jj.get(i, k) - target).abs());
        }
    }
    if defect > INVOLUTION_TOLERANCE {
        return Err(Error::InvalidArgument {
            reason: format!("J is not an involution: max |J² − I| = {defect:.3e}"),
        });
    }
    Ok(())
}

/// Reads the gap interval `(alpha, beta)` determined by the `J`-split of the
/// spectrum, without case classification.
fn gap_interval(
    decomp_a: &SpectralDecomposition,
    j: &DenseSymmetric,
    eps_factor: f64,
) -> Result<(f64, f64, f64, f64)> {
    let signs = eigenvector_signatures(decomp_a, j)?;
    let mut minus: Vec<f64> = Vec::new();
    let mut plus: Vec<f64> = Vec::new();
    for (k, &lambda) in decomp_a.eigenvalues().iter().enumerate() {
        if signs[k] > 0.0 {
            plus.push(lambda);
        } else {
            minus.push(lambda);
        }
    }
    if minus.is_empty() || plus.is_empty() {
        return Err(Error::NoGap {
            alpha: f64::NAN,
            beta: f64::NAN,
        });
    }
    let alpha = minus[minus.len() - 1];
    let beta = plus[0];
    let band = decomp_a.eps_band(eps_factor);
    if beta - alpha <= band {
        return Err(Error::NoGap { alpha, beta });
    }
    Ok((alpha, beta, minus[0], plus[plus.len() - 1]))
}

/// Detects and classifies the spectral gap of `A` with respect to the
/// involution `J`.
///
/// The split is determined by `J` (each eigenvector must be aligned with one
/// of its eigenspaces); a hint, when supplied, must bracket the detected gap
/// from the outside, `hint.0 ≤ alpha` and `beta ≤ hint.1`, or the call fails
/// with a hint mismatch.  A cluster endpoint within the safety band of zero
/// is rejected as near-singular, since every regime needs `A` invertible.
pub fn detect_gap(
    decomp_a: &SpectralDecomposition,
    j: &DenseSymmetric,
    hint: Option<(f64, f64)>,
    eps_factor: f64,
) -> Result<GapGeometry> {
    verify_involution(j)?;
    let (alpha, beta, sigma_minus_min, sigma_plus_max) = gap_interval(decomp_a, j, eps_factor)?;
    let band = decomp_a.eps_band(eps_factor);

    if alpha.abs() <= band {
        return Err(Error::NearSingular {
            eigenvalue: alpha,
            band,
        });
    }
    if beta.abs() <= band {
        return Err(Error::NearSingular {
            eigenvalue: beta,
            band,
        });
    }

    let (case_tag, d_plus, d_minus) = if alpha > 0.0 {
        (CaseTag::CaseII, beta, alpha)
    } else if beta < 0.0 {
        (CaseTag::CaseIIMirrored, -alpha, -beta)
    } else {
        let far = -sigma_minus_min;
        if beta > far {
            (CaseTag::CaseI, beta, far)
        } else {
            (CaseTag::Central, beta, -alpha)
        }
    };

    if let Some((lo, hi)) = hint {
        if !(lo < hi) || !(lo <= alpha && beta <= hi) {
            return Err(Error::HintMismatch {
                hint_lo: lo,
                hint_hi: hi,
                alpha,
                beta,
            });
        }
    }

    Ok(GapGeometry {
        alpha,
        beta,
        d_plus,
        d_minus,
        m_plus: beta,
        m_minus: -alpha,
        sigma_minus_min,
        sigma_plus_max,
        case_tag,
    })
}

/// Operator norm of the anticommutator `JV + VJ`; zero exactly when `V` is
/// off-diagonal with respect to `J`.
pub fn verify_off_diagonal(v: &DenseSymmetric, j: &DenseSymmetric) -> Result<f64> {
    if v.dim() != j.dim() {
        return Err(Error::DimensionMismatch {
            context: "perturbation vs involution",
            left: v.dim(),
            right: j.dim(),
        });
    }
    let jv = j.to_rect().matmul(&v.to_rect())?;
    let vj = v.to_rect().matmul(&j.to_rect())?;
    let anticommutator = DenseSymmetric::from_rect(&jv.add(&vj)?)?;
    operator_norm(&anticommutator)
}

/// Builds `S_μ = J(A − μI)` for a shift inside the guarded gap, together
/// with its inverse square root.
pub fn shifted_form_operator(
    pair: &AssembledPair,
    mu: f64,
    eps_factor: f64,
) -> Result<ShiftedFormOperator> {
    let (alpha, beta, _, _) = gap_interval(&pair.decomp_a, &pair.j, eps_factor)?;
    let margin = GAP_GUARD_FRACTION * (beta - alpha);
    let (lo, hi) = (alpha + margin, beta - margin);
    if !(mu >= lo && mu <= hi) {
        return Err(Error::ShiftOutsideGap { mu, lo, hi });
    }

    let n = pair.n();
    let shifted = pair.a.sub(&DenseSymmetric::diagonal(&vec![mu; n]))?;
    let product = pair.j.to_rect().matmul(&shifted.to_rect())?;
    let s = DenseSymmetric::from_rect(&product)?;

    let decomp_s = symmetric_eigendecomposition(&s)?;
    let min_eig = decomp_s.min_eigenvalue();
    if min_eig <= decomp_s.eps_band(eps_factor) {
        return Err(Error::NotPositiveDefinite { min_eig });
    }
    let inv_sqrt_s = matrix_inv_sqrt(&decomp_s, eps_factor)?;

    Ok(ShiftedFormOperator {
        mu,
        s,
        inv_sqrt_s,
        min_eig,
    })
}

/// Relative bound at one shift: `v_μ = ‖S_μ^{-1/2} V S_μ^{-1/2}‖`, computed
/// through the explicit matrix product.
pub fn relative_bound_at(pair: &AssembledPair, shifted: &ShiftedFormOperator) -> Result<f64> {
    let r = shifted.inv_sqrt_s().to_rect();
    let m = r.matmul(&pair.v.to_rect())?.matmul(&r)?;
    operator_norm(&DenseSymmetric::from_rect(&m)?)
}

/// Base relative bound `v = ‖|A|^{-1/2} V |A|^{-1/2}‖`; requires `A`
/// invertible (every eigenvalue clear of the safety band).
pub fn base_relative_bound(pair: &AssembledPair, eps_factor: f64) -> Result<f64> {
    let r = matrix_abs_inv_sqrt(&pair.decomp_a, eps_factor)?.to_rect();
    let m = r.matmul(&pair.v.to_rect())?.matmul(&r)?;
    operator_norm(&DenseSymmetric::from_rect(&m)?)
}

/// Fast evaluator for `v_μ` over many shifts.
///
/// `J` and `A` commute, so in the eigenbasis `Q` of `A` the form operator is
/// diagonal with entries `s_k (λ_k − μ)`; hence
/// `v_μ = ‖D_μ (QᵀVQ) D_μ‖` with `D_μ = diag((s_k(λ_k − μ))^{-1/2})`.
/// `QᵀVQ` is computed once, after which each shift costs one symmetric
/// eigenvalue computation.
#[derive(Debug, Clone)]
pub struct RelativeBoundEvaluator {
    lambdas: Vec<f64>,
    signs: Vec<f64>,
    v_tilde: DenseSymmetric,
}

impl RelativeBoundEvaluator {
    pub fn new(pair: &AssembledPair) -> Result<Self> {
        let signs = eigenvector_signatures(&pair.decomp_a, &pair.j)?;
        let q = pair.decomp_a.basis();
        let v_tilde_rect = q.transpose().matmul(&pair.v.to_rect())?.matmul(q)?;
        let v_tilde = DenseSymmetric::from_rect(&v_tilde_rect)?;
        Ok(Self {
            lambdas: pair.decomp_a.eigenvalues().to_vec(),
            signs,
            v_tilde,
        })
    }

    /// `v_μ` for one shift; fails with a positivity error when some
    /// `s_k (λ_k − μ)` is not safely positive.
    pub fn bound_at(&self, mu: f64, eps_factor: f64) -> Result<f64> {
        let n = self.lambdas.len();
        let scale = self
            .lambdas
            .iter()
            .fold(0.0f64, |m, &x| m.max((x - mu).abs()));
        let band = eps_factor * scale.max(1.0);
        let mut weights = Vec::with_capacity(n);
        let mut min_eig = f64::INFINITY;
        for k in 0..n {
            let s = self.signs[k] * (self.lambdas[k] - mu);
            min_eig = min_eig.min(s);
            weights.push(s);
        }
        if min_eig <= band {
            return Err(Error::NotPositiveDefinite { min_eig });
        }
        for w in weights.iter_mut() {
            *w = 1.0 / w.sqrt();
        }
        let m = DenseSymmetric::from_fn_symmetric(n, |i, j| {
            weights[i] * self.v_tilde.get(i, j) * weights[j]
        })?;
        operator_norm(&m)
    }
}
