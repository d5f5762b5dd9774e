use super::system::{GifsSystem, Operator};
use crate::error::Result;
use crate::hausdorff::{hausdorff_with, FiniteCompact, Strategy};

/// The eight terms of the rational contraction functional `M_{T,S}(U, V)`.
///
/// With `h = H(U,V)`, `ut = H(U,TU)`, `vs = H(V,SV)`, `us = H(U,SV)`,
/// `vt = H(V,TU)`:
///
/// ```text
/// h, ut, vs, (us + vt)/2,
/// vs(1+vt)/(1+h), vs(1+ut)/(1+h), vt(1+vt)/(1+h), vt(1+ut)/(1+h)
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RationalTerms {
    pub terms: [f64; 8],
}

impl RationalTerms {
    pub fn value(&self) -> f64 {
        self.terms.iter().copied().fold(0.0, f64::max)
    }
}

pub fn rational_terms(
    sys: &GifsSystem,
    u: &FiniteCompact,
    v: &FiniteCompact,
    snap: f64,
    strategy: Strategy,
) -> Result<RationalTerms> {
    let metric = sys.metric();
    let tu = sys.apply(Operator::T, u, snap)?;
    let sv = sys.apply(Operator::S, v, snap)?;
    let h = |a: &FiniteCompact, b: &FiniteCompact| hausdorff_with(metric, a, b, strategy);
    let uv = h(u, v)?;
    let ut = h(u, &tu)?;
    let vs = h(v, &sv)?;
    let us = h(u, &sv)?;
    let vt = h(v, &tu)?;
    let den = 1.0 + uv;
    Ok(RationalTerms {
        terms: [
            uv,
            ut,
            vs,
            (us + vt) / 2.0,
            vs * (1.0 + vt) / den,
            vs * (1.0 + ut) / den,
            vt * (1.0 + vt) / den,
            vt * (1.0 + ut) / den,
        ],
    })
}

/// `M_{T,S}(U, V)`, the maximum of [`rational_terms`].
pub fn rational_functional(
    sys: &GifsSystem,
    u: &FiniteCompact,
    v: &FiniteCompact,
    snap: f64,
    strategy: Strategy,
) -> Result<f64> {
    rational_terms(sys, u, v, snap, strategy).map(|t| t.value())
}

/// Outcome of sampling `H(TU, SV) <= alpha M_{T,S}(U, V)` on set pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalContractionReport {
    /// Largest `H(TU, SV) / M(U, V)` over pairs with `M > 0`.
    pub max_ratio: f64,
    pub pairs: usize,
    pub passed: bool,
}

pub fn check_rational_contraction(
    sys: &GifsSystem,
    pairs: &[(FiniteCompact, FiniteCompact)],
    snap: f64,
    tol: f64,
    strategy: Strategy,
) -> Result<RationalContractionReport> {
    let mut max_ratio: f64 = 0.0;
    let mut passed = true;
    for (u, v) in pairs {
        let m = rational_functional(sys, u, v, snap, strategy)?;
        let tu = sys.apply(Operator::T, u, snap)?;
        let sv = sys.apply(Operator::S, v, snap)?;
        let lhs = hausdorff_with(sys.metric(), &tu, &sv, strategy)?;
        if m > 0.0 {
            max_ratio = max_ratio.max(lhs / m);
        }
        passed &= lhs <= sys.alpha_star() * m + tol;
    }
    Ok(RationalContractionReport {
        max_ratio,
        pairs: pairs.len(),
        passed,
    })
}
