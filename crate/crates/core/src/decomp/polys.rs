use super::{DecompError, NonlinearOp};
use crate::fracterm::{Series, SeriesCaps};

/// Adomian polynomials `A_0..A_n` of `N` for the components `u_0..u_n`:
/// `A_k` is the `λ^k` coefficient of `N(Σ λ^i u_i)`.
pub fn adomian_polys(
    op: &NonlinearOp,
    components: &[Series],
    caps: &SeriesCaps,
) -> Result<Vec<Series>, DecompError> {
    if components.is_empty() {
        return Err(DecompError::EmptyInput);
    }
    op.graded_apply(components, caps)
}

/// Jafari polynomials `B*_0..B*_n`: `B*_0 = N(u*_0)` and
/// `B*_k = N(S_k) - N(S_{k-1})` with `S_k = u*_0 + ... + u*_k`.
pub fn jafari_polys(
    op: &NonlinearOp,
    components: &[Series],
    caps: &SeriesCaps,
) -> Result<Vec<Series>, DecompError> {
    if components.is_empty() {
        return Err(DecompError::EmptyInput);
    }
    let mut out = Vec::with_capacity(components.len());
    let mut partial = Series::zero();
    let mut prev = Series::zero();
    for c in components {
        partial = partial.add(c).truncate(caps);
        let cur = op.apply(&partial, caps)?;
        out.push(cur.sub(&prev));
        prev = cur;
    }
    Ok(out)
}
