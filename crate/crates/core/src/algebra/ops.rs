use num_complex::Complex64;

use super::field::CoefficientField;
use super::window::Window;
use crate::error::{Error, Result};
use crate::numeric::{kahan_sum, CompensatedSum};

/// Linear (non-circular) convolution restricted to `out`:
/// `(a ∗ b)(γ) = Σ_{α+β=γ} a(α)·b(β)` for every `γ` in `out`.
pub fn convolve(a: &CoefficientField, b: &CoefficientField, out: Window) -> Result<CoefficientField> {
    check_dim(a.dim(), b.dim())?;
    check_dim(a.dim(), out.dim())?;
    Ok(convolve_unchecked(a, b, out))
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

pub(crate) fn convolve_unchecked(a: &CoefficientField, b: &CoefficientField, out: Window) -> CoefficientField {
    let d = a.dim();
    let aw = a.window();
    let bw = b.window();
    let (rb, ro) = (bw.radius() as i64, out.radius() as i64);
    let (sb, so) = (bw.side(), out.side());
    let bvals = b.values();
    let mut acc = vec![Complex64::new(0.0, 0.0); out.len()];

    let mut alpha = vec![0i64; d];
    let mut lo = vec![0i64; d];
    let mut hi = vec![0i64; d];
    let mut beta = vec![0i64; d];

    // For each nonzero a(α), β ranges over a box clipped so that α+β stays in `out`;
    // the last axis is contiguous in both b and out.
    for (ia, &av) in a.values().iter().enumerate() {
        if av.re == 0.0 && av.im == 0.0 {
            continue;
        }
        aw.coords_into(ia, &mut alpha);
        let mut empty = false;
        for k in 0..d {
            lo[k] = (-rb).max(-ro - alpha[k]);
            hi[k] = rb.min(ro - alpha[k]);
            empty |= lo[k] > hi[k];
        }
        if empty {
            continue;
        }
        beta.copy_from_slice(&lo);
        let last = d - 1;
        loop {
            let mut boff = 0usize;
            let mut ooff = 0usize;
            for k in 0..last {
                boff = boff * sb + (beta[k] + rb) as usize;
                ooff = ooff * so + (alpha[k] + beta[k] + ro) as usize;
            }
            boff *= sb;
            ooff *= so;
            for bl in lo[last]..=hi[last] {
                let bv = bvals[boff + (bl + rb) as usize];
                acc[ooff + (alpha[last] + bl + ro) as usize] += av * bv;
            }
            if !advance(&mut beta[..last], &lo[..last], &hi[..last]) {
                break;
            }
        }
    }
    CoefficientField::from_values(out, acc).expect("window length")
}

/// Odometer step over the box `lo..=hi`; false once the box is exhausted.
fn advance(beta: &mut [i64], lo: &[i64], hi: &[i64]) -> bool {
    for k in (0..beta.len()).rev() {
        if beta[k] < hi[k] {
            beta[k] += 1;
            return true;
        }
        beta[k] = lo[k];
    }
    false
}

/// Exact radius needed for the `k`-th power when the `n_max`-th power is
/// wanted on radius `out_radius` and the base has radius `r`.
fn working_radius(k: usize, n_max: usize, r: usize, out_radius: usize) -> usize {
    (k * r).min(out_radius + (n_max - k) * r)
}

/// Convolution powers `y^{*0}, …, y^{*n_max}`, each restricted to `out`.
///
/// Power `k` is computed on radius `min(k·r, R + (n_max − k)·r)`, which holds
/// every entry of `y^{*k}` that can reach the output window through later
/// factors, so the restriction to `out` equals the unrestricted power there.
pub fn conv_powers(y: &CoefficientField, n_max: usize, out: Window) -> Result<Vec<CoefficientField>> {
    check_dim(y.dim(), out.dim())?;
    let r = y.radius();
    let rout = out.radius();
    let mut powers = Vec::with_capacity(n_max + 1);
    powers.push(CoefficientField::delta(out));
    if n_max == 0 {
        return Ok(powers);
    }
    let mut current = y.resized(working_radius(1, n_max, r, rout));
    powers.push(current.resized(rout));
    for k in 2..=n_max {
        let w = out.with_radius(working_radius(k, n_max, r, rout));
        current = convolve_unchecked(&current, y, w);
        powers.push(current.resized(rout));
    }
    Ok(powers)
}

/// `y^{*n}` restricted to `out`; `n = 0` gives `δ₀`.
pub fn conv_power(y: &CoefficientField, n: i64, out: Window) -> Result<CoefficientField> {
    if n < 0 {
        return Err(Error::invalid(format!(
            "convolution power must be nonnegative, got {n}"
        )));
    }
    check_dim(y.dim(), out.dim())?;
    let n = n as usize;
    if n == 0 {
        return Ok(CoefficientField::delta(out));
    }
    let r = y.radius();
    let rout = out.radius();
    let mut current = y.resized(working_radius(1, n, r, rout));
    for k in 2..=n {
        let w = out.with_radius(working_radius(k, n, r, rout));
        current = convolve_unchecked(&current, y, w);
    }
    Ok(current.resized(rout))
}

/// `δ₀ + Σ_{n=1}^{n2} (−1)ⁿ/n! · y^{*n}`, restricted to `out`.
///
/// Terms are added in ascending `n` with compensated accumulation per entry.
pub fn conv_exp_truncated(y: &CoefficientField, n2: i64, out: Window) -> Result<CoefficientField> {
    if n2 < 1 {
        return Err(Error::invalid(format!("series order must be at least 1, got {n2}")));
    }
    let powers = conv_powers(y, n2 as usize, out)?;
    let mut acc = vec![CompensatedSum::default(); out.len()];
    let mut coef = 1.0;
    for (n, p) in powers.iter().enumerate() {
        if n > 0 {
            coef /= -(n as f64);
        }
        for (a, v) in acc.iter_mut().zip(p.values()) {
            a.add(v * coef);
        }
    }
    CoefficientField::from_values(out, acc.iter().map(CompensatedSum::value).collect())
}

/// `Σ_α |y_α|`.
pub fn l1_norm(y: &CoefficientField) -> f64 {
    kahan_sum(y.values().iter().map(|v| v.norm()))
}

/// `(y(α) + conj(y(−α)))/2`; idempotent.
pub fn hermitian_project(y: &CoefficientField) -> CoefficientField {
    let w = y.window();
    let v = y.values();
    let values = (0..v.len()).map(|o| (v[o] + v[w.mirror(o)].conj()) * 0.5).collect();
    CoefficientField::from_values(w, values).expect("window length")
}
