//! Approximation-ratio functions for the two removal rules and the
//! closed-form k-median ratio, reproduced numerically.
//!
//! Both quartics share one shape parameter m: the radius rule uses
//! m = (c-1)/2 and the mid-range rule m = c-1, so the two ratio functions
//! coincide under c -> 2c-1. Root finding runs in double precision
//! internally regardless of the caller's scalar type.

use std::io::Write;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Bisection bracket for the quartic root; the target root is the unique
/// solution greater than 1 and sits well inside this range for every c > 1.
const BRACKET_LO: f64 = 1.0 + 1e-9;
const BRACKET_HI: f64 = 100.0;
const MAX_BISECTIONS: usize = 200;

/// The quartic whose root > 1 determines the ratio for shape parameter m:
/// ((1+sqrt(m))^2 x^2 - m)(x-1)^2 - 2x + 1.
fn quartic(m: f64, x: f64) -> f64 {
    let a = (1.0 + m.sqrt()).powi(2);
    (a * x * x - m) * (x - 1.0).powi(2) - 2.0 * x + 1.0
}

/// Root diagnostics for one solved quartic.
#[derive(Debug, Clone, Copy)]
struct RootInfo {
    ratio: f64,
    root: f64,
    residual: f64,
}

fn solve_ratio(m: f64, tol: f64) -> Result<RootInfo> {
    if !(m > 0.0) {
        return Err(Error::contract(format!(
            "shape parameter must be positive, got m={m}"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::contract(format!("tolerance must be positive, got {tol}")));
    }
    let f = |x: f64| quartic(m, x);
    let (mut lo, mut hi) = (BRACKET_LO, BRACKET_HI);
    let (flo, fhi) = (f(lo), f(hi));
    if flo == 0.0 {
        hi = lo;
    } else if fhi == 0.0 {
        lo = hi;
    } else if flo.signum() == fhi.signum() {
        return Err(Error::RootFind(format!(
            "no sign change on [{lo}, {hi}] for m={m}: f(lo)={flo:.3e}, f(hi)={fhi:.3e}"
        )));
    }
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..MAX_BISECTIONS {
        mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 || hi - lo <= f64::EPSILON * mid {
            break;
        }
        if fm.signum() == f(lo).signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let residual = f(mid).abs();
    if residual > tol {
        return Err(Error::RootFind(format!(
            "residual {residual:.3e} exceeds tolerance {tol:.3e} for m={m}"
        )));
    }
    let a = (1.0 + m.sqrt()).powi(2);
    Ok(RootInfo {
        ratio: a / m * mid * mid,
        root: mid,
        residual,
    })
}

/// Ratio of the radius rule under the cluster-size constant c; returns
/// (ratio, quartic root).
pub fn solve_phi<F: Real>(c: F, tol: F) -> Result<(F, F)> {
    let info = phi_info(c.to_f64_lossy(), tol.to_f64_lossy())?;
    Ok((F::from_f64_lossy(info.ratio), F::from_f64_lossy(info.root)))
}

/// Ratio of the mid-range-sum rule; returns (ratio, quartic root).
pub fn solve_psi<F: Real>(c: F, tol: F) -> Result<(F, F)> {
    let info = psi_info(c.to_f64_lossy(), tol.to_f64_lossy())?;
    Ok((F::from_f64_lossy(info.ratio), F::from_f64_lossy(info.root)))
}

fn check_c(c: f64) -> Result<()> {
    if !(c > 1.0) {
        return Err(Error::contract(format!("c must exceed 1, got {c}")));
    }
    Ok(())
}

fn phi_info(c: f64, tol: f64) -> Result<RootInfo> {
    check_c(c)?;
    solve_ratio((c - 1.0) / 2.0, tol)
}

fn psi_info(c: f64, tol: f64) -> Result<RootInfo> {
    check_c(c)?;
    solve_ratio(c - 1.0, tol)
}

/// Residual of the radius-rule quartic at `x`, for exact-root checks.
pub fn phi_quartic_residual<F: Real>(c: F, x: F) -> F {
    F::from_f64_lossy(quartic((c.to_f64_lossy() - 1.0) / 2.0, x.to_f64_lossy()).abs())
}

/// Closed-form ratio for the k-median objective:
/// max((2c-1+sqrt(4c+1)) / (2(c-1)), (c+1)/(c-1)).
pub fn zeta_kmedian<F: Real>(c: F) -> Result<F> {
    let c = c.to_f64_lossy();
    check_c(c)?;
    let a = (2.0 * c - 1.0 + (4.0 * c + 1.0).sqrt()) / (2.0 * (c - 1.0));
    let b = (c + 1.0) / (c - 1.0);
    Ok(F::from_f64_lossy(a.max(b)))
}

/// One assembled table row.
#[derive(Debug, Clone, Copy)]
pub struct RatioRow<F: Real> {
    pub c: F,
    pub phi: F,
    pub psi: F,
    pub zeta: F,
    pub root_phi: F,
    pub root_psi: F,
    pub residual_phi: F,
    pub residual_psi: F,
}

/// All three ratio functions tabulated per c, plus root diagnostics.
#[derive(Debug, Clone)]
pub struct RatioTable<F: Real> {
    pub rows: Vec<RatioRow<F>>,
    pub tolerance: F,
}

/// Solves every requested c and assembles the table.
pub fn ratio_table<F: Real>(cs: &[F], tol: F) -> Result<RatioTable<F>> {
    let tol64 = tol.to_f64_lossy();
    let mut rows = Vec::with_capacity(cs.len());
    for &c in cs {
        let c64 = c.to_f64_lossy();
        let phi = phi_info(c64, tol64)?;
        let psi = psi_info(c64, tol64)?;
        let zeta = zeta_kmedian::<F>(c)?;
        rows.push(RatioRow {
            c,
            phi: F::from_f64_lossy(phi.ratio),
            psi: F::from_f64_lossy(psi.ratio),
            zeta,
            root_phi: F::from_f64_lossy(phi.root),
            root_psi: F::from_f64_lossy(psi.root),
            residual_phi: F::from_f64_lossy(phi.residual),
            residual_psi: F::from_f64_lossy(psi.residual),
        });
    }
    Ok(RatioTable {
        rows,
        tolerance: tol,
    })
}

/// Emits the table as CSV with header `c,phi,psi,zeta,root_phi,root_psi`.
pub fn write_table_csv<F: Real>(table: &RatioTable<F>, mut writer: impl Write) -> Result<()> {
    writeln!(writer, "c,phi,psi,zeta,root_phi,root_psi")?;
    for row in &table.rows {
        writeln!(
            writer,
            "{},{:.6},{:.6},{:.6},{:.9},{:.9}",
            row.c,
            row.phi.to_f64_lossy(),
            row.psi.to_f64_lossy(),
            row.zeta.to_f64_lossy(),
            row.root_phi.to_f64_lossy(),
            row.root_psi.to_f64_lossy(),
        )?;
    }
    Ok(())
}
