use num_complex::Complex64;

use super::{
    commutator, kappa, project_ah, zip_with, ConnectionField, CurvatureField, EndoField,
    GaugeField, GridSpec, LatticeError, Mat, OneForm, SiteField, TangentField, I,
};

fn same_shape(a: GridSpec, b: GridSpec) -> Result<(), LatticeError> {
    if a.n() == b.n() && a.rank() == b.rank() {
        Ok(())
    } else {
        Err(LatticeError::GridMismatch)
    }
}

/// Centered periodic difference along `x`.
fn diff_x(grid: GridSpec, v: &[Mat]) -> Vec<Mat> {
    let n = grid.n();
    let c = Complex64::new(0.5 * n as f64, 0.0);
    (0..grid.sites())
        .map(|s| {
            let (ix, iy) = grid.coords(s);
            let plus = &v[grid.index(ix + 1, iy)];
            let minus = &v[grid.index(ix + n - 1, iy)];
            (plus - minus) * c
        })
        .collect()
}

/// Centered periodic difference along `y`.
fn diff_y(grid: GridSpec, v: &[Mat]) -> Vec<Mat> {
    let n = grid.n();
    let c = Complex64::new(0.5 * n as f64, 0.0);
    (0..grid.sites())
        .map(|s| {
            let (ix, iy) = grid.coords(s);
            let plus = &v[grid.index(ix, iy + 1)];
            let minus = &v[grid.index(ix, iy + n - 1)];
            (plus - minus) * c
        })
        .collect()
}

/// `D⁰ₓ b_y − D⁰_y b_x`.
fn curl(b: &OneForm) -> Vec<Mat> {
    let dxby = diff_x(b.grid, &b.y);
    let dybx = diff_y(b.grid, &b.x);
    zip_with(&dxby, &dybx, |p, q| p - q)
}

/// Curvature of the fluctuation alone: `D⁰ₓa_y − D⁰_y a_x + [a_x, a_y]`.
pub fn fluctuation_curvature(a: &ConnectionField) -> SiteField {
    let grid = a.grid();
    let c = curl(a.fluctuation());
    let values = c
        .iter()
        .zip(a.ax().iter().zip(a.ay()))
        .map(|(d, (x, y))| d + commutator(x, y))
        .collect();
    SiteField { grid, values }
}

/// `F_A = i2π(d/r)·Id + D⁰ₓa_y − D⁰_y a_x + [a_x, a_y]`.
pub fn curvature(a: &ConnectionField) -> CurvatureField {
    let bg = a.grid().background_curvature();
    let mut f = fluctuation_curvature(a);
    for v in &mut f.values {
        *v += &bg;
    }
    f
}

/// `d_A b = D⁰ₓb_y − D⁰_y b_x + [a_x, b_y] + [b_x, a_y]`. The central
/// background drops out of every commutator.
pub fn d_a_one_form(a: &ConnectionField, b: &TangentField) -> Result<CurvatureField, LatticeError> {
    same_shape(a.grid(), b.grid)?;
    let c = curl(b);
    let values = (0..a.grid().sites())
        .map(|s| &c[s] + commutator(&a.ax()[s], &b.y[s]) + commutator(&b.x[s], &a.ay()[s]))
        .collect();
    Ok(SiteField {
        grid: a.grid(),
        values,
    })
}

/// `max |F_{A+b} − (F_A + d_A b + ½[b∧b])|` over all entries. The discrete
/// curvature is exactly quadratic, so this is rounding only.
pub fn curvature_translate_residual(
    a: &ConnectionField,
    b: &TangentField,
) -> Result<f64, LatticeError> {
    let lhs = curvature(&a.translate(b));
    let fa = curvature(a);
    let dab = d_a_one_form(a, b)?;
    let mut worst = 0.0f64;
    for s in 0..a.grid().sites() {
        // ½[b∧b] has dx∧dy coefficient [b_x, b_y].
        let rhs = &fa.values[s] + &dab.values[s] + commutator(&b.x[s], &b.y[s]);
        let diff = &lhs.values[s] - rhs;
        worst = diff.iter().fold(worst, |acc, z| acc.max(z.norm()));
    }
    Ok(worst)
}

/// Covariant derivative of an endomorphism field, `(D⁰ξ + [a, ξ])`.
pub fn covariant_derivative(a: &ConnectionField, xi: &EndoField) -> Result<OneForm, LatticeError> {
    same_shape(a.grid(), xi.grid)?;
    let grid = a.grid();
    let dx = diff_x(grid, &xi.values);
    let dy = diff_y(grid, &xi.values);
    let x = (0..grid.sites())
        .map(|s| &dx[s] + commutator(&a.ax()[s], &xi.values[s]))
        .collect();
    let y = (0..grid.sites())
        .map(|s| &dy[s] + commutator(&a.ay()[s], &xi.values[s]))
        .collect();
    Ok(OneForm { grid, x, y })
}

/// Fundamental vector field of the gauge action, `ξ#_A = −d_A ξ`.
pub fn infinitesimal_action(
    xi: &EndoField,
    a: &ConnectionField,
) -> Result<TangentField, LatticeError> {
    Ok(covariant_derivative(a, xi)?.scale(-1.0))
}

/// Finite unitary gauge action `u·a = u a u† − (D⁰u)u†`, with the derivative
/// term projected to `𝔲(r)`. The background is central and untouched.
pub fn gauge_act(u: &GaugeField, a: &ConnectionField) -> Result<ConnectionField, LatticeError> {
    same_shape(u.grid, a.grid())?;
    let grid = a.grid();
    let dux = diff_x(grid, &u.u);
    let duy = diff_y(grid, &u.u);
    let act = |comp: &[Mat], du: &[Mat]| -> Vec<Mat> {
        (0..grid.sites())
            .map(|s| {
                let us = &u.u[s];
                let ud = us.adjoint();
                us * &comp[s] * &ud - project_ah(&(&du[s] * &ud))
            })
            .collect()
    };
    let x = act(a.ax(), &dux);
    let y = act(a.ay(), &duy);
    ConnectionField::new(grid, x, y)
}

/// Complexified gauge action
/// `g·d_A = d_A − [(d_A^{0,1}g)g⁻¹ − ((d_A^{0,1}g)g⁻¹)*]`.
///
/// With `C` the `dz̄` coefficient of `(d_A^{0,1}g)g⁻¹`, i.e.
/// `C = ½(∇ₓg + i∇_y g)g⁻¹` for the covariant derivative `∇g = D⁰g + [a, g]`,
/// the update is `a_x ↦ a_x − (C − C†)` and `a_y ↦ a_y + i(C + C†)`.
pub fn complex_gauge_act(g: &[Mat], a: &ConnectionField) -> Result<ConnectionField, LatticeError> {
    let grid = a.grid();
    grid.check_values(g)?;
    let mut inverses = Vec::with_capacity(grid.sites());
    for (s, m) in g.iter().enumerate() {
        let sv = m.clone().svd(false, false).singular_values;
        let (lo, hi) = (sv.min(), sv.max());
        let inv = if lo > 1e-14 * hi {
            m.clone().try_inverse()
        } else {
            None
        };
        match inv {
            Some(inv) => inverses.push(inv),
            None => {
                let (ix, iy) = grid.coords(s);
                return Err(LatticeError::Singular { ix, iy });
            }
        }
    }
    let dgx = diff_x(grid, g);
    let dgy = diff_y(grid, g);
    let half = Complex64::new(0.5, 0.0);
    let mut x = Vec::with_capacity(grid.sites());
    let mut y = Vec::with_capacity(grid.sites());
    for s in 0..grid.sites() {
        let nx = &dgx[s] + commutator(&a.ax()[s], &g[s]);
        let ny = &dgy[s] + commutator(&a.ay()[s], &g[s]);
        let c = (nx + ny * I) * half * &inverses[s];
        let ca = c.adjoint();
        x.push(&a.ax()[s] - (&c - &ca));
        y.push(&a.ay()[s] + (c + ca) * I);
    }
    ConnectionField::new(grid, x, y)
}

/// Atiyah-Bott form `ω(a, b) = h² Σ [−tr(a_x b_y) + tr(b_x a_y)]`.
pub fn ab_form(a: &TangentField, b: &TangentField) -> Result<f64, LatticeError> {
    same_shape(a.grid, b.grid)?;
    let h2 = a.grid.h() * a.grid.h();
    let mut s = 0.0;
    for site in 0..a.grid.sites() {
        s += kappa(&a.x[site], &b.y[site]) - kappa(&b.x[site], &a.y[site]);
    }
    Ok(h2 * s)
}

/// `∗(a_x dx + a_y dy) = −a_y dx + a_x dy`.
pub fn hodge_star(a: &TangentField) -> TangentField {
    OneForm {
        grid: a.grid,
        x: a.y.iter().map(|m| -m).collect(),
        y: a.x.clone(),
    }
}

/// `(a|b)_{L²} = ω(a, ∗b)`.
pub fn l2_metric(a: &TangentField, b: &TangentField) -> Result<f64, LatticeError> {
    ab_form(a, &hodge_star(b))
}

pub fn l2_norm(a: &TangentField) -> f64 {
    l2_metric(a, a).expect("same grid").max(0.0).sqrt()
}

/// `|ω(ξ#_A, η) − h² Σ κ(ξ, d_A η)|`. Exact up to rounding, since `D⁰` is
/// skew-adjoint under the periodic sum and `κ` is `ad`-invariant.
pub fn momentum_residual(
    a: &ConnectionField,
    xi: &EndoField,
    eta: &TangentField,
) -> Result<f64, LatticeError> {
    let lhs = ab_form(&infinitesimal_action(xi, a)?, eta)?;
    let rhs = xi.pair(&d_a_one_form(a, eta)?);
    Ok((lhs - rhs).abs())
}

/// `dz̄` coefficient of the fluctuation: `B = ½(a_x + i a_y)`.
pub fn dolbeault_of(a: &ConnectionField) -> Vec<Mat> {
    let half = Complex64::new(0.5, 0.0);
    a.ax()
        .iter()
        .zip(a.ay())
        .map(|(x, y)| (x + y * I) * half)
        .collect()
}

/// The unique unitary fluctuation with `(0,1)`-part `B`:
/// `a_x = B − B†`, `a_y = −i(B + B†)`.
pub fn unitary_of(grid: GridSpec, b: &[Mat]) -> Result<ConnectionField, LatticeError> {
    grid.check_values(b)?;
    let x = b.iter().map(|m| m - m.adjoint()).collect();
    let y = b.iter().map(|m| (m + m.adjoint()) * (-I)).collect();
    Ok(ConnectionField::from_fluctuation_unchecked(OneForm {
        grid,
        x,
        y,
    }))
}

/// Path-ordered products of `exp(h·A_x)` along row 0 and `exp(h·A_y)` along
/// column 0.
///
/// The background is taken in the gauge `A₀ = i2π(d/r)·x·dy·Id`, which
/// vanishes on both loops, so only the fluctuation contributes.
pub fn holonomy_loops(a: &ConnectionField) -> (Mat, Mat) {
    let grid = a.grid();
    let h = Complex64::new(grid.h(), 0.0);
    let id = Mat::identity(grid.rank(), grid.rank());
    let hx = (0..grid.n()).fold(id.clone(), |acc, ix| {
        acc * (&a.ax()[grid.index(ix, 0)] * h).exp()
    });
    let hy = (0..grid.n()).fold(id, |acc, iy| acc * (&a.ay()[grid.index(0, iy)] * h).exp());
    (hx, hy)
}

/// `(1/2πi)·h²·Σ tr F`, the degree carried by a curvature field.
pub fn total_degree(f: &CurvatureField) -> f64 {
    let h2 = f.grid.h() * f.grid.h();
    let mut t = Complex64::new(0.0, 0.0);
    for m in &f.values {
        t += m.trace();
    }
    (t * h2 / (2.0 * std::f64::consts::PI * I)).re
}
