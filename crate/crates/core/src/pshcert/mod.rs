//! Modification of a dyadic weight to constant radial integrals, the extension
//! `Eω(x + iy) = (1/π)∫ ω(x + ty)/(1 + t²) dt`, and numerical certificates that
//! `Eω̃ + σ|y|` is plurisubharmonic on `C²`.
//!
//! For each piece, `ψ_k(t e(θ)) = 2^k χ(2^{−k}t) (T(|x|^{-2}ω_k)(0, θ) + q_k)` with `χ` the
//! annulus cutoff normalised by `∫ t^{-2} χ(t) dt = 1`, and `ω̃_k = ω_k − ψ_k`.

mod certify;
mod extension;
mod submean;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bumpcalc::{annulus_shape, kn_norm, AngularProfile, HermiteProfile, Primitive, SmoothField, Term};
use crate::error::{Error, Result};
use crate::quad;
use crate::weightgen::{AnnularPiece, DyadicWeight};
use crate::xray::{radial_xray_zero, radial_xray_zero_jet, LineQuadrature};

pub use certify::{
    RESIDUAL_SEEDS,
    certify, certify_sinogram, certification_grid, min_sigma, residual_bound_check, CertSettings, PshCertificate,
    ResidualReport,
};
pub use extension::{
    extension_eval, extension_eval_raw, verify_e_ddbar, y_abs_ddbar, DdbarCheck, DdbarSettings, Mat2,
};
pub use submean::{submean_crosscheck, SubmeanReport, SubmeanSettings};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModifySettings {
    /// Hermite nodes per period `π` of the angular profile.
    pub nodes: usize,
    /// Largest accepted interpolation residual, relative to `1 + max F`.
    pub fit_tol: f64,
}

impl Default for ModifySettings {
    fn default() -> Self {
        ModifySettings {
            nodes: 1024,
            fit_tol: 1e-8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModifiedWeight {
    pub base: DyadicWeight,
    /// `ψ_k`.
    pub corrections: Vec<SmoothField>,
    /// `ω̃_k = ω_k − ψ_k`.
    pub pieces: Vec<SmoothField>,
    /// Constant value of `−T(|x|^{-2}ω̃_k)(0, ·)`: `q_k` plus any positivity shift.
    pub q: Vec<f64>,
    /// Added to the interpolated profile where it dipped below zero between nodes.
    pub shifts: Vec<f64>,
    pub profile_residuals: Vec<f64>,
    pub kn_norms: Vec<f64>,
    /// `kn_norm(ω̃_k) / kn_norm(ω_k)`.
    pub kn_ratios: Vec<f64>,
    /// `max_k kn_norm(ω̃_k)`.
    pub c_reg: f64,
    /// `Σ q`.
    pub c_gr: f64,
    pub settings: ModifySettings,
}

impl ModifiedWeight {
    pub fn field(&self) -> SmoothField {
        self.pieces.iter().fold(SmoothField::zero(), |acc, p| acc.plus(p))
    }

    pub fn quadrature(&self, f: &SmoothField) -> LineQuadrature {
        self.base.settings.quadrature(f)
    }

    /// `ω̃(x)`.
    pub fn value(&self, x: [f64; 2]) -> f64 {
        let r = x[0].hypot(x[1]);
        self.base
            .pieces
            .iter()
            .zip(&self.pieces)
            .filter(|(p, _)| p.inner() < r && r < p.outer())
            .map(|(_, f)| f.value(x))
            .sum()
    }
}

/// `1 / ∫_R t^{-2} χ(|t|) dt` for the standard annulus cutoff `χ`.
pub fn annulus_normalisation() -> f64 {
    let shape = annulus_shape();
    let (a, b) = shape.support();
    let half = quad::adaptive(a, b, &[0.5f64.sqrt(), 2f64.sqrt()], 1e-16, 1e-14, |t| {
        shape.value_u(t * t) / (t * t)
    });
    0.5 / half
}

/// `ψ = amplitude · χ(2^{−k}|x|) · F(arg x)` with the normalised annulus cutoff.
pub fn correction_field(k: u32, profile: HermiteProfile) -> Result<SmoothField> {
    let scale = 2f64.powi(k as i32);
    let t = Term::new(
        scale * annulus_normalisation(),
        vec![
            Primitive::Radial {
                center: [0.0, 0.0],
                shape: annulus_shape().scaled(scale),
            },
            Primitive::Angular {
                profile: AngularProfile::Hermite(profile),
                phase: 0.0,
            },
        ],
    )?;
    Ok(SmoothField::new(vec![t]))
}

struct Modified {
    correction: SmoothField,
    q: f64,
    shift: f64,
    residual: f64,
}

fn modify_piece(p: &AnnularPiece, q: &LineQuadrature, s: &ModifySettings) -> Result<Modified> {
    if p.field.is_zero() {
        return Ok(Modified {
            correction: SmoothField::zero(),
            q: p.q_k,
            shift: 0.0,
            residual: 0.0,
        });
    }
    let n = s.nodes.max(8);
    let period = std::f64::consts::PI;
    let h = period / n as f64;
    let data: Vec<[f64; 4]> = (0..n)
        .into_par_iter()
        .map(|i| {
            let j = radial_xray_zero_jet(&p.field, i as f64 * h, q)?;
            Ok([j.value() + p.q_k, j.deriv(1), j.deriv(2), j.deriv(3)])
        })
        .collect::<Result<_>>()?;
    // arc-length scale of ω_k read at the inner radius
    let feature = p.field.feature() / p.inner();
    let mut profile = HermiteProfile::from_nodes(period, feature, &data)?;

    let mids: Vec<(f64, f64)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let t = (i as f64 + 0.5) * h;
            Ok((profile.value(t), radial_xray_zero(&p.field, t, q)? + p.q_k))
        })
        .collect::<Result<_>>()?;
    let residual = mids.iter().map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let scale = 1.0 + data.iter().map(|d| d[0].abs()).fold(0.0, f64::max);
    if residual > s.fit_tol * scale {
        return Err(Error::ProfileFit {
            k: p.k,
            residual,
            tol: s.fit_tol * scale,
        });
    }

    // the interpolant may dip marginally below zero between nodes near the infimum
    let low = (0..8 * n)
        .map(|i| profile.value(i as f64 * h / 8.0))
        .fold(f64::INFINITY, f64::min);
    let shift = (-low).max(0.0);
    if shift > 0.0 {
        for c in &mut profile.coeffs {
            c[0] += shift;
        }
    }
    Ok(Modified {
        correction: correction_field(p.k, profile)?,
        q: p.q_k + shift,
        shift,
        residual,
    })
}

/// Subtracts from every piece the correction making its radial integrals constant.
pub fn modify(w: &DyadicWeight) -> Result<ModifiedWeight> {
    modify_with(w, &ModifySettings::default())
}

pub fn modify_with(w: &DyadicWeight, s: &ModifySettings) -> Result<ModifiedWeight> {
    let mods: Vec<Modified> = w
        .pieces
        .iter()
        .map(|p| modify_piece(p, &w.settings.quadrature(&p.field), s))
        .collect::<Result<_>>()?;
    let pieces: Vec<SmoothField> = w
        .pieces
        .iter()
        .zip(&mods)
        .map(|(p, m)| p.field.plus(&m.correction.scaled(-1.0)))
        .collect();
    let kn_norms: Vec<f64> = pieces.iter().map(|f| kn_norm(f, &w.settings.kn_grid)).collect();
    let kn_ratios = w
        .pieces
        .iter()
        .zip(&kn_norms)
        .map(|(p, &n)| if p.kn_norm > 0.0 { n / p.kn_norm } else { 1.0 })
        .collect();
    let q: Vec<f64> = mods.iter().map(|m| m.q).collect();
    Ok(ModifiedWeight {
        base: w.clone(),
        corrections: mods.iter().map(|m| m.correction.clone()).collect(),
        c_reg: kn_norms.iter().copied().fold(0.0, f64::max),
        c_gr: q.iter().sum(),
        q,
        shifts: mods.iter().map(|m| m.shift).collect(),
        profile_residuals: mods.iter().map(|m| m.residual).collect(),
        kn_norms,
        kn_ratios,
        pieces,
        settings: *s,
    })
}
