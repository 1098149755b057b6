//! Hyperelastic constitutive models in plane strain.

use serde::{Deserialize, Serialize};

use crate::error::{IfedError, Result};
use crate::linalg::{det, inverse, transpose, Mat2};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum Material {
    /// Deviatoric neo-Hookean in modified invariants plus a volumetric
    /// stabilization with numerical bulk modulus `kappa_stab`.
    ModifiedNeoHookean { g: f64, kappa_stab: f64 },
    /// `P = G (F − F⁻ᵀ)`.
    IncompressibleNeoHookean { g: f64 },
    /// No elastic stress; rigidity comes from tether forces.
    RigidPenalty { kappa_b: f64, eta_b: f64 },
}

/// Penalty pressure `π = −(κ/J) ln J`.
pub fn stabilization_pressure(kappa_stab: f64, j: f64) -> f64 {
    -(kappa_stab / j) * j.ln()
}

impl Material {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Self::ModifiedNeoHookean { g, kappa_stab } => g > 0.0 && kappa_stab >= 0.0,
            Self::IncompressibleNeoHookean { g } => g > 0.0,
            Self::RigidPenalty { kappa_b, eta_b } => kappa_b >= 0.0 && eta_b >= 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(IfedError::Unsupported(format!("invalid material parameters {self:?}")))
        }
    }

    pub fn is_rigid(&self) -> bool {
        matches!(self, Self::RigidPenalty { .. })
    }

    /// Strain energy density `Ψ(F)`.
    pub fn energy(&self, f: &Mat2) -> f64 {
        let j = det(f);
        let i1 = f[0][0].powi(2) + f[0][1].powi(2) + f[1][0].powi(2) + f[1][1].powi(2);
        match *self {
            Self::ModifiedNeoHookean { g, kappa_stab } => {
                let i1_bar = j.powf(-2.0 / 3.0) * (i1 + 1.0);
                0.5 * g * (i1_bar - 3.0) + 0.5 * kappa_stab * j.ln().powi(2)
            }
            Self::IncompressibleNeoHookean { g } => 0.5 * g * (i1 - 2.0) - g * j.ln(),
            Self::RigidPenalty { .. } => 0.0,
        }
    }

    /// First Piola–Kirchhoff stress. `element` is only used to label errors.
    pub fn pk1(&self, f: &Mat2, element: usize) -> Result<Mat2> {
        let j = det(f);
        if self.is_rigid() {
            return Ok([[0.0; 2]; 2]);
        }
        if !(j > 0.0) {
            return Err(IfedError::InvertedElement { element, det: j });
        }
        let f_inv_t = transpose(&inverse(f).expect("det checked above"));
        let mut p = [[0.0; 2]; 2];
        match *self {
            Self::ModifiedNeoHookean { g, kappa_stab } => {
                let i1 = f[0][0].powi(2) + f[0][1].powi(2) + f[1][0].powi(2) + f[1][1].powi(2) + 1.0;
                let jm = j.powf(-2.0 / 3.0);
                let vol = -j * stabilization_pressure(kappa_stab, j);
                for a in 0..2 {
                    for b in 0..2 {
                        p[a][b] = g * jm * (f[a][b] - i1 / 3.0 * f_inv_t[a][b]) + vol * f_inv_t[a][b];
                    }
                }
            }
            Self::IncompressibleNeoHookean { g } => {
                for a in 0..2 {
                    for b in 0..2 {
                        p[a][b] = g * (f[a][b] - f_inv_t[a][b]);
                    }
                }
            }
            Self::RigidPenalty { .. } => unreachable!(),
        }
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::IDENTITY;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const BLOCK: Material = Material::ModifiedNeoHookean {
        g: 80.194,
        kappa_stab: 374.239,
    };

    fn fd_stress(m: &Material, f: &Mat2) -> Mat2 {
        let mut p = [[0.0; 2]; 2];
        for a in 0..2 {
            for b in 0..2 {
                let h = 1e-6 * f[a][b].abs().max(1.0);
                let (mut fp, mut fm) = (*f, *f);
                fp[a][b] += h;
                fm[a][b] -= h;
                p[a][b] = (m.energy(&fp) - m.energy(&fm)) / (2.0 * h);
            }
        }
        p
    }

    #[test]
    fn identity_is_stress_free() {
        for m in [BLOCK, Material::IncompressibleNeoHookean { g: 3.0 }] {
            let p = m.pk1(&IDENTITY, 0).unwrap();
            assert!(p.iter().flatten().all(|v| v.abs() < 1e-14), "{m:?}");
            assert!(m.energy(&IDENTITY).abs() < 1e-14);
        }
    }

    #[test]
    fn stabilization_vanishes_at_unit_jacobian() {
        let vol_only = Material::ModifiedNeoHookean {
            g: 1e-300,
            kappa_stab: 388.889,
        };
        let p = vol_only.pk1(&[[2.0, 0.0], [0.0, 0.5]], 0).unwrap();
        assert!(p.iter().flatten().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn stabilization_pressure_sign() {
        assert!(stabilization_pressure(1.0, 0.8) > 0.0);
        assert!(stabilization_pressure(1.0, 1.2) < 0.0);
        assert_eq!(stabilization_pressure(1.0, 1.0), 0.0);
    }

    #[test]
    fn simple_shear_matches_energy_gradient() {
        let f = [[1.0, 0.1], [0.0, 1.0]];
        let p = BLOCK.pk1(&f, 0).unwrap();
        let q = fd_stress(&BLOCK, &f);
        for a in 0..2 {
            for b in 0..2 {
                assert!((p[a][b] - q[a][b]).abs() <= 1e-6 * p[a][b].abs().max(1.0), "{p:?} vs {q:?}");
            }
        }
    }

    #[test]
    fn stress_is_energy_gradient_for_random_deformations() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let models = [BLOCK, Material::IncompressibleNeoHookean { g: 83.333 }];
        let mut checked = 0;
        while checked < 100 {
            let f = [
                [rng.gen_range(0.3..1.8), rng.gen_range(-0.6..0.6)],
                [rng.gen_range(-0.6..0.6), rng.gen_range(0.3..1.8)],
            ];
            let j = det(&f);
            if !(0.5..=2.0).contains(&j) {
                continue;
            }
            checked += 1;
            for m in &models {
                let p = m.pk1(&f, 0).unwrap();
                let q = fd_stress(m, &f);
                let scale = p.iter().flatten().fold(1.0f64, |s, v| s.max(v.abs()));
                for a in 0..2 {
                    for b in 0..2 {
                        assert!((p[a][b] - q[a][b]).abs() <= 1e-6 * scale, "{m:?} F={f:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn inverted_deformation_rejected() {
        let err = BLOCK.pk1(&[[-1.0, 0.0], [0.0, 1.0]], 17);
        assert!(matches!(err, Err(IfedError::InvertedElement { element: 17, .. })));
    }

    #[test]
    fn rigid_material_has_no_stress() {
        let m = Material::RigidPenalty { kappa_b: 1.0, eta_b: 0.0 };
        assert_eq!(m.pk1(&[[3.0, 1.0], [0.0, 2.0]], 0).unwrap(), [[0.0; 2]; 2]);
    }
}
