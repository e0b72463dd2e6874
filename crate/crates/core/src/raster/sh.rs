//! Real spherical-harmonic color evaluation up to degree 3.

use nalgebra::Vector3;

use crate::types::{MAX_SH_COEFFS, SH_C0};

pub const SH_C1: f64 = 0.488_602_511_902_919_9;
pub const SH_C2: [f64; 5] = [
    1.092_548_430_592_079_2,
    -1.092_548_430_592_079_2,
    0.315_391_565_252_520_05,
    -1.092_548_430_592_079_2,
    0.546_274_215_296_039_6,
];
pub const SH_C3: [f64; 7] = [
    -0.590_043_589_926_643_5,
    2.890_611_442_640_554,
    -0.457_045_799_464_465_8,
    0.373_176_332_590_115_4,
    -0.457_045_799_464_465_8,
    1.445_305_721_320_277,
    -0.590_043_589_926_643_5,
];

/// Basis values for a unit direction, in coefficient order.
pub fn sh_basis(dir: &Vector3<f64>) -> [f64; MAX_SH_COEFFS] {
    let (x, y, z) = (dir.x, dir.y, dir.z);
    let (xx, yy, zz) = (x * x, y * y, z * z);
    [
        SH_C0,
        -SH_C1 * y,
        SH_C1 * z,
        -SH_C1 * x,
        SH_C2[0] * x * y,
        SH_C2[1] * y * z,
        SH_C2[2] * (2.0 * zz - xx - yy),
        SH_C2[3] * x * z,
        SH_C2[4] * (xx - yy),
        SH_C3[0] * y * (3.0 * xx - yy),
        SH_C3[1] * x * y * z,
        SH_C3[2] * y * (4.0 * zz - xx - yy),
        SH_C3[3] * z * (2.0 * zz - 3.0 * xx - 3.0 * yy),
        SH_C3[4] * x * (4.0 * zz - xx - yy),
        SH_C3[5] * z * (xx - yy),
        SH_C3[6] * x * (xx - 3.0 * yy),
    ]
}

/// `0.5 + Σ basis_k(dir) · coeff_k` per channel, clamped at zero.
pub fn shade_sh(sh: &[[f64; 3]; MAX_SH_COEFFS], degree: u8, dir: &Vector3<f64>) -> [f64; 3] {
    let n = (degree as usize + 1).pow(2);
    let basis = sh_basis(dir);
    let mut rgb = [0.5; 3];
    for k in 0..n {
        for c in 0..3 {
            rgb[c] += basis[k] * sh[k][c];
        }
    }
    rgb.map(|v| v.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_band() {
        let mut sh = [[0.0; 3]; MAX_SH_COEFFS];
        sh[0] = [1.0, -0.5, 0.25];
        let rgb = shade_sh(&sh, 0, &Vector3::new(0.0, 0.6, 0.8));
        for c in 0..3 {
            assert_eq!(rgb[c], 0.5 + SH_C0 * sh[0][c]);
        }
    }

    #[test]
    fn zero_coefficients_give_mid_gray() {
        let sh = [[0.0; 3]; MAX_SH_COEFFS];
        for d in [Vector3::x(), -Vector3::y(), Vector3::new(0.6, 0.0, -0.8)] {
            assert_eq!(shade_sh(&sh, 3, &d), [0.5; 3]);
        }
    }

    #[test]
    fn degree_one_z_band_antisymmetry() {
        let mut sh = [[0.0; 3]; MAX_SH_COEFFS];
        sh[2] = [0.3, -0.2, 0.1];
        let up = shade_sh(&sh, 1, &Vector3::z());
        let down = shade_sh(&sh, 1, &-Vector3::z());
        for c in 0..3 {
            assert!(((up[c] - down[c]).abs() - 2.0 * 0.488_602_511_9 * sh[2][c].abs()).abs() < 1e-9);
        }
    }

    #[test]
    fn negative_result_clamped() {
        let mut sh = [[0.0; 3]; MAX_SH_COEFFS];
        sh[0] = [-10.0; 3];
        assert_eq!(shade_sh(&sh, 0, &Vector3::z()), [0.0; 3]);
    }

    /// Midpoint quadrature over the sphere: the 16 basis functions are orthonormal.
    #[test]
    fn basis_orthonormal_by_quadrature() {
        let (nt, np) = (360, 720);
        let mut gram = [[0.0f64; 16]; 16];
        for i in 0..nt {
            let theta = (i as f64 + 0.5) * std::f64::consts::PI / nt as f64;
            let w = theta.sin() * (std::f64::consts::PI / nt as f64) * (std::f64::consts::TAU / np as f64);
            for j in 0..np {
                let phi = (j as f64 + 0.5) * std::f64::consts::TAU / np as f64;
                let d = Vector3::new(theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos());
                let b = sh_basis(&d);
                for a in 0..16 {
                    for c in 0..16 {
                        gram[a][c] += w * b[a] * b[c];
                    }
                }
            }
        }
        for a in 0..16 {
            for c in 0..16 {
                let expect = if a == c { 1.0 } else { 0.0 };
                assert!((gram[a][c] - expect).abs() < 1e-4, "({a},{c}) = {}", gram[a][c]);
            }
        }
    }
}
