use crate::image::linear_to_srgb;

/// RGB, composited depth and accumulated alpha for one camera.
#[derive(Debug, Clone, PartialEq)]
pub struct RenderTarget {
    pub width: usize,
    pub height: usize,
    /// Linear RGB, unclamped apart from the SH ≥ 0 clamp.
    pub rgb: Vec<[f32; 3]>,
    /// Meters; 0 where nothing was rendered.
    pub depth: Vec<f32>,
    pub accum_alpha: Vec<f32>,
}

impl RenderTarget {
    pub fn new(width: usize, height: usize) -> Self {
        let n = width * height;
        Self {
            width,
            height,
            rgb: vec![[0.0; 3]; n],
            depth: vec![0.0; n],
            accum_alpha: vec![0.0; n],
        }
    }

    /// 8-bit sRGB bytes, clamped to [0,1].
    pub fn rgb8_srgb(&self) -> Vec<u8> {
        self.rgb
            .iter()
            .flat_map(|p| p.map(|v| (linear_to_srgb(v) * 255.0).round() as u8))
            .collect()
    }

    pub fn alpha8(&self) -> Vec<u8> {
        self.accum_alpha
            .iter()
            .map(|a| (a.clamp(0.0, 1.0) * 255.0).round() as u8)
            .collect()
    }

    /// Depth in millimeters saturated to u16.
    pub fn depth_mm16(&self) -> Vec<u16> {
        self.depth
            .iter()
            .map(|d| (d * 1000.0).round().clamp(0.0, u16::MAX as f32) as u16)
            .collect()
    }

    /// Canonical serialization (dimensions then little-endian f32 planes) used
    /// for determinism hashing; independent of any image encoder.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(16 + self.rgb.len() * 20);
        out.extend_from_slice(&(self.width as u64).to_le_bytes());
        out.extend_from_slice(&(self.height as u64).to_le_bytes());
        for p in &self.rgb {
            for c in p {
                out.extend_from_slice(&c.to_le_bytes());
            }
        }
        for d in &self.depth {
            out.extend_from_slice(&d.to_le_bytes());
        }
        for a in &self.accum_alpha {
            out.extend_from_slice(&a.to_le_bytes());
        }
        out
    }
}
