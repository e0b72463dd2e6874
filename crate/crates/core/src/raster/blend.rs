//! Per-pixel front-to-back compositing shared by every rasterizer backend, so
//! that backends differ only in how they select and order splats.

use super::project::{ProjectedSplat, EXTENT_SIGMA};

pub const ALPHA_MAX: f32 = 0.99;
pub const ALPHA_MIN: f32 = 1.0 / 255.0;
pub const TRANSMITTANCE_MIN: f32 = 1e-4;
const POWER_CUTOFF: f32 = -0.5 * (EXTENT_SIGMA * EXTENT_SIGMA) as f32;

/// Compact single-precision copy of a splat for the blending loop.
#[derive(Debug, Clone, Copy)]
pub struct BlendSplat {
    pub center: [f32; 2],
    pub conic: [f32; 3],
    pub opacity: f32,
    pub rgb: [f32; 3],
    pub depth: f32,
    pub rect: [u32; 4],
}

impl From<&ProjectedSplat> for BlendSplat {
    fn from(s: &ProjectedSplat) -> Self {
        Self {
            center: s.pixel_center.map(|v| v as f32),
            conic: s.conic.map(|v| v as f32),
            opacity: s.alpha_peak as f32,
            rgb: s.rgb.map(|v| v as f32),
            depth: s.view_depth as f32,
            rect: s.rect,
        }
    }
}

/// 64-bit sort key: tile id in the high word, depth bits in the low word.
/// Positive finite f32 bit patterns order like the values.
pub fn depth_key(tile: u32, depth: f64) -> u64 {
    ((tile as u64) << 32) | (depth as f32).to_bits() as u64
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PixelOut {
    pub rgb: [f32; 3],
    pub depth: f32,
    pub alpha: f32,
}

impl BlendSplat {
    /// Pixel columns of row `py` that can pass the cutoff test, rounded
    /// outward; always a subrange of `rect`.
    #[inline]
    pub fn row_span(&self, py: u32) -> (u32, u32) {
        let [a, b, c] = self.conic;
        let dy = self.center[1] - (py as f32 + 0.5);
        // a dx^2 + 2 b dy dx + c dy^2 <= -2 * cutoff
        let disc = b * b * dy * dy - a * (c * dy * dy + 2.0 * POWER_CUTOFF);
        if !(a > 0.0) || !disc.is_finite() {
            return (self.rect[0], self.rect[2]);
        }
        if disc < 0.0 {
            return (self.rect[0], self.rect[0]);
        }
        let r = disc.sqrt();
        let (lo, hi) = ((-b * dy - r) / a, (-b * dy + r) / a);
        // sx = center - dx, pixel = sx - 0.5
        let x_lo = (self.center[0] - hi - 0.5).floor();
        let x_hi = (self.center[0] - lo - 0.5).ceil() + 1.0;
        let clamp = |v: f32| v.clamp(self.rect[0] as f32, self.rect[2] as f32) as u32;
        (clamp(x_lo), clamp(x_hi))
    }
}

/// Running front-to-back state of one pixel.
#[derive(Debug, Clone, Copy)]
pub struct PixelAccum {
    t: f32,
    rgb: [f32; 3],
    depth: f32,
    done: bool,
}

impl Default for PixelAccum {
    fn default() -> Self {
        Self {
            t: 1.0,
            rgb: [0.0; 3],
            depth: 0.0,
            done: false,
        }
    }
}

impl PixelAccum {
    /// True once transmittance has run out; later splats are ignored.
    #[inline]
    pub fn is_done(&self) -> bool {
        self.done
    }

    /// Blends `s` into pixel `(px, py)`. Splats must arrive in depth order and
    /// the pixel must lie inside `s.rect`.
    #[inline]
    pub fn blend(&mut self, s: &BlendSplat, px: u32, py: u32) {
        let dx = s.center[0] - (px as f32 + 0.5);
        let dy = s.center[1] - (py as f32 + 0.5);
        let power = -0.5 * (s.conic[0] * dx * dx + s.conic[2] * dy * dy) - s.conic[1] * dx * dy;
        if power > 0.0 || power < POWER_CUTOFF {
            return;
        }
        let alpha = (s.opacity * power.exp()).min(ALPHA_MAX);
        if alpha < ALPHA_MIN {
            return;
        }
        let next_t = self.t * (1.0 - alpha);
        if next_t < TRANSMITTANCE_MIN {
            self.done = true;
            return;
        }
        let w = alpha * self.t;
        for c in 0..3 {
            self.rgb[c] += s.rgb[c] * w;
        }
        self.depth += s.depth * w;
        self.t = next_t;
    }

    pub fn finish(&self) -> PixelOut {
        PixelOut {
            rgb: self.rgb,
            depth: self.depth,
            alpha: 1.0 - self.t,
        }
    }
}

/// Composites the depth-ordered `splats` at pixel `(px, py)`.
#[inline]
pub fn composite_pixel<'a>(px: u32, py: u32, splats: impl Iterator<Item = &'a BlendSplat>) -> PixelOut {
    let mut acc = PixelAccum::default();
    for s in splats {
        if px < s.rect[0] || px >= s.rect[2] || py < s.rect[1] || py >= s.rect[3] {
            continue;
        }
        acc.blend(s, px, py);
        if acc.is_done() {
            break;
        }
    }
    acc.finish()
}
