use rayon::prelude::*;

use super::blend::{composite_pixel, depth_key, BlendSplat};
use super::camera::CameraModel;
use super::project::ProjectedSplat;
use super::registry::{RasterOptions, Rasterizer};
use super::target::RenderTarget;

/// Reference renderer: one global depth sort, every pixel visits every splat.
#[derive(Debug, Default, Clone, Copy)]
pub struct BruteForceRasterizer;

/// Pixel window `[x0, x0+width) × [y0, y0+height)` of a camera image.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PixelWindow {
    pub x0: usize,
    pub y0: usize,
    pub width: usize,
    pub height: usize,
}

impl BruteForceRasterizer {
    /// Renders only `window`; the returned target has the window's dimensions.
    pub fn rasterize_window(
        &self,
        splats: &[ProjectedSplat],
        window: PixelWindow,
        opts: &RasterOptions,
    ) -> RenderTarget {
        let mut order: Vec<(u64, u32)> = splats
            .iter()
            .enumerate()
            .map(|(i, s)| (depth_key(0, s.view_depth), i as u32))
            .collect();
        order.sort_unstable();
        let sorted: Vec<BlendSplat> = order
            .iter()
            .map(|&(_, i)| BlendSplat::from(&splats[i as usize]))
            .collect();

        let rows: Vec<Vec<_>> = (0..window.height)
            .into_par_iter()
            .map(|dy| {
                let py = (window.y0 + dy) as u32;
                (0..window.width)
                    .map(|dx| composite_pixel((window.x0 + dx) as u32, py, sorted.iter()))
                    .collect()
            })
            .collect();
        let mut target = RenderTarget::new(window.width, window.height);
        for (dy, row) in rows.into_iter().enumerate() {
            for (dx, p) in row.into_iter().enumerate() {
                target.write(dy * window.width + dx, p, opts);
            }
        }
        target
    }
}

impl Rasterizer for BruteForceRasterizer {
    fn name(&self) -> &'static str {
        "brute-force"
    }

    fn rasterize(&self, splats: &[ProjectedSplat], camera: &CameraModel, opts: &RasterOptions) -> RenderTarget {
        self.rasterize_window(
            splats,
            PixelWindow {
                x0: 0,
                y0: 0,
                width: camera.width,
                height: camera.height,
            },
            opts,
        )
    }
}
