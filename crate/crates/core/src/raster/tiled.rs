use rayon::prelude::*;

use super::blend::{depth_key, BlendSplat, PixelAccum, PixelOut};
use super::camera::CameraModel;
use super::project::ProjectedSplat;
use super::registry::{RasterOptions, Rasterizer};
use super::target::RenderTarget;

pub const TILE_SIZE: u32 = 16;

/// 16×16 tile binning with per-tile depth-sorted lists.
#[derive(Debug, Default, Clone, Copy)]
pub struct TiledRasterizer;

struct Bins {
    /// `(key, splat)` sorted ascending
    order: Vec<(u64, u32)>,
    /// `tile_start[t]..tile_start[t+1]` indexes `order`
    tile_start: Vec<usize>,
}

fn bin(splats: &[ProjectedSplat], tiles_x: u32, tiles_y: u32) -> Bins {
    let mut order: Vec<(u64, u32)> = Vec::new();
    for (i, s) in splats.iter().enumerate() {
        let [x0, y0, x1, y1] = s.rect;
        for ty in y0 / TILE_SIZE..=(y1 - 1) / TILE_SIZE {
            for tx in x0 / TILE_SIZE..=(x1 - 1) / TILE_SIZE {
                order.push((depth_key(ty * tiles_x + tx, s.view_depth), i as u32));
            }
        }
    }
    // splats arrive in primitive-index order, so the secondary key breaks depth ties by index
    order.par_sort_unstable();
    let n_tiles = (tiles_x * tiles_y) as usize;
    let mut tile_start = vec![0usize; n_tiles + 1];
    for &(key, _) in &order {
        tile_start[(key >> 32) as usize + 1] += 1;
    }
    for t in 0..n_tiles {
        tile_start[t + 1] += tile_start[t];
    }
    Bins { order, tile_start }
}

impl Rasterizer for TiledRasterizer {
    fn name(&self) -> &'static str {
        "tiled"
    }

    fn rasterize(&self, splats: &[ProjectedSplat], camera: &CameraModel, opts: &RasterOptions) -> RenderTarget {
        let (w, h) = (camera.width as u32, camera.height as u32);
        let tiles_x = w.div_ceil(TILE_SIZE);
        let tiles_y = h.div_ceil(TILE_SIZE);
        let compact: Vec<BlendSplat> = splats.iter().map(BlendSplat::from).collect();
        let bins = bin(splats, tiles_x, tiles_y);

        let tiles: Vec<Vec<PixelOut>> = (0..tiles_x * tiles_y)
            .into_par_iter()
            .map(|t| {
                let (tx, ty) = (t % tiles_x, t / tiles_x);
                let (x0, y0) = (tx * TILE_SIZE, ty * TILE_SIZE);
                let (x1, y1) = ((x0 + TILE_SIZE).min(w), (y0 + TILE_SIZE).min(h));
                let tw = (x1 - x0) as usize;
                let mut acc = vec![PixelAccum::default(); tw * (y1 - y0) as usize];
                let mut remaining = acc.len();
                // splat-major: each pixel still sees its splats in depth order
                for &(_, i) in &bins.order[bins.tile_start[t as usize]..bins.tile_start[t as usize + 1]] {
                    let s = &compact[i as usize];
                    for py in s.rect[1].max(y0)..s.rect[3].min(y1) {
                        let row = (py - y0) as usize * tw;
                        let (sx0, sx1) = s.row_span(py);
                        for px in sx0.max(x0)..sx1.min(x1) {
                            let a = &mut acc[row + (px - x0) as usize];
                            if !a.is_done() {
                                a.blend(s, px, py);
                                if a.is_done() {
                                    remaining -= 1;
                                }
                            }
                        }
                    }
                    if remaining == 0 {
                        break;
                    }
                }
                acc.iter().map(PixelAccum::finish).collect()
            })
            .collect();

        let mut target = RenderTarget::new(camera.width, camera.height);
        for (t, pixels) in tiles.into_iter().enumerate() {
            let (tx, ty) = (t as u32 % tiles_x, t as u32 / tiles_x);
            let x_end = ((tx + 1) * TILE_SIZE).min(w);
            let mut it = pixels.into_iter();
            for py in ty * TILE_SIZE..((ty + 1) * TILE_SIZE).min(h) {
                for px in tx * TILE_SIZE..x_end {
                    let p = it.next().expect("tile pixel");
                    let idx = (py * w + px) as usize;
                    target.write(idx, p, opts);
                }
            }
        }
        target
    }
}

impl RenderTarget {
    pub(crate) fn write(&mut self, idx: usize, p: PixelOut, opts: &RasterOptions) {
        self.rgb[idx] = p.rgb;
        self.accum_alpha[idx] = p.alpha;
        self.depth[idx] = if opts.normalize_depth && p.alpha > 0.0 {
            p.depth / p.alpha
        } else {
            p.depth
        };
    }
}
