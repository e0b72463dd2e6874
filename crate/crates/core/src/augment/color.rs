use crate::image::RgbImage;

/// `(h, s, v)` with hue in degrees `[0, 360)`.
pub fn rgb_to_hsv([r, g, b]: [f64; 3]) -> [f64; 3] {
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let delta = max - min;
    if delta <= 0.0 {
        return [0.0, 0.0, max];
    }
    let h = if max == r {
        60.0 * ((g - b) / delta).rem_euclid(6.0)
    } else if max == g {
        60.0 * ((b - r) / delta + 2.0)
    } else {
        60.0 * ((r - g) / delta + 4.0)
    };
    let s = if max > 0.0 { delta / max } else { 0.0 };
    [h.rem_euclid(360.0), s, max]
}

pub fn hsv_to_rgb([h, s, v]: [f64; 3]) -> [f64; 3] {
    let h = h.rem_euclid(360.0) / 60.0;
    let sector = h.floor();
    let f = h - sector;
    let p = v * (1.0 - s);
    let q = v * (1.0 - s * f);
    let t = v * (1.0 - s * (1.0 - f));
    match sector as u8 {
        0 => [v, t, p],
        1 => [q, v, p],
        2 => [p, v, t],
        3 => [p, q, v],
        4 => [t, p, v],
        _ => [v, p, q],
    }
}

/// Adds fixed HSV offsets; hue wraps, saturation and value clamp to [0, 1].
pub fn apply_hsv_shift(image: &RgbImage, hue_deg: f64, saturation: f64, value: f64) -> RgbImage {
    map_pixels(image, |px| {
        let [h, s, v] = rgb_to_hsv(px);
        hsv_to_rgb([
            (h + hue_deg).rem_euclid(360.0),
            (s + saturation).clamp(0.0, 1.0),
            (v + value).clamp(0.0, 1.0),
        ])
    })
}

/// Per-channel `in^gamma` on values clamped to [0, 1].
pub fn apply_gamma(image: &RgbImage, gamma: f64) -> RgbImage {
    map_pixels(image, |px| px.map(|c| c.clamp(0.0, 1.0).powf(gamma)))
}

/// `(1 - weight) * image + weight * overlay`, the overlay resampled to fit.
pub fn apply_overlay(image: &RgbImage, overlay: &RgbImage, weight: f64) -> RgbImage {
    let ov = overlay.resized(image.width, image.height);
    let data = image
        .data
        .iter()
        .zip(&ov.data)
        .map(|(a, b)| std::array::from_fn(|k| (1.0 - weight) * a[k] + weight * b[k]))
        .collect();
    RgbImage {
        width: image.width,
        height: image.height,
        data,
    }
}

fn map_pixels(image: &RgbImage, f: impl Fn([f64; 3]) -> [f64; 3]) -> RgbImage {
    RgbImage {
        width: image.width,
        height: image.height,
        data: image.data.iter().map(|&p| f(p)).collect(),
    }
}
