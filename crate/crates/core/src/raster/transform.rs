use super::image::{FaceBox, RasterImage};

/// Sets every pixel of `face ∩ image` to black on all channels.
pub fn apply_mask(img: &RasterImage, face: &FaceBox) -> RasterImage {
    let mut out = img.clone();
    let Some(region) = face.clip(img.width(), img.height()) else {
        return out;
    };
    let channels = img.channels();
    for y in region.y0..region.y1 {
        let start = out.index(region.x0, y, 0);
        let end = start + (region.x1 - region.x0) * channels;
        out.data_mut()[start..end].fill(0);
    }
    out
}

/// Square averaging kernel side for a face box: half the shorter box side,
/// forced odd and at least 1.
pub fn blur_kernel_size(face: &FaceBox) -> usize {
    let k = (face.w.min(face.h) / 2).max(1) as usize;
    if k.is_multiple_of(2) {
        k - 1
    } else {
        k
    }
}

/// Replaces each pixel of `face ∩ image` with the mean of the original
/// `k × k` neighbourhood (`k` from [`blur_kernel_size`]).
///
/// The window is clamped to the image and the mean is taken over the
/// clamped window. Samples outside the face box are read too. Means are
/// rounded half-up per channel.
pub fn apply_blur(img: &RasterImage, face: &FaceBox) -> RasterImage {
    let mut out = img.clone();
    let Some(region) = face.clip(img.width(), img.height()) else {
        return out;
    };
    let k = blur_kernel_size(face);
    if k == 1 {
        return out;
    }
    let radius = k / 2;
    let (w, h, ch) = (img.width(), img.height(), img.channels());

    // Summed-area table over the rows/columns the windows can touch.
    let wx0 = region.x0.saturating_sub(radius);
    let wy0 = region.y0.saturating_sub(radius);
    let wx1 = (region.x1 + radius).min(w);
    let wy1 = (region.y1 + radius).min(h);
    let tw = wx1 - wx0 + 1;
    let th = wy1 - wy0 + 1;
    let mut table = vec![0u64; tw * th * ch];
    for y in wy0..wy1 {
        let ty = y - wy0 + 1;
        for c in 0..ch {
            let mut row_sum = 0u64;
            for x in wx0..wx1 {
                let tx = x - wx0 + 1;
                row_sum += u64::from(img.get(x, y, c));
                table[(ty * tw + tx) * ch + c] = table[((ty - 1) * tw + tx) * ch + c] + row_sum;
            }
        }
    }

    let data = out.data_mut();
    for y in region.y0..region.y1 {
        let y0 = y.saturating_sub(radius);
        let y1 = (y + radius + 1).min(h);
        for x in region.x0..region.x1 {
            let x0 = x.saturating_sub(radius);
            let x1 = (x + radius + 1).min(w);
            let count = ((x1 - x0) * (y1 - y0)) as u64;
            let (ax0, ax1) = (x0 - wx0, x1 - wx0);
            let (ay0, ay1) = (y0 - wy0, y1 - wy0);
            for c in 0..ch {
                let at = |tx: usize, ty: usize| table[(ty * tw + tx) * ch + c];
                let sum = at(ax1, ay1) + at(ax0, ay0) - at(ax0, ay1) - at(ax1, ay0);
                data[(y * w + x) * ch + c] = ((2 * sum + count) / (2 * count)) as u8;
            }
        }
    }
    out
}
