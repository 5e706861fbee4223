use super::ImageBuffer;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransferDirection {
    ToLinear,
    ToDisplay,
}

/// sRGB decoding (display → linear light).
#[inline]
pub fn srgb_to_linear(v: f64) -> f64 {
    if v <= 0.04045 {
        v / 12.92
    } else {
        libm::pow((v + 0.055) / 1.055, 2.4)
    }
}

/// sRGB encoding (linear light → display).
#[inline]
pub fn linear_to_srgb(v: f64) -> f64 {
    if v <= 0.003_130_8 {
        v * 12.92
    } else {
        // 1.055·p − 0.055, arranged so that p = 1 maps to exactly 1.
        let p = libm::pow(v, 1.0 / 2.4);
        p + 0.055 * (p - 1.0)
    }
}

/// Applies the sRGB transfer function to every component.
pub fn srgb_transfer(img: &ImageBuffer, direction: TransferDirection) -> ImageBuffer {
    let f = match direction {
        TransferDirection::ToLinear => srgb_to_linear,
        TransferDirection::ToDisplay => linear_to_srgb,
    };
    let data = img.data().iter().map(|&v| f(v)).collect();
    ImageBuffer::from_raw_clamped(img.width(), img.height(), data)
}
