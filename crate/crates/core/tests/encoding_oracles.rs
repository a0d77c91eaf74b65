mod common;

use std::f64::consts::TAU;

use common::rng;
use qvcnn_core::encoding::{
    encode_hsv_quaternion, encode_rgb_quaternion, hsv_pixel_to_rgb, resize, rgb_pixel_to_hsv,
    rgb_to_hsv, Encoding, HsvImage, RgbImage,
};
use qvcnn_core::Features;
use rand::Rng;

fn random_rgb(r: &mut impl Rng, h: usize, w: usize) -> RgbImage {
    let px = (0..h * w)
        .map(|_| [r.random(), r.random(), r.random()])
        .collect();
    RgbImage::new(h, w, px).unwrap()
}

#[test]
fn hsv_round_trip_on_chromatic_pixels() {
    let mut r = rng(21);
    let mut n = 0;
    while n < 1000 {
        let p: [f64; 3] = [r.random(), r.random(), r.random()];
        let hsv = rgb_pixel_to_hsv(p);
        if hsv[1] == 0.0 {
            continue;
        }
        assert!((0.0..TAU).contains(&hsv[0]));
        let back = hsv_pixel_to_rgb(hsv);
        for c in 0..3 {
            assert!(
                (back[c] - p[c]).abs() <= 1e-6,
                "{p:?} -> {hsv:?} -> {back:?}"
            );
        }
        n += 1;
    }
}

/// Independent inverse: the standard `f(n) = V − V·S·max(0, min(k, 4−k, 1))`
/// form with `k = (n + H/60°) mod 6`.
fn hsv_to_rgb_alt([h, s, v]: [f64; 3]) -> [f64; 3] {
    let deg = h.to_degrees();
    let f = |n: f64| {
        let k = (n + deg / 60.0).rem_euclid(6.0);
        v - v * s * k.min(4.0 - k).clamp(0.0, 1.0)
    };
    [f(5.0), f(3.0), f(1.0)]
}

#[test]
fn hsv_conversion_agrees_with_alternate_inverse() {
    let mut r = rng(22);
    for _ in 0..1000 {
        let p: [f64; 3] = [r.random(), r.random(), r.random()];
        let back = hsv_to_rgb_alt(rgb_pixel_to_hsv(p));
        for c in 0..3 {
            assert!((back[c] - p[c]).abs() <= 1e-9);
        }
    }
}

#[test]
fn rgb_quaternion_real_plane_is_zero() {
    let img = random_rgb(&mut rng(23), 9, 11);
    let q = encode_rgb_quaternion::<f64>(&img);
    assert!(q.plane(0).iter().all(|&v| v == 0.0));
    for (i, p) in img.pixels().iter().enumerate() {
        assert_eq!([q.plane(1)[i], q.plane(2)[i], q.plane(3)[i]], *p);
    }
}

#[test]
fn hsv_quaternion_norm_identity() {
    let mut r = rng(24);
    let px: Vec<[f64; 3]> = (0..1000)
        .map(|_| [r.random_range(0.0..TAU), r.random(), r.random()])
        .collect();
    let img = HsvImage::new(1, 1000, px.clone()).unwrap();
    let q = encode_hsv_quaternion::<f64>(&img);
    for (x, [_, s, v]) in px.iter().enumerate() {
        let n = q.get(0, 0, x).norm_sqr();
        let expected = s * s + v * v;
        assert!(
            (n - expected).abs() <= 1e-10 * expected.max(f64::MIN_POSITIVE),
            "{n} vs {expected}"
        );
    }
}

#[test]
fn encodings_are_deterministic_and_shaped() {
    let img = random_rgb(&mut rng(25), 10, 10);
    for e in Encoding::ALL {
        let a: Features<f32> = e.encode(&img);
        let b: Features<f32> = e.encode(&img);
        assert_eq!(a, b);
        assert_eq!(a.is_quaternion(), e.is_quaternion());
        assert_eq!(
            a.as_real().shape().channels,
            if e.is_quaternion() { 4 } else { 3 }
        );
    }
    let hsv = rgb_to_hsv(&img);
    let Features::Real(t) = Encoding::HsvConcat.encode::<f64>(&img) else {
        panic!()
    };
    assert_eq!(t.get(0, 3, 4), hsv.pixel(3, 4)[0]);
}

/// Bilinear resize as separable interpolation matrices: `out = Wy · img · Wxᵀ`.
fn resize_matrix_oracle(img: &RgbImage, oh: usize, ow: usize) -> Vec<[f64; 3]> {
    fn weights(out: usize, inp: usize) -> Vec<Vec<f64>> {
        (0..out)
            .map(|d| {
                let mut row = vec![0.0; inp];
                let centre = (d as f64 + 0.5) * inp as f64 / out as f64 - 0.5;
                let s = centre.max(0.0).min((inp - 1) as f64);
                let lo = s.floor() as usize;
                let t = s - lo as f64;
                row[lo] += 1.0 - t;
                if t > 0.0 {
                    row[lo + 1] += t;
                }
                row
            })
            .collect()
    }
    let wy = weights(oh, img.height());
    let wx = weights(ow, img.width());
    let mut out = vec![[0.0; 3]; oh * ow];
    for (oy, ry) in wy.iter().enumerate() {
        for (ox, rx) in wx.iter().enumerate() {
            for (iy, &a) in ry.iter().enumerate() {
                for (ix, &b) in rx.iter().enumerate() {
                    let p = img.pixel(iy, ix);
                    for c in 0..3 {
                        out[oy * ow + ox][c] += a * b * p[c];
                    }
                }
            }
        }
    }
    out
}

#[test]
fn downsampled_gradient_matches_matrix_oracle() {
    let (h, w) = (37, 29);
    let px: Vec<[f64; 3]> = (0..h * w)
        .map(|i| {
            let (y, x) = (i / w, i % w);
            [
                y as f64 / (h - 1) as f64,
                x as f64 / (w - 1) as f64,
                ((x + y) % 7) as f64 / 6.0,
            ]
        })
        .collect();
    let img = RgbImage::new(h, w, px).unwrap();
    for (oh, ow) in [(10, 10), (13, 8), (50, 41)] {
        let got = resize(&img, oh, ow).unwrap();
        let expected = resize_matrix_oracle(&img, oh, ow);
        for (g, e) in got.pixels().iter().zip(&expected) {
            for c in 0..3 {
                assert!((g[c] - e[c]).abs() <= 1e-6);
            }
        }
    }
}

#[test]
fn resize_stays_within_source_bounds() {
    let img = random_rgb(&mut rng(26), 257, 257);
    let out = resize(&img, 100, 100).unwrap();
    for c in 0..3 {
        let lo = img.pixels().iter().map(|p| p[c]).fold(f64::MAX, f64::min);
        let hi = img.pixels().iter().map(|p| p[c]).fold(f64::MIN, f64::max);
        assert!(out.pixels().iter().all(|p| p[c] >= lo && p[c] <= hi));
    }
}
