//! Headless PNG frames.

use std::path::Path;

use image::{Rgb, RgbImage};

use super::RecorderError;
use crate::geometry::Vec2;

/// Formats `t` into a template holding one Python-style placeholder such as
/// `{:010.4f}`, `{:.2f}` or `{}`.
pub fn format_frame_name(template: &str, t: f64) -> Result<String, RecorderError> {
    let bad = || RecorderError::Template(template.to_string());
    let open = template.find('{').ok_or_else(bad)?;
    let close = open + template[open..].find('}').ok_or_else(bad)?;
    let spec = &template[open + 1..close];
    let formatted = if spec.is_empty() {
        format!("{t}")
    } else {
        let spec = spec.strip_prefix(':').ok_or_else(bad)?;
        let spec = spec.strip_suffix('f').ok_or_else(bad)?;
        let (zero, spec) = match spec.strip_prefix('0') {
            Some(rest) => (true, rest),
            None => (false, spec),
        };
        let (width, precision) = match spec.split_once('.') {
            Some((w, p)) => (w, p.parse::<usize>().map_err(|_| bad())?),
            None => (spec, 6),
        };
        let width = if width.is_empty() { 0 } else { width.parse::<usize>().map_err(|_| bad())? };
        if zero {
            format!("{t:0width$.precision$}")
        } else {
            format!("{t:width$.precision$}")
        }
    };
    Ok(format!("{}{}{}", &template[..open], formatted, &template[close + 1..]))
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameObject {
    pub position: Vec2,
    pub radius: f64,
    pub angle: f64,
    pub color: [u8; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameScene {
    pub width: u32,
    pub height: u32,
    pub arena: Vec<Vec2>,
    pub walls: Vec<Vec<Vec2>>,
    pub objects: Vec<FrameObject>,
    pub time: f64,
}

const BACKGROUND: Rgb<u8> = Rgb([255, 255, 255]);
const INK: Rgb<u8> = Rgb([20, 20, 20]);

// 3x5 glyphs, rows top to bottom, 3 bits per row.
fn glyph(c: char) -> Option<[u8; 5]> {
    Some(match c {
        '0' => [0b111, 0b101, 0b101, 0b101, 0b111],
        '1' => [0b010, 0b110, 0b010, 0b010, 0b111],
        '2' => [0b111, 0b001, 0b111, 0b100, 0b111],
        '3' => [0b111, 0b001, 0b111, 0b001, 0b111],
        '4' => [0b101, 0b101, 0b111, 0b001, 0b001],
        '5' => [0b111, 0b100, 0b111, 0b001, 0b111],
        '6' => [0b111, 0b100, 0b111, 0b101, 0b111],
        '7' => [0b111, 0b001, 0b010, 0b010, 0b010],
        '8' => [0b111, 0b101, 0b111, 0b101, 0b111],
        '9' => [0b111, 0b101, 0b111, 0b001, 0b111],
        '.' => [0b000, 0b000, 0b000, 0b000, 0b010],
        '=' => [0b000, 0b111, 0b000, 0b111, 0b000],
        't' => [0b010, 0b111, 0b010, 0b010, 0b011],
        's' => [0b011, 0b100, 0b010, 0b001, 0b110],
        'm' => [0b000, 0b110, 0b111, 0b101, 0b101],
        ' ' => [0; 5],
        _ => return None,
    })
}

fn put(img: &mut RgbImage, x: i64, y: i64, c: Rgb<u8>) {
    if x >= 0 && y >= 0 && (x as u32) < img.width() && (y as u32) < img.height() {
        img.put_pixel(x as u32, y as u32, c);
    }
}

fn draw_text(img: &mut RgbImage, x: i64, y: i64, scale: i64, text: &str) {
    let mut cx = x;
    for ch in text.chars() {
        if let Some(rows) = glyph(ch) {
            for (r, bits) in rows.iter().enumerate() {
                for col in 0..3 {
                    if bits & (0b100 >> col) != 0 {
                        for dy in 0..scale {
                            for dx in 0..scale {
                                put(img, cx + col * scale + dx, y + r as i64 * scale + dy, INK);
                            }
                        }
                    }
                }
            }
        }
        cx += 4 * scale;
    }
}

fn draw_line(img: &mut RgbImage, a: (i64, i64), b: (i64, i64), c: Rgb<u8>) {
    let (mut x0, mut y0) = a;
    let dx = (b.0 - x0).abs();
    let dy = -(b.1 - y0).abs();
    let sx = if x0 < b.0 { 1 } else { -1 };
    let sy = if y0 < b.1 { 1 } else { -1 };
    let mut err = dx + dy;
    loop {
        put(img, x0, y0, c);
        if x0 == b.0 && y0 == b.1 {
            break;
        }
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            x0 += sx;
        }
        if e2 <= dx {
            err += dx;
            y0 += sy;
        }
    }
}

fn fill_disk(img: &mut RgbImage, c: (f64, f64), r: f64, color: Rgb<u8>) {
    let r = r.max(1.0);
    for y in (c.1 - r).floor() as i64..=(c.1 + r).ceil() as i64 {
        for x in (c.0 - r).floor() as i64..=(c.0 + r).ceil() as i64 {
            let (fx, fy) = (x as f64 + 0.5 - c.0, y as f64 + 0.5 - c.1);
            if fx * fx + fy * fy <= r * r {
                put(img, x, y, color);
            }
        }
    }
}

/// Rasterises the scene: arena outline, walls, objects coloured by their main
/// LED with a heading tick, a 100 mm scale bar and the simulated time.
pub fn render_frame(scene: &FrameScene) -> RgbImage {
    let mut img = RgbImage::from_pixel(scene.width, scene.height, BACKGROUND);
    let all: Vec<Vec2> = scene.arena.iter().chain(scene.walls.iter().flatten()).copied().collect();
    let (min, max) = if all.is_empty() {
        (Vec2::new(-500.0, -500.0), Vec2::new(500.0, 500.0))
    } else {
        let b = crate::geometry::Aabb::from_points(&all);
        (b.min, b.max)
    };
    let margin = 0.05 * scene.width.min(scene.height) as f64;
    let span = (max.x - min.x).max(max.y - min.y).max(1e-9);
    let scale = (scene.width.min(scene.height) as f64 - 2.0 * margin) / span;
    let ox = (scene.width as f64 - (max.x - min.x) * scale) / 2.0;
    let oy = (scene.height as f64 - (max.y - min.y) * scale) / 2.0;
    let to_px = |p: Vec2| (ox + (p.x - min.x) * scale, scene.height as f64 - oy - (p.y - min.y) * scale);
    let ipx = |p: Vec2| {
        let (x, y) = to_px(p);
        (x.round() as i64, y.round() as i64)
    };
    let outline = |img: &mut RgbImage, poly: &[Vec2], c: Rgb<u8>| {
        for k in 0..poly.len() {
            draw_line(img, ipx(poly[k]), ipx(poly[(k + 1) % poly.len()]), c);
        }
    };
    outline(&mut img, &scene.arena, INK);
    for w in &scene.walls {
        outline(&mut img, w, Rgb([90, 90, 200]));
    }
    for o in &scene.objects {
        let c = to_px(o.position);
        let r = o.radius * scale;
        fill_disk(&mut img, c, r, INK);
        fill_disk(&mut img, c, (r - 1.0).max(1.0), Rgb(o.color));
        if o.angle.is_finite() && r >= 3.0 {
            let tip = o.position + Vec2::from_angle(o.angle) * o.radius;
            draw_line(&mut img, ipx(o.position), ipx(tip), INK);
        }
    }
    let bar = (100.0 * scale).round() as i64;
    let y = scene.height as i64 - (margin / 2.0) as i64;
    draw_line(&mut img, (margin as i64, y), (margin as i64 + bar, y), INK);
    let text_scale = (scene.height as i64 / 200).max(1);
    draw_text(&mut img, margin as i64 + bar + 4, y - 5 * text_scale / 2, text_scale, "100 mm");
    draw_text(&mut img, 4, 4, text_scale, &format!("t={:.2} s", scene.time));
    img
}

pub fn save_frame(scene: &FrameScene, path: &Path) -> Result<(), RecorderError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|source| RecorderError::Io { path: parent.display().to_string(), source })?;
    }
    render_frame(scene).save_with_format(path, image::ImageFormat::Png)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_padded_fixed_point() {
        assert_eq!(format_frame_name("frames/f{:010.4f}.png", 1.0).unwrap(), "frames/f00001.0000.png");
        assert_eq!(format_frame_name("f{:010.4f}.png", 123.45678).unwrap(), "f00123.4568.png");
        assert_eq!(format_frame_name("f{:.2f}", 2.0).unwrap(), "f2.00");
        assert_eq!(format_frame_name("f{}", 2.5).unwrap(), "f2.5");
        assert!(format_frame_name("nothing", 1.0).is_err());
        assert!(format_frame_name("f{:x}", 1.0).is_err());
    }

    #[test]
    fn frame_has_configured_size() {
        let scene = FrameScene {
            width: 600,
            height: 400,
            arena: vec![Vec2::new(-500.0, -500.0), Vec2::new(500.0, -500.0), Vec2::new(500.0, 500.0), Vec2::new(-500.0, 500.0)],
            walls: vec![],
            objects: vec![FrameObject { position: Vec2::ZERO, radius: 26.5, angle: 0.0, color: [0, 255, 0] }],
            time: 1.0,
        };
        let img = render_frame(&scene);
        assert_eq!(img.dimensions(), (600, 400));
        let c = img.get_pixel(300, 195);
        assert_eq!(c.0, [0, 255, 0]);
    }
}
