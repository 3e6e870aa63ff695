//! Binary masks, scanline rasterization, connected components, and crack-edge
//! contour tracing.

use super::{GeomError, Point2, Polygon};

#[derive(Debug, Clone, PartialEq)]
pub struct RasterMask {
    pub width: u32,
    pub height: u32,
    bits: Vec<bool>,
}

impl RasterMask {
    pub fn new(width: u32, height: u32) -> RasterMask {
        RasterMask {
            width,
            height,
            bits: vec![false; (width as usize) * (height as usize)],
        }
    }

    #[inline]
    fn idx(&self, x: u32, y: u32) -> usize {
        y as usize * self.width as usize + x as usize
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> bool {
        x < self.width && y < self.height && self.bits[self.idx(x, y)]
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, v: bool) {
        let i = self.idx(x, y);
        self.bits[i] = v;
    }

    pub fn area(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    pub fn iter_set(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        let w = self.width;
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(i, _)| ((i as u32) % w, (i as u32) / w))
    }

    pub fn intersection_area(&self, other: &RasterMask) -> Result<usize, GeomError> {
        self.check_shape(other)?;
        Ok(self
            .bits
            .iter()
            .zip(other.bits.iter())
            .filter(|(&a, &b)| a && b)
            .count())
    }

    pub fn union_with(&mut self, other: &RasterMask) -> Result<(), GeomError> {
        self.check_shape(other)?;
        for (a, &b) in self.bits.iter_mut().zip(other.bits.iter()) {
            *a = *a || b;
        }
        Ok(())
    }

    pub fn subtract(&mut self, other: &RasterMask) -> Result<(), GeomError> {
        self.check_shape(other)?;
        for (a, &b) in self.bits.iter_mut().zip(other.bits.iter()) {
            *a = *a && !b;
        }
        Ok(())
    }

    fn check_shape(&self, other: &RasterMask) -> Result<(), GeomError> {
        if self.width != other.width || self.height != other.height {
            return Err(GeomError::ShapeMismatch(
                self.width,
                self.height,
                other.width,
                other.height,
            ));
        }
        Ok(())
    }
}

/// Scanline fill sampling pixel centers. Row y is filled where x+0.5 lies in
/// [left, right) between sorted edge crossings at y+0.5; edges span a scanline
/// half-openly (a.y <= yc < b.y or the reverse), so shared edges between
/// adjacent polygons never double-fill or leave cracks.
pub fn rasterize(poly: &Polygon, width: u32, height: u32) -> RasterMask {
    let mut mask = RasterMask::new(width, height);
    let v = &poly.vertices;
    let n = v.len();
    if n < 3 {
        return mask;
    }
    let (lo, hi) = poly.bounds();
    let y_start = (lo.y - 0.5).ceil().max(0.0) as i64;
    let y_end = ((hi.y - 0.5).floor() as i64).min(height as i64 - 1);
    let mut crossings: Vec<f64> = Vec::with_capacity(8);
    for y in y_start..=y_end {
        let yc = y as f64 + 0.5;
        crossings.clear();
        for i in 0..n {
            let a = v[i];
            let b = v[(i + 1) % n];
            if (a.y <= yc) != (b.y <= yc) {
                let t = (yc - a.y) / (b.y - a.y);
                crossings.push(a.x + t * (b.x - a.x));
            }
        }
        crossings.sort_by(|p, q| p.partial_cmp(q).unwrap());
        for pair in crossings.chunks_exact(2) {
            let x0 = (pair[0] - 0.5).ceil().max(0.0) as i64;
            let x1 = ((pair[1] - 0.5).ceil() as i64).min(width as i64);
            for x in x0..x1 {
                mask.set(x as u32, y as u32, true);
            }
        }
    }
    mask
}

/// Intersection over union of two same-shape masks. Two empty masks are
/// defined to have IoU 1.0.
pub fn mask_iou(a: &RasterMask, b: &RasterMask) -> Result<f64, GeomError> {
    a.check_shape(b)?;
    let mut inter = 0usize;
    let mut union = 0usize;
    for (&x, &y) in a.bits.iter().zip(b.bits.iter()) {
        if x && y {
            inter += 1;
        }
        if x || y {
            union += 1;
        }
    }
    if union == 0 {
        return Ok(1.0);
    }
    Ok(inter as f64 / union as f64)
}

#[derive(Debug, Clone)]
pub struct Component {
    /// Set pixels in row-major order.
    pub pixels: Vec<(u32, u32)>,
    /// Mean of pixel centers.
    pub centroid: Point2,
    /// (min_x, min_y, max_x, max_y), inclusive.
    pub bbox: (u32, u32, u32, u32),
}

impl Component {
    pub fn area(&self) -> usize {
        self.pixels.len()
    }

    pub fn to_mask(&self, width: u32, height: u32) -> RasterMask {
        let mut m = RasterMask::new(width, height);
        for &(x, y) in &self.pixels {
            m.set(x, y, true);
        }
        m
    }
}

/// 4-connected components, largest area first; ties break toward the earlier
/// first pixel in row-major order.
pub fn connected_components(mask: &RasterMask) -> Vec<Component> {
    let w = mask.width as usize;
    let h = mask.height as usize;
    let mut label: Vec<u32> = vec![u32::MAX; w * h];
    let mut comps: Vec<Component> = Vec::new();
    let mut stack: Vec<(u32, u32)> = Vec::new();
    for y0 in 0..h as u32 {
        for x0 in 0..w as u32 {
            if !mask.get(x0, y0) || label[y0 as usize * w + x0 as usize] != u32::MAX {
                continue;
            }
            let id = comps.len() as u32;
            let mut pixels = Vec::new();
            stack.push((x0, y0));
            label[y0 as usize * w + x0 as usize] = id;
            while let Some((x, y)) = stack.pop() {
                pixels.push((x, y));
                let mut visit = |nx: u32, ny: u32, stack: &mut Vec<(u32, u32)>| {
                    if mask.get(nx, ny) && label[ny as usize * w + nx as usize] == u32::MAX {
                        label[ny as usize * w + nx as usize] = id;
                        stack.push((nx, ny));
                    }
                };
                if x > 0 {
                    visit(x - 1, y, &mut stack);
                }
                if x + 1 < w as u32 {
                    visit(x + 1, y, &mut stack);
                }
                if y > 0 {
                    visit(x, y - 1, &mut stack);
                }
                if y + 1 < h as u32 {
                    visit(x, y + 1, &mut stack);
                }
            }
            pixels.sort_unstable_by(|a, b| (a.1, a.0).cmp(&(b.1, b.0)));
            let mut sx = 0.0;
            let mut sy = 0.0;
            let mut bbox = (u32::MAX, u32::MAX, 0u32, 0u32);
            for &(x, y) in &pixels {
                sx += x as f64 + 0.5;
                sy += y as f64 + 0.5;
                bbox.0 = bbox.0.min(x);
                bbox.1 = bbox.1.min(y);
                bbox.2 = bbox.2.max(x);
                bbox.3 = bbox.3.max(y);
            }
            let n = pixels.len() as f64;
            comps.push(Component {
                pixels,
                centroid: Point2::new(sx / n, sy / n),
                bbox,
            });
        }
    }
    comps.sort_by(|a, b| {
        b.area()
            .cmp(&a.area())
            .then_with(|| (a.pixels[0].1, a.pixels[0].0).cmp(&(b.pixels[0].1, b.pixels[0].0)))
    });
    comps
}

/// Traces the outer boundary of the 4-connected component containing the
/// topmost-leftmost set pixel, walking pixel edges with the interior kept on
/// the right. Vertices land on integer lattice points, so the enclosed area
/// equals the pixel count exactly for hole-free components. A single pixel
/// yields its unit square.
pub fn extract_contour(mask: &RasterMask) -> Result<Polygon, GeomError> {
    let start_px = mask
        .iter_set()
        .min_by_key(|&(x, y)| (y, x))
        .ok_or(GeomError::EmptyComponent)?;
    // Directions: 0 east, 1 south, 2 west, 3 north (y grows downward).
    const DX: [i64; 4] = [1, 0, -1, 0];
    const DY: [i64; 4] = [0, 1, 0, -1];
    let at = |x: i64, y: i64| -> bool {
        x >= 0 && y >= 0 && mask.get(x as u32, y as u32)
    };
    // Pixels ahead-left and ahead-right of corner (cx, cy) for direction d.
    let probe = |cx: i64, cy: i64, d: usize| -> (bool, bool) {
        match d {
            0 => (at(cx, cy - 1), at(cx, cy)),
            1 => (at(cx, cy), at(cx - 1, cy)),
            2 => (at(cx - 1, cy), at(cx - 1, cy - 1)),
            _ => (at(cx - 1, cy - 1), at(cx, cy - 1)),
        }
    };
    let start = (start_px.0 as i64, start_px.1 as i64);
    let start_dir = 0usize;
    let mut corner = start;
    let mut dir = start_dir;
    let mut vertices: Vec<Point2> = Vec::new();
    let budget = 4 * mask.area() + 8;
    for _ in 0..budget {
        let next = (corner.0 + DX[dir], corner.1 + DY[dir]);
        let (left, right) = probe(next.0, next.1, dir);
        let new_dir = if left && right {
            (dir + 3) % 4
        } else if right {
            dir
        } else {
            (dir + 1) % 4
        };
        if new_dir != dir {
            vertices.push(Point2::new(next.0 as f64, next.1 as f64));
        }
        corner = next;
        dir = new_dir;
        if corner == start && dir == start_dir {
            // Rotate so the list starts at the first turn after the start
            // corner; the start corner itself is a turn and was recorded.
            return Polygon::new(vertices);
        }
    }
    Err(GeomError::Degenerate(
        "contour trace exceeded budget; mask is not a single component".into(),
    ))
}

/// City-block dilation: `steps` rounds of growing into 4-neighbors.
pub fn dilate(mask: &RasterMask, steps: u32) -> RasterMask {
    let mut cur = mask.clone();
    for _ in 0..steps {
        let mut next = cur.clone();
        for (x, y) in cur.iter_set() {
            if x > 0 {
                next.set(x - 1, y, true);
            }
            if x + 1 < cur.width {
                next.set(x + 1, y, true);
            }
            if y > 0 {
                next.set(x, y - 1, true);
            }
            if y + 1 < cur.height {
                next.set(x, y + 1, true);
            }
        }
        cur = next;
    }
    cur
}
