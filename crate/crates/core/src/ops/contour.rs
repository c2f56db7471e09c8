//! Outer boundary tracing of 8-connected foreground components.
//!
//! Each component is traced clockwise with Moore-neighbour tracing,
//! starting from its top-most, then left-most pixel, and stops by Jacob's
//! criterion: the start pixel is re-entered from the same backtrack cell it
//! was first entered from. Holes are not traced.

use std::collections::VecDeque;

use serde::Serialize;

use super::{require_gray, OpError};
use crate::raster::{Image, PixelCoord, RasterError};

/// Moore neighbourhood in clockwise screen order, starting west.
const MOORE: [(isize, isize); 8] = [
    (-1, 0),
    (-1, -1),
    (0, -1),
    (1, -1),
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Contour {
    pub points: Vec<PixelCoord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContourSet {
    pub width: usize,
    pub height: usize,
    pub contours: Vec<Contour>,
}

impl ContourSet {
    pub fn len(&self) -> usize {
        self.contours.len()
    }

    pub fn is_empty(&self) -> bool {
        self.contours.is_empty()
    }
}

fn direction_index(dx: isize, dy: isize) -> usize {
    MOORE
        .iter()
        .position(|&d| d == (dx, dy))
        .expect("offset is a Moore neighbour")
}

pub fn find_contours(img: &Image) -> Result<ContourSet, OpError> {
    require_gray(img)?;
    let (w, h) = (img.width(), img.height());
    let data = img.as_bytes();
    let fg = |x: isize, y: isize| {
        x >= 0 && y >= 0 && (x as usize) < w && (y as usize) < h && data[y as usize * w + x as usize] != 0
    };

    let mut labelled = vec![false; w * h];
    let mut contours = Vec::new();
    let mut queue = VecDeque::new();
    for i in 0..w * h {
        if data[i] == 0 || labelled[i] {
            continue;
        }
        // Flood the component so later scan positions skip it.
        let mut size = 0usize;
        labelled[i] = true;
        queue.push_back(i);
        while let Some(j) = queue.pop_front() {
            size += 1;
            let (x, y) = ((j % w) as isize, (j / w) as isize);
            for (dx, dy) in MOORE {
                let (nx, ny) = (x + dx, y + dy);
                if fg(nx, ny) {
                    let k = ny as usize * w + nx as usize;
                    if !labelled[k] {
                        labelled[k] = true;
                        queue.push_back(k);
                    }
                }
            }
        }
        let start = ((i % w) as isize, (i / w) as isize);
        contours.push(trace(start, size, &fg));
    }
    Ok(ContourSet {
        width: w,
        height: h,
        contours,
    })
}

fn trace(start: (isize, isize), component_size: usize, fg: &impl Fn(isize, isize) -> bool) -> Contour {
    let to_coord = |(x, y): (isize, isize)| PixelCoord::new(x as usize, y as usize);
    let mut points = vec![to_coord(start)];
    let initial_back = 0; // west of the start pixel is background by scan order
    let mut cur = start;
    let mut back = initial_back;
    let mut first_move = None;
    // A boundary pixel is visited at most 4 times.
    let limit = 4 * component_size + 8;
    for _ in 0..limit {
        let mut next = None;
        for k in 1..=8 {
            let d = (back + k) % 8;
            let p = (cur.0 + MOORE[d].0, cur.1 + MOORE[d].1);
            if fg(p.0, p.1) {
                let prev = MOORE[(back + k - 1) % 8];
                let bt = (cur.0 + prev.0, cur.1 + prev.1);
                next = Some((p, direction_index(bt.0 - p.0, bt.1 - p.1)));
                break;
            }
        }
        let Some((p, new_back)) = next else {
            break; // isolated pixel
        };
        if p == start && new_back == initial_back {
            break;
        }
        // The start can also be re-entered from another side (thin
        // components); repeating the very first move closes the loop too.
        if cur == start {
            match first_move {
                None => first_move = Some((p, new_back)),
                Some(m) if m == (p, new_back) => {
                    points.pop();
                    break;
                }
                Some(_) => {}
            }
        }
        points.push(to_coord(p));
        cur = p;
        back = new_back;
    }
    Contour { points }
}

/// Sets every contour point to `color`; points outside the image are skipped.
pub fn draw_contours(img: &Image, contours: &ContourSet, color: &[u8]) -> Result<Image, OpError> {
    if color.len() != img.channels() {
        return Err(RasterError::Arity {
            expected: img.channels(),
            actual: color.len(),
        }
        .into());
    }
    let mut out = img.clone();
    for p in contours.contours.iter().flat_map(|c| &c.points) {
        if out.contains(*p) {
            out.put_pixel(*p, color)?;
        }
    }
    Ok(out)
}
