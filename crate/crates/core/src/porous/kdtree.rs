//! Static 2-d tree for nearest-distance queries against a point cloud.

const LEAF: usize = 8;

#[derive(Clone, Debug)]
pub struct KdTree {
    pts: Vec<[f64; 2]>,
}

fn build(pts: &mut [[f64; 2]], depth: usize) {
    if pts.len() <= LEAF {
        return;
    }
    let axis = depth & 1;
    let mid = pts.len() / 2;
    pts.select_nth_unstable_by(mid, |a, b| a[axis].total_cmp(&b[axis]));
    let (lo, hi) = pts.split_at_mut(mid);
    build(lo, depth + 1);
    build(&mut hi[1..], depth + 1);
}

#[inline]
fn d2(a: [f64; 2], b: [f64; 2]) -> f64 {
    let (dx, dy) = (a[0] - b[0], a[1] - b[1]);
    dx * dx + dy * dy
}

impl KdTree {
    pub fn new(points: &[[f64; 2]]) -> Self {
        let mut pts = points.to_vec();
        build(&mut pts, 0);
        KdTree { pts }
    }

    pub fn len(&self) -> usize {
        self.pts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pts.is_empty()
    }

    /// `min(dist(x, cloud)², cap2)`.
    pub fn nearest_d2(&self, x: [f64; 2], cap2: f64) -> f64 {
        let mut best = cap2;
        self.walk(&self.pts, x, 0, &mut best);
        best
    }

    fn walk(&self, pts: &[[f64; 2]], x: [f64; 2], depth: usize, best: &mut f64) {
        if pts.len() <= LEAF {
            for &p in pts {
                *best = best.min(d2(p, x));
            }
            return;
        }
        let axis = depth & 1;
        let mid = pts.len() / 2;
        let p = pts[mid];
        *best = best.min(d2(p, x));
        let diff = x[axis] - p[axis];
        let (near, far) = if diff < 0.0 {
            (&pts[..mid], &pts[mid + 1..])
        } else {
            (&pts[mid + 1..], &pts[..mid])
        };
        self.walk(near, x, depth + 1, best);
        if diff * diff < *best {
            self.walk(far, x, depth + 1, best);
        }
    }
}
