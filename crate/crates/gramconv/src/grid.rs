//! Static 2D range-minimum over a set of points with one point per x
//! coordinate: a segment tree over x whose nodes keep their points sorted
//! by y, each with a small min-tree, so a rectangle query decomposes into
//! O(log k) nodes and costs O(log^2 k) overall. Narrow x-ranges fall into
//! leaf buckets that are scanned directly.

const BUCKET: usize = 32;

struct Node {
    lo: usize,
    hi: usize,
    /// Point indices in [lo, hi), sorted by y. Kept for leaves too so
    /// parents can merge in linear time.
    by_y: Vec<u32>,
    /// Bottom-up min-tree over `by_y` positions; empty for leaf buckets.
    seg: Vec<u32>,
    left: Option<Box<Node>>,
    right: Option<Box<Node>>,
}

/// Points are supplied as (y, weight) with implicit x = index + 1; both
/// coordinates are 1-based. Queries return the minimum-weight point in a
/// rectangle, ties going to the smaller point index.
pub struct RangeMinGrid {
    ys: Vec<u32>,
    ws: Vec<u64>,
    root: Option<Box<Node>>,
}

impl RangeMinGrid {
    pub fn new(points: Vec<(u32, u64)>) -> RangeMinGrid {
        let ys: Vec<u32> = points.iter().map(|p| p.0).collect();
        let ws: Vec<u64> = points.iter().map(|p| p.1).collect();
        let root = if ys.is_empty() {
            None
        } else {
            Some(build(&ys, &ws, 0, ys.len()))
        };
        RangeMinGrid { ys, ws, root }
    }

    pub fn len(&self) -> usize {
        self.ys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ys.is_empty()
    }

    /// Minimum-weight point with x in [x1, x2] and y in [y1, y2];
    /// returns (weight, point index).
    pub fn query(&self, x1: u32, x2: u32, y1: u32, y2: u32) -> Option<(u64, u32)> {
        if x1 > x2 || y1 > y2 {
            return None;
        }
        let mut best: Option<u32> = None;
        if let Some(root) = &self.root {
            self.visit(root, x1 as usize - 1, x2 as usize, y1, y2, &mut best);
        }
        best.map(|i| (self.ws[i as usize], i))
    }

    fn better(&self, a: Option<u32>, b: u32) -> Option<u32> {
        match a {
            None => Some(b),
            Some(a) => {
                if (self.ws[b as usize], b) < (self.ws[a as usize], a) {
                    Some(b)
                } else {
                    Some(a)
                }
            }
        }
    }

    fn visit(&self, node: &Node, x1: usize, x2: usize, y1: u32, y2: u32, best: &mut Option<u32>) {
        if node.hi <= x1 || x2 <= node.lo {
            return;
        }
        if x1 <= node.lo && node.hi <= x2 && !node.seg.is_empty() {
            let l = node
                .by_y
                .partition_point(|&i| self.ys[i as usize] < y1);
            let r = node
                .by_y
                .partition_point(|&i| self.ys[i as usize] <= y2);
            self.seg_query(node, l, r, best);
            return;
        }
        match (&node.left, &node.right) {
            (Some(lc), Some(rc)) => {
                self.visit(lc, x1, x2, y1, y2, best);
                self.visit(rc, x1, x2, y1, y2, best);
            }
            _ => {
                // leaf bucket: scan the overlapping slice of x directly
                for i in node.lo.max(x1)..node.hi.min(x2) {
                    let y = self.ys[i];
                    if y1 <= y && y <= y2 {
                        *best = self.better(*best, i as u32);
                    }
                }
            }
        }
    }

    fn seg_query(&self, node: &Node, l: usize, r: usize, best: &mut Option<u32>) {
        let m = node.by_y.len();
        let (mut l, mut r) = (l + m, r + m);
        while l < r {
            if l & 1 == 1 {
                *best = self.better(*best, node.seg[l]);
                l += 1;
            }
            if r & 1 == 1 {
                r -= 1;
                *best = self.better(*best, node.seg[r]);
            }
            l >>= 1;
            r >>= 1;
        }
    }
}

fn build(ys: &[u32], ws: &[u64], lo: usize, hi: usize) -> Box<Node> {
    if hi - lo <= BUCKET {
        let mut by_y: Vec<u32> = (lo as u32..hi as u32).collect();
        by_y.sort_unstable_by_key(|&i| (ys[i as usize], i));
        return Box::new(Node {
            lo,
            hi,
            by_y,
            seg: Vec::new(),
            left: None,
            right: None,
        });
    }
    let mid = (lo + hi) / 2;
    let left = build(ys, ws, lo, mid);
    let right = build(ys, ws, mid, hi);
    let mut by_y = Vec::with_capacity(hi - lo);
    let (mut a, mut b) = (0, 0);
    while a < left.by_y.len() || b < right.by_y.len() {
        let take_left = b == right.by_y.len()
            || (a < left.by_y.len()
                && (ys[left.by_y[a] as usize], left.by_y[a])
                    <= (ys[right.by_y[b] as usize], right.by_y[b]));
        if take_left {
            by_y.push(left.by_y[a]);
            a += 1;
        } else {
            by_y.push(right.by_y[b]);
            b += 1;
        }
    }
    let m = by_y.len();
    let mut seg = vec![0u32; 2 * m];
    seg[m..].copy_from_slice(&by_y);
    for v in (1..m).rev() {
        let (x, y) = (seg[2 * v], seg[2 * v + 1]);
        seg[v] = if (ws[x as usize], x) <= (ws[y as usize], y) {
            x
        } else {
            y
        };
    }
    Box::new(Node {
        lo,
        hi,
        by_y,
        seg,
        left: Some(left),
        right: Some(right),
    })
}
