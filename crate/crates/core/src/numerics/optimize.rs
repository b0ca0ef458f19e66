//! Scalar optimization: golden-section search, grid scans with local
//! refinement, and bisection.

use crate::par::{self, Execution};

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for a minimum of a unimodal `f` on `[lo, hi]`.
/// Non-finite values count as `+∞`. Returns `(x, f(x))`.
pub fn golden_section_min<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let g = |x: f64| {
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = g(c);
    let mut fd = g(d);
    for _ in 0..300 {
        if (b - a).abs() <= tol * (1.0 + a.abs().max(b.abs())) {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = g(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = g(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Golden-section search for a maximum.
pub fn golden_section_max<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let (x, v) = golden_section_min(
        |x| {
            let y = f(x);
            if y.is_nan() {
                f64::INFINITY
            } else {
                -y
            }
        },
        lo,
        hi,
        tol,
    );
    (x, -v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Goal {
    Minimize,
    Maximize,
}

impl Goal {
    /// True if `a` is strictly better than `b`.
    fn better(self, a: f64, b: f64) -> bool {
        match self {
            Goal::Minimize => a < b,
            Goal::Maximize => a > b,
        }
    }
}

/// Outcome of a grid scan with refinement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanOptimum {
    pub x: f64,
    pub value: f64,
    /// Index of the best grid point before refinement.
    pub index: usize,
    /// Number of grid points with a finite objective.
    pub finite_points: usize,
    /// The best grid point has no finite neighbour on at least one side.
    pub at_edge: bool,
}

/// Index of the best finite entry; ties go to the smallest index.
pub fn best_index(values: &[f64], goal: Goal) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &v) in values.iter().enumerate() {
        if !v.is_finite() {
            continue;
        }
        match best {
            None => best = Some(i),
            Some(b) if goal.better(v, values[b]) => best = Some(i),
            _ => {}
        }
    }
    best
}

/// Evaluates `f` on `grid` (ascending), picks the best finite point, then
/// refines by golden-section search between its two neighbours. The
/// refined point is kept only if it improves on the grid value.
pub fn optimize_on_grid<F>(f: F, grid: &[f64], goal: Goal, refine: bool, exec: Execution) -> Option<ScanOptimum>
where
    F: Fn(f64) -> f64 + Sync + Send,
{
    let values = par::map_slice(exec, grid, |&x| f(x));
    let finite_points = values.iter().filter(|v| v.is_finite()).count();
    let i = best_index(&values, goal)?;
    let finite_at = |j: Option<usize>| j.and_then(|j| values.get(j)).is_some_and(|v| v.is_finite());
    let at_edge = !finite_at(i.checked_sub(1)) || !finite_at(Some(i + 1));
    let mut best = ScanOptimum {
        x: grid[i],
        value: values[i],
        index: i,
        finite_points,
        at_edge,
    };
    if refine && grid.len() > 1 {
        let lo = grid[i.saturating_sub(1)];
        let hi = grid[(i + 1).min(grid.len() - 1)];
        let (x, v) = match goal {
            Goal::Minimize => golden_section_min(&f, lo, hi, 1e-13),
            Goal::Maximize => golden_section_max(&f, lo, hi, 1e-13),
        };
        if v.is_finite() && goal.better(v, best.value) {
            best.x = x;
            best.value = v;
        }
    }
    Some(best)
}

/// Bisection for a sign change of `f` on `[lo, hi]`.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> Option<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    if flo.signum() == fhi.signum() || !flo.is_finite() || !fhi.is_finite() {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 || (hi - lo).abs() < tol {
            return Some(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}
