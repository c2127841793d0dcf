//! Cyclic neighbourhoods `{y : |y − x| < t}` on the grid, in torus metric.

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Span {
    All,
    Half(usize),
}

impl Span {
    fn from_radius(r2: f64, n: usize) -> Option<Span> {
        if r2 <= 0.0 {
            return None;
        }
        // largest d ≥ 0 with d² < r2
        let mut d = r2.sqrt().floor() as usize;
        while d > 0 && (d * d) as f64 >= r2 {
            d -= 1;
        }
        while (((d + 1) * (d + 1)) as f64) < r2 {
            d += 1;
        }
        Some(if 2 * d + 1 >= n { Span::All } else { Span::Half(d) })
    }

    pub(crate) fn offsets(&self, n: usize) -> Vec<usize> {
        match self {
            Span::All => (0..n).collect(),
            Span::Half(w) => (0..=2 * w).map(|k| (n + k - w) % n).collect(),
        }
    }
}

/// Window of radius `t` in grid units, as rows `(shift along axis 0, span along
/// the last axis)`; in 1D a single row with shift 0.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Window {
    pub dim: usize,
    pub n: usize,
    pub rows: Vec<(usize, Span)>,
}

impl Window {
    pub(crate) fn new(dim: usize, n: usize, t: f64) -> Self {
        let r = t * n as f64;
        let r2 = r * r;
        let rows = if dim == 1 {
            vec![(0, Span::from_radius(r2, n).unwrap_or(Span::Half(0)))]
        } else {
            let mut rows = Vec::new();
            for s in 0..n {
                let d = s.min(n - s) as f64;
                if let Some(span) = Span::from_radius(r2 - d * d, n) {
                    rows.push((s, span));
                }
            }
            if rows.is_empty() {
                rows.push((0, Span::Half(0)));
            }
            rows
        };
        Self { dim, n, rows }
    }

    /// Flat index offsets `(Δ0·n + Δ1)` of the window cells, relative to 0.
    pub(crate) fn offsets(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (s, span) in &self.rows {
            for o in span.offsets(self.n) {
                out.push((*s, o));
            }
        }
        out
    }

    #[cfg(test)]
    pub(crate) fn size(&self) -> usize {
        self.rows
            .iter()
            .map(|(_, s)| match s {
                Span::All => self.n,
                Span::Half(w) => 2 * w + 1,
            })
            .sum()
    }

    pub(crate) fn reduce_max(&self, values: &[f64]) -> Vec<f64> {
        self.reduce(values, line_max, f64::NEG_INFINITY, f64::max)
    }

    pub(crate) fn reduce_sum(&self, values: &[f64]) -> Vec<f64> {
        self.reduce(values, line_sum, 0.0, |a, b| a + b)
    }

    fn reduce(
        &self,
        values: &[f64],
        line: fn(&[f64], &Span) -> Vec<f64>,
        init: f64,
        combine: fn(f64, f64) -> f64,
    ) -> Vec<f64> {
        let n = self.n;
        if self.dim == 1 {
            return line(values, &self.rows[0].1);
        }
        let mut cache: Vec<(Span, Vec<f64>)> = Vec::new();
        let mut out = vec![init; n * n];
        for (s, span) in &self.rows {
            let pos = match cache.iter().position(|(sp, _)| sp == span) {
                Some(p) => p,
                None => {
                    let mut reduced = Vec::with_capacity(n * n);
                    for row in values.chunks(n) {
                        reduced.extend(line(row, span));
                    }
                    cache.push((span.clone(), reduced));
                    cache.len() - 1
                }
            };
            let reduced = &cache[pos].1;
            for i0 in 0..n {
                let src = &reduced[((i0 + s) % n) * n..((i0 + s) % n + 1) * n];
                let dst = &mut out[i0 * n..(i0 + 1) * n];
                for (d, v) in dst.iter_mut().zip(src) {
                    *d = combine(*d, *v);
                }
            }
        }
        out
    }
}

/// Cyclic sliding maximum (van Herk / Gil–Werman).
fn line_max(a: &[f64], span: &Span) -> Vec<f64> {
    let n = a.len();
    let w = match span {
        Span::All => return vec![a.iter().copied().fold(f64::NEG_INFINITY, f64::max); n],
        Span::Half(w) => *w,
    };
    if w == 0 {
        return a.to_vec();
    }
    let k = 2 * w + 1;
    let ext: Vec<f64> = (0..n + 2 * w).map(|j| a[(j + n - w % n) % n]).collect();
    let m = ext.len();
    let mut pre = ext.clone();
    let mut suf = ext.clone();
    for j in 1..m {
        if j % k != 0 {
            pre[j] = pre[j].max(pre[j - 1]);
        }
    }
    for j in (0..m - 1).rev() {
        if (j + 1) % k != 0 {
            suf[j] = suf[j].max(suf[j + 1]);
        }
    }
    (0..n).map(|i| suf[i].max(pre[i + k - 1])).collect()
}

fn line_sum(a: &[f64], span: &Span) -> Vec<f64> {
    let n = a.len();
    let w = match span {
        Span::All => return vec![a.iter().sum(); n],
        Span::Half(w) => *w,
    };
    if w == 0 {
        return a.to_vec();
    }
    let k = 2 * w + 1;
    let mut prefix = vec![0.0; n + 2 * w + 1];
    for j in 0..n + 2 * w {
        prefix[j + 1] = prefix[j] + a[(j + n - w % n) % n];
    }
    (0..n).map(|i| prefix[i + k] - prefix[i]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(values: &[f64], win: &Window, max: bool) -> Vec<f64> {
        let n = win.n;
        let len = values.len();
        let offs = win.offsets();
        (0..len)
            .map(|x| {
                let (i0, i1) = if win.dim == 1 { (0, x) } else { (x / n, x % n) };
                let vals = offs.iter().map(|&(s0, s1)| {
                    let y0 = (i0 + s0) % n;
                    let y1 = (i1 + s1) % n;
                    values[if win.dim == 1 { y1 } else { y0 * n + y1 }]
                });
                if max { vals.fold(f64::NEG_INFINITY, f64::max) } else { vals.sum() }
            })
            .collect()
    }

    #[test]
    fn reductions_match_brute_force() {
        for dim in [1, 2] {
            let n = 16;
            let len = if dim == 1 { n } else { n * n };
            let values: Vec<f64> = (0..len).map(|i| ((i * 37 % 23) as f64).sin()).collect();
            for t in [0.01, 1.0 / 16.0, 0.07, 0.2, 0.31, 0.5, 1.0] {
                let win = Window::new(dim, n, t);
                let a = win.reduce_max(&values);
                let b = brute(&values, &win, true);
                assert_eq!(a, b, "max dim {dim} t {t}");
                let a = win.reduce_sum(&values);
                let b = brute(&values, &win, false);
                for (x, y) in a.iter().zip(&b) {
                    assert!((x - y).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn window_is_strict_ball() {
        // radius exactly 2 cells excludes distance-2 neighbours
        let w = Window::new(1, 32, 2.0 / 32.0);
        assert_eq!(w.size(), 3);
        let w = Window::new(2, 32, 2.0 / 32.0);
        // (0,0), 4 at distance 1, 4 at distance √2
        assert_eq!(w.size(), 9);
        assert_eq!(Window::new(1, 32, 1.0).size(), 32);
        assert_eq!(Window::new(2, 8, 1.0).size(), 64);
    }
}
