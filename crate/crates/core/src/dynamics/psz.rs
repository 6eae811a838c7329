//! Finite polynomial Szemerédi configurations in grids `[1, N]^u`.

use std::collections::BTreeSet;

use super::poly::IntPolynomial;
use crate::error::{invalid, Error, Result};

/// Largest `N^u` for grids and censuses.
pub const MAX_CELLS: u64 = 1 << 26;

/// `A ⊆ [1, N]^u` as a bitset, row-major with the first coordinate slowest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grid {
    dim: usize,
    side: u64,
    bits: Vec<u64>,
}

fn cells(dim: usize, side: u64) -> Result<u64> {
    side.checked_pow(dim as u32)
        .filter(|&c| c <= MAX_CELLS)
        .ok_or(Error::CapExceeded {
            size: usize::MAX,
            cap: MAX_CELLS as usize,
        })
}

impl Grid {
    pub fn empty(dim: usize, side: u64) -> Result<Self> {
        if dim == 0 || side == 0 {
            return Err(invalid("grid needs u >= 1 and N >= 1"));
        }
        let total = cells(dim, side)?;
        Ok(Grid {
            dim,
            side,
            bits: vec![0; total.div_ceil(64) as usize],
        })
    }

    pub fn from_points(dim: usize, side: u64, points: &[Vec<u64>]) -> Result<Self> {
        let mut g = Self::empty(dim, side)?;
        for p in points {
            g.insert(p)?;
        }
        Ok(g)
    }

    /// One-dimensional grid from the elements of `A ⊆ [1, N]`.
    pub fn line(side: u64, elements: &[u64]) -> Result<Self> {
        let pts: Vec<Vec<u64>> = elements.iter().map(|&a| vec![a]).collect();
        Self::from_points(1, side, &pts)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn side(&self) -> u64 {
        self.side
    }

    pub fn insert(&mut self, p: &[u64]) -> Result<()> {
        let idx = self
            .index(p)
            .ok_or_else(|| invalid(format!("point {p:?} outside [1,{}]^{}", self.side, self.dim)))?;
        self.bits[idx / 64] |= 1 << (idx % 64);
        Ok(())
    }

    fn index(&self, p: &[u64]) -> Option<usize> {
        if p.len() != self.dim || p.iter().any(|&x| x == 0 || x > self.side) {
            return None;
        }
        Some(p.iter().fold(0u64, |acc, &x| acc * self.side + (x - 1)) as usize)
    }

    fn point(&self, mut idx: u64) -> Vec<u64> {
        let mut out = vec![0; self.dim];
        for slot in out.iter_mut().rev() {
            *slot = idx % self.side + 1;
            idx /= self.side;
        }
        out
    }

    pub fn contains(&self, p: &[i128]) -> bool {
        if p.len() != self.dim || p.iter().any(|&x| x < 1 || x > self.side as i128) {
            return false;
        }
        let idx = p.iter().fold(0u64, |acc, &x| acc * self.side + (x as u64 - 1)) as usize;
        self.bits[idx / 64] >> (idx % 64) & 1 == 1
    }

    /// Points of `A` in index order (lexicographic in coordinates).
    pub fn points(&self) -> Vec<Vec<u64>> {
        let mut out = Vec::new();
        for (w, &word) in self.bits.iter().enumerate() {
            let mut bits = word;
            while bits != 0 {
                let b = bits.trailing_zeros() as u64;
                bits &= bits - 1;
                out.push(self.point(w as u64 * 64 + b));
            }
        }
        out
    }

    pub fn len(&self) -> u64 {
        self.bits.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Text dump: header `grid <u> <N>` then `N^u` characters `0`/`1`.
    pub fn to_text(&self) -> String {
        let total = self.side.pow(self.dim as u32);
        let mut out = format!("grid {} {}\n", self.dim, self.side);
        for i in 0..total {
            let bit = self.bits[(i / 64) as usize] >> (i % 64) & 1;
            out.push(if bit == 1 { '1' } else { '0' });
            if (i + 1) % self.side == 0 {
                out.push('\n');
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
        let header = lines.next().ok_or_else(|| Error::Parse("empty grid file".into()))?;
        let parts: Vec<&str> = header.split_whitespace().collect();
        let (dim, side) = match parts.as_slice() {
            ["grid", u, n] => (
                u.parse::<usize>().map_err(|_| Error::Parse("bad grid dimension".into()))?,
                n.parse::<u64>().map_err(|_| Error::Parse("bad grid side".into()))?,
            ),
            _ => return Err(Error::Parse("grid header must be `grid <u> <N>`".into())),
        };
        let mut g = Self::empty(dim, side)?;
        let total = cells(dim, side)?;
        let mut i = 0u64;
        for c in lines.flat_map(str::chars).filter(|c| !c.is_whitespace()) {
            match c {
                '0' => {}
                '1' if i < total => g.bits[(i / 64) as usize] |= 1 << (i % 64),
                '1' => {}
                _ => return Err(Error::Parse(format!("unexpected grid character {c:?}"))),
            }
            i += 1;
        }
        if i != total {
            return Err(Error::Parse(format!("grid body has {i} cells, expected {total}")));
        }
        Ok(g)
    }
}

/// `ℓ × u` matrix of polynomials: row `i` is the displacement `P_i(n)`.
pub type PolyMatrix = Vec<Vec<IntPolynomial>>;

fn check_matrix(polys: &PolyMatrix, dim: usize) -> Result<()> {
    if polys.is_empty() {
        return Err(invalid("need at least one polynomial row"));
    }
    if polys.iter().any(|row| row.len() != dim) {
        return Err(invalid(format!("each polynomial row needs {dim} entries")));
    }
    if polys.iter().flatten().any(|p| !p.vanishes_at_zero()) {
        return Err(invalid("polynomials must satisfy p(0) = 0"));
    }
    Ok(())
}

fn displacements(polys: &PolyMatrix, n: i128) -> Result<Vec<Vec<i128>>> {
    polys
        .iter()
        .map(|row| row.iter().map(|p| p.eval(n)).collect())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PszWitness {
    pub n: u64,
    pub a: Vec<u64>,
}

/// First `(n, a)` in lexicographic order with `a + P_i(n) ∈ A` for every row `i`.
pub fn finite_psz_search(grid: &Grid, polys: &PolyMatrix, n_max: u64) -> Result<Option<PszWitness>> {
    check_matrix(polys, grid.dim())?;
    if n_max == 0 {
        return Err(invalid("n_max must be >= 1"));
    }
    let points = grid.points();
    for n in 1..=n_max {
        let disp = displacements(polys, n as i128)?;
        for a in &points {
            let hit = disp.iter().all(|d| {
                let target: Vec<i128> = a.iter().zip(d).map(|(&x, &s)| x as i128 + s).collect();
                grid.contains(&target)
            });
            if hit {
                return Ok(Some(PszWitness { n, a: a.clone() }));
            }
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrangementCensus {
    /// Distinct point sets `{a} ∪ {a + P_i(n)}` inside `[1, K]^u`.
    pub arrangements: Vec<Vec<Vec<u64>>>,
}

impl ArrangementCensus {
    pub fn count(&self) -> usize {
        self.arrangements.len()
    }

    /// `β = ε / (2|J|)`; `None` when the census is empty.
    pub fn beta(&self, eps: f64) -> Option<f64> {
        (self.count() > 0).then(|| eps / (2.0 * self.count() as f64))
    }
}

/// All basic arrangements in `[1, K]^u` for `n ∈ n_range`; `n` with every
/// displacement zero gives a single point and is skipped.
pub fn basic_arrangement_census(
    side: u64,
    polys: &PolyMatrix,
    n_range: std::ops::RangeInclusive<u64>,
) -> Result<ArrangementCensus> {
    let dim = polys.first().map_or(0, Vec::len);
    if dim == 0 {
        return Err(invalid("need at least one polynomial row with u >= 1 entries"));
    }
    check_matrix(polys, dim)?;
    if polys.iter().flatten().all(IntPolynomial::is_zero) {
        return Err(invalid("all-zero polynomials give degenerate arrangements"));
    }
    let full = Grid::empty(dim, side)?;
    let total = cells(dim, side)?;
    let mut seen: BTreeSet<Vec<Vec<u64>>> = BTreeSet::new();
    for n in n_range {
        let disp = displacements(polys, n as i128)?;
        if disp.iter().flatten().all(|&d| d == 0) {
            continue;
        }
        for idx in 0..total {
            let a = full.point(idx);
            let mut pts: Vec<Vec<u64>> = vec![a.clone()];
            let mut inside = true;
            for d in &disp {
                let t: Vec<i128> = a.iter().zip(d).map(|(&x, &s)| x as i128 + s).collect();
                if t.iter().any(|&x| x < 1 || x > side as i128) {
                    inside = false;
                    break;
                }
                pts.push(t.into_iter().map(|x| x as u64).collect());
            }
            if inside {
                pts.sort_unstable();
                pts.dedup();
                seen.insert(pts);
            }
        }
    }
    Ok(ArrangementCensus {
        arrangements: seen.into_iter().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> IntPolynomial {
        s.parse().unwrap()
    }

    fn line_oracle(a: &[u64], side: u64, rows: &[Vec<IntPolynomial>], n_max: u64) -> Option<(u64, u64)> {
        for n in 1..=n_max {
            for &x in a {
                let ok = rows.iter().all(|row| {
                    let t = x as i128 + row[0].eval(n as i128).unwrap();
                    t >= 1 && t <= side as i128 && a.contains(&(t as u64))
                });
                if ok {
                    return Some((n, x));
                }
            }
        }
        None
    }

    #[test]
    fn psz_examples() {
        let g = Grid::line(5, &[1, 2, 5]).unwrap();
        let w = finite_psz_search(&g, &vec![vec![p("n^2")]], 5).unwrap().unwrap();
        assert_eq!(w, PszWitness { n: 1, a: vec![1] });
        let single = Grid::line(10, &[4]).unwrap();
        assert!(finite_psz_search(&single, &vec![vec![p("n")]], 20).unwrap().is_none());
        assert!(finite_psz_search(&g, &vec![vec![p("n+1")]], 5).is_err());
    }

    #[test]
    fn psz_matches_oracle_on_large_subsets() {
        let rows = vec![vec![p("n^2")]];
        for mask in 0u32..1024 {
            if mask.count_ones() < 6 {
                continue;
            }
            let a: Vec<u64> = (1..=10).filter(|&i| mask >> (i - 1) & 1 == 1).collect();
            let g = Grid::line(10, &a).unwrap();
            let got = finite_psz_search(&g, &rows, 10).unwrap().map(|w| (w.n, w.a[0]));
            assert_eq!(got, line_oracle(&a, 10, &rows, 10), "{a:?}");
        }
    }

    #[test]
    fn two_dimensional_search() {
        // corners {a, a + (n, 0), a + (0, n)}
        let rows = vec![vec![p("n"), p("0")], vec![p("0"), p("n")]];
        let g = Grid::from_points(2, 4, &[vec![2, 2], vec![4, 2], vec![2, 4]]).unwrap();
        assert_eq!(
            finite_psz_search(&g, &rows, 4).unwrap(),
            Some(PszWitness { n: 2, a: vec![2, 2] })
        );
        let g = Grid::from_points(2, 4, &[vec![2, 2], vec![4, 2]]).unwrap();
        assert_eq!(finite_psz_search(&g, &rows, 4).unwrap(), None);
    }

    #[test]
    fn census_cases() {
        let c = basic_arrangement_census(3, &vec![vec![p("n")]], 1..=3).unwrap();
        assert_eq!(c.count(), 3);
        assert!((c.beta(0.3).unwrap() - 0.05).abs() < 1e-15);
        assert_eq!(basic_arrangement_census(1, &vec![vec![p("n")]], 1..=3).unwrap().count(), 0);
        assert!(basic_arrangement_census(3, &vec![vec![p("0")]], 1..=3).is_err());
        // n and 2n: {a, a+n, a+2n} in [1,5]: n=1 three, n=2 one
        let c = basic_arrangement_census(5, &vec![vec![p("n")], vec![p("2n")]], 1..=5).unwrap();
        assert_eq!(c.count(), 4);
    }

    #[test]
    fn grid_text_roundtrip() {
        let g = Grid::from_points(2, 3, &[vec![1, 1], vec![3, 2]]).unwrap();
        let text = g.to_text();
        assert_eq!(text, "grid 2 3\n100\n000\n010\n");
        assert_eq!(Grid::from_text(&text).unwrap(), g);
        assert!(Grid::from_text("grid 1 3\n10\n").is_err());
        assert!(Grid::from_text("grid 1 3\n1x0\n").is_err());
        assert!(Grid::from_text("grid 1\n").is_err());
        assert_eq!(g.points(), vec![vec![1, 1], vec![3, 2]]);
    }
}
