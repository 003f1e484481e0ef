use crate::error::{Error, Result};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SupportSide {
    Whole,
    Nonneg,
    Nonpos,
}

/// Uniform grid x_k = −L + k·h, k = 0..N−1, h = 2L/N; x = 0 sits at k₀ = N/2.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub n: usize,
    pub half_length: f64,
}

impl Grid {
    pub fn new(n: usize, half_length: f64) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::invalid("fourierops", "grid", format!("N = {n} must be a power of two ≥ 8")));
        }
        if !(half_length > 0.0) {
            return Err(Error::invalid("fourierops", "grid", "L must be positive"));
        }
        Ok(Grid { n, half_length })
    }

    pub fn h(&self) -> f64 {
        2.0 * self.half_length / self.n as f64
    }

    pub fn k0(&self) -> usize {
        self.n / 2
    }

    pub fn x(&self, k: usize) -> f64 {
        (k as f64 - self.k0() as f64) * self.h()
    }

    /// Frequency of FFT bin j: ξ_j = πj'/L with j' ∈ [−N/2, N/2).
    pub fn freq(&self, j: usize) -> f64 {
        let jj = if j < self.n / 2 { j as f64 } else { j as f64 - self.n as f64 };
        std::f64::consts::PI * jj / self.half_length
    }

    /// Band period 2π/h of the discrete frequencies.
    pub fn band(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.h()
    }
}

/// Complex samples on a [`Grid`] with a declared support side.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    pub grid: Grid,
    pub values: Vec<C64>,
    pub support_side: SupportSide,
    /// Relative L² mass on the side excluded by `support_side`.
    pub leakage: f64,
}

impl GridFunction {
    pub fn zeros(grid: Grid, support_side: SupportSide) -> Self {
        GridFunction { grid, values: vec![C64::new(0.0, 0.0); grid.n], support_side, leakage: 0.0 }
    }

    pub fn from_fn(grid: Grid, support_side: SupportSide, f: impl Fn(f64) -> C64) -> Self {
        let values = (0..grid.n).map(|k| f(grid.x(k))).collect();
        let mut g = GridFunction { grid, values, support_side, leakage: 0.0 };
        g.leakage = g.measure_leakage();
        g
    }

    /// e⁺ of half-line data; the x = 0 node carries ½·f(0⁺), the mean of the one-sided limits.
    pub fn half_line(grid: Grid, f: impl Fn(f64) -> C64) -> Self {
        let k0 = grid.k0();
        let values = (0..grid.n)
            .map(|k| match k.cmp(&k0) {
                std::cmp::Ordering::Less => C64::new(0.0, 0.0),
                std::cmp::Ordering::Equal => 0.5 * f(0.0),
                std::cmp::Ordering::Greater => f(grid.x(k)),
            })
            .collect();
        GridFunction { grid, values, support_side: SupportSide::Nonneg, leakage: 0.0 }
    }

    /// Discrete unit impulse of mass one at x = 0 (value 1/h at one node).
    pub fn impulse(grid: Grid) -> Self {
        let mut g = Self::zeros(grid, SupportSide::Whole);
        g.values[grid.k0()] = C64::new(1.0 / grid.h(), 0.0);
        g
    }

    pub fn with_values(&self, values: Vec<C64>, support_side: SupportSide) -> Self {
        let mut g = GridFunction { grid: self.grid, values, support_side, leakage: 0.0 };
        g.leakage = g.measure_leakage();
        g
    }

    pub fn x(&self, k: usize) -> f64 {
        self.grid.x(k)
    }

    /// h-weighted L² norm.
    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.h()).sqrt()
    }

    /// h-weighted L² norm restricted to nodes with x in [lo, hi].
    pub fn l2_norm_on(&self, lo: f64, hi: f64) -> f64 {
        let h = self.grid.h();
        ((0..self.grid.n)
            .filter(|&k| (lo..=hi).contains(&self.x(k)))
            .map(|k| self.values[k].norm_sqr())
            .sum::<f64>()
            * h)
            .sqrt()
    }

    /// ⟨f, g⟩ = h Σ f_k conj(g_k).
    pub fn inner(&self, other: &GridFunction) -> C64 {
        self.values.iter().zip(&other.values).map(|(a, b)| a * b.conj()).sum::<C64>() * self.grid.h()
    }

    pub fn sub(&self, other: &GridFunction) -> GridFunction {
        let v = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        self.with_values(v, self.support_side)
    }

    pub fn add(&self, other: &GridFunction) -> GridFunction {
        let v = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        self.with_values(v, self.support_side)
    }

    pub fn scale(&self, s: C64) -> GridFunction {
        self.with_values(self.values.iter().map(|v| v * s).collect(), self.support_side)
    }

    /// Relative L² mass on the side excluded by the declared support (0 for `Whole`).
    pub fn measure_leakage(&self) -> f64 {
        let k0 = self.grid.k0();
        let total: f64 = self.values.iter().map(|v| v.norm_sqr()).sum();
        if total == 0.0 {
            return 0.0;
        }
        let wrong: f64 = match self.support_side {
            SupportSide::Whole => 0.0,
            SupportSide::Nonneg => self.values[..k0].iter().map(|v| v.norm_sqr()).sum(),
            SupportSide::Nonpos => self.values[k0 + 1..].iter().map(|v| v.norm_sqr()).sum(),
        };
        (wrong / total).sqrt()
    }

    /// Largest |value| within `m` nodes of either end of the box, relative to the max.
    pub fn tail_mass(&self, m: usize) -> f64 {
        let max = self.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if max == 0.0 {
            return 0.0;
        }
        let n = self.grid.n;
        let edge = self.values[..m].iter().chain(&self.values[n - m..]).map(|v| v.norm()).fold(0.0, f64::max);
        edge / max
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "x,re,im")?;
        for (k, v) in self.values.iter().enumerate() {
            writeln!(w, "{:.17e},{:.17e},{:.17e}", self.x(k), v.re, v.im)?;
        }
        Ok(())
    }

    /// Reads the CSV layout written by [`write_csv`]; the grid is inferred from the x column.
    pub fn read_csv<R: Read>(mut r: R, support_side: SupportSide) -> Result<Self> {
        let mut s = String::new();
        r.read_to_string(&mut s)?;
        let bad = |m: String| Error::invalid("fourierops", "read_csv", m);
        let mut xs = Vec::new();
        let mut vals = Vec::new();
        for (i, line) in s.lines().enumerate() {
            if i == 0 && line.trim_start().starts_with('x') {
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let f: Vec<f64> = line
                .split(',')
                .map(|t| t.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| bad(format!("line {}: {e}", i + 1)))?;
            if f.len() != 3 {
                return Err(bad(format!("line {}: expected 3 columns", i + 1)));
            }
            xs.push(f[0]);
            vals.push(C64::new(f[1], f[2]));
        }
        let n = xs.len();
        if n < 8 {
            return Err(bad("too few rows".into()));
        }
        let grid = Grid::new(n, -xs[0])?;
        let mut g = GridFunction { grid, values: vals, support_side, leakage: 0.0 };
        g.leakage = g.measure_leakage();
        Ok(g)
    }

    /// Binary layout: u64 N, f64 L, u8 support side (0 whole, 1 nonneg, 2 nonpos),
    /// then N interleaved (re, im) f64 pairs, all little-endian.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(&(self.grid.n as u64).to_le_bytes())?;
        w.write_all(&self.grid.half_length.to_le_bytes())?;
        let tag: u8 = match self.support_side {
            SupportSide::Whole => 0,
            SupportSide::Nonneg => 1,
            SupportSide::Nonpos => 2,
        };
        w.write_all(&[tag])?;
        for v in &self.values {
            w.write_all(&v.re.to_le_bytes())?;
            w.write_all(&v.im.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let mut b8 = [0u8; 8];
        r.read_exact(&mut b8)?;
        let n = u64::from_le_bytes(b8) as usize;
        r.read_exact(&mut b8)?;
        let l = f64::from_le_bytes(b8);
        let mut tag = [0u8; 1];
        r.read_exact(&mut tag)?;
        let side = match tag[0] {
            0 => SupportSide::Whole,
            1 => SupportSide::Nonneg,
            2 => SupportSide::Nonpos,
            t => return Err(Error::invalid("fourierops", "read_binary", format!("unknown support tag {t}"))),
        };
        let grid = Grid::new(n, l)?;
        let mut values = Vec::with_capacity(n);
        for _ in 0..n {
            r.read_exact(&mut b8)?;
            let re = f64::from_le_bytes(b8);
            r.read_exact(&mut b8)?;
            values.push(C64::new(re, f64::from_le_bytes(b8)));
        }
        let mut g = GridFunction { grid, values, support_side: side, leakage: 0.0 };
        g.leakage = g.measure_leakage();
        Ok(g)
    }
}
