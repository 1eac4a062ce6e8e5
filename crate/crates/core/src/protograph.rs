//! Band base matrices of `(d_l, d_r, L)` coupled codes and their modified
//! variant, design rates and the information/parity position bookkeeping.
//!
//! Rows and columns are 1-based throughout this module. Row `i` of the base
//! matrix is supported on columns `ik - d_r + j` for `j ∈ [1, d_r]`, clipped
//! to `[1, kL]`. The modified matrix keeps only the first `L + 1` rows.

use std::fmt;
use std::ops::RangeInclusive;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Code family parameters. `dr` must be a multiple of `dl` with `k = dr/dl ≥ 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CodeParams {
    pub dl: usize,
    pub dr: usize,
    #[serde(rename = "L")]
    pub l: usize,
    pub modified: bool,
}

impl CodeParams {
    pub fn new(dl: usize, dr: usize, l: usize, modified: bool) -> Result<Self> {
        let p = Self { dl, dr, l, modified };
        p.validate()?;
        Ok(p)
    }

    pub fn original(dl: usize, dr: usize, l: usize) -> Result<Self> {
        Self::new(dl, dr, l, false)
    }

    pub fn modified(dl: usize, dr: usize, l: usize) -> Result<Self> {
        Self::new(dl, dr, l, true)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dl < 2 {
            return Err(Error::Parameter(format!("dl must be at least 2, got {}", self.dl)));
        }
        if !self.dr.is_multiple_of(self.dl) {
            return Err(Error::Parameter(format!(
                "dr/dl must be an integer, got dr={} dl={}",
                self.dr, self.dl
            )));
        }
        if self.dr / self.dl < 2 {
            return Err(Error::Parameter(format!(
                "k = dr/dl must be at least 2, got {}",
                self.dr / self.dl
            )));
        }
        if self.l < self.dl {
            return Err(Error::Parameter(format!(
                "coupling number L must be at least dl ({}), got {}",
                self.dl, self.l
            )));
        }
        Ok(())
    }

    pub fn k(&self) -> usize {
        self.dr / self.dl
    }

    /// Number of variable sections, `kL`.
    pub fn n_sections(&self) -> usize {
        self.k() * self.l
    }

    /// Number of check rows: `L + d_l - 1` (original) or `L + 1` (modified).
    pub fn n_checks(&self) -> usize {
        if self.modified {
            self.l + 1
        } else {
            self.l + self.dl - 1
        }
    }

    pub fn with_modified(self, modified: bool) -> Self {
        Self { modified, ..self }
    }

    pub fn variant_name(&self) -> &'static str {
        if self.modified {
            "modified"
        } else {
            "original"
        }
    }
}

impl fmt::Display for CodeParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{}) {}", self.dl, self.dr, self.l, self.variant_name())
    }
}

/// Binary protograph adjacency matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseMatrix {
    params: CodeParams,
    rows: usize,
    cols: usize,
    entries: Vec<bool>,
}

impl BaseMatrix {
    pub fn build(params: CodeParams) -> Result<Self> {
        params.validate()?;
        let rows = params.n_checks();
        let cols = params.n_sections();
        let mut entries = vec![false; rows * cols];
        for i in 1..=rows {
            for c in band_support(&params, i) {
                entries[(i - 1) * cols + (c - 1)] = true;
            }
        }
        Ok(Self {
            params,
            rows,
            cols,
            entries,
        })
    }

    pub fn params(&self) -> &CodeParams {
        &self.params
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Entry at 1-based `(row, col)`.
    pub fn get(&self, row: usize, col: usize) -> bool {
        assert!((1..=self.rows).contains(&row) && (1..=self.cols).contains(&col));
        self.entries[(row - 1) * self.cols + (col - 1)]
    }

    /// Columns where row `i` is 1.
    pub fn row_support(&self, i: usize) -> RangeInclusive<usize> {
        assert!((1..=self.rows).contains(&i));
        band_support(&self.params, i)
    }

    /// Rows where column `c` is 1.
    pub fn col_support(&self, c: usize) -> RangeInclusive<usize> {
        assert!((1..=self.cols).contains(&c));
        let k = self.params.k();
        let first = c.div_ceil(k);
        let last = (first + self.params.dl - 1).min(self.rows);
        first..=last
    }

    pub fn row_weight(&self, i: usize) -> usize {
        self.row_support(i).count()
    }

    pub fn col_weight(&self, c: usize) -> usize {
        self.col_support(c).count()
    }

    /// Global column of the local band position `j ∈ [1, d_r]` in row `i`,
    /// or `None` when it falls outside `[1, kL]`.
    pub fn global_col(&self, i: usize, j: usize) -> Option<usize> {
        let c = (i * self.params.k() + j).checked_sub(self.params.dr)?;
        (c >= 1 && c <= self.cols).then_some(c)
    }

    /// Local band position of column `c` in row `i`.
    pub fn local_index(&self, i: usize, c: usize) -> Option<usize> {
        let j = (c + self.params.dr).checked_sub(i * self.params.k())?;
        (self.get(i, c) && (1..=self.params.dr).contains(&j)).then_some(j)
    }

    /// All 1-entries as `(row, col)` in row-major order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (1..=self.rows)
            .flat_map(|i| self.row_support(i).map(move |c| (i, c)))
            .collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        (0..self.rows)
            .map(|r| {
                self.entries[r * self.cols..(r + 1) * self.cols]
                    .iter()
                    .map(|&b| b as u8)
                    .collect()
            })
            .collect()
    }
}

fn band_support(params: &CodeParams, i: usize) -> RangeInclusive<usize> {
    let k = params.k();
    let first = (i * k + 1).saturating_sub(params.dr).max(1);
    let last = (i * k).min(params.n_sections());
    first..=last
}

impl fmt::Display for BaseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.to_rows() {
            let s: String = row.iter().map(|&b| if b == 1 { '1' } else { '.' }).collect();
            writeln!(f, "{s}")?;
        }
        Ok(())
    }
}

/// Exact design rate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Rate(pub Ratio<u64>);

impl Rate {
    pub fn as_f64(&self) -> f64 {
        *self.0.numer() as f64 / *self.0.denom() as f64
    }

    /// Decimal string rounded half-up to `places` digits.
    pub fn to_decimal(&self, places: u32) -> String {
        let scale = 10u128.pow(places);
        let num = *self.0.numer() as u128;
        let den = *self.0.denom() as u128;
        let scaled = (2 * num * scale + den) / (2 * den);
        let int = scaled / scale;
        let frac = scaled % scale;
        if places == 0 {
            format!("{int}")
        } else {
            format!("{int}.{frac:0width$}", width = places as usize)
        }
    }
}

impl fmt::Display for Rate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal(5))
    }
}

/// `(k-1)/k - (d_l-1)/(kL)` for original codes, `(k-1)/k - 1/(kL)` for
/// modified codes.
pub fn design_rate(params: &CodeParams) -> Result<Rate> {
    params.validate()?;
    let n = params.n_sections() as u64;
    let m = params.n_checks() as u64;
    Ok(Rate(Ratio::new(n - m, n)))
}

/// Partition of the `kL` sections into information, sequentially encoded
/// parity and termination parity positions (1-based, ascending).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BitAccounting {
    pub n_info: usize,
    pub n_seq: usize,
    pub n_term: usize,
    pub info_positions: Vec<usize>,
    pub seq_parity_positions: Vec<usize>,
    pub term_parity_positions: Vec<usize>,
}

impl BitAccounting {
    pub fn new(params: &CodeParams) -> Result<Self> {
        params.validate()?;
        let k = params.k();
        let n = params.n_sections();
        let (n_info, n_seq, n_term) = if params.modified {
            (n - (params.l + 1), params.l - 1, 2)
        } else {
            let c = (params.dl - 1).div_ceil(k - 1);
            (n - (params.l + params.dl - 1), params.l - c, params.dl - 1 + c)
        };
        debug_assert_eq!(n_info + n_seq + n_term, n);
        let seq_parity_positions: Vec<usize> = (1..=n_seq).map(|i| k * i).collect();
        let term_parity_positions: Vec<usize> = (n - n_term + 1..=n).collect();
        let info_positions = (1..=n - n_term).filter(|c| c % k != 0 || *c > k * n_seq).collect();
        Ok(Self {
            n_info,
            n_seq,
            n_term,
            info_positions,
            seq_parity_positions,
            term_parity_positions,
        })
    }

    /// Check rows handled by the termination stage.
    pub fn term_rows(&self) -> RangeInclusive<usize> {
        self.n_seq + 1..=self.n_seq + self.n_term
    }
}

pub fn bit_accounting(params: &CodeParams) -> Result<BitAccounting> {
    BitAccounting::new(params)
}
