//! Published reference values for the rate and threshold table: design
//! rates and BEC BP thresholds of original and modified codes for
//! `(d_l, d_r) ∈ {(3,6), (4,8), (3,9), (4,12)}` and `L ∈ {9, 17, 33, 65}`.

use crate::error::Result;
use crate::protograph::{design_rate, CodeParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReferenceRow {
    pub dl: usize,
    pub dr: usize,
    pub l: usize,
    pub threshold_modified: &'static str,
    pub threshold_original: &'static str,
    pub rate_modified: &'static str,
    pub rate_original: &'static str,
}

const fn row(
    dl: usize,
    dr: usize,
    l: usize,
    threshold_modified: &'static str,
    threshold_original: &'static str,
    rate_modified: &'static str,
    rate_original: &'static str,
) -> ReferenceRow {
    ReferenceRow {
        dl,
        dr,
        l,
        threshold_modified,
        threshold_original,
        rate_modified,
        rate_original,
    }
}

pub const REFERENCE_ROWS: [ReferenceRow; 16] = [
    row(3, 6, 9, "0.49174", "0.51203", "0.44444", "0.38889"),
    row(3, 6, 17, "0.48816", "0.48876", "0.47059", "0.41177"),
    row(3, 6, 33, "0.48815", "0.48815", "0.48485", "0.46970"),
    row(3, 6, 65, "0.48815", "0.48815", "0.49231", "0.48462"),
    row(4, 8, 9, "0.50158", "0.51938", "0.44444", "0.33333"),
    row(4, 8, 17, "0.49774", "0.49787", "0.47059", "0.41177"),
    row(4, 8, 33, "0.49774", "0.49774", "0.48485", "0.45455"),
    row(4, 8, 65, "0.49774", "0.49774", "0.49231", "0.47692"),
    row(3, 9, 9, "0.32157", "0.33305", "0.62963", "0.59259"),
    row(3, 9, 17, "0.31997", "0.31995", "0.64706", "0.62745"),
    row(3, 9, 33, "0.31965", "0.31965", "0.65657", "0.64647"),
    row(3, 9, 65, "0.31965", "0.31965", "0.66154", "0.65641"),
    row(4, 12, 9, "0.33282", "0.33282", "0.62963", "0.52963"),
    row(4, 12, 17, "0.33025", "0.33033", "0.64706", "0.60784"),
    row(4, 12, 33, "0.33025", "0.33025", "0.65657", "0.63636"),
    row(4, 12, 65, "0.33025", "0.33025", "0.66154", "0.65128"),
];

impl ReferenceRow {
    pub fn params(&self, modified: bool) -> CodeParams {
        CodeParams::new(self.dl, self.dr, self.l, modified).expect("reference parameters are valid")
    }

    pub fn threshold(&self, modified: bool) -> f64 {
        let s = if modified {
            self.threshold_modified
        } else {
            self.threshold_original
        };
        s.parse().expect("reference threshold parses")
    }

    pub fn rate(&self, modified: bool) -> &'static str {
        if modified {
            self.rate_modified
        } else {
            self.rate_original
        }
    }
}

pub fn reference_row(dl: usize, dr: usize, l: usize) -> Option<&'static ReferenceRow> {
    REFERENCE_ROWS.iter().find(|r| (r.dl, r.dr, r.l) == (dl, dr, l))
}

/// One line of a regenerated rate table.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct RateRow {
    pub dl: usize,
    pub dr: usize,
    #[serde(rename = "L")]
    pub l: usize,
    pub variant: &'static str,
    pub exact: String,
    pub rate: String,
}

pub fn rate_rows(dl: usize, dr: usize, ls: &[usize]) -> Result<Vec<RateRow>> {
    let mut out = Vec::new();
    for &l in ls {
        for modified in [false, true] {
            let p = CodeParams::new(dl, dr, l, modified)?;
            let r = design_rate(&p)?;
            out.push(RateRow {
                dl,
                dr,
                l,
                variant: p.variant_name(),
                exact: format!("{}/{}", r.0.numer(), r.0.denom()),
                rate: r.to_decimal(5),
            });
        }
    }
    Ok(out)
}
