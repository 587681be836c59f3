//! Published reference eigenvalues, shipped as `data/reference_table.csv`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::sweep::Method;
use crate::{Error, Result};

const TABLE: &str = include_str!("../data/reference_table.csv");

/// Exponents with a reference column, in column order.
pub const REFERENCE_EXPONENTS: [f64; 8] = [2.5, 3.0, 3.8, 4.2, 5.0, 6.0, 6.8, 10.0];

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ReferenceCell {
    pub method: Method,
    pub level: usize,
    pub exponent: f64,
    pub value: f64,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ReferenceTable {
    pub cells: Vec<ReferenceCell>,
}

impl ReferenceTable {
    /// Parses `method,level,N,value,note` rows; `#` lines and the header are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cells = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.is_empty() || line.starts_with('#') || line.starts_with("method,") {
                continue;
            }
            let bad = |what: &str| Error::Parse(format!("reference line {}: {what}", i + 1));
            let mut f = line.splitn(5, ',');
            let mut next = |what: &str| f.next().ok_or_else(|| bad(what));
            let method = Method::from_tag(next("method")?).map_err(|_| bad("method"))?;
            let level = next("level")?.parse().map_err(|_| bad("level"))?;
            let exponent = next("N")?.parse().map_err(|_| bad("N"))?;
            let value = next("value")?.parse().map_err(|_| bad("value"))?;
            let note = f.next().unwrap_or("").to_string();
            cells.push(ReferenceCell { method, level, exponent, value, note });
        }
        Ok(Self { cells })
    }

    pub fn get(&self, method: Method, level: usize, exponent: f64) -> Option<&ReferenceCell> {
        self.cells
            .iter()
            .find(|c| c.method == method && c.level == level && (c.exponent - exponent).abs() < 1e-9)
    }

    /// Values of `method` at `exponent`, ordered by level.
    pub fn column(&self, method: Method, exponent: f64) -> Vec<f64> {
        let mut col: Vec<&ReferenceCell> = self
            .cells
            .iter()
            .filter(|c| c.method == method && (c.exponent - exponent).abs() < 1e-9)
            .collect();
        col.sort_by_key(|c| c.level);
        col.iter().map(|c| c.value).collect()
    }
}

/// The bundled table.
pub fn reference_table() -> ReferenceTable {
    ReferenceTable::parse(TABLE).expect("bundled reference table parses")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_table_is_complete() {
        let t = reference_table();
        assert_eq!(t.cells.len(), 3 * 5 * 8);
        for m in [Method::M1, Method::M2, Method::M3] {
            for &n in &REFERENCE_EXPONENTS {
                assert_eq!(t.column(m, n).len(), 5);
            }
        }
        assert_eq!(t.get(Method::M2, 0, 3.0).unwrap().value, 1.1563);
        assert_eq!(t.column(Method::M3, 10.0), [1.2986, 5.1024, 11.1539, 19.1884, 28.9715]);
        assert!(!t.get(Method::M1, 0, 5.0).unwrap().note.is_empty());
    }

    #[test]
    fn parse_errors() {
        assert!(ReferenceTable::parse("M9,0,3,1.0,\n").is_err());
        assert!(ReferenceTable::parse("M1,x,3,1.0,\n").is_err());
        assert!(ReferenceTable::parse("M1,0\n").is_err());
        let t = ReferenceTable::parse("# c\nmethod,level,N,value,note\nM0,1,2,3.0,a, b\n").unwrap();
        assert_eq!(t.cells[0].note, "a, b");
    }
}
