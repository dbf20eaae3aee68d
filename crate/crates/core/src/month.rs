use std::fmt;
use std::str::FromStr;

/// A calendar month, ordered chronologically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Month {
    year: i32,
    month: u32,
}

impl Month {
    pub fn new(year: i32, month: u32) -> Option<Self> {
        (1..=12).contains(&month).then_some(Self { year, month })
    }

    pub fn year(self) -> i32 {
        self.year
    }

    pub fn month(self) -> u32 {
        self.month
    }

    pub fn succ(self) -> Self {
        if self.month == 12 {
            Self {
                year: self.year + 1,
                month: 1,
            }
        } else {
            Self {
                year: self.year,
                month: self.month + 1,
            }
        }
    }

    /// Signed number of months from `self` to `other`.
    pub fn months_until(self, other: Month) -> i64 {
        (other.year as i64 - self.year as i64) * 12 + other.month as i64 - self.month as i64
    }

    /// Parses the FRED-MD `M/D/YYYY` date stamp; the day is validated and discarded.
    pub fn parse_mdy(s: &str) -> Option<Self> {
        let mut it = s.trim().split('/');
        let m: u32 = it.next()?.trim().parse().ok()?;
        let d: u32 = it.next()?.trim().parse().ok()?;
        let y: i32 = it.next()?.trim().parse().ok()?;
        if it.next().is_some() || !(1..=31).contains(&d) {
            return None;
        }
        Self::new(y, m)
    }

    /// `M/1/YYYY`, the stamp FRED-MD files use.
    pub fn to_mdy(self) -> String {
        format!("{}/1/{}", self.month, self.year)
    }
}

impl fmt::Display for Month {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseMonthError(pub String);

impl fmt::Display for ParseMonthError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid month {:?}, expected YYYY-MM", self.0)
    }
}

impl std::error::Error for ParseMonthError {}

impl FromStr for Month {
    type Err = ParseMonthError;

    /// Parses `YYYY-MM`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseMonthError(s.to_string());
        let (y, m) = s.trim().split_once('-').ok_or_else(err)?;
        if y.len() != 4 || m.is_empty() || m.len() > 2 {
            return Err(err());
        }
        let year = y.parse().map_err(|_| err())?;
        let month = m.parse().map_err(|_| err())?;
        Month::new(year, month).ok_or_else(err)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn succ_rolls_over_year() {
        let dec = Month::new(2009, 12).unwrap();
        assert_eq!(dec.succ(), Month::new(2010, 1).unwrap());
        assert_eq!(dec.months_until(dec.succ()), 1);
    }

    #[test]
    fn parses_both_formats() {
        assert_eq!(Month::parse_mdy("9/1/2009"), Month::new(2009, 9));
        assert_eq!(Month::parse_mdy("13/1/2009"), None);
        assert_eq!(Month::parse_mdy("2009-09"), None);
        assert_eq!("2024-12".parse::<Month>().unwrap(), Month::new(2024, 12).unwrap());
        assert!("2024-13".parse::<Month>().is_err());
        assert!("24-1".parse::<Month>().is_err());
        assert_eq!(Month::new(2009, 9).unwrap().to_string(), "2009-09");
    }

    #[test]
    fn window_length() {
        let a: Month = "2009-09".parse().unwrap();
        let b: Month = "2024-12".parse().unwrap();
        assert_eq!(a.months_until(b) + 1, 184);
    }
}
