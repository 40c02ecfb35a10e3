use std::str::FromStr;

use num_bigint::BigInt;

use super::Gaussian;
use crate::error::Error;
use crate::scalar::GaussScalar;

/// Accepts `a+bi`, `a-bi`, `bi`, `a`, `i`, `-i`, in any order of the two
/// terms; whitespace is ignored.
impl<T: GaussScalar> FromStr for Gaussian<T> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let err = || Error::Parse(s.to_string());
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(err());
        }
        // split into signed terms
        let mut terms: Vec<String> = Vec::new();
        for (idx, c) in compact.char_indices() {
            if (c == '+' || c == '-') && idx > 0 {
                terms.push(String::new());
            }
            if terms.is_empty() {
                terms.push(String::new());
            }
            terms.last_mut().unwrap().push(c);
        }
        if terms.len() > 2 {
            return Err(err());
        }
        let mut re: Option<BigInt> = None;
        let mut im: Option<BigInt> = None;
        for t in terms {
            let (sign, body) = match t.strip_prefix('-') {
                Some(rest) => (-1, rest),
                None => (1, t.strip_prefix('+').unwrap_or(&t)),
            };
            if let Some(coef) = body.strip_suffix('i') {
                let v = if coef.is_empty() {
                    BigInt::from(1)
                } else if coef.chars().all(|c| c.is_ascii_digit()) {
                    coef.parse::<BigInt>().map_err(|_| err())?
                } else {
                    return Err(err());
                };
                if im.replace(v * sign).is_some() {
                    return Err(err());
                }
            } else {
                if body.is_empty() || !body.chars().all(|c| c.is_ascii_digit()) {
                    return Err(err());
                }
                let v = body.parse::<BigInt>().map_err(|_| err())?;
                if re.replace(v * sign).is_some() {
                    return Err(err());
                }
            }
        }
        let g = Gaussian::new(re.unwrap_or_default(), im.unwrap_or_default());
        Gaussian::from_big(&g).ok_or_else(err)
    }
}

#[cfg(test)]
mod tests {
    use crate::GaussInt;

    fn p(s: &str) -> GaussInt {
        s.parse().unwrap()
    }

    #[test]
    fn accepted_forms() {
        assert_eq!(p("-1+2i"), GaussInt::from_i64(-1, 2));
        assert_eq!(p(" 3 - 4 i "), GaussInt::from_i64(3, -4));
        assert_eq!(p("7i"), GaussInt::from_i64(0, 7));
        assert_eq!(p("-i"), GaussInt::from_i64(0, -1));
        assert_eq!(p("i"), GaussInt::from_i64(0, 1));
        assert_eq!(p("-12"), GaussInt::from_i64(-12, 0));
        assert_eq!(p("+5"), GaussInt::from_i64(5, 0));
        assert_eq!(p("2i+1"), GaussInt::from_i64(1, 2));
        assert_eq!(p("123456789012345678901234567890+1i").re.to_string(), "123456789012345678901234567890");
    }

    #[test]
    fn rejected_forms() {
        for s in ["", "1+2", "i+i", "1+2j", "1++2i", "--1", "1+2i+3", "x"] {
            assert!(s.parse::<GaussInt>().is_err(), "{s:?} parsed");
        }
    }

    #[test]
    fn fixed_width_overflow_is_an_error() {
        assert!("99999999999999999999".parse::<super::Gaussian<i64>>().is_err());
    }
}
