//! American Soundex, as used by the US National Archives census indexes.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::term::fold;

/// A letter followed by three digits, e.g. `H562`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SoundexCode([u8; 4]);

impl SoundexCode {
    pub fn as_str(&self) -> &str {
        std::str::from_utf8(&self.0).expect("soundex codes are ASCII")
    }
}

impl fmt::Display for SoundexCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for SoundexCode {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

/// The token has no letters to encode; callers fall back to exact matching.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{0:?} contains no letters to encode")]
pub struct NonPhonetic(pub String);

fn digit(c: u8) -> Option<u8> {
    match c {
        b'b' | b'f' | b'p' | b'v' => Some(b'1'),
        b'c' | b'g' | b'j' | b'k' | b'q' | b's' | b'x' | b'z' => Some(b'2'),
        b'd' | b't' => Some(b'3'),
        b'l' => Some(b'4'),
        b'm' | b'n' => Some(b'5'),
        b'r' => Some(b'6'),
        _ => None,
    }
}

/// Encodes `token`. Case and diacritics are ignored, as are non-letters.
///
/// H and W are transparent (consonants either side with the same code count
/// once) while vowels and Y separate, so a repeated code after a vowel is
/// written again. A second letter with the same code as the first is dropped.
pub fn soundex(token: &str) -> Result<SoundexCode, NonPhonetic> {
    let letters: Vec<u8> = fold(token).bytes().filter(u8::is_ascii_lowercase).collect();
    let (&first, rest) = letters.split_first().ok_or_else(|| NonPhonetic(token.to_string()))?;

    let mut code = [b'0'; 4];
    code[0] = first.to_ascii_uppercase();
    let mut len = 1;
    let mut last = digit(first);
    for &c in rest {
        if len == 4 {
            break;
        }
        match c {
            b'h' | b'w' => {}
            b'a' | b'e' | b'i' | b'o' | b'u' | b'y' => last = None,
            _ => {
                let d = digit(c);
                if d != last {
                    if let Some(d) = d {
                        code[len] = d;
                        len += 1;
                    }
                }
                last = d;
            }
        }
    }
    Ok(SoundexCode(code))
}
