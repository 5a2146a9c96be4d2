//! Double Metaphone phonetic encoding.
//!
//! Follows Lawrence Philips' published rule set (the C++ original as
//! distributed with Aspell) with two deliberate differences: codes are never
//! truncated to four characters, and positions past either end of the word
//! never compare equal to a space, so rules keyed on a trailing `' '` only
//! fire for multi-word input. Input is case-folded, diacritics are stripped
//! (`ç` becomes `S`) and anything outside A-Z is ignored.
//!
//! The output alphabet is the uppercase consonant skeleton plus `A` (initial
//! vowel) and `0` (the `th` sound).

use std::fmt;

use serde::{Deserialize, Serialize};
use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

/// Primary and alternate encodings. `alternate == primary` when the word
/// has no alternate pronunciation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct PhoneticCode {
    pub primary: String,
    pub alternate: String,
}

impl PhoneticCode {
    /// The distinct codes, primary first.
    pub fn codes(&self) -> impl Iterator<Item = &str> {
        let alt = (self.alternate != self.primary).then_some(self.alternate.as_str());
        std::iter::once(self.primary.as_str()).chain(alt)
    }
}

impl fmt::Display for PhoneticCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.alternate == self.primary {
            f.write_str(&self.primary)
        } else {
            write!(f, "{}/{}", self.primary, self.alternate)
        }
    }
}

pub fn double_metaphone(word: &str) -> PhoneticCode {
    Encoder::new(word).encode()
}

fn fold(word: &str) -> Vec<char> {
    word.chars()
        .map(|c| if c == 'ç' || c == 'Ç' { 's' } else { c })
        .nfd()
        .filter(|c| !is_combining_mark(*c))
        .flat_map(char::to_uppercase)
        .filter(char::is_ascii_uppercase)
        .collect()
}

const NONE: char = '\0';

struct Encoder {
    word: Vec<char>,
    last: isize,
    slavo_germanic: bool,
    primary: String,
    alternate: String,
}

impl Encoder {
    fn new(word: &str) -> Self {
        let word = fold(word);
        let s: String = word.iter().collect();
        let slavo_germanic = s.contains('W') || s.contains('K') || s.contains("CZ");
        Self {
            last: word.len() as isize - 1,
            word,
            slavo_germanic,
            primary: String::new(),
            alternate: String::new(),
        }
    }

    fn at(&self, i: isize) -> char {
        if i < 0 {
            return NONE;
        }
        self.word.get(i as usize).copied().unwrap_or(NONE)
    }

    fn string_at(&self, start: isize, options: &[&str]) -> bool {
        if start < 0 {
            return false;
        }
        options.iter().any(|opt| {
            opt.chars()
                .enumerate()
                .all(|(k, c)| self.at(start + k as isize) == c)
        })
    }

    fn is_vowel(&self, i: isize) -> bool {
        matches!(self.at(i), 'A' | 'E' | 'I' | 'O' | 'U' | 'Y')
    }

    fn add(&mut self, code: &str) {
        self.primary.push_str(code);
        self.alternate.push_str(code);
    }

    /// Adds distinct codes; an empty string adds nothing to that side.
    fn add2(&mut self, primary: &str, alternate: &str) {
        self.primary.push_str(primary);
        self.alternate.push_str(alternate);
    }

    fn encode(mut self) -> PhoneticCode {
        let mut cur: isize = 0;
        if self.string_at(0, &["GN", "KN", "PN", "WR", "PS"]) {
            cur += 1;
        }
        if self.at(0) == 'X' {
            // initial X is pronounced Z, which maps to S: 'Xavier'
            self.add("S");
            cur += 1;
        }
        while cur <= self.last {
            cur += match self.at(cur) {
                'A' | 'E' | 'I' | 'O' | 'U' | 'Y' => {
                    if cur == 0 {
                        self.add("A");
                    }
                    1
                }
                'B' => {
                    // '-mb' is handled under M
                    self.add("P");
                    if self.at(cur + 1) == 'B' { 2 } else { 1 }
                }
                'C' => self.letter_c(cur),
                'D' => {
                    if self.string_at(cur, &["DG"]) {
                        if self.string_at(cur + 2, &["I", "E", "Y"]) {
                            // 'edge'
                            self.add("J");
                            3
                        } else {
                            // 'edgar'
                            self.add("TK");
                            2
                        }
                    } else {
                        self.add("T");
                        if self.string_at(cur, &["DT", "DD"]) { 2 } else { 1 }
                    }
                }
                'F' => {
                    self.add("F");
                    if self.at(cur + 1) == 'F' { 2 } else { 1 }
                }
                'G' => self.letter_g(cur),
                'H' => {
                    // keep only if first and before a vowel, or between vowels
                    if (cur == 0 || self.is_vowel(cur - 1)) && self.is_vowel(cur + 1) {
                        self.add("H");
                        2
                    } else {
                        1
                    }
                }
                'J' => self.letter_j(cur),
                'K' => {
                    self.add("K");
                    if self.at(cur + 1) == 'K' { 2 } else { 1 }
                }
                'L' => {
                    if self.at(cur + 1) == 'L' {
                        // spanish 'cabrillo', 'gallegos'
                        let spanish = (cur == self.last - 2
                            && self.string_at(cur - 1, &["ILLO", "ILLA", "ALLE"]))
                            || ((self.string_at(self.last - 1, &["AS", "OS"])
                                || self.string_at(self.last, &["A", "O"]))
                                && self.string_at(cur - 1, &["ALLE"]));
                        if spanish {
                            self.add2("L", "");
                        } else {
                            self.add("L");
                        }
                        2
                    } else {
                        self.add("L");
                        1
                    }
                }
                'M' => {
                    self.add("M");
                    let dumb = self.string_at(cur - 1, &["UMB"])
                        && (cur + 1 == self.last || self.string_at(cur + 2, &["ER"]));
                    if dumb || self.at(cur + 1) == 'M' { 2 } else { 1 }
                }
                'N' => {
                    self.add("N");
                    if self.at(cur + 1) == 'N' { 2 } else { 1 }
                }
                'P' => {
                    if self.at(cur + 1) == 'H' {
                        self.add("F");
                        2
                    } else {
                        // 'campbell', 'raspberry'
                        self.add("P");
                        if self.string_at(cur + 1, &["P", "B"]) { 2 } else { 1 }
                    }
                }
                'Q' => {
                    self.add("K");
                    if self.at(cur + 1) == 'Q' { 2 } else { 1 }
                }
                'R' => {
                    // french 'rogier', but not 'hochmeier'
                    if cur == self.last
                        && !self.slavo_germanic
                        && self.string_at(cur - 2, &["IE"])
                        && !self.string_at(cur - 4, &["ME", "MA"])
                    {
                        self.add2("", "R");
                    } else {
                        self.add("R");
                    }
                    if self.at(cur + 1) == 'R' { 2 } else { 1 }
                }
                'S' => self.letter_s(cur),
                'T' => self.letter_t(cur),
                'V' => {
                    self.add("F");
                    if self.at(cur + 1) == 'V' { 2 } else { 1 }
                }
                'W' => self.letter_w(cur),
                'X' => {
                    // french 'breaux'
                    let silent = cur == self.last
                        && (self.string_at(cur - 3, &["IAU", "EAU"]) || self.string_at(cur - 2, &["AU", "OU"]));
                    if !silent {
                        self.add("KS");
                    }
                    if self.string_at(cur + 1, &["C", "X"]) { 2 } else { 1 }
                }
                'Z' => {
                    if self.at(cur + 1) == 'H' {
                        // pinyin 'zhao'
                        self.add("J");
                        2
                    } else {
                        if self.string_at(cur + 1, &["ZO", "ZI", "ZA"])
                            || (self.slavo_germanic && cur > 0 && self.at(cur - 1) != 'T')
                        {
                            self.add2("S", "TS");
                        } else {
                            self.add("S");
                        }
                        if self.at(cur + 1) == 'Z' { 2 } else { 1 }
                    }
                }
                _ => 1,
            };
        }
        PhoneticCode {
            primary: self.primary,
            alternate: self.alternate,
        }
    }

    fn letter_c(&mut self, cur: isize) -> isize {
        // various germanic
        if cur > 1
            && !self.is_vowel(cur - 2)
            && self.string_at(cur - 1, &["ACH"])
            && self.at(cur + 2) != 'I'
            && (self.at(cur + 2) != 'E' || self.string_at(cur - 2, &["BACHER", "MACHER"]))
        {
            self.add("K");
            return 2;
        }
        if cur == 0 && self.string_at(cur, &["CAESAR"]) {
            self.add("S");
            return 2;
        }
        // italian 'chianti'
        if self.string_at(cur, &["CHIA"]) {
            self.add("K");
            return 2;
        }
        if self.string_at(cur, &["CH"]) {
            // 'michael'
            if cur > 0 && self.string_at(cur, &["CHAE"]) {
                self.add2("K", "X");
                return 2;
            }
            // greek roots, e.g. 'chemistry', 'chorus'
            if cur == 0
                && (self.string_at(cur + 1, &["HARAC", "HARIS"])
                    || self.string_at(cur + 1, &["HOR", "HYM", "HIA", "HEM"]))
                && !self.string_at(0, &["CHORE"])
            {
                self.add("K");
                return 2;
            }
            // germanic, greek, or otherwise 'ch' for 'kh' sound
            if self.string_at(0, &["VAN ", "VON ", "SCH"])
                || self.string_at(cur - 2, &["ORCHES", "ARCHIT", "ORCHID"])
                || self.string_at(cur + 2, &["T", "S"])
                || ((self.string_at(cur - 1, &["A", "O", "U", "E"]) || cur == 0)
                    && self.string_at(cur + 2, &["L", "R", "N", "M", "B", "H", "F", "V", "W", " "]))
            {
                self.add("K");
            } else if cur > 0 {
                if self.string_at(0, &["MC"]) {
                    // 'mchugh'
                    self.add("K");
                } else {
                    self.add2("X", "K");
                }
            } else {
                self.add("X");
            }
            return 2;
        }
        // 'czerny'
        if self.string_at(cur, &["CZ"]) && !self.string_at(cur - 2, &["WICZ"]) {
            self.add2("S", "X");
            return 2;
        }
        // 'focaccia'
        if self.string_at(cur + 1, &["CIA"]) {
            self.add("X");
            return 3;
        }
        // double C, but not 'mcclellan'
        if self.string_at(cur, &["CC"]) && !(cur == 1 && self.at(0) == 'M') {
            // 'bellocchio' but not 'bacchus'
            if self.string_at(cur + 2, &["I", "E", "H"]) && !self.string_at(cur + 2, &["HU"]) {
                if (cur == 1 && self.at(cur - 1) == 'A') || self.string_at(cur - 1, &["UCCEE", "UCCES"]) {
                    // 'accident', 'accede', 'succeed'
                    self.add("KS");
                } else {
                    // 'bacci', 'bertucci'
                    self.add("X");
                }
                return 3;
            }
            // pierce's rule
            self.add("K");
            return 2;
        }
        if self.string_at(cur, &["CK", "CG", "CQ"]) {
            self.add("K");
            return 2;
        }
        if self.string_at(cur, &["CI", "CE", "CY"]) {
            if self.string_at(cur, &["CIO", "CIE", "CIA"]) {
                self.add2("S", "X");
            } else {
                self.add("S");
            }
            return 2;
        }
        self.add("K");
        // 'mac caffrey', 'mac gregor'
        if self.string_at(cur + 1, &[" C", " Q", " G"]) {
            3
        } else if self.string_at(cur + 1, &["C", "K", "Q"]) && !self.string_at(cur + 1, &["CE", "CI"]) {
            2
        } else {
            1
        }
    }

    fn letter_g(&mut self, cur: isize) -> isize {
        if self.at(cur + 1) == 'H' {
            if cur > 0 && !self.is_vowel(cur - 1) {
                self.add("K");
                return 2;
            }
            if cur == 0 {
                // 'ghislane', 'ghiradelli'
                if self.at(cur + 2) == 'I' {
                    self.add("J");
                } else {
                    self.add("K");
                }
                return 2;
            }
            // Parker's rule, e.g. 'hugh', 'bough', 'broughton'
            if (cur > 1 && self.string_at(cur - 2, &["B", "H", "D"]))
                || (cur > 2 && self.string_at(cur - 3, &["B", "H", "D"]))
                || (cur > 3 && self.string_at(cur - 4, &["B", "H"]))
            {
                return 2;
            }
            // 'laugh', 'mclaughlin', 'cough', 'rough', 'tough'
            if cur > 2 && self.at(cur - 1) == 'U' && self.string_at(cur - 3, &["C", "G", "L", "R", "T"]) {
                self.add("F");
            } else if cur > 0 && self.at(cur - 1) != 'I' {
                self.add("K");
            }
            return 2;
        }
        if self.at(cur + 1) == 'N' {
            if cur == 1 && self.is_vowel(0) && !self.slavo_germanic {
                self.add2("KN", "N");
            } else if !self.string_at(cur + 2, &["EY"]) && self.at(cur + 1) != 'Y' && !self.slavo_germanic {
                // not 'cagney'
                self.add2("N", "KN");
            } else {
                self.add("KN");
            }
            return 2;
        }
        // 'tagliaro'
        if self.string_at(cur + 1, &["LI"]) && !self.slavo_germanic {
            self.add2("KL", "L");
            return 2;
        }
        // -ges-, -gep-, -gel-, -gie- at beginning
        if cur == 0
            && (self.at(cur + 1) == 'Y'
                || self.string_at(
                    cur + 1,
                    &["ES", "EP", "EB", "EL", "EY", "IB", "IL", "IN", "IE", "EI", "ER"],
                ))
        {
            self.add2("K", "J");
            return 2;
        }
        // -ger-, -gy-
        if (self.string_at(cur + 1, &["ER"]) || self.at(cur + 1) == 'Y')
            && !self.string_at(0, &["DANGER", "RANGER", "MANGER"])
            && !self.string_at(cur - 1, &["E", "I"])
            && !self.string_at(cur - 1, &["RGY", "OGY"])
        {
            self.add2("K", "J");
            return 2;
        }
        // italian 'biaggi'
        if self.string_at(cur + 1, &["E", "I", "Y"]) || self.string_at(cur - 1, &["AGGI", "OGGI"]) {
            if self.string_at(0, &["VAN ", "VON ", "SCH"]) || self.string_at(cur + 1, &["ET"]) {
                // obvious germanic
                self.add("K");
            } else if self.string_at(cur + 1, &["IER "]) {
                // always soft if french ending
                self.add("J");
            } else {
                self.add2("J", "K");
            }
            return 2;
        }
        self.add("K");
        if self.at(cur + 1) == 'G' { 2 } else { 1 }
    }

    fn letter_j(&mut self, cur: isize) -> isize {
        // obvious spanish, 'jose', 'san jacinto'
        if self.string_at(cur, &["JOSE"]) || self.string_at(0, &["SAN "]) {
            if (cur == 0 && self.at(cur + 4) == ' ') || self.string_at(0, &["SAN "]) {
                self.add("H");
            } else {
                self.add2("J", "H");
            }
            return 1;
        }
        if cur == 0 {
            // 'yankelovich' / 'jankelowicz'
            self.add2("J", "A");
        } else if self.is_vowel(cur - 1) && !self.slavo_germanic && self.string_at(cur + 1, &["A", "O"]) {
            // spanish 'bajador'
            self.add2("J", "H");
        } else if cur == self.last {
            self.add2("J", "");
        } else if !self.string_at(cur + 1, &["L", "T", "K", "S", "N", "M", "B", "Z"])
            && !self.string_at(cur - 1, &["S", "K", "L"])
        {
            self.add("J");
        }
        if self.at(cur + 1) == 'J' { 2 } else { 1 }
    }

    fn letter_s(&mut self, cur: isize) -> isize {
        // 'island', 'isle', 'carlisle', 'carlysle'
        if self.string_at(cur - 1, &["ISL", "YSL"]) {
            return 1;
        }
        // 'sugar-'
        if cur == 0 && self.string_at(cur, &["SUGAR"]) {
            self.add2("X", "S");
            return 1;
        }
        if self.string_at(cur, &["SH"]) {
            if self.string_at(cur + 1, &["HEIM", "HOEK", "HOLM", "HOLZ"]) {
                // germanic
                self.add("S");
            } else {
                self.add("X");
            }
            return 2;
        }
        // italian & armenian
        if self.string_at(cur, &["SIO", "SIA", "SIAN"]) {
            if self.slavo_germanic {
                self.add("S");
            } else {
                self.add2("S", "X");
            }
            return 3;
        }
        // 'smith' ~ 'schmidt', 'snider' ~ 'schneider'; slavic -sz-
        if (cur == 0 && self.string_at(cur + 1, &["M", "N", "L", "W"])) || self.string_at(cur + 1, &["Z"]) {
            self.add2("S", "X");
            return if self.string_at(cur + 1, &["Z"]) { 2 } else { 1 };
        }
        if self.string_at(cur, &["SC"]) {
            // Schlesinger's rule
            if self.at(cur + 2) == 'H' {
                // dutch origin, e.g. 'school', 'schooner'
                if self.string_at(cur + 3, &["OO", "ER", "EN", "UY", "ED", "EM"]) {
                    // 'schermerhorn', 'schenker'
                    if self.string_at(cur + 3, &["ER", "EN"]) {
                        self.add2("X", "SK");
                    } else {
                        self.add("SK");
                    }
                } else if cur == 0 && !self.is_vowel(3) && self.at(3) != 'W' {
                    self.add2("X", "S");
                } else {
                    self.add("X");
                }
                return 3;
            }
            if self.string_at(cur + 2, &["I", "E", "Y"]) {
                self.add("S");
            } else {
                self.add("SK");
            }
            return 3;
        }
        // french 'resnais', 'artois'
        if cur == self.last && self.string_at(cur - 2, &["AI", "OI"]) {
            self.add2("", "S");
        } else {
            self.add("S");
        }
        if self.string_at(cur + 1, &["S", "Z"]) { 2 } else { 1 }
    }

    fn letter_t(&mut self, cur: isize) -> isize {
        if self.string_at(cur, &["TION"]) {
            self.add("X");
            return 3;
        }
        if self.string_at(cur, &["TIA", "TCH"]) {
            self.add("X");
            return 3;
        }
        if self.string_at(cur, &["TH", "TTH"]) {
            // 'thomas', 'thames', or germanic
            if self.string_at(cur + 2, &["OM", "AM"]) || self.string_at(0, &["VAN ", "VON ", "SCH"]) {
                self.add("T");
            } else {
                self.add2("0", "T");
            }
            return 2;
        }
        self.add("T");
        if self.string_at(cur + 1, &["T", "D"]) { 2 } else { 1 }
    }

    fn letter_w(&mut self, cur: isize) -> isize {
        // can also be in the middle of a word
        if self.string_at(cur, &["WR"]) {
            self.add("R");
            return 2;
        }
        if cur == 0 && (self.is_vowel(cur + 1) || self.string_at(cur, &["WH"])) {
            if self.is_vowel(cur + 1) {
                // 'wasserman' ~ 'vasserman'
                self.add2("A", "F");
            } else {
                // 'uomo' ~ 'womo'
                self.add("A");
            }
        }
        // 'arnow' ~ 'arnoff'
        if (cur == self.last && self.is_vowel(cur - 1))
            || self.string_at(cur - 1, &["EWSKI", "EWSKY", "OWSKI", "OWSKY"])
            || self.string_at(0, &["SCH"])
        {
            self.add2("", "F");
            return 1;
        }
        // polish 'filipowicz'
        if self.string_at(cur, &["WICZ", "WITZ"]) {
            self.add2("TS", "FX");
            return 4;
        }
        1
    }
}
