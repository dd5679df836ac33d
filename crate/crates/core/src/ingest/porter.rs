//! Porter suffix-stripping stemmer.
//!
//! Classic five-step algorithm over lowercase ASCII words, including the two
//! long-standing refinements to step 2 (`bli -> ble`, `logi -> log`) that the
//! reference vocabulary/output lists were generated with. Words of one or two
//! letters are returned unchanged.

/// Stem a lowercase alphabetic token.
pub fn stem(token: &str) -> String {
    let mut buf: Vec<u8> = token.bytes().map(|b| b.to_ascii_lowercase()).collect();
    if buf.len() > 2 {
        let mut s = Stemmer {
            b: &mut buf,
            end: token.len(),
            j: 0,
        };
        s.step1ab();
        s.step1c();
        s.step2();
        s.step3();
        s.step4();
        s.step5();
        let end = s.end;
        buf.truncate(end);
    }
    String::from_utf8(buf).expect("ascii in, ascii out")
}

struct Stemmer<'a> {
    b: &'a mut Vec<u8>,
    /// Length of the live prefix of `b`.
    end: usize,
    /// Length of the stem left when a candidate suffix matched.
    j: usize,
}

impl Stemmer<'_> {
    fn is_consonant(&self, i: usize) -> bool {
        match self.b[i] {
            b'a' | b'e' | b'i' | b'o' | b'u' => false,
            b'y' => i == 0 || !self.is_consonant(i - 1),
            _ => true,
        }
    }

    /// Number of vowel-consonant spans in `b[..j]`.
    fn measure(&self) -> usize {
        let j = self.j;
        let mut n = 0;
        let mut i = 0;
        loop {
            if i >= j {
                return n;
            }
            if !self.is_consonant(i) {
                break;
            }
            i += 1;
        }
        i += 1;
        loop {
            loop {
                if i >= j {
                    return n;
                }
                if self.is_consonant(i) {
                    break;
                }
                i += 1;
            }
            i += 1;
            n += 1;
            loop {
                if i >= j {
                    return n;
                }
                if !self.is_consonant(i) {
                    break;
                }
                i += 1;
            }
            i += 1;
        }
    }

    fn has_vowel(&self) -> bool {
        (0..self.j).any(|i| !self.is_consonant(i))
    }

    /// Does the live prefix end in a double consonant?
    fn ends_double_consonant(&self) -> bool {
        self.end >= 2
            && self.b[self.end - 1] == self.b[self.end - 2]
            && self.is_consonant(self.end - 1)
    }

    /// consonant-vowel-consonant ending at index `i`, where the final
    /// consonant is not w, x or y.
    fn cvc_at(&self, i: usize) -> bool {
        if i < 2 || !self.is_consonant(i) || self.is_consonant(i - 1) || !self.is_consonant(i - 2) {
            return false;
        }
        !matches!(self.b[i], b'w' | b'x' | b'y')
    }

    /// On a suffix match, records the stem length in `j`.
    fn ends(&mut self, suffix: &[u8]) -> bool {
        if suffix.len() > self.end {
            return false;
        }
        if &self.b[self.end - suffix.len()..self.end] == suffix {
            self.j = self.end - suffix.len();
            true
        } else {
            false
        }
    }

    /// Replace the matched suffix with `s`.
    fn set_to(&mut self, s: &[u8]) {
        self.b.truncate(self.j);
        self.b.extend_from_slice(s);
        self.end = self.j + s.len();
    }

    /// Conditional replacement: only when the stem has at least one
    /// vowel-consonant span.
    fn replace_if_measure(&mut self, s: &[u8]) {
        if self.measure() > 0 {
            self.set_to(s);
        }
    }

    fn truncate_to_j(&mut self) {
        self.end = self.j;
        self.b.truncate(self.end);
    }

    fn step1ab(&mut self) {
        if self.b[self.end - 1] == b's' {
            if self.ends(b"sses") {
                self.end -= 2;
                self.b.truncate(self.end);
            } else if self.ends(b"ies") {
                self.set_to(b"i");
            } else if self.b[self.end - 2] != b's' {
                self.end -= 1;
                self.b.truncate(self.end);
            }
        }
        if self.ends(b"eed") {
            if self.measure() > 0 {
                self.end -= 1;
                self.b.truncate(self.end);
            }
        } else if (self.ends(b"ed") || self.ends(b"ing")) && self.has_vowel() {
            self.truncate_to_j();
            self.j = self.end;
            if self.ends(b"at") {
                self.set_to(b"ate");
            } else if self.ends(b"bl") {
                self.set_to(b"ble");
            } else if self.ends(b"iz") {
                self.set_to(b"ize");
            } else if self.ends_double_consonant() {
                if !matches!(self.b[self.end - 1], b'l' | b's' | b'z') {
                    self.end -= 1;
                    self.b.truncate(self.end);
                }
            } else if self.measure() == 1 && self.cvc_at(self.end - 1) {
                self.j = self.end;
                self.set_to(b"e");
            }
        }
    }

    fn step1c(&mut self) {
        if self.ends(b"y") && self.has_vowel() {
            self.b[self.end - 1] = b'i';
        }
    }

    fn step2(&mut self) {
        if self.end < 2 {
            return;
        }
        let rules: &[(&[u8], &[u8])] = match self.b[self.end - 2] {
            b'a' => &[(b"ational", b"ate"), (b"tional", b"tion")],
            b'c' => &[(b"enci", b"ence"), (b"anci", b"ance")],
            b'e' => &[(b"izer", b"ize")],
            b'l' => &[
                (b"bli", b"ble"),
                (b"alli", b"al"),
                (b"entli", b"ent"),
                (b"eli", b"e"),
                (b"ousli", b"ous"),
            ],
            b'o' => &[(b"ization", b"ize"), (b"ation", b"ate"), (b"ator", b"ate")],
            b's' => &[
                (b"alism", b"al"),
                (b"iveness", b"ive"),
                (b"fulness", b"ful"),
                (b"ousness", b"ous"),
            ],
            b't' => &[(b"aliti", b"al"), (b"iviti", b"ive"), (b"biliti", b"ble")],
            b'g' => &[(b"logi", b"log")],
            _ => return,
        };
        for &(suffix, replacement) in rules {
            if self.ends(suffix) {
                self.replace_if_measure(replacement);
                return;
            }
        }
    }

    fn step3(&mut self) {
        let rules: &[(&[u8], &[u8])] = match self.b[self.end - 1] {
            b'e' => &[(b"icate", b"ic"), (b"ative", b""), (b"alize", b"al")],
            b'i' => &[(b"iciti", b"ic")],
            b'l' => &[(b"ical", b"ic"), (b"ful", b"")],
            b's' => &[(b"ness", b"")],
            _ => return,
        };
        for &(suffix, replacement) in rules {
            if self.ends(suffix) {
                self.replace_if_measure(replacement);
                return;
            }
        }
    }

    fn step4(&mut self) {
        if self.end < 2 {
            return;
        }
        let matched = match self.b[self.end - 2] {
            b'a' => self.ends(b"al"),
            b'c' => self.ends(b"ance") || self.ends(b"ence"),
            b'e' => self.ends(b"er"),
            b'i' => self.ends(b"ic"),
            b'l' => self.ends(b"able") || self.ends(b"ible"),
            b'n' => {
                self.ends(b"ant")
                    || self.ends(b"ement")
                    || self.ends(b"ment")
                    || self.ends(b"ent")
            }
            b'o' => {
                (self.ends(b"ion") && self.j >= 1 && matches!(self.b[self.j - 1], b's' | b't'))
                    || self.ends(b"ou")
            }
            b's' => self.ends(b"ism"),
            b't' => self.ends(b"ate") || self.ends(b"iti"),
            b'u' => self.ends(b"ous"),
            b'v' => self.ends(b"ive"),
            b'z' => self.ends(b"ize"),
            _ => false,
        };
        if matched && self.measure() > 1 {
            self.truncate_to_j();
        }
    }

    fn step5(&mut self) {
        self.j = self.end;
        if self.b[self.end - 1] == b'e' {
            let m = self.measure();
            if m > 1 || (m == 1 && !(self.end >= 2 && self.cvc_at(self.end - 2))) {
                self.end -= 1;
                self.b.truncate(self.end);
            }
        }
        self.j = self.end;
        if self.b[self.end - 1] == b'l' && self.ends_double_consonant() && self.measure() > 1 {
            self.end -= 1;
            self.b.truncate(self.end);
        }
    }
}
