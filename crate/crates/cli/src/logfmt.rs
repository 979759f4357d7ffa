//! Single-line `key=value` records.

use std::fmt::Write;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Record(Vec<(String, String)>);

impl Record {
    pub fn new() -> Self {
        Record::default()
    }

    pub fn push(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.0.push((key.to_string(), value.to_string()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn fields(&self) -> impl Iterator<Item = (&str, &str)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (i, (k, v)) in self.0.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            out.push_str(k);
            out.push('=');
            if v.is_empty() || v.contains([' ', '=', '"', '\\']) {
                out.push('"');
                for c in v.chars() {
                    if c == '"' || c == '\\' {
                        out.push('\\');
                    }
                    out.push(c);
                }
                out.push('"');
            } else {
                out.push_str(v);
            }
        }
        out
    }
}

/// `[a, b, ...]` with each element formatted by `f`.
pub fn list<T>(xs: &[T], f: impl Fn(&T) -> String) -> String {
    let mut s = String::from("[");
    for (i, x) in xs.iter().enumerate() {
        if i > 0 {
            s.push_str(", ");
        }
        let _ = write!(s, "{}", f(x));
    }
    s.push(']');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quotes_only_when_needed() {
        let mut r = Record::new();
        r.push("a", 1).push("drift", "[0/1, 0/1]").push("e", "").push("q", "say \"hi\"");
        assert_eq!(r.render(), r#"a=1 drift="[0/1, 0/1]" e="" q="say \"hi\"""#);
        assert_eq!(r.get("drift"), Some("[0/1, 0/1]"));
    }
}
