//! Output shared by every subcommand, in two layouts.
//!
//! `human` prints `key: value`; `lines` prints `key=value`, one record per
//! line, with any extra attributes appended as further `key=value` tokens.

use std::fmt::{self, Write as _};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Human,
    Lines,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    items: Vec<Item>,
}

#[derive(Debug, Clone, PartialEq)]
struct Item {
    key: String,
    value: String,
    attrs: Vec<(String, String)>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn field(&mut self, key: &str, value: impl fmt::Display) -> &mut Self {
        self.record(key, value, Vec::new())
    }

    pub fn record(
        &mut self,
        key: &str,
        value: impl fmt::Display,
        attrs: Vec<(String, String)>,
    ) -> &mut Self {
        self.items.push(Item {
            key: key.to_owned(),
            value: value.to_string(),
            attrs,
        });
        self
    }

    /// Value of the first item with this key.
    pub fn get(&self, key: &str) -> Option<&str> {
        self.items
            .iter()
            .find(|item| item.key == key)
            .map(|item| item.value.as_str())
    }

    pub fn render(&self, format: Format) -> String {
        let mut out = String::new();
        for item in &self.items {
            let attrs = item
                .attrs
                .iter()
                .map(|(k, v)| format!("{k}={}", quote(v)))
                .collect::<Vec<_>>()
                .join(" ");
            match format {
                Format::Human if attrs.is_empty() => {
                    let _ = writeln!(out, "{}: {}", item.key, item.value);
                }
                Format::Human => {
                    let _ = writeln!(out, "{} {}: {attrs}", item.key, item.value);
                }
                Format::Lines if attrs.is_empty() => {
                    let _ = writeln!(out, "{}={}", item.key, quote(&item.value));
                }
                Format::Lines => {
                    let _ = writeln!(out, "{}={} {attrs}", item.key, quote(&item.value));
                }
            }
        }
        out
    }
}

/// Builds an attribute list from `(key, value)` pairs.
#[macro_export]
macro_rules! attrs {
    ($($k:expr => $v:expr),* $(,)?) => {
        vec![$(($k.to_string(), $v.to_string())),*]
    };
}

/// Values with whitespace, quotes or `=` are written as JSON strings.
fn quote(value: &str) -> String {
    if value.is_empty() || value.contains(|c: char| c.is_whitespace() || c == '"' || c == '=') {
        serde_json::to_string(value).expect("strings serialize")
    } else {
        value.to_owned()
    }
}
