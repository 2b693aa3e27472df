//! Serialization helpers shared by the JSON reports.

use std::fmt::Display;

use serde::Serializer;

pub const SCHEMA: &str = "crnss.report/1";

pub fn ser_display<T: Display, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

pub fn ser_display_vec<T: Display, S: Serializer>(v: &[T], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}
