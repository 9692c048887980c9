// Shared between test targets; not every target uses every helper.
#![allow(dead_code)]

pub mod dense;
