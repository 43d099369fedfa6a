#![allow(dead_code)]

pub mod motivating;
