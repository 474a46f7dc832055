#![allow(dead_code)]

pub mod momentum_oracle;
