pub mod error;
pub mod fpoly;
pub mod exec;
pub mod factor;
pub mod interval;
pub mod matrix;
pub mod poly;
pub mod roots;
pub mod linalg;
pub mod order;
pub mod units;
pub mod topology;
pub mod geometry;
pub mod analysis;
pub mod tables;
