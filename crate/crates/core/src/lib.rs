pub mod error;
pub mod poly;
pub mod rational;
pub mod ring;
pub mod weyl;
pub mod linalg;
pub mod gl;
pub mod jets;
pub mod modules;
pub mod local_iso;
pub mod atlas;
pub mod gk;
