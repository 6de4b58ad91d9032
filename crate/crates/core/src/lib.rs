//! Exact Bass-Serre tree combinatorics for injective amalgamated free products
//! and HNN extensions, with certified Mayer-Vietoris and Seifert-van Kampen
//! splittings of finite free chain complexes over integral group rings.

pub mod groups;
pub mod amalgam;
pub mod tree;
pub mod groupring;
pub mod chain;
pub mod oracle;
pub mod algsplit;
pub mod cwsplit;
pub mod session;
