//! Combinatorics of rational laminations and polynomial renormalization.

pub mod angle_system;
pub mod circle;
pub mod dynamics;
pub mod error;
pub mod fixtures;
pub mod io;
pub mod lamination;
pub mod render;
pub mod schema;

/// The guide in `book/`, compiled so its examples stay in sync with the code.
pub mod guide {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/chapter1.md")]
    pub mod chapter1 {}
    #[doc = include_str!("../../../book/src/chapter2.md")]
    pub mod chapter2 {}
    #[doc = include_str!("../../../book/src/chapter3.md")]
    pub mod chapter3 {}
    #[doc = include_str!("../../../book/src/chapter4.md")]
    pub mod chapter4 {}
    #[doc = include_str!("../../../book/src/chapter5.md")]
    pub mod chapter5 {}
    #[doc = include_str!("../../../book/src/chapter6.md")]
    pub mod chapter6 {}
    #[doc = include_str!("../../../book/src/chapter7.md")]
    pub mod chapter7 {}
}
