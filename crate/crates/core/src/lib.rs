pub mod applications;
pub mod cdc;
pub mod encoding;
pub mod error;
pub mod formulation;
pub mod io;
pub mod linalg;
pub mod verify;

/// The guide's chapters, compiled so their snippets run as doctests.
#[cfg(doctest)]
pub mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/encodings.md")]
    pub mod encodings {}
    #[doc = include_str!("../../../book/src/construction.md")]
    pub mod construction {}
    #[doc = include_str!("../../../book/src/verification.md")]
    pub mod verification {}
    #[doc = include_str!("../../../book/src/applications.md")]
    pub mod applications {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
    #[doc = include_str!("../../../README.md")]
    pub mod readme {}
}
