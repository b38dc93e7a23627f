pub mod enumerator;
pub mod estimate;
pub mod fan;
pub mod hypermap;
pub mod lpfeas;
pub mod pipeline;
pub mod sphgeom;
pub mod tame;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/hypermaps.md")]
    mod hypermaps {}
    #[doc = include_str!("../../../book/src/fans.md")]
    mod fans {}
    #[doc = include_str!("../../../book/src/tame.md")]
    mod tame {}
    #[doc = include_str!("../../../book/src/estimates.md")]
    mod estimates {}
    #[doc = include_str!("../../../book/src/enumeration.md")]
    mod enumeration {}
    #[doc = include_str!("../../../book/src/elimination.md")]
    mod elimination {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
