pub mod f2;
pub mod tau;
pub mod milnor;
pub mod amodule;
pub mod margolis;
pub mod resolve;
pub mod ext;
pub mod chartio;

/// Guide chapters, compiled as doc-tests so their snippets stay current.
#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../book/src/tau.md")]
    mod tau {}
    #[doc = include_str!("../../../book/src/milnor.md")]
    mod milnor {}
    #[doc = include_str!("../../../book/src/modules.md")]
    mod modules {}
    #[doc = include_str!("../../../book/src/margolis.md")]
    mod margolis {}
    #[doc = include_str!("../../../book/src/resolve.md")]
    mod resolve {}
    #[doc = include_str!("../../../book/src/ext.md")]
    mod ext {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
}
