//! Reconfiguration of circular colourings.
//!
//! A `(p,q)`-colouring maps each vertex to `0..p` so that adjacent colours
//! differ by at least `q` and at most `p - q`. Two colourings are linked when
//! they differ on one vertex. For `p < 4q` the [`recolour`] module decides in
//! polynomial time whether one colouring can reach another and returns either
//! a sequence of single-vertex changes or a checkable obstruction.
//!
//! ```
//! use circular_recolour::circular::{CircularColouring, CircularParams};
//! use circular_recolour::graph::Graph;
//! use circular_recolour::recolour::{recolour, Verdict};
//!
//! let g = Graph::path(3);
//! let params = CircularParams::new(5, 2).unwrap();
//! let f = CircularColouring::new(params, vec![0, 2, 4]).unwrap();
//! let h = CircularColouring::new(params, vec![0, 3, 1]).unwrap();
//! match recolour(&g, &f, &h).unwrap() {
//!     Verdict::Yes(steps) => assert!(!steps.is_empty()),
//!     Verdict::No(obstruction) => panic!("{obstruction}"),
//! }
//! ```
//!
//! The remaining modules cover the brute-force [`oracle`], the reduction for
//! `p >= 4q` in [`hardness`], and cycle counting for `k`-colourings in
//! [`chromatic`].

pub mod chromatic;
pub mod circular;
pub mod format;
pub mod graph;
pub mod hardness;
pub mod labelling;
pub mod oracle;
pub mod recolour;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/colourings.md")]
    mod colourings {}
    #[doc = include_str!("../../../book/src/labellings.md")]
    mod labellings {}
    #[doc = include_str!("../../../book/src/recolouring.md")]
    mod recolouring {}
    #[doc = include_str!("../../../book/src/oracle.md")]
    mod oracle {}
    #[doc = include_str!("../../../book/src/hardness.md")]
    mod hardness {}
    #[doc = include_str!("../../../book/src/cycles.md")]
    mod cycles {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
