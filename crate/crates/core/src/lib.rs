//! Minimum colored spanning graphs (Min-kCSG) on planar point sets.
//!
//! Each point carries a nonempty set of primary colors. An edge set is a colored
//! spanning graph when every color class is connected using only the edges whose
//! endpoints share that color. The crate provides exact solvers for two colors and
//! for collinear inputs, approximation algorithms for three colors, a brute-force
//! oracle, the hardness gadget generator, and SVG rendering.

pub mod approx3;
pub mod collinear;
pub mod color;
pub mod dispatch;
pub mod error;
pub mod exact2;
pub mod gadgets;
pub mod instance;
pub mod mst;
pub mod oracle;
pub mod render;
pub mod unionfind;

pub use color::{ColorSet, MAX_COLORS};
pub use error::{CsgError, Result};
pub use instance::{
    approx_eq, approx_le, edge_color, is_csg, load_instance, save_instance, solution_cost, Edge, Instance, Point,
    Solution,
};
