//! Synthetic tables, chart recommendation, styling, SVG rendering and
//! occupancy rasterization.

mod raster;
mod recommend;
mod scene;
mod style;
mod svg;
mod table;
mod vocab;

pub use raster::{rasterize, rasterize_scene, PixelGrid, TextAnchor};
pub use recommend::{recommend_charts, MAX_PIE_SLICES};
pub use scene::{layout, Mark, MarkClass, PlotArea, Scene, Shape, TextAlign, TextNode, TextRole};
pub use style::{randomize_style, PALETTES};
pub use svg::{render_scene, render_svg};
pub use table::{gen_table, SchemaProfile};

pub(crate) use vocab::month_name;
