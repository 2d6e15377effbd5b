//! Named direction families and the rectangle constructions used for
//! lower bounds.

mod besicovitch;
mod families;
mod lift;

pub use besicovitch::{besicovitch_family, default_slopes, Rectangle2D, RectangleFamily};
pub use families::{
    carbery_certificate, carbery_directions, nsw_directions, rational_slope_set, rotated_accumulating_set,
    slope_rationals, NswFamily, RotatedFamily,
};
pub use lift::{kakeya_lift, KakeyaLift};
