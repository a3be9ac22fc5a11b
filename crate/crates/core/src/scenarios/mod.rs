//! Built-in scenarios: tent signals on the circle under rotations, and seeded
//! random finite pairs and GENEO spaces.

mod circle;
mod random;

pub use circle::{
    circle_distance, gen_circle, geodesic, normalize, rotations, tent, CirclePresentation,
    CircleScenario, Turn,
};
pub use random::{
    gen_non_surjective_space, gen_random_finite, gen_random_geneo_space, gen_random_quantized,
    SpaceKind, MAX_RANDOM_DOMAIN, MAX_RANDOM_SIGNALS,
};
