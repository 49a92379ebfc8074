use std::collections::BTreeMap;

use once_cell::sync::Lazy;
use serde::Deserialize;

use super::Color;

const PALETTE_JSON: &str = include_str!("../../assets/palette.json");

/// Named colors shipped in `assets/palette.json`.
#[derive(Debug, Deserialize)]
pub struct Palette {
    /// Default membership tolerance (RGB Euclidean distance).
    pub tolerance: f64,
    named: BTreeMap<String, Color>,
    /// Symbol colors shared by the logic grid, Raven tiles and graph coloring.
    pub symbols: Vec<Color>,
    pub portals: Vec<Color>,
    /// Cellular automaton state colors, indexed by state.
    pub states: Vec<Color>,
}

static PALETTE: Lazy<Palette> =
    Lazy::new(|| serde_json::from_str(PALETTE_JSON).expect("embedded palette.json is valid"));

impl Palette {
    pub fn get() -> &'static Palette {
        &PALETTE
    }

    /// Panics on an unknown name; names are compile-time constants in this crate.
    pub fn named(&self, name: &str) -> Color {
        *self
            .named
            .get(name)
            .unwrap_or_else(|| panic!("palette has no color named `{name}`"))
    }

    pub fn names(&self) -> impl Iterator<Item = (&str, Color)> {
        self.named.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

pub fn named(name: &str) -> Color {
    Palette::get().named(name)
}

pub fn min_pairwise_distance(colors: &[Color]) -> f64 {
    let mut best = f64::INFINITY;
    for (i, a) in colors.iter().enumerate() {
        for b in &colors[i + 1..] {
            best = best.min(a.distance(*b));
        }
    }
    best
}
