//! Keyword-table characterization of a free-text environment description.

use super::schema::*;

fn has(text: &str, words: &[&str]) -> bool {
    words.iter().any(|w| text.contains(w))
}

/// Maps description keywords onto the characterization schema. Fields with
/// no matching keyword keep their moderate default; exploration challenges
/// are derived from the spatial and obstacle fields.
pub fn characterize_rule_based(description: &str) -> EnvCharacterization {
    let text = description.to_ascii_lowercase();
    let mut c = EnvCharacterization::default();

    if has(
        &text,
        &[
            "outdoor",
            "open field",
            "open space",
            "open area",
            "spacious",
        ],
    ) {
        c.spatial.openness = Openness::Open;
    }
    if has(&text, &["narrow", "confined", "cramped", "tight"]) {
        c.spatial.openness = Openness::Confined;
        c.spatial.corridor_width = CorridorWidth::Narrow;
    }
    if has(&text, &["aisle"]) {
        c.spatial.corridor_width = CorridorWidth::Narrow;
        c.spatial.connectivity = Connectivity::Low;
    }
    if has(&text, &["wide", "broad"]) && c.spatial.corridor_width != CorridorWidth::Narrow {
        c.spatial.corridor_width = CorridorWidth::Wide;
    }
    if has(&text, &["room", "office", "cubicle", "maze", "labyrinth"]) {
        c.spatial.complexity = Complexity::Complex;
    }
    if has(&text, &["empty", "simple"]) {
        c.spatial.complexity = Complexity::Simple;
    }
    if has(&text, &["maze", "labyrinth", "isolated", "single entrance"]) {
        c.spatial.connectivity = Connectivity::Low;
    }
    if has(
        &text,
        &["interconnected", "loops", "well connected", "intersections"],
    ) {
        c.spatial.connectivity = Connectivity::High;
    }

    if has(&text, &["dense", "cluttered", "packed"]) {
        c.obstacle.density = Density::Dense;
    }
    if has(&text, &["sparse", "few obstacles", "scattered"]) {
        c.obstacle.density = Density::Sparse;
    }
    if has(
        &text,
        &[
            "box", "stack", "shelf", "shelves", "rack", "arranged", "grid",
        ],
    ) {
        c.obstacle.predictability = Predictability::Regular;
    }
    if has(
        &text,
        &["natural", "forest", "tree", "irregular", "rubble", "cave"],
    ) {
        c.obstacle.predictability = Predictability::Irregular;
    }
    if has(&text, &["indoor", "flat"]) {
        c.obstacle.height_variation = HeightVariation::Flat;
    }
    if has(&text, &["terrain", "uneven", "hill", "slope", "stairs"]) {
        c.obstacle.height_variation = HeightVariation::Varied;
    }

    let hard = [
        c.spatial.openness == Openness::Confined,
        c.spatial.complexity == Complexity::Complex,
        c.obstacle.density == Density::Dense,
        c.obstacle.predictability == Predictability::Irregular,
        c.obstacle.height_variation == HeightVariation::Varied,
    ]
    .iter()
    .filter(|h| **h)
    .count();
    c.challenges.navigation_difficulty = if hard >= 3 {
        Level::High
    } else if hard == 0 && c.spatial.openness == Openness::Open {
        Level::Low
    } else {
        Level::Moderate
    };
    c.challenges.dead_end_probability = if has(&text, &["dead end", "dead-end", "maze"]) {
        Level::High
    } else if c.spatial.openness == Openness::Open && c.spatial.complexity != Complexity::Complex {
        Level::Low
    } else {
        Level::Moderate
    };
    c.challenges.backtracking_necessity = if c.spatial.connectivity == Connectivity::Low
        || c.challenges.dead_end_probability == Level::High
    {
        Level::High
    } else if c.spatial.connectivity == Connectivity::High {
        Level::Low
    } else {
        Level::Moderate
    };
    c
}
