//! Closed vocabularies for environment characterization and strategy.
//!
//! Every enum lists its values from the low end to the high end of its
//! axis; the middle value is the default.

use serde::{Deserialize, Serialize};

macro_rules! vocab {
    ($(#[$meta:meta])* $name:ident { $($variant:ident => $text:literal),+ $(,)? } default $default:ident) => {
        $(#[$meta])*
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        pub enum $name {
            $(#[serde(rename = $text)] $variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(&self) -> &'static str {
                match self {
                    $($name::$variant => $text),+
                }
            }

            pub fn parse(s: &str) -> Option<Self> {
                let norm = s.trim().to_ascii_lowercase().replace([' ', '-'], "_");
                match norm.as_str() {
                    $($text => Some($name::$variant),)+
                    _ => None,
                }
            }

            /// Position on the axis, 0 for the lowest value.
            pub fn level(&self) -> usize {
                Self::ALL.iter().position(|v| v == self).unwrap()
            }

            pub fn from_level(level: usize) -> Self {
                Self::ALL[level.min(Self::ALL.len() - 1)]
            }

            /// One step up the axis, saturating.
            pub fn raised(&self) -> Self {
                Self::from_level(self.level() + 1)
            }
        }

        impl Default for $name {
            fn default() -> Self {
                $name::$default
            }
        }

        impl std::fmt::Display for $name {
            fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
                f.write_str(self.as_str())
            }
        }
    };
}

vocab!(Openness { Open => "open", Moderate => "moderate", Confined => "confined" } default Moderate);
vocab!(Complexity { Simple => "simple", Moderate => "moderate", Complex => "complex" } default Moderate);
vocab!(Connectivity { Low => "low", Moderate => "moderate", High => "high" } default Moderate);
vocab!(CorridorWidth { Narrow => "narrow", Moderate => "moderate", Wide => "wide" } default Moderate);
vocab!(Density { Sparse => "sparse", Moderate => "moderate", Dense => "dense" } default Moderate);
vocab!(Predictability { Regular => "regular", Moderate => "moderate", Irregular => "irregular" } default Moderate);
vocab!(HeightVariation { Flat => "flat", Moderate => "moderate", Varied => "varied" } default Moderate);
vocab!(
    /// Shared low/moderate/high scale for exploration challenges.
    Level { Low => "low", Moderate => "moderate", High => "high" } default Moderate
);

vocab!(CoverageStrategy { FrontierNearest => "frontier_nearest", Balanced => "balanced", BoundaryFirst => "boundary_first" } default Balanced);
vocab!(DirectionBias { Neutral => "none", CorridorFollowing => "corridor_following", PerimeterFollowing => "perimeter_following" } default CorridorFollowing);
vocab!(DepthStrategy { BreadthFirst => "breadth_first", BalancedDepthBreadth => "balanced_depth_breadth", DepthFirst => "depth_first" } default BalancedDepthBreadth);
vocab!(CorridorHandling { Centerline => "centerline", NaturalPath => "natural_path", WallFollowing => "wall_following" } default NaturalPath);
vocab!(EnergyPolicy { Aggressive => "aggressive", Balanced => "balanced", Conservative => "conservative" } default Balanced);
vocab!(TimeConstraint { Relaxed => "relaxed", Moderate => "moderate", Strict => "strict" } default Moderate);
vocab!(BacktrackTolerance { Low => "low", Moderate => "moderate", High => "high" } default Moderate);
vocab!(RevisitPolicy { Allow => "allow", AllowWhenNeeded => "allow_when_needed", Avoid => "avoid" } default AllowWhenNeeded);
vocab!(ObstacleClearance { Tight => "tight", Standard => "standard", Conservative => "conservative" } default Standard);
vocab!(UnknownAreaApproach { Aggressive => "aggressive", Standard => "standard", Cautious => "cautious" } default Standard);
vocab!(DeadEndHandling { Avoid => "avoid", ExploreCarefully => "explore_carefully", ExploreFully => "explore_fully" } default ExploreCarefully);
vocab!(EscapeRouteAwareness { Opportunistic => "opportunistic", Periodic => "periodic", AlwaysMaintain => "always_maintain" } default Periodic);
vocab!(CompletionCriteria { CoverageThreshold => "coverage_threshold", TimeLimited => "time_limited", FullCoverage => "full_coverage" } default TimeLimited);
vocab!(InformationPriority { Geometry => "geometry", Balanced => "balanced", ObjectDetection => "object_detection" } default Balanced);
vocab!(QualityVsSpeed { Speed => "speed", Balanced => "balanced", Reliability => "reliability" } default Balanced);

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpatialCharacteristics {
    pub openness: Openness,
    pub complexity: Complexity,
    pub connectivity: Connectivity,
    pub corridor_width: CorridorWidth,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObstacleCharacteristics {
    pub density: Density,
    pub predictability: Predictability,
    pub height_variation: HeightVariation,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplorationChallenges {
    pub navigation_difficulty: Level,
    pub dead_end_probability: Level,
    pub backtracking_necessity: Level,
}

/// Structured description of the environment. All fields are mandatory on
/// the wire; the `Default` value is the all-moderate characterization.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvCharacterization {
    pub spatial: SpatialCharacteristics,
    pub obstacle: ObstacleCharacteristics,
    pub challenges: ExplorationChallenges,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpatialStrategy {
    pub coverage_strategy: CoverageStrategy,
    pub direction_bias: DirectionBias,
    pub depth_strategy: DepthStrategy,
    pub corridor_handling: CorridorHandling,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EfficiencyStrategy {
    pub energy_policy: EnergyPolicy,
    pub time_constraint: TimeConstraint,
    pub backtrack_tolerance: BacktrackTolerance,
    pub revisit_policy: RevisitPolicy,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SafetyStrategy {
    pub obstacle_clearance: ObstacleClearance,
    pub unknown_area_approach: UnknownAreaApproach,
    pub dead_end_handling: DeadEndHandling,
    pub escape_route_awareness: EscapeRouteAwareness,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskStrategy {
    pub completion_criteria: CompletionCriteria,
    pub information_priority: InformationPriority,
    pub quality_vs_speed: QualityVsSpeed,
}

/// Exploration strategy along four axes, conditioned on the characterization.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplorationStrategy {
    pub description: String,
    pub spatial: SpatialStrategy,
    pub efficiency: EfficiencyStrategy,
    pub safety: SafetyStrategy,
    pub task: TaskStrategy,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_normalizes_spelling() {
        assert_eq!(
            CoverageStrategy::parse(" Boundary-First "),
            Some(CoverageStrategy::BoundaryFirst)
        );
        assert_eq!(DirectionBias::parse("none"), Some(DirectionBias::Neutral));
        assert_eq!(Openness::parse("wide open"), None);
    }

    #[test]
    fn levels_saturate() {
        assert_eq!(Level::High.raised(), Level::High);
        assert_eq!(Level::Low.raised(), Level::Moderate);
        assert_eq!(Density::from_level(99), Density::Dense);
        assert_eq!(Complexity::default().level(), 1);
    }
}
