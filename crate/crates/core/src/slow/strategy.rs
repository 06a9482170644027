use super::schema::*;

/// Deterministic rule table from characterization to strategy.
///
/// Starts from the mid-level strategy and applies:
/// - low connectivity: backtrack tolerance one level up, escape routes always maintained;
/// - dense or irregular obstacles: conservative energy and clearance, cautious
///   approach to unknown space, boundary-first coverage along the perimeter;
/// - confined space: boundary-first coverage;
/// - open and simple space: nearest-frontier coverage;
/// - high navigation difficulty: reliability over speed;
/// - high dead-end probability: dead ends explored carefully, revisits allowed when needed.
pub fn derive_strategy(c: &EnvCharacterization, description: &str) -> ExplorationStrategy {
    let mut s = ExplorationStrategy {
        description: description.to_string(),
        ..Default::default()
    };

    if c.spatial.connectivity == Connectivity::Low {
        s.efficiency.backtrack_tolerance = s.efficiency.backtrack_tolerance.raised();
        s.safety.escape_route_awareness = EscapeRouteAwareness::AlwaysMaintain;
    } else if c.spatial.connectivity == Connectivity::High {
        s.efficiency.backtrack_tolerance = BacktrackTolerance::Low;
    }

    let rough = c.obstacle.density == Density::Dense
        || c.obstacle.predictability == Predictability::Irregular;
    if rough {
        s.efficiency.energy_policy = EnergyPolicy::Conservative;
        s.safety.obstacle_clearance = ObstacleClearance::Conservative;
        s.safety.unknown_area_approach = UnknownAreaApproach::Cautious;
        s.efficiency.revisit_policy = RevisitPolicy::Avoid;
    }
    if rough || c.spatial.openness == Openness::Confined {
        s.spatial.coverage_strategy = CoverageStrategy::BoundaryFirst;
        s.spatial.direction_bias = DirectionBias::PerimeterFollowing;
    } else if c.spatial.openness == Openness::Open && c.spatial.complexity == Complexity::Simple {
        s.spatial.coverage_strategy = CoverageStrategy::FrontierNearest;
        s.spatial.direction_bias = DirectionBias::Neutral;
    }
    if c.spatial.corridor_width == CorridorWidth::Narrow {
        s.spatial.corridor_handling = CorridorHandling::Centerline;
    }

    if c.challenges.navigation_difficulty == Level::High {
        s.task.quality_vs_speed = QualityVsSpeed::Reliability;
    } else if c.challenges.navigation_difficulty == Level::Low {
        s.task.quality_vs_speed = QualityVsSpeed::Speed;
    }
    if c.challenges.dead_end_probability == Level::High {
        s.safety.dead_end_handling = DeadEndHandling::ExploreCarefully;
        s.efficiency.revisit_policy = RevisitPolicy::AllowWhenNeeded;
    } else if c.challenges.dead_end_probability == Level::Low {
        s.safety.dead_end_handling = DeadEndHandling::ExploreFully;
    }
    if c.challenges.backtracking_necessity == Level::High {
        s.spatial.depth_strategy = DepthStrategy::DepthFirst;
    } else if c.challenges.backtracking_necessity == Level::Low {
        s.spatial.depth_strategy = DepthStrategy::BreadthFirst;
    }
    s
}
