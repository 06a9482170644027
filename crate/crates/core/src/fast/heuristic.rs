use super::informative::InformativeGraph;
use crate::geometry::Point;

/// Scripted stand-in for the learned policy: the guidepost neighbor nearest
/// the guided waypoint, otherwise the highest-utility neighbor. Ties go to
/// the smaller node id. Returns an index into the informative graph.
pub fn guidepost_heuristic(
    graph: &InformativeGraph,
    next_waypoint: Option<Point>,
) -> Option<usize> {
    let candidates = graph.current_neighbors();
    if let Some(target) = next_waypoint {
        let guided = candidates
            .iter()
            .copied()
            .filter(|&i| graph.guidepost(i))
            .min_by(|&a, &b| {
                graph.positions[a]
                    .distance_sq(&target)
                    .total_cmp(&graph.positions[b].distance_sq(&target))
                    .then(graph.ids[a].cmp(&graph.ids[b]))
            });
        if guided.is_some() {
            return guided;
        }
    }
    candidates.iter().copied().max_by(|&a, &b| {
        graph.features[a][2]
            .total_cmp(&graph.features[b][2])
            .then(graph.ids[b].cmp(&graph.ids[a]))
    })
}
