// Maintains SC communities under change events and prints them after each one.

#include <iostream>

#include "saasim/saasim.hpp"

using namespace saasim;

int main() {
  // Users 1..6 in two triangles; 4 and 5 sit in the area of AP 100.
  snapshot_graph g;
  g.aps = ap_designation::from_ring({100});
  g.nodes = {1, 2, 3, 4, 5, 6, 100};
  g.social_edges = {{1, 2}, {1, 3}, {2, 3}, {4, 5}, {4, 6}, {5, 6}};
  g.ap_membership = {{4, 100}, {5, 100}};
  g.rebuild_structural_edges();

  const density_detector det;
  community_tracker tracker(g, 0.6, det);
  write_registry(std::cout, tracker.registry());

  for (const auto& ev : {change_event::add_edge(3, 100), change_event::add_node(7, {1, 2, 3}),
                         change_event::remove_edge(4, 5)}) {
    tracker.apply(ev);
    write_registry(std::cout, tracker.registry());
  }
}
