#pragma once

#include "ergodic/map1d.hpp"
#include "ergodic/tower.hpp"

namespace ergodic {

// Build the first-return tower of a piecewise monotone map over a base
// subinterval, by breadth-first refinement of monotonicity pieces.  A
// branch is accepted when its image covers the base to endpoint
// tolerance; everything else ends up in unassigned_mass.  Non-Markov
// bases degrade gracefully: the tower is returned with the unassigned
// mass reported, never silently renormalized.
GibbsMarkovTower first_return_tower(const Map1D& map, const Interval& base, int R_max,
                                    double min_branch_len);

} // namespace ergodic
