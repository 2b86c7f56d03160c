#pragma once

#include <string>

#include "ergodic/tower.hpp"

namespace ergodic {

// Plain-text tower definition: a [tower] section (base interval, name,
// truncation depth, unassigned mass), an optional [budget] section, and
// one [branch] section per branch:
//
//   [tower]
//   name = doubling
//   base = 0 1
//   R_max = 64
//   unassigned_mass = 0
//
//   [budget]
//   C = 0
//   beta = 0.5
//   C0 = 0
//   C1 = 1
//   C2 = 0.6931471805599453
//   fitted = 0
//
//   [branch]
//   domain = 0 0.5
//   return_time = 1
//   map = affine 2 0            # or: model <doubling|tent|logistic|quadratic> [param] <tau>
//   jacobian = derived          # or: const <value>
//
// When [budget] is absent the constants are fitted from branch samples.
GibbsMarkovTower parse_tower(const std::string& text, const std::string& origin = "<string>");
GibbsMarkovTower load_tower(const std::string& path);

std::string serialize_tower(const GibbsMarkovTower& tower);
void save_tower(const GibbsMarkovTower& tower, const std::string& path);

} // namespace ergodic
