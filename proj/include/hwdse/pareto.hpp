#pragma once

#include <string>
#include <vector>

#include "hwdse/design_space.hpp"

namespace hwdse {

enum class Provenance { Evaluated, SurrogatePredicted };

std::string to_string(Provenance provenance);

struct ObjectivePoint {
    ParameterVector params;
    std::vector<double> values;
    Provenance provenance = Provenance::Evaluated;
};

/// a is at least as good as b everywhere (under each direction) and strictly
/// better somewhere.
bool dominates(const ObjectivePoint& a, const ObjectivePoint& b, const std::vector<Direction>& directions);

/// Non-dominated subset, one representative per distinct objective vector
/// (the first in input order), sorted by the first objective ascending (then
/// the remaining objectives). Mixed provenance is refused.
std::vector<ObjectivePoint> pareto_frontier(const std::vector<ObjectivePoint>& points,
                                            const std::vector<Direction>& directions);

}  // namespace hwdse
