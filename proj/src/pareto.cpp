#include "hwdse/pareto.hpp"

#include <algorithm>
#include <cmath>

#include "hwdse/error.hpp"

namespace hwdse {

std::string to_string(Provenance provenance) {
    return provenance == Provenance::Evaluated ? "evaluated" : "surrogate";
}

bool dominates(const ObjectivePoint& a, const ObjectivePoint& b, const std::vector<Direction>& directions) {
    if (a.values.size() != b.values.size() || a.values.size() != directions.size())
        raise(ErrorCategory::Argument, "dominates: objective vectors and directions differ in length");
    bool strict = false;
    for (std::size_t i = 0; i < directions.size(); ++i) {
        const double sa = direction_sign(directions[i]) * a.values[i];
        const double sb = direction_sign(directions[i]) * b.values[i];
        if (sa < sb) return false;
        if (sa > sb) strict = true;
    }
    return strict;
}

std::vector<ObjectivePoint> pareto_frontier(const std::vector<ObjectivePoint>& points,
                                            const std::vector<Direction>& directions) {
    std::vector<ObjectivePoint> front;
    if (points.empty()) return front;
    for (const auto& p : points) {
        if (p.provenance != points.front().provenance)
            raise(ErrorCategory::Configuration, "pareto_frontier: points mix evaluated and surrogate-predicted values");
        if (p.values.size() != directions.size())
            raise(ErrorCategory::Argument, "pareto_frontier: objective count differs from directions");
        for (double v : p.values)
            if (!std::isfinite(v)) raise(ErrorCategory::Data, "pareto_frontier: non-finite objective value");
    }
    for (std::size_t i = 0; i < points.size(); ++i) {
        bool keep = true;
        for (std::size_t j = 0; j < points.size() && keep; ++j) {
            if (i == j) continue;
            if (dominates(points[j], points[i], directions)) keep = false;
            // Objective-space duplicates: keep the first occurrence only.
            else if (j < i && points[j].values == points[i].values) keep = false;
        }
        if (keep) front.push_back(points[i]);
    }
    std::stable_sort(front.begin(), front.end(),
                     [](const ObjectivePoint& a, const ObjectivePoint& b) { return a.values < b.values; });
    return front;
}

}  // namespace hwdse
