#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace hwdse {

/// One point of a discrete design space, holding raw (un-normalized) level values
/// in parameter order.
using ParameterVector = std::vector<double>;

enum class Direction { Maximize, Minimize };

std::string to_string(Direction direction);
Direction parse_direction(const std::string& text);

/// +1 for Maximize, -1 for Minimize: multiplying by it turns any objective into
/// a maximization.
inline double direction_sign(Direction d) { return d == Direction::Maximize ? 1.0 : -1.0; }

/// True when `candidate` is strictly better than `incumbent` under `d`.
inline bool improves(Direction d, double candidate, double incumbent) {
    return d == Direction::Maximize ? candidate > incumbent : candidate < incumbent;
}

struct Parameter {
    std::string name;
    std::vector<double> levels;  // strictly ascending, non-empty
};

struct ObjectiveDecl {
    std::string name;
    Direction direction = Direction::Maximize;
};

/// Per-dimension box used to min-max normalize inputs to the unit hypercube.
struct InputBounds {
    std::vector<double> lower;
    std::vector<double> upper;

    std::size_t dimension() const { return lower.size(); }
    std::vector<double> normalize(const ParameterVector& x) const;

    /// Bounding box of a point set.
    static InputBounds from_points(const std::vector<ParameterVector>& points);
};

/// Named parameters with finite ordered domains, plus the objectives the
/// manifest declares for it. Points are addressed by a mixed-radix index whose
/// last parameter varies fastest.
class DesignSpace {
  public:
    DesignSpace() = default;
    DesignSpace(std::vector<Parameter> parameters, std::vector<ObjectiveDecl> objectives = {});

    const std::vector<Parameter>& parameters() const { return parameters_; }
    const std::vector<ObjectiveDecl>& objectives() const { return objectives_; }
    std::size_t dimension() const { return parameters_.size(); }

    /// Product of domain sizes, saturating at UINT64_MAX.
    std::uint64_t cardinality() const { return cardinality_; }

    ParameterVector point_at(std::uint64_t index) const;
    /// Index of an in-domain point; nullopt when any coordinate is off-grid.
    std::optional<std::uint64_t> index_of(const ParameterVector& x) const;
    bool contains(const ParameterVector& x) const { return index_of(x).has_value(); }

    InputBounds bounds() const;
    std::vector<double> normalize(const ParameterVector& x) const { return bounds().normalize(x); }

    std::vector<std::string> parameter_names() const;
    const ObjectiveDecl* find_objective(const std::string& name) const;

    /// Every point in index order. Throws for spaces larger than `limit`.
    std::vector<ParameterVector> enumerate(std::uint64_t limit = 1'000'000) const;

  private:
    std::vector<Parameter> parameters_;
    std::vector<ObjectiveDecl> objectives_;
    std::uint64_t cardinality_ = 0;
};

/// Reads a design-space manifest (see docs in README):
///
///     version 1
///     parameter "FO4 depth" 12 15 18 21 24
///     objective bips maximize
///
/// Errors carry the file path and line number.
DesignSpace load_design_space(const std::filesystem::path& manifest);
DesignSpace parse_design_space(const std::string& content, const std::string& origin = "<manifest>");

void save_design_space(const DesignSpace& space, const std::filesystem::path& manifest);

}  // namespace hwdse
