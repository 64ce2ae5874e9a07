#include "hwdse/design_space.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>

#include "hwdse/error.hpp"
#include "hwdse/text.hpp"

namespace hwdse {

std::string to_string(Direction direction) {
    return direction == Direction::Maximize ? "maximize" : "minimize";
}

Direction parse_direction(const std::string& text) {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "maximize" || lower == "max") return Direction::Maximize;
    if (lower == "minimize" || lower == "min") return Direction::Minimize;
    raise(ErrorCategory::Configuration, "unknown direction '" + text + "' (expected maximize or minimize)");
}

std::vector<double> InputBounds::normalize(const ParameterVector& x) const {
    if (x.size() != lower.size())
        raise(ErrorCategory::Argument, "dimension mismatch: point has " + std::to_string(x.size()) +
                                           " coordinates, bounds have " + std::to_string(lower.size()));
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double span = upper[i] - lower[i];
        out[i] = span > 0.0 ? (x[i] - lower[i]) / span : 0.0;
    }
    return out;
}

InputBounds InputBounds::from_points(const std::vector<ParameterVector>& points) {
    InputBounds b;
    if (points.empty()) return b;
    b.lower = points.front();
    b.upper = points.front();
    for (const auto& p : points) {
        if (p.size() != b.lower.size()) raise(ErrorCategory::Argument, "points of differing dimension");
        for (std::size_t i = 0; i < p.size(); ++i) {
            b.lower[i] = std::min(b.lower[i], p[i]);
            b.upper[i] = std::max(b.upper[i], p[i]);
        }
    }
    return b;
}

DesignSpace::DesignSpace(std::vector<Parameter> parameters, std::vector<ObjectiveDecl> objectives)
    : parameters_(std::move(parameters)), objectives_(std::move(objectives)) {
    std::set<std::string> names;
    cardinality_ = parameters_.empty() ? 0 : 1;
    for (const auto& p : parameters_) {
        if (p.name.empty()) raise(ErrorCategory::Manifest, "parameter with empty name");
        if (!names.insert(p.name).second) raise(ErrorCategory::Manifest, "duplicate parameter name '" + p.name + "'");
        if (p.levels.empty()) raise(ErrorCategory::Manifest, "parameter '" + p.name + "' has an empty domain");
        for (std::size_t i = 1; i < p.levels.size(); ++i)
            if (!(p.levels[i - 1] < p.levels[i]))
                raise(ErrorCategory::Manifest, "levels of parameter '" + p.name + "' are not strictly ascending");
        for (double v : p.levels)
            if (!std::isfinite(v)) raise(ErrorCategory::Manifest, "parameter '" + p.name + "' has a non-finite level");
        const std::uint64_t n = p.levels.size();
        if (cardinality_ > std::numeric_limits<std::uint64_t>::max() / n)
            cardinality_ = std::numeric_limits<std::uint64_t>::max();
        else
            cardinality_ *= n;
    }
    for (const auto& o : objectives_) {
        if (o.name.empty()) raise(ErrorCategory::Manifest, "objective with empty name");
        if (!names.insert(o.name).second) raise(ErrorCategory::Manifest, "duplicate name '" + o.name + "'");
    }
}

ParameterVector DesignSpace::point_at(std::uint64_t index) const {
    if (index >= cardinality_) raise(ErrorCategory::Argument, "design-space index out of range");
    ParameterVector x(parameters_.size());
    for (std::size_t i = parameters_.size(); i-- > 0;) {
        const auto& levels = parameters_[i].levels;
        x[i] = levels[index % levels.size()];
        index /= levels.size();
    }
    return x;
}

std::optional<std::uint64_t> DesignSpace::index_of(const ParameterVector& x) const {
    if (x.size() != parameters_.size()) return std::nullopt;
    std::uint64_t index = 0;
    for (std::size_t i = 0; i < parameters_.size(); ++i) {
        const auto& levels = parameters_[i].levels;
        const auto it = std::lower_bound(levels.begin(), levels.end(), x[i]);
        if (it == levels.end() || *it != x[i]) return std::nullopt;
        index = index * levels.size() + static_cast<std::uint64_t>(it - levels.begin());
    }
    return index;
}

InputBounds DesignSpace::bounds() const {
    InputBounds b;
    for (const auto& p : parameters_) {
        b.lower.push_back(p.levels.front());
        b.upper.push_back(p.levels.back());
    }
    return b;
}

std::vector<std::string> DesignSpace::parameter_names() const {
    std::vector<std::string> names;
    for (const auto& p : parameters_) names.push_back(p.name);
    return names;
}

const ObjectiveDecl* DesignSpace::find_objective(const std::string& name) const {
    for (const auto& o : objectives_)
        if (o.name == name) return &o;
    return nullptr;
}

std::vector<ParameterVector> DesignSpace::enumerate(std::uint64_t limit) const {
    if (cardinality_ > limit)
        raise(ErrorCategory::Configuration,
              "design space has " + std::to_string(cardinality_) + " points; too many to enumerate");
    std::vector<ParameterVector> out;
    out.reserve(cardinality_);
    for (std::uint64_t i = 0; i < cardinality_; ++i) out.push_back(point_at(i));
    return out;
}

namespace {

bool valid_name(const std::string& name) {
    return !name.empty() && name.find_first_of(",\"\n\r") == std::string::npos;
}

}  // namespace

DesignSpace parse_design_space(const std::string& content, const std::string& origin) {
    std::istringstream in(content);
    std::string line;
    int line_no = 0;
    bool seen_version = false;
    std::vector<Parameter> params;
    std::vector<ObjectiveDecl> objectives;

    auto fail = [&](const std::string& what) {
        raise(ErrorCategory::Manifest, origin + ":" + std::to_string(line_no) + ": " + what);
    };

    while (std::getline(in, line)) {
        ++line_no;
        const auto body = text::trim(line);
        if (body.empty() || body.front() == '#') continue;
        std::istringstream tokens{std::string(body)};
        std::string keyword;
        tokens >> keyword;
        if (keyword == "version") {
            int version = 0;
            if (!(tokens >> version) || version != 1) fail("unsupported manifest version");
            if (seen_version) fail("repeated version line");
            seen_version = true;
            continue;
        }
        if (!seen_version) fail("manifest must start with 'version 1'");
        if (keyword == "parameter") {
            Parameter p;
            if (!(tokens >> std::quoted(p.name)) || !valid_name(p.name)) fail("parameter needs a name without commas or quotes");
            std::string tok;
            while (tokens >> tok) {
                const auto v = text::parse_double(tok);
                if (!v) fail("parameter '" + p.name + "': level '" + tok + "' is not a number");
                p.levels.push_back(*v);
            }
            if (p.levels.empty()) fail("parameter '" + p.name + "' has an empty domain");
            for (std::size_t i = 1; i < p.levels.size(); ++i)
                if (!(p.levels[i - 1] < p.levels[i])) fail("parameter '" + p.name + "': levels must be strictly ascending");
            for (const auto& q : params)
                if (q.name == p.name) fail("duplicate parameter name '" + p.name + "'");
            params.push_back(std::move(p));
        } else if (keyword == "objective") {
            ObjectiveDecl o;
            std::string dir, extra;
            if (!(tokens >> std::quoted(o.name)) || !valid_name(o.name)) fail("objective needs a name without commas or quotes");
            if (!(tokens >> dir)) fail("objective '" + o.name + "' needs a direction");
            if (tokens >> extra) fail("unexpected field '" + extra + "' after objective direction");
            try {
                o.direction = parse_direction(dir);
            } catch (const Error& e) {
                fail(e.what());
            }
            for (const auto& q : objectives)
                if (q.name == o.name) fail("duplicate objective name '" + o.name + "'");
            for (const auto& q : params)
                if (q.name == o.name) fail("objective '" + o.name + "' clashes with a parameter name");
            objectives.push_back(std::move(o));
        } else {
            fail("unknown field '" + keyword + "'");
        }
    }
    if (!seen_version) raise(ErrorCategory::Manifest, origin + ": missing 'version 1' line");
    if (params.empty()) raise(ErrorCategory::Manifest, origin + ": manifest declares no parameters");
    try {
        return DesignSpace(std::move(params), std::move(objectives));
    } catch (const Error& e) {
        raise(ErrorCategory::Manifest, origin + ": " + e.what());
    }
}

DesignSpace load_design_space(const std::filesystem::path& manifest) {
    std::ifstream in(manifest);
    if (!in) raise(ErrorCategory::Configuration, "cannot open manifest '" + manifest.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_design_space(buf.str(), manifest.string());
}

void save_design_space(const DesignSpace& space, const std::filesystem::path& manifest) {
    std::ofstream out(manifest);
    if (!out) raise(ErrorCategory::Configuration, "cannot write manifest '" + manifest.string() + "'");
    out << "version 1\n";
    for (const auto& p : space.parameters()) {
        out << "parameter " << std::quoted(p.name);
        for (double v : p.levels) out << ' ' << text::format_double(v);
        out << '\n';
    }
    for (const auto& o : space.objectives()) out << "objective " << std::quoted(o.name) << ' ' << to_string(o.direction) << '\n';
}

}  // namespace hwdse
