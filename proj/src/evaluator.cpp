#include "hwdse/evaluator.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <set>

#include "hwdse/error.hpp"
#include "hwdse/rng.hpp"
#include "hwdse/text.hpp"

namespace hwdse {

std::vector<double> Dataset::objective_column(const std::string& name) const {
    for (std::size_t j = 0; j < objective_names.size(); ++j) {
        if (objective_names[j] != name) continue;
        std::vector<double> col;
        col.reserve(values.size());
        for (const auto& row : values) col.push_back(row[j]);
        return col;
    }
    raise(ErrorCategory::Configuration, "dataset has no objective column '" + name + "'");
}

Dataset read_dataset_csv(const std::filesystem::path& csv, const DesignSpace& space, bool check_domains) {
    std::ifstream in(csv);
    if (!in) raise(ErrorCategory::Configuration, "cannot open dataset '" + csv.string() + "'");
    const std::string origin = csv.string();
    auto fail = [&](int line, const std::string& what) {
        raise(ErrorCategory::Ingestion, origin + ":" + std::to_string(line) + ": " + what);
    };

    std::string line;
    int line_no = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        if (!text::trim(line).empty()) {
            header = text::split_csv(line);
            break;
        }
    }
    if (header.empty()) fail(line_no, "missing header row");

    const auto names = space.parameter_names();
    const std::size_t p = names.size();
    if (header.size() <= p) fail(line_no, "header needs the parameter columns followed by at least one objective");
    for (std::size_t i = 0; i < p; ++i)
        if (header[i] != names[i])
            fail(line_no, "header column " + std::to_string(i + 1) + " is '" + header[i] + "', manifest expects '" +
                              names[i] + "'");
    Dataset data;
    data.parameter_names = names;
    data.objective_names.assign(header.begin() + static_cast<std::ptrdiff_t>(p), header.end());
    if (!space.objectives().empty()) {
        for (const auto& name : data.objective_names)
            if (!space.find_objective(name))
                fail(line_no, "objective column '" + name + "' is not declared in the manifest");
    }
    std::set<std::string> unique(header.begin(), header.end());
    if (unique.size() != header.size()) fail(line_no, "duplicate column names in header");

    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        const auto fields = text::split_csv(line);
        if (fields.size() != header.size())
            fail(line_no, "row has " + std::to_string(fields.size()) + " fields, header has " +
                              std::to_string(header.size()));
        ParameterVector x(p);
        std::vector<double> y(fields.size() - p);
        for (std::size_t i = 0; i < fields.size(); ++i) {
            const auto v = text::parse_double(fields[i]);
            if (!v || !std::isfinite(*v)) fail(line_no, "column '" + header[i] + "': '" + fields[i] + "' is not a finite number");
            (i < p ? x[i] : y[i - p]) = *v;
        }
        if (check_domains && !space.contains(x)) fail(line_no, "parameter values outside the declared domains");
        data.points.push_back(std::move(x));
        data.values.push_back(std::move(y));
    }
    return data;
}

void write_dataset_csv(const std::filesystem::path& csv, const Dataset& data) {
    std::ofstream out(csv);
    if (!out) raise(ErrorCategory::Configuration, "cannot write dataset '" + csv.string() + "'");
    std::vector<std::string> header = data.parameter_names;
    header.insert(header.end(), data.objective_names.begin(), data.objective_names.end());
    out << text::join(header, ",") << '\n';
    for (std::size_t r = 0; r < data.points.size(); ++r) {
        std::vector<std::string> fields;
        for (double v : data.points[r]) fields.push_back(text::format_double(v));
        for (double v : data.values[r]) fields.push_back(text::format_double(v));
        out << text::join(fields, ",") << '\n';
    }
    if (!out) raise(ErrorCategory::Configuration, "failed writing dataset '" + csv.string() + "'");
}

Evaluator::Evaluator(DesignSpace space, std::vector<ObjectiveDecl> objectives)
    : space_(std::move(space)), objectives_(std::move(objectives)) {}

std::vector<std::string> Evaluator::objective_names() const {
    std::vector<std::string> out;
    for (const auto& o : objectives_) out.push_back(o.name);
    return out;
}

std::size_t Evaluator::objective_index(const std::string& name) const {
    for (std::size_t i = 0; i < objectives_.size(); ++i)
        if (objectives_[i].name == name) return i;
    raise(ErrorCategory::Configuration, "evaluator has no objective '" + name + "'");
}

std::vector<double> Evaluator::query(const ParameterVector& x) {
    if (!space_.contains(x)) raise(ErrorCategory::Argument, "query point is outside the design space");
    if (cache_enabled_) {
        std::lock_guard lock(mutex_);
        if (auto it = cache_.find(x); it != cache_.end()) {
            ++cache_hits_;
            return it->second;
        }
    }
    ++evaluations_;
    auto values = compute(x);
    if (cache_enabled_) {
        std::lock_guard lock(mutex_);
        cache_.try_emplace(x, values);
    }
    return values;
}

TableEvaluator::TableEvaluator(DesignSpace space, const Dataset& table)
    : Evaluator(space,
                [&] {
                    std::vector<ObjectiveDecl> objs;
                    for (const auto& name : table.objective_names) {
                        const auto* decl = space.find_objective(name);
                        objs.push_back(decl ? *decl : ObjectiveDecl{name, Direction::Maximize});
                    }
                    return objs;
                }()),
      table_(table) {
    for (std::size_t r = 0; r < table.points.size(); ++r) {
        const auto& x = table.points[r];
        if (!this->space().contains(x))
            raise(ErrorCategory::Ingestion, "table row " + std::to_string(r + 1) + " is outside the declared domains");
        auto [it, inserted] = rows_.try_emplace(x, table.values[r]);
        if (inserted) {
            points_.push_back(x);
        } else if (it->second != table.values[r]) {
            raise(ErrorCategory::Ingestion,
                  "table row " + std::to_string(r + 1) + " repeats a design point with different objective values");
        }
    }
    table_.points = points_;
    table_.values.clear();
    for (const auto& x : points_) table_.values.push_back(rows_.at(x));
}

std::vector<double> TableEvaluator::compute(const ParameterVector& x) const {
    const auto it = rows_.find(x);
    if (it == rows_.end()) raise(ErrorCategory::NotCovered, "design point not present in the result table");
    return it->second;
}

std::unique_ptr<TableEvaluator> make_table_evaluator(const DesignSpace& space, const Dataset& table) {
    return std::make_unique<TableEvaluator>(space, table);
}

std::unique_ptr<TableEvaluator> load_table_evaluator(const std::filesystem::path& csv,
                                                     const std::filesystem::path& manifest) {
    const auto space = load_design_space(manifest);
    const auto data = read_dataset_csv(csv, space, true);
    return make_table_evaluator(space, data);
}

SyntheticKind parse_synthetic_kind(const std::string& name) {
    if (name == "quadratic_bowl") return SyntheticKind::QuadraticBowl;
    if (name == "multimodal") return SyntheticKind::Multimodal;
    if (name == "correlated_pair") return SyntheticKind::CorrelatedPair;
    if (name == "interaction") return SyntheticKind::Interaction;
    raise(ErrorCategory::Configuration, "unknown synthetic generator '" + name +
                                            "' (expected quadratic_bowl, multimodal, correlated_pair or interaction)");
}

std::string synthetic_name(SyntheticKind kind) {
    switch (kind) {
        case SyntheticKind::QuadraticBowl: return "quadratic_bowl";
        case SyntheticKind::Multimodal: return "multimodal";
        case SyntheticKind::CorrelatedPair: return "correlated_pair";
        case SyntheticKind::Interaction: return "interaction";
    }
    return "unknown";
}

namespace {

std::vector<ObjectiveDecl> synthetic_objectives(SyntheticKind kind) {
    switch (kind) {
        case SyntheticKind::QuadraticBowl: return {{"bowl", Direction::Minimize}};
        case SyntheticKind::Multimodal: return {{"multimodal", Direction::Maximize}};
        case SyntheticKind::CorrelatedPair: return {{"source", Direction::Maximize}, {"target", Direction::Maximize}};
        case SyntheticKind::Interaction: return {{"y", Direction::Maximize}};
    }
    return {};
}

ParameterVector random_grid_point(const DesignSpace& space, std::mt19937_64& rng) {
    ParameterVector x;
    for (const auto& p : space.parameters()) {
        std::uniform_int_distribution<std::size_t> pick(0, p.levels.size() - 1);
        x.push_back(p.levels[pick(rng)]);
    }
    return x;
}

}  // namespace

SyntheticEvaluator::SyntheticEvaluator(SyntheticKind kind, DesignSpace space, std::uint64_t seed)
    : Evaluator([&] {
          // The evaluator's own space carries the generated objectives.
          return DesignSpace(space.parameters(), synthetic_objectives(kind));
      }(),
                synthetic_objectives(kind)),
      kind_(kind),
      seed_(seed) {
    const auto& sp = this->space();
    if (sp.dimension() == 0) raise(ErrorCategory::Configuration, "synthetic evaluator needs at least one parameter");
    if (kind == SyntheticKind::Interaction && sp.dimension() < 2)
        raise(ErrorCategory::Configuration, "interaction generator needs at least two parameters");

    std::mt19937_64 rng(seed);
    center_ = random_grid_point(sp, rng);
    center_norm_ = sp.normalize(center_);

    if (kind == SyntheticKind::Multimodal || kind == SyntheticKind::CorrelatedPair) {
        std::uniform_real_distribution<double> height(0.55, 0.8);
        std::uniform_real_distribution<double> width(0.12, 0.2);
        peaks_.push_back({center_norm_, 1.0, 0.22});
        const std::size_t distractors = 4;
        std::set<ParameterVector> used{center_};
        while (peaks_.size() < distractors + 1 && used.size() < sp.cardinality()) {
            auto c = random_grid_point(sp, rng);
            if (!used.insert(c).second) continue;
            peaks_.push_back({sp.normalize(c), height(rng), width(rng)});
        }
    }
    if (kind == SyntheticKind::CorrelatedPair) {
        std::uniform_real_distribution<double> freq(-1.5, 1.5);
        std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
        for (std::size_t i = 0; i < sp.dimension(); ++i) {
            source_freq_.push_back(freq(rng));
            target_freq_.push_back(freq(rng));
        }
        source_phase_ = phase(rng);
        target_phase_ = phase(rng);
    }
}

double SyntheticEvaluator::peaks_value(const std::vector<double>& u) const {
    double best = 0.0;
    for (const auto& pk : peaks_) {
        double sq = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) sq += (u[i] - pk.center[i]) * (u[i] - pk.center[i]);
        best = std::max(best, pk.height * std::exp(-sq / (2.0 * pk.width * pk.width)));
    }
    return best;
}

double SyntheticEvaluator::wave(const std::vector<double>& u, const std::vector<double>& freq, double phase) const {
    double arg = phase;
    for (std::size_t i = 0; i < u.size(); ++i) arg += 2.0 * std::numbers::pi * freq[i] * u[i];
    return std::cos(arg);
}

std::vector<double> SyntheticEvaluator::compute(const ParameterVector& x) const {
    const auto u = space().normalize(x);
    switch (kind_) {
        case SyntheticKind::QuadraticBowl: {
            double s = 0.0;
            for (std::size_t i = 0; i < u.size(); ++i) s += (u[i] - center_norm_[i]) * (u[i] - center_norm_[i]);
            return {s};
        }
        case SyntheticKind::Multimodal:
            return {peaks_value(u)};
        case SyntheticKind::CorrelatedPair: {
            const double base = peaks_value(u);
            return {base + 0.04 * wave(u, source_freq_, source_phase_), base + 0.04 * wave(u, target_freq_, target_phase_)};
        }
        case SyntheticKind::Interaction: {
            const auto& params = space().parameters();
            const double scale = 0.05 * std::abs(params[0].levels.back()) * std::abs(params[1].levels.back());
            const auto index = *space().index_of(x);
            const double noise = standard_normal_hash(seed_, index);
            return {x[0] * x[1] + scale * noise};
        }
    }
    return {};
}

std::unique_ptr<SyntheticEvaluator> make_synthetic_evaluator(const std::string& name, const DesignSpace& space,
                                                             std::uint64_t seed) {
    return std::make_unique<SyntheticEvaluator>(parse_synthetic_kind(name), space, seed);
}

}  // namespace hwdse
