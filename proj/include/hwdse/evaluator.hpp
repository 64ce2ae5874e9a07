#pragma once

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "hwdse/design_space.hpp"

namespace hwdse {

/// Rows of design points with their objective values, in the CSV interchange
/// schema: header = parameter names then objective names.
struct Dataset {
    std::vector<std::string> parameter_names;
    std::vector<std::string> objective_names;
    std::vector<ParameterVector> points;
    std::vector<std::vector<double>> values;  // one row per point, objective order

    std::size_t size() const { return points.size(); }
    /// Column of one objective; throws Configuration for an unknown name.
    std::vector<double> objective_column(const std::string& name) const;
};

/// Parses a dataset CSV against `space`. When `check_domains` is set every
/// parameter value must be one of the declared levels. When the manifest
/// declares objectives every trailing header column must be one of them.
Dataset read_dataset_csv(const std::filesystem::path& csv, const DesignSpace& space, bool check_domains = true);
void write_dataset_csv(const std::filesystem::path& csv, const Dataset& data);

/// Stand-in for a synthesis tool: answers objective vectors for design points.
/// Results are cached by the raw level tuple; query() is safe to call
/// concurrently.
class Evaluator {
  public:
    Evaluator(DesignSpace space, std::vector<ObjectiveDecl> objectives);
    virtual ~Evaluator() = default;
    Evaluator(const Evaluator&) = delete;
    Evaluator& operator=(const Evaluator&) = delete;

    const DesignSpace& space() const { return space_; }
    const std::vector<ObjectiveDecl>& objectives() const { return objectives_; }
    std::vector<std::string> objective_names() const;
    /// Index of an objective column; throws Configuration when absent.
    std::size_t objective_index(const std::string& name) const;

    /// Objective vector at x. Throws Argument for out-of-domain points and
    /// NotCovered when the backing source has no value there.
    std::vector<double> query(const ParameterVector& x);

    /// Finite candidate set when the evaluator only covers part of the space.
    virtual std::optional<std::vector<ParameterVector>> support() const { return std::nullopt; }

    void set_cache_enabled(bool enabled) { cache_enabled_ = enabled; }
    std::size_t cache_hits() const { return cache_hits_; }
    /// Calls that reached the backing source (cache misses).
    std::size_t evaluations() const { return evaluations_; }

  protected:
    virtual std::vector<double> compute(const ParameterVector& x) const = 0;

  private:
    DesignSpace space_;
    std::vector<ObjectiveDecl> objectives_;
    mutable std::mutex mutex_;
    std::map<ParameterVector, std::vector<double>> cache_;
    bool cache_enabled_ = true;
    std::atomic<std::size_t> cache_hits_{0};
    std::atomic<std::size_t> evaluations_{0};
};

/// Replays a result table. Refuses points not present in the table.
class TableEvaluator final : public Evaluator {
  public:
    TableEvaluator(DesignSpace space, const Dataset& table);

    std::optional<std::vector<ParameterVector>> support() const override { return points_; }
    const Dataset& table() const { return table_; }

  protected:
    std::vector<double> compute(const ParameterVector& x) const override;

  private:
    Dataset table_;
    std::vector<ParameterVector> points_;
    std::map<ParameterVector, std::vector<double>> rows_;
};

std::unique_ptr<TableEvaluator> load_table_evaluator(const std::filesystem::path& csv,
                                                     const std::filesystem::path& manifest);
std::unique_ptr<TableEvaluator> make_table_evaluator(const DesignSpace& space, const Dataset& table);

/// Closed-form synthetic objectives over a design space. Coordinates below are
/// the min-max normalized inputs u in [0,1]^p.
///
///   quadratic_bowl   bowl = sum_i (u_i - c_i)^2, minimize; c is a seeded grid
///                    point, so the minimum 0 is attained on the grid.
///   multimodal       multimodal = max_j h_j exp(-|u - c_j|^2 / (2 w_j^2)),
///                    maximize; peak 0 has h = 1, the distractors h < 1, so the
///                    unique optimum 1 sits at grid point c_0.
///   correlated_pair  source, target = multimodal base plus small independent
///                    smooth perturbations; strongly correlated tasks.
///   interaction      y = x1 * x2 + N(0, (0.05 max(x1) max(x2))^2) on raw levels,
///                    the noise fixed per design point.
enum class SyntheticKind { QuadraticBowl, Multimodal, CorrelatedPair, Interaction };

SyntheticKind parse_synthetic_kind(const std::string& name);
std::string synthetic_name(SyntheticKind kind);

class SyntheticEvaluator final : public Evaluator {
  public:
    SyntheticEvaluator(SyntheticKind kind, DesignSpace space, std::uint64_t seed);

    SyntheticKind kind() const { return kind_; }
    /// Grid point of the bowl minimum / the highest peak.
    const ParameterVector& center() const { return center_; }

  protected:
    std::vector<double> compute(const ParameterVector& x) const override;

  private:
    struct Peak {
        std::vector<double> center;  // normalized
        double height;
        double width;
    };

    double peaks_value(const std::vector<double>& u) const;
    double wave(const std::vector<double>& u, const std::vector<double>& freq, double phase) const;

    SyntheticKind kind_;
    std::uint64_t seed_;
    ParameterVector center_;
    std::vector<double> center_norm_;
    std::vector<Peak> peaks_;
    std::vector<double> source_freq_, target_freq_;
    double source_phase_ = 0.0, target_phase_ = 0.0;
};

std::unique_ptr<SyntheticEvaluator> make_synthetic_evaluator(const std::string& name, const DesignSpace& space,
                                                             std::uint64_t seed);

}  // namespace hwdse
