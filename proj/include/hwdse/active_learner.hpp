#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hwdse/evaluator.hpp"
#include "hwdse/gp.hpp"
#include "hwdse/transfer.hpp"

namespace hwdse {

struct ObjectiveSpec {
    std::string name;
    Direction direction = Direction::Maximize;
    KernelSpec kernel;
    double noise_variance = kDefaultNoiseVariance;
};

struct RunConfig {
    std::vector<ObjectiveSpec> objectives;
    int n_init = 5;
    int candidates_per_model = 5;
    int pool_size = 1000;
    int max_iterations = 50;
    int patience = 10;
    double exploration_beta = 0.0;
    /// Hard cap on evaluator calls; 0 means no cap beyond the iteration budget.
    std::size_t max_queries = 0;
    std::uint64_t seed = 0;
    std::optional<TransferConfig> transfer;

    /// Throws Configuration for any violated invariant.
    void validate() const;
};

struct BestPoint {
    ParameterVector point;
    double value = 0.0;
    bool found = false;
};

struct QueryRecord {
    ParameterVector point;
    std::vector<double> values;  // one per run objective; empty when failed
    bool failed = false;
    std::string error;
};

struct IterationRecord {
    std::vector<QueryRecord> queried;
    std::vector<BestPoint> best_so_far;  // one per run objective
};

/// Ordered record of a run. Iteration 0 is the initial random batch.
struct RunHistory {
    std::vector<std::string> objective_names;
    std::vector<Direction> directions;
    std::vector<IterationRecord> iterations;
    std::size_t total_queries = 0;
    bool exhausted = false;

    /// Proposal iterations completed (the initial batch excluded).
    int proposal_iterations() const { return iterations.empty() ? 0 : static_cast<int>(iterations.size()) - 1; }
    /// Every queried point, in evaluation order.
    std::vector<QueryRecord> all_queries() const;
    /// 1-based position in the query sequence at which `point` was first
    /// evaluated, or nullopt.
    std::optional<std::size_t> query_position(const ParameterVector& point) const;
};

struct RunResult {
    std::vector<GPModel> models;  // one per objective, fitted on all successful queries
    RunHistory history;
};

/// The region candidates are drawn from: the full grid of a design space, or
/// an explicit finite list (e.g. the rows of a result table).
class SearchDomain {
  public:
    explicit SearchDomain(const DesignSpace& space);
    SearchDomain(const DesignSpace& space, std::vector<ParameterVector> points);

    const DesignSpace& space() const { return *space_; }
    std::uint64_t size() const;
    ParameterVector point(std::uint64_t index) const;

    /// Up to `n` distinct points not in `exclude`, uniformly at random. Returns
    /// every remaining point when fewer than `n` are left.
    std::vector<ParameterVector> sample_unvisited(std::size_t n, const std::set<ParameterVector>& exclude,
                                                  std::uint64_t seed) const;

  private:
    const DesignSpace* space_;
    std::optional<std::vector<ParameterVector>> points_;
};

/// n distinct points drawn uniformly (clamped, with a warning, to the number of
/// points available).
std::vector<ParameterVector> initialize(const DesignSpace& space, int n, std::uint64_t seed);
std::vector<ParameterVector> initialize(const SearchDomain& domain, int n, std::uint64_t seed);

/// Optional source surrogate blended into one model's scores.
struct ScoringTransfer {
    const GPModel* source = nullptr;
    std::size_t model_index = 0;
    double lambda1 = 0.0;
    double lambda2 = 0.0;
};

/// Draws a pool of unvisited points, scores it under every model by
/// sign(direction) * mean + beta * stddev, and returns the union of each model's
/// top k (deduplicated, model order then rank). Ties go to the
/// lexicographically smaller normalized point. Empty when nothing is left.
std::vector<ParameterVector> propose_candidates(const std::vector<GPModel>& models, const SearchDomain& domain, int k,
                                                int pool_size, double beta, const std::set<ParameterVector>& visited,
                                                std::uint64_t seed, const ScoringTransfer& transfer = {});
std::vector<ParameterVector> propose_candidates(const std::vector<GPModel>& models, const DesignSpace& space, int k,
                                                int pool_size, double beta, const std::set<ParameterVector>& visited,
                                                std::uint64_t seed);

/// True once the iteration budget is spent, no objective has improved for
/// `patience` consecutive proposal iterations, or the domain is exhausted.
bool stopping_check(const RunHistory& history, const RunConfig& config);

/// Multi-model active learning: random initial batch, then repeatedly refit one
/// GP per objective on everything observed so far and query the union of each
/// model's best candidates. Uses the evaluator's support as the search domain
/// when it has one.
RunResult run_active_learning(const RunConfig& config, Evaluator& evaluator);

/// Baseline with the same batch structure: uniformly random unvisited batches
/// of k * M points. Used to compare sample efficiency.
RunHistory run_random_search(const RunConfig& config, Evaluator& evaluator);

}  // namespace hwdse
