#include "hwdse/active_learner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "hwdse/error.hpp"
#include "hwdse/log.hpp"
#include "hwdse/rng.hpp"

namespace hwdse {

void RunConfig::validate() const {
    if (objectives.empty()) raise(ErrorCategory::Configuration, "run needs at least one objective");
    std::set<std::string> names;
    for (const auto& o : objectives) {
        if (!names.insert(o.name).second)
            raise(ErrorCategory::Configuration, "objective '" + o.name + "' listed twice");
        o.kernel.validate();
        if (!(o.noise_variance >= 0.0)) raise(ErrorCategory::Configuration, "noise variance must be nonnegative");
    }
    if (n_init < 1) raise(ErrorCategory::Configuration, "n_init must be >= 1");
    if (candidates_per_model < 1) raise(ErrorCategory::Configuration, "candidates per model must be >= 1");
    if (pool_size < 1) raise(ErrorCategory::Configuration, "pool size must be >= 1");
    if (static_cast<long long>(candidates_per_model) * static_cast<long long>(objectives.size()) > pool_size)
        raise(ErrorCategory::Configuration, "candidates per model times objectives exceeds the pool size");
    if (max_iterations < 1) raise(ErrorCategory::Configuration, "max iterations must be >= 1");
    if (patience < 1) raise(ErrorCategory::Configuration, "patience must be >= 1");
    if (!(exploration_beta >= 0.0)) raise(ErrorCategory::Configuration, "exploration beta must be nonnegative");
    if (transfer) transfer->validate();
}

std::vector<QueryRecord> RunHistory::all_queries() const {
    std::vector<QueryRecord> out;
    for (const auto& it : iterations) out.insert(out.end(), it.queried.begin(), it.queried.end());
    return out;
}

std::optional<std::size_t> RunHistory::query_position(const ParameterVector& point) const {
    std::size_t pos = 0;
    for (const auto& it : iterations) {
        for (const auto& q : it.queried) {
            ++pos;
            if (q.point == point) return pos;
        }
    }
    return std::nullopt;
}

SearchDomain::SearchDomain(const DesignSpace& space) : space_(&space) {}

SearchDomain::SearchDomain(const DesignSpace& space, std::vector<ParameterVector> points)
    : space_(&space), points_(std::move(points)) {}

std::uint64_t SearchDomain::size() const { return points_ ? points_->size() : space_->cardinality(); }

ParameterVector SearchDomain::point(std::uint64_t index) const {
    return points_ ? points_->at(index) : space_->point_at(index);
}

std::vector<ParameterVector> SearchDomain::sample_unvisited(std::size_t n, const std::set<ParameterVector>& exclude,
                                                            std::uint64_t seed) const {
    std::vector<ParameterVector> out;
    const std::uint64_t total = size();
    if (n == 0 || total == 0) return out;
    std::mt19937_64 rng(seed);

    // Enumerate when the domain is small relative to what we need; otherwise
    // rejection-sample indices.
    const bool enumerate = total <= 4 * (static_cast<std::uint64_t>(n) + exclude.size()) || total <= 200'000;
    if (enumerate) {
        std::vector<std::uint64_t> free;
        for (std::uint64_t i = 0; i < total; ++i)
            if (!exclude.count(point(i))) free.push_back(i);
        if (free.size() <= n) {
            for (auto i : free) out.push_back(point(i));
            return out;
        }
        for (std::size_t i = 0; i < n; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, free.size() - 1);
            std::swap(free[i], free[pick(rng)]);
            out.push_back(point(free[i]));
        }
        return out;
    }
    std::set<std::uint64_t> taken;
    std::uniform_int_distribution<std::uint64_t> pick(0, total - 1);
    while (out.size() < n) {
        const auto i = pick(rng);
        if (!taken.insert(i).second) continue;
        auto p = point(i);
        if (exclude.count(p)) continue;
        out.push_back(std::move(p));
    }
    return out;
}

std::vector<ParameterVector> initialize(const SearchDomain& domain, int n, std::uint64_t seed) {
    if (n < 1) raise(ErrorCategory::Argument, "initialize: n must be >= 1");
    if (domain.size() == 0) raise(ErrorCategory::Configuration, "initialize: empty design space");
    if (static_cast<std::uint64_t>(n) > domain.size())
        logger()->warn("initialize: requested {} points but only {} exist; taking all of them", n, domain.size());
    return domain.sample_unvisited(static_cast<std::size_t>(n), {}, seed);
}

std::vector<ParameterVector> initialize(const DesignSpace& space, int n, std::uint64_t seed) {
    return initialize(SearchDomain(space), n, seed);
}

std::vector<ParameterVector> propose_candidates(const std::vector<GPModel>& models, const SearchDomain& domain, int k,
                                                int pool_size, double beta, const std::set<ParameterVector>& visited,
                                                std::uint64_t seed, const ScoringTransfer& transfer) {
    if (k < 1) raise(ErrorCategory::Argument, "propose_candidates: k must be >= 1");
    if (pool_size < 1) raise(ErrorCategory::Argument, "propose_candidates: pool size must be >= 1");
    if (models.empty()) raise(ErrorCategory::Argument, "propose_candidates: no models");
    const auto pool = domain.sample_unvisited(static_cast<std::size_t>(pool_size), visited, seed);
    std::vector<ParameterVector> chosen;
    if (pool.empty()) return chosen;

    std::set<ParameterVector> in_union;
    std::vector<std::size_t> order(pool.size());
    std::vector<double> score(pool.size());
    for (std::size_t m = 0; m < models.size(); ++m) {
        Posterior post = models[m].posterior(pool);
        if (transfer.source && transfer.model_index == m) {
            if (transfer.source->dimension() != models[m].dimension())
                raise(ErrorCategory::Configuration, "transfer source dimension differs from the design space");
            post = combine_posterior(post, transfer.source->posterior(pool), transfer.lambda1, transfer.lambda2);
        }
        const double sign = direction_sign(models[m].direction());
        for (std::size_t i = 0; i < pool.size(); ++i)
            score[i] = sign * post.means[i] + beta * std::sqrt(post.variances[i]);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (score[a] != score[b]) return score[a] > score[b];
            return pool[a] < pool[b];
        });
        const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(k), pool.size());
        for (std::size_t r = 0; r < take; ++r) {
            const auto& p = pool[order[r]];
            if (in_union.insert(p).second) chosen.push_back(p);
        }
    }
    return chosen;
}

std::vector<ParameterVector> propose_candidates(const std::vector<GPModel>& models, const DesignSpace& space, int k,
                                                int pool_size, double beta, const std::set<ParameterVector>& visited,
                                                std::uint64_t seed) {
    return propose_candidates(models, SearchDomain(space), k, pool_size, beta, visited, seed);
}

namespace {

bool improved(const IterationRecord& before, const IterationRecord& after, const std::vector<Direction>& directions) {
    for (std::size_t o = 0; o < after.best_so_far.size(); ++o) {
        const auto& a = before.best_so_far[o];
        const auto& b = after.best_so_far[o];
        if (b.found && (!a.found || improves(directions[o], b.value, a.value))) return true;
    }
    return false;
}

}  // namespace

bool stopping_check(const RunHistory& history, const RunConfig& config) {
    if (history.iterations.empty()) return false;
    if (history.exhausted) return true;
    if (config.max_queries > 0 && history.total_queries >= config.max_queries) return true;
    if (history.proposal_iterations() >= config.max_iterations) return true;
    int flat = 0;
    for (std::size_t i = history.iterations.size() - 1; i >= 1; --i) {
        if (improved(history.iterations[i - 1], history.iterations[i], history.directions)) break;
        ++flat;
    }
    return flat >= config.patience;
}

namespace {

/// Shared bookkeeping for the active-learning and random-search loops.
class RunState {
  public:
    RunState(const RunConfig& config, Evaluator& evaluator)
        : config_(config),
          evaluator_(evaluator),
          domain_(evaluator.support() ? SearchDomain(evaluator.space(), *evaluator.support())
                                      : SearchDomain(evaluator.space())) {
        for (const auto& o : config.objectives) {
            columns_.push_back(evaluator.objective_index(o.name));
            history_.objective_names.push_back(o.name);
            history_.directions.push_back(o.direction);
        }
        ys_.resize(config.objectives.size());
    }

    const SearchDomain& domain() const { return domain_; }
    const std::set<ParameterVector>& visited() const { return visited_; }
    RunHistory& history() { return history_; }

    void evaluate(const std::vector<ParameterVector>& batch) {
        IterationRecord rec;
        rec.best_so_far = history_.iterations.empty() ? std::vector<BestPoint>(config_.objectives.size())
                                                      : history_.iterations.back().best_so_far;
        std::string first_error;
        std::size_t failures = 0;
        for (const auto& p : batch) {
            if (config_.max_queries > 0 && history_.total_queries >= config_.max_queries) break;
            if (!visited_.insert(p).second) continue;
            ++history_.total_queries;
            QueryRecord q;
            q.point = p;
            try {
                const auto values = evaluator_.query(p);
                for (auto c : columns_) q.values.push_back(values.at(c));
            } catch (const Error& e) {
                q.failed = true;
                q.values.clear();
                q.error = e.what();
                if (first_error.empty()) first_error = e.what();
                ++failures;
                logger()->info("evaluation failed: {}", e.what());
            }
            if (!q.failed) {
                xs_.push_back(p);
                for (std::size_t o = 0; o < columns_.size(); ++o) {
                    ys_[o].push_back(q.values[o]);
                    auto& best = rec.best_so_far[o];
                    if (!best.found || improves(config_.objectives[o].direction, q.values[o], best.value)) {
                        best.point = p;
                        best.value = q.values[o];
                        best.found = true;
                    }
                }
            }
            rec.queried.push_back(std::move(q));
        }
        if (!rec.queried.empty() && failures == rec.queried.size())
            raise(ErrorCategory::Data, "every point of iteration " + std::to_string(history_.iterations.size()) +
                                           " failed to evaluate; first error: " + first_error);
        history_.iterations.push_back(std::move(rec));
        if (visited_.size() >= domain_.size()) history_.exhausted = true;
    }

    std::vector<GPModel> fit_models() const {
        if (xs_.empty()) raise(ErrorCategory::Data, "no successful evaluations to fit models on");
        std::vector<GPModel> models;
        const auto bounds = evaluator_.space().bounds();
        for (std::size_t o = 0; o < config_.objectives.size(); ++o) {
            const auto& spec = config_.objectives[o];
            models.push_back(fit_gp(xs_, ys_[o], spec.kernel, spec.noise_variance, spec.direction, bounds, spec.name));
        }
        return models;
    }

  private:
    const RunConfig& config_;
    Evaluator& evaluator_;
    SearchDomain domain_;
    std::vector<std::size_t> columns_;
    std::set<ParameterVector> visited_;
    std::vector<ParameterVector> xs_;
    std::vector<std::vector<double>> ys_;
    RunHistory history_;
};

}  // namespace

RunResult run_active_learning(const RunConfig& config, Evaluator& evaluator) {
    config.validate();
    RunState state(config, evaluator);

    std::shared_ptr<const GPModel> source;
    ScoringTransfer transfer;
    if (config.transfer) {
        source = config.transfer->resolve_source();
        if (source->dimension() != evaluator.space().dimension())
            raise(ErrorCategory::Configuration, "transfer source model has dimension " +
                                                    std::to_string(source->dimension()) + ", design space has " +
                                                    std::to_string(evaluator.space().dimension()));
        transfer.source = source.get();
        if (!config.transfer->objective.empty()) {
            bool found = false;
            for (std::size_t o = 0; o < config.objectives.size(); ++o) {
                if (config.objectives[o].name == config.transfer->objective) {
                    transfer.model_index = o;
                    found = true;
                }
            }
            if (!found)
                raise(ErrorCategory::Configuration, "transfer objective '" + config.transfer->objective +
                                                        "' is not one of the run objectives");
        }
    }

    state.evaluate(initialize(state.domain(), config.n_init, derive_seed(config.seed, 0)));

    const int decay_span = std::max(1, config.max_iterations - 1);
    std::vector<GPModel> models = state.fit_models();
    while (!stopping_check(state.history(), config)) {
        const int t = state.history().proposal_iterations();
        if (source) {
            const int step = std::min(t, decay_span);
            transfer.lambda1 = lambda_schedule(step, decay_span, config.transfer->lambda1_initial);
            transfer.lambda2 = lambda_schedule(step, decay_span, config.transfer->lambda2_initial);
        }
        const auto batch = propose_candidates(models, state.domain(), config.candidates_per_model, config.pool_size,
                                              config.exploration_beta, state.visited(),
                                              derive_seed(config.seed, static_cast<std::uint64_t>(t) + 1), transfer);
        if (batch.empty()) {
            state.history().exhausted = true;
            break;
        }
        state.evaluate(batch);
        models = state.fit_models();
    }
    return {std::move(models), std::move(state.history())};
}

RunHistory run_random_search(const RunConfig& config, Evaluator& evaluator) {
    config.validate();
    RunState state(config, evaluator);
    state.evaluate(initialize(state.domain(), config.n_init, derive_seed(config.seed, 0)));
    const std::size_t batch_size =
        static_cast<std::size_t>(config.candidates_per_model) * config.objectives.size();
    while (!stopping_check(state.history(), config)) {
        const int t = state.history().proposal_iterations();
        const auto batch = state.domain().sample_unvisited(batch_size, state.visited(),
                                                           derive_seed(config.seed, static_cast<std::uint64_t>(t) + 1));
        if (batch.empty()) {
            state.history().exhausted = true;
            break;
        }
        state.evaluate(batch);
    }
    return std::move(state.history());
}

}  // namespace hwdse
