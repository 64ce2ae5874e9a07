#include "hwdse/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "hwdse/active_learner.hpp"
#include "hwdse/bootstrap.hpp"
#include "hwdse/error.hpp"
#include "hwdse/evaluator.hpp"
#include "hwdse/gp.hpp"
#include "hwdse/pareto.hpp"
#include "hwdse/regression.hpp"
#include "hwdse/text.hpp"

namespace hwdse::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

struct DseOptions {
    std::string manifest, dataset, synthetic, objectives, kernel = "se", transfer_from, transfer_objective, out = "dse_out";
    int budget = 100, n_init = 5, candidates = 5, pool_size = 1000, patience = 10;
    double beta = 0.0, length_scale = 1.0, noise_variance = kDefaultNoiseVariance, lambda1 = 0.5, lambda2 = 0.0;
    std::uint64_t seed = 0;
};

struct BootstrapOptions {
    std::string model, manifest, noise_mode = "joint", queries, out = "bootstrap_out";
    int n_points = 2000;
    std::uint64_t seed = 0;
};

struct RegressOptions {
    std::string dataset, manifest, objectives, model = "linear", test_dataset, data_source, out = "regress_out";
    double test_fraction = 0.2;
    int n_lambdas = kDefaultLassoLambdas, n_trees = 100, max_depth = 16, min_leaf = 2, features_per_split = 0;
    std::uint64_t seed = 0;
};

struct ParetoOptions {
    std::string dataset, manifest, objectives, provenance = "evaluated", out = "pareto_out";
};

struct ReportOptions {
    std::string run_dir;
};

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    if (text::trim(s).empty()) return out;
    for (auto& f : text::split_csv(s))
        if (!f.empty()) out.push_back(f);
    return out;
}

void require_file(const std::string& path, const std::string& what) {
    if (path.empty()) raise(ErrorCategory::Configuration, what + " is required");
    if (!fs::is_regular_file(path)) raise(ErrorCategory::Configuration, what + " '" + path + "' does not exist");
}

void prepare_out_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
        raise(ErrorCategory::Configuration, "cannot create output directory '" + dir.string() + "'");
}

void write_text(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrorCategory::Configuration, "cannot write '" + path.string() + "'");
    out << content;
}

json point_json(const std::vector<std::string>& names, const ParameterVector& x) {
    json j = json::object();
    for (std::size_t i = 0; i < names.size(); ++i) j[names[i]] = x[i];
    return j;
}

std::string safe_file_stem(const std::string& name) {
    std::string s;
    for (char c : name) s += std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ? c : '_';
    return s;
}

int cmd_dse(const DseOptions& o, std::ostream& out) {
    require_file(o.manifest, "--manifest");
    const auto space = load_design_space(o.manifest);
    std::unique_ptr<Evaluator> evaluator;
    if (!o.dataset.empty() && !o.synthetic.empty())
        raise(ErrorCategory::Configuration, "use either --dataset or --synthetic, not both");
    if (!o.dataset.empty()) {
        require_file(o.dataset, "--dataset");
        evaluator = make_table_evaluator(space, read_dataset_csv(o.dataset, space, true));
    } else if (!o.synthetic.empty()) {
        evaluator = make_synthetic_evaluator(o.synthetic, space, o.seed);
    } else {
        raise(ErrorCategory::Configuration, "dse needs --dataset or --synthetic");
    }

    auto names = split_list(o.objectives);
    if (names.empty()) names = evaluator->objective_names();
    const auto kernel = parse_kernel_name(o.kernel, o.length_scale);

    RunConfig cfg;
    for (const auto& name : names) {
        const auto idx = evaluator->objective_index(name);
        cfg.objectives.push_back({name, evaluator->objectives()[idx].direction, kernel, o.noise_variance});
    }
    if (o.budget < 1) raise(ErrorCategory::Configuration, "--budget must be >= 1");
    cfg.n_init = std::min(o.n_init, o.budget);
    cfg.candidates_per_model = o.candidates;
    cfg.pool_size = o.pool_size;
    cfg.exploration_beta = o.beta;
    cfg.patience = o.patience;
    cfg.seed = o.seed;
    cfg.max_queries = static_cast<std::size_t>(o.budget);
    const long long per_iter = static_cast<long long>(o.candidates) * static_cast<long long>(names.size());
    const long long remaining = std::max(0, o.budget - cfg.n_init);
    cfg.max_iterations = static_cast<int>(std::max(1LL, (remaining + per_iter - 1) / std::max(1LL, per_iter)));
    if (!o.transfer_from.empty()) {
        require_file(o.transfer_from, "--transfer-from");
        TransferConfig t;
        t.source_model_path = o.transfer_from;
        t.lambda1_initial = o.lambda1;
        t.lambda2_initial = o.lambda2;
        t.objective = o.transfer_objective;
        cfg.transfer = t;
    }

    const auto result = run_active_learning(cfg, *evaluator);
    const auto& h = result.history;
    const auto pnames = space.parameter_names();

    // Everything computed; now write.
    const fs::path dir = o.out;
    prepare_out_dir(dir);

    std::ostringstream hist;
    hist << "iteration,objective,best_value";
    for (const auto& p : pnames) hist << ',' << p;
    hist << '\n';
    for (std::size_t i = 0; i < h.iterations.size(); ++i) {
        for (std::size_t k = 0; k < h.objective_names.size(); ++k) {
            const auto& b = h.iterations[i].best_so_far[k];
            if (!b.found) continue;
            hist << i << ',' << h.objective_names[k] << ',' << text::format_double(b.value);
            for (double v : b.point) hist << ',' << text::format_double(v);
            hist << '\n';
        }
    }
    write_text(dir / "run_history.csv", hist.str());

    Dataset evaluated;
    evaluated.parameter_names = pnames;
    evaluated.objective_names = h.objective_names;
    for (const auto& q : h.all_queries()) {
        if (q.failed) continue;
        evaluated.points.push_back(q.point);
        evaluated.values.push_back(q.values);
    }
    write_dataset_csv(dir / "evaluations.csv", evaluated);

    json summary;
    summary["total_queries"] = h.total_queries;
    summary["iterations"] = h.proposal_iterations();
    summary["exhausted"] = h.exhausted;
    summary["seed"] = o.seed;
    summary["kernel"] = kernel_name(kernel);
    summary["objectives"] = json::array();
    const auto& last = h.iterations.back().best_so_far;
    for (std::size_t k = 0; k < h.objective_names.size(); ++k) {
        json obj;
        obj["name"] = h.objective_names[k];
        obj["direction"] = to_string(h.directions[k]);
        const std::string model_file = "model_" + safe_file_stem(h.objective_names[k]) + ".gp";
        obj["model_file"] = model_file;
        if (last[k].found) {
            obj["best_value"] = last[k].value;
            obj["best_point"] = point_json(pnames, last[k].point);
        }
        summary["objectives"].push_back(obj);
        save_gp(result.models[k], dir / model_file);
    }
    write_text(dir / "summary.json", summary.dump(2) + "\n");
    out << "dse: " << h.total_queries << " queries over " << h.proposal_iterations() << " iterations; results in "
        << dir.string() << '\n';
    return 0;
}

int cmd_bootstrap(const BootstrapOptions& o, std::ostream& out) {
    require_file(o.model, "--model");
    require_file(o.manifest, "--manifest");
    const auto gp = load_gp(o.model);
    const auto space = load_design_space(o.manifest);
    BootstrapConfig cfg;
    cfg.n_points = o.n_points;
    cfg.noise_mode = parse_noise_mode(o.noise_mode);
    cfg.seed = o.seed;
    if (!o.queries.empty()) {
        require_file(o.queries, "--queries");
        const auto q = read_dataset_csv(o.queries, DesignSpace(space.parameters()), true);
        cfg.query_source = QuerySource::ProvidedList;
        cfg.queries = q.points;
    }
    const auto sim = bootstrap_sample(gp, space, cfg);
    const std::string objective = gp.name().empty() ? "y" : gp.name();
    const fs::path dir = o.out;
    prepare_out_dir(dir);
    write_dataset_csv(dir / "bootstrap.csv", sim.to_dataset(space, objective));
    out << "bootstrap: " << sim.points.size() << " simulated points written to " << (dir / "bootstrap.csv").string()
        << '\n';
    return 0;
}

std::string choose_objective(const Dataset& data, const std::string& requested) {
    const auto names = split_list(requested);
    if (names.size() > 1) raise(ErrorCategory::Configuration, "regress takes a single objective");
    if (names.empty()) return data.objective_names.front();
    return names.front();
}

int cmd_regress(const RegressOptions& o, std::ostream& out) {
    require_file(o.dataset, "--dataset");
    require_file(o.manifest, "--manifest");
    if (o.model != "linear" && o.model != "lasso" && o.model != "forest")
        raise(ErrorCategory::Configuration, "unknown --model '" + o.model + "' (expected linear, lasso or forest)");
    const auto space = load_design_space(o.manifest);
    const auto data = read_dataset_csv(o.dataset, space, false);
    const auto objective = choose_objective(data, o.objectives);
    const auto all = RegressionDataset::from_dataset(data, objective);

    RegressionDataset train, test;
    if (!o.test_dataset.empty()) {
        require_file(o.test_dataset, "--test-dataset");
        train = all;
        test = RegressionDataset::from_dataset(read_dataset_csv(o.test_dataset, space, false), objective);
    } else {
        std::tie(train, test) = train_test_split(all, o.test_fraction, o.seed);
    }

    json metrics;
    metrics["model"] = o.model;
    metrics["n_samples"] = train.rows();
    metrics["n_test"] = test.rows();
    metrics["objective"] = objective;
    metrics["data_source"] = o.data_source.empty() ? fs::path(o.dataset).stem().string() : o.data_source;

    std::ostringstream coef_csv, path_csv;
    Eigen::VectorXd pred;
    const auto& names = all.feature_names;
    if (o.model == "linear") {
        const auto m = fit_linear(train);
        pred = m.predict(test.features);
        coef_csv << "term,coefficient\nintercept," << text::format_double(m.intercept) << '\n';
        for (Eigen::Index j = 0; j < m.coefficients.size(); ++j)
            coef_csv << names[static_cast<std::size_t>(j)] << ',' << text::format_double(m.coefficients(j)) << '\n';
    } else if (o.model == "lasso") {
        const auto path = fit_lasso_path(train, o.n_lambdas);
        const Eigen::Index last = static_cast<Eigen::Index>(path.lambdas.size()) - 1;
        // Predictions use the least regularized end of the path.
        pred = (test.features * path.coefficients.row(0).transpose()).array() + path.intercepts.front();
        coef_csv << "term,coefficient\nintercept," << text::format_double(path.intercepts.front()) << '\n';
        for (Eigen::Index j = 0; j < path.coefficients.cols(); ++j)
            coef_csv << names[static_cast<std::size_t>(j)] << ',' << text::format_double(path.coefficients(0, j)) << '\n';
        path_csv << "lambda";
        for (const auto& n : names) path_csv << ',' << n;
        path_csv << '\n';
        for (Eigen::Index g = 0; g <= last; ++g) {
            path_csv << text::format_double(path.lambdas[static_cast<std::size_t>(g)]);
            for (Eigen::Index j = 0; j < path.coefficients.cols(); ++j)
                path_csv << ',' << text::format_double(path.coefficients(g, j));
            path_csv << '\n';
        }
        json order = json::array();
        for (int j : path.collapse_order) order.push_back(names[static_cast<std::size_t>(j)]);
        metrics["collapse_order"] = order;
        metrics["lambda_max"] = path.lambda_max;
    } else {
        ForestConfig fc;
        fc.n_trees = o.n_trees;
        fc.max_depth = o.max_depth;
        fc.min_leaf = o.min_leaf;
        fc.features_per_split = o.features_per_split;
        fc.seed = o.seed;
        pred = fit_random_forest(train, fc).predict(test.features);
    }
    metrics["normalized_rmse"] = normalized_rmse(pred, test.targets);

    const fs::path dir = o.out;
    prepare_out_dir(dir);
    write_text(dir / "metrics.json", metrics.dump(2) + "\n");
    if (!coef_csv.str().empty()) write_text(dir / "coefficients.csv", coef_csv.str());
    if (!path_csv.str().empty()) write_text(dir / "lasso_path.csv", path_csv.str());
    out << "regress: " << o.model << " normalized_rmse=" << text::format_double(metrics["normalized_rmse"].get<double>())
        << '\n';
    return 0;
}

int cmd_pareto(const ParetoOptions& o, std::ostream& out) {
    require_file(o.dataset, "--dataset");
    require_file(o.manifest, "--manifest");
    const auto space = load_design_space(o.manifest);
    const auto data = read_dataset_csv(o.dataset, space, false);
    auto names = split_list(o.objectives);
    if (names.empty()) names = data.objective_names;
    Provenance prov;
    if (o.provenance == "evaluated")
        prov = Provenance::Evaluated;
    else if (o.provenance == "surrogate")
        prov = Provenance::SurrogatePredicted;
    else
        raise(ErrorCategory::Configuration, "unknown --provenance '" + o.provenance + "'");

    std::vector<Direction> dirs;
    std::vector<std::vector<double>> cols;
    for (const auto& n : names) {
        const auto* decl = space.find_objective(n);
        if (!decl) raise(ErrorCategory::Configuration, "objective '" + n + "' has no direction in the manifest");
        dirs.push_back(decl->direction);
        cols.push_back(data.objective_column(n));
    }
    std::vector<ObjectivePoint> pts;
    for (std::size_t i = 0; i < data.size(); ++i) {
        ObjectivePoint p;
        p.params = data.points[i];
        p.provenance = prov;
        for (const auto& c : cols) p.values.push_back(c[i]);
        pts.push_back(std::move(p));
    }
    const auto front = pareto_frontier(pts, dirs);

    std::ostringstream csv;
    std::vector<std::string> header = names;
    for (const auto& p : data.parameter_names) header.push_back(p);
    header.push_back("provenance");
    csv << text::join(header, ",") << '\n';
    for (const auto& p : front) {
        std::vector<std::string> f;
        for (double v : p.values) f.push_back(text::format_double(v));
        for (double v : p.params) f.push_back(text::format_double(v));
        f.push_back(to_string(p.provenance));
        csv << text::join(f, ",") << '\n';
    }
    const fs::path dir = o.out;
    prepare_out_dir(dir);
    write_text(dir / "frontier.csv", csv.str());
    out << "pareto: " << front.size() << " frontier points (" << to_string(prov) << ") written to "
        << (dir / "frontier.csv").string() << '\n';
    return 0;
}

int cmd_report(const ReportOptions& o, std::ostream& out) {
    if (o.run_dir.empty()) raise(ErrorCategory::Configuration, "report needs --run-dir");
    const fs::path summary_path = fs::path(o.run_dir) / "summary.json";
    require_file(summary_path.string(), "run summary");
    json s;
    try {
        std::ifstream in(summary_path);
        s = json::parse(in);
    } catch (const json::exception& e) {
        raise(ErrorCategory::Format, summary_path.string() + ": " + e.what());
    }
    out << "run: " << o.run_dir << '\n';
    out << "summary:\n";
    for (const auto& obj : s.at("objectives")) {
        out << "  " << obj.at("name").get<std::string>() << " (" << obj.at("direction").get<std::string>() << "): ";
        if (obj.contains("best_value")) {
            out << "best " << text::format_double(obj.at("best_value").get<double>()) << " at {";
            bool first = true;
            for (const auto& [k, v] : obj.at("best_point").items()) {
                out << (first ? "" : ", ") << k << '=' << text::format_double(v.get<double>());
                first = false;
            }
            out << "}\n";
        } else {
            out << "no successful evaluation\n";
        }
    }
    out << "total queries: " << s.at("total_queries").get<std::size_t>() << '\n';
    out << "iterations: " << s.at("iterations").get<int>() << (s.value("exhausted", false) ? " (space exhausted)" : "")
        << '\n';
    out << "kernel: " << s.value("kernel", std::string("?")) << '\n';
    return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Statistical hardware design-space exploration and performance modeling"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    DseOptions dse;
    auto* c_dse = app.add_subcommand("dse", "multi-model active-learning design-space exploration");
    c_dse->add_option("--manifest", dse.manifest, "design-space manifest");
    c_dse->add_option("--dataset", dse.dataset, "result table to replay (CSV)");
    c_dse->add_option("--synthetic", dse.synthetic, "synthetic evaluator: quadratic_bowl, multimodal, correlated_pair, interaction");
    c_dse->add_option("--objectives", dse.objectives, "comma-separated objectives (default: all)");
    c_dse->add_option("--budget", dse.budget, "maximum evaluator queries")->capture_default_str();
    c_dse->add_option("--n-init", dse.n_init, "initial random batch size")->capture_default_str();
    c_dse->add_option("--candidates-per-model", dse.candidates, "candidates kept per model each iteration")->capture_default_str();
    c_dse->add_option("--pool-size", dse.pool_size, "random candidate pool scored per iteration")->capture_default_str();
    c_dse->add_option("--patience", dse.patience, "stop after this many iterations without improvement")->capture_default_str();
    c_dse->add_option("--beta", dse.beta, "exploration weight on the posterior stddev")->capture_default_str();
    c_dse->add_option("--kernel", dse.kernel, "se, matern32 or matern52")->capture_default_str();
    c_dse->add_option("--length-scale", dse.length_scale, "kernel length scale on normalized inputs")->capture_default_str();
    c_dse->add_option("--noise-variance", dse.noise_variance, "GP noise variance (standardized scale)")->capture_default_str();
    c_dse->add_option("--transfer-from", dse.transfer_from, "source GP model file for transfer learning");
    c_dse->add_option("--lambda1", dse.lambda1, "initial source-mean weight (decays linearly to 0)")->capture_default_str();
    c_dse->add_option("--lambda2", dse.lambda2, "initial source-covariance weight")->capture_default_str();
    c_dse->add_option("--transfer-objective", dse.transfer_objective, "objective receiving the transfer (default: first)");
    c_dse->add_option("--seed", dse.seed, "random seed")->capture_default_str();
    c_dse->add_option("--out", dse.out, "output directory")->capture_default_str();

    BootstrapOptions bs;
    auto* c_bs = app.add_subcommand("bootstrap", "simulate a dataset from a saved GP model");
    c_bs->add_option("--model", bs.model, "GP model file");
    c_bs->add_option("--manifest", bs.manifest, "design-space manifest");
    c_bs->add_option("--n-points", bs.n_points, "number of simulated points")->capture_default_str();
    c_bs->add_option("--noise-mode", bs.noise_mode, "mean or joint")->capture_default_str();
    c_bs->add_option("--queries", bs.queries, "CSV whose parameter columns give the query points");
    c_bs->add_option("--seed", bs.seed, "random seed")->capture_default_str();
    c_bs->add_option("--out", bs.out, "output directory")->capture_default_str();

    RegressOptions rg;
    auto* c_rg = app.add_subcommand("regress", "fit a performance-prediction model");
    c_rg->add_option("--dataset", rg.dataset, "training dataset CSV");
    c_rg->add_option("--manifest", rg.manifest, "design-space manifest");
    c_rg->add_option("--objectives", rg.objectives, "objective column (default: first)");
    c_rg->add_option("--model", rg.model, "linear, lasso or forest")->capture_default_str();
    c_rg->add_option("--test-dataset", rg.test_dataset, "evaluate on this dataset instead of a held-out split");
    c_rg->add_option("--test-fraction", rg.test_fraction, "held-out fraction")->capture_default_str();
    c_rg->add_option("--n-lambdas", rg.n_lambdas, "LASSO grid size")->capture_default_str();
    c_rg->add_option("--n-trees", rg.n_trees, "forest size")->capture_default_str();
    c_rg->add_option("--max-depth", rg.max_depth, "tree depth limit (negative: none)")->capture_default_str();
    c_rg->add_option("--min-leaf", rg.min_leaf, "minimum rows per leaf")->capture_default_str();
    c_rg->add_option("--features-per-split", rg.features_per_split, "features tried per split (0: ceil(p/3))")->capture_default_str();
    c_rg->add_option("--data-source", rg.data_source, "label recorded in metrics.json (default: dataset file stem)");
    c_rg->add_option("--seed", rg.seed, "random seed")->capture_default_str();
    c_rg->add_option("--out", rg.out, "output directory")->capture_default_str();

    ParetoOptions pa;
    auto* c_pa = app.add_subcommand("pareto", "extract the Pareto frontier of a dataset");
    c_pa->add_option("--dataset", pa.dataset, "dataset CSV");
    c_pa->add_option("--manifest", pa.manifest, "design-space manifest with objective directions");
    c_pa->add_option("--objectives", pa.objectives, "comma-separated objectives (default: all)");
    c_pa->add_option("--provenance", pa.provenance, "evaluated or surrogate")->capture_default_str();
    c_pa->add_option("--out", pa.out, "output directory")->capture_default_str();

    ReportOptions rp;
    auto* c_rp = app.add_subcommand("report", "summarize a dse output directory");
    c_rp->add_option("--run-dir,--out", rp.run_dir, "dse output directory");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: category=configuration message=" << e.what() << '\n';
        return 2;
    }

    try {
        if (c_dse->parsed()) return cmd_dse(dse, out);
        if (c_bs->parsed()) return cmd_bootstrap(bs, out);
        if (c_rg->parsed()) return cmd_regress(rg, out);
        if (c_pa->parsed()) return cmd_pareto(pa, out);
        if (c_rp->parsed()) return cmd_report(rp, out);
    } catch (const Error& e) {
        err << "error: category=" << category_name(e.category()) << " message=" << e.what() << '\n';
        return exit_code(e.category());
    } catch (const std::exception& e) {
        err << "error: category=internal message=" << e.what() << '\n';
        return 1;
    }
    return 1;
}

}  // namespace hwdse::cli
