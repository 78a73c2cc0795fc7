#include "cli.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tanhshift/bias_analysis.hpp"
#include "tanhshift/eval_stats.hpp"
#include "tanhshift/mode_solver.hpp"
#include "tanhshift/run_record.hpp"
#include "tanhshift/sac.hpp"
#include "tanhshift/squashed_gaussian.hpp"
#include "tanhshift/toy_env.hpp"

namespace tanhshift::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

void write_text_file(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << text;
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::pair<std::uint64_t, std::uint64_t> parse_seed_range(const std::string& text) {
    const auto dash = text.find('-');
    try {
        if (dash == std::string::npos) {
            const std::uint64_t v = std::stoull(text);
            return {v, v};
        }
        const std::uint64_t a = std::stoull(text.substr(0, dash));
        const std::uint64_t b = std::stoull(text.substr(dash + 1));
        if (a > b) throw std::runtime_error("empty range");
        return {a, b};
    } catch (const std::exception&) {
        throw std::runtime_error("invalid seed range (expected a or a-b): " + text);
    }
}

const CLI::Validator SeedRange(
    [](std::string& input) -> std::string {
        try {
            parse_seed_range(input);
            return {};
        } catch (const std::exception& e) {
            return e.what();
        }
    },
    "SEEDRANGE");

json mode_result_json(const ModeResult& r) {
    return json{{"y_star", r.y_star},
                {"t_star", r.t_star},
                {"density_at_mode", r.density_at_mode},
                {"method", r.method == ModeMethod::GridScan ? "grid" : "analytic"},
                {"evaluations", r.evaluations}};
}

// ---- pdf ----

struct PdfParams {
    double mu = 0.0;
    double sigma = 0.5;
    std::size_t points = 2001;
    std::string out = "pdf.csv";
};

void run_pdf(const PdfParams& p) {
    const SquashedGaussian1D dist(p.mu, p.sigma);
    const auto rows = density_curve(dist, p.points);
    const json echo{{"subcommand", "pdf"},
                    {"mu", p.mu},
                    {"sigma", p.sigma},
                    {"points", p.points},
                    {"out", p.out}};
    std::ostringstream ss;
    write_curves_csv(ss, rows, "pdf", echo.dump());
    write_text_file(p.out, ss.str());
    std::cout << "wrote " << p.out << " (" << rows.size() << " rows)\n";
}

// ---- mode ----

struct ModeParams {
    double mu = 0.0;
    double sigma = 0.5;
    std::string method = "both";
    std::string out;
};

void run_mode(const ModeParams& p) {
    const SquashedGaussian1D dist(p.mu, p.sigma);
    const json echo{{"subcommand", "mode"},
                    {"mu", p.mu},
                    {"sigma", p.sigma},
                    {"method", p.method}};
    json j{{"config", echo}, {"mu", p.mu}, {"sigma", p.sigma}};

    std::optional<ModeResult> analytic, grid;
    if (p.method == "analytic" || p.method == "both") analytic = analytic_mode(dist);
    if (p.method == "grid" || p.method == "both") grid = grid_mode(dist);
    if (grid) j["grid"] = mode_result_json(*grid);
    if (analytic) j["analytic"] = mode_result_json(*analytic);

    const double naive = naive_action(dist);
    const double y_star = analytic ? analytic->y_star : grid->y_star;
    j["naive_action"] = naive;
    j["bias"] = std::fabs(y_star - naive);

    const std::string text = j.dump(2);
    std::cout << text << '\n';
    if (!p.out.empty()) write_text_file(p.out, text + "\n");
}

// ---- bias-sweep ----

struct SweepParams {
    std::vector<std::size_t> dims;
    double mu = 1.0;
    double sigma = 0.5;
    std::string out = "scaling.csv";
};

void run_sweep(const SweepParams& p) {
    const auto rows = bias_scaling_sweep(p.dims, p.mu, p.sigma);
    const json echo{{"subcommand", "bias-sweep"},
                    {"dims", p.dims},
                    {"mu", p.mu},
                    {"sigma", p.sigma},
                    {"out", p.out}};
    std::ostringstream ss;
    write_scaling_csv(ss, rows, echo.dump());
    write_text_file(p.out, ss.str());
    std::cout << "wrote " << p.out << " (" << rows.size() << " rows)\n";
}

// ---- mc-check ----

struct McParams {
    double mu = 1.0;
    double sigma = 0.5;
    std::size_t samples = 1000000;
    std::size_t bins = 200;
    std::uint64_t seed = 0;
    std::string out;
    std::string csv;
};

void run_mc(const McParams& p) {
    const SquashedGaussian1D dist(p.mu, p.sigma);
    const McReport report = mc_density_check(dist, p.samples, p.bins, p.seed);
    const json echo{{"subcommand", "mc-check"}, {"mu", p.mu},     {"sigma", p.sigma},
                    {"samples", p.samples},     {"bins", p.bins}, {"seed", p.seed}};
    const json j{{"config", echo},
                 {"mu", report.mu},
                 {"sigma", report.sigma},
                 {"n_samples", report.n_samples},
                 {"n_bins", report.n_bins},
                 {"l1_distance", report.l1_distance},
                 {"empirical_mode_bin_center", report.empirical_mode_bin_center},
                 {"analytic_mode", report.analytic_mode},
                 {"seed", report.seed}};
    const std::string text = j.dump(2);
    std::cout << text << '\n';
    if (!p.out.empty()) write_text_file(p.out, text + "\n");
    if (!p.csv.empty()) {
        std::ostringstream ss;
        write_mc_csv(ss, std::span<const McReport>(&report, 1), echo.dump());
        write_text_file(p.csv, ss.str());
    }
}

// ---- figures ----

struct FigureParams {
    std::string preset = "shift";
    std::string out_dir = ".";
};

void run_figures(const FigureParams& p) {
    const FigurePreset preset = parse_preset(p.preset);
    const FigureData fig = figure_data(preset);
    const json echo{{"subcommand", "figures"}, {"preset", p.preset}, {"out_dir", p.out_dir}};
    const std::string token(preset_token(preset));
    fs::create_directories(p.out_dir);

    if (!fig.curves.empty()) {
        std::ostringstream ss;
        write_curves_csv(ss, fig.curves, token, echo.dump());
        const fs::path path = fs::path(p.out_dir) / ("curves_" + token + ".csv");
        write_text_file(path, ss.str());
        std::cout << "wrote " << path.string() << '\n';
    }
    if (!fig.points.empty()) {
        std::ostringstream ss;
        write_points_csv(ss, fig.points, token, echo.dump());
        const fs::path path = fs::path(p.out_dir) / ("points_" + token + ".csv");
        write_text_file(path, ss.str());
        std::cout << "wrote " << path.string() << '\n';
    }
    if (!fig.surface.empty()) {
        std::ostringstream ss;
        write_surface_csv(ss, fig, echo.dump());
        const fs::path path = fs::path(p.out_dir) / ("surface_" + token + ".csv");
        write_text_file(path, ss.str());
        std::cout << "wrote " << path.string() << '\n';
    }
}

// ---- train ----

struct TrainParams {
    std::string mode = "standard";
    std::string seeds = "0-4";
    std::size_t env_d = 0;     // 0 = keep default/config value
    long steps = -1;           // -1 = keep default/config value
    std::string config_file;
    bool grid_inference = false;
    unsigned jobs = 1;
    std::string out_dir = ".";
};

void merge_env_config(EnvConfig& cfg, const json& j) {
    for (const auto& [key, value] : j.items()) {
        if (key == "d") cfg.d = value.get<std::size_t>();
        else if (key == "horizon") cfg.horizon = value.get<int>();
        else if (key == "boundary_frac") cfg.boundary_frac = value.get<double>();
        else if (key == "decay") cfg.decay = value.get<double>();
        else if (key == "process_noise") cfg.process_noise = value.get<double>();
        else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
        else throw std::runtime_error("unknown env config key: " + key);
    }
}

void merge_sac_config(SacConfig& cfg, const json& j) {
    for (const auto& [key, value] : j.items()) {
        if (key == "actor_lr") cfg.actor_lr = value.get<double>();
        else if (key == "critic_lr") cfg.critic_lr = value.get<double>();
        else if (key == "temperature_lr") cfg.temperature_lr = value.get<double>();
        else if (key == "discount") cfg.discount = value.get<double>();
        else if (key == "polyak") cfg.polyak = value.get<double>();
        else if (key == "batch_size") cfg.batch_size = value.get<std::size_t>();
        else if (key == "start_steps") cfg.start_steps = value.get<long>();
        else if (key == "max_steps") cfg.max_steps = value.get<long>();
        else if (key == "eval_interval") cfg.eval_interval = value.get<long>();
        else if (key == "eval_episodes") cfg.eval_episodes = value.get<std::size_t>();
        else if (key == "hidden_dims") cfg.hidden_dims = value.get<std::vector<std::size_t>>();
        else if (key == "target_entropy") {
            cfg.target_entropy =
                value.is_null() ? std::optional<double>{} : std::optional<double>{value.get<double>()};
        } else if (key == "replay_capacity") cfg.replay_capacity = value.get<std::size_t>();
        else if (key == "seed_begin") cfg.seed_begin = value.get<std::uint64_t>();
        else if (key == "seed_end") cfg.seed_end = value.get<std::uint64_t>();
        else if (key == "inference_mode") {
            cfg.inference_mode = parse_inference_mode(value.get<std::string>());
        } else if (key == "grid_inference") cfg.grid_inference = value.get<bool>();
        else throw std::runtime_error("unknown sac config key: " + key);
    }
}

void run_train(const TrainParams& p, const std::map<std::string, bool>& flag_given) {
    EnvConfig env_cfg;
    SacConfig sac_cfg;

    if (!p.config_file.empty()) {
        std::ifstream in(p.config_file);
        if (!in) throw std::runtime_error("cannot read config file: " + p.config_file);
        json j;
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw std::runtime_error("config file " + p.config_file + ": " + e.what());
        }
        for (const auto& [key, value] : j.items()) {
            if (key == "env") merge_env_config(env_cfg, value);
            else if (key == "sac") merge_sac_config(sac_cfg, value);
            else throw std::runtime_error("unknown config section: " + key);
        }
    }

    // Explicit flags override config-file values.
    if (flag_given.at("mode")) sac_cfg.inference_mode = parse_inference_mode(p.mode);
    if (flag_given.at("seeds")) {
        const auto [lo, hi] = parse_seed_range(p.seeds);
        sac_cfg.seed_begin = lo;
        sac_cfg.seed_end = hi;
    }
    if (p.env_d > 0) env_cfg.d = p.env_d;
    if (p.steps >= 0) sac_cfg.max_steps = p.steps;
    if (p.grid_inference) sac_cfg.grid_inference = true;

    validate(env_cfg);
    validate(sac_cfg);
    fs::create_directories(p.out_dir);

    const std::size_t n_seeds = static_cast<std::size_t>(sac_cfg.seed_end - sac_cfg.seed_begin) + 1;
    std::vector<RunRecord> records(n_seeds);
    std::vector<TrainStats> stats(n_seeds);
    std::vector<std::exception_ptr> failures(n_seeds);

    const unsigned workers = std::max(1u, std::min<unsigned>(p.jobs, static_cast<unsigned>(n_seeds)));
    std::atomic<std::size_t> cursor{0};
    const auto worker = [&] {
        for (;;) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= n_seeds) return;
            try {
                records[i] = train(env_cfg, sac_cfg, sac_cfg.seed_begin + i, &stats[i]);
            } catch (...) {
                failures[i] = std::current_exception();
            }
        }
    };
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }
    for (const std::exception_ptr& failure : failures) {
        if (failure) std::rethrow_exception(failure);
    }

    // Deterministic merge: outputs written in seed order.
    for (std::size_t i = 0; i < n_seeds; ++i) {
        const RunRecord& record = records[i];
        const fs::path path =
            fs::path(p.out_dir) / run_record_filename(sac_cfg.inference_mode, record.seed);
        save_run_record(path, record);
        double final_iqm = 0.0;
        if (!record.checkpoints.empty()) final_iqm = iqm(record.checkpoints.back().normalized);
        std::cout << "wrote " << path.string() << " (checkpoints=" << record.checkpoints.size()
                  << ", final_norm_iqm=" << final_iqm
                  << ", dominance_violations=" << stats[i].dominance_violations << ")\n";
    }
}

// ---- stats ----

struct StatsParams {
    std::string runs_dir;
    std::string metric = "all";
    std::vector<double> taus;
    std::uint64_t seed = 0;
    std::size_t n_boot = 2000;
    double level = 0.95;
    std::string out_dir = ".";
};

void run_stats(const StatsParams& p) {
    std::vector<fs::path> files;
    if (!fs::is_directory(p.runs_dir)) {
        throw std::runtime_error("runs directory does not exist: " + p.runs_dir);
    }
    for (const auto& entry : fs::directory_iterator(p.runs_dir)) {
        if (!entry.is_regular_file()) continue;
        const std::string name = entry.path().filename().string();
        if (name.rfind("run_", 0) == 0 && entry.path().extension() == ".json") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) {
        throw std::runtime_error("no run_*.json records found in " + p.runs_dir);
    }

    std::map<std::string, std::vector<RunRecord>> groups;
    for (const fs::path& file : files) {
        RunRecord record = load_run_record(file);
        if (record.checkpoints.empty()) {
            throw std::runtime_error("run record has no checkpoints: " + file.string());
        }
        groups[std::string(inference_mode_token(record.sac_config.inference_mode))]
            .push_back(std::move(record));
    }

    std::vector<double> taus = p.taus;
    if (taus.empty()) {
        for (int i = 0; i <= 20; ++i) taus.push_back(i / 20.0);
    }

    std::vector<AggregateMetric> metrics;
    if (p.metric == "all") {
        metrics = {AggregateMetric::Iqm, AggregateMetric::Median, AggregateMetric::Mean};
    } else {
        metrics = {parse_metric(p.metric)};
    }

    fs::create_directories(p.out_dir);
    for (auto& [group, records] : groups) {
        std::sort(records.begin(), records.end(),
                  [](const RunRecord& a, const RunRecord& b) { return a.seed < b.seed; });

        ScoreMatrix final_scores;
        for (const RunRecord& record : records) {
            final_scores.scores.push_back(record.checkpoints.back().normalized);
        }

        const json echo{{"subcommand", "stats"}, {"runs", p.runs_dir}, {"group", group},
                        {"metric", p.metric},    {"taus", taus},       {"n_boot", p.n_boot},
                        {"level", p.level},      {"seed", p.seed},     {"out_dir", p.out_dir}};

        std::vector<std::pair<std::string, IntervalEstimate>> aggregate_rows;
        for (const AggregateMetric metric : metrics) {
            aggregate_rows.emplace_back(
                std::string(metric_token(metric)),
                stratified_bootstrap_ci(metric, final_scores, p.n_boot, p.level, p.seed));
        }
        {
            std::ostringstream ss;
            write_aggregate_csv(ss, aggregate_rows, echo.dump());
            write_text_file(fs::path(p.out_dir) / ("aggregate_" + group + ".csv"), ss.str());
        }
        {
            const auto profile = performance_profile(final_scores, taus);
            std::ostringstream ss;
            write_profile_csv(ss, profile, echo.dump());
            write_text_file(fs::path(p.out_dir) / ("profile_" + group + ".csv"), ss.str());
        }
        {
            std::vector<RunCurve> curves;
            for (const RunRecord& record : records) {
                RunCurve curve;
                for (const Checkpoint& cp : record.checkpoints) {
                    curve.steps.push_back(cp.env_steps);
                    curve.scores.push_back(cp.normalized);
                }
                curves.push_back(std::move(curve));
            }
            const auto efficiency = sample_efficiency(curves, p.n_boot, p.level, p.seed);
            std::ostringstream ss;
            write_efficiency_csv(ss, efficiency, echo.dump());
            write_text_file(fs::path(p.out_dir) / ("efficiency_" + group + ".csv"), ss.str());
        }

        const IntervalEstimate headline = aggregate_rows.front().second;
        std::cout << group << ": runs=" << records.size() << " final "
                  << aggregate_rows.front().first << "=" << headline.point << " ci=["
                  << headline.lo << ", " << headline.hi << "]\n";
    }
}

}  // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"tanh-squashed Gaussian analysis and desk-scale SAC comparison toolkit"};
    app.require_subcommand(1);

    auto pdf_params = std::make_shared<PdfParams>();
    CLI::App* pdf = app.add_subcommand("pdf", "Emit density curves for one (mu, sigma) as CSV");
    pdf->add_option("--mu", pdf_params->mu, "Gaussian mean")->required();
    pdf->add_option("--sigma", pdf_params->sigma, "Gaussian std dev")
        ->required()
        ->check(CLI::PositiveNumber);
    pdf->add_option("--points", pdf_params->points, "Curve sample count")
        ->capture_default_str()
        ->check(CLI::Range(std::size_t{2}, std::size_t{10000000}));
    pdf->add_option("-o,--out", pdf_params->out, "Output CSV path")->capture_default_str();
    pdf->callback([pdf_params] { run_pdf(*pdf_params); });

    auto mode_params = std::make_shared<ModeParams>();
    CLI::App* mode = app.add_subcommand("mode", "Report the transformed-density mode as JSON");
    mode->add_option("--mu", mode_params->mu, "Gaussian mean")->required();
    mode->add_option("--sigma", mode_params->sigma, "Gaussian std dev")
        ->required()
        ->check(CLI::PositiveNumber);
    mode->add_option("--method", mode_params->method, "Mode solver selection")
        ->capture_default_str()
        ->check(CLI::IsMember({"grid", "analytic", "both"}));
    mode->add_option("-o,--out", mode_params->out, "Optional JSON output path");
    mode->callback([mode_params] { run_mode(*mode_params); });

    auto sweep_params = std::make_shared<SweepParams>();
    CLI::App* sweep =
        app.add_subcommand("bias-sweep", "Bias norms across dimensionalities as CSV");
    sweep->add_option("--dims", sweep_params->dims, "Ascending dimension counts (comma separated)")
        ->required()
        ->delimiter(',');
    sweep->add_option("--mu", sweep_params->mu, "Per-dimension mean")->capture_default_str();
    sweep->add_option("--sigma", sweep_params->sigma, "Per-dimension std dev")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    sweep->add_option("-o,--out", sweep_params->out, "Output CSV path")->capture_default_str();
    sweep->callback([sweep_params] {
        if (sweep_params->dims.empty() ||
            !std::is_sorted(sweep_params->dims.begin(), sweep_params->dims.end()) ||
            sweep_params->dims.front() == 0) {
            throw CLI::ValidationError("--dims", "must be positive and ascending");
        }
        run_sweep(*sweep_params);
    });

    auto mc_params = std::make_shared<McParams>();
    CLI::App* mc = app.add_subcommand("mc-check", "Monte Carlo density validation as JSON");
    mc->add_option("--mu", mc_params->mu, "Gaussian mean")->required();
    mc->add_option("--sigma", mc_params->sigma, "Gaussian std dev")
        ->required()
        ->check(CLI::PositiveNumber);
    mc->add_option("--samples", mc_params->samples, "Sample count (>= 10000)")
        ->capture_default_str()
        ->check(CLI::Range(std::size_t{10000}, std::size_t{1000000000}));
    mc->add_option("--bins", mc_params->bins, "Histogram bins (>= 20)")
        ->capture_default_str()
        ->check(CLI::Range(std::size_t{20}, std::size_t{1000000}));
    mc->add_option("--seed", mc_params->seed, "Sampling seed")->capture_default_str();
    mc->add_option("-o,--out", mc_params->out, "Optional JSON output path");
    mc->add_option("--csv", mc_params->csv, "Optional one-row CSV output path");
    mc->callback([mc_params] { run_mc(*mc_params); });

    auto fig_params = std::make_shared<FigureParams>();
    CLI::App* figures = app.add_subcommand("figures", "Emit preset curve/point CSV data files");
    figures->add_option("--preset", fig_params->preset, "Data preset")
        ->required()
        ->check(CLI::IsMember({"motivation", "shift", "bias-points", "2d"}));
    figures->add_option("--out-dir", fig_params->out_dir, "Output directory")
        ->capture_default_str();
    figures->callback([fig_params] { run_figures(*fig_params); });

    auto train_params = std::make_shared<TrainParams>();
    CLI::App* train_cmd = app.add_subcommand("train", "Train SAC runs and write run records");
    CLI::Option* mode_opt =
        train_cmd->add_option("--mode", train_params->mode, "Inference mode for evaluation")
            ->capture_default_str()
            ->check(CLI::IsMember({"standard", "corrected"}));
    CLI::Option* seeds_opt =
        train_cmd->add_option("--seeds", train_params->seeds, "Seed or inclusive range a-b")
            ->capture_default_str()
            ->check(SeedRange);
    train_cmd->add_option("--env-d", train_params->env_d, "Environment action dimensionality")
        ->check(CLI::Range(std::size_t{1}, std::size_t{4096}));
    train_cmd->add_option("--steps", train_params->steps, "Total environment steps")
        ->check(CLI::Range(0L, 2000000000L));
    train_cmd->add_option("--config", train_params->config_file,
                          "JSON config file ({\"env\": {...}, \"sac\": {...}})");
    train_cmd->add_flag("--grid-inference", train_params->grid_inference,
                        "Corrected inference uses the grid scan (fidelity runs)");
    train_cmd->add_option("--jobs", train_params->jobs, "Concurrent seed runs")
        ->capture_default_str()
        ->check(CLI::Range(1u, 256u));
    train_cmd->add_option("--out-dir", train_params->out_dir, "Output directory")
        ->capture_default_str();
    train_cmd->callback([train_params, mode_opt, seeds_opt] {
        const std::map<std::string, bool> flag_given{{"mode", mode_opt->count() > 0},
                                                     {"seeds", seeds_opt->count() > 0}};
        run_train(*train_params, flag_given);
    });

    auto stats_params = std::make_shared<StatsParams>();
    CLI::App* stats = app.add_subcommand("stats", "Aggregate run records into evaluation CSVs");
    stats->add_option("--runs", stats_params->runs_dir, "Directory of run_*.json records")
        ->required();
    stats->add_option("--metric", stats_params->metric, "Aggregate metric selection")
        ->capture_default_str()
        ->check(CLI::IsMember({"iqm", "median", "mean", "all"}));
    stats->add_option("--taus", stats_params->taus,
                      "Performance profile thresholds (comma separated)")
        ->delimiter(',');
    stats->add_option("--seed", stats_params->seed, "Bootstrap seed")->capture_default_str();
    stats->add_option("--n-boot", stats_params->n_boot, "Bootstrap replicates")
        ->capture_default_str()
        ->check(CLI::Range(std::size_t{100}, std::size_t{1000000}));
    stats->add_option("--level", stats_params->level, "Confidence level")
        ->capture_default_str()
        ->check(CLI::Range(0.01, 0.999));
    stats->add_option("--out-dir", stats_params->out_dir, "Output directory")
        ->capture_default_str();
    stats->callback([stats_params] {
        if (!stats_params->taus.empty() &&
            !std::is_sorted(stats_params->taus.begin(), stats_params->taus.end())) {
            throw CLI::ValidationError("--taus", "must be ascending");
        }
        run_stats(*stats_params);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace tanhshift::cli
