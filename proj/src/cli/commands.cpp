#include "gel/cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <ctime>
#include <exception>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "gel/errors.hpp"
#include "gel/graph/synthetic.hpp"
#include "gel/io/checkpoint.hpp"
#include "gel/random.hpp"
#include "gel/scoring/metrics.hpp"
#include "gel/scoring/score.hpp"
#include "gel/training/train.hpp"

namespace gel::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::uint64_t kSweepCorruptionStream = 0x5EE9;

std::string timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm utc{};
    gmtime_r(&now, &utc);
    std::ostringstream s;
    s << std::put_time(&utc, "%Y-%m-%dT%H:%M:%SZ");
    return s.str();
}

/// Timestamped progress lines, kept apart from the reproducible artifacts.
class RunLog {
public:
    explicit RunLog(const fs::path& dir) : out_(dir / "run.log", std::ios::trunc) {
        if (!out_) throw IoError("cannot write " + (dir / "run.log").string());
    }

    void line(const std::string& text) { out_ << timestamp() << ' ' << text << '\n' << std::flush; }

private:
    std::ofstream out_;
};

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << j.dump(2) << '\n';
    if (!out) throw IoError("failed writing " + path.string());
}

json read_json(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ContractError(path.string() + ": invalid JSON: " + e.what());
    }
}

/// Parses "0,0.1,0.5" into numbers; an empty string is an empty grid.
std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> out;
    std::stringstream in(text);
    for (std::string item; std::getline(in, item, ',');) {
        double v = 0.0;
        const char* end = item.data() + item.size();
        const auto [ptr, ec] = std::from_chars(item.data(), end, v);
        if (ec != std::errc{} || ptr != end) throw ContractError("sweep grid value '" + item + "' is not a number");
        out.push_back(v);
    }
    return out;
}

/// Recursive object merge; non-object values in `patch` replace `base`.
void merge(json& base, const json& patch) {
    if (!patch.is_object() || !base.is_object()) {
        base = patch;
        return;
    }
    for (const auto& [key, value] : patch.items()) {
        if (base.contains(key) && base[key].is_object() && value.is_object()) {
            merge(base[key], value);
        } else {
            base[key] = value;
        }
    }
}

json default_config(const std::string& command) {
    return {
        {"command", command},
        {"seed", 0},
        {"out_dir", "."},
        {"workers", 1},
        {"checkpoint", nullptr},
        {"data", {{"features", nullptr}, {"edges", nullptr}, {"labels", nullptr}}},
        {"synthetic", to_json(SyntheticConfig{})},
        {"train", to_json(TrainConfig{})},
        {"score", {{"weights", to_json(ScoreWeights{})}, {"k", nullptr}, {"metrics", false}, {"baseline", false}}},
        {"sweep", {{"grid", "dropout"}, {"values", json::array({0.0, 0.1, 0.3, 0.5})}, {"seeds", 5}}},
    };
}

fs::path out_dir(const json& cfg) {
    fs::path dir = cfg.at("out_dir").get<std::string>();
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
    return dir;
}

std::optional<fs::path> optional_path(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return fs::path(j.at(key).get<std::string>());
}

TrainConfig train_config(const json& cfg) {
    TrainConfig tc = train_config_from_json(cfg.at("train"));
    tc.seed = cfg.at("seed").get<std::uint64_t>();
    tc.validate();
    return tc;
}

SyntheticConfig synthetic_config(const json& cfg) {
    SyntheticConfig sc = synthetic_config_from_json(cfg.at("synthetic"));
    sc.seed = cfg.at("seed").get<std::uint64_t>();
    sc.validate();
    return sc;
}

bool has_data(const json& cfg) { return optional_path(cfg.at("data"), "features").has_value(); }

AttributedGraph load_data(const json& cfg) {
    const json& data = cfg.at("data");
    const auto features = optional_path(data, "features");
    const auto edges = optional_path(data, "edges");
    if (!features || !edges) throw ContractError("data.features and data.edges are required");
    return load_graph(*features, *edges, optional_path(data, "labels"));
}

Index resolve_k(const json& score, Index n) {
    if (score.contains("k") && !score.at("k").is_null()) return score.at("k").get<Index>();
    return default_k(n);
}

std::vector<double> to_std(const DenseVector& v) { return {v.data(), v.data() + v.size()}; }

/// One (setting, seed) point of a sweep.
struct SweepJob {
    double value = 0.0;
    std::uint64_t seed = 0;
};

struct SweepResult {
    Metrics gel;
    Metrics baseline;
};

SweepResult run_sweep_job(const json& cfg, const std::string& grid, const SweepJob& job) {
    json local = cfg;
    local["seed"] = job.seed;
    AttributedGraph g = has_data(local) ? load_data(local) : synthesize_graph(synthetic_config(local)).graph;
    if (!g.has_labels()) throw ContractError("sweep requires labelled data");

    TrainConfig tc = train_config(local);
    if (grid == "noise" || grid == "dropout") {
        PerturbationConfig pc;
        pc.noise_sigma = grid == "noise" ? job.value : 0.0;
        pc.edge_dropout = grid == "dropout" ? job.value : 0.0;
        pc.seed = derive_seed(job.seed, kSweepCorruptionStream);
        pc.validate();
        g = corrupt(g, pc, 0);
    } else {
        if (job.value < 1.0 || job.value != std::floor(job.value)) {
            throw ContractError("latent_dim grid values must be positive integers");
        }
        tc.latent_dim = static_cast<Index>(job.value);
    }

    const TrainResult trained = train(g, tc);
    const json& score = local.at("score");
    const ScoreWeights weights = score_weights_from_json(score.at("weights"));
    const AnomalyReport report = anomaly_scores(trained.state, g, weights, tc.pairs, job.seed);
    const Index k = resolve_k(score, g.num_nodes());
    return {evaluate(to_std(report.score), g.labels(), k), evaluate(to_std(report.baseline), g.labels(), k)};
}

} // namespace

json resolve_config(const std::string& command, const Overrides& flags) {
    json cfg = default_config(command);
    if (flags.config) {
        json file = read_json(*flags.config);
        if (!file.is_object()) throw ContractError("config file must hold a JSON object");
        file.erase("command");
        merge(cfg, file);
    }
    if (flags.seed) cfg["seed"] = *flags.seed;
    if (flags.out_dir) cfg["out_dir"] = flags.out_dir->string();
    if (flags.workers) cfg["workers"] = *flags.workers;
    if (flags.metrics) cfg["score"]["metrics"] = true;
    if (flags.baseline) cfg["score"]["baseline"] = true;
    if (flags.k) cfg["score"]["k"] = *flags.k;
    if (flags.features) cfg["data"]["features"] = flags.features->string();
    if (flags.edges) cfg["data"]["edges"] = flags.edges->string();
    if (flags.labels) cfg["data"]["labels"] = flags.labels->string();
    if (flags.checkpoint) cfg["checkpoint"] = flags.checkpoint->string();
    if (flags.epochs) cfg["train"]["epochs"] = *flags.epochs;
    if (flags.learning_rate) cfg["train"]["learning_rate"] = *flags.learning_rate;
    if (flags.latent_dim) cfg["train"]["latent_dim"] = *flags.latent_dim;
    if (flags.grid) cfg["sweep"]["grid"] = *flags.grid;
    if (flags.values) cfg["sweep"]["values"] = *flags.values;
    if (flags.seeds) cfg["sweep"]["seeds"] = *flags.seeds;

    // Canonicalize the typed sections so the echoed config lists every field.
    cfg["synthetic"] = to_json(synthetic_config(cfg));
    TrainConfig tc = train_config(cfg);
    cfg["train"] = to_json(tc);
    cfg["train"].erase("seed");
    cfg["score"]["weights"] = to_json(score_weights_from_json(cfg["score"]["weights"]));
    if (cfg.at("workers").get<int>() < 1) throw ContractError("workers must be >= 1");
    return cfg;
}

void cmd_generate(const json& cfg) {
    const fs::path dir = out_dir(cfg);
    RunLog log(dir);
    const SyntheticConfig sc = synthetic_config(cfg);
    log.line("generate n=" + std::to_string(sc.num_nodes) + " seed=" + std::to_string(sc.seed));
    write_synthetic(synthesize_graph(sc), sc, dir);
    write_json(dir / "resolved_config.json", cfg);
    log.line("done");
}

void cmd_train(const json& cfg) {
    const fs::path dir = out_dir(cfg);
    RunLog log(dir);
    const AttributedGraph g = load_data(cfg);
    const TrainConfig tc = train_config(cfg);
    log.line("train n=" + std::to_string(g.num_nodes()) + " d=" + std::to_string(g.feature_dim()) +
             " epochs=" + std::to_string(tc.epochs) + " config_hash=" + config_hash(tc));
    const auto started = std::chrono::steady_clock::now();
    try {
        const TrainResult result = train(g, tc);
        io::save_checkpoint(dir / "checkpoint.gel", result.state, tc);
        io::write_history_csv(dir / "history.csv", result.history);
    } catch (const NumericalAbort& e) {
        log.line(std::string("aborted: ") + e.what());
        throw;
    }
    write_json(dir / "resolved_config.json", cfg);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    log.line("done in " + format_double(seconds) + " s");
}

void cmd_score(const json& cfg) {
    const fs::path dir = out_dir(cfg);
    RunLog log(dir);
    const auto checkpoint_path = optional_path(cfg, "checkpoint");
    if (!checkpoint_path) throw ContractError("score requires --checkpoint");
    const json& score = cfg.at("score");
    const bool want_metrics = score.at("metrics").get<bool>();
    const bool with_baseline = score.at("baseline").get<bool>();

    const AttributedGraph g = load_data(cfg);
    if (want_metrics && !g.has_labels()) throw ContractError("--metrics requires a labels file");
    const io::Checkpoint ck = io::load_checkpoint(*checkpoint_path);
    const ScoreWeights weights = score_weights_from_json(score.at("weights"));
    log.line("score n=" + std::to_string(g.num_nodes()) + " checkpoint=" + checkpoint_path->string());
    const AnomalyReport report =
        anomaly_scores(ck.state, g, weights, ck.config.pairs, cfg.at("seed").get<std::uint64_t>());
    write_scores_csv(dir / "scores.csv", report, with_baseline);

    if (g.has_labels()) {
        const Index k = resolve_k(score, g.num_nodes());
        json metrics = to_json(evaluate(to_std(report.score), g.labels(), k));
        if (with_baseline) metrics["baseline"] = to_json(evaluate(to_std(report.baseline), g.labels(), k));
        write_json(dir / "metrics.json", metrics);
    }
    const auto uncovered = std::count(report.uncovered.begin(), report.uncovered.end(), true);
    if (uncovered > 0) log.line(std::to_string(uncovered) + " node(s) without evaluated pairs");
    write_json(dir / "resolved_config.json", cfg);
    log.line("done");
}

void cmd_sweep(const json& cfg) {
    const fs::path dir = out_dir(cfg);
    RunLog log(dir);
    const json& sweep = cfg.at("sweep");
    const std::string grid = sweep.at("grid").get<std::string>();
    if (grid != "noise" && grid != "dropout" && grid != "latent_dim") {
        throw ContractError("sweep grid must be noise, dropout or latent_dim");
    }
    const auto values = sweep.at("values").get<std::vector<double>>();
    if (values.empty()) throw ContractError("sweep grid is empty");

    std::vector<std::uint64_t> seeds;
    const std::uint64_t base = cfg.at("seed").get<std::uint64_t>();
    if (sweep.at("seeds").is_array()) {
        seeds = sweep.at("seeds").get<std::vector<std::uint64_t>>();
    } else {
        for (std::uint64_t s = 0; s < sweep.at("seeds").get<std::uint64_t>(); ++s) seeds.push_back(base + s);
    }
    if (seeds.empty()) throw ContractError("sweep needs at least one seed");

    std::vector<SweepJob> jobs;
    for (double v : values) {
        for (std::uint64_t s : seeds) jobs.push_back({v, s});
    }
    std::vector<SweepResult> results(jobs.size());
    std::vector<std::exception_ptr> failures(jobs.size());
    std::atomic<std::size_t> next{0};
    const auto workers = std::min<std::size_t>(cfg.at("workers").get<std::size_t>(), jobs.size());
    log.line("sweep grid=" + grid + " jobs=" + std::to_string(jobs.size()) + " workers=" + std::to_string(workers));

    auto worker = [&] {
        for (std::size_t j = next++; j < jobs.size(); j = next++) {
            try {
                results[j] = run_sweep_job(cfg, grid, jobs[j]);
            } catch (...) {
                failures[j] = std::current_exception();
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
        worker();
    }
    for (const auto& f : failures) {
        if (f) std::rethrow_exception(f);
    }

    std::ofstream out(dir / "sweep.csv", std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + (dir / "sweep.csv").string());
    out << "grid,value,seed,scorer,auc,recall_at_k,k\n";
    for (const char* scorer : {"gel", "baseline"}) {
        for (std::size_t j = 0; j < jobs.size(); ++j) {
            const Metrics& m = std::string_view(scorer) == "gel" ? results[j].gel : results[j].baseline;
            out << grid << ',' << format_double(jobs[j].value) << ',' << jobs[j].seed << ',' << scorer << ','
                << format_double(m.auc) << ',' << format_double(m.recall_at_k) << ',' << m.k << '\n';
        }
    }
    if (!out) throw IoError("failed writing sweep.csv");
    write_json(dir / "resolved_config.json", cfg);
    log.line("done");
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Evidential graph autoencoder for anomaly detection"};
    app.require_subcommand(1);
    Overrides flags;
    std::string config;
    std::string out_dir_flag;
    std::string features;
    std::string edges;
    std::string labels;
    std::string checkpoint;
    std::string values_text;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", config, "JSON config file");
        sub->add_option("--seed", flags.seed, "Master seed");
        sub->add_option("--out-dir", out_dir_flag, "Output directory");
    };
    auto data = [&](CLI::App* sub) {
        sub->add_option("--features", features, "Feature CSV");
        sub->add_option("--edges", edges, "Edge CSV");
        sub->add_option("--labels", labels, "Label CSV");
    };
    auto training = [&](CLI::App* sub) {
        sub->add_option("--epochs", flags.epochs, "Training epochs");
        sub->add_option("--lr", flags.learning_rate, "Learning rate");
        sub->add_option("--latent-dim", flags.latent_dim, "Latent width d'");
    };

    CLI::App* generate = app.add_subcommand("generate", "Write a synthetic anomaly-injected graph");
    common(generate);

    CLI::App* train_cmd = app.add_subcommand("train", "Train a model and write a checkpoint");
    common(train_cmd);
    data(train_cmd);
    training(train_cmd);

    CLI::App* score = app.add_subcommand("score", "Score nodes with a trained checkpoint");
    common(score);
    data(score);
    score->add_option("--checkpoint", checkpoint, "Checkpoint file");
    score->add_flag("--metrics", flags.metrics, "Require labels and write metrics.json");
    score->add_flag("--baseline", flags.baseline, "Add the all-zero-weight score column");
    score->add_option("--k", flags.k, "Recall@K cut-off");

    CLI::App* sweep = app.add_subcommand("sweep", "Train and score over a perturbation or latent-width grid");
    common(sweep);
    data(sweep);
    training(sweep);
    sweep->add_option("--workers", flags.workers, "Parallel training runs");
    sweep->add_option("--k", flags.k, "Recall@K cut-off");
    sweep->add_option("--grid", flags.grid, "noise, dropout or latent_dim");
    CLI::Option* values_opt = sweep->add_option("--values", values_text, "Comma-separated grid values");
    sweep->add_option("--seeds", flags.seeds, "Number of consecutive seeds");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kUsage;
    }

    if (!config.empty()) flags.config = config;
    if (!out_dir_flag.empty()) flags.out_dir = out_dir_flag;
    if (!features.empty()) flags.features = features;
    if (!edges.empty()) flags.edges = edges;
    if (!labels.empty()) flags.labels = labels;
    if (!checkpoint.empty()) flags.checkpoint = checkpoint;

    const std::string name = app.get_subcommands().front()->get_name();
    try {
        if (values_opt->count() > 0) flags.values = parse_grid(values_text);
        const json cfg = resolve_config(name, flags);
        if (name == "generate") cmd_generate(cfg);
        if (name == "train") cmd_train(cfg);
        if (name == "score") cmd_score(cfg);
        if (name == "sweep") cmd_sweep(cfg);
        out << name << ": wrote " << cfg.at("out_dir").get<std::string>() << '\n';
        return kSuccess;
    } catch (const NumericalAbort& e) {
        err << "error: " << e.what() << '\n';
        return kNumerical;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kIo;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kIo;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kIo;
    } catch (const json::exception& e) {
        err << "error: invalid config: " << e.what() << '\n';
        return kUsage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::domain_error& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kInternal;
    }
}

} // namespace gel::cli
