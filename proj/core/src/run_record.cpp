#include "tanhshift/run_record.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace tanhshift {

namespace {

using nlohmann::json;

json env_to_json(const EnvConfig& cfg) {
    return json{{"d", cfg.d},
                {"horizon", cfg.horizon},
                {"boundary_frac", cfg.boundary_frac},
                {"decay", cfg.decay},
                {"process_noise", cfg.process_noise},
                {"seed", cfg.seed}};
}

EnvConfig env_from_json(const json& j) {
    EnvConfig cfg;
    cfg.d = j.at("d").get<std::size_t>();
    cfg.horizon = j.at("horizon").get<int>();
    cfg.boundary_frac = j.at("boundary_frac").get<double>();
    cfg.decay = j.at("decay").get<double>();
    cfg.process_noise = j.at("process_noise").get<double>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    return cfg;
}

json sac_to_json(const SacConfig& cfg) {
    json j{{"actor_lr", cfg.actor_lr},
           {"critic_lr", cfg.critic_lr},
           {"temperature_lr", cfg.temperature_lr},
           {"discount", cfg.discount},
           {"polyak", cfg.polyak},
           {"batch_size", cfg.batch_size},
           {"start_steps", cfg.start_steps},
           {"max_steps", cfg.max_steps},
           {"eval_interval", cfg.eval_interval},
           {"eval_episodes", cfg.eval_episodes},
           {"hidden_dims", cfg.hidden_dims},
           {"replay_capacity", cfg.replay_capacity},
           {"seed_begin", cfg.seed_begin},
           {"seed_end", cfg.seed_end},
           {"inference_mode", std::string(inference_mode_token(cfg.inference_mode))},
           {"grid_inference", cfg.grid_inference}};
    if (cfg.target_entropy.has_value()) {
        j["target_entropy"] = *cfg.target_entropy;
    } else {
        j["target_entropy"] = nullptr;
    }
    return j;
}

SacConfig sac_from_json(const json& j) {
    SacConfig cfg;
    cfg.actor_lr = j.at("actor_lr").get<double>();
    cfg.critic_lr = j.at("critic_lr").get<double>();
    cfg.temperature_lr = j.at("temperature_lr").get<double>();
    cfg.discount = j.at("discount").get<double>();
    cfg.polyak = j.at("polyak").get<double>();
    cfg.batch_size = j.at("batch_size").get<std::size_t>();
    cfg.start_steps = j.at("start_steps").get<long>();
    cfg.max_steps = j.at("max_steps").get<long>();
    cfg.eval_interval = j.at("eval_interval").get<long>();
    cfg.eval_episodes = j.at("eval_episodes").get<std::size_t>();
    cfg.hidden_dims = j.at("hidden_dims").get<std::vector<std::size_t>>();
    cfg.replay_capacity = j.at("replay_capacity").get<std::size_t>();
    cfg.seed_begin = j.at("seed_begin").get<std::uint64_t>();
    cfg.seed_end = j.at("seed_end").get<std::uint64_t>();
    cfg.inference_mode = parse_inference_mode(j.at("inference_mode").get<std::string>());
    cfg.grid_inference = j.at("grid_inference").get<bool>();
    const json& te = j.at("target_entropy");
    cfg.target_entropy = te.is_null() ? std::optional<double>{} : std::optional<double>{te.get<double>()};
    return cfg;
}

}  // namespace

std::string run_record_to_json(const RunRecord& record) {
    json checkpoints = json::array();
    for (const Checkpoint& cp : record.checkpoints) {
        checkpoints.push_back(
            json{{"steps", cp.env_steps}, {"scores", cp.scores}, {"normalized", cp.normalized}});
    }
    const json j{{"seed", record.seed},
                 {"config", json{{"env", env_to_json(record.env_config)},
                                 {"sac", sac_to_json(record.sac_config)}}},
                 {"checkpoints", checkpoints}};
    return j.dump(2);
}

RunRecord run_record_from_json(const std::string& text) {
    try {
        const json j = json::parse(text);
        RunRecord record;
        record.seed = j.at("seed").get<std::uint64_t>();
        record.env_config = env_from_json(j.at("config").at("env"));
        record.sac_config = sac_from_json(j.at("config").at("sac"));
        for (const json& cj : j.at("checkpoints")) {
            Checkpoint cp;
            cp.env_steps = cj.at("steps").get<long>();
            cp.scores = cj.at("scores").get<std::vector<double>>();
            cp.normalized = cj.at("normalized").get<std::vector<double>>();
            record.checkpoints.push_back(std::move(cp));
        }
        return record;
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("run record parse failed: ") + e.what());
    }
}

void save_run_record(const std::filesystem::path& file, const RunRecord& record) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot open for writing: " + file.string());
    out << run_record_to_json(record) << '\n';
    if (!out) throw std::runtime_error("write failed: " + file.string());
}

RunRecord load_run_record(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open run record: " + file.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return run_record_from_json(text);
    } catch (const std::exception& e) {
        throw std::runtime_error(file.string() + ": " + e.what());
    }
}

std::string run_record_filename(InferenceMode mode, std::uint64_t seed) {
    return "run_" + std::string(inference_mode_token(mode)) + "_" + std::to_string(seed) + ".json";
}

}  // namespace tanhshift
