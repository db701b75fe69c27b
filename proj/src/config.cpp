#include "edgesim/config.hpp"

#include <fstream>
#include <functional>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

#include "edgesim/rng.hpp"

namespace edgesim {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError("config: " + path + ": " + what);
}

double as_double(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

int as_int(const json& j, const std::string& path) {
    if (!j.is_number_integer()) fail(path, "expected an integer");
    return j.get<int>();
}

std::int64_t as_i64(const json& j, const std::string& path) {
    if (!j.is_number_integer()) fail(path, "expected an integer");
    return j.get<std::int64_t>();
}

std::uint64_t as_u64(const json& j, const std::string& path) {
    if (!j.is_number_unsigned() && !j.is_number_integer()) fail(path, "expected an integer");
    return j.get<std::uint64_t>();
}

bool as_bool(const json& j, const std::string& path) {
    if (!j.is_boolean()) fail(path, "expected a boolean");
    return j.get<bool>();
}

std::string as_string(const json& j, const std::string& path) {
    if (!j.is_string()) fail(path, "expected a string");
    return j.get<std::string>();
}

void as_range(const json& j, const std::string& path, double& lo, double& hi) {
    if (!j.is_array() || j.size() != 2) fail(path, "expected [lo, hi]");
    lo = as_double(j[0], path + "[0]");
    hi = as_double(j[1], path + "[1]");
}

void as_vector3(const json& j, const std::string& path, Eigen::Vector3d& out) {
    if (!j.is_array() || j.size() != 3) fail(path, "expected an array of 3 numbers");
    for (int i = 0; i < 3; ++i) out(i) = as_double(j[static_cast<std::size_t>(i)], path);
}

using Applier = std::function<void(const json&, const std::string&)>;
struct Field {
    const char* key;
    Applier apply;
};

// Applies every present key, rejecting names outside the schema.
void apply_object(const json& j, const std::string& path, std::initializer_list<Field> fields) {
    if (!j.is_object()) fail(path, "expected an object");
    for (const auto& [key, value] : j.items()) {
        const Field* match = nullptr;
        for (const auto& f : fields)
            if (key == f.key) {
                match = &f;
                break;
            }
        if (!match) fail(path + "." + key, "unknown key");
        match->apply(value, path + "." + key);
    }
}

void parse_into(const json& root, ScenarioConfig& c) {
    apply_object(root, "$", {
        {"seed", [&](const json& j, const std::string& p) { c.seed = as_u64(j, p); }},
        {"l_max_ms", [&](const json& j, const std::string& p) {
             c.l_max_ms = as_double(j, p);
             if (c.l_max_ms <= 0) fail(p, "must be positive");
         }},
        {"n_vehicles", [&](const json& j, const std::string& p) {
             c.env.sim.n_vehicles = as_int(j, p);
             if (c.env.sim.n_vehicles < 1) fail(p, "must be >= 1");
         }},
        {"sim", [&](const json& j, const std::string& p) {
             apply_object(j, p, {
                 {"n_queues", [&](const json& v, const std::string& q) {
                      c.env.sim.n_queues = as_int(v, q);
                      if (c.env.sim.n_queues < 1) fail(q, "must be >= 1");
                  }},
                 {"max_speedup", [&](const json& v, const std::string& q) { c.env.sim.max_speedup = as_double(v, q); }},
                 {"timeout_ticks", [&](const json& v, const std::string& q) { c.env.timeout_ticks = as_i64(v, q); }},
             });
         }},
        {"channel", [&](const json& j, const std::string& p) {
             auto& ch = c.env.sim.channel;
             apply_object(j, p, {
                 {"carrier_ghz", [&](const json& v, const std::string& q) { ch.carrier_ghz = as_double(v, q); }},
                 {"max_bandwidth_uplink_hz", [&](const json& v, const std::string& q) { ch.max_bandwidth_uplink_hz = as_double(v, q); }},
                 {"max_bandwidth_downlink_hz", [&](const json& v, const std::string& q) { ch.max_bandwidth_downlink_hz = as_double(v, q); }},
                 {"tx_power_dbm", [&](const json& v, const std::string& q) { ch.tx_power_dbm = as_double(v, q); }},
                 {"noise_density_dbm_hz", [&](const json& v, const std::string& q) { ch.noise_density_dbm_hz = as_double(v, q); }},
                 {"shadowing_sigma_db", [&](const json& v, const std::string& q) { ch.shadowing_sigma_db = as_double(v, q); }},
                 {"bs_height_m", [&](const json& v, const std::string& q) { ch.bs_height_m = as_double(v, q); }},
                 {"ut_height_m", [&](const json& v, const std::string& q) { ch.ut_height_m = as_double(v, q); }},
             });
         }},
        {"mobility", [&](const json& j, const std::string& p) {
             auto& m = c.env.mobility;
             apply_object(j, p, {
                 {"region_m", [&](const json& v, const std::string& q) { m.region_m = as_double(v, q); }},
                 {"speed_min_mps", [&](const json& v, const std::string& q) { m.speed_min_mps = as_double(v, q); }},
                 {"speed_max_mps", [&](const json& v, const std::string& q) { m.speed_max_mps = as_double(v, q); }},
                 {"bs_x", [&](const json& v, const std::string& q) { m.bs_position.x() = as_double(v, q); }},
                 {"bs_y", [&](const json& v, const std::string& q) { m.bs_position.y() = as_double(v, q); }},
             });
         }},
        {"workload", [&](const json& j, const std::string& p) {
             auto& w = c.env.workload;
             apply_object(j, p, {
                 {"image_bytes_mean", [&](const json& v, const std::string& q) { w.image_bytes_mean = as_double(v, q); }},
                 {"image_bytes_std", [&](const json& v, const std::string& q) { w.image_bytes_std = as_double(v, q); }},
                 {"edge_full_ms_mean", [&](const json& v, const std::string& q) { w.edge_full_ms_mean = as_double(v, q); }},
                 {"edge_full_ms_std", [&](const json& v, const std::string& q) { w.edge_full_ms_std = as_double(v, q); }},
                 {"local_full_ms_mean", [&](const json& v, const std::string& q) { w.local_full_ms_mean = as_double(v, q); }},
                 {"local_full_ms_std", [&](const json& v, const std::string& q) { w.local_full_ms_std = as_double(v, q); }},
                 {"update_bytes_mean", [&](const json& v, const std::string& q) { w.update_bytes_mean = as_double(v, q); }},
                 {"update_bytes_std", [&](const json& v, const std::string& q) { w.update_bytes_std = as_double(v, q); }},
                 {"min_uplink_bytes", [&](const json& v, const std::string& q) { w.min_uplink_bytes = as_double(v, q); }},
             });
         }},
        {"fleet", [&](const json& j, const std::string& p) {
             auto& f = c.env.fleet;
             apply_object(j, p, {
                 {"cpu_ghz", [&](const json& v, const std::string& q) { as_range(v, q, f.cpu_ghz_lo, f.cpu_ghz_hi); }},
                 {"ram_gb", [&](const json& v, const std::string& q) { as_range(v, q, f.ram_gb_lo, f.ram_gb_hi); }},
             });
         }},
        {"obs_norm", [&](const json& j, const std::string& p) {
             auto& n = c.env.norm;
             apply_object(j, p, {
                 {"cpu_ghz", [&](const json& v, const std::string& q) { as_range(v, q, n.cpu_ghz.lo, n.cpu_ghz.hi); }},
                 {"ram_gb", [&](const json& v, const std::string& q) { as_range(v, q, n.ram_gb.lo, n.ram_gb.hi); }},
                 {"speed_mps", [&](const json& v, const std::string& q) { as_range(v, q, n.speed_mps.lo, n.speed_mps.hi); }},
                 {"snr_db", [&](const json& v, const std::string& q) { as_range(v, q, n.snr_db.lo, n.snr_db.hi); }},
                 {"workload_ms", [&](const json& v, const std::string& q) { as_range(v, q, n.workload_ms.lo, n.workload_ms.hi); }},
             });
         }},
        {"training", [&](const json& j, const std::string& p) {
             auto& t = c.training;
             apply_object(j, p, {
                 {"epochs", [&](const json& v, const std::string& q) { t.epochs = as_int(v, q); }},
                 {"transitions_per_epoch", [&](const json& v, const std::string& q) { t.transitions_per_epoch = as_int(v, q); }},
                 {"episode_len", [&](const json& v, const std::string& q) { t.episode_len = as_int(v, q); }},
                 {"actor_lr", [&](const json& v, const std::string& q) { t.actor_lr = as_double(v, q); }},
                 {"critic_lr", [&](const json& v, const std::string& q) { t.critic_lr = as_double(v, q); }},
                 {"gamma", [&](const json& v, const std::string& q) { t.gamma = as_double(v, q); }},
                 {"clip_eps", [&](const json& v, const std::string& q) { t.clip_eps = as_double(v, q); }},
                 {"ppo_epochs", [&](const json& v, const std::string& q) { t.ppo_epochs = as_int(v, q); }},
                 {"minibatch", [&](const json& v, const std::string& q) { t.minibatch = as_int(v, q); }},
                 {"optimizer", [&](const json& v, const std::string& q) {
                      t.optimizer = as_string(v, q);
                      if (t.optimizer != "adam" && t.optimizer != "sgd") fail(q, "must be adam or sgd");
                  }},
                 {"use_gae", [&](const json& v, const std::string& q) { t.use_gae = as_bool(v, q); }},
                 {"gae_lambda", [&](const json& v, const std::string& q) { t.gae_lambda = as_double(v, q); }},
                 {"hidden", [&](const json& v, const std::string& q) { t.hidden = as_int(v, q); }},
                 {"noise_std_initial", [&](const json& v, const std::string& q) { t.noise.initial = as_double(v, q); }},
                 {"noise_std_final", [&](const json& v, const std::string& q) { t.noise.final_std = as_double(v, q); }},
                 {"noise_decay_updates", [&](const json& v, const std::string& q) { t.noise.decay_updates = as_int(v, q); }},
             });
         }},
        {"reserve", [&](const json& j, const std::string& p) {
             auto& r = c.reserve;
             apply_object(j, p, {
                 {"window_offloads", [&](const json& v, const std::string& q) { r.window_offloads = as_int(v, q); }},
                 {"warmup_windows", [&](const json& v, const std::string& q) { r.warmup_windows = as_int(v, q); }},
                 {"guided_windows", [&](const json& v, const std::string& q) { r.guided_windows = as_int(v, q); }},
                 {"eta1", [&](const json& v, const std::string& q) { r.eta1 = as_double(v, q); }},
                 {"eta2", [&](const json& v, const std::string& q) { r.eta2 = as_double(v, q); }},
                 {"tau", [&](const json& v, const std::string& q) { r.tau = as_double(v, q); }},
                 {"noise_var", [&](const json& v, const std::string& q) { r.noise_var = as_double(v, q); }},
                 {"dataset_cap", [&](const json& v, const std::string& q) { r.dataset_cap = as_int(v, q); }},
                 {"standardize_y", [&](const json& v, const std::string& q) { r.standardize_y = as_bool(v, q); }},
                 {"drift_mode", [&](const json& v, const std::string& q) {
                      r.drift_mode = as_string(v, q);
                      if (r.drift_mode != "descent" && r.drift_mode != "as_printed")
                          fail(q, "must be descent or as_printed");
                  }},
                 {"alpha", [&](const json& v, const std::string& q) { as_vector3(v, q, r.alpha); }},
                 {"rolling_windows", [&](const json& v, const std::string& q) { r.rolling_windows = as_int(v, q); }},
             });
         }},
        {"baseline", [&](const json& j, const std::string& p) {
             apply_object(j, p, {
                 {"grid_step", [&](const json& v, const std::string& q) {
                      c.baseline.grid_step = as_double(v, q);
                      if (c.baseline.grid_step <= 0 || c.baseline.grid_step > 1) fail(q, "must be in (0,1]");
                  }},
             });
         }},
        {"evaluate", [&](const json& j, const std::string& p) {
             apply_object(j, p, {
                 {"n_reservations", [&](const json& v, const std::string& q) { c.evaluate.n_reservations = as_int(v, q); }},
                 {"offloads_each", [&](const json& v, const std::string& q) { c.evaluate.offloads_each = as_int(v, q); }},
             });
         }},
    });
}

json to_json(const ScenarioConfig& c) {
    json j;
    j["seed"] = c.seed;
    j["l_max_ms"] = c.l_max_ms;
    j["n_vehicles"] = c.env.sim.n_vehicles;
    j["sim"] = {{"n_queues", c.env.sim.n_queues},
                {"max_speedup", c.env.sim.max_speedup},
                {"timeout_ticks", c.env.timeout_ticks}};
    const auto& ch = c.env.sim.channel;
    j["channel"] = {{"carrier_ghz", ch.carrier_ghz},
                    {"max_bandwidth_uplink_hz", ch.max_bandwidth_uplink_hz},
                    {"max_bandwidth_downlink_hz", ch.max_bandwidth_downlink_hz},
                    {"tx_power_dbm", ch.tx_power_dbm},
                    {"noise_density_dbm_hz", ch.noise_density_dbm_hz},
                    {"shadowing_sigma_db", ch.shadowing_sigma_db},
                    {"bs_height_m", ch.bs_height_m},
                    {"ut_height_m", ch.ut_height_m}};
    j["mobility"] = {{"region_m", c.env.mobility.region_m},
                     {"speed_min_mps", c.env.mobility.speed_min_mps},
                     {"speed_max_mps", c.env.mobility.speed_max_mps},
                     {"bs_x", c.env.mobility.bs_position.x()},
                     {"bs_y", c.env.mobility.bs_position.y()}};
    const auto& w = c.env.workload;
    j["workload"] = {{"image_bytes_mean", w.image_bytes_mean},
                     {"image_bytes_std", w.image_bytes_std},
                     {"edge_full_ms_mean", w.edge_full_ms_mean},
                     {"edge_full_ms_std", w.edge_full_ms_std},
                     {"local_full_ms_mean", w.local_full_ms_mean},
                     {"local_full_ms_std", w.local_full_ms_std},
                     {"update_bytes_mean", w.update_bytes_mean},
                     {"update_bytes_std", w.update_bytes_std},
                     {"min_uplink_bytes", w.min_uplink_bytes}};
    j["fleet"] = {{"cpu_ghz", {c.env.fleet.cpu_ghz_lo, c.env.fleet.cpu_ghz_hi}},
                  {"ram_gb", {c.env.fleet.ram_gb_lo, c.env.fleet.ram_gb_hi}}};
    const auto& n = c.env.norm;
    j["obs_norm"] = {{"cpu_ghz", {n.cpu_ghz.lo, n.cpu_ghz.hi}},
                     {"ram_gb", {n.ram_gb.lo, n.ram_gb.hi}},
                     {"speed_mps", {n.speed_mps.lo, n.speed_mps.hi}},
                     {"snr_db", {n.snr_db.lo, n.snr_db.hi}},
                     {"workload_ms", {n.workload_ms.lo, n.workload_ms.hi}}};
    const auto& t = c.training;
    j["training"] = {{"epochs", t.epochs},
                     {"transitions_per_epoch", t.transitions_per_epoch},
                     {"episode_len", t.episode_len},
                     {"actor_lr", t.actor_lr},
                     {"critic_lr", t.critic_lr},
                     {"gamma", t.gamma},
                     {"clip_eps", t.clip_eps},
                     {"ppo_epochs", t.ppo_epochs},
                     {"minibatch", t.minibatch},
                     {"optimizer", t.optimizer},
                     {"use_gae", t.use_gae},
                     {"gae_lambda", t.gae_lambda},
                     {"hidden", t.hidden},
                     {"noise_std_initial", t.noise.initial},
                     {"noise_std_final", t.noise.final_std},
                     {"noise_decay_updates", t.noise.decay_updates}};
    const auto& r = c.reserve;
    j["reserve"] = {{"window_offloads", r.window_offloads},
                    {"warmup_windows", r.warmup_windows},
                    {"guided_windows", r.guided_windows},
                    {"eta1", r.eta1},
                    {"eta2", r.eta2},
                    {"tau", r.tau},
                    {"noise_var", r.noise_var},
                    {"dataset_cap", r.dataset_cap},
                    {"standardize_y", r.standardize_y},
                    {"drift_mode", r.drift_mode},
                    {"alpha", {r.alpha.x(), r.alpha.y(), r.alpha.z()}},
                    {"rolling_windows", r.rolling_windows}};
    j["baseline"] = {{"grid_step", c.baseline.grid_step}};
    j["evaluate"] = {{"n_reservations", c.evaluate.n_reservations},
                     {"offloads_each", c.evaluate.offloads_each}};
    return j;
}

void apply_override(json& root, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw ConfigError("override '" + assignment + "' is not of the form key=value");
    const std::string path = assignment.substr(0, eq);
    const std::string value = assignment.substr(eq + 1);

    json* node = &root;
    std::istringstream ps(path);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ps, part, '.')) parts.push_back(part);
    if (parts.empty()) throw ConfigError("override '" + assignment + "' has an empty key");
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) node = &(*node)[parts[i]];

    json parsed = json::parse(value, nullptr, false);
    if (parsed.is_discarded()) parsed = value;  // fall back to string
    (*node)[parts.back()] = parsed;
}

ScenarioConfig parse_document(const json& doc) {
    ScenarioConfig c;
    // propagate cross-cutting defaults before field application
    parse_into(doc, c);
    c.env.l_max_ms = c.l_max_ms;
    c.env.episode_len = c.training.episode_len;
    return c;
}

}  // namespace

PpoConfig ScenarioConfig::ppo_config(std::uint64_t shuffle_seed) const {
    PpoConfig p;
    p.epochs = training.ppo_epochs;
    p.minibatch = training.minibatch;
    p.actor_lr = training.actor_lr;
    p.critic_lr = training.critic_lr;
    p.use_adam = training.optimizer == "adam";
    p.use_gae = training.use_gae;
    p.gae_lambda = training.gae_lambda;
    p.shuffle_seed = shuffle_seed;
    return p;
}

EnvConfig ScenarioConfig::env_config() const {
    EnvConfig e = env;
    e.l_max_ms = l_max_ms;
    e.episode_len = training.episode_len;
    return e;
}

std::string ScenarioConfig::to_json_string() const { return to_json(*this).dump(2) + "\n"; }

ScenarioConfig ScenarioConfig::from_json_string(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return parse_document(doc);
}

ScenarioConfig ScenarioConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_json_string(ss.str());
}

ScenarioConfig ScenarioConfig::from_file_with_overrides(const std::string& path,
                                                        const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: ") + path + ": " + e.what());
    }
    for (const auto& o : overrides) apply_override(doc, o);
    return parse_document(doc);
}

ScenarioConfig ScenarioConfig::defaults_with_overrides(const std::vector<std::string>& overrides) {
    json doc = json::object();
    for (const auto& o : overrides) apply_override(doc, o);
    return parse_document(doc);
}

std::uint64_t ScenarioConfig::config_hash() const { return fnv1a64(to_json_string()); }

}  // namespace edgesim
