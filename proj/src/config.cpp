#include "treise/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace treise {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

template <typename T>
T parse_integral(const std::string& v, const std::string& key) {
    T out{};
    const std::string t = trim(v);
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
    if (ec != std::errc() || ptr != t.data() + t.size())
        throw ConfigError("config: bad integer for " + key + ": '" + v + "'");
    return out;
}

double parse_double(const std::string& v, const std::string& key) {
    double out = 0.0;
    const std::string t = trim(v);
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
    if (ec != std::errc() || ptr != t.data() + t.size())
        throw ConfigError("config: bad number for " + key + ": '" + v + "'");
    return out;
}

bool parse_bool(const std::string& v, const std::string& key) {
    const std::string t = trim(v);
    if (t == "true" || t == "1") return true;
    if (t == "false" || t == "0") return false;
    throw ConfigError("config: bad boolean for " + key + ": '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : v) {
        if (c == ',') {
            if (!trim(cur).empty()) out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!trim(cur).empty()) out.push_back(trim(cur));
    return out;
}

template <typename T>
std::string join(const std::vector<T>& vs) {
    std::ostringstream out;
    for (std::size_t i = 0; i < vs.size(); ++i) {
        if (i) out << ',';
        out << vs[i];
    }
    return out.str();
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
    if (key == "seed") seed = parse_integral<std::uint64_t>(value, key);
    else if (key == "out_dir") out_dir = trim(value);
    else if (key == "dataset.source") dataset_source = trim(value);
    else if (key == "dataset.path") dataset_path = trim(value);
    else if (key == "dataset.export_jsonl") export_jsonl = parse_bool(value, key);
    else if (key == "gen.n_train") gen.n_train = parse_integral<int>(value, key);
    else if (key == "gen.n_test") gen.n_test = parse_integral<int>(value, key);
    else if (key == "gen.timesteps") gen.timesteps = parse_integral<int>(value, key);
    else if (key == "gen.channels") gen.channels = parse_integral<int>(value, key);
    else if (key == "gen.noise_sigma") gen.noise_sigma = parse_double(value, key);
    else if (key == "gen.spike_min") gen.spike_min = parse_double(value, key);
    else if (key == "gen.spike_max") gen.spike_max = parse_double(value, key);
    else if (key == "gen.anomaly_rate") gen.anomaly_rate = parse_double(value, key);
    else if (key == "classifier") classifier = trim(value);
    else if (key == "oracle.threshold") oracle_threshold = parse_double(value, key);
    else if (key == "oracle.softness") oracle_softness = parse_double(value, key);
    else if (key == "linear.init_std") linear_init_std = parse_double(value, key);
    else if (key == "train.lr") train.initial_lr = parse_double(value, key);
    else if (key == "train.max_epochs") train.max_epochs = parse_integral<int>(value, key);
    else if (key == "train.batch_size") train.batch_size = parse_integral<int>(value, key);
    else if (key == "train.plateau_min_delta") train.plateau_min_delta = parse_double(value, key);
    else if (key == "train.plateau_patience") train.plateau_patience = parse_integral<int>(value, key);
    else if (key == "train.max_halvings") train.max_halvings = parse_integral<int>(value, key);
    else if (key == "methods") methods = split_list(value);
    else if (key == "perturbation") perturbation = trim(value);
    else if (key == "masks.densities") {
        mask_densities.clear();
        for (const auto& s : split_list(value)) mask_densities.push_back(parse_double(s, key));
    } else if (key == "masks.granularities") {
        mask_granularities.clear();
        if (trim(value) != "auto")
            for (const auto& s : split_list(value))
                mask_granularities.push_back(parse_integral<int>(s, key));
    } else if (key == "masks.count") mask_count = parse_integral<int>(value, key);
    else if (key == "masks.channel_joint") mask_channel_joint = parse_bool(value, key);
    else if (key == "occlusion.window") occlusion_window = parse_integral<int>(value, key);
    else if (key == "occlusion.stride") occlusion_stride = parse_integral<int>(value, key);
    else if (key == "occlusion.baseline") occlusion_baseline = trim(value);
    else if (key == "ablation.group_size") ablation_group_size = parse_integral<int>(value, key);
    else if (key == "ablation.baseline") ablation_baseline = trim(value);
    else if (key == "lime.samples") lime_samples = parse_integral<int>(value, key);
    else if (key == "lime.density") lime_density = parse_double(value, key);
    else if (key == "lime.lambda") lime_lambda = parse_double(value, key);
    else if (key == "ig.steps") ig_steps = parse_integral<int>(value, key);
    else if (key == "metrics.curve_steps") curve_steps = parse_integral<int>(value, key);
    else if (key == "metrics.infidelity_perturbations")
        infid_perturbations = parse_integral<int>(value, key);
    else if (key == "metrics.infidelity_sigma") infid_sigma = parse_double(value, key);
    else if (key == "metrics.sensitivity_perturbations")
        sens_perturbations = parse_integral<int>(value, key);
    else if (key == "metrics.sensitivity_radius") sens_radius = parse_double(value, key);
    else if (key == "metrics.subset_size") subset_size = parse_integral<int>(value, key);
    else throw ConfigError("config: unknown key '" + key + "'");
}

std::string RunConfig::serialize() const {
    // out_dir is deliberately absent: the snapshot describes the computation,
    // and must not differ between two otherwise identical runs.
    std::ostringstream out;
    out << "seed = " << seed << '\n';
    out << "dataset.source = " << dataset_source << '\n';
    out << "dataset.path = " << dataset_path.string() << '\n';
    out << "dataset.export_jsonl = " << (export_jsonl ? "true" : "false") << '\n';
    out << "gen.n_train = " << gen.n_train << '\n';
    out << "gen.n_test = " << gen.n_test << '\n';
    out << "gen.timesteps = " << gen.timesteps << '\n';
    out << "gen.channels = " << gen.channels << '\n';
    out << "gen.noise_sigma = " << gen.noise_sigma << '\n';
    out << "gen.spike_min = " << gen.spike_min << '\n';
    out << "gen.spike_max = " << gen.spike_max << '\n';
    out << "gen.anomaly_rate = " << gen.anomaly_rate << '\n';
    out << "classifier = " << classifier << '\n';
    out << "oracle.threshold = " << oracle_threshold << '\n';
    out << "oracle.softness = " << oracle_softness << '\n';
    out << "linear.init_std = " << linear_init_std << '\n';
    out << "train.lr = " << train.initial_lr << '\n';
    out << "train.max_epochs = " << train.max_epochs << '\n';
    out << "train.batch_size = " << train.batch_size << '\n';
    out << "train.plateau_min_delta = " << train.plateau_min_delta << '\n';
    out << "train.plateau_patience = " << train.plateau_patience << '\n';
    out << "train.max_halvings = " << train.max_halvings << '\n';
    out << "methods = " << join(methods) << '\n';
    out << "perturbation = " << perturbation << '\n';
    out << "masks.densities = " << join(mask_densities) << '\n';
    out << "masks.granularities = "
        << (mask_granularities.empty() ? std::string("auto") : join(mask_granularities)) << '\n';
    out << "masks.count = " << mask_count << '\n';
    out << "masks.channel_joint = " << (mask_channel_joint ? "true" : "false") << '\n';
    out << "occlusion.window = " << occlusion_window << '\n';
    out << "occlusion.stride = " << occlusion_stride << '\n';
    out << "occlusion.baseline = " << occlusion_baseline << '\n';
    out << "ablation.group_size = " << ablation_group_size << '\n';
    out << "ablation.baseline = " << ablation_baseline << '\n';
    out << "lime.samples = " << lime_samples << '\n';
    out << "lime.density = " << lime_density << '\n';
    out << "lime.lambda = " << lime_lambda << '\n';
    out << "ig.steps = " << ig_steps << '\n';
    out << "metrics.curve_steps = " << curve_steps << '\n';
    out << "metrics.infidelity_perturbations = " << infid_perturbations << '\n';
    out << "metrics.infidelity_sigma = " << infid_sigma << '\n';
    out << "metrics.sensitivity_perturbations = " << sens_perturbations << '\n';
    out << "metrics.sensitivity_radius = " << sens_radius << '\n';
    out << "metrics.subset_size = " << subset_size << '\n';
    return out.str();
}

void RunConfig::validate() const {
    if (dataset_source != "generate" && dataset_source != "jsonl" && dataset_source != "tsv")
        throw ConfigError("config: dataset.source must be generate, jsonl or tsv");
    if (dataset_source != "generate" && dataset_path.empty())
        throw ConfigError("config: dataset.path required for file sources");
    if (classifier != "oracle" && classifier != "linear" && classifier != "linear_random")
        throw ConfigError("config: classifier must be oracle, linear or linear_random");
    if (perturbation != "multiply" && perturbation != "mean_replace" &&
        perturbation != "zero_replace")
        throw ConfigError("config: unknown perturbation '" + perturbation + "'");
    for (const auto& m : methods)
        if (m != "timereise" && m != "occlusion" && m != "feature_ablation" && m != "lime" &&
            m != "integrated_gradients" && m != "uniform")
            throw ConfigError("config: unknown method '" + m + "'");
    if (occlusion_baseline != "channel_mean" && occlusion_baseline != "zero")
        throw ConfigError("config: occlusion.baseline must be channel_mean or zero");
    if (ablation_baseline != "channel_mean" && ablation_baseline != "zero")
        throw ConfigError("config: ablation.baseline must be channel_mean or zero");
    if (subset_size < 1) throw ConfigError("config: metrics.subset_size must be >= 1");
    if (curve_steps < 1) throw ConfigError("config: metrics.curve_steps must be >= 1");
}

RunConfig load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path.string());
    RunConfig cfg;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: line " + std::to_string(line_no) +
                              " is not a key = value pair");
        cfg.set(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    }
    return cfg;
}

void apply_overrides(RunConfig& cfg, const std::vector<std::string>& overrides) {
    for (const auto& o : overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: override '" + o + "' is not key=value");
        std::string key = trim(o.substr(0, eq));
        std::string value = trim(o.substr(eq + 1));
        cfg.set(key, value);
    }
}

}  // namespace treise
