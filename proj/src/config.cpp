#include "jacobimax/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace jacobimax {

namespace {
std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double to_double(const std::string& key, const std::string& s) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing");
        return x;
    } catch (...) {
        throw ConfigError("config: key '" + key + "' expects a number, got '" + s + "'");
    }
}

std::uint64_t to_u64(const std::string& key, const std::string& s) {
    try {
        std::size_t pos = 0;
        const auto x = std::stoull(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing");
        return x;
    } catch (...) {
        throw ConfigError("config: key '" + key + "' expects an integer, got '" + s + "'");
    }
}

bool to_bool(const std::string& key, const std::string& s) {
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw ConfigError("config: key '" + key + "' expects a boolean, got '" + s + "'");
}
}  // namespace

void apply_override(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "command") cfg.command = value;
    else if (key == "kind") cfg.kind = value;
    else if (key == "beta") cfg.beta = to_double(key, value);
    else if (key == "v") cfg.v = to_double(key, value);
    else if (key == "family") cfg.family = value;
    else if (key == "truncate") cfg.truncate = to_bool(key, value);
    else if (key == "truncation_exponent") cfg.truncation_exponent = to_double(key, value);
    else if (key == "n") {
        cfg.n_values.clear();
        for (const auto& s : split_list(value)) cfg.n_values.push_back(to_u64(key, s));
        if (cfg.n_values.empty()) throw ConfigError("config: key 'n' needs at least one value");
    } else if (key == "z") {
        cfg.z_values.clear();
        for (const auto& s : split_list(value)) cfg.z_values.push_back(to_double(key, s));
        if (cfg.z_values.empty()) throw ConfigError("config: key 'z' needs at least one value");
    } else if (key == "eta") cfg.eta = to_double(key, value);
    else if (key == "net") cfg.net = value;
    else if (key == "net_max_points") cfg.net_max_points = to_u64(key, value);
    else if (key == "uniform_count") cfg.uniform_count = to_u64(key, value);
    else if (key == "kappa") cfg.kappa = to_double(key, value);
    else if (key == "delta") cfg.delta = to_double(key, value);
    else if (key == "replicas") cfg.replicas = to_u64(key, value);
    else if (key == "seed") cfg.seed = to_u64(key, value);
    else if (key == "threads") cfg.threads = static_cast<int>(to_u64(key, value));
    else if (key == "out") cfg.out = value;
    else if (key == "stride") cfg.stride = std::max<std::uint64_t>(1, to_u64(key, value));
    else if (key == "C") cfg.barrier_C = to_double(key, value);
    else if (key == "q") cfg.barrier_q = to_double(key, value);
    else if (key == "epsilon") cfg.epsilon = to_double(key, value);
    else if (key == "anticoncentration_delta") cfg.anti_delta = to_double(key, value);
    else if (key == "tail_delta") cfg.tail_delta = to_double(key, value);
    else if (key == "cov_s") cfg.cov_s = to_double(key, value);
    else if (key == "cov_t") cfg.cov_t = to_double(key, value);
    else if (key == "r") cfg.block_r = to_double(key, value);
    else if (key == "delta_exponent") cfg.block_delta_exponent = to_double(key, value);
    else throw ConfigError("config: unknown key '" + key + "'");
}

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig cfg;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config: malformed section header at line " + std::to_string(lineno));
            continue;  // sections are organizational only
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: expected 'key = value' at line " + std::to_string(lineno));
        apply_override(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

EnsembleSpec ExperimentConfig::ensemble_spec() const {
    if (kind == "gbe") return EnsembleSpec::gaussian_beta(beta, truncate, truncation_exponent);
    if (kind == "generic") return EnsembleSpec::generic(v, family, truncate, truncation_exponent);
    throw ConfigError("config: key 'kind' must be 'gbe' or 'generic'");
}

void ExperimentConfig::validate() const {
    ensemble_spec();  // validates ensemble parameters
    if (!(eta > 0.0) || eta >= 1.0) throw ConfigError("config: key 'eta' must lie in (0, 1)");
    if (net != "chebyshev" && net != "uniform")
        throw ConfigError("config: key 'net' must be 'chebyshev' or 'uniform'");
    if (kappa < 1.0) throw ConfigError("config: key 'kappa' must be >= 1");
    for (double z : z_values) {
        if (std::abs(z) < eta || std::abs(z) > 2.0 - eta)
            throw ConfigError("config: key 'z' has a value outside [eta, 2-eta] in absolute value");
        const double d = delta > 0.0 ? delta : eta * eta / 8.0;
        for (std::size_t n : n_values) {
            const double k0 = std::floor(z * z * static_cast<double>(n) / 4.0);
            if (k0 - std::floor(d * static_cast<double>(n)) < d * static_cast<double>(n))
                throw ConfigError(
                    "config: key 'delta' violates k0 - delta n >= delta n for z = " + std::to_string(z));
        }
    }
    if (n_values.empty()) throw ConfigError("config: key 'n' must be nonempty");
    if (truncate && truncation_exponent < 1.0)
        throw ConfigError("config: key 'truncation_exponent' must be >= 1");
}

std::string ExperimentConfig::resolved_text() const {
    std::ostringstream os;
    os << "command = " << command << "\n";
    os << "kind = " << kind << "\nbeta = " << beta << "\nv = " << v << "\nfamily = " << family
       << "\ntruncate = " << (truncate ? "true" : "false")
       << "\ntruncation_exponent = " << truncation_exponent << "\n";
    os << "n = ";
    for (std::size_t i = 0; i < n_values.size(); ++i) os << (i ? ", " : "") << n_values[i];
    os << "\nz = ";
    for (std::size_t i = 0; i < z_values.size(); ++i) os << (i ? ", " : "") << z_values[i];
    os << "\neta = " << eta << "\nnet = " << net << "\nnet_max_points = " << net_max_points
       << "\nuniform_count = " << uniform_count << "\nkappa = " << kappa << "\ndelta = " << delta
       << "\nreplicas = " << replicas << "\nseed = " << seed << "\nthreads = " << threads
       << "\nstride = " << stride << "\nC = " << barrier_C << "\nq = " << barrier_q
       << "\nepsilon = " << epsilon << "\nanticoncentration_delta = " << anti_delta
       << "\ntail_delta = " << tail_delta << "\ncov_s = " << cov_s << "\ncov_t = " << cov_t
       << "\nr = " << block_r << "\ndelta_exponent = " << block_delta_exponent << "\n";
    return os.str();
}

}  // namespace jacobimax
