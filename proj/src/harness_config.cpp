#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "s2w/harness.hpp"

namespace s2w {
namespace {

/// Shortest decimal form that parses back to exactly the same double, so the
/// canonical config text is both human-readable and digest-stable.
std::string format_double(double v) {
    char buf[64];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) return buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == sep) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    out.push_back(trim(cur));
    return out;
}

double parse_double(const std::string& key, const std::string& v) {
    char* end = nullptr;
    double x = std::strtod(v.c_str(), &end);
    if (end != v.c_str() + v.size() || v.empty())
        throw std::invalid_argument("config key " + key + ": not a number: " + v);
    return x;
}

std::int64_t parse_int(const std::string& key, const std::string& v) {
    char* end = nullptr;
    long long x = std::strtoll(v.c_str(), &end, 10);
    if (end != v.c_str() + v.size() || v.empty())
        throw std::invalid_argument("config key " + key + ": not an integer: " + v);
    return x;
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
    char* end = nullptr;
    unsigned long long x = std::strtoull(v.c_str(), &end, 10);
    if (end != v.c_str() + v.size() || v.empty() || v[0] == '-')
        throw std::invalid_argument("config key " + key + ": not an unsigned integer: " + v);
    return x;
}

std::string trunk_to_string(const std::vector<ConvSpec>& trunk) {
    std::string out;
    for (std::size_t i = 0; i < trunk.size(); ++i) {
        const ConvSpec& c = trunk[i];
        if (i) out += ',';
        out += "conv" + std::to_string(c.kernel) + "x" + std::to_string(c.kernel) + "s" +
               std::to_string(c.stride) + "c" + std::to_string(c.out_channels) +
               (c.relu ? "relu" : "lin");
    }
    return out;
}

ConvSpec parse_conv_spec(const std::string& s) {
    // Form: conv<k>x<k>s<stride>c<channels>(relu|lin)
    const auto bad = [&] {
        return std::invalid_argument("malformed conv spec: " + s +
                                     " (want e.g. conv3x3s2c16relu)");
    };
    std::size_t p = 0;
    auto expect = [&](const char* lit) {
        std::size_t n = std::string(lit).size();
        if (s.compare(p, n, lit) != 0) throw bad();
        p += n;
    };
    auto number = [&] {
        std::size_t start = p;
        while (p < s.size() && std::isdigit(static_cast<unsigned char>(s[p]))) ++p;
        if (p == start) throw bad();
        return std::stoi(s.substr(start, p - start));
    };
    ConvSpec c;
    expect("conv");
    c.kernel = number();
    expect("x");
    if (number() != c.kernel) throw bad();
    expect("s");
    c.stride = number();
    expect("c");
    c.out_channels = number();
    if (s.compare(p, std::string::npos, "relu") == 0) {
        c.relu = true;
    } else if (s.compare(p, std::string::npos, "lin") == 0) {
        c.relu = false;
    } else {
        throw bad();
    }
    return c;
}

}  // namespace

std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : data) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

void RunConfig::validate() const {
    ws.validate();
    learn.validate();
    if (eval_every <= 0) throw std::invalid_argument("eval_every must be positive");
    if (eval_scene_count <= 0) throw std::invalid_argument("eval_scene_count must be positive");
    if (eval_trial_cap <= 0) throw std::invalid_argument("eval_trial_cap must be positive");
    if (viz_zoom <= 0) throw std::invalid_argument("viz_zoom must be positive");
    if (output_dir.empty()) throw std::invalid_argument("output_dir must be non-empty");
    if (net.head_pairs < 1) throw std::invalid_argument("head_pairs must be at least 1");
    build_layer_specs(net, ws);  // throws if the shape does not compose to N x N
}

std::string serialize_run_config(const RunConfig& cfg) {
    std::ostringstream out;
    out << "# slidewall run configuration\n";
    out << "method = " << method_name(cfg.method) << "\n";
    out << "iterations = " << cfg.iterations << "\n";
    out << "eval_every = " << cfg.eval_every << "\n";
    out << "eval_scene_count = " << cfg.eval_scene_count << "\n";
    out << "eval_trial_cap = " << cfg.eval_trial_cap << "\n";
    out << "seed = " << cfg.seed << "\n";
    out << "eval_seed = " << cfg.eval_seed << "\n";
    out << "unseen_seed = " << cfg.unseen_seed << "\n";
    out << "output_dir = " << cfg.output_dir << "\n";
    out << "viz_zoom = " << cfg.viz_zoom << "\n";
    out << "side_cm = " << format_double(cfg.ws.side_cm) << "\n";
    out << "action_grid = " << cfg.ws.action_grid << "\n";
    out << "obs_grid = " << cfg.ws.obs_grid << "\n";
    out << "rotations = ";
    for (std::size_t i = 0; i < cfg.ws.rotations.size(); ++i)
        out << (i ? "," : "") << format_double(cfg.ws.rotations[i]);
    out << "\n";
    out << "channels = " << cfg.ws.channels << "\n";
    out << "trunk = " << trunk_to_string(cfg.net.trunk) << "\n";
    out << "head_pairs = " << cfg.net.head_pairs << "\n";
    out << "gamma = " << format_double(cfg.learn.gamma) << "\n";
    out << "lr_trunk = " << format_double(cfg.learn.lr_trunk) << "\n";
    out << "lr_head = " << format_double(cfg.learn.lr_head) << "\n";
    out << "momentum = " << format_double(cfg.learn.momentum) << "\n";
    out << "weight_decay = " << format_double(cfg.learn.weight_decay) << "\n";
    out << "target_sync_every = " << cfg.learn.target_sync_every << "\n";
    out << "replay_capacity = " << cfg.learn.replay_capacity << "\n";
    out << "per_alpha = " << format_double(cfg.learn.per_alpha) << "\n";
    out << "per_beta_start = " << format_double(cfg.learn.per_beta_start) << "\n";
    out << "per_beta_end = " << format_double(cfg.learn.per_beta_end) << "\n";
    out << "per_eps = " << format_double(cfg.learn.per_eps) << "\n";
    out << "eps_start = " << format_double(cfg.learn.eps_start) << "\n";
    out << "eps_end = " << format_double(cfg.learn.eps_end) << "\n";
    out << "eps_fraction = " << format_double(cfg.learn.eps_fraction) << "\n";
    out << "episode_cap = " << cfg.learn.episode_cap << "\n";
    return out.str();
}

RunConfig parse_run_config(const std::string& text) {
    RunConfig cfg;
    std::map<std::string, bool> seen;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key.empty()) throw std::invalid_argument("config line " + std::to_string(line_no) +
                                                     ": empty key");
        if (seen[key])
            throw std::invalid_argument("duplicate config key: " + key);
        seen[key] = true;

        if (key == "method") {
            cfg.method = parse_method(val);
        } else if (key == "iterations") {
            cfg.iterations = parse_u64(key, val);
        } else if (key == "eval_every") {
            cfg.eval_every = static_cast<int>(parse_int(key, val));
        } else if (key == "eval_scene_count") {
            cfg.eval_scene_count = static_cast<int>(parse_int(key, val));
        } else if (key == "eval_trial_cap") {
            cfg.eval_trial_cap = static_cast<int>(parse_int(key, val));
        } else if (key == "seed") {
            cfg.seed = parse_u64(key, val);
        } else if (key == "eval_seed") {
            cfg.eval_seed = parse_u64(key, val);
        } else if (key == "unseen_seed") {
            cfg.unseen_seed = parse_u64(key, val);
        } else if (key == "output_dir") {
            cfg.output_dir = val;
        } else if (key == "viz_zoom") {
            cfg.viz_zoom = static_cast<int>(parse_int(key, val));
        } else if (key == "side_cm") {
            cfg.ws.side_cm = parse_double(key, val);
        } else if (key == "action_grid") {
            cfg.ws.action_grid = static_cast<int>(parse_int(key, val));
        } else if (key == "obs_grid") {
            cfg.ws.obs_grid = static_cast<int>(parse_int(key, val));
        } else if (key == "rotations") {
            cfg.ws.rotations.clear();
            for (const std::string& part : split(val, ','))
                cfg.ws.rotations.push_back(parse_double(key, part));
        } else if (key == "channels") {
            cfg.ws.channels = static_cast<int>(parse_int(key, val));
        } else if (key == "trunk") {
            cfg.net.trunk.clear();
            for (const std::string& part : split(val, ','))
                cfg.net.trunk.push_back(parse_conv_spec(part));
        } else if (key == "head_pairs") {
            cfg.net.head_pairs = static_cast<int>(parse_int(key, val));
        } else if (key == "gamma") {
            cfg.learn.gamma = parse_double(key, val);
        } else if (key == "lr_trunk") {
            cfg.learn.lr_trunk = parse_double(key, val);
        } else if (key == "lr_head") {
            cfg.learn.lr_head = parse_double(key, val);
        } else if (key == "momentum") {
            cfg.learn.momentum = parse_double(key, val);
        } else if (key == "weight_decay") {
            cfg.learn.weight_decay = parse_double(key, val);
        } else if (key == "target_sync_every") {
            cfg.learn.target_sync_every = static_cast<int>(parse_int(key, val));
        } else if (key == "replay_capacity") {
            cfg.learn.replay_capacity = static_cast<std::size_t>(parse_u64(key, val));
        } else if (key == "per_alpha") {
            cfg.learn.per_alpha = parse_double(key, val);
        } else if (key == "per_beta_start") {
            cfg.learn.per_beta_start = parse_double(key, val);
        } else if (key == "per_beta_end") {
            cfg.learn.per_beta_end = parse_double(key, val);
        } else if (key == "per_eps") {
            cfg.learn.per_eps = parse_double(key, val);
        } else if (key == "eps_start") {
            cfg.learn.eps_start = parse_double(key, val);
        } else if (key == "eps_end") {
            cfg.learn.eps_end = parse_double(key, val);
        } else if (key == "eps_fraction") {
            cfg.learn.eps_fraction = parse_double(key, val);
        } else if (key == "episode_cap") {
            cfg.learn.episode_cap = static_cast<int>(parse_int(key, val));
        } else {
            throw std::invalid_argument("unknown config key: " + key);
        }
    }
    cfg.validate();
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_run_config(buf.str());
}

}  // namespace s2w
