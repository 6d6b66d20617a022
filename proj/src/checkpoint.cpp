#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "s2w/harness.hpp"

namespace s2w {
namespace {

constexpr char kMagic[8] = {'S', '2', 'W', 'C', 'K', 'P', 'T', '\0'};
constexpr std::uint32_t kVersion = 1;
// A checkpoint holds a handful of megabytes at most; anything claiming more
// is corrupt and must not drive allocations.
constexpr std::uint64_t kMaxBlob = 1ULL << 28;

void put_bytes(std::ostream& os, const void* p, std::size_t n) {
    os.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

void get_bytes(std::istream& is, void* p, std::size_t n) {
    is.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(is.gcount()) != n)
        throw std::runtime_error("checkpoint: truncated file");
}

void put_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    put_bytes(os, b, 4);
}

void put_u64(std::ostream& os, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    put_bytes(os, b, 8);
}

std::uint32_t get_u32(std::istream& is) {
    unsigned char b[4];
    get_bytes(is, b, 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

std::uint64_t get_u64(std::istream& is) {
    unsigned char b[8];
    get_bytes(is, b, 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

void put_f64(std::ostream& os, double v) { put_u64(os, std::bit_cast<std::uint64_t>(v)); }

double get_f64(std::istream& is) { return std::bit_cast<double>(get_u64(is)); }

void put_string(std::ostream& os, const std::string& s) {
    put_u64(os, s.size());
    put_bytes(os, s.data(), s.size());
}

std::string get_string(std::istream& is) {
    std::uint64_t n = get_u64(is);
    if (n > kMaxBlob) throw std::runtime_error("checkpoint: oversized string field");
    std::string s(n, '\0');
    if (n) get_bytes(is, s.data(), n);
    return s;
}

void put_vec(std::ostream& os, const std::vector<double>& v) {
    put_u64(os, v.size());
    for (double x : v) put_f64(os, x);
}

std::vector<double> get_vec(std::istream& is) {
    std::uint64_t n = get_u64(is);
    if (n > kMaxBlob / sizeof(double))
        throw std::runtime_error("checkpoint: oversized tensor field");
    std::vector<double> v(n);
    for (auto& x : v) x = get_f64(is);
    return v;
}

void put_conv_set(std::ostream& os, const std::vector<ConvParams>& set) {
    put_u64(os, set.size());
    for (const ConvParams& cp : set) {
        put_vec(os, cp.w);
        put_vec(os, cp.b);
    }
}

std::vector<ConvParams> get_conv_set(std::istream& is) {
    std::uint64_t n = get_u64(is);
    if (n > 1024) throw std::runtime_error("checkpoint: oversized layer count");
    std::vector<ConvParams> set(n);
    for (auto& cp : set) {
        cp.w = get_vec(is);
        cp.b = get_vec(is);
    }
    return set;
}

void put_net(std::ostream& os, const NetParams& p) {
    put_u64(os, p.stamp);
    put_conv_set(os, p.layer);
    put_conv_set(os, p.momentum);
}

NetParams get_net(std::istream& is, const std::vector<LayerSpec>& specs) {
    NetParams p;
    p.specs = specs;
    p.stamp = get_u64(is);
    p.layer = get_conv_set(is);
    p.momentum = get_conv_set(is);
    if (p.layer.size() != specs.size() || p.momentum.size() != specs.size())
        throw std::runtime_error("checkpoint: layer count does not match config");
    for (std::size_t l = 0; l < specs.size(); ++l) {
        const LayerSpec& s = specs[l];
        const std::size_t wn = static_cast<std::size_t>(s.out_c) * s.in_c * s.kernel * s.kernel;
        const std::size_t bn = static_cast<std::size_t>(s.out_c);
        if (p.layer[l].w.size() != wn || p.layer[l].b.size() != bn ||
            p.momentum[l].w.size() != wn || p.momentum[l].b.size() != bn)
            throw std::runtime_error("checkpoint: tensor shape does not match config");
    }
    return p;
}

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& c) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open checkpoint for writing: " + path);
    put_bytes(os, kMagic, 8);
    put_u32(os, c.version);
    put_u64(os, fnv1a64(c.config_text));
    put_string(os, c.config_text);
    put_u64(os, c.iteration);
    put_net(os, c.params);
    put_net(os, c.target_params);
    put_string(os, c.rng_scene);
    put_string(os, c.rng_explore);
    put_string(os, c.rng_per);
    put_u64(os, c.replay.size);
    put_u64(os, c.replay.total_inserted);
    put_f64(os, c.replay.max_priority);
    put_f64(os, c.replay.priority_sum);
    os.flush();
    if (!os) throw std::runtime_error("checkpoint write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open checkpoint: " + path);
    char magic[8];
    get_bytes(is, magic, 8);
    if (std::memcmp(magic, kMagic, 8) != 0)
        throw std::runtime_error("checkpoint: bad magic header");
    Checkpoint c;
    c.version = get_u32(is);
    if (c.version != kVersion)
        throw std::runtime_error("checkpoint: unsupported version " + std::to_string(c.version));
    const std::uint64_t digest = get_u64(is);
    c.config_text = get_string(is);
    if (digest != fnv1a64(c.config_text))
        throw std::runtime_error("checkpoint: config digest mismatch (corrupt file)");
    const RunConfig cfg = parse_run_config(c.config_text);
    const std::vector<LayerSpec> specs = build_layer_specs(cfg.net, cfg.ws);
    c.iteration = get_u64(is);
    c.params = get_net(is, specs);
    c.target_params = get_net(is, specs);
    c.rng_scene = get_string(is);
    c.rng_explore = get_string(is);
    c.rng_per = get_string(is);
    c.replay.size = get_u64(is);
    c.replay.total_inserted = get_u64(is);
    c.replay.max_priority = get_f64(is);
    c.replay.priority_sum = get_f64(is);
    return c;
}

Checkpoint load_checkpoint(const std::string& path, const RunConfig& expect) {
    Checkpoint c = load_checkpoint(path);
    if (fnv1a64(c.config_text) != fnv1a64(serialize_run_config(expect)))
        throw std::runtime_error("checkpoint: config mismatch with expected run configuration");
    return c;
}

Checkpoint snapshot_run(const RunConfig& cfg, const RunState& st) {
    Checkpoint c;
    c.config_text = serialize_run_config(cfg);
    c.iteration = st.iteration;
    c.params = st.params;
    c.target_params = st.target_params;
    c.rng_scene = st.scene_rng.state();
    c.rng_explore = st.explore_rng.state();
    c.rng_per = st.per_rng.state();
    c.replay.size = st.buffer.size();
    c.replay.total_inserted = st.buffer.total_inserted();
    c.replay.max_priority = st.buffer.max_priority();
    c.replay.priority_sum = st.buffer.size() ? st.buffer.priority_sum() : 0.0;
    return c;
}

}  // namespace s2w
