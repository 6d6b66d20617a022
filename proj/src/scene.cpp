#include "s2w/scene.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace s2w {

bool Scene::operator==(const Scene& o) const {
    auto pose_eq = [](const Pose2D& a, const Pose2D& b) {
        return a.x == b.x && a.y == b.y && a.theta_deg == b.theta_deg;
    };
    if (!pose_eq(object.pose, o.object.pose) || object.width_cm != o.object.width_cm ||
        object.length_cm != o.object.length_cm || object.height_cm != o.object.height_cm ||
        object.intensity != o.object.intensity)
        return false;
    if (walls.size() != o.walls.size()) return false;
    for (std::size_t k = 0; k < walls.size(); ++k) {
        const Wall& a = walls[k];
        const Wall& b = o.walls[k];
        if (!pose_eq(a.pose, b.pose) || a.length_cm != b.length_cm ||
            a.thickness_cm != b.thickness_cm || a.height_cm != b.height_cm ||
            a.intensity != b.intensity)
            return false;
    }
    return floor_intensity == o.floor_intensity && rng_seed == o.rng_seed;
}

namespace {

constexpr const char* kHeader = "s2w-scene v1";

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

double read_double(std::istringstream& is, const char* what) {
    double x;
    if (!(is >> x)) throw std::runtime_error(std::string("scene parse: bad ") + what);
    return x;
}

}  // namespace

std::string serialize_scene(const Scene& s) {
    std::ostringstream os;
    os << kHeader << "\n";
    os << "seed " << s.rng_seed << "\n";
    os << "floor " << fmt(s.floor_intensity) << "\n";
    os << "object " << fmt(s.object.pose.x) << " " << fmt(s.object.pose.y) << " "
       << fmt(s.object.pose.theta_deg) << " " << fmt(s.object.width_cm) << " "
       << fmt(s.object.length_cm) << " " << fmt(s.object.height_cm) << " "
       << fmt(s.object.intensity) << "\n";
    os << "walls " << s.walls.size() << "\n";
    for (const Wall& w : s.walls) {
        os << "wall " << fmt(w.pose.x) << " " << fmt(w.pose.y) << " " << fmt(w.pose.theta_deg)
           << " " << fmt(w.length_cm) << " " << fmt(w.thickness_cm) << " " << fmt(w.height_cm)
           << " " << fmt(w.intensity) << "\n";
    }
    return os.str();
}

namespace {

Scene parse_scene_stream(std::istream& in) {
    std::string line;
    auto next_line = [&](const char* what) {
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!line.empty()) return;
        }
        throw std::runtime_error(std::string("scene parse: missing ") + what);
    };

    next_line("header");
    if (line != kHeader) throw std::runtime_error("scene parse: unknown header '" + line + "'");

    Scene s;
    next_line("seed");
    {
        std::istringstream is(line);
        std::string tag;
        is >> tag >> s.rng_seed;
        if (tag != "seed" || !is) throw std::runtime_error("scene parse: bad seed line");
    }
    next_line("floor");
    {
        std::istringstream is(line);
        std::string tag;
        is >> tag;
        if (tag != "floor") throw std::runtime_error("scene parse: bad floor line");
        s.floor_intensity = read_double(is, "floor");
    }
    next_line("object");
    {
        std::istringstream is(line);
        std::string tag;
        is >> tag;
        if (tag != "object") throw std::runtime_error("scene parse: bad object line");
        s.object.pose.x = read_double(is, "object x");
        s.object.pose.y = read_double(is, "object y");
        s.object.pose.theta_deg = read_double(is, "object theta");
        s.object.width_cm = read_double(is, "object width");
        s.object.length_cm = read_double(is, "object length");
        s.object.height_cm = read_double(is, "object height");
        s.object.intensity = read_double(is, "object intensity");
    }
    next_line("walls");
    std::size_t count = 0;
    {
        std::istringstream is(line);
        std::string tag;
        is >> tag >> count;
        if (tag != "walls" || !is) throw std::runtime_error("scene parse: bad walls line");
    }
    for (std::size_t k = 0; k < count; ++k) {
        next_line("wall");
        std::istringstream is(line);
        std::string tag;
        is >> tag;
        if (tag != "wall") throw std::runtime_error("scene parse: bad wall line");
        Wall w;
        w.pose.x = read_double(is, "wall x");
        w.pose.y = read_double(is, "wall y");
        w.pose.theta_deg = read_double(is, "wall theta");
        w.length_cm = read_double(is, "wall length");
        w.thickness_cm = read_double(is, "wall thickness");
        w.height_cm = read_double(is, "wall height");
        w.intensity = read_double(is, "wall intensity");
        s.walls.push_back(w);
    }
    return s;
}

}  // namespace

Scene parse_scene(const std::string& text) {
    std::istringstream is(text);
    return parse_scene_stream(is);
}

void write_scene_set(std::ostream& os, const std::vector<Scene>& scenes) {
    os << "s2w-scene-set v1 " << scenes.size() << "\n";
    for (const Scene& s : scenes) os << serialize_scene(s);
}

std::vector<Scene> read_scene_set(std::istream& is) {
    std::string header;
    std::getline(is, header);
    std::istringstream hs(header);
    std::string a, b;
    std::size_t count = 0;
    hs >> a >> b >> count;
    if (a != "s2w-scene-set" || b != "v1" || !hs)
        throw std::runtime_error("scene set parse: bad header");
    std::vector<Scene> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) out.push_back(parse_scene_stream(is));
    return out;
}

}  // namespace s2w
