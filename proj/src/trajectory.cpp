#include "moteval/trajectory.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "moteval/errors.hpp"

namespace moteval {

using nlohmann::ordered_json;

void TrajectorySet::validate() const {
    if (points.empty()) throw ValidationError("trajectory set is empty (N >= 1 required)");
    if (frame_width < 1 || frame_height < 1)
        throw ValidationError("frame_size must be positive");
    const size_t T = points[0].size();
    if (T < 2) throw ValidationError("trajectory length T < 2");
    if (visibility.size() != points.size())
        throw ValidationError("visibility count does not match trajectory count");
    for (size_t n = 0; n < points.size(); ++n) {
        if (points[n].size() != T) throw ValidationError("unequal T");
        if (visibility[n].size() != T)
            throw ValidationError("visibility length does not match T");
        for (const auto& p : points[n]) {
            if (!std::isfinite(p[0]) || !std::isfinite(p[1]))
                throw ValidationError("non-finite coordinate");
        }
        for (int v : visibility[n]) {
            if (v != 0 && v != 1) throw ValidationError("visibility not in {0,1}");
        }
    }
}

int ForegroundMask::foreground_count() const {
    int cnt = 0;
    for (auto b : bits) cnt += (b != 0);
    return cnt;
}

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

double number_field(const ordered_json& j, const char* what) {
    if (!j.is_number()) throw ParseError(std::string("expected number for ") + what);
    return j.get<double>();
}

}  // namespace

TrajectorySet load_trajectories(const std::string& path) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("trajectory file parse error: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("trajectory file: top level is not an object");
    if (!doc.contains("frame_size") || !doc["frame_size"].is_array() ||
        doc["frame_size"].size() != 2)
        throw ParseError("trajectory file: missing or malformed frame_size");
    if (!doc.contains("trajectories") || !doc["trajectories"].is_array())
        throw ParseError("trajectory file: missing or malformed trajectories");

    TrajectorySet ts;
    ts.frame_width = static_cast<int>(number_field(doc["frame_size"][0], "frame_size[0]"));
    ts.frame_height = static_cast<int>(number_field(doc["frame_size"][1], "frame_size[1]"));
    for (const auto& tj : doc["trajectories"]) {
        if (!tj.is_object() || !tj.contains("points") || !tj["points"].is_array())
            throw ParseError("trajectory entry: missing points array");
        if (!tj.contains("visibility") || !tj["visibility"].is_array())
            throw ParseError("trajectory entry: missing visibility array");
        std::vector<Point2> pts;
        for (const auto& p : tj["points"]) {
            if (!p.is_array() || p.size() != 2)
                throw ParseError("trajectory point is not an [x,y] pair");
            pts.push_back({number_field(p[0], "x"), number_field(p[1], "y")});
        }
        std::vector<int> vis;
        for (const auto& v : tj["visibility"]) {
            if (v.is_number_integer()) {
                vis.push_back(v.get<int>());
            } else if (v.is_number()) {
                double d = v.get<double>();
                vis.push_back(d == 0.0 ? 0 : (d == 1.0 ? 1 : 2));  // 2 fails validation
            } else {
                throw ParseError("visibility entry is not a number");
            }
        }
        ts.points.push_back(std::move(pts));
        ts.visibility.push_back(std::move(vis));
    }
    ts.validate();
    return ts;
}

void save_trajectories(const TrajectorySet& traj, const std::string& path) {
    traj.validate();
    ordered_json doc;
    doc["frame_size"] = {traj.frame_width, traj.frame_height};
    doc["trajectories"] = ordered_json::array();
    for (int n = 0; n < traj.n(); ++n) {
        ordered_json entry;
        auto pts = ordered_json::array();
        for (const auto& p : traj.points[n]) pts.push_back({p[0], p[1]});
        entry["points"] = std::move(pts);
        entry["visibility"] = traj.visibility[n];
        doc["trajectories"].push_back(std::move(entry));
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write file: " + path);
    out << doc.dump(2) << "\n";
}

VelocityField velocities(const TrajectorySet& traj) {
    if (traj.t() < 2) throw SizeError("velocities requires T >= 2");
    VelocityField vf;
    vf.deltas.resize(traj.n());
    for (int n = 0; n < traj.n(); ++n) {
        vf.deltas[n].reserve(traj.t() - 1);
        for (int t = 0; t + 1 < traj.t(); ++t) {
            vf.deltas[n].push_back({traj.points[n][t + 1][0] - traj.points[n][t][0],
                                    traj.points[n][t + 1][1] - traj.points[n][t][1]});
        }
    }
    return vf;
}

namespace {

// PGM header tokens, skipping whitespace and # comments
struct PgmScanner {
    const std::string& buf;
    size_t pos = 0;

    explicit PgmScanner(const std::string& b) : buf(b) {}

    void skip_space() {
        while (pos < buf.size()) {
            if (std::isspace(static_cast<unsigned char>(buf[pos]))) {
                ++pos;
            } else if (buf[pos] == '#') {
                while (pos < buf.size() && buf[pos] != '\n') ++pos;
            } else {
                break;
            }
        }
    }

    int next_int(const char* what) {
        skip_space();
        size_t start = pos;
        while (pos < buf.size() && std::isdigit(static_cast<unsigned char>(buf[pos]))) ++pos;
        if (pos == start)
            throw ParseError(std::string("PGM: expected integer for ") + what);
        return std::stoi(buf.substr(start, pos - start));
    }
};

}  // namespace

ForegroundMask load_mask(const std::string& path) {
    const std::string buf = read_file(path);
    if (buf.size() < 2 || buf[0] != 'P' || (buf[1] != '2' && buf[1] != '5'))
        throw ParseError("PGM: bad magic number (want P2 or P5)");
    const bool binary = buf[1] == '5';
    PgmScanner sc(buf);
    sc.pos = 2;
    ForegroundMask mask;
    mask.width = sc.next_int("width");
    mask.height = sc.next_int("height");
    const int maxval = sc.next_int("maxval");
    if (mask.width < 1 || mask.height < 1) throw ParseError("PGM: non-positive dimensions");
    if (maxval < 1 || maxval > 255) throw ParseError("PGM: unsupported maxval");
    const size_t n = static_cast<size_t>(mask.width) * mask.height;
    mask.bits.resize(n);
    if (binary) {
        if (sc.pos >= buf.size() ||
            !std::isspace(static_cast<unsigned char>(buf[sc.pos])))
            throw ParseError("PGM: missing raster separator");
        ++sc.pos;
        if (buf.size() - sc.pos < n) throw ParseError("PGM: truncated raster");
        for (size_t i = 0; i < n; ++i)
            mask.bits[i] = static_cast<std::uint8_t>(buf[sc.pos + i]) > 127 ? 1 : 0;
    } else {
        for (size_t i = 0; i < n; ++i) {
            int v = sc.next_int("pixel");
            if (v < 0 || v > maxval) throw ParseError("PGM: pixel out of range");
            mask.bits[i] = v > 127 ? 1 : 0;
        }
    }
    return mask;
}

}  // namespace moteval
