#include "moteval/motion_metrics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "moteval/errors.hpp"

namespace moteval {

namespace {

double dist(const Point2& a, const Point2& b) {
    const double dx = a[0] - b[0], dy = a[1] - b[1];
    return std::sqrt(dx * dx + dy * dy);
}

// dot / sqrt(na2 * nb2): the single sqrt keeps cos(v, v) exactly 1.0
double cosine(const std::vector<double>& a, const std::vector<double>& b) {
    double dot = 0.0, na2 = 0.0, nb2 = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na2 += a[i] * a[i];
        nb2 += b[i] * b[i];
    }
    if (na2 == 0.0 || nb2 == 0.0) throw NumericError("zero-norm embedding vector");
    return std::clamp(dot / std::sqrt(na2 * nb2), -1.0, 1.0);
}

}  // namespace

double frechet_distance(const std::vector<Point2>& p, const std::vector<Point2>& q) {
    if (p.empty() || q.empty()) throw SizeError("frechet_distance: empty polyline");
    const size_t n = p.size(), m = q.size();
    std::vector<double> prev(m), cur(m);
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < m; ++j) {
            const double d = dist(p[i], q[j]);
            double reach;
            if (i == 0 && j == 0) {
                reach = d;
            } else if (i == 0) {
                reach = std::max(cur[j - 1], d);
            } else if (j == 0) {
                reach = std::max(prev[0], d);
            } else {
                reach = std::max(std::min({prev[j - 1], prev[j], cur[j - 1]}), d);
            }
            cur[j] = reach;
        }
        std::swap(prev, cur);
    }
    return prev[m - 1];
}

namespace {

// walks every monotone coupling path explicitly; no memoization, so it is a
// genuinely independent check of the dynamic program
void walk_couplings(const std::vector<Point2>& p, const std::vector<Point2>& q,
                    size_t i, size_t j, double running_max, double& best) {
    running_max = std::max(running_max, dist(p[i], q[j]));
    if (running_max >= best) return;  // cannot improve the minimum
    if (i + 1 == p.size() && j + 1 == q.size()) {
        best = running_max;
        return;
    }
    if (i + 1 < p.size()) walk_couplings(p, q, i + 1, j, running_max, best);
    if (j + 1 < q.size()) walk_couplings(p, q, i, j + 1, running_max, best);
    if (i + 1 < p.size() && j + 1 < q.size())
        walk_couplings(p, q, i + 1, j + 1, running_max, best);
}

}  // namespace

double frechet_bruteforce(const std::vector<Point2>& p, const std::vector<Point2>& q) {
    if (p.empty() || q.empty()) throw SizeError("frechet_bruteforce: empty polyline");
    if (p.size() > 8 || q.size() > 8)
        throw SizeError("frechet_bruteforce: polylines longer than 8 points");
    double best = std::numeric_limits<double>::infinity();
    walk_couplings(p, q, 0, 0, 0.0, best);
    return best;
}

double velocity_cosine_mean(const std::vector<Point2>& ti, const std::vector<Point2>& tj) {
    if (ti.size() != tj.size()) throw SizeError("velocity_cosine_mean: unequal lengths");
    if (ti.size() < 2) throw SizeError("velocity_cosine_mean: need at least 2 points");
    double sum = 0.0;
    const size_t steps = ti.size() - 1;
    for (size_t t = 0; t < steps; ++t) {
        const double ax = ti[t + 1][0] - ti[t][0], ay = ti[t + 1][1] - ti[t][1];
        const double bx = tj[t + 1][0] - tj[t][0], by = tj[t + 1][1] - tj[t][1];
        const double na2 = ax * ax + ay * ay, nb2 = bx * bx + by * by;
        if (na2 == 0.0 || nb2 == 0.0) continue;  // static point: no direction evidence
        sum += std::clamp((ax * bx + ay * by) / std::sqrt(na2 * nb2), -1.0, 1.0);
    }
    return sum / static_cast<double>(steps);
}

double motion_fidelity(const TrajectorySet& a, const TrajectorySet& b,
                       const MotionFidelityConfig& cfg) {
    if (a.n() != b.n()) throw SizeError("trajectory count mismatch");
    if (a.t() != b.t()) throw SizeError("trajectory length mismatch");
    double scale = 1.0;
    if (cfg.normalize_by_diagonal) {
        const double w = a.frame_width, h = a.frame_height;
        scale = 1.0 / std::sqrt(w * w + h * h);
    }
    double sum = 0.0;
    for (int n = 0; n < a.n(); ++n) {
        std::vector<Point2> pa = a.points[n], pb = b.points[n];
        if (scale != 1.0) {
            for (auto& p : pa) { p[0] *= scale; p[1] *= scale; }
            for (auto& p : pb) { p[0] *= scale; p[1] *= scale; }
        }
        const double df = frechet_distance(pa, pb);
        const double cb = velocity_cosine_mean(pa, pb);
        sum += cfg.alpha * std::exp(-df) + (1.0 - cfg.alpha) * cb;
    }
    return sum / static_cast<double>(a.n());
}

double edit_fidelity(const FrameEmbeddingSequence& frames, const std::vector<double>& prompt) {
    if (frames.frames() < 1) throw SizeError("edit_fidelity: no frames");
    if (frames.dim() != static_cast<int>(prompt.size()))
        throw SizeError("edit_fidelity: embedding dimension mismatch");
    double sum = 0.0;
    for (const auto& f : frames.vectors) sum += cosine(f, prompt);
    return sum / static_cast<double>(frames.frames());
}

double temporal_consistency(const FrameEmbeddingSequence& frames) {
    if (frames.frames() < 2) throw SizeError("temporal_consistency: need at least 2 frames");
    double sum = 0.0;
    for (int f = 0; f + 1 < frames.frames(); ++f)
        sum += cosine(frames.vectors[f], frames.vectors[f + 1]);
    return sum / static_cast<double>(frames.frames() - 1);
}

namespace {

void put_u32(std::string& out, std::uint32_t v) {
    out.push_back(static_cast<char>(v & 0xFF));
    out.push_back(static_cast<char>((v >> 8) & 0xFF));
    out.push_back(static_cast<char>((v >> 16) & 0xFF));
    out.push_back(static_cast<char>((v >> 24) & 0xFF));
}

std::uint32_t get_u32(const std::string& buf, size_t pos) {
    return static_cast<std::uint32_t>(static_cast<unsigned char>(buf[pos])) |
           (static_cast<std::uint32_t>(static_cast<unsigned char>(buf[pos + 1])) << 8) |
           (static_cast<std::uint32_t>(static_cast<unsigned char>(buf[pos + 2])) << 16) |
           (static_cast<std::uint32_t>(static_cast<unsigned char>(buf[pos + 3])) << 24);
}

}  // namespace

FrameEmbeddingSequence load_embeddings(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file: " + path);
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (buf.size() < 12 || buf.compare(0, 4, "EMB1") != 0)
        throw ParseError("embedding file: bad magic (want EMB1)");
    const std::uint32_t f = get_u32(buf, 4);
    const std::uint32_t d = get_u32(buf, 8);
    if (f < 1 || d < 1) throw ParseError("embedding file: zero dimension");
    const size_t need = 12 + static_cast<size_t>(f) * d * 4;
    if (buf.size() < need) throw ParseError("embedding file: truncated payload");
    FrameEmbeddingSequence seq;
    seq.vectors.assign(f, std::vector<double>(d));
    size_t pos = 12;
    for (std::uint32_t i = 0; i < f; ++i) {
        for (std::uint32_t j = 0; j < d; ++j) {
            std::uint32_t raw = get_u32(buf, pos);
            pos += 4;
            seq.vectors[i][j] = static_cast<double>(std::bit_cast<float>(raw));
        }
    }
    return seq;
}

void save_embeddings(const FrameEmbeddingSequence& seq, const std::string& path) {
    if (seq.frames() < 1 || seq.dim() < 1)
        throw SizeError("save_embeddings: empty sequence");
    std::string out = "EMB1";
    put_u32(out, static_cast<std::uint32_t>(seq.frames()));
    put_u32(out, static_cast<std::uint32_t>(seq.dim()));
    for (const auto& row : seq.vectors) {
        if (static_cast<int>(row.size()) != seq.dim())
            throw SizeError("save_embeddings: ragged rows");
        for (double v : row)
            put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ParseError("cannot write file: " + path);
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
}

}  // namespace moteval
