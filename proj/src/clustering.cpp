#include "moteval/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "moteval/errors.hpp"
#include "moteval/rng.hpp"

namespace moteval {

namespace {

double sqdist(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

void check_features(const std::vector<std::vector<double>>& features) {
    if (features.empty()) throw ParamError("kmeans: no feature rows");
    const size_t d = features[0].size();
    if (d == 0) throw ParamError("kmeans: zero-dimensional features");
    for (const auto& row : features) {
        if (row.size() != d) throw SizeError("kmeans: ragged feature rows");
        for (double v : row) {
            if (!std::isfinite(v)) throw NumericError("kmeans: non-finite feature value");
        }
    }
}

}  // namespace

const char* difficulty_name(DifficultyLevel d) {
    switch (d) {
        case DifficultyLevel::Easy: return "easy";
        case DifficultyLevel::Medium: return "medium";
        default: return "hard";
    }
}

std::vector<std::vector<double>> trajectory_features(const TrajectorySet& traj) {
    std::vector<std::vector<double>> out;
    out.reserve(traj.n());
    for (const auto& tr : traj.points) {
        std::vector<double> row;
        row.reserve(tr.size() * 2);
        for (const auto& p : tr) {
            row.push_back(p[0]);
            row.push_back(p[1]);
        }
        out.push_back(std::move(row));
    }
    return out;
}

ClusterResult kmeans(const std::vector<std::vector<double>>& features, int k,
                     std::uint64_t seed) {
    check_features(features);
    const int n = static_cast<int>(features.size());
    if (k < 1 || k > n) throw ParamError("kmeans: k must be in [1, N]");

    Rng rng(seed);
    std::vector<std::vector<double>> centroids;
    centroids.reserve(k);

    // k-means++ seeding
    centroids.push_back(features[rng.index(n)]);
    std::vector<double> d2(n);
    for (int c = 1; c < k; ++c) {
        double total = 0.0;
        for (int i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& ctr : centroids) best = std::min(best, sqdist(features[i], ctr));
            d2[i] = best;
            total += best;
        }
        int pick;
        if (total <= 0.0) {
            pick = static_cast<int>(rng.index(n));
        } else {
            const double r = rng.uniform01() * total;
            double acc = 0.0;
            pick = n - 1;
            for (int i = 0; i < n; ++i) {
                acc += d2[i];
                if (acc >= r) {
                    pick = i;
                    break;
                }
            }
        }
        centroids.push_back(features[pick]);
    }

    std::vector<int> assign(n, -1), prev_assign;
    for (int iter = 0; iter < 300; ++iter) {
        prev_assign = assign;
        for (int i = 0; i < n; ++i) {
            int best = 0;
            double bd = sqdist(features[i], centroids[0]);
            for (int c = 1; c < k; ++c) {
                const double d = sqdist(features[i], centroids[c]);
                if (d < bd) {
                    bd = d;
                    best = c;
                }
            }
            assign[i] = best;
        }
        // reseed any empty cluster to the point farthest from its own centroid
        for (int c = 0; c < k; ++c) {
            if (std::count(assign.begin(), assign.end(), c) > 0) continue;
            int far = 0;
            double fd = -1.0;
            for (int i = 0; i < n; ++i) {
                const double d = sqdist(features[i], centroids[assign[i]]);
                if (d > fd) {
                    fd = d;
                    far = i;
                }
            }
            centroids[c] = features[far];
            assign[far] = c;
        }
        const size_t d = features[0].size();
        for (int c = 0; c < k; ++c) std::fill(centroids[c].begin(), centroids[c].end(), 0.0);
        std::vector<int> counts(k, 0);
        for (int i = 0; i < n; ++i) {
            ++counts[assign[i]];
            for (size_t j = 0; j < d; ++j) centroids[assign[i]][j] += features[i][j];
        }
        for (int c = 0; c < k; ++c)
            for (size_t j = 0; j < d; ++j) centroids[c][j] /= counts[c];
        if (assign == prev_assign) break;
    }

    ClusterResult res;
    res.k = k;
    res.assignments = assign;
    res.centroids = centroids;
    res.inertia = 0.0;
    for (int i = 0; i < n; ++i) res.inertia += sqdist(features[i], centroids[assign[i]]);
    res.silhouette = k >= 2 ? silhouette_score(features, assign) : 0.0;
    return res;
}

double silhouette_score(const std::vector<std::vector<double>>& features,
                        const std::vector<int>& assignments) {
    check_features(features);
    const int n = static_cast<int>(features.size());
    if (assignments.size() != features.size())
        throw SizeError("silhouette_score: assignment count mismatch");
    int k = 0;
    for (int a : assignments) {
        if (a < 0) throw ParamError("silhouette_score: negative cluster index");
        k = std::max(k, a + 1);
    }
    if (k < 2) throw ParamError("silhouette_score: fewer than 2 clusters");
    std::vector<int> sizes(k, 0);
    for (int a : assignments) ++sizes[a];
    for (int c = 0; c < k; ++c)
        if (sizes[c] == 0) throw ParamError("silhouette_score: empty cluster");

    double total = 0.0;
    std::vector<double> mean_to(k);
    for (int i = 0; i < n; ++i) {
        const int ci = assignments[i];
        if (sizes[ci] == 1) continue;  // singleton contributes 0
        std::fill(mean_to.begin(), mean_to.end(), 0.0);
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            mean_to[assignments[j]] += std::sqrt(sqdist(features[i], features[j]));
        }
        const double a = mean_to[ci] / (sizes[ci] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (int c = 0; c < k; ++c) {
            if (c == ci) continue;
            b = std::min(b, mean_to[c] / sizes[c]);
        }
        const double denom = std::max(a, b);
        if (denom > 0.0) total += (b - a) / denom;
    }
    return total / static_cast<double>(n);
}

ClusterResult select_k(const std::vector<std::vector<double>>& features, int k_min,
                       int k_max, std::uint64_t seed) {
    const int n = static_cast<int>(features.size());
    if (k_min < 2 || k_min > k_max || k_max > n)
        throw ParamError("select_k: need 2 <= k_min <= k_max <= N");
    ClusterResult best;
    bool have = false;
    for (int k = k_min; k <= k_max; ++k) {
        ClusterResult best_k;
        for (int r = 0; r < 3; ++r) {
            ClusterResult cand = kmeans(features, k, derive_seed(seed, k, r));
            if (r == 0 || cand.inertia < best_k.inertia) best_k = std::move(cand);
        }
        if (!have || best_k.silhouette > best.silhouette) {
            best = std::move(best_k);
            have = true;
        }
    }
    return best;
}

DifficultyLevel classify_difficulty(int k) {
    if (k < 1) throw ParamError("classify_difficulty: k must be >= 1");
    if (k <= 3) return DifficultyLevel::Easy;
    if (k <= 6) return DifficultyLevel::Medium;
    return DifficultyLevel::Hard;
}

std::vector<std::array<int, 2>> distance_weighted_sample(const ForegroundMask& mask,
                                                         int count, std::uint64_t seed) {
    if (count < 1) throw ParamError("distance_weighted_sample: count must be >= 1");
    std::vector<std::array<int, 2>> fg;
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x)
            if (mask.at(x, y)) fg.push_back({x, y});
    if (fg.empty()) throw ParamError("distance_weighted_sample: empty mask");
    const int n = static_cast<int>(fg.size());
    if (count >= n) return fg;  // exhaustion: all pixels, row-major order

    auto px_sqdist = [&](int i, int j) {
        const double dx = fg[i][0] - fg[j][0], dy = fg[i][1] - fg[j][1];
        return dx * dx + dy * dy;
    };

    // isolation: mean squared distance to the 32 nearest other foreground pixels
    std::vector<double> iso(n);
    std::vector<double> d2(n - 1);
    for (int i = 0; i < n; ++i) {
        int m = 0;
        for (int j = 0; j < n; ++j)
            if (j != i) d2[m++] = px_sqdist(i, j);
        const int knn = std::min(32, n - 1);
        std::nth_element(d2.begin(), d2.begin() + (knn - 1), d2.end());
        double s = 0.0;
        for (int j = 0; j < knn; ++j) s += d2[j];
        iso[i] = s / knn;
    }

    Rng rng(seed);
    std::vector<std::array<int, 2>> chosen;
    std::vector<char> taken(n, 0);
    std::vector<double> weight(n);
    for (int draw = 0; draw < count; ++draw) {
        double total = 0.0;
        for (int i = 0; i < n; ++i) {
            if (taken[i]) {
                weight[i] = 0.0;
                continue;
            }
            double w = iso[i];
            if (draw > 0) {
                double nearest = std::numeric_limits<double>::infinity();
                for (int c = 0; c < static_cast<int>(chosen.size()); ++c) {
                    const double dx = fg[i][0] - chosen[c][0], dy = fg[i][1] - chosen[c][1];
                    nearest = std::min(nearest, dx * dx + dy * dy);
                }
                w *= nearest;
            }
            weight[i] = w;
            total += w;
        }
        int pick = -1;
        if (total <= 0.0) {
            // all remaining weights vanish (e.g. duplicate geometry): first free index
            for (int i = 0; i < n; ++i)
                if (!taken[i]) {
                    pick = i;
                    break;
                }
        } else {
            const double r = rng.uniform01() * total;
            double acc = 0.0;
            for (int i = 0; i < n; ++i) {
                if (taken[i]) continue;
                acc += weight[i];
                if (acc >= r) {
                    pick = i;
                    break;
                }
            }
            if (pick < 0) {
                for (int i = n - 1; i >= 0; --i)
                    if (!taken[i]) {
                        pick = i;
                        break;
                    }
            }
        }
        taken[pick] = 1;
        chosen.push_back(fg[pick]);
    }
    return chosen;
}

}  // namespace moteval
