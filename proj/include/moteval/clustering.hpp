#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "moteval/trajectory.hpp"

namespace moteval {

struct ClusterResult {
    int k = 0;
    std::vector<int> assignments;           // [N], values in [0, k)
    std::vector<std::vector<double>> centroids;  // [k][D]
    double silhouette = 0.0;
    double inertia = 0.0;
};

enum class DifficultyLevel { Easy, Medium, Hard };

const char* difficulty_name(DifficultyLevel d);  // "easy" / "medium" / "hard"

// each trajectory flattened to (x0, y0, x1, y1, ...)
std::vector<std::vector<double>> trajectory_features(const TrajectorySet& traj);

// k-means++ seeding, Lloyd to assignment fixed point (max 300 iters),
// empty clusters reseeded to the farthest point
ClusterResult kmeans(const std::vector<std::vector<double>>& features, int k,
                     std::uint64_t seed);

double silhouette_score(const std::vector<std::vector<double>>& features,
                        const std::vector<int>& assignments);

// scans [k_min, k_max], 3 restarts per k (best inertia), returns max silhouette,
// ties toward smaller k
ClusterResult select_k(const std::vector<std::vector<double>>& features, int k_min,
                       int k_max, std::uint64_t seed);

DifficultyLevel classify_difficulty(int k);

// without replacement; isolation weight = mean squared distance to the 32
// nearest foreground pixels, spread factor = squared distance to the nearest
// already-chosen point
std::vector<std::array<int, 2>> distance_weighted_sample(const ForegroundMask& mask,
                                                         int count, std::uint64_t seed);

}  // namespace moteval
