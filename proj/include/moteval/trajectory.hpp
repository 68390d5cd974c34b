#pragma once

#include <array>
#include <string>
#include <vector>

namespace moteval {

using Point2 = std::array<double, 2>;  // x right, y down

struct TrajectorySet {
    // points[n][t] = (x, y); visibility[n][t] in {0,1}
    std::vector<std::vector<Point2>> points;
    std::vector<std::vector<int>> visibility;
    int frame_width = 0;
    int frame_height = 0;

    int n() const { return static_cast<int>(points.size()); }
    int t() const { return points.empty() ? 0 : static_cast<int>(points[0].size()); }

    // throws ValidationError on any invariant breach
    void validate() const;
};

struct VelocityField {
    // deltas[n][t] = points[n][t+1] - points[n][t]
    std::vector<std::vector<Point2>> deltas;
};

struct ForegroundMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits;  // row-major, 1 = foreground

    std::uint8_t at(int x, int y) const { return bits[static_cast<size_t>(y) * width + x]; }
    int foreground_count() const;
};

TrajectorySet load_trajectories(const std::string& path);
void save_trajectories(const TrajectorySet& traj, const std::string& path);

VelocityField velocities(const TrajectorySet& traj);

// PGM P2/P5; pixel > 127 maps to foreground
ForegroundMask load_mask(const std::string& path);

}  // namespace moteval
