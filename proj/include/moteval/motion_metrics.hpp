#pragma once

#include <string>
#include <vector>

#include "moteval/trajectory.hpp"

namespace moteval {

struct MotionFidelityConfig {
    double alpha = 0.5;
    bool normalize_by_diagonal = false;
};

struct FrameEmbeddingSequence {
    // vectors[f] is one frame's embedding, all of equal dimension d >= 1
    std::vector<std::vector<double>> vectors;

    int frames() const { return static_cast<int>(vectors.size()); }
    int dim() const { return vectors.empty() ? 0 : static_cast<int>(vectors[0].size()); }
};

// discrete Frechet distance over the n x m coupling table
double frechet_distance(const std::vector<Point2>& p, const std::vector<Point2>& q);

// exhaustive monotone-coupling oracle; requires n, m <= 8
double frechet_bruteforce(const std::vector<Point2>& p, const std::vector<Point2>& q);

// mean over t of cos(dTi(t), dTj(t)); zero-length velocity contributes 0
double velocity_cosine_mean(const std::vector<Point2>& ti, const std::vector<Point2>& tj);

// (1/N) sum_n [alpha * exp(-d_F(A_n, B_n)) + (1 - alpha) * cbar_n]
double motion_fidelity(const TrajectorySet& a, const TrajectorySet& b,
                       const MotionFidelityConfig& cfg);

double edit_fidelity(const FrameEmbeddingSequence& frames, const std::vector<double>& prompt);

double temporal_consistency(const FrameEmbeddingSequence& frames);

// "EMB1" binary: magic, uint32 F, uint32 d (LE), then F*d float32 row-major
FrameEmbeddingSequence load_embeddings(const std::string& path);
void save_embeddings(const FrameEmbeddingSequence& seq, const std::string& path);

}  // namespace moteval
