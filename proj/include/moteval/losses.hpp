#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "moteval/temporal_kernel.hpp"
#include "moteval/trajectory.hpp"

namespace moteval {

struct NoiseSchedule {
    std::vector<double> alpha_bar;  // monotone non-increasing, in (0, 1]
};

using NoisePredictor = std::function<FeatureGrid(const FeatureGrid&, int)>;

struct LossWeights {
    double lambda_dl = 1.0;
    double lambda_tl = 0.1;
};

struct TraceEntry {
    double loss_dl = 0.0;
    double loss_tl = 0.0;
    double loss_total = 0.0;
};

NoiseSchedule cosine_alpha_bar(int t_steps);

FeatureGrid predict_latent(const FeatureGrid& clean, const FeatureGrid& noise,
                           const NoiseSchedule& sched, int t,
                           const NoisePredictor& predictor);

double denoising_loss(const FeatureGrid& noise, const FeatureGrid& predicted);

// pixel coords -> latent grid coords by (x * w_lat / w, y * h_lat / h),
// bilinear with edge clamping
std::vector<double> sample_feature_at(const FeatureGrid& latent, const Point2& point,
                                      int frame_index, int frame_w, int frame_h);

// mean over visible consecutive pairs of gate * |feat(t+1) - feat(t)|^2
double tracking_loss(const FeatureGrid& latent, const TrajectorySet& traj);

FeatureGrid tracking_loss_grad(const FeatureGrid& latent, const TrajectorySet& traj);

double combined_loss(double l_dl, double l_tl, const LossWeights& w);

// synthetic moving-blob optimization; returns steps + 1 entries
std::vector<TraceEntry> train_demo(std::uint64_t seed, int steps, double lambda_tl);

}  // namespace moteval
