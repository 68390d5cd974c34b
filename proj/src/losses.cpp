#include "moteval/losses.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "moteval/errors.hpp"
#include "moteval/rng.hpp"

namespace moteval {

NoiseSchedule cosine_alpha_bar(int t_steps) {
    if (t_steps < 1) throw ParamError("cosine_alpha_bar: T must be >= 1");
    NoiseSchedule s;
    s.alpha_bar.resize(t_steps);
    const double half_pi = std::numbers::pi / 2.0;
    const double f0 = std::cos((0.008 / 1.008) * half_pi);
    const double norm = f0 * f0;
    for (int t = 0; t < t_steps; ++t) {
        const double c = std::cos(((static_cast<double>(t) / t_steps + 0.008) / 1.008) * half_pi);
        const double v = c * c / norm;
        s.alpha_bar[t] = std::min(1.0, std::max(1e-5, v));
    }
    return s;
}

FeatureGrid predict_latent(const FeatureGrid& clean, const FeatureGrid& noise,
                           const NoiseSchedule& sched, int t,
                           const NoisePredictor& predictor) {
    if (!clean.same_shape(noise)) throw SizeError("predict_latent: clean/noise shape mismatch");
    if (t < 0 || t >= static_cast<int>(sched.alpha_bar.size()))
        throw ParamError("predict_latent: step index out of range");
    const double ab = sched.alpha_bar[t];
    const double sa = std::sqrt(ab);
    const double su = std::sqrt(1.0 - ab);

    FeatureGrid noised = clean;
    for (size_t i = 0; i < noised.data.size(); ++i)
        noised.data[i] = sa * clean.data[i] + su * noise.data[i];

    FeatureGrid v = predictor(noised, t);
    if (!v.same_shape(clean)) throw SizeError("predict_latent: predictor output shape mismatch");

    FeatureGrid out = noised;
    for (size_t i = 0; i < out.data.size(); ++i)
        out.data[i] = sa * noised.data[i] - su * v.data[i];
    return out;
}

double denoising_loss(const FeatureGrid& noise, const FeatureGrid& predicted) {
    if (!noise.same_shape(predicted)) throw SizeError("denoising_loss: shape mismatch");
    double s = 0.0;
    for (size_t i = 0; i < noise.data.size(); ++i) {
        const double d = predicted.data[i] - noise.data[i];
        s += d * d;
    }
    return s / static_cast<double>(noise.data.size());
}

namespace {

struct BilCell {
    int y, x;
    double w;
};

std::array<BilCell, 4> bilinear_cells(const FeatureGrid& latent, const Point2& point,
                                      int frame_w, int frame_h) {
    const double u = point[0] * latent.w / frame_w;
    const double v = point[1] * latent.h / frame_h;
    const double x0f = std::floor(u);
    const double y0f = std::floor(v);
    const double ax = u - x0f;
    const double ay = v - y0f;
    auto cl = [](double base, int hi) {
        const long long i = static_cast<long long>(base);
        return static_cast<int>(std::clamp(i, 0LL, static_cast<long long>(hi)));
    };
    const int x0 = cl(x0f, latent.w - 1), x1 = cl(x0f + 1, latent.w - 1);
    const int y0 = cl(y0f, latent.h - 1), y1 = cl(y0f + 1, latent.h - 1);
    return {{{y0, x0, (1.0 - ax) * (1.0 - ay)},
             {y0, x1, ax * (1.0 - ay)},
             {y1, x0, (1.0 - ax) * ay},
             {y1, x1, ax * ay}}};
}

void check_tracking_dims(const FeatureGrid& latent, const TrajectorySet& traj) {
    if (latent.t < 1 || latent.h < 1 || latent.w < 1 || latent.c < 1)
        throw SizeError("tracking loss: empty latent grid");
    if (!traj.points.empty() && static_cast<int>(traj.t()) != latent.t)
        throw SizeError("tracking loss: frame count mismatch");
}

}  // namespace

std::vector<double> sample_feature_at(const FeatureGrid& latent, const Point2& point,
                                      int frame_index, int frame_w, int frame_h) {
    if (frame_index < 0 || frame_index >= latent.t)
        throw ParamError("sample_feature_at: frame index out of range");
    if (frame_w < 1 || frame_h < 1) throw ParamError("sample_feature_at: bad frame size");
    const auto cells = bilinear_cells(latent, point, frame_w, frame_h);
    std::vector<double> out(latent.c, 0.0);
    for (const auto& cell : cells)
        for (int ch = 0; ch < latent.c; ++ch)
            out[ch] += cell.w * latent.at(frame_index, cell.y, cell.x, ch);
    return out;
}

double tracking_loss(const FeatureGrid& latent, const TrajectorySet& traj) {
    check_tracking_dims(latent, traj);
    double total = 0.0;
    int gated = 0;
    for (int n = 0; n < traj.n(); ++n) {
        for (int t = 0; t + 1 < traj.t(); ++t) {
            if (traj.visibility[n][t] == 0 || traj.visibility[n][t + 1] == 0) continue;
            const auto fa = sample_feature_at(latent, traj.points[n][t + 1],
                                              static_cast<int>(t) + 1, traj.frame_width,
                                              traj.frame_height);
            const auto fb = sample_feature_at(latent, traj.points[n][t], static_cast<int>(t),
                                              traj.frame_width, traj.frame_height);
            for (int ch = 0; ch < latent.c; ++ch) {
                const double d = fa[ch] - fb[ch];
                total += d * d;
            }
            ++gated;
        }
    }
    return gated > 0 ? total / gated : 0.0;
}

FeatureGrid tracking_loss_grad(const FeatureGrid& latent, const TrajectorySet& traj) {
    check_tracking_dims(latent, traj);
    FeatureGrid grad(latent.t, latent.h, latent.w, latent.c);
    int gated = 0;
    for (int n = 0; n < traj.n(); ++n)
        for (int t = 0; t + 1 < traj.t(); ++t)
            if (traj.visibility[n][t] != 0 && traj.visibility[n][t + 1] != 0) ++gated;
    if (gated == 0) return grad;

    std::vector<double> diff(latent.c);
    for (int n = 0; n < traj.n(); ++n) {
        for (int t = 0; t + 1 < traj.t(); ++t) {
            if (traj.visibility[n][t] == 0 || traj.visibility[n][t + 1] == 0) continue;
            const auto ca = bilinear_cells(latent, traj.points[n][t + 1], traj.frame_width,
                                           traj.frame_height);
            const auto cb = bilinear_cells(latent, traj.points[n][t], traj.frame_width,
                                           traj.frame_height);
            const int fa = static_cast<int>(t) + 1;
            const int fb = static_cast<int>(t);
            for (int ch = 0; ch < latent.c; ++ch) {
                double va = 0.0, vb = 0.0;
                for (const auto& cell : ca) va += cell.w * latent.at(fa, cell.y, cell.x, ch);
                for (const auto& cell : cb) vb += cell.w * latent.at(fb, cell.y, cell.x, ch);
                diff[ch] = 2.0 * (va - vb) / gated;
            }
            for (const auto& cell : ca)
                for (int ch = 0; ch < latent.c; ++ch)
                    grad.at(fa, cell.y, cell.x, ch) += cell.w * diff[ch];
            for (const auto& cell : cb)
                for (int ch = 0; ch < latent.c; ++ch)
                    grad.at(fb, cell.y, cell.x, ch) -= cell.w * diff[ch];
        }
    }
    return grad;
}

double combined_loss(double l_dl, double l_tl, const LossWeights& w) {
    return w.lambda_dl * l_dl + w.lambda_tl * l_tl;
}

std::vector<TraceEntry> train_demo(std::uint64_t seed, int steps, double lambda_tl) {
    if (steps < 1) throw ParamError("train_demo: steps must be >= 1");

    constexpr int T = 8, H = 8, W = 8, C = 4;
    constexpr int M = 12, K = 3;
    constexpr double kBaseScale = 1.2;
    constexpr double kSigma = 1.8;
    constexpr double kLr = 1e-2;
    const double amps[C] = {16.0, 12.0, 8.0, 4.0};

    // moving blob: one Gaussian bump per frame drifting across the grid
    FeatureGrid clean(T, H, W, C);
    std::vector<Point2> centers(T);
    for (int f = 0; f < T; ++f) {
        const double cx = 1.0 + 5.0 * f / (T - 1);
        const double cy = 1.5 + 4.5 * f / (T - 1);
        centers[f] = {cx, cy};
        for (int y = 0; y < H; ++y)
            for (int x = 0; x < W; ++x) {
                const double r2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
                const double g = std::exp(-r2 / (2.0 * kSigma * kSigma));
                for (int ch = 0; ch < C; ++ch) clean.at(f, y, x, ch) = amps[ch] * g;
            }
    }

    TrajectorySet traj;
    traj.frame_width = W;
    traj.frame_height = H;
    const Point2 offsets[5] = {{0.0, 0.0}, {0.7, 0.0}, {-0.7, 0.0}, {0.0, 0.7}, {0.0, -0.7}};
    for (const auto& off : offsets) {
        std::vector<Point2> pts(T);
        for (int f = 0; f < T; ++f) pts[f] = {centers[f][0] + off[0], centers[f][1] + off[1]};
        traj.points.push_back(std::move(pts));
        traj.visibility.push_back(std::vector<int>(T, 1));
    }

    const NoiseSchedule sched = cosine_alpha_bar(50);
    const double ab = sched.alpha_bar[30];
    const double sa = std::sqrt(ab);
    const double su = std::sqrt(1.0 - ab);

    Rng rng(seed);
    FeatureGrid eps(T, H, W, C);
    for (double& v : eps.data) v = rng.normal();
    FeatureGrid noised = clean;
    for (size_t i = 0; i < noised.data.size(); ++i)
        noised.data[i] = sa * clean.data[i] + su * eps.data[i];

    std::vector<TemporalKernelParams> params(2);
    const double bound = 1.0 / std::sqrt(static_cast<double>(K) * C);
    for (auto& p : params) {
        p.k = K;
        p.c = C;
        p.m = M;
        p.k_down.resize(static_cast<size_t>(K) * C * M);
        for (double& w : p.k_down) w = rng.uniform(-bound, bound);
        p.k_up.assign(static_cast<size_t>(K) * M * C, 0.0);
    }

    auto scaled = [](const FeatureGrid& g, double s) {
        FeatureGrid out = g;
        for (double& v : out.data) v *= s;
        return out;
    };

    std::vector<TraceEntry> trace;
    trace.reserve(steps + 1);
    const double n_elems = static_cast<double>(noised.data.size());
    for (int step = 0; step <= steps; ++step) {
        const FeatureGrid base0 = scaled(noised, kBaseScale);
        const FeatureGrid x1 = kernel_forward(noised, params[0], base0);
        const FeatureGrid base1 = scaled(x1, kBaseScale);
        const FeatureGrid v = kernel_forward(x1, params[1], base1);

        const double l_dl = denoising_loss(eps, v);
        FeatureGrid pred = noised;
        for (size_t i = 0; i < pred.data.size(); ++i)
            pred.data[i] = sa * noised.data[i] - su * v.data[i];
        const double l_tl = tracking_loss(pred, traj);
        LossWeights w;
        w.lambda_tl = lambda_tl;
        trace.push_back({l_dl, l_tl, combined_loss(l_dl, l_tl, w)});
        if (step == steps) break;

        const FeatureGrid g_tl = tracking_loss_grad(pred, traj);
        FeatureGrid dv(T, H, W, C);
        const double tl_coeff = lambda_tl * (-su);
        for (size_t i = 0; i < dv.data.size(); ++i)
            dv.data[i] = 2.0 * (v.data[i] - eps.data[i]) / n_elems + tl_coeff * g_tl.data[i];

        const KernelGrads g2 = kernel_backward(x1, params[1], base1, dv);
        FeatureGrid dx1 = g2.grad_grid;
        for (size_t i = 0; i < dx1.data.size(); ++i)
            dx1.data[i] += kBaseScale * g2.grad_base.data[i];
        const KernelGrads g1 = kernel_backward(noised, params[0], base0, dx1);

        for (size_t i = 0; i < params[1].k_down.size(); ++i)
            params[1].k_down[i] -= kLr * g2.grad_params.k_down[i];
        for (size_t i = 0; i < params[1].k_up.size(); ++i)
            params[1].k_up[i] -= kLr * g2.grad_params.k_up[i];
        for (size_t i = 0; i < params[0].k_down.size(); ++i)
            params[0].k_down[i] -= kLr * g1.grad_params.k_down[i];
        for (size_t i = 0; i < params[0].k_up.size(); ++i)
            params[0].k_up[i] -= kLr * g1.grad_params.k_up[i];
    }
    return trace;
}

}  // namespace moteval
