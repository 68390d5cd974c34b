#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace moteval {

struct FeatureGrid {
    int t = 0, h = 0, w = 0, c = 0;
    std::vector<double> data;  // [t][h][w][c] row-major

    FeatureGrid() = default;
    FeatureGrid(int t_, int h_, int w_, int c_)
        : t(t_), h(h_), w(w_), c(c_),
          data(static_cast<size_t>(t_) * h_ * w_ * c_, 0.0) {}

    size_t idx(int i, int y, int x, int ch) const {
        return ((static_cast<size_t>(i) * h + y) * w + x) * c + ch;
    }
    double& at(int i, int y, int x, int ch) { return data[idx(i, y, x, ch)]; }
    double at(int i, int y, int x, int ch) const { return data[idx(i, y, x, ch)]; }
    bool same_shape(const FeatureGrid& o) const {
        return t == o.t && h == o.h && w == o.w && c == o.c;
    }
};

struct TemporalKernelParams {
    int k = 0;   // odd kernel size
    int c = 0;   // in/out channels
    int m = 0;   // mid channels
    std::vector<double> k_down;  // [k][c][m]
    std::vector<double> k_up;    // [k][m][c]

    size_t down_idx(int j, int ci, int mi) const {
        return (static_cast<size_t>(j) * c + ci) * m + mi;
    }
    size_t up_idx(int j, int mi, int ci) const {
        return (static_cast<size_t>(j) * m + mi) * c + ci;
    }
};

struct LayerStackConfig {
    int num_layers = 0;
    double drop_fraction = 0.0;
};

enum class StackMode { Train, Inference };

struct KernelGrads {
    FeatureGrid grad_grid;
    TemporalKernelParams grad_params;
    FeatureGrid grad_base;
};

// exact erf form x * Phi(x)
double gelu(double x);
double gelu_grad(double x);

// residual temporal smoothing: out_i = in_i + sum_j in_{i+j-k/2} * K_j per
// spatial site, kernel[k][c][c], zero padding at the clip edges
FeatureGrid smooth_eq1(const FeatureGrid& grid, const std::vector<double>& kernel,
                       int k);

// out = conv_up(gelu(conv_down(grid))) + base, per spatial site
FeatureGrid kernel_forward(const FeatureGrid& grid, const TemporalKernelParams& params,
                           const FeatureGrid& base);

KernelGrads kernel_backward(const FeatureGrid& grid, const TemporalKernelParams& params,
                            const FeatureGrid& base, const FeatureGrid& upstream);

// k_down ~ U(-1/sqrt(k*c), 1/sqrt(k*c)); k_up = 0 (exact identity on base)
TemporalKernelParams init_params(int c, int m, int k, std::uint64_t seed);

// number of trailing layers whose kernel branch is skipped at inference
int dropped_layer_count(const LayerStackConfig& cfg);

FeatureGrid apply_stack(const FeatureGrid& grid,
                        const std::vector<TemporalKernelParams>& layers,
                        const std::vector<FeatureGrid>& bases,
                        const LayerStackConfig& cfg, StackMode mode);

// "DETK" binary: magic, uint32 k,c,m (LE), float64 k_down then k_up row-major
void save_params(const TemporalKernelParams& params, const std::string& path);
TemporalKernelParams load_params(const std::string& path);

}  // namespace moteval
