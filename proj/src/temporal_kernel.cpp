#include "moteval/temporal_kernel.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "moteval/errors.hpp"
#include "moteval/rng.hpp"

namespace moteval {

namespace {

constexpr double kInvSqrt2 = 0.7071067811865475244008443621048;
constexpr double kInvSqrt2Pi = 0.3989422804014326779399460599344;

void check_params(const TemporalKernelParams& p) {
    if (p.k < 1 || p.k % 2 == 0) throw ParamError("temporal kernel: k must be odd and positive");
    if (p.c < 1 || p.m < 1) throw ParamError("temporal kernel: channel dims must be positive");
    const size_t want = static_cast<size_t>(p.k) * p.c * p.m;
    if (p.k_down.size() != want || p.k_up.size() != want)
        throw SizeError("temporal kernel: weight array size mismatch");
}

}  // namespace

double gelu(double x) { return x * 0.5 * (1.0 + std::erf(x * kInvSqrt2)); }

double gelu_grad(double x) {
    const double phi_cdf = 0.5 * (1.0 + std::erf(x * kInvSqrt2));
    const double phi_pdf = kInvSqrt2Pi * std::exp(-0.5 * x * x);
    return phi_cdf + x * phi_pdf;
}

FeatureGrid smooth_eq1(const FeatureGrid& grid, const std::vector<double>& kernel,
                       int k) {
    if (k < 1 || k % 2 == 0) throw ParamError("smooth_eq1: k must be odd and positive");
    if (kernel.size() != static_cast<size_t>(k) * grid.c * grid.c)
        throw SizeError("smooth_eq1: kernel size mismatch");
    const int half = (k - 1) / 2;
    FeatureGrid out = grid;
    for (int i = 0; i < grid.t; ++i)
        for (int y = 0; y < grid.h; ++y)
            for (int x = 0; x < grid.w; ++x)
                for (int j = 0; j < k; ++j) {
                    const int src = i + j - half;
                    if (src < 0 || src >= grid.t) continue;  // zero padding
                    const double* kj = kernel.data() + static_cast<size_t>(j) * grid.c * grid.c;
                    for (int ci = 0; ci < grid.c; ++ci) {
                        const double v = grid.at(src, y, x, ci);
                        for (int co = 0; co < grid.c; ++co)
                            out.at(i, y, x, co) += v * kj[ci * grid.c + co];
                    }
                }
    return out;
}

// shared inner pass: mid = conv_down(grid), act = gelu(mid)
static void down_and_activate(const FeatureGrid& grid, const TemporalKernelParams& p,
                              std::vector<double>& mid, std::vector<double>& act) {
    const int half = (p.k - 1) / 2;
    const size_t n = static_cast<size_t>(grid.t) * grid.h * grid.w * p.m;
    mid.assign(n, 0.0);
    act.resize(n);
    auto midx = [&](int i, int y, int x, int mi) {
        return ((static_cast<size_t>(i) * grid.h + y) * grid.w + x) * p.m + mi;
    };
    for (int i = 0; i < grid.t; ++i)
        for (int y = 0; y < grid.h; ++y)
            for (int x = 0; x < grid.w; ++x)
                for (int j = 0; j < p.k; ++j) {
                    const int src = i + j - half;
                    if (src < 0 || src >= grid.t) continue;
                    for (int ci = 0; ci < p.c; ++ci) {
                        const double v = grid.at(src, y, x, ci);
                        for (int mi = 0; mi < p.m; ++mi)
                            mid[midx(i, y, x, mi)] += v * p.k_down[p.down_idx(j, ci, mi)];
                    }
                }
    for (size_t i = 0; i < n; ++i) act[i] = gelu(mid[i]);
}

FeatureGrid kernel_forward(const FeatureGrid& grid, const TemporalKernelParams& params,
                           const FeatureGrid& base) {
    check_params(params);
    if (grid.c != params.c) throw SizeError("kernel_forward: channel mismatch");
    if (!grid.same_shape(base)) throw SizeError("kernel_forward: base shape mismatch");

    std::vector<double> mid, act;
    down_and_activate(grid, params, mid, act);

    const int half = (params.k - 1) / 2;
    FeatureGrid out = base;
    auto midx = [&](int i, int y, int x, int mi) {
        return ((static_cast<size_t>(i) * grid.h + y) * grid.w + x) * params.m + mi;
    };
    for (int i = 0; i < grid.t; ++i)
        for (int y = 0; y < grid.h; ++y)
            for (int x = 0; x < grid.w; ++x)
                for (int j = 0; j < params.k; ++j) {
                    const int src = i + j - half;
                    if (src < 0 || src >= grid.t) continue;
                    for (int mi = 0; mi < params.m; ++mi) {
                        const double v = act[midx(src, y, x, mi)];
                        for (int co = 0; co < params.c; ++co)
                            out.at(i, y, x, co) += v * params.k_up[params.up_idx(j, mi, co)];
                    }
                }
    return out;
}

KernelGrads kernel_backward(const FeatureGrid& grid, const TemporalKernelParams& params,
                            const FeatureGrid& base, const FeatureGrid& upstream) {
    check_params(params);
    if (grid.c != params.c) throw SizeError("kernel_backward: channel mismatch");
    if (!grid.same_shape(base) || !grid.same_shape(upstream))
        throw SizeError("kernel_backward: shape mismatch");

    std::vector<double> mid, act;
    down_and_activate(grid, params, mid, act);

    KernelGrads g;
    g.grad_base = upstream;
    g.grad_grid = FeatureGrid(grid.t, grid.h, grid.w, grid.c);
    g.grad_params.k = params.k;
    g.grad_params.c = params.c;
    g.grad_params.m = params.m;
    g.grad_params.k_down.assign(params.k_down.size(), 0.0);
    g.grad_params.k_up.assign(params.k_up.size(), 0.0);

    const int half = (params.k - 1) / 2;
    auto midx = [&](int i, int y, int x, int mi) {
        return ((static_cast<size_t>(i) * grid.h + y) * grid.w + x) * params.m + mi;
    };

    // through the up-convolution: grads for k_up and for the activation
    std::vector<double> grad_act(act.size(), 0.0);
    for (int i = 0; i < grid.t; ++i)
        for (int y = 0; y < grid.h; ++y)
            for (int x = 0; x < grid.w; ++x)
                for (int j = 0; j < params.k; ++j) {
                    const int src = i + j - half;
                    if (src < 0 || src >= grid.t) continue;
                    for (int mi = 0; mi < params.m; ++mi) {
                        const double a = act[midx(src, y, x, mi)];
                        double acc = 0.0;
                        for (int co = 0; co < params.c; ++co) {
                            const double u = upstream.at(i, y, x, co);
                            g.grad_params.k_up[params.up_idx(j, mi, co)] += u * a;
                            acc += u * params.k_up[params.up_idx(j, mi, co)];
                        }
                        grad_act[midx(src, y, x, mi)] += acc;
                    }
                }

    // through the activation
    std::vector<double> grad_mid(mid.size());
    for (size_t i = 0; i < mid.size(); ++i) grad_mid[i] = grad_act[i] * gelu_grad(mid[i]);

    // through the down-convolution: grads for k_down and for the input grid
    for (int i = 0; i < grid.t; ++i)
        for (int y = 0; y < grid.h; ++y)
            for (int x = 0; x < grid.w; ++x)
                for (int j = 0; j < params.k; ++j) {
                    const int src = i + j - half;
                    if (src < 0 || src >= grid.t) continue;
                    for (int ci = 0; ci < params.c; ++ci) {
                        const double v = grid.at(src, y, x, ci);
                        double acc = 0.0;
                        for (int mi = 0; mi < params.m; ++mi) {
                            const double gm = grad_mid[midx(i, y, x, mi)];
                            g.grad_params.k_down[params.down_idx(j, ci, mi)] += gm * v;
                            acc += gm * params.k_down[params.down_idx(j, ci, mi)];
                        }
                        g.grad_grid.at(src, y, x, ci) += acc;
                    }
                }
    return g;
}

TemporalKernelParams init_params(int c, int m, int k, std::uint64_t seed) {
    if (k < 1 || k % 2 == 0) throw ParamError("init_params: k must be odd and positive");
    if (c < 1 || m < 1) throw ParamError("init_params: channel dims must be positive");
    TemporalKernelParams p;
    p.k = k;
    p.c = c;
    p.m = m;
    const double bound = 1.0 / std::sqrt(static_cast<double>(k) * c);
    Rng rng(seed);
    p.k_down.resize(static_cast<size_t>(k) * c * m);
    for (double& w : p.k_down) w = rng.uniform(-bound, bound);
    p.k_up.assign(static_cast<size_t>(k) * m * c, 0.0);
    return p;
}

int dropped_layer_count(const LayerStackConfig& cfg) {
    if (cfg.num_layers < 1) throw ParamError("layer stack: num_layers must be positive");
    if (!(cfg.drop_fraction >= 0.0 && cfg.drop_fraction <= 1.0))
        throw ParamError("layer stack: drop_fraction must be in [0, 1]");
    return static_cast<int>(std::floor(cfg.drop_fraction * cfg.num_layers + 1e-9));
}

FeatureGrid apply_stack(const FeatureGrid& grid,
                        const std::vector<TemporalKernelParams>& layers,
                        const std::vector<FeatureGrid>& bases,
                        const LayerStackConfig& cfg, StackMode mode) {
    const int dropped = dropped_layer_count(cfg);
    if (static_cast<int>(layers.size()) != cfg.num_layers ||
        static_cast<int>(bases.size()) != cfg.num_layers)
        throw SizeError("apply_stack: layer/base count mismatch");
    const int first_dropped =
        mode == StackMode::Inference ? cfg.num_layers - dropped : cfg.num_layers;
    FeatureGrid x = grid;
    for (int l = 0; l < cfg.num_layers; ++l) {
        if (l >= first_dropped) {
            if (!x.same_shape(bases[l])) throw SizeError("apply_stack: base shape mismatch");
            x = bases[l];
        } else {
            x = kernel_forward(x, layers[l], bases[l]);
        }
    }
    return x;
}

namespace {

void put_u32(std::string& buf, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_f64(std::string& buf, double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
}

std::uint32_t get_u32(const std::string& buf, size_t& pos) {
    if (pos + 4 > buf.size()) throw ParseError("checkpoint: truncated header");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
        v |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf[pos + i])) << (8 * i);
    pos += 4;
    return v;
}

double get_f64(const std::string& buf, size_t& pos) {
    if (pos + 8 > buf.size()) throw ParseError("checkpoint: truncated weights");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
        v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[pos + i])) << (8 * i);
    pos += 8;
    return std::bit_cast<double>(v);
}

}  // namespace

void save_params(const TemporalKernelParams& params, const std::string& path) {
    check_params(params);
    std::string buf = "DETK";
    put_u32(buf, static_cast<std::uint32_t>(params.k));
    put_u32(buf, static_cast<std::uint32_t>(params.c));
    put_u32(buf, static_cast<std::uint32_t>(params.m));
    for (double w : params.k_down) put_f64(buf, w);
    for (double w : params.k_up) put_f64(buf, w);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ParseError("checkpoint: cannot open for writing: " + path);
    f.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!f) throw ParseError("checkpoint: write failed: " + path);
}

TemporalKernelParams load_params(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ParseError("checkpoint: cannot open: " + path);
    std::string buf((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    if (buf.size() < 4 || buf.compare(0, 4, "DETK") != 0)
        throw ParseError("checkpoint: bad magic");
    size_t pos = 4;
    TemporalKernelParams p;
    p.k = static_cast<int>(get_u32(buf, pos));
    p.c = static_cast<int>(get_u32(buf, pos));
    p.m = static_cast<int>(get_u32(buf, pos));
    if (p.k < 1 || p.k % 2 == 0 || p.c < 1 || p.m < 1)
        throw ParseError("checkpoint: invalid dimensions");
    const size_t count = static_cast<size_t>(p.k) * p.c * p.m;
    p.k_down.resize(count);
    p.k_up.resize(count);
    for (double& w : p.k_down) w = get_f64(buf, pos);
    for (double& w : p.k_up) w = get_f64(buf, pos);
    if (pos != buf.size()) throw ParseError("checkpoint: trailing bytes");
    for (double w : p.k_down)
        if (!std::isfinite(w)) throw ParseError("checkpoint: non-finite weight");
    for (double w : p.k_up)
        if (!std::isfinite(w)) throw ParseError("checkpoint: non-finite weight");
    return p;
}

}  // namespace moteval
