#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "moteval/clustering.hpp"
#include "moteval/errors.hpp"
#include "moteval/losses.hpp"
#include "moteval/motion_metrics.hpp"
#include "moteval/report.hpp"
#include "moteval/trajectory.hpp"

using nlohmann::ordered_json;

namespace {

struct GlobalOpts {
    std::uint64_t seed = 0;
    std::string out_path;
    bool json = false;
};

void emit(const GlobalOpts& g, const std::string& data) {
    if (g.out_path.empty()) {
        std::cout << data;
        return;
    }
    std::ofstream f(g.out_path, std::ios::binary);
    if (!f) throw moteval::ParseError("cannot write file: " + g.out_path);
    f << data;
}

std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f\n", v);
    return buf;
}

std::string csv_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"trajectory, clustering and latent-feature evaluation toolkit", "moteval"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--seed", g.seed, "RNG seed for seeded commands");
    app.add_option("--out", g.out_path, "write output to file instead of stdout");
    app.add_flag("--json", g.json, "emit JSON output");

    // mf: hybrid motion-fidelity score between two trajectory files
    auto* mf = app.add_subcommand("mf", "motion fidelity between paired trajectory sets");
    mf->fallthrough();
    std::string mf_src, mf_gen;
    double mf_alpha = 0.5;
    bool mf_raw = false;
    mf->add_option("source", mf_src, "reference trajectory JSON")->required();
    mf->add_option("generated", mf_gen, "generated trajectory JSON")->required();
    mf->add_option("--alpha", mf_alpha, "shape/velocity weighting in [0,1]");
    mf->add_flag("--raw", mf_raw, "skip frame-diagonal coordinate normalization");
    mf->callback([&] {
        const auto a = moteval::load_trajectories(mf_src);
        const auto b = moteval::load_trajectories(mf_gen);
        moteval::MotionFidelityConfig cfg;
        cfg.alpha = mf_alpha;
        cfg.normalize_by_diagonal = !mf_raw;
        const double m = moteval::motion_fidelity(a, b, cfg);
        if (g.json) {
            ordered_json j;
            j["motion_fidelity"] = m;
            j["alpha"] = mf_alpha;
            j["normalized"] = !mf_raw;
            emit(g, j.dump(2) + "\n");
        } else {
            emit(g, fixed6(m));
        }
    });

    // annotate: cluster trajectories, pick k, classify difficulty
    auto* an = app.add_subcommand("annotate", "cluster trajectories and label difficulty");
    an->fallthrough();
    std::string an_path;
    int an_kmin = 2, an_kmax = 12;
    an->add_option("trajectories", an_path, "trajectory JSON")->required();
    an->add_option("--kmin", an_kmin, "smallest cluster count scanned");
    an->add_option("--kmax", an_kmax, "largest cluster count scanned");
    an->callback([&] {
        const auto traj = moteval::load_trajectories(an_path);
        const auto features = moteval::trajectory_features(traj);
        const int n = static_cast<int>(features.size());
        const auto res =
            moteval::select_k(features, an_kmin, std::min(an_kmax, n), g.seed);
        ordered_json j;
        j["k"] = res.k;
        j["silhouette"] = res.silhouette;
        j["difficulty"] = moteval::difficulty_name(moteval::classify_difficulty(res.k));
        j["assignments"] = res.assignments;
        j["weak_structure"] = res.silhouette < 0.35;
        emit(g, j.dump(2) + "\n");
    });

    // sample-points: isolation-biased sampling from a foreground mask
    auto* sp = app.add_subcommand("sample-points",
                                  "draw trajectory seed points from a mask");
    sp->fallthrough();
    std::string sp_path;
    int sp_count = 1;
    sp->add_option("mask", sp_path, "PGM foreground mask")->required();
    sp->add_option("--count", sp_count, "number of points to draw");
    sp->callback([&] {
        const auto mask = moteval::load_mask(sp_path);
        const auto pts = moteval::distance_weighted_sample(mask, sp_count, g.seed);
        ordered_json j = ordered_json::array();
        for (const auto& p : pts) j.push_back({p[0], p[1]});
        emit(g, j.dump() + "\n");
    });

    // report: aggregate per-video metric records by difficulty
    auto* rp = app.add_subcommand("report", "aggregate evaluation records");
    rp->fallthrough();
    std::string rp_path;
    rp->add_option("records", rp_path, "JSON-lines evaluation records")->required();
    rp->callback([&] {
        const auto records = moteval::load_records(rp_path);
        const auto rep = moteval::build_report(records);
        emit(g, g.json ? moteval::report_json(rep) : moteval::report_table(rep));
    });

    // train-demo: synthetic optimization loop exercising the full gradient path
    auto* td = app.add_subcommand("train-demo", "run the synthetic training demo");
    td->fallthrough();
    int td_steps = 200;
    double td_lambda_tl = 0.1;
    std::string td_trace;
    td->add_option("--steps", td_steps, "gradient steps");
    td->add_option("--lambda-tl", td_lambda_tl, "tracking-loss weight");
    td->add_option("--trace", td_trace, "write the loss trace CSV to this file");
    td->callback([&] {
        const auto trace = moteval::train_demo(g.seed, td_steps, td_lambda_tl);
        std::string csv = "step,loss_dl,loss_tl,loss_total\n";
        for (size_t i = 0; i < trace.size(); ++i) {
            csv += std::to_string(i);
            csv += ',';
            csv += csv_real(trace[i].loss_dl);
            csv += ',';
            csv += csv_real(trace[i].loss_tl);
            csv += ',';
            csv += csv_real(trace[i].loss_total);
            csv += '\n';
        }
        if (!td_trace.empty()) {
            std::ofstream f(td_trace, std::ios::binary);
            if (!f) throw moteval::ParseError("cannot write file: " + td_trace);
            f << csv;
        }
        if (g.json) {
            ordered_json j;
            j["initial"] = trace.front().loss_total;
            j["final"] = trace.back().loss_total;
            j["reduction_ratio"] = trace.back().loss_total / trace.front().loss_total;
            if (td_lambda_tl == 0.0) j["tracking_loss_final"] = trace.back().loss_tl;
            emit(g, j.dump(2) + "\n");
        } else if (td_trace.empty()) {
            emit(g, csv);
        }
    });

    // ef: mean frame-vs-prompt embedding cosine
    auto* ef = app.add_subcommand("ef", "edit fidelity from embedding files");
    ef->fallthrough();
    std::string ef_frames, ef_prompt;
    ef->add_option("frames", ef_frames, "per-frame embeddings (EMB1)")->required();
    ef->add_option("prompt", ef_prompt, "single prompt embedding (EMB1, one row)")
        ->required();
    ef->callback([&] {
        const auto frames = moteval::load_embeddings(ef_frames);
        const auto prompt = moteval::load_embeddings(ef_prompt);
        if (prompt.frames() != 1)
            throw moteval::ValidationError("prompt embedding must contain exactly one vector");
        const double v = moteval::edit_fidelity(frames, prompt.vectors[0]);
        if (g.json) {
            ordered_json j;
            j["edit_fidelity"] = v;
            emit(g, j.dump(2) + "\n");
        } else {
            emit(g, fixed6(v));
        }
    });

    // tc: mean consecutive-frame embedding cosine
    auto* tc = app.add_subcommand("tc", "temporal consistency from an embedding file");
    tc->fallthrough();
    std::string tc_frames;
    tc->add_option("frames", tc_frames, "per-frame embeddings (EMB1)")->required();
    tc->callback([&] {
        const auto frames = moteval::load_embeddings(tc_frames);
        const double v = moteval::temporal_consistency(frames);
        if (g.json) {
            ordered_json j;
            j["temporal_consistency"] = v;
            emit(g, j.dump(2) + "\n");
        } else {
            emit(g, fixed6(v));
        }
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const moteval::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
