#include "moteval/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "moteval/errors.hpp"

namespace moteval {

namespace {

using ordered_json = nlohmann::ordered_json;

DifficultyLevel parse_difficulty(const std::string& s) {
    if (s == "easy") return DifficultyLevel::Easy;
    if (s == "medium") return DifficultyLevel::Medium;
    if (s == "hard") return DifficultyLevel::Hard;
    throw ValidationError("unknown difficulty label: " + s);
}

double metric_field(const ordered_json& obj, const char* key, int line_no) {
    if (!obj.contains(key) || !obj[key].is_number())
        throw ParseError("record line " + std::to_string(line_no) + ": missing numeric \"" +
                         key + "\"");
    const double v = obj[key].get<double>();
    if (!std::isfinite(v))
        throw ValidationError("record line " + std::to_string(line_no) + ": non-finite \"" +
                              std::string(key) + "\"");
    return v;
}

MetricMeans bucket_mean(const std::vector<const VideoEvalRecord*>& recs) {
    MetricMeans m;
    m.count = static_cast<int>(recs.size());
    for (const auto* r : recs) {
        m.edit_fidelity += r->edit_fidelity;
        m.temporal_consistency += r->temporal_consistency;
        m.motion_fidelity += r->motion_fidelity;
    }
    m.edit_fidelity /= m.count;
    m.temporal_consistency /= m.count;
    m.motion_fidelity /= m.count;
    return m;
}

ordered_json means_json(const MetricMeans& m) {
    ordered_json j;
    j["count"] = m.count;
    j["edit_fidelity"] = m.edit_fidelity;
    j["temporal_consistency"] = m.temporal_consistency;
    j["motion_fidelity"] = m.motion_fidelity;
    return j;
}

std::string scaled_cell(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f", v * 100.0);
    return buf;
}

}  // namespace

std::vector<VideoEvalRecord> load_records(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ParseError("cannot open records file: " + path);
    std::vector<VideoEvalRecord> out;
    std::string line;
    int line_no = 0;
    while (std::getline(f, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        ordered_json obj;
        try {
            obj = ordered_json::parse(line);
        } catch (const ordered_json::parse_error& e) {
            throw ParseError("record line " + std::to_string(line_no) + ": " + e.what());
        }
        if (!obj.is_object())
            throw ParseError("record line " + std::to_string(line_no) + ": not an object");
        if (!obj.contains("video_id") || !obj["video_id"].is_string())
            throw ParseError("record line " + std::to_string(line_no) +
                             ": missing string \"video_id\"");
        if (!obj.contains("difficulty") || !obj["difficulty"].is_string())
            throw ParseError("record line " + std::to_string(line_no) +
                             ": missing string \"difficulty\"");
        VideoEvalRecord r;
        r.video_id = obj["video_id"].get<std::string>();
        r.difficulty = parse_difficulty(obj["difficulty"].get<std::string>());
        r.edit_fidelity = metric_field(obj, "edit_fidelity", line_no);
        r.temporal_consistency = metric_field(obj, "temporal_consistency", line_no);
        r.motion_fidelity = metric_field(obj, "motion_fidelity", line_no);
        out.push_back(std::move(r));
    }
    return out;
}

EvalReport build_report(std::vector<VideoEvalRecord> records) {
    if (records.empty()) throw ValidationError("no evaluation records");
    std::sort(records.begin(), records.end(),
              [](const VideoEvalRecord& a, const VideoEvalRecord& b) {
                  return std::tie(a.video_id, a.difficulty, a.edit_fidelity,
                                  a.temporal_consistency, a.motion_fidelity) <
                         std::tie(b.video_id, b.difficulty, b.edit_fidelity,
                                  b.temporal_consistency, b.motion_fidelity);
              });
    EvalReport rep;
    rep.per_video = std::move(records);

    std::vector<const VideoEvalRecord*> all, easy, medium, hard;
    for (const auto& r : rep.per_video) {
        all.push_back(&r);
        switch (r.difficulty) {
            case DifficultyLevel::Easy: easy.push_back(&r); break;
            case DifficultyLevel::Medium: medium.push_back(&r); break;
            case DifficultyLevel::Hard: hard.push_back(&r); break;
        }
    }
    rep.overall = bucket_mean(all);
    if (!easy.empty()) rep.easy = bucket_mean(easy);
    if (!medium.empty()) rep.medium = bucket_mean(medium);
    if (!hard.empty()) rep.hard = bucket_mean(hard);
    return rep;
}

std::string report_json(const EvalReport& rep) {
    ordered_json j;
    j["overall"] = means_json(rep.overall);
    j["hard"] = rep.hard ? means_json(*rep.hard) : ordered_json(nullptr);
    j["medium"] = rep.medium ? means_json(*rep.medium) : ordered_json(nullptr);
    j["easy"] = rep.easy ? means_json(*rep.easy) : ordered_json(nullptr);
    ordered_json vids = ordered_json::array();
    for (const auto& r : rep.per_video) {
        ordered_json v;
        v["video_id"] = r.video_id;
        v["difficulty"] = difficulty_name(r.difficulty);
        v["edit_fidelity"] = r.edit_fidelity;
        v["temporal_consistency"] = r.temporal_consistency;
        v["motion_fidelity"] = r.motion_fidelity;
        vids.push_back(std::move(v));
    }
    j["per_video"] = std::move(vids);
    return j.dump(2) + "\n";
}

std::string report_table(const EvalReport& rep) {
    std::ostringstream os;
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%-8s%8s%8s%8s\n", "", "EF", "TC", "MF");
    os << buf;
    auto row = [&](const char* name, const std::optional<MetricMeans>& m) {
        if (m) {
            std::snprintf(buf, sizeof(buf), "%-8s%8s%8s%8s\n", name,
                          scaled_cell(m->edit_fidelity).c_str(),
                          scaled_cell(m->temporal_consistency).c_str(),
                          scaled_cell(m->motion_fidelity).c_str());
        } else {
            std::snprintf(buf, sizeof(buf), "%-8s%8s%8s%8s\n", name, "-", "-", "-");
        }
        os << buf;
    };
    row("All", rep.overall);
    row("Hard", rep.hard);
    row("Medium", rep.medium);
    row("Easy", rep.easy);
    return os.str();
}

}  // namespace moteval
