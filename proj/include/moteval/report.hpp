#pragma once

#include <optional>
#include <string>
#include <vector>

#include "moteval/clustering.hpp"

namespace moteval {

struct VideoEvalRecord {
    std::string video_id;
    DifficultyLevel difficulty = DifficultyLevel::Easy;
    double edit_fidelity = 0.0;
    double temporal_consistency = 0.0;
    double motion_fidelity = 0.0;
};

struct MetricMeans {
    int count = 0;
    double edit_fidelity = 0.0;
    double temporal_consistency = 0.0;
    double motion_fidelity = 0.0;
};

struct EvalReport {
    std::vector<VideoEvalRecord> per_video;  // sorted by video_id
    MetricMeans overall;
    std::optional<MetricMeans> easy, medium, hard;  // empty bucket -> nullopt
};

// parses JSON-lines of records; throws ParseError / ValidationError
std::vector<VideoEvalRecord> load_records(const std::string& path);

EvalReport build_report(std::vector<VideoEvalRecord> records);

// JSON with raw (unscaled) values
std::string report_json(const EvalReport& rep);

// aligned All/Hard/Medium/Easy table, scores x100 at 1 decimal
std::string report_table(const EvalReport& rep);

}  // namespace moteval
