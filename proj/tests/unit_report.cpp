#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <doctest.h>

#include "moteval/errors.hpp"
#include "moteval/report.hpp"

using namespace moteval;

namespace {

const char* kRecPath = "tmp_records.jsonl";

void write_file(const std::string& body) {
    std::ofstream f(kRecPath);
    f << body;
}

VideoEvalRecord rec(std::string id, DifficultyLevel d, double ef, double tc, double mf) {
    VideoEvalRecord r;
    r.video_id = std::move(id);
    r.difficulty = d;
    r.edit_fidelity = ef;
    r.temporal_consistency = tc;
    r.motion_fidelity = mf;
    return r;
}

}  // namespace

TEST_CASE("record loading") {
    SUBCASE("well-formed lines with blanks interleaved") {
        write_file(
            R"({"video_id":"a","difficulty":"easy","edit_fidelity":0.5,"temporal_consistency":0.25,"motion_fidelity":0.75})"
            "\n"
            "\n   \n"
            R"({"video_id":"b","difficulty":"hard","edit_fidelity":1.0,"temporal_consistency":0.0,"motion_fidelity":0.5})"
            "\n");
        auto recs = load_records(kRecPath);
        REQUIRE(recs.size() == 2);
        CHECK(recs[0].video_id == "a");
        CHECK(recs[0].difficulty == DifficultyLevel::Easy);
        CHECK(recs[0].edit_fidelity == 0.5);
        CHECK(recs[0].temporal_consistency == 0.25);
        CHECK(recs[1].video_id == "b");
        CHECK(recs[1].difficulty == DifficultyLevel::Hard);
        CHECK(recs[1].motion_fidelity == 0.5);
    }
    SUBCASE("unknown difficulty label") {
        write_file(
            R"({"video_id":"a","difficulty":"brutal","edit_fidelity":0.5,"temporal_consistency":0.5,"motion_fidelity":0.5})"
            "\n");
        CHECK_THROWS_AS(load_records(kRecPath), ValidationError);
    }
    SUBCASE("missing metric field") {
        write_file(
            R"({"video_id":"a","difficulty":"easy","temporal_consistency":0.5,"motion_fidelity":0.5})"
            "\n");
        CHECK_THROWS_AS(load_records(kRecPath), ParseError);
    }
    SUBCASE("malformed json") {
        write_file("{not json\n");
        CHECK_THROWS_AS(load_records(kRecPath), ParseError);
    }
    SUBCASE("non-numeric metric") {
        write_file(
            R"({"video_id":"a","difficulty":"easy","edit_fidelity":"high","temporal_consistency":0.5,"motion_fidelity":0.5})"
            "\n");
        CHECK_THROWS_AS(load_records(kRecPath), ParseError);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(load_records("nonexistent_records.jsonl"), ParseError);
    }
    std::remove(kRecPath);
}

TEST_CASE("report aggregation") {
    SUBCASE("single record") {
        auto rep = build_report({rec("v", DifficultyLevel::Medium, 0.1, 0.2, 0.3)});
        CHECK(rep.overall.count == 1);
        CHECK(rep.overall.edit_fidelity == 0.1);
        CHECK(rep.overall.temporal_consistency == 0.2);
        CHECK(rep.overall.motion_fidelity == 0.3);
        REQUIRE(rep.medium.has_value());
        CHECK(rep.medium->count == 1);
        CHECK_FALSE(rep.easy.has_value());
        CHECK_FALSE(rep.hard.has_value());
    }
    SUBCASE("means average the bucket members") {
        auto rep = build_report({rec("a", DifficultyLevel::Easy, 0.30, 0.4, 0.6),
                                 rec("b", DifficultyLevel::Easy, 0.32, 0.8, 0.2)});
        CHECK(rep.overall.edit_fidelity == doctest::Approx(0.31).epsilon(1e-15));
        CHECK(rep.overall.temporal_consistency == doctest::Approx(0.6).epsilon(1e-15));
        REQUIRE(rep.easy.has_value());
        CHECK(rep.easy->count == 2);
        CHECK(rep.easy->motion_fidelity == doctest::Approx(0.4).epsilon(1e-15));
    }
    SUBCASE("buckets partition the records") {
        auto rep = build_report({rec("a", DifficultyLevel::Easy, 0.1, 0.1, 0.1),
                                 rec("b", DifficultyLevel::Hard, 0.2, 0.2, 0.2),
                                 rec("c", DifficultyLevel::Medium, 0.3, 0.3, 0.3),
                                 rec("d", DifficultyLevel::Hard, 0.4, 0.4, 0.4)});
        CHECK(rep.overall.count == 4);
        CHECK(rep.easy->count == 1);
        CHECK(rep.medium->count == 1);
        CHECK(rep.hard->count == 2);
        CHECK(rep.hard->edit_fidelity == doctest::Approx(0.3).epsilon(1e-15));
    }
    SUBCASE("per-video list is sorted by id") {
        auto rep = build_report({rec("m", DifficultyLevel::Easy, 0.1, 0.1, 0.1),
                                 rec("a", DifficultyLevel::Easy, 0.2, 0.2, 0.2),
                                 rec("z", DifficultyLevel::Easy, 0.3, 0.3, 0.3)});
        REQUIRE(rep.per_video.size() == 3);
        CHECK(rep.per_video[0].video_id == "a");
        CHECK(rep.per_video[1].video_id == "m");
        CHECK(rep.per_video[2].video_id == "z");
    }
    SUBCASE("input order does not matter") {
        std::vector<VideoEvalRecord> recs = {
            rec("a", DifficultyLevel::Easy, 0.1, 0.2, 0.3),
            rec("b", DifficultyLevel::Hard, 0.4, 0.5, 0.6),
            rec("c", DifficultyLevel::Medium, 0.7, 0.8, 0.9)};
        std::vector<VideoEvalRecord> rev(recs.rbegin(), recs.rend());
        CHECK(report_json(build_report(recs)) == report_json(build_report(rev)));
    }
    SUBCASE("no records is an error") {
        CHECK_THROWS_AS(build_report({}), ValidationError);
    }
}

TEST_CASE("json report rendering") {
    auto rep = build_report({rec("a", DifficultyLevel::Easy, 0.25, 0.5, 0.75),
                             rec("b", DifficultyLevel::Hard, 1.0, 0.0, 0.35)});
    const std::string j = report_json(rep);
    CHECK(j.back() == '\n');
    // raw (unscaled) values appear verbatim
    CHECK(j.find("\"edit_fidelity\": 0.625") != std::string::npos);
    CHECK(j.find("\"medium\": null") != std::string::npos);
    CHECK(j.find("\"difficulty\": \"hard\"") != std::string::npos);
    // fixed section order
    const size_t p_overall = j.find("\"overall\"");
    const size_t p_hard = j.find("\"hard\"");
    const size_t p_medium = j.find("\"medium\"");
    const size_t p_easy = j.find("\"easy\"");
    const size_t p_vids = j.find("\"per_video\"");
    REQUIRE(p_vids != std::string::npos);
    CHECK(p_overall < p_hard);
    CHECK(p_hard < p_medium);
    CHECK(p_medium < p_easy);
    CHECK(p_easy < p_vids);
}

TEST_CASE("table report rendering") {
    auto rep = build_report({rec("a", DifficultyLevel::Easy, 0.25, 0.5, 0.75),
                             rec("b", DifficultyLevel::Hard, 1.0, 0.0, 0.35)});
    const std::string expected =
        "              EF      TC      MF\n"
        "All         62.5    25.0    55.0\n"
        "Hard       100.0     0.0    35.0\n"
        "Medium         -       -       -\n"
        "Easy        25.0    50.0    75.0\n";
    CHECK(report_table(rep) == expected);
}
