#include <cstdio>
#include <fstream>
#include <limits>
#include <string>

#include <doctest.h>

#include "moteval/errors.hpp"
#include "moteval/trajectory.hpp"

using namespace moteval;

namespace {

TrajectorySet make_set() {
    TrajectorySet ts;
    ts.frame_width = 64;
    ts.frame_height = 48;
    ts.points = {{{0.0, 0.0}, {1.5, 2.0}, {3.0, 4.0}},
                 {{10.0, 10.0}, {11.0, 9.0}, {12.0, 8.5}}};
    ts.visibility = {{1, 1, 1}, {1, 0, 1}};
    return ts;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    f << content;
}

}  // namespace

TEST_CASE("trajectory set validation") {
    TrajectorySet ts = make_set();
    CHECK_NOTHROW(ts.validate());

    SUBCASE("empty set") {
        ts.points.clear();
        ts.visibility.clear();
        CHECK_THROWS_AS(ts.validate(), ValidationError);
    }
    SUBCASE("ragged trajectory lengths") {
        ts.points[1].pop_back();
        CHECK_THROWS_AS(ts.validate(), ValidationError);
    }
    SUBCASE("visibility flag outside {0,1}") {
        ts.visibility[0][1] = 2;
        CHECK_THROWS_AS(ts.validate(), ValidationError);
    }
    SUBCASE("non-finite coordinate") {
        ts.points[0][0][1] = std::numeric_limits<double>::quiet_NaN();
        CHECK_THROWS_AS(ts.validate(), ValidationError);
    }
    SUBCASE("too short") {
        for (auto& p : ts.points) p.resize(1);
        for (auto& v : ts.visibility) v.resize(1);
        CHECK_THROWS_AS(ts.validate(), ValidationError);
    }
    SUBCASE("bad frame size") {
        ts.frame_width = 0;
        CHECK_THROWS_AS(ts.validate(), ValidationError);
    }
    SUBCASE("visibility row count mismatch") {
        ts.visibility.pop_back();
        CHECK_THROWS_AS(ts.validate(), ValidationError);
    }
}

TEST_CASE("trajectory JSON round trip preserves exact values") {
    const std::string path = "tmp_traj_roundtrip.json";
    TrajectorySet ts = make_set();
    ts.points[0][1] = {0.1, -3.75};  // 0.1 is not dyadic; round trip must still be exact
    save_trajectories(ts, path);
    TrajectorySet back = load_trajectories(path);
    REQUIRE(back.n() == ts.n());
    REQUIRE(back.t() == ts.t());
    CHECK(back.frame_width == ts.frame_width);
    CHECK(back.frame_height == ts.frame_height);
    for (int n = 0; n < ts.n(); ++n)
        for (int t = 0; t < ts.t(); ++t) {
            CHECK(back.points[n][t][0] == ts.points[n][t][0]);
            CHECK(back.points[n][t][1] == ts.points[n][t][1]);
            CHECK(back.visibility[n][t] == ts.visibility[n][t]);
        }
    std::remove(path.c_str());
}

TEST_CASE("trajectory file parsing errors") {
    const std::string path = "tmp_traj_bad.json";
    SUBCASE("malformed JSON") {
        write_file(path, "{not json");
        CHECK_THROWS_AS(load_trajectories(path), ParseError);
    }
    SUBCASE("missing frame_size") {
        write_file(path, R"({"trajectories": []})");
        CHECK_THROWS_AS(load_trajectories(path), ParseError);
    }
    SUBCASE("point is not a pair") {
        write_file(path, R"({"frame_size": [8, 8], "trajectories":
            [{"points": [[0, 0], [1]], "visibility": [1, 1]}]})");
        CHECK_THROWS_AS(load_trajectories(path), ParseError);
    }
    SUBCASE("fractional visibility flag") {
        write_file(path, R"({"frame_size": [8, 8], "trajectories":
            [{"points": [[0, 0], [1, 1]], "visibility": [1, 0.5]}]})");
        CHECK_THROWS_AS(load_trajectories(path), ValidationError);
    }
    SUBCASE("integer visibility flag out of range") {
        write_file(path, R"({"frame_size": [8, 8], "trajectories":
            [{"points": [[0, 0], [1, 1]], "visibility": [1, 3]}]})");
        CHECK_THROWS_AS(load_trajectories(path), ValidationError);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(load_trajectories("tmp_no_such_file.json"), ParseError);
    }
    std::remove(path.c_str());
}

TEST_CASE("velocities are consecutive deltas") {
    TrajectorySet ts = make_set();
    VelocityField vf = velocities(ts);
    REQUIRE(vf.deltas.size() == 2);
    REQUIRE(vf.deltas[0].size() == 2);
    CHECK(vf.deltas[0][0][0] == 1.5);
    CHECK(vf.deltas[0][0][1] == 2.0);
    CHECK(vf.deltas[1][1][0] == 1.0);
    CHECK(vf.deltas[1][1][1] == -0.5);
}

TEST_CASE("PGM mask parsing") {
    const std::string path = "tmp_mask.pgm";
    SUBCASE("ascii with comment, threshold at 127/128") {
        write_file(path, "P2\n# a comment\n3 2\n255\n0 127 128\n255 1 200\n");
        ForegroundMask m = load_mask(path);
        CHECK(m.width == 3);
        CHECK(m.height == 2);
        CHECK(m.at(0, 0) == 0);
        CHECK(m.at(1, 0) == 0);  // 127 is background
        CHECK(m.at(2, 0) == 1);  // 128 is foreground
        CHECK(m.at(0, 1) == 1);
        CHECK(m.at(1, 1) == 0);
        CHECK(m.at(2, 1) == 1);
        CHECK(m.foreground_count() == 3);
    }
    SUBCASE("binary raster") {
        std::string data = "P5\n2 2\n255\n";
        data.push_back(static_cast<char>(0));
        data.push_back(static_cast<char>(200));
        data.push_back(static_cast<char>(128));
        data.push_back(static_cast<char>(10));
        write_file(path, data);
        ForegroundMask m = load_mask(path);
        CHECK(m.at(0, 0) == 0);
        CHECK(m.at(1, 0) == 1);
        CHECK(m.at(0, 1) == 1);
        CHECK(m.at(1, 1) == 0);
    }
    SUBCASE("bad magic") {
        write_file(path, "P6\n2 2\n255\n....");
        CHECK_THROWS_AS(load_mask(path), ParseError);
    }
    SUBCASE("truncated binary raster") {
        write_file(path, std::string("P5\n2 2\n255\nab"));
        CHECK_THROWS_AS(load_mask(path), ParseError);
    }
    SUBCASE("truncated ascii raster") {
        write_file(path, "P2\n2 2\n255\n1 2 3\n");
        CHECK_THROWS_AS(load_mask(path), ParseError);
    }
    SUBCASE("maxval above 255") {
        write_file(path, "P2\n1 1\n999\n500\n");
        CHECK_THROWS_AS(load_mask(path), ParseError);
    }
    std::remove(path.c_str());
}
