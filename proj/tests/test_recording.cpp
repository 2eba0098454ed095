#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "bvcsim/recording.hpp"
#include "bvcsim/sensor.hpp"

using namespace bvcsim;
namespace fs = std::filesystem;

namespace {

fs::path test_dir() {
    const fs::path dir = fs::temp_directory_path() / "bvcsim_recording_test";
    fs::create_directories(dir);
    return dir;
}

TraceHeader sample_header() {
    TraceHeader h;
    h.model = "3d02";
    h.env_tilt_deg = 45.0;
    h.n_p = 250;
    h.n_b = 960;
    h.seed = 12345;
    h.config_digest = "00aa11bb22cc33dd";
    return h;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("trace round trip: header, samples, sparse encoding, count patch") {
    const fs::path path = test_dir() / "roundtrip.txt";
    const TraceHeader h = sample_header();

    std::vector<TraceSample> samples;
    {
        TraceSample s;
        s.step = 0;
        s.x = -2.5;
        s.y = 1.25;
        s.heading = 0.75;
        s.activations = {{3, 0.25}, {17, 0.001}, {249, 0.999}};
        samples.push_back(s);
    }
    {
        TraceSample s;  // all-zero activation vector encodes as an empty list
        s.step = 1;
        s.x = 0.0;
        s.y = 0.0;
        s.heading = -kPi;
        samples.push_back(s);
    }

    {
        TraceWriter writer(path, h);
        for (const TraceSample& s : samples) writer.append(s);
        writer.close();
    }

    TraceReader reader(path);
    CHECK(reader.header().model == h.model);
    CHECK(reader.header().env_tilt_deg == h.env_tilt_deg);
    CHECK(reader.header().n_p == h.n_p);
    CHECK(reader.header().n_b == h.n_b);
    CHECK(reader.header().seed == h.seed);
    CHECK(reader.header().config_digest == h.config_digest);
    CHECK(reader.header().declared_samples == 2);

    const auto s0 = reader.next();
    REQUIRE(s0.has_value());
    CHECK(s0->step == 0);
    CHECK(s0->x == samples[0].x);
    CHECK(s0->activations == samples[0].activations);
    const auto s1 = reader.next();
    REQUIRE(s1.has_value());
    CHECK(s1->activations.empty());
    CHECK_FALSE(reader.next().has_value());
}

TEST_CASE("pose append applies the sparsity floor") {
    const fs::path path = test_dir() / "sparse.txt";
    {
        TraceWriter writer(path, sample_header());
        Pose pose{1.0, 2.0, 0.5, 0.25};
        std::vector<double> rates(250, 0.0);
        rates[5] = 0.5;
        rates[6] = 1e-4;      // at the floor: dropped
        rates[7] = 1.001e-4;  // just above: kept
        writer.append(0, pose, rates);
        writer.close();
    }
    TraceReader reader(path);
    const auto s = reader.next();
    REQUIRE(s.has_value());
    REQUIRE(s->activations.size() == 2);
    CHECK(s->activations[0].first == 5);
    CHECK(s->activations[1].first == 7);
}

TEST_CASE("write-read-rewrite is byte stable") {
    const fs::path p1 = test_dir() / "stable1.txt";
    const fs::path p2 = test_dir() / "stable2.txt";
    {
        TraceWriter writer(p1, sample_header());
        TraceSample s;
        s.step = 7;
        s.x = 0.123456789123;
        s.y = -4.9999999;
        s.heading = 1.0471975511965976;
        s.activations = {{0, 0.123456789}, {12, 0.000777131}};
        writer.append(s);
        writer.close();
    }
    {
        TraceReader reader(p1);
        TraceWriter writer(p2, reader.header());
        while (auto s = reader.next()) writer.append(*s);
        writer.close();
    }
    CHECK(slurp(p1) == slurp(p2));
}

TEST_CASE("reader reports version, truncation, format and digest errors distinctly") {
    const fs::path dir = test_dir();

    SUBCASE("version") {
        const fs::path p = dir / "bad_version.txt";
        std::ofstream(p) << "# other-format v9\n";
        CHECK_THROWS_AS(TraceReader{p}, TraceError);
        try {
            TraceReader r{p};
        } catch (const TraceError& e) {
            CHECK(e.kind == TraceError::Kind::version);
        }
    }

    SUBCASE("truncation: fewer samples than declared") {
        const fs::path p = dir / "truncated.txt";
        {
            TraceWriter writer(p, sample_header());
            TraceSample s;
            s.step = 0;
            writer.append(s);
            s.step = 1;
            writer.append(s);
            writer.close();
        }
        // Drop the last line.
        std::string text = slurp(p);
        text.erase(text.rfind("1 "));
        std::ofstream(p, std::ios::binary) << text;

        TraceReader reader(p);
        CHECK(reader.next().has_value());
        CHECK_THROWS_AS(reader.next(), TraceError);
    }

    SUBCASE("format: malformed activation entry") {
        const fs::path p = dir / "badline.txt";
        {
            TraceWriter writer(p, sample_header());
            TraceSample s;
            writer.append(s);
            writer.close();
        }
        std::string text = slurp(p);
        text.replace(text.rfind("0 0 0 0 0"), 9, "0 0 0 0 1");  // claims 1 entry
        std::ofstream(p, std::ios::binary) << text;
        TraceReader reader(p);
        CHECK_THROWS_AS(reader.next(), TraceError);
    }

    SUBCASE("digest") {
        const fs::path p = dir / "digest.txt";
        {
            TraceWriter writer(p, sample_header());
            writer.close();
        }
        TraceReader reader(p);
        CHECK_NOTHROW(reader.require_digest("00aa11bb22cc33dd"));
        try {
            reader.require_digest("ffffffffffffffff");
            CHECK(false);
        } catch (const TraceError& e) {
            CHECK(e.kind == TraceError::Kind::digest);
        }
    }
}

TEST_CASE("a desk-scale trace stays far below 100 MB") {
    // 15% of 250 cells active -> 38 entries per line.
    TraceSample s;
    s.step = 29999;
    s.x = -4.987654321;
    s.y = 4.987654321;
    s.heading = -3.14159265;
    for (int i = 0; i < 38; ++i) s.activations.emplace_back(i * 6, 0.123456);

    const fs::path p = test_dir() / "size.txt";
    TraceWriter writer(p, sample_header());
    writer.append(s);
    writer.close();
    const auto file_size = fs::file_size(p);
    // Extrapolate one line to 30k samples plus header slack.
    CHECK(static_cast<double>(file_size) * 30000.0 < 100.0 * 1024 * 1024);
}
