#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <stdexcept>
#include <string>

#include "sivcav/table_io.hpp"

using namespace sivcav;

namespace {

io::Table sample_table() {
    io::Table t;
    t.column_names = {"tau_ns", "g2", "sigma"};
    t.columns = {{0.0, 0.5, 1.0, 2.5}, {0.1, 0.35, 0.92, 1.0}, {0.01, 0.01, 0.02, 0.02}};
    t.metadata = {{"scenario", "g2"}, {"seed", "42"}, {"note", "unit test fixture"}};
    return t;
}

}  // namespace

TEST_CASE("emit then parse reproduces every bit of every cell") {
    io::Table t;
    t.column_names = {"value"};
    t.columns = {{
        0.1,
        1.0 / 3.0,
        0.1 + 0.2,  // 0.30000000000000004, classic 17-digit case
        3.141592653589793,
        -0.0,
        1e-300,
        1.7e308,
        5e-324,  // smallest subnormal
        std::nextafter(1.0, 2.0),
        -2.2250738585072014e-308,
    }};
    t.metadata = {{"kind", "extremes"}};

    const io::Table back = io::parse_table(io::format_table(t));
    REQUIRE(back.rows() == t.rows());
    for (std::size_t i = 0; i < t.rows(); ++i) {
        CHECK(back.columns[0][i] == t.columns[0][i]);
        CHECK(std::signbit(back.columns[0][i]) == std::signbit(t.columns[0][i]));
    }
}

TEST_CASE("non-finite values survive the text round trip") {
    io::Table t;
    t.column_names = {"v"};
    t.columns = {{std::numeric_limits<double>::infinity(),
                  -std::numeric_limits<double>::infinity(),
                  std::numeric_limits<double>::quiet_NaN()}};
    const io::Table back = io::parse_table(io::format_table(t));
    REQUIRE(back.rows() == 3);
    CHECK(std::isinf(back.columns[0][0]));
    CHECK(back.columns[0][0] > 0.0);
    CHECK(std::isinf(back.columns[0][1]));
    CHECK(back.columns[0][1] < 0.0);
    CHECK(std::isnan(back.columns[0][2]));
}

TEST_CASE("formatting is idempotent and metadata ordering deterministic") {
    const io::Table t = sample_table();
    const std::string once = io::format_table(t);
    const std::string twice = io::format_table(io::parse_table(once));
    CHECK(once == twice);

    // std::map iterates keys sorted, so "note" precedes "scenario" and "seed".
    const auto note = once.find("# note:");
    const auto scenario = once.find("# scenario:");
    const auto seed = once.find("# seed:");
    REQUIRE(note != std::string::npos);
    REQUIRE(scenario != std::string::npos);
    REQUIRE(seed != std::string::npos);
    CHECK(note < scenario);
    CHECK(scenario < seed);

    const io::Table back = io::parse_table(once);
    CHECK(back.column_names == t.column_names);
    CHECK(back.metadata == t.metadata);
    CHECK(back.columns == t.columns);
}

TEST_CASE("parser tolerates blank lines and bare comment markers") {
    const std::string text =
        "#\n"
        "# seed: 7\n"
        "\n"
        "# columns: a b\n"
        "1 2\n"
        "\n"
        "3 4\n";
    const io::Table t = io::parse_table(text);
    CHECK(t.rows() == 2);
    CHECK(t.metadata.at("seed") == "7");
    CHECK(t.columns[1][1] == 4.0);
}

TEST_CASE("malformed inputs are rejected with specific errors") {
    CHECK_THROWS_AS(io::parse_table("# columns: a\n1\nx\n"), std::invalid_argument);
    CHECK_THROWS_AS(io::parse_table("# columns: a b\n1\n"), std::invalid_argument);
    CHECK_THROWS_AS(io::parse_table("# columns: a\n1 2\n"), std::invalid_argument);
    CHECK_THROWS_AS(io::parse_table("1 2\n# columns: a b\n"), std::invalid_argument);
    CHECK_THROWS_AS(io::parse_table("# just a comment without separator\n# columns: a\n1\n"),
                    std::invalid_argument);
    CHECK_THROWS_AS(io::parse_table(""), std::invalid_argument);
    CHECK_THROWS_AS(io::parse_table("# seed: 1\n"), std::invalid_argument);
    // Trailing garbage glued to a number is not a valid cell.
    CHECK_THROWS_AS(io::parse_table("# columns: a\n1.5e\n"), std::invalid_argument);
}

TEST_CASE("structural validation rejects inconsistent tables") {
    io::Table t = sample_table();
    t.column_names.pop_back();
    CHECK_THROWS_AS(io::validate(t), std::invalid_argument);

    t = sample_table();
    t.columns[1].pop_back();
    CHECK_THROWS_AS(io::validate(t), std::invalid_argument);

    t = sample_table();
    t.column_names[0] = "tau ns";
    CHECK_THROWS_AS(io::validate(t), std::invalid_argument);

    t = sample_table();
    t.column_names[0] = "";
    CHECK_THROWS_AS(io::validate(t), std::invalid_argument);

    t = io::Table{};
    CHECK_THROWS_AS(io::validate(t), std::invalid_argument);

    t = sample_table();
    t.metadata["bad:key"] = "x";
    CHECK_THROWS_AS(io::validate(t), std::invalid_argument);

    t = sample_table();
    t.metadata["key"] = "line1\nline2";
    CHECK_THROWS_AS(io::validate(t), std::invalid_argument);

    t = sample_table();
    t.metadata[""] = "x";
    CHECK_THROWS_AS(io::validate(t), std::invalid_argument);
}

TEST_CASE("file write and read round trip") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "sivcav_table_io_test";
    fs::create_directories(dir);
    const fs::path file = dir / "sample.txt";

    const io::Table t = sample_table();
    io::write_table(file, t);
    const io::Table back = io::read_table(file);
    CHECK(back.columns == t.columns);
    CHECK(back.metadata == t.metadata);
    CHECK(back.column_names == t.column_names);

    CHECK_THROWS_AS(io::read_table(dir / "does_not_exist.txt"), std::runtime_error);
    fs::remove_all(dir);
}
