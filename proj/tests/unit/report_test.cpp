#include <doctest.h>

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

#include "sivcav/report.hpp"

using namespace sivcav;

namespace {

report::Document demo_document() {
    report::Document doc;
    doc.set("name", "demo");
    doc.set("count", std::int64_t{3});
    doc.set("ok", true);
    auto& fit = doc.section("fit");
    fit.set("chi2", 1.25);
    fit.set("label", "x");
    return doc;
}

}  // namespace

TEST_CASE("entries render in insertion order, not sorted") {
    report::Document doc;
    doc.set("zebra", 1.0);
    doc.set("alpha", 2.0);
    doc.set("mid", 3.0);

    const std::string json = doc.to_json();
    const std::string text = doc.to_text();
    CHECK(json.find("zebra") < json.find("alpha"));
    CHECK(json.find("alpha") < json.find("mid"));
    CHECK(text.find("zebra") < text.find("alpha"));
    CHECK(text.find("alpha") < text.find("mid"));
}

TEST_CASE("overwriting a key keeps its position and takes the new type") {
    report::Document doc;
    doc.set("a", 1.0);
    doc.set("b", 2.0);
    doc.set("a", "replaced");

    const auto parsed = nlohmann::json::parse(doc.to_json());
    CHECK(parsed["a"] == "replaced");
    CHECK(parsed["b"] == 2.0);
    const std::string json = doc.to_json();
    CHECK(json.find("\"a\"") < json.find("\"b\""));
}

TEST_CASE("sections nest, reopen and reject scalar collisions") {
    report::Document doc;
    doc.section("fit").set("chi2", 0.5);
    doc.section("fit").set("iterations", std::int64_t{7});
    auto& inner = doc.section("fit").section("bounds");
    inner.set("lower", -1.0);

    const auto parsed = nlohmann::json::parse(doc.to_json());
    CHECK(parsed["fit"]["chi2"] == 0.5);
    CHECK(parsed["fit"]["iterations"] == 7);
    CHECK(parsed["fit"]["bounds"]["lower"] == -1.0);

    doc.set("scalar", 1.0);
    CHECK_THROWS_AS(doc.section("scalar"), std::invalid_argument);
}

TEST_CASE("repeated builds render byte-identically") {
    const std::string j1 = demo_document().to_json();
    const std::string j2 = demo_document().to_json();
    CHECK(j1 == j2);
    const std::string t1 = demo_document().to_text();
    const std::string t2 = demo_document().to_text();
    CHECK(t1 == t2);

    const report::Document doc = demo_document();
    CHECK(doc.to_json() == j1);
    CHECK(doc.to_json() == j1);
}

TEST_CASE("json output is machine-parseable and value-faithful") {
    report::Document doc;
    doc.set("pi", 3.141592653589793);
    doc.set("tiny", 5e-324);
    doc.set("negative", -12345.6789);
    doc.set("count", std::int64_t{-9223372036854775807LL});
    doc.set("flag", false);
    doc.set("text", "plain");

    const auto parsed = nlohmann::json::parse(doc.to_json());
    CHECK(parsed["pi"].get<double>() == 3.141592653589793);
    CHECK(parsed["tiny"].get<double>() == 5e-324);
    CHECK(parsed["negative"].get<double>() == -12345.6789);
    CHECK(parsed["count"].get<std::int64_t>() == -9223372036854775807LL);
    CHECK(parsed["flag"].get<bool>() == false);
    CHECK(parsed["text"].get<std::string>() == "plain");
}

TEST_CASE("strings with quotes, backslashes and control bytes stay valid json") {
    const std::string nasty = "she said \"hi\\there\"\nnew\tline\r\x01 end";
    report::Document doc;
    doc.set("nasty", nasty);
    doc.set(nasty, "key side");

    const auto parsed = nlohmann::json::parse(doc.to_json());
    CHECK(parsed["nasty"].get<std::string>() == nasty);
    CHECK(parsed[nasty].get<std::string>() == "key side");
}

TEST_CASE("non-finite doubles use the document conventions") {
    report::Document doc;
    doc.set("undefined", std::numeric_limits<double>::quiet_NaN());
    doc.set("pinf", std::numeric_limits<double>::infinity());
    doc.set("ninf", -std::numeric_limits<double>::infinity());

    const std::string json = doc.to_json();
    CHECK(json.find("\"undefined\": null") != std::string::npos);
    CHECK(json.find("\"pinf\": 1e999") != std::string::npos);
    CHECK(json.find("\"ninf\": -1e999") != std::string::npos);
}

TEST_CASE("empty documents and sections render cleanly") {
    report::Document doc;
    CHECK(doc.empty());
    CHECK(doc.to_json() == "{}\n");
    CHECK(doc.to_text() == "");

    doc.section("hollow");
    CHECK_FALSE(doc.empty());
    const auto parsed = nlohmann::json::parse(doc.to_json());
    CHECK(parsed["hollow"].is_object());
    CHECK(parsed["hollow"].empty());
    CHECK(doc.to_text() == "[hollow]\n");
}

TEST_CASE("text rendering matches the documented fixed layout") {
    const std::string expected =
        "name = demo\n"
        "count = 3\n"
        "ok = true\n"
        "[fit]\n"
        "  chi2 = 1.25\n"
        "  label = x\n";
    CHECK(demo_document().to_text() == expected);
}
