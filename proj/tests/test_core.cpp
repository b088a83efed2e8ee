#include <doctest.h>

#include <cmath>

#include "ffsrm/config_file.hpp"
#include "ffsrm/image.hpp"
#include "ffsrm/reconstruction.hpp"

using namespace ffsrm;

TEST_SUITE("core") {

TEST_CASE("validate_stack accepts a zero stack") {
    ImageStack stack(10, 32, 32, 80.0);
    const auto report = validate_stack(stack);
    CHECK(report.valid);
    CHECK(report.issues.empty());
}

TEST_CASE("validate_stack reports NaN with coordinates") {
    ImageStack stack(2, 4, 4, 80.0);
    stack.at(1, 2, 3) = std::nan("");
    const auto report = validate_stack(stack);
    CHECK_FALSE(report.valid);
    REQUIRE_FALSE(report.issues.empty());
    CHECK(report.issues.front().find("(1, 2, 3)") != std::string::npos);
}

TEST_CASE("validate_stack flags negatives unless allowed") {
    ImageStack stack(1, 2, 2, 80.0);
    stack.at(0, 0, 1) = -1.0;
    CHECK_FALSE(validate_stack(stack).valid);
    stack.allow_negative = true;
    CHECK(validate_stack(stack).valid);
}

TEST_CASE("validate_stack rejects empty dimensions") {
    ImageStack stack;
    CHECK_FALSE(validate_stack(stack).valid);
}

TEST_CASE("pixel_trace returns the temporal series") {
    ImageStack stack(3, 2, 2, 80.0);
    stack.at(0, 1, 0) = 5.0;
    stack.at(1, 1, 0) = 7.0;
    stack.at(2, 1, 0) = 9.0;
    const auto trace = pixel_trace(stack, 1, 0);
    REQUIRE(trace.size() == 3);
    CHECK(trace[0] == 5.0);
    CHECK(trace[1] == 7.0);
    CHECK(trace[2] == 9.0);
}

TEST_CASE("method names round-trip") {
    for (Method m : {Method::Esi, Method::Sofi, Method::Srrf, Method::Sacd,
                     Method::Musical}) {
        CHECK(method_from_name(method_name(m)) == m);
    }
    CHECK_THROWS_AS(method_from_name("bogus"), std::invalid_argument);
}

TEST_CASE("config file parses typed values and rejects unknown keys") {
    const auto cfg = ConfigFile::parse_text("# comment\nalpha = 4.0\nname= two_point \n"
                                            "frames = 16, 100\nflag = true\n");
    CHECK(cfg.get_double("alpha", 0.0) == 4.0);
    CHECK(cfg.get_string("name", "") == "two_point");
    CHECK(cfg.get_bool("flag", false));
    const auto list = cfg.get_list("frames");
    REQUIRE(list.size() == 2);
    CHECK(list[0] == "16");
    CHECK(list[1] == "100");
    CHECK_NOTHROW(cfg.reject_unknown_keys());

    const auto extra = ConfigFile::parse_text("alpha = 1\nbeta = 2\n");
    extra.get_double("alpha", 0.0);
    CHECK_THROWS_AS(extra.reject_unknown_keys(), std::invalid_argument);
}

TEST_CASE("config file rejects malformed lines and duplicates") {
    CHECK_THROWS_AS(ConfigFile::parse_text("no_equals_sign\n"), std::invalid_argument);
    CHECK_THROWS_AS(ConfigFile::parse_text("a = 1\na = 2\n"), std::invalid_argument);
    const auto cfg = ConfigFile::parse_text("a = x\n");
    CHECK_THROWS_AS(cfg.get_double("a", 0.0), std::invalid_argument);
    CHECK_THROWS_AS(cfg.require_int("missing"), std::invalid_argument);
}

}  // TEST_SUITE
