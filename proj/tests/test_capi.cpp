#include "doctest.h"

#include "rhlab/rhlab.h"

#include <cstring>
#include <string>

TEST_CASE("operator handles") {
    rhlab_operator* op = nullptr;
    REQUIRE(rhlab_operator_parse("D^2 - z", &op) == RHLAB_OK);
    CHECK(rhlab_operator_order(op) == 2);
    CHECK(rhlab_operator_is_fuchsian(op, 0) == 1);
    CHECK(rhlab_operator_is_fuchsian(op, 1) == 0);
    char* text = nullptr;
    REQUIRE(rhlab_operator_to_string(op, &text) == RHLAB_OK);
    CHECK(std::strlen(text) > 0);
    rhlab_string_free(text);
    rhlab_operator_free(op);
}

TEST_CASE("parse errors report a position") {
    rhlab_operator* op = nullptr;
    CHECK(rhlab_operator_parse("D^2 + * z", &op) == RHLAB_ERR_PARSE);
    CHECK(op == nullptr);
    CHECK(std::string(rhlab_last_error_kind()) == "parse");
    CHECK(rhlab_last_error_line() == 1);
    CHECK(rhlab_last_error_column() == 7);
    CHECK(rhlab_operator_parse(nullptr, &op) == RHLAB_ERR_ARGUMENT);
}

TEST_CASE("analyze and check round trip") {
    rhlab_operator* op = nullptr;
    REQUIRE(rhlab_operator_parse("D^2 - z", &op) == RHLAB_OK);
    rhlab_analyze_options o;
    rhlab_analyze_options_init(&o);
    o.at_infinity = 1;
    rhlab_report* rep = nullptr;
    REQUIRE(rhlab_analyze(op, &o, &rep) == RHLAB_OK);
    char* json = nullptr;
    REQUIRE(rhlab_report_json(rep, -1, &json) == RHLAB_OK);
    char* result = nullptr;
    CHECK(rhlab_check_stokes(json, nullptr, 1e-6, &result) == RHLAB_OK);
    CHECK(std::string(result).find("\"valid\":true") != std::string::npos);
    rhlab_string_free(result);

    result = nullptr;
    CHECK(rhlab_check_stokes(json, "{\"matrices\": []}", 1e-6, &result) == RHLAB_ERR_INVALID);
    rhlab_string_free(result);

    result = nullptr;
    CHECK(rhlab_check_stokes("{not json", nullptr, 1e-6, &result) == RHLAB_ERR_PARSE);
    CHECK(result == nullptr);

    rhlab_string_free(json);
    rhlab_report_free(rep);
    rhlab_operator_free(op);
}

TEST_CASE("plot through the C API") {
    rhlab_operator* op = nullptr;
    REQUIRE(rhlab_operator_parse("z^2*D + 1", &op) == RHLAB_OK);
    rhlab_plot_options o;
    rhlab_plot_options_init(&o);
    o.samples = 10;
    char *csv = nullptr, *svg = nullptr;
    REQUIRE(rhlab_plot(op, &o, &csv, &svg) == RHLAB_OK);
    CHECK(std::string(csv).rfind("theta,curve_1,dominant_index\n", 0) == 0);
    CHECK(svg != nullptr);
    rhlab_string_free(csv);
    rhlab_string_free(svg);
    o.samples = 0;
    CHECK(rhlab_plot(op, &o, &csv, nullptr) == RHLAB_ERR_ARGUMENT);
    rhlab_operator_free(op);
}
