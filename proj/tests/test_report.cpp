#include "helpers.hpp"

#include "zetalab/report.hpp"

using namespace zetalab;
using report::json;

namespace {

BoundReport sample_report() {
    BoundReport r;
    r.lemma_id = "lemma3";
    r.lhs = make_quantity<double>(0.012345678, 1e-6, 53);
    r.rhs_envelope = make_quantity(2.5);
    r.ratio = 0.0049382712;
    r.add("points_evaluated", make_quantity(4.0));
    r.add("root", make_quantity<double>(0.98765, 1e-3, 53));
    r.notes.push_back("a note, with a comma");
    r.grid_columns = {"sigma", "t", "lhs"};
    r.grid_rows = {{"3", "0", "0.01"}, {"2", "14.1", "0.2"}};
    return r;
}

}  // namespace

TEST_CASE("digits follow the error bound") {
    CHECK(make_quantity<double>(M_PI, 1e-3, 53).text == "3.142");
    CHECK(make_quantity<double>(1.6449340668482264, 1e-10, 53).text == "1.6449340668");
    precision_scope<mp_real> s(256);
    auto q = make_quantity<mp_real>(mp_real(1) / 3, 1e-40, 256);
    CHECK(q.text.size() == 2 + 40);
    // never fewer than one digit, never more than the working precision carries
    CHECK(!make_quantity<double>(5.0, 100.0, 53).text.empty());
    CHECK(make_quantity<mp_real>(mp_real(1) / 3, 0.0, 128).text.size() <= 2 + 39);
}

TEST_CASE("report JSON has a fixed field order") {
    const json j = report::bound_report(sample_report());
    std::vector<std::string> keys;
    for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
    CHECK(keys == std::vector<std::string>{"lemma_id", "lhs", "rhs_envelope", "ratio", "hypotheses_satisfied", "params",
                                           "extras", "notes"});
    CHECK(j["lhs"]["err_bound"] == "1.000e-06");
    CHECK(j["params"].is_null());
    CHECK(j["extras"].begin().key() == "points_evaluated");
    CHECK(report::bound_report(sample_report()).dump(2) == j.dump(2));
}

TEST_CASE("CSV output is versioned and escaped") {
    const std::string grid = report::bound_report_csv(sample_report());
    CHECK(grid.rfind(std::string(report::csv_version_line) + "\nsigma,t,lhs\n", 0) == 0);
    BoundReport nogrid = sample_report();
    nogrid.grid_rows.clear();
    const std::string flat = report::bound_report_csv(nogrid);
    CHECK(flat.find("name,value,err_bound\n") != std::string::npos);
    CHECK(flat.find("root,0.988,1.000e-03\n") != std::string::npos);
    CHECK(report::csv_escape("a,b") == "\"a,b\"");
    CHECK(report::csv_escape("say \"x\"") == "\"say \"\"x\"\"\"");
}

TEST_CASE("error objects and text output") {
    const json e = report::error_object("pole", "zeta has a pole at s = 1");
    CHECK(e.dump() == R"({"error":{"kind":"pole","message":"zeta has a pole at s = 1"}})");
    const std::string t = report::as_text(json{{"a", json{{"b", "1"}}}, {"c", 2}});
    CHECK(t == "a.b: 1\nc: 2\n");
    CHECK(report::err_text(0.0) == "0");
    CHECK(report::err_text(INFINITY) == "inf");
}
