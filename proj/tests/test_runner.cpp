#include <doctest.h>

#include <fstream>
#include <sstream>

#include "freeprod/instance_gen.hpp"
#include "freeprod/runner.hpp"

using namespace freeprod;
using nlohmann::json;

namespace {
std::string read_file(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string fixture(const std::string& name) {
    return read_file(std::string(FIXTURE_DIR) + "/" + name);
}
}  // namespace

TEST_CASE("verify-kd fixture passes with ratio one") {
    std::string report, err;
    int code = run_to_stream(fixture("verify_kd_u1u2.json"), {}, report, err);
    CHECK(code == 0);
    json r = json::parse(report);
    CHECK(r["pass"].get<bool>());
    CHECK(r["values"]["ratio"]["value"].get<double>() == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(r["values"]["ed_norm"]["certificate"] == "svd-certified");
}

TEST_CASE("haagerup fixture bounds [1, 2]") {
    std::string report, err;
    int code = run_to_stream(fixture("haagerup_g1.json"), {}, report, err);
    CHECK(code == 0);
    json r = json::parse(report);
    CHECK(r["values"]["l2"]["value"].get<double>() == doctest::Approx(1.0));
    CHECK(r["values"]["truncated_norm"]["value"].get<double>() == doctest::Approx(1.0));
    CHECK(r["values"]["constant"]["value"].get<double>() == 2.0);
}

TEST_CASE("enclosure fixture") {
    std::string report, err;
    int code = run_to_stream(fixture("enclose_u1_plus_u2.json"), {}, report, err);
    CHECK(code == 0);
    json r = json::parse(report);
    CHECK(r["values"]["lower"]["value"].get<double>() ==
          doctest::Approx(2.0 * std::cos(M_PI / 10)).epsilon(1e-9));
    CHECK(r["values"]["upper"]["value"].get<double>() ==
          doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-9));
}

TEST_CASE("malformed configs exit with code 2 and a field pointer") {
    std::string report, err;
    int code = run_to_stream("{\"task\": \"verify-kd\", \"algebras\": [{\"n\": 2}]}",
                             {}, report, err);
    CHECK(code == 2);
    CHECK(err.find("rho") != std::string::npos);

    code = run_to_stream("not json", {}, report, err);
    CHECK(code == 2);

    code = run_to_stream("{\"task\": \"unknown-task\"}", {}, report, err);
    CHECK(code == 2);

    // non-centered letter
    json cfg = json::parse(fixture("verify_kd_u1u2.json"));
    cfg["element"]["terms"][0]["letters"][0]["matrix"] = {{1, 0}, {0, 0}, {0, 0}, {1, 0}};
    code = run_to_stream(cfg.dump(), {}, report, err);
    CHECK(code == 2);
    CHECK(err.find("centered") != std::string::npos);
}

TEST_CASE("reports are byte identical across runs") {
    for (const char* name :
         {"verify_kd_u1u2.json", "enclose_u1_plus_u2.json", "haagerup_g1.json",
          "leinert_units.json", "cbnorm_signed.json", "polarize_radial.json",
          "poisson_seeded.json", "projection_bounds_seeded.json"}) {
        std::string r1, r2, err;
        int c1 = run_to_stream(fixture(name), {}, r1, err);
        int c2 = run_to_stream(fixture(name), {}, r2, err);
        INFO("fixture ", name);
        CHECK(c1 == c2);
        CHECK(r1 == r2);
        CHECK(!r1.empty());
    }
}

TEST_CASE("seed override changes generated instances deterministically") {
    std::string cfg = fixture("projection_bounds_seeded.json");
    RunOptions a, b;
    a.seed_override = 123;
    b.seed_override = 123;
    std::string r1, r2, err;
    run_to_stream(cfg, a, r1, err);
    run_to_stream(cfg, b, r2, err);
    CHECK(r1 == r2);
    RunOptions c;
    c.seed_override = 124;
    std::string r3;
    run_to_stream(cfg, c, r3, err);
    CHECK(r1 != r3);
    json j1 = json::parse(r1);
    CHECK(j1["seed"].get<std::uint64_t>() == 123);
}

TEST_CASE("generator determinism and centering") {
    FamilyPtr fam = bernoulli_family(2);
    GeneratorSpec spec;
    spec.degree = 3;
    spec.seed = 99;
    FreeElement x1 = generate_element(fam, spec);
    FreeElement x2 = generate_element(fam, spec);
    REQUIRE(x1.terms().size() == x2.terms().size());
    for (size_t i = 0; i < x1.terms().size(); ++i) {
        CHECK(x1.terms()[i].coeff == x2.terms()[i].coeff);
        for (size_t j = 0; j < x1.terms()[i].letters.size(); ++j) {
            const Letter& l = x1.terms()[i].letters[j];
            CHECK((l.matrix - x2.terms()[i].letters[j].matrix).cwiseAbs().maxCoeff() == 0.0);
            CHECK(std::abs(fam->at(l.algebra).state(l.matrix)) < 1e-12);
            Eigen::JacobiSVD<Matrix> svd(l.matrix);
            CHECK(svd.singularValues()(0) == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
    GeneratorSpec zero;
    zero.degree = 0;
    zero.seed = 1;
    FreeElement z = generate_element(fam, zero);
    CHECK(z.terms().empty());
    CHECK(std::abs(z.scalar()) > 0);
}

TEST_CASE("timing is opt-in so default reports stay stable") {
    std::string r1, r2, err;
    RunOptions with;
    with.with_timing = true;
    run_to_stream(fixture("haagerup_g1.json"), {}, r1, err);
    run_to_stream(fixture("haagerup_g1.json"), with, r2, err);
    CHECK(r1.find("timing_ms") == std::string::npos);
    CHECK(r2.find("timing_ms") != std::string::npos);
}
