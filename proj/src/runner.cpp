#include "freeprod/runner.hpp"

#include <chrono>
#include <cmath>

#include "freeprod/free_group.hpp"
#include "freeprod/instance_gen.hpp"
#include "freeprod/khintchine.hpp"
#include "freeprod/schur.hpp"

namespace freeprod {

namespace {

using nlohmann::json;

cxd parse_cxd(const json& j, const std::string& field) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ConfigError(field + " must be a [re, im] pair");
    return cxd(j[0].get<double>(), j[1].get<double>());
}

Matrix parse_matrix(const json& j, int rows, int cols, const std::string& field) {
    if (!j.is_array() || static_cast<int>(j.size()) != rows * cols)
        throw ConfigError(field + " must be a row-major list of " +
                          std::to_string(rows * cols) + " [re, im] pairs");
    Matrix m(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            m(r, c) = parse_cxd(j[r * cols + c], field);
    return m;
}

json dump_matrix(const Matrix& m) {
    json out = json::array();
    for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < m.cols(); ++c)
            out.push_back({std::real(m(r, c)), std::imag(m(r, c))});
    return out;
}

FamilyPtr parse_family(const json& config) {
    if (!config.contains("algebras") || !config["algebras"].is_array() ||
        config["algebras"].empty())
        throw ConfigError("algebras must be a nonempty array");
    std::vector<AlgebraWithState> algs;
    int i = 0;
    for (const auto& a : config["algebras"]) {
        std::string where = "algebras[" + std::to_string(i) + "]";
        if (!a.contains("n")) throw ConfigError(where + ".n is missing");
        int n = a["n"].get<int>();
        if (!a.contains("rho")) throw ConfigError(where + ".rho is missing");
        Matrix rho = parse_matrix(a["rho"], n, n, where + ".rho");
        try {
            algs.push_back(make_algebra(n, rho));
        } catch (const Error& e) {
            throw ConfigError(where + ": " + e.what());
        }
        ++i;
    }
    return make_family(std::move(algs));
}

GeneratorSpec parse_generator(const json& g, std::uint64_t default_seed) {
    GeneratorSpec spec;
    spec.seed = g.value("seed", default_seed);
    if (!g.contains("degree")) throw ConfigError("generator.degree is missing");
    spec.degree = g["degree"].get<int>();
    spec.letter_scale = g.value("letter_scale", 1.0);
    spec.terms_per_degree = g.value("terms_per_degree", 1);
    spec.homogeneous = g.value("homogeneous", false);
    return spec;
}

FreeElement parse_element(const json& config, const FamilyPtr& family,
                          std::uint64_t seed) {
    if (config.contains("element")) {
        const auto& e = config["element"];
        cxd scalar = e.contains("scalar") ? parse_cxd(e["scalar"], "element.scalar")
                                          : cxd(0.0);
        std::vector<FreeElement::Term> terms;
        if (e.contains("terms")) {
            int t = 0;
            for (const auto& term : e["terms"]) {
                std::string where = "element.terms[" + std::to_string(t) + "]";
                if (!term.contains("coeff"))
                    throw ConfigError(where + ".coeff is missing");
                cxd coeff = parse_cxd(term["coeff"], where + ".coeff");
                std::vector<Letter> letters;
                int li = 0;
                for (const auto& l : term["letters"]) {
                    std::string lwhere = where + ".letters[" + std::to_string(li) + "]";
                    if (!l.contains("algebra"))
                        throw ConfigError(lwhere + ".algebra is missing");
                    int alg = l["algebra"].get<int>();
                    if (alg < 0 || alg >= family->size())
                        throw ConfigError(lwhere + ".algebra out of range");
                    int n = family->at(alg).n();
                    if (!l.contains("matrix"))
                        throw ConfigError(lwhere + ".matrix is missing");
                    Matrix m = parse_matrix(l["matrix"], n, n, lwhere + ".matrix");
                    if (std::abs(family->at(alg).state(m)) > kEpsCenter)
                        throw ConfigError(lwhere + ".matrix is not phi-centered");
                    letters.push_back(Letter{alg, std::move(m)});
                    ++li;
                }
                terms.push_back(FreeElement::Term{coeff, std::move(letters)});
                ++t;
            }
        }
        try {
            return FreeElement::from_terms(family, scalar, std::move(terms));
        } catch (const Error& e2) {
            throw ConfigError(std::string("element: ") + e2.what());
        }
    }
    if (config.contains("generator"))
        return generate_element(family, parse_generator(config["generator"], seed));
    throw ConfigError("config needs either element or generator");
}

json value_entry(double v, const std::string& cert) {
    return json{{"value", v}, {"certificate", cert}};
}

struct Assertions {
    json list = json::array();
    bool all = true;
    void add(const std::string& name, bool pass, double lhs, double rhs, double tol) {
        list.push_back(json{{"name", name}, {"pass", pass}, {"lhs", lhs},
                            {"rhs", rhs}, {"tol", tol}});
        all = all && pass;
    }
};

int param_int(const json& config, const std::string& name, std::optional<int> dflt = {}) {
    if (config.contains("params") && config["params"].contains(name))
        return config["params"][name].get<int>();
    if (dflt) return *dflt;
    throw ConfigError("params." + name + " is missing");
}

double param_double(const json& config, const std::string& name,
                    std::optional<double> dflt = {}) {
    if (config.contains("params") && config["params"].contains(name))
        return config["params"][name].get<double>();
    if (dflt) return *dflt;
    throw ConfigError("params." + name + " is missing");
}

void task_verify_kd(const json& config, std::uint64_t seed, double /*tol*/,
                    json& values, Assertions& asserts) {
    FamilyPtr family = parse_family(config);
    int d = param_int(config, "d");
    int L = param_int(config, "L", d + 2);
    int s = param_int(config, "s", 1);
    AmplifiedElement x;
    if (config.contains("generator") && s > 1) {
        GeneratorSpec g = parse_generator(config["generator"], seed);
        g.homogeneous = true;
        g.degree = d;
        x = generate_amplified(family, g, s);
    } else {
        FreeElement e = parse_element(config, family, seed);
        if (!AmplifiedElement::from(e).homogeneous(d))
            throw ConfigError("element must be homogeneous of degree params.d");
        x = AmplifiedElement::from(e);
    }
    FockPtr fock = make_fock(family, L + d);
    KdReport r = verify_kd(fock, x, d, L);
    values["ed_norm"] = value_entry(r.ed, "svd-certified");
    values["truncated_norm"] = value_entry(r.t_L, "svd-certified");
    values["ratio"] = value_entry(r.ratio, "exact");
    values["constant"] = value_entry(r.constant, "exact");
    values["finite_family_constant"] = value_entry(r.alt_constant, "exact");
    asserts.add("kd_lower", r.lower_ok, r.ed, r.t_L, r.tol);
    asserts.add("kd_upper", r.upper_ok, r.t_L, r.constant * r.ed, r.tol);
}

void task_enclose_norm(const json& config, std::uint64_t seed, double /*tol*/,
                       json& values, Assertions& asserts) {
    FamilyPtr family = parse_family(config);
    FreeElement x = parse_element(config, family, seed);
    int d = x.degree();
    int L = param_int(config, "L", std::max(1, d));
    FockPtr fock = make_fock(family, std::max(L, d) + d);
    NormEnclosure e = enclose_norm(fock, x, L);
    values["lower"] = value_entry(e.lower, "svd-certified");
    values["upper"] = value_entry(e.upper, "svd-certified");
    values["band_route"] = value_entry(e.band_route, "svd-certified");
    values["khintchine_route"] = value_entry(e.khintchine_route, "svd-certified");
    values["witness_L"] = value_entry(e.witness_L, "exact");
    json bands = json::array();
    for (double b : e.band_norms) bands.push_back(b);
    values["band_norms"] = json{{"value", bands}, {"certificate", "svd-certified"}};
    asserts.add("lower_le_upper", e.lower <= e.upper + 1e-9, e.lower, e.upper, 1e-9);
}

void task_projection_bounds(const json& config, std::uint64_t seed, double /*tol*/,
                            json& values, Assertions& asserts) {
    FamilyPtr family = parse_family(config);
    FreeElement x = parse_element(config, family, seed);
    int d = param_int(config, "d", x.degree());
    int L = param_int(config, "L", std::max(1, x.degree()));
    FockPtr fock = make_fock(family, std::max(L, x.degree()) + x.degree());
    ProjectionReport r = verify_projection_bounds(fock, x, d, L);
    values["lower_Qd"] = value_entry(r.lower_qd, "svd-certified");
    values["lower_Pd"] = value_entry(r.lower_pd, "svd-certified");
    values["upper_x"] = value_entry(r.upper_x, "svd-certified");
    values["Qd_constant"] = value_entry(r.qd_constant, "exact");
    values["Pd_constant"] = value_entry(r.pd_constant, "exact");
    double tol = 1e-8 * std::max(1.0, r.upper_x);
    asserts.add("Qd_bound", r.qd_ok, r.lower_qd, r.qd_constant * r.upper_x, tol);
    asserts.add("Pd_bound", r.pd_ok, r.lower_pd, r.pd_constant * r.upper_x, tol);
}

void task_poisson(const json& config, std::uint64_t seed, double /*tol*/,
                  json& values, Assertions& asserts) {
    FamilyPtr family = parse_family(config);
    FreeElement x = parse_element(config, family, seed);
    double r = param_double(config, "r");
    int n = param_int(config, "n", x.degree());
    int d = x.degree();

    FreeElement via_semigroup = poisson(poisson(x, r), r);
    FreeElement direct = poisson(x, r * r);
    FreeElement diff = via_semigroup - direct;
    double semigroup_dev = std::abs(diff.scalar());
    for (const auto& t : diff.terms()) semigroup_dev = std::max(semigroup_dev, std::abs(t.coeff));

    StatePreservingMap ur = StatePreservingMap::interpolation_with_state(family, r);
    FreeElement via_bd = bd_free_product_map(ur, x);
    FreeElement bd_diff = via_bd - poisson(x, r);
    double bd_dev = std::abs(bd_diff.scalar());
    for (const auto& t : bd_diff.terms()) bd_dev = std::max(bd_dev, std::abs(t.coeff));

    TruncatedPoisson trunc = poisson_truncated(x, r, n);
    values["cb_bound"] = value_entry(trunc.cb_bound, "exact");
    values["semigroup_deviation"] = value_entry(semigroup_dev, "exact");
    values["bd_letterwise_deviation"] = value_entry(bd_dev, "exact");

    int L = param_int(config, "L", std::max(1, d));
    FockPtr fock = make_fock(family, std::max(L, d) + d);
    NormEnclosure ex = enclose_norm(fock, x, L);
    NormEnclosure ep = enclose_norm(fock, poisson(x, r), L);
    values["x_upper"] = value_entry(ex.upper, "svd-certified");
    values["poisson_lower"] = value_entry(ep.lower, "svd-certified");

    double scale = std::abs(x.scalar());
    for (const auto& t : x.terms()) scale = std::max(scale, std::abs(t.coeff));
    asserts.add("semigroup_law", semigroup_dev <= 1e-13 * std::max(1.0, scale),
                semigroup_dev, 0.0, 1e-13);
    asserts.add("bd_letterwise_law", bd_dev <= 1e-12 * std::max(1.0, scale), bd_dev,
                0.0, 1e-12);
    asserts.add("poisson_contraction", ep.lower <= ex.upper + 1e-8, ep.lower,
                ex.upper, 1e-8);
}

GroupWord parse_word(const json& j, const std::string& field) {
    if (!j.is_array()) throw ConfigError(field + " must be an int array");
    GroupWord w;
    for (const auto& g : j) w.push_back(g.get<int>());
    return reduce_word(w);
}

void task_haagerup(const json& config, std::uint64_t seed, double /*tol*/,
                   json& values, Assertions& asserts) {
    int k = param_int(config, "k", 2);
    int R = param_int(config, "R", 4);
    int d = param_int(config, "d", 1);
    std::vector<std::pair<GroupWord, cxd>> coeffs;
    if (config.contains("coeffs")) {
        int i = 0;
        for (const auto& c : config["coeffs"]) {
            std::string where = "coeffs[" + std::to_string(i) + "]";
            if (!c.contains("word")) throw ConfigError(where + ".word is missing");
            coeffs.emplace_back(parse_word(c["word"], where + ".word"),
                                parse_cxd(c["coeff"], where + ".coeff"));
            ++i;
        }
    } else {
        // seeded random coefficients on all length-d words
        GroupBall enumball(k, d);
        Rng rng(seed);
        std::normal_distribution<double> g(0.0, 1.0);
        for (std::int64_t i = enumball.dim(d - 1); i < enumball.dim(d); ++i)
            coeffs.emplace_back(enumball.word_at(i), cxd(g(rng), g(rng)));
    }
    GroupBall ball(k, R + d);
    HaagerupReport rep = haagerup_check(ball, coeffs, R);
    values["l2"] = value_entry(rep.l2, "exact");
    values["truncated_norm"] = value_entry(rep.t_R, "svd-certified");
    values["constant"] = value_entry(rep.constant, "exact");
    double tol = 1e-8 * std::max(1.0, rep.l2);
    asserts.add("haagerup_lower", rep.lower_ok, rep.l2, rep.t_R, tol);
    asserts.add("haagerup_upper", rep.upper_ok, rep.t_R, rep.constant * rep.l2, tol);
}

void task_leinert(const json& config, std::uint64_t seed, double /*tol*/,
                  json& values, Assertions& asserts) {
    int k = param_int(config, "k", 2);
    int R = param_int(config, "R", 4);
    int m = param_int(config, "m", 1);
    std::vector<Matrix> xs;
    if (config.contains("matrices")) {
        int i = 0;
        for (const auto& mj : config["matrices"]) {
            xs.push_back(parse_matrix(mj, m, m, "matrices[" + std::to_string(i) + "]"));
            ++i;
        }
    } else {
        Rng rng(seed);
        xs = random_coeffs(k, m, rng);
    }
    GroupBall ball(k, R + 1);
    LeinertReport rep = leinert_check(ball, xs, R);
    values["truncated_norm"] = value_entry(rep.t_R, "svd-certified");
    values["column"] = value_entry(rep.col, "svd-certified");
    values["row"] = value_entry(rep.row, "svd-certified");
    values["bound"] = value_entry(rep.bound, "exact");
    double tol = 1e-8 * std::max(1.0, rep.bound);
    asserts.add("leinert_upper", rep.upper_ok, rep.t_R, rep.bound, tol);
    asserts.add("leinert_converse", rep.converse_ok, std::max(rep.col, rep.row),
                rep.t_R, tol);
}

Matrix parse_symbol(const json& config) {
    if (!config.contains("symbol")) throw ConfigError("symbol is missing");
    const auto& s = config["symbol"];
    if (!s.contains("m")) throw ConfigError("symbol.m is missing");
    int m = s["m"].get<int>();
    if (!s.contains("entries")) throw ConfigError("symbol.entries is missing");
    return parse_matrix(s["entries"], m, m, "symbol.entries");
}

void task_cbnorm(const json& config, std::uint64_t /*seed*/, double tol,
                 json& values, Assertions& asserts) {
    Matrix a = parse_symbol(config);
    CbResult r = cb_norm(a, tol);
    values["cb_norm"] = value_entry(r.value, r.certificate);
    values["bracket_lo"] = value_entry(r.lo, r.certificate);
    values["bracket_hi"] = value_entry(r.hi, r.certificate);
    values["dykstra_iters"] = value_entry(r.dykstra_iters, "exact");
    double rec = r.fact.reconstruction_error(a);
    values["witness_reconstruction_error"] = value_entry(rec, "exact");
    asserts.add("bracket", r.lo <= r.hi + 1e-12, r.lo, r.hi, 1e-12);
    asserts.add("witness", rec <= 1e-7, rec, 1e-7, 0.0);
    asserts.add("converged", r.converged, r.hi - r.lo, tol, tol);
}

void task_polarize(const json& config, std::uint64_t /*seed*/, double tol,
                   json& values, Assertions& asserts) {
    Matrix a = parse_symbol(config);
    if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-10 ||
        a.imag().cwiseAbs().maxCoeff() > 1e-10)
        throw ConfigError("symbol must be real symmetric for polarize");
    for (int i = 0; i < a.rows(); ++i)
        if (std::abs(a(i, i) - cxd(1.0)) > 1e-10)
            throw ConfigError("symbol must have unit diagonal for polarize");
    CbResult r = cb_norm(a, tol);
    double eps = 0.0;
    for (int s = 0; s < r.fact.x.cols(); ++s) {
        eps = std::max(eps, r.fact.x.col(s).squaredNorm() - 1.0);
        eps = std::max(eps, r.fact.y.col(s).squaredNorm() - 1.0);
    }
    eps = std::max(eps, 0.0) + 1e-12;
    PolarizeResult p = polarize(r.fact.x, r.fact.y, eps);
    Matrix recon = (r.fact.x.adjoint() * r.fact.y +
                    (r.fact.y.adjoint() * r.fact.x)) / 2.0;
    double dev_identity = (p.a - p.b - recon).cwiseAbs().maxCoeff();
    double dev_symbol = (p.a - p.b - a).cwiseAbs().maxCoeff();
    values["cb_norm"] = value_entry(r.value, r.certificate);
    values["eps"] = value_entry(eps, "exact");
    values["mb_cb_norm"] = value_entry(p.max_half_diff_sq, "exact");
    values["polarization_identity_dev"] = value_entry(dev_identity, "exact");
    values["symbol_reconstruction_dev"] = value_entry(dev_symbol, "exact");
    asserts.add("polarization_identity", dev_identity <= 1e-10, dev_identity, 1e-10, 0.0);
    asserts.add("perturbation_bound", p.max_half_diff_sq <= eps + 1e-9,
                p.max_half_diff_sq, eps, 1e-9);
    double dmin = p.diag_correction.minCoeff(), dmax = p.diag_correction.maxCoeff();
    asserts.add("diag_correction_range", dmin >= -1e-9 && dmax <= eps + 1e-9, dmin,
                dmax, 1e-9);
    asserts.add("symbol_reconstruction", dev_symbol <= 1e-7, dev_symbol, 1e-7, 0.0);
}

}  // namespace

RunOutcome run_task(const json& config, const RunOptions& opts) {
    if (!config.is_object()) throw ConfigError("config must be a JSON object");
    if (!config.contains("task")) throw ConfigError("task is missing");
    std::string task = config["task"].get<std::string>();
    std::uint64_t seed = opts.seed_override
                             ? *opts.seed_override
                             : config.value("seed", std::uint64_t{0});
    double tol = opts.tol_override ? *opts.tol_override : config.value("tol", 1e-6);

    auto t0 = std::chrono::steady_clock::now();
    json values = json::object();
    Assertions asserts;

    if (task == "verify-kd")
        task_verify_kd(config, seed, tol, values, asserts);
    else if (task == "enclose-norm")
        task_enclose_norm(config, seed, tol, values, asserts);
    else if (task == "projection-bounds")
        task_projection_bounds(config, seed, tol, values, asserts);
    else if (task == "poisson")
        task_poisson(config, seed, tol, values, asserts);
    else if (task == "haagerup")
        task_haagerup(config, seed, tol, values, asserts);
    else if (task == "leinert")
        task_leinert(config, seed, tol, values, asserts);
    else if (task == "cbnorm")
        task_cbnorm(config, seed, tol, values, asserts);
    else if (task == "polarize")
        task_polarize(config, seed, tol, values, asserts);
    else
        throw ConfigError("unknown task '" + task + "'");

    RunOutcome out;
    out.report = json{{"task", task},
                      {"version", kToolVersion},
                      {"seed", seed},
                      {"values", values},
                      {"assertions", asserts.list},
                      {"pass", asserts.all}};
    if (opts.with_timing) {
        auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - t0).count();
        out.report["timing_ms"] = ms;
    }
    out.pass = asserts.all;
    return out;
}

int run_to_stream(const std::string& config_text, const RunOptions& opts,
                  std::string& out_report, std::string& out_error) {
    json config;
    try {
        config = json::parse(config_text);
    } catch (const std::exception& e) {
        out_error = std::string("ConfigError: invalid JSON: ") + e.what();
        return 2;
    }
    try {
        RunOutcome out = run_task(config, opts);
        out_report = out.report.dump(2) + "\n";
        return out.pass ? 0 : 1;
    } catch (const ConfigError& e) {
        out_error = e.what();
        return 2;
    } catch (const Error& e) {
        out_error = std::string("TaskError: ") + e.what();
        return 2;
    }
}

}  // namespace freeprod
