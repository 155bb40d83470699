// SPDX-License-Identifier: Apache-2.0
#include "cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

#include "excursion/approximations.hpp"
#include "excursion/error.hpp"
#include "excursion/lk_curvatures.hpp"
#include "excursion/mc_validation.hpp"
#include "excursion/pickands.hpp"

#ifndef EXCURSION_VERSION
#define EXCURSION_VERSION "unknown"
#endif

namespace excursion::cli {
namespace {

using json = nlohmann::ordered_json;

const std::vector<double> kDefaultUGrid{2.0, 2.5, 3.0, 3.5};
constexpr int kDefaultResolution = 40;
constexpr std::size_t kDefaultMcReps = 20000;

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::uint64_t draw_seed() {
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

// ---------------------------------------------------------------------------
// Flags

struct Flags {
    std::string subcommand;
    std::optional<std::string> config;
    std::optional<std::string> output;
    std::optional<std::string> format;
    std::optional<unsigned> threads;
    std::optional<std::uint64_t> seed;
    std::vector<double> u;
    std::optional<std::string> manifold;
    std::vector<double> periods;
    std::optional<int> dim;
    std::optional<double> radius;
    std::optional<std::string> shape;
    std::vector<double> sides;
    std::optional<std::string> family;
    std::optional<double> length_scale;
    std::vector<double> coefficients;
    std::optional<double> c;
    std::optional<double> alpha;
    std::optional<std::string> method;
    std::optional<int> resolution;
    std::optional<std::size_t> reps;
    std::optional<double> h_value;
    std::optional<double> cube_side;
    std::optional<double> spacing;
    std::optional<int> pickands_dim;
    std::optional<std::string> estimator;
};

void add_common(CLI::App* sub, Flags& f) {
    sub->add_option("--config", f.config, "JSON config or run manifest");
    sub->add_option("--output,-o", f.output, "Result path, '-' for standard output");
    sub->add_option("--format", f.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--threads", f.threads, "Worker cap (default: $EXCURSION_THREADS or all cores)");
}

void add_domain(CLI::App* sub, Flags& f) {
    sub->add_option("--manifold", f.manifold, "euclidean | flat_torus | sphere");
    sub->add_option("--periods", f.periods, "Torus periods")->delimiter(',');
    sub->add_option("--dim", f.dim, "Manifold dimension");
    sub->add_option("--radius", f.radius, "Ball or sphere radius");
    sub->add_option("--shape", f.shape, "rectangle | ball | full_sphere | full_torus | great_circle");
    sub->add_option("--sides", f.sides, "Rectangle sides")->delimiter(',');
}

void add_model(CLI::App* sub, Flags& f) {
    sub->add_option("--family", f.family,
                    "squared_exponential | sphere_schoenberg | powered_exponential | stable_on_chart | local");
    sub->add_option("--length-scale", f.length_scale, "Squared-exponential length scale");
    sub->add_option("--coefficients", f.coefficients, "Schoenberg coefficients")->delimiter(',');
    sub->add_option("--c", f.c, "Local scale c");
    sub->add_option("--alpha", f.alpha, "Local index alpha");
    sub->add_option("--u", f.u, "Threshold levels")->delimiter(',');
}

void add_pickands(CLI::App* sub, Flags& f) {
    sub->add_option("--H", f.h_value, "Pickands constant (skips estimation)");
    sub->add_option("--K", f.cube_side, "Pickands cube side");
    sub->add_option("--spacing", f.spacing, "Pickands lattice spacing");
    sub->add_option("--estimator", f.estimator, "sup_normalized | defining_limit");
}

// ---------------------------------------------------------------------------
// Config access with dotted field names in errors

const json* find(const json& root, const std::string& section, const std::string& key) {
    if (!root.contains(section) || !root[section].is_object()) return nullptr;
    const json& s = root[section];
    return s.contains(key) && !s[key].is_null() ? &s[key] : nullptr;
}

double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) throw ValidationError("expected a number", path);
    return v.get<double>();
}

std::optional<double> opt_number(const json& root, const std::string& section, const std::string& key) {
    const json* v = find(root, section, key);
    if (!v) return std::nullopt;
    return as_number(*v, section + "." + key);
}

double req_number(const json& root, const std::string& section, const std::string& key) {
    const auto v = opt_number(root, section, key);
    if (!v) throw ValidationError("required", section + "." + key);
    return *v;
}

std::optional<std::int64_t> opt_integer(const json& root, const std::string& section, const std::string& key) {
    const json* v = find(root, section, key);
    if (!v) return std::nullopt;
    if (!v->is_number_integer()) throw ValidationError("expected an integer", section + "." + key);
    return v->get<std::int64_t>();
}

std::optional<std::uint64_t> opt_seed(const json& root, const std::string& section) {
    const json* v = find(root, section, "seed");
    if (!v) return std::nullopt;
    if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<std::int64_t>() >= 0)) {
        throw ValidationError("expected a non-negative integer", section + ".seed");
    }
    return v->get<std::uint64_t>();
}

std::optional<std::string> opt_string(const json& root, const std::string& section, const std::string& key) {
    const json* v = find(root, section, key);
    if (!v) return std::nullopt;
    if (!v->is_string()) throw ValidationError("expected a string", section + "." + key);
    return v->get<std::string>();
}

std::vector<double> number_list(const json& v, const std::string& path) {
    std::vector<double> out;
    if (v.is_number()) return {v.get<double>()};
    if (!v.is_array()) throw ValidationError("expected a list of numbers", path);
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_number(v[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

std::optional<std::vector<double>> opt_list(const json& root, const std::string& section, const std::string& key) {
    const json* v = find(root, section, key);
    if (!v) return std::nullopt;
    return number_list(*v, section + "." + key);
}

int positive_int(std::int64_t v, const std::string& path) {
    if (v < 1 || v > 1'000'000'000) throw ValidationError("must be a positive integer", path);
    return static_cast<int>(v);
}

// ---------------------------------------------------------------------------
// Loading and flag overrides

json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read '" + path + "'", "config");
    json cfg;
    try {
        cfg = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("invalid JSON: ") + e.what(), "config");
    }
    if (!cfg.is_object()) throw ValidationError("top level must be an object", "config");
    // A run manifest carries the resolved config under "config".
    if (cfg.contains("config") && cfg["config"].is_object()) cfg = cfg["config"];
    return cfg;
}

void apply_flags(json& cfg, const Flags& f) {
    auto set = [&](const char* section, const char* key, const json& v) {
        if (!cfg.contains(section) || !cfg[section].is_object()) cfg[section] = json::object();
        cfg[section][key] = v;
    };
    const bool constant_only = f.subcommand == "pickands-const";
    if (f.output) set("output", "path", *f.output);
    if (f.format) set("output", "format", *f.format);
    if (f.threads) cfg["threads"] = *f.threads;
    if (!f.u.empty()) cfg["u"] = f.u;
    if (f.manifold) set("manifold", "kind", *f.manifold);
    if (!f.periods.empty()) set("manifold", "periods", f.periods);
    if (f.dim) set("manifold", "dim", *f.dim);
    if (f.radius) set("domain", "radius", *f.radius);
    if (f.shape) set("domain", "shape", *f.shape);
    if (!f.sides.empty()) set("domain", "sides", f.sides);
    if (f.family) set("model", "family", *f.family);
    if (f.length_scale) set("model", "length_scale", *f.length_scale);
    if (!f.coefficients.empty()) set("model", "coefficients", f.coefficients);
    if (f.c) set("model", "c", *f.c);
    if (f.alpha) set(constant_only ? "pickands" : "model", "alpha", *f.alpha);
    if (f.method) cfg["method"] = *f.method;
    if (f.resolution) set("mc", "resolution", *f.resolution);
    if (f.reps) set(f.subcommand == "validate" ? "mc" : "pickands", "reps", *f.reps);
    if (f.seed) set(f.subcommand == "validate" ? "mc" : "pickands", "seed", *f.seed);
    if (f.h_value) set("pickands", "H", *f.h_value);
    if (f.cube_side) set("pickands", "K", *f.cube_side);
    if (f.spacing) set("pickands", "spacing", *f.spacing);
    if (f.pickands_dim) set("pickands", "N", *f.pickands_dim);
    if (f.estimator) set("pickands", "estimator", *f.estimator);
}

// ---------------------------------------------------------------------------
// Resolution: every section is parsed, validated and written back in
// canonical form before any computation starts.

struct Resolved {
    json config = json::object();
    std::optional<Domain> domain;
    std::optional<SmoothIsotropicModel> smooth;
    std::optional<LocallyIsotropicModel> local;
    std::vector<double> u;
    ApproxMethod method = ApproxMethod::kEec;
    std::optional<double> user_h;
    std::optional<PickandsOptions> pickands;  // set when an estimate is needed
    int resolution = 0;
    std::size_t mc_reps = 0;
    std::uint64_t mc_seed = 0;
    unsigned threads = 0;
    std::string output_path = "-";
    bool json_output = false;
    std::optional<std::uint64_t> seed;  // the seed that drives this run
};

json resolve_domain(const json& cfg, Resolved& r) {
    const auto shape = opt_string(cfg, "domain", "shape");
    if (!shape) throw ValidationError("required", "domain.shape");
    json d = {{"shape", *shape}};
    json m = json::object();
    auto kind = opt_string(cfg, "manifold", "kind");
    const auto dim = opt_integer(cfg, "manifold", "dim");
    const auto domain_dim = opt_integer(cfg, "domain", "dim");
    auto periods = opt_list(cfg, "manifold", "periods");
    if (!periods) periods = opt_list(cfg, "domain", "periods");
    auto manifold_radius = opt_number(cfg, "manifold", "radius");
    auto domain_radius = opt_number(cfg, "domain", "radius");

    Shape s;
    if (*shape == "rectangle") {
        const auto sides = opt_list(cfg, "domain", "sides");
        if (!sides) throw ValidationError("required", "domain.sides");
        s = Rectangle{*sides};
        d["sides"] = *sides;
        if (!kind) kind = periods ? "flat_torus" : "euclidean";
        if (!dim && !periods) m["dim"] = static_cast<int>(sides->size());
    } else if (*shape == "ball") {
        if (!domain_radius) throw ValidationError("required", "domain.radius");
        s = Ball{*domain_radius};
        d["radius"] = *domain_radius;
        if (!kind) kind = "euclidean";
        if (!dim) m["dim"] = domain_dim ? positive_int(*domain_dim, "domain.dim") : 2;
    } else if (*shape == "full_torus") {
        s = FullTorus{};
        if (!kind) kind = "flat_torus";
    } else if (*shape == "full_sphere" || *shape == "great_circle") {
        if (!domain_radius) domain_radius = manifold_radius;
        if (!domain_radius) throw ValidationError("required for a sphere domain", "domain.radius");
        if (!manifold_radius) manifold_radius = domain_radius;
        d["radius"] = *domain_radius;
        if (*shape == "full_sphere") {
            s = FullSphere{*domain_radius};
        } else {
            s = GreatCircle{*domain_radius};
        }
        if (!kind) kind = "sphere";
        if (!dim) m["dim"] = *shape == "great_circle" ? 2 : (domain_dim ? positive_int(*domain_dim, "domain.dim") : 2);
    } else {
        throw ValidationError("unknown shape '" + *shape + "'", "domain.shape");
    }
    if (dim) m["dim"] = positive_int(*dim, "manifold.dim");

    std::optional<Manifold> manifold;
    if (*kind == "euclidean") {
        if (!m.contains("dim")) throw ValidationError("required", "manifold.dim");
        manifold = Manifold::euclidean(m["dim"].get<int>());
        m = {{"kind", *kind}, {"dim", manifold->dim()}};
    } else if (*kind == "flat_torus") {
        if (!periods) throw ValidationError("required for a torus", "manifold.periods");
        manifold = Manifold::flat_torus(*periods);
        m = {{"kind", *kind}, {"periods", *periods}};
    } else if (*kind == "sphere") {
        if (!manifold_radius) throw ValidationError("required for a sphere", "domain.radius");
        const int n = m.contains("dim") ? m["dim"].get<int>() : 2;
        manifold = Manifold::sphere(n, *manifold_radius);
        m = {{"kind", *kind}, {"dim", n}, {"radius", *manifold_radius}};
    } else {
        throw ValidationError("unknown manifold '" + *kind + "'", "manifold.kind");
    }
    r.domain.emplace(*manifold, s);
    r.config["manifold"] = m;
    return d;
}

void resolve_model(const json& cfg, Resolved& r) {
    const auto family = opt_string(cfg, "model", "family");
    if (!family) throw ValidationError("required", "model.family");
    const Manifold& m = r.domain->manifold();
    json out = {{"family", *family}};
    if (*family == "squared_exponential") {
        const double l = req_number(cfg, "model", "length_scale");
        r.smooth.emplace(m, SquaredExponential{l});
        out["length_scale"] = l;
    } else if (*family == "sphere_schoenberg") {
        const auto b = opt_list(cfg, "model", "coefficients");
        if (!b) throw ValidationError("required", "model.coefficients");
        r.smooth.emplace(m, SphereSchoenberg{*b});
        out["coefficients"] = *b;
    } else if (*family == "powered_exponential" || *family == "stable_on_chart" || *family == "local") {
        const double c = req_number(cfg, "model", "c");
        const double alpha = req_number(cfg, "model", "alpha");
        LocalFamily fam;
        if (*family == "powered_exponential") fam = PoweredExponential{};
        if (*family == "stable_on_chart") fam = StableOnChart{};
        r.local.emplace(m, c, alpha, fam);
        out["c"] = c;
        out["alpha"] = alpha;
    } else {
        throw ValidationError("unknown family '" + *family + "'", "model.family");
    }
    r.config["model"] = out;
}

void resolve_u(const json& cfg, Resolved& r) {
    r.u = cfg.contains("u") ? number_list(cfg["u"], "u") : kDefaultUGrid;
    for (double u : r.u) {
        if (!std::isfinite(u)) throw ValidationError("levels must be finite", "u");
    }
    r.config["u"] = r.u;
}

void resolve_pickands_block(const json& cfg, Resolved& r, double alpha, int dim, bool force_estimate) {
    json p = json::object();
    r.user_h = force_estimate ? std::nullopt : opt_number(cfg, "pickands", "H");
    if (r.user_h) {
        if (!(*r.user_h > 0.0) || !std::isfinite(*r.user_h)) {
            throw ValidationError("must be finite and > 0", "pickands.H");
        }
        p["H"] = *r.user_h;
    } else if (force_estimate || alpha != 2.0) {
        PickandsOptions o = default_pickands_options(alpha, dim);
        if (auto v = opt_number(cfg, "pickands", "K")) o.cube_side = *v;
        if (auto v = opt_number(cfg, "pickands", "spacing")) o.spacing = *v;
        if (auto v = opt_integer(cfg, "pickands", "reps")) o.reps = static_cast<std::size_t>(positive_int(*v, "pickands.reps"));
        if (auto v = opt_string(cfg, "pickands", "estimator")) o.estimator = pickands_estimator_from_string(*v);
        o.seed = opt_seed(cfg, "pickands").value_or(draw_seed());
        o.threads = r.threads;
        if (!(o.cube_side >= 1.0)) throw ValidationError("cube side K must be >= 1", "pickands.K");
        if (!(o.spacing > 0.0 && o.spacing <= 0.25)) throw ValidationError("must lie in (0, 0.25]", "pickands.spacing");
        if (o.reps < 1000) throw ValidationError("at least 1000 replications are required", "pickands.reps");
        if (!(alpha > 0.0 && alpha <= 2.0)) throw ValidationError("must lie in (0, 2]", "pickands.alpha");
        p["alpha"] = alpha;
        p["N"] = dim;
        p["K"] = o.cube_side;
        p["spacing"] = o.spacing;
        p["reps"] = o.reps;
        p["seed"] = o.seed;
        p["estimator"] = to_string(o.estimator);
        r.pickands = o;
        r.seed = o.seed;
    }
    r.config["pickands"] = p;
}

void resolve_common(const json& cfg, Resolved& r) {
    if (cfg.contains("threads") && !cfg["threads"].is_null()) {
        const json& t = cfg["threads"];
        if (!t.is_number_integer() || t.get<std::int64_t>() < 0) {
            throw ValidationError("expected a non-negative integer", "threads");
        }
        r.threads = t.get<unsigned>();
    }
    r.output_path = opt_string(cfg, "output", "path").value_or("-");
    const std::string format = opt_string(cfg, "output", "format").value_or("csv");
    if (format != "csv" && format != "json") throw ValidationError("expected csv or json", "output.format");
    r.json_output = format == "json";
    r.config["output"] = {{"path", r.output_path}, {"format", format}};
    r.config["threads"] = r.threads;
}

ApproxMethod parse_method(const std::string& s) {
    if (s == "eec") return ApproxMethod::kEec;
    if (s == "pickands") return ApproxMethod::kPickands;
    throw ValidationError("expected eec or pickands", "method");
}

Resolved resolve(const json& cfg, const std::string& subcommand) {
    Resolved r;
    r.config["subcommand"] = subcommand;
    resolve_common(cfg, r);

    if (subcommand == "pickands-const") {
        const double alpha = req_number(cfg, "pickands", "alpha");
        const auto n = opt_integer(cfg, "pickands", "N");
        if (!n) throw ValidationError("required", "pickands.N");
        resolve_pickands_block(cfg, r, alpha, positive_int(*n, "pickands.N"), true);
        return r;
    }

    r.config["domain"] = resolve_domain(cfg, r);
    if (subcommand == "lk") return r;

    resolve_model(cfg, r);
    resolve_u(cfg, r);

    if (subcommand == "eec") {
        r.method = ApproxMethod::kEec;
    } else if (subcommand == "pickands") {
        r.method = ApproxMethod::kPickands;
    } else {
        const auto m = cfg.contains("method") && !cfg["method"].is_null()
                           ? std::optional<std::string>(cfg["method"].is_string() ? cfg["method"].get<std::string>()
                                                                                   : std::string("?"))
                           : std::nullopt;
        r.method = m ? parse_method(*m) : (r.smooth ? ApproxMethod::kEec : ApproxMethod::kPickands);
    }
    r.config["method"] = to_string(r.method);

    if (r.method == ApproxMethod::kEec) {
        if (!r.smooth) throw ValidationError("the EEC approximation needs a smooth isotropic family", "model.family");
    } else {
        if (r.smooth) r.local = LocallyIsotropicModel::from_smooth(*r.smooth);
        for (double u : r.u) {
            if (!(u > 0.0)) throw ValidationError("the Pickands approximation requires u > 0", "u");
        }
        resolve_pickands_block(cfg, r, r.local->alpha(), r.domain->dim(), false);
    }

    if (subcommand == "validate") {
        json mc = json::object();
        const auto res = opt_integer(cfg, "mc", "resolution");
        r.resolution = res ? positive_int(*res, "mc.resolution") : kDefaultResolution;
        const auto reps = opt_integer(cfg, "mc", "reps");
        r.mc_reps = reps ? static_cast<std::size_t>(positive_int(*reps, "mc.reps")) : kDefaultMcReps;
        r.mc_seed = opt_seed(cfg, "mc").value_or(draw_seed());
        if (r.local && !r.smooth && !r.local->has_family()) {
            throw ValidationError("simulation needs a covariance family", "model.family");
        }
        // Fails early on oversized grids.
        (void)build_grid(*r.domain, r.resolution);
        r.config["mc"] = {{"resolution", r.resolution}, {"reps", r.mc_reps}, {"seed", r.mc_seed}};
        r.seed = r.mc_seed;
    }
    return r;
}

// ---------------------------------------------------------------------------
// Computation and serialization

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    json rows_json = json::array();
    json extra = json::object();
};

std::string render_csv(const Table& t) {
    std::ostringstream os;
    for (std::size_t i = 0; i < t.header.size(); ++i) os << (i ? "," : "") << t.header[i];
    os << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
        os << '\n';
    }
    return os.str();
}

json number_or_null(std::optional<double> v) { return v ? json(*v) : json(nullptr); }

PickandsConstant resolve_h(const Resolved& r) {
    if (r.user_h) return {*r.user_h, ConstantProvenance::kUser, 0.0};
    if (r.pickands) {
        const PickandsEstimate e = estimate_pickands(*r.pickands);
        return {e.estimate, ConstantProvenance::kMonteCarlo, e.standard_error};
    }
    return exact_pickands_constant_alpha2(r.domain->dim());
}

std::vector<ApproxResult> analytic_results(const Resolved& r) {
    std::vector<ApproxResult> out;
    if (r.method == ApproxMethod::kEec) {
        for (double u : r.u) out.push_back(eec_approx(*r.smooth, *r.domain, u));
        return out;
    }
    const PickandsConstant h = resolve_h(r);
    const bool full = r.domain->dim() == r.domain->manifold().dim();
    for (double u : r.u) {
        out.push_back(full ? pickands_approx(*r.local, *r.domain, u, h)
                           : pickands_approx_submanifold(*r.local, *r.domain, u, h));
    }
    return out;
}

Table approx_table(const std::vector<ApproxResult>& results) {
    Table t;
    std::size_t terms = 0;
    for (const auto& a : results) terms = std::max(terms, a.terms.size());
    t.header = {"method", "u", "total"};
    for (std::size_t j = 0; j < terms; ++j) t.header.push_back("term_" + std::to_string(j));
    t.header.insert(t.header.end(), {"H_value", "H_provenance"});
    for (const auto& a : results) {
        const bool has_h = a.pickands_constant.provenance != ConstantProvenance::kNone;
        std::vector<std::string> row{to_string(a.method), fmt(a.u), fmt(a.total)};
        for (std::size_t j = 0; j < terms; ++j) row.push_back(j < a.terms.size() ? fmt(a.terms[j]) : "");
        row.push_back(has_h ? fmt(a.pickands_constant.value) : "");
        row.push_back(to_string(a.pickands_constant.provenance));
        t.rows.push_back(std::move(row));
        json j = {{"method", to_string(a.method)}, {"u", a.u}, {"total", a.total}, {"terms", a.terms},
                  {"H_value", has_h ? json(a.pickands_constant.value) : json(nullptr)},
                  {"H_provenance", to_string(a.pickands_constant.provenance)},
                  {"H_stderr", has_h ? json(a.pickands_constant.standard_error) : json(nullptr)},
                  {"model", a.model}, {"domain", a.domain}, {"notes", a.notes}};
        t.rows_json.push_back(std::move(j));
    }
    return t;
}

Table validate_table(const Resolved& r) {
    const std::vector<ApproxResult> analytic = analytic_results(r);
    const std::vector<McEstimate> empirical =
        r.smooth ? empirical_excursion(*r.smooth, *r.domain, r.u, r.resolution, r.mc_reps, r.mc_seed, r.threads)
                 : empirical_excursion(*r.local, *r.domain, r.u, r.resolution, r.mc_reps, r.mc_seed, r.threads);
    const std::vector<ComparisonRow> rows = compare_report(analytic, empirical);
    Table t;
    t.header = {"u", "analytic_total", "p_hat", "ci_low", "ci_high", "ratio", "within_ci", "resolution", "reps", "seed"};
    for (const auto& c : rows) {
        t.rows.push_back({fmt(c.u), fmt(c.analytic_total), fmt(c.p_hat), fmt(c.ci_low), fmt(c.ci_high),
                          c.ratio ? fmt(*c.ratio) : "", c.within_ci ? "true" : "false",
                          std::to_string(c.resolution), std::to_string(c.reps), std::to_string(c.seed)});
        t.rows_json.push_back({{"u", c.u},
                               {"analytic_total", c.analytic_total},
                               {"p_hat", c.p_hat},
                               {"ci_low", c.ci_low},
                               {"ci_high", c.ci_high},
                               {"ratio", number_or_null(c.ratio)},
                               {"within_ci", c.within_ci},
                               {"resolution", c.resolution},
                               {"reps", c.reps},
                               {"seed", c.seed},
                               {"p_hat_half_resolution", number_or_null(c.p_hat_coarse)}});
    }
    if (!analytic.empty()) {
        const ApproxResult& a = analytic.front();
        t.extra = {{"method", to_string(a.method)}, {"model", a.model}, {"domain", a.domain}, {"notes", a.notes}};
        if (a.pickands_constant.provenance != ConstantProvenance::kNone) {
            t.extra["H_value"] = a.pickands_constant.value;
            t.extra["H_provenance"] = to_string(a.pickands_constant.provenance);
            t.extra["H_stderr"] = a.pickands_constant.standard_error;
        }
        if (!empirical.empty()) {
            t.extra["grid_size"] = empirical.front().grid_size;
            const Grid g = build_grid(*r.domain, r.resolution);
            t.extra["half_resolution"] = g.coarse_count ? json(g.coarse_resolution) : json(nullptr);
        }
    }
    return t;
}

Table pickands_const_table(const Resolved& r) {
    const PickandsEstimate e = estimate_pickands(*r.pickands);
    Table t;
    t.header = {"alpha", "N", "K", "spacing", "reps", "seed", "estimate", "stderr"};
    t.rows.push_back({fmt(e.alpha), std::to_string(e.dim), fmt(e.cube_side), fmt(e.spacing), std::to_string(e.reps),
                      std::to_string(e.seed), fmt(e.estimate), fmt(e.standard_error)});
    t.rows_json.push_back({{"alpha", e.alpha},
                           {"N", e.dim},
                           {"K", e.cube_side},
                           {"spacing", e.spacing},
                           {"reps", e.reps},
                           {"seed", e.seed},
                           {"estimate", e.estimate},
                           {"stderr", e.standard_error},
                           {"estimator", to_string(e.estimator)},
                           {"lattice_size", e.lattice_size},
                           {"jitter", e.jitter}});
    return t;
}

Table lk_table(const Resolved& r) {
    const LkVector lk = lk_curvatures(*r.domain);
    Table t;
    t.header = {"j", "L_j"};
    for (std::size_t j = 0; j < lk.values.size(); ++j) {
        t.rows.push_back({std::to_string(j), fmt(lk.values[j])});
        t.rows_json.push_back({{"j", j}, {"L_j", lk.values[j]}});
    }
    t.extra = {{"domain", r.domain->describe()}};
    return t;
}

std::string render(const Table& t, const Resolved& r) {
    if (!r.json_output) return render_csv(t);
    json doc = {{"subcommand", r.config["subcommand"]}};
    for (const auto& [k, v] : t.extra.items()) doc[k] = v;
    doc["rows"] = t.rows_json;
    return doc.dump(2) + "\n";
}

json versions() {
    return {{"excursion", EXCURSION_VERSION},
            {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                          std::to_string(EIGEN_MINOR_VERSION)},
            {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                  std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                  std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
            {"cli11", CLI11_VERSION},
            {"compiler", __VERSION__}};
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw ValidationError("cannot write '" + path + "'", "output.path");
    f << content;
    if (!f) throw ValidationError("write failed for '" + path + "'", "output.path");
}

int execute(const Flags& flags, std::ostream& out, std::ostream& err) {
    const auto start = std::chrono::steady_clock::now();
    json cfg = flags.config ? load_config(*flags.config) : json::object();
    apply_flags(cfg, flags);
    const Resolved r = resolve(cfg, flags.subcommand);

    Table table;
    if (flags.subcommand == "lk") {
        table = lk_table(r);
    } else if (flags.subcommand == "pickands-const") {
        table = pickands_const_table(r);
    } else if (flags.subcommand == "validate") {
        table = validate_table(r);
    } else {
        table = approx_table(analytic_results(r));
    }
    const std::string content = render(table, r);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    if (r.output_path == "-") {
        out << content;
        out.flush();
        return kExitOk;
    }
    const std::string manifest_path = r.output_path + ".manifest.json";
    if (std::filesystem::exists(std::filesystem::path(r.output_path).parent_path().empty()
                                    ? std::filesystem::path(".")
                                    : std::filesystem::path(r.output_path).parent_path())) {
        const json manifest = {{"config", r.config},
                               {"seed", r.seed ? json(*r.seed) : json(nullptr)},
                               {"versions", versions()},
                               {"wall_time_seconds", wall}};
        write_file(r.output_path, content);
        write_file(manifest_path, manifest.dump(2) + "\n");
    } else {
        throw ValidationError("directory of '" + r.output_path + "' does not exist", "output.path");
    }
    err << "excursion " << flags.subcommand << ": wrote " << r.output_path << " (" << fmt(wall) << " s)\n";
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Excursion-probability approximations for Gaussian fields on manifolds", "excursion"};
    app.require_subcommand(1);
    Flags flags;

    auto* eec = app.add_subcommand("eec", "Expected Euler characteristic approximation");
    auto* pick = app.add_subcommand("pickands", "Pickands-type approximation");
    auto* pconst = app.add_subcommand("pickands-const", "Monte Carlo estimate of Pickands' constant");
    auto* validate = app.add_subcommand("validate", "Analytic approximation against brute-force simulation");
    auto* lk = app.add_subcommand("lk", "Lipschitz-Killing curvatures of a domain");

    for (auto* sub : {eec, pick, pconst, validate, lk}) {
        add_common(sub, flags);
        if (sub != pconst) add_domain(sub, flags);
    }
    for (auto* sub : {eec, pick, validate}) add_model(sub, flags);
    for (auto* sub : {pick, validate}) {
        add_pickands(sub, flags);
        sub->add_option("--seed", flags.seed, "Random seed");
    }
    validate->add_option("--method", flags.method, "eec | pickands");
    validate->add_option("--resolution", flags.resolution, "Grid resolution");
    validate->add_option("--reps", flags.reps, "Monte Carlo replications");
    pick->add_option("--reps", flags.reps, "Replications for a Pickands constant estimate");
    add_pickands(pconst, flags);
    pconst->add_option("--alpha", flags.alpha, "Index alpha in (0, 2]");
    pconst->add_option("--N", flags.pickands_dim, "Dimension N");
    pconst->add_option("--reps", flags.reps, "Replications");
    pconst->add_option("--seed", flags.seed, "Random seed");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    for (auto* sub : app.get_subcommands()) flags.subcommand = sub->get_name();

    try {
        return execute(flags, out, err);
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const ValidationError& e) {
        err << "invalid input: " << e.what() << "\n";
        return kExitValidation;
    } catch (const json::exception& e) {
        err << "invalid input: config: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
}

}  // namespace excursion::cli
