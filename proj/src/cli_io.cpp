#include "blowup/cli_io.hpp"

#include "blowup/conditions.hpp"
#include "blowup/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <future>
#include <map>
#include <set>
#include <sstream>

namespace blowup {

using json = nlohmann::ordered_json;

namespace {

// Parameter counts per family tag.
const std::map<std::string, std::size_t> kPhiFamilies{
    {"constant-two", 0}, {"power", 1},           {"unit", 0},           {"p-and-q", 2},
    {"elasticity", 1},   {"elasticity-sqrt", 1}, {"plasticity-log", 1}, {"table", 0}};
const std::map<std::string, std::size_t> kFFamilies{{"power", 1}, {"exponential", 0}, {"table", 0}};
const std::map<std::string, std::size_t> kWeightFamilies{
    {"constant", 1}, {"decay", 2}, {"one-minus-exp", 2}, {"table", 0}};

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + " must be an object");
    for (const auto& [key, value] : obj.items())
        if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
}

double get_number(const json& v, const std::string& where) {
    if (!v.is_number()) throw ConfigError(where + " must be a number");
    double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(where + " must be finite");
    return x;
}

std::uint64_t get_unsigned(const json& v, const std::string& where) {
    if (!v.is_number_unsigned()) throw ConfigError(where + " must be a nonnegative integer");
    return v.get<std::uint64_t>();
}

std::vector<double> get_numbers(const json& v, const std::string& where) {
    if (!v.is_array()) throw ConfigError(where + " must be an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(get_number(v[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

std::string get_string(const json& v, const std::string& where) {
    if (!v.is_string()) throw ConfigError(where + " must be a string");
    return v.get<std::string>();
}

std::filesystem::path table_path(const RunConfig& cfg, const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : cfg.base_dir / path;
}

FamilyBlock parse_family(const json& j, const std::map<std::string, std::size_t>& families, const std::string& where) {
    check_keys(j, {"family", "params", "table"}, where);
    if (!j.contains("family")) throw ConfigError(where + ".family is required");
    FamilyBlock b;
    b.family = get_string(j["family"], where + ".family");
    auto it = families.find(b.family);
    if (it == families.end()) throw ConfigError("unknown family '" + b.family + "' in " + where);
    if (j.contains("params")) b.params = get_numbers(j["params"], where + ".params");
    if (b.params.size() != it->second)
        throw ConfigError(where + " family '" + b.family + "' takes " + std::to_string(it->second) + " parameter(s)");
    if (b.family == "table") {
        if (!j.contains("table")) throw ConfigError(where + ": family 'table' needs a 'table' path");
        b.table = get_string(j["table"], where + ".table");
    } else if (j.contains("table")) {
        throw ConfigError(where + ": 'table' is only valid with family 'table'");
    }
    return b;
}

json family_json(const FamilyBlock& b) {
    json j;
    j["family"] = b.family;
    if (b.family == "table")
        j["table"] = b.table;
    else
        j["params"] = b.params;
    return j;
}

void require_positive(double x, const std::string& name) {
    if (!(x > 0.0)) throw ConfigError(name + " must be positive");
}

void require_increasing(const std::vector<double>& v, const std::string& name) {
    for (std::size_t i = 0; i < v.size(); ++i)
        if (!(v[i] > 0.0) || (i > 0 && !(v[i] > v[i - 1])))
            throw ConfigError(name + " must be positive and strictly increasing");
}

void validate(const RunConfig& cfg) {
    if (cfg.command && std::find(kCommands.begin(), kCommands.end(), *cfg.command) == kCommands.end())
        throw ConfigError("unknown command '" + *cfg.command + "'");
    if (cfg.geometry.N < 1) throw ConfigError("geometry.N must be an integer >= 1");
    require_positive(cfg.geometry.L, "geometry.L");
    require_positive(cfg.geometry.horizon, "geometry.horizon");
    const auto& p = cfg.params;
    require_positive(p.tol, "params.tol");
    require_positive(p.rtol, "params.rtol");
    require_positive(p.alpha, "params.alpha");
    require_positive(p.epsilon, "params.epsilon");
    require_positive(p.r_max, "params.r_max");
    require_positive(p.budget_horizon, "params.budget_horizon");
    if (p.k < 0.0) throw ConfigError("params.k must be nonnegative");
    if (p.samples == 0) throw ConfigError("params.samples must be positive");
    if (p.output_points < 2) throw ConfigError("params.output_points must be at least 2");
    if (p.cutoffs.size() < 2) throw ConfigError("params.cutoffs needs at least two entries");
    require_increasing(p.cutoffs, "params.cutoffs");
    require_increasing(p.k_ladder, "params.k_ladder");
    static const std::set<std::string> components{"lower", "upper", "osc", "ball_lower", "ball_upper"};
    if (!components.count(p.component)) throw ConfigError("unknown params.component '" + p.component + "'");
    if (p.budget != "bar" && p.budget != "tilde") throw ConfigError("params.budget must be 'bar' or 'tilde'");

    const auto& w = cfg.weight;
    if (w.radial && (w.lower || w.upper)) throw ConfigError("weight.radial excludes weight.lower/weight.upper");
    if (!w.radial && !(w.lower && w.upper)) throw ConfigError("weight needs 'radial' or both 'lower' and 'upper'");

    // Tables must exist and parse.
    auto probe = [&](const std::optional<FamilyBlock>& b) {
        if (b && b->family == "table") read_table(table_path(cfg, b->table));
    };
    probe(cfg.phi);
    probe(cfg.f);
    probe(w.radial);
    probe(w.lower);
    probe(w.upper);
    probe(w.ball_lower);
    probe(w.ball_upper);
}

RadialFunction weight_function(const RunConfig& cfg, const FamilyBlock& b, const std::string& where) {
    const auto& q = b.params;
    if (b.family == "table") {
        auto [x, y] = read_table(table_path(cfg, b.table));
        for (double v : y)
            if (!(v >= 0.0)) throw ConfigError(where + " table values must be nonnegative");
        double x0 = x.front(), x1 = x.back(), y0 = y.front(), y1 = y.back();
        MonotoneCubic spline(std::move(x), std::move(y));
        return {[spline, x0, x1, y0, y1](double r) {
                    if (r <= x0) return y0;
                    if (r >= x1) return y1;
                    return spline(r);
                },
                "table(" + b.table + ")"};
    }
    for (double v : q)
        if (!(v >= 0.0)) throw ConfigError(where + " parameters must be nonnegative");
    if (b.family == "constant") {
        double c = q[0];
        return {[c](double) { return c; }, "constant(" + json(c).dump() + ")"};
    }
    if (b.family == "decay") {
        double c = q[0], e = q[1];
        return {[c, e](double r) { return c * std::pow(1.0 + r, -e); },
                "decay(" + json(c).dump() + "," + json(e).dump() + ")"};
    }
    double c = q[0], rate = q[1];
    return {[c, rate](double r) { return -c * std::expm1(-rate * r); },
            "one-minus-exp(" + json(c).dump() + "," + json(rate).dump() + ")"};
}

json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json nums(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(num(x));
    return a;
}

template <class T>
json opt(const std::optional<T>& v) {
    return v ? num(*v) : json(nullptr);
}

json report_json(const ConditionReport& r) {
    json j;
    j["id"] = to_string(r.id);
    j["verdict"] = to_string(r.verdict);
    j["confidence"] = to_string(r.confidence);
    j["analytic_verdict"] = r.analytic_verdict ? json(to_string(*r.analytic_verdict)) : json(nullptr);
    j["fitted_verdict"] = to_string(r.fitted_verdict);
    j["cutoffs"] = nums(r.cutoffs);
    j["partial_values"] = nums(r.partial_values);
    j["fitted_tail_exponent"] = opt(r.fitted_tail_exponent);
    j["fit_residual"] = opt(r.fit_residual);
    j["local_tail_slope"] = opt(r.local_tail_slope);
    if (r.witness)
        j["witness"] = {{"s", num(r.witness->s)}, {"t", num(r.witness->t)}, {"violation", num(r.witness->violation)}};
    else
        j["witness"] = nullptr;
    j["estimate"] = num(r.estimate);
    j["note"] = r.note;
    return j;
}

json profile_meta(const RadialProfile& p, const std::string& csv) {
    json j;
    j["csv"] = csv;
    j["source"] = p.source;
    j["status"] = to_string(p.status);
    j["N"] = p.N;
    j["alpha"] = num(p.alpha);
    j["R"] = num(p.R);
    j["bracket"] = p.bracket ? nums({p.bracket->first, p.bracket->second}) : json(nullptr);
    j["points"] = p.r.size();
    j["phi"] = p.phi_label;
    j["f"] = p.f_label;
    j["rho"] = p.rho_label;
    return j;
}

json indices_json(const Indices& idx) {
    return {{"l", num(idx.l)}, {"m", num(idx.m)}, {"l1", num(idx.l1)}, {"m1", num(idx.m1)}, {"exact", idx.exact}};
}

class ArtifactWriter {
public:
    explicit ArtifactWriter(std::filesystem::path dir) : dir_(std::move(dir)) {
        std::error_code ec;
        std::filesystem::create_directories(dir_, ec);
        if (ec) throw ConfigError("cannot create output directory " + dir_.string() + ": " + ec.message());
    }

    void text(const std::string& name, const std::string& content) const {
        std::ofstream out(dir_ / name, std::ios::binary | std::ios::trunc);
        out << content;
        if (!out) throw Error("cannot write " + (dir_ / name).string());
    }

    json profile(const std::string& stem, const RadialProfile& p) const {
        text(stem + ".csv", profile_csv(p));
        return profile_meta(p, stem + ".csv");
    }

private:
    std::filesystem::path dir_;
};

ClassifierControls classifier(const RunConfig& cfg) {
    ClassifierControls c;
    c.cutoffs = cfg.params.cutoffs;
    return c;
}

SolverControls solver(const RunConfig& cfg) {
    SolverControls c;
    c.rtol = cfg.params.rtol;
    c.output_points = cfg.params.output_points;
    return c;
}

BallControls ball(const RunConfig& cfg) {
    BallControls c;
    c.tol = cfg.params.tol;
    c.solver = solver(cfg);
    return c;
}

WeightComponent component(const std::string& name) {
    if (name == "lower") return WeightComponent::Lower;
    if (name == "upper") return WeightComponent::Upper;
    if (name == "osc") return WeightComponent::Osc;
    if (name == "ball_lower") return WeightComponent::BallLower;
    return WeightComponent::BallUpper;
}

json dispatch(const RunConfig& cfg, const std::string& command, const RunOptions& opts, const ArtifactWriter& w) {
    const int N = cfg.geometry.N;
    const double L = cfg.geometry.L;
    const auto& p = cfg.params;
    json out;

    if (command == "indices") {
        auto phi = build_phi(cfg);
        out["phi"] = phi.label();
        out["indices"] = indices_json(phi.indices());
        return out;
    }
    if (command == "check-ko") {
        out["report"] = report_json(check_KO(build_phi(cfg), build_f(cfg), classifier(cfg)));
        return out;
    }
    if (command == "check-arho") {
        out["component"] = p.component;
        out["report"] = report_json(check_A_rho(build_phi(cfg), build_weight(cfg), component(p.component), N,
                                                classifier(cfg)));
        return out;
    }
    if (command == "budget") {
        auto phi = build_phi(cfg);
        auto f = build_f(cfg);
        auto ws = build_weight(cfg);
        out["budget"] = p.budget;
        out["report"] = report_json(p.budget == "bar"
                                        ? compute_H_bar(phi, f, ws, N, p.budget_horizon, classifier(cfg))
                                        : compute_H_tilde(phi, f, ws, N, p.budget_horizon, classifier(cfg)));
        return out;
    }
    if (command == "subadd") {
        out["samples"] = p.samples;
        out["report"] = report_json(check_h_inv_subadditive(build_phi(cfg), p.samples, cfg.seed));
        return out;
    }
    if (command == "solve-ivp") {
        auto prof = solve_ivp(build_phi(cfg), build_f(cfg), build_rho(cfg), N, p.alpha, p.r_max, solver(cfg));
        out["profile"] = w.profile("solve-ivp", prof);
        return out;
    }
    if (command == "blowup-radius") {
        BlowupControls c;
        c.horizon = cfg.geometry.horizon;
        c.solver = solver(cfg);
        auto b = blowup_radius(build_phi(cfg), build_f(cfg), build_rho(cfg), N, p.alpha, c);
        out["alpha"] = num(b.alpha);
        out["gamma"] = num(b.gamma);
        out["bracket"] = nums({b.bracket.first, b.bracket.second});
        out["crossings"] = nums(b.crossings);
        out["u_max_reached"] = num(b.u_max_reached);
        out["status"] = to_string(b.status);
        out["note"] = b.note;
        return out;
    }
    if (command == "solve-ball") {
        auto prof = solve_ball_dirichlet(build_phi(cfg), build_f(cfg), build_rho(cfg), N, L, p.k, ball(cfg));
        out["k"] = num(p.k);
        out["L"] = num(L);
        out["profile"] = w.profile("solve-ball", prof);
        return out;
    }
    if (command == "verify-bounds") {
        const auto& wb = cfg.weight.radial;
        if (!wb || wb->family != "constant")
            throw ConfigError("verify-bounds needs a constant radial weight");
        auto phi = build_phi(cfg);
        auto f = build_f(cfg);
        double c = wb->params[0];
        auto prof = solve_ball_dirichlet(phi, f, build_rho(cfg), N, L, p.k, ball(cfg));
        auto rep = verify_sandwich(prof, phi, f, c, phi.indices().l1, phi.indices().m1, N);
        out["profile"] = w.profile("verify-bounds", prof);
        out["passed"] = rep.passed;
        out["worst_margin"] = num(rep.worst_margin);
        out["skipped"] = rep.skipped;
        return out;
    }
    if (command == "sweep") {
        if (p.k_ladder.empty()) throw ConfigError("sweep needs params.k_ladder");
        auto s = boundary_sweep_blowup(build_phi(cfg), build_f(cfg), build_rho(cfg), N, L, p.k_ladder, p.r_star,
                                       ball(cfg), opts.threads);
        json members = json::array();
        for (std::size_t i = 0; i < s.profiles.size(); ++i)
            members.push_back(w.profile("sweep-" + std::to_string(i), s.profiles[i]));
        std::string limit = "r,u\n";
        char buf[96];
        for (std::size_t i = 0; i < s.limit_r.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", s.limit_r[i], s.limit_u[i]);
            limit += buf;
        }
        w.text("sweep-limit.csv", limit);
        out["k_values"] = nums(s.k_values);
        out["r_star"] = num(s.r_star);
        out["raw_increments"] = nums(s.raw_increments);
        out["extrapolated_increments"] = nums(s.extrapolated_increments);
        out["limit_csv"] = "sweep-limit.csv";
        out["members"] = members;
        out["ko"] = report_json(s.ko);
        return out;
    }
    if (command == "entire") {
        EntireControls c;
        c.classifier = classifier(cfg);
        c.subadditivity_samples = p.samples;
        c.budget_horizon = p.budget_horizon;
        c.solver = solver(cfg);
        auto cert = entire_sandwich(build_phi(cfg), build_f(cfg), build_weight(cfg), N, p.alpha, p.epsilon,
                                    cfg.geometry.horizon, c);
        out["alpha"] = num(cert.alpha);
        out["beta"] = num(cert.beta);
        out["epsilon"] = num(cert.epsilon);
        out["H_bar"] = num(cert.H_bar);
        out["budget"] = report_json(cert.budget);
        out["ordering_margin"] = num(cert.ordering_margin);
        out["ordered"] = cert.ordered;
        out["estimate_onset"] = opt(cert.estimate_onset);
        out["estimate_holds_eventually"] = cert.estimate_holds_eventually;
        out["minorant_holds"] = cert.minorant_holds;
        out["certified"] = cert.certified;
        out["u_alpha"] = w.profile("entire-u_alpha", cert.u_alpha);
        out["u_beta"] = w.profile("entire-u_beta", cert.u_beta);
        return out;
    }
    if (command == "fd-check") {
        auto phi = build_phi(cfg);
        auto f = build_f(cfg);
        auto rho = build_rho(cfg);
        FdControls fc;
        fc.tol = p.tol;
        auto policy = opts.threads > 1 ? std::launch::async : std::launch::deferred;
        auto shooting = std::async(policy, [&] { return solve_ball_dirichlet(phi, f, rho, N, L, p.k, ball(cfg)); });
        auto fd = fd_solve(phi, f, rho, N, L, p.k, p.M, fc);
        auto shot = shooting.get();
        // Linear interpolation of the fd midpoint at the shooting radii.
        auto mid = fd.profile();
        double dr = fd.r[1] - fd.r[0], gap = 0.0;
        for (std::size_t j = 0; j < shot.r.size(); ++j) {
            std::size_t i = std::min(static_cast<std::size_t>(shot.r[j] / dr), fd.M - 1);
            double t = (shot.r[j] - mid.r[i]) / dr;
            gap = std::max(gap, std::abs((1.0 - t) * mid.u[i] + t * mid.u[i + 1] - shot.u[j]));
        }
        out["M"] = fd.M;
        out["sweeps"] = fd.sweeps;
        out["ladder_gap"] = num(fd.gap);
        out["shooting_gap"] = num(gap);
        out["agree"] = gap < 1e-3;
        out["fd"] = w.profile("fd-check-fd", mid);
        out["shooting"] = w.profile("fd-check-shooting", shot);
        return out;
    }
    throw ConfigError("unknown command '" + command + "'");
}

json error_json(const std::exception& e) {
    json err;
    if (auto* p = dynamic_cast<const PreconditionRejected*>(&e)) {
        err["kind"] = "precondition";
        err["code"] = p->code();
        err["hypothesis"] = p->hypothesis();
    } else if (dynamic_cast<const ConfigError*>(&e)) {
        err["kind"] = "config";
    } else if (dynamic_cast<const DomainError*>(&e)) {
        err["kind"] = "domain";
    } else if (auto* s = dynamic_cast<const StructuralError*>(&e)) {
        err["kind"] = "structural";
        err["interval"] = nums({s->lo(), s->hi()});
    } else if (auto* n = dynamic_cast<const NonConvergence*>(&e)) {
        err["kind"] = "non-convergence";
        err["history"] = nums(n->history());
    } else if (auto* f = dynamic_cast<const NumericFailure*>(&e)) {
        err["kind"] = "numeric";
        err["partial"] = num(f->partial());
    } else {
        err["kind"] = dynamic_cast<const SolverDefect*>(&e) ? "solver-defect" : "internal";
    }
    err["message"] = e.what();
    return err;
}

}  // namespace

int exit_code(const std::exception& e) {
    if (dynamic_cast<const PreconditionRejected*>(&e)) return kExitPrecondition;
    if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const DomainError*>(&e) ||
        dynamic_cast<const StructuralError*>(&e))
        return kExitConfig;
    if (dynamic_cast<const NonConvergence*>(&e) || dynamic_cast<const NumericFailure*>(&e)) return kExitNumeric;
    return kExitSoftware;
}

std::pair<std::vector<double>, std::vector<double>> read_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open table " + path.string());
    std::vector<double> x, y;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        std::string a, b, extra;
        if (!(ss >> a)) continue;
        auto where = path.string() + ":" + std::to_string(lineno);
        if (!(ss >> b) || (ss >> extra)) throw ConfigError(where + ": expected two columns");
        double u, v;
        try {
            std::size_t pa, pb;
            u = std::stod(a, &pa);
            v = std::stod(b, &pb);
            if (pa != a.size() || pb != b.size()) throw std::invalid_argument("trailing characters");
        } catch (const std::exception&) {
            throw ConfigError(where + ": not a number");
        }
        if (!std::isfinite(u) || !std::isfinite(v)) throw ConfigError(where + ": not finite");
        if (!x.empty() && !(u > x.back())) throw ConfigError(where + ": abscissae must be strictly increasing");
        x.push_back(u);
        y.push_back(v);
    }
    if (x.size() < 2) throw ConfigError("table " + path.string() + " needs at least two rows");
    return {std::move(x), std::move(y)};
}

RunConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    check_keys(j, {"command", "phi", "f", "weight", "geometry", "params", "seed"}, "config");
    RunConfig cfg;
    cfg.base_dir = base_dir;
    if (j.contains("command")) cfg.command = get_string(j["command"], "command");
    if (!j.contains("phi")) throw ConfigError("config is missing the phi block");
    cfg.phi = parse_family(j["phi"], kPhiFamilies, "phi");
    if (j.contains("f")) cfg.f = parse_family(j["f"], kFFamilies, "f");

    if (j.contains("weight")) {
        const auto& wj = j["weight"];
        check_keys(wj, {"radial", "lower", "upper", "ball_lower", "ball_upper"}, "weight");
        auto entry = [&](const char* key, std::optional<FamilyBlock>& slot) {
            if (wj.contains(key)) slot = parse_family(wj[key], kWeightFamilies, std::string("weight.") + key);
        };
        entry("radial", cfg.weight.radial);
        entry("lower", cfg.weight.lower);
        entry("upper", cfg.weight.upper);
        entry("ball_lower", cfg.weight.ball_lower);
        entry("ball_upper", cfg.weight.ball_upper);
    } else {
        cfg.weight.radial = FamilyBlock{"constant", {1.0}, ""};
    }

    if (j.contains("geometry")) {
        const auto& g = j["geometry"];
        check_keys(g, {"N", "L", "horizon"}, "geometry");
        if (g.contains("N")) {
            if (!g["N"].is_number_integer()) throw ConfigError("geometry.N must be an integer >= 1");
            cfg.geometry.N = g["N"].get<int>();
        }
        if (g.contains("L")) cfg.geometry.L = get_number(g["L"], "geometry.L");
        if (g.contains("horizon")) cfg.geometry.horizon = get_number(g["horizon"], "geometry.horizon");
    }

    if (j.contains("params")) {
        const auto& q = j["params"];
        check_keys(q,
                   {"alpha", "epsilon", "k", "k_ladder", "r_star", "r_max", "tol", "rtol", "cutoffs", "samples", "M",
                    "output_points", "component", "budget", "budget_horizon"},
                   "params");
        auto& p = cfg.params;
        auto number = [&](const char* key, double& slot) {
            if (q.contains(key)) slot = get_number(q[key], std::string("params.") + key);
        };
        auto count = [&](const char* key, std::size_t& slot) {
            if (q.contains(key)) slot = get_unsigned(q[key], std::string("params.") + key);
        };
        number("alpha", p.alpha);
        number("epsilon", p.epsilon);
        number("k", p.k);
        number("r_star", p.r_star);
        number("r_max", p.r_max);
        number("tol", p.tol);
        number("rtol", p.rtol);
        number("budget_horizon", p.budget_horizon);
        count("samples", p.samples);
        count("M", p.M);
        count("output_points", p.output_points);
        if (q.contains("k_ladder")) p.k_ladder = get_numbers(q["k_ladder"], "params.k_ladder");
        if (q.contains("cutoffs")) p.cutoffs = get_numbers(q["cutoffs"], "params.cutoffs");
        if (q.contains("component")) p.component = get_string(q["component"], "params.component");
        if (q.contains("budget")) p.budget = get_string(q["budget"], "params.budget");
    }
    if (j.contains("seed")) cfg.seed = get_unsigned(j["seed"], "seed");
    validate(cfg);
    return cfg;
}

RunConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    auto base = path.parent_path();
    return parse_config_text(ss.str(), base.empty() ? std::filesystem::path(".") : base);
}

std::string serialize_config(const RunConfig& cfg) {
    json j;
    if (cfg.command) j["command"] = *cfg.command;
    j["phi"] = family_json(cfg.phi);
    if (cfg.f) j["f"] = family_json(*cfg.f);
    json w = json::object();
    auto entry = [&](const char* key, const std::optional<FamilyBlock>& b) {
        if (b) w[key] = family_json(*b);
    };
    entry("radial", cfg.weight.radial);
    entry("lower", cfg.weight.lower);
    entry("upper", cfg.weight.upper);
    entry("ball_lower", cfg.weight.ball_lower);
    entry("ball_upper", cfg.weight.ball_upper);
    j["weight"] = w;
    j["geometry"] = {{"N", cfg.geometry.N}, {"L", cfg.geometry.L}, {"horizon", cfg.geometry.horizon}};
    const auto& p = cfg.params;
    j["params"] = {{"alpha", p.alpha},
                   {"epsilon", p.epsilon},
                   {"k", p.k},
                   {"k_ladder", p.k_ladder},
                   {"r_star", p.r_star},
                   {"r_max", p.r_max},
                   {"tol", p.tol},
                   {"rtol", p.rtol},
                   {"cutoffs", p.cutoffs},
                   {"samples", p.samples},
                   {"M", p.M},
                   {"output_points", p.output_points},
                   {"component", p.component},
                   {"budget", p.budget},
                   {"budget_horizon", p.budget_horizon}};
    j["seed"] = cfg.seed;
    return j.dump(2) + "\n";
}

PhiSpec build_phi(const RunConfig& cfg) {
    const auto& b = cfg.phi;
    const auto& q = b.params;
    if (b.family == "constant-two") return PhiSpec::constant_two();
    if (b.family == "power") return PhiSpec::power(q[0]);
    if (b.family == "unit") return PhiSpec::unit();
    if (b.family == "p-and-q") return PhiSpec::p_and_q(q[0], q[1]);
    if (b.family == "elasticity") return PhiSpec::elasticity(q[0]);
    if (b.family == "elasticity-sqrt") return PhiSpec::elasticity_sqrt(q[0]);
    if (b.family == "plasticity-log") return PhiSpec::plasticity_log(q[0]);
    auto [t, v] = read_table(table_path(cfg, b.table));
    return PhiSpec::tabulated(std::move(t), std::move(v));
}

NonlinearitySpec build_f(const RunConfig& cfg) {
    if (!cfg.f) throw ConfigError("this command needs an f block");
    const auto& b = *cfg.f;
    if (b.family == "power") return NonlinearitySpec::power(b.params[0]);
    if (b.family == "exponential") return NonlinearitySpec::exponential();
    auto [t, v] = read_table(table_path(cfg, b.table));
    return NonlinearitySpec::tabulated(std::move(t), std::move(v));
}

WeightSpec build_weight(const RunConfig& cfg) {
    const auto& w = cfg.weight;
    WeightSpec ws;
    if (w.radial) {
        ws = WeightSpec::radial(weight_function(cfg, *w.radial, "weight.radial"));
    } else {
        ws.lower = weight_function(cfg, *w.lower, "weight.lower");
        ws.upper = weight_function(cfg, *w.upper, "weight.upper");
    }
    if (w.ball_lower) ws.ball_lower = weight_function(cfg, *w.ball_lower, "weight.ball_lower");
    if (w.ball_upper) ws.ball_upper = weight_function(cfg, *w.ball_upper, "weight.ball_upper");
    validate_weight(ws, std::max(cfg.geometry.L, cfg.geometry.horizon));
    return ws;
}

RadialFunction build_rho(const RunConfig& cfg) {
    auto ws = build_weight(cfg);
    auto which = component(cfg.params.component);
    return {ws.component(which), to_string(which) + " weight"};
}

std::string profile_csv(const RadialProfile& p) {
    std::string out = "r,u,du,Q\n";
    char buf[160];
    for (std::size_t i = 0; i < p.r.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", p.r[i], p.u[i], p.du[i], p.Q[i]);
        out += buf;
    }
    return out;
}

std::filesystem::path resolve_out_dir(const std::optional<std::string>& flag) {
    if (flag && !flag->empty()) return *flag;
    if (const char* env = std::getenv("BLOWUP_OUT_DIR"); env && *env) return env;
    return "out";
}

int run_command(const RunConfig& cfg, const std::string& command, const RunOptions& opts) {
    json err;
    int code = kExitSoftware;
    try {
        if (std::find(kCommands.begin(), kCommands.end(), command) == kCommands.end())
            throw ConfigError("unknown command '" + command + "'");
        ArtifactWriter writer(opts.out_dir);
        json result = dispatch(cfg, command, opts, writer);
        json report;
        report["command"] = command;
        report["status"] = "ok";
        report["seed"] = cfg.seed;
        report["phi"] = family_json(cfg.phi);
        report["f"] = cfg.f ? family_json(*cfg.f) : json(nullptr);
        report["geometry"] = {{"N", cfg.geometry.N}, {"L", cfg.geometry.L}, {"horizon", cfg.geometry.horizon}};
        report["result"] = std::move(result);
        writer.text(command + ".json", report.dump(2) + "\n");
        return kExitOk;
    } catch (const std::exception& e) {
        code = exit_code(e);
        err = error_json(e);
    }
    json doc;
    doc["command"] = command;
    doc["status"] = "error";
    doc["exit_code"] = code;
    doc["error"] = err;
    std::error_code ec;
    std::filesystem::create_directories(opts.out_dir, ec);
    std::ofstream out(opts.out_dir / "error.json", std::ios::binary | std::ios::trunc);
    out << doc.dump(2) << "\n";
    return code;
}

}  // namespace blowup
