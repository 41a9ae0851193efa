#include "czlab/suites.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>

#include <openssl/evp.h>

#include "czlab/accretive.hpp"
#include "czlab/curve.hpp"
#include "czlab/error.hpp"
#include "suite_detail.hpp"

namespace czlab {

namespace {

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

const std::map<std::string, const char*>& defaults() {
    static const std::map<std::string, const char*> d = {
        {"approx_identity", R"({
  "seed": 1,
  "grid": {"L": 16.0, "n_points": 1024},
  "scales": {"k_min": -3, "k_max": "finest"},
  "b": [{"type": "one"}, {"type": "sin_imag", "amplitude": 0.4, "frequency": 2.0}],
  "interior_fraction": 0.5,
  "holder": {"delta0_rough": 0.8, "deltas": [0.3, 0.5]},
  "infrastructure": {"L": 16.0, "n_points": 1024, "paraproduct_L": 4.0, "paraproduct_n_points": 256},
  "tolerances": {"identity": 1e-8, "cancellation": 1e-8, "slope_margin": 0.25, "transpose": 1e-12,
                 "hilbert_antisymmetry": 1e-10, "hilbert_square": 1e-2}
})"},
        {"reproducing", R"({
  "seed": 3,
  "grid": {"L": 4.0, "n_points": 512},
  "scales": {"k_min": -4, "k_max": "finest"},
  "b": {"type": "sin_imag", "amplitude": 0.4, "frequency": 2.0},
  "regularization": 1e-6,
  "probes": {"count": 16, "spread": 2.0},
  "dipole_radius": 0.25,
  "partial_sum_centre": 0,
  "tolerances": {"residual": 0.05, "gamma_margin": 0.2}
})"},
        {"almost_orthogonality", R"({
  "seed": 5,
  "grid": {"L": 2.0, "n_points": 512},
  "scales": {"k_min": -4, "k_max": 3},
  "b": [{"type": "one"}, {"type": "sin_imag", "amplitude": 0.4, "frequency": 2.0},
        {"type": "curve", "kind": "sawtooth", "lambda": 0.4, "plateau": 0.5}],
  "max_gap": 6,
  "kernel_samples": 3000,
  "probes": 6,
  "tolerances": {"slope_margin": 0.2}
})"},
        {"h1_growth", R"({
  "seed": 1,
  "grid": {"L": 8.0, "n_points": 2048},
  "j": -2,
  "max_gap": 8,
  "N": 2.0,
  "tolerances": {"exponent": 1.15}
})"},
        {"dual_bound", R"({
  "seed": 1,
  "grid": {"L": 16.0, "n_points": 512},
  "scales": {"k_min": -3},
  "b0": {"type": "sin_imag", "amplitude": 0.4, "frequency": 1.0},
  "b1": {"type": "cos_real", "amplitude": 0.3, "frequency": 0.7},
  "b2": {"type": "one"},
  "exponents": [[2.0, 4.0, 4.0], [2.0, 3.0, 6.0]],
  "frequencies": [0.5, 1.0, 2.0, 4.0],
  "radii": [1.0, 2.0, 4.0],
  "tolerances": {"refinement": 0.25, "hypotheses": 1e-4}
})"},
        {"paraproduct", R"({
  "seed": 2,
  "grid": {"L": 16.0, "n_points": 1024},
  "scales": {"k_min": -3, "k_max": "finest"},
  "b0": [{"type": "one"}, {"type": "sin_imag", "amplitude": 0.4, "frequency": 1.0}],
  "radii": [0.5, 1.0, 2.0, 4.0],
  "kernel_samples": 150,
  "probe_count": 6,
  "carleson_C": 1.0,
  "tolerances": {"e0_relative": 0.02, "slope_margin": 0.25, "decay_exponent": 2.0, "transpose": 1e-10}
})"},
        {"tb_audit", R"({
  "seed": 11,
  "grid": {"L": 4.0, "n_points": 512},
  "wbp": {"radii": [0.125, 0.25, 0.5, 1.0, 2.0], "centres": [0.0, 0.3]},
  "theta": {"k_min": -1, "k_max": 2, "samples": 60},
  "displaced": {"R": 0.25, "separations": [0.0, 1.0, 2.0, 4.0, 8.0]},
  "reduction": {"L": 16.0, "n_points": 512, "k_min": -3, "probes": 32, "spread": 2.0,
                "radii": [2.0, 4.0, 8.0], "sweep_tol": 1e-3},
  "tolerances": {"wbp_scatter": 4.0, "cancellation": 1e-4, "growth_margin": 0.5, "roundtrip": 0.05,
                 "residual_factor": 10.0}
})"},
        {"riesz_curve", R"({
  "seed": 11,
  "grid": {"L": 4.0, "n_points": 256},
  "refinement_n_points": 512,
  "lambdas": [0.2, 0.4, 0.6],
  "plateau": 4.0,
  "kernel_samples": 20000,
  "pv": {"h": 0.001953125, "multiples": [16, 8, 4, 2, 1], "points": [0.1, 0.5]},
  "testing": {"L": 64.0, "radii": [2.0, 4.0, 8.0, 16.0], "probe_radius": 0.125, "control_radius": 0.5},
  "tolerances": {"pv_relative": 0.01, "identity": 1e-13, "testing": 0.02, "cauchy": 0.02, "transfer": 1e-10}
})"},
    };
    return d;
}

std::string kind_name(const json& v) {
    if (v.is_boolean()) return "boolean";
    if (v.is_number_integer()) return "integer";
    if (v.is_number()) return "number";
    if (v.is_string()) return "string";
    if (v.is_array()) return "array";
    if (v.is_object()) return "object";
    return "null";
}

bool compatible(const json& def, const json& user) {
    if (def.is_number_float()) return user.is_number();
    if (def.is_number_integer()) return user.is_number_integer();
    if (def.is_string() && def == "finest") return user.is_number_integer() || user == "finest";
    return kind_name(def) == kind_name(user);
}

void merge(json& into, const json& user, const std::string& path) {
    if (!user.is_object()) throw ConfigError(path + ": expected an object");
    for (const auto& [key, value] : user.items()) {
        const std::string p = path.empty() ? key : path + "." + key;
        if (!into.contains(key)) throw ConfigError("unknown key " + p);
        json& def = into[key];
        if (!compatible(def, value))
            throw ConfigError(p + ": expected " + kind_name(def) + ", got " + kind_name(value));
        if (def.is_object() && !def.empty() && !def.contains("type")) {
            merge(def, value, p);
        } else if (def.is_array()) {
            if (!def.empty())
                for (const auto& e : value)
                    if (!compatible(def.front(), e)) throw ConfigError(p + ": element type mismatch");
            def = value;
        } else {
            def = value;
        }
    }
}

void check_positive(const json& v, const std::string& path) {
    if (v.is_object()) {
        for (const auto& [k, x] : v.items()) check_positive(x, path + "." + k);
    } else if (v.is_number()) {
        if (!(v.get<double>() > 0.0) || !std::isfinite(v.get<double>())) throw ConfigError(path + " must be positive");
    }
}

void check_grid(const json& g, const std::string& where) {
    const double L = g.at("L").get<double>();
    const long n = g.at("n_points").get<long>();
    if (!(L > 0.0) || !std::isfinite(L)) throw ConfigError(where + ".L must be positive");
    if (n < 32 || n > 8192 || (n & (n - 1)) != 0) throw ConfigError(where + ".n_points must be a power of two in [32, 8192]");
}

void check_lambda(double lam, const std::string& where) {
    if (!(lam >= 0.0 && lam < 1.0)) throw ConfigError(where + ": lambda must lie in [0, 1)");
}

void validate(const std::string& suite, const json& c) {
    if (!c.at("seed").is_number_integer() || c.at("seed").get<long long>() < 0)
        throw ConfigError("seed must be a non-negative integer");
    check_grid(c.at("grid"), "grid");
    check_positive(c.at("tolerances"), "tolerances");
    auto each_b = [&](const char* key) {
        const json& v = c.at(key);
        if (v.is_array()) {
            if (v.empty()) throw ConfigError(std::string(key) + " must not be empty");
            for (const auto& s : v) detail::validate_b(s, key);
        } else {
            detail::validate_b(v, key);
        }
    };
    if (suite == "approx_identity") {
        each_b("b");
        check_grid(c.at("infrastructure"), "infrastructure");
        check_grid({{"L", c["infrastructure"]["paraproduct_L"]}, {"n_points", c["infrastructure"]["paraproduct_n_points"]}},
                   "infrastructure.paraproduct");
        const double d0 = c["holder"]["delta0_rough"].get<double>();
        if (!(d0 > 0.0 && d0 <= 1.0)) throw ConfigError("holder.delta0_rough must lie in (0, 1]");
        for (const auto& d : c["holder"]["deltas"])
            if (!(d.get<double>() > 0.0 && d.get<double>() < d0)) throw ConfigError("holder.deltas must lie in (0, delta0)");
        const double f = c.at("interior_fraction").get<double>();
        if (!(f > 0.0 && f <= 1.0)) throw ConfigError("interior_fraction must lie in (0, 1]");
    } else if (suite == "reproducing") {
        each_b("b");
        if (c["probes"]["count"].get<int>() < 1) throw ConfigError("probes.count must be positive");
        if (!(c["regularization"].get<double>() > 0.0)) throw ConfigError("regularization must be positive");
    } else if (suite == "almost_orthogonality") {
        each_b("b");
        if (c["max_gap"].get<int>() < 2) throw ConfigError("max_gap must be at least 2");
    } else if (suite == "h1_growth") {
        if (c["max_gap"].get<int>() < 2) throw ConfigError("max_gap must be at least 2");
        if (!(c["N"].get<double>() > 1.0)) throw ConfigError("N must exceed 1");
    } else if (suite == "dual_bound") {
        each_b("b0");
        each_b("b1");
        each_b("b2");
        for (const auto& t : c["exponents"]) {
            if (!t.is_array() || t.size() != 3) throw ConfigError("exponents: expected triples (p, p1, p2)");
            const double p = t[0].get<double>(), p1 = t[1].get<double>(), p2 = t[2].get<double>();
            if (!(p > 1.0 && p1 > 1.0 && p2 > 1.0)) throw ConfigError("exponents must exceed 1");
            if (std::abs(1.0 / p - 1.0 / p1 - 1.0 / p2) > 1e-12) throw ConfigError("exponents: 1/p must equal 1/p1 + 1/p2");
        }
    } else if (suite == "paraproduct") {
        each_b("b0");
        const double L = c["grid"]["L"].get<double>();
        for (const auto& r : c["radii"])
            if (!(r.get<double>() > 0.0 && r.get<double>() <= L / 4 + 1e-12))
                throw ConfigError("radii must lie in (0, L/4]");
    } else if (suite == "tb_audit") {
        check_grid({{"L", c["reduction"]["L"]}, {"n_points", c["reduction"]["n_points"]}}, "reduction");
        if (c["reduction"]["probes"].get<int>() < 32) throw ConfigError("reduction.probes must be at least 32");
        if (c["theta"]["k_max"].get<int>() < c["theta"]["k_min"].get<int>()) throw ConfigError("theta: empty scale range");
    } else if (suite == "riesz_curve") {
        for (const auto& l : c["lambdas"]) check_lambda(l.get<double>(), "lambdas");
        const long nr = c["refinement_n_points"].get<long>();
        if (nr < 32 || (nr & (nr - 1)) != 0) throw ConfigError("refinement_n_points must be a power of two");
        if (c["pv"]["multiples"].size() < 3) throw ConfigError("pv.multiples needs at least three levels");
        int prev = 1 << 30;
        for (const auto& m : c["pv"]["multiples"]) {
            if (m.get<int>() < 1 || m.get<int>() >= prev) throw ConfigError("pv.multiples must be positive and decreasing");
            prev = m.get<int>();
        }
        if (!(c["pv"]["h"].get<double>() > 0.0)) throw ConfigError("pv.h must be positive");
        const double Lt = c["testing"]["L"].get<double>();
        for (const auto& r : c["testing"]["radii"])
            if (!(r.get<double>() > 0.0 && r.get<double>() <= Lt / 4 + 1e-12)) throw ConfigError("testing.radii must lie in (0, L/4]");
    }
}

}  // namespace

Table::Table(std::string file, std::vector<std::string> columns) : file_(std::move(file)) {
    for (auto& c : columns) {
        const bool cx = c.size() > 2 && c.compare(c.size() - 2, 2, "@c") == 0;
        complex_.push_back(cx);
        columns_.push_back(cx ? c.substr(0, c.size() - 2) : c);
    }
}

Table& Table::row() {
    rows_.emplace_back();
    return *this;
}

Table& Table::add(double v) {
    rows_.back().push_back(fmt(v));
    return *this;
}

Table& Table::add(int v) {
    rows_.back().push_back(std::to_string(v));
    return *this;
}

Table& Table::add(cplx v) {
    rows_.back().push_back(fmt(v.real()));
    rows_.back().push_back(fmt(v.imag()));
    return *this;
}

Table& Table::add(const std::string& v) {
    rows_.back().push_back(quote(v));
    return *this;
}

std::string Table::csv() const {
    std::string out;
    std::size_t width = 0;
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        if (i) out += ',';
        if (complex_[i]) {
            out += quote(columns_[i] + "_re") + ',' + quote(columns_[i] + "_im");
            width += 2;
        } else {
            out += quote(columns_[i]);
            width += 1;
        }
    }
    out += "\r\n";
    for (const auto& r : rows_) {
        if (r.size() != width) throw Error(file_ + ": row width does not match the header");
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (i) out += ',';
            out += r[i];
        }
        out += "\r\n";
    }
    return out;
}

bool SuiteOutput::pass() const {
    for (const auto& c : criteria)
        if (!c.pass) return false;
    return true;
}

std::vector<std::string> SuiteOutput::failing() const {
    std::vector<std::string> out;
    for (const auto& c : criteria)
        if (!c.pass) out.push_back(c.key);
    return out;
}

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names = {"approx_identity", "almost_orthogonality", "h1_growth",
                                                   "reproducing",     "dual_bound",           "paraproduct",
                                                   "tb_audit",        "riesz_curve"};
    return names;
}

json default_config(const std::string& suite) {
    const auto it = defaults().find(suite);
    if (it == defaults().end()) throw ConfigError("unknown suite: " + suite);
    return json::parse(it->second);
}

json resolve_config(const std::string& suite, const json& user) {
    json cfg = default_config(suite);
    if (!user.is_object()) throw ConfigError("config must be a JSON object");
    json u = user;
    if (u.contains("suite")) {
        if (!u["suite"].is_string() || u["suite"] != suite) throw ConfigError("config names a different suite");
        u.erase("suite");
    }
    if (!u.contains("seed")) throw ConfigError("seed is mandatory");
    merge(cfg, u, "");
    validate(suite, cfg);
    cfg["suite"] = suite;
    return cfg;
}

SuiteOutput run_suite(const std::string& suite, const json& config) {
    using namespace detail;
    static const std::map<std::string, SuiteOutput (*)(const json&)> table = {
        {"approx_identity", run_approx_identity}, {"reproducing", run_reproducing},
        {"almost_orthogonality", run_almost_orthogonality}, {"h1_growth", run_h1_growth},
        {"dual_bound", run_dual_bound}, {"paraproduct", run_paraproduct},
        {"tb_audit", run_tb_audit}, {"riesz_curve", run_riesz_curve}};
    const auto it = table.find(suite);
    if (it == table.end()) throw ConfigError("unknown suite: " + suite);
    try {
        SuiteOutput out = it->second(config);
        out.suite = suite;
        return out;
    } catch (const ScaleUnresolvable& e) {
        throw ConfigError(std::string("scale range not resolvable on this grid: ") + e.what());
    } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
    } catch (const NotAccretive& e) {
        throw ConfigError(std::string("b is not para-accretive: ") + e.what());
    }
}

json summary_json(const SuiteOutput& out, const json& config) {
    json s;
    s["schema"] = 1;
    s["suite"] = out.suite;
    s["seed"] = config.at("seed");
    s["pass"] = out.pass();
    json crit = json::object();
    for (const auto& c : out.criteria) crit[c.key] = {{"criterion", c.id}, {"pass", c.pass}, {"checks", c.checks}};
    s["criteria"] = crit;
    s["failing"] = out.failing();
    s["metrics"] = out.metrics;
    json files = json::array();
    for (const auto& t : out.tables) files.push_back(t.file());
    s["tables"] = files;
    return s;
}

std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) throw Error("sha256 failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

void write_artifacts(const SuiteOutput& out, const json& config, const std::filesystem::path& dir) {
    std::vector<std::pair<std::string, std::string>> files;
    std::set<std::string> names;
    for (const auto& t : out.tables) {
        if (!names.insert(t.file()).second) throw Error("duplicate table " + t.file());
        files.emplace_back(t.file(), t.csv());
    }
    files.emplace_back("summary.json", summary_json(out, config).dump(2) + "\n");
    std::string manifest;
    manifest += "suite " + out.suite + "\n";
    manifest += "seed " + config.at("seed").dump() + "\n";
    manifest += "config_sha256 " + sha256_hex(config.dump()) + "\n";
    for (const auto& [name, body] : files) manifest += "file " + name + " sha256 " + sha256_hex(body) + "\n";
    files.emplace_back("MANIFEST", manifest);

    std::filesystem::create_directories(dir);
    for (const auto& [name, body] : files) {
        std::ofstream f(dir / name, std::ios::binary | std::ios::trunc);
        f.write(body.data(), static_cast<std::streamsize>(body.size()));
        if (!f) throw Error("cannot write " + (dir / name).string());
    }
}

namespace detail {

Gate::Gate(int id, std::string key) {
    c_.id = id;
    c_.key = std::move(key);
    c_.pass = true;
}

void Gate::le(const std::string& name, double value, double limit) {
    const bool ok = std::isfinite(value) && value <= limit;
    c_.checks[name] = {{"value", value}, {"limit", limit}, {"relation", "<="}, {"pass", ok}};
    c_.pass = c_.pass && ok;
}

void Gate::ge(const std::string& name, double value, double limit) {
    const bool ok = std::isfinite(value) && value >= limit;
    c_.checks[name] = {{"value", value}, {"limit", limit}, {"relation", ">="}, {"pass", ok}};
    c_.pass = c_.pass && ok;
}

void Gate::flag(const std::string& name, bool ok, const json& detail) {
    c_.checks[name] = {{"pass", ok}};
    if (!detail.is_null()) c_.checks[name]["detail"] = detail;
    c_.pass = c_.pass && ok;
}

void Gate::info(const std::string& name, const json& value) { c_.checks[name] = {{"info", value}}; }

Grid grid_from(const json& g) { return Grid(g.at("L").get<double>(), g.at("n_points").get<int>()); }

void validate_b(const json& s, const std::string& where) {
    if (!s.is_object() || !s.contains("type") || !s["type"].is_string()) throw ConfigError(where + ": b spec needs a type");
    const std::string t = s["type"];
    auto need = [&](const char* k) {
        if (!s.contains(k) || !s[k].is_number()) throw ConfigError(where + ": " + t + " needs numeric " + k);
        return s[k].get<double>();
    };
    std::set<std::string> allowed{"type"};
    if (t == "one") {
    } else if (t == "sin_imag" || t == "cos_real") {
        const double a = need("amplitude");
        need("frequency");
        if (!(std::abs(a) < 1.0)) throw ConfigError(where + ": amplitude must be below 1 in modulus");
        allowed.insert({"amplitude", "frequency"});
    } else if (t == "curve") {
        if (!s.contains("kind") || !s["kind"].is_string()) throw ConfigError(where + ": curve needs a kind");
        const std::string k = s["kind"];
        if (k != "flat" && k != "sawtooth" && k != "s_curve") throw ConfigError(where + ": unknown curve kind " + k);
        check_lambda(need("lambda"), where);
        if (!(need("plateau") > 0.0)) throw ConfigError(where + ": plateau must be positive");
        allowed.insert({"kind", "lambda", "plateau"});
    } else {
        throw ConfigError(where + ": unknown b type " + t);
    }
    for (const auto& [k, v] : s.items())
        if (!allowed.count(k)) throw ConfigError(where + ": unknown key " + k + " for " + t);
}

GridFunction make_b(const json& s, const Grid& grid) {
    const std::string t = s.at("type");
    if (t == "one") return GridFunction::constant(grid, 1.0);
    if (t == "sin_imag") {
        const double a = s["amplitude"], w = s["frequency"];
        return GridFunction::sample(grid, [=](double x) { return cplx(1.0, a * std::sin(w * x)); });
    }
    if (t == "cos_real") {
        const double a = s["amplitude"], w = s["frequency"];
        return GridFunction::sample(grid, [=](double x) { return cplx(1.0 + a * std::cos(w * x), 0.0); });
    }
    const auto c = std::make_shared<const LipschitzCurve>(LipschitzCurve::make(s["kind"], s["lambda"], s["plateau"]));
    return GridFunction::sample(grid, [c](double x) { return c->gamma_prime(x); });
}

std::string b_label(const json& s) {
    const std::string t = s.at("type");
    char buf[96];
    if (t == "one") return "1";
    if (t == "sin_imag") {
        std::snprintf(buf, sizeof buf, "1+%gi*sin(%gx)", s["amplitude"].get<double>(), s["frequency"].get<double>());
        return buf;
    }
    if (t == "cos_real") {
        std::snprintf(buf, sizeof buf, "1+%g*cos(%gx)", s["amplitude"].get<double>(), s["frequency"].get<double>());
        return buf;
    }
    std::snprintf(buf, sizeof buf, "gamma'(%s,%g)", s["kind"].get<std::string>().c_str(), s["lambda"].get<double>());
    return buf;
}

int resolve_k_max(const json& v, const Grid& grid) {
    const int finest = finest_resolvable_scale(grid);
    if (v.is_string()) return finest;
    const int k = v.get<int>();
    if (k > finest) throw ConfigError("k_max " + std::to_string(k) + " exceeds the finest resolvable scale " + std::to_string(finest));
    return k;
}

}  // namespace detail

}  // namespace czlab
