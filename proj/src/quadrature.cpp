#include "czlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include <gsl/gsl_integration.h>

#include "czlab/error.hpp"

namespace czlab {

namespace {

struct TableDeleter {
    void operator()(gsl_integration_glfixed_table* t) const { gsl_integration_glfixed_table_free(t); }
};

// Reference nodes on [-1, 1], cached per order.
const QuadRule& reference_rule(int order) {
    static std::mutex mu;
    static std::map<int, QuadRule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(order);
    if (it != cache.end()) return it->second;
    std::unique_ptr<gsl_integration_glfixed_table, TableDeleter> table(
        gsl_integration_glfixed_table_alloc(static_cast<std::size_t>(order)));
    if (!table) throw Error("gauss_legendre: table allocation failed");
    QuadRule r;
    for (int i = 0; i < order; ++i) {
        double xi, wi;
        gsl_integration_glfixed_point(-1.0, 1.0, static_cast<std::size_t>(i), &xi, &wi, table.get());
        r.x.push_back(xi);
        r.w.push_back(wi);
    }
    return cache.emplace(order, std::move(r)).first->second;
}

}  // namespace

void QuadRule::append(const QuadRule& other) {
    x.insert(x.end(), other.x.begin(), other.x.end());
    w.insert(w.end(), other.w.begin(), other.w.end());
}

double QuadRule::integrate(const std::function<double(double)>& f) const {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * f(x[i]);
    return s;
}

QuadRule gauss_legendre(double a, double b, int order) {
    if (order < 1) throw InvalidArgument("gauss_legendre: order must be positive");
    const QuadRule& ref = reference_rule(order);
    const double c = 0.5 * (a + b), r = 0.5 * (b - a);
    QuadRule out;
    out.x.reserve(order);
    out.w.reserve(order);
    for (int i = 0; i < order; ++i) {
        out.x.push_back(c + r * ref.x[i]);
        out.w.push_back(r * ref.w[i]);
    }
    return out;
}

QuadRule composite_rule(std::vector<double> breaks, int order) {
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    QuadRule out;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) out.append(gauss_legendre(breaks[i], breaks[i + 1], order));
    return out;
}

QuadRule graded_rule(double a, double b, const std::vector<double>& singular, double finest, int order,
                     double ratio, const std::vector<double>& breaks) {
    if (!(b > a)) return {};
    if (!(ratio > 0.0 && ratio < 1.0)) throw InvalidArgument("graded_rule: ratio must lie in (0, 1)");
    if (!(finest > 0.0)) throw InvalidArgument("graded_rule: finest panel must be positive");
    std::vector<double> pts{a, b};
    std::vector<double> sing;
    for (double s : singular)
        if (s >= a && s <= b) {
            pts.push_back(s);
            sing.push_back(s);
        }
    for (double s : breaks)
        if (s > a && s < b) pts.push_back(s);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    auto is_singular = [&](double p) { return std::find(sing.begin(), sing.end(), p) != sing.end(); };
    std::vector<double> all;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double p = pts[i], q = pts[i + 1];
        const bool sp = is_singular(p), sq = is_singular(q);
        all.push_back(p);
        if (!sp && !sq) continue;
        // Grade towards the singular end(s); when both are singular, split at the midpoint first.
        const double mid = 0.5 * (p + q);
        if (sp) {
            const double top = sq ? mid : q;
            for (double d = (top - p) * ratio; d > finest; d *= ratio) all.push_back(p + d);
            all.push_back(p + std::min(finest, top - p));
        }
        if (sp && sq) all.push_back(mid);
        if (sq) {
            const double bottom = sp ? mid : p;
            for (double d = (q - bottom) * ratio; d > finest; d *= ratio) all.push_back(q - d);
            all.push_back(q - std::min(finest, q - bottom));
        }
    }
    all.push_back(pts.back());
    return composite_rule(std::move(all), order);
}

}  // namespace czlab
