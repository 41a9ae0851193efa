#include "czlab/fit.hpp"

#include <cmath>

#include "czlab/error.hpp"

namespace czlab {

LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size()) throw InvalidArgument("fit_line: size mismatch");
    LineFit fit;
    fit.points = static_cast<int>(xs.size());
    if (xs.empty()) return fit;
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= xs.size();
    my /= xs.size();
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    fit.intercept = my - fit.slope * mx;
    return fit;
}

DecayFit fit_log2_decay(const std::vector<double>& xs, const std::vector<double>& values,
                        double floor) {
    if (xs.size() != values.size()) throw InvalidArgument("fit_log2_decay: size mismatch");
    std::vector<double> fx, fy;
    DecayFit out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (values[i] <= floor) {
            ++out.vanished;
            continue;
        }
        fx.push_back(xs[i]);
        fy.push_back(std::log2(values[i]));
    }
    out.fitted = static_cast<int>(fx.size());
    if (fx.size() >= 2) out.slope = fit_line(fx, fy).slope;
    return out;
}

PowerFit fit_power_plus_constant(const std::vector<double>& xs, const std::vector<double>& ys,
                                 double lo, double hi) {
    if (xs.size() != ys.size()) throw InvalidArgument("fit_power_plus_constant: size mismatch");
    if (xs.size() < 3) throw InvalidArgument("fit_power_plus_constant needs three points");
    PowerFit best;
    best.rss = INFINITY;
    const int steps = static_cast<int>(std::lround((hi - lo) / 1e-3));
    std::vector<double> px(xs.size());
    for (int s = 0; s <= steps; ++s) {
        const double e = lo + s * 1e-3;
        for (std::size_t i = 0; i < xs.size(); ++i) px[i] = std::pow(xs[i], e);
        const LineFit f = fit_line(px, ys);
        double rss = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double r = f.intercept + f.slope * px[i] - ys[i];
            rss += r * r;
        }
        if (rss < best.rss) best = {f.intercept, f.slope, e, rss};
    }
    return best;
}

}  // namespace czlab
