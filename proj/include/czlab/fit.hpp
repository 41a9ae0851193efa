#pragma once

#include <vector>

namespace czlab {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    int points = 0;
};

/// Ordinary least squares y = intercept + slope * x.
LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys);

/**
 * Slope of log2(value) against x. Values at or below `floor` count as vanished: they are left
 * out of the fit and reported, since exact cancellation beats any power law.
 */
struct DecayFit {
    double slope = 0.0;
    int fitted = 0;
    int vanished = 0;
    /// True when the sequence reached the floor; a decay criterion is then met outright.
    bool reached_floor() const { return vanished > 0; }
};

DecayFit fit_log2_decay(const std::vector<double>& xs, const std::vector<double>& values,
                        double floor);

struct PowerFit {
    double constant = 0.0;
    double scale = 0.0;
    double exponent = 0.0;
    double rss = 0.0;
};

/// Least squares y = constant + scale * x^exponent, exponent searched on [lo, hi] in steps of 1e-3.
PowerFit fit_power_plus_constant(const std::vector<double>& xs, const std::vector<double>& ys,
                                 double lo = 0.05, double hi = 3.0);

}  // namespace czlab
