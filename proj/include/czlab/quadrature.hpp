#pragma once

#include <functional>
#include <vector>

namespace czlab {

struct QuadRule {
    std::vector<double> x;
    std::vector<double> w;

    std::size_t size() const { return x.size(); }
    void append(const QuadRule& other);
    double integrate(const std::function<double(double)>& f) const;
};

/// Gauss-Legendre rule of the given order on [a, b].
QuadRule gauss_legendre(double a, double b, int order);

/// Composite Gauss-Legendre over consecutive breakpoints (sorted, duplicates dropped).
QuadRule composite_rule(std::vector<double> breaks, int order);

/**
 * Composite rule on [a, b] with panels halving geometrically (ratio `ratio`) towards every point of
 * `singular` inside [a, b] until a panel is narrower than `finest`. Extra breakpoints (kinks, support
 * ends) are honoured.
 */
QuadRule graded_rule(double a, double b, const std::vector<double>& singular, double finest, int order,
                     double ratio = 0.25, const std::vector<double>& breaks = {});

}  // namespace czlab
