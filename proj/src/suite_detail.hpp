#pragma once

#include <string>

#include "czlab/grid.hpp"
#include "czlab/suites.hpp"

namespace czlab::detail {

/** Collects named checks for one acceptance criterion. */
class Gate {
public:
    Gate(int id, std::string key);

    void le(const std::string& name, double value, double limit);
    void ge(const std::string& name, double value, double limit);
    void flag(const std::string& name, bool ok, const json& detail = nullptr);
    /// Recorded but not part of the verdict.
    void info(const std::string& name, const json& value);
    Criterion done() const { return c_; }

private:
    Criterion c_;
};

Grid grid_from(const json& g);
/// {"type": "one" | "sin_imag" | "cos_real" | "curve", ...}
GridFunction make_b(const json& spec, const Grid& grid);
void validate_b(const json& spec, const std::string& where);
std::string b_label(const json& spec);
/// "finest" or an integer.
int resolve_k_max(const json& v, const Grid& grid);

SuiteOutput run_approx_identity(const json& cfg);
SuiteOutput run_reproducing(const json& cfg);
SuiteOutput run_almost_orthogonality(const json& cfg);
SuiteOutput run_h1_growth(const json& cfg);
SuiteOutput run_dual_bound(const json& cfg);
SuiteOutput run_paraproduct(const json& cfg);
SuiteOutput run_tb_audit(const json& cfg);
SuiteOutput run_riesz_curve(const json& cfg);

}  // namespace czlab::detail
