#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "czlab/grid.hpp"

namespace czlab {

using json = nlohmann::json;

/** A CSV table; complex columns are declared once and expand to name_re, name_im. */
class Table {
public:
    Table(std::string file, std::vector<std::string> columns);

    const std::string& file() const { return file_; }
    Table& row();
    Table& add(double v);
    Table& add(int v);
    Table& add(cplx v);
    Table& add(const std::string& v);
    Table& add(const char* v) { return add(std::string(v)); }
    Table& add(bool v) { return add(std::string(v ? "true" : "false")); }
    std::size_t rows() const { return rows_.size(); }
    /// RFC 4180, CRLF line ends, header first.
    std::string csv() const;

private:
    std::string file_;
    std::vector<std::string> columns_;
    std::vector<bool> complex_;
    std::vector<std::vector<std::string>> rows_;
};

struct Criterion {
    int id = 0;
    std::string key;     // summary key
    bool pass = false;
    json checks = json::object();  // named sub-checks with values, limits and verdicts
};

struct SuiteOutput {
    std::string suite;
    std::vector<Table> tables;
    std::vector<Criterion> criteria;
    json metrics = json::object();

    bool pass() const;
    std::vector<std::string> failing() const;
};

const std::vector<std::string>& suite_names();

/// Built-in configuration of a suite; every field a user config may set.
json default_config(const std::string& suite);

/**
 * Merges a user config over the defaults. Unknown keys, type mismatches, non-positive tolerances,
 * bad grids and a missing seed raise ConfigError.
 */
json resolve_config(const std::string& suite, const json& user);

/// Runs a suite on a resolved config. Library errors from impossible parameters surface as ConfigError.
SuiteOutput run_suite(const std::string& suite, const json& config);

json summary_json(const SuiteOutput& out, const json& config);
std::string sha256_hex(const std::string& data);
/// summary.json, the CSV tables and MANIFEST, written only after everything is rendered.
void write_artifacts(const SuiteOutput& out, const json& config, const std::filesystem::path& dir);

}  // namespace czlab
