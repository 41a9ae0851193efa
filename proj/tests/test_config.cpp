#include <gtest/gtest.h>

#include <cmath>

#include "czlab/error.hpp"
#include "czlab/probes.hpp"
#include "czlab/suites.hpp"

using namespace czlab;

TEST(Config, DefaultsResolveForEverySuite) {
    ASSERT_EQ(suite_names().size(), 8u);
    for (const auto& s : suite_names()) {
        const json cfg = resolve_config(s, {{"seed", 7}});
        EXPECT_EQ(cfg["seed"], 7);
        EXPECT_EQ(cfg["suite"], s);
        EXPECT_EQ(resolve_config(s, {{"seed", 7}}), cfg);
    }
}

TEST(Config, Rejections) {
    EXPECT_THROW(resolve_config("reproducing", json::object()), ConfigError);
    EXPECT_THROW(resolve_config("reproducing", json::array()), ConfigError);
    EXPECT_THROW(resolve_config("reproducing", {{"seed", 1}, {"colour", "red"}}), ConfigError);
    EXPECT_THROW(resolve_config("reproducing", {{"seed", 1}, {"grid", {{"n_points", 500}}}}), ConfigError);
    EXPECT_THROW(resolve_config("reproducing", {{"seed", 1}, {"grid", {{"L", "four"}}}}), ConfigError);
    EXPECT_THROW(resolve_config("reproducing", {{"seed", 1}, {"tolerances", {{"residual", -0.1}}}}), ConfigError);
    EXPECT_THROW(resolve_config("reproducing", {{"seed", 1}, {"suite", "h1_growth"}}), ConfigError);
    EXPECT_THROW(resolve_config("nonexistent", {{"seed", 1}}), std::exception);
    EXPECT_THROW(run_suite("nonexistent", json::object()), ConfigError);
}

TEST(Config, PartialOverrideKeepsSiblings) {
    const json cfg = resolve_config("reproducing", {{"seed", 1}, {"grid", {{"n_points", 256}}}});
    EXPECT_EQ(cfg["grid"]["n_points"], 256);
    EXPECT_EQ(cfg["grid"]["L"], default_config("reproducing")["grid"]["L"]);
}

TEST(Table, Rfc4180) {
    Table t("x.csv", {"name", "z@c", "n"});
    t.row().add("plain").add(cplx(1.5, -2.0)).add(3);
    t.row().add("a,b \"q\"").add(cplx(0.0, 0.0)).add(-1);
    EXPECT_EQ(t.csv(), "name,z_re,z_im,n\r\nplain,1.5,-2,3\r\n\"a,b \"\"q\"\"\",0,0,-1\r\n");
    Table bad("y.csv", {"a", "b"});
    bad.row().add(1.0);
    EXPECT_THROW(bad.csv(), Error);
}

TEST(Table, RoundTripDoubles) {
    Table t("d.csv", {"v"});
    const double v = 0.1 + 0.2;
    t.row().add(v);
    const std::string body = t.csv();
    const std::string cell = body.substr(body.find("\r\n") + 2, body.rfind("\r\n") - body.find("\r\n") - 2);
    EXPECT_EQ(std::stod(cell), v);
}

TEST(Artifacts, ShaAndSummary) {
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    SuiteOutput out;
    out.suite = "h1_growth";
    out.criteria.push_back(Criterion{4, "h1_growth", true, json::object()});
    out.criteria.push_back(Criterion{5, "other", false, json::object()});
    const json s = summary_json(out, {{"seed", 9}});
    EXPECT_EQ(s["schema"], 1);
    EXPECT_EQ(s["seed"], 9);
    EXPECT_FALSE(s["pass"].get<bool>());
    EXPECT_EQ(s["failing"], json::array({"other"}));
    EXPECT_EQ(s["criteria"]["h1_growth"]["criterion"], 4);
}

TEST(Probes, CountsDeltaAndDeterminism) {
    const Grid g(4.0, 256);
    EXPECT_TRUE(gen_probes(ProbeSpec{"bump", 0, 0.5, 4.0, 1}, g).empty());
    EXPECT_THROW(gen_probes(ProbeSpec{"holder_random", 2, 1.5, 4.0, 1}, g), InvalidArgument);
    EXPECT_THROW(gen_probes(ProbeSpec{"wavelet", 2, 0.5, 4.0, 1}, g), InvalidArgument);
    for (const char* fam : {"bump", "holder_random", "oscillation", "mean_zero_pair"}) {
        const auto a = gen_probes(ProbeSpec{fam, 4, 0.5, 4.0, 11}, g);
        const auto b = gen_probes(ProbeSpec{fam, 4, 0.5, 4.0, 11}, g);
        const auto c = gen_probes(ProbeSpec{fam, 4, 0.5, 4.0, 12}, g);
        ASSERT_EQ(a.size(), 4u);
        for (std::size_t i = 0; i < a.size(); ++i) {
            EXPECT_EQ(a[i].values(), b[i].values()) << fam;
            EXPECT_GT(lp_norm(a[i], 2.0), 0.0);
        }
        EXPECT_GT(lp_norm(a[0] - c[0], 2.0), 0.0) << fam;
    }
}

TEST(Probes, MeanZeroPairAgainstB) {
    const Grid g(4.0, 256);
    const GridFunction b = GridFunction::sample(g, [](double x) { return cplx(1.0, 0.4 * std::sin(2 * x)); });
    for (const auto& p : gen_probes(ProbeSpec{"mean_zero_pair", 6, 0.5, 4.0, 2}, g, b)) {
        EXPECT_LE(std::abs(pairing(b, p)), 1e-10 * lp_norm(p, 1.0));
    }
}

TEST(Probes, HolderRoughness) {
    // A probe of order 1/2: its 0.9 seminorm grows under refinement much faster than its 0.5 seminorm.
    const ProbeSpec spec{"holder_random", 1, 0.5, 4.0, 5};
    const GridFunction coarse = gen_probes(spec, Grid(2.0, 256)).front();
    const GridFunction fine = gen_probes(spec, Grid(2.0, 2048)).front();
    const double g05 = holder_seminorm(fine, 0.5) / holder_seminorm(coarse, 0.5);
    const double g09 = holder_seminorm(fine, 0.9) / holder_seminorm(coarse, 0.9);
    EXPECT_GT(g09, 1.5 * g05);
    EXPECT_LT(g05, 2.0);
}
