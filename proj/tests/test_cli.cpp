#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "levy_lrm/cli.hpp"

using namespace levy_lrm;
using namespace levy_lrm::cli;

namespace {

const std::string kConfigDir = LEVY_LRM_CONFIG_DIR;

struct RunOutput {
  int code;
  std::string out;
  std::string err;
};

RunOutput run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string config(const std::string& name) { return kConfigDir + "/" + name; }

std::size_t line_count(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

RunConfig load_text(const std::string& text, std::vector<std::string> overrides = {}) {
  std::istringstream in(text);
  return load_config(in, overrides, "test");
}

const std::string kMerton =
    "model.kind = merton\nmodel.mu = -0.7\nmodel.sigma = 0.2\nmodel.gamma = 1\n"
    "model.m = 0\nmodel.delta = 1\n";

}  // namespace

TEST(ParseKeyValues, CommentsBlankLinesAndWhitespace) {
  std::istringstream in("# header\n\n  a = 1   # trailing\nb=two words\n");
  const auto kv = parse_key_values(in);
  EXPECT_EQ(kv.size(), 2u);
  EXPECT_EQ(kv.at("a"), "1");
  EXPECT_EQ(kv.at("b"), "two words");
}

TEST(ParseKeyValues, RejectsMalformedLines) {
  std::istringstream no_eq("just text\n");
  EXPECT_THROW(parse_key_values(no_eq), ConfigError);
  std::istringstream dup("a = 1\na = 2\n");
  EXPECT_THROW(parse_key_values(dup), ConfigError);
  std::istringstream empty_key(" = 2\n");
  EXPECT_THROW(parse_key_values(empty_key), ConfigError);
}

TEST(ParseGrid, ValuesListsAndRanges) {
  EXPECT_EQ(parse_grid("0.5", "k"), std::vector<double>{0.5});
  EXPECT_EQ(parse_grid("1, 2,3", "k"), (std::vector<double>{1, 2, 3}));
  const auto t = parse_grid("0:0.05:0.95", "k");
  ASSERT_EQ(t.size(), 20u);
  EXPECT_EQ(t[3], 0.15);
  EXPECT_EQ(t.back(), 0.95);
  EXPECT_EQ(parse_grid("1:0.25:8", "k").size(), 29u);
  EXPECT_EQ(parse_grid("10000:1000:20000", "k").size(), 11u);
}

TEST(ParseGrid, RejectsBadRanges) {
  EXPECT_THROW(parse_grid("", "k"), ConfigError);
  EXPECT_THROW(parse_grid("1:0:2", "k"), ConfigError);
  EXPECT_THROW(parse_grid("2:1:1", "k"), ConfigError);
  EXPECT_THROW(parse_grid("1:2", "k"), ConfigError);
  EXPECT_THROW(parse_grid("1,x", "k"), ConfigError);
  EXPECT_THROW(parse_grid("nan", "k"), ConfigError);
}

TEST(LoadConfig, MertonDefaults) {
  const auto cfg = load_text(kMerton);
  EXPECT_EQ(cfg.model.kind, ModelKind::merton);
  EXPECT_EQ(cfg.fft.n, 16384u);
  EXPECT_EQ(cfg.maturity, 1.0);
  EXPECT_EQ(cfg.t_grid, std::vector<double>{0.0});
  EXPECT_TRUE(cfg.strikes.empty());
  EXPECT_EQ(cfg.mode, ModeChoice::automatic);
  const auto model = std::get<MertonParams>(build_model(cfg.model));
  EXPECT_EQ(model.mu, -0.7);
}

TEST(LoadConfig, OverridesReplaceFileValues) {
  const auto cfg = load_text(kMerton, {"model.sigma=0.3", "fft.n = 4096", "output.mode=fft-grid"});
  EXPECT_EQ(cfg.model.values.at("sigma"), 0.3);
  EXPECT_EQ(cfg.fft.n, 4096u);
  EXPECT_EQ(cfg.mode, ModeChoice::fft_grid);
  EXPECT_THROW(load_text(kMerton, {"no-equals"}), ConfigError);
}

TEST(LoadConfig, StrictSchema) {
  EXPECT_THROW(load_text("model.mu = 1\n"), ConfigError);
  EXPECT_THROW(load_text("model.kind = heston\n"), ConfigError);
  EXPECT_THROW(load_text(kMerton + "model.kappa = 1\n"), ConfigError);
  EXPECT_THROW(load_text(kMerton + "typo.key = 1\n"), ConfigError);
  EXPECT_THROW(load_text("model.kind = merton\nmodel.mu = -0.7\n"), ConfigError);
  EXPECT_THROW(load_text(kMerton + "fft.n = 1000\n"), ConfigError);
  EXPECT_THROW(load_text(kMerton + "fft.alpha = 2.5\n"), ConfigError);
  EXPECT_THROW(load_text(kMerton + "fft.rule = midpoint\n"), ConfigError);
  EXPECT_THROW(load_text(kMerton + "query.t = 1\n"), ConfigError);
  EXPECT_THROW(load_text(kMerton + "query.strike = -1\n"), ConfigError);
  EXPECT_THROW(load_text(kMerton + "output.mode = fast\n"), ConfigError);
}

TEST(LoadConfig, VgKinds) {
  const auto kmd = load_text("model.kind = vg\nmodel.kappa = 0.15\nmodel.m = -0.2\nmodel.delta = 0.45\n");
  const auto vg = std::get<VgParams>(build_model(kmd.model));
  EXPECT_NEAR(vg.C(), 1.0 / 0.15, 1e-12);
  const auto cgm = load_text("model.kind = vg-cgm\nmodel.C = 2\nmodel.G = 5\nmodel.M = 7\n");
  EXPECT_EQ(std::get<VgParams>(build_model(cgm.model)).G(), 5.0);
}

TEST(ResolveMode, AutoPicksBySize) {
  EXPECT_EQ(resolve_mode(ModeChoice::automatic, 1), EvalMode::direct_sum);
  EXPECT_EQ(resolve_mode(ModeChoice::automatic, 4), EvalMode::direct_sum);
  EXPECT_EQ(resolve_mode(ModeChoice::automatic, 5), EvalMode::fft_grid);
  EXPECT_EQ(resolve_mode(ModeChoice::direct_sum, 100), EvalMode::direct_sum);
  EXPECT_EQ(resolve_mode(ModeChoice::fft_grid, 1), EvalMode::fft_grid);
}

TEST(FormatNumber, RoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 14841.07, 0.0}) {
    EXPECT_EQ(std::stod(format_number(v)), v);
  }
  EXPECT_EQ(format_number(0.5), "0.5");
}

TEST(ParallelFor, RunsEveryIndexAndRethrowsFirstError) {
  std::vector<int> hits(100, 0);
  parallel_for(100, 4, [&](std::size_t i) { hits[i] += 1; });
  EXPECT_EQ(std::count(hits.begin(), hits.end(), 1), 100);
  EXPECT_THROW(parallel_for(10, 3,
                            [](std::size_t i) {
                              if (i == 7) throw DomainError("seven");
                            }),
               DomainError);
}

TEST(ExitCodes, ValidateMertonReferencePasses) {
  const auto r = run_cli({"validate", "-c", config("merton_t_sweep.conf")});
  EXPECT_EQ(r.code, kExitOk) << r.out << r.err;
  EXPECT_NE(r.out.find("PASS  0 >= mu_S"), std::string::npos);
  EXPECT_NE(r.out.find("result: ok"), std::string::npos);
}

TEST(ExitCodes, ValidateReportsViolatedVgCondition) {
  const auto r = run_cli({"validate", "-c", config("vg_nikkei_k_sweep.conf"), "-s", "model.M=3"});
  EXPECT_EQ(r.code, kExitFailure);
  EXPECT_NE(r.out.find("FAIL  M > 4"), std::string::npos);
  EXPECT_NE(r.out.find("M > 4 violated"), std::string::npos);
}

TEST(ExitCodes, ValidateReportsPositiveDrift) {
  const auto r = run_cli({"validate", "-c", config("merton_t_sweep.conf"), "-s", "model.mu=0.5"});
  EXPECT_EQ(r.code, kExitFailure);
  EXPECT_NE(r.out.find("FAIL  0 >= mu_S"), std::string::npos);
}

TEST(ExitCodes, UsageAndConfigErrors) {
  EXPECT_EQ(run_cli({}).code, kExitUsage);
  EXPECT_EQ(run_cli({"bogus"}).code, kExitUsage);
  EXPECT_EQ(run_cli({"curve", "--no-such-flag"}).code, kExitUsage);
  EXPECT_EQ(run_cli({"curve", "-c", "/nonexistent/file.conf"}).code, kExitUsage);
  EXPECT_EQ(run_cli({"curve", "-c", config("merton_t_sweep.conf"), "-s", "fft.n=12"}).code,
            kExitUsage);
  EXPECT_EQ(run_cli({"curve", "-c", config("merton_t_sweep.conf"), "-m", "fast"}).code,
            kExitUsage);
  EXPECT_EQ(run_cli({"--help"}).code, kExitOk);
}

TEST(ExitCodes, CurveTailFailureIsReported) {
  const auto r = run_cli({"curve", "-c", config("merton_t_sweep.conf"), "-s", "fft.n=256"});
  EXPECT_EQ(r.code, kExitFailure);
  EXPECT_NE(r.err.find("tail condition failed"), std::string::npos);
  EXPECT_TRUE(r.out.empty());
}

TEST(Curve, RowCountsForShippedConfigs) {
  const std::pair<const char*, std::size_t> cases[] = {
      {"merton_t_sweep.conf", 20},   {"merton_k_sweep.conf", 29},    {"vg_kappa_t_sweep.conf", 20},
      {"vg_kappa_k_sweep.conf", 29}, {"vg_nikkei_k_sweep.conf", 11}, {"vg_nikkei_t_sweep.conf", 20}};
  for (const auto& [name, rows] : cases) {
    const auto r = run_cli({"curve", "-c", config(name)});
    ASSERT_EQ(r.code, kExitOk) << name << ": " << r.err;
    EXPECT_EQ(line_count(r.out), rows + 1) << name;
    EXPECT_EQ(r.out.substr(0, r.out.find('\n')),
              "model,t,tau,spot,strike,moneyness,alpha,n,eta,trunc_bound,mode,i1,i2,lrm");
  }
}

TEST(Curve, UnenforcedTailCellsAreWarnedAbout) {
  const auto r = run_cli({"curve", "-c", config("vg_nikkei_t_sweep.conf")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  std::size_t warnings = 0;
  for (auto pos = r.err.find("warning:"); pos != std::string::npos;
       pos = r.err.find("warning:", pos + 1)) {
    ++warnings;
  }
  EXPECT_EQ(warnings, 6u);
  EXPECT_NE(r.err.find("K=14000: truncation bound"), std::string::npos);
  const auto strict =
      run_cli({"curve", "-c", config("vg_nikkei_t_sweep.conf"), "-s", "fft.enforce_tail=true"});
  EXPECT_EQ(strict.code, kExitFailure);
  EXPECT_EQ(run_cli({"curve", "-c", config("vg_nikkei_t_sweep.conf"), "-s", "fft.enforce_tail=no"})
                .code,
            kExitUsage);
}

TEST(Curve, MertonRowContents) {
  const auto r = run_cli({"curve", "-c", config("merton_t_sweep.conf"), "-m", "direct-sum"});
  ASSERT_EQ(r.code, kExitOk);
  std::istringstream in(r.out);
  std::string header, row;
  std::getline(in, header);
  for (int i = 0; i <= 10; ++i) std::getline(in, row);  // t = 0.5
  const auto cells = split(row, ',');
  ASSERT_EQ(cells.size(), 14u);
  EXPECT_EQ(cells[0], "merton");
  EXPECT_EQ(cells[1], "0.5");
  EXPECT_EQ(cells[10], "direct-sum");
  EXPECT_NEAR(std::stod(cells[11]), 0.462934364267256, 1e-11);
  EXPECT_NEAR(std::stod(cells[13]), 0.930690669423770, 1e-10);
}

TEST(Curve, VgRowsLeaveI1Empty) {
  const auto r = run_cli({"curve", "-c", config("vg_kappa_t_sweep.conf"), "-s", "query.t=0.5"});
  ASSERT_EQ(r.code, kExitOk);
  const auto row = r.out.substr(r.out.find('\n') + 1);
  const auto cells = split(row.substr(0, row.find('\n')), ',');
  ASSERT_EQ(cells.size(), 14u);
  EXPECT_EQ(cells[0], "vg");
  EXPECT_TRUE(cells[11].empty());
}

TEST(Curve, OutputIsByteStableAcrossRunsAndWorkerCounts) {
  const auto a = run_cli({"curve", "-c", config("merton_k_sweep.conf")});
  const auto b = run_cli({"curve", "-c", config("merton_k_sweep.conf")});
  EXPECT_EQ(a.out, b.out);
  ::setenv("LRM_WORKERS", "1", 1);
  const auto c = run_cli({"curve", "-c", config("vg_kappa_t_sweep.conf")});
  ::setenv("LRM_WORKERS", "8", 1);
  const auto d = run_cli({"curve", "-c", config("vg_kappa_t_sweep.conf")});
  ::unsetenv("LRM_WORKERS");
  EXPECT_EQ(c.out, d.out);
}

TEST(Curve, WritesToFile) {
  const auto path = std::filesystem::temp_directory_path() / "levy_lrm_curve_test.csv";
  const auto r = run_cli({"curve", "-c", config("vg_nikkei_k_sweep.conf"), "-o", path.string()});
  ASSERT_EQ(r.code, kExitOk);
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(path);
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  EXPECT_EQ(line_count(text), 12u);
  std::filesystem::remove(path);
}

TEST(Impact, MertonJumpSizes) {
  for (const char* mode : {"auto", "direct-sum"}) {
    const auto r = run_cli({"impact", "-c", config("merton_impact.conf"), "-m", mode});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_EQ(line_count(r.out), 5u);
    std::istringstream in(r.out);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "y,moneyness_before,moneyness_after,lrm_before,lrm_after,impact");
    const double tol = std::string(mode) == "auto" ? 1e-5 : 1e-10;
    while (std::getline(in, line)) {
      const auto cells = split(line, ',');
      ASSERT_EQ(cells.size(), 6u);
      const double y = std::stod(cells[0]);
      EXPECT_NEAR(std::stod(cells[3]), 0.930690669423770, tol) << mode;
      EXPECT_EQ(std::stod(cells[5]) > 0.0, y > 0.0);
    }
  }
}

TEST(Impact, RejectsBadRequests) {
  EXPECT_EQ(run_cli({"impact", "-c", config("merton_impact.conf"), "-y", "0"}).code, kExitUsage);
  EXPECT_EQ(run_cli({"impact", "-c", config("merton_t_sweep.conf")}).code, kExitUsage);
  EXPECT_EQ(run_cli({"impact", "-c", config("merton_impact.conf"), "-s", "query.strike=1,2"}).code,
            kExitUsage);
}
