#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dircrawl/cli.hpp"

using namespace dircrawl;
using namespace dircrawl::cli;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "dircrawl");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("dircrawl_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                        "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) {
    const auto p = dir_ / name;
    std::ofstream(p) << text;
    return p.string();
  }

  fs::path dir_;
};

const char* kBreather = R"({
  "schema": "dircrawl/1",
  "substrate": {"tau_minus": 0.75, "tau_plus": 0.25},
  "gait": {"kind": "breather", "L": 1, "delta": 1, "T": 1}
})";

double last_x1(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, last;
  while (std::getline(in, line)) {
    if (!line.empty()) last = line;
  }
  std::istringstream row(last);
  std::string t, x1;
  std::getline(row, t, ',');
  std::getline(row, x1, ',');
  return std::stod(x1);
}

}  // namespace

TEST_F(CliTest, SimulateBreather) {
  const auto cfg = write("b.json", kBreather);
  const auto r = run_cli({"simulate", "--config", cfg});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.substr(0, 17), "t,x1,x2,l,regime\n");
  EXPECT_EQ(r.out.find('\r'), std::string::npos);
  EXPECT_NEAR(last_x1(r.out), 0.5, 1e-6);

  const auto three = run_cli({"simulate", "--config", cfg, "--periods", "3"});
  ASSERT_EQ(three.code, 0);
  EXPECT_NEAR(last_x1(three.out), 1.5, 3e-6);
}

TEST_F(CliTest, OutputIsByteStable) {
  const auto cfg = write("b.json", kBreather);
  const auto out1 = (dir_ / "a.csv").string();
  const auto out2 = (dir_ / "b.csv").string();
  ASSERT_EQ(run_cli({"simulate", "-c", cfg, "-o", out1}).code, 0);
  ASSERT_EQ(run_cli({"simulate", "-c", cfg, "-o", out2}).code, 0);
  std::ifstream a(out1), b(out2);
  std::stringstream sa, sb;
  sa << a.rdbuf();
  sb << b.rdbuf();
  EXPECT_FALSE(sa.str().empty());
  EXPECT_EQ(sa.str(), sb.str());
}

TEST_F(CliTest, NegativeTauIsConfigError) {
  const auto cfg = write("bad.json", R"({
  "schema": "dircrawl/1",
  "substrate": {"tau_minus": -1, "tau_plus": 0.25},
  "gait": {"kind": "breather", "L": 1, "delta": 1, "T": 1}
})");
  const auto r = run_cli({"simulate", "--config", cfg});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("substrate.tau_minus"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("line 3"), std::string::npos) << r.err;
}

TEST_F(CliTest, UnknownKeysAndSchema) {
  auto r = run_cli({"analytic", "-c", write("u.json", R"({"schema":"dircrawl/1","substrate":{"tau_minus":1,"tau_plus":1,"tau":2},
    "gait":{"kind":"breather","L":1,"delta":1,"T":1}})")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("substrate.tau"), std::string::npos);

  r = run_cli({"analytic", "-c", write("s.json", R"({"schema":"dircrawl/0","substrate":{"tau_minus":1},
    "gait":{"kind":"breather","L":1,"delta":1,"T":1}})")});
  EXPECT_EQ(r.code, 2);

  r = run_cli({"analytic", "-c", write("m.json", "{ not json")});
  EXPECT_EQ(r.code, 2);
  r = run_cli({"analytic", "-c", (dir_ / "missing.json").string()});
  EXPECT_EQ(r.code, 2);
  r = run_cli({"bogus"});
  EXPECT_EQ(r.code, 2);
}

TEST_F(CliTest, AnalyticReports) {
  auto r = run_cli({"analytic", "-c", write("w.json", R"({"schema":"dircrawl/1","substrate":{"mu_minus":1,"mu_plus":1},
    "gait":{"kind":"square_wave","L":1,"delta":0.2,"epsilon":0.5,"c":1,"regime":"stick_slip"}})")});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["regime"], "infeasible");
  EXPECT_EQ(j["reason"], "tau_plus=0");

  r = run_cli({"analytic", "-c", write("s.json", R"({"schema":"dircrawl/1","substrate":{"tau_minus":1,"tau_plus":1},
    "gait":{"kind":"composite_stride","lambda":0.1,"delta":1,"h":2}})")});
  ASSERT_EQ(r.code, 0) << r.err;
  j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["net_displacement"].get<double>(), -0.5, 1e-14);
  EXPECT_TRUE(j["reversal"]["negative_feasible"].get<bool>());

  r = run_cli({"analytic", "-c", write("y.json", R"({"schema":"dircrawl/1","substrate":{"tau_minus":1,"tau_plus":1},
    "gait":{"kind":"breather","L":1,"delta":0.4,"T":1}})")});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(nlohmann::json::parse(r.out)["net_displacement"].get<double>(), 0.0);

  r = run_cli({"analytic", "-c", write("x.json", R"({"schema":"dircrawl/1","substrate":{"tau_minus":1,"tau_plus":1,"mu_plus":1},
    "gait":{"kind":"composite_stride","lambda":0.1,"delta":1,"h":2}})")});
  EXPECT_EQ(r.code, 1);
}

TEST_F(CliTest, VerifyExitCodes) {
  const auto cfg = write("b.json", kBreather);
  auto r = run_cli({"verify", "-c", cfg});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(nlohmann::json::parse(r.out)["pass"].get<bool>());

  r = run_cli({"verify", "-c", cfg, "--dt", "0.25", "--tolerance", "1e-12"});
  EXPECT_EQ(r.code, 1);
  EXPECT_FALSE(nlohmann::json::parse(r.out)["pass"].get<bool>());
}

TEST_F(CliTest, SweepCsv) {
  const auto cfg = write("sw.json", R"({"schema":"dircrawl/1","substrate":{"tau_minus":1,"tau_plus":1},
    "gait":{"kind":"breather","L":1,"delta":1,"T":1},
    "numeric":{"dt":0.01},
    "sweep":{"axes":[{"field":"alpha","values":[0.6,0.7]},{"field":"delta","start":0.5,"stop":1,"count":2}]}})");
  const auto r = run_cli({"sweep", "-c", cfg, "-j", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "alpha,delta,net_displacement,analytic,abs_residual,regimes,error");
  int rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  EXPECT_EQ(rows, 4);
  EXPECT_EQ(run_cli({"sweep", "-c", cfg, "-j", "1"}).out, r.out);

  const auto none = write("n.json", kBreather);
  EXPECT_EQ(run_cli({"sweep", "-c", none}).code, 2);
}

TEST_F(CliTest, Figures) {
  auto r = run_cli({"figure", "fig6"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "alpha,epsilon,value");
  std::set<std::string> curves;
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) curves.insert(line.substr(0, line.find(',')));
  EXPECT_EQ(curves, (std::set<std::string>{"0.25", "0.5", "0.75"}));

  r = run_cli({"figure", "fig7"});
  ASSERT_EQ(r.code, 0);
  curves.clear();
  std::istringstream in7(r.out);
  std::getline(in7, line);
  EXPECT_EQ(line, "beta_squared,epsilon,value");
  while (std::getline(in7, line)) curves.insert(line.substr(0, line.find(',')));
  EXPECT_EQ(curves.size(), 5u);

  r = run_cli({"figure", "fig6", "--params", "0.6", "--epsilons", "0.1,0.2"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 3);
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "alpha,epsilon,value");

  EXPECT_EQ(run_cli({"figure", "fig7", "--epsilons", "1.5"}).code, 2);
  EXPECT_EQ(run_cli({"figure", "fig9"}).code, 2);
}

TEST(Config, RoundTrip) {
  const std::vector<std::string> docs{
      kBreather,
      R"({"schema":"dircrawl/1","substrate":{"tau_minus":0.1,"tau_plus":0.2,"mu_minus":0.3,"mu_plus":0.4},
          "gait":{"kind":"constant_length","L":2,"Xstar":0.8,"delta":0.3,"T":3,"profile":"triangle","rise_fraction":0.3},
          "numeric":{"dt":0.001,"periods":4,"tolerance":1e-7},"output":{"format":"json","path":"x.json","precision":12},
          "sweep":{"axes":[{"field":"T","values":[1,2]}]}})",
      R"({"schema":"dircrawl/1","substrate":{"mu_minus":1,"mu_plus":2},
          "gait":{"kind":"square_wave","L":1,"delta":0.1,"epsilon":-0.3,"c":2,"regime":"sliding"}})",
      R"({"schema":"dircrawl/1","substrate":{"tau_minus":1},
          "gait":{"kind":"two_segment_path","L":1,"Xstar":0.5,"T":2,"vertices":[[0.5,0.5],[0.6,0.4],[0.7,0.7]]}})",
      R"({"schema":"dircrawl/1","substrate":{"tau_minus":1,"tau_plus":0.1},
          "gait":{"kind":"composite_stride","lambda":0.5,"delta":0.25,"h":3,"T":2}})"};
  for (const auto& d : docs) {
    const auto a = parse_config_text(d);
    const auto text = to_json(a).dump(2);
    const auto b = parse_config_text(text);
    EXPECT_TRUE(a == b) << text;
    EXPECT_EQ(to_json(b).dump(), to_json(a).dump());
  }
}

TEST(Config, FieldErrors) {
  auto message = [](const std::string& text) {
    try {
      parse_config_text(text);
    } catch (const ConfigError& e) {
      return e.path();
    }
    return std::string("<none>");
  };
  EXPECT_EQ(message(R"({"schema":"dircrawl/1","substrate":{"tau_minus":1},"gait":{"kind":"breather","L":1,"delta":1}})"), "gait.T");
  EXPECT_EQ(message(R"({"schema":"dircrawl/1","substrate":{},"gait":{"kind":"breather","L":1,"delta":1,"T":1}})"), "substrate");
  EXPECT_EQ(message(R"({"schema":"dircrawl/1","substrate":{"tau_minus":1},"gait":{"kind":"square_wave","L":1,"delta":2,"epsilon":1}})"), "gait.delta");
  EXPECT_EQ(message(R"({"schema":"dircrawl/1","substrate":{"tau_minus":1},"gait":{"kind":"composite_stride","lambda":1,"delta":1,"h":1}})"), "gait.h");
  EXPECT_EQ(message(R"({"schema":"dircrawl/1","substrate":{"tau_minus":1},"gait":{"kind":"breather","L":1,"delta":1,"T":1},"numeric":{"periods":0}})"), "numeric.periods");
  EXPECT_EQ(message(R"({"schema":"dircrawl/1","substrate":{"tau_minus":1},"gait":{"kind":"breather","L":1,"delta":1,"T":1},"output":{"format":"xml"}})"), "output.format");
  EXPECT_EQ(message(R"({"schema":"dircrawl/1","substrate":{"tau_minus":1},"gait":{"kind":"breather","L":1,"delta":1,"T":1},"sweep":{"axes":[{"field":"zeta","values":[1]}]}})"), "sweep.axes[0].field");
}

TEST(Format, Numbers) {
  EXPECT_EQ(format_number(0.1, 17), "0.10000000000000001");
  EXPECT_EQ(format_number(-0.0, 17), "0");
  EXPECT_EQ(format_number(1.5, 3), "1.5");
}
