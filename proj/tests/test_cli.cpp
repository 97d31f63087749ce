#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include <gtest/gtest.h>

namespace fs = std::filesystem;

namespace {

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

fs::path scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("radpml_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run(const std::string& args) {
  const std::string cmd = std::string(RADPML_CLI_PATH) + " " + args + " 2>" + (scratch() / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Csv read_csv(const fs::path& p) {
  std::ifstream f(p);
  Csv out;
  std::string line;
  EXPECT_TRUE(static_cast<bool>(std::getline(f, line)));
  std::stringstream hs(line);
  for (std::string c; std::getline(hs, c, ',');) out.header.push_back(c);
  while (std::getline(f, line)) {
    std::stringstream ls(line);
    std::vector<double> row;
    for (std::string c; std::getline(ls, c, ',');) row.push_back(std::strtod(c.c_str(), nullptr));
    EXPECT_EQ(row.size(), out.header.size()) << line;
    out.rows.push_back(row);
  }
  return out;
}

std::string out(const std::string& name) { return (scratch() / name).string(); }

}  // namespace

TEST(Cli, StabilityMapIsotropicIsAllStable) {
  ASSERT_EQ(run("stability-map --set grid.n=41 --out " + out("iso.csv")), 0);
  const Csv c = read_csv(out("iso.csv"));
  EXPECT_EQ(c.header, (std::vector<std::string>{"y1", "y2", "verdict", "witness_angle"}));
  ASSERT_GT(c.rows.size(), 1000u);
  for (const auto& r : c.rows) {
    EXPECT_EQ(r[2], 0.0);
    EXPECT_LT(std::hypot(r[0], r[1]), 1.0);
  }
}

TEST(Cli, StabilityMapQuarterMaterial) {
  // B = diag(1, 1/4) is A = diag(1, 4)
  ASSERT_EQ(run("stability-map --set aniso.a22=4 --set grid.n=51 --threads 2 --out " + out("quarter.csv")), 0);
  const Csv c = read_csv(out("quarter.csv"));
  int unstable = 0;
  for (const auto& r : c.rows) {
    if (r[2] == 1.0) {
      ++unstable;
      EXPECT_TRUE(std::isfinite(r[3]));
    }
    if (std::hypot(r[0], r[1]) < 1.0 / 1.25) EXPECT_EQ(r[2], 0.0) << r[0] << " " << r[1];
  }
  EXPECT_GT(unstable, 0);
  EXPECT_LT(unstable, static_cast<int>(c.rows.size()));
}

TEST(Cli, ByteIdenticalAcrossRuns) {
  for (const std::string cmd : {"stability-map --set aniso.a22=4 --set aniso.a12=0.5 --set grid.n=31",
                                "cq-error --set time.T=4 --set output.every=0.25", "slowness --set aniso.a11=3",
                                "spectrum --set mesh.h=0.25 --set basis.N=3"}) {
    ASSERT_EQ(run(cmd + " --out " + out("a.csv")), 0) << cmd;
    ASSERT_EQ(run(cmd + " --threads 3 --out " + out("b.csv")), 0) << cmd;
    EXPECT_EQ(slurp(out("a.csv")), slurp(out("b.csv"))) << cmd;
    EXPECT_FALSE(slurp(out("a.csv")).empty());
  }
}

TEST(Cli, SweepIsThreadIndependent) {
  ASSERT_EQ(run("sweep-sigma --set sweep.sigmas=1,10,100,1000 --out " + out("s1.csv")), 0);
  ASSERT_EQ(run("sweep-sigma --set sweep.sigmas=1,10,100,1000 --threads 4 --out " + out("s4.csv")), 0);
  EXPECT_EQ(slurp(out("s1.csv")), slurp(out("s4.csv")));
  const Csv c = read_csv(out("s1.csv"));
  ASSERT_EQ(c.rows.size(), 4u);
  EXPECT_LT(c.rows[3][1], 2.0 * c.rows[2][1]);
}

TEST(Cli, CsvUsesRoundTripPrecision) {
  ASSERT_EQ(run("slowness --set grid.n=7 --set aniso.a11=3 --out " + out("p.csv")), 0);
  const std::string text = slurp(out("p.csv"));
  EXPECT_EQ(text.substr(0, text.find('\n')), "angle,p1,p2");
  const std::string first = text.substr(text.find('\n') + 1);
  const std::string p1 = first.substr(first.find(',') + 1, first.find(',', first.find(',') + 1) - first.find(',') - 1);
  EXPECT_EQ(p1.size(), 19u) << p1;
  char buf[40];
  const double v = std::strtod(p1.c_str(), nullptr);
  std::snprintf(buf, sizeof buf, "%.17g", v);
  EXPECT_EQ(std::string(buf), p1);
  EXPECT_NEAR(v, 1.0 / std::sqrt(3.0), 1e-15);
}

TEST(Cli, HardyCheckOnePole) {
  ASSERT_EQ(run("hardy-check --set basis.N=21 --out " + out("h.csv")), 0);
  const Csv c = read_csv(out("h.csv"));
  ASSERT_EQ(c.rows.size(), 22u);
  for (const auto& r : c.rows)
    for (std::size_t j = 1; j < r.size(); ++j) EXPECT_LE(r[j], 1e-10);
}

TEST(Cli, HardyCheckTwoPole) {
  ASSERT_EQ(run("hardy-check --set basis.kind=two-pole --set basis.N=6 --set basis.eta=0.5 --out " + out("h2.csv")),
            0);
  EXPECT_EQ(read_csv(out("h2.csv")).rows.size(), 7u);
}

TEST(Cli, SpectrumOfShiftedInfiniteElements) {
  ASSERT_EQ(run("spectrum --set mesh.h=0.1 --out " + out("sp.csv")), 0);
  const Csv c = read_csv(out("sp.csv"));
  ASSERT_FALSE(c.rows.empty());
  for (const auto& r : c.rows) EXPECT_LE(r[0], 1e-8);
}

TEST(Cli, RunWithoutDampingConservesEnergy) {
  ASSERT_EQ(run("run-1d --set pml.sigma_c=0 --set pml.gamma=0 --set exterior.kind=truncated "
                "--set signal.name=gaussian-pulse --set time.T=2 --set time.dt=0.01 --out " +
                out("e.csv")),
            0);
  const Csv c = read_csv(out("e.csv"));
  EXPECT_EQ(c.header, (std::vector<std::string>{"t", "energy", "interior_energy"}));
  ASSERT_EQ(c.rows.size(), 201u);
  const double e0 = c.rows[0][1];
  ASSERT_GT(e0, 0.0);
  for (const auto& r : c.rows) EXPECT_LE(std::abs(r[1] - e0), 1e-12 * e0);
}

TEST(Cli, RunWithReference) {
  ASSERT_EQ(run("run-1d --set geometry=halfline --set exterior.kind=truncated --set pml.R=0.2 --set pml.sigma_c=20 "
                "--set pml.gamma=20 --set mesh.h=0.01 --set time.dt=0.0025 --set time.T=2 "
                "--set reference.enabled=true --set output.stride=40 --out " +
                out("r.csv")),
            0);
  const Csv c = read_csv(out("r.csv"));
  ASSERT_EQ(c.header.back(), "interior_error");
  ASSERT_EQ(c.rows.size(), 21u);
  // before the first round trip through the layer the two runs agree up to discretization error
  for (const auto& r : c.rows)
    if (r[0] < 2.0 * 1.2 - 0.2) EXPECT_LE(r[3], 1e-4) << r[0];
}

TEST(Cli, ConfigFileAndOverrides) {
  {
    std::ofstream f(out("c.cfg"));
    f << "# quarter material\n"
         "aniso.a22 = 4   # B = diag(1, 1/4)\n"
         "\n"
         "grid.n = 17\n";
  }
  ASSERT_EQ(run("stability-map --config " + out("c.cfg") + " --out " + out("c1.csv")), 0);
  ASSERT_EQ(run("stability-map --set aniso.a22=4 --set grid.n=17 --out " + out("c2.csv")), 0);
  EXPECT_EQ(slurp(out("c1.csv")), slurp(out("c2.csv")));
  ASSERT_EQ(run("stability-map --config " + out("c.cfg") + " --set aniso.a22=1 --out " + out("c3.csv")), 0);
  for (const auto& r : read_csv(out("c3.csv")).rows) EXPECT_EQ(r[2], 0.0);
}

TEST(Cli, SvgOutput) {
  ASSERT_EQ(run("sweep-sigma --set sweep.sigmas=1,10 --svg --out " + out("plot.csv")), 0);
  const std::string svg = slurp(out("plot.svg"));
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("sigma_c"), std::string::npos);
  EXPECT_NE(svg.find("polyline"), std::string::npos);
  EXPECT_EQ(run("sweep-sigma --svg"), 2);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run(""), 2);
  EXPECT_EQ(run("no-such-command"), 2);
  EXPECT_EQ(run("spectrum --set no.such.key=1"), 2);
  EXPECT_EQ(run("spectrum --set mesh.k=three"), 2);
  EXPECT_EQ(run("spectrum --set exterior.kind=sponge"), 2);
  EXPECT_EQ(run("spectrum --set pml.R=-1"), 2);
  EXPECT_EQ(run("stability-map --set grid.n=8"), 2);
  EXPECT_EQ(run("stability-map --config " + out("missing.cfg")), 2);
  EXPECT_EQ(run("cq-error --set series.x=0.5"), 2);
  EXPECT_EQ(run("run-1d --set pml.sigma_c=1e300 --set time.T=0.01"), 3);
  EXPECT_NE(slurp(scratch() / "stderr.txt").find("NumericalFailure"), std::string::npos);
  EXPECT_EQ(run("--help > /dev/null"), 0);
}
