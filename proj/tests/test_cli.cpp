#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "cli_runner.hpp"

namespace fs = std::filesystem;
using cli::Workdir;

namespace {

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST(Cli, ValidateExitCodes) {
  Workdir w("validate");
  EXPECT_EQ(w.run("validate --config " + w.eq6() + " --out " + w.out()), 0);
  EXPECT_NE(w.stdout_text().find("PASS"), std::string::npos);
  const auto bad = w.write("collinear.json",
                           R"({"format":"billiard-config/1","disks":[)"
                           R"({"center":[0,0],"radius":1},{"center":[4,0],"radius":1},)"
                           R"({"center":[8,0],"radius":1}]})");
  EXPECT_EQ(w.run("validate --config " + bad + " --out " + w.out()), 2);
  EXPECT_NE(w.stdout_text().find("FAIL"), std::string::npos);
  EXPECT_EQ(w.run("validate --config " + w.dir() + "/missing.json --out " + w.out()), 1);
  EXPECT_EQ(w.run("validate --config " + w.write("junk.json", "{not json") + " --out " + w.out()),
            1);
}

TEST(Cli, OrbitsAndCache) {
  Workdir w("orbits");
  EXPECT_EQ(w.run("orbits --nmax 2 --config " + w.eq6() + " --out " + w.out()), 0);
  EXPECT_EQ(read_csv(w.out() + "/orbits.csv").size(), 1u + 3u);
  EXPECT_EQ(w.run("orbits --nmax 6 --config " + w.eq6() + " --out " + w.out()), 0);
  // 3 + 2 + 3 + 6 + 9 classes of lengths 2..6
  EXPECT_EQ(read_csv(w.out() + "/orbits.csv").size(), 1u + 23u);
  EXPECT_EQ(w.run("orbits --nmax 4 --config " + w.eq6() + " --out " + w.out()), 0);
  EXPECT_NE(w.stdout_text().find("cache hit"), std::string::npos);
  EXPECT_EQ(read_csv(w.out() + "/orbits.csv").size(), 1u + 8u);

  const auto other = w.write("other.json",
                             R"({"format":"billiard-config/1","disks":[)"
                             R"({"center":[3.4641016151377544,0],"radius":1.1},)"
                             R"({"center":[-1.7320508075688772,3],"radius":1},)"
                             R"({"center":[-1.7320508075688772,-3],"radius":1}]})");
  EXPECT_EQ(w.run("orbits --nmax 4 --config " + other + " --out " + w.out()), 1);
  EXPECT_NE(w.stderr_text().find("error"), std::string::npos);
}

TEST(Cli, AbscissasOrdering) {
  Workdir w("abscissas");
  ASSERT_EQ(w.run("orbits --nmax 10 --config " + w.eq6() + " --out " + w.out()), 0);
  ASSERT_EQ(w.run("abscissas --nmax 10 --memory 4 --period 8 --config " + w.eq6() + " --out " +
                  w.out()),
            0);
  std::ifstream in(w.out() + "/abscissas.json");
  const auto j = nlohmann::json::parse(in);
  const double h = j.at("h"), a1 = j.at("a1"), b1 = j.at("b1");
  EXPECT_GT(h, a1);
  EXPECT_GT(a1, b1);
  EXPECT_LT(b1, 0.0);
  EXPECT_GT(h, 0.0);
  const auto scan = read_csv(w.out() + "/pressure_scan.csv");
  ASSERT_GT(scan.size(), 1u);
  EXPECT_EQ(scan[0][0], "beta");
}

TEST(Cli, PolesConjugateSymmetric) {
  Workdir w("poles");
  ASSERT_EQ(w.run("orbits --nmax 12 --config " + w.eq6() + " --out " + w.out()), 0);
  ASSERT_EQ(w.run("poles --im-max 4 --ny 9 --config " + w.eq6() +
                  " --out " + w.out()),
            0);
  const auto rows = read_csv(w.out() + "/poles.csv");
  ASSERT_GT(rows.size(), 1u);
  std::vector<std::pair<double, double>> z;
  for (std::size_t i = 1; i < rows.size(); ++i) z.emplace_back(std::stod(rows[i][0]), std::stod(rows[i][1]));
  for (const auto& [x, y] : z) {
    double nearest = 1e9;
    for (const auto& [u, v] : z) nearest = std::min(nearest, std::hypot(u - x, v + y));
    EXPECT_LT(nearest, 1e-8);
  }
  // Below the trust floor of the determinant.
  EXPECT_EQ(w.run("poles --re-min -2 --config " + w.eq6() + " --out " + w.out()), 3);
}

TEST(Cli, CountingStartsAtTwoBounce) {
  Workdir w("counting");
  ASSERT_EQ(w.run("orbits --nmax 8 --config " + w.eq6() + " --out " + w.out()), 0);
  ASSERT_EQ(w.run("counting --nmax 8 --memory 4 --config " + w.eq6() + " --out " + w.out()), 0);
  const auto rows = read_csv(w.out() + "/counting.csv");
  ASSERT_GT(rows.size(), 2u);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double x = std::stod(rows[i][0]);
    const long long n = std::stoll(rows[i][1]);
    if (x < 8.0 - 1e-9) EXPECT_EQ(n, 0);
    else if (x < 12.5) EXPECT_EQ(n, 3);
  }
}

TEST(Cli, ManifestListsOutputs) {
  Workdir w("manifest");
  ASSERT_EQ(w.run("orbits --nmax 8 --config " + w.eq6() + " --out " + w.out()), 0);
  ASSERT_EQ(w.run("zeta --nmax 8 --memory 4 --config " + w.eq6() + " --out " + w.out()), 0);
  std::ifstream in(w.out() + "/run_manifest_zeta.json");
  const auto j = nlohmann::json::parse(in);
  EXPECT_EQ(j.at("subcommand"), "zeta");
  EXPECT_EQ(j.at("tool_version"), "1.0.0");
  EXPECT_FALSE(j.at("config_hash").get<std::string>().empty());
  for (const auto& f : j.at("outputs")) {
    EXPECT_TRUE(fs::exists(fs::path(w.out()) / f.get<std::string>()) ||
                fs::exists(f.get<std::string>()))
        << f;
  }
  for (const char* f : {"zeta_shells.csv", "zeta_abscissas.csv", "zeta_signed.csv"}) {
    bool listed = false;
    for (const auto& g : j.at("outputs")) listed = listed || g.get<std::string>().find(f) != std::string::npos;
    EXPECT_TRUE(listed) << f;
  }
}

TEST(Cli, BadUsage) {
  Workdir w("usage");
  EXPECT_EQ(w.run(""), 1);
  EXPECT_EQ(w.run("nonsense"), 1);
  EXPECT_EQ(w.run("orbits --out " + w.out()), 1);
  EXPECT_EQ(w.run("orbits --jobs 0 --config " + w.eq6()), 1);
  EXPECT_EQ(w.run("zeta --config " + w.eq6() + " --out " + w.out()), 1);
}
