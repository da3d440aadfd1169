#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "cli.hpp"
#include "common.hpp"
#include "morselab/io.hpp"

using namespace morselab;
using namespace morselab::testing;

namespace {

TEST(Io, SpaceAndPointRoundTrip) {
  for (const auto* s : {&lattice(), &tree(), &euclidean()}) {
    const auto back = space_from_json(to_json(*s));
    EXPECT_EQ(back.key(), s->key());
  }
  for (const auto& p : {ModelPoint::plane(1.5, -2), ModelPoint::ray(3, -4, 0.25), ModelPoint::edge(1, 2, 0.5)})
    EXPECT_EQ(point_from_json(to_json(p)), p);
  EXPECT_EQ(boundary_from_json(to_json(BoundaryPoint{-7, 9})), (BoundaryPoint{-7, 9}));
}

TEST(Io, RejectsMalformedJson) {
  EXPECT_THROW(space_from_json(nlohmann::json{{"kind", "torus"}}), InvalidInput);
  EXPECT_THROW(point_from_json(nlohmann::json{{"chart", "plane"}}), InvalidInput);
  EXPECT_THROW(boundary_from_json(nlohmann::json::array({1})), InvalidInput);
  EXPECT_THROW(load_json_arg("{not json"), InvalidInput);
}

TEST(Io, GeodesicSpecGrammar) {
  const auto [a, b] = parse_geodesic_spec("r[0,0]:r[3,4]");
  EXPECT_EQ(std::get<BoundaryPoint>(a), (BoundaryPoint{0, 0}));
  EXPECT_EQ(std::get<BoundaryPoint>(b), (BoundaryPoint{3, 4}));
  const auto [c, d] = parse_geodesic_spec(" p(1.5,-2) : ray(1,2,3.5)");
  EXPECT_EQ(std::get<ModelPoint>(c), ModelPoint::plane(1.5, -2));
  EXPECT_EQ(std::get<ModelPoint>(d), ModelPoint::ray(1, 2, 3.5));
  const auto [e, f] = parse_geodesic_spec("r[12]:e(1,2,0.5)");
  EXPECT_EQ(std::get<BoundaryPoint>(e), (BoundaryPoint{12, 0}));
  EXPECT_EQ(std::get<ModelPoint>(f), ModelPoint::edge(1, 2, 0.5));
  EXPECT_EQ(to_spec(Endpoint{ModelPoint::plane(1.5, -2)}), "p(1.5,-2)");
}

TEST(Io, GeodesicSpecErrorsCarryAPosition) {
  try {
    parse_geodesic_spec("r[0,0]:q[1,1]");
    FAIL();
  } catch (const InvalidInput& e) {
    EXPECT_NE(std::string(e.what()).find("position 7"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_geodesic_spec("r[0,0]"), InvalidInput);
  EXPECT_THROW(parse_geodesic_spec("r[0,0]:r[1,1]x"), InvalidInput);
}

TEST(Io, FormatDoubleRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456789.25}) EXPECT_EQ(std::stod(format_double(v)), v);
  EXPECT_EQ(format_double(1.0), "1");
  EXPECT_EQ(format_double(-std::numeric_limits<double>::infinity()), "-inf");
}

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

TEST(Cli, ReproExampleRows) {
  const auto r = run({"repro-example", "--n-max", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  std::string header, row1, row2, row3;
  std::getline(in, header), std::getline(in, row1), std::getline(in, row2), std::getline(in, row3);
  EXPECT_EQ(header, "n,D_alpha,D_f_alpha,cr_before,cr_after");
  EXPECT_EQ(row1, "1,1," + format_double(std::sqrt(5.0)) + ",1," + format_double(std::sqrt(5.0)));
  EXPECT_EQ(row3.substr(0, 4), "3,1,");
  EXPECT_NEAR(std::stod(row3.substr(4)), std::sqrt(37.0), 1e-12);
}

TEST(Cli, ReproExampleRejectsZero) { EXPECT_EQ(run({"repro-example", "--n-max", "0"}).code, 2); }

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"bogus"}).code, 2);
  EXPECT_EQ(run({"probe", "--kind", "nope"}).code, 2);
  EXPECT_EQ(run({"repro-example", "--format", "svg"}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, ContractingExact) {
  const auto r = run({"contracting", "r[0,0]:r[3,4]"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["D"].get<double>(), 5.0);
  EXPECT_EQ(j["mode"], "exact");
  EXPECT_TRUE(j.contains("witness"));
}

TEST(Cli, ContractingSampledOnTree) {
  const auto r = run({"contracting", "--space", R"({"kind":"metric_tree","edges":[[0,1,1],[1,2,1],[1,3,2]]})",
                      "--mode", "sampled", "--samples", "300", "--seed", "4", "r[0]:r[3]"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_LE(j["D"].get<double>(), kGeomEps);
  EXPECT_EQ(j["seed"].get<int>(), 4);
}

TEST(Cli, ContractingMalformedSpec) {
  const auto r = run({"contracting", "r[0,0]:r[3,"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("position"), std::string::npos);
}

TEST(Cli, ProbeVerdicts) {
  const auto swap = run({"probe", "--kind", "two_stable", "--map", "paper_swap", "--D", "2"});
  ASSERT_EQ(swap.code, 0) << swap.err;
  EXPECT_NE(swap.err.find("verdict: violation"), std::string::npos);
  EXPECT_EQ(swap.out.substr(0, swap.out.find('\n')), "window,a_m,a_n,b_m,b_n,constant_in,constant_out");

  const auto id = run({"probe", "--kind", "quasi_mobius", "--samples", "500"});
  ASSERT_EQ(id.code, 0) << id.err;
  EXPECT_NE(id.err.find("verdict: envelope = identity"), std::string::npos);

  const auto tr = run({"probe", "--kind", "quasi_mobius", "--samples", "500", "--map",
                       R"({"kind":"translation","dx":2,"dy":1})"});
  ASSERT_EQ(tr.code, 0) << tr.err;
  const auto at = tr.err.find("envelope slope <= ");
  ASSERT_NE(at, std::string::npos);
  EXPECT_LE(std::stod(tr.err.substr(at + 18)), 1.0 + 1e-9);
}

TEST(Cli, ExtendRefusesNonTwoStableMaps) {
  const auto r = run({"extend", "--map", "paper_swap"});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("not 2-stable"), std::string::npos);
}

TEST(Cli, EkRejectsTrianglesOutsideTheStratum) {
  EXPECT_EQ(run({"ek", "r[0,0]:r[5,0]:r[0,1]", "--D", "1.5"}).code, 3);
  EXPECT_EQ(run({"ek", "r[0,0]:p(1,1):r[0,1]", "--D", "1.5"}).code, 2);
}

TEST(Cli, OutputsAreByteIdenticalAcrossRuns) {
  const auto dir = std::filesystem::temp_directory_path() / "morselab_cli_test";
  std::filesystem::create_directories(dir);
  const std::vector<std::vector<std::string>> commands{
      {"repro-example", "--format", "json"},
      {"contracting", "--mode", "sampled", "--samples", "500", "r[0,0]:r[2,1]"},
      {"probe", "--kind", "two_stable", "--map", "paper_swap", "--samples", "800"},
      {"probe", "--kind", "quasi_mobius", "--map", "paper_swap", "--samples", "400"},
      {"extend", "--D", "1.5", "--window", "2", "--grid", "4", "--samples", "40"},
      {"ek", "r[0,0]:r[1,0]:r[0,1]", "--D", "1.5"},
  };
  for (const auto& cmd : commands) {
    std::string first;
    for (int rep = 0; rep < 2; ++rep) {
      auto args = cmd;
      const auto path = dir / ("out" + std::to_string(rep));
      args.insert(args.end(), {"--out", path.string()});
      const auto r = run(args);
      ASSERT_EQ(r.code, 0) << cmd[0] << ": " << r.err;
      const auto text = slurp(path);
      ASSERT_FALSE(text.empty());
      if (rep == 0) first = text;
      else EXPECT_EQ(std::hash<std::string>{}(text), std::hash<std::string>{}(first)) << cmd[0];
    }
  }
  std::filesystem::remove_all(dir);
}

TEST(Cli, PlotArrowsAndCloud) {
  const auto ext = run({"extend", "--D", "1.5", "--window", "2", "--grid", "3", "--samples", "20"});
  ASSERT_EQ(ext.code, 0) << ext.err;
  const auto svg = cli::render_svg(ext.out, "arrows");
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("marker-end"), std::string::npos);

  const auto ek = run({"ek", "r[0,0]:r[1,0]:r[0,1]", "--D", "1.5"});
  ASSERT_EQ(ek.code, 0) << ek.err;
  const auto cloud = cli::render_svg(ek.out, "cloud");
  EXPECT_NE(cloud.find("<circle"), std::string::npos);
  EXPECT_EQ(cli::render_svg(ek.out, "cloud"), cloud);
}

TEST(Cli, PlotErrors) {
  EXPECT_THROW(cli::render_svg("x_chart,x_coords\nplane,0;0\n", "arrows"), InvalidInput);
  EXPECT_THROW(cli::render_svg("role,x_chart,x_coords\n", "hexbin"), InvalidInput);
  EXPECT_EQ(run({"plot", "/nonexistent/file.csv"}).code, 2);
}

}  // namespace
