#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "ustat/config.hpp"
#include "ustat/errors.hpp"
#include "ustat/path_io.hpp"
#include "ustat/processes.hpp"

using namespace ust;

namespace {

std::string message_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(ConfigDocument, SectionsKeysAndComments) {
  const auto doc = config::Document::parse_string(
      "# leading comment\n"
      "[process]\n"
      "type = ar1   ; inline\n"
      "rho = 0.25 # also inline\n"
      "\n"
      "[process.low]\n"
      "; full line\n"
      "law = normal\n"
      "[kernel]\n"
      "boxes = -inf:0 | 0:inf\n");
  EXPECT_EQ(doc.section("process").get_string("type"), "ar1");
  EXPECT_EQ(doc.section("process").get_double("rho"), 0.25);
  EXPECT_EQ(doc.section("process.low").get_string("law"), "normal");
  EXPECT_EQ(doc.section("kernel").get_string("boxes"), "-inf:0 | 0:inf");
  EXPECT_FALSE(doc.has_section("experiment"));
}

TEST(ConfigDocument, TypedGetters) {
  const auto doc = config::Document::parse_string(
      "[a]\nx = 2e5\ny = 1.5, -2, inf\nz = 3, 4\nw = 1.5\nbad = 2x\n");
  const auto& a = doc.section("a");
  EXPECT_EQ(a.get_uint("x"), 200000u);
  EXPECT_EQ(a.get_doubles("y"), std::vector<double>({1.5, -2.0, INFINITY}));
  EXPECT_EQ(a.get_sizes("z"), std::vector<std::size_t>({3, 4}));
  EXPECT_EQ(a.get_uint("missing", 7), 7u);
  EXPECT_EQ(a.get_double("missing", 0.5), 0.5);
  try {
    (void)a.get_uint("w");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "a.w");
  }
  try {
    (void)a.get_double("bad");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "a.bad");
  }
  try {
    (void)a.get_string("missing");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "a.missing");
  }
}

TEST(ConfigDocument, Overrides) {
  auto doc = config::Document::parse_string("[process.low]\nmean = 1\n");
  doc.apply_override("process.low.mean=4");
  doc.apply_override(" experiment.seed = 11 ");
  EXPECT_EQ(doc.section("process.low").get_double("mean"), 4.0);
  EXPECT_EQ(doc.section("experiment").get_uint("seed"), 11u);
  EXPECT_THROW(doc.apply_override("seed"), ConfigError);
  EXPECT_THROW(doc.apply_override("seed=1"), ConfigError);
  EXPECT_THROW(doc.apply_override(".seed=1"), ConfigError);
}

TEST(ConfigDocument, SyntaxErrorsNameSourceAndLine) {
  const auto msg = message_of(
      [] { (void)config::Document::parse_string("[a]\nx = 1\n[broken\n", "exp.ini"); });
  EXPECT_NE(msg.find("exp.ini:3"), std::string::npos) << msg;
  EXPECT_THROW((void)config::Document::parse_string("x = 1\n"), ConfigError);
  EXPECT_THROW((void)config::Document::load("/nonexistent/file.ini"), ConfigError);
  EXPECT_THROW((void)config::Document::parse_string("[a]\nb = 1\n").section("c"), ConfigError);
}

TEST(ConfigHelpers, SplitAndTrim) {
  EXPECT_EQ(config::split_list(" a , b,c "), std::vector<std::string>({"a", "b", "c"}));
  EXPECT_TRUE(config::split_list("  ").empty());
  EXPECT_EQ(config::split_list("a|b", '|'), std::vector<std::string>({"a", "b"}));
  EXPECT_EQ(config::trim("\t x y \n"), "x y");
}

TEST(PathIo, RoundTripIsBitExact) {
  std::mt19937_64 gen(5);
  std::normal_distribution<double> z;
  std::vector<double> v(40);
  for (auto& x : v) x = z(gen) * std::pow(10.0, static_cast<double>(gen() % 30) - 15.0);
  v[3] = 0.1;
  v[4] = -0.0;
  const auto path = SamplePath::from_values(v, 42, "iid(normal)");
  std::stringstream buf;
  processes::write_path_csv(buf, path);
  const auto back = processes::read_path_csv(buf);
  ASSERT_EQ(back.size(), path.size());
  EXPECT_EQ(back.seed(), 42u);
  for (std::size_t i = 0; i < v.size(); ++i) {
    EXPECT_EQ(std::bit_cast<std::uint64_t>(back.point(i)[0]), std::bit_cast<std::uint64_t>(v[i]));
  }
}

TEST(PathIo, SimulatedPathsKeepMetadata) {
  const auto spec = processes::parse_process_spec(config::Document::parse_string(
      "[process]\ntype = mixture\nweights = 0.5, 0.5\ncomponents = a, b\n"
      "[process.a]\ntype = iid\nlaw = normal\n[process.b]\ntype = ar1\nrho = 0.5\n"));
  const auto path = processes::simulate(spec, 25, 3);
  std::stringstream buf;
  processes::write_path_csv(buf, path);
  EXPECT_NE(buf.str().find("# latent_component="), std::string::npos);
  const auto back = processes::read_path_csv(buf);
  EXPECT_EQ(back.latent_component(), path.latent_component());
  EXPECT_EQ(back.seed(), 3u);

  const auto paired = processes::simulate(
      processes::parse_process_spec(config::Document::parse_string(
          "[process]\ntype = paired\nx = a\ny = b\n"
          "[process.a]\ntype = iid\nlaw = normal\n[process.b]\ntype = iid\nlaw = uniform\n")),
      10, 1);
  std::stringstream pbuf;
  processes::write_path_csv(pbuf, paired);
  const auto pback = processes::read_path_csv(pbuf);
  EXPECT_EQ(pback.dim(), 2u);
  EXPECT_EQ(pback.pair_split(), 1u);
}

TEST(PathIo, MalformedInputNamesTheLine) {
  auto msg_for = [](const std::string& text) {
    return message_of([&] {
      std::istringstream in(text);
      (void)processes::read_path_csv(in, "p.csv");
    });
  };
  EXPECT_NE(msg_for("index,coord_0\n1,0.5\n2,abc\n").find("p.csv:3"), std::string::npos);
  EXPECT_NE(msg_for("index,coord_0\n1,0.5\n3,1\n").find("p.csv:3"), std::string::npos);
  EXPECT_NE(msg_for("index,coord_0\n1,0.5,2\n").find("p.csv:2"), std::string::npos);
  EXPECT_NE(msg_for("value\n1\n").find("p.csv:1"), std::string::npos);
  EXPECT_FALSE(msg_for("index,coord_0\n").empty());
  EXPECT_FALSE(msg_for("index,coord_0\n1,nan\n").empty());
  EXPECT_THROW((void)processes::load_path_csv("/nonexistent/path.csv"), std::exception);
}

TEST(PathIo, AtomicWrite) {
  const auto dir = std::filesystem::temp_directory_path() / "ustat_atomic_test";
  std::filesystem::create_directories(dir);
  const auto file = dir / "out.txt";
  processes::write_file_atomically(file, "first\n");
  processes::write_file_atomically(file, "second\n");
  std::ifstream in(file);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "second");
  std::size_t entries = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir)) ++entries;
  EXPECT_EQ(entries, 1u);
  EXPECT_THROW(processes::write_file_atomically(dir / "missing" / "x.txt", "x"), IoError);
  std::filesystem::remove_all(dir);
}
