//
// Copyright 2026 The gazedp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "gazedp/io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <sstream>
#include <string>

#include <unistd.h>

#include "gazedp/synthetic.hpp"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "test_util.hpp"

namespace gazedp {
namespace {

namespace fs = std::filesystem;
using ::testing::HasSubstr;

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("gazedp_io_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string Path(const std::string& name) const { return (dir_ / name).string(); }

  static std::string Slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
  }

  fs::path dir_;
};

std::vector<ObserverFixations> Parse(const std::string& text) {
  std::istringstream in(text);
  return ReadFixations(in, "mem");
}

TEST(ReadFixationsTest, GroupsInFirstAppearanceOrder) {
  const auto obs = Parse("observer_id,x,y,weight\nA,1,2,1\nB,0,0,2\nA,3,3,1\n");
  ASSERT_EQ(obs.size(), 2u);
  EXPECT_EQ(obs[0].observer_id, "A");
  EXPECT_EQ(obs[1].observer_id, "B");
  EXPECT_EQ(obs[0].fixations.size(), 2u);
  EXPECT_EQ(obs[1].fixations[0].weight, 2u);
}

TEST(ReadFixationsTest, WeightDefaultsToOne) {
  const auto obs = Parse("observer_id,x,y\nA,1.5,2.0\n");
  ASSERT_EQ(obs.size(), 1u);
  EXPECT_EQ(obs[0].fixations[0].x, 1.5);
  EXPECT_EQ(obs[0].fixations[0].y, 2.0);
  EXPECT_EQ(obs[0].fixations[0].weight, 1u);
  EXPECT_EQ(Parse("observer_id,x,y,weight\nA,1.5,2.0\n")[0].fixations[0].weight, 1u);
}

TEST(ReadFixationsTest, CrlfAndComments) {
  const auto obs = Parse("# gazedp v1\r\nobserver_id,x,y,weight\r\nA,1,2,3\r\n\r\n");
  ASSERT_EQ(obs.size(), 1u);
  EXPECT_EQ(obs[0].fixations[0].weight, 3u);
}

TEST(ReadFixationsTest, TotalMatchesRowCount) {
  SyntheticOptions opts;
  opts.observers = 3;
  opts.fixations_per_observer = 57;
  const auto written = SynthesizeFixations(GridSpec(40, 30), opts);
  std::ostringstream out;
  WriteFixationsCsv(out, written);
  std::size_t rows = 0;
  for (char ch : out.str()) rows += ch == '\n';
  const auto obs = Parse(out.str());
  ASSERT_EQ(obs.size(), 3u);
  std::size_t total = 0;
  for (const auto& o : obs) total += o.fixations.size();
  EXPECT_EQ(total, rows - 1);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(obs[i].observer_id, written[i].observer_id);
    ASSERT_EQ(obs[i].fixations.size(), written[i].fixations.size());
    for (std::size_t k = 0; k < obs[i].fixations.size(); ++k) {
      ASSERT_EQ(obs[i].fixations[k].x, written[i].fixations[k].x);
      ASSERT_EQ(obs[i].fixations[k].y, written[i].fixations[k].y);
    }
  }
}

TEST(ReadFixationsTest, MalformedRowReportsLineNumber) {
  try {
    Parse("observer_id,x,y\nA,1,2\nB,oops,2\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParse);
    EXPECT_THAT(e.what(), HasSubstr("mem:3:"));
  }
  EXPECT_THROW(Parse("observer_id,x,y\nA,1\n"), Error);
  EXPECT_THROW(Parse("observer_id,x,y\nA,1,2,0\n"), Error);
  EXPECT_THROW(Parse("id,x,y\nA,1,2\n"), Error);
}

TEST(ReadFixationsTest, EmptyInputIsAnError) {
  EXPECT_THROW(Parse(""), Error);
  EXPECT_THROW(Parse("observer_id,x,y\n"), Error);
}

TEST_F(TempDir, GazeMapRoundTrip) {
  std::mt19937_64 rng(81);
  const GazeMap map = testing::RandomGazeMap(rng, GridSpec(17, 9), 40);
  SaveGazeMap(Path("m.txt"), map);
  EXPECT_EQ(LoadGazeMap(Path("m.txt")), map);
}

TEST_F(TempDir, GazeMapRowCountMismatch) {
  std::ofstream(Path("bad.txt")) << "2 2\n1 2\n3 4\n5 6\n";
  try {
    LoadGazeMap(Path("bad.txt"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParse);
  }
  std::ofstream(Path("short.txt")) << "2 2\n1 2\n";
  EXPECT_THROW(LoadGazeMap(Path("short.txt")), Error);
  std::ofstream(Path("wide.txt")) << "2 1\n1 2 3\n";
  EXPECT_THROW(LoadGazeMap(Path("wide.txt")), Error);
}

TEST_F(TempDir, GazeMapAcceptsBareHeader) {
  std::ofstream(Path("bare.txt")) << "3 1\n0 4 1\n";
  EXPECT_EQ(LoadGazeMap(Path("bare.txt")), GazeMap(GridSpec(3, 1), {0, 4, 1}));
}

TEST_F(TempDir, LargeGazeMapResavesByteIdentically) {
  std::mt19937_64 rng(82);
  SaveGazeMap(Path("a.txt"), testing::RandomGazeMap(rng, GridSpec(300, 300), 7));
  SaveGazeMap(Path("b.txt"), LoadGazeMap(Path("a.txt")));
  EXPECT_EQ(Slurp(Path("a.txt")), Slurp(Path("b.txt")));
}

TEST_F(TempDir, AggregateRoundTripIsExact) {
  std::mt19937_64 rng(83);
  std::normal_distribution<double> u(0, 3);
  const GridSpec g(11, 7);
  std::vector<double> v(g.pixels());
  for (double& x : v) x = u(rng);
  const AggregateMap a(g, v, 42);
  SaveAggregateMap(Path("agg.txt"), a);
  EXPECT_EQ(LoadAggregateMap(Path("agg.txt")), a);
}

TEST_F(TempDir, PgmRendering) {
  const GridSpec g(4, 2);
  const Heatmap zero(g, std::vector<double>(8, 0.0), 1);
  RenderHeatmap(zero, Path("zero.pgm"));
  for (auto px : ReadPgm(Path("zero.pgm")).pixels) EXPECT_EQ(px, 0);

  std::vector<double> one_hot(8, 0.0);
  one_hot[5] = 1.0;
  RenderHeatmap(Heatmap(g, one_hot, 1), Path("hot.pgm"));
  const auto img = ReadPgm(Path("hot.pgm"));
  EXPECT_EQ(img.width, 4u);
  EXPECT_EQ(img.height, 2u);
  for (std::size_t p = 0; p < 8; ++p) EXPECT_EQ(img.pixels[p], p == 5 ? 255 : 0);
}

TEST_F(TempDir, PgmReReadMatchesRoundedIntensity) {
  std::mt19937_64 rng(84);
  std::uniform_real_distribution<double> u(-0.2, 1.2);
  const GridSpec g(31, 17);
  std::vector<double> v(g.pixels());
  for (double& x : v) x = u(rng);
  const Heatmap h(g, v, 2);
  RenderHeatmap(h, Path("h.pgm"));
  const auto img = ReadPgm(Path("h.pgm"));
  ASSERT_EQ(img.pixels.size(), g.pixels());
  for (std::size_t p = 0; p < g.pixels(); ++p) {
    const double clamped = std::min(1.0, std::max(0.0, v[p]));
    ASSERT_EQ(img.pixels[p], std::lround(255 * clamped));
  }
  EXPECT_THAT(Slurp(Path("h.pgm")), ::testing::StartsWith("P5\n# gazedp v1\n31 17\n255\n"));
}

TEST_F(TempDir, UnwritablePathNamesThePath) {
  const std::string bad = Path("missing_dir/out.pgm");
  try {
    RenderHeatmap(Heatmap(GridSpec(1, 1), {0.0}, 1), bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
    EXPECT_THAT(e.what(), HasSubstr(bad));
  }
}

}  // namespace
}  // namespace gazedp
