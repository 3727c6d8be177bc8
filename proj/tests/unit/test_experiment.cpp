#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "beamqe/errors.hpp"
#include "beamqe/experiment.hpp"

using namespace beamqe;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("beamqe_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::size_t line_count(const fs::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) n += !line.empty();
  return n;
}

SweepConfig small_config() {
  SweepConfig c;
  c.N_list = {64};
  c.D = 2.0;
  c.husimi_grid = 256;
  return c;
}

}  // namespace

TEST(Config, TextRoundTrip) {
  SweepConfig c;
  c.N_list = {64, 128, 256};
  c.D = 1.75;
  c.points.kind = PointKind::annealed;
  c.points.seed = 17;
  c.points.anneal_radius_widths = 2.5;
  c.observables = {"x3sq", "xi3sq"};
  c.output_dir = "some dir/out";
  c.h_convention = HConvention::inverse_sqrt_eigenvalue;
  c.calibration_grid = {1.0, 0.1 + 0.2};
  EXPECT_EQ(parse_config(config_to_text(c)), c);
  c.D.reset();
  EXPECT_EQ(parse_config(config_to_text(c)), c);
}

TEST(Config, ParsesCommentsListsAndCalibrate) {
  const auto c = parse_config(
      "# sweep\n"
      "N_list = [64, 128]   # two degrees\n"
      "D = \"calibrate\"\n"
      "point_kind = \"spiral\"\n"
      "seed = 3\n");
  EXPECT_EQ(c.N_list, (std::vector<int>{64, 128}));
  EXPECT_FALSE(c.D.has_value());
  EXPECT_EQ(c.points.kind, PointKind::spiral);
  EXPECT_EQ(c.points.seed, 3u);
}

TEST(Config, RejectsBadInput) {
  EXPECT_THROW(parse_config("no_such_key = 1\n"), ConfigError);
  EXPECT_THROW(parse_config("D = abc\n"), ConfigError);
  EXPECT_THROW(parse_config("N_list = [64, x]\n"), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/beamqe.toml"), ConfigError);

  auto c = small_config();
  c.N_list = {};
  EXPECT_THROW(validate(c), ConfigError);
  c.N_list = {128, 64};
  EXPECT_THROW(validate(c), ConfigError);
  c.N_list = {2048};
  EXPECT_THROW(validate(c), ConfigError);
  c.allow_large_N = true;
  EXPECT_NO_THROW(validate(c));
  c = small_config();
  c.D = 3.0;  // sqrt(64) / 9 < 2
  EXPECT_THROW(validate(c), ConfigError);
  c = small_config();
  c.observables = {"nope"};
  EXPECT_THROW(validate(c), ConfigError);
  c = small_config();
  c.D.reset();
  EXPECT_NO_THROW(validate(c));
  EXPECT_THROW(validate(c, true), ConfigError);
}

TEST(LeastSquares, Slope) {
  EXPECT_NEAR(least_squares_slope({1, 2, 3, 4}, {3, 5, 7, 9}), 2.0, 1e-14);
  EXPECT_EQ(least_squares_slope({1}, {5}), 0.0);
}

TEST(Calibrate, EmptyGridIsAnError) {
  EXPECT_THROW(calibrate_D(256, {}, small_config()), ConfigError);
}

TEST(Calibrate, PicksSmallestQualifyingD) {
  const auto r = calibrate_D(64, {1.0, 2.0, 4.0}, small_config());
  ASSERT_EQ(r.rows.size(), 3u);
  const CalibrationRow* first = nullptr;
  for (const auto& row : r.rows) {
    if (!row.skipped) {
      EXPECT_NEAR(row.tail, row.pole_sums.sum_II + row.pole_sums.sum_III, 1e-15);
    }
    if (!first && !row.skipped && row.tail < 0.5) first = &row;
  }
  ASSERT_NE(first, nullptr);
  EXPECT_EQ(r.D, first->D);
  EXPECT_TRUE(r.rows[2].skipped);  // sqrt(64) / 16 < 1
}

TEST(Sweep, SmokeSingleDegree) {
  const auto rec = run_sweep(small_config());
  ASSERT_EQ(rec.degrees.size(), 1u);
  const auto& d = rec.degrees[0];
  EXPECT_EQ(d.N, 64);
  EXPECT_EQ(d.m, choose_m(64, 2.0));
  EXPECT_TRUE(d.certificate.passed());
  EXPECT_FALSE(d.overridden);
  ASSERT_TRUE(d.l2_quadrature.has_value());
  EXPECT_NEAR(*d.l2_quadrature, d.l2.norm_squared, 1e-8 * d.l2.norm_squared);
  EXPECT_NEAR(d.sup_u, d.sup.value / std::sqrt(d.l2.norm_squared), 1e-14 * d.sup_u);
  EXPECT_EQ(rec.L, d.sup_u);
  EXPECT_EQ(rec.slope, 0.0);
  EXPECT_EQ(d.qe.observables.size(), observable_bank().size());
  ASSERT_TRUE(d.qe.husimi.has_value());
}

TEST(Sweep, DeterministicAcrossThreadCounts) {
  auto c = small_config();
  c.N_list = {64, 128};
  c.threads = 1;
  const auto a = run_sweep(c);
  c.threads = 4;
  const auto b = run_sweep(c);
  const auto b2 = run_sweep(c);
  EXPECT_EQ(content_hash(b), content_hash(b2));
  EXPECT_EQ(sweep_record_to_json(b, true), sweep_record_to_json(b2, true));
  // The thread count itself is part of the record; everything else matches.
  auto a_as_b = a;
  a_as_b.config.threads = 4;
  EXPECT_EQ(sweep_record_to_json(a_as_b, true), sweep_record_to_json(b, true));
}

TEST(Sweep, CertificateFailureFailsFast) {
  auto c = small_config();
  c.c_floor = 10.0;
  EXPECT_THROW(run_sweep(c), CertificateError);
  c.override_certificate = true;
  const auto rec = run_sweep(c);
  EXPECT_TRUE(rec.degrees[0].overridden);
  EXPECT_FALSE(rec.degrees[0].certificate.passed());
}

TEST(Sweep, ResourceGuard) {
  auto c = small_config();
  c.N_list = {1024};
  c.D = 1.0;
  c.memory_budget_mb = 1;
  try {
    run_sweep(c);
    FAIL() << "expected ResourceError";
  } catch (const ResourceError& e) {
    EXPECT_NE(std::string(e.what()).find("nodes"), std::string::npos) << e.what();
  }
  EXPECT_GT(predicted_sweep_bytes(1024, 4), std::size_t{1} << 20);
}

TEST(Report, RoundTripAndTables) {
  auto c = small_config();
  c.N_list = {64, 128};
  auto rec = run_sweep(c);
  const auto dir = scratch("report");
  emit_report(rec, dir.string());
  for (const char* f : {"sweep.json", "degrees.csv", "defects.csv", "summary.txt", "config.toml"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  EXPECT_EQ(line_count(dir / "degrees.csv"), 1 + c.N_list.size());
  EXPECT_EQ(line_count(dir / "defects.csv"), 1 + c.N_list.size() * observable_bank().size());
  EXPECT_EQ(load_config((dir / "config.toml").string()), rec.config);

  const auto back = read_report(dir.string());
  EXPECT_EQ(sweep_record_to_json(back), sweep_record_to_json(rec));
  EXPECT_EQ(content_hash(back), content_hash(rec));
  EXPECT_EQ(back.degrees[1].sup.value, rec.degrees[1].sup.value);
  EXPECT_EQ(back.degrees[1].certificate.separation.distance, rec.degrees[1].certificate.separation.distance);

  std::ifstream csv(dir / "degrees.csv");
  std::string header, row;
  std::getline(csv, header);
  std::getline(csv, row);
  EXPECT_NE(header.find("sup_u"), std::string::npos);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", rec.degrees[0].sup_u);
  EXPECT_NE(row.find(buf), std::string::npos) << row;
  fs::remove_all(dir);
}

TEST(Report, UnwritableDirectory) {
  const auto blocker = scratch("blocker");
  std::ofstream(blocker.string()) << "file";
  SweepRecord rec;
  rec.config = small_config();
  EXPECT_THROW(emit_report(rec, (blocker / "sub").string()), std::runtime_error);
  fs::remove_all(blocker);
}

TEST(Report, SummaryMentionsEveryDegree) {
  auto c = small_config();
  c.N_list = {64, 128};
  const auto s = summary_text(run_sweep(c));
  EXPECT_NE(s.find("64"), std::string::npos);
  EXPECT_NE(s.find("128"), std::string::npos);
}
