// Copyright 2026 The asdkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include "asd/core/metrics.hpp"

#include "support.hpp"

using namespace asd;
using asd::test::error_code_of;

namespace {

double brute_auc(const std::vector<double>& normals, const std::vector<double>& anomalies) {
  std::uint64_t wins = 0;
  for (double a : anomalies)
    for (double n : normals) wins += a - n > 0.0 ? 1 : 0;
  return static_cast<double>(wins) / static_cast<double>(normals.size() * anomalies.size());
}

ScoredClip clip(const std::string& path, Domain d, Condition c, double score,
                const std::string& machine = "m") {
  return {path, machine, "00", d, c, score};
}

ScoredTestSet make_set(const std::vector<double>& src_normals, const std::vector<double>& tgt_normals,
                       const std::vector<double>& anomalies, const std::string& machine = "m") {
  ScoredTestSet s;
  int i = 0;
  for (double v : src_normals)
    s.push_back(clip(machine + "/n_s_" + std::to_string(i++), Domain::kSource, Condition::kNormal, v, machine));
  for (double v : tgt_normals)
    s.push_back(clip(machine + "/n_t_" + std::to_string(i++), Domain::kTarget, Condition::kNormal, v, machine));
  for (double v : anomalies) {
    const Domain d = i % 2 ? Domain::kSource : Domain::kTarget;
    s.push_back(clip(machine + "/a_" + std::to_string(i++), d, Condition::kAnomaly, v, machine));
  }
  return s;
}

}  // namespace

TEST_CASE("auc worked examples") {
  CHECK(auc(std::vector<double>{0.1, 0.2}, std::vector<double>{0.8, 0.9}) == 1.0);
  CHECK(auc(std::vector<double>{0.1, 0.4}, std::vector<double>{0.3, 0.5}) == 0.75);
  CHECK(auc(std::vector<double>{0.5, 0.5}, std::vector<double>{0.5}) == 0.0);
  CHECK(error_code_of([] { auc(std::vector<double>{}, std::vector<double>{1.0}); }) ==
        ErrorCode::kUndefinedMetric);
}

TEST_CASE("pauc worked example") {
  const std::vector<double> normals{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  const std::vector<double> anomalies{0.95, 1.05};
  CHECK(pauc(normals, anomalies, 0.1) == 0.5);
  const auto set = make_set({0.1, 0.2, 0.3, 0.4, 0.5}, {0.6, 0.7, 0.8, 0.9, 1.0}, anomalies);
  CHECK(pauc_section(set, "m", "00", 0.1) == 0.5);
  CHECK(pauc(normals, std::vector<double>{2.0, 3.0}, 0.3) == 1.0);
  CHECK(pauc(normals, std::vector<double>{0.0, 0.05}, 0.3) == 0.0);
  CHECK(error_code_of([&] { pauc(std::vector<double>{0.1, 0.2}, anomalies, 0.1); }) ==
        ErrorCode::kUndefinedMetric);
  CHECK(top_normal_count(0.3, 10) == 3);
  CHECK(top_normal_count(0.1, 100) == 10);
  CHECK(top_normal_count(0.1, 9) == 0);
}

TEST_CASE("fast counting equals the pairwise oracle on randomised sets with ties") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t nn = 1 + rng() % 50, na = 1 + rng() % 50;
    const int levels = 1 + static_cast<int>(rng() % 12);  // few levels -> many duplicates
    std::vector<double> normals(nn), anomalies(na);
    for (auto& v : normals) v = static_cast<double>(rng() % levels) / levels;
    for (auto& v : anomalies) v = static_cast<double>(rng() % levels) / levels + 0.05 * (rng() % 3);
    CHECK(auc(normals, anomalies) == brute_auc(normals, anomalies));

    const double p = 0.1 + 0.9 * static_cast<double>(rng() % 10) / 10.0;
    const std::size_t keep = top_normal_count(p, nn);
    if (keep == 0) continue;
    std::vector<double> top = normals;
    std::sort(top.begin(), top.end(), std::greater<>());
    top.resize(keep);
    CHECK(pauc(normals, anomalies, p) == brute_auc(top, anomalies));
  }
}

TEST_CASE("section metrics select the right clips") {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> s(1 + rng() % 20), t(1 + rng() % 20), a(1 + rng() % 20);
    for (auto* v : {&s, &t, &a})
      for (auto& x : *v) x = static_cast<double>(rng() % 15);
    ScoredTestSet set = make_set(s, t, a);
    const auto other = make_set({100.0}, {100.0}, {-1.0}, "other");
    set.insert(set.end(), other.begin(), other.end());
    CHECK(auc_domain(set, "m", "00", Domain::kSource) == brute_auc(s, a));
    CHECK(auc_domain(set, "m", "00", Domain::kTarget) == brute_auc(t, a));
    // p = 1 on pooled normals is the pooled AUC.
    std::vector<double> pooled = s;
    pooled.insert(pooled.end(), t.begin(), t.end());
    CHECK(pauc_section(set, "m", "00", 1.0) == brute_auc(pooled, a));
  }
  const auto set = make_set({0.1}, {}, {0.5});
  CHECK(error_code_of([&] { auc_domain(set, "m", "00", Domain::kTarget); }) ==
        ErrorCode::kUndefinedMetric);
}

TEST_CASE("auc properties: monotone invariance and complement") {
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<double> n(1 + rng() % 30), a(1 + rng() % 30);
    for (auto& v : n) v = u(rng);
    for (auto& v : a) v = u(rng);
    auto f = [](double v) { return std::exp(v) * 3.0 - 1.0; };
    std::vector<double> fn, fa, nn, na;
    for (double v : n) { fn.push_back(f(v)); nn.push_back(-v); }
    for (double v : a) { fa.push_back(f(v)); na.push_back(-v); }
    CHECK(auc(n, a) == auc(fn, fa));
    CHECK(auc(nn, na) == doctest::Approx(1.0 - auc(n, a)).epsilon(1e-15));
  }
}

TEST_CASE("pauc tie-break at the boundary is by path") {
  // Two normals tie at the cut; only one is kept but either gives the same count.
  ScoredTestSet set{clip("b", Domain::kSource, Condition::kNormal, 0.5),
                    clip("a", Domain::kTarget, Condition::kNormal, 0.5)};
  for (int i = 0; i < 8; ++i) {
    set.push_back(clip("n" + std::to_string(i), Domain::kSource, Condition::kNormal, 0.1 * i / 8));
  }
  set.push_back(clip("x", Domain::kSource, Condition::kAnomaly, 0.6));
  set.push_back(clip("y", Domain::kSource, Condition::kAnomaly, 0.4));
  CHECK(pauc_section(set, "m", "00", 0.1) == 0.5);
}

TEST_CASE("official score is the harmonic mean") {
  CHECK(official_score(std::vector<double>{0.5, 0.5}).value == 0.5);
  CHECK(official_score(std::vector<double>{1.0, 0.5}).value == 2.0 / 3.0);
  const auto z = official_score(std::vector<double>{0.9, 0.0, 0.8});
  CHECK(z.value == 0.0);
  CHECK(z.zero_flag);
  CHECK(z.count == 3);
  CHECK(error_code_of([] { official_score(std::vector<double>{}); }) == ErrorCode::kUndefinedMetric);
  CHECK(error_code_of([] { official_score(std::vector<double>{1.5}); }) == ErrorCode::kUndefinedMetric);

  std::mt19937_64 rng(34);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> v(1 + rng() % 12);
    for (auto& x : v) x = u(rng);
    const double h = official_score(v).value;
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    CHECK(h >= *std::min_element(v.begin(), v.end()) * (1 - 1e-12));
    CHECK(h <= mean * (1 + 1e-12));
  }
}

TEST_CASE("report rows, percentages and reference diffs") {
  auto set = make_set({0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0},
                      {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0}, {0.95, 1.05}, "fan");
  const auto two = make_set({0.0}, {0.0}, {1.0}, "bearing");
  set.insert(set.end(), two.begin(), two.end());
  // bearing has one normal per domain; pAUC undefined at p = 0.1.
  auto report = build_report(set, 264192);
  CHECK_FALSE(report.complete);
  CHECK(report.problems.size() == 1);

  set.erase(std::remove_if(set.begin(), set.end(),
                           [](const ScoredClip& c) { return c.machine_type == "bearing"; }),
            set.end());
  const auto more = make_set(std::vector<double>(10, 0.0), std::vector<double>(10, 0.0), {1.0}, "bearing");
  set.insert(set.end(), more.begin(), more.end());
  ReferenceTable ref;
  ref["fan"] = {0.7096, 0.3875, 0.4946};
  report = build_report(set, 264192, &ref);
  REQUIRE(report.complete);
  REQUIRE(report.rows.size() == 2);
  CHECK(report.rows[0].machine_type == "bearing");
  CHECK(report.official.count == 6);
  const auto& fan = report.rows[1];
  CHECK(fan.auc_source == brute_auc({0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0}, {0.95, 1.05}));
  CHECK(fan.reference.has_value());
  const std::string csv = report.to_csv();
  CHECK(csv.find("fan,00,95.00,95.00,50.00,70.96,38.75,49.46,24.04,56.25,0.54") != std::string::npos);
  CHECK(report.to_table().find("MACs per input vector: 264192") != std::string::npos);
  CHECK(report.summary_text().find("complete = true") != std::string::npos);

  const auto empty = build_report({});
  CHECK_FALSE(empty.complete);
  CHECK(empty.rows.empty());
}

TEST_CASE("reference table loading") {
  asd::test::TempDir dir;
  asd::test::spit(dir / "ref.csv",
                  std::string("machine_type,mode,auc_source,auc_target,pauc\n"
                              "ToyCar,mse,71.05,53.32,49.79\nToyCar,mahala,73.17,50.91,49.05\n"));
  const auto mse = load_reference_table(dir / "ref.csv", "mse");
  REQUIRE(mse.count("ToyCar"));
  CHECK(mse.at("ToyCar").auc_source == doctest::Approx(0.7105));
  const auto maha = load_reference_table(dir / "ref.csv", "mahala");
  CHECK(maha.at("ToyCar").pauc == doctest::Approx(0.4905));
  asd::test::spit(dir / "bad.csv", std::string("machine,mode\nx,mse\n"));
  CHECK(error_code_of([&] { load_reference_table(dir / "bad.csv", "mse"); }) == ErrorCode::kFormat);
}
