/*
 * wlfit - Residual-weighted 3D Morphable Model landmark fitting.
 *
 * File: tests/unit/metrics_bench_test.cpp
 *
 * Copyright 2026 The wlfit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "fixtures.hpp"

#include "wlfit/metrics/benchmark.hpp"
#include "wlfit/metrics/mem.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace wlfit;

namespace {

std::vector<Eigen::VectorXd> random_samples(std::mt19937_64& rng, int n, Eigen::Index width)
{
    std::normal_distribution<double> n01;
    std::vector<Eigen::VectorXd> out;
    for (int i = 0; i < n; ++i)
    {
        Eigen::VectorXd v(width);
        for (Eigen::Index k = 0; k < width; ++k)
            v(k) = 30.0 * n01(rng);
        out.push_back(v);
    }
    return out;
}

metrics::BenchSpec small_spec(model::NoiseSpec noise)
{
    metrics::BenchSpec s;
    s.n_scenes = 4;
    s.yaw_bins = {-30.0, 0.0, 30.0};
    s.noise = noise;
    s.seed = 77;
    s.threads = 3;
    return s;
}

} // namespace

TEST(Mem, IdenticalSetsGiveZero)
{
    std::mt19937_64 rng(1);
    const auto g = random_samples(rng, 3, 136);
    EXPECT_EQ(metrics::mem(g, g), 0.0);
}

TEST(Mem, SingleOffset)
{
    EXPECT_EQ(metrics::mem(Eigen::VectorXd(Eigen::Vector2d(0, 0)), Eigen::VectorXd(Eigen::Vector2d(3, 4))), 5.0);
}

TEST(Mem, TwoSamples)
{
    const std::vector<Eigen::VectorXd> g{Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 1)};
    const std::vector<Eigen::VectorXd> e{Eigen::Vector2d(3, 4), Eigen::Vector2d(1, 8)};
    EXPECT_EQ(metrics::mem(g, e), std::sqrt(37.0));
    EXPECT_NEAR(metrics::mem(g, e), 6.0828, 1e-4);
}

TEST(Mem, SumsOverLandmarksWithoutAveraging)
{
    // Two landmarks each off by (3, 4): sqrt(25 + 25), not 5.
    Eigen::VectorXd g = Eigen::VectorXd::Zero(4);
    Eigen::VectorXd e(4);
    e << 3, 4, 3, 4;
    EXPECT_DOUBLE_EQ(metrics::mem(g, e), std::sqrt(50.0));
}

TEST(Mem, ScaleSymmetryAndPositivity)
{
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> cd(0.01, 100.0);
    for (int trial = 0; trial < 200; ++trial)
    {
        const auto g = random_samples(rng, 1 + trial % 5, 2 * (1 + trial % 68));
        const auto e = random_samples(rng, 1 + trial % 5, 2 * (1 + trial % 68));
        const double m = metrics::mem(g, e);
        EXPECT_GT(m, 0.0);
        EXPECT_EQ(m, metrics::mem(e, g));
        const double c = cd(rng);
        std::vector<Eigen::VectorXd> gc, ec;
        for (std::size_t i = 0; i < g.size(); ++i)
        {
            gc.push_back(c * g[i]);
            ec.push_back(c * e[i]);
        }
        EXPECT_NEAR(metrics::mem(gc, ec), c * m, 1e-12 * c * m);
        std::vector<Eigen::VectorXd> g2, e2;
        for (std::size_t i = 0; i < g.size(); ++i)
        {
            g2.push_back(4.0 * g[i]);
            e2.push_back(4.0 * e[i]);
        }
        EXPECT_EQ(metrics::mem(g2, e2), 4.0 * m);
    }
}

TEST(Mem, RejectsMismatch)
{
    const std::vector<Eigen::VectorXd> a{Eigen::VectorXd::Zero(4)};
    const std::vector<Eigen::VectorXd> b{Eigen::VectorXd::Zero(6)};
    const std::vector<Eigen::VectorXd> two{Eigen::VectorXd::Zero(4), Eigen::VectorXd::Zero(4)};
    EXPECT_THROW(metrics::mem(a, b), DimensionError);
    EXPECT_THROW(metrics::mem(a, two), DimensionError);
    EXPECT_THROW(metrics::mem(std::vector<Eigen::VectorXd>{}, std::vector<Eigen::VectorXd>{}), DimensionError);
}

TEST(ResidualScatter, SingleResultEqualsResiduals)
{
    fitting::FitResult r;
    r.per_landmark_residuals = Eigen::VectorXd::LinSpaced(6, -1.0, 1.0);
    const auto t = metrics::residual_scatter({r});
    EXPECT_EQ(t.columns, 6);
    ASSERT_EQ(t.rows.size(), 1u);
    EXPECT_EQ(t.rows[0], r.per_landmark_residuals);
}

TEST(ResidualScatter, TwoResultsGiveTwoRowsPerCoordinate)
{
    fitting::FitResult a, b;
    a.per_landmark_residuals = Eigen::VectorXd::Constant(4, 1.0);
    b.per_landmark_residuals = Eigen::VectorXd::Constant(4, 2.0);
    const auto t = metrics::residual_scatter({a, b});
    ASSERT_EQ(t.rows.size(), 2u);
    for (Eigen::Index c = 0; c < 4; ++c)
    {
        EXPECT_EQ(t.rows[0](c), 1.0);
        EXPECT_EQ(t.rows[1](c), 2.0);
    }
}

TEST(ResidualScatter, RejectsInconsistentWidths)
{
    fitting::FitResult a, b;
    a.per_landmark_residuals = Eigen::VectorXd::Zero(4);
    b.per_landmark_residuals = Eigen::VectorXd::Zero(6);
    EXPECT_THROW(metrics::residual_scatter({a, b}), DimensionError);
}

TEST(MeanErrorCurve, PadsShortTracesWithLastValue)
{
    const auto c = metrics::mean_error_curve({{4.0, 2.0}, {6.0, 4.0, 2.0, 1.0}}, 5);
    ASSERT_EQ(c.size(), 5u);
    EXPECT_EQ(c[0], 5.0);
    EXPECT_EQ(c[1], 3.0);
    EXPECT_EQ(c[2], 2.0);
    EXPECT_EQ(c[3], 1.5);
    EXPECT_EQ(c[4], 1.5);
}

TEST(ImprovementPercent, Formula)
{
    EXPECT_EQ(metrics::improvement_percent(10.0, 8.0), 20.0);
    EXPECT_EQ(metrics::improvement_percent(10.0, 12.0), -20.0);
    EXPECT_EQ(metrics::improvement_percent(0.0, 0.0), 0.0);
}

TEST(RunBenchmark, NoiseFreeScenesAreRecoveredByBothConditions)
{
    auto spec = small_spec(model::NoiseNone{});
    for (auto* c : {&spec.config_weighted, &spec.config_baseline})
    {
        c->lambda_id = 0.0;
        c->lambda_exp = 0.0;
        c->tau = 0.0;
    }
    const auto report = metrics::run_benchmark(fixtures::default_model(), spec);
    ASSERT_EQ(report.per_bin.size(), 3u);
    for (const auto& b : report.per_bin)
    {
        EXPECT_LE(b.mem_weighted, 1e-5);
        EXPECT_LE(b.mem_baseline, 1e-5);
        EXPECT_LE(std::abs(b.mem_baseline - b.mem_weighted), 1e-5);
        EXPECT_TRUE(std::isfinite(b.improvement_percent));
    }
}

TEST(RunBenchmark, IsDeterministicAcrossThreadCounts)
{
    auto spec = small_spec(model::NoiseOutlier{0.1, 10.0, 20.0});
    const auto a = metrics::run_benchmark(fixtures::default_model(), spec);
    spec.threads = 1;
    const auto b = metrics::run_benchmark(fixtures::default_model(), spec);
    ASSERT_EQ(a.per_bin.size(), b.per_bin.size());
    for (std::size_t i = 0; i < a.per_bin.size(); ++i)
    {
        EXPECT_EQ(a.per_bin[i].mem_weighted, b.per_bin[i].mem_weighted);
        EXPECT_EQ(a.per_bin[i].mem_baseline, b.per_bin[i].mem_baseline);
        EXPECT_EQ(a.per_bin[i].weighted_wins, b.per_bin[i].weighted_wins);
    }
    EXPECT_EQ(a.error_curve_weighted, b.error_curve_weighted);
    EXPECT_EQ(a.error_curve_baseline, b.error_curve_baseline);
    ASSERT_EQ(a.residual_scatter_weighted.rows.size(), b.residual_scatter_weighted.rows.size());
    for (std::size_t i = 0; i < a.residual_scatter_weighted.rows.size(); ++i)
        EXPECT_EQ(a.residual_scatter_weighted.rows[i], b.residual_scatter_weighted.rows[i]);
}

TEST(RunBenchmark, ReportIsInternallyConsistent)
{
    const auto spec = small_spec(model::NoiseHeteroscedastic{0.5, 6.0});
    const auto& m = fixtures::default_model();
    const auto report = metrics::run_benchmark(m, spec);
    ASSERT_EQ(report.scenes.size(), 12u);
    EXPECT_EQ(report.error_curve_weighted.size(), 50u);
    EXPECT_EQ(report.residual_scatter_weighted.rows.size(), 12u);
    EXPECT_EQ(report.residual_scatter_weighted.columns, 136);
    for (std::size_t b = 0; b < report.per_bin.size(); ++b)
    {
        const auto& bin = report.per_bin[b];
        EXPECT_EQ(bin.yaw_degrees, spec.yaw_bins[b]);
        EXPECT_EQ(bin.n_scenes, 4);
        EXPECT_LE(std::abs(bin.improvement_percent -
                           (bin.mem_baseline - bin.mem_weighted) / bin.mem_baseline * 100.0),
                  1e-12);
        // Bin MEM recomputed from the per-scene values: root of the mean of squares.
        double sw = 0.0, sb = 0.0;
        int wins = 0;
        for (const auto& s : report.scenes)
        {
            if (s.bin != static_cast<int>(b))
                continue;
            sw += s.mem_weighted * s.mem_weighted;
            sb += s.mem_baseline * s.mem_baseline;
            wins += s.mem_weighted < s.mem_baseline ? 1 : 0;
        }
        EXPECT_NEAR(bin.mem_weighted, std::sqrt(sw / 4.0), 1e-9 * bin.mem_weighted);
        EXPECT_NEAR(bin.mem_baseline, std::sqrt(sb / 4.0), 1e-9 * bin.mem_baseline);
        EXPECT_EQ(bin.weighted_wins, wins);
    }
    // Each scene MEM is reproducible from an independent fit of the regenerated scene.
    const auto& s0 = report.scenes.front();
    model::PoseSpec ps = spec.pose_template;
    ps.yaw_degrees = spec.yaw_bins[static_cast<std::size_t>(s0.bin)];
    const auto scene = model::synth_scene(m, s0.seed, spec.noise, ps);
    const auto fw = fitting::fit(m, scene.noisy_landmarks_2d, spec.config_weighted);
    EXPECT_EQ(metrics::mem(scene.clean_landmarks_2d, fw.projected_landmarks), s0.mem_weighted);
}

TEST(RunBenchmark, RejectsBadSpec)
{
    auto spec = small_spec(model::NoiseNone{});
    spec.n_scenes = 0;
    EXPECT_THROW(metrics::run_benchmark(fixtures::default_model(), spec), ConfigError);
    spec = small_spec(model::NoiseNone{});
    spec.yaw_bins.clear();
    EXPECT_THROW(metrics::run_benchmark(fixtures::default_model(), spec), ConfigError);
}

TEST(RunBenchmark, FitErrorsAreTaggedWithScene)
{
    auto spec = small_spec(model::NoiseNone{});
    spec.pose_template.scale = 1e-300; // projections collapse to a point
    try
    {
        metrics::run_benchmark(fixtures::default_model(), spec);
        FAIL() << "expected an error";
    }
    catch (const NumericError& e)
    {
        EXPECT_NE(std::string(e.what()).find("scene"), std::string::npos) << e.what();
    }
}
