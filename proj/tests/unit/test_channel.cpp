// SPDX-License-Identifier: Apache-2.0
//
// risdiff: link-level simulator for RIS-aided differential SIMO-OFDM beam training
// Copyright (C) 2026 The risdiff contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "risdiff/channel.hpp"
#include "risdiff/channel_io.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace risdiff;

namespace
{
    // Independent element-by-element steering phase for index pair (bx, by)
    cplx steering_oracle(const ArrayGeometry &g, int bx, int by, double az, double zen)
    {
        const double ph = two_pi * (g.spacing_h * bx * std::sin(zen) * std::cos(az) + g.spacing_v * by * std::sin(zen) * std::sin(az));
        return {std::cos(ph), std::sin(ph)};
    }

    SamplingGrid small_grid(int K)
    {
        return {K, 30e3, K / 8};
    }

    LinkStatistics table_direct()
    {
        LinkStatistics s;
        s.gain_db = -86.0;
        s.n_clusters = 20;
        s.los_aoa = {0.7, 1.3};
        s.los_aod = {-2.1, 1.6};
        return s;
    }
}

TEST(SteeringVector, ZeroZenithIsAllOnes)
{
    const CVector a = steering_vector({2, 1}, 1.234, 0.0);
    ASSERT_EQ(a.size(), 2u);
    EXPECT_NEAR(std::abs(a[0] - cplx(1, 0)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(a[1] - cplx(1, 0)), 0.0, 1e-15);
}

TEST(SteeringVector, BroadsideHalfWavelengthFlipsSign)
{
    const CVector a = steering_vector({2, 1}, 0.0, pi / 2);
    EXPECT_NEAR(std::abs(a[0] - cplx(1, 0)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(a[1] - cplx(-1, 0)), 0.0, 1e-12);
}

TEST(SteeringVector, NormEqualsElementCount)
{
    const CVector a = steering_vector({4, 2}, 0.7, 1.0);
    EXPECT_NEAR(norm_sq(a), 8.0, 1e-12);
}

TEST(SteeringVector, MatchesElementwiseOracleAndKroneckerOrder)
{
    const ArrayGeometry g{3, 4, 0.5, 0.37};
    Engine rng = make_stream(7, 0, StreamTag::oracle);
    for (int t = 0; t < 50; ++t)
    {
        const double az = uniform(rng, -pi, pi), zen = uniform(rng, 0.0, pi);
        const CVector a = steering_vector(g, az, zen);
        for (int bx = 0; bx < g.n_h; ++bx)
            for (int by = 0; by < g.n_v; ++by)
            {
                const cplx ref = steering_oracle(g, bx, by, az, zen);
                EXPECT_NEAR(std::abs(a[static_cast<std::size_t>(bx * g.n_v + by)] - ref), 0.0, 1e-12);
            }
        for (const auto &v : a)
            EXPECT_NEAR(std::abs(v), 1.0, 1e-12);
    }
}

TEST(SteeringVector, RejectsInvalidGeometry)
{
    EXPECT_THROW(steering_vector({0, 2}, 0.0, 0.0), std::invalid_argument);
    EXPECT_THROW(steering_vector({2, 2, -0.5, 0.5}, 0.0, 0.0), std::invalid_argument);
}

TEST(Geometry, DirectionToPointsAlongAxes)
{
    const Direction d = direction_to({0, 0, 0}, {0, 5, 0});
    EXPECT_NEAR(d.azimuth, pi / 2, 1e-12);
    EXPECT_NEAR(d.zenith, pi / 2, 1e-12);
    const Direction up = direction_to({0, 0, 0}, {0, 0, 2});
    EXPECT_NEAR(up.zenith, 0.0, 1e-12);
}

TEST(SampleClusters, DegenerateSpreadGivesSingleUnitCluster)
{
    LinkStatistics s;
    s.n_clusters = 1;
    s.delay_spread_s = 0.0;
    Engine rng = make_stream(1, 0, StreamTag::channel);
    const ClusterSet c = sample_clusters(s, small_grid(64), rng);
    ASSERT_EQ(c.size(), 1u);
    EXPECT_EQ(c[0].delay_samples, 0);
    EXPECT_DOUBLE_EQ(c[0].power, 1.0);
}

TEST(SampleClusters, PowersSumToOneAndDelaysFitPrefix)
{
    const SamplingGrid grid;
    Engine rng = make_stream(2, 0, StreamTag::channel);
    for (int t = 0; t < 200; ++t)
    {
        const ClusterSet c = sample_clusters(table_direct(), grid, rng);
        ASSERT_EQ(c.size(), 20u);
        double total = 0.0;
        for (const auto &cl : c)
        {
            total += cl.power;
            EXPECT_GE(cl.delay_samples, 0);
            EXPECT_LT(cl.delay_samples, grid.cp_len);
            EXPECT_GE(cl.aoa.zenith, 0.0);
            EXPECT_LE(cl.aoa.zenith, pi);
            EXPECT_GE(cl.aoa.azimuth, -pi);
            EXPECT_LT(cl.aoa.azimuth, pi);
        }
        EXPECT_NEAR(total, 1.0, 1e-12);
        EXPECT_EQ(c.front().delay_samples, 0);
    }
}

TEST(SampleClusters, ZenithClampedForWideSpread)
{
    LinkStatistics s = table_direct();
    s.los_aoa = {0.0, pi / 2};
    s.zsa_deg = 20.0;
    Engine rng = make_stream(3, 0, StreamTag::channel);
    for (int t = 0; t < 2000; ++t)
        for (const auto &cl : sample_clusters(s, SamplingGrid{}, rng))
        {
            EXPECT_GE(cl.aoa.zenith, 0.0);
            EXPECT_LE(cl.aoa.zenith, pi);
        }
}

TEST(SampleClusters, MeanTotalGainIsUnit)
{
    Engine rng = make_stream(4, 0, StreamTag::channel);
    const SamplingGrid grid;
    double acc = 0.0;
    const int n = 100000;
    for (int t = 0; t < n; ++t)
        for (const auto &cl : sample_clusters(table_direct(), grid, rng))
            acc += std::norm(cl.gain);
    EXPECT_NEAR(acc / n, 1.0, 0.01);
}

TEST(SampleClusters, ClusterGainIsExponentialWithMeanPower)
{
    // |alpha|^2 / sigma^2 ~ Exp(1): mean 1, P(X > 1) = e^-1
    LinkStatistics s = table_direct();
    s.n_clusters = 3;
    Engine rng = make_stream(5, 0, StreamTag::channel);
    const int n = 100000;
    double mean = 0.0, tail = 0.0;
    for (int t = 0; t < n; ++t)
    {
        const ClusterSet c = sample_clusters(s, SamplingGrid{}, rng);
        const double x = std::norm(c[1].gain) / c[1].power;
        mean += x;
        tail += x > 1.0;
    }
    EXPECT_NEAR(mean / n, 1.0, 0.02);
    EXPECT_NEAR(tail / n, std::exp(-1.0), 0.01);
}

TEST(SampleClusters, RejectsSpreadBeyondPrefix)
{
    LinkStatistics s = table_direct();
    s.delay_spread_s = 10e-6;
    Engine rng = make_stream(6, 0, StreamTag::channel);
    EXPECT_THROW(sample_clusters(s, SamplingGrid{}, rng), ConfigError);
}

TEST(SynthDirect, FlatSingleClusterEqualsGainRoot)
{
    Cluster c;
    c.gain = {1.0, 0.0};
    const CMatrix h = synth_direct({c}, {1, 1}, small_grid(32), db_to_linear(-86.0));
    for (std::size_t k = 0; k < 32; ++k)
        EXPECT_NEAR(std::abs(h(k, 0) - cplx(std::sqrt(db_to_linear(-86.0)), 0.0)), 0.0, 1e-18);
}

TEST(SynthDirect, QuarterSymbolDelayRotatesByMinusQuarterTurn)
{
    Cluster c;
    c.gain = {1.0, 0.0};
    c.delay_samples = 8;
    const CMatrix h = synth_direct({c}, {1, 1}, {32, 30e3, 16}, 1.0);
    for (std::size_t k = 1; k < 32; ++k)
    {
        EXPECT_NEAR(std::abs(h(k, 0)), 1.0, 1e-12);
        EXPECT_NEAR(std::abs(h(k, 0) - h(k - 1, 0) * cplx(0.0, -1.0)), 0.0, 1e-12);
    }
}

TEST(SynthDirect, MeanPowerMatchesLargeScaleGain)
{
    const SamplingGrid grid;
    const ArrayGeometry bs{4, 4};
    Engine rng = make_stream(8, 0, StreamTag::channel);
    const LinkStatistics s = table_direct();
    double acc = 0.0;
    const int n = 10000;
    for (int t = 0; t < n; ++t)
    {
        // One subcarrier suffices; each realization is stationary in k
        ClusterSet c = sample_clusters(s, grid, rng);
        const CMatrix h = synth_direct(c, bs, {8, 30e3, 1}, s.gain());
        acc += norm_sq(h.row(3)) / 16.0;
    }
    EXPECT_NEAR(acc / n / s.gain(), 1.0, 0.02);
}

TEST(SynthBsRis, PureLosIsRankOneAtEverySubcarrier)
{
    LinkStatistics s;
    s.rician_factor = std::numeric_limits<double>::infinity();
    s.los_aoa = {0.3, 1.2};
    s.los_aod = {2.0, 1.9};
    Engine rng = make_stream(9, 0, StreamTag::channel);
    const ClusterSet los = los_cluster(s, rng);
    const CTensor3 G = synth_bs_ris({}, los, {2, 2}, {2, 2}, small_grid(16), 1.0, s.rician_factor);
    for (std::size_t k = 0; k < 16; ++k)
        // rank one: every 2x2 minor vanishes
        for (std::size_t b = 1; b < 4; ++b)
            for (std::size_t m = 1; m < 4; ++m)
                EXPECT_NEAR(std::abs(G(k, 0, 0) * G(k, b, m) - G(k, b, 0) * G(k, 0, m)), 0.0, 1e-12);
}

TEST(SynthBsRis, ZeroRicianFactorDropsLos)
{
    Cluster los;
    los.gain = {1.0, 0.0};
    const CTensor3 G = synth_bs_ris({}, {los}, {2, 1}, {2, 1}, small_grid(8), 1.0, 0.0);
    for (const auto &v : G.values())
        EXPECT_EQ(v, cplx(0.0, 0.0));
}

TEST(SynthLinks, ReflectiveLinkPowersMatchGains)
{
    ChannelScenario sc;
    sc.bs = {4, 4};
    sc.ris = {8, 8};
    sc.bs_ris.gain_db = -62.0;
    sc.bs_ris.rician_factor = 10.0;
    sc.bs_ris.n_clusters = 10;
    sc.ris_ue.gain_db = -60.0;
    sc.ris_ue.rician_factor = 10.0;
    sc.ris_ue.n_clusters = 10;
    sc.direct_enabled = false;
    const SamplingGrid g8{8, 30e3, 1};
    Engine rng = make_stream(10, 0, StreamTag::channel);
    double ge = 0.0, gu = 0.0;
    const int n = 4000;
    for (int t = 0; t < n; ++t)
    {
        LinkDraws d = draw_links(sc, rng);
        const CTensor3 G = synth_bs_ris(d.bs_ris_nlos, d.bs_ris_los, sc.bs, sc.ris, g8, sc.bs_ris.gain(), 10.0);
        const CMatrix g = synth_ris_ue(d.ris_ue_nlos, d.ris_ue_los, sc.ris, g8, sc.ris_ue.gain(), 10.0);
        double s = 0.0;
        for (std::size_t b = 0; b < 16; ++b)
            s += norm_sq(G.slice(2, b));
        ge += s / (16.0 * 64.0);
        gu += norm_sq(g.row(2)) / 64.0;
    }
    EXPECT_NEAR(ge / n / sc.bs_ris.gain(), 1.0, 0.02);
    EXPECT_NEAR(gu / n / sc.ris_ue.gain(), 1.0, 0.02);
}

TEST(SynthRisUe, SingleFlatClusterIsFlat)
{
    Cluster c;
    c.gain = {0.5, -0.2};
    const CMatrix g = synth_ris_ue({c}, {}, {1, 1}, small_grid(16), 1.0, 0.0);
    for (std::size_t k = 1; k < 16; ++k)
        EXPECT_NEAR(std::abs(g(k, 0) - g(0, 0)), 0.0, 1e-15);
}

TEST(Cascade, AllOnesAndZero)
{
    const CTensor3 G(2, 2, 3, cplx(1.0, 0.0));
    const CMatrix ones(2, 3, cplx(1.0, 0.0)), zero(2, 3);
    const CTensor3 H1 = cascade(G, ones), H0 = cascade(G, zero);
    for (const auto &v : H1.values())
        EXPECT_EQ(v, cplx(1.0, 0.0));
    for (const auto &v : H0.values())
        EXPECT_EQ(v, cplx(0.0, 0.0));
}

TEST(Cascade, MatchesLoopOracleAndIsBilinear)
{
    Engine rng = make_stream(11, 0, StreamTag::oracle);
    ComplexGaussian cg(1.0);
    CTensor3 G(2, 2, 3);
    CMatrix g(2, 3);
    cg.fill(G.values(), rng);
    cg.fill(g.values(), rng);
    const CTensor3 H = cascade(G, g);
    for (std::size_t k = 0; k < 2; ++k)
        for (std::size_t b = 0; b < 2; ++b)
            for (std::size_t m = 0; m < 3; ++m)
                EXPECT_EQ(H(k, b, m), G(k, b, m) * g(k, m));
    const cplx a(0.3, -1.7);
    CTensor3 aG = G;
    for (auto &v : aG.values())
        v *= a;
    const CTensor3 H2 = cascade(aG, g);
    for (std::size_t i = 0; i < H.size(); ++i)
        EXPECT_NEAR(std::abs(H2.values()[i] - a * H.values()[i]), 0.0, 1e-12);
    EXPECT_THROW(cascade(G, CMatrix(2, 4)), std::invalid_argument);
}

TEST(EffectiveChannel, ZeroCascadeReturnsDirect)
{
    CMatrix hd(4, 2, cplx(0.5, 0.25));
    const ChannelRealization ch(hd, CTensor3(4, 2, 3), CMatrix(4, 3));
    const CVector psi(3, cplx(1.0, 0.0));
    const CVector h = effective_channel(ch, psi, 2);
    EXPECT_EQ(h[0], cplx(0.5, 0.25));
    EXPECT_EQ(h[1], cplx(0.5, 0.25));
}

TEST(EffectiveChannel, SingleElementAddsCascade)
{
    const cplx c(0.7, 0.1), d(-0.2, 0.4);
    const ChannelRealization ch(CMatrix(1, 1, d), CTensor3(1, 1, 1, c), CMatrix(1, 1, cplx(1.0, 0.0)));
    const CVector psi{cplx(1.0, 0.0)};
    EXPECT_NEAR(std::abs(effective_channel(ch, psi, 0)[0] - (d + c)), 0.0, 1e-15);
}

TEST(EffectiveChannel, MatchesLoopOracleAndIsLinearInPsi)
{
    Engine rng = make_stream(12, 0, StreamTag::oracle);
    ComplexGaussian cg(1.0);
    CMatrix hd(4, 2), g(4, 4);
    CTensor3 G(4, 2, 4);
    cg.fill(hd.values(), rng);
    cg.fill(G.values(), rng);
    cg.fill(g.values(), rng);
    const ChannelRealization ch(hd, G, g);
    CVector p1(4), p2(4), p12(4);
    for (std::size_t m = 0; m < 4; ++m)
    {
        p1[m] = std::polar(1.0, uniform(rng, -pi, pi));
        p2[m] = std::polar(1.0, uniform(rng, -pi, pi));
        p12[m] = p1[m] + p2[m];
    }
    for (std::size_t k = 0; k < 4; ++k)
    {
        const CVector h = effective_channel(ch, p1, k);
        for (std::size_t b = 0; b < 2; ++b)
        {
            cplx ref = hd(k, b);
            for (std::size_t m = 0; m < 4; ++m)
                ref += G(k, b, m) * g(k, m) * p1[m];
            EXPECT_NEAR(std::abs(h[b] - ref), 0.0, 1e-12);
        }
        const CVector h1 = effective_channel(ch, p1, k), h2 = effective_channel(ch, p2, k), h12 = effective_channel(ch, p12, k);
        for (std::size_t b = 0; b < 2; ++b)
            EXPECT_NEAR(std::abs((h12[b] - hd(k, b)) - (h1[b] - hd(k, b)) - (h2[b] - hd(k, b))), 0.0, 1e-12);
    }
}

TEST(FactoredChannel, AgreesWithDenseRealization)
{
    ChannelScenario sc;
    sc.grid = {64, 30e3, 8};
    sc.bs = {2, 2};
    sc.ris = {3, 2};
    sc.direct.n_clusters = 4;
    sc.direct.delay_spread_s = 20e-9;
    sc.bs_ris.n_clusters = 3;
    sc.bs_ris.rician_factor = 2.0;
    sc.ris_ue.n_clusters = 2;
    sc.ris_ue.rician_factor = 5.0;
    Engine rng = make_stream(13, 0, StreamTag::channel);
    const LinkDraws d = draw_links(sc, rng);
    const FactoredChannel f = factorize(sc, d);
    const ChannelRealization dense = realize(sc, d);
    CVector psi(6);
    for (auto &p : psi)
        p = std::polar(1.0, uniform(rng, -pi, pi));
    const CMatrix hf = f.response(psi), hd = effective_channel(dense, psi);
    for (std::size_t i = 0; i < hf.size(); ++i)
        EXPECT_NEAR(std::abs(hf.values()[i] - hd.values()[i]), 0.0, 1e-12);
    const ChannelRealization back = f.densify();
    for (std::size_t i = 0; i < back.g_bs_ris.size(); ++i)
        EXPECT_NEAR(std::abs(back.g_bs_ris.values()[i] - dense.g_bs_ris.values()[i]), 0.0, 1e-12);
}

TEST(ChannelIo, BinaryRoundTripIsExact)
{
    Engine rng = make_stream(14, 0, StreamTag::oracle);
    ComplexGaussian cg(1.0);
    CMatrix hd(3, 2), g(3, 4);
    CTensor3 G(3, 2, 4);
    cg.fill(hd.values(), rng);
    cg.fill(G.values(), rng);
    cg.fill(g.values(), rng);
    const ChannelRealization ch(hd, G, g);
    std::stringstream ss;
    write_channel(ss, ch);
    const std::string bytes = ss.str();
    EXPECT_EQ(bytes.size(), 8u + 3u * 8u + 16u * (6u + 24u + 12u));
    EXPECT_EQ(bytes.substr(0, 8), "RISCHNL1");
    EXPECT_EQ(static_cast<unsigned char>(bytes[8]), 3u); // K, little-endian
    const ChannelRealization back = read_channel(ss);
    EXPECT_EQ(back.h_direct.values(), hd.values());
    EXPECT_EQ(back.g_bs_ris.values(), G.values());
    EXPECT_EQ(back.g_ris_ue.values(), g.values());
}

TEST(ChannelIo, RejectsBadMagic)
{
    std::stringstream ss("NOTACHNL");
    EXPECT_THROW(read_channel(ss), std::runtime_error);
}
