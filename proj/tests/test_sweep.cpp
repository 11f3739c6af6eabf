#include <cmath>
#include <vector>

#include "doctest.h"
#include "qsi/errors.hpp"
#include "qsi/sweep.hpp"

using namespace qsi;

namespace {

SweepGrid fig_regime(const std::vector<double>& mu_points, double nu,
                     SourceKind kind, const std::vector<double>& loss) {
  SweepGrid g;
  g.loss_points = loss;
  g.mu_points = mu_points;
  g.source.kind = kind;
  g.decoy.signal_intensity = mu_points.back();
  g.decoy.decoy_intensities = {nu, 0.0};
  g.decoy.method = EstimationMethod::LinearProgram;
  g.decoy.n_cut = 15;
  g.scaling = DecoyScaling::Fixed;
  return g;
}

}  // namespace

TEST_CASE("single-point sweep reduces to the direct key rate") {
  SweepGrid g = fig_regime({0.3}, 0.1, SourceKind::Wcs, {10.0});
  const auto table = rate_vs_loss(g);
  REQUIRE(table.rows.size() == 1);

  SourceSpec src = g.source;
  src.mean_intensity = 0.3;
  ChannelSpec ch = g.channel;
  ch.loss_db = 10.0;
  DecoyProtocolSpec proto = g.decoy;
  proto.signal_intensity = 0.3;
  const auto direct = secure_key_rate(proto, src, ch);
  CHECK(table.rows[0].rate == direct.rate);
  CHECK(table.rows[0].nu == 0.1);
  CHECK(table.rows[0].throughput_bps ==
        throughput_fom(direct.rate, src.repetition_rate));
}

TEST_CASE("sweep emits one row per grid point with zero-rate failures") {
  SweepGrid g = fig_regime({0.3, 0.5}, 0.1, SourceKind::Wcs,
                           {0.0, 10.0, 60.0});
  const auto table = rate_vs_loss(g);
  REQUIRE(table.rows.size() == 6);
  for (const auto& row : table.rows) CHECK(row.rate >= 0.0);
  for (const auto& row : table.rows)
    if (row.loss_db == 60.0) CHECK(row.rate == 0.0);

  // Row order follows the grid: mu-major, loss-minor.
  CHECK(table.rows[0].mu == 0.3);
  CHECK(table.rows[0].loss_db == 0.0);
  CHECK(table.rows[2].loss_db == 60.0);
  CHECK(table.rows[3].mu == 0.5);
}

TEST_CASE("every row reproduces a fresh direct evaluation") {
  SweepGrid g = fig_regime({0.2, 0.3}, 0.1, SourceKind::Wcs, {5.0, 15.0});
  const auto table = rate_vs_loss(g);
  for (const auto& row : table.rows) {
    SourceSpec src = g.source;
    src.mean_intensity = row.mu;
    ChannelSpec ch = g.channel;
    ch.loss_db = row.loss_db;
    DecoyProtocolSpec proto = g.decoy;
    proto.signal_intensity = row.mu;
    proto.decoy_intensities = scaled_decoys(g.decoy, g.scaling, row.mu);
    CHECK(row.rate == secure_key_rate(proto, src, ch).rate);
  }
}

TEST_CASE("low-intensity regime curves fall with loss") {
  const std::vector<double> loss = {0.0, 5.0, 10.0, 15.0, 20.0};
  for (SourceKind kind : {SourceKind::Wcs, SourceKind::Hsps}) {
    SweepGrid g = fig_regime({0.01, 0.05, 0.1}, 0.001, kind, loss);
    const auto table = rate_vs_loss(g);
    REQUIRE(table.rows.size() == 15);
    for (std::size_t i = 0; i + 1 < table.rows.size(); ++i) {
      if (table.rows[i].mu != table.rows[i + 1].mu) continue;
      CHECK(table.rows[i].rate >= table.rows[i + 1].rate - 1e-15);
    }
  }
}

TEST_CASE("curve spread comparisons") {
  const std::vector<double> loss = {10.0};
  SweepGrid ga_w = fig_regime({0.01, 0.05, 0.1}, 0.001, SourceKind::Wcs, loss);
  SweepGrid ga_h = fig_regime({0.01, 0.05, 0.1}, 0.001, SourceKind::Hsps, loss);
  CurveTable table = rate_vs_loss(ga_w);
  table.append(rate_vs_loss(ga_h));

  const double spread_wcs = curve_spread(table, SourceKind::Wcs, 10.0);
  const double spread_hsps = curve_spread(table, SourceKind::Hsps, 10.0);
  CHECK(spread_hsps < spread_wcs);

  // The clustered high-intensity regime is tighter than the sparse one.
  SweepGrid gb_w = fig_regime({0.2, 0.25, 0.3}, 0.1, SourceKind::Wcs, loss);
  const auto tb = rate_vs_loss(gb_w);
  CHECK(curve_spread(tb, SourceKind::Wcs, 10.0) < spread_wcs);
}

TEST_CASE("curve spread conventions") {
  CurveTable t;
  for (double mu : {0.1, 0.2, 0.3})
    t.rows.push_back({SourceKind::Wcs, mu, 0.01, 10.0, 5e-3, 5e6, true});
  CHECK(curve_spread(t, SourceKind::Wcs, 10.0) == 0.0);

  CurveTable scaled = t;
  scaled.rows[0].rate = 1e-3;
  scaled.rows[1].rate = 2e-3;
  scaled.rows[2].rate = 3e-3;
  const double base = curve_spread(scaled, SourceKind::Wcs, 10.0);
  for (auto& row : scaled.rows) row.rate *= 3.7;
  CHECK(std::abs(curve_spread(scaled, SourceKind::Wcs, 10.0) - base) <=
        1e-12);

  CHECK_THROWS_AS(curve_spread(t, SourceKind::Hsps, 10.0),
                  InsufficientDataError);
  CHECK_THROWS_AS(curve_spread(t, SourceKind::Wcs, 20.0),
                  InsufficientDataError);
  CurveTable one = t;
  one.rows.resize(1);
  CHECK_THROWS_AS(curve_spread(one, SourceKind::Wcs, 10.0),
                  InsufficientDataError);
}

TEST_CASE("scalar maximizer against a calculus oracle") {
  const auto f = [](double x) { return x * std::exp(-3.0 * x); };
  const auto [xstar, fstar] = maximize_scalar(f, 0.05, 1.0, 1e-5);
  CHECK(std::abs(xstar - 1.0 / 3.0) < 1e-4);
  CHECK(std::abs(fstar - f(1.0 / 3.0)) < 1e-9);
  CHECK(f(xstar + 1e-5) <= fstar + 1e-12);
  CHECK(f(xstar - 1e-5) <= fstar + 1e-12);

  // Result never falls below an explicit grid scan of the same bracket.
  double grid_best = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double x = 0.05 + (1.0 - 0.05) * i / 49.0;
    grid_best = std::max(grid_best, f(x));
  }
  CHECK(fstar >= grid_best - 1e-15);

  const auto [xm, fm] = maximize_scalar(f, 0.5, 0.5 + 1e-6, 1e-5);
  CHECK(std::abs(xm - (0.5 + 5e-7)) <= 1e-6);
  CHECK(fm == f(xm));
}

TEST_CASE("signal intensity optimization") {
  SourceSpec wcs;
  wcs.kind = SourceKind::Wcs;
  ChannelSpec ch;  // 10 dB
  DecoyProtocolSpec tmpl;
  tmpl.signal_intensity = 0.3;
  tmpl.decoy_intensities = {0.1, 0.0};
  tmpl.method = EstimationMethod::LinearProgram;
  tmpl.n_cut = 15;

  const auto res =
      optimize_mu(wcs, ch, tmpl, DecoyScaling::Fixed, 0.12, 1.2, 1e-4);
  CHECK(res.mu_star > 0.1);
  CHECK(res.mu_star < 1.0);
  CHECK(res.rate_star > 0.0);

  auto rate_at = [&](double mu) {
    SourceSpec s = wcs;
    s.mean_intensity = mu;
    DecoyProtocolSpec p = tmpl;
    p.signal_intensity = mu;
    return secure_key_rate(p, s, ch).rate;
  };
  CHECK(rate_at(res.mu_star + 1e-4) <= res.rate_star + 1e-12);
  CHECK(rate_at(res.mu_star - 1e-4) <= res.rate_star + 1e-12);

  ChannelSpec hopeless = ch;
  hopeless.e_det = 0.25;
  CHECK_THROWS_AS(
      optimize_mu(wcs, hopeless, tmpl, DecoyScaling::Fixed, 0.12, 1.2, 1e-4),
      InfeasibleError);
}

TEST_CASE("maximum tolerable loss") {
  SourceSpec wcs;
  wcs.kind = SourceKind::Wcs;
  wcs.mean_intensity = 0.3;
  ChannelSpec ch;
  DecoyProtocolSpec proto;
  proto.signal_intensity = 0.3;
  proto.decoy_intensities = {0.1, 0.0};
  proto.method = EstimationMethod::LinearProgram;
  proto.n_cut = 15;

  const auto a = max_tolerable_loss(wcs, ch, proto);
  const auto b = max_tolerable_loss(wcs, ch, proto);
  CHECK(a.loss_db == b.loss_db);
  CHECK_FALSE(a.exceeded_cap);
  CHECK(a.loss_db > 0.0);
  CHECK(a.loss_db < 60.0);

  ChannelSpec darker = ch;
  darker.y0 = ch.y0 * 10.0;
  const auto c = max_tolerable_loss(wcs, darker, proto);
  CHECK(c.loss_db < a.loss_db);

  ChannelSpec noiseless = ch;
  noiseless.y0 = 0.0;
  noiseless.e_det = 0.0;
  const auto d = max_tolerable_loss(wcs, noiseless, proto);
  CHECK(d.exceeded_cap);
  CHECK(d.loss_db == 60.0);

  CHECK_THROWS_AS(max_tolerable_loss(wcs, ch, proto, 1.0), InfeasibleError);
}

TEST_CASE("decoy scaling modes") {
  DecoyProtocolSpec tmpl;
  tmpl.signal_intensity = 0.2;
  tmpl.decoy_intensities = {0.1, 0.0};

  const auto fixed = scaled_decoys(tmpl, DecoyScaling::Fixed, 0.35);
  CHECK(fixed == std::vector<double>{0.1, 0.0});

  const auto ratio = scaled_decoys(tmpl, DecoyScaling::MuRatio, 0.3);
  REQUIRE(ratio.size() == 2);
  CHECK(std::abs(ratio[0] - 0.15) < 1e-15);
  CHECK(ratio[1] == 0.0);
}

TEST_CASE("sweep grid validation") {
  SweepGrid g = fig_regime({0.3}, 0.1, SourceKind::Wcs, {10.0, 5.0});
  CHECK_THROWS_AS(g.validate(), DomainError);
  g.loss_points = {};
  CHECK_THROWS_AS(g.validate(), DomainError);
  g.loss_points = {5.0, 10.0};
  g.mu_points = {0.05};  // collides with the 0.1 decoy
  CHECK_THROWS_AS(g.validate(), DomainError);
  g.mu_points = {0.3};
  CHECK_NOTHROW(g.validate());
}
