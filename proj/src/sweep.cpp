#include "qsi/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "qsi/errors.hpp"

namespace qsi {

std::string to_string(DecoyScaling scaling) {
  return scaling == DecoyScaling::Fixed ? "fixed" : "mu_ratio";
}

namespace {

// Checks everything except the signal/decoy ordering, which only the
// per-point protocol (signal overridden with a concrete mu) can settle.
void validate_decoy_template(const DecoyProtocolSpec& tmpl) {
  DecoyProtocolSpec probe = tmpl;
  double top = 0.0;
  for (double d : probe.decoy_intensities) top = std::max(top, d);
  probe.signal_intensity = top + 1.0;
  probe.validate();
}

}  // namespace

void SweepGrid::validate() const {
  if (loss_points.empty()) throw DomainError("sweep: loss_points is empty");
  for (std::size_t i = 1; i < loss_points.size(); ++i)
    if (!(loss_points[i] > loss_points[i - 1]))
      throw DomainError("sweep: loss_points must be strictly increasing");
  for (double l : loss_points)
    if (!(l >= 0.0)) throw DomainError("sweep: loss_points must be >= 0");
  if (mu_points.empty()) throw DomainError("sweep: mu_points is empty");
  source.validate();
  channel.validate();
  validate_decoy_template(decoy);
  for (double mu : mu_points) {
    if (!(mu > 0.0)) throw DomainError("sweep: mu_points must be > 0");
    DecoyProtocolSpec proto = decoy;
    proto.signal_intensity = mu;
    proto.decoy_intensities = scaled_decoys(decoy, scaling, mu);
    proto.validate();
  }
}

std::vector<double> scaled_decoys(const DecoyProtocolSpec& tmpl,
                                  DecoyScaling scaling, double mu) {
  if (scaling == DecoyScaling::Fixed) return tmpl.decoy_intensities;
  if (!(tmpl.signal_intensity > 0.0))
    throw DomainError("scaled_decoys: template signal intensity must be > 0");
  std::vector<double> out;
  out.reserve(tmpl.decoy_intensities.size());
  for (double d : tmpl.decoy_intensities)
    out.push_back(d * (mu / tmpl.signal_intensity));
  return out;
}

CurveTable rate_vs_loss(const SweepGrid& grid) {
  grid.validate();
  CurveTable table;
  table.rows.reserve(grid.mu_points.size() * grid.loss_points.size());
  for (double mu : grid.mu_points) {
    DecoyProtocolSpec proto = grid.decoy;
    proto.signal_intensity = mu;
    proto.decoy_intensities = scaled_decoys(grid.decoy, grid.scaling, mu);
    double nu = 0.0;
    for (double d : proto.decoy_intensities) nu = std::max(nu, d);
    for (double loss : grid.loss_points) {
      ChannelSpec ch = grid.channel;
      ch.loss_db = loss;
      CurveRow row;
      row.source = grid.source.kind;
      row.mu = mu;
      row.nu = nu;
      row.loss_db = loss;
      try {
        const KeyRateResult r = secure_key_rate(proto, grid.source, ch);
        row.rate = r.rate;
        row.feasible = r.feasible;
      } catch (const Error&) {
        row.rate = 0.0;
        row.feasible = false;
      }
      row.throughput_bps = throughput_fom(row.rate, grid.source.repetition_rate);
      table.rows.push_back(row);
    }
  }
  return table;
}

double curve_spread(const CurveTable& table, SourceKind source,
                    double loss_db) {
  std::vector<double> rates;
  for (const CurveRow& row : table.rows)
    if (row.source == source && std::abs(row.loss_db - loss_db) < 1e-9 &&
        row.rate > 0.0)
      rates.push_back(row.rate);
  if (rates.size() < 2)
    throw InsufficientDataError(
        "curve_spread: need at least two positive rates at the given loss");
  const auto [lo, hi] = std::minmax_element(rates.begin(), rates.end());
  double mean = 0.0;
  for (double r : rates) mean += r;
  mean /= static_cast<double>(rates.size());
  return (*hi - *lo) / mean;
}

std::pair<double, double> maximize_scalar(
    const std::function<double(double)>& f, double lo, double hi, double tol) {
  if (!(lo <= hi)) throw DomainError("maximize_scalar: empty bracket");
  if (!(tol > 0.0)) throw DomainError("maximize_scalar: tolerance must be > 0");
  if (hi - lo <= tol) {
    const double mid = 0.5 * (lo + hi);
    return {mid, f(mid)};
  }

  constexpr int kGridPoints = 50;
  double best_x = lo;
  double best_f = f(lo);
  int best_i = 0;
  std::vector<double> xs(kGridPoints);
  for (int i = 0; i < kGridPoints; ++i) {
    xs[static_cast<std::size_t>(i)] =
        lo + (hi - lo) * i / (kGridPoints - 1);
    if (i == 0) continue;
    const double v = f(xs[static_cast<std::size_t>(i)]);
    if (v > best_f) {
      best_f = v;
      best_x = xs[static_cast<std::size_t>(i)];
      best_i = i;
    }
  }

  double a = xs[static_cast<std::size_t>(std::max(0, best_i - 1))];
  double b = xs[static_cast<std::size_t>(std::min(kGridPoints - 1, best_i + 1))];
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  const double xg = fc > fd ? c : d;
  const double fg = std::max(fc, fd);
  if (fg > best_f) return {xg, fg};
  return {best_x, best_f};
}

OptimizeResult optimize_mu(const SourceSpec& source, const ChannelSpec& ch,
                           const DecoyProtocolSpec& decoy_template,
                           DecoyScaling scaling, double mu_lo, double mu_hi,
                           double tol) {
  source.validate();
  ch.validate();
  validate_decoy_template(decoy_template);
  if (!(mu_lo > 0.0 && mu_lo <= mu_hi))
    throw DomainError("optimize_mu: bracket must satisfy 0 < mu_lo <= mu_hi");

  auto rate_at = [&](double mu) -> double {
    DecoyProtocolSpec proto = decoy_template;
    proto.signal_intensity = mu;
    proto.decoy_intensities = scaled_decoys(decoy_template, scaling, mu);
    for (double d : proto.decoy_intensities)
      if (!(d < mu)) return 0.0;
    try {
      return secure_key_rate(proto, source, ch).rate;
    } catch (const Error&) {
      return 0.0;
    }
  };

  const auto [mu_star, rate_star] = maximize_scalar(rate_at, mu_lo, mu_hi, tol);
  if (!(rate_star > 0.0))
    throw InfeasibleError("optimize_mu: rate is zero across the whole bracket");
  return OptimizeResult{mu_star, rate_star};
}

MaxLossResult max_tolerable_loss(const SourceSpec& source,
                                 const ChannelSpec& ch_template,
                                 const DecoyProtocolSpec& decoy,
                                 double rate_floor, double tol_db,
                                 double cap_db) {
  source.validate();
  ch_template.validate();
  decoy.validate();
  if (!(rate_floor > 0.0))
    throw DomainError("max_tolerable_loss: rate_floor must be > 0");
  if (!(tol_db > 0.0))
    throw DomainError("max_tolerable_loss: tol_db must be > 0");
  if (!(cap_db > 0.0))
    throw DomainError("max_tolerable_loss: cap_db must be > 0");

  auto rate_at = [&](double loss) -> double {
    ChannelSpec ch = ch_template;
    ch.loss_db = loss;
    try {
      return secure_key_rate(decoy, source, ch).rate;
    } catch (const Error&) {
      return 0.0;
    }
  };

  if (!(rate_at(0.0) > rate_floor))
    throw InfeasibleError(
        "max_tolerable_loss: rate is already at the floor with zero loss");
  if (rate_at(cap_db) > rate_floor) return MaxLossResult{cap_db, true};

  double lo = 0.0;
  double hi = cap_db;
  while (hi - lo > tol_db) {
    const double mid = 0.5 * (lo + hi);
    if (rate_at(mid) > rate_floor)
      lo = mid;
    else
      hi = mid;
  }
  return MaxLossResult{0.5 * (lo + hi), false};
}

std::string CurveTable::csv_header() {
  return "source,mu,nu,loss_db,rate,throughput_bps,feasible";
}

std::string CurveTable::csv() const {
  std::string out = csv_header() + "\n";
  char buf[256];
  for (const CurveRow& row : rows) {
    std::snprintf(buf, sizeof(buf), "%s,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n",
                  to_string(row.source).c_str(), row.mu, row.nu, row.loss_db,
                  row.rate, row.throughput_bps, row.feasible ? 1 : 0);
    out += buf;
  }
  return out;
}

void CurveTable::append(const CurveTable& other) {
  rows.insert(rows.end(), other.rows.begin(), other.rows.end());
}

}  // namespace qsi
