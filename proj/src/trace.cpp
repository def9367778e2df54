// Copyright 2026 the fcvi authors
// SPDX-License-Identifier: Apache-2.0
#include "fcvi/trace.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace fcvi {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string ConvergenceTrace::to_csv() const {
  std::string out = "t,gamma_sum,infeas,gap_restricted,lambda_norm,eta,wall_s\n";
  for (const auto& r : records) {
    out += std::to_string(r.t);
    out += ',';
    out += fmt(r.gamma_sum);
    out += ',';
    out += fmt(r.infeasibility);
    out += ',';
    out += fmt(r.gap_restricted);
    out += ',';
    out += fmt(r.lambda_norm);
    out += ',';
    out += fmt(r.eta);
    out += ',';
    out += fmt(r.wall_s);
    out += '\n';
  }
  return out;
}

ConvergenceTrace ConvergenceTrace::from_csv(const std::string& text) {
  ConvergenceTrace trace;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "t,gamma_sum,infeas,gap_restricted,lambda_norm,eta,wall_s")
    throw InputError("trace csv: unexpected header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    TraceRecord r;
    if (std::sscanf(line.c_str(), "%ld,%lf,%lf,%lf,%lf,%lf,%lf", &r.t, &r.gamma_sum,
                    &r.infeasibility, &r.gap_restricted, &r.lambda_norm, &r.eta,
                    &r.wall_s) != 7)
      throw InputError("trace csv: malformed row '" + line + "'");
    trace.records.push_back(r);
  }
  return trace;
}

RateFit fit_rate_points(const std::vector<double>& ts, const std::vector<double>& errors,
                        ErrorChannel channel) {
  if (ts.size() != errors.size()) throw InputError("fit_rate: size mismatch");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (!(errors[i] > 1e-13)) continue;  // below the floating-point floor
    lx.push_back(std::log(ts[i]));
    ly.push_back(std::log(errors[i]));
  }
  const auto n = static_cast<int>(lx.size());
  if (n < 4)
    throw InputError("fit_rate: needs at least 4 checkpoints with positive error, got " +
                     std::to_string(n));
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    sx += lx[static_cast<std::size_t>(i)];
    sy += ly[static_cast<std::size_t>(i)];
    sxx += lx[static_cast<std::size_t>(i)] * lx[static_cast<std::size_t>(i)];
    sxy += lx[static_cast<std::size_t>(i)] * ly[static_cast<std::size_t>(i)];
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0) throw InputError("fit_rate: degenerate abscissae");
  RateFit fit;
  fit.channel = channel;
  fit.points_used = n;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss = 0;
  for (int i = 0; i < n; ++i) {
    const double r = ly[static_cast<std::size_t>(i)] -
                     (fit.intercept + fit.slope * lx[static_cast<std::size_t>(i)]);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

namespace {

double channel_value(const TraceRecord& r, ErrorChannel channel) {
  return channel == ErrorChannel::Infeasibility ? r.infeasibility : r.gap_restricted;
}

}  // namespace

RateFit fit_rate(const ConvergenceTrace& trace, ErrorChannel channel, double tail_fraction) {
  if (!(tail_fraction > 0) || tail_fraction > 1)
    throw InputError("fit_rate: tail_fraction must be in (0, 1]");
  const std::size_t k = trace.records.size();
  const std::size_t take = std::max<std::size_t>(
      4, static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(k))));
  const std::size_t start = k > take ? k - take : 0;
  std::vector<double> ts, errs;
  for (std::size_t i = start; i < k; ++i) {
    ts.push_back(static_cast<double>(trace.records[i].t));
    errs.push_back(channel_value(trace.records[i], channel));
  }
  return fit_rate_points(ts, errs, channel);
}

RateFit fit_rate_from(const ConvergenceTrace& trace, ErrorChannel channel, long t_min) {
  std::vector<double> ts, errs;
  for (const auto& r : trace.records) {
    if (r.t < t_min) continue;
    ts.push_back(static_cast<double>(r.t));
    errs.push_back(channel_value(r, channel));
  }
  return fit_rate_points(ts, errs, channel);
}

std::vector<long> checkpoint_grid(long T) {
  std::vector<long> out;
  for (long c = 1; c < T; c *= 2) out.push_back(c);
  if (T >= 1) out.push_back(T);
  return out;
}

}  // namespace fcvi
