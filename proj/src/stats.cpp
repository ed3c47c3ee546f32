#include "invcorr/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <vector>

namespace invcorr {

SampleMatrix make_sample_matrix(std::int64_t rows, int cols) {
  if (rows < 0 || cols < 1) {
    fail(ErrorCode::dimension, "sample matrix needs rows >= 0 and cols >= 1");
  }
  SampleMatrix samples;
  samples.rows = rows;
  samples.cols = cols;
  samples.data.assign(static_cast<std::size_t>(rows) *
                          static_cast<std::size_t>(cols),
                      0.0);
  return samples;
}

void write_csv(std::ostream& out, const SampleMatrix& samples) {
  for (int j = 0; j < samples.cols; ++j) {
    out << (j ? ",X" : "X") << (j + 1);
  }
  out << '\n';
  out.precision(17);
  for (std::int64_t i = 0; i < samples.rows; ++i) {
    for (int j = 0; j < samples.cols; ++j) {
      if (j) out << ',';
      out << samples(i, j);
    }
    out << '\n';
  }
}

double chunked_sum(std::span<const double> values) {
  const std::int64_t n = static_cast<std::int64_t>(values.size());
  const std::int64_t chunks = (n + kReductionChunk - 1) / kReductionChunk;
  std::vector<double> partials(static_cast<std::size_t>(std::max<std::int64_t>(chunks, 1)), 0.0);
#pragma omp parallel for schedule(static)
  for (std::int64_t c = 0; c < chunks; ++c) {
    const std::int64_t lo = c * kReductionChunk;
    const std::int64_t hi = std::min(n, lo + kReductionChunk);
    double sum = 0.0;
    for (std::int64_t i = lo; i < hi; ++i) sum += values[static_cast<std::size_t>(i)];
    partials[static_cast<std::size_t>(c)] = sum;
  }
  double total = 0.0;
  for (double partial : partials) total += partial;
  return total;
}

namespace {

struct ChunkMoments {
  double sx = 0.0, sy = 0.0, sxx = 0.0, syy = 0.0, sxy = 0.0;
};

PairMoments finish_moments(const std::vector<ChunkMoments>& partials,
                           std::int64_t n) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (const auto& c : partials) {
    sx += c.sx;
    sy += c.sy;
    sxx += c.sxx;
    syy += c.syy;
    sxy += c.sxy;
  }
  PairMoments m;
  m.n = n;
  const double dn = static_cast<double>(n);
  m.mean_x = sx / dn;
  m.mean_y = sy / dn;
  m.var_x = sxx / dn - m.mean_x * m.mean_x;
  m.var_y = syy / dn - m.mean_y * m.mean_y;
  m.cov = sxy / dn - m.mean_x * m.mean_y;
  return m;
}

}  // namespace

PairMoments pair_moments(ColumnView x, ColumnView y,
                         const std::function<double(double)>& g) {
  if (x.n != y.n || x.n == 0) {
    fail(ErrorCode::dimension, "pair_moments needs equal nonzero lengths");
  }
  const std::int64_t n = x.n;
  const std::int64_t chunks = (n + kReductionChunk - 1) / kReductionChunk;
  std::vector<ChunkMoments> partials(static_cast<std::size_t>(chunks));
  const bool mapped = static_cast<bool>(g);
#pragma omp parallel for schedule(static)
  for (std::int64_t c = 0; c < chunks; ++c) {
    const std::int64_t lo = c * kReductionChunk;
    const std::int64_t hi = std::min(n, lo + kReductionChunk);
    ChunkMoments cm;
    if (mapped) {
      for (std::int64_t i = lo; i < hi; ++i) {
        const double gx = g(x[i]);
        const double gy = g(y[i]);
        cm.sx += gx;
        cm.sy += gy;
        cm.sxx += gx * gx;
        cm.syy += gy * gy;
        cm.sxy += gx * gy;
      }
    } else {
      for (std::int64_t i = lo; i < hi; ++i) {
        const double gx = x[i];
        const double gy = y[i];
        cm.sx += gx;
        cm.sy += gy;
        cm.sxx += gx * gx;
        cm.syy += gy * gy;
        cm.sxy += gx * gy;
      }
    }
    partials[static_cast<std::size_t>(c)] = cm;
  }
  return finish_moments(partials, n);
}

PairMoments pair_moments(ColumnView x, ColumnView y) {
  return pair_moments(x, y, nullptr);
}

double pearson(ColumnView x, ColumnView y) {
  const PairMoments m = pair_moments(x, y);
  if (m.var_x <= 0.0 || m.var_y <= 0.0) {
    fail(ErrorCode::admissibility, "pearson: degenerate column");
  }
  return m.cov / std::sqrt(m.var_x * m.var_y);
}

double pearson_serial(ColumnView x, ColumnView y) {
  if (x.n != y.n || x.n == 0) {
    fail(ErrorCode::dimension, "pearson needs equal nonzero lengths");
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::int64_t i = 0; i < x.n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    syy += y[i] * y[i];
    sxy += x[i] * y[i];
  }
  const double dn = static_cast<double>(x.n);
  const double vx = sxx / dn - (sx / dn) * (sx / dn);
  const double vy = syy / dn - (sy / dn) * (sy / dn);
  if (vx <= 0.0 || vy <= 0.0) {
    fail(ErrorCode::admissibility, "pearson: degenerate column");
  }
  return (sxy / dn - (sx / dn) * (sy / dn)) / std::sqrt(vx * vy);
}

double ks_uniform_statistic(ColumnView values) {
  std::vector<double> sorted(static_cast<std::size_t>(values.n));
  for (std::int64_t i = 0; i < values.n; ++i) {
    sorted[static_cast<std::size_t>(i)] = values[i];
  }
  std::sort(sorted.begin(), sorted.end());
  const double dn = static_cast<double>(values.n);
  double stat = 0.0;
  for (std::int64_t i = 0; i < values.n; ++i) {
    const double x = std::clamp(sorted[static_cast<std::size_t>(i)], 0.0, 1.0);
    const double hi = (static_cast<double>(i) + 1.0) / dn - x;
    const double lo = x - static_cast<double>(i) / dn;
    stat = std::max({stat, hi, lo});
  }
  return stat;
}

double chi_square_tail(double stat, int dof) {
  boost::math::chi_squared dist(dof);
  return boost::math::cdf(boost::math::complement(dist, stat));
}

double normal_quantile(double p) {
  boost::math::normal dist;
  return boost::math::quantile(dist, p);
}

double exact_tie_frequency(const SampleMatrix& samples, int col_a, int col_b) {
  std::int64_t ties = 0;
#pragma omp parallel for schedule(static) reduction(+ : ties)
  for (std::int64_t i = 0; i < samples.rows; ++i) {
    if (samples(i, col_a) == samples(i, col_b)) ++ties;
  }
  return static_cast<double>(ties) / static_cast<double>(samples.rows);
}

double lower_orthant_frequency(const SampleMatrix& samples, int col_a,
                               int col_b, double u) {
  std::int64_t hits = 0;
#pragma omp parallel for schedule(static) reduction(+ : hits)
  for (std::int64_t i = 0; i < samples.rows; ++i) {
    if (samples(i, col_a) <= u && samples(i, col_b) <= u) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(samples.rows);
}

}  // namespace invcorr
