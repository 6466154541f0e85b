#include "blockmax/tsgen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "blockmax/error.hpp"

namespace blockmax {

namespace {

double cauchy_from_uniform(double u) { return std::tan(std::numbers::pi * (u - 0.5)); }

double exceedance(double y, const MarginSource& s) {
  if (s.kind == MarginSource::Kind::frechet1) {
    return y > 0.0 ? -std::expm1(-1.0 / y) : 1.0;
  }
  return std::atan2(s.scale, y) / std::numbers::pi;
}

double from_exceedance(double e, const Marginal& target) {
  // The smallest exceedance a double series can produce is far above this,
  // but atan2 may round to exactly 0 or 1 for extreme Cauchy values.
  e = std::clamp(e, 0x1.0p-1074, 1.0 - 0x1.0p-53);
  switch (target.kind) {
    case Marginal::Kind::gpd:
      return gpd_quantile_upper(e, target.gamma);
    case Marginal::Kind::frechet1:
      return -1.0 / std::log1p(-e);
    case Marginal::Kind::gev: {
      const double t = -std::log1p(-e);
      const auto& p = target.gev;
      if (std::fabs(p.gamma) < kGammaZeroTol) return p.mu - p.sigma * std::log(t);
      return p.mu + p.sigma * std::expm1(-p.gamma * std::log(t)) / p.gamma;
    }
    case Marginal::Kind::native:
      break;
  }
  fail(Errc::invalid_argument, "transform_margins: native target has no quantile function");
}

void check_temporal(Temporal t, double param) {
  if (t == Temporal::iid) return;
  require(std::isfinite(param) && param >= 0.0 && param < 1.0, Errc::invalid_argument,
          "time series parameter must lie in [0, 1)");
}

std::vector<double> gen_iid(std::size_t n, RngStream& rng) {
  std::vector<double> out(n);
  for (double& v : out) v = rng.frechet();
  return out;
}

Matrix generate_stationary(const ModelSpec& spec, std::size_t n, RngStream& rng) {
  Matrix raw;
  if (spec.dim == 2) {
    raw = gen_bivariate(n, spec.temporal, spec.param, spec.copula, rng);
  } else {
    switch (spec.temporal) {
      case Temporal::iid:
        raw = Matrix::column(gen_iid(n, rng));
        break;
      case Temporal::armax:
        raw = Matrix::column(gen_armax(n, spec.param, rng));
        break;
      case Temporal::car:
        raw = Matrix::column(gen_car(n, spec.param, rng));
        break;
    }
  }
  if (spec.marginal.kind == Marginal::Kind::native) return raw;
  const auto source = native_source(spec.temporal, spec.param);
  for (std::size_t j = 0; j < raw.cols(); ++j) {
    const auto col = raw.column_values(j);
    raw.set_column(j, transform_margins(col, source, spec.marginal));
  }
  return raw;
}

}  // namespace

const char* to_string(Temporal t) {
  switch (t) {
    case Temporal::iid:
      return "iid";
    case Temporal::armax:
      return "armax";
    case Temporal::car:
      return "car";
  }
  return "unknown";
}

std::vector<double> gen_armax(std::size_t n, double alpha, RngStream& rng) {
  check_temporal(Temporal::armax, alpha);
  std::vector<double> out(n);
  if (n == 0) return out;
  out[0] = rng.frechet();
  for (std::size_t t = 1; t < n; ++t) out[t] = std::max(alpha * out[t - 1], (1.0 - alpha) * rng.frechet());
  return out;
}

std::vector<double> gen_car(std::size_t n, double phi, RngStream& rng) {
  check_temporal(Temporal::car, phi);
  std::vector<double> out(n);
  if (n == 0) return out;
  out[0] = rng.cauchy() / (1.0 - phi);
  for (std::size_t t = 1; t < n; ++t) out[t] = phi * out[t - 1] + rng.cauchy();
  return out;
}

MarginSource native_source(Temporal t, double param) {
  if (t == Temporal::car) return MarginSource::cauchy_scale(1.0 / (1.0 - param));
  return MarginSource::frechet1();
}

std::vector<double> transform_margins(std::span<const double> series, const MarginSource& source,
                                      double target_gamma) {
  return transform_margins(series, source, Marginal::gpd(target_gamma));
}

std::vector<double> transform_margins(std::span<const double> series, const MarginSource& source,
                                      const Marginal& target) {
  require(source.scale > 0.0, Errc::invalid_argument, "transform_margins: source scale must be positive");
  if (target.kind == Marginal::Kind::gev) {
    require(target.gev.sigma > 0.0, Errc::invalid_argument, "transform_margins: GEV scale must be positive");
  }
  std::vector<double> out(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) {
    require(std::isfinite(series[i]), Errc::domain_error, "transform_margins: non-finite value");
    out[i] = target.kind == Marginal::Kind::native ? series[i] : from_exceedance(exceedance(series[i], source), target);
  }
  return out;
}

Matrix gen_bivariate(std::size_t n, Temporal temporal, double param, const InnovationCopula& c, RngStream& rng) {
  check_temporal(temporal, param);
  Matrix out(n, 2);
  if (n == 0) return out;
  auto draw = [&] { return copula_draw(c, rng); };
  switch (temporal) {
    case Temporal::iid:
      for (std::size_t t = 0; t < n; ++t) {
        const auto [u1, u2] = draw();
        out(t, 0) = frechet_quantile(u1);
        out(t, 1) = frechet_quantile(u2);
      }
      break;
    case Temporal::armax: {
      const auto [s1, s2] = draw();
      out(0, 0) = frechet_quantile(s1);
      out(0, 1) = frechet_quantile(s2);
      for (std::size_t t = 1; t < n; ++t) {
        const auto [u1, u2] = draw();
        out(t, 0) = std::max(param * out(t - 1, 0), (1.0 - param) * frechet_quantile(u1));
        out(t, 1) = std::max(param * out(t - 1, 1), (1.0 - param) * frechet_quantile(u2));
      }
      break;
    }
    case Temporal::car: {
      const auto [s1, s2] = draw();
      out(0, 0) = cauchy_from_uniform(s1) / (1.0 - param);
      out(0, 1) = cauchy_from_uniform(s2) / (1.0 - param);
      for (std::size_t t = 1; t < n; ++t) {
        const auto [u1, u2] = draw();
        out(t, 0) = param * out(t - 1, 0) + cauchy_from_uniform(u1);
        out(t, 1) = param * out(t - 1, 1) + cauchy_from_uniform(u2);
      }
      break;
    }
  }
  return out;
}

Matrix gen_piecewise(std::size_t n, std::size_t r, const ModelSpec& base, RngStream& rng) {
  require(r >= 1 && r <= n, Errc::invalid_argument, "gen_piecewise: season length must satisfy 1 <= r <= n");
  ModelSpec season = base;
  season.piecewise.reset();
  validate(season);
  Matrix out(n, season.dim);
  for (std::size_t start = 0; start < n; start += r) {
    const std::size_t len = std::min(r, n - start);
    const Matrix s = generate_stationary(season, r, rng);
    for (std::size_t t = 0; t < len; ++t) {
      for (std::size_t j = 0; j < season.dim; ++j) out(start + t, j) = s(t, j);
    }
  }
  return out;
}

Matrix generate(const ModelSpec& spec, std::size_t n, RngStream& rng) {
  validate(spec);
  require(n >= 1, Errc::invalid_argument, "generate: series length must be >= 1");
  if (spec.piecewise) return gen_piecewise(n, std::min(*spec.piecewise, n), spec, rng);
  return generate_stationary(spec, n, rng);
}

void validate(const ModelSpec& spec) {
  require(spec.dim == 1 || spec.dim == 2, Errc::invalid_argument, "model: dimension must be 1 or 2");
  check_temporal(spec.temporal, spec.param);
  if (spec.marginal.kind == Marginal::Kind::gev) {
    require(spec.marginal.gev.sigma > 0.0, Errc::invalid_argument, "model: GEV scale must be positive");
  }
  if (spec.marginal.kind == Marginal::Kind::gpd) {
    require(std::isfinite(spec.marginal.gamma), Errc::invalid_argument, "model: GPD shape must be finite");
  }
  if (spec.piecewise) require(*spec.piecewise >= 1, Errc::invalid_argument, "model: season length must be >= 1");
  if (spec.dim == 2) {
    using F = InnovationCopula::Family;
    const auto& c = spec.copula;
    if (c.family == F::gaussian || c.family == F::student_t) {
      require(c.param > -1.0 && c.param < 1.0, Errc::invalid_argument, "model: copula rho must lie in (-1, 1)");
    }
    if (c.family == F::gumbel_hougaard) {
      require(c.param >= 1.0, Errc::invalid_argument, "model: Gumbel-Hougaard theta must be >= 1");
    }
  }
}

}  // namespace blockmax
