#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "blockmax/blocks.hpp"
#include "blockmax/matrix.hpp"
#include "blockmax/rng.hpp"

namespace blockmax {

/// Functions (f, ell) with h((x - b)/a, ...) = h(x, ...)/f(a, b) - ell(a, b).
struct LocScale {
  std::function<double(std::span<const double> a, std::span<const double> b)> f;
  std::function<double(std::span<const double> a, std::span<const double> b)> ell;
};

/// A symmetric kernel h of order p acting on d-vectors.
class Kernel {
 public:
  enum class Kind { mean, variance, gini, pwm, kendall, spearman, custom };
  using Args = std::span<const std::span<const double>>;
  using Fn = std::function<double(Args)>;

  static Kernel mean();
  static Kernel variance();
  static Kernel gini();
  /// max(x_1, ..., x_k) / k.
  static Kernel pwm(int k);
  static Kernel kendall();
  static Kernel spearman();
  static Kernel custom(std::string name, int order, std::size_t dim, Fn fn,
                       std::optional<LocScale> locscale = std::nullopt);

  [[nodiscard]] Kind kind() const noexcept { return kind_; }
  [[nodiscard]] const std::string& name() const noexcept { return name_; }
  [[nodiscard]] int order() const noexcept { return order_; }
  [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
  [[nodiscard]] const std::optional<LocScale>& locscale() const noexcept { return locscale_; }

  /// h(args[0], ..., args[p-1]); every argument must have length dim().
  [[nodiscard]] double operator()(Args args) const;
  /// Order-2 shortcut.
  [[nodiscard]] double pair(std::span<const double> x, std::span<const double> y) const;

 private:
  Kernel(Kind kind, std::string name, int order, std::size_t dim)
      : kind_(kind), name_(std::move(name)), order_(order), dim_(dim) {}

  Kind kind_;
  std::string name_;
  int order_;
  std::size_t dim_;
  Fn fn_;
  std::optional<LocScale> locscale_;
};

double kernel_eval(const Kernel& k, Kernel::Args args);

struct UStatResult {
  double value = 0.0;
  std::string kernel;
  /// "disjoint", "sliding", "bias_reduced_sliding" or "plain" for a bare matrix.
  std::string mode;
  std::size_t n_blocks = 0;
  /// Number of index tuples the kernel was averaged over.
  std::uint64_t pair_count = 0;
};

/// Naive enumeration is refused above this many tuples unless a fast path exists.
inline constexpr double kEnumerationGuard = 1e9;

/// Average of the kernel over all increasing p-tuples of rows.
UStatResult u_statistic(const Matrix& sample, const Kernel& k);
UStatResult u_statistic(const BlockMaxSample& sample, const Kernel& k);
UStatResult u_statistic(const StandardizedSample& sample, const Kernel& k);
/// u_statistic without fast paths: every tuple is evaluated through the kernel.
UStatResult u_statistic_enumerate(const Matrix& sample, const Kernel& k);

/// tau-hat = 2 U(kendall) - 1, with tied pairs scored as non-concordant.
/// O(N log N) for any sample, ties included.
double kendall_tau(const Matrix& sample);
/// Direct O(N^2) enumeration of the same quantity.
double kendall_tau_bruteforce(const Matrix& sample);

/// (1/N) sum_i [(i-1)...(i-k)] / [(N-1)...(N-k)] M_(i); k = 0 gives the mean.
double pwm_orderstat(std::span<const double> sample, int k);

/// Order-2 U-statistic restricted to pairs whose start indices differ by at
/// least r, normalised by the number of such pairs, C(N - r + 1, 2).
UStatResult bias_reduced_sliding(const BlockMaxSample& sample, const Kernel& k);
UStatResult bias_reduced_sliding(const StandardizedSample& sample, const Kernel& k);

/// Checks the location-scale identity on `trials` random argument tuples to
/// 1e-10 relative. Returns false if the kernel has no metadata.
bool locscale_check(const Kernel& k, std::span<const double> a, std::span<const double> b,
                    std::size_t trials, RngStream& rng);

}  // namespace blockmax
