#include "thermo/pressure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

#include "thermo/linalg.hpp"

namespace thermo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kMaxTreeNodes = std::size_t{1} << 23;

// log(exp(a) + exp(b)) with +inf/-inf handled.
struct LogSum {
  double hi = -kInf;
  double acc = 0.0;
  void add(double x) {
    if (x == kInf) {
      hi = kInf;
      return;
    }
    if (hi == kInf || x == -kInf) return;
    if (x > hi) {
      acc = acc * std::exp(hi - x) + 1.0;
      hi = x;
    } else {
      acc += std::exp(x - hi);
    }
  }
  double value() const {
    if (hi == kInf || hi == -kInf) return hi;
    return hi + std::log(acc);
  }
};

}  // namespace

CylinderSet CylinderSet::of(std::vector<Word> words) {
  if (words.empty()) throw ValidationError("cylinder set: at least one cylinder required");
  const auto len = words.front().size();
  for (const auto &w : words)
    if (w.size() != len) throw ValidationError("cylinder set: cylinders must share one length");
  return {static_cast<int>(len), std::move(words)};
}

CylinderSet CylinderSet::constant_orbit(Symbol a, int length) {
  return of({Word{std::vector<Symbol>(static_cast<std::size_t>(length), a), 0}});
}

int default_depth_cap(int alphabet_size) {
  if (alphabet_size <= 2) return 16;
  if (alphabet_size == 3) return 10;
  return 8;
}

// ---------------------------------------------------------------------------
// Transfer-matrix oracle

double pressure_oracle(const Potential &phi) {
  const Subshift &s = phi.system();
  const int k = s.alphabet_size();
  const int depth = phi.depth();
  const auto states = enumerate_words(s, depth);
  const auto n = static_cast<Eigen::Index>(states.size());

  // Higher-block presentation: u -> v when u[1..] == v[..depth-1] and the
  // overlap word is admissible; the edge carries exp(phi(u)).
  std::vector<std::int64_t> index(static_cast<std::size_t>(std::pow(k, depth)), -1);
  for (Eigen::Index i = 0; i < n; ++i) index[word_code(states[i].view(), k)] = i;

  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto &u = states[static_cast<std::size_t>(i)].symbols;
    std::vector<Symbol> v(u.begin() + 1, u.end());
    v.push_back(0);
    for (int a = 0; a < k; ++a) {
      if (!s.allowed(u.back(), static_cast<Symbol>(a))) continue;
      v.back() = static_cast<Symbol>(a);
      const auto j = index[word_code(v, k)];
      if (j >= 0) t(i, j) = std::exp(phi(u));
    }
  }
  return std::log(linalg::perron_root(t).spectral_radius);
}

// ---------------------------------------------------------------------------
// Cover tree

CoverTree::CoverTree(const Potential &phi, const CylinderSet &Z, int m, int D, BallWeight weight) : m_(m), D_(D) {
  if (m < 0) throw ValidationError("cover tree: eps depth must be >= 0");
  if (D < 1) throw ValidationError("cover tree: depth cap must be >= 1");
  const Subshift &s = phi.system();
  const int k = s.alphabet_size();
  const int top = D + m;
  if (Z.length > top) throw ValidationError("cover tree: Z is finer than the deepest ball; raise D");
  for (const auto &w : Z.cylinders)
    if (static_cast<int>(w.size()) != Z.length || !s.admissible(w.view()))
      throw ValidationError("cover tree: Z must consist of admissible cylinders of one length");

  // Prefixes of Z at each level <= Z.length.
  std::vector<std::unordered_set<std::uint64_t>> z_prefix(static_cast<std::size_t>(Z.length) + 1);
  for (const auto &w : Z.cylinders)
    for (int L = 0; L <= Z.length; ++L) z_prefix[L].insert(word_code(w.view().first(static_cast<std::size_t>(L)), k));

  std::vector<std::vector<Symbol>> level{{}};
  level_start_.push_back(0);
  parent_.push_back(-1);
  ball_sum_.push_back(std::numeric_limits<double>::quiet_NaN());

  for (int L = 1; L <= top; ++L) {
    std::vector<std::vector<Symbol>> next;
    const int base = level_start_.back();
    level_start_.push_back(static_cast<int>(parent_.size()));
    for (std::size_t i = 0; i < level.size(); ++i) {
      for (int a = 0; a < k; ++a) {
        const auto sym = static_cast<Symbol>(a);
        if (!level[i].empty() && !s.allowed(level[i].back(), sym)) continue;
        std::vector<Symbol> w = level[i];
        w.push_back(sym);
        if (L <= Z.length && !z_prefix[L].count(word_code(w, k))) continue;
        parent_.push_back(base + static_cast<int>(i));
        const int n = L - m;
        if (n < 1) ball_sum_.push_back(std::numeric_limits<double>::quiet_NaN());
        else if (weight == BallWeight::inf) ball_sum_.push_back(inf_birkhoff_over_cylinder(phi, w, n));
        else ball_sum_.push_back(sup_birkhoff_over_cylinder(phi, w, n));
        next.push_back(std::move(w));
        if (parent_.size() > kMaxTreeNodes) throw ValidationError("cover tree: too many cylinders; lower D or eps depth");
      }
    }
    level = std::move(next);
  }
  level_start_.push_back(static_cast<int>(parent_.size()));
}

double CoverTree::log_cover_value(double alpha, int N) const {
  if (N < 1 || N > D_) throw ValidationError("insufficient depth: need 1 <= N <= D");
  const std::size_t count = parent_.size();
  std::vector<LogSum> children(count);
  double root = kInf;
  for (int L = D_ + m_; L >= 0; --L) {
    const int n = L - m_;
    for (int i = level_start_[L]; i < level_start_[L + 1]; ++i) {
      const double split = L == D_ + m_ ? kInf : children[i].value();
      const double own = (n >= N && n <= D_) ? -alpha * n + ball_sum_[i] : kInf;
      const double cost = std::min(own, split);
      if (parent_[i] >= 0) children[parent_[i]].add(cost);
      else root = cost;
    }
  }
  if (root == kInf) throw ValidationError("insufficient depth: Z cannot be covered with N <= n_i <= D");
  return root;
}

double CoverTree::log_uniform_value(double alpha, int N) const {
  if (N < 1 || N > D_) throw ValidationError("insufficient depth: need 1 <= N <= D");
  const int L = N + m_;
  LogSum sum;
  for (int i = level_start_[L]; i < level_start_[L + 1]; ++i) sum.add(-alpha * N + ball_sum_[i]);
  return sum.value();
}

double cp_cover_value(const Potential &phi, const CylinderSet &Z, const CpParams &p) {
  if (p.N > p.D) throw ValidationError("insufficient depth: N exceeds D");
  return std::exp(CoverTree(phi, Z, p.m, p.D, p.weight).log_cover_value(p.alpha, p.N));
}

double cp_uniform_value(const Potential &phi, const CylinderSet &Z, double alpha, int N, int m, BallWeight weight) {
  return std::exp(CoverTree(phi, Z, m, N, weight).log_uniform_value(alpha, N));
}

EstimateReport jump_up_point(const Potential &phi, const CylinderSet &Z, const std::vector<int> &N_schedule, int m,
                             int D, double tolerance, BallWeight weight) {
  if (N_schedule.empty()) throw ValidationError("jump_up_point: empty N schedule");
  if (!std::is_sorted(N_schedule.begin(), N_schedule.end()))
    throw ValidationError("jump_up_point: N schedule must be increasing");
  const CoverTree tree(phi, Z, m, D, weight);
  EstimateReport report;
  report.params.eps_depth = m;
  report.params.D = D;

  // M is non-decreasing in N, so the previous lower bracket stays valid and
  // the reported crossings are non-decreasing.
  double lo = std::numeric_limits<double>::quiet_NaN();
  for (int N : N_schedule) {
    auto above = [&](double alpha) { return tree.log_cover_value(alpha, N) >= 0.0; };
    double step = 1.0;
    if (std::isnan(lo)) {
      lo = 0.0;
      while (!above(lo)) {
        lo -= step;
        step *= 2;
        if (step > 1e12) throw NumericalError("jump_up_point: no lower bracket");
      }
    }
    double hi = lo + 1.0;
    step = 1.0;
    while (above(hi)) {
      lo = hi;
      step *= 2;
      hi += step;
      if (step > 1e12) throw NumericalError("jump_up_point: no upper bracket");
    }
    while (hi - lo > tolerance) {
      const double mid = 0.5 * (lo + hi);
      (above(mid) ? lo : hi) = mid;
    }
    ScaleParams p;
    p.n = N;
    p.eps_depth = m;
    p.D = D;
    report.trace.push_back({static_cast<double>(N), lo, p});
  }
  report.value = report.trace.back().value;
  return report;
}

LowerUpper cp_lower_upper(const Potential &phi, const CylinderSet &Z, int m, const std::vector<int> &N_range,
                          BallWeight weight) {
  if (N_range.empty()) throw ValidationError("cp_lower_upper: empty N range");
  const int D = *std::max_element(N_range.begin(), N_range.end());
  const CoverTree tree(phi, Z, m, D, weight);
  LowerUpper out{kInf, -kInf, {}};
  out.trace.params.eps_depth = m;
  for (int N : N_range) {
    const double crossing = tree.log_uniform_value(0.0, N) / N;
    ScaleParams p;
    p.n = N;
    p.eps_depth = m;
    out.trace.trace.push_back({static_cast<double>(N), crossing, p});
    out.lower = std::min(out.lower, crossing);
    out.upper = std::max(out.upper, crossing);
  }
  out.trace.value = out.trace.trace.back().value;
  return out;
}

// ---------------------------------------------------------------------------
// Separated sets inside X_{n,F}

std::string SeparationMode::name() const { return kind == Kind::n_eps ? "n_eps" : "hamming"; }

EstimateReport separated_pressure(const Potential &phi, const NeighborhoodSpec &F, int n, int m,
                                  const SeparationMode &mode) {
  const Subshift &s = phi.system();
  const int k = s.alphabet_size();
  const int L = F.depth();
  if (n < 1 || m < 0) throw ValidationError("separated_pressure: need n >= 1 and m >= 0");
  if (L > n) throw ValidationError("separated_pressure: neighbourhood depth exceeds n");
  if (L < phi.depth()) throw ValidationError("separated_pressure: neighbourhood depth is below the potential's depth");
  if (F.marginal().size() != static_cast<std::size_t>(std::pow(k, L)))
    throw ValidationError("separated_pressure: neighbourhood built on another alphabet");
  if (mode.kind == SeparationMode::Kind::hamming) (void)HammingParams(mode.delta);

  const int len = n + m;
  const double windows = n - L + 1;
  std::vector<double> counts(F.marginal().size(), 0.0);
  std::vector<Symbol> buf(static_cast<std::size_t>(len));
  std::vector<Word> survivors;
  LogSum total;

  auto in_F = [&] {
    double tv = 0.0;
    for (std::size_t c = 0; c < counts.size(); ++c) tv += std::abs(counts[c] / windows - F.marginal()[c]);
    return 0.5 * tv < F.radius();
  };

  // Depth-first over admissible words of length n + m; membership in X_{n,F}
  // is decided by the n-prefix, so failing subtrees are pruned at depth n.
  auto dfs = [&](auto &&self, int pos) -> void {
    if (pos == n && !in_F()) return;
    if (pos == len) {
      if (mode.kind == SeparationMode::Kind::n_eps) total.add(sup_birkhoff_over_cylinder(phi, buf, n));
      else survivors.push_back(Word{buf, 0});
      return;
    }
    for (int a = 0; a < k; ++a) {
      const auto sym = static_cast<Symbol>(a);
      if (pos > 0 && !s.allowed(buf[pos - 1], sym)) continue;
      buf[pos] = sym;
      const bool window = pos + 1 >= L && pos + 1 <= n;
      std::uint64_t code = 0;
      if (window) {
        code = word_code(std::span<const Symbol>(buf).subspan(static_cast<std::size_t>(pos + 1 - L), static_cast<std::size_t>(L)), k);
        counts[code] += 1.0;
      }
      self(self, pos + 1);
      if (window) counts[code] -= 1.0;
    }
  };
  dfs(dfs, 0);

  if (mode.kind == SeparationMode::Kind::hamming) {
    const auto kept = extract_separated(std::move(survivors), SeparationRule::hamming(n, m, mode.delta));
    for (const auto &w : kept) total.add(sup_birkhoff_over_cylinder(phi, w.view(), n));
  }

  EstimateReport report;
  report.params.n = n;
  report.params.eps_depth = m;
  report.params.theta = F.radius();
  report.params.L = L;
  if (mode.kind == SeparationMode::Kind::hamming) report.params.delta = mode.delta;
  const double log_sum = total.value();
  report.value = log_sum / n;
  if (log_sum == -kInf) report.flag = "empty";
  report.trace.push_back({static_cast<double>(n), report.value, report.params});
  return report;
}

std::vector<SpSchedulePoint> coupled_schedule(const std::vector<int> &eps_depths, const std::vector<int> &ns,
                                              double theta_scale, double theta_cap) {
  std::vector<SpSchedulePoint> out;
  for (int m : eps_depths)
    for (int n : ns) out.push_back({n, m, std::min(theta_cap, theta_scale / std::sqrt(static_cast<double>(n)))});
  return out;
}

EstimateReport sp_estimate(const Potential &phi, const MeasureSpec &mu, int L,
                           const std::vector<SpSchedulePoint> &schedule, const SeparationMode &mode) {
  if (schedule.empty()) throw ValidationError("sp_estimate: empty schedule");
  EstimateReport report;
  for (const auto &pt : schedule) {
    const NeighborhoodSpec F(phi.system(), mu, L, pt.theta);
    auto r = separated_pressure(phi, F, pt.n, pt.m, mode);
    report.trace.push_back(r.trace.back());
    report.flag = r.flag;
    report.params = r.params;
  }
  report.value = report.trace.back().value;
  return report;
}

}  // namespace thermo
