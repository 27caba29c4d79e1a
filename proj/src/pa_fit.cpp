#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "hypolib/approximation.hpp"
#include "hypolib/error.hpp"
#include "hypolib/parallel.hpp"
#include "hypolib/random.hpp"

namespace hypolib {

namespace {

constexpr double kRidge = 1e-8;

struct FitData {
  std::size_t n = 0;   // dimension
  std::size_t q = 0;   // pieces per max
  Eigen::MatrixXd X;   // nodes x n
  Eigen::VectorXd t;   // targets

  [[nodiscard]] std::size_t stride() const { return n + 1; }
  [[nodiscard]] std::size_t params() const { return 2 * q * stride(); }
};

struct Assignment {
  std::vector<std::size_t> plus, minus;
  friend bool operator==(const Assignment&, const Assignment&) = default;
};

// Active pieces (ties to the lowest index) and the squared-error residual.
double evaluate(const FitData& d, const Eigen::VectorXd& theta, Assignment* assign) {
  const std::size_t s = d.stride();
  const std::size_t off = d.q * s;
  double res = 0.0;
  if (assign) {
    assign->plus.resize(d.X.rows());
    assign->minus.resize(d.X.rows());
  }
  for (Eigen::Index i = 0; i < d.X.rows(); ++i) {
    double best_p = -kInf, best_m = -kInf;
    std::size_t kp = 0, km = 0;
    for (std::size_t k = 0; k < d.q; ++k) {
      const double vp = d.X.row(i).dot(theta.segment(k * s, d.n)) + theta[k * s + d.n];
      const double vm = d.X.row(i).dot(theta.segment(off + k * s, d.n)) + theta[off + k * s + d.n];
      if (vp > best_p) {
        best_p = vp;
        kp = k;
      }
      if (vm > best_m) {
        best_m = vm;
        km = k;
      }
    }
    const double e = d.t[i] - (best_p - best_m);
    res += e * e;
    if (assign) {
      assign->plus[i] = kp;
      assign->minus[i] = km;
    }
  }
  return res;
}

// argmin |A theta - t|^2 + ridge |theta - ref|^2 for a fixed assignment.
Eigen::VectorXd solve(const FitData& d, const Assignment& a, const Eigen::VectorXd& ref) {
  const auto rows = d.X.rows();
  const auto p = static_cast<Eigen::Index>(d.params());
  const std::size_t s = d.stride();
  const std::size_t off = d.q * s;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(rows + p, p);
  Eigen::VectorXd b(rows + p);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto cp = static_cast<Eigen::Index>(a.plus[i] * s);
    const auto cm = static_cast<Eigen::Index>(off + a.minus[i] * s);
    for (std::size_t j = 0; j < d.n; ++j) {
      A(i, cp + static_cast<Eigen::Index>(j)) += d.X(i, static_cast<Eigen::Index>(j));
      A(i, cm + static_cast<Eigen::Index>(j)) -= d.X(i, static_cast<Eigen::Index>(j));
    }
    A(i, cp + static_cast<Eigen::Index>(d.n)) += 1.0;
    A(i, cm + static_cast<Eigen::Index>(d.n)) -= 1.0;
    b[i] = d.t[i];
  }
  const double r = std::sqrt(kRidge);
  A.bottomRows(p).diagonal().setConstant(r);
  b.tail(p) = r * ref;
  return A.householderQr().solve(b);
}

// Random node centers; every node joins its nearest center.
std::vector<std::size_t> random_partition(const FitData& d, std::mt19937_64& rng) {
  const auto rows = static_cast<std::size_t>(d.X.rows());
  std::vector<std::size_t> idx(rows);
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), rng);
  const std::size_t k = std::min(d.q, rows);
  std::vector<std::size_t> out(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    double best = kInf;
    for (std::size_t c = 0; c < k; ++c) {
      const double dist = (d.X.row(static_cast<Eigen::Index>(i)) - d.X.row(static_cast<Eigen::Index>(idx[c]))).squaredNorm();
      if (dist < best) {
        best = dist;
        out[i] = c;
      }
    }
  }
  return out;
}

struct RestartResult {
  Eigen::VectorXd theta;
  double residual = kInf;
  std::vector<double> trace;
  bool monotone = true;
};

// Random coefficients scaled to the data; the active pieces then define the
// first assignment.
Eigen::VectorXd random_theta(const FitData& d, std::mt19937_64& rng) {
  const double scale = std::max(1.0, d.t.cwiseAbs().maxCoeff());
  std::normal_distribution<double> g(0.0, scale);
  Eigen::VectorXd theta(static_cast<Eigen::Index>(d.params()));
  for (Eigen::Index i = 0; i < theta.size(); ++i) theta[i] = g(rng);
  return theta;
}

RestartResult run_restart(const FitData& d, std::mt19937_64 rng, std::size_t iterations, bool from_partition) {
  Assignment a;
  Eigen::VectorXd theta;
  if (from_partition) {
    a = Assignment{random_partition(d, rng), random_partition(d, rng)};
    theta = solve(d, a, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d.params())));
  } else {
    theta = random_theta(d, rng);
    evaluate(d, theta, &a);
    theta = solve(d, a, theta);
  }
  RestartResult out;
  double res = evaluate(d, theta, &a);
  out.trace.push_back(res);
  for (std::size_t it = 0; it < iterations; ++it) {
    const Eigen::VectorXd target = solve(d, a, theta);
    bool accepted = false;
    Eigen::VectorXd next;
    Assignment next_a;
    double next_res = res;
    for (double step = 1.0; step > 1e-9; step *= 0.5) {
      next = theta + step * (target - theta);
      next_res = evaluate(d, next, &next_a);
      if (next_res <= res) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    const bool fixpoint = next_a == a;
    const double gain = res - next_res;
    theta = next;
    a = next_a;
    res = next_res;
    out.trace.push_back(res);
    if (fixpoint && gain <= 1e-15 * std::max(1.0, res)) break;
  }
  out.monotone = std::is_sorted(out.trace.rbegin(), out.trace.rend());
  out.theta = theta;
  out.residual = res;
  return out;
}

MaxAffine unpack(const FitData& d, const Eigen::VectorXd& theta, std::size_t off) {
  std::vector<AffinePiece> pieces(d.q);
  for (std::size_t k = 0; k < d.q; ++k) {
    const std::size_t base = off + k * d.stride();
    pieces[k].slope.assign(theta.data() + base, theta.data() + base + d.n);
    pieces[k].offset = theta[static_cast<Eigen::Index>(base + d.n)];
  }
  return MaxAffine(std::move(pieces));
}

}  // namespace

PaFitResult pa_fit(const GridFn& target, std::size_t q, double rho, const PaFitOptions& opts) {
  if (q == 0) throw DomainError("piece budget q must be positive");
  if (!(rho >= 0.0)) throw DomainError("rho must be nonnegative");
  const GridDomain& dom = target.domain();
  std::vector<std::size_t> nodes;
  for (std::size_t m = 0; m < target.size(); ++m) {
    if (dom.norm_inf(m) <= rho + kGeomTol && target[m].is_finite()) nodes.push_back(m);
  }
  const std::size_t n = dom.dim();
  if (nodes.size() < 2 * (n + 1)) {
    throw PreconditionError("pa_fit needs at least " + std::to_string(2 * (n + 1)) +
                            " finite target nodes in the rho-ball, found " + std::to_string(nodes.size()));
  }
  FitData d;
  d.n = n;
  d.q = q;
  d.X.resize(static_cast<Eigen::Index>(nodes.size()), static_cast<Eigen::Index>(n));
  d.t.resize(static_cast<Eigen::Index>(nodes.size()));
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto p = dom.point(nodes[i]);
    for (std::size_t j = 0; j < n; ++j) d.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = p[j];
    d.t[static_cast<Eigen::Index>(i)] = target[nodes[i]].value();
  }

  const std::size_t restarts = std::max<std::size_t>(opts.restarts, 1);
  std::vector<RestartResult> results(restarts);
  parallel_for(restarts, [&](std::size_t r) {
    results[r] = run_restart(d, make_stream(opts.seed, "pa_fit", r), opts.iterations, r % 2 == 0);
  });
  std::size_t best = 0;
  bool monotone = true;
  for (std::size_t r = 0; r < restarts; ++r) {
    monotone = monotone && results[r].monotone;
    if (results[r].residual < results[best].residual) best = r;
  }
  PaFitResult out;
  out.fit = PaDiff{unpack(d, results[best].theta, 0), unpack(d, results[best].theta, q * d.stride()), rho};
  out.residual = results[best].residual;
  out.nodes = nodes.size();
  out.best_restart = best;
  out.trace = std::move(results[best].trace);
  out.monotone = monotone;
  return out;
}

}  // namespace hypolib
