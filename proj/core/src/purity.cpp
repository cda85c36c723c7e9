#include "qmult/purity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "qmult/random.hpp"

namespace qmult {

namespace {

constexpr double kDegeneracyTol = 1e-10;

// Runs fn(i) for i in [0, count). Each index writes only its own slot, so
// the outcome is independent of the thread count.
template <class Fn>
void for_each_index(std::size_t count, std::size_t threads, Fn&& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, count));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < count; i += threads) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

ComplexMatrix hermitian_power(const ComplexMatrix& m, const NormOrder& exponent_plus_one, const HermitianEigen& eig) {
  // m^(p-1) for a positive m
  const double e = exponent_plus_one.value() - 1.0;
  if (exponent_plus_one.is_integer()) {
    const auto k = static_cast<long>(e);
    ComplexMatrix out = identity(static_cast<std::size_t>(m.rows()));
    for (long i = 0; i < k; ++i) out = out * m;
    return out;
  }
  return apply_spectral(eig, [e](double x) { return x > 0.0 ? std::pow(x, e) : 0.0; });
}

struct AscentRun {
  ComplexVector psi;
  double value = -1.0;
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<double> trace;
  double max_decrease = 0.0;
};

struct Evaluation {
  ComplexMatrix output;
  HermitianEigen eig;
  double value;
};

Evaluation evaluate(const QuantumChannel& channel, const ComplexVector& psi, const NormOrder& p) {
  Evaluation ev;
  ev.output = apply(channel, psi * psi.adjoint());
  ev.eig = hermitian_eigen_unchecked(ev.output);
  ev.value = schatten_norm_of_spectrum(ev.eig.values, p);
  return ev;
}

AscentRun ascend(const QuantumChannel& channel, const NormOrder& p, ComplexVector psi, const AscentOptions& opt) {
  AscentRun run;
  Evaluation cur = evaluate(channel, psi, p);
  run.psi = psi;
  run.value = cur.value;
  run.trace.push_back(cur.value);

  for (std::size_t it = 0; it < opt.max_iterations; ++it) {
    ComplexMatrix grad;
    if (p.is_infinite()) {
      const ComplexVector v = principal_eigenvector(cur.output);
      grad = apply_adjoint(channel, v * v.adjoint());
    } else {
      grad = apply_adjoint(channel, hermitian_power(cur.output, p, cur.eig));
    }
    const ComplexVector next = principal_eigenvector(grad);
    Evaluation nxt = evaluate(channel, next, p);
    run.iterations = it + 1;
    run.trace.push_back(nxt.value);

    const double change = nxt.value - cur.value;
    run.max_decrease = std::max(run.max_decrease, -change);
    if (nxt.value > run.value) {
      run.value = nxt.value;
      run.psi = next;
    }
    cur = std::move(nxt);
    if (std::abs(change) < opt.tol) {
      run.converged = true;
      break;
    }
  }
  return run;
}

FactorDims concat_dims(std::span<const QuantumChannel> factors) {
  FactorDims out;
  for (const auto& f : factors) {
    const FactorDims d = f.dims();
    out.insert(out.end(), d.begin(), d.end());
  }
  return out;
}

}  // namespace

double closed_form_nu_p(std::size_t d, double q, const NormOrder& p) {
  if (d < 1) throw std::invalid_argument("dimension must be positive");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("depolarizing parameter q must lie in [0, 1]");
  const double dd = static_cast<double>(d);
  const double top = 1.0 - (dd - 1.0) * q / dd;
  const double rest = q / dd;
  if (p.is_infinite()) return d == 1 ? top : std::max(top, rest);
  const double pv = p.value();
  return std::pow(std::pow(top, pv) + (dd - 1.0) * std::pow(rest, pv), 1.0 / pv);
}

ProductClosedForm closed_form_product_nu_p(std::span<const DepolarizingForm> factors, const NormOrder& p) {
  ProductClosedForm out;
  out.value = 1.0;
  for (const auto& f : factors) out.value *= closed_form_nu_p(f.d, f.q, p);
  out.conjectural = !p.is_infinite() && !p.is_integer();
  return out;
}

std::optional<ProductClosedForm> closed_form_for(const QuantumChannel& channel, const NormOrder& p) {
  if (!channel.is_depolarizing_product()) return std::nullopt;
  std::vector<DepolarizingForm> factors;
  for (const auto* leaf : channel.leaves()) factors.push_back(std::get<DepolarizingForm>(leaf->form()));
  return closed_form_product_nu_p(factors, p);
}

ComplexVector principal_eigenvector(const ComplexMatrix& m) {
  const HermitianEigen eig = hermitian_eigen_unchecked(m);
  const double top = eig.values(0);
  const double cutoff = top - kDegeneracyTol * std::max(1.0, std::abs(top));

  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < eig.values.size() && eig.values(i) >= cutoff; ++i) {
    const auto a = eig.vectors.col(i).cwiseAbs();
    const auto b = eig.vectors.col(best).cwiseAbs();
    for (Eigen::Index k = 0; k < a.size(); ++k) {
      if (a(k) > b(k)) {
        best = i;
        break;
      }
      if (a(k) < b(k)) break;
    }
  }

  ComplexVector v = eig.vectors.col(best);
  v /= v.norm();
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    const double mag = std::abs(v(k));
    if (mag > 1e-12) {
      v *= std::conj(v(k)) / mag;
      v(k) = mag;
      break;
    }
  }
  return v;
}

PurityReport maximize_output_norm(const QuantumChannel& channel, const NormOrder& p, const AscentOptions& options) {
  if (options.restarts == 0) throw std::invalid_argument("restarts must be >= 1");
  if (!(options.tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  const std::size_t d = channel.dim();
  const FactorDims dims = channel.dims();
  for (const auto& w : options.warm_starts) {
    if (w.dim() != d) throw std::invalid_argument("warm start dimension does not match the channel");
  }

  PurityReport report;
  report.channel = channel.describe();
  report.p = p;
  if (const auto cf = closed_form_for(channel, p)) report.closed_form = cf->value;

  auto start = [&](std::size_t i) -> ComplexVector {
    if (i < options.restarts) {
      Rng rng = make_rng(derive_seed(options.seed, i));
      return haar_vector(d, rng);
    }
    return options.warm_starts[i - options.restarts].amplitudes();
  };

  if (p.is_one() && validate(channel).passed()) {
    // Every state of a trace-preserving positive map has unit trace norm.
    report.nu_p = 1.0;
    report.maximizer = PureState(start(0), dims);
    report.restarts = 1;
    report.iterations = {0};
    report.converged = true;
    report.short_circuit = true;
    report.ascent_trace = {1.0};
    return report;
  }

  const std::size_t total = options.restarts + options.warm_starts.size();
  std::vector<AscentRun> runs(total);
  for_each_index(total, options.threads, [&](std::size_t i) { runs[i] = ascend(channel, p, start(i), options); });

  // Best value wins; ties go to the lowest index.
  std::size_t best = 0;
  for (std::size_t i = 1; i < total; ++i) {
    if (runs[i].value > runs[best].value) best = i;
  }

  report.restarts = total;
  report.best_restart = best;
  report.maximizer = PureState(runs[best].psi, dims);
  // Recompute at the reported maximizer so the value is exactly reproducible from it.
  report.nu_p = schatten_norm(apply(channel, report.maximizer.projector()), p);
  report.converged = runs[best].converged;
  report.ascent_trace = runs[best].trace;
  for (const auto& r : runs) {
    report.iterations.push_back(r.iterations);
    report.max_step_decrease = std::max(report.max_step_decrease, r.max_decrease);
  }
  return report;
}

double norm_1_to_p_ratio(const QuantumChannel& channel, const ComplexMatrix& a, const NormOrder& p) {
  require_hermitian(a, "norm_1_to_p_ratio");
  const double denom = schatten_norm(a, NormOrder(1.0));
  if (denom == 0.0) throw std::invalid_argument("norm_1_to_p_ratio: input is zero");
  return schatten_norm(hermitian_part(apply(channel, a)), p) / denom;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::consistent:
      return "consistent";
    case Verdict::violation_candidate:
      return "violation candidate";
    case Verdict::inconclusive:
      return "inconclusive";
  }
  return "unknown";
}

MultiplicativityReport check_multiplicativity(std::span<const QuantumChannel> factors, const NormOrder& p,
                                              const MultiplicativityOptions& options) {
  if (factors.empty()) throw std::invalid_argument("check_multiplicativity needs at least one factor");
  std::size_t total = 1;
  for (const auto& f : factors) total *= f.dim();
  if (total > options.max_dim) {
    throw std::invalid_argument("product dimension " + std::to_string(total) + " exceeds the cap of " +
                                std::to_string(options.max_dim));
  }

  auto run = [&](std::size_t restart_scale) {
    MultiplicativityReport r;
    r.p = p;
    AscentOptions opt = options.ascent;
    opt.restarts *= restart_scale;
    opt.warm_starts.clear();

    r.rhs = 1.0;
    for (std::size_t i = 0; i < factors.size(); ++i) {
      AscentOptions fo = opt;
      fo.seed = derive_seed(options.ascent.seed, i + 1);
      r.factor_reports.push_back(maximize_output_norm(factors[i], p, fo));
      r.rhs *= r.factor_reports.back().nu_p;
    }

    if (factors.size() == 1) {
      r.product_report = r.factor_reports.front();
      r.lhs = r.rhs;
    } else {
      std::vector<QuantumChannel> copy(factors.begin(), factors.end());
      const QuantumChannel product = QuantumChannel::product(std::move(copy));
      ComplexVector warm = r.factor_reports.front().maximizer.amplitudes();
      for (std::size_t i = 1; i < factors.size(); ++i) {
        warm = tensor_product(warm, r.factor_reports[i].maximizer.amplitudes());
      }
      warm /= warm.norm();
      AscentOptions po = opt;
      po.seed = derive_seed(options.ascent.seed, 0);
      po.warm_starts.emplace_back(warm, concat_dims(factors));
      r.product_report = maximize_output_norm(product, p, po);
      r.lhs = r.product_report.nu_p;
      r.closed_form = closed_form_for(product, p);
    }
    if (factors.size() == 1) r.closed_form = closed_form_for(factors.front(), p);
    r.gap = r.lhs - r.rhs;
    return r;
  };

  MultiplicativityReport r = run(1);
  if (r.gap > options.violation_tol) {
    r = run(std::max<std::size_t>(1, options.reverify_factor));
    r.reverified = true;
  }
  if (r.gap > options.violation_tol) {
    r.verdict = Verdict::violation_candidate;
  } else if (r.gap < -options.ascent_slack) {
    r.verdict = Verdict::inconclusive;
  } else {
    r.verdict = Verdict::consistent;
  }
  return r;
}

namespace {

// Hermitian a maximizing <g, a> over the unit ball of the q-norm.
ComplexMatrix dual_direction(const ComplexMatrix& g, const NormOrder& q) {
  const HermitianEigen eig = hermitian_eigen_unchecked(g);
  if (q.is_one()) {
    Eigen::Index idx = 0;
    eig.values.cwiseAbs().maxCoeff(&idx);
    const ComplexVector u = eig.vectors.col(idx);
    const double sign = eig.values(idx) < 0.0 ? -1.0 : 1.0;
    return sign * (u * u.adjoint());
  }
  if (q.is_infinite()) {
    return apply_spectral(eig, [](double x) { return x < 0.0 ? -1.0 : 1.0; });
  }
  const double dual_exp = q.value() / (q.value() - 1.0);
  ComplexMatrix a = apply_spectral(eig, [dual_exp](double x) {
    const double mag = std::pow(std::abs(x), dual_exp - 1.0);
    return x < 0.0 ? -mag : mag;
  });
  const double norm = schatten_norm_of_spectrum(hermitian_eigen_unchecked(a).values, q);
  return norm > 0.0 ? ComplexMatrix(a / norm) : a;
}

// Subgradient of ||b||_p at Hermitian b, up to a positive scale.
ComplexMatrix norm_gradient(const ComplexMatrix& b, const NormOrder& p) {
  const HermitianEigen eig = hermitian_eigen_unchecked(b);
  if (p.is_infinite()) {
    Eigen::Index idx = 0;
    eig.values.cwiseAbs().maxCoeff(&idx);
    const ComplexVector v = eig.vectors.col(idx);
    const double sign = eig.values(idx) < 0.0 ? -1.0 : 1.0;
    return sign * (v * v.adjoint());
  }
  const double e = p.value() - 1.0;
  return apply_spectral(eig, [e](double x) {
    if (e == 0.0) return x < 0.0 ? -1.0 : (x > 0.0 ? 1.0 : 0.0);
    const double mag = std::pow(std::abs(x), e);
    return x < 0.0 ? -mag : mag;
  });
}

double ratio(const QuantumChannel& channel, const ComplexMatrix& a, const NormOrder& q, const NormOrder& p) {
  const double denom = schatten_norm_of_spectrum(hermitian_eigen_unchecked(a).values, q);
  if (denom == 0.0) return 0.0;
  return schatten_norm_of_spectrum(hermitian_eigen_unchecked(apply(channel, a)).values, p) / denom;
}

}  // namespace

QToPEstimate norm_q_to_p_estimate(const QuantumChannel& channel, const NormOrder& q, const NormOrder& p,
                                  const AscentOptions& options) {
  if (p < q) throw std::invalid_argument("q->p estimate requires 1 <= q <= p");
  if (options.restarts == 0) throw std::invalid_argument("restarts must be >= 1");
  const std::size_t d = channel.dim();

  struct Run {
    double value = -1.0;
    ComplexMatrix a;
  };
  std::vector<Run> runs(options.restarts);
  for_each_index(options.restarts, options.threads, [&](std::size_t i) {
    Rng rng = make_rng(derive_seed(options.seed, i));
    ComplexMatrix a = random_hermitian(d, rng);
    a /= schatten_norm_of_spectrum(hermitian_eigen_unchecked(a).values, q);
    Run best{ratio(channel, a, q, p), a};
    double prev = best.value;
    for (std::size_t it = 0; it < options.max_iterations; ++it) {
      const ComplexMatrix b = hermitian_part(apply(channel, a));
      const ComplexMatrix g = hermitian_part(apply_adjoint(channel, norm_gradient(b, p)));
      a = dual_direction(g, q);
      const double v = ratio(channel, a, q, p);
      if (v > best.value) best = Run{v, a};
      if (std::abs(v - prev) < options.tol) break;
      prev = v;
    }
    runs[i] = std::move(best);
  });

  std::size_t best = 0;
  for (std::size_t i = 1; i < runs.size(); ++i) {
    if (runs[i].value > runs[best].value) best = i;
  }
  return QToPEstimate{runs[best].value, runs[best].a, options.restarts};
}

}  // namespace qmult
