#include "gradednet/equivariance.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gradednet/rng.hpp"

namespace gradednet {

namespace {

bool exponent_capable(const GradingSignature& sig) {
  return !sig.empty() && (sig.variant() == GradeVariant::Integer ||
                          sig.variant() == GradeVariant::Rational);
}

std::vector<GradedVector> build_probes(const GradingSignature& domain,
                                       const ProbeOptions& opts) {
  Rng rng(derive_seed(opts.seed, "equivariance-probes"));
  std::vector<GradedVector> probes;
  probes.emplace_back(domain);  // zero probe isolates additive offsets
  for (int p = 0; p < opts.probe_count; ++p) {
    GradedVector v(domain);
    for (double& x : v.flat()) x = rng.normal();
    probes.push_back(std::move(v));
  }
  // Probes supported on a single block: violations confined to one grade are
  // not diluted by the norm of unrelated blocks.
  for (std::size_t i = 0; i < domain.grade_count(); ++i) {
    for (int rep = 0; rep < 4; ++rep) {
      GradedVector v(domain);
      auto blk = v.block(i);
      if (rep < 3)
        for (double& x : blk) x = rng.normal();
      else
        for (double& x : blk) x = 1.0;  // all-ones: positive entries for max-pools
      double n = 0.0;
      for (double x : blk) n += x * x;
      n = std::sqrt(n);
      if (n > 0.0)
        for (double& x : blk) x /= n;
      probes.push_back(std::move(v));
    }
  }
  return probes;
}

}  // namespace

EquivarianceReport check_map_equivariance(const VectorFn& f, const GradingSignature& domain,
                                          const ProbeOptions& opts) {
  auto probes = build_probes(domain, opts);

  std::vector<double> lambdas = opts.lambdas;
  if (lambdas.empty()) {
    lambdas = {0.5, 2.0, 3.0};
    bool integer_both = !domain.empty() && domain.variant() == GradeVariant::Integer;
    if (integer_both) {
      // The codomain must tolerate negative scales too; probe it via f(0).
      GradedVector f0 = f(probes.front());
      integer_both = f0.sig().empty() || f0.sig().variant() == GradeVariant::Integer;
    }
    if (integer_both) lambdas.push_back(-1.0);
  }
  for (double l : lambdas)
    if (l == 0.0)
      throw std::invalid_argument("equivariance check: lambda samples must be nonzero");

  EquivarianceReport rep;
  rep.witness.v = probes.front();
  try {
    for (const auto& v : probes) {
      GradedVector fv = f(v);
      for (double lambda : lambdas) {
        GradedVector lhs = f(scalar_action(lambda, v));
        GradedVector rhs = scalar_action(lambda, fv);
        double gap = euclidean_norm(lhs - rhs) / (1.0 + euclidean_norm(rhs));
        if (gap > rep.max_violation) {
          rep.max_violation = gap;
          rep.witness.lambda = lambda;
          rep.witness.v = v;
        }
      }
    }
  } catch (const std::domain_error& e) {
    throw std::domain_error(std::string("equivariance check: ") + e.what());
  }
  rep.equivariant = rep.max_violation <= opts.tol;
  return rep;
}

GradeKernel::GradeKernel(GradingSignature sig,
                         std::map<std::pair<Grade, Grade>, Block> blocks)
    : sig_(std::move(sig)), blocks_(std::move(blocks)) {
  for (std::size_t mi = 0; mi < sig_.grade_count(); ++mi)
    for (std::size_t ni = 0; ni < sig_.grade_count(); ++ni) {
      auto key = std::make_pair(sig_.grade_at(mi), sig_.grade_at(ni));
      auto it = blocks_.find(key);
      if (it == blocks_.end())
        throw std::invalid_argument("kernel block (" + key.first.str() + "," +
                                    key.second.str() + ") missing");
      if (it->second.rows != sig_.dim_at(mi) || it->second.cols != sig_.dim_at(ni))
        throw std::invalid_argument("kernel block (" + key.first.str() + "," +
                                    key.second.str() + ") has wrong shape");
    }
}

GradedVector GradeKernel::apply(const GradedVector& f) const {
  if (f.sig() != sig_)
    throw std::invalid_argument("kernel apply: signature mismatch");
  GradedVector out(sig_);
  for (std::size_t mi = 0; mi < sig_.grade_count(); ++mi) {
    auto dst = out.block(mi);
    for (std::size_t ni = 0; ni < sig_.grade_count(); ++ni) {
      const Block& blk = blocks_.at({sig_.grade_at(mi), sig_.grade_at(ni)});
      auto src = f.block(ni);
      for (int r = 0; r < blk.rows; ++r) {
        double acc = 0.0;
        for (int c = 0; c < blk.cols; ++c) acc += blk.at(r, c) * src[static_cast<std::size_t>(c)];
        dst[static_cast<std::size_t>(r)] += acc;
      }
    }
  }
  return out;
}

KernelDiagonalityReport check_kernel_diagonality(const GradeKernel& kernel) {
  KernelDiagonalityReport rep;
  for (const auto& [key, blk] : kernel.blocks()) {
    if (key.first == key.second) continue;
    double sq = 0.0;
    for (double x : blk.a) sq += x * x;
    if (sq > 0.0) rep.offenders.push_back(key);
  }
  rep.ok = rep.offenders.empty();
  return rep;
}

BiasEquivarianceReport check_bias_equivariance(const GradedVector& b,
                                               const ProbeOptions& opts) {
  BiasEquivarianceReport rep;
  rep.ok = std::all_of(b.flat().begin(), b.flat().end(), [](double x) { return x == 0.0; });
  rep.numeric = check_map_equivariance([&b](const GradedVector& v) { return v + b; },
                                       b.sig(), opts);
  return rep;
}

PoolingReport check_pooling_equivariance(const GradingSignature& sig, const MaxPoolSpec& pool,
                                         const ProbeOptions& opts) {
  // Effective region for m defaults to {m}; validate entries and dims.
  auto region_of = [&](const Grade& m) {
    auto it = pool.regions.find(m);
    if (it == pool.regions.end()) return std::vector<Grade>{m};
    if (it->second.empty())
      throw std::invalid_argument("max pool: empty region for grade " + m.str());
    return it->second;
  };
  for (const auto& [m, region] : pool.regions) {
    if (!sig.has(m))
      throw std::invalid_argument("max pool: region key " + m.str() + " not in signature");
    for (const auto& n : region) {
      if (!sig.has(n))
        throw std::invalid_argument("max pool: region grade " + n.str() +
                                    " not in signature");
      if (sig.dim_of(n) != sig.dim_of(m))
        throw std::invalid_argument("max pool: grades " + m.str() + " and " + n.str() +
                                    " have different dims");
    }
  }

  PoolingReport rep;
  rep.ok = true;
  for (std::size_t i = 0; i < sig.grade_count(); ++i) {
    auto region = region_of(sig.grade_at(i));
    if (region.size() != 1 || !(region[0] == sig.grade_at(i))) rep.ok = false;
  }

  auto apply_pool = [&](const GradedVector& f) {
    GradedVector out(sig);
    for (std::size_t i = 0; i < sig.grade_count(); ++i) {
      auto dst = out.block(i);
      bool first = true;
      for (const auto& n : region_of(sig.grade_at(i))) {
        auto src = f.block_of(n);
        for (std::size_t k = 0; k < dst.size(); ++k)
          dst[k] = first ? src[k] : std::max(dst[k], src[k]);
        first = false;
      }
    }
    return out;
  };
  rep.numeric = check_map_equivariance(apply_pool, sig, opts);
  return rep;
}

PoolingReport check_pooling_equivariance(const GradingSignature& sig, const AvgPoolSpec& pool,
                                         const ProbeOptions& opts) {
  for (const auto& [key, weight] : pool.alpha) {
    if (!sig.has(key.first) || !sig.has(key.second))
      throw std::invalid_argument("avg pool: weight (" + key.first.str() + "," +
                                  key.second.str() + ") references unknown grade");
    if (weight != 0.0 && sig.dim_of(key.first) != sig.dim_of(key.second))
      throw std::invalid_argument("avg pool: grades " + key.first.str() + " and " +
                                  key.second.str() + " have different dims");
  }

  PoolingReport rep;
  rep.ok = true;
  for (const auto& [key, weight] : pool.alpha)
    if (!(key.first == key.second) && weight != 0.0) rep.ok = false;

  auto apply_pool = [&](const GradedVector& f) {
    GradedVector out(sig);
    for (const auto& [key, weight] : pool.alpha) {
      if (weight == 0.0) continue;
      auto dst = out.block_of(key.first);
      auto src = f.block_of(key.second);
      for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += weight * src[k];
    }
    return out;
  };
  rep.numeric = check_map_equivariance(apply_pool, sig, opts);
  return rep;
}

GradedVector parity_swap(const GradedVector& v) {
  const auto& sig = v.sig();
  if (sig.empty() || sig.variant() != GradeVariant::Parity || sig.grade_count() != 2)
    throw std::invalid_argument("parity swap: requires an even+odd signature");
  if (sig.dim_at(0) != sig.dim_at(1))
    throw std::invalid_argument("parity swap: even and odd dims differ");
  GradedVector out(sig);
  auto e = v.block(0);
  auto o = v.block(1);
  auto oe = out.block(0);
  auto oo = out.block(1);
  for (std::size_t k = 0; k < e.size(); ++k) {
    oe[k] = o[k];
    oo[k] = e[k];
  }
  return out;
}

SwapEquivarianceReport check_swap_equivariance(const GradedLayer& layer,
                                               const ProbeOptions& opts) {
  const auto& sig = layer.map.domain();
  if (sig.empty() || sig.variant() != GradeVariant::Parity || sig.grade_count() != 2)
    throw std::invalid_argument("swap check: layer must act on an even+odd signature");
  if (layer.map.codomain() != sig)
    throw std::invalid_argument("swap check: layer domain and codomain must coincide");
  if (sig.dim_at(0) != sig.dim_at(1))
    throw std::invalid_argument("swap check: even and odd dims differ");
  if (!layer.map.degree() || !layer.map.degree()->is_zero())
    throw std::invalid_argument("swap check: layer map must be grade-preserving");

  SwapEquivarianceReport rep;
  {
    int d = sig.dim_at(0);
    auto block_or_zero = [&](const Grade& g) {
      auto it = layer.map.blocks().find(g);
      return it == layer.map.blocks().end() ? Block::zeros(d, d) : it->second;
    };
    rep.tied_weights = block_or_zero(Grade::even()) == block_or_zero(Grade::odd());
    auto be = layer.bias.block(0);
    auto bo = layer.bias.block(1);
    rep.tied_bias = std::equal(be.begin(), be.end(), bo.begin(), bo.end());
  }

  Rng rng(derive_seed(opts.seed, "swap-probes"));
  std::vector<GradedVector> probes;
  probes.emplace_back(sig);
  for (int p = 0; p < opts.probe_count; ++p) {
    GradedVector v(sig);
    for (double& x : v.flat()) x = rng.normal();
    probes.push_back(std::move(v));
  }

  for (const auto& v : probes) {
    GradedVector lhs = layer.apply(parity_swap(v));
    GradedVector rhs = parity_swap(layer.apply(v));
    double gap = euclidean_norm(lhs - rhs) / (1.0 + euclidean_norm(rhs));
    rep.max_violation = std::max(rep.max_violation, gap);
  }
  rep.ok = rep.max_violation <= opts.tol;
  return rep;
}

}  // namespace gradednet
