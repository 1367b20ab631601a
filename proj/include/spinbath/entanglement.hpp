// Mode-pair density matrices and entanglement measures for the bath.
#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "spinbath/bath.hpp"
#include "spinbath/common.hpp"
#include "spinbath/state.hpp"

namespace spinbath {

// Reduced state of modes (i, j) in the basis |ab> with a the occupation of
// mode i, ordered 00, 01, 10, 11.
struct TwoModeDensity {
  Eigen::Matrix4cd rho;
  int mode_i = 0;
  int mode_j = 0;
};

namespace detail {

inline void check_mode_pair(const ConfigurationSpace& s, int i, int j) {
  if (i < 0 || j < 0 || i >= s.n_modes || j >= s.n_modes || i == j)
    throw std::invalid_argument("two_mode_rdm: invalid mode pair");
}

}  // namespace detail

// Direct assembly; linear in the state size per pair.
inline TwoModeDensity two_mode_rdm(const SpinorState& psi, int i, int j) {
  detail::check_mode_pair(psi.space, i, j);
  const std::uint64_t bit_i = std::uint64_t{1} << i;
  const std::uint64_t bit_j = std::uint64_t{1} << j;
  const std::size_t n = psi.grid.n_points;
  TwoModeDensity out;
  out.mode_i = i;
  out.mode_j = j;
  out.rho.setZero();
  for (std::size_t c = 0; c < psi.space.dim(); ++c) {
    const std::uint64_t mask = psi.space.masks[c];
    const int row = 2 * ((mask & bit_i) != 0 ? 1 : 0) +
                    ((mask & bit_j) != 0 ? 1 : 0);
    const std::uint64_t rest = mask & ~(bit_i | bit_j);
    const cplx* rowc = psi.row(c);
    for (int col = 0; col < 4; ++col) {
      const std::uint64_t pmask =
          rest | ((col & 2) != 0 ? bit_i : 0) | ((col & 1) != 0 ? bit_j : 0);
      if (!psi.space.contains(pmask)) continue;
      const cplx* rowp = psi.row(psi.space.rank_of(pmask));
      cplx s{0.0, 0.0};
      for (std::size_t x = 0; x < n; ++x) s += std::conj(rowp[x]) * rowc[x];
      out.rho(row, col) += s * psi.grid.dr;
    }
  }
  return out;
}

// Inner products between configuration rows at Hamming distance <= 2; every
// mode-pair density is a relabeling of these, so one sweep serves all pairs.
class PairCorrelations {
 public:
  explicit PairCorrelations(const ConfigurationSpace& space) : space_(space) {
    const std::size_t dim = space.dim();
    for (std::size_t c1 = 0; c1 < dim; ++c1) {
      const std::uint64_t m1 = space.masks[c1];
      add_pair(c1, c1);
      for (int a = 0; a < space.n_modes; ++a) {
        const std::uint64_t ma = m1 ^ (std::uint64_t{1} << a);
        if (space.contains(ma)) add_ordered(c1, space.rank_of(ma));
        for (int b = a + 1; b < space.n_modes; ++b) {
          const std::uint64_t mab = ma ^ (std::uint64_t{1} << b);
          if (space.contains(mab)) add_ordered(c1, space.rank_of(mab));
        }
      }
    }
    values_.assign(pairs_.size(), cplx{0.0, 0.0});
  }

  // Recompute all stored inner products <row c1 | row c2> dr.
  void update(const SpinorState& psi) {
    if (psi.space.dim() != space_.dim())
      throw std::invalid_argument("PairCorrelations: state space mismatch");
    const std::size_t n = psi.grid.n_points;
    for (std::size_t s = 0; s < pairs_.size(); ++s) {
      const cplx* r1 = psi.row(pairs_[s][0]);
      const cplx* r2 = psi.row(pairs_[s][1]);
      cplx acc{0.0, 0.0};
      for (std::size_t x = 0; x < n; ++x) acc += std::conj(r1[x]) * r2[x];
      values_[s] = acc * psi.grid.dr;
    }
  }

  // <row c1 | row c2> dr from the cache.
  cplx correlation(std::size_t c1, std::size_t c2) const {
    const bool swapped = c1 > c2;
    if (swapped) std::swap(c1, c2);
    const auto it = slot_.find(key(c1, c2));
    if (it == slot_.end())
      throw std::invalid_argument("PairCorrelations: pair not cached");
    const cplx v = values_[it->second];
    return swapped ? std::conj(v) : v;
  }

  TwoModeDensity rdm(int i, int j) const {
    detail::check_mode_pair(space_, i, j);
    const std::uint64_t bit_i = std::uint64_t{1} << i;
    const std::uint64_t bit_j = std::uint64_t{1} << j;
    TwoModeDensity out;
    out.mode_i = i;
    out.mode_j = j;
    out.rho.setZero();
    for (std::size_t c = 0; c < space_.dim(); ++c) {
      const std::uint64_t mask = space_.masks[c];
      const int row = 2 * ((mask & bit_i) != 0 ? 1 : 0) +
                      ((mask & bit_j) != 0 ? 1 : 0);
      const std::uint64_t rest = mask & ~(bit_i | bit_j);
      for (int col = 0; col < 4; ++col) {
        const std::uint64_t pmask =
            rest | ((col & 2) != 0 ? bit_i : 0) | ((col & 1) != 0 ? bit_j : 0);
        if (!space_.contains(pmask)) continue;
        out.rho(row, col) += correlation(space_.rank_of(pmask), c);
      }
    }
    return out;
  }

 private:
  static std::uint64_t key(std::size_t c1, std::size_t c2) {
    return (static_cast<std::uint64_t>(c1) << 32) | c2;
  }
  void add_ordered(std::size_t c1, std::size_t c2) {
    if (c2 >= c1) add_pair(c1, c2);
  }
  void add_pair(std::size_t c1, std::size_t c2) {
    const std::uint64_t k = key(c1, c2);
    if (slot_.emplace(k, static_cast<std::uint32_t>(pairs_.size())).second)
      pairs_.push_back({static_cast<std::uint32_t>(c1),
                        static_cast<std::uint32_t>(c2)});
  }

  ConfigurationSpace space_;
  std::vector<std::array<std::uint32_t, 2>> pairs_;
  std::unordered_map<std::uint64_t, std::uint32_t> slot_;
  std::vector<cplx> values_;
};

struct PtDiagnostics {
  double lambda0 = 0.0;  // lowest partial-transpose eigenvalue
  double w1 = 0.0;       // rho00 rho33 - |rho(1,2)|^2
  double w2 = 0.0;       // rho11 rho22 - |rho(0,3)|^2
};

inline PtDiagnostics partial_transpose_diagnostics(const TwoModeDensity& d) {
  Eigen::Matrix4cd pt;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        for (int e = 0; e < 2; ++e)
          pt(2 * a + e, 2 * c + b) = d.rho(2 * a + b, 2 * c + e);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(pt);
  PtDiagnostics out;
  out.lambda0 = es.eigenvalues()(0);
  out.w1 = d.rho(0, 0).real() * d.rho(3, 3).real() - std::norm(d.rho(1, 2));
  out.w2 = d.rho(1, 1).real() * d.rho(2, 2).real() - std::norm(d.rho(0, 3));
  return out;
}

inline double binary_entropy(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

struct ConcurrenceResult {
  double concurrence = 0.0;
  double eof = 0.0;
};

inline ConcurrenceResult concurrence_and_eof(const TwoModeDensity& d) {
  Eigen::Matrix4cd yy = Eigen::Matrix4cd::Zero();
  yy(0, 3) = -1.0;
  yy(1, 2) = 1.0;
  yy(2, 1) = 1.0;
  yy(3, 0) = -1.0;
  const Eigen::Matrix4cd rho_tilde = yy * d.rho.conjugate() * yy;
  Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(d.rho * rho_tilde);
  std::array<double, 4> lam{};
  for (int k = 0; k < 4; ++k)
    lam[k] = std::sqrt(std::max(0.0, es.eigenvalues()(k).real()));
  std::sort(lam.begin(), lam.end(), std::greater<>());
  ConcurrenceResult out;
  out.concurrence = std::max(0.0, lam[0] - lam[1] - lam[2] - lam[3]);
  const double root = std::sqrt(
      std::max(0.0, 1.0 - out.concurrence * out.concurrence));
  out.eof = binary_entropy(0.5 * (1.0 + root));
  return out;
}

struct PairEntanglementRecord {
  int mode_i = 0;
  int mode_j = 0;
  double lambda0 = 0.0;
  double w1 = 0.0;
  double w2 = 0.0;
  double concurrence = 0.0;
  double eof = 0.0;
};

struct EntanglementSummary {
  double time_fs = 0.0;
  double mean_lambda0 = 0.0;      // over currently entangled pairs, 0 if none
  double entangled_fraction = 0.0;
  double mean_eof = 0.0;          // over all pairs
};

inline constexpr double entangled_threshold = -1e-10;

// Sweeps every mode pair; `per_pair` (optional) receives one record each.
inline EntanglementSummary summarize_pairs(
    const PairCorrelations& corr, const ConfigurationSpace& space,
    double time_fs, std::vector<PairEntanglementRecord>* per_pair = nullptr) {
  EntanglementSummary out;
  out.time_fs = time_fs;
  const int n = space.n_modes;
  const double n_pairs = 0.5 * n * (n - 1);
  std::size_t entangled = 0;
  double lambda_sum = 0.0, eof_sum = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const TwoModeDensity d = corr.rdm(i, j);
      const PtDiagnostics pt = partial_transpose_diagnostics(d);
      const ConcurrenceResult cc = concurrence_and_eof(d);
      if (pt.lambda0 < entangled_threshold) {
        ++entangled;
        lambda_sum += pt.lambda0;
      }
      eof_sum += cc.eof;
      if (per_pair != nullptr)
        per_pair->push_back(
            {i, j, pt.lambda0, pt.w1, pt.w2, cc.concurrence, cc.eof});
    }
  }
  out.mean_lambda0 =
      entangled > 0 ? lambda_sum / static_cast<double>(entangled) : 0.0;
  out.entangled_fraction = static_cast<double>(entangled) / n_pairs;
  out.mean_eof = eof_sum / n_pairs;
  return out;
}

inline EntanglementSummary bath_entanglement_summary(const SpinorState& psi,
                                                     double time_fs = 0.0) {
  PairCorrelations corr(psi.space);
  corr.update(psi);
  return summarize_pairs(corr, psi.space, time_fs);
}

}  // namespace spinbath
