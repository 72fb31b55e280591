#include "ura/channels.hpp"

#include <cmath>
#include <stdexcept>

namespace ura::ch {

double SystemParams::ebno_db() const {
  double ebno = field == Field::real
                    ? power * n / (2.0 * k)
                    : power * n / static_cast<double>(k);
  return 10.0 * std::log10(ebno);
}

double SystemParams::power_for_ebno_db(double db, int n, int k, Field field) {
  double ebno = std::pow(10.0, db / 10.0);
  return field == Field::real ? ebno * 2.0 * k / n : ebno * k / n;
}

void SystemParams::validate() const {
  if (n < 1 || k < 1 || ka < 1) {
    throw std::invalid_argument("SystemParams: n, k, K_a must be >= 1");
  }
  if (!(eps > 0.0 && eps < 1.0)) {
    throw std::invalid_argument("SystemParams: eps in (0,1)");
  }
  if (!(power > 0.0)) {
    throw std::invalid_argument("SystemParams: P > 0");
  }
}

Transmission gmac_transmit(const cb::Codebook& codebook,
                           std::span<const std::uint32_t> messages,
                           RngStream& rng, double noise_scale) {
  Transmission tx;
  tx.messages.assign(messages.begin(), messages.end());
  const Eigen::Index n = codebook.n();
  for (std::uint32_t w : messages) {
    if (w >= codebook.size()) {
      throw std::out_of_range("gmac_transmit: message outside [M]");
    }
  }
  if (!codebook.complex_field) {
    tx.y = Eigen::VectorXd::Zero(n);
    for (std::uint32_t w : messages) tx.y += codebook.cols.col(w);
    if (noise_scale != 0.0) {
      for (Eigen::Index i = 0; i < n; ++i)
        tx.y(i) += noise_scale * rng.next_gaussian();
    }
  } else {
    tx.yc = Eigen::VectorXcd::Zero(n);
    for (std::uint32_t w : messages) tx.yc += codebook.ccols.col(w);
    if (noise_scale != 0.0) {
      for (Eigen::Index i = 0; i < n; ++i)
        tx.yc(i) += noise_scale * rng.next_cgaussian();
    }
  }
  return tx;
}

Transmission rayleigh_siso_transmit(const cb::Codebook& codebook,
                                    std::span<const std::uint32_t> messages,
                                    RngStream& rng, double noise_scale) {
  if (!codebook.complex_field) {
    throw std::invalid_argument("rayleigh_siso_transmit: codebook must be complex");
  }
  Transmission tx;
  tx.messages.assign(messages.begin(), messages.end());
  const Eigen::Index n = codebook.n();
  tx.fading.resize(static_cast<Eigen::Index>(messages.size()));
  tx.yc = Eigen::VectorXcd::Zero(n);
  for (std::size_t i = 0; i < messages.size(); ++i) {
    if (messages[i] >= codebook.size()) {
      throw std::out_of_range("rayleigh_siso_transmit: message outside [M]");
    }
    std::complex<double> h = rng.next_cgaussian();
    tx.fading(static_cast<Eigen::Index>(i)) = h;
    tx.yc += h * codebook.ccols.col(messages[i]);
  }
  if (noise_scale != 0.0) {
    for (Eigen::Index i = 0; i < n; ++i)
      tx.yc(i) += noise_scale * rng.next_cgaussian();
  }
  return tx;
}

std::vector<int> two_user_bac_transmit(std::span<const int> c1,
                                       std::span<const int> c2) {
  if (c1.size() != c2.size()) {
    throw std::invalid_argument("two_user_bac_transmit: length mismatch");
  }
  std::vector<int> y(c1.size());
  for (std::size_t i = 0; i < c1.size(); ++i) y[i] = c1[i] + c2[i];
  return y;
}

namespace {
template <typename Vec>
std::vector<Vec> slots_of(const Vec& y, int L) {
  if (L < 1 || y.size() % L != 0) {
    throw std::invalid_argument("slotted_view: L must divide n");
  }
  const Eigen::Index np = y.size() / L;
  std::vector<Vec> out;
  out.reserve(L);
  for (int l = 0; l < L; ++l) out.push_back(y.segment(l * np, np));
  return out;
}
}  // namespace

std::vector<Eigen::VectorXd> slotted_view(const Eigen::VectorXd& y, int L) {
  return slots_of(y, L);
}
std::vector<Eigen::VectorXcd> slotted_view(const Eigen::VectorXcd& y, int L) {
  return slots_of(y, L);
}

}  // namespace ura::ch
