#include "specbench/wavelet.hpp"

#include <cmath>

#include "specbench/errors.hpp"

namespace specbench::wavelet {

namespace {

// Daubechies-8 and Symlet-8 scaling filters (decomposition lowpass, 16 taps).
constexpr std::array<double, 16> kDb8 = {
    -1.17476784124769534768e-04, 6.75449406450569331435e-04,  -3.91740373376947049761e-04,
    -4.87035299345157414452e-03, 8.74609404740577661697e-03,  1.39810279173982823786e-02,
    -4.40882539307947546314e-02, -1.73693010018075473522e-02, 1.28747426620478472303e-01,
    4.72484573913282794588e-04,  -2.84015542961546907375e-01, -1.58291052563493059302e-02,
    5.85354683654206731092e-01,  6.75630736297289757886e-01,  3.12871590914299946284e-01,
    5.44158422431040081357e-02,
};

constexpr std::array<double, 16> kSym8 = {
    -3.38241595100612557276e-03, -5.42132331791148123872e-04, 3.16950878114929807117e-02,
    7.60748732491760542435e-03,  -1.43294238350809705063e-01, -6.12733590676585240797e-02,
    4.81359651258372212013e-01,  7.77185751700523508312e-01,  3.64441894835331403613e-01,
    -5.19458381077090372568e-02, -2.72190299170560028041e-02, 4.91371796736075061585e-02,
    3.80875201389061510474e-03,  -1.49522583370482308601e-02, -3.02920514721366799724e-04,
    1.88995033275946087807e-03,
};

double energy(std::span<const double> x) {
  double e = 0.0;
  for (double v : x) e += v * v;
  return e;
}

}  // namespace

const std::array<double, 16>& lowpass(Wavelet w) { return w == Wavelet::Db8 ? kDb8 : kSym8; }

std::array<double, 16> highpass(Wavelet w) {
  const auto& h = lowpass(w);
  std::array<double, 16> g{};
  for (std::size_t n = 0; n < h.size(); ++n) {
    g[n] = ((n % 2) ? -1.0 : 1.0) * h[h.size() - 1 - n];
  }
  return g;
}

std::pair<std::vector<double>, std::vector<double>> analyze(std::span<const double> x, Wavelet w) {
  const std::size_t n = x.size();
  if (n < 2 || n % 2) throw InvalidParams("wavelet analysis needs an even, non-empty input");
  const auto& h = lowpass(w);
  const auto g = highpass(w);
  std::vector<double> approx(n / 2, 0.0);
  std::vector<double> detail(n / 2, 0.0);
  for (std::size_t k = 0; k < n / 2; ++k) {
    double a = 0.0;
    double d = 0.0;
    for (std::size_t t = 0; t < h.size(); ++t) {
      double v = x[(2 * k + t) % n];
      a += h[t] * v;
      d += g[t] * v;
    }
    approx[k] = a;
    detail[k] = d;
  }
  return {std::move(approx), std::move(detail)};
}

std::vector<double> synthesize(std::span<const double> approx, std::span<const double> detail,
                               Wavelet w) {
  if (approx.size() != detail.size() || approx.empty())
    throw InvalidParams("approximation and detail lengths differ");
  const std::size_t n = approx.size() * 2;
  const auto& h = lowpass(w);
  const auto g = highpass(w);
  std::vector<double> x(n, 0.0);
  // Transpose of the (orthogonal) analysis operator.
  for (std::size_t k = 0; k < approx.size(); ++k) {
    for (std::size_t t = 0; t < h.size(); ++t) {
      x[(2 * k + t) % n] += h[t] * approx[k] + g[t] * detail[k];
    }
  }
  return x;
}

std::vector<std::vector<double>> packet_decompose(std::span<const double> x, Wavelet w, int levels) {
  if (levels < 1) throw InvalidParams("decomposition depth must be >= 1");
  const std::size_t block = std::size_t{1} << levels;
  if (x.empty() || x.size() % block)
    throw InvalidParams("packet input length must be a multiple of 2^levels");

  std::vector<std::vector<double>> nodes{std::vector<double>(x.begin(), x.end())};
  for (int level = 0; level < levels; ++level) {
    std::vector<std::vector<double>> next;
    next.reserve(nodes.size() * 2);
    for (const auto& node : nodes) {
      auto [a, d] = analyze(node, w);
      next.push_back(std::move(a));
      next.push_back(std::move(d));
    }
    nodes = std::move(next);
  }
  return nodes;
}

std::vector<double> packet_reconstruct(const std::vector<std::vector<double>>& leaves, Wavelet w,
                                       int levels) {
  if (leaves.size() != (std::size_t{1} << levels))
    throw InvalidParams("leaf count does not match depth");
  auto nodes = leaves;
  for (int level = 0; level < levels; ++level) {
    std::vector<std::vector<double>> parents;
    parents.reserve(nodes.size() / 2);
    for (std::size_t i = 0; i < nodes.size(); i += 2) {
      parents.push_back(synthesize(nodes[i], nodes[i + 1], w));
    }
    nodes = std::move(parents);
  }
  return nodes.front();
}

std::size_t natural_index_of_band(std::size_t band) { return band ^ (band >> 1); }

std::vector<double> packet_band_energies(std::span<const double> x, Wavelet w, int levels) {
  auto leaves = packet_decompose(x, w, levels);
  std::vector<double> out(leaves.size());
  for (std::size_t band = 0; band < leaves.size(); ++band) {
    out[band] = energy(leaves[natural_index_of_band(band)]);
  }
  return out;
}

SwtLevels swt(std::span<const double> x, Wavelet w, int levels) {
  if (levels < 1) throw InvalidParams("decomposition depth must be >= 1");
  if (x.empty()) throw InvalidParams("SWT input is empty");
  const std::size_t n = x.size();
  const auto& h0 = lowpass(w);
  const auto g0 = highpass(w);
  const double scale = 1.0 / std::sqrt(2.0);

  SwtLevels out;
  std::vector<double> approx(x.begin(), x.end());
  for (int level = 0; level < levels; ++level) {
    const std::size_t stride = (std::size_t{1} << level) % n;
    std::vector<double> a(n, 0.0);
    std::vector<double> d(n, 0.0);
    for (std::size_t m = 0; m < n; ++m) {
      double sa = 0.0;
      double sd = 0.0;
      for (std::size_t t = 0; t < h0.size(); ++t) {
        double v = approx[(m + t * stride) % n];
        sa += h0[t] * v;
        sd += g0[t] * v;
      }
      a[m] = sa * scale;
      d[m] = sd * scale;
    }
    out.details.push_back(std::move(d));
    approx = std::move(a);
  }
  out.approximation = std::move(approx);
  return out;
}

std::vector<double> swt_band_energies(std::span<const double> x, Wavelet w, int levels) {
  auto levels_out = swt(x, w, levels);
  std::vector<double> out;
  out.push_back(energy(levels_out.approximation));
  for (auto it = levels_out.details.rbegin(); it != levels_out.details.rend(); ++it) {
    out.push_back(energy(*it));
  }
  return out;
}

}  // namespace specbench::wavelet
