#include "ssvep/filterbank.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "ssvep/error.hpp"

namespace ssvep {

using cplx = std::complex<double>;

std::complex<double> Biquad::response(cplx z) const {
  const cplx zi = 1.0 / z;
  return (b0 + b1 * zi + b2 * zi * zi) / (1.0 + a1 * zi + a2 * zi * zi);
}

std::array<cplx, 2> Biquad::poles() const {
  // roots of z^2 + a1 z + a2
  const cplx disc = std::sqrt(cplx(a1 * a1 - 4.0 * a2, 0.0));
  return {(-a1 + disc) / 2.0, (-a1 - disc) / 2.0};
}

cplx BandpassDesign::response(double frequency) const {
  const cplx z = std::polar(1.0, 2.0 * std::numbers::pi * frequency / sampling_rate);
  cplx h = 1.0;
  for (const auto& s : sections) h *= s.response(z);
  return h;
}

double BandpassDesign::max_pole_radius() const {
  double r = 0.0;
  for (const auto& s : sections) {
    for (const auto& p : s.poles()) r = std::max(r, std::abs(p));
  }
  return r;
}

namespace {

std::vector<cplx> butterworth_prototype(int order) {
  std::vector<cplx> poles;
  for (int k = 1; k <= order; ++k) {
    poles.push_back(std::polar(1.0, std::numbers::pi * (2.0 * k + order - 1) / (2.0 * order)));
  }
  return poles;
}

cplx bilinear(cplx s, double fs) { return (2.0 * fs + s) / (2.0 * fs - s); }

// Groups digital poles into conjugate pairs / real pairs, one biquad each.
// Numerators are filled in by the caller.
std::vector<Biquad> pair_poles(std::vector<cplx> poles) {
  std::vector<Biquad> sections;
  std::vector<double> reals;
  for (const auto& p : poles) {
    if (std::abs(p.imag()) <= 1e-12 * std::max(1.0, std::abs(p))) {
      reals.push_back(p.real());
    } else if (p.imag() > 0.0) {
      Biquad q;
      q.a1 = -2.0 * p.real();
      q.a2 = std::norm(p);
      sections.push_back(q);
    }
  }
  std::sort(reals.begin(), reals.end());
  for (std::size_t i = 0; i < reals.size(); i += 2) {
    Biquad q;
    if (i + 1 < reals.size()) {
      q.a1 = -(reals[i] + reals[i + 1]);
      q.a2 = reals[i] * reals[i + 1];
    } else {
      q.a1 = -reals[i];
      q.a2 = 0.0;
    }
    sections.push_back(q);
  }
  return sections;
}

void check_stable(const BandpassDesign& d) {
  if (!(d.max_pole_radius() < 1.0)) {
    throw Error("unstable-design", "designed filter has a pole on or outside the unit circle");
  }
}

// Steady-state TDF-II state of one section for a unit constant input.
std::array<double, 2> section_zi(const Biquad& s) {
  const double gain = (s.b0 + s.b1 + s.b2) / (1.0 + s.a1 + s.a2);
  const double z2 = s.b2 - s.a2 * gain;
  const double z1 = s.b1 - s.a1 * gain + z2;
  return {z1, z2};
}

void run_sections(const std::vector<Biquad>& sections, std::vector<double>& x,
                  bool steady_state) {
  const double x0 = x.empty() ? 0.0 : x.front();
  double level = x0;
  for (const auto& s : sections) {
    double z1 = 0.0, z2 = 0.0;
    if (steady_state) {
      const auto zi = section_zi(s);
      z1 = zi[0] * level;
      z2 = zi[1] * level;
      level *= (s.b0 + s.b1 + s.b2) / (1.0 + s.a1 + s.a2);
    }
    for (auto& v : x) {
      const double in = v;
      const double y = s.b0 * in + z1;
      z1 = s.b1 * in - s.a1 * y + z2;
      z2 = s.b2 * in - s.a2 * y;
      v = y;
    }
  }
}

}  // namespace

BandpassDesign design_bandpass(double low, double high, double fs, int order) {
  if (!(fs > 0.0) || !(low > 0.0) || !(low < high) || !(high < 0.5 * fs)) {
    std::ostringstream msg;
    msg << "band [" << low << ", " << high << "] Hz invalid for f_s = " << fs;
    throw Error("invalid-band", msg.str());
  }
  if (order < 2 || order % 2 != 0) {
    throw Error("invalid-band", "band-pass order must be even and >= 2");
  }
  const double wl = 2.0 * fs * std::tan(std::numbers::pi * low / fs);
  const double wh = 2.0 * fs * std::tan(std::numbers::pi * high / fs);
  const double w0 = std::sqrt(wl * wh);
  const double bw = wh - wl;

  std::vector<cplx> digital;
  for (const auto& p : butterworth_prototype(order)) {
    const cplx a = p * bw / 2.0;
    const cplx d = std::sqrt(a * a - w0 * w0);
    digital.push_back(bilinear(a + d, fs));
    digital.push_back(bilinear(a - d, fs));
  }

  BandpassDesign design;
  design.low_cut = low;
  design.high_cut = high;
  design.sampling_rate = fs;
  design.order = order;
  design.sections = pair_poles(std::move(digital));

  const cplx zc = std::polar(1.0, 2.0 * std::atan(w0 / (2.0 * fs)));
  for (auto& s : design.sections) {
    s.b0 = 1.0;
    s.b1 = 0.0;
    s.b2 = -1.0;
    const double g = 1.0 / std::abs(s.response(zc));
    s.b0 = g;
    s.b2 = -g;
  }
  check_stable(design);
  return design;
}

BandpassDesign design_lowpass(double cut, double fs, int order) {
  if (!(fs > 0.0) || !(cut > 0.0) || !(cut < 0.5 * fs) || order < 1) {
    throw Error("invalid-band", "low-pass cut-off must lie in (0, f_s/2)");
  }
  const double wc = 2.0 * fs * std::tan(std::numbers::pi * cut / fs);
  std::vector<cplx> digital;
  for (const auto& p : butterworth_prototype(order)) digital.push_back(bilinear(p * wc, fs));

  BandpassDesign design;
  design.high_cut = cut;
  design.sampling_rate = fs;
  design.order = order;
  design.sections = pair_poles(std::move(digital));
  for (auto& s : design.sections) {
    const bool first_order = s.a2 == 0.0;
    s.b0 = 1.0;
    s.b1 = first_order ? 1.0 : 2.0;
    s.b2 = first_order ? 0.0 : 1.0;
    const double g = (1.0 + s.a1 + s.a2) / (s.b0 + s.b1 + s.b2);
    s.b0 *= g;
    s.b1 *= g;
    s.b2 *= g;
  }
  check_stable(design);
  return design;
}

Eigen::RowVectorXd sos_filter(const std::vector<Biquad>& sections, const Eigen::RowVectorXd& x) {
  std::vector<double> buf(x.data(), x.data() + x.size());
  run_sections(sections, buf, false);
  return Eigen::Map<const Eigen::RowVectorXd>(buf.data(), static_cast<Eigen::Index>(buf.size()));
}

Matrix zero_phase_filter(const Matrix& x, const BandpassDesign& design) {
  const Eigen::Index n = x.cols();
  const Eigen::Index pad = 3 * design.order;
  if (n <= pad) {
    throw Error("epoch-too-short", "zero-phase filtering needs more than " +
                                       std::to_string(pad) + " samples, got " +
                                       std::to_string(n));
  }
  Matrix out(x.rows(), n);
  std::vector<double> ext(static_cast<std::size_t>(n + 2 * pad));
  for (Eigen::Index c = 0; c < x.rows(); ++c) {
    const auto row = x.row(c);
    const double first = row(0);
    const double last = row(n - 1);
    for (Eigen::Index i = 0; i < pad; ++i) {
      ext[static_cast<std::size_t>(i)] = 2.0 * first - row(pad - i);
      ext[static_cast<std::size_t>(pad + n + i)] = 2.0 * last - row(n - 2 - i);
    }
    for (Eigen::Index i = 0; i < n; ++i) ext[static_cast<std::size_t>(pad + i)] = row(i);

    run_sections(design.sections, ext, true);
    std::reverse(ext.begin(), ext.end());
    run_sections(design.sections, ext, true);
    std::reverse(ext.begin(), ext.end());
    for (Eigen::Index i = 0; i < n; ++i) out(c, i) = ext[static_cast<std::size_t>(pad + i)];
  }
  return out;
}

Epoch zero_phase_filter(const Epoch& x, const BandpassDesign& design) {
  if (x.sampling_rate != design.sampling_rate) {
    throw Error("invalid-band", "design sampling rate differs from the epoch's");
  }
  Epoch out = x;
  out.data = zero_phase_filter(x.data, design);
  return out;
}

FilterBankSpec default_filterbank(double sampling_rate, int n_bands) {
  FilterBankSpec spec;
  const double top = std::min(88.0, 0.45 * sampling_rate);
  for (int m = 1; m <= n_bands; ++m) {
    spec.bands.emplace_back(8.0 * m, top);
    spec.weights.push_back(std::pow(static_cast<double>(m), -1.25) + 0.25);
  }
  return spec;
}

void validate_filterbank(const FilterBankSpec& spec, double sampling_rate) {
  if (spec.bands.empty()) throw Error("invalid-band", "filter bank has no bands");
  if (spec.weights.size() != spec.bands.size()) {
    throw Error("invalid-band", "filter bank needs one weight per band");
  }
  for (double w : spec.weights) {
    if (!(w > 0.0)) throw Error("invalid-band", "filter bank weights must be positive");
  }
  for (const auto& [lo, hi] : spec.bands) {
    if (!(lo > 0.0) || !(lo < hi) || !(hi < 0.5 * sampling_rate)) {
      std::ostringstream msg;
      msg << "band [" << lo << ", " << hi << "] invalid for f_s = " << sampling_rate;
      throw Error("invalid-band", msg.str());
    }
  }
}

FilterBank::FilterBank(const FilterBankSpec& spec, double sampling_rate) : spec_(spec) {
  validate_filterbank(spec, sampling_rate);
  for (const auto& [lo, hi] : spec.bands) {
    designs_.push_back(design_bandpass(lo, hi, sampling_rate, spec.order));
  }
}

BandStack FilterBank::decompose(const Matrix& x) const {
  BandStack out;
  out.reserve(designs_.size());
  for (const auto& d : designs_) out.push_back(zero_phase_filter(x, d));
  return out;
}

BandStack filterbank_decompose(const Epoch& x, const FilterBankSpec& spec) {
  return FilterBank(spec, x.sampling_rate).decompose(x.data);
}

}  // namespace ssvep
