#pragma once

#include <array>
#include <complex>
#include <utility>
#include <vector>

#include "ssvep/core.hpp"

namespace ssvep {

// Second-order section in transposed direct form II, a0 normalised to 1.
struct Biquad {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;

  std::complex<double> response(std::complex<double> z) const;
  std::array<std::complex<double>, 2> poles() const;
};

struct BandpassDesign {
  double low_cut = 0.0;   // Hz; 0 for a low-pass design
  double high_cut = 0.0;  // Hz
  double sampling_rate = 0.0;
  int order = 0;          // analog prototype order
  std::vector<Biquad> sections;

  std::complex<double> response(double frequency) const;
  double max_pole_radius() const;
};

inline constexpr int kDefaultFilterOrder = 6;

// Butterworth band-pass via bilinear transform with pre-warped edges; `order`
// is the prototype order and yields `order` biquads. Unity gain at the
// pre-warped geometric centre. Throws "invalid-band", "unstable-design".
BandpassDesign design_bandpass(double low, double high, double sampling_rate, int order);

// Butterworth low-pass, unity DC gain. Used to colour synthetic noise.
BandpassDesign design_lowpass(double cut, double sampling_rate, int order);

// Single causal pass over a row vector, zero initial state.
Eigen::RowVectorXd sos_filter(const std::vector<Biquad>& sections,
                              const Eigen::RowVectorXd& x);

// Forward-backward filtering of each channel with odd-reflection padding of
// 3 * order samples and steady-state initial conditions. Throws
// "epoch-too-short" unless N_s > 3 * order.
Matrix zero_phase_filter(const Matrix& x, const BandpassDesign& design);
Epoch zero_phase_filter(const Epoch& x, const BandpassDesign& design);

struct FilterBankSpec {
  std::vector<std::pair<double, double>> bands;
  std::vector<double> weights;
  int order = kDefaultFilterOrder;
};

// Sub-bands [8m, min(88, 0.45 f_s)] for m = 1..n_bands with weights
// m^-1.25 + 0.25.
FilterBankSpec default_filterbank(double sampling_rate, int n_bands = 3);

void validate_filterbank(const FilterBankSpec& spec, double sampling_rate);

// One N_c x N_s matrix per band, in the order of spec.bands.
using BandStack = std::vector<Matrix>;

class FilterBank {
 public:
  FilterBank(const FilterBankSpec& spec, double sampling_rate);

  BandStack decompose(const Matrix& x) const;
  const FilterBankSpec& spec() const { return spec_; }
  const std::vector<BandpassDesign>& designs() const { return designs_; }
  std::size_t size() const { return designs_.size(); }

 private:
  FilterBankSpec spec_;
  std::vector<BandpassDesign> designs_;
};

BandStack filterbank_decompose(const Epoch& x, const FilterBankSpec& spec);

}  // namespace ssvep
