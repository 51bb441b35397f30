// risk/synth.hpp

// Copyright 2026  RISK subspace recovery authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef RISK_SYNTH_HPP
#define RISK_SYNTH_HPP

#include <cstdint>

#include "risk/dataset.hpp"
#include "risk/linalg.hpp"

namespace risk {

/// Benchmark generator with planted intended and shortcut directions.
///
/// Every example of every split carries a class-dependent offset of magnitude
/// intended_margin inside the intended subspace.  Examples flagged biased
/// additionally carry a class-correlated offset of magnitude shortcut_margin
/// inside the shortcut subspace; bias-free ID examples carry none.  Bias-free
/// OOD examples are the challenge cases: their shortcut offset is either the
/// negated class offset (flip) or that of a uniformly drawn class (random),
/// so a shortcut-reliant classifier fails on exactly those.  Isotropic
/// Gaussian noise of scale noise_sigma is added everywhere.
struct SynthConfig {
  Eigen::Index n_train = 2000;
  Eigen::Index n_test = 1000;
  Eigen::Index n_ood = 1000;
  Eigen::Index dim = 64;
  std::int32_t num_classes = 4;
  Eigen::Index k_intended = 4;
  Eigen::Index k_shortcut = 4;
  double biased_fraction = 0.9;      // of ID examples (train and test)
  double ood_biased_fraction = 0.1;  // OOD examples whose shortcut stays label-consistent
  double intended_margin = 1.0;
  double shortcut_margin = 2.0;
  double noise_sigma = 0.3;
  enum class OodMode { flip, random } ood_mode = OodMode::flip;

  void validate() const;
};

/// The planted structure, for alignment scoring and analytic classifiers.
struct PlantedBases {
  Matrix intended;        // D x k_intended, orthonormal
  Matrix shortcut;        // D x k_shortcut, orthonormal, orthogonal to intended
  Matrix intended_codes;  // C x k_intended, unit rows (per-class offsets)
  Matrix shortcut_codes;  // C x k_shortcut, unit rows
  double intended_margin = 0.0;
  double shortcut_margin = 0.0;
};

struct SynthResult {
  FeatureDataset dataset;
  PlantedBases bases;
};

/// Deterministic: identical (cfg, seed) produce byte-identical datasets.
/// Labels cycle 0..C-1 within each split (balanced within one example);
/// the first round(fraction * N) examples of a split are the biased ones.
SynthResult generate_synthetic(const SynthConfig& cfg, std::uint64_t seed);

}  // namespace risk

#endif  // RISK_SYNTH_HPP
