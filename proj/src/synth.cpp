// src/synth.cpp

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

#include "risk/synth.hpp"

#include <cmath>

#include "risk/errors.hpp"

namespace risk {

namespace {

// Unit-row class codebook drawn from the shared stream.
Matrix draw_codes(GaussianStream& stream, std::int32_t classes, Eigen::Index k) {
  Matrix codes(classes, k);
  for (std::int32_t c = 0; c < classes; ++c) {
    for (Eigen::Index j = 0; j < k; ++j) codes(c, j) = stream.next();
    double norm = codes.row(c).norm();
    if (norm < 1e-12) codes(c, 0) = 1.0;  // astronomically unlikely
    else codes.row(c) /= norm;
  }
  return codes;
}

}  // namespace

void SynthConfig::validate() const {
  if (n_train < 1 || n_test < 1 || n_ood < 1)
    throw InvalidArgument("SynthConfig: split sizes must be >= 1");
  if (dim < 1) throw InvalidArgument("SynthConfig: dim must be >= 1");
  if (num_classes < 2) throw InvalidArgument("SynthConfig: num_classes must be >= 2");
  if (k_intended < 1 || k_shortcut < 0)
    throw InvalidArgument("SynthConfig: need k_intended >= 1 and k_shortcut >= 0");
  if (k_intended + k_shortcut > dim)
    throw InvalidArgument("SynthConfig: k_intended + k_shortcut must be <= dim");
  if (biased_fraction < 0.0 || biased_fraction > 1.0)
    throw InvalidArgument("SynthConfig: biased_fraction must be in [0,1]");
  if (ood_biased_fraction < 0.0 || ood_biased_fraction > 1.0)
    throw InvalidArgument("SynthConfig: ood_biased_fraction must be in [0,1]");
  if (intended_margin < 0.0 || shortcut_margin < 0.0)
    throw InvalidArgument("SynthConfig: margins must be >= 0");
  if (noise_sigma < 0.0) throw InvalidArgument("SynthConfig: noise_sigma must be >= 0");
}

SynthResult generate_synthetic(const SynthConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  GaussianStream stream(seed);

  // Planted directions: one Gaussian draw, then Gram-Schmidt, makes the
  // intended and shortcut families mutually orthonormal.
  const Eigen::Index k_total = cfg.k_intended + cfg.k_shortcut;
  Matrix raw(cfg.dim, k_total);
  for (Eigen::Index i = 0; i < cfg.dim; ++i)
    for (Eigen::Index j = 0; j < k_total; ++j) raw(i, j) = stream.next();
  Matrix basis = qr_orthonormalize(raw);

  PlantedBases bases;
  bases.intended = basis.leftCols(cfg.k_intended);
  bases.shortcut = basis.rightCols(cfg.k_shortcut);
  bases.intended_codes = draw_codes(stream, cfg.num_classes, cfg.k_intended);
  bases.shortcut_codes =
      cfg.k_shortcut > 0 ? draw_codes(stream, cfg.num_classes, cfg.k_shortcut)
                         : Matrix(cfg.num_classes, 0);
  bases.intended_margin = cfg.intended_margin;
  bases.shortcut_margin = cfg.shortcut_margin;

  // Class centers in the ambient space.
  Matrix intended_center = bases.intended_codes * bases.intended.transpose();  // C x D
  Matrix shortcut_center = cfg.k_shortcut > 0
                               ? Matrix(bases.shortcut_codes * bases.shortcut.transpose())
                               : Matrix::Zero(cfg.num_classes, cfg.dim);

  const Eigen::Index total = cfg.n_train + cfg.n_test + cfg.n_ood;
  FeatureDataset ds;
  ds.num_classes = cfg.num_classes;
  ds.features.resize(total, cfg.dim);
  ds.labels.resize(static_cast<std::size_t>(total));
  ds.group.resize(static_cast<std::size_t>(total));
  ds.split.resize(static_cast<std::size_t>(total));

  Eigen::Index row = 0;
  const Split splits[3] = {Split::id_train, Split::id_test, Split::ood};
  const Eigen::Index counts[3] = {cfg.n_train, cfg.n_test, cfg.n_ood};
  for (int s = 0; s < 3; ++s) {
    const bool ood = splits[s] == Split::ood;
    const double frac = ood ? cfg.ood_biased_fraction : cfg.biased_fraction;
    const auto n_biased = static_cast<Eigen::Index>(std::llround(frac * static_cast<double>(counts[s])));
    for (Eigen::Index i = 0; i < counts[s]; ++i, ++row) {
      const std::int32_t label = static_cast<std::int32_t>(i % cfg.num_classes);
      const bool biased = i < n_biased;
      ds.labels[static_cast<std::size_t>(row)] = label;
      ds.group[static_cast<std::size_t>(row)] = biased ? kGroupBiased : kGroupBiasFree;
      ds.split[static_cast<std::size_t>(row)] = static_cast<std::uint8_t>(splits[s]);

      Eigen::RowVectorXd z = cfg.intended_margin * intended_center.row(label);
      if (cfg.k_shortcut > 0) {
        if (biased) {
          // Label-consistent shortcut, in and out of distribution.
          z += cfg.shortcut_margin * shortcut_center.row(label);
        } else if (ood) {
          // The challenge examples break the shortcut correlation.
          if (cfg.ood_mode == SynthConfig::OodMode::flip) {
            z -= cfg.shortcut_margin * shortcut_center.row(label);
          } else {
            auto other = static_cast<std::int32_t>(
                stream.next_index(static_cast<std::uint64_t>(cfg.num_classes)));
            z += cfg.shortcut_margin * shortcut_center.row(other);
          }
        }
      }
      for (Eigen::Index j = 0; j < cfg.dim; ++j) {
        double v = z(j) + cfg.noise_sigma * stream.next();
        // Features live at f32 precision so RSKF round-trips are bit-exact.
        ds.features(row, j) = static_cast<double>(static_cast<float>(v));
      }
    }
  }

  ds.validate();
  return SynthResult{std::move(ds), std::move(bases)};
}

}  // namespace risk
