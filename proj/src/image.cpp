// SPDX-FileCopyrightText: © 2026 The ELMA Authors
//
// SPDX-License-Identifier: Apache-2.0

#include "elma/image.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "elma/lrma.hpp"
#include "elma/parallel.hpp"

namespace elma {

namespace {

// Reference patches handled per parallel batch before their estimates are
// merged (in reference order) into the accumulator.
constexpr std::size_t kBatchSize = 256;

struct GroupEstimate {
  Matrix patches;
  std::vector<PatchOrigin> origins;
  double weight = 1.0;
};

}  // namespace

GrayImage::GrayImage(Matrix p) : pixels(std::move(p)) {
  if (pixels.rows() < 1 || pixels.cols() < 1) {
    throw ParameterError("GrayImage: empty image");
  }
  require_finite(pixels, "GrayImage");
}

GrayImage::GrayImage(Index height, Index width, double fill) {
  if (height < 1 || width < 1) throw ParameterError("GrayImage: empty image");
  if (!std::isfinite(fill)) throw ParameterError("GrayImage: non-finite fill");
  pixels = Matrix::Constant(height, width, fill);
}

void NssConfig::validate(const GrayImage& img) const {
  if (patch_size < 1) throw ParameterError("nss: patch_size must be >= 1");
  if (patch_size > std::min(img.width(), img.height())) {
    throw ParameterError("nss: image smaller than patch");
  }
  if (stride < 1) throw ParameterError("nss: stride must be >= 1");
  if (search_radius < 1) throw ParameterError("nss: search_radius must be >= 1");
  if (group_size < 1) throw ParameterError("nss: group_size must be >= 1");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw ParameterError("nss: sigma must be >= 0");
  }
  if (beta && !(*beta > 0.0)) throw ParameterError("nss: beta must be > 0");
  if (!(params.a_fraction >= 0.0 && params.a_fraction < 1.0)) {
    throw ParameterError("nss: a_fraction must lie in [0, 1)");
  }
}

double NssConfig::beta_for_method() const {
  return beta ? *beta : default_image_beta(method);
}

double default_image_beta(Method method) {
  switch (method) {
    case Method::Elma: return 12.0;
    case Method::Nnm: return 9.0;
    case Method::Ps: return 32.0;
    case Method::Wnnm: return 800.0;
  }
  return 1.0;
}

Vector extract_patch(const GrayImage& img, PatchOrigin origin,
                     Index patch_size) {
  Vector v(patch_size * patch_size);
  for (Index i = 0; i < patch_size; ++i) {
    v.segment(i * patch_size, patch_size) =
        img.pixels.row(origin.row + i)
            .segment(origin.col, patch_size)
            .transpose();
  }
  return v;
}

PatchGroup block_match(const GrayImage& img, PatchOrigin ref,
                       const NssConfig& cfg) {
  const Index p = cfg.patch_size;
  const Index max_row = img.height() - p;
  const Index max_col = img.width() - p;
  if (ref.row < 0 || ref.col < 0 || ref.row > max_row || ref.col > max_col) {
    throw ParameterError("block_match: reference patch outside image");
  }
  const Matrix& px = img.pixels;

  // (distance, 0 for the reference, raster index)
  using Key = std::tuple<double, int, Index>;
  std::vector<Key> candidates;
  const Index r0 = std::max<Index>(0, ref.row - cfg.search_radius);
  const Index r1 = std::min(max_row, ref.row + cfg.search_radius);
  const Index c0 = std::max<Index>(0, ref.col - cfg.search_radius);
  const Index c1 = std::min(max_col, ref.col + cfg.search_radius);
  candidates.reserve(static_cast<std::size_t>((r1 - r0 + 1) * (c1 - c0 + 1)));
  for (Index r = r0; r <= r1; ++r) {
    for (Index c = c0; c <= c1; ++c) {
      double d = 0.0;
      for (Index i = 0; i < p; ++i) {
        for (Index j = 0; j < p; ++j) {
          const double diff = px(r + i, c + j) - px(ref.row + i, ref.col + j);
          d += diff * diff;
        }
      }
      const bool is_ref = (r == ref.row && c == ref.col);
      candidates.emplace_back(d, is_ref ? 0 : 1, r * img.width() + c);
    }
  }
  const auto take = std::min<std::size_t>(
      candidates.size(), static_cast<std::size_t>(cfg.group_size));
  std::partial_sort(candidates.begin(), candidates.begin() + take,
                    candidates.end());

  PatchGroup g;
  g.matrix.resize(p * p, static_cast<Index>(take));
  g.origins.reserve(take);
  for (std::size_t j = 0; j < take; ++j) {
    const Index raster = std::get<2>(candidates[j]);
    const PatchOrigin o{raster / img.width(), raster % img.width()};
    g.origins.push_back(o);
    g.matrix.col(static_cast<Index>(j)) = extract_patch(img, o, p);
  }
  return g;
}

Matrix denoise_group(const PatchGroup& group, const PenaltySpec& spec) {
  return solve(group.matrix, spec).x_hat;
}

PatchAggregator::PatchAggregator(Index height, Index width, Index patch_size)
    : patch_size_(patch_size),
      sum_(Matrix::Zero(height, width)),
      weight_(Matrix::Zero(height, width)) {}

void PatchAggregator::add(const Eigen::Ref<const Vector>& column,
                          PatchOrigin origin, double weight) {
  const Index p = patch_size_;
  for (Index i = 0; i < p; ++i) {
    for (Index j = 0; j < p; ++j) {
      sum_(origin.row + i, origin.col + j) += weight * column(i * p + j);
      weight_(origin.row + i, origin.col + j) += weight;
    }
  }
}

Matrix PatchAggregator::average() const {
  Matrix out(sum_.rows(), sum_.cols());
  for (Index i = 0; i < out.rows(); ++i) {
    for (Index j = 0; j < out.cols(); ++j) {
      out(i, j) = weight_(i, j) > 0.0 ? sum_(i, j) / weight_(i, j) : 0.0;
    }
  }
  return out;
}

Index PatchAggregator::uncovered() const {
  return (weight_.array() <= 0.0).count();
}

std::vector<Index> reference_positions(Index extent, Index patch_size,
                                       Index stride) {
  std::vector<Index> pos;
  const Index last = extent - patch_size;
  for (Index x = 0; x <= last; x += stride) pos.push_back(x);
  if (pos.empty() || pos.back() != last) pos.push_back(last);
  return pos;
}

GrayImage denoise_image(const GrayImage& noisy, const NssConfig& cfg) {
  cfg.validate(noisy);
  if (cfg.sigma == 0.0) {
    return GrayImage(noisy.pixels.cwiseMax(0.0).cwiseMin(255.0).eval());
  }
  const double lambda = cfg.beta_for_method() * cfg.sigma;
  const PenaltySpec spec = make_penalty(cfg.method, lambda, cfg.params);

  std::vector<PatchOrigin> refs;
  for (Index r : reference_positions(noisy.height(), cfg.patch_size, cfg.stride)) {
    for (Index c : reference_positions(noisy.width(), cfg.patch_size, cfg.stride)) {
      refs.push_back({r, c});
    }
  }

  PatchAggregator agg(noisy.height(), noisy.width(), cfg.patch_size);
  std::vector<GroupEstimate> batch;
  for (std::size_t begin = 0; begin < refs.size(); begin += kBatchSize) {
    const std::size_t end = std::min(refs.size(), begin + kBatchSize);
    batch.assign(end - begin, {});
    parallel_for(end - begin, cfg.threads, [&](std::size_t i) {
      PatchGroup g = block_match(noisy, refs[begin + i], cfg);
      auto result = solve(g.matrix, spec);
      GroupEstimate& est = batch[i];
      if (cfg.weighting == AggregationWeight::GroupRank) {
        est.weight = 1.0 / static_cast<double>(
                               std::max<Index>(1, rank_of(result)));
      }
      est.patches = std::move(result.x_hat);
      est.origins = std::move(g.origins);
    });
    for (const GroupEstimate& est : batch) {
      for (std::size_t j = 0; j < est.origins.size(); ++j) {
        agg.add(est.patches.col(static_cast<Index>(j)), est.origins[j],
                est.weight);
      }
    }
  }
  return GrayImage(agg.average().cwiseMax(0.0).cwiseMin(255.0).eval());
}

double psnr(const GrayImage& a, const GrayImage& b) {
  if (a.height() != b.height() || a.width() != b.width()) {
    throw ParameterError("psnr: image dimensions differ");
  }
  const double mse = (a.pixels - b.pixels).squaredNorm() /
                     static_cast<double>(a.pixels.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

}  // namespace elma
