#include "light4d/tca.hpp"

#include "light4d/parallel.hpp"

#include <algorithm>

namespace light4d {

void TcaConfig::validate() const {
  if (radius < 0) throw std::invalid_argument("tca radius must be >= 0");
  if (!(window_sigma > 0.0)) throw std::invalid_argument("tca window sigma must be > 0");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("tca gamma must lie in [0, 1]");
}

std::vector<double> temporal_window(int f, int frames, int radius, double sigma, bool normalize) {
  std::vector<double> w(static_cast<std::size_t>(frames), 0.0);
  double total = 0.0;
  for (int j = std::max(0, f - radius); j <= std::min(frames - 1, f + radius); ++j) {
    const double d = f - j;
    w[static_cast<std::size_t>(j)] = std::exp(-d * d / (2.0 * sigma * sigma));
    total += w[static_cast<std::size_t>(j)];
  }
  if (normalize) {
    for (double& x : w) x /= total;
  }
  return w;
}

namespace {

FeatureSequence smooth(const FeatureSequence& seq, const TcaConfig& cfg) {
  const int frames = seq.frames();
  FeatureSequence out(frames, seq.tokens(), seq.dim());
  for (int f = 0; f < frames; ++f) {
    if (cfg.radius == 0 && cfg.normalize_weights) {
      out[f] = seq[f];
      continue;
    }
    const auto w = temporal_window(f, frames, cfg.radius, cfg.window_sigma, cfg.normalize_weights);
    for (int j = std::max(0, f - cfg.radius); j <= std::min(frames - 1, f + cfg.radius); ++j) {
      out[f] += w[static_cast<std::size_t>(j)] * seq[j];
    }
  }
  return out;
}

}  // namespace

SmoothedContext smooth_context(const FeatureSequence& keys, const FeatureSequence& values,
                               const TcaConfig& cfg) {
  cfg.validate();
  if (keys.frames() != values.frames() || keys.tokens() != values.tokens()) {
    throw std::invalid_argument("smooth_context: keys and values disagree in frames or tokens");
  }
  return {smooth(keys, cfg), smooth(values, cfg)};
}

AttentionOutput tca_forward(const FeatureSequence& queries, const FeatureSequence& keys,
                            const FeatureSequence& values, const TcaConfig& cfg) {
  if (queries.frames() != keys.frames() || queries.dim() != keys.dim() ||
      keys.frames() != values.frames() || keys.tokens() != values.tokens()) {
    throw std::invalid_argument("tca_forward: Q/K/V shapes disagree");
  }
  const SmoothedContext ctx = smooth_context(keys, values, cfg);
  const int frames = queries.frames();
  AttentionOutput result{FeatureSequence(frames, queries.tokens(), values.dim()),
                         FeatureSequence(frames, queries.tokens(), values.dim()),
                         FeatureSequence(frames, queries.tokens(), values.dim())};
  parallel_for(frames, [&](int f) {
    result.orig[f] = attention(queries[f], keys[f], values[f]);
    result.cons[f] = attention(queries[f], ctx.keys[f], ctx.values[f]);
    result.out[f] = result.orig[f] + cfg.gamma * (result.cons[f] - result.orig[f]);
  });
  return result;
}

}  // namespace light4d
