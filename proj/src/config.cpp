#include "hcot/config.hpp"

#include <cmath>

#include "hcot/error.hpp"

namespace hcot {

std::string_view to_string(GeneratorKind g) {
  return g == GeneratorKind::SpdanToy ? "spdan_toy" : "spectral_correlation";
}

GeneratorKind parse_generator(std::string_view s) {
  if (s == "spdan_toy") return GeneratorKind::SpdanToy;
  if (s == "spectral_correlation") return GeneratorKind::SpectralCorrelation;
  fail(ErrorKind::InvalidArgument, "unknown generator '" + std::string(s) +
                                       "' (expected spdan_toy or spectral_correlation)");
}

void TrackerConfig::validate() const {
  auto check = [](bool ok, const char* what) { require(ok, ErrorKind::InvalidArgument, what); };
  check(std::isfinite(dc_threshold) && dc_threshold > 0.0, "dc_threshold must be > 0");
  check(std::isfinite(offset_threshold) && offset_threshold > 0.0,
        "offset_threshold must be > 0");
  check(rectify_window >= 2, "rectify_window must be >= 2");
  for (double q : process_noise) check(std::isfinite(q) && q > 0.0, "process_noise must be > 0");
  for (double r : observation_noise) {
    check(std::isfinite(r) && r > 0.0, "observation_noise must be > 0");
  }
  check(std::isfinite(initial_covariance_scale) && initial_covariance_scale > 0.0,
        "initial_covariance_scale must be > 0");
  check(lambda1 >= 0.0 && lambda2 >= 0.0, "loss weights must be >= 0");
  check(downsample >= 1, "downsample must be >= 1");
  check(template_size >= downsample && template_size % downsample == 0,
        "template_size must be a positive multiple of downsample");
  check(search_size >= template_size && search_size % downsample == 0,
        "search_size must be a multiple of downsample and >= template_size");
  check(embed_depth >= 1 && token_dim >= 1, "embed_depth and token_dim must be >= 1");
  check(spectral_kernel >= 1 && spectral_kernel % 2 == 1, "spectral_kernel must be odd");
  check(spatial_kernel >= 1 && spatial_kernel % 2 == 1, "spatial_kernel must be odd");
  check(backbone_layers >= 1, "backbone_layers must be >= 1");
  check(attention_heads >= 1 && token_dim % attention_heads == 0,
        "attention_heads must divide token_dim");
  check(adapter_dim >= 1 && head_width >= 1, "adapter_dim and head_width must be >= 1");
  check(std::isfinite(param_std) && param_std > 0.0, "param_std must be > 0");
  check(std::isfinite(correlation_sharpness) && correlation_sharpness > 0.0,
        "correlation_sharpness must be > 0");
}

}  // namespace hcot
