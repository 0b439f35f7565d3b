#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "bovw/corpus.hpp"
#include "bovw/rng.hpp"

namespace bovw {

enum class TextureKind { grating, checkerboard };

/// Parameterized texture class. Every rendered image draws a random phase
/// plus jittered orientation and period, then adds Gaussian pixel noise.
struct TextureFamily {
  std::string name;
  TextureKind kind = TextureKind::grating;
  double orientation_deg = 0.0;
  double period_px = 8.0;
  double orientation_jitter_deg = 0.0;
  double period_jitter = 0.0;  ///< relative, period *= 1 + U(-j, j)
  double contrast = 100.0;     ///< amplitude around mid-gray
  double noise_sigma = 0.0;
};

struct SynthSpec {
  std::string name;
  std::vector<TextureFamily> families;
  std::uint32_t images_per_class = 60;
  std::uint32_t width = 64;
  std::uint32_t height = 64;
  std::uint64_t seed = 0;
};

Image render_texture(const TextureFamily& family, std::uint32_t width, std::uint32_t height, Rng& rng);

/// Writes <dir>/<class>/<class>_<i>.pgm and <dir>/<name>.tsv; returns the
/// loaded manifest.
DatasetManifest generate_corpus(const SynthSpec& spec, const std::filesystem::path& dir);

/// Eight visually distinct families (gratings of several orientations and
/// periods, two checkerboards).
SynthSpec diverse_preset();
/// Three of the diverse families with shifted period, contrast and noise.
SynthSpec narrow_preset();
/// Looks up "diverse" or "narrow".
SynthSpec preset_by_name(std::string_view name);

}  // namespace bovw
