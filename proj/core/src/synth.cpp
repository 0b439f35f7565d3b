#include "bovw/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "bovw/error.hpp"

namespace bovw {

Image render_texture(const TextureFamily& family, std::uint32_t width, std::uint32_t height, Rng& rng) {
  constexpr double kPi = std::numbers::pi;
  const double jitter = (2.0 * rng.uniform() - 1.0) * family.orientation_jitter_deg;
  const double theta = (family.orientation_deg + jitter) * kPi / 180.0;
  const double period = family.period_px * (1.0 + (2.0 * rng.uniform() - 1.0) * family.period_jitter);
  const double phase_u = 2.0 * kPi * rng.uniform();
  const double phase_v = 2.0 * kPi * rng.uniform();
  const double c = std::cos(theta);
  const double s = std::sin(theta);

  std::vector<std::uint8_t> pixels(std::size_t{width} * height);
  for (std::uint32_t y = 0; y < height; ++y) {
    for (std::uint32_t x = 0; x < width; ++x) {
      const double u = x * c + y * s;
      const double v = -x * s + y * c;
      double value = 0.0;
      switch (family.kind) {
        case TextureKind::grating:
          value = std::sin(2.0 * kPi * u / period + phase_u);
          break;
        case TextureKind::checkerboard: {
          const double p = std::sin(2.0 * kPi * u / period + phase_u) * std::sin(2.0 * kPi * v / period + phase_v);
          value = p >= 0.0 ? 1.0 : -1.0;
          break;
        }
      }
      const double intensity = 128.0 + family.contrast * value + family.noise_sigma * rng.normal();
      pixels[std::size_t{y} * width + x] = static_cast<std::uint8_t>(std::clamp(std::round(intensity), 0.0, 255.0));
    }
  }
  return Image(width, height, std::move(pixels));
}

DatasetManifest generate_corpus(const SynthSpec& spec, const std::filesystem::path& dir) {
  if (spec.families.empty()) throw Error("synthetic corpus needs at least one texture family");
  if (spec.images_per_class < 1) throw Error("synthetic corpus needs at least one image per class");
  std::filesystem::create_directories(dir);

  std::vector<ManifestEntry> entries;
  for (std::size_t f = 0; f < spec.families.size(); ++f) {
    const TextureFamily& family = spec.families[f];
    std::filesystem::create_directories(dir / family.name);
    for (std::uint32_t i = 0; i < spec.images_per_class; ++i) {
      Rng rng(derive_seed(derive_seed(spec.seed, f), i));
      const Image image = render_texture(family, spec.width, spec.height, rng);
      char file[256];
      std::snprintf(file, sizeof file, "%s_%04u.pgm", family.name.c_str(), i);
      const std::string rel = family.name + "/" + file;
      save_image(image, dir / rel);
      entries.push_back({rel, family.name});
    }
  }
  const DatasetManifest manifest(spec.name, std::move(entries), dir);
  const auto manifest_path = dir / (spec.name + ".tsv");
  write_manifest(manifest, manifest_path);
  return load_manifest(manifest_path);
}

namespace {

TextureFamily grating(std::string name, double orientation, double period) {
  TextureFamily f;
  f.name = std::move(name);
  f.kind = TextureKind::grating;
  f.orientation_deg = orientation;
  f.period_px = period;
  return f;
}

TextureFamily checker(std::string name, double orientation, double period) {
  TextureFamily f = grating(std::move(name), orientation, period);
  f.kind = TextureKind::checkerboard;
  return f;
}

}  // namespace

SynthSpec diverse_preset() {
  SynthSpec spec;
  spec.name = "diverse";
  spec.families = {
      grating("grating_000", 0.0, 8.0),       grating("grating_045", 45.0, 8.0),
      grating("grating_090", 90.0, 8.0),      grating("grating_135", 135.0, 8.0),
      grating("fine_grating_022", 22.5, 4.0), grating("coarse_grating_112", 112.5, 16.0),
      checker("checker_000", 0.0, 12.0),      checker("checker_045", 45.0, 20.0),
  };
  for (auto& f : spec.families) {
    f.orientation_jitter_deg = 25.0;
    f.period_jitter = 0.2;
    f.contrast = 60.0;
    f.noise_sigma = 60.0;
  }
  return spec;
}

SynthSpec narrow_preset() {
  const SynthSpec diverse = diverse_preset();
  SynthSpec spec;
  spec.name = "narrow";
  spec.seed = 1;
  for (const std::size_t f : {std::size_t{0}, std::size_t{2}, std::size_t{6}}) {
    TextureFamily family = diverse.families[f];
    family.period_px *= 1.25;
    family.contrast = 35.0;
    family.noise_sigma = 85.0;
    spec.families.push_back(family);
  }
  return spec;
}

SynthSpec preset_by_name(std::string_view name) {
  if (name == "diverse") return diverse_preset();
  if (name == "narrow") return narrow_preset();
  throw Error("unknown synthetic preset '" + std::string(name) + "', expected diverse or narrow");
}

}  // namespace bovw
