#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>

#include "grid.hpp"
#include "phantom.hpp"

namespace spa {

/// Collimated circular beam at normal incidence (+z) on the top face.
struct BeamSpec {
  double diameter_mm = 40.0;
  /// Beam axis position on the top face; the face center when unset.
  std::optional<std::array<double, 2>> center_mm;
};

struct TransportConfig {
  std::uint64_t n_photons = 1'000'000;
  /// Roulette is skipped entirely when the threshold is 0.
  double roulette_threshold = 1e-4;
  int roulette_factor = 10;
  std::uint64_t seed = 0;
  /// Worker threads; 0 picks the hardware concurrency. Results do not depend
  /// on this value.
  unsigned threads = 0;

  void validate() const;
};

struct PhotonPacket {
  Vec3 position_mm;
  Vec3 direction{0.0, 0.0, 1.0};
  double weight = 1.0;
};

/// Deposited weight per voxel, normalized by the number of launched packets.
struct AbsorbedEnergyMap {
  Grid3<double> grid;
  Vec3 voxel_size_mm;
  double escaped_weight = 0.0;
  double deposited_weight = 0.0;
  /// Weight removed by roulette terminations, net of survivor boosts.
  double roulette_net_loss = 0.0;
  std::uint64_t n_photons = 0;
  /// Beam-disk draws that fell outside the top face and were redrawn.
  std::uint64_t clipped_draws = 0;
};

/// Henyey-Greenstein inversion with the g-dependent terms precomputed:
/// cos = (1 + g^2 - ((1 - g^2) / (1 - g + 2 g u))^2) / (2 g), or 2u - 1 for
/// g = 0. Result clamped to [-1, 1].
class HgSampler {
 public:
  explicit HgSampler(double g) noexcept;
  double operator()(double u) const noexcept {
    if (isotropic_) return 2.0 * u - 1.0;
    const double frac = num_ / (base_ + slope_ * u);
    const double c = (sum_ - frac * frac) * inv_2g_;
    return c < -1.0 ? -1.0 : c > 1.0 ? 1.0 : c;
  }

 private:
  bool isotropic_;
  double num_, base_, slope_, sum_, inv_2g_;
};

/// Henyey-Greenstein deflection cosine for a uniform draw u in [0, 1).
double sample_hg(double g, double u) noexcept;

/// Rotates `direction` by polar angle acos(cos_theta) and azimuth phi about
/// itself. The result is renormalized to unit length.
Vec3 spin(Vec3 direction, double cos_theta, double phi) noexcept;

/// Voxelized photon-packet transport with matched boundaries. Throws
/// ValidationError when the volume lacks properties at `wavelength_nm`.
AbsorbedEnergyMap simulate(const TissueVolume& volume, double wavelength_nm, const BeamSpec& beam,
                           const TransportConfig& config);

/// Raw dump: a text line "MCVOL nx ny nz voxel_mm" followed by little-endian
/// float32 values, x fastest.
void write_mcvol(const std::filesystem::path& path, const AbsorbedEnergyMap& map);
Grid3<float> read_mcvol(const std::filesystem::path& path, double* voxel_mm = nullptr);

}  // namespace spa
